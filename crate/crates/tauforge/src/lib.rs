#![no_std]
//! Exact series engine: Virasoro blocks at regular and irregular points,
//! Nekrasov-type sums, and Fourier-expanded Painlevé tau functions with
//! Hamiltonian-ODE residual checks.

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod field;
pub mod partition;

pub use field::{Field, QuadExt, Real, Q};
pub use partition::{partitions, Partition};
pub mod gamma;
pub mod pit;
pub mod scalar;
pub mod linalg;
pub mod module;
pub mod verma;
pub mod par;
pub mod nekrasov;
pub mod whittaker;
pub mod channel;
pub mod diffpoly;
pub mod tau;
pub mod mag;
pub mod skew;
