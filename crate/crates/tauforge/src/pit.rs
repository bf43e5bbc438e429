//! Identity testing by evaluation at seeded random rational points.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::field::Q;
use crate::scalar::{ParameterPoint, Sym};

/// Numerators are drawn from `[-NUM_BOUND, NUM_BOUND]`.
pub const NUM_BOUND: i64 = 40;
/// Denominators are drawn from `[1, DEN_BOUND]`.
pub const DEN_BOUND: i64 = 12;

/// Deterministic stream of rational sample points.
pub struct PointSampler {
    rng: ChaCha8Rng,
    vars: Vec<Sym>,
}

impl PointSampler {
    pub fn new(vars: &[Sym], seed: u64) -> Self {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(seed), vars: vars.to_vec() }
    }

    pub fn rational(&mut self) -> Q {
        let n = (self.rng.next_u32() as i64) % (2 * NUM_BOUND + 1) - NUM_BOUND;
        let d = (self.rng.next_u32() as i64) % DEN_BOUND + 1;
        Q::from(n) / Q::from(d)
    }

    /// A rational drawn from the same distribution but never an integer
    /// (useful where integer values sit on poles).
    pub fn non_integer(&mut self) -> Q {
        loop {
            let x = self.rational();
            if x.denominator() != &dashu_int::UBig::ONE {
                return x;
            }
        }
    }

    pub fn point(&mut self) -> ParameterPoint {
        let mut p = ParameterPoint::new();
        for i in 0..self.vars.len() {
            let v = self.non_integer();
            p = p.with(self.vars[i], v);
        }
        p
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PitOutcome {
    /// All `checked` evaluations agreed.
    Agree { checked: usize },
    /// First disagreeing point.
    Differ { witness: ParameterPoint, left: Q, right: Q },
}

impl PitOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, PitOutcome::Agree { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoGenericPoint;

/// Compare `f` and `g` at `trials` generic points. Either closure may return
/// `None` to declare a point non-generic; such points are skipped (with a cap
/// on attempts).
pub fn pit_check<F, G>(
    vars: &[Sym],
    f: F,
    g: G,
    trials: usize,
    seed: u64,
) -> Result<PitOutcome, NoGenericPoint>
where
    F: Fn(&ParameterPoint) -> Option<Q>,
    G: Fn(&ParameterPoint) -> Option<Q>,
{
    let mut sampler = PointSampler::new(vars, seed);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < trials {
        attempts += 1;
        if attempts > 20 * trials + 20 {
            break;
        }
        let p = sampler.point();
        let (Some(a), Some(b)) = (f(&p), g(&p)) else { continue };
        if a != b {
            return Ok(PitOutcome::Differ { witness: p, left: a, right: b });
        }
        checked += 1;
    }
    if checked == 0 {
        Err(NoGenericPoint)
    } else {
        Ok(PitOutcome::Agree { checked })
    }
}
