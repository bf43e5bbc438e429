//! Verma modules: Gram matrices, descendants of a primary vertex operator,
//! four-point blocks, and the collision limit of the vertex image.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{Field, Q};
use crate::linalg;
use crate::module::{basis_vector, partition_of, word_of, Module, Vector};
use crate::partition::{partitions, Partition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VermaError {
    /// The Gram matrix at this level is singular.
    Degenerate { level: u32 },
}

impl fmt::Display for VermaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VermaError::Degenerate { level } => write!(f, "degenerate weight: Gram matrix singular at level {}", level),
        }
    }
}

/// An element of a Verma module in the basis `L_{-λ}|Δ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct VermaVector<F> {
    pub coeffs: BTreeMap<Partition, F>,
}

impl<F: Field> VermaVector<F> {
    pub fn from_words(v: &Vector<F>) -> Self {
        VermaVector { coeffs: v.iter().map(|(w, x)| (partition_of(0, w), x.clone())).collect() }
    }

    pub fn to_words(&self) -> Vector<F> {
        self.coeffs.iter().map(|(p, x)| (word_of(0, p), x.clone())).collect()
    }

    pub fn get(&self, p: &Partition) -> F {
        self.coeffs.get(p).cloned().unwrap_or_else(F::zero)
    }

    /// Common level of all terms, if homogeneous.
    pub fn level(&self) -> Option<u32> {
        let mut it = self.coeffs.keys().map(|p| p.size());
        let first = it.next().unwrap_or(0);
        it.all(|s| s == first).then_some(first)
    }
}

pub fn verma_l_action<F: Field>(module: &mut Module<F>, n: i32, v: &VermaVector<F>) -> VermaVector<F> {
    VermaVector::from_words(&module.apply(n, &v.to_words()))
}

/// `⟨Δ|L_λ X⟩` for `L_λ = L_{λ_k}⋯L_{λ_1}`: apply `L_{λ_1}` first and read
/// off the highest-weight coefficient.
fn bra_pairing<F: Field>(module: &mut Module<F>, lambda: &Partition, x: &Vector<F>) -> F {
    let mut v = x.clone();
    for &p in lambda.parts() {
        v = module.apply(p as i32, &v);
        if v.is_empty() {
            return F::zero();
        }
    }
    v.get(&Vec::new()).cloned().unwrap_or_else(F::zero)
}

fn gram_with<F: Field>(module: &mut Module<F>, m: u32) -> Vec<Vec<F>> {
    let basis = partitions(m);
    let kets: Vec<Vector<F>> = basis.iter().map(|mu| basis_vector(word_of(0, mu))).collect();
    basis
        .iter()
        .map(|lam| kets.iter().map(|k| bra_pairing(module, lam, k)).collect())
        .collect()
}

/// `⟨Δ|L_λ L_{-μ}|Δ⟩` over partitions of `m` in canonical order.
pub fn gram_matrix<F: Field>(delta: &F, c: &F, m: u32) -> Vec<Vec<F>> {
    let mut module = Module::verma(delta.clone(), c.clone());
    gram_with(&mut module, m)
}

/// Coefficient in `L_n v_m = (Δ3 + nΔ2 − Δ1 + m − n) v_{m−n}`, `n ≥ 1`.
fn descend<F: Field>(d3: &F, d2: &F, d1: &F, n: u32, m: u32) -> F {
    d3.clone() + F::from_i64(n as i64) * d2.clone() - d1.clone() + F::from_i64(m as i64 - n as i64)
}

/// Levels `0..=m` of `Φ^{Δ2}_{Δ3,Δ1}(z)|Δ1⟩` in the Verma module over `Δ3`.
pub fn vertex_descendants<F: Field>(d3: &F, d2: &F, d1: &F, c: &F, m: u32) -> Result<Vec<VermaVector<F>>, VermaError> {
    let mut module = Module::verma(d3.clone(), c.clone());
    let mut out = vec![VermaVector { coeffs: [(Partition::empty(), F::one())].into_iter().collect() }];
    for level in 1..=m {
        let basis = partitions(level);
        let gram = gram_with(&mut module, level);
        let rhs: Vec<F> = basis
            .iter()
            .map(|lam| {
                let mut acc = F::one();
                let mut rem = level;
                for &p in lam.parts() {
                    acc *= &descend(d3, d2, d1, p, rem);
                    rem -= p;
                }
                acc
            })
            .collect();
        let sol = linalg::solve_unique(&gram, &rhs, basis.len()).ok_or(VermaError::Degenerate { level })?;
        let coeffs = basis.into_iter().zip(sol).filter(|(_, x)| !x.is_zero()).collect();
        out.push(VermaVector { coeffs });
    }
    Ok(out)
}

pub fn vertex_descendant<F: Field>(d3: &F, d2: &F, d1: &F, c: &F, m: u32) -> Result<VermaVector<F>, VermaError> {
    Ok(vertex_descendants(d3, d2, d1, c, m)?.pop().unwrap())
}

/// `⟨Δ4|Φ^{Δ3}(1) L_{-λ}|Δ⟩ / ⟨Δ4|Φ^{Δ3}(1)|Δ⟩`.
///
/// Since `⟨Δ4|L_{-n} = 0`, moving `L_{-n}` leftward leaves only the
/// commutator `-z^{-n}(z∂_z + (1-n)Δ3)Φ`; on a level-`ℓ` vector the
/// correlator goes like `z^{Δ4-Δ3-Δ-ℓ}`, so each step contributes
/// `Δ + ℓ + nΔ3 - Δ4` with `ℓ` the level still to its right.
pub fn dual_matrix_element<F: Field>(d4: &F, d3: &F, delta: &F, lambda: &Partition) -> F {
    let mut acc = F::one();
    let mut right: u32 = lambda.size();
    for &p in lambda.parts() {
        right -= p;
        acc *= &(delta.clone() + F::from_i64(right as i64) + F::from_i64(p as i64) * d3.clone() - d4.clone());
    }
    acc
}

/// Conformal weights of a four-point block `⟨Δ4|Φ_{Δ3}(1)Φ_{Δ2}(t)|Δ1⟩`
/// with internal weight `Δ`.
#[derive(Clone, Debug)]
pub struct BlockWeights<F> {
    pub d1: F,
    pub d2: F,
    pub delta: F,
    pub d3: F,
    pub d4: F,
    pub c: F,
}

/// Coefficients `B_0..=B_M` of the bare block (no `t^{Δ-Δ1-Δ2}`).
pub fn four_point_block<F: Field>(w: &BlockWeights<F>, order: u32) -> Result<Vec<F>, VermaError> {
    let vs = vertex_descendants(&w.delta, &w.d2, &w.d1, &w.c, order)?;
    Ok(vs
        .iter()
        .map(|v| {
            v.coeffs.iter().fold(F::zero(), |acc, (lam, x)| {
                acc + x.clone() * dual_matrix_element(&w.d4, &w.d3, &w.delta, lam)
            })
        })
        .collect())
}

/// Input of the collision limit: `Δ2 − Δ1 = c1Λ + c10`,
/// `2Δ2 − Δ1 = c2Λ² + c21Λ + c20`, with `z = w/Λ`.
#[derive(Clone, Debug)]
pub struct CollisionData {
    pub c1: Q,
    pub c2: Q,
    pub c10: Q,
    pub c21: Q,
    pub c20: Q,
    pub d3: Q,
    pub central: Q,
}

#[derive(Clone, Debug)]
pub struct CollisionReport {
    pub lambdas: Vec<Q>,
    /// `max |v_m/Λ^m − p_m|` per Λ, indexed `[Λ][m]`.
    pub deviation: Vec<Vec<f64>>,
    /// `max |v_m/Λ_{i+1}^{m} − v_m/Λ_i^{m}|` between successive Λ, `[i][m]`.
    pub successive: Vec<Vec<f64>>,
    /// `L_1 p_m − c1 p_{m−1}` and `L_2 p_m − c2 p_{m−2}`, exact; all zero
    /// when the limit is consistent.
    pub residuals_exact_zero: bool,
    /// Levels skipped because the Gram matrix was singular.
    pub skipped: Vec<u32>,
}

fn max_abs_diff(a: &VermaVector<Q>, b: &VermaVector<Q>) -> f64 {
    let mut keys: Vec<&Partition> = a.coeffs.keys().chain(b.coeffs.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| {
            let d = a.get(k) - b.get(k);
            d.to_f64().value().abs()
        })
        .fold(0.0, f64::max)
}

fn scale(v: &VermaVector<Q>, f: &Q) -> VermaVector<Q> {
    VermaVector { coeffs: v.coeffs.iter().map(|(p, x)| (p.clone(), x * f)).collect() }
}

/// The limit `p_m` solved directly: in the right-hand side of the Gram
/// system only parts 1 and 2 survive, contributing `c1` and `c2`.
pub fn collision_limit(data: &CollisionData, m_max: u32) -> Result<Vec<VermaVector<Q>>, VermaError> {
    let mut module = Module::verma(data.d3.clone(), data.central.clone());
    let mut out = vec![VermaVector { coeffs: [(Partition::empty(), Q::ONE)].into_iter().collect() }];
    for level in 1..=m_max {
        let basis = partitions(level);
        let gram = gram_with(&mut module, level);
        let rhs: Vec<Q> = basis
            .iter()
            .map(|lam| {
                lam.parts().iter().fold(Q::ONE, |acc, &p| match p {
                    1 => acc * &data.c1,
                    2 => acc * &data.c2,
                    _ => Q::ZERO,
                })
            })
            .collect();
        let sol = linalg::solve_unique(&gram, &rhs, basis.len()).ok_or(VermaError::Degenerate { level })?;
        out.push(VermaVector { coeffs: basis.into_iter().zip(sol).filter(|(_, x)| !x.is_zero()).collect() });
    }
    Ok(out)
}

pub fn collision_check(data: &CollisionData, lambdas: &[Q], m_max: u32) -> Result<CollisionReport, VermaError> {
    let limit = collision_limit(data, m_max)?;
    let mut module = Module::verma(data.d3.clone(), data.central.clone());
    let mut residuals_exact_zero = true;
    for m in 1..=m_max as usize {
        let p = limit[m].to_words();
        for (n, cn) in [(1usize, &data.c1), (2usize, &data.c2)] {
            if n > m {
                continue;
            }
            let mut lhs = module.apply(n as i32, &p);
            crate::module::add_scaled(&mut lhs, &limit[m - n].to_words(), &(-cn.clone()));
            residuals_exact_zero &= lhs.is_empty();
        }
    }

    let mut scaled_runs: Vec<Option<Vec<VermaVector<Q>>>> = Vec::new();
    let mut skipped = Vec::new();
    for lam in lambdas {
        let d2 = &data.c2 * lam * lam + &data.c21 * lam + &data.c20 - &data.c1 * lam - &data.c10;
        let d1 = &d2 - &data.c1 * lam - &data.c10;
        match vertex_descendants(&data.d3, &d2, &d1, &data.central, m_max) {
            Ok(vs) => {
                let mut pw = Q::ONE;
                let inv = Q::ONE / lam;
                let run = vs
                    .iter()
                    .map(|v| {
                        let s = scale(v, &pw);
                        pw *= &inv;
                        s
                    })
                    .collect();
                scaled_runs.push(Some(run));
            }
            Err(VermaError::Degenerate { level }) => {
                skipped.push(level);
                scaled_runs.push(None);
            }
        }
    }
    let deviation = scaled_runs
        .iter()
        .map(|r| match r {
            Some(run) => run.iter().zip(&limit).map(|(a, b)| max_abs_diff(a, b)).collect(),
            None => vec![f64::NAN; m_max as usize + 1],
        })
        .collect();
    let successive = scaled_runs
        .windows(2)
        .map(|w| match (&w[0], &w[1]) {
            (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| max_abs_diff(x, y)).collect(),
            _ => vec![f64::NAN; m_max as usize + 1],
        })
        .collect();
    Ok(CollisionReport { lambdas: lambdas.to_vec(), deviation, successive, residuals_exact_zero, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    #[test]
    fn gram_small_levels() {
        let (d, c) = (q(2, 5), q(3, 7));
        assert_eq!(gram_matrix(&d, &c, 0), vec![vec![q(1, 1)]]);
        assert_eq!(gram_matrix(&d, &c, 1), vec![vec![q(4, 5)]]);
        let g = gram_matrix(&d, &c, 2);
        let x = q(4, 1) * &d + &c / q(2, 1);
        let y = q(6, 1) * &d;
        let z = q(8, 1) * &d * &d + q(4, 1) * &d;
        assert_eq!(g, vec![vec![x, y.clone()], vec![y, z]]);
    }

    #[test]
    fn level_one_descendant() {
        let (d3, d2, d1) = (q(1, 3), q(2, 7), q(-1, 5));
        let v = vertex_descendant(&d3, &d2, &d1, &q(1, 1), 1).unwrap();
        let expect = (&d3 + &d2 - &d1) / (q(2, 1) * &d3);
        assert_eq!(v.get(&Partition::from_parts(&[1])), expect);
    }

    #[test]
    fn dual_examples() {
        let (d4, d3, d) = (q(1, 2), q(1, 3), q(1, 7));
        assert_eq!(dual_matrix_element(&d4, &d3, &d, &Partition::empty()), q(1, 1));
        assert_eq!(dual_matrix_element(&d4, &d3, &d, &Partition::from_parts(&[1])), &d + &d3 - &d4);
        assert_eq!(
            dual_matrix_element(&d4, &d3, &d, &Partition::from_parts(&[1, 1])),
            (&d + q(1, 1) + &d3 - &d4) * (&d + &d3 - &d4)
        );
    }

    #[test]
    fn block_first_coefficient() {
        let w = BlockWeights { d1: q(1, 9), d2: q(2, 7), delta: q(3, 11), d3: q(1, 5), d4: q(4, 13), c: q(1, 1) };
        let b = four_point_block(&w, 1).unwrap();
        assert_eq!(b[0], q(1, 1));
        let expect = (&w.delta + &w.d3 - &w.d4) * (&w.delta + &w.d2 - &w.d1) / (q(2, 1) * &w.delta);
        assert_eq!(b[1], expect);
    }

    #[test]
    fn degenerate_weight_is_an_error() {
        let r = vertex_descendant(&q(0, 1), &q(1, 2), &q(1, 3), &q(1, 1), 1);
        assert_eq!(r, Err(VermaError::Degenerate { level: 1 }));
    }
}
