//! Exact Gauss–Jordan elimination with deterministic pivoting (first nonzero
//! entry in column order).

use alloc::vec;
use alloc::vec::Vec;

use dashu_int::ops::UnsignedAbs;
use dashu_int::{IBig, UBig};

use crate::field::{Field, Q};

/// Result of reducing `[A | B]` where `B` may carry several right-hand
/// sides.
#[derive(Clone, Debug)]
pub struct Reduced<F> {
    /// `(row, column)` of each pivot, in row order.
    pub pivots: Vec<(usize, usize)>,
    pub a: Vec<Vec<F>>,
    pub b: Vec<Vec<F>>,
    pub ncols: usize,
}

impl<F: Field> Reduced<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &(_, c) in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Rows of `B` whose `A` part vanished: each must be zero for the system
    /// to be consistent.
    pub fn obstruction_rows(&self) -> Vec<&Vec<F>> {
        self.b[self.rank()..].iter().collect()
    }
}

/// Reduce `[A | B]` to reduced row echelon form.
pub fn reduce<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<Vec<F>>, ncols: usize) -> Reduced<F> {
    let nrows = a.len();
    debug_assert_eq!(b.len(), nrows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].inv().expect("pivot is nonzero");
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for x in b[r].iter_mut() {
            *x *= &inv;
        }
        let (prow_a, prow_b) = (a[r].clone(), b[r].clone());
        for i in 0..nrows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for (x, y) in a[i].iter_mut().zip(&prow_a).skip(c) {
                if !y.is_zero() {
                    *x -= &(f.clone() * y.clone());
                }
            }
            for (x, y) in b[i].iter_mut().zip(&prow_b) {
                if !y.is_zero() {
                    *x -= &(f.clone() * y.clone());
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    Reduced { pivots, a, b, ncols }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Inconsistent;

/// Solution set `particular + span(nullspace)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution<F> {
    pub particular: Vec<F>,
    pub nullspace: Vec<Vec<F>>,
}

pub fn solve<F: Field>(a: &[Vec<F>], rhs: &[F], ncols: usize) -> Result<AffineSolution<F>, Inconsistent> {
    let b: Vec<Vec<F>> = rhs.iter().map(|x| vec![x.clone()]).collect();
    let red = reduce(a.to_vec(), b, ncols);
    if red.obstruction_rows().iter().any(|r| !r[0].is_zero()) {
        return Err(Inconsistent);
    }
    let mut particular = vec![F::zero(); ncols];
    for &(r, c) in &red.pivots {
        particular[c] = red.b[r][0].clone();
    }
    let mut nullspace = Vec::new();
    for f in red.free_columns() {
        let mut v = vec![F::zero(); ncols];
        v[f] = F::one();
        for &(r, c) in &red.pivots {
            v[c] = -red.a[r][f].clone();
        }
        nullspace.push(v);
    }
    Ok(AffineSolution { particular, nullspace })
}

/// Unique solution of a square (or overdetermined, consistent) system.
pub fn solve_unique<F: Field>(a: &[Vec<F>], rhs: &[F], ncols: usize) -> Option<Vec<F>> {
    let s = solve(a, rhs, ncols).ok()?;
    if s.nullspace.is_empty() {
        Some(s.particular)
    } else {
        None
    }
}

pub fn determinant<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return F::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].inv().unwrap();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone() * inv.clone();
            for j in c..n {
                let y = a[c][j].clone();
                a[i][j] -= &(f.clone() * y);
            }
        }
    }
    det
}

const P61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_q(x: &Q) -> Option<u64> {
    let p = UBig::from(P61);
    let n: u64 = (x.numerator().unsigned_abs() % &p).try_into().ok()?;
    let d: u64 = (x.denominator() % &p).try_into().ok()?;
    if d == 0 {
        return None;
    }
    let n = if x.numerator().sign() == dashu_int::Sign::Negative && n != 0 { P61 - n } else { n };
    Some(mulmod(n, powmod(d, P61 - 2)))
}

/// Smallest-height rational congruent to `a` mod the prime.
fn reconstruct(a: u64) -> Option<Q> {
    let bound: i128 = 1 << 30;
    let (mut r0, mut r1) = (P61 as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 >= bound {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    if s1 == 0 || s1.abs() >= bound {
        return None;
    }
    let (n, d) = if s1 < 0 { (-r1, -s1) } else { (r1, s1) };
    Some(Q::from_parts(IBig::from(n), UBig::from(d as u128)))
}

/// [`solve`] for rational systems with small-height solutions: eliminate
/// modulo a 61-bit prime, lift by rational reconstruction, and accept only
/// if the lift satisfies the original equations exactly. Falls back to the
/// exact elimination otherwise, so the result is always exact.
pub fn solve_rational(a: &[Vec<Q>], rhs: &[Q], ncols: usize) -> Result<AffineSolution<Q>, Inconsistent> {
    lifted(a, rhs, ncols).unwrap_or_else(|| solve(a, rhs, ncols))
}

fn lifted(a: &[Vec<Q>], rhs: &[Q], ncols: usize) -> Option<Result<AffineSolution<Q>, Inconsistent>> {
    let nrows = a.len();
    let mut m: Vec<Vec<u64>> = Vec::with_capacity(nrows);
    for (row, b) in a.iter().zip(rhs) {
        let mut r: Vec<u64> = row.iter().map(reduce_q).collect::<Option<_>>()?;
        r.push(reduce_q(b)?);
        m.push(r);
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = powmod(m[r][c], P61 - 2);
        for x in m[r].iter_mut() {
            *x = mulmod(*x, inv);
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, y) in row.iter_mut().zip(&prow).skip(c) {
                *x = (*x + P61 - mulmod(f, *y)) % P61;
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    if m[r..].iter().any(|row| row[ncols] != 0) {
        // possibly a bad prime; let the exact path decide
        return None;
    }
    let mut particular = vec![Q::ZERO; ncols];
    for &(r, c) in &pivots {
        particular[c] = reconstruct(m[r][ncols])?;
    }
    let mut is_pivot = vec![false; ncols];
    for &(_, c) in &pivots {
        is_pivot[c] = true;
    }
    let mut nullspace = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Q::ZERO; ncols];
        v[f] = Q::ONE;
        for &(r, c) in &pivots {
            v[c] = -reconstruct(m[r][f])?;
        }
        nullspace.push(v);
    }
    let dot = |row: &Vec<Q>, x: &Vec<Q>| {
        row.iter().zip(x).filter(|(_, y)| !y.is_zero()).fold(Q::ZERO, |acc, (a, y)| acc + a * y)
    };
    for (row, b) in a.iter().zip(rhs) {
        if dot(row, &particular) != *b || nullspace.iter().any(|v| !dot(row, v).is_zero()) {
            return None;
        }
    }
    // the lifted null vectors are independent and exact, and the rank mod p
    // never exceeds the rank over Q, so this is the full solution set
    Some(Ok(AffineSolution { particular, nullspace }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, Q};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect()
    }

    #[test]
    fn square_solve() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve_unique(&a, &[q(3, 1), q(5, 1)], 2).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        assert_eq!(determinant(&a), q(5, 1));
    }

    #[test]
    fn lifted_solve_matches_exact() {
        let a = vec![vec![q(1, 3), q(2, 7), q(0, 1)], vec![q(5, 2), q(-1, 9), q(1, 1)], vec![q(1, 1), q(1, 1), q(1, 1)]];
        let x = vec![q(3, 1), q(-2, 5), q(7, 4)];
        let b: Vec<Q> = a.iter().map(|r| r.iter().zip(&x).fold(Q::ZERO, |s, (u, v)| s + u * v)).collect();
        assert_eq!(solve_rational(&a, &b, 3).unwrap().particular, x);
        let sing = m(&[&[1, 1, 0], &[2, 2, 0], &[0, 0, 1]]);
        assert_eq!(solve_rational(&sing, &[q(1, 1), q(2, 1), q(3, 1)], 3), solve(&sing, &[q(1, 1), q(2, 1), q(3, 1)], 3));
        assert!(solve_rational(&sing, &[q(1, 1), q(3, 1), q(3, 1)], 3).is_err());
    }

    #[test]
    fn overdetermined_and_nullspace() {
        let a = m(&[&[1, 1, 0], &[2, 2, 0], &[0, 0, 1]]);
        let s = solve(&a, &[q(1, 1), q(2, 1), q(3, 1)], 3).unwrap();
        assert_eq!(s.nullspace.len(), 1);
        assert!(solve(&a, &[q(1, 1), q(3, 1), q(3, 1)], 3).is_err());
    }
}
