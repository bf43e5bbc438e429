//! Young diagrams.
//!
//! Cells are 1-based `(row, column)` pairs. Contents use the row-minus-column
//! convention `i - j`, which is what every product formula in this crate
//! expects.

use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotAPartition;

impl fmt::Display for NotAPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("parts must be positive and weakly decreasing")
    }
}

impl Partition {
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn new(parts: Vec<u32>) -> Result<Self, NotAPartition> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(NotAPartition);
        }
        Ok(Partition(parts))
    }

    /// Build from parts that are known to be valid; panics otherwise.
    pub fn from_parts(parts: &[u32]) -> Self {
        Self::new(parts.to_vec()).expect("invalid partition literal")
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `λ_i`, 1-based, zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let w = self.part(1) as usize;
        let mut out = Vec::with_capacity(w);
        for j in 1..=w as u32 {
            out.push(self.0.iter().filter(|&&p| p >= j).count() as u32);
        }
        Partition(out)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.size() as usize);
        for (r, &p) in self.0.iter().enumerate() {
            for c in 1..=p {
                out.push((r as u32 + 1, c));
            }
        }
        out
    }

    pub fn contains_cell(&self, (i, j): (u32, u32)) -> bool {
        i >= 1 && j >= 1 && self.part(i as usize) >= j
    }

    /// Arm + leg + 1; `conj` must be `self.conjugate()`.
    pub fn hook_with(&self, conj: &Partition, (i, j): (u32, u32)) -> i64 {
        self.part(i as usize) as i64 + conj.part(j as usize) as i64 - i as i64 - j as i64 + 1
    }

    pub fn hook(&self, cell: (u32, u32)) -> i64 {
        self.hook_with(&self.conjugate(), cell)
    }

    pub fn data(&self) -> PartitionData {
        let conj = self.conjugate();
        let cells = self.cells();
        let hooks = cells.iter().map(|&c| self.hook_with(&conj, c)).collect();
        let contents = cells.iter().map(|&(i, j)| i as i64 - j as i64).collect();
        PartitionData { conjugate: conj, cells, hooks, contents }
    }

    /// `ν ⊂ self`, row by row.
    pub fn contains(&self, nu: &Partition) -> bool {
        nu.len() <= self.len() && nu.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Cells of `self` not in `nu`, row-major.
    pub fn skew_cells(&self, nu: &Partition) -> Result<Vec<(u32, u32)>, SkewError> {
        if !self.contains(nu) {
            return Err(SkewError { outer: self.clone(), inner: nu.clone() });
        }
        Ok(self.cells().into_iter().filter(|&c| !nu.contains_cell(c)).collect())
    }

    /// All partitions contained in `self`, grouped by nothing in particular
    /// but emitted in a fixed order.
    pub fn subpartitions(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        sub_rec(&self.0, 0, u32::MAX, &mut cur, &mut out);
        out
    }
}

fn sub_rec(outer: &[u32], row: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    out.push(Partition(cur.clone()));
    if row >= outer.len() {
        return;
    }
    let hi = outer[row].min(cap);
    for p in (1..=hi).rev() {
        cur.push(p);
        sub_rec(outer, row + 1, p, cur, out);
        cur.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionData {
    pub conjugate: Partition,
    pub cells: Vec<(u32, u32)>,
    pub hooks: Vec<i64>,
    pub contents: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewError {
    pub outer: Partition,
    pub inner: Partition,
}

impl fmt::Display for SkewError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is not contained in {}", self.inner, self.outer)
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `[6,4,4,3,2,1]`; the empty diagram prints as `[]`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p)?;
        }
        f.write_str("]")
    }
}

/// All partitions of `n`, lexicographically decreasing: `(n)` first, `(1^n)` last.
pub fn partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    part_rec(n, n, &mut cur, &mut out);
    out
}

fn part_rec(rest: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition(cur.clone()));
        return;
    }
    for p in (1..=rest.min(cap)).rev() {
        cur.push(p);
        part_rec(rest - p, p, cur, out);
        cur.pop();
    }
}

/// Partition numbers `p(0..=n)` via Euler's pentagonal recurrence.
pub fn partition_counts(n: usize) -> Vec<u64> {
    let mut p = alloc::vec![0u64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc: i128 = 0;
        let mut k: i64 = 1;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1] as i128;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                acc += sign * p[m - g2] as i128;
            }
            k += 1;
        }
        p[m] = acc as u64;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn small_hooks() {
        let l = Partition::from_parts(&[2, 1]);
        let d = l.data();
        assert_eq!(d.conjugate, l);
        assert_eq!(d.cells, vec![(1, 1), (1, 2), (2, 1)]);
        assert_eq!(d.hooks, vec![3, 1, 1]);
        assert_eq!(d.contents, vec![0, -1, 1]);
    }

    #[test]
    fn enumeration_order() {
        let p3: Vec<_> = partitions(3).iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(p3, vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions(0), vec![Partition::empty()]);
        assert_eq!(partitions(5).len(), 7);
    }

    #[test]
    fn skew() {
        let l = Partition::from_parts(&[3, 2]);
        assert_eq!(l.skew_cells(&Partition::from_parts(&[2, 2])).unwrap(), vec![(1, 3)]);
        assert!(!Partition::from_parts(&[1, 1]).contains(&Partition::from_parts(&[2])));
        assert!(Partition::from_parts(&[1, 1]).skew_cells(&Partition::from_parts(&[2])).is_err());
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn subpartitions_of_21() {
        let subs = Partition::from_parts(&[2, 1]).subpartitions();
        assert_eq!(subs.len(), 5);
    }
}
