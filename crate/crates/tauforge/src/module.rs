//! Virasoro modules in PBW form.
//!
//! A rank-`r` module is generated by `|Λ⟩` with
//! `L_n|Λ⟩ = Λ_n|Λ⟩` for `r ≤ n ≤ 2r` and `L_n|Λ⟩ = 0` for `n > 2r`.
//! Rank 0 with `Λ_0 = Δ` is the Verma module. Basis words are weakly
//! increasing index strings `i_1 ≤ ⋯ ≤ i_k < r`, read as
//! `L_{i_1}⋯L_{i_k}|Λ⟩`; the partition label of a word is `λ_j = r - i_j`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::field::{Field, Q};
use crate::partition::Partition;

pub type Word = Vec<i32>;
pub type Vector<F> = BTreeMap<Word, F>;

pub fn word_of(rank: i32, lambda: &Partition) -> Word {
    lambda.parts().iter().map(|&p| rank - p as i32).collect()
}

pub fn partition_of(rank: i32, word: &[i32]) -> Partition {
    Partition::from_parts(&word.iter().map(|&i| (rank - i) as u32).collect::<Vec<_>>())
}

pub fn word_degree(rank: i32, word: &[i32]) -> u32 {
    word.iter().map(|&i| (rank - i) as u32).sum()
}

pub fn add_scaled<F: Field>(acc: &mut Vector<F>, v: &Vector<F>, f: &F) {
    if f.is_zero() {
        return;
    }
    for (w, x) in v {
        let e = acc.entry(w.clone()).or_insert_with(F::zero);
        *e += &(x.clone() * f.clone());
    }
    acc.retain(|_, x| !x.is_zero());
}

pub fn basis_vector<F: Field>(w: Word) -> Vector<F> {
    let mut v = BTreeMap::new();
    v.insert(w, F::one());
    v
}

pub struct Module<F: Field> {
    rank: i32,
    eig: BTreeMap<i32, F>,
    central: F,
    memo: BTreeMap<(i32, Word), Vector<F>>,
}

impl<F: Field> Module<F> {
    /// `eig[k]` is `Λ_{rank+k}`, `k = 0..=rank`.
    pub fn new(rank: i32, eig: &[F], central: F) -> Self {
        assert_eq!(eig.len(), rank as usize + 1, "need Λ_r..Λ_2r");
        let eig = eig.iter().enumerate().map(|(k, x)| (rank + k as i32, x.clone())).collect();
        Module { rank, eig, central, memo: BTreeMap::new() }
    }

    pub fn verma(delta: F, central: F) -> Self {
        Self::new(0, &[delta], central)
    }

    pub fn rank(&self) -> i32 {
        self.rank
    }

    pub fn central(&self) -> &F {
        &self.central
    }

    /// `L_n` applied to a single basis word.
    pub fn apply_word(&mut self, n: i32, word: &[i32]) -> Vector<F> {
        let key = (n, word.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let r = self.rank;
        let mut out: Vector<F> = BTreeMap::new();
        if word.is_empty() {
            if n < r {
                out.insert(alloc::vec![n], F::one());
            } else if let Some(x) = self.eig.get(&n) {
                if !x.is_zero() {
                    out.insert(Word::new(), x.clone());
                }
            }
        } else if n < r && n <= word[0] {
            let mut w = Vec::with_capacity(word.len() + 1);
            w.push(n);
            w.extend_from_slice(word);
            out.insert(w, F::one());
        } else {
            // L_n L_i rest = L_i (L_n rest) + (n-i) L_{n+i} rest + central term
            let i = word[0];
            let rest = &word[1..];
            let inner = self.apply_word(n, rest);
            for (w, x) in &inner {
                let moved = self.apply_word(i, w);
                add_scaled(&mut out, &moved, x);
            }
            if n != i {
                let comm = self.apply_word(n + i, rest);
                add_scaled(&mut out, &comm, &F::from_i64((n - i) as i64));
            }
            if n + i == 0 {
                let nn = n as i64;
                let f = self.central.clone() * F::from_q(&(Q::from(nn * nn * nn - nn) / Q::from(12)));
                add_scaled(&mut out, &basis_vector(rest.to_vec()), &f);
            }
        }
        self.memo.insert(key, out.clone());
        out
    }

    pub fn apply(&mut self, n: i32, v: &Vector<F>) -> Vector<F> {
        let mut out = BTreeMap::new();
        for (w, x) in v {
            let img = self.apply_word(n, w);
            add_scaled(&mut out, &img, x);
        }
        out
    }
}
