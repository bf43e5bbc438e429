//! Irregular vertex operators between Whittaker modules of rank 1 and 2,
//! their pairings, and the resulting irregular conformal block series.
//!
//! `Φ(z)|Λ⟩ = z^α exp(Σ_{k≤r} β_k z^{-k}) Σ_m w_m z^m` with
//! `w_m ∈ W_{Λ'}`. Commuting `L_n` (`r ≤ n ≤ 2r`, where `L_n|Λ⟩ = Λ_n|Λ⟩`)
//! through `Φ` gives
//!
//! ```text
//! (L_n − Λ'_n) w_m = Σ_{k=1}^{r} −kβ_k w_{m−n+k} + (α + (n+1)Δ + m − n) w_{m−n}
//! ```
//!
//! with `Λ'_r = Λ_r − rβ_r` absorbing the `k = r, n = r` term. `L_n` for
//! `n < r` gives no closed relation (`L_n|Λ⟩` is not proportional to
//! `|Λ⟩`), so only these `r + 1` families are imposed.
//!
//! `L_n − Λ'_n` strictly lowers word degree, so each `w_m` is solved one
//! degree at a time from the top down. Quantities not yet fixed at a given
//! level (α, `β_1..β_{r−1}`, the `|Λ'⟩` components of recent `w_m`, any
//! free columns) are carried as affine parameters and eliminated as later
//! levels produce constraints.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{Field, Q, QuadExt};
use crate::linalg;
use crate::module::{add_scaled, word_degree, word_of, Module, Vector, Word};
use crate::partition::partitions;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrregularError {
    UnsupportedRank(i32),
    /// `Λ_{2r} = 0` or `β_r = 0`.
    Domain(&'static str),
    /// A product of two unknowns appeared.
    Bilinear { level: u32 },
    Inconsistent { level: u32 },
    /// Parameters still free after the level cap.
    Undetermined { level: u32 },
    RankMismatch,
}

impl fmt::Display for IrregularError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrregularError::UnsupportedRank(r) => write!(f, "rank {} not supported (1 or 2)", r),
            IrregularError::Domain(s) => write!(f, "domain error: {}", s),
            IrregularError::Bilinear { level } => write!(f, "bilinear unknowns at level {}", level),
            IrregularError::Inconsistent { level } => write!(f, "inconsistent relations at level {}", level),
            IrregularError::Undetermined { level } => write!(f, "coefficients undetermined up to level {}", level),
            IrregularError::RankMismatch => write!(f, "pairing does not match the module rank"),
        }
    }
}

/// `c + Σ t_p · x_p` over parameters `x_p`.
#[derive(Clone, Debug, PartialEq)]
struct Aff<F> {
    c: F,
    t: BTreeMap<u32, F>,
}

impl<F: Field> Aff<F> {
    fn constant(c: F) -> Self {
        Aff { c, t: BTreeMap::new() }
    }
    fn param(p: u32) -> Self {
        let mut t = BTreeMap::new();
        t.insert(p, F::one());
        Aff { c: F::zero(), t }
    }
    fn zero() -> Self {
        Self::constant(F::zero())
    }
    fn is_const(&self) -> bool {
        self.t.is_empty()
    }
    fn is_zero(&self) -> bool {
        self.t.is_empty() && self.c.is_zero()
    }
    fn add_scaled(&mut self, o: &Aff<F>, f: &F) {
        if f.is_zero() {
            return;
        }
        self.c += &(o.c.clone() * f.clone());
        for (k, v) in &o.t {
            let e = self.t.entry(*k).or_insert_with(F::zero);
            *e += &(v.clone() * f.clone());
            if e.is_zero() {
                self.t.remove(k);
            }
        }
    }
    fn scaled(&self, f: &F) -> Aff<F> {
        let mut out = Aff::zero();
        out.add_scaled(self, f);
        out
    }
    /// Product, provided at most one side carries parameters.
    fn mul(&self, o: &Aff<F>) -> Option<Aff<F>> {
        if self.is_const() {
            Some(o.scaled(&self.c))
        } else if o.is_const() {
            Some(self.scaled(&o.c))
        } else {
            None
        }
    }
    fn subst(&mut self, p: u32, form: &Aff<F>) {
        if let Some(f) = self.t.remove(&p) {
            self.add_scaled(form, &f);
        }
    }
}

type AffVector<F> = BTreeMap<Word, Aff<F>>;

fn add_into<F: Field>(acc: &mut AffVector<F>, w: &Word, x: Aff<F>) {
    let e = acc.entry(w.clone()).or_insert_with(Aff::zero);
    e.add_scaled(&x, &F::one());
    if e.is_zero() {
        acc.remove(w);
    }
}

/// Exponents and outgoing label of an irregular vertex operator.
#[derive(Clone, Debug, PartialEq)]
pub struct IrregularParams<F> {
    pub rank: i32,
    pub delta: F,
    /// `(Λ_r, …, Λ_{2r})`
    pub lambda: Vec<F>,
    /// `(Λ'_r, …, Λ'_{2r})`
    pub lambda_out: Vec<F>,
    pub alpha: F,
    /// `(β_1, …, β_r)`
    pub betas: Vec<F>,
}

#[derive(Clone, Debug)]
pub struct IrregularVertex<F> {
    pub params: IrregularParams<F>,
    /// `w_0, …, w_M` as PBW vectors over `|Λ'⟩`.
    pub levels: Vec<Vector<F>>,
}

struct Solver<F: Field> {
    rank: i32,
    delta: F,
    lambda_out: Vec<F>,
    module: Module<F>,
    alpha: Aff<F>,
    betas: Vec<Aff<F>>,
    w: Vec<AffVector<F>>,
    next_param: u32,
    words_by_degree: Vec<Vec<Word>>,
}

impl<F: Field> Solver<F> {
    fn new_param(&mut self) -> Aff<F> {
        let p = self.next_param;
        self.next_param += 1;
        Aff::param(p)
    }

    fn words(&mut self, d: u32) -> &[Word] {
        while self.words_by_degree.len() <= d as usize {
            let e = self.words_by_degree.len() as u32;
            let ws = partitions(e).iter().map(|l| word_of(self.rank, l)).collect();
            self.words_by_degree.push(ws);
        }
        &self.words_by_degree[d as usize]
    }

    /// `(L_n − Λ'_n)` on a single basis word.
    fn lowered(&mut self, n: i32, word: &Word) -> Vector<F> {
        let mut v = self.module.apply_word(n, word);
        let ev = self.lambda_out[(n - self.rank) as usize].clone();
        crate::module::add_scaled(&mut v, &crate::module::basis_vector(word.clone()), &(-ev));
        v
    }

    fn apply_lowered(&mut self, n: i32, v: &AffVector<F>) -> AffVector<F> {
        let mut out = AffVector::new();
        for (w, x) in v {
            let img = self.lowered(n, w);
            for (u, y) in img {
                debug_assert!(word_degree(self.rank, &u) < word_degree(self.rank, w), "L_n − Λ'_n must lower degree");
                add_into(&mut out, &u, x.scaled(&y));
            }
        }
        out
    }

    fn rhs(&self, n: i32, m: u32) -> Result<AffVector<F>, IrregularError> {
        let r = self.rank;
        let mut out = AffVector::new();
        let mut push = |coef: &Aff<F>, idx: i64| -> Result<(), IrregularError> {
            if idx < 0 || idx >= m as i64 {
                return Ok(());
            }
            for (w, x) in &self.w[idx as usize] {
                let term = coef.mul(x).ok_or(IrregularError::Bilinear { level: m })?;
                add_into(&mut out, w, term);
            }
            Ok(())
        };
        for k in 1..=r {
            let coef = self.betas[(k - 1) as usize].scaled(&F::from_i64(-(k as i64)));
            push(&coef, m as i64 - n as i64 + k as i64)?;
        }
        let mut coef = self.alpha.clone();
        coef.c += &(F::from_i64(n as i64 + 1) * self.delta.clone() + F::from_i64(m as i64 - n as i64));
        push(&coef, m as i64 - n as i64)?;
        Ok(out)
    }

    fn level(&mut self, m: u32) -> Result<Vec<Aff<F>>, IrregularError> {
        let r = self.rank;
        let ns: Vec<i32> = (r..=2 * r).collect();
        let mut target: Vec<AffVector<F>> = Vec::new();
        for &n in &ns {
            target.push(self.rhs(n, m)?);
        }
        let mut wm: AffVector<F> = AffVector::new();
        let mut constraints = Vec::new();
        for d in (0..m).rev() {
            let rows_words = self.words(d).to_vec();
            let cols = self.words(d + 1).to_vec();
            // A: (n, output word of degree d) × (input word of degree d + 1)
            let mut a = Vec::with_capacity(ns.len() * rows_words.len());
            let mut y = Vec::with_capacity(a.capacity());
            let col_images: Vec<Vec<Vector<F>>> =
                ns.iter().map(|&n| cols.iter().map(|w| self.lowered(n, w)).collect()).collect();
            for (ni, _) in ns.iter().enumerate() {
                for rw in &rows_words {
                    a.push(col_images[ni].iter().map(|img| img.get(rw).cloned().unwrap_or_else(F::zero)).collect::<Vec<F>>());
                    y.push(target[ni].get(rw).cloned().unwrap_or_else(Aff::zero));
                }
            }
            let solved = self.solve_block(a, y, cols.len(), &mut constraints);
            let mut block = AffVector::new();
            for (w, x) in cols.iter().zip(solved) {
                if !x.is_zero() {
                    block.insert(w.clone(), x);
                }
            }
            for (ni, &n) in ns.iter().enumerate() {
                let img = self.apply_lowered(n, &block);
                for (u, x) in img {
                    add_into(&mut target[ni], &u, x.scaled(&F::from_i64(-1)));
                }
            }
            wm.extend(block);
        }
        // whatever remains of the targets lives in degree < 0: nothing; the
        // rows at degree 0 were consumed above. The |Λ'⟩ component is free.
        let p = self.new_param();
        wm.insert(Word::new(), p);
        self.w.push(wm);
        Ok(constraints)
    }

    /// Solve `A x = y` for affine `y`; free columns become new parameters,
    /// obstruction rows become constraints.
    fn solve_block(&mut self, a: Vec<Vec<F>>, y: Vec<Aff<F>>, ncols: usize, constraints: &mut Vec<Aff<F>>) -> Vec<Aff<F>> {
        let mut params: Vec<u32> = y.iter().flat_map(|x| x.t.keys().copied()).collect();
        params.sort_unstable();
        params.dedup();
        let width = params.len() + 1;
        let b: Vec<Vec<F>> = y
            .iter()
            .map(|x| {
                let mut row = vec![x.c.clone()];
                row.extend(params.iter().map(|p| x.t.get(p).cloned().unwrap_or_else(F::zero)));
                row
            })
            .collect();
        let red = linalg::reduce(a, b, ncols);
        let to_aff = |row: &Vec<F>| {
            let mut x = Aff::constant(row[0].clone());
            for (i, p) in params.iter().enumerate() {
                if !row[i + 1].is_zero() {
                    x.t.insert(*p, row[i + 1].clone());
                }
            }
            x
        };
        debug_assert!(red.b.iter().all(|r| r.len() == width));
        for row in red.obstruction_rows() {
            let x = to_aff(row);
            if !x.is_zero() {
                constraints.push(x);
            }
        }
        let mut sol: Vec<Aff<F>> = vec![Aff::zero(); ncols];
        let free = red.free_columns();
        let free_params: Vec<Aff<F>> = free.iter().map(|_| self.new_param()).collect();
        for (f, p) in free.iter().zip(&free_params) {
            sol[*f] = p.clone();
        }
        for &(row, col) in &red.pivots {
            let mut x = to_aff(&red.b[row]);
            for (f, p) in free.iter().zip(&free_params) {
                let coef = red.a[row][*f].clone();
                if !coef.is_zero() {
                    x.add_scaled(p, &(-coef));
                }
            }
            sol[col] = x;
        }
        sol
    }

    fn substitute(&mut self, p: u32, form: &Aff<F>) {
        for v in self.w.iter_mut() {
            for x in v.values_mut() {
                x.subst(p, form);
            }
            v.retain(|_, x| !x.is_zero());
        }
        self.alpha.subst(p, form);
        for b in self.betas.iter_mut() {
            b.subst(p, form);
        }
    }

    fn eliminate(&mut self, mut cons: Vec<Aff<F>>, level: u32) -> Result<(), IrregularError> {
        loop {
            cons.retain(|x| !x.is_zero());
            let Some(pos) = cons.iter().position(|x| !x.is_const()) else {
                return if cons.is_empty() { Ok(()) } else { Err(IrregularError::Inconsistent { level }) };
            };
            let e = cons.swap_remove(pos);
            let (&p, f) = e.t.iter().next().unwrap();
            let inv = f.inv().unwrap();
            let mut form = Aff::constant(-(e.c.clone() * inv.clone()));
            for (k, v) in &e.t {
                if *k != p {
                    form.t.insert(*k, -(v.clone() * inv.clone()));
                }
            }
            for c in cons.iter_mut() {
                c.subst(p, &form);
            }
            self.substitute(p, &form);
        }
    }

    fn settled(&self, upto: usize) -> bool {
        self.alpha.is_const()
            && self.betas.iter().all(|b| b.is_const())
            && self.w.iter().take(upto + 1).all(|v| v.values().all(|x| x.is_const()))
    }
}

/// Build `w_0..=w_M` for the operator `W_Λ → W_{Λ'}` with insertion weight
/// `Δ`, top exponent `β_r` and central charge `c`.
pub fn irregular_vertex<F: Field>(
    rank: i32,
    delta: &F,
    lambda: &[F],
    beta_r: &F,
    c: &F,
    order: u32,
) -> Result<IrregularVertex<F>, IrregularError> {
    if !(1..=2).contains(&rank) {
        return Err(IrregularError::UnsupportedRank(rank));
    }
    if lambda.len() != rank as usize + 1 {
        return Err(IrregularError::Domain("need Λ_r..Λ_2r"));
    }
    if lambda[rank as usize].is_zero() {
        return Err(IrregularError::Domain("Λ_2r must be nonzero"));
    }
    if beta_r.is_zero() {
        return Err(IrregularError::Domain("β_r must be nonzero"));
    }
    let mut lambda_out = lambda.to_vec();
    lambda_out[0] = lambda[0].clone() - F::from_i64(rank as i64) * beta_r.clone();
    let module = Module::new(rank, &lambda_out, c.clone());
    let mut s = Solver {
        rank,
        delta: delta.clone(),
        lambda_out: lambda_out.clone(),
        module,
        alpha: Aff::zero(),
        betas: Vec::new(),
        w: vec![[(Word::new(), Aff::constant(F::one()))].into_iter().collect()],
        next_param: 0,
        words_by_degree: Vec::new(),
    };
    s.alpha = s.new_param();
    for _ in 1..rank {
        let b = s.new_param();
        s.betas.push(b);
    }
    s.betas.push(Aff::constant(beta_r.clone()));
    let cap = order + 4 * rank as u32 + 6;
    let mut m = 1;
    loop {
        let cons = s.level(m)?;
        s.eliminate(cons, m)?;
        if m >= order && s.settled(order as usize) {
            break;
        }
        if m >= cap {
            return Err(IrregularError::Undetermined { level: m });
        }
        m += 1;
    }
    let levels = s.w[..=order as usize]
        .iter()
        .map(|v| v.iter().map(|(w, x)| (w.clone(), x.c.clone())).filter(|(_, x)| !x.is_zero()).collect())
        .collect();
    let params = IrregularParams {
        rank,
        delta: delta.clone(),
        lambda: lambda.to_vec(),
        lambda_out,
        alpha: s.alpha.c.clone(),
        betas: s.betas.iter().map(|b| b.c.clone()).collect(),
    };
    Ok(IrregularVertex { params, levels })
}

/// Exponents only (solves as many levels as needed to fix them).
pub fn irregular_vertex_params<F: Field>(
    rank: i32,
    delta: &F,
    lambda: &[F],
    beta_r: &F,
    c: &F,
) -> Result<IrregularParams<F>, IrregularError> {
    Ok(irregular_vertex(rank, delta, lambda, beta_r, c, 0)?.params)
}

/// The rank-1 closed form `α = −β_1(Λ_1 − β_1)/(2Λ_2) − 2Δ`.
pub fn rank1_alpha<F: Field>(delta: &F, l1: &F, l2: &F, b1: &F) -> F {
    -(b1.clone() * (l1.clone() - b1.clone()) * (F::from_i64(2) * l2.clone()).inv().unwrap()) - F::from_i64(2) * delta.clone()
}

/// Defect of the rank-one relation
/// `(L_n − δ_{n,1}Λ_1 − δ_{n,2}Λ_2) w_m = −β_1 w_{m+1−n} + (α + (n+1)Δ + m − n) w_{m−n}`
/// on a computed vertex (zero where the relation holds; `w_j = 0` outside
/// `0..=M`, so `m + 1 − n` must stay within the computed levels).
pub fn rank1_relation_defect<F: Field>(v: &IrregularVertex<F>, c: &F, n: i32, m: usize) -> Vector<F> {
    let p = &v.params;
    assert_eq!(p.rank, 1);
    let mut module = Module::new(1, &p.lambda_out, c.clone());
    let level = |j: i64| -> Vector<F> {
        if j < 0 {
            BTreeMap::new()
        } else {
            v.levels.get(j as usize).cloned().expect("level beyond the computed order")
        }
    };
    let wm = level(m as i64);
    let mut out = module.apply(n, &wm);
    if (1..=2).contains(&n) {
        add_scaled(&mut out, &wm, &-p.lambda[n as usize - 1].clone());
    }
    add_scaled(&mut out, &level(m as i64 + 1 - n as i64), &p.betas[0]);
    let k = p.alpha.clone() + F::from_i64(n as i64 + 1) * p.delta.clone() + F::from_i64(m as i64 - n as i64);
    add_scaled(&mut out, &level(m as i64 - n as i64), &-k);
    out
}

/// Left states the irregular image is paired with.
#[derive(Clone, Debug, PartialEq)]
pub enum Pairing<F> {
    /// `⟨Δ|` of a Verma module, against rank 1.
    DualVerma(F),
    /// `⟨0|`, against rank 2.
    Vacuum,
}

pub fn pair_out<F: Field>(kind: &Pairing<F>, rank: i32, v: &Vector<F>) -> Result<F, IrregularError> {
    match kind {
        Pairing::DualVerma(delta) => {
            if rank != 1 {
                return Err(IrregularError::RankMismatch);
            }
            // ⟨Δ|L_{-n} = 0 for n > 0 and ⟨Δ|L_0 = Δ⟨Δ|: only L_0^k survive
            let mut acc = F::zero();
            for (w, x) in v {
                if w.iter().all(|&i| i == 0) {
                    acc += &(x.clone() * delta.pow(w.len() as u32));
                }
            }
            Ok(acc)
        }
        Pairing::Vacuum => {
            if rank != 2 {
                return Err(IrregularError::RankMismatch);
            }
            Ok(v.get(&Word::new()).cloned().unwrap_or_else(F::zero))
        }
    }
}

/// `t^{texp} · exp(rate · t^{rank}) · Σ_k a_k t^{−k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IcbSeries<S> {
    pub rank: i32,
    /// Exponent of `t` in the prefactor (before any argument scaling).
    pub t_exponent: Q,
    /// Coefficient of `t^{rank}` in the exponential.
    pub rate: Q,
    pub coeffs: Vec<S>,
}

/// Irregular block at `z = 1/t` (or `z = 1/(√2 t)` when `sqrt2_scale`), for
/// rational data. With the `√2` scale the coefficients `a_k` carry
/// `2^{−k/2}`, hence `QuadExt`; the prefactor `(√2 t)^{−α}` keeps its
/// `2^{−α/2}` outside the returned data.
#[allow(clippy::too_many_arguments)]
pub fn icb_series(
    rank: i32,
    delta_out: &Q,
    delta_insert: &Q,
    lambda: &[Q],
    beta_r: &Q,
    sqrt2_scale: bool,
    order: u32,
) -> Result<IcbSeries<QuadExt>, IrregularError> {
    let v = irregular_vertex(rank, delta_insert, lambda, beta_r, &Q::ONE, order)?;
    let pairing = if rank == 1 { Pairing::DualVerma(delta_out.clone()) } else { Pairing::Vacuum };
    let raw: Vec<Q> = v.levels.iter().map(|w| pair_out(&pairing, rank, w)).collect::<Result<_, _>>()?;
    let half_root = QuadExt::new(Q::ZERO, Q::ONE / Q::from(2)); // 1/√2
    let mut scale = QuadExt::one();
    let mut coeffs = Vec::with_capacity(raw.len());
    for a in raw {
        coeffs.push(QuadExt::from_q(&a) * scale.clone());
        if sqrt2_scale {
            scale = scale * half_root.clone();
        }
    }
    // z^{-k} exponentials: β_k z^{-k} = β_k (s t)^k with s = 1 or √2; only
    // k = r is nonzero in the cases used (β_1 = 0 at rank 2 with Λ_3 = 0)
    let s2 = if sqrt2_scale { Q::from(2) } else { Q::ONE };
    let br = v.params.betas[(rank - 1) as usize].clone();
    let rate = if rank == 2 { br * s2 } else { br };
    Ok(IcbSeries { rank, t_exponent: -v.params.alpha.clone(), rate, coeffs })
}
