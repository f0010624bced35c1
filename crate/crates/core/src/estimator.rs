//! The V, S and T estimators for k samples at order p.
//!
//! All three are linear combinations of derivative contractions T̂[π_1..π_k]
//! with sample-size factors. The exact rational coefficients are generated
//! once per (kind, p, k) into a plan; estimating then costs one batch of
//! contractions plus a few multiplications per term.
//!
//! * V: Σ_{|r| ≤ 2p-2} Σ_π Π_j c(π_j)/r_j! · n_j^{m(π_j)}/(n_j)_{r_j} · T̂[π].
//! * S: Σ_{|i| ≤ p-1} Σ_π Π_j d_{i_j π_j}/(n_j - 1)_{i_j} · T̂[π].
//! * T: Σ_{|α| ≤ p-1} Π_j n_j^{-α_j} Σ_{i ≤ α} Π_j D_{α_j i_j} Σ_π Π_j d_{i_j π_j} T̂[π].
//!
//! Here d_{iπ} = c(π) c_{|π|-i-1, m(π)-1, |π|}/|π|! over partitions π without
//! unit parts, and D_{αi} is the coefficient of n^{-α} in 1/(n-1)_i.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coefficients::{d_alpha_i, CkjrTable};
use crate::error::{Error, Result};
use crate::functional::{check_tables, tables_for, Functional};
use crate::moments::{MomentTable, Sample};
use crate::partition::{bounded_vectors, partitions_excluding_ones, sym_coeff_table, Partition};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    PlugIn,
    V,
    S,
    T,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::PlugIn => "plug-in",
            EstimatorKind::V => "V",
            EstimatorKind::S => "S",
            EstimatorKind::T => "T",
        }
    }

    /// Smallest sample size the kind accepts at order p.
    pub fn min_sample_size(self, p: usize) -> usize {
        match self {
            EstimatorKind::PlugIn => 1,
            EstimatorKind::V => 2 * p - 1,
            EstimatorKind::S | EstimatorKind::T => p.max(1),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plug-in" | "plugin" | "plug_in" => Ok(EstimatorKind::PlugIn),
            "v" => Ok(EstimatorKind::V),
            "s" => Ok(EstimatorKind::S),
            "t" => Ok(EstimatorKind::T),
            _ => Err(Error::Invalid(alloc::format!("unknown estimator kind '{s}'"))),
        }
    }
}

/// d_{iπ} for one sample: S_i(F) = Σ_π d_{iπ} T[π]. For i = 0 the single
/// term is the empty partition with coefficient 1.
pub fn s_coeff_terms(i: usize) -> Vec<(Partition, BigRational)> {
    if i == 0 {
        return vec![(Partition::empty(), <BigRational as One>::one())];
    }
    let mut out = Vec::new();
    for w in (i + 1)..=(2 * i) {
        let sym = sym_coeff_table(w);
        let ck = CkjrTable::new(w, w / 2);
        let fact: BigInt = (1..=w).map(BigInt::from).product();
        for pi in partitions_excluding_ones(w) {
            let m = pi.len();
            let c = sym.get(&pi).cloned().unwrap_or_else(BigInt::zero);
            let d = BigRational::from_integer(c) * ck.get(w - i - 1, m - 1) / BigRational::from_integer(fact.clone());
            if !Zero::is_zero(&d) {
                out.push((pi, d));
            }
        }
    }
    out
}

/// Per-sample factor n^pow / (n - shift)_len.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Factor {
    pow: i32,
    shift: usize,
    len: usize,
}

impl Factor {
    fn eval<S: Scalar>(&self, n: usize) -> S {
        let mut v = S::from_usize(n).powi(self.pow);
        for l in 0..self.len {
            v = v / S::from_usize(n - self.shift - l);
        }
        v
    }
}

#[derive(Clone, Debug)]
struct Group {
    /// r, i or α depending on the kind
    key: Vec<usize>,
    order: usize,
    factors: Vec<Factor>,
}

/// One collected term of a plan, for inspection and reports.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanTerm {
    /// Order vector labelling the term: r for V, i for S, α for T.
    pub key: Vec<usize>,
    pub blocks: Vec<Partition>,
    pub coeff: BigRational,
}

/// A cached estimator plan for one (kind, p, k).
#[derive(Clone, Debug)]
pub struct Estimator<S> {
    kind: EstimatorKind,
    p: usize,
    k: usize,
    groups: Vec<Group>,
    blocks: Vec<Vec<Partition>>,
    /// (group, block, exact coefficient, coefficient in S)
    terms: Vec<(usize, usize, BigRational, S)>,
    derivative_order: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport<S> {
    pub value: S,
    pub plug_in: S,
    /// Contribution of each order level (|r|, |i| or |α|), ascending; value = plug_in + Σ.
    pub corrections: Vec<(usize, S)>,
    /// Term count under the published accounting when available, else the plan's own count.
    pub term_count: usize,
    /// Terms actually evaluated, the plug-in included.
    pub terms_evaluated: usize,
    pub kind: EstimatorKind,
    pub p: usize,
    pub sizes: Vec<usize>,
}

fn cartesian(lists: &[Vec<(Partition, BigRational)>]) -> Vec<(Vec<Partition>, BigRational)> {
    let mut out = vec![(Vec::new(), <BigRational as One>::one())];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for (blocks, c) in &out {
            for (pi, d) in list {
                let mut b = blocks.clone();
                b.push(pi.clone());
                next.push((b, c * d));
            }
        }
        out = next;
    }
    out
}

fn factorial(n: usize) -> BigRational {
    BigRational::from_integer((1..=n).map(BigInt::from).product())
}

/// Collects terms keyed by (group key, blocks), summing coefficients.
#[derive(Default)]
struct Builder {
    groups: BTreeMap<(Vec<usize>, Vec<Factor>), usize>,
    group_list: Vec<Group>,
    blocks: BTreeMap<Vec<Partition>, usize>,
    block_list: Vec<Vec<Partition>>,
    terms: BTreeMap<(usize, usize), BigRational>,
}

impl Builder {
    fn add(&mut self, key: Vec<usize>, factors: Vec<Factor>, blocks: Vec<Partition>, coeff: BigRational) {
        if Zero::is_zero(&coeff) {
            return;
        }
        let order = key.iter().sum();
        let next = self.group_list.len();
        let g = *self.groups.entry((key.clone(), factors.clone())).or_insert(next);
        if g == next {
            self.group_list.push(Group { key, order, factors });
        }
        let next = self.block_list.len();
        let b = *self.blocks.entry(blocks.clone()).or_insert(next);
        if b == next {
            self.block_list.push(blocks);
        }
        *self.terms.entry((g, b)).or_insert_with(<BigRational as Zero>::zero) += coeff;
    }
}

impl<S: Scalar> Estimator<S> {
    /// Builds the plan for `kind` at order `p` for `k` samples.
    pub fn new(kind: EstimatorKind, p: usize, k: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Invalid("order p must be at least 1".into()));
        }
        if k == 0 {
            return Err(Error::Invalid("at least one sample is required".into()));
        }
        let mut b = Builder::default();
        match kind {
            EstimatorKind::PlugIn => {}
            EstimatorKind::V => Self::plan_v(&mut b, p, k),
            EstimatorKind::S => Self::plan_s(&mut b, p, k),
            EstimatorKind::T => Self::plan_t(&mut b, p, k)?,
        }
        let mut derivative_order = 0;
        let mut terms = Vec::with_capacity(b.terms.len());
        for ((g, blk), c) in b.terms {
            if Zero::is_zero(&c) {
                continue;
            }
            let w: usize = b.block_list[blk].iter().map(Partition::weight).sum();
            derivative_order = derivative_order.max(w);
            let s = S::from_ratio(&c);
            terms.push((g, blk, c, s));
        }
        Ok(Self { kind, p, k, groups: b.group_list, blocks: b.block_list, terms, derivative_order })
    }

    fn plan_v(b: &mut Builder, p: usize, k: usize) {
        let tables: Vec<_> = (0..=2 * p - 2).map(sym_coeff_table).collect();
        for r in bounded_vectors(2 * p - 2, k) {
            if r.iter().sum::<usize>() == 0 {
                continue;
            }
            let lists: Vec<Vec<(Partition, BigRational)>> = r
                .iter()
                .map(|&rj| {
                    if rj == 0 {
                        return vec![(Partition::empty(), <BigRational as One>::one())];
                    }
                    partitions_excluding_ones(rj)
                        .into_iter()
                        .map(|pi| {
                            let c = tables[rj].get(&pi).cloned().unwrap_or_else(BigInt::zero);
                            (pi, BigRational::from_integer(c) / factorial(rj))
                        })
                        .collect()
                })
                .collect();
            for (blocks, coeff) in cartesian(&lists) {
                let factors = blocks
                    .iter()
                    .zip(&r)
                    .map(|(pi, &rj)| Factor { pow: pi.len() as i32, shift: 0, len: rj })
                    .collect();
                b.add(r.clone(), factors, blocks, coeff);
            }
        }
    }

    fn plan_s(b: &mut Builder, p: usize, k: usize) {
        let d: Vec<_> = (0..p).map(s_coeff_terms).collect();
        for i in bounded_vectors(p - 1, k) {
            if i.iter().sum::<usize>() == 0 {
                continue;
            }
            let lists: Vec<_> = i.iter().map(|&ij| d[ij].clone()).collect();
            let factors: Vec<Factor> = i.iter().map(|&ij| Factor { pow: 0, shift: 1, len: ij }).collect();
            for (blocks, coeff) in cartesian(&lists) {
                b.add(i.clone(), factors.clone(), blocks, coeff);
            }
        }
    }

    fn plan_t(b: &mut Builder, p: usize, k: usize) -> Result<()> {
        let d: Vec<_> = (0..p).map(s_coeff_terms).collect();
        for alpha in bounded_vectors(p - 1, k) {
            if alpha.iter().sum::<usize>() == 0 {
                continue;
            }
            let factors: Vec<Factor> = alpha.iter().map(|&a| Factor { pow: -(a as i32), shift: 0, len: 0 }).collect();
            // every i ≤ α componentwise
            let mut i = vec![0usize; k];
            loop {
                let mut dd = <BigRational as One>::one();
                for (&a, &ij) in alpha.iter().zip(&i) {
                    dd *= d_alpha_i(a, ij)?;
                }
                if !Zero::is_zero(&dd) {
                    let lists: Vec<_> = i.iter().map(|&ij| d[ij].clone()).collect();
                    for (blocks, coeff) in cartesian(&lists) {
                        b.add(alpha.clone(), factors.clone(), blocks, coeff * &dd);
                    }
                }
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    if i[pos] < alpha[pos] {
                        i[pos] += 1;
                        break;
                    }
                    i[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Highest total derivative order among the plan's contractions.
    pub fn derivative_order(&self) -> usize {
        self.derivative_order
    }

    /// Number of collected terms, the plug-in included.
    pub fn plan_len(&self) -> usize {
        self.terms.len() + 1
    }

    /// The collected terms in plan order (the plug-in term is implicit).
    pub fn terms(&self) -> Vec<PlanTerm> {
        self.terms
            .iter()
            .map(|(g, blk, c, _)| PlanTerm { key: self.groups[*g].key.clone(), blocks: self.blocks[*blk].clone(), coeff: c.clone() })
            .collect()
    }

    fn check_sizes(&self, sizes: &[usize]) -> Result<()> {
        if sizes.len() != self.k {
            return Err(Error::Arity { expected: self.k, got: sizes.len() });
        }
        let min = self.kind.min_sample_size(self.p);
        for &n in sizes {
            if n < min {
                return Err(Error::InsufficientSample { n, min });
            }
        }
        Ok(())
    }

    /// Estimates from precomputed moment tables.
    pub fn estimate<F: Functional<S> + ?Sized>(&self, f: &F, tables: &[MomentTable<S>]) -> Result<EstimateReport<S>> {
        if f.arity() != self.k {
            return Err(Error::Arity { expected: f.arity(), got: self.k });
        }
        check_tables(f, tables, self.derivative_order)?;
        let sizes: Vec<usize> = tables.iter().map(MomentTable::n).collect();
        self.check_sizes(&sizes)?;

        let plug_in = f.plug_in(tables)?;
        let t_values = if self.blocks.is_empty() { Vec::new() } else { f.t_pi_batch(&self.blocks, tables)? };
        let group_factor: Vec<S> = self
            .groups
            .iter()
            .map(|g| g.factors.iter().zip(&sizes).fold(S::one(), |a, (fac, &n)| a * fac.eval::<S>(n)))
            .collect();

        let mut levels: BTreeMap<usize, S> = BTreeMap::new();
        for (g, blk, _, c) in &self.terms {
            let t = &t_values[*blk];
            if t.is_zero() {
                continue;
            }
            let v = c.clone() * group_factor[*g].clone() * t.clone();
            let slot = levels.entry(self.groups[*g].order).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        let corrections: Vec<(usize, S)> = levels.into_iter().collect();
        let value = corrections.iter().fold(plug_in.clone(), |a, (_, c)| a + c.clone());
        let term_count = match self.kind {
            EstimatorKind::PlugIn => 1,
            kind => term_count(kind, self.p, self.k).unwrap_or(self.plan_len()),
        };
        Ok(EstimateReport {
            value,
            plug_in,
            corrections,
            term_count,
            terms_evaluated: self.plan_len(),
            kind: self.kind,
            p: self.p,
            sizes,
        })
    }

    /// Builds the moment tables the plan needs and estimates.
    pub fn estimate_samples<F: Functional<S> + ?Sized>(&self, f: &F, samples: &[Sample<S>]) -> Result<EstimateReport<S>> {
        let sizes: Vec<usize> = samples.iter().map(Sample::n).collect();
        if samples.len() == self.k {
            self.check_sizes(&sizes)?;
        }
        let tables = tables_for(f, samples, self.derivative_order)?;
        self.estimate(f, &tables)
    }
}

/// V̂_r = (n)_r^{-1} Σ_π Π_j c(π_j) T̂[π] Π_j n_j^{m(π_j)}, π_j over partitions of r_j without unit parts.
pub fn v_hat_r<S: Scalar, F: Functional<S> + ?Sized>(f: &F, tables: &[MomentTable<S>], r: &[usize]) -> Result<S> {
    if r.len() != f.arity() {
        return Err(Error::Arity { expected: f.arity(), got: r.len() });
    }
    let total: usize = r.iter().sum();
    check_tables(f, tables, total)?;
    for (t, &rj) in tables.iter().zip(r) {
        if t.n() <= rj {
            return Err(Error::InsufficientSample { n: t.n(), min: rj + 1 });
        }
    }
    let lists: Vec<Vec<(Partition, BigRational)>> = r
        .iter()
        .map(|&rj| {
            if rj == 0 {
                return vec![(Partition::empty(), <BigRational as One>::one())];
            }
            let sym = sym_coeff_table(rj);
            partitions_excluding_ones(rj)
                .into_iter()
                .map(|pi| {
                    let c = sym.get(&pi).cloned().unwrap_or_else(BigInt::zero);
                    (pi, BigRational::from_integer(c))
                })
                .collect()
        })
        .collect();
    let combos = cartesian(&lists);
    if combos.is_empty() {
        return Ok(S::zero());
    }
    let blocks: Vec<Vec<Partition>> = combos.iter().map(|(b, _)| b.clone()).collect();
    let values = f.t_pi_batch(&blocks, tables)?;
    let mut total_v = S::zero();
    for ((blocks, c), t) in combos.iter().zip(values) {
        let mut term = S::from_ratio(c) * t;
        for ((pi, &rj), tab) in blocks.iter().zip(r).zip(tables) {
            term = term * Factor { pow: pi.len() as i32, shift: 0, len: rj }.eval::<S>(tab.n());
        }
        total_v = total_v + term;
    }
    Ok(total_v)
}

/// Published term counts: k = 1 for p ≤ 7, any k for p ≤ 5, from the
/// polynomials Σ_m a_m s_m with s_m = C(k, m).
pub fn term_count(kind: EstimatorKind, p: usize, k: usize) -> Result<usize> {
    const V: [&[usize]; 5] = [&[1], &[1, 1], &[1, 4, 1], &[1, 10, 8, 1], &[1, 21, 31, 14, 1]];
    const S: [&[usize]; 5] = [&[1], &[1, 1], &[1, 3, 1], &[1, 7, 3, 1], &[1, 14, 15, 9, 1]];
    const T: [&[usize]; 5] = [&[1], &[1, 1], &[1, 4, 1], &[1, 10, 7, 1], &[1, 20, 25, 13, 1]];
    if p == 0 || k == 0 {
        return Err(Error::Invalid("p and k must be positive".into()));
    }
    let unsupported = || Err(Error::UnsupportedOrder(alloc::format!("no published {kind} term count for p = {p}, k = {k}")));
    let rows = match kind {
        EstimatorKind::PlugIn => return Ok(1),
        EstimatorKind::V => &V,
        EstimatorKind::S => &S,
        EstimatorKind::T => &T,
    };
    if k == 1 && p > 5 {
        return match (kind, p) {
            (EstimatorKind::V, 6) => Ok(42),
            (EstimatorKind::V, 7) => Ok(77),
            (EstimatorKind::S, 6) => Ok(25),
            (EstimatorKind::S, 7) => Ok(44),
            _ => unsupported(),
        };
    }
    let Some(row) = rows.get(p - 1) else { return unsupported() };
    let mut total = 0usize;
    for (m, &a) in row.iter().enumerate() {
        total += a * binomial(k, m);
    }
    Ok(total)
}

fn binomial(n: usize, m: usize) -> usize {
    if m > n {
        return 0;
    }
    (0..m).fold(1usize, |acc, l| acc * (n - l) / (l + 1))
}

/// The number of terms the generated plan actually evaluates, plug-in included.
pub fn derived_term_count(kind: EstimatorKind, p: usize, k: usize) -> Result<usize> {
    Ok(Estimator::<BigRational>::new(kind, p, k)?.plan_len())
}
