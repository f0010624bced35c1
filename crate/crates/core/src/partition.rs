//! Integer partitions, compositions, and the coefficients c(π) that expand a
//! sum over distinct index tuples into products of power sums.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A multiset of positive parts kept in weakly decreasing order.
///
/// Ordering compares the canonical part lists lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts in any order. Zero parts are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Invalid("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// The unique partition of 0.
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts, m(π).
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    pub fn has_one(&self) -> bool {
        self.parts.last() == Some(&1)
    }

    /// `(part, multiplicity)` pairs, largest part first.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Partition with one more part (kept canonical).
    pub fn with_part(&self, part: usize) -> Self {
        let mut parts = self.parts.clone();
        let at = parts.iter().position(|&q| q < part).unwrap_or(parts.len());
        parts.insert(at, part);
        Self { parts }
    }
}

/// Compact exponent notation, e.g. `4 2^2`; the empty partition prints as `0`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("0");
        }
        for (i, (p, c)) in self.multiplicities().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if c == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{c}")?;
            }
        }
        Ok(())
    }
}

/// Parses the `Display` form (`4 2^2`) or a comma list (`4,2,2`).
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Self::empty());
        }
        let bad = || Error::Invalid(alloc::format!("cannot parse partition {s:?}"));
        let mut parts = Vec::new();
        for tok in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (p, c) = match tok.split_once('^') {
                Some((p, c)) => (p, c.parse::<usize>().map_err(|_| bad())?),
                None => (tok, 1),
            };
            let p = p.parse::<usize>().map_err(|_| bad())?;
            parts.extend(core::iter::repeat_n(p, c));
        }
        Self::new(parts)
    }
}

/// All partitions of `r`, lexicographically descending on the part lists:
/// `4`, `3 1`, `2 2`, `2 1 1`, `1 1 1 1`.
pub fn partitions(r: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill_partitions(r, r, &mut cur, &mut out);
    out
}

fn fill_partitions(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition { parts: cur.clone() });
        return;
    }
    for p in (1..=max.min(rest)).rev() {
        cur.push(p);
        fill_partitions(rest - p, p, cur, out);
        cur.pop();
    }
}

/// Partitions of `r` with no part equal to 1.
pub fn partitions_excluding_ones(r: usize) -> Vec<Partition> {
    partitions(r).into_iter().filter(|p| !p.has_one()).collect()
}

/// All tuples of `parts` nonnegative integers summing to `total`, first
/// coordinate descending: `(2,0), (1,1), (0,2)`.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0; parts];
    fill_compositions(total, 0, &mut cur, &mut out);
    out
}

fn fill_compositions(rest: usize, at: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if at + 1 == cur.len() {
        cur[at] = rest;
        out.push(cur.clone());
        return;
    }
    for v in (0..=rest).rev() {
        cur[at] = v;
        fill_compositions(rest - v, at + 1, cur, out);
    }
}

/// Vectors of `parts` nonnegative integers with sum at most `max_total`,
/// grouped by increasing total.
pub fn bounded_vectors(max_total: usize, parts: usize) -> Vec<Vec<usize>> {
    (0..=max_total).flat_map(|t| compositions(t, parts)).collect()
}

/// The integer coefficients c(π) for one order r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymCoeffTable {
    order: usize,
    entries: Vec<(Partition, BigInt)>,
}

impl SymCoeffTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Entries in the order of [`partitions`].
    pub fn entries(&self) -> &[(Partition, BigInt)] {
        &self.entries
    }

    pub fn get(&self, pi: &Partition) -> Option<&BigInt> {
        self.entries.iter().find(|(p, _)| p == pi).map(|(_, c)| c)
    }

    /// Evaluates Σ_π c(π) n^{m(π)}; equals the falling factorial (n)_r.
    pub fn eval_at(&self, n: i64) -> BigInt {
        self.entries
            .iter()
            .map(|(p, c)| c * num_traits::pow(BigInt::from(n), p.len()))
            .sum()
    }
}

/// Expands r!·e_r in power sums via Newton's identities
/// e_m = (1/m) Σ_{i=1}^{m} (-1)^{i-1} e_{m-i} p_i.
///
/// # Panics
/// If a coefficient comes out non-integral, which would be an algebra bug.
pub fn sym_coeff_table(r: usize) -> SymCoeffTable {
    let mut e: Vec<BTreeMap<Partition, BigRational>> = Vec::with_capacity(r + 1);
    let mut e0 = BTreeMap::new();
    e0.insert(Partition::empty(), BigRational::one());
    e.push(e0);
    for m in 1..=r {
        let mut em: BTreeMap<Partition, BigRational> = BTreeMap::new();
        for i in 1..=m {
            let sign = if i % 2 == 1 { BigRational::one() } else { -BigRational::one() };
            for (mono, c) in &e[m - i] {
                let slot = em.entry(mono.with_part(i)).or_insert_with(BigRational::zero);
                *slot += &sign * c;
            }
        }
        let inv_m = BigRational::new(BigInt::one(), BigInt::from(m));
        for c in em.values_mut() {
            *c *= &inv_m;
        }
        em.retain(|_, c| !c.is_zero());
        e.push(em);
    }
    let fact: BigInt = (1..=r).map(BigInt::from).product();
    let er = &e[r];
    let entries = partitions(r)
        .into_iter()
        .map(|p| {
            let c = er.get(&p).cloned().unwrap_or_else(BigRational::zero) * BigRational::from_integer(fact.clone());
            assert!(c.is_integer(), "non-integral symmetric coefficient for {p}");
            (p, c.to_integer())
        })
        .collect();
    SymCoeffTable { order: r, entries }
}

/// Renders a list of partitions, used in error messages and reports.
pub fn join_blocks(blocks: &[Partition]) -> String {
    let mut s = String::new();
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            s.push_str(" | ");
        }
        s.push_str(&alloc::format!("{b}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn parts(ps: &[Partition]) -> Vec<Vec<usize>> {
        ps.iter().map(|p| p.parts().to_vec()).collect()
    }

    #[test]
    fn partitions_of_small_orders() {
        assert_eq!(parts(&partitions(0)), vec![Vec::<usize>::new()]);
        assert_eq!(
            parts(&partitions(4)),
            vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
        );
        assert_eq!(partitions(6).len(), 11);
    }

    #[test]
    fn no_ones_counts() {
        let counts: Vec<usize> = (2..=6).map(|r| partitions_excluding_ones(r).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 2, 4]);
        assert_eq!(parts(&partitions_excluding_ones(5)), vec![vec![5], vec![3, 2]]);
    }

    #[test]
    fn compositions_order() {
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(compositions(1, 3), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert!(compositions(2, 0).is_empty());
    }

    #[test]
    fn canonical_form_and_display() {
        let p = Partition::new(vec![2, 3, 2]).unwrap();
        assert_eq!(p.parts(), &[3, 2, 2]);
        assert_eq!(p.to_string(), "3 2^2");
        assert_eq!("3 2^2".parse::<Partition>().unwrap(), p);
        assert_eq!("2,3,2".parse::<Partition>().unwrap(), p);
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(p.with_part(4).parts(), &[4, 3, 2, 2]);
        assert_eq!(p.with_part(1).parts(), &[3, 2, 2, 1]);
    }

    #[test]
    fn order_two_coefficients() {
        let t = sym_coeff_table(2);
        assert_eq!(t.get(&Partition::new(vec![2]).unwrap()), Some(&BigInt::from(-1)));
        assert_eq!(t.get(&Partition::new(vec![1, 1]).unwrap()), Some(&BigInt::from(1)));
    }

    #[test]
    fn falling_factorial_identity() {
        for r in 1..=8 {
            let t = sym_coeff_table(r);
            for n in r as i64..=r as i64 + 6 {
                let falling: BigInt = (0..r as i64).map(|i| BigInt::from(n - i)).product();
                assert_eq!(t.eval_at(n), falling, "r={r} n={n}");
            }
        }
    }
}
