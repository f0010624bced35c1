//! Dense indexing of monomials x^e with |e| ≤ degree, shared by moment
//! tables and Taylor jets.
//!
//! Monomials are ranked by total degree, then lexicographically descending
//! on the exponent vector, so the rank is computable without a lookup map.

use alloc::vec::Vec;

use crate::partition::compositions;

/// Number of exponent vectors of `vars` entries summing to exactly `m`.
fn count_exact(m: usize, vars: usize) -> usize {
    if vars == 0 {
        return usize::from(m == 0);
    }
    binom(m + vars - 1, vars - 1)
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    vars: usize,
    degree: usize,
    exps: Vec<Vec<u32>>,
    offsets: Vec<usize>,
    /// For rank > 0: the monomial with one fewer power of `var`.
    parent: Vec<usize>,
    var: Vec<usize>,
}

impl MonomialBasis {
    pub fn new(vars: usize, degree: usize) -> Self {
        let mut exps = Vec::new();
        let mut offsets = Vec::with_capacity(degree + 2);
        for m in 0..=degree {
            offsets.push(exps.len());
            for c in compositions(m, vars) {
                exps.push(c.into_iter().map(|e| e as u32).collect::<Vec<_>>());
            }
        }
        offsets.push(exps.len());
        let mut basis = Self { vars, degree, exps, offsets, parent: Vec::new(), var: Vec::new() };
        let mut parent = Vec::with_capacity(basis.exps.len());
        let mut var = Vec::with_capacity(basis.exps.len());
        for e in &basis.exps {
            match e.iter().rposition(|&x| x > 0) {
                Some(v) => {
                    let mut p = e.clone();
                    p[v] -= 1;
                    parent.push(basis.rank(&p).expect("parent in basis"));
                    var.push(v);
                }
                None => {
                    parent.push(0);
                    var.push(0);
                }
            }
        }
        basis.parent = parent;
        basis.var = var;
        basis
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, rank: usize) -> &[u32] {
        &self.exps[rank]
    }

    pub fn total_degree(&self, rank: usize) -> usize {
        self.exps[rank].iter().sum::<u32>() as usize
    }

    /// Ranks of all monomials of total degree `m`.
    pub fn degree_range(&self, m: usize) -> core::ops::Range<usize> {
        self.offsets[m]..self.offsets[m + 1]
    }

    pub fn parent(&self, rank: usize) -> (usize, usize) {
        (self.parent[rank], self.var[rank])
    }

    /// Rank of an exponent vector, `None` if its degree exceeds the basis.
    pub fn rank(&self, e: &[u32]) -> Option<usize> {
        debug_assert_eq!(e.len(), self.vars);
        let m = e.iter().sum::<u32>() as usize;
        if m > self.degree {
            return None;
        }
        let mut rank = self.offsets[m];
        let mut rem = m;
        for (i, &ei) in e.iter().enumerate().take(self.vars.saturating_sub(1)) {
            let ei = ei as usize;
            // vectors with a larger entry at position i come first
            for v in ei + 1..=rem {
                rank += count_exact(rem - v, self.vars - i - 1);
            }
            rem -= ei;
        }
        Some(rank)
    }

    /// Rank of the monomial with the given multiset of variable indices.
    pub fn rank_of_indices(&self, idx: &[usize]) -> Option<usize> {
        let mut e = alloc::vec![0u32; self.vars];
        for &i in idx {
            *e.get_mut(i)? += 1;
        }
        self.rank(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_is_position() {
        for vars in 0..4 {
            for degree in 0..5 {
                let b = MonomialBasis::new(vars, degree);
                for r in 0..b.len() {
                    assert_eq!(b.rank(b.exponents(r)), Some(r));
                }
                let expected: usize = (0..=degree).map(|m| count_exact(m, vars)).sum();
                assert_eq!(b.len(), expected);
            }
        }
    }

    #[test]
    fn parents_have_lower_rank() {
        let b = MonomialBasis::new(3, 4);
        for r in 1..b.len() {
            let (p, v) = b.parent(r);
            assert!(p < r);
            let mut e = b.exponents(p).to_vec();
            e[v] += 1;
            assert_eq!(e, b.exponents(r));
        }
    }

    #[test]
    fn bivariate_order() {
        let b = MonomialBasis::new(2, 2);
        let all: Vec<Vec<u32>> = (0..b.len()).map(|r| b.exponents(r).to_vec()).collect();
        assert_eq!(all, alloc::vec![
            alloc::vec![0, 0],
            alloc::vec![1, 0],
            alloc::vec![0, 1],
            alloc::vec![2, 0],
            alloc::vec![1, 1],
            alloc::vec![0, 2]
        ]);
        assert_eq!(b.rank(&[3, 0]), None);
        assert_eq!(b.rank_of_indices(&[1, 0]), Some(4));
    }
}
