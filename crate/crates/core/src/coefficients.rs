//! Exact factorial combinatorics and the transforms linking the V, S and T
//! series: c_{kjr} (powers of n in a rising-factorial basis), G_{βi} and
//! D_{αi} (the expansion of 1/(n-1)_i in powers of 1/n).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Falling factorial (m)_i = m(m-1)...(m-i+1); 1 when i = 0.
pub fn falling(m: i64, i: usize) -> BigRational {
    (0..i as i64).map(|l| int(m - l)).fold(BigRational::one(), |a, b| a * b)
}

/// Rising factorial [a]_k = a(a+1)...(a+k-1); 1 when k = 0.
pub fn rising(a: i64, k: usize) -> BigRational {
    (0..k as i64).map(|l| int(a + l)).fold(BigRational::one(), |a, b| a * b)
}

/// Monomial coefficients of [n + shift]_k as a polynomial in n, lowest degree first.
fn rising_poly(shift: i64, k: usize) -> Vec<BigRational> {
    let mut poly = vec![BigRational::one()];
    for l in 0..k as i64 {
        // multiply by (n + shift + l)
        let c = int(shift + l);
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (d, a) in poly.iter().enumerate() {
            next[d + 1] += a;
            next[d] += a * &c;
        }
        poly = next;
    }
    poly
}

/// The coefficients c_{kjr} for one r and all j up to `jmax`, defined by
/// n^j = Σ_{k=0}^{j} [n-r+1]_k c_{kjr}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CkjrTable {
    r: usize,
    rows: Vec<Vec<BigRational>>,
}

impl CkjrTable {
    /// Solves the upper-triangular change of basis from monomials to rising factorials.
    pub fn new(r: usize, jmax: usize) -> Self {
        let shift = 1 - r as i64;
        let basis: Vec<Vec<BigRational>> = (0..=jmax).map(|k| rising_poly(shift, k)).collect();
        let rows = (0..=jmax)
            .map(|j| {
                let mut c = vec![BigRational::zero(); j + 1];
                for k in (0..=j).rev() {
                    // match the degree-k coefficient; [n+shift]_k is monic of degree k
                    let mut rhs = if k == j { BigRational::one() } else { BigRational::zero() };
                    for (l, cl) in c.iter().enumerate().skip(k + 1) {
                        rhs -= cl * &basis[l][k];
                    }
                    c[k] = rhs;
                }
                c
            })
            .collect();
        Self { r, rows }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn jmax(&self) -> usize {
        self.rows.len() - 1
    }

    /// c_{kjr}; zero when k > j.
    pub fn get(&self, k: usize, j: usize) -> BigRational {
        self.rows.get(j).and_then(|row| row.get(k)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Σ_k [n-r+1]_k c_{kjr}, which must equal n^j.
    pub fn expand_at(&self, j: usize, n: i64) -> BigRational {
        let shift = 1 - self.r as i64;
        self.rows[j]
            .iter()
            .enumerate()
            .map(|(k, c)| rising(n + shift, k) * c)
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// A single c_{kjr}.
pub fn c_kjr(k: usize, j: usize, r: usize) -> BigRational {
    CkjrTable::new(r, j).get(k, j)
}

/// G_{βi} = Σ over compositions (α_1..α_i) of β of Π j^{α_j}.
///
/// Uses G_{β,i} = G_{β,i-1} + i G_{β-1,i}, i.e. splitting on whether α_i = 0.
pub fn g_beta_i(beta: usize, i: usize) -> BigRational {
    let mut row = vec![BigInt::zero(); beta + 1];
    row[0] = BigInt::one();
    for l in 1..=i {
        for b in 1..=beta {
            let prev = row[b - 1].clone();
            row[b] += prev * BigInt::from(l);
        }
    }
    if i == 0 {
        return if beta == 0 { BigRational::one() } else { BigRational::zero() };
    }
    BigRational::from_integer(row[beta].clone())
}

/// D_{αi} = G_{α-i,i}: the coefficient of n^{-α} in 1/(n-1)_i.
pub fn d_alpha_i(alpha: usize, i: usize) -> Result<BigRational> {
    if alpha < i {
        return Err(Error::Invalid(alloc::format!("D_(alpha,i) needs alpha >= i, got alpha={alpha}, i={i}")));
    }
    Ok(g_beta_i(alpha - i, i))
}
