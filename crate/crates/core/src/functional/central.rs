//! The r-th central moment μ_r as a functional, with closed-form T[π].
//!
//! Its p-th von Mises derivative, with h_i = x_i - μ, is
//!
//! T_F(x_1..x_p) = (-1)^p { (r)_p μ_{r-p} Π h_i
//!     - (r)_{p-1} Σ_i [h_i^{r-p+1} - μ_{r-p+1}] Π_{j≠i} h_j }.
//!
//! Repeating arguments according to π and integrating gives
//!
//! T[π] = (-1)^p { (r)_p μ_{r-p} Π_l μ_{π_l}
//!     - (r)_{p-1} Σ_l π_l [μ_{r-p+π_l} - μ_{r-p+1} μ_{π_l-1}] Π_{l'≠l} μ_{π_l'} }
//!
//! with p = |π|, μ_0 = 1 and μ_1 = 0.

use alloc::vec::Vec;

use super::{check_blocks, touches_single, Functional};
use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::partition::Partition;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct CentralMoment {
    r: usize,
}

impl CentralMoment {
    pub fn new(r: usize) -> Self {
        Self { r }
    }

    pub fn r(&self) -> usize {
        self.r
    }
}

fn falling_i64(m: i64, i: usize) -> i64 {
    (0..i as i64).map(|l| m - l).product()
}

fn table_of<S: Scalar>(tables: &[MomentTable<S>]) -> Result<&MomentTable<S>> {
    match tables {
        [t] if t.dim() == 1 => Ok(t),
        [t] => Err(Error::Dimension(alloc::format!("central moments need univariate data, got dimension {}", t.dim()))),
        _ => Err(Error::Arity { expected: 1, got: tables.len() }),
    }
}

impl<S: Scalar> Functional<S> for CentralMoment {
    fn name(&self) -> &str {
        "central-moment"
    }

    fn dims(&self) -> &[usize] {
        &[1]
    }

    fn moment_order(&self, derivative_order: usize) -> usize {
        self.r.max(derivative_order).max(1)
    }

    fn plug_in(&self, tables: &[MomentTable<S>]) -> Result<S> {
        table_of(tables)?.mu(self.r)
    }

    fn t_pi(&self, blocks: &[Partition], tables: &[MomentTable<S>]) -> Result<S> {
        check_blocks(blocks, 1)?;
        let t = table_of(tables)?;
        if touches_single(blocks) {
            return Ok(S::zero());
        }
        let pi = &blocks[0];
        let p = pi.weight();
        if p == 0 {
            return t.mu(self.r);
        }
        let r = self.r as i64;
        let mu = |k: i64| -> Result<S> {
            if k < 0 {
                // only reached with a vanishing falling-factorial prefactor
                Ok(S::zero())
            } else {
                t.mu(k as usize)
            }
        };
        let parts: Vec<i64> = pi.parts().iter().map(|&x| x as i64).collect();
        let moms = parts.iter().map(|&x| mu(x)).collect::<Result<Vec<S>>>()?;
        let prod_except = |skip: usize| moms.iter().enumerate().filter(|(l, _)| *l != skip).fold(S::one(), |a, (_, m)| a * m.clone());

        let p_i = p as i64;
        let mut total = S::zero();
        let lead = falling_i64(r, p);
        if lead != 0 {
            let all = moms.iter().cloned().fold(S::one(), |a, b| a * b);
            total = S::from_i64(lead) * mu(r - p_i)? * all;
        }
        let second = falling_i64(r, p - 1);
        if second != 0 {
            let mut sum = S::zero();
            for (l, &pl) in parts.iter().enumerate() {
                let bracket = mu(r - p_i + pl)? - mu(r - p_i + 1)? * mu(pl - 1)?;
                sum = sum + S::from_i64(pl) * bracket * prod_except(l);
            }
            total = total - S::from_i64(second) * sum;
        }
        Ok(if p % 2 == 1 { -total } else { total })
    }
}
