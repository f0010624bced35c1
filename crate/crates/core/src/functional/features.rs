//! Univariate functionals of central moments, T(F) = g(m_1, ..., m_t) with
//! m_a = E (X - c)^a for a fixed centre c.
//!
//! Fixing c turns T into a function of the means of the features y, y^2, ..., y^t
//! with y = X - c, so its von Mises derivatives come from the partials of g
//! and the joint central moments of the features. Taking c = X̄ makes m_1 = 0
//! and every feature moment a central moment of the data.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_blocks, touches_single, Functional};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::moments::MomentTable;
use crate::partition::{compositions, Partition};
use crate::scalar::Scalar;

/// g(c, m_1..m_t): the centre and the raw moments about it, as jets.
pub type FeatureMap<S> = Box<dyn Fn(&S, &[Jet<S>]) -> Result<Jet<S>> + Send + Sync>;

pub struct FunctionOfMoments<S> {
    name: String,
    dims: [usize; 1],
    features: usize,
    g: FeatureMap<S>,
}

impl<S: Scalar> FunctionOfMoments<S> {
    /// `features` is t, the highest power of the centred data g depends on.
    pub fn new(
        name: impl Into<String>,
        features: usize,
        g: impl Fn(&S, &[Jet<S>]) -> Result<Jet<S>> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), dims: [1], features: features.max(1), g: Box::new(g) }
    }

    pub fn features(&self) -> usize {
        self.features
    }

    /// (centre, m_1..m_t) at the table: m_1 = 0, m_a = μ̂_a.
    fn point(&self, table: &MomentTable<S>) -> Result<(S, Vec<S>)> {
        let c = table.mean()[0].clone();
        let m = (1..=self.features).map(|a| table.mu(a)).collect::<Result<Vec<_>>>()?;
        Ok((c, m))
    }

    fn single_table<'a>(&self, tables: &'a [MomentTable<S>]) -> Result<&'a MomentTable<S>> {
        match tables {
            [t] if t.dim() == 1 => Ok(t),
            [t] => Err(Error::Dimension(alloc::format!("{} expects univariate data, got dimension {}", self.name, t.dim()))),
            _ => Err(Error::Arity { expected: 1, got: tables.len() }),
        }
    }

    /// E Π_l (y^{a_l} - m_{a_l}) for the listed feature powers, by expanding
    /// the product over subsets: Σ_S μ_{Σ_{l∈S} a_l} Π_{l∉S} (-m_{a_l}).
    fn feature_moment(table: &MomentTable<S>, m: &[S], powers: &[usize]) -> Result<S> {
        let s = powers.len();
        let mut total = S::zero();
        for mask in 0u32..(1u32 << s) {
            let mut deg = 0;
            let mut prod = S::one();
            for (l, &a) in powers.iter().enumerate() {
                if mask & (1 << l) != 0 {
                    deg += a;
                } else {
                    prod = prod * -m[a - 1].clone();
                }
            }
            if prod.is_zero() {
                continue;
            }
            total = total + prod * table.mu(deg)?;
        }
        Ok(total)
    }

    fn contract(&self, jet: &Jet<S>, table: &MomentTable<S>, m: &[S], pi: &Partition) -> Result<S> {
        let t = self.features;
        let mut e = vec![0u32; t];
        let mut total = S::zero();
        self.walk(jet, table, m, pi.parts(), S::one(), &mut e, &mut total)?;
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        jet: &Jet<S>,
        table: &MomentTable<S>,
        m: &[S],
        blocks: &[usize],
        weight: S,
        e: &mut [u32],
        total: &mut S,
    ) -> Result<()> {
        let Some((&size, rest)) = blocks.split_first() else {
            *total = total.clone() + weight * jet.partial(e);
            return Ok(());
        };
        for c in compositions(size, self.features) {
            let mut powers = Vec::with_capacity(size);
            for (a, &k) in c.iter().enumerate() {
                powers.extend(core::iter::repeat_n(a + 1, k));
            }
            let fm = Self::feature_moment(table, m, &powers)?;
            if fm.is_zero() {
                continue;
            }
            let mut mult: i64 = (1..=size as i64).product();
            for &k in &c {
                mult /= (1..=k as i64).product::<i64>();
            }
            for (v, &k) in c.iter().enumerate() {
                e[v] += k as u32;
            }
            self.walk(jet, table, m, rest, weight.clone() * fm * S::from_i64(mult), e, total)?;
            for (v, &k) in c.iter().enumerate() {
                e[v] -= k as u32;
            }
        }
        Ok(())
    }

    fn jet_at(&self, c: &S, m: &[S], order: usize) -> Result<Jet<S>> {
        (self.g)(c, &Jet::variables(m, order))
    }
}

impl<S: Scalar> Functional<S> for FunctionOfMoments<S> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn moment_order(&self, derivative_order: usize) -> usize {
        self.features * derivative_order.max(1)
    }

    fn plug_in(&self, tables: &[MomentTable<S>]) -> Result<S> {
        let table = self.single_table(tables)?;
        let (c, m) = self.point(table)?;
        let consts: Vec<Jet<S>> = m.into_iter().map(Jet::constant).collect();
        Ok((self.g)(&c, &consts)?.value().clone())
    }

    fn t_pi(&self, blocks: &[Partition], tables: &[MomentTable<S>]) -> Result<S> {
        Ok(self.t_pi_batch(&[blocks.to_vec()], tables)?.remove(0))
    }

    fn t_pi_batch(&self, blocks: &[Vec<Partition>], tables: &[MomentTable<S>]) -> Result<Vec<S>> {
        let table = self.single_table(tables)?;
        let (c, m) = self.point(table)?;
        let order = blocks.iter().map(|b| b.iter().map(Partition::weight).sum::<usize>()).max().unwrap_or(0);
        let jet = self.jet_at(&c, &m, order)?;
        blocks
            .iter()
            .map(|b| {
                check_blocks(b, 1)?;
                if touches_single(b) {
                    return Ok(S::zero());
                }
                self.contract(&jet, table, &m, &b[0])
            })
            .collect()
    }
}
