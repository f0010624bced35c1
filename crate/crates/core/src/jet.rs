//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A jet carries the Taylor coefficients of a function around a point up to a
//! fixed total degree. Arithmetic on jets propagates all partial derivatives
//! at once, which is how user-supplied smooth maps `g` get their derivative
//! tables. A jet without a shape is a plain constant and broadcasts.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use crate::monomial::MonomialBasis;
use crate::scalar::{binomial_ratio, Scalar};

/// Monomial layout plus the product table for one (vars, degree) pair.
#[derive(Debug, PartialEq, Eq)]
pub struct JetShape {
    basis: MonomialBasis,
    /// `(i, j, k)`: monomial i times monomial j is monomial k.
    products: Vec<(u32, u32, u32)>,
}

impl JetShape {
    pub fn new(vars: usize, degree: usize) -> Arc<Self> {
        let basis = MonomialBasis::new(vars, degree);
        let mut products = Vec::new();
        let mut sum = vec![0u32; vars];
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if basis.total_degree(i) + basis.total_degree(j) > degree {
                    continue;
                }
                for (v, s) in sum.iter_mut().enumerate() {
                    *s = basis.exponents(i)[v] + basis.exponents(j)[v];
                }
                let k = basis.rank(&sum).expect("product within degree");
                products.push((i as u32, j as u32, k as u32));
            }
        }
        Arc::new(Self { basis, products })
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn vars(&self) -> usize {
        self.basis.vars()
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }
}

#[derive(Clone, Debug)]
pub struct Jet<S> {
    shape: Option<Arc<JetShape>>,
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(v: S) -> Self {
        Self { shape: None, coeffs: vec![v] }
    }

    /// The independent variable `var` expanded around `at`.
    pub fn variable(shape: &Arc<JetShape>, var: usize, at: S) -> Self {
        let mut j = Self::constant(at).broadcast(shape);
        if shape.degree() >= 1 {
            let mut e = vec![0u32; shape.vars()];
            e[var] = 1;
            let r = shape.basis.rank(&e).expect("linear monomial");
            j.coeffs[r] = S::one();
        }
        j
    }

    /// A jet from raw Taylor coefficients in basis order.
    ///
    /// # Panics
    /// If the coefficient count does not match the shape.
    pub fn from_coeffs(shape: Arc<JetShape>, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), shape.basis.len(), "coefficient count");
        Self { shape: Some(shape), coeffs }
    }

    /// One variable per coordinate of `at`.
    pub fn variables(at: &[S], degree: usize) -> Vec<Self> {
        let shape = JetShape::new(at.len(), degree);
        at.iter().enumerate().map(|(i, a)| Self::variable(&shape, i, a.clone())).collect()
    }

    pub fn shape(&self) -> Option<&Arc<JetShape>> {
        self.shape.as_ref()
    }

    /// Value at the expansion point.
    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    /// Taylor coefficient of the monomial with exponents `e`.
    pub fn coeff(&self, e: &[u32]) -> S {
        if e.iter().all(|&x| x == 0) {
            return self.coeffs[0].clone();
        }
        match &self.shape {
            Some(sh) => sh.basis.rank(e).map(|r| self.coeffs[r].clone()).unwrap_or_else(S::zero),
            None => S::zero(),
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Partial derivative ∂^e: Taylor coefficient times Π e_v!.
    pub fn partial(&self, e: &[u32]) -> S {
        let fact: i64 = e.iter().map(|&x| (1..=x as i64).product::<i64>()).product();
        self.coeff(e) * S::from_i64(fact)
    }

    /// Partial derivative for a multiset of variable indices.
    pub fn partial_indices(&self, idx: &[usize]) -> S {
        let vars = self.shape.as_ref().map_or(0, |s| s.vars());
        let mut e = vec![0u32; vars];
        for &i in idx {
            match e.get_mut(i) {
                Some(x) => *x += 1,
                None => return S::zero(),
            }
        }
        self.partial(&e)
    }

    fn broadcast(mut self, shape: &Arc<JetShape>) -> Self {
        if self.shape.is_none() {
            let mut c = vec![S::zero(); shape.basis.len()];
            c[0] = self.coeffs.swap_remove(0);
            return Self { shape: Some(shape.clone()), coeffs: c };
        }
        self
    }

    fn unify(a: Self, b: Self) -> (Self, Self) {
        match (&a.shape, &b.shape) {
            (Some(sa), Some(sb)) => {
                assert!(Arc::ptr_eq(sa, sb) || **sa == **sb, "jets with different shapes");
                (a, b)
            }
            (Some(s), None) => {
                let s = s.clone();
                (a, b.broadcast(&s))
            }
            (None, Some(s)) => {
                let s = s.clone();
                (a.broadcast(&s), b)
            }
            (None, None) => (a, b),
        }
    }

    /// Composes a univariate function given its scaled derivatives at the
    /// current value: `taylor[k] = f^{(k)}(v)/k!`.
    pub fn compose(&self, taylor: &[S]) -> Self {
        let Some(shape) = &self.shape else {
            return Self::constant(taylor[0].clone());
        };
        let mut delta = self.clone();
        delta.coeffs[0] = S::zero();
        // Horner in delta; delta^k vanishes beyond the degree.
        let top = taylor.len().min(shape.degree() + 1);
        let mut acc = Self::constant(taylor[top - 1].clone()).broadcast(shape);
        for k in (0..top - 1).rev() {
            acc = acc * delta.clone();
            acc.coeffs[0] = acc.coeffs[0].clone() + taylor[k].clone();
        }
        acc
    }

    fn degree(&self) -> usize {
        self.shape.as_ref().map_or(0, |s| s.degree())
    }

    /// Real power via the binomial series; `None` if the base power is undefined.
    pub fn powf_jet(&self, q: f64) -> Option<Self> {
        let v = self.value().clone();
        let qr = BigRational::from_float(q)?;
        let deg = self.degree();
        let mut taylor = Vec::with_capacity(deg + 1);
        if v.is_zero() {
            // C(q, k) 0^{q-k}: zero above the exponent, one at it, undefined below
            for k in 0..=deg {
                let c = binomial_ratio(&qr, k);
                let e = q - k as f64;
                taylor.push(if Zero::is_zero(&c) || e > 0.0 {
                    S::zero()
                } else if e == 0.0 {
                    S::from_ratio(&c)
                } else {
                    return None;
                });
            }
        } else {
            let mut vpow = v.powf(q)?;
            for k in 0..=deg {
                taylor.push(S::from_ratio(&binomial_ratio(&qr, k)) * vpow.clone());
                vpow = vpow / v.clone();
            }
        }
        Some(self.compose(&taylor))
    }
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::unify(self.clone(), other.clone());
        a.coeffs == b.coeffs
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (mut a, b) = Self::unify(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x = x.clone() + y;
        }
        a
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for x in self.coeffs.iter_mut() {
            *x = -x.clone();
        }
        self
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = Self::unify(self, rhs);
        let Some(shape) = a.shape.clone() else {
            return Self::constant(a.coeffs[0].clone() * b.coeffs[0].clone());
        };
        let mut out = vec![S::zero(); a.coeffs.len()];
        for &(i, j, k) in &shape.products {
            let (i, j) = (i as usize, j as usize);
            if a.coeffs[i].is_zero() || b.coeffs[j].is_zero() {
                continue;
            }
            out[k as usize] = out[k as usize].clone() + a.coeffs[i].clone() * b.coeffs[j].clone();
        }
        Self { shape: Some(shape), coeffs: out }
    }
}

impl<S: Scalar> Div for Jet<S> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    fn zero() -> Self {
        Self::constant(S::zero())
    }
    fn one() -> Self {
        Self::constant(S::one())
    }
    fn from_i64(v: i64) -> Self {
        Self::constant(S::from_i64(v))
    }
    fn from_ratio(r: &BigRational) -> Self {
        Self::constant(S::from_ratio(r))
    }
    fn from_f64(v: f64) -> Option<Self> {
        S::from_f64(v).map(Self::constant)
    }
    fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn sqrt(&self) -> Option<Self> {
        if self.value().is_zero() && self.degree() > 0 {
            return None;
        }
        self.powf_jet(0.5)
    }
    fn powf(&self, q: f64) -> Option<Self> {
        self.powf_jet(q)
    }
    fn is_exact() -> bool {
        S::is_exact()
    }
    fn recip(&self) -> Self {
        let v = self.value().clone();
        let deg = self.degree();
        let inv = v.recip();
        let mut taylor = Vec::with_capacity(deg + 1);
        let mut t = inv.clone();
        for _ in 0..=deg {
            taylor.push(t.clone());
            t = -(t * inv.clone());
        }
        self.compose(&taylor)
    }
}
