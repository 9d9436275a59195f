//! Sparse multivariate polynomials over a coefficient [`Ring`].

use crate::ring::{Rat, Ring};
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A polynomial in `nvars` variables; keys are exponent vectors of length `nvars`.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial<S: Ring> {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, S>,
}

impl<S: Ring + Hash> Hash for Polynomial<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.nvars.hash(state);
        for (e, c) in &self.terms {
            e.hash(state);
            c.hash(state);
        }
    }
}

impl<S: Ring> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}", c)?;
            for (v, &p) in e.iter().enumerate() {
                if p > 0 {
                    write!(f, "*x{}^{}", v, p)?;
                }
            }
        }
        Ok(())
    }
}

impl<S: Ring> Polynomial<S> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, S::one())
    }

    /// The monomial `c * x_var`.
    pub fn var(nvars: usize, var: usize, c: S) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self::monomial(nvars, e, c)
    }

    pub fn monomial(nvars: usize, expo: Vec<u16>, c: S) -> Self {
        assert_eq!(expo.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(expo, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &S)> {
        self.terms.iter()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&p| p as usize).sum())
            .max()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(S::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Polynomial { nvars: self.nvars, terms }
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k.mul(c)))
                .filter(|(_, k)| !k.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Vec<u16>, S> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let c = ca.mul(cb);
                let entry = terms.entry(e).or_insert_with(S::zero);
                *entry = entry.add(&c);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Polynomial { nvars: self.nvars, terms }
    }

    /// Partial derivative with respect to `var`.
    pub fn diff(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let p = e[var];
            if p == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] = p - 1;
            let c2 = c.mul(&S::from_i64(p as i64));
            let entry = out.terms.entry(e2).or_insert_with(S::zero);
            *entry = entry.add(&c2);
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Evaluate at a point (all variables substituted).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64();
            for (v, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t *= x[v];
                }
            }
            acc += t;
        }
        acc
    }

    /// The coefficient of the lexicographically smallest monomial; `None` if zero.
    pub fn leading_coeff(&self) -> Option<&S> {
        self.terms.values().next()
    }

    pub fn map_coeffs<T: Ring>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

impl Polynomial<Rat> {
    pub fn to_f64_poly(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Exact definite integral over `var` from 0 to 1; the result no longer
    /// depends on `var` (its exponent is zeroed out).
    pub fn definite_integral_01(&self, var: usize) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let p = e2[var] as i64;
            e2[var] = 0;
            let scaled = c / crate::ring::rat(p + 1);
            out = out.add(&Polynomial { nvars: self.nvars, terms: [(e2, scaled)].into_iter().collect() });
        }
        out
    }

    /// Exact substitution of a rational value for `var`.
    pub fn substitute(&self, var: usize, value: &Rat) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let p = e2[var];
            e2[var] = 0;
            let mut coeff = c.clone();
            for _ in 0..p {
                coeff = &coeff * value;
            }
            out = out.add(&Polynomial { nvars: self.nvars, terms: [(e2, coeff)].into_iter().collect() });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn x() -> Polynomial<Rat> {
        Polynomial::var(2, 0, rat(1))
    }
    fn y() -> Polynomial<Rat> {
        Polynomial::var(2, 1, rat(1))
    }

    #[test]
    fn product_and_derivative() {
        // d/dx (x^2 y + y) = 2 x y
        let p = x().mul(&x()).mul(&y()).add(&y());
        let d = p.diff(0);
        let expect = x().mul(&y()).scale(&rat(2));
        assert_eq!(d, expect);
    }

    #[test]
    fn evaluation_matches_symbolic() {
        let p = x().mul(&y()).add(&Polynomial::constant(2, rat(3)));
        assert!((p.eval_f64(&[2.0, 5.0]) - 13.0).abs() < 1e-12);
    }

    #[test]
    fn zero_is_canonical() {
        let p = x().sub(&x());
        assert!(p.is_zero());
        assert_eq!(p, Polynomial::zero(2));
    }
}
