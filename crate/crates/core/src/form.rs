//! Matrix-valued polynomial differential forms on `R^dim`.
//!
//! A [`FormElement`] is a finite sum of terms `dx_I (x) M(x)` where `I` is an
//! increasing multi-index stored as a bitmask over the `dim` coordinate
//! one-forms and `M` is a square polynomial matrix.  The wedge product uses
//! the Koszul convention: coordinate one-forms anticommute, matrix
//! coefficients have degree zero and multiply in order.

use crate::matrix::MatrixPoly;
use crate::ring::{Rat, Ring};
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

/// Sign incurred when concatenating two increasing multi-indices given as
/// bitmasks; returns `None` if they share a generator.
pub fn merge_sign(a: u32, b: u32) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    // Count inversions: pairs (i in a, j in b) with i > j.
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        bb &= bb - 1;
        let above = a >> (j + 1);
        inversions += above.count_ones();
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// A matrix-valued polynomial form.
#[derive(Clone, PartialEq, Eq)]
pub struct FormElement<S: Ring> {
    dim: usize,
    r: usize,
    terms: BTreeMap<u32, MatrixPoly<S>>,
}

impl<S: Ring + Hash> Hash for FormElement<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.r.hash(state);
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl<S: Ring> fmt::Debug for FormElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mask, m) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut mm = *mask;
            while mm != 0 {
                let i = mm.trailing_zeros();
                mm &= mm - 1;
                write!(f, "dx{}^", i)?;
            }
            write!(f, "{:?}", m)?;
        }
        Ok(())
    }
}

impl<S: Ring> FormElement<S> {
    pub fn zero(dim: usize, r: usize) -> Self {
        FormElement { dim, r, terms: BTreeMap::new() }
    }

    pub fn unit(dim: usize, r: usize) -> Self {
        Self::from_term(dim, r, 0, MatrixPoly::identity(r, dim))
    }

    pub fn from_term(dim: usize, r: usize, mask: u32, coeff: MatrixPoly<S>) -> Self {
        assert!(mask < (1u32 << dim));
        assert_eq!(coeff.size(), r);
        assert_eq!(coeff.nvars(), dim);
        let mut f = Self::zero(dim, r);
        if !coeff.is_zero() {
            f.terms.insert(mask, coeff);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_size(&self) -> usize {
        self.r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &MatrixPoly<S>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&0)
                .map(|m| *m == MatrixPoly::identity(self.r, self.dim))
                .unwrap_or(false)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.r), (other.dim, other.r));
        let mut terms = self.terms.clone();
        for (mask, m) in &other.terms {
            match terms.get_mut(mask) {
                Some(t) => {
                    *t = t.add(m);
                    if t.is_zero() {
                        terms.remove(mask);
                    }
                }
                None => {
                    terms.insert(*mask, m.clone());
                }
            }
        }
        FormElement { dim: self.dim, r: self.r, terms }
    }

    pub fn neg(&self) -> Self {
        FormElement {
            dim: self.dim,
            r: self.r,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut terms = BTreeMap::new();
        for (mask, m) in &self.terms {
            let s = m.scale(c);
            if !s.is_zero() {
                terms.insert(*mask, s);
            }
        }
        FormElement { dim: self.dim, r: self.r, terms }
    }

    /// Wedge product with Koszul signs from reordering the generators.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.r), (other.dim, other.r));
        let mut out = Self::zero(self.dim, self.r);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(sign) = merge_sign(*ma, *mb) {
                    let mut c = ca.mul(cb);
                    if sign < 0 {
                        c = c.neg();
                    }
                    let mask = ma | mb;
                    match out.terms.get_mut(&mask) {
                        Some(t) => {
                            *t = t.add(&c);
                            if t.is_zero() {
                                out.terms.remove(&mask);
                            }
                        }
                        None => {
                            if !c.is_zero() {
                                out.terms.insert(mask, c);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Exterior derivative `d(dx_I (x) M) = sum_a dx_a ^ dx_I (x) dM/dx_a`.
    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(self.dim, self.r);
        for (mask, m) in &self.terms {
            for a in 0..self.dim {
                if mask & (1 << a) != 0 {
                    continue;
                }
                let dm = m.diff(a);
                if dm.is_zero() {
                    continue;
                }
                let sign = merge_sign(1 << a, *mask).expect("disjoint by construction");
                let c = if sign < 0 { dm.neg() } else { dm };
                let new_mask = mask | (1 << a);
                match out.terms.get_mut(&new_mask) {
                    Some(t) => {
                        *t = t.add(&c);
                        if t.is_zero() {
                            out.terms.remove(&new_mask);
                        }
                    }
                    None => {
                        out.terms.insert(new_mask, c);
                    }
                }
            }
        }
        out
    }

    /// Decompose into homogeneous form-degree pieces `(degree, piece)`.
    pub fn homogeneous_parts(&self) -> Vec<(usize, Self)> {
        let mut by_deg: BTreeMap<usize, Self> = BTreeMap::new();
        for (mask, m) in &self.terms {
            let d = mask.count_ones() as usize;
            let entry = by_deg
                .entry(d)
                .or_insert_with(|| Self::zero(self.dim, self.r));
            entry.terms.insert(*mask, m.clone());
        }
        by_deg.into_iter().collect()
    }

    /// Form degree if homogeneous (zero reports `None`).
    pub fn degree(&self) -> Option<usize> {
        let parts = self.homogeneous_parts();
        if parts.len() == 1 {
            Some(parts[0].0)
        } else {
            None
        }
    }

    /// Graded commutator `[a, b] = a^b - (-1)^{|a||b|} b^a`, expanded over
    /// homogeneous pieces.
    pub fn graded_commutator(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim, self.r);
        for (da, pa) in self.homogeneous_parts() {
            for (db, pb) in other.homogeneous_parts() {
                let ab = pa.wedge(&pb);
                let ba = pb.wedge(&pa);
                let signed_ba = if (da * db) % 2 == 0 { ba } else { ba.neg() };
                out = out.add(&ab.sub(&signed_ba));
            }
        }
        out
    }

    pub fn leading_coeff(&self) -> Option<&S> {
        self.terms.values().find_map(|m| m.leading_coeff())
    }

    pub fn map_coeffs<T: Ring>(&self, f: impl Fn(&S) -> T + Copy) -> FormElement<T> {
        let mut terms = BTreeMap::new();
        for (mask, m) in &self.terms {
            let mm = m.map_coeffs(f);
            if !mm.is_zero() {
                terms.insert(*mask, mm);
            }
        }
        FormElement { dim: self.dim, r: self.r, terms }
    }
}

impl FormElement<Rat> {
    pub fn to_f64_form(&self) -> FormElement<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::ring::rat;

    fn dx(dim: usize) -> FormElement<Rat> {
        FormElement::from_term(dim, 1, 1 << 0, MatrixPoly::identity(1, dim))
    }
    fn dy(dim: usize) -> FormElement<Rat> {
        FormElement::from_term(dim, 1, 1 << 1, MatrixPoly::identity(1, dim))
    }
    fn fx(dim: usize, var: usize) -> FormElement<Rat> {
        // the scalar function x_var as a 0-form
        FormElement::from_term(
            dim,
            1,
            0,
            MatrixPoly::from_entries(1, dim, vec![Polynomial::var(dim, var, rat(1))]),
        )
    }

    #[test]
    fn one_forms_anticommute() {
        let a = dx(2);
        let b = dy(2);
        assert_eq!(a.wedge(&b), b.wedge(&a).neg());
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn d_squared_is_zero() {
        // omega = x*y^2 dx + x^3 dy on R^2
        let omega = fx(2, 0)
            .wedge(&fx(2, 1))
            .wedge(&fx(2, 1))
            .wedge(&dx(2))
            .add(&fx(2, 0).wedge(&fx(2, 0)).wedge(&fx(2, 0)).wedge(&dy(2)));
        let d = omega.exterior_derivative();
        assert!(d.exterior_derivative().is_zero());
        // d(x y^2 dx) = 2xy dy^dx = -2xy dx^dy ; d(x^3 dy) = 3x^2 dx^dy
        let coeff = d.terms.get(&0b11).unwrap();
        let expect = Polynomial::monomial(2, vec![1, 1], rat(-2))
            .add(&Polynomial::monomial(2, vec![2, 0], rat(3)));
        assert_eq!(*coeff.entry(0, 0), expect);
    }

    #[test]
    fn leibniz_for_exterior_derivative() {
        let a = fx(2, 0).wedge(&dx(2)); // x dx, degree 1
        let b = fx(2, 1).wedge(&fx(2, 1)); // y^2, degree 0
        let lhs = a.wedge(&b).exterior_derivative();
        let rhs = a
            .exterior_derivative()
            .wedge(&b)
            .add(&a.wedge(&b.exterior_derivative()).neg());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_of_even_forms_with_matrix_coefficients() {
        let m1 = FormElement::<Rat>::from_term(2, 2, 0, MatrixPoly::from_i64(2, 2, &[0, 1, 0, 0]));
        let m2 = FormElement::<Rat>::from_term(2, 2, 0, MatrixPoly::from_i64(2, 2, &[0, 0, 1, 0]));
        let c = m1.graded_commutator(&m2);
        let expect =
            FormElement::from_term(2, 2, 0, MatrixPoly::from_i64(2, 2, &[1, 0, 0, -1]));
        assert_eq!(c, expect);
    }
}
