//! Square matrices with polynomial entries.

use crate::poly::Polynomial;
use crate::ring::{Rat, Ring};
use nalgebra::DMatrix;
use std::fmt;
use std::hash::{Hash, Hasher};

/// An `r x r` matrix of polynomials in `nvars` variables, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixPoly<S: Ring> {
    r: usize,
    nvars: usize,
    data: Vec<Polynomial<S>>,
}

impl<S: Ring + Hash> Hash for MatrixPoly<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.r.hash(state);
        self.nvars.hash(state);
        for p in &self.data {
            p.hash(state);
        }
    }
}

impl<S: Ring> fmt::Debug for MatrixPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.r {
            write!(f, "  [")?;
            for j in 0..self.r {
                write!(f, "{:?}, ", self.entry(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<S: Ring> MatrixPoly<S> {
    pub fn zero(r: usize, nvars: usize) -> Self {
        MatrixPoly { r, nvars, data: vec![Polynomial::zero(nvars); r * r] }
    }

    pub fn identity(r: usize, nvars: usize) -> Self {
        let mut m = Self::zero(r, nvars);
        for i in 0..r {
            m.data[i * r + i] = Polynomial::one(nvars);
        }
        m
    }

    pub fn from_entries(r: usize, nvars: usize, data: Vec<Polynomial<S>>) -> Self {
        assert_eq!(data.len(), r * r);
        assert!(data.iter().all(|p| p.nvars() == nvars));
        MatrixPoly { r, nvars, data }
    }

    /// Constant matrix from integer entries, row-major.
    pub fn from_i64(r: usize, nvars: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), r * r);
        MatrixPoly {
            r,
            nvars,
            data: entries
                .iter()
                .map(|&n| Polynomial::constant(nvars, S::from_i64(n)))
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.r
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial<S> {
        &self.data[i * self.r + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, p: Polynomial<S>) {
        assert_eq!(p.nvars(), self.nvars);
        self.data[i * self.r + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.r, self.nvars), (other.r, other.nvars));
        MatrixPoly {
            r: self.r,
            nvars: self.nvars,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        MatrixPoly {
            r: self.r,
            nvars: self.nvars,
            data: self.data.iter().map(|p| p.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        MatrixPoly {
            r: self.r,
            nvars: self.nvars,
            data: self.data.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.r, self.nvars), (other.r, other.nvars));
        let mut out = Self::zero(self.r, self.nvars);
        for i in 0..self.r {
            for j in 0..self.r {
                let mut acc = Polynomial::zero(self.nvars);
                for l in 0..self.r {
                    acc = acc.add(&self.entry(i, l).mul(other.entry(l, j)));
                }
                out.data[i * self.r + j] = acc;
            }
        }
        out
    }

    pub fn diff(&self, var: usize) -> Self {
        MatrixPoly {
            r: self.r,
            nvars: self.nvars,
            data: self.data.iter().map(|p| p.diff(var)).collect(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.r, self.r, |i, j| self.entry(i, j).eval_f64(x))
    }

    pub fn leading_coeff(&self) -> Option<&S> {
        self.data.iter().find_map(|p| p.leading_coeff())
    }

    pub fn map_coeffs<T: Ring>(&self, f: impl Fn(&S) -> T) -> MatrixPoly<T> {
        MatrixPoly {
            r: self.r,
            nvars: self.nvars,
            data: self.data.iter().map(|p| p.map_coeffs(&f)).collect(),
        }
    }
}

impl MatrixPoly<Rat> {
    pub fn to_f64_matrixpoly(&self) -> MatrixPoly<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn matrix_product_is_noncommutative() {
        let a = MatrixPoly::<Rat>::from_i64(2, 2, &[0, 1, -1, 0]);
        let b = MatrixPoly::<Rat>::from_i64(2, 2, &[0, 1, 1, 0]);
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert_eq!(ab, MatrixPoly::from_i64(2, 2, &[1, 0, 0, -1]));
        assert_eq!(ba, MatrixPoly::from_i64(2, 2, &[-1, 0, 0, 1]));
        assert_ne!(ab, ba);
    }

    #[test]
    fn evaluation_is_entrywise() {
        let mut m = MatrixPoly::<Rat>::zero(2, 2);
        m.set_entry(0, 1, Polynomial::var(2, 0, rat(3)));
        let v = m.eval_f64(&[2.0, 0.0]);
        assert_eq!(v[(0, 1)], 6.0);
        assert_eq!(v[(0, 0)], 0.0);
    }
}
