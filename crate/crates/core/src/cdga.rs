//! Curved differential graded algebras.
//!
//! A curved DGA is a triple `(A, nabla, R)`: an N-graded unital algebra, a
//! degree +1 derivation `nabla`, and a curvature element `R` of degree 2 with
//! `nabla^2 = [R, -]` and `nabla R = 0`.  Two concrete instances are
//! provided: matrix-valued polynomial forms with a connection (`d + [A, -]`),
//! and the tensor algebra `(T(V), [v, -], v (x) v)` for a degree-1 vector `v`.

use crate::form::FormElement;
use crate::matrix::MatrixPoly;
use crate::poly::Polynomial;
use crate::ring::{rat, Rat};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

/// Interface shared by all curved DGA instances.
pub trait CurvedDga {
    type Elem: Clone + PartialEq + Eq + Hash + Debug;

    fn zero(&self) -> Self::Elem;
    fn unit(&self) -> Self::Elem;
    fn is_zero(&self, e: &Self::Elem) -> bool;
    fn is_unit(&self, e: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Rat, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn nabla(&self, a: &Self::Elem) -> Self::Elem;
    fn curvature(&self) -> Self::Elem;
    /// Decomposition into homogeneous pieces `(degree, piece)`.
    fn homogeneous_parts(&self, a: &Self::Elem) -> Vec<(usize, Self::Elem)>;
    /// Coefficient of the canonically-first term (used to normalize scalars
    /// out of monomial entries); `None` for zero.
    fn leading_coeff(&self, a: &Self::Elem) -> Option<Rat>;
    fn is_commutative(&self) -> bool;
    /// Decomposition into scalar multiples of pure basis elements.  Each
    /// returned element is a single monic basis monomial, and the basis must
    /// be multiplicatively closed up to scalars (the product of two pure
    /// elements is a scalar multiple of a pure element or zero), so tensor
    /// slots expanded through this map stay pure under merging.
    fn basis_components(&self, a: &Self::Elem) -> Vec<(Rat, Self::Elem)>;
    /// Draw a small random homogeneous element of the given degree
    /// (zero is allowed when the degree is not populated).
    fn random_homogeneous(&self, deg: usize, rng: &mut ChaCha8Rng) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn degree(&self, a: &Self::Elem) -> Option<usize> {
        let parts = self.homogeneous_parts(a);
        if parts.len() == 1 {
            Some(parts[0].0)
        } else {
            None
        }
    }
}

/// Graded commutator `[a, b]` expanded over homogeneous pieces.
pub fn graded_commutator_in<C: CurvedDga>(c: &C, a: &C::Elem, b: &C::Elem) -> C::Elem {
    let mut out = c.zero();
    for (da, pa) in c.homogeneous_parts(a) {
        for (db, pb) in c.homogeneous_parts(b) {
            let ab = c.mul(&pa, &pb);
            let ba = c.mul(&pb, &pa);
            let term = if (da * db) % 2 == 0 {
                c.sub(&ab, &ba)
            } else {
                c.add(&ab, &ba)
            };
            out = out.add_in(c, &term);
        }
    }
    out
}

trait AddIn<C: CurvedDga> {
    fn add_in(self, c: &C, other: &C::Elem) -> C::Elem;
}
impl<C: CurvedDga> AddIn<C> for C::Elem {
    fn add_in(self, c: &C, other: &C::Elem) -> C::Elem {
        c.add(&self, other)
    }
}

// ---------------------------------------------------------------------------
// Matrix-valued polynomial forms with connection `d + [A, -]`.
// ---------------------------------------------------------------------------

/// Forms on `R^dim` valued in `r x r` matrices, with `nabla = d + [A, -]`
/// and curvature `R = dA + A ^ A`.
#[derive(Clone, Debug)]
pub struct MatrixFormCdga {
    dim: usize,
    r: usize,
    conn: FormElement<Rat>,
    curv: FormElement<Rat>,
}

impl MatrixFormCdga {
    pub fn new(dim: usize, r: usize, conn: FormElement<Rat>) -> Self {
        assert_eq!(conn.dim(), dim);
        assert_eq!(conn.matrix_size(), r);
        assert!(conn.is_zero() || conn.degree() == Some(1), "connection must be a one-form");
        let curv = conn.exterior_derivative().add(&conn.wedge(&conn));
        MatrixFormCdga { dim, r, conn, curv }
    }

    /// Flat scalar-valued forms (commutative, zero curvature).
    pub fn scalar_flat(dim: usize) -> Self {
        Self::new(dim, 1, FormElement::zero(dim, 1))
    }

    pub fn connection(&self) -> &FormElement<Rat> {
        &self.conn
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_size(&self) -> usize {
        self.r
    }
}

/// The running 2x2 example on `R^2`:
/// `A = [[0,1],[-1,0]] dx + [[0,1],[1,0]] dy`, so `R = A^A = 2 diag(1,-1) dx^dy`.
pub fn make_matrix_form_cdga() -> MatrixFormCdga {
    let dim = 2;
    let r = 2;
    let ax = FormElement::from_term(dim, r, 0b01, MatrixPoly::from_i64(r, dim, &[0, 1, -1, 0]));
    let ay = FormElement::from_term(dim, r, 0b10, MatrixPoly::from_i64(r, dim, &[0, 1, 1, 0]));
    MatrixFormCdga::new(dim, r, ax.add(&ay))
}

impl CurvedDga for MatrixFormCdga {
    type Elem = FormElement<Rat>;

    fn zero(&self) -> Self::Elem {
        FormElement::zero(self.dim, self.r)
    }
    fn unit(&self) -> Self::Elem {
        FormElement::unit(self.dim, self.r)
    }
    fn is_zero(&self, e: &Self::Elem) -> bool {
        e.is_zero()
    }
    fn is_unit(&self, e: &Self::Elem) -> bool {
        e.is_unit()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.add(b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.neg()
    }
    fn scale(&self, c: &Rat, a: &Self::Elem) -> Self::Elem {
        a.scale(c)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.wedge(b)
    }
    fn nabla(&self, a: &Self::Elem) -> Self::Elem {
        a.exterior_derivative().add(&self.conn.graded_commutator(a))
    }
    fn curvature(&self) -> Self::Elem {
        self.curv.clone()
    }
    fn homogeneous_parts(&self, a: &Self::Elem) -> Vec<(usize, Self::Elem)> {
        a.homogeneous_parts()
    }
    fn leading_coeff(&self, a: &Self::Elem) -> Option<Rat> {
        a.leading_coeff().cloned()
    }
    fn is_commutative(&self) -> bool {
        self.r == 1
    }
    fn basis_components(&self, a: &Self::Elem) -> Vec<(Rat, Self::Elem)> {
        // The matrix part is decomposed over a basis that contains the
        // identity and is closed under products up to scalars, so the unit
        // stays atomic and merged entries stay pure.  For r = 2 this is the
        // Pauli-type basis {I, X, Y, XY} with X = [[0,1],[1,0]] and
        // Y = [[1,0],[0,-1]]; for r = 1 it is just {1}.
        assert!(self.r <= 2, "basis_components needs a projective matrix basis");
        let half = crate::ring::ratio(1, 2);
        let mut out = Vec::new();
        for (mask, m) in a.terms() {
            let mut by_expo: BTreeMap<Vec<u16>, Vec<Rat>> = BTreeMap::new();
            for i in 0..self.r {
                for j in 0..self.r {
                    for (expo, coeff) in m.entry(i, j).terms() {
                        by_expo
                            .entry(expo.clone())
                            .or_insert_with(|| vec![rat(0); self.r * self.r])[i * self.r + j] =
                            coeff.clone();
                    }
                }
            }
            for (expo, e) in by_expo {
                let comps: Vec<(Rat, Vec<i64>)> = if self.r == 1 {
                    vec![(e[0].clone(), vec![1])]
                } else {
                    vec![
                        (&(&e[0] + &e[3]) * &half, vec![1, 0, 0, 1]),
                        (&(&e[1] + &e[2]) * &half, vec![0, 1, 1, 0]),
                        (&(&e[0] - &e[3]) * &half, vec![1, 0, 0, -1]),
                        (&(&e[1] - &e[2]) * &half, vec![0, 1, -1, 0]),
                    ]
                };
                for (co, pat) in comps {
                    if Zero::is_zero(&co) {
                        continue;
                    }
                    let xa = Polynomial::monomial(self.dim, expo.clone(), rat(1));
                    let mut mat = MatrixPoly::zero(self.r, self.dim);
                    for i in 0..self.r {
                        for j in 0..self.r {
                            if pat[i * self.r + j] != 0 {
                                mat.set_entry(i, j, xa.scale(&rat(pat[i * self.r + j])));
                            }
                        }
                    }
                    out.push((co, FormElement::from_term(self.dim, self.r, *mask, mat)));
                }
            }
        }
        out
    }
    fn random_homogeneous(&self, deg: usize, rng: &mut ChaCha8Rng) -> Self::Elem {
        if deg > self.dim {
            return self.zero();
        }
        // A sparse combination of one or two basis terms with small entries.
        let masks: Vec<u32> = (0..(1u32 << self.dim))
            .filter(|m| m.count_ones() as usize == deg)
            .collect();
        let mut out = self.zero();
        let nterms = rng.gen_range(1..=2);
        for _ in 0..nterms {
            let mask = masks[rng.gen_range(0..masks.len())];
            let mut m = MatrixPoly::zero(self.r, self.dim);
            let i = rng.gen_range(0..self.r);
            let j = rng.gen_range(0..self.r);
            let c = rat(*[-2i64, -1, 1, 2, 3].get(rng.gen_range(0..5)).unwrap());
            let pdeg = rng.gen_range(0..=1);
            let poly = if pdeg == 0 {
                Polynomial::constant(self.dim, c)
            } else {
                Polynomial::var(self.dim, rng.gen_range(0..self.dim), c)
            };
            m.set_entry(i, j, poly);
            out = out.add(&FormElement::from_term(self.dim, self.r, mask, m));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Tensor algebra `(T(V), [v, -], v (x) v)`.
// ---------------------------------------------------------------------------

/// An element of the tensor algebra on basis `e_0 .. e_{dim-1}` (all of
/// degree 1): a linear combination of words.
pub type TensorElement = BTreeMap<Vec<u8>, Rat>;

fn tensor_prune(e: &mut TensorElement) {
    e.retain(|_, c| !Zero::is_zero(c));
}

/// Tensor algebra on a degree-1 vector space, with differential `[v, -]`
/// and curvature `v (x) v`; `v = None` gives the flat variant `(T(V), 0, 0)`.
#[derive(Clone, Debug)]
pub struct TensorCdga {
    dim: usize,
    v: Option<Vec<Rat>>,
}

impl TensorCdga {
    pub fn flat(dim: usize) -> Self {
        TensorCdga { dim, v: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_word(&self, word: &[u8]) -> TensorElement {
        assert!(word.iter().all(|&i| (i as usize) < self.dim));
        let mut e = TensorElement::new();
        e.insert(word.to_vec(), rat(1));
        e
    }

    /// The degree-1 element `sum_i c_i e_i`.
    pub fn vector(&self, coeffs: &[Rat]) -> TensorElement {
        assert_eq!(coeffs.len(), self.dim);
        let mut e = TensorElement::new();
        for (i, c) in coeffs.iter().enumerate() {
            if !Zero::is_zero(c) {
                e.insert(vec![i as u8], c.clone());
            }
        }
        e
    }

    fn v_elem(&self) -> TensorElement {
        match &self.v {
            Some(v) => self.vector(v),
            None => TensorElement::new(),
        }
    }
}

/// `(T(V), [v, -], v (x) v)` with `dim V = dim` and the given degree-1 `v`.
pub fn make_tensor_algebra_cdga(dim: usize, v: Vec<Rat>) -> TensorCdga {
    assert_eq!(v.len(), dim);
    TensorCdga { dim, v: Some(v) }
}

impl CurvedDga for TensorCdga {
    type Elem = TensorElement;

    fn zero(&self) -> Self::Elem {
        TensorElement::new()
    }
    fn unit(&self) -> Self::Elem {
        let mut e = TensorElement::new();
        e.insert(vec![], rat(1));
        e
    }
    fn is_zero(&self, e: &Self::Elem) -> bool {
        e.is_empty()
    }
    fn is_unit(&self, e: &Self::Elem) -> bool {
        e.len() == 1 && e.get(&vec![]).map(|c| One::is_one(c)).unwrap_or(false)
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = a.clone();
        for (w, c) in b {
            let entry = out.entry(w.clone()).or_insert_with(|| rat(0));
            *entry += c;
        }
        tensor_prune(&mut out);
        out
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|(w, c)| (w.clone(), -c)).collect()
    }
    fn scale(&self, c: &Rat, a: &Self::Elem) -> Self::Elem {
        if Zero::is_zero(c) {
            return TensorElement::new();
        }
        a.iter().map(|(w, k)| (w.clone(), k * c)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = TensorElement::new();
        for (wa, ca) in a {
            for (wb, cb) in b {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                let entry = out.entry(w).or_insert_with(|| rat(0));
                *entry += ca * cb;
            }
        }
        tensor_prune(&mut out);
        out
    }
    fn nabla(&self, a: &Self::Elem) -> Self::Elem {
        if self.v.is_none() {
            return TensorElement::new();
        }
        graded_commutator_in(self, &self.v_elem(), a)
    }
    fn curvature(&self) -> Self::Elem {
        let v = self.v_elem();
        self.mul(&v, &v)
    }
    fn homogeneous_parts(&self, a: &Self::Elem) -> Vec<(usize, Self::Elem)> {
        let mut by_deg: BTreeMap<usize, TensorElement> = BTreeMap::new();
        for (w, c) in a {
            by_deg.entry(w.len()).or_default().insert(w.clone(), c.clone());
        }
        by_deg.into_iter().collect()
    }
    fn leading_coeff(&self, a: &Self::Elem) -> Option<Rat> {
        a.values().next().cloned()
    }
    fn is_commutative(&self) -> bool {
        false
    }
    fn basis_components(&self, a: &Self::Elem) -> Vec<(Rat, Self::Elem)> {
        a.iter()
            .map(|(word, coeff)| (coeff.clone(), self.basis_word(word)))
            .collect()
    }
    fn random_homogeneous(&self, deg: usize, rng: &mut ChaCha8Rng) -> Self::Elem {
        let mut out = TensorElement::new();
        let nterms = rng.gen_range(1..=2);
        for _ in 0..nterms {
            let word: Vec<u8> = (0..deg).map(|_| rng.gen_range(0..self.dim) as u8).collect();
            let c = rat(*[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
            let entry = out.entry(word).or_insert_with(|| rat(0));
            *entry += c;
        }
        tensor_prune(&mut out);
        out
    }
}

// ---------------------------------------------------------------------------
// Axiom and morphism checking.
// ---------------------------------------------------------------------------

/// Outcome of checking the curved DGA axioms on random samples.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub associative: bool,
    pub unital: bool,
    pub leibniz: bool,
    pub nabla_squared_is_curvature_bracket: bool,
    pub bianchi: bool,
    pub samples: usize,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.associative
            && self.unital
            && self.leibniz
            && self.nabla_squared_is_curvature_bracket
            && self.bianchi
    }
}

/// Check the axioms of Definition-style curved DGA data on seeded random
/// homogeneous elements of degree up to `max_deg`.
pub fn check_curved_dga_axioms<C: CurvedDga>(
    c: &C,
    max_deg: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> AxiomReport {
    let mut report = AxiomReport {
        associative: true,
        unital: true,
        leibniz: true,
        nabla_squared_is_curvature_bracket: true,
        bianchi: c.is_zero(&c.nabla(&c.curvature())),
        samples: trials,
    };
    for _ in 0..trials {
        let da = rng.gen_range(0..=max_deg);
        let db = rng.gen_range(0..=max_deg);
        let dc = rng.gen_range(0..=max_deg);
        let a = c.random_homogeneous(da, rng);
        let b = c.random_homogeneous(db, rng);
        let cc = c.random_homogeneous(dc, rng);

        let assoc = c.sub(&c.mul(&c.mul(&a, &b), &cc), &c.mul(&a, &c.mul(&b, &cc)));
        report.associative &= c.is_zero(&assoc);

        let unital = c.sub(&c.mul(&c.unit(), &a), &a);
        let unital2 = c.sub(&c.mul(&a, &c.unit()), &a);
        report.unital &= c.is_zero(&unital) && c.is_zero(&unital2);

        // nabla(ab) = (nabla a) b + (-1)^{|a|} a (nabla b)
        let lhs = c.nabla(&c.mul(&a, &b));
        let sign = if da % 2 == 0 { rat(1) } else { rat(-1) };
        let rhs = c.add(
            &c.mul(&c.nabla(&a), &b),
            &c.scale(&sign, &c.mul(&a, &c.nabla(&b))),
        );
        report.leibniz &= c.is_zero(&c.sub(&lhs, &rhs));

        // nabla^2 a = [R, a]
        let n2 = c.nabla(&c.nabla(&a));
        let br = graded_commutator_in(c, &c.curvature(), &a);
        report.nabla_squared_is_curvature_bracket &= c.is_zero(&c.sub(&n2, &br));
    }
    report
}

/// A morphism candidate between curved DGAs, given by its action on
/// elements, together with sampling data for verification.
pub struct DgaMorphismWitness<'a, A: CurvedDga, B: CurvedDga> {
    pub name: String,
    pub map: Box<dyn Fn(&A::Elem) -> B::Elem + 'a>,
}

/// Outcome of checking a morphism witness on random samples.
#[derive(Clone, Debug)]
pub struct MorphismReport {
    pub additive: bool,
    pub multiplicative: bool,
    pub unital: bool,
    pub degree_preserving: bool,
    pub intertwines_nabla: bool,
    pub maps_curvature: bool,
}

impl MorphismReport {
    pub fn all_hold(&self) -> bool {
        self.additive
            && self.multiplicative
            && self.unital
            && self.degree_preserving
            && self.intertwines_nabla
            && self.maps_curvature
    }
}

pub fn check_morphism<A: CurvedDga, B: CurvedDga>(
    a: &A,
    b: &B,
    w: &DgaMorphismWitness<'_, A, B>,
    max_deg: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> MorphismReport {
    let f = &w.map;
    let mut rep = MorphismReport {
        additive: true,
        multiplicative: true,
        unital: b.is_zero(&b.sub(&f(&a.unit()), &b.unit())),
        degree_preserving: true,
        intertwines_nabla: true,
        maps_curvature: b.is_zero(&b.sub(&f(&a.curvature()), &b.curvature())),
    };
    for _ in 0..trials {
        let dx = rng.gen_range(0..=max_deg);
        let dy = rng.gen_range(0..=max_deg);
        let x = a.random_homogeneous(dx, rng);
        let y = a.random_homogeneous(dy, rng);

        let fxy = f(&a.mul(&x, &y));
        rep.multiplicative &= b.is_zero(&b.sub(&fxy, &b.mul(&f(&x), &f(&y))));

        let fsum = f(&a.add(&x, &y));
        rep.additive &= b.is_zero(&b.sub(&fsum, &b.add(&f(&x), &f(&y))));

        let fx = f(&x);
        if !b.is_zero(&fx) {
            rep.degree_preserving &= b.degree(&fx) == Some(dx) || a.is_zero(&x);
        }

        rep.intertwines_nabla &= b.is_zero(&b.sub(&f(&a.nabla(&x)), &b.nabla(&fx)));
    }
    rep
}

/// Entry scalar normalization helper: write `e = c * m` with `m` having
/// leading coefficient 1; returns `(c, m)`; zero maps to `(0, zero)`.
pub fn extract_leading_scalar<C: CurvedDga>(c: &C, e: &C::Elem) -> (Rat, C::Elem) {
    match c.leading_coeff(e) {
        None => (rat(0), c.zero()),
        Some(lc) => {
            debug_assert!(!Zero::is_zero(&lc));
            let inv = rat(1) / lc.clone();
            (lc, c.scale(&inv, e))
        }
    }
}

/// True when `e` is a scalar multiple of the unit; returns the scalar.
pub fn as_scalar_multiple_of_unit<C: CurvedDga>(c: &C, e: &C::Elem) -> Option<Rat> {
    let (lc, monic) = extract_leading_scalar(c, e);
    if Zero::is_zero(&lc) {
        return None;
    }
    if c.is_unit(&monic) {
        Some(lc)
    } else {
        None
    }
}

/// Convenience: absolute value used for deterministic scalar checks.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}
