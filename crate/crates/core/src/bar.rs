//! The classical two-sided bar complex of a commutative flat DGA, and the
//! column-collapse map from the zigzag complex.
//!
//! A bar monomial is `l (x) [c_1 | ... | c_n] (x) r`: a left endpoint entry,
//! `n` interior slots, and a right endpoint entry, of total degree
//! `sum of entry degrees - n`.  The differential applies `nabla` slotwise
//! (signs `(-1)^{n + prefix degree}`) and multiplies adjacent slots (face
//! `l` with sign `(-1)^{n + l}`), mirroring the zigzag conventions so the
//! collapse map is a chain map.  The shuffle product interleaves interior
//! slots and multiplies the endpoint entries.
//!
//! The collapse map `Col` multiplies each time column of a zigzag monomial
//! into a single bar slot (odd rows contribute their slot `p`, even rows
//! slot `n + 1 - p`), the left endpoint entries into `l`, and the right
//! endpoint entries into `r`, with the Koszul sign of the regrouping.  It
//! is defined for (graded-) commutative carriers and is a chain map and an
//! algebra map when the carrier is also flat.

use crate::cdga::{as_scalar_multiple_of_unit, extract_leading_scalar, CurvedDga};
use crate::ring::{rat, Rat};
use crate::shuffle::{enumerate_shuffles, koszul_sign_of_permutation};
use crate::zigzag::{mul_entries, sign_rat, ZzElement, ZzMonomial};
use num_traits::Zero;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

/// A bar monomial `l (x) [c_1 | ... | c_n] (x) r`; entries are
/// `(element, degree)` pairs.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BarMonomial<E: Clone + PartialEq + Eq + Hash + Debug> {
    pub left: (E, usize),
    pub slots: Vec<(E, usize)>,
    pub right: (E, usize),
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> BarMonomial<E> {
    pub fn n(&self) -> usize {
        self.slots.len()
    }

    /// Bar degree: sum of entry degrees minus the number of interior slots.
    pub fn degree(&self) -> isize {
        let total: isize = self.entries().map(|(_, d)| *d as isize).sum();
        total - self.n() as isize
    }

    pub fn entries(&self) -> impl Iterator<Item = &(E, usize)> {
        std::iter::once(&self.left)
            .chain(self.slots.iter())
            .chain(std::iter::once(&self.right))
    }

    /// Sum of entry degrees strictly before tensor position `pos`
    /// (position 0 is `l`, positions `1..=n` the slots, `n + 1` is `r`).
    pub fn prefix_degree(&self, pos: usize) -> usize {
        self.entries().take(pos).map(|(_, d)| *d).sum()
    }
}

/// A finite linear combination of bar monomials in normal form.
#[derive(Clone, Debug, Default)]
pub struct BarElement<E: Clone + PartialEq + Eq + Hash + Debug> {
    pub terms: HashMap<BarMonomial<E>, Rat>,
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> PartialEq for BarElement<E> {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .all(|(m, c)| other.terms.get(m).map(|c2| c == c2).unwrap_or(false))
    }
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> BarElement<E> {
    pub fn zero() -> Self {
        Self {
            terms: HashMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: BarMonomial<E>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let e = self.terms.entry(mono.clone()).or_insert_with(|| rat(0));
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BarElement {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

fn require_commutative<C: CurvedDga>(c: &C) {
    assert!(
        c.is_commutative(),
        "the bar complex is only defined over commutative carriers"
    );
}

fn require_flat<C: CurvedDga>(c: &C) {
    assert!(
        c.is_zero(&c.curvature()),
        "the bar differential is only defined over flat carriers"
    );
}

/// Normalize raw `(monomial, coefficient)` terms: entries are expanded into
/// pure basis components and scalars extracted, so keys are canonical.
pub fn bar_normalize<C: CurvedDga>(
    c: &C,
    terms: impl IntoIterator<Item = (BarMonomial<C::Elem>, Rat)>,
) -> BarElement<C::Elem> {
    let mut out = BarElement::zero();
    for (mono, coeff) in terms {
        // Multilinear expansion, slot by slot.
        let all: Vec<(C::Elem, usize)> = mono.entries().cloned().collect();
        let mut acc: Vec<(Vec<(C::Elem, usize)>, Rat)> = vec![(Vec::new(), coeff)];
        for (e, d) in all {
            if c.is_zero(&e) {
                acc.clear();
                break;
            }
            let comps: Vec<(Rat, C::Elem, usize)> =
                if let Some(s) = as_scalar_multiple_of_unit(c, &e) {
                    vec![(s, c.unit(), 0)]
                } else {
                    c.basis_components(&e)
                        .into_iter()
                        .map(|(s, pure)| {
                            let (lc, monic) = extract_leading_scalar(c, &pure);
                            (s * lc, monic, d)
                        })
                        .collect()
                };
            let mut next = Vec::with_capacity(acc.len() * comps.len().max(1));
            for (prefix, co) in &acc {
                for (s, pure, dd) in &comps {
                    let mut p = prefix.clone();
                    p.push((pure.clone(), *dd));
                    next.push((p, co * s));
                }
            }
            acc = next;
        }
        let n = mono.slots.len();
        for (entries, co) in acc {
            let mut it = entries.into_iter();
            let left = it.next().unwrap();
            let slots: Vec<_> = (&mut it).take(n).collect();
            let right = it.next().unwrap();
            out.add_term(BarMonomial { left, slots, right }, co);
        }
    }
    out
}

/// The two-sided bar differential (slotwise `nabla` plus adjacent-slot
/// multiplications); squares to zero over a flat commutative carrier.
pub fn bar_differential<C: CurvedDga>(
    c: &C,
    x: &BarElement<C::Elem>,
) -> BarElement<C::Elem> {
    require_commutative(c);
    require_flat(c);
    let mut raw = Vec::new();
    for (mono, coeff) in &x.terms {
        let n = mono.n();
        // Slotwise differential.
        let all: Vec<(C::Elem, usize)> = mono.entries().cloned().collect();
        for pos in 0..all.len() {
            let de = c.nabla(&all[pos].0);
            if c.is_zero(&de) {
                continue;
            }
            let mut entries = all.clone();
            entries[pos] = (de, all[pos].1 + 1);
            let sign = sign_rat(n + mono.prefix_degree(pos));
            raw.push((
                BarMonomial {
                    left: entries[0].clone(),
                    slots: entries[1..=n].to_vec(),
                    right: entries[n + 1].clone(),
                },
                coeff * sign,
            ));
        }
        // Face maps (none when there are no interior slots).
        for l in 0..n {
            // Merge tensor positions l and l + 1 (0 = left endpoint).
            let mut entries = all.clone();
            let merged = mul_entries(c, &[&all[l], &all[l + 1]]);
            entries[l] = merged;
            entries.remove(l + 1);
            let sign = sign_rat(n + l);
            raw.push((
                BarMonomial {
                    left: entries[0].clone(),
                    slots: entries[1..n].to_vec(),
                    right: entries[n].clone(),
                },
                coeff * sign,
            ));
        }
        if n >= 1 {
            // Final face: slot n into the right endpoint.
            let mut entries = all.clone();
            let merged = mul_entries(c, &[&all[n], &all[n + 1]]);
            entries[n] = merged;
            entries.remove(n + 1);
            let sign = sign_rat(n + n);
            raw.push((
                BarMonomial {
                    left: entries[0].clone(),
                    slots: entries[1..n].to_vec(),
                    right: entries[n].clone(),
                },
                coeff * sign,
            ));
        }
    }
    bar_normalize(c, raw)
}

/// The shuffle product on the bar complex: interior slots interleave and
/// the endpoint entries multiply.
pub fn bar_shuffle<C: CurvedDga>(
    c: &C,
    x: &BarElement<C::Elem>,
    y: &BarElement<C::Elem>,
) -> BarElement<C::Elem> {
    require_commutative(c);
    let mut raw = Vec::new();
    for (mx, cx) in &x.terms {
        for (my, cy) in &y.terms {
            let n = mx.n();
            let m = my.n();
            let sx: usize = mx.slots.iter().map(|(_, d)| *d).sum();
            let sy: usize = my.slots.iter().map(|(_, d)| *d).sum();
            let tx = mx.left.1 + mx.right.1 + sx;
            // Global sign: the zigzag-style prefactor for the interior words
            // plus plain-degree Koszul moves of y's left entry past x's slots
            // and right entry, and of x's right entry past y's slots.
            let prefactor = sign_rat(
                (tx + n) * m + my.left.1 * (mx.right.1 + sx) + mx.right.1 * sy,
            );
            let left = mul_entries(c, &[&mx.left, &my.left]);
            let right = mul_entries(c, &[&mx.right, &my.right]);
            let plain: Vec<usize> = mx
                .slots
                .iter()
                .chain(my.slots.iter())
                .map(|(_, d)| *d)
                .collect();
            for sigma in enumerate_shuffles(n, m) {
                let slots = sigma.interleave(&mx.slots, &my.slots);
                let src: Vec<usize> = (0..n + m).collect();
                let perm = sigma.interleave(&src[..n], &src[n..]);
                // Each slot crossing contributes the plain Koszul factor
                // times one suspension sign.
                let kos = koszul_sign_of_permutation(&perm, &plain) * sigma.sign();
                raw.push((
                    BarMonomial {
                        left: left.clone(),
                        slots,
                        right: right.clone(),
                    },
                    cx * cy * rat(kos as i64) * &prefactor,
                ));
            }
        }
    }
    bar_normalize(c, raw)
}

/// `eta` for the bar complex: `omega (x) [] (x) 1`.
pub fn bar_eta<C: CurvedDga>(c: &C, w: &C::Elem) -> BarElement<C::Elem> {
    let parts = c.homogeneous_parts(w);
    let mut raw = Vec::new();
    for (d, p) in parts {
        raw.push((
            BarMonomial {
                left: (p, d),
                slots: Vec::new(),
                right: (c.unit(), 0),
            },
            rat(1),
        ));
    }
    bar_normalize(c, raw)
}

/// The column-collapse map `Col` on a single zigzag monomial, as raw
/// `(bar monomial, sign)` output.  Odd rows contribute slot `p` to column
/// `p`, even rows slot `n + 1 - p`; the left endpoint collects `x_(0,0)`
/// and the even-row final entries, the right endpoint the odd-row final
/// entries.  The sign is the Koszul sign of the regrouping permutation.
pub fn col_collapse_term<C: CurvedDga>(
    c: &C,
    mono: &ZzMonomial<C::Elem>,
    coeff: &Rat,
) -> (BarMonomial<C::Elem>, Rat) {
    require_commutative(c);
    let k = mono.k;
    let n = mono.n;
    // Target order of path slots: left group, column groups 1..=n, right
    // group.  Slot indices follow the zigzag path-order layout.
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(n + 2);
    let mut left = vec![0usize];
    for i in (2..=k).step_by(2) {
        left.push(mono.slot(i, n + 1));
    }
    groups.push(left);
    for p in 1..=n {
        let mut col = Vec::with_capacity(k);
        for i in 1..=k {
            let q = if i % 2 == 1 { p } else { n + 1 - p };
            col.push(mono.slot(i, q));
        }
        groups.push(col);
    }
    let mut right = Vec::new();
    for i in (1..=k).step_by(2) {
        right.push(mono.slot(i, n + 1));
    }
    groups.push(right);

    let perm: Vec<usize> = groups.iter().flatten().copied().collect();
    let degrees: Vec<usize> = mono.entries.iter().map(|(_, d)| *d).collect();
    let sign = koszul_sign_of_permutation(&perm, &degrees);

    let collapse = |idxs: &[usize]| {
        let parts: Vec<&(C::Elem, usize)> = idxs.iter().map(|&s| &mono.entries[s]).collect();
        mul_entries(c, &parts)
    };
    let bar = BarMonomial {
        left: collapse(&groups[0]),
        slots: groups[1..=n].iter().map(|g| collapse(g)).collect(),
        right: collapse(&groups[n + 1]),
    };
    (bar, coeff * rat(sign as i64))
}

/// `Col` on zigzag elements.
pub fn col_collapse<C: CurvedDga>(
    c: &C,
    x: &ZzElement<C::Elem>,
) -> BarElement<C::Elem> {
    let raw: Vec<_> = x
        .terms
        .iter()
        .map(|(m, co)| col_collapse_term(c, m, co))
        .collect();
    bar_normalize(c, raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdga::MatrixFormCdga;
    use crate::zigzag::{d_z, eta, normalize, random_element, shuffle, unit_element};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar_forms() -> MatrixFormCdga {
        MatrixFormCdga::scalar_flat(2)
    }

    fn random_bar(
        c: &MatrixFormCdga,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> BarElement<<MatrixFormCdga as CurvedDga>::Elem> {
        let mut entry = |max_d: usize| {
            let d = rng.gen_range(0..=max_d);
            let e = c.random_homogeneous(d, rng);
            if c.is_zero(&e) {
                (c.unit(), 0)
            } else {
                (e, d)
            }
        };
        let left = entry(2);
        let slots: Vec<_> = (0..n).map(|_| entry(2)).collect();
        let right = entry(2);
        bar_normalize(c, vec![(BarMonomial { left, slots, right }, rat(1))])
    }

    #[test]
    fn bar_differential_squares_to_zero() {
        let c = scalar_forms();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let n = rng.gen_range(0..=3);
            let x = random_bar(&c, n, &mut rng);
            let dd = bar_differential(&c, &bar_differential(&c, &x));
            assert!(dd.is_zero(), "D^2 != 0 on {:?}", x);
        }
    }

    #[test]
    fn bar_differential_is_a_derivation() {
        let c = scalar_forms();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..25 {
            let x = random_bar(&c, rng.gen_range(0..=2), &mut rng);
            let y = random_bar(&c, rng.gen_range(0..=2), &mut rng);
            let degs: Vec<isize> = x.terms.keys().map(|m| m.degree()).collect();
            if degs.is_empty() {
                continue;
            }
            let dx = degs[0];
            if degs.iter().any(|&d| d != dx) {
                continue;
            }
            let lhs = bar_differential(&c, &bar_shuffle(&c, &x, &y));
            let mut rhs = bar_shuffle(&c, &bar_differential(&c, &x), &y);
            let xy = bar_shuffle(&c, &x, &bar_differential(&c, &y));
            rhs = if dx.rem_euclid(2) == 0 {
                rhs.add(&xy)
            } else {
                rhs.sub(&xy)
            };
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bar_shuffle_unit_and_associativity() {
        let c = scalar_forms();
        let one = bar_eta(&c, &c.unit());
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..15 {
            let x = random_bar(&c, rng.gen_range(0..=2), &mut rng);
            let y = random_bar(&c, rng.gen_range(0..=1), &mut rng);
            let z = random_bar(&c, rng.gen_range(0..=1), &mut rng);
            assert_eq!(bar_shuffle(&c, &x, &one), x);
            assert_eq!(bar_shuffle(&c, &one, &x), x);
            let ab = bar_shuffle(&c, &bar_shuffle(&c, &x, &y), &z);
            let bc = bar_shuffle(&c, &x, &bar_shuffle(&c, &y, &z));
            assert_eq!(ab, bc);
        }
    }

    #[test]
    fn collapse_of_eta_is_bar_eta() {
        let c = scalar_forms();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let d = rng.gen_range(0..=2);
            let w = c.random_homogeneous(d, &mut rng);
            assert_eq!(col_collapse(&c, &eta(&c, &w)), bar_eta(&c, &w));
        }
    }

    #[test]
    fn collapse_example_small_grid() {
        // k = 2, n = 1: Col(x00 (x) (x11 (x) x12) (x) (x21 (x) x22))
        //   = +-(x00 * x22) (x) [x11 * x21] (x) x12.
        let c = scalar_forms();
        let x00 = c.unit();
        let x11 = c.random_homogeneous(1, &mut ChaCha8Rng::seed_from_u64(35));
        let mono = ZzMonomial {
            k: 2,
            n: 1,
            entries: vec![
                (x00, 0),
                (x11.clone(), 1),
                (c.unit(), 0),
                (c.unit(), 0),
                (c.unit(), 0),
            ],
        };
        let (bar, sign) = col_collapse_term(&c, &mono, &rat(1));
        assert_eq!(sign, rat(1));
        assert_eq!(bar.n(), 1);
        assert_eq!(bar.slots[0].0, x11);
        assert!(c.is_unit(&bar.left.0));
        assert!(c.is_unit(&bar.right.0));
    }

    #[test]
    fn collapse_is_a_chain_map() {
        let c = scalar_forms();
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for trial in 0..30 {
            let k = if rng.gen_bool(0.6) { 2 } else { 4 };
            let n = rng.gen_range(0..=2);
            let x = random_element(&c, k, n, 2, &mut rng);
            let lhs = col_collapse(&c, &d_z(&c, &x));
            let rhs = bar_differential(&c, &col_collapse(&c, &x));
            assert_eq!(lhs, rhs, "trial {trial} k={k} n={n}");
        }
    }

    #[test]
    fn collapse_is_an_algebra_map() {
        let c = scalar_forms();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for trial in 0..20 {
            let x = random_element(&c, 2, rng.gen_range(0..=2), 2, &mut rng);
            let y = random_element(&c, 2, rng.gen_range(0..=2), 2, &mut rng);
            let lhs = col_collapse(&c, &shuffle(&c, &x, &y));
            let rhs = bar_shuffle(&c, &col_collapse(&c, &x), &col_collapse(&c, &y));
            assert_eq!(lhs, rhs, "trial {trial}");
        }
    }

    #[test]
    fn collapse_of_unit_is_unit() {
        let c = scalar_forms();
        let one = unit_element(&c);
        assert_eq!(col_collapse(&c, &one), bar_eta(&c, &c.unit()));
        let zero = normalize(&c, Vec::new());
        assert!(col_collapse(&c, &zero).is_zero());
    }
}
