//! The zigzag complex of a curved DGA.
//!
//! A zigzag monomial of shape `(k, n)` (with `k` even) consists of an entry
//! `x_(0,0)` over the left endpoint plus `k` rows of `n + 1` entries each.
//! Odd rows ("zigs") run left to right over the time columns
//! `t_1 < ... < t_{n+1} = 1`; even rows ("zags") run right to left, ending
//! over `t_0 = 0`.  Entries are stored in path order: `x_(0,0)`, then row 1
//! slots `1..=n+1`, row 2 slots `1..=n+1`, and so on.  The degree of a
//! monomial is the sum of its entry degrees minus `n`.
//!
//! Monomials are taken modulo two relations: entries may commute across
//! units to an adjacent zig or zag inside the same column, and an adjacent
//! all-unit zig-and-zag pair may be inserted or deleted at even height.  The
//! normal form pulls every entry as far backward along the path as unit
//! gaps allow (merging entries that meet, multiplying in path order), which
//! collects removable all-unit pairs at deletable heights.
//!
//! The differential is `D_z = nabla_z + b_z + c_z`; its square is the
//! commutator with `R_z = R (x) 1 (x) 1`.  The shuffle product, the
//! inclusion `eta`, the projection `alpha`, and the homotopy `s` realize
//! the curved DGA as a deformation retract of its zigzag complex.

use crate::cdga::{as_scalar_multiple_of_unit, extract_leading_scalar, CurvedDga};
use crate::ring::{rat, Rat};
use crate::shuffle::enumerate_shuffles;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

/// A zigzag monomial; entries are `(element, degree)` in path order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ZzMonomial<E: Clone + PartialEq + Eq + Hash + Debug> {
    pub k: usize,
    pub n: usize,
    pub entries: Vec<(E, usize)>,
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> ZzMonomial<E> {
    pub fn slot(&self, i: usize, p: usize) -> usize {
        if i == 0 {
            assert_eq!(p, 0);
            0
        } else {
            assert!(1 <= p && p <= self.n + 1);
            1 + (i - 1) * (self.n + 1) + (p - 1)
        }
    }

    /// Time column (in `0..=n+1`) over which a path-order slot sits.
    pub fn time_of(&self, slot: usize) -> usize {
        if slot == 0 {
            return 0;
        }
        let i = (slot - 1) / (self.n + 1) + 1;
        let p = (slot - 1) % (self.n + 1) + 1;
        if i % 2 == 1 {
            p
        } else {
            self.n + 1 - p
        }
    }

    pub fn entry(&self, i: usize, p: usize) -> &(E, usize) {
        &self.entries[self.slot(i, p)]
    }

    /// Zigzag degree: sum of entry degrees minus `n`.
    pub fn degree(&self) -> isize {
        self.entries.iter().map(|(_, d)| *d as isize).sum::<isize>() - self.n as isize
    }

    /// Sum of entry degrees strictly before `slot` in path order.
    pub fn prefix_degree(&self, slot: usize) -> usize {
        self.entries[..slot].iter().map(|(_, d)| *d).sum()
    }
}

/// A finite linear combination of zigzag monomials in normal form.
#[derive(Clone, Debug)]
pub struct ZzElement<E: Clone + PartialEq + Eq + Hash + Debug> {
    pub terms: HashMap<ZzMonomial<E>, Rat>,
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> Default for ZzElement<E> {
    fn default() -> Self {
        ZzElement { terms: HashMap::new() }
    }
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> PartialEq for ZzElement<E> {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .all(|(m, c)| other.terms.get(m).map(|c2| c == c2).unwrap_or(false))
    }
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> ZzElement<E> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: ZzMonomial<E>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(|| rat(0));
        *entry += coeff;
        if entry.is_zero() {
            // Remove the cancelled key.
            let key = self
                .terms
                .iter()
                .find(|(_, c)| c.is_zero())
                .map(|(m, _)| m.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
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
        ZzElement {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Degree, when every monomial agrees; `None` otherwise (or when zero).
    pub fn degree(&self) -> Option<isize> {
        let mut degs: Vec<isize> = self.terms.keys().map(|m| m.degree()).collect();
        degs.sort();
        degs.dedup();
        if degs.len() == 1 {
            Some(degs[0])
        } else {
            None
        }
    }
}

/// Normalize a single monomial term; `None` when the term vanishes.
pub fn normalize_term<C: CurvedDga>(
    c: &C,
    mut mono: ZzMonomial<C::Elem>,
    mut coeff: Rat,
) -> Option<(ZzMonomial<C::Elem>, Rat)> {
    if coeff.is_zero() {
        return None;
    }
    // Scalar-normalize every entry (units become exact units).
    for (e, d) in mono.entries.iter_mut() {
        if c.is_zero(e) {
            return None;
        }
        if let Some(s) = as_scalar_multiple_of_unit(c, e) {
            coeff *= s;
            *e = c.unit();
            *d = 0;
            continue;
        }
        let (lc, monic) = extract_leading_scalar(c, e);
        coeff *= lc;
        *e = monic;
    }
    // Pull entries backward along the path through unit gaps within a
    // column, merging in path order when two entries meet.
    let len = mono.entries.len();
    let times: Vec<usize> = (0..len).map(|s| mono.time_of(s)).collect();
    loop {
        let mut changed = false;
        for s in 0..len {
            if c.is_unit(&mono.entries[s].0) {
                continue;
            }
            let Some(s2) = (0..s).rev().find(|&t| times[t] == times[s]) else {
                continue;
            };
            if !((s2 + 1)..s).all(|t| c.is_unit(&mono.entries[t].0)) {
                continue;
            }
            let prod = c.mul(&mono.entries[s2].0, &mono.entries[s].0);
            if c.is_zero(&prod) {
                return None;
            }
            let deg = mono.entries[s].1 + mono.entries[s2].1;
            let (lc, monic) = extract_leading_scalar(c, &prod);
            coeff *= lc;
            mono.entries[s2] = (monic, deg);
            mono.entries[s] = (c.unit(), 0);
            changed = true;
            break;
        }
        if !changed {
            break;
        }
    }
    // Delete leading-most all-unit zig-and-zag pairs (odd starting row).
    loop {
        if mono.k <= 2 {
            break;
        }
        let row_is_unit = |i: usize| -> bool {
            (1..=mono.n + 1).all(|p| c.is_unit(&mono.entry(i, p).0))
        };
        let Some(r) = (1..mono.k).step_by(2).find(|&r| row_is_unit(r) && row_is_unit(r + 1))
        else {
            break;
        };
        let mut entries = Vec::with_capacity(mono.entries.len() - 2 * (mono.n + 1));
        entries.push(mono.entries[0].clone());
        for i in 1..=mono.k {
            if i == r || i == r + 1 {
                continue;
            }
            for p in 1..=mono.n + 1 {
                entries.push(mono.entries[mono.slot(i, p)].clone());
            }
        }
        mono = ZzMonomial { k: mono.k - 2, n: mono.n, entries };
    }
    Some((mono, coeff))
}

/// Multilinear expansion of a monomial: every slot entry is split into its
/// pure basis components, so equal elements always share monomial keys.
fn expand_term<C: CurvedDga>(
    c: &C,
    mono: ZzMonomial<C::Elem>,
    coeff: Rat,
) -> Vec<(ZzMonomial<C::Elem>, Rat)> {
    let mut acc = vec![(Vec::with_capacity(mono.entries.len()), coeff)];
    for (e, d) in mono.entries {
        let comps = c.basis_components(&e);
        let mut next = Vec::with_capacity(acc.len() * comps.len().max(1));
        for (prefix, co) in &acc {
            for (cc, pure) in &comps {
                let mut p = prefix.clone();
                p.push((pure.clone(), d));
                next.push((p, co * cc));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(entries, co)| {
            (
                ZzMonomial {
                    k: mono.k,
                    n: mono.n,
                    entries,
                },
                co,
            )
        })
        .collect()
}

/// Normalize a raw collection of terms into a [`ZzElement`].
pub fn normalize<C: CurvedDga>(
    c: &C,
    terms: impl IntoIterator<Item = (ZzMonomial<C::Elem>, Rat)>,
) -> ZzElement<C::Elem> {
    let mut out = ZzElement::zero();
    for (m, k) in terms {
        for (m1, k1) in expand_term(c, m, k) {
            if let Some((m2, k2)) = normalize_term(c, m1, k1) {
                out.add_term(m2, k2);
            }
        }
    }
    out
}

/// Internal grid view of a monomial, 1-based rows and slots.
#[derive(Clone)]
struct Grid<E: Clone + PartialEq + Eq + Hash + Debug> {
    k: usize,
    n: usize,
    e00: (E, usize),
    rows: Vec<Vec<(E, usize)>>,
}

impl<E: Clone + PartialEq + Eq + Hash + Debug> Grid<E> {
    fn from_mono(m: &ZzMonomial<E>) -> Self {
        let mut rows = Vec::with_capacity(m.k);
        for i in 1..=m.k {
            rows.push((1..=m.n + 1).map(|p| m.entries[m.slot(i, p)].clone()).collect());
        }
        Grid { k: m.k, n: m.n, e00: m.entries[0].clone(), rows }
    }

    fn to_mono(&self) -> ZzMonomial<E> {
        let mut entries = Vec::with_capacity(1 + self.k * (self.n + 1));
        entries.push(self.e00.clone());
        for row in &self.rows {
            assert_eq!(row.len(), self.n + 1);
            entries.extend(row.iter().cloned());
        }
        ZzMonomial { k: self.k, n: self.n, entries }
    }
}

pub(crate) fn mul_entries<C: CurvedDga>(c: &C, parts: &[&(C::Elem, usize)]) -> (C::Elem, usize) {
    let mut acc = c.unit();
    let mut deg = 0;
    for (e, d) in parts {
        acc = c.mul(&acc, e);
        deg += d;
    }
    (acc, deg)
}

pub(crate) fn sign_rat(exp: usize) -> Rat {
    if exp % 2 == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// The entrywise part of the differential: apply `nabla` at each slot with
/// the Koszul sign `(-1)^{n + (prefix degree)}`.
pub fn nabla_z<C: CurvedDga>(c: &C, x: &ZzElement<C::Elem>) -> ZzElement<C::Elem> {
    let mut raw = Vec::new();
    for (mono, coeff) in &x.terms {
        for s in 0..mono.entries.len() {
            let de = c.nabla(&mono.entries[s].0);
            if c.is_zero(&de) {
                continue;
            }
            let beta = mono.prefix_degree(s);
            let mut m2 = mono.clone();
            m2.entries[s] = (de, mono.entries[s].1 + 1);
            raw.push((m2, coeff * sign_rat(mono.n + beta)));
        }
    }
    normalize(c, raw)
}

/// The simplicial part `b_z = sum_l b_l`: collapse the time column pair
/// `(t_l, t_{l+1})`, multiplying colliding entries in path order.  Zero on
/// monomials with `n = 0`.
pub fn b_z<C: CurvedDga>(c: &C, x: &ZzElement<C::Elem>) -> ZzElement<C::Elem> {
    let mut raw = Vec::new();
    for (mono, coeff) in &x.terms {
        let n = mono.n;
        if n == 0 {
            continue;
        }
        let g = Grid::from_mono(mono);
        for l in 0..=n {
            let sign = sign_rat(n + l);
            let mut rows: Vec<Vec<(C::Elem, usize)>> = Vec::with_capacity(g.k);
            let mut e00 = g.e00.clone();
            if l == 0 {
                // t_1 collides with the left endpoint t_0.
                e00 = mul_entries(c, &[&g.e00, &g.rows[0][0]]);
                for i in 1..=g.k {
                    let r = &g.rows[i - 1];
                    if i % 2 == 1 {
                        // Zig: drop slot 1 (row 1's went into e00; for rows
                        // 2j+1 > 1 it went into the previous zag's merge).
                        rows.push(r[1..].to_vec());
                    } else {
                        // Zag: slots n and n+1 sit over t_1 and t_0; merge
                        // them with the next zig's slot 1 (also over t_1).
                        let mut row = r[..n - 1].to_vec();
                        let merged = if i < g.k {
                            mul_entries(c, &[&r[n - 1], &r[n], &g.rows[i][0]])
                        } else {
                            mul_entries(c, &[&r[n - 1], &r[n]])
                        };
                        row.push(merged);
                        rows.push(row);
                    }
                }
            } else if l == n {
                // t_n collides with the right endpoint t_{n+1} = 1.
                for i in 1..=g.k {
                    let r = &g.rows[i - 1];
                    if i % 2 == 1 {
                        let mut row = r[..n - 1].to_vec();
                        let merged = mul_entries(c, &[&r[n - 1], &r[n], &g.rows[i][0]]);
                        row.push(merged);
                        rows.push(row);
                    } else {
                        rows.push(r[1..].to_vec());
                    }
                }
            } else {
                // Interior collision of t_l and t_{l+1}.
                for i in 1..=g.k {
                    let r = &g.rows[i - 1];
                    let (a, b) = if i % 2 == 1 { (l, l + 1) } else { (n - l, n - l + 1) };
                    let mut row = Vec::with_capacity(n);
                    for p in 1..=n + 1 {
                        if p == a {
                            row.push(mul_entries(c, &[&r[a - 1], &r[b - 1]]));
                        } else if p == b {
                            continue;
                        } else {
                            row.push(r[p - 1].clone());
                        }
                    }
                    rows.push(row);
                }
            }
            let g2 = Grid { k: g.k, n: n - 1, e00, rows };
            raw.push((g2.to_mono(), coeff * sign));
        }
    }
    normalize(c, raw)
}

/// The curvature part `c_z = sum_{j,l} c_{j,l}`: insert a new time column
/// between `t_{l-1}` and `t_l` carrying the curvature `R` on row `j` and
/// units elsewhere, with sign `(-1)^{n + j + eps}` where `eps` is the total
/// degree the curvature commutes past in path order.
pub fn c_z<C: CurvedDga>(c: &C, x: &ZzElement<C::Elem>) -> ZzElement<C::Elem> {
    let curv = c.curvature();
    if c.is_zero(&curv) {
        return ZzElement::zero();
    }
    let mut raw = Vec::new();
    for (mono, coeff) in &x.terms {
        let n = mono.n;
        let g = Grid::from_mono(mono);
        for j in 1..=g.k {
            for l in 1..=n + 1 {
                let mut rows: Vec<Vec<(C::Elem, usize)>> = Vec::with_capacity(g.k);
                // The Koszul count for the inserted curvature column: the
                // number of tensor slots the new entry sits after in the
                // result (the curvature is even, so entry degrees drop out
                // and only the slot count survives).
                let pos_j = if j % 2 == 1 { l } else { n + 2 - l };
                let eps = (j - 1) * (n + 2) + pos_j - 1;
                for i in 1..=g.k {
                    let r = &g.rows[i - 1];
                    // Insertion position (1-based) of the new column in row i:
                    // the column sits between old times t_{l-1} and t_l, so a
                    // zig crosses it at slot l and a zag at slot n + 2 - l.
                    let pos = if i % 2 == 1 { l } else { n + 2 - l };
                    let ins = if i == j {
                        (curv.clone(), 2)
                    } else {
                        (c.unit(), 0)
                    };
                    let mut row = r[..pos - 1].to_vec();
                    row.push(ins);
                    row.extend_from_slice(&r[pos - 1..]);
                    rows.push(row);
                }
                let g2 = Grid { k: g.k, n: n + 1, e00: g.e00.clone(), rows };
                raw.push((g2.to_mono(), coeff * sign_rat(n + j + eps)));
            }
        }
    }
    normalize(c, raw)
}

/// The zigzag differential `D_z = nabla_z + b_z + c_z` (degree +1).
pub fn d_z<C: CurvedDga>(c: &C, x: &ZzElement<C::Elem>) -> ZzElement<C::Elem> {
    nabla_z(c, x).add(&b_z(c, x)).add(&c_z(c, x))
}

/// `R_z = R (x) 1 (x) 1`, the curvature of the zigzag algebra.
pub fn r_z<C: CurvedDga>(c: &C) -> ZzElement<C::Elem> {
    let curv = c.curvature();
    if c.is_zero(&curv) {
        return ZzElement::zero();
    }
    let mono = ZzMonomial {
        k: 2,
        n: 0,
        entries: vec![(curv, 2), (c.unit(), 0), (c.unit(), 0)],
    };
    normalize(c, vec![(mono, rat(1))])
}

/// The inclusion `eta(omega) = omega (x) 1 (x) 1` (expanded over
/// homogeneous pieces of `omega`).
pub fn eta<C: CurvedDga>(c: &C, omega: &C::Elem) -> ZzElement<C::Elem> {
    let mut raw = Vec::new();
    for (d, part) in c.homogeneous_parts(omega) {
        let mono = ZzMonomial {
            k: 2,
            n: 0,
            entries: vec![(part, d), (c.unit(), 0), (c.unit(), 0)],
        };
        raw.push((mono, rat(1)));
    }
    normalize(c, raw)
}

/// The projection `alpha`: zero unless `n = 0`, in which case multiply all
/// entries in path order.
pub fn alpha<C: CurvedDga>(c: &C, x: &ZzElement<C::Elem>) -> C::Elem {
    let mut out = c.zero();
    for (mono, coeff) in &x.terms {
        if mono.n != 0 {
            continue;
        }
        let mut acc = mono.entries[0].0.clone();
        for (e, _) in &mono.entries[1..] {
            acc = c.mul(&acc, e);
        }
        out = c.add(&out, &c.scale(coeff, &acc));
    }
    out
}

/// The homotopy `s`: append a unit column pulling the right endpoint into
/// the interior (`n -> n + 1`); zigs gain a unit in the last slot, zags in
/// the first.
pub fn s_homotopy<C: CurvedDga>(c: &C, x: &ZzElement<C::Elem>) -> ZzElement<C::Elem> {
    let mut raw = Vec::new();
    for (mono, coeff) in &x.terms {
        let g = Grid::from_mono(mono);
        let mut rows: Vec<Vec<(C::Elem, usize)>> = Vec::with_capacity(g.k);
        for i in 1..=g.k {
            let r = &g.rows[i - 1];
            let mut row;
            if i % 2 == 1 {
                row = r.clone();
                row.push((c.unit(), 0));
            } else {
                row = vec![(c.unit(), 0)];
                row.extend_from_slice(r);
            }
            rows.push(row);
        }
        let g2 = Grid { k: g.k, n: g.n + 1, e00: g.e00.clone(), rows };
        raw.push((g2.to_mono(), coeff.clone()));
    }
    normalize(c, raw)
}

/// Shuffle product of the zigzag algebra.
///
/// For each `(n, m)`-shuffle `sigma`, the `x` rows interleave their interior
/// columns with `m` units (zigs via `sigma`, zags via the reversed shuffle),
/// the `y` rows interleave `n` units with their interior columns, the `y`
/// rows are stacked below the `x` rows, and `y`'s left-endpoint entry is
/// absorbed into the last `x` zag in path order.  The sign is
/// `(-1)^{inv(sigma) + (|x| - n) m}` with `|x|` the total entry degree.
pub fn shuffle<C: CurvedDga>(
    c: &C,
    x: &ZzElement<C::Elem>,
    y: &ZzElement<C::Elem>,
) -> ZzElement<C::Elem> {
    let mut raw = Vec::new();
    for (mx, cx) in &x.terms {
        for (my, cy) in &y.terms {
            let gx = Grid::from_mono(mx);
            let gy = Grid::from_mono(my);
            let n = gx.n;
            let m = gy.n;
            let unit = (c.unit(), 0usize);
            let x_entry_deg: usize = mx.entries.iter().map(|(_, d)| *d).sum();
            let prefactor = sign_rat((x_entry_deg + n) * m);
            for sigma in enumerate_shuffles(n, m) {
                let rev = sigma.reversed();
                let mut rows: Vec<Vec<(C::Elem, usize)>> = Vec::new();
                for i in 1..=gx.k {
                    let r = &gx.rows[i - 1];
                    let interior: Vec<(C::Elem, usize)> = r[..n].to_vec();
                    let units = vec![unit.clone(); m];
                    let pick = if i % 2 == 1 { &sigma } else { &rev };
                    let mut row = pick.interleave(&interior, &units);
                    row.push(r[n].clone());
                    rows.push(row);
                }
                for i in 1..=gy.k {
                    let r = &gy.rows[i - 1];
                    let interior: Vec<(C::Elem, usize)> = r[..m].to_vec();
                    let units = vec![unit.clone(); n];
                    let pick = if i % 2 == 1 { &sigma } else { &rev };
                    let mut row = pick.interleave(&units, &interior);
                    row.push(r[m].clone());
                    rows.push(row);
                }
                // Absorb y's left-endpoint entry into the last x zag.
                let last_x = gx.k - 1;
                let merged = {
                    let cur = rows[last_x].last().unwrap().clone();
                    mul_entries(c, &[&cur, &gy.e00])
                };
                *rows[last_x].last_mut().unwrap() = merged;
                let g2 = Grid { k: gx.k + gy.k, n: n + m, e00: gx.e00.clone(), rows };
                let sgn = if sigma.sign() < 0 { rat(-1) } else { rat(1) };
                raw.push((g2.to_mono(), cx * cy * &prefactor * sgn));
            }
        }
    }
    normalize(c, raw)
}

/// Commutator `[a, x]` in the zigzag algebra for `a` of even degree.
pub fn commutator_even<C: CurvedDga>(
    c: &C,
    a: &ZzElement<C::Elem>,
    x: &ZzElement<C::Elem>,
) -> ZzElement<C::Elem> {
    shuffle(c, a, x).sub(&shuffle(c, x, a))
}

/// The unit monomial `1 (x) 1 (x) 1` of shape `(2, 0)`.
pub fn unit_element<C: CurvedDga>(c: &C) -> ZzElement<C::Elem> {
    eta(c, &c.unit())
}

/// Entrywise application of a curved DGA morphism, yielding the induced map
/// of zigzag complexes.
pub fn zz_map<A: CurvedDga, B: CurvedDga>(
    a: &A,
    b: &B,
    f: &dyn Fn(&A::Elem) -> B::Elem,
    x: &ZzElement<A::Elem>,
) -> ZzElement<B::Elem> {
    let _ = a;
    let mut raw = Vec::new();
    for (mono, coeff) in &x.terms {
        let entries: Vec<(B::Elem, usize)> = mono
            .entries
            .iter()
            .map(|(e, d)| (f(e), *d))
            .collect();
        raw.push((
            ZzMonomial { k: mono.k, n: mono.n, entries },
            coeff.clone(),
        ));
    }
    normalize(b, raw)
}

/// Random monomial of shape `(k, n)` with sparse homogeneous entries, for
/// property testing.
pub fn random_monomial<C: CurvedDga>(
    c: &C,
    k: usize,
    n: usize,
    max_entry_deg: usize,
    rng: &mut ChaCha8Rng,
) -> ZzMonomial<C::Elem> {
    assert!(k >= 2 && k % 2 == 0);
    let mut entries = Vec::with_capacity(1 + k * (n + 1));
    for _ in 0..(1 + k * (n + 1)) {
        if rng.gen_bool(0.45) {
            entries.push((c.unit(), 0));
        } else {
            let d = rng.gen_range(0..=max_entry_deg);
            // A pure basis entry keeps the monomial count small: sums expand
            // multilinearly during normalization anyway, so single-component
            // entries lose no generality for property tests.
            let e = c.random_homogeneous(d, rng);
            match c.basis_components(&e).into_iter().next() {
                Some((_, pure)) => entries.push((pure, d)),
                None => entries.push((c.unit(), 0)),
            }
        }
    }
    ZzMonomial { k, n, entries }
}

/// Random normalized element consisting of a single random monomial term.
pub fn random_element<C: CurvedDga>(
    c: &C,
    k: usize,
    n: usize,
    max_entry_deg: usize,
    rng: &mut ChaCha8Rng,
) -> ZzElement<C::Elem> {
    normalize(c, vec![(random_monomial(c, k, n, max_entry_deg, rng), rat(1))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdga::{make_matrix_form_cdga, make_tensor_algebra_cdga};
    use rand::SeedableRng;

    fn tensor() -> crate::cdga::TensorCdga {
        make_tensor_algebra_cdga(2, vec![rat(1), rat(0)])
    }

    /// Apply the ~a insertion of an all-unit zig-and-zag pair at even height `j`.
    fn insert_unit_pair<C: CurvedDga>(
        c: &C,
        m: &ZzMonomial<C::Elem>,
        j: usize,
    ) -> ZzMonomial<C::Elem> {
        assert!(j % 2 == 0 && j <= m.k);
        let g = Grid::from_mono(m);
        let unit_row = vec![(c.unit(), 0); m.n + 1];
        let mut rows = Vec::new();
        for i in 1..=m.k {
            if i == j + 1 {
                rows.push(unit_row.clone());
                rows.push(unit_row.clone());
            }
            rows.push(g.rows[i - 1].clone());
        }
        if j == m.k {
            rows.push(unit_row.clone());
            rows.push(unit_row);
        }
        Grid { k: m.k + 2, n: m.n, e00: g.e00, rows }.to_mono()
    }

    #[test]
    fn normalization_is_idempotent_and_a_invariant() {
        let c = tensor();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..40 {
            let k = if rng.gen_bool(0.5) { 2 } else { 4 };
            let n = rng.gen_range(0..=2);
            let m = random_monomial(&c, k, n, 2, &mut rng);
            let e1 = normalize(&c, vec![(m.clone(), rat(1))]);
            let e2 = normalize(
                &c,
                e1.terms.iter().map(|(m, k)| (m.clone(), k.clone())),
            );
            assert_eq!(e1, e2, "idempotence, trial {}", trial);
            for j in (0..=k).step_by(2) {
                let ins = insert_unit_pair(&c, &m, j);
                let e3 = normalize(&c, vec![(ins, rat(1))]);
                assert_eq!(e1, e3, "insertion at height {}, trial {}", j, trial);
            }
        }
    }

    #[test]
    fn normalization_pulls_through_unit_gaps() {
        // (1 ; 1 ; a) with a over t_0 pulls back into the x_(0,0) slot.
        let c = tensor();
        let a = c.basis_word(&[0]);
        let m = ZzMonomial {
            k: 2,
            n: 0,
            entries: vec![(c.unit(), 0), (c.unit(), 0), (a.clone(), 1)],
        };
        let e = normalize(&c, vec![(m, rat(1))]);
        assert_eq!(e.terms.len(), 1);
        let (mono, coeff) = e.terms.iter().next().unwrap();
        assert_eq!(*coeff, rat(1));
        assert_eq!(mono.entries[0].0, a);
        assert_eq!(mono.entries[2].0, c.unit());
    }

    #[test]
    fn alpha_after_eta_is_identity() {
        let c = make_matrix_form_cdga();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let d = rng.gen_range(0..=2);
            let w = c.random_homogeneous(d, &mut rng);
            let back = alpha(&c, &eta(&c, &w));
            assert!(c.is_zero(&c.sub(&back, &w)));
        }
    }

    #[test]
    fn differential_squares_to_curvature_commutator_tensor() {
        let c = tensor();
        let rz = r_z(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..30 {
            let k = if rng.gen_bool(0.6) { 2 } else { 4 };
            let n = rng.gen_range(0..=2);
            let x = random_element(&c, k, n, 2, &mut rng);
            let dd = d_z(&c, &d_z(&c, &x));
            let comm = commutator_even(&c, &rz, &x);
            assert_eq!(dd, comm, "trial {} k={} n={}", trial, k, n);
        }
    }

    #[test]
    fn differential_squares_to_curvature_commutator_matrix() {
        let c = make_matrix_form_cdga();
        let rz = r_z(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for trial in 0..15 {
            let k = if rng.gen_bool(0.6) { 2 } else { 4 };
            let n = rng.gen_range(0..=2);
            let x = random_element(&c, k, n, 2, &mut rng);
            let dd = d_z(&c, &d_z(&c, &x));
            let comm = commutator_even(&c, &rz, &x);
            assert_eq!(dd, comm, "trial {} k={} n={}", trial, k, n);
        }
    }

    #[test]
    fn shuffle_unit_laws() {
        let c = tensor();
        let one = unit_element(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..20 {
            let k = if rng.gen_bool(0.5) { 2 } else { 4 };
            let n = rng.gen_range(0..=2);
            let x = random_element(&c, k, n, 2, &mut rng);
            assert_eq!(shuffle(&c, &x, &one), x);
            assert_eq!(shuffle(&c, &one, &x), x);
        }
    }

    #[test]
    fn shuffle_is_associative() {
        let c = tensor();
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for trial in 0..10 {
            let x = random_element(&c, 2, rng.gen_range(0..=1), 1, &mut rng);
            let y = random_element(&c, 2, rng.gen_range(0..=1), 1, &mut rng);
            let z = random_element(&c, 2, rng.gen_range(0..=1), 1, &mut rng);
            let l = shuffle(&c, &shuffle(&c, &x, &y), &z);
            let r = shuffle(&c, &x, &shuffle(&c, &y, &z));
            assert_eq!(l, r, "trial {}", trial);
        }
    }

    #[test]
    fn differential_is_a_derivation_for_shuffle() {
        let c = tensor();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for trial in 0..20 {
            let x = random_element(&c, 2, rng.gen_range(0..=2), 1, &mut rng);
            let y = random_element(&c, 2, rng.gen_range(0..=2), 1, &mut rng);
            let Some(dx_deg) = x.degree() else { continue };
            let lhs = d_z(&c, &shuffle(&c, &x, &y));
            let sign = if dx_deg.rem_euclid(2) == 0 { rat(1) } else { rat(-1) };
            let rhs = shuffle(&c, &d_z(&c, &x), &y)
                .add(&shuffle(&c, &x, &d_z(&c, &y)).scale(&sign));
            assert_eq!(lhs, rhs, "trial {}", trial);
        }
    }

    #[test]
    fn eta_is_a_morphism() {
        let c = make_matrix_form_cdga();
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..15 {
            let a = c.random_homogeneous(rng.gen_range(0..=2), &mut rng);
            let b = c.random_homogeneous(rng.gen_range(0..=2), &mut rng);
            let lhs = eta(&c, &c.mul(&a, &b));
            let rhs = shuffle(&c, &eta(&c, &a), &eta(&c, &b));
            assert_eq!(lhs, rhs);
            let lhs_d = d_z(&c, &eta(&c, &a));
            let rhs_d = eta(&c, &c.nabla(&a));
            assert_eq!(lhs_d, rhs_d);
        }
        assert_eq!(r_z(&c), eta(&c, &c.curvature()));
    }

    #[test]
    fn homotopy_identity_small_inputs() {
        let c = tensor();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for trial in 0..40 {
            let k = if rng.gen_bool(0.6) { 2 } else { 4 };
            let n = rng.gen_range(0..=2);
            let x = random_element(&c, k, n, 2, &mut rng);
            let lhs = x.sub(&eta(&c, &alpha(&c, &x)));
            let rhs = d_z(&c, &s_homotopy(&c, &x)).add(&s_homotopy(&c, &d_z(&c, &x)));
            assert_eq!(lhs, rhs, "trial {} k={} n={}", trial, k, n);
        }
    }

    #[test]
    fn differential_well_defined_on_quotient() {
        let c = tensor();
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..20 {
            let m = random_monomial(&c, 2, rng.gen_range(0..=2), 2, &mut rng);
            let x = normalize(&c, vec![(m.clone(), rat(1))]);
            let ins = insert_unit_pair(&c, &m, 2);
            let x2 = normalize(&c, vec![(ins, rat(1))]);
            assert_eq!(x, x2);
            assert_eq!(d_z(&c, &x), d_z(&c, &x2));
        }
    }

    #[test]
    fn zz_map_commutes_with_differential_for_identity() {
        let c = tensor();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let id = |e: &crate::cdga::TensorElement| e.clone();
        for _ in 0..10 {
            let x = random_element(&c, 2, rng.gen_range(0..=2), 2, &mut rng);
            let fx = zz_map(&c, &c, &id, &x);
            assert_eq!(fx, x);
            assert_eq!(zz_map(&c, &c, &id, &d_z(&c, &x)), d_z(&c, &fx));
        }
    }
}
