//! Numerical path-space layer: parallel transport, the holonomy-derivative
//! formula, ordered-simplex quadrature, the curved Chen iterated integral as
//! an evaluator of bundle-valued forms on path space, fiber-integration
//! Stokes checks, and the classical scalar Chen map.
//!
//! Everything here works on `M = R^d` with the trivial rank-`r` bundle; the
//! fiber of the pullback bundle at a path is the matrix algebra attached to
//! the path's starting point.  Paths and tangent fields are closed-form maps
//! `[0,1] -> R^d` with analytic velocities, parallel transport solves
//! `P' = -A(gamma')P` by fixed-step RK4, and simplex integrals use iterated
//! Gauss-Legendre rules.

use crate::bar::BarElement;
use crate::cdga::{CurvedDga, MatrixFormCdga};
use crate::form::{merge_sign, FormElement};
use crate::ring::{rat_to_f64, Rat};
use crate::shuffle::enumerate_shuffles;
use crate::zigzag::ZzElement;
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::rc::Rc;

// ---------------------------------------------------------------------------
// Paths, tangent fields, connections.
// ---------------------------------------------------------------------------

/// A smooth path `[0,1] -> R^d` with analytic velocity.
#[derive(Clone)]
pub struct Path {
    pub dim: usize,
    pos: Rc<dyn Fn(f64) -> Vec<f64>>,
    vel: Rc<dyn Fn(f64) -> Vec<f64>>,
}

impl Path {
    pub fn from_maps(
        dim: usize,
        pos: impl Fn(f64) -> Vec<f64> + 'static,
        vel: impl Fn(f64) -> Vec<f64> + 'static,
    ) -> Self {
        Path { dim, pos: Rc::new(pos), vel: Rc::new(vel) }
    }

    /// Componentwise polynomial path: `coeffs[i]` are the coefficients of
    /// component `i` in increasing powers of `t`.
    pub fn polynomial(coeffs: Vec<Vec<f64>>) -> Self {
        let dim = coeffs.len();
        let c2 = coeffs.clone();
        Path::from_maps(
            dim,
            move |t| {
                coeffs
                    .iter()
                    .map(|cs| cs.iter().rev().fold(0.0, |acc, c| acc * t + c))
                    .collect()
            },
            move |t| {
                c2.iter()
                    .map(|cs| {
                        cs.iter()
                            .enumerate()
                            .skip(1)
                            .rev()
                            .fold(0.0, |acc, (k, c)| acc * t + c * k as f64)
                    })
                    .collect()
            },
        )
    }

    /// Circle arc in the first two coordinates (remaining coordinates zero).
    pub fn circle_arc(dim: usize, center: [f64; 2], radius: f64, a0: f64, a1: f64) -> Self {
        assert!(dim >= 2);
        Path::from_maps(
            dim,
            move |t| {
                let th = a0 + (a1 - a0) * t;
                let mut x = vec![0.0; dim];
                x[0] = center[0] + radius * th.cos();
                x[1] = center[1] + radius * th.sin();
                x
            },
            move |t| {
                let th = a0 + (a1 - a0) * t;
                let mut v = vec![0.0; dim];
                v[0] = -radius * (a1 - a0) * th.sin();
                v[1] = radius * (a1 - a0) * th.cos();
                v
            },
        )
    }

    /// Constant path at a point.
    pub fn constant(point: Vec<f64>) -> Self {
        let dim = point.len();
        let p2 = point.clone();
        Path::from_maps(dim, move |_| point.clone(), move |_| vec![0.0; p2.len()])
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        (self.pos)(t)
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        (self.vel)(t)
    }

    /// The deformed path `t -> gamma(t) + s X(t)`.
    pub fn deformed(&self, field: &TangentField, s: f64) -> Path {
        let (p, v) = (self.pos.clone(), self.vel.clone());
        let (fp, fv) = (field.map.clone(), field.deriv.clone());
        Path {
            dim: self.dim,
            pos: Rc::new(move |t| {
                p(t).iter().zip(fp(t)).map(|(a, b)| a + s * b).collect()
            }),
            vel: Rc::new(move |t| {
                v(t).iter().zip(fv(t)).map(|(a, b)| a + s * b).collect()
            }),
        }
    }

    /// The stopped path `t -> gamma(min(t, s))`, which shrinks toward the
    /// starting point as `s -> 0`.
    pub fn stopped(&self, s: f64) -> Path {
        let (p, v) = (self.pos.clone(), self.vel.clone());
        Path {
            dim: self.dim,
            pos: Rc::new(move |t| p(t.min(s))),
            vel: Rc::new(move |t| if t < s { v(t) } else { vec![0.0; v(0.0).len()] }),
        }
    }

    /// Max deviation between the analytic velocity and a central difference
    /// of the position map, over a coarse sample grid.
    pub fn consistency_error(&self) -> f64 {
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 1..20 {
            let t = i as f64 / 20.0;
            let p1 = self.at(t + h);
            let p0 = self.at(t - h);
            let v = self.velocity(t);
            for j in 0..self.dim {
                worst = worst.max(((p1[j] - p0[j]) / (2.0 * h) - v[j]).abs());
            }
        }
        worst
    }
}

/// A tangent vector field along a path: `X: [0,1] -> R^d`, with its
/// `t`-derivative (needed to deform velocities).
#[derive(Clone)]
pub struct TangentField {
    pub dim: usize,
    map: Rc<dyn Fn(f64) -> Vec<f64>>,
    deriv: Rc<dyn Fn(f64) -> Vec<f64>>,
}

impl TangentField {
    pub fn from_maps(
        dim: usize,
        map: impl Fn(f64) -> Vec<f64> + 'static,
        deriv: impl Fn(f64) -> Vec<f64> + 'static,
    ) -> Self {
        TangentField { dim, map: Rc::new(map), deriv: Rc::new(deriv) }
    }

    /// Componentwise polynomial field (coefficients in increasing powers).
    pub fn polynomial(coeffs: Vec<Vec<f64>>) -> Self {
        let p = Path::polynomial(coeffs);
        TangentField { dim: p.dim, map: p.pos, deriv: p.vel }
    }

    /// A bump-profile field `t^2 (1-t)^2 * dir`, vanishing to first order at
    /// both endpoints.
    pub fn bump(dir: Vec<f64>) -> Self {
        let dim = dir.len();
        let d2 = dir.clone();
        TangentField::from_maps(
            dim,
            move |t| {
                let b = t * t * (1.0 - t) * (1.0 - t);
                dir.iter().map(|c| c * b).collect()
            },
            move |t| {
                let db = 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
                d2.iter().map(|c| c * db).collect()
            },
        )
    }

    pub fn constant(dir: Vec<f64>) -> Self {
        let dim = dir.len();
        TangentField::from_maps(dim, move |_| dir.clone(), move |_| vec![0.0; dim])
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        (self.map)(t)
    }

    /// The field pulled back along the stopping map: `t -> X(min(t, s))`.
    pub fn stopped(&self, s: f64) -> TangentField {
        let (m, d) = (self.map.clone(), self.deriv.clone());
        TangentField {
            dim: self.dim,
            map: Rc::new(move |t| m(t.min(s))),
            deriv: Rc::new(move |t| if t < s { d(t) } else { vec![0.0; d(0.0).len()] }),
        }
    }

    /// The velocity field of a path, as a tangent field.
    pub fn velocity_of(path: &Path) -> TangentField {
        let p = path.clone();
        let h = 1e-5;
        let p2 = path.clone();
        TangentField::from_maps(
            path.dim,
            move |t| p.velocity(t),
            move |t| {
                let a = p2.velocity((t + h).min(1.0));
                let b = p2.velocity((t - h).max(0.0));
                a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
            },
        )
    }
}

/// Numerical connection data on the trivial rank-`r` bundle over `R^d`:
/// the connection 1-form `A` as `d` matrices at each point, and the
/// curvature 2-form evaluator `R(x; u, v)`.
#[derive(Clone)]
pub struct ConnectionData {
    pub dim: usize,
    pub r: usize,
    a: Rc<dyn Fn(&[f64]) -> Vec<DMatrix<f64>>>,
    curv: Rc<dyn Fn(&[f64], &[f64], &[f64]) -> DMatrix<f64>>,
}

impl ConnectionData {
    /// Build evaluators from the symbolic matrix-form carrier (exact
    /// coefficients converted to `f64`).
    pub fn from_cdga(c: &MatrixFormCdga) -> Self {
        let dim = c.dim();
        let r = c.matrix_size();
        let conn = c.connection().clone();
        let curv_form = c.curvature();
        let a = move |x: &[f64]| -> Vec<DMatrix<f64>> {
            let mut out = vec![DMatrix::zeros(r, r); dim];
            for (mask, m) in conn.terms() {
                let i = mask.trailing_zeros() as usize;
                out[i] += m.eval_f64(x);
            }
            out
        };
        let curv = move |x: &[f64], u: &[f64], v: &[f64]| -> DMatrix<f64> {
            let mut out = DMatrix::zeros(r, r);
            for (mask, m) in curv_form.terms() {
                let i = mask.trailing_zeros() as usize;
                let j = (mask & !(1u32 << i)).trailing_zeros() as usize;
                out += m.eval_f64(x) * (u[i] * v[j] - u[j] * v[i]);
            }
            out
        };
        ConnectionData { dim, r, a: Rc::new(a), curv: Rc::new(curv) }
    }

    pub fn flat(dim: usize, r: usize) -> Self {
        ConnectionData {
            dim,
            r,
            a: Rc::new(move |_| vec![DMatrix::zeros(r, r); dim]),
            curv: Rc::new(move |_, _, _| DMatrix::zeros(r, r)),
        }
    }

    /// `A(x)(v) = sum_i v_i A_i(x)`.
    pub fn eval_a(&self, x: &[f64], v: &[f64]) -> DMatrix<f64> {
        let mats = (self.a)(x);
        let mut out = DMatrix::zeros(self.r, self.r);
        for (m, &vi) in mats.iter().zip(v) {
            out += m * vi;
        }
        out
    }

    pub fn eval_curvature(&self, x: &[f64], u: &[f64], v: &[f64]) -> DMatrix<f64> {
        (self.curv)(x, u, v)
    }

    pub fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.r, self.r)
    }
}

// ---------------------------------------------------------------------------
// Parallel transport.
// ---------------------------------------------------------------------------

fn rk4_step(
    conn: &ConnectionData,
    path: &Path,
    t: f64,
    h: f64,
    p: &DMatrix<f64>,
) -> DMatrix<f64> {
    let f = |t: f64, p: &DMatrix<f64>| -> DMatrix<f64> {
        let x = path.at(t);
        let v = path.velocity(t);
        -(conn.eval_a(&x, &v) * p)
    };
    let k1 = f(t, p);
    let k2 = f(t + 0.5 * h, &(p + &k1 * (0.5 * h)));
    let k3 = f(t + 0.5 * h, &(p + &k2 * (0.5 * h)));
    let k4 = f(t + h, &(p + &k3 * h));
    p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Parallel transport `P(b)` solving `P'(t) = -A(gamma(t))(gamma'(t)) P(t)`
/// with `P(a) = I`, by fixed-step RK4; `a > b` integrates backwards.
pub fn parallel_transport(
    conn: &ConnectionData,
    path: &Path,
    a: f64,
    b: f64,
    step: f64,
) -> DMatrix<f64> {
    assert!(step > 0.0);
    let mut p = conn.identity();
    if (a - b).abs() < f64::EPSILON {
        return p;
    }
    let nsteps = ((b - a).abs() / step).ceil().max(1.0) as usize;
    let h = (b - a) / nsteps as f64;
    let mut t = a;
    for _ in 0..nsteps {
        for v in p.iter() {
            assert!(v.is_finite(), "nonfinite parallel transport value");
        }
        p = rk4_step(conn, path, t, h, &p);
        t += h;
    }
    p
}

/// Dense forward-transport grid along a fixed path: stores `T(t) = P_{0->t}`
/// at grid nodes so that `P_{b->a} = T(a) T(b)^{-1}` is available at
/// arbitrary times with at most one local RK4 step off the grid.
pub struct DenseTransport {
    conn: ConnectionData,
    path: Path,
    step: f64,
    grid: Vec<DMatrix<f64>>,
}

impl DenseTransport {
    pub fn new(conn: &ConnectionData, path: &Path, step: f64) -> Self {
        let n = (1.0 / step).ceil() as usize;
        let h = 1.0 / n as f64;
        let mut grid = Vec::with_capacity(n + 1);
        let mut p = conn.identity();
        grid.push(p.clone());
        for i in 0..n {
            p = rk4_step(conn, path, i as f64 * h, h, &p);
            grid.push(p.clone());
        }
        DenseTransport { conn: conn.clone(), path: path.clone(), step: h, grid }
    }

    /// `T(t) = P_{0->t}`.
    pub fn forward(&self, t: f64) -> DMatrix<f64> {
        let idx = ((t / self.step).floor() as usize).min(self.grid.len() - 1);
        let t0 = idx as f64 * self.step;
        let mut p = self.grid[idx].clone();
        if t - t0 > 1e-14 {
            p = rk4_step(&self.conn, &self.path, t0, t - t0, &p);
        }
        p
    }

    /// `P_{b->a} = T(a) T(b)^{-1}` (transport from time `b` to time `a`).
    pub fn between(&self, b: f64, a: f64) -> DMatrix<f64> {
        let tb = self.forward(b);
        let inv = tb.clone().try_inverse().expect("transport is invertible");
        self.forward(a) * inv
    }
}

// ---------------------------------------------------------------------------
// Quadrature.
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on `[0, 1]`, computed by Newton
/// iteration on the Legendre polynomial.
pub fn gauss_legendre_01(order: usize) -> Vec<(f64, f64)> {
    assert!(order >= 1);
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Initial guess (Chebyshev-like) for the i-th root on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let dpn = n as f64 * (x * pn - p0) / (x * x - 1.0);
            let dx = pn / dpn;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let pn = if n == 1 { x } else { p1 };
        let dpn = n as f64 * (x * pn - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dpn * dpn);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Iterated Gauss-Legendre quadrature over the ordered simplex
/// `0 <= t_1 <= ... <= t_n <= 1`.
pub fn simplex_quadrature<T>(
    n: usize,
    order: usize,
    zero: T,
    add_scaled: impl Fn(&mut T, &T, f64),
    integrand: impl Fn(&[f64]) -> T,
) -> T {
    let nodes = gauss_legendre_01(order);
    let mut tvec = vec![0.0; n];
    let mut acc = zero;
    // Recursive descent from the outermost variable t_n down to t_1.
    fn rec<T>(
        level: usize,
        upper: f64,
        weight: f64,
        nodes: &[(f64, f64)],
        tvec: &mut Vec<f64>,
        acc: &mut T,
        add_scaled: &impl Fn(&mut T, &T, f64),
        integrand: &impl Fn(&[f64]) -> T,
    ) {
        if level == 0 {
            let val = integrand(tvec);
            add_scaled(acc, &val, weight);
            return;
        }
        for &(x, w) in nodes {
            tvec[level - 1] = upper * x;
            rec(level - 1, upper * x, weight * w * upper, nodes, tvec, acc, add_scaled, integrand);
        }
    }
    rec(n, 1.0, 1.0, &nodes, &mut tvec, &mut acc, &add_scaled, &integrand);
    acc
}

/// Simplex quadrature specialized to matrix-valued integrands.
pub fn simplex_quadrature_matrix(
    n: usize,
    order: usize,
    r: usize,
    integrand: impl Fn(&[f64]) -> DMatrix<f64>,
) -> DMatrix<f64> {
    simplex_quadrature(
        n,
        order,
        DMatrix::zeros(r, r),
        |acc, v, w| *acc += v * w,
        integrand,
    )
}

// ---------------------------------------------------------------------------
// Sparse exterior algebra with matrix coefficients.
// ---------------------------------------------------------------------------

/// An element of the exterior algebra over anticommuting generators (bits of
/// a mask) with `r x r` matrix coefficients; generator bits `0..n` are the
/// simplex differentials `dt_1..dt_n` and bits `n..n+q` the path-space
/// arguments `theta_1..theta_q`.
#[derive(Clone, Debug)]
pub struct ExtMat {
    pub r: usize,
    pub terms: HashMap<u32, DMatrix<f64>>,
}

impl ExtMat {
    pub fn zero(r: usize) -> Self {
        ExtMat { r, terms: HashMap::new() }
    }

    pub fn unit(r: usize) -> Self {
        let mut e = ExtMat::zero(r);
        e.add_term(0, DMatrix::identity(r, r));
        e
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        let r = m.nrows();
        let mut e = ExtMat::zero(r);
        e.add_term(0, m);
        e
    }

    pub fn add_term(&mut self, mask: u32, m: DMatrix<f64>) {
        if m.iter().all(|v| *v == 0.0) {
            return;
        }
        *self.terms.entry(mask).or_insert_with(|| DMatrix::zeros(self.r, self.r)) += m;
    }

    pub fn mul(&self, other: &ExtMat) -> ExtMat {
        let mut out = ExtMat::zero(self.r);
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                if let Some(sign) = merge_sign(*ma, *mb) {
                    out.add_term(ma | mb, a * b * sign as f64);
                }
            }
        }
        out
    }

    /// Right-multiply every coefficient by a degree-0 matrix.
    pub fn mul_matrix(&self, m: &DMatrix<f64>) -> ExtMat {
        ExtMat {
            r: self.r,
            terms: self.terms.iter().map(|(k, a)| (*k, a * m)).collect(),
        }
    }

    pub fn coeff(&self, mask: u32) -> DMatrix<f64> {
        self.terms.get(&mask).cloned().unwrap_or_else(|| DMatrix::zeros(self.r, self.r))
    }
}

/// Evaluate a symbolic matrix form at a point, pulling each `dx^i` back to
/// the 1-form `sum_g dirs[g].1[i] * e_{dirs[g].0}` over the exterior
/// generators.  `dirs` lists `(generator bit index, direction vector)`.
pub fn eval_form_pulled_back(
    form: &FormElement<Rat>,
    x: &[f64],
    dirs: &[(u32, Vec<f64>)],
) -> ExtMat {
    let r = form.matrix_size();
    let mut out = ExtMat::zero(r);
    for (mask, m) in form.terms() {
        let mat = m.eval_f64(x);
        // Expand the wedge of pulled-back dx factors as a scalar exterior
        // element, then attach the matrix coefficient.
        let mut scalar: HashMap<u32, f64> = HashMap::new();
        scalar.insert(0, 1.0);
        let mut bits = *mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let mut next: HashMap<u32, f64> = HashMap::new();
            for (mk, c) in &scalar {
                for (g, v) in dirs {
                    let comp = v[i];
                    if comp == 0.0 {
                        continue;
                    }
                    let gb = 1u32 << g;
                    if let Some(sign) = merge_sign(*mk, gb) {
                        *next.entry(mk | gb).or_insert(0.0) += c * comp * sign as f64;
                    }
                }
            }
            scalar = next;
        }
        for (mk, c) in scalar {
            if c != 0.0 {
                out.add_term(mk, &mat * c);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Transport derivative (holonomy-derivative formula).
// ---------------------------------------------------------------------------

/// Numerical options shared by the evaluators.
#[derive(Clone, Copy, Debug)]
pub struct ItOptions {
    pub ode_step: f64,
    pub quad_order: usize,
    pub fd_step: f64,
}

impl Default for ItOptions {
    fn default() -> Self {
        ItOptions { ode_step: 1e-3, quad_order: 8, fd_step: 1e-4 }
    }
}

/// Right side of the holonomy-derivative formula:
/// `int_a^b P_{t->b} R(gamma'(t), X(t)) P_{a->t} dt`.
pub fn transport_derivative(
    conn: &ConnectionData,
    path: &Path,
    field: &TangentField,
    a: f64,
    b: f64,
    opts: &ItOptions,
) -> DMatrix<f64> {
    let dt = DenseTransport::new(conn, path, opts.ode_step);
    let nodes = gauss_legendre_01(opts.quad_order.max(12));
    let mut out = DMatrix::zeros(conn.r, conn.r);
    for &(xn, w) in &nodes {
        let t = a + (b - a) * xn;
        let x = path.at(t);
        let rmat = conn.eval_curvature(&x, &path.velocity(t), &field.at(t));
        out += dt.between(t, b) * rmat * dt.between(a, t) * (w * (b - a));
    }
    out
}

/// Finite-difference covariant derivative of the parallel transport
/// `P_{a->b}` along the path family `gamma + s X` (the left side of the
/// holonomy-derivative formula), with fiber conjugation along the endpoint
/// curves folded in via the closed-loop construction.
pub fn transport_derivative_fd(
    conn: &ConnectionData,
    path: &Path,
    field: &TangentField,
    a: f64,
    b: f64,
    opts: &ItOptions,
) -> DMatrix<f64> {
    let h = opts.fd_step;
    let eval = |s: f64| -> DMatrix<f64> {
        let gs = path.deformed(field, s);
        // Conjugate End-valued data back to the fibers over gamma(a), gamma(b):
        // transport down the straight deformation segments at the endpoints.
        let seg = |t: f64| -> Path {
            let base = path.at(t);
            let dir = field.at(t);
            let dir2 = dir.clone();
            Path::from_maps(
                base.len(),
                move |u| base.iter().zip(&dir).map(|(x, d)| x + u * d).collect(),
                move |_| dir2.clone(),
            )
        };
        let down_b = parallel_transport(conn, &seg(b), s, 0.0, opts.ode_step.min(h));
        let up_a = parallel_transport(conn, &seg(a), 0.0, s, opts.ode_step.min(h));
        down_b * parallel_transport(conn, &gs, a, b, opts.ode_step) * up_a
    };
    (eval(h) - eval(-h)) / (2.0 * h)
}

// ---------------------------------------------------------------------------
// The curved Chen iterated integral.
// ---------------------------------------------------------------------------

fn time_value(i: usize, p: usize, n: usize, tvec: &[f64]) -> (usize, f64) {
    // Time index of slot (i, p): zigs read left-to-right, zags right-to-left.
    let m = if i % 2 == 1 { p } else { n + 1 - p };
    let t = if m == 0 {
        0.0
    } else if m == n + 1 {
        1.0
    } else {
        tvec[m - 1]
    };
    (m, t)
}

fn slot_dirs(
    m: usize,
    t: f64,
    n: usize,
    path: &Path,
    fields: &[TangentField],
) -> Vec<(u32, Vec<f64>)> {
    let mut dirs = Vec::with_capacity(1 + fields.len());
    // dt_m component: the endpoint times t_0 = 0 and t_{n+1} = 1 are fixed.
    if m >= 1 && m <= n {
        dirs.push(((m - 1) as u32, path.velocity(t)));
    }
    for (j, f) in fields.iter().enumerate() {
        dirs.push(((n + j) as u32, f.at(t)));
    }
    dirs
}

/// The curved zigzag Chen map evaluated at a path on tangent fields: for
/// each monomial the slot forms are pulled back at their column times,
/// multiplied in path order with parallel transports in between, the top
/// exterior coefficient is integrated over the ordered simplex, and the
/// rational coefficients extend linearly.
pub fn evaluate_it(
    conn: &ConnectionData,
    x: &ZzElement<FormElement<Rat>>,
    path: &Path,
    fields: &[TangentField],
    opts: &ItOptions,
) -> DMatrix<f64> {
    let q = fields.len();
    let mut out = DMatrix::zeros(conn.r, conn.r);
    if x.terms.is_empty() {
        return out;
    }
    let dt = DenseTransport::new(conn, path, opts.ode_step);
    let full_mask = |n: usize| -> u32 { (1u32 << (n + q)) - 1 };
    for (mono, coeff) in &x.terms {
        let n = mono.n;
        let degsum: usize = mono.entries.iter().map(|(_, d)| *d).sum();
        assert_eq!(
            degsum as isize - n as isize,
            q as isize,
            "arity mismatch: monomial of degree {} on {} tangent fields",
            degsum as isize - n as isize,
            q
        );
        let integrand = |tvec: &[f64]| -> DMatrix<f64> {
            // Times of path-order slots: slot 0, then rows 1..k, slots 1..n+1.
            let mut times = Vec::with_capacity(mono.entries.len());
            times.push(0.0f64);
            for i in 1..=mono.k {
                for p in 1..=(n + 1) {
                    times.push(time_value(i, p, n, tvec).1);
                }
            }
            let mut acc = ExtMat::unit(conn.r);
            for (s, (e, _)) in mono.entries.iter().enumerate() {
                let t = times[s];
                let m_idx = if s == 0 {
                    0
                } else {
                    let i = (s - 1) / (n + 1) + 1;
                    let p = (s - 1) % (n + 1) + 1;
                    time_value(i, p, n, tvec).0
                };
                let xpt = path.at(t);
                let dirs = slot_dirs(m_idx, t, n, path, fields);
                let slot = eval_form_pulled_back(e, &xpt, &dirs);
                acc = acc.mul(&slot);
                if s + 1 < mono.entries.len() {
                    // Transport from the next slot's time back to this one.
                    acc = acc.mul_matrix(&dt.between(times[s + 1], t));
                }
            }
            acc.coeff(full_mask(n))
        };
        let val = simplex_quadrature_matrix(n, opts.quad_order, conn.r, integrand);
        out += val * rat_to_f64(coeff);
    }
    out
}

// ---------------------------------------------------------------------------
// Covariant derivatives on path space by finite differences.
// ---------------------------------------------------------------------------

/// An evaluator of an `End(E)_{gamma(0)}`-valued q-form on path space.
pub type PathForm<'a> = dyn Fn(&Path, &[TangentField]) -> DMatrix<f64> + 'a;

/// Directional covariant derivative of `F` along the deformation
/// `gamma + s X`, with fiber conjugation along the basepoint curve
/// `s -> gamma(0) + s X(0)`; central difference in `s`.
pub fn covariant_derivative_fd(
    conn: &ConnectionData,
    f: &PathForm<'_>,
    path: &Path,
    x_field: &TangentField,
    rest: &[TangentField],
    opts: &ItOptions,
) -> DMatrix<f64> {
    let h = opts.fd_step;
    assert!(h > 0.0, "finite-difference step must be positive");
    let x0 = path.at(0.0);
    let dir0 = x_field.at(0.0);
    let moving = dir0.iter().any(|v| v.abs() > 0.0);
    let eval = |s: f64| -> DMatrix<f64> {
        let gs = path.deformed(x_field, s);
        let raw = f(&gs, rest);
        if !moving {
            return raw;
        }
        let seg = Path::from_maps(
            x0.len(),
            {
                let (x0, dir0) = (x0.clone(), dir0.clone());
                move |u| x0.iter().zip(&dir0).map(|(a, b)| a + u * b).collect()
            },
            {
                let dir0 = dir0.clone();
                move |_| dir0.clone()
            },
        );
        let adj = parallel_transport(conn, &seg, s, 0.0, opts.ode_step.min(h.abs()));
        let inv = adj.clone().try_inverse().expect("transport invertible");
        adj * raw * inv
    };
    (eval(h) - eval(-h)) / (2.0 * h)
}

/// The covariant exterior derivative of a q-form evaluator on `q + 1`
/// tangent fields, using the invariant formula (the supplied fields are
/// coordinate fields of the affine path space, so all brackets vanish).
pub fn covariant_exterior_derivative(
    conn: &ConnectionData,
    f: &PathForm<'_>,
    path: &Path,
    fields: &[TangentField],
    opts: &ItOptions,
) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(conn.r, conn.r);
    for i in 0..fields.len() {
        let rest: Vec<TangentField> = fields
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, f)| f.clone())
            .collect();
        let term = covariant_derivative_fd(conn, f, path, &fields[i], &rest, opts);
        out += term * if i % 2 == 0 { 1.0 } else { -1.0 };
    }
    out
}

// ---------------------------------------------------------------------------
// Chain-map / algebra-map checks.
// ---------------------------------------------------------------------------

/// Relative deviation between two matrices on a unit-floor scale.
pub fn relative_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.amax().max(b.amax()).max(1.0);
    (a - b).amax() / scale
}

/// Compares `It(D_z x)` against `nabla-tilde(It(x))` on the given fields.
pub fn check_chain_map(
    carrier: &MatrixFormCdga,
    conn: &ConnectionData,
    x: &ZzElement<FormElement<Rat>>,
    path: &Path,
    fields: &[TangentField],
    opts: &ItOptions,
) -> (DMatrix<f64>, DMatrix<f64>, f64) {
    let dx = crate::zigzag::d_z(carrier, x);
    let lhs = evaluate_it(conn, &dx, path, fields, opts);
    let f = |p: &Path, fs: &[TangentField]| evaluate_it(conn, x, p, fs, opts);
    let rhs = covariant_exterior_derivative(conn, &f, path, fields, opts);
    let err = relative_error(&lhs, &rhs);
    (lhs, rhs, err)
}

/// Compares `It(x shuffle y)` against the wedge of the two evaluators.
pub fn check_algebra_map(
    carrier: &MatrixFormCdga,
    conn: &ConnectionData,
    x: &ZzElement<FormElement<Rat>>,
    y: &ZzElement<FormElement<Rat>>,
    path: &Path,
    fields: &[TangentField],
    opts: &ItOptions,
) -> (DMatrix<f64>, DMatrix<f64>, f64) {
    let qx = element_arity(carrier, x).expect("x must be homogeneous");
    let qy = element_arity(carrier, y).expect("y must be homogeneous");
    assert_eq!(qx + qy, fields.len());
    let xy = crate::zigzag::shuffle(carrier, x, y);
    let lhs = evaluate_it(conn, &xy, path, fields, opts);
    let mut rhs = DMatrix::zeros(conn.r, conn.r);
    for sigma in enumerate_shuffles(qx, qy) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (f, &is_left) in fields.iter().zip(sigma.mask()) {
            if is_left {
                left.push(f.clone());
            } else {
                right.push(f.clone());
            }
        }
        let vx = evaluate_it(conn, x, path, &left, opts);
        let vy = evaluate_it(conn, y, path, &right, opts);
        rhs += vx * vy * sigma.sign() as f64;
    }
    let err = relative_error(&lhs, &rhs);
    (lhs, rhs, err)
}

/// The path-space arity (degree) of a homogeneous zigzag element.
pub fn element_arity(
    carrier: &MatrixFormCdga,
    x: &ZzElement<FormElement<Rat>>,
) -> Option<usize> {
    let _ = carrier;
    let mut arity = None;
    for (m, _) in &x.terms {
        let degsum: usize = m.entries.iter().map(|(_, d)| *d).sum();
        let d = degsum as isize - m.n as isize;
        if d < 0 {
            return None;
        }
        match arity {
            None => arity = Some(d as usize),
            Some(a) if a == d as usize => {}
            _ => return None,
        }
    }
    arity
}

// ---------------------------------------------------------------------------
// Fiber-integration Stokes check (exact, on the toy bundle [0,1] x R^d).
// ---------------------------------------------------------------------------

/// Exact verification of the bundle Stokes formula
/// `(-1) nabla int_F omega = int_F (p* nabla) omega - int_{dF} omega`
/// for the fiber `F = [0,1]` over `R^d`.  The total space is `R^{d+1}` with
/// `t` as the last coordinate; the connection is pulled back from the base.
/// Returns `(lhs, rhs)` as base forms; they are equal iff the formula holds.
pub fn fiber_integration_stokes(
    base: &MatrixFormCdga,
    omega_total: &FormElement<Rat>,
) -> (FormElement<Rat>, FormElement<Rat>) {
    let d = base.dim();
    let r = base.matrix_size();
    assert_eq!(omega_total.dim(), d + 1);
    assert_eq!(omega_total.matrix_size(), r);
    // Total-space carrier: same connection matrices, no dt component, and
    // coefficients independent of t by construction of the caller's omega.
    let total = MatrixFormCdga::new(d + 1, r, extend_form_dim(base.connection(), d));
    let tbit = 1u32 << d;

    let lhs = base
        .nabla(&fiber_integrate(omega_total, d))
        .scale(&crate::ring::rat(-1));
    let d_omega = total.nabla(omega_total);
    let boundary = restrict_t(omega_total, d, &crate::ring::rat(1))
        .sub(&restrict_t(omega_total, d, &crate::ring::rat(0)));
    let rhs = fiber_integrate(&d_omega, d).sub(&boundary);
    let _ = tbit;
    (lhs, rhs)
}

/// Reinterpret a base form on `R^d` as a form on `R^{d+1}` (t appended as
/// the last variable, unused).
pub fn extend_form_dim(form: &FormElement<Rat>, d: usize) -> FormElement<Rat> {
    let r = form.matrix_size();
    let mut out = FormElement::zero(d + 1, r);
    for (mask, m) in form.terms() {
        let mut m2 = crate::matrix::MatrixPoly::zero(r, d + 1);
        for i in 0..r {
            for j in 0..r {
                let p = m.entry(i, j);
                let mut p2 = crate::poly::Polynomial::zero(d + 1);
                for (e, c) in p.terms() {
                    let mut e2 = e.clone();
                    e2.push(0);
                    p2 = p2.add(&crate::poly::Polynomial::monomial(d + 1, e2, c.clone()));
                }
                m2.set_entry(i, j, p2);
            }
        }
        out = out.add(&FormElement::from_term(d + 1, r, *mask, m2));
    }
    out
}

/// Exact fiber integration over `t in [0,1]` (t = last coordinate): keeps
/// the `dt`-carrying terms, moves `dt` to the front (sign `(-1)^{|I|}`),
/// and integrates the coefficient polynomial in `t`.
pub fn fiber_integrate(form: &FormElement<Rat>, d: usize) -> FormElement<Rat> {
    let r = form.matrix_size();
    let tbit = 1u32 << d;
    let mut out = FormElement::zero(d, r);
    for (mask, m) in form.terms() {
        if mask & tbit == 0 {
            continue;
        }
        let base_mask = mask & !tbit;
        // dt is the highest generator: moving it to the front crosses all
        // base generators in the term.
        let sign = if (base_mask.count_ones() as usize) % 2 == 0 {
            crate::ring::rat(1)
        } else {
            crate::ring::rat(-1)
        };
        let mut m2 = crate::matrix::MatrixPoly::zero(r, d);
        for i in 0..r {
            for j in 0..r {
                let p = m.entry(i, j).definite_integral_01(d);
                m2.set_entry(i, j, drop_last_var(&p, d).scale(&sign));
            }
        }
        out = out.add(&FormElement::from_term(d, r, base_mask, m2));
    }
    out
}

/// Restrict a total-space form to `t = value`, discarding `dt` terms.
pub fn restrict_t(form: &FormElement<Rat>, d: usize, value: &Rat) -> FormElement<Rat> {
    let r = form.matrix_size();
    let tbit = 1u32 << d;
    let mut out = FormElement::zero(d, r);
    for (mask, m) in form.terms() {
        if mask & tbit != 0 {
            continue;
        }
        let mut m2 = crate::matrix::MatrixPoly::zero(r, d);
        for i in 0..r {
            for j in 0..r {
                let p = m.entry(i, j).substitute(d, value);
                m2.set_entry(i, j, drop_last_var(&p, d));
            }
        }
        out = out.add(&FormElement::from_term(d, r, *mask, m2));
    }
    out
}

fn drop_last_var(p: &crate::poly::Polynomial<Rat>, d: usize) -> crate::poly::Polynomial<Rat> {
    let mut out = crate::poly::Polynomial::zero(d);
    for (e, c) in p.terms() {
        assert_eq!(e[d], 0, "coefficient still depends on the fiber variable");
        out = out.add(&crate::poly::Polynomial::monomial(d, e[..d].to_vec(), c.clone()));
    }
    out
}

// ---------------------------------------------------------------------------
// Shrinking homotopy check.
// ---------------------------------------------------------------------------

/// Numerically verifies `id* - (i ev_0)* = nabla-tilde h + h nabla-tilde`
/// with `h = int_{[0,1]} F*` for the stopping homotopy `F(s, gamma)(t) =
/// gamma(min(s, t))`, on a 1-form evaluator.  Returns `(lhs, rhs, error)`.
pub fn shrink_homotopy_check(
    conn: &ConnectionData,
    omega: &PathForm<'_>,
    path: &Path,
    field: &TangentField,
    opts: &ItOptions,
) -> (DMatrix<f64>, DMatrix<f64>, f64) {
    let r = conn.r;
    // Left side: id* - (i ev_0)*.
    let const_path = Path::constant(path.at(0.0));
    let const_field = TangentField::constant(field.at(0.0));
    let lhs = omega(path, std::slice::from_ref(field))
        - omega(&const_path, std::slice::from_ref(&const_field));

    // h(omega): a 0-form evaluator, integrated over the homotopy parameter.
    // The pushforward of d/ds along the stopping map is the field
    // t -> gamma'(s) for t >= s (zero before).
    let h_omega = |p: &Path, _fs: &[TangentField]| -> DMatrix<f64> {
        let p = p.clone();
        simplex_quadrature(
            1,
            opts.quad_order,
            DMatrix::zeros(r, r),
            |acc: &mut DMatrix<f64>, v, w| *acc += v * w,
            |tv: &[f64]| {
                let s = tv[0];
                let stopped = p.stopped(s);
                let vs = push_forward_ds(&p, s);
                omega(&stopped, &[vs])
            },
        )
    };
    // nabla-tilde(h omega) along the field.
    let nabla_h = covariant_derivative_fd(conn, &h_omega, path, field, &[], opts);

    // h(nabla-tilde omega): integrate the 2-form nabla-tilde(omega) at the
    // stopped path on (d/ds pushforward, stopped field).
    let h_nabla = simplex_quadrature(
        1,
        opts.quad_order,
        DMatrix::zeros(r, r),
        |acc: &mut DMatrix<f64>, v, w| *acc += v * w,
        |tv: &[f64]| {
            let s = tv[0];
            let stopped = path.stopped(s);
            let vs = push_forward_ds(path, s);
            let xs = field.stopped(s);
            covariant_exterior_derivative(conn, omega, &stopped, &[vs, xs], opts)
        },
    );
    let rhs = nabla_h + h_nabla;
    let err = relative_error(&lhs, &rhs);
    (lhs, rhs, err)
}

/// The pushforward of the homotopy direction `d/ds` at parameter `s`: the
/// field `t -> gamma'(s)` supported on `t >= s`.
fn push_forward_ds(path: &Path, s: f64) -> TangentField {
    let v = path.velocity(s);
    let dim = path.dim;
    TangentField::from_maps(
        dim,
        move |t| if t >= s { v.clone() } else { vec![0.0; dim] },
        move |_| vec![0.0; dim],
    )
}

// ---------------------------------------------------------------------------
// Classical scalar Chen map and the collapse triangle.
// ---------------------------------------------------------------------------

/// The classical Chen iterated integral of a bar element over scalar flat
/// forms: `int_{Delta^n} ev*(l (x) c_1..c_n (x) r)` with the left entry at
/// time 0, slot `i` at `t_i`, and the right entry at time 1.
pub fn scalar_bar_it(
    x: &BarElement<FormElement<Rat>>,
    path: &Path,
    fields: &[TangentField],
    opts: &ItOptions,
) -> f64 {
    let q = fields.len();
    let mut out = 0.0;
    for (mono, coeff) in &x.terms {
        assert_eq!(mono.left.0.matrix_size(), 1, "scalar carrier required");
        let n = mono.n();
        let degsum: usize = mono.entries().map(|(_, d)| *d).sum();
        assert_eq!(degsum as isize - n as isize, q as isize, "arity mismatch");
        let full = (1u32 << (n + q)) - 1;
        let integrand = |tvec: &[f64]| -> DMatrix<f64> {
            let eval_at = |e: &FormElement<Rat>, m: usize| -> ExtMat {
                let t = if m == 0 {
                    0.0
                } else if m == n + 1 {
                    1.0
                } else {
                    tvec[m - 1]
                };
                let xpt = path.at(t);
                let dirs = slot_dirs(m, t, n, path, fields);
                eval_form_pulled_back(e, &xpt, &dirs)
            };
            let mut acc = eval_at(&mono.left.0, 0);
            for (i, (e, _)) in mono.slots.iter().enumerate() {
                acc = acc.mul(&eval_at(e, i + 1));
            }
            acc = acc.mul(&eval_at(&mono.right.0, n + 1));
            acc.coeff(full)
        };
        let val = simplex_quadrature_matrix(n, opts.quad_order, 1, integrand);
        out += val[(0, 0)] * rat_to_f64(coeff);
    }
    out
}

/// Compares `evaluate_it(x)` with `scalar_bar_it(Col(x))` for a zigzag
/// element over scalar flat forms.
pub fn triangle_check(
    carrier: &MatrixFormCdga,
    x: &ZzElement<FormElement<Rat>>,
    path: &Path,
    fields: &[TangentField],
    opts: &ItOptions,
) -> (f64, f64, f64) {
    assert_eq!(carrier.matrix_size(), 1);
    let conn = ConnectionData::from_cdga(carrier);
    let lhs = evaluate_it(&conn, x, path, fields, opts)[(0, 0)];
    let bar = crate::bar::col_collapse(carrier, x);
    let rhs = scalar_bar_it(&bar, path, fields, opts);
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    (lhs, rhs, (lhs - rhs).abs() / scale)
}

/// Matrix exponential by scaled Taylor series (for the constant-connection
/// transport oracle).
pub fn matrix_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    let r = a.nrows();
    let norm = a.amax();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut term = DMatrix::identity(r, r);
    let mut sum = DMatrix::identity(r, r);
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = &out * &out;
    }
    out
}
