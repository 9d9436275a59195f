//! Acceptance suite: one pass/fail line per criterion, printed in order.
//!
//! Each criterion is checked at its stated sample count and tolerance; the
//! single test fails iff any criterion fails, after all lines are printed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zigzag_core::bar::{bar_differential, bar_shuffle, col_collapse};
use zigzag_core::cdga::{
    check_curved_dga_axioms, make_matrix_form_cdga, make_tensor_algebra_cdga, CurvedDga,
    MatrixFormCdga,
};
use zigzag_core::cohomology::{
    curved_cohomology, is_curved_closed, is_curved_exact, maximal_subdga_cohomology,
    TruncationWindow,
};
use zigzag_core::form::FormElement;
use zigzag_core::matrix::MatrixPoly;
use zigzag_core::pathspace::{
    check_algebra_map, check_chain_map, evaluate_it, eval_form_pulled_back,
    fiber_integration_stokes, relative_error, transport_derivative, transport_derivative_fd,
    triangle_check, ConnectionData, ItOptions, TangentField,
};
use zigzag_core::report::{
    chain_map_fixtures, insert_unit_pair, random_arity_element, random_field, random_path,
    random_total_space_form, run_verify_zigzag, scalar_one_form_column, SuiteConfig,
};
use zigzag_core::ring::rat;
use zigzag_core::zigzag::{
    alpha, commutator_even, d_z, eta, normalize, r_z, random_element, random_monomial,
    s_homotopy, shuffle,
};

struct Tally {
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        println!("[{}] {}{}", if ok { "PASS" } else { "FAIL" }, name, detail);
        if !ok {
            self.failures.push(name.to_string());
        }
    }
}

#[test]
fn acceptance_criteria() {
    let mut t = Tally { failures: Vec::new() };

    criterion_curvature_value(&mut t);
    criterion_axioms(&mut t);
    criterion_dz_squared(&mut t);
    criterion_leibniz_assoc(&mut t);
    criterion_homotopy(&mut t);
    criterion_confluence(&mut t);
    criterion_cohomology(&mut t);
    criterion_transport_derivative(&mut t);
    criterion_stokes(&mut t);
    criterion_eta_evaluation(&mut t);
    criterion_chain_map(&mut t);
    criterion_algebra_map(&mut t);
    criterion_triangle(&mut t);
    criterion_determinism(&mut t);

    assert!(t.failures.is_empty(), "failing criteria: {:?}", t.failures);
}

/// Example 2.6: R = 2 diag(1, -1) dx ^ dy, exactly.
fn criterion_curvature_value(t: &mut Tally) {
    let c = make_matrix_form_cdga();
    let expect = FormElement::from_term(2, 2, 0b11, MatrixPoly::from_i64(2, 2, &[2, 0, 0, -2]));
    t.record(
        "curvature value: Example 2.6 gives R = 2 diag(1,-1) dx^dy (exact)",
        c.curvature() == expect,
        String::new(),
    );
}

/// Curved DGA axioms on >= 200 samples per shipped instance, exact.
fn criterion_axioms(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let a = make_matrix_form_cdga();
    let b = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
    let ra = check_curved_dga_axioms(&a, 2, 200, &mut rng);
    let rb = check_curved_dga_axioms(&b, 3, 200, &mut rng);
    t.record(
        "curved DGA axioms (Def 2.1): 200 samples per instance (exact)",
        ra.all_hold() && rb.all_hold(),
        String::new(),
    );
}

/// Thm 4.5: D_z^2 = [R_z, -] on (k, n) in {2,4} x {0,1,2}, >= 50 monomials
/// per cell, both carriers, exact.
fn criterion_dz_squared(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut ok = true;
    let mut detail = String::new();
    let a = make_matrix_form_cdga();
    let b = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
    for carrier in 0..2 {
        for &k in &[2usize, 4] {
            for n in 0..=2usize {
                for _ in 0..50 {
                    let holds = if carrier == 0 {
                        let x = random_element(&a, k, n, 1, &mut rng);
                        d_z(&a, &d_z(&a, &x)) == commutator_even(&a, &r_z(&a), &x)
                    } else {
                        let x = random_element(&b, k, n, 2, &mut rng);
                        d_z(&b, &d_z(&b, &x)) == commutator_even(&b, &r_z(&b), &x)
                    };
                    if !holds && ok {
                        ok = false;
                        detail = format!("  first failure: carrier {carrier}, k={k}, n={n}");
                    }
                }
            }
        }
    }
    t.record(
        "Thm 4.5: D_z^2 = [R_z,-] on {2,4}x{0,1,2}, 50/cell, both carriers (exact)",
        ok,
        detail,
    );
}

/// Prop 4.4: Leibniz of D_z over the shuffle and associativity, >= 50
/// random pairs/triples, exact.
fn criterion_leibniz_assoc(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let c = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
    let mut ok = true;
    for _ in 0..50 {
        let x = random_element(&c, 2, rng.gen_range(0..=2), 1, &mut rng);
        let y = random_element(&c, 2, rng.gen_range(0..=2), 1, &mut rng);
        let z = random_element(&c, 2, rng.gen_range(0..=1), 1, &mut rng);
        if let Some(dx) = x.degree() {
            let sign = if dx.rem_euclid(2) == 0 { rat(1) } else { rat(-1) };
            let lhs = d_z(&c, &shuffle(&c, &x, &y));
            let rhs =
                shuffle(&c, &d_z(&c, &x), &y).add(&shuffle(&c, &x, &d_z(&c, &y)).scale(&sign));
            ok &= lhs == rhs;
        }
        ok &= shuffle(&c, &shuffle(&c, &x, &y), &z) == shuffle(&c, &x, &shuffle(&c, &y, &z));
    }
    t.record(
        "Prop 4.4: Leibniz and associativity of the shuffle, 50 trials (exact)",
        ok,
        String::new(),
    );
}

/// Prop 4.8: alpha o eta = id and the homotopy identity, >= 100 monomials,
/// exact with the frozen global sign (+1).
fn criterion_homotopy(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let c = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
    let mut ok = true;
    for _ in 0..100 {
        let w = c.random_homogeneous(rng.gen_range(0..=2), &mut rng);
        ok &= c.is_zero(&c.sub(&alpha(&c, &eta(&c, &w)), &w));
        let k = if rng.gen_bool(0.6) { 2 } else { 4 };
        let x = random_element(&c, k, rng.gen_range(0..=2), 2, &mut rng);
        let lhs = x.sub(&eta(&c, &alpha(&c, &x)));
        let rhs = d_z(&c, &s_homotopy(&c, &x)).add(&s_homotopy(&c, &d_z(&c, &x)));
        ok &= lhs == rhs;
    }
    t.record(
        "Prop 4.8: alpha o eta = id and homotopy identity, 100 monomials (exact)",
        ok,
        String::new(),
    );
}

/// Normalization confluence: 500 (monomial, move-sequence) pairs, exact.
fn criterion_confluence(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let c = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
    let mut ok = true;
    for _ in 0..500 {
        let m = random_monomial(&c, 2, rng.gen_range(0..=2), 1, &mut rng);
        let base = normalize(&c, vec![(m.clone(), rat(1))]);
        let mut moved = m;
        let mut coeff = rat(1);
        for _ in 0..rng.gen_range(1..=3) {
            if rng.gen_bool(0.5) {
                let j = 2 * rng.gen_range(0..=moved.k / 2);
                moved = insert_unit_pair(&c, &moved, j);
            } else {
                let pos = rng.gen_range(0..moved.entries.len());
                let s = rat(*[2i64, 3, -2].get(rng.gen_range(0..3)).unwrap());
                let (e, d) = moved.entries[pos].clone();
                moved.entries[pos] = (c.scale(&s, &e), d);
                coeff = coeff * rat(1) / s;
            }
        }
        ok &= base == normalize(&c, vec![(moved, coeff)]);
    }
    t.record(
        "normalization confluence: 500 monomial/move-sequence pairs (exact)",
        ok,
        String::new(),
    );
}

/// Cohomology: tensor H^0 = 1 and dim H^k < 2^k for k = 1..4; Example 3.7
/// class nontrivial in window D = 3; Prop 3.3 agreement per degree, exact.
fn criterion_cohomology(t: &mut Tally) {
    let a = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
    let w = TruncationWindow { max_degree: 4, poly_cap: 0 };
    let rep = curved_cohomology(&a, &w);
    let mut ok = rep.degrees[0].dim_h == 1;
    for p in 1..=4usize {
        ok &= rep.degrees[p].dim_h < 2usize.pow(p as u32);
    }
    let sub = maximal_subdga_cohomology(&a, &w);
    for (cs, ss) in rep.degrees.iter().zip(&sub.degrees) {
        ok &= cs.dim_h == ss.dim_h;
    }
    let c = make_matrix_form_cdga();
    let wm = TruncationWindow { max_degree: 2, poly_cap: 3 };
    let m = MatrixPoly::from_i64(2, 2, &[0, 0, 1, 0]);
    let omega = FormElement::from_term(2, 2, 0b01, m.clone())
        .add(&FormElement::from_term(2, 2, 0b10, m));
    ok &= is_curved_closed(&c, &wm, &omega, 1).is_some();
    ok &= is_curved_exact(&c, &wm, &omega, 1).is_none();
    let repm = curved_cohomology(&c, &wm);
    ok &= repm.degrees[1].dim_h >= 1;
    let subm = maximal_subdga_cohomology(&c, &wm);
    for (cs, ss) in repm.degrees.iter().zip(&subm.degrees) {
        ok &= cs.dim_h == ss.dim_h;
    }
    t.record(
        "cohomology: H^0 = 1, dim H^k < 2^k (k=1..4), Example 3.7 class, Prop 3.3 (exact)",
        ok,
        String::new(),
    );
}

fn default_opts() -> ItOptions {
    ItOptions { ode_step: 1e-3, quad_order: 8, fd_step: 1e-4 }
}

/// Prop 5.3: transport derivative vs curvature integral, rel err <= 1e-4 on
/// >= 10 fixtures.
fn criterion_transport_derivative(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let c = make_matrix_form_cdga();
    let conn = ConnectionData::from_cdga(&c);
    let opts = default_opts();
    let mut max_err: f64 = 0.0;
    for _ in 0..10 {
        let g = random_path(&mut rng);
        let x = random_field(&mut rng);
        let lhs = transport_derivative_fd(&conn, &g, &x, 0.0, 1.0, &opts);
        let rhs = transport_derivative(&conn, &g, &x, 0.0, 1.0, &opts);
        max_err = max_err.max(relative_error(&lhs, &rhs));
    }
    t.record(
        "Prop 5.3: holonomy derivative, 10 fixtures, tol 1e-4",
        max_err <= 1e-4,
        format!("  max rel err {max_err:.3e}"),
    );
}

/// Prop 5.1: Stokes on the toy [0,1]-bundle, >= 10 symbolic fixtures; both
/// sides are computed exactly so agreement is within any tolerance.
fn criterion_stokes(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let c = make_matrix_form_cdga();
    let mut ok = true;
    for _ in 0..10 {
        let omega = random_total_space_form(&c, &mut rng);
        let (lhs, rhs) = fiber_integration_stokes(&c, &omega);
        ok &= lhs == rhs;
    }
    t.record(
        "Prop 5.1: bundle Stokes on [0,1] x R^2, 10 fixtures, tol 1e-8 (exact)",
        ok,
        String::new(),
    );
}

/// Thm 5.13: It(eta(omega)) = ev_0^* omega, 10 fixtures, tol 1e-6.
fn criterion_eta_evaluation(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let c = make_matrix_form_cdga();
    let conn = ConnectionData::from_cdga(&c);
    let opts = default_opts();
    let mut max_err: f64 = 0.0;
    for _ in 0..10 {
        let g = random_path(&mut rng);
        let deg = rng.gen_range(1..=2);
        let w = c.random_homogeneous(deg, &mut rng);
        let x = eta(&c, &w);
        let fields: Vec<TangentField> = (0..deg).map(|_| random_field(&mut rng)).collect();
        let got = evaluate_it(&conn, &x, &g, &fields, &opts);
        let dirs: Vec<(u32, Vec<f64>)> =
            fields.iter().enumerate().map(|(j, f)| (j as u32, f.at(0.0))).collect();
        let want = eval_form_pulled_back(&w, &g.at(0.0), &dirs).coeff((1u32 << deg) - 1);
        max_err = max_err.max(relative_error(&got, &want));
    }
    t.record(
        "Thm 5.13: It o eta = ev_0^*, 10 fixtures, tol 1e-6",
        max_err <= 1e-6,
        format!("  max rel err {max_err:.3e}"),
    );
}

/// Prop 5.10: chain map on fixtures with n <= 2, q <= 2 (c_z active through
/// the curved carrier), tol 1e-2, plus the refinement convergence gate.
fn criterion_chain_map(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let c = make_matrix_form_cdga();
    let conn = ConnectionData::from_cdga(&c);
    let opts = default_opts();
    let refined = ItOptions { ode_step: 5e-4, quad_order: 10, fd_step: 1e-4 };
    let fixtures = chain_map_fixtures(&c, &mut rng);
    let mut max_err: f64 = 0.0;
    let mut max_refined: f64 = 0.0;
    for (x, g, fields) in &fixtures {
        let (_, _, e) = check_chain_map(&c, &conn, x, g, fields, &opts);
        max_err = max_err.max(e);
        let (_, _, e2) = check_chain_map(&c, &conn, x, g, fields, &refined);
        max_refined = max_refined.max(e2);
    }
    t.record(
        "Prop 5.10: It chain map, n<=2 q<=2 fixtures incl. c_z-active, tol 1e-2",
        max_err <= 1e-2 && max_refined <= 1e-2,
        format!("  max rel err {max_err:.3e}; refined {max_refined:.3e}"),
    );
}

/// Prop 5.12: algebra map, >= 10 fixtures including the scalar flat pair,
/// tol 1e-3.
fn criterion_algebra_map(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let c = make_matrix_form_cdga();
    let conn = ConnectionData::from_cdga(&c);
    let opts = default_opts();
    let mut max_err: f64 = 0.0;
    for i in 0..9 {
        let g = random_path(&mut rng);
        let qx = i % 2;
        let x = random_arity_element(&c, qx, 0, &mut rng);
        let y = random_arity_element(&c, 0, 0, &mut rng);
        let fields: Vec<TangentField> = (0..qx).map(|_| random_field(&mut rng)).collect();
        let (_, _, e) = check_algebra_map(&c, &conn, &x, &y, &g, &fields, &opts);
        max_err = max_err.max(e);
    }
    // The scalar flat pair of classical length-one iterated integrals.
    let sc = MatrixFormCdga::scalar_flat(2);
    let sconn = ConnectionData::from_cdga(&sc);
    let g = random_path(&mut rng);
    let x = scalar_one_form_column(&sc, 0);
    let y = scalar_one_form_column(&sc, 1);
    let (_, _, e) = check_algebra_map(&sc, &sconn, &x, &y, &g, &[], &opts);
    max_err = max_err.max(e);
    t.record(
        "Prop 5.12: It algebra map, 10 fixtures incl. scalar flat pair, tol 1e-3",
        max_err <= 1e-3,
        format!("  max rel err {max_err:.3e}"),
    );
}

/// Prop 6.4: triangle through the collapse map on >= 20 scalar flat
/// fixtures, tol 1e-3; Prop 6.2 chain/algebra identities for Col, exact.
fn criterion_triangle(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let sc = MatrixFormCdga::scalar_flat(2);
    let opts = default_opts();
    let mut max_err: f64 = 0.0;
    for i in 0..20 {
        let g = random_path(&mut rng);
        let q = i % 2;
        let n = 1 + (i / 2) % 2;
        let x = random_arity_element(&sc, q, n, &mut rng);
        let fields: Vec<TangentField> = (0..q).map(|_| random_field(&mut rng)).collect();
        let (_, _, e) = triangle_check(&sc, &x, &g, &fields, &opts);
        max_err = max_err.max(e);
    }
    let mut exact_ok = true;
    for _ in 0..20 {
        let k = if rng.gen_bool(0.5) { 2 } else { 4 };
        let x = random_element(&sc, k, rng.gen_range(0..=2), 1, &mut rng);
        let y = random_element(&sc, 2, rng.gen_range(0..=1), 1, &mut rng);
        exact_ok &=
            col_collapse(&sc, &d_z(&sc, &x)) == bar_differential(&sc, &col_collapse(&sc, &x));
        exact_ok &= col_collapse(&sc, &shuffle(&sc, &x, &y))
            == bar_shuffle(&sc, &col_collapse(&sc, &x), &col_collapse(&sc, &y));
    }
    t.record(
        "Prop 6.4: It = bar It o Col, 20 fixtures, tol 1e-3; Prop 6.2 exact",
        max_err <= 1e-3 && exact_ok,
        format!("  max rel err {max_err:.3e}"),
    );
}

/// Determinism: same seed and config give byte-identical reports.
fn criterion_determinism(t: &mut Tally) {
    let mut cfg = SuiteConfig::default();
    cfg.instance = "tensor".into();
    cfg.trials = 5;
    cfg.n_max = 1;
    let a = run_verify_zigzag(&cfg).to_json();
    let b = run_verify_zigzag(&cfg).to_json();
    t.record("determinism: identical reports for one seed", a == b, String::new());
}
