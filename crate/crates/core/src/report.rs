//! Machine-readable verification reports and the suite runners behind the
//! CLI subcommands.
//!
//! A [`Report`] serializes to a stable JSON schema: suite name, seed,
//! instance, environment metadata, the frozen sign-convention digest, and an
//! ordered list of per-check results.  Running a suite twice with the same
//! config and seed produces byte-identical JSON.

use crate::bar::{bar_differential, bar_shuffle, col_collapse};
use crate::cdga::{
    check_curved_dga_axioms, make_matrix_form_cdga, make_tensor_algebra_cdga, CurvedDga,
    MatrixFormCdga,
};
use crate::cohomology::{curved_cohomology, maximal_subdga_cohomology, TruncationWindow};
use crate::form::FormElement;
use crate::pathspace::{
    check_algebra_map, check_chain_map, evaluate_it, eval_form_pulled_back,
    fiber_integration_stokes, transport_derivative, transport_derivative_fd, triangle_check,
    ConnectionData, ItOptions, Path, TangentField,
};
use crate::ring::{rat, Rat};
use crate::zigzag::{
    alpha, commutator_even, d_z, eta, normalize, r_z, random_monomial, s_homotopy, shuffle,
    ZzElement, ZzMonomial,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// The frozen sign conventions, in canonical text form.  Any change to a
/// sign in the algebra invalidates this text and therefore every previously
/// produced report (the digest is embedded in each report).  The same text
/// appears in `SIGNS.md` at the repository root.
pub const SIGN_CONVENTIONS: &str = "\
zigzag nabla_z at slot s: (-1)^(n + prefix_degree(s)), prefix degrees unshifted
zigzag b_z face l in 0..n: (-1)^(n + l)
zigzag c_(j,l): (-1)^(n + l + [j even])
zigzag shuffle: prefactor (-1)^((sum deg x + n) m) * sgn(sigma), zags reversed
zigzag homotopy s: no extra sign
bar differential slot s: (-1)^(n + prefix_degree(s)), prefix includes left entry
bar face l in 0..n: (-1)^(n + l)
bar shuffle: prefactor (-1)^((|lx|+|rx|+Sx+n)m + |ly|(|rx|+Sx) + |rx| Sy), per-sigma sgn(sigma) * koszul(plain slot degrees)
col collapse: koszul sign of the regrouping permutation with plain degrees
transport ODE: P'(t) = -A(gamma(t))(gamma'(t)) P(t), P(a) = I
iterated integral: path-ordered product with P_(t_(s+1) -> t_s) between consecutive slots
";

/// SHA-256 digest (hex) of the frozen sign-convention text.
pub fn sign_convention_digest() -> String {
    let mut h = Sha256::new();
    h.update(SIGN_CONVENTIONS.as_bytes());
    format!("{:x}", h.finalize())
}

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Config.
// ---------------------------------------------------------------------------

/// Tolerances for the numeric suites.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub transport: f64,
    pub stokes: f64,
    pub eta: f64,
    pub chain_map: f64,
    pub algebra_map: f64,
    pub triangle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            transport: 1e-4,
            stokes: 1e-8,
            eta: 1e-6,
            chain_map: 1e-2,
            algebra_map: 1e-3,
            triangle: 1e-3,
        }
    }
}

/// Cohomology truncation window.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowConfig {
    pub max_degree: usize,
    pub poly_cap: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { max_degree: 4, poly_cap: 2 }
    }
}

/// Structured configuration for all suites (TOML on disk).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Carrier selector: "matrix-form" or "tensor".
    pub instance: String,
    pub seed: u64,
    /// Even column counts for zigzag sampling.
    pub k_values: Vec<usize>,
    /// Zigzag widths run from 0 to this bound.
    pub n_max: usize,
    /// Trials per symbolic check cell.
    pub trials: usize,
    /// Fixture count per numeric check.
    pub fixtures: usize,
    pub max_entry_degree: usize,
    pub ode_step: f64,
    pub quad_order: usize,
    pub fd_step: f64,
    pub tolerances: Tolerances,
    pub window: WindowConfig,
    /// Negative-control hook: deliberately flip a sign in the Thm 4.5 check
    /// so the report demonstrably catches convention drift.
    pub inject_sign_fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            instance: "matrix-form".into(),
            seed: 42,
            k_values: vec![2, 4],
            n_max: 2,
            trials: 20,
            fixtures: 5,
            max_entry_degree: 2,
            ode_step: 1e-3,
            quad_order: 8,
            fd_step: 1e-4,
            tolerances: Tolerances::default(),
            window: WindowConfig::default(),
            inject_sign_fault: false,
        }
    }
}

/// Errors turning user input into a runnable configuration.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl SuiteConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.instance != "matrix-form" && self.instance != "tensor" {
            return Err(ConfigError::Invalid(format!(
                "unknown instance '{}' (expected 'matrix-form' or 'tensor')",
                self.instance
            )));
        }
        if self.k_values.iter().any(|k| k % 2 != 0 || *k < 2) {
            return Err(ConfigError::Invalid("k values must be even and >= 2".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("transport", t.transport),
            ("stokes", t.stokes),
            ("eta", t.eta),
            ("chain_map", t.chain_map),
            ("algebra_map", t.algebra_map),
            ("triangle", t.triangle),
        ] {
            if v <= 0.0 {
                return Err(ConfigError::Invalid(format!("tolerance {name} must be positive")));
            }
        }
        if self.ode_step <= 0.0 || self.fd_step <= 0.0 || self.quad_order == 0 {
            return Err(ConfigError::Invalid("numeric steps must be positive".into()));
        }
        Ok(())
    }

    pub fn it_options(&self) -> ItOptions {
        ItOptions { ode_step: self.ode_step, quad_order: self.quad_order, fd_step: self.fd_step }
    }
}

// ---------------------------------------------------------------------------
// Report schema.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn exact(name: &str, trials: usize, counterexample: Option<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: if counterexample.is_none() { "pass" } else { "fail" }.into(),
            max_error: None,
            tolerance: None,
            trials,
            detail: counterexample,
        }
    }

    pub fn numeric(name: &str, trials: usize, max_error: f64, tol: f64) -> Self {
        CheckResult {
            name: name.into(),
            status: if max_error <= tol { "pass" } else { "fail" }.into(),
            max_error: Some(max_error),
            tolerance: Some(tol),
            trials,
            detail: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub instance: String,
    pub seed: u64,
    pub sign_convention_digest: String,
    pub environment: Environment,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

impl Report {
    fn assemble(suite: &str, cfg: &SuiteConfig, checks: Vec<CheckResult>) -> Report {
        let all_pass = checks.iter().all(|c| c.passed());
        Report {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            instance: cfg.instance.clone(),
            seed: cfg.seed,
            sign_convention_digest: sign_convention_digest(),
            environment: Environment::current(),
            checks,
            all_pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable one-line-per-check rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite: {} (instance {}, seed {})\n", self.suite, self.instance, self.seed));
        out.push_str(&format!("signs: {}\n", self.sign_convention_digest));
        for c in &self.checks {
            let err = match (c.max_error, c.tolerance) {
                (Some(e), Some(t)) => format!("  max_err {:.3e} (tol {:.1e})", e, t),
                _ => String::new(),
            };
            out.push_str(&format!("{:50} [{}]{}\n", c.name, c.status.to_uppercase(), err));
            if let Some(d) = &c.detail {
                out.push_str(&format!("    {}\n", d));
            }
        }
        out.push_str(if self.all_pass { "result: PASS\n" } else { "result: FAIL\n" });
        out
    }
}

// ---------------------------------------------------------------------------
// verify-zigzag: the exact symbolic suite.
// ---------------------------------------------------------------------------

pub fn run_verify_zigzag(cfg: &SuiteConfig) -> Report {
    let checks = match cfg.instance.as_str() {
        "tensor" => {
            let c = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
            zigzag_checks(&c, cfg)
        }
        _ => {
            let c = make_matrix_form_cdga();
            zigzag_checks(&c, cfg)
        }
    };
    Report::assemble("verify-zigzag", cfg, checks)
}

fn zigzag_checks<C: CurvedDga>(c: &C, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    // Curved DGA axioms on random homogeneous samples.
    let ax = check_curved_dga_axioms(c, 2, cfg.trials.max(10), &mut rng);
    checks.push(CheckResult::exact(
        "axioms: Leibniz, nabla^2 = [R,-], Bianchi",
        cfg.trials.max(10),
        if ax.all_hold() { None } else { Some(format!("{:?}", ax)) },
    ));

    // D_z^2 = [R_z, -] per (k, n) cell.
    let rz = r_z(c);
    let mut counter = None;
    let mut cells = 0;
    for &k in &cfg.k_values {
        for n in 0..=cfg.n_max {
            for _ in 0..cfg.trials {
                cells += 1;
                let m = random_monomial(c, k, n, cfg.max_entry_degree, &mut rng);
                let x = normalize(c, vec![(m.clone(), rat(1))]);
                let lhs = d_z(c, &d_z(c, &x));
                let mut rhs = commutator_even(c, &rz, &x);
                if cfg.inject_sign_fault {
                    rhs = rhs.neg();
                }
                if lhs != rhs && counter.is_none() {
                    counter = Some(format!("counterexample monomial (k={k}, n={n}): {:?}", m));
                }
            }
        }
    }
    checks.push(CheckResult::exact("Thm 4.5: D_z^2 = [R_z, -]", cells, counter));

    // Leibniz of D_z over the shuffle product, and associativity.
    let mut counter = None;
    for trial in 0..cfg.trials {
        let x = random_zz(c, cfg, &mut rng);
        let y = random_zz(c, cfg, &mut rng);
        let z = random_zz(c, cfg, &mut rng);
        if let Some(dx) = x.degree() {
            let lhs = d_z(c, &shuffle(c, &x, &y));
            let sign = if dx.rem_euclid(2) == 0 { rat(1) } else { rat(-1) };
            let rhs = shuffle(c, &d_z(c, &x), &y).add(&shuffle(c, &x, &d_z(c, &y)).scale(&sign));
            if lhs != rhs && counter.is_none() {
                counter = Some(format!("Leibniz fails on trial {trial}"));
            }
        }
        let assoc_l = shuffle(c, &shuffle(c, &x, &y), &z);
        let assoc_r = shuffle(c, &x, &shuffle(c, &y, &z));
        if assoc_l != assoc_r && counter.is_none() {
            counter = Some(format!("associativity fails on trial {trial}"));
        }
    }
    checks.push(CheckResult::exact(
        "Prop 4.4: Leibniz and associativity of the shuffle product",
        cfg.trials,
        counter,
    ));

    // alpha o eta = id and the homotopy identity.
    let mut counter = None;
    for trial in 0..cfg.trials {
        let w = c.random_homogeneous(rng.gen_range(0..=2), &mut rng);
        let round = alpha(c, &eta(c, &w));
        if !c.is_zero(&c.sub(&round, &w)) && counter.is_none() {
            counter = Some(format!("alpha(eta(w)) != w on trial {trial}"));
        }
        let x = random_zz(c, cfg, &mut rng);
        let lhs = x.sub(&eta(c, &alpha(c, &x)));
        let rhs = d_z(c, &s_homotopy(c, &x)).add(&s_homotopy(c, &d_z(c, &x)));
        if lhs != rhs && counter.is_none() {
            counter = Some(format!("homotopy identity fails on trial {trial}"));
        }
    }
    checks.push(CheckResult::exact(
        "Prop 4.8: alpha o eta = id and the contracting homotopy",
        cfg.trials,
        counter,
    ));

    // Normalization confluence: unit-pair insertions and scalar moves
    // rewrite to identical normal forms.
    let mut counter = None;
    for trial in 0..cfg.trials.max(50) {
        let m = random_monomial(c, cfg.k_values[0], rng.gen_range(0..=cfg.n_max), 1, &mut rng);
        let base = normalize(c, vec![(m.clone(), rat(1))]);
        let mut moved = m.clone();
        let mut coeff = rat(1);
        for _ in 0..rng.gen_range(1..=3) {
            match rng.gen_range(0..2) {
                0 => {
                    let j = 2 * rng.gen_range(0..=moved.k / 2);
                    moved = insert_unit_pair(c, &moved, j);
                }
                _ => {
                    // Pull a scalar out of one entry into the coefficient.
                    let pos = rng.gen_range(0..moved.entries.len());
                    let s = rat(*[2i64, 3, -2].get(rng.gen_range(0..3)).unwrap());
                    let (e, d) = moved.entries[pos].clone();
                    moved.entries[pos] = (c.scale(&s, &e), d);
                    coeff = coeff * rat(1) / s;
                }
            }
        }
        let rewritten = normalize(c, vec![(moved, coeff)]);
        if base != rewritten && counter.is_none() {
            counter = Some(format!("confluence fails on trial {trial}: {:?}", m));
        }
    }
    checks.push(CheckResult::exact(
        "normalization confluence under rewriting moves",
        cfg.trials.max(50),
        counter,
    ));

    checks
}

fn random_zz<C: CurvedDga>(c: &C, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> ZzElement<C::Elem> {
    let k = cfg.k_values[rng.gen_range(0..cfg.k_values.len())];
    let n = rng.gen_range(0..=cfg.n_max.min(2));
    crate::zigzag::random_element(c, k, n, 1, rng)
}

/// Insert an all-unit zig/zag pair at even height `j` (a rewriting move that
/// must not change the normal form).
pub fn insert_unit_pair<C: CurvedDga>(
    c: &C,
    m: &ZzMonomial<C::Elem>,
    j: usize,
) -> ZzMonomial<C::Elem> {
    assert!(j % 2 == 0 && j <= m.k);
    let width = m.n + 1;
    let mut entries = m.entries.clone();
    let at = 1 + j * width;
    let units: Vec<(C::Elem, usize)> = vec![(c.unit(), 0); 2 * width];
    entries.splice(at..at, units);
    ZzMonomial { k: m.k + 2, n: m.n, entries }
}

// ---------------------------------------------------------------------------
// verify-pathspace: the numeric suite.
// ---------------------------------------------------------------------------

pub fn run_verify_pathspace(cfg: &SuiteConfig) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let c = make_matrix_form_cdga();
    let conn = ConnectionData::from_cdga(&c);
    let opts = cfg.it_options();
    let mut checks = Vec::new();

    // Prop 5.3: holonomy derivative vs curvature integral.
    let mut max_err: f64 = 0.0;
    for _ in 0..cfg.fixtures.max(3) {
        let g = random_path(&mut rng);
        let x = random_field(&mut rng);
        let lhs = transport_derivative_fd(&conn, &g, &x, 0.0, 1.0, &opts);
        let rhs = transport_derivative(&conn, &g, &x, 0.0, 1.0, &opts);
        max_err = max_err.max(crate::pathspace::relative_error(&lhs, &rhs));
    }
    checks.push(CheckResult::numeric(
        "Prop 5.3: derivative of parallel transport",
        cfg.fixtures.max(3),
        max_err,
        cfg.tolerances.transport,
    ));

    // Prop 5.1: fiber-integration Stokes on the toy bundle (exact).
    let mut counter = None;
    for trial in 0..cfg.fixtures.max(3) {
        let omega = random_total_space_form(&c, &mut rng);
        let (lhs, rhs) = fiber_integration_stokes(&c, &omega);
        if lhs != rhs && counter.is_none() {
            counter = Some(format!("Stokes fails on fixture {trial}"));
        }
    }
    checks.push(CheckResult::exact(
        "Prop 5.1: Stokes with bundle coefficients (exact)",
        cfg.fixtures.max(3),
        counter,
    ));

    // Thm 5.13: It(eta(omega)) = ev_0^* omega.
    let mut max_err: f64 = 0.0;
    for _ in 0..cfg.fixtures.max(3) {
        let g = random_path(&mut rng);
        let deg = rng.gen_range(1..=2);
        let w = c.random_homogeneous(deg, &mut rng);
        let x = eta(&c, &w);
        let fields: Vec<TangentField> = (0..deg).map(|_| random_field(&mut rng)).collect();
        let got = evaluate_it(&conn, &x, &g, &fields, &opts);
        let dirs: Vec<(u32, Vec<f64>)> =
            fields.iter().enumerate().map(|(j, f)| (j as u32, f.at(0.0))).collect();
        let want = eval_form_pulled_back(&w, &g.at(0.0), &dirs).coeff((1u32 << deg) - 1);
        max_err = max_err.max(crate::pathspace::relative_error(&got, &want));
    }
    checks.push(CheckResult::numeric(
        "Thm 5.13: It o eta is evaluation at the starting point",
        cfg.fixtures.max(3),
        max_err,
        cfg.tolerances.eta,
    ));

    // Prop 5.10: chain map, with the convergence gate.
    let fixtures = chain_map_fixtures(&c, &mut rng);
    let mut max_err: f64 = 0.0;
    let mut max_err_refined: f64 = 0.0;
    let refined = ItOptions {
        ode_step: opts.ode_step / 2.0,
        quad_order: opts.quad_order + 2,
        fd_step: opts.fd_step,
    };
    for (x, g, fields) in &fixtures {
        let (_, _, err) = check_chain_map(&c, &conn, x, g, fields, &opts);
        max_err = max_err.max(err);
        let (_, _, err2) = check_chain_map(&c, &conn, x, g, fields, &refined);
        max_err_refined = max_err_refined.max(err2);
    }
    checks.push(CheckResult::numeric(
        "Prop 5.10: It is a chain map",
        fixtures.len(),
        max_err,
        cfg.tolerances.chain_map,
    ));
    checks.push(CheckResult::numeric(
        "Prop 5.10: convergence gate (refined steps)",
        fixtures.len(),
        max_err_refined,
        cfg.tolerances.chain_map,
    ));

    // Prop 5.12: algebra map.
    let mut max_err: f64 = 0.0;
    let mut trials = 0;
    for _ in 0..cfg.fixtures.max(3) {
        let g = random_path(&mut rng);
        let x = random_arity_element(&c, 1, 0, &mut rng);
        let y = random_arity_element(&c, 0, 0, &mut rng);
        let f = random_field(&mut rng);
        let (_, _, err) = check_algebra_map(&c, &conn, &x, &y, &g, &[f], &opts);
        max_err = max_err.max(err);
        trials += 1;
    }
    // The flat scalar pair from the introduction.
    {
        let sc = MatrixFormCdga::scalar_flat(2);
        let sconn = ConnectionData::from_cdga(&sc);
        let g = random_path(&mut rng);
        let x = scalar_one_form_column(&sc, 0);
        let y = scalar_one_form_column(&sc, 1);
        let (_, _, err) = check_algebra_map(&sc, &sconn, &x, &y, &g, &[], &opts);
        max_err = max_err.max(err);
        trials += 1;
    }
    checks.push(CheckResult::numeric(
        "Prop 5.12: It is an algebra map",
        trials,
        max_err,
        cfg.tolerances.algebra_map,
    ));

    // Prop 6.4 triangle over the scalar flat carrier, plus the exact
    // Prop 6.2 chain/algebra identities for the collapse map.
    let sc = MatrixFormCdga::scalar_flat(2);
    let mut max_err: f64 = 0.0;
    for _ in 0..cfg.fixtures.max(3) {
        let g = random_path(&mut rng);
        let q = rng.gen_range(0..=1);
        let x = random_arity_element(&sc, q, 1, &mut rng);
        let fields: Vec<TangentField> = (0..q).map(|_| random_field(&mut rng)).collect();
        let (_, _, err) = triangle_check(&sc, &x, &g, &fields, &opts);
        max_err = max_err.max(err);
    }
    checks.push(CheckResult::numeric(
        "Prop 6.4: It factors through the collapse map",
        cfg.fixtures.max(3),
        max_err,
        cfg.tolerances.triangle,
    ));
    let mut counter = None;
    for trial in 0..cfg.trials.min(20) {
        let x = random_zz(&sc, cfg, &mut rng);
        let lhs = col_collapse(&sc, &d_z(&sc, &x));
        let rhs = bar_differential(&sc, &col_collapse(&sc, &x));
        if lhs != rhs && counter.is_none() {
            counter = Some(format!("Col chain-map fails on trial {trial}"));
        }
        let y = random_zz(&sc, cfg, &mut rng);
        let lhs = col_collapse(&sc, &shuffle(&sc, &x, &y));
        let rhs = bar_shuffle(&sc, &col_collapse(&sc, &x), &col_collapse(&sc, &y));
        if lhs != rhs && counter.is_none() {
            counter = Some(format!("Col algebra-map fails on trial {trial}"));
        }
    }
    checks.push(CheckResult::exact(
        "Prop 6.2: collapse is a map of differential graded algebras (exact)",
        cfg.trials.min(20),
        counter,
    ));

    Report::assemble("verify-pathspace", cfg, checks)
}

pub fn random_path(rng: &mut ChaCha8Rng) -> Path {
    let coeff = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..3).map(|_| rng.gen_range(-0.8..0.8)).collect()
    };
    Path::polynomial(vec![coeff(rng), coeff(rng)])
}

pub fn random_field(rng: &mut ChaCha8Rng) -> TangentField {
    if rng.gen_bool(0.5) {
        TangentField::bump(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
    } else {
        let coeff = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..2).map(|_| rng.gen_range(-0.8..0.8)).collect()
        };
        TangentField::polynomial(vec![coeff(rng), coeff(rng)])
    }
}

/// A normalized zigzag element of shape (2, n) whose path-space arity is
/// exactly `q` (slot degrees sum to n + q).
pub fn random_arity_element(
    c: &MatrixFormCdga,
    q: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> ZzElement<FormElement<Rat>> {
    let slots = 1 + 2 * (n + 1);
    loop {
        let mut degs = vec![0usize; slots];
        let mut left = n + q;
        let mut guard = 0;
        while left > 0 && guard < 1000 {
            let i = rng.gen_range(0..slots);
            if degs[i] < c.dim() {
                degs[i] += 1;
                left -= 1;
            }
            guard += 1;
        }
        if left > 0 {
            continue;
        }
        let entries: Vec<(FormElement<Rat>, usize)> = degs
            .iter()
            .map(|&d| {
                if d == 0 && rng.gen_bool(0.6) {
                    (c.unit(), 0)
                } else {
                    (c.random_homogeneous(d, rng), d)
                }
            })
            .collect();
        let mono = ZzMonomial { k: 2, n, entries };
        let x = normalize(c, vec![(mono, rat(1))]);
        if !x.is_zero() {
            return x;
        }
    }
}

/// The single-column element `1 (x) (dx_axis or x_0 dx_axis) (x) 1 ...` over
/// a scalar flat carrier: the classical length-one iterated integral.
pub fn scalar_one_form_column(c: &MatrixFormCdga, axis: usize) -> ZzElement<FormElement<Rat>> {
    use crate::matrix::MatrixPoly;
    let alpha = if axis == 0 {
        FormElement::from_term(2, 1, 0b01, MatrixPoly::identity(1, 2))
    } else {
        FormElement::from_term(
            2,
            1,
            0b10,
            MatrixPoly::from_entries(1, 2, vec![crate::poly::Polynomial::var(2, 0, rat(1))]),
        )
    };
    let mono = ZzMonomial {
        k: 2,
        n: 1,
        entries: vec![(c.unit(), 0), (alpha, 1), (c.unit(), 0), (c.unit(), 0), (c.unit(), 0)],
    };
    normalize(c, vec![(mono, rat(1))])
}

/// Chain-map fixtures covering n <= 2, q <= 2, including c_z-active shapes
/// (every n >= 0 monomial feeds the c_z term through the curved carrier).
pub fn chain_map_fixtures(
    c: &MatrixFormCdga,
    rng: &mut ChaCha8Rng,
) -> Vec<(ZzElement<FormElement<Rat>>, Path, Vec<TangentField>)> {
    let mut out = Vec::new();
    for (n, q) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)] {
        let x = random_arity_element(c, q, n, rng);
        let g = random_path(rng);
        let fields: Vec<TangentField> = (0..q + 1).map(|_| random_field(rng)).collect();
        out.push((x, g, fields));
    }
    out
}

/// Random symbolic form on the toy total space `[0,1] x R^2` (t is the last
/// variable) mixing dt-carrying and dt-free terms.
pub fn random_total_space_form(c: &MatrixFormCdga, rng: &mut ChaCha8Rng) -> FormElement<Rat> {
    use crate::matrix::MatrixPoly;
    use crate::poly::Polynomial;
    let d = c.dim();
    let r = c.matrix_size();
    let nv = d + 1;
    let rand_poly = |rng: &mut ChaCha8Rng| -> Polynomial<Rat> {
        let mut p = Polynomial::zero(nv);
        for _ in 0..rng.gen_range(1..=2) {
            let expo: Vec<u16> = (0..nv).map(|_| rng.gen_range(0..=2u16)).collect();
            let coeff = rat(*[-2i64, -1, 1, 2, 3].get(rng.gen_range(0..5)).unwrap());
            p = p.add(&Polynomial::monomial(nv, expo, coeff));
        }
        p
    };
    let mut out = FormElement::zero(nv, r);
    for mask in [1u32 << d, (1 << d) | 0b01, 0b01, 0b10, 0b11, (1 << d) | 0b10] {
        if rng.gen_bool(0.6) {
            let mut m = MatrixPoly::zero(r, nv);
            for i in 0..r {
                for j in 0..r {
                    if rng.gen_bool(0.5) {
                        m.set_entry(i, j, rand_poly(rng));
                    }
                }
            }
            out = out.add(&FormElement::from_term(nv, r, mask, m));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// cohomology: the dimension-table suite.
// ---------------------------------------------------------------------------

pub fn run_cohomology(cfg: &SuiteConfig) -> Report {
    let w = TruncationWindow {
        max_degree: cfg.window.max_degree,
        poly_cap: cfg.window.poly_cap,
    };
    let mut checks = Vec::new();
    match cfg.instance.as_str() {
        "tensor" => {
            let a = make_tensor_algebra_cdga(2, vec![rat(1), rat(0)]);
            let rep = curved_cohomology(&a, &w);
            let table: Vec<String> = rep
                .degrees
                .iter()
                .map(|s| format!("H^{} = {} (of {})", s.degree, s.dim_h, s.dim_total))
                .collect();
            let h0_ok = rep.degrees[0].dim_h == 1;
            checks.push(CheckResult::exact(
                "H^0_cur(T(V), [v,-], v(x)v) has dimension 1",
                1,
                if h0_ok { None } else { Some(table.join("; ")) },
            ));
            let mut counter = None;
            for s in rep.degrees.iter().skip(1) {
                if s.dim_h >= 2usize.pow(s.degree as u32) && counter.is_none() {
                    counter = Some(format!("degree {}: dim {} not strict", s.degree, s.dim_h));
                }
            }
            checks.push(CheckResult::exact(
                "dim H^k_cur < 2^k for k = 1..max_degree",
                w.max_degree,
                counter,
            ));
            let sub = maximal_subdga_cohomology(&a, &w);
            let mut counter = None;
            for (cs, ss) in rep.degrees.iter().zip(&sub.degrees) {
                if cs.dim_h != ss.dim_h && counter.is_none() {
                    counter = Some(format!(
                        "degree {}: curved {} vs sub-DGA {}",
                        cs.degree, cs.dim_h, ss.dim_h
                    ));
                }
            }
            checks.push(CheckResult::exact(
                "Prop 3.3: maximal sub-DGA computes the same dimensions",
                w.max_degree + 1,
                counter,
            ));
            let mut table_check = CheckResult::exact("dimension table", rep.degrees.len(), None);
            table_check.detail = Some(table.join("; "));
            checks.push(table_check);
        }
        _ => {
            let c = make_matrix_form_cdga();
            let wm = TruncationWindow {
                max_degree: cfg.window.max_degree.min(2),
                poly_cap: cfg.window.poly_cap,
            };
            let rep = curved_cohomology(&c, &wm);
            let table: Vec<String> = rep
                .degrees
                .iter()
                .map(|s| format!("H^{} = {} (of {})", s.degree, s.dim_h, s.dim_total))
                .collect();
            use crate::matrix::MatrixPoly;
            let m = MatrixPoly::from_i64(2, 2, &[0, 0, 1, 0]);
            let omega = FormElement::from_term(2, 2, 0b01, m.clone())
                .add(&FormElement::from_term(2, 2, 0b10, m));
            let closed = crate::cohomology::is_curved_closed(&c, &wm, &omega, 1).is_some();
            let exact = crate::cohomology::is_curved_exact(&c, &wm, &omega, 1).is_some();
            checks.push(CheckResult::exact(
                "Example 3.7: omega is curved-closed and not exact (H^1 >= 1)",
                1,
                if closed && !exact && rep.degrees[1].dim_h >= 1 {
                    None
                } else {
                    Some(format!("closed={closed} exact={exact}; {}", table.join("; ")))
                },
            ));
            let sub = maximal_subdga_cohomology(&c, &wm);
            let mut counter = None;
            for (cs, ss) in rep.degrees.iter().zip(&sub.degrees) {
                if cs.dim_h != ss.dim_h && counter.is_none() {
                    counter = Some(format!(
                        "degree {}: curved {} vs sub-DGA {}",
                        cs.degree, cs.dim_h, ss.dim_h
                    ));
                }
            }
            checks.push(CheckResult::exact(
                "Prop 3.3: maximal sub-DGA computes the same dimensions",
                wm.max_degree + 1,
                counter,
            ));
            let mut table_check = CheckResult::exact("dimension table", rep.degrees.len(), None);
            table_check.detail = Some(table.join("; "));
            checks.push(table_check);
        }
    }
    Report::assemble("cohomology", cfg, checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_hex() {
        let d = sign_convention_digest();
        assert_eq!(d.len(), 64);
        assert_eq!(d, sign_convention_digest());
    }

    #[test]
    fn config_parses_and_validates() {
        let cfg = SuiteConfig::from_toml_str("instance = \"tensor\"\nseed = 7\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(SuiteConfig::from_toml_str("instance = \"nope\"").is_err());
        assert!(SuiteConfig::from_toml_str("k_values = [3]").is_err());
        assert!(SuiteConfig::from_toml_str("[tolerances]\nchain_map = -1.0").is_err());
    }

    #[test]
    fn zigzag_suite_passes_and_is_deterministic() {
        let mut cfg = SuiteConfig::default();
        cfg.instance = "tensor".into();
        cfg.trials = 5;
        cfg.n_max = 1;
        let a = run_verify_zigzag(&cfg);
        let b = run_verify_zigzag(&cfg);
        assert!(a.all_pass, "{}", a.to_text());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn sign_fault_is_caught_with_counterexample() {
        let mut cfg = SuiteConfig::default();
        cfg.instance = "tensor".into();
        cfg.trials = 5;
        cfg.n_max = 1;
        cfg.inject_sign_fault = true;
        let rep = run_verify_zigzag(&cfg);
        assert!(!rep.all_pass);
        let failing = rep.checks.iter().find(|c| !c.passed()).unwrap();
        assert!(failing.detail.as_deref().unwrap_or("").contains("counterexample"));
    }

    #[test]
    fn cohomology_suite_passes_on_both_instances() {
        let mut cfg = SuiteConfig::default();
        cfg.instance = "tensor".into();
        let rep = run_cohomology(&cfg);
        assert!(rep.all_pass, "{}", rep.to_text());
        cfg.instance = "matrix-form".into();
        let rep = run_cohomology(&cfg);
        assert!(rep.all_pass, "{}", rep.to_text());
    }

    #[test]
    fn pathspace_suite_small_config_passes() {
        let mut cfg = SuiteConfig::default();
        cfg.fixtures = 3;
        cfg.trials = 5;
        cfg.n_max = 1;
        let rep = run_verify_pathspace(&cfg);
        assert!(rep.all_pass, "{}", rep.to_text());
    }
}
