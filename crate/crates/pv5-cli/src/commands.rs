use std::fmt::Display;

use num_complex::Complex64;
use pv5_closed_form::{closed_form_constructions, closed_form_monodromy, ClosedFormError};
use pv5_flow::{integrate_with, refine_with, FlowOptions, FlowState, RefineOptions, Refined};
use pv5_monodromy::{braid_shift, monodromy_with, MonodromyData, MonodromyOptions, StructuralDefects};
use pv5_series::{series_a_pair, Parameters};
use pv5_special::C2Matrix;
use pv5_tau::{bilinear_residual_with, dlog_tau_forms, dlog_tau_series, BilinearOptions};
use pv5_transcendents::{
    pv_residual_with, refine_lattice, y_series, yzu_from_matrices, zero_pole_seeds_with, ResidualOptions, RootKind,
    RootOptions, TranscendentError,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{matrix_doc, matrix_from_doc, MatrixDoc};
use crate::{CliError, Document, JobConfig, Outcome, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Numeric monodromy at `x` next to the closed form, with their entrywise gap.
    Monodromy,
    /// Transport the residues along `x`, `x_points` and sample them.
    Flow,
    /// y, z, u and d/dx log τ at each of `x_points`.
    Evaluate,
    /// Seeds and Newton-refined zeros of y over `m_range`.
    Zeros,
    /// Seeds and Newton-refined poles of y over `m_range`.
    Poles,
    /// Bilinear residual of the tau-function for each stencil step `h`.
    Tau,
    /// The invariant suite; exits with status 4 when any check fails.
    Verify,
    /// Apply `braid_steps` to a stored monodromy (closed form when none is stored).
    Braid,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Monodromy => "monodromy",
            Command::Flow => "flow",
            Command::Evaluate => "evaluate",
            Command::Zeros => "zeros",
            Command::Poles => "poles",
            Command::Tau => "tau",
            Command::Verify => "verify",
            Command::Braid => "braid",
        }
    }
}

/// Run one command. Numerical failures still yield a document, with the
/// message in its `error` field.
pub fn run(cmd: Command, cfg: &JobConfig) -> Outcome {
    let body = cfg.validate().and_then(|_| match cmd {
        Command::Monodromy => monodromy(cfg),
        Command::Flow => flow(cfg),
        Command::Evaluate => evaluate(cfg),
        Command::Zeros => lattice(cfg, RootKind::Zero),
        Command::Poles => lattice(cfg, RootKind::Pole),
        Command::Tau => tau(cfg),
        Command::Verify => verify(cfg),
        Command::Braid => braid(cfg),
    });
    let (result, table, status) = match body {
        Ok(Body { result, table, status }) => (result, table, status),
        Err(e) => (Value::Null, None, Err(e)),
    };
    let document = Document {
        command: cmd.name(),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        result,
        error: status.as_ref().err().map(|e| e.to_string()),
    };
    Outcome { document, table, status }
}

struct Body {
    result: Value,
    table: Option<Table>,
    status: Result<(), CliError>,
}

impl Body {
    fn ok(result: Value, table: Table) -> Result<Self, CliError> {
        Ok(Self { result, table: Some(table), status: Ok(()) })
    }
}

fn numerical(e: impl Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn cplx(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

fn refine(cfg: &JobConfig, x: Complex64) -> Result<Refined, CliError> {
    let mut o = RefineOptions::new(cfg.seed_radius, x, cfg.flow_tol);
    o.seed.truncation = cfg.truncation.into();
    o.convergence_check = cfg.convergence_check;
    o.exec = cfg.exec();
    refine_with(&cfg.params(), &o).map_err(numerical)
}

fn flow_summary(r: &Refined) -> Value {
    json!({
        "seed_truncation": r.seed_truncation,
        "convergence": r.convergence,
        "constraint_defect": r.state.constraint_defect(),
        "max_drift": r.report.max_drift,
        "arclength": r.report.arclength,
    })
}

#[derive(Serialize)]
struct Defects {
    det_m0: f64,
    det_mx: f64,
    trace_m0: f64,
    trace_mx: f64,
    product: f64,
    stokes_trace: f64,
}

impl Defects {
    const DET_TOL: f64 = 1e-10;
    const REST_TOL: f64 = 1e-8;

    fn of(md: &MonodromyData, p: &Parameters) -> (Self, bool) {
        let d: StructuralDefects = md.defects(p.theta0, p.thetax, p.thetainf);
        let ok = d.within(Self::DET_TOL, Self::REST_TOL);
        let doc = Self {
            det_m0: d.det_m0,
            det_mx: d.det_mx,
            trace_m0: d.trace_m0,
            trace_mx: d.trace_mx,
            product: d.product,
            stokes_trace: d.stokes_trace,
        };
        (doc, ok)
    }

    fn worst(&self) -> f64 {
        [self.det_m0, self.det_mx, self.trace_m0, self.trace_mx, self.product, self.stokes_trace]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize)]
struct MonodromyDoc {
    m0: MatrixDoc,
    mx: MatrixDoc,
    minf: MatrixDoc,
    s1: Complex64,
    s2: Complex64,
    defects: Defects,
    structural_ok: bool,
}

impl MonodromyDoc {
    fn new(md: &MonodromyData, p: &Parameters) -> Self {
        let (defects, structural_ok) = Defects::of(md, p);
        Self {
            m0: matrix_doc(&md.m0),
            mx: matrix_doc(&md.mx),
            minf: matrix_doc(&md.minf),
            s1: md.s1,
            s2: md.s2,
            defects,
            structural_ok,
        }
    }
}

fn monodromy_options(cfg: &JobConfig) -> MonodromyOptions {
    MonodromyOptions {
        radius: cfg.radius,
        richardson: cfg.richardson,
        tol: cfg.loop_tol,
        exec: cfg.exec(),
        ..MonodromyOptions::default()
    }
}

/// Largest entrywise gap in `M0` and `Mx`.
fn entry_gap(a: &MonodromyData, b: &MonodromyData) -> f64 {
    (a.m0 - b.m0).max_abs().max((a.mx - b.mx).max_abs())
}

fn monodromy(cfg: &JobConfig) -> Result<Body, CliError> {
    let p = cfg.params();
    let refined = refine(cfg, cfg.x)?;
    let report = monodromy_with(&refined.state, &monodromy_options(cfg)).map_err(numerical)?;
    let closed = closed_form_monodromy(&p).map_err(numerical)?;
    let gap = entry_gap(&report.data, &closed);
    let stokes_gap = (report.data.s1 - closed.s1).norm().max((report.data.s2 - closed.s2).norm());
    let mut table = Table::new(&["entry", "numeric_re", "numeric_im", "closed_re", "closed_im", "abs_diff"]);
    let names = ["m0_11", "m0_12", "m0_21", "m0_22", "mx_11", "mx_12", "mx_21", "mx_22", "s1", "s2"];
    let (n, c) = (report.data, closed);
    let pairs = n.m0.to_array().into_iter().chain(n.mx.to_array()).chain([n.s1, n.s2]).zip(
        c.m0.to_array().into_iter().chain(c.mx.to_array()).chain([c.s1, c.s2]),
    );
    for (name, (a, b)) in names.iter().zip(pairs) {
        let [ar, ai] = cplx(a);
        let [br, bi] = cplx(b);
        table.push(vec![name.to_string(), ar, ai, br, bi, num((a - b).norm())]);
    }
    let result = json!({
        "x": cfg.x,
        "numeric": MonodromyDoc::new(&report.data, &p),
        "closed_form": MonodromyDoc::new(&closed, &p),
        "max_entry_diff": gap,
        "stokes_diff": stokes_gap,
        "agreement_tol": cfg.agreement_tol,
        "within_tolerance": gap <= cfg.agreement_tol,
        "radius": report.radius,
        "radius_change": report.radius_change,
        "structural_tolerances": {"det": Defects::DET_TOL, "other": Defects::REST_TOL},
        "flow": flow_summary(&refined),
    });
    Body::ok(result, table)
}

const MATRIX_COLUMNS: [&str; 16] = [
    "a0_11_re", "a0_11_im", "a0_12_re", "a0_12_im", "a0_21_re", "a0_21_im", "a0_22_re", "a0_22_im", "ax_11_re",
    "ax_11_im", "ax_12_re", "ax_12_im", "ax_21_re", "ax_21_im", "ax_22_re", "ax_22_im",
];

fn flow(cfg: &JobConfig) -> Result<Body, CliError> {
    let refined = refine(cfg, cfg.x)?;
    let mut columns = vec!["x_re", "x_im"];
    columns.extend(MATRIX_COLUMNS);
    columns.push("constraint_defect");
    let mut table = Table::new(&columns);
    let opts = FlowOptions::with_tol(cfg.flow_tol);
    let mut samples = Vec::new();
    let mut state = refined.state;
    let mut status = Ok(());
    for (k, &x) in std::iter::once(&cfg.x).chain(&cfg.x_points).enumerate() {
        if k > 0 {
            match integrate_with(&state, &[x], &opts) {
                Ok((s, _)) => state = s,
                Err(e) => {
                    status = Err(CliError::Numerical(format!("transport to {x}: {e}")));
                    break;
                }
            }
        }
        let defect = state.constraint_defect();
        let mut row: Vec<String> = cplx(state.x).into();
        for z in state.a0.to_array().into_iter().chain(state.ax.to_array()) {
            row.extend(cplx(z));
        }
        row.push(num(defect));
        table.push(row);
        samples.push(json!({
            "x": state.x,
            "a0": matrix_doc(&state.a0),
            "ax": matrix_doc(&state.ax),
            "constraint_defect": defect,
        }));
    }
    let result = json!({ "flow": flow_summary(&refined), "samples": samples });
    Ok(Body { result, table: Some(table), status })
}

#[derive(Serialize)]
struct Evaluation {
    x: Complex64,
    y: Option<Complex64>,
    z: Complex64,
    u: Option<Complex64>,
    pole: bool,
    dlogtau: Complex64,
    dlogtau_forms_gap: f64,
    y_series: Option<Complex64>,
    dlogtau_series: Option<Complex64>,
    constraint_defect: f64,
}

fn finite(z: Complex64) -> Option<Complex64> {
    z.is_finite().then_some(z)
}

fn evaluate_at(cfg: &JobConfig, x: Complex64) -> Result<Evaluation, CliError> {
    let p = cfg.params();
    let state = refine(cfg, x)?.state;
    let pt = yzu_from_matrices(&state);
    let tau = dlog_tau_forms(&state).map_err(numerical)?;
    Ok(Evaluation {
        x,
        y: finite(pt.y),
        z: pt.z,
        u: finite(pt.u),
        pole: pt.pole,
        dlogtau: tau.value,
        dlogtau_forms_gap: tau.gap(),
        y_series: y_series(&p, x).ok(),
        dlogtau_series: dlog_tau_series(&p, x).ok(),
        constraint_defect: state.constraint_defect(),
    })
}

fn evaluate(cfg: &JobConfig) -> Result<Body, CliError> {
    let points = if cfg.x_points.is_empty() { vec![cfg.x] } else { cfg.x_points.clone() };
    let inner = JobConfig { sequential: true, ..cfg.clone() };
    let results = cfg.exec().map(&points, |&x| evaluate_at(&inner, x));
    let mut table = Table::new(&[
        "x_re", "x_im", "y_re", "y_im", "z_re", "z_im", "u_re", "u_im", "dlogtau_re", "dlogtau_im",
    ]);
    let mut rows = Vec::new();
    let mut status = Ok(());
    for (x, r) in points.iter().zip(results) {
        match r {
            Ok(e) => {
                let opt = |z: Option<Complex64>| z.map_or([String::from("nan"), String::from("nan")], cplx);
                let mut row: Vec<String> = cplx(e.x).into();
                row.extend(opt(e.y));
                row.extend(cplx(e.z));
                row.extend(opt(e.u));
                row.extend(cplx(e.dlogtau));
                table.push(row);
                rows.push(serde_json::to_value(e).expect("plain data"));
            }
            Err(err) => {
                rows.push(json!({ "x": x, "error": err.to_string() }));
                if status.is_ok() {
                    status = Err(err);
                }
            }
        }
    }
    Ok(Body { result: json!({ "points": rows }), table: Some(table), status })
}

fn lattice(cfg: &JobConfig, kind: RootKind) -> Result<Body, CliError> {
    let p = cfg.params();
    let (from, to) = cfg.m_range;
    let lat = zero_pole_seeds_with(&p, kind, cfg.formula.into(), from, to).map_err(numerical)?;
    let mut table = Table::new(&[
        "m", "seed_re", "seed_im", "root_re", "root_im", "abs_value", "iterations", "error", "scaled_error",
    ]);
    let refined: Vec<Option<Result<_, TranscendentError>>> = if cfg.refine {
        let o = RootOptions {
            tol: cfg.root_tol,
            flow_tol: cfg.flow_tol,
            exec: cfg.exec(),
            seed: pv5_flow::SeedOptions { truncation: cfg.truncation.into(), ..Default::default() },
            ..RootOptions::default()
        };
        refine_lattice(&p, &lat, &o).into_iter().map(|(_, r)| Some(r)).collect()
    } else {
        lat.seeds.iter().map(|_| None).collect()
    };
    let mut rows = Vec::new();
    let mut failures = 0;
    let mut worst_scaled: f64 = 0.0;
    for (&(m, seed), r) in lat.seeds.iter().zip(refined) {
        let [sr, si] = cplx(seed);
        match r {
            None => {
                table.push(vec![m.to_string(), sr, si, "".into(), "".into(), "".into(), "".into(), "".into(), "".into()]);
                rows.push(json!({ "m": m, "seed": seed }));
            }
            Some(Ok(root)) => {
                let error = (root.root - root.seed).norm();
                let scaled = (m >= 2).then(|| error * m as f64 / (m as f64).ln());
                worst_scaled = worst_scaled.max(scaled.unwrap_or(0.0));
                let [rr, ri] = cplx(root.root);
                table.push(vec![
                    m.to_string(),
                    sr,
                    si,
                    rr,
                    ri,
                    num(root.value),
                    root.iterations.to_string(),
                    num(error),
                    scaled.map_or(String::new(), num),
                ]);
                rows.push(json!({
                    "m": m,
                    "seed": seed,
                    "root": root.root,
                    "abs_value": root.value,
                    "iterations": root.iterations,
                    "error": error,
                    "scaled_error": scaled,
                }));
            }
            Some(Err(e)) => {
                failures += 1;
                table.push(vec![m.to_string(), sr, si, "".into(), "".into(), "".into(), "".into(), "".into(), "".into()]);
                rows.push(json!({ "m": m, "seed": seed, "error_message": e.to_string() }));
            }
        }
    }
    let a = &lat.admissibility;
    let result = json!({
        "kind": if kind == RootKind::Zero { "zeros" } else { "poles" },
        "rho": lat.rho,
        "log_argument": lat.log_argument,
        "admissibility": {
            "smallness": a.smallness,
            "boundedness": a.boundedness,
            "gamma_product": a.gamma_product,
            "exponents_ok": a.exponents_ok,
            "warning": a.warning,
        },
        "root_tol": cfg.root_tol,
        "refined": cfg.refine,
        "max_scaled_error": cfg.refine.then_some(worst_scaled),
        "rows": rows,
    });
    let status = if failures > 0 {
        Err(CliError::Numerical(format!("{failures} of {} refinements failed", lat.seeds.len())))
    } else {
        Ok(())
    };
    Ok(Body { result, table: Some(table), status })
}

fn tau(cfg: &JobConfig) -> Result<Body, CliError> {
    let p = cfg.params();
    let refined = refine(cfg, cfg.x)?;
    let s = refined.state;
    let forms = dlog_tau_forms(&s).map_err(numerical)?;
    let series = dlog_tau_series(&p, s.x).ok();
    let mut table = Table::new(&["h", "residual", "scale", "normalized"]);
    let mut sweep = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &h in &cfg.h {
        let o = BilinearOptions {
            order: cfg.difference_order.into(),
            flow_tol: cfg.flow_tol,
            exec: cfg.exec(),
            ..BilinearOptions::new(h)
        };
        let r = bilinear_residual_with(&s, &o).map_err(numerical)?;
        let normalized = r.normalized();
        let order = prev.map(|(h0, n0)| (n0 / normalized).ln() / (h0 / h).ln());
        prev = Some((h, normalized));
        table.push(vec![num(h), num(r.residual.norm()), num(r.scale), num(normalized)]);
        sweep.push(json!({
            "h": h,
            "residual": r.residual.norm(),
            "scale": r.scale,
            "normalized": normalized,
            "observed_order": order,
        }));
    }
    let result = json!({
        "x": s.x,
        "dlogtau": forms.value,
        "dlogtau_forms_gap": forms.gap(),
        "dlogtau_series": series,
        "series_gap": series.map(|v| (v - forms.value).norm()),
        "difference_order": cfg.difference_order,
        "sweep": sweep,
        "flow": flow_summary(&refined),
    });
    Body::ok(result, table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    status: CheckStatus,
    value: Option<f64>,
    tolerance: f64,
    note: Option<String>,
}

impl Check {
    fn le(name: &'static str, value: f64, tolerance: f64) -> Self {
        let status = if value <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name, status, value: Some(value), tolerance, note: None }
    }

    fn ge(name: &'static str, value: f64, tolerance: f64) -> Self {
        let status = if value >= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name, status, value: Some(value), tolerance, note: None }
    }

    fn skip(name: &'static str, tolerance: f64, note: impl Display) -> Self {
        Self { name, status: CheckStatus::Skip, value: None, tolerance, note: Some(note.to_string()) }
    }

    fn fail(name: &'static str, tolerance: f64, note: impl Display) -> Self {
        Self { name, status: CheckStatus::Fail, value: None, tolerance, note: Some(note.to_string()) }
    }

    fn note(mut self, note: impl Display) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

/// Values at or below this count as exactly zero in ratio tests.
const ZERO_FLOOR: f64 = 1e-14;

fn verify(cfg: &JobConfig) -> Result<Body, CliError> {
    let p = cfg.params();
    let mut checks = Vec::new();
    let mut extra = serde_json::Map::new();

    match closed_form_constructions(&p) {
        Ok(c) => {
            let (d, _) = Defects::of(&c.structural, &p);
            checks.push(Check::le("closed_form.determinants", d.det_m0.max(d.det_mx), Defects::DET_TOL));
            checks.push(Check::le("closed_form.identities", d.worst(), Defects::REST_TOL));
            let scale = 1f64.max(c.structural.m0.max_abs()).max(c.structural.mx.max_abs());
            let tol = 1e-10 * scale;
            checks.push(match c.gap() {
                Some(g) => Check::le("closed_form.constructions", g, tol),
                None => Check::skip("closed_form.constructions", tol, "entrywise construction unavailable"),
            });
            extra.insert("closed_form".into(), json!(MonodromyDoc::new(&c.structural, &p)));
        }
        Err(e @ ClosedFormError::Resonance(_)) => {
            checks.push(Check::skip("closed_form.identities", Defects::REST_TOL, e));
        }
        Err(e) => checks.push(Check::fail("closed_form.identities", Defects::REST_TOL, e)),
    }

    let radii = [cfg.seed_radius / 4.0, cfg.seed_radius / 2.0, cfg.seed_radius];
    let defects: Result<Vec<f64>, _> = radii
        .iter()
        .map(|&r| series_a_pair(&p, Complex64::new(0.0, r), cfg.truncation.into()).map(|s| s.det_defect(&p).0))
        .collect();
    checks.push(match defects {
        Ok(d) => {
            let ratio = d.windows(2).map(|w| if w[0] <= ZERO_FLOOR { f64::INFINITY } else { w[0] / w[1] }).fold(f64::INFINITY, f64::min);
            Check::ge("series.det_decay_ratio", ratio, 3.0).note(format!("|det A0 + θ0²/4| at {radii:?}: {d:?}"))
        }
        Err(e) => Check::fail("series.det_decay_ratio", 3.0, e),
    });

    let state = match refine(cfg, cfg.x) {
        Ok(r) => {
            checks.push(Check::le("flow.constraints", r.state.constraint_defect(), 1e-9));
            Some(r.state)
        }
        Err(e) => {
            checks.push(Check::fail("flow.constraints", 1e-9, e));
            None
        }
    };

    if let Some(s) = &state {
        monodromy_checks(cfg, s, &p, &mut checks, &mut extra);
        transcendent_checks(cfg, s, &mut checks);
    }

    let failed: Vec<&str> = checks.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.name).collect();
    let mut table = Table::new(&["check", "status", "value", "tolerance"]);
    for c in &checks {
        let status = serde_json::to_value(c.status).expect("plain data");
        table.push(vec![
            c.name.to_string(),
            status.as_str().unwrap_or_default().to_string(),
            c.value.map_or(String::new(), num),
            num(c.tolerance),
        ]);
    }
    let mut result = json!({
        "all_pass": failed.is_empty(),
        "checks": checks,
    });
    result.as_object_mut().expect("object").extend(extra);
    let status = if failed.is_empty() { Ok(()) } else { Err(CliError::Invariant(failed.join(", "))) };
    Ok(Body { result, table: Some(table), status })
}

fn monodromy_checks(
    cfg: &JobConfig,
    s: &FlowState,
    p: &Parameters,
    checks: &mut Vec<Check>,
    extra: &mut serde_json::Map<String, Value>,
) {
    let opts = monodromy_options(cfg);
    let here = match monodromy_with(s, &opts) {
        Ok(r) => r.data,
        Err(e) => {
            checks.push(Check::fail("monodromy.identities", Defects::REST_TOL, e));
            return;
        }
    };
    let (d, _) = Defects::of(&here, p);
    checks.push(Check::le("monodromy.determinants", d.det_m0.max(d.det_mx), Defects::DET_TOL));
    checks.push(Check::le("monodromy.identities", d.worst(), Defects::REST_TOL));
    extra.insert("numeric".into(), json!(MonodromyDoc::new(&here, p)));
    extra.insert(
        "identity_distance".into(),
        json!((here.m0 - C2Matrix::I).max_abs().max((here.mx - C2Matrix::I).max_abs())),
    );
    match closed_form_monodromy(p) {
        Ok(c) => checks.push(Check::le("monodromy.closed_form_agreement", entry_gap(&here, &c), cfg.agreement_tol)),
        Err(e @ ClosedFormError::Resonance(_)) => {
            checks.push(Check::skip("monodromy.closed_form_agreement", cfg.agreement_tol, e));
        }
        Err(e) => checks.push(Check::fail("monodromy.closed_form_agreement", cfg.agreement_tol, e)),
    }
    // A second point 15 units further up, reached by the flow.
    let there = integrate_with(s, &[s.x + Complex64::new(0.0, 15.0)], &FlowOptions::with_tol(cfg.flow_tol))
        .map_err(numerical)
        .and_then(|(t, _)| monodromy_with(&t, &opts).map_err(numerical));
    checks.push(match there {
        Ok(r) => Check::le("monodromy.isomonodromy", entry_gap(&here, &r.data), cfg.agreement_tol),
        Err(e) => Check::fail("monodromy.isomonodromy", cfg.agreement_tol, e),
    });
}

fn transcendent_checks(cfg: &JobConfig, s: &FlowState, checks: &mut Vec<Check>) {
    const PV_TOL: f64 = 1e-5;
    const PV_H: f64 = 1e-3;
    let pt = yzu_from_matrices(s);
    if pt.pole || !pt.y.is_finite() {
        checks.push(Check::skip("painleve.residual", PV_TOL, "y is not defined at x"));
    } else {
        let o = ResidualOptions { flow_tol: cfg.flow_tol, exec: cfg.exec(), ..ResidualOptions::new(PV_H) };
        checks.push(match pv_residual_with(s, &o) {
            Ok(r) => Check::le("painleve.residual", r.residual, PV_TOL),
            Err(TranscendentError::StencilHitsPole { .. }) => {
                Check::skip("painleve.residual", PV_TOL, "stencil meets a zero, pole or unit value of y")
            }
            Err(e) => Check::fail("painleve.residual", PV_TOL, e),
        });
    }

    const TAU_TOL: f64 = 1e-3;
    match dlog_tau_forms(s) {
        Ok(f) => checks.push(Check::le("tau.forms", f.gap(), 1e-10 * (1.0 + f.value.norm()))),
        Err(e) => checks.push(Check::fail("tau.forms", 1e-10, e)),
    }
    let h = cfg.h.iter().copied().fold(f64::INFINITY, f64::min);
    if !h.is_finite() {
        checks.push(Check::skip("tau.bilinear", TAU_TOL, "no stencil step configured"));
        return;
    }
    let o = BilinearOptions {
        order: cfg.difference_order.into(),
        flow_tol: cfg.flow_tol,
        exec: cfg.exec(),
        ..BilinearOptions::new(h)
    };
    checks.push(match bilinear_residual_with(s, &o) {
        Ok(r) if r.scale == 0.0 => Check::le("tau.bilinear", r.residual.norm(), TAU_TOL).note("all terms vanish"),
        Ok(r) => Check::le("tau.bilinear", r.normalized(), TAU_TOL),
        Err(e) => Check::fail("tau.bilinear", TAU_TOL, e),
    });
}

fn braid(cfg: &JobConfig) -> Result<Body, CliError> {
    let p = cfg.params();
    let (source, md) = match &cfg.monodromy {
        Some(m) => ("stored", MonodromyData::from_pair(matrix_from_doc(&m.m0), matrix_from_doc(&m.mx), p.thetainf)),
        None => ("closed_form", closed_form_monodromy(&p).map_err(numerical)?),
    };
    let shifted = braid_shift(&md, cfg.braid_steps, p.thetainf).map_err(|e| CliError::Config(e.to_string()))?;
    let back = braid_shift(&shifted, -cfg.braid_steps, p.thetainf).map_err(numerical)?;
    let round_trip = entry_gap(&back, &md);
    const ROUND_TRIP_TOL: f64 = 1e-8;
    let mut table = Table::new(&["entry", "before_re", "before_im", "after_re", "after_im"]);
    let names = ["m0_11", "m0_12", "m0_21", "m0_22", "mx_11", "mx_12", "mx_21", "mx_22"];
    let before = md.m0.to_array().into_iter().chain(md.mx.to_array());
    let after = shifted.m0.to_array().into_iter().chain(shifted.mx.to_array());
    for (name, (a, b)) in names.iter().zip(before.zip(after)) {
        let [ar, ai] = cplx(a);
        let [br, bi] = cplx(b);
        table.push(vec![name.to_string(), ar, ai, br, bi]);
    }
    // Conjugation preserves traces, so the shift must keep the local identities.
    let trace_change = (shifted.m0.trace() - md.m0.trace())
        .norm()
        .max((shifted.mx.trace() - md.mx.trace()).norm());
    let result = json!({
        "source": source,
        "steps": cfg.braid_steps,
        "before": MonodromyDoc::new(&md, &p),
        "after": MonodromyDoc::new(&shifted, &p),
        "round_trip": round_trip,
        "round_trip_tol": ROUND_TRIP_TOL,
        "trace_change": trace_change,
    });
    let status = if round_trip <= ROUND_TRIP_TOL {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("braid round trip moved the data by {round_trip:e}")))
    };
    Ok(Body { result, table: Some(table), status })
}
