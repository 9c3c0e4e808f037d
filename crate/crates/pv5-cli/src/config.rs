use std::path::Path;

use num_complex::Complex64;
use pv5_series::{Parameters, Truncation};
use pv5_special::C2Matrix;
use pv5_tau::DifferenceOrder;
use pv5_transcendents::LatticeFormula;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The six constants of a solution. Every value is a complex number written `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterConfig {
    pub theta0: Complex64,
    pub thetax: Complex64,
    pub thetainf: Complex64,
    pub sigma: Complex64,
    pub c0: Complex64,
    pub cx: Complex64,
}

impl ParameterConfig {
    /// The reference parameter set used throughout the test suite.
    pub fn reference() -> Self {
        Self::from(&Parameters::real(
            0.21,
            0.16,
            0.11,
            Complex64::new(0.24, 0.05),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.7, 0.2),
        ))
    }

    pub fn to_parameters(&self) -> Parameters {
        Parameters::new(self.theta0, self.thetax, self.thetainf, self.sigma, self.c0, self.cx)
    }
}

impl From<&Parameters> for ParameterConfig {
    fn from(p: &Parameters) -> Self {
        Self { theta0: p.theta0, thetax: p.thetax, thetainf: p.thetainf, sigma: p.sigma, c0: p.c0, cx: p.cx }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TruncationLevel {
    L0,
    #[default]
    L1,
}

impl From<TruncationLevel> for Truncation {
    fn from(t: TruncationLevel) -> Self {
        match t {
            TruncationLevel::L0 => Truncation::L0,
            TruncationLevel::L1 => Truncation::L1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormulaChoice {
    #[default]
    Generic,
    Alternate,
    Degenerate,
}

impl From<FormulaChoice> for LatticeFormula {
    fn from(f: FormulaChoice) -> Self {
        match f {
            FormulaChoice::Generic => LatticeFormula::Generic,
            FormulaChoice::Alternate => LatticeFormula::Alternate,
            FormulaChoice::Degenerate => LatticeFormula::Degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OrderChoice {
    #[default]
    Second,
    Fourth,
}

impl From<OrderChoice> for DifferenceOrder {
    fn from(o: OrderChoice) -> Self {
        match o {
            OrderChoice::Second => DifferenceOrder::Second,
            OrderChoice::Fourth => DifferenceOrder::Fourth,
        }
    }
}

/// A 2x2 complex matrix as `[[a11, a12], [a21, a22]]`.
pub type MatrixDoc = [[Complex64; 2]; 2];

pub fn matrix_doc(m: &C2Matrix) -> MatrixDoc {
    [[m.a11, m.a12], [m.a21, m.a22]]
}

pub fn matrix_from_doc(d: &MatrixDoc) -> C2Matrix {
    C2Matrix::new(d[0][0], d[0][1], d[1][0], d[1][1])
}

/// Monodromy matrices kept between runs, for `braid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoredMonodromy {
    pub m0: MatrixDoc,
    pub mx: MatrixDoc,
}

/// Everything a command may need. Missing fields take their defaults, so a
/// config file only has to list what differs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    pub parameters: ParameterConfig,
    /// Working point for `monodromy`, `tau` and `verify`, and the start of the `flow` path.
    pub x: Complex64,
    /// Sample points for `flow` and `evaluate`.
    pub x_points: Vec<Complex64>,
    /// Modulus of the imaginary point where the series seeds the flow.
    pub seed_radius: f64,
    pub truncation: TruncationLevel,
    /// Repeat each refinement from twice the seed radius and report the change.
    pub convergence_check: bool,
    pub flow_tol: f64,
    pub loop_tol: f64,
    /// Normalisation radius of the monodromy loops; `null` picks `max(200, 4(|x| + 10))`.
    pub radius: Option<f64>,
    pub richardson: bool,
    /// Largest accepted entrywise gap between numeric and closed-form monodromy.
    pub agreement_tol: f64,
    /// Inclusive lattice index range.
    pub m_range: (i64, i64),
    pub formula: FormulaChoice,
    pub refine: bool,
    pub root_tol: f64,
    /// Stencil steps for the `tau` sweep and the residual checks of `verify`.
    pub h: Vec<f64>,
    pub difference_order: OrderChoice,
    pub braid_steps: i64,
    pub monodromy: Option<StoredMonodromy>,
    /// Run independent jobs one after another.
    pub sequential: bool,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            parameters: ParameterConfig::reference(),
            x: Complex64::new(0.0, 40.0),
            x_points: Vec::new(),
            seed_radius: 400.0,
            truncation: TruncationLevel::L1,
            convergence_check: false,
            flow_tol: 1e-12,
            loop_tol: 1e-12,
            radius: None,
            richardson: true,
            agreement_tol: 1e-6,
            m_range: (10, 40),
            formula: FormulaChoice::Generic,
            refine: true,
            root_tol: 1e-10,
            h: vec![4e-2, 2e-2, 1e-2],
            difference_order: OrderChoice::Second,
            braid_steps: 2,
            monodromy: None,
            sequential: false,
        }
    }
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> Parameters {
        self.parameters.to_parameters()
    }

    pub fn exec(&self) -> pv5_exec::Exec {
        if self.sequential {
            pv5_exec::Exec::Sequential
        } else {
            pv5_exec::Exec::default()
        }
    }

    /// Reject values no command can work with.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Config(what.to_string()));
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        let p = &self.parameters;
        if ![p.theta0, p.thetax, p.thetainf, p.sigma, p.c0, p.cx, self.x].into_iter().all(finite) {
            return bad("parameters and x must be finite");
        }
        if !(self.seed_radius > 0.0) {
            return bad("seed_radius must be positive");
        }
        for (name, t) in [("flow_tol", self.flow_tol), ("loop_tol", self.loop_tol), ("root_tol", self.root_tol)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Config(format!("{name} must lie in (0, 1)")));
            }
        }
        if !(self.agreement_tol > 0.0) {
            return bad("agreement_tol must be positive");
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                return bad("radius must be positive");
            }
        }
        if self.h.iter().any(|&h| !(h > 0.0)) {
            return bad("every h must be positive");
        }
        if self.m_range.0 < 1 || self.m_range.1 < self.m_range.0 {
            return bad("m_range must be [from, to] with 1 <= from <= to");
        }
        if self.braid_steps % 2 != 0 {
            return bad("braid_steps must be even");
        }
        if !self.x_points.iter().copied().all(finite) {
            return bad("x_points must be finite");
        }
        Ok(())
    }
}

/// Parse `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{s}` is not `re` or `re,im`"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("`{s}` is not `re` or `re,im`")),
    }
}

/// Parse an inclusive range `a..b` (or `a..=b`).
pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("`{s}` is not a range `a..b`"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a = a.trim().parse::<i64>().map_err(|e| format!("range start: {e}"))?;
    let b = b.trim().parse::<i64>().map_err(|e| format!("range end: {e}"))?;
    Ok((a, b))
}
