use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser};
use num_complex::Complex64;
use pv5_cli::{
    parse_complex, parse_range, run, CliError, Command, FormulaChoice, JobConfig, OrderChoice, StoredMonodromy,
    TruncationLevel,
};

/// Painlevé V solutions near x = i∞: monodromy, transcendents, lattices and tau-function.
///
/// Complex values on the command line are written `re` or `re,im`; in a
/// config file they are `[re, im]`. Flags override the config file.
#[derive(Parser, Debug)]
#[command(name = "pv5", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Args, Debug)]
struct Overrides {
    /// JSON job config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a plot table here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// A previous `monodromy` or `braid` document, or a bare {m0, mx} object, to feed `braid`.
    #[arg(long, global = true)]
    from: Option<PathBuf>,

    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    theta0: Option<Complex64>,
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    thetax: Option<Complex64>,
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    thetainf: Option<Complex64>,
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    sigma: Option<Complex64>,
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    c0: Option<Complex64>,
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    cx: Option<Complex64>,

    /// Working point.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    x: Option<Complex64>,
    /// Sample points, separated by `;` (e.g. `0,40;0,50`).
    #[arg(long, global = true, value_delimiter = ';', value_parser = parse_complex, allow_hyphen_values = true)]
    x_points: Option<Vec<Complex64>>,
    #[arg(long, global = true)]
    seed_radius: Option<f64>,
    #[arg(long, global = true, value_enum)]
    truncation: Option<TruncationLevel>,
    #[arg(long, global = true)]
    convergence_check: Option<bool>,
    #[arg(long, global = true)]
    flow_tol: Option<f64>,
    #[arg(long, global = true)]
    loop_tol: Option<f64>,
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long, global = true)]
    richardson: Option<bool>,
    #[arg(long, global = true)]
    agreement_tol: Option<f64>,
    /// Lattice index range `a..b`, inclusive.
    #[arg(long = "m", global = true, value_parser = parse_range)]
    m_range: Option<(i64, i64)>,
    #[arg(long, global = true, value_enum)]
    formula: Option<FormulaChoice>,
    /// Print seeds only.
    #[arg(long, global = true)]
    no_refine: bool,
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    /// Stencil steps, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    h: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    difference_order: Option<OrderChoice>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    steps: Option<i64>,
    /// Disable the data-parallel paths.
    #[arg(long, global = true)]
    sequential: bool,
}

impl Overrides {
    fn apply(&self, c: &mut JobConfig) {
        let p = &mut c.parameters;
        macro_rules! set {
            ($($dst:expr => $src:expr),* $(,)?) => {$(if let Some(v) = $src.clone() { $dst = v; })*};
        }
        set!(
            p.theta0 => self.theta0, p.thetax => self.thetax, p.thetainf => self.thetainf,
            p.sigma => self.sigma, p.c0 => self.c0, p.cx => self.cx,
        );
        set!(
            c.x => self.x, c.x_points => self.x_points, c.seed_radius => self.seed_radius,
            c.truncation => self.truncation, c.convergence_check => self.convergence_check,
            c.flow_tol => self.flow_tol, c.loop_tol => self.loop_tol, c.richardson => self.richardson,
            c.agreement_tol => self.agreement_tol, c.m_range => self.m_range, c.formula => self.formula,
            c.root_tol => self.root_tol, c.h => self.h, c.difference_order => self.difference_order,
            c.braid_steps => self.steps,
        );
        if self.radius.is_some() {
            c.radius = self.radius;
        }
        if self.no_refine {
            c.refine = false;
        }
        if self.sequential {
            c.sequential = true;
        }
    }
}

/// Pull `{m0, mx}` out of a bare object or a previous result document.
fn load_monodromy(path: &Path) -> Result<StoredMonodromy, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let candidates = [
        v.clone(),
        v["result"]["numeric"].clone(),
        v["result"]["after"].clone(),
        v["result"]["closed_form"].clone(),
    ];
    candidates
        .into_iter()
        .find_map(|c| {
            let m0 = serde_json::from_value(c.get("m0")?.clone()).ok()?;
            let mx = serde_json::from_value(c.get("mx")?.clone()).ok()?;
            Some(StoredMonodromy { m0, mx })
        })
        .ok_or_else(|| CliError::Config(format!("{}: no m0/mx matrices found", path.display())))
}

fn config(cli: &Cli) -> Result<JobConfig, CliError> {
    let mut c = match &cli.opts.config {
        Some(path) => JobConfig::load(path)?,
        None => JobConfig::default(),
    };
    cli.opts.apply(&mut c);
    if let Some(path) = &cli.opts.from {
        c.monodromy = Some(load_monodromy(path)?);
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("pv5: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = run(cli.command, &cfg);
    if let Err(e) = outcome.emit(cli.opts.out.as_deref(), cli.opts.csv.as_deref()) {
        eprintln!("pv5: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    if cli.command == Command::Monodromy {
        if let Some(gap) = outcome.document.result.get("max_entry_diff") {
            eprintln!("max |numeric - closed form| entry difference: {gap}");
        }
    }
    if let Err(e) = &outcome.status {
        eprintln!("pv5: {e}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
