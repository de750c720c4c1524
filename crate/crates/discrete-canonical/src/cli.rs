//! Batch front-end: every computation as a subcommand writing CSV or JSON,
//! plus a run manifest.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::acceptance::{run_all, run_criterion, CriterionOutcome, CRITERIA};
use crate::lattice_ops::{
    a_p_element, a_q_element, build_p_matrix, build_q_matrix, commutator_residual, commutator_residual_on,
    DiscreteState, LatticeWindow, Normalization,
};
use crate::legacy_maps::{legacy_split, naive_overlap_mom, naive_overlap_pos, sigma_overlap_mom, symmetric_state_q};
use crate::numerics::RealLineGrid;
use crate::oscillator::{
    edge_complement_spectrum, hamiltonian_matrix, quarter_evolution_with, table_for_resolution, OscillatorConfig,
    Regularization,
};
use crate::phase_field::{phase_sample, SigmaSplit};
use crate::template_state::build_template_table;

pub const THREADS_ENV: &str = "DISCRETE_CANONICAL_THREADS";

/// Largest number of rows any table subcommand will produce.
const MAX_ROWS: f64 = 5e7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Computation(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Computation(_) | Self::Io(_) => 1,
        }
    }
}

fn computation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Computation(e.to_string())
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "discrete-canonical",
    version,
    about = "Lattice ↔ continuum canonical maps: tables, operators and checks"
)]
pub struct Cli {
    /// Where to write the run manifest (default: <out>.manifest.json, or stderr without --out).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the template ψ(q) on a uniform grid (CSV q,psi + JSON sidecar).
    PsiTable(PsiTableArgs),
    /// Sample r and φ over the fundamental square (CSV eta,xi,r,phi).
    PhiGrid(PhiGridArgs),
    /// ⟨q|0,0⟩ and ⟨p|0,0⟩ in the naive and symmetric legacy schemes.
    LegacyCurves(LegacyArgs),
    /// Operator matrix elements on a window (CSV Q1,P1,Q2,P2,re,im).
    MatrixElements(MatrixArgs),
    /// Residual of [q,p] against its lattice target, per window size (JSON).
    CommutatorCheck(CommutatorArgs),
    /// Lowest eigenvalues of H = π(p²+q²) on a window (JSON).
    OscillatorSpectrum(SpectrumArgs),
    /// Quarter-period steps of |A,B⟩ (CSV step,Q,P,re,im).
    Evolve(EvolveArgs),
    /// Run the acceptance criteria and print PASS/FAIL per criterion.
    Acceptance(AcceptanceArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PsiTableArgs {
    #[arg(long, default_value_t = 10.0)]
    pub qmax: f64,
    #[arg(long, default_value_t = 0.015625)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PhiGridArgs {
    /// Cell-centred samples per side of the unit square.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LegacyArgs {
    #[arg(long, default_value_t = 5.0)]
    pub xmax: f64,
    #[arg(long, default_value_t = 0.015625)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    #[value(name = "a-q")]
    AQ,
    #[value(name = "a-p")]
    AP,
    Q,
    P,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Appendix,
    Canonical,
}

impl From<NormArg> for Normalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Appendix => Normalization::Appendix,
            NormArg::Canonical => Normalization::Canonical,
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MatrixArgs {
    #[arg(long, value_enum, default_value_t = OperatorKind::AQ)]
    pub operator: OperatorKind,
    /// Window half-width: sites with |Q|,|P| ≤ half.
    #[arg(long, default_value_t = 2)]
    pub half: i64,
    #[arg(long, value_enum, default_value_t = NormArg::Appendix)]
    pub normalization: NormArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CommutatorArgs {
    /// Window sides (odd).
    #[arg(long, value_delimiter = ',', default_values_t = [21usize, 31, 41])]
    pub sides: Vec<usize>,
    #[arg(long, value_enum, default_value_t = NormArg::Appendix)]
    pub normalization: NormArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegularizationArg {
    ProjectEdge,
    SubtractCheckerboard,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    /// Window side (odd).
    #[arg(long, default_value_t = 15)]
    pub side: usize,
    #[arg(long, value_enum, default_value_t = RegularizationArg::ProjectEdge)]
    pub regularization: RegularizationArg,
    /// Number of eigenvalues to report.
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvolveArgs {
    #[arg(long)]
    pub a: i64,
    #[arg(long)]
    pub b: i64,
    /// Number of quarter-period steps.
    #[arg(long, default_value_t = 4)]
    pub steps: usize,
    /// Synthesis grid step.
    #[arg(long, default_value_t = 0.015625)]
    pub resolution_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    Primary,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct AcceptanceArgs {
    #[arg(long, value_enum, default_value_t = Suite::Primary)]
    pub suite: Suite,
    /// Run only these criteria (e.g. 1,2,12).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    /// Also write the outcomes as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// The per-run record: what ran, with which inputs, and what it wrote.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: String,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub created_unix: u64,
}

impl RunManifest {
    fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: BTreeMap::new(),
            outputs: Vec::new(),
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }
}

/// Shortest round-trip decimal (at most 17 significant digits); exponent
/// form only for very large or very small magnitudes.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn sink(out: Option<&Path>, manifest: &mut RunManifest) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => {
            manifest.outputs.push(path.display().to_string());
            Box::new(BufWriter::new(File::create(path)?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn csv_writer(
    out: Option<&Path>,
    manifest: &mut RunManifest,
    header: &[&str],
) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let mut w = csv::Writer::from_writer(sink(out, manifest)?);
    w.write_record(header).map_err(csv_error)?;
    Ok(w)
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Computation(format!("{other:?}")),
    }
}

fn write_json(out: Option<&Path>, manifest: &mut RunManifest, value: &impl Serialize) -> Result<(), CliError> {
    let mut w = sink(out, manifest)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(computation)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn check_step(name: &str, step: f64) -> Result<(), CliError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(invalid(format!("--{name} must be a positive number, got {step}")));
    }
    Ok(())
}

fn check_half_range(name: &str, half: f64, step: f64) -> Result<(), CliError> {
    if !(half.is_finite() && half > 0.0) {
        return Err(invalid(format!("--{name} must be a positive number, got {half}")));
    }
    let n = half / step;
    if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
        return Err(invalid(format!("--{name} ({half}) must be a whole multiple of the step ({step})")));
    }
    if 2.0 * n + 1.0 > MAX_ROWS {
        return Err(invalid(format!("--{name}/--step would produce more than {MAX_ROWS} rows")));
    }
    Ok(())
}

fn check_side(side: usize) -> Result<LatticeWindow, CliError> {
    if side == 0 || side.is_multiple_of(2) {
        return Err(invalid(format!("window side must be a positive odd number, got {side}")));
    }
    LatticeWindow::square(side).map_err(|e| invalid(e.to_string()))
}

fn psi_table(args: &PsiTableArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    check_step("step", args.step)?;
    check_half_range("qmax", args.qmax, args.step)?;
    manifest.param("qmax", args.qmax).param("step", args.step).tolerance("psi_node_error", 1e-10);
    let grid = RealLineGrid::symmetric(args.qmax, args.step).map_err(|e| invalid(e.to_string()))?;
    let table = build_template_table(grid).map_err(computation)?;
    let mut w = csv_writer(args.out.as_deref(), manifest, &["q", "psi"])?;
    for (i, v) in table.values.iter().enumerate() {
        w.write_record([format_f64(grid.point(i)), format_f64(*v)]).map_err(csv_error)?;
    }
    w.flush()?;
    let sidecar = json!({
        "grid": grid,
        "quadrature_nodes": table.meta.quadrature_nodes,
        "error_estimate": table.meta.error_estimate,
        "asymmetry": table.meta.asymmetry,
    });
    manifest.param("table_meta", &sidecar);
    if let Some(out) = &args.out {
        let path = out.with_extension("json");
        write_json(Some(&path), manifest, &sidecar)?;
    }
    Ok(())
}

fn phi_grid(args: &PhiGridArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    if !(2..=4096).contains(&args.n) {
        return Err(invalid(format!("--n must be in 2..=4096, got {}", args.n)));
    }
    manifest.param("n", args.n).param("layout", "cell_centred");
    let n = args.n;
    let mut w = csv_writer(args.out.as_deref(), manifest, &["eta", "xi", "r", "phi"])?;
    for i in 0..n {
        for j in 0..n {
            let eta = -0.5 + (i as f64 + 0.5) / n as f64;
            let xi = -0.5 + (j as f64 + 0.5) / n as f64;
            let s = phase_sample(eta, xi).map_err(computation)?;
            w.write_record([format_f64(eta), format_f64(xi), format_f64(s.r), format_f64(s.phi)]).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn legacy_curves(args: &LegacyArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    check_step("step", args.step)?;
    check_half_range("xmax", args.xmax, args.step)?;
    manifest
        .param("xmax", args.xmax)
        .param("step", args.step)
        .param("naive_q_regularization", "box of unit height on the cell (−1/2, 1/2]");
    let grid = RealLineGrid::symmetric(args.xmax, args.step).map_err(|e| invalid(e.to_string()))?;
    let symmetric = SigmaSplit::symmetric();
    let mut w = csv_writer(args.out.as_deref(), manifest, &["scheme", "space", "x", "re", "im"])?;
    let mut row = |scheme: &str, space: &str, x: f64, z: Complex64| {
        w.write_record([scheme, space, &format_f64(x), &format_f64(z.re), &format_f64(z.im)])
    };
    for x in grid.points() {
        let (cell, frac) = legacy_split(x);
        row("naive", "q", x, naive_overlap_pos(0, 0, cell, frac)).map_err(csv_error)?;
    }
    for x in grid.points() {
        let (cell, frac) = legacy_split(x);
        row("naive", "p", x, naive_overlap_mom(0, 0, cell, frac)).map_err(csv_error)?;
    }
    for x in grid.points() {
        row("symmetric", "q", x, symmetric_state_q(x).into()).map_err(csv_error)?;
    }
    for x in grid.points() {
        let (cell, frac) = legacy_split(x);
        row("symmetric", "p", x, sigma_overlap_mom(0, 0, cell, frac, symmetric)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn matrix_elements(args: &MatrixArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    if !(0..=50).contains(&args.half) {
        return Err(invalid(format!("--half must be in 0..=50, got {}", args.half)));
    }
    let norm = Normalization::from(args.normalization);
    let window = LatticeWindow::centered(args.half).map_err(|e| invalid(e.to_string()))?;
    manifest.param("operator", args.operator).param("half", args.half).param("window", window);
    let matrix = match args.operator {
        OperatorKind::Q => Some(build_q_matrix(window, norm).map_err(computation)?),
        OperatorKind::P => Some(build_p_matrix(window, norm).map_err(computation)?),
        OperatorKind::AQ | OperatorKind::AP => None,
    };
    if matrix.is_some() {
        manifest.param("normalization", norm.name());
    } else {
        manifest.param("normalization", Normalization::Appendix.name());
    }
    let mut w = csv_writer(args.out.as_deref(), manifest, &["Q1", "P1", "Q2", "P2", "re", "im"])?;
    for (q1, p1) in window.sites() {
        for (q2, p2) in window.sites() {
            let z = match (&matrix, args.operator) {
                (Some(m), _) => m.entry(q1, p1, q2, p2).unwrap_or_default(),
                (None, OperatorKind::AP) => a_p_element(q1, p1, q2, p2),
                (None, _) => a_q_element(q1, p1, q2, p2),
            };
            w.write_record([
                q1.to_string(),
                p1.to_string(),
                q2.to_string(),
                p2.to_string(),
                format_f64(z.re),
                format_f64(z.im),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CommutatorRow {
    side: usize,
    central_quarter_max: f64,
    fixed_block_max: f64,
}

fn commutator_check(args: &CommutatorArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    if args.sides.is_empty() {
        return Err(invalid("--sides must list at least one window side"));
    }
    let windows = args
        .sides
        .iter()
        .map(|&s| if s < 5 { Err(invalid(format!("window side must be ≥ 5, got {s}"))) } else { check_side(s) })
        .collect::<Result<Vec<_>, _>>()?;
    let norm = Normalization::from(args.normalization);
    manifest.param("sides", &args.sides).param("normalization", norm.name()).tolerance("central_quarter_max", 0.05);
    let block = LatticeWindow::centered(2).map_err(computation)?;
    let rows = args
        .sides
        .iter()
        .zip(&windows)
        .map(|(&side, &w)| {
            Ok(CommutatorRow {
                side,
                central_quarter_max: commutator_residual(w, norm).map_err(computation)?.max_abs(),
                fixed_block_max: commutator_residual_on(w, block, norm).map_err(computation)?.max_abs(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let report = json!({ "normalization": norm.name(), "residuals": rows });
    write_json(args.out.as_deref(), manifest, &report)
}

fn oscillator_spectrum(args: &SpectrumArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let window = check_side(args.side)?;
    if args.levels == 0 || args.levels >= window.size() {
        return Err(invalid(format!("--levels must be in 1..{}, got {}", window.size(), args.levels)));
    }
    let regularization = match args.regularization {
        RegularizationArg::ProjectEdge => Regularization::ProjectEdge,
        RegularizationArg::SubtractCheckerboard => Regularization::SubtractCheckerboard,
    };
    let config = OscillatorConfig::new(window, regularization);
    manifest.param("side", args.side).param("regularization", regularization.name()).param("levels", args.levels);
    let h = hamiltonian_matrix(&config).map_err(computation)?;
    let spectrum = edge_complement_spectrum(&h.matrix);
    let levels = &spectrum.eigenvalues[..args.levels];
    let report = json!({
        "window": window,
        "regularization": regularization.name(),
        "normalization": Normalization::Canonical.name(),
        "hermiticity_defect": h.matrix.hermiticity_defect(),
        "eigenvalues": levels,
        "period_defects": &spectrum.period_defects()[..args.levels],
        "checkerboard": h.checkerboard,
    });
    write_json(args.out.as_deref(), manifest, &report)
}

fn evolve(args: &EvolveArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    check_step("resolution-step", args.resolution_step)?;
    if args.steps == 0 || args.steps > 64 {
        return Err(invalid(format!("--steps must be in 1..=64, got {}", args.steps)));
    }
    let reach = args.a.abs().max(args.b.abs());
    if reach > 20 {
        return Err(invalid(format!("|A|,|B| must be ≤ 20, got ({}, {})", args.a, args.b)));
    }
    let inverse = 1.0 / args.resolution_step;
    if (inverse - inverse.round()).abs() > 1e-9 {
        return Err(invalid("--resolution-step must be 1/n for an integer n"));
    }
    // The synthesis grid needs ten units of margin beyond the support.
    let half_width = (reach as f64 + 10.0).max(13.0);
    let grid = RealLineGrid::symmetric(half_width, args.resolution_step).map_err(|e| invalid(e.to_string()))?;
    let window = LatticeWindow::centered(reach.max(1)).map_err(computation)?;
    manifest
        .param("a", args.a)
        .param("b", args.b)
        .param("steps", args.steps)
        .param("window", window)
        .param("resolution", grid);
    let table = table_for_resolution(&grid, window).map_err(computation)?;
    let mut state = DiscreteState::basis(window, args.a, args.b).map_err(computation)?;
    let mut w = csv_writer(args.out.as_deref(), manifest, &["step", "Q", "P", "re", "im"])?;
    let mut emit = |step: usize, s: &DiscreteState| -> Result<(), CliError> {
        for (q, p) in window.sites() {
            let z = s.amplitude(q, p);
            w.write_record([step.to_string(), q.to_string(), p.to_string(), format_f64(z.re), format_f64(z.im)])
                .map_err(csv_error)?;
        }
        Ok(())
    };
    emit(0, &state)?;
    let mut dominant = ((args.a, args.b), 1.0);
    for step in 1..=args.steps {
        let outcome = quarter_evolution_with(&state, &grid, &table).map_err(computation)?;
        dominant = outcome.dominant;
        state = outcome.state;
        emit(step, &state)?;
    }
    w.flush()?;
    manifest.param("final_dominant", json!({ "Q": dominant.0 .0, "P": dominant.0 .1, "probability": dominant.1 }));
    Ok(())
}

fn acceptance(args: &AcceptanceArgs, manifest: &mut RunManifest) -> Result<bool, CliError> {
    let Suite::Primary = args.suite;
    for id in &args.only {
        if !CRITERIA.iter().any(|c| c.0 == *id) {
            return Err(invalid(format!("unknown criterion {id}; expected 1..=12")));
        }
    }
    manifest.param("suite", "primary").param("only", &args.only);
    let mut stdout = io::stdout();
    let outcomes: Vec<CriterionOutcome> = if args.only.is_empty() {
        run_all(|o| {
            let _ = writeln!(stdout, "{o}");
        })
    } else {
        args.only
            .iter()
            .filter_map(|&id| run_criterion(id))
            .inspect(|o| {
                let _ = writeln!(stdout, "{o}");
            })
            .collect()
    };
    for o in &outcomes {
        manifest.param(&format!("C{}", o.id), if o.passed { "PASS" } else { "FAIL" });
    }
    if let Some(path) = &args.json {
        write_json(Some(path), manifest, &outcomes)?;
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

fn configure_threads() -> Result<(), CliError> {
    let Some(raw) = std::env::var_os(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| invalid(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(computation)?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::PsiTable(_) => "psi-table",
        Command::PhiGrid(_) => "phi-grid",
        Command::LegacyCurves(_) => "legacy-curves",
        Command::MatrixElements(_) => "matrix-elements",
        Command::CommutatorCheck(_) => "commutator-check",
        Command::OscillatorSpectrum(_) => "oscillator-spectrum",
        Command::Evolve(_) => "evolve",
        Command::Acceptance(_) => "acceptance",
    }
}

fn primary_output(command: &Command) -> Option<&Path> {
    match command {
        Command::PsiTable(a) => a.out.as_deref(),
        Command::PhiGrid(a) => a.out.as_deref(),
        Command::LegacyCurves(a) => a.out.as_deref(),
        Command::MatrixElements(a) => a.out.as_deref(),
        Command::CommutatorCheck(a) => a.out.as_deref(),
        Command::OscillatorSpectrum(a) => a.out.as_deref(),
        Command::Evolve(a) => a.out.as_deref(),
        Command::Acceptance(a) => a.json.as_deref(),
    }
}

/// Runs a parsed command; `Ok(false)` means it ran but a check failed.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let mut manifest = RunManifest::new(subcommand_name(&cli.command));
    let ok = match &cli.command {
        Command::PsiTable(a) => psi_table(a, &mut manifest).map(|_| true),
        Command::PhiGrid(a) => phi_grid(a, &mut manifest).map(|_| true),
        Command::LegacyCurves(a) => legacy_curves(a, &mut manifest).map(|_| true),
        Command::MatrixElements(a) => matrix_elements(a, &mut manifest).map(|_| true),
        Command::CommutatorCheck(a) => commutator_check(a, &mut manifest).map(|_| true),
        Command::OscillatorSpectrum(a) => oscillator_spectrum(a, &mut manifest).map(|_| true),
        Command::Evolve(a) => evolve(a, &mut manifest).map(|_| true),
        Command::Acceptance(a) => acceptance(a, &mut manifest),
    }?;
    let target = cli
        .manifest
        .clone()
        .or_else(|| primary_output(&cli.command).map(|p| PathBuf::from(format!("{}.manifest.json", p.display()))));
    match target {
        Some(path) => {
            let text = serde_json::to_string_pretty(&manifest).map_err(computation)?;
            std::fs::write(&path, text + "\n")?;
        }
        None => {
            let text = serde_json::to_string(&manifest).map_err(computation)?;
            eprintln!("{text}");
        }
    }
    Ok(ok)
}

/// Parses `argv` and runs it, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    2
                }
                _ => {
                    let text = e.to_string();
                    eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
                    2
                }
            };
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}
