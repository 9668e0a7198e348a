//! Command-line front end over the alignment library.
//!
//! Four subcommands: `optimize` reports the best signal state for N
//! spins, `sweep` tabulates the error scaling over a range, `simulate`
//! runs the Monte Carlo estimator, `verify` drives the dense
//! tensor-space checks. Output is JSON (default) or CSV, always
//! embedding the tool version and the fully resolved configuration so a
//! run can be reproduced from its own output.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3
//! verification failure.

use clap::{Parser, Subcommand, ValueEnum};
use framealign::{
    fidelity_matrix, optimal_protocol, orbit_dimension, sigma_closed_form, Error as CoreError,
    GroupElement, HaarGrid, HalfInt, LikelihoodModel, ReferenceState, SchurBasis,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

const TOOL: &str = "framealign";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = TOOL, version, about = "Transmission of spatial direction frames over collections of spins")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Best signal state and average error for a given spin count
    Optimize {
        /// Number of spins (N >= 2)
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write here instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Error-scaling table over a range of spin counts
    Sweep {
        #[arg(long, default_value_t = 4)]
        n_min: u32,
        #[arg(long, default_value_t = 200)]
        n_max: u32,
        #[arg(long, default_value_t = 2)]
        step: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the average transmission error
    Simulate {
        /// Number of spins (2 <= N <= 10)
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dense tensor-space verification of the fast routines
    Verify {
        /// Number of spins (N <= 6; quadrature checks need N <= 4)
        #[arg(long)]
        n: u32,
        /// Nodes per angle in the verification quadrature
        #[arg(long, default_value_t = 48)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Verification(m) => m,
        }
    }
}

fn numerical(e: CoreError) -> Failure {
    Failure::Numerical(e.to_string())
}

/// Everything a run needs to be repeated, embedded in every output.
#[derive(Serialize)]
struct RunConfig {
    subcommand: &'static str,
    n: Option<u32>,
    n_min: Option<u32>,
    n_max: Option<u32>,
    step: Option<u32>,
    trials: Option<u64>,
    seed: Option<u64>,
    grid: Option<usize>,
    format: &'static str,
    output: Option<String>,
}

impl RunConfig {
    fn new(subcommand: &'static str, format: Format, output: &Option<PathBuf>) -> Self {
        Self {
            subcommand,
            n: None,
            n_min: None,
            n_max: None,
            step: None,
            trials: None,
            seed: None,
            grid: None,
            format: format.name(),
            output: output.as_ref().map(|p| p.display().to_string()),
        }
    }

    fn comment_block(&self) -> String {
        let mut out = format!("# tool: {TOOL} {VERSION}\n# command: {}\n", self.subcommand);
        let mut fields = String::new();
        let mut push = |name: &str, value: Option<String>| {
            if let Some(v) = value {
                let _ = write!(fields, " {name}={v}");
            }
        };
        push("n", self.n.map(|v| v.to_string()));
        push("n_min", self.n_min.map(|v| v.to_string()));
        push("n_max", self.n_max.map(|v| v.to_string()));
        push("step", self.step.map(|v| v.to_string()));
        push("trials", self.trials.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("grid", self.grid.map(|v| v.to_string()));
        push("format", Some(self.format.to_string()));
        push("output", Some(self.output.clone().unwrap_or_else(|| "-".into())));
        let _ = write!(out, "# config:{fields}");
        out
    }
}

#[derive(Serialize)]
struct Envelope<R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: RunConfig,
    result: R,
}

/// serde_json formatter pinning floats to 17 significant digits so
/// every emitted number round-trips exactly.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<R: Serialize>(envelope: &Envelope<R>) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    envelope
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

/// Ten significant digits for tabular output.
fn csv_num(x: f64) -> String {
    format!("{x:.9e}")
}

fn emit(text: String, output: &Option<PathBuf>) -> Result<(), Failure> {
    match output {
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            // A closed pipe (e.g. piping into `head`) ends the run, it is
            // not an error.
            if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.write_all(b"\n")) {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    std::process::exit(0);
                }
                return Err(Failure::Usage(format!("cannot write to stdout: {e}")));
            }
            Ok(())
        }
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
    }
}

#[derive(Serialize)]
struct CoefficientEntry {
    j: HalfInt,
    a: f64,
}

#[derive(Serialize)]
struct OptimizeReport {
    n: u32,
    lambda: f64,
    avg_error: f64,
    sigma_n: f64,
    sigma_n_plus_2: f64,
    d_max: u64,
    coefficients: Vec<CoefficientEntry>,
}

fn cmd_optimize(n: u32, format: Format, output: Option<PathBuf>) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Usage("N must be \u{2265} 2".into()));
    }
    let protocol = optimal_protocol(n).map_err(numerical)?;
    let report = OptimizeReport {
        n,
        lambda: protocol.lambda,
        avg_error: protocol.average_error(),
        sigma_n: sigma_closed_form(n).map_err(numerical)?,
        sigma_n_plus_2: sigma_closed_form(n + 2).map_err(numerical)?,
        d_max: orbit_dimension(n).map_err(numerical)?,
        coefficients: protocol
            .classes
            .iter()
            .zip(&protocol.coefficients)
            .map(|(j, a)| CoefficientEntry { j: *j, a: *a })
            .collect(),
    };
    let mut config = RunConfig::new("optimize", format, &output);
    config.n = Some(n);
    let text = match format {
        Format::Json => to_json(&Envelope {
            tool: TOOL,
            version: VERSION,
            command: "optimize",
            config,
            result: report,
        }),
        Format::Csv => {
            let mut t = config.comment_block();
            t.push_str("\nkey,value\n");
            let _ = write!(t, "n,{}\n", report.n);
            let _ = write!(t, "lambda,{}\n", csv_num(report.lambda));
            let _ = write!(t, "avg_error,{}\n", csv_num(report.avg_error));
            let _ = write!(t, "sigma_n,{}\n", csv_num(report.sigma_n));
            let _ = write!(t, "sigma_n_plus_2,{}\n", csv_num(report.sigma_n_plus_2));
            let _ = write!(t, "d_max,{}\n", report.d_max);
            for entry in &report.coefficients {
                let _ = write!(t, "a[{}],{}\n", entry.j, csv_num(entry.a));
            }
            t.pop();
            t
        }
    };
    emit(text, &output)
}

#[derive(Serialize)]
struct SweepRow {
    n: u32,
    lambda: f64,
    avg_error: f64,
    ratio: f64,
    sigma_lo: f64,
    sigma_hi: f64,
    sandwich_ok: bool,
}

fn cmd_sweep(
    n_min: u32,
    n_max: u32,
    step: u32,
    format: Format,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    if n_min < 2 {
        return Err(Failure::Usage("N must be \u{2265} 2".into()));
    }
    if n_max < n_min {
        return Err(Failure::Usage("n-max must not be below n-min".into()));
    }
    if step < 1 {
        return Err(Failure::Usage("step must be \u{2265} 1".into()));
    }
    let mut rows = Vec::new();
    let mut n = n_min;
    while n <= n_max {
        let protocol = optimal_protocol(n).map_err(numerical)?;
        let avg_error = protocol.average_error();
        let sigma_lo = sigma_closed_form(n).map_err(numerical)?;
        let sigma_hi = sigma_closed_form(n + 2).map_err(numerical)?;
        rows.push(SweepRow {
            n,
            lambda: protocol.lambda,
            avg_error,
            ratio: avg_error * f64::from(n) * f64::from(n)
                / (8.0 * std::f64::consts::PI * std::f64::consts::PI),
            sigma_lo,
            sigma_hi,
            sandwich_ok: sigma_lo - 1e-12 <= protocol.lambda && protocol.lambda <= sigma_hi + 1e-12,
        });
        n += step;
    }
    let mut config = RunConfig::new("sweep", format, &output);
    config.n_min = Some(n_min);
    config.n_max = Some(n_max);
    config.step = Some(step);
    let text = match format {
        Format::Json => to_json(&Envelope {
            tool: TOOL,
            version: VERSION,
            command: "sweep",
            config,
            result: rows,
        }),
        Format::Csv => {
            let mut t = config.comment_block();
            t.push_str("\nN,lambda,avg_error,ratio,sigma_lo,sigma_hi,sandwich_ok\n");
            for r in &rows {
                let _ = write!(
                    t,
                    "{},{},{},{},{},{},{}\n",
                    r.n,
                    csv_num(r.lambda),
                    csv_num(r.avg_error),
                    csv_num(r.ratio),
                    csv_num(r.sigma_lo),
                    csv_num(r.sigma_hi),
                    r.sandwich_ok
                );
            }
            t.pop();
            t
        }
    };
    emit(text, &output)
}

#[derive(Serialize)]
struct SimulateReport {
    n_spins: u32,
    trials: u64,
    seed: u64,
    mean_error: f64,
    std_error: f64,
    analytic_error: f64,
    acceptance_rate: f64,
    z_score: f64,
}

fn cmd_simulate(
    n: u32,
    trials: u64,
    seed: u64,
    format: Format,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Usage("N must be \u{2265} 2".into()));
    }
    if n > 10 {
        return Err(Failure::Usage(
            "rejection sampler limited to N \u{2264} 10".into(),
        ));
    }
    if trials < 100 {
        return Err(Failure::Usage("trials must be \u{2265} 100".into()));
    }
    let state = ReferenceState::optimal(n).map_err(numerical)?;
    let model = LikelihoodModel::new(&state).map_err(numerical)?;
    let estimate = model.monte_carlo_error(trials, seed).map_err(|e| {
        Failure::Numerical(format!(
            "{e}; envelope {} over {} outcome classes",
            model.envelope_bound(),
            state.classes().len()
        ))
    })?;
    let report = SimulateReport {
        n_spins: estimate.n_spins,
        trials: estimate.trials,
        seed: estimate.seed,
        mean_error: estimate.mean_error,
        std_error: estimate.std_error,
        analytic_error: estimate.analytic_error,
        acceptance_rate: estimate.acceptance_rate,
        z_score: estimate.z_score(),
    };
    let mut config = RunConfig::new("simulate", format, &output);
    config.n = Some(n);
    config.trials = Some(trials);
    config.seed = Some(seed);
    let text = match format {
        Format::Json => to_json(&Envelope {
            tool: TOOL,
            version: VERSION,
            command: "simulate",
            config,
            result: report,
        }),
        Format::Csv => {
            let mut t = config.comment_block();
            t.push_str("\nkey,value\n");
            let _ = write!(t, "n_spins,{}\n", report.n_spins);
            let _ = write!(t, "trials,{}\n", report.trials);
            let _ = write!(t, "seed,{}\n", report.seed);
            let _ = write!(t, "mean_error,{}\n", csv_num(report.mean_error));
            let _ = write!(t, "std_error,{}\n", csv_num(report.std_error));
            let _ = write!(t, "analytic_error,{}\n", csv_num(report.analytic_error));
            let _ = write!(t, "acceptance_rate,{}\n", csv_num(report.acceptance_rate));
            let _ = write!(t, "z_score,{}", csv_num(report.z_score));
            t
        }
    };
    emit(text, &output)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    n: u32,
    grid: usize,
    fidelity_diag: Vec<f64>,
    fidelity_off: Vec<f64>,
    checks: Vec<Check>,
    all_pass: bool,
}

/// Deterministic probe rotations covering both hemispheres of the
/// double cover.
fn probe_rotations(count: usize) -> Vec<GroupElement> {
    (0..count)
        .map(|k| {
            let k = k as f64;
            GroupElement::rot_z(0.37 + 0.71 * k)
                .compose(&GroupElement::rot_y(0.23 + 0.41 * k))
                .compose(&GroupElement::rot_z(1.13 + 1.87 * k))
        })
        .collect()
}

fn cmd_verify(n: u32, grid: usize, format: Format, output: Option<PathBuf>) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Usage("N must be \u{2265} 2".into()));
    }
    if n > 6 {
        return Err(Failure::Usage("oracle limited to N \u{2264} 6".into()));
    }
    let basis = SchurBasis::new(n).map_err(numerical)?;
    let state = ReferenceState::optimal(n).map_err(numerical)?;
    let model = LikelihoodModel::new(&state).map_err(numerical)?;
    let reference = fidelity_matrix(n).map_err(numerical)?;

    let mut checks = Vec::new();
    let mut push = |name: &'static str, value: f64, tolerance: f64, upper: bool| {
        let pass = if upper { value < tolerance } else { value > tolerance };
        checks.push(Check {
            name,
            value,
            tolerance,
            pass,
        });
    };

    push("casimir_residual", basis.casimir_residual(), 1e-10, true);
    let block = probe_rotations(5)
        .iter()
        .map(|g| basis.block_action_residual(g))
        .fold(0.0, f64::max);
    push("block_action_residual", block, 1e-9, true);
    let mut likelihood_dev = 0.0f64;
    for g in probe_rotations(50) {
        let dense = basis.likelihood(&state, &g).map_err(numerical)?;
        likelihood_dev = likelihood_dev.max((dense - model.likelihood(&g)).abs());
    }
    push("likelihood_equivalence", likelihood_dev, 1e-9, true);
    let (cross, self_dev) = basis.iso_overlaps(&state).map_err(numerical)?;
    push("iso_cross_overlap", cross, 1e-10, true);
    push("iso_self_overlap_dev", self_dev, 1e-10, true);
    let mut schmidt_dev = 0.0f64;
    for (j, spectrum) in basis.schmidt_spectra(&state).map_err(numerical)? {
        if j == state.classes()[0] {
            schmidt_dev = schmidt_dev.max((spectrum[0] - 1.0).abs());
        } else {
            let want = 1.0 / (j.dimension() as f64).sqrt();
            for s in &spectrum {
                schmidt_dev = schmidt_dev.max((s - want).abs());
            }
        }
    }
    push("schmidt_uniformity_dev", schmidt_dev, 1e-10, true);

    if n <= 4 {
        let haar = HaarGrid::cubic(grid)
            .map_err(|e| Failure::Usage(format!("invalid quadrature grid: {e}")))?;
        let residual = basis
            .completeness_residual(&state, &haar)
            .map_err(numerical)?;
        push("completeness_residual", residual, 1e-6, true);
        let mut weights: Vec<f64> = state
            .classes()
            .iter()
            .map(|j| (j.dimension() as f64).sqrt())
            .collect();
        weights[0] = 1.0;
        let control = basis
            .completeness_residual_with_weights(&state, &weights, &haar)
            .map_err(numerical)?;
        push("completeness_negative_control", control, 1e-2, false);
        let (band, beyond) = basis.m_entry_deviation(&haar).map_err(numerical)?;
        push("fidelity_band_deviation", band, 1e-6, true);
        push("fidelity_beyond_band", beyond, 1e-8, true);
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        n,
        grid,
        fidelity_diag: reference.diagonal().to_vec(),
        fidelity_off: reference.off_diagonal().to_vec(),
        checks,
        all_pass,
    };
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name)
        .collect();

    let mut config = RunConfig::new("verify", format, &output);
    config.n = Some(n);
    config.grid = Some(grid);
    let text = match format {
        Format::Json => to_json(&Envelope {
            tool: TOOL,
            version: VERSION,
            command: "verify",
            config,
            result: report,
        }),
        Format::Csv => {
            let mut t = config.comment_block();
            let join = |xs: &[f64]| {
                xs.iter()
                    .map(|x| csv_num(*x))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = write!(t, "\n# fidelity_diag: {}", join(&report.fidelity_diag));
            let _ = write!(t, "\n# fidelity_off: {}", join(&report.fidelity_off));
            t.push_str("\nname,value,tolerance,pass\n");
            for c in &report.checks {
                let _ = write!(
                    t,
                    "{},{},{},{}\n",
                    c.name,
                    csv_num(c.value),
                    csv_num(c.tolerance),
                    c.pass
                );
            }
            t.pop();
            t
        }
    };
    emit(text, &output)?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "verification failed: {}",
            failed.join(", ")
        )))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Optimize { n, format, output } => cmd_optimize(n, format, output),
        Cmd::Sweep {
            n_min,
            n_max,
            step,
            format,
            output,
        } => cmd_sweep(n_min, n_max, step, format, output),
        Cmd::Simulate {
            n,
            trials,
            seed,
            format,
            output,
        } => cmd_simulate(n, trials, seed, format, output),
        Cmd::Verify {
            n,
            grid,
            format,
            output,
        } => cmd_verify(n, grid, format, output),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.code());
    }
}
