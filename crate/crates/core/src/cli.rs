//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::coherence::{
    c_geometric_qubit, c_gf, c_l1, c_rel_entropy, geometric_coherence, FidelityDistance,
};
use crate::conversion::convert;
use crate::entanglement::{
    concurrence_two_qubit, e_geometric_two_qubit, e_rel_entropy_mc, hashing_lower_bound, mc_embed,
    ppt_is_separable_small,
};
use crate::error::{Error, Result};
use crate::io::{bipartite_to_json, read_state, LoadedState};
use crate::report::{summarize, MeasureReport};
use crate::simplex::OptimizerOptions;
use crate::states::{is_bipartite_incoherent, maximally_coherent, BipartiteState, DensityMatrix};
use crate::suites::{run_suite, Suite, SuiteConfig};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "COHERENCE_FORGE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "coherence-forge",
    version,
    about = "Coherence and entanglement measures, conversion and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct StateSource {
    /// State file (JSON)
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    /// Built-in state: `mc:<d>`, `bell`, `diag:<p>` or `diag:<p0>,<p1>,...`
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence measures of a state
    Measure {
        #[command(flatten)]
        source: StateSource,
        /// Extra distances: `bures`, `groverian` or `all`
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Optimizer seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optimizer stopping threshold
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Apply the generalized CNOT to `state ⊗ |0>` and report the entanglement
    Convert {
        #[command(flatten)]
        source: StateSource,
        /// Ancilla dimension (defaults to the system dimension)
        #[arg(long)]
        ancilla_dim: Option<usize>,
        /// Where to write the bipartite output state
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run a seeded verification suite and emit JSON lines
    Verify {
        /// theorem1, theorem2, cr-equality, monotonicity, convexity, qubit-chain, cr-minimum
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        ancilla_dim: Option<usize>,
        /// Incoherence threshold
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Measure, or `all` for monotonicity and convexity
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate qubit measures over |ρ₀₁| ∈ [0, ½]
    Sweep {
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses a `--preset` value.
pub fn preset_state(spec: &str) -> Result<LoadedState> {
    let bad = || Error::InvalidArgument(format!("unknown preset `{spec}`"));
    if spec == "bell" {
        let b = BipartiteState::bell();
        return Ok(LoadedState {
            state: b.into_state(),
            subsystems: Some((2, 2)),
        });
    }
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    let state = match kind {
        "mc" => {
            let d: usize = arg.parse().map_err(|_| bad())?;
            maximally_coherent(d)?.to_density()
        }
        "diag" => {
            let p: Vec<f64> = arg
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if p.len() == 1 {
                DensityMatrix::diagonal(&[p[0], 1.0 - p[0]])?
            } else {
                DensityMatrix::diagonal(&p)?
            }
        }
        _ => return Err(bad()),
    };
    Ok(LoadedState {
        state,
        subsystems: None,
    })
}

fn load(source: &StateSource) -> Result<LoadedState> {
    match (&source.input, &source.preset) {
        (Some(path), None) => read_state(path),
        (None, Some(p)) => preset_state(p),
        _ => Err(Error::InvalidArgument(
            "give exactly one of --input or --preset".into(),
        )),
    }
}

fn optimizer(seed: u64, tol: f64) -> Result<OptimizerOptions> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("--tol must be positive".into()));
    }
    Ok(OptimizerOptions {
        seed,
        tol,
        ..OptimizerOptions::default()
    })
}

fn emit(text: &str, output: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render(report: &MeasureReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => report.to_csv(),
    })
}

fn coherence_report(
    rho: &DensityMatrix,
    opts: &OptimizerOptions,
    report: &mut MeasureReport,
) -> Result<()> {
    let g = geometric_coherence(rho, opts)?;
    report.insert("c_l1", c_l1(rho));
    report.insert("c_rel_entropy", c_rel_entropy(rho));
    report.insert("c_geometric", g.value);
    report.meta("optimizer_iterations", g.iterations);
    if rho.dim() == 2 {
        report.insert("c_geometric_qubit", c_geometric_qubit(rho)?);
    }
    Ok(())
}

/// Report of `measure`.
pub fn cmd_measure(
    loaded: &LoadedState,
    extra: Option<&str>,
    opts: &OptimizerOptions,
) -> Result<MeasureReport> {
    let rho = &loaded.state;
    let mut report = MeasureReport::default();
    report.meta("dim", rho.dim());
    coherence_report(rho, opts, &mut report)?;
    let distances = match extra {
        None => vec![],
        Some("all") => vec![FidelityDistance::Bures, FidelityDistance::Groverian],
        Some("bures") => vec![FidelityDistance::Bures],
        Some("groverian") => vec![FidelityDistance::Groverian],
        Some(other) => {
            return Err(Error::InvalidArgument(format!(
                "unknown distance `{other}`"
            )))
        }
    };
    for g in distances {
        report.insert(&format!("c_{}", g.name()), c_gf(rho, g, opts)?);
    }
    Ok(report)
}

/// Report of `convert`, with the output state.
pub fn cmd_convert(
    loaded: &LoadedState,
    ancilla_dim: Option<usize>,
    opts: &OptimizerOptions,
) -> Result<(BipartiteState, MeasureReport)> {
    let rho = &loaded.state;
    let d_a = ancilla_dim.unwrap_or(rho.dim());
    let out = convert(rho, d_a)?;
    let mut report = MeasureReport::default();
    report.meta("d_s", rho.dim());
    report.meta("d_a", d_a);
    coherence_report(rho, opts, &mut report)?;
    report.insert("hashing_bound", hashing_lower_bound(&out));
    if d_a == rho.dim() {
        report.insert("e_rel_entropy", e_rel_entropy_mc(&mc_embed(rho))?);
    }
    if d_a == 2 && rho.dim() == 2 {
        report.insert("concurrence", concurrence_two_qubit(&out)?);
        report.insert("e_geometric", e_geometric_two_qubit(&out)?);
    }
    let separable = match ppt_is_separable_small(&out) {
        Ok(s) => json!(s),
        Err(Error::UnsupportedDims { .. }) if is_bipartite_incoherent(&out, 1e-12) => json!(true),
        Err(Error::UnsupportedDims { .. }) if hashing_lower_bound(&out) > 0.0 => json!(false),
        Err(Error::UnsupportedDims { .. }) => serde_json::Value::Null,
        Err(e) => return Err(e),
    };
    report.meta("separable", separable);
    Ok((out, report))
}

/// The sweep table over `ρ = [[½, r], [r, ½]]`.
pub fn cmd_sweep(step: f64, format: Format) -> Result<String> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument("--step must be positive".into()));
    }
    let n = (0.5 / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = (k as f64 * step).min(0.5);
        let rho = DensityMatrix::qubit(0.5, Complex64::new(r, 0.0))?;
        let sa = mc_embed(&rho).to_bipartite();
        rows.push([
            r,
            c_l1(&rho),
            c_geometric_qubit(&rho)?,
            concurrence_two_qubit(&sa)?,
            e_geometric_two_qubit(&sa)?,
        ]);
    }
    let cols = ["r01", "c_l1", "c_g", "concurrence_of_embed", "e_g_of_embed"];
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(&cols.join(","));
            s.push('\n');
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "{}", cells.join(","));
            }
        }
        Format::Json => {
            for row in &rows {
                let obj: serde_json::Map<String, serde_json::Value> = cols
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), json!(v)))
                    .collect();
                let _ = writeln!(s, "{}", serde_json::Value::Object(obj));
            }
        }
    }
    Ok(s)
}

/// JSON lines of a suite run: one header line carrying the timestamp and
/// configuration, then one record per check in trial order.
pub fn cmd_verify(suite: Suite, cfg: &SuiteConfig) -> Result<(String, bool)> {
    let records = run_suite(suite, cfg)?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let summary = summarize(&records);
    let header = json!({
        "suite": suite.name(),
        "timestamp": started,
        "dim": cfg.dim,
        "ancilla_dim": cfg.ancilla_dim,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "tol": cfg.tol,
        "measure": cfg.measure,
        "records": summary.trials,
        "failures": summary.failures,
    });
    let mut s = header.to_string();
    s.push('\n');
    for r in &records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok((s, summary.failures == 0))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::OptimizerNoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_CONFIG,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer"))
    })?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    configure_threads()?;
    match cli.command {
        Command::Measure {
            source,
            measure,
            format,
            output,
            seed,
            tol,
        } => {
            let report = cmd_measure(&load(&source)?, measure.as_deref(), &optimizer(seed, tol)?)?;
            emit(&render(&report, format)?, output.as_ref(), out)?;
        }
        Command::Convert {
            source,
            ancilla_dim,
            output,
            format,
            seed,
            tol,
        } => {
            let (state, report) =
                cmd_convert(&load(&source)?, ancilla_dim, &optimizer(seed, tol)?)?;
            if let Some(path) = output {
                fs::write(path, bipartite_to_json(&state)? + "\n")?;
            }
            emit(&render(&report, format)?, None, out)?;
        }
        Command::Verify {
            suite,
            trials,
            seed,
            dim,
            ancilla_dim,
            tol,
            measure,
            output,
        } => {
            let suite: Suite = suite.parse()?;
            let cfg = SuiteConfig {
                dim,
                ancilla_dim,
                trials,
                seed,
                tol,
                measure,
                ..SuiteConfig::default()
            };
            let (text, ok) = cmd_verify(suite, &cfg)?;
            emit(&text, output.as_ref(), out)?;
            if !ok {
                let _ = writeln!(err, "{suite}: property failures recorded");
                return Ok(EXIT_PROPERTY_FAILURE);
            }
        }
        Command::Sweep {
            step,
            format,
            output,
        } => {
            emit(&cmd_sweep(step, format)?, output.as_ref(), out)?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
