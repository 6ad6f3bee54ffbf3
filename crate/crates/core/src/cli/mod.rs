//! The `phasekick` command-line front end.
//!
//! Exit codes: 0 on success, 1 for config, input, or insufficient-data
//! errors, 2 for numeric or resource failures (including output I/O).

pub mod config;
pub mod csv_io;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::analysis::{
    fit_decay, parrondo_report, DecayFit, DecayModel, ParrondoReport, MODULUS_FLOOR,
    NOISE_FLOOR_SIGMAS,
};
use crate::error::Error;
use crate::exact::exact_trace;
use crate::monte_carlo::{mc_trace, SamplerSpec};
use crate::noise::{parrondo_pair, ParrondoParams};
use crate::state::DensityMatrix;
use crate::trace::CoherenceTrace;
use config::{Engine, Scenario, ScenarioConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_)
            | Error::ContractViolation(_)
            | Error::InsufficientData { .. } => Self::input(e.to_string()),
            Error::TooLarge(_) | Error::ResourceLimit { .. } => Self::failure(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "phasekick",
    version,
    about = "Qubit dephasing under correlated random phase kicks"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo sampling (0 = all cores). Results do
    /// not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario config and write its coherence trace as CSV.
    Run {
        config: PathBuf,
        /// Overrides the config's `output` path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit linear- and quadratic-exponent decay laws to a trace CSV.
    Fit {
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Compare the two private baths against their random mixture.
    ParrondoDemo {
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        /// Probability of picking bath A at each step.
        #[arg(long, default_value_t = 0.5)]
        weight: f64,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub process: &'static str,
    pub engine: Engine,
    pub steps: usize,
    pub trajectories: Option<usize>,
    pub final_factor: Complex64,
    pub final_state: DensityMatrix,
    /// Largest `|mc − exact|` in standard errors (engine = both).
    pub max_deviation_sigmas: Option<f64>,
    pub written: Vec<PathBuf>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    ScenarioConfig::parse(&text)
        .and_then(ScenarioConfig::validate)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_csv(trace: &CoherenceTrace, path: &Path) -> Result<(), CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::failure(format!("cannot write {}: {e}", path.display())))?;
    csv_io::write_trace(trace, BufWriter::new(file))
        .map_err(|e| CliError::failure(format!("cannot write {}: {e}", path.display())))
}

/// `trace.csv` → `trace.exact.csv`
pub fn exact_companion_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match output.extension() {
        Some(ext) => format!("{stem}.exact.{}", ext.to_string_lossy()),
        None => format!("{stem}.exact"),
    };
    output.with_file_name(name)
}

fn max_deviation(mc: &CoherenceTrace, exact: &CoherenceTrace) -> f64 {
    mc.points()
        .iter()
        .zip(exact.points())
        .filter_map(|(m, e)| {
            let se = m.stderr?;
            let d = m.factor - e.factor;
            let z = |diff: f64, s: f64| if s > 0.0 { diff.abs() / s } else { 0.0 };
            Some(z(d.re, se.re).max(z(d.im, se.im)))
        })
        .fold(0.0, f64::max)
}

pub fn run_scenario(scenario: &Scenario) -> Result<RunSummary, CliError> {
    let n = scenario.steps;
    let exact = match scenario.engine {
        Engine::Exact | Engine::Both => {
            Some(exact_trace(&scenario.process, &scenario.initial_state, n)?.0)
        }
        Engine::MonteCarlo => None,
    };
    let mc = match scenario.sampling {
        Some(s) if n > 0 => {
            let mut spec =
                SamplerSpec::for_process(scenario.process.clone(), n, s.trajectories, s.seed)?;
            if let Some(cap) = s.work_cap {
                spec = spec.with_work_cap(cap);
            }
            Some(mc_trace(&spec)?.trace)
        }
        // no kicks: nothing to sample
        Some(_) => Some(CoherenceTrace::exact(std::iter::empty())),
        None => None,
    };

    let mut written = Vec::new();
    let primary = mc.as_ref().or(exact.as_ref()).expect("some engine ran");
    write_csv(primary, &scenario.output)?;
    written.push(scenario.output.clone());
    let mut max_deviation_sigmas = None;
    if let (Some(m), Some(e)) = (&mc, &exact) {
        let companion = exact_companion_path(&scenario.output);
        write_csv(e, &companion)?;
        written.push(companion);
        max_deviation_sigmas = Some(max_deviation(m, e));
    }

    let final_trace = exact.as_ref().unwrap_or(primary);
    let final_factor = final_trace.last().expect("trace has step 0").factor;
    let final_state = scenario.initial_state.dephase(final_factor)?;
    Ok(RunSummary {
        process: scenario.process.kind_name(),
        engine: scenario.engine,
        steps: n,
        trajectories: scenario.sampling.map(|s| s.trajectories),
        final_factor,
        final_state,
        max_deviation_sigmas,
        written,
    })
}

pub fn render_run_summary(s: &RunSummary) -> String {
    let mut out = String::new();
    let engine = match s.engine {
        Engine::Exact => "exact",
        Engine::MonteCarlo => "monte_carlo",
        Engine::Both => "both",
    };
    let _ = writeln!(out, "process: {}", s.process);
    let _ = writeln!(out, "engine: {engine}");
    let _ = writeln!(out, "steps: {}", s.steps);
    if let Some(t) = s.trajectories {
        let _ = writeln!(out, "trajectories: {t}");
    }
    let f = s.final_factor;
    let _ = writeln!(
        out,
        "final factor: {:.12} {:+.12}i (|f| = {:.12})",
        f.re,
        f.im,
        f.norm()
    );
    let b = s.final_state.b();
    let _ = writeln!(
        out,
        "final state: a = {:.12}, d = {:.12}, b = {:.12} {:+.12}i",
        s.final_state.a(),
        s.final_state.d(),
        b.re,
        b.im
    );
    if let Some(z) = s.max_deviation_sigmas {
        let _ = writeln!(out, "max |monte_carlo - exact|: {z:.3} stderr");
    }
    for p in &s.written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    out
}

pub fn fit_file(path: &Path) -> Result<DecayFit, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let trace = csv_io::read_trace(file)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(fit_decay(&trace)?)
}

pub fn noise_floor_rule() -> String {
    format!("k=0 excluded; points with |f| <= {MODULUS_FLOOR:e} or |f| <= {NOISE_FLOOR_SIGMAS}*stderr excluded")
}

pub fn render_fit(fit: &DecayFit, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut value = serde_json::to_value(fit).expect("fit serializes");
            value["noise_floor_rule"] = noise_floor_rule().into();
            format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))
        }
        OutputFormat::Text => {
            let head = match fit.model {
                DecayModel::LinearExponent => {
                    format!(
                        "model=linear gamma={:.6} lambda={:.6}",
                        fit.per_step_factor, fit.rate
                    )
                }
                DecayModel::QuadraticExponent => {
                    format!(
                        "model=quadratic lambda={:.6} gamma={:.6}",
                        fit.rate, fit.per_step_factor
                    )
                }
            };
            format!(
                "{head} phase={:.6} sse_linear={:.6e} sse_quadratic={:.6e} points_used={}\n# {}\n",
                fit.phase_per_step,
                fit.sse_linear,
                fit.sse_quadratic,
                fit.points_used,
                noise_floor_rule()
            )
        }
    }
}

pub fn parrondo_demo(epsilon: f64, weight: f64, steps: usize) -> Result<ParrondoReport, CliError> {
    let params = ParrondoParams::new(epsilon, weight)?;
    let (a, b) = parrondo_pair(&params)?;
    Ok(parrondo_report(&a, &b, weight, 0.0, epsilon, steps)?)
}

pub fn render_report(r: &ParrondoReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(r).expect("json")),
        OutputFormat::Text => format!(
            "gamma_a={:.6}\ngamma_b={:.6}\ngamma_mixed={:.6}\nimprovement={:.6}\nverdict={}\n",
            r.gamma_a, r.gamma_b, r.gamma_mixed, r.improvement, r.verdict
        ),
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Run { config, output } => {
            let mut scenario = load_scenario(&config)?;
            if let Some(path) = output {
                scenario.output = path;
            }
            Ok(render_run_summary(&run_scenario(&scenario)?))
        }
        Command::Fit { csv, format } => Ok(render_fit(&fit_file(&csv)?, format)),
        Command::ParrondoDemo {
            epsilon,
            weight,
            steps,
            format,
        } => Ok(render_report(
            &parrondo_demo(epsilon, weight, steps)?,
            format,
        )),
    }
}

/// Parses `args`, runs the command, prints its output, and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_path() {
        assert_eq!(
            exact_companion_path(Path::new("out/trace.csv")),
            PathBuf::from("out/trace.exact.csv")
        );
        assert_eq!(
            exact_companion_path(Path::new("trace")),
            PathBuf::from("trace.exact")
        );
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            CliError::from(Error::InsufficientData {
                usable: 1,
                required: 3
            })
            .code,
            1
        );
        assert_eq!(
            CliError::from(Error::ResourceLimit {
                requested: 10,
                cap: 1
            })
            .code,
            2
        );
        assert_eq!(CliError::from(Error::TooLarge("x".into())).code, 2);
    }

    #[test]
    fn demo_text_output() {
        let r = parrondo_demo(1e-6, 0.5, 30).unwrap();
        let text = render_report(&r, OutputFormat::Text);
        assert!(text.contains("gamma_mixed=0.6666"), "{text}");
        assert!(text.contains("verdict=true"));
        assert_eq!(parrondo_demo(0.3, 0.5, 1).unwrap_err().code, 1);
        assert_eq!(parrondo_demo(1e-9, 0.5, 30).unwrap_err().code, 1);
    }
}
