//! `approxdual`: batch front end over the approximately-dual frame estimators.
//!
//! Exit codes: 0 success, 1 target or tolerance failure, 2 usage or spec error.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use approxdual::cases::{all_pass, run_family, run_painless_case, run_spline_case, run_triple};
use approxdual::frame::FiniteFrame;
use approxdual::gabor::{
    duality_residuals_with, gabor_frame_bounds, iterated_window, walnut_defect_bound_with, GaborSystem,
    ShiftPlacement,
};
use approxdual::verify::{finite_model_check, seeded_test_set, verify_pair, DEFAULT_SEED};
use approxdual::windows::{Window, WindowSpec};
use approxdual::{Error, TruncationPolicy};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::RunConfig;

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum Failure {
    /// Exit 1.
    Target(String),
    /// Exit 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::DimensionMismatch { .. }
            | Error::MismatchedLattice { .. }
            | Error::SupportTooLong { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Target(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "approxdual", version, about = "Certified bounds for approximately dual Gabor and finite frames")]
struct Cli {
    /// TOML run configuration (keys: threads, out, [policy])
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for grid scans and quadrature
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Case {
    /// Gaussian analysis window, B_8 perturbation, translate-sum dual, b = 0.06
    E1,
    /// e^{-4x^2}, compressed B_8, canonical quotient dual, b = 0.1
    E2,
    /// Non-transitive pseudo-duality triple in C^2
    R1,
    /// Dual family {c e1, e1, e2} of {0, e1, e2}
    A1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Placement {
    Analysis,
    Synthesis,
}

impl From<Placement> for ShiftPlacement {
    fn from(p: Placement) -> Self {
        match p {
            Placement::Analysis => ShiftPlacement::Analysis,
            Placement::Synthesis => ShiftPlacement::Synthesis,
        }
    }
}

#[derive(clap::Args, Debug)]
struct Lattice {
    /// Time shift parameter
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Modulation parameter
    #[arg(long)]
    b: f64,
}

#[derive(clap::Args, Debug)]
struct PairArgs {
    /// Analysis window spec: inline JSON or @path
    #[arg(long)]
    analysis: String,
    /// Synthesis window spec: inline JSON or @path
    #[arg(long)]
    synthesis: String,
    #[command(flatten)]
    lattice: Lattice,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a reference configuration and compare against its targets
    Reproduce {
        case: Case,
        /// Coefficient c of the a1 family
        #[arg(long, default_value_t = 100.0)]
        c: f64,
        /// Perturbation size of the r1 triple
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
    /// Frame bounds of a Gabor system
    Bounds {
        /// Window spec: inline JSON or @path
        #[arg(long)]
        window: String,
        #[command(flatten)]
        lattice: Lattice,
    },
    /// Certified bound on ||I - UT*|| for a Gabor pair
    Walnut {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value = "analysis")]
        placement: Placement,
    },
    /// Suprema of the duality residuals of a Gabor pair
    Residuals {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value = "analysis")]
        placement: Placement,
    },
    /// First Neumann iterate of the synthesis window
    Iterate {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Empirical defect and oracle cross-check on seeded test functions
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 10)]
        functions: usize,
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Invariant battery on two finite frames given as JSON files
    FiniteCheck {
        #[arg(long)]
        analysis: PathBuf,
        #[arg(long)]
        synthesis: PathBuf,
    },
    /// Tabulate a window as CSV with columns x,value
    SampleWindow {
        /// Window spec: inline JSON or @path
        #[arg(long)]
        window: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        step: f64,
    },
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    passed: bool,
    policy: &'a TruncationPolicy,
    result: T,
}

struct Output {
    command: &'static str,
    passed: bool,
    body: String,
}

fn json<T: Serialize>(command: &'static str, passed: bool, policy: &TruncationPolicy, result: T) -> Result<Output, Failure> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        passed,
        policy,
        result,
    };
    let mut body = serde_json::to_string_pretty(&env).map_err(|e| Failure::Target(e.to_string()))?;
    body.push('\n');
    Ok(Output { command, passed, body })
}

fn read_arg(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_owned()),
    }
}

fn window_arg(arg: &str, policy: &TruncationPolicy) -> Result<Window, Failure> {
    let spec: WindowSpec =
        serde_json::from_str(&read_arg(arg)?).map_err(|e| Failure::Usage(format!("invalid window spec: {e}")))?;
    Ok(Window::from_spec_with(&spec, policy)?)
}

fn systems(pair: &PairArgs, policy: &TruncationPolicy) -> Result<(GaborSystem, GaborSystem), Failure> {
    let (a, b) = (pair.lattice.a, pair.lattice.b);
    Ok((
        GaborSystem::new(window_arg(&pair.analysis, policy)?, a, b)?,
        GaborSystem::new(window_arg(&pair.synthesis, policy)?, a, b)?,
    ))
}

fn frame_file(path: &Path) -> Result<FiniteFrame, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid frame {}: {e}", path.display())))
}

/// Decimal places needed to print multiples of `step` without noise.
fn decimals(step: f64) -> usize {
    (0..=12).find(|&p| {
        let s = step * 10f64.powi(p as i32);
        (s - s.round()).abs() < 1e-9 * s.abs().max(1.0)
    })
    .unwrap_or(12)
}

fn sample_csv(w: &Window, from: f64, to: f64, step: f64) -> Result<String, Failure> {
    if !(step > 0.0 && step.is_finite()) || from.partial_cmp(&to).is_none_or(|o| o.is_gt()) {
        return Err(Failure::Usage("need step > 0 and from <= to".into()));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    let prec = decimals(step).max(decimals(from));
    let mut out = String::from("x,value\n");
    for i in 0..count {
        let x = from + i as f64 * step;
        out.push_str(&format!("{x:.prec$},{}\n", w.value(x)));
    }
    Ok(out)
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Output, Failure> {
    let policy = &cfg.policy;
    match &cli.command {
        Command::Reproduce { case, c, epsilon } => match case {
            Case::E1 => {
                let r = run_spline_case(policy)?;
                json("reproduce e1", all_pass(&r.targets), policy, r)
            }
            Case::E2 => {
                let r = run_painless_case(policy)?;
                json("reproduce e2", all_pass(&r.targets), policy, r)
            }
            Case::R1 => {
                let r = run_triple(*epsilon)?;
                json("reproduce r1", all_pass(&r.targets), policy, r)
            }
            Case::A1 => {
                let r = run_family(*c)?;
                json("reproduce a1", all_pass(&r.targets), policy, r)
            }
        },
        Command::Bounds { window, lattice } => {
            let system = GaborSystem::new(window_arg(window, policy)?, lattice.a, lattice.b)?;
            json("bounds", true, policy, gabor_frame_bounds(&system, policy)?)
        }
        Command::Walnut { pair, placement } => {
            let (phi, g) = systems(pair, policy)?;
            json("walnut", true, policy, walnut_defect_bound_with(&phi, &g, (*placement).into(), policy)?)
        }
        Command::Residuals { pair, placement } => {
            let (phi, g) = systems(pair, policy)?;
            json("residuals", true, policy, duality_residuals_with(&phi, &g, (*placement).into(), policy)?)
        }
        Command::Iterate { pair } => {
            let (phi, g) = systems(pair, policy)?;
            json("iterate", true, policy, iterated_window(&phi, &g, policy)?.report())
        }
        Command::Verify {
            pair,
            functions,
            points,
            seed,
        } => {
            let (phi, g) = systems(pair, policy)?;
            let tests = seeded_test_set(*seed, *functions)?;
            let r = verify_pair(&phi, &g, &tests, *points, policy)?;
            json("verify", r.sandwiched(), policy, r)
        }
        Command::FiniteCheck { analysis, synthesis } => {
            let r = finite_model_check(&frame_file(analysis)?, &frame_file(synthesis)?);
            json("finite-check", r.passed(), policy, r)
        }
        Command::SampleWindow { window, from, to, step } => Ok(Output {
            command: "sample-window",
            passed: true,
            body: sample_csv(&window_arg(window, policy)?, *from, *to, *step)?,
        }),
    }
}

fn emit(out: &Output, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, &out.body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(out.body.as_bytes())
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let mut cfg = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if cli.threads.is_some() {
            cfg.threads = cli.threads;
        }
        if cli.out.is_some() {
            cfg.out.clone_from(&cli.out);
        }
        if let Some(n) = cfg.threads {
            if n == 0 {
                return Err(Failure::Usage("--threads must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::Usage(e.to_string()))?;
        }
        let out = run(&cli, &cfg)?;
        emit(&out, cfg.out.as_deref())?;
        Ok(out)
    })();
    match result {
        Ok(out) if out.passed => ExitCode::SUCCESS,
        Ok(out) => {
            eprintln!("{}: targets not met", out.command);
            ExitCode::from(1)
        }
        Err(Failure::Target(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
