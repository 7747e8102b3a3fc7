//! Command-line front end: evaluate constructed functions, run continuity
//! checks, produce witnesses and oscillation estimates, and run scene
//! verification suites.
//!
//! Exit codes: 0 success, 1 a check failed or found a counterexample,
//! 2 usage or scene errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssc::analysis::{
    escape_witness, finite_criterion_check, nearly_open_trace_check, oscillation_estimate,
    s_continuity_check, separate_continuity_check, ssc_check, NetSpec, OscVerdict, TraceFamily,
    TraceMode,
};
use ssc::scene::{emit_slice, format_float, parse_scene, run_tasks, Scene};
use ssc::topology::{projective_symmetry_check, MutationProbe, SetPredicate};
use ssc::Error;

#[derive(Parser)]
#[command(name = "ssc", about = "Continuity analysis on countable products of normed spaces")]
struct Cli {
    /// Scene file describing spaces, points, functions, and tasks.
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    /// Seed folded into every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write primary output (CSV) to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance for continuity verdicts.
    #[arg(long, global = true, default_value_t = 1e-2)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FnPoint {
    /// Function name from the scene.
    #[arg(long)]
    function: String,
    /// Point name from the scene.
    #[arg(long)]
    point: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a function at a point.
    Eval(FnPoint),
    /// Run a continuity check.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
    /// Construct a structural discontinuity witness at a point.
    Witness {
        #[command(flatten)]
        at: FnPoint,
        /// How far beyond the point's support to place the witness override.
        #[arg(long, default_value_t = 1)]
        offset: usize,
    },
    /// Estimate the oscillation of a function at a point.
    Oscillation(FnPoint),
    /// Validate a function's construction and print a summary.
    Build {
        #[arg(long)]
        function: String,
    },
    /// Emit a CSV slice of a function over two coordinates.
    Slice {
        #[command(flatten)]
        at: FnPoint,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 2.0)]
        hi: f64,
        #[arg(long, default_value_t = 0.25)]
        step: f64,
    },
    /// Run every task of the scene and emit a CSV report.
    Verify,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Strong separate continuity at a point.
    Ssc(FnPoint),
    /// Separate (per-variable) continuity at a point.
    Sep(FnPoint),
    /// Finite-coordinate continuity criterion at a point.
    Criterion {
        #[command(flatten)]
        at: FnPoint,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 6)]
        budget: usize,
    },
    /// Constancy on the σ-component of a point.
    Scont(FnPoint),
    /// Openness of every finite trace of a function's claimed set.
    NearlyOpen {
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 4)]
        horizon: usize,
    },
    /// Stability of a component union under splicing toward a point.
    Symmetric {
        /// Comma-separated names of component representative points.
        #[arg(long, value_delimiter = ',')]
        components: Vec<String>,
        /// Point spliced into the members.
        #[arg(long)]
        at: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(2)
        }
    }
}

fn scene_of(cli: &Cli) -> Result<Scene, Error> {
    let path = cli
        .scene
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--scene is required".into()))?;
    parse_scene(path)
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let mut net = NetSpec::default();
    net.tol = cli.tol;
    match &cli.command {
        Command::Eval(fp) => {
            let scene = scene_of(cli)?;
            let v = scene
                .function(&fp.function)?
                .evaluate(&scene.amb, scene.point(&fp.point)?)?;
            emit(cli, &format!("{}\n", format_float(v)))?;
            Ok(true)
        }
        Command::Check { which } => check(cli, &net, which),
        Command::Witness { at, offset } => {
            let scene = scene_of(cli)?;
            let f = scene.function(&at.function)?;
            let bp = f
                .balls()
                .first()
                .ok_or_else(|| Error::Precondition("witness needs a ball function".into()))?;
            let (w, rho) = escape_witness(&scene.amb, bp, scene.point(&at.point)?, *offset)?;
            let val = f.evaluate(&scene.amb, &w)?;
            emit(
                cli,
                &format!("rho,{}\nvalue,{}\nwitness,{w:?}\n", format_float(rho), format_float(val)),
            )?;
            Ok(true)
        }
        Command::Oscillation(fp) => {
            let scene = scene_of(cli)?;
            let est = oscillation_estimate(
                &scene.amb,
                scene.function(&fp.function)?,
                scene.point(&fp.point)?,
                &net,
                cli.seed,
            )?;
            emit(
                cli,
                &format!(
                    "certified_lower,{}\nsampled_upper,{}\nverdict,{:?}\n",
                    format_float(est.certified_lower),
                    format_float(est.sampled_upper),
                    est.verdict
                ),
            )?;
            Ok(est.verdict != OscVerdict::Inconclusive)
        }
        Command::Build { function } => {
            let scene = scene_of(cli)?;
            let f = scene.function(function)?;
            emit(
                cli,
                &format!(
                    "kind,{:?}\nballs,{}\nanchor,{:?}\n",
                    std::mem::discriminant(&f.kind),
                    f.balls().len(),
                    f.anchor()
                ),
            )?;
            Ok(true)
        }
        Command::Slice {
            at,
            i,
            j,
            lo,
            hi,
            step,
        } => {
            let scene = scene_of(cli)?;
            let csv = emit_slice(
                &scene.amb,
                scene.function(&at.function)?,
                scene.point(&at.point)?,
                *i,
                *j,
                *lo,
                *hi,
                *step,
            )?;
            emit(cli, &csv)?;
            Ok(true)
        }
        Command::Verify => {
            let scene = scene_of(cli)?;
            let report = run_tasks(&scene, cli.seed)?;
            emit(cli, &report.to_csv())?;
            Ok(report.failures == 0)
        }
    }
}

fn check(cli: &Cli, net: &NetSpec, which: &CheckCommand) -> Result<bool, Error> {
    let scene = scene_of(cli)?;
    let amb = &scene.amb;
    match which {
        CheckCommand::Ssc(fp) => {
            let r = ssc_check(
                amb,
                scene.function(&fp.function)?,
                scene.point(&fp.point)?,
                net,
                cli.seed,
            )?;
            println!(
                "ssc {} final_gap={}",
                if r.pass { "pass" } else { "fail" },
                format_float(r.per_level_sup.last().copied().unwrap_or(0.0))
            );
            Ok(r.pass)
        }
        CheckCommand::Sep(fp) => {
            let r = separate_continuity_check(
                amb,
                scene.function(&fp.function)?,
                scene.point(&fp.point)?,
                net,
                cli.seed,
            )?;
            println!("sep {}", if r.pass { "pass" } else { "fail" });
            Ok(r.pass)
        }
        CheckCommand::Criterion { at, eps, budget } => {
            let r = finite_criterion_check(
                amb,
                scene.function(&at.function)?,
                scene.point(&at.point)?,
                *eps,
                *budget,
                cli.seed,
            )?;
            match &r.found {
                Some((t0, _)) => {
                    println!("criterion found t0={t0:?}");
                    Ok(true)
                }
                None => {
                    println!("criterion not-found configurations={}", r.configurations);
                    Ok(false)
                }
            }
        }
        CheckCommand::Scont(fp) => {
            let v = s_continuity_check(
                amb,
                scene.function(&fp.function)?,
                scene.point(&fp.point)?,
                200,
                net.tol,
                cli.seed,
            )?;
            println!(
                "scont {}",
                if v.is_constant() { "constant" } else { "varies" }
            );
            Ok(v.is_constant())
        }
        CheckCommand::NearlyOpen { function, horizon } => {
            let f = scene.function(function)?;
            let traces = TraceFamily::from_claimed(amb, &f.claimed_discontinuity)?;
            let verdicts = nearly_open_trace_check(amb, &traces, *horizon, TraceMode::Analytic)?;
            let pass = verdicts.iter().all(|v| v.is_open());
            println!("nearly-open {}", if pass { "pass" } else { "fail" });
            Ok(pass)
        }
        CheckCommand::Symmetric { components, at } => {
            let reps: Vec<_> = components
                .iter()
                .map(|n| scene.point(n).cloned())
                .collect::<Result<_, _>>()?;
            let sample: Vec<_> = reps.clone();
            let set = SetPredicate::component_union(reps);
            let probe = MutationProbe::with_seed(cli.seed);
            let verdict = projective_symmetry_check(amb, &set, scene.point(at)?, &sample, &probe)?;
            println!(
                "symmetric {}",
                if verdict.passed() { "pass" } else { "fail" }
            );
            Ok(verdict.passed())
        }
    }
}
