use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semihilbert::battery::{run_battery, BatteryConfig, BatteryReport};
use semihilbert::invariants::classify;
use semihilbert::parallelism::{radius_parallel, seminorm_parallel, PARALLEL_TOL};
use semihilbert::problem::ProblemFile;
use semihilbert::shell::{shell_sample, shell_summary, shell_summary_with_probe, ShellMode};

#[derive(Parser)]
#[command(name = "semihilbert", version, about = "Operator quantities on semi-Hilbertian spaces")]
struct Cli {
    /// Write the loaded problem file in canonical form to this path.
    #[arg(long, global = true, value_name = "PATH")]
    dump_canonical: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ambient,
    Compressed,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Seminorm,
    Radius,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar invariants and classification of T.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Sample the Davis-Wielandt shell of T into a CSV file.
    Shell {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        count: usize,
        /// Magnitude of the null-space component of ambient samples.
        #[arg(long, default_value_t = 1.0)]
        null_scale: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also probe convexity at midpoints of this many random point pairs.
        #[arg(long, default_value_t = 0)]
        probe_pairs: usize,
    },
    /// Classification flags of T.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Parallelism certificate for the pair (T, S).
    Parallel {
        file: PathBuf,
        #[arg(long, value_enum)]
        relation: RelationArg,
        #[arg(long, default_value_t = PARALLEL_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run the randomized property battery.
    Verify {
        /// Dimension range, e.g. `2..6` (inclusive).
        #[arg(long, default_value = "2..6", value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20000)]
        oracle_samples: usize,
        /// Print the full report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn parse_dims(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .unwrap_or((text, text));
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad lower dimension in {text:?}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad upper dimension in {text:?}"))?;
    if lo < 1 || hi < lo {
        return Err(format!("dimension range {text:?} must satisfy 1 <= lo <= hi"));
    }
    Ok((lo, hi))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

fn load(path: &Path, dump: Option<&Path>) -> Result<ProblemFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let problem = ProblemFile::parse(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    if let Some(out) = dump {
        fs::write(out, problem.canonical()).map_err(|e| invalid(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(problem)
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

/// Puts `extra` fields in front of the serialized object.
fn with_fields(extra: Value, body: impl serde::Serialize) -> Value {
    let mut out = extra.as_object().cloned().unwrap_or_default();
    if let Value::Object(fields) = serde_json::to_value(body).expect("serializable") {
        out.extend(fields);
    }
    Value::Object(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let dump = cli.dump_canonical.as_deref();
    match cli.command {
        Command::Analyze { file, tol, seed } => {
            let problem = load(&file, dump)?;
            let ctx = problem.context().map_err(invalid)?;
            let report = classify(&ctx, &problem.t, tol, seed).map_err(invalid)?;
            print_json(&with_fields(json!({ "seed": seed, "tol": tol, "n": ctx.dim(), "rank": ctx.rank() }), report));
        }
        Command::Check { file, tol, seed } => {
            let problem = load(&file, dump)?;
            let ctx = problem.context().map_err(invalid)?;
            let r = classify(&ctx, &problem.t, tol, seed).map_err(invalid)?;
            print_json(&json!({
                "seed": seed,
                "tol": tol,
                "aBounded": r.a_bounded,
                "aAdjointable": r.a_adjointable,
                "aSelfAdjoint": r.a_self_adjoint,
                "aNormal": r.a_normal,
                "aHyponormal": r.a_hyponormal,
                "aUnitary": r.a_unitary,
                "aNormaloid": r.a_normaloid,
                "marginal": r.marginal,
            }));
        }
        Command::Shell {
            file,
            mode,
            count,
            null_scale,
            seed,
            out,
            probe_pairs,
        } => {
            let problem = load(&file, dump)?;
            let ctx = problem.context().map_err(invalid)?;
            let mode = match mode {
                Mode::Ambient => ShellMode::Ambient,
                Mode::Compressed => ShellMode::Compressed,
            };
            if !(null_scale.is_finite() && null_scale >= 0.0) {
                return Err(invalid("--null-scale must be a finite nonnegative number"));
            }
            let cloud = shell_sample(&ctx, &problem.t, mode, count, seed, null_scale).map_err(invalid)?;
            let mut csv = String::from("re_lambda,im_lambda,mu\n");
            for pt in &cloud.points {
                writeln!(csv, "{},{},{}", pt.lambda.re, pt.lambda.im, pt.mu).expect("string write");
            }
            fs::write(&out, csv).map_err(|e| invalid(format!("cannot write {}: {e}", out.display())))?;
            let summary = if probe_pairs > 0 {
                shell_summary_with_probe(&ctx, &problem.t, &cloud, &[], probe_pairs).map_err(invalid)?
            } else {
                shell_summary(&cloud)
            };
            print_json(&with_fields(json!({ "nullScale": null_scale }), summary));
        }
        Command::Parallel {
            file,
            relation,
            tol,
            seed,
        } => {
            let problem = load(&file, dump)?;
            let ctx = problem.context().map_err(invalid)?;
            let s = problem.second().map_err(|e| invalid(format!("{}: {e}", file.display())))?;
            let cert = match relation {
                RelationArg::Seminorm => seminorm_parallel(&ctx, &problem.t, s, tol, seed),
                RelationArg::Radius => radius_parallel(&ctx, &problem.t, s, tol, seed),
            }
            .map_err(invalid)?;
            print_json(&serde_json::to_value(cert).expect("serializable"));
        }
        Command::Verify {
            dims,
            instances,
            seed,
            oracle_samples,
            json,
        } => {
            if dump.is_some() {
                return Err(invalid("--dump-canonical needs a problem file"));
            }
            let config = BatteryConfig {
                min_dim: dims.0,
                max_dim: dims.1,
                instances,
                seed,
                oracle_samples: oracle_samples.max(1),
            };
            let report = run_battery(&config).map_err(invalid)?;
            if json {
                print_json(&serde_json::to_value(&report).expect("serializable"));
            } else {
                print!("{}", render_table(&report));
            }
            if !report.passed {
                return Err(Failure {
                    code: 1,
                    message: "verification failed".into(),
                });
            }
        }
    }
    Ok(())
}

fn render_table(report: &BatteryReport) -> String {
    let mut out = format!(
        "seed {} dims {}..{} instances {}\n",
        report.seed, report.dims[0], report.dims[1], report.instances
    );
    let width = report.anchors.iter().map(|a| a.anchor.len()).max().unwrap_or(0);
    writeln!(out, "{:width$}  result  runs  failures  skipped", "anchor").expect("string write");
    for a in &report.anchors {
        let status = if a.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{:width$}  {status:6}  {:4}  {:8}  {:7}",
            a.anchor, a.runs, a.failures, a.skipped
        )
        .expect("string write");
        if let Some(detail) = &a.first_failure {
            writeln!(out, "{:width$}    first failure: {detail}", "").expect("string write");
        }
    }
    writeln!(out, "overall {}", if report.passed { "PASS" } else { "FAIL" }).expect("string write");
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
