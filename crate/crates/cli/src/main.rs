use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lapbounds::generators::{InstanceList, InstanceStream};
use lapbounds::harness::{
    check_identities, evaluate_instance, run_suite, KSpec, RSpec, SuiteConfig,
};
use lapbounds::instance::{read_instance, write_instance};
use lapbounds::{laplacian, spectrum, BoundId, BoundReport, Error, Family, LaplacianKind, Tier};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "lapbounds",
    version,
    about = "Check spectral bounds on simplicial complexes"
)]
struct Cli {
    /// Inequality tolerance.
    #[arg(long, global = true, env = "LB_TOL")]
    tol: Option<f64>,
    /// JSON file whose keys mirror the long flags of `search` and `check`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a Laplacian spectrum.
    Spectrum {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// upper, lower, signless-upper or signless-lower
        #[arg(long, default_value = "upper")]
        kind: String,
    },
    /// Evaluate bounds on one instance and print a report per line.
    Check {
        file: PathBuf,
        #[command(flatten)]
        sel: Selection,
        /// Family assumption such as `forest` or `max_degree=3`; repeatable.
        #[arg(long)]
        assume: Vec<String>,
    },
    /// Run a bound suite over a generated stream.
    Search {
        /// Stream descriptor, e.g. `random_graph:n=8,p=0.4,seed=1,count=1000`.
        #[arg(long, conflicts_with = "enumerate")]
        family: Option<String>,
        /// Shorthand for `--family enumerate:n=N`.
        #[arg(long)]
        enumerate: Option<usize>,
        #[command(flatten)]
        sel: Selection,
        /// Only write reports with slack at most this value.
        #[arg(long)]
        min_slack: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        connected_only: bool,
        /// Skip reports.jsonl; violations and the summary are still written.
        #[arg(long)]
        no_reports: bool,
        /// Entries kept per bound in the printed leaderboard.
        #[arg(long)]
        leaderboard: Option<usize>,
    },
    /// Residuals of the spectral identities that apply to an instance.
    Identities { file: PathBuf },
    /// Write the instances of a stream as JSON files.
    Gen {
        descriptor: String,
        #[arg(long)]
        out: PathBuf,
        /// Stop after this many instances.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// List the registered bound ids.
    List,
}

#[derive(Args)]
struct Selection {
    /// Comma-separated ids, or `all-applicable`.
    #[arg(long)]
    bounds: Option<String>,
    /// `paper-valid`, `a..b` (`b` may be `n`) or a list.
    #[arg(long)]
    k: Option<String>,
    /// `all` or a list.
    #[arg(long)]
    r: Option<String>,
    /// Report inapplicable combinations as errors.
    #[arg(long)]
    strict: bool,
}

/// Keys accepted by `--config`; command-line flags win.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    bounds: Option<String>,
    k: Option<String>,
    r: Option<String>,
    tol: Option<f64>,
    strict: Option<bool>,
    family: Option<String>,
    enumerate: Option<usize>,
    min_slack: Option<f64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    connected_only: Option<bool>,
    no_reports: Option<bool>,
    leaderboard: Option<usize>,
}

/// Failure with the exit code it maps to.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) | Error::Degenerate(_) => 1,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, Fail> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn tolerance(cli: Option<f64>, cfg: &ConfigFile) -> Result<f64, Fail> {
    let tol = cli.or(cfg.tol).unwrap_or(lapbounds::bounds::DEFAULT_TOL);
    if !tol.is_finite() || tol < 0.0 {
        return Err(usage(format!(
            "tolerance must be a non-negative number, got {tol}"
        )));
    }
    Ok(tol)
}

fn suite_config(sel: &Selection, file: &ConfigFile, tol: f64) -> Result<SuiteConfig, Fail> {
    let bounds = sel
        .bounds
        .as_deref()
        .or(file.bounds.as_deref())
        .unwrap_or("all-applicable");
    let mut cfg = SuiteConfig::new(BoundId::parse_list(bounds)?);
    if let Some(k) = sel.k.as_deref().or(file.k.as_deref()) {
        cfg.k = k.parse::<KSpec>()?;
    }
    if let Some(r) = sel.r.as_deref().or(file.r.as_deref()) {
        cfg.r = r.parse::<RSpec>()?;
    }
    cfg.tol = tol;
    cfg.strict = sel.strict || file.strict.unwrap_or(false);
    Ok(cfg)
}

/// One JSON line on stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_json<T: Serialize>(v: &T) {
    let line = serde_json::to_string(v).expect("serializable");
    if let Err(e) = writeln!(std::io::stdout().lock(), "{line}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
        }
    }
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    instance_id: &'a str,
    r: usize,
    kind: LaplacianKind,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct SearchOut<'a> {
    descriptor: &'a str,
    instances: usize,
    skipped: usize,
    reports: usize,
    theorem_violations: usize,
    conjecture_violations: usize,
    errors: &'a [String],
    strict_errors: usize,
    leaderboard: Vec<Leader<'a>>,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct Leader<'a> {
    bound_id: BoundId,
    tier: Option<Tier>,
    min_slack: Option<f64>,
    leaders: &'a [BoundReport],
}

fn run(cli: Cli) -> Result<u8, Fail> {
    let file = load_config(cli.config.as_deref())?;
    let tol = tolerance(cli.tol, &file)?;
    match cli.cmd {
        Command::Spectrum {
            file: path,
            r,
            kind,
        } => {
            let inst = read_instance(&path)?;
            let kind: LaplacianKind = kind.parse()?;
            let s = spectrum(&laplacian(&inst.complex, kind, r)?)?;
            let eigenvalues = s
                .eigenvalues()
                .iter()
                .map(|v| lapbounds::bounds::round_sig(*v, 12))
                .collect();
            print_json(&SpectrumOut {
                instance_id: &inst.id,
                r,
                kind,
                eigenvalues,
            });
            Ok(0)
        }
        Command::Check {
            file: path,
            sel,
            assume,
        } => {
            let cfg = suite_config(&sel, &file, tol)?;
            let families: Vec<Family> =
                assume.iter().map(|a| a.parse()).collect::<Result<_, _>>()?;
            let inst = read_instance(&path)?.with_assumptions(families);
            let out = evaluate_instance(&cfg, &inst);
            for rep in &out.reports {
                print_json(rep);
            }
            for e in out.errors.iter().chain(&out.strict_errors) {
                eprintln!("{e}");
            }
            Ok(out.exit_code() as u8)
        }
        Command::Search {
            family,
            enumerate,
            sel,
            min_slack,
            out,
            threads,
            connected_only,
            no_reports,
            leaderboard,
        } => {
            let descriptor = match (family, enumerate, file.family.clone(), file.enumerate) {
                (Some(d), None, ..) => d,
                (None, Some(n), ..) => format!("enumerate:n={n}"),
                (None, None, Some(_), Some(_)) => {
                    return Err(usage("config sets both family and enumerate"))
                }
                (None, None, Some(d), None) => d,
                (None, None, None, Some(n)) => format!("enumerate:n={n}"),
                _ => return Err(usage("search needs exactly one of --family or --enumerate")),
            };
            let mut cfg = suite_config(&sel, &file, tol)?;
            cfg.min_slack = min_slack.or(file.min_slack);
            cfg.out_dir = Some(
                out.or(file.out.clone())
                    .unwrap_or_else(|| PathBuf::from("lapbounds-out")),
            );
            cfg.threads = threads.or(file.threads);
            cfg.connected_only = connected_only || file.connected_only.unwrap_or(false);
            cfg.write_reports = !(no_reports || file.no_reports.unwrap_or(false));
            if let Some(l) = leaderboard.or(file.leaderboard) {
                cfg.leaderboard = l;
            }
            let stream = InstanceStream::from_descriptor(&descriptor)?;
            let s = run_suite(&cfg, &stream)?;
            let leaderboard = s
                .per_bound
                .iter()
                .map(|b| {
                    let leaders = s.leaders(b.bound_id);
                    Leader {
                        bound_id: b.bound_id,
                        tier: leaders.first().map(|r| r.tier),
                        min_slack: b.min_slack,
                        leaders,
                    }
                })
                .collect();
            print_json(&SearchOut {
                descriptor: &descriptor,
                instances: s.instances,
                skipped: s.skipped,
                reports: s.reports,
                theorem_violations: s.theorem_violations.len(),
                conjecture_violations: s.conjecture_violations.len(),
                errors: &s.errors,
                strict_errors: s.strict_errors.len(),
                leaderboard,
                wall_time_s: s.wall_time.as_secs_f64(),
            });
            for e in &s.strict_errors {
                eprintln!("{e}");
            }
            Ok(s.exit_code() as u8)
        }
        Command::Identities { file: path } => {
            let inst = read_instance(&path)?;
            let res = check_identities(&inst, tol)?;
            for r in &res {
                print_json(r);
            }
            Ok(if res.iter().all(|r| r.holds) { 0 } else { 1 })
        }
        Command::Gen {
            descriptor,
            out,
            limit,
        } => {
            let stream = InstanceStream::from_descriptor(&descriptor)?;
            std::fs::create_dir_all(&out).map_err(|e| usage(format!("{}: {e}", out.display())))?;
            let list = InstanceList {
                descriptor,
                instances: stream.iter().take(limit.unwrap_or(usize::MAX)).collect(),
            };
            for inst in &list.instances {
                let name: String = inst
                    .id
                    .chars()
                    .map(|c| {
                        if c.is_ascii_alphanumeric() || c == '-' {
                            c
                        } else {
                            '_'
                        }
                    })
                    .collect();
                write_instance(&out.join(format!("{name}.json")), inst)?;
            }
            eprintln!(
                "wrote {} instances to {}",
                list.instances.len(),
                out.display()
            );
            Ok(0)
        }
        Command::List => {
            let mut out = std::io::stdout().lock();
            for id in BoundId::all() {
                let tier = serde_json::to_value(id.base_tier()).expect("tier");
                if writeln!(out, "{}\t{}", id.name(), tier.as_str().unwrap_or("")).is_err() {
                    break;
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
