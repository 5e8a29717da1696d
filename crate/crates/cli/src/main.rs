//! `approxcara`: run experiments, separation scans, bound tables and self-checks.

mod check;

use std::path::PathBuf;
use std::process::ExitCode;

use approxcara::caratheodory::{required_k, Method, NormKind};
use approxcara::experiment::{run_experiment, run_separation_scan, ExperimentConfig, ScanFamily, OUTPUT_DIR_ENV};
use approxcara::gauge::{budget_nn, budget_puri, budget_rank, budget_schatten1, budget_sep, RankBudget};
use approxcara::Error;
use clap::{Parser, Subcommand};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "approxcara", version, about = "Sparse approximate convex decompositions and approximate-rank bounds")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML or JSON config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the environment and the config).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Witness sizes for the Euclidean-distance or slack-matrix family.
    Scan {
        #[arg(long, default_value = "euclid")]
        family: String,
        #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "greedy")]
        method: String,
        /// Print JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Print the approximate-rank budgets for the given parameters.
    Bounds {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Gauge value μ_p, also used as μ_√,p and as the ℓ1 bound K.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1)]
        group_order: u64,
        /// Local dimension, for the trace-norm budget.
        #[arg(long)]
        d: Option<usize>,
        /// Number of vertices minus one, for the trace-norm budget.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in property checks.
    Check {
        /// Fewer samples per property.
        #[arg(long)]
        quick: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } => EXIT_CONFIG,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    approxcara::par::set_parallel(!cli.sequential);
    match cli.command {
        Command::Run { config, output } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let dir = output.unwrap_or_else(|| cfg.output_dir());
            let report = run_experiment(&cfg)?;
            report.write(&dir)?;
            for s in &report.series {
                let ok = s.samples.iter().filter(|o| o.status == approxcara::experiment::SampleStatus::Ok).count();
                let last = s.rows.last().map(|r| format!("k = {}, mean error {:.4e}", r.k, r.mean)).unwrap_or_else(|| "no rows".into());
                println!("d = {}, {}: {ok}/{} samples, {last}", s.d, s.method, s.samples.len());
            }
            println!("wrote {}", dir.display());
            if report.all_infeasible() {
                eprintln!("every sample failed");
                return Ok(EXIT_INFEASIBLE);
            }
            Ok(0)
        }
        Command::Scan { family, dims, epsilon, p, method, json } => {
            let family: ScanFamily = family.parse()?;
            let method: Method = method.parse()?;
            let table = run_separation_scan(family, &dims, epsilon, p, method)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&table)?);
            } else {
                print!("{}", table.to_csv());
            }
            Ok(0)
        }
        Command::Bounds { epsilon, p, mu, group_order, d, n, json } => {
            let mut rows: Vec<(&str, Result<RankBudget, Error>)> = vec![
                ("rank", budget_rank(epsilon, p, mu, group_order)),
                ("puri", budget_puri(epsilon, p, mu, group_order)),
                ("sep", budget_sep(epsilon, p, group_order)),
                ("nn", budget_nn(epsilon, p, mu, group_order)),
            ];
            if let (Some(d), Some(n)) = (d, n) {
                let b1 = budget_rank(epsilon, 2.0, mu, group_order).and_then(|b| budget_schatten1(epsilon, &b, d, n));
                rows.push(("schatten1", b1));
            }
            let steps = required_k(epsilon, 2.0 * mu, p, NormKind::Schatten);
            if json {
                let mut obj = serde_json::Map::new();
                for (name, r) in &rows {
                    let v = match r {
                        Ok(b) => serde_json::to_value(b)?,
                        Err(e) => serde_json::json!({ "error": e.to_string() }),
                    };
                    obj.insert(name.to_string(), v);
                }
                println!("{}", serde_json::to_string_pretty(&obj)?);
            } else {
                println!("epsilon = {epsilon}, p = {p}, mu = {mu}, |G| = {group_order}");
                match steps {
                    Ok(k) => println!("{:<10} {k}", "steps"),
                    Err(e) => println!("{:<10} n/a ({e})", "steps"),
                }
                for (name, r) in &rows {
                    match r {
                        Ok(b) => println!("{name:<10} {}", b.value),
                        Err(e) => println!("{name:<10} n/a ({e})"),
                    }
                }
            }
            if rows.iter().all(|(_, r)| r.is_err()) {
                return Err(rows.into_iter().next().unwrap().1.unwrap_err());
            }
            Ok(0)
        }
        Command::Check { quick } => Ok(if check::run_all(quick) { 0 } else { 1 }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    log::debug!("output directory override: {:?}", std::env::var_os(OUTPUT_DIR_ENV));
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
