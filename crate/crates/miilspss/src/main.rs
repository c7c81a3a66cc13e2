//! Command-line front end: generate instances, run any solve method,
//! apply the UFL reduction, and drive benchmark suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use miilspss::bench::{self, Method};
use miilspss::instance::Family;
use miilspss::io;
use miilspss::model::{build_fl, build_std, preprocess_fl};
use miilspss::solver::{
    brute_force_opt, solve_bc, solve_bnb, solve_mh, SolveConfig, SolveError, SolveReport,
};
use miilspss::ufl;

#[derive(Parser)]
#[command(name = "miilspss", version, about = "Lot-sizing with supplier selection: solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SolveFlags {
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Relative optimality gap tolerance.
    #[arg(long, default_value_t = 1e-6)]
    gap_tol: f64,
    /// Maximum root cut rounds (BC only).
    #[arg(long, default_value_t = 10)]
    cut_rounds: usize,
    /// Separation window length (BC only; default 5 if NT <= 50 else 2).
    #[arg(long)]
    cut_window: Option<usize>,
}

impl SolveFlags {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            time_limit: self.time_limit,
            rel_gap_tol: self.gap_tol,
            max_cut_rounds: self.cut_rounds,
            cut_window: self.cut_window,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random benchmark instance.
    Gen {
        #[arg(long)]
        nj: usize,
        #[arg(long)]
        ni: usize,
        #[arg(long)]
        nt: usize,
        #[arg(long, default_value = "original")]
        family: Family,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance file exactly with the chosen method.
    Solve {
        instance: PathBuf,
        /// One of STD, FL, PFL, BC.
        #[arg(long, default_value = "PFL")]
        method: String,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Run the windowed MIP heuristic.
    Heur {
        instance: PathBuf,
        /// Earmark window length.
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
    },
    /// Brute-force optimum of a tiny instance (NJ * NT <= 20).
    Oracle { instance: PathBuf },
    /// Convert an uncapacitated facility location file to an instance file.
    ReduceUfl {
        ufl: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite from a spec file; emit CSV and markdown.
    Bench {
        /// Suite spec: `key = value` lines (groups, family, seeds, methods,
        /// workers); see the repository README.
        spec: PathBuf,
        #[arg(long, default_value = "bench.csv")]
        csv: PathBuf,
        #[arg(long, default_value = "bench.md")]
        md: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
    },
}

/// Error category for exit codes: 2 for infeasible/invalid input, 1 for
/// internal errors.
enum CliError {
    Input(String),
    Internal(String),
}

impl From<io::ParseError> for CliError {
    fn from(e: io::ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::InfeasibleRoot => CliError::Input(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn print_report(method: &str, report: &SolveReport) {
    println!("method           {method}");
    println!("ub               {}", report.ub);
    println!("lb               {}", report.lb);
    println!("root bound       {}", report.root_bound);
    println!("pure LP bound    {}", report.pure_lp_bound);
    println!("gap (%)          {:.6}", report.gap_pct);
    println!("nodes            {}", report.nodes);
    println!("cuts             {}", report.cuts_added);
    println!("time (s)         {:.3}", report.time);
    println!("proven optimal   {}", report.proven_optimal);
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            nj,
            ni,
            nt,
            family,
            seed,
            out,
        } => {
            if nj == 0 || ni == 0 || nt == 0 {
                return Err(CliError::Input("dimensions must be at least 1".into()));
            }
            let inst = miilspss::generate_instance(nj, ni, nt, family, seed);
            emit(&io::format_instance(&inst), out.as_ref())
        }
        Command::Solve {
            instance,
            method,
            flags,
        } => {
            let inst = io::read_instance(&instance)?;
            let cfg = flags.config();
            let method: Method = method
                .parse()
                .map_err(|e: String| CliError::Input(e))?;
            let (report, plan) = match method {
                Method::Std => solve_bnb(&inst, &build_std(&inst), &cfg)?,
                Method::Fl => solve_bnb(&inst, &build_fl(&inst), &cfg)?,
                Method::Pfl => {
                    let (model, pre) = preprocess_fl(&inst);
                    let out = solve_bnb(&inst, &model, &cfg)?;
                    println!("reduction (%)    {:.2}", pre.reduction_pct);
                    out
                }
                Method::Bc => solve_bc(&inst, &cfg)?,
                Method::Mh(_) => {
                    return Err(CliError::Input(
                        "use the `heur` subcommand for MH".into(),
                    ))
                }
            };
            print_report(&method.to_string(), &report);
            inst.validate(&plan, 1e-6)
                .map_err(|v| CliError::Internal(format!("incumbent failed validation: {v}")))
        }
        Command::Heur {
            instance,
            k,
            time_limit,
        } => {
            let inst = io::read_instance(&instance)?;
            if k == 0 {
                return Err(CliError::Input("window must be at least 1".into()));
            }
            let cfg = SolveConfig {
                time_limit,
                ..SolveConfig::heuristic()
            };
            let k = k.min(inst.num_periods());
            let (report, plan) = solve_mh(&inst, k, &cfg)?;
            print_report(&format!("MH-{k}"), &report);
            inst.validate(&plan, 1e-6)
                .map_err(|v| CliError::Internal(format!("incumbent failed validation: {v}")))
        }
        Command::Oracle { instance } => {
            let inst = io::read_instance(&instance)?;
            if inst.num_suppliers() * inst.num_periods() > 20 {
                return Err(CliError::Input(
                    "oracle limited to NJ * NT <= 20 setup bits".into(),
                ));
            }
            let (opt, _) = brute_force_opt(&inst);
            println!("optimum          {opt}");
            Ok(())
        }
        Command::ReduceUfl { ufl: path, out } => {
            let u = io::read_ufl(&path)?;
            let inst = ufl::ufl_to_miilspss(&u);
            emit(&io::format_instance(&inst), out.as_ref())
        }
        Command::Bench {
            spec,
            csv,
            md,
            flags,
        } => {
            let text = std::fs::read_to_string(&spec)?;
            let suite = parse_suite_spec(&text).map_err(CliError::Input)?;
            let records = bench::run_suite(
                &suite.groups,
                suite.family,
                &suite.seeds,
                &suite.methods,
                &flags.config(),
                suite.workers,
            );
            std::fs::write(&csv, bench::emit_csv(&records))?;
            let table = bench::markdown_table(&bench::aggregate(&records));
            std::fs::write(&md, &table)?;
            print!("{table}");
            Ok(())
        }
    }
}

struct SuiteSpec {
    groups: Vec<(usize, usize, usize)>,
    family: Family,
    seeds: Vec<u64>,
    methods: Vec<Method>,
    workers: usize,
}

/// Parses `key = value` lines: `groups = 3x3x10, 5x5x20`,
/// `family = original`, `seeds = 1..15` (inclusive) or a comma list,
/// `methods = STD, PFL, MH-10`, `workers = 4`. Blank lines and `#`
/// comments are ignored. Seeds default to 1..15, workers to 1.
fn parse_suite_spec(text: &str) -> Result<SuiteSpec, String> {
    let mut groups = Vec::new();
    let mut family = None;
    let mut seeds: Vec<u64> = (1..=15).collect();
    let mut methods = Vec::new();
    let mut workers = 1usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", idx + 1))?;
        let value = value.trim();
        match key.trim() {
            "groups" => {
                for part in value.split(',') {
                    let dims: Vec<usize> = part
                        .trim()
                        .split('x')
                        .map(|d| d.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| format!("bad group `{}`", part.trim()))?;
                    let [nj, ni, nt] = dims.as_slice() else {
                        return Err(format!("bad group `{}`", part.trim()));
                    };
                    groups.push((*nj, *ni, *nt));
                }
            }
            "family" => family = Some(value.parse::<Family>()?),
            "seeds" => {
                seeds = match value.split_once("..") {
                    Some((lo, hi)) => {
                        let lo: u64 = lo.trim().parse().map_err(|_| "bad seed range".to_string())?;
                        let hi: u64 = hi.trim().parse().map_err(|_| "bad seed range".to_string())?;
                        (lo..=hi).collect()
                    }
                    None => value
                        .split(',')
                        .map(|s| s.trim().parse::<u64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| "bad seed list".to_string())?,
                };
            }
            "methods" => {
                for part in value.split(',') {
                    methods.push(part.trim().parse::<Method>()?);
                }
            }
            "workers" => {
                workers = value
                    .parse::<usize>()
                    .ok()
                    .filter(|&w| w >= 1)
                    .ok_or_else(|| "workers must be a positive integer".to_string())?;
            }
            other => return Err(format!("unknown key `{other}`")),
        }
    }
    if groups.is_empty() {
        return Err("spec defines no groups".into());
    }
    if methods.is_empty() {
        return Err("spec defines no methods".into());
    }
    Ok(SuiteSpec {
        groups,
        family: family.ok_or("spec defines no family")?,
        seeds,
        methods,
        workers,
    })
}
