use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use partlab_cli::config::{ExperimentConfig, Overrides, Resolved};
use partlab_cli::error::{CliError, Result};
use partlab_cli::scenarios::{predict, simulate};
use partlab_cli::tables::{transform, Op, TableFile};
use partlab_cli::verify::{format_line, run_criterion, verify_suite, Level, VerifyOptions, VerifySummary};
use partlab_core::{FamilyTag, Partition};

#[derive(Parser)]
#[command(name = "partlab", version, about = "Partition-algebra moments, cumulants and random-matrix experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for reports.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cap on enumerated index tuples and similar work counts.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on partitions written as `{1 2'}{2 1'}`.
    Partition {
        #[command(subcommand)]
        op: PartitionOp,
    },
    /// Moment, cumulant and exclusive-moment conversions of a table file.
    Transform {
        #[arg(long, value_enum)]
        op: TransformOp,
        /// Family (P, B, S, H or Bs); defaults to the file's family, then P.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs the configured scenario and writes CSV and JSON reports.
    Simulate,
    /// Prints the predictions of the configured scenario as JSON.
    Predict,
    /// Runs the acceptance battery.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        level: LevelArg,
        /// Replaces every Monte Carlo sample count.
        #[arg(long)]
        samples: Option<u64>,
        /// Runs only these criteria.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum PartitionOp {
    /// Prints the canonical form.
    Canonical { p: String },
    Transpose { p: String },
    /// Prints `p ∘ q` and the number of erased components.
    Compose { p: String, q: String },
    Join { p: String, q: String },
    /// Block count, cycle count and irreducibility flags as JSON.
    Stats { p: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    M2k,
    K2m,
    ToExclusive,
    FromExclusive,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Exact,
    Mc,
    All,
}

fn parse(s: &str) -> Result<Partition> {
    Ok(s.parse()?)
}

fn partition(op: &PartitionOp) -> Result<String> {
    Ok(match op {
        PartitionOp::Canonical { p } => parse(p)?.to_string(),
        PartitionOp::Transpose { p } => parse(p)?.transpose().to_string(),
        PartitionOp::Compose { p, q } => {
            let (r, kappa) = parse(p)?.compose(&parse(q)?)?;
            format!("{r}\nkappa {kappa}")
        }
        PartitionOp::Join { p, q } => parse(p)?.join(&parse(q)?)?.to_string(),
        PartitionOp::Stats { p } => {
            let s = parse(p)?.stats();
            serde_json::json!({
                "nc": s.nc,
                "cycles": s.cycles,
                "irreducible": s.irreducible,
                "weakly_irreducible": s.weakly_irreducible,
                "exclusive_irreducible": s.exclusive_irreducible,
            })
            .to_string()
        }
    })
}

fn resolved(g: &Global, seedless_ok: bool) -> Result<Resolved> {
    let path = g.config.as_deref().ok_or_else(|| CliError::Input("--config <path> is required".into()))?;
    let cfg = ExperimentConfig::from_path(path)?;
    let mut ov = Overrides { seed: g.seed, threads: g.threads, budget: g.budget };
    // Predictions draw nothing, so any seed will do.
    if seedless_ok && ov.seed.is_none() && cfg.seed.is_none() {
        ov.seed = Some(0);
    }
    Resolved::new(&cfg, &ov)
}

fn write_or_print(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match &cli.command {
        Command::Partition { op } => {
            println!("{}", partition(op)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform { op, family, input, output } => {
            let file = TableFile::from_json(&std::fs::read_to_string(input)?)?;
            let tag = match family {
                Some(f) => Some(f.parse::<FamilyTag>()?),
                None => None,
            };
            let op = match op {
                TransformOp::M2k => Op::MomentsToCumulants,
                TransformOp::K2m => Op::CumulantsToMoments,
                TransformOp::ToExclusive => Op::ToExclusive,
                TransformOp::FromExclusive => Op::FromExclusive,
            };
            write_or_print(&transform(&file, op, tag)?.to_json()?, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate => {
            let r = resolved(g, false)?;
            let out_dir = g.out_dir.clone().unwrap_or_else(|| PathBuf::from("results"));
            let (summary, written) = simulate(&r, &out_dir)?;
            println!(
                "{}: {} of {} records pass; wrote {} and {}",
                summary.scenario,
                summary.passed,
                summary.records,
                written.csv.display(),
                written.json.display()
            );
            if let Some(w) = &summary.worst_failure {
                println!("worst failure: {} k={} N={} {} |Δ| {:e} > {:e}", w.method, w.k, w.n, w.partition, w.abs_error, w.tolerance);
            }
            Ok(if summary.all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Predict => {
            let r = resolved(g, true)?;
            let mut text = serde_json::to_string_pretty(&predict(&r)?)?;
            text.push('\n');
            let out = g.out_dir.as_ref().map(|d| d.join(format!("{}-predictions.json", r.scenario)));
            write_or_print(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { level, samples, criterion } => {
            let level = match level {
                LevelArg::Exact => Level::Exact,
                LevelArg::Mc => Level::Mc,
                LevelArg::All => Level::All,
            };
            let mut opts = VerifyOptions { level, samples: *samples, threads: g.threads.unwrap_or(0), ..VerifyOptions::default() };
            if let Some(s) = g.seed {
                opts.seed = s;
            }
            let summary = if criterion.is_empty() {
                verify_suite(&opts)?
            } else {
                let mut results = Vec::new();
                for &id in criterion {
                    results.extend(run_criterion(id, &opts)?);
                }
                VerifySummary { level, seed: opts.seed, results }
            };
            for r in &summary.results {
                println!("{}", format_line(r));
            }
            let failed = summary.results.iter().filter(|r| !r.pass).count();
            println!("{} of {} criteria pass", summary.results.len() - failed, summary.results.len());
            if let Some(dir) = &g.out_dir {
                let mut text = serde_json::to_string_pretty(&summary)?;
                text.push('\n');
                write_or_print(&text, Some(&dir.join("verify.json")))?;
            }
            Ok(if summary.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
