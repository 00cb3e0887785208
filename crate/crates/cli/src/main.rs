//! Command-line front end: generate certified block partitions, run the full
//! certification, and sample the regrouping inequality.
//!
//! Exit codes: 0 success, 1 certification/generation failure, 2 usage or
//! input error.

use clap::{Args, Parser, Subcommand};
use oapcert_core::enflo::full_report;
use oapcert_core::index::level;
use oapcert_core::normbounds::{derive_seed, psi_sample_check};
use oapcert_core::partition::{generate_partitions, PartitionSet, Strategy};
use oapcert_core::report::{fmt_real, ReportOptions};
use oapcert_core::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "oapcert",
    version,
    about = "Certify the quantitative properties of a family of finite-rank \
             averaging operators: exact traces, norm-decay bounds, partition \
             certificates, block factorizations, and sampled inequalities."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate and self-certify block partitions; write a canonical JSON file.
    GenPartitions(GenArgs),
    /// Run the full certification and emit the report document and table.
    Verify(VerifyArgs),
    /// Sample the coefficient-regrouping inequality over partition blocks.
    Sample(SampleArgs),
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    /// Highest partition level to generate.
    #[arg(long, default_value_t = 15)]
    n_max: u32,
    /// Block-building strategy: singleton | greedy.
    #[arg(long, default_value = "greedy", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Generation seed (recorded in the file).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Top certified level; the report covers levels 2..=n_max.
    #[arg(long, default_value_t = 12)]
    n_max: u32,
    /// Partition file from gen-partitions (needs levels through n_max + 3).
    /// When absent, partitions are generated in memory with --strategy/--seed.
    #[arg(long)]
    partitions: Option<PathBuf>,
    /// Strategy for in-memory partition generation.
    #[arg(long, default_value = "greedy", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Master seed for every randomized check (and in-memory generation).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix: writes PREFIX.json and PREFIX.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Document printed on stdout.
    #[arg(long, default_value = "json", value_parser = ["json", "csv", "none"])]
    format: String,
    /// Random families per sampled block in the inequality sampler.
    #[arg(long, default_value_t = 40)]
    samples: usize,
    /// Matrix dimension for the inequality sampler.
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Dense SVD cross-checks run for levels up to this cap.
    #[arg(long, default_value_t = 8)]
    svd_cap: u32,
    /// Exact block factorizations run for levels up to this cap.
    #[arg(long, default_value_t = 10)]
    factor_cap: u32,
    /// Randomized trace-cyclicity probes run for levels up to this cap.
    #[arg(long, default_value_t = 8)]
    cyclicity_cap: u32,
    /// Random probes per block in the cyclicity check.
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

#[derive(Args)]
struct SampleArgs {
    /// Partition file; generated in memory with --strategy when absent.
    #[arg(long)]
    partitions: Option<PathBuf>,
    /// Strategy for in-memory partition generation.
    #[arg(long, default_value = "greedy", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Partition level whose blocks are sampled.
    #[arg(long, default_value_t = 9)]
    level: u32,
    /// Sample one explicit block (comma-separated indices) instead of the
    /// whole level; it must be a block of the level's grouping.
    #[arg(long, value_parser = parse_block)]
    block: Option<BlockArg>,
    /// Maximum number of blocks sampled (in file order); 0 means all.
    #[arg(long, default_value_t = 0)]
    max_blocks: usize,
    /// Random families per block.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Matrix dimension of the sampled families.
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Master seed; each block derives its own stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output: json | csv.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Optional file to write the selected document to.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A comma-separated index list on the command line.
#[derive(Clone)]
struct BlockArg(Vec<u64>);

fn parse_block(s: &str) -> std::result::Result<BlockArg, String> {
    let v: std::result::Result<Vec<u64>, _> =
        s.split(',').map(|p| p.trim().parse::<u64>()).collect();
    let v = v.map_err(|e| format!("block must be comma-separated indices: {e}"))?;
    if v.is_empty() {
        return Err("block must not be empty".into());
    }
    Ok(BlockArg(v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Input(_)
                | Error::Domain(_)
                | Error::Precondition(_)
                | Error::Io(_)
                | Error::Serde(_) => 2u8,
                _ => 1u8,
            })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::GenPartitions(a) => cmd_gen_partitions(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Sample(a) => cmd_sample(a),
    }
}

fn cmd_gen_partitions(a: GenArgs) -> Result<ExitCode> {
    let parts = generate_partitions(a.n_max, a.strategy, a.seed)?;
    parts.save(&a.out)?;
    println!(
        "wrote {} certified levels (strategy {}, seed {}) to {}",
        parts.n_max(),
        parts.strategy,
        parts.seed,
        a.out.display()
    );
    println!("digest sha256:{}", parts.digest()?);
    Ok(ExitCode::SUCCESS)
}

fn load_or_generate(
    path: &Option<PathBuf>,
    min_levels: u32,
    strategy: Strategy,
    seed: u64,
) -> Result<PartitionSet> {
    match path {
        Some(p) => PartitionSet::load(p),
        None => generate_partitions(min_levels, strategy, seed),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let opts = ReportOptions {
        n_max: a.n_max,
        svd_cap: a.svd_cap,
        factor_cap: a.factor_cap,
        cyclicity_cap: a.cyclicity_cap,
        cyclicity_trials: a.trials,
        psi_dim: a.dim,
        psi_samples: a.samples,
        psi_blocks_per_level: 8,
        seed: a.seed,
    };
    let parts = load_or_generate(&a.partitions, a.n_max + 3, a.strategy, a.seed)?;
    let report = full_report(&parts, &opts)?;
    let json = report.to_json()?;
    let csv = report.to_csv();
    if let Some(prefix) = &a.out {
        std::fs::write(PathBuf::from(format!("{}.json", prefix.display())), &json)?;
        std::fs::write(PathBuf::from(format!("{}.csv", prefix.display())), &csv)?;
    }
    match a.format.as_str() {
        "json" => print!("{json}"),
        "csv" => print!("{csv}"),
        _ => {}
    }
    if report.passed {
        eprintln!(
            "all certified checks passed through level {} (partition digest sha256:{})",
            report.n_max, report.partition_digest
        );
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "certification FAILED: {} (and {} more)",
            report.failures[0],
            report.failures.len() - 1
        );
        Ok(ExitCode::from(1))
    }
}

/// Rendered per-block sampling outcome (reals at 15 significant digits).
#[derive(serde::Serialize)]
struct SampleRow {
    block: Vec<u64>,
    dim: usize,
    samples: usize,
    seed: u64,
    max_ratio: String,
    bound: String,
    within_bound: bool,
}

fn cmd_sample(a: SampleArgs) -> Result<ExitCode> {
    let parts = load_or_generate(&a.partitions, a.level + 1, a.strategy, a.seed)?;
    let pair = parts.level(a.level).ok_or_else(|| {
        Error::Input(format!("partition set has no level {}", a.level))
    })?;
    let blocks: Vec<Vec<u64>> = match &a.block {
        Some(BlockArg(b)) => {
            let lvl = level(b[0])?;
            let holder = parts
                .level(lvl)
                .ok_or_else(|| Error::Input(format!("partition set has no level {lvl}")))?;
            if !holder.nabla.iter().any(|x| x == b) {
                return Err(Error::Input(format!(
                    "block {b:?} is not a block of the level-{lvl} grouping"
                )));
            }
            vec![b.clone()]
        }
        None => {
            let take = if a.max_blocks == 0 {
                pair.nabla.len()
            } else {
                a.max_blocks.min(pair.nabla.len())
            };
            pair.nabla.iter().take(take).cloned().collect()
        }
    };
    let mut rows = Vec::new();
    let mut all_within = true;
    for block in &blocks {
        let out = psi_sample_check(
            block,
            &parts,
            a.dim,
            a.samples,
            derive_seed(a.seed, &[1, block[0]]),
        )?;
        all_within &= out.within_bound;
        rows.push(SampleRow {
            block: out.block,
            dim: out.dim,
            samples: out.samples,
            seed: out.seed,
            max_ratio: fmt_real(out.max_ratio),
            bound: fmt_real(out.bound),
            within_bound: out.within_bound,
        });
    }
    let doc = match a.format.as_str() {
        "csv" => {
            let mut s = String::from("block,dim,samples,seed,max_ratio,bound,within_bound\n");
            for r in &rows {
                s.push_str(&format!(
                    "\"{}\",{},{},{},{},{},{}\n",
                    r.block
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                    r.dim,
                    r.samples,
                    r.seed,
                    r.max_ratio,
                    r.bound,
                    r.within_bound
                ));
            }
            s
        }
        _ => {
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            s
        }
    };
    if let Some(path) = &a.out {
        std::fs::write(path, &doc)?;
    }
    print!("{doc}");
    if all_within {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("sampling exceeded the certified ratio bound");
        Ok(ExitCode::from(1))
    }
}
