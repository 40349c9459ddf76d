//! Batch experiment runner: every subcommand reproduces one quantitative
//! demonstration and writes a JSON report (plus a CSV mirror) whose bytes
//! depend only on the config and seed.
//!
//! Exit codes: 0 when all embedded checks pass, 2 for config/schema errors,
//! 3 when a numerical check fails.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sc_lab::experiments::{
    merge_config, run_chain_rule, run_compact_open, run_compactness_rank, run_compactness_tail,
    run_discontinuity, run_doubling, run_floer_compactness, run_growth_table, run_sc_diff,
    run_scale_axioms, ChainRuleConfig, CompactOpenConfig, DiscontinuityConfig, DoublingConfig,
    FloerDecayConfig, GrowthTableConfig, RankDecayConfig, RunArtifacts, ScDiffConfig,
    ScaleAxiomsConfig, TailDecayConfig,
};
use sc_lab::{Result, ScError};

#[derive(Parser)]
#[command(
    name = "sc-lab",
    version,
    about = "scale-calculus numerical laboratory"
)]
struct Cli {
    /// Directory the report files are written to
    #[arg(long, global = true, default_value = "reports")]
    out: PathBuf,

    /// Report format: json, csv, or both
    #[arg(long, global = true, default_value = "both", value_parser = ["json", "csv", "both"])]
    format: String,

    /// Worker threads for parameter sweeps (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// JSON config file; its entries override the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Subcommand)]
enum Experiment {
    /// Unit step witnesses: shift defect √2 at every admissible τ
    Discontinuity {
        /// Shift sizes τ (each needs (τ/2)·resolution integral)
        #[arg(long = "tau")]
        taus: Vec<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Pointwise decay of ‖Ψ_τ v − v‖ with the Lipschitz bound, plus the
    /// levelwise shift isometry
    CompactOpen {
        #[arg(long)]
        loops: Option<usize>,
        #[arg(long)]
        bandwidth: Option<usize>,
        /// Number of dyadic shift sizes 2^{-1}..2^{-n}
        #[arg(long)]
        tau_levels: Option<usize>,
        #[arg(long)]
        isometry_trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Finite-difference verification of the scale differentials
    ScDiff {
        /// Differential orders to verify (1, 2, 3)
        #[arg(long = "order")]
        orders: Vec<usize>,
        #[arg(long)]
        trials_per_order: Option<usize>,
        #[arg(long)]
        symmetry_trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Both sides of T(Ψ_σ∘Ψ) = TΨ_σ∘TΨ on random data
    ChainRule {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact finite-rank defect norms on the weighted sequence scale
    CompactnessRank {
        #[arg(long)]
        exponent: Option<f64>,
        #[arg(long = "rank")]
        ranks: Vec<usize>,
        /// Also require the 1/f(N) reference constant (fails for ν², N ≥ 2)
        #[arg(long)]
        strict_paper_bound: bool,
    },
    /// Exponential tail bounds for domain truncation on weighted paths
    CompactnessTail {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long = "delta")]
        deltas: Vec<f64>,
        #[arg(long = "t-value")]
        t_values: Vec<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Level-spec JSON file supplying the exponent and target weight
        #[arg(long)]
        level_spec: Option<PathBuf>,
    },
    /// Pointwise rank cutoffs on intersection-space samples
    FloerCompactness {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long = "rank")]
        ranks: Vec<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Level-spec JSON file supplying the exponent, weight, and δ₁
        #[arg(long)]
        level_spec: Option<PathBuf>,
    },
    /// Doubling/halving round trips and symmetry defects
    Doubling {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The growth-type table of the standard gradient-flow theories
    GrowthTable,
    /// Scale axioms on the truncated models: level monotonicity, levelwise
    /// isometries, merge oracle, refinement soundness
    ScaleAxioms {
        #[arg(long)]
        vectors: Option<usize>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        merge_pairs: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        path_resolution: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Level-spec JSON file driving the path-space level checks
        #[arg(long)]
        level_spec: Option<PathBuf>,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_vec<T>(slot: &mut Vec<T>, value: Vec<T>) {
    if !value.is_empty() {
        *slot = value;
    }
}

fn load_overlay(path: &PathBuf) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| ScError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| ScError::Config(format!("invalid JSON in {}: {e}", path.display())))
}

fn load_level_spec(path: &Option<PathBuf>) -> Result<Option<sc_lab::paths::LevelSpec>> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path)
        .map_err(|e| ScError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| ScError::Config(format!("invalid level spec in {}: {e}", path.display())))
}

fn finalize<C: serde::Serialize + serde::de::DeserializeOwned>(
    config: C,
    overlay: Option<&serde_json::Value>,
) -> Result<C> {
    match overlay {
        Some(v) => merge_config(&config, v),
        None => Ok(config),
    }
}

fn dispatch(cli: &Cli) -> Result<RunArtifacts> {
    let overlay = cli.config.as_ref().map(load_overlay).transpose()?;
    let overlay = overlay.as_ref();
    match &cli.experiment {
        Experiment::Discontinuity { taus, resolution } => {
            let mut c = DiscontinuityConfig::default();
            set_vec(&mut c.taus, taus.clone());
            set(&mut c.resolution, *resolution);
            run_discontinuity(&finalize(c, overlay)?)
        }
        Experiment::CompactOpen {
            loops,
            bandwidth,
            tau_levels,
            isometry_trials,
            seed,
        } => {
            let mut c = CompactOpenConfig::default();
            set(&mut c.loops, *loops);
            set(&mut c.bandwidth, *bandwidth);
            set(&mut c.tau_levels, *tau_levels);
            set(&mut c.isometry_trials, *isometry_trials);
            set(&mut c.seed, *seed);
            run_compact_open(&finalize(c, overlay)?)
        }
        Experiment::ScDiff {
            orders,
            trials_per_order,
            symmetry_trials,
            seed,
        } => {
            let mut c = ScDiffConfig::default();
            set_vec(&mut c.orders, orders.clone());
            set(&mut c.trials_per_order, *trials_per_order);
            set(&mut c.symmetry_trials, *symmetry_trials);
            set(&mut c.seed, *seed);
            run_sc_diff(&finalize(c, overlay)?)
        }
        Experiment::ChainRule {
            trials,
            bandwidth,
            seed,
        } => {
            let mut c = ChainRuleConfig::default();
            set(&mut c.trials, *trials);
            set(&mut c.bandwidth, *bandwidth);
            set(&mut c.seed, *seed);
            run_chain_rule(&finalize(c, overlay)?)
        }
        Experiment::CompactnessRank {
            exponent,
            ranks,
            strict_paper_bound,
        } => {
            let mut c = RankDecayConfig::default();
            set(&mut c.exponent, *exponent);
            set_vec(&mut c.ranks, ranks.clone());
            if *strict_paper_bound {
                c.strict_paper_bound = true;
            }
            run_compactness_rank(&finalize(c, overlay)?)
        }
        Experiment::CompactnessTail {
            count,
            deltas,
            t_values,
            p,
            half_width,
            resolution,
            truncation,
            seed,
            level_spec,
        } => {
            let mut c = TailDecayConfig::default();
            set(&mut c.count, *count);
            set_vec(&mut c.deltas, deltas.clone());
            set_vec(&mut c.t_values, t_values.clone());
            set(&mut c.p, *p);
            set(&mut c.half_width, *half_width);
            set(&mut c.resolution, *resolution);
            set(&mut c.truncation, *truncation);
            set(&mut c.seed, *seed);
            c.level_spec = load_level_spec(level_spec)?;
            run_compactness_tail(&finalize(c, overlay)?)
        }
        Experiment::FloerCompactness {
            count,
            ranks,
            delta,
            p,
            half_width,
            resolution,
            truncation,
            seed,
            level_spec,
        } => {
            let mut c = FloerDecayConfig::default();
            set(&mut c.count, *count);
            set_vec(&mut c.ranks, ranks.clone());
            set(&mut c.delta, *delta);
            set(&mut c.p, *p);
            set(&mut c.half_width, *half_width);
            set(&mut c.resolution, *resolution);
            set(&mut c.truncation, *truncation);
            set(&mut c.seed, *seed);
            c.level_spec = load_level_spec(level_spec)?;
            run_floer_compactness(&finalize(c, overlay)?)
        }
        Experiment::Doubling {
            count,
            bandwidth,
            resolution,
            seed,
        } => {
            let mut c = DoublingConfig::default();
            set(&mut c.count, *count);
            set(&mut c.bandwidth, *bandwidth);
            set(&mut c.resolution, *resolution);
            set(&mut c.seed, *seed);
            run_doubling(&finalize(c, overlay)?)
        }
        Experiment::GrowthTable => {
            run_growth_table(&finalize(GrowthTableConfig::default(), overlay)?)
        }
        Experiment::ScaleAxioms {
            vectors,
            paths,
            merge_pairs,
            levels,
            truncation,
            path_resolution,
            seed,
            level_spec,
        } => {
            let mut c = ScaleAxiomsConfig::default();
            set(&mut c.vectors, *vectors);
            set(&mut c.paths, *paths);
            set(&mut c.merge_pairs, *merge_pairs);
            set(&mut c.levels, *levels);
            set(&mut c.truncation, *truncation);
            set(&mut c.path_resolution, *path_resolution);
            set(&mut c.seed, *seed);
            c.level_spec = load_level_spec(level_spec)?;
            run_scale_axioms(&finalize(c, overlay)?)
        }
    }
}

fn write_reports(cli: &Cli, artifacts: &RunArtifacts) -> Result<()> {
    fs::create_dir_all(&cli.out)?;
    if cli.format == "json" || cli.format == "both" {
        let path = cli.out.join(format!("{}.json", artifacts.name));
        let mut text = serde_json::to_string_pretty(&artifacts.report)?;
        text.push('\n');
        fs::write(path, text)?;
    }
    if cli.format == "csv" || cli.format == "both" {
        let path = cli.out.join(format!("{}.csv", artifacts.name));
        fs::write(path, &artifacts.csv)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let artifacts = match cli.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ScError::Config(format!("cannot build a {jobs}-thread pool: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }?;
    write_reports(cli, &artifacts)?;
    for line in &artifacts.summary {
        println!("{line}");
    }
    println!(
        "experiment {}: {}",
        artifacts.name,
        if artifacts.pass { "PASS" } else { "FAIL" }
    );
    Ok(artifacts.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
