//! Command-line front end: train controllers, resume runs, compare policies
//! over many trials, replay single episodes and render the outputs.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use swarmevo::runner::{
    self, csvio, render, seed, ComparisonReport, PolicySource, RunConfig,
};
use swarmevo::tasks::TaskSpec;

#[derive(Parser)]
#[command(
    name = "swarmevo",
    about = "Evolve per-agent controllers for homogeneous robot swarms and compare them against designed baselines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args, Debug, Default)]
struct ConfigArgs {
    /// Run config file (TOML); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Task name: gtmab_area, anki_area, wall_climb_distance, wall_climb_neighbor.
    #[arg(long)]
    task: Option<String>,
    /// Global seed; fixed before any stochastic step.
    #[arg(long)]
    seed: Option<u64>,
    /// Generations to train.
    #[arg(long)]
    generations: Option<u64>,
    /// Worker threads for episode evaluation (0 = all cores).
    #[arg(long)]
    parallelism: Option<usize>,
    /// Trials per policy for compare.
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => RunConfig::default(),
        };
        if let Some(task) = &self.task {
            cfg.task = task.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(generations) = self.generations {
            cfg.generations = generations;
        }
        if let Some(parallelism) = self.parallelism {
            cfg.parallelism = parallelism;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a population from scratch, writing the evolution CSV,
    /// checkpoints and the best genome to the output directory.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Continue a run from the latest checkpoint in its output directory.
    Resume {
        /// Output directory of the interrupted run.
        #[arg(long)]
        out: PathBuf,
        /// New total generation count (defaults to the original).
        #[arg(long)]
        generations: Option<u64>,
    },
    /// Run policies for many paired trials and report Welch's test between
    /// every pair.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated policies: `designed` and/or genome .json paths.
        #[arg(long, value_delimiter = ',', required = true)]
        policies: Vec<String>,
    },
    /// Run one fully logged episode and write its trajectory table.
    Replay {
        #[command(flatten)]
        config: ConfigArgs,
        /// `designed` or a genome .json path.
        #[arg(long)]
        policy: String,
        /// Trajectory output file (default: <out>/trajectory.csv).
        #[arg(long)]
        traj_out: Option<PathBuf>,
    },
    /// Draw a trajectory table as an SVG image.
    Render {
        /// Trajectory CSV produced by replay.
        #[arg(long)]
        traj: PathBuf,
        /// SVG output path (default: trajectory path with .svg).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot an evolution CSV as an SVG fitness curve.
    Plot {
        /// Evolution CSV produced by train.
        #[arg(long)]
        csv: PathBuf,
        /// SVG output path (default: csv path with .svg).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the full default run config as TOML.
    PrintConfig,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Cmd::Train { config } => {
            let cfg = config.resolve()?;
            let outcome = runner::train(&cfg)?;
            let last = outcome.report.records.last().context("no generations trained")?;
            println!(
                "trained {} generations on {}: best fitness {:.4} (genome {})",
                outcome.report.records.len(),
                cfg.task,
                last.best_fitness,
                last.best_genome_id
            );
            println!("evolution csv: {}", outcome.csv_path.display());
            println!("best genome:   {}", outcome.best_genome_path.display());
        }
        Cmd::Resume { out, generations } => {
            let outcome = runner::resume(&out, generations)?;
            let last = outcome.report.records.last().context("no generations trained")?;
            println!(
                "resumed to generation {}: best fitness {:.4}",
                last.generation, last.best_fitness
            );
            println!("evolution csv: {}", outcome.csv_path.display());
            println!("best genome:   {}", outcome.best_genome_path.display());
        }
        Cmd::Compare { config, policies } => {
            let cfg = config.resolve()?;
            let task = cfg.task_spec()?;
            let sources = parse_policies(&policies)?;
            let report = runner::compare(&task, &sources, cfg.trials, cfg.seed, cfg.parallelism)?;
            print!("{}", report.to_text());
            write_comparison(&cfg, &report)?;
        }
        Cmd::Replay { config, policy, traj_out } => {
            let cfg = config.resolve()?;
            let task = cfg.task_spec()?;
            let source: PolicySource = policy.parse()?;
            let path = match traj_out {
                Some(p) => p,
                None => {
                    std::fs::create_dir_all(&cfg.out_dir)?;
                    cfg.out_dir.join("trajectory.csv")
                }
            };
            let result = runner::replay(&task, &source, cfg.seed, cfg.log_every, Some(&path))?;
            println!("fitness: {}", result.fitness);
            println!("trajectory: {}", path.display());
        }
        Cmd::Render { traj, out } => {
            let text = std::fs::read_to_string(&traj)
                .with_context(|| format!("reading {}", traj.display()))?;
            let (arena, rows) = csvio::parse_trajectory(&text)?;
            let svg = render::render_trajectory(&arena, &rows);
            let out = out.unwrap_or_else(|| traj.with_extension("svg"));
            std::fs::write(&out, svg)?;
            println!("render: {}", out.display());
        }
        Cmd::Plot { csv, out } => {
            let text = std::fs::read_to_string(&csv)
                .with_context(|| format!("reading {}", csv.display()))?;
            let records = csvio::parse_evolution_csv(&text)?;
            let svg = render::plot_evolution(&records);
            let out = out.unwrap_or_else(|| csv.with_extension("svg"));
            std::fs::write(&out, svg)?;
            println!("plot: {}", out.display());
        }
        Cmd::PrintConfig => {
            print!("{}", RunConfig::default().to_toml());
        }
    }
    Ok(())
}

fn parse_policies(names: &[String]) -> Result<Vec<PolicySource>> {
    if names.is_empty() {
        bail!("compare needs at least one policy");
    }
    names.iter().map(|n| Ok(n.parse()?)).collect()
}

/// Persist the comparison as JSON plus a per-trial CSV next to it.
fn write_comparison(cfg: &RunConfig, report: &ComparisonReport) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let json_path = cfg.out_dir.join("comparison.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(report)?)?;
    let mut csv = String::from("# schema: trials-v1\npolicy,trial,seed,fitness\n");
    for policy in &report.policies {
        for (i, fitness) in policy.fitnesses.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                policy.label,
                i,
                seed::trial_seed(cfg.seed, i as u64),
                fitness
            ));
        }
    }
    let csv_path = cfg.out_dir.join("trials.csv");
    std::fs::write(&csv_path, csv)?;
    println!("comparison: {}", json_path.display());
    println!("trials:     {}", csv_path.display());
    Ok(())
}

// Referenced so the unused-import lint stays honest about what main uses.
#[allow(dead_code)]
fn _assert_types(task: &TaskSpec, _p: &Path) {
    let _ = task.num_inputs();
}
