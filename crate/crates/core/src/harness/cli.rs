//! `rdslab` command line.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bootstrap::{bootstrap_ci, BootstrapConfig, BootstrapMethod};
use crate::estimate::estimate_all;
use crate::netcore::{compute_stats, Network};
use crate::netgen::{
    assign_groups, calibrate_p_delta, koskk_generate, tune_activity_ratio, tune_homophily, CalibrationConfig,
    KoskkParams, TuneTargets,
};
use crate::rdssim::{run_rds, RdsConfig, RdsRngs, SeedMode};
use crate::rng::{self, tag};

use super::experiment::{run_experiment, ExperimentSpec};
use super::ingest::{emit_network, emit_rds_data, ingest_network, ingest_rds_data};
use super::plot::{write_plot, PlotKind, PlotOptions};
use super::{read_file, write_file, HarnessError};

#[derive(Debug, Parser)]
#[command(name = "rdslab", version, about = "Respondent-driven sampling simulation and estimation")]
pub struct Cli {
    /// Master random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output path (a file, or a prefix for network files).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a network and write `<out>.edges` and `<out>.attrs`.
    Generate(GenerateArgs),
    /// Retune group proportion, activity ratio and homophily of a network.
    Tune(TuneArgs),
    /// Simulate one RDS sample and write it as CSV.
    Sample(SampleArgs),
    /// Point estimates for a sample CSV, as JSON.
    Estimate(InputArg),
    /// Bootstrap confidence interval for a sample CSV, as JSON.
    Bootstrap(BootstrapArgs),
    /// Run an experiment spec and write the results CSV.
    Experiment(ExperimentArgs),
    /// Render a results or estimates CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct NetworkFiles {
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long)]
    pub attrs: PathBuf,
}

#[derive(Debug, Args)]
pub struct Targets {
    /// Proportion of group A; relabels nodes at random first.
    #[arg(long)]
    pub p_a: Option<f64>,
    /// Homophily target.
    #[arg(long)]
    pub h: Option<f64>,
    /// Activity-ratio target.
    #[arg(long)]
    pub w: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Triad-closure probability; calibrated to `--target-degree` when omitted.
    #[arg(long)]
    pub p_delta: Option<f64>,
    #[arg(long)]
    pub target_degree: Option<f64>,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub targets: Targets,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub network: NetworkFiles,
    #[command(flatten)]
    pub targets: Targets,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub network: NetworkFiles,
    #[arg(long = "seeds")]
    pub n_seeds: Option<usize>,
    #[arg(long)]
    pub coupons: Option<usize>,
    #[arg(long)]
    pub target_size: Option<usize>,
    #[arg(long)]
    pub p_diff: Option<f64>,
    #[arg(long)]
    pub p_miss_a: Option<f64>,
    #[arg(long)]
    pub p_miss_b: Option<f64>,
    #[arg(long)]
    pub p_err_ab: Option<f64>,
    #[arg(long)]
    pub p_err_ba: Option<f64>,
    #[arg(long)]
    pub with_replacement: bool,
    #[arg(long)]
    pub degree_proportional_seeds: bool,
    /// Stop when recruitment dies out instead of drawing a new seed.
    #[arg(long)]
    pub no_reseed: bool,
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// Respondent CSV.
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub method: Option<BootstrapMethod>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Spec JSON (alternative to `--config`).
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub kind: PlotKind,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub value: Option<String>,
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long)]
    pub title: Option<String>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    serde_json::from_str(&read_file(path)?).map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(p) => write_file(p, text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_network(net: &Network, out: Option<&Path>) -> Result<(), HarnessError> {
    let prefix = out.ok_or_else(|| HarnessError::Usage("--out <prefix> is required".into()))?;
    let (edges, attrs) = emit_network(net, None);
    write_file(&with_suffix(prefix, ".edges"), &edges)?;
    write_file(&with_suffix(prefix, ".attrs"), &attrs)
}

fn apply_targets(net: &mut Network, t: &Targets, seed: u64) -> Result<(), HarnessError> {
    let mut r = rng::stream(seed, &[tag::TUNING]);
    if let Some(p_a) = t.p_a {
        assign_groups(net, p_a, &mut r);
    }
    let stats = compute_stats(net);
    let targets = TuneTargets::new(
        stats.p_a,
        t.h.or(stats.homophily).unwrap_or(0.0),
        t.w.or(stats.activity_ratio).unwrap_or(1.0),
    );
    if t.w.is_some() {
        tune_activity_ratio(net, &targets, &mut r)?;
    }
    if t.h.is_some() {
        tune_homophily(net, &targets, &mut r)?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), HarnessError> {
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    let config = cli.config.as_deref();
    match cli.command {
        Command::Generate(a) => {
            let mut params: KoskkParams = match config {
                Some(p) => load_json(p)?,
                None => KoskkParams::reference(a.n.unwrap_or(5000)),
            };
            if let Some(n) = a.n {
                params.n = n;
            }
            if let Some(s) = a.steps {
                params.steps = Some(s);
            }
            if let Some(d) = a.delta {
                params.delta = d;
            }
            if let Some(t) = a.target_degree {
                params.target_mean_degree = Some(t);
            }
            match a.p_delta {
                Some(p) => params.p_delta = p,
                None if params.p_delta == 0.0 && params.target_mean_degree.is_some() => {
                    let seed = rng::derive_seed(seed, &[tag::PILOT]);
                    params.p_delta = calibrate_p_delta(&params, &CalibrationConfig::default(), seed)?;
                }
                None => {}
            }
            params.validate()?;
            let mut net = koskk_generate(&params, &mut rng::stream(seed, &[tag::NETWORK]))?;
            apply_targets(&mut net, &a.targets, seed)?;
            write_network(&net, out)?;
            #[derive(Serialize)]
            struct Report {
                p_delta: f64,
                stats: crate::netcore::NetworkStats,
            }
            print!("{}", to_json(&Report { p_delta: params.p_delta, stats: compute_stats(&net) }));
            Ok(())
        }
        Command::Tune(a) => {
            let mut net = ingest_network(&a.network.edges, &a.network.attrs)?.network;
            apply_targets(&mut net, &a.targets, seed)?;
            write_network(&net, out)?;
            print!("{}", to_json(&compute_stats(&net)));
            Ok(())
        }
        Command::Sample(a) => {
            let net = ingest_network(&a.network.edges, &a.network.attrs)?.network;
            let mut cfg: RdsConfig = match config {
                Some(p) => load_json(p)?,
                None => RdsConfig::default(),
            };
            macro_rules! set {
                ($($f:ident),*) => { $(if let Some(v) = a.$f { cfg.$f = v; })* };
            }
            set!(n_seeds, coupons, target_size, p_diff, p_miss_a, p_miss_b, p_err_ab, p_err_ba);
            cfg.with_replacement |= a.with_replacement;
            if a.degree_proportional_seeds {
                cfg.seed_mode = SeedMode::DegreeProportional;
            }
            if a.no_reseed {
                cfg.reseed_on_dieout = false;
            }
            let sample = run_rds(&net, &cfg, &mut RdsRngs::new(seed, &[tag::REPLICATION]))?;
            if !sample.complete {
                eprintln!("warning: sample stopped at {} of {} respondents", sample.len(), cfg.target_size);
            }
            emit(out, &emit_rds_data(&sample))
        }
        Command::Estimate(a) => {
            let sample = ingest_rds_data(&a.input)?.sample;
            emit(out, &to_json(&estimate_all(&sample)))
        }
        Command::Bootstrap(a) => {
            let sample = ingest_rds_data(&a.input)?.sample;
            let mut cfg: BootstrapConfig = match config {
                Some(p) => load_json(p)?,
                None => BootstrapConfig::new(BootstrapMethod::Ego2, 1000, 0.95),
            };
            if let Some(m) = a.method {
                cfg.method = m;
            }
            if let Some(r) = a.replicates {
                cfg.replicates = r;
            }
            if let Some(l) = a.level {
                cfg.level = l;
            }
            let outcome = bootstrap_ci(&sample, &cfg, rng::derive_seed(seed, &[tag::BOOTSTRAP]))?;
            emit(out, &to_json(&outcome))
        }
        Command::Experiment(a) => {
            let path = a
                .spec
                .as_deref()
                .or(config)
                .ok_or_else(|| HarnessError::Usage("experiment needs a spec (positional or --config)".into()))?;
            let mut spec = ExperimentSpec::load(path)?;
            if let Some(s) = cli.seed {
                spec.master_seed = s;
            }
            let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let output = run_experiment(&spec, workers)?;
            if let Some(p) = &spec.output.estimates {
                write_file(p, &output.estimates_csv())?;
            }
            emit(out.or(spec.output.results.as_deref()), &output.results_csv())
        }
        Command::Plot(a) => {
            let opts = PlotOptions {
                kind: a.kind,
                x: a.x,
                y: a.y,
                value: a.value,
                estimator: a.estimator,
                bins: a.bins,
                title: a.title,
            };
            let out = out.ok_or_else(|| HarnessError::Usage("--out <file.svg> is required".into()))?;
            write_plot(&a.input, &opts, out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["rdslab"]), 1);
        assert_eq!(main_with_args(["rdslab", "frobnicate"]), 1);
        assert_eq!(main_with_args(["rdslab", "plot", "x.csv", "--kind", "pie"]), 1);
        assert_eq!(main_with_args(["rdslab", "--help"]), 0);
    }

    #[test]
    fn missing_input_is_runtime_failure() {
        assert_eq!(main_with_args(["rdslab", "estimate", "/nonexistent/sample.csv"]), 3);
    }
}
