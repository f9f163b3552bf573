//! Grid experiments: networks × recruitment settings × replications.
//!
//! All randomness is drawn from streams keyed by `(master_seed, role, cell,
//! replication)`, and results are collected in grid order, so the output
//! does not depend on the number of worker threads.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_ci, BootstrapConfig, BootstrapMethod};
use crate::estimate::{estimate_all, EstimateSet};
use crate::netcore::{compute_stats, Network};
use crate::netgen::{calibrate_p_delta, configure_groups, koskk_generate, CalibrationConfig, KoskkParams, TuneTargets};
use crate::rdssim::{run_rds, RdsConfig, RdsRngs};
use crate::rng::{self, tag};

use super::format::{fmt_g, fmt_opt, parse_opt};
use super::ingest::ingest_network;
use super::metrics::{compute_metrics, compute_p_best};
use super::{read_file, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Sample,
    Rdsi,
    Rdsii,
    RdsiEgo,
    /// Observed cross-group recruitment share from A.
    SAb,
    /// Ego-network estimate of the A→B link share.
    SEgoAb,
}

impl Estimator {
    pub const ALL: [Estimator; 6] =
        [Estimator::Sample, Estimator::Rdsi, Estimator::Rdsii, Estimator::RdsiEgo, Estimator::SAb, Estimator::SEgoAb];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Sample => "sample",
            Estimator::Rdsi => "rdsi",
            Estimator::Rdsii => "rdsii",
            Estimator::RdsiEgo => "rdsi_ego",
            Estimator::SAb => "s_ab",
            Estimator::SEgoAb => "s_ego_ab",
        }
    }

    pub fn value(self, e: &EstimateSet) -> Option<f64> {
        match self {
            Estimator::Sample => e.sample_proportion,
            Estimator::Rdsi => e.rdsi,
            Estimator::Rdsii => e.rdsii,
            Estimator::RdsiEgo => e.rdsi_ego,
            Estimator::SAb => e.s_ab(),
            Estimator::SEgoAb => e.s_ego_ab(),
        }
    }

    /// Link-share estimators target `s*_AB`; the rest target `P*_A`.
    pub fn estimates_link_share(self) -> bool {
        matches!(self, Estimator::SAb | Estimator::SEgoAb)
    }

    /// The estimator a bootstrap method's intervals are centred on.
    pub fn for_bootstrap(method: BootstrapMethod) -> Estimator {
        match method {
            BootstrapMethod::Origin => Estimator::Rdsi,
            BootstrapMethod::Ego1 | BootstrapMethod::Ego2 => Estimator::RdsiEgo,
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Estimator::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown estimator `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkSource {
    /// One generated base network, retuned to each group target.
    Generate(GeneratedNetworks),
    File {
        edges: PathBuf,
        attrs: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedNetworks {
    pub koskk: KoskkParams,
    /// Bisect `p_delta` toward `koskk.target_mean_degree` first.
    #[serde(default)]
    pub calibrate: bool,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    pub groups: Vec<TuneTargets>,
}

/// Recruitment grid. An empty list means "use the base value".
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RdsGrid {
    pub base: RdsConfig,
    /// `(n_seeds, coupons)` pairs.
    pub design: Vec<(usize, usize)>,
    pub p_diff: Vec<f64>,
    /// `(p_miss_a, p_miss_b)` pairs.
    pub p_miss: Vec<(f64, f64)>,
    /// `(p_err_ab, p_err_ba)` pairs.
    pub p_err: Vec<(f64, f64)>,
}

impl RdsGrid {
    pub fn configs(&self) -> Vec<RdsConfig> {
        fn or_base<T: Clone>(list: &[T], base: T) -> Vec<T> {
            if list.is_empty() {
                vec![base]
            } else {
                list.to_vec()
            }
        }
        let b = &self.base;
        let mut out = Vec::new();
        for (n_seeds, coupons) in or_base(&self.design, (b.n_seeds, b.coupons)) {
            for p_diff in or_base(&self.p_diff, b.p_diff) {
                for (p_miss_a, p_miss_b) in or_base(&self.p_miss, (b.p_miss_a, b.p_miss_b)) {
                    for (p_err_ab, p_err_ba) in or_base(&self.p_err, (b.p_err_ab, b.p_err_ba)) {
                        out.push(RdsConfig {
                            n_seeds,
                            coupons,
                            p_diff,
                            p_miss_a,
                            p_miss_b,
                            p_err_ab,
                            p_err_ba,
                            ..b.clone()
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputPaths {
    pub results: Option<PathBuf>,
    /// Per-replication estimates, for distribution plots.
    pub estimates: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub network: NetworkSource,
    #[serde(default)]
    pub rds: RdsGrid,
    #[serde(default = "all_estimators")]
    pub estimators: Vec<Estimator>,
    pub replications: usize,
    #[serde(default)]
    pub bootstrap: Option<BootstrapConfig>,
    pub master_seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

fn all_estimators() -> Vec<Estimator> {
    Estimator::ALL.to_vec()
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Usage(format!("experiment spec: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let usage = |m: &str| Err(HarnessError::Usage(m.to_string()));
        if self.replications == 0 {
            return usage("replications must be at least 1");
        }
        if self.estimators.is_empty() {
            return usage("no estimators selected");
        }
        if let NetworkSource::Generate(g) = &self.network {
            if g.groups.is_empty() {
                return usage("network.generate.groups is empty");
            }
            g.koskk.validate()?;
        }
        for cfg in self.rds.configs() {
            cfg.validate()?;
        }
        if let Some(bs) = &self.bootstrap {
            bs.validate()?;
        }
        Ok(())
    }
}

/// Population values of one tuned or loaded network.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Truth {
    p_a: f64,
    s_ab: Option<f64>,
    h: Option<f64>,
    w: Option<f64>,
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub cell: usize,
    pub p_a: Option<f64>,
    pub h: Option<f64>,
    pub w: Option<f64>,
    pub n_seeds: usize,
    pub coupons: usize,
    pub p_diff: f64,
    pub p_miss_a: f64,
    pub p_miss_b: f64,
    pub p_err_ab: f64,
    pub p_err_ba: f64,
    pub truth: Option<f64>,
    pub estimator: String,
    pub bias: Option<f64>,
    pub sd: Option<f64>,
    pub rmse: Option<f64>,
    pub p_best: Option<f64>,
    pub n_undefined: usize,
    pub ci_coverage: Option<f64>,
    pub mean: Option<f64>,
    pub status: String,
}

pub const RESULT_COLUMNS: [&str; 21] = [
    "cell",
    "p_a",
    "h",
    "w",
    "n_seeds",
    "coupons",
    "p_diff",
    "p_miss_a",
    "p_miss_b",
    "p_err_ab",
    "p_err_ba",
    "truth",
    "estimator",
    "bias",
    "sd",
    "rmse",
    "p_best",
    "n_undefined",
    "ci_coverage",
    "mean",
    "status",
];

impl ResultRow {
    fn fields(&self) -> Vec<String> {
        vec![
            self.cell.to_string(),
            fmt_opt(self.p_a),
            fmt_opt(self.h),
            fmt_opt(self.w),
            self.n_seeds.to_string(),
            self.coupons.to_string(),
            fmt_g(self.p_diff),
            fmt_g(self.p_miss_a),
            fmt_g(self.p_miss_b),
            fmt_g(self.p_err_ab),
            fmt_g(self.p_err_ba),
            fmt_opt(self.truth),
            self.estimator.clone(),
            fmt_opt(self.bias),
            fmt_opt(self.sd),
            fmt_opt(self.rmse),
            fmt_opt(self.p_best),
            self.n_undefined.to_string(),
            fmt_opt(self.ci_coverage),
            fmt_opt(self.mean),
            self.status.clone(),
        ]
    }
}

pub fn results_to_csv(rows: &[ResultRow]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(RESULT_COLUMNS).expect("in-memory write");
    for row in rows {
        w.write_record(row.fields()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn results_from_csv(text: &str) -> Result<Vec<ResultRow>, HarnessError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| HarnessError::Data(e.to_string()))?.clone();
    if headers.iter().ne(RESULT_COLUMNS) {
        return Err(HarnessError::Data(format!("results header must be {}", RESULT_COLUMNS.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| HarnessError::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let bad = |col: &str| HarnessError::Parse {
            source_name: "results".into(),
            line,
            message: format!("bad value in column `{col}`"),
        };
        let get = |k: usize| &record[k];
        let opt = |k: usize| parse_opt(get(k)).map_err(|_| bad(RESULT_COLUMNS[k]));
        let num = |k: usize| opt(k)?.ok_or_else(|| bad(RESULT_COLUMNS[k]));
        let int = |k: usize| get(k).parse::<usize>().map_err(|_| bad(RESULT_COLUMNS[k]));
        rows.push(ResultRow {
            cell: int(0)?,
            p_a: opt(1)?,
            h: opt(2)?,
            w: opt(3)?,
            n_seeds: int(4)?,
            coupons: int(5)?,
            p_diff: num(6)?,
            p_miss_a: num(7)?,
            p_miss_b: num(8)?,
            p_err_ab: num(9)?,
            p_err_ba: num(10)?,
            truth: opt(11)?,
            estimator: get(12).to_string(),
            bias: opt(13)?,
            sd: opt(14)?,
            rmse: opt(15)?,
            p_best: opt(16)?,
            n_undefined: int(17)?,
            ci_coverage: opt(18)?,
            mean: opt(19)?,
            status: get(20).to_string(),
        });
    }
    Ok(rows)
}

/// One estimate from one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub cell: usize,
    pub replication: usize,
    pub estimator: Estimator,
    pub truth: f64,
    pub value: Option<f64>,
}

pub fn estimates_to_csv(records: &[EstimateRecord]) -> String {
    let mut out = String::from("cell,replication,estimator,truth,value\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.cell,
            r.replication,
            r.estimator.name(),
            fmt_g(r.truth),
            fmt_opt(r.value)
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub estimates: Vec<EstimateRecord>,
    /// `p_delta` used for generation, when generated.
    pub p_delta: Option<f64>,
}

impl ExperimentOutput {
    pub fn results_csv(&self) -> String {
        results_to_csv(&self.rows)
    }

    pub fn estimates_csv(&self) -> String {
        estimates_to_csv(&self.estimates)
    }
}

struct PreparedNetwork {
    target: Option<TuneTargets>,
    outcome: Result<(Network, Truth), String>,
}

fn truth_of(net: &Network) -> Truth {
    let s = compute_stats(net);
    Truth { p_a: s.p_a, s_ab: s.s_star.s_ab(), h: s.homophily, w: s.activity_ratio }
}

fn prepare_networks(spec: &ExperimentSpec) -> Result<(Vec<PreparedNetwork>, Option<f64>), HarnessError> {
    match &spec.network {
        NetworkSource::File { edges, attrs } => {
            let net = ingest_network(edges, attrs)?.network;
            let truth = truth_of(&net);
            Ok((vec![PreparedNetwork { target: None, outcome: Ok((net, truth)) }], None))
        }
        NetworkSource::Generate(g) => {
            let mut params = g.koskk.clone();
            if g.calibrate {
                let seed = rng::derive_seed(spec.master_seed, &[tag::PILOT]);
                params.p_delta = calibrate_p_delta(&params, &g.calibration, seed)?;
            }
            let base = koskk_generate(&params, &mut rng::stream(spec.master_seed, &[tag::NETWORK]))?;
            let prepared = g
                .groups
                .par_iter()
                .enumerate()
                .map(|(k, targets)| {
                    let mut net = base.clone();
                    let mut r = rng::stream(spec.master_seed, &[tag::TUNING, k as u64]);
                    let outcome = configure_groups(&mut net, targets, &mut r)
                        .map(|_| {
                            let truth = truth_of(&net);
                            (net, truth)
                        })
                        .map_err(|e| e.to_string());
                    PreparedNetwork { target: Some(targets.clone()), outcome }
                })
                .collect();
            Ok((prepared, Some(params.p_delta)))
        }
    }
}

struct Replication {
    values: Vec<Option<f64>>,
    covered: Option<bool>,
}

fn replicate(
    net: &Network,
    rds: &RdsConfig,
    spec: &ExperimentSpec,
    cell: usize,
    rep: usize,
    truth: &Truth,
) -> Result<Replication, HarnessError> {
    let path = [tag::REPLICATION, cell as u64, rep as u64];
    let sample = run_rds(net, rds, &mut RdsRngs::new(spec.master_seed, &path))?;
    let est = estimate_all(&sample);
    let values = spec.estimators.iter().map(|e| e.value(&est)).collect();
    let covered = match &spec.bootstrap {
        None => None,
        Some(cfg) => {
            let seed = rng::derive_seed(spec.master_seed, &[tag::BOOTSTRAP, cell as u64, rep as u64]);
            // a sample the bootstrap cannot resample counts as not covered
            Some(bootstrap_ci(&sample, cfg, seed).is_ok_and(|out| out.interval.contains(truth.p_a)))
        }
    };
    Ok(Replication { values, covered })
}

fn cell_rows(
    spec: &ExperimentSpec,
    cell: usize,
    rds: &RdsConfig,
    prepared: &PreparedNetwork,
    estimates: &mut Vec<EstimateRecord>,
) -> Result<Vec<ResultRow>, HarnessError> {
    let template = |estimator: Estimator, truth: Option<f64>, status: String| ResultRow {
        cell,
        p_a: prepared.target.as_ref().map(|t| t.target_p_a),
        h: prepared.target.as_ref().map(|t| t.target_h),
        w: prepared.target.as_ref().map(|t| t.target_w),
        n_seeds: rds.n_seeds,
        coupons: rds.coupons,
        p_diff: rds.p_diff,
        p_miss_a: rds.p_miss_a,
        p_miss_b: rds.p_miss_b,
        p_err_ab: rds.p_err_ab,
        p_err_ba: rds.p_err_ba,
        truth,
        estimator: estimator.name().to_string(),
        bias: None,
        sd: None,
        rmse: None,
        p_best: None,
        n_undefined: spec.replications,
        ci_coverage: None,
        mean: None,
        status,
    };
    let (net, truth) = match &prepared.outcome {
        Ok(pair) => pair,
        Err(msg) => {
            return Ok(spec.estimators.iter().map(|&e| template(e, None, format!("failed: {msg}"))).collect());
        }
    };

    let reps = (0..spec.replications)
        .into_par_iter()
        .map(|rep| replicate(net, rds, spec, cell, rep, truth))
        .collect::<Result<Vec<_>, _>>()?;

    let truth_for = |e: Estimator| if e.estimates_link_share() { truth.s_ab } else { Some(truth.p_a) };
    let mut p_best = vec![None; spec.estimators.len()];
    for link_family in [false, true] {
        let members: Vec<usize> =
            (0..spec.estimators.len()).filter(|&k| spec.estimators[k].estimates_link_share() == link_family).collect();
        let Some(family_truth) = members.first().and_then(|&k| truth_for(spec.estimators[k])) else {
            continue;
        };
        if members.len() < 2 {
            continue;
        }
        let table: Vec<Vec<Option<f64>>> =
            reps.iter().map(|r| members.iter().map(|&k| r.values[k]).collect()).collect();
        for (share, &k) in compute_p_best(&table, family_truth).into_iter().zip(&members) {
            p_best[k] = Some(share);
        }
    }
    let coverage = spec.bootstrap.as_ref().map(|cfg| {
        let hits = reps.iter().filter(|r| r.covered == Some(true)).count();
        (Estimator::for_bootstrap(cfg.method), hits as f64 / reps.len() as f64)
    });

    let mut rows = Vec::new();
    for (k, &e) in spec.estimators.iter().enumerate() {
        let values: Vec<Option<f64>> = reps.iter().map(|r| r.values[k]).collect();
        let t = truth_for(e);
        if let Some(t) = t {
            estimates.extend(values.iter().enumerate().map(|(rep, &value)| EstimateRecord {
                cell,
                replication: rep,
                estimator: e,
                truth: t,
                value,
            }));
        }
        let mut row = template(e, t, "ok".to_string());
        row.p_a = Some(truth.p_a);
        row.h = truth.h;
        row.w = truth.w;
        row.p_best = p_best[k];
        row.ci_coverage = coverage.filter(|(target, _)| *target == e).map(|(_, c)| c);
        row.n_undefined = values.iter().filter(|v| v.is_none()).count();
        match t.map(|t| compute_metrics(&values, t)) {
            Some(Ok(m)) => {
                row.bias = Some(m.bias);
                row.sd = Some(m.sd);
                row.rmse = Some(m.rmse);
                row.mean = Some(m.mean);
            }
            Some(Err(_)) => {
                let defined: Vec<f64> = values.iter().flatten().copied().collect();
                if let (Some(&v), Some(t)) = (defined.first(), t) {
                    row.mean = Some(v);
                    row.bias = Some((v - t).abs());
                    row.rmse = Some((v - t).abs());
                }
                row.status = "insufficient".to_string();
            }
            None => row.status = "undefined truth".to_string(),
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Runs every grid cell on a pool of `workers` threads.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentOutput, HarnessError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Runtime(e.to_string()))?;
    pool.install(|| {
        let (networks, p_delta) = prepare_networks(spec)?;
        let configs = spec.rds.configs();
        let cells: Vec<(usize, &PreparedNetwork, &RdsConfig)> = networks
            .iter()
            .flat_map(|n| configs.iter().map(move |c| (n, c)))
            .enumerate()
            .map(|(i, (n, c))| (i, n, c))
            .collect();
        let per_cell = cells
            .par_iter()
            .map(|&(cell, net, cfg)| {
                let mut est = Vec::new();
                cell_rows(spec, cell, cfg, net, &mut est).map(|rows| (rows, est))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = Vec::new();
        let mut estimates = Vec::new();
        for (r, e) in per_cell {
            rows.extend(r);
            estimates.extend(e);
        }
        Ok(ExperimentOutput { rows, estimates, p_delta })
    })
}
