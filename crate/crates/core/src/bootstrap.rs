//! Chain-bootstrap confidence intervals and their coverage.
//!
//! Three resampling schemes share one walk: starting from a random non-seed
//! respondent, the next respondent is drawn with replacement from a pool
//! chosen by the current respondent's group, until the replicate has as many
//! respondents as the original sample (seeds excluded).
//!
//! * [`BootstrapMethod::Origin`]: pools are "recruited by an A" and
//!   "recruited by a B"; replicates are scored with `rdsi`, using the walk's
//!   own transitions as the recruitment matrix.
//! * [`BootstrapMethod::Ego1`]: same walk, scored with `rdsi_ego`.
//! * [`BootstrapMethod::Ego2`]: pools are the respondents' own groups, and
//!   the next pool is picked with the ego-network link-type estimates of
//!   the original sample; scored with `rdsi_ego`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimate::{self, EgoRecord, EstimateError, RecruitmentMatrix, Tally};
use crate::netcore::{compute_stats, Group, Network};
use crate::rdssim::{run_rds, RdsConfig, RdsError, RdsRngs, RdsSample};
use crate::rng::{self, tag, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BootstrapError {
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("replicate estimates stayed undefined after {0} extra attempts")]
    TooManyUndefined(usize),
    #[error(transparent)]
    Rds(#[from] RdsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapMethod {
    Origin,
    Ego1,
    Ego2,
}

impl BootstrapMethod {
    pub const ALL: [BootstrapMethod; 3] = [BootstrapMethod::Origin, BootstrapMethod::Ego1, BootstrapMethod::Ego2];

    pub fn name(self) -> &'static str {
        match self {
            BootstrapMethod::Origin => "origin",
            BootstrapMethod::Ego1 => "ego1",
            BootstrapMethod::Ego2 => "ego2",
        }
    }
}

impl std::str::FromStr for BootstrapMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "origin" => Ok(BootstrapMethod::Origin),
            "ego1" => Ok(BootstrapMethod::Ego1),
            "ego2" => Ok(BootstrapMethod::Ego2),
            other => Err(format!("unknown bootstrap method `{other}` (origin, ego1, ego2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub method: BootstrapMethod,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_replicates() -> usize {
    1000
}
fn default_level() -> f64 {
    0.95
}

impl BootstrapConfig {
    pub fn new(method: BootstrapMethod, replicates: usize, level: f64) -> Self {
        BootstrapConfig { method, replicates, level }
    }

    pub fn validate(&self) -> Result<(), BootstrapError> {
        if self.replicates < 2 {
            return Err(BootstrapError::InvalidConfig("replicates must be at least 2".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(BootstrapError::InvalidConfig(format!("level {} not in (0, 1)", self.level)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn within(&self, other: &ConfidenceInterval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }
}

/// Equal-tail interval from sorted replicate estimates: `⌈R(1−level)/2⌉`
/// order statistics are dropped from each end, no interpolation.
pub fn percentile_interval(sorted: &[f64], level: f64) -> ConfidenceInterval {
    assert!(!sorted.is_empty(), "no replicate estimates");
    let r = sorted.len();
    // guard against 1000 * (1 - 0.95) / 2 = 25.000000000000018
    let mut drop = ((r as f64) * (1.0 - level) / 2.0 - 1e-9).ceil().max(0.0) as usize;
    if 2 * drop >= r {
        drop = (r - 1) / 2;
    }
    ConfidenceInterval { lower: sorted[drop], upper: sorted[r - 1 - drop], level }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    pub method: BootstrapMethod,
    pub interval: ConfidenceInterval,
    /// Estimate on the original sample with the method's estimator.
    pub point_estimate: Option<f64>,
    /// Replicate estimates in ascending order.
    #[serde(skip)]
    pub replicate_estimates: Vec<f64>,
    /// Steps that found their pool empty and drew from all respondents.
    pub fallback_draws: usize,
    /// Replicates redrawn because their estimate was undefined.
    pub redraws: usize,
}

impl BootstrapOutcome {
    pub fn interval_at(&self, level: f64) -> ConfidenceInterval {
        percentile_interval(&self.replicate_estimates, level)
    }
}

/// Resampling state prepared once per sample.
struct Resampler {
    records: Vec<EgoRecord>,
    method: BootstrapMethod,
    /// Pools keyed by group: recruiter's group (origin, ego1) or own group (ego2).
    pools: [Vec<usize>; 2],
    /// ego2: probability of moving to the A pool from an A / a B respondent.
    to_a: [f64; 2],
}

impl Resampler {
    fn new(sample: &RdsSample, method: BootstrapMethod) -> Result<Self, BootstrapError> {
        let mut records = Vec::new();
        let mut pools = [Vec::new(), Vec::new()];
        for r in sample.non_seeds() {
            let idx = records.len();
            records.push(EgoRecord::from(r));
            let key = match method {
                BootstrapMethod::Origin | BootstrapMethod::Ego1 => {
                    r.recruiter_index.map(|p| sample.respondents[p].true_group)
                }
                BootstrapMethod::Ego2 => Some(r.true_group),
            };
            if let Some(g) = key {
                pools[g.index()].push(idx);
            }
        }
        if records.is_empty() {
            return Err(EstimateError::EmptySample.into());
        }
        let ego: RecruitmentMatrix = records.iter().collect::<Tally>().ego_matrix();
        let to_a = [ego.s_ab().map_or(1.0, |s| 1.0 - s), ego.s_ba().unwrap_or(0.0)];
        Ok(Resampler { records, method, pools, to_a })
    }

    /// One replicate: returns its estimate (if defined) and the number of
    /// fallback draws it needed.
    fn replicate(&self, rng: &mut SimRng) -> (Result<f64, EstimateError>, usize) {
        let n = self.records.len();
        let mut tally = Tally::default();
        let mut transitions = [[0.0f64; 2]; 2];
        let mut fallbacks = 0;
        let mut current = rng.random_range(0..n);
        tally.push(&self.records[current]);
        for _ in 1..n {
            let g = self.records[current].group;
            let pool_group = match self.method {
                BootstrapMethod::Origin | BootstrapMethod::Ego1 => g,
                BootstrapMethod::Ego2 => {
                    if rng.random::<f64>() < self.to_a[g.index()] {
                        Group::A
                    } else {
                        Group::B
                    }
                }
            };
            let pool = &self.pools[pool_group.index()];
            let next = if pool.is_empty() {
                fallbacks += 1;
                rng.random_range(0..n)
            } else {
                pool[rng.random_range(0..pool.len())]
            };
            transitions[g.index()][self.records[next].group.index()] += 1.0;
            tally.push(&self.records[next]);
            current = next;
        }
        let estimate = match self.method {
            BootstrapMethod::Origin => tally.rdsi_with(&RecruitmentMatrix::from_counts(transitions)),
            BootstrapMethod::Ego1 | BootstrapMethod::Ego2 => tally.rdsi_ego(),
        };
        (estimate, fallbacks)
    }
}

/// Builds a bootstrap confidence interval. Replicate `r` draws from the
/// stream `(seed, r, attempt)`, so the result is independent of evaluation
/// order.
pub fn bootstrap_ci(sample: &RdsSample, cfg: &BootstrapConfig, seed: u64) -> Result<BootstrapOutcome, BootstrapError> {
    cfg.validate()?;
    let resampler = Resampler::new(sample, cfg.method)?;
    let mut estimates = Vec::with_capacity(cfg.replicates);
    let mut fallback_draws = 0;
    let mut redraws = 0;
    for r in 0..cfg.replicates {
        let mut attempt = 0u64;
        loop {
            let mut rng = rng::stream(seed, &[tag::BOOTSTRAP, r as u64, attempt]);
            let (est, fb) = resampler.replicate(&mut rng);
            fallback_draws += fb;
            match est {
                Ok(v) => {
                    estimates.push(v);
                    break;
                }
                Err(_) => {
                    redraws += 1;
                    if redraws > cfg.replicates {
                        return Err(BootstrapError::TooManyUndefined(redraws - 1));
                    }
                    attempt += 1;
                }
            }
        }
    }
    estimates.sort_by(f64::total_cmp);
    let point_estimate = match cfg.method {
        BootstrapMethod::Origin => estimate::rdsi(sample).ok(),
        _ => estimate::rdsi_ego(sample).ok(),
    };
    Ok(BootstrapOutcome {
        method: cfg.method,
        interval: percentile_interval(&estimates, cfg.level),
        point_estimate,
        replicate_estimates: estimates,
        fallback_draws,
        redraws,
    })
}

/// Fraction of `n_samples` independent RDS samples whose bootstrap interval
/// contains the population proportion of group A.
pub fn coverage(
    net: &Network,
    rds_cfg: &RdsConfig,
    bs_cfg: &BootstrapConfig,
    n_samples: usize,
    seed: u64,
) -> Result<f64, BootstrapError> {
    let report = coverage_study(net, rds_cfg, &[bs_cfg.method], bs_cfg.replicates, &[bs_cfg.level], n_samples, seed)?;
    Ok(report.rates[0][0])
}

/// Coverage of several methods and levels evaluated on the same RDS samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub truth: f64,
    pub methods: Vec<BootstrapMethod>,
    pub levels: Vec<f64>,
    /// `rates[method][level]`
    pub rates: Vec<Vec<f64>>,
    /// `intervals[sample][method][level]`
    pub intervals: Vec<Vec<Vec<ConfidenceInterval>>>,
    pub fallback_draws: usize,
    pub redraws: usize,
}

pub fn coverage_study(
    net: &Network,
    rds_cfg: &RdsConfig,
    methods: &[BootstrapMethod],
    replicates: usize,
    levels: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<CoverageReport, BootstrapError> {
    if n_samples == 0 {
        return Err(BootstrapError::InvalidConfig("n_samples must be positive".into()));
    }
    let truth = compute_stats(net).p_a;
    let per_sample = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rngs = RdsRngs::new(seed, &[tag::REPLICATION, k as u64]);
            let sample = run_rds(net, rds_cfg, &mut rngs)?;
            let bs_seed = rng::derive_seed(seed, &[tag::BOOTSTRAP, k as u64]);
            methods
                .iter()
                .map(|&m| {
                    let level = levels.first().copied().unwrap_or(0.95);
                    let out = bootstrap_ci(&sample, &BootstrapConfig::new(m, replicates, level), bs_seed)?;
                    let cis: Vec<ConfidenceInterval> = levels.iter().map(|&l| out.interval_at(l)).collect();
                    Ok((cis, out.fallback_draws, out.redraws))
                })
                .collect::<Result<Vec<_>, BootstrapError>>()
        })
        .collect::<Result<Vec<_>, BootstrapError>>()?;

    let mut rates = vec![vec![0.0; levels.len()]; methods.len()];
    let mut intervals = Vec::with_capacity(n_samples);
    let (mut fallback_draws, mut redraws) = (0, 0);
    for sample in per_sample {
        let mut row = Vec::with_capacity(methods.len());
        for (mi, (cis, fb, rd)) in sample.into_iter().enumerate() {
            fallback_draws += fb;
            redraws += rd;
            for (li, ci) in cis.iter().enumerate() {
                if ci.contains(truth) {
                    rates[mi][li] += 1.0;
                }
            }
            row.push(cis);
        }
        intervals.push(row);
    }
    for r in rates.iter_mut().flatten() {
        *r /= n_samples as f64;
    }
    Ok(CoverageReport {
        truth,
        methods: methods.to_vec(),
        levels: levels.to_vec(),
        rates,
        intervals,
        fallback_draws,
        redraws,
    })
}
