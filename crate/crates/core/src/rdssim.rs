//! Simulation of coupon-based chain-referral recruitment on a network, with
//! differential recruitment and two reporting-error channels.
//!
//! Recruitment always runs on the true neighborhood. Reporting errors only
//! change what a respondent *reports* (degree and alter composition) and draw
//! from their own random stream, so switching them on or off never perturbs
//! the recruitment trajectory.

use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::{Group, Network, NodeId};
use crate::rng::{self, tag, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdsError {
    #[error("invalid RDS configuration: {0}")]
    InvalidConfig(String),
    #[error("requested {requested} seeds but the network has only {available} nodes")]
    TooManySeeds { requested: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMode {
    #[default]
    Uniform,
    DegreeProportional,
}

/// Recruitment design and behavior. Defaults give the standard design:
/// 6 seeds, 2 coupons, sample size 500, without replacement, random
/// recruitment, no reporting error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RdsConfig {
    pub n_seeds: usize,
    pub coupons: usize,
    pub target_size: usize,
    pub with_replacement: bool,
    pub seed_mode: SeedMode,
    /// Group-A neighbors get recruitment weight `1 + p_diff`.
    pub p_diff: f64,
    pub p_miss_a: f64,
    pub p_miss_b: f64,
    /// Probability a surviving A alter is reported as B.
    pub p_err_ab: f64,
    /// Probability a surviving B alter is reported as A.
    pub p_err_ba: f64,
    pub reseed_on_dieout: bool,
}

impl Default for RdsConfig {
    fn default() -> Self {
        RdsConfig {
            n_seeds: 6,
            coupons: 2,
            target_size: 500,
            with_replacement: false,
            seed_mode: SeedMode::Uniform,
            p_diff: 0.0,
            p_miss_a: 0.0,
            p_miss_b: 0.0,
            p_err_ab: 0.0,
            p_err_ba: 0.0,
            reseed_on_dieout: true,
        }
    }
}

impl RdsConfig {
    pub fn validate(&self) -> Result<(), RdsError> {
        let bad = |m: String| Err(RdsError::InvalidConfig(m));
        if self.n_seeds == 0 {
            return bad("n_seeds must be positive".into());
        }
        if self.target_size < self.n_seeds {
            return bad(format!("target_size {} is smaller than n_seeds {}", self.target_size, self.n_seeds));
        }
        if !(self.p_diff >= 0.0 && self.p_diff.is_finite()) {
            return bad(format!("p_diff = {} must be >= 0", self.p_diff));
        }
        for (name, p) in [
            ("p_miss_a", self.p_miss_a),
            ("p_miss_b", self.p_miss_b),
            ("p_err_ab", self.p_err_ab),
            ("p_err_ba", self.p_err_ba),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} not in [0, 1]"));
            }
        }
        Ok(())
    }

    fn miss(&self, g: Group) -> f64 {
        match g {
            Group::A => self.p_miss_a,
            Group::B => self.p_miss_b,
        }
    }

    fn misclassify(&self, g: Group) -> f64 {
        match g {
            Group::A => self.p_err_ab,
            Group::B => self.p_err_ba,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Respondent {
    pub node_id: NodeId,
    pub wave: usize,
    pub recruiter: Option<NodeId>,
    /// Position of the recruiter in [`RdsSample::respondents`].
    pub recruiter_index: Option<usize>,
    pub true_group: Group,
    pub true_degree: usize,
    pub reported_degree: usize,
    pub reported_n_a: usize,
    pub reported_n_b: usize,
    pub is_seed: bool,
}

impl Respondent {
    pub fn group(&self) -> Group {
        self.true_group
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RdsSample {
    pub respondents: Vec<Respondent>,
    /// `(recruiter, recruit)` node pairs in recruitment order.
    pub recruitment_edges: Vec<(NodeId, NodeId)>,
    /// False when the process stopped short of the target size.
    pub complete: bool,
}

impl RdsSample {
    pub fn len(&self) -> usize {
        self.respondents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.respondents.is_empty()
    }

    pub fn non_seeds(&self) -> impl Iterator<Item = &Respondent> + '_ {
        self.respondents.iter().filter(|r| !r.is_seed)
    }
}

/// Independent streams for each source of randomness in one run.
pub struct RdsRngs {
    pub seeding: SimRng,
    pub recruitment: SimRng,
    pub reporting: SimRng,
}

impl RdsRngs {
    pub fn new(master: u64, path: &[u64]) -> Self {
        let with = |t: u64| {
            let mut p = path.to_vec();
            p.push(t);
            rng::stream(master, &p)
        };
        RdsRngs { seeding: with(tag::SEEDING), recruitment: with(tag::RECRUITMENT), reporting: with(tag::REPORTING) }
    }
}

/// Distinct seed nodes, uniformly or proportional to degree, without
/// replacement.
pub fn draw_seeds(net: &Network, n_seeds: usize, mode: SeedMode, rng: &mut SimRng) -> Result<Vec<NodeId>, RdsError> {
    let n = net.node_count();
    if n_seeds > n {
        return Err(RdsError::TooManySeeds { requested: n_seeds, available: n });
    }
    match mode {
        SeedMode::Uniform => Ok(index::sample(rng, n, n_seeds).into_vec()),
        SeedMode::DegreeProportional => {
            let positive = (0..n).filter(|&i| net.degree(i) > 0).count();
            if n_seeds > positive {
                // isolated nodes can only be reached uniformly
                let mut out = index::sample_weighted(rng, n, |i| net.degree(i) as f64, positive)
                    .expect("positive weights")
                    .into_vec();
                let rest: Vec<NodeId> = (0..n).filter(|&i| net.degree(i) == 0).collect();
                for k in index::sample(rng, rest.len(), n_seeds - positive) {
                    out.push(rest[k]);
                }
                return Ok(out);
            }
            Ok(index::sample_weighted(rng, n, |i| net.degree(i) as f64, n_seeds)
                .expect("weights are finite and non-negative")
                .into_vec())
        }
    }
}

/// Reported degree and alter composition of one respondent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Report {
    pub degree: usize,
    pub n_a: usize,
    pub n_b: usize,
}

/// Applies the omission channel (each alter of group X dropped with
/// `p_miss_x`) and then the misclassification channel to one respondent's
/// true neighborhood. The reported degree is floored at one; the single alter
/// kept by the floor is `anchor` (the recruiter) when given, otherwise a
/// random neighbor.
pub fn apply_report_errors(
    net: &Network,
    node: NodeId,
    anchor: Option<NodeId>,
    cfg: &RdsConfig,
    rng: &mut SimRng,
) -> Report {
    let mut survivors = [0usize; 2];
    for &alter in net.neighbors(node) {
        let g = net.group(alter);
        let p = cfg.miss(g);
        if p == 0.0 || !rng.random_bool(p) {
            survivors[g.index()] += 1;
        }
    }
    if survivors[0] + survivors[1] == 0 {
        let alter = anchor.or_else(|| {
            let nb = net.neighbors(node);
            (!nb.is_empty()).then(|| nb[rng.random_range(0..nb.len())])
        });
        // an isolated node still counts itself as a contact-less respondent
        let g = alter.map_or(Group::B, |a| net.group(a));
        survivors[g.index()] = 1;
    }
    let mut reported = [0usize; 2];
    for g in Group::BOTH {
        let p = cfg.misclassify(g);
        for _ in 0..survivors[g.index()] {
            if p > 0.0 && rng.random_bool(p) {
                reported[g.other().index()] += 1;
            } else {
                reported[g.index()] += 1;
            }
        }
    }
    Report { degree: survivors[0] + survivors[1], n_a: reported[0], n_b: reported[1] }
}

/// Runs one recruitment process.
pub fn run_rds(net: &Network, cfg: &RdsConfig, rngs: &mut RdsRngs) -> Result<RdsSample, RdsError> {
    cfg.validate()?;
    let n = net.node_count();
    let seeds = draw_seeds(net, cfg.n_seeds, cfg.seed_mode, &mut rngs.seeding)?;

    let mut sampled = vec![false; n];
    let mut sample = RdsSample {
        respondents: Vec::with_capacity(cfg.target_size),
        recruitment_edges: Vec::with_capacity(cfg.target_size),
        complete: true,
    };
    let mut queue = VecDeque::new();

    let enroll = |sample: &mut RdsSample,
                  queue: &mut VecDeque<usize>,
                  sampled: &mut [bool],
                  node: NodeId,
                  parent: Option<usize>,
                  reporting: &mut SimRng| {
        let (wave, recruiter) = match parent {
            Some(p) => (sample.respondents[p].wave + 1, Some(sample.respondents[p].node_id)),
            None => (0, None),
        };
        let report = apply_report_errors(net, node, recruiter, cfg, reporting);
        sampled[node] = true;
        if let Some(r) = recruiter {
            sample.recruitment_edges.push((r, node));
        }
        queue.push_back(sample.respondents.len());
        sample.respondents.push(Respondent {
            node_id: node,
            wave,
            recruiter,
            recruiter_index: parent,
            true_group: net.group(node),
            true_degree: net.degree(node),
            reported_degree: report.degree,
            reported_n_a: report.n_a,
            reported_n_b: report.n_b,
            is_seed: parent.is_none(),
        });
    };

    for &s in seeds.iter().take(cfg.target_size) {
        enroll(&mut sample, &mut queue, &mut sampled, s, None, &mut rngs.reporting);
    }

    let mut eligible: Vec<NodeId> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let weight_a = 1.0 + cfg.p_diff;
    while sample.respondents.len() < cfg.target_size {
        let Some(current) = queue.pop_front() else {
            if !cfg.reseed_on_dieout {
                sample.complete = false;
                break;
            }
            match fresh_seed(net, &sampled, cfg.seed_mode, &mut rngs.seeding) {
                Some(s) => {
                    enroll(&mut sample, &mut queue, &mut sampled, s, None, &mut rngs.reporting);
                    continue;
                }
                None => {
                    sample.complete = false;
                    break;
                }
            }
        };
        let node = sample.respondents[current].node_id;
        eligible.clear();
        weights.clear();
        for &v in net.neighbors(node) {
            if cfg.with_replacement || !sampled[v] {
                eligible.push(v);
                weights.push(if net.group(v) == Group::A { weight_a } else { 1.0 });
            }
        }
        for _ in 0..cfg.coupons {
            if eligible.is_empty() || sample.respondents.len() >= cfg.target_size {
                break;
            }
            let total: f64 = weights.iter().sum();
            let mut r = rngs.recruitment.random::<f64>() * total;
            let mut pick = eligible.len() - 1;
            for (k, &w) in weights.iter().enumerate() {
                if r < w {
                    pick = k;
                    break;
                }
                r -= w;
            }
            let recruit = eligible.swap_remove(pick);
            weights.swap_remove(pick);
            enroll(&mut sample, &mut queue, &mut sampled, recruit, Some(current), &mut rngs.reporting);
        }
    }
    Ok(sample)
}

fn fresh_seed(net: &Network, sampled: &[bool], mode: SeedMode, rng: &mut SimRng) -> Option<NodeId> {
    let pool: Vec<NodeId> = (0..net.node_count()).filter(|&i| !sampled[i]).collect();
    if pool.is_empty() {
        return None;
    }
    match mode {
        SeedMode::Uniform => Some(pool[rng.random_range(0..pool.len())]),
        SeedMode::DegreeProportional => {
            let total: usize = pool.iter().map(|&i| net.degree(i)).sum();
            if total == 0 {
                return Some(pool[rng.random_range(0..pool.len())]);
            }
            let mut r = rng.random_range(0..total);
            for &i in &pool {
                if r < net.degree(i) {
                    return Some(i);
                }
                r -= net.degree(i);
            }
            unreachable!("draw below total weight")
        }
    }
}
