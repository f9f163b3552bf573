//! Weighted social-network generation (local/global attachment with node
//! deletion) and degree-preserving retuning of group structure.
//!
//! The generator grows communities through weight reinforcement: every
//! triadic step strengthens the links it walks over by `delta`, so later walks
//! prefer them. After the evolution, group labels are assigned at random and
//! the activity ratio and homophily are moved to their targets by label swaps
//! and double-edge rewiring respectively. Neither retuning step changes the
//! degree sequence.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::{compute_stats, Group, Network, NodeId};
use crate::rng::{self, tag, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetgenError {
    #[error("invalid generator parameter: {0}")]
    InvalidParams(String),
    #[error(
        "target mean degree {target} unreachable for p_delta in [0, 1] \
         (degree at lower bracket {low_degree:.3}, at upper bracket {high_degree:.3})"
    )]
    Unreachable { target: f64, low_degree: f64, high_degree: f64 },
    #[error("tuning needs both groups to be non-empty")]
    EmptyGroup,
    #[error("activity ratio target {target} not reached; best achieved {best}")]
    ActivityRatioNotReached { target: f64, best: f64 },
    #[error("homophily target {target} not reached; best achieved {best}")]
    HomophilyNotReached { target: f64, best: f64 },
}

/// Parameters of the weighted evolution model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoskkParams {
    pub n: usize,
    #[serde(default = "default_w0")]
    pub w0: f64,
    #[serde(default = "default_p_r")]
    pub p_r: f64,
    #[serde(default = "default_p_d")]
    pub p_d: f64,
    #[serde(default)]
    pub p_delta: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Evolution steps; `None` scales with `n` (10^8 steps per 10^4 nodes).
    #[serde(default)]
    pub steps: Option<u64>,
    #[serde(default)]
    pub target_mean_degree: Option<f64>,
}

fn default_w0() -> f64 {
    1.0
}
fn default_p_r() -> f64 {
    0.0005
}
fn default_p_d() -> f64 {
    0.001
}
fn default_delta() -> f64 {
    0.6
}

/// Steps that keep per-node churn at the reference regime (10^8 steps for
/// 10^4 nodes).
pub fn scaled_steps(n: usize) -> u64 {
    (n as u64).saturating_mul(10_000)
}

impl KoskkParams {
    /// Reference configuration: `w0 = 1`, `p_r = 0.0005`, `p_d = 0.001`,
    /// `delta = 0.6`, mean degree 10. `p_delta` still needs calibrating.
    pub fn reference(n: usize) -> Self {
        KoskkParams {
            n,
            w0: 1.0,
            p_r: 0.0005,
            p_d: 0.001,
            p_delta: 0.0,
            delta: 0.6,
            steps: None,
            target_mean_degree: Some(10.0),
        }
    }

    pub fn total_steps(&self) -> u64 {
        self.steps.unwrap_or_else(|| scaled_steps(self.n))
    }

    pub fn validate(&self) -> Result<(), NetgenError> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(NetgenError::InvalidParams(format!("{name} = {p} not in [0, 1]")))
            }
        };
        prob("p_r", self.p_r)?;
        prob("p_d", self.p_d)?;
        prob("p_delta", self.p_delta)?;
        if self.n < 2 {
            return Err(NetgenError::InvalidParams("n must be at least 2".into()));
        }
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return Err(NetgenError::InvalidParams(format!("w0 = {} must be positive", self.w0)));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(NetgenError::InvalidParams(format!("delta = {} must be >= 0", self.delta)));
        }
        if self.total_steps() == 0 {
            return Err(NetgenError::InvalidParams("steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Mutable weighted graph used during the evolution.
struct Evolving {
    adj: Vec<Vec<(u32, f64)>>,
    edges: usize,
}

impl Evolving {
    fn new(n: usize) -> Self {
        Evolving { adj: vec![Vec::new(); n], edges: 0 }
    }

    fn mean_degree(&self) -> f64 {
        2.0 * self.edges as f64 / self.adj.len() as f64
    }

    #[inline]
    fn position(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u].iter().position(|&(x, _)| x as usize == v)
    }

    #[inline]
    fn add_edge(&mut self, u: usize, v: usize, w: f64) {
        self.adj[u].push((v as u32, w));
        self.adj[v].push((u as u32, w));
        self.edges += 1;
    }

    #[inline]
    fn bump(&mut self, u: usize, pos_in_u: usize, delta: f64) {
        let (v, _) = self.adj[u][pos_in_u];
        self.adj[u][pos_in_u].1 += delta;
        let back = self.position(v as usize, u).expect("symmetric adjacency");
        self.adj[v as usize][back].1 += delta;
    }

    fn strip(&mut self, u: usize) {
        let nb = std::mem::take(&mut self.adj[u]);
        self.edges -= nb.len();
        for (v, _) in nb {
            let list = &mut self.adj[v as usize];
            if let Some(p) = list.iter().position(|&(x, _)| x as usize == u) {
                list.swap_remove(p);
            }
        }
    }

    /// Index into `adj[u]` drawn proportionally to weight, skipping
    /// `exclude`.
    #[inline]
    fn pick(&self, u: usize, exclude: Option<usize>, rng: &mut SimRng) -> usize {
        let list = &self.adj[u];
        let skip = |x: u32| exclude == Some(x as usize);
        let total: f64 = list.iter().filter(|e| !skip(e.0)).map(|e| e.1).sum();
        let mut r = rng.random::<f64>() * total;
        let mut last = None;
        for (p, &(x, w)) in list.iter().enumerate() {
            if skip(x) {
                continue;
            }
            last = Some(p);
            if r < w {
                return p;
            }
            r -= w;
        }
        last.expect("pick from a list with an eligible entry")
    }

    fn into_network(self) -> Network {
        let n = self.adj.len();
        let mut adjacency = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for list in self.adj {
            adjacency.push(list.iter().map(|&(v, _)| v as NodeId).collect());
            weights.push(list.iter().map(|&(_, w)| w).collect());
        }
        Network::from_parts_unchecked(adjacency, vec![Group::B; n], Some(weights))
    }
}

/// Runs the weighted evolution and returns a connected network with all
/// nodes labeled `B`.
pub fn koskk_generate(params: &KoskkParams, rng: &mut SimRng) -> Result<Network, NetgenError> {
    params.validate()?;
    let g = evolve(params, rng, None);
    let mut net = g.into_network();
    attach_stragglers(&mut net, params.w0, rng);
    Ok(net)
}

/// The evolution loop. With a `degree_cap`, stops early once the running
/// mean degree exceeds it.
fn evolve(params: &KoskkParams, rng: &mut SimRng, degree_cap: Option<f64>) -> Evolving {
    let n = params.n;
    let w0 = params.w0;
    let delta = params.delta;
    let mut g = Evolving::new(n);

    for step in 0..params.total_steps() {
        if let Some(cap) = degree_cap {
            if step % 1024 == 0 && g.mean_degree() > cap {
                break;
            }
        }
        let i = rng.random_range(0..n);

        // local attachment
        if !g.adj[i].is_empty() {
            let pj = g.pick(i, None, rng);
            let j = g.adj[i][pj].0 as usize;
            if g.adj[j].len() > 1 {
                let pk = g.pick(j, Some(i), rng);
                let k = g.adj[j][pk].0 as usize;
                match g.position(i, k) {
                    Some(pik) => g.bump(i, pik, delta),
                    None => {
                        if rng.random::<f64>() < params.p_delta {
                            g.add_edge(i, k, w0);
                        }
                    }
                }
                g.bump(i, pj, delta);
                g.bump(j, pk, delta);
            }
        }

        // global attachment
        if g.adj[i].is_empty() || rng.random::<f64>() < params.p_r {
            let mut l = rng.random_range(0..n - 1);
            if l >= i {
                l += 1;
            }
            if g.position(i, l).is_none() {
                g.add_edge(i, l, w0);
            }
        }

        // node deletion
        if rng.random::<f64>() < params.p_d {
            let v = rng.random_range(0..n);
            g.strip(v);
        }
    }
    g
}

/// Links every node outside the giant component to it: one edge at weight
/// `w0` from a random member of each stray component (an isolate is its own
/// member) to a random giant-component node.
fn attach_stragglers(net: &mut Network, w0: f64, rng: &mut SimRng) {
    let comps = net.components();
    if comps.len() <= 1 {
        return;
    }
    let mut giant = 0;
    for (idx, c) in comps.iter().enumerate() {
        if c.len() > comps[giant].len() {
            giant = idx;
        }
    }
    let targets = comps[giant].clone();
    let (adjacency, weights) = net.adjacency_mut();
    let weights = weights.expect("generated networks are weighted");
    for (idx, comp) in comps.iter().enumerate() {
        if idx == giant {
            continue;
        }
        let u = comp[rng.random_range(0..comp.len())];
        let v = targets[rng.random_range(0..targets.len())];
        adjacency[u].push(v);
        adjacency[v].push(u);
        weights[u].push(w0);
        weights[v].push(w0);
    }
}

/// Pilot configuration for [`calibrate_p_delta`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub pilots: usize,
    /// Steps per pilot; `None` uses the full run. Mean degree keeps rising
    /// long after the node lifetime, so shorter pilots undershoot.
    pub pilot_steps: Option<u64>,
    pub relative_tolerance: f64,
    pub max_bisections: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig { pilots: 3, pilot_steps: None, relative_tolerance: 0.05, max_bisections: 30 }
    }
}

/// Mean degree averaged over the pilot runs for a given `p_delta`. Pilots
/// use the same streams for every `p_delta` so the response is smooth. A
/// pilot whose degree runs past `degree_cap` is cut short and reports the
/// degree it had reached.
pub fn pilot_mean_degree(
    params: &KoskkParams,
    cfg: &CalibrationConfig,
    seed: u64,
    degree_cap: Option<f64>,
) -> Result<f64, NetgenError> {
    let pilot = KoskkParams { steps: Some(cfg.pilot_steps.unwrap_or_else(|| params.total_steps())), ..params.clone() };
    pilot.validate()?;
    let degrees: Vec<f64> = (0..cfg.pilots.max(1))
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, &[tag::PILOT, k as u64]);
            let g = evolve(&pilot, &mut r, degree_cap);
            g.mean_degree()
        })
        .collect();
    Ok(degrees.iter().sum::<f64>() / degrees.len() as f64)
}

/// Bisects `p_delta` on `[0, 1]` until pilot runs hit the target mean degree
/// within the relative tolerance.
pub fn calibrate_p_delta(params: &KoskkParams, cfg: &CalibrationConfig, seed: u64) -> Result<f64, NetgenError> {
    let target =
        params.target_mean_degree.ok_or_else(|| NetgenError::InvalidParams("target_mean_degree is required".into()))?;
    let cap = Some(3.0 * target);
    let eval = |p: f64| pilot_mean_degree(&KoskkParams { p_delta: p, ..params.clone() }, cfg, seed, cap);
    let close = |d: f64| (d - target).abs() <= cfg.relative_tolerance * target;

    let (mut lo, mut hi) = (0.0, 1.0);
    let mut d_lo = eval(lo)?;
    if close(d_lo) {
        return Ok(lo);
    }
    let mut d_hi = eval(hi)?;
    if close(d_hi) {
        return Ok(hi);
    }
    let unreachable = |low_degree, high_degree| NetgenError::Unreachable { target, low_degree, high_degree };
    if d_lo > target || d_hi < target {
        return Err(unreachable(d_lo, d_hi));
    }
    for _ in 0..cfg.max_bisections {
        let mid = 0.5 * (lo + hi);
        let d = eval(mid)?;
        if close(d) {
            return Ok(mid);
        }
        if d < target {
            lo = mid;
            d_lo = d;
        } else {
            hi = mid;
            d_hi = d;
        }
    }
    Err(unreachable(d_lo, d_hi))
}

/// Labels exactly `round(p_a * N)` uniformly chosen nodes `A`, the rest `B`.
pub fn assign_groups(net: &mut Network, p_a: f64, rng: &mut SimRng) {
    assert!((0.0..=1.0).contains(&p_a), "p_a must lie in [0, 1]");
    let n = net.node_count();
    let n_a = ((p_a * n as f64).round() as usize).min(n);
    let mut groups = vec![Group::B; n];
    for i in index::sample(rng, n, n_a) {
        groups[i] = Group::A;
    }
    net.set_groups(groups);
}

/// Retuning targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneTargets {
    pub target_p_a: f64,
    pub target_w: f64,
    pub target_h: f64,
    #[serde(default = "default_tol_w")]
    pub tolerance_w: f64,
    #[serde(default = "default_tol_h")]
    pub tolerance_h: f64,
    #[serde(default = "default_max_iter")]
    pub max_iterations: u64,
}

fn default_tol_w() -> f64 {
    0.02
}
fn default_tol_h() -> f64 {
    0.005
}
fn default_max_iter() -> u64 {
    10_000_000
}

impl TuneTargets {
    pub fn new(target_p_a: f64, target_h: f64, target_w: f64) -> Self {
        TuneTargets {
            target_p_a,
            target_w,
            target_h,
            tolerance_w: default_tol_w(),
            tolerance_h: default_tol_h(),
            max_iterations: default_max_iter(),
        }
    }
}

/// Swaps labels of random A/B node pairs until the activity ratio is within
/// tolerance. Degrees, edges and group sizes are untouched. Returns the
/// achieved ratio.
pub fn tune_activity_ratio(net: &mut Network, targets: &TuneTargets, rng: &mut SimRng) -> Result<f64, NetgenError> {
    let target = targets.target_w;
    let mut members: [Vec<NodeId>; 2] = [Vec::new(), Vec::new()];
    for (i, &g) in net.groups().iter().enumerate() {
        members[g.index()].push(i);
    }
    if members[0].is_empty() || members[1].is_empty() {
        return Err(NetgenError::EmptyGroup);
    }
    let (n_a, n_b) = (members[0].len() as f64, members[1].len() as f64);
    let mut vol = [0.0f64; 2];
    for x in 0..2 {
        vol[x] = members[x].iter().map(|&i| net.degree(i) as f64).sum();
    }
    let ratio = |vol: &[f64; 2]| (vol[0] / n_a) / (vol[1] / n_b);

    let mut best = ratio(&vol);
    let mut iterations = 0u64;
    loop {
        let w = ratio(&vol);
        if (w - target).abs() < (best - target).abs() {
            best = w;
        }
        if (w - target).abs() <= targets.tolerance_w {
            return Ok(w);
        }
        if iterations >= targets.max_iterations {
            return Err(NetgenError::ActivityRatioNotReached { target, best });
        }
        iterations += 1;
        let pa = rng.random_range(0..members[0].len());
        let pb = rng.random_range(0..members[1].len());
        let (i, j) = (members[0][pa], members[1][pb]);
        let (di, dj) = (net.degree(i), net.degree(j));
        if (w > target && di > dj) || (w < target && di < dj) {
            let groups = net.groups_mut();
            groups[i] = Group::B;
            groups[j] = Group::A;
            members[0][pa] = j;
            members[1][pb] = i;
            vol[0] += dj as f64 - di as f64;
            vol[1] += di as f64 - dj as f64;
        }
    }
}

fn replace_neighbor(net: &mut Network, node: NodeId, old: NodeId, new: NodeId, weight: Option<f64>) {
    let (adj, weights) = net.adjacency_mut();
    let pos = adj[node].iter().position(|&x| x == old).expect("edge present");
    adj[node][pos] = new;
    if let (Some(ws), Some(w)) = (weights, weight) {
        ws[node][pos] = w;
    }
}

/// One double-edge rewire attempt. Edges `(i, j)` and `(k, l)` become
/// `(i, k)` and `(j, l)`; rejected (returns false) if that would create a
/// self-loop or a duplicate edge.
pub(crate) fn try_rewire(net: &mut Network, (i, j): (NodeId, NodeId), (k, l): (NodeId, NodeId)) -> bool {
    if i == k || j == l || net.has_edge(i, k) || net.has_edge(j, l) {
        return false;
    }
    let w_ij = net.weight(i, j);
    let w_kl = net.weight(k, l);
    replace_neighbor(net, i, j, k, w_ij);
    replace_neighbor(net, k, l, i, w_ij);
    replace_neighbor(net, j, i, l, w_kl);
    replace_neighbor(net, l, k, j, w_kl);
    true
}

/// Degree-preserving rewiring toward a homophily target. Pairs of
/// within-group edges are turned into cross edges (lowering homophily) or
/// pairs of cross edges into within-group edges (raising it). Returns the
/// achieved homophily.
pub fn tune_homophily(net: &mut Network, targets: &TuneTargets, rng: &mut SimRng) -> Result<f64, NetgenError> {
    let target = targets.target_h;
    let n = net.node_count() as f64;
    let n_b = net.group_count(Group::B) as f64;
    let vol_a: f64 = (0..net.node_count()).filter(|&i| net.group(i) == Group::A).map(|i| net.degree(i) as f64).sum();
    if n_b == 0.0 || n_b == n || vol_a == 0.0 {
        return Err(NetgenError::EmptyGroup);
    }
    let p_b = n_b / n;

    // aa, bb, and cross edges (A endpoint first)
    let mut aa = Vec::new();
    let mut bb = Vec::new();
    let mut ab = Vec::new();
    for (u, v) in net.edges() {
        match (net.group(u), net.group(v)) {
            (Group::A, Group::A) => aa.push((u, v)),
            (Group::B, Group::B) => bb.push((u, v)),
            (Group::A, Group::B) => ab.push((u, v)),
            (Group::B, Group::A) => ab.push((v, u)),
        }
    }
    let homophily = |cross: usize| 1.0 - (cross as f64 / vol_a) / p_b;

    let mut best = homophily(ab.len());
    let mut iterations = 0u64;
    loop {
        let h = homophily(ab.len());
        if (h - target).abs() < (best - target).abs() {
            best = h;
        }
        if (h - target).abs() <= targets.tolerance_h {
            return Ok(h);
        }
        if iterations >= targets.max_iterations {
            return Err(NetgenError::HomophilyNotReached { target, best });
        }
        iterations += 1;
        if h > target {
            if aa.is_empty() || bb.is_empty() {
                return Err(NetgenError::HomophilyNotReached { target, best });
            }
            let pa = rng.random_range(0..aa.len());
            let pb = rng.random_range(0..bb.len());
            let (i, j) = aa[pa];
            let (mut k, mut l) = bb[pb];
            if rng.random::<bool>() {
                std::mem::swap(&mut k, &mut l);
            }
            if try_rewire(net, (i, j), (k, l)) {
                aa.swap_remove(pa);
                bb.swap_remove(pb);
                ab.push((i, k));
                ab.push((j, l));
            }
        } else {
            if ab.len() < 2 {
                return Err(NetgenError::HomophilyNotReached { target, best });
            }
            let p = rng.random_range(0..ab.len());
            let mut q = rng.random_range(0..ab.len() - 1);
            if q >= p {
                q += 1;
            }
            let (a1, b1) = ab[p];
            let (a2, b2) = ab[q];
            if try_rewire(net, (a1, b1), (a2, b2)) {
                ab.swap_remove(p.max(q));
                ab.swap_remove(p.min(q));
                aa.push((a1, a2));
                bb.push((b1, b2));
            }
        }
    }
}

/// Labels, activity ratio and homophily achieved by [`configure_groups`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Achieved {
    pub p_a: f64,
    pub w: f64,
    pub h: f64,
}

/// Assigns groups, then tunes activity ratio, then homophily, and re-checks
/// both targets.
pub fn configure_groups(net: &mut Network, targets: &TuneTargets, rng: &mut SimRng) -> Result<Achieved, NetgenError> {
    assign_groups(net, targets.target_p_a, rng);
    tune_activity_ratio(net, targets, rng)?;
    tune_homophily(net, targets, rng)?;
    let stats = compute_stats(net);
    let w = stats.activity_ratio.ok_or(NetgenError::EmptyGroup)?;
    let h = stats.homophily.ok_or(NetgenError::EmptyGroup)?;
    if (w - targets.target_w).abs() > targets.tolerance_w {
        return Err(NetgenError::ActivityRatioNotReached { target: targets.target_w, best: w });
    }
    if (h - targets.target_h).abs() > targets.tolerance_h {
        return Err(NetgenError::HomophilyNotReached { target: targets.target_h, best: h });
    }
    Ok(Achieved { p_a: stats.p_a, w, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::NetworkStats;

    fn params(n: usize, p_delta: f64, steps: u64) -> KoskkParams {
        KoskkParams { p_delta, steps: Some(steps), ..KoskkParams::reference(n) }
    }

    fn assert_simple_weighted(net: &Network, w0: f64) {
        for u in 0..net.node_count() {
            let nbrs = net.neighbors(u);
            let mut seen = nbrs.to_vec();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), nbrs.len(), "duplicate neighbor at {u}");
            for &v in nbrs {
                assert_ne!(u, v, "self-loop");
                assert!(net.has_edge(v, u));
                let w = net.weight(u, v).unwrap();
                assert_eq!(Some(w), net.weight(v, u));
                assert!(w >= w0);
            }
        }
    }

    fn sorted_degrees(net: &Network) -> Vec<usize> {
        let mut d = net.degrees();
        d.sort_unstable();
        d
    }

    #[test]
    fn isolated_node_gets_one_global_edge() {
        let p = KoskkParams { p_d: 0.0, p_r: 1.0, ..params(5, 0.5, 1) };
        let mut r = rng::stream(3, &[]);
        let g = evolve(&p, &mut r, None);
        assert_eq!(g.edges, 1);
        let net = g.into_network();
        let (u, v) = net.edges().next().unwrap();
        assert_eq!(net.weight(u, v), Some(1.0));
    }

    #[test]
    fn output_is_simple_connected_and_weighted() {
        let p = params(100, 0.05, 100_000);
        let net = koskk_generate(&p, &mut rng::stream(11, &[])).unwrap();
        assert_eq!(net.node_count(), 100);
        assert!(net.is_connected());
        assert_simple_weighted(&net, p.w0);
        assert!(net.groups().iter().all(|&g| g == Group::B));
    }

    #[test]
    fn generation_is_deterministic() {
        let p = params(200, 0.05, 200_000);
        let a = koskk_generate(&p, &mut rng::stream(5, &[])).unwrap();
        let b = koskk_generate(&p, &mut rng::stream(5, &[])).unwrap();
        assert_eq!(a, b);
        let c = koskk_generate(&p, &mut rng::stream(6, &[])).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn connected_across_seeds() {
        let p = params(500, 0.05, 500_000);
        for seed in 0..100 {
            let net = koskk_generate(&p, &mut rng::stream(seed, &[tag::NETWORK])).unwrap();
            assert!(net.is_connected(), "seed {seed}");
            assert_simple_weighted(&net, p.w0);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let mut r = rng::stream(0, &[]);
        for bad in [
            KoskkParams { p_r: 1.5, ..params(10, 0.1, 10) },
            KoskkParams { w0: 0.0, ..params(10, 0.1, 10) },
            KoskkParams { delta: -1.0, ..params(10, 0.1, 10) },
            params(10, 0.1, 0),
        ] {
            assert!(matches!(koskk_generate(&bad, &mut r), Err(NetgenError::InvalidParams(_))));
        }
    }

    #[test]
    fn calibration_unreachable_below_floor() {
        let p = KoskkParams { target_mean_degree: Some(0.2), ..params(200, 0.0, 200_000) };
        let cfg = CalibrationConfig { pilot_steps: Some(100_000), ..Default::default() };
        match calibrate_p_delta(&p, &cfg, 1) {
            Err(NetgenError::Unreachable { low_degree, .. }) => assert!(low_degree > 0.2),
            other => panic!("expected unreachable, got {other:?}"),
        }
    }

    #[test]
    fn calibration_is_monotone_in_target() {
        let cfg = CalibrationConfig { pilot_steps: Some(600_000), ..Default::default() };
        let p8 = KoskkParams { target_mean_degree: Some(8.0), ..params(300, 0.0, 1_800_000) };
        let p12 = KoskkParams { target_mean_degree: Some(12.0), ..p8.clone() };
        let d8 = calibrate_p_delta(&p8, &cfg, 9).unwrap();
        let d12 = calibrate_p_delta(&p12, &cfg, 9).unwrap();
        assert!(d12 >= d8, "{d12} < {d8}");
        let got = pilot_mean_degree(&KoskkParams { p_delta: d8, ..p8 }, &cfg, 9, None).unwrap();
        assert!((got - 8.0).abs() <= 0.4);
    }

    #[test]
    fn assign_groups_exact_counts() {
        let mut net = Network::from_edges(vec![Group::B; 10_000], (1..10_000).map(|i| (i - 1, i))).unwrap();
        let mut r = rng::stream(2, &[]);
        assign_groups(&mut net, 0.0, &mut r);
        assert_eq!(net.group_count(Group::A), 0);
        assign_groups(&mut net, 0.3, &mut r);
        let first = net.groups().to_vec();
        assert_eq!(net.group_count(Group::A), 3000);
        assign_groups(&mut net, 0.3, &mut rng::stream(4, &[]));
        assert_eq!(net.group_count(Group::A), 3000);
        assert_ne!(net.groups(), &first[..]);
    }

    fn star() -> Network {
        // hub 0 in B, leaf 1 in A
        let groups = vec![Group::B, Group::A, Group::B, Group::B, Group::B];
        Network::from_edges(groups, (1..5).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn star_activity_ratio_swap() {
        let mut net = star();
        let w0 = compute_stats(&net).activity_ratio.unwrap();
        assert!((w0 - 4.0 / 7.0).abs() < 1e-12);
        let targets = TuneTargets::new(0.2, 0.0, 4.0);
        let w = tune_activity_ratio(&mut net, &targets, &mut rng::stream(1, &[])).unwrap();
        assert!((w - 4.0).abs() < 1e-12);
        assert_eq!(net.group(0), Group::A);
        assert_eq!(net.group(1), Group::B);
        assert_eq!(net.group_count(Group::A), 1);
        assert_eq!(net.edge_count(), 4);
    }

    #[test]
    fn tuning_at_target_leaves_network_alone() {
        let mut net = star();
        let before = net.clone();
        let w = compute_stats(&net).activity_ratio.unwrap();
        let h = compute_stats(&net).homophily.unwrap();
        let targets = TuneTargets::new(0.2, h, w);
        tune_activity_ratio(&mut net, &targets, &mut rng::stream(1, &[])).unwrap();
        tune_homophily(&mut net, &targets, &mut rng::stream(1, &[])).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn four_cycle_rewire_candidates() {
        // A1=0, A2=1, B1=2, B2=3; edges A1-A2, A2-B1, B1-B2, B2-A1
        let groups = vec![Group::A, Group::A, Group::B, Group::B];
        let mut net = Network::from_edges(groups, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let before = net.clone();
        assert!(!try_rewire(&mut net, (0, 1), (3, 2)), "A1-B2 already exists");
        assert_eq!(net, before);
        assert!(try_rewire(&mut net, (0, 1), (2, 3)));
        assert!(net.has_edge(0, 2) && net.has_edge(1, 3));
        assert!(!net.has_edge(0, 1) && !net.has_edge(2, 3));
        assert_eq!(sorted_degrees(&net), sorted_degrees(&before));
        assert_eq!(net.edge_count(), 4);
        // fully mixed now: no within-group edge left to pair
        let h = compute_stats(&net).homophily.unwrap();
        assert!((h + 1.0).abs() < 1e-12);
        let r = tune_homophily(&mut net, &TuneTargets::new(0.5, -2.0, 1.0), &mut rng::stream(0, &[]));
        assert!(matches!(r, Err(NetgenError::HomophilyNotReached { .. })));
    }

    #[test]
    fn rewire_moves_weights_with_edges() {
        let groups = vec![Group::A, Group::A, Group::B, Group::B];
        let mut net = Network::from_weighted_edges(groups, [(0, 1, 2.0), (2, 3, 5.0)]).unwrap();
        assert!(try_rewire(&mut net, (0, 1), (2, 3)));
        assert_eq!(net.weight(0, 2), Some(2.0));
        assert_eq!(net.weight(1, 3), Some(5.0));
        assert_eq!(net.weight(3, 1), Some(5.0));
    }

    #[test]
    fn configure_preserves_structure() {
        let p = params(1000, 0.04, 2_000_000);
        let base = koskk_generate(&p, &mut rng::stream(21, &[])).unwrap();
        for (h, w) in [(0.0, 0.5), (0.3, 1.5), (0.5, 2.0)] {
            let mut net = base.clone();
            let targets = TuneTargets::new(0.3, h, w);
            let got = configure_groups(&mut net, &targets, &mut rng::stream(22, &[])).unwrap();
            assert_eq!(sorted_degrees(&net), sorted_degrees(&base));
            assert_eq!(net.edge_count(), base.edge_count());
            assert_eq!(net.group_count(Group::A), 300);
            assert!((got.h - h).abs() <= 0.005 && (got.w - w).abs() <= 0.02);
            let s: NetworkStats = compute_stats(&net);
            assert_eq!(s.homophily, Some(got.h));
            assert_simple_weighted(&net, p.w0);
        }
    }

    #[test]
    fn activity_swaps_keep_group_sizes() {
        let p = params(600, 0.04, 1_000_000);
        let mut net = koskk_generate(&p, &mut rng::stream(8, &[])).unwrap();
        let mut r = rng::stream(9, &[]);
        assign_groups(&mut net, 0.4, &mut r);
        let edges: Vec<_> = net.edges().collect();
        tune_activity_ratio(&mut net, &TuneTargets::new(0.4, 0.0, 2.0), &mut r).unwrap();
        assert_eq!(net.group_count(Group::A), 240);
        assert_eq!(net.edges().collect::<Vec<_>>(), edges);
    }

    #[test]
    fn random_labels_give_near_zero_homophily() {
        let p = params(2000, 0.04, 2_000_000);
        let mut r = rng::stream(31, &[]);
        let mut net = koskk_generate(&p, &mut r).unwrap();
        for pa in [0.3, 0.5] {
            assign_groups(&mut net, pa, &mut r);
            let h = compute_stats(&net).homophily.unwrap();
            assert!(h.abs() < 0.05, "h = {h}");
        }
    }
}
