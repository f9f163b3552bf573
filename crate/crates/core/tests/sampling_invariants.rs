use std::collections::HashSet;

use rdslab::netcore::Network;
use rdslab::netgen::{configure_groups, koskk_generate, KoskkParams, TuneTargets};
use rdslab::rdssim::{run_rds, RdsConfig, RdsRngs, RdsSample};
use rdslab::rng;

fn network(n: usize, seed: u64) -> Network {
    let p = KoskkParams { p_delta: 0.04, steps: Some(n as u64 * 2000), ..KoskkParams::reference(n) };
    let mut r = rng::stream(seed, &[]);
    let mut net = koskk_generate(&p, &mut r).unwrap();
    configure_groups(&mut net, &TuneTargets::new(0.3, 0.3, 1.5), &mut r).unwrap();
    net
}

fn check_sample(net: &Network, s: &RdsSample, swor: bool) {
    let mut seen = HashSet::new();
    for (i, r) in s.respondents.iter().enumerate() {
        if swor {
            assert!(seen.insert(r.node_id), "node {} sampled twice", r.node_id);
        }
        assert_eq!(r.reported_n_a + r.reported_n_b, r.reported_degree);
        assert!(r.reported_degree >= 1);
        assert_eq!(r.true_degree, net.degree(r.node_id));
        assert_eq!(r.true_group, net.group(r.node_id));
        assert_eq!(r.wave == 0, r.is_seed);
        assert_eq!(r.is_seed, r.recruiter.is_none());
        if let Some(p) = r.recruiter_index {
            assert!(p < i);
            let parent = &s.respondents[p];
            assert_eq!(Some(parent.node_id), r.recruiter);
            assert_eq!(parent.wave + 1, r.wave);
            assert!(net.has_edge(parent.node_id, r.node_id));
        }
    }
    for &(u, v) in &s.recruitment_edges {
        assert!(net.has_edge(u, v));
    }
}

#[test]
fn every_sample_respects_the_network() {
    let net = network(1500, 1);
    let designs = [
        RdsConfig::default(),
        RdsConfig { p_diff: 1.0, p_miss_a: 0.2, p_err_ba: 0.2, ..RdsConfig::default() },
        RdsConfig { n_seeds: 2, coupons: 1, target_size: 300, ..RdsConfig::default() },
        RdsConfig { with_replacement: true, coupons: 3, ..RdsConfig::default() },
    ];
    for (d, cfg) in designs.iter().enumerate() {
        for rep in 0..40u64 {
            let s = run_rds(&net, cfg, &mut RdsRngs::new(9, &[d as u64, rep])).unwrap();
            assert!(s.complete);
            assert_eq!(s.len(), cfg.target_size);
            check_sample(&net, &s, !cfg.with_replacement);
        }
    }
}

#[test]
fn reporting_errors_leave_trajectory_alone() {
    let net = network(800, 2);
    let clean = RdsConfig { target_size: 300, ..RdsConfig::default() };
    let noisy = RdsConfig { p_miss_a: 0.3, p_miss_b: 0.1, p_err_ab: 0.2, p_err_ba: 0.4, ..clean.clone() };
    for rep in 0..20u64 {
        let a = run_rds(&net, &clean, &mut RdsRngs::new(4, &[rep])).unwrap();
        let b = run_rds(&net, &noisy, &mut RdsRngs::new(4, &[rep])).unwrap();
        assert_eq!(a.recruitment_edges, b.recruitment_edges);
        let nodes = |s: &RdsSample| s.respondents.iter().map(|r| r.node_id).collect::<Vec<_>>();
        assert_eq!(nodes(&a), nodes(&b));
        assert_ne!(a.respondents, b.respondents);
    }
}

#[test]
fn standard_design_fills_in_six_or_seven_waves() {
    // full branching from 6 seeds with 2 coupons holds 762 respondents by wave 6
    let capacity: usize = 6 + (1..=6).map(|w| 6 * 2usize.pow(w)).sum::<usize>();
    assert_eq!(capacity, 762);
    let net = network(5000, 3);
    let cfg = RdsConfig::default();
    let mut within_six = 0;
    for rep in 0..50u64 {
        let s = run_rds(&net, &cfg, &mut RdsRngs::new(5, &[rep])).unwrap();
        assert_eq!(s.len(), 500);
        let max_wave = s.respondents.iter().map(|r| r.wave).max().unwrap();
        assert!(max_wave <= 7, "sample {rep} reached wave {max_wave}");
        if max_wave <= 6 {
            within_six += 1;
        }
    }
    assert!(within_six > 0);
}
