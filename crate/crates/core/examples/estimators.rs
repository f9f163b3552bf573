//! Compares the proportion estimators against the population value over a
//! handful of samples.

use rdslab::estimate::estimate_all;
use rdslab::netcore::compute_stats;
use rdslab::netgen::{configure_groups, koskk_generate, KoskkParams, TuneTargets};
use rdslab::rdssim::{run_rds, RdsConfig, RdsRngs};
use rdslab::rng;

fn fmt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3}"))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut r = rng::stream(3, &[]);
    let params = KoskkParams { p_delta: 0.05, steps: Some(4_000_000), ..KoskkParams::reference(2000) };
    let mut net = koskk_generate(&params, &mut r)?;
    configure_groups(&mut net, &TuneTargets::new(0.35, 0.4, 1.3), &mut r)?;
    let stats = compute_stats(&net);
    println!("P*_A = {:.3}, s*_AB = {:.3}", stats.p_a, stats.s_star.s_ab().unwrap());

    let cfg = RdsConfig { p_diff: 1.0, ..RdsConfig::default() };
    println!(
        "{:>3} {:>7} {:>7} {:>7} {:>8} {:>7} {:>8}",
        "run", "sample", "rdsi", "rdsii", "rdsi_ego", "s_AB", "s_ego_AB"
    );
    for k in 0..8 {
        let e = estimate_all(&run_rds(&net, &cfg, &mut RdsRngs::new(3, &[k]))?);
        println!(
            "{k:>3} {:>7} {:>7} {:>7} {:>8} {:>7} {:>8}",
            fmt(e.sample_proportion),
            fmt(e.rdsi),
            fmt(e.rdsii),
            fmt(e.rdsi_ego),
            fmt(e.s_ab()),
            fmt(e.s_ego_ab())
        );
    }
    Ok(())
}
