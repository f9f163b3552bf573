//! One RDS sample under differential recruitment, summarized by wave.

use rdslab::netcore::Group;
use rdslab::netgen::{configure_groups, koskk_generate, KoskkParams, TuneTargets};
use rdslab::rdssim::{run_rds, RdsConfig, RdsRngs};
use rdslab::rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut r = rng::stream(7, &[]);
    let params = KoskkParams { p_delta: 0.05, steps: Some(4_000_000), ..KoskkParams::reference(2000) };
    let mut net = koskk_generate(&params, &mut r)?;
    configure_groups(&mut net, &TuneTargets::new(0.3, 0.3, 1.2), &mut r)?;

    let cfg = RdsConfig { p_diff: 1.0, p_miss_b: 0.1, ..RdsConfig::default() };
    let sample = run_rds(&net, &cfg, &mut RdsRngs::new(7, &[1]))?;

    let waves = sample.respondents.iter().map(|r| r.wave).max().unwrap_or(0);
    println!("wave  respondents  share A");
    for w in 0..=waves {
        let in_wave: Vec<_> = sample.respondents.iter().filter(|r| r.wave == w).collect();
        let a = in_wave.iter().filter(|r| r.true_group == Group::A).count();
        println!("{w:>4}  {:>11}  {:>7.3}", in_wave.len(), a as f64 / in_wave.len() as f64);
    }
    println!("complete: {}, recruitments: {}", sample.complete, sample.recruitment_edges.len());
    Ok(())
}
