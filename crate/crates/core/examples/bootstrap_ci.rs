use rdslab::bootstrap::{bootstrap_ci, BootstrapConfig, BootstrapMethod};
use rdslab::netcore::compute_stats;
use rdslab::netgen::{configure_groups, koskk_generate, KoskkParams, TuneTargets};
use rdslab::rdssim::{run_rds, RdsConfig, RdsRngs};
use rdslab::rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut r = rng::stream(11, &[]);
    let params = KoskkParams { p_delta: 0.05, steps: Some(4_000_000), ..KoskkParams::reference(2000) };
    let mut net = koskk_generate(&params, &mut r)?;
    configure_groups(&mut net, &TuneTargets::new(0.3, 0.3, 1.0), &mut r)?;
    let truth = compute_stats(&net).p_a;

    let sample = run_rds(&net, &RdsConfig { p_diff: 1.0, ..RdsConfig::default() }, &mut RdsRngs::new(11, &[0]))?;
    println!("P*_A = {truth:.3}");
    for method in BootstrapMethod::ALL {
        let out = bootstrap_ci(&sample, &BootstrapConfig::new(method, 1000, 0.95), 11)?;
        let ci = out.interval;
        let ci90 = out.interval_at(0.90);
        println!(
            "{:<6} point {:.3}  95% [{:.3}, {:.3}]  90% [{:.3}, {:.3}]  covers: {}",
            method.name(),
            out.point_estimate.unwrap_or(f64::NAN),
            ci.lower,
            ci.upper,
            ci90.lower,
            ci90.upper,
            ci.contains(truth)
        );
    }
    Ok(())
}
