use rdslab::netcore::compute_stats;
use rdslab::netgen::{configure_groups, koskk_generate, KoskkParams, TuneTargets};
use rdslab::rng::{self, tag};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = KoskkParams { p_delta: 0.05, steps: Some(2_000_000), ..KoskkParams::reference(1000) };
    let base = koskk_generate(&params, &mut rng::stream(1, &[tag::NETWORK]))?;

    println!("{:>5} {:>5} | {:>7} {:>7} {:>7}", "h", "w", "P_A", "h", "w");
    for (k, (h, w)) in [(0.0, 1.0), (0.3, 0.7), (0.3, 1.5), (0.5, 2.0)].into_iter().enumerate() {
        let mut net = base.clone();
        configure_groups(&mut net, &TuneTargets::new(0.3, h, w), &mut rng::stream(1, &[tag::TUNING, k as u64]))?;
        let s = compute_stats(&net);
        println!("{h:>5} {w:>5} | {:>7.3} {:>7.3} {:>7.3}", s.p_a, s.homophily.unwrap(), s.activity_ratio.unwrap());
    }
    Ok(())
}
