//! Calibrates the triad-closure probability for a target mean degree, then
//! grows a KOSKK network and prints its summary statistics.

use rdslab::netcore::compute_stats;
use rdslab::netgen::{calibrate_p_delta, koskk_generate, CalibrationConfig, KoskkParams};
use rdslab::rng::{self, tag};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 42;
    let mut params = KoskkParams { steps: Some(2_000_000), ..KoskkParams::reference(1000) };
    params.p_delta = calibrate_p_delta(&params, &CalibrationConfig::default(), rng::derive_seed(seed, &[tag::PILOT]))?;
    let net = koskk_generate(&params, &mut rng::stream(seed, &[tag::NETWORK]))?;
    let stats = compute_stats(&net);
    println!("p_delta      {:.4}", params.p_delta);
    println!("nodes        {}", stats.node_count);
    println!("edges        {}", stats.edge_count);
    println!("mean degree  {:.2}", stats.mean_degree);
    println!("connected    {}", net.is_connected());
    Ok(())
}
