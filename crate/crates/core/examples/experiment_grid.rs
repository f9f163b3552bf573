//! Runs a small (h, w) x p_diff grid and prints the results table.

use rdslab::bootstrap::{BootstrapConfig, BootstrapMethod};
use rdslab::harness::experiment::{GeneratedNetworks, NetworkSource, OutputPaths, RdsGrid};
use rdslab::harness::{run_experiment, Estimator, ExperimentSpec};
use rdslab::netgen::{CalibrationConfig, KoskkParams, TuneTargets};
use rdslab::rdssim::RdsConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ExperimentSpec {
        network: NetworkSource::Generate(GeneratedNetworks {
            koskk: KoskkParams { p_delta: 0.05, steps: Some(2_000_000), ..KoskkParams::reference(1000) },
            calibrate: false,
            calibration: CalibrationConfig::default(),
            groups: vec![TuneTargets::new(0.3, 0.0, 1.0), TuneTargets::new(0.3, 0.4, 1.5)],
        }),
        rds: RdsGrid {
            base: RdsConfig { target_size: 200, ..RdsConfig::default() },
            p_diff: vec![0.0, 1.0],
            ..RdsGrid::default()
        },
        estimators: vec![Estimator::Sample, Estimator::Rdsi, Estimator::RdsiEgo],
        replications: 100,
        bootstrap: Some(BootstrapConfig::new(BootstrapMethod::Ego2, 100, 0.95)),
        master_seed: 2024,
        output: OutputPaths::default(),
    };
    println!("{}", serde_json::to_string_pretty(&spec)?);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    print!("{}", run_experiment(&spec, workers)?.results_csv());
    Ok(())
}
