//! Runs a small experiment and writes one SVG of each kind to the system
//! temp directory.

use std::fs;

use rdslab::harness::experiment::{GeneratedNetworks, NetworkSource, OutputPaths, RdsGrid};
use rdslab::harness::{emit_plots, run_experiment, Estimator, ExperimentSpec, PlotKind, PlotOptions};
use rdslab::netgen::{CalibrationConfig, KoskkParams, TuneTargets};
use rdslab::rdssim::RdsConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let groups = [0.0, 0.4].iter().flat_map(|&h| [0.8, 1.4].map(|w| TuneTargets::new(0.3, h, w))).collect();
    let spec = ExperimentSpec {
        network: NetworkSource::Generate(GeneratedNetworks {
            koskk: KoskkParams { p_delta: 0.05, steps: Some(2_000_000), ..KoskkParams::reference(1000) },
            calibrate: false,
            calibration: CalibrationConfig::default(),
            groups,
        }),
        rds: RdsGrid {
            base: RdsConfig { target_size: 200, p_diff: 1.0, ..RdsConfig::default() },
            ..RdsGrid::default()
        },
        estimators: vec![Estimator::Rdsi, Estimator::RdsiEgo],
        replications: 60,
        bootstrap: None,
        master_seed: 5,
        output: OutputPaths::default(),
    };
    let out = run_experiment(&spec, 1)?;
    let dir = std::env::temp_dir().join("rdslab-plots");
    fs::create_dir_all(&dir)?;

    let heat = PlotOptions { estimator: Some("rdsi".into()), ..PlotOptions::new(PlotKind::Heatmap) };
    let hist = PlotOptions { estimator: Some("rdsi_ego".into()), ..PlotOptions::new(PlotKind::Histogram) };
    let boxes = PlotOptions::new(PlotKind::Boxplot);
    let line = PlotOptions { x: Some("h".into()), ..PlotOptions::new(PlotKind::Line) };
    for (name, table, opts) in [
        ("heatmap", out.results_csv(), heat),
        ("line", out.results_csv(), line),
        ("histogram", out.estimates_csv(), hist),
        ("boxplot", out.estimates_csv(), boxes),
    ] {
        let path = dir.join(format!("{name}.svg"));
        fs::write(&path, emit_plots(&table, &opts)?)?;
        println!("{}", path.display());
    }
    Ok(())
}
