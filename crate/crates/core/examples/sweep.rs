//! Run a bundled sweep config with fewer trials and print the CSV.

use uav_los::experiment::ExperimentConfig;

fn main() -> uav_los::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "velocity.json".into());
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    let text = std::fs::read_to_string(&path).map_err(|e| uav_los::Error::Config(e.to_string()))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    cfg.trials = 300;
    cfg.out = None;
    let out = uav_los::experiment::run_experiment(&cfg)?;
    print!("{}", out.csv);
    eprint!("{}", out.summary);
    Ok(())
}
