//! A small seeded run of the duality-gap experiment, written as CSV.

use std::io;

use maxwell_trees::oracle::{run_gap_experiment, write_records, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig {
        seed: 11,
        count: 20,
        ..ExperimentConfig::default()
    };
    let records = run_gap_experiment(&config);
    let worst = records.iter().map(|r| r.gap.abs() / r.primal_length).fold(0.0, f64::max);
    eprintln!("{} instances, worst relative gap {worst:.2e}", records.len());
    write_records(&records, io::stdout().lock(), false)?;
    Ok(())
}
