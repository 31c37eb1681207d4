//! Run-time of the Zeroing iteration against |Q0(r)| at desk scale.
//!
//! Usage: cargo run --release --example runtime_experiment [OUT_DIR]

use std::fs::File;
use std::path::PathBuf;
use std::time::Instant;

use zlrr::lab::{correlation_by_degree, runtime_experiment, scatter_svg, write_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let cfg = ExperimentConfig::default();
    let start = Instant::now();
    let records = runtime_experiment(&cfg)?;
    println!("{} trials in {:.1?}", records.len(), start.elapsed());

    for (degree, n, rho) in correlation_by_degree(&records) {
        let rho = rho.map_or("n/a".to_string(), |r| format!("{r:.3}"));
        println!("degree {degree}: {n} terminated, spearman(|Q0(r)|, steps) = {rho}");
    }
    let worst = records.iter().filter_map(|r| r.steps).max().unwrap_or(0);
    println!("longest terminating run: {worst} steps");

    let csv_path = out_dir.join("runtime.csv");
    write_csv(&records, File::create(&csv_path)?)?;
    let svg_path = out_dir.join("runtime.svg");
    std::fs::write(&svg_path, scatter_svg(&records))?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}
