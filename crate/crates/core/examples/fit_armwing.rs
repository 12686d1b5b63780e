//! Two-stage fit of the reference armwing to the target gait.
//!
//! cargo run --release --example fit_armwing [-- N STARTS]

use std::time::Instant;

use armwing::fitting::{optimize_armwing, FitOptions};
use armwing::io::parse_mechanism_file;
use armwing::{sample_targets, validate_mechanism};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(90), |s| s.parse())?;
    let starts: usize = args.next().map_or(Ok(4), |s| s.parse())?;

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference_armwing.json");
    let mech = validate_mechanism(parse_mechanism_file(path)?)?;
    let targets = sample_targets(n)?;
    let options = FitOptions { multistarts: starts, ..FitOptions::default() };

    let t = Instant::now();
    let report = optimize_armwing(&mech, &targets, &options)?;
    for s in &report.stages {
        println!(
            "{:>8}: {:10.4} -> {:10.4} deg^2  ({} trial points, winner start {:?})",
            s.stage.to_string(),
            s.initial_cost,
            s.final_cost,
            s.iterations,
            s.winner
        );
    }
    println!(
        "overall: {:.4} -> {:.4} deg^2 ({:.1}%), max constraint {:.2e}, {:.1?}",
        report.initial_cost,
        report.final_cost,
        100.0 * report.final_cost / report.initial_cost,
        report.constraint_violation,
        t.elapsed()
    );
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
