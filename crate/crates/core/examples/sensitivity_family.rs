//! Ranks every design parameter of the reference armwing by wingtip
//! sensitivity, then sweeps the most and least sensitive one over 90–110%.
//!
//! cargo run --release --example sensitivity_family [-- DELTA N]

use armwing::analysis::{scale_range, sensitivity_rank, sensitivity_sweep};
use armwing::io::parse_mechanism_file;
use armwing::validate_mechanism;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let delta: f64 = args.next().map_or(Ok(0.025), |s| s.parse())?;
    let n: usize = args.next().map_or(Ok(360), |s| s.parse())?;

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference_armwing.json");
    let mech = validate_mechanism(parse_mechanism_file(path)?)?;

    let ranking = sensitivity_rank(&mech, delta, n)?;
    println!("{:<24} {:>14}", "parameter", "mm per 1%");
    for e in &ranking {
        match e.score {
            Some(s) => println!("{:<24} {:>14.6}", e.parameter, s),
            None => println!("{:<24} {:>14}", e.parameter, "failed"),
        }
    }

    let scales = scale_range(0.9, 1.1, 0.025)?;
    let moving: Vec<_> = ranking.iter().filter(|e| e.score.is_some_and(|s| s > 0.0)).collect();
    for e in [moving.first(), moving.last()].into_iter().flatten() {
        let family = sensitivity_sweep(&mech, &e.parameter, &scales, n)?;
        println!("\n{} (nominal {:.4}):", family.parameter, family.nominal_value);
        for o in &family.outcomes {
            match (&o.trajectory, o.max_deviation_mm) {
                (Ok(_), Some(d)) => println!("  x{:.3}: max wingtip deviation {d:8.3} mm", o.scale),
                (Err(f), _) => println!("  x{:.3}: {} at phi = {:?} deg", o.scale, f.kind, f.phase_deg),
                _ => {}
            }
        }
    }
    Ok(())
}
