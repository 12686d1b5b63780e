//! Sweeps the reference armwing through one wingbeat and writes the
//! trajectory CSV next to the target gait.
//!
//! cargo run --example sweep_reference [-- OUT_DIR N]

use std::path::PathBuf;

use armwing::io::{parse_mechanism_file, write_targets_csv, write_trajectory_csv};
use armwing::{sample_targets, validate_mechanism, SweepMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let n: usize = args.next().map_or(Ok(360), |s| s.parse())?;

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference_armwing.json");
    let mech = validate_mechanism(parse_mechanism_file(path)?)?;
    println!("{}: {} loops, {} parameters", mech.name(), mech.loops().len(), mech.parameter_names().count());

    let traj = mech.sweep(n, SweepMode::Continuation)?;
    let (shoulder, elbow) = (traj.shoulder()?, traj.elbow()?);
    let span = |v: &[f64]| {
        let deg = v.iter().map(|a| a.to_degrees());
        (deg.clone().fold(f64::INFINITY, f64::min), deg.fold(f64::NEG_INFINITY, f64::max))
    };
    println!("shoulder {:.2?} deg, elbow {:.2?} deg", span(&shoulder), span(&elbow));

    // Widest reach of the wingtip from the shoulder pivot.
    let pivot = mech.spec().pivots.iter().find(|p| p.id == "shoulder").map_or([0.0, 0.0], |p| [p.x, p.y]);
    let reach: Vec<f64> = traj.wingtip_path()?.iter().map(|t| (t[0] - pivot[0]).hypot(t[1] - pivot[1])).collect();
    let k = (0..reach.len()).max_by(|&a, &b| reach[a].total_cmp(&reach[b])).unwrap_or(0);
    println!("widest span {:.2} mm at phi = {:.1} deg", reach[k], traj.samples[k].phase.to_degrees());

    write_trajectory_csv(&traj, out.join("reference_sweep.csv"))?;
    write_targets_csv(&sample_targets(n)?, out.join("target_gait.csv"))?;
    println!("wrote {} and {}", out.join("reference_sweep.csv").display(), out.join("target_gait.csv").display());
    Ok(())
}
