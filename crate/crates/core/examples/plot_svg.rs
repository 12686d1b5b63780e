//! Draws the reference sweep against the target gait, and the wingtip path
//! family for one parameter, as SVG files.
//!
//! cargo run --release --example plot_svg [-- OUT_DIR PARAM]

use std::path::PathBuf;

use armwing::analysis::{scale_range, sensitivity_sweep};
use armwing::io::{parse_mechanism_file, sensitivity_plot, write_svg, PlotSpec, SeriesStyle};
use armwing::{sample_targets, validate_mechanism, SweepMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let param = args.next().unwrap_or_else(|| "l4".into());

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference_armwing.json");
    let mech = validate_mechanism(parse_mechanism_file(path)?)?;
    let traj = mech.sweep(360, SweepMode::Continuation)?;
    let targets = sample_targets(360)?;

    let deg = |phase: f64| phase.to_degrees();
    let series = |v: &[f64]| -> Vec<[f64; 2]> { targets.phases.iter().zip(v).map(|(&p, &a)| [deg(p), a]).collect() };
    let sim = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(f64::to_degrees).collect() };
    let plot = PlotSpec::new("reference armwing vs target gait", "phase (deg)", "angle (deg)")
        .with_series("shoulder", series(&sim(traj.shoulder()?)), SeriesStyle::Nominal)
        .with_series("shoulder target", series(&targets.shoulder_deg), SeriesStyle::Target)
        .with_series("elbow", series(&sim(traj.elbow()?)), SeriesStyle::Nominal)
        .with_series("elbow target", series(&targets.elbow_deg), SeriesStyle::Target);
    write_svg(&plot, out.join("angles.svg"))?;

    let family = sensitivity_sweep(&mech, &param, &scale_range(0.9, 1.1, 0.025)?, 360)?;
    write_svg(&sensitivity_plot(&family), out.join(format!("{param}_family.svg")))?;
    for f in family.failures() {
        println!("x{:.3} left out: {}", f.scale, f.message);
    }
    println!("wrote angles.svg and {param}_family.svg to {}", out.display());
    Ok(())
}
