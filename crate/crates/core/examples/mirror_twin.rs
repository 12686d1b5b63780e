//! Builds the left wing by reflection and checks that both wings, driven
//! from one motor, stay symmetric through the beat.
//!
//! cargo run --example mirror_twin

use armwing::io::parse_mechanism_file;
use armwing::{bilateral, mirror_mechanism, validate_mechanism, SweepMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reference_armwing.json");
    let right = validate_mechanism(parse_mechanism_file(path)?)?;
    let left = mirror_mechanism(&right);

    let (r, l) = (right.sweep(360, SweepMode::Continuation)?, left.sweep(360, SweepMode::Continuation)?);
    let mut worst: f64 = 0.0;
    for (a, b) in r.wingtip_path()?.iter().zip(&l.wingtip_path()?) {
        worst = worst.max((a[0] + b[0]).abs()).max((a[1] - b[1]).abs());
    }
    println!("separate wings: wingtip paths mirror to {worst:.2e} mm");

    let pair = bilateral(&right);
    println!("bilateral: {} links, {} loops", pair.spec().links.len(), pair.loops().len());
    let both = pair.sweep(360, SweepMode::Continuation)?;
    let (rt, lt) = (both.point_series("right_wingtip")?, both.point_series("left_wingtip")?);
    let worst = rt.iter().zip(&lt).map(|(a, b)| (a[0] + b[0]).abs().max((a[1] - b[1]).abs())).fold(0.0, f64::max);
    println!("shared motor: wingtip paths mirror to {worst:.2e} mm");
    Ok(())
}
