//! Prints the target shoulder and elbow angles over one wingbeat.
//!
//! cargo run --example target_gait [-- N]

use armwing::target::is_downstroke;
use armwing::sample_targets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(24), |s| s.parse())?;
    let t = sample_targets(n)?;
    println!("{:>8} {:>10} {:>10}  half", "phi", "shoulder", "elbow");
    for k in 0..t.len() {
        let half = if is_downstroke(t.phases[k]) { "down" } else { "up" };
        println!("{:>8.2} {:>10.4} {:>10.4}  {half}", t.phases[k].to_degrees(), t.shoulder_deg[k], t.elbow_deg[k]);
    }
    Ok(())
}
