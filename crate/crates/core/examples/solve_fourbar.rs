//! Closed-form four-bar positions, and the same linkage through the general
//! multi-loop solver.
//!
//! cargo run --example solve_fourbar [-- GROUND CRANK COUPLER ROCKER]

use armwing::{grashof_classify, solve_fourbar, validate_mechanism, Branch, FourBar, LinkageSpec, SweepMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let [g, c, k, r] = l[..] else {
        return run(FourBar::new(5.0, 2.0, 6.0, 4.0));
    };
    run(FourBar::new(g, c, k, r))
}

fn run(fb: FourBar) -> Result<(), Box<dyn std::error::Error>> {
    println!("lengths {:?}: {:?}", fb.lengths(), grashof_classify(&fb));
    println!("{:>8} {:>14} {:>14} {:>14}", "crank", "coupler open", "rocker open", "rocker crossed");
    for deg in (0..360).step_by(30) {
        let input = (deg as f64).to_radians();
        let open = solve_fourbar(&fb.with_branch(Branch::Open), input);
        let crossed = solve_fourbar(&fb.with_branch(Branch::Crossed), input);
        match (open, crossed) {
            (Ok((co, ro)), Ok((_, rc))) => println!(
                "{deg:>8} {:>14.6} {:>14.6} {:>14.6}",
                co.to_degrees(),
                ro.to_degrees(),
                rc.to_degrees()
            ),
            (Err(e), _) | (_, Err(e)) => println!("{deg:>8} {e}"),
        }
    }

    // The general solver on the same geometry, swept with continuation.
    let mech = validate_mechanism(LinkageSpec::four_bar(&fb))?;
    let traj = mech.sweep(360, SweepMode::Continuation)?;
    let worst = traj
        .samples
        .iter()
        .map(|conf| {
            let (_, rocker) = solve_fourbar(&fb, conf.phase).expect("assemblable");
            (conf.link_angle("rocker").expect("rocker link") - rocker).abs()
        })
        .fold(0.0, f64::max);
    println!("general solver vs closed form over 360 samples: {worst:.2e} rad");
    Ok(())
}
