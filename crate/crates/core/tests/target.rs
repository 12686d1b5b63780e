mod common;

use std::f64::consts::PI;

use armwing::target::is_downstroke;
use armwing::{phase_grid, sample_targets, target_elbow, target_shoulder, SweepMode};
use proptest::prelude::*;

#[test]
fn published_extremes_and_midpoint() {
    let t = sample_targets(360).unwrap();
    assert_eq!(t.shoulder_deg[90], 25.0);
    assert_eq!(t.shoulder_deg[270], -45.0);
    assert!((t.shoulder_deg[0] + 10.0).abs() < 1e-12);
}

#[test]
fn too_few_samples() {
    assert!(sample_targets(3).is_err());
    assert_eq!(sample_targets(4).unwrap().len(), 4);
}

#[test]
fn wing_is_extended_at_mid_downstroke() {
    // The elbow target peaks at phi = 0, inside the half-cycle where the
    // shoulder rises from its minimum to its maximum.
    let t = sample_targets(360).unwrap();
    let peak = (0..360).max_by(|&a, &b| t.elbow_deg[a].total_cmp(&t.elbow_deg[b])).unwrap();
    assert!(is_downstroke(t.phases[peak]));
    assert!(!is_downstroke(PI));
}

#[test]
fn reference_grid_matches_targets() {
    let mech = common::reference();
    for n in [8, 90, 360] {
        assert_eq!(mech.sweep(n, SweepMode::Continuation).unwrap().phases(), sample_targets(n).unwrap().phases);
    }
}

proptest! {
    #[test]
    fn periodic(phi in -20.0f64..20.0) {
        prop_assert!((target_shoulder(phi) - target_shoulder(phi + 2.0 * PI)).abs() < 1e-9);
        prop_assert!((target_elbow(phi) - target_elbow(phi + 2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn grids_agree(n in 4usize..2000) {
        let t = sample_targets(n).unwrap();
        prop_assert_eq!(&t.phases, &phase_grid(n));
        prop_assert_eq!(t.phases[0], 0.0);
        prop_assert!(t.phases.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(*t.phases.last().unwrap() < 2.0 * PI);
    }

    #[test]
    fn within_range(phi in 0.0f64..2.0 * PI) {
        prop_assert!((-45.0..=25.0).contains(&target_shoulder(phi)));
        let amp = 22.5 * (0.5f64).asin();
        prop_assert!((target_elbow(phi) - 120.0).abs() <= amp + 1e-12);
    }
}

#[test]
fn reference_span_peaks_in_the_downstroke() {
    let mech = common::reference();
    let traj = mech.sweep(360, SweepMode::Continuation).unwrap();
    let pivot = mech.spec().pivots.iter().find(|p| p.id == "shoulder").map(|p| [p.x, p.y]).unwrap();
    let reach: Vec<f64> = traj.wingtip_path().unwrap().iter().map(|t| (t[0] - pivot[0]).hypot(t[1] - pivot[1])).collect();
    let k = (0..360).max_by(|&a, &b| reach[a].total_cmp(&reach[b])).unwrap();
    assert!(is_downstroke(traj.samples[k].phase), "widest at {k} deg");
}
