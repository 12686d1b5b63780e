mod common;

use armwing::fitting::{
    cost, evaluate_constraints, mechanism_residuals, optimize_armwing, optimize_stage, residuals, FitError, FitOptions,
    OptimizerSettings, Problem, ResidualVector, Stage, StageOrder, StageProblem,
};
use armwing::linkage::spec::{ParameterBounds, StageTag};
use armwing::{sample_targets, target_elbow, target_shoulder, validate_mechanism, FourBar, LinkageSpec, SweepMode, TargetGait};
use common::{reference, wrap};
use proptest::prelude::*;

fn quick(starts: usize, iterations: usize) -> FitOptions {
    FitOptions {
        multistarts: starts,
        optimizer: OptimizerSettings { max_iterations: iterations, ..OptimizerSettings::default() },
        ..FitOptions::default()
    }
}

/// Shoulder-only targets from a mechanism's own sweep.
fn own_shoulder(mech: &armwing::MechanismGraph, n: usize) -> TargetGait {
    let traj = mech.sweep(n, SweepMode::Continuation).unwrap();
    TargetGait {
        shape: None,
        phases: traj.phases(),
        shoulder_deg: traj.shoulder().unwrap().into_iter().map(f64::to_degrees).collect(),
        elbow_deg: vec![f64::NAN; n],
    }
}

fn free_fourbar(fb: &FourBar) -> armwing::MechanismGraph {
    let mut spec = LinkageSpec::four_bar(fb);
    for link in &spec.links {
        spec.parameters.insert(
            format!("link.{}.length", link.id),
            ParameterBounds { min: 0.8 * link.length, max: 1.2 * link.length, stage: StageTag::Humerus },
        );
    }
    validate_mechanism(spec).unwrap()
}

#[test]
fn own_sweep_has_zero_residuals() {
    let mech = reference();
    let traj = mech.sweep(90, SweepMode::Continuation).unwrap();
    let targets = TargetGait::from_trajectory(&traj).unwrap();
    let y = residuals(&traj, &targets, Stage::All).unwrap();
    assert_eq!(y.values.len(), 180);
    // Only the degree/radian round trip separates them.
    assert!(y.values.iter().all(|&v| v.abs() <= 1e-12));
    assert!(cost(&y).unwrap() <= 1e-24);
}

#[test]
fn grid_mismatch() {
    let mech = reference();
    let traj = mech.sweep(360, SweepMode::Continuation).unwrap();
    let err = residuals(&traj, &sample_targets(180).unwrap(), Stage::Humerus).unwrap_err();
    assert!(matches!(err, FitError::GridMismatch { .. }), "{err:?}");
}

#[test]
fn humerus_cost_matches_pipeline_oracle() {
    // Oracle: sweep, read the shoulder angle, compare to the closed-form target.
    let mech = reference();
    let y = mechanism_residuals(&mech, &sample_targets(360).unwrap(), Stage::Humerus).unwrap();
    assert_eq!(y.values.len(), 360);
    let traj = mech.sweep(360, SweepMode::Continuation).unwrap();
    let mut sum = 0.0;
    for c in &traj.samples {
        let e = wrap(c.angle("shoulder").unwrap() - target_shoulder(c.phase).to_radians()).to_degrees();
        sum += e * e;
    }
    let oracle = sum / 360.0;
    let c = cost(&y).unwrap();
    assert!((c - oracle).abs() <= 1e-9 * oracle.max(1.0), "{c} vs {oracle}");
    assert!(c > 0.0);
}

#[test]
fn fourbar_constraints() {
    let mech = validate_mechanism(LinkageSpec::four_bar(&FourBar::new(5.0, 2.0, 6.0, 4.0))).unwrap();
    let fc = evaluate_constraints(&mech, 360);
    assert!(!fc.values.is_empty());
    assert!(fc.values.iter().all(|&v| v < 0.0), "{fc:?}");

    let long = validate_mechanism(LinkageSpec::four_bar(&FourBar::new(5.0, 4.5, 6.0, 4.0))).unwrap();
    let fc = evaluate_constraints(&long, 360);
    let grashof = fc.names.iter().zip(&fc.values).find(|(n, _)| n.starts_with("grashof")).unwrap();
    assert!(*grashof.1 > 0.0, "{fc:?}");
}

#[test]
fn reference_is_feasible() {
    assert!(evaluate_constraints(&reference(), 360).max() <= 0.0);
}

#[test]
fn already_optimal_stage_returns_immediately() {
    let mech = free_fourbar(&FourBar::new(10.0, 2.0, 9.0, 7.0));
    let targets = own_shoulder(&mech, 90);
    let report = optimize_stage(&mech, &targets, Stage::Humerus, &quick(3, 100)).unwrap();
    assert!(report.final_cost <= 1e-12);
    let fitted = report.apply(&mech).unwrap();
    for (name, v) in mech.parameters() {
        assert!((fitted.parameter(&name).unwrap() - v).abs() <= 1e-9, "{name}");
    }
}

#[test]
fn matching_armwing_returns_immediately() {
    let mech = reference();
    let targets = TargetGait::from_trajectory(&mech.sweep(90, SweepMode::Continuation).unwrap()).unwrap();
    let report = optimize_armwing(&mech, &targets, &quick(2, 50)).unwrap();
    assert_eq!(report.stages.len(), 2);
    assert!(report.stages.iter().all(|s| s.final_cost <= 1e-12));
    assert!(report.final_cost <= 1e-12);
}

#[test]
fn every_evaluated_point_respects_bounds() {
    let truth = FourBar::new(10.0, 2.0, 9.0, 7.0);
    let targets = own_shoulder(&validate_mechanism(LinkageSpec::four_bar(&truth)).unwrap(), 36);
    let mech = free_fourbar(&FourBar::new(10.0, 2.3, 8.0, 7.5));
    let problem = StageProblem::new(&mech, &targets, Stage::Humerus).unwrap().recording();
    let starts = armwing::fitting::optimizer::starting_points(&problem.nominal(), problem.lower(), problem.upper(), 4, 3);
    let results = armwing::fitting::optimizer::multistart(&problem, starts, &OptimizerSettings::default());
    let seen = problem.recorded();
    assert!(!seen.is_empty());
    for q in &seen {
        for (k, v) in q.iter().enumerate() {
            assert!(problem.lower()[k] <= *v && *v <= problem.upper()[k], "{q:?}");
        }
    }
    for r in &results {
        // The incumbent feasible cost never goes up.
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0], "{:?}", r.history);
        }
    }
}

#[test]
fn staged_fit_improves_both_angles() {
    let mech = reference();
    let targets = sample_targets(90).unwrap();
    let report = optimize_armwing(&mech, &targets, &quick(3, 400)).unwrap();
    let fitted = report.apply(&mech).unwrap();
    let rms = |m: &armwing::MechanismGraph, stage| cost(&mechanism_residuals(m, &targets, stage).unwrap()).unwrap().sqrt();
    for stage in [Stage::Humerus, Stage::Radius] {
        assert!(rms(&fitted, stage) < rms(&mech, stage), "{stage}");
    }
    // The humerus-tagged entries are untouched by the radius stage.
    let (h, r) = (&report.stages[0].design, &report.stages[1].design);
    for i in h.free_indices(Stage::Humerus) {
        assert_eq!(h.values[i].to_bits(), r.values[i].to_bits());
    }
    assert!(report.final_cost <= report.initial_cost);
    assert!(evaluate_constraints(&fitted, 90).max() <= 1e-6);
}

#[test]
fn radius_first_warns() {
    let mech = reference();
    let targets = sample_targets(36).unwrap();
    let options = FitOptions { order: StageOrder::RadiusFirst, ..quick(2, 60) };
    let report = optimize_armwing(&mech, &targets, &options).unwrap();
    assert!(!report.warnings.is_empty());
    assert_eq!(report.stages[0].stage, Stage::Radius);
}

#[test]
fn seeded_fits_are_reproducible() {
    let mech = free_fourbar(&FourBar::new(10.0, 2.3, 8.0, 7.5));
    let targets = own_shoulder(&validate_mechanism(LinkageSpec::four_bar(&FourBar::new(10.0, 2.0, 9.0, 7.0))).unwrap(), 36);
    let options = FitOptions { seed: 42, ..quick(4, 100) };
    let a = optimize_stage(&mech, &targets, Stage::Humerus, &options).unwrap();
    let b = optimize_stage(&mech, &targets, Stage::Humerus, &options).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn targets_come_from_the_gait_functions() {
    let t = sample_targets(12).unwrap();
    for (k, &phi) in t.phases.iter().enumerate() {
        assert_eq!(t.shoulder_deg[k], target_shoulder(phi));
        assert_eq!(t.elbow_deg[k], target_elbow(phi));
    }
}

proptest! {
    #[test]
    fn cost_is_a_mean_square(values in prop::collection::vec(-1e3f64..1e3, 1..50), c in -10.0f64..10.0, p in -4i32..4) {
        let y = ResidualVector { values: values.clone(), samples: values.len() };
        let base = cost(&y).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert_eq!(base == 0.0, values.iter().all(|&v| v == 0.0));

        let scaled = ResidualVector { values: values.iter().map(|v| c * v).collect(), samples: values.len() };
        prop_assert!((cost(&scaled).unwrap() - c * c * base).abs() <= 1e-12 * (c * c * base).max(1e-300));

        // Powers of two scale without rounding.
        let two = 2f64.powi(p);
        let exact = ResidualVector { values: values.iter().map(|v| two * v).collect(), samples: values.len() };
        prop_assert_eq!(cost(&exact).unwrap(), two * two * base);
    }
}
