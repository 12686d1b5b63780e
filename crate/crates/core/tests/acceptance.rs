//! Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use armwing::analysis::{
    scale_range, sensitivity_rank, sensitivity_sweep, strain_budget_check, MaterialDb, MaterialSpec,
};
use armwing::fitting::{evaluate_constraints, optimize_armwing, optimize_stage, FitOptions, OptimizerSettings, Stage};
use armwing::io::{self, mechanism_to_string, parse_mechanism_str, render_svg, sensitivity_plot};
use armwing::linkage::spec::{ParameterBounds, StageTag};
use armwing::{
    phase_grid, sample_targets, solve_fourbar, target_elbow, target_shoulder, validate_mechanism, FourBar, LinkageSpec,
    SweepMode, TargetGait,
};
use common::{bisect_rocker, random_crank_rockers, reference, wrap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TARGET_TOL_DEG: f64 = 1e-12;
const FOURBAR_TOL_RAD: f64 = 1e-9;
const REFERENCE_ROCKER_DEG: f64 = 80.2569128292;
const REFERENCE_ROCKER_TOL_RAD: f64 = 1e-6;
const REDUCTION_TOL_RAD: f64 = 1e-9;
const RECOVERY_COST: f64 = 1e-8;
const RECOVERY_MIN_STARTS: usize = 8;
const FIT_RATIO: f64 = 0.1;
const CONSTRAINT_TOL: f64 = 1e-6;
const SPLIT_RATIO: f64 = 5.0;
const STRESS_TOL_MPA: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| outcome(false, "panicked"));
    let elapsed = t.elapsed();
    let pass = o.pass && elapsed <= budget;
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id}: {verdict} {title}: {} [{:.2?} of {:?}]", o.detail, elapsed, budget);
    pass
}

/// Elbow target via the argument of `1 + k e^{ix}`, which equals the inner
/// arctangent because `1 + k cos x > 0`; shoulder via a shifted cosine.
fn oracle_targets(phi: f64) -> (f64, f64) {
    let x = phi + 2.0 * PI / 3.0;
    let elbow = 120.0 + 0.5 * 45.0 * (0.5 * x.sin()).atan2(1.0 + 0.5 * x.cos());
    let shoulder = 35.0 * (phi - FRAC_PI_2).cos() - 10.0;
    (shoulder, elbow)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let phi = rng.gen_range(0.0..2.0 * PI);
        let (s, e) = oracle_targets(phi);
        worst = worst.max((target_shoulder(phi) - s).abs()).max((target_elbow(phi) - e).abs());
    }
    let t = sample_targets(360).unwrap();
    let max = t.shoulder_deg.iter().copied().fold(f64::MIN, f64::max);
    let min = t.shoulder_deg.iter().copied().fold(f64::MAX, f64::min);
    outcome(
        worst <= TARGET_TOL_DEG && max == 25.0 && min == -45.0,
        format!("max |target - oracle| = {worst:.2e} deg over 10000 phases; shoulder range [{min}, {max}]"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for fb in random_crank_rockers(20, 2) {
        for k in 0..360 {
            let input = (k as f64).to_radians();
            match (solve_fourbar(&fb, input), bisect_rocker(&fb, input)) {
                (Ok((_, rocker)), Some(oracle)) => worst = worst.max(wrap(rocker - oracle).abs()),
                _ => failures += 1,
            }
        }
    }
    let (_, rocker) = solve_fourbar(&FourBar::new(5.0, 2.0, 6.0, 4.0), FRAC_PI_2).unwrap();
    let oracle = bisect_rocker(&FourBar::new(5.0, 2.0, 6.0, 4.0), FRAC_PI_2).unwrap();
    let reference_err = (rocker - REFERENCE_ROCKER_DEG.to_radians()).abs().max((rocker - oracle).abs());
    outcome(
        failures == 0 && worst <= FOURBAR_TOL_RAD && reference_err <= REFERENCE_ROCKER_TOL_RAD,
        format!(
            "20 crank-rockers x 360 angles: max deviation {worst:.2e} rad, {failures} failures; (5,2,6,4) at 90 deg -> {:.10} deg",
            rocker.to_degrees()
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut bars = random_crank_rockers(20, 3);
    bars.push(FourBar::new(5.0, 2.0, 6.0, 4.0));
    let mut worst: f64 = 0.0;
    for fb in &bars {
        let mech = validate_mechanism(LinkageSpec::four_bar(fb)).unwrap();
        let traj = mech.sweep(360, SweepMode::Continuation).unwrap();
        for conf in &traj.samples {
            let (_, rocker) = solve_fourbar(fb, conf.phase).unwrap();
            worst = worst.max(wrap(conf.link_angle("rocker").unwrap() - rocker).abs());
        }
    }
    outcome(worst <= REDUCTION_TOL_RAD, format!("{} four-bars x 360 samples: max deviation {worst:.2e} rad", bars.len()))
}

/// Four-bar with its three moving lengths free within 80-120% of `truth`.
fn recovery_spec(truth: &FourBar, start: [f64; 3]) -> LinkageSpec {
    let mut spec = LinkageSpec::four_bar(truth);
    let lengths = [truth.crank, truth.coupler, truth.rocker];
    for (i, link) in spec.links.iter_mut().enumerate() {
        link.length = start[i];
        spec.parameters.insert(
            format!("link.{}.length", link.id),
            ParameterBounds { min: 0.8 * lengths[i], max: 1.2 * lengths[i], stage: StageTag::Humerus },
        );
    }
    spec
}

fn criterion_4() -> Outcome {
    let truth = FourBar::new(10.0, 2.0, 9.0, 7.0);
    let true_mech = validate_mechanism(LinkageSpec::four_bar(&truth)).unwrap();
    let traj = true_mech.sweep(360, SweepMode::Continuation).unwrap();
    // The four-bar has no elbow; the humerus stage never reads that series.
    let targets = TargetGait {
        shape: None,
        phases: traj.phases(),
        shoulder_deg: traj.shoulder().unwrap().into_iter().map(f64::to_degrees).collect(),
        elbow_deg: vec![f64::NAN; 360],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut start = [truth.crank, truth.coupler, truth.rocker];
    for v in &mut start {
        *v *= rng.gen_range(0.8..1.2);
    }
    let mech = validate_mechanism(recovery_spec(&truth, start)).unwrap();
    let options = FitOptions { multistarts: 10, seed: 0, ..FitOptions::default() };
    let report = optimize_stage(&mech, &targets, Stage::Humerus, &options).unwrap();
    let good = report.starts.iter().filter(|s| s.cost.is_some_and(|c| c <= RECOVERY_COST)).count();
    let costs: Vec<String> =
        report.starts.iter().map(|s| s.cost.map_or("-".into(), |c| format!("{c:.1e}"))).collect();
    outcome(
        good >= RECOVERY_MIN_STARTS,
        format!("{good}/10 starts reach <= {RECOVERY_COST:.0e} deg^2 (costs {})", costs.join(" ")),
    )
}

fn criterion_5() -> Outcome {
    let mech = reference();
    let targets = sample_targets(360).unwrap();
    let report = optimize_armwing(&mech, &targets, &FitOptions::default()).unwrap();
    let (h, r) = (&report.stages[0].design, &report.stages[1].design);
    let humerus: Vec<usize> = h.free_indices(Stage::Humerus);
    let frozen = humerus.iter().all(|&i| {
        h.values[i].to_bits() == r.values[i].to_bits() && h.values[i].to_bits() == report.design.values[i].to_bits()
    });
    let fitted = report.apply(&mech).unwrap();
    let fc = evaluate_constraints(&fitted, 360).max();
    let ratio = report.final_cost / report.initial_cost;
    outcome(
        ratio <= FIT_RATIO && frozen && fc <= CONSTRAINT_TOL,
        format!(
            "cost {:.3} -> {:.4} deg^2 ({:.2}%), {} humerus entries frozen: {frozen}, max f_c {fc:.2e}",
            report.initial_cost,
            report.final_cost,
            100.0 * ratio,
            humerus.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let mech = reference();
    let unit = sensitivity_sweep(&mech, "l4", &[1.0], 360).unwrap();
    let zero = unit.score == Some(0.0) && unit.outcomes[0].max_deviation_mm == Some(0.0);
    let scales = scale_range(0.9, 1.1, 0.025).unwrap();
    let high = sensitivity_sweep(&mech, "l4", &scales, 360).unwrap();
    let low = sensitivity_sweep(&mech, "l1", &scales, 360).unwrap();
    let (sh, sl) = (high.score.unwrap_or(f64::NAN), low.score.unwrap_or(f64::NAN));
    let split = sl > 0.0 && sh >= SPLIT_RATIO * sl;
    let top3 = |delta: f64| {
        let mut names: Vec<String> =
            sensitivity_rank(&mech, delta, 360).unwrap().into_iter().take(3).map(|e| e.parameter).collect();
        names.sort();
        names
    };
    let (a, b) = (top3(0.01), top3(0.025));
    outcome(
        zero && split && a == b,
        format!("scale 1 deviation zero: {zero}; l4 {sh:.3} vs l1 {sl:.3} mm/% ({:.0}x); top-3 at 1% {a:?}, at 2.5% {b:?}", sh / sl),
    )
}

/// Nominal stress from the strain energy `C10 (I1 - 3) + C01 (I2 - 3)` by a
/// central difference in the stretch.
fn energy_stress(lambda: f64, c10: f64, c01: f64) -> f64 {
    let w = |l: f64| c10 * (l * l + 2.0 / l - 3.0) + c01 * (2.0 * l + 1.0 / (l * l) - 3.0);
    let h = 1e-6;
    (w(lambda + h) - w(lambda - h)) / (2.0 * h)
}

fn criterion_7() -> Outcome {
    let db = MaterialDb::bundled();
    let mat: &MaterialSpec = db.get("FLX9870").unwrap();
    let checks = [
        strain_budget_check(43.0, mat, 1.0).unwrap().pass,
        strain_budget_check(30.0, mat, 1.0).unwrap().pass,
        !strain_budget_check(130.0, mat, 1.0).unwrap().pass,
    ];
    let mr = mat.mooney_rivlin.unwrap();
    let at_one = armwing::analysis::mooney_rivlin_uniaxial(1.0, mat).unwrap();
    let s = armwing::analysis::mooney_rivlin_uniaxial(1.43, mat).unwrap();
    let oracle = energy_stress(1.43, 0.3339, -0.337e-3);
    let constants = mr.c10_mpa == 0.3339 && mr.c01_mpa == -0.337e-3;
    outcome(
        checks.iter().all(|&c| c) && at_one == 0.0 && (s - oracle).abs() <= STRESS_TOL_MPA && constants,
        format!("budget 43/30/130% -> {checks:?}; stress(1) = {at_one}; stress(1.43) = {s:.6} vs energy oracle {oracle:.6} MPa"),
    )
}

fn criterion_8() -> Outcome {
    let mech = reference();
    let targets = sample_targets(36).unwrap();
    let options = FitOptions {
        multistarts: 3,
        seed: 7,
        optimizer: OptimizerSettings { max_iterations: 40, ..OptimizerSettings::default() },
        ..FitOptions::default()
    };
    let report = || serde_json::to_string(&optimize_armwing(&mech, &targets, &options).unwrap()).unwrap();
    let reports = report() == report();

    let csv = || io::trajectory_csv_string(&mech.sweep(360, SweepMode::Continuation).unwrap()).unwrap();
    let c1 = csv();
    let csvs = c1 == csv();
    let rows = io::parse_trajectory_csv(&c1).unwrap();
    let csv_trip = io::rows_csv_string(&rows) == c1 && rows.len() == 360;

    let family = sensitivity_sweep(&mech, "l4", &[0.95, 1.0, 1.05], 90).unwrap();
    let svg = || render_svg(&sensitivity_plot(&family)).unwrap();
    let svgs = svg() == svg();

    let text = std::fs::read_to_string(common::data("reference_armwing.json")).unwrap();
    let first = mechanism_to_string(&parse_mechanism_str(&text).unwrap());
    let reparsed = parse_mechanism_str(&first).unwrap();
    let mech_trip = mechanism_to_string(&reparsed) == first && reparsed == parse_mechanism_str(&text).unwrap();
    let grid = rows.iter().zip(phase_grid(360)).all(|(r, p)| (r[0] - p.to_degrees()).abs() < 1e-9);

    outcome(
        reports && csvs && csv_trip && svgs && mech_trip && grid,
        format!(
            "reports {reports}, CSVs {csvs}, SVGs {svgs} identical; CSV round-trip {csv_trip}, mechanism round-trip {mech_trip}"
        ),
    )
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "target functions vs independent oracle", s(1), criterion_1),
        run(2, "four-bar closed form vs bisection", s(5), criterion_2),
        run(3, "general solver reduces to the four-bar", s(5), criterion_3),
        run(4, "synthetic four-bar recovery", s(60), criterion_4),
        run(5, "staged armwing fit", s(600), criterion_5),
        run(6, "sensitivity behaviour", s(120), criterion_6),
        run(7, "material checks", s(1), criterion_7),
        run(8, "determinism and round-trips", s(10), criterion_8),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
