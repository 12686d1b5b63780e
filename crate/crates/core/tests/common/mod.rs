#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use armwing::io::parse_mechanism_file;
use armwing::{validate_mechanism, Branch, FourBar, MechanismGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load(name: &str) -> MechanismGraph {
    validate_mechanism(parse_mechanism_file(data(name)).unwrap()).unwrap()
}

pub fn reference() -> MechanismGraph {
    load("reference_armwing.json")
}

pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Rocker angle by bisection on the coupler-length residual, without any
/// circle-intersection algebra. `None` if the loop cannot close.
pub fn bisect_rocker(fb: &FourBar, input: f64) -> Option<f64> {
    let a = [fb.crank * input.cos(), fb.crank * input.sin()];
    let o = [fb.ground * fb.ground_angle.cos(), fb.ground * fb.ground_angle.sin()];
    let joint = |psi: f64| [o[0] + fb.rocker * psi.cos(), o[1] + fb.rocker * psi.sin()];
    let f = |psi: f64| {
        let p = joint(psi);
        (p[0] - a[0]).hypot(p[1] - a[1]) - fb.coupler
    };
    // the joint is nearest the crank tip at psi = alpha and farthest at
    // alpha + pi; f is monotone on either half-turn between them
    let alpha = (a[1] - o[1]).atan2(a[0] - o[0]);
    let mut roots = Vec::new();
    for (lo, hi) in [(alpha, alpha + PI), (alpha - PI, alpha)] {
        let (mut lo, mut hi) = (lo, hi);
        let (flo, fhi) = (f(lo), f(hi));
        if flo.signum() == fhi.signum() {
            return None;
        }
        let rising = flo < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) < 0.0) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    // open: joint to the left of crank tip -> rocker pivot
    let left = |psi: f64| {
        let p = joint(psi);
        (o[0] - a[0]) * (p[1] - a[1]) - (o[1] - a[1]) * (p[0] - a[0]) > 0.0
    };
    let want_left = fb.branch == Branch::Open;
    roots.into_iter().find(|&r| left(r) == want_left).map(wrap)
}

/// Random Grashof crank-rockers (crank shortest) with a comfortable
/// transmission margin, checked directly from the inequality.
pub fn random_crank_rockers(count: usize, seed: u64) -> Vec<FourBar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let crank = rng.gen_range(1.0..3.0);
        let ground = rng.gen_range(4.0..10.0);
        let coupler = rng.gen_range(4.0..10.0);
        let rocker = rng.gen_range(4.0..10.0);
        let mut l = [ground, crank, coupler, rocker];
        l.sort_by(f64::total_cmp);
        if l[0] != crank || l[0] + l[3] > l[1] + l[2] - 1.0 {
            continue;
        }
        let branch = if rng.gen_bool(0.5) { Branch::Open } else { Branch::Crossed };
        let angle = rng.gen_range(-PI..PI);
        out.push(FourBar::new(ground, crank, coupler, rocker).with_branch(branch).with_ground_angle(angle));
    }
    out
}
