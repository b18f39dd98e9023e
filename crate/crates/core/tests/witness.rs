//! Optimised witness gains against a brute-force scan, and the witness
//! across squeezing.

use cvqec_core::qec::{closed_form_output, Channel, CodeConfig};
use cvqec_core::witness::{combination_value, optimize_gains};

/// Combination (1-based) containing each gain `g1..g6`.
const OWNER: [usize; 6] = [2, 3, 1, 2, 3, 4];

/// Minimises combination `idx` over gain `i` alone by a coarse grid followed
/// by successive ×25 refinements around the best point.
fn scan(idx: usize, i: usize, gains: &[f64; 6], cfg: &CodeConfig) -> (f64, f64) {
    let eval = |g: f64| {
        let mut gs = *gains;
        gs[i] = g;
        combination_value(idx, &gs, cfg).unwrap()
    };
    let (mut lo, mut hi) = (-5.0, 5.0);
    let mut best = (0.0, f64::INFINITY);
    for _ in 0..12 {
        let step = (hi - lo) / 100.0;
        for k in 0..=100 {
            let g = lo + k as f64 * step;
            let v = eval(g);
            if v < best.1 {
                best = (g, v);
            }
        }
        (lo, hi) = (best.0 - 2.0 * step, best.0 + 2.0 * step);
    }
    best
}

#[test]
fn vertex_gains_match_a_grid_scan() {
    for r in [0.2, 0.403, 1.0] {
        let cfg = CodeConfig::with_r(r);
        let res = optimize_gains(&cfg).unwrap();
        for (i, &owner) in OWNER.iter().enumerate() {
            let (g, v) = scan(owner, i, &res.gains, &cfg);
            assert!((v - res.values[owner - 1]).abs() < 1e-9, "r={r} g{}: {v} vs {}", i + 1, res.values[owner - 1]);
            assert!((g - res.gains[i]).abs() < 1e-6, "r={r} g{}: {g} vs {}", i + 1, res.gains[i]);
        }
    }
}

#[test]
fn values_fall_monotonically_with_squeezing() {
    let mut prev = [f64::INFINITY; 4];
    for r in [0.0, 0.2, 0.4, 0.8, 1.6] {
        let res = optimize_gains(&CodeConfig::with_r(r)).unwrap();
        for (k, (&v, &before)) in res.values.iter().zip(&prev).enumerate() {
            assert!(v >= 0.0);
            assert!(v <= before + 1e-12, "r={r} combination {}", k + 1);
        }
        prev = res.values;
    }
}

#[test]
fn unit_gain_without_squeezing_exceeds_the_bound() {
    let mut gains = [0.0; 6];
    gains[2] = 1.0;
    assert!(combination_value(1, &gains, &CodeConfig::coherent()).unwrap() > 1.0);
}

#[test]
fn experimental_squeezing_violates_every_combination() {
    let cfg = CodeConfig::with_squeezing_db(-3.5);
    let res = optimize_gains(&cfg).unwrap();
    assert!(res.values.iter().all(|&v| v < 1.0), "{res:?}");
    let json = serde_json::to_value(&res).unwrap();
    assert_eq!(json["bound"], 1.0);
    assert_eq!(json["gains"].as_array().unwrap().len(), 6);
}

#[test]
fn entangled_encodings_beat_the_classical_fidelity() {
    let ch3 = Channel::new(3).unwrap();
    let classical = closed_form_output(&CodeConfig::coherent(), Some(ch3)).unwrap().fidelity;
    for r in [0.05, 0.2, 0.4, 0.8, 1.6] {
        let cfg = CodeConfig::with_r(r);
        if optimize_gains(&cfg).unwrap().fully_inseparable() {
            assert!(closed_form_output(&cfg, Some(ch3)).unwrap().fidelity > classical, "r={r}");
        }
    }
}
