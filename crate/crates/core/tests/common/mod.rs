#![allow(dead_code)]

use std::io::Write;

use ptcorr::potential::TabulatedPotential;
use ptcorr::{Complex64, PotentialSpec};

/// Writes a verdict line past the test harness capture so it always shows.
pub fn verdict(id: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{tag}] criterion {id}: {detail}");
}

pub fn scarf(a: f64, b: f64) -> PotentialSpec {
    PotentialSpec::scarf2(a, b, 1.0).unwrap()
}

/// `-sech^2 x - 3i sech x tanh x`, PT-symmetric with a conjugate eigenvalue pair.
pub fn broken_well(half_width: f64, n: usize) -> PotentialSpec {
    TabulatedPotential::from_fn(half_width, n, |x| {
        let s = 1.0 / x.cosh();
        Complex64::new(-s * s, -3.0 * s * x.tanh())
    })
    .unwrap()
    .into()
}

/// `-2 sech^2 x + 0.7i sech^2 (x - 1)`: absorbing and not PT-symmetric.
pub fn lossy_offset_well() -> PotentialSpec {
    TabulatedPotential::from_fn(25.0, 50001, |x| {
        let s = 1.0 / x.cosh();
        let t = 1.0 / (x - 1.0).cosh();
        Complex64::new(-2.0 * s * s, 0.7 * t * t)
    })
    .unwrap()
    .into()
}

const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Independent log-gamma: Stirling series at `z + 30`, walked back with the
/// recurrence. Valid for `Re z > -25` away from poles.
pub fn lngamma_series(z: Complex64) -> Complex64 {
    let shift = 30;
    let w = z + shift as f64;
    let mut s = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let w2 = w * w;
    let mut wp = w;
    for (m, b) in BERNOULLI.iter().enumerate() {
        let k = 2.0 * (m + 1) as f64;
        s += b / (k * (k - 1.0) * wp);
        wp *= w2;
    }
    for j in 0..shift {
        s -= (z + j as f64).ln();
    }
    s
}

/// `|exp(a - b) - 1|`: relative difference of two values given by their logs.
pub fn log_rel(a: Complex64, b: Complex64) -> f64 {
    ((a - b).exp() - 1.0).norm()
}
