//! Tolerances and the cosine table shared by every module.

use std::f64::consts::PI;
use std::sync::OnceLock;

use twofloat::TwoFloat;

/// Eigenvalue magnitude below which a value counts as zero.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Window used to recognise `cos(pi/k)` in computed weights.
pub const SNAP_TOL: f64 = 1e-6;
/// Agreement required between a recomputed product and a prescribed weight.
pub const PRODUCT_TOL: f64 = 1e-8;

static ZERO_TOL: OnceLock<f64> = OnceLock::new();

/// The process-wide zero tolerance (defaults to [`DEFAULT_TOL`]).
pub fn zero_tol() -> f64 {
    *ZERO_TOL.get().unwrap_or(&DEFAULT_TOL)
}

/// Overrides the zero tolerance once, before any computation reads it.
/// Returns false if it was already fixed.
pub fn set_zero_tol(tol: f64) -> bool {
    tol.is_finite() && tol > 0.0 && ZERO_TOL.set(tol).is_ok()
}

const TABLE_SIZE: usize = 1024;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..TABLE_SIZE)
            .map(|m| if m == 0 { 0.0 } else { (PI / m as f64).cos() })
            .collect()
    })
}

/// `cos(pi/m)`; `m = 2` gives exactly zero.
pub fn cos_pi_over(m: u32) -> f64 {
    if m == 2 {
        return 0.0;
    }
    match table().get(m as usize) {
        Some(&c) => c,
        None => (PI / m as f64).cos(),
    }
}

/// `cos(pi/m)` in double-double. The library cosine of the `twofloat` crate
/// is only good to about 70 bits, so this sums the Taylor series directly;
/// `pi/m <= pi/3` keeps it short.
pub fn cos_pi_over_extended(m: u32) -> TwoFloat {
    if m == 2 {
        return TwoFloat::from(0.0);
    }
    let x = twofloat::consts::PI / m as f64;
    let x2 = x * x;
    let mut term = TwoFloat::from(1.0);
    let mut sum = term;
    for k in 1..40u32 {
        term = -term * x2 / ((2 * k - 1) as f64 * (2 * k) as f64);
        sum += term;
        if term.hi().abs() < 1e-34 {
            break;
        }
    }
    sum
}

/// `sin^2(pi/m)`.
pub fn sin2_pi_over(m: u32) -> f64 {
    let c = cos_pi_over(m);
    1.0 - c * c
}

/// Recognises `w` as `cos(pi/k)` for some `2 <= k <= k_max`.
pub fn snap_angle(w: f64, k_max: u32, tol: f64) -> Option<u32> {
    if w.abs() < tol {
        return Some(2);
    }
    if !(0.0..1.0).contains(&w) {
        return None;
    }
    // pi/k = acos(w) gives the nearest candidate directly.
    let k = (PI / w.acos()).round();
    if !(3.0..=k_max as f64).contains(&k) {
        return None;
    }
    let k = k as u32;
    ((w - cos_pi_over(k)).abs() < tol).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosines() {
        assert_eq!(cos_pi_over(2), 0.0);
        assert!((cos_pi_over(3) - 0.5).abs() < 1e-15);
        assert!((cos_pi_over(4) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((cos_pi_over(5000) - (PI / 5000.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn extended_cosines() {
        // References split from 50-digit values.
        let refs = [
            (5, 0.8090169943749475, -2.716057601841253e-17),
            (7, 0.9009688679024191, -1.9762646853069492e-17),
            (30, 0.9945218953682733, 4.7061342505091844e-17),
        ];
        for (m, hi, lo) in refs {
            let c = cos_pi_over_extended(m);
            let err = (c - TwoFloat::from(hi)) - TwoFloat::from(lo);
            assert!(err.hi().abs() < 1e-31, "m={m} err={err:?}");
        }
        let half = cos_pi_over_extended(3) - TwoFloat::from(0.5);
        assert!(half.hi().abs() < 1e-31);
    }

    #[test]
    fn snapping() {
        for k in 2..200 {
            assert_eq!(snap_angle(cos_pi_over(k) + 3e-7, 200, SNAP_TOL), Some(k), "k={k}");
        }
        assert_eq!(snap_angle(cos_pi_over(7), 6, SNAP_TOL), None);
        assert_eq!(snap_angle(0.55, 30, SNAP_TOL), None);
        assert_eq!(snap_angle(-0.2, 30, SNAP_TOL), None);
        assert_eq!(snap_angle(1.0, 30, SNAP_TOL), None);
    }
}
