use serde::{Deserialize, Serialize};

use crate::error::{CmcError, Result};
use crate::space::SpaceParams;

/// `f(x) = (a4 + b x^2)(4 a4 + b(1 - x^2)) + a4 b (1 - x^2) + (b^2/4)(1 - x^2)^2`.
pub fn f_of(nu: f64, a4: f64, b: f64) -> f64 {
    let x2 = nu * nu;
    let w = 1.0 - x2;
    (a4 + b * x2) * (4.0 * a4 + b * w) + a4 * b * w + 0.25 * b * b * w * w
}

/// [`f_of`] multiplied out in `y = x^2`:
/// `(4a4^2 + 2a4 b + b^2/4) + (2 a4 b + b^2/2) y - (3b^2/4) y^2`.
pub fn f_of_expanded(nu: f64, a4: f64, b: f64) -> f64 {
    let y = nu * nu;
    (4.0 * a4 * a4 + 2.0 * a4 * b + 0.25 * b * b) + (2.0 * a4 * b + 0.5 * b * b) * y - 0.75 * b * b * y * y
}

/// `(4 a4 + b) / (3 |b|)`; above one there is no interior critical point of
/// `f` on `(-1, 1)` other than `0`.
pub fn critical_point_ratio(a4: f64, b: f64) -> f64 {
    (4.0 * a4 + b) / (3.0 * b.abs())
}

/// `c = min{f(0), f(+-1)} = min{(4a4 + b)^2/4, 4 a4 (a4 + b)}` for `b < 0`.
pub fn c_constant(a4: f64, b: f64) -> Result<f64> {
    if !(b < 0.0) {
        return Err(CmcError::HypothesisViolated(format!("c is defined for b < 0, got b = {b}")));
    }
    if !(a4 + b > 0.0) {
        return Err(CmcError::HypothesisViolated(format!("H^2 + tau^2 - |b| = {} is not positive", a4 + b)));
    }
    Ok(((4.0 * a4 + b).powi(2) / 4.0).min(4.0 * a4 * (a4 + b)))
}

/// `(strict, relaxed)`: `H^2 + tau^2 - |b| > 0` and `4(H^2 + tau^2) - |b| > 0`.
pub fn hypothesis_thm41(space: &SpaceParams, h_mean: f64) -> (bool, bool) {
    let a4 = h_mean * h_mean + space.tau() * space.tau();
    let b = space.b().abs();
    (a4 - b > 0.0, 4.0 * a4 - b > 0.0)
}

/// `H^2 + kappa - 3 tau^2`, reported beside the hypothesis for `b < 0`.
pub fn h2_kappa_3tau2(space: &SpaceParams, h_mean: f64) -> f64 {
    h_mean * h_mean + space.kappa_f() - 3.0 * space.tau() * space.tau()
}

/// Positive lower bound for `q` on surfaces with `K <= 0`.
///
/// For `b < 0` this is [`c_constant`] under the strict hypothesis. For
/// `b > 0` the relaxed hypothesis gives `q/4 >= (4a4 - |b|)^2 / 16`, returned
/// here as a bound on `q` itself.
pub fn q_lower_bound(space: &SpaceParams, h_mean: f64) -> Result<f64> {
    let a4 = h_mean * h_mean + space.tau() * space.tau();
    let b = space.b();
    if b < 0.0 {
        c_constant(a4, b)
    } else if b > 0.0 {
        let gap = 4.0 * a4 - b;
        if gap > 0.0 {
            Ok(gap * gap / 4.0)
        } else {
            Err(CmcError::HypothesisViolated(format!("4(H^2 + tau^2) - |b| = {gap} is not positive")))
        }
    } else {
        Err(CmcError::DegenerateB)
    }
}

/// Upper bound for `q` on surfaces with `K >= 0`:
/// `2 [4 a4 (a4 + |b|) + b^2/4]`.
pub fn q_upper_bound(space: &SpaceParams, h_mean: f64) -> f64 {
    let a4 = h_mean * h_mean + space.tau() * space.tau();
    let b = space.b();
    2.0 * (4.0 * a4 * (a4 + b.abs()) + 0.25 * b * b)
}

/// Gauss curvature of a `q = 0` surface from
/// `4 a6 K = a6^2 - b^2 + (2a6 + b)^2 - (2a6 + b(1 - nu^2))^2`.
pub fn gauss_from_eq66(a6: f64, b: f64, nu: f64) -> Result<f64> {
    if a6 == 0.0 {
        return Err(CmcError::DegenerateA);
    }
    let t = 2.0 * a6 + b * (1.0 - nu * nu);
    Ok((a6 * a6 - b * b + (2.0 * a6 + b).powi(2) - t * t) / (4.0 * a6))
}

/// Bound table for one `(space, H)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub a4: f64,
    pub a6: f64,
    pub b: f64,
    /// `c` when `b < 0` and the strict hypothesis holds.
    pub c_lower: Option<f64>,
    pub q_upper: f64,
    /// Lower bound when `b > 0` and the relaxed hypothesis holds.
    pub q_lower_bpos: Option<f64>,
    pub hypothesis_strict: bool,
    pub hypothesis_relaxed: bool,
    pub h2_kappa_3tau2: f64,
}

impl BoundConstants {
    pub fn new(space: &SpaceParams, h_mean: f64) -> Self {
        let a4 = h_mean * h_mean + space.tau() * space.tau();
        let b = space.b();
        let (strict, relaxed) = hypothesis_thm41(space, h_mean);
        BoundConstants {
            a4,
            a6: 4.0 * a4,
            b,
            c_lower: if b < 0.0 { c_constant(a4, b).ok() } else { None },
            q_upper: q_upper_bound(space, h_mean),
            q_lower_bpos: if b > 0.0 { q_lower_bound(space, h_mean).ok() } else { None },
            hypothesis_strict: strict,
            hypothesis_relaxed: relaxed,
            h2_kappa_3tau2: h2_kappa_3tau2(space, h_mean),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::make_space;

    #[test]
    fn f_anchor_values() {
        assert!((f_of(0.0, 1.44, -1.0) - 5.6644).abs() < 1e-12);
        assert!((f_of(1.0, 1.44, -1.0) - 2.5344).abs() < 1e-12);
        assert!((f_of(-1.0, 1.44, -1.0) - 2.5344).abs() < 1e-12);
        assert!((f_of(0.5, 1.0, -1.0) - f_of_expanded(0.5, 1.0, -1.0)).abs() < 1e-12);
    }

    #[test]
    fn c_constant_examples() {
        assert!((c_constant(1.44, -1.0).unwrap() - 2.5344).abs() < 1e-12);
        assert!(matches!(c_constant(1.0, -1.0), Err(CmcError::HypothesisViolated(_))));
        assert!((critical_point_ratio(1.44, -1.0) - 4.76 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bound_examples() {
        let s1 = make_space(1, 0.0).unwrap();
        assert!((q_lower_bound(&s1, 1.0).unwrap() - 2.25).abs() < 1e-12);
        assert!(matches!(q_lower_bound(&s1, 0.4), Err(CmcError::HypothesisViolated(_))));
        let h2 = make_space(-1, 0.0).unwrap();
        assert!((q_lower_bound(&h2, 1.2).unwrap() - 2.5344).abs() < 1e-12);
        assert!((q_upper_bound(&h2, 1.0) - 16.5).abs() < 1e-12);
        assert!((q_upper_bound(&make_space(0, 0.5).unwrap(), 0.0) - 3.0).abs() < 1e-12);
        assert!((q_upper_bound(&SpaceParams::euclidean(), 0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_examples() {
        let h2 = make_space(-1, 0.0).unwrap();
        assert_eq!(hypothesis_thm41(&h2, 1.2), (true, true));
        assert_eq!(hypothesis_thm41(&h2, 1.0), (false, true));
        assert_eq!(hypothesis_thm41(&make_space(1, 0.0).unwrap(), 0.4), (false, false));
    }

    #[test]
    fn gauss_identity_examples() {
        assert!((gauss_from_eq66(4.0, -1.0, 0.0).unwrap() - 15.0 / 16.0).abs() < 1e-15);
        assert!(gauss_from_eq66(3.0, -3.0, 0.0).unwrap().abs() < 1e-15);
        let k = gauss_from_eq66(3.0, -3.0, 0.5).unwrap();
        assert!((k + 0.140625 * 3.0).abs() < 1e-12);
        assert_eq!(gauss_from_eq66(0.0, -1.0, 0.0), Err(CmcError::DegenerateA));
    }
}
