//! One-dimensional oscillatory decay check.
//!
//! For a real phase `f` whose derivatives of orders `2..=n` have a sum of
//! absolute values bounded between supplied constants on the interval, the
//! oscillatory integral against an amplitude obeys
//! `|∫ e^{i lambda f} phi| <= C'' (‖phi‖_inf + ‖phi'‖_1) (1 + |lambda|)^{-1/n}`.
//! This module verifies the derivative hypothesis by finite-difference
//! sampling, evaluates the left side with an oscillation-aware adaptive rule,
//! assembles the right side from a configured constant, and returns the pair
//! for ratio monitoring.

use num_complex::Complex64;

use crate::error::Error;
use crate::quad::gk::{GAUSS_W, KRONROD_W, NODES};
use crate::Result;

/// Constants and sampling controls for [`vdc_check_1d`].
#[derive(Debug, Clone)]
pub struct VdcParams {
    /// Lower bound required of `sum_{i=2..n} |f^(i)|` on the interval.
    pub c_lower: f64,
    /// Upper bound required of the same sum.
    pub c_upper: f64,
    /// The constant multiplying the right-hand side.
    pub c_bound: f64,
    /// Number of interior points at which the derivative sum is sampled.
    pub derivative_samples: usize,
    /// Absolute tolerance for the left-hand integral.
    pub quad_tol: f64,
}

impl VdcParams {
    pub fn new(c_lower: f64, c_upper: f64, c_bound: f64) -> Self {
        VdcParams {
            c_lower,
            c_upper,
            c_bound,
            derivative_samples: 41,
            quad_tol: 1e-10,
        }
    }
}

/// Returns `(lhs, rhs)` where `lhs = |∫_a^b e^{i lambda f(t)} amplitude(t) dt|`
/// and `rhs = c_bound * (sup |amplitude| + var(amplitude)) * (1+|lambda|)^{-1/n}`.
///
/// The derivative hypothesis `c_lower <= sum_{i=2..n} |f^(i)(t)| <= c_upper`
/// is checked by central finite differences at interior sample points before
/// anything is integrated; a violation is an error, not a warning, because the
/// bound is meaningless without it.
pub fn vdc_check_1d(
    f: &dyn Fn(f64) -> f64,
    interval: (f64, f64),
    n: u32,
    lambda: f64,
    amplitude: &dyn Fn(f64) -> f64,
    params: &VdcParams,
) -> Result<(f64, f64)> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Invalid(format!("bad interval [{a}, {b}]")));
    }
    if !(2..=4).contains(&n) {
        return Err(Error::Invalid(format!(
            "derivative order n must be in 2..=4 (stencils provided up to order 4), got {n}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::Invalid("lambda must be finite".into()));
    }
    if params.c_lower < 0.0 || params.c_upper < params.c_lower || params.c_bound <= 0.0 {
        return Err(Error::Invalid("constants must satisfy 0 <= c_lower <= c_upper, c_bound > 0".into()));
    }

    // derivative-sum hypothesis via central differences
    let h = 5e-4 * (b - a);
    let samples = params.derivative_samples.max(5);
    for k in 0..samples {
        // stay away from the endpoints by two stencil widths
        let t = a + (b - a) * (0.02 + 0.96 * k as f64 / (samples - 1) as f64);
        let mut sum = 0.0;
        for order in 2..=n {
            sum += fd_derivative(f, t, h, order).abs();
        }
        let slack = 0.02 * params.c_upper.max(1.0) + 1e-7;
        if sum > params.c_upper + slack || sum < params.c_lower - slack {
            return Err(Error::HypothesisViolated(format!(
                "derivative sum {sum:.6} at t = {t:.6} outside [{}, {}]",
                params.c_lower, params.c_upper
            )));
        }
    }

    // left side: oscillation-aware adaptive panels
    let (value, _err) = osc_integral_1d(f, amplitude, lambda, a, b, params.quad_tol);
    let lhs = value.norm();

    // amplitude sup norm and total variation by dense sampling
    let m = 4096;
    let mut sup = 0.0f64;
    let mut tv = 0.0f64;
    let mut prev = amplitude(a);
    for k in 0..=m {
        let t = a + (b - a) * k as f64 / m as f64;
        let v = amplitude(t);
        sup = sup.max(v.abs());
        tv += (v - prev).abs();
        prev = v;
    }
    let rhs = params.c_bound * (sup + tv) * (1.0 + lambda.abs()).powf(-1.0 / n as f64);
    Ok((lhs, rhs))
}

/// Central finite-difference approximation of `f^(order)` at `t`.
fn fd_derivative(f: &dyn Fn(f64) -> f64, t: f64, h: f64, order: u32) -> f64 {
    match order {
        2 => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
        3 => (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h * h * h),
        4 => {
            (f(t + 2.0 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h))
                / (h * h * h * h)
        }
        _ => unreachable!("validated above"),
    }
}

/// Adaptive 1D integration of `amplitude(t) e^{i lambda f(t)}`: panels are
/// bisected while the sampled phase range exceeds a few radians, then refined
/// on the embedded-rule estimate.
pub fn osc_integral_1d(
    f: &dyn Fn(f64) -> f64,
    amplitude: &dyn Fn(f64) -> f64,
    lambda: f64,
    a: f64,
    b: f64,
    tol: f64,
) -> (Complex64, f64) {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        amplitude: &dyn Fn(f64) -> f64,
        lambda: f64,
        a: f64,
        b: f64,
        share: f64,
        depth: u32,
    ) -> (Complex64, f64) {
        let mid = 0.5 * (a + b);
        let osc = {
            let (fa, fm, fb) = (f(a), f(mid), f(b));
            let hi = fa.max(fm).max(fb);
            let lo = fa.min(fm).min(fb);
            1.5 * lambda.abs() * (hi - lo)
        };
        if osc > 6.0 && depth < 52 {
            let (l, el) = rec(f, amplitude, lambda, a, mid, 0.5 * share, depth + 1);
            let (r, er) = rec(f, amplitude, lambda, mid, b, 0.5 * share, depth + 1);
            return (l + r, el + er);
        }
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut k = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        for i in 0..15 {
            let t = c + h * NODES[i];
            let (s, co) = (lambda * f(t)).sin_cos();
            let z = Complex64::new(co, s) * amplitude(t);
            k += z * KRONROD_W[i];
            g += z * GAUSS_W[i];
        }
        k *= h;
        g *= h;
        let est = (k - g).norm();
        if est <= share || depth >= 52 {
            return (k, est);
        }
        let (l, el) = rec(f, amplitude, lambda, a, mid, 0.5 * share, depth + 1);
        let (r, er) = rec(f, amplitude, lambda, mid, b, 0.5 * share, depth + 1);
        (l + r, el + er)
    }
    rec(f, amplitude, lambda, a, b, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpSpec;
    use std::f64::consts::PI;

    fn bump_amp() -> impl Fn(f64) -> f64 {
        let b = BumpSpec::default();
        move |t: f64| b.eval_1d(t)
    }

    #[test]
    fn quadratic_phase_matches_fresnel_size() {
        // |∫ e^{i lambda t^2} phi dt| -> sqrt(pi/lambda); second derivative == 2
        let amp = bump_amp();
        let params = VdcParams::new(1.9, 2.1, 3.0);
        for &lam in &[1e2, 1e3, 1e4] {
            let (lhs, rhs) =
                vdc_check_1d(&|t| t * t, (-0.5, 0.5), 2, lam, &amp, &params).unwrap();
            assert!(lhs <= rhs, "lambda {lam}: lhs {lhs} > rhs {rhs}");
            let scaled = lhs * (lam / PI).sqrt();
            assert!((scaled - 1.0).abs() <= 0.05, "lambda {lam}: scaled {scaled}");
        }
    }

    #[test]
    fn cubic_phase_has_cube_root_decay() {
        // |∫ e^{i lambda t^3} phi dt| ~ 2 pi Ai(0) / (3 lambda)^{1/3}
        let amp = bump_amp();
        // sum |f''| + |f'''| = |6t| + 6 in [6, 9] on [-1/2, 1/2]
        let params = VdcParams::new(5.9, 9.1, 1.0);
        let airy_const = 1.5468; // 2 pi Ai(0) / 3^{1/3}
        let mut band = Vec::new();
        for &lam in &[1e2, 1e3, 1e4] {
            let (lhs, rhs) =
                vdc_check_1d(&|t| t * t * t, (-0.5, 0.5), 3, lam, &amp, &params).unwrap();
            assert!(lhs <= rhs, "lambda {lam}: lhs {lhs} > rhs {rhs}");
            band.push(lhs * (1.0 + lam).powf(1.0 / 3.0));
        }
        let hi = band.iter().cloned().fold(f64::MIN, f64::max);
        let lo = band.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi / lo <= 1.5, "band [{lo}, {hi}]");
        assert!((band[2] / airy_const - 1.0).abs() <= 0.1, "airy scale {}", band[2]);
    }

    #[test]
    fn zero_frequency_is_the_amplitude_mass() {
        let amp = bump_amp();
        // C'' >= ‖phi‖_1 / (‖phi‖_inf + ‖phi'‖_1) always admits lambda = 0
        let params = VdcParams::new(1.9, 2.1, 0.5);
        let (lhs, rhs) = vdc_check_1d(&|t| t * t, (-0.5, 0.5), 2, 0.0, &amp, &params).unwrap();
        assert!(lhs <= rhs, "lhs {lhs} > rhs {rhs}");
        // mass of the 1D section: flat on [-1/4,1/4] plus two transitions
        assert!(lhs > 0.5 && lhs < 1.0);
    }

    #[test]
    fn derivative_hypothesis_violations_are_refused() {
        let amp = bump_amp();
        // cubic phase has |f''|+|f'''| down to 6; demanding >= 20 must fail
        let params = VdcParams::new(20.0, 30.0, 1.0);
        let out = vdc_check_1d(&|t| t * t * t, (-0.5, 0.5), 3, 100.0, &amp, &params);
        assert!(matches!(out, Err(Error::HypothesisViolated(_))));
        // quartic phase: f'' = 12 t^2 vanishes at 0, so a positive floor fails
        let params = VdcParams::new(1.0, 3.0, 1.0);
        let out = vdc_check_1d(&|t| t.powi(4), (-0.5, 0.5), 2, 100.0, &amp, &params);
        assert!(matches!(out, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        let amp = bump_amp();
        let params = VdcParams::new(1.9, 2.1, 1.0);
        assert!(vdc_check_1d(&|t| t * t, (0.5, -0.5), 2, 1.0, &amp, &params).is_err());
        assert!(vdc_check_1d(&|t| t * t, (-0.5, 0.5), 1, 1.0, &amp, &params).is_err());
        assert!(vdc_check_1d(&|t| t * t, (-0.5, 0.5), 5, 1.0, &amp, &params).is_err());
        assert!(vdc_check_1d(&|t| t * t, (-0.5, 0.5), 2, f64::NAN, &amp, &params).is_err());
    }

    #[test]
    fn adaptive_rule_handles_strong_oscillation() {
        // reference: ∫_0^1 e^{i w t} dt = (e^{iw} - 1) / (iw)
        let w = 4000.0;
        let (v, err) = osc_integral_1d(&|t| t, &|_| 1.0, w, 0.0, 1.0, 1e-12);
        let exact = (Complex64::new(0.0, w).exp() - Complex64::new(1.0, 0.0))
            / Complex64::new(0.0, w);
        assert!((v - exact).norm() <= err + 1e-12, "diff {}", (v - exact).norm());
    }
}
