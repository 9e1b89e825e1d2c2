//! Small least-squares toolbox: straight-line fits in log coordinates, the
//! two-member decay-model family `C * x^(-eps) * (log x)^m` with `m` in
//! `{0, 1}`, and one-sided slope confidence tests used to operationalize
//! "bounded": a statistic counts as trend-bounded when the 95% upper
//! confidence limit of its log-log slope stays below a small threshold.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::Error;
use crate::Result;

/// Ordinary least squares `y = intercept + slope * x` with standard errors.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub se_slope: f64,
    pub rms: f64,
    pub n: usize,
    /// Condition number of the (centered) normal equations.
    pub condition: f64,
}

/// Least-squares straight line through `(x, y)` pairs.
///
/// The design is centered before solving, and the reported condition number is
/// that of the centered normal equations; a value above `1e8` (for instance
/// when all abscissae coincide) is refused as ill-conditioned.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::Invalid("mismatched fit input lengths".into()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "a line with error bars needs at least 3 points, got {n}"
        )));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("fit inputs must be finite".into()));
    }
    let nf = n as f64;
    let xbar = x.iter().sum::<f64>() / nf;
    let ybar = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&v| (v - xbar) * (v - xbar)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&u, &v)| (u - xbar) * (v - ybar)).sum();
    // centered normal equations are diag(n, sxx): condition is their ratio
    let condition = if sxx > 0.0 {
        let hi = nf.max(sxx);
        let lo = nf.min(sxx);
        hi / lo
    } else {
        f64::INFINITY
    };
    if !condition.is_finite() || condition > 1e8 {
        return Err(Error::IllConditioned(condition));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&u, &v)| {
            let r = v - (intercept + slope * u);
            r * r
        })
        .sum();
    let rms = (ss_res / nf).sqrt();
    let se_slope = if n > 2 { (ss_res / (nf - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    Ok(LinearFit { intercept, slope, se_slope, rms, n, condition })
}

/// Fitted decay model `value = C * param^(-epsilon) * (log param)^m`.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub epsilon: f64,
    pub m: u8,
    pub c: f64,
    pub rms: f64,
    pub n: usize,
}

/// Fit the two-member decay family over positive `(param, value)` samples.
///
/// `m` is not a free coefficient: the model is fitted once with the `log log`
/// term absent and once with it fixed at coefficient one, and the smaller
/// rms wins. Ties within 1% go to the simpler `m = 0` model, because over a
/// short range `log log` is nearly collinear with a constant.
pub fn fit_decay_model(param: &[f64], value: &[f64]) -> Result<DecayFit> {
    if param.len() != value.len() {
        return Err(Error::Invalid("mismatched fit input lengths".into()));
    }
    if param.iter().any(|&p| p <= 1.0) {
        return Err(Error::Invalid("decay fits need parameters > 1 so that log log is defined".into()));
    }
    if value.iter().any(|&v| v <= 0.0) {
        return Err(Error::Invalid("decay fits need positive values".into()));
    }
    let lx: Vec<f64> = param.iter().map(|&p| p.ln()).collect();
    let ly: Vec<f64> = value.iter().map(|&v| v.ln()).collect();
    let f0 = linear_fit(&lx, &ly)?;
    // m = 1: move the fixed log log term to the left side
    let ly1: Vec<f64> = ly.iter().zip(&lx).map(|(&v, &l)| v - l.ln()).collect();
    let f1 = linear_fit(&lx, &ly1)?;
    let (fit, m) = if f1.rms < 0.99 * f0.rms { (f1, 1u8) } else { (f0, 0u8) };
    Ok(DecayFit { epsilon: -fit.slope, m, c: fit.intercept.exp(), rms: fit.rms, n: fit.n })
}

/// Verdict of a one-sided slope test.
#[derive(Debug, Clone, Copy)]
pub struct TrendReport {
    pub slope: f64,
    pub se_slope: f64,
    /// One-sided upper confidence limit of the slope.
    pub upper: f64,
    pub confidence: f64,
    pub max_slope: f64,
    pub bounded: bool,
}

/// Test whether the log-log slope of `(param, stat)` is at most `max_slope`
/// at the given one-sided confidence level (boundedness operationalized as
/// "no growth trend").
pub fn trend_bounded(
    param: &[f64],
    stat: &[f64],
    max_slope: f64,
    confidence: f64,
) -> Result<TrendReport> {
    if !(0.5..1.0).contains(&confidence) {
        return Err(Error::Invalid(format!("confidence must be in [0.5, 1), got {confidence}")));
    }
    if param.iter().any(|&p| p <= 0.0) || stat.iter().any(|&s| s <= 0.0) {
        return Err(Error::Invalid("trend tests need positive parameters and statistics".into()));
    }
    let lx: Vec<f64> = param.iter().map(|&p| p.ln()).collect();
    let ly: Vec<f64> = stat.iter().map(|&s| s.ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    let df = (fit.n - 2) as f64;
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::Invalid(format!("t distribution: {e}")))?
        .inverse_cdf(confidence);
    let upper = fit.slope + t * fit.se_slope;
    Ok(TrendReport {
        slope: fit.slope,
        se_slope: fit.se_slope,
        upper,
        confidence,
        max_slope,
        bounded: upper <= max_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn line_fit_recovers_exact_coefficients() {
        let x: Vec<f64> = (0..20).map(|k| k as f64 * 0.3 - 2.0).collect();
        let y: Vec<f64> = x.iter().map(|&u| 1.25 - 0.4 * u).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope + 0.4).abs() < 1e-12);
        assert!((f.intercept - 1.25).abs() < 1e-12);
        assert!(f.rms < 1e-12);
        assert!(f.se_slope < 1e-12);
    }

    #[test]
    fn degenerate_designs_are_refused() {
        let x = vec![2.0; 8];
        let y: Vec<f64> = (0..8).map(|k| k as f64).collect();
        assert!(matches!(linear_fit(&x, &y), Err(Error::IllConditioned(_))));
        assert!(linear_fit(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn decay_family_is_recovered_noiselessly_for_all_pairs() {
        // every (epsilon, m) in {1/6..1} x {0,1}: epsilon error < 1e-6, m exact
        let params = log_grid(1e2, 1e5, 16);
        for &eps in &[1.0 / 6.0, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 1.0] {
            for m in [0u8, 1u8] {
                let vals: Vec<f64> = params
                    .iter()
                    .map(|&p| 2.7 * p.powf(-eps) * p.ln().powi(m as i32))
                    .collect();
                let fit = fit_decay_model(&params, &vals).unwrap();
                assert!(
                    (fit.epsilon - eps).abs() < 1e-6,
                    "eps {eps}, m {m}: got {}",
                    fit.epsilon
                );
                assert_eq!(fit.m, m, "eps {eps}, m {m}");
                assert!((fit.c - 2.7).abs() < 1e-6);
                assert!(fit.rms < 1e-10);
            }
        }
    }

    #[test]
    fn decay_fit_requires_positive_data_beyond_one() {
        assert!(fit_decay_model(&[0.5, 2.0, 3.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(fit_decay_model(&[2.0, 3.0, 4.0], &[1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn flat_statistics_are_trend_bounded() {
        let p = log_grid(10.0, 1e4, 12);
        // tiny deterministic wiggle around a constant
        let s: Vec<f64> = p.iter().enumerate().map(|(k, _)| 3.0 + 0.01 * ((k % 3) as f64)).collect();
        let rep = trend_bounded(&p, &s, 0.05, 0.95).unwrap();
        assert!(rep.bounded, "upper {}", rep.upper);
        assert!(rep.slope.abs() < 0.01);
    }

    #[test]
    fn growing_statistics_fail_the_trend_test() {
        let p = log_grid(10.0, 1e4, 12);
        let s: Vec<f64> = p.iter().map(|&v| v.powf(0.2)).collect();
        let rep = trend_bounded(&p, &s, 0.05, 0.95).unwrap();
        assert!(!rep.bounded);
        assert!((rep.slope - 0.2).abs() < 1e-9);
    }

    #[test]
    fn decaying_statistics_pass_comfortably() {
        let p = log_grid(10.0, 1e4, 12);
        let s: Vec<f64> = p.iter().map(|&v| 5.0 * v.powf(-0.5)).collect();
        let rep = trend_bounded(&p, &s, 0.05, 0.95).unwrap();
        assert!(rep.bounded);
    }

    #[test]
    fn short_noisy_samples_widen_the_confidence_limit() {
        let p = [10.0, 31.6, 100.0, 316.0, 1000.0];
        let s = [1.0, 1.3, 0.8, 1.25, 0.9];
        let rep = trend_bounded(&p, &s, 0.05, 0.95).unwrap();
        // the point estimate is near zero but the upper limit is far above it
        assert!(rep.upper > rep.slope + 0.05);
    }
}
