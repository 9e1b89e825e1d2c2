//! Cross-checks of the adaptive quadrature engine against a brute-force
//! Simpson rule on a fine tensor grid. The oracle shares nothing with the
//! engine: no panel subdivision, no oscillation handling, no budget logic —
//! just dense sampling, so agreement validates the engine's machinery at
//! moderate frequencies where dense sampling is still affordable.

use num::complex::Complex64;
use osclab_core::bump::BumpSpec;
use osclab_core::phase::Phase;
use osclab_core::quad::{self, QuadConfig};

/// Simpson tensor-product rule over the cutoff's support square.
fn oracle(
    phase: &Phase,
    lambda: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    n: usize,
    damped: bool,
) -> Complex64 {
    assert!(n % 2 == 0);
    let rho = bump.rho();
    let h = 2.0 * rho / n as f64;
    let weight = |i: usize| -> f64 {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let x = -rho + i as f64 * h;
        let wi = weight(i);
        for j in 0..=n {
            let y = -rho + j as f64 * h;
            let b = bump.profile(x.hypot(y));
            if b == 0.0 {
                continue;
            }
            let s = phase.eval(x, y);
            let v = if damped {
                Complex64::from_polar(b * (-lambda * s).exp(), mu1 * x + mu2 * y)
            } else {
                Complex64::from_polar(b, lambda * s + mu1 * x + mu2 * y)
            };
            acc += wi * weight(j) * v;
        }
    }
    acc * (h * h / 9.0)
}

fn sum_phase(terms: &[[i64; 4]]) -> Phase {
    Phase::from_quadruples(terms, "oracle case").unwrap()
}

const N: usize = 2048;

#[test]
fn oscillatory_values_match_dense_simpson() {
    let std_bump = BumpSpec::new(0.5, 0.25).unwrap();
    let wide = BumpSpec::new(1.0, 0.5).unwrap();
    let cases: Vec<(Phase, f64, f64, f64, &BumpSpec)> = vec![
        // radial phase, plain oscillation
        (sum_phase(&[[2, 0, 1, 1], [0, 2, 1, 1]]), 50.0, 0.0, 0.0, &std_bump),
        // line phase with a two-component modulation
        (sum_phase(&[[3, 0, 1, 1]]), 80.0, -20.0, 5.0, &std_bump),
        // non-degenerate mix of hyperbolic monomials
        (sum_phase(&[[3, 3, 1, 1], [2, 2, 1, 1]]), 100.0, 7.0, -3.0, &std_bump),
        // wide cutoff exercises the outer transition band
        (sum_phase(&[[2, 2, 1, 1]]), 40.0, 11.0, 0.0, &wide),
        // rational coefficients
        (sum_phase(&[[4, 0, 1, 3], [0, 2, 2, 5]]), 64.0, -6.0, 9.0, &std_bump),
    ];
    for (phase, lam, mu1, mu2, bump) in &cases {
        let brute = oracle(phase, *lam, *mu1, *mu2, bump, N, false);
        let out = quad::integrate_t(phase, *lam, *mu1, *mu2, bump, 1e-9).unwrap();
        let diff = (out.value - brute).norm();
        assert!(
            diff <= 3e-6,
            "{} lam={lam} mu=({mu1},{mu2}): engine {:?} vs simpson {:?} (diff {diff:.2e})",
            phase.label(),
            out.value,
            brute
        );
        assert!(out.converged, "engine failed to converge on an easy case");
    }
}

#[test]
fn conjugation_symmetry_holds_against_the_oracle() {
    let bump = BumpSpec::new(0.5, 0.25).unwrap();
    let phase = sum_phase(&[[3, 0, 1, 1], [0, 3, 1, 1]]);
    let brute = oracle(&phase, -60.0, 4.0, -2.0, &bump, N, false);
    let out = quad::integrate_t(&phase, -60.0, 4.0, -2.0, &bump, 1e-9).unwrap();
    assert!((out.value - brute).norm() <= 3e-6, "{:?} vs {brute:?}", out.value);

    let pos = quad::integrate_t(&phase, 60.0, -4.0, 2.0, &bump, 1e-9).unwrap();
    assert!((out.value - pos.value.conj()).norm() < 1e-12);
}

#[test]
fn damped_values_match_dense_simpson() {
    let bump = BumpSpec::new(0.5, 0.25).unwrap();
    let radial = sum_phase(&[[2, 0, 1, 1], [0, 2, 1, 1]]);
    let hyper = sum_phase(&[[2, 2, 1, 1]]);
    for (phase, lam, mu1, mu2) in
        [(&radial, 30.0, 3.0, -2.0), (&radial, 150.0, 0.0, 7.0), (&hyper, 75.0, -5.0, 1.0)]
    {
        let brute = oracle(phase, lam, mu1, mu2, &bump, N, true);
        let out = quad::integrate_r(phase, lam, mu1, mu2, &bump, 1e-9).unwrap();
        let diff = (out.value - brute).norm();
        assert!(
            diff <= 3e-6,
            "{} lam={lam}: engine {:?} vs simpson {brute:?} (diff {diff:.2e})",
            phase.label(),
            out.value
        );
    }
}

#[test]
fn kernel_grid_reproduces_pointwise_integrals() {
    let bump = BumpSpec::new(0.5, 0.25).unwrap();
    let phase = sum_phase(&[[2, 0, 1, 1], [0, 2, 1, 1]]);
    let pts = [(0.0, 0.0), (1.5, -0.5), (-3.0, 2.0)];
    let grid = quad::kernel_t_grid(&phase, 12.0, &bump, &pts, 1e-8).unwrap();
    assert_eq!(grid.len(), pts.len());
    for (v, &(x1, x2)) in grid.iter().zip(&pts) {
        let direct = quad::integrate_t(&phase, 12.0, x1, x2, &bump, 1e-8).unwrap();
        assert!((v - direct.value).norm() < 1e-14);
    }
}

#[test]
fn engine_error_reports_cover_the_oracle_difference() {
    // the reported abs_error must actually bound the defect at loose tolerance
    let bump = BumpSpec::new(0.5, 0.25).unwrap();
    let phase = sum_phase(&[[3, 0, 1, 1]]);
    let brute = oracle(&phase, 90.0, -10.0, 0.0, &bump, N, false);
    for tol in [1e-3, 1e-5, 1e-7] {
        let out = quad::integrate_t(&phase, 90.0, -10.0, 0.0, &bump, tol).unwrap();
        let diff = (out.value - brute).norm();
        assert!(
            diff <= out.abs_error.max(3e-6) * 4.0,
            "tol {tol:.0e}: defect {diff:.2e} vs claimed {:.2e}",
            out.abs_error
        );
    }
}

#[test]
fn config_knobs_change_cost_but_not_values() {
    let bump = BumpSpec::new(0.5, 0.25).unwrap();
    let phase = sum_phase(&[[2, 2, 1, 1]]);
    let base = quad::integrate_t(&phase, 70.0, 2.0, 0.0, &bump, 1e-8).unwrap();
    let mut cfg = QuadConfig::default();
    cfg.panel_budget = 1 << 23;
    cfg.parallel_depth = 3;
    let tuned = quad::integrate_t_with(&phase, 70.0, 2.0, 0.0, &bump, 1e-8, &cfg).unwrap();
    assert!((base.value - tuned.value).norm() < 1e-7);
}
