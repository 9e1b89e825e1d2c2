use std::time::Instant;

use osclab_core::bump::BumpSpec;
use osclab_core::newton;
use osclab_core::phase::Phase;
use osclab_core::quad::{self, QuadConfig};
use osclab_core::stats;

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}

fn warp_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    // log-spaced but concentrated toward the top decade
    (0..n)
        .map(|k| {
            let t = (k as f64 / (n - 1) as f64).sqrt();
            a * (b / a).powf(t)
        })
        .collect()
}

fn sum_phase(terms: &[[i64; 4]], label: &str) -> Phase {
    Phase::from_quadruples(terms, label).unwrap()
}

fn case(phase: &Phase, bump: &BumpSpec, budget: u64, grid: &[f64], tag: &str) {
    let mut cfg = QuadConfig::default();
    cfg.panel_budget = budget;
    let t0 = Instant::now();
    let law = newton::predict_decay(&newton::build_polygon(phase).unwrap(), true).unwrap();
    let mut unconverged = 0usize;
    let vals: Vec<f64> = grid
        .iter()
        .map(|&l| {
            let out = quad::integrate_u_with(phase, l, bump, 1e-8, &cfg).unwrap();
            if !out.converged {
                unconverged += 1;
            }
            out.value.norm()
        })
        .collect();
    let fit = stats::fit_decay_model(grid, &vals).unwrap();
    println!(
        "{tag:34} err {:+.4} m_hat {} want {} unconv {} ({:.1}s)",
        fit.epsilon - law.epsilon_f64(),
        fit.m,
        law.m,
        unconverged,
        t0.elapsed().as_secs_f64()
    );
}

fn main() {
    let std_bump = BumpSpec::new(0.5, 0.25).unwrap();
    let fat = BumpSpec::new(0.5, 0.4).unwrap();
    let wide = BumpSpec::new(1.0, 0.5).unwrap();
    let widefat = BumpSpec::new(1.0, 0.7).unwrap();
    let l13 = log_grid(1e2, 1e5, 13);
    let w16 = warp_grid(1e2, 1e5, 16);

    let x2y2s = sum_phase(&[[2, 0, 1, 1], [0, 2, 1, 1]], "x^2+y^2");
    let x4y2 = sum_phase(&[[4, 0, 1, 1], [0, 2, 1, 1]], "x^4+y^2");
    let x3 = sum_phase(&[[3, 0, 1, 1]], "x^3");
    let h66 = sum_phase(&[[6, 6, 1, 1]], "x^6y^6");
    let h22 = sum_phase(&[[2, 2, 1, 1]], "x^2y^2");
    let x3y3s = sum_phase(&[[3, 0, 1, 1], [0, 3, 1, 1]], "x^3+y^3");
    let h33 = sum_phase(&[[3, 3, 1, 1]], "x^3y^3");

    case(&x2y2s, &std_bump, 1 << 22, &l13, "A x^2+y^2 std 2^22");
    case(&x4y2, &std_bump, 1 << 22, &l13, "B x^4+y^2 std 2^22");
    case(&x3, &std_bump, 1 << 22, &l13, "C x^3 std 2^22");
    case(&h66, &wide, 1 << 22, &l13, "D x^6y^6 wide 2^22");
    case(&h22, &wide, 1 << 22, &l13, "E x^2y^2 wide 2^22");
    case(&x3y3s, &fat, 1 << 23, &l13, "F x^3+y^3 (0.5,0.4) 2^23");
    case(&x3y3s, &wide, 1 << 23, &l13, "G x^3+y^3 (1.0,0.5) 2^23");
    case(&x3y3s, &std_bump, 1 << 23, &w16, "H x^3+y^3 std warp16 2^23");
    case(&h33, &widefat, 1 << 23, &l13, "J x^3y^3 (1.0,0.7) 2^23");
    case(&h33, &widefat, 1 << 24, &l13, "I x^3y^3 (1.0,0.7) 2^24");
    case(&h33, &wide, 1 << 23, &l13, "K x^3y^3 (1.0,0.5) 2^23");
    println!("done");
}
