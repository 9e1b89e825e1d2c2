//! Sublevel-set measurement: `|{(x, y) in region : f(x, y) < r}|` by two
//! independent routes — a deterministic quadtree that brackets the measure
//! between definitely-inside and possibly-inside mass, and a stratified
//! Monte Carlo counter — plus closed forms for monomials on the unit square,
//! a power-law fitter for `measure ≈ C·r^ε·|log r|^m`, and a trend check for
//! monomial sublevel growth on curved wedges.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::newton::{DecayLaw, Rational64};
use crate::resolution::Wedge;
use crate::stats::{self, TrendReport};
use crate::Result;

use num::ToPrimitive;

/// How a sublevel measure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "adaptive-det")]
    AdaptiveDet,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::AdaptiveDet => "adaptive-det",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

/// A measured sublevel set: `measure ± uncertainty` at threshold `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SublevelEstimate {
    pub r: f64,
    pub measure: f64,
    pub uncertainty: f64,
    pub method: Method,
}

/// Integration region: an axis-aligned rectangle or a curved wedge.
#[derive(Debug, Clone)]
pub enum Region {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Wedge(Wedge),
}

impl Region {
    pub fn unit_square() -> Self {
        Region::Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if let Region::Rect { x0, x1, y0, y1 } = *self {
            if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) || x0 >= x1 || y0 >= y1 {
                return Err(Error::Invalid(format!(
                    "rectangle [{x0}, {x1}] x [{y0}, {y1}] must be finite and nonempty"
                )));
            }
        }
        Ok(())
    }

    fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self {
            Region::Rect { x0, x1, y0, y1 } => (*x0, *x1, *y0, *y1),
            Region::Wedge(w) => w.bounding_box(),
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Region::Rect { x0, x1, y0, y1 } => x >= *x0 && x <= *x1 && y >= *y0 && y <= *y1,
            Region::Wedge(w) => w.contains(x, y),
        }
    }

    /// `(intersects, inside)` for an axis-aligned cell. Exact: rectangles by
    /// interval overlap, wedges through their monotone-edge corner tests.
    fn cell_state(&self, cx0: f64, cx1: f64, cy0: f64, cy1: f64) -> (bool, bool) {
        match self {
            Region::Rect { x0, x1, y0, y1 } => {
                let intersects = cx0 <= *x1 && cx1 >= *x0 && cy0 <= *y1 && cy1 >= *y0;
                let inside = cx0 >= *x0 && cx1 <= *x1 && cy0 >= *y0 && cy1 <= *y1;
                (intersects, inside)
            }
            Region::Wedge(w) => w.cell_state(cx0, cx1, cy0, cy1),
        }
    }
}

/// Refinement stops here even if cells are still mixed; the leftover mixed
/// mass becomes the reported uncertainty. Area resolution 4^-24 is far finer
/// than any fit downstream can use.
pub const MAX_QUADTREE_DEPTH: u32 = 24;

/// Reasonable default budgets: quadtree cell classifications, MC samples.
pub const DEFAULT_DET_BUDGET: usize = 2_000_000;
pub const DEFAULT_MC_BUDGET: usize = 250_000;

/// Measure `{f < r}` inside `region`.
///
/// `adaptive-det` classifies quadtree cells as inside / outside / mixed —
/// region coverage by exact interval tests (wedge edges are monotone), the
/// sublevel side by the extremes of `f` over a 3x3 sample grid — and refines
/// the mixed front level by level. The result is `inside + mixed/2`, with
/// the whole mixed mass as uncertainty — a true bracket whenever the cell
/// extremes of `f` sit on the sample grid (as for monomials on the
/// quadrant), a sampling heuristic otherwise. If the next level would not
/// fit in the budget while mixed cells remain above the depth cap, the best
/// bracket so far is returned inside `Error::SublevelBudget`.
///
/// `monte-carlo` throws one jittered sample per cell of a uniform
/// stratification, keyed by `(seed, cell index)` so results are reproducible
/// and order-independent, and reports a 99% confidence half-width
/// (conservative: stratification only lowers the variance of a plain
/// proportion estimator).
pub fn measure_sublevel(
    f: &dyn Fn(f64, f64) -> f64,
    region: &Region,
    r: f64,
    method: Method,
    budget: usize,
    seed: u64,
) -> Result<SublevelEstimate> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::Invalid(format!("threshold must satisfy 0 < r < 1/2, got {r}")));
    }
    region.validate()?;
    if budget < 16 {
        return Err(Error::Invalid(format!("budget {budget} is too small to start")));
    }
    match method {
        Method::AdaptiveDet => measure_det(f, region, r, budget),
        Method::MonteCarlo => Ok(measure_mc(f, region, r, budget, seed)),
    }
}

/// Like [`measure_sublevel`], but accept the best bracket when the budget
/// runs out instead of failing; other errors still propagate.
pub fn measure_or_bracket(
    f: &dyn Fn(f64, f64) -> f64,
    region: &Region,
    r: f64,
    method: Method,
    budget: usize,
    seed: u64,
) -> Result<SublevelEstimate> {
    match measure_sublevel(f, region, r, method, budget, seed) {
        Ok(e) | Err(Error::SublevelBudget { estimate: e }) => Ok(e),
        Err(e) => Err(e),
    }
}

fn measure_det(
    f: &dyn Fn(f64, f64) -> f64,
    region: &Region,
    r: f64,
    budget: usize,
) -> Result<SublevelEstimate> {
    let (bx0, bx1, by0, by1) = region.bounding_box();
    let bbox_area = (bx1 - bx0) * (by1 - by0);
    // cells are addressed by (i, j) on the dyadic grid of the current depth
    let mut mixed: Vec<(u32, u32)> = vec![(0, 0)];
    let mut depth: u32 = 0;
    let mut inside_mass = 0.0f64;
    let mut budget_left = budget;
    let mut exhausted = false;

    // 2 = inside (full cell counts), 0 = outside (dropped), 1 = mixed.
    // Region coverage is decided by the exact cell tests, the sublevel side
    // by the extremes of f over a 3x3 sample grid (exact for functions whose
    // cell extremes sit on the corners, e.g. monomials on the quadrant).
    let classify = |i: u32, j: u32, depth: u32| -> u32 {
        let w = 0.5f64.powi(depth as i32);
        let (x0, y0) = (bx0 + (bx1 - bx0) * i as f64 * w, by0 + (by1 - by0) * j as f64 * w);
        let (dx, dy) = ((bx1 - bx0) * w, (by1 - by0) * w);
        let (intersects, inside) = region.cell_state(x0, x0 + dx, y0, y0 + dy);
        if !intersects {
            return 0;
        }
        let mut fmin = f64::INFINITY;
        let mut fmax = f64::NEG_INFINITY;
        for a in 0..3 {
            let x = x0 + dx * a as f64 / 2.0;
            for b in 0..3 {
                let y = y0 + dy * b as f64 / 2.0;
                let v = f(x, y);
                fmin = fmin.min(v);
                fmax = fmax.max(v);
            }
        }
        if fmin >= r {
            0
        } else if inside && fmax < r {
            2
        } else {
            1
        }
    };

    // the root is always refined so thin sets cannot vanish between samples
    while !mixed.is_empty() && depth < MAX_QUADTREE_DEPTH {
        let need = 4 * mixed.len();
        if need > budget_left {
            exhausted = true;
            break;
        }
        budget_left -= need;
        let child_area = bbox_area * 0.25f64.powi(depth as i32 + 1);
        let mut next: Vec<(u32, u32)> = Vec::new();
        let mut inside_count = 0u64;
        for &(i, j) in &mixed {
            for (ci, cj) in [(2 * i, 2 * j), (2 * i + 1, 2 * j), (2 * i, 2 * j + 1), (2 * i + 1, 2 * j + 1)] {
                match classify(ci, cj, depth + 1) {
                    2 => inside_count += 1,
                    0 => {}
                    _ => next.push((ci, cj)),
                }
            }
        }
        inside_mass += inside_count as f64 * child_area;
        mixed = next;
        depth += 1;
    }

    let mixed_mass = mixed.len() as f64 * bbox_area * 0.25f64.powi(depth as i32);
    let estimate = SublevelEstimate {
        r,
        measure: inside_mass + 0.5 * mixed_mass,
        uncertainty: mixed_mass,
        method: Method::AdaptiveDet,
    };
    if exhausted {
        return Err(Error::SublevelBudget { estimate });
    }
    Ok(estimate)
}

/// One splitmix64-style scramble of `(seed, index, salt)` into a uniform
/// deviate in `[0, 1)`; counter-based, so sampling order never matters.
fn unit_deviate(seed: u64, index: u64, salt: u64) -> f64 {
    let mut z = seed
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add(index.wrapping_mul(0xBF58476D1CE4E5B9))
        .wrapping_add(salt.wrapping_mul(0x94D049BB133111EB));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    (z >> 11) as f64 * (1.0 / 9007199254740992.0)
}

fn measure_mc(
    f: &dyn Fn(f64, f64) -> f64,
    region: &Region,
    r: f64,
    budget: usize,
    seed: u64,
) -> SublevelEstimate {
    let (x0, x1, y0, y1) = region.bounding_box();
    let area = (x1 - x0) * (y1 - y0);
    // budget rounds down to a g x g stratification with one sample per cell
    let g = (budget as f64).sqrt().floor().max(2.0) as u64;
    let n = g * g;
    let mut hits = 0u64;
    for idx in 0..n {
        let (i, j) = (idx / g, idx % g);
        let x = x0 + (x1 - x0) * (i as f64 + unit_deviate(seed, idx, 1)) / g as f64;
        let y = y0 + (y1 - y0) * (j as f64 + unit_deviate(seed, idx, 2)) / g as f64;
        if region.contains(x, y) && f(x, y) < r {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    let se = area * (p * (1.0 - p) / n as f64).sqrt();
    // 99% normal half-width, floored by a rule-of-three guard for p near 0/1
    let uncertainty = (2.5758 * se).max(3.0 * area / n as f64);
    SublevelEstimate { r, measure: p * area, uncertainty, method: Method::MonteCarlo }
}

/// Closed form of `|{(x, y) in [0,1]^2 : x^a y^b < r}|` for `0 < r < 1`.
pub fn monomial_sublevel_exact(a: u32, b: u32, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Invalid(format!("threshold must be in (0, 1), got {r}")));
    }
    if a == 0 && b == 0 {
        return Err(Error::Invalid("x^0 y^0 has no sublevel geometry".into()));
    }
    let (a, b) = (a.max(b), a.min(b)); // symmetric in (a, b); now a >= b
    let (af, bf) = (a as f64, b as f64);
    Ok(if b == 0 {
        r.powf(1.0 / af)
    } else if a == b {
        r.powf(1.0 / af) * (1.0 - r.ln() / af)
    } else {
        r.powf(1.0 / af) + bf * (r.powf(1.0 / bf) - r.powf(1.0 / af)) / (bf - af)
    })
}

/// Fitted sublevel growth law `measure ≈ C·r^ε·|log r|^m`.
#[derive(Debug, Clone, Copy)]
pub struct SublevelFit {
    pub epsilon_hat: f64,
    pub m_hat: u8,
    pub c_hat: f64,
    pub rms_residual: f64,
    pub n_points: usize,
}

/// Fit the growth law on measured estimates; needs at least 6 samples
/// spanning at least 3 decades of `r`. The `log log` term is a fixed binary
/// regressor: the model is fitted with and without it and the smaller
/// residual wins (ties go to `m = 0`).
pub fn fit_sublevel_law(samples: &[SublevelEstimate]) -> Result<SublevelFit> {
    if samples.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "sublevel fits need >= 6 samples, got {}",
            samples.len()
        )));
    }
    let rmin = samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    let rmax = samples.iter().map(|s| s.r).fold(0.0f64, f64::max);
    if rmax / rmin < 1e3 {
        return Err(Error::InsufficientData(format!(
            "sublevel fits need >= 3 decades of r, got {:.2}",
            (rmax / rmin).log10()
        )));
    }
    if samples.iter().any(|s| s.measure <= 0.0) {
        return Err(Error::InsufficientData(
            "non-positive measures cannot be fitted in log space".into(),
        ));
    }
    // measure = C·r^ε|log r|^m is the decay family in the variable 1/r
    let params: Vec<f64> = samples.iter().map(|s| 1.0 / s.r).collect();
    let values: Vec<f64> = samples.iter().map(|s| s.measure).collect();
    let fit = stats::fit_decay_model(&params, &values)?;
    Ok(SublevelFit {
        epsilon_hat: fit.epsilon,
        m_hat: fit.m,
        c_hat: fit.c,
        rms_residual: fit.rms,
        n_points: fit.n,
    })
}

/// Outcome of the wedge sublevel growth check.
#[derive(Debug, Clone)]
pub struct Lemma41Report {
    /// `(r, measured, normalized statistic)` per threshold.
    pub rows: Vec<(f64, f64, f64)>,
    pub trend: TrendReport,
    pub pass: bool,
}

/// Check that `|{(x,y) in wedge : x^α y^β < r}| / (r^ε |log r|^m)` stays
/// bounded as `r` shrinks, using deterministic measurements (best bracket on
/// budget exhaustion) and the one-sided slope test against `1/r`.
pub fn lemma41_check(
    wedge: &Wedge,
    alpha_i: Rational64,
    beta_i: u32,
    law: &DecayLaw,
    r_values: &[f64],
    budget: usize,
) -> Result<Lemma41Report> {
    if r_values.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "trend checks need >= 6 thresholds, got {}",
            r_values.len()
        )));
    }
    let af = alpha_i.to_f64().ok_or_else(|| Error::Invalid(format!("bad exponent {alpha_i}")))?;
    if af < 0.0 {
        return Err(Error::Invalid(format!("monomial exponent must be nonnegative, got {alpha_i}")));
    }
    let region = Region::Wedge(wedge.clone());
    let f = move |x: f64, y: f64| x.powf(af) * y.powi(beta_i as i32);
    let eps = law.epsilon_f64();
    let m = law.m;
    let mut rows = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let est = measure_or_bracket(&f, &region, r, Method::AdaptiveDet, budget, 0)?;
        let norm = r.powf(eps) * r.ln().abs().powi(m as i32);
        rows.push((r, est.measure, est.measure / norm));
    }
    let params: Vec<f64> = rows.iter().map(|&(r, _, _)| 1.0 / r).collect();
    let stat: Vec<f64> = rows.iter().map(|&(_, _, s)| s).collect();
    let trend = stats::trend_bounded(&params, &stat, 0.05, 0.95)?;
    let pass = trend.bounded;
    Ok(Lemma41Report { rows, trend, pass })
}

/// Default threshold grid: 12 log-spaced points from 1e-7 to 1e-1.
pub fn default_r_grid() -> Vec<f64> {
    (0..12).map(|k| 1e-7 * 1e6f64.powf(k as f64 / 11.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Phase;
    use crate::resolution::Wedge;

    fn monomial_fn(a: u32, b: u32) -> impl Fn(f64, f64) -> f64 {
        move |x, y| x.powi(a as i32) * y.powi(b as i32)
    }

    /// Brute-force oracle: Simpson integration of the exact 1D section
    /// width `min(1, (r/x^a)^{1/b})` over x, on a fine grid.
    fn brute_monomial_measure(a: u32, b: u32, r: f64) -> f64 {
        if b == 0 {
            return r.powf(1.0 / a as f64);
        }
        if a == 0 {
            return r.powf(1.0 / b as f64);
        }
        let n = 400_001;
        let h = 1.0 / (n - 1) as f64;
        let width = |x: f64| -> f64 {
            if x == 0.0 {
                1.0
            } else {
                (r / x.powi(a as i32)).powf(1.0 / b as f64).min(1.0)
            }
        };
        let mut sum = width(0.0) + width(1.0);
        for k in 1..n - 1 {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * width(k as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn closed_forms_match_the_brute_oracle() {
        for a in 0..=4u32 {
            for b in 0..=4u32 {
                if a == 0 && b == 0 {
                    continue;
                }
                for &r in &[1e-2, 1e-4] {
                    let exact = monomial_sublevel_exact(a, b, r).unwrap();
                    let brute = brute_monomial_measure(a, b, r);
                    assert!(
                        (exact - brute).abs() < 2e-6 * exact.max(1e-6),
                        "a={a} b={b} r={r}: {exact} vs {brute}"
                    );
                }
            }
        }
    }

    #[test]
    fn hyperbola_measure_is_the_textbook_formula() {
        for &r in &[1e-1, 1e-3, 1e-5] {
            let exact = monomial_sublevel_exact(1, 1, r).unwrap();
            assert!((exact - (r - r * r.ln())).abs() < 1e-15);
        }
        // x^2 y^2 reduces to the hyperbola at sqrt(r)
        for &r in &[1e-2f64, 1e-4] {
            let s = r.sqrt();
            let exact = monomial_sublevel_exact(2, 2, r).unwrap();
            assert!((exact - (s - s * s.ln())).abs() < 1e-15);
        }
    }

    #[test]
    fn slab_measure_is_sharp_to_a_millionth() {
        // f = x at r = 0.3: the measure is exactly 0.3 and a modest budget
        // already brackets it to < 1e-6
        let f = |x: f64, _: f64| x;
        let est =
            measure_or_bracket(&f, &Region::unit_square(), 0.3, Method::AdaptiveDet, 5_000_000, 0)
                .unwrap();
        assert!(est.uncertainty < 1e-6, "{}", est.uncertainty);
        assert!((est.measure - 0.3).abs() <= est.uncertainty);
    }

    #[test]
    fn quadtree_brackets_contain_the_exact_measure() {
        for &(a, b) in &[(1u32, 1u32), (2, 1), (2, 2), (4, 3)] {
            for &r in &[1e-2, 1e-4] {
                let f = monomial_fn(a, b);
                let est =
                    measure_or_bracket(&f, &Region::unit_square(), r, Method::AdaptiveDet, 600_000, 0)
                        .unwrap();
                let exact = monomial_sublevel_exact(a, b, r).unwrap();
                assert!(
                    (est.measure - exact).abs() <= est.uncertainty,
                    "a={a} b={b} r={r}: {} ± {} vs {exact}",
                    est.measure,
                    est.uncertainty
                );
                assert!(est.uncertainty <= 0.1 * exact.max(1e-3));
            }
        }
    }

    #[test]
    fn measures_grow_with_the_threshold() {
        let f = monomial_fn(2, 1);
        let rs = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1];
        let ests: Vec<SublevelEstimate> = rs
            .iter()
            .map(|&r| {
                measure_or_bracket(&f, &Region::unit_square(), r, Method::AdaptiveDet, 300_000, 0)
                    .unwrap()
            })
            .collect();
        for pair in ests.windows(2) {
            assert!(pair[0].measure - pair[0].uncertainty <= pair[1].measure + pair[1].uncertainty);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_the_exact_value() {
        let f = monomial_fn(2, 2);
        let r = 1e-3;
        let est =
            measure_sublevel(&f, &Region::unit_square(), r, Method::MonteCarlo, 400_000, 42).unwrap();
        let exact = monomial_sublevel_exact(2, 2, r).unwrap();
        // uncertainty is the 99% half-width = 2.5758 sigma; allow 3 sigma
        assert!(
            (est.measure - exact).abs() <= est.uncertainty * (3.0 / 2.5758),
            "{} ± {} vs {exact}",
            est.measure,
            est.uncertainty
        );
        assert!(est.uncertainty > 0.0);
    }

    #[test]
    fn det_and_monte_carlo_brackets_overlap_on_oscillatory_phases() {
        // |S| < r for each corpus phase: the two methods must agree within
        // 3 sigma plus the deterministic bracket width
        let corpus: [&[[i64; 4]]; 7] = [
            &[[2, 0, 1, 1], [0, 2, 1, 1]],
            &[[3, 0, 1, 1], [0, 3, 1, 1]],
            &[[2, 2, 1, 1]],
            &[[3, 3, 1, 1]],
            &[[6, 6, 1, 1]],
            &[[4, 0, 1, 1], [0, 2, 1, 1]],
            &[[3, 0, 1, 1]],
        ];
        for quads in corpus {
            let phase = Phase::from_quadruples(quads, "corpus").unwrap();
            let f = move |x: f64, y: f64| phase.eval(x, y).abs();
            let det =
                measure_or_bracket(&f, &Region::unit_square(), 1e-2, Method::AdaptiveDet, 200_000, 0)
                    .unwrap();
            let mc =
                measure_sublevel(&f, &Region::unit_square(), 1e-2, Method::MonteCarlo, 160_000, 11)
                    .unwrap();
            let slack = det.uncertainty + mc.uncertainty * (3.0 / 2.5758);
            assert!((det.measure - mc.measure).abs() <= slack, "{det:?} vs {mc:?}");
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_seed_sensitive() {
        let f = monomial_fn(1, 1);
        let run = |seed| {
            measure_sublevel(&f, &Region::unit_square(), 1e-2, Method::MonteCarlo, 50_000, seed)
                .unwrap()
        };
        assert_eq!(run(7).measure, run(7).measure);
        assert_ne!(run(7).measure, run(8).measure);
    }

    #[test]
    fn exhausted_budgets_still_return_a_valid_bracket() {
        let f = monomial_fn(1, 1);
        let err = measure_sublevel(&f, &Region::unit_square(), 1e-3, Method::AdaptiveDet, 60, 0);
        match err {
            Err(Error::SublevelBudget { estimate }) => {
                let exact = monomial_sublevel_exact(1, 1, 1e-3).unwrap();
                assert!((estimate.measure - exact).abs() <= estimate.uncertainty);
            }
            other => panic!("expected a budget error, got {other:?}"),
        }
    }

    #[test]
    fn thresholds_outside_the_contract_are_rejected() {
        let f = monomial_fn(1, 1);
        for &r in &[0.5, 0.7, 0.0, -1e-3] {
            assert!(
                measure_sublevel(&f, &Region::unit_square(), r, Method::AdaptiveDet, 1000, 0).is_err()
            );
        }
    }

    #[test]
    fn wedge_regions_halve_the_symmetric_measure() {
        // {xy < r} is swap-symmetric, so its mass below the diagonal is half
        let f = monomial_fn(1, 1);
        let wedge = Wedge::above_axis(1.0, 1.0, Rational64::new(1, 1)).unwrap();
        let est =
            measure_or_bracket(&f, &Region::Wedge(wedge), 1e-2, Method::AdaptiveDet, 400_000, 0)
                .unwrap();
        let exact = 0.5 * monomial_sublevel_exact(1, 1, 1e-2).unwrap();
        assert!((est.measure - exact).abs() <= est.uncertainty);
    }

    #[test]
    fn fitting_the_hyperbola_recovers_epsilon_one_with_a_log() {
        let samples: Vec<SublevelEstimate> = (0..10)
            .map(|k| {
                let r = 1e-6 * 1e5f64.powf(k as f64 / 9.0);
                SublevelEstimate {
                    r,
                    measure: monomial_sublevel_exact(1, 1, r).unwrap(),
                    uncertainty: 0.0,
                    method: Method::AdaptiveDet,
                }
            })
            .collect();
        let fit = fit_sublevel_law(&samples).unwrap();
        assert!((fit.epsilon_hat - 1.0).abs() < 0.05, "{}", fit.epsilon_hat);
        assert_eq!(fit.m_hat, 1);
        assert!(fit.n_points == 10);
    }

    #[test]
    fn fitting_plain_power_laws_drops_the_log() {
        // slab x^2: measure = sqrt(r) exactly, so (1/2, 0)
        let samples: Vec<SublevelEstimate> = (0..8)
            .map(|k| {
                let r = 1e-6 * 1e5f64.powf(k as f64 / 7.0);
                SublevelEstimate {
                    r,
                    measure: monomial_sublevel_exact(2, 0, r).unwrap(),
                    uncertainty: 0.0,
                    method: Method::AdaptiveDet,
                }
            })
            .collect();
        let fit = fit_sublevel_law(&samples).unwrap();
        assert!((fit.epsilon_hat - 0.5).abs() < 1e-9);
        assert_eq!(fit.m_hat, 0);
    }

    #[test]
    fn fitting_the_squared_hyperbola_keeps_the_log() {
        let samples: Vec<SublevelEstimate> = (0..10)
            .map(|k| {
                let r = 1e-7 * 1e6f64.powf(k as f64 / 9.0);
                SublevelEstimate {
                    r,
                    measure: monomial_sublevel_exact(2, 2, r).unwrap(),
                    uncertainty: 0.0,
                    method: Method::AdaptiveDet,
                }
            })
            .collect();
        let fit = fit_sublevel_law(&samples).unwrap();
        assert!((fit.epsilon_hat - 0.5).abs() < 0.05, "{}", fit.epsilon_hat);
        assert_eq!(fit.m_hat, 1);
    }

    #[test]
    fn sublevel_fits_demand_enough_data() {
        let mk = |r: f64| SublevelEstimate {
            r,
            measure: r,
            uncertainty: 0.0,
            method: Method::AdaptiveDet,
        };
        let few: Vec<_> = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1].iter().map(|&r| mk(r)).collect();
        assert!(matches!(fit_sublevel_law(&few), Err(Error::InsufficientData(_))));
        let narrow: Vec<_> = (0..8).map(|k| mk(1e-3 * 10f64.powf(k as f64 / 7.0))).collect();
        assert!(matches!(fit_sublevel_law(&narrow), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn wedge_trend_check_accepts_the_true_law_and_rejects_a_dropped_log() {
        let wedge = Wedge::above_axis(1.0, 1.0, Rational64::new(1, 1)).unwrap();
        let rs: Vec<f64> = (0..8).map(|k| 1e-5 * 1e4f64.powf(k as f64 / 7.0)).collect();
        let good = DecayLaw { epsilon: Rational64::new(1, 1), m: 1, c: None };
        let rep = lemma41_check(&wedge, Rational64::new(1, 1), 1, &good, &rs, 600_000).unwrap();
        assert!(rep.pass, "upper {}", rep.trend.upper);

        let no_log = DecayLaw { epsilon: Rational64::new(1, 1), m: 0, c: None };
        let rep = lemma41_check(&wedge, Rational64::new(1, 1), 1, &no_log, &rs, 600_000).unwrap();
        assert!(!rep.pass, "upper {}", rep.trend.upper);
    }

    #[test]
    fn slab_laws_stay_bounded_and_too_strong_laws_diverge() {
        let wedge = Wedge::above_axis(1.0, 1.0, Rational64::new(1, 1)).unwrap();
        let rs: Vec<f64> = (0..8).map(|k| 1e-5 * 1e4f64.powf(k as f64 / 7.0)).collect();
        // pure x^3 against (1/3, 0): the wedge ratio decays, hence bounded
        let slab_law = DecayLaw { epsilon: Rational64::new(1, 3), m: 0, c: None };
        let rep = lemma41_check(&wedge, Rational64::new(3, 1), 0, &slab_law, &rs, 400_000).unwrap();
        assert!(rep.pass);
        // overclaiming epsilon by 0.2 makes the normalized ratio diverge
        let strong = DecayLaw { epsilon: Rational64::new(7, 10), m: 1, c: None };
        let rep = lemma41_check(&wedge, Rational64::new(2, 1), 2, &strong, &rs, 400_000).unwrap();
        assert!(!rep.pass, "upper {}", rep.trend.upper);
    }
}
