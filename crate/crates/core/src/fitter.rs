//! Decay-law measurement: λ-grid scans of the oscillatory integral, least
//! squares fits of the scanned decay, and sup-statistic boundedness checks
//! for the three a-priori bounds
//!
//! ```text
//! sup_λ  |T(λ, μ)| · |μ|^{1/2}                  (nondegenerate directions)
//! sup_μ  |T(λ, μ)| · λ^ε / (log λ)^m            (small Newton distance)
//!        |R(λ, μ)| · max(λ^ε / (log λ)^m, |μ|)  (damped integral)
//! ```
//!
//! A scan is a plain table of rows `(λ₁, μ₁, μ₂, |T|, error, |μ|/λ₁)` plus
//! enough metadata (phase label, bump, configuration digest) to reproduce it;
//! rows whose error estimate exceeds 1% of the value are kept but flagged
//! unusable, and every consumer here ignores them. Boundedness is
//! operationalized as a one-sided log-log slope test at 95% confidence
//! ([`stats::trend_bounded`]): the sup statistic may not grow faster than
//! slope 0.05 across the scanned decades.
//!
//! Sup statistics that fall below the measurement floor are not silently
//! dropped: such grid points enter the report as upper bounds (value plus
//! error of every candidate row), are excluded from the slope fit, and must
//! stay below twice the largest measured statistic for the check to pass.
//!
//! Scans are sequential in λ so that an exhausted panel budget can demote the
//! remaining (strictly costlier) rows to token probes; the boundedness checks
//! parallelize over their outer grid with one fixed task per grid point, so
//! reports are byte-identical regardless of thread count.

use rayon::prelude::*;

use crate::bump::BumpSpec;
use crate::error::Error;
use crate::newton::{theorem12_applicable, DecayLaw};
use crate::phase::Phase;
use crate::quad::{self, QuadConfig};
use crate::stats::{self, TrendReport};
use crate::Result;

/// Relative error above which a scan row is unusable for fitting.
const USABLE_REL_ERROR: f64 = 0.01;

/// Panel budget for scan rows past the first budget exhaustion. Cost grows
/// with λ, so once a row fails to converge the remaining rows would burn the
/// full budget for nothing; they are still probed and recorded (flagged
/// unusable by their error) but only with this token budget.
const TOKEN_BUDGET: u64 = 1 << 16;

/// One measured integral value on a scan grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub lambda1: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// `|T|` (or `|R|` for damped scans).
    pub abs_value: f64,
    /// Quadrature error estimate for [`ScanRow::abs_value`].
    pub abs_error: f64,
    /// `|μ| / λ₁`, the regime coordinate separating μ-dominated from
    /// λ-dominated rows.
    pub regime_ratio: f64,
}

impl ScanRow {
    /// Whether the row is accurate enough to enter a fit: positive value with
    /// error at most 1% of it.
    pub fn usable(&self) -> bool {
        self.abs_value > 0.0 && self.abs_error <= USABLE_REL_ERROR * self.abs_value
    }
}

/// A reproducible scan: rows plus the inputs that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub phase_label: String,
    pub bump: BumpSpec,
    /// Digest of every input that influenced the rows (phase terms, bump,
    /// grid, μ, tolerance, engine settings).
    pub config_hash: String,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    /// Rows accurate enough for fitting.
    pub fn usable_rows(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.usable())
    }

    /// CSV serialization: two comment lines (config digest and phase
    /// metadata), a header, then one row per line. Floats use the shortest
    /// representation that round-trips, so [`ScanReport::from_csv`] restores
    /// the exact bits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# config={} version={}\n", self.config_hash, crate::VERSION));
        out.push_str(&format!(
            "# phase={} rho={} rho0={}\n",
            self.phase_label,
            self.bump.rho(),
            self.bump.rho0()
        ));
        out.push_str("lambda1,mu1,mu2,abs_value,abs_error,regime_ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.lambda1, r.mu1, r.mu2, r.abs_value, r.abs_error, r.regime_ratio
            ));
        }
        out
    }

    /// Parse the format written by [`ScanReport::to_csv`].
    pub fn from_csv(text: &str) -> Result<ScanReport> {
        let mut lines = text.lines();
        let cfg_line = lines.next().ok_or(Error::Invalid("empty scan CSV".into()))?;
        let config_hash = cfg_line
            .strip_prefix("# config=")
            .and_then(|rest| rest.split_whitespace().next())
            .ok_or(Error::Invalid("scan CSV must start with '# config=<hash>'".into()))?
            .to_string();
        let phase_line = lines
            .next()
            .and_then(|l| l.strip_prefix("# phase="))
            .ok_or(Error::Invalid("scan CSV needs a '# phase=' line".into()))?;
        // parse from the right so the label itself may contain '='
        let (rest, rho0) = split_trailing_field(phase_line, " rho0=")?;
        let (label, rho) = split_trailing_field(rest, " rho=")?;
        let header = lines.next().ok_or(Error::Invalid("scan CSV missing header".into()))?;
        if header != "lambda1,mu1,mu2,abs_value,abs_error,regime_ratio" {
            return Err(Error::Invalid(format!("unexpected scan CSV header: {header}")));
        }
        let mut rows = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Invalid(format!("bad scan CSV row '{line}': {e}")))?;
            if fields.len() != 6 {
                return Err(Error::Invalid(format!(
                    "scan CSV rows have 6 fields, got {}",
                    fields.len()
                )));
            }
            rows.push(ScanRow {
                lambda1: fields[0],
                mu1: fields[1],
                mu2: fields[2],
                abs_value: fields[3],
                abs_error: fields[4],
                regime_ratio: fields[5],
            });
        }
        Ok(ScanReport {
            phase_label: label.to_string(),
            bump: BumpSpec::new(rho, rho0)?,
            config_hash,
            rows,
        })
    }
}

fn split_trailing_field<'a>(line: &'a str, key: &str) -> Result<(&'a str, f64)> {
    let at = line
        .rfind(key)
        .ok_or_else(|| Error::Invalid(format!("scan CSV phase line missing '{key}'")))?;
    let value = line[at + key.len()..]
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Invalid(format!("bad value after '{key}': {e}")))?;
    Ok((&line[..at], value))
}

/// FNV-1a digest of the canonical description of a computation's inputs,
/// printed as 16 hex digits. Collisions are irrelevant here: the digest only
/// tags artifacts for "same inputs" comparison, it has no security role.
pub fn config_digest(parts: &[String]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in part.as_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        // field separator so ["ab","c"] and ["a","bc"] differ
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn digest_for(
    phase: &Phase,
    bump: &BumpSpec,
    grid: &[f64],
    mu: (f64, f64),
    tol: f64,
    cfg: &QuadConfig,
) -> String {
    config_digest(&[
        phase.label().to_string(),
        format!("{:?}", phase.terms_f64()),
        format!("{:?} {:?}", bump.rho(), bump.rho0()),
        format!("{grid:?}"),
        format!("{:?} {:?}", mu.0, mu.1),
        format!("{tol:?}"),
        format!("{} {:?} {}", cfg.panel_budget, cfg.osc_threshold, cfg.max_depth),
    ])
}

pub(crate) fn validate_log_grid(grid: &[f64], min_len: usize, what: &str) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::Invalid(format!(
            "{what} needs at least {min_len} points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Invalid(format!("{what} must be finite and positive")));
    }
    let mut ratios = Vec::with_capacity(grid.len() - 1);
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Invalid(format!("{what} must be strictly increasing")));
        }
        ratios.push(pair[1] / pair[0]);
    }
    let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let rmax = ratios.iter().cloned().fold(0.0, f64::max);
    // log-spaced up to modest jitter: successive ratios within 25%
    if rmax > 1.25 * rmin {
        return Err(Error::Invalid(format!(
            "{what} must be log-spaced (successive ratios vary by {:.2}x)",
            rmax / rmin
        )));
    }
    Ok(())
}

/// Scan `|T(λ, μ)|` over a log-spaced λ grid at fixed μ.
///
/// Rows are computed in increasing λ order. A row whose extrapolated cost
/// (quadratic in λ from the last converged row) exceeds the panel budget, or
/// any row after the first one that actually exhausts the budget, runs with a
/// token budget only (see [`TOKEN_BUDGET`]); such rows stay in the report so
/// the CSV shape is grid-independent, flagged unusable by their error
/// estimate unless they converge anyway.
pub fn scan_lambda(
    phase: &Phase,
    bump: &BumpSpec,
    lambda_grid: &[f64],
    mu: (f64, f64),
    tol: f64,
) -> Result<ScanReport> {
    scan_lambda_with(phase, bump, lambda_grid, mu, tol, &QuadConfig::default())
}

/// [`scan_lambda`] with explicit engine settings.
pub fn scan_lambda_with(
    phase: &Phase,
    bump: &BumpSpec,
    lambda_grid: &[f64],
    mu: (f64, f64),
    tol: f64,
    cfg: &QuadConfig,
) -> Result<ScanReport> {
    validate_log_grid(lambda_grid, 8, "lambda grid")?;
    if !(mu.0.is_finite() && mu.1.is_finite()) {
        return Err(Error::Invalid(format!("mu must be finite, got {mu:?}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mu_mag = mu.0.hypot(mu.1);
    let mut rows = Vec::with_capacity(lambda_grid.len());
    let mut exhausted = false;
    // cost of the last row that converged, for predictive demotion
    let mut last_full: Option<(f64, u64)> = None;
    for &lam in lambda_grid {
        let mut row_cfg = cfg.clone();
        let predicted_over = last_full.is_some_and(|(l0, n0)| {
            // panel count grows at most quadratically in lambda; rows whose
            // extrapolated cost exceeds the budget are demoted up front
            // instead of burning the budget to learn the same thing
            n0 as f64 * (lam / l0).powi(2) > 1.25 * cfg.panel_budget as f64
        });
        if exhausted || predicted_over {
            row_cfg.panel_budget = cfg.panel_budget.min(TOKEN_BUDGET);
        }
        let out = quad::integrate_t_with(phase, lam, mu.0, mu.1, bump, tol, &row_cfg)?;
        if out.converged {
            last_full = Some((lam, out.panels.max(1)));
        } else if !predicted_over {
            exhausted = true;
        }
        rows.push(ScanRow {
            lambda1: lam,
            mu1: mu.0,
            mu2: mu.1,
            abs_value: out.value.norm(),
            abs_error: out.abs_error,
            regime_ratio: mu_mag / lam,
        });
    }
    Ok(ScanReport {
        phase_label: phase.label().to_string(),
        bump: *bump,
        config_hash: digest_for(phase, bump, lambda_grid, mu, tol, cfg),
        rows,
    })
}

/// Result of fitting `|T| ≈ C · λ^{-ε} · (log λ)^m` to a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub epsilon_hat: f64,
    /// 0 or 1; chosen by residual comparison, ties going to 0.
    pub m_hat: u8,
    pub c_hat: f64,
    /// Root-mean-square residual of `log |T|` under the winning model.
    pub rms_residual: f64,
    /// Number of usable rows that entered the fit.
    pub n_points: usize,
}

/// Fit the decay model to the usable rows of a scan.
///
/// Requires at least 8 usable rows spanning at least 2.5 decades of λ; both
/// limits guard against fitting the pre-asymptotic regime, where the power
/// law has not yet separated from its logarithmic correction.
pub fn fit_decay(report: &ScanReport) -> Result<FitResult> {
    let rows: Vec<&ScanRow> = report.usable_rows().collect();
    if rows.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} usable rows of {}, need at least 8",
            rows.len(),
            report.rows.len()
        )));
    }
    let lo = rows.iter().map(|r| r.lambda1).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.lambda1).fold(0.0, f64::max);
    let decades = (hi / lo).log10();
    if decades < 2.5 - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "usable rows span {decades:.2} decades, need at least 2.5"
        )));
    }
    let params: Vec<f64> = rows.iter().map(|r| r.lambda1).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.abs_value).collect();
    let fit = stats::fit_decay_model(&params, &values)?;
    if !(fit.epsilon > 0.0) {
        return Err(Error::Invalid(format!(
            "scan shows no decay: fitted exponent {:.3}",
            fit.epsilon
        )));
    }
    Ok(FitResult {
        epsilon_hat: fit.epsilon,
        m_hat: fit.m,
        c_hat: fit.c,
        rms_residual: fit.rms,
        n_points: fit.n,
    })
}

/// One grid point of a sup statistic.
#[derive(Debug, Clone, Copy)]
pub struct SupPoint {
    /// The outer grid coordinate (|μ| or λ₁ depending on the check).
    pub parameter: f64,
    /// The scaled sup when `measured`, otherwise an upper bound for it.
    pub statistic: f64,
    /// Inner coordinate at which the sup (or the bound) was attained.
    pub at: f64,
    /// False when every candidate row sat below the measurement floor; the
    /// point is then excluded from the trend fit.
    pub measured: bool,
}

/// Outcome of a boundedness check: the sup statistic per grid point and the
/// one-sided slope test over the measured ones.
#[derive(Debug, Clone)]
pub struct BoundednessReport {
    pub points: Vec<SupPoint>,
    pub trend: TrendReport,
    /// Largest measured statistic.
    pub max_statistic: f64,
    /// Trend bounded and no upper bound of an unmeasured point exceeds twice
    /// the largest measured statistic.
    pub pass: bool,
}

/// A measured integral magnitude: `(value, error, usable)`.
type Measured = (f64, f64, bool);

fn usable_pair(v: f64, e: f64) -> bool {
    v > 0.0 && e <= USABLE_REL_ERROR * v
}

/// A measurement together with the cost facts of its first
/// (budget-representative) run, for predictive demotion along a column.
struct Sample {
    meas: Measured,
    converged: bool,
    panels: u64,
}

/// Evaluate `|T|`, once more with a value-proportional tolerance if the first
/// pass converged but the requested tolerance was too loose relative to the
/// (small) value to make the row usable.
fn measure_t(
    phase: &Phase,
    lam: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Measured> {
    Ok(measure_t_sample(phase, lam, mu1, mu2, bump, tol, cfg)?.meas)
}

/// [`measure_t`] keeping the first run's convergence flag and panel count.
fn measure_t_sample(
    phase: &Phase,
    lam: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Sample> {
    let out = quad::integrate_t_with(phase, lam, mu1, mu2, bump, tol, cfg)?;
    let (converged, panels) = (out.converged, out.panels);
    let meas =
        refine(out, tol, |tol2| quad::integrate_t_with(phase, lam, mu1, mu2, bump, tol2, cfg))?;
    Ok(Sample { meas, converged, panels })
}

/// Damped counterpart of [`measure_t`].
fn measure_r(
    phase: &Phase,
    lam: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Measured> {
    let out = quad::integrate_r_with(phase, lam, mu1, mu2, bump, tol, cfg)?;
    refine(out, tol, |tol2| quad::integrate_r_with(phase, lam, mu1, mu2, bump, tol2, cfg))
}

fn refine(
    out: quad::Quad2DResult,
    tol: f64,
    rerun: impl Fn(f64) -> Result<quad::Quad2DResult>,
) -> Result<Measured> {
    let v = out.value.norm();
    let mut best = (v, out.abs_error, usable_pair(v, out.abs_error));
    if !best.2 && out.converged {
        // A proportional tolerance below ~1e-13 sits at the rounding floor of
        // the panel sums; the retry would burn the whole budget and still
        // fail, so values that small stay unusable and enter as bounds.
        let tol2 = v * 0.2 * USABLE_REL_ERROR;
        if tol2 >= 1e-13 && tol2 < tol {
            let again = rerun(tol2)?;
            let v2 = again.value.norm();
            if usable_pair(v2, again.abs_error) {
                best = (v2, again.abs_error, true);
            } else if again.abs_error < best.1 {
                best = (v2, again.abs_error, false);
            }
        }
    }
    Ok(best)
}

/// Collapse the rows competing for one sup into a [`SupPoint`].
///
/// `rows` holds `(inner coordinate, measurement)`; `scale` multiplies the
/// winning magnitude into the statistic. The point counts as measured only
/// when some row is usable *and* no row's upper bound `value + error` exceeds
/// twice the usable maximum — otherwise an inaccurate row could hide the true
/// sup and the honest answer is the bound.
fn sup_point(parameter: f64, rows: &[(f64, Measured)], scale: f64) -> SupPoint {
    let mut vmax: Option<(f64, f64)> = None; // (value, at)
    let mut bound = (0.0f64, rows.first().map_or(0.0, |r| r.0)); // (value+error, at)
    for &(at, (v, e, usable)) in rows {
        if usable && vmax.map_or(true, |(bv, _)| v > bv) {
            vmax = Some((v, at));
        }
        if v + e > bound.0 {
            bound = (v + e, at);
        }
    }
    match vmax {
        Some((v, at)) if bound.0 <= 2.0 * v => {
            SupPoint { parameter, statistic: v * scale, at, measured: true }
        }
        _ => SupPoint { parameter, statistic: bound.0 * scale, at: bound.1, measured: false },
    }
}

/// Fit the trend over measured points and assemble the verdict.
fn finish_report(points: Vec<SupPoint>) -> Result<BoundednessReport> {
    let measured: Vec<&SupPoint> = points.iter().filter(|p| p.measured).collect();
    if measured.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} of {} sup statistics were measurable",
            measured.len(),
            points.len()
        )));
    }
    let params: Vec<f64> = measured.iter().map(|p| p.parameter).collect();
    let values: Vec<f64> = measured.iter().map(|p| p.statistic).collect();
    let trend = stats::trend_bounded(&params, &values, 0.05, 0.95)?;
    let max_statistic = values.iter().cloned().fold(0.0, f64::max);
    let bounds_ok = points
        .iter()
        .filter(|p| !p.measured)
        .all(|p| p.statistic <= 2.0 * max_statistic);
    Ok(BoundednessReport { points, trend, max_statistic, pass: trend.bounded && bounds_ok })
}

fn unit_direction(mu_direction: (f64, f64)) -> Result<(f64, f64)> {
    let norm = mu_direction.0.hypot(mu_direction.1);
    if !norm.is_finite() || norm <= 0.0 {
        return Err(Error::Invalid(format!(
            "mu direction must be a nonzero finite vector, got {mu_direction:?}"
        )));
    }
    Ok((mu_direction.0 / norm, mu_direction.1 / norm))
}

/// Check `sup_λ |T(λ, μ)| · |μ|^{1/2}` for growth along a |μ| grid.
///
/// The λ candidates are *relative*: for each |μ| the sup is taken over
/// `λ = multiplier · |μ|` with the given multipliers. For a fixed-coefficient
/// phase the λ attaining the sup scales linearly with |μ| (stationary points
/// sit at fixed locations in the support when λ/|μ| is fixed), so a relative
/// window tracks the sup across the whole grid at bounded cost, where any
/// absolute grid dense enough for small |μ| would miss it at large |μ|.
pub fn check_thm11(
    phase: &Phase,
    bump: &BumpSpec,
    lambda_over_mu: &[f64],
    mu_grid: &[f64],
    mu_direction: (f64, f64),
    tol: f64,
    cfg: &QuadConfig,
) -> Result<BoundednessReport> {
    validate_log_grid(mu_grid, 3, "mu grid")?;
    if lambda_over_mu.is_empty() || lambda_over_mu.iter().any(|m| !m.is_finite() || *m <= 0.0) {
        return Err(Error::Invalid("lambda/mu multipliers must be positive and finite".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let dir = unit_direction(mu_direction)?;
    let points: Vec<SupPoint> = mu_grid
        .par_iter()
        .map(|&mu| -> Result<SupPoint> {
            let mut rows = Vec::with_capacity(lambda_over_mu.len());
            for &mult in lambda_over_mu {
                let lam = mult * mu;
                let m = measure_t(phase, lam, mu * dir.0, mu * dir.1, bump, tol, cfg)?;
                rows.push((lam, m));
            }
            Ok(sup_point(mu, &rows, mu.sqrt()))
        })
        .collect::<Result<Vec<_>>>()?;
    finish_report(points)
}

/// Two-regime verdict of [`check_thm12`]: rows with `|μ|/λ ≤ δ` and rows
/// above it are tested separately, since the bound's content differs across
/// the regime boundary (λ-driven decay vs μ-driven decay).
#[derive(Debug, Clone)]
pub struct RegimeReport {
    pub below: BoundednessReport,
    pub above: BoundednessReport,
    pub delta: f64,
    pub pass: bool,
}

/// Check `sup_μ |T(λ, μ)| · λ^ε / (log λ)^m` for growth along a λ grid,
/// split into μ-regimes at `|μ|/λ = delta`.
///
/// Only decay laws with `ε ≤ 1/3` are full-range in μ; for larger ε the
/// uniform-in-μ bound is not available and the check refuses to run
/// ([`Error::NotApplicable`]). μ candidates are relative (`|μ| = fraction·λ`)
/// for the same cost reason as in [`check_thm11`]; both regimes must be
/// populated. All λ must exceed 2 so the log factor is bounded away from 0.
#[allow(clippy::too_many_arguments)]
pub fn check_thm12(
    phase: &Phase,
    bump: &BumpSpec,
    law: &DecayLaw,
    lambda_grid: &[f64],
    mu_fractions: &[f64],
    mu_direction: (f64, f64),
    delta: f64,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<RegimeReport> {
    if !theorem12_applicable(law) {
        return Err(Error::NotApplicable(format!(
            "uniform bound needs epsilon <= 1/3, law has epsilon = {}",
            law.epsilon
        )));
    }
    validate_log_grid(lambda_grid, 3, "lambda grid")?;
    if lambda_grid[0] <= 2.0 {
        return Err(Error::Invalid(format!(
            "lambda grid must stay above 2, starts at {}",
            lambda_grid[0]
        )));
    }
    if mu_fractions.is_empty() || mu_fractions.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::Invalid("mu fractions must be finite and nonnegative".into()));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Invalid(format!("regime split delta must be positive, got {delta}")));
    }
    let below_idx: Vec<usize> =
        (0..mu_fractions.len()).filter(|&j| mu_fractions[j] <= delta).collect();
    let above_idx: Vec<usize> =
        (0..mu_fractions.len()).filter(|&j| mu_fractions[j] > delta).collect();
    if below_idx.is_empty() || above_idx.is_empty() {
        return Err(Error::Invalid(format!(
            "mu fractions must populate both sides of delta = {delta}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let dir = unit_direction(mu_direction)?;
    let eps = law.epsilon_f64();
    let m = i32::from(law.m);
    // One column per fraction, walked in increasing lambda with the same
    // predictive demotion as a scan: the expensive rows sit at the top of
    // each column, and once a column's cost trend rules them out they run
    // with a token budget and enter the sup as (unusable) bounds.
    let columns: Vec<Vec<(f64, Measured)>> = mu_fractions
        .par_iter()
        .map(|&f| -> Result<Vec<(f64, Measured)>> {
            let mut col = Vec::with_capacity(lambda_grid.len());
            let mut exhausted = false;
            let mut last_full: Option<(f64, u64)> = None;
            for &lam in lambda_grid {
                let mu = f * lam;
                let mut row_cfg = cfg.clone();
                let predicted_over = last_full.is_some_and(|(l0, n0)| {
                    n0 as f64 * (lam / l0).powi(2) > 1.25 * cfg.panel_budget as f64
                });
                if exhausted || predicted_over {
                    row_cfg.panel_budget = cfg.panel_budget.min(TOKEN_BUDGET);
                }
                let s =
                    measure_t_sample(phase, lam, mu * dir.0, mu * dir.1, bump, tol, &row_cfg)?;
                if s.converged {
                    last_full = Some((lam, s.panels.max(1)));
                } else if !predicted_over {
                    exhausted = true;
                }
                col.push((mu, s.meas));
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    let run = |idx: &[usize]| -> Result<BoundednessReport> {
        let points: Vec<SupPoint> = lambda_grid
            .iter()
            .enumerate()
            .map(|(i, &lam)| {
                let rows: Vec<(f64, Measured)> = idx.iter().map(|&j| columns[j][i]).collect();
                let scale = lam.powf(eps) / lam.ln().powi(m);
                sup_point(lam, &rows, scale)
            })
            .collect();
        finish_report(points)
    };
    let below_report = run(&below_idx)?;
    let above_report = run(&above_idx)?;
    let pass = below_report.pass && above_report.pass;
    Ok(RegimeReport { below: below_report, above: above_report, delta, pass })
}

/// Two-branch verdict of [`check_lemma51`] for the damped integral.
#[derive(Debug, Clone)]
pub struct Lemma51Report {
    /// `sup_μ |R| · λ^ε / (log λ)^m` along the λ grid.
    pub lambda_branch: BoundednessReport,
    /// `sup_λ |R| · |μ|` along the μ grid.
    pub mu_branch: BoundednessReport,
    pub pass: bool,
}

/// Check the hybrid bound `|R(λ, μ)| · max(λ^ε / (log λ)^m, |μ|) ≤ C` on a
/// λ × μ grid of the damped integral.
///
/// The max splits into two sup statistics, each tested for growth along its
/// own axis: the λ branch additionally includes the μ = 0 column (where `|R|`
/// is largest), the μ branch uses only μ > 0 (at μ = 0 its statistic
/// vanishes). Requires `S ≥ 0` on the support (enforced by the damped
/// integrator) and λ > 2 throughout.
pub fn check_lemma51(
    phase: &Phase,
    bump: &BumpSpec,
    law: &DecayLaw,
    lambda_grid: &[f64],
    mu_grid: &[f64],
    mu_direction: (f64, f64),
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Lemma51Report> {
    validate_log_grid(lambda_grid, 3, "lambda grid")?;
    validate_log_grid(mu_grid, 3, "mu grid")?;
    if lambda_grid[0] <= 2.0 {
        return Err(Error::Invalid(format!(
            "lambda grid must stay above 2, starts at {}",
            lambda_grid[0]
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let dir = unit_direction(mu_direction)?;
    let eps = law.epsilon_f64();
    let m = i32::from(law.m);
    // one damped evaluation per (λ, μ) cell, μ = 0 column included
    let mus: Vec<f64> = std::iter::once(0.0).chain(mu_grid.iter().cloned()).collect();
    let table: Vec<Vec<(f64, Measured)>> = lambda_grid
        .par_iter()
        .map(|&lam| -> Result<Vec<(f64, Measured)>> {
            let mut row = Vec::with_capacity(mus.len());
            for &mu in &mus {
                let meas = measure_r(phase, lam, mu * dir.0, mu * dir.1, bump, tol, cfg)?;
                row.push((mu, meas));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let lambda_points: Vec<SupPoint> = lambda_grid
        .iter()
        .zip(&table)
        .map(|(&lam, row)| sup_point(lam, row, lam.powf(eps) / lam.ln().powi(m)))
        .collect();
    let mu_points: Vec<SupPoint> = mu_grid
        .iter()
        .enumerate()
        .map(|(j, &mu)| {
            let col: Vec<(f64, Measured)> =
                lambda_grid.iter().zip(&table).map(|(&lam, row)| (lam, row[j + 1].1)).collect();
            sup_point(mu, &col, mu)
        })
        .collect();
    let lambda_branch = finish_report(lambda_points)?;
    let mu_branch = finish_report(mu_points)?;
    let pass = lambda_branch.pass && mu_branch.pass;
    Ok(Lemma51Report { lambda_branch, mu_branch, pass })
}
