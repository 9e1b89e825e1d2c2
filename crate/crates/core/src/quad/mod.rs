//! Adaptive tensor quadrature for the oscillatory and damped integrals.
//!
//! The integrals evaluated here are
//!
//! * `T(lambda1, mu1, mu2) = ∬ e^{i(lambda1 S(x,y) + mu1 x + mu2 y)} φ(x,y) dx dy`,
//! * `U(lambda1) = T(lambda1, 0, 0)`, and
//! * the damped variant `R = ∬ e^{-lambda1 S + i(mu1 x + mu2 y)} φ dx dy`
//!   for phases with `S >= 0` on the support of the cutoff.
//!
//! The phases are smooth polynomials, so the only numerical difficulty is
//! oscillation (or, for `R`, a steep exponential wall). The engine splits the
//! support square dyadically, always along the axis with the larger local
//! phase variation, until each panel satisfies
//! `lambda1 * osc(S) + |mu| * diam <= threshold`; a 15-point tensor Kronrod
//! rule is then applied, with the embedded 7-point Gauss rule providing a
//! conservative per-panel error estimate, and panels whose estimate exceeds
//! their share of the tolerance are split further. `abs_error` is the sum of
//! the per-panel estimates plus explicit bounds for panels that were dropped
//! (damped tails) or abandoned (budget exhaustion).
//!
//! The refinement tree is walked in a fixed sequential order with the
//! tolerance halved per child and the unused panel budget of one sibling
//! reclaimed by the next, so results are deterministic and bit-identical for
//! every thread count; callers that want parallelism run independent
//! integrals concurrently. Two further exact reductions keep large-parameter
//! runs affordable: negative `lambda1` maps to the conjugate integral at
//! `(-lambda1, -mu)`, and axes across which the integrand is even (all phase
//! exponents even, matching `mu` component zero) fold the domain in half.

pub mod gk;
pub mod vdc;

pub use vdc::{vdc_check_1d, VdcParams};

use num_complex::Complex64;

use crate::bump::BumpSpec;
use crate::error::Error;
use crate::phase::Phase;
use crate::Result;

use gk::{GAUSS_W, KRONROD_W, NODES};

/// Tuning knobs of the panel engine. The defaults are what every acceptance
/// figure in this crate was calibrated against; `panel_budget` is the number
/// of tensor-rule applications allowed before the engine gives up and reports
/// the best value with `converged = false`.
#[derive(Debug, Clone)]
pub struct QuadConfig {
    /// Maximum number of 15x15 panel evaluations.
    pub panel_budget: u64,
    /// Phase-variation threshold (radians) below which a panel is handed to
    /// the tensor rule.
    pub osc_threshold: f64,
    /// Hard cap on subdivision depth (panel widths shrink by 2^-depth).
    pub max_depth: u32,
    /// Depth limit for handing independent subtrees to worker threads.
    /// The engine currently evaluates subtrees in a fixed sequential order —
    /// unused budget then flows between siblings, which beats any committed
    /// split and makes results trivially independent of the thread count —
    /// so this knob is accepted but inert; parallel callers should instead
    /// run independent integrals concurrently.
    pub parallel_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            panel_budget: 1 << 22,
            osc_threshold: 8.0,
            max_depth: 44,
            parallel_depth: 12,
        }
    }
}

/// Outcome of a 2D integration: the value, a certified-style error estimate
/// (sum of per-panel embedded-rule estimates and dropped-panel bounds), the
/// number of tensor-rule panel evaluations performed, and whether the
/// requested tolerance was met. `converged` implies `abs_error <= tol`.
#[derive(Debug, Clone, Copy)]
pub struct Quad2DResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub panels: u64,
    pub converged: bool,
}

impl Quad2DResult {
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

/// Oscillatory integral `T(lambda1, mu1, mu2)` with default engine settings.
pub fn integrate_t(
    phase: &Phase,
    lambda1: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    tol: f64,
) -> Result<Quad2DResult> {
    integrate_t_with(phase, lambda1, mu1, mu2, bump, tol, &QuadConfig::default())
}

/// Oscillatory integral with explicit engine settings.
pub fn integrate_t_with(
    phase: &Phase,
    lambda1: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Quad2DResult> {
    validate_common(lambda1, mu1, mu2, bump, tol)?;
    // Reduce to lambda1 >= 0 through the conjugation symmetry
    // T(-lambda, -mu) = conj T(lambda, mu), making that identity exact.
    if lambda1 < 0.0 {
        let mut out = integrate_t_with(phase, -lambda1, -mu1, -mu2, bump, tol, cfg)?;
        out.value = out.value.conj();
        return Ok(out);
    }
    let engine = Engine::new(phase, lambda1, mu1, mu2, false, bump, cfg);
    Ok(engine.run(tol, cfg.panel_budget))
}

/// `U(lambda1) = T(lambda1, 0, 0)`.
pub fn integrate_u(phase: &Phase, lambda1: f64, bump: &BumpSpec, tol: f64) -> Result<Quad2DResult> {
    integrate_t(phase, lambda1, 0.0, 0.0, bump, tol)
}

/// `U` with explicit engine settings.
pub fn integrate_u_with(
    phase: &Phase,
    lambda1: f64,
    bump: &BumpSpec,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Quad2DResult> {
    integrate_t_with(phase, lambda1, 0.0, 0.0, bump, tol, cfg)
}

/// Damped integral `R`; requires `lambda1 > 0` and `S >= 0` on the support of
/// the cutoff (verified by sampling; violations beyond `tol` are an error).
/// Panels on which `lambda1 * min S > 46` contribute below the double
/// precision floor and are dropped with their bound added to `abs_error`.
pub fn integrate_r(
    phase: &Phase,
    lambda1: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    tol: f64,
) -> Result<Quad2DResult> {
    integrate_r_with(phase, lambda1, mu1, mu2, bump, tol, &QuadConfig::default())
}

/// `R` with explicit engine settings.
pub fn integrate_r_with(
    phase: &Phase,
    lambda1: f64,
    mu1: f64,
    mu2: f64,
    bump: &BumpSpec,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Quad2DResult> {
    validate_common(lambda1, mu1, mu2, bump, tol)?;
    if lambda1 <= 0.0 {
        return Err(Error::Invalid(format!(
            "damped integral needs lambda1 > 0, got {lambda1}"
        )));
    }
    // sampled nonnegativity check on the support disc
    let rho = bump.rho();
    let n = 64;
    for i in 0..=n {
        for j in 0..=n {
            let x = -rho + 2.0 * rho * i as f64 / n as f64;
            let y = -rho + 2.0 * rho * j as f64 / n as f64;
            if x * x + y * y <= rho * rho {
                let s = phase.eval(x, y);
                if s < -tol {
                    return Err(Error::NegativePhase(s));
                }
            }
        }
    }
    let engine = Engine::new(phase, lambda1, mu1, mu2, true, bump, cfg);
    Ok(engine.run(tol, cfg.panel_budget))
}

/// The evolution kernel `T(t, x1, x2)` sampled at a list of points: the same
/// integral as [`integrate_t`] with `lambda1 = t` and `mu = x`. Only the
/// values are returned; call [`integrate_t`] directly when the per-point
/// error estimates are needed.
pub fn kernel_t_grid(
    phase: &Phase,
    t: f64,
    bump: &BumpSpec,
    xgrid: &[(f64, f64)],
    tol: f64,
) -> Result<Vec<Complex64>> {
    kernel_t_grid_with(phase, t, bump, xgrid, tol, &QuadConfig::default())
}

/// Kernel samples with explicit engine settings.
pub fn kernel_t_grid_with(
    phase: &Phase,
    t: f64,
    bump: &BumpSpec,
    xgrid: &[(f64, f64)],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<Vec<Complex64>> {
    xgrid
        .iter()
        .map(|&(x1, x2)| Ok(integrate_t_with(phase, t, x1, x2, bump, tol, cfg)?.value))
        .collect()
}

fn validate_common(lambda1: f64, mu1: f64, mu2: f64, bump: &BumpSpec, tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Invalid(format!("tolerance must be positive and finite, got {tol}")));
    }
    if !(lambda1.is_finite() && mu1.is_finite() && mu2.is_finite()) {
        return Err(Error::Invalid("integral parameters must be finite".into()));
    }
    if bump.rho() > 1.0 {
        return Err(Error::Invalid(format!(
            "cutoff support radius must be <= 1, got {}",
            bump.rho()
        )));
    }
    Ok(())
}

#[inline]
fn cis(t: f64) -> Complex64 {
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

#[derive(Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    #[inline]
    fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// Componentwise distance from the origin to the rectangle.
    #[inline]
    fn origin_gap(&self) -> (f64, f64) {
        let dx = if self.x0 > 0.0 {
            self.x0
        } else if self.x1 < 0.0 {
            -self.x1
        } else {
            0.0
        };
        let dy = if self.y0 > 0.0 {
            self.y0
        } else if self.y1 < 0.0 {
            -self.y1
        } else {
            0.0
        };
        (dx, dy)
    }

    /// Largest squared radius over the corners.
    #[inline]
    fn max_radius2(&self) -> f64 {
        let mx = self.x0.abs().max(self.x1.abs());
        let my = self.y0.abs().max(self.y1.abs());
        mx * mx + my * my
    }
}

#[derive(Clone, Copy)]
struct NodeOut {
    v: Complex64,
    err: f64,
    panels: u64,
}

impl NodeOut {
    #[inline]
    fn zero() -> Self {
        NodeOut { v: Complex64::new(0.0, 0.0), err: 0.0, panels: 0 }
    }
}

/// Mixed terms beyond this count fall back to direct phase evaluation per
/// node instead of the row/column power cache.
const MAX_FAST_TERMS: usize = 8;

/// Safety factor applied to the 3x3-sampled oscillation so that variation
/// missed between samples is still covered.
const OSC_SAFETY: f64 = 1.5;

struct Engine<'a> {
    /// Terms depending on x only: (exponent, coefficient).
    terms_x: Vec<(i32, f64)>,
    /// Terms depending on y only.
    terms_y: Vec<(i32, f64)>,
    /// Genuinely mixed terms: (x-exponent, y-exponent, coefficient).
    terms_m: Vec<(i32, i32, f64)>,
    lambda: f64,
    mu1: f64,
    mu2: f64,
    damped: bool,
    bump: &'a BumpSpec,
    rho2: f64,
    rho02: f64,
    theta: f64,
    max_depth: u32,
    /// Domain-folding factor from the reflection symmetries of the integrand:
    /// when every phase exponent along an axis is even and the matching
    /// linear parameter vanishes, the integrand is even across that axis and
    /// the integral is computed on the half (or quarter) domain and doubled
    /// per folded axis.
    fold_x: bool,
    fold_y: bool,
}

impl<'a> Engine<'a> {
    fn new(
        phase: &Phase,
        lambda: f64,
        mu1: f64,
        mu2: f64,
        damped: bool,
        bump: &'a BumpSpec,
        cfg: &QuadConfig,
    ) -> Self {
        let mut terms_x = Vec::new();
        let mut terms_y = Vec::new();
        let mut terms_m = Vec::new();
        let mut fold_x = mu1 == 0.0;
        let mut fold_y = mu2 == 0.0;
        for (a, b, c) in phase.terms_f64() {
            fold_x &= a % 2 == 0;
            fold_y &= b % 2 == 0;
            if b == 0 {
                terms_x.push((a as i32, c));
            } else if a == 0 {
                terms_y.push((b as i32, c));
            } else {
                terms_m.push((a as i32, b as i32, c));
            }
        }
        Engine {
            terms_x,
            terms_y,
            terms_m,
            lambda,
            mu1,
            mu2,
            damped,
            bump,
            rho2: bump.rho() * bump.rho(),
            rho02: bump.rho0() * bump.rho0(),
            theta: cfg.osc_threshold,
            max_depth: cfg.max_depth,
            fold_x,
            fold_y,
        }
    }

    #[inline]
    fn eval_s(&self, x: f64, y: f64) -> f64 {
        let mut s = 0.0;
        for &(a, c) in &self.terms_x {
            s += c * x.powi(a);
        }
        for &(b, c) in &self.terms_y {
            s += c * y.powi(b);
        }
        for &(a, b, c) in &self.terms_m {
            s += c * x.powi(a) * y.powi(b);
        }
        s
    }

    fn run(&self, tol: f64, budget: u64) -> Quad2DResult {
        let rho = self.bump.rho();
        let x0 = if self.fold_x { 0.0 } else { -rho };
        let y0 = if self.fold_y { 0.0 } else { -rho };
        let scale = f64::from(1 << (u32::from(self.fold_x) + u32::from(self.fold_y)));
        let root = Rect { x0, x1: rho, y0, y1: rho };
        let out = self.node(root, tol / scale, budget, 0);
        let err = out.err * scale;
        Quad2DResult {
            value: out.v * scale,
            abs_error: err,
            panels: out.panels,
            converged: err <= tol,
        }
    }

    fn node(&self, r: Rect, share: f64, budget: u64, depth: u32) -> NodeOut {
        // entirely outside the cutoff support: exact zero
        let (dx, dy) = r.origin_gap();
        let rmin2 = dx * dx + dy * dy;
        if rmin2 >= self.rho2 {
            return NodeOut::zero();
        }
        // out of budget: bound the panel by its area times the largest
        // possible amplitude and give up on it
        if budget == 0 {
            let bound = r.area() * self.bump.profile(rmin2.sqrt());
            return NodeOut { v: Complex64::new(0.0, 0.0), err: bound, panels: 0 };
        }

        // 3x3 phase samples drive the oscillation criterion, the split-axis
        // choice, the damped drop rule, and the budget routing
        let xs = [r.x0, 0.5 * (r.x0 + r.x1), r.x1];
        let ys = [r.y0, 0.5 * (r.y0 + r.y1), r.y1];
        let mut s = [[0.0f64; 3]; 3];
        let mut smin = f64::INFINITY;
        for i in 0..3 {
            for j in 0..3 {
                let v = self.eval_s(xs[i], ys[j]);
                s[i][j] = v;
                smin = smin.min(v);
            }
        }
        let mut osc_x = 0.0f64;
        for j in 0..3 {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..3 {
                lo = lo.min(s[i][j]);
                hi = hi.max(s[i][j]);
            }
            osc_x = osc_x.max(hi - lo);
        }
        let mut osc_y = 0.0f64;
        for i in 0..3 {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for j in 0..3 {
                lo = lo.min(s[i][j]);
                hi = hi.max(s[i][j]);
            }
            osc_y = osc_y.max(hi - lo);
        }

        if self.damped {
            // The integrand is at most e^{-lambda (smin - variation)} here;
            // below the double-precision floor the panel cannot matter.
            let smin_adj = smin - (osc_x + osc_y);
            if self.lambda * smin_adj > 46.0 {
                let bound = r.area() * (-self.lambda * smin_adj).exp();
                return NodeOut { v: Complex64::new(0.0, 0.0), err: bound, panels: 0 };
            }
        }

        let wx = r.x1 - r.x0;
        let wy = r.y1 - r.y0;
        let crit_x = OSC_SAFETY * self.lambda * osc_x + self.mu1.abs() * wx;
        let crit_y = OSC_SAFETY * self.lambda * osc_y + self.mu2.abs() * wy;

        if crit_x + crit_y <= self.theta || depth >= self.max_depth {
            let (k, g) = self.eval_panel(r);
            let est = (k - g).norm();
            if est <= share || depth >= self.max_depth || budget <= 1 {
                return NodeOut { v: k, err: est, panels: 1 };
            }
            // The oscillation is already resolved, so the leftover rule error
            // comes from the shape of the integrand (usually the cutoff
            // transition): halve the longer side. Splitting by phase
            // variation here would stall on one-dimensional phases.
            return self.split(r, share, budget, depth, wx >= wy, &s, 1);
        }
        let split_x = if crit_x == crit_y { wx >= wy } else { crit_x > crit_y };
        self.split(r, share, budget, depth, split_x, &s, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn split(
        &self,
        r: Rect,
        share: f64,
        budget: u64,
        depth: u32,
        split_x: bool,
        s: &[[f64; 3]; 3],
        spent: u64,
    ) -> NodeOut {
        let wx = r.x1 - r.x0;
        let wy = r.y1 - r.y0;

        let (ra, rb, osc_a, osc_b, mu_half) = if split_x {
            let xm = 0.5 * (r.x0 + r.x1);
            let ra = Rect { x1: xm, ..r };
            let rb = Rect { x0: xm, ..r };
            let mut oa = 0.0f64;
            let mut ob = 0.0f64;
            for j in 0..3 {
                oa = oa.max((s[1][j] - s[0][j]).abs());
                ob = ob.max((s[2][j] - s[1][j]).abs());
            }
            (ra, rb, oa, ob, self.mu1.abs() * 0.5 * wx)
        } else {
            let ym = 0.5 * (r.y0 + r.y1);
            let ra = Rect { y1: ym, ..r };
            let rb = Rect { y0: ym, ..r };
            let mut oa = 0.0f64;
            let mut ob = 0.0f64;
            for i in 0..3 {
                oa = oa.max((s[i][1] - s[i][0]).abs());
                ob = ob.max((s[i][2] - s[i][1]).abs());
            }
            (ra, rb, oa, ob, self.mu2.abs() * 0.5 * wy)
        };

        let sa = 0.5 * share;
        let sb = share - sa;
        let rem = budget - spent;

        // Need-driven budget flow: the first child may spend everything but a
        // one-panel reserve, and the second reclaims whatever was actually
        // left. Children run in a fixed order, so values, error estimates and
        // panel counts never depend on scheduling. The child whose estimated
        // variation is larger goes second: if the budget genuinely binds, the
        // cheap child resolves fully and the reserve-starved remainder lands
        // on the side that could not have been finished anyway.
        let wa = OSC_SAFETY * self.lambda * osc_a + mu_half;
        let wb = OSC_SAFETY * self.lambda * osc_b + mu_half;
        let reserve = u64::from(rem > 1);
        let (a, b) = if wa <= wb {
            let a = self.node(ra, sa, rem - reserve, depth + 1);
            let b = self.node(rb, sb, rem - a.panels, depth + 1);
            (a, b)
        } else {
            let b = self.node(rb, sb, rem - reserve, depth + 1);
            let a = self.node(ra, sa, rem - b.panels, depth + 1);
            (a, b)
        };
        NodeOut { v: a.v + b.v, err: a.err + b.err, panels: a.panels + b.panels + spent }
    }

    /// Tensor 15-point rule with embedded 7-point rule on one panel. Returns
    /// `(kronrod, gauss)` including the area scaling.
    fn eval_panel(&self, r: Rect) -> (Complex64, Complex64) {
        let cx = 0.5 * (r.x0 + r.x1);
        let hx = 0.5 * (r.x1 - r.x0);
        let cy = 0.5 * (r.y0 + r.y1);
        let hy = 0.5 * (r.y1 - r.y0);
        let scale = hx * hy;

        let mut xs = [0.0f64; 15];
        let mut ys = [0.0f64; 15];
        for i in 0..15 {
            xs[i] = cx + hx * NODES[i];
            ys[i] = cy + hy * NODES[i];
        }

        // flat cutoff on the whole panel?
        let plateau = r.max_radius2() <= self.rho02;

        // per-axis complex factors from the pure-x / pure-y phase parts
        let mut ux = [Complex64::new(0.0, 0.0); 15];
        let mut vy = [Complex64::new(0.0, 0.0); 15];
        for i in 0..15 {
            let mut sx = 0.0;
            for &(a, c) in &self.terms_x {
                sx += c * xs[i].powi(a);
            }
            ux[i] = if self.damped {
                cis(self.mu1 * xs[i]) * (-self.lambda * sx).exp()
            } else {
                cis(self.lambda * sx + self.mu1 * xs[i])
            };
            let mut sy = 0.0;
            for &(b, c) in &self.terms_y {
                sy += c * ys[i].powi(b);
            }
            vy[i] = if self.damped {
                cis(self.mu2 * ys[i]) * (-self.lambda * sy).exp()
            } else {
                cis(self.lambda * sy + self.mu2 * ys[i])
            };
        }

        // fully separable flat panel: both rules factor into axis sums
        if self.terms_m.is_empty() && plateau {
            let (kx, gx) = rule_sums(&ux);
            let (ky, gy) = rule_sums(&vy);
            return (kx * ky * scale, gx * gy * scale);
        }

        // row/column power cache for the mixed terms
        let nm = self.terms_m.len();
        let fast_mixed = nm > 0 && nm <= MAX_FAST_TERMS;
        let mut px = [[0.0f64; 15]; MAX_FAST_TERMS];
        let mut py = [[0.0f64; 15]; MAX_FAST_TERMS];
        if fast_mixed {
            for (t, &(a, b, c)) in self.terms_m.iter().enumerate() {
                for i in 0..15 {
                    px[t][i] = c * xs[i].powi(a);
                    py[t][i] = ys[i].powi(b);
                }
            }
        }
        let mut x2 = [0.0f64; 15];
        let mut y2 = [0.0f64; 15];
        for i in 0..15 {
            x2[i] = xs[i] * xs[i];
            y2[i] = ys[i] * ys[i];
        }

        let mut acc_k = Complex64::new(0.0, 0.0);
        let mut acc_g = Complex64::new(0.0, 0.0);
        for j in 0..15 {
            let vj = vy[j];
            let mut sk = Complex64::new(0.0, 0.0);
            let mut sg = Complex64::new(0.0, 0.0);
            for i in 0..15 {
                let mut z = ux[i] * vj;
                if nm > 0 {
                    let sm = if fast_mixed {
                        let mut acc = 0.0;
                        for t in 0..nm {
                            acc += px[t][i] * py[t][j];
                        }
                        acc
                    } else {
                        let mut acc = 0.0;
                        for &(a, b, c) in &self.terms_m {
                            acc += c * xs[i].powi(a) * ys[j].powi(b);
                        }
                        acc
                    };
                    if self.damped {
                        z *= (-self.lambda * sm).exp();
                    } else {
                        z *= cis(self.lambda * sm);
                    }
                }
                if !plateau {
                    z *= self.bump.profile_fast((x2[i] + y2[j]).sqrt());
                }
                sk += z * KRONROD_W[i];
                sg += z * GAUSS_W[i];
            }
            acc_k += sk * KRONROD_W[j];
            acc_g += sg * GAUSS_W[j];
        }
        (acc_k * scale, acc_g * scale)
    }
}

#[inline]
fn rule_sums(u: &[Complex64; 15]) -> (Complex64, Complex64) {
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for i in 0..15 {
        k += u[i] * KRONROD_W[i];
        g += u[i] * GAUSS_W[i];
    }
    (k, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn phase(q: &[[i64; 4]], label: &str) -> Phase {
        Phase::from_quadruples(q, label).unwrap()
    }

    fn x2y2() -> Phase {
        phase(&[[2, 0, 1, 1], [0, 2, 1, 1]], "x^2+y^2")
    }

    /// Radial oracle for the cutoff mass: 2 pi * integral of r * profile(r).
    fn bump_mass(b: &BumpSpec) -> f64 {
        let n = 200_000;
        let h = b.rho() / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            // Simpson on [kh, (k+1)h]
            let r0 = k as f64 * h;
            let r1 = r0 + h;
            let rm = r0 + 0.5 * h;
            acc += (r0 * b.profile(r0) + 4.0 * rm * b.profile(rm) + r1 * b.profile(r1)) * h / 6.0;
        }
        2.0 * PI * acc
    }

    #[test]
    fn zero_parameters_give_the_cutoff_mass() {
        let b = BumpSpec::default();
        let out = integrate_t(&x2y2(), 0.0, 0.0, 0.0, &b, 1e-10).unwrap();
        assert!(out.converged);
        let oracle = bump_mass(&b);
        assert!(
            (out.value.re - oracle).abs() <= out.abs_error + 1e-9,
            "mass {} vs oracle {oracle}",
            out.value.re
        );
        assert!(out.value.im.abs() <= out.abs_error);
        assert!(out.value.re > 0.0);
    }

    #[test]
    fn stationary_phase_magnitude_for_circular_phase() {
        // |T(lambda, 0, 0)| -> pi / lambda for S = x^2 + y^2
        let b = BumpSpec::default();
        let out = integrate_t(&x2y2(), 1e3, 0.0, 0.0, &b, 1e-8).unwrap();
        assert!(out.converged, "err {}", out.abs_error);
        let ratio = out.value.norm() * 1e3 / PI;
        assert!((ratio - 1.0).abs() <= 0.05, "ratio {ratio}");
        // the leading term is (pi/lambda) * i: the integral is mostly imaginary
        assert!(out.value.im > out.value.re.abs());
    }

    #[test]
    fn stationary_phase_magnitude_at_ten_thousand() {
        let b = BumpSpec::default();
        let out = integrate_u(&x2y2(), 1e4, &b, 1e-8).unwrap();
        assert!(out.converged, "err {}", out.abs_error);
        let ratio = out.value.norm() * 1e4 / PI;
        assert!((ratio - 1.0).abs() <= 0.05, "ratio {ratio}");
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        let b = BumpSpec::default();
        let p = phase(&[[3, 0, 1, 1], [0, 3, 1, 1]], "x^3+y^3");
        let plus = integrate_t(&p, 250.0, 3.0, -7.0, &b, 1e-9).unwrap();
        let minus = integrate_t(&p, -250.0, -3.0, 7.0, &b, 1e-9).unwrap();
        assert_eq!(plus.value.re, minus.value.re);
        assert_eq!(plus.value.im, -minus.value.im);
        assert_eq!(plus.panels, minus.panels);
    }

    #[test]
    fn halving_tolerance_moves_value_within_error_sum() {
        let b = BumpSpec::default();
        let p = phase(&[[3, 0, 1, 1], [0, 3, 1, 1]], "x^3+y^3");
        let coarse = integrate_t(&p, 300.0, 0.0, 0.0, &b, 2e-7).unwrap();
        let fine = integrate_t(&p, 300.0, 0.0, 0.0, &b, 1e-7).unwrap();
        let diff = (coarse.value - fine.value).norm();
        assert!(
            diff <= coarse.abs_error + fine.abs_error,
            "diff {diff} vs {} + {}",
            coarse.abs_error,
            fine.abs_error
        );
    }

    #[test]
    fn additivity_in_the_cutoff_against_brute_force() {
        // T with cutoff phi1 + T with cutoff phi2 = integral against phi1+phi2
        let b1 = BumpSpec::new(0.5, 0.25).unwrap();
        let b2 = BumpSpec::new(0.4, 0.1).unwrap();
        let p = x2y2();
        let lam = 40.0;
        let t1 = integrate_t(&p, lam, 0.0, 0.0, &b1, 1e-10).unwrap();
        let t2 = integrate_t(&p, lam, 0.0, 0.0, &b2, 1e-10).unwrap();
        // brute tensor Simpson on the combined integrand
        let n = 1200usize;
        let h = 1.0 / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let x = -0.5 + i as f64 * h;
            let wxs = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            for j in 0..=n {
                let y = -0.5 + j as f64 * h;
                let wys = if j == 0 || j == n {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let amp = b1.eval(x, y) + b2.eval(x, y);
                if amp != 0.0 {
                    acc += cis(lam * (x * x + y * y)) * (wxs * wys * amp);
                }
            }
        }
        let brute = acc * (h * h / 9.0);
        let sum = t1.value + t2.value;
        assert!(
            (sum - brute).norm() <= t1.abs_error + t2.abs_error + 1e-7,
            "sum {sum} vs brute {brute}"
        );
    }

    #[test]
    fn mu_decay_exponent_near_minus_one_for_nondegenerate_phase() {
        // Along the ray mu1 = 0.4 lambda the phase lambda(x^2+y^2) + mu1 x
        // has its stationary point at x = -0.2, inside the cutoff plateau, so
        // the full-rank stationary phase law |T| ~ pi/lambda applies.
        let b = BumpSpec::default();
        let p = x2y2();
        let lams = [64.0, 128.0, 256.0, 512.0];
        let vals: Vec<f64> = lams
            .iter()
            .map(|&l| integrate_t(&p, l, 0.4 * l, 0.0, &b, 1e-9).unwrap().value.norm())
            .collect();
        let slope = (vals[3].ln() - vals[0].ln()) / (lams[3].ln() - lams[0].ln());
        assert!((-1.1..=-0.9).contains(&slope), "slope {slope}");
        let ratio = vals[3] * lams[3] / PI;
        assert!((ratio - 1.0).abs() <= 0.05, "scaled magnitude {ratio}");
    }

    #[test]
    fn damped_gaussian_magnitude() {
        // R(lambda) -> pi / lambda for S = x^2 + y^2 once e^{-lambda r^2}
        // concentrates inside the plateau
        let b = BumpSpec::default();
        let out = integrate_r(&x2y2(), 200.0, 0.0, 0.0, &b, 1e-10).unwrap();
        assert!(out.converged);
        let ratio = out.value.re * 200.0 / PI;
        assert!((ratio - 1.0).abs() <= 0.05, "ratio {ratio}");
        assert!(out.value.im.abs() <= out.abs_error + 1e-12);
    }

    #[test]
    fn damped_integral_tends_to_cutoff_mass_as_lambda_vanishes() {
        let b = BumpSpec::default();
        let out = integrate_r(&x2y2(), 1e-9, 0.0, 0.0, &b, 1e-10).unwrap();
        assert!((out.value.re - bump_mass(&b)).abs() < 1e-6);
    }

    #[test]
    fn damped_integral_rejects_sign_changing_phase() {
        let b = BumpSpec::default();
        let p = phase(&[[3, 0, 1, 1], [0, 3, 1, 1]], "x^3+y^3");
        match integrate_r(&p, 10.0, 0.0, 0.0, &b, 1e-8) {
            Err(Error::NegativePhase(s)) => assert!(s < 0.0),
            other => panic!("expected NegativePhase, got {other:?}"),
        }
    }

    #[test]
    fn damped_law_for_degenerate_monomial_is_flat_after_scaling() {
        // |R(lambda)| * lambda^{1/2} / ln lambda stays in a narrow band
        let b = BumpSpec::default();
        let p = phase(&[[2, 2, 1, 1]], "x^2y^2");
        let mut stats = Vec::new();
        for &lam in &[1e2, 1e3, 1e4] {
            let out = integrate_r(&p, lam, 0.0, 0.0, &b, 1e-10).unwrap();
            assert!(out.converged);
            stats.push(out.value.norm() * lam.sqrt() / lam.ln());
        }
        let hi = stats.iter().cloned().fold(f64::MIN, f64::max);
        let lo = stats.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi / lo <= 2.5, "band [{lo}, {hi}]");
    }

    #[test]
    fn exhausted_budget_reports_not_converged() {
        let b = BumpSpec::default();
        let cfg = QuadConfig { panel_budget: 16, ..QuadConfig::default() };
        let out = integrate_t_with(&x2y2(), 1e4, 0.0, 0.0, &b, 1e-8, &cfg).unwrap();
        assert!(!out.converged);
        assert!(out.panels <= 16);
        assert!(out.abs_error > 1e-8);
        assert!(out.value.norm().is_finite());
    }

    #[test]
    fn kernel_grid_matches_direct_integrals() {
        let b = BumpSpec::default();
        let p = x2y2();
        let pts = [(0.0, 0.0), (3.0, -1.0)];
        let vals = kernel_t_grid(&p, 5.0, &b, &pts, 1e-9).unwrap();
        for (v, &(x1, x2)) in vals.iter().zip(&pts) {
            let direct = integrate_t(&p, 5.0, x1, x2, &b, 1e-9).unwrap().value;
            assert_eq!(*v, direct);
        }
        // t = 0 at the origin is the cutoff mass
        let at0 = kernel_t_grid(&p, 0.0, &b, &[(0.0, 0.0)], 1e-9).unwrap()[0];
        assert!((at0.re - bump_mass(&b)).abs() < 1e-7);
    }

    #[test]
    fn kernel_time_decay_along_the_diagonal_of_checks() {
        // |T(t,0)| * t stays near pi for the circular phase once t clears the
        // pre-asymptotic range (below t ~ 30 the cutoff transition still
        // contributes at leading order).
        let b = BumpSpec::default();
        let p = x2y2();
        for &t in &[30.0, 100.0, 1000.0] {
            let v = kernel_t_grid(&p, t, &b, &[(0.0, 0.0)], 1e-9).unwrap()[0];
            let r = v.norm() * t / PI;
            assert!((r - 1.0).abs() <= 0.05, "t = {t}: ratio {r}");
        }
    }

    #[test]
    fn kernel_space_decay_is_square_root_bounded_along_a_ray() {
        let b = BumpSpec::default();
        let p = x2y2();
        let t = 64.0;
        let mut scaled = Vec::new();
        for &s in &[32.0, 64.0, 128.0, 256.0] {
            let v = kernel_t_grid(&p, t, &b, &[(s, 0.0)], 1e-11).unwrap()[0];
            scaled.push(v.norm() * s.sqrt());
        }
        // witness constant from the stationary-phase size pi/t * sqrt(32)
        for (i, v) in scaled.iter().enumerate() {
            assert!(*v <= 0.5, "ray point {i} scaled value {v}");
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let b = BumpSpec::default();
        assert!(integrate_t(&x2y2(), 1.0, 0.0, 0.0, &b, 0.0).is_err());
        assert!(integrate_t(&x2y2(), f64::NAN, 0.0, 0.0, &b, 1e-8).is_err());
        assert!(integrate_r(&x2y2(), 0.0, 0.0, 0.0, &b, 1e-8).is_err());
        assert!(integrate_r(&x2y2(), -1.0, 0.0, 0.0, &b, 1e-8).is_err());
        let wide = BumpSpec::new(1.5, 0.5).unwrap();
        assert!(integrate_t(&x2y2(), 1.0, 0.0, 0.0, &wide, 1e-8).is_err());
    }
}
