//! Verification harness for monomialization claims on curved wedges: after a
//! shear `(x, y) -> (x, ±y + ψ(x))`, a phase should look like a single
//! monomial `d·x^α y^β` between the wedge edges (same order of magnitude for
//! the function and its derivatives), and rescaling `y = x^M v` should expose
//! a non-vanishing principal polynomial `r(v)` with a strictly smaller
//! remainder. The checks here sample those statements numerically; wedges and
//! shears are supplied by the caller, never constructed.

use num::{BigRational, FromPrimitive, One, ToPrimitive, Zero};

use crate::error::Error;
use crate::newton::Rational64;
use crate::phase::{Phase, MAX_EXPONENT};
use crate::stats;
use crate::Result;

/// Shear `(x, y) -> (x, sign·y + ψ(x))` with `ψ(x) = Σ cⱼ x^{eⱼ}`,
/// exponents rational, at least 1, strictly increasing, and sharing a common
/// denominator of at most 64 (so that `ψ(x^N)` is a genuine power series).
#[derive(Debug, Clone)]
pub struct ShearMap {
    sign: i8,
    psi: Vec<(Rational64, f64)>,
}

impl ShearMap {
    pub fn new(sign: i8, psi: Vec<(Rational64, f64)>) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Invalid(format!("shear sign must be +1 or -1, got {sign}")));
        }
        let mut lcm: i64 = 1;
        let mut prev: Option<Rational64> = None;
        for &(e, c) in &psi {
            if e < Rational64::one() {
                return Err(Error::Invalid(format!("shear exponent {e} is below 1")));
            }
            if let Some(p) = prev {
                if e <= p {
                    return Err(Error::Invalid(format!(
                        "shear exponents must increase strictly ({p} then {e})"
                    )));
                }
            }
            if !c.is_finite() {
                return Err(Error::Invalid("shear coefficient must be finite".into()));
            }
            let d = *e.denom();
            lcm = lcm / gcd(lcm, d) * d;
            if lcm > 64 {
                return Err(Error::Invalid(format!(
                    "shear exponent denominators need a common denominator <= 64, got {lcm}"
                )));
            }
            prev = Some(e);
        }
        let psi = psi.into_iter().filter(|&(_, c)| c != 0.0).collect();
        Ok(ShearMap { sign, psi })
    }

    /// The identity change of variables.
    pub fn identity() -> Self {
        ShearMap { sign: 1, psi: Vec::new() }
    }

    pub fn sign(&self) -> f64 {
        self.sign as f64
    }

    pub fn terms(&self) -> &[(Rational64, f64)] {
        &self.psi
    }

    /// `ψ(x)`; fractional exponents make this meaningful for `x > 0` only.
    pub fn psi(&self, x: f64) -> f64 {
        self.psi
            .iter()
            .map(|&(e, c)| {
                if e.is_integer() {
                    c * x.powi(*e.numer() as i32)
                } else {
                    c * x.powf(e.to_f64().unwrap_or(f64::NAN))
                }
            })
            .sum()
    }

    /// Shear with `ψ` negated (undoes `self` when `sign = +1`).
    pub fn negated(&self) -> Self {
        ShearMap { sign: self.sign, psi: self.psi.iter().map(|&(e, c)| (e, -c)).collect() }
    }

    /// True when every exponent is an integer, so compositions stay polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.psi.iter().all(|(e, _)| e.is_integer())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Lower edge of a wedge: either the x-axis or a strictly higher-order curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowerEdge {
    Zero,
    Power { h: f64, m_exp: Rational64 },
}

/// Curved wedge `{0 < x <= b, lower(x) < y < H·x^M}` with `M >= 1` and, when
/// present, a lower edge `h·x^m` of strictly higher order (`m > M`).
#[derive(Debug, Clone)]
pub struct Wedge {
    b: f64,
    h_upper: f64,
    m_upper: Rational64,
    lower: LowerEdge,
}

impl Wedge {
    pub fn new(b: f64, h_upper: f64, m_upper: Rational64, lower: LowerEdge) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::Invalid(format!("wedge needs 0 < b, got {b}")));
        }
        if !(h_upper.is_finite() && h_upper > 0.0) {
            return Err(Error::Invalid(format!("upper edge coefficient must be positive, got {h_upper}")));
        }
        if m_upper < Rational64::one() {
            return Err(Error::Invalid(format!("upper edge exponent must be >= 1, got {m_upper}")));
        }
        if let LowerEdge::Power { h, m_exp } = lower {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Invalid(format!("lower edge coefficient must be positive, got {h}")));
            }
            if m_exp <= m_upper {
                return Err(Error::Invalid(format!(
                    "lower edge exponent {m_exp} must exceed the upper edge exponent {m_upper}"
                )));
            }
        }
        let wedge = Wedge { b, h_upper, m_upper, lower };
        // emptiness is checked on samples: edges may still cross inside (0, b]
        for k in 0..=64 {
            let x = b * 1e-4f64.powf(1.0 - k as f64 / 64.0);
            if wedge.lower_at(x) >= wedge.upper_at(x) {
                return Err(Error::DegenerateWedge(x));
            }
        }
        Ok(wedge)
    }

    /// Convenience constructor for `{0 < y < H x^M}`.
    pub fn above_axis(b: f64, h_upper: f64, m_upper: Rational64) -> Result<Self> {
        Wedge::new(b, h_upper, m_upper, LowerEdge::Zero)
    }

    pub fn x_max(&self) -> f64 {
        self.b
    }

    pub fn upper_coefficient(&self) -> f64 {
        self.h_upper
    }

    pub fn upper_exponent(&self) -> Rational64 {
        self.m_upper
    }

    pub fn lower(&self) -> LowerEdge {
        self.lower
    }

    pub fn upper_at(&self, x: f64) -> f64 {
        self.h_upper * rat_pow(x, self.m_upper)
    }

    pub fn lower_at(&self, x: f64) -> f64 {
        match self.lower {
            LowerEdge::Zero => 0.0,
            LowerEdge::Power { h, m_exp } => h * rat_pow(x, m_exp),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && x <= self.b && y >= self.lower_at(x) && y <= self.upper_at(x)
    }

    /// Exact interval tests for an axis-aligned cell against the wedge: both
    /// edges are monotone increasing in `x`, so intersection and containment
    /// reduce to corner comparisons. `intersects` treats boundary contact as
    /// empty when the overlap has zero area (`x1 <= 0`).
    pub fn cell_state(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> (bool, bool) {
        let xlo = x0.max(0.0);
        let xhi = x1.min(self.b);
        let intersects =
            x1 > 0.0 && xlo <= xhi && y0 <= self.upper_at(xhi) && y1 >= self.lower_at(xlo);
        let inside = x0 >= 0.0
            && x1 <= self.b
            && y1 <= self.upper_at(x0)
            && y0 >= self.lower_at(x1);
        (intersects, inside)
    }

    /// Axis-aligned bounding box `[0, b] x [0, y_max]`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        (0.0, self.b, 0.0, self.upper_at(self.b))
    }
}

fn rat_pow(x: f64, e: Rational64) -> f64 {
    if e.is_integer() {
        x.powi(*e.numer() as i32)
    } else {
        x.powf(e.to_f64().unwrap_or(f64::NAN))
    }
}

/// A phase composed with a shear: always usable as an evaluator, and carrying
/// the exact composed polynomial whenever the shear was polynomial and the
/// expansion stayed within the exponent cap.
#[derive(Debug, Clone)]
pub struct ShearedPhase {
    base: Phase,
    shear: ShearMap,
    exact: Option<Phase>,
}

impl ShearedPhase {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.exact {
            Some(p) => p.eval(x, y),
            None => self.base.eval(x, self.shear.sign() * y + self.shear.psi(x)),
        }
    }

    /// The composed polynomial, when the composition is exact.
    pub fn exact(&self) -> Option<&Phase> {
        self.exact.as_ref()
    }

    pub fn base(&self) -> &Phase {
        &self.base
    }

    /// `∂ₓˡ∂ᵧᵐ (f∘η)` — analytic when the composition is exact, nested
    /// central differences otherwise. Steps are relative (`h ∝ x`, and the
    /// local wedge height for y) because the quantities compared against are
    /// powers of x; high orders widen the step to balance rounding error.
    pub fn deriv_eval(&self, l: u32, m: u32, x: f64, y: f64, yscale: f64) -> f64 {
        if let Some(p) = &self.exact {
            return p.partial_derivative(l, m).eval(x, y);
        }
        let order = l + m;
        let h_rel = if order <= 2 { 1e-4 } else { f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) };
        let hx = h_rel * x;
        let hy = h_rel * yscale.max(f64::MIN_POSITIVE);
        let fy = |u: f64| -> f64 {
            central_difference(|v| self.eval(u, v), y, hy, m)
        };
        central_difference(fy, x, hx, l)
    }
}

/// Central finite difference of the given order (0 through 4).
fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64, order: u32) -> f64 {
    match order {
        0 => f(x),
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        4 => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
        _ => f64::NAN,
    }
}

/// Compose a phase with a shear. The result always evaluates; it additionally
/// carries the exact expanded polynomial when the shear is polynomial and all
/// exponents stay within the representable cap.
pub fn apply_shear(phase: &Phase, shear: &ShearMap) -> ShearedPhase {
    let exact = if shear.is_polynomial() { compose_exact(phase, shear) } else { None };
    ShearedPhase { base: phase.clone(), shear: shear.clone(), exact }
}

type RawTerm = (u32, u32, BigRational);

fn poly_mul(a: &[RawTerm], b: &[RawTerm]) -> Option<Vec<RawTerm>> {
    let mut out: Vec<RawTerm> = Vec::new();
    for (aa, ab, ac) in a {
        for (ba, bb, bc) in b {
            let (na, nb) = (aa + ba, ab + bb);
            if na > MAX_EXPONENT || nb > MAX_EXPONENT {
                return None;
            }
            let c = ac * bc;
            match out.iter_mut().find(|(ta, tb, _)| *ta == na && *tb == nb) {
                Some((_, _, tc)) => *tc += c,
                None => out.push((na, nb, c)),
            }
        }
    }
    out.retain(|(_, _, c)| !c.is_zero());
    Some(out)
}

fn compose_exact(phase: &Phase, shear: &ShearMap) -> Option<Phase> {
    // p(x, y) = sign·y + ψ(x), expanded exactly over rationals
    let mut p: Vec<RawTerm> = vec![(0, 1, BigRational::from_integer(shear.sign.into()))];
    for &(e, c) in shear.terms() {
        let exp = *e.numer();
        if exp < 0 || exp as u32 > MAX_EXPONENT {
            return None;
        }
        p.push((exp as u32, 0, BigRational::from_f64(c)?));
    }
    let mut out: Vec<RawTerm> = Vec::new();
    for term in phase.terms() {
        // c·x^α·p(x,y)^β
        let mut acc: Vec<RawTerm> = vec![(0, 0, BigRational::one())];
        for _ in 0..term.beta {
            acc = poly_mul(&acc, &p)?;
        }
        for (a, b, c) in acc {
            if a + term.alpha > MAX_EXPONENT {
                return None;
            }
            out.push((a + term.alpha, b, c * term.coeff()));
        }
    }
    Phase::from_exact_terms(out, &format!("{} (sheared)", phase.label()), true).ok()
}

/// Min/max of the normalized derivative over the sample set, one row per
/// derivative order.
#[derive(Debug, Clone, Copy)]
pub struct OrderRatio {
    pub l: u32,
    pub m: u32,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub pass: bool,
}

/// Outcome of a comparability check: does `f∘η` behave like `d·x^α y^β`
/// (value and derivatives) across the wedge?
#[derive(Debug, Clone)]
pub struct MonomializationReport {
    pub alpha_i: Rational64,
    pub beta_i: u32,
    /// Estimated monomial constant (midpoint of the order-(0,0) ratio band).
    pub d_i: f64,
    pub orders: Vec<OrderRatio>,
    pub pass: bool,
}

pub const DEFAULT_COMPARABILITY_TOL: f64 = 0.35;

/// `check_comparability` with the default relative band of 0.35.
pub fn check_comparability(
    f_eta: &ShearedPhase,
    wedge: &Wedge,
    alpha_i: Rational64,
    beta_i: u32,
    l_max: u32,
    m_max: u32,
    grid: usize,
) -> Result<MonomializationReport> {
    check_comparability_with(f_eta, wedge, alpha_i, beta_i, l_max, m_max, grid, DEFAULT_COMPARABILITY_TOL)
}

/// Estimate `∂ₓˡ∂ᵧᵐ(f∘η) / (x^{α-l} y^{β-m})` over a log-spaced x grid and a
/// proportionally placed y grid inside the wedge, for every order `l <= l_max`,
/// `m <= m_max`. Each order passes when its ratios fit inside a relative band
/// `[r(1-δ), r(1+δ)]` around some common constant, i.e. they are single-signed
/// with `max/min <= (1+δ)/(1-δ)`. When `β = 0` the normalization is by
/// `x^{α-l}` alone.
#[allow(clippy::too_many_arguments)]
pub fn check_comparability_with(
    f_eta: &ShearedPhase,
    wedge: &Wedge,
    alpha_i: Rational64,
    beta_i: u32,
    l_max: u32,
    m_max: u32,
    grid: usize,
    delta_tol: f64,
) -> Result<MonomializationReport> {
    if grid < 16 {
        return Err(Error::Invalid(format!("comparability grid must have >= 16 points, got {grid}")));
    }
    if !(0.0..1.0).contains(&delta_tol) {
        return Err(Error::Invalid(format!("relative band must lie in (0, 1), got {delta_tol}")));
    }
    let alpha_f = alpha_i.to_f64().unwrap_or(f64::NAN);
    if !alpha_f.is_finite() || alpha_f < 0.0 {
        return Err(Error::Invalid(format!("alpha must be a nonnegative rational, got {alpha_i}")));
    }
    if i64::from(l_max) > alpha_i.floor().to_integer() {
        return Err(Error::Invalid(format!("l_max {l_max} exceeds floor(alpha) for alpha = {alpha_i}")));
    }
    if m_max > beta_i {
        return Err(Error::Invalid(format!("m_max {m_max} exceeds beta = {beta_i}")));
    }
    let b = wedge.x_max();
    let xs: Vec<f64> = (0..grid).map(|k| b * 1e-2f64.powf(1.0 - k as f64 / (grid - 1) as f64)).collect();
    const Y_FRACTIONS: [f64; 5] = [0.12, 0.3, 0.5, 0.7, 0.88];
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(xs.len() * Y_FRACTIONS.len());
    for &x in &xs {
        let (lo, hi) = (wedge.lower_at(x), wedge.upper_at(x));
        if !(lo < hi) {
            return Err(Error::DegenerateWedge(x));
        }
        for &t in &Y_FRACTIONS {
            samples.push((x, lo + t * (hi - lo), hi - lo));
        }
    }

    let mut orders = Vec::new();
    let mut all_pass = true;
    let mut d_i = f64::NAN;
    let band = (1.0 + delta_tol) / (1.0 - delta_tol);
    for l in 0..=l_max {
        for m in 0..=m_max {
            let dphase = f_eta.exact().map(|p| p.partial_derivative(l, m));
            let mut rmin = f64::INFINITY;
            let mut rmax = f64::NEG_INFINITY;
            for &(x, y, height) in &samples {
                let d = match &dphase {
                    Some(p) => p.eval(x, y),
                    None => f_eta.deriv_eval(l, m, x, y, height),
                };
                let mut denom = x.powf(alpha_f - l as f64);
                if beta_i > 0 {
                    denom *= y.powi((beta_i - m) as i32);
                }
                let ratio = d / denom;
                rmin = rmin.min(ratio);
                rmax = rmax.max(ratio);
            }
            let pass = rmin.is_finite()
                && rmax.is_finite()
                && rmin * rmax > 0.0
                && rmax.abs().max(rmin.abs()) <= band * rmax.abs().min(rmin.abs());
            if l == 0 && m == 0 {
                d_i = 0.5 * (rmin + rmax);
            }
            all_pass &= pass;
            orders.push(OrderRatio { l, m, ratio_min: rmin, ratio_max: rmax, pass });
        }
    }
    Ok(MonomializationReport { alpha_i, beta_i, d_i, orders, pass: all_pass })
}

/// Polynomial in one variable, used for principal parts `r(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyY {
    terms: Vec<(u32, f64)>,
}

impl PolyY {
    pub fn new(raw: Vec<(u32, f64)>) -> Self {
        let mut terms: Vec<(u32, f64)> = Vec::new();
        for (e, c) in raw {
            match terms.iter_mut().find(|(te, _)| *te == e) {
                Some((_, tc)) => *tc += c,
                None => terms.push((e, c)),
            }
        }
        terms.retain(|&(_, c)| c != 0.0);
        terms.sort_by_key(|&(e, _)| e);
        PolyY { terms }
    }

    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.terms.iter().map(|&(e, c)| c * y.powi(e as i32)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Principal part of a phase under the weighting `x^α y^β -> α + M β`.
#[derive(Debug, Clone)]
pub struct PrincipalPart {
    /// Smallest weighted degree over the terms.
    pub alpha_min: Rational64,
    /// `r(y) = Σ_{α+Mβ = α_min} c_{αβ} y^β`, so `f(x, x^M y) ≈ x^{α_min} r(y)`.
    pub r: PolyY,
    /// Gap to the second-smallest weighted degree, when any term is left over.
    pub delta: Option<Rational64>,
}

/// Extract the principal polynomial of `f` along the scaling `y = x^M v`.
pub fn principal_part(f_eta_phase: &Phase, m_weight: Rational64) -> Result<PrincipalPart> {
    if m_weight <= Rational64::zero() {
        return Err(Error::Invalid(format!("scaling exponent must be positive, got {m_weight}")));
    }
    let mut keyed: Vec<(Rational64, u32, f64)> = Vec::new();
    for t in f_eta_phase.terms() {
        let key = Rational64::from_integer(i64::from(t.alpha)) + m_weight * Rational64::from_integer(i64::from(t.beta));
        keyed.push((key, t.beta, t.coeff_f64()));
    }
    let alpha_min = keyed.iter().map(|&(k, _, _)| k).min().expect("phases are nonempty");
    let r = PolyY::new(
        keyed.iter().filter(|&&(k, _, _)| k == alpha_min).map(|&(_, b, c)| (b, c)).collect(),
    );
    let delta = keyed.iter().map(|&(k, _, _)| k).filter(|&k| k > alpha_min).min().map(|k| k - alpha_min);
    Ok(PrincipalPart { alpha_min, r, delta })
}

/// Per-order outcome of the principal/remainder split check.
#[derive(Debug, Clone)]
pub struct Lemma22Report {
    pub pass: bool,
    /// True when the remainder vanished identically on all samples.
    pub zero_residual: bool,
    /// For each x-derivative order: the fitted excess exponent of the
    /// remainder over `x^{α-l}` (None when that order's remainder vanished).
    pub orders: Vec<(u32, Option<f64>)>,
}

/// Verify that `f∘η(x, x^M y) = x^α r(y) + O(x^{α+δ})` with `δ > 0`, for
/// x-derivatives up to `l_max`, after checking that `r` has no roots in
/// `[0, H]`. Remainder exponents are fitted on a log-spaced x grid.
pub fn check_lemma22(
    f_eta: &ShearedPhase,
    wedge: &Wedge,
    r: &PolyY,
    alpha_i: Rational64,
    l_max: u32,
) -> Result<Lemma22Report> {
    if wedge.lower() != LowerEdge::Zero {
        return Err(Error::Invalid("the principal-part check applies to wedges resting on the x-axis".into()));
    }
    if r.is_zero() {
        return Err(Error::Invalid("principal polynomial is identically zero".into()));
    }
    let h_cap = wedge.upper_coefficient();
    if let Some(root) = find_root(r, 0.0, h_cap) {
        return Err(Error::RootInRange(root));
    }
    let alpha_f = alpha_i.to_f64().unwrap_or(f64::NAN);
    let m_f = wedge.upper_exponent().to_f64().unwrap_or(f64::NAN);
    let b = wedge.x_max();
    let xs: Vec<f64> = (0..16).map(|k| b * 1e-3f64.powf(1.0 - k as f64 / 15.0)).collect();
    const V_FRACTIONS: [f64; 4] = [0.15, 0.4, 0.65, 0.9];

    let mut orders: Vec<(u32, Option<f64>)> = Vec::new();
    let mut pass = true;
    let mut any_residual = false;
    for l in 0..=l_max {
        let mut worst: Option<f64> = None;
        let mut order_has_residual = false;
        for &t in &V_FRACTIONS {
            let v = t * h_cap;
            let g = |x: f64| f_eta.eval(x, x.powf(m_f) * v) - x.powf(alpha_f) * r.eval(v);
            let scale = |x: f64| x.powf(alpha_f) * r.eval(v).abs() + f_eta.eval(x, x.powf(m_f) * v).abs();
            let mut lx = Vec::new();
            let mut ly = Vec::new();
            for &x in &xs {
                let h_rel = if l <= 2 { 1e-4 } else { f64::EPSILON.powf(1.0 / (l as f64 + 2.0)) };
                let d = central_difference(&g, x, h_rel * x, l);
                // treat rounding debris of the exact cancellation as zero
                let floor = 1e-11 * scale(x) / (h_rel * x).powi(l as i32);
                if d.abs() > floor.max(1e-300) {
                    lx.push(x.ln());
                    ly.push(d.abs().ln());
                }
            }
            if lx.len() >= 6 {
                order_has_residual = true;
                let fit = stats::linear_fit(&lx, &ly)?;
                let delta_est = fit.slope - (alpha_f - l as f64);
                worst = Some(match worst {
                    Some(w) => w.min(delta_est),
                    None => delta_est,
                });
            }
        }
        if order_has_residual {
            any_residual = true;
            let delta_est = worst.unwrap();
            pass &= delta_est >= 0.05;
            orders.push((l, Some(delta_est)));
        } else {
            orders.push((l, None));
        }
    }
    Ok(Lemma22Report { pass, zero_residual: !any_residual, orders })
}

/// Locate a sign change or near-vanishing of `r` on the half-open interval
/// `(lo, hi]`, refined by bisection; `None` when the polynomial is root-free
/// there. The left endpoint is excluded on purpose: the rescaled vertical
/// variable is strictly positive on a wedge interior, so a pure power factor
/// vanishing exactly at `lo` does not obstruct the residual split.
fn find_root(r: &PolyY, lo: f64, hi: f64) -> Option<f64> {
    let n = 4096;
    let scale = (0..=n)
        .map(|k| r.eval(lo + (hi - lo) * k as f64 / n as f64).abs())
        .fold(0.0f64, f64::max);
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..=n {
        let x = lo + (hi - lo) * k as f64 / n as f64;
        let v = r.eval(x);
        if v == 0.0 || v.abs() < 1e-12 * scale {
            return Some(x);
        }
        let (prev_x, prev_v) = match prev.replace((x, v)) {
            Some(p) => p,
            None => continue,
        };
        if v.signum() != prev_v.signum() {
            let (mut a, mut bb) = (prev_x, x);
            let mut fa = prev_v;
            for _ in 0..80 {
                let mid = 0.5 * (a + bb);
                let fm = r.eval(mid);
                if fm == 0.0 {
                    return Some(mid);
                }
                if fa.signum() == fm.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    bb = mid;
                }
            }
            return Some(0.5 * (a + bb));
        }
    }
    None
}
