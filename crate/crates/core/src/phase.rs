//! Polynomial phases `S(x,y) = sum c_ab x^a y^b` with exact rational coefficients.
//!
//! Coefficients are kept both as exact `BigRational`s (so later principal-part
//! extraction and shear composition can classify terms without rounding) and as
//! doubles for the evaluation hot path. Every finite double is a dyadic rational,
//! so even float-valued inputs to [`Phase::linear_change`] compose exactly.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

/// Largest per-variable exponent a term may carry.
pub const MAX_EXPONENT: u32 = 64;

/// One monomial `coeff * x^alpha * y^beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialTerm {
    pub alpha: u32,
    pub beta: u32,
    pub(crate) coeff: BigRational,
    pub(crate) coeff_f64: f64,
}

impl MonomialTerm {
    fn new(alpha: u32, beta: u32, coeff: BigRational) -> Self {
        let coeff_f64 = rational_to_f64(&coeff);
        MonomialTerm { alpha, beta, coeff, coeff_f64 }
    }

    /// Coefficient as a double.
    pub fn coeff_f64(&self) -> f64 {
        self.coeff_f64
    }

    /// Exact coefficient.
    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    // BigRational -> f64 via long division with 80 bits of headroom; num's
    // ToPrimitive on huge numerators can overflow, so divide explicitly.
    let num = r.numer();
    let den = r.denom();
    if num.is_zero() {
        return 0.0;
    }
    let sign = if num.is_negative() { -1.0 } else { 1.0 };
    let (n, d) = (num.abs(), den.abs());
    // scale n/d into [2^63, 2^64) by binary shifts, track the exponent
    let mut shift: i64 = 0;
    let mut n = n;
    let d_bits = d.bits() as i64;
    let n_bits = n.bits() as i64;
    let target = 64i64;
    let adjust = target + d_bits - n_bits;
    if adjust > 0 {
        n <<= adjust as usize;
    } else {
        // exact truncation toward zero is fine at this magnitude
        n >>= (-adjust) as usize;
    }
    shift -= adjust;
    let q = &n / &d;
    let q_f64 = q
        .to_u64_digits()
        .1
        .iter()
        .rev()
        .fold(0.0f64, |acc, digit| acc * 2f64.powi(64) + *digit as f64);
    sign * q_f64 * 2f64.powi(shift as i32)
}

/// A polynomial phase: nonempty sum of monomials, each vanishing to order >= 2
/// at the origin (derivatives of phases relax that restriction internally).
#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    terms: Vec<MonomialTerm>,
    label: String,
}

impl Phase {
    /// Build a phase from `[alpha, beta, coeff_num, coeff_den]` quadruples, the
    /// literal syntax used by config files. Duplicate exponent pairs are merged.
    pub fn from_quadruples(quads: &[[i64; 4]], label: &str) -> Result<Phase> {
        let mut terms = Vec::with_capacity(quads.len());
        for q in quads {
            let [alpha, beta, num, den] = *q;
            if alpha < 0 || beta < 0 {
                return Err(Error::Invalid(format!(
                    "negative exponent in term [{alpha}, {beta}, {num}, {den}]"
                )));
            }
            if den == 0 {
                return Err(Error::Invalid(format!(
                    "zero denominator in term [{alpha}, {beta}, {num}, {den}]"
                )));
            }
            let coeff = BigRational::new(BigInt::from(num), BigInt::from(den));
            terms.push((alpha as u32, beta as u32, coeff));
        }
        Phase::from_exact_terms(terms, label, false)
    }

    /// Internal constructor; `relaxed` skips the order >= 2 restriction so that
    /// derivatives (which legitimately contain constants and linear terms) can be
    /// represented by the same type.
    pub(crate) fn from_exact_terms(
        raw: Vec<(u32, u32, BigRational)>,
        label: &str,
        relaxed: bool,
    ) -> Result<Phase> {
        let mut merged: Vec<(u32, u32, BigRational)> = Vec::with_capacity(raw.len());
        for (a, b, c) in raw {
            if a > MAX_EXPONENT || b > MAX_EXPONENT {
                return Err(Error::Invalid(format!(
                    "exponent ({a},{b}) exceeds the cap of {MAX_EXPONENT}"
                )));
            }
            match merged.iter_mut().find(|(ma, mb, _)| *ma == a && *mb == b) {
                Some((_, _, mc)) => *mc += c,
                None => merged.push((a, b, c)),
            }
        }
        merged.retain(|(_, _, c)| !c.is_zero());
        merged.sort_by_key(|(a, b, _)| (*a, *b));
        if merged.is_empty() && !relaxed {
            return Err(Error::Invalid("phase has no nonzero terms".into()));
        }
        if !relaxed {
            if let Some((a, b, _)) = merged.iter().find(|(a, b, _)| a + b <= 1) {
                return Err(Error::Invalid(format!(
                    "term x^{a} y^{b} has total degree {} < 2; phases must vanish \
                     to second order at the origin",
                    a + b
                )));
            }
        }
        let terms = merged
            .into_iter()
            .map(|(a, b, c)| MonomialTerm::new(a, b, c))
            .collect();
        Ok(Phase { terms, label: label.to_string() })
    }

    /// Monomial helper: `x^a y^b` with coefficient 1.
    pub fn monomial(a: u32, b: u32) -> Result<Phase> {
        Phase::from_quadruples(&[[a as i64, b as i64, 1, 1]], &format!("x^{a} y^{b}"))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    /// Exponent/coefficient triples for hot evaluation loops.
    pub fn terms_f64(&self) -> Vec<(u32, u32, f64)> {
        self.terms.iter().map(|t| (t.alpha, t.beta, t.coeff_f64)).collect()
    }

    /// Evaluate at a point with compensated (Kahan) summation over the terms.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for t in &self.terms {
            let v = t.coeff_f64 * x.powi(t.alpha as i32) * y.powi(t.beta as i32);
            let y_ = v - comp;
            let t_ = sum + y_;
            comp = (t_ - sum) - y_;
            sum = t_;
        }
        sum
    }

    /// Exact evaluation at a rational point (used as the oracle for `eval`).
    pub fn eval_exact(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut sum = BigRational::zero();
        for t in &self.terms {
            sum += &t.coeff * pow_rational(x, t.alpha) * pow_rational(y, t.beta);
        }
        sum
    }

    /// Order of vanishing at the origin: the minimal total degree of a term.
    pub fn order_of_zero(&self) -> Result<u32> {
        self.terms
            .iter()
            .map(|t| t.alpha + t.beta)
            .min()
            .ok_or_else(|| Error::Invalid("order of zero of an empty phase".into()))
    }

    /// Mixed partial derivative d^(k+l) S / dx^k dy^l, as a phase with the
    /// order restriction relaxed (the result may contain constants).
    pub fn partial_derivative(&self, k: u32, l: u32) -> Phase {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.alpha < k || t.beta < l {
                continue;
            }
            let mut c = t.coeff.clone();
            for j in 0..k {
                c *= BigRational::from(BigInt::from(t.alpha - j));
            }
            for j in 0..l {
                c *= BigRational::from(BigInt::from(t.beta - j));
            }
            out.push((t.alpha - k, t.beta - l, c));
        }
        let label = format!("d^({k},{l}) {}", self.label);
        Phase::from_exact_terms(out, &label, true)
            .expect("derivative terms always satisfy relaxed validation")
    }

    /// Exact composition with the linear change of variables
    /// `(x, y) -> (a11 x + a12 y, a21 x + a22 y)`.
    ///
    /// Matrix entries are doubles (hence dyadic rationals), so the composition is
    /// exact; a zero determinant is rejected.
    pub fn linear_change(&self, a11: f64, a12: f64, a21: f64, a22: f64) -> Result<Phase> {
        for v in [a11, a12, a21, a22] {
            if !v.is_finite() {
                return Err(Error::Invalid("non-finite matrix entry".into()));
            }
        }
        let r11 = BigRational::from_float(a11).unwrap();
        let r12 = BigRational::from_float(a12).unwrap();
        let r21 = BigRational::from_float(a21).unwrap();
        let r22 = BigRational::from_float(a22).unwrap();
        if (&r11 * &r22 - &r12 * &r21).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let mut out: Vec<(u32, u32, BigRational)> = Vec::new();
        for t in &self.terms {
            // (a11 x + a12 y)^alpha expanded, then (a21 x + a22 y)^beta
            let u = binomial_expand(&r11, &r12, t.alpha);
            let v = binomial_expand(&r21, &r22, t.beta);
            for (ku, cu) in &u {
                for (kv, cv) in &v {
                    let xe = ku + kv;
                    let ye = (t.alpha - ku) + (t.beta - kv);
                    out.push((xe, ye, &t.coeff * cu * cv));
                }
            }
        }
        let label = format!("{} o L", self.label);
        Phase::from_exact_terms(out, &label, true)
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.coeff == BigRational::one() && t.alpha + t.beta > 0 {
                write_monomial(f, t.alpha, t.beta)?;
            } else {
                write!(f, "({})", t.coeff)?;
                if t.alpha + t.beta > 0 {
                    write!(f, "*")?;
                    write_monomial(f, t.alpha, t.beta)?;
                }
            }
        }
        Ok(())
    }
}

fn write_monomial(f: &mut std::fmt::Formatter<'_>, a: u32, b: u32) -> std::fmt::Result {
    match (a, b) {
        (0, 0) => write!(f, "1"),
        (a, 0) => write!(f, "x^{a}"),
        (0, b) => write!(f, "y^{b}"),
        (a, b) => write!(f, "x^{a} y^{b}"),
    }
}

/// Coefficients of `(p*x + q*y)^n` as `(k, coeff of x^k y^(n-k))`.
fn binomial_expand(p: &BigRational, q: &BigRational, n: u32) -> Vec<(u32, BigRational)> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut binom = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigInt::from(n - k + 1) / BigInt::from(k);
        }
        let c = BigRational::from(binom.clone()) * pow_rational(p, k) * pow_rational(q, n - k);
        if !c.is_zero() {
            out.push((k, c));
        }
    }
    out
}

pub(crate) fn pow_rational(r: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = r.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}
