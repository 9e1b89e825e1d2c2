//! Newton polygon of a phase and the decay law it predicts.
//!
//! The polygon is the convex hull of the union of upper-right quadrants anchored
//! at the exponent pairs of the phase. The Newton distance `d` is the coordinate
//! of the unique point where the bisectrix `alpha = beta` meets the polygon
//! boundary; the predicted oscillatory decay is `|lambda|^(-1/d)` with an extra
//! `log` factor exactly when the bisectrix passes through a vertex and `d > 1`.
//! All boundary arithmetic is exact over `i64` rationals, so the vertex-versus-
//! edge classification involves no tolerances.
//!
//! The prediction is only meaningful in adapted coordinates. Adaptedness is
//! asserted by the caller, never computed here: the corpus phases (monomials,
//! `x^a + y^b`, `x^a y^b` plus higher-order terms) are known to be adapted.

use num::rational::Ratio;
use num::Zero;

use crate::error::Error;
use crate::phase::Phase;
use crate::Result;

pub type Rational64 = Ratio<i64>;

/// One finite edge of the polygon boundary, with its (negative) slope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: (u32, u32),
    pub to: (u32, u32),
    pub slope: Rational64,
}

/// Boundary description of the Newton polygon. Vertices run from the
/// bottom-right (largest `alpha`, smallest `beta`) to the top-left; the
/// unbounded boundary continues with a horizontal ray to the right of the
/// first vertex and a vertical ray above the last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(u32, u32)>,
    edges: Vec<Edge>,
}

/// A decay law `C * |parameter|^(-epsilon) * (log |parameter|)^m`. The
/// constant is genuinely nonconstructive in the sources this models, so it is
/// `None` ("unknown") until a fit supplies an empirical value.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayLaw {
    pub epsilon: Rational64,
    pub m: u8,
    pub c: Option<f64>,
}

impl DecayLaw {
    pub fn new(epsilon: Rational64, m: u8) -> Self {
        DecayLaw { epsilon, m, c: None }
    }

    pub fn epsilon_f64(&self) -> f64 {
        *self.epsilon.numer() as f64 / *self.epsilon.denom() as f64
    }
}

/// Result of [`sublevel_decay`]: the growth law of the sublevel-set measure,
/// with the ambiguity flag raised in the `(1, 0)` case where the measure may
/// carry an extra logarithm that the oscillatory law does not show.
#[derive(Debug, Clone, PartialEq)]
pub struct SublevelLaw {
    pub law: DecayLaw,
    pub ambiguous: bool,
    pub candidates: Vec<DecayLaw>,
}

impl NewtonPolygon {
    pub fn vertices(&self) -> &[(u32, u32)] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Newton distance together with whether the bisectrix passes through a
    /// vertex (the input to the logarithm rule).
    pub fn distance_detail(&self) -> (Rational64, bool) {
        let first = self.vertices[0];
        let last = *self.vertices.last().unwrap();
        // bisectrix meets the horizontal ray right of the first vertex
        if first.1 >= first.0 {
            return (Rational64::from(first.1 as i64), first.1 == first.0);
        }
        // or the vertical ray above the last vertex
        if last.0 >= last.1 {
            return (Rational64::from(last.0 as i64), last.0 == last.1);
        }
        // otherwise it crosses a vertex or the interior of an edge
        if let Some(v) = self.vertices.iter().find(|v| v.0 == v.1) {
            return (Rational64::from(v.0 as i64), true);
        }
        for e in &self.edges {
            let (ua, ub) = (e.from.0 as i64, e.from.1 as i64);
            let (va, vb) = (e.to.0 as i64, e.to.1 as i64);
            // `from` lies below the diagonal, `to` above: the edge crosses it
            if ub < ua && vb > va {
                let t = Rational64::new(ub * va - ua * vb, (va - vb) - (ua - ub));
                return (t, false);
            }
        }
        unreachable!("bisectrix always meets the boundary exactly once");
    }
}

/// Polygon of the exponent set of a phase.
pub fn build_polygon(phase: &Phase) -> Result<NewtonPolygon> {
    let points: Vec<(u32, u32)> = phase.terms().iter().map(|t| (t.alpha, t.beta)).collect();
    polygon_of_points(&points)
}

/// Polygon of an explicit exponent set (each point anchors a quadrant).
pub fn polygon_of_points(points: &[(u32, u32)]) -> Result<NewtonPolygon> {
    if points.is_empty() {
        return Err(Error::Invalid("cannot build a polygon from an empty exponent set".into()));
    }
    // Pareto filter: a point dominated by another (componentwise >=) lies in
    // the interior of that point's quadrant and cannot be a vertex.
    let mut minimal: Vec<(u32, u32)> = Vec::new();
    for &p in points {
        if points.iter().any(|&q| q != p && q.0 <= p.0 && q.1 <= p.1) {
            continue;
        }
        if !minimal.contains(&p) {
            minimal.push(p);
        }
    }
    // antichain: sorting by alpha descending makes beta strictly ascending
    minimal.sort_by(|a, b| b.0.cmp(&a.0));
    // keep only extreme points of the convex chain (clockwise turns)
    let mut hull: Vec<(u32, u32)> = Vec::new();
    for p in minimal {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let abx = b.0 as i64 - a.0 as i64;
            let aby = b.1 as i64 - a.1 as i64;
            let bcx = p.0 as i64 - b.0 as i64;
            let bcy = p.1 as i64 - b.1 as i64;
            // cross >= 0 means b lies on or above segment a-p: not extreme
            if abx * bcy - aby * bcx >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let edges = hull
        .windows(2)
        .map(|w| Edge {
            from: w[0],
            to: w[1],
            slope: Rational64::new(w[1].1 as i64 - w[0].1 as i64, w[1].0 as i64 - w[0].0 as i64),
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull, edges })
}

/// Newton distance: the unique `t` with `(t, t)` on the polygon boundary.
pub fn newton_distance(polygon: &NewtonPolygon) -> Rational64 {
    polygon.distance_detail().0
}

/// Predicted oscillatory decay pair `epsilon = 1/d`, `m = 1` exactly when the
/// bisectrix meets the boundary at a vertex and `d > 1`.
///
/// `adapted` is an explicit acknowledgment that the phase is written in
/// adapted coordinates; nothing here verifies that, so the call is refused
/// without it. When `d <= 1` the logarithm is forced off: at distance one the
/// logarithmic possibility is confined to the sublevel law and surfaced by
/// [`sublevel_decay`]'s ambiguity flag instead.
pub fn predict_decay(polygon: &NewtonPolygon, adapted: bool) -> Result<DecayLaw> {
    if !adapted {
        return Err(Error::NotAsserted);
    }
    let (d, at_vertex) = polygon.distance_detail();
    if d.is_zero() {
        return Err(Error::Invalid("Newton distance is zero".into()));
    }
    let m = if at_vertex && d > Rational64::from(1) { 1 } else { 0 };
    Ok(DecayLaw::new(d.recip(), m))
}

/// Growth law of the sublevel measure implied by an oscillatory decay law.
/// The law passes through unchanged except at `(1, 0)`, where the measure may
/// be either `r` or `r |log r|` and both candidates are reported.
pub fn sublevel_decay(law: &DecayLaw) -> SublevelLaw {
    let one = Rational64::from(1);
    if law.epsilon == one && law.m == 0 {
        SublevelLaw {
            law: DecayLaw::new(one, 0),
            ambiguous: true,
            candidates: vec![DecayLaw::new(one, 0), DecayLaw::new(one, 1)],
        }
    } else {
        SublevelLaw { law: law.clone(), ambiguous: false, candidates: vec![law.clone()] }
    }
}

/// Whether the sharp no-log-loss decay theorem covers this law: it requires
/// `epsilon <= 1/3` (equivalently, height at least 3), boundary included.
pub fn theorem12_applicable(law: &DecayLaw) -> bool {
    law.epsilon <= Rational64::new(1, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle for the Newton distance: the smallest `t` with
    /// `(t, t)` in the quadrant-hull of the points. By Caratheodory in the
    /// plane, that `t` is `max(sum λ a_i, sum λ b_i)` minimized over convex
    /// combinations of at most two generators, which has a closed form per
    /// pair (endpoints, or the crossing of the two linear coordinates).
    fn brute_distance(points: &[(u32, u32)]) -> f64 {
        let single = |&(a, b): &(u32, u32)| a.max(b) as f64;
        let mut best = points.iter().map(single).fold(f64::INFINITY, f64::min);
        for (i, &(a1, b1)) in points.iter().enumerate() {
            for &(a2, b2) in &points[i + 1..] {
                let (a1, b1, a2, b2) = (a1 as f64, b1 as f64, a2 as f64, b2 as f64);
                // coordinates along the segment: f(th) = th*a1 + (1-th)*a2,
                // g(th) = th*b1 + (1-th)*b2; minimize max(f, g) on [0, 1]
                let mut cands = vec![0.0, 1.0];
                let denom = (a1 - b1) - (a2 - b2);
                if denom != 0.0 {
                    let th = (b2 - a2) / denom;
                    if (0.0..=1.0).contains(&th) {
                        cands.push(th);
                    }
                }
                for th in cands {
                    let f = th * a1 + (1.0 - th) * a2;
                    let g = th * b1 + (1.0 - th) * b2;
                    best = best.min(f.max(g));
                }
            }
        }
        best
    }

    fn poly(points: &[(u32, u32)]) -> NewtonPolygon {
        polygon_of_points(points).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn monomial_distance_matches_brute_oracle() {
        for a in 1..=6u32 {
            for b in 1..=6u32 {
                let p = poly(&[(a, b)]);
                assert_eq!(newton_distance(&p), rat(a.max(b) as i64, 1), "monomial ({a},{b})");
                let oracle = brute_distance(&[(a, b)]);
                assert!(
                    (oracle - a.max(b) as f64).abs() < 1e-6,
                    "oracle disagrees for ({a},{b}): {oracle}"
                );
            }
        }
    }

    #[test]
    fn multi_term_distances_match_brute_oracle() {
        let cases: &[&[(u32, u32)]] = &[
            &[(2, 0), (0, 2)],
            &[(3, 0), (0, 3)],
            &[(4, 0), (0, 2)],
            &[(3, 0), (1, 1), (0, 3)],
            &[(6, 0), (2, 3), (0, 6)],
            &[(5, 1), (2, 2), (1, 4)],
            &[(3, 0)],
            &[(0, 2)],
        ];
        for points in cases {
            let exact = newton_distance(&poly(points));
            let exact_f = *exact.numer() as f64 / *exact.denom() as f64;
            let oracle = brute_distance(points);
            assert!(
                (oracle - exact_f).abs() < 1e-6,
                "{points:?}: exact {exact_f}, oracle {oracle}"
            );
        }
    }

    #[test]
    fn two_term_hulls_and_distances() {
        let p = poly(&[(2, 0), (0, 2)]);
        assert_eq!(p.vertices(), &[(2, 0), (0, 2)]);
        assert_eq!(newton_distance(&p), rat(1, 1));
        assert_eq!(newton_distance(&poly(&[(2, 2)])), rat(2, 1));
        assert_eq!(newton_distance(&poly(&[(3, 0), (0, 3)])), rat(3, 2));
    }

    #[test]
    fn hull_of_cubic_with_cross_term() {
        let p = poly(&[(3, 0), (1, 1), (0, 3)]);
        assert_eq!(p.vertices(), &[(3, 0), (1, 1), (0, 3)]);
        assert_eq!(p.edges()[0].slope, rat(-1, 2));
        assert_eq!(p.edges()[1].slope, rat(-2, 1));
        // bisectrix hits the (1,1) vertex, but d = 1 forces m = 0
        let (d, at_vertex) = p.distance_detail();
        assert_eq!(d, rat(1, 1));
        assert!(at_vertex);
        assert_eq!(predict_decay(&p, true).unwrap(), DecayLaw::new(rat(1, 1), 0));
    }

    #[test]
    fn collinear_exponents_are_not_vertices() {
        let p = poly(&[(2, 0), (1, 1), (0, 2)]);
        assert_eq!(p.vertices(), &[(2, 0), (0, 2)]);
    }

    #[test]
    fn dominated_exponents_are_dropped() {
        let p = poly(&[(2, 2), (3, 2), (2, 3), (5, 5)]);
        assert_eq!(p.vertices(), &[(2, 2)]);
    }

    #[test]
    fn polygon_from_phase_uses_term_exponents() {
        let phase = Phase::from_quadruples(&[[2, 2, 1, 1], [3, 3, 1, 1]], "x2y2+x3y3").unwrap();
        let p = build_polygon(&phase).unwrap();
        assert_eq!(p.vertices(), &[(2, 2)]);
    }

    #[test]
    fn corpus_decay_laws() {
        // (term exponents, expected epsilon, expected m)
        let cases: &[(&[(u32, u32)], Rational64, u8)] = &[
            (&[(2, 0), (0, 2)], rat(1, 1), 0),
            (&[(3, 0), (0, 3)], rat(2, 3), 0),
            (&[(2, 2)], rat(1, 2), 1),
            (&[(3, 3)], rat(1, 3), 1),
            (&[(6, 6)], rat(1, 6), 1),
            (&[(4, 0), (0, 2)], rat(3, 4), 0),
            (&[(3, 0)], rat(1, 3), 0),
            (&[(0, 2)], rat(1, 2), 0),
        ];
        for (points, eps, m) in cases {
            let law = predict_decay(&poly(points), true).unwrap();
            assert_eq!(law.epsilon, *eps, "{points:?}");
            assert_eq!(law.m, *m, "{points:?}");
            assert_eq!(law.c, None);
        }
    }

    #[test]
    fn even_power_sums_have_no_log() {
        // x^k + y^k: distance k/2, bisectrix interior to the single edge
        for k in 2..=8u32 {
            let law = predict_decay(&poly(&[(k, 0), (0, k)]), true).unwrap();
            assert_eq!(law.epsilon, rat(2, k as i64));
            assert_eq!(law.m, 0, "x^{k} + y^{k}");
        }
    }

    #[test]
    fn prediction_requires_adaptedness_assertion() {
        let p = poly(&[(2, 2)]);
        assert!(matches!(predict_decay(&p, false), Err(Error::NotAsserted)));
    }

    #[test]
    fn sublevel_ambiguity_only_at_one_zero() {
        let amb = sublevel_decay(&DecayLaw::new(rat(1, 1), 0));
        assert!(amb.ambiguous);
        assert_eq!(
            amb.candidates,
            vec![DecayLaw::new(rat(1, 1), 0), DecayLaw::new(rat(1, 1), 1)]
        );
        let plain = sublevel_decay(&DecayLaw::new(rat(1, 2), 1));
        assert!(!plain.ambiguous);
        assert_eq!(plain.candidates, vec![DecayLaw::new(rat(1, 2), 1)]);
        let edge = sublevel_decay(&DecayLaw::new(rat(2, 3), 0));
        assert!(!edge.ambiguous);
    }

    #[test]
    fn theorem_gate_is_epsilon_at_most_third() {
        assert!(theorem12_applicable(&DecayLaw::new(rat(1, 3), 0)));
        assert!(theorem12_applicable(&DecayLaw::new(rat(1, 4), 0)));
        assert!(theorem12_applicable(&DecayLaw::new(rat(1, 6), 1)));
        assert!(!theorem12_applicable(&DecayLaw::new(rat(1, 2), 1)));
        assert!(!theorem12_applicable(&DecayLaw::new(rat(2, 3), 0)));
    }

    proptest! {
        // adding a term can only shrink the hull complement, never increase d
        #[test]
        fn distance_monotone_under_extra_terms(
            base in proptest::collection::vec((1u32..=8, 1u32..=8), 1..5),
            extra in (0u32..=8, 0u32..=8)
        ) {
            prop_assume!(extra.0 + extra.1 >= 2);
            let d0 = newton_distance(&poly(&base));
            let mut bigger = base.clone();
            bigger.push(extra);
            let d1 = newton_distance(&poly(&bigger));
            prop_assert!(d1 <= d0);
        }

        // swapping the variables mirrors the polygon and preserves d
        #[test]
        fn distance_symmetric_under_swap(
            points in proptest::collection::vec((0u32..=8, 0u32..=8), 1..6)
        ) {
            prop_assume!(points.iter().all(|(a, b)| a + b >= 2));
            let swapped: Vec<(u32, u32)> = points.iter().map(|&(a, b)| (b, a)).collect();
            prop_assert_eq!(
                newton_distance(&poly(&points)),
                newton_distance(&poly(&swapped))
            );
        }
    }
}
