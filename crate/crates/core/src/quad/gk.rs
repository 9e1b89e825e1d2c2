//! 15-point Kronrod rule with embedded 7-point Gauss rule on `[-1, 1]`.
//!
//! The abscissae and weights are the classical QUADPACK values. The 15 nodes
//! are exposed in ascending position order with two weight vectors: the
//! Kronrod weights at every node and the Gauss weights, which are zero at the
//! Kronrod-only nodes. Evaluating an integrand once per node therefore yields
//! both rules, and their difference serves as the local error estimate.

/// Kronrod abscissae on the nonnegative half, largest first; even indices are
/// Kronrod-only points, odd indices (and the center) carry the Gauss rule.
pub const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Gauss weights for the 7-point rule, matching `XGK[1], XGK[3], XGK[5], XGK[7]`.
pub const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod weights matching `XGK` index for index.
pub const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// All 15 node positions in ascending order.
pub const NODES: [f64; 15] = build_nodes();
/// Kronrod weight at each node of `NODES`.
pub const KRONROD_W: [f64; 15] = build_kronrod_weights();
/// Gauss weight at each node of `NODES` (zero at Kronrod-only nodes).
pub const GAUSS_W: [f64; 15] = build_gauss_weights();
/// Indices into `NODES` that carry the embedded Gauss rule.
pub const GAUSS_IDX: [usize; 7] = [1, 3, 5, 7, 9, 11, 13];

const fn build_nodes() -> [f64; 15] {
    let mut t = [0.0; 15];
    let mut j = 0;
    while j < 7 {
        t[j] = -XGK[j];
        t[14 - j] = XGK[j];
        j += 1;
    }
    t[7] = 0.0;
    t
}

const fn build_kronrod_weights() -> [f64; 15] {
    let mut w = [0.0; 15];
    let mut j = 0;
    while j < 7 {
        w[j] = WGK[j];
        w[14 - j] = WGK[j];
        j += 1;
    }
    w[7] = WGK[7];
    w
}

const fn build_gauss_weights() -> [f64; 15] {
    let mut w = [0.0; 15];
    // Gauss nodes sit at the odd Kronrod indices plus the center.
    w[1] = WG[0];
    w[13] = WG[0];
    w[3] = WG[1];
    w[11] = WG[1];
    w[5] = WG[2];
    w[9] = WG[2];
    w[7] = WG[3];
    w
}

/// Apply the pair of rules to `f` on `[a, b]`; returns the Kronrod value and
/// the raw `|K15 - G7|` difference as a conservative error estimate.
pub fn qk15<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = 0.0;
    let mut g = 0.0;
    for i in 0..15 {
        let v = f(c + h * NODES[i]);
        k += KRONROD_W[i] * v;
        g += GAUSS_W[i] * v;
    }
    (k * h, (k - g).abs() * h.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let sk: f64 = KRONROD_W.iter().sum();
        let sg: f64 = GAUSS_W.iter().sum();
        assert!((sk - 2.0).abs() < 1e-14, "Kronrod weights sum: {sk}");
        assert!((sg - 2.0).abs() < 1e-14, "Gauss weights sum: {sg}");
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        for i in 0..15 {
            assert_eq!(NODES[i], -NODES[14 - i]);
            assert_eq!(KRONROD_W[i], KRONROD_W[14 - i]);
            if i > 0 {
                assert!(NODES[i] > NODES[i - 1]);
            }
        }
        for &i in &GAUSS_IDX {
            assert!(GAUSS_W[i] > 0.0);
        }
        assert_eq!(GAUSS_W[0], 0.0);
        assert_eq!(GAUSS_W[14], 0.0);
    }

    /// Exact monomial moments: the Gauss rule must integrate degree <= 13
    /// exactly, the Kronrod rule degree <= 22.
    #[test]
    fn polynomial_exactness() {
        let moment = |p: u32| -> f64 {
            // integral of x^p over [-1,1]
            if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) }
        };
        for p in 0..=13u32 {
            let g: f64 = (0..15).map(|i| GAUSS_W[i] * NODES[i].powi(p as i32)).sum();
            assert!((g - moment(p)).abs() < 1e-14, "Gauss failed at degree {p}: {g}");
        }
        for p in 0..=22u32 {
            let k: f64 = (0..15).map(|i| KRONROD_W[i] * NODES[i].powi(p as i32)).sum();
            assert!((k - moment(p)).abs() < 2e-14, "Kronrod failed at degree {p}: {k}");
        }
    }

    #[test]
    fn single_panel_reference_integrals() {
        let (v, e) = qk15(0.0, 1.0, |x| x * x);
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert!(e < 1e-14);

        let (v, _) = qk15(0.0, std::f64::consts::PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-10);

        let (v, _) = qk15(0.0, 1.0, |x| (-x).exp());
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn error_estimate_is_conservative_on_smooth_integrands() {
        // moderate oscillation: K15 is essentially exact, |K-G| dominates truth
        let lam = 6.0;
        let (v, e) = qk15(-1.0, 1.0, |x| (lam * x).cos());
        let exact = 2.0 * lam.sin() / lam;
        assert!((v - exact).abs() <= e, "true error {} vs estimate {e}", (v - exact).abs());
    }
}
