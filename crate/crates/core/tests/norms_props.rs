use proptest::prelude::*;
use strichartz_core::norms::{lorentz_norm_series, weighted_lebesgue, Rearrangement};

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..200)
}

/// Independent evaluation of `(∫ (t^{1/q} f*(t))^p dt/t)^{1/p}` by
/// midpoint quadrature in `ln t` on each step.
fn lorentz_by_quadrature(values: &[f64], w: f64, q: f64, p: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).filter(|x| *x > 0.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    for (k, a) in v.iter().enumerate() {
        let (lo, hi) = (k as f64 * w, (k + 1) as f64 * w);
        let (llo, lhi) = if k == 0 { ((hi * 1e-60).ln(), hi.ln()) } else { (lo.ln(), hi.ln()) };
        let n = 40_000;
        let h = (lhi - llo) / n as f64;
        for i in 0..n {
            let t = (llo + (i as f64 + 0.5) * h).exp();
            acc += (t.powf(1.0 / q) * a).powf(p) * h;
        }
    }
    acc.powf(1.0 / p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weak_norm_dominated_by_strong(v in samples(), w in 0.01f64..3.0, q in 1.0f64..8.0, p in 1.0f64..8.0) {
        let weak = lorentz_norm_series(&v, w, q, f64::INFINITY).unwrap();
        let strong = lorentz_norm_series(&v, w, q, p).unwrap();
        prop_assert!(weak <= (p / q).powf(1.0 / p) * strong * (1.0 + 1e-12));
    }

    #[test]
    fn diagonal_lorentz_is_lebesgue(v in samples(), w in 0.01f64..3.0, q in 1.0f64..8.0) {
        let l = lorentz_norm_series(&v, w, q, q).unwrap();
        let leb = weighted_lebesgue(v.iter().copied(), w, q).unwrap();
        prop_assert!((l - leb).abs() <= 1e-12 * leb.max(1e-300));
    }

    #[test]
    fn lorentz_matches_quadrature(v in prop::collection::vec(-5.0f64..5.0, 1..12), q in 1.0f64..4.0, p in 1.0f64..4.0) {
        let exact = lorentz_norm_series(&v, 0.5, q, p).unwrap();
        let quad = lorentz_by_quadrature(&v, 0.5, q, p);
        prop_assert!((exact - quad).abs() <= 1e-4 * exact.max(1e-300), "{exact} vs {quad}");
    }

    #[test]
    fn rearrangement_invariance(mut v in samples(), seed in any::<u64>(), q in 1.0f64..8.0, p in 1.0f64..8.0) {
        let a = lorentz_norm_series(&v, 1.0, q, p).unwrap();
        let n = v.len();
        for i in 0..n {
            let j = (seed.wrapping_mul(i as u64 + 1) % n as u64) as usize;
            v.swap(i, j);
        }
        let b = lorentz_norm_series(&v, 1.0, q, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn lorentz_norm_scales_with_measure(v in samples(), w in 0.01f64..3.0, s in 0.1f64..10.0, q in 1.0f64..8.0, p in 1.0f64..8.0) {
        // stretching the domain by s multiplies the norm by s^{1/q}
        let a = lorentz_norm_series(&v, w, q, p).unwrap();
        let b = lorentz_norm_series(&v, w * s, q, p).unwrap();
        prop_assert!((b - s.powf(1.0 / q) * a).abs() <= 1e-11 * b.max(1e-300));
    }

    #[test]
    fn rearrangement_is_decreasing(v in samples()) {
        let r = Rearrangement::from_series(&v, 1.0).unwrap();
        prop_assert!(r.levels().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(r.breakpoints().windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn lorentz_exponent_domain() {
    assert!(lorentz_norm_series(&[1.0], 1.0, 0.0, 1.0).is_err());
    assert!(lorentz_norm_series(&[1.0], 1.0, 2.0, 0.5).is_err());
    assert_eq!(lorentz_norm_series(&[0.0, 0.0], 1.0, 2.0, 2.0).unwrap(), 0.0);
    assert_eq!(lorentz_norm_series(&[-3.0, 2.0], 1.0, f64::INFINITY, 1.0).unwrap(), 3.0);
}
