use std::f64::consts::PI;

use proptest::prelude::*;
use strichartz_core::grid_fields::{
    forward, inverse, make_test_function, GridField, LPPartition, SpatialGrid, TestFunction,
};
use strichartz_core::propagators::{propagate, PropagatorKind};
use strichartz_core::Complex64;

/// Deterministic rough data: a sum of modulated Gaussians plus a sawtooth.
fn rough(grid: SpatialGrid) -> GridField {
    GridField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let a = (-r2 / 18.0).exp() * Complex64::from_polar(1.0, 1.7 * x[0] - 0.4 * x[1]);
        let b = 0.3 * (-((x[0] - 3.0).powi(2) + x[1] * x[1]) / 2.0).exp();
        let c = 0.05 * ((7.3 * x[0] + 2.1 * x[1]).sin() / (1.0 + r2));
        a + Complex64::new(b, c)
    })
    .unwrap()
}

fn l2_sq(f: &GridField) -> f64 {
    f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().cell_volume()
}

fn grids() -> [SpatialGrid; 2] {
    [SpatialGrid::new(1, 4096, 60.0).unwrap(), SpatialGrid::new(2, 512, 24.0).unwrap()]
}

#[test]
fn plancherel_identity() {
    for g in grids() {
        let f = rough(g);
        let a = l2_sq(&f);
        let b = forward(&f).l2_norm_sq();
        assert!((a - b).abs() <= 1e-10 * a, "d = {}: {a} vs {b}", g.dim());
    }
}

#[test]
fn transform_round_trip() {
    for g in grids() {
        let f = rough(g);
        let back = inverse(&forward(&f));
        assert!(back.max_diff(&f) <= 1e-12 * f.max_abs());
    }
}

#[test]
fn forward_transform_of_gaussian() {
    // ∫ e^{-x²/2} e^{-ixξ} dx = √(2π) e^{-ξ²/2}
    let g = SpatialGrid::new(1, 512, 20.0).unwrap();
    let f = make_test_function(&TestFunction::gaussian(1.0), g).unwrap();
    let s = forward(&f);
    for m in 0..g.points_per_axis() {
        let xi = g.freq(m);
        let exact = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp();
        assert!((s.values()[m] - exact).norm() < 1e-12);
    }
}

#[test]
fn unitarity_and_group_law() {
    for g in grids() {
        let f = rough(g);
        let n0 = l2_sq(&f);
        for kind in [PropagatorKind::Schrodinger, PropagatorKind::HalfWave] {
            let (t, s) = (0.73, -2.41);
            let u = propagate(&f, t, kind).unwrap();
            assert!((l2_sq(&u) - n0).abs() <= 1e-12 * n0, "{kind:?} d = {}", g.dim());
            let composed = propagate(&u, s, kind).unwrap();
            let direct = propagate(&f, t + s, kind).unwrap();
            assert!(composed.max_diff(&direct) <= 1e-12 * f.max_abs(), "{kind:?} d = {}", g.dim());
        }
    }
}

#[test]
fn localized_group_law_on_plateau_data() {
    // On data with spectrum inside the plateau of the cutoff the localized
    // flow agrees with the plain one.
    let g = SpatialGrid::new(1, 1024, 200.0).unwrap();
    let f = inverse(
        &strichartz_core::grid_fields::Spectrum::from_fn(g, |xi| {
            Complex64::new(strichartz_core::profiles::bump((xi[0].abs() - 1.125) / 0.3), 0.0)
        })
        .unwrap(),
    );
    let a = propagate(&f, 3.0, PropagatorKind::localized()).unwrap();
    let b = propagate(&f, 3.0, PropagatorKind::HalfWave).unwrap();
    assert!(a.max_diff(&b) <= 1e-12 * f.max_abs());
}

#[test]
fn lp_partition_sums_to_one_on_covered_band() {
    let part = LPPartition::new(-6, 5).unwrap();
    let (lo, hi) = part.covered_band();
    for i in 0..=4000 {
        let r = lo * (hi / lo).powf(i as f64 / 4000.0);
        assert!((part.total(r) - 1.0).abs() < 1e-10, "r = {r}");
    }
    // outside the band the truncated sum drops below 1
    assert!(part.total(lo / 1.5) < 1.0);
    assert!(part.total(hi * 1.5) < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plancherel_random_data(re in prop::collection::vec(-1.0f64..1.0, 64), im in prop::collection::vec(-1.0f64..1.0, 64), l in 1.0f64..50.0) {
        let g = SpatialGrid::new(1, 64, l).unwrap();
        let vals = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let f = GridField::new(g, vals).unwrap();
        let a = l2_sq(&f);
        let b = forward(&f).l2_norm_sq();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn unitarity_random_data(re in prop::collection::vec(-1.0f64..1.0, 16 * 16), t in -50.0f64..50.0) {
        let g = SpatialGrid::new(2, 16, 5.0).unwrap();
        let vals = re.iter().enumerate().map(|(i, a)| Complex64::new(*a, (i as f64).sin())).collect();
        let f = GridField::new(g, vals).unwrap();
        let n0 = l2_sq(&f);
        for kind in [PropagatorKind::Schrodinger, PropagatorKind::HalfWave] {
            let u = propagate(&f, t, kind).unwrap();
            prop_assert!((l2_sq(&u) - n0).abs() <= 1e-12 * n0);
        }
    }

    #[test]
    fn localized_flow_is_contractive(t in -20.0f64..20.0) {
        let g = SpatialGrid::new(1, 256, 30.0).unwrap();
        let f = rough(g);
        let u = propagate(&f, t, PropagatorKind::localized()).unwrap();
        prop_assert!(l2_sq(&u) <= l2_sq(&f) * (1.0 + 1e-12));
    }
}
