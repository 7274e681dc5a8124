use strichartz_core::grid_fields::{make_test_function, GridField, LPPartition, SpatialGrid, TestFunction};
use strichartz_core::propagators::{
    besov_dispersive_check, dispersive_check, schrodinger_gaussian_limit, PropagatorKind,
};

#[test]
fn schrodinger_gaussian_ratio_two_dimensions() {
    let g = SpatialGrid::new(2, 512, 192.0).unwrap();
    let f = make_test_function(&TestFunction::gaussian(2.5), g).unwrap();
    let rep = dispersive_check(PropagatorKind::Schrodinger, &f, &[10.0, 100.0]).unwrap();
    let limit = schrodinger_gaussian_limit(2);
    assert!((limit - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-16);
    assert!((rep.last - limit).abs() < 1e-4, "{} vs {limit}", rep.last);
    // the ratio increases towards its limit
    assert!(rep.rows[0].ratio < rep.rows[1].ratio);
}

#[test]
fn gaussian_ratio_closed_form() {
    // ‖e^{itΔ}f‖_∞ for f = exp(-|x|²/(2w²)) is (1 + 4t²/w⁴)^{-d/4}.
    let (w, d) = (2.0, 1usize);
    let g = SpatialGrid::new(d, 2048, 256.0).unwrap();
    let f = make_test_function(&TestFunction::gaussian(w), g).unwrap();
    let l1 = (2.0 * std::f64::consts::PI * w * w).sqrt();
    for t in [1.0, 5.0, 30.0] {
        let rep = dispersive_check(PropagatorKind::Schrodinger, &f, &[t]).unwrap();
        let exact = (1.0 + 4.0 * t * t / w.powi(4)).powf(-0.25) * t.sqrt() / l1;
        assert!((rep.last - exact).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn besov_ratio_invariant_under_dyadic_rescaling() {
    let g = SpatialGrid::new(2, 256, 48.0).unwrap();
    let f = make_test_function(&TestFunction::AnnularBump { level: 0 }, g).unwrap();
    let part = LPPartition::new(-3, 3).unwrap();
    for k in [1, 2, -1] {
        let gk = g.dilated(k);
        let s = 2f64.powi(k * 2);
        let fk = GridField::new(gk, f.values().iter().map(|v| v * s).collect()).unwrap();
        let part_k = LPPartition::new(part.j_min() + k, part.j_max() + k).unwrap();
        for t in [3.0, 7.5] {
            let base = besov_dispersive_check(&f, &[t * 2f64.powi(k)], &part).unwrap();
            let scaled = besov_dispersive_check(&fk, &[t], &part_k).unwrap();
            for (a, b) in base.rows.iter().zip(&scaled.rows) {
                assert_eq!(a.j + k, b.j);
                assert!((a.ratio - b.ratio).abs() <= 1e-6 * base.sup, "k = {k}, j = {}", a.j);
            }
        }
    }
}

#[test]
fn besov_check_rejects_uncovered_data() {
    let g = SpatialGrid::new(1, 256, 20.0).unwrap();
    let f = make_test_function(&TestFunction::gaussian(1.0), g).unwrap();
    let part = LPPartition::new(-1, 1).unwrap();
    assert!(besov_dispersive_check(&f, &[1.0], &part).is_err());
}

#[test]
fn dispersive_check_skips_unresolved_times() {
    let g = SpatialGrid::new(1, 256, 20.0).unwrap();
    let f = make_test_function(&TestFunction::AnnularBump { level: 0 }, g).unwrap();
    let rep = dispersive_check(PropagatorKind::HalfWave, &f, &[0.0, 0.1, 2.0]).unwrap();
    assert_eq!(rep.skipped.len(), 2);
    assert_eq!(rep.rows.len(), 1);
}
