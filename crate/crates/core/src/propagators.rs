//! Spectral propagators `e^{itΔ}`, `e^{it√-Δ}` and its frequency-localised
//! version, the Duhamel integral, its dyadic time pieces and numeric
//! dispersive-estimate checks.
//!
//! Under `f̂(ξ) = ∫ f e^{-ix·ξ}`, `e^{itΔ}` is the multiplier `e^{-it|ξ|²}`
//! and `e^{it√-Δ}` is `e^{it|ξ|}`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid_fields::{forward, inverse, GridField, LPPartition, SpaceTimeField, SpatialGrid, Spectrum};
use crate::norms::lebesgue_norm;
use crate::profiles::annular_cutoff;
use crate::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PropagatorKind {
    Schrodinger,
    HalfWave,
    /// `e^{it√-Δ} χ(√-Δ)` with `χ` supported in `[lo, hi]` and equal to 1
    /// on `[3lo/2, 3hi/4]`.
    LocalizedHalfWave {
        lo: f64,
        hi: f64,
    },
}

impl PropagatorKind {
    /// Cutoff supported in `[1/2, 2]`, equal to 1 on `[3/4, 3/2]`.
    pub fn localized() -> Self {
        Self::LocalizedHalfWave { lo: 0.5, hi: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::LocalizedHalfWave { lo, hi } = *self {
            if !(lo > 0.0 && hi.is_finite() && 1.5 * lo <= 0.75 * hi) {
                return domain(format!("cutoff interval [{lo}, {hi}] too narrow or not away from 0"));
            }
        }
        Ok(())
    }

    /// Phase rate `a(r)` with `U(t) = e^{it a(|ξ|)}` before the cutoff.
    pub fn rate(&self, r: f64) -> f64 {
        match self {
            Self::Schrodinger => -r * r,
            _ => r,
        }
    }

    pub fn cutoff(&self, r: f64) -> f64 {
        match *self {
            Self::LocalizedHalfWave { lo, hi } => annular_cutoff(r, lo, hi),
            _ => 1.0,
        }
    }

    pub fn symbol(&self, t: f64, r: f64) -> Complex64 {
        Complex64::from_polar(self.cutoff(r), t * self.rate(r))
    }

    /// Dispersive decay rate `σ` in dimension `d`.
    pub fn decay_rate(&self, d: usize) -> f64 {
        match self {
            Self::Schrodinger => d as f64 / 2.0,
            _ => (d as f64 - 1.0) / 2.0,
        }
    }
}

struct SymbolTable {
    rate: Vec<f64>,
    cut: Vec<f64>,
}

impl SymbolTable {
    fn new(grid: &SpatialGrid, kind: PropagatorKind) -> Self {
        let radii = grid.freq_radii();
        Self {
            rate: radii.iter().map(|&r| kind.rate(r)).collect(),
            cut: radii.iter().map(|&r| kind.cutoff(r)).collect(),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return domain(format!("time must be finite, got {t}"));
    }
    Ok(())
}

/// `U(t) f`.
pub fn propagate(f: &GridField, t: f64, kind: PropagatorKind) -> Result<GridField> {
    check_time(t)?;
    kind.validate()?;
    let table = SymbolTable::new(f.grid(), kind);
    let mut spec = forward(f);
    for ((v, a), c) in spec.values_mut().iter_mut().zip(&table.rate).zip(&table.cut) {
        *v *= Complex64::from_polar(*c, t * a);
    }
    Ok(inverse(&spec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    Trapezoid,
    Simpson,
}

/// Quadrature in `s` over the samples of the forcing. The step is the time
/// step of the forcing, which is taken to vanish outside its sample range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuhamelConfig {
    pub quadrature: Quadrature,
    /// Integrate over `s < t` only; otherwise over all `s`.
    pub retarded: bool,
}

impl Default for DuhamelConfig {
    fn default() -> Self {
        Self { quadrature: Quadrature::Trapezoid, retarded: true }
    }
}

/// Per-sample weights of `∫_lo^hi g(s) ds` for samples `g(t0 + k dt)`,
/// `k < count`. Composite cells are clipped proportionally to their overlap
/// with `[lo, hi]`, so weights of adjacent windows add up exactly.
pub fn window_weights(t0: f64, dt: f64, count: usize, quad: Quadrature, lo: f64, hi: f64) -> Vec<f64> {
    const TRAP: [f64; 2] = [0.5, 0.5];
    const SIMP: [f64; 3] = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
    let mut w = vec![0.0; count];
    if count < 2 || hi <= lo {
        return w;
    }
    let mut k = 0;
    while k + 1 < count {
        let coeffs: &[f64] = match quad {
            Quadrature::Simpson if k + 2 < count => &SIMP,
            _ => &TRAP,
        };
        let span = coeffs.len() - 1;
        let a = t0 + k as f64 * dt;
        let b = t0 + (k + span) as f64 * dt;
        let overlap = hi.min(b) - lo.max(a);
        if overlap > 0.0 {
            for (i, c) in coeffs.iter().enumerate() {
                w[k + i] += overlap * c;
            }
        }
        k += span;
    }
    w
}

fn spectra(field: &SpaceTimeField) -> Vec<Spectrum> {
    field.slices().par_iter().map(forward).collect()
}

fn accumulate(spectra: &[Spectrum], field: &SpaceTimeField, table: &SymbolTable, t: f64, weights: &[f64]) -> GridField {
    let grid = *field.grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, (w, spec)) in weights.iter().zip(spectra).enumerate() {
        if *w == 0.0 {
            continue;
        }
        let tau = t - field.time(k);
        for ((a, v), rate) in acc.iter_mut().zip(spec.values()).zip(&table.rate) {
            *a += v * Complex64::from_polar(*w, tau * rate);
        }
    }
    // U(t)U*(s) carries the square of the cutoff.
    for (a, c) in acc.iter_mut().zip(&table.cut) {
        *a *= c * c;
    }
    inverse(&Spectrum::new(grid, acc).expect("finite accumulation"))
}

fn integrate_windows(
    field: &SpaceTimeField,
    t_eval: &[f64],
    kind: PropagatorKind,
    quad: Quadrature,
    window: impl Fn(f64) -> (f64, f64) + Sync,
) -> Result<SpaceTimeField> {
    kind.validate()?;
    if t_eval.is_empty() {
        return domain("no evaluation times given");
    }
    for &t in t_eval {
        check_time(t)?;
    }
    let spectra = spectra(field);
    let table = SymbolTable::new(field.grid(), kind);
    let slices: Vec<GridField> = t_eval
        .par_iter()
        .map(|&t| {
            let (lo, hi) = window(t);
            let w = window_weights(field.t0(), field.dt(), field.len(), quad, lo, hi);
            accumulate(&spectra, field, &table, t, &w)
        })
        .collect();
    SpaceTimeField::from_times(t_eval, slices)
}

/// Trapezoid recurrence for the retarded integral at the sample times:
/// `R_{k+1} = e^{iΔa} R_k + (Δ/2)(e^{iΔa} F̂_k + F̂_{k+1})`.
fn retarded_on_samples(field: &SpaceTimeField, kind: PropagatorKind) -> Result<SpaceTimeField> {
    let grid = *field.grid();
    let table = SymbolTable::new(&grid, kind);
    let dt = field.dt();
    let step: Vec<Complex64> = table.rate.iter().map(|a| Complex64::from_polar(1.0, dt * a)).collect();
    let spectra = spectra(field);
    let mut r = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut out = Vec::with_capacity(field.len());
    let finish = |r: &[Complex64]| {
        let v = r.iter().zip(&table.cut).map(|(a, c)| a * (c * c)).collect();
        inverse(&Spectrum::new(grid, v).expect("finite accumulation"))
    };
    out.push(finish(&r));
    for k in 0..field.len() - 1 {
        let (a, b) = (spectra[k].values(), spectra[k + 1].values());
        for i in 0..r.len() {
            r[i] = step[i] * (r[i] + 0.5 * dt * a[i]) + 0.5 * dt * b[i];
        }
        out.push(finish(&r));
    }
    SpaceTimeField::new(field.t0(), dt, out)
}

/// `∫ U(t)U*(s) F(s) ds` at each `t` in `t_eval` (uniformly spaced), over
/// `s < t` when retarded and all `s` otherwise. The `-i` of the Duhamel
/// formula is omitted.
pub fn duhamel(
    field: &SpaceTimeField,
    t_eval: &[f64],
    kind: PropagatorKind,
    cfg: DuhamelConfig,
) -> Result<SpaceTimeField> {
    let on_samples = t_eval.len() == field.len() && t_eval.iter().enumerate().all(|(k, &t)| t == field.time(k));
    if cfg.retarded && cfg.quadrature == Quadrature::Trapezoid && on_samples && field.len() > 1 {
        kind.validate()?;
        return retarded_on_samples(field, kind);
    }
    let retarded = cfg.retarded;
    integrate_windows(field, t_eval, kind, cfg.quadrature, |t| {
        if retarded {
            (f64::NEG_INFINITY, t)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    })
}

/// As [`duhamel`] through the general quadrature path, never the recurrence.
pub fn duhamel_direct(
    field: &SpaceTimeField,
    t_eval: &[f64],
    kind: PropagatorKind,
    cfg: DuhamelConfig,
) -> Result<SpaceTimeField> {
    let retarded = cfg.retarded;
    integrate_windows(field, t_eval, kind, cfg.quadrature, |t| {
        if retarded {
            (f64::NEG_INFINITY, t)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    })
}

/// `T_j F(t) = ∫_{2^j ≤ t-s < 2^{j+1}} U(t)U*(s) F(s) ds`.
pub fn dyadic_piece(
    field: &SpaceTimeField,
    t_eval: &[f64],
    j: i32,
    kind: PropagatorKind,
    cfg: DuhamelConfig,
) -> Result<SpaceTimeField> {
    let near = 2f64.powi(j);
    let far = 2f64.powi(j + 1);
    integrate_windows(field, t_eval, kind, cfg.quadrature, |t| (t - far, t - near))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveRow {
    pub t: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveReport {
    pub sigma: f64,
    pub rows: Vec<DispersiveRow>,
    pub sup: f64,
    /// Ratio at the largest reported `|t|`.
    pub last: f64,
    /// Times skipped as below the grid's resolution.
    pub skipped: Vec<f64>,
}

/// `(4π)^{-d/2}`, the large-time value of the Schrödinger dispersive ratio
/// for Gaussian data.
pub fn schrodinger_gaussian_limit(d: usize) -> f64 {
    (4.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0)
}

/// Smallest `|t|` at which the discrete propagator resolves the decay.
pub fn resolution_time(kind: PropagatorKind, grid: &SpatialGrid) -> f64 {
    let h = grid.spacing();
    match kind {
        PropagatorKind::Schrodinger => 4.0 * h * h,
        _ => 4.0 * h,
    }
}

/// `‖U(t) f‖_∞ |t|^σ / ‖f‖_1` over `t_list`.
pub fn dispersive_check(kind: PropagatorKind, f: &GridField, t_list: &[f64]) -> Result<DispersiveReport> {
    let l1 = lebesgue_norm(f, 1.0)?;
    if l1 == 0.0 {
        return domain("dispersive check needs nonzero data");
    }
    let sigma = kind.decay_rate(f.grid().dim());
    let t_min = resolution_time(kind, f.grid());
    let (kept, skipped): (Vec<f64>, Vec<f64>) = t_list.iter().partition(|t| t.abs() >= t_min);
    let rows = kept
        .par_iter()
        .map(|&t| {
            let u = propagate(f, t, kind)?;
            Ok(DispersiveRow { t, ratio: u.max_abs() * t.abs().powf(sigma) / l1 })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let last = rows.iter().max_by(|a, b| a.t.abs().total_cmp(&b.t.abs())).map_or(0.0, |r| r.ratio);
    Ok(DispersiveReport { sigma, rows, sup, last, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub t: f64,
    pub j: i32,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovDispersiveReport {
    pub rows: Vec<LevelRow>,
    /// `(t, (Σ_j ratio_j(t)²)^{1/2})`
    pub aggregate: Vec<(f64, f64)>,
    pub sup: f64,
}

/// Per-level ratios `‖φ_j ∗ e^{it√-Δ} f‖_∞ |t|^{(d-1)/2} 2^{-j(d+1)/2}`
/// and their ℓ² aggregate in `j`.
pub fn besov_dispersive_check(f: &GridField, t_list: &[f64], part: &LPPartition) -> Result<BesovDispersiveReport> {
    let grid = *f.grid();
    let d = grid.dim() as f64;
    let spec = forward(f);
    let tail = part.tail_fraction(&spec);
    if tail > crate::norms::BESOV_TAIL_LIMIT {
        return Err(Error::Truncation { tail, limit: crate::norms::BESOV_TAIL_LIMIT });
    }
    for &t in t_list {
        check_time(t)?;
    }
    let radii = grid.freq_radii();
    let symbols: Vec<(i32, Vec<Complex64>)> =
        part.levels().map(|j| part.symbol(&grid, j).map(|s| (j, s))).collect::<Result<_>>()?;
    let per_t: Vec<Vec<LevelRow>> = t_list
        .par_iter()
        .map(|&t| {
            let evolved: Vec<Complex64> =
                spec.values().iter().zip(&radii).map(|(v, r)| v * Complex64::from_polar(1.0, t * r)).collect();
            symbols
                .iter()
                .map(|(j, sym)| {
                    let piece: Vec<Complex64> = evolved.iter().zip(sym).map(|(a, b)| a * b).collect();
                    let sup = inverse(&Spectrum::new(grid, piece).expect("finite")).max_abs();
                    let scale = t.abs().powf((d - 1.0) / 2.0) * 2f64.powf(-(*j as f64) * (d + 1.0) / 2.0);
                    LevelRow { t, j: *j, ratio: sup * scale }
                })
                .collect()
        })
        .collect();
    let aggregate = per_t
        .iter()
        .zip(t_list)
        .map(|(rows, &t)| (t, rows.iter().map(|r| r.ratio * r.ratio).sum::<f64>().sqrt()))
        .collect();
    let rows: Vec<LevelRow> = per_t.into_iter().flatten().collect();
    let sup = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(BesovDispersiveReport { rows, aggregate, sup })
}

pub fn write_dispersive_csv<W: Write>(report: &DispersiveReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "ratio"])?;
    for r in &report.rows {
        w.write_record([r.t.to_string(), r.ratio.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_besov_dispersive_csv<W: Write>(report: &BesovDispersiveReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "j", "ratio"])?;
    for r in &report.rows {
        w.write_record([r.t.to_string(), r.j.to_string(), r.ratio.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::{make_test_function, TestFunction};
    use std::f64::consts::PI;

    fn gaussian_1d(n: usize, l: f64, w: f64) -> GridField {
        make_test_function(&TestFunction::gaussian(w), SpatialGrid::new(1, n, l).unwrap()).unwrap()
    }

    #[test]
    fn time_zero_is_identity() {
        let f = gaussian_1d(256, 12.0, 1.0);
        for kind in [PropagatorKind::Schrodinger, PropagatorKind::HalfWave] {
            assert!(propagate(&f, 0.0, kind).unwrap().max_diff(&f) < 1e-12);
        }
        assert!(propagate(&f, f64::NAN, PropagatorKind::Schrodinger).is_err());
    }

    #[test]
    fn schrodinger_gaussian_closed_form() {
        let f = gaussian_1d(1024, 40.0, 1.0);
        let u = propagate(&f, 1.0, PropagatorKind::Schrodinger).unwrap();
        let g = f.grid();
        let z = Complex64::new(1.0, 2.0);
        let mut err: f64 = 0.0;
        for k in 0..g.len() {
            let x = g.coord(k);
            let exact = z.powf(-0.5) * (-(x * x) / (2.0 * z)).exp();
            err = err.max((u.values()[k] - exact).norm());
        }
        assert!(err < 1e-8, "{err}");
        assert!((u.values()[512].norm() - 5f64.powf(-0.25)).abs() < 1e-8);
    }

    #[test]
    fn half_wave_translates_positive_frequencies() {
        // e^{itξ} on ξ > 0 maps f to f(· + t).
        let g = SpatialGrid::new(1, 1024, 40.0).unwrap();
        // f̂ = bump on ξ ∈ (1, 3)
        let spec = Spectrum::from_fn(g, |xi| Complex64::new(crate::profiles::bump(xi[0] - 2.0), 0.0)).unwrap();
        let f = inverse(&spec);
        let shift = 64;
        let t = shift as f64 * g.spacing();
        let u = propagate(&f, t, PropagatorKind::HalfWave).unwrap();
        for k in 0..g.len() {
            let src = (k + shift) % g.len();
            assert!((u.values()[k] - f.values()[src]).norm() < 1e-10);
        }
    }

    #[test]
    fn window_weights_tile() {
        for quad in [Quadrature::Trapezoid, Quadrature::Simpson] {
            let full = window_weights(0.0, 0.1, 12, quad, f64::NEG_INFINITY, f64::INFINITY);
            assert!((full.iter().sum::<f64>() - 1.1).abs() < 1e-14);
            let a = window_weights(0.0, 0.1, 12, quad, f64::NEG_INFINITY, 0.37);
            let b = window_weights(0.0, 0.1, 12, quad, 0.37, f64::INFINITY);
            for i in 0..12 {
                assert!((a[i] + b[i] - full[i]).abs() < 1e-15);
            }
        }
        let simp = window_weights(0.0, 1.0, 5, Quadrature::Simpson, f64::NEG_INFINITY, f64::INFINITY);
        let expect = [1.0 / 3.0, 4.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        for (a, b) in simp.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn duhamel_trivial_cases() {
        let f = gaussian_1d(128, 12.0, 1.0);
        let zero = SpaceTimeField::separable(&f, 0.0, 0.1, 11, |_| 0.0).unwrap();
        let out = duhamel(&zero, &[0.5, 1.0], PropagatorKind::Schrodinger, DuhamelConfig::default()).unwrap();
        assert!(out.slices().iter().all(|s| s.max_abs() == 0.0));

        let late = SpaceTimeField::separable(&f, 2.0, 0.1, 11, |_| 1.0).unwrap();
        let out = duhamel(&late, &[1.0, 1.5], PropagatorKind::Schrodinger, DuhamelConfig::default()).unwrap();
        assert!(out.slices().iter().all(|s| s.max_abs() == 0.0));

        let out = dyadic_piece(&late, &[12.0], 2, PropagatorKind::Schrodinger, DuhamelConfig::default()).unwrap();
        assert_eq!(out.slice(0).max_abs(), 0.0);
    }

    #[test]
    fn recurrence_matches_direct_quadrature() {
        let f = gaussian_1d(256, 16.0, 1.0);
        let field = SpaceTimeField::separable(&f, 0.0, 0.05, 21, |s| (1.0 + s).cos()).unwrap();
        let times = field.times();
        for kind in [PropagatorKind::Schrodinger, PropagatorKind::localized()] {
            let fast = duhamel(&field, &times, kind, DuhamelConfig::default()).unwrap();
            let slow = duhamel_direct(&field, &times, kind, DuhamelConfig::default()).unwrap();
            for (a, b) in fast.slices().iter().zip(slow.slices()) {
                assert!(a.max_diff(b) < 1e-12);
            }
        }
    }

    #[test]
    fn dispersive_limit_one_dimension() {
        let f = gaussian_1d(2048, 256.0, 2.0);
        let rep = dispersive_check(PropagatorKind::Schrodinger, &f, &[1e-6, 10.0, 100.0]).unwrap();
        assert_eq!(rep.skipped, vec![1e-6]);
        assert!((rep.last - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-4, "{}", rep.last);
        assert!(dispersive_check(PropagatorKind::Schrodinger, &GridField::zeros(*f.grid()), &[1.0]).is_err());
    }
}
