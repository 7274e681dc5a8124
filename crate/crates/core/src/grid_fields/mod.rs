//! Periodic spatial grids, the discrete Fourier transform under the
//! convention `f̂(ξ) = ∫ f(x) e^{-ix·ξ} dx`, frequency multipliers and the
//! Littlewood–Paley partition.
//!
//! Grid points are `x_k = -L + k h` with `h = 2L/n`; frequencies are
//! `ξ_m = (m - n/2) π/L`, so the zero frequency sits at index `n/2` on each
//! axis.

mod snapshot;

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::profiles::{bump, lp_profile_log};
use crate::Complex64;

pub use snapshot::{read_snapshot, write_slice_csv, write_snapshot, Snapshot};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    dim: usize,
    n: usize,
    half_extent: f64,
}

impl SpatialGrid {
    pub fn new(dim: usize, points_per_axis: usize, half_extent: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return domain(format!("dimension must be 1, 2 or 3, got {dim}"));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return domain(format!("points per axis must be a power of two ≥ 16, got {points_per_axis}"));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return domain(format!("half extent must be positive, got {half_extent}"));
        }
        Ok(Self { dim, n: points_per_axis, half_extent })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_extent
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn freq_cell_volume(&self) -> f64 {
        self.freq_spacing().powi(self.dim as i32)
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.half_extent + k as f64 * self.spacing()
    }

    pub fn freq(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.freq_spacing()
    }

    /// Per-axis indices of a flat index; axis 0 varies slowest.
    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    pub fn freq_point(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.freq(idx[a]);
        }
        xi
    }

    /// `|x|` at every grid point.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|i| norm(&self.point(i))).collect()
    }

    /// `|ξ|` at every frequency sample.
    pub fn freq_radii(&self) -> Vec<f64> {
        (0..self.len()).map(|i| norm(&self.freq_point(i))).collect()
    }

    pub fn zero_freq_index(&self) -> usize {
        self.flat_index(&[self.n / 2; 3])
    }

    /// The grid with the same point count on `[-L/2^k, L/2^k)^d`.
    pub fn dilated(&self, k: i32) -> Self {
        Self { half_extent: self.half_extent * 2f64.powi(-k), ..*self }
    }

    fn parity(&self, flat: usize) -> bool {
        self.multi_index(flat)[..self.dim].iter().sum::<usize>() % 2 == 1
    }
}

fn norm(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn check_finite(values: &[Complex64], what: &str) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numeric(format!("{what} sample {i} is not finite")));
    }
    Ok(())
}

/// Complex samples of a function on a [`SpatialGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("expected {} samples, got {}", grid.len(), values.len()));
        }
        check_finite(&values, "field")?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self { grid, values: vec![ZERO; grid.len()] }
    }

    /// Sample `f` at every grid point; unused coordinates are zero.
    pub fn from_fn(grid: SpatialGrid, f: impl Fn(&[f64; 3]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|f - g|` over the grid.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest `|f|` on the faces of the periodic box relative to `sup |f|`.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.n;
        let edge = (0..self.grid.len())
            .filter(|&i| self.grid.multi_index(i)[..self.grid.dim].iter().any(|&k| k == 0 || k == n - 1))
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max);
        edge / peak
    }

    /// Rejects data that has not decayed to `tol · sup|f|` at the boundary.
    pub fn check_boundary_decay(&self, tol: f64) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio > tol {
            return domain(format!("boundary value {ratio:.3e} of sup exceeds {tol:.1e}; enlarge the domain"));
        }
        Ok(())
    }
}

/// Frequency samples `f̂(ξ_m)` of a [`GridField`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("expected {} samples, got {}", grid.len(), values.len()));
        }
        check_finite(&values, "spectrum")?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(&[f64; 3]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.freq_point(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn at_zero(&self) -> Complex64 {
        self.values[self.grid.zero_freq_index()]
    }

    /// Pointwise product with a sampled symbol.
    pub fn multiplied(&self, symbol: &[Complex64]) -> Self {
        let values = self.values.iter().zip(symbol).map(|(a, b)| a * b).collect();
        Self { grid: self.grid, values }
    }

    /// `‖f‖₂²` by the discrete Plancherel identity.
    pub fn l2_norm_sq(&self) -> f64 {
        let w = self.grid.freq_cell_volume() / (2.0 * PI).powi(self.grid.dim as i32);
        w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
    if inverse {
        p.plan_fft_inverse(n)
    } else {
        p.plan_fft_forward(n)
    }
}

fn fft_nd(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    let total = data.len();
    let mut line = vec![ZERO; n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = stride * n;
        for b in 0..total / block {
            for s in 0..stride {
                let base = b * block + s;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// `f̂(ξ_m) ≈ h^d Σ_k f(x_k) e^{-i x_k·ξ_m}`.
pub fn forward(f: &GridField) -> Spectrum {
    let g = f.grid;
    let mut data: Vec<Complex64> =
        f.values.iter().enumerate().map(|(i, v)| if g.parity(i) { -v } else { *v }).collect();
    fft_nd(&mut data, g.dim, g.n, false);
    let w = g.cell_volume();
    for (i, v) in data.iter_mut().enumerate() {
        *v *= if g.parity(i) { -w } else { w };
    }
    Spectrum { grid: g, values: data }
}

/// `f(x_k) ≈ (Δξ/2π)^d Σ_m f̂(ξ_m) e^{i x_k·ξ_m}`.
pub fn inverse(s: &Spectrum) -> GridField {
    let g = s.grid;
    let mut data: Vec<Complex64> =
        s.values.iter().enumerate().map(|(i, v)| if g.parity(i) { -v } else { *v }).collect();
    fft_nd(&mut data, g.dim, g.n, true);
    let w = (g.freq_spacing() / (2.0 * PI)).powi(g.dim as i32);
    for (i, v) in data.iter_mut().enumerate() {
        *v *= if g.parity(i) { -w } else { w };
    }
    GridField { grid: g, values: data }
}

/// Forward or inverse transform, returning raw samples.
pub fn transform(values: &[Complex64], grid: SpatialGrid, direction: Direction) -> Result<Vec<Complex64>> {
    Ok(match direction {
        Direction::Forward => forward(&GridField::new(grid, values.to_vec())?).values,
        Direction::Inverse => inverse(&Spectrum::new(grid, values.to_vec())?).values,
    })
}

/// Sample a symbol on the frequency grid, rejecting non-finite values.
pub fn sample_symbol(grid: &SpatialGrid, m: impl Fn(&[f64; 3]) -> Complex64) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let xi = grid.freq_point(i);
        let v = m(&xi);
        if !v.re.is_finite() || !v.im.is_finite() {
            return domain(format!("symbol is not finite at ξ = {:?}", &xi[..grid.dim]));
        }
        out.push(v);
    }
    Ok(out)
}

/// Sample a radial symbol `m(|ξ|)`.
pub fn sample_radial(grid: &SpatialGrid, m: impl Fn(f64) -> Complex64) -> Result<Vec<Complex64>> {
    sample_symbol(grid, |xi| m(norm(xi)))
}

/// `F^{-1}(m · F f)`.
pub fn apply_multiplier(f: &GridField, m: impl Fn(&[f64; 3]) -> Complex64) -> Result<GridField> {
    let symbol = sample_symbol(&f.grid, m)?;
    Ok(inverse(&forward(f).multiplied(&symbol)))
}

/// Relative tolerance on `|f̂(0)|` for negative powers of `|ξ|`.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// `|ξ|^ρ` on the grid. The zero frequency maps to 0 for `ρ ≠ 0` and to
/// 1 for `ρ = 0`.
pub fn power_symbol(grid: &SpatialGrid, rho: f64) -> Vec<Complex64> {
    grid.freq_radii()
        .into_iter()
        .map(|r| Complex64::new(if r == 0.0 && rho != 0.0 { 0.0 } else { r.powf(rho) }, 0.0))
        .collect()
}

/// `(√-Δ)^ρ f`. For `ρ < 0` the zero mode must vanish to
/// [`ZERO_MODE_TOL`] relative to `sup|f̂|`.
pub fn fractional_power(f: &GridField, rho: f64) -> Result<GridField> {
    let spec = forward(f);
    if rho < 0.0 {
        let peak = spec.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let z = spec.at_zero().norm();
        if z > ZERO_MODE_TOL * peak.max(f64::MIN_POSITIVE) {
            return domain(format!("negative power needs f̂(0) = 0, found |f̂(0)| = {z:.3e}"));
        }
    }
    Ok(inverse(&spec.multiplied(&power_symbol(&f.grid, rho))))
}

/// Dyadic partition `φ̂_j(ξ) = φ̂(2^{-j}|ξ|)` for `j_min ≤ j ≤ j_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPPartition {
    j_min: i32,
    j_max: i32,
}

impl LPPartition {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return domain(format!("empty partition range [{j_min}, {j_max}]"));
        }
        Ok(Self { j_min, j_max })
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// `[2^{j_min}, 2^{j_max}]`: the radii on which the truncated sum is 1.
    pub fn covered_band(&self) -> (f64, f64) {
        (2f64.powi(self.j_min), 2f64.powi(self.j_max))
    }

    pub fn weight(&self, j: i32, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            lp_profile_log(r.log2() - j as f64)
        }
    }

    /// `Σ_{j_min ≤ j ≤ j_max} φ̂_j(r)`.
    pub fn total(&self, r: f64) -> f64 {
        self.levels().map(|j| self.weight(j, r)).sum()
    }

    fn check(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::Range { index: j, min: self.j_min, max: self.j_max });
        }
        Ok(())
    }

    pub fn symbol(&self, grid: &SpatialGrid, j: i32) -> Result<Vec<Complex64>> {
        self.check(j)?;
        sample_radial(grid, |r| Complex64::new(self.weight(j, r), 0.0))
    }

    /// `‖(1 - Σ_j φ̂_j) f̂‖₂ / ‖f̂‖₂`; zero for the zero spectrum.
    pub fn tail_fraction(&self, spec: &Spectrum) -> f64 {
        let radii = spec.grid.freq_radii();
        let (mut tail, mut total) = (0.0, 0.0);
        for (v, r) in spec.values.iter().zip(radii) {
            let m = v.norm_sqr();
            total += m;
            tail += m * (1.0 - self.total(r)).powi(2);
        }
        if total == 0.0 {
            0.0
        } else {
            (tail / total).sqrt()
        }
    }
}

/// `f ∗ φ_j`.
pub fn lp_projection(f: &GridField, part: &LPPartition, j: i32) -> Result<GridField> {
    let symbol = part.symbol(&f.grid, j)?;
    Ok(inverse(&forward(f).multiplied(&symbol)))
}

/// Analytic test functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(-|x-c|²/(2w²)) e^{i ξ₀·x}`.
    Gaussian { center: [f64; 3], width: f64, modulation: [f64; 3] },
    /// `exp(-1/(1-u²))` rescaled to `(a, b)` in `|x|` (or `x` when `d = 1`).
    SmoothBump { a: f64, b: f64, normalize: bool },
    /// Inverse transform of `φ(2^{-level}|ξ|)` with `φ` a bump on `[1/2, 2]`.
    AnnularBump { level: i32 },
}

impl TestFunction {
    pub fn gaussian(width: f64) -> Self {
        Self::Gaussian { center: [0.0; 3], width, modulation: [0.0; 3] }
    }
}

/// The annular profile `φ(r)`: a bump supported in `[1/2, 2]` with peak 1
/// at `r = 5/4`.
pub fn annular_profile(r: f64) -> f64 {
    bump((r - 1.25) / 0.75) * std::f64::consts::E
}

pub fn make_test_function(kind: &TestFunction, grid: SpatialGrid) -> Result<GridField> {
    match *kind {
        TestFunction::Gaussian { center, width, modulation } => {
            if !(width > 0.0 && width.is_finite()) {
                return domain(format!("Gaussian width must be positive, got {width}"));
            }
            GridField::from_fn(grid, |x| {
                let mut r2 = 0.0;
                let mut phase = 0.0;
                for a in 0..grid.dim {
                    r2 += (x[a] - center[a]).powi(2);
                    phase += modulation[a] * x[a];
                }
                Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), phase)
            })
        }
        TestFunction::SmoothBump { a, b, normalize } => {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return domain(format!("empty bump support ({a}, {b})"));
            }
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let one_d = grid.dim == 1;
            let f = GridField::from_fn(grid, |x| {
                let s = if one_d { x[0] } else { norm(x) };
                Complex64::new(bump((s - mid) / half), 0.0)
            })?;
            if normalize {
                let mass: f64 = f.values.iter().map(|v| v.re).sum::<f64>() * grid.cell_volume();
                if mass <= 0.0 {
                    return domain("bump support contains no grid point");
                }
                Ok(f.scaled(Complex64::new(1.0 / mass, 0.0)))
            } else {
                Ok(f)
            }
        }
        TestFunction::AnnularBump { level } => {
            let s = 2f64.powi(-level);
            let spec = Spectrum::new(grid, sample_radial(&grid, |r| Complex64::new(annular_profile(s * r), 0.0))?)?;
            Ok(inverse(&spec))
        }
    }
}

/// Uniformly spaced stack of fields sharing one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    t0: f64,
    dt: f64,
    slices: Vec<GridField>,
}

impl SpaceTimeField {
    pub fn new(t0: f64, dt: f64, slices: Vec<GridField>) -> Result<Self> {
        if slices.is_empty() {
            return domain("space-time field needs at least one slice");
        }
        if !(dt > 0.0 && dt.is_finite() && t0.is_finite()) {
            return domain(format!("invalid time axis t0 = {t0}, dt = {dt}"));
        }
        let g = slices[0].grid;
        if slices.iter().any(|s| s.grid != g) {
            return domain("all slices must share one grid");
        }
        Ok(Self { t0, dt, slices })
    }

    /// Build from explicit times; spacing must be uniform to `1e-12`.
    pub fn from_times(times: &[f64], slices: Vec<GridField>) -> Result<Self> {
        if times.len() != slices.len() {
            return domain("one slice per time required");
        }
        let dt = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
        for (i, t) in times.iter().enumerate() {
            if (t - (times[0] + i as f64 * dt)).abs() > 1e-12 {
                return domain(format!("time samples are not uniform at index {i}"));
            }
        }
        Self::new(times[0], dt, slices)
    }

    /// `g(t) · f(x)` sampled at `t0 + k dt`, `k < count`.
    pub fn separable(f: &GridField, t0: f64, dt: f64, count: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        let slices = (0..count).map(|k| f.scaled(Complex64::new(g(t0 + k as f64 * dt), 0.0))).collect();
        Self::new(t0, dt, slices)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.slices[0].grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn slices(&self) -> &[GridField] {
        &self.slices
    }

    pub fn slice(&self, k: usize) -> &GridField {
        &self.slices[k]
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { t0: self.t0, dt: self.dt, slices: self.slices.iter().map(|s| s.scaled(c)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize, l: f64) -> SpatialGrid {
        SpatialGrid::new(1, n, l).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(SpatialGrid::new(4, 16, 1.0).is_err());
        assert!(SpatialGrid::new(1, 24, 1.0).is_err());
        assert!(SpatialGrid::new(1, 8, 1.0).is_err());
        assert!(SpatialGrid::new(2, 16, 0.0).is_err());
        let g = SpatialGrid::new(2, 16, 4.0).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.freq(8), 0.0);
        assert_eq!(g.zero_freq_index(), 8 * 16 + 8);
    }

    #[test]
    fn zero_transforms_to_zero() {
        let g = grid1(64, 5.0);
        let s = forward(&GridField::zeros(g));
        assert!(s.values().iter().all(|v| *v == ZERO));
    }

    #[test]
    fn gaussian_transform_at_origin() {
        let g = grid1(1024, 20.0);
        let f = make_test_function(&TestFunction::gaussian(1.0), g).unwrap();
        let s = forward(&f);
        assert!((s.at_zero().re - (2.0 * PI).sqrt()).abs() < 1e-10);
        // Whole spectrum against √(2π) e^{-ξ²/2}.
        let err = (0..g.len())
            .map(|m| (s.values()[m] - (2.0 * PI).sqrt() * (-g.freq(m).powi(2) / 2.0).exp()).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn non_finite_rejected() {
        let g = grid1(16, 1.0);
        let mut v = vec![ZERO; 16];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(GridField::new(g, v), Err(Error::Numeric(_))));
        let r = apply_multiplier(&GridField::zeros(g), |xi| Complex64::new(1.0 / xi[0], 0.0));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn translation_multiplier() {
        let g = grid1(256, 10.0);
        let f = make_test_function(&TestFunction::gaussian(0.7), g).unwrap();
        let shift = 16;
        let a = shift as f64 * g.spacing();
        let out = apply_multiplier(&f, |xi| Complex64::from_polar(1.0, xi[0] * a)).unwrap();
        for k in 0..g.len() {
            let src = (k + shift) % g.len();
            assert!((out.values()[k] - f.values()[src]).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_power_removes_mean_only() {
        let g = grid1(256, 20.0);
        let f = make_test_function(&TestFunction::AnnularBump { level: 0 }, g).unwrap();
        let out = inverse(&forward(&f).multiplied(&power_symbol(&g, 0.0)));
        assert!(out.max_diff(&f) < 1e-10);
        assert!(fractional_power(&make_test_function(&TestFunction::gaussian(1.0), g).unwrap(), -0.5).is_err());
    }

    #[test]
    fn smooth_bump_even_and_supported() {
        let g = grid1(4096, 1.0);
        let f = make_test_function(&TestFunction::SmoothBump { a: -0.1, b: 0.1, normalize: true }, g).unwrap();
        for k in 1..g.len() {
            let x = g.coord(k);
            let mirror = g.len() - k;
            assert!((f.values()[k] - f.values()[mirror]).norm() < 1e-9);
            if x.abs() >= 0.1 {
                assert_eq!(f.values()[k], ZERO);
            }
        }
        let mass: f64 = f.values().iter().map(|v| v.re).sum::<f64>() * g.cell_volume();
        assert!((mass - 1.0).abs() < 1e-14);
        assert!(make_test_function(&TestFunction::SmoothBump { a: 0.2, b: 0.2, normalize: false }, g).is_err());
        assert!(make_test_function(&TestFunction::gaussian(0.0), g).is_err());
    }

    #[test]
    fn annular_bump_spectrum_support() {
        let g = SpatialGrid::new(2, 64, 40.0).unwrap();
        let f = make_test_function(&TestFunction::AnnularBump { level: 0 }, g).unwrap();
        let s = forward(&f);
        let radii = g.freq_radii();
        let leak = s
            .values()
            .iter()
            .zip(&radii)
            .filter(|(_, r)| **r <= 0.5 || **r >= 2.0)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max);
        assert!(leak < 1e-8);
    }

    #[test]
    fn lp_projections_reassemble_ring_data() {
        let g = grid1(512, 40.0);
        // f̂ supported in 1 ≤ |ξ| ≤ 2
        let spec =
            Spectrum::new(g, sample_radial(&g, |r| Complex64::new(bump((r - 1.5) / 0.5), 0.0)).unwrap()).unwrap();
        let f = inverse(&spec);
        let part = LPPartition::new(-3, 3).unwrap();
        let mut sum = GridField::zeros(g);
        for j in [0, 1] {
            let p = lp_projection(&f, &part, j).unwrap();
            for (a, b) in sum.values.iter_mut().zip(p.values()) {
                *a += b;
            }
        }
        assert!(sum.max_diff(&f) < 1e-10 * f.max_abs().max(1.0));
        assert!(matches!(lp_projection(&f, &part, 4), Err(Error::Range { .. })));
    }

    #[test]
    fn constant_is_invisible_to_partition() {
        let g = grid1(64, 8.0);
        let f = GridField::new(g, vec![Complex64::new(2.0, 0.0); 64]).unwrap();
        let part = LPPartition::new(-2, 2).unwrap();
        for j in part.levels() {
            assert!(lp_projection(&f, &part, j).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn space_time_validation() {
        let g = grid1(16, 1.0);
        let f = GridField::zeros(g);
        assert!(SpaceTimeField::from_times(&[0.0, 0.5, 1.1], vec![f.clone(), f.clone(), f.clone()]).is_err());
        let st = SpaceTimeField::from_times(&[0.0, 0.5, 1.0], vec![f.clone(), f.clone(), f.clone()]).unwrap();
        assert_eq!(st.times(), vec![0.0, 0.5, 1.0]);
        let other = GridField::zeros(grid1(32, 1.0));
        assert!(SpaceTimeField::new(0.0, 1.0, vec![f, other]).is_err());
    }
}
