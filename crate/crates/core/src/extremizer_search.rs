//! Derivative-free probing of the retarded operator's mixed-norm ratio over
//! a parametric family of forcing terms.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid_fields::{GridField, SpaceTimeField, SpatialGrid};
use crate::norms::{mixed_norm, NormSpec, SpatialNorm};
use crate::propagators::{duhamel, DuhamelConfig, PropagatorKind};
use crate::Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

/// Separable Gaussian forcing
/// `F(s, x) = exp(-((s - 3τ)/τ)²) exp(-|x - x₀|²/(2w²)) e^{iξ₀x₁}`
/// with parameters `[log₂ w, ξ₀, x₀, log₂ τ]`; `x₀` and `ξ₀` act along
/// the first axis.
pub const GAUSSIAN_PARAMS: [&str; 4] = ["log2_width", "modulation", "translation", "log2_tau"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioProblem {
    pub kind: PropagatorKind,
    pub grid: SpatialGrid,
    /// Forcing and output live on `[0, T]`.
    pub horizon: f64,
    pub dt: f64,
    pub output: NormSpec,
    pub input: NormSpec,
    pub bounds: Vec<ParamRange>,
    pub initial: Vec<f64>,
}

impl RatioProblem {
    pub fn times(&self) -> Vec<f64> {
        let count = (self.horizon / self.dt).round() as usize + 1;
        (0..count).map(|k| k as f64 * self.dt).collect()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.bounds.len() {
            return domain(format!("expected {} parameters, got {}", self.bounds.len(), params.len()));
        }
        for (v, b) in params.iter().zip(&self.bounds) {
            if !(*v >= b.lo && *v <= b.hi) {
                return domain(format!("{} = {v} outside [{}, {}]", b.name, b.lo, b.hi));
            }
        }
        Ok(())
    }

    pub fn forcing(&self, params: &[f64]) -> Result<SpaceTimeField> {
        self.check_params(params)?;
        let (w, xi0, x0, tau) = (params[0].exp2(), params[1], params[2], params[3].exp2());
        let profile = GridField::from_fn(self.grid, |x| {
            let mut r2 = (x[0] - x0).powi(2);
            r2 += x[1] * x[1] + x[2] * x[2];
            Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), xi0 * x[0])
        })?;
        let count = self.times().len();
        SpaceTimeField::separable(&profile, 0.0, self.dt, count, |s| (-((s - 3.0 * tau) / tau).powi(2)).exp())
    }

    /// The same problem on `[0, T]` with the grid resized by
    /// [`grid_for_horizon`].
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        let mut p = self.clone();
        p.horizon = horizon;
        p.grid = grid_for_horizon(self.grid.dim(), horizon)?;
        Ok(p)
    }
}

/// Grid wide enough that packets from the parameter boxes of the presets
/// stay clear of the periodic boundary up to time `T`.
pub fn grid_for_horizon(dim: usize, horizon: f64) -> Result<SpatialGrid> {
    let half = 8.0 * horizon + 32.0;
    let n = ((2.0 * half / 0.375).ceil() as usize).next_power_of_two().max(16);
    SpatialGrid::new(dim, n, half)
}

/// `‖∫_{s<t} U(t)U*(s)F(s) ds‖_out / ‖F‖_in`.
pub fn ratio_for_field(p: &RatioProblem, forcing: &SpaceTimeField) -> Result<f64> {
    let input = mixed_norm(forcing, &p.input)?;
    if !(input > 0.0) {
        return domain("the forcing has zero input norm");
    }
    let u = duhamel(forcing, &forcing.times(), p.kind, DuhamelConfig::default())?;
    Ok(mixed_norm(&u, &p.output)? / input)
}

pub fn ratio_objective(p: &RatioProblem, params: &[f64]) -> Result<f64> {
    ratio_for_field(p, &p.forcing(params)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub ratio: f64,
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_params: Vec<f64>,
    pub best_ratio: f64,
    pub trace: Vec<TraceRow>,
}

/// Equispaced points scanned in parallel before the golden-section stage.
pub const SCAN_POINTS: usize = 5;
pub const GOLDEN_STEPS: usize = 8;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Coordinate-wise ascent: each iteration picks the next coordinate of a
/// seeded permutation, scans it coarsely, refines by golden section inside
/// the best bracket, and keeps the result only if it strictly improves.
pub fn maximize_coordinatewise(
    f: impl Fn(&[f64]) -> Result<f64> + Sync,
    bounds: &[ParamRange],
    initial: &[f64],
    iterations: usize,
    seed: u64,
) -> Result<SearchResult> {
    if iterations == 0 {
        return domain("need at least one iteration");
    }
    if initial.len() != bounds.len() {
        return domain("initial point and box differ in dimension");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = initial.to_vec();
    let mut best_ratio = f(&best)?;
    let mut trace = vec![TraceRow { iter: 0, ratio: best_ratio, params: best.clone() }];
    let mut order: Vec<usize> = Vec::new();
    for iter in 1..=iterations {
        if order.is_empty() {
            order = (0..bounds.len()).collect();
            order.shuffle(&mut rng);
            order.reverse();
        }
        let c = order.pop().expect("non-empty order");
        let ParamRange { lo, hi, .. } = bounds[c];
        if hi > lo {
            let at = |x: f64| {
                let mut p = best.clone();
                p[c] = x;
                p
            };
            let eval = |x: f64| f(&at(x)).map(|v| (x, v));
            let grid: Vec<f64> =
                (0..SCAN_POINTS).map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64).collect();
            let scanned: Vec<(f64, f64)> = grid.par_iter().map(|&x| eval(x)).collect::<Result<_>>()?;
            let mut cand =
                scanned.iter().copied().fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            let i = scanned.iter().position(|s| s.0 == cand.0).unwrap_or(0);
            let (mut a, mut b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(SCAN_POINTS - 1)]);
            let mut x1 = b - INV_PHI * (b - a);
            let mut x2 = a + INV_PHI * (b - a);
            let (mut f1, mut f2) = (eval(x1)?.1, eval(x2)?.1);
            for _ in 0..GOLDEN_STEPS {
                for (x, v) in [(x1, f1), (x2, f2)] {
                    if v > cand.1 {
                        cand = (x, v);
                    }
                }
                if f1 >= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - INV_PHI * (b - a);
                    f1 = eval(x1)?.1;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + INV_PHI * (b - a);
                    f2 = eval(x2)?.1;
                }
            }
            for (x, v) in [(x1, f1), (x2, f2)] {
                if v > cand.1 {
                    cand = (x, v);
                }
            }
            if cand.1 > best_ratio {
                best_ratio = cand.1;
                best[c] = cand.0;
            }
        }
        trace.push(TraceRow { iter, ratio: best_ratio, params: best.clone() });
    }
    Ok(SearchResult { best_params: best, best_ratio, trace })
}

pub fn coordinate_search(p: &RatioProblem, iterations: usize, seed: u64) -> Result<SearchResult> {
    p.check_params(&p.initial)?;
    maximize_coordinatewise(|x| ratio_objective(p, x), &p.bounds, &p.initial, iterations, seed)
}

pub fn write_trace_csv<W: Write>(res: &SearchResult, names: &[String], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iter".to_string(), "ratio".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for row in &res.trace {
        let mut rec = vec![row.iter.to_string(), format!("{:e}", row.ratio)];
        rec.extend(row.params.iter().map(|v| format!("{v:e}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Best ratio per horizon, with the least-squares slope of ratio against
/// `ln T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonStudy {
    pub horizons: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope_log_t: f64,
    /// Largest relative change between successive horizons.
    pub max_relative_change: f64,
}

pub fn horizon_study(p: &RatioProblem, horizons: &[f64], iterations: usize, seed: u64) -> Result<HorizonStudy> {
    if horizons.len() < 2 {
        return domain("need at least two horizons");
    }
    let ratios: Vec<f64> = horizons
        .iter()
        .map(|&t| coordinate_search(&p.with_horizon(t)?, iterations, seed).map(|r| r.best_ratio))
        .collect::<Result<_>>()?;
    let lx: Vec<f64> = horizons.iter().map(|t| t.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ratios.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ratios).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let max_relative_change = ratios.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
    Ok(HorizonStudy { horizons: horizons.to_vec(), ratios, slope_log_t: sxy / sxx, max_relative_change })
}

pub const PRESETS: [&str; 2] = ["schrodinger-1d-weak", "schrodinger-1d-strong"];

/// Schrödinger on the line at the critical point `(q, r) = (4, 4)` with
/// input `L^{16/15}_t L^{8/7}_x`. `-weak` measures the output in
/// `L^{4,∞}_t L⁴_x`; `-strong` in `L⁴_t L⁴_x`.
pub fn preset(name: &str, horizon: f64) -> Result<RatioProblem> {
    let p_out = match name {
        "schrodinger-1d-weak" => f64::INFINITY,
        "schrodinger-1d-strong" => 4.0,
        _ => return domain(format!("unknown preset {name:?}; known: {}", PRESETS.join(", "))),
    };
    if !(horizon >= 8.0 && horizon.is_finite()) {
        return domain(format!("horizon must be ≥ 8, got {horizon}"));
    }
    let range = |name: &str, lo: f64, hi: f64| ParamRange { name: name.into(), lo, hi };
    Ok(RatioProblem {
        kind: PropagatorKind::Schrodinger,
        grid: grid_for_horizon(1, horizon)?,
        horizon,
        dt: 0.125,
        output: NormSpec::mixed(4.0, p_out, SpatialNorm::Lebesgue { r: 4.0 }),
        input: NormSpec::mixed(16.0 / 15.0, 16.0 / 15.0, SpatialNorm::Lebesgue { r: 8.0 / 7.0 }),
        bounds: vec![
            range(GAUSSIAN_PARAMS[0], 0.0, 2.0),
            range(GAUSSIAN_PARAMS[1], -1.0, 1.0),
            range(GAUSSIAN_PARAMS[2], -4.0, 4.0),
            range(GAUSSIAN_PARAMS[3], -2.0, 1.0),
        ],
        initial: vec![0.0; 4],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxed(n: usize, lo: f64, hi: f64) -> Vec<ParamRange> {
        (0..n).map(|i| ParamRange { name: format!("p{i}"), lo, hi }).collect()
    }

    #[test]
    fn flat_objective_keeps_initial() {
        let b = boxed(3, -1.0, 1.0);
        let r = maximize_coordinatewise(|_| Ok(2.0), &b, &[0.1, 0.2, 0.3], 6, 9).unwrap();
        assert_eq!(r.best_params, vec![0.1, 0.2, 0.3]);
        assert!(r.trace.iter().all(|t| t.ratio == 2.0));
    }

    #[test]
    fn finds_concave_peak() {
        let b = boxed(2, -2.0, 2.0);
        let f = |x: &[f64]| Ok(-(x[0] - 0.7).powi(2) - (x[1] + 1.1).powi(2));
        let r = maximize_coordinatewise(f, &b, &[0.0, 0.0], 4, 1).unwrap();
        assert!((r.best_params[0] - 0.7).abs() < 0.05 && (r.best_params[1] + 1.1).abs() < 0.05);
        assert!(r.trace.windows(2).all(|w| w[1].ratio >= w[0].ratio));
    }

    #[test]
    fn preconditions() {
        let b = boxed(1, 0.0, 1.0);
        assert!(maximize_coordinatewise(|_| Ok(1.0), &b, &[0.5], 0, 0).is_err());
        assert!(preset("nope", 16.0).is_err());
        let p = preset("schrodinger-1d-weak", 16.0).unwrap();
        assert!(p.forcing(&[5.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn trace_csv_header() {
        let res = SearchResult {
            best_params: vec![1.0],
            best_ratio: 2.0,
            trace: vec![TraceRow { iter: 0, ratio: 2.0, params: vec![1.0] }],
        };
        let mut buf = Vec::new();
        write_trace_csv(&res, &["a".into()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iter,ratio,a\n0,2e0,1e0\n");
    }
}
