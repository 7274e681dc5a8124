//! Gaussian forcing `F(t, x) = (1+4t²)^{-1} exp(-|x|²/2)` for the
//! Schrödinger flow. Its full-line Duhamel integral is, up to a constant,
//! `(1+it)^{-d/2} exp(-|x|²/(4(1+it)))`, whose weak `L^r` norm decays like
//! `|t|^{d(1/r - 1/2)}`: exactly `1/|t|` at `r = 2d/(d-2)`, which is not
//! integrable in time.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::{Series, SlopeVerdict};
use crate::error::{domain, Result};
use crate::grid_fields::{inverse, GridField, SpatialGrid, Spectrum};
use crate::quadrature::integrate_adaptive;
use crate::regression::logspace;
use crate::Complex64;

/// Slope tolerance at the endpoint exponent `r = 2d/(d-2)`.
pub const ENDPOINT_SLOPE_TOL: f64 = 0.01;
/// Slope tolerance elsewhere.
pub const SLOPE_TOL: f64 = 0.05;
/// Allowed relative mismatch between successive decade increments.
pub const LOG_GROWTH_TOL: f64 = 0.05;

/// `(1+it)^{-d/2} exp(-|x|²/(4(1+it)))`, principal branch.
pub fn gaussian_response(d: usize, t: f64, x: f64) -> Complex64 {
    let z = Complex64::new(1.0, t);
    (-(d as f64 / 2.0) * z.ln() - x * x / (4.0 * z)).exp()
}

/// The same response synthesised on a grid from `e^{-(1+it)|ξ|²}` by the
/// discrete inverse transform, rescaled by `(4π)^{d/2}`.
pub fn gaussian_response_grid(grid: SpatialGrid, t: f64) -> Result<GridField> {
    let z = Complex64::new(1.0, t);
    let spec = Spectrum::from_fn(grid, |xi| {
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        (-z * r2).exp()
    })?;
    let scale = (4.0 * PI).powf(grid.dim() as f64 / 2.0);
    Ok(inverse(&spec).scaled(Complex64::new(scale, 0.0)))
}

pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

/// Exact `L^{r,∞}` norm of `|gaussian_response(d, t, ·)|`, a radial
/// Gaussian `A exp(-|x|²/w)` with `A = (1+t²)^{-d/4}` and `w = 4(1+t²)`.
pub fn gaussian_weak_norm(d: usize, r: f64, t: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("r must be positive, got {r}"));
    }
    if d == 0 {
        return domain("dimension must be positive");
    }
    let df = d as f64;
    let a = (1.0 + t * t).powf(-df / 4.0);
    let w = 4.0 * (1.0 + t * t);
    if r.is_infinite() {
        return Ok(a);
    }
    Ok(a * (-df / (2.0 * r)).exp() * unit_ball_volume(d).powf(1.0 / r) * (w * df / (2.0 * r)).powf(df / (2.0 * r)))
}

/// `‖exp(-|x|²/2)‖_{L^{b,p}}` in the normalisation
/// `(∫ (s^{1/b} f*(s))^p ds/s)^{1/p}`.
pub fn gaussian_lorentz_norm(d: usize, b: f64, p: f64) -> Result<f64> {
    if !(b >= 1.0 && b.is_finite() && p >= 1.0 && p.is_finite()) {
        return domain(format!("need 1 ≤ b, p < ∞, got b = {b}, p = {p}"));
    }
    // f*(s) = exp(-ρ²/2) with s = v_d ρ^d.
    let df = d as f64;
    let k = p * df / b;
    let inner = df * unit_ball_volume(d).powf(p / b) * 2f64.powf(k / 2.0 - 1.0) * gamma(k / 2.0) / p.powf(k / 2.0);
    Ok(inner.powf(1.0 / p))
}

/// Weak-norm decay of the response over `t_list`, with the slope compared
/// to `d(1/r - 1/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakNormDecay {
    pub series: Series,
    pub verdict: SlopeVerdict,
}

pub fn is_endpoint(d: usize, r: f64) -> bool {
    d >= 3 && (r - 2.0 * d as f64 / (d as f64 - 2.0)).abs() < 1e-12
}

pub fn weak_norm_decay(d: usize, r: f64, t_list: &[f64]) -> Result<WeakNormDecay> {
    if t_list.iter().any(|t| !(*t >= 1.0)) {
        return domain("evaluation times must be ≥ 1");
    }
    let series = Series::from_fn(t_list, |t| gaussian_weak_norm(d, r, t))?;
    let target = d as f64 * (1.0 / r - 0.5);
    let tol = if is_endpoint(d, r) { ENDPOINT_SLOPE_TOL } else { SLOPE_TOL };
    let verdict = SlopeVerdict::fit(&series.t, &series.value, target, tol)?;
    Ok(WeakNormDecay { series, verdict })
}

/// `∫₁^T ‖u(t)‖_{L^{r,∞}} dt` at `r = 2d/(d-2)`, with the finite
/// `‖F‖_{L¹_t L^{b,1}_x}`, `b = 2d/(d+2)`, alongside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointDivergence {
    pub t_max: f64,
    pub value: f64,
    pub rhs_norm: f64,
    /// `L^{1,∞}` norm in time of the same integrand on `[1, T]`. Reported
    /// only; nothing is asserted about it.
    pub weak_time_norm: f64,
}

pub fn endpoint_exponent(d: usize) -> Result<f64> {
    if d < 3 {
        return domain(format!("the endpoint exponent needs d ≥ 3, got {d}"));
    }
    Ok(2.0 * d as f64 / (d as f64 - 2.0))
}

/// `‖u(t)‖_{L^{r,∞}}` at `r = 2d/(d-2)`; `NaN` below `d = 3`.
pub fn endpoint_integrand(d: usize, t: f64) -> f64 {
    endpoint_exponent(d).and_then(|r| gaussian_weak_norm(d, r, t)).unwrap_or(f64::NAN)
}

pub fn gaussian_endpoint_divergence(d: usize, t_max: f64) -> Result<EndpointDivergence> {
    endpoint_exponent(d)?;
    if !(t_max >= 2.0 && t_max.is_finite()) {
        return domain(format!("T must be ≥ 2, got {t_max}"));
    }
    let value = integrate_adaptive(
        |u: f64| {
            let t = u.exp();
            t * endpoint_integrand(d, t)
        },
        0.0,
        t_max.ln(),
        4,
        1e-14,
    );
    let b = 2.0 * d as f64 / (d as f64 + 2.0);
    let rhs_norm = PI / 2.0 * gaussian_lorentz_norm(d, b, 1.0)?;
    // The integrand decreases in t, so its rearrangement on [1, T] is
    // s ↦ g(1 + s) and the weak norm is sup s g(1 + s).
    let weak_time_norm = logspace(1e-3, t_max - 1.0, 2001)
        .into_iter()
        .map(|s| s * endpoint_integrand(d, 1.0 + s))
        .fold(0.0, f64::max);
    Ok(EndpointDivergence { t_max, value, rhs_norm, weak_time_norm })
}

/// Successive decade increments of [`gaussian_endpoint_divergence`]; equal
/// increments mean logarithmic growth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogGrowth {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    pub increments: Vec<f64>,
    pub max_mismatch: f64,
    pub tolerance: f64,
    pub rhs_norm: f64,
    pub pass: bool,
}

pub fn endpoint_log_growth(d: usize, t_list: &[f64]) -> Result<LogGrowth> {
    if t_list.len() < 3 {
        return domain("need at least three horizons");
    }
    let runs: Vec<EndpointDivergence> =
        t_list.iter().map(|&t| gaussian_endpoint_divergence(d, t)).collect::<Result<_>>()?;
    let value: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let increments: Vec<f64> = value.windows(2).map(|w| w[1] - w[0]).collect();
    let max_mismatch = increments.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
    Ok(LogGrowth {
        t: t_list.to_vec(),
        value,
        pass: max_mismatch <= LOG_GROWTH_TOL && increments.iter().all(|i| *i > 0.0),
        increments,
        max_mismatch,
        tolerance: LOG_GROWTH_TOL,
        rhs_norm: runs[0].rhs_norm,
    })
}

/// Decay run over `[10, t_max]`, plus the endpoint growth test when `r` is
/// the endpoint exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianExperiment {
    pub d: usize,
    pub r: f64,
    pub t_range: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianReport {
    pub decay: WeakNormDecay,
    pub endpoint: Option<LogGrowth>,
    pub pass: bool,
}

impl GaussianExperiment {
    pub fn new(d: usize, r: f64, t_min: f64, t_max: f64, samples: usize) -> Result<Self> {
        if !(r > 2.0) {
            return domain(format!("r must exceed 2, got {r}"));
        }
        if !(t_min >= 1.0 && t_max > t_min && samples >= 2) {
            return domain(format!("need 1 ≤ t_min < t_max, got [{t_min}, {t_max}]"));
        }
        Ok(Self { d, r, t_range: logspace(t_min, t_max, samples) })
    }

    pub fn run(&self) -> Result<GaussianReport> {
        let decay = weak_norm_decay(self.d, self.r, &self.t_range)?;
        let endpoint =
            if is_endpoint(self.d, self.r) { Some(endpoint_log_growth(self.d, &[10.0, 100.0, 1000.0])?) } else { None };
        let pass = decay.verdict.pass && endpoint.as_ref().is_none_or(|e| e.pass);
        Ok(GaussianReport { decay, endpoint, pass })
    }
}
