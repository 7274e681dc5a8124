//! Radial forcing `F̂(t, ξ) = ψ(t) φ(|ξ|)` for the half-wave flow.
//!
//! In polar coordinates the full-line Duhamel integral is
//! `K_d |x|^{-(d-1)/2} (I + II)` where `I` splits into the incoming and
//! outgoing pieces `I± = ϑ∗ψ(±|x| - t)`, `ϑ = (r^{(d-1)/2} φ)^`, and `II`
//! carries the remainder of the Bessel asymptotic. Positivity of `ϑ∗ψ`
//! near the origin pins a lower bound on the cone `||x| - t| ≤ δ₀`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::{lorentz_divergence_predicate, Integrability, Series, SlopeVerdict};
use crate::error::{domain, Error, Result};
use crate::grid_fields::annular_profile;
use crate::profiles::bump;
use crate::quadrature::{integrate, oscillatory_panels};
use crate::regression::loglog_fit;
use crate::special::{bessel_j, sphere_remainder};
use crate::Complex64;

pub const DEFAULT_C0: f64 = 0.1;
/// Support of `φ`.
pub const PHI_SUPPORT: (f64, f64) = (0.5, 2.0);
/// Kernel values below this fraction of `ϑ∗ψ(0)` are at quadrature
/// resolution and are clamped to it before fitting decay exponents.
pub const RESOLUTION_FLOOR: f64 = 1e-12;
/// Decay exponents of `I₋` and `II` must not exceed this.
pub const DECAY_EXPONENT_MAX: f64 = -0.95;
pub const SHELL_SLOPE_TOL: f64 = 0.05;

const SCAN_STEP: f64 = 1e-2;
const SCAN_LIMIT: f64 = 8.0;

/// `∫_{-1}^{1} bump`.
fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| integrate(bump, -1.0, 1.0, 64))
}

/// `φ`, supported in `[1/2, 2]` with peak 1 at `5/4`.
pub fn phi(r: f64) -> f64 {
    annular_profile(r)
}

/// `φ̃(r) = r^{(d-1)/2} φ(r)`.
pub fn phi_tilde(d: u32, r: f64) -> f64 {
    r.powf((d as f64 - 1.0) / 2.0) * phi(r)
}

/// Even bump of unit mass on `(-c₀, c₀)`.
pub fn psi(c0: f64, s: f64) -> f64 {
    bump(s / c0) / (c0 * bump_mass())
}

/// `ψ̂(r) = ∫ ψ(s) cos(sr) ds`, real since `ψ` is even.
pub fn psi_hat(c0: f64, r: f64) -> f64 {
    integrate(|s: f64| psi(c0, s) * (s * r).cos(), -c0, c0, 32)
}

const MOMENTS: usize = 30;

/// `μ_k / (2k)!` with `μ_k = ∫ u^{2k} bump(u) du / ∫ bump`, so that
/// `ψ̂(r) = Σ_k (-1)^k μ_k (c₀r)^{2k} / (2k)!`.
fn scaled_moments() -> &'static [f64; MOMENTS] {
    static M: OnceLock<[f64; MOMENTS]> = OnceLock::new();
    M.get_or_init(|| {
        let mut out = [0.0; MOMENTS];
        let mut fact = 1.0;
        for (k, m) in out.iter_mut().enumerate() {
            if k > 0 {
                fact *= ((2 * k - 1) * 2 * k) as f64;
            }
            *m = integrate(|u: f64| bump(u) * u.powi(2 * k as i32), -1.0, 1.0, 64) / bump_mass() / fact;
        }
        out
    })
}

fn psi_hat_series(c0: f64, r: f64) -> f64 {
    let z = -(c0 * r).powi(2);
    scaled_moments().iter().rev().fold(0.0, |acc, m| acc * z + m)
}

/// `ϑ(u) = ∫ e^{-iur} φ̃(r) dr`.
pub fn vartheta(d: u32, u: f64) -> Complex64 {
    let (a, b) = PHI_SUPPORT;
    let panels = oscillatory_panels(a, b, u).max(4);
    integrate(|r: f64| Complex64::from_polar(phi_tilde(d, r), -u * r), a, b, panels)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveProfileConfig {
    pub d: u32,
    pub c0: f64,
    pub delta0: f64,
}

/// Numerical certificate for the cone lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeCertificate {
    /// `ϑ∗ψ(0)`, real.
    pub at_zero: f64,
    /// First positive root of `Re ϑ∗ψ`.
    pub first_root: f64,
    pub delta0: f64,
    /// `min |ϑ∗ψ|` over `[-δ₀, δ₀]`.
    pub lower_bound: f64,
}

impl WaveProfileConfig {
    pub fn new(d: u32) -> Result<Self> {
        Self::with_c0(d, DEFAULT_C0)
    }

    /// `δ₀` is half the first positive root of `Re ϑ∗ψ`.
    pub fn with_c0(d: u32, c0: f64) -> Result<Self> {
        if d < 2 {
            return domain(format!("the wave construction needs d ≥ 2, got {d}"));
        }
        if !(c0 > 0.0 && c0 <= 1.0) {
            return domain(format!("c₀ must lie in (0, 1], got {c0}"));
        }
        let mut cfg = Self { d, c0, delta0: 0.0 };
        cfg.delta0 = cfg.certificate_root()? / 2.0;
        Ok(cfg)
    }

    /// `ϑ∗ψ(v) = ∫ e^{-ivr} φ̃(r) ψ̂(r) dr`.
    pub fn conv(&self, v: f64) -> Complex64 {
        self.radial_integral(-v, 0.0, |_| 1.0)
    }

    /// `∫ e^{iωr} φ̃(r) ψ̂(r) g(r) dr` with panels resolving `ω` plus the
    /// rate `g_rate` at which `g` itself oscillates.
    fn radial_integral(&self, omega: f64, g_rate: f64, g: impl Fn(f64) -> f64) -> Complex64 {
        let (a, b) = PHI_SUPPORT;
        let panels = oscillatory_panels(a, b, omega.abs() + g_rate).max(4);
        integrate(
            |r: f64| Complex64::from_polar(phi_tilde(self.d, r) * psi_hat_series(self.c0, r) * g(r), omega * r),
            a,
            b,
            panels,
        )
    }

    /// `ϑ∗ψ(v) = ∫ ϑ(v - s) ψ(s) ds` evaluated literally.
    pub fn conv_direct(&self, v: f64) -> Complex64 {
        integrate(|s: f64| vartheta(self.d, v - s) * psi(self.c0, s), -self.c0, self.c0, 32)
    }

    fn certificate_root(&self) -> Result<f64> {
        let f = |v: f64| self.conv(v).re;
        if !(f(0.0) > 0.0) {
            return Err(Error::Numeric(format!("ϑ∗ψ(0) = {} is not positive", f(0.0))));
        }
        let mut lo = 0.0;
        while lo < SCAN_LIMIT {
            let hi = lo + SCAN_STEP;
            if f(hi) <= 0.0 {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if f(m) > 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
            lo = hi;
        }
        Err(Error::Numeric(format!("Re ϑ∗ψ stays positive on [0, {SCAN_LIMIT}]")))
    }

    pub fn certificate(&self) -> ConeCertificate {
        let samples = 201;
        let lower_bound = (0..samples)
            .map(|i| self.conv(-self.delta0 + 2.0 * self.delta0 * i as f64 / (samples - 1) as f64).norm())
            .fold(f64::INFINITY, f64::min);
        ConeCertificate { at_zero: self.conv(0.0).re, first_root: 2.0 * self.delta0, delta0: self.delta0, lower_bound }
    }

    /// `(d-1)(1/2 - 1/r)`.
    pub fn alpha(&self, r: f64) -> f64 {
        (self.d as f64 - 1.0) * (0.5 - 1.0 / r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialKernel {
    pub i_plus: Complex64,
    pub i_minus: Complex64,
    pub ii: Complex64,
}

/// `I±(x, t) = ϑ∗ψ(±|x| - t)` and
/// `II(x, t) = ∫ e^{itr} φ̃(r) ψ̂(r) E(r|x|) dr`.
pub fn wave_radial_kernel(cfg: &WaveProfileConfig, x: f64, t: f64) -> Result<RadialKernel> {
    if !(x >= 1.0) {
        return domain(format!("|x| must be ≥ 1, got {x}"));
    }
    let d = cfg.d;
    Ok(RadialKernel {
        i_plus: cfg.conv(x - t),
        i_minus: cfg.conv(-x - t),
        ii: cfg.radial_integral(t, x, |r| sphere_remainder(d, r * x)),
    })
}

/// `(2π)^{-d/2} √(2/π)`.
pub fn kernel_constant(d: u32) -> f64 {
    (2.0 * PI).powf(-(d as f64) / 2.0) * (2.0 / PI).sqrt()
}

/// Duhamel integral at `(x, t)` assembled from the kernel.
pub fn radial_solution(cfg: &WaveProfileConfig, x: f64, t: f64) -> Result<Complex64> {
    let k = wave_radial_kernel(cfg, x, t)?;
    let a = PI * (cfg.d as f64 - 1.0) / 4.0;
    let i = 0.5 * (Complex64::from_polar(1.0, -a) * k.i_minus + Complex64::from_polar(1.0, a) * k.i_plus);
    Ok((i + k.ii) * kernel_constant(cfg.d) * x.powf(-(cfg.d as f64 - 1.0) / 2.0))
}

/// `∫_{S^{d-1}} e^{iy·θ} dθ = (2π)^{d/2} |y|^{-(d-2)/2} J_{(d-2)/2}(|y|)`.
pub fn sphere_transform(d: u32, rho: f64) -> f64 {
    let nu = (d as f64 - 2.0) / 2.0;
    if rho == 0.0 {
        return 2.0 * PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0);
    }
    (2.0 * PI).powf(d as f64 / 2.0) * rho.powf(-nu) * bessel_j(d - 2, rho)
}

/// Duhamel integral at `(x, t)` straight from the radial Fourier integral
/// `(2π)^{-d} ∫ r^{d-1} e^{itr} ψ̂(r) φ(r) S(r|x|) dr`.
pub fn radial_solution_direct(cfg: &WaveProfileConfig, x: f64, t: f64) -> Complex64 {
    let d = cfg.d;
    let (a, b) = PHI_SUPPORT;
    let panels = oscillatory_panels(a, b, t.abs() + x).max(4);
    let v = integrate(
        |r: f64| {
            let amp = r.powi(d as i32 - 1) * psi_hat_series(cfg.c0, r) * phi(r) * sphere_transform(d, r * x);
            Complex64::from_polar(amp, t * r)
        },
        a,
        b,
        panels,
    );
    v * (2.0 * PI).powf(-(d as f64))
}

fn shell_nodes(cfg: &WaveProfileConfig, t: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t - cfg.delta0 + 2.0 * cfg.delta0 * i as f64 / (n - 1) as f64).collect()
}

/// Extreme values over the shell `||x| - t| ≤ δ₀`, for each `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellExtremes {
    pub t: Vec<f64>,
    /// `min |I₊|`
    pub i_plus_min: Vec<f64>,
    /// `max |I₋|`
    pub i_minus_max: Vec<f64>,
    /// `max |II|`
    pub ii_max: Vec<f64>,
}

pub const SHELL_SAMPLES: usize = 33;

pub fn shell_extremes(cfg: &WaveProfileConfig, t_list: &[f64]) -> Result<ShellExtremes> {
    let rows: Vec<(f64, f64, f64)> = t_list
        .par_iter()
        .map(|&t| {
            let ks: Vec<RadialKernel> = shell_nodes(cfg, t, SHELL_SAMPLES)
                .into_iter()
                .map(|x| wave_radial_kernel(cfg, x, t))
                .collect::<Result<_>>()?;
            Ok((
                ks.iter().map(|k| k.i_plus.norm()).fold(f64::INFINITY, f64::min),
                ks.iter().map(|k| k.i_minus.norm()).fold(0.0, f64::max),
                ks.iter().map(|k| k.ii.norm()).fold(0.0, f64::max),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(ShellExtremes {
        t: t_list.to_vec(),
        i_plus_min: rows.iter().map(|r| r.0).collect(),
        i_minus_max: rows.iter().map(|r| r.1).collect(),
        ii_max: rows.iter().map(|r| r.2).collect(),
    })
}

/// Log-log decay exponent after clamping to the resolution floor; `None`
/// when every value sits at or below the floor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: Option<f64>,
    pub floor: f64,
    pub pass: bool,
}

pub fn decay_fit(xs: &[f64], ys: &[f64], floor: f64) -> Result<DecayFit> {
    if ys.iter().all(|y| *y <= floor) {
        return Ok(DecayFit { exponent: None, floor, pass: true });
    }
    let clamped: Vec<f64> = ys.iter().map(|y| y.max(floor)).collect();
    let e = loglog_fit(xs, &clamped)?.slope;
    Ok(DecayFit { exponent: Some(e), floor, pass: e <= DECAY_EXPONENT_MAX })
}

/// `‖u(t)‖_{L^r}` over the shell `||x| - t| ≤ δ₀`; `r = ∞` takes the
/// maximum over the shell samples.
pub fn shell_norm(cfg: &WaveProfileConfig, r: f64, t: f64) -> Result<f64> {
    let d = cfg.d;
    let sphere = 2.0 * PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0);
    if r.is_infinite() {
        return shell_nodes(cfg, t, SHELL_SAMPLES)
            .into_iter()
            .map(|x| radial_solution(cfg, x, t).map(|u| u.norm()))
            .try_fold(0.0, |m, v| v.map(|v| f64::max(m, v)));
    }
    let (lo, hi) = (t - cfg.delta0, t + cfg.delta0);
    let nodes = crate::quadrature::composite_rule(lo, hi, 2);
    let mut acc = 0.0;
    for (x, w) in nodes {
        acc += w * radial_solution(cfg, x, t)?.norm().powf(r) * sphere * x.powi(d as i32 - 1);
    }
    Ok(acc.powf(1.0 / r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveGrowthReport {
    pub series: Series,
    pub verdict: SlopeVerdict,
}

/// Shell norms over `t_list` with the slope compared to
/// `(d-1)(1/r - 1/2)`.
pub fn wave_norm_growth(cfg: &WaveProfileConfig, r: f64, t_list: &[f64]) -> Result<WaveGrowthReport> {
    if !(r > 2.0) {
        return domain(format!("r must exceed 2, got {r}"));
    }
    if t_list.iter().any(|t| !(*t >= 100.0)) {
        return domain("shell times must be ≥ 100");
    }
    let value: Vec<f64> = t_list.par_iter().map(|&t| shell_norm(cfg, r, t)).collect::<Result<_>>()?;
    let series = Series { t: t_list.to_vec(), value };
    let verdict = SlopeVerdict::fit(&series.t, &series.value, -cfg.alpha(r), SHELL_SLOPE_TOL)?;
    Ok(WaveGrowthReport { series, verdict })
}

/// Every check of the construction for one `(d, r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveNecessityReport {
    pub d: u32,
    pub r: f64,
    pub alpha: f64,
    pub certificate: ConeCertificate,
    pub extremes: ShellExtremes,
    pub i_minus_decay: DecayFit,
    /// Decay of `max |II|` in `|x| ≈ t`.
    pub ii_decay: DecayFit,
    pub growth: WaveGrowthReport,
    /// Verdict at `1/q = α`, `p = 2`.
    pub critical_line: Integrability,
    pub pass: bool,
}

pub const CONE_TIMES: [f64; 3] = [100.0, 300.0, 1000.0];

pub fn wave_necessity(d: u32, r: f64, growth_times: &[f64]) -> Result<WaveNecessityReport> {
    let cfg = WaveProfileConfig::new(d)?;
    let certificate = cfg.certificate();
    let extremes = shell_extremes(&cfg, &CONE_TIMES)?;
    let floor = RESOLUTION_FLOOR * certificate.at_zero;
    let i_minus_decay = decay_fit(&extremes.t, &extremes.i_minus_max, floor)?;
    let ii_decay = decay_fit(&extremes.t, &extremes.ii_max, floor)?;
    let growth = wave_norm_growth(&cfg, r, growth_times)?;
    let alpha = cfg.alpha(r);
    let critical_line = lorentz_divergence_predicate(alpha, 1.0 / alpha, 2.0)?;
    let cone_ok = certificate.at_zero > 0.0
        && certificate.delta0 > 0.0
        && extremes.i_plus_min.iter().all(|v| *v >= certificate.lower_bound * (1.0 - 1e-9));
    let pass = cone_ok
        && i_minus_decay.pass
        && ii_decay.pass
        && growth.verdict.pass
        && critical_line == Integrability::Diverges;
    Ok(WaveNecessityReport { d, r, alpha, certificate, extremes, i_minus_decay, ii_decay, growth, critical_line, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        assert_eq!(phi(0.5), 0.0);
        assert_eq!(phi(2.0), 0.0);
        assert!((phi(1.25) - 1.0).abs() < 1e-15);
        assert!((integrate(|s| psi(0.1, s), -0.1, 0.1, 16) - 1.0).abs() < 1e-12);
        assert!((psi_hat(0.1, 0.0) - 1.0).abs() < 1e-12);
        assert_eq!(psi(0.1, 0.03), psi(0.1, -0.03));
        for c0 in [0.1, 0.5, 1.0] {
            for r in [0.0, 0.5, 1.1, 2.0] {
                assert!((psi_hat_series(c0, r) - psi_hat(c0, r)).abs() < 1e-15, "c0 = {c0}, r = {r}");
            }
        }
    }

    #[test]
    fn certificate_positive() {
        let cfg = WaveProfileConfig::new(3).unwrap();
        let c = cfg.certificate();
        assert!(c.at_zero > 0.0 && c.delta0 > 0.0 && c.lower_bound > 0.0, "{c:?}");
        assert!(cfg.conv(c.first_root).re.abs() < 1e-12);
    }

    #[test]
    fn conv_matches_literal_convolution() {
        let cfg = WaveProfileConfig::new(2).unwrap();
        for v in [0.0, 0.4, -1.3, 7.5] {
            let a = cfg.conv(v);
            let b = cfg.conv_direct(v);
            assert!((a - b).norm() < 1e-12, "v = {v}: {a} vs {b}");
        }
    }

    #[test]
    fn kernel_domain() {
        let cfg = WaveProfileConfig::new(2).unwrap();
        assert!(wave_radial_kernel(&cfg, 0.5, 10.0).is_err());
        assert!(WaveProfileConfig::new(1).is_err());
        assert!(wave_norm_growth(&cfg, 2.0, &[100.0]).is_err());
    }

    #[test]
    fn decay_fit_floor() {
        let f = decay_fit(&[1.0, 2.0], &[0.0, 0.0], 1e-12).unwrap();
        assert_eq!(f.exponent, None);
        assert!(f.pass);
        let f = decay_fit(&[1.0, 2.0, 4.0], &[1.0, 0.5, 0.25], 1e-12).unwrap();
        assert!((f.exponent.unwrap() + 1.0).abs() < 1e-12);
    }
}
