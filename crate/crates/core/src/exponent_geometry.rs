//! Exponent arithmetic for inhomogeneous Strichartz estimates.
//!
//! Exponents are carried as reciprocals so that `q = ∞` is the exact value
//! `0` and membership of the boundary lines is a comparison rather than a
//! limit. Line membership is decided with an absolute tolerance of
//! [`LINE_TOL`].

use std::io::Write;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Absolute tolerance for deciding membership of a line in the
/// `(1/r, 1/q)` plane.
pub const LINE_TOL: f64 = 1e-12;

fn on_line(a: f64, b: f64) -> bool {
    (a - b).abs() <= LINE_TOL
}

/// Reciprocal of an exponent, with `∞ ↦ 0`.
pub fn recip(exponent: f64) -> f64 {
    if exponent.is_infinite() {
        0.0
    } else {
        1.0 / exponent
    }
}

/// Reciprocal of the Hölder conjugate: `1/q' = 1 - 1/q`.
pub fn conjugate_recip(inv: f64) -> f64 {
    1.0 - inv
}

fn snap(x: f64, lo: f64, hi: f64) -> Option<f64> {
    if !x.is_finite() || x < lo - LINE_TOL || x > hi + LINE_TOL {
        None
    } else {
        Some(x.clamp(lo, hi))
    }
}

/// A pair `(q, r)` stored as `(1/q, 1/r)` with `q ≥ 1`, `r ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPoint {
    inv_q: f64,
    inv_r: f64,
}

impl ExponentPoint {
    pub fn new(inv_q: f64, inv_r: f64) -> Result<Self> {
        let Some(inv_q) = snap(inv_q, 0.0, 1.0) else {
            return domain(format!("1/q = {inv_q} outside [0, 1]"));
        };
        let Some(inv_r) = snap(inv_r, 0.0, 0.5) else {
            return domain(format!("1/r = {inv_r} outside [0, 1/2]"));
        };
        Ok(Self { inv_q, inv_r })
    }

    /// Build from the exponents themselves; `f64::INFINITY` encodes `∞`.
    pub fn from_exponents(q: f64, r: f64) -> Result<Self> {
        if q.is_nan() || r.is_nan() || q <= 0.0 || r <= 0.0 {
            return domain(format!("exponents must be positive, got q = {q}, r = {r}"));
        }
        Self::new(recip(q), recip(r))
    }

    pub fn from_ratios(inv_q: Ratio<i64>, inv_r: Ratio<i64>) -> Result<Self> {
        let to_f = |x: Ratio<i64>| *x.numer() as f64 / *x.denom() as f64;
        Self::new(to_f(inv_q), to_f(inv_r))
    }

    pub fn inv_q(&self) -> f64 {
        self.inv_q
    }

    pub fn inv_r(&self) -> f64 {
        self.inv_r
    }

    pub fn q(&self) -> f64 {
        1.0 / self.inv_q
    }

    pub fn r(&self) -> f64 {
        1.0 / self.inv_r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Equation {
    Schrodinger { d: u32 },
    Wave { d: u32 },
    Abstract,
}

/// The decay rate `σ` of the dispersive estimate, with its origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaContext {
    sigma: f64,
    equation: Equation,
}

impl SigmaContext {
    /// `σ = d/2`.
    pub fn schrodinger(d: u32) -> Result<Self> {
        if d == 0 {
            return domain("Schrödinger dimension must be at least 1");
        }
        Ok(Self { sigma: d as f64 / 2.0, equation: Equation::Schrodinger { d } })
    }

    /// `σ = (d-1)/2`.
    pub fn wave(d: u32) -> Result<Self> {
        if d < 2 {
            return domain("wave dimension must be at least 2");
        }
        Ok(Self { sigma: (d as f64 - 1.0) / 2.0, equation: Equation::Wave { d } })
    }

    pub fn abstract_decay(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("σ must be positive and finite, got {sigma}"));
        }
        Ok(Self { sigma, equation: Equation::Abstract })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn equation(&self) -> Equation {
        self.equation
    }
}

/// Independent region flags; a point may carry several at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionClass {
    pub sharp_admissible: bool,
    pub acceptable: bool,
    /// On the line `1/q = 2σ(1/2 - 1/r)` with `q < ∞`.
    pub critical: bool,
    /// Neither acceptable nor critical.
    pub outside: bool,
}

pub fn classify_pair(p: ExponentPoint, ctx: SigmaContext) -> RegionClass {
    let sigma = ctx.sigma;
    let (iq, ir) = (p.inv_q, p.inv_r);
    let gap = 0.5 - ir;

    let endpoint_excluded = on_line(iq, 0.5) && on_line(ir, 0.0) && on_line(sigma, 1.0);
    let sharp_admissible = iq <= 0.5 + LINE_TOL && on_line(iq, sigma * gap) && !endpoint_excluded;

    let finite_q = iq > LINE_TOL;
    let critical = finite_q && on_line(iq, 2.0 * sigma * gap);
    let energy_point = on_line(iq, 0.0) && on_line(ir, 0.5);
    let acceptable = (finite_q && iq < 2.0 * sigma * gap - LINE_TOL) || energy_point;

    RegionClass { sharp_admissible, acceptable, critical, outside: !acceptable && !critical }
}

/// `1/q + 1/q̃ - (d/2)(1 - 1/r - 1/r̃)`; zero exactly when the Schrödinger
/// scaling condition holds.
pub fn scaling_gap_schrodinger(p: ExponentPoint, pt: ExponentPoint, d: u32) -> f64 {
    p.inv_q + pt.inv_q - d as f64 / 2.0 * (1.0 - p.inv_r - pt.inv_r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessaryConditions {
    /// `1/q < d(1/2 - 1/r)`
    pub acceptable: bool,
    /// `1/q̃ < d(1/2 - 1/r̃)`
    pub acceptable_tilde: bool,
    /// `1/q ≤ 1/q̃'`
    pub q_below_dual: bool,
}

impl NecessaryConditions {
    pub fn all(&self) -> bool {
        self.acceptable && self.acceptable_tilde && self.q_below_dual
    }
}

pub fn necessary_conditions_schrodinger(p: ExponentPoint, pt: ExponentPoint, d: u32) -> NecessaryConditions {
    let d = d as f64;
    NecessaryConditions {
        acceptable: p.inv_q < d * (0.5 - p.inv_r) - LINE_TOL,
        acceptable_tilde: pt.inv_q < d * (0.5 - pt.inv_r) - LINE_TOL,
        q_below_dual: p.inv_q <= conjugate_recip(pt.inv_q) + LINE_TOL,
    }
}

/// Interpolation parameters and temporal exponents of the weak-type estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakCaseParams {
    pub theta: f64,
    pub theta_tilde: f64,
    pub inv_q: f64,
    pub inv_q_tilde: f64,
}

impl WeakCaseParams {
    pub fn inv_q_tilde_prime(&self) -> f64 {
        conjugate_recip(self.inv_q_tilde)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaCase {
    Below,
    Unit,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub sigma_case: SigmaCase,
    /// `θ, θ̃ ∈ [0, 1]`
    pub theta_range: bool,
    /// The `σ`-dependent admissibility of `(θ, θ̃)`.
    pub sigma_condition: bool,
    /// `σθ = 1/q`
    pub scaling: bool,
    /// `1/q̃' = 1 - σ(θ̃/2 - θ/2)`
    pub dual_relation: bool,
    /// `1/q < 1/q̃'`
    pub strict_gap: bool,
    /// `θ ≤ θ̃`
    pub ordered: bool,
    pub holds: bool,
}

fn sigma_condition(sigma: f64, theta: f64, theta_tilde: f64) -> (SigmaCase, bool) {
    let in_unit = |x: f64| (-LINE_TOL..=1.0 + LINE_TOL).contains(&x);
    if on_line(sigma, 1.0) {
        let half_open = |x: f64| (-LINE_TOL..1.0 - LINE_TOL).contains(&x);
        (SigmaCase::Unit, half_open(theta) && half_open(theta_tilde))
    } else if sigma < 1.0 {
        (SigmaCase::Below, in_unit(theta) && in_unit(theta_tilde))
    } else {
        let k = (sigma - 1.0) / sigma;
        let ok = k * (1.0 - theta) <= 1.0 - theta_tilde + LINE_TOL && k * (1.0 - theta_tilde) <= 1.0 - theta + LINE_TOL;
        (SigmaCase::Above, ok)
    }
}

/// Check the hypotheses of the abstract weak-type estimate for `(θ, θ̃, q, q̃)`.
pub fn theorem_hypotheses(w: WeakCaseParams, sigma: f64) -> Result<HypothesisReport> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return domain(format!("σ must be positive, got {sigma}"));
    }
    let in_unit = |x: f64| (-LINE_TOL..=1.0 + LINE_TOL).contains(&x);
    let theta_range = in_unit(w.theta) && in_unit(w.theta_tilde);
    let (sigma_case, sigma_ok) = sigma_condition(sigma, w.theta, w.theta_tilde);
    let dual = w.inv_q_tilde_prime();
    let scaling = on_line(sigma * w.theta, w.inv_q);
    let dual_relation = on_line(dual, 1.0 - sigma * (w.theta_tilde - w.theta) / 2.0);
    let strict_gap = w.inv_q < dual - LINE_TOL;
    let ordered = w.theta <= w.theta_tilde + LINE_TOL;
    let holds = theta_range && sigma_ok && scaling && dual_relation && strict_gap && ordered;
    Ok(HypothesisReport {
        sigma_case,
        theta_range,
        sigma_condition: sigma_ok,
        scaling,
        dual_relation,
        strict_gap,
        ordered,
        holds,
    })
}

/// Per-condition outcome of the Schrödinger weak-type corollary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchrodingerCorollary {
    pub dimension_condition: bool,
    /// `d(1/2 - 1/r) = 1/q`
    pub critical_relation: bool,
    /// `1/q̃' = 1 - (d/2)(1/r - 1/r̃)`
    pub dual_relation: bool,
    pub strict_gap: bool,
    /// `1/r̃ ≤ 1/r`
    pub ordered: bool,
    pub holds: bool,
}

fn valid_spatial(inv_r: f64) -> bool {
    (-LINE_TOL..=0.5 + LINE_TOL).contains(&inv_r)
}

/// Exponents are passed directly (`f64::INFINITY` for `∞`).
pub fn corollary_schrodinger(d: u32, q: f64, r: f64, q_t: f64, r_t: f64) -> SchrodingerCorollary {
    let (iq, ir, iqt, irt) = (recip(q), recip(r), recip(q_t), recip(r_t));
    let df = d as f64;
    let open_above = |x: f64| x > LINE_TOL && x < 0.5 - LINE_TOL;
    let half_open = |x: f64| (-LINE_TOL..0.5 - LINE_TOL).contains(&x);
    let dimension_condition = valid_spatial(ir)
        && valid_spatial(irt)
        && match d {
            0 => false,
            1 => half_open(ir) && half_open(irt),
            2 => open_above(ir) && open_above(irt),
            _ => (df - 2.0) * ir <= df * irt + LINE_TOL && (df - 2.0) * irt <= df * ir + LINE_TOL,
        };
    let dual = conjugate_recip(iqt);
    let critical_relation = on_line(df * (0.5 - ir), iq);
    let dual_relation = on_line(dual, 1.0 - df / 2.0 * (ir - irt));
    let strict_gap = iq < dual - LINE_TOL;
    let ordered = irt <= ir + LINE_TOL;
    SchrodingerCorollary {
        dimension_condition,
        critical_relation,
        dual_relation,
        strict_gap,
        ordered,
        holds: dimension_condition && critical_relation && dual_relation && strict_gap && ordered,
    }
}

/// Outcome of the wave weak-type corollary together with the Besov
/// regularity indices `γ` and `γ̃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveCorollary {
    pub dimension_condition: bool,
    /// `(d-1)(1/2 - 1/r) = 1/q`
    pub critical_relation: bool,
    /// `1/q̃' = 1 - ((d-1)/2)(1/r - 1/r̃)`
    pub dual_relation: bool,
    pub strict_gap: bool,
    pub holds: bool,
    pub gamma: f64,
    pub gamma_tilde: f64,
}

pub fn corollary_wave(d: u32, q: f64, r: f64, q_t: f64, r_t: f64) -> WaveCorollary {
    let (iq, ir, iqt, irt) = (recip(q), recip(r), recip(q_t), recip(r_t));
    let df = d as f64;
    let open_above = |x: f64| x > LINE_TOL && x < 0.5 - LINE_TOL;
    let half_open = |x: f64| (-LINE_TOL..0.5 - LINE_TOL).contains(&x);
    let dimension_condition = valid_spatial(ir)
        && valid_spatial(irt)
        && match d {
            0 | 1 => false,
            2 => half_open(ir) && half_open(irt),
            3 => open_above(ir) && open_above(irt),
            _ => (df - 3.0) * ir <= (df - 1.0) * irt + LINE_TOL && (df - 3.0) * irt <= (df - 1.0) * ir + LINE_TOL,
        };
    // The dual exponent is always recomputed from the general relation.
    let dual = conjugate_recip(iqt);
    let critical_relation = on_line((df - 1.0) * (0.5 - ir), iq);
    let dual_relation = on_line(dual, 1.0 - (df - 1.0) / 2.0 * (ir - irt));
    let strict_gap = iq < dual - LINE_TOL;
    WaveCorollary {
        dimension_condition,
        critical_relation,
        dual_relation,
        strict_gap,
        holds: dimension_condition && critical_relation && dual_relation && strict_gap,
        gamma: (df + 1.0) / 2.0 * (0.5 - ir),
        gamma_tilde: (df + 1.0) / 2.0 * (0.5 - irt),
    }
}

/// Dyadic scaling exponent `σ(θ+θ̃)/2 - 1/q̃ - 1/q` of the time-localised
/// estimates.
pub fn beta(sigma: f64, theta: f64, theta_tilde: f64, inv_q: f64, inv_q_tilde: f64) -> f64 {
    sigma * (theta + theta_tilde) / 2.0 - inv_q_tilde - inv_q
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub inv_r: f64,
    pub inv_q: f64,
    pub class: RegionClass,
}

/// Uniform `n × n` sampling of `[0, 1/2] × [0, 1]` in the `(1/r, 1/q)`
/// plane, ordered by `1/r` first and `1/q` second.
pub fn region_samples(sigma: f64, n: usize) -> Result<Vec<RegionSample>> {
    if n < 2 {
        return domain(format!("need at least 2 samples per axis, got {n}"));
    }
    let ctx = SigmaContext::abstract_decay(sigma)?;
    let step = 1.0 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let inv_r = 0.5 * i as f64 * step;
        for k in 0..n {
            let inv_q = k as f64 * step;
            let p = ExponentPoint::new(inv_q, inv_r)?;
            out.push(RegionSample { inv_r, inv_q, class: classify_pair(p, ctx) });
        }
    }
    Ok(out)
}

pub fn write_region_csv<W: Write>(samples: &[RegionSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["inv_r", "inv_q", "sharp_admissible", "acceptable", "critical"])?;
    for s in samples {
        w.write_record([
            s.inv_r.to_string(),
            s.inv_q.to_string(),
            s.class.sharp_admissible.to_string(),
            s.class.acceptable.to_string(),
            s.class.critical.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
