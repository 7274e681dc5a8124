//! Explicit constructions showing where inhomogeneous estimates fail: a
//! Gaussian forcing term at the `L¹_t` endpoint for the Schrödinger flow,
//! and a radially symmetric forcing term for the half-wave flow that
//! concentrates on the light cone.

pub mod gaussian;
pub mod wave;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::regression::loglog_fit;

/// Measured log-log slope against a target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeVerdict {
    pub slope: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SlopeVerdict {
    pub fn fit(xs: &[f64], ys: &[f64], target: f64, tolerance: f64) -> Result<Self> {
        let slope = loglog_fit(xs, ys)?.slope;
        Ok(Self { slope, target, tolerance, pass: (slope - target).abs() <= tolerance })
    }
}

/// `(t, value)` rows of an experiment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
}

impl Series {
    pub fn from_fn(t: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        Ok(Self { t: t.to_vec(), value: t.iter().map(|&s| f(s)).collect::<Result<_>>()? })
    }
}

pub fn write_series_csv<W: Write>(s: &Series, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value"])?;
    for (t, v) in s.t.iter().zip(&s.value) {
        w.write_record([format!("{t:e}"), format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Whether `∫₀¹ λ^{p(1 - 1/(αq)) - 1} dλ` is finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrability {
    Diverges,
    Converges,
}

/// Diverges iff `1/q ≥ α`; the comparison is made within
/// [`LINE_TOL`](crate::exponent_geometry::LINE_TOL).
pub fn lorentz_divergence_predicate(alpha: f64, q: f64, p: f64) -> Result<Integrability> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return crate::error::domain(format!("α must be positive, got {alpha}"));
    }
    if !(q >= 1.0) {
        return crate::error::domain(format!("q must be ≥ 1, got {q}"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return crate::error::domain(format!("p must lie in [1, ∞), got {p}"));
    }
    Ok(if 1.0 / q >= alpha - crate::exponent_geometry::LINE_TOL {
        Integrability::Diverges
    } else {
        Integrability::Converges
    })
}
