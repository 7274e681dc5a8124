//! Lebesgue, Lorentz, homogeneous Sobolev and Besov norms, and mixed
//! space-time norms built from them.
//!
//! Exponents equal to `f64::INFINITY` denote `∞`. Lorentz norms are
//! evaluated exactly on the weighted decreasing rearrangement, which is a
//! step function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid_fields::{forward, fractional_power, inverse, GridField, LPPartition, SpaceTimeField};

/// Weighted decreasing rearrangement: `f*(t) = levels[k]` for
/// `cumulative[k-1] ≤ t < cumulative[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rearrangement {
    levels: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Rearrangement {
    /// `(|value|, weight)` pairs; weights must be positive.
    pub fn new(samples: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = samples.into_iter().collect();
        for &(v, w) in &pairs {
            if !v.is_finite() {
                return Err(Error::Numeric(format!("level {v}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return domain(format!("weights must be positive, got {w}"));
            }
        }
        pairs.iter_mut().for_each(|p| p.0 = p.0.abs());
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut acc = 0.0;
        let mut levels = Vec::with_capacity(pairs.len());
        let mut cumulative = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            if v == 0.0 {
                break;
            }
            acc += w;
            levels.push(v);
            cumulative.push(acc);
        }
        Ok(Self { levels, cumulative })
    }

    pub fn from_field(f: &GridField) -> Result<Self> {
        let w = f.grid().cell_volume();
        Self::new(f.values().iter().map(|v| (v.norm(), w)))
    }

    pub fn from_series(values: &[f64], weight: f64) -> Result<Self> {
        Self::new(values.iter().map(|&v| (v, weight)))
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Cumulative measure at the end of each level.
    pub fn breakpoints(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn lorentz(&self, q: f64, p: f64) -> Result<f64> {
        check_lorentz(q, p)?;
        if self.levels.is_empty() {
            return Ok(0.0);
        }
        if q.is_infinite() {
            return Ok(self.levels[0]);
        }
        if p.is_infinite() {
            return Ok(self.levels.iter().zip(&self.cumulative).map(|(a, t)| a * t.powf(1.0 / q)).fold(0.0, f64::max));
        }
        // Exact ∫ (t^{1/q} f*(t))^p dt/t for a step function, scaled by the
        // largest level to keep powers in range.
        let top = self.levels[0];
        let e = p / q;
        let mut prev = 0.0;
        let mut sum = 0.0;
        for (a, t) in self.levels.iter().zip(&self.cumulative) {
            let tp = t.powf(e);
            sum += (a / top).powf(p) * (tp - prev);
            prev = tp;
        }
        Ok(top * (sum / e).powf(1.0 / p))
    }
}

fn check_lorentz(q: f64, p: f64) -> Result<()> {
    if q.is_nan() || q <= 0.0 {
        return domain(format!("Lorentz exponent q must be positive, got {q}"));
    }
    if p.is_nan() || p < 1.0 {
        return domain(format!("Lorentz exponent p must lie in [1, ∞], got {p}"));
    }
    Ok(())
}

fn check_lebesgue(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return domain(format!("Lebesgue exponent must lie in [1, ∞], got {r}"));
    }
    Ok(())
}

/// `(Σ w |v|^r)^{1/r}` for constant weight `w`.
pub fn weighted_lebesgue(values: impl Iterator<Item = f64> + Clone, weight: f64, r: f64) -> Result<f64> {
    check_lebesgue(r)?;
    let top = values.clone().map(f64::abs).fold(0.0, f64::max);
    if r.is_infinite() || top == 0.0 {
        return Ok(top);
    }
    let s: f64 = values.map(|v| (v.abs() / top).powf(r)).sum();
    Ok(top * (weight * s).powf(1.0 / r))
}

pub fn lebesgue_norm(f: &GridField, r: f64) -> Result<f64> {
    weighted_lebesgue(f.values().iter().map(|v| v.norm()), f.grid().cell_volume(), r)
}

pub fn lorentz_norm(f: &GridField, q: f64, p: f64) -> Result<f64> {
    check_lorentz(q, p)?;
    Rearrangement::from_field(f)?.lorentz(q, p)
}

/// Lorentz norm of a sampled function of one variable with step `weight`.
pub fn lorentz_norm_series(values: &[f64], weight: f64, q: f64, p: f64) -> Result<f64> {
    check_lorentz(q, p)?;
    Rearrangement::from_series(values, weight)?.lorentz(q, p)
}

/// `‖(√-Δ)^ρ f‖_{L^r}`.
pub fn sobolev_norm(f: &GridField, rho: f64, r: f64) -> Result<f64> {
    check_lebesgue(r)?;
    lebesgue_norm(&fractional_power(f, rho)?, r)
}

/// Largest admissible relative spectral mass outside the partition band.
pub const BESOV_TAIL_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovTrace {
    pub value: f64,
    /// `(j, ‖f ∗ φ_j‖_r)`
    pub terms: Vec<(i32, f64)>,
    pub tail: f64,
}

/// `(Σ_j 2^{ρsj} ‖f ∗ φ_j‖_r^s)^{1/s}` with per-level terms.
pub fn besov_norm_traced(f: &GridField, rho: f64, r: f64, s: f64, part: &LPPartition) -> Result<BesovTrace> {
    check_lebesgue(r)?;
    if s.is_nan() || s < 1.0 {
        return domain(format!("Besov summability index must lie in [1, ∞], got {s}"));
    }
    let spec = forward(f);
    let tail = part.tail_fraction(&spec);
    if tail > BESOV_TAIL_LIMIT {
        return Err(Error::Truncation { tail, limit: BESOV_TAIL_LIMIT });
    }
    let levels: Vec<i32> = part.levels().collect();
    let terms = levels
        .par_iter()
        .map(|&j| {
            let piece = inverse(&spec.multiplied(&part.symbol(f.grid(), j)?));
            Ok((j, lebesgue_norm(&piece, r)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let weighted = terms.iter().map(|&(j, v)| 2f64.powf(rho * j as f64) * v);
    let value = if s.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        weighted.map(|v| v.powf(s)).sum::<f64>().powf(1.0 / s)
    };
    Ok(BesovTrace { value, terms, tail })
}

pub fn besov_norm(f: &GridField, rho: f64, r: f64, s: f64, part: &LPPartition) -> Result<f64> {
    besov_norm_traced(f, rho, r, s, part).map(|t| t.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialNorm {
    Lebesgue { r: f64 },
    Lorentz { r: f64, p: f64 },
    Sobolev { rho: f64, r: f64 },
    Besov { rho: f64, r: f64, s: f64, partition: LPPartition },
}

impl SpatialNorm {
    pub fn eval(&self, f: &GridField) -> Result<f64> {
        match *self {
            SpatialNorm::Lebesgue { r } => lebesgue_norm(f, r),
            SpatialNorm::Lorentz { r, p } => lorentz_norm(f, r, p),
            SpatialNorm::Sobolev { rho, r } => sobolev_norm(f, rho, r),
            SpatialNorm::Besov { rho, r, s, ref partition } => besov_norm(f, rho, r, s, partition),
        }
    }
}

/// Temporal Lorentz exponents `(q, p)`; `q = ∞` means the supremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalNorm {
    pub q: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub temporal: Option<TemporalNorm>,
    pub spatial: SpatialNorm,
}

impl NormSpec {
    pub fn mixed(q: f64, p: f64, spatial: SpatialNorm) -> Self {
        Self { temporal: Some(TemporalNorm { q, p }), spatial }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedNormTrace {
    pub value: f64,
    pub per_slice: Vec<f64>,
    pub rearrangement: Rearrangement,
}

/// Spatial norm of every slice, then the temporal Lorentz norm of the
/// resulting series with the time step as weight.
pub fn mixed_norm_traced(field: &SpaceTimeField, spec: &NormSpec) -> Result<MixedNormTrace> {
    let per_slice = field.slices().par_iter().map(|s| spec.spatial.eval(s)).collect::<Result<Vec<f64>>>()?;
    let rearrangement = Rearrangement::from_series(&per_slice, field.dt())?;
    let value = match spec.temporal {
        Some(TemporalNorm { q, p }) => rearrangement.lorentz(q, p)?,
        None if per_slice.len() == 1 => per_slice[0],
        None => return domain("a temporal norm is required for more than one slice"),
    };
    Ok(MixedNormTrace { value, per_slice, rearrangement })
}

pub fn mixed_norm(field: &SpaceTimeField, spec: &NormSpec) -> Result<f64> {
    mixed_norm_traced(field, spec).map(|t| t.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::{make_test_function, SpatialGrid, TestFunction};
    use crate::Complex64;
    use std::f64::consts::PI;

    fn cell_indicator(n: usize, l: f64, k: usize) -> GridField {
        let g = SpatialGrid::new(1, n, l).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        GridField::new(g, v).unwrap()
    }

    #[test]
    fn lebesgue_examples() {
        let f = cell_indicator(64, 4.0, 10);
        let v = f.grid().cell_volume();
        assert!((lebesgue_norm(&f, 2.0).unwrap() - v.sqrt()).abs() < 1e-15);

        let g = SpatialGrid::new(1, 64, 3.0).unwrap();
        let one = GridField::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((lebesgue_norm(&one, 1.0).unwrap() - 6.0).abs() < 1e-13);
        assert_eq!(lebesgue_norm(&one, f64::INFINITY).unwrap(), 1.0);

        let g = SpatialGrid::new(1, 1024, 20.0).unwrap();
        let gauss = make_test_function(&TestFunction::gaussian(1.0), g).unwrap();
        assert!((lebesgue_norm(&gauss, 1.0).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-10);
        assert!(lebesgue_norm(&gauss, 0.5).is_err());
    }

    #[test]
    fn lorentz_examples() {
        let ind = |m: f64| Rearrangement::new([(1.0, m)]).unwrap();
        assert_eq!(ind(16.0).lorentz(2.0, f64::INFINITY).unwrap(), 4.0);
        assert!((ind(1.0).lorentz(3.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
        let step = Rearrangement::new([(1.0, 3.0), (2.0, 1.0)]).unwrap();
        assert_eq!(step.lorentz(2.0, f64::INFINITY).unwrap(), 2.0);
        assert!(ind(1.0).lorentz(0.0, 1.0).is_err());
        assert!(ind(1.0).lorentz(2.0, 0.5).is_err());
        assert!(Rearrangement::new([(1.0, 0.0)]).is_err());
    }

    #[test]
    fn lorentz_indicator_closed_form() {
        for (q, p, m) in [(2.0, 1.0, 3.0), (1.5, 4.0, 0.2), (4.0, 2.0, 7.0)] {
            let v = Rearrangement::new([(1.0, m)]).unwrap().lorentz(q, p).unwrap();
            let exact = (q / p).powf(1.0 / p) * m.powf(1.0 / q);
            assert!((v - exact).abs() < 1e-14 * exact);
        }
    }

    #[test]
    fn lorentz_diagonal_is_lebesgue_on_grid() {
        let g = SpatialGrid::new(1, 256, 10.0).unwrap();
        let f = make_test_function(&TestFunction::gaussian(1.3), g).unwrap();
        for q in [1.0, 2.0, 3.5] {
            let a = lorentz_norm(&f, q, q).unwrap();
            let b = lebesgue_norm(&f, q).unwrap();
            assert!((a - b).abs() < 1e-13 * b);
        }
    }

    #[test]
    fn sobolev_examples() {
        let g = SpatialGrid::new(1, 1024, 20.0).unwrap();
        let f = make_test_function(&TestFunction::gaussian(1.0), g).unwrap();
        let l2 = lebesgue_norm(&f, 2.0).unwrap();
        assert!((sobolev_norm(&f, 0.0, 2.0).unwrap() - l2).abs() < 1e-12);
        // ∫ ξ² · 2π e^{-ξ²} dξ / 2π = √π/2
        let exact = (PI.sqrt() / 2.0).sqrt();
        assert!((sobolev_norm(&f, 1.0, 2.0).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn besov_of_zero_and_band_violation() {
        let g = SpatialGrid::new(1, 256, 20.0).unwrap();
        let part = LPPartition::new(-2, 3).unwrap();
        assert_eq!(besov_norm(&GridField::zeros(g), 0.5, 2.0, 2.0, &part).unwrap(), 0.0);
        let f = make_test_function(&TestFunction::gaussian(1.0), g).unwrap();
        assert!(matches!(besov_norm(&f, 0.5, 2.0, 2.0, &part), Err(Error::Truncation { .. })));
    }

    #[test]
    fn besov_single_ring() {
        let g = SpatialGrid::new(1, 512, 40.0).unwrap();
        let f = make_test_function(&TestFunction::AnnularBump { level: 0 }, g).unwrap();
        let part = LPPartition::new(-3, 3).unwrap();
        let tr = besov_norm_traced(&f, 0.5, 4.0, 2.0, &part).unwrap();
        let direct: f64 = [-1, 0, 1]
            .iter()
            .map(|&j| {
                let p = crate::grid_fields::lp_projection(&f, &part, j).unwrap();
                2f64.powf(j as f64) * lebesgue_norm(&p, 4.0).unwrap().powi(2)
            })
            .sum::<f64>()
            .sqrt();
        assert!((tr.value - direct).abs() < 1e-12 * direct);
        for (j, v) in &tr.terms {
            if j.abs() > 1 {
                assert!(*v < 1e-14);
            }
        }
    }

    #[test]
    fn mixed_norm_examples() {
        let g = SpatialGrid::new(1, 64, 10.0).unwrap();
        let f = make_test_function(&TestFunction::gaussian(1.0), g).unwrap();
        let r = 3.0;
        let gr = lebesgue_norm(&f, r).unwrap();
        let spatial = SpatialNorm::Lebesgue { r };

        // Indicator of [0,1] sampled at 100 cell centres.
        let ind = SpaceTimeField::separable(&f, 0.005, 0.01, 100, |_| 1.0).unwrap();
        let v = mixed_norm(&ind, &NormSpec::mixed(2.5, 2.5, spatial.clone())).unwrap();
        assert!((v - gr).abs() < 1e-12 * gr);
        let v = mixed_norm(&ind, &NormSpec::mixed(2.5, f64::INFINITY, spatial.clone())).unwrap();
        assert!((v - gr).abs() < 1e-12 * gr);

        let n = 20001;
        let gauss_t = SpaceTimeField::separable(&f, -10.0, 1e-3, n, |t| (-t * t).exp()).unwrap();
        let v = mixed_norm(&gauss_t, &NormSpec::mixed(2.0, 2.0, spatial)).unwrap();
        let exact = gr * (PI / 2.0).powf(0.25);
        assert!((v - exact).abs() < 1e-6 * exact);
    }
}
