//! Summation of dyadic families with opposite geometric bounds into a
//! weak-type estimate, the choice of split level, and the choice of the
//! auxiliary temporal exponents `q₁, q₂` around a critical `q`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exponent_geometry::{beta, theorem_hypotheses, WeakCaseParams, LINE_TOL};
use crate::norms::Rearrangement;

/// `‖f_j‖_{q₁} ≤ M₁ 2^{ε₁ j}` and `‖f_j‖_{q₂} ≤ M₂ 2^{-ε₂ j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicBounds {
    pub m1: f64,
    pub eps1: f64,
    pub q1: f64,
    pub m2: f64,
    pub eps2: f64,
    pub q2: f64,
}

impl DyadicBounds {
    pub fn new(m1: f64, eps1: f64, q1: f64, m2: f64, eps2: f64, q2: f64) -> Result<Self> {
        let b = Self { m1, eps1, q1, m2, eps2, q2 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !(pos(self.m1) && pos(self.m2)) {
            return domain(format!("M₁, M₂ must be positive, got {}, {}", self.m1, self.m2));
        }
        if !(pos(self.eps1) && pos(self.eps2)) {
            return domain(format!("ε₁, ε₂ must be positive, got {}, {}", self.eps1, self.eps2));
        }
        let exp_ok = |q: f64| (1.0..f64::INFINITY).contains(&q);
        if !(exp_ok(self.q1) && exp_ok(self.q2)) {
            return domain(format!("q₁, q₂ must lie in [1, ∞), got {}, {}", self.q1, self.q2));
        }
        Ok(())
    }
}

/// `θ = ε₂/(ε₁+ε₂)` and `1/q = θ/q₁ + (1-θ)/q₂`.
pub fn bourgain_parameters(b: &DyadicBounds) -> Result<(f64, f64)> {
    let s = b.eps1 + b.eps2;
    if s == 0.0 || !s.is_finite() {
        return domain("ε₁ + ε₂ must be positive and finite");
    }
    let theta = b.eps2 / s;
    let inv_q = theta / b.q1 + (1.0 - theta) / b.q2;
    Ok((theta, 1.0 / inv_q))
}

/// `log` of `λ^{-q₁}(M₁2^{ε₁N})^{q₁} + λ^{-q₂}(M₂2^{-ε₂N})^{q₂}`.
pub fn split_objective_ln(b: &DyadicBounds, lambda: f64, n: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let x = b.q1 * ((b.m1 / lambda).ln() + b.eps1 * n * ln2);
    let y = b.q2 * ((b.m2 / lambda).ln() - b.eps2 * n * ln2);
    let m = x.max(y);
    m + ((x - m).exp() + (y - m).exp()).ln()
}

/// Real minimiser of the split objective.
pub fn split_point(b: &DyadicBounds, lambda: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let (a, c) = (b.eps1 * b.q1 * ln2, b.eps2 * b.q2 * ln2);
    let ln_a = b.q1 * (b.m1 / lambda).ln();
    let ln_b = b.q2 * (b.m2 / lambda).ln();
    (c.ln() + ln_b - a.ln() - ln_a) / (a + c)
}

/// Shift of [`split_point`] when `λ` doubles.
pub fn split_shift_per_doubling(b: &DyadicBounds) -> f64 {
    (b.q1 - b.q2) / (b.eps1 * b.q1 + b.eps2 * b.q2)
}

/// Integer `N` minimising the split objective: the better of the floor
/// and ceiling of the real minimiser, the smaller one on ties.
pub fn optimal_split(b: &DyadicBounds, lambda: f64) -> Result<i64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("λ must be positive, got {lambda}"));
    }
    b.validate()?;
    let x = split_point(b, lambda);
    if !x.is_finite() || x.abs() > 1e15 {
        return Err(Error::Numeric(format!("split point {x}")));
    }
    let lo = x.floor();
    let hi = lo + 1.0;
    let n = if split_objective_ln(b, lambda, hi) < split_objective_ln(b, lambda, lo) { hi } else { lo };
    Ok(n as i64)
}

/// Outcome of choosing `1/q₁ = 1/q + δ`, `1/q₂ = 1/q - δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ExponentSplit {
    Split {
        inv_q1: f64,
        inv_q2: f64,
        delta: f64,
        /// `β(θ, θ̃, q₁, q̃) < 0`
        beta1: f64,
        /// `β(θ, θ̃, q₂, q̃) > 0`
        beta2: f64,
        halvings: u32,
    },
    /// `1/q = 0`: no `q₂ < ∞` exists below `q`; the estimate follows by
    /// duality from the `q̃ = ∞` case instead.
    DualityRoute,
}

pub const MAX_HALVINGS: u32 = 60;

fn local_window_violation(inv_qi: f64, inv_qtp: f64, sigma: f64, theta: f64, theta_tilde: f64) -> Option<&'static str> {
    if inv_qi < -LINE_TOL {
        return Some("1/qᵢ ≥ 0");
    }
    if inv_qi > 1.0 + LINE_TOL {
        return Some("qᵢ ≥ 1");
    }
    if inv_qi > inv_qtp + LINE_TOL {
        return Some("1/qᵢ ≤ 1/q̃'");
    }
    if inv_qtp > 1.0 - sigma * (theta_tilde - theta) / 2.0 + LINE_TOL {
        return Some("1/q̃' ≤ 1 - σ(θ̃ - θ)/2");
    }
    if theta > theta_tilde + LINE_TOL {
        return Some("θ ≤ θ̃");
    }
    None
}

/// Halve `δ` from `(1/q̃' - 1/q)/2` until both `(q₁, θ), (q̃, θ̃)` and
/// `(q₂, θ), (q̃, θ̃)` lie in the time-localised window with `q₂ < ∞`.
pub fn choose_q1_q2(
    inv_q: f64,
    inv_q_tilde_prime: f64,
    sigma: f64,
    theta: f64,
    theta_tilde: f64,
) -> Result<ExponentSplit> {
    if inv_q >= inv_q_tilde_prime - LINE_TOL {
        return Err(Error::Precondition(format!("need 1/q < 1/q̃' strictly, got {inv_q} and {inv_q_tilde_prime}")));
    }
    let w = WeakCaseParams { theta, theta_tilde, inv_q, inv_q_tilde: 1.0 - inv_q_tilde_prime };
    let rep = theorem_hypotheses(w, sigma)?;
    if !rep.holds {
        return Err(Error::Precondition(format!("weak-type hypotheses fail: {rep:?}")));
    }
    if inv_q.abs() <= LINE_TOL {
        return Ok(ExponentSplit::DualityRoute);
    }
    let inv_qt = 1.0 - inv_q_tilde_prime;
    let mut delta = (inv_q_tilde_prime - inv_q) / 2.0;
    let mut last = "";
    for halvings in 0..=MAX_HALVINGS {
        let (q1, q2) = (inv_q + delta, inv_q - delta);
        let v1 = local_window_violation(q1, inv_q_tilde_prime, sigma, theta, theta_tilde);
        let v2 = local_window_violation(q2, inv_q_tilde_prime, sigma, theta, theta_tilde).or(if q2 <= 0.0 {
            Some("q₂ < ∞")
        } else {
            None
        });
        match v1.or(v2) {
            None => {
                return Ok(ExponentSplit::Split {
                    inv_q1: q1,
                    inv_q2: q2,
                    delta,
                    beta1: beta(sigma, theta, theta_tilde, q1, inv_qt),
                    beta2: beta(sigma, theta, theta_tilde, q2, inv_qt),
                    halvings,
                })
            }
            Some(v) => last = v,
        }
        delta /= 2.0;
    }
    Err(Error::Precondition(format!("no admissible δ after {MAX_HALVINGS} halvings; violated: {last}")))
}

/// Piecewise-constant function: `values[i]` on `[breaks[i], breaks[i+1])`,
/// zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return domain("need one more breakpoint than values");
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return domain("breakpoints must be finite and strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("step value".into()));
        }
        Ok(Self { breaks, values })
    }

    /// `c · 1_{[a, b)}`.
    pub fn indicator(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![c])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self.breaks.partition_point(|b| *b <= t) {
            0 => 0.0,
            i if i == self.breaks.len() => 0.0,
            i => self.values[i - 1],
        }
    }

    pub fn lebesgue(&self, q: f64) -> f64 {
        self.values
            .iter()
            .zip(self.breaks.windows(2))
            .map(|(v, w)| v.abs().powf(q) * (w[1] - w[0]))
            .sum::<f64>()
            .powf(1.0 / q)
    }

    /// `f(t/s)`.
    pub fn dilated(&self, s: f64) -> Self {
        Self { breaks: self.breaks.iter().map(|b| b * s).collect(), values: self.values.clone() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { breaks: self.breaks.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub j: i32,
    pub f: StepFunction,
}

/// Merged cells of a family: `(length, Σ_j |f_j|)` and per-member values.
struct Cells {
    lengths: Vec<f64>,
    members: Vec<Vec<f64>>,
}

fn cells(family: &[FamilyMember]) -> Cells {
    let mut cuts: Vec<f64> = family.iter().flat_map(|m| m.f.breaks.iter().copied()).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mids: Vec<f64> = cuts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    Cells {
        lengths: cuts.windows(2).map(|w| w[1] - w[0]).collect(),
        members: family.iter().map(|m| mids.iter().map(|&t| m.f.value_at(t)).collect()).collect(),
    }
}

/// Split level `N` at height `λ` with both sides of the Chebyshev step
/// `|{|Σ f_j| > λ}| ≤ (2/λ)^{q₁} I₁ + (2/λ)^{q₂} I₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitLevel {
    pub lambda: f64,
    pub n: i64,
    pub level_set: f64,
    pub chebyshev_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummationReport {
    pub theta: f64,
    pub q: f64,
    pub weak_norm: f64,
    /// `M₁^θ M₂^{1-θ}`
    pub bound: f64,
    #[serde(rename = "C_measured")]
    pub ratio: f64,
    pub split_levels: Vec<SplitLevel>,
}

/// Relative slack allowed when checking the family against its bounds.
pub const BOUND_TOL: f64 = 1e-12;

/// Weak `L^q` norm of `Σ_j f_j` against `M₁^θ M₂^{1-θ}`, after checking
/// every member against its two bounds.
pub fn verify_summation(family: &[FamilyMember], b: &DyadicBounds) -> Result<SummationReport> {
    b.validate()?;
    let (theta, q) = bourgain_parameters(b)?;
    for m in family {
        let lim1 = b.m1 * 2f64.powf(b.eps1 * m.j as f64);
        let lim2 = b.m2 * 2f64.powf(-b.eps2 * m.j as f64);
        let (n1, n2) = (m.f.lebesgue(b.q1), m.f.lebesgue(b.q2));
        if n1 > lim1 * (1.0 + BOUND_TOL) {
            return Err(Error::Rejected { j: m.j, reason: format!("L^q₁ norm {n1:.6e} exceeds {lim1:.6e}") });
        }
        if n2 > lim2 * (1.0 + BOUND_TOL) {
            return Err(Error::Rejected { j: m.j, reason: format!("L^q₂ norm {n2:.6e} exceeds {lim2:.6e}") });
        }
    }
    let c = cells(family);
    let ncell = c.lengths.len();
    let sum: Vec<f64> = (0..ncell).map(|i| c.members.iter().map(|m| m[i]).sum()).collect();
    let rear = Rearrangement::new(sum.iter().zip(&c.lengths).filter(|(_, l)| **l > 0.0).map(|(v, l)| (*v, *l)))?;
    let weak_norm = rear.lorentz(q, f64::INFINITY)?;
    let bound = b.m1.powf(theta) * b.m2.powf(1.0 - theta);

    let mut split_levels = Vec::new();
    for &lambda in rear.levels().iter().step_by((rear.levels().len() / 16).max(1)) {
        let lambda = lambda * 0.5;
        let n = optimal_split(b, lambda)?;
        let level_set: f64 = sum.iter().zip(&c.lengths).filter(|(v, _)| v.abs() > lambda).map(|(_, l)| l).sum();
        let (mut i1, mut i2) = (0.0, 0.0);
        for i in 0..ncell {
            let (mut lo, mut hi) = (0.0, 0.0);
            for (m, vals) in family.iter().zip(&c.members) {
                if (m.j as i64) <= n {
                    lo += vals[i].abs();
                } else {
                    hi += vals[i].abs();
                }
            }
            i1 += lo.powf(b.q1) * c.lengths[i];
            i2 += hi.powf(b.q2) * c.lengths[i];
        }
        let chebyshev_bound = (2.0 / lambda).powf(b.q1) * i1 + (2.0 / lambda).powf(b.q2) * i2;
        split_levels.push(SplitLevel { lambda, n, level_set, chebyshev_bound });
    }
    Ok(SummationReport { theta, q, weak_norm, bound, ratio: weak_norm / bound, split_levels })
}

/// `min(2^{ε₁j}, 2^{-ε₂j}) · 1_{[0,1)}` for `|j| ≤ span`.
pub fn tent_family(eps1: f64, eps2: f64, span: i32) -> Result<Vec<FamilyMember>> {
    (-span..=span)
        .map(|j| {
            let c = 2f64.powf(eps1 * j as f64).min(2f64.powf(-eps2 * j as f64));
            Ok(FamilyMember { j, f: StepFunction::indicator(0.0, 1.0, c)? })
        })
        .collect()
}

/// A family saturating both bounds: with `M₁ = M₂ = 1`,
/// `f_j = 2^{ja} 1_{[0, 2^{-jb})}` where `b = (ε₁+ε₂)/(1/q₂ - 1/q₁)` and
/// `a = ε₁ + b/q₁`, so that the sum behaves like `t^{-1/q}`; general
/// `M₁, M₂` are reached by an amplitude change and a dilation in `t`. Falls
/// back to a scaled [`tent_family`] when `q₁ = q₂`.
pub fn extremal_family(b: &DyadicBounds, span: i32) -> Result<Vec<FamilyMember>> {
    b.validate()?;
    let gap = 1.0 / b.q2 - 1.0 / b.q1;
    if gap.abs() < 1e-12 {
        let c = b.m1.min(b.m2);
        return tent_family(b.eps1, b.eps2, span)
            .map(|fam| fam.into_iter().map(|m| FamilyMember { j: m.j, f: m.f.scaled(c) }).collect());
    }
    let rate = (b.eps1 + b.eps2) / gap;
    let amp = b.eps1 + rate / b.q1;
    // c s^{1/qᵢ} = Mᵢ
    let dilation = (b.m2 / b.m1).powf(1.0 / gap);
    let c = b.m1 * dilation.powf(-1.0 / b.q1);
    (-span..=span)
        .map(|j| {
            let j_f = j as f64;
            let len = 2f64.powf(-j_f * rate) * dilation;
            Ok(FamilyMember { j, f: StepFunction::indicator(0.0, len, c * 2f64.powf(j_f * amp))? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(m1: f64, e1: f64, q1: f64, m2: f64, e2: f64, q2: f64) -> DyadicBounds {
        DyadicBounds::new(m1, e1, q1, m2, e2, q2).unwrap()
    }

    #[test]
    fn parameters() {
        let (t, q) = bourgain_parameters(&bounds(1.0, 1.0, 1.0, 1.0, 1.0, 2.0)).unwrap();
        assert_eq!(t, 0.5);
        assert!((q - 4.0 / 3.0).abs() < 1e-15);
        let (t, _) = bourgain_parameters(&bounds(1.0, 3.0, 2.0, 1.0, 1.0, 2.0)).unwrap();
        assert_eq!(t, 0.25);
        let (_, q) = bourgain_parameters(&bounds(1.0, 0.3, 2.5, 1.0, 1.7, 2.5)).unwrap();
        assert!((q - 2.5).abs() < 1e-14);
        assert!(DyadicBounds::new(1.0, 0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DyadicBounds::new(1.0, 1.0, f64::INFINITY, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn split_examples() {
        let b = bounds(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(optimal_split(&b, 1.0).unwrap(), 0);
        let b = bounds(1.0, 1.0, 1.0, 16.0, 1.0, 1.0);
        assert_eq!(optimal_split(&b, 1.0).unwrap(), 2);
        assert!(optimal_split(&b, 0.0).is_err());
    }

    #[test]
    fn doubling_shift() {
        let b = bounds(1.3, 0.7, 3.0, 2.1, 1.1, 1.5);
        let s = split_shift_per_doubling(&b);
        let d = split_point(&b, 2.0 * 0.8) - split_point(&b, 0.8);
        assert!((d - s).abs() < 1e-13);
    }

    #[test]
    fn q1_q2_examples() {
        match choose_q1_q2(0.5, 1.0, 1.0, 0.5, 0.5).unwrap() {
            ExponentSplit::Split { delta, beta1, beta2, halvings, .. } => {
                assert_eq!(delta, 0.25);
                assert_eq!(halvings, 0);
                assert!((beta1 + 0.25).abs() < 1e-15 && (beta2 - 0.25).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(choose_q1_q2(0.5, 0.5, 1.0, 0.5, 0.5), Err(Error::Precondition(_))));
        assert_eq!(choose_q1_q2(0.0, 0.5, 2.0, 0.0, 0.5).unwrap(), ExponentSplit::DualityRoute);
    }

    #[test]
    fn tent_family_sums_to_three() {
        let fam = tent_family(1.0, 1.0, 60).unwrap();
        let rep = verify_summation(&fam, &bounds(1.0, 1.0, 1.0, 1.0, 1.0, 2.0)).unwrap();
        assert_eq!(rep.weak_norm, 3.0);
        assert_eq!(rep.ratio, 3.0);
        for s in &rep.split_levels {
            assert!(s.level_set <= s.chebyshev_bound);
        }
    }

    #[test]
    fn single_member() {
        let fam = vec![FamilyMember { j: 0, f: StepFunction::indicator(0.0, 1.0, 1.0).unwrap() }];
        let rep = verify_summation(&fam, &bounds(1.0, 1.0, 1.0, 1.0, 1.0, 2.0)).unwrap();
        assert_eq!(rep.ratio, 1.0);
    }

    #[test]
    fn violating_member_named() {
        let fam = vec![FamilyMember { j: 3, f: StepFunction::indicator(0.0, 1.0, 1.0).unwrap() }];
        match verify_summation(&fam, &bounds(1.0, 1.0, 1.0, 1.0, 1.0, 2.0)) {
            Err(Error::Rejected { j, .. }) => assert_eq!(j, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extremal_family_meets_bounds() {
        for (q1, q2) in [(1.0, 2.0), (3.0, 1.5), (2.0, 2.0)] {
            let b = bounds(1.0, 0.5, q1, 1.0, 0.75, q2);
            let fam = extremal_family(&b, 12).unwrap();
            let rep = verify_summation(&fam, &b).unwrap();
            assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
        }
    }

    #[test]
    fn step_function_basics() {
        let f = StepFunction::new(vec![0.0, 1.0, 3.0], vec![2.0, -1.0]).unwrap();
        assert_eq!(f.value_at(-0.5), 0.0);
        assert_eq!(f.value_at(0.0), 2.0);
        assert_eq!(f.value_at(2.0), -1.0);
        assert_eq!(f.value_at(3.0), 0.0);
        assert!((f.lebesgue(2.0) - 6f64.sqrt()).abs() < 1e-15);
        assert!(StepFunction::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }
}
