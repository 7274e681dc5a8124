//! Composite Gauss–Legendre quadrature with panel refinement.

use std::f64::consts::PI;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

pub const PANEL_ORDER: usize = 16;

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// Nodes and weights of the composite 16-point rule with `panels` equal
/// panels on `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = gl16();
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

pub fn integrate<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, panels: usize) -> T {
    composite_rule(a, b, panels.max(1)).into_iter().fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
}

/// Panel count giving two 16-point panels per period of `e^{iωx}` on
/// `[a, b]`, i.e. at least 32 nodes per oscillation.
pub fn oscillatory_panels(a: f64, b: f64, omega: f64) -> usize {
    let periods = (b - a).abs() * omega.abs() / (2.0 * PI);
    (2.0 * periods).ceil().max(1.0) as usize
}

/// Doubles the panel count from `initial` until successive estimates agree
/// to `tol` (absolute, relative to the larger of 1 and the estimate).
pub fn integrate_adaptive<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, initial: usize, tol: f64) -> T {
    let mut panels = initial.max(1);
    let mut prev = integrate(&f, a, b, panels);
    for _ in 0..12 {
        panels *= 2;
        let next = integrate(&f, a, b, panels);
        let scale = next.magnitude().max(1.0);
        if (next + prev * -1.0).magnitude() <= tol * scale {
            return next;
        }
        prev = next;
    }
    prev
}
