//! Bessel functions of integer and half-integer order.
//!
//! Orders are passed doubled (`two_nu = 2ν`) so that `ν = (d-2)/2` is exact
//! for every dimension.

use std::f64::consts::PI;

const TRAPEZOID_LIMIT: f64 = 25.0;

/// Coefficients `a_k(ν)` of the Hankel expansion, up to `k_max`.
fn hankel_coefficients(two_nu: u32, k_max: usize) -> Vec<f64> {
    let mu = (two_nu as f64).powi(2);
    let mut a = Vec::with_capacity(k_max + 1);
    a.push(1.0);
    for k in 1..=k_max {
        let odd = (2 * k - 1) as f64;
        let next = a[k - 1] * (mu - odd * odd) / (k as f64 * 8.0);
        a.push(next);
    }
    a
}

/// `P(ν, x) - 1` and `Q(ν, x)` such that
/// `√(πx/2) J_ν(x) = P cos ω - Q sin ω` with `ω = x - νπ/2 - π/4`.
/// Exact for half-integer `ν`; asymptotic otherwise.
fn hankel_pq(two_nu: u32, x: f64) -> (f64, f64) {
    let half_integer = two_nu % 2 == 1;
    let k_max = if half_integer { two_nu as usize / 2 + 1 } else { 60 };
    let a = hankel_coefficients(two_nu, k_max);
    let (mut pm1, mut q) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    let mut xk = 1.0;
    for (k, ak) in a.iter().enumerate().skip(1) {
        xk *= x;
        let term = ak / xk;
        if term == 0.0 {
            break;
        }
        if !half_integer {
            if term.abs() > last {
                break;
            }
            last = term.abs();
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pm1 += sign * term;
        } else {
            q += sign * term;
        }
        if !half_integer && term.abs() < 1e-18 {
            break;
        }
    }
    (pm1, q)
}

fn bessel_integer_trapezoid(n: u32, x: f64) -> f64 {
    // J_n(x) = (1/2π)∫_0^{2π} cos(nτ - x sin τ) dτ; periodic, so the
    // trapezoid rule converges geometrically once M exceeds n + |x|.
    let m = 2 * ((x.abs() + n as f64) as usize + 40);
    let h = 2.0 * PI / m as f64;
    let s: f64 = (0..m)
        .map(|k| {
            let tau = k as f64 * h;
            (n as f64 * tau - x * tau.sin()).cos()
        })
        .sum();
    s / m as f64
}

/// `J_ν(x)` for `x ≥ 0`, `ν = two_nu / 2`.
pub fn bessel_j(two_nu: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j requires x ≥ 0");
    let half_integer = two_nu % 2 == 1;
    if x == 0.0 {
        return if two_nu == 0 { 1.0 } else { 0.0 };
    }
    if !half_integer && x <= TRAPEZOID_LIMIT {
        return bessel_integer_trapezoid(two_nu / 2, x);
    }
    let (pm1, q) = hankel_pq(two_nu, x);
    let omega = x - (two_nu as f64 + 1.0) * PI / 4.0;
    ((1.0 + pm1) * omega.cos() - q * omega.sin()) / (PI * x / 2.0).sqrt()
}

/// Remainder of the leading sphere-transform asymptotic in dimension `d`:
/// `E(ρ) = √(πρ/2) J_{(d-2)/2}(ρ) - cos(ρ - π(d-1)/4)`.
pub fn sphere_remainder(d: u32, rho: f64) -> f64 {
    assert!(d >= 2);
    let two_nu = d - 2;
    let omega = rho - (d as f64 - 1.0) * PI / 4.0;
    if two_nu % 2 == 1 || rho > TRAPEZOID_LIMIT {
        let (pm1, q) = hankel_pq(two_nu, rho);
        pm1 * omega.cos() - q * omega.sin()
    } else {
        (PI * rho / 2.0).sqrt() * bessel_j(two_nu, rho) - omega.cos()
    }
}
