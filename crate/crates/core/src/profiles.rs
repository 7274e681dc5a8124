//! Smooth compactly supported profiles shared by the grid, propagator and
//! counterexample code.

/// `exp(-1/(1-u²))` on `(-1, 1)`, zero elsewhere.
pub fn bump(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn edge(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `C^∞` in between.
pub fn smooth_step(x: f64) -> f64 {
    let a = edge(x);
    let b = edge(1.0 - x);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Cutoff supported in `[lo, hi]`, equal to 1 on `[3lo/2, 3hi/4]`.
pub fn annular_cutoff(r: f64, lo: f64, hi: f64) -> f64 {
    smooth_step((r - lo) / (0.5 * lo)) * smooth_step((hi - r) / (0.25 * hi))
}

/// Smooth cutoff equal to 1 on `[3/4, 3/2]` and supported in `[1/2, 2]`.
pub fn chi0(r: f64) -> f64 {
    annular_cutoff(r, 0.5, 2.0)
}

fn lp_base(l: f64) -> f64 {
    bump(l)
}

/// Littlewood–Paley profile as a function of `l = log₂|ξ|`, supported in
/// `|l| < 1`, normalised so that `Σ_j lp_profile_log(l - j) = 1`.
pub fn lp_profile_log(l: f64) -> f64 {
    if l.abs() >= 1.0 {
        return 0.0;
    }
    let k = l.floor();
    let frac = l - k;
    // The two translates covering `l` are at offsets `frac` and `frac - 1`.
    let denom = lp_base(frac) + lp_base(frac - 1.0);
    lp_base(l) / denom
}

/// `φ̂(r)` for `r > 0`; zero at the origin.
pub fn lp_profile(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        lp_profile_log(r.log2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_support_and_peak() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.2), 0.0);
        assert!((bump(0.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(bump(0.3), bump(-0.3));
    }

    #[test]
    fn step_limits() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert!((smooth_step(0.3) + smooth_step(0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chi0_plateau_and_support() {
        for r in [0.75, 1.0, 1.2, 1.5] {
            assert_eq!(chi0(r), 1.0);
        }
        for r in [0.0, 0.5, 2.0, 3.0] {
            assert_eq!(chi0(r), 0.0);
        }
        assert!(chi0(0.6) > 0.0 && chi0(0.6) < 1.0);
    }

    #[test]
    fn lp_partition_of_unity() {
        for i in 0..2000 {
            let l = -7.3 + i as f64 * 0.0071;
            let s: f64 = (-12..=12).map(|j| lp_profile_log(l - j as f64)).sum();
            assert!((s - 1.0).abs() < 1e-14, "l = {l}: {s}");
        }
        assert_eq!(lp_profile(0.5), 0.0);
        assert_eq!(lp_profile(2.0), 0.0);
        assert_eq!(lp_profile(1.0), 1.0);
    }
}
