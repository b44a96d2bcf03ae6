//! Smooth compactly supported profiles.

/// `exp(1 − 1/(1 − s²))` on `|s| < 1`, zero outside; equals 1 at `s = 0`.
#[inline]
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Derivative of [`bump`].
#[inline]
pub fn bump_deriv(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        -2.0 * s / (q * q) * bump(s)
    }
}

/// Second derivative of [`bump`].
#[inline]
pub fn bump_deriv2(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        let g = -2.0 * s / (q * q);
        let dg = -2.0 / (q * q) - 8.0 * s * s / (q * q * q);
        (g * g + dg) * bump(s)
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, all derivatives vanish at both ends.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Derivative of [`smooth_step`].
#[inline]
pub fn smooth_step_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        let s = a + b;
        a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivatives_match_differences() {
        let h = 1e-6;
        for &s in &[-0.7, -0.2, 0.0, 0.35, 0.8] {
            let fd = (bump(s + h) - bump(s - h)) / (2.0 * h);
            assert!((fd - bump_deriv(s)).abs() < 1e-7);
            let t = 0.5 + 0.6 * s;
            let fds = (smooth_step(t + h) - smooth_step(t - h)) / (2.0 * h);
            assert!((fds - smooth_step_deriv(t)).abs() < 1e-7);
            let fd2 = (bump_deriv(s + h) - bump_deriv(s - h)) / (2.0 * h);
            assert!((fd2 - bump_deriv2(s)).abs() < 1e-6);
        }
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
    }

    #[test]
    fn smooth_step_is_monotone_and_symmetric() {
        let mut prev = 0.0;
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            let v = smooth_step(t);
            assert!(v >= prev);
            assert!((v + smooth_step(1.0 - t) - 1.0).abs() < 1e-14);
            prev = v;
        }
    }
}
