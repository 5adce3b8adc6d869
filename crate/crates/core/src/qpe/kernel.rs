//! The normalised Dirichlet kernel `|S|^2 / t^2`,
//! `S = sum_{x<t} e^{2 pi i x theta}`.

use std::f64::consts::PI;

/// `sin^2(pi t theta) / (t^2 sin^2(pi theta))`, equal to 1 when `theta` is
/// an integer.
pub fn dirichlet_weight(theta: f64, t: u64) -> f64 {
    assert!(t >= 1, "support size must be positive");
    let frac = theta - theta.round();
    if frac == 0.0 {
        return 1.0;
    }
    let tf = t as f64;
    let num = (PI * (tf * frac)).sin();
    let den = tf * (PI * frac).sin();
    (num / den).powi(2)
}

/// `sin^2(pi * k / m)` with `k` reduced into `[0, m/2]` before the float
/// conversion.
pub(crate) fn sin2_ratio(k: u128, m: u128) -> f64 {
    let k = k % m;
    let k = k.min(m - k);
    (PI * (k as f64 / m as f64)).sin().powi(2)
}

/// Kernel at the rational offset `theta = j/r - c/t`.
///
/// The singular and zero cases are decided by integer tests, so a kernel
/// zero (`t*theta` integral, `theta` not) is exactly `0.0` and the peak is
/// exactly `1.0`.
pub fn dirichlet_weight_exact(j: u64, r: u64, c: u64, t: u64) -> f64 {
    assert!(r >= 1 && t >= 1);
    let (j, r, c, t) = (j as i128, r as i128, c as i128, t as i128);
    // theta = n / (r t); t theta = n / r.
    let n = j * t - c * r;
    let rt = r * t;
    let n_rt = n.rem_euclid(rt) as u128;
    if n_rt == 0 {
        return 1.0;
    }
    let n_r = n.rem_euclid(r) as u128;
    if n_r == 0 {
        return 0.0;
    }
    let num = sin2_ratio(n_r, r as u128);
    let den = sin2_ratio(n_rt, rt as u128);
    num / (den * (t as f64).powi(2))
}
