//! Exact integer arithmetic on machine words.
//!
//! Everything here works on `u64` with `u128` intermediates for modular
//! products. The supported instance range is `N < 2^31`, far above what the
//! table-based engines can hold, so no arbitrary-precision type is needed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A non-negative rational number kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    /// Builds `num/den` reduced to lowest terms.
    ///
    /// # Panics
    ///
    /// Panics if `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "fraction denominator must be positive");
        let g = gcd(num, den);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn zero() -> Self {
        Fraction { num: 0, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Greatest common divisor by Euclid's algorithm. `gcd(a, 0) = a`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply.
pub fn modpow(base: u64, mut exp: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(invalid(format!("modulus must be at least 2, got {m}")));
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, b, m);
        }
        b = mulmod(b, b, m);
        exp >>= 1;
    }
    Ok(result)
}

/// Smallest `r > 0` with `a^r = 1 (mod m)`, found by walking the powers of
/// `a`. This is O(r) and serves as the classical reference for the order.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(invalid(format!("modulus must be at least 2, got {m}")));
    }
    let a = a % m;
    if gcd(a, m) != 1 {
        return Err(Error::NotCoprime { a, m });
    }
    let mut x = a;
    let mut r = 1;
    while x != 1 {
        x = mulmod(x, a, m);
        r += 1;
    }
    Ok(r)
}

/// Euler's totient by direct count of `k in [1, n]` coprime to `n`.
pub fn totient(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

/// The continued-fraction convergent of `c/t` with the largest denominator
/// strictly below `bound`.
///
/// Returns `None` only when the preconditions (`c < t`, `bound >= 2`) fail.
pub fn best_convergent(c: u64, t: u64, bound: u64) -> Option<Fraction> {
    if t == 0 || c >= t || bound < 2 {
        return None;
    }
    // h/k run over successive convergents; (h_prev, k_prev) start at 1/0.
    let (mut h_prev, mut k_prev) = (1u128, 0u128);
    let (mut h, mut k) = (0u128, 1u128);
    let (mut num, mut den) = (c as u128, t as u128);
    let mut best = Fraction::zero();
    // c/t = [0; a1, a2, ...]; the a0 = 0 convergent is 0/1.
    while num != 0 {
        let q = den / num;
        let rem = den % num;
        den = num;
        num = rem;
        let h_next = q * h + h_prev;
        let k_next = q * k + k_prev;
        if k_next >= bound as u128 {
            break;
        }
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        best = Fraction::new(h as u64, k as u64);
    }
    Some(best)
}

/// Primality by trial division; adequate for the `N < 2^31` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Returns `Some((base, k))` with `k >= 2` if `n = base^k`.
pub fn perfect_power(n: u64) -> Option<(u64, u32)> {
    if n < 4 {
        return None;
    }
    for k in (2..=63u32).rev() {
        let root = (n as f64).powf(1.0 / k as f64).round() as u64;
        for b in root.saturating_sub(1).max(2)..=root + 1 {
            if b.checked_pow(k) == Some(n) {
                return Some((b, k));
            }
        }
    }
    None
}

/// Smallest `m` with `2^m >= n` (so `ceil(log2 n)` for `n >= 1`).
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}
