use mixed_shor::numtheory::*;
use mixed_shor::Fraction;
use proptest::prelude::*;

fn brute_gcd(a: u64, b: u64) -> u64 {
    (1..=a.max(b))
        .rev()
        .find(|d| a.is_multiple_of(*d) && b.is_multiple_of(*d))
        .unwrap_or(0)
}

fn brute_prime(n: u64) -> bool {
    n >= 2 && (2..n).all(|d| !n.is_multiple_of(d))
}

proptest! {
    #[test]
    fn gcd_matches_brute_force(a in 0u64..300, b in 0u64..300) {
        prop_assert_eq!(gcd(a, b), brute_gcd(a, b));
    }

    #[test]
    fn modpow_matches_repeated_multiplication(base in 0u64..1000, exp in 0u64..200, m in 2u64..1000) {
        let mut want = 1 % m;
        for _ in 0..exp {
            want = want * base % m;
        }
        prop_assert_eq!(modpow(base, exp, m).unwrap(), want);
    }

    #[test]
    fn modpow_survives_large_moduli(base in any::<u64>(), exp in 0u64..64, m in (1u64 << 62)..u64::MAX) {
        let mut want: u128 = 1;
        for _ in 0..exp {
            want = want * (base as u128) % (m as u128);
        }
        prop_assert_eq!(modpow(base, exp, m).unwrap() as u128, want % m as u128);
    }

    #[test]
    fn order_is_smallest_exponent(m in 2u64..400, a in 1u64..400) {
        let a = a % m;
        match multiplicative_order(a, m) {
            Ok(r) => {
                prop_assert_eq!(gcd(a, m), 1);
                let brute = (1..=m).find(|&k| modpow(a, k, m).unwrap() == 1 % m).unwrap();
                prop_assert_eq!(r, brute);
            }
            Err(_) => prop_assert_ne!(gcd(a, m), 1),
        }
    }

    #[test]
    fn totient_is_multiplicative(p in 2u64..60, q in 2u64..60) {
        prop_assume!(gcd(p, q) == 1);
        prop_assert_eq!(totient(p * q), totient(p) * totient(q));
    }

    #[test]
    fn primality_matches_trial_division(n in 0u64..5000) {
        prop_assert_eq!(is_prime(n), brute_prime(n));
    }

    #[test]
    fn perfect_power_detects_constructed_powers(b in 2u64..50, k in 2u32..6) {
        let n = b.pow(k);
        let (base, exp) = perfect_power(n).unwrap();
        prop_assert_eq!(base.pow(exp), n);
        prop_assert!(exp >= k);
    }

    #[test]
    fn perfect_power_rejects_semiprimes(i in 0usize..45, k in 1usize..45) {
        let primes: Vec<u64> = (3..200).filter(|&n| brute_prime(n)).collect();
        let (p, q) = (primes[i], primes[(i + k) % primes.len()]);
        prop_assert_eq!(perfect_power(p * q), None);
    }

    /// With t > N^2 and c the nearest integer to j t / r, the fraction j/r
    /// (r < N) is the only fraction with denominator below N within
    /// 1/(2N^2) of c/t, so it must be the last convergent below N.
    #[test]
    fn convergent_recovers_reduced_phase(n in 3u64..2000, r_seed in any::<u64>(), j_seed in any::<u64>()) {
        let r = 1 + r_seed % (n - 1);
        let j = j_seed % r;
        let l = 64 - (n * n).leading_zeros();
        let t = 1u64 << l;
        let c = ((j as u128 * t as u128 + r as u128 / 2) / r as u128) as u64 % t;
        let got = best_convergent(c, t, n).unwrap();
        prop_assert_eq!(got, Fraction::new(j, r));
    }

    #[test]
    fn convergent_is_close_and_bounded(t_exp in 1u32..40, c_seed in any::<u64>(), bound in 2u64..100_000) {
        let t = 1u64 << t_exp;
        let c = c_seed % t;
        let f = best_convergent(c, t, bound).unwrap();
        prop_assert!(f.den < bound && f.den >= 1);
        let gap = (c as f64 / t as f64 - f.to_f64()).abs();
        prop_assert!(gap <= 1.0 / (f.den as f64 * f.den as f64) + 1e-15);
    }
}

#[test]
fn ceil_log2_matches_definition() {
    for n in 1u64..5000 {
        let m = ceil_log2(n);
        assert!(1u64 << m >= n);
        assert!(m == 0 || 1u64 << (m - 1) < n);
    }
}
