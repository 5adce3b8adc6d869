use rayon::prelude::*;

use super::{check_dense_t, dirichlet_weight_exact, Distribution};
use crate::error::Result;
use crate::numtheory::Fraction;
use crate::orbits::OrbitTable;

/// Outcome distribution for the maximally mixed register:
/// `P(c) = (1/N) sum_d sum_{j<r_d} w(j/r_d - c/t)`.
///
/// The double sum runs over every orbit literally; orbits sharing a period
/// are not merged, so this stays independent of
/// [`orbit_mixture_distribution`].
pub fn analytic_distribution(table: &OrbitTable, l: u32) -> Result<Distribution> {
    let t = check_dense_t(l)?;
    let n = table.n() as f64;
    let probs = (0..t)
        .into_par_iter()
        .map(|c| {
            let mut acc = 0.0;
            for orbit in table.orbits() {
                for j in 0..orbit.period {
                    acc += dirichlet_weight_exact(j, orbit.period, c, t);
                }
            }
            acc / n
        })
        .collect();
    Ok(Distribution { t, probs })
}

/// Outcome distribution for a definite eigenstate with eigenphase `phase`.
pub fn eigen_distribution(phase: Fraction, l: u32) -> Result<Distribution> {
    let t = check_dense_t(l)?;
    let probs = (0..t)
        .map(|c| dirichlet_weight_exact(phase.num, phase.den, c, t))
        .collect();
    Ok(Distribution { t, probs })
}

/// `(1/r) sum_{j<r} eigen_distribution(j/r)`: the outcome distribution of a
/// register prepared in any single basis state of a period-`r` orbit.
pub fn orbit_mixture_distribution(period: u64, l: u32) -> Result<Distribution> {
    let mut out = Distribution::zeros(check_dense_t(l)?);
    for j in 0..period {
        let d = eigen_distribution(Fraction::new(j, period), l)?;
        for (acc, p) in out.probs.iter_mut().zip(d.probs) {
            *acc += p / period as f64;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::decompose;

    #[test]
    fn n15_a2_l8_peaks() {
        let table = decompose(15, 2).unwrap();
        let d = analytic_distribution(&table, 8).unwrap();
        assert_eq!(d.t, 256);
        for (c, &p) in d.probs.iter().enumerate() {
            let want = match c {
                0 => 1.0 / 3.0,
                64 | 192 => 0.2,
                128 => 4.0 / 15.0,
                _ => 0.0,
            };
            assert!((p - want).abs() < 1e-12, "c={c}: {p} vs {want}");
        }
        assert!((d.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn eigen_examples() {
        let d = eigen_distribution(Fraction::new(1, 4), 8).unwrap();
        assert_eq!(d.probs[64], 1.0);
        assert!((d.total() - 1.0).abs() < 1e-12);

        let d = eigen_distribution(Fraction::zero(), 5).unwrap();
        assert_eq!(d.probs[0], 1.0);

        let d = eigen_distribution(Fraction::new(1, 3), 3).unwrap();
        assert!((d.probs[3] - 0.6879).abs() < 1e-4);
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_for_awkward_instances() {
        for (n, a) in [(21, 2), (35, 3), (55, 7)] {
            let table = decompose(n, a).unwrap();
            for l in [3, 7, 10] {
                let d = analytic_distribution(&table, l).unwrap();
                assert!((d.total() - 1.0).abs() < 1e-9, "N={n} a={a} L={l}");
            }
        }
    }

    #[test]
    fn rejects_huge_t() {
        let table = decompose(15, 2).unwrap();
        assert!(analytic_distribution(&table, 19).is_err());
    }
}
