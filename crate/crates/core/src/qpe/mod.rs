//! Phase-estimation statistics for the order-finding circuit.
//!
//! Three engines compute the distribution of the measured integer `c`:
//!
//! - [`analytic_distribution`] sums the Dirichlet kernel over every
//!   eigenphase `j/r_d` of every orbit,
//! - [`statevector_run`] simulates the full multi-qubit control register
//!   gate by gate on one orbit subspace,
//! - [`sample_semiclassical`] and [`sample_trajectory`] draw single shots
//!   through the one-recycled-qubit circuit.
//!
//! They share no code beyond the orbit table.

mod analytic;
mod bounds;
mod kernel;
mod sampling;
mod statevector;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numtheory::Fraction;

pub use analytic::{analytic_distribution, eigen_distribution, orbit_mixture_distribution};
pub use bounds::{mods_bound_check, ModSReport, DIRICHLET_FLOOR};
pub use kernel::{dirichlet_weight, dirichlet_weight_exact};
pub use sampling::{
    empirical_distribution, sample_semiclassical, sample_shot, sample_trajectory, Shot, ShotEngine,
    TRAJECTORY_MIN_PERIOD,
};
pub use statevector::{statevector_run, MAX_STATEVECTOR_DIM};

/// Largest outcome space held as a dense vector.
pub const MAX_DENSE_T: u64 = 1 << 18;

/// An eigenstate of the multiplication operator inside orbit `d`, with
/// eigenvalue `e^{2 pi i j / r_d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenLabel {
    pub d: usize,
    pub j: u64,
    /// `j / r_d`, reduced.
    pub phase: Fraction,
}

impl EigenLabel {
    pub fn new(d: usize, j: u64, period: u64) -> Result<Self> {
        if j >= period {
            return Err(invalid(format!(
                "eigen index {j} out of range for period {period}"
            )));
        }
        Ok(EigenLabel {
            d,
            j,
            phase: Fraction::new(j, period),
        })
    }
}

/// One L-bit measurement record, `c = sum_i 2^i m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseShot {
    #[serde(rename = "L")]
    pub l: u32,
    /// `bits[i] = m_i`; `m_0` is the least significant bit and is measured
    /// first.
    pub bits: Vec<u8>,
    pub c: u64,
    pub t: u64,
}

impl PhaseShot {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        let l = bits.len() as u32;
        let c = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &m)| acc | ((m as u64) << i));
        PhaseShot {
            l,
            bits,
            c,
            t: 1u64 << l,
        }
    }
}

/// A probability vector over `c in {0, .., t-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub t: u64,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub(crate) fn zeros(t: u64) -> Self {
        Distribution {
            t,
            probs: vec![0.0; t as usize],
        }
    }

    /// Empirical distribution of observed outcomes.
    pub fn from_counts(t: u64, counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        Distribution {
            t,
            probs: counts
                .iter()
                .map(|&k| k as f64 / total.max(1) as f64)
                .collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        assert_eq!(self.t, other.t, "distributions over different supports");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        assert_eq!(self.t, other.t, "distributions over different supports");
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// CSV rows `c,probability`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["c", "probability"])?;
        for (c, p) in self.probs.iter().enumerate() {
            w.write_record([c.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Smallest `L` with `N^2 < 2^L`; this lands in `N^2 < 2^L < 2N^2` for
/// every `N` that is not a power of two.
pub fn choose_l(n: u64) -> u32 {
    assert!(n >= 2, "modulus must be at least 2");
    let sq = (n as u128) * (n as u128);
    128 - sq.leading_zeros()
}

/// Whether `2^l` lies strictly between `N^2` and `2N^2`.
pub fn l_in_standard_range(n: u64, l: u32) -> bool {
    let sq = (n as u128) * (n as u128);
    let t = 1u128.checked_shl(l).unwrap_or(0);
    l < 127 && sq < t && t < 2 * sq
}

pub(crate) fn check_dense_t(l: u32) -> Result<u64> {
    let t = 1u64.checked_shl(l).unwrap_or(u64::MAX);
    if l >= 63 || t > MAX_DENSE_T {
        return Err(crate::Error::Resource(format!(
            "dense distribution over 2^{l} outcomes exceeds 2^18"
        )));
    }
    Ok(t)
}
