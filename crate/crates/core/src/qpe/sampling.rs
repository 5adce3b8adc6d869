//! Single-shot sampling through the one-control-qubit circuit.
//!
//! The control qubit is recycled `L` times. Round `i` applies the controlled
//! power `U^{2^{L-1-i}}`, a feedback rotation by the phase
//! `omega_i = sum_{k=1}^{i} m_{i-k} 2^{-(k+1)}` built from earlier outcomes,
//! a Hadamard and a measurement. Outcome `m_i` is bit `i` of `c`, so the
//! least significant bit is measured first. Note that
//! `omega_i = (m_0 + 2 m_1 + .. + 2^{i-1} m_{i-1}) / 2^{i+1}`, i.e. the bits
//! measured so far over `2^{i+1}`, which is how it is evaluated below.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::sin2_ratio;
use super::{check_dense_t, Distribution, EigenLabel, PhaseShot};
use crate::error::Result;
use crate::numtheory::{modpow, Fraction};
use crate::orbits::OrbitTable;
use crate::rng::stream;

/// Orbits at least this long are sampled with the trajectory engine under
/// [`ShotEngine::Auto`].
pub const TRAJECTORY_MIN_PERIOD: u64 = 64;

/// How [`sample_shot`] produces the control-qubit record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShotEngine {
    /// Draw an eigenlabel `j`, then run the closed-form per-bit law.
    Eigenphase,
    /// Track the register amplitudes over the orbit; no eigenphases.
    Trajectory,
    /// Eigenphase for short orbits, trajectory for long ones.
    #[default]
    Auto,
}

/// One sample from the mixed-register circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    /// Register basis state drawn from the maximally mixed state.
    pub g: u64,
    /// Orbit id of `g`.
    pub d: usize,
    /// Eigenlabel, when the engine draws one.
    pub label: Option<EigenLabel>,
    pub shot: PhaseShot,
}

#[derive(Serialize)]
struct ShotLine<'a> {
    g: u64,
    d: usize,
    j: Option<u64>,
    bits: &'a [u8],
    c: u64,
}

impl Shot {
    /// `{g, d, j, bits, c}` on one line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&ShotLine {
            g: self.g,
            d: self.d,
            j: self.label.map(|l| l.j),
            bits: &self.shot.bits,
            c: self.shot.c,
        })
        .expect("shot line serializes")
    }
}

fn draw_bit<R: Rng + ?Sized>(p_one: f64, rng: &mut R) -> u8 {
    u8::from(rng.random::<f64>() < p_one.clamp(0.0, 1.0))
}

/// Samples the L measured bits for a register in a definite eigenstate with
/// eigenphase `phase`.
///
/// Bit `i` is one with probability `sin^2(pi (2^{L-1-i} phase - omega_i))`,
/// evaluated exactly as `sin^2(pi (j 2^L - c_low r) / (r 2^{i+1}))` with
/// `c_low` the bits measured so far.
pub fn sample_semiclassical<R: Rng + ?Sized>(phase: Fraction, l: u32, rng: &mut R) -> PhaseShot {
    assert!(l < 64, "at most 63 control rounds");
    let (j, r) = (phase.num as u128, phase.den as u128);
    let scaled = j << l;
    let mut bits = Vec::with_capacity(l as usize);
    let mut c_low: u128 = 0;
    for i in 0..l {
        let den = r << (i + 1);
        let num = (scaled + den - (c_low * r) % den) % den;
        let m = draw_bit(sin2_ratio(num, den), rng);
        c_low |= (m as u128) << i;
        bits.push(m);
    }
    PhaseShot::from_bits(bits)
}

/// Samples the L measured bits for a register starting in the basis state
/// at `offset` of a period-`period` orbit, evolving the register amplitudes
/// through every round.
///
/// Cost is `O(L * period)`; no eigen-decomposition is used.
pub fn sample_trajectory<R: Rng + ?Sized>(
    period: u64,
    offset: usize,
    l: u32,
    rng: &mut R,
) -> PhaseShot {
    assert!(l < 64, "at most 63 control rounds");
    let r = period as usize;
    let mut psi = vec![Complex64::new(0.0, 0.0); r];
    psi[offset] = Complex64::new(1.0, 0.0);
    let mut shifted = psi.clone();
    let mut bits = Vec::with_capacity(l as usize);
    let mut c_low: u64 = 0;
    for i in 0..l {
        let k = if r == 1 {
            0
        } else {
            modpow(2, (l - 1 - i) as u64, period).expect("period >= 2") as usize
        };
        // U^k moves the amplitude at orbit position o to o + k.
        for (o, amp) in psi.iter().enumerate() {
            shifted[(o + k) % r] = *amp;
        }
        let omega = c_low as f64 / (1u128 << (i + 1)) as f64;
        let feedback = Complex64::from_polar(1.0, -2.0 * PI * omega);
        let p_one: f64 = psi
            .iter()
            .zip(&shifted)
            .map(|(x, y)| ((x - feedback * y) * 0.5).norm_sqr())
            .sum();
        let m = draw_bit(p_one, rng);
        let sign = if m == 1 { -1.0 } else { 1.0 };
        let p = if m == 1 { p_one } else { 1.0 - p_one };
        let scale = 0.5 / p.max(f64::MIN_POSITIVE).sqrt();
        for (x, y) in psi.iter_mut().zip(&shifted) {
            *x = (*x + feedback * y * sign) * scale;
        }
        c_low |= (m as u64) << i;
        bits.push(m);
    }
    PhaseShot::from_bits(bits)
}

/// Draws `g` uniformly from `[0, N)` (the maximally mixed register) and
/// samples one control record.
pub fn sample_shot<R: Rng + ?Sized>(
    table: &OrbitTable,
    l: u32,
    engine: ShotEngine,
    rng: &mut R,
) -> Shot {
    let g = rng.random_range(0..table.n());
    let (d, offset) = table.locate(g);
    let period = table.orbits()[d].period;
    let use_trajectory = match engine {
        ShotEngine::Eigenphase => false,
        ShotEngine::Trajectory => true,
        ShotEngine::Auto => period >= TRAJECTORY_MIN_PERIOD,
    };
    if use_trajectory {
        Shot {
            g,
            d,
            label: None,
            shot: sample_trajectory(period, offset, l, rng),
        }
    } else {
        let j = rng.random_range(0..period);
        let label = EigenLabel::new(d, j, period).expect("j < period");
        Shot {
            g,
            d,
            label: Some(label),
            shot: sample_semiclassical(label.phase, l, rng),
        }
    }
}

/// Histogram of `shots` independent shots over `t = 2^L` outcomes; shot
/// `i` draws from [`stream`]`(seed, i)`, so the result does not depend on
/// the thread count.
pub fn empirical_distribution(
    table: &OrbitTable,
    l: u32,
    engine: ShotEngine,
    shots: u64,
    seed: u64,
) -> Result<Distribution> {
    let t = check_dense_t(l)? as usize;
    let counts = (0..shots)
        .into_par_iter()
        .fold(
            || vec![0u64; t],
            |mut acc, i| {
                acc[sample_shot(table, l, engine, &mut stream(seed, i)).shot.c as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; t],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(u, v)| *u += v);
                x
            },
        );
    Ok(Distribution::from_counts(t as u64, &counts))
}
