//! Gate-by-gate simulation of the L-control-qubit circuit on one orbit.
//!
//! The register starts in the orbit's leader, so only the `r_d` orbit
//! members are ever populated and the state lives in `C^{t * r_d}`. The flat
//! index is `o * t + x` with `x` the control register value and `o` the
//! orbit position, which keeps control qubit `b` at bit `b`.

use num_complex::Complex64;

use super::{check_dense_t, Distribution};
use crate::circuit::{inverse_qft, Gate};
use crate::error::{Error, Result};
use crate::orbits::Orbit;

/// Largest `t * r_d` simulated.
pub const MAX_STATEVECTOR_DIM: u64 = 1 << 24;

/// Born distribution of the control register for the circuit with register
/// prepared in `|leader>`: Hadamards, controlled `U^{2^k}` from control bit
/// `k`, inverse Fourier transform.
pub fn statevector_run(orbit: &Orbit, l: u32) -> Result<Distribution> {
    let t = check_dense_t(l)?;
    let r = orbit.period;
    let dim = t
        .checked_mul(r)
        .filter(|&d| d <= MAX_STATEVECTOR_DIM)
        .ok_or_else(|| {
            Error::Resource(format!(
                "state vector of 2^{l} x {r} amplitudes is too large"
            ))
        })?;
    let (t, r, dim) = (t as usize, r as usize, dim as usize);

    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(1.0, 0.0);
    for q in 0..l {
        Gate::Hadamard(q).apply(&mut amps);
    }

    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..l {
        // U^{2^k} advances the orbit position by 2^k (mod r).
        let step = ((1u128 << k) % r as u128) as usize;
        let bit = 1usize << k;
        for (idx, amp) in amps.iter().enumerate() {
            let (o, x) = (idx / t, idx % t);
            let o2 = if x & bit != 0 { (o + step) % r } else { o };
            next[o2 * t + x] = *amp;
        }
        std::mem::swap(&mut amps, &mut next);
    }

    for gate in inverse_qft(l) {
        gate.apply(&mut amps);
    }

    let mut dist = Distribution::zeros(t as u64);
    for (idx, amp) in amps.iter().enumerate() {
        dist.probs[idx % t] += amp.norm_sqr();
    }
    Ok(dist)
}
