//! Gates acting on the control register.
//!
//! Both the state-vector and density-matrix engines lay out their basis so
//! that control qubit `b` is bit `b` of the flat index (control register in
//! the low bits). A gate therefore acts on a flat amplitude slice directly,
//! whatever sits in the high bits.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Hadamard(u32),
    /// Multiplies the `|1>_control |1>_target` component by `e^{i angle}`.
    ControlledPhase {
        control: u32,
        target: u32,
        angle: f64,
    },
    Swap(u32, u32),
}

impl Gate {
    /// Complex conjugate of the gate matrix (not the adjoint).
    pub fn conj(self) -> Gate {
        match self {
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => Gate::ControlledPhase {
                control,
                target,
                angle: -angle,
            },
            g => g,
        }
    }

    /// Applies the gate in place to a flat amplitude vector.
    pub fn apply(self, amps: &mut [Complex64]) {
        match self {
            Gate::Hadamard(q) => {
                let bit = 1usize << q;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        let (x, y) = (amps[i], amps[i | bit]);
                        amps[i] = (x + y) * FRAC_1_SQRT_2;
                        amps[i | bit] = (x - y) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => {
                let mask = (1usize << control) | (1usize << target);
                let phase = Complex64::from_polar(1.0, angle);
                for (i, amp) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp *= phase;
                    }
                }
            }
            Gate::Swap(p, q) => {
                let (bp, bq) = (1usize << p, 1usize << q);
                for i in 0..amps.len() {
                    if i & bp != 0 && i & bq == 0 {
                        amps.swap(i, (i & !bp) | bq);
                    }
                }
            }
        }
    }
}

/// Gate list for the inverse quantum Fourier transform on qubits
/// `0..n_qubits`, mapping `|x>` to `t^{-1/2} sum_c e^{-2 pi i x c / t} |c>`
/// with `c` read in natural bit order.
///
/// Built from Hadamards and controlled rotations `R_m = diag(1, e^{-2 pi i / 2^m})`
/// preceded by the bit-reversal swaps.
pub fn inverse_qft(n_qubits: u32) -> Vec<Gate> {
    let mut gates = Vec::new();
    for b in 0..n_qubits / 2 {
        gates.push(Gate::Swap(b, n_qubits - 1 - b));
    }
    for j in 0..n_qubits {
        for k in 0..j {
            let m = j - k + 1;
            gates.push(Gate::ControlledPhase {
                control: k,
                target: j,
                angle: -2.0 * PI / (1u64 << m) as f64,
            });
        }
        gates.push(Gate::Hadamard(j));
    }
    gates
}
