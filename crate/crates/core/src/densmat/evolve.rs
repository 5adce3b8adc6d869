//! Density-matrix evolution of the `L'`-control-qubit circuit, gate by gate
//! and in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{DenseHermitian, QubitLayout};
use crate::circuit::{inverse_qft, Gate};
use crate::error::Result;
use crate::numtheory::{modpow, mulmod};
use crate::orbits::decompose;

/// One circuit element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitOp {
    Control(Gate),
    /// Multiply the register by `a^{2^power}` mod N when control qubit
    /// `power` is set; padding states `x >= N` are left alone.
    ControlledMul {
        power: u32,
    },
}

impl CircuitOp {
    pub fn label(&self) -> String {
        match self {
            CircuitOp::Control(Gate::Hadamard(q)) => format!("H(c{q})"),
            CircuitOp::Control(Gate::ControlledPhase {
                control, target, ..
            }) => format!("R(c{control}->c{target})"),
            CircuitOp::Control(Gate::Swap(p, q)) => format!("SWAP(c{p},c{q})"),
            CircuitOp::ControlledMul { power } => format!("CU^{}(c{power})", 1u64 << power),
        }
    }
}

/// State after a prefix of the circuit; step 0 is the initial state.
#[derive(Debug, Clone)]
pub struct CircuitStep {
    pub step: usize,
    pub label: String,
    pub rho: DenseHermitian,
}

/// The circuit: Hadamards on every control qubit, controlled `U^{2^k}` from
/// control qubit `k`, then the inverse Fourier transform network.
pub fn circuit_ops(control_qubits: u32) -> Vec<CircuitOp> {
    let mut ops: Vec<CircuitOp> = (0..control_qubits)
        .map(|q| CircuitOp::Control(Gate::Hadamard(q)))
        .collect();
    ops.extend((0..control_qubits).map(|power| CircuitOp::ControlledMul { power }));
    ops.extend(
        inverse_qft(control_qubits)
            .into_iter()
            .map(CircuitOp::Control),
    );
    ops
}

/// `(1/(N t')) sum_{x,y} |x><y| (x) sum_{g<N} |g><g|`: uniform superposition
/// on the controls, maximally mixed over the N valid register states.
pub fn build_rho_ini(n: u64, a: u64, control_qubits: u32) -> Result<DenseHermitian> {
    decompose(n, a)?;
    let layout = QubitLayout::new(n, control_qubits)?;
    let tc = layout.control_dim();
    let w = Complex64::new(1.0 / (n as f64 * tc as f64), 0.0);
    let mut rho = DenseHermitian::zeros(layout.dim());
    for g in 0..n as usize {
        for x in 0..tc {
            for y in 0..tc {
                rho.set(layout.index(g, x), layout.index(g, y), w);
            }
        }
    }
    Ok(rho)
}

fn controlled_mul_permutation(layout: &QubitLayout, a: u64, power: u32) -> Vec<usize> {
    let n = layout.n;
    let factor = modpow(a, 1u64 << power, n).expect("modulus >= 2");
    let tc = layout.control_dim();
    let bit = 1usize << power;
    (0..layout.dim())
        .map(|i| {
            let (reg, x) = (i / tc, i % tc);
            if x & bit == 0 || reg as u64 >= n {
                i
            } else {
                layout.index(mulmod(reg as u64, factor, n) as usize, x)
            }
        })
        .collect()
}

/// Controls in `|0..0>`, register maximally mixed over the N valid states:
/// the state before the Hadamard layer.
pub fn build_rho_pre(n: u64, a: u64, control_qubits: u32) -> Result<DenseHermitian> {
    decompose(n, a)?;
    let layout = QubitLayout::new(n, control_qubits)?;
    let mut rho = DenseHermitian::zeros(layout.dim());
    for g in 0..n as usize {
        let i = layout.index(g, 0);
        rho.set(i, i, Complex64::new(1.0 / n as f64, 0.0));
    }
    Ok(rho)
}

/// Applies the circuit gate by gate from [`build_rho_pre`], returning every
/// intermediate state. After the Hadamard layer (step `L'`) the state is
/// [`build_rho_ini`].
pub fn evolve_gates_with_steps(n: u64, a: u64, control_qubits: u32) -> Result<Vec<CircuitStep>> {
    let layout = QubitLayout::new(n, control_qubits)?;
    let mut rho = build_rho_pre(n, a, control_qubits)?;
    let mut steps = vec![CircuitStep {
        step: 0,
        label: "initial".into(),
        rho: rho.clone(),
    }];
    for (i, op) in circuit_ops(control_qubits).into_iter().enumerate() {
        match op {
            CircuitOp::Control(g) => rho.conjugate_by(g),
            CircuitOp::ControlledMul { power } => {
                rho.permute(&controlled_mul_permutation(&layout, a, power))
            }
        }
        steps.push(CircuitStep {
            step: i + 1,
            label: op.label(),
            rho: rho.clone(),
        });
    }
    Ok(steps)
}

/// Final state of the gate-by-gate evolution.
pub fn evolve_gates(n: u64, a: u64, control_qubits: u32) -> Result<DenseHermitian> {
    let mut steps = evolve_gates_with_steps(n, a, control_qubits)?;
    Ok(steps.pop().expect("initial step always present").rho)
}

/// `e^{2 pi i num/den}` with the argument reduced exactly first.
fn root_of_unity(num: i128, den: i128) -> Complex64 {
    let k = num.rem_euclid(den);
    Complex64::from_polar(1.0, 2.0 * PI * (k as f64 / den as f64))
}

/// The post-transform state assembled from the eigen-decomposition:
///
/// `rho_2 = (1/N) sum_d sum_{j_d} |v><v|`,
/// `v = (1/t') sum_k S_k |k> (x) |psi^d_{j_d}>`,
/// `S_k = sum_{x<t'} e^{2 pi i x (j_d/r_d - k/t')}`,
///
/// with `|psi^d_j> = r_d^{-1/2} sum_m e^{-2 pi i j m / r_d} |g_d a^m>`.
pub fn evolve_closed_form(n: u64, a: u64, control_qubits: u32) -> Result<DenseHermitian> {
    let table = decompose(n, a)?;
    let layout = QubitLayout::new(n, control_qubits)?;
    let tc = layout.control_dim() as i128;
    let mut rho = DenseHermitian::zeros(layout.dim());
    let mut v = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for orbit in table.orbits() {
        let r = orbit.period as i128;
        for j in 0..r {
            let s: Vec<Complex64> = (0..tc)
                .map(|k| {
                    (0..tc)
                        .map(|x| root_of_unity(x * (j * tc - k * r), r * tc))
                        .sum::<Complex64>()
                        / tc as f64
                })
                .collect();
            let norm = 1.0 / (r as f64).sqrt();
            v.fill(Complex64::new(0.0, 0.0));
            for (m, &member) in orbit.members.iter().enumerate() {
                let amp = root_of_unity(-j * m as i128, r) * norm;
                for (k, sk) in s.iter().enumerate() {
                    v[layout.index(member as usize, k)] = amp * sk;
                }
            }
            rho.add_outer(&v, 1.0 / n as f64);
        }
    }
    Ok(rho)
}
