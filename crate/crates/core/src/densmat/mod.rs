//! Dense density matrices for a handful of control qubits plus the padded
//! work register.
//!
//! Basis layout: the flat index is `reg * t' + x` where `x` is the control
//! register value (`t' = 2^{L'}`) and `reg` the register value. Qubit `b`
//! of a cut bitmask is bit `b` of that index, so qubits `0..L'` are the
//! control qubits and qubits `L'..L'+ceil(log2 N)` the register qubits.

mod eigen;
mod entanglement;
mod evolve;

use num_complex::Complex64;

use crate::circuit::Gate;
use crate::error::{invalid, Error, Result};
use crate::numtheory::ceil_log2;

pub use eigen::{hermitian_eigenvalues, min_eigenvalue};
pub use entanglement::{default_cuts, negativity_scan, partial_transpose, NptEntry, NptReport};
pub use evolve::{
    build_rho_ini, build_rho_pre, circuit_ops, evolve_closed_form, evolve_gates,
    evolve_gates_with_steps, CircuitOp, CircuitStep,
};

/// Largest matrix dimension handled.
pub const MAX_DIM: usize = 4096;

/// Hermiticity tolerance, on the largest entry of `H - H^dagger`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// How qubits are split between control and register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitLayout {
    pub control_qubits: u32,
    pub register_qubits: u32,
    pub n: u64,
}

impl QubitLayout {
    /// Register padded to `2^ceil(log2 N)` states.
    pub fn new(n: u64, control_qubits: u32) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("modulus must be at least 2, got {n}")));
        }
        let layout = QubitLayout {
            control_qubits,
            register_qubits: ceil_log2(n),
            n,
        };
        if layout.total_qubits() > 12 || layout.dim() > MAX_DIM {
            return Err(Error::Resource(format!(
                "{} qubits exceed the dense density-matrix budget",
                layout.total_qubits()
            )));
        }
        Ok(layout)
    }

    pub fn total_qubits(&self) -> u32 {
        self.control_qubits + self.register_qubits
    }

    pub fn control_dim(&self) -> usize {
        1 << self.control_qubits
    }

    pub fn register_dim(&self) -> usize {
        1 << self.register_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn index(&self, reg: usize, control: usize) -> usize {
        reg * self.control_dim() + control
    }
}

/// A square complex matrix that is Hermitian up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    dim: usize,
    /// Row-major.
    entries: Vec<Complex64>,
}

impl DenseHermitian {
    pub fn zeros(dim: usize) -> Self {
        DenseHermitian {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Builds from row-major entries, rejecting non-square or non-Hermitian
    /// input.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(invalid(format!(
                "{} entries do not form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let m = DenseHermitian { dim, entries };
        if m.hermiticity_error() > HERMITIAN_TOL {
            return Err(invalid("matrix is not Hermitian"));
        }
        Ok(m)
    }

    /// Real symmetric matrix from nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_entries(dim, entries)
    }

    /// `|psi><psi|` (not normalised).
    pub fn projector(psi: &[Complex64]) -> Self {
        let mut m = Self::zeros(psi.len());
        m.add_outer(psi, 1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    /// `self += weight * |v><v|`.
    pub(crate) fn add_outer(&mut self, v: &[Complex64], weight: f64) {
        for (i, vi) in v.iter().enumerate() {
            if *vi == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = &mut self.entries[i * self.dim..(i + 1) * self.dim];
            for (e, vj) in row.iter_mut().zip(v) {
                *e += vi * vj.conj() * weight;
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `tr(rho^2)`, which for a Hermitian matrix is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// Largest entry of `H - H^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &DenseHermitian) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// `rho -> G rho G^dagger` for a control-register gate.
    pub fn conjugate_by(&mut self, gate: Gate) {
        let d = self.dim;
        // Right-multiplying by G^dagger acts on each row with conj(G).
        let gc = gate.conj();
        for row in self.entries.chunks_mut(d) {
            gc.apply(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); d];
        for j in 0..d {
            for (i, c) in col.iter_mut().enumerate() {
                *c = self.entries[i * d + j];
            }
            gate.apply(&mut col);
            for (i, c) in col.iter().enumerate() {
                self.entries[i * d + j] = *c;
            }
        }
    }

    /// `rho -> P rho P^T` for the permutation `i -> perm[i]`.
    pub fn permute(&mut self, perm: &[usize]) {
        let d = self.dim;
        assert_eq!(perm.len(), d);
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                out[perm[i] * d + perm[j]] = self.entries[i * d + j];
            }
        }
        self.entries = out;
    }

    /// Partial trace over the register: the `t' x t'` control marginal.
    pub fn control_marginal(&self, layout: &QubitLayout) -> DenseHermitian {
        let tc = layout.control_dim();
        let mut m = DenseHermitian::zeros(tc);
        for reg in 0..layout.register_dim() {
            for x in 0..tc {
                for y in 0..tc {
                    let v = self.get(layout.index(reg, x), layout.index(reg, y));
                    m.entries[x * tc + y] += v;
                }
            }
        }
        m
    }
}
