//! Partial transposes and the negative-partial-transpose scan.

use rayon::prelude::*;
use serde::Serialize;

use super::{evolve_gates_with_steps, min_eigenvalue, DenseHermitian};
use crate::error::{invalid, Result};

/// Eigenvalues below `-NPT_THRESHOLD` count as negative.
pub const NPT_THRESHOLD: f64 = 1e-9;

/// Transposes the qubits in `cut` (a bitmask over `n_qubits` qubits):
/// `rho^T_A[i, j] = rho[i', j']` where `i'` and `j'` exchange the cut bits of
/// `i` and `j`.
pub fn partial_transpose(rho: &DenseHermitian, n_qubits: u32, cut: u64) -> Result<DenseHermitian> {
    if rho.dim() != 1usize << n_qubits {
        return Err(invalid(format!(
            "dimension {} is not 2^{n_qubits}",
            rho.dim()
        )));
    }
    let full = (1u64 << n_qubits) - 1;
    if cut == 0 || cut & full == full || cut & !full != 0 {
        return Err(invalid(format!(
            "cut {cut:#b} is not a nonempty proper subset of {n_qubits} qubits"
        )));
    }
    let mask = cut as usize;
    let d = rho.dim();
    let mut out = DenseHermitian::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let i2 = (i & !mask) | (j & mask);
            let j2 = (j & !mask) | (i & mask);
            out.set(i, j, rho.get(i2, j2));
        }
    }
    Ok(out)
}

/// Every bipartition once: masks that leave the highest qubit on the other
/// side (a cut and its complement give partial transposes with the same
/// spectrum).
pub fn default_cuts(n_qubits: u32) -> Vec<u64> {
    (1..1u64 << (n_qubits - 1)).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct NptEntry {
    pub step: usize,
    pub label: String,
    pub cut: u64,
    pub min_eigenvalue: f64,
    pub negative: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NptReport {
    pub entries: Vec<NptEntry>,
}

impl NptReport {
    pub fn negatives(&self) -> impl Iterator<Item = &NptEntry> {
        self.entries.iter().filter(|e| e.negative)
    }

    /// The most negative entry, if any entry is negative.
    pub fn strongest(&self) -> Option<&NptEntry> {
        self.negatives()
            .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
    }
}

/// Minimum partial-transpose eigenvalue for each requested circuit step and
/// bipartition. `None` selects every step or every cut.
pub fn negativity_scan(
    n: u64,
    a: u64,
    control_qubits: u32,
    steps: Option<&[usize]>,
    cuts: Option<&[u64]>,
) -> Result<NptReport> {
    let all_steps = evolve_gates_with_steps(n, a, control_qubits)?;
    let n_qubits = all_steps[0].rho.dim().trailing_zeros();
    let chosen: Vec<_> = match steps {
        None => all_steps.iter().collect(),
        Some(s) => s
            .iter()
            .map(|&k| {
                all_steps
                    .get(k)
                    .ok_or_else(|| invalid(format!("circuit has no step {k}")))
            })
            .collect::<Result<_>>()?,
    };
    let cuts = cuts.map_or_else(|| default_cuts(n_qubits), <[u64]>::to_vec);

    let jobs: Vec<_> = chosen
        .iter()
        .flat_map(|s| cuts.iter().map(move |&c| (*s, c)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|(s, cut)| {
            let pt = partial_transpose(&s.rho, n_qubits, *cut)?;
            let min = min_eigenvalue(&pt)?;
            Ok(NptEntry {
                step: s.step,
                label: s.label.clone(),
                cut: *cut,
                min_eigenvalue: min,
                negative: min < -NPT_THRESHOLD,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NptReport { entries })
}
