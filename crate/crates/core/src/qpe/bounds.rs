//! Exhaustive check of the kernel lower bound inside the half-bin window.

use std::f64::consts::PI;

use serde::Serialize;

use super::dirichlet_weight_exact;
use crate::numtheory::Fraction;
use crate::orbits::OrbitTable;

/// `4/pi^2`, the kernel floor for `|theta| < 1/(2t)`.
pub const DIRICHLET_FLOOR: f64 = 4.0 / (PI * PI);

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct ModSReport {
    pub n: u64,
    pub a: u64,
    pub t: u64,
    /// `(d, j_d, c)` triples inside the window.
    pub pairs_checked: u64,
    pub min_weight: f64,
    /// Triples whose weight is not above the floor.
    pub weight_violations: u64,
    /// Outcomes `c` within half a bin of two distinct fractions with
    /// denominator below `N`.
    pub uniqueness_violations: u64,
}

impl ModSReport {
    pub fn passed(&self) -> bool {
        self.weight_violations == 0 && self.uniqueness_violations == 0
    }
}

/// Visits every `(d, j_d, c)` with `|j_d/r_d - c/t| < 1/(2t)` and checks the
/// kernel exceeds `4/pi^2`; also checks that each `c` is that close to at
/// most one reduced fraction with denominator below `N`.
pub fn mods_bound_check(table: &OrbitTable, l: u32) -> ModSReport {
    assert!(l < 63);
    let t = 1u64 << l;
    let mut report = ModSReport {
        n: table.n(),
        a: table.a(),
        t,
        pairs_checked: 0,
        min_weight: f64::INFINITY,
        weight_violations: 0,
        uniqueness_violations: 0,
    };

    // |j/r - c/t| < 1/(2t)  <=>  2|j t - c r| < r.
    let in_window = |j: u64, r: u64, c: u64| {
        let diff = (j as i128 * t as i128 - c as i128 * r as i128).unsigned_abs();
        2 * diff < r as u128
    };

    for orbit in table.orbits() {
        let r = orbit.period;
        for j in 0..r {
            // Only c = round(j t / r) can be in the window.
            let nearest = ((2 * j as u128 * t as u128 + r as u128) / (2 * r as u128)) as u64;
            for c in nearest.saturating_sub(1)..=(nearest + 1).min(t - 1) {
                if !in_window(j, r, c) {
                    continue;
                }
                report.pairs_checked += 1;
                let w = dirichlet_weight_exact(j, r, c, t);
                report.min_weight = report.min_weight.min(w);
                if w <= DIRICHLET_FLOOR {
                    report.weight_violations += 1;
                }
            }
        }
    }

    let n = table.n();
    for c in 0..t {
        let mut found: Option<Fraction> = None;
        for r in 1..n {
            let j = ((2 * c as u128 * r as u128 + t as u128) / (2 * t as u128)) as u64;
            if !in_window(j, r, c) {
                continue;
            }
            let f = Fraction::new(j, r);
            match found {
                None => found = Some(f),
                Some(prev) if prev != f => {
                    report.uniqueness_violations += 1;
                    break;
                }
                Some(_) => {}
            }
        }
    }
    report
}
