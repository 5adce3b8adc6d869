//! Named invariant checks behind `mixed-shor verify`.

use rayon::prelude::*;
use serde::Serialize;

use crate::densmat::{
    build_rho_ini, evolve_closed_form, evolve_gates, negativity_scan, QubitLayout,
};
use crate::error::Result;
use crate::numtheory::{gcd, Fraction};
use crate::orbits::{decompose, theorem1_sweep};
use crate::pipeline::{exact_shot_success, success_lower_bound};
use crate::qpe::{
    analytic_distribution, choose_l, eigen_distribution, empirical_distribution, mods_bound_check,
    orbit_mixture_distribution, sample_semiclassical, statevector_run, Distribution, ShotEngine,
};
use crate::rng::stream;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Shots per sampler comparison.
    pub shots: u64,
    /// Exclusive upper limit of the semiprime sweep.
    pub theorem1_max: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            shots: 100_000,
            theorem1_max: 1000,
            seed: 0,
        }
    }
}

/// Moduli used by the engine comparisons.
pub const ENGINE_MODULI: [u64; 4] = [15, 21, 35, 55];
/// Largest `L` in the engine comparisons.
pub const ENGINE_MAX_L: u32 = 10;
/// Largest denominator in the phase grid of the sampler check.
pub const PHASE_GRID_MAX_R: u64 = 12;
pub const STATEVECTOR_TOL: f64 = 1e-9;
pub const SAMPLER_TV_TOL: f64 = 0.01;
pub const DENSMAT_TOL: f64 = 1e-12;
pub const SUCCESS_INSTANCES: [(u64, u64, u64); 6] = [
    (3, 5, 2),
    (3, 5, 7),
    (3, 7, 2),
    (5, 7, 2),
    (5, 11, 2),
    (7, 13, 2),
];

pub fn orbit_fidelity() -> Check {
    let expected: [&[u64]; 5] = [
        &[0],
        &[1, 2, 4, 8],
        &[3, 6, 12, 9],
        &[5, 10],
        &[7, 14, 13, 11],
    ];
    Check::from_result(
        "orbits",
        decompose(15, 2).map(|t| {
            let got: Vec<&[u64]> = t.orbits().iter().map(|o| o.members.as_slice()).collect();
            (got == expected, format!("N=15 a=2 orbits {got:?}"))
        }),
    )
}

pub fn theorem1(max_n: u64) -> Check {
    let s = theorem1_sweep(max_n);
    Check::new(
        "theorem1",
        s.violations.is_empty(),
        format!(
            "{} semiprimes below {max_n}, {} bases, {} tight, {} violations",
            s.semiprimes,
            s.bases_checked,
            s.tight_cases,
            s.violations.len()
        ),
    )
}

/// Largest entrywise gap between [`statevector_run`] and the per-orbit
/// eigenphase mixture over every base, orbit and `1 <= L <= max_l`.
pub fn statevector_gap(moduli: &[u64], max_l: u32) -> Result<f64> {
    let jobs: Vec<(u64, u64, u32)> = moduli
        .iter()
        .flat_map(|&n| (2..n).filter(move |&a| gcd(a, n) == 1).map(move |a| (n, a)))
        .flat_map(|(n, a)| (1..=max_l).map(move |l| (n, a, l)))
        .collect();
    let gaps = jobs
        .par_iter()
        .map(|&(n, a, l)| {
            let table = decompose(n, a)?;
            let mut worst = 0.0f64;
            for orbit in table.orbits() {
                let sv = statevector_run(orbit, l)?;
                let mix = orbit_mixture_distribution(orbit.period, l)?;
                worst = worst.max(sv.max_abs_diff(&mix));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

pub fn statevector_engine(moduli: &[u64], max_l: u32) -> Check {
    Check::from_result(
        "statevector",
        statevector_gap(moduli, max_l).map(|gap| {
            (
                gap < STATEVECTOR_TOL,
                format!("max entrywise gap {gap:e} over N={moduli:?}, all bases, L<={max_l}"),
            )
        }),
    )
}

/// Expected total variation between a perfect sampler's empirical
/// distribution after `shots` draws and `exact` (normal approximation,
/// `E|X/n - p| = sqrt(2 p (1-p) / (pi n))`).
pub fn noise_floor(exact: &Distribution, shots: u64) -> f64 {
    let n = shots as f64;
    0.5 * exact
        .probs
        .iter()
        .map(|p| (2.0 * p * (1.0 - p) / (std::f64::consts::PI * n)).sqrt())
        .sum::<f64>()
}

/// One sampler comparison.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct SamplerCell {
    #[serde(rename = "N")]
    pub n: u64,
    pub a: u64,
    #[serde(rename = "L")]
    pub l: u32,
    pub engine: String,
    pub shots: u64,
    pub total_variation: f64,
    pub noise_floor: f64,
}

/// Largest total variation between [`sample_semiclassical`] histograms of
/// `shots` shots and [`eigen_distribution`], over every reduced phase `j/r`
/// with `r <= max_r` and every `1 <= L <= max_l`. Returns the worst value
/// and the number of `(phase, L)` cells.
pub fn phase_grid_tv(max_r: u64, max_l: u32, shots: u64, seed: u64) -> Result<(f64, usize)> {
    let phases: Vec<Fraction> = (1..=max_r)
        .flat_map(|r| {
            (0..r)
                .filter(move |&j| gcd(j, r) == 1)
                .map(move |j| Fraction::new(j, r))
        })
        .collect();
    let cells: Vec<(Fraction, u32)> = phases
        .iter()
        .flat_map(|&f| (1..=max_l).map(move |l| (f, l)))
        .collect();
    let tvs = cells
        .par_iter()
        .enumerate()
        .map(|(k, &(phase, l))| {
            let exact = eigen_distribution(phase, l)?;
            let mut rng = stream(seed, k as u64);
            let mut counts = vec![0u64; 1 << l];
            for _ in 0..shots {
                counts[sample_semiclassical(phase, l, &mut rng).c as usize] += 1;
            }
            Ok(Distribution::from_counts(1 << l, &counts).total_variation(&exact))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((tvs.into_iter().fold(0.0, f64::max), cells.len()))
}

pub fn phase_sampler(max_r: u64, max_l: u32, shots: u64, seed: u64) -> Check {
    Check::from_result(
        "phase-sampler",
        phase_grid_tv(max_r, max_l, shots, seed).map(|(worst, cells)| {
            (
                worst < SAMPLER_TV_TOL,
                format!("max total variation {worst:.5} over {cells} (j/r, L) cells, r<={max_r}, L<={max_l}, {shots} shots each"),
            )
        }),
    )
}

/// Shots needed so the noise floor sits at `target` or below, never fewer
/// than `min_shots`.
pub fn shots_for_floor(exact: &Distribution, min_shots: u64, target: f64) -> u64 {
    let floor = noise_floor(exact, min_shots);
    let scale = (floor / target).powi(2);
    ((min_shots as f64 * scale).ceil() as u64).max(min_shots)
}

/// Samples `(N, a=2)` at every `1 <= L <= max_l` with both sampling engines
/// and compares against the analytic distribution. With `floor_target` set,
/// each cell gets enough extra shots to bring its noise floor down to it.
pub fn sampler_cells(
    moduli: &[u64],
    max_l: u32,
    min_shots: u64,
    floor_target: Option<f64>,
    seed: u64,
) -> Result<Vec<SamplerCell>> {
    let mut cells = Vec::new();
    for &n in moduli {
        let table = decompose(n, 2)?;
        for l in 1..=max_l {
            let exact = analytic_distribution(&table, l)?;
            let shots = floor_target.map_or(min_shots, |f| shots_for_floor(&exact, min_shots, f));
            let floor = noise_floor(&exact, shots);
            for (name, engine) in [
                ("eigenphase", ShotEngine::Eigenphase),
                ("trajectory", ShotEngine::Trajectory),
            ] {
                let sub_seed = crate::rng::derive_seed(seed, cells.len() as u64);
                let emp = empirical_distribution(&table, l, engine, shots, sub_seed)?;
                cells.push(SamplerCell {
                    n,
                    a: 2,
                    l,
                    engine: name.into(),
                    shots,
                    total_variation: emp.total_variation(&exact),
                    noise_floor: floor,
                });
            }
        }
    }
    Ok(cells)
}

/// Every cell within `SAMPLER_TV_TOL`, with shot counts raised where the
/// support is wide enough that `min_shots` cannot resolve the tolerance.
pub fn sampler_engine(moduli: &[u64], max_l: u32, min_shots: u64, seed: u64) -> Check {
    let run = || -> Result<(bool, String)> {
        let cells = sampler_cells(moduli, max_l, min_shots, Some(SAMPLER_TV_TOL / 2.0), seed)?;
        let worst = cells.iter().map(|c| c.total_variation).fold(0.0, f64::max);
        let most = cells.iter().map(|c| c.shots).max().unwrap_or(0);
        Ok((
            cells.iter().all(|c| c.total_variation < SAMPLER_TV_TOL),
            format!(
                "max total variation {worst:.5} over {} cells, {min_shots} to {most} shots per cell",
                cells.len()
            ),
        ))
    };
    Check::from_result("sampler", run())
}

pub fn analytic_peaks() -> Check {
    let run = || -> Result<(bool, String)> {
        let d = analytic_distribution(&decompose(15, 2)?, 8)?;
        let want = [(0, 1.0 / 3.0), (64, 0.2), (128, 4.0 / 15.0), (192, 0.2)];
        let mut ok = (d.total() - 1.0).abs() < 1e-9;
        for (c, p) in d.probs.iter().enumerate() {
            let target = want.iter().find(|w| w.0 == c).map_or(0.0, |w| w.1);
            ok &= (p - target).abs() < 1e-12;
        }
        Ok((ok, format!("N=15 a=2 L=8 total {}", d.total())))
    };
    Check::from_result("analytic", run())
}

pub fn dirichlet_bound(moduli: &[u64]) -> Check {
    let run = || -> Result<(bool, String)> {
        let (mut pairs, mut bad, mut floor) = (0u64, 0u64, f64::INFINITY);
        for &n in moduli {
            for a in (2..n).filter(|&a| gcd(a, n) == 1) {
                let rep = mods_bound_check(&decompose(n, a)?, choose_l(n));
                pairs += rep.pairs_checked;
                bad += u64::from(!rep.passed());
                floor = floor.min(rep.min_weight);
            }
        }
        Ok((
            bad == 0,
            format!("{pairs} in-window pairs over N={moduli:?}, min weight {floor:.6}, {bad} failing bases"),
        ))
    };
    Check::from_result("dirichlet-bound", run())
}

pub fn success_bound(instances: &[(u64, u64, u64)]) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for &(p, q, a) in instances {
            let n = p * q;
            let exact = exact_shot_success(&decompose(n, a)?, choose_l(n))?.factor;
            let bound = success_lower_bound(p, q, a)?;
            ok &= exact > bound;
            parts.push(format!("N={n},a={a}: {exact:.4}>{bound:.4}"));
        }
        Ok((ok, parts.join("; ")))
    };
    Check::from_result("success-bound", run())
}

pub fn density_matrix() -> Check {
    let run = || -> Result<(bool, String)> {
        let (mut gap, mut purity_gap, mut marginal_gap) = (0.0f64, 0.0f64, 0.0f64);
        for (n, a) in [(15, 2), (15, 7), (21, 2)] {
            for l in [1, 2] {
                let rho = evolve_gates(n, a, l)?;
                gap = gap.max(rho.max_abs_diff(&evolve_closed_form(n, a, l)?));
                let purity = build_rho_ini(n, a, l)?.purity();
                purity_gap = purity_gap.max((purity - 1.0 / n as f64).abs());
                let marginal = rho.control_marginal(&QubitLayout::new(n, l)?).diagonal();
                let exact = analytic_distribution(&decompose(n, a)?, l)?;
                for (x, y) in marginal.iter().zip(&exact.probs) {
                    marginal_gap = marginal_gap.max((x - y).abs());
                }
            }
        }
        Ok((
            gap < DENSMAT_TOL && purity_gap < DENSMAT_TOL && marginal_gap < 1e-9,
            format!(
                "gates vs closed form {gap:e}, purity gap {purity_gap:e}, control marginal vs analytic {marginal_gap:e}"
            ),
        ))
    };
    Check::from_result("density-matrix", run())
}

pub fn npt() -> Check {
    Check::from_result(
        "npt",
        negativity_scan(15, 2, 2, None, None).map(|rep| match rep.strongest() {
            Some(e) => (
                true,
                format!(
                    "{} negative (step, cut) pairs; strongest {:.6} at step {} {} cut {:#b}",
                    rep.negatives().count(),
                    e.min_eigenvalue,
                    e.step,
                    e.label,
                    e.cut
                ),
            ),
            None => (false, "no negative partial transpose".into()),
        }),
    )
}

/// Every check, in a fixed order.
pub fn run_all(config: &VerifyConfig) -> Vec<Check> {
    vec![
        orbit_fidelity(),
        theorem1(config.theorem1_max),
        statevector_engine(&ENGINE_MODULI, ENGINE_MAX_L),
        phase_sampler(PHASE_GRID_MAX_R, ENGINE_MAX_L, config.shots, config.seed),
        sampler_engine(&ENGINE_MODULI, ENGINE_MAX_L, config.shots, config.seed),
        analytic_peaks(),
        dirichlet_bound(&ENGINE_MODULI[..3]),
        success_bound(&SUCCESS_INSTANCES),
        density_matrix(),
        npt(),
    ]
}
