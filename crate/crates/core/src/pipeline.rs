//! End-to-end factoring on the mixed-register circuit, plus repetition
//! statistics against the analytic success bound.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numtheory::{
    best_convergent, gcd, is_prime, modpow, multiplicative_order, perfect_power, totient,
};
use crate::orbits::{decompose, OrbitTable};
use crate::qpe::{
    check_dense_t, choose_l, dirichlet_weight_exact, l_in_standard_range, sample_shot, ShotEngine,
};
use crate::rng;

/// RNG stream used to draw bases `a`; shot `i` uses stream `i`.
const BASE_STREAM: u64 = u64::MAX - 1;

/// Denominator of the best convergent of `c/t` below `N`, before checking it.
pub fn candidate_order(c: u64, t: u64, n: u64) -> Option<u64> {
    best_convergent(c, t, n).map(|f| f.den)
}

/// Order candidate from one measurement, kept only if `a^r = 1 (mod N)`.
pub fn postprocess(c: u64, t: u64, n: u64, a: u64) -> Option<u64> {
    let r = candidate_order(c, t, n)?;
    (modpow(a, r, n).ok()? == 1).then_some(r)
}

/// Nontrivial factor pair `(p, q)`, `p <= q`, `p q = N`, from
/// `gcd(a^{r/2} +- 1, N)`. `None` when `r` is odd or `a^{r/2} = -1 (mod N)`.
pub fn extract_factors(n: u64, a: u64, r: u64) -> Option<(u64, u64)> {
    if r == 0 || r % 2 == 1 || n < 2 {
        return None;
    }
    let y = modpow(a, r / 2, n).ok()?;
    if y == n - 1 {
        return None;
    }
    [gcd((y + n - 1) % n, n), gcd((y + 1) % n, n)]
        .into_iter()
        .find(|&f| f > 1 && f < n)
        .map(|f| (f.min(n / f), f.max(n / f)))
}

/// `64 * ceil(N/phi(N) * ln ln N)`, at least 64.
///
/// For `N = pq`, `N/phi(N) = pq/((p-1)(q-1))`, and `ln ln N` bounds
/// `ln ln r` from above, so this never undercuts the per-instance
/// repetition scale.
pub fn default_shot_budget(n: u64) -> u64 {
    let scale = n as f64 / totient(n) as f64 * (n as f64).ln().ln();
    64 * (scale.ceil() as u64).max(1)
}

#[derive(Debug, Clone, Default)]
pub struct FactorOptions {
    /// Fixed base; drawn uniformly from `[2, N-1]` when absent.
    pub a: Option<u64>,
    /// Total shot budget; [`default_shot_budget`] when absent.
    pub budget: Option<u64>,
    /// Control-round count; [`choose_l`] when absent.
    pub l: Option<u32>,
    /// Permit an `L` outside `N^2 < 2^L < 2N^2`.
    pub allow_small_t: bool,
    pub engine: ShotEngine,
    /// Skip the odd / composite / not-a-prime-power checks on `N`.
    pub skip_classical_guards: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ShotRecord {
    pub a: u64,
    pub g: u64,
    pub d: usize,
    pub j: Option<u64>,
    pub c: u64,
    /// Convergent denominator.
    pub candidate: Option<u64>,
    /// Whether `a^candidate = 1 (mod N)`.
    pub verified: bool,
}

/// Transcript of one factoring run. Exactly one of `factors` and `failure`
/// is set.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct FactorAttempt {
    #[serde(rename = "N")]
    pub n: u64,
    /// Base in use when the run ended.
    pub a: u64,
    #[serde(rename = "L")]
    pub l: u32,
    pub budget: u64,
    pub shots_used: u64,
    /// Whether the factor came from `gcd(a, N)` without any shots.
    pub via_gcd: bool,
    pub records: Vec<ShotRecord>,
    pub order: Option<u64>,
    pub failure: Option<String>,
    pub factors: Option<[u64; 2]>,
}

impl FactorAttempt {
    pub fn succeeded(&self) -> bool {
        self.factors.is_some()
    }
}

fn check_modulus(n: u64, skip_guards: bool) -> Result<()> {
    if n < 4 {
        return Err(invalid(format!("N={n} is too small to factor")));
    }
    if skip_guards {
        return Ok(());
    }
    if n.is_multiple_of(2) {
        return Err(invalid(format!("N={n} is even")));
    }
    if is_prime(n) {
        return Err(invalid(format!("N={n} is prime")));
    }
    if let Some((b, k)) = perfect_power(n) {
        return Err(invalid(format!("N={n} is the prime power {b}^{k}")));
    }
    Ok(())
}

/// Factors `N` by sampling the mixed-register circuit shot by shot.
///
/// With a fixed base the run uses it throughout. With a random base, a new
/// one is drawn whenever a verified order fails to split `N` (odd order or
/// `a^{r/2} = -1`). Deterministic for a given `seed`.
pub fn factor(n: u64, options: &FactorOptions, seed: u64) -> Result<FactorAttempt> {
    check_modulus(n, options.skip_classical_guards)?;
    let l = options.l.unwrap_or_else(|| choose_l(n));
    if l == 0 || l >= 63 {
        return Err(invalid(format!("L={l} is out of range")));
    }
    if !options.allow_small_t && !l_in_standard_range(n, l) && options.l.is_some() {
        return Err(invalid(format!(
            "2^{l} is outside (N^2, 2N^2) for N={n}; pass allow_small_t to override"
        )));
    }
    if let Some(a) = options.a {
        if a < 2 || a >= n {
            return Err(invalid(format!("base a={a} is outside [2, N-1]")));
        }
    }
    let budget = options.budget.unwrap_or_else(|| default_shot_budget(n));
    let t = 1u64 << l;

    let mut base_rng = rng::stream(seed, BASE_STREAM);
    let mut a = options.a.unwrap_or_else(|| base_rng.random_range(2..n));
    let mut attempt = FactorAttempt {
        n,
        a,
        l,
        budget,
        shots_used: 0,
        via_gcd: false,
        records: Vec::new(),
        order: None,
        failure: None,
        factors: None,
    };

    'bases: loop {
        attempt.a = a;
        let g = gcd(a, n);
        if g > 1 {
            attempt.via_gcd = true;
            attempt.factors = Some([g.min(n / g), g.max(n / g)]);
            return Ok(attempt);
        }
        let table = decompose(n, a)?;
        while attempt.shots_used < budget {
            let mut shot_rng = rng::stream(seed, attempt.shots_used);
            let shot = sample_shot(&table, l, options.engine, &mut shot_rng);
            attempt.shots_used += 1;
            let c = shot.shot.c;
            let candidate = candidate_order(c, t, n);
            let verified = candidate.is_some_and(|r| modpow(a, r, n) == Ok(1));
            attempt.records.push(ShotRecord {
                a,
                g: shot.g,
                d: shot.d,
                j: shot.label.map(|lab| lab.j),
                c,
                candidate,
                verified,
            });
            if !verified {
                continue;
            }
            let r = candidate.expect("verified implies candidate");
            if let Some((p, q)) = extract_factors(n, a, r) {
                attempt.order = Some(r);
                attempt.factors = Some([p, q]);
                return Ok(attempt);
            }
            if options.a.is_none() {
                a = base_rng.random_range(2..n);
                continue 'bases;
            }
        }
        attempt.failure = Some(format!("shot budget of {budget} exhausted"));
        return Ok(attempt);
    }
}

/// `4(p-1)(q-1) phi(r) / (pq r pi^2)` with `r` the order of `a` mod `pq`.
pub fn success_lower_bound(p: u64, q: u64, a: u64) -> Result<f64> {
    let n = p * q;
    let r = multiplicative_order(a, n)?;
    Ok(4.0 * ((p - 1) * (q - 1)) as f64 * totient(r) as f64 / (n as f64 * r as f64 * PI * PI))
}

/// Per-shot probabilities computed by brute force over every register state
/// `g`, eigen index `j` and outcome `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExactShotSuccess {
    /// Post-processing returns exactly the order `r`.
    pub order: f64,
    /// Post-processing returns a verified order that splits `N`.
    pub factor: f64,
}

pub fn exact_shot_success(table: &OrbitTable, l: u32) -> Result<ExactShotSuccess> {
    let t = check_dense_t(l)?;
    let (n, a, r) = (table.n(), table.a(), table.order());
    let outcome: Vec<(bool, bool)> = (0..t)
        .map(|c| match postprocess(c, t, n, a) {
            Some(found) => (found == r, extract_factors(n, a, found).is_some()),
            None => (false, false),
        })
        .collect();
    // Every g on orbit d contributes (1/N)(1/r_d) sum_j sum_c w; summing over
    // the r_d members of the orbit cancels the 1/r_d.
    let (order, fac) = table
        .orbits()
        .par_iter()
        .map(|orbit| {
            let mut acc = (0.0, 0.0);
            for j in 0..orbit.period {
                for (c, &(hit_r, hit_f)) in outcome.iter().enumerate() {
                    if !(hit_r || hit_f) {
                        continue;
                    }
                    let w = dirichlet_weight_exact(j, orbit.period, c as u64, t);
                    if hit_r {
                        acc.0 += w;
                    }
                    if hit_f {
                        acc.1 += w;
                    }
                }
            }
            acc
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(ExactShotSuccess {
        order: order / n as f64,
        factor: fac / n as f64,
    })
}

/// A semiprime instance `N = pq` with base `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub p: u64,
    pub q: u64,
    pub a: u64,
}

/// Repetition statistics for one instance.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct RunStats {
    pub p: u64,
    pub q: u64,
    pub a: u64,
    pub r: u64,
    pub trials: u64,
    pub successes: u64,
    pub total_shots: u64,
    /// Mean shots over successful trials.
    pub mean_shots_to_success: f64,
    pub shots_std_error: f64,
    /// Successes per shot across all trials.
    pub per_shot_success_rate: f64,
    /// Brute-force per-shot factor probability, when `2^L` fits in memory.
    pub exact_per_shot_success: Option<f64>,
    pub lower_bound: f64,
    /// `pq/((p-1)(q-1)) * ln ln r`; absent when `ln ln r <= 0`.
    pub repetition_scale: Option<f64>,
    /// `mean_shots_to_success / repetition_scale`.
    pub repetition_ratio: Option<f64>,
    /// `phi(r)/r * ln ln r`, an empirical value of the constant in
    /// `phi(r)/r > delta / ln ln r`.
    pub delta_estimate: Option<f64>,
}

/// Runs [`factor`] with a fixed base `trials` times per instance.
pub fn repetition_experiment(
    instances: &[Instance],
    trials: u64,
    seed: u64,
    engine: ShotEngine,
) -> Result<Vec<RunStats>> {
    instances
        .iter()
        .enumerate()
        .map(|(idx, inst)| {
            let n = inst.p * inst.q;
            let r = multiplicative_order(inst.a, n)?;
            let options = FactorOptions {
                a: Some(inst.a),
                engine,
                ..FactorOptions::default()
            };
            let instance_seed = rng::derive_seed(seed, idx as u64);
            let attempts = (0..trials)
                .into_par_iter()
                .map(|k| factor(n, &options, rng::derive_seed(instance_seed, k)))
                .collect::<Result<Vec<_>>>()?;

            let shots: Vec<f64> = attempts
                .iter()
                .filter(|at| at.succeeded())
                .map(|at| at.shots_used as f64)
                .collect();
            let successes = shots.len() as u64;
            let total_shots: u64 = attempts.iter().map(|at| at.shots_used).sum();
            let mean = shots.iter().sum::<f64>() / shots.len().max(1) as f64;
            let var = if shots.len() > 1 {
                shots.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (shots.len() - 1) as f64
            } else {
                0.0
            };
            let l = choose_l(n);
            let exact = match check_dense_t(l) {
                Ok(_) => Some(exact_shot_success(&decompose(n, inst.a)?, l)?.factor),
                Err(_) => None,
            };
            let loglog = (r as f64).ln().ln();
            let scale = (loglog > 0.0)
                .then(|| (n as f64) / (((inst.p - 1) * (inst.q - 1)) as f64) * loglog);
            Ok(RunStats {
                p: inst.p,
                q: inst.q,
                a: inst.a,
                r,
                trials,
                successes,
                total_shots,
                mean_shots_to_success: mean,
                shots_std_error: (var / shots.len().max(1) as f64).sqrt(),
                per_shot_success_rate: successes as f64 / total_shots.max(1) as f64,
                exact_per_shot_success: exact,
                lower_bound: success_lower_bound(inst.p, inst.q, inst.a)?,
                repetition_scale: scale,
                repetition_ratio: scale.map(|s| mean / s),
                delta_estimate: (loglog > 0.0).then(|| totient(r) as f64 / r as f64 * loglog),
            })
        })
        .collect()
}

/// CSV table of run statistics, one row per instance.
pub fn write_stats_csv<W: std::io::Write>(stats: &[RunStats], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in stats {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}
