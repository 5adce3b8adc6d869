//! Cycle decomposition of `{0, .., N-1}` under `x -> a*x mod N`.
//!
//! For `gcd(a, N) = 1` the map is a permutation, so the residues split into
//! disjoint cycles `g, g*a, g*a^2, ...`. Each cycle carries its own set of
//! eigenstates of the multiplication operator, and the maximally mixed
//! register state is the uniform mixture over all of them.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numtheory::{gcd, is_prime, mulmod, multiplicative_order, Fraction};

/// Largest modulus accepted by the table-based engines.
pub const MAX_TABLE_MODULUS: u64 = 1 << 20;

/// One cycle of the multiplication map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Smallest member.
    pub leader: u64,
    pub period: u64,
    /// `[leader, leader*a, leader*a^2, ...] mod N`, in generation order so
    /// position `k` holds `leader * a^k`.
    pub members: Vec<u64>,
}

/// Partition of `{0, .., N-1}` into orbits, sorted by leader.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTable {
    n: u64,
    a: u64,
    orbits: Vec<Orbit>,
    /// `index[x] = (orbit id, offset of x within the orbit)`.
    index: Vec<(u32, u32)>,
    order: u64,
}

#[derive(Serialize)]
struct OrbitTableJson<'a> {
    #[serde(rename = "N")]
    n: u64,
    a: u64,
    orbits: &'a [Orbit],
}

impl Serialize for OrbitTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrbitTableJson {
            n: self.n,
            a: self.a,
            orbits: &self.orbits,
        }
        .serialize(s)
    }
}

impl OrbitTable {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    /// The multiplicative order of `a` mod `N`: the period of the orbit of 1.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// `(orbit id, offset)` of residue `x`.
    pub fn locate(&self, x: u64) -> (usize, usize) {
        let (d, k) = self.index[x as usize];
        (d as usize, k as usize)
    }

    pub fn orbit_of(&self, x: u64) -> &Orbit {
        &self.orbits[self.locate(x).0]
    }

    /// Distinct orbit periods with the number of residues lying on orbits of
    /// that period, sorted by period.
    pub fn period_weights(&self) -> Vec<(u64, u64)> {
        let mut weights: Vec<(u64, u64)> = Vec::new();
        for orbit in &self.orbits {
            match weights.iter_mut().find(|(p, _)| *p == orbit.period) {
                Some(entry) => entry.1 += orbit.period,
                None => weights.push((orbit.period, orbit.period)),
            }
        }
        weights.sort_unstable();
        weights
    }
}

/// Decomposes `{0, .., N-1}` into orbits of multiplication by `a`.
pub fn decompose(n: u64, a: u64) -> Result<OrbitTable> {
    if n < 3 || a < 2 || a >= n {
        return Err(invalid(format!("need 2 <= a < N, got N={n}, a={a}")));
    }
    if n > MAX_TABLE_MODULUS {
        return Err(Error::Resource(format!(
            "orbit table for N={n} exceeds the 2^20 limit"
        )));
    }
    if gcd(a, n) != 1 {
        return Err(Error::NotCoprime { a, m: n });
    }

    const UNSEEN: (u32, u32) = (u32::MAX, u32::MAX);
    let mut index = vec![UNSEEN; n as usize];
    let mut orbits = Vec::new();
    // Scanning in increasing order makes each new orbit's first member its
    // minimum, and leaves the orbits sorted by leader.
    for leader in 0..n {
        if index[leader as usize] != UNSEEN {
            continue;
        }
        let d = orbits.len() as u32;
        let mut members = Vec::new();
        let mut x = leader;
        loop {
            index[x as usize] = (d, members.len() as u32);
            members.push(x);
            x = mulmod(x, a, n);
            if x == leader {
                break;
            }
        }
        orbits.push(Orbit {
            leader,
            period: members.len() as u64,
            members,
        });
    }

    let order = orbits[index[1].0 as usize].period;
    Ok(OrbitTable {
        n,
        a,
        orbits,
        index,
        order,
    })
}

/// Counts residues `g in [0, pq)` whose orbit period is strictly below the
/// order of `a` mod `pq`, and checks the count against `p + q - 1`.
pub fn theorem1_count(p: u64, q: u64, a: u64) -> Result<u64> {
    if p == q || !is_prime(p) || !is_prime(q) {
        return Err(invalid(format!("need distinct primes, got p={p}, q={q}")));
    }
    let n = p * q;
    let table = decompose(n, a)?;
    let r = table.order();
    let count: u64 = table
        .orbits()
        .iter()
        .filter(|o| o.period < r)
        .map(|o| o.period)
        .sum();
    if count > p + q - 1 {
        return Err(Error::BoundViolation(format!(
            "N={n}, a={a}: {count} short-period residues exceeds p+q-1={}",
            p + q - 1
        )));
    }
    Ok(count)
}

/// Outcome of [`theorem1_sweep`].
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct Theorem1Sweep {
    pub max_n: u64,
    /// Semiprimes `pq < max_n` visited.
    pub semiprimes: u64,
    /// `(N, a)` pairs visited.
    pub bases_checked: u64,
    /// Pairs where the count equals `p + q - 1`.
    pub tight_cases: u64,
    /// Largest `count / (p + q - 1)` seen.
    pub max_ratio: f64,
    pub violations: Vec<String>,
}

/// Runs [`theorem1_count`] for every semiprime `pq < max_n` with `p < q`
/// and every base `2 <= a < pq` coprime to `pq`.
pub fn theorem1_sweep(max_n: u64) -> Theorem1Sweep {
    use rayon::prelude::*;

    let primes: Vec<u64> = (2..max_n / 2 + 1).filter(|&k| is_prime(k)).collect();
    let pairs: Vec<(u64, u64)> = primes
        .iter()
        .flat_map(|&p| primes.iter().map(move |&q| (p, q)))
        .filter(|&(p, q)| p < q && p * q < max_n)
        .collect();
    let per_pair: Vec<(u64, u64, f64, Vec<String>)> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let n = p * q;
            let bound = p + q - 1;
            let (mut bases, mut tight, mut ratio, mut bad) = (0, 0, 0.0f64, Vec::new());
            for a in (2..n).filter(|&a| gcd(a, n) == 1) {
                bases += 1;
                match theorem1_count(p, q, a) {
                    Ok(count) => {
                        tight += u64::from(count == bound);
                        ratio = ratio.max(count as f64 / bound as f64);
                    }
                    Err(e) => bad.push(e.to_string()),
                }
            }
            (bases, tight, ratio, bad)
        })
        .collect();

    let mut sweep = Theorem1Sweep {
        max_n,
        semiprimes: pairs.len() as u64,
        bases_checked: 0,
        tight_cases: 0,
        max_ratio: 0.0,
        violations: Vec::new(),
    };
    for (bases, tight, ratio, bad) in per_pair {
        sweep.bases_checked += bases;
        sweep.tight_cases += tight;
        sweep.max_ratio = sweep.max_ratio.max(ratio);
        sweep.violations.extend(bad);
    }
    sweep
}

/// Exact fraction of residues lying on an orbit whose period equals the
/// order `r`.
pub fn success_mass(table: &OrbitTable) -> Fraction {
    let r = table.order();
    let hits: u64 = table
        .orbits()
        .iter()
        .filter(|o| o.period == r)
        .map(|o| o.period)
        .sum();
    Fraction::new(hits, table.n())
}

/// `(p-1)(q-1)/pq`, the guaranteed lower bound on [`success_mass`].
pub fn success_mass_bound(p: u64, q: u64) -> Fraction {
    Fraction::new((p - 1) * (q - 1), p * q)
}

/// Checks the structural invariants of a table: partition, index
/// consistency, cycle closure and `r_d | r`.
pub fn check_table(table: &OrbitTable) -> Result<()> {
    let n = table.n();
    let mut seen = vec![false; n as usize];
    let mut total = 0;
    for (d, orbit) in table.orbits().iter().enumerate() {
        total += orbit.period;
        if orbit.members.len() as u64 != orbit.period {
            return Err(invalid(format!("orbit {d} length mismatch")));
        }
        if !table.order().is_multiple_of(orbit.period) {
            return Err(invalid(format!("orbit {d} period does not divide order")));
        }
        for (k, &x) in orbit.members.iter().enumerate() {
            if std::mem::replace(&mut seen[x as usize], true) {
                return Err(invalid(format!("residue {x} appears twice")));
            }
            if table.locate(x) != (d, k) {
                return Err(invalid(format!("index mismatch at {x}")));
            }
            let next = orbit.members[(k + 1) % orbit.members.len()];
            if mulmod(x, table.a(), n) != next {
                return Err(invalid(format!("orbit {d} is not closed at {x}")));
            }
        }
    }
    if total != n || seen.iter().any(|s| !s) {
        return Err(invalid("orbits do not cover every residue"));
    }
    let r = multiplicative_order(table.a(), n)?;
    if r != table.order() {
        return Err(invalid("order disagrees with brute force"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(table: &OrbitTable) -> Vec<Vec<u64>> {
        table.orbits().iter().map(|o| o.members.clone()).collect()
    }

    #[test]
    fn n15_a2_sequences() {
        let t = decompose(15, 2).unwrap();
        assert_eq!(
            members(&t),
            vec![
                vec![0],
                vec![1, 2, 4, 8],
                vec![3, 6, 12, 9],
                vec![5, 10],
                vec![7, 14, 13, 11],
            ]
        );
        let periods: Vec<u64> = t.orbits().iter().map(|o| o.period).collect();
        assert_eq!(periods, vec![1, 4, 4, 2, 4]);
        assert_eq!(t.order(), 4);
        check_table(&t).unwrap();
    }

    #[test]
    fn other_small_tables() {
        let t = decompose(15, 4).unwrap();
        assert_eq!(t.orbit_of(1).members, vec![1, 4]);

        let t = decompose(21, 2).unwrap();
        assert_eq!(t.orbit_of(1).period, 6);
        assert_eq!(t.orbit_of(7).members, vec![7, 14]);
        assert_eq!(t.locate(14), (t.locate(7).0, 1));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(decompose(15, 3), Err(Error::NotCoprime { a: 3, m: 15 }));
        assert!(matches!(decompose(15, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(decompose(15, 15), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            decompose(MAX_TABLE_MODULUS + 1, 2),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn theorem1_examples() {
        assert_eq!(theorem1_count(3, 5, 2).unwrap(), 3);
        assert_eq!(theorem1_count(3, 7, 2).unwrap(), 9);
        assert!(theorem1_count(3, 5, 4).unwrap() <= 7);
        assert!(matches!(
            theorem1_count(3, 3, 2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            theorem1_count(4, 5, 3),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn small_sweep() {
        let s = theorem1_sweep(40);
        // 6, 10, 14, 15, 21, 22, 26, 33, 34, 35, 38, 39.
        assert_eq!(s.semiprimes, 12);
        assert!(s.violations.is_empty());
        assert!(s.max_ratio <= 1.0 && s.tight_cases > 0);
    }

    #[test]
    fn success_mass_examples() {
        let m = success_mass(&decompose(15, 2).unwrap());
        assert_eq!(m, Fraction::new(4, 5));
        assert!(m.to_f64() >= success_mass_bound(3, 5).to_f64());

        let m = success_mass(&decompose(21, 2).unwrap());
        assert_eq!(m, Fraction::new(12, 21));
        assert!(m.to_f64() >= success_mass_bound(3, 7).to_f64());
    }

    #[test]
    fn period_weights_sum_to_n() {
        let t = decompose(15, 2).unwrap();
        assert_eq!(t.period_weights(), vec![(1, 1), (2, 2), (4, 12)]);
    }

    #[test]
    fn json_shape() {
        let t = decompose(15, 4).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["N"], 15);
        assert_eq!(v["a"], 4);
        assert_eq!(v["orbits"][1]["members"], serde_json::json!([1, 4]));
    }
}
