use mixed_shor::densmat::*;
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn random_hermitian(dim: usize, raw: &[(f64, f64)]) -> DenseHermitian {
    let mut e = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            let (re, im) = raw[k % raw.len()];
            k += 1;
            let v = if i == j {
                Complex64::new(re, 0.0)
            } else {
                Complex64::new(re, im)
            };
            e[i * dim + j] = v;
            e[j * dim + i] = v.conj();
        }
    }
    DenseHermitian::from_entries(dim, e).unwrap()
}

fn nalgebra_eigenvalues(h: &DenseHermitian) -> Vec<f64> {
    let n = h.dim();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let v = h.get(i, j);
        Complex::new(v.re, v.im)
    });
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn random_density(qubits: u32, raw: &[(f64, f64)]) -> DenseHermitian {
    // A mixture of projectors on pseudo-random vectors.
    let dim = 1usize << qubits;
    let mut rho = DenseHermitian::zeros(dim);
    for (k, chunk) in raw.chunks(dim).enumerate().take(3) {
        let v: Vec<Complex64> = (0..dim)
            .map(|i| {
                let (re, im) = chunk[i % chunk.len()];
                Complex64::new(re, im)
            })
            .collect();
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if norm < 1e-9 {
            continue;
        }
        let p = DenseHermitian::projector(&v);
        let w = (k + 1) as f64 / norm;
        let e: Vec<Complex64> = rho
            .entries()
            .iter()
            .zip(p.entries())
            .map(|(a, b)| a + b * w)
            .collect();
        rho = DenseHermitian::from_entries(dim, e).unwrap();
    }
    let tr = rho.trace().re.max(1e-300);
    DenseHermitian::from_entries(dim, rho.entries().iter().map(|x| x / tr).collect()).unwrap()
}

fn kron(a: &DenseHermitian, b: &DenseHermitian) -> DenseHermitian {
    // Index i = ia * db + ib puts `b` on the low qubits.
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut e = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            e[i * d + j] = a.get(i / db, j / db) * b.get(i % db, j % db);
        }
    }
    DenseHermitian::from_entries(d, e).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_matches_nalgebra(dim in 1usize..13, raw in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..100)) {
        let h = random_hermitian(dim, &raw);
        let ours = hermitian_eigenvalues(&h).unwrap();
        let theirs = nalgebra_eigenvalues(&h);
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() < 1e-9, "{ours:?} vs {theirs:?}");
        }
        prop_assert!((min_eigenvalue(&h).unwrap() - theirs[0]).abs() < 1e-9);
    }

    #[test]
    fn partial_transpose_preserves_trace_and_hermiticity(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24..25),
        cut in 1u64..7,
    ) {
        let rho = random_density(3, &raw);
        let pt = partial_transpose(&rho, 3, cut).unwrap();
        prop_assert!((pt.trace() - rho.trace()).norm() < 1e-12);
        prop_assert!(pt.hermiticity_error() < 1e-12);
        prop_assert!((pt.purity() - rho.purity()).abs() < 1e-12);
        let back = partial_transpose(&pt, 3, cut).unwrap();
        prop_assert!(back.max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn product_states_have_positive_partial_transpose(
        ra in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8..9),
        rb in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16..17),
    ) {
        let rho = kron(&random_density(1, &ra), &random_density(2, &rb));
        // Qubit 2 is the `a` factor; transposing it or its complement keeps
        // the spectrum non-negative.
        for cut in [0b100u64, 0b011] {
            let pt = partial_transpose(&rho, 3, cut).unwrap();
            prop_assert!(min_eigenvalue(&pt).unwrap() > -1e-10);
        }
    }

    #[test]
    fn cut_and_complement_share_spectrum(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24..25),
        cut in 1u64..7,
    ) {
        let rho = random_density(3, &raw);
        let a = hermitian_eigenvalues(&partial_transpose(&rho, 3, cut).unwrap()).unwrap();
        let b = hermitian_eigenvalues(&partial_transpose(&rho, 3, 7 ^ cut).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn every_circuit_step_is_a_physical_state() {
    for (n, l) in [(15u64, 2u32), (21, 1)] {
        for step in evolve_gates_with_steps(n, 2, l).unwrap() {
            let rho = &step.rho;
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            assert!(
                (rho.purity() - 1.0 / n as f64).abs() < 1e-12,
                "unitary steps keep purity"
            );
            assert!(min_eigenvalue(rho).unwrap() > -1e-12);
        }
    }
}

#[test]
fn control_marginal_after_circuit_matches_analytic_distribution() {
    use mixed_shor::orbits::decompose;
    use mixed_shor::qpe::analytic_distribution;
    for (n, l) in [(15u64, 2u32), (21, 2), (15, 3)] {
        let rho = evolve_gates(n, 2, l).unwrap();
        let layout = QubitLayout::new(n, l).unwrap();
        let marginal = rho.control_marginal(&layout).diagonal();
        let exact = analytic_distribution(&decompose(n, 2).unwrap(), l).unwrap();
        for (x, y) in marginal.iter().zip(&exact.probs) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn scan_reports_requested_entries_only() {
    let rep = negativity_scan(15, 2, 1, Some(&[2, 3]), Some(&[1, 2])).unwrap();
    let keys: Vec<(usize, u64)> = rep.entries.iter().map(|e| (e.step, e.cut)).collect();
    assert_eq!(keys, vec![(2, 1), (2, 2), (3, 1), (3, 2)]);
    assert!(negativity_scan(15, 2, 1, Some(&[99]), None).is_err());
    assert!(negativity_scan(15, 2, 1, None, Some(&[0])).is_err());
}
