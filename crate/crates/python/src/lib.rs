//! Python bindings: `import mixed_shor`.

use pyo3::exceptions::{PyArithmeticError, PyMemoryError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use shor_core::densmat::negativity_scan as scan;
use shor_core::numtheory;
use shor_core::orbits;
use shor_core::pipeline::{self, FactorOptions};
use shor_core::qpe::{self, ShotEngine};
use shor_core::rng::stream;
use shor_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::NotCoprime { .. } => {
            PyValueError::new_err(e.to_string())
        }
        Error::Resource(_) => PyMemoryError::new_err(e.to_string()),
        Error::BoundViolation(_) => PyArithmeticError::new_err(e.to_string()),
    }
}

fn engine(name: &str) -> PyResult<ShotEngine> {
    match name {
        "auto" => Ok(ShotEngine::Auto),
        "eigenphase" => Ok(ShotEngine::Eigenphase),
        "trajectory" => Ok(ShotEngine::Trajectory),
        _ => Err(PyValueError::new_err(format!(
            "engine must be auto, eigenphase or trajectory, got {name:?}"
        ))),
    }
}

fn resolve_l(n: u64, l: Option<u32>, allow_small_t: bool) -> PyResult<u32> {
    match l {
        None => Ok(qpe::choose_l(n)),
        Some(l) if l == 0 || l >= 63 => {
            Err(PyValueError::new_err(format!("L={l} is out of range")))
        }
        Some(l) if !allow_small_t && !qpe::l_in_standard_range(n, l) => Err(PyValueError::new_err(
            format!("2^{l} is outside (N^2, 2N^2) for N={n}; pass allow_small_t=True"),
        )),
        Some(l) => Ok(l),
    }
}

/// Orbits of `x -> a*x mod N`.
#[pyclass(name = "OrbitTable", frozen, module = "mixed_shor")]
struct PyOrbitTable(orbits::OrbitTable);

#[pymethods]
impl PyOrbitTable {
    #[getter(N)]
    fn n(&self) -> u64 {
        self.0.n()
    }

    #[getter]
    fn a(&self) -> u64 {
        self.0.a()
    }

    /// Multiplicative order of `a` mod `N`.
    #[getter]
    fn order(&self) -> u64 {
        self.0.order()
    }

    /// Orbit members in generation order, sorted by leader.
    #[getter]
    fn orbits(&self) -> Vec<Vec<u64>> {
        self.0.orbits().iter().map(|o| o.members.clone()).collect()
    }

    #[getter]
    fn periods(&self) -> Vec<u64> {
        self.0.orbits().iter().map(|o| o.period).collect()
    }

    /// `(orbit index, offset)` of residue `x`.
    fn locate(&self, x: u64) -> PyResult<(usize, usize)> {
        if x >= self.0.n() {
            return Err(PyValueError::new_err(format!(
                "{x} is not a residue mod {}",
                self.0.n()
            )));
        }
        Ok(self.0.locate(x))
    }

    /// Fraction of residues on orbits of full period, as `(num, den)`.
    fn success_mass(&self) -> (u64, u64) {
        let f = orbits::success_mass(&self.0);
        (f.num, f.den)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("table serializes")
    }

    fn __len__(&self) -> usize {
        self.0.orbits().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "OrbitTable(N={}, a={}, orbits={})",
            self.0.n(),
            self.0.a(),
            self.0.orbits().len()
        )
    }
}

/// Probability vector over `c in range(t)`.
#[pyclass(name = "Distribution", frozen, module = "mixed_shor")]
struct PyDistribution(qpe::Distribution);

#[pymethods]
impl PyDistribution {
    #[getter]
    fn t(&self) -> u64 {
        self.0.t
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.0.probs.clone()
    }

    fn total(&self) -> f64 {
        self.0.total()
    }

    fn total_variation(&self, other: &PyDistribution) -> PyResult<f64> {
        if self.0.t != other.0.t {
            return Err(PyValueError::new_err(
                "distributions over different supports",
            ));
        }
        Ok(self.0.total_variation(&other.0))
    }

    fn max_abs_diff(&self, other: &PyDistribution) -> PyResult<f64> {
        if self.0.t != other.0.t {
            return Err(PyValueError::new_err(
                "distributions over different supports",
            ));
        }
        Ok(self.0.max_abs_diff(&other.0))
    }

    fn to_csv(&self) -> String {
        let mut out = Vec::new();
        self.0.write_csv(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("csv is utf-8")
    }

    fn __len__(&self) -> usize {
        self.0.probs.len()
    }

    fn __getitem__(&self, c: usize) -> PyResult<f64> {
        self.0
            .probs
            .get(c)
            .copied()
            .ok_or_else(|| pyo3::exceptions::PyIndexError::new_err(c))
    }

    fn __repr__(&self) -> String {
        format!("Distribution(t={})", self.0.t)
    }
}

/// Transcript of one factoring run.
#[pyclass(name = "FactorAttempt", frozen, module = "mixed_shor")]
struct PyFactorAttempt(pipeline::FactorAttempt);

#[pymethods]
impl PyFactorAttempt {
    #[getter(N)]
    fn n(&self) -> u64 {
        self.0.n
    }

    #[getter]
    fn a(&self) -> u64 {
        self.0.a
    }

    #[getter(L)]
    fn l(&self) -> u32 {
        self.0.l
    }

    #[getter]
    fn budget(&self) -> u64 {
        self.0.budget
    }

    #[getter]
    fn shots_used(&self) -> u64 {
        self.0.shots_used
    }

    #[getter]
    fn via_gcd(&self) -> bool {
        self.0.via_gcd
    }

    #[getter]
    fn order(&self) -> Option<u64> {
        self.0.order
    }

    #[getter]
    fn failure(&self) -> Option<String> {
        self.0.failure.clone()
    }

    #[getter]
    fn factors(&self) -> Option<(u64, u64)> {
        self.0.factors.map(|[p, q]| (p, q))
    }

    #[getter]
    fn succeeded(&self) -> bool {
        self.0.succeeded()
    }

    /// One dict per shot: a, g, d, j, c, candidate, verified.
    #[getter]
    fn records<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.0
            .records
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("a", r.a)?;
                d.set_item("g", r.g)?;
                d.set_item("d", r.d)?;
                d.set_item("j", r.j)?;
                d.set_item("c", r.c)?;
                d.set_item("candidate", r.candidate)?;
                d.set_item("verified", r.verified)?;
                Ok(d)
            })
            .collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("attempt serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "FactorAttempt(N={}, factors={:?}, shots_used={})",
            self.0.n, self.0.factors, self.0.shots_used
        )
    }
}

#[pyfunction]
fn gcd(a: u64, b: u64) -> u64 {
    numtheory::gcd(a, b)
}

#[pyfunction]
fn modpow(base: u64, exp: u64, m: u64) -> PyResult<u64> {
    numtheory::modpow(base, exp, m).map_err(to_py)
}

#[pyfunction]
fn multiplicative_order(a: u64, m: u64) -> PyResult<u64> {
    numtheory::multiplicative_order(a, m).map_err(to_py)
}

#[pyfunction]
fn totient(n: u64) -> u64 {
    numtheory::totient(n)
}

/// Last continued-fraction convergent of `c/t` with denominator below
/// `bound`, as `(num, den)`.
#[pyfunction]
fn best_convergent(c: u64, t: u64, bound: u64) -> Option<(u64, u64)> {
    numtheory::best_convergent(c, t, bound).map(|f| (f.num, f.den))
}

#[pyfunction]
fn decompose(n: u64, a: u64) -> PyResult<PyOrbitTable> {
    orbits::decompose(n, a).map(PyOrbitTable).map_err(to_py)
}

#[pyfunction]
fn theorem1_count(p: u64, q: u64, a: u64) -> PyResult<u64> {
    orbits::theorem1_count(p, q, a).map_err(to_py)
}

#[pyfunction]
fn choose_l(n: u64) -> PyResult<u32> {
    if n < 2 {
        return Err(PyValueError::new_err("modulus must be at least 2"));
    }
    Ok(qpe::choose_l(n))
}

#[pyfunction]
fn dirichlet_weight(theta: f64, t: u64) -> PyResult<f64> {
    if t == 0 {
        return Err(PyValueError::new_err("t must be positive"));
    }
    Ok(qpe::dirichlet_weight(theta, t))
}

#[pyfunction]
#[pyo3(signature = (n, a, l=None, allow_small_t=false))]
fn analytic_distribution(
    n: u64,
    a: u64,
    l: Option<u32>,
    allow_small_t: bool,
) -> PyResult<PyDistribution> {
    let l = resolve_l(n, l, allow_small_t)?;
    let table = orbits::decompose(n, a).map_err(to_py)?;
    qpe::analytic_distribution(&table, l)
        .map(PyDistribution)
        .map_err(to_py)
}

/// Mixture of gate-level simulations, one per orbit, weighted by orbit size.
#[pyfunction]
#[pyo3(signature = (n, a, l=None, allow_small_t=false))]
fn statevector_distribution(
    n: u64,
    a: u64,
    l: Option<u32>,
    allow_small_t: bool,
) -> PyResult<PyDistribution> {
    let l = resolve_l(n, l, allow_small_t)?;
    let table = orbits::decompose(n, a).map_err(to_py)?;
    let mut probs = vec![0.0; 1 << l];
    for orbit in table.orbits() {
        let part = qpe::statevector_run(orbit, l).map_err(to_py)?;
        let w = orbit.period as f64 / n as f64;
        probs
            .iter_mut()
            .zip(&part.probs)
            .for_each(|(x, p)| *x += w * p);
    }
    Ok(PyDistribution(qpe::Distribution { t: 1 << l, probs }))
}

#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (n, a, shots, l=None, allow_small_t=false, seed=0, engine="auto"))]
fn empirical_distribution(
    py: Python<'_>,
    n: u64,
    a: u64,
    shots: u64,
    l: Option<u32>,
    allow_small_t: bool,
    seed: u64,
    engine: &str,
) -> PyResult<PyDistribution> {
    let l = resolve_l(n, l, allow_small_t)?;
    let table = orbits::decompose(n, a).map_err(to_py)?;
    let e = self::engine(engine)?;
    py.detach(|| qpe::empirical_distribution(&table, l, e, shots, seed))
        .map(PyDistribution)
        .map_err(to_py)
}

/// Individual shots as dicts with keys g, d, j, bits, c.
#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (n, a, shots=1, l=None, allow_small_t=false, seed=0, engine="auto"))]
fn sample<'py>(
    py: Python<'py>,
    n: u64,
    a: u64,
    shots: u64,
    l: Option<u32>,
    allow_small_t: bool,
    seed: u64,
    engine: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let l = resolve_l(n, l, allow_small_t)?;
    let table = orbits::decompose(n, a).map_err(to_py)?;
    let e = self::engine(engine)?;
    (0..shots)
        .map(|i| {
            let s = qpe::sample_shot(&table, l, e, &mut stream(seed, i));
            let d = PyDict::new(py);
            d.set_item("g", s.g)?;
            d.set_item("d", s.d)?;
            d.set_item("j", s.label.map(|x| x.j))?;
            d.set_item("bits", s.shot.bits.clone())?;
            d.set_item("c", s.shot.c)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn postprocess(c: u64, t: u64, n: u64, a: u64) -> Option<u64> {
    pipeline::postprocess(c, t, n, a)
}

#[pyfunction]
fn extract_factors(n: u64, a: u64, r: u64) -> Option<(u64, u64)> {
    pipeline::extract_factors(n, a, r)
}

#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (n, a=None, budget=None, l=None, allow_small_t=false, seed=0, engine="auto"))]
fn factor(
    py: Python<'_>,
    n: u64,
    a: Option<u64>,
    budget: Option<u64>,
    l: Option<u32>,
    allow_small_t: bool,
    seed: u64,
    engine: &str,
) -> PyResult<PyFactorAttempt> {
    let options = FactorOptions {
        a,
        budget,
        l,
        allow_small_t,
        engine: self::engine(engine)?,
        skip_classical_guards: false,
    };
    py.detach(|| pipeline::factor(n, &options, seed))
        .map(PyFactorAttempt)
        .map_err(to_py)
}

#[pyfunction]
fn success_lower_bound(p: u64, q: u64, a: u64) -> PyResult<f64> {
    pipeline::success_lower_bound(p, q, a).map_err(to_py)
}

/// Exact per-shot probabilities `(order recovered, factor found)`.
#[pyfunction]
#[pyo3(signature = (n, a, l=None, allow_small_t=false))]
fn exact_shot_success(n: u64, a: u64, l: Option<u32>, allow_small_t: bool) -> PyResult<(f64, f64)> {
    let l = resolve_l(n, l, allow_small_t)?;
    let table = orbits::decompose(n, a).map_err(to_py)?;
    let s = pipeline::exact_shot_success(&table, l).map_err(to_py)?;
    Ok((s.order, s.factor))
}

/// Partial-transpose minimum eigenvalues as dicts with keys step, label,
/// cut, min_eigenvalue, negative.
#[pyfunction]
#[pyo3(signature = (n, a, controls=2, steps=None, cuts=None))]
fn negativity_scan<'py>(
    py: Python<'py>,
    n: u64,
    a: u64,
    controls: u32,
    steps: Option<Vec<usize>>,
    cuts: Option<Vec<u64>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let report = py
        .detach(|| scan(n, a, controls, steps.as_deref(), cuts.as_deref()))
        .map_err(to_py)?;
    report
        .entries
        .iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("step", e.step)?;
            d.set_item("label", &e.label)?;
            d.set_item("cut", e.cut)?;
            d.set_item("min_eigenvalue", e.min_eigenvalue)?;
            d.set_item("negative", e.negative)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn mixed_shor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrbitTable>()?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyFactorAttempt>()?;
    m.add_function(wrap_pyfunction!(gcd, m)?)?;
    m.add_function(wrap_pyfunction!(modpow, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicative_order, m)?)?;
    m.add_function(wrap_pyfunction!(totient, m)?)?;
    m.add_function(wrap_pyfunction!(best_convergent, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_count, m)?)?;
    m.add_function(wrap_pyfunction!(choose_l, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_weight, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(statevector_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(postprocess, m)?)?;
    m.add_function(wrap_pyfunction!(extract_factors, m)?)?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(success_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exact_shot_success, m)?)?;
    m.add_function(wrap_pyfunction!(negativity_scan, m)?)?;
    Ok(())
}
