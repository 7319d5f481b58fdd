use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use homogeneous::decomposition::{commutant_dimension, Tolerances};
use homogeneous::group::{is_normal, subgroup_generated};
use homogeneous::instance::{parse_instance_str, resolve};
use homogeneous::measure::{invariant_measure, invariant_measure_space_dim};
use homogeneous::phi::{phi_map, PhiOutcome};
use homogeneous::report::{decomposition_report, run_probe, Claim};
use homogeneous::verify::{run_suite, Suite};
use homogeneous::{families, group_from_generators, FiniteGroup, GroupAction, Permutation};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn tolerances(ortho: Option<f64>, inv: Option<f64>, rank: Option<f64>) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        ortho: ortho.unwrap_or(d.ortho),
        inv: inv.unwrap_or(d.inv),
        rank: rank.unwrap_or(d.rank),
        ..d
    }
}

/// A finite permutation group with a dense multiplication table.
#[pyclass(name = "Group", frozen, module = "homogeneous")]
pub struct PyGroup {
    inner: Arc<FiniteGroup>,
}

impl PyGroup {
    fn wrap(g: Result<FiniteGroup, homogeneous::group::GroupError>) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(g.map_err(value_err)?) })
    }

    fn element(&self, p: &str) -> PyResult<usize> {
        let degree = self.inner.degree().ok_or_else(|| value_err("group has no permutation labels"))?;
        let perm = Permutation::parse(p, degree).map_err(value_err)?;
        self.inner.index_of(&perm).ok_or_else(|| value_err(format!("{perm} is not in the group")))
    }
}

#[pymethods]
impl PyGroup {
    /// Closure of permutations given in cycle (`"(0 1)"`) or image (`"[1,0,2]"`) notation.
    #[staticmethod]
    fn from_generators(degree: usize, generators: Vec<String>) -> PyResult<Self> {
        let gens = generators
            .iter()
            .map(|s| Permutation::parse(s, degree))
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_err)?;
        Self::wrap(group_from_generators(degree, &gens))
    }

    #[staticmethod]
    fn cyclic(n: usize) -> PyResult<Self> {
        Self::wrap(families::cyclic(n))
    }

    #[staticmethod]
    fn dihedral(n: usize) -> PyResult<Self> {
        Self::wrap(families::dihedral(n))
    }

    #[staticmethod]
    fn symmetric(n: usize) -> PyResult<Self> {
        Self::wrap(families::symmetric(n))
    }

    #[staticmethod]
    fn quaternion8() -> Self {
        Self { inner: Arc::new(families::quaternion8()) }
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn degree(&self) -> Option<usize> {
        self.inner.degree()
    }

    /// Element labels in cycle notation, by index.
    fn elements(&self) -> Vec<String> {
        self.inner
            .labels()
            .map(|l| l.iter().map(|p| p.to_string()).collect())
            .unwrap_or_default()
    }

    fn mul(&self, a: usize, b: usize) -> PyResult<usize> {
        self.inner.check_element(a).map_err(value_err)?;
        self.inner.check_element(b).map_err(value_err)?;
        Ok(self.inner.mul(a, b))
    }

    fn inv(&self, a: usize) -> PyResult<usize> {
        self.inner.check_element(a).map_err(value_err)?;
        Ok(self.inner.inv(a))
    }

    fn index_of(&self, permutation: &str) -> PyResult<usize> {
        self.element(permutation)
    }

    /// Whether the subgroup generated by the given permutations is normal.
    fn is_normal(&self, generators: Vec<String>) -> PyResult<bool> {
        let seeds = generators.iter().map(|s| self.element(s)).collect::<PyResult<Vec<_>>>()?;
        let sub = subgroup_generated(&self.inner, &seeds).map_err(value_err)?;
        Ok(is_normal(&self.inner, &sub))
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    fn __repr__(&self) -> String {
        format!("Group(order={})", self.inner.order())
    }
}

/// A finite group action on the points `0..degree`.
#[pyclass(name = "Action", frozen, module = "homogeneous")]
pub struct PyAction {
    inner: GroupAction,
}

#[pymethods]
impl PyAction {
    #[staticmethod]
    fn natural(group: PyRef<'_, PyGroup>) -> PyResult<Self> {
        let inner = homogeneous::natural_action(group.inner.clone()).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn regular(group: PyRef<'_, PyGroup>) -> Self {
        Self { inner: homogeneous::regular_action(group.inner.clone()) }
    }

    /// Left multiplication on the cosets of the subgroup generated by `generators`.
    #[staticmethod]
    fn coset(group: PyRef<'_, PyGroup>, generators: Vec<String>) -> PyResult<Self> {
        let seeds = generators.iter().map(|s| group.element(s)).collect::<PyResult<Vec<_>>>()?;
        let sub = subgroup_generated(&group.inner, &seeds).map_err(value_err)?;
        Ok(Self { inner: homogeneous::coset_action(group.inner.clone(), &sub) })
    }

    /// Builds an action from an instance document (the CLI's input format).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inst = parse_instance_str(text).and_then(|s| resolve(&s)).map_err(value_err)?;
        Ok(Self { inner: inst.action })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn group(&self) -> PyGroup {
        PyGroup { inner: self.inner.group_arc().clone() }
    }

    fn act(&self, alpha: usize, x: usize) -> PyResult<usize> {
        self.inner.group().check_element(alpha).map_err(value_err)?;
        self.inner.check_point(x).map_err(value_err)?;
        Ok(self.inner.act(alpha, x))
    }

    fn orbits(&self) -> Vec<Vec<usize>> {
        self.inner.orbits()
    }

    fn stabilizer(&self, x: usize) -> PyResult<Vec<usize>> {
        Ok(homogeneous::stabilizer(&self.inner, x).map_err(value_err)?.members().to_vec())
    }

    /// `{"transitive", "free", "faithful", "orbit_count"}`.
    fn profile<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let p = homogeneous::classify(&self.inner);
        loads(py, &serde_json::to_string(&p).map_err(runtime_err)?)
    }

    /// Invariant probability weights as `"p/q"` strings.
    #[pyo3(signature = (base = 0))]
    fn invariant_measure(&self, base: usize) -> PyResult<Vec<String>> {
        Ok(invariant_measure(&self.inner, base).map_err(value_err)?.to_strings())
    }

    fn invariant_measure_space_dim(&self) -> usize {
        invariant_measure_space_dim(&self.inner)
    }

    /// Images of `φₓ`, or `None` when the stabilizer of `x` is not normal.
    fn phi(&self, x: usize) -> PyResult<Option<Vec<usize>>> {
        Ok(match phi_map(&self.inner, x).map_err(value_err)? {
            PhiOutcome::WellDefined(m) => Some(m.mapping.images().to_vec()),
            PhiOutcome::IllDefined(_) => None,
        })
    }

    /// Probe record for `cor34`, `thm13`, `thm44` or `conjecture`, as a dict.
    #[pyo3(signature = (claim, trials = 64, seed = 42))]
    fn probe<'py>(&self, py: Python<'py>, claim: &str, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let claim = <Claim as clap::ValueEnum>::from_str(claim, true).map_err(value_err)?;
        let record = run_probe(claim, &self.inner, trials, seed, &Tolerances::default()).map_err(runtime_err)?;
        loads(py, &serde_json::to_string(&record).map_err(runtime_err)?)
    }

    /// Dimensions of the minimal invariant pieces.
    #[pyo3(signature = (seed = 42))]
    fn decompose(&self, seed: u64) -> PyResult<Vec<usize>> {
        let (report, _) = decomposition_report(&self.inner, seed, &Tolerances::default()).map_err(runtime_err)?;
        Ok(report.dims)
    }

    /// Full decomposition report as a dict.
    #[pyo3(signature = (seed = 42, tol_ortho = None, tol_inv = None, tol_rank = None))]
    fn decomposition<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        tol_ortho: Option<f64>,
        tol_inv: Option<f64>,
        tol_rank: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let tol = tolerances(tol_ortho, tol_inv, tol_rank);
        let (report, _) = decomposition_report(&self.inner, seed, &tol).map_err(runtime_err)?;
        loads(py, &serde_json::to_string(&report).map_err(runtime_err)?)
    }

    /// `(spectral_rank, orbital_count)` of the commutant.
    fn commutant_dimension(&self) -> PyResult<(usize, usize)> {
        let m = homogeneous::measure::InvariantMeasure::uniform(self.inner.degree());
        let rep = homogeneous::unitary_rep(&self.inner, &m).map_err(value_err)?;
        let d = commutant_dimension(&rep, &Tolerances::default()).map_err(runtime_err)?;
        Ok((d.spectral_rank, d.orbital_count))
    }

    /// Whether every check of the named suite passes.
    #[pyo3(signature = (suite = "all", seed = 42))]
    fn verify(&self, suite: &str, seed: u64) -> PyResult<bool> {
        let suite = <Suite as clap::ValueEnum>::from_str(suite, true).map_err(value_err)?;
        Ok(run_suite(suite, &self.inner, seed, &Tolerances::default()).iter().all(|r| r.passed))
    }

    fn __repr__(&self) -> String {
        format!("Action(order={}, degree={})", self.inner.group().order(), self.inner.degree())
    }
}

#[pymodule]
#[pyo3(name = "homogeneous")]
fn homogeneous_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyAction>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
