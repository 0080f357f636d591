//! Python bindings: a `Graph` class carrying the percolation, walk, and
//! coupling operations, plus the tree analytics as module functions.

use std::collections::HashSet;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use percnb::conditions;
use percnb::coupling;
use percnb::graph::{self, FamilyTag, Graph as CoreGraph};
use percnb::harness::derive_seed as core_derive_seed;
use percnb::nbrw;
use percnb::percolation::{self, CoinLedger, HaltReason};
use percnb::tree;
use percnb::Error;

fn pyerr(e: Error) -> PyErr {
    match e {
        Error::Io(inner) => PyIOError::new_err(inner.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// An immutable simple undirected graph.
#[pyclass(frozen, name = "Graph", module = "percnb_py")]
struct PyGraph {
    inner: CoreGraph,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        Ok(Self { inner: graph::complete_graph(n).map_err(pyerr)? })
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(Self { inner: graph::cycle_graph(n).map_err(pyerr)? })
    }

    #[staticmethod]
    fn hamming(k: usize, m: usize) -> PyResult<Self> {
        Ok(Self { inner: graph::hamming_graph(k, m).map_err(pyerr)? })
    }

    #[staticmethod]
    fn lps(p: u64, q: u64) -> PyResult<Self> {
        Ok(Self { inner: graph::lps_ramanujan_graph(p, q).map_err(pyerr)? })
    }

    #[staticmethod]
    fn petersen() -> Self {
        Self { inner: graph::petersen_graph() }
    }

    #[staticmethod]
    #[pyo3(signature = (n, d, seed = 0))]
    fn random_regular(n: usize, d: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: graph::random_regular_graph(n, d, seed).map_err(pyerr)? })
    }

    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        Ok(Self { inner: CoreGraph::from_edges(n, edges, FamilyTag::Custom).map_err(pyerr)? })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(Self { inner: graph::read_edge_list(path).map_err(pyerr)? })
    }

    fn write(&self, path: &str) -> PyResult<()> {
        graph::write_edge_list(&self.inner, path).map_err(pyerr)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.edge_count()
    }

    /// Common degree, or None when irregular.
    #[getter]
    fn degree(&self) -> Option<usize> {
        self.inner.regular_degree()
    }

    fn neighbors(&self, v: u32) -> PyResult<Vec<u32>> {
        if v as usize >= self.inner.n() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().to_vec()
    }

    fn girth(&self) -> Option<usize> {
        graph::girth(&self.inner)
    }

    fn is_connected(&self) -> bool {
        graph::is_connected(&self.inner)
    }

    /// Largest |eigenvalue| of the simple-random-walk matrix, excluding +-1.
    #[pyo3(signature = (tol = 1e-9))]
    fn spectral_expansion(&self, tol: f64) -> PyResult<f64> {
        graph::spectral_expansion(&self.inner, tol).map_err(pyerr)
    }

    /// Non-backtracking return probabilities R[1..=horizon]; averaged over
    /// origins when `vertex` is omitted.
    #[pyo3(signature = (horizon, vertex = None))]
    fn return_profile(&self, horizon: usize, vertex: Option<u32>) -> PyResult<Vec<f64>> {
        let profile = match vertex {
            Some(v) => nbrw::return_probabilities(&self.inner, v, horizon),
            None => nbrw::average_return_profile(&self.inner, horizon),
        }
        .map_err(pyerr)?;
        Ok(profile.values().to_vec())
    }

    fn loop_identity_residual(&self, v: u32, t: usize, t2: usize) -> PyResult<f64> {
        nbrw::loop_identity_residual(&self.inner, v, t, t2).map_err(pyerr)
    }

    /// Percolate once; returns (largest, second largest) component sizes.
    #[pyo3(signature = (p, seed = 0))]
    fn percolate(&self, p: f64, seed: u64) -> PyResult<(usize, usize)> {
        let mask = percolation::sample_percolation(&self.inner, p, seed).map_err(pyerr)?;
        let stats = percolation::component_stats(&self.inner, &mask);
        Ok((stats.largest(), stats.second_largest()))
    }

    /// Vertices of the largest open component.
    #[pyo3(signature = (p, seed = 0))]
    fn largest_component(&self, p: f64, seed: u64) -> PyResult<Vec<u32>> {
        let mask = percolation::sample_percolation(&self.inner, p, seed).map_err(pyerr)?;
        Ok(percolation::largest_component_vertices(&self.inner, &mask))
    }

    /// Percolate once and measure the largest component; returns a dict with
    /// c1, c2, diam, and mix (mix is None when the component exceeds the
    /// exact-evolution cap).
    #[pyo3(signature = (p, seed = 0))]
    fn percolate_geometry<'py>(
        &self,
        py: Python<'py>,
        p: f64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mask = percolation::sample_percolation(&self.inner, p, seed).map_err(pyerr)?;
        let stats = percolation::component_stats(&self.inner, &mask);
        let comp = percolation::largest_component_vertices(&self.inner, &mask);
        let diam = percolation::component_diameter(&self.inner, &mask, &comp).map_err(pyerr)?;
        let mix = match percolation::mixing_time_tv(&self.inner, &mask, &comp) {
            Ok(t) => Some(t),
            Err(Error::CapacityExceeded(_)) => None,
            Err(e) => return Err(pyerr(e)),
        };
        let out = PyDict::new(py);
        out.set_item("c1", stats.largest())?;
        out.set_item("c2", stats.second_largest())?;
        out.set_item("diam", diam)?;
        out.set_item("mix", mix)?;
        Ok(out)
    }

    /// Shell sizes of the radius-r open ball around `center`, avoiding the
    /// given vertices.
    #[pyo3(signature = (center, radius, p, seed = 0, avoid = vec![]))]
    fn ball_shells(
        &self,
        center: u32,
        radius: usize,
        p: f64,
        seed: u64,
        avoid: Vec<u32>,
    ) -> PyResult<Vec<usize>> {
        let mut ledger = CoinLedger::new(p, seed).map_err(pyerr)?;
        let avoid: HashSet<u32> = avoid.into_iter().collect();
        let ball = percolation::grow_ball(&self.inner, &mut ledger, center, radius, &avoid)
            .map_err(pyerr)?;
        Ok((0..=radius).map(|k| ball.shell(k).len()).collect())
    }

    /// One coupled draw of the percolated covering tree and graph ball;
    /// returns a dict with the level counts h, shells, x, and the sandwich
    /// verdict.
    #[pyo3(signature = (v, r, p, coin_seed = 0, fresh_seed = 1, avoid = vec![]))]
    fn coupling_sample<'py>(
        &self,
        py: Python<'py>,
        v: u32,
        r: usize,
        p: f64,
        coin_seed: u64,
        fresh_seed: u64,
        avoid: Vec<u32>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut ledger = CoinLedger::new(p, coin_seed).map_err(pyerr)?;
        let avoid: HashSet<u32> = avoid.into_iter().collect();
        let sample =
            coupling::joint_sample(&self.inner, v, r, &avoid, &mut ledger, fresh_seed)
                .map_err(pyerr)?;
        let strict = sample.sandwich_holds()
            && (0..sample.h.len()).any(|k| sample.x[k] < sample.shell_sizes[k] as u64);
        let out = PyDict::new(py);
        out.set_item("h", sample.h.clone())?;
        out.set_item("shells", sample.shell_sizes.clone())?;
        out.set_item("x", sample.x.clone())?;
        out.set_item("holds", sample.sandwich_holds())?;
        out.set_item("strict", strict)?;
        Ok(out)
    }

    /// Lower bound on E|boundary of the radius-r avoided-set ball| divided by
    /// the leading term; requires a regular graph.
    #[pyo3(signature = (p, r, avoid_size = 0))]
    fn shell_lower_bound(&self, p: f64, r: usize, avoid_size: usize) -> PyResult<f64> {
        let d = self
            .inner
            .regular_degree()
            .ok_or_else(|| PyValueError::new_err("shell bound needs a regular graph"))?;
        let horizon = coupling::profile_horizon_needed(r);
        let profile = nbrw::average_return_profile(&self.inner, horizon).map_err(pyerr)?;
        coupling::shell_lower_bound(&profile, d, p, r, avoid_size, self.inner.n()).map_err(pyerr)
    }

    /// Window statistic n^{1/3} sum t R[t] over t <= cbrt(n).
    fn window_statistic(&self) -> PyResult<f64> {
        conditions::window_condition_statistic(&self.inner).map_err(pyerr)
    }

    /// Supercritical statistic at the window radius for (n, eps).
    fn supercritical_statistic(&self, eps: f64) -> PyResult<f64> {
        conditions::supercritical_condition_statistic(&self.inner, eps).map_err(pyerr)
    }

    /// Multi-root exploration; returns a dict with the step table and halt
    /// state.
    #[pyo3(signature = (p, r, threshold, t_max, seed = 0))]
    fn multi_root<'py>(
        &self,
        py: Python<'py>,
        p: f64,
        r: usize,
        threshold: usize,
        t_max: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report = percolation::multi_root_process(&self.inner, p, r, threshold, t_max, seed)
            .map_err(pyerr)?;
        let steps: Vec<(u32, usize, bool, usize)> = report
            .steps
            .iter()
            .map(|s| (s.root, s.ball_size, s.hit, s.visited_after))
            .collect();
        let halted = match report.halted {
            HaltReason::Success => "success",
            HaltReason::Exhausted => "exhausted",
            HaltReason::StepLimit => "step_limit",
        };
        let out = PyDict::new(py);
        out.set_item("steps", steps)?;
        out.set_item("success_step", report.success_step)?;
        out.set_item("visited", report.visited)?;
        out.set_item("halted", halted)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Window radius floor((ln x - 3 ln ln x)/eps) for x = n eps^3.
#[pyfunction]
fn window_radius(n: usize, eps: f64) -> PyResult<usize> {
    conditions::window_radius(n, eps).map_err(pyerr)
}

/// Exact survival probability to level r for percolation on the d-regular
/// tree.
#[pyfunction]
fn survival_exact(d: usize, p: f64, r: usize) -> PyResult<f64> {
    tree::survival_exact(d, p, r).map_err(pyerr)
}

/// Resistance-based (lower, upper) bounds on the survival probability.
#[pyfunction]
fn survival_bounds(d: usize, p: f64, r: usize) -> PyResult<(f64, f64)> {
    tree::survival_bounds(d, p, r).map_err(pyerr)
}

#[pyfunction]
fn level_mean(d: usize, p: f64, r: usize) -> PyResult<f64> {
    tree::level_mean(d, p, r).map_err(pyerr)
}

#[pyfunction]
fn level_second_moment(d: usize, p: f64, r: usize) -> PyResult<f64> {
    tree::level_second_moment(d, p, r).map_err(pyerr)
}

#[pyfunction]
fn effective_resistance(d: usize, p: f64, r: usize) -> PyResult<f64> {
    tree::effective_resistance(d, p, r).map_err(pyerr)
}

fn survival_check_dict<'py>(
    py: Python<'py>,
    check: tree::SurvivalCheck,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("d", check.d)?;
    out.set_item("eps", check.eps)?;
    out.set_item("r", check.r)?;
    out.set_item("p", check.p)?;
    out.set_item("exact", check.exact)?;
    out.set_item("lower", check.lower)?;
    out.set_item("upper", check.upper)?;
    out.set_item("holds", check.holds())?;
    Ok(out)
}

#[pyfunction]
fn supercritical_survival_check(
    py: Python<'_>,
    d: usize,
    eps: f64,
    r: usize,
) -> PyResult<Bound<'_, PyDict>> {
    survival_check_dict(py, tree::supercritical_survival_check(d, eps, r).map_err(pyerr)?)
}

#[pyfunction]
fn subcritical_survival_check(
    py: Python<'_>,
    d: usize,
    eps: f64,
    r: usize,
) -> PyResult<Bound<'_, PyDict>> {
    survival_check_dict(py, tree::subcritical_survival_check(d, eps, r).map_err(pyerr)?)
}

/// (largest, second largest) component of G(n, p) without materializing the
/// complete graph.
#[pyfunction]
#[pyo3(signature = (n, p, seed = 0))]
fn er_components(n: usize, p: f64, seed: u64) -> PyResult<(usize, usize)> {
    let edges = percolation::sample_er_open_edges(n, p, seed).map_err(pyerr)?;
    let stats = percolation::components_from_edge_list(n, &edges);
    Ok((stats.largest(), stats.second_largest()))
}

/// Stable seed for a labelled stream under one master seed.
#[pyfunction]
fn derive_seed(master: u64, labels: Vec<u64>) -> u64 {
    core_derive_seed(master, &labels)
}

#[pymodule]
fn percnb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(window_radius, m)?)?;
    m.add_function(wrap_pyfunction!(survival_exact, m)?)?;
    m.add_function(wrap_pyfunction!(survival_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(level_mean, m)?)?;
    m.add_function(wrap_pyfunction!(level_second_moment, m)?)?;
    m.add_function(wrap_pyfunction!(effective_resistance, m)?)?;
    m.add_function(wrap_pyfunction!(supercritical_survival_check, m)?)?;
    m.add_function(wrap_pyfunction!(subcritical_survival_check, m)?)?;
    m.add_function(wrap_pyfunction!(er_components, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    Ok(())
}
