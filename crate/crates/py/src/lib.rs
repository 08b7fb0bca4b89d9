//! Python bindings for the lattice decoders and the simulation harness.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cf_lattice::diophantine::{bounded_family, extended_gcd, hnf_solve, solve_pair};
use cf_lattice::fading::{exhaustive_ml_decode, ida_decode, log_likelihood, LikelihoodGeometry, ScaledObservation};
use cf_lattice::gaussian::{build_sum_codebook, pairwise_error_prob, union_bound, GaussianReceiver, SumCodebook};
use cf_lattice::lattice::{closest_point, minimum_distance, shortest_vector, IntegerBox};
use cf_lattice::selection::{coefficient_gram, computation_rate, optimal_alpha, optimal_coefficients};
use cf_lattice::sim::config::{ScenarioKind, SimConfig};
use cf_lattice::sim::{sweep_fading, sweep_gaussian, ErrorRateCurve};
use cf_lattice::{ChannelRealization, GaussianDecoder, Lattice, NestedLatticeCode, NetworkCodeVector};

fn err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_rows(m: &cf_lattice::lattice::Lattice) -> Vec<Vec<f64>> {
    let b = m.basis();
    (0..b.nrows()).map(|i| (0..b.ncols()).map(|j| b[(i, j)]).collect()).collect()
}

/// A full-rank lattice given by generator rows.
#[pyclass(name = "Lattice", module = "cf_lattice_py", frozen)]
struct PyLattice(Lattice);

#[pymethods]
impl PyLattice {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Lattice::from_rows(&rows).map(PyLattice).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn basis(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.0)
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.0.volume()
    }

    fn point(&self, coeffs: Vec<i64>) -> Vec<f64> {
        self.0.point(&coeffs)
    }

    /// `(coeffs, point, dist2)` of the closest lattice point, optionally with
    /// coefficients restricted to `[lo, hi]` per coordinate.
    #[pyo3(signature = (y, bounds=None))]
    fn closest_point(&self, y: Vec<f64>, bounds: Option<Vec<(i64, i64)>>) -> PyResult<(Vec<i64>, Vec<f64>, f64)> {
        let b = bounds.map(IntegerBox::new).transpose().map_err(err)?;
        let c = closest_point(&self.0, &y, b.as_ref()).map_err(err)?;
        Ok((c.coeffs, c.point, c.dist2))
    }

    /// `(coeffs, norm2)` of a shortest nonzero vector.
    fn shortest_vector(&self) -> PyResult<(Vec<i64>, f64)> {
        let s = shortest_vector(self.0.gram()).map_err(err)?;
        Ok((s.coeffs, s.norm2))
    }

    fn minimum_distance(&self) -> PyResult<f64> {
        minimum_distance(&self.0).map_err(err)
    }
}

/// Nested lattice code with the codebook of the `N`-fold sum.
#[pyclass(name = "NestedCode", module = "cf_lattice_py", frozen)]
struct PyNestedCode {
    code: NestedLatticeCode,
    sum: SumCodebook,
}

#[pymethods]
impl PyNestedCode {
    /// `coarse` is either a scale `c` (for `cℤⁿ`) or generator rows.
    #[new]
    #[pyo3(signature = (fine, coarse, power=None, sources=2))]
    fn new(fine: Vec<Vec<f64>>, coarse: &Bound<'_, PyAny>, power: Option<f64>, sources: usize) -> PyResult<Self> {
        let fine = Lattice::from_rows(&fine).map_err(err)?;
        let coarse = match coarse.extract::<f64>() {
            Ok(c) => Lattice::scaled_identity(fine.ambient_dim(), c),
            Err(_) => Lattice::from_rows(&coarse.extract::<Vec<Vec<f64>>>()?),
        }
        .map_err(err)?;
        let code = NestedLatticeCode::new(fine, coarse, power).map_err(err)?;
        let sum = build_sum_codebook(&code, sources).map_err(err)?;
        Ok(PyNestedCode { code, sum })
    }

    fn __len__(&self) -> usize {
        self.code.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.code.dim()
    }

    #[getter]
    fn second_moment(&self) -> f64 {
        self.code.second_moment()
    }

    #[getter]
    fn codewords(&self) -> Vec<Vec<f64>> {
        self.code.codewords().to_vec()
    }

    /// `(coeffs, probability)` over the support of the sum.
    fn sum_support(&self) -> Vec<(Vec<i64>, f64)> {
        self.sum.coefficients().iter().cloned().zip(self.sum.pmf().iter().copied()).collect()
    }

    /// Fine-lattice coefficients of the decided sum for the named decoder.
    fn decode(&self, decoder: &str, y: Vec<f64>, noise_var: f64) -> PyResult<Vec<i64>> {
        let d: GaussianDecoder = decoder.parse().map_err(err)?;
        let rx = GaussianReceiver::new(&self.code, &self.sum, noise_var).map_err(err)?;
        rx.decode(d, &y).map(|r| r.coeffs).map_err(err)
    }

    fn union_bound(&self, noise_var: f64) -> PyResult<f64> {
        let d = minimum_distance(self.code.fine()).map_err(err)?;
        Ok(union_bound(&self.sum, d, noise_var.sqrt()))
    }

    fn pairwise_error_prob(&self, sent: Vec<i64>, decided: Vec<i64>, noise_var: f64) -> PyResult<f64> {
        let fine = self.code.fine();
        pairwise_error_prob(
            &fine.point(&sent),
            &fine.point(&decided),
            noise_var.sqrt(),
            self.sum.probability(&sent),
            self.sum.probability(&decided),
        )
        .map_err(err)
    }
}

fn channel(h: Vec<f64>, snr_db: f64, power: f64) -> PyResult<ChannelRealization> {
    ChannelRealization::from_snr_db(h, snr_db, power).map_err(err)
}

fn code_vector(a: Vec<i64>) -> PyResult<NetworkCodeVector> {
    NetworkCodeVector::new(a).map_err(err)
}

/// Shortest-vector network code vector for `h` at `snr_db`.
#[pyfunction]
#[pyo3(signature = (h, snr_db, power=1.0))]
fn optimal_code_vector(h: Vec<f64>, snr_db: f64, power: f64) -> PyResult<Vec<i64>> {
    optimal_coefficients(&channel(h, snr_db, power)?).map(Vec::from).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h, snr_db, a, power=1.0))]
fn mmse_alpha(h: Vec<f64>, snr_db: f64, a: Vec<i64>, power: f64) -> PyResult<f64> {
    optimal_alpha(&channel(h, snr_db, power)?, &code_vector(a)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h, snr_db, a, alpha, power=1.0))]
fn rate(h: Vec<f64>, snr_db: f64, a: Vec<i64>, alpha: f64, power: f64) -> PyResult<f64> {
    computation_rate(&channel(h, snr_db, power)?, &code_vector(a)?, alpha).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h, snr_db, power=1.0))]
fn gram(h: Vec<f64>, snr_db: f64, power: f64) -> PyResult<Vec<Vec<f64>>> {
    let g = coefficient_gram(&channel(h, snr_db, power)?);
    Ok((0..g.nrows()).map(|i| (0..g.ncols()).map(|j| g[(i, j)]).collect()).collect())
}

#[pyfunction]
fn gcd(a1: i64, a2: i64) -> PyResult<(i64, i64, i64)> {
    extended_gcd(a1, a2).map_err(err)
}

/// `(k, x1, x2)` for every solution of `a1 x1 + a2 x2 = t` in `[-s, s]²`.
#[pyfunction]
fn pair_solutions(a1: i64, a2: i64, t: i64, s: i64) -> PyResult<Vec<(i64, i64, i64)>> {
    let fam = solve_pair(a1, a2, t).map_err(err)?;
    Ok(bounded_family(&fam, &IntegerBox::symmetric(2, s)))
}

/// `(particular, generators)`: `xᵢ = vᵢ + Gᵢ w` with rational `vᵢ` as `Fraction`s.
#[pyfunction]
fn solve_lattice_system<'py>(py: Python<'py>, m: Vec<Vec<i64>>, a: Vec<i64>, t: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
    let sol = hnf_solve(&m, &a, &t).map_err(err)?;
    (sol.particular, sol.generators).into_pyobject(py).map(Bound::into_any)
}

fn observation(y: f64, h: [f64; 2], noise_var: f64, alpha: f64) -> ScaledObservation {
    ScaledObservation::new(y, h, noise_var, alpha)
}

/// `(t, k, residual)` of the diophantine near-ML decision.
#[pyfunction]
fn ida(y: f64, h: [f64; 2], noise_var: f64, alpha: f64, a: Vec<i64>, s_m: i64) -> PyResult<(i64, i64, f64)> {
    let obs = observation(y, h, noise_var, alpha);
    let geom = LikelihoodGeometry::new(&obs, &code_vector(a)?, s_m).map_err(err)?;
    let d = ida_decode(&obs, &geom).map_err(err)?;
    Ok((d.t, d.k, d.residual))
}

/// `(t, log φ(t))` of the exact ML decision.
#[pyfunction]
fn ml(y: f64, h: [f64; 2], noise_var: f64, alpha: f64, a: Vec<i64>, s_m: i64) -> PyResult<(i64, f64)> {
    let d = exhaustive_ml_decode(&observation(y, h, noise_var, alpha), &code_vector(a)?, s_m).map_err(err)?;
    Ok((d.t, d.log_phi))
}

/// `(t, log φ(t))` over the whole candidate set.
#[pyfunction]
fn log_likelihoods(y: f64, h: [f64; 2], noise_var: f64, alpha: f64, a: Vec<i64>, s_m: i64) -> PyResult<Vec<(i64, f64)>> {
    let obs = observation(y, h, noise_var, alpha);
    let geom = LikelihoodGeometry::new(&obs, &code_vector(a)?, s_m).map_err(err)?;
    Ok((geom.t_range.0..=geom.t_range.1).map(|t| (t, log_likelihood(t, &geom, &obs))).collect())
}

fn curve_dict<'py>(py: Python<'py>, c: &ErrorRateCurve) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scenario", c.scenario)?;
    d.set_item("decoder", c.decoder)?;
    let pts: Vec<(f64, u64, u64, f64, f64)> =
        c.points.iter().map(|p| (p.snr_db, p.trials, p.errors, p.pe, p.ci95_half)).collect();
    d.set_item("points", pts)?;
    Ok(d)
}

/// Runs the sweep described by a TOML configuration string; one dict per decoder.
#[pyfunction]
fn run_sweep<'py>(py: Python<'py>, config: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = SimConfig::from_toml_str(config).map_err(err)?;
    let curves = match cfg.scenario {
        Some(ScenarioKind::Fading1d) => {
            let plan = cfg.fading_plan().map_err(err)?;
            py.detach(|| sweep_fading(&plan))
        }
        Some(ScenarioKind::GaussianMap) => {
            let plan = cfg.gaussian_plan().map_err(err)?;
            py.detach(|| sweep_gaussian(&plan)).map_err(err)?
        }
        None => return Err(err("configuration has no scenario")),
    };
    curves.iter().map(|c| curve_dict(py, c)).collect()
}

#[pymodule]
fn cf_lattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyNestedCode>()?;
    m.add_function(wrap_pyfunction!(optimal_code_vector, m)?)?;
    m.add_function(wrap_pyfunction!(mmse_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(rate, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(gcd, m)?)?;
    m.add_function(wrap_pyfunction!(pair_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lattice_system, m)?)?;
    m.add_function(wrap_pyfunction!(ida, m)?)?;
    m.add_function(wrap_pyfunction!(ml, m)?)?;
    m.add_function(wrap_pyfunction!(log_likelihoods, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
