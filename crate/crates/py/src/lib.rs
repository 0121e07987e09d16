use ep_coupler::classical::{self, EpRegime};
use ep_coupler::quantum::{self, Backend};
use ep_coupler::reservoir::{self, LatticeReservoir};
use ep_coupler::scattering;
use ep_coupler::{
    ClassicalInput, CouplerParams, EntanglementPhase, PropagationGrid, ScatteringMatrix,
    TwoPhotonInput,
};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: ep_coupler::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(
    name = "CouplerParams",
    module = "ep_coupler",
    frozen,
    skip_from_py_object
)]
#[derive(Clone, Copy)]
struct PyCouplerParams(CouplerParams);

#[pymethods]
impl PyCouplerParams {
    #[new]
    #[pyo3(signature = (beta1, beta2, kappa, gamma))]
    fn new(beta1: f64, beta2: f64, kappa: f64, gamma: f64) -> PyResult<Self> {
        CouplerParams::new(beta1, beta2, kappa, gamma)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn symmetric(kappa: f64, gamma: f64) -> PyResult<Self> {
        CouplerParams::symmetric(kappa, gamma)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn beta1(&self) -> f64 {
        self.0.beta1()
    }

    #[getter]
    fn beta2(&self) -> f64 {
        self.0.beta2()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    fn __repr__(&self) -> String {
        format!(
            "CouplerParams(beta1={}, beta2={}, kappa={}, gamma={})",
            self.0.beta1(),
            self.0.beta2(),
            self.0.kappa(),
            self.0.gamma()
        )
    }
}

#[pyclass(
    name = "ScatteringMatrix",
    module = "ep_coupler",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyScatteringMatrix(ScatteringMatrix);

#[pymethods]
impl PyScatteringMatrix {
    /// Entries as a nested list `[[s11, s12], [s21, s22]]`.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        self.0.matrix().rows().iter().map(|r| r.to_vec()).collect()
    }

    #[getter]
    fn z(&self) -> f64 {
        self.0.z()
    }

    fn det(&self) -> Complex64 {
        self.0.det()
    }

    fn singular_values(&self) -> (f64, f64) {
        self.0.singular_values()
    }

    fn __repr__(&self) -> String {
        let [[a, b], [c, d]] = self.0.matrix().rows();
        format!(
            "ScatteringMatrix(z={}, [[{a}, {b}], [{c}, {d}]])",
            self.0.z()
        )
    }
}

#[pyclass(
    name = "LatticeReservoir",
    module = "ep_coupler",
    frozen,
    skip_from_py_object
)]
#[derive(Clone, Copy)]
struct PyLatticeReservoir(LatticeReservoir);

#[pymethods]
impl PyLatticeReservoir {
    #[new]
    #[pyo3(signature = (sigma, rho, n_sites, beta_lattice = 0.0))]
    fn new(sigma: f64, rho: f64, n_sites: usize, beta_lattice: f64) -> PyResult<Self> {
        LatticeReservoir::new(sigma, rho, n_sites, beta_lattice)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho()
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.0.n_sites()
    }

    fn effective_gamma(&self) -> f64 {
        self.0.effective_gamma()
    }
}

fn two_photon_input(phi: Option<f64>) -> PyResult<TwoPhotonInput> {
    match phi {
        None => Ok(TwoPhotonInput::Indistinguishable),
        Some(p) => TwoPhotonInput::entangled(p).map_err(err),
    }
}

fn classical_input(name: &str) -> PyResult<ClassicalInput> {
    match name {
        "single_waveguide" => Ok(ClassicalInput::SingleWaveguide),
        "balanced_orthogonal" => Ok(ClassicalInput::BalancedOrthogonal),
        other => Err(PyValueError::new_err(format!(
            "unknown input {other:?}; expected \"single_waveguide\" or \"balanced_orthogonal\""
        ))),
    }
}

#[pyfunction]
fn scattering_matrix(params: &PyCouplerParams, z: f64) -> PyResult<PyScatteringMatrix> {
    scattering::scattering_matrix(&params.0, z)
        .map(PyScatteringMatrix)
        .map_err(err)
}

#[pyfunction]
fn nonmarkovian_scattering(
    params: &PyCouplerParams,
    lattice: &PyLatticeReservoir,
    z: f64,
) -> PyResult<PyScatteringMatrix> {
    reservoir::nonmarkovian_scattering(&params.0, &lattice.0, z)
        .map(PyScatteringMatrix)
        .map_err(err)
}

#[pyfunction]
fn supermodes(params: &PyCouplerParams) -> (Complex64, Complex64) {
    let pair = classical::supermodes(&params.0);
    (pair.lambda1, pair.lambda2)
}

/// `("below" | "at" | "above", kappa^2 - (gamma/2)^2)`.
#[pyfunction]
fn classify_ep(params: &PyCouplerParams) -> PyResult<(&'static str, f64)> {
    let status = classical::classify_ep(&params.0).map_err(err)?;
    let name = match status.regime {
        EpRegime::Below => "below",
        EpRegime::At => "at",
        EpRegime::Above => "above",
    };
    Ok((name, status.discriminant))
}

#[pyfunction]
#[pyo3(signature = (params, z_max, num_points, input = "balanced_orthogonal"))]
fn classical_power_curve(
    params: &PyCouplerParams,
    z_max: f64,
    num_points: usize,
    input: &str,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let grid = PropagationGrid::new(z_max, num_points).map_err(err)?;
    let curve =
        classical::classical_power_curve(&params.0, classical_input(input)?, &grid).map_err(err)?;
    Ok((curve.zs().collect(), curve.values().collect()))
}

/// Survival along `[0, z_max]`. `phi=None` selects the indistinguishable
/// input; passing `lattice` evaluates the exact reservoir model.
#[pyfunction]
#[pyo3(signature = (params, z_max, num_points, phi = None, lattice = None))]
fn survival_curve(
    params: &PyCouplerParams,
    z_max: f64,
    num_points: usize,
    phi: Option<f64>,
    lattice: Option<&PyLatticeReservoir>,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let grid = PropagationGrid::new(z_max, num_points).map_err(err)?;
    let backend = lattice.map_or(Backend::Markovian, |l| Backend::Lattice(l.0));
    let curve =
        quantum::survival_curve(&params.0, two_photon_input(phi)?, &grid, &backend).map_err(err)?;
    Ok((curve.zs().collect(), curve.values().collect()))
}

#[pyfunction]
fn survival_indistinguishable(s: &PyScatteringMatrix) -> f64 {
    quantum::survival_indistinguishable(&s.0)
}

#[pyfunction]
fn survival_entangled(s: &PyScatteringMatrix, phi: f64) -> PyResult<f64> {
    let phase = EntanglementPhase::new(phi).map_err(err)?;
    Ok(quantum::survival_entangled(&s.0, phase))
}

#[pyfunction]
fn survival_fermionic(s: &PyScatteringMatrix) -> f64 {
    quantum::survival_fermionic(&s.0)
}

#[pyfunction]
fn mean_photon_number(s: &PyScatteringMatrix) -> f64 {
    quantum::mean_photon_number(&s.0)
}

/// `(p20, p02, p11, p_lost)` for one photon launched in each guide.
#[pyfunction]
fn occupations(s: &PyScatteringMatrix) -> (f64, f64, f64, f64) {
    let o = quantum::occupations_indistinguishable(&s.0);
    (o.p20, o.p02, o.p11, o.p_lost)
}

#[pyfunction]
fn lattice_gamma(sigma: f64, rho: f64) -> PyResult<f64> {
    reservoir::lattice_gamma(sigma, rho).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sigma, z_max, safety = reservoir::DEFAULT_SAFETY))]
fn min_lattice_size(sigma: f64, z_max: f64, safety: f64) -> PyResult<usize> {
    reservoir::min_lattice_size(sigma, z_max, safety).map_err(err)
}

#[pymodule(name = "ep_coupler")]
fn ep_coupler_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCouplerParams>()?;
    m.add_class::<PyScatteringMatrix>()?;
    m.add_class::<PyLatticeReservoir>()?;
    m.add_function(wrap_pyfunction!(scattering_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(nonmarkovian_scattering, m)?)?;
    m.add_function(wrap_pyfunction!(supermodes, m)?)?;
    m.add_function(wrap_pyfunction!(classify_ep, m)?)?;
    m.add_function(wrap_pyfunction!(classical_power_curve, m)?)?;
    m.add_function(wrap_pyfunction!(survival_curve, m)?)?;
    m.add_function(wrap_pyfunction!(survival_indistinguishable, m)?)?;
    m.add_function(wrap_pyfunction!(survival_entangled, m)?)?;
    m.add_function(wrap_pyfunction!(survival_fermionic, m)?)?;
    m.add_function(wrap_pyfunction!(mean_photon_number, m)?)?;
    m.add_function(wrap_pyfunction!(occupations, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(min_lattice_size, m)?)?;
    Ok(())
}
