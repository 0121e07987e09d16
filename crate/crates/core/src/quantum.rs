//! Two-photon observables from single-photon scattering matrices.
//!
//! The coupler is linear, so a creation operator launched into guide `l`
//! evolves into `sum_n S_{n,l} c_n^dag` plus reservoir terms. Every
//! two-photon amplitude that stays inside the coupler is therefore a
//! product of two entries of `S`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::reservoir::{LatticeCoupler, LatticeReservoir};
use crate::scattering::scattering_matrix;
use crate::types::{
    CouplerParams, DecayCurve, EntanglementPhase, PropagationGrid, ScatteringMatrix, TwoPhotonInput,
};

/// Largest roundoff excursion outside `[0, 1]` tolerated before clamping.
const CLAMP_SLACK: f64 = 1e-12;

fn clamp_probability(p: f64) -> f64 {
    debug_assert!(
        p > -CLAMP_SLACK && p < 1.0 + CLAMP_SLACK,
        "probability {p} outside [0, 1] beyond roundoff"
    );
    p.clamp(0.0, 1.0)
}

/// Where the two photons are after propagation, for one photon launched
/// into each guide with equal polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonOccupations {
    /// Both in guide 1.
    pub p20: f64,
    /// Both in guide 2.
    pub p02: f64,
    /// One in each guide (coincidence).
    pub p11: f64,
    /// At least one photon lost to the reservoir.
    pub p_lost: f64,
}

pub fn occupations_indistinguishable(s: &ScatteringMatrix) -> TwoPhotonOccupations {
    let (s11, s12, s21, s22) = (s.s11(), s.s12(), s.s21(), s.s22());
    // |c^dag^2 |0>|^2 = 2
    let p20 = 2.0 * (s11 * s12).norm_sqr();
    let p02 = 2.0 * (s21 * s22).norm_sqr();
    let p11 = (s11 * s22 + s12 * s21).norm_sqr();
    let p_lost = clamp_probability(1.0 - (p20 + p02 + p11));
    TwoPhotonOccupations {
        p20,
        p02,
        p11,
        p_lost,
    }
}

fn bosonic_unclamped(s: &ScatteringMatrix) -> f64 {
    let o = occupations_indistinguishable(s);
    o.p20 + o.p02 + o.p11
}

/// Probability that neither of two indistinguishable photons, one per
/// guide, has leaked out.
pub fn survival_indistinguishable(s: &ScatteringMatrix) -> f64 {
    clamp_probability(bosonic_unclamped(s))
}

/// Antisymmetric input: `|S11 S22 - S12 S21|^2 = |det S|^2`.
pub fn survival_fermionic(s: &ScatteringMatrix) -> f64 {
    clamp_probability(s.det().norm_sqr())
}

/// Survival of the polarization-entangled input with phase `phi`.
///
/// The exchange term interpolates between the two symmetry sectors:
/// `P(phi) = cos^2(phi/2) P_boson + sin^2(phi/2) P_fermion`. The blend is
/// anchored on the nearer sector so the result is exact at `phi = 0`, at
/// `phi = pi` and whenever the two sectors agree.
pub fn survival_entangled(s: &ScatteringMatrix, phi: EntanglementPhase) -> f64 {
    let phi = phi.radians();
    let w_boson = (0.5 * (PI - phi)).sin().powi(2);
    let w_fermion = (0.5 * phi).sin().powi(2);
    let boson = bosonic_unclamped(s);
    let fermion = s.det().norm_sqr();
    let p = if w_fermion <= w_boson {
        boson + w_fermion * (fermion - boson)
    } else {
        fermion + w_boson * (boson - fermion)
    };
    clamp_probability(p)
}

pub fn survival(s: &ScatteringMatrix, input: TwoPhotonInput) -> f64 {
    match input {
        TwoPhotonInput::Indistinguishable => survival_indistinguishable(s),
        TwoPhotonInput::PolarizationEntangled(phi) => survival_entangled(s, phi),
    }
}

/// Mean number of photons left in the coupler for one photon per guide.
pub fn mean_photon_number(s: &ScatteringMatrix) -> f64 {
    (s.s11().norm_sqr() + s.s21().norm_sqr()) + (s.s12().norm_sqr() + s.s22().norm_sqr())
}

/// Source of scattering matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    /// `exp(-i M z)` with the coupler's own loss rate.
    Markovian,
    /// Exact evolution with the loss emulated by a lattice. The coupler
    /// must then be lossless.
    Lattice(LatticeReservoir),
}

/// A backend bound to parameters, ready to evaluate `S(z)`.
#[derive(Debug, Clone)]
pub enum Propagator {
    Markovian(CouplerParams),
    Lattice(LatticeCoupler),
}

impl Propagator {
    pub fn new(params: &CouplerParams, backend: &Backend) -> Result<Self> {
        Ok(match backend {
            Backend::Markovian => Self::Markovian(*params),
            Backend::Lattice(lattice) => Self::Lattice(LatticeCoupler::new(params, lattice)?),
        })
    }

    pub fn at(&self, z: f64) -> Result<ScatteringMatrix> {
        match self {
            Self::Markovian(p) => scattering_matrix(p, z),
            Self::Lattice(sys) => sys.scattering(z),
        }
    }
}

/// Survival probability of `input` along `grid`.
pub fn survival_curve(
    params: &CouplerParams,
    input: TwoPhotonInput,
    grid: &PropagationGrid,
    backend: &Backend,
) -> Result<DecayCurve> {
    let prop = Propagator::new(params, backend)?;
    let points = grid
        .points()
        .map(|z| Ok((z, survival(&prop.at(z)?, input))))
        .collect::<Result<Vec<_>>>()?;
    DecayCurve::normalized(format!("survival_{}", label(input)), points)
}

fn label(input: TwoPhotonInput) -> String {
    match input {
        TwoPhotonInput::Indistinguishable => "indistinguishable".into(),
        TwoPhotonInput::PolarizationEntangled(phi) => format!("phi={}", phi.radians()),
    }
}

/// Brute-force survival probability from the two-particle amplitude matrix.
///
/// A two-photon state `sum_ij A_ij a_i^dag b_j^dag |0>` evolves as
/// `A -> U A U^T` with `U = exp(-i H z)` for any real symmetric
/// single-excitation Hamiltonian `H` whose first two basis states are the
/// coupler guides. Indistinguishable photons share one mode set (`a = b`,
/// `A` symmetric, norm `2 sum |A_ij|^2`); the entangled input is tracked
/// through its H/V amplitude matrix (`a` = H modes, `b` = V modes).
pub fn two_photon_oracle(h: &DMatrix<f64>, input: TwoPhotonInput, z: f64) -> f64 {
    let n = h.nrows();
    assert!(
        n >= 2 && h.is_square(),
        "need a square Hamiltonian with the two guides first"
    );
    let eig = h.clone().symmetric_eigen();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases =
        DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * z)));
    let u = &v * phases * v.transpose();

    let mut a0 = DMatrix::<Complex64>::zeros(n, n);
    let (weight, a10) = match input {
        TwoPhotonInput::Indistinguishable => {
            a0[(0, 1)] = Complex64::new(0.5, 0.0);
            (2.0, Complex64::new(0.5, 0.0))
        }
        TwoPhotonInput::PolarizationEntangled(phi) => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            a0[(0, 1)] = Complex64::new(r, 0.0);
            (1.0, Complex64::from_polar(r, phi.radians()))
        }
    };
    a0[(1, 0)] = a10;
    let a = &u * a0 * u.transpose();
    let kept: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|ij| a[ij].norm_sqr())
        .sum();
    weight * kept
}
