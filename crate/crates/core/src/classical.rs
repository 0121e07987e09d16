//! Classical coupled-mode propagation, supermodes and the exceptional point.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scattering::scattering_matrix;
use crate::types::{
    ClassicalInput, ComplexMatrix2, CouplerParams, DecayCurve, PropagationGrid, ScatteringMatrix,
};

/// Relative tolerance (in units of `kappa^2`) for calling a point the EP.
pub const EP_TOLERANCE: f64 = 1e-12;

/// `M = [[beta1, kappa], [kappa, beta2 - i gamma]]`.
pub fn coupler_matrix(params: &CouplerParams) -> ComplexMatrix2 {
    let k = Complex64::new(params.kappa(), 0.0);
    ComplexMatrix2::from_rows([
        [Complex64::new(params.beta1(), 0.0), k],
        [k, Complex64::new(params.beta2(), -params.gamma())],
    ])
}

/// Complex propagation constants of the two supermodes. `lambda1` is the
/// slower-decaying one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupermodePair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl SupermodePair {
    pub fn gap(&self) -> f64 {
        (self.lambda1 - self.lambda2).norm()
    }
}

/// Eigenvalues of the coupler matrix, ordered by descending imaginary part
/// and then ascending real part.
pub fn supermodes(params: &CouplerParams) -> SupermodePair {
    let half_trace = Complex64::new(params.beta1() + params.beta2(), -params.gamma()) * 0.5;
    let delta = Complex64::new(params.beta1() - params.beta2(), params.gamma()) * 0.5;
    let omega = (delta * delta + params.kappa() * params.kappa()).sqrt();
    let (a, b) = (half_trace + omega, half_trace - omega);
    let scale = f64::EPSILON * (a.norm() + b.norm());
    let order = if (a.im - b.im).abs() <= scale {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal)
    } else if a.im > b.im {
        Ordering::Less
    } else {
        Ordering::Greater
    };
    let (lambda1, lambda2) = if order == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    };
    SupermodePair { lambda1, lambda2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpRegime {
    Below,
    At,
    Above,
}

impl EpRegime {
    pub fn name(self) -> &'static str {
        match self {
            Self::Below => "below",
            Self::At => "at",
            Self::Above => "above",
        }
    }
}

/// Regime together with the discriminant `kappa^2 - (gamma/2)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpStatus {
    pub regime: EpRegime,
    pub discriminant: f64,
}

/// Position relative to the exceptional point `gamma = 2 kappa`. Only
/// defined for `beta1 == beta2`.
pub fn classify_ep(params: &CouplerParams) -> Result<EpStatus> {
    if params.beta1() != params.beta2() {
        return Err(Error::NonDegenerateBeta {
            beta1: params.beta1(),
            beta2: params.beta2(),
        });
    }
    let kappa2 = params.kappa() * params.kappa();
    let half_gamma = 0.5 * params.gamma();
    let discriminant = kappa2 - half_gamma * half_gamma;
    let tol = EP_TOLERANCE * kappa2;
    let regime = if discriminant > tol {
        EpRegime::Below
    } else if discriminant < -tol {
        EpRegime::Above
    } else {
        EpRegime::At
    };
    Ok(EpStatus {
        regime,
        discriminant,
    })
}

/// Mode amplitudes `exp(-i M z) c0`.
pub fn propagate_classical(
    params: &CouplerParams,
    c0: [Complex64; 2],
    z: f64,
) -> Result<[Complex64; 2]> {
    Ok(scattering_matrix(params, z)?.matrix().apply(c0))
}

/// Total power carried by `input` after propagation through `s`, summed
/// over polarization channels.
pub fn classical_power(s: &ScatteringMatrix, input: ClassicalInput) -> f64 {
    input
        .channels()
        .into_iter()
        .map(|(weight, c0)| {
            let [a, b] = s.matrix().apply(c0);
            weight * (a.norm_sqr() + b.norm_sqr())
        })
        .sum()
}

/// Normalized total power `P(z)` along `grid`.
pub fn classical_power_curve(
    params: &CouplerParams,
    input: ClassicalInput,
    grid: &PropagationGrid,
) -> Result<DecayCurve> {
    let points = grid
        .points()
        .map(|z| Ok((z, classical_power(&scattering_matrix(params, z)?, input))))
        .collect::<Result<Vec<_>>>()?;
    DecayCurve::normalized(input.name(), points)
}
