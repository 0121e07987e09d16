//! Markovian propagator `S(z) = exp(-i M z)` of the lossy coupler.
//!
//! Writing `M = t I + N` with `t = tr M / 2`, the traceless part satisfies
//! `N^2 = Omega^2 I`, so
//!
//! ```text
//! exp(-i M z) = e^{-i t z} [ cos(Omega z) I - i sin(Omega z)/Omega N ]
//! ```
//!
//! Both `cos(Omega z)` and `sin(Omega z)/Omega` are even in `Omega`, so the
//! expression is analytic through the exceptional point `Omega = 0`. Near
//! it the second factor is taken from its Taylor series.

use num_complex::Complex64;

use crate::error::Result;
use crate::types::{ComplexMatrix2, CouplerParams, PropagationGrid, ScatteringMatrix};

/// Below this `|Omega z|` the sinc factor is evaluated by its series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Half-trace and traceless part of the coupler matrix.
#[derive(Debug, Clone, Copy)]
struct Split {
    half_trace: Complex64,
    delta: Complex64,
    kappa: f64,
}

impl Split {
    fn new(params: &CouplerParams) -> Self {
        let gamma = params.gamma();
        Self {
            half_trace: Complex64::new(params.beta1() + params.beta2(), -gamma) * 0.5,
            delta: Complex64::new(params.beta1() - params.beta2(), gamma) * 0.5,
            kappa: params.kappa(),
        }
    }

    fn omega(&self) -> Complex64 {
        (self.delta * self.delta + self.kappa * self.kappa).sqrt()
    }
}

/// `sin(x)/x` to four terms; the truncation error is below 1e-32 for
/// `|x| < SERIES_THRESHOLD`.
fn sinc_series(x: Complex64) -> Complex64 {
    let x2 = x * x;
    1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
}

fn propagate(split: &Split, omega: Complex64, z: f64) -> ComplexMatrix2 {
    let x = omega * z;
    // Prefactor e^{-i t z} is folded into the exponentials so nothing grows
    // like e^{|Im Omega| z} on its own.
    let e_plus = (-I * (split.half_trace + omega) * z).exp();
    let e_minus = (-I * (split.half_trace - omega) * z).exp();
    let cos_part = (e_plus + e_minus) * 0.5;
    let sinc_part = if x.norm() < SERIES_THRESHOLD {
        (-I * split.half_trace * z).exp() * z * sinc_series(x)
    } else {
        (e_minus - e_plus) / (2.0 * I * omega)
    };
    let off = -I * sinc_part;
    let k = Complex64::new(split.kappa, 0.0);
    ComplexMatrix2::from_rows([
        [cos_part + off * split.delta, off * k],
        [off * k, cos_part - off * split.delta],
    ])
}

/// Markovian scattering matrix at distance `z >= 0`.
///
/// The determinant is attached in closed form, `exp(-i z tr M)`.
pub fn scattering_matrix(params: &CouplerParams, z: f64) -> Result<ScatteringMatrix> {
    let split = Split::new(params);
    let s = propagate(&split, split.omega(), z);
    let det = (-I * split.half_trace * (2.0 * z)).exp();
    ScatteringMatrix::with_determinant(s, z, det)
}

/// One independently evaluated scattering matrix per grid point.
pub fn scattering_curve(
    params: &CouplerParams,
    grid: &PropagationGrid,
) -> Result<Vec<ScatteringMatrix>> {
    grid.points()
        .map(|z| scattering_matrix(params, z))
        .collect()
}
