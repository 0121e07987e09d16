//! Independent reference computations used by the integration tests.

#![allow(dead_code)]

use ep_coupler::{ComplexMatrix2, ScatteringMatrix};
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense `exp(A)` by scaling and squaring with a Taylor core.
pub fn expm_oracle(a: &ComplexMatrix2) -> ComplexMatrix2 {
    let norm = a.max_abs() * 2.0;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let small = a.scale(c(scale, 0.0));
    let mut term = ComplexMatrix2::identity();
    let mut sum = ComplexMatrix2::identity();
    for k in 1..=20 {
        term = (term * small).scale(c(1.0 / k as f64, 0.0));
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `exp(-i M z)` through [`expm_oracle`].
pub fn propagator_oracle(m: &ComplexMatrix2, z: f64) -> ComplexMatrix2 {
    expm_oracle(&m.scale(c(0.0, -z)))
}

fn random_unitary(rng: &mut impl Rng) -> ComplexMatrix2 {
    // Euler-angle parametrization of U(2)
    let theta = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let (a, b, d, g) = (
        rng.random_range(-3.2..3.2),
        rng.random_range(-3.2..3.2),
        rng.random_range(-3.2..3.2),
        rng.random_range(-3.2..3.2),
    );
    let (ct, st) = (theta.cos(), theta.sin());
    let ph = Complex64::from_polar(1.0, g);
    ComplexMatrix2::new(
        ph * Complex64::from_polar(ct, a),
        ph * Complex64::from_polar(st, b),
        ph * Complex64::from_polar(-st, d - b),
        ph * Complex64::from_polar(ct, d - a),
    )
    .unwrap()
}

/// `U diag(s1, s2) V` with singular values in `[0, 1]`.
pub fn random_passive(rng: &mut impl Rng) -> ScatteringMatrix {
    let u = random_unitary(rng);
    let v = random_unitary(rng);
    let s1 = rng.random_range(0.0..=1.0);
    let s2 = rng.random_range(0.0..=1.0);
    let d = ComplexMatrix2::new(c(s1, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s2, 0.0)).unwrap();
    ScatteringMatrix::new(u * d * v, rng.random_range(0.0..10.0)).unwrap()
}

/// Entangled-input survival written term by term from its product form.
pub fn survival_entangled_literal(s: &ScatteringMatrix, phi: f64) -> f64 {
    let (s11, s12, s21, s22) = (s.s11(), s.s12(), s.s21(), s.s22());
    let half = (phi / 2.0).cos();
    let cross = s11 * s22 * s12.conj() * s21.conj();
    2.0 * half * half * ((s11 * s12).norm_sqr() + (s21 * s22).norm_sqr())
        + (s11 * s22).norm_sqr()
        + (s12 * s21).norm_sqr()
        + phi.cos() * (cross + cross.conj()).re
}
