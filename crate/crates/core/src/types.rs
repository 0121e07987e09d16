//! Value types shared by every other module.
//!
//! All of them validate on construction and are immutable afterwards, so a
//! value that exists is a value that satisfies its invariants.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest singular value a scattering matrix may have before it is treated
/// as amplifying.
pub const PASSIVITY_TOLERANCE: f64 = 1e-9;

/// Tolerance for the z = 0 value of a normalized curve.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

fn check_finite(field: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(field))
    }
}

/// Parameters of the two-waveguide coupler: propagation constants, coupling
/// and the loss rate of the second guide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    beta1: f64,
    beta2: f64,
    kappa: f64,
    gamma: f64,
}

impl CouplerParams {
    /// Checked constructor. Rejects non-finite fields, `kappa <= 0` and
    /// `gamma < 0`.
    pub fn new(beta1: f64, beta2: f64, kappa: f64, gamma: f64) -> Result<Self> {
        check_finite("beta1", beta1)?;
        check_finite("beta2", beta2)?;
        check_finite("kappa", kappa)?;
        check_finite("gamma", gamma)?;
        if kappa <= 0.0 {
            return Err(Error::NonPositiveKappa);
        }
        if gamma < 0.0 {
            return Err(Error::NegativeGamma);
        }
        Ok(Self {
            beta1,
            beta2,
            kappa,
            gamma,
        })
    }

    /// Degenerate coupler (`beta1 = beta2 = 0`).
    pub fn symmetric(kappa: f64, gamma: f64) -> Result<Self> {
        Self::new(0.0, 0.0, kappa, gamma)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.beta1, self.beta2, self.kappa, gamma)
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Dense 2x2 complex matrix, indexed `(row, col)` from zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2 {
    m: [[Complex64; 2]; 2],
}

impl ComplexMatrix2 {
    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Result<Self> {
        let m = [[m11, m12], [m21, m22]];
        if m.iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
        {
            Ok(Self { m })
        } else {
            Err(Error::NonFinite("matrix entry"))
        }
    }

    pub(crate) fn from_rows(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::from_rows([[one, zero], [zero, one]])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn rows(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_rows(self.m.map(|row| row.map(|x| x * c)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_rows([[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]])
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Sum of squared moduli of all entries.
    pub fn frobenius_sq(&self) -> f64 {
        self.m.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Singular values `(largest, smallest)`, using `det` as the determinant.
    pub(crate) fn singular_values_with_det(&self, det: Complex64) -> (f64, f64) {
        // eigenvalues of the Gram matrix [[p, q], [q*, r]]
        let [[a, b], [c, d]] = self.m;
        let p = a.norm_sqr() + c.norm_sqr();
        let r = b.norm_sqr() + d.norm_sqr();
        let q = a.conj() * b + c.conj() * d;
        let hi = 0.5 * (p + r) + (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
        let lo = if hi > 0.0 { det.norm_sqr() / hi } else { 0.0 };
        (hi.sqrt(), lo.sqrt())
    }

    pub fn singular_values(&self) -> (f64, f64) {
        self.singular_values_with_det(self.det())
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self.m;
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x += rhs.m[r][c];
            }
        }
        Self::from_rows(m)
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::from_rows([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Single-photon amplitudes `S_{n,l}(z)` restricted to the two coupler
/// guides, at propagation distance `z`.
///
/// The determinant is stored next to the entries. Backends that know it in
/// closed form (the Markovian propagator, where `det S = exp(-i z tr M)`)
/// provide it directly; for strongly damped matrices it is many orders of
/// magnitude below the products of entries it would otherwise be computed
/// from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    s: ComplexMatrix2,
    z: f64,
    det: Complex64,
}

impl ScatteringMatrix {
    /// Wraps `s`, rejecting `z < 0` and matrices with a singular value above
    /// `1 + PASSIVITY_TOLERANCE`.
    pub fn new(s: ComplexMatrix2, z: f64) -> Result<Self> {
        Self::with_determinant(s, z, s.det())
    }

    pub(crate) fn with_determinant(s: ComplexMatrix2, z: f64, det: Complex64) -> Result<Self> {
        check_finite("z", z)?;
        if z < 0.0 {
            return Err(Error::invalid("z", "must be non-negative"));
        }
        let (hi, _) = s.singular_values_with_det(det);
        if hi > 1.0 + PASSIVITY_TOLERANCE {
            return Err(Error::NotPassive(hi));
        }
        Ok(Self { s, z, det })
    }

    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.s
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn det(&self) -> Complex64 {
        self.det
    }

    pub fn s11(&self) -> Complex64 {
        self.s.get(0, 0)
    }

    pub fn s12(&self) -> Complex64 {
        self.s.get(0, 1)
    }

    pub fn s21(&self) -> Complex64 {
        self.s.get(1, 0)
    }

    pub fn s22(&self) -> Complex64 {
        self.s.get(1, 1)
    }

    pub fn singular_values(&self) -> (f64, f64) {
        self.s.singular_values_with_det(self.det)
    }
}

/// Uniform grid `0, z_max/(n-1), ..., z_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationGrid {
    z_max: f64,
    num_points: usize,
}

impl PropagationGrid {
    pub fn new(z_max: f64, num_points: usize) -> Result<Self> {
        check_finite("z_max", z_max)?;
        if z_max <= 0.0 {
            return Err(Error::invalid("z_max", "must be positive"));
        }
        if num_points < 2 {
            return Err(Error::invalid("num_points", "must be at least 2"));
        }
        Ok(Self { z_max, num_points })
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn point(&self, i: usize) -> f64 {
        let last = self.num_points - 1;
        if i == last {
            self.z_max
        } else {
            self.z_max * i as f64 / last as f64
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.num_points).map(move |i| self.point(i))
    }
}

/// A labelled `(z, value)` series starting at `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    label: String,
    points: Vec<(f64, f64)>,
}

impl DecayCurve {
    /// Requires strictly increasing `z` starting at exactly 0, and finite,
    /// non-negative values. Labels may not contain commas or line breaks.
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() || label.contains([',', '\n', '\r']) {
            return Err(Error::invalid(
                "label",
                "must be non-empty and free of commas and line breaks",
            ));
        }
        if points.first().map(|p| p.0) != Some(0.0) {
            return Err(Error::invalid("points", "first z must be exactly 0"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].0.is_finite()) {
                return Err(Error::invalid("points", "z must be strictly increasing"));
            }
        }
        if points.iter().any(|&(_, v)| !v.is_finite() || v < 0.0) {
            return Err(Error::invalid(
                "points",
                "values must be finite and non-negative",
            ));
        }
        Ok(Self { label, points })
    }

    /// As [`DecayCurve::new`], additionally requiring the z = 0 value to be
    /// 1 within [`NORMALIZATION_TOLERANCE`].
    pub fn normalized(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        let curve = Self::new(label, points)?;
        let v0 = curve.points[0].1;
        if (v0 - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::invalid(
                "points",
                format!("normalized curve starts at {v0}, expected 1"),
            ));
        }
        Ok(curve)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn zs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Relative phase of the polarization-entangled input, in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntanglementPhase(f64);

impl EntanglementPhase {
    pub fn new(phi: f64) -> Result<Self> {
        check_finite("phi", phi)?;
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::invalid("phi", "must lie in [0, pi]"));
        }
        Ok(Self(phi))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Two-photon input states with one photon launched into each guide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoPhotonInput {
    /// Both photons share one polarization.
    Indistinguishable,
    /// `(|1H, 2V> + e^{i phi} |1V, 2H>) / sqrt 2`; `phi = 0` behaves
    /// bosonically, `phi = pi` fermionically.
    PolarizationEntangled(EntanglementPhase),
}

impl TwoPhotonInput {
    pub fn entangled(phi: f64) -> Result<Self> {
        EntanglementPhase::new(phi).map(Self::PolarizationEntangled)
    }

    pub fn fermionic() -> Self {
        Self::PolarizationEntangled(EntanglementPhase(PI))
    }
}

impl fmt::Display for TwoPhotonInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Indistinguishable => write!(f, "indistinguishable"),
            Self::PolarizationEntangled(phi) => write!(f, "entangled(phi={})", phi.radians()),
        }
    }
}

/// Classical launch conditions. Both carry unit total power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalInput {
    /// All power in guide 1, one polarization.
    SingleWaveguide,
    /// Half the power in guide 1 polarized H, half in guide 2 polarized V.
    BalancedOrthogonal,
}

impl ClassicalInput {
    /// `(power fraction, unit amplitudes)` per polarization channel.
    /// Channels propagate with the same matrix and never mix.
    pub fn channels(self) -> Vec<(f64, [Complex64; 2])> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            Self::SingleWaveguide => vec![(1.0, [one, zero])],
            Self::BalancedOrthogonal => vec![(0.5, [one, zero]), (0.5, [zero, one])],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SingleWaveguide => "single_waveguide",
            Self::BalancedOrthogonal => "balanced_orthogonal",
        }
    }
}
