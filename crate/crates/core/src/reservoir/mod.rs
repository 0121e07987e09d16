//! Loss channel modelled explicitly as a tight-binding waveguide lattice.
//!
//! Guide 2 is evanescently coupled (strength `rho`) to site 1 of a ring of
//! `n_sites` identical guides with nearest-neighbour hopping `sigma`. The
//! ring's Bloch modes form the band `beta_lattice + 2 sigma cos k` and all
//! couple to site 1 with the same weight, which is the discrete version of
//! a flat coupling `g(k) = rho / sqrt(2 pi)` over the whole band. The
//! Markovian loss rate is then `rho^2 / (2 sigma)`.
//!
//! The full system (guide 1, guide 2, lattice) is Hermitian and quadratic,
//! so single-particle propagators determine every multi-photon observable.
//! The exact propagator comes from diagonalizing the single-excitation
//! Hamiltonian. Reflection about site 1 leaves both guides invariant, and
//! only the reflection-even lattice states couple to them; those form a
//! tridiagonal chain of about `n_sites / 2 + 3` states.

mod tridiagonal;

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{ComplexMatrix2, CouplerParams, ScatteringMatrix};

pub use tridiagonal::{eigen as tridiagonal_eigen, TridiagonalEigen};

/// Default margin used by [`min_lattice_size`].
pub const DEFAULT_SAFETY: f64 = 2.5;

/// Number of samples used to bracket resonances in [`golden_rule_gamma`].
const RESONANCE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeReservoir {
    sigma: f64,
    rho: f64,
    n_sites: usize,
    beta_lattice: f64,
}

impl LatticeReservoir {
    pub fn new(sigma: f64, rho: f64, n_sites: usize, beta_lattice: f64) -> Result<Self> {
        if !sigma.is_finite() {
            return Err(Error::NonFinite("sigma"));
        }
        if !rho.is_finite() {
            return Err(Error::NonFinite("rho"));
        }
        if !beta_lattice.is_finite() {
            return Err(Error::NonFinite("beta_lattice"));
        }
        if sigma <= 0.0 {
            return Err(Error::invalid("sigma", "must be positive"));
        }
        if rho < 0.0 {
            return Err(Error::invalid("rho", "must be non-negative"));
        }
        if n_sites == 0 {
            return Err(Error::invalid("n_sites", "must be at least 1"));
        }
        Ok(Self {
            sigma,
            rho,
            n_sites,
            beta_lattice,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn beta_lattice(&self) -> f64 {
        self.beta_lattice
    }

    /// Markovian loss rate this reservoir induces on guide 2.
    pub fn effective_gamma(&self) -> f64 {
        self.rho * self.rho / (2.0 * self.sigma)
    }

    /// The band `beta_lattice + 2 sigma cos k`.
    pub fn band(&self) -> TightBindingBand {
        TightBindingBand {
            center: self.beta_lattice,
            sigma: self.sigma,
        }
    }
}

/// `gamma = rho^2 / (2 sigma)`.
pub fn lattice_gamma(sigma: f64, rho: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma", "must be positive"));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho", "must be non-negative"));
    }
    Ok(rho * rho / (2.0 * sigma))
}

/// A reservoir dispersion relation on `k in [-pi, pi)`.
pub trait Dispersion {
    fn propagation_constant(&self, k: f64) -> f64;
    /// `d beta / dk`.
    fn slope(&self, k: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightBindingBand {
    pub center: f64,
    pub sigma: f64,
}

impl Dispersion for TightBindingBand {
    fn propagation_constant(&self, k: f64) -> f64 {
        self.center + 2.0 * self.sigma * k.cos()
    }

    fn slope(&self, k: f64) -> f64 {
        -2.0 * self.sigma * k.sin()
    }
}

/// `(beta, beta')` closure pairs.
impl<F, G> Dispersion for (F, G)
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn propagation_constant(&self, k: f64) -> f64 {
        (self.0)(k)
    }

    fn slope(&self, k: f64) -> f64 {
        (self.1)(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRule {
    pub gamma: f64,
    /// Resonant wavenumbers `k0` with `beta(k0) = beta2`.
    pub resonances: Vec<f64>,
    /// Set when `beta2` lies outside the band: there is no decay channel,
    /// a bound state forms and the Markovian description does not apply.
    pub bound_state: bool,
}

/// Loss rate from the resonance formula
/// `gamma = pi * sum_{k0} |g(k0)|^2 / |beta'(k0)|`, i.e. the real part of
/// the memory-kernel integral. The Lamb shift is dropped.
pub fn golden_rule_gamma<D, G>(dispersion: &D, coupling: G, beta2: f64) -> GoldenRule
where
    D: Dispersion + ?Sized,
    G: Fn(f64) -> f64,
{
    let detuning = |k: f64| dispersion.propagation_constant(k) - beta2;
    let step = 2.0 * PI / RESONANCE_SAMPLES as f64;
    let mut resonances = Vec::new();
    let mut lo = -PI;
    let mut f_lo = detuning(lo);
    for j in 1..=RESONANCE_SAMPLES {
        let hi = if j == RESONANCE_SAMPLES {
            PI
        } else {
            -PI + step * j as f64
        };
        let f_hi = detuning(hi);
        if f_lo == 0.0 {
            resonances.push(lo);
        } else if f_lo * f_hi < 0.0 {
            resonances.push(bisect(&detuning, lo, hi, f_lo));
        }
        lo = hi;
        f_lo = f_hi;
    }
    let gamma = resonances
        .iter()
        .map(|&k| {
            let g = coupling(k);
            PI * g * g / dispersion.slope(k).abs()
        })
        .sum();
    GoldenRule {
        gamma,
        bound_state: resonances.is_empty(),
        resonances,
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

/// Lattice size for which nothing launched from site 1 comes back before
/// `z_max`: the fastest Bloch waves travel `2 sigma` sites per unit length.
/// Returns `ceil(safety * 2 sigma * z_max) + 10`.
pub fn min_lattice_size(sigma: f64, z_max: f64, safety: f64) -> Result<usize> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma", "must be positive"));
    }
    if !(z_max > 0.0 && z_max.is_finite()) {
        return Err(Error::invalid("z_max", "must be positive"));
    }
    if !(safety >= 1.0 && safety.is_finite()) {
        return Err(Error::invalid("safety", "must be at least 1"));
    }
    Ok((safety * 2.0 * sigma * z_max).ceil() as usize + 10)
}

fn check_lossless(params: &CouplerParams) -> Result<()> {
    if params.gamma() != 0.0 {
        return Err(Error::IntrinsicLossWithReservoir);
    }
    Ok(())
}

/// Single-excitation Hamiltonian of guides plus lattice, basis order
/// `(W1, W2, site 1, ..., site N)`. The lattice closes into a ring for
/// `N >= 3`.
pub fn full_hamiltonian(
    params: &CouplerParams,
    lattice: &LatticeReservoir,
) -> Result<DMatrix<f64>> {
    check_lossless(params)?;
    let n = lattice.n_sites;
    let mut h = DMatrix::zeros(n + 2, n + 2);
    h[(0, 0)] = params.beta1();
    h[(1, 1)] = params.beta2();
    h[(0, 1)] = params.kappa();
    h[(1, 0)] = params.kappa();
    h[(1, 2)] = lattice.rho;
    h[(2, 1)] = lattice.rho;
    for j in 0..n {
        h[(2 + j, 2 + j)] = lattice.beta_lattice;
    }
    let mut bond = |a: usize, b: usize| {
        h[(2 + a, 2 + b)] = lattice.sigma;
        h[(2 + b, 2 + a)] = lattice.sigma;
    };
    for j in 0..n.saturating_sub(1) {
        bond(j, j + 1);
    }
    if n >= 3 {
        bond(n - 1, 0);
    }
    Ok(h)
}

/// How a reduced-chain state maps back onto lattice sites (0-based).
#[derive(Debug, Clone, Copy)]
enum SiteImage {
    Single(usize),
    Pair(usize, usize),
}

/// Reflection-even sector: diagonal, off-diagonal, and the site image of
/// every lattice state in it (reduced index `2 + i` for `images[i]`).
fn even_sector(
    params: &CouplerParams,
    lattice: &LatticeReservoir,
) -> (Vec<f64>, Vec<f64>, Vec<SiteImage>) {
    let n = lattice.n_sites;
    let (bl, s) = (lattice.beta_lattice, lattice.sigma);
    let mut diag = vec![params.beta1(), params.beta2(), bl];
    let mut off = vec![params.kappa(), lattice.rho];
    let mut images = vec![SiteImage::Single(0)];
    if n == 2 {
        diag.push(bl);
        off.push(s);
        images.push(SiteImage::Single(1));
    } else if n >= 3 {
        let pairs = (n - 1) / 2;
        for r in 1..=pairs {
            diag.push(bl);
            off.push(if r == 1 { SQRT_2 * s } else { s });
            images.push(SiteImage::Pair(r, n - r));
        }
        if n.is_multiple_of(2) {
            diag.push(bl);
            off.push(SQRT_2 * s);
            images.push(SiteImage::Single(n / 2));
        } else {
            // the two members of the last pair are neighbours
            *diag.last_mut().unwrap() += s;
        }
    }
    (diag, off, images)
}

/// Amplitudes over the whole system, ordered `(W1, W2, site 1, ..., site N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullSystemState {
    pub amplitudes: Vec<Complex64>,
}

impl FullSystemState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Diagonalized guide-plus-lattice system. Build once, then evaluate the
/// propagator at any distance.
#[derive(Debug, Clone)]
pub struct LatticeCoupler {
    lattice: LatticeReservoir,
    energies: Vec<f64>,
    /// Eigenvector rows in the reduced basis; the first two are W1 and W2.
    rows: Vec<Vec<f64>>,
    images: Vec<SiteImage>,
}

impl LatticeCoupler {
    /// Spectral data needed for the 2x2 scattering matrix only.
    pub fn new(params: &CouplerParams, lattice: &LatticeReservoir) -> Result<Self> {
        Self::build(params, lattice, false)
    }

    /// Keeps every eigenvector row so [`LatticeCoupler::evolve`] can resolve
    /// the lattice amplitudes. Cubic in the lattice size.
    pub fn with_full_basis(params: &CouplerParams, lattice: &LatticeReservoir) -> Result<Self> {
        Self::build(params, lattice, true)
    }

    fn build(params: &CouplerParams, lattice: &LatticeReservoir, full: bool) -> Result<Self> {
        check_lossless(params)?;
        let (diag, off, images) = even_sector(params, lattice);
        let rows: Vec<usize> = if full {
            (0..diag.len()).collect()
        } else {
            vec![0, 1]
        };
        let eig = tridiagonal_eigen(&diag, &off, &rows)?;
        Ok(Self {
            lattice: *lattice,
            energies: eig.values,
            rows: eig.rows,
            images,
        })
    }

    pub fn lattice(&self) -> &LatticeReservoir {
        &self.lattice
    }

    fn phases(&self, z: f64) -> Vec<Complex64> {
        self.energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * z))
            .collect()
    }

    fn element(&self, a: usize, b: usize, phases: &[Complex64]) -> Complex64 {
        self.rows[a]
            .iter()
            .zip(&self.rows[b])
            .zip(phases)
            .map(|((&va, &vb), &ph)| ph * (va * vb))
            .sum()
    }

    /// `S_{n,l}(z) = <n| exp(-i H z) |l>` for `n, l` in the two guides.
    pub fn scattering(&self, z: f64) -> Result<ScatteringMatrix> {
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::invalid("z", "must be finite and non-negative"));
        }
        if z == 0.0 {
            return ScatteringMatrix::new(ComplexMatrix2::identity(), 0.0);
        }
        let ph = self.phases(z);
        let s11 = self.element(0, 0, &ph);
        let s12 = self.element(0, 1, &ph);
        let s22 = self.element(1, 1, &ph);
        ScatteringMatrix::new(ComplexMatrix2::from_rows([[s11, s12], [s12, s22]]), z)
    }

    /// Full-system state at `z` after launching one photon into guide
    /// `guide` (0 or 1). Requires [`LatticeCoupler::with_full_basis`].
    pub fn evolve(&self, guide: usize, z: f64) -> Result<FullSystemState> {
        if guide > 1 {
            return Err(Error::invalid("guide", "must be 0 or 1"));
        }
        if self.rows.len() != self.energies.len() {
            return Err(Error::invalid(
                "basis",
                "full-system evolution needs LatticeCoupler::with_full_basis",
            ));
        }
        let ph = self.phases(z);
        let reduced: Vec<Complex64> = (0..self.rows.len())
            .map(|j| self.element(j, guide, &ph))
            .collect();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.lattice.n_sites + 2];
        amplitudes[0] = reduced[0];
        amplitudes[1] = reduced[1];
        for (image, &amp) in self.images.iter().zip(&reduced[2..]) {
            match *image {
                SiteImage::Single(site) => amplitudes[2 + site] = amp,
                SiteImage::Pair(a, b) => {
                    amplitudes[2 + a] = amp / SQRT_2;
                    amplitudes[2 + b] = amp / SQRT_2;
                }
            }
        }
        Ok(FullSystemState { amplitudes })
    }
}

/// Exact (non-Markovian) scattering matrix of the guides at distance `z`.
pub fn nonmarkovian_scattering(
    params: &CouplerParams,
    lattice: &LatticeReservoir,
    z: f64,
) -> Result<ScatteringMatrix> {
    LatticeCoupler::new(params, lattice)?.scattering(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::scattering_matrix;

    fn lossless() -> CouplerParams {
        CouplerParams::symmetric(1.0, 0.0).unwrap()
    }

    /// exp(-i H z) of a real symmetric matrix via nalgebra.
    fn dense_propagator(h: &DMatrix<f64>, z: f64) -> DMatrix<Complex64> {
        let eig = h.clone().symmetric_eigen();
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let d =
            DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * z)));
        &v * d * v.transpose()
    }

    #[test]
    fn lattice_gamma_examples() {
        assert_eq!(lattice_gamma(20.0, 5.0).unwrap(), 0.625);
        assert_eq!(lattice_gamma(20.0, 10.0).unwrap(), 2.5);
        assert_eq!(lattice_gamma(3.0, 0.0).unwrap(), 0.0);
        assert!(lattice_gamma(0.0, 1.0).is_err());
        assert!(lattice_gamma(-1.0, 1.0).is_err());
    }

    #[test]
    fn golden_rule_reproduces_lattice_gamma() {
        for (sigma, rho) in [(20.0, 5.0), (20.0, 10.0), (1.0, 0.3), (160.0, 17.0)] {
            let band = TightBindingBand { center: 0.0, sigma };
            let g = rho / (2.0 * PI).sqrt();
            let gr = golden_rule_gamma(&band, |_| g, 0.0);
            let want = lattice_gamma(sigma, rho).unwrap();
            assert!(
                ((gr.gamma - want) / want).abs() < 1e-12,
                "{} vs {}",
                gr.gamma,
                want
            );
            assert_eq!(gr.resonances.len(), 2);
            assert!(!gr.bound_state);
        }
    }

    #[test]
    fn golden_rule_with_closures_and_edge_cases() {
        let sigma = 2.0;
        let band = (
            |k: f64| 2.0 * sigma * k.cos(),
            |k: f64| -2.0 * sigma * k.sin(),
        );
        assert_eq!(golden_rule_gamma(&band, |_| 0.0, 0.0).gamma, 0.0);
        let gr = golden_rule_gamma(&band, |_| 1.0, 3.0 * sigma);
        assert_eq!(gr.gamma, 0.0);
        assert!(gr.bound_state);
        // off-centre resonance: pi |g|^2 / |beta'| summed over k0 = +-acos(x)
        let gr = golden_rule_gamma(&band, |_| 1.0, 2.0);
        let k0 = (0.5f64).acos();
        let want = 2.0 * PI / (2.0 * sigma * k0.sin());
        assert!((gr.gamma - want).abs() < 1e-12);
    }

    #[test]
    fn min_size_examples() {
        assert_eq!(min_lattice_size(20.0, 3.0, 2.5).unwrap(), 310);
        assert_eq!(min_lattice_size(1.0, 1.0, 1.0).unwrap(), 12);
        let a = min_lattice_size(20.0, 3.0, 2.5).unwrap() - 10;
        let b = min_lattice_size(20.0, 3.0, 5.0).unwrap() - 10;
        assert_eq!(b, 2 * a);
        assert!(min_lattice_size(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn hamiltonian_structure() {
        let p = CouplerParams::new(0.5, -0.5, 1.0, 0.0).unwrap();
        let l = LatticeReservoir::new(3.0, 2.0, 1, 0.25).unwrap();
        let h = full_hamiltonian(&p, &l).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0.5, 1.0, 0.0, 1.0, -0.5, 2.0, 0.0, 2.0, 0.25]);
        assert_eq!(h, want);

        let l = LatticeReservoir::new(3.0, 0.0, 6, 0.0).unwrap();
        let h = full_hamiltonian(&p, &l).unwrap();
        assert_eq!(h, h.transpose());
        for i in 0..2 {
            for j in 2..8 {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        assert_eq!(h[(7, 2)], 3.0);

        let lossy = CouplerParams::symmetric(1.0, 0.5).unwrap();
        let err = full_hamiltonian(&lossy, &l).unwrap_err();
        assert_eq!(
            err.to_string(),
            "intrinsic loss and explicit reservoir are mutually exclusive"
        );
        assert!(LatticeCoupler::new(&lossy, &l).is_err());
    }

    #[test]
    fn reduced_chain_matches_dense_evolution() {
        let p = CouplerParams::new(0.2, -0.1, 1.0, 0.0).unwrap();
        for n in 1..=12 {
            let l = LatticeReservoir::new(1.7, 1.3, n, 0.4).unwrap();
            let h = full_hamiltonian(&p, &l).unwrap();
            let sys = LatticeCoupler::with_full_basis(&p, &l).unwrap();
            for z in [0.0, 0.7, 3.1] {
                let u = dense_propagator(&h, z);
                for guide in 0..2 {
                    let state = sys.evolve(guide, z).unwrap();
                    for (j, a) in state.amplitudes.iter().enumerate() {
                        assert!((a - u[(j, guide)]).norm() < 1e-12, "n={n} z={z} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn decoupled_reservoir_gives_unitary_coupler() {
        let p = lossless();
        let l = LatticeReservoir::new(20.0, 0.0, 31, 0.0).unwrap();
        for z in [0.0, 0.4, 2.9] {
            let a = nonmarkovian_scattering(&p, &l, z).unwrap();
            let b = scattering_matrix(&p, z).unwrap();
            assert!((*a.matrix() - *b.matrix()).max_abs() < 1e-10);
        }
    }

    #[test]
    fn identity_at_zero_distance() {
        let l = LatticeReservoir::new(20.0, 10.0, 310, 0.0).unwrap();
        let s = nonmarkovian_scattering(&lossless(), &l, 0.0).unwrap();
        assert!((*s.matrix() - ComplexMatrix2::identity()).max_abs() < 1e-13);
    }

    #[test]
    fn evolve_requires_full_basis() {
        let l = LatticeReservoir::new(2.0, 1.0, 10, 0.0).unwrap();
        let sys = LatticeCoupler::new(&lossless(), &l).unwrap();
        assert!(sys.evolve(0, 1.0).is_err());
    }

    #[test]
    fn detuned_guide_keeps_a_bound_fraction() {
        // beta2 three half-bandwidths above band centre: no resonance, and
        // the exact evolution keeps a finite population in guide 2
        let sigma = 2.0;
        let p = CouplerParams::new(0.0, 3.0 * sigma, 0.01, 0.0).unwrap();
        let l = LatticeReservoir::new(sigma, 1.5, 401, 0.0).unwrap();
        let gr = golden_rule_gamma(&l.band(), |_| l.rho() / (2.0 * PI).sqrt(), p.beta2());
        assert!(gr.bound_state && gr.gamma == 0.0);
        let sys = LatticeCoupler::new(&p, &l).unwrap();
        let s = sys.scattering(30.0).unwrap();
        assert!(s.s22().norm_sqr() > 0.5);
    }

    #[test]
    fn rejects_bad_reservoirs() {
        assert!(LatticeReservoir::new(0.0, 1.0, 5, 0.0).is_err());
        assert!(LatticeReservoir::new(1.0, -1.0, 5, 0.0).is_err());
        assert!(LatticeReservoir::new(1.0, 1.0, 0, 0.0).is_err());
        assert!(LatticeReservoir::new(1.0, f64::NAN, 5, 0.0).is_err());
    }
}
