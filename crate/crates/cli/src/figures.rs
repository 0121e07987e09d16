use std::f64::consts::PI;

use ep_coupler::classical::{classical_power_curve, classify_ep};
use ep_coupler::quantum::{
    mean_photon_number, survival_curve, survival_entangled, Backend, Propagator,
};
use ep_coupler::reservoir::{lattice_gamma, min_lattice_size, LatticeReservoir, DEFAULT_SAFETY};
use ep_coupler::scattering::scattering_matrix;
use ep_coupler::table::CurveTable;
use ep_coupler::{
    ClassicalInput, CouplerParams, DecayCurve, EntanglementPhase, PropagationGrid, TwoPhotonInput,
};

use crate::{num, CliError, FigArgs, Result};

type Files = Vec<(String, CurveTable)>;

fn reject_unused(cmd: &str, flags: &[(&str, bool)]) -> Result<()> {
    match flags.iter().find(|(_, set)| *set) {
        Some((flag, _)) => Err(CliError::Validation(format!(
            "{flag} does not apply to {cmd}"
        ))),
        None => Ok(()),
    }
}

fn check_kappa(a: &FigArgs) -> Result<f64> {
    if !(a.kappa > 0.0 && a.kappa.is_finite()) {
        return Err(CliError::Validation(format!(
            "--kappa must be positive, got {}",
            a.kappa
        )));
    }
    Ok(a.kappa)
}

fn gammas(a: &FigArgs, defaults: &[f64]) -> Vec<f64> {
    match a.gamma {
        Some(g) => vec![g],
        None => defaults.iter().map(|g| g * a.kappa).collect(),
    }
}

fn phases(a: &FigArgs) -> Result<Vec<f64>> {
    let phis = match a.phi {
        Some(p) => vec![p],
        None => vec![0.0, 2.0 * PI / 3.0, PI],
    };
    for &p in &phis {
        EntanglementPhase::new(p)?;
    }
    Ok(phis)
}

fn grid(a: &FigArgs, z_max: f64, points: usize) -> Result<PropagationGrid> {
    Ok(PropagationGrid::new(
        a.zmax.unwrap_or(z_max),
        a.points.unwrap_or(points),
    )?)
}

fn base_meta(t: &mut CurveTable, cmd: &str, a: &FigArgs, backend: &str) -> Result<()> {
    t.push_meta("command", cmd)?;
    t.push_meta("version", env!("CARGO_PKG_VERSION"))?;
    t.push_meta("backend", backend)?;
    t.push_meta("kappa", num(a.kappa))?;
    t.push_meta("beta1", num(a.beta1))?;
    t.push_meta("beta2", num(a.beta2))?;
    Ok(())
}

fn ep_meta(t: &mut CurveTable, p: &CouplerParams) -> Result<()> {
    if let Ok(status) = classify_ep(p) {
        t.push_meta("ep_regime", status.regime.name())?;
    }
    Ok(())
}

/// Balanced and single-guide classical power per loss rate.
pub fn fig2(a: &FigArgs) -> Result<Files> {
    reject_unused(
        "fig2",
        &[
            ("--phi", a.phi.is_some()),
            ("--sigma", a.sigma.is_some()),
            ("--rho", a.rho.is_some()),
            ("--nsites", a.nsites.is_some()),
        ],
    )?;
    let kappa = check_kappa(a)?;
    let grid = grid(a, 10.0 / kappa, 501)?;
    let mut files = Vec::new();
    for gamma in gammas(a, &[0.5, 2.0, 10.0]) {
        let p = CouplerParams::new(a.beta1, a.beta2, kappa, gamma)?;
        let solid = classical_power_curve(&p, ClassicalInput::BalancedOrthogonal, &grid)?;
        let dashed = classical_power_curve(&p, ClassicalInput::SingleWaveguide, &grid)?;
        let mut t = CurveTable::from_curves(&[&solid, &dashed])?;
        base_meta(&mut t, "fig2", a, "markovian")?;
        t.push_meta("gamma", num(gamma))?;
        ep_meta(&mut t, &p)?;
        t.push_meta("normalization", "P(0)=1")?;
        files.push((format!("fig2_gamma_{}.csv", num(gamma)), t));
    }
    Ok(files)
}

/// Indistinguishable-input survival next to half the mean photon number.
pub fn fig3(a: &FigArgs) -> Result<Files> {
    reject_unused(
        "fig3",
        &[
            ("--phi", a.phi.is_some()),
            ("--sigma", a.sigma.is_some()),
            ("--rho", a.rho.is_some()),
            ("--nsites", a.nsites.is_some()),
        ],
    )?;
    let kappa = check_kappa(a)?;
    let grid = grid(a, 10.0 / kappa, 501)?;
    let mut files = Vec::new();
    for gamma in gammas(a, &[0.5, 2.0, 10.0]) {
        let p = CouplerParams::new(a.beta1, a.beta2, kappa, gamma)?;
        let survival = survival_curve(
            &p,
            TwoPhotonInput::Indistinguishable,
            &grid,
            &Backend::Markovian,
        )?;
        let prop = Propagator::new(&p, &Backend::Markovian)?;
        let half_n = grid
            .points()
            .map(|z| Ok((z, mean_photon_number(&prop.at(z)?) / 2.0)))
            .collect::<Result<Vec<_>>>()?;
        let half_n = DecayCurve::new("half_mean_photon_number", half_n)?;
        let mut t = CurveTable::from_curves(&[&survival, &half_n])?;
        base_meta(&mut t, "fig3", a, "markovian")?;
        t.push_meta("gamma", num(gamma))?;
        ep_meta(&mut t, &p)?;
        t.push_meta("input", TwoPhotonInput::Indistinguishable)?;
        files.push((format!("fig3_gamma_{}.csv", num(gamma)), t));
    }
    Ok(files)
}

/// Panel (a): survival versus z per loss rate and phase.
/// Panel (b): survival at `kappa z0 = 3` versus loss rate.
pub fn fig4(a: &FigArgs) -> Result<Files> {
    reject_unused(
        "fig4",
        &[
            ("--sigma", a.sigma.is_some()),
            ("--rho", a.rho.is_some()),
            ("--nsites", a.nsites.is_some()),
        ],
    )?;
    let kappa = check_kappa(a)?;
    let phis = phases(a)?;
    let grid = grid(a, 10.0 / kappa, 501)?;
    let mut files = Vec::new();
    for gamma in gammas(a, &[0.625, 2.5]) {
        let p = CouplerParams::new(a.beta1, a.beta2, kappa, gamma)?;
        let curves = phis
            .iter()
            .map(|&phi| {
                survival_curve(
                    &p,
                    TwoPhotonInput::entangled(phi)?,
                    &grid,
                    &Backend::Markovian,
                )
            })
            .collect::<ep_coupler::Result<Vec<_>>>()?;
        let mut t = CurveTable::from_curves(&curves.iter().collect::<Vec<_>>())?;
        base_meta(&mut t, "fig4a", a, "markovian")?;
        t.push_meta("gamma", num(gamma))?;
        ep_meta(&mut t, &p)?;
        t.push_meta("scale", "linear")?;
        files.push((format!("fig4a_gamma_{}.csv", num(gamma)), t));
    }

    let z0 = 3.0 / kappa;
    let n_gamma = 201;
    let gamma_max = 5.0 * kappa;
    let mut t = CurveTable::new(
        std::iter::once("gamma".to_string())
            .chain(phis.iter().map(|p| format!("survival_phi={}", num(*p)))),
    )?;
    base_meta(&mut t, "fig4b", a, "markovian")?;
    t.push_meta("z0", num(z0))?;
    t.push_meta("z0_convention", "kappa*z0=3")?;
    for i in 0..n_gamma {
        let gamma = gamma_max * i as f64 / (n_gamma - 1) as f64;
        let s = scattering_matrix(&CouplerParams::new(a.beta1, a.beta2, kappa, gamma)?, z0)?;
        let mut row = vec![gamma];
        for &phi in &phis {
            row.push(survival_entangled(&s, EntanglementPhase::new(phi)?));
        }
        t.push_row(row)?;
    }
    files.push(("fig4b.csv".to_string(), t));
    Ok(files)
}

/// Exact lattice survival (`lattice`) against the Markovian model with
/// `gamma = rho^2 / (2 sigma)` (`markovian`).
pub fn fig5(a: &FigArgs) -> Result<Files> {
    reject_unused("fig5", &[("--gamma", a.gamma.is_some())])?;
    let kappa = check_kappa(a)?;
    let sigma = a.sigma.unwrap_or(20.0 * kappa);
    let rhos = match a.rho {
        Some(r) => vec![r],
        None => vec![5.0 * kappa, 10.0 * kappa],
    };
    let phi = a.phi.unwrap_or(PI);
    let input = TwoPhotonInput::entangled(phi)?;
    let grid = grid(a, 3.0 / kappa, 301)?;
    let n_sites = match a.nsites {
        Some(n) => n,
        None => min_lattice_size(sigma, grid.z_max(), DEFAULT_SAFETY)?,
    };
    let lossless = CouplerParams::new(a.beta1, a.beta2, kappa, 0.0)?;
    let mut files = Vec::new();
    for rho in rhos {
        let gamma = lattice_gamma(sigma, rho)?;
        let lattice = LatticeReservoir::new(sigma, rho, n_sites, 0.0)?;
        let exact = survival_curve(&lossless, input, &grid, &Backend::Lattice(lattice))?;
        let markov = survival_curve(
            &lossless.with_gamma(gamma)?,
            input,
            &grid,
            &Backend::Markovian,
        )?;
        let mut t = CurveTable::new(["z", "lattice", "markovian"])?;
        base_meta(&mut t, "fig5", a, "lattice+markovian")?;
        t.push_meta("sigma", num(sigma))?;
        t.push_meta("rho", num(rho))?;
        t.push_meta("gamma", num(gamma))?;
        t.push_meta("n_sites", n_sites)?;
        t.push_meta("input", input)?;
        for (&(z, e), &(_, m)) in exact.points().iter().zip(markov.points()) {
            t.push_row(vec![z, e, m])?;
        }
        files.push((format!("fig5_rho_{}.csv", num(rho)), t));
    }
    Ok(files)
}
