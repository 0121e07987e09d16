//! Cartesian parameter sweeps.
//!
//! Config schema (TOML, one level of nesting at most):
//!
//! ```toml
//! backend = "markovian"          # or "lattice"
//! kappa = 1.0
//! beta1 = 0.0
//! beta2 = 0.0
//! gamma = { start = 0.0, stop = 5.0, num = 201 }   # markovian only
//! # rho = [5.0, 10.0]                              # lattice only
//! # sigma = 20.0                                   # lattice only
//! # n_sites = 320                                  # lattice, optional
//! phi = [0.0, 3.141592653589793]                   # default [pi]
//! z = [3.0]
//! classical_input = "balanced_orthogonal"          # or "single_waveguide"
//! observables = ["eigenvalue_gap", "p_fermion"]     # default: all
//! ```
//!
//! Any axis is either an explicit list or a `{ start, stop, num }` table of
//! evenly spaced values including both ends. Rows are ordered with the
//! loss axis (`gamma` or `rho`) outermost, then `phi`, then `z`.
//! `ep_regime` is encoded as -1 (below), 0 (at), 1 (above). With the
//! lattice backend, `ep_regime` and `eigenvalue_gap` describe the coupler
//! with the effective loss `rho^2 / (2 sigma)`.

use std::f64::consts::PI;
use std::fmt;

use ep_coupler::classical::{classical_power, classify_ep, supermodes, EpRegime};
use ep_coupler::quantum::{
    mean_photon_number, survival_entangled, survival_fermionic, survival_indistinguishable,
    Backend, Propagator,
};
use ep_coupler::reservoir::{lattice_gamma, min_lattice_size, LatticeReservoir, DEFAULT_SAFETY};
use ep_coupler::table::CurveTable;
use ep_coupler::{ClassicalInput, CouplerParams, EntanglementPhase};
use rayon::prelude::*;
use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;

use crate::{num, CliError, Result};

/// Values of one sweep axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Axis(pub Vec<f64>);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Range {
    start: f64,
    stop: f64,
    num: usize,
}

impl Range {
    fn values(&self) -> Vec<f64> {
        match self.num {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl<'de> Deserialize<'de> for Axis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AxisVisitor;

        impl<'de> Visitor<'de> for AxisVisitor {
            type Value = Axis;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, a list of numbers or a { start, stop, num } table")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Axis, E> {
                Ok(Axis(vec![v]))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Axis, E> {
                Ok(Axis(vec![v as f64]))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Axis, A::Error> {
                let mut values = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    values.push(v);
                }
                Ok(Axis(values))
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<Axis, A::Error> {
                let range = Range::deserialize(de::value::MapAccessDeserializer::new(map))?;
                Ok(Axis(range.values()))
            }
        }

        d.deserialize_any(AxisVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Markovian,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    ClassicalPower,
    MeanPhotonNumber,
    PBoson,
    PEntangled,
    PFermion,
    EpRegime,
    EigenvalueGap,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::ClassicalPower,
        Observable::MeanPhotonNumber,
        Observable::PBoson,
        Observable::PEntangled,
        Observable::PFermion,
        Observable::EpRegime,
        Observable::EigenvalueGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::ClassicalPower => "classical_power",
            Observable::MeanPhotonNumber => "mean_photon_number",
            Observable::PBoson => "p_boson",
            Observable::PEntangled => "p_entangled",
            Observable::PFermion => "p_fermion",
            Observable::EpRegime => "ep_regime",
            Observable::EigenvalueGap => "eigenvalue_gap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalLaunch {
    #[default]
    BalancedOrthogonal,
    SingleWaveguide,
}

impl From<ClassicalLaunch> for ClassicalInput {
    fn from(c: ClassicalLaunch) -> Self {
        match c {
            ClassicalLaunch::BalancedOrthogonal => ClassicalInput::BalancedOrthogonal,
            ClassicalLaunch::SingleWaveguide => ClassicalInput::SingleWaveguide,
        }
    }
}

fn default_kappa() -> f64 {
    1.0
}

fn default_phi() -> Axis {
    Axis(vec![PI])
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub backend: BackendKind,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub beta1: f64,
    #[serde(default)]
    pub beta2: f64,
    pub gamma: Option<Axis>,
    pub rho: Option<Axis>,
    pub sigma: Option<f64>,
    pub n_sites: Option<usize>,
    #[serde(default)]
    pub beta_lattice: f64,
    #[serde(default = "default_phi")]
    pub phi: Axis,
    pub z: Axis,
    #[serde(default)]
    pub classical_input: ClassicalLaunch,
    pub observables: Option<Vec<Observable>>,
}

fn invalid(key: &str, reason: impl fmt::Display) -> CliError {
    CliError::Validation(format!("config key `{key}`: {reason}"))
}

fn check_axis(key: &str, axis: &Axis, ok: impl Fn(f64) -> bool, what: &str) -> Result<()> {
    match axis.0.iter().position(|&v| !ok(v)) {
        Some(i) => Err(invalid(
            &format!("{key}[{i}]"),
            format!("{} {what}", axis.0[i]),
        )),
        None => Ok(()),
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| CliError::Validation(format!("config: {e}")))?;
        let config: SweepConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Validation(format!("config: {inner}"))
            } else {
                CliError::Validation(format!("config key `{path}`: {inner}"))
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        CouplerParams::new(self.beta1, self.beta2, self.kappa, 0.0)
            .map_err(|e| invalid("kappa/beta1/beta2", e))?;
        check_axis(
            "z",
            &self.z,
            |z| z >= 0.0 && z.is_finite(),
            "is not a finite non-negative distance",
        )?;
        check_axis(
            "phi",
            &self.phi,
            |p| EntanglementPhase::new(p).is_ok(),
            "is outside [0, pi]",
        )?;
        match self.backend {
            BackendKind::Markovian => {
                let gamma = self
                    .gamma
                    .as_ref()
                    .ok_or_else(|| invalid("gamma", "required by backend \"markovian\""))?;
                check_axis(
                    "gamma",
                    gamma,
                    |g| g >= 0.0 && g.is_finite(),
                    "is not a finite non-negative loss rate",
                )?;
                for key in [
                    ("rho", self.rho.is_some()),
                    ("sigma", self.sigma.is_some()),
                    ("n_sites", self.n_sites.is_some()),
                ] {
                    if key.1 {
                        return Err(invalid(key.0, "only valid with backend \"lattice\""));
                    }
                }
            }
            BackendKind::Lattice => {
                if let Some(gamma) = &self.gamma {
                    if gamma.0.iter().any(|&g| g != 0.0) {
                        return Err(invalid(
                            "gamma",
                            "gamma > 0 is incompatible with backend \"lattice\" (the lattice supplies the loss)",
                        ));
                    }
                }
                let rho = self
                    .rho
                    .as_ref()
                    .ok_or_else(|| invalid("rho", "required by backend \"lattice\""))?;
                check_axis(
                    "rho",
                    rho,
                    |r| r >= 0.0 && r.is_finite(),
                    "is not a finite non-negative coupling",
                )?;
                let sigma = self
                    .sigma
                    .ok_or_else(|| invalid("sigma", "required by backend \"lattice\""))?;
                lattice_gamma(sigma, 0.0).map_err(|e| invalid("sigma", e))?;
                if self.n_sites == Some(0) {
                    return Err(invalid("n_sites", "must be at least 1"));
                }
            }
        }
        if self.beta1 != self.beta2 && self.observables().contains(&Observable::EpRegime) {
            return Err(invalid("observables", "ep_regime needs beta1 == beta2"));
        }
        Ok(())
    }

    pub fn observables(&self) -> Vec<Observable> {
        self.observables
            .clone()
            .unwrap_or_else(|| Observable::ALL.to_vec())
    }

    fn loss_axis(&self) -> (&'static str, &[f64]) {
        match self.backend {
            BackendKind::Markovian => ("gamma", self.gamma.as_ref().map_or(&[][..], |a| &a.0)),
            BackendKind::Lattice => ("rho", self.rho.as_ref().map_or(&[][..], |a| &a.0)),
        }
    }

    fn n_sites(&self) -> Result<usize> {
        if let Some(n) = self.n_sites {
            return Ok(n);
        }
        let z_max = self.z.0.iter().cloned().fold(0.0, f64::max);
        let sigma = self.sigma.unwrap_or(1.0);
        Ok(min_lattice_size(
            sigma,
            if z_max > 0.0 { z_max } else { 1.0 },
            DEFAULT_SAFETY,
        )?)
    }
}

fn regime_code(r: EpRegime) -> f64 {
    match r {
        EpRegime::Below => -1.0,
        EpRegime::At => 0.0,
        EpRegime::Above => 1.0,
    }
}

/// Rows for one value of the loss axis.
fn rows_for(config: &SweepConfig, loss: f64, observables: &[Observable]) -> Result<Vec<Vec<f64>>> {
    let lossless = CouplerParams::new(config.beta1, config.beta2, config.kappa, 0.0)?;
    let (params, backend, effective) = match config.backend {
        BackendKind::Markovian => {
            let p = lossless.with_gamma(loss)?;
            (p, Backend::Markovian, p)
        }
        BackendKind::Lattice => {
            let sigma = config.sigma.expect("validated");
            let lattice =
                LatticeReservoir::new(sigma, loss, config.n_sites()?, config.beta_lattice)?;
            let eff = lossless.with_gamma(lattice_gamma(sigma, loss)?)?;
            (lossless, Backend::Lattice(lattice), eff)
        }
    };
    let prop = Propagator::new(&params, &backend)?;
    let launch: ClassicalInput = config.classical_input.into();
    let mut rows = Vec::with_capacity(config.phi.0.len() * config.z.0.len());
    for &phi in &config.phi.0 {
        let phase = EntanglementPhase::new(phi)?;
        for &z in &config.z.0 {
            let s = prop.at(z)?;
            let mut row = vec![loss, phi, z];
            for obs in observables {
                row.push(match obs {
                    Observable::ClassicalPower => classical_power(&s, launch),
                    Observable::MeanPhotonNumber => mean_photon_number(&s),
                    Observable::PBoson => survival_indistinguishable(&s),
                    Observable::PEntangled => survival_entangled(&s, phase),
                    Observable::PFermion => survival_fermionic(&s),
                    Observable::EpRegime => regime_code(classify_ep(&effective)?.regime),
                    Observable::EigenvalueGap => supermodes(&effective).gap(),
                });
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Evaluates the sweep. Loss values run in parallel; row order is fixed.
pub fn run(config: &SweepConfig) -> Result<CurveTable> {
    config.validate()?;
    let observables = config.observables();
    let (loss_key, losses) = config.loss_axis();
    let mut table = CurveTable::new(
        [loss_key, "phi", "z"]
            .into_iter()
            .map(str::to_string)
            .chain(observables.iter().map(|o| o.name().to_string())),
    )?;
    let backend = match config.backend {
        BackendKind::Markovian => "markovian",
        BackendKind::Lattice => "lattice",
    };
    table.push_meta("command", "sweep")?;
    table.push_meta("version", env!("CARGO_PKG_VERSION"))?;
    table.push_meta("backend", backend)?;
    table.push_meta("kappa", num(config.kappa))?;
    table.push_meta("beta1", num(config.beta1))?;
    table.push_meta("beta2", num(config.beta2))?;
    if config.backend == BackendKind::Lattice {
        table.push_meta("sigma", num(config.sigma.expect("validated")))?;
        table.push_meta("n_sites", config.n_sites()?)?;
        table.push_meta("beta_lattice", num(config.beta_lattice))?;
    }
    table.push_meta(
        "classical_input",
        ClassicalInput::from(config.classical_input).name(),
    )?;
    table.push_meta("ep_regime_codes", "-1=below 0=at 1=above")?;

    let blocks = losses
        .par_iter()
        .map(|&loss| rows_for(config, loss, &observables))
        .collect::<Result<Vec<_>>>()?;
    for row in blocks.into_iter().flatten() {
        table.push_row(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_axis_hits_both_ends() {
        let c = SweepConfig::from_toml(
            "backend = \"markovian\"\ngamma = { start = 0.0, stop = 5.0, num = 201 }\nz = 3\n",
        )
        .unwrap();
        let g = &c.gamma.as_ref().unwrap().0;
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[80], 2.0);
        assert_eq!(g[200], 5.0);
        assert_eq!(c.z.0, vec![3.0]);
        assert_eq!(c.phi.0, vec![PI]);
    }

    #[test]
    fn integer_lists_are_accepted() {
        let c = SweepConfig::from_toml("backend = \"markovian\"\ngamma = [0, 1]\nz = [1, 2.5]\n")
            .unwrap();
        assert_eq!(c.gamma.unwrap().0, vec![0.0, 1.0]);
        assert_eq!(c.z.0, vec![1.0, 2.5]);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |text: &str| SweepConfig::from_toml(text).unwrap_err().to_string();
        assert!(
            msg("backend = \"markovian\"\ngamma = { start = 0, stp = 1, num = 2 }\nz = [1]\n")
                .contains("`gamma.stp`")
        );
        assert!(msg("backend = \"markovian\"\ngamma = [1, -2]\nz = [1]\n").contains("`gamma[1]`"));
        assert!(
            msg("backend = \"markovian\"\ngamma = [1]\nz = [1]\nphi = [4.0]\n")
                .contains("`phi[0]`")
        );
        assert!(msg("backend = \"lattice\"\nrho = [1]\nz = [1]\n").contains("`sigma`"));
        assert!(
            msg("backend = \"markovian\"\ngamma = [1]\nz = [1]\nextra = 1\n").contains("extra")
        );
        assert!(msg("backend = \"markovian\"\ngamma = [1]\n").contains("missing field `z`"));
    }

    #[test]
    fn lattice_rejects_intrinsic_loss() {
        let err = SweepConfig::from_toml(
            "backend = \"lattice\"\ngamma = [0.5]\nrho = [1]\nsigma = 2\nz = [1]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("incompatible"));
        assert!(SweepConfig::from_toml(
            "backend = \"lattice\"\ngamma = [0]\nrho = [1]\nsigma = 2\nz = [1]\n"
        )
        .is_ok());
    }

    #[test]
    fn ep_regime_needs_degenerate_guides() {
        let text = "backend = \"markovian\"\nbeta1 = 0.5\ngamma = [1]\nz = [1]\n";
        assert!(SweepConfig::from_toml(text).is_err());
        let ok = format!("{text}observables = [\"p_boson\"]\n");
        assert!(SweepConfig::from_toml(&ok).is_ok());
    }
}
