//! Passive parity-time-symmetric two-waveguide coupler near its exceptional
//! point.
//!
//! The crate covers classical coupled-mode propagation ([`classical`]), the
//! Markovian scattering matrix ([`scattering`]), an explicit tight-binding
//! reservoir solved exactly ([`reservoir`]) and two-photon observables built
//! on top of either propagator ([`quantum`]). Curves serialize to a small
//! CSV dialect ([`table`]).

pub mod classical;
pub mod error;
pub mod quantum;
pub mod reservoir;
pub mod scattering;
pub mod table;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    ClassicalInput, ComplexMatrix2, CouplerParams, DecayCurve, EntanglementPhase, PropagationGrid,
    ScatteringMatrix, TwoPhotonInput,
};
