//! Asymptotic secret key rate of continuous-variable measurement-device-
//! independent QKD with zero-photon catalysis on Alice's EPR source.
//!
//! The crate is layered bottom-up:
//!
//! - [`gaussian`]: symplectic spectra, entropies and information measures of
//!   two-mode Gaussian states.
//! - [`zpc`]: heralding probability and covariance of the catalyzed source.
//! - [`channel`]: reduction of the relay topology to a one-way channel.
//! - [`keyrate`]: the key rate itself and the repeaterless benchmark.
//! - [`analysis`]: optimizers, root finders and sweeps over the key rate.
//! - [`fock`]: an independent truncated Fock-space model of the catalysis.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod keyrate;
pub mod zpc;

pub use analysis::{
    grid_sweep, max_distance, max_tolerable_noise, optimize_t, Axis, RootSolution, SolverConfig, SolverMeta, SweepParam,
    SweepRecord, TMode, TOptimum,
};
pub use channel::{derive_channel, Detector, EquivalentChannel, NoiseReferral, ProtocolParams};
pub use error::{Error, Result};
pub use gaussian::{SymplecticSpectrum, TwoModeCovariance};
pub use keyrate::{original_protocol_rate, plob_bound, secret_key_rate, RateBreakdown};
pub use zpc::ZpcParams;
