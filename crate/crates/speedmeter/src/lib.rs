//! Noise budgets, matched filters, and stochastic cross-checks for
//! optomechanical impulse sensors.
//!
//! The library models two continuous readout schemes for a mechanical
//! element probed by light:
//!
//! * a **velocity meter** built from two ring cavities sharing the mechanical
//!   element, connected by a lossy optical delay line, which evades
//!   radiation-pressure back-action at low frequency;
//! * a conventional **position meter** (single-sided cavity), which is bound
//!   by the standard quantum limit.
//!
//! For each scheme it produces force-noise power spectral densities (shot,
//! thermal, and back-action parts), optimal matched filters and
//! signal-to-noise ratios for impulse-like signals, and a time-domain
//! Langevin simulator that validates every analytic spectrum by Monte Carlo.
//!
//! Conventions: SI units, angular frequencies (rad/s), and the unitary
//! Fourier transform with `e^{+i nu t}` forward kernel. PSDs are two-sided
//! densities per (rad/s); SNR integrals run over one-sided bands.

pub mod bessel;
pub mod detuning;
pub mod error;
pub mod filter;
pub mod noise;
pub mod oracle;
pub mod parallel;
pub mod quad;
pub mod response;
pub mod signal;
pub mod units;

pub use detuning::{DetuningParams, QuadratureCoefficients};
pub use error::{FilterError, ModelError, QuadratureError, SimError};
pub use filter::{Band, FilterModel, SnrReport};
pub use noise::{NoiseModel, PositionMeter, PsdBreakdown, QuadraticNoise, VelocityMeter, WhiteNoise};
pub use parallel::Parallelism;
pub use quad::QuadratureConfig;
pub use response::{DetectorParams, ResponseSet};
pub use signal::{FlybySignal, ImpulseSignal, SignalModel};
