use thiserror::Error;

/// Errors from the analytic detector and noise models.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Undamped mechanical resonance hit exactly; the susceptibility has a
    /// pole there and downstream integrators must set gamma > 0 or exclude it.
    #[error("mechanical pole at nu = {nu} rad/s with zero damping")]
    MechanicalPole { nu: f64 },

    /// Interference null of the two-cavity readout; the shot noise diverges.
    #[error("shot-noise null at nu = {nu} rad/s")]
    InterferenceNull { nu: f64 },

    /// The frequency-domain linear system for a detuned topology lost rank.
    #[error("singular optical-mechanical system at nu = {nu} rad/s")]
    SingularSystem { nu: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),
}

/// Errors from adaptive quadrature.
#[derive(Debug, Clone, Error)]
pub enum QuadratureError {
    #[error("empty integration band [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },

    #[error(
        "quadrature did not converge: residual error {residual:.3e} > target {target:.3e} \
         after depth {depth} ({n_evals} evaluations)"
    )]
    NotConverged {
        residual: f64,
        target: f64,
        depth: usize,
        n_evals: usize,
    },

    #[error("integrand returned a non-finite value at nu = {nu}")]
    NonFiniteIntegrand { nu: f64 },
}

/// Errors from SNR and filter operations.
#[derive(Debug, Clone, Error)]
pub enum FilterError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error("filter has zero norm over the band")]
    ZeroNormFilter,

    /// The box-filter variance integrand carries N(nu)/nu^2 weight; over a
    /// shot-noise null it is not integrable.
    #[error("band contains a shot-noise null at nu = {nu}; variance diverges")]
    NullInBand { nu: f64 },
}

/// Errors from the time-domain Langevin oracle.
#[derive(Debug, Clone, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("unstable time step: dt * kappa = {dt_kappa:.3} exceeds 0.05")]
    UnstableTimestep { dt_kappa: f64 },

    #[error("trace too short: {available} segments available, {required} required")]
    TooShort { available: usize, required: usize },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("zero variance in filter output; cannot form an SNR")]
    ZeroVariance,
}
