use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency grid is not uniform (spacing varies by more than 1e-9 relative)")]
    InvalidGrid,

    #[error("grid span does not cover {0}")]
    Coverage(String),

    #[error("requested time {requested:.3e} s exceeds the resolvable window {window:.3e} s")]
    WindowExceeded { requested: f64, window: f64 },

    #[error("time step {dt:.3e} s too coarse for fastest detuning {max_detuning:.3e} rad/s")]
    StepSize { dt: f64, max_detuning: f64 },

    #[error("numerical instability: non-finite amplitude after {0:.3e} s of evolution")]
    NumericalInstability(f64),

    #[error("unknown spin group {0}")]
    UnknownGroup(String),

    #[error("value {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("flux {0} (in units of Phi0) at or beyond the 0.5 singularity")]
    SingularFlux(f64),

    #[error("readout calibration is singular (equilibrium population 0.5)")]
    SingularCalibration,

    #[error("fit did not converge after {iterations} iterations (residual norm {residual:.3e})")]
    FitDiverged { iterations: usize, residual: f64 },

    #[error("series too short: {got} samples, need at least {need}")]
    TooShort { got: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, CoreError>;
