//! Simulation core for a hybrid circuit: a transmon qubit coupled through a
//! flux-tunable bus resonator to an inhomogeneously broadened NV spin
//! ensemble.
//!
//! Dynamics are available through two independent routes that cross-check
//! each other: a semi-analytic spectral method ([`spectral`]) built on
//! closed-form Laplace-domain transfer functions, and a brute-force
//! discretized-oscillator ODE integrator ([`oracle`]). The remaining modules
//! cover flux tuning and adiabatic qubit-bus transfer ([`flux`]), the
//! readout error model ([`readout`]), and frequency-domain analysis and
//! fitting ([`spectroscopy`], [`fit`]).

pub mod density;
pub mod device;
pub mod error;
pub mod fit;
pub mod flux;
pub mod oracle;
pub mod readout;
pub mod spectral;
pub mod spectroscopy;
pub mod units;

pub use density::{EnsembleGroup, GroupLabel, LorentzianComponent, SpinDensity};
pub use device::HybridDeviceModel;
pub use error::{CoreError, Result};
pub use fit::FitResult;
pub use flux::{FluxSchedule, InitialState, QubitBusPair, SweepResult, TuningCurve};
pub use oracle::{DiscretizedEnsemble, OracleConfig};
pub use readout::{ReadoutErrorModel, SCurveModel};
pub use spectral::{BusParams, FrequencyGrid, SpectralConfig, TimeSeries, TransferFunctionGrid};
pub use spectroscopy::{Extremum, FftOptions, FitModel, Peak, PeakSet, Window};
