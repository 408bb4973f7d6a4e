//! Experiment configuration: a sectioned key/value file with `[device]`,
//! `[experiment]` and `[numerics]` tables. Frequencies are plain MHz/GHz and
//! times are ns, as quoted on lab whiteboards; conversion to angular rad/s
//! and seconds happens at the core-crate boundary.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use spinbus_core::density::{EnsembleGroup, GroupLabel, SpinDensity};
use spinbus_core::device::HybridDeviceModel;
use spinbus_core::flux::{FluxSchedule, QubitBusPair, TuningCurve};
use spinbus_core::readout::ReadoutErrorModel;
use spinbus_core::units::{ghz, mhz, ns};

use crate::error::{CliError, Result};

/// The full parsed configuration with every default filled in.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub device: DeviceSection,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub numerics: NumericsSection,
}

/// Device parameters; defaults are the published set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    /// Group centers in GHz, ascending, for (-I, -III, +III, +I).
    pub group_centers_ghz: [f64; 4],
    pub coupling_i_mhz: f64,
    pub coupling_iii_mhz: f64,
    pub fwhm_i_mhz: f64,
    pub fwhm_iii_mhz: f64,
    pub hyperfine_splitting_mhz: f64,
    pub qubit_ghz: f64,
    pub qubit_coupling_mhz: f64,
    pub bus_max_ghz: f64,
    pub bus_quality_factor: f64,
    /// Flux calibration anchor: the bus sits at `flux_anchor_ghz` when
    /// `flux_anchor` flux quanta are applied.
    pub flux_anchor: f64,
    pub flux_anchor_ghz: f64,
    pub readout_e0: f64,
    pub readout_e1: f64,
    pub readout_p_eq: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        Self {
            group_centers_ghz: [2.84, 2.865, 2.89, 2.91],
            coupling_i_mhz: 2.9,
            coupling_iii_mhz: 3.8,
            fwhm_i_mhz: 1.6,
            fwhm_iii_mhz: 2.4,
            hyperfine_splitting_mhz: 2.3,
            qubit_ghz: 2.607,
            qubit_coupling_mhz: 7.2,
            bus_max_ghz: 3.004,
            bus_quality_factor: 2e4,
            flux_anchor: 0.45,
            flux_anchor_ghz: 2.5,
            readout_e0: 0.0,
            readout_e1: 0.1,
            readout_p_eq: 0.08,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Rabi,
    Chevron,
    Coherence,
    Ramsey,
    Spectroscopy,
    Aswap,
    CalibrateReadout,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Rabi,
        ExperimentKind::Chevron,
        ExperimentKind::Coherence,
        ExperimentKind::Ramsey,
        ExperimentKind::Spectroscopy,
        ExperimentKind::Aswap,
        ExperimentKind::CalibrateReadout,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Rabi => "rabi",
            ExperimentKind::Chevron => "chevron",
            ExperimentKind::Coherence => "coherence",
            ExperimentKind::Ramsey => "ramsey",
            ExperimentKind::Spectroscopy => "spectroscopy",
            ExperimentKind::Aswap => "aswap",
            ExperimentKind::CalibrateReadout => "calibrate-readout",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    /// Spin group, one of "-I", "-III", "+III", "+I".
    #[serde(default = "default_group")]
    pub group: String,
    #[serde(default = "default_tau_max")]
    pub tau_max_ns: f64,
    #[serde(default = "default_tau_step")]
    pub tau_step_ns: f64,
    /// Ramsey bus detuning above the group center.
    #[serde(default = "default_detuning")]
    pub detuning_mhz: f64,
    /// Finite interaction (pi/2 analogue) duration for the direct-integration
    /// Ramsey sequence; unset means idealized instantaneous preparation.
    #[serde(default)]
    pub tau_half_swap_ns: Option<f64>,
    /// Chevron detuning grid half-span and step.
    #[serde(default = "default_chevron_span")]
    pub detuning_span_mhz: f64,
    #[serde(default = "default_chevron_step")]
    pub detuning_step_mhz: f64,
    /// Spectroscopy bus-frequency grid.
    #[serde(default = "default_bus_start")]
    pub bus_start_ghz: f64,
    #[serde(default = "default_bus_stop")]
    pub bus_stop_ghz: f64,
    #[serde(default = "default_bus_step")]
    pub bus_step_mhz: f64,
    /// Spectroscopy probe grid around each bus frequency.
    #[serde(default = "default_probe_span")]
    pub probe_span_mhz: f64,
    #[serde(default = "default_probe_step")]
    pub probe_step_mhz: f64,
    /// Flux-ramp schedule for the adiabatic transfer, as parallel breakpoint
    /// arrays; empty means the standard 450 ns three-segment ramp.
    #[serde(default)]
    pub schedule_t_ns: Vec<f64>,
    #[serde(default)]
    pub schedule_f_ghz: Vec<f64>,
    /// Uniform compression of the schedule times (2 = twice as fast).
    #[serde(default = "default_speedup")]
    pub speedup: f64,
    /// "dressed" (instantaneous eigenstate) or "bare" initial qubit state.
    #[serde(default = "default_initial")]
    pub initial_state: String,
    /// Measured switching probabilities for readout calibration.
    #[serde(default = "default_p_sw0")]
    pub p_sw0: f64,
    #[serde(default = "default_p_sw_pi")]
    pub p_sw_pi: f64,
    #[serde(default = "default_p_eq")]
    pub p_eq: f64,
}

fn default_group() -> String {
    "-III".into()
}
fn default_tau_max() -> f64 {
    500.0
}
fn default_tau_step() -> f64 {
    2.5
}
fn default_detuning() -> f64 {
    38.0
}
fn default_chevron_span() -> f64 {
    15.0
}
fn default_chevron_step() -> f64 {
    1.0
}
fn default_bus_start() -> f64 {
    2.82
}
fn default_bus_stop() -> f64 {
    2.93
}
fn default_bus_step() -> f64 {
    1.0
}
fn default_probe_span() -> f64 {
    15.0
}
fn default_probe_step() -> f64 {
    0.25
}
fn default_speedup() -> f64 {
    1.0
}
fn default_initial() -> String {
    "dressed".into()
}
fn default_p_sw0() -> f64 {
    0.072
}
fn default_p_sw_pi() -> f64 {
    0.828
}
fn default_p_eq() -> f64 {
    0.08
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    /// Dynamics backend; `None` picks the natural one per experiment
    /// (closed-form/spectral where available, direct integration otherwise).
    pub method: Option<Method>,
    /// Spectral-method grid.
    pub span_mhz: f64,
    pub spacing_mhz: f64,
    pub contour_shift_mhz: f64,
    /// Discretized-ensemble integrator.
    pub oracle_n: usize,
    pub oracle_span_mhz: f64,
    pub dt_ns: Option<f64>,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            method: None,
            span_mhz: 400.0,
            spacing_mhz: 0.05,
            contour_shift_mhz: 0.0,
            oracle_n: 4001,
            oracle_span_mhz: 600.0,
            dt_ns: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let d = &self.device;
        let positive: [(&str, f64); 10] = [
            ("device.coupling_i_mhz", d.coupling_i_mhz),
            ("device.coupling_iii_mhz", d.coupling_iii_mhz),
            ("device.fwhm_i_mhz", d.fwhm_i_mhz),
            ("device.fwhm_iii_mhz", d.fwhm_iii_mhz),
            ("device.qubit_ghz", d.qubit_ghz),
            ("device.qubit_coupling_mhz", d.qubit_coupling_mhz),
            ("device.bus_max_ghz", d.bus_max_ghz),
            ("device.bus_quality_factor", d.bus_quality_factor),
            ("experiment.tau_step_ns", self.experiment.tau_step_ns),
            ("numerics.spacing_mhz", self.numerics.spacing_mhz),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(CliError::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        if d.group_centers_ghz.iter().any(|&c| !(c > 0.0)) {
            return Err(CliError::Validation(
                "device.group_centers_ghz must all be positive".into(),
            ));
        }
        let e = &self.experiment;
        e.group
            .parse::<GroupLabel>()
            .map_err(|_| CliError::Validation(format!("experiment.group: unknown group {:?}", e.group)))?;
        if !(e.tau_max_ns > 0.0) {
            return Err(CliError::Validation(format!(
                "experiment.tau_max_ns must be positive, got {}",
                e.tau_max_ns
            )));
        }
        if e.kind == ExperimentKind::Coherence && self.method() != Method::Oracle {
            return Err(CliError::Validation(
                "experiment.kind = coherence requires numerics.method = \"oracle\"".into(),
            ));
        }
        if e.tau_half_swap_ns.is_some()
            && e.kind == ExperimentKind::Ramsey
            && self.method() != Method::Oracle
        {
            return Err(CliError::Validation(
                "finite-pulse ramsey (tau_half_swap_ns set) requires numerics.method = \"oracle\""
                    .into(),
            ));
        }
        if e.schedule_t_ns.len() != e.schedule_f_ghz.len() {
            return Err(CliError::Validation(format!(
                "experiment.schedule_t_ns and schedule_f_ghz lengths differ ({} vs {})",
                e.schedule_t_ns.len(),
                e.schedule_f_ghz.len()
            )));
        }
        if !matches!(e.initial_state.as_str(), "dressed" | "bare") {
            return Err(CliError::Validation(format!(
                "experiment.initial_state must be \"dressed\" or \"bare\", got {:?}",
                e.initial_state
            )));
        }
        Ok(())
    }

    /// Effective backend: the explicit setting, or the natural default for
    /// the experiment.
    pub fn method(&self) -> Method {
        self.numerics.method.unwrap_or(match self.experiment.kind {
            ExperimentKind::Chevron | ExperimentKind::Coherence => Method::Oracle,
            _ => Method::Spectral,
        })
    }

    /// Canonical serialization: the fully-defaulted typed config in fixed
    /// field order, so the hash ignores key order and formatting of the
    /// input file.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization, hex-encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    /// Build the device model from the `[device]` section.
    pub fn device_model(&self) -> Result<HybridDeviceModel> {
        let d = &self.device;
        let split = mhz(d.hyperfine_splitting_mhz);
        let labels = [
            GroupLabel::MinusI,
            GroupLabel::MinusIII,
            GroupLabel::PlusIII,
            GroupLabel::PlusI,
        ];
        let mut groups = Vec::with_capacity(4);
        for (label, &center) in labels.iter().zip(&d.group_centers_ghz) {
            let (g, fwhm) = match label {
                GroupLabel::MinusI | GroupLabel::PlusI => (d.coupling_i_mhz, d.fwhm_i_mhz),
                _ => (d.coupling_iii_mhz, d.fwhm_iii_mhz),
            };
            let density = SpinDensity::hyperfine(ghz(center), split, mhz(fwhm))
                .map_err(|e| CliError::Validation(format!("device: {e}")))?;
            groups.push(
                EnsembleGroup::new(*label, mhz(g), density, 0.0)
                    .map_err(|e| CliError::Validation(format!("device: {e}")))?,
            );
        }
        Ok(HybridDeviceModel {
            groups,
            qubit: QubitBusPair::new(ghz(d.qubit_ghz), mhz(d.qubit_coupling_mhz))
                .map_err(|e| CliError::Validation(format!("device: {e}")))?,
            tuning: TuningCurve::calibrated(
                ghz(d.bus_max_ghz),
                d.flux_anchor,
                ghz(d.flux_anchor_ghz),
            )
            .map_err(|e| CliError::Validation(format!("device: {e}")))?,
            quality_factor: d.bus_quality_factor,
            readout: ReadoutErrorModel::new(d.readout_e0, d.readout_e1, d.readout_p_eq)
                .map_err(|e| CliError::Validation(format!("device: {e}")))?,
        })
    }

    pub fn group_label(&self) -> GroupLabel {
        self.experiment.group.parse().expect("validated group label")
    }

    /// The flux schedule from the `[experiment]` section (scaled by
    /// `speedup`), or the standard ramp.
    pub fn schedule(&self) -> Result<FluxSchedule> {
        let e = &self.experiment;
        let base = if e.schedule_t_ns.is_empty() {
            spinbus_core::flux::default_aswap_schedule()
        } else {
            FluxSchedule::new(
                e.schedule_t_ns
                    .iter()
                    .zip(&e.schedule_f_ghz)
                    .map(|(&t, &f)| (ns(t), ghz(f)))
                    .collect(),
            )
            .map_err(|err| CliError::Validation(format!("experiment.schedule_t_ns: {err}")))?
        };
        if self.experiment.speedup == 1.0 {
            return Ok(base);
        }
        if !(self.experiment.speedup > 0.0) {
            return Err(CliError::Validation(format!(
                "experiment.speedup must be positive, got {}",
                self.experiment.speedup
            )));
        }
        FluxSchedule::new(
            base.breakpoints()
                .iter()
                .map(|&(t, w)| (t / self.experiment.speedup, w))
                .collect(),
        )
        .map_err(|err| CliError::Validation(format!("experiment.speedup: {err}")))
    }
}
