//! Experiment dispatch: turn a validated config into data files on disk plus
//! a run manifest.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use spinbus_core::density::{EnsembleGroup, GroupLabel, LorentzianComponent, SpinDensity};
use spinbus_core::device::HybridDeviceModel;
use spinbus_core::flux::InitialState;
use spinbus_core::oracle::{
    bus_amplitude, chevron_scan, ramsey_sequence, storage_retrieval, uniform_times, OracleConfig,
};
use spinbus_core::readout::ReadoutErrorModel;
use spinbus_core::spectral::{
    rabi_protocol, ramsey_spectral, BusParams, SpectralConfig, TimeSeries,
};
use spinbus_core::spectroscopy::{
    magnitude_spectrum, qubit_bus_anticrossing, transmission_db, FftOptions,
};
use spinbus_core::units::{ghz, mhz, ns, to_ghz, to_mhz, to_ns};

use crate::config::{ExperimentConfig, ExperimentKind, Method};
use crate::error::{numerics, Result};
use crate::table::Table;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a run produced; serialized as `manifest.toml` in the output directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub version: String,
    /// SHA-256 of the canonicalized config (stable under key reordering).
    pub config_hash: String,
    pub timestamp_unix_s: u64,
    pub duration_ms: u64,
    pub files: Vec<String>,
    /// The canonicalized config itself; re-running it reproduces the data
    /// files byte for byte.
    pub config: ExperimentConfig,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    preamble: Vec<(&'static str, String)>,
}

impl Outputs {
    fn write(&mut self, name: &str, table: &Table) -> Result<()> {
        table.write(&self.dir.join(name), &self.preamble)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest> {
    let started = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let device = config.device_model()?;
    let mut out = Outputs {
        dir: out_dir.to_path_buf(),
        files: Vec::new(),
        preamble: vec![
            ("generator", format!("spinbus {VERSION}")),
            ("experiment", config.experiment.kind.name().to_string()),
            ("config_hash", config.hash()),
        ],
    };

    match config.experiment.kind {
        ExperimentKind::Rabi => run_rabi(config, &device, &mut out)?,
        ExperimentKind::Chevron => run_chevron(config, &device, &mut out)?,
        ExperimentKind::Coherence => run_coherence(config, &device, &mut out)?,
        ExperimentKind::Ramsey => run_ramsey(config, &device, &mut out)?,
        ExperimentKind::Spectroscopy => run_spectroscopy(config, &device, &mut out)?,
        ExperimentKind::Aswap => run_aswap(config, &device, &mut out)?,
        ExperimentKind::CalibrateReadout => run_calibrate_readout(config, &mut out)?,
    }

    let manifest = RunManifest {
        version: VERSION.to_string(),
        config_hash: config.hash(),
        timestamp_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        duration_ms: started.elapsed().as_millis() as u64,
        files: out.files.clone(),
        config: config.clone(),
    };
    std::fs::write(
        out_dir.join("manifest.toml"),
        toml::to_string(&manifest).expect("manifest serializes"),
    )?;
    Ok(manifest)
}

fn spectral_config(config: &ExperimentConfig) -> SpectralConfig {
    SpectralConfig {
        span: mhz(config.numerics.span_mhz),
        spacing: mhz(config.numerics.spacing_mhz),
        contour_shift: mhz(config.numerics.contour_shift_mhz),
    }
}

fn oracle_config(config: &ExperimentConfig) -> OracleConfig {
    OracleConfig {
        n: config.numerics.oracle_n,
        span: mhz(config.numerics.oracle_span_mhz),
        dt: config.numerics.dt_ns.map(ns),
    }
}

fn tau_grid(config: &ExperimentConfig) -> Vec<f64> {
    uniform_times(ns(config.experiment.tau_step_ns), ns(config.experiment.tau_max_ns))
}

fn group<'d>(config: &ExperimentConfig, device: &'d HybridDeviceModel) -> &'d EnsembleGroup {
    device.group(config.group_label()).expect("validated label")
}

/// Linear interpolation of |amplitude|^2 on the series' native grid.
fn sample_probability(series: &TimeSeries, t: f64) -> f64 {
    let p = series.magnitudes_squared();
    let pos = t / series.dt;
    let i = (pos.floor() as usize).min(p.len() - 2);
    let f = pos - i as f64;
    p[i] + f * (p[i + 1] - p[i])
}

fn probability_table(times: &[f64], ps: &[f64]) -> Table {
    let mut t = Table::new(&["tau_ns", "p_e"]);
    for (&tau, &p) in times.iter().zip(ps) {
        t.push(vec![to_ns(tau), p]);
    }
    t
}

fn run_rabi(config: &ExperimentConfig, device: &HybridDeviceModel, out: &mut Outputs) -> Result<()> {
    let grp = group(config, device);
    let bus = device.bus_on_group(grp.label).expect("group exists");
    let times = tau_grid(config);
    let max_time = *times.last().unwrap();
    let (spectral, oracle) = match config.method() {
        Method::Spectral => (true, false),
        Method::Oracle => (false, true),
        Method::Both => (true, true),
    };
    if spectral {
        let series = rabi_protocol(grp, &bus, &spectral_config(config), max_time * 1.0001)
            .map_err(numerics("rabi spectral"))?;
        let ps: Vec<f64> = times.iter().map(|&t| sample_probability(&series, t)).collect();
        let name = if oracle { "rabi_spectral.dat" } else { "rabi.dat" };
        out.write(name, &probability_table(&times, &ps))?;
    }
    if oracle {
        let ps = storage_retrieval(grp, &bus, &oracle_config(config), &times)
            .map_err(numerics("rabi oracle"))?;
        let name = if spectral { "rabi_oracle.dat" } else { "rabi.dat" };
        out.write(name, &probability_table(&times, &ps))?;
    }
    Ok(())
}

fn run_chevron(
    config: &ExperimentConfig,
    device: &HybridDeviceModel,
    out: &mut Outputs,
) -> Result<()> {
    let grp = group(config, device);
    let center = grp.central_frequency();
    let kappa = center / device.quality_factor;
    let e = &config.experiment;
    let n_det = (2.0 * e.detuning_span_mhz / e.detuning_step_mhz).round() as usize + 1;
    let detunings: Vec<f64> = (0..n_det)
        .map(|i| mhz(-e.detuning_span_mhz + i as f64 * e.detuning_step_mhz))
        .collect();
    let times = tau_grid(config);

    let columns: Vec<Vec<f64>> = match config.method() {
        Method::Spectral => {
            let cfg = spectral_config(config);
            let max_time = *times.last().unwrap();
            detunings
                .par_iter()
                .map(|&delta| {
                    let bus = BusParams::new(center + delta, kappa)
                        .map_err(numerics("chevron bus"))?;
                    let series = rabi_protocol(grp, &bus, &cfg, max_time * 1.0001)
                        .map_err(numerics("chevron spectral"))?;
                    Ok(times.iter().map(|&t| sample_probability(&series, t)).collect())
                })
                .collect::<Result<_>>()?
        }
        _ => chevron_scan(grp, kappa, &detunings, &oracle_config(config), &times)
            .map_err(numerics("chevron oracle"))?,
    };

    // long format: one row per (bus frequency, interaction time)
    let mut t = Table::new(&["omega_b_ghz", "tau_ns", "p_e"]);
    for (&delta, col) in detunings.iter().zip(&columns) {
        for (&tau, &p) in times.iter().zip(col) {
            t.push(vec![to_ghz(center + delta), to_ns(tau), p]);
        }
    }
    out.write("chevron.dat", &t)
}

fn run_coherence(
    config: &ExperimentConfig,
    device: &HybridDeviceModel,
    out: &mut Outputs,
) -> Result<()> {
    let grp = group(config, device);
    let bus = device.bus_on_group(grp.label).expect("group exists");
    let times = tau_grid(config);
    // rotating frame at the group center: the trivial qubit-frame rotation is
    // already removed, so the phase shows only the storage/retrieval jump
    let alpha = bus_amplitude(grp, &bus, &oracle_config(config), &times)
        .map_err(numerics("coherence oracle"))?;
    let mut t = Table::new(&["tau_ns", "re_alpha", "im_alpha", "magnitude", "phase_rad"]);
    for (&tau, a) in times.iter().zip(&alpha) {
        t.push(vec![to_ns(tau), a.re, a.im, a.norm(), a.arg()]);
    }
    out.write("coherence.dat", &t)
}

fn spectrum_table(ps: &[f64], dt: f64, max_freq: f64) -> Result<Table> {
    let opts = FftOptions {
        baseline_window: Some(ns(50.0)),
        ..FftOptions::default()
    };
    let (freqs, mags) = magnitude_spectrum(ps, dt, &opts).map_err(numerics("ramsey spectrum"))?;
    let mut t = Table::new(&["freq_mhz", "magnitude"]);
    for (&f, &m) in freqs.iter().zip(&mags) {
        if f > max_freq {
            break;
        }
        t.push(vec![to_mhz(f), m]);
    }
    Ok(t)
}

fn run_ramsey(
    config: &ExperimentConfig,
    device: &HybridDeviceModel,
    out: &mut Outputs,
) -> Result<()> {
    let grp = group(config, device);
    let e = &config.experiment;
    let delta = mhz(e.detuning_mhz);
    let times = tau_grid(config);
    let max_freq = mhz(2.0 * e.detuning_mhz + 10.0);

    match config.method() {
        Method::Oracle => {
            // finite-pulse sequence; default interaction is the quarter
            // rotation g t = pi/4 that prepares the balanced superposition
            let tau_half = e
                .tau_half_swap_ns
                .map(ns)
                .unwrap_or(std::f64::consts::FRAC_PI_4 / grp.coupling);
            let kappa = grp.central_frequency() / device.quality_factor;
            let ps = ramsey_sequence(grp, kappa, delta, tau_half, &oracle_config(config), &times)
                .map_err(numerics("ramsey oracle"))?;
            out.write("ramsey.dat", &probability_table(&times, &ps))?;
            out.write(
                "ramsey_spectrum.dat",
                &spectrum_table(&ps, ns(e.tau_step_ns), max_freq)?,
            )
        }
        _ => {
            let bus = device
                .bus_at(grp.central_frequency() + delta)
                .map_err(numerics("ramsey bus"))?;
            let series = ramsey_spectral(
                grp,
                &bus,
                &spectral_config(config),
                *times.last().unwrap() * 1.0001,
            )
            .map_err(numerics("ramsey spectral"))?;
            let ps: Vec<f64> = times.iter().map(|&t| sample_probability(&series, t)).collect();
            out.write("ramsey.dat", &probability_table(&times, &ps))?;
            // spectrum from the native series resolution
            out.write(
                "ramsey_spectrum.dat",
                &spectrum_table(&series.magnitudes_squared(), series.dt, max_freq)?,
            )
        }
    }
}

/// All four groups folded into one effective ensemble: the bus self-energy is
/// additive over groups, which is exactly a component-weighted density under
/// the root-sum-square collective coupling.
fn combined_ensemble(device: &HybridDeviceModel) -> EnsembleGroup {
    let g_tot = device
        .groups
        .iter()
        .map(|g| g.coupling * g.coupling)
        .sum::<f64>()
        .sqrt();
    let mut comps = Vec::new();
    for g in &device.groups {
        let scale = (g.coupling / g_tot).powi(2);
        for c in g.density.components() {
            comps.push(LorentzianComponent::new(c.center, c.fwhm, scale * c.weight).unwrap());
        }
    }
    EnsembleGroup::new(
        GroupLabel::MinusI, // label is irrelevant for the combined response
        g_tot,
        SpinDensity::new(comps).expect("weights sum to one"),
        0.0,
    )
    .expect("valid combined ensemble")
}

fn run_spectroscopy(
    config: &ExperimentConfig,
    device: &HybridDeviceModel,
    out: &mut Outputs,
) -> Result<()> {
    let e = &config.experiment;
    let ensemble = combined_ensemble(device);
    let n_bus = ((e.bus_stop_ghz - e.bus_start_ghz) * 1e3 / e.bus_step_mhz).round() as usize + 1;
    let n_probe = (2.0 * e.probe_span_mhz / e.probe_step_mhz).round() as usize + 1;

    let rows: Vec<Vec<(f64, f64, f64)>> = (0..n_bus)
        .into_par_iter()
        .map(|i| {
            let wb = ghz(e.bus_start_ghz) + i as f64 * mhz(e.bus_step_mhz);
            let bus = BusParams::new(wb, wb / device.quality_factor)
                .map_err(numerics("spectroscopy bus"))?;
            Ok((0..n_probe)
                .map(|j| {
                    let probe = wb - mhz(e.probe_span_mhz) + j as f64 * mhz(e.probe_step_mhz);
                    (
                        to_ghz(wb),
                        to_ghz(probe),
                        transmission_db(&ensemble, &bus, probe),
                    )
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut t = Table::new(&["omega_b_ghz", "probe_ghz", "s21_db"]);
    for block in rows {
        for (wb, probe, db) in block {
            t.push(vec![wb, probe, db]);
        }
    }
    out.write("spectroscopy.dat", &t)?;

    // dressed qubit-bus branches over the same bus grid
    let mut b = Table::new(&["omega_b_ghz", "lower_ghz", "upper_ghz"]);
    for i in 0..n_bus {
        let wb = ghz(e.bus_start_ghz) + i as f64 * mhz(e.bus_step_mhz);
        let (lo, hi) = qubit_bus_anticrossing(&device.qubit, wb);
        b.push(vec![to_ghz(wb), to_ghz(lo), to_ghz(hi)]);
    }
    out.write("qubit_branches.dat", &b)
}

fn run_aswap(
    config: &ExperimentConfig,
    device: &HybridDeviceModel,
    out: &mut Outputs,
) -> Result<()> {
    let schedule = config.schedule()?;
    let initial = match config.experiment.initial_state.as_str() {
        "bare" => InitialState::BareQubit,
        _ => InitialState::DressedQubit,
    };
    let res = spinbus_core::flux::simulate_sweep(
        &device.qubit,
        &schedule,
        config.numerics.dt_ns.map(ns),
        initial,
    )
    .map_err(numerics("aswap sweep"))?;

    // decimate the dense integrator grid to at most ~1000 plot rows
    let stride = (res.times.len() / 1000).max(1);
    let mut t = Table::new(&["t_ns", "bus_population"]);
    for i in (0..res.times.len()).step_by(stride) {
        t.push(vec![to_ns(res.times[i]), res.bus_population[i]]);
    }
    if (res.times.len() - 1) % stride != 0 {
        let last = res.times.len() - 1;
        t.push(vec![to_ns(res.times[last]), res.bus_population[last]]);
    }
    out.write("aswap.dat", &t)?;

    let mut s = Table::new(&[
        "duration_ns",
        "bare_transfer",
        "adiabatic_transfer",
        "resonant_swap_ns",
    ]);
    s.push(vec![
        to_ns(schedule.duration()),
        res.bare_transfer,
        res.adiabatic_transfer,
        to_ns(device.qubit.resonant_swap_time()),
    ]);
    out.write("aswap_summary.dat", &s)
}

fn run_calibrate_readout(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let e = &config.experiment;
    let model = ReadoutErrorModel::calibrate(e.p_sw0, e.p_sw_pi, e.p_eq)
        .map_err(numerics("readout calibration"))?;
    let mut t = Table::new(&["e0", "e1", "p_eq"]);
    t.push(vec![model.e0, model.e1, model.p_eq]);
    out.write("readout.dat", &t)?;

    // the calibrated forward map, plot-ready
    let mut c = Table::new(&["p_e", "p_sw"]);
    for k in 0..=100 {
        let p_e = k as f64 / 100.0;
        c.push(vec![
            p_e,
            model.switching_probability(p_e).map_err(numerics("readout model"))?,
        ]);
    }
    out.write("readout_curve.dat", &c)
}
