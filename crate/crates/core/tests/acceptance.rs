//! End-to-end acceptance gate: every headline figure of the simulator checked
//! in one run, with one printed PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines for
//! passing criteria too (the harness prints them automatically on failure).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinbus_core::density::{EnsembleGroup, GroupLabel, SpinDensity};
use spinbus_core::device::HybridDeviceModel;
use spinbus_core::fit::fit_least_squares;
use spinbus_core::flux::{default_aswap_schedule, simulate_sweep, FluxSchedule, InitialState};
use spinbus_core::oracle::{
    excitation_norm, storage_retrieval, uniform_times, OracleConfig,
};
use spinbus_core::readout::ReadoutErrorModel;
use spinbus_core::spectral::{
    rabi_protocol, ramsey_spectral, BusParams, SpectralConfig, TimeSeries,
};
use spinbus_core::spectroscopy::{
    fit_curve, magnitude_spectrum, qubit_bus_anticrossing, refined_maxima, refined_minima,
    transmission, FftOptions, FitModel,
};
use spinbus_core::units::{ghz, mhz, ns, to_mhz, to_ns};

/// High-resolution settings for the storage/retrieval curves: the 0.05 MHz
/// spacing resolves the lines, the wide span gives a 0.625 ns time step so
/// the parabolic extremum refinement is meaningful.
fn fine_config() -> SpectralConfig {
    SpectralConfig {
        span: mhz(1600.0),
        spacing: mhz(0.05),
        contour_shift: 0.0,
    }
}

/// Landmarks of one storage/retrieval curve, everything refined parabolically.
struct Landmarks {
    /// First minimum (storage time), ns.
    tau_s: f64,
    /// First revival maximum (retrieval time), ns.
    tau_r: f64,
    /// Second revival maximum, ns.
    tau_r2: f64,
    p0: f64,
    p_r: f64,
    p_r2: f64,
}

fn landmarks(series: &TimeSeries) -> Landmarks {
    let ts: Vec<f64> = series.times().map(to_ns).collect();
    let p = series.magnitudes_squared();
    let mins = refined_minima(&ts, &p);
    let maxs = refined_maxima(&ts, &p);
    let tau_s = mins[0].x;
    let revivals: Vec<_> = maxs.iter().filter(|m| m.x > tau_s).collect();
    Landmarks {
        tau_s,
        tau_r: revivals[0].x,
        tau_r2: revivals[1].x,
        p0: p[0],
        p_r: revivals[0].y,
        p_r2: revivals[1].y,
    }
}

fn storage_landmarks(device: &HybridDeviceModel, label: GroupLabel) -> Landmarks {
    let group = device.group(label).unwrap();
    let bus = device.bus_on_group(label).unwrap();
    let series = rabi_protocol(group, &bus, &fine_config(), ns(600.0)).unwrap();
    landmarks(&series)
}

/// Ratio of the second revival to a single-exponential decay pinned to p(0)
/// and the first revival; > 1 means slower-than-exponential damping.
fn nonexponential_ratio(lm: &Landmarks) -> f64 {
    let p_exp = lm.p0 * (lm.p_r / lm.p0).powf(lm.tau_r2 / lm.tau_r);
    lm.p_r2 / p_exp
}

fn within(value: f64, center: f64, tol: f64) -> bool {
    (value - center).abs() <= tol
}

/// Moving-average baseline, mirroring the spectrum detrending so the fringe
/// fit sees the same oscillatory residue the FFT does.
fn detrend(p: &[f64], dt: f64, window: f64) -> Vec<f64> {
    let n = p.len();
    let half = ((window / dt / 2.0).round() as usize).max(1);
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            p[i] - p[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

fn wrap_phase(phi: f64) -> f64 {
    phi.sin().atan2(phi.cos())
}

fn criterion_1_storage_group_iii(device: &HybridDeviceModel) -> (bool, String) {
    let lm = storage_landmarks(device, GroupLabel::MinusIII);
    let ok_s = within(lm.tau_s, 65.0, 5.0);
    let ok_r = within(lm.tau_r, 116.0, 10.0);
    (
        ok_s && ok_r,
        format!(
            "tau_s = {:.2} ns (65 +- 5: {}), tau_r = {:.2} ns (116 +- 10: {})",
            lm.tau_s,
            if ok_s { "ok" } else { "out" },
            lm.tau_r,
            if ok_r { "ok" } else { "out" },
        ),
    )
}

fn criterion_2_storage_group_i(device: &HybridDeviceModel) -> (bool, String) {
    let lm = storage_landmarks(device, GroupLabel::MinusI);
    let ok_s = within(lm.tau_s, 97.0, 5.0);
    let ok_r = within(lm.tau_r, 146.0, 10.0);
    (
        ok_s && ok_r,
        format!(
            "tau_s = {:.2} ns (97 +- 5: {}), tau_r = {:.2} ns (146 +- 10: {})",
            lm.tau_s,
            if ok_s { "ok" } else { "out" },
            lm.tau_r,
            if ok_r { "ok" } else { "out" },
        ),
    )
}

fn criterion_3_retrieval_fidelity(device: &HybridDeviceModel) -> (bool, String) {
    let lm3 = storage_landmarks(device, GroupLabel::MinusIII);
    let lm1 = storage_landmarks(device, GroupLabel::MinusI);
    let fid3 = lm3.p_r / lm3.p0;
    let fid1 = lm1.p_r / lm1.p0;
    let r3 = nonexponential_ratio(&lm3);
    let r1 = nonexponential_ratio(&lm1);
    let ok_f3 = within(fid3, 0.14, 0.05);
    let ok_f1 = within(fid1, 0.07, 0.05);
    let ok_r3 = r3 > 3.0;
    let ok_r1 = r1 > 3.0;
    (
        ok_f3 && ok_f1 && ok_r3 && ok_r1,
        format!(
            "fidelity III = {:.4} ({}), I = {:.4} ({}); second-revival excess over \
             exponential: III = {:.2}x ({}), I = {:.2}x ({})",
            fid3,
            if ok_f3 { "ok" } else { "out" },
            fid1,
            if ok_f1 { "ok" } else { "out" },
            r3,
            if ok_r3 { "ok" } else { "<= 3" },
            r1,
            if ok_r1 { "ok" } else { "<= 3" },
        ),
    )
}

fn criterion_4_coherence(device: &HybridDeviceModel) -> (bool, String) {
    let group = device.group(GroupLabel::MinusI).unwrap();
    let bus = device.bus_on_group(GroupLabel::MinusI).unwrap();
    let series = rabi_protocol(group, &bus, &fine_config(), ns(600.0)).unwrap();
    let lm = landmarks(&series);
    // amplitude in the bus rotating frame; |alpha| itself is frame-independent
    let rot: Vec<Complex64> = series
        .times()
        .zip(&series.values)
        .map(|(t, a)| a * Complex64::new(0.0, bus.omega_b * t).exp())
        .collect();
    let idx = |tau_ns: f64| (ns(tau_ns) / series.dt).round() as usize;
    let a0 = rot[0].norm();
    let stored = rot[idx(lm.tau_s)].norm() / a0;
    let retrieved = rot[idx(lm.tau_r)].norm() / a0;
    let phase_jump = wrap_phase(rot[idx(lm.tau_r)].arg() - rot[idx(50.0)].arg()).abs();
    let ok_stored = stored < 0.05;
    let ok_ret = within(retrieved, 0.2, 0.08); // 1/5 +- 40%
    let ok_phase = within(phase_jump, std::f64::consts::PI, 0.3);
    (
        ok_stored && ok_ret && ok_phase,
        format!(
            "|a(tau_s)|/|a0| = {:.4} (< 0.05: {}), |a(tau_r)|/|a0| = {:.4} \
             (0.2 +- 40%: {}), phase jump = {:.3} rad (pi +- 0.3: {})",
            stored,
            if ok_stored { "ok" } else { "out" },
            retrieved,
            if ok_ret { "ok" } else { "out" },
            phase_jump,
            if ok_phase { "ok" } else { "out" },
        ),
    )
}

fn criterion_5_ramsey(device: &HybridDeviceModel) -> (bool, String) {
    let group = device.group(GroupLabel::MinusI).unwrap();
    let bus = device
        .bus_at(group.central_frequency() + mhz(38.0))
        .unwrap();
    let cfg = SpectralConfig::default(); // 400 MHz span: 2.5 ns sampling
    let series = ramsey_spectral(group, &bus, &cfg, 4e-6).unwrap();
    let p = series.magnitudes_squared();

    let opts = FftOptions {
        baseline_window: Some(ns(50.0)),
        ..FftOptions::default()
    };
    let (freqs, mags) = magnitude_spectrum(&p, series.dt, &opts).unwrap();

    // The triplet peaks overlap through their dephasing-broadened skirts, so
    // locate them with an equidistant-triplet Lorentzian fit over the band
    // around the detuning rather than from the raw bin maxima.
    let (xs, ys): (Vec<f64>, Vec<f64>) = freqs
        .iter()
        .map(|&f| to_mhz(f))
        .zip(&mags)
        .filter(|(f, _)| (30.0..46.0).contains(f))
        .map(|(f, &m)| (f, m))
        .unzip();
    let peak_mag = ys.iter().cloned().fold(0.0_f64, f64::max);
    // params: [offset, fwhm, center, split, amp_lo, amp_mid, amp_hi] (MHz)
    let triplet = |q: &[f64], x: f64| {
        let hw = q[1] / 2.0;
        let mut v = q[0];
        for (c, a) in [(q[2] - q[3], q[4]), (q[2], q[5]), (q[2] + q[3], q[6])] {
            v += a * hw * hw / ((x - c).powi(2) + hw * hw);
        }
        v
    };
    let init = [
        0.0,
        1.0,
        38.3,
        2.3,
        0.7 * peak_mag,
        peak_mag,
        0.7 * peak_mag,
    ];
    let fit = fit_least_squares(triplet, &xs, &ys, &init, None).unwrap();
    let (center, split) = (fit.params[2], fit.params[3]);
    let peaks = [center - split, center, center + split];
    let nominal = [35.7, 38.0, 40.3];
    let errs: Vec<f64> = peaks
        .iter()
        .zip(nominal)
        .map(|(p, n)| (p - n).abs())
        .collect();
    let ok_peaks = errs.iter().all(|&e| e < 0.3);

    // envelope decay from the fringe-model fit to the detrended curve
    let ts: Vec<f64> = series.times().collect();
    let y0 = detrend(&p, series.dt, ns(50.0));
    let env = fit_curve(
        &FitModel::RamseyFringe,
        &ts,
        &y0,
        &[0.1, 0.0, mhz(38.29), mhz(2.29), ns(150.0)],
        None,
    )
    .unwrap();
    let t_env = to_ns(env.params[4]);
    let ok_env = within(t_env, 200.0, 50.0);

    (
        ok_peaks && ok_env,
        format!(
            "fitted peaks = [{:.2}, {:.2}, {:.2}] MHz, errors vs 38 -+/+ 2.3 = \
             [{:.3}, {:.3}, {:.3}] (< 0.3: {}); envelope 1/e = {:.1} ns (200 +- 50: {})",
            peaks[0],
            peaks[1],
            peaks[2],
            errs[0],
            errs[1],
            errs[2],
            if ok_peaks { "ok" } else { "out" },
            t_env,
            if ok_env { "ok" } else { "out" },
        ),
    )
}

fn criterion_6_spectroscopy(device: &HybridDeviceModel) -> (bool, String) {
    let expected_ghz = [2.84, 2.865, 2.89, 2.91];
    let mut ok = true;
    let mut worst_split_err = 0.0_f64;
    for (group, want) in device.groups.iter().zip(expected_ghz) {
        let center = group.central_frequency();
        ok &= within(center, ghz(want), 1.0); // rad/s: essentially exact
        let bus = device.bus_at(center).unwrap();

        // vacuum Rabi splitting against a degenerate (single-line) density
        // of the same coupling and linewidth, where 2g is the clean figure
        let fwhm = group.density.components()[0].fwhm;
        let degenerate = EnsembleGroup::new(
            group.label,
            group.coupling,
            SpinDensity::single(center, fwhm).unwrap(),
            0.0,
        )
        .unwrap();
        let n = 30_001;
        let xs: Vec<f64> = (0..n)
            .map(|i| center - mhz(15.0) + i as f64 * mhz(30.0) / (n - 1) as f64)
            .collect();
        let mag: Vec<f64> = xs
            .iter()
            .map(|&om| transmission(&degenerate, &bus, om).norm())
            .collect();
        let top = mag.iter().cloned().fold(0.0_f64, f64::max);
        let peaks: Vec<_> = refined_maxima(&xs, &mag)
            .into_iter()
            .filter(|p| p.y > 0.1 * top)
            .collect();
        if peaks.len() != 2 {
            ok = false;
            continue;
        }
        let split = peaks[1].x - peaks[0].x;
        let err = (split - 2.0 * group.coupling).abs() / (2.0 * group.coupling);
        worst_split_err = worst_split_err.max(err);
        ok &= err < 0.05;

        // full triplet density: the bus line is split (avoided crossing) at
        // this group frequency -- polariton peaks around a suppressed center
        let mag: Vec<f64> = xs
            .iter()
            .map(|&om| transmission(group, &bus, om).norm())
            .collect();
        let top = mag.iter().cloned().fold(0.0_f64, f64::max);
        let peaks: Vec<_> = refined_maxima(&xs, &mag)
            .into_iter()
            .filter(|p| p.y > 0.1 * top)
            .collect();
        let on_res = transmission(group, &bus, center).norm();
        ok &= peaks.len() >= 2
            && peaks.first().unwrap().x < center
            && peaks.last().unwrap().x > center
            && on_res < 0.5 * top;
    }

    // qubit-bus anticrossing: minimum dressed-state gap over the crossing
    let min_gap = (-500..=500)
        .map(|k| {
            let wb = device.qubit.omega_q + k as f64 * mhz(0.1);
            let (lo, hi) = qubit_bus_anticrossing(&device.qubit, wb);
            hi - lo
        })
        .fold(f64::INFINITY, f64::min);
    let ok_gap = within(to_mhz(min_gap), 14.4, 0.1);

    (
        ok && ok_gap,
        format!(
            "four split bus lines at 2.84/2.865/2.89/2.91 GHz ({}), worst 2g error = \
             {:.1}%, qubit anticrossing gap = {:.2} MHz (14.4 +- 0.1: {})",
            if ok { "ok" } else { "out" },
            100.0 * worst_split_err,
            to_mhz(min_gap),
            if ok_gap { "ok" } else { "out" },
        ),
    )
}

fn criterion_7_aswap(device: &HybridDeviceModel) -> (bool, String) {
    let schedule = default_aswap_schedule();
    let slow = simulate_sweep(&device.qubit, &schedule, None, InitialState::DressedQubit);
    let slow = slow.unwrap();

    let fast_points: Vec<(f64, f64)> = schedule
        .breakpoints()
        .iter()
        .map(|&(t, w)| (t / 10.0, w))
        .collect();
    let fast = simulate_sweep(
        &device.qubit,
        &FluxSchedule::new(fast_points).unwrap(),
        None,
        InitialState::DressedQubit,
    )
    .unwrap();

    let swap_ns = to_ns(device.qubit.resonant_swap_time());
    let ok_slow = slow.adiabatic_transfer >= 0.99;
    let ok_fast = fast.adiabatic_transfer < 0.9;
    let ok_swap = within(swap_ns, 34.7, 0.05);
    (
        ok_slow && ok_fast && ok_swap,
        format!(
            "450 ns sweep transfer = {:.4} (>= 0.99: {}), 45 ns sweep = {:.4} (< 0.9: {}), \
             resonant swap time = {:.2} ns (34.7: {})",
            slow.adiabatic_transfer,
            if ok_slow { "ok" } else { "out" },
            fast.adiabatic_transfer,
            if ok_fast { "ok" } else { "out" },
            swap_ns,
            if ok_swap { "ok" } else { "out" },
        ),
    )
}

fn criterion_8_readout() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let e0 = 0.45 * rng.gen::<f64>();
        let e1 = 0.45 * rng.gen::<f64>();
        let p_eq = 0.45 * rng.gen::<f64>();
        let m = ReadoutErrorModel::new(e0, e1, p_eq).unwrap();
        let p_sw0 = m.switching_probability(p_eq).unwrap();
        let p_sw_pi = m.switching_probability(1.0 - p_eq).unwrap();
        let back = ReadoutErrorModel::calibrate(p_sw0, p_sw_pi, p_eq).unwrap();
        worst = worst.max((back.e0 - e0).abs()).max((back.e1 - e1).abs());
    }
    let ok_random = worst < 1e-12;

    // the published calibration points round-trip exactly
    let a = ReadoutErrorModel::calibrate(0.072, 0.828, 0.08).unwrap();
    let raw = ReadoutErrorModel::new(0.0, 0.33, 0.08).unwrap();
    let b = ReadoutErrorModel::calibrate(
        raw.switching_probability(0.08).unwrap(),
        raw.switching_probability(0.92).unwrap(),
        0.08,
    )
    .unwrap();
    let ok_published = (a.e0 - 0.0).abs() < 1e-12
        && (a.e1 - 0.1).abs() < 1e-12
        && (b.e0 - 0.0).abs() < 1e-12
        && (b.e1 - 0.33).abs() < 1e-12;

    (
        ok_random && ok_published,
        format!(
            "1000 random round trips, worst error = {:.1e} (< 1e-12: {}); published \
             pairs (0, 0.1) and (0, 0.33) recovered ({})",
            worst,
            if ok_random { "ok" } else { "out" },
            if ok_published { "ok" } else { "out" },
        ),
    )
}

fn criterion_9_cross_method(device: &HybridDeviceModel) -> (bool, String) {
    // spectral vs direct ODE integration over [0, 500 ns] for both groups
    let ocfg = OracleConfig {
        n: 8001,
        span: mhz(1200.0),
        dt: None,
    };
    let times = uniform_times(ns(2.5), ns(500.0));
    let mut worst = 0.0_f64;
    for label in [GroupLabel::MinusIII, GroupLabel::MinusI] {
        let group = device.group(label).unwrap();
        let bus = device.bus_on_group(label).unwrap();
        let po = storage_retrieval(group, &bus, &ocfg, &times).unwrap();
        let series = rabi_protocol(group, &bus, &SpectralConfig::default(), ns(500.0)).unwrap();
        let ps = series.magnitudes_squared();
        let stride = (ns(2.5) / series.dt).round() as usize;
        for (i, &p) in po.iter().enumerate() {
            worst = worst.max((p - ps[i * stride]).abs());
        }
    }
    let ok_match = worst < 1e-3;

    // norm conservation at kappa = gamma0 = 0 over 1 us
    let group = device.group(GroupLabel::MinusIII).unwrap();
    let lossless = BusParams::new(group.central_frequency(), 0.0).unwrap();
    let small = OracleConfig {
        n: 801,
        span: mhz(300.0),
        dt: None,
    };
    let norms = excitation_norm(group, &lossless, &small, &[0.0, 1e-6]).unwrap();
    let drift = (norms[1] - norms[0]).abs();
    let ok_norm = drift < 1e-9;

    // zero-linewidth limit: two undamped modes, p = cos^2(g t)
    let g = mhz(3.0);
    let narrow = EnsembleGroup::new(
        GroupLabel::MinusI,
        g,
        SpinDensity::single(ghz(2.84), std::f64::consts::TAU).unwrap(), // 1 Hz
        0.0,
    )
    .unwrap();
    let tiny = OracleConfig {
        n: 101,
        span: mhz(0.01),
        dt: None,
    };
    let resonant = BusParams::new(ghz(2.84), 0.0).unwrap();
    let t2 = uniform_times(ns(0.5), ns(200.0));
    let p2 = storage_retrieval(&narrow, &resonant, &tiny, &t2).unwrap();
    let cos_err = t2
        .iter()
        .zip(&p2)
        .map(|(&t, &p)| (p - (g * t).cos().powi(2)).abs())
        .fold(0.0_f64, f64::max);
    let ok_cos = cos_err < 1e-3;

    (
        ok_match && ok_norm && ok_cos,
        format!(
            "spectral vs ODE max |dp| = {:.1e} (< 1e-3: {}), norm drift = {:.1e}/us \
             (< 1e-9: {}), cos^2(g t) error = {:.1e} (< 1e-3: {})",
            worst,
            if ok_match { "ok" } else { "out" },
            drift,
            if ok_norm { "ok" } else { "out" },
            cos_err,
            if ok_cos { "ok" } else { "out" },
        ),
    )
}

fn criterion_10_parameter_recovery(device: &HybridDeviceModel) -> (bool, String) {
    let group = device.group(GroupLabel::MinusI).unwrap();
    let bus = device.bus_on_group(GroupLabel::MinusI).unwrap();
    let cfg = SpectralConfig::default();
    let series = rabi_protocol(group, &bus, &cfg, ns(400.0)).unwrap();
    let xs: Vec<f64> = series.times().collect();
    let ys = series.magnitudes_squared();
    let fit = fit_curve(
        &FitModel::RabiLinewidth {
            group,
            bus: &bus,
            cfg: &cfg,
        },
        &xs,
        &ys,
        &[mhz(2.1)],
        Some(&[(mhz(0.2), mhz(6.0))]),
    )
    .unwrap();
    let fwhm = to_mhz(fit.params[0]);
    let ok = within(fwhm, 1.6, 0.1);
    (
        ok,
        format!(
            "single-parameter fit recovers fwhm = {:.3} MHz (1.6 +- 0.1: {})",
            fwhm,
            if ok { "ok" } else { "out" },
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let device = HybridDeviceModel::published();
    let criteria: Vec<(&str, Box<dyn Fn() -> (bool, String)>)> = vec![
        (
            "01 storage/retrieval group III",
            Box::new(|| criterion_1_storage_group_iii(&device)),
        ),
        (
            "02 storage/retrieval group I",
            Box::new(|| criterion_2_storage_group_i(&device)),
        ),
        (
            "03 retrieval fidelity & non-exponential damping",
            Box::new(|| criterion_3_retrieval_fidelity(&device)),
        ),
        (
            "04 coherence storage with pi phase jump",
            Box::new(|| criterion_4_coherence(&device)),
        ),
        (
            "05 Ramsey hyperfine triplet & envelope",
            Box::new(|| criterion_5_ramsey(&device)),
        ),
        (
            "06 vacuum Rabi splittings & anticrossings",
            Box::new(|| criterion_6_spectroscopy(&device)),
        ),
        (
            "07 adiabatic qubit-bus transfer",
            Box::new(|| criterion_7_aswap(&device)),
        ),
        ("08 readout calibration round trip", Box::new(criterion_8_readout)),
        (
            "09 spectral vs ODE cross-check",
            Box::new(|| criterion_9_cross_method(&device)),
        ),
        (
            "10 linewidth parameter recovery",
            Box::new(|| criterion_10_parameter_recovery(&device)),
        ),
    ];

    let mut failed = Vec::new();
    for (name, run) in &criteria {
        let (pass, detail) = run();
        println!(
            "[{}] {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
