//! Frequency-domain observables and analysis: bus transmission, the
//! qubit-bus anticrossing, FFT peak extraction from time series, and the
//! model catalog for least-squares fits.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::density::EnsembleGroup;
use crate::error::{CoreError, Result};
use crate::fit::{fit_least_squares, FitResult};
use crate::flux::QubitBusPair;
use crate::spectral::{rabi_protocol, transfer_t1, BusParams, SpectralConfig, TimeSeries};

/// Two-port transmission `S21(omega) = (kappa/2) t1(-i omega) / i`:
/// symmetric coupling, unit magnitude on bare-resonator resonance.
pub fn transmission(group: &EnsembleGroup, bus: &BusParams, omega: f64) -> Complex64 {
    const I: Complex64 = Complex64::new(0.0, 1.0);
    bus.kappa / 2.0 * transfer_t1(group, bus, omega) / I
}

/// `|S21|` in dB.
pub fn transmission_db(group: &EnsembleGroup, bus: &BusParams, omega: f64) -> f64 {
    20.0 * transmission(group, bus, omega).norm().log10()
}

/// Dressed eigenfrequencies (lower, upper) of the coupled qubit-bus pair at
/// bus frequency `omega_b`.
pub fn qubit_bus_anticrossing(pair: &QubitBusPair, omega_b: f64) -> (f64, f64) {
    let mean = 0.5 * (pair.omega_q + omega_b);
    let half_gap = 0.5 * ((pair.omega_q - omega_b).powi(2) + 4.0 * pair.g_q * pair.g_q).sqrt();
    (mean - half_gap, mean + half_gap)
}

/// One extracted spectral peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Angular frequency (rad/s), quadratically interpolated.
    pub frequency: f64,
    /// Magnitude of the windowed spectrum at the peak.
    pub height: f64,
    /// Full width at half maximum (rad/s), from interpolated crossings.
    pub width: f64,
}

/// Peaks sorted by ascending frequency.
#[derive(Debug, Clone, Default)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn frequencies(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.frequency).collect()
    }
}

/// Spectral analysis window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// Hann window; beating envelopes leak badly without it.
    #[default]
    Hann,
    /// Raw FFT, for parity with unwindowed insets.
    Rectangular,
}

/// Options for `fft_spectrum`.
#[derive(Debug, Clone, Copy)]
pub struct FftOptions {
    pub window: Window,
    /// Peaks below this fraction of the spectral maximum are discarded.
    pub threshold: f64,
    /// Zero-padding factor for interpolation of the discrete spectrum.
    pub zero_pad: usize,
    /// Optional moving-average detrending window (s); `None` removes only
    /// the mean. Slowly decaying baselines (storage/retrieval envelopes)
    /// otherwise bury nearby peaks under the DC skirt.
    pub baseline_window: Option<f64>,
}

impl Default for FftOptions {
    fn default() -> Self {
        Self {
            window: Window::Hann,
            threshold: 0.1,
            zero_pad: 8,
            baseline_window: None,
        }
    }
}

/// Detrended, windowed, zero-padded magnitude spectrum of a real series.
/// Returns `(angular frequencies, magnitudes)` up to the Nyquist frequency.
pub fn magnitude_spectrum(
    series: &[f64],
    dt: f64,
    opts: &FftOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = series.len();
    if n < 64 {
        return Err(CoreError::TooShort { got: n, need: 64 });
    }
    if !(dt > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "sample step must be positive, got {dt}"
        )));
    }

    // detrend
    let mut y: Vec<f64> = match opts.baseline_window {
        Some(win) => {
            let half = ((win / dt / 2.0).round() as usize).max(1);
            (0..n)
                .map(|i| {
                    let lo = i.saturating_sub(half);
                    let hi = (i + half + 1).min(n);
                    let mean: f64 = series[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
                    series[i] - mean
                })
                .collect()
        }
        None => {
            let mean: f64 = series.iter().sum::<f64>() / n as f64;
            series.iter().map(|v| v - mean).collect()
        }
    };

    if let Window::Hann = opts.window {
        for (i, v) in y.iter_mut().enumerate() {
            let w = 0.5
                * (1.0 - (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos());
            *v *= w;
        }
    }

    let m = (n * opts.zero_pad.max(1)).next_power_of_two();
    let mut buf: Vec<Complex64> = y
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(m)
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let half = m / 2;
    let domega = std::f64::consts::TAU / (m as f64 * dt);
    let freqs = (0..half).map(|i| i as f64 * domega).collect();
    let mags = buf[..half].iter().map(|v| v.norm()).collect();
    Ok((freqs, mags))
}

/// Magnitude spectrum peak extraction from a uniformly sampled real series.
pub fn fft_spectrum(series: &[f64], dt: f64, opts: &FftOptions) -> Result<PeakSet> {
    let (freqs, mag) = magnitude_spectrum(series, dt, opts)?;
    let half = mag.len();
    let domega = freqs[1] - freqs[0];
    let max_mag = mag.iter().cloned().fold(0.0_f64, f64::max);
    if max_mag == 0.0 {
        return Ok(PeakSet::default());
    }

    let mut peaks = Vec::new();
    for i in 1..half - 1 {
        if mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > opts.threshold * max_mag {
            // quadratic interpolation of the vertex
            let (a, b, c) = (mag[i - 1], mag[i], mag[i + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom.abs() > 0.0 {
                0.5 * (a - c) / denom
            } else {
                0.0
            };
            let freq = (i as f64 + shift) * domega;
            let height = b - 0.25 * (a - c) * shift;
            // half-maximum crossings by linear interpolation
            let hm = height / 2.0;
            let mut lo = i;
            while lo > 0 && mag[lo] > hm {
                lo -= 1;
            }
            let mut hi = i;
            while hi < half - 1 && mag[hi] > hm {
                hi += 1;
            }
            let left = if mag[lo] <= hm && mag[lo + 1] > hm {
                lo as f64 + (hm - mag[lo]) / (mag[lo + 1] - mag[lo])
            } else {
                lo as f64
            };
            let right = if mag[hi] <= hm && mag[hi - 1] > hm {
                hi as f64 - (hm - mag[hi]) / (mag[hi - 1] - mag[hi])
            } else {
                hi as f64
            };
            peaks.push(Peak {
                frequency: freq,
                height,
                width: (right - left) * domega,
            });
        }
    }
    peaks.sort_by(|p, q| p.frequency.partial_cmp(&q.frequency).unwrap());
    Ok(PeakSet { peaks })
}

/// The hyperfine Ramsey fringe:
/// `exp(-tau/T2*) sum_{i=-1..1} cos((delta + i a_hf) tau)`, with `delta` and
/// `a_hf` as angular frequencies.
pub fn ramsey_fringe_model(tau: f64, delta: f64, a_hf: f64, t2_star: f64) -> f64 {
    let env = (-tau / t2_star).exp();
    env * ((delta - a_hf) * tau).cos()
        + env * (delta * tau).cos()
        + env * ((delta + a_hf) * tau).cos()
}

/// Catalog of fit models usable through `fit_curve`.
pub enum FitModel<'a> {
    /// Params `[amp, offset, delta, a_hf, t2_star]` (rad/s and s); the fringe
    /// model scaled and offset.
    RamseyFringe,
    /// `peaks` equal-width Lorentzians: params
    /// `[offset, fwhm, center_1, amp_1, ..., center_n, amp_n]`.
    LorentzianMultiplet { peaks: usize },
    /// Storage/retrieval curve with the line fwhm as the only parameter
    /// `[fwhm]`; everything else fixed by the supplied group and bus.
    RabiLinewidth {
        group: &'a EnsembleGroup,
        bus: &'a BusParams,
        cfg: &'a SpectralConfig,
    },
}

impl FitModel<'_> {
    pub fn parameter_count(&self) -> usize {
        match self {
            FitModel::RamseyFringe => 5,
            FitModel::LorentzianMultiplet { peaks } => 2 + 2 * peaks,
            FitModel::RabiLinewidth { .. } => 1,
        }
    }
}

fn lorentzian_peak(x: f64, center: f64, fwhm: f64) -> f64 {
    let hw = fwhm / 2.0;
    hw * hw / ((x - center).powi(2) + hw * hw)
}

/// Nonlinear least-squares fit of a cataloged model to `(xs, ys)` data.
pub fn fit_curve(
    model: &FitModel<'_>,
    xs: &[f64],
    ys: &[f64],
    initial: &[f64],
    bounds: Option<&[(f64, f64)]>,
) -> Result<FitResult> {
    if initial.len() != model.parameter_count() {
        return Err(CoreError::InvalidParameter(format!(
            "model expects {} parameters, got {}",
            model.parameter_count(),
            initial.len()
        )));
    }
    match model {
        FitModel::RamseyFringe => fit_least_squares(
            |p, tau| p[0] * ramsey_fringe_model(tau, p[2], p[3], p[4]) + p[1],
            xs,
            ys,
            initial,
            bounds,
        ),
        FitModel::LorentzianMultiplet { peaks } => {
            let n = *peaks;
            fit_least_squares(
                move |p, x| {
                    let mut v = p[0];
                    for k in 0..n {
                        v += p[3 + 2 * k] * lorentzian_peak(x, p[2 + 2 * k], p[1].abs());
                    }
                    v
                },
                xs,
                ys,
                initial,
                bounds,
            )
        }
        FitModel::RabiLinewidth { group, bus, cfg } => {
            let max_time = xs.iter().cloned().fold(0.0_f64, f64::max);
            // the protocol is expensive, so cache the curve per parameter value
            let cache: RefCell<Option<(f64, TimeSeries)>> = RefCell::new(None);
            let eval = move |p: &[f64], tau: f64| -> f64 {
                let fwhm = p[0].abs().max(1.0);
                {
                    let mut slot = cache.borrow_mut();
                    let stale = match &*slot {
                        Some((f, _)) => (*f - fwhm).abs() > 0.0,
                        None => true,
                    };
                    if stale {
                        let mut g = (*group).clone();
                        g.density = rebuild_density(&g.density, fwhm);
                        let series = rabi_protocol(&g, bus, cfg, max_time * 1.0001)
                            .expect("rabi protocol inside fit");
                        *slot = Some((fwhm, series));
                    }
                }
                let slot = cache.borrow();
                let (_, series) = slot.as_ref().unwrap();
                // linear interpolation on the series grid
                let pos = tau / series.dt;
                let i = (pos.floor() as usize).min(series.values.len() - 2);
                let f = pos - i as f64;
                let p0 = series.values[i].norm_sqr();
                let p1 = series.values[i + 1].norm_sqr();
                p0 + f * (p1 - p0)
            };
            fit_least_squares(eval, xs, ys, initial, bounds)
        }
    }
}

/// A refined local extremum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub y: f64,
}

fn refined_extrema(xs: &[f64], ys: &[f64], maxima: bool) -> Vec<Extremum> {
    let sign = if maxima { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        let (a, b, c) = (sign * ys[i - 1], sign * ys[i], sign * ys[i + 1]);
        if b > a && b >= c {
            // parabolic vertex through the three samples
            let denom = a - 2.0 * b + c;
            let shift = if denom.abs() > 0.0 {
                0.5 * (a - c) / denom
            } else {
                0.0
            };
            let dx = xs[i] - xs[i - 1];
            out.push(Extremum {
                x: xs[i] + shift * dx,
                y: sign * (b - 0.25 * (a - c) * shift),
            });
        }
    }
    out
}

/// Local maxima of a sampled curve, parabolic-refined.
pub fn refined_maxima(xs: &[f64], ys: &[f64]) -> Vec<Extremum> {
    refined_extrema(xs, ys, true)
}

/// Local minima of a sampled curve, parabolic-refined.
pub fn refined_minima(xs: &[f64], ys: &[f64]) -> Vec<Extremum> {
    refined_extrema(xs, ys, false)
}

/// Same component structure, all component widths replaced by `fwhm`.
fn rebuild_density(
    density: &crate::density::SpinDensity,
    fwhm: f64,
) -> crate::density::SpinDensity {
    let comps = density
        .components()
        .iter()
        .map(|c| {
            crate::density::LorentzianComponent::new(c.center, fwhm, c.weight)
                .expect("valid component")
        })
        .collect();
    crate::density::SpinDensity::new(comps).expect("valid density")
}
