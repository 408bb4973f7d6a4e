//! Flux tuning of the bus resonator (SQUID participation model) and the
//! adiabatic qubit-bus transfer (aSWAP) driven by a piecewise-linear flux
//! ramp of the bus frequency through the qubit resonance.

use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Bus frequency vs applied flux for a resonator terminated by a SQUID:
///
/// ```text
/// omega(phi) = omega_max sqrt(c / (c + p (1 - c))),   c = cos(pi phi)
/// ```
///
/// with `phi` in units of the flux quantum and `p` the SQUID inductance
/// participation ratio. Valid on `|phi| < 1/2`, where the curve decreases
/// monotonically from `omega_max` toward zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningCurve {
    /// Zero-flux (maximum) frequency (rad/s).
    pub omega_max: f64,
    /// Participation ratio, 0 < p < 1.
    pub participation: f64,
}

impl TuningCurve {
    pub fn new(omega_max: f64, participation: f64) -> Result<Self> {
        if !(omega_max > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "omega_max must be positive, got {omega_max}"
            )));
        }
        if !(participation > 0.0 && participation < 1.0) {
            return Err(CoreError::OutOfRange {
                name: "participation",
                value: participation,
                range: "(0, 1)".into(),
            });
        }
        Ok(Self {
            omega_max,
            participation,
        })
    }

    /// Calibrate the participation ratio from one measured anchor point
    /// `omega(flux_ref) = omega_ref`. Closed form:
    /// `p = c (1 - r^2) / (r^2 (1 - c))` with `c = cos(pi flux_ref)`,
    /// `r = omega_ref / omega_max`.
    pub fn calibrated(omega_max: f64, flux_ref: f64, omega_ref: f64) -> Result<Self> {
        if flux_ref.abs() >= 0.5 {
            return Err(CoreError::SingularFlux(flux_ref));
        }
        if !(flux_ref.abs() > 0.0) || !(omega_ref > 0.0) || omega_ref >= omega_max {
            return Err(CoreError::InvalidParameter(format!(
                "calibration needs 0 < |flux_ref| < 0.5 and 0 < omega_ref < omega_max, \
                 got flux_ref {flux_ref}, omega_ref {omega_ref}"
            )));
        }
        let c = (std::f64::consts::PI * flux_ref).cos();
        let r2 = (omega_ref / omega_max).powi(2);
        let p = c * (1.0 - r2) / (r2 * (1.0 - c));
        Self::new(omega_max, p)
    }

    pub fn omega_of_flux(&self, flux: f64) -> Result<f64> {
        if flux.abs() >= 0.5 {
            return Err(CoreError::SingularFlux(flux));
        }
        let c = (std::f64::consts::PI * flux).cos();
        Ok(self.omega_max * (c / (c + self.participation * (1.0 - c))).sqrt())
    }

    /// Inverse of the tuning curve on its positive branch (`flux >= 0`).
    pub fn flux_of_omega(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) || omega > self.omega_max {
            return Err(CoreError::OutOfRange {
                name: "omega",
                value: omega,
                range: format!("(0, {}]", self.omega_max),
            });
        }
        let r2 = (omega / self.omega_max).powi(2);
        let p = self.participation;
        let c = p * r2 / (1.0 - r2 + p * r2);
        Ok(c.clamp(-1.0, 1.0).acos() / std::f64::consts::PI)
    }
}

/// Piecewise-linear bus-frequency schedule: `(time, omega)` breakpoints,
/// held constant before the first and after the last.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSchedule {
    points: Vec<(f64, f64)>,
}

impl FluxSchedule {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(CoreError::InvalidParameter(
                "schedule needs at least one breakpoint".into(),
            ));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(CoreError::InvalidParameter(
                "schedule breakpoint times must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn duration(&self) -> f64 {
        self.points.last().unwrap().0
    }

    pub fn omega_at(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            let ((t0, w0), (t1, w1)) = (w[0], w[1]);
            if t <= t1 {
                return w0 + (w1 - w0) * (t - t0) / (t1 - t0);
            }
        }
        pts.last().unwrap().1
    }
}

/// The three-segment bus ramp used for the adiabatic qubit-bus transfer:
/// slow through the avoided crossing, faster on the approach and exit.
pub fn default_aswap_schedule() -> FluxSchedule {
    use crate::units::{ghz, ns};
    FluxSchedule::new(vec![
        (0.0, ghz(2.52)),
        (ns(60.0), ghz(2.589)),
        (ns(410.0), ghz(2.643)),
        (ns(450.0), ghz(2.687)),
    ])
    .unwrap()
}

/// The qubit and bus as an isolated two-level transfer problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBusPair {
    /// Qubit transition frequency (rad/s).
    pub omega_q: f64,
    /// Qubit-bus coupling (rad/s).
    pub g_q: f64,
}

impl QubitBusPair {
    pub fn new(omega_q: f64, g_q: f64) -> Result<Self> {
        if !(omega_q > 0.0) || !(g_q > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "qubit frequency and coupling must be positive, got {omega_q}, {g_q}"
            )));
        }
        Ok(Self { omega_q, g_q })
    }

    /// Duration of a full resonant swap, `pi / (2 g_q)`.
    pub fn resonant_swap_time(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / self.g_q
    }
}

/// Diabatic (transfer-failure) probability for a linear crossing at rate
/// `|d Delta / dt|`: `exp(-2 pi g^2 / rate)`.
pub fn landau_zener_probability(g: f64, rate: f64) -> f64 {
    (-std::f64::consts::TAU * g * g / rate).exp()
}

/// How the excitation is prepared before the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// The bare qubit level; appropriate when the bus starts on resonance.
    BareQubit,
    /// The qubit-like instantaneous eigenstate at the initial detuning.
    /// This is the stationary excited state of the coupled system when the
    /// sweep starts far detuned, and the natural reference for adiabatic
    /// transfer figures.
    #[default]
    DressedQubit,
}

/// Result of integrating the two-level sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub times: Vec<f64>,
    /// Bus population `|<bus|psi>|^2` over the sweep.
    pub bus_population: Vec<f64>,
    /// Final population of the bare bus level.
    pub bare_transfer: f64,
    /// Final population of the bus-like instantaneous eigenstate; this is the
    /// transfer figure once the residual `g^2/Delta^2` dressing at the finite
    /// end detuning is accounted for.
    pub adiabatic_transfer: f64,
}

/// Integrate the excitation transfer for a bus-frequency schedule. The state
/// starts in the qubit; in the frame rotating at the qubit frequency the
/// Hamiltonian is `[[0, g], [g, Delta(t)]]` with `Delta = omega_b - omega_q`.
pub fn simulate_sweep(
    pair: &QubitBusPair,
    schedule: &FluxSchedule,
    dt: Option<f64>,
    initial: InitialState,
) -> Result<SweepResult> {
    let max_delta = schedule
        .breakpoints()
        .iter()
        .map(|&(_, w)| (w - pair.omega_q).abs())
        .fold(pair.g_q, f64::max);
    let dt_max = crate::units::ns(0.05).min(0.05 / max_delta);
    let dt = match dt {
        Some(dt) => {
            if dt > 0.05 / max_delta * (1.0 + 1e-12) {
                return Err(CoreError::StepSize {
                    dt,
                    max_detuning: max_delta,
                });
            }
            dt
        }
        None => dt_max,
    };
    let total = schedule.duration();
    let steps = (total / dt).ceil().max(1.0) as usize;
    let h = total / steps as f64;

    let deriv = |t: f64, y: &[Complex64; 2]| -> [Complex64; 2] {
        const I: Complex64 = Complex64::new(0.0, 1.0);
        let delta = schedule.omega_at(t) - pair.omega_q;
        [
            -I * (pair.g_q * y[1]),
            -I * (pair.g_q * y[0] + delta * y[1]),
        ]
    };

    // upper-branch eigenvector (sin theta, cos theta) in the (qubit, bus)
    // basis, with tan(2 theta) = 2g/Delta; it is qubit-like for Delta < 0
    // and bus-like for Delta > 0, so the sweep transfers along it.
    let mixing = |delta: f64| 0.5 * (2.0 * pair.g_q).atan2(delta);
    let mut y = match initial {
        InitialState::BareQubit => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        InitialState::DressedQubit => {
            let th = mixing(schedule.omega_at(0.0) - pair.omega_q);
            [
                Complex64::new(th.sin(), 0.0),
                Complex64::new(th.cos(), 0.0),
            ]
        }
    };
    let mut times = Vec::with_capacity(steps + 1);
    let mut pop = Vec::with_capacity(steps + 1);
    times.push(0.0);
    pop.push(y[1].norm_sqr());
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = deriv(t, &y);
        let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
        let k2 = deriv(t + 0.5 * h, &y2);
        let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
        let k3 = deriv(t + 0.5 * h, &y3);
        let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
        let k4 = deriv(t + h, &y4);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        times.push(t + h);
        pop.push(y[1].norm_sqr());
    }
    if !y[1].norm_sqr().is_finite() {
        return Err(CoreError::NumericalInstability(total));
    }

    // Overlap with the bus-like (upper-branch) eigenstate at the final
    // detuning.
    let theta = mixing(schedule.omega_at(total) - pair.omega_q);
    let overlap = theta.sin() * y[0] + theta.cos() * y[1];

    Ok(SweepResult {
        times,
        bus_population: pop,
        bare_transfer: y[1].norm_sqr(),
        adiabatic_transfer: overlap.norm_sqr(),
    })
}
