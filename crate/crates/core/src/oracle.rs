//! Direct numerical oracle: the ensemble is discretized into N harmonic
//! oscillators and the single-excitation Schrodinger equation is integrated
//! with a fixed-step RK4 scheme, independent of the spectral method.
//!
//! Everything is propagated in a rotating frame at a reference frequency
//! (the group center for resonant protocols, the bus for detuned ones), so
//! the fastest phase in the equations is set by detunings, not by the
//! absolute GHz carrier.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::EnsembleGroup;
use crate::error::{CoreError, Result};
use crate::spectral::{BusParams, TimeSeries};

/// RK4 step-size safety factor: `dt <= MAX_PHASE_PER_STEP / max |detuning|`.
const MAX_PHASE_PER_STEP: f64 = 0.05;

/// Numerical settings for the discretized-ensemble oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Number of discrete oscillators.
    pub n: usize,
    /// Frequency span of the discretization (rad/s), centered on the group.
    pub span: f64,
    /// RK4 step (s); `None` picks the largest step allowed by the phase
    /// criterion automatically.
    pub dt: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n: 4001,
            span: crate::units::mhz(600.0),
            dt: None,
        }
    }
}

/// The ensemble represented as discrete oscillators with frequencies
/// `omegas[j]` and couplings `couplings[j]`.
#[derive(Debug, Clone)]
pub struct DiscretizedEnsemble {
    pub omegas: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl DiscretizedEnsemble {
    /// Uniform discretization of a group's density over `span` around
    /// `center`: `g_j^2 = g^2 rho(omega_j) d_omega`, then renormalized so the
    /// collective coupling `sum g_j^2 = g^2` holds exactly despite the
    /// truncated Lorentzian tails.
    pub fn from_group(group: &EnsembleGroup, n: usize, span: f64, center: f64) -> Result<Self> {
        if n < 2 || !(span > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "discretization needs n >= 2 and positive span, got n {n}, span {span}"
            )));
        }
        let (lo, hi) = group.density.support(20.0);
        if center - span / 2.0 > lo || center + span / 2.0 < hi {
            return Err(CoreError::Coverage(
                "all density components' centers +- 20 linewidths".into(),
            ));
        }
        let step = span / (n - 1) as f64;
        let g2 = group.coupling * group.coupling;
        let mut omegas = Vec::with_capacity(n);
        let mut g2j = Vec::with_capacity(n);
        let mut sum = 0.0;
        for j in 0..n {
            let w = center - span / 2.0 + j as f64 * step;
            let v = g2 * group.density.eval(w) * step;
            omegas.push(w);
            g2j.push(v);
            sum += v;
        }
        let renorm = (g2 / sum).sqrt();
        let couplings = g2j.iter().map(|v| v.sqrt() * renorm).collect();
        Ok(Self { omegas, couplings })
    }

    /// Collective coupling `sqrt(sum g_j^2)`.
    pub fn total_coupling(&self) -> f64 {
        self.couplings.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Right-hand side of the single-excitation equations in the rotating frame.
struct Rhs {
    /// Complex bus detuning `(omega_b - ref) - i kappa/2`.
    db: Complex64,
    /// Complex spin detunings `(omega_j - ref) - i gamma0/2`.
    ds: Vec<Complex64>,
    gj: Vec<f64>,
}

impl Rhs {
    fn new(ens: &DiscretizedEnsemble, bus: &BusParams, gamma0: f64, reference: f64) -> Self {
        Self {
            db: Complex64::new(bus.omega_b - reference, -bus.kappa / 2.0),
            ds: ens
                .omegas
                .iter()
                .map(|&w| Complex64::new(w - reference, -gamma0 / 2.0))
                .collect(),
            gj: ens.couplings.clone(),
        }
    }

    /// Largest phase velocity appearing in the equations (rad/s).
    fn max_detuning(&self) -> f64 {
        let spins = self
            .ds
            .iter()
            .map(|d| d.norm())
            .fold(0.0_f64, f64::max);
        spins.max(self.db.norm()).max(self.gj.iter().sum::<f64>())
    }

    fn eval(&self, y: &[Complex64], out: &mut [Complex64]) {
        const I: Complex64 = Complex64::new(0.0, 1.0);
        let mut drive = Complex64::new(0.0, 0.0);
        for (g, yj) in self.gj.iter().zip(&y[1..]) {
            drive += g * yj;
        }
        out[0] = -I * self.db * y[0] + drive;
        for j in 0..self.gj.len() {
            out[j + 1] = -I * self.ds[j] * y[j + 1] - self.gj[j] * y[0];
        }
    }
}

/// Fixed-step RK4 propagator over one interval, reusing scratch buffers.
struct Propagator {
    rhs: Rhs,
    dt: f64,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Propagator {
    fn new(rhs: Rhs, dt: Option<f64>) -> Result<Self> {
        let max_det = rhs.max_detuning();
        let dt_max = if max_det > 0.0 {
            MAX_PHASE_PER_STEP / max_det
        } else {
            f64::INFINITY
        };
        let dt = match dt {
            Some(dt) => {
                if dt > dt_max * (1.0 + 1e-12) {
                    return Err(CoreError::StepSize {
                        dt,
                        max_detuning: max_det,
                    });
                }
                dt
            }
            None => dt_max.min(1e-10),
        };
        let dim = rhs.gj.len() + 1;
        Ok(Self {
            rhs,
            dt,
            k1: vec![Complex64::new(0.0, 0.0); dim],
            k2: vec![Complex64::new(0.0, 0.0); dim],
            k3: vec![Complex64::new(0.0, 0.0); dim],
            k4: vec![Complex64::new(0.0, 0.0); dim],
            tmp: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    fn advance(&mut self, y: &mut [Complex64], duration: f64, elapsed: f64) -> Result<()> {
        if duration <= 0.0 {
            return Ok(());
        }
        let steps = (duration / self.dt).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        for _ in 0..steps {
            self.rhs.eval(y, &mut self.k1);
            for i in 0..y.len() {
                self.tmp[i] = y[i] + 0.5 * h * self.k1[i];
            }
            self.rhs.eval(&self.tmp, &mut self.k2);
            for i in 0..y.len() {
                self.tmp[i] = y[i] + 0.5 * h * self.k2[i];
            }
            self.rhs.eval(&self.tmp, &mut self.k3);
            for i in 0..y.len() {
                self.tmp[i] = y[i] + h * self.k3[i];
            }
            self.rhs.eval(&self.tmp, &mut self.k4);
            for i in 0..y.len() {
                y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
            }
        }
        if !y[0].re.is_finite() || !y[0].im.is_finite() {
            return Err(CoreError::NumericalInstability(elapsed + duration));
        }
        Ok(())
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(CoreError::TooShort { got: 0, need: 1 });
    }
    if times[0] < 0.0 || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(CoreError::InvalidParameter(
            "sample times must be non-negative and non-decreasing".into(),
        ));
    }
    Ok(())
}

/// Evolve an initial state and record a projection at each sample time.
fn run_trajectory<F>(
    ens: &DiscretizedEnsemble,
    bus: &BusParams,
    gamma0: f64,
    reference: f64,
    dt: Option<f64>,
    initial: Vec<Complex64>,
    times: &[f64],
    mut record: F,
) -> Result<()>
where
    F: FnMut(&[Complex64]),
{
    validate_times(times)?;
    let mut prop = Propagator::new(Rhs::new(ens, bus, gamma0, reference), dt)?;
    let mut y = initial;
    let mut t_cur = 0.0;
    for &t in times {
        prop.advance(&mut y, t - t_cur, t_cur)?;
        t_cur = t;
        record(&y);
    }
    Ok(())
}

fn bus_excited(dim: usize) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    y[0] = Complex64::new(1.0, 0.0);
    y
}

/// Bus amplitude `alpha(t)` for a photon created in the bus at t = 0, in the
/// rotating frame at the group center.
pub fn bus_amplitude(
    group: &EnsembleGroup,
    bus: &BusParams,
    cfg: &OracleConfig,
    times: &[f64],
) -> Result<Vec<Complex64>> {
    let reference = group.central_frequency();
    let ens = DiscretizedEnsemble::from_group(group, cfg.n, cfg.span, reference)?;
    let mut out = Vec::with_capacity(times.len());
    run_trajectory(
        &ens,
        bus,
        group.gamma0,
        reference,
        cfg.dt,
        bus_excited(cfg.n + 1),
        times,
        |y| out.push(y[0]),
    )?;
    Ok(out)
}

/// Photon survival probability `p(t) = |alpha(t)|^2` of the storage/retrieval
/// cycle that begins with one photon in the resonant bus.
pub fn storage_retrieval(
    group: &EnsembleGroup,
    bus: &BusParams,
    cfg: &OracleConfig,
    times: &[f64],
) -> Result<Vec<f64>> {
    Ok(bus_amplitude(group, bus, cfg, times)?
        .iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// Total excitation norm `sum |y_i|^2` over the storage/retrieval evolution;
/// conserved exactly when `kappa = gamma0 = 0`, so its drift measures the
/// integrator error.
pub fn excitation_norm(
    group: &EnsembleGroup,
    bus: &BusParams,
    cfg: &OracleConfig,
    times: &[f64],
) -> Result<Vec<f64>> {
    let reference = group.central_frequency();
    let ens = DiscretizedEnsemble::from_group(group, cfg.n, cfg.span, reference)?;
    let mut out = Vec::with_capacity(times.len());
    run_trajectory(
        &ens,
        bus,
        group.gamma0,
        reference,
        cfg.dt,
        bus_excited(cfg.n + 1),
        times,
        |y| out.push(y.iter().map(|v| v.norm_sqr()).sum()),
    )?;
    Ok(out)
}

/// Vacuum-Rabi chevron: `p(t)` columns for each bus detuning from the group
/// center. Columns are independent and run in parallel.
pub fn chevron_scan(
    group: &EnsembleGroup,
    kappa: f64,
    detunings: &[f64],
    cfg: &OracleConfig,
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let center = group.central_frequency();
    detunings
        .par_iter()
        .map(|&delta| {
            let bus = BusParams::new(center + delta, kappa)?;
            storage_retrieval(group, &bus, cfg, times)
        })
        .collect()
}

/// Single-photon Ramsey amplitude by direct integration: the bus is detuned
/// from the lines, the state `(x_G - x_S)/sqrt(2)` is prepared, and
/// `alpha(tau) = <v| e^{-i H tau} |v>` is recorded at each sample time. The
/// rotating frame is at the (detuned) bus frequency, matching the spectral
/// Ramsey amplitude.
pub fn ramsey_oracle(
    group: &EnsembleGroup,
    bus_detuned: &BusParams,
    cfg: &OracleConfig,
    times: &[f64],
) -> Result<Vec<Complex64>> {
    let ens = DiscretizedEnsemble::from_group(
        group,
        cfg.n,
        cfg.span,
        group.central_frequency(),
    )?;
    let g = ens.total_coupling();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![Complex64::new(0.0, 0.0); cfg.n + 1];
    v[0] = Complex64::new(half, 0.0);
    for j in 0..cfg.n {
        v[j + 1] = Complex64::new(-ens.couplings[j] / g * half, 0.0);
    }
    // The cross elements of the propagator are antisymmetric (t3 = -t4), so
    // the second pi/2 projects the evolved state onto (x_G + x_S)/sqrt(2),
    // the sign-flipped partner of the prepared (x_G - x_S)/sqrt(2).
    let mut u = v.clone();
    for uj in u.iter_mut().skip(1) {
        *uj = -*uj;
    }
    let mut out = Vec::with_capacity(times.len());
    run_trajectory(
        &ens,
        bus_detuned,
        group.gamma0,
        bus_detuned.omega_b,
        cfg.dt,
        v,
        times,
        |y| {
            let mut a = Complex64::new(0.0, 0.0);
            for (ui, yi) in u.iter().zip(y) {
                a += ui * yi;
            }
            out.push(a);
        },
    )?;
    Ok(out)
}

/// Finite-pulse Ramsey sequence by direct integration: the photon starts in
/// the resonant bus, interacts for `tau_half_swap` (the pi/2 analogue), the
/// bus jumps instantaneously to `delta` above the group center for the free
/// evolution time, jumps back, and interacts for `tau_half_swap` again.
/// Returns the bus survival probability for each free-evolution time.
///
/// In the two-mode, lossless, well-detuned limit this reduces to the ideal
/// interferometer `p(tau) = sin^2(delta tau / 2)`.
pub fn ramsey_sequence(
    group: &EnsembleGroup,
    kappa: f64,
    delta: f64,
    tau_half_swap: f64,
    cfg: &OracleConfig,
    taus: &[f64],
) -> Result<Vec<f64>> {
    validate_times(taus)?;
    if !(tau_half_swap > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "tau_half_swap must be positive, got {tau_half_swap}"
        )));
    }
    let center = group.central_frequency();
    let ens = DiscretizedEnsemble::from_group(group, cfg.n, cfg.span, center)?;
    let bus_res = BusParams::new(center, kappa)?;
    let bus_det = BusParams::new(center + delta, kappa)?;

    // first resonant interaction
    let mut prop_res = Propagator::new(Rhs::new(&ens, &bus_res, group.gamma0, center), cfg.dt)?;
    let mut y = bus_excited(cfg.n + 1);
    prop_res.advance(&mut y, tau_half_swap, 0.0)?;

    // detuned plateau, snapshotted at every requested free-evolution time
    let mut prop_det = Propagator::new(Rhs::new(&ens, &bus_det, group.gamma0, center), cfg.dt)?;
    let mut snapshots = Vec::with_capacity(taus.len());
    let mut t_cur = 0.0;
    for &tau in taus {
        prop_det.advance(&mut y, tau - t_cur, tau_half_swap + t_cur)?;
        t_cur = tau;
        snapshots.push(y.clone());
    }

    // second resonant interaction, independent per snapshot
    snapshots
        .into_par_iter()
        .map(|mut y| {
            let mut prop =
                Propagator::new(Rhs::new(&ens, &bus_res, group.gamma0, center), cfg.dt)?;
            prop.advance(&mut y, tau_half_swap, 0.0)?;
            Ok(y[0].norm_sqr())
        })
        .collect()
}

/// Uniform sample times `0, dt, 2dt, ...` up to `max_time` as a plain vector.
pub fn uniform_times(dt: f64, max_time: f64) -> Vec<f64> {
    let n = (max_time / dt).floor() as usize + 1;
    (0..n).map(|i| i as f64 * dt).collect()
}

/// Pack sampled probabilities into a `TimeSeries` (imaginary parts zero) for
/// interoperability with the spectral results.
pub fn probabilities_to_series(dt: f64, ps: &[f64]) -> TimeSeries {
    TimeSeries {
        dt,
        values: ps.iter().map(|&p| Complex64::new(p, 0.0)).collect(),
    }
}
