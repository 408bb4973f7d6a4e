//! Phenomenological bistable-detector readout: Erf S-curves, thermal
//! equilibrium population, and the affine e0/e1 error model relating the
//! qubit excited-state probability to the measured switching probability.

use libm::erf;

use crate::error::{CoreError, Result};
use crate::fit::fit_least_squares;

/// Readout errors: `e0` = switch despite ground state, `e1` = no switch
/// despite excited state, plus the thermal equilibrium excited population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutErrorModel {
    pub e0: f64,
    pub e1: f64,
    pub p_eq: f64,
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CoreError::OutOfRange {
            name,
            value: p,
            range: "[0, 1]".into(),
        });
    }
    Ok(())
}

impl ReadoutErrorModel {
    pub fn new(e0: f64, e1: f64, p_eq: f64) -> Result<Self> {
        check_probability("e0", e0)?;
        check_probability("e1", e1)?;
        check_probability("p_eq", p_eq)?;
        if e0 + e1 >= 1.0 {
            return Err(CoreError::InvalidParameter(format!(
                "e0 + e1 = {} must be < 1 for the readout to be invertible",
                e0 + e1
            )));
        }
        Ok(Self { e0, e1, p_eq })
    }

    /// Forward map `P_sw = e0 (1 - P_e) + (1 - e1) P_e`.
    pub fn switching_probability(&self, p_e: f64) -> Result<f64> {
        check_probability("p_e", p_e)?;
        Ok(self.e0 * (1.0 - p_e) + (1.0 - self.e1) * p_e)
    }

    /// Inverse map. Measured values outside the achievable range
    /// `[e0, 1 - e1]` (noise) are clamped into [0, 1] and flagged.
    pub fn excited_probability(&self, p_sw: f64) -> Result<Inversion> {
        check_probability("p_sw", p_sw)?;
        let raw = (p_sw - self.e0) / (1.0 - self.e0 - self.e1);
        let p_e = raw.clamp(0.0, 1.0);
        Ok(Inversion {
            p_e,
            clamped: raw != p_e,
        })
    }

    /// Solve the 2x2 linear system from the switching probabilities measured
    /// at equilibrium (`p_sw0`) and after a population-inverting pulse
    /// (`p_sw_pi`), given the equilibrium excited population:
    ///
    /// ```text
    /// p_sw0  = e0 (1 - p_eq) + (1 - e1) p_eq
    /// p_sw_pi = e0 p_eq + (1 - e1)(1 - p_eq)
    /// ```
    pub fn calibrate(p_sw0: f64, p_sw_pi: f64, p_eq: f64) -> Result<Self> {
        check_probability("p_sw0", p_sw0)?;
        check_probability("p_sw_pi", p_sw_pi)?;
        check_probability("p_eq", p_eq)?;
        if (p_eq - 0.5).abs() < 1e-12 {
            return Err(CoreError::SingularCalibration);
        }
        if p_eq > 0.5 || p_sw_pi <= p_sw0 {
            return Err(CoreError::InvalidParameter(format!(
                "calibration needs p_eq < 0.5 and p_sw_pi > p_sw0, \
                 got p_eq {p_eq}, p_sw0 {p_sw0}, p_sw_pi {p_sw_pi}"
            )));
        }
        // with a = e0, b = 1 - e1: a + b = p_sw0 + p_sw_pi,
        // a - b = (p_sw0 - p_sw_pi) / (1 - 2 p_eq)
        let sum = p_sw0 + p_sw_pi;
        let diff = (p_sw0 - p_sw_pi) / (1.0 - 2.0 * p_eq);
        let e0 = (sum + diff) / 2.0;
        let e1 = 1.0 - (sum - diff) / 2.0;
        Self::new(e0.max(0.0), e1.max(0.0), p_eq)
    }
}

/// Result of inverting a measured switching probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub p_e: f64,
    /// True when the measured value fell outside the achievable range and
    /// was clamped.
    pub clamped: bool,
}

/// Sum-of-three-Erf switching curve: one threshold/width per qubit state
/// (ground, excited, second excited), weighted by the state populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SCurveModel {
    /// Threshold powers per state (arbitrary power units), ground first.
    pub thresholds: [f64; 3],
    /// Transition widths per state (same units), all positive.
    pub widths: [f64; 3],
    /// State populations, summing to one.
    pub weights: [f64; 3],
}

impl SCurveModel {
    pub fn new(thresholds: [f64; 3], widths: [f64; 3], weights: [f64; 3]) -> Result<Self> {
        if widths.iter().any(|&w| !(w > 0.0)) {
            return Err(CoreError::InvalidParameter(format!(
                "S-curve widths must be positive, got {widths:?}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidParameter(format!(
                "S-curve weights must be non-negative and sum to 1, got {weights:?}"
            )));
        }
        Ok(Self {
            thresholds,
            widths,
            weights,
        })
    }

    /// Switching probability at readout power `power`.
    pub fn eval(&self, power: f64) -> f64 {
        (0..3)
            .map(|s| {
                self.weights[s] * 0.5 * (1.0 + erf((power - self.thresholds[s]) / self.widths[s]))
            })
            .sum()
    }
}

/// Extract the thermal excited population from a pair of S-curves measured
/// at equilibrium and after a population-inverting pulse, by a joint
/// least-squares fit of the three-Erf model with shared thresholds/widths.
///
/// The equilibrium curve carries weights `(1 - q, q, 0)` and the inverted
/// one `(q, 1 - q, 0)`; `q` is returned.
pub fn estimate_thermal_population(
    powers: &[f64],
    scurve_eq: &[f64],
    scurve_pi: &[f64],
) -> Result<f64> {
    if powers.len() != scurve_eq.len() || powers.len() != scurve_pi.len() {
        return Err(CoreError::InvalidParameter(
            "power grid and S-curve sample lengths must match".into(),
        ));
    }
    if powers.len() < 8 {
        return Err(CoreError::TooShort {
            got: powers.len(),
            need: 8,
        });
    }
    // stack both curves into one data set; x >= offset tags the pi curve
    let lo = powers.first().copied().unwrap();
    let hi = powers.last().copied().unwrap();
    let offset = 2.0 * (hi - lo).abs().max(1.0) + hi.abs();
    let mut xs: Vec<f64> = powers.to_vec();
    xs.extend(powers.iter().map(|&p| p + offset));
    let mut ys: Vec<f64> = scurve_eq.to_vec();
    ys.extend_from_slice(scurve_pi);

    // params: [threshold_g, threshold_e, width, q]
    let model = move |p: &[f64], x: f64| {
        let (power, q_weight_on_e) = if x < lo + offset / 2.0 {
            (x, true)
        } else {
            (x - offset, false)
        };
        let q = p[3];
        let (wg, we) = if q_weight_on_e { (1.0 - q, q) } else { (q, 1.0 - q) };
        let w = p[2].abs().max(1e-9);
        wg * 0.5 * (1.0 + erf((power - p[0]) / w)) + we * 0.5 * (1.0 + erf((power - p[1]) / w))
    };
    let span = hi - lo;
    let guess = [lo + 0.6 * span, lo + 0.3 * span, 0.05 * span, 0.1];
    let bounds = [
        (lo, hi),
        (lo, hi),
        (1e-6 * span, span),
        (0.0, 0.5),
    ];
    let fit = fit_least_squares(model, &xs, &ys, &guess, Some(&bounds))?;
    Ok(fit.params[3])
}

/// Two-level thermal population at temperature `t_kelvin` for a transition at
/// angular frequency `omega`: `p = 1 / (1 + exp(hbar omega / kB T))`.
pub fn boltzmann_population(omega: f64, t_kelvin: f64) -> f64 {
    const HBAR: f64 = 1.054_571_817e-34;
    const KB: f64 = 1.380_649e-23;
    1.0 / (1.0 + (HBAR * omega / (KB * t_kelvin)).exp())
}
