//! Spin spectral densities: weighted sums of Lorentzian lines, including the
//! nitrogen hyperfine triplet, and the ensemble groups built from them.

use std::fmt;
use std::str::FromStr;

use crate::error::{CoreError, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A single Lorentzian line of the spin density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianComponent {
    /// Line center, angular frequency (rad/s).
    pub center: f64,
    /// Full width at half maximum (rad/s).
    pub fwhm: f64,
    /// Dimensionless weight; a full density's weights sum to one.
    pub weight: f64,
}

impl LorentzianComponent {
    pub fn new(center: f64, fwhm: f64, weight: f64) -> Result<Self> {
        if !(fwhm > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "Lorentzian fwhm must be positive, got {fwhm}"
            )));
        }
        if !(weight > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "Lorentzian weight must be positive, got {weight}"
            )));
        }
        Ok(Self {
            center,
            fwhm,
            weight,
        })
    }

    /// Pointwise value of this (weighted) line at `omega`, in s/rad.
    pub fn eval(&self, omega: f64) -> f64 {
        let hw = self.fwhm / 2.0;
        self.weight * hw / std::f64::consts::PI / ((omega - self.center).powi(2) + hw * hw)
    }
}

/// Normalized spin spectral density rho(omega): a weighted sum of Lorentzians.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDensity {
    components: Vec<LorentzianComponent>,
}

impl SpinDensity {
    pub fn new(components: Vec<LorentzianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(CoreError::InvalidParameter(
                "spin density needs at least one component".into(),
            ));
        }
        let sum: f64 = components.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(CoreError::InvalidParameter(format!(
                "component weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { components })
    }

    /// A single unit-weight Lorentzian line.
    pub fn single(center: f64, fwhm: f64) -> Result<Self> {
        Self::new(vec![LorentzianComponent::new(center, fwhm, 1.0)?])
    }

    /// The hyperfine triplet: three equal-weight Lorentzians at
    /// `center - hf_splitting`, `center`, `center + hf_splitting`.
    ///
    /// `hf_splitting = 0` degenerates to a single line of weight one.
    pub fn hyperfine(center: f64, hf_splitting: f64, peak_fwhm: f64) -> Result<Self> {
        if !(peak_fwhm > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "hyperfine peak fwhm must be positive, got {peak_fwhm}"
            )));
        }
        if hf_splitting < 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "hyperfine splitting must be non-negative, got {hf_splitting}"
            )));
        }
        let w = 1.0 / 3.0;
        Self::new(vec![
            LorentzianComponent::new(center - hf_splitting, peak_fwhm, w)?,
            LorentzianComponent::new(center, peak_fwhm, w)?,
            LorentzianComponent::new(center + hf_splitting, peak_fwhm, w)?,
        ])
    }

    pub fn components(&self) -> &[LorentzianComponent] {
        &self.components
    }

    /// Pointwise rho(omega), in s/rad.
    pub fn eval(&self, omega: f64) -> f64 {
        self.components.iter().map(|c| c.eval(omega)).sum()
    }

    /// Weighted mean of the component centers.
    pub fn mean_center(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.center).sum()
    }

    /// Smallest interval [lo, hi] containing every center +- `n_linewidths`
    /// times its fwhm.
    pub fn support(&self, n_linewidths: f64) -> (f64, f64) {
        let lo = self
            .components
            .iter()
            .map(|c| c.center - n_linewidths * c.fwhm)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .components
            .iter()
            .map(|c| c.center + n_linewidths * c.fwhm)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// One of the four NV orientation groups resolved by the Zeeman field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupLabel {
    PlusI,
    MinusI,
    PlusIII,
    MinusIII,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 4] = [
        GroupLabel::MinusI,
        GroupLabel::MinusIII,
        GroupLabel::PlusIII,
        GroupLabel::PlusI,
    ];
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupLabel::PlusI => "+I",
            GroupLabel::MinusI => "-I",
            GroupLabel::PlusIII => "+III",
            GroupLabel::MinusIII => "-III",
        };
        f.write_str(s)
    }
}

impl FromStr for GroupLabel {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+I" => Ok(GroupLabel::PlusI),
            "-I" => Ok(GroupLabel::MinusI),
            "+III" => Ok(GroupLabel::PlusIII),
            "-III" => Ok(GroupLabel::MinusIII),
            other => Err(CoreError::UnknownGroup(other.into())),
        }
    }
}

/// A spin group collectively coupled to the bus resonator.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleGroup {
    pub label: GroupLabel,
    /// Collective coupling constant g (rad/s).
    pub coupling: f64,
    pub density: SpinDensity,
    /// Single-spin emission rate gamma0 (rad/s); zero for cold NV centers.
    pub gamma0: f64,
}

impl EnsembleGroup {
    pub fn new(label: GroupLabel, coupling: f64, density: SpinDensity, gamma0: f64) -> Result<Self> {
        if !(coupling > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "collective coupling must be positive, got {coupling}"
            )));
        }
        if gamma0 < 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "gamma0 must be non-negative, got {gamma0}"
            )));
        }
        Ok(Self {
            label,
            coupling,
            density,
            gamma0,
        })
    }

    /// The group's central frequency (weighted mean of its lines).
    pub fn central_frequency(&self) -> f64 {
        self.density.mean_center()
    }
}
