//! The full hybrid device: four NV orientation groups, the flux-tunable bus,
//! the transmon qubit, and the readout chain, with the published parameter
//! set as the default construction.

use crate::density::{EnsembleGroup, GroupLabel, SpinDensity};
use crate::error::Result;
use crate::flux::{QubitBusPair, TuningCurve};
use crate::readout::ReadoutErrorModel;
use crate::spectral::BusParams;
use crate::units::{ghz, mhz};

/// Parameters of the complete experiment.
#[derive(Debug, Clone)]
pub struct HybridDeviceModel {
    /// The four Zeeman-split NV orientation groups, ascending in frequency.
    pub groups: Vec<EnsembleGroup>,
    pub qubit: QubitBusPair,
    pub tuning: TuningCurve,
    /// Loaded quality factor of the bus; `kappa = omega_b / q` at the
    /// operating frequency.
    pub quality_factor: f64,
    pub readout: ReadoutErrorModel,
}

impl HybridDeviceModel {
    /// The published device: group centers 2.84/2.865/2.89/2.91 GHz,
    /// couplings g_I/2pi = 2.9 MHz and g_III/2pi = 3.8 MHz, hyperfine
    /// splitting 2.3 MHz, linewidths 1.6 MHz (I) and 2.4 MHz (III),
    /// qubit at 2.607 GHz with g_Q/2pi = 7.2 MHz, bus tunable from
    /// 3.004 GHz with Q = 2e4, and the calibrated readout errors.
    pub fn published() -> Self {
        let g_i = mhz(2.9);
        let g_iii = mhz(3.8);
        let fwhm_i = mhz(1.6);
        let fwhm_iii = mhz(2.4);
        let split = mhz(2.3);
        let groups = vec![
            EnsembleGroup::new(
                GroupLabel::MinusI,
                g_i,
                SpinDensity::hyperfine(ghz(2.84), split, fwhm_i).unwrap(),
                0.0,
            )
            .unwrap(),
            EnsembleGroup::new(
                GroupLabel::MinusIII,
                g_iii,
                SpinDensity::hyperfine(ghz(2.865), split, fwhm_iii).unwrap(),
                0.0,
            )
            .unwrap(),
            EnsembleGroup::new(
                GroupLabel::PlusIII,
                g_iii,
                SpinDensity::hyperfine(ghz(2.89), split, fwhm_iii).unwrap(),
                0.0,
            )
            .unwrap(),
            EnsembleGroup::new(
                GroupLabel::PlusI,
                g_i,
                SpinDensity::hyperfine(ghz(2.91), split, fwhm_i).unwrap(),
                0.0,
            )
            .unwrap(),
        ];
        Self {
            groups,
            qubit: QubitBusPair::new(ghz(2.607), mhz(7.2)).unwrap(),
            tuning: TuningCurve::calibrated(ghz(3.004), 0.45, ghz(2.5)).unwrap(),
            quality_factor: 2e4,
            readout: ReadoutErrorModel::new(0.0, 0.1, 0.08).unwrap(),
        }
    }

    pub fn group(&self, label: GroupLabel) -> Option<&EnsembleGroup> {
        self.groups.iter().find(|g| g.label == label)
    }

    /// Bus parameters at an operating frequency, with `kappa = omega_b / Q`.
    pub fn bus_at(&self, omega_b: f64) -> Result<BusParams> {
        BusParams::new(omega_b, omega_b / self.quality_factor)
    }

    /// Bus parameters resonant with a group's central frequency.
    pub fn bus_on_group(&self, label: GroupLabel) -> Option<BusParams> {
        self.group(label)
            .map(|g| self.bus_at(g.central_frequency()).unwrap())
    }
}
