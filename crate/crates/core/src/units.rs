//! Conversions between the ordinary-frequency units used at the interfaces
//! (MHz, GHz, ns) and the angular SI units (rad/s, s) used internally.

use std::f64::consts::TAU;

/// Ordinary frequency in MHz to angular frequency in rad/s.
pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e6
}

/// Ordinary frequency in GHz to angular frequency in rad/s.
pub fn ghz(f: f64) -> f64 {
    TAU * f * 1e9
}

/// Angular frequency in rad/s to ordinary frequency in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / TAU / 1e6
}

/// Angular frequency in rad/s to ordinary frequency in GHz.
pub fn to_ghz(omega: f64) -> f64 {
    omega / TAU / 1e9
}

/// Nanoseconds to seconds.
pub fn ns(t: f64) -> f64 {
    t * 1e-9
}

/// Seconds to nanoseconds.
pub fn to_ns(t: f64) -> f64 {
    t * 1e9
}
