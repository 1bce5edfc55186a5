//! Aperture-field simulation toolkit for millimeter-wave reflector antennas
//! with a shared infrared optical path.
//!
//! The crate models three co-aperture configurations — an offset-fed single
//! reflector and two back-fed Cassegrain variants — and predicts their
//! far-field patterns by geometrical-optics aperture construction followed
//! by direct numerical radiation integration. Supporting modules extract
//! pattern metrics (gain, beamwidth, sidelobe level, cross-polarization),
//! model aperture blockage, and trace the infrared channel for co-boresight
//! verification.

pub mod blockage;
pub mod error;
pub mod feed;
pub mod geometry;
pub mod ir;
pub mod metrics;
pub mod numeric;
pub mod report;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};

/// Speed of light in mm·GHz (i.e. mm per nanosecond).
pub const SPEED_OF_LIGHT_MM_GHZ: f64 = 299.792458;

/// Free-space wavelength in mm for a frequency in GHz.
pub fn wavelength_mm(frequency_ghz: f64) -> f64 {
    SPEED_OF_LIGHT_MM_GHZ / frequency_ghz
}
