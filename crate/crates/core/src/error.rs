//! Error type shared across the solver pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Geometry synthesis asked for a shape that does not exist
    /// (e.g. Cassegrain magnification ≤ 1, offset rim past 90°).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Sub-reflector at least as large as the main aperture.
    #[error("blockage dominates: sub diameter {sub_mm} mm >= main diameter {main_mm} mm")]
    BlockageDominates { sub_mm: f64, main_mm: f64 },

    /// Surface parameter outside the rim / parameter domain.
    #[error("out of surface domain: {0}")]
    OutOfDomain(String),

    /// Obstacle silhouette collapses under the requested projection.
    #[error("degenerate projection: direction lies in the obstacle plane")]
    DegenerateProjection,

    /// Argument outside a model's domain (feed angles, taper, window).
    #[error("domain error: {0}")]
    Domain(String),

    /// Frequency outside the supported 1–300 GHz band.
    #[error("frequency {frequency_ghz} GHz outside supported band 1-300 GHz")]
    OutOfBand { frequency_ghz: f64 },

    /// Grid or angular sampling too coarse for the requested result.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// Operation on an identically-zero field.
    #[error("no power: aperture field is identically zero")]
    NoPower,

    /// Requested feature (crossing, peak, null) outside the cut range.
    #[error("range error: {0}")]
    Range(String),

    /// System lacks the element a trace requires.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// IR trace produced no exit rays.
    #[error("no optical path: every ray was lost before the exit aperture")]
    NoPath,

    /// Scenario id not present in the registry.
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    /// Failure inside a scenario run, tagged with the scenario id.
    #[error("scenario {id}: {source}")]
    Scenario { id: String, source: Box<Error> },

    /// Sweep parameter name not recognised.
    #[error("unknown parameter: {0}")]
    UnknownParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed tabulated-pattern CSV or similar input.
    #[error("parse error: {0}")]
    Parse(String),
}
