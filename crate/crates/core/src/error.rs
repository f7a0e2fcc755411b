use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("energy {energy} keV outside table range [{min}, {max}] keV")]
    EnergyOutOfRange { energy: f64, min: f64, max: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("malformed attenuation table: {0}")]
    Table(String),

    #[error("unphysical event: cos(theta) = {0}")]
    Unphysical(f64),

    #[error("degenerate cone axis: scatter/absorber separation {0} mm")]
    DegenerateAxis(f64),

    #[error("sub-threshold event: total deposit {0} keV")]
    SubThreshold(f64),

    #[error("map has no positive pixels")]
    EmptyMap,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;
