use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate grid: region {width} x {height} m cannot hold a street of mean width {street} m")]
    DegenerateGrid { width: f64, height: f64, street: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("position ({x}, {y}) lies inside a building footprint")]
    InsideBuilding { x: f64, y: f64 },

    #[error("could not condition the grid sample after {attempts} attempts: {reason}")]
    Conditioning { attempts: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
