use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The lattice for the requested run cannot be indexed.
    #[error("lattice size overflows the site index (steps = {steps}, margin = {margin})")]
    LatticeOverflow { steps: usize, margin: usize },

    /// A step would push amplitude past the open boundary.
    #[error("light-cone violation at t = {t}: amplitude {magnitude:e} would leave the {edge} edge")]
    LightCone {
        t: u64,
        edge: &'static str,
        magnitude: f64,
    },

    #[error("field is degenerate: total probability vanishes")]
    DegenerateField,

    #[error("averaging window [{start}, {end}] selects no records")]
    EmptyWindow { start: u64, end: u64 },

    #[error("power-law fit needs at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("power-law fit input has a non-positive value {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },

    #[error("cell (theta = {theta}, chi = {chi}) failed: {source}")]
    Cell {
        theta: f64,
        chi: f64,
        source: Box<Error>,
        /// Cells that completed before the sweep was aborted, in row-major order.
        partial: Vec<crate::sweep::CellAverages>,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
