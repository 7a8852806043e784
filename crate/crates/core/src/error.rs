use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dissipation positivity violated at omega = {omega} (Im chi = {im})")]
    NegativeDissipation { omega: f64, im: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(usize),

    #[error("spectrum does not cover {} synthesis bin(s); first missing omega = {first_missing}", missing.len())]
    Coverage { missing: Vec<usize>, first_missing: f64 },

    #[error("series too short: {len} samples for {segments} segment(s)")]
    TooShort { len: usize, segments: usize },

    #[error("insufficient statistical power: {requested} realizations, need at least {required}")]
    StatisticalPower { requested: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
