use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("field {field} value {value:#x} does not fit in {width} bits")]
    FieldWidth {
        field: &'static str,
        value: u64,
        width: u32,
    },

    #[error("frame must be {expected} {unit}, got {found}")]
    FrameLength {
        expected: usize,
        found: usize,
        unit: &'static str,
    },

    #[error("invalid frame text: {0}")]
    FrameText(String),

    #[error("invalid scenario: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("missing required key `{0}`")]
    MissingKey(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge for r={r}, M={order}")]
    Quadrature { r: f64, order: u32 },

    #[error("transmissions not sorted by start time at index {index}")]
    Unsorted { index: usize },

    #[error("received ratio undefined for an empty outcome set")]
    UndefinedRatio,

    #[error("need at least {need} POS packets for the update window, have {have}")]
    InsufficientData { have: usize, need: usize },

    #[error(
        "target ratio {target:.4} unreachable in noise-floor bracket \
         [{lo_dbm} dBm -> {lo_ratio:.4}, {hi_dbm} dBm -> {hi_ratio:.4}]"
    )]
    Calibration {
        target: f64,
        lo_dbm: f64,
        lo_ratio: f64,
        hi_dbm: f64,
        hi_ratio: f64,
    },

    #[error("received ratio not monotone in noise floor: {0}")]
    NonMonotone(String),

    #[error("invalid sweep: {0}")]
    Sweep(String),
}
