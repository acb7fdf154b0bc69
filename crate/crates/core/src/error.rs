use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the command-line tool to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("diffraction order {order} is evanescent (|n lambda / d| = {ratio})")]
    EvanescentOrder { order: i32, ratio: f64 },

    #[error("{what}: quadrature did not converge (estimated error {estimate:e}, tolerance {tolerance:e})")]
    Tolerance {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("gaussian fit failed for peak {index} at {center:e} rad: {reason}")]
    FitFailure {
        index: usize,
        center: f64,
        reason: String,
    },

    #[error("no peak above the noise floor near {center:e} rad (peak {index})")]
    MissingPeak { index: usize, center: f64 },

    #[error("chi-square minimum lies on the search bound C3 = {bound} meV nm^3")]
    BoundarySolution { bound: f64 },

    #[error("chi-square has separate local minima on the search interval at C3 = {minima:?}")]
    Multimodal { minima: Vec<f64> },

    #[error("non-finite model value: {0}")]
    NonFinite(String),

    #[error("{}", parse_message(*.line, .key, .message))]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("{source_name} row {row}: {message}")]
    Format {
        source_name: String,
        row: usize,
        message: String,
    },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Tolerance { .. }
            | Error::FitFailure { .. }
            | Error::MissingPeak { .. }
            | Error::BoundarySolution { .. }
            | Error::Multimodal { .. }
            | Error::NonFinite(_) => ErrorKind::Numerical,
            Error::InvalidInput(_)
            | Error::EvanescentOrder { .. }
            | Error::Parse { .. }
            | Error::Format { .. }
            | Error::Io(_) => ErrorKind::Input,
        }
    }

    /// Short stable identifier for machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::EvanescentOrder { .. } => "evanescent-order",
            Error::Tolerance { .. } => "numerical-tolerance",
            Error::FitFailure { .. } => "fit-failure",
            Error::MissingPeak { .. } => "missing-peak",
            Error::BoundarySolution { .. } => "boundary-solution",
            Error::Multimodal { .. } => "multimodal",
            Error::NonFinite(_) => "non-finite",
            Error::Parse { .. } => "parse",
            Error::Format { .. } => "format",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_message(line: usize, key: &str, message: &str) -> String {
    match (line, key.is_empty()) {
        (0, true) => message.to_string(),
        (0, false) => format!("{key}: {message}"),
        (_, true) => format!("line {line}: {message}"),
        _ => format!("line {line}: {key}: {message}"),
    }
}
