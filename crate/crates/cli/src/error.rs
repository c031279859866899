use std::fmt;
use std::path::Path;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Parameter = 2,
    Format = 3,
    Io = 4,
    /// The computation has no answer for these inputs: unsolvable or
    /// degenerate problems, unreachable saturation targets, incomplete
    /// calibrations, or a required convergence that did not happen.
    Compute = 5,
    /// Replayed outputs differ from the manifest.
    Mismatch = 6,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn new(kind: ExitKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }

    pub fn param(message: impl Into<String>) -> Self {
        Self::new(ExitKind::Parameter, message)
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(ExitKind::Io, format!("{}: {err}", path.display()))
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }

    /// Prefixes the message, e.g. with the flag or file it concerns.
    pub fn context(self, what: impl fmt::Display) -> Self {
        Self { kind: self.kind, message: format!("{what}: {}", self.message) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<grrhdr::Error> for CliError {
    fn from(e: grrhdr::Error) -> Self {
        use grrhdr::Error as E;
        let kind = match &e {
            E::Parameter(_) | E::Dimension(_) | E::NonFinite { .. } => ExitKind::Parameter,
            E::Format(_) => ExitKind::Format,
            E::Io(_) => ExitKind::Io,
            E::Unsolvable(_) | E::Degenerate(_) | E::IncompleteCalibration(_) | E::Unattainable(_) => ExitKind::Compute,
        };
        Self::new(kind, e.to_string())
    }
}

/// Maps a library error to a CLI error mentioning `flag`.
pub fn flag(name: &'static str) -> impl Fn(grrhdr::Error) -> CliError {
    move |e| CliError::from(e).context(name)
}
