use std::fmt;
use std::process::ExitCode;

use piecevalue::config::ConfigError;
use piecevalue::features::TableError;
use piecevalue::glm::GlmError;
use piecevalue::lab::NoiseError;
use piecevalue::pgn::{HistoryError, PolicyError};
use piecevalue::report::ReportError;
use piecevalue::selfplay::{LedgerError, SelfPlayFitError, SpecError};
use piecevalue::simex::SimexError;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or settings: exit 1.
    Usage(String),
    /// Unreadable, malformed or insufficient data: exit 2.
    Data(String),
    /// A fit or calibration failed: exit 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        })
    }

    pub fn data(context: impl fmt::Display, e: impl fmt::Display) -> CliError {
        CliError::Data(format!("{context}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<GlmError> for CliError {
    fn from(e: GlmError) -> CliError {
        match e {
            GlmError::Empty | GlmError::MissingTerm { .. } | GlmError::BadOutcome(_) => CliError::Data(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SimexError> for CliError {
    fn from(e: SimexError) -> CliError {
        match e {
            SimexError::Glm(g) => g.into(),
            SimexError::BadGrid | SimexError::NoCandidates | SimexError::TooFewReplicates => CliError::Usage(e.to_string()),
            SimexError::MissingTerm(_) => CliError::Data(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<HistoryError> for CliError {
    fn from(e: HistoryError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> CliError {
        match e {
            ConfigError::MissingPath(_) => CliError::Data(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<NoiseError> for CliError {
    fn from(e: NoiseError) -> CliError {
        match e {
            NoiseError::NonStationary { .. } => CliError::Numerical(e.to_string()),
            NoiseError::Invalid(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> CliError {
        match e {
            ReportError::PawnNearZero { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> CliError {
        match e {
            LedgerError::Spec(m) => CliError::Usage(m),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SelfPlayFitError> for CliError {
    fn from(e: SelfPlayFitError) -> CliError {
        match e {
            SelfPlayFitError::Glm(g) => g.into(),
            SelfPlayFitError::InsufficientVariation(_) => CliError::Data(e.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
