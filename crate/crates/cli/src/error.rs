use thiserror::Error;

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Malformed input, bad flags or an unusable output location.
pub const EXIT_INPUT: i32 = 2;
/// A well-formed problem with no solution: not localizable, singular gain.
pub const EXIT_INFEASIBLE: i32 = 3;
/// A simulation hit collocation or divergence.
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Input { field: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] bearing_core::Error),

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Infeasible(String),

    /// An error event raised during integration.
    #[error("{message}")]
    Event { message: String, infeasible: bool },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bearing_core::Error as E;
        match self {
            CliError::Core(
                E::NotLocalizable { .. } | E::SingularGain { .. } | E::NoFollowers | E::TooFewAnchors { .. },
            ) => EXIT_INFEASIBLE,
            CliError::Infeasible(_) | CliError::Event { infeasible: true, .. } => EXIT_INFEASIBLE,
            CliError::Event { infeasible: false, .. } => EXIT_RUNTIME,
            _ => EXIT_INPUT,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input { .. } => "input",
            CliError::Usage(_) => "usage",
            CliError::Infeasible(_) => "infeasible",
            CliError::Core(_) if self.exit_code() == EXIT_INFEASIBLE => "infeasible",
            CliError::Core(_) => "input",
            CliError::Io(_) => "io",
            CliError::Event { .. } => "runtime_event",
        }
    }
}
