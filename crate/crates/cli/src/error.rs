use std::process::ExitCode;

use gradedwl::automaton::AutomatonError;
use gradedwl::format::FormatError;
use gradedwl::gfp::GfpError;
use gradedwl::gmml::ParseError;
use gradedwl::grid::GridError;
use gradedwl::kripke::ModelError;
use gradedwl::translate::TranslateError;
use gradedwl::types::TypeError;
use gradedwl::wl::WlError;

/// Exit statuses shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Yes = 0,
    No = 1,
    Usage = 2,
    Input = 3,
    Budget = 4,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("budget reached: {0}")]
    Budget(String),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Usage(_) => Status::Usage,
            CliError::Input(_) => Status::Input,
            CliError::Budget(_) => Status::Budget,
        }
    }

    pub fn input(context: &str, e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {e}"))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<TypeError> for CliError {
    fn from(e: TypeError) -> Self {
        match e {
            TypeError::SizeCap { .. } => CliError::Budget(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<AutomatonError> for CliError {
    fn from(e: AutomatonError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<WlError> for CliError {
    fn from(e: WlError) -> Self {
        match e {
            WlError::Type(t) => t.into(),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<GfpError> for CliError {
    fn from(e: GfpError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<TranslateError> for CliError {
    fn from(e: TranslateError) -> Self {
        match e {
            TranslateError::Type(t) => t.into(),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::TooLarge { .. } => CliError::Budget(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::input("formula", e)
    }
}
