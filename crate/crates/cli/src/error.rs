use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("unknown command {0:?}")]
    UnknownCommand(String),

    #[error("command {0} needs --seed (no implicit seeding)")]
    MissingSeed(String),

    #[error(transparent)]
    Core(#[from] cfmod_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::UnknownCommand(_) => "unknown_command",
            CliError::MissingSeed(_) => "missing_seed",
            CliError::Core(_) => "invalid_parameter",
            CliError::Io { .. } => "io",
            CliError::Serialize(_) => "serialize",
        }
    }

    /// 2 for anything the caller got wrong, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::UnknownCommand(_) | CliError::MissingSeed(_) | CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Serialize(_) => 3,
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
            },
        })
        .expect("plain strings serialize")
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
