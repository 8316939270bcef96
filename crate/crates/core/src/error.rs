use thiserror::Error;

/// Module that raised a physics/domain error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Module {
    Optics,
    PhaseMatch,
    Jsa,
    Schmidt,
    PhotStat,
    Hom,
}

impl std::fmt::Display for Module {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Module::Optics => "optics",
            Module::PhaseMatch => "phasematch",
            Module::Jsa => "jsa",
            Module::Schmidt => "schmidt",
            Module::PhotStat => "photstat",
            Module::Hom => "hom",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical precondition was violated.
    #[error("{module}: {message}")]
    Domain { module: Module, message: String },

    /// Scenario file could not be parsed or failed validation.
    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(module: Module, message: impl Into<String>) -> Self {
        Error::Domain {
            module,
            message: message.into(),
        }
    }

    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Scenario(_) => 2,
            Error::Domain { .. } => 3,
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
