use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Physics,
    Io,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Config => 2,
            Kind::Physics => 3,
            Kind::Io => 4,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Kind::Config => "config",
            Kind::Physics => "physics",
            Kind::Io => "io",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Config,
            message: message.into(),
        }
    }

    pub fn physics(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Physics,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Io,
            message: message.into(),
        }
    }

    /// One-line JSON report for standard error.
    pub fn report(&self) -> String {
        serde_json::json!({
            "status": "error",
            "kind": self.kind.label(),
            "exit_code": self.kind.exit_code(),
            "message": self.message,
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind.label(), self.message)
    }
}

/// Library errors raised while validating a configuration.
pub fn invalid(e: cryoion::Error) -> CliError {
    match e {
        cryoion::Error::Io(e) => CliError::io(e.to_string()),
        other => CliError::config(other.to_string()),
    }
}

/// Library errors raised while running the physics.
pub fn failed(e: cryoion::Error) -> CliError {
    match e {
        cryoion::Error::Io(e) => CliError::io(e.to_string()),
        other => CliError::physics(other.to_string()),
    }
}

pub type CliResult<T> = Result<T, CliError>;
