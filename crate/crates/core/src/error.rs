use thiserror::Error;

/// Errors produced anywhere in the model, solver and runner layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of an operation.
    #[error("domain error in `{field}`: {reason}")]
    Domain { field: String, reason: String },

    /// A configuration value violates an invariant.
    #[error("invalid configuration `{field}`: {reason}")]
    Validation { field: String, reason: String },

    /// The configuration text could not be parsed.
    #[error("config parse error: {0}")]
    Parse(String),

    /// RK4 produced a non-finite value.
    #[error("integration blow-up at t = {t}")]
    Blowup { t: f64 },

    /// A state component became negative beyond round-off.
    #[error("positivity violated at t = {t}: component `{component}` = {value:e}")]
    Positivity {
        t: f64,
        component: &'static str,
        value: f64,
    },

    /// Arrays that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A failure tagged with the scenario it came from.
    #[error("scenario `{label}`: {source}")]
    Scenario {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn in_scenario(self, label: &str) -> Self {
        Error::Scenario {
            label: label.to_string(),
            source: Box::new(self),
        }
    }

    /// True for errors raised while integrating or solving, as opposed to
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Blowup { .. } | Error::Positivity { .. } | Error::GridMismatch(_) => true,
            Error::Scenario { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
