//! Error taxonomy for the process boundary: every failure is classified
//! as configuration (exit 2), data (exit 3), or numerical (exit 4), and
//! carries the pipeline stage it surfaced from.

use macrovar::dsge::DsgeError;
use macrovar::timeseries::PanelError;
use macrovar::var::VarError;

use crate::config::ConfigError;
use crate::dataset::DatasetError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }

    /// Prefixes the message with the pipeline stage that raised it.
    pub fn at_stage(self, stage: &str) -> CliError {
        match self {
            CliError::Config(m) => CliError::Config(format!("{stage}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{stage}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{stage}: {m}")),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self {
            CliError::Config(_) => "configuration error",
            CliError::Data(_) => "data error",
            CliError::Numerical(_) => "numerical error",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            // the requested country is part of the run request, so a miss
            // is a validation problem rather than a broken file
            DatasetError::UnknownCountry(_) => CliError::Config(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<PanelError> for CliError {
    fn from(e: PanelError) -> Self {
        match e {
            PanelError::UnknownVariable(_) | PanelError::DuplicateVariable(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<VarError> for CliError {
    fn from(e: VarError) -> Self {
        match e {
            VarError::InvalidSpec(_) | VarError::InvalidBootstrap(_) => {
                CliError::Config(e.to_string())
            }
            VarError::InsufficientObservations { .. } => CliError::Data(e.to_string()),
            VarError::Numerics(_) | VarError::BootstrapFailed { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<DsgeError> for CliError {
    fn from(e: DsgeError) -> Self {
        match e {
            DsgeError::InvalidParameter { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
