use thiserror::Error;

use isoscatter_core::groups::GroupError;
use isoscatter_core::homology::HomologyError;
use isoscatter_core::io::ConfigError;
use isoscatter_core::schottky::SchottkyError;
use isoscatter_core::transplant::TransplantError;
use isoscatter_core::zeta::ZetaError;

/// Failure classes, one exit code each.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("check failed: {0}")]
    Assertion(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("contour error: {0}")]
    Contour(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Config(_) => 2,
            CliError::Contour(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SchottkyError> for CliError {
    fn from(e: SchottkyError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("cannot write output: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        match e {
            ZetaError::ZeroOnContour { .. }
            | ZetaError::QuadratureDiverged { .. }
            | ZetaError::FactorVanished { .. } => CliError::Contour(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<TransplantError> for CliError {
    fn from(e: TransplantError) -> Self {
        match e {
            TransplantError::NoInvertibleIntertwiner { .. } => CliError::Assertion(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HomologyError> for CliError {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::NotInvolution => CliError::Assertion(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
