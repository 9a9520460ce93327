use std::fmt;

use dcl_core::dynamics::DynamicsError;
use dcl_core::lattice::LatticeError;
use dcl_core::mechanism::MechanismError;
use dcl_core::mocap::MocapError;
use dcl_core::stiffness::StiffnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad configuration, inputs or parameters.
    Validation,
    /// Reading or writing files failed.
    Io,
}

/// A failure tagged with the module that raised it.
#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub module: &'static str,
    pub message: String,
}

impl CliError {
    pub fn validation(module: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Validation,
            module,
            message: message.into(),
        }
    }

    pub fn io(module: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Io,
            module,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Io => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.module, self.message)
    }
}

impl std::error::Error for CliError {}

macro_rules! module_error {
    ($ty:ty, $module:literal, $io:pat) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                let kind = if matches!(e, $io) {
                    ErrorKind::Io
                } else {
                    ErrorKind::Validation
                };
                CliError {
                    kind,
                    module: $module,
                    message: e.to_string(),
                }
            }
        }
    };
}

module_error!(LatticeError, "lattice", LatticeError::Io(_));
module_error!(StiffnessError, "stiffness", StiffnessError::Io(_));
module_error!(
    DynamicsError,
    "dynamics",
    DynamicsError::Stiffness(StiffnessError::Io(_))
);
module_error!(MocapError, "mocap", MocapError::Io(_));

impl From<MechanismError> for CliError {
    fn from(e: MechanismError) -> Self {
        CliError::validation("mechanism", e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
