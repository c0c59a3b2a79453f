use std::fmt;
use std::process::ExitCode;

use commbound::Error;

pub const INVALID: u8 = 1;
pub const INFEASIBLE: u8 = 2;
pub const DIGEST_MISMATCH: u8 = 3;
pub const SIZE_OVERFLOW: u8 = 4;
pub const NOT_CONVERGED: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: INVALID, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Infeasible { .. } | Error::OverClaimed { .. } => INFEASIBLE,
            Error::DigestMismatch { .. } => DIGEST_MISMATCH,
            Error::SizeOverflow { .. } => SIZE_OVERFLOW,
            Error::NonConvergence { .. } => NOT_CONVERGED,
            _ => INVALID,
        };
        let message = match &e {
            Error::SizeOverflow { required, .. } => format!("{e}; rerun with --cap {required} or CBOX_CAP={required}"),
            Error::Infeasible { witness, .. } => {
                let tuple: Vec<String> = witness.iter().map(usize::to_string).collect();
                format!("{e}\nwitness: ({})", tuple.join(", "))
            }
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::invalid(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;
