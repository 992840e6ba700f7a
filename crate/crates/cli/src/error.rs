use zerorect_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_INPUT: u8 = 4;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String, std::io::Error),
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Input(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::VerificationFailed(_)
                | Error::ProgressViolation(_)
                | Error::ConstantsFalsified(_)
                | Error::RankContradiction { .. } => EXIT_VERIFICATION,
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_INPUT,
            },
            CliError::Io(..) | CliError::Input(_) => EXIT_INPUT,
        }
    }
}
