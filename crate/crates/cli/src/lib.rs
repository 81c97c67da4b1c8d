//! `spectral-rates` command line: coefficient series, rate reports, figure
//! data and oscillatory-integral decay checks.
//!
//! Exit codes: 0 ok, 1 usage or I/O error, 2 theorem hypothesis violated,
//! 3 quadrature failure, 4 rate check failed.

mod args;
pub mod commands;
pub mod range;
pub mod table;

use std::path::PathBuf;

pub use args::{
    Cli, CoeffsArgs, Command, FamilyArg, FiguresArgs, LemmaArgs, LemmaFamilyArg, RatesArgs,
    SmoothArg, ViewArg,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spectral_rates::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    /// Rate check outside tolerance; the report has already been printed.
    #[error("rate check failed")]
    RateFail,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use spectral_rates::Error as E;
        match self {
            CliError::Core(E::Hypothesis { .. }) => 2,
            CliError::Core(
                E::NotConverged { .. } | E::NonFinite { .. } | E::EigenNoConvergence { .. },
            ) => 3,
            CliError::Core(
                E::TooFewPoints { .. } | E::ZeroCoefficient { .. } | E::FitUnavailable(_),
            ) => 4,
            CliError::RateFail => 4,
            _ => 1,
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs one command, inside a dedicated thread pool when `--threads` is set.
pub fn run(cli: &Cli) -> CliResult<()> {
    match cli.threads {
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    let mut stdout = std::io::stdout().lock();
    match &cli.command {
        Command::Coeffs(a) => commands::coeffs::run(a, out, &mut stdout),
        Command::Rates(a) => commands::rates::run(a, &mut stdout),
        Command::Figures(a) => commands::figures::run(a, out, &mut stdout),
        Command::LemmaCheck(a) => commands::lemma::run(a, out, &mut stdout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_rates::Error as E;

    #[test]
    fn exit_code_contract() {
        let hyp = E::Hypothesis {
            theorem: "t".into(),
            guard: "g".into(),
        };
        assert_eq!(CliError::from(hyp).exit_code(), 2);
        let nc = E::NotConverged {
            err_est: 1.0,
            tol: 0.1,
            context: String::new(),
        };
        assert_eq!(CliError::from(nc).exit_code(), 3);
        assert_eq!(CliError::from(E::NonFinite { x: 0.0 }).exit_code(), 3);
        assert_eq!(
            CliError::from(E::TooFewPoints {
                found: 1,
                required: 5
            })
            .exit_code(),
            4
        );
        assert_eq!(CliError::RateFail.exit_code(), 4);
        assert_eq!(CliError::usage("x").exit_code(), 1);
        assert_eq!(CliError::from(E::Domain("x".into())).exit_code(), 1);
    }
}
