//! IO companion to `spectral-econ-core`: matrix file formats, deterministic
//! JSON reports, experiment configs, SVG figure rendering, and the command
//! implementations behind the `spectral-econ` binary.

pub mod commands;
pub mod config;
pub mod figures;
pub mod formats;
pub mod jsonfmt;

/// Exit-code mapping shared by the binary and the tests: invalid input 2,
/// violated preconditions or divergent regimes 3, numerical failure 4.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    use spectral_econ_core::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidInput(_)) => 2,
        Some(Error::Precondition(_))
        | Some(Error::Divergence(_))
        | Some(Error::ModelViolation(_))
        | Some(Error::NoRecoverableStructure(_)) => 3,
        Some(Error::Numeric(_)) => 4,
        None => 2,
    }
}
