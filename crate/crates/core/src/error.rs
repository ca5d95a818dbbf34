use thiserror::Error;

use crate::{decomp::DecompError, fourier::FourierError, gint::GintError, hecke::HeckeError,
            race::RaceError, sieve::SieveError, zdist::ZdistError};

/// Crate-level error, one variant per module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Gint(#[from] GintError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Race(#[from] RaceError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Zdist(#[from] ZdistError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of an internal consistency check (a decomposition that
    /// does not re-multiply, an out-of-order stream, a normalization with the
    /// wrong number of candidates).
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Gint(GintError::Malformed { .. }) => true,
            Error::Decomp(e) => e.is_internal(),
            Error::Race(RaceError::OutOfOrder { .. }) => true,
            Error::Hecke(HeckeError::SignMismatch { .. }) => true,
            _ => false,
        }
    }
}
