use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("series did not converge within {cap} terms")]
    NonConvergence { cap: usize },
    #[error("input function has zero norm")]
    ZeroNorm,
    #[error("basis value too close to zero at z = {0}; choose another sample point")]
    NearZeroValue(num_complex::Complex64),
    #[error("finite-difference stencil leaves the disk: |z| + 2h = {0}")]
    StencilOutOfDomain(f64),
    #[error("at grid point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_in_disk(z: num_complex::Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm_sqr() >= 1.0 {
        return Err(Error::Domain(format!("point {z} is not inside the unit disk")));
    }
    Ok(())
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be positive and finite, got {gamma}")));
    }
    Ok(())
}
