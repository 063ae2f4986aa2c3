use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong while evaluating the expansions.
///
/// Variants are split by what the caller can do about them: `Validation`
/// means the inputs never made sense, the domain variants mean the inputs
/// hit a genuine singularity of the formulas, and `WindowTooWild` means a
/// numerical match was attempted where the two expansions do not overlap.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("gamma pole at z = {z}")]
    GammaPole { z: Complex64 },

    #[error("Barnes G zero at z = {z} (log diverges)")]
    BarnesZero { z: Complex64 },

    #[error("G-hat pole/zero at z = {z}")]
    GHatSingular { z: Complex64 },

    #[error("monodromy is singular: {reason} (sigma = {sigma}, eta = {eta})")]
    SingularMonodromy {
        sigma: Complex64,
        eta: Complex64,
        reason: &'static str,
    },

    #[error("rho diverges: sin 2*pi*(sigma+eta) = 0 at sigma = {sigma}, eta = {eta}")]
    DivergentRho { sigma: Complex64, eta: Complex64 },

    #[error("parameters leave the base domain of the generating function: {0}")]
    OutOfBaseDomain(String),

    #[error("series does not converge: gap L = {l_gap:.3e} below minimum {min:.3e}")]
    TooCloseToResonance { l_gap: f64, min: f64 },

    #[error("tau vanishes at this point (|tau| = {magnitude:.3e} relative to largest term)")]
    ZeroOfTau { magnitude: f64 },

    #[error("long-distance coefficient table ends at total order {max}; requested {requested}")]
    TableExhausted { requested: usize, max: usize },

    #[error("correction order {requested} exceeds the known coefficients (max {max})")]
    UnsupportedOrder { requested: usize, max: usize },

    #[error("matching window too wild: spread {spread:.3e} exceeds bound {bound:.3e}")]
    WindowTooWild { spread: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
