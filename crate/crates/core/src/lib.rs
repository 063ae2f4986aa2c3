//! Numerics for the tau function of Painleve III(D8), the radial
//! sine-Gordon reduction u'' + u'/r + sin u = 0.
//!
//! The tau function has two convergent descriptions: a short-distance
//! expansion built from Nekrasov-type instanton sums (module [`nekrasov`],
//! assembled in [`tau_series`]) and a long-distance irregular expansion
//! built from Barnes-G prefactors (module [`tau_asymptotics`]). Both are
//! parametrised by monodromy data (sigma, eta) handled in [`monodromy`].
//! The constant relating the two normalisations is computed in closed form
//! and cross-checked numerically in [`connection`].
//!
//! Everything is double precision. Series are summed with compensated
//! accumulation in a fixed order, so results are reproducible bit-for-bit
//! across runs and thread counts.

pub mod connection;
pub mod error;
pub mod monodromy;
pub mod nekrasov;
pub mod partitions;
pub mod specfun;
pub mod tau_asymptotics;
pub mod tau_series;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A truncated series value together with a heuristic bound on the
/// truncation error (dropped tails plus dropped Fourier terms).
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub err_estimate: f64,
}

impl SeriesValue {
    pub fn new(value: Complex64, err_estimate: f64) -> Self {
        SeriesValue {
            value,
            err_estimate,
        }
    }
}

/// Compensated (Kahan) accumulator for complex terms. Summation order is
/// chosen by the caller and must stay fixed for reproducibility.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, term: Complex64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum
    }
}
