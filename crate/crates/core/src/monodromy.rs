//! Monodromy-side parametrization: the exponents (nu, rho) and Fourier
//! seeds b00 derived from (sigma, eta), the connection and Stokes
//! matrices with their sector-swap relations, the generating function W
//! of the (sigma, nu) -> (eta, rho) change of variables, and the
//! closed-form derivative table.
//!
//! Branch conventions, fixed once here and relied on everywhere:
//!
//!   e^(pi nu)     = sin 2 pi eta / sin 2 pi sigma,  principal log, so
//!                   Im nu lands in (-1, 1];
//!   e^(4 pi i rho) = sin 2 pi eta / sin 2 pi (sigma + eta), principal
//!                   log; rho itself is contract-bearing only mod 1/2.
//!
//! The canonical window 0 <= Re sigma <= 1/2, -1/2 < Re eta <= 1/2 is
//! enforced by `MonodromyPoint::new`, which applies the reflection
//! (sigma, eta) -> (-sigma, -eta) when that lands inside the window.
//! All derived quantities are invariant under that reflection.

use crate::error::{Error, Result};
use crate::specfun::{dilog, log_gamma};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this modulus a sine factor counts as a genuine zero
/// (half-integer argument) rather than a small value.
const SIN_SINGULAR: f64 = 1e-12;

fn sin_2pi(z: Complex64) -> Complex64 {
    (2.0 * PI * z).sin()
}

fn cos_2pi(z: Complex64) -> Complex64 {
    (2.0 * PI * z).cos()
}

/// nu from (sigma, eta): the principal logarithm of
/// sin 2 pi eta / sin 2 pi sigma divided by pi, so Im nu in (-1, 1].
pub fn derive_nu(sigma: Complex64, eta: Complex64) -> Result<Complex64> {
    let ss = sin_2pi(sigma);
    let se = sin_2pi(eta);
    if ss.norm() < SIN_SINGULAR {
        return Err(Error::SingularMonodromy {
            sigma,
            eta,
            reason: "sin 2 pi sigma vanishes",
        });
    }
    if se.norm() < SIN_SINGULAR {
        return Err(Error::SingularMonodromy {
            sigma,
            eta,
            reason: "sin 2 pi eta vanishes",
        });
    }
    Ok((se / ss).ln() / PI)
}

/// rho from (sigma, eta), principal branch of
/// log(sin 2 pi eta / sin 2 pi (sigma+eta)) / (4 pi i). Only
/// e^(4 pi i rho) is contract-bearing; the representative is principal.
/// Errors when the exponential degenerates (rho running off to
/// imaginary infinity), which happens when either sine vanishes.
pub fn derive_rho(sigma: Complex64, eta: Complex64) -> Result<Complex64> {
    let se = sin_2pi(eta);
    let sse = sin_2pi(sigma + eta);
    if sse.norm() < SIN_SINGULAR || se.norm() < SIN_SINGULAR {
        return Err(Error::DivergentRho { sigma, eta });
    }
    Ok((se / sse).ln() / (4.0 * PI * I))
}

/// The pair (b00_plus, b00_minus) of leading Fourier seeds:
///
///   b00_pm = -e^(pi nu/2 -+ i pi/4) 2^(1 +- 2 i nu) Gamma(1 -+ i nu)
///            / sqrt(2 pi) * sin 2 pi (sigma -+ eta) / sin 2 pi eta.
///
/// Their product is -4 nu identically.
pub fn derive_b00(sigma: Complex64, eta: Complex64) -> Result<(Complex64, Complex64)> {
    let nu = derive_nu(sigma, eta)?;
    let se = sin_2pi(eta);
    let ln2 = std::f64::consts::LN_2;
    let ln_2pi_half = 0.5 * crate::specfun::LN_2PI;
    let mut out = [Complex64::default(); 2];
    for (slot, sign) in out.iter_mut().zip([1.0, -1.0]) {
        let log_pref = PI * nu / 2.0 - sign * I * PI / 4.0
            + (1.0 + sign * 2.0 * I * nu) * ln2
            + log_gamma(ONE - sign * I * nu)?
            - ln_2pi_half;
        *slot = -log_pref.exp() * sin_2pi(sigma - sign * eta) / se;
    }
    Ok((out[0], out[1]))
}

/// Which massaging `MonodromyPoint::new` applied to land in the window.
/// nu and rho always carry principal logarithms, so the only recorded
/// choice is the reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BranchLog {
    /// (sigma, eta) -> (-sigma, -eta) was applied at construction.
    pub reflected: bool,
}

/// A point of the monodromy manifold with every derived exponent
/// computed up front: nu, rho (None when divergent), and the Fourier
/// seeds b00. Construct with `new` (canonical window enforced) or `raw`
/// (any sigma, eta with nonvanishing sines).
#[derive(Debug, Clone, Copy)]
pub struct MonodromyPoint {
    sigma: Complex64,
    eta: Complex64,
    nu: Complex64,
    rho: Option<Complex64>,
    b00_plus: Complex64,
    b00_minus: Complex64,
    branch_log: BranchLog,
}

fn in_window(sigma: Complex64, eta: Complex64) -> bool {
    (0.0..=0.5).contains(&sigma.re) && -0.5 < eta.re && eta.re <= 0.5
}

impl MonodromyPoint {
    /// Canonical constructor: requires (sigma, eta) in the window
    /// 0 <= Re sigma <= 1/2, -1/2 < Re eta <= 1/2, possibly after the
    /// reflection (sigma, eta) -> (-sigma, -eta).
    pub fn new(sigma: Complex64, eta: Complex64) -> Result<Self> {
        if in_window(sigma, eta) {
            Self::derive(sigma, eta, BranchLog { reflected: false })
        } else if in_window(-sigma, -eta) {
            Self::derive(-sigma, -eta, BranchLog { reflected: true })
        } else {
            Err(Error::Validation(format!(
                "(sigma, eta) = ({}, {}) outside the canonical window \
                 0 <= Re sigma <= 1/2, -1/2 < Re eta <= 1/2, even after \
                 reflection; reduce by the integer periodicity first",
                sigma, eta
            )))
        }
    }

    /// Window check bypassed; still derives all exponents. Needed to
    /// probe the reflection symmetry itself.
    pub fn raw(sigma: Complex64, eta: Complex64) -> Result<Self> {
        Self::derive(sigma, eta, BranchLog::default())
    }

    fn derive(sigma: Complex64, eta: Complex64, branch_log: BranchLog) -> Result<Self> {
        let nu = derive_nu(sigma, eta)?;
        let rho = match derive_rho(sigma, eta) {
            Ok(r) => Some(r),
            Err(Error::DivergentRho { .. }) => None,
            Err(e) => return Err(e),
        };
        let (b00_plus, b00_minus) = derive_b00(sigma, eta)?;
        Ok(MonodromyPoint {
            sigma,
            eta,
            nu,
            rho,
            b00_plus,
            b00_minus,
            branch_log,
        })
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }

    /// None when rho diverges (sin 2 pi (sigma+eta) or sin 2 pi eta
    /// vanishes); consumers needing the Fourier factor must error then.
    pub fn rho(&self) -> Option<Complex64> {
        self.rho
    }

    pub fn rho_or_err(&self) -> Result<Complex64> {
        self.rho.ok_or(Error::DivergentRho {
            sigma: self.sigma,
            eta: self.eta,
        })
    }

    pub fn b00(&self) -> (Complex64, Complex64) {
        (self.b00_plus, self.b00_minus)
    }

    pub fn branch_log(&self) -> BranchLog {
        self.branch_log
    }
}

/// Tiny dense 2x2 complex matrix; just enough for the connection and
/// Stokes algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let mut out = [[Complex64::default(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        m
    }

    /// The row/column swap matrix [[0,1],[1,0]].
    pub fn swap() -> Mat2 {
        Mat2([[Complex64::default(), ONE], [ONE, Complex64::default()]])
    }

    /// [[1, u], [0, 1]].
    pub fn upper(u: Complex64) -> Mat2 {
        Mat2([[ONE, u], [Complex64::default(), ONE]])
    }

    /// [[1, 0], [l, 1]].
    pub fn lower(l: Complex64) -> Mat2 {
        Mat2([[ONE, Complex64::default()], [l, ONE]])
    }
}

/// Connection matrix between the unit-determinant frames at the two
/// critical points, plus the Stokes factors (equal by symmetry).
#[derive(Debug, Clone, Copy)]
pub struct MonodromyMatrices {
    pub connection_c: Mat2,
    pub stokes_a: Complex64,
    pub stokes_b: Complex64,
}

impl MonodromyMatrices {
    /// Stokes factor in the first overlap sector at the origin.
    pub fn stokes_zero_12(&self) -> Mat2 {
        Mat2::upper(self.stokes_a)
    }

    /// Stokes factor in the first overlap sector at infinity.
    pub fn stokes_inf_12(&self) -> Mat2 {
        Mat2::lower(self.stokes_b)
    }

    /// Stokes factor in the second overlap sector at the origin.
    pub fn stokes_zero_23(&self) -> Mat2 {
        Mat2::lower(self.stokes_a)
    }

    /// Stokes factor in the second overlap sector at infinity.
    pub fn stokes_inf_23(&self) -> Mat2 {
        Mat2::upper(self.stokes_b)
    }
}

/// C = (1/sin 2 pi sigma) [[sin 2 pi eta, -i sin 2 pi (eta+sigma)],
/// [i sin 2 pi (eta-sigma), sin 2 pi eta]], a = b = -2i cos 2 pi sigma.
pub fn build_matrices(sigma: Complex64, eta: Complex64) -> Result<MonodromyMatrices> {
    let ss = sin_2pi(sigma);
    if ss.norm() < SIN_SINGULAR {
        return Err(Error::SingularMonodromy {
            sigma,
            eta,
            reason: "sin 2 pi sigma vanishes",
        });
    }
    let se = sin_2pi(eta);
    let sp = sin_2pi(eta + sigma);
    let sm = sin_2pi(eta - sigma);
    let connection_c = Mat2([[se / ss, -I * sp / ss], [I * sm / ss, se / ss]]);
    let a = -2.0 * I * cos_2pi(sigma);
    Ok(MonodromyMatrices {
        connection_c,
        stokes_a: a,
        stokes_b: a,
    })
}

/// Entrywise residuals of the two sector-swap relations
///
///   swap C swap = S0_12^(-1) C Si_12 = S0_23 C Si_23^(-1),
///
/// measuring the triangular factorization against the connection matrix.
pub fn sector_relation_residuals(m: &MonodromyMatrices) -> (f64, f64) {
    let swap = Mat2::swap();
    let lhs = swap.mul(&m.connection_c).mul(&swap);
    let rhs1 = Mat2::upper(-m.stokes_a)
        .mul(&m.connection_c)
        .mul(&m.stokes_inf_12());
    let rhs2 = m
        .stokes_zero_23()
        .mul(&m.connection_c)
        .mul(&Mat2::upper(-m.stokes_b));
    (lhs.max_abs_diff(&rhs1), lhs.max_abs_diff(&rhs2))
}

/// eta as a function of (sigma, nu) on the principal branch:
/// arcsin(e^(pi nu) sin 2 pi sigma) / 2 pi. Hard error once the arcsin
/// argument reaches the unit circle; no silent continuation.
pub fn eta_from_nu(sigma: Complex64, nu: Complex64) -> Result<Complex64> {
    let x = (PI * nu).exp() * sin_2pi(sigma);
    if x.norm() >= 1.0 {
        return Err(Error::OutOfBaseDomain(format!(
            "arcsin argument has modulus {} >= 1 at sigma = {}, nu = {}",
            x.norm(),
            sigma,
            nu
        )));
    }
    Ok(x.asin() / (2.0 * PI))
}

/// Generating function W(sigma, nu) of the coordinate change, from
///
///   8 pi^2 W = Li2(-e^(2 pi i (sigma+eta-i nu/2)))
///            + Li2(-e^(-2 pi i (sigma+eta+i nu/2)))
///            - (2 pi eta)^2 + (pi nu)^2,
///
/// with eta = eta_from_nu(sigma, nu). Defined on the base domain
/// 0 < eta < sigma < 1/4 with nu real negative (and a complex
/// neighborhood thereof); errors once any principal branch is left.
pub fn generating_w(sigma: Complex64, nu: Complex64) -> Result<Complex64> {
    let eta = eta_from_nu(sigma, nu)?;
    let z1 = -(2.0 * PI * I * (sigma + eta - I * nu / 2.0)).exp();
    let z2 = -(-2.0 * PI * I * (sigma + eta + I * nu / 2.0)).exp();
    if z1.norm() >= 1.0 || z2.norm() >= 1.0 {
        return Err(Error::OutOfBaseDomain(format!(
            "dilogarithm arguments reach the unit circle: |z1| = {}, |z2| = {}",
            z1.norm(),
            z2.norm()
        )));
    }
    let li = dilog(z1) + dilog(z2);
    let te = 2.0 * PI * eta;
    let pn = PI * nu;
    Ok((li - te * te + pn * pn) / (8.0 * PI * PI))
}

/// Closed forms for (d eta/d sigma at fixed nu, d eta/d nu at fixed
/// sigma, d rho/d nu at fixed sigma):
///
///   cot 2 pi sigma tan 2 pi eta,
///   tan 2 pi eta / 2,
///   sin 2 pi sigma / (4 i cos 2 pi eta sin 2 pi (sigma+eta)).
pub fn derivative_table(
    sigma: Complex64,
    eta: Complex64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let ss = sin_2pi(sigma);
    let ce = cos_2pi(eta);
    let sse = sin_2pi(sigma + eta);
    if ss.norm() < SIN_SINGULAR {
        return Err(Error::SingularMonodromy {
            sigma,
            eta,
            reason: "sin 2 pi sigma vanishes",
        });
    }
    if ce.norm() < SIN_SINGULAR {
        return Err(Error::SingularMonodromy {
            sigma,
            eta,
            reason: "cos 2 pi eta vanishes",
        });
    }
    if sse.norm() < SIN_SINGULAR {
        return Err(Error::SingularMonodromy {
            sigma,
            eta,
            reason: "sin 2 pi (sigma + eta) vanishes",
        });
    }
    let tan_e = sin_2pi(eta) / ce;
    let deta_dsigma = cos_2pi(sigma) / ss * tan_e;
    let deta_dnu = tan_e / 2.0;
    let drho_dnu = ss / (4.0 * I * ce * sse);
    Ok((deta_dsigma, deta_dnu, drho_dnu))
}
