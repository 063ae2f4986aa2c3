//! The connection constant chi(sigma, nu; eta) between the two critical
//! expansions: its Barnes closed form
//!
//! ```text
//! chi = (2 pi)^(i nu - 1/2)
//!       * e^(i pi (eta^2 - 2 sigma eta - sigma^2 + eta - sigma - nu^2/4 + 1/8))
//!       * 2^(-1/4) / G(1/2)^2
//!       * Ghat(sigma + eta + (1 - i nu)/2) / Ghat(sigma + eta + (1 + i nu)/2),
//! ```
//!
//! its symmetries, and the numerical extraction of chi as the ratio
//! tau_short(2^-12 r^4) / tau_long_unnormalized(r) over an r-window
//! where both expansions are trustworthy.

use crate::error::{Error, Result};
use crate::monodromy::MonodromyPoint;
use crate::nekrasov::CoverTime;
use crate::specfun::{log_barnes_g, log_g_hat, LN_2PI};
use crate::tau_asymptotics::fourier_kernel_sum;
use crate::tau_series::{TauShortEval, TruncationSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::f64::consts::{LN_2, PI};

const I: Complex64 = Complex64::new(0.0, 1.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// Extraction window where the short series still converges fast and the
/// long series' 1/r corrections are already small.
pub const DEFAULT_WINDOW: (f64, f64) = (6.0, 10.0);

/// A spread of the pointwise ratios beyond this flags truncation orders
/// too low for the requested window.
pub const DEFAULT_SPREAD_BOUND: f64 = 1e-3;

/// Grid points across the window; odd so the median is a grid value.
const CHI_GRID: usize = 17;

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_opt_complex<S: Serializer>(
    z: &Option<Complex64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    z.map(|v| [v.re, v.im]).serialize(s)
}

/// Closed-form constant next to the numerical extraction and its window.
/// Complex numbers serialize as [re, im] pairs.
#[derive(Debug, Clone, Serialize)]
pub struct ChiResult {
    #[serde(serialize_with = "ser_complex")]
    pub chi_formula: Complex64,
    #[serde(
        serialize_with = "ser_opt_complex",
        skip_serializing_if = "Option::is_none"
    )]
    pub chi_numeric: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    pub window: (f64, f64),
}

/// The closed-form connection constant. The whole value is assembled as
/// a single exponential of accumulated logarithms, so one continuation
/// path covers every factor; the Ghat ratio in particular is one
/// log-difference. Equal Ghat arguments (nu = 0) short-circuit to ratio
/// one, which keeps the elementary locus evaluable where the shared
/// argument is an integer.
pub fn chi_formula(m: &MonodromyPoint) -> Result<Complex64> {
    let s = m.sigma();
    let e = m.eta();
    let nu = m.nu();
    let arg_minus = s + e + (1.0 - I * nu) / 2.0;
    let arg_plus = s + e + (1.0 + I * nu) / 2.0;
    let ghat_diff = if arg_minus == arg_plus {
        Complex64::default()
    } else {
        log_g_hat(arg_minus)? - log_g_hat(arg_plus)?
    };
    let phase = I * PI * (e * e - 2.0 * s * e - s * s + e - s - nu * nu / 4.0 + 0.125);
    let log_chi =
        (I * nu - 0.5) * LN_2PI + phase - 0.25 * LN_2 - 2.0 * log_barnes_g(HALF)? + ghat_diff;
    Ok(log_chi.exp())
}

/// The shift-invariant prefactor underlying the closed form, written in
/// the variable mu which absorbs every path ambiguity:
///
/// ```text
/// pref(mu) = (2 pi)^(i nu)
///            * e^(i pi (mu (mu + i nu + 1 - 4 sigma) + 2 sigma^2
///                       - (nu - i)(nu + 4 i sigma)/2))
///            * Ghat(mu + 1/2) / Ghat(mu + i nu + 1/2).
/// ```
///
/// On shell (mu = sigma + eta - i nu/2) an integer shift of mu leaves it
/// unchanged, which is exactly why chi is single-valued; chi itself is
/// pref(mu) times a mu-independent constant.
pub fn connection_prefactor(sigma: Complex64, nu: Complex64, mu: Complex64) -> Result<Complex64> {
    let phase = I
        * PI
        * (mu * (mu + I * nu + 1.0 - 4.0 * sigma) + 2.0 * sigma * sigma
            - (nu - I) * (nu + 4.0 * I * sigma) / 2.0);
    let log_pref = I * nu * LN_2PI + phase + log_g_hat(mu + HALF)? - log_g_hat(mu + I * nu + HALF)?;
    Ok(log_pref.exp())
}

/// Relative error of the two-solution product identity
///
/// ```text
/// chi(sigma, nu; eta) chi(sigma, nu; 1/2 - eta)
///     = (2 pi)^(i nu - 1) e^(-i pi nu^2/2) / (sqrt 2 G(1/2)^4 Ghat(i nu)),
/// ```
///
/// pairing the two eta-solutions of the nu relation at fixed sigma.
pub fn chi_product_check(m: &MonodromyPoint) -> Result<f64> {
    let partner = MonodromyPoint::raw(m.sigma(), 0.5 - m.eta())?;
    let lhs = chi_formula(m)? * chi_formula(&partner)?;
    let nu = m.nu();
    let inu = I * nu;
    let ghat = if inu == Complex64::default() {
        Complex64::default()
    } else {
        log_g_hat(inu)?
    };
    let log_rhs = (inu - 1.0) * LN_2PI
        - I * PI * nu * nu / 2.0
        - 0.5 * LN_2
        - 4.0 * log_barnes_g(HALF)?
        - ghat;
    Ok((lhs / log_rhs.exp() - 1.0).norm())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Extraction with explicit grid size and spread bound. The truncation's
/// Fourier window applies to the long sum; the short sum always runs its
/// maximal window, since its outer blocks are strongly damped there and
/// cost little, while the long sidebands are the expensive, error-prone
/// part being controlled.
pub fn chi_numeric_grid(
    m: &MonodromyPoint,
    r_window: (f64, f64),
    n_points: usize,
    spread_bound: f64,
    trunc: &TruncationSpec,
) -> Result<ChiResult> {
    let (lo, hi) = r_window;
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::Validation(format!(
            "window must satisfy 0 < r_lo <= r_hi, got ({}, {})",
            lo, hi
        )));
    }
    if n_points == 0 {
        return Err(Error::Validation("empty extraction grid".into()));
    }
    if !(spread_bound > 0.0) {
        return Err(Error::Validation(format!(
            "spread bound must be positive, got {}",
            spread_bound
        )));
    }
    trunc.validate()?;
    let formula = chi_formula(m)?;
    let short_trunc = TruncationSpec {
        n_fourier: TruncationSpec::MAX_FOURIER,
        ..*trunc
    };
    let short = TauShortEval::new(m, &short_trunc)?;
    let nu = m.nu();
    let rho = if trunc.n_fourier == 0 {
        m.rho().unwrap_or_default()
    } else {
        m.rho_or_err()?
    };
    let count = if lo == hi { 1 } else { n_points.max(2) };
    let step = if count > 1 {
        (hi - lo) / (count - 1) as f64
    } else {
        0.0
    };
    let ratios: Vec<Complex64> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<Complex64> {
            let r = lo + step * i as f64;
            let t = CoverTime::positive(r.powi(4) / 4096.0)?;
            let short_v = short.eval(t);
            let long_v = fourier_kernel_sum(nu, rho, r, trunc.k_corr, trunc.n_fourier)?;
            if long_v.value == Complex64::default() {
                return Err(Error::ZeroOfTau { magnitude: 0.0 });
            }
            Ok(short_v.value / long_v.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut res: Vec<f64> = ratios.iter().map(|z| z.re).collect();
    let mut ims: Vec<f64> = ratios.iter().map(|z| z.im).collect();
    let numeric = Complex64::new(median(&mut res), median(&mut ims));
    let spread = ratios
        .iter()
        .map(|z| (z / numeric - 1.0).norm())
        .fold(0.0, f64::max);
    if !(spread <= spread_bound) {
        return Err(Error::WindowTooWild {
            spread,
            bound: spread_bound,
        });
    }
    Ok(ChiResult {
        chi_formula: formula,
        chi_numeric: Some(numeric),
        rel_discrepancy: Some((numeric / formula - 1.0).norm()),
        spread: Some(spread),
        window: (lo, hi),
    })
}

/// Median-of-ratios extraction over the window with the default grid and
/// spread bound, compared against the closed form.
pub fn chi_numeric(
    m: &MonodromyPoint,
    r_window: (f64, f64),
    trunc: &TruncationSpec,
) -> Result<ChiResult> {
    chi_numeric_grid(m, r_window, CHI_GRID, DEFAULT_SPREAD_BOUND, trunc)
}
