//! The long-distance representation: the irregular kernel
//!
//! ```text
//! G(nu, r) = e^(i pi nu^2/4) 2^(nu^2) (2 pi)^(-i nu/2) G(1 + i nu)
//!            * r^(nu^2/2 + 1/4) e^(r^2/16 + nu r) D(nu, r),
//!
//! D(nu, r) ~ 1 + sum_{k >= 1} D_k(nu) r^(-k)   (asymptotic),
//! ```
//!
//! the Fourier sum tau(2^-12 r^4) / chi = sum_n e^(4 pi i n rho) G(nu+in, r),
//! and the long-distance expansion of the sine-Gordon field u(r) with its
//! printed coefficient table b_kl. The D-series is asymptotic: only the
//! first four corrections are known, truncation is fixed, and the error
//! estimate is the last-kept-term heuristic.

use crate::error::{Error, Result};
use crate::monodromy::MonodromyPoint;
use crate::specfun::{log_barnes_g, LN_2PI};
use crate::tau_series::TruncationSpec;
use crate::{KahanSum, SeriesValue};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Corrections D_k are known through k = 4; beyond that the recursion
/// is out of scope.
pub const MAX_CORRECTION_ORDER: usize = 4;

/// The u(r) coefficient table covers total degree k + l <= 3.
pub const MAX_U_TABLE_ORDER: usize = 3;

/// The closed-form correction coefficients D_k(nu), k = 1..4.
pub fn d_coeff(k: usize, nu: Complex64) -> Result<Complex64> {
    let n2 = nu * nu;
    match k {
        1 => Ok(nu * (2.0 * n2 + 1.0) / 8.0),
        2 => Ok(n2 * (4.0 * n2 * n2 - 16.0 * n2 - 11.0) / 128.0),
        3 => {
            let p = 8.0 * n2.powu(4) - 108.0 * n2.powu(3) + 402.0 * n2 * n2 + 269.0 * n2 - 24.0;
            Ok(nu * p / 3072.0)
        }
        4 => {
            let p = 2.0 * n2.powu(5) - 56.0 * n2.powu(4) + 585.0 * n2.powu(3)
                - 2326.0 * n2 * n2
                - 7831.0 / 8.0 * n2
                + 612.0;
            Ok(n2 * p / 12288.0)
        }
        _ => Err(Error::UnsupportedOrder {
            requested: k,
            max: MAX_CORRECTION_ORDER,
        }),
    }
}

/// Inputs for one irregular kernel evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LongKernelParams {
    pub nu: Complex64,
    pub r: f64,
    pub k_corr: usize,
    pub n_fourier: usize,
}

impl LongKernelParams {
    pub fn new(nu: Complex64, r: f64, k_corr: usize, n_fourier: usize) -> Result<Self> {
        if !(nu.im > -1.0 && nu.im <= 1.0) {
            return Err(Error::Validation(format!(
                "Im nu = {} outside the branch window (-1, 1]",
                nu.im
            )));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Validation(format!(
                "radial coordinate must be a positive real, got {}",
                r
            )));
        }
        if k_corr > MAX_CORRECTION_ORDER {
            return Err(Error::Validation(format!(
                "correction order {} exceeds cap {}",
                k_corr, MAX_CORRECTION_ORDER
            )));
        }
        if n_fourier > TruncationSpec::MAX_FOURIER {
            return Err(Error::Validation(format!(
                "Fourier window {} exceeds cap {}",
                n_fourier,
                TruncationSpec::MAX_FOURIER
            )));
        }
        Ok(LongKernelParams {
            nu,
            r,
            k_corr,
            n_fourier,
        })
    }

    /// Kernel inputs for a monodromy point: nu from the point, cutoffs
    /// from the truncation spec.
    pub fn for_point(m: &MonodromyPoint, r: f64, trunc: &TruncationSpec) -> Result<Self> {
        trunc.validate()?;
        LongKernelParams::new(m.nu(), r, trunc.k_corr, trunc.n_fourier)
    }

    /// nu shifted along the imaginary lattice; deliberately skips the
    /// Im-window check, which only applies to the seed kernel.
    fn shifted(&self, n: i64) -> Self {
        LongKernelParams {
            nu: self.nu + I * n as f64,
            ..*self
        }
    }
}

/// The irregular kernel G(nu, r) truncated at k_corr corrections, with
/// the last-kept-term error heuristic. At nu = 0 every prefactor is
/// exactly one and the kernel collapses to r^(1/4) e^(r^2/16), the
/// elementary tau shape.
pub fn g_irregular(p: &LongKernelParams) -> Result<SeriesValue> {
    let nu = p.nu;
    let n2 = nu * nu;
    let ln_r = p.r.ln();
    let log_pref = I * PI * n2 / 4.0 + n2 * LN_2 - I * nu / 2.0 * LN_2PI
        + log_barnes_g(ONE + I * nu)?
        + (n2 / 2.0 + 0.25) * ln_r
        + p.r * p.r / 16.0
        + nu * p.r;
    let pref = log_pref.exp();
    let mut bracket = ONE;
    let mut r_pow = 1.0;
    for k in 1..=p.k_corr {
        r_pow /= p.r;
        bracket += d_coeff(k, nu)? * r_pow;
    }
    // Asymptotic series: charge the full size of the last kept
    // correction (or the first omitted one when none are kept).
    let k_est = p.k_corr.max(1);
    let err = d_coeff(k_est, nu)?.norm() * p.r.powi(-(k_est as i32)) * pref.norm();
    Ok(SeriesValue::new(pref * bracket, err))
}

/// sum over |n| <= n_fourier of e^(4 pi i n rho) G(nu + i n, r), the
/// unnormalized long-distance tau. The dropped |n| = n_fourier + 1
/// sidebands enter the error estimate; a Barnes zero there means the
/// dropped kernel vanishes identically and costs nothing.
pub fn fourier_kernel_sum(
    nu: Complex64,
    rho: Complex64,
    r: f64,
    k_corr: usize,
    n_fourier: usize,
) -> Result<SeriesValue> {
    // The Im-nu window is a branch convention for the seed kernel of a
    // monodromy point; the shifted kernels leave it by construction, so
    // this entry point only checks the structural inputs.
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Validation(format!(
            "radial coordinate must be a positive real, got {}",
            r
        )));
    }
    if k_corr > MAX_CORRECTION_ORDER {
        return Err(Error::Validation(format!(
            "correction order {} exceeds cap {}",
            k_corr, MAX_CORRECTION_ORDER
        )));
    }
    if n_fourier > TruncationSpec::MAX_FOURIER {
        return Err(Error::Validation(format!(
            "Fourier window {} exceeds cap {}",
            n_fourier,
            TruncationSpec::MAX_FOURIER
        )));
    }
    let base = LongKernelParams {
        nu,
        r,
        k_corr,
        n_fourier,
    };
    let nf = n_fourier as i64;
    let mut acc = KahanSum::default();
    let mut err = 0.0;
    for n in -nf..=nf {
        let phase = (4.0 * PI * I * n as f64 * rho).exp();
        let g = g_irregular(&base.shifted(n))?;
        acc.add(phase * g.value);
        err += phase.norm() * g.err_estimate;
    }
    for n in [-(nf + 1), nf + 1] {
        let phase = (4.0 * PI * I * n as f64 * rho).exp();
        match g_irregular(&base.shifted(n)) {
            Ok(g) => err += phase.norm() * g.value.norm(),
            Err(Error::BarnesZero { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(SeriesValue::new(acc.value(), err))
}

/// tau(2^-12 r^4) / chi for the monodromy point m: the Fourier kernel
/// sum with nu and the cutoffs taken from p. rho is only needed when
/// the window includes shifted kernels, so the elementary point with
/// divergent rho still evaluates at n_fourier = 0.
pub fn tau_long_unnormalized(m: &MonodromyPoint, p: &LongKernelParams) -> Result<SeriesValue> {
    let rho = if p.n_fourier == 0 {
        m.rho().unwrap_or_default()
    } else {
        m.rho_or_err()?
    };
    fourier_kernel_sum(p.nu, rho, p.r, p.k_corr, p.n_fourier)
}

/// The printed coefficient table of the u(r) expansion,
///
/// ```text
/// u(r) = sum_{k,l} sum_{s = +,-} b^s_kl e^(i s (2k+1) r)
///        * r^((2k+1)(i s nu - 1/2) - l)   (mod 2 pi),
/// ```
///
/// complete over the triangle k + l <= 3; everything is a closed form
/// in nu and the seeds b00.
#[derive(Debug, Clone)]
pub struct LongUCoeffTable {
    nu: Complex64,
    plus: [Complex64; 10],
    minus: [Complex64; 10],
}

/// The tabled cells in (k, l) form, grouped by total degree.
pub const U_TABLE_CELLS: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

fn cell_index(k: usize, l: usize) -> Option<usize> {
    U_TABLE_CELLS.iter().position(|&c| c == (k, l))
}

impl LongUCoeffTable {
    pub fn new(m: &MonodromyPoint) -> Self {
        let nu = m.nu();
        let (bp, bm) = m.b00();
        let mut towers = [[Complex64::default(); 10]; 2];
        for (tower, (b00, s)) in towers.iter_mut().zip([(bp, 1.0), (bm, -1.0)]) {
            let n2 = nu * nu;
            let b10 = -b00.powu(3) / 48.0;
            let b20 = b00.powu(5) / 1280.0;
            let b30 = -b00.powu(7) / 28672.0;
            let quad = 2.0 * n2 + s * 2.0 * I * nu - 1.0;
            let vals = [
                b00,
                b10,
                s * (I * b00 / 8.0) * (6.0 * n2 + s * 4.0 * I * nu - 1.0),
                b20,
                s * (9.0 * I * b10 / 8.0) * quad,
                -(b00 / 128.0)
                    * (36.0 * n2 * n2 + s * 128.0 * I * nu * n2 - 104.0 * n2 - s * 56.0 * I * nu
                        + 9.0),
                b30,
                s * (15.0 * I * b20 / 8.0) * quad,
                -(3.0 * b10 / 128.0)
                    * (108.0 * n2 * n2 + s * 296.0 * I * nu * n2 - 336.0 * n2 - s * 236.0 * I * nu
                        + 71.0),
                -s * (I * b00 / 1024.0)
                    * (72.0 * n2.powu(3) + s * 624.0 * I * nu * n2 * n2
                        - 1788.0 * n2 * n2
                        - s * 1824.0 * I * nu * n2
                        + 1522.0 * n2
                        + s * 532.0 * I * nu
                        - 75.0),
            ];
            *tower = vals;
        }
        LongUCoeffTable {
            nu,
            plus: towers[0],
            minus: towers[1],
        }
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }

    /// b^+_kl or b^-_kl; errors outside the printed triangle.
    pub fn coeff(&self, positive_freq: bool, k: usize, l: usize) -> Result<Complex64> {
        let idx = cell_index(k, l).ok_or(Error::TableExhausted {
            requested: k + l,
            max: MAX_U_TABLE_ORDER,
        })?;
        Ok(if positive_freq {
            self.plus[idx]
        } else {
            self.minus[idx]
        })
    }
}

fn check_u_order(order: usize) -> Result<()> {
    if order > MAX_U_TABLE_ORDER {
        return Err(Error::TableExhausted {
            requested: order,
            max: MAX_U_TABLE_ORDER,
        });
    }
    Ok(())
}

/// The partial sum of the u(r) expansion over cells with total degree
/// k + l <= order. This is u itself up to the inherent 2 pi n shift,
/// which drops out of every consumer below.
pub fn u_long_partial_sum(m: &MonodromyPoint, r: f64, order: usize) -> Result<Complex64> {
    check_u_order(order)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Validation(format!(
            "radial coordinate must be a positive real, got {}",
            r
        )));
    }
    let table = LongUCoeffTable::new(m);
    let nu = table.nu;
    let ln_r = r.ln();
    let mut acc = KahanSum::default();
    for &(k, l) in U_TABLE_CELLS.iter().filter(|&&(k, l)| k + l <= order) {
        let m21 = (2 * k + 1) as f64;
        for (positive, s) in [(true, 1.0), (false, -1.0)] {
            let coeff = table.coeff(positive, k, l)?;
            let exponent = m21 * (s * I * nu - 0.5) - l as f64;
            acc.add(coeff * (I * s * m21 * r).exp() * (exponent * ln_r).exp());
        }
    }
    Ok(acc.value())
}

/// e^(i u(r)) from the truncated long-distance expansion; the
/// exponential removes the mod-2pi ambiguity. The leading term should
/// be small at the radii where this is used; no convergence check is
/// performed (the series is only asymptotic).
pub fn u_long(m: &MonodromyPoint, r: f64, order: usize) -> Result<Complex64> {
    Ok((I * u_long_partial_sum(m, r, order)?).exp())
}

/// | u'' + u'/r + sin u | for the truncated expansion, with fourth-order
/// five-point stencils at step h = 0.01. The 2 pi n ambiguity drops out
/// of both the derivatives and the sine.
pub fn sine_gordon_residual(m: &MonodromyPoint, r: f64, order: usize) -> Result<f64> {
    check_u_order(order)?;
    let h = 0.01;
    if r <= 2.0 * h {
        return Err(Error::Validation(format!(
            "residual stencil needs r > {}, got {}",
            2.0 * h,
            r
        )));
    }
    let mut s = [Complex64::default(); 5];
    for (j, slot) in s.iter_mut().enumerate() {
        *slot = u_long_partial_sum(m, r + (j as f64 - 2.0) * h, order)?;
    }
    let upp = (-s[4] + 16.0 * s[3] - 30.0 * s[2] + 16.0 * s[1] - s[0]) / (12.0 * h * h);
    let up = (s[0] - 8.0 * s[1] + 8.0 * s[3] - s[4]) / (12.0 * h);
    Ok((upp + up / r + s[2].sin()).norm())
}
