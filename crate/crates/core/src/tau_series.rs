//! The convergent short-distance representation of the tau function,
//!
//! ```text
//! tau(t) = sum over integer n of e^(4 pi i n eta) F(sigma + n, t),
//! ```
//!
//! its logarithmic derivative zeta(t) = t d/dt ln tau(t) obtained by
//! exact term-wise differentiation, recovery of the sine-Gordon field
//! through e^(-iu) = 2^-6 r^2 zeta'(2^-12 r^4), and the residual of the
//! second-order equation
//!
//! ```text
//! (t zeta'')^2 = 4 (zeta')^2 (zeta - t zeta') - 4 zeta'
//! ```
//!
//! used everywhere as the self-contained correctness oracle.
//!
//! Every summand is a single power A t^((sigma+n)^2 + k), so the Euler
//! operator theta = t d/dt acts exactly, multiplying it by its exponent.
//! No finite differences appear in this module.

use crate::error::{Error, Result};
use crate::monodromy::MonodromyPoint;
use crate::nekrasov::{CoverTime, InstantonSeries, MAX_INSTANTON_ORDER};
use crate::specfun::log_barnes_g;
use crate::tau_asymptotics::MAX_CORRECTION_ORDER;
use crate::{KahanSum, SeriesValue};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// |tau| below this times the largest summand magnitude counts as a
/// movable zero and the log-derivative refuses to divide.
const ZERO_TAU_SCALE: f64 = 1e-290;

/// All series cutoffs in one place. `n_fourier` keeps |n| <= n_fourier
/// in the Fourier sums, `n_inst` truncates each instanton series at
/// total degree n_inst, `k_corr` truncates the long-distance 1/r
/// corrections, and `fd_step` is the step for the few numerical
/// derivatives in the residual oracles.
#[derive(Debug, Clone, Copy)]
pub struct TruncationSpec {
    pub n_fourier: usize,
    pub n_inst: usize,
    pub k_corr: usize,
    pub fd_step: f64,
}

impl TruncationSpec {
    pub const MAX_FOURIER: usize = 8;

    pub fn new(n_fourier: usize, n_inst: usize, k_corr: usize, fd_step: f64) -> Result<Self> {
        let spec = TruncationSpec {
            n_fourier,
            n_inst,
            k_corr,
            fd_step,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_fourier > Self::MAX_FOURIER {
            return Err(Error::Validation(format!(
                "Fourier window {} exceeds cap {}",
                self.n_fourier,
                Self::MAX_FOURIER
            )));
        }
        if self.n_inst > MAX_INSTANTON_ORDER {
            return Err(Error::Validation(format!(
                "instanton order {} exceeds cap {}",
                self.n_inst, MAX_INSTANTON_ORDER
            )));
        }
        if self.k_corr > MAX_CORRECTION_ORDER {
            return Err(Error::Validation(format!(
                "correction order {} exceeds cap {}",
                self.k_corr, MAX_CORRECTION_ORDER
            )));
        }
        if !(self.fd_step > 0.0) || !self.fd_step.is_finite() {
            return Err(Error::Validation(format!(
                "finite-difference step must be a positive real, got {}",
                self.fd_step
            )));
        }
        Ok(())
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec {
            n_fourier: 6,
            n_inst: 15,
            k_corr: 4,
            fd_step: 1e-5,
        }
    }
}

/// One Fourier summand e^(4 pi i n eta) F(sigma+n, t) in factored form:
/// everything except the t-dependence is precomputed.
struct ShortTerm {
    /// e^(4 pi i n eta).
    phase: Complex64,
    /// (sigma + n)^2, the exponent of the leading power.
    exponent: Complex64,
    /// -ln G(1 + 2(sigma+n)) - ln G(1 - 2(sigma+n)).
    log_norm: Complex64,
    inst: InstantonSeries,
}

/// The short-distance tau series prepared for one monodromy point and
/// one truncation: construction does all partition sums and Barnes
/// evaluations once, so sweeping a grid of t costs only power series
/// evaluations.
pub struct TauShortEval {
    terms: Vec<ShortTerm>,
    /// Exponent and log-normalization for the first omitted |n|, used
    /// for the dropped-tail estimate.
    probes: Vec<(Complex64, Complex64)>,
}

impl TauShortEval {
    pub fn new(m: &MonodromyPoint, trunc: &TruncationSpec) -> Result<Self> {
        trunc.validate()?;
        let sigma = m.sigma();
        let eta = m.eta();
        let nf = trunc.n_fourier as i64;
        let mut terms = Vec::with_capacity(2 * trunc.n_fourier + 1);
        for n in -nf..=nf {
            let s = sigma + n as f64;
            let inst = InstantonSeries::new(s, trunc.n_inst)?;
            terms.push(ShortTerm {
                phase: (4.0 * PI * I * n as f64 * eta).exp(),
                exponent: s * s,
                log_norm: -log_barnes_g(ONE + 2.0 * s)? - log_barnes_g(ONE - 2.0 * s)?,
                inst,
            });
        }
        // The resonance margin is n-independent, so the omitted blocks
        // are always constructible; only their size is needed.
        let mut probes = Vec::with_capacity(2);
        for n in [-(nf + 1), nf + 1] {
            let s = sigma + n as f64;
            probes.push((
                s * s,
                -log_barnes_g(ONE + 2.0 * s)? - log_barnes_g(ONE - 2.0 * s)?,
            ));
        }
        Ok(TauShortEval { terms, probes })
    }

    /// tau(t) with a truncation estimate covering both the instanton
    /// tails and the dropped Fourier sidebands.
    pub fn eval(&self, t: CoverTime) -> SeriesValue {
        let ln_t = t.ln();
        let tv = t.value();
        let mut acc = KahanSum::default();
        let mut err = 0.0;
        let mut max_b = 0.0_f64;
        for term in &self.terms {
            let base = term.phase * (term.exponent * ln_t + term.log_norm).exp();
            let b = term.inst.eval(tv);
            acc.add(base * b.value);
            err += base.norm() * b.err_estimate;
            max_b = max_b.max(b.value.norm());
        }
        for &(exponent, log_norm) in &self.probes {
            err += (exponent * ln_t + log_norm).exp().norm() * max_b.max(1.0);
        }
        SeriesValue::new(acc.value(), err)
    }

    /// The Euler-derivative jets T_j = (theta^j tau)(t) for j = 0..jmax,
    /// theta = t d/dt, each summand differentiated exactly. Also returns
    /// the largest single summand magnitude as a cancellation scale.
    pub fn theta_jets(&self, t: CoverTime, jmax: usize) -> (Vec<Complex64>, f64) {
        let ln_t = t.ln();
        let tv = t.value();
        let mut jets = vec![KahanSum::default(); jmax + 1];
        let mut max_term = 0.0_f64;
        for term in &self.terms {
            let base = term.phase * (term.exponent * ln_t + term.log_norm).exp();
            let mut t_pow = Complex64::new(1.0, 0.0);
            for k in 0..=term.inst.order() {
                let w = base * term.inst.coeff(k) * t_pow;
                max_term = max_term.max(w.norm());
                let mut p = Complex64::new(1.0, 0.0);
                let exponent = term.exponent + k as f64;
                for jet in jets.iter_mut() {
                    jet.add(w * p);
                    p *= exponent;
                }
                t_pow *= tv;
            }
        }
        (jets.into_iter().map(|j| j.value()).collect(), max_term)
    }

    /// zeta and its first two t-derivatives from the first three jets.
    pub fn zeta_jets(&self, t: CoverTime) -> Result<(Complex64, Complex64, Complex64)> {
        let (jets, max_term) = self.theta_jets(t, 3);
        let t0 = jets[0];
        if t0.norm() < ZERO_TAU_SCALE * max_term {
            return Err(Error::ZeroOfTau {
                magnitude: t0.norm(),
            });
        }
        let tv = t.value();
        let zeta = jets[1] / t0;
        let theta_zeta = jets[2] / t0 - zeta * zeta;
        let theta2_zeta = jets[3] / t0 - jets[2] * jets[1] / (t0 * t0) - 2.0 * zeta * theta_zeta;
        let zeta_p = theta_zeta / tv;
        let zeta_pp = (theta2_zeta - theta_zeta) / (tv * tv);
        Ok((zeta, zeta_p, zeta_pp))
    }
}

/// tau(t) = sum of e^(4 pi i n eta) F(sigma+n, t) over |n| <= n_fourier.
pub fn tau_short(m: &MonodromyPoint, t: CoverTime, trunc: &TruncationSpec) -> Result<SeriesValue> {
    Ok(TauShortEval::new(m, trunc)?.eval(t))
}

/// zeta(t) = t d/dt ln tau(t).
pub fn zeta(m: &MonodromyPoint, t: CoverTime, trunc: &TruncationSpec) -> Result<Complex64> {
    Ok(TauShortEval::new(m, trunc)?.zeta_jets(t)?.0)
}

/// Relative residual of (t zeta'')^2 - 4 (zeta')^2 (zeta - t zeta')
/// + 4 zeta', normalized by the largest of the three terms.
pub fn sigma_form_residual(
    m: &MonodromyPoint,
    t: CoverTime,
    trunc: &TruncationSpec,
) -> Result<f64> {
    let eval = TauShortEval::new(m, trunc)?;
    sigma_form_residual_with(&eval, t)
}

/// Same residual with a prebuilt evaluator, for sweeps.
pub fn sigma_form_residual_with(eval: &TauShortEval, t: CoverTime) -> Result<f64> {
    let (zeta, zeta_p, zeta_pp) = eval.zeta_jets(t)?;
    let tv = t.value();
    let lhs = (tv * zeta_pp).powu(2);
    let mid = 4.0 * zeta_p * zeta_p * (zeta - tv * zeta_p);
    let last = 4.0 * zeta_p;
    let res = (lhs - mid + last).norm();
    let scale = lhs.norm().max(mid.norm()).max(last.norm()).max(1e-300);
    Ok(res / scale)
}

/// e^(-i u(r)) = 2^-6 r^2 zeta'(2^-12 r^4). The exponential is returned
/// rather than u itself, which is only defined mod 2 pi.
pub fn u_from_tau(m: &MonodromyPoint, r: f64, trunc: &TruncationSpec) -> Result<Complex64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Validation(format!(
            "radial coordinate must be a positive real, got {}",
            r
        )));
    }
    let t = CoverTime::positive(r.powi(4) / 4096.0)?;
    let eval = TauShortEval::new(m, trunc)?;
    let (_, zeta_p, _) = eval.zeta_jets(t)?;
    Ok(r * r / 64.0 * zeta_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nekrasov::{f_block, BlockParams};
    use crate::specfun::log_gamma;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point(s: Complex64, e: Complex64) -> MonodromyPoint {
        MonodromyPoint::new(s, e).unwrap()
    }

    /// Monodromy sampler keeping the resonance margin healthy.
    fn generic_point(rng: &mut StdRng) -> MonodromyPoint {
        loop {
            let s = c(rng.gen_range(0.1..0.4), rng.gen_range(-0.15..0.15));
            let e = c(rng.gen_range(0.05..0.45), rng.gen_range(-0.15..0.15));
            if crate::nekrasov::resonance_gap(s) < 0.05 {
                continue;
            }
            if let Ok(p) = MonodromyPoint::new(s, e) {
                return p;
            }
        }
    }

    #[test]
    fn truncation_spec_validation() {
        assert!(TruncationSpec::new(6, 15, 4, 1e-5).is_ok());
        assert!(TruncationSpec::new(9, 15, 4, 1e-5).is_err());
        assert!(TruncationSpec::new(6, 21, 4, 1e-5).is_err());
        assert!(TruncationSpec::new(6, 15, 5, 1e-5).is_err());
        assert!(TruncationSpec::new(6, 15, 4, 0.0).is_err());
        let d = TruncationSpec::default();
        assert_eq!((d.n_fourier, d.n_inst, d.k_corr), (6, 15, 4));
    }

    #[test]
    fn zero_fourier_window_is_the_bare_block() {
        let m = point(c(0.3, 0.05), c(0.1, 0.0));
        let t = CoverTime::positive(0.7).unwrap();
        let trunc = TruncationSpec::new(0, 12, 4, 1e-5).unwrap();
        let tau = tau_short(&m, t, &trunc).unwrap();
        let block = f_block(&BlockParams {
            sigma: m.sigma(),
            t,
            n_inst: 12,
        })
        .unwrap();
        assert!((tau.value - block.value).norm() <= 1e-14 * block.value.norm());
    }

    #[test]
    fn small_t_power_law() {
        // tau ~ t^(sigma^2) / (G(1+2s) G(1-2s)): complex log-log slope.
        let m = point(c(0.3, 0.08), c(0.2, -0.1));
        let trunc = TruncationSpec::default();
        let eval = TauShortEval::new(&m, &trunc).unwrap();
        // Deep in the power-law regime the nearest competing block sits
        // a relative t^(1-2 Re sigma) below the leading one.
        let (ta, tb) = (1e-20, 1e-18);
        let va = eval.eval(CoverTime::positive(ta).unwrap()).value;
        let vb = eval.eval(CoverTime::positive(tb).unwrap()).value;
        let slope = (vb / va).ln() / (tb.ln() - ta.ln());
        let expect = m.sigma() * m.sigma();
        assert!((slope - expect).norm() < 1e-5, "slope = {}", slope);
    }

    #[test]
    fn zeta_tends_to_sigma_squared() {
        let m = point(c(0.3, 0.0), c(0.1, 0.0));
        let trunc = TruncationSpec::default();
        let z = zeta(&m, CoverTime::positive(1e-30).unwrap(), &trunc).unwrap();
        let expect = m.sigma() * m.sigma();
        assert!((z - expect).norm() < 1e-8, "zeta = {}", z);
    }

    #[test]
    fn sigma_form_residual_spot() {
        let m = point(c(0.3, 0.0), c(0.1, 0.0));
        let trunc = TruncationSpec::default();
        let res = sigma_form_residual(&m, CoverTime::positive(0.2).unwrap(), &trunc).unwrap();
        assert!(res < 1e-8, "residual = {}", res);
    }

    #[test]
    fn sigma_form_residual_sweep() {
        // The equation residual is the module's end-to-end oracle: it
        // ties the blocks, the Barnes normalizations, and the jets
        // together at every t.
        let mut rng = StdRng::seed_from_u64(71);
        let trunc = TruncationSpec::new(6, 20, 4, 1e-5).unwrap();
        for _ in 0..10 {
            let m = generic_point(&mut rng);
            let eval = TauShortEval::new(&m, &trunc).unwrap();
            for _ in 0..4 {
                let t = 0.01 * (500.0_f64).powf(rng.gen_range(0.0..1.0));
                let res = sigma_form_residual_with(&eval, CoverTime::positive(t).unwrap()).unwrap();
                assert!(
                    res < 1e-8,
                    "sigma = {}, eta = {}, t = {}: residual {}",
                    m.sigma(),
                    m.eta(),
                    t,
                    res
                );
            }
        }
    }

    #[test]
    fn short_distance_u_law() {
        // e^(iu) ~ -e^(4 pi i eta) Gamma(1-2s)^2/Gamma(2s)^2 (r/8)^(8s-2)
        // as r -> 0.
        let m = point(c(0.3, 0.0), c(0.1, 0.0));
        let r = 0.05;
        let trunc = TruncationSpec::default();
        let e_miu = u_from_tau(&m, r, &trunc).unwrap();
        let e_iu = 1.0 / e_miu;
        let s = m.sigma();
        let log_ratio = 2.0 * (log_gamma(ONE - 2.0 * s).unwrap() - log_gamma(2.0 * s).unwrap());
        let expect =
            -(4.0 * PI * I * m.eta()).exp() * log_ratio.exp() * c(r / 8.0, 0.0).powc(8.0 * s - 2.0);
        assert!(
            (e_iu - expect).norm() <= 0.01 * expect.norm(),
            "e^(iu) = {}, expected {}",
            e_iu,
            expect
        );
    }

    #[test]
    fn quarter_point_matches_elementary_solution() {
        // At sigma = eta = 1/4 every shifted block is resonance-free and
        // the full sum collapses to tau proportional to t^(1/16) e^(4 sqrt t),
        // i.e. zeta = 1/16 + 2 sqrt(t) and e^(-iu) = 1.
        let m = point(c(0.25, 0.0), c(0.25, 0.0));
        let trunc = TruncationSpec::new(6, 20, 4, 1e-5).unwrap();
        let eval = TauShortEval::new(&m, &trunc).unwrap();
        for t in [0.04, 0.3] {
            let (z, zp, _) = eval.zeta_jets(CoverTime::positive(t).unwrap()).unwrap();
            let expect = 0.0625 + 2.0 * t.sqrt();
            assert!(
                (z - expect).norm() < 1e-9,
                "t = {}: zeta = {}, expected {}",
                t,
                z,
                expect
            );
            let e_miu = t.sqrt() * zp;
            assert!(
                (e_miu - ONE).norm() < 1e-9,
                "t = {}: e^(-iu) = {}",
                t,
                e_miu
            );
        }
        // In radial form: e^(-iu) = 2^-6 r^2 zeta'(2^-12 r^4) = 1.
        let e_miu = u_from_tau(&m, 1.3, &trunc).unwrap();
        assert!((e_miu - ONE).norm() < 1e-9);
    }

    #[test]
    fn fourier_periodicity_in_sigma() {
        // sigma -> sigma+1 with the compensating phase e^(-4 pi i eta)
        // re-indexes the sum; at finite window the mismatch is the
        // dropped boundary blocks.
        let s = c(0.3, 0.05);
        let e = c(0.1, -0.02);
        let trunc = TruncationSpec::default();
        let t = CoverTime::positive(1.0).unwrap();
        let base = tau_short(&MonodromyPoint::new(s, e).unwrap(), t, &trunc).unwrap();
        let shifted = tau_short(&MonodromyPoint::raw(s + 1.0, e).unwrap(), t, &trunc).unwrap();
        let diff = ((4.0 * PI * I * e).exp() * shifted.value - base.value).norm();
        assert!(diff <= 1e-8 * base.value.norm(), "mismatch {}", diff);
    }

    #[test]
    fn fourier_window_saturates() {
        // Benchmark monodromy: widening the window 4 -> 6 moves tau by
        // less than 1e-10 relative for |t| <= 5.
        let m = point(c(0.12, -0.25), c(0.23, 0.42));
        let t4 = TruncationSpec::new(4, 15, 4, 1e-5).unwrap();
        let t6 = TruncationSpec::new(6, 15, 4, 1e-5).unwrap();
        for t in [0.5, 2.0, 5.0] {
            let ct = CoverTime::positive(t).unwrap();
            let lo = tau_short(&m, ct, &t4).unwrap();
            let hi = tau_short(&m, ct, &t6).unwrap();
            let rel = (lo.value - hi.value).norm() / hi.value.norm();
            assert!(rel < 1e-10, "t = {}: window drift {}", t, rel);
            // And the reported estimate covers the drift.
            assert!(rel * hi.value.norm() <= lo.err_estimate.max(1e-30));
        }
    }

    #[test]
    fn resonant_sigma_rejected() {
        let m = MonodromyPoint::new(c(0.3, 0.0), c(0.1, 0.0)).unwrap();
        // sigma itself fine, but force a resonant shifted block via raw
        // sigma = 0.5: every 2(sigma+n) is an odd integer.
        assert!(matches!(
            MonodromyPoint::raw(c(0.5, 0.0), c(0.1, 0.0)),
            Err(Error::SingularMonodromy { .. })
        ));
        // A non-monodromy route: resonance caught at series build.
        let trunc = TruncationSpec::default();
        let t = CoverTime::positive(0.5).unwrap();
        assert!(tau_short(&m, t, &trunc).is_ok());
    }
}
