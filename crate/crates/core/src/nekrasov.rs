//! Instanton-type sums over pairs of Young diagrams and the conformal
//! block F(sigma, t) they build.
//!
//! The block series is
//!
//! ```text
//! B(sigma, t) = sum over (lambda, mu) of
//!     (dim lambda dim mu / (|lambda|! |mu|!))^2
//!     * t^(|lambda|+|mu|) / b_{lambda,mu}(sigma)^2
//! ```
//!
//! with the pole factor
//!
//! ```text
//! b_{lambda,mu}(sigma) =
//!     prod over cells (k,l) of lambda of
//!         (lambda'_l - k + mu_k - l + 1 + 2 sigma)
//!   * prod over cells (k,l) of mu of
//!         (mu'_l - k + lambda_k - l + 1 - 2 sigma),
//! ```
//!
//! and the normalised block is
//!
//! ```text
//! F(sigma, t) = t^(sigma^2) B(sigma, t) / (G(1+2 sigma) G(1-2 sigma)).
//! ```
//!
//! Every factor of b is at least sqrt(L) in modulus, where
//! L = min_n |2 sigma - n|^2, which gives the convergence bound
//! |B| <= exp(2|t|/L) and the tail estimates used below. Coefficients are
//! grouped by total degree |lambda|+|mu| and accumulated with compensated
//! summation in enumeration order, so evaluation is deterministic.

use crate::error::{Error, Result};
use crate::partitions::{self, Partition};
use crate::specfun::log_barnes_g;
use crate::{KahanSum, SeriesValue};
use num_complex::Complex64;

/// Instanton orders beyond this add nothing at double precision for the
/// |t| range where the short-distance series is used.
pub const MAX_INSTANTON_ORDER: usize = 20;

/// Refuse to sum closer to a resonance (2 sigma integer) than this.
pub const MIN_RESONANCE_GAP: f64 = 1e-6;

/// A point on the universal cover of the punctured t-plane: modulus plus
/// a declared argument that is *not* reduced mod 2 pi. This fixes the
/// branch of t^a once and for all; positive real t means arg = 0.
#[derive(Debug, Clone, Copy)]
pub struct CoverTime {
    abs: f64,
    arg: f64,
}

impl CoverTime {
    pub fn new(abs: f64, arg: f64) -> Result<Self> {
        if !(abs > 0.0) || !abs.is_finite() || !arg.is_finite() {
            return Err(Error::Validation(format!(
                "cover point needs finite |t| > 0, got |t| = {}, arg = {}",
                abs, arg
            )));
        }
        Ok(CoverTime { abs, arg })
    }

    /// Positive real t with arg fixed to 0 (the physical branch).
    pub fn positive(t: f64) -> Result<Self> {
        CoverTime::new(t, 0.0)
    }

    pub fn abs(&self) -> f64 {
        self.abs
    }

    pub fn arg(&self) -> f64 {
        self.arg
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.abs, self.arg)
    }

    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.abs.ln(), self.arg)
    }

    /// t^a = exp(a ln t) on the declared branch.
    pub fn pow(&self, a: Complex64) -> Complex64 {
        (a * self.ln()).exp()
    }
}

/// Inputs for one conformal block: local exponent, cover point, and the
/// instanton truncation order.
#[derive(Debug, Clone, Copy)]
pub struct BlockParams {
    pub sigma: Complex64,
    pub t: CoverTime,
    pub n_inst: usize,
}

/// Distance-squared from 2 sigma to the nearest integer: the margin L
/// controlling both the poles of b and the convergence bound.
pub fn resonance_gap(sigma: Complex64) -> f64 {
    let x = 2.0 * sigma;
    (x - x.re.round()).norm_sqr()
}

/// The pole factor b_{lambda,mu}(sigma).
pub fn b_factor(lambda: &Partition, mu: &Partition, sigma: Complex64) -> Complex64 {
    b_factor_conj(lambda, &lambda.transpose(), mu, &mu.transpose(), sigma)
}

/// Inner product over cells with the transposes supplied by the caller,
/// so series construction can cache them per shape.
fn b_factor_conj(
    lambda: &Partition,
    lambda_conj: &Partition,
    mu: &Partition,
    mu_conj: &Partition,
    sigma: Complex64,
) -> Complex64 {
    let two_sigma = 2.0 * sigma;
    let mut prod = Complex64::new(1.0, 0.0);
    for (i, j) in lambda.cells() {
        // 1-based cell (k,l) = (i+1, j+1).
        let arm_leg = lambda_conj.part(j) as f64 + mu.part(i) as f64 - (i as f64 + j as f64 + 1.0);
        prod *= arm_leg + two_sigma;
    }
    for (i, j) in mu.cells() {
        let arm_leg = mu_conj.part(j) as f64 + lambda.part(i) as f64 - (i as f64 + j as f64 + 1.0);
        prod *= arm_leg - two_sigma;
    }
    prod
}

/// The coefficients c_k(sigma) of B(sigma, t) = sum_k c_k t^k, built once
/// per sigma and reusable for every t (grids, derivatives, tails).
#[derive(Debug, Clone)]
pub struct InstantonSeries {
    sigma: Complex64,
    l_gap: f64,
    coeffs: Vec<Complex64>,
}

impl InstantonSeries {
    pub fn new(sigma: Complex64, n_inst: usize) -> Result<Self> {
        if n_inst > MAX_INSTANTON_ORDER {
            return Err(Error::Validation(format!(
                "instanton order {} exceeds cap {}",
                n_inst, MAX_INSTANTON_ORDER
            )));
        }
        let l_gap = resonance_gap(sigma);
        if l_gap < MIN_RESONANCE_GAP {
            return Err(Error::TooCloseToResonance {
                l_gap,
                min: MIN_RESONANCE_GAP,
            });
        }
        let by_size: Vec<Vec<(Partition, Partition, f64)>> = (0..=n_inst)
            .map(|n| {
                Ok(partitions::enumerate(n)?
                    .into_iter()
                    .map(|p| {
                        let conj = p.transpose();
                        let w = p.dim_ratio();
                        (p, conj, w)
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let mut coeffs = Vec::with_capacity(n_inst + 1);
        for k in 0..=n_inst {
            let mut acc = KahanSum::default();
            for a in 0..=k {
                for (lam, lam_conj, wl) in &by_size[a] {
                    for (mu, mu_conj, wm) in &by_size[k - a] {
                        let w = wl * wm;
                        let b = b_factor_conj(lam, lam_conj, mu, mu_conj, sigma);
                        acc.add(w * w / (b * b));
                    }
                }
            }
            coeffs.push(acc.value());
        }
        Ok(InstantonSeries {
            sigma,
            l_gap,
            coeffs,
        })
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    /// The convergence margin L = min_n |2 sigma - n|^2.
    pub fn l_gap(&self) -> f64 {
        self.l_gap
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of t^k.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k]
    }

    /// Partial sum at t plus the analytic tail bound
    /// sum_{k > n} (2|t|/L)^k / k! for what was dropped.
    pub fn eval(&self, t: Complex64) -> SeriesValue {
        let mut acc = KahanSum::default();
        let mut p = Complex64::new(1.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate() {
            acc.add(c * p);
            if k + 1 < self.coeffs.len() {
                p *= t;
            }
        }
        SeriesValue::new(acc.value(), self.tail_bound(t.norm()))
    }

    /// Bound on the dropped tail, from |c_k| <= 2^k / (k! L^k).
    pub fn tail_bound(&self, t_abs: f64) -> f64 {
        dropped_exp_tail(2.0 * t_abs / self.l_gap, self.order())
    }
}

/// sum_{k > n} x^k / k!, the exponential tail. Saturates at infinity if x
/// is so large the bound is useless.
pub(crate) fn dropped_exp_tail(x: f64, n: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    // term_{n+1} = x^(n+1)/(n+1)! computed in log space to dodge overflow.
    let mut ln_term = (n as f64 + 1.0) * x.ln();
    for k in 1..=(n + 1) {
        ln_term -= (k as f64).ln();
    }
    if ln_term > 700.0 {
        return f64::INFINITY;
    }
    let mut term = ln_term.exp();
    let mut sum = term;
    let mut k = n + 2;
    while k < n + 600 {
        term *= x / k as f64;
        sum += term;
        if term < 1e-300 || term < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    sum
}

/// B(sigma, t) truncated at total degree n_inst.
pub fn b_series(p: &BlockParams) -> Result<SeriesValue> {
    Ok(InstantonSeries::new(p.sigma, p.n_inst)?.eval(p.t.value()))
}

/// The normalised block F(sigma, t) = t^(sigma^2) B / (G(1+2s) G(1-2s)).
/// The t-power lives on the caller's declared cover branch.
pub fn f_block(p: &BlockParams) -> Result<SeriesValue> {
    let inst = InstantonSeries::new(p.sigma, p.n_inst)?;
    let b = inst.eval(p.t.value());
    let one = Complex64::new(1.0, 0.0);
    let log_norm = p.sigma * p.sigma * p.t.ln()
        - log_barnes_g(one + 2.0 * p.sigma)?
        - log_barnes_g(one - 2.0 * p.sigma)?;
    let norm = log_norm.exp();
    Ok(SeriesValue::new(
        norm * b.value,
        norm.norm() * b.err_estimate,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn part(parts: &[usize]) -> Partition {
        Partition::new(parts).unwrap()
    }

    /// Generic sigma away from resonances, for randomized sweeps.
    fn random_sigma(rng: &mut StdRng) -> Complex64 {
        loop {
            let s = c(rng.gen_range(0.05..0.45), rng.gen_range(-0.3..0.3));
            if resonance_gap(s) > 0.01 {
                return s;
            }
        }
    }

    #[test]
    fn b_factor_base_cases() {
        let s = c(0.3, 0.1);
        let e = Partition::empty();
        assert_eq!(b_factor(&e, &e, s), c(1.0, 0.0));
        // Single box in lambda: the only cell gives exactly 2 sigma.
        let one = part(&[1]);
        assert_eq!(b_factor(&one, &e, s), 2.0 * s);
        assert_eq!(b_factor(&e, &one, s), -2.0 * s);
        // (2,1) against itself at sigma = 0: (3!/dim)^2 = 9.
        let p21 = part(&[2, 1]);
        assert_eq!(b_factor(&p21, &p21, c(0.0, 0.0)), c(9.0, 0.0));
    }

    #[test]
    fn b_factor_diagonal_is_squared_hook_product() {
        // b_{ll}(0) = (|l|!/dim l)^2 = (product of hooks)^2, exactly.
        for n in 0..=8 {
            for p in partitions::enumerate(n).unwrap() {
                let b = b_factor(&p, &p, c(0.0, 0.0));
                let hooks = p.hook_product_exact() as f64;
                assert_eq!(b.re, hooks * hooks, "shape {}", p);
                assert_eq!(b.im, 0.0);
            }
        }
    }

    #[test]
    fn b_factor_swap_negation_symmetry() {
        // Swapping the pair is the same as flipping the sign of sigma.
        let mut rng = StdRng::seed_from_u64(5);
        let shapes: Vec<Partition> = (0..=4)
            .flat_map(|n| partitions::enumerate(n).unwrap())
            .collect();
        for _ in 0..5 {
            let s = random_sigma(&mut rng);
            for a in &shapes {
                for b in &shapes {
                    let lhs = b_factor(a, b, s);
                    let rhs = b_factor(b, a, -s);
                    assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
                }
            }
        }
    }

    #[test]
    fn low_coefficients_match_closed_forms() {
        // c1 = 1/(2 s^2), c2 = (8 s^2 + 1) / (4 s^2 (4 s^2 - 1)^2),
        // c3 = (8 s^4 - 5 s^2 + 3) / (24 s^2 (s^2-1)^2 (4 s^2-1)^2).
        let mut rng = StdRng::seed_from_u64(41);
        let one = c(1.0, 0.0);
        for _ in 0..10 {
            let s = random_sigma(&mut rng);
            let s2 = s * s;
            let inst = InstantonSeries::new(s, 3).unwrap();
            assert_eq!(inst.coeff(0), one);
            let c1 = 1.0 / (2.0 * s2);
            let c2 = (8.0 * s2 + 1.0) / (4.0 * s2 * (4.0 * s2 - one).powu(2));
            let c3 = (8.0 * s2 * s2 - 5.0 * s2 + 3.0 * one)
                / (24.0 * s2 * (s2 - one).powu(2) * (4.0 * s2 - one).powu(2));
            assert!(
                (inst.coeff(1) - c1).norm() <= 1e-12 * c1.norm(),
                "s = {}",
                s
            );
            assert!(
                (inst.coeff(2) - c2).norm() <= 1e-12 * c2.norm(),
                "s = {}",
                s
            );
            assert!(
                (inst.coeff(3) - c3).norm() <= 1e-12 * c3.norm(),
                "s = {}",
                s
            );
        }
    }

    #[test]
    fn series_is_even_in_sigma() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..5 {
            let s = random_sigma(&mut rng);
            let a = InstantonSeries::new(s, 8).unwrap();
            let b = InstantonSeries::new(-s, 8).unwrap();
            for k in 0..=8 {
                let d = (a.coeff(k) - b.coeff(k)).norm();
                assert!(d <= 1e-13 * (1.0 + a.coeff(k).norm()), "k = {}", k);
            }
        }
    }

    #[test]
    fn unit_value_at_t_zero() {
        let s = c(0.21, -0.13);
        let inst = InstantonSeries::new(s, 6).unwrap();
        let v = inst.eval(c(0.0, 0.0));
        assert_eq!(v.value, c(1.0, 0.0));
        assert_eq!(v.err_estimate, 0.0);
    }

    #[test]
    fn resonances_are_rejected() {
        assert!(matches!(
            InstantonSeries::new(c(0.5, 0.0), 4),
            Err(Error::TooCloseToResonance { .. })
        ));
        assert!(matches!(
            InstantonSeries::new(c(0.5, 4e-4), 4),
            Err(Error::TooCloseToResonance { .. })
        ));
        assert!(InstantonSeries::new(c(0.5, 0.1), 4).is_ok());
        assert!(InstantonSeries::new(c(0.25, 0.0), 4).is_ok());
    }

    #[test]
    fn partial_sums_respect_convergence_bound() {
        // |B(sigma, t)| <= exp(2 |t| / L): holds for every truncation,
        // since each graded term is dominated by the Burnside bound.
        let mut rng = StdRng::seed_from_u64(47);
        for _ in 0..100 {
            // L >= 0.25 guaranteed: keep 2 sigma at least 0.5 from the
            // integers in the imaginary direction.
            let s = c(rng.gen_range(0.175..0.325), rng.gen_range(0.25..0.45));
            let l = resonance_gap(s);
            assert!(l >= 0.25, "sampler broke: L = {}", l);
            let t_abs = rng.gen_range(0.0..5.0);
            let t_arg = rng.gen_range(-3.1..3.1);
            let t = Complex64::from_polar(t_abs, t_arg);
            let n = rng.gen_range(4..=12);
            let b = InstantonSeries::new(s, n).unwrap().eval(t);
            let bound = (2.0 * t_abs / l).exp();
            assert!(
                b.value.norm() <= bound * (1.0 + 1e-12),
                "s = {}, t = {}, |B| = {}, bound = {}",
                s,
                t,
                b.value.norm(),
                bound
            );
        }
    }

    #[test]
    fn truncation_steps_stay_below_reported_tail() {
        let mut rng = StdRng::seed_from_u64(53);
        for _ in 0..20 {
            let s = c(rng.gen_range(0.175..0.325), rng.gen_range(0.25..0.45));
            let t = Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(-3.1..3.1));
            for n in 4..=9 {
                let lo = InstantonSeries::new(s, n).unwrap().eval(t);
                let hi = InstantonSeries::new(s, n + 1).unwrap().eval(t);
                let step = (hi.value - lo.value).norm();
                assert!(
                    step <= lo.err_estimate * (1.0 + 1e-12),
                    "order {} -> {}: step {} vs tail {}",
                    n,
                    n + 1,
                    step,
                    lo.err_estimate
                );
            }
        }
    }

    #[test]
    fn deep_truncations_agree_within_tails() {
        let s = c(0.23, 0.31);
        let t = c(0.45, 0.2);
        let b10 = InstantonSeries::new(s, 10).unwrap().eval(t);
        let b15 = InstantonSeries::new(s, 15).unwrap().eval(t);
        let b20 = InstantonSeries::new(s, 20).unwrap().eval(t);
        assert!((b10.value - b20.value).norm() <= b10.err_estimate);
        assert!((b15.value - b20.value).norm() <= b15.err_estimate);
        assert!(b20.err_estimate < 1e-12 * b20.value.norm());
    }

    #[test]
    fn block_power_law_at_small_t() {
        // ln |F| against ln t has slope sigma^2 as t -> 0+.
        let s = c(0.3, 0.0);
        let f = |t: f64| {
            let p = BlockParams {
                sigma: s,
                t: CoverTime::positive(t).unwrap(),
                n_inst: 6,
            };
            f_block(&p).unwrap().value.norm().ln()
        };
        let (ta, tb) = (1e-9, 1e-8);
        let slope = (f(tb) - f(ta)) / (tb.ln() - ta.ln());
        assert!((slope - 0.09).abs() < 1e-6, "slope = {}", slope);
    }

    #[test]
    fn block_normalisation_at_small_t() {
        // F * G(1+2s) G(1-2s) * t^(-s^2) -> 1 as t -> 0+.
        let s = c(0.17, 0.21);
        let t = CoverTime::positive(1e-12).unwrap();
        let p = BlockParams {
            sigma: s,
            t,
            n_inst: 4,
        };
        let f = f_block(&p).unwrap().value;
        let one = c(1.0, 0.0);
        let norm = (log_barnes_g(one + 2.0 * s).unwrap() + log_barnes_g(one - 2.0 * s).unwrap()
            - s * s * t.ln())
        .exp();
        assert!((f * norm - one).norm() < 1e-11);
    }

    #[test]
    fn cover_time_fixes_the_branch() {
        // Same complex value, different declared sheets: t^a must differ
        // by the monodromy factor e^(2 pi i a).
        let a = c(0.3, -0.2);
        let lo = CoverTime::new(1.7, 0.4).unwrap();
        let hi = CoverTime::new(1.7, 0.4 + 2.0 * std::f64::consts::PI).unwrap();
        assert!((lo.value() - hi.value()).norm() < 1e-15);
        let ratio = hi.pow(a) / lo.pow(a);
        let expect = (2.0 * std::f64::consts::PI * c(0.0, 1.0) * a).exp();
        assert!((ratio - expect).norm() < 1e-13);
        assert!(CoverTime::positive(0.0).is_err());
        assert!(CoverTime::new(-1.0, 0.0).is_err());
    }
}
