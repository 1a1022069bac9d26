//! Incomplete-gamma type series and the weighted exponential integral.
//!
//! | function | value |
//! |----------|-------|
//! | [`gamma_series_factor`] | `g(α, x) = Σ xⁿ / (n! (α + n))` |
//! | [`gamma_series_truncated`] | first `N` terms of the same sum |
//! | [`weighted_exp_integral`] | `∫ s^{-a} e^{b s} ds` over `[e_lo, e_hi]` |
//!
//! `g` equals `∫₀¹ t^{α-1} e^{x t} dt`, so `∫₀^e s^{-a} e^{b s} ds =
//! e^{1-a} g(1-a, b e)`. All results are [`LogScalar`]s because `g` grows
//! like `eˣ / x`.

use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::scalar::Scalar;
use crate::solver::integrate_adaptive;

/// Default relative tolerance of the series.
pub const SERIES_REL_TOL: f64 = 1e-12;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 100_000_000;

/// Lost significant digits in `S(e_hi) - S(e_lo)` above which the weighted
/// integral switches to quadrature.
pub const CANCELLATION_DIGITS: f64 = 6.0;

/// Converged `g(α, x)` with relative error at most `rel_tol`.
///
/// Terms follow `pₙ = xⁿ/n!`, `tₙ = pₙ / (α + n)` and are added with Kahan
/// compensation. The running sum is rescaled whenever `pₙ` approaches the
/// overflow threshold, so any `x` the term ceiling allows can be summed.
/// Summation stops past the peak (`n > x`) once `tₙ < sum · rel_tol / 10`.
pub fn gamma_series_factor<T: Scalar>(alpha: T, x: T, rel_tol: T) -> Result<LogScalar<T>> {
    if !(alpha > T::zero()) || !(x >= T::zero()) || !(rel_tol > T::zero() && rel_tol < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "gamma series needs alpha > 0, x >= 0, 0 < rel_tol < 1 (got {alpha}, {x}, {rel_tol})"
        )));
    }
    let ceiling =
        (x.to_f64().unwrap_or(f64::INFINITY) * 10.0 + 200.0).min(MAX_TERMS as f64) as usize;
    if T::count(ceiling) <= x {
        return Err(Error::NonConvergence(format!(
            "gamma series at x = {x} peaks beyond the {MAX_TERMS}-term ceiling"
        )));
    }
    let mut acc = ScaledSum::new(alpha.recip());
    let stop = rel_tol / T::lit(10.0);
    let mut n = 0usize;
    loop {
        n += 1;
        if n > ceiling {
            return Err(Error::NonConvergence(format!(
                "gamma series at alpha = {alpha}, x = {x} needs more than {ceiling} terms"
            )));
        }
        let t = acc.next_term(alpha, x, n);
        if T::count(n) > x && t <= acc.sum * stop {
            break;
        }
    }
    Ok(acc.finish())
}

/// Partial sum of the first `n_terms` terms of `g(α, x)`.
///
/// Deliberately inaccurate once `n_terms` is below the peak index `≈ x`.
pub fn gamma_series_truncated<T: Scalar>(alpha: T, x: T, n_terms: usize) -> LogScalar<T> {
    if n_terms == 0 {
        return LogScalar::zero();
    }
    let mut acc = ScaledSum::new(alpha.recip());
    for n in 1..n_terms {
        acc.next_term(alpha, x, n);
    }
    acc.finish()
}

/// Kahan sum of the series terms, rescaled together with the power term.
struct ScaledSum<T> {
    p: T,
    sum: T,
    comp: T,
    ln_scale: T,
}

impl<T: Scalar> ScaledSum<T> {
    fn new(first: T) -> Self {
        ScaledSum {
            p: T::one(),
            sum: first,
            comp: T::zero(),
            ln_scale: T::zero(),
        }
    }

    fn next_term(&mut self, alpha: T, x: T, n: usize) -> T {
        let nn = T::count(n);
        self.p = self.p * x / nn;
        let t = self.p / (alpha + nn);
        let y = t - self.comp;
        let s = self.sum + y;
        self.comp = (s - self.sum) - y;
        self.sum = s;
        let big = T::max_value().sqrt();
        if self.p > big {
            self.p = self.p / big;
            self.sum = self.sum / big;
            self.comp = self.comp / big;
            self.ln_scale = self.ln_scale + big.ln();
        }
        t
    }

    fn finish(self) -> LogScalar<T> {
        if self.sum <= T::zero() {
            return LogScalar::zero();
        }
        LogScalar::from_ln(self.sum.ln() + self.ln_scale)
    }
}

/// `∫_{e_lo}^{e_hi} s^{-a} e^{b s} ds` for native-range endpoints.
pub fn weighted_exp_integral<T: Scalar>(
    a: T,
    b: T,
    e_lo: T,
    e_hi: T,
    rel_tol: T,
) -> Result<LogScalar<T>> {
    if !(e_lo > T::zero() && e_hi > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "weighted integral needs positive endpoints (got {e_lo}, {e_hi})"
        )));
    }
    weighted_exp_integral_ln(a, b, e_lo.ln(), e_hi.ln(), rel_tol)
}

/// Same integral with the endpoints given as `ln e`, so energies far below
/// the native range (`ln e ≈ -10⁴`) are admissible.
///
/// Evaluated as `S(e_hi) - S(e_lo)` with `S(e) = e^{1-a} g(1-a, b e)`. If
/// the subtraction loses more than [`CANCELLATION_DIGITS`] digits, or more
/// than the series accuracy leaves room for, the integral is recomputed by
/// adaptive quadrature after the change of variable `s = e_hi u`. An
/// inverted interval gives the negated integral.
pub fn weighted_exp_integral_ln<T: Scalar>(
    a: T,
    b: T,
    ln_lo: T,
    ln_hi: T,
    rel_tol: T,
) -> Result<LogScalar<T>> {
    if ln_lo == ln_hi {
        return Ok(LogScalar::zero());
    }
    if ln_lo > ln_hi {
        return weighted_exp_integral_ln(a, b, ln_hi, ln_lo, rel_tol).map(|v| -v);
    }
    if !(a < T::one()) || !(b >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "weighted integral needs a < 1 and b >= 0 (got a = {a}, b = {b})"
        )));
    }
    let series_tol = (rel_tol * T::lit(1e-6)).max(T::epsilon() * T::lit(4.0));
    let alpha = T::one() - a;
    let s = |ln_e: T| -> Result<LogScalar<T>> {
        let g = gamma_series_factor(alpha, b * ln_e.exp(), series_tol)?;
        Ok(LogScalar::from_ln(alpha * ln_e) * g)
    };
    let hi = s(ln_hi)?;
    let lo = s(ln_lo)?;
    let diff = hi - lo;
    let ln10 = T::lit(std::f64::consts::LN_10);
    let lost = if diff.is_positive() {
        (hi.ln_mag() - diff.ln_mag()) / ln10
    } else {
        T::infinity()
    };
    let headroom = (rel_tol / series_tol)
        .log10()
        .min(T::lit(CANCELLATION_DIGITS));
    if lost <= headroom {
        return Ok(diff);
    }

    let e_hi = ln_hi.exp();
    let u_lo = (ln_lo - ln_hi).exp();
    let scale = b * e_hi;
    let integrand = |u: T| u.powf(-a) * (scale * (u - T::one())).exp();
    let j = integrate_adaptive(integrand, u_lo, T::one(), rel_tol)?;
    Ok(LogScalar::from_ln(alpha * ln_hi + scale) * LogScalar::from_value(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_forms() {
        assert!(rel(gamma_series_factor(1.0, 0.0, 1e-12).unwrap().value(), 1.0) < 1e-15);
        let v = gamma_series_factor(1.0, 1.0, 1e-12).unwrap().value();
        assert!(rel(v, std::f64::consts::E - 1.0) < 1e-12);
        let v = gamma_series_factor(2.5, 0.0, 1e-12).unwrap().value();
        assert!(rel(v, 0.4) < 1e-15);
    }

    #[test]
    fn frozen_quadrature_value() {
        // g(0.97, 48) from a 60-digit quadrature of ∫₀¹ t^{-0.03} e^{48 t} dt.
        let v = gamma_series_factor(0.97, 48.0, 1e-12).unwrap().value();
        assert!(rel(v, 14627541107092348520.378) < 1e-12, "{v}");
    }

    #[test]
    fn huge_argument_stays_finite_in_log() {
        let g = gamma_series_factor(0.5, 5000.0, 1e-12).unwrap();
        // leading asymptotics: e^x / x (1 + (1-α)/x + ...)
        let approx = 5000.0 - 5000f64.ln() + (0.5f64 / 5000.0).ln_1p();
        assert!((g.ln_mag() - approx).abs() < 1e-6);
    }

    #[test]
    fn truncation() {
        let full = gamma_series_factor(0.97, 48.0, 1e-12).unwrap();
        let t20 = gamma_series_truncated(0.97, 48.0, 20);
        assert!(full.value() / t20.value() > 10.0);
        let t50 = gamma_series_truncated(1.0, 1.0, 50).value();
        assert!(rel(t50, std::f64::consts::E - 1.0) < 1e-12);
        assert!(rel(gamma_series_truncated(0.3, 0.0, 1).value(), 1.0 / 0.3) < 1e-15);
    }

    #[test]
    fn ceiling_reports_non_convergence() {
        let err = gamma_series_factor(1.0, 1e12, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NonConvergence(_)));
    }

    #[test]
    fn weighted_integral_limits() {
        let v = weighted_exp_integral(1e-12, 1.0, 1.0, 2.0, 1e-12)
            .unwrap()
            .value();
        let exact = 2f64.exp() - 1f64.exp();
        assert!(rel(v, exact) < 1e-10);
        assert!(weighted_exp_integral(0.5, 10.0, 1.0, 1.0, 1e-12)
            .unwrap()
            .is_zero());
        let neg = weighted_exp_integral(0.5, 1.0, 2.0, 1.0, 1e-12).unwrap();
        let pos = weighted_exp_integral(0.5, 1.0, 1.0, 2.0, 1e-12).unwrap();
        assert!(rel(neg.value(), -pos.value()) < 1e-14);
    }

    #[test]
    fn narrow_interval_uses_quadrature_path() {
        let (a, b, lo) = (0.03f64, 12.0f64, 2.0f64);
        let hi = lo * (1.0 + 1e-9);
        let v = weighted_exp_integral(a, b, lo, hi, 1e-10).unwrap().value();
        let mid = 0.5 * (lo + hi);
        let approx = mid.powf(-a) * (b * mid).exp() * (hi - lo);
        assert!(rel(v, approx) < 1e-9);
    }

    #[test]
    fn tiny_energies_in_log_form() {
        let v = weighted_exp_integral_ln(0.006, 2.4, -9000.0, -8999.0, 1e-12).unwrap();
        // b e is negligible, so the integral is (e_hi^{1-a} - e_lo^{1-a}) / (1-a).
        let alpha: f64 = 0.994;
        let expected = -8999.0 * alpha + (-(-alpha).exp_m1()).ln() - alpha.ln();
        assert!((v.ln_mag() - expected).abs() < 1e-10);
    }

    #[test]
    fn single_precision_series() {
        let v = gamma_series_factor(1.0f32, 1.0, 1e-6).unwrap().value();
        assert!((v - 1.718_281_8).abs() < 1e-5);
    }
}
