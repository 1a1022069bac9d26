//! Piecewise bounding curve for critical (r = 1/2) vorticity-direction
//! coherence.
//!
//! The curve has three pieces, all traced in decreasing energy:
//!
//! * `phi1` on `[e_max, e0]`, the Bernoulli solution `E = ξ^{5/3}` started
//!   at `(e0, E0)`. It climbs until it meets the barrier curve, where the
//!   enstrophy growth bound changes sign.
//! * `phi2` on `[e_min, e_max]`, the same closed form with every coefficient
//!   divided by `C_Ω`, anchored at `(e_max, E_max)`.
//! * `phi3` on `(0, e_min]`, driven by the curl-F forcing term once
//!   `E < E_min`.
//!
//! Energies near `e_min` underflow `f64` already at `G = 2`, so every
//! function here takes and returns natural logarithms.

use crate::curve::{
    continuity_gap, ln_add, log_grid, sample_bounding, sample_fn, BoundingModel, Breakpoints,
    CurveSegment, PiecewiseCurve, Rates, SegmentTag,
};
use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::params::ModelParams;
use crate::solver::{find_root, integrate_adaptive, rk4_path, RkPath, StepControl};
use crate::specfun::{gamma_series_factor, gamma_series_truncated, weighted_exp_integral_ln};

/// Relative tolerance of the series behind `phi1` and `phi2`.
pub const SERIES_TOL: f64 = 1e-12;
/// Relative tolerance of the `phi3` quadrature.
pub const QUAD_TOL: f64 = 1e-10;
/// Root tolerance, relative to the magnitude of the log variable.
pub const ROOT_X_TOL: f64 = 1e-12;
/// Width in `ln e` of the sampled part of `phi3` below `e_min`.
pub const PHI3_SPAN: f64 = 23.0;
/// Lost digits in the `ξ` bracket reported as [`Error::CancellationLoss`].
pub const BRACKET_DIGITS: f64 = 10.0;

/// Coefficients of the linear ODE `ξ' + (b - a/e) ξ = -C` for `ξ = E^{3/5}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl XiCoeffs {
    pub fn divided(self, by: f64) -> XiCoeffs {
        XiCoeffs {
            a: self.a / by,
            b: self.b / by,
            c: self.c / by,
        }
    }

    /// `d(ln E)/de` of the Bernoulli equation these coefficients solve.
    pub fn field(self, e: f64, ln_enstrophy: f64) -> f64 {
        5.0 / 3.0 * (self.a / e - self.b - self.c * (-0.6 * ln_enstrophy).exp())
    }
}

/// Initial point `(e_ref, ξ_ref)` of a `ξ` solution, in logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub ln_e: f64,
    pub ln_xi: f64,
}

/// How the integral `∫ s^{-a} e^{bs} ds` inside `ξ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesMode {
    /// Converged series with cancellation fallback to quadrature.
    Converged,
    /// Plain series difference stopped at the given relative tolerance.
    Tolerance(f64),
    /// Series difference truncated to the given number of terms.
    Truncated(usize),
}

/// Constants of the critical construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCoefficients {
    pub params: ModelParams,
    pub xi: XiCoeffs,
    /// `1 - a`, the series parameter.
    pub alpha_g: f64,
    /// Barrier asymptote `ε(1-ρ)ν² / (4 c₂ λ^{1/2})`.
    pub e_a: f64,
    pub enstrophy_min: f64,
    pub e0: f64,
    pub enstrophy0: f64,
    /// True when `E0` was raised to `E_min`.
    pub anchor_is_min: bool,
    pub c_omega_big: f64,
}

/// `E_min`, above which the `E^{2/5}` summand dominates the constant and
/// forcing summands of the enstrophy bound.
pub fn enstrophy_min(p: &ModelParams) -> f64 {
    let (nu, lambda) = (p.domain.nu, p.domain.lambda);
    let (eps, mu, c2) = (p.coherence.eps, p.coherence.mu, p.coherence.c2);
    let mp = mu + p.forcing.psi_inf;
    let first = eps.powf(1.5) * lambda.sqrt() * nu * nu / (mu * mu) * mp.powf(2.5);
    let second = eps.powf(2.0 / 3.0) * p.forcing.curl_f_norm.powf(10.0 / 9.0)
        / (c2.powf(10.0 / 9.0) * (mu * lambda).powf(8.0 / 9.0) * nu.powf(2.0 / 9.0));
    first.max(second)
}

/// Smallest `‖curl F‖₂` for which `phi3` is constructed.
pub fn curl_f_threshold(p: &ModelParams) -> f64 {
    let (nu, lambda) = (p.domain.nu, p.domain.lambda);
    let (eps, mu, c2) = (p.coherence.eps, p.coherence.mu, p.coherence.c2);
    c2 * eps.powf(0.75) * lambda.powf(1.25) * nu * nu / mu * (mu + p.forcing.psi_inf).powf(2.25)
}

pub fn coefficients(p: &ModelParams) -> CriticalCoefficients {
    let (nu, lambda) = (p.domain.nu, p.domain.lambda);
    let c = &p.coherence;
    let rho = c.rho();
    let a = 3.0 * (1.0 - rho) / 10.0;
    let b = 6.0 * c.c2 * lambda.sqrt() / (5.0 * c.eps * nu * nu);
    let c_big = 36.0 * c.c2 * (c.mu * lambda).powf(0.8) / (5.0 * c.eps.powf(0.6) * nu.powf(0.8));
    let e_min_val = enstrophy_min(p);
    let e0 = p.e0();
    let parabola0 = 4.0 * p.forcing.f_norm * e0.sqrt() / nu;
    CriticalCoefficients {
        params: *p,
        xi: XiCoeffs { a, b, c: c_big },
        alpha_g: 1.0 - a,
        e_a: c.eps * (1.0 - rho) * nu * nu / (4.0 * c.c2 * lambda.sqrt()),
        enstrophy_min: e_min_val,
        e0,
        enstrophy0: parabola0.max(e_min_val),
        anchor_is_min: e_min_val > parabola0,
        c_omega_big: p.domain.big_c_omega(),
    }
}

/// Barrier curve `ε^{2/3} μ^{4/3} λ^{1/2} ν² [6e/(e_a - e)]^{5/3}`.
pub fn barrier(e: f64, p: &ModelParams) -> Result<f64> {
    let e_a = coefficients(p).e_a;
    if !(e > 0.0 && e < e_a) {
        return Err(Error::OutsideDomain(format!(
            "barrier needs 0 < e < e_a = {e_a}, got {e}"
        )));
    }
    Ok(ln_barrier(p, e.ln(), (e_a - e).ln()).exp())
}

/// `ln` of the barrier at `ln e`, given `u = ln(e_a - e)` separately so
/// that points within rounding of `e_a` stay resolved.
pub fn ln_barrier(p: &ModelParams, ln_e: f64, u: f64) -> f64 {
    let (nu, lambda) = (p.domain.nu, p.domain.lambda);
    let (eps, mu) = (p.coherence.eps, p.coherence.mu);
    2.0 / 3.0 * eps.ln()
        + 4.0 / 3.0 * mu.ln()
        + 0.5 * lambda.ln()
        + 2.0 * nu.ln()
        + 5.0 / 3.0 * (6f64.ln() + ln_e - u)
}

/// `ξ(e) = e^a e^{-be} [e_ref^{-a} e^{b e_ref} ξ_ref + C ∫_e^{e_ref} s^{-a} e^{bs} ds]`.
pub fn xi_solution(ln_e: f64, k: XiCoeffs, anchor: Anchor) -> Result<LogScalar> {
    xi_solution_with(ln_e, k, anchor, SeriesMode::Converged)
}

pub fn xi_solution_with(
    ln_e: f64,
    k: XiCoeffs,
    anchor: Anchor,
    mode: SeriesMode,
) -> Result<LogScalar> {
    let e = ln_e.exp();
    let e_ref = anchor.ln_e.exp();
    let head = LogScalar::from_ln(-k.a * anchor.ln_e + k.b * e_ref + anchor.ln_xi);
    let integral = if k.c == 0.0 || ln_e == anchor.ln_e {
        LogScalar::zero()
    } else {
        match mode {
            SeriesMode::Converged => {
                weighted_exp_integral_ln(k.a, k.b, ln_e, anchor.ln_e, SERIES_TOL)?
            }
            SeriesMode::Tolerance(tol) => {
                let alpha = 1.0 - k.a;
                let s = |ln_x: f64| -> Result<LogScalar> {
                    let g = gamma_series_factor(alpha, k.b * ln_x.exp(), tol)?;
                    Ok(LogScalar::from_ln(alpha * ln_x) * g)
                };
                s(anchor.ln_e)? - s(ln_e)?
            }
            SeriesMode::Truncated(n) => {
                let alpha = 1.0 - k.a;
                let s = |ln_x: f64| {
                    LogScalar::from_ln(alpha * ln_x)
                        * gamma_series_truncated(alpha, k.b * ln_x.exp(), n)
                };
                s(anchor.ln_e) - s(ln_e)
            }
        }
    };
    let tail = integral.scale(k.c);
    let bracket = head + tail;
    if !bracket.is_positive() {
        return Err(Error::OutsideDomain(format!(
            "xi bracket is not positive at ln e = {ln_e}"
        )));
    }
    let lost = (head.ln_mag().max(tail.ln_mag()) - bracket.ln_mag()) / std::f64::consts::LN_10;
    if lost > BRACKET_DIGITS {
        return Err(Error::CancellationLoss(format!(
            "xi bracket lost {lost:.1} digits at ln e = {ln_e}"
        )));
    }
    Ok(LogScalar::from_ln(k.a * ln_e - k.b * e) * bracket)
}

/// `(e_max, E_max)` together with `u = ln(e_a - e_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EMax {
    pub ln_e: f64,
    pub u: f64,
    pub ln_enstrophy: f64,
}

impl CriticalCoefficients {
    fn phi1_anchor(&self) -> Anchor {
        Anchor {
            ln_e: self.e0.ln(),
            ln_xi: 0.6 * self.enstrophy0.ln(),
        }
    }

    /// `ln phi1` at `ln e`.
    pub fn ln_phi1(&self, ln_e: f64) -> Result<f64> {
        self.ln_phi1_with(ln_e, SeriesMode::Converged)
    }

    pub fn ln_phi1_with(&self, ln_e: f64, mode: SeriesMode) -> Result<f64> {
        let xi = xi_solution_with(ln_e, self.xi, self.phi1_anchor(), mode)?;
        Ok(5.0 / 3.0 * xi.ln_mag())
    }

    pub fn phi2_coeffs(&self) -> XiCoeffs {
        self.xi.divided(self.c_omega_big)
    }

    /// `ln phi2` at `ln e`, anchored at `(e_max, E_max)`.
    pub fn ln_phi2(&self, ln_e: f64, emax: &EMax) -> Result<f64> {
        let anchor = Anchor {
            ln_e: emax.ln_e,
            ln_xi: 0.6 * emax.ln_enstrophy,
        };
        let xi = xi_solution(ln_e, self.phi2_coeffs(), anchor)?;
        Ok(5.0 / 3.0 * xi.ln_mag())
    }

    /// `(α₃, β₃, γ₃)` of the `phi3` equation for `x = E^{3/2}`.
    pub fn phi3_coeffs(&self) -> (f64, f64, f64) {
        let p = &self.params;
        let (nu, lambda) = (p.domain.nu, p.domain.lambda);
        let co = self.c_omega_big;
        let rho = p.rho();
        (
            1.5 * (1.0 - rho) / (2.0 * co),
            3.0 * p.coherence.c2 * lambda.sqrt() / (co * p.coherence.eps * nu * nu),
            18.0 * p.forcing.curl_f_norm / (nu * co),
        )
    }

    /// `ln phi3` at `ln e ≤ ln e_min`.
    ///
    /// With `s = e/e_min` and `w = (t/e_min)^{1-α₃}` the forcing integral
    /// becomes `e^{α₃} e_min^{1-α₃}/(1-α₃) ∫_{s^{1-α₃}}^1 exp(β₃ e_min (w^{1/(1-α₃)} - s)) dw`,
    /// which is integrated after factoring out its largest exponential.
    pub fn ln_phi3(&self, ln_e: f64, ln_e_min: f64) -> Result<f64> {
        let (al, be, ga) = self.phi3_coeffs();
        let e = ln_e.exp();
        let em = ln_e_min.exp();
        let ls = ln_e - ln_e_min;
        let homogeneous = 1.5 * self.enstrophy_min.ln() + al * ls + be * (em - e);
        if ga == 0.0 || ls == 0.0 {
            return Ok(2.0 / 3.0 * homogeneous);
        }
        if ls > 0.0 {
            return Err(Error::OutsideDomain(format!(
                "phi3 is defined for e <= e_min (ln e = {ln_e}, ln e_min = {ln_e_min})"
            )));
        }
        let k = 1.0 / (1.0 - al);
        let w0 = ((1.0 - al) * ls).exp();
        let scale = be * em;
        let j = integrate_adaptive(
            |w: f64| (scale * (w.powf(k) - 1.0)).exp(),
            w0,
            1.0,
            QUAD_TOL,
        )?;
        if !(j > 0.0) {
            return Err(Error::NonConvergence(format!(
                "phi3 integral {j} at ln e = {ln_e}"
            )));
        }
        let forced = ga.ln() + al * ln_e + (1.0 - al) * ln_e_min - (1.0 - al).ln()
            + scale * (1.0 - ls.exp())
            + j.ln();
        Ok(2.0 / 3.0 * ln_add(homogeneous, forced))
    }

    /// `d(ln E)/de` of the `phi3` equation.
    pub fn phi3_field(&self, e: f64, ln_enstrophy: f64) -> f64 {
        let (al, be, ga) = self.phi3_coeffs();
        2.0 / 3.0 * (al / e - be - ga * (-1.5 * ln_enstrophy).exp())
    }

    fn check_parabola(&self, ln_e: f64, ln_enstrophy: f64) -> bool {
        parabola_holds(&self.params, ln_e, ln_enstrophy)
    }
}

/// `ν E ≥ 4 ‖f‖₂ e^{1/2}` in logs.
pub fn parabola_holds(p: &ModelParams, ln_e: f64, ln_enstrophy: f64) -> bool {
    let f = p.forcing.f_norm;
    if f == 0.0 {
        return true;
    }
    p.domain.nu.ln() + ln_enstrophy >= 4f64.ln() + f.ln() + 0.5 * ln_e
}

/// `ln(4 ‖f‖₂ e^{1/2} / ν)`.
pub fn ln_parabola(p: &ModelParams, ln_e: f64) -> f64 {
    4f64.ln() + p.forcing.f_norm.ln() + 0.5 * ln_e - p.domain.nu.ln()
}

/// Intersection of `phi1` with the barrier.
///
/// Solved in `u = ln(e_a - e)` because `e_max` sits within rounding of
/// `e_a` once `E_max` is large.
pub fn find_e_max(k: &CriticalCoefficients) -> Result<EMax> {
    if !(k.e0 > k.e_a) {
        return Err(Error::RegimeViolation(format!(
            "e0 = {} does not exceed the barrier asymptote e_a = {}",
            k.e0, k.e_a
        )));
    }
    let ln_ea = k.e_a.ln();
    let ln_e_of = |u: f64| ln_ea + (-(u - ln_ea).exp()).ln_1p();
    let f = |u: f64| -> Result<f64> {
        let ln_e = ln_e_of(u);
        Ok(k.ln_phi1(ln_e)? - ln_barrier(&k.params, ln_e, u))
    };
    let u_hi = ln_ea + (-1e-12f64).ln_1p();
    if f(u_hi)? <= 0.0 {
        return Err(Error::NoBracket(
            "phi1 is below the barrier next to e = 0".into(),
        ));
    }
    // the barrier grows like exp(-5u/3) while phi1 is flat near e_a
    let mut width = 200.0;
    let mut u_lo = ln_ea - width;
    let mut tries = 0;
    while f(u_lo)? > 0.0 {
        tries += 1;
        if tries > 40 {
            return Err(Error::NoBracket(
                "phi1 stays above the barrier up to e_a".into(),
            ));
        }
        width *= 2.0;
        u_lo = ln_ea - width;
    }
    let u = find_root(f, u_lo, u_hi, ROOT_X_TOL * u_lo.abs().max(1.0), 1e-12)?;
    let ln_e = ln_e_of(u);
    Ok(EMax {
        ln_e,
        u,
        ln_enstrophy: k.ln_phi1(ln_e)?,
    })
}

/// Energy where `phi2` falls to `E_min`.
pub fn find_e_min(k: &CriticalCoefficients, emax: &EMax) -> Result<f64> {
    let ln_min = k.enstrophy_min.ln();
    let drop = emax.ln_enstrophy - ln_min;
    if !(drop > 0.0) {
        return Err(Error::NoBracket(format!(
            "E_min = {} is not below E_max",
            k.enstrophy_min
        )));
    }
    let g = |v: f64| -> Result<f64> { Ok(k.ln_phi2(v, emax)? - ln_min) };
    let slope = 5.0 / 3.0 * k.phi2_coeffs().a;
    let mut width = 2.0 * drop / slope + 10.0;
    let mut lo = emax.ln_e - width;
    let mut tries = 0;
    while g(lo)? >= 0.0 {
        tries += 1;
        if tries > 30 {
            return Err(Error::NoBracket("phi2 does not reach E_min".into()));
        }
        width *= 2.0;
        lo = emax.ln_e - width;
    }
    find_root(g, lo, emax.ln_e, ROOT_X_TOL * lo.abs().max(1.0), 1e-12)
}

/// Fully discovered critical curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCurve {
    pub coeffs: CriticalCoefficients,
    pub emax: EMax,
    pub ln_e_min: f64,
}

impl CriticalCurve {
    /// Breakpoint discovery: `e_max`, then `e_min`, then the curl-F check.
    pub fn new(p: &ModelParams) -> Result<CriticalCurve> {
        let k = coefficients(p);
        if !(k.e0 > 0.0) {
            return Err(Error::RegimeViolation("e0 = 0 (no forcing)".into()));
        }
        let emax = find_e_max(&k).map_err(|e| e.in_segment(SegmentTag::Phi1))?;
        let ln_e_min = find_e_min(&k, &emax).map_err(|e| e.in_segment(SegmentTag::Phi2))?;
        let threshold = curl_f_threshold(p);
        if p.forcing.curl_f_norm < threshold {
            return Err(Error::AssumptionViolated(format!(
                "|curl F| = {} is below {threshold}",
                p.forcing.curl_f_norm
            ))
            .in_segment(SegmentTag::Phi3));
        }
        Ok(CriticalCurve {
            coeffs: k,
            emax,
            ln_e_min,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.coeffs.params
    }

    pub fn ln_e0(&self) -> f64 {
        self.coeffs.e0.ln()
    }

    pub fn breakpoints(&self) -> Breakpoints {
        Breakpoints {
            ln_e0: self.ln_e0(),
            ln_enstrophy0: self.coeffs.enstrophy0.ln(),
            ln_e_max: self.emax.ln_e,
            ln_enstrophy_max: self.emax.ln_enstrophy,
            ln_e_min: Some(self.ln_e_min),
            ln_enstrophy_min: Some(self.coeffs.enstrophy_min.ln()),
        }
    }

    /// RK4 solution of the `phi1` equation from `(e0, E0)` down to `e_max`.
    pub fn rk4_phi1(&self) -> Result<RkPath<f64>> {
        let k = self.coeffs.xi;
        rk4_path(
            move |e: f64, y: f64| k.field(e, y),
            self.coeffs.e0,
            self.coeffs.enstrophy0.ln(),
            self.emax.ln_e.exp(),
            StepControl::default(),
        )
    }

    /// Largest `|ln phi1 - ln E_RK|` over the RK4 nodes.
    pub fn phi1_vs_rk4(&self, mode: SeriesMode) -> Result<f64> {
        let path = self.rk4_phi1()?;
        let mut worst = 0.0f64;
        for (&e, &y) in path.e.iter().zip(&path.ln_enstrophy) {
            let closed = self.coeffs.ln_phi1_with(e.ln(), mode)?;
            worst = worst.max((closed - y).abs());
        }
        Ok(worst)
    }
}

impl BoundingModel for CriticalCurve {
    fn name(&self) -> &'static str {
        "critical"
    }

    fn bounding_segments(&self) -> Vec<(SegmentTag, f64, f64)> {
        vec![
            (SegmentTag::Phi1, self.emax.ln_e, self.ln_e0()),
            (SegmentTag::Phi2, self.ln_e_min, self.emax.ln_e),
            (SegmentTag::Phi3, self.ln_e_min - PHI3_SPAN, self.ln_e_min),
        ]
    }

    fn ln_enstrophy(&self, tag: SegmentTag, ln_e: f64) -> Result<f64> {
        match tag {
            SegmentTag::Phi1 => self.coeffs.ln_phi1(ln_e),
            SegmentTag::Phi2 => self.coeffs.ln_phi2(ln_e, &self.emax),
            SegmentTag::Phi3 => self.coeffs.ln_phi3(ln_e, self.ln_e_min),
            other => Err(Error::InvalidArgument(format!(
                "{other} is not a bounding segment"
            ))),
        }
    }

    /// Rates multiplied by `e/E`: `-ν/2` (or `-C_Ω ν/2`) for the energy,
    /// and the summands of the enstrophy bound.
    fn extremal_rates(&self, tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> Rates {
        let p = self.params();
        let (nu, lambda) = (p.domain.nu, p.domain.lambda);
        let c = &p.coherence;
        let e = ln_e.exp();
        let growth = c.c2 * lambda.sqrt() * e / (c.eps * nu);
        let damping = -nu * (1.0 - c.rho()) / 4.0;
        let d_ln_e = match tag {
            SegmentTag::Phi1 => -nu / 2.0,
            _ => -self.coeffs.c_omega_big * nu / 2.0,
        };
        let third = match tag {
            SegmentTag::Phi3 => 6.0 * p.forcing.curl_f_norm * (ln_e - 1.5 * ln_enstrophy).exp(),
            _ => {
                6.0 * c.c2 * (c.mu * lambda).powf(0.8) * nu.powf(0.2) / c.eps.powf(0.6)
                    * (ln_e - 0.6 * ln_enstrophy).exp()
            }
        };
        Rates {
            d_ln_e,
            enstrophy_terms: vec![growth, damping, third],
        }
    }

    fn conditions_hold(&self, tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> bool {
        let k = &self.coeffs;
        let e = ln_e.exp();
        // the enstrophy bound is non-positive on and above the barrier
        let above_barrier =
            e < k.e_a && ln_enstrophy >= ln_barrier(&k.params, ln_e, (k.e_a - e).ln());
        let ln_min = k.enstrophy_min.ln();
        k.check_parabola(ln_e, ln_enstrophy)
            && match tag {
                SegmentTag::Phi1 => !above_barrier && ln_enstrophy >= ln_min,
                SegmentTag::Phi2 => above_barrier && ln_enstrophy >= ln_min,
                _ => above_barrier && ln_enstrophy <= ln_min,
            }
    }
}

/// Assembles the sampled critical curve with `n` points per segment.
pub fn assemble_critical(p: &ModelParams, n: usize) -> Result<PiecewiseCurve> {
    let curve = CriticalCurve::new(p)?;
    let k = &curve.coeffs;
    let mut segments = sample_bounding(&curve, n)?;
    let mut flags = Vec::new();
    if k.anchor_is_min {
        flags.push("anchor: E0 raised to E_min".to_string());
    } else {
        flags.push("anchor: E0 = 4 |f| e0^(1/2) / nu".to_string());
    }
    let gap = continuity_gap(&curve)?;
    if gap > 1e-8 {
        flags.push(format!(
            "continuity: ln E jumps by {gap:.3e} at a breakpoint"
        ));
    }
    for seg in &segments {
        let bad = seg
            .points()
            .filter(|&(x, y)| !parabola_holds(p, x, y))
            .count();
        if bad > 0 {
            flags.push(format!(
                "parabola condition fails at {bad} samples of {}",
                seg.tag
            ));
        }
    }
    let lam = p.domain.lambda_lower().ln();
    let below = segments
        .iter()
        .flat_map(|s| s.points())
        .filter(|&(x, y)| y < lam + x)
        .count();
    if below > 0 {
        flags.push(format!("curve below the lower boundary at {below} samples"));
    }
    let lo = curve.ln_e_min - PHI3_SPAN;
    let hi = curve.ln_e0();
    segments.extend(boundary_segments(p, lo, hi, n));
    let ln_ea = k.e_a.ln();
    segments.push(sample_fn(
        SegmentTag::Barrier,
        ln_ea - 12.0,
        ln_ea + (-1e-6f64).ln_1p(),
        n,
        |x| Ok(ln_barrier(p, x, (k.e_a - x.exp()).ln())),
    )?);
    Ok(PiecewiseCurve {
        model: "critical",
        params_echo: p.to_raw(),
        breakpoints: curve.breakpoints(),
        segments: order_segments(segments),
        flags,
    })
}

/// Lower boundary `λ̲ e` and, with nonzero forcing, the parabola
/// `4 ‖f‖₂ e^{1/2} / ν` over `[lo, hi]` in `ln e`.
pub fn boundary_segments(p: &ModelParams, lo: f64, hi: f64, n: usize) -> Vec<CurveSegment> {
    let lam = p.domain.lambda_lower().ln();
    let grid = log_grid(lo, hi, n);
    let mut out = vec![CurveSegment {
        tag: SegmentTag::LowerBoundary,
        ln_enstrophy: grid.iter().map(|x| lam + x).collect(),
        ln_e: grid.clone(),
    }];
    if p.forcing.f_norm > 0.0 {
        out.push(CurveSegment {
            tag: SegmentTag::Parabola,
            ln_enstrophy: grid.iter().map(|&x| ln_parabola(p, x)).collect(),
            ln_e: grid,
        });
    }
    out
}

/// Canonical export order: bounding pieces by tag, then the auxiliary curves.
pub fn order_segments(mut segs: Vec<CurveSegment>) -> Vec<CurveSegment> {
    segs.sort_by_key(|s| s.tag);
    segs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reference_params;

    #[test]
    fn reference_coefficients() {
        let k = coefficients(&reference_params());
        assert!((k.xi.a - 0.03).abs() < 1e-15);
        assert!((k.xi.b - 12.0).abs() < 1e-12);
        assert!((k.xi.c - 37.822).abs() < 1e-3);
        assert!((k.e_a - 0.0025).abs() < 1e-15);
        assert!((k.enstrophy_min - 2.0448).abs() < 1e-4);
        assert_eq!(k.enstrophy0, 16.0);
        assert!(!k.anchor_is_min);
    }

    #[test]
    fn barrier_values() {
        let p = reference_params();
        let v = barrier(0.00125, &p).unwrap();
        let expected = 0.2f64.powf(2.0 / 3.0) * 6f64.powf(5.0 / 3.0);
        assert!((v / expected - 1.0).abs() < 1e-13);
        assert!(barrier(1e-300, &p).unwrap() < 1e-200);
        assert!(matches!(barrier(0.0025, &p), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn xi_anchor_and_linear_case() {
        let k = XiCoeffs {
            a: 0.03,
            b: 12.0,
            c: 0.0,
        };
        let anchor = Anchor {
            ln_e: 4f64.ln(),
            ln_xi: 0.6 * 16f64.ln(),
        };
        let at_ref = xi_solution(anchor.ln_e, k, anchor).unwrap();
        assert!((at_ref.ln_mag() - anchor.ln_xi).abs() < 1e-13);
        let v = xi_solution(0.0, k, anchor).unwrap().ln_mag();
        let exact = anchor.ln_xi + 0.03 * (1.0f64 / 4.0).ln() + 12.0 * 3.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn tiny_forcing_is_a_regime_violation() {
        let p = reference_params().with_grashof(0.01);
        let err = CriticalCurve::new(&p).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn zero_forcing_rejected() {
        let p = reference_params().with_grashof(0.0);
        assert!(matches!(
            CriticalCurve::new(&p),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn weak_curl_forcing_is_reported() {
        let mut p = reference_params();
        p.forcing.curl_f_norm = 0.1;
        let err = CriticalCurve::new(&p).unwrap_err();
        match err {
            Error::Segment { tag, source } => {
                assert_eq!(tag, SegmentTag::Phi3);
                assert!(matches!(*source, Error::AssumptionViolated(_)));
            }
            other => panic!("{other:?}"),
        }
    }
}
