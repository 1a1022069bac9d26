//! Bounding curve for sub-critical (1/2 < r ≤ 1) vorticity-direction
//! coherence.
//!
//! Every piece solves `dE/de = (a/e) E - C E^{1-σ}` for some `(a, C, σ)`,
//! which is linear in `w = E^σ`:
//!
//! ```text
//! w(e) = s^{aσ} w_r + σ C e_r / (1 - aσ) · (s^{aσ} - s),   s = e / e_r.
//! ```
//!
//! `phi1` starts at `(e0, E0)` and climbs to `(ē, Ē)` where `α E^σ = C e`.
//! `phi2` divides `a` and `C` by `C_Ω`. `phi3` takes over below the
//! threshold `E̲`, with the forcing term and `σ = 3/2`.

use crate::critical::{boundary_segments, ln_parabola, order_segments, parabola_holds};
use crate::curve::{
    continuity_gap, sample_bounding, BoundingModel, Breakpoints, PiecewiseCurve, Rates,
    RegionLabel, SegmentTag,
};
use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::params::ModelParams;
use crate::solver::find_root;

/// Width in `ln e` of the sampled part of `phi3` below `e_under`.
pub const PHI3_SPAN: f64 = 23.0;

/// Coefficients of one generic piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoeffs {
    pub sigma: f64,
    pub a: f64,
    pub c: f64,
}

/// `ln E` at `ln e` on the generic solution through `(e_r, E_r)`.
pub fn ln_power_solution(ln_e: f64, k: PowerCoeffs, ln_e_ref: f64, ln_big_ref: f64) -> Result<f64> {
    let PowerCoeffs { sigma, a, c } = k;
    let ls = ln_e - ln_e_ref;
    let q = a * sigma;
    let head = LogScalar::from_ln(q * ls + sigma * ln_big_ref);
    // s^{q} - s = s^{q} (1 - s^{1-q})
    let diff = -((1.0 - q) * ls).exp_m1();
    let tail = if c == 0.0 || diff == 0.0 {
        LogScalar::zero()
    } else {
        LogScalar::from_parts(
            if diff > 0.0 { 1 } else { -1 },
            (sigma * c / (1.0 - q)).ln() + ln_e_ref + q * ls + diff.abs().ln(),
        )
    };
    let w = head + tail;
    if !w.is_positive() {
        return Err(Error::OutsideDomain(format!(
            "bracket of the power solution is not positive at ln e = {ln_e}"
        )));
    }
    Ok(w.ln_mag() / sigma)
}

/// `σ = (2r - 1)/(1 + 2r)`.
pub fn sigma(r: f64) -> f64 {
    (2.0 * r - 1.0) / (1.0 + 2.0 * r)
}

/// `K_r = (λ^{2r} / (εν)^{3-2r})^{1/(1+2r)}`.
pub fn k_r(p: &ModelParams) -> f64 {
    let r = p.coherence.r;
    (p.domain.lambda.powf(2.0 * r) / (p.coherence.eps * p.domain.nu).powf(3.0 - 2.0 * r))
        .powf(1.0 / (1.0 + 2.0 * r))
}

/// Growth constant `C = 12 c K_r / ν`, or the `C_sub` override.
pub fn growth_constant(p: &ModelParams) -> f64 {
    p.c_sub
        .unwrap_or(12.0 * p.coherence.c_gen * k_r(p) / p.domain.nu)
}

/// Threshold `E̲`: the `E^{2/(1+2r)}` summand dominates the constant, the
/// `E^{2/5}` and the forcing summands above it. Returns the two
/// non-forcing thresholds and the forcing one.
fn thresholds(p: &ModelParams) -> (f64, f64, f64) {
    let (nu, lambda) = (p.domain.nu, p.domain.lambda);
    let c = &p.coherence;
    let k = k_r(p);
    let pw = 2.0 / (1.0 + 2.0 * c.r);
    let constant = (nu * lambda * (c.mu + p.forcing.psi_inf) / k).powf(1.0 / pw);
    let fifth =
        (nu.powf(0.2) * c.eps.powf(-0.6) * (c.mu * lambda).powf(0.8) / k).powf(1.0 / (pw - 0.4));
    let forcing = (p.forcing.curl_f_norm / (c.c2 * k)).powf(1.0 / (pw + 0.5));
    (constant, fifth, forcing)
}

pub fn enstrophy_under(p: &ModelParams) -> f64 {
    let (a, b, c) = thresholds(p);
    a.max(b).max(c)
}

/// Smallest `‖curl F‖₂` for which the forcing summand sets the threshold.
pub fn curl_f_threshold(p: &ModelParams) -> f64 {
    let (a, b, _) = thresholds(p);
    let pw = 2.0 / (1.0 + 2.0 * p.coherence.r);
    p.coherence.c2 * k_r(p) * a.max(b).powf(pw + 0.5)
}

/// Discovered sub-critical curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcriticalCurve {
    pub params: ModelParams,
    pub sigma: f64,
    pub alpha: f64,
    pub c_big: f64,
    pub c_omega_big: f64,
    pub enstrophy_under: f64,
    pub ln_e0: f64,
    pub ln_enstrophy0: f64,
    pub ln_e_bar: f64,
    pub ln_enstrophy_bar: f64,
    pub ln_e_under: f64,
    /// True when `E0` was raised to `E̲`.
    pub anchor_is_under: bool,
}

impl SubcriticalCurve {
    pub fn new(p: &ModelParams) -> Result<SubcriticalCurve> {
        let r = p.coherence.r;
        if !(r > 0.5 && r <= 1.0) {
            return Err(Error::InvalidRegime(format!(
                "sub-critical curve needs 1/2 < r <= 1, got r = {r}"
            )));
        }
        let e0 = p.e0();
        if !(e0 > 0.0) {
            return Err(Error::RegimeViolation("e0 = 0 (no forcing)".into()));
        }
        let under = enstrophy_under(p);
        let nominal = 4.0 * p.domain.nu.powi(2) * p.domain.lambda.sqrt() * p.grashof().powi(2);
        let mut curve = SubcriticalCurve {
            params: *p,
            sigma: sigma(r),
            alpha: (1.0 - p.rho()) / 2.0,
            c_big: growth_constant(p),
            c_omega_big: p.domain.big_c_omega(),
            enstrophy_under: under,
            ln_e0: e0.ln(),
            ln_enstrophy0: nominal.max(under).ln(),
            ln_e_bar: 0.0,
            ln_enstrophy_bar: 0.0,
            ln_e_under: 0.0,
            anchor_is_under: under > nominal,
        };
        let (le, lb) = curve
            .find_e_bar()
            .map_err(|e| e.in_segment(SegmentTag::Phi1))?;
        curve.ln_e_bar = le;
        curve.ln_enstrophy_bar = lb;
        curve.ln_e_under = curve
            .find_e_under()
            .map_err(|e| e.in_segment(SegmentTag::Phi2))?;
        let threshold = curl_f_threshold(p);
        if p.forcing.curl_f_norm < threshold {
            return Err(Error::AssumptionViolated(format!(
                "|curl F| = {} is below {threshold}",
                p.forcing.curl_f_norm
            ))
            .in_segment(SegmentTag::Phi3));
        }
        Ok(curve)
    }

    pub fn phi1_coeffs(&self) -> PowerCoeffs {
        PowerCoeffs {
            sigma: self.sigma,
            a: self.alpha,
            c: self.c_big,
        }
    }

    pub fn phi2_coeffs(&self) -> PowerCoeffs {
        PowerCoeffs {
            sigma: self.sigma,
            a: self.alpha / self.c_omega_big,
            c: self.c_big / self.c_omega_big,
        }
    }

    pub fn phi3_coeffs(&self) -> PowerCoeffs {
        let p = &self.params;
        PowerCoeffs {
            sigma: 1.5,
            a: (1.0 - p.rho()) / (2.0 * self.c_omega_big),
            c: 12.0 * p.forcing.curl_f_norm / (p.domain.nu * self.c_omega_big),
        }
    }

    pub fn ln_phi1(&self, ln_e: f64) -> Result<f64> {
        ln_power_solution(ln_e, self.phi1_coeffs(), self.ln_e0, self.ln_enstrophy0)
    }

    pub fn ln_phi2(&self, ln_e: f64) -> Result<f64> {
        ln_power_solution(
            ln_e,
            self.phi2_coeffs(),
            self.ln_e_bar,
            self.ln_enstrophy_bar,
        )
    }

    pub fn ln_phi3(&self, ln_e: f64) -> Result<f64> {
        ln_power_solution(
            ln_e,
            self.phi3_coeffs(),
            self.ln_e_under,
            self.enstrophy_under.ln(),
        )
    }

    /// `ln(α E^σ) - ln(C e)` on `phi1`; zero at `ē`.
    fn bar_residual(&self, ln_e: f64) -> Result<f64> {
        Ok(self.alpha.ln() + self.sigma * self.ln_phi1(ln_e)? - self.c_big.ln() - ln_e)
    }

    fn find_e_bar(&self) -> Result<(f64, f64)> {
        if !(self.c_big > 0.0) {
            return Err(Error::NoBracket("C = 0: the enstrophy never turns".into()));
        }
        let hi = self.ln_e0;
        if self.bar_residual(hi)? >= 0.0 {
            return Err(Error::NoBracket(
                "enstrophy already decreasing at (e0, E0)".into(),
            ));
        }
        let mut step = 1.0;
        while self.bar_residual(hi - step)? <= 0.0 {
            step *= 2.0;
            if step > 1e7 {
                return Err(Error::NoBracket(
                    "phi1 never meets alpha E^sigma = C e".into(),
                ));
            }
        }
        let lo = hi - step;
        let x = find_root(
            |v| self.bar_residual(v),
            lo,
            hi,
            1e-13 * lo.abs().max(1.0),
            0.0,
        )?;
        Ok((x, self.ln_phi1(x)?))
    }

    fn find_e_under(&self) -> Result<f64> {
        let target = self.enstrophy_under.ln();
        let drop = self.ln_enstrophy_bar - target;
        if drop <= 0.0 {
            return Err(Error::RegimeViolation(format!(
                "E_bar = exp({}) does not exceed the threshold {}",
                self.ln_enstrophy_bar, self.enstrophy_under
            )));
        }
        let g = |v: f64| -> Result<f64> { Ok(self.ln_phi2(v)? - target) };
        let hi = self.ln_e_bar;
        let mut span = 2.0 * drop * self.c_omega_big / self.alpha + 10.0;
        while g(hi - span)? >= 0.0 {
            span *= 2.0;
            if !span.is_finite() || span > 1e12 {
                return Err(Error::NoBracket("phi2 never reaches the threshold".into()));
            }
        }
        let lo = hi - span;
        find_root(g, lo, hi, 1e-13 * lo.abs().max(1.0), 0.0)
    }

    pub fn breakpoints(&self) -> Breakpoints {
        Breakpoints {
            ln_e0: self.ln_e0,
            ln_enstrophy0: self.ln_enstrophy0,
            ln_e_max: self.ln_e_bar,
            ln_enstrophy_max: self.ln_enstrophy_bar,
            ln_e_min: Some(self.ln_e_under),
            ln_enstrophy_min: Some(self.enstrophy_under.ln()),
        }
    }

    /// `ln E` on the curve at `ln e ≤ ln e0`.
    pub fn ln_curve(&self, ln_e: f64) -> Result<f64> {
        if ln_e >= self.ln_e_bar {
            self.ln_phi1(ln_e)
        } else if ln_e >= self.ln_e_under {
            self.ln_phi2(ln_e)
        } else {
            self.ln_phi3(ln_e)
        }
    }

    /// Region of `(e, E)`. Points the bounding region excludes are
    /// [`RegionLabel::Exterior`].
    pub fn classify(&self, e: f64, big: f64) -> Result<RegionLabel> {
        if !(e > 0.0 && big > 0.0) || !e.is_finite() || !big.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "classification needs finite e > 0 and E > 0, got ({e}, {big})"
            )));
        }
        let p = &self.params;
        let (x, y) = (e.ln(), big.ln());
        if x > self.ln_e0 || y > self.ln_curve(x)? || y < p.domain.lambda_lower().ln() + x {
            return Ok(RegionLabel::Exterior);
        }
        if !parabola_holds(p, x, y) {
            return Ok(RegionLabel::I);
        }
        if self.alpha.ln() + self.sigma * y > self.c_big.ln() + x {
            return Ok(RegionLabel::III);
        }
        Ok(RegionLabel::II)
    }
}

impl BoundingModel for SubcriticalCurve {
    fn name(&self) -> &'static str {
        "subcritical"
    }

    fn bounding_segments(&self) -> Vec<(SegmentTag, f64, f64)> {
        vec![
            (SegmentTag::Phi1, self.ln_e_bar, self.ln_e0),
            (SegmentTag::Phi2, self.ln_e_under, self.ln_e_bar),
            (
                SegmentTag::Phi3,
                self.ln_e_under - PHI3_SPAN,
                self.ln_e_under,
            ),
        ]
    }

    fn ln_enstrophy(&self, tag: SegmentTag, ln_e: f64) -> Result<f64> {
        match tag {
            SegmentTag::Phi1 => self.ln_phi1(ln_e),
            SegmentTag::Phi2 => self.ln_phi2(ln_e),
            SegmentTag::Phi3 => self.ln_phi3(ln_e),
            other => Err(Error::InvalidArgument(format!(
                "{other} is not a bounding segment"
            ))),
        }
    }

    /// Rates multiplied by `e/E`.
    fn extremal_rates(&self, tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> Rates {
        let p = &self.params;
        let nu = p.domain.nu;
        let damping = -nu * (1.0 - p.rho()) / 4.0;
        let (d_ln_e, growth) = match tag {
            SegmentTag::Phi1 => (
                -nu / 2.0,
                nu * self.c_big / 2.0 * (ln_e - self.sigma * ln_enstrophy).exp(),
            ),
            SegmentTag::Phi2 => (
                -self.c_omega_big * nu / 2.0,
                nu * self.c_big / 2.0 * (ln_e - self.sigma * ln_enstrophy).exp(),
            ),
            _ => (
                -self.c_omega_big * nu / 2.0,
                6.0 * p.forcing.curl_f_norm * (ln_e - 1.5 * ln_enstrophy).exp(),
            ),
        };
        Rates {
            d_ln_e,
            enstrophy_terms: vec![damping, growth],
        }
    }

    fn conditions_hold(&self, tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> bool {
        let above = ln_enstrophy >= self.enstrophy_under.ln();
        parabola_holds(&self.params, ln_e, ln_enstrophy)
            && match tag {
                SegmentTag::Phi3 => !above,
                _ => above,
            }
    }
}

/// Assembles the sampled sub-critical curve with `n` points per segment.
pub fn assemble_subcritical(p: &ModelParams, n: usize) -> Result<PiecewiseCurve> {
    let curve = SubcriticalCurve::new(p)?;
    let mut segments = sample_bounding(&curve, n)?;
    let mut flags = vec![format!("sigma = {}", curve.sigma)];
    if curve.anchor_is_under {
        flags.push("anchor: E0 raised to the threshold".to_string());
    }
    if p.c_sub.is_some() {
        flags.push(format!("C = {} supplied by C_sub", curve.c_big));
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
    segments.extend(boundary_segments(
        p,
        curve.ln_e_under - PHI3_SPAN,
        curve.ln_e0,
        n,
    ));
    Ok(PiecewiseCurve {
        model: "subcritical",
        params_echo: p.to_raw(),
        breakpoints: curve.breakpoints(),
        segments: order_segments(segments),
        flags,
    })
}

/// Gap in `ln E` between the curve and the parabola, minimised over `phi2`
/// and `phi3` samples; negative when the parabola condition fails.
pub fn parabola_clearance(curve: &SubcriticalCurve, n: usize) -> Result<f64> {
    let p = &curve.params;
    let mut worst = f64::INFINITY;
    for seg in sample_bounding(curve, n)? {
        if seg.tag == SegmentTag::Phi1 {
            continue;
        }
        for (x, y) in seg.points() {
            worst = worst.min(y - ln_parabola(p, x));
        }
    }
    Ok(worst)
}
