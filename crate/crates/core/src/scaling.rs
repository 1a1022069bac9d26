//! Bounding curve under the small-`L^{3/2}` scaling-invariant condition.
//!
//! The curve solves `dE/de = (α/e) E - β`, so
//! `E(e) = A e^α - β e/(1 - α)` with `A = E0/e0^α + β e0^{1-α}/(1 - α)`.

use crate::critical::{boundary_segments, order_segments};
use crate::curve::{
    sample_bounding, BoundingModel, Breakpoints, PiecewiseCurve, Rates, SegmentTag,
};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Width in `ln e` of the sampled curve left of `e_max`.
pub const LEFT_SPAN: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    pub eps0: f64,
    pub c_prime: f64,
    /// `s = ε₀ c′ + δ`.
    pub s: f64,
    /// `α = (1 - s)/2`.
    pub alpha: f64,
    /// `β = 8 λ (ψ∞ + ε₀ c′)`.
    pub beta: f64,
    /// Smallest enstrophy at which the curve is a bound.
    pub e_floor: f64,
}

pub fn scaling_params(p: &ModelParams) -> Result<ScalingParams> {
    let (eps0, c_prime) = (p.scaling.eps0, p.scaling.c_prime);
    let s = eps0 * c_prime + p.coherence.delta;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidRegime(format!(
            "eps0 c' + delta = {s} must lie in (0, 1)"
        )));
    }
    let small = p.forcing.psi_inf + eps0 * c_prime;
    let e_floor = if p.forcing.curl_f_norm == 0.0 {
        0.0
    } else {
        (p.forcing.curl_f_norm / (p.domain.nu * p.domain.lambda * small)).powi(2)
    };
    Ok(ScalingParams {
        eps0,
        c_prime,
        s,
        alpha: (1.0 - s) / 2.0,
        beta: 8.0 * p.domain.lambda * small,
        e_floor,
    })
}

fn amplitude(e0: f64, big0: f64, sp: &ScalingParams) -> f64 {
    let a = sp.alpha;
    big0 / e0.powf(a) + sp.beta * e0.powf(1.0 - a) / (1.0 - a)
}

/// `E` on the curve through `(e0, E0)`.
pub fn scaling_curve(e: f64, e0: f64, big0: f64, sp: &ScalingParams) -> f64 {
    let a = sp.alpha;
    amplitude(e0, big0, sp) * e.powf(a) - sp.beta * e / (1.0 - a)
}

/// Stationary point `(e_max, E_max)` of the curve through `(e0, E0)`.
pub fn scaling_emax(e0: f64, big0: f64, sp: &ScalingParams) -> Result<(f64, f64)> {
    if !(sp.beta > 0.0) {
        return Err(Error::RegimeViolation(
            "beta = 0: the curve grows without a maximum".into(),
        ));
    }
    let a = sp.alpha;
    let e_max = (a * (1.0 - a) * amplitude(e0, big0, sp) / sp.beta).powf(1.0 / (1.0 - a));
    if e_max >= e0 {
        return Err(Error::RegimeViolation(format!(
            "e_max = {e_max} is not below e0 = {e0}"
        )));
    }
    Ok((e_max, scaling_curve(e_max, e0, big0, sp)))
}

/// Exponents of `E_max` in `G` under Hölder coherence and under the
/// scaling-invariant condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentComparison {
    /// `(4r + 2)/(2r - 1)`.
    pub holder: f64,
    /// `4 - 2α = 3 + s`.
    pub scaling: f64,
    /// `r` at which the two exponents coincide.
    pub crossover_r: f64,
    /// True when coherence admits the larger `E_max`.
    pub coherence_larger: bool,
}

pub fn exponent_compare(r: f64, s: f64) -> Result<ExponentComparison> {
    if !(r > 0.5 && r <= 1.0) || !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 1/2 < r <= 1 and 0 < s < 1, got r = {r}, s = {s}"
        )));
    }
    let holder = (4.0 * r + 2.0) / (2.0 * r - 1.0);
    let scaling = 3.0 + s;
    Ok(ExponentComparison {
        holder,
        scaling,
        crossover_r: (s + 5.0) / (2.0 * s + 2.0),
        coherence_larger: holder > scaling,
    })
}

/// Scaling-invariant curve anchored at `(e0, 4 ν² λ^{1/2} G²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingCurve {
    pub params: ModelParams,
    pub sp: ScalingParams,
    pub e0: f64,
    pub enstrophy0: f64,
    pub e_max: f64,
    pub enstrophy_max: f64,
}

impl ScalingCurve {
    pub fn new(p: &ModelParams) -> Result<ScalingCurve> {
        let sp = scaling_params(p)?;
        let e0 = p.e0();
        if !(e0 > 0.0) {
            return Err(Error::RegimeViolation("e0 = 0 (no forcing)".into()));
        }
        let big0 = 4.0 * p.domain.nu.powi(2) * p.domain.lambda.sqrt() * p.grashof().powi(2);
        let (e_max, big_max) = scaling_emax(e0, big0, &sp)?;
        Ok(ScalingCurve {
            params: *p,
            sp,
            e0,
            enstrophy0: big0,
            e_max,
            enstrophy_max: big_max,
        })
    }

    pub fn value(&self, e: f64) -> f64 {
        scaling_curve(e, self.e0, self.enstrophy0, &self.sp)
    }
}

impl BoundingModel for ScalingCurve {
    fn name(&self) -> &'static str {
        "scaling"
    }

    fn bounding_segments(&self) -> Vec<(SegmentTag, f64, f64)> {
        vec![(SegmentTag::Phi1, self.e_max.ln() - LEFT_SPAN, self.e0.ln())]
    }

    fn ln_enstrophy(&self, tag: SegmentTag, ln_e: f64) -> Result<f64> {
        if tag != SegmentTag::Phi1 {
            return Err(Error::InvalidArgument(format!(
                "{tag} is not a bounding segment"
            )));
        }
        let v = self.value(ln_e.exp());
        if !(v > 0.0) {
            return Err(Error::OutsideDomain(format!(
                "curve is not positive at ln e = {ln_e}"
            )));
        }
        Ok(v.ln())
    }

    /// Rates divided by the energy decay rate `-d(ln e)/dt`.
    fn extremal_rates(&self, _tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> Rates {
        Rates {
            d_ln_e: -1.0,
            enstrophy_terms: vec![-self.sp.alpha, self.sp.beta * (ln_e - ln_enstrophy).exp()],
        }
    }

    fn conditions_hold(&self, _tag: SegmentTag, _ln_e: f64, ln_enstrophy: f64) -> bool {
        ln_enstrophy.exp() >= self.sp.e_floor
    }
}

pub fn assemble_scaling(p: &ModelParams, n: usize) -> Result<PiecewiseCurve> {
    let curve = ScalingCurve::new(p)?;
    let mut segments = sample_bounding(&curve, n)?;
    let mut flags = vec![format!(
        "alpha = {}, beta = {}, E0 = 4 nu^2 lambda^(1/2) G^2",
        curve.sp.alpha, curve.sp.beta
    )];
    let floor = curve.sp.e_floor;
    let below = segments[0]
        .ln_enstrophy
        .iter()
        .filter(|y| y.exp() < floor)
        .count();
    if below > 0 {
        flags.push(format!(
            "{below} samples below the admissibility floor {floor}"
        ));
    }
    let lo = curve.e_max.ln() - LEFT_SPAN;
    segments.extend(boundary_segments(p, lo, curve.e0.ln(), n));
    Ok(PiecewiseCurve {
        model: "scaling",
        params_echo: p.to_raw(),
        breakpoints: Breakpoints {
            ln_e0: curve.e0.ln(),
            ln_enstrophy0: curve.enstrophy0.ln(),
            ln_e_max: curve.e_max.ln(),
            ln_enstrophy_max: curve.enstrophy_max.ln(),
            ln_e_min: None,
            ln_enstrophy_min: None,
        },
        segments: order_segments(segments),
        flags,
    })
}
