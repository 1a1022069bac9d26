//! Unconditional bounding structure for the full 3D Navier-Stokes equations
//! in the `(e, 𝖤)` plane.
//!
//! Three analytic curves cut the plane:
//!
//! * the parabola `𝖤 = η ν λ^{3/4} G e^{1/2}`, below which the energy may grow,
//! * `e = Ψ(𝖤)`, left of which the enstrophy bound is non-positive,
//! * the Bernoulli solution `𝖤 = Φ(e)` through the maximum `(e₁, 𝖤₁)` of `Ψ`.

use crate::critical::order_segments;
use crate::curve::{
    log_grid, sample_bounding, BoundingModel, Breakpoints, CurveSegment, PiecewiseCurve, Rates,
    RegionLabel, SegmentTag,
};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::solver::find_root;

/// `Ψ(𝖤) = ν⁴ 𝖤² / (2 ν⁶ λ^{3/2} G² + c₁ 𝖤³)`.
#[allow(non_snake_case)]
pub fn psi_of_E(E: f64, p: &ModelParams) -> f64 {
    let (nu, lambda, g) = (p.domain.nu, p.domain.lambda, p.grashof());
    nu.powi(4) * E * E / (2.0 * nu.powi(6) * lambda.powf(1.5) * g * g + p.coherence.c1 * E.powi(3))
}

/// Maximum `(e₁, 𝖤₁)` of `Ψ`.
pub fn critical_number(p: &ModelParams) -> (f64, f64) {
    let (nu, lambda, g) = (p.domain.nu, p.domain.lambda, p.grashof());
    let q = 4.0 / p.coherence.c1;
    let big = q.cbrt() * nu * nu * lambda.sqrt() * g.powf(2.0 / 3.0);
    let small = q.powf(2.0 / 3.0) * nu * nu / (6.0 * lambda.sqrt() * g.powf(2.0 / 3.0));
    (small, big)
}

/// Largest admissible parabola weight for a given `c₁`.
pub fn eta_threshold(c1: f64) -> f64 {
    1.0 + 4.0 * c1 / (3.0 * 6f64.sqrt()) * (4.0 / c1).powf(5.0 / 6.0)
}

/// `(α, β)` of the Bernoulli solution.
pub fn alpha_beta(eta: f64, p: &ModelParams) -> (f64, f64) {
    let (nu, lambda, g) = (p.domain.nu, p.domain.lambda, p.grashof());
    let alpha = eta / (eta - 1.0);
    let beta = 4.0 * p.coherence.c1 / ((3.0 * eta - 1.0) * nu.powi(5) * lambda.powf(0.75) * g);
    (alpha, beta)
}

/// `Φ(e)^{-2}` for the solution through `(e_init, 𝖤_init)`.
fn phi_inv_sq(e: f64, e_init: f64, big_init: f64, alpha: f64, beta: f64) -> f64 {
    let r = (e_init / e).ln();
    // √e - e^{-α} e_init^{α+½} = -√e (exp((α+½) r) - 1), kept exact near e_init
    (alpha * r).exp() / (big_init * big_init) - beta * e.sqrt() * ((alpha + 0.5) * r).exp_m1()
}

/// `Φ(e)` through `(e_init, 𝖤_init)`.
pub fn phi_of_e(e: f64, e_init: f64, big_init: f64, eta: f64, p: &ModelParams) -> Result<f64> {
    let (alpha, beta) = alpha_beta(eta, p);
    let y = phi_inv_sq(e, e_init, big_init, alpha, beta);
    if !(e > 0.0) || !(y > 0.0) {
        return Err(Error::OutsideDomain(format!(
            "e = {e} is at or past the vertical asymptote of Phi"
        )));
    }
    Ok(y.powf(-0.5))
}

/// Vertical asymptote of `Φ` through `(e_init, 𝖤_init)`; zero if `Φ` is
/// finite for all `e > 0`.
pub fn e_star(e_init: f64, big_init: f64, eta: f64, p: &ModelParams) -> f64 {
    let (alpha, beta) = alpha_beta(eta, p);
    let v = e_init.powf(alpha + 0.5) - e_init.powf(alpha) / (beta * big_init * big_init);
    if v > 0.0 {
        v.powf(1.0 / (alpha + 0.5))
    } else {
        0.0
    }
}

/// `𝖤` on the parabola at energy `e`.
pub fn parabola(e: f64, eta: f64, p: &ModelParams) -> f64 {
    eta * p.domain.nu * p.domain.lambda.powf(0.75) * p.grashof() * e.sqrt()
}

/// `(γ, δ)` of the intersection equation `e^{1/2+α} - γ e^{α-1} + δ = 0`.
pub fn gamma_delta(eta: f64, p: &ModelParams) -> (f64, f64) {
    let (nu, lambda, g) = (p.domain.nu, p.domain.lambda, p.grashof());
    let (alpha, beta) = alpha_beta(eta, p);
    let (e1, big1) = critical_number(p);
    let gamma = 1.0 / (beta * eta * eta * nu * nu * lambda.powf(1.5) * g * g);
    let delta = e1.powf(alpha) / (beta * big1 * big1) - e1.powf(0.5 + alpha);
    (gamma, delta)
}

/// Left side of the intersection equation.
pub fn e2_residual(e: f64, eta: f64, p: &ModelParams) -> f64 {
    let (alpha, _) = alpha_beta(eta, p);
    let (gamma, delta) = gamma_delta(eta, p);
    e.powf(0.5 + alpha) - gamma * e.powf(alpha - 1.0) + delta
}

/// Lower bound `|δ|^{2/(2α+1)}` for the intersection energy.
pub fn e2_lower_bound(eta: f64, p: &ModelParams) -> f64 {
    let (alpha, _) = alpha_beta(eta, p);
    let (_, delta) = gamma_delta(eta, p);
    delta.abs().powf(2.0 / (2.0 * alpha + 1.0))
}

fn check_eta(eta: f64, p: &ModelParams) -> Result<()> {
    let limit = eta_threshold(p.coherence.c1);
    if !(eta > 1.0) {
        return Err(Error::InvalidRegime(format!("eta = {eta} must exceed 1")));
    }
    if eta >= limit {
        return Err(Error::RegimeViolation(format!(
            "eta = {eta} is not below the admissible limit {limit}"
        )));
    }
    if !(p.grashof() > 0.0) {
        return Err(Error::RegimeViolation("G = 0 (no forcing)".into()));
    }
    Ok(())
}

/// Energy where `Φ` through `(e₁, 𝖤₁)` meets the parabola, to the right of `e₁`.
pub fn solve_e2(eta: f64, p: &ModelParams) -> Result<f64> {
    check_eta(eta, p)?;
    let (e1, _) = critical_number(p);
    let h = |v: f64| -> Result<f64> { Ok(e2_residual(v.exp(), eta, p)) };
    let lo = e1.ln();
    if h(lo)? >= 0.0 {
        return Err(Error::NoBracket(format!(
            "(e1, E1) is not above the parabola for eta = {eta}"
        )));
    }
    let mut step = 1.0;
    let mut hi = lo + step;
    while h(hi)? <= 0.0 {
        step *= 2.0;
        if step > 1e4 {
            return Err(Error::NoBracket("Phi never returns to the parabola".into()));
        }
        hi = lo + step;
    }
    let v = find_root(h, lo, hi, 1e-13 * hi.abs().max(1.0), 0.0)?;
    Ok(v.exp())
}

/// All derived quantities of the full-NSE construction for one `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullNseGeometry {
    pub params: ModelParams,
    pub eta: f64,
    pub alpha_full: f64,
    pub beta_full: f64,
    pub e1: f64,
    pub big_e1: f64,
    /// `2^{-1/3} 𝖤₁`, below which the cubic term no longer dominates.
    pub big_e_under: f64,
    /// Energy where `𝖤 = 𝖤̲` meets the parabola.
    pub e_under: f64,
    /// Asymptote of `Φ` through `(e₁, 𝖤₁)`.
    pub e_star: f64,
    pub e2: f64,
    pub big_e2: f64,
    pub e0: f64,
}

impl FullNseGeometry {
    pub fn new(p: &ModelParams, eta: f64) -> Result<FullNseGeometry> {
        let e2 = solve_e2(eta, p)?;
        let (alpha, beta) = alpha_beta(eta, p);
        let (e1, big1) = critical_number(p);
        let under = 2f64.powf(-1.0 / 3.0) * big1;
        let slope = eta * p.domain.nu * p.domain.lambda.powf(0.75) * p.grashof();
        Ok(FullNseGeometry {
            params: *p,
            eta,
            alpha_full: alpha,
            beta_full: beta,
            e1,
            big_e1: big1,
            big_e_under: under,
            e_under: (under / slope).powi(2),
            e_star: e_star(e1, big1, eta, p),
            e2,
            big_e2: parabola(e2, eta, p),
            e0: p.e0(),
        })
    }

    /// `Φ` through `(e₁, 𝖤₁)`.
    pub fn phi(&self, e: f64) -> Result<f64> {
        phi_of_e(e, self.e1, self.big_e1, self.eta, &self.params)
    }

    pub fn classify(&self, e: f64, big: f64) -> RegionLabel {
        let p = &self.params;
        if big < parabola(e, self.eta, p) {
            return RegionLabel::I;
        }
        if e <= psi_of_E(big, p) {
            return RegionLabel::IV;
        }
        let beyond = e < self.e_star || matches!(self.phi(e), Ok(v) if big > v);
        if beyond {
            RegionLabel::II
        } else {
            RegionLabel::III
        }
    }
}

/// Region of `(e, 𝖤)` relative to the parabola, `Ψ` and `Φ`. Points on a
/// shared boundary take the larger label.
pub fn classify_full(e: f64, big: f64, p: &ModelParams, eta: f64) -> Result<RegionLabel> {
    if !(e > 0.0 && big > 0.0) || !e.is_finite() || !big.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "classification needs finite e > 0 and E > 0, got ({e}, {big})"
        )));
    }
    Ok(FullNseGeometry::new(p, eta)?.classify(e, big))
}

impl BoundingModel for FullNseGeometry {
    fn name(&self) -> &'static str {
        "full"
    }

    fn bounding_segments(&self) -> Vec<(SegmentTag, f64, f64)> {
        vec![(SegmentTag::Phi1, self.e1.ln(), self.e2.ln())]
    }

    fn ln_enstrophy(&self, tag: SegmentTag, ln_e: f64) -> Result<f64> {
        match tag {
            SegmentTag::Phi1 => Ok(self.phi(ln_e.exp())?.ln()),
            other => Err(Error::InvalidArgument(format!(
                "{other} is not a bounding segment"
            ))),
        }
    }

    /// Rates multiplied by `e^{1/2}`.
    fn extremal_rates(&self, _tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> Rates {
        let p = &self.params;
        let (nu, lambda, g) = (p.domain.nu, p.domain.lambda, p.grashof());
        let k = nu * nu * lambda.powf(0.75) * g;
        Rates {
            d_ln_e: -2.0 * (self.eta - 1.0) * k,
            enstrophy_terms: vec![
                2.0 * p.coherence.c1 / nu.powi(3) * (2.0 * ln_enstrophy + 0.5 * ln_e).exp(),
                -self.eta * k,
            ],
        }
    }

    fn conditions_hold(&self, _tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> bool {
        let big = ln_enstrophy.exp();
        big >= parabola(ln_e.exp(), self.eta, &self.params) && big >= self.big_e_under
    }
}

/// Sampled full-NSE structure: `Φ` between `e₁` and `e₂` (tag `phi1`), the
/// `Ψ` curve (tag `barrier`) and the parabola.
pub fn assemble_full(p: &ModelParams, eta: f64, n: usize) -> Result<PiecewiseCurve> {
    let geo = FullNseGeometry::new(p, eta)?;
    let mut segments = sample_bounding(&geo, n)?;
    let ln_big1 = geo.big_e1.ln();
    let psi_grid = log_grid(ln_big1 - 12.0, ln_big1 + 12.0, n);
    segments.push(CurveSegment {
        tag: SegmentTag::Barrier,
        ln_e: psi_grid
            .iter()
            .map(|&y| psi_of_E(y.exp(), p).ln())
            .collect(),
        ln_enstrophy: psi_grid,
    });
    let par_grid = log_grid(geo.e1.ln() - 10.0, geo.e0.ln(), n);
    segments.push(CurveSegment {
        tag: SegmentTag::Parabola,
        ln_enstrophy: par_grid
            .iter()
            .map(|&x| parabola(x.exp(), eta, p).ln())
            .collect(),
        ln_e: par_grid,
    });
    let mut flags = vec![format!("eta = {eta}")];
    let (_, delta) = gamma_delta(eta, p);
    if delta < 0.0 {
        flags.push("delta < 0: e2 lower bound uses |delta|".to_string());
    }
    Ok(PiecewiseCurve {
        model: "full",
        params_echo: p.to_raw(),
        breakpoints: Breakpoints {
            ln_e0: geo.e0.ln(),
            ln_enstrophy0: parabola(geo.e0, eta, p).ln(),
            ln_e_max: geo.e1.ln(),
            ln_enstrophy_max: ln_big1,
            ln_e_min: Some(geo.e2.ln()),
            ln_enstrophy_min: Some(geo.big_e2.ln()),
        },
        segments: order_segments(segments),
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reference_params;

    fn unit(g: f64, c1: f64) -> ModelParams {
        let mut p = reference_params().with_grashof(g);
        p.coherence.c1 = c1;
        p
    }

    #[test]
    fn critical_number_values() {
        let p = unit(8.0, 4.0);
        let (e1, big1) = critical_number(&p);
        assert!((big1 - 4.0).abs() < 1e-13);
        assert!((e1 - 1.0 / 24.0).abs() < 1e-15);
        assert!((psi_of_E(big1, &p) - e1).abs() < 1e-15);
        assert!(psi_of_E(1e-200, &p) < 1e-300);
    }

    #[test]
    fn threshold_value() {
        assert!((eta_threshold(4.0) - (1.0 + 16.0 / (3.0 * 6f64.sqrt()))).abs() < 1e-14);
        assert!((eta_threshold(4.0) - 3.177).abs() < 1e-3);
    }

    #[test]
    fn asymptote_closed_form() {
        let p = unit(1.0, 1.0);
        let e0 = 1.0;
        let big0 = parabola(e0, 2.0, &p);
        let v = e_star(e0, big0, 2.0, &p);
        assert!((v - (11.0f64 / 16.0).powf(0.4)).abs() < 1e-14);
        assert!((v - 0.8608).abs() < 1e-4);
    }

    #[test]
    fn phi_initial_condition_and_divergence() {
        let p = unit(1.0, 1.0);
        let big0 = parabola(1.0, 2.0, &p);
        assert!((phi_of_e(1.0, 1.0, big0, 2.0, &p).unwrap() - big0).abs() < 1e-14);
        let es = e_star(1.0, big0, 2.0, &p);
        let mut last = 0.0;
        for k in 1..12 {
            let e = es * (1.0 + 10f64.powi(-k));
            let v = phi_of_e(e, 1.0, big0, 2.0, &p).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(last > 1e4);
        assert!(matches!(
            phi_of_e(es * 0.99, 1.0, big0, 2.0, &p),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn e2_above_bounds() {
        for g in [10.0, 100.0, 1000.0] {
            let p = unit(g, 1.0);
            let e2 = solve_e2(2.0, &p).unwrap();
            assert!(e2_residual(e2, 2.0, &p).abs() < 1e-9 * e2.powf(2.5));
            assert!(e2 > e2_lower_bound(2.0, &p));
        }
    }

    #[test]
    fn eta_above_threshold_rejected() {
        let p = unit(100.0, 1.0);
        let eta = eta_threshold(1.0) + 0.1;
        assert!(matches!(solve_e2(eta, &p), Err(Error::RegimeViolation(_))));
    }

    #[test]
    fn classification_examples() {
        let p = unit(100.0, 1.0);
        let e0 = p.e0();
        assert_eq!(classify_full(e0, 1e-6, &p, 2.0).unwrap(), RegionLabel::I);
        assert!(matches!(
            classify_full(1e9, 0.0, &p, 2.0),
            Err(Error::InvalidArgument(_))
        ));
        assert_eq!(classify_full(e0, 1e12, &p, 2.0).unwrap(), RegionLabel::II);
        let on = parabola(e0, 2.0, &p);
        assert_ne!(classify_full(e0, on, &p, 2.0).unwrap(), RegionLabel::I);
    }
}
