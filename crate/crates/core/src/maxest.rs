//! Closed-form lower and upper bounds for `E_max` of the critical curve.
//!
//! All formulas take ν = λ = 1. [`bound_report`] nondimensionalizes general
//! parameters first and rescales the results.

use serde::Serialize;

use crate::critical::coefficients;
use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::params::ModelParams;

/// Relative slack on the `η ≥ η_min` admissibility check.
pub const ETA_SLACK: f64 = 1e-6;

/// `e_crit = ε(1 - ρ)/(4 c₂)`.
pub fn e_crit(eps: f64, rho: f64, c2: f64) -> f64 {
    eps * (1.0 - rho) / (4.0 * c2)
}

/// `ē_crit = ε(1 - ρ)/(2 (2 + η) c₂)`.
pub fn e_bar_crit(eps: f64, rho: f64, c2: f64, eta: f64) -> f64 {
    eps * (1.0 - rho) / (2.0 * (2.0 + eta) * c2)
}

/// `4 G^{1+ρ} e_crit^{(1-ρ)/2} exp((2c₂/ε)(G² - e_crit))`.
pub fn emax_lower(g: f64, eps: f64, rho: f64, c2: f64) -> Result<LogScalar> {
    let ec = e_crit(eps, rho, c2);
    if !(g * g > ec) {
        return Err(Error::RegimeViolation(format!(
            "G^2 = {} does not exceed e_crit = {ec}",
            g * g
        )));
    }
    let ln = 4f64.ln()
        + (1.0 + rho) * g.ln()
        + (1.0 - rho) / 2.0 * ec.ln()
        + 2.0 * c2 / eps * (g * g - ec);
    Ok(LogScalar::from_ln(ln))
}

/// Smallest admissible `η` for anchor `E0`: `12 μ / (ε^{2/5} E0^{3/5})`.
pub fn eta_min(anchor_e0: f64, eps: f64, mu: f64) -> f64 {
    12.0 * mu / (eps.powf(0.4) * anchor_e0.powf(0.6))
}

/// `E0 (ē_crit/e0)^{(1-ρ)/2} exp(((2+η)c₂/ε)(G² - ē_crit))` with `e0 = G²`.
pub fn emax_upper(
    g: f64,
    eps: f64,
    rho: f64,
    c2: f64,
    mu: f64,
    eta: f64,
    anchor_e0: f64,
) -> Result<LogScalar> {
    let floor = eta_min(anchor_e0, eps, mu);
    if eta < floor * (1.0 - ETA_SLACK) {
        return Err(Error::EtaTooSmall {
            eta,
            eta_min: floor,
        });
    }
    let eb = e_bar_crit(eps, rho, c2, eta);
    let e0 = g * g;
    let ln = anchor_e0.ln()
        + (1.0 - rho) / 2.0 * (eb.ln() - e0.ln())
        + (2.0 + eta) * c2 / eps * (e0 - eb);
    Ok(LogScalar::from_ln(ln))
}

/// Both bounds for one parameter set, in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lower: LogScalar,
    pub upper: LogScalar,
    pub eta_used: f64,
    pub e_crit: f64,
    pub e_bar_crit: f64,
    pub anchor_e0: f64,
    pub flags: Vec<String>,
}

/// Serialized form of [`BoundReport`]; magnitudes as `log10`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReportJson {
    pub log10_lower: f64,
    pub log10_upper: f64,
    pub eta_used: f64,
    pub e_crit: f64,
    pub e_bar_crit: f64,
    #[serde(rename = "anchor_E0")]
    pub anchor_e0: f64,
    pub flags: Vec<String>,
}

impl BoundReport {
    pub fn to_json(&self) -> BoundReportJson {
        BoundReportJson {
            log10_lower: self.lower.log10_mag(),
            log10_upper: self.upper.log10_mag(),
            eta_used: self.eta_used,
            e_crit: self.e_crit,
            e_bar_crit: self.e_bar_crit,
            anchor_e0: self.anchor_e0,
            flags: self.flags.clone(),
        }
    }
}

/// Bounds for general `(ν, λ)`.
///
/// `anchor_e0` is a physical enstrophy and defaults to the critical curve's
/// `E0`; `eta` defaults to `η_min` of that anchor.
pub fn bound_report(
    p: &ModelParams,
    eta: Option<f64>,
    anchor_e0: Option<f64>,
) -> Result<BoundReport> {
    let (q, units) = p.nondimensionalized();
    let c = &q.coherence;
    let rho = q.rho();
    let g = q.grashof();
    let mut flags = Vec::new();
    let curve_anchor = coefficients(&q).enstrophy0;
    let anchor = match anchor_e0 {
        Some(a) => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "anchor E0 = {a} must be positive"
                )));
            }
            let a = a / units.enstrophy;
            if a >= curve_anchor {
                flags.push("anchor dominates the curve anchor".to_string());
            } else {
                flags.push("anchor is below the curve anchor".to_string());
            }
            a
        }
        None => curve_anchor,
    };
    let floor = eta_min(anchor, c.eps, c.mu);
    let eta = match eta {
        Some(e) => e,
        None => {
            flags.push("eta set to eta_min".to_string());
            floor
        }
    };
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "eta = {eta} must be positive"
        )));
    }
    let lower = emax_lower(g, c.eps, rho, c.c2)?;
    let upper = emax_upper(g, c.eps, rho, c.c2, c.mu, eta, anchor)?;
    if !p.is_normalized() {
        flags.push("computed at nu = lambda = 1 and rescaled".to_string());
    }
    Ok(BoundReport {
        lower: lower.scale(units.enstrophy),
        upper: upper.scale(units.enstrophy),
        eta_used: eta,
        e_crit: e_crit(c.eps, rho, c.c2) * units.energy,
        e_bar_crit: e_bar_crit(c.eps, rho, c.c2, eta) * units.energy,
        anchor_e0: anchor * units.enstrophy,
        flags,
    })
}
