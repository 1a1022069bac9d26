//! Containment of the extremal flow, oracle cross-checks and the Taylor
//! wavenumber.

use rayon::prelude::*;
use serde::Serialize;

use crate::critical::{find_e_max, parabola_holds, CriticalCurve, SeriesMode};
use crate::curve::{continuity_gap, log_grid, BoundingModel, Rates, SegmentTag};
use crate::error::{Error, Result};
use crate::full_nse::FullNseGeometry;
use crate::params::ModelParams;
use crate::solver::integrate_adaptive;
use crate::specfun::gamma_series_factor;
use crate::subcritical::SubcriticalCurve;

/// Normalized containment margin below which a sample counts as outward.
pub const MARGIN_TOL: f64 = 1e-9;
/// Step in `ln e` of the slope stencil.
pub const STENCIL_STEP: f64 = 1e-2;
/// Closed form against RK4, in `ln E`.
pub const RK_TOL: f64 = 1e-6;
/// Series against quadrature, relative.
pub const SPECFUN_TOL: f64 = 1e-10;
/// Breakpoint continuity, in `ln E`.
pub const CONTINUITY_TOL: f64 = 1e-8;

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub segment: String,
    pub samples: usize,
    /// Smallest margin seen; negative means the check failed there.
    pub worst_margin: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(check: &str, segment: &str, samples: usize, worst_margin: f64) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            segment: segment.to_string(),
            samples,
            worst_margin,
            pass: samples > 0 && worst_margin >= 0.0,
        }
    }

    /// Report for an error-bound check, with margin `1 - error/tol`.
    fn bounded(check: &str, segment: &str, samples: usize, error: f64, tol: f64) -> CheckReport {
        let margin = if error.is_nan() {
            f64::NEG_INFINITY
        } else {
            1.0 - error / tol
        };
        CheckReport::new(check, segment, samples, margin)
    }

    fn failed(check: &str, segment: &str, err: &Error) -> CheckReport {
        CheckReport {
            check: format!("{check}: {err}"),
            segment: segment.to_string(),
            samples: 0,
            worst_margin: f64::NEG_INFINITY,
            pass: false,
        }
    }
}

/// Model with `ln E` shifted by a constant; the containment argument is
/// evaluated on the shifted curve with the original regime conditions.
pub struct Shifted<'a> {
    pub inner: &'a dyn BoundingModel,
    pub ln_shift: f64,
}

impl BoundingModel for Shifted<'_> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn bounding_segments(&self) -> Vec<(SegmentTag, f64, f64)> {
        self.inner.bounding_segments()
    }

    fn ln_enstrophy(&self, tag: SegmentTag, ln_e: f64) -> Result<f64> {
        Ok(self.inner.ln_enstrophy(tag, ln_e)? + self.ln_shift)
    }

    fn extremal_rates(&self, tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> Rates {
        self.inner.extremal_rates(tag, ln_e, ln_enstrophy)
    }

    fn conditions_hold(&self, tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> bool {
        self.inner
            .conditions_hold(tag, ln_e, ln_enstrophy - self.ln_shift)
    }
}

/// `d(ln E)/d(ln e)` from a 7-point central stencil.
fn slope(model: &dyn BoundingModel, tag: SegmentTag, x: f64, h: f64) -> Result<f64> {
    const W: [f64; 3] = [45.0, -9.0, 1.0];
    let mut acc = 0.0;
    for (k, w) in W.iter().enumerate() {
        let d = (k + 1) as f64 * h;
        acc += w * (model.ln_enstrophy(tag, x + d)? - model.ln_enstrophy(tag, x - d)?);
    }
    Ok(acc / (60.0 * h))
}

/// Normalized margin `(slope · d(ln e)/dt - d(ln E)/dt) / scale`; a
/// negative value means the extremal flow leaves the region through the
/// curve.
fn margin(model: &dyn BoundingModel, tag: SegmentTag, x: f64, h: f64) -> Result<Option<f64>> {
    let y = model.ln_enstrophy(tag, x)?;
    if !model.conditions_hold(tag, x, y) {
        return Ok(None);
    }
    let s = slope(model, tag, x, h)?;
    let rates = model.extremal_rates(tag, x, y);
    let along = s * rates.d_ln_e;
    let scale = along.abs() + rates.enstrophy_terms.iter().map(|t| t.abs()).sum::<f64>();
    Ok(Some((along - rates.d_ln_enstrophy()) / scale))
}

/// Containment of the extremal flow at `n` samples per bounding segment.
///
/// Samples stay three stencil steps inside each segment; those where the
/// segment's regime conditions fail are skipped. A segment with no
/// admissible sample fails.
pub fn containment_check(model: &dyn BoundingModel, n: usize) -> Vec<CheckReport> {
    model
        .bounding_segments()
        .into_iter()
        .map(|(tag, lo, hi)| {
            let h = STENCIL_STEP.min((hi - lo) / 8.0);
            let grid = log_grid(lo + 3.0 * h, hi - 3.0 * h, n);
            let margins: Result<Vec<Option<f64>>> =
                grid.par_iter().map(|&x| margin(model, tag, x, h)).collect();
            match margins {
                Ok(m) => {
                    let used: Vec<f64> = m.into_iter().flatten().collect();
                    let worst = used.iter().copied().fold(f64::INFINITY, f64::min);
                    CheckReport {
                        check: "containment".to_string(),
                        segment: tag.as_str().to_string(),
                        samples: used.len(),
                        worst_margin: if used.is_empty() {
                            f64::NEG_INFINITY
                        } else {
                            worst
                        },
                        pass: !used.is_empty() && worst >= -MARGIN_TOL,
                    }
                }
                Err(e) => CheckReport::failed("containment", tag.as_str(), &e),
            }
        })
        .collect()
}

/// True when every report passed.
pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

/// `κ_T = (E_mean / e_mean)^{1/2}`.
pub fn taylor_wavenumber(e_mean: f64, enstrophy_mean: f64) -> Result<f64> {
    if e_mean == 0.0 {
        return Err(Error::DivisionByZero("mean energy is zero".into()));
    }
    if !(e_mean > 0.0) || !(enstrophy_mean >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Taylor wavenumber needs positive means, got ({e_mean}, {enstrophy_mean})"
        )));
    }
    Ok((enstrophy_mean / e_mean).sqrt())
}

/// `ln κ_T` from sample logs, with arithmetic means taken in log space.
pub fn ln_taylor_from_samples(ln_e: &[f64], ln_enstrophy: &[f64]) -> Result<f64> {
    if ln_e.is_empty() || ln_e.len() != ln_enstrophy.len() {
        return Err(Error::InvalidArgument(
            "need equally many, non-zero samples".into(),
        ));
    }
    let mean = |v: &[f64]| {
        let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + (v.iter().map(|x| (x - m).exp()).sum::<f64>() / v.len() as f64).ln()
    };
    let (le, lb) = (mean(ln_e), mean(ln_enstrophy));
    if le == f64::NEG_INFINITY {
        return Err(Error::DivisionByZero("mean energy is zero".into()));
    }
    Ok(0.5 * (lb - le))
}

/// Series parameters of the special-function oracle.
pub const SPECFUN_ALPHAS: [f64; 4] = [0.03, 0.5, 0.97, 1.5];
pub const SPECFUN_XS: [f64; 5] = [0.0, 1.0, 10.0, 48.0, 100.0];

/// Largest relative gap between `g(α, x)` and quadrature over the grid.
pub fn specfun_worst_error() -> Result<f64> {
    let mut worst = 0.0f64;
    for &a in &SPECFUN_ALPHAS {
        for &x in &SPECFUN_XS {
            let series = gamma_series_factor(a, x, 1e-13)?;
            // ∫₀¹ t^{α-1} e^{x(t-1)} dt with t = u^{1/α}, scaled by eˣ afterwards
            let k = 1.0 / a;
            let q =
                k * integrate_adaptive(|u: f64| (x * (u.powf(k) - 1.0)).exp(), 0.0, 1.0, 1e-13)?;
            let rel = (series.ln_mag() - (q.ln() + x)).exp_m1().abs();
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

/// Largest distance between the `e_max` root and the sign change found by
/// a scan of `u = ln(e_a - e)`, in units of the scan spacing.
pub fn e_max_scan_gap(curve: &CriticalCurve, n: usize) -> Result<f64> {
    let k = &curve.coeffs;
    let ln_ea = k.e_a.ln();
    let g = |u: f64| -> Result<f64> {
        let ln_e = ln_ea + (-(u - ln_ea).exp()).ln_1p();
        Ok(k.ln_phi1(ln_e)? - crate::critical::ln_barrier(&k.params, ln_e, u))
    };
    let root = find_e_max(k)?.u;
    let lo = root - 5.0;
    let hi = (root + 5.0).min(ln_ea - 1e-6);
    let grid = log_grid(lo, hi, n);
    let step = grid[1] - grid[0];
    let mut prev = (grid[0], g(grid[0])?);
    for &u in &grid[1..] {
        let v = g(u)?;
        if v.signum() != prev.1.signum() {
            let mid = 0.5 * (u + prev.0);
            return Ok((mid - root).abs() / step);
        }
        prev = (u, v);
    }
    Err(Error::NoBracket(
        "grid scan found no sign change near e_max".into(),
    ))
}

/// Same check for the sub-critical `ē`, scanned in `ln e`.
pub fn e_bar_scan_gap(curve: &SubcriticalCurve, n: usize) -> Result<f64> {
    let g = |x: f64| -> Result<f64> {
        Ok(curve.alpha.ln() + curve.sigma * curve.ln_phi1(x)? - curve.c_big.ln() - x)
    };
    let root = curve.ln_e_bar;
    let hi = curve.ln_e0;
    let lo = root - (hi - root).max(1.0);
    let grid = log_grid(lo, hi, n);
    let step = grid[1] - grid[0];
    let mut prev = (grid[0], g(grid[0])?);
    for &x in &grid[1..] {
        let v = g(x)?;
        if v.signum() != prev.1.signum() {
            return Ok((0.5 * (x + prev.0) - root).abs() / step);
        }
        prev = (x, v);
    }
    Err(Error::NoBracket(
        "grid scan found no sign change near e_bar".into(),
    ))
}

fn parabola_report(model: &dyn BoundingModel, p: &ModelParams, n: usize) -> Vec<CheckReport> {
    model
        .bounding_segments()
        .into_iter()
        .filter(|(t, _, _)| *t != SegmentTag::Phi1)
        .map(|(tag, lo, hi)| {
            let mut worst = f64::INFINITY;
            for x in log_grid(lo, hi, n) {
                match model.ln_enstrophy(tag, x) {
                    Ok(y) if parabola_holds(p, x, y) => worst = worst.min(1.0),
                    Ok(_) => worst = f64::NEG_INFINITY,
                    Err(e) => return CheckReport::failed("parabola", tag.as_str(), &e),
                }
            }
            CheckReport::new("parabola", tag.as_str(), n, worst)
        })
        .collect()
}

/// Options of [`oracle_suite_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub samples: usize,
    /// Series used for `phi1` in the RK4 comparison.
    pub series: SeriesMode,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            samples: 1000,
            series: SeriesMode::Converged,
        }
    }
}

pub fn oracle_suite(p: &ModelParams) -> Vec<CheckReport> {
    oracle_suite_with(p, SuiteOptions::default())
}

/// Special-function oracle, then the curve oracles of the model selected
/// by `r` and the full-NSE containment check. Curve oracles are skipped
/// when `G = 0`.
pub fn oracle_suite_with(p: &ModelParams, opts: SuiteOptions) -> Vec<CheckReport> {
    let n_spec = SPECFUN_ALPHAS.len() * SPECFUN_XS.len();
    let mut out = vec![match specfun_worst_error() {
        Ok(err) => CheckReport::bounded("specfun_vs_quadrature", "-", n_spec, err, SPECFUN_TOL),
        Err(e) => CheckReport::failed("specfun_vs_quadrature", "-", &e),
    }];
    if p.grashof() == 0.0 {
        return out;
    }
    let n = opts.samples;
    if p.is_critical() {
        match CriticalCurve::new(p) {
            Ok(c) => {
                out.push(match c.phi1_vs_rk4(opts.series) {
                    Ok(d) => CheckReport::bounded("closed_form_vs_rk4", "phi1", 1, d, RK_TOL),
                    Err(e) => CheckReport::failed("closed_form_vs_rk4", "phi1", &e),
                });
                out.push(match e_max_scan_gap(&c, n) {
                    Ok(d) => CheckReport::bounded("root_vs_grid_scan", "phi1", n, d, 1.0),
                    Err(e) => CheckReport::failed("root_vs_grid_scan", "phi1", &e),
                });
                out.extend(model_checks(&c, p, n));
            }
            Err(e) => out.push(CheckReport::failed("critical_curve", "-", &e)),
        }
    } else {
        match SubcriticalCurve::new(p) {
            Ok(c) => {
                out.push(match e_bar_scan_gap(&c, n) {
                    Ok(d) => CheckReport::bounded("root_vs_grid_scan", "phi1", n, d, 1.0),
                    Err(e) => CheckReport::failed("root_vs_grid_scan", "phi1", &e),
                });
                out.extend(model_checks(&c, p, n));
            }
            Err(e) => out.push(CheckReport::failed("subcritical_curve", "-", &e)),
        }
    }
    match FullNseGeometry::new(p, p.eta) {
        Ok(geo) => {
            for mut r in containment_check(&geo, n) {
                r.check = "full_nse_containment".to_string();
                out.push(r);
            }
        }
        Err(e) => out.push(CheckReport::failed("full_nse_containment", "phi1", &e)),
    }
    out
}

fn model_checks(model: &dyn BoundingModel, p: &ModelParams, n: usize) -> Vec<CheckReport> {
    let mut out = Vec::new();
    out.push(match continuity_gap(model) {
        Ok(g) => CheckReport::bounded("continuity", "all", 1, g, CONTINUITY_TOL),
        Err(e) => CheckReport::failed("continuity", "all", &e),
    });
    out.extend(parabola_report(model, p, n));
    out.extend(containment_check(model, n));
    let halved = Shifted {
        inner: model,
        ln_shift: -std::f64::consts::LN_2,
    };
    let detected = !all_pass(&containment_check(&halved, n));
    out.push(CheckReport {
        check: "negative_control_halved".to_string(),
        segment: "all".to_string(),
        samples: n,
        worst_margin: if detected { 1.0 } else { -1.0 },
        pass: detected,
    });
    out
}
