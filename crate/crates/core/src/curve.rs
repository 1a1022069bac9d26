//! Segment tags, region labels and sampled piecewise curves.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::RawParams;

/// Equation that generated a sampled segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SegmentTag {
    Phi1,
    Phi2,
    Phi3,
    LowerBoundary,
    Barrier,
    Parabola,
}

impl SegmentTag {
    pub const ALL: [SegmentTag; 6] = [
        SegmentTag::Phi1,
        SegmentTag::Phi2,
        SegmentTag::Phi3,
        SegmentTag::LowerBoundary,
        SegmentTag::Barrier,
        SegmentTag::Parabola,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SegmentTag::Phi1 => "phi1",
            SegmentTag::Phi2 => "phi2",
            SegmentTag::Phi3 => "phi3",
            SegmentTag::LowerBoundary => "lower_boundary",
            SegmentTag::Barrier => "barrier",
            SegmentTag::Parabola => "parabola",
        }
    }

    /// True for the pieces of the bounding curve itself.
    pub fn is_bounding(self) -> bool {
        matches!(self, SegmentTag::Phi1 | SegmentTag::Phi2 | SegmentTag::Phi3)
    }
}

impl fmt::Display for SegmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SegmentTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SegmentTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown segment tag `{s}`")))
    }
}

/// Region of the energy-enstrophy plane a point falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RegionLabel {
    I,
    II,
    III,
    IV,
    /// Outside the bounding region altogether.
    Exterior,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionLabel::I => "I",
            RegionLabel::II => "II",
            RegionLabel::III => "III",
            RegionLabel::IV => "IV",
            RegionLabel::Exterior => "exterior",
        })
    }
}

/// Sampled piece of a curve in `(ln e, ln E)`, ordered by increasing `e`
/// for graphs of functions of `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSegment {
    pub tag: SegmentTag,
    pub ln_e: Vec<f64>,
    pub ln_enstrophy: Vec<f64>,
}

impl CurveSegment {
    pub fn len(&self) -> usize {
        self.ln_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_e.is_empty()
    }

    pub fn max_ln_enstrophy(&self) -> f64 {
        self.ln_enstrophy
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ln_e
            .iter()
            .copied()
            .zip(self.ln_enstrophy.iter().copied())
    }
}

/// Named points of a curve, as natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoints {
    pub ln_e0: f64,
    pub ln_enstrophy0: f64,
    pub ln_e_max: f64,
    pub ln_enstrophy_max: f64,
    /// Absent for curves with a single bounding segment.
    pub ln_e_min: Option<f64>,
    pub ln_enstrophy_min: Option<f64>,
}

/// Assembled curve ready for export.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCurve {
    /// `critical`, `subcritical`, `full` or `scaling`.
    pub model: &'static str,
    pub params_echo: RawParams,
    pub breakpoints: Breakpoints,
    pub segments: Vec<CurveSegment>,
    pub flags: Vec<String>,
}

impl PiecewiseCurve {
    pub fn segment(&self, tag: SegmentTag) -> Option<&CurveSegment> {
        self.segments.iter().find(|s| s.tag == tag)
    }

    /// Largest sampled `ln E` over the bounding segments.
    pub fn max_ln_enstrophy(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.tag.is_bounding())
            .map(CurveSegment::max_ln_enstrophy)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Extremal growth rates at a point, multiplied by a common positive factor.
///
/// `enstrophy_terms` lists the summands of `d(ln E)/dt`; their absolute
/// values set the scale of the containment margin.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub d_ln_e: f64,
    pub enstrophy_terms: Vec<f64>,
}

impl Rates {
    pub fn d_ln_enstrophy(&self) -> f64 {
        self.enstrophy_terms.iter().sum()
    }
}

/// Closed-form bounding curve that can be evaluated anywhere on its
/// segments, used for sampling and for the containment check.
pub trait BoundingModel: Sync {
    fn name(&self) -> &'static str;

    /// Bounding segments with their `ln e` intervals.
    fn bounding_segments(&self) -> Vec<(SegmentTag, f64, f64)>;

    /// `ln E` on segment `tag` at `ln e`.
    fn ln_enstrophy(&self, tag: SegmentTag, ln_e: f64) -> Result<f64>;

    /// Equality case of the rate bounds used to build segment `tag`.
    fn extremal_rates(&self, tag: SegmentTag, ln_e: f64, ln_enstrophy: f64) -> Rates;

    /// Whether the inequalities behind segment `tag` are in force at the point.
    fn conditions_hold(&self, _tag: SegmentTag, _ln_e: f64, _ln_enstrophy: f64) -> bool {
        true
    }
}

/// `n` points from `lo` to `hi` inclusive, equally spaced.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Samples every bounding segment of `model` on `n` log-spaced points.
pub fn sample_bounding(model: &dyn BoundingModel, n: usize) -> Result<Vec<CurveSegment>> {
    model
        .bounding_segments()
        .into_iter()
        .map(|(tag, lo, hi)| sample_fn(tag, lo, hi, n, |x| model.ln_enstrophy(tag, x)))
        .collect()
}

/// Samples `f(ln e)` in parallel; the output order is the grid order.
pub fn sample_fn<F>(tag: SegmentTag, lo: f64, hi: f64, n: usize, f: F) -> Result<CurveSegment>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let ln_e = log_grid(lo, hi, n);
    let ln_enstrophy = ln_e
        .par_iter()
        .map(|&x| f(x))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_segment(tag))?;
    Ok(CurveSegment {
        tag,
        ln_e,
        ln_enstrophy,
    })
}

/// Largest jump in `ln E` between consecutive bounding segments that share
/// an endpoint.
pub fn continuity_gap(model: &dyn BoundingModel) -> Result<f64> {
    let segs = model.bounding_segments();
    let mut worst = 0.0f64;
    for a in &segs {
        for b in &segs {
            if a.0 != b.0 && a.1 == b.2 {
                let left = model.ln_enstrophy(b.0, b.2)?;
                let right = model.ln_enstrophy(a.0, a.1)?;
                worst = worst.max((left - right).abs());
            }
        }
    }
    Ok(worst)
}

/// `ln(exp(a) + exp(b))`.
pub fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_round_trip() {
        for t in SegmentTag::ALL {
            assert_eq!(t.as_str().parse::<SegmentTag>().unwrap(), t);
        }
        assert!("phi4".parse::<SegmentTag>().is_err());
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = log_grid(-3.0, 1.5, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], -3.0);
        assert_eq!(g[6], 1.5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn ln_add_matches_native() {
        let v = ln_add(2f64.ln(), 3f64.ln());
        assert!((v - 5f64.ln()).abs() < 1e-15);
        assert_eq!(ln_add(f64::NEG_INFINITY, 0.0), 0.0);
    }
}
