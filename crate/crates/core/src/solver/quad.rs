use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Subdivision depth at which [`integrate_adaptive`] gives up.
pub const MAX_DEPTH: usize = 60;

/// Panels of the composite Simpson pass that sets the absolute target.
const COARSE_PANELS: usize = 64;

/// Geometric pieces tried towards a singular endpoint.
const MAX_SPLITS: usize = 400;

/// Adaptive Simpson quadrature of `f` over `[lo, hi]` with estimated
/// relative error at most `rel_tol`.
///
/// If `f` is not finite at an endpoint the interval is cut into geometric
/// pieces shrinking towards that endpoint. The pieces are summed until they
/// become negligible, and the remaining tail is extrapolated from the ratio
/// of the last two pieces. `lo > hi` returns the negated integral.
pub fn integrate_adaptive<T, F>(f: F, lo: T, hi: T, rel_tol: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if lo == hi {
        return Ok(T::zero());
    }
    if lo > hi {
        return integrate_adaptive(f, hi, lo, rel_tol).map(|v| -v);
    }
    let two = T::lit(2.0);
    let bad_lo = !f(lo).is_finite();
    let bad_hi = !f(hi).is_finite();
    match (bad_lo, bad_hi) {
        (false, false) => simpson_adaptive(&f, lo, hi, rel_tol),
        (true, false) => split_towards(&f, lo, hi, rel_tol),
        (false, true) => split_towards(&f, hi, lo, rel_tol).map(|v| -v),
        (true, true) => {
            let mid = lo + (hi - lo) / two;
            Ok(split_towards(&f, lo, mid, rel_tol)? - split_towards(&f, hi, mid, rel_tol)?)
        }
    }
}

/// `∫_{bad}^{good} f` where `f(bad)` is not finite. `bad` may lie on
/// either side of `good`.
fn split_towards<T, F>(f: &F, bad: T, good: T, rel_tol: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let two = T::lit(2.0);
    let len = good - bad;
    let mut outer = good;
    let mut sum = T::zero();
    let mut prev: Option<T> = None;
    let mut ratio = T::zero();
    for k in 1..=MAX_SPLITS {
        let offset = len / two.powi(k as i32);
        let inner = bad + offset;
        let resolvable = offset.abs() > T::epsilon() * T::lit(1e4) * bad.abs();
        if !resolvable || inner == outer || !f(inner).is_finite() {
            break;
        }
        let piece = simpson_adaptive(f, inner, outer, rel_tol)?;
        sum = sum + piece;
        outer = inner;
        if let Some(p) = prev {
            ratio = piece / p;
            let negligible = piece.abs() <= rel_tol * sum.abs() * T::lit(0.01);
            if negligible && ratio > T::zero() && ratio < T::one() {
                return Ok(sum + piece * ratio / (T::one() - ratio));
            }
        }
        prev = Some(piece);
    }
    // Ran out of representable points next to the endpoint: extrapolate
    // the geometric tail if the pieces are shrinking.
    match prev {
        Some(p) if ratio > T::zero() && ratio < T::one() => {
            Ok(sum + p * ratio / (T::one() - ratio))
        }
        _ => Err(Error::NonConvergence(format!(
            "endpoint singularity at {bad} not integrable to tolerance"
        ))),
    }
}

fn simpson<T: Scalar>(a: T, fa: T, b: T, fb: T, fm: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

fn simpson_adaptive<T, F>(f: &F, lo: T, hi: T, rel_tol: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let two = T::lit(2.0);
    let n = COARSE_PANELS;
    let h = (hi - lo) / T::count(n);
    let mut coarse = T::zero();
    let mut panels = Vec::with_capacity(n);
    for i in 0..n {
        let a = lo + h * T::count(i);
        let b = if i + 1 == n {
            hi
        } else {
            lo + h * T::count(i + 1)
        };
        let m = a + (b - a) / two;
        let (fa, fm, fb) = (f(a), f(m), f(b));
        if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
            return Err(Error::NonConvergence(format!(
                "integrand not finite on [{a}, {b}]"
            )));
        }
        let s = simpson(a, fa, b, fb, fm);
        coarse = coarse + s;
        panels.push((a, fa, b, fb, m, fm, s));
    }
    let floor = T::epsilon() * T::lit(16.0) * coarse.abs();
    let target = (rel_tol * coarse.abs())
        .max(floor)
        .max(T::min_positive_value());
    let per_panel = target / T::count(n);

    let mut total = T::zero();
    let mut stack = Vec::new();
    for p in panels.into_iter().rev() {
        stack.push((p, per_panel, 0usize));
    }
    while let Some(((a, fa, b, fb, m, fm, whole), eps, depth)) = stack.pop() {
        let lm = a + (m - a) / two;
        let rm = m + (b - m) / two;
        let (flm, frm) = (f(lm), f(rm));
        if !(flm.is_finite() && frm.is_finite()) {
            return Err(Error::NonConvergence(format!(
                "integrand not finite near {m}"
            )));
        }
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        let noise = T::epsilon() * T::lit(4.0) * (left.abs() + right.abs());
        if delta.abs() <= T::lit(15.0) * eps || delta.abs() <= noise {
            total = total + left + right + delta / T::lit(15.0);
        } else if depth >= MAX_DEPTH || m <= a || b <= m {
            return Err(Error::NonConvergence(format!(
                "subdivision depth cap reached near {m}"
            )));
        } else {
            let half = eps / two;
            stack.push(((m, fm, b, fb, rm, frm, right), half, depth + 1));
            stack.push(((a, fa, m, fm, lm, flm, left), half, depth + 1));
        }
    }
    Ok(total)
}
