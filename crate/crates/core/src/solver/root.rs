use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Iteration cap for [`find_root`]. Bisection alone needs about 60 steps to
/// reduce an `f64` bracket to its last bit, so this is generous.
pub const MAX_ROOT_ITER: usize = 500;

/// Bracketed root of `f` on `[lo, hi]`.
///
/// Regula falsi with the Illinois down-weighting, falling back to a
/// bisection step whenever an iteration fails to halve the bracket. Returns
/// the first iterate with `|f(x)| <= f_tol`, otherwise the midpoint of the
/// bracket once its width is at most `x_tol`. The returned point is then
/// within `x_tol / 2` of a sign change.
pub fn find_root<T, F>(mut f: F, lo: T, hi: T, x_tol: T, f_tol: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket(format!(
            "non-finite endpoint value on [{a}, {b}]"
        )));
    }
    if fa.abs() <= f_tol || fa == T::zero() {
        return Ok(a);
    }
    if fb.abs() <= f_tol || fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(format!(
            "f({a}) = {fa} and f({b}) = {fb} share a sign"
        )));
    }

    let two = T::lit(2.0);
    let mut side = 0i8;
    let mut bisect = false;
    for _ in 0..MAX_ROOT_ITER {
        let width = b - a;
        if width <= x_tol {
            return Ok(a + width / two);
        }
        let mut x = if bisect {
            a + width / two
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = a + width / two;
        }
        let fx = f(x)?;
        if fx.is_nan() {
            return Err(Error::NonConvergence(format!("f({x}) is NaN")));
        }
        if fx.abs() <= f_tol || fx == T::zero() {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa = fa / two;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb = fb / two;
            }
            side = 1;
        }
        bisect = (b - a) > width / two;
    }
    Err(Error::NonConvergence(format!(
        "root bracket [{a}, {b}] not reduced to {x_tol} in {MAX_ROOT_ITER} iterations"
    )))
}
