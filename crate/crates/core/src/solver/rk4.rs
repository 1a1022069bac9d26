use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Step-halving controls for [`rk4_path`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl<T> {
    /// Step count of the first pass.
    pub initial_steps: usize,
    /// Passes stop once two successive end values of `ln E` differ by less.
    pub refine_tol: T,
    /// Halving stops with `NonConvergence` beyond this many steps.
    pub max_steps: usize,
    /// `|d(ln E)/de|` above this is reported as `FieldBlowup`.
    pub blowup_guard: T,
}

impl<T: Scalar> Default for StepControl<T> {
    fn default() -> Self {
        StepControl {
            initial_steps: 64,
            refine_tol: T::lit(1e-8),
            max_steps: 1 << 22,
            blowup_guard: T::lit(1e200),
        }
    }
}

/// Sampled solution of a log-enstrophy ODE, ordered from `e_start` to `e_end`.
#[derive(Debug, Clone)]
pub struct RkPath<T> {
    pub e: Vec<T>,
    pub ln_enstrophy: Vec<T>,
    /// Step count of the accepted pass.
    pub steps: usize,
}

impl<T: Scalar> RkPath<T> {
    pub fn end(&self) -> T {
        *self
            .ln_enstrophy
            .last()
            .expect("path has at least one sample")
    }
}

/// Fixed-step classical RK4 for `d(ln E)/de = field(e, ln E)` from
/// `(e_start, ln_e_start)` down to `e_end`, halving the step until two
/// passes agree at `e_end`.
///
/// Steps are uniform in `ln e`. The field is multiplied by `e` for that
/// change of variable, which keeps `1/e` terms resolved near small energies.
pub fn rk4_path<T, F>(
    field: F,
    e_start: T,
    ln_e_start: T,
    e_end: T,
    control: StepControl<T>,
) -> Result<RkPath<T>>
where
    T: Scalar,
    F: Fn(T, T) -> T,
{
    if !(e_end > T::zero() && e_end < e_start) {
        return Err(Error::InvalidArgument(format!(
            "rk4_path integrates in decreasing e from {e_start} to {e_end} > 0"
        )));
    }
    let mut n = control.initial_steps.max(1);
    let mut coarse = integrate_fixed(&field, e_start, ln_e_start, e_end, n, &control)?;
    loop {
        n *= 2;
        if n > control.max_steps {
            return Err(Error::NonConvergence(format!(
                "rk4_path not converged to {} with {} steps",
                control.refine_tol, control.max_steps
            )));
        }
        let fine = integrate_fixed(&field, e_start, ln_e_start, e_end, n, &control)?;
        if (fine.end() - coarse.end()).abs() < control.refine_tol {
            return Ok(fine);
        }
        coarse = fine;
    }
}

fn integrate_fixed<T, F>(
    field: &F,
    e_start: T,
    y0: T,
    e_end: T,
    n: usize,
    control: &StepControl<T>,
) -> Result<RkPath<T>>
where
    T: Scalar,
    F: Fn(T, T) -> T,
{
    let s0 = e_start.ln();
    let h = (e_end.ln() - s0) / T::count(n);
    let half = T::lit(0.5);
    let eval = |s: T, y: T| -> Result<T> {
        let e = s.exp();
        let v = field(e, y);
        if !v.is_finite() || v.abs() > control.blowup_guard {
            return Err(Error::FieldBlowup(format!("d(ln E)/de = {v} at e = {e}")));
        }
        Ok(v * e)
    };
    let mut e = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    e.push(e_start);
    ys.push(y0);
    let mut y = y0;
    for i in 0..n {
        let s = s0 + h * T::count(i);
        let k1 = eval(s, y)?;
        let k2 = eval(s + half * h, y + half * h * k1)?;
        let k3 = eval(s + half * h, y + half * h * k2)?;
        let k4 = eval(s + h, y + h * k3)?;
        y = y + h / T::lit(6.0) * (k1 + T::lit(2.0) * (k2 + k3) + k4);
        e.push(if i + 1 == n { e_end } else { (s + h).exp() });
        ys.push(y);
    }
    Ok(RkPath {
        e,
        ln_enstrophy: ys,
        steps: n,
    })
}
