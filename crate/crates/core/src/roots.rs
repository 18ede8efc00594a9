//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Finds a root of `f` in `[a, b]` given a sign change between the ends.
///
/// Bisects until the bracket is narrower than `xtol`, then takes one secant
/// step on the final bracket (kept only if it lands inside it).
pub fn bisect_secant<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{a}, {b}]: f(a) = {fa:e}, f(b) = {fb:e}"
        )));
    }
    let mut iter = 0;
    while (b - a) > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        iter += 1;
        if iter > MAX_ITER {
            return Err(Error::Bracket(format!(
                "bisection did not reach width {xtol:e} on [{a}, {b}]"
            )));
        }
    }
    let secant = a - fa * (b - a) / (fb - fa);
    if secant.is_finite() && secant >= a && secant <= b {
        Ok(secant)
    } else {
        Ok(0.5 * (a + b))
    }
}
