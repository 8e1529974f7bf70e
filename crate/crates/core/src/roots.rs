//! Bracketed scalar root finding.

use crate::error::{Result, SpectrumError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: u32,
}

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket is narrower than `x_tol + 4 eps |x|` or `f` hits zero.
pub fn brent<E>(
    mut f: impl FnMut(f64) -> std::result::Result<f64, E>,
    a: f64,
    b: f64,
    x_tol: f64,
    max_iter: u32,
) -> std::result::Result<Root, E>
where
    E: From<SpectrumError>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            fx: fa,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            fx: fb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(SpectrumError::BracketFailure(format!(
            "no sign change on [{a:e}, {b:e}]: f = {fa:e}, {fb:e}"
        ))
        .into());
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iteration in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root {
                x: b,
                fx: fb,
                iterations: iteration,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(SpectrumError::BracketFailure(format!(
        "no convergence after {max_iter} iterations near {b:e}"
    ))
    .into())
}

/// Walks a geometric grid `start, start*ratio, ...` (ratio < 1 walks down)
/// and returns the first adjacent pair across which `f` changes sign.
///
/// Points where `f` is not defined count as `fallback`.
pub fn scan_for_sign_change(
    mut f: impl FnMut(f64) -> Result<f64>,
    start: f64,
    ratio: f64,
    stop: f64,
    fallback: impl Fn(&SpectrumError) -> Option<f64>,
) -> Result<(f64, f64)> {
    let mut eval = |x: f64| -> Result<f64> {
        match f(x) {
            Ok(v) => Ok(v),
            Err(err) => fallback(&err).ok_or(err),
        }
    };
    let mut prev_x = start;
    let mut prev_f = eval(start)?;
    let descending = ratio < 1.0;
    loop {
        let x = prev_x * ratio;
        if (descending && x < stop) || (!descending && x > stop) {
            return Err(SpectrumError::BracketFailure(format!(
                "no sign change between {start:e} and {stop:e}"
            )));
        }
        let fx = eval(x)?;
        if fx == 0.0 || fx.signum() != prev_f.signum() {
            return Ok((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
}
