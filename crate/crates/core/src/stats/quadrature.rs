use crate::error::{Error, Result};

/// Default absolute tolerance for [`adaptive_quadrature`].
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-8;

const MAX_DEPTH: u32 = 48;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn eval(f: &impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { at: x })
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn refine(f: &impl Fn(f64) -> f64, p: Panel, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = Panel {
        a: p.a,
        b: m,
        fa: p.fa,
        fm: flm,
        fb: p.fm,
        whole: left,
    };
    let r = Panel {
        a: m,
        b: p.b,
        fa: p.fm,
        fm: frm,
        fb: p.fb,
        whole: right,
    };
    Ok(refine(f, l, 0.5 * tol, depth + 1)? + refine(f, r, 0.5 * tol, depth + 1)?)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_quadrature(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a >= b || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite with a < b, got [{a}, {b}]"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    // Seed with four panels so a symmetric integrand cannot fool the first test.
    let h = (b - a) / 4.0;
    let mut total = 0.0;
    for k in 0..4 {
        let lo = a + h * k as f64;
        let hi = if k == 3 { b } else { lo + h };
        let (fa, fm, fb) = (eval(&f, lo)?, eval(&f, 0.5 * (lo + hi))?, eval(&f, hi)?);
        let panel = Panel {
            a: lo,
            b: hi,
            fa,
            fm,
            fb,
            whole: simpson(lo, hi, fa, fm, fb),
        };
        total += refine(&f, panel, tol / 4.0, 0)?;
    }
    Ok(total)
}
