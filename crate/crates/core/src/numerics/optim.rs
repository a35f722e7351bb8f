use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Bracketed bisection. Stops when the bracket is narrower than `tol`
/// or an exact zero is hit.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for a local minimum on [lo, hi].
pub fn minimize_scalar<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // endpoints can win when the minimum sits on the boundary
    let (fl, fh) = (f(lo.min(hi)), f(lo.max(hi)));
    if fl < fx && fl <= fh {
        (lo.min(hi), fl)
    } else if fh < fx {
        (lo.max(hi), fh)
    } else {
        (x, fx)
    }
}

/// Grid scan with `npts` points followed by golden section around the best
/// grid point. Handles boundary minima and mild multimodality.
pub fn scan_minimize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, npts: usize, tol: f64) -> (f64, f64) {
    let npts = npts.max(3);
    let h = (hi - lo) / (npts - 1) as f64;
    let mut best = 0;
    let mut bestv = f64::INFINITY;
    for i in 0..npts {
        let v = f(lo + h * i as f64);
        if v < bestv {
            bestv = v;
            best = i;
        }
    }
    let a = lo + h * best.saturating_sub(1) as f64;
    let b = (lo + h * (best + 1) as f64).min(hi);
    let (x, fx) = minimize_scalar(&mut f, a, b, tol);
    if fx <= bestv {
        (x, fx)
    } else {
        (lo + h * best as f64, bestv)
    }
}
