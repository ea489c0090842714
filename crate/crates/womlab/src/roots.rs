//! Scalar bracketing helpers shared by the equilibrium solvers.

/// Bisects `f` on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// The caller guarantees `f(lo)` and `f(hi)` have opposite (weak) signs;
/// the returned point is the bracket midpoint.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut lo: f64, mut hi: f64, mut f: F, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    // 200 iterations cover any bracket down to a few ulps.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(argmax, max)` once the interval is narrower than `tol`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(mut a: f64, mut b: f64, f: F, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
