//! Small numeric helpers: relative comparison and bracketed bisection.

/// Relative closeness with an absolute floor of 1, so values near zero are
/// compared absolutely.
pub(crate) fn close(a: f64, b: f64, rel_tol: f64) -> bool {
    (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
}

/// Relative deviation used by on-curve checks.
pub(crate) fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Bisection on a strictly decreasing function with a sign-changing bracket.
///
/// Runs until the bracket narrows to `rel_tol` relative width — or, when
/// `rel_tol` is 0, all the way down to adjacent floats — capped at
/// `max_iter` halvings.
pub(crate) fn bisect_decreasing<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // adjacent floats
        }
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if rel_tol > 0.0 && hi - lo <= rel_tol * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Grows a factor-2 bracket `[lo, hi]` around a root of a strictly
/// decreasing `f`, starting from `start > 0`. Returns `None` when the
/// search space of positive floats is exhausted. The tight bracket matters:
/// it keeps the bisection iteration count small enough to converge to
/// adjacent floats within the solver cap.
pub(crate) fn bracket_decreasing<F: Fn(f64) -> f64>(f: &F, start: f64) -> Option<(f64, f64)> {
    let mut guard = 0;
    if f(start) >= 0.0 {
        let mut lo = start;
        let mut hi = start * 2.0;
        while f(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 1100 || !hi.is_finite() {
                return None;
            }
        }
        Some((lo, hi))
    } else {
        let mut hi = start;
        let mut lo = start * 0.5;
        while f(lo) < 0.0 {
            hi = lo;
            lo *= 0.5;
            guard += 1;
            if guard > 1100 || lo <= f64::MIN_POSITIVE {
                return None;
            }
        }
        Some((lo, hi))
    }
}
