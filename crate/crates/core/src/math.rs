//! Floating-point helpers that work without `std`, plus the monotone
//! bisection used throughout the crate.

/// `x^y`.
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `ln C(n, k)` through log-gamma.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Upper-tail probability of the standard normal, `P(Z > z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / core::f64::consts::SQRT_2)
}

/// Result of a monotone bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `f(x) - target` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Target lies outside `[f(lo), f(hi)]`.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("target {target} outside bracket [{f_lo}, {f_hi}]")]
pub struct NotBracketed {
    pub target: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Solves `f(x) = target` for a non-decreasing `f` on `[lo, hi]` until the
/// bracket is narrower than `width`. Targets within `slack` of an endpoint
/// value return that endpoint.
pub fn bisect_to_width<F>(
    mut f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    slack: f64,
    width: f64,
    max_iter: usize,
) -> Result<Root, NotBracketed>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo <= target + slack && target <= f_hi + slack) {
        return Err(NotBracketed { target, f_lo, f_hi });
    }
    if target <= f_lo {
        return Ok(Root { x: lo, residual: f_lo - target, iterations: 0 });
    }
    if target >= f_hi {
        return Ok(Root { x: hi, residual: f_hi - target, iterations: 0 });
    }
    let mut iterations = 0;
    while hi - lo > width && iterations < max_iter {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = f(mid) - target;
        if r == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, iterations });
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(Root { x, residual: f(x) - target, iterations })
}

/// Solves `f(x) = target` for a non-decreasing `f` on `[lo, hi]`.
///
/// Stops once `|f(x) - target| <= value_tol`, once the bracket collapses to
/// adjacent floats, or after `max_iter` halvings, whichever comes first.
pub fn bisect_increasing<F>(
    mut f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    value_tol: f64,
    max_iter: usize,
) -> Result<Root, NotBracketed>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo <= target + value_tol && target <= f_hi + value_tol) {
        return Err(NotBracketed { target, f_lo, f_hi });
    }
    if (f_lo - target).abs() <= value_tol {
        return Ok(Root { x: lo, residual: f_lo - target, iterations: 0 });
    }
    if (f_hi - target).abs() <= value_tol {
        return Ok(Root { x: hi, residual: f_hi - target, iterations: 0 });
    }
    let mut best = Root { x: lo, residual: f_lo - target, iterations: 0 };
    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        let r = fm - target;
        if r.abs() < best.residual.abs() {
            best = Root { x: mid, residual: r, iterations: it };
        }
        if r.abs() <= value_tol {
            return Ok(Root { x: mid, residual: r, iterations: it });
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        best.iterations = it;
    }
    Ok(best)
}
