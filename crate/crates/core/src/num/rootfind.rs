//! Safeguarded scalar root finding: Newton steps confined to a sign-changing
//! bracket, with bisection whenever Newton misbehaves.

/// Outcome of a bracketed solve; callers map these onto domain errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootError {
    /// f(lo) and f(hi) do not straddle zero.
    NoBracket,
    /// Iteration budget exhausted before meeting the tolerances.
    NoConvergence,
}

/// Finds the root of `f` in `[lo, hi]`, where `f` returns `(value, derivative)`
/// and `f(lo)`, `f(hi)` have opposite signs (either orientation). Newton steps
/// are taken from the current best point and rejected in favor of bisection
/// when they leave the bracket or fail to shrink `|f|`. Terminates when the
/// bracket is narrower than `xtol` or `|f| <= ftol`.
pub fn bracketed_newton<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
    ftol: f64,
    max_iter: u32,
) -> Result<f64, RootError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (fa, _) = f(lo);
    if fa == 0.0 {
        return Ok(lo);
    }
    let (fb, _) = f(hi);
    if fb == 0.0 {
        return Ok(hi);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoBracket);
    }
    // Keep the invariant f(a) < 0 < f(b).
    let (mut a, mut b) = if fa < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (a + b);
    let mut best = (f64::INFINITY, x);
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx.abs() < best.0 {
            best = (fx.abs(), x);
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        // Honor the requested tolerance, but never demand resolution finer
        // than the float spacing at the bracket's magnitude.
        let floor = f64::EPSILON * a.abs().max(b.abs());
        if (b - a).abs() <= xtol.max(floor) {
            return Ok(0.5 * (a + b));
        }
        let newton = x - fx / dfx;
        let lo_b = a.min(b);
        let hi_b = a.max(b);
        let next = if dfx != 0.0 && newton > lo_b && newton < hi_b {
            newton
        } else {
            0.5 * (a + b)
        };
        // A step below the local float spacing cannot improve the iterate;
        // |f| has plateaued at its own rounding noise. Return the best seen.
        if next == a || next == b || (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
            return Ok(best.1);
        }
        x = next;
    }
    Err(RootError::NoConvergence)
}

/// Expands `hi` geometrically from `start` until `f(hi) >= target` (monotone
/// increasing `f`), returning the bracket `[0, hi]` endpoint. Fails after
/// `max_doublings`.
pub fn expand_bracket_upward<F>(
    mut f: F,
    start: f64,
    target: f64,
    max_doublings: u32,
) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut hi = start;
    for _ in 0..max_doublings {
        if f(hi) >= target {
            return Some(hi);
        }
        hi *= 2.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_root() {
        let root = bracketed_newton(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1e-15, 0.0, 100).unwrap();
        assert!((root - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn survives_bad_derivative() {
        // Zero derivative forces bisection fallback.
        let root = bracketed_newton(|x| (x.powi(3) - 0.5, 0.0), 0.0, 1.0, 1e-14, 0.0, 200).unwrap();
        assert!((root - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn reports_missing_bracket() {
        let res = bracketed_newton(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12, 0.0, 50);
        assert_eq!(res, Err(RootError::NoBracket));
    }

    #[test]
    fn bracket_expansion_reaches_target() {
        let hi = expand_bracket_upward(|x| x * x, 1e-3, 4.0, 60).unwrap();
        assert!(hi * hi >= 4.0);
    }
}
