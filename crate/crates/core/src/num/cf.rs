//! Continued-fraction convergents of a real number.

/// Returns the convergents p/q of `omega` with q ≤ `q_cap`, in order of
/// increasing q. The expansion stops early when a partial quotient exceeds
/// `1e12` (the remainder is numerically an integer, i.e. omega is rational).
pub fn convergents(omega: f64, q_cap: i64) -> Vec<(i64, i64)> {
    let mut result = Vec::new();
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (omega.floor() as i64, 1i64);
    result.push((p, q));
    let mut frac = omega - omega.floor();
    for _ in 0..64 {
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        if inv > 1e12 {
            break;
        }
        let a = inv.floor() as i64;
        frac = inv - inv.floor();
        let p_next = a * p + p_prev;
        let q_next = a * q + q_prev;
        if q_next > q_cap {
            break;
        }
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        result.push((p, q));
    }
    result
}

/// Greatest common divisor.
pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_gives_fibonacci() {
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let conv = convergents(phi, 100);
        let qs: Vec<i64> = conv.iter().map(|&(_, q)| q).collect();
        assert!(qs.ends_with(&[34, 55, 89]));
        for &(p, q) in &conv[2..] {
            assert!((p as f64 / q as f64 - phi).abs() < 1.0 / (q as f64 * q as f64));
        }
    }

    #[test]
    fn rational_terminates() {
        let conv = convergents(0.5, 1000);
        assert_eq!(*conv.last().unwrap(), (1, 2));
        let conv = convergents(3.0 / 7.0, 1000);
        assert_eq!(*conv.last().unwrap(), (3, 7));
    }

    #[test]
    fn gcd_works() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(7, 13), 1);
        assert_eq!(gcd(-4, 6), 2);
    }
}
