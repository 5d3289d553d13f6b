//! Least-squares line fits, used for log-log order-of-convergence estimates.

use crate::error::{Error, Result};

/// Result of a linear fit y ≈ slope·x + intercept.
#[derive(Debug, Clone, Copy)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
    /// Number of points used.
    pub n_used: usize,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

/// Ordinary least squares on the given points.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> FitLine {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    FitLine {
        slope,
        intercept,
        n_used: xs.len(),
        rms_residual: rms,
    }
}

/// Log-log slope fit of (x, y) pairs, discarding points with y ≤ `floor`
/// (residuals that have hit the floating-point noise floor). Fails with
/// `FitUnstable` when fewer than 4 usable points remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64], floor: f64) -> Result<FitLine> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if y > floor && x > 0.0 {
            lx.push(x.ln());
            ly.push(y.ln());
        }
    }
    if lx.len() < 4 {
        return Err(Error::FitUnstable { usable: lx.len() });
    }
    Ok(linear_fit(&lx, &ly))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let xs: Vec<f64> = (1..10).map(|k| 2.0f64.powi(-k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(4.0)).collect();
        let fit = loglog_slope(&xs, &ys, 0.0).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-10);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn floor_filters_noise() {
        let xs = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let ys = [1e-3, 1e-6, 1e-9, 1e-16, 1e-16, 1e-16];
        let fit = loglog_slope(&xs, &ys, 1e-15);
        // Only 3 usable points above the floor.
        assert!(matches!(fit, Err(Error::FitUnstable { usable: 3 })));
    }

    #[test]
    fn straight_line_fit() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = linear_fit(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-14);
        assert!(fit.rms_residual < 1e-14);
    }
}
