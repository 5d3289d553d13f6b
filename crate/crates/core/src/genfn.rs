//! Discrete generating functions of area-preserving twist maps on the lifted
//! annulus, exposed as full second-order jets, plus the generic twist solve
//! (x, l) ↦ (X, l⁺) defined by −∂₁h(x, X) = l, l⁺ = ∂₂h(x, X).

use crate::error::{Error, Result};
use crate::num::rootfind::{bracketed_newton, RootError};

/// Value and all partial derivatives up to second order at one point (x, X).
#[derive(Debug, Clone, Copy)]
pub struct GenJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

/// A twist-map generating function h(x, X) on x < X < x + width.
pub trait GeneratingFn {
    /// Full jet at (x, X).
    fn jet(&self, x: f64, xp: f64) -> Result<GenJet>;

    fn value(&self, x: f64, xp: f64) -> Result<f64> {
        Ok(self.jet(x, xp)?.value)
    }
    fn d1(&self, x: f64, xp: f64) -> Result<f64> {
        Ok(self.jet(x, xp)?.d1)
    }
    fn d2(&self, x: f64, xp: f64) -> Result<f64> {
        Ok(self.jet(x, xp)?.d2)
    }
    fn d11(&self, x: f64, xp: f64) -> Result<f64> {
        Ok(self.jet(x, xp)?.d11)
    }
    fn d12(&self, x: f64, xp: f64) -> Result<f64> {
        Ok(self.jet(x, xp)?.d12)
    }
    fn d22(&self, x: f64, xp: f64) -> Result<f64> {
        Ok(self.jet(x, xp)?.d22)
    }
}

impl<G: GeneratingFn + ?Sized> GeneratingFn for &G {
    fn jet(&self, x: f64, xp: f64) -> Result<GenJet> {
        (**self).jet(x, xp)
    }
}

/// The exactly integrable cubic kernel (X−x)³/6, generating the shear
/// (x, l) ↦ (x + √(2l), l).
#[derive(Debug, Clone, Copy, Default)]
pub struct PureCubic;

impl GeneratingFn for PureCubic {
    fn jet(&self, x: f64, xp: f64) -> Result<GenJet> {
        let d = xp - x;
        Ok(GenJet {
            value: d * d * d / 6.0,
            d1: -0.5 * d * d,
            d2: 0.5 * d * d,
            d11: d,
            d12: -d,
            d22: d,
        })
    }
}

/// Applies the twist map of `g`: solves −∂₁h(x, X) = l for the unique X > x
/// (monotone by the twist condition −∂₁₂h > 0) and returns (X, ∂₂h(x, X)).
/// `init_gap` seeds the bracket; `rel_tol` is the relative tolerance on l.
pub fn solve_twist<G: GeneratingFn + ?Sized>(
    g: &G,
    x: f64,
    l: f64,
    init_gap: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if !(l > 0.0) || !init_gap.is_finite() || init_gap <= 0.0 {
        return Err(Error::InversionFail { l });
    }
    let momentum = |gap: f64| -> Result<(f64, f64)> {
        let jet = g.jet(x, x + gap)?;
        // d/dgap of (−∂₁h − l) is −∂₁₂h > 0: monotone increasing.
        Ok((-jet.d1 - l, -jet.d12))
    };
    // Expand/contract a geometric bracket around the seed gap.
    let mut lo = init_gap;
    let mut flo = momentum(lo)?.0;
    let mut guard = 0;
    while flo > 0.0 {
        lo *= 0.5;
        flo = momentum(lo)?.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::InversionFail { l });
        }
    }
    let mut hi = lo.max(init_gap);
    let mut fhi = momentum(hi)?.0;
    guard = 0;
    while fhi < 0.0 {
        hi *= 2.0;
        fhi = momentum(hi)?.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::InversionFail { l });
        }
    }
    let mut status = Ok(());
    let wrapped = |gap: f64| -> (f64, f64) {
        match momentum(gap) {
            Ok(pair) => pair,
            Err(e) => {
                status = Err(e);
                (f64::NAN, f64::NAN)
            }
        }
    };
    let gap = bracketed_newton(wrapped, lo, hi, 0.0, rel_tol * l, 400).map_err(|e| match e {
        RootError::NoBracket => Error::InversionFail { l },
        RootError::NoConvergence => Error::NoConvergence {
            iters: 400,
            residual: f64::NAN,
        },
    });
    status?;
    let gap = gap?;
    let jet = g.jet(x, x + gap)?;
    Ok((x + gap, jet.d2))
}
