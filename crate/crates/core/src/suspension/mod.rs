//! Time-periodic Hamiltonian suspension of the adapted twist map.
//!
//! The map is first frozen far from the diagonal (a smooth cutoff of its
//! generating function), conjugated by a momentum shear so a kinetic segment
//! can be split off, and then realized as the time-1 flow of a piecewise
//! Hamiltonian: free motion on the outer time segments and an interpolating
//! Lagrangian flow on the middle one. The kinks at the segment seams are
//! removed by time-mollification and a blend of mixed-variable generating
//! functions, yielding a smooth Hamiltonian whose time-1 flow still equals
//! the original map exactly.

mod hamiltonian;
mod lagrangian;
mod modified;
mod transition;
mod wgrid;

pub use hamiltonian::{
    flow, piecewise_hamiltonian, HamiltonianJet, SuspendedHamiltonian, KINETIC_COEFF,
};
pub use lagrangian::{
    lagrangian, legendre_hamiltonian, momentum, path_action, path_action_gradient, stiffness,
    InterpolatingLagrangian, TwistKernel,
};
pub use modified::{modified_map, shear, shear_inverse, KernelGrid, ModifiedGen};
pub use transition::{bump, cutoff_generating, mollifier, smoothstep, CutoffGen, SmoothStep};
pub use wgrid::{generating_w, GeneratingW, WGridSpec, WJet};

#[cfg(test)]
pub(crate) mod fixtures {
    use super::{piecewise_hamiltonian, SuspendedHamiltonian, SuspensionConfig};
    use crate::boundary::{build_curve, RadiusProfile};
    use crate::lazutkin::{build_chart, LazutkinChart};
    use once_cell::sync::Lazy;

    /// Suspension over a strictly convex cosine oval, shared across the test
    /// binary because the kernel sampling dominates its build cost.
    pub(crate) static OVAL: Lazy<(LazutkinChart, SuspendedHamiltonian)> = Lazy::new(|| {
        let curve = build_curve(&RadiusProfile::from_cos(&[1.0, 0.0, 0.3])).unwrap();
        let chart = build_chart(&curve).unwrap();
        let hat = piecewise_hamiltonian(&chart, &SuspensionConfig::default()).unwrap();
        (chart, hat)
    });
}

use crate::error::{Error, Result};

/// Parameters of the suspension construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuspensionConfig {
    /// Length of each outer kinetic time segment (also the shear strength).
    pub kappa: f64,
    /// Half-width of the time mollifier that smooths the seam at `kappa`.
    pub m_w: f64,
    /// Start of the blend window (mollified → original generating function).
    pub t1: f64,
    /// End of the blend window.
    pub t2: f64,
    /// Gap below which the generating function is left untouched by the
    /// far-from-diagonal cutoff (the cutoff completes at the square root of
    /// this value).
    pub cutoff_gap: f64,
    /// Momentum ceiling used by verification sweeps.
    pub l_max: f64,
    /// Local tolerance of the adaptive flow integrator.
    pub ode_tol: f64,
    /// Relative tolerance of the Lagrangian quadratures.
    pub quad_rel: f64,
    /// Position nodes of the remainder and premollification tables.
    pub res_x: usize,
    /// Momentum nodes (log-spaced) of the remainder and premollification tables.
    pub res_l: usize,
    /// Time nodes of the remainder and premollification tables.
    pub res_t: usize,
}

impl Default for SuspensionConfig {
    fn default() -> Self {
        Self {
            kappa: 0.15,
            m_w: 0.05,
            t1: 0.2,
            t2: 0.25,
            cutoff_gap: 0.05,
            l_max: 1e-3,
            ode_tol: 1e-11,
            quad_rel: 1e-10,
            res_x: 96,
            res_l: 64,
            res_t: 32,
        }
    }
}

impl SuspensionConfig {
    /// Checks the ordering and size constraints the construction relies on.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| {
            Err(Error::InvalidConfig {
                msg: msg.to_string(),
            })
        };
        if !(self.kappa > 0.0 && self.kappa < 0.2) {
            return fail("kappa must lie in (0, 1/5)");
        }
        if !(self.m_w > 0.0 && self.m_w < self.kappa) {
            return fail("mollifier width must lie in (0, kappa)");
        }
        if !(self.t1 >= self.kappa + self.m_w) {
            return fail("blend window must start after the mollified seam (t1 >= kappa + m_w)");
        }
        if !(self.t2 > self.t1 && self.t2 - self.t1 > self.kappa / 4.0) {
            return fail("blend window must be wider than kappa/4");
        }
        if !(self.t2 < 2.0 * self.kappa) {
            return fail("blend window must end before 2*kappa");
        }
        if !(self.cutoff_gap > 0.0 && self.cutoff_gap < 0.2) {
            return fail("cutoff gap must lie in (0, 0.2)");
        }
        if !(self.l_max > 0.0 && 2.0 * self.l_max <= self.cutoff_gap * self.cutoff_gap) {
            return fail("l_max must satisfy sqrt(2 l_max) <= cutoff_gap");
        }
        if !(self.ode_tol > 0.0 && self.quad_rel > 0.0) {
            return fail("tolerances must be positive");
        }
        if self.res_x < 8 || self.res_l < 8 || self.res_t < 6 {
            return fail("remainder tables need at least 8x8x6 nodes");
        }
        Ok(())
    }
}
