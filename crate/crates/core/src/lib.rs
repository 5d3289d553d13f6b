//! Convex billiard dynamics: exact boundary geometry, the billiard map, its
//! adapted (Lazutkin) coordinates, a time-periodic Hamiltonian suspension of
//! the resulting twist map, and Aubry–Mather variational diagnostics.

pub mod billiard;
pub mod boundary;
pub mod error;
pub mod genfn;
pub mod lazutkin;
pub mod num;
pub mod suspension;

/// Concrete scalar used by the domain layer. The low-level numeric kernels
/// are generic; everything above them instantiates at f64.
pub type Scalar = f64;

pub use billiard::{generating_h, orbit, reflect, BilliardState, ChordData};
pub use boundary::{build_curve, BoundaryCurve, RadiusProfile};
pub use error::{Error, Result};
pub use genfn::{GenJet, GeneratingFn, PureCubic};
pub use lazutkin::{
    build_chart, expansion_coeffs, from_lazutkin, lazutkin_map, tilde_h, to_lazutkin,
    verify_expansion_order, LazutkinChart, LazutkinState,
};
