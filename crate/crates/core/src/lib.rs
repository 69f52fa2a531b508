//! Free-boundary minimal hypersurfaces in the unit ball.
//!
//! * [`geom`]: pointwise geometry of parametric hypersurfaces.
//! * [`exact`]: exact free-boundary minimal surfaces and controls.
//! * [`verify`]: residual checks of the elliptic identities, boundary
//!   relations and integral equalities.
//! * [`mesh`]: discrete free-boundary area minimization for surfaces in R³.

// Index loops mirror the tensor notation; `!(a > b)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod exact;
pub mod geom;
pub mod jet;
pub mod mesh;
pub mod par;
pub mod verify;

pub use par::Exec;
