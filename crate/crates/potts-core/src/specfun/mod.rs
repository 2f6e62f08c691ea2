//! Special functions underpinning the elliptic boundary-value machinery:
//! Jacobi theta functions, complete elliptic integrals, Jacobi sn, and
//! Chebyshev functions of fractional order on the cut plane.
//!
//! All operations are pure; there is no shared mutable state.

pub mod chebyshev;
pub mod elliptic;
pub mod theta;

pub use chebyshev::{cheb_t, cheb_t_poly, cheb_u, cheb_u_poly, Branch, CutPlanePoint};
pub use elliptic::{elliptic_k, elliptic_kprime, jacobi_sn};
pub use theta::{theta, theta1_prime0, ModularParameter};
