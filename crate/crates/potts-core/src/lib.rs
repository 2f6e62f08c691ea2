//! Planar-limit machinery for the q-states Potts model on random planar maps:
//! disk partition functions W_(p), spectral densities, algebraic spectral
//! curves and critical behaviour, together with a generalized free-probability
//! engine for sums of correlated random matrices, an exact planar-diagram
//! series oracle, and a finite-N Monte Carlo sampler.

pub mod auxbvp;
pub mod critical;
pub mod curves;
pub mod error;
pub mod freeconv;
pub mod mc;
pub mod numerics;
pub mod oracle;
pub mod specfun;
pub mod wy;

pub use error::CoreError;
