//! Numerical laboratory for F-harmonic maps into round spheres.
//!
//! The crate builds desk-scale Riemannian domains with spectral quadrature,
//! evaluates maps into S^n together with their differentials, and implements
//! the F-energy, F-tension, and F stress-energy machinery needed to certify
//! that suitable F-harmonic maps are global maxima of their energy under the
//! conformal group of the target sphere.

pub mod error;
pub mod functionals;
pub mod la;
pub mod manifold;
pub mod map;
pub mod profile;
pub mod sphere;
pub mod variation;

pub use error::{Error, Result};
