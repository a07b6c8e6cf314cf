//! Manifold reconstruction from point samples by minimizing the Delaunay
//! energy of simplicial chains.
//!
//! A sample `P` of a smooth `d`-manifold in `R^N` is turned into a candidate
//! complex (Rips, Čech or local Delaunay), and the weighted ℓ1 problem
//!
//! ```text
//! minimize  sum_sigma w(sigma) |gamma(sigma)|   subject to  ∂gamma = 0,  load(gamma) = 1
//! ```
//!
//! is solved as a linear program. Under the sampling conditions checked by
//! [`quality`], the support of the optimum is the [`delloc`] complex and
//! triangulates the manifold.

pub mod cli;
pub mod complex;
pub mod delloc;
pub mod error;
pub mod fmt;
pub mod geom;
pub mod manifold;
pub mod optimize;
pub mod perturb;
pub mod quality;
pub mod sparse;
pub mod tol;

pub use error::{ReconError, Result};
