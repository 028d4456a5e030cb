//! Riemann-like integration over triangulations via cochains on the pair groupoid.
//!
//! A degree-`n` cochain is a real-valued function on `(n+1)`-tuples of points of
//! an embedded manifold. Summing a cochain over the oriented top simplices of a
//! triangulation yields a Riemann-like sum; refining the triangulation and taking
//! the limit integrates the differential-form data carried by the cochain. Closed
//! cochains (cocycles) are summed exactly by *any* triangulation, which is what
//! makes the fundamental theorem of calculus, Stokes' identity and Gauss–Bonnet
//! come out as finite combinatorial statements here.
//!
//! The crate is organized around that pipeline:
//!
//! - [`mesh`]: embedded oriented triangulations, refinement, boundaries.
//! - [`cochain`]: cochains, the symmetric-group action, the groupoid
//!   differential, trivialization, pullback, and a library of built-ins.
//! - [`vanest`]: extraction of differential-form data from cochains by mixed
//!   finite differences (the van Est map and the 1-D two-jet).
//! - [`integrate`]: Riemann-like sums, refinement studies with convergence
//!   reports, the relative (FTC) pairing, combinatorial Stokes, Euler
//!   characteristic, Riemann–Stieltjes sums and total variation.
//! - [`stochastic`]: Brownian paths from a counter-based generator, Itô /
//!   Stratonovich / arbitrary-representative two-jet integrals, and the
//!   Wiener (Feynman–Kac) lattice.
//! - [`curvature`]: Gauss–Bonnet via spherical excess and flat-disk turning.
//! - [`exprlang`]: a small closed-form expression language for user-supplied
//!   scalar functions.

pub mod cochain;
pub mod curvature;
pub mod exprlang;
pub mod integrate;
pub mod mesh;
pub(crate) mod numeric;
pub(crate) mod rng;
pub mod stochastic;
pub mod vanest;

pub use mesh::{ManifoldTag, MeshError, MeshKind, RefinementScheme, Triangulation};
