//! Piecewise-flat surfaces: euclidean triangulations with conical
//! singularities, their developing maps and SE(2) holonomy, scalar group
//! cohomology, and the classification of a marked singular-flat surface as
//! a point of 𝕋^{2g} × ℂP^{2g+n−3}.
//!
//! The main pipeline: parse or build a [`surface::SurfaceComplex`], develop
//! loops with [`develop`], extract the holonomy representation of a marking
//! and classify it with [`rep::classify_xi`]. Reference models (polyhedra,
//! flat tori, doubled polygons) live in [`builders`].

pub mod builders;
pub mod cohomology;
pub mod develop;
pub mod geom;
pub mod rep;
pub mod surface;

pub use geom::{Sim2, SE2};
pub use rep::{classify_xi, dm_condition, BetaVector, Marking, XiPoint};
pub use surface::SurfaceComplex;
