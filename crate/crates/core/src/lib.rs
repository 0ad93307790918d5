//! Numerical verification of Heintze-Karcher type inequalities and Minkowski
//! identities for capillary surfaces in half-spaces and wedges.
//!
//! The crate builds capillary spherical caps (analytic and meshed), perturbs
//! them with boundary-flat bumps, estimates curvature, evaluates the deficit
//! functionals, and runs the sphere-foliation searches behind the sweepout
//! and elliptic-point arguments.

pub mod curvature;
pub mod foliation;
pub mod integrals;
pub mod quad;
pub mod surface;
pub mod verify;
pub mod wedge;
