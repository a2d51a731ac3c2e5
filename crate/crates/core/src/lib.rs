//! Casimir-Polder force between a small sphere and a freestanding graphene
//! sheet, in and out of thermal equilibrium.
//!
//! The graphene response is the Dirac-model polarization tensor at nonzero
//! temperature ([`graphene`]). The equilibrium-like part of the force is a
//! Matsubara sum ([`equilibrium`]); the nonequilibrium part is a real-frequency
//! double integral over evanescent waves weighted by the difference of
//! Bose-Einstein occupations ([`nonequilibrium`]). Attraction is negative.

pub mod equilibrium;
pub mod error;
pub mod graphene;
pub mod nonequilibrium;
pub mod quadrature;
pub mod units;

pub use error::{Error, Result};
