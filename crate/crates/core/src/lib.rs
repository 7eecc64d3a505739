//! Exact finite-lattice numerics for fermions on a chain: the CAR algebra in
//! the Jordan–Wigner representation, translation-invariant Hamiltonians,
//! Heisenberg dynamics, the tracial state as the vacuum of a doubled system,
//! gauge twists, and localization diagnostics.
//!
//! Everything is generic over the real scalar (`f64` or `f32`); the aliases
//! below fix `f64`.

pub mod car;
pub mod check;
pub mod config;
pub mod diagnostics;
pub mod doubled;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod scenario;
pub mod twist;

pub use error::{Error, Result};

pub type Operator = car::FockOperator<f64>;
pub type Operator32 = car::FockOperator<f32>;
pub type Hamiltonian = hamiltonian::HamiltonianSpec<f64>;
pub type Eigensystem = dynamics::EigenSystem<f64>;
pub type Doubled = doubled::DoubledSystem<f64>;
pub type Smearing = car::SmearingVector<f64>;
