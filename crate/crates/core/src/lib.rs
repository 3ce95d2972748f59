//! Ground states, bound states and coupling thresholds for the stationary
//! coupled nonlinear Schrödinger–Korteweg-de Vries systems
//!
//! ```text
//! (−Δ)^m u + λ₁ u = u³ + β u v
//! (−Δ)^m v + λ₂ v = ½ v² + ½ β u²        (m = 1; ½|v|v when m = 2)
//! ```
//!
//! computed by constrained minimization on the Nehari manifold of the energy
//! `J(u, v) = I₁(u) + I₂(v) − ½β ∫u²v`.

pub mod band;
pub mod error;
pub mod exact;
pub mod grid;
pub mod model;
pub mod nehari;
pub mod rearrange;
pub mod solvers;

pub use error::{Error, Result};
pub use grid::{Field, Order, RadialGrid};
pub use model::{Covector, Model, ModelParams, StatePair};
