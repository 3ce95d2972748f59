//! Ground states, mountain-pass states, the coupling threshold Λ, and the
//! perturbative bound state.

pub mod descent;
pub mod lambda;
pub mod mountain_pass;
pub mod newton;
pub mod perturbative;
pub mod scalar;

pub use descent::solve_ground;
pub use lambda::{compute_lambda, LambdaConfig, LambdaResult};
pub use mountain_pass::{solve_mountain_pass, MountainPassReport};
pub use perturbative::{solve_perturbative, PerturbativeReport};
pub use scalar::{semi_trivial_profile, solve_scalar_ground};

use crate::model::{Model, StatePair};
use crate::nehari;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop when `‖∇_𝒩 J‖ ≤ tol`.
    pub tol: f64,
    pub max_iters: usize,
    pub step_init: f64,
    pub backtrack: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Gradient norm below which Newton steps are tried.
    pub newton_gate: f64,
    /// Node count of the mountain-pass path.
    pub path_nodes: usize,
    /// Arc-length redistribution period of the path.
    pub reparametrize_every: usize,
    /// `‖u‖₁ < ratio · ‖v‖₂` flags the semi-trivial point.
    pub semi_trivial_ratio: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 20_000,
            step_init: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            newton_gate: 1e-3,
            path_nodes: 17,
            reparametrize_every: 25,
            semi_trivial_ratio: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub state: StatePair,
    pub energy: f64,
    /// `|G(state)|`.
    pub nehari_residual: f64,
    pub grad_norm: f64,
    pub multiplier: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub semi_trivial: bool,
}

impl SolveReport {
    pub(crate) fn at(model: &Model<'_>, state: StatePair, iterations: usize, trace: Vec<TraceEntry>, ratio: f64) -> Self {
        let cg = nehari::tangent_gradient(model, &state);
        let semi_trivial = is_semi_trivial(model, &state, ratio);
        Self {
            energy: model.energy(&state),
            nehari_residual: model.nehari(&state).abs(),
            grad_norm: cg.norm,
            multiplier: cg.multiplier,
            iterations,
            trace,
            semi_trivial,
            state,
        }
    }
}

pub fn is_semi_trivial(model: &Model<'_>, s: &StatePair, ratio: f64) -> bool {
    model.norm1_sq(&s.u).sqrt() < ratio * model.norm2_sq(&s.v).sqrt()
}

/// Tolerance for comparing energies of nearby states: a few units of roundoff
/// on the size of the terms that cancel in `J`.
pub(crate) fn energy_noise(model: &Model<'_>, s: &StatePair) -> f64 {
    let scale = model.norm_sq(s) + model.quartic(&s.u) + model.cubic(&s.v).abs();
    1e-13 * scale.max(1.0)
}

/// Symmetric part of both components (line grids only).
pub(crate) fn even(model: &Model<'_>, s: &StatePair) -> StatePair {
    let g = model.grid();
    StatePair::new(g.even_part(&s.u), g.even_part(&s.v))
}
