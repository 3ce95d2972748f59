//! Bound states bifurcating from the decoupled soliton pair under weak coupling.

use super::newton::damped_newton;
use super::{SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::exact;
use crate::grid::Order;
use crate::model::{Model, StatePair};

#[derive(Debug, Clone)]
pub struct PerturbativeReport {
    pub report: SolveReport,
    /// Coupling scale actually reached.
    pub epsilon: f64,
    /// Energy-norm distance to the discrete decoupled pair.
    pub distance: f64,
    /// The discrete decoupled pair `(U₁, V₂)` at β = 0.
    pub reference: StatePair,
    /// Max-norm strong residual of the returned state.
    pub residual: f64,
}

/// Continuation steps below `target / 2^MAX_HALVINGS` count as divergence.
const MAX_HALVINGS: u32 = 10;

/// Solves the system at coupling `ε·β̃` by damped Newton continued from the
/// decoupled pair, where `β̃` is the coupling stored in `model`.
pub fn solve_perturbative(model: &Model<'_>, epsilon: f64, cfg: &SolverConfig) -> Result<PerturbativeReport> {
    let p = model.params();
    if p.order != Order::Laplacian || p.dimension != 1 {
        return Err(Error::InvalidParams(
            "the perturbative solve needs the second-order system on the line".into(),
        ));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParams(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let g = model.grid();
    let beta_tilde = p.beta;
    let newton_iters = 50;
    let decoupled = model.with_beta(0.0);
    let guess = StatePair::new(exact::u1_field(g, p.lambda1), exact::v2_field(g, p.lambda2));
    let reference = damped_newton(&decoupled, &guess, cfg.tol, newton_iters)?.state;

    let mut state = reference.clone();
    let mut reached = 0.0;
    let mut step = epsilon;
    let min_step = epsilon / 2f64.powi(MAX_HALVINGS as i32);
    while reached < epsilon {
        let next = (reached + step).min(epsilon);
        let m = model.with_beta(next * beta_tilde);
        match damped_newton(&m, &state, cfg.tol, newton_iters) {
            Ok(out) => {
                state = out.state;
                reached = next;
            }
            Err(_) => {
                step *= 0.5;
                if step < min_step {
                    return Err(Error::NewtonDivergence { max_epsilon: reached });
                }
            }
        }
    }

    let m = model.with_beta(reached * beta_tilde);
    let distance = m.norm(&state.add_scaled(-1.0, &reference));
    let residual = m.strong_residual(&state).max();
    let report = SolveReport::at(&m, state, 0, Vec::new(), cfg.semi_trivial_ratio);
    Ok(PerturbativeReport {
        report,
        epsilon: reached,
        distance,
        reference,
        residual,
    })
}
