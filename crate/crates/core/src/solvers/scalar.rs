//! Scalar ground states: minimizers of `I₂` on its Nehari manifold.
//!
//! These run the coupled engine with `u ≡ 0`; the first component then stays
//! zero because both `dJ` and `dG` vanish in that direction.

use super::descent::minimize;
use super::{SolveReport, SolverConfig};
use crate::error::Result;
use crate::exact;
use crate::grid::{Field, Order, RadialGrid};
use crate::model::{Model, ModelParams, StatePair};

/// Starting profile: the second-order soliton shape with the frequency scaling
/// of the operator order.
fn initial_guess(model: &Model<'_>) -> Field {
    let g = model.grid();
    let p = model.params();
    let l2 = p.lambda2;
    if p.order == Order::Laplacian && p.dimension == 1 {
        return exact::v2_field(g, l2);
    }
    let k = l2.powf(1.0 / (2.0 * p.order.m() as f64));
    g.sample_dirichlet(|x| 2.0 * l2 * exact::soliton_v(k * x))
}

/// Minimizer of `I₂` on its manifold, as a report with `u ≡ 0`.
pub fn solve_scalar_ground(model: &Model<'_>, init: Option<&Field>, cfg: &SolverConfig) -> Result<SolveReport> {
    let g = model.grid();
    let v = match init {
        Some(f) => {
            g.check(f)?;
            let mut f = f.clone();
            g.zero_boundary(&mut f);
            f
        }
        None => initial_guess(model),
    };
    minimize(model, &StatePair::new(Field::zeros(g), v), cfg)
}

/// The discrete semi-trivial profile `V₂` for the model's λ₂.
pub fn semi_trivial_profile(model: &Model<'_>, cfg: &SolverConfig) -> Result<Field> {
    Ok(solve_scalar_ground(model, None, cfg)?.state.v)
}

/// Fourth-order ground profile at λ = 1 on a bi-Laplacian grid.
pub fn fourth_order_base(grid: &RadialGrid) -> Result<Field> {
    let p = ModelParams::new(Order::Bilaplacian, grid.dimension(), 1.0, 1.0, 0.0)?;
    let m = Model::new(grid, p)?;
    semi_trivial_profile(&m, &SolverConfig::default())
}
