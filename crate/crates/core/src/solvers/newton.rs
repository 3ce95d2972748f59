//! Newton steps on the Euler–Lagrange system with the banded Hessian.
//!
//! Unknowns are interleaved `(u_i, v_i)` per interior node. On the line the
//! system is folded onto even grid functions, which removes the translation
//! mode of the Hessian.

use crate::band::BandMatrix;
use crate::error::{Error, Result};
use crate::grid::{Field, Order};
use crate::model::{Model, StatePair};

struct Layout {
    /// Reduced index of each interior node.
    reduced: Vec<usize>,
    size: usize,
}

fn layout(model: &Model<'_>) -> Layout {
    let g = model.grid();
    let range = g.interior();
    if g.dimension() == 1 {
        let n = g.len();
        let reduced: Vec<usize> = range.clone().map(|i| (n - 2) - i.max(n - 1 - i)).collect();
        Layout {
            reduced,
            size: (n - 1) / 2,
        }
    } else {
        Layout {
            reduced: (0..range.len()).collect(),
            size: range.len(),
        }
    }
}

/// Weighted Hessian `W d²J(s)` on the (folded) interior unknowns.
fn hessian(model: &Model<'_>, s: &StatePair, lay: &Layout) -> BandMatrix {
    let g = model.grid();
    let off = g.interior().start;
    let (au, av) = model.metric_matrices();
    let bw = match model.order() {
        Order::Laplacian => 1,
        Order::Bilaplacian => 2,
    };
    let half = 2 * bw + 1;
    let mut h = BandMatrix::zeros(2 * lay.size, half, half);
    for (comp, a) in [(0usize, au), (1usize, av)] {
        for (i, j, val) in a.entries() {
            if val != 0.0 {
                h.add(2 * lay.reduced[i] + comp, 2 * lay.reduced[j] + comp, val);
            }
        }
    }
    let beta = model.beta();
    for (k, &r) in lay.reduced.iter().enumerate() {
        let i = k + off;
        let w = g.weights()[i];
        let (u, v) = (s.u[i], s.v[i]);
        let v_lin = match model.order() {
            Order::Laplacian => v,
            Order::Bilaplacian => v.abs(),
        };
        h.add(2 * r, 2 * r, -w * (3.0 * u * u + beta * v));
        h.add(2 * r + 1, 2 * r + 1, -w * v_lin);
        h.add(2 * r, 2 * r + 1, -w * beta * u);
        h.add(2 * r + 1, 2 * r, -w * beta * u);
    }
    h
}

/// Newton correction `δ` with `d²J(s)[δ] = −dJ(s)`.
pub fn newton_direction(model: &Model<'_>, s: &StatePair) -> Result<StatePair> {
    let g = model.grid();
    let lay = layout(model);
    let off = g.interior().start;
    let d = model.differential(s);
    let mut rhs = vec![0.0; 2 * lay.size];
    for (k, &r) in lay.reduced.iter().enumerate() {
        let i = k + off;
        let w = g.weights()[i];
        rhs[2 * r] -= w * d.ru[i];
        rhs[2 * r + 1] -= w * d.rv[i];
    }
    let lu = hessian(model, s, &lay).factor()?;
    lu.solve_in_place(&mut rhs);
    let mut du = Field::zeros(g);
    let mut dv = Field::zeros(g);
    for (k, &r) in lay.reduced.iter().enumerate() {
        du[k + off] = rhs[2 * r];
        dv[k + off] = rhs[2 * r + 1];
    }
    Ok(StatePair::new(du, dv))
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub state: StatePair,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton for `dJ = 0`, using the dual norm of `dJ` as merit.
pub fn damped_newton(model: &Model<'_>, init: &StatePair, tol: f64, max_iters: usize) -> Result<NewtonOutcome> {
    let mut s = init.clone();
    let mut merit = model.dual_norm(&model.differential(&s));
    for it in 0..max_iters {
        if merit <= tol {
            return Ok(NewtonOutcome {
                state: s,
                residual: merit,
                iterations: it,
            });
        }
        let delta = newton_direction(model, &s)?;
        let mut alpha = 1.0;
        loop {
            let trial = s.add_scaled(alpha, &delta);
            let m = model.dual_norm(&model.differential(&trial));
            if m.is_finite() && m <= (1.0 - 1e-4 * alpha) * merit {
                s = trial;
                merit = m;
                break;
            }
            alpha *= 0.5;
            if alpha < 1.0 / 1024.0 {
                return Err(Error::NonConvergence {
                    iterations: it,
                    grad_norm: merit,
                    reason: "Newton line search failed".into(),
                });
            }
        }
    }
    if merit <= tol {
        return Ok(NewtonOutcome {
            state: s,
            residual: merit,
            iterations: max_iters,
        });
    }
    Err(Error::NonConvergence {
        iterations: max_iters,
        grad_norm: merit,
        reason: "Newton iteration limit".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::grid::RadialGrid;
    use crate::model::ModelParams;

    #[test]
    fn direction_solves_linearization() {
        // d²J(s)[δ][h] = −dJ(s)[h] for even test directions h.
        let g = RadialGrid::new(1, Order::Laplacian, 20.0, 401).unwrap();
        let p = ModelParams::new(Order::Laplacian, 1, 1.0, 1.5, 0.7).unwrap();
        let m = Model::new(&g, p).unwrap();
        let s = StatePair::new(
            g.sample_dirichlet(|x| 1.2 * (-x * x / 3.0).exp()),
            g.sample_dirichlet(|x| 2.0 * (-x * x / 5.0).exp()),
        );
        let d = newton_direction(&m, &s).unwrap();
        let dj = m.differential(&s);
        for c in [0.5, 1.0, 2.0] {
            let h = StatePair::new(
                g.sample_dirichlet(|x| (-c * x * x).exp()),
                g.sample_dirichlet(|x| x * x * (-c * x * x).exp()),
            );
            let lhs = m.second_variation(&s, &d, &h);
            let rhs = -dj.apply(&g, &h);
            assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn radial_direction_solves_linearization() {
        let g = RadialGrid::new(3, Order::Bilaplacian, 15.0, 301).unwrap();
        let p = ModelParams::new(Order::Bilaplacian, 3, 1.0, 1.0, 0.4).unwrap();
        let m = Model::new(&g, p).unwrap();
        let s = StatePair::new(
            g.sample_dirichlet(|r| (-r * r / 3.0).exp()),
            g.sample_dirichlet(|r| 1.5 * (-r * r / 4.0).exp()),
        );
        let d = newton_direction(&m, &s).unwrap();
        let dj = m.differential(&s);
        let h = StatePair::new(
            g.sample_dirichlet(|r| (-r * r).exp()),
            g.sample_dirichlet(|r| (1.0 + r) * (-r * r / 2.0).exp()),
        );
        let lhs = m.second_variation(&s, &d, &h);
        let rhs = -dj.apply(&g, &h);
        assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn newton_polishes_decoupled_solitons() {
        let g = RadialGrid::new(1, Order::Laplacian, 30.0, 1201).unwrap();
        let p = ModelParams::new(Order::Laplacian, 1, 1.0, 1.0, 0.0).unwrap();
        let m = Model::new(&g, p).unwrap();
        let s0 = StatePair::new(exact::u1_field(&g, 1.0), exact::v2_field(&g, 1.0));
        let out = damped_newton(&m, &s0, 1e-11, 20).unwrap();
        assert!(out.iterations <= 4);
        let h2 = g.spacing() * g.spacing();
        let diff = out.state.add_scaled(-1.0, &s0).max_abs();
        assert!(diff < h2, "{diff}");
    }
}
