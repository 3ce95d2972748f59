//! Projected Sobolev-gradient descent on the Nehari manifold.

use super::newton::newton_direction;
use super::{energy_noise, even, SolveReport, SolverConfig, TraceEntry};
use crate::error::{Error, Result};
use crate::model::{Model, StatePair};
use crate::nehari::{self, ConstrainedGradient};

/// Minimizes `J` on the manifold starting from the projection of `init`.
///
/// Each step moves along `−∇_𝒩 J`, re-projects, and backtracks until the
/// Armijo test holds. Once the gradient is small, Newton corrections of the
/// unconstrained system are tried and kept only if they lower both the
/// energy (up to roundoff) and the gradient norm.
pub fn minimize(model: &Model<'_>, init: &StatePair, cfg: &SolverConfig) -> Result<SolveReport> {
    model.grid().check(&init.u)?;
    model.grid().check(&init.v)?;
    let mut s = nehari::project(model, &even(model, init))?.state;
    let mut energy = model.energy(&s);
    let mut cg = nehari::tangent_gradient(model, &s);
    let mut trace = vec![TraceEntry {
        iteration: 0,
        energy,
        grad_norm: cg.norm,
    }];
    let mut step = cfg.step_init;
    let mut newton_below = cfg.newton_gate;
    let mut it = 0;
    while cg.norm > cfg.tol {
        if it >= cfg.max_iters {
            return Err(Error::NonConvergence {
                iterations: it,
                grad_norm: cg.norm,
                reason: "iteration limit".into(),
            });
        }
        it += 1;
        let noise = energy_noise(model, &s);

        if cg.norm <= newton_below {
            if let Some((t, e, g)) = newton_trial(model, &s) {
                if e <= energy + noise && g.norm < cg.norm {
                    s = t;
                    energy = e;
                    cg = g;
                    trace.push(TraceEntry {
                        iteration: it,
                        energy,
                        grad_norm: cg.norm,
                    });
                    continue;
                }
            }
            newton_below = 0.1 * cg.norm;
        }

        let gn2 = cg.norm * cg.norm;
        let mut alpha = (2.0 * step).min(cfg.step_init);
        loop {
            let accepted = nehari::project(model, &even(model, &s.add_scaled(-alpha, &cg.gradient)))
                .ok()
                .map(|p| {
                    let e = model.energy(&p.state);
                    (p.state, e)
                })
                .filter(|(_, e)| e.is_finite() && *e <= energy - cfg.armijo * alpha * gn2 + noise);
            if let Some((t, e)) = accepted {
                s = t;
                energy = e;
                cg = nehari::tangent_gradient(model, &s);
                step = alpha;
                break;
            }
            alpha *= cfg.backtrack;
            if alpha < 1e-14 {
                return Err(Error::NonConvergence {
                    iterations: it,
                    grad_norm: cg.norm,
                    reason: "line search stalled".into(),
                });
            }
        }
        trace.push(TraceEntry {
            iteration: it,
            energy,
            grad_norm: cg.norm,
        });
    }

    // Prefer the non-negative representative when it is as good.
    let abs = s.abs();
    if abs != s {
        if let Ok(p) = nehari::project(model, &abs) {
            let g = nehari::tangent_gradient(model, &p.state);
            if model.energy(&p.state) <= energy + cfg.tol && g.norm <= cfg.tol {
                s = p.state;
            }
        }
    }
    Ok(SolveReport::at(model, s, it, trace, cfg.semi_trivial_ratio))
}

fn newton_trial(model: &Model<'_>, s: &StatePair) -> Option<(StatePair, f64, ConstrainedGradient)> {
    let d = newton_direction(model, s).ok()?;
    let t = nehari::project(model, &s.add_scaled(1.0, &d)).ok()?.state;
    let e = model.energy(&t);
    if !e.is_finite() {
        return None;
    }
    let g = nehari::tangent_gradient(model, &t);
    Some((t, e, g))
}

/// Coupled ground state: minimizer of `J` on the manifold from `init`.
///
/// Convergence to the semi-trivial point is reported through
/// `SolveReport::semi_trivial`.
pub fn solve_ground(model: &Model<'_>, init: &StatePair, cfg: &SolverConfig) -> Result<SolveReport> {
    if init.is_zero() {
        return Err(Error::ZeroState);
    }
    minimize(model, init, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::grid::{Field, Order, RadialGrid};
    use crate::model::ModelParams;

    fn line(n: usize) -> RadialGrid {
        RadialGrid::new(1, Order::Laplacian, 30.0, n).unwrap()
    }

    #[test]
    fn trace_is_monotone_and_converges() {
        let g = line(801);
        let p = ModelParams::new(Order::Laplacian, 1, 1.0, 1.0, 1.0).unwrap();
        let m = Model::new(&g, p).unwrap();
        let init = StatePair::new(
            g.sample_dirichlet(|x| (-x * x / 4.0).exp()),
            g.sample_dirichlet(|x| (-x * x / 4.0).exp()),
        );
        let r = solve_ground(&m, &init, &SolverConfig::default()).unwrap();
        assert!(r.grad_norm <= 1e-8);
        for w in r.trace.windows(2) {
            let noise = 1e-12 * w[0].energy.abs().max(1.0);
            assert!(w[1].energy <= w[0].energy + noise);
        }
        assert!(!r.semi_trivial);
        assert!(r.nehari_residual <= 1e-8 * m.norm_sq(&r.state));
        let on = m.energy_on_manifold(&r.state);
        assert!((on - r.energy).abs() < 1e-8);
        let v2 = StatePair::new(Field::zeros(&g), exact::v2_field(&g, 1.0));
        assert!(r.energy < m.energy(&v2) - 0.1);
    }

    #[test]
    fn zero_init_is_rejected() {
        let g = line(101);
        let p = ModelParams::new(Order::Laplacian, 1, 1.0, 1.0, 1.0).unwrap();
        let m = Model::new(&g, p).unwrap();
        assert!(matches!(
            solve_ground(&m, &StatePair::zeros(&g), &SolverConfig::default()),
            Err(Error::ZeroState)
        ));
    }

    #[test]
    fn weak_coupling_stays_semi_trivial() {
        let g = line(1201);
        let p = ModelParams::new(Order::Laplacian, 1, 1.0, 1.0, 0.1).unwrap();
        let m = Model::new(&g, p).unwrap();
        let init = StatePair::new(
            g.sample_dirichlet(|x| 1e-3 * (-x * x).exp()),
            exact::v2_field(&g, 1.0),
        );
        let r = solve_ground(&m, &init, &SolverConfig::default()).unwrap();
        assert!(r.semi_trivial);
        assert!((r.energy - 4.8).abs() < 1e-3);
    }

    #[test]
    fn decoupled_system_returns_the_solitons() {
        let g = line(1201);
        let p = ModelParams::new(Order::Laplacian, 1, 1.0, 1.0, 0.0).unwrap();
        let m = Model::new(&g, p).unwrap();
        let (u1, v2) = (exact::u1_field(&g, 1.0), exact::v2_field(&g, 1.0));
        // (U₁, V₂) is a saddle on the manifold: perturb along stable directions
        // only, i.e. orthogonally to each soliton in its own norm.
        let bump = g.sample_dirichlet(|x| 1e-4 * (-x * x).exp() * x.cos());
        let du = bump.add_scaled(-g.sobolev_inner(&bump, &u1, 1.0) / m.norm1_sq(&u1), &u1);
        let dv = bump.add_scaled(-g.sobolev_inner(&bump, &v2, 1.0) / m.norm2_sq(&v2), &v2);
        let init = StatePair::new(u1.add_scaled(1.0, &du), v2.add_scaled(1.0, &dv));
        let r = solve_ground(&m, &init, &SolverConfig::default()).unwrap();
        let h2 = g.spacing() * g.spacing();
        assert!(r.state.u.add_scaled(-1.0, &u1).max_abs() < 2.0 * h2);
        let dv = r.state.v.add_scaled(-1.0, &v2).max_abs();
        assert!(dv < 2.0 * h2, "{dv} {} {}", r.energy, r.grad_norm);
    }
}
