//! Mountain-pass critical points by deforming a discrete path on the manifold.
//!
//! The path is a string of nodes joining two states. Interior nodes follow the
//! constrained gradient with its component along the path removed, and nodes
//! are redistributed by arc length from time to time. Once the string has
//! settled, the highest node climbs along the path direction and is finished
//! with Newton's method.

use super::newton::damped_newton;
use super::{energy_noise, even, SolveReport, SolverConfig, TraceEntry};
use crate::error::{Error, Result};
use crate::model::{Model, StatePair};
use crate::nehari::{self, DEFAULT_MANIFOLD_TOL, DEFAULT_RHO_MIN};

#[derive(Debug, Clone)]
pub struct MountainPassReport {
    pub report: SolveReport,
    /// Path maximum after each string iteration (non-increasing).
    pub path_max: Vec<f64>,
    /// Node energies of the final string.
    pub path_energies: Vec<f64>,
    /// Energies of the two endpoints.
    pub end_energies: (f64, f64),
}

/// Iteration budget of the string phase and of the climbing phase.
const STRING_ITERS: usize = 3000;
const CLIMB_ITERS: usize = 5000;

struct Path<'m, 'g> {
    model: &'m Model<'g>,
    nodes: Vec<StatePair>,
    energies: Vec<f64>,
}

impl<'m, 'g> Path<'m, 'g> {
    fn new(model: &'m Model<'g>, nodes: Vec<StatePair>) -> Self {
        let energies = nodes.iter().map(|s| model.energy(s)).collect();
        Self { model, nodes, energies }
    }

    fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, e) in self.energies.iter().enumerate() {
            if *e > self.energies[best] {
                best = k;
            }
        }
        best
    }

    fn max(&self) -> f64 {
        self.energies[self.argmax()]
    }

    fn noise(&self) -> f64 {
        self.nodes
            .iter()
            .map(|s| energy_noise(self.model, s))
            .fold(0.0, f64::max)
    }

    /// Unit path direction at interior node `k`: the central chord with its
    /// component along the manifold normal `normal` removed.
    fn tangent(&self, k: usize, normal: &StatePair) -> StatePair {
        let m = self.model;
        let d = self.nodes[k + 1].add_scaled(-1.0, &self.nodes[k - 1]);
        let nn = m.norm_sq(normal);
        let d = if nn > 0.0 { d.add_scaled(-m.inner(&d, normal) / nn, normal) } else { d };
        let n = m.norm(&d);
        if n > 0.0 {
            d.scaled(1.0 / n)
        } else {
            d
        }
    }

    /// Constrained gradients of the interior nodes with their component along
    /// the path removed.
    fn perpendicular_gradients(&self) -> Vec<StatePair> {
        let k_last = self.nodes.len() - 1;
        (1..k_last)
            .map(|k| {
                let cg = nehari::tangent_gradient(self.model, &self.nodes[k]);
                let t = self.tangent(k, &cg.nehari_gradient);
                let c = self.model.inner(&cg.gradient, &t);
                cg.gradient.add_scaled(-c, &t)
            })
            .collect()
    }

    /// Nodes at equal arc length along the current polygon.
    fn redistributed(&self) -> Option<Vec<StatePair>> {
        let k_last = self.nodes.len() - 1;
        let mut cum = vec![0.0];
        for k in 0..k_last {
            let d = self.model.norm(&self.nodes[k + 1].add_scaled(-1.0, &self.nodes[k]));
            cum.push(cum[k] + d);
        }
        let total = cum[k_last];
        if !(total > 0.0) {
            return None;
        }
        let mut out = vec![self.nodes[0].clone()];
        let mut seg = 0;
        for j in 1..k_last {
            let target = total * j as f64 / k_last as f64;
            while seg + 1 < k_last && cum[seg + 1] < target {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let theta = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
            let s = self.nodes[seg].scaled(1.0 - theta).add_scaled(theta, &self.nodes[seg + 1]);
            out.push(nehari::project(self.model, &s).ok()?.state);
        }
        out.push(self.nodes[k_last].clone());
        Some(out)
    }
}

fn on_manifold(model: &Model<'_>, s: &StatePair) -> Result<StatePair> {
    let check = nehari::manifold_check(model, s, DEFAULT_MANIFOLD_TOL, DEFAULT_RHO_MIN);
    if !check.on_manifold {
        return Err(Error::OffManifold {
            residual: check.nehari.abs(),
            tol: DEFAULT_MANIFOLD_TOL * check.norm_sq,
        });
    }
    Ok(nehari::project(model, &even(model, s))?.state)
}

pub fn solve_mountain_pass(
    model: &Model<'_>,
    end_a: &StatePair,
    end_b: &StatePair,
    cfg: &SolverConfig,
) -> Result<MountainPassReport> {
    let nodes = cfg.path_nodes;
    if nodes < 8 {
        return Err(Error::InvalidParams(format!("need at least 8 path nodes, got {nodes}")));
    }
    let a = on_manifold(model, end_a)?;
    let b = on_manifold(model, end_b)?;
    let span = model.norm(&a.add_scaled(-1.0, &b));
    if span <= 1e-10 * model.norm(&a).max(model.norm(&b)) {
        return Err(Error::NoPassGeometry("endpoints coincide".into()));
    }
    let k_last = nodes - 1;
    let mut init = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let tau = k as f64 / k_last as f64;
        let s = a.scaled(1.0 - tau).add_scaled(tau, &b);
        init.push(if k == 0 {
            a.clone()
        } else if k == k_last {
            b.clone()
        } else {
            nehari::project(model, &s)?.state
        });
    }
    let mut path = Path::new(model, init);
    let end_energies = (path.energies[0], path.energies[k_last]);
    let top_end = end_energies.0.max(end_energies.1);
    let no_pass = |path: &Path<'_, '_>| {
        let k = path.argmax();
        if k == 0 || k == k_last {
            Err(Error::NoPassGeometry(format!(
                "path maximum {:.6e} sits at endpoint {k}",
                path.energies[k]
            )))
        } else {
            Ok(())
        }
    };
    no_pass(&path)?;

    let mut path_max = vec![path.max()];
    let mut alpha = cfg.step_init;
    let string_tol = 10.0 * cfg.newton_gate;
    for it in 1..=STRING_ITERS {
        let km = path.argmax();
        let perp = path.perpendicular_gradients();
        if model.norm(&perp[km - 1]) <= string_tol {
            break;
        }
        let current = path.max();
        let noise = path.noise();
        let mut moved = false;
        while alpha >= 1e-10 {
            let mut trial = path.nodes.clone();
            let mut ok = true;
            for k in 1..k_last {
                match nehari::project(model, &even(model, &path.nodes[k].add_scaled(-alpha, &perp[k - 1]))) {
                    Ok(p) => trial[k] = p.state,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let cand = Path::new(model, trial);
                if cand.max() <= current + noise {
                    path = cand;
                    moved = true;
                    alpha = (2.0 * alpha).min(cfg.step_init);
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
        if it % cfg.reparametrize_every.max(1) == 0 {
            if let Some(r) = path.redistributed() {
                let cand = Path::new(model, r);
                if cand.max() <= path.max() + path.noise() {
                    path = cand;
                }
            }
        }
        no_pass(&path)?;
        path_max.push(path.max());
    }

    // Climbing phase on the highest node.
    let km = path.argmax();
    let mut s = path.nodes[km].clone();
    let mut cg = nehari::tangent_gradient(model, &s);
    let tangent = path.tangent(km, &cg.nehari_gradient);
    let mut beta_step = 0.5;
    let mut climbs = 0;
    while cg.norm > cfg.newton_gate && climbs < CLIMB_ITERS {
        climbs += 1;
        let c = model.inner(&cg.gradient, &tangent);
        let dir = cg.gradient.add_scaled(-2.0 * c, &tangent);
        let t = nehari::project(model, &even(model, &s.add_scaled(-beta_step, &dir)))?.state;
        let g = nehari::tangent_gradient(model, &t);
        if g.norm < 1.5 * cg.norm {
            s = t;
            cg = g;
        } else {
            beta_step *= 0.5;
            if beta_step < 1e-10 {
                break;
            }
        }
    }

    let polished = damped_newton(model, &s, 0.5 * cfg.tol, 50)
        .ok()
        .and_then(|o| nehari::project(model, &even(model, &o.state)).ok())
        .map(|p| p.state);
    let state = match polished {
        Some(p) => p,
        None => {
            return Err(Error::NonConvergence {
                iterations: path_max.len() + climbs,
                grad_norm: cg.norm,
                reason: "mountain-pass polish failed".into(),
            })
        }
    };
    let trace: Vec<TraceEntry> = path_max
        .iter()
        .enumerate()
        .map(|(i, &e)| TraceEntry {
            iteration: i,
            energy: e,
            grad_norm: f64::NAN,
        })
        .collect();
    let report = SolveReport::at(model, state, path_max.len() + climbs, trace, cfg.semi_trivial_ratio);
    if report.grad_norm > cfg.tol {
        return Err(Error::NonConvergence {
            iterations: report.iterations,
            grad_norm: report.grad_norm,
            reason: "mountain-pass point not critical".into(),
        });
    }
    let gap = report.energy - top_end;
    if !(gap > 1e-9 * top_end.abs().max(1.0)) {
        return Err(Error::NoPassGeometry(format!(
            "critical point at level {:.12e} does not exceed endpoint level {:.12e}",
            report.energy, top_end
        )));
    }
    Ok(MountainPassReport {
        report,
        path_max,
        path_energies: path.energies,
        end_energies,
    })
}
