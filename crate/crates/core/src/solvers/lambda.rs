//! The coupling threshold `Λ = inf ‖φ‖₁² / ∫V₂φ²`.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaConfig {
    /// Relative change of the Rayleigh quotient that ends the iteration.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaResult {
    pub value: f64,
    /// Minimizer normalized to `‖φ‖₁ = 1`, positive at its peak.
    pub minimizer: Field,
    pub iterations: usize,
}

/// Rayleigh quotient `‖φ‖₁² / ∫ weight·φ²`.
pub fn rayleigh_quotient(model: &Model<'_>, weight: &Field, phi: &Field) -> f64 {
    let g = model.grid();
    let den: f64 = (0..g.len()).map(|i| g.weights()[i] * weight[i] * phi[i] * phi[i]).sum();
    model.norm1_sq(phi) / den
}

/// Smallest eigenvalue of `A φ = Λ M φ` with `A` the `‖·‖₁²` form and `M`
/// multiplication by `weight`, by inverse iteration on `A⁻¹M`.
pub fn compute_lambda(model: &Model<'_>, weight: &Field, cfg: &LambdaConfig) -> Result<LambdaResult> {
    let g = model.grid();
    g.check(weight)?;
    if !weight.iter().any(|&w| w > 0.0) {
        return Err(Error::InvalidParams("threshold weight has no positive part".into()));
    }
    let mut phi = weight.map(|w| w.max(0.0));
    g.zero_boundary(&mut phi);
    let mut value = f64::INFINITY;
    for it in 1..=cfg.max_iters {
        let rhs = Field::from_values(weight.iter().zip(phi.iter()).map(|(w, p)| w * p).collect());
        let next = model.riesz_u(&rhs);
        let norm = model.norm1_sq(&next).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NonConvergence {
                iterations: it,
                grad_norm: norm,
                reason: "inverse iteration collapsed".into(),
            });
        }
        phi = next.scaled(1.0 / norm);
        let q = rayleigh_quotient(model, weight, &phi);
        if (q - value).abs() <= cfg.tol * q.abs() {
            return Ok(finish(q, phi, it));
        }
        value = q;
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iters,
        grad_norm: value,
        reason: "inverse iteration stagnated".into(),
    })
}

fn finish(value: f64, phi: Field, iterations: usize) -> LambdaResult {
    let peak = phi.iter().cloned().fold(0.0_f64, |a, b| if b.abs() > a.abs() { b } else { a });
    let minimizer = if peak < 0.0 { phi.scaled(-1.0) } else { phi };
    LambdaResult {
        value,
        minimizer,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::grid::{Order, RadialGrid};
    use crate::model::ModelParams;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn model_on(g: &RadialGrid, l1: f64, l2: f64) -> Model<'_> {
        let p = ModelParams::new(g.order(), g.dimension(), l1, l2, 0.0).unwrap();
        Model::new(g, p).unwrap()
    }

    /// Dense generalized eigenproblem through a Cholesky reduction.
    fn dense_lambda(model: &Model<'_>, weight: &Field) -> f64 {
        let g = model.grid();
        let range = g.interior();
        let n = range.len();
        let (a, _) = model.metric_matrices();
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for (i, j, v) in a.entries() {
            dense[(i, j)] += v;
        }
        let l = dense.cholesky().unwrap().l();
        let linv = l.try_inverse().unwrap();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (k, i) in range.enumerate() {
            m[(k, k)] = g.weights()[i] * weight[i];
        }
        let c = &linv * m * linv.transpose();
        let eig = SymmetricEigen::new(c);
        1.0 / eig.eigenvalues.max()
    }

    #[test]
    fn matches_dense_oracle() {
        let g = RadialGrid::new(1, Order::Laplacian, 20.0, 301).unwrap();
        let m = model_on(&g, 1.0, 1.0);
        let v2 = exact::v2_field(&g, 1.0);
        let got = compute_lambda(&m, &v2, &LambdaConfig::default()).unwrap();
        let want = dense_lambda(&m, &v2);
        assert!((got.value - want).abs() < 1e-10 * want, "{} vs {want}", got.value);
        let q = rayleigh_quotient(&m, &v2, &got.minimizer);
        assert!((q - got.value).abs() < 1e-10 * got.value);
    }

    #[test]
    fn fourth_order_matches_dense_oracle() {
        let g = RadialGrid::new(2, Order::Bilaplacian, 12.0, 121).unwrap();
        let m = model_on(&g, 1.3, 1.0);
        let w = g.sample_dirichlet(|r| 2.0 * (-r * r / 3.0).exp());
        let got = compute_lambda(&m, &w, &LambdaConfig::default()).unwrap();
        let want = dense_lambda(&m, &w);
        assert!((got.value - want).abs() < 1e-9 * want);
    }

    #[test]
    fn closed_form_on_the_line() {
        // Λ = (2a + √a)/6 with a = λ₁/λ₂.
        let g = RadialGrid::new(1, Order::Laplacian, 40.0, 4001).unwrap();
        for (l1, l2) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
            let m = model_on(&g, l1, l2);
            let v2 = exact::v2_field(&g, l2);
            let got = compute_lambda(&m, &v2, &LambdaConfig::default()).unwrap().value;
            let a: f64 = l1 / l2;
            let want = (2.0 * a + a.sqrt()) / 6.0;
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn doubling_the_weight_halves_lambda() {
        let g = RadialGrid::new(1, Order::Laplacian, 20.0, 401).unwrap();
        let m = model_on(&g, 1.0, 1.0);
        let v2 = exact::v2_field(&g, 1.0);
        let a = compute_lambda(&m, &v2, &LambdaConfig::default()).unwrap().value;
        let b = compute_lambda(&m, &v2.scaled(2.0), &LambdaConfig::default()).unwrap().value;
        assert!((a - 2.0 * b).abs() < 1e-12 * a);
    }

    #[test]
    fn rejects_non_positive_weight() {
        let g = RadialGrid::new(1, Order::Laplacian, 20.0, 101).unwrap();
        let m = model_on(&g, 1.0, 1.0);
        let w = g.sample_dirichlet(|x| -(-x * x).exp());
        assert!(compute_lambda(&m, &w, &LambdaConfig::default()).is_err());
    }
}
