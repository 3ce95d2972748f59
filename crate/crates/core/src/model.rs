//! Energies, Nehari functional and their derivatives.
//!
//! Derivatives are returned as [`Covector`]s: strong-form residuals `r` such
//! that the linear functional acts as `ℓ[h] = Σᵢ wᵢ (r_u h₁ + r_v h₂)ᵢ`. The
//! metric gradient in the energy space is obtained from a covector with
//! [`Model::riesz`], which solves `((−Δ)^m + λⱼ) g = r` per component.

use crate::band::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::grid::{check_dimension, Field, Order, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub order: Order,
    pub dimension: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(order: Order, dimension: usize, lambda1: f64, lambda2: f64, beta: f64) -> Result<Self> {
        let p = Self {
            order,
            dimension,
            lambda1,
            lambda2,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_dimension(self.dimension, self.order)
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        if !(self.lambda1 > 0.0 && self.lambda1.is_finite()) {
            return Err(Error::InvalidParams(format!("lambda1 must be positive, got {}", self.lambda1)));
        }
        if !(self.lambda2 > 0.0 && self.lambda2.is_finite()) {
            return Err(Error::InvalidParams(format!("lambda2 must be positive, got {}", self.lambda2)));
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidParams("beta must be finite".into()));
        }
        Ok(())
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_lambda2(mut self, lambda2: f64) -> Self {
        self.lambda2 = lambda2;
        self
    }
}

/// A state `(u, v)` of the coupled system on one grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatePair {
    pub u: Field,
    pub v: Field,
}

impl StatePair {
    pub fn new(u: Field, v: Field) -> Self {
        assert_eq!(u.len(), v.len(), "components live on different grids");
        Self { u, v }
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self::new(Field::zeros(grid), Field::zeros(grid))
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::new(self.u.scaled(a), self.v.scaled(a))
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &StatePair) -> Self {
        Self::new(self.u.add_scaled(a, &other.u), self.v.add_scaled(a, &other.v))
    }

    pub fn abs(&self) -> Self {
        Self::new(self.u.map(f64::abs), self.v.map(f64::abs))
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs())
    }
}

/// Weighted dual representation of a linear functional on pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    pub ru: Field,
    pub rv: Field,
}

impl Covector {
    pub fn apply(&self, grid: &RadialGrid, h: &StatePair) -> f64 {
        grid.integrate_product(&self.ru, &h.u) + grid.integrate_product(&self.rv, &h.v)
    }

    pub fn is_zero(&self) -> bool {
        self.ru.is_zero() && self.rv.is_zero()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            ru: self.ru.scaled(a),
            rv: self.rv.scaled(a),
        }
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &Covector) -> Self {
        Self {
            ru: self.ru.add_scaled(a, &other.ru),
            rv: self.rv.add_scaled(a, &other.rv),
        }
    }
}

/// Pointwise Euler–Lagrange residuals of both equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub u: Field,
    pub v: Field,
}

impl Residual {
    pub fn max_u(&self) -> f64 {
        self.u.max_abs()
    }

    pub fn max_v(&self) -> f64 {
        self.v.max_abs()
    }

    pub fn max(&self) -> f64 {
        self.max_u().max(self.max_v())
    }
}

/// A parameter set bound to a grid, with the Riesz factorizations cached.
#[derive(Debug, Clone)]
pub struct Model<'g> {
    grid: &'g RadialGrid,
    params: ModelParams,
    matrix_u: BandMatrix,
    matrix_v: BandMatrix,
    riesz_u: BandLu,
    riesz_v: BandLu,
}

impl<'g> Model<'g> {
    pub fn new(grid: &'g RadialGrid, params: ModelParams) -> Result<Self> {
        params.validate()?;
        if grid.order() != params.order || grid.dimension() != params.dimension {
            return Err(Error::InvalidParams(format!(
                "grid is (N={}, m={}) but parameters ask for (N={}, m={})",
                grid.dimension(),
                grid.order().m(),
                params.dimension,
                params.order.m()
            )));
        }
        let matrix_u = grid.sobolev_matrix(params.lambda1);
        let matrix_v = grid.sobolev_matrix(params.lambda2);
        let riesz_u = matrix_u.clone().factor()?;
        let riesz_v = matrix_v.clone().factor()?;
        Ok(Self {
            grid,
            params,
            matrix_u,
            matrix_v,
            riesz_u,
            riesz_v,
        })
    }

    /// Same frequencies, different coupling; reuses the factorizations.
    pub fn with_beta(&self, beta: f64) -> Self {
        Self {
            params: self.params.with_beta(beta),
            ..self.clone()
        }
    }

    pub fn grid(&self) -> &'g RadialGrid {
        self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn order(&self) -> Order {
        self.params.order
    }

    pub fn beta(&self) -> f64 {
        self.params.beta
    }

    /// `‖u‖₁²` with λ₁.
    pub fn norm1_sq(&self, u: &Field) -> f64 {
        self.grid.sobolev_inner(u, u, self.params.lambda1)
    }

    /// `‖v‖₂²` with λ₂.
    pub fn norm2_sq(&self, v: &Field) -> f64 {
        self.grid.sobolev_inner(v, v, self.params.lambda2)
    }

    pub fn inner(&self, a: &StatePair, b: &StatePair) -> f64 {
        self.grid.sobolev_inner(&a.u, &b.u, self.params.lambda1)
            + self.grid.sobolev_inner(&a.v, &b.v, self.params.lambda2)
    }

    pub fn norm_sq(&self, s: &StatePair) -> f64 {
        self.norm1_sq(&s.u) + self.norm2_sq(&s.v)
    }

    pub fn norm(&self, s: &StatePair) -> f64 {
        self.norm_sq(s).sqrt()
    }

    pub fn quartic(&self, u: &Field) -> f64 {
        self.grid.integrate(&u.map(|x| x.powi(4)))
    }

    /// `∫v³` for m = 1, `∫|v|³` for m = 2.
    pub fn cubic(&self, v: &Field) -> f64 {
        match self.order() {
            Order::Laplacian => self.grid.integrate(&v.map(|x| x * x * x)),
            Order::Bilaplacian => self.grid.integrate(&v.map(|x| x.abs().powi(3))),
        }
    }

    /// `∫u²v`.
    pub fn coupling(&self, s: &StatePair) -> f64 {
        let g = self.grid;
        s.u.iter()
            .zip(s.v.iter())
            .zip(g.weights())
            .map(|((u, v), w)| u * u * v * w)
            .sum()
    }

    /// `v²` or `|v| v` — the derivative of the cubic density divided by 3.
    fn v_square(&self, x: f64) -> f64 {
        match self.order() {
            Order::Laplacian => x * x,
            Order::Bilaplacian => x.abs() * x,
        }
    }

    /// `v` or `|v|` — the second derivative of the cubic density divided by 6.
    fn v_linear(&self, x: f64) -> f64 {
        match self.order() {
            Order::Laplacian => x,
            Order::Bilaplacian => x.abs(),
        }
    }

    pub fn energy_i1(&self, u: &Field) -> f64 {
        0.5 * self.norm1_sq(u) - 0.25 * self.quartic(u)
    }

    pub fn energy_i2(&self, v: &Field) -> f64 {
        0.5 * self.norm2_sq(v) - self.cubic(v) / 6.0
    }

    pub fn energy(&self, s: &StatePair) -> f64 {
        self.energy_i1(&s.u) + self.energy_i2(&s.v) - 0.5 * self.beta() * self.coupling(s)
    }

    /// `G(s) = dJ(s)[s] = ‖s‖² − ∫u⁴ − ½∫v³ − (3/2)β∫u²v`.
    pub fn nehari(&self, s: &StatePair) -> f64 {
        self.norm_sq(s) - self.quartic(&s.u) - 0.5 * self.cubic(&s.v) - 1.5 * self.beta() * self.coupling(s)
    }

    /// The energy written for states on the Nehari manifold: `‖s‖²/6 + ∫u⁴/12`.
    pub fn energy_on_manifold(&self, s: &StatePair) -> f64 {
        self.norm_sq(s) / 6.0 + self.quartic(&s.u) / 12.0
    }

    fn linear_part(&self, s: &StatePair) -> (Field, Field) {
        let g = self.grid;
        let mut lu = g.apply_polylaplacian(&s.u);
        let mut lv = g.apply_polylaplacian(&s.v);
        for i in g.interior() {
            lu[i] += self.params.lambda1 * s.u[i];
            lv[i] += self.params.lambda2 * s.v[i];
        }
        (lu, lv)
    }

    pub fn differential(&self, s: &StatePair) -> Covector {
        let g = self.grid;
        let b = self.beta();
        let (mut ru, mut rv) = self.linear_part(s);
        for i in g.interior() {
            let (u, v) = (s.u[i], s.v[i]);
            ru[i] -= u * u * u + b * u * v;
            rv[i] -= 0.5 * self.v_square(v) + 0.5 * b * u * u;
        }
        Covector { ru, rv }
    }

    pub fn differential_nehari(&self, s: &StatePair) -> Covector {
        let g = self.grid;
        let b = self.beta();
        let (mut ru, mut rv) = self.linear_part(s);
        for i in g.interior() {
            let (u, v) = (s.u[i], s.v[i]);
            ru[i] = 2.0 * ru[i] - 4.0 * u * u * u - 3.0 * b * u * v;
            rv[i] = 2.0 * rv[i] - 1.5 * self.v_square(v) - 1.5 * b * u * u;
        }
        Covector { ru, rv }
    }

    /// `d²J(s)[h][k]`.
    pub fn second_variation(&self, s: &StatePair, h: &StatePair, k: &StatePair) -> f64 {
        let g = self.grid;
        let b = self.beta();
        let mut local = 0.0;
        for (i, w) in g.weights().iter().enumerate() {
            let (u, v) = (s.u[i], s.v[i]);
            let a = (3.0 * u * u + b * v) * h.u[i] * k.u[i]
                + self.v_linear(v) * h.v[i] * k.v[i]
                + b * u * (h.v[i] * k.u[i] + h.u[i] * k.v[i]);
            local += w * a;
        }
        self.inner(h, k) - local
    }

    /// Metric representative of a covector: the pair `g` with `⟨g, h⟩ = ℓ[h]`.
    pub fn riesz(&self, l: &Covector) -> StatePair {
        StatePair::new(
            solve_component(self.grid, &self.riesz_u, &l.ru),
            solve_component(self.grid, &self.riesz_v, &l.rv),
        )
    }

    /// Riesz map of the first component alone: solves `A₁ g = W r`.
    pub fn riesz_u(&self, r: &Field) -> Field {
        solve_component(self.grid, &self.riesz_u, r)
    }

    /// Weighted matrices of `⟨·,·⟩₁` and `⟨·,·⟩₂` on the interior unknowns.
    pub fn metric_matrices(&self) -> (&BandMatrix, &BandMatrix) {
        (&self.matrix_u, &self.matrix_v)
    }

    /// Dual norm `‖ℓ‖ = sqrt(ℓ[Riesz ℓ])`.
    pub fn dual_norm(&self, l: &Covector) -> f64 {
        l.apply(self.grid, &self.riesz(l)).max(0.0).sqrt()
    }

    pub fn strong_residual(&self, s: &StatePair) -> Residual {
        let d = self.differential(s);
        Residual { u: d.ru, v: d.rv }
    }

    /// Covector of `h ↦ ⟨w, h⟩`.
    pub fn inner_covector(&self, w: &StatePair) -> Covector {
        let (ru, rv) = self.linear_part(w);
        Covector { ru, rv }
    }
}

fn solve_component(grid: &RadialGrid, lu: &BandLu, r: &Field) -> Field {
    let range = grid.interior();
    let mut rhs: Vec<f64> = range.clone().map(|i| grid.weights()[i] * r[i]).collect();
    lu.solve_in_place(&mut rhs);
    let mut out = Field::zeros(grid);
    for (k, i) in range.enumerate() {
        out[i] = rhs[k];
    }
    out
}
