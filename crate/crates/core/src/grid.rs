//! Radial (N ≥ 2) and symmetric-line (N = 1) discretizations.
//!
//! Every integral over ℝᴺ of a radial function becomes a weighted sum over the
//! nodes. The Laplacian is written in flux form,
//!
//! ```text
//! (Δf)_i = [c_{i+½} (f_{i+1} − f_i) − c_{i−½} (f_i − f_{i−1})] / w_i
//! ```
//!
//! with positive edge conductances `c` and the quadrature weights `w`, so that
//! `Σ w g (−Δf) = Σ c Dg Df` holds exactly for any `g` vanishing on the
//! boundary. The radial conductances are chosen so that `Δ r² = 2N` exactly;
//! at the origin this reproduces the ghost-node rule `Δu(0) = N u''(0)`.
//!
//! The outer boundary (both ends for N = 1) carries homogeneous Dirichlet data.
//! The fourth-order operator is the square of the discrete Laplacian, with the
//! intermediate `Δf` set to zero on the boundary.

use std::ops::{Deref, DerefMut, Range};

use crate::band::BandMatrix;
use crate::error::{Error, Result};

/// Order of the elliptic operator: `(−Δ)^m` with m = 1 or m = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// `−Δ`, the second-order system.
    Laplacian,
    /// `Δ²`, the fourth-order system.
    Bilaplacian,
}

impl Order {
    pub fn from_m(m: u32) -> Result<Self> {
        match m {
            1 => Ok(Order::Laplacian),
            2 => Ok(Order::Bilaplacian),
            _ => Err(Error::InvalidGrid(format!("operator order m={m} not in {{1, 2}}"))),
        }
    }

    /// Parses the PDE order (2 or 4) used on the command line.
    pub fn from_pde_order(k: u32) -> Result<Self> {
        match k {
            2 => Ok(Order::Laplacian),
            4 => Ok(Order::Bilaplacian),
            _ => Err(Error::InvalidGrid(format!("PDE order {k} not in {{2, 4}}"))),
        }
    }

    pub fn m(self) -> u32 {
        match self {
            Order::Laplacian => 1,
            Order::Bilaplacian => 2,
        }
    }

    pub fn max_dimension(self) -> usize {
        match self {
            Order::Laplacian => 3,
            Order::Bilaplacian => 7,
        }
    }
}

/// Checks the dimension/order combinations for which the energy is well defined.
pub fn check_dimension(dimension: usize, order: Order) -> Result<()> {
    if dimension == 0 {
        return Err(Error::InvalidGrid("dimension must be at least 1".into()));
    }
    if dimension > order.max_dimension() {
        let why = match order {
            Order::Laplacian => "the second-order system is only treated for N <= 3",
            Order::Bilaplacian => "the fourth-order energy is only well defined for N <= 7",
        };
        return Err(Error::InvalidGrid(format!(
            "dimension N={dimension} with m={}: {why}",
            order.m()
        )));
    }
    Ok(())
}

/// Volume of the unit ball in ℝᴺ.
pub fn unit_ball_volume(dimension: usize) -> f64 {
    // ω_N = 2π/N · ω_{N−2}, ω_0 = 1, ω_1 = 2
    let mut omega = if dimension % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if dimension % 2 == 0 { 0 } else { 1 };
    while k < dimension {
        k += 2;
        omega *= 2.0 * std::f64::consts::PI / k as f64;
    }
    omega
}

/// Surface area of the unit sphere in ℝᴺ (ω'_N = N ω_N).
pub fn unit_sphere_area(dimension: usize) -> f64 {
    dimension as f64 * unit_ball_volume(dimension)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dimension: usize,
    order: Order,
    radius: f64,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    conductance: Vec<f64>,
    interior: Range<usize>,
}

impl RadialGrid {
    pub fn new(dimension: usize, order: Order, radius: f64, points: usize) -> Result<Self> {
        check_dimension(dimension, order)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGrid(format!("radius must be positive, got {radius}")));
        }
        if points < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 points, got {points}")));
        }
        let n = points;
        if dimension == 1 {
            let h = 2.0 * radius / (n - 1) as f64;
            let centre = 0.5 * (n - 1) as f64;
            let nodes: Vec<f64> = (0..n).map(|i| (i as f64 - centre) * h).collect();
            let mut weights = vec![h; n];
            weights[0] = 0.5 * h;
            weights[n - 1] = 0.5 * h;
            Ok(Self {
                dimension,
                order,
                radius,
                spacing: h,
                nodes,
                weights,
                conductance: vec![1.0 / h; n - 1],
                interior: 1..n - 1,
            })
        } else {
            let h = radius / (n - 1) as f64;
            let nodes: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
            let area = unit_sphere_area(dimension);
            let mut weights: Vec<f64> = nodes
                .iter()
                .map(|&r| area * r.powi(dimension as i32 - 1) * h)
                .collect();
            // The trapezoid weight vanishes at r = 0; the origin gets the
            // volume of the ball of radius h/2 instead.
            weights[0] = unit_ball_volume(dimension) * (0.5 * h).powi(dimension as i32);
            weights[n - 1] *= 0.5;
            let mut conductance = Vec::with_capacity(n - 1);
            let mut enclosed = 0.0;
            for i in 0..n - 1 {
                enclosed += weights[i];
                let r_half = nodes[i] + 0.5 * h;
                conductance.push(dimension as f64 * enclosed / (r_half * h));
            }
            Ok(Self {
                dimension,
                order,
                radius,
                spacing: h,
                nodes,
                weights,
                conductance,
                interior: 0..n - 1,
            })
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Abscissae (N = 1) or radii (N ≥ 2).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Distance of node `i` from the origin.
    pub fn distance(&self, i: usize) -> f64 {
        self.nodes[i].abs()
    }

    /// Indices of the nodes that are not Dirichlet boundary nodes.
    pub fn interior(&self) -> Range<usize> {
        self.interior.clone()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        !self.interior.contains(&i)
    }

    /// Volume of the truncated domain: ω_N R^N.
    pub fn domain_volume(&self) -> f64 {
        unit_ball_volume(self.dimension) * self.radius.powi(self.dimension as i32)
    }

    /// Node obtained by reflecting through the origin (N = 1 only; identity otherwise).
    pub fn mirror(&self, i: usize) -> usize {
        if self.dimension == 1 {
            self.len() - 1 - i
        } else {
            i
        }
    }

    pub fn check(&self, f: &Field) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(())
    }

    /// Samples `f` at every node abscissa (N = 1) or radius, boundary included.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Field {
        Field(self.nodes.iter().map(|&x| f(x)).collect())
    }

    /// Samples `f` and zeroes the Dirichlet boundary nodes.
    pub fn sample_dirichlet(&self, f: impl Fn(f64) -> f64) -> Field {
        let mut out = self.sample(f);
        self.zero_boundary(&mut out);
        out
    }

    pub fn zero_boundary(&self, f: &mut Field) {
        for i in 0..self.len() {
            if self.is_boundary(i) {
                f[i] = 0.0;
            }
        }
    }

    /// Symmetric part `(f(x) + f(−x)) / 2` on the line; identity for radial grids.
    pub fn even_part(&self, f: &Field) -> Field {
        if self.dimension != 1 {
            return f.clone();
        }
        Field(
            (0..self.len())
                .map(|i| 0.5 * (f[i] + f[self.mirror(i)]))
                .collect(),
        )
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// `∫ f g dx`.
    pub fn integrate_product(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        debug_assert_eq!(g.len(), self.len());
        f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    /// Discrete Laplacian at interior nodes; zero on the boundary.
    pub fn laplacian(&self, f: &[f64]) -> Field {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in self.interior() {
            let mut flux = 0.0;
            if i + 1 < n {
                flux += self.conductance[i] * (f[i + 1] - f[i]);
            }
            if i > 0 {
                flux -= self.conductance[i - 1] * (f[i] - f[i - 1]);
            }
            out[i] = flux / self.weights[i];
        }
        Field(out)
    }

    /// `(−Δ)^m f` with m taken from the grid's order.
    pub fn apply_polylaplacian(&self, f: &[f64]) -> Field {
        let mut lap = self.laplacian(f);
        match self.order {
            Order::Laplacian => {
                lap.iter_mut().for_each(|x| *x = -*x);
                lap
            }
            Order::Bilaplacian => self.laplacian(&lap),
        }
    }

    /// `∫ ∇f · ∇g dx` in flux form.
    pub fn dirichlet_form(&self, f: &[f64], g: &[f64]) -> f64 {
        self.conductance
            .iter()
            .enumerate()
            .map(|(e, c)| c * (f[e + 1] - f[e]) * (g[e + 1] - g[e]))
            .sum()
    }

    /// `∫ Δf · Δg dx`.
    pub fn hessian_form(&self, f: &[f64], g: &[f64]) -> f64 {
        let lf = self.laplacian(f);
        let lg = if std::ptr::eq(f, g) { lf.clone() } else { self.laplacian(g) };
        self.integrate_product(&lf, &lg)
    }

    /// `⟨f, g⟩ = ∫ (D^m f · D^m g + λ f g) dx` for the grid's order.
    pub fn sobolev_inner(&self, f: &[f64], g: &[f64], lambda: f64) -> f64 {
        let top = match self.order {
            Order::Laplacian => self.dirichlet_form(f, g),
            Order::Bilaplacian => self.hessian_form(f, g),
        };
        top + lambda * self.integrate_product(f, g)
    }

    pub fn interior_weights(&self) -> Vec<f64> {
        self.weights[self.interior()].to_vec()
    }

    /// Stiffness matrix `K` on the interior unknowns: `K f = W (−Δ f)` for
    /// fields vanishing on the boundary.
    pub fn stiffness(&self) -> BandMatrix {
        let range = self.interior();
        let m = range.len();
        let off = range.start;
        let mut k = BandMatrix::zeros(m, 1, 1);
        for (e, &c) in self.conductance.iter().enumerate() {
            let (a, b) = (e, e + 1);
            let ia = range.contains(&a).then(|| a - off);
            let ib = range.contains(&b).then(|| b - off);
            if let Some(ia) = ia {
                k.add(ia, ia, c);
            }
            if let Some(ib) = ib {
                k.add(ib, ib, c);
            }
            if let (Some(ia), Some(ib)) = (ia, ib) {
                k.add(ia, ib, -c);
                k.add(ib, ia, -c);
            }
        }
        k
    }

    /// Matrix of the weighted form `(f, g) ↦ ⟨f, g⟩` on the interior unknowns,
    /// i.e. `W ((−Δ)^m + λ)`.
    pub fn sobolev_matrix(&self, lambda: f64) -> BandMatrix {
        let k = self.stiffness();
        let w = self.interior_weights();
        let mut a = match self.order {
            Order::Laplacian => k,
            Order::Bilaplacian => {
                let winv: Vec<f64> = w.iter().map(|x| 1.0 / x).collect();
                k.mul_diag_mul(&winv, &k)
            }
        };
        for (i, wi) in w.iter().enumerate() {
            a.add(i, i, lambda * wi);
        }
        a
    }
}

/// Real grid function, one value per node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Field(pub Vec<f64>);

impl Field {
    pub fn zeros(grid: &RadialGrid) -> Self {
        Field(vec![0.0; grid.len()])
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn scaled(&self, a: f64) -> Field {
        self.map(|x| a * x)
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: f64, other: &Field) -> Field {
        Field(self.0.iter().zip(&other.0).map(|(x, y)| x + a * y).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field(v)
    }
}
