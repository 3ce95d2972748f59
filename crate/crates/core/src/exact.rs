//! Closed-form solitons, the traveling-wave parameter map, and the scalar
//! algebra behind the λ₂-largeness threshold.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grid::{Field, Order, RadialGrid};

/// `V(θ) = 3 / (2 cosh²(θ/2))`, the positive even solution of `V'' − V + V² = 0`.
pub fn soliton_v(theta: f64) -> f64 {
    1.5 / (0.5 * theta).cosh().powi(2)
}

/// `U₁(x) = √(2λ₁) / cosh(√λ₁ x)`, the positive solution of `−u'' + λ₁u = u³`.
pub fn soliton_u1(x: f64, lambda1: f64) -> f64 {
    (2.0 * lambda1).sqrt() / (lambda1.sqrt() * x).cosh()
}

/// Semi-trivial profile `V₂` at distance `x` from the origin.
///
/// For m = 1 this is `2λ₂ V(√λ₂ x)`; for m = 2 it is `λ₂ V(λ₂^{1/4} x)` with
/// `V` the numerically computed fourth-order ground state at λ = 1.
pub fn soliton_v2(x: f64, lambda2: f64, order: Order, base: Option<&BaseProfile>) -> Result<f64> {
    match order {
        Order::Laplacian => Ok(2.0 * lambda2 * soliton_v(lambda2.sqrt() * x)),
        Order::Bilaplacian => {
            let base = base.ok_or(Error::ProfileRequired)?;
            Ok(lambda2 * base.eval(lambda2.powf(0.25) * x.abs()))
        }
    }
}

/// `V₂` sampled on a line grid with Dirichlet ends (m = 1, N = 1).
pub fn v2_field(grid: &RadialGrid, lambda2: f64) -> Field {
    grid.sample_dirichlet(|x| 2.0 * lambda2 * soliton_v(lambda2.sqrt() * x))
}

/// `U₁` sampled on a line grid with Dirichlet ends.
pub fn u1_field(grid: &RadialGrid, lambda1: f64) -> Field {
    grid.sample_dirichlet(|x| soliton_u1(x, lambda1))
}

/// Frequency and speed of a standing–traveling wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub omega: f64,
    pub speed: f64,
}

/// `(λ₁, λ₂) = (ω + c²/4, c)`.
pub fn ansatz_params(w: WaveParams) -> Result<(f64, f64)> {
    let lambda1 = w.omega + 0.25 * w.speed * w.speed;
    let lambda2 = w.speed;
    if !(lambda1 > 0.0) || !(lambda2 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "wave (omega={}, c={}) gives lambda1={lambda1}, lambda2={lambda2}; both must be positive",
            w.omega, w.speed
        )));
    }
    Ok((lambda1, lambda2))
}

/// Positive root of `a t² + b t − c = 0` for `a, b ≥ 0`, `c > 0`.
fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    if a == 0.0 {
        return c / b;
    }
    // Written to avoid cancellation when b² ≫ 4ac.
    2.0 * c / (b + (b * b + 4.0 * a * c).sqrt())
}

fn diag_coefficients(lambda1: f64, lambda2: f64, beta: f64) -> (f64, f64, f64) {
    let a = 18.0 / 7.0 * lambda2;
    let b = 0.5 * (1.0 + 3.0 * beta);
    let c = 1.0 + 5.0 * (lambda1 - lambda2) / (12.0 * lambda2);
    (a, b, c)
}

fn check_lambdas(lambda1: f64, lambda2: f64) -> Result<()> {
    if !(lambda1 > 0.0) || !(lambda2 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "lambda1={lambda1}, lambda2={lambda2} must be positive"
        )));
    }
    Ok(())
}

/// Scaling `t` with `t (V₂, V₂)` on the Nehari manifold (m = 1, N = 1),
/// the positive root of `(18/7)λ₂t² + ½(1+3β)t − (1 + 5(λ₁−λ₂)/(12λ₂)) = 0`.
pub fn diag_nehari_t(lambda1: f64, lambda2: f64, beta: f64) -> Result<f64> {
    check_lambdas(lambda1, lambda2)?;
    let (a, b, c) = diag_coefficients(lambda1, lambda2, beta);
    if !(c > 0.0) {
        return Err(Error::NoPositiveScaling { constant: c });
    }
    if b < 0.0 {
        // Still a unique positive root since a > 0 and c > 0.
        let disc = (b * b + 4.0 * a * c).sqrt();
        return Ok((-b + disc) / (2.0 * a));
    }
    Ok(positive_root(a, b, c))
}

/// Left-hand side of `(18/7)λ₂t⁴ + t²(2 + 5(λ₁−λ₂)/(6λ₂)) − 1`; negative iff
/// the diagonal state beats the semi-trivial energy.
pub fn diag_energy_gap(lambda1: f64, lambda2: f64, beta: f64) -> Result<f64> {
    let t = diag_nehari_t(lambda1, lambda2, beta)?;
    let t2 = t * t;
    Ok(18.0 / 7.0 * lambda2 * t2 * t2 + t2 * (2.0 + 5.0 * (lambda1 - lambda2) / (6.0 * lambda2)) - 1.0)
}

/// Moments of the fourth-order base profile `V` (λ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMoments {
    /// `∫V²`
    pub square: f64,
    /// `∫|V|³`
    pub cube_abs: f64,
    /// `∫V³`
    pub cube: f64,
    /// `∫V⁴`
    pub fourth: f64,
}

impl ProfileMoments {
    pub fn of(grid: &RadialGrid, v: &Field) -> Self {
        Self {
            square: grid.integrate(&v.map(|x| x * x)),
            cube_abs: grid.integrate(&v.map(|x| x.abs().powi(3))),
            cube: grid.integrate(&v.map(|x| x.powi(3))),
            fourth: grid.integrate(&v.map(|x| x.powi(4))),
        }
    }

    /// `∫V₂ᵖ = λ₂^{p − N/4} ∫Vᵖ` for the rescaled profile in ℝᴺ.
    pub fn rescale_factor(p: f64, lambda2: f64, dimension: usize) -> f64 {
        lambda2.powf(p - dimension as f64 / 4.0)
    }

    /// Scaling `t` of `t (V₂, V₂)` on the fourth-order Nehari manifold, after
    /// dividing by `t² λ₂^{3 − N/4}`.
    pub fn diag_t(&self, lambda1: f64, lambda2: f64, beta: f64) -> Result<f64> {
        check_lambdas(lambda1, lambda2)?;
        let a = lambda2 * self.fourth;
        let b = 0.5 * (self.cube_abs + 3.0 * beta * self.cube);
        let c = self.cube_abs + (lambda1 - lambda2) / lambda2 * self.square;
        if !(c > 0.0) {
            return Err(Error::NoPositiveScaling { constant: c });
        }
        let disc = (b * b + 4.0 * a * c).sqrt();
        Ok(if b >= 0.0 { 2.0 * c / (b + disc) } else { (-b + disc) / (2.0 * a) })
    }

    /// `t²(∫|V|³ + (λ₁−λ₂)/λ₂ ∫V²) + ½ t⁴ λ₂ ∫V⁴ − ½ ∫|V|³`.
    pub fn energy_gap(&self, lambda1: f64, lambda2: f64, beta: f64) -> Result<f64> {
        let t = self.diag_t(lambda1, lambda2, beta)?;
        let t2 = t * t;
        Ok(t2 * (self.cube_abs + (lambda1 - lambda2) / lambda2 * self.square)
            + 0.5 * t2 * t2 * lambda2 * self.fourth
            - 0.5 * self.cube_abs)
    }
}

/// Which diagonal-test gap to bisect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapModel {
    /// Closed-form cosh moments (m = 1, N = 1).
    SecondOrder,
    /// Quadrature moments of the fourth-order base profile.
    FourthOrder(ProfileMoments),
}

impl GapModel {
    pub fn gap(&self, lambda1: f64, lambda2: f64, beta: f64) -> Result<f64> {
        match self {
            GapModel::SecondOrder => diag_energy_gap(lambda1, lambda2, beta),
            GapModel::FourthOrder(m) => m.energy_gap(lambda1, lambda2, beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub tol: f64,
    pub lower_factor: f64,
    pub upper_factor: f64,
    pub max_iters: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            lower_factor: 1e-3,
            upper_factor: 1e6,
            max_iters: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Midpoint of the final bracket.
    pub value: f64,
    /// Largest λ₂ seen with a positive gap.
    pub lo: f64,
    /// Smallest λ₂ seen with a negative gap.
    pub hi: f64,
    pub gap_lo: f64,
    pub gap_hi: f64,
}

/// Bisection for the λ₂ where the diagonal-test gap changes sign.
pub fn lambda2_threshold(lambda1: f64, beta: f64, model: GapModel, cfg: Bisection) -> Result<Threshold> {
    if !(lambda1 > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "threshold needs lambda1 > 0 and beta > 0, got {lambda1}, {beta}"
        )));
    }
    let mut lo = lambda1 * cfg.lower_factor;
    let mut hi = lambda1 * cfg.upper_factor;
    let mut gap_lo = model.gap(lambda1, lo, beta)?;
    let mut gap_hi = model.gap(lambda1, hi, beta)?;
    if !(gap_lo > 0.0 && gap_hi < 0.0) {
        return Err(Error::NoThreshold { lo, hi, gap_lo, gap_hi });
    }
    let mut iters = 0;
    while hi - lo > cfg.tol && iters < cfg.max_iters {
        // Geometric midpoints while the bracket spans decades.
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let g = model.gap(lambda1, mid, beta)?;
        if g > 0.0 {
            lo = mid;
            gap_lo = g;
        } else {
            hi = mid;
            gap_hi = g;
        }
        iters += 1;
    }
    Ok(Threshold {
        value: 0.5 * (lo + hi),
        lo,
        hi,
        gap_lo,
        gap_hi,
    })
}

/// Radial profile stored as values against distance from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseProfile {
    pub dimension: usize,
    pub distance: Vec<f64>,
    pub values: Vec<f64>,
}

impl BaseProfile {
    /// Keeps the nodes with `x ≥ 0` of a line grid, or all nodes of a radial grid.
    pub fn from_field(grid: &RadialGrid, f: &Field) -> Self {
        let mut distance = Vec::new();
        let mut values = Vec::new();
        for (i, &x) in grid.nodes().iter().enumerate() {
            if x >= 0.0 {
                distance.push(x);
                values.push(f[i]);
            }
        }
        Self {
            dimension: grid.dimension(),
            distance,
            values,
        }
    }

    /// Linear interpolation in the distance; zero beyond the last node.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        let d = &self.distance;
        if d.is_empty() || r > *d.last().unwrap() {
            return 0.0;
        }
        let k = d.partition_point(|&x| x <= r);
        if k == 0 {
            return self.values[0];
        }
        if k >= d.len() {
            return *self.values.last().unwrap();
        }
        let (x0, x1) = (d[k - 1], d[k]);
        let s = (r - x0) / (x1 - x0);
        self.values[k - 1] * (1.0 - s) + self.values[k] * s
    }

    /// `λ₂ V(λ₂^{1/4} |x|)` on every node of `grid`, Dirichlet ends zeroed.
    pub fn rescaled_on(&self, grid: &RadialGrid, lambda2: f64) -> Field {
        let k = lambda2.powf(0.25);
        grid.sample_dirichlet(|x| lambda2 * self.eval(k * x.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ProfileKey {
    dimension: usize,
    radius_bits: u64,
    points: usize,
}

type ProfileCache = Mutex<HashMap<ProfileKey, Arc<BaseProfile>>>;

static BASE_PROFILES: OnceLock<ProfileCache> = OnceLock::new();

/// Fourth-order ground profile at λ = 1 on the given grid geometry, computed
/// once per geometry and shared afterwards.
pub fn base_profile(dimension: usize, radius: f64, points: usize) -> Result<Arc<BaseProfile>> {
    let key = ProfileKey {
        dimension,
        radius_bits: radius.to_bits(),
        points,
    };
    let cache = BASE_PROFILES.get_or_init(|| Mutex::new(HashMap::new()));
    // The lock is held across the solve so each geometry is computed once.
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(p) = map.get(&key) {
        return Ok(Arc::clone(p));
    }
    let grid = RadialGrid::new(dimension, Order::Bilaplacian, radius, points)?;
    let v = crate::solvers::scalar::fourth_order_base(&grid)?;
    let profile = Arc::new(BaseProfile::from_field(&grid, &v));
    map.insert(key, Arc::clone(&profile));
    Ok(profile)
}
