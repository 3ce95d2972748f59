//! Nehari-manifold projection, constrained gradients, and the classification
//! of the semi-trivial point `(0, V₂)`.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::model::{Model, StatePair};
use crate::solvers::{self, lambda::LambdaResult};

/// Relative on-manifold tolerance: `|G(s)| ≤ tol · ‖s‖²`.
pub const DEFAULT_MANIFOLD_TOL: f64 = 1e-8;

/// Floor on `‖s‖²` that keeps the zero pair off the manifold.
pub const DEFAULT_RHO_MIN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub scaling: f64,
    pub state: StatePair,
    pub residual: f64,
}

/// Rescales `s` onto `{G = 0}` along its ray.
///
/// With `A = ‖s‖²`, `B = ∫u⁴` and `C = ½∫v³ + (3/2)β∫u²v` the scaling solves
/// `A = t²B + tC`.
pub fn project(model: &Model<'_>, s: &StatePair) -> Result<Projection> {
    let t = ray_scaling(model, s)?;
    let state = s.scaled(t);
    let residual = model.nehari(&state).abs();
    Ok(Projection {
        scaling: t,
        state,
        residual,
    })
}

/// The scaling of [`project`] without building the projected state.
pub fn ray_scaling(model: &Model<'_>, s: &StatePair) -> Result<f64> {
    let a = model.norm_sq(s);
    if !(a > 0.0) {
        return Err(Error::ZeroState);
    }
    let b = model.quartic(&s.u);
    let c = 0.5 * model.cubic(&s.v) + 1.5 * model.beta() * model.coupling(s);
    if b == 0.0 && !(c > 0.0) {
        return Err(Error::RayMissesManifold { cubic: c });
    }
    let disc = (c * c + 4.0 * a * b).sqrt();
    let t = if c >= 0.0 {
        2.0 * a / (c + disc)
    } else {
        (disc - c) / (2.0 * b)
    };
    Ok(t)
}

/// Metric gradients at a point and their tangential combination.
#[derive(Debug, Clone)]
pub struct ConstrainedGradient {
    /// `∇_𝒩 J = J' − λ G'`.
    pub gradient: StatePair,
    /// Lagrange multiplier `λ = ⟨J', G'⟩ / ‖G'‖²`.
    pub multiplier: f64,
    /// Riesz representative of `dJ`.
    pub energy_gradient: StatePair,
    /// Riesz representative of `dG`.
    pub nehari_gradient: StatePair,
    /// `‖∇_𝒩 J‖` in the energy norm.
    pub norm: f64,
}

/// Tangential gradient without the on-manifold check.
pub fn tangent_gradient(model: &Model<'_>, s: &StatePair) -> ConstrainedGradient {
    let dj = model.differential(s);
    let dg = model.differential_nehari(s);
    let jg = model.riesz(&dj);
    let gg = model.riesz(&dg);
    let grid = model.grid();
    let gg_sq = dg.apply(grid, &gg);
    let multiplier = if gg_sq > 0.0 { dj.apply(grid, &gg) / gg_sq } else { 0.0 };
    let gradient = jg.add_scaled(-multiplier, &gg);
    let norm = model.norm(&gradient);
    ConstrainedGradient {
        gradient,
        multiplier,
        energy_gradient: jg,
        nehari_gradient: gg,
        norm,
    }
}

/// `∇_𝒩 J(s)` and the multiplier, for `s` on the manifold within `tol`.
pub fn constrained_gradient(model: &Model<'_>, s: &StatePair, tol: f64) -> Result<ConstrainedGradient> {
    let norm_sq = model.norm_sq(s);
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroState);
    }
    let residual = model.nehari(s).abs();
    if residual > tol * norm_sq {
        return Err(Error::OffManifold {
            residual,
            tol: tol * norm_sq,
        });
    }
    Ok(tangent_gradient(model, s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldCheck {
    pub on_manifold: bool,
    pub nehari: f64,
    pub norm_sq: f64,
}

/// True iff `|G(s)| ≤ tol · max(‖s‖², ε)` and `‖s‖² > ρ_min`.
pub fn manifold_check(model: &Model<'_>, s: &StatePair, tol: f64, rho_min: f64) -> ManifoldCheck {
    let norm_sq = model.norm_sq(s);
    let nehari = model.nehari(s);
    let scale = norm_sq.max(f64::EPSILON);
    ManifoldCheck {
        on_manifold: nehari.abs() <= tol * scale && norm_sq > rho_min,
        nehari,
        norm_sq,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum V2Class {
    StrictLocalMin,
    Saddle,
}

impl V2Class {
    pub fn as_str(self) -> &'static str {
        match self {
            V2Class::StrictLocalMin => "strict_local_min",
            V2Class::Saddle => "saddle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub class: V2Class,
    pub lambda: LambdaResult,
    pub beta: f64,
    /// `d²J(v₂)[(φ, 0)]² = ‖φ‖₁² − β∫V₂φ²` for the Λ-minimizer φ, normalized by `‖φ‖₁²`.
    pub u_curvature: f64,
    /// `d²J(v₂)[(0, h)]²/‖h‖₂²` for a direction `h` tangent to 𝒩₂.
    pub v_curvature: f64,
    /// The semi-trivial profile used.
    pub v2: Field,
}

/// Classifies `(0, V₂)` as a strict local minimum (β < Λ) or a saddle (β > Λ)
/// of `J` on the manifold, and checks the verdict against sampled second
/// variations.
pub fn classify_v2(model: &Model<'_>, resolution: f64) -> Result<Classification> {
    let v2 = solvers::scalar::semi_trivial_profile(model, &solvers::SolverConfig::default())?;
    classify_with_profile(model, v2, resolution)
}

pub fn classify_with_profile(model: &Model<'_>, v2: Field, resolution: f64) -> Result<Classification> {
    let grid = model.grid();
    let lambda = solvers::lambda::compute_lambda(model, &v2, &solvers::lambda::LambdaConfig::default())?;
    let beta = model.beta();
    let res = resolution * lambda.value.abs().max(1.0);
    if (beta - lambda.value).abs() <= res {
        return Err(Error::Indeterminate {
            beta,
            lambda: lambda.value,
            resolution: res,
        });
    }
    let class = if beta < lambda.value {
        V2Class::StrictLocalMin
    } else {
        V2Class::Saddle
    };

    let v2_state = StatePair::new(Field::zeros(grid), v2.clone());
    let phi = StatePair::new(lambda.minimizer.clone(), Field::zeros(grid));
    let u_curvature = model.second_variation(&v2_state, &phi, &phi) / model.norm1_sq(&phi.u);

    // A tangent direction in v: a wider bump with its component along the
    // normal G'(v₂) removed.
    let normal = model.riesz(&model.differential_nehari(&v2_state));
    let width = 2.0 * grid.spacing() * grid.len() as f64 / 8.0;
    let bump = grid.sample_dirichlet(|x| (-(x / width).powi(2)).exp());
    let q = StatePair::new(Field::zeros(grid), bump);
    let coeff = model.inner(&q, &normal) / model.norm_sq(&normal);
    let h = q.add_scaled(-coeff, &normal);
    let h = StatePair::new(Field::zeros(grid), h.v);
    let v_curvature = model.second_variation(&v2_state, &h, &h) / model.norm_sq(&h);

    let sampled = if u_curvature > 0.0 {
        V2Class::StrictLocalMin
    } else {
        V2Class::Saddle
    };
    if sampled != class {
        return Err(Error::Indeterminate {
            beta,
            lambda: lambda.value,
            resolution: res,
        });
    }
    Ok(Classification {
        class,
        lambda,
        beta,
        u_curvature,
        v_curvature,
        v2,
    })
}
