//! Discrete Schwarz symmetrization and the rearrangement inequalities.
//!
//! Node values are sorted in decreasing order and laid out along the nodes
//! sorted by distance from the origin, matching cumulative measure. Each target
//! node takes the value found at the midpoint of its measure interval, so with
//! equal weights the map is a permutation of the values.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::grid::{Field, RadialGrid};

fn check_non_negative(f: &[f64]) -> Result<()> {
    match f.iter().position(|&x| !(x >= 0.0)) {
        Some(index) => Err(Error::NegativeInput { index, value: f[index] }),
        None => Ok(()),
    }
}

/// Order of indices by `key` ascending, ties by index.
fn order_by(key: impl Fn(usize) -> f64, n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    idx
}

/// Decreasing rearrangement of `values` carrying `weights`, laid out by
/// increasing `distances`.
pub fn decreasing_rearrangement(values: &[f64], weights: &[f64], distances: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if weights.len() != n || distances.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            got: weights.len().min(distances.len()),
        });
    }
    check_non_negative(values)?;
    let source = order_by(|i| -values[i], n);
    let target = order_by(|i| distances[i], n);
    let mut out = vec![0.0; n];
    let mut src = 0;
    let mut src_end = weights[source[0]];
    let mut tgt_start = 0.0;
    for &t in &target {
        let mid = tgt_start + 0.5 * weights[t];
        while src + 1 < n && src_end <= mid {
            src += 1;
            src_end += weights[source[src]];
        }
        out[t] = values[source[src]];
        tgt_start += weights[t];
    }
    Ok(out)
}

/// Radially non-increasing rearrangement `f*` of a non-negative field.
pub fn symmetrize(grid: &RadialGrid, f: &Field) -> Result<Field> {
    grid.check(f)?;
    check_non_negative(f)?;
    if let Some(i) = (0..grid.len()).find(|&i| grid.is_boundary(i) && f[i] != 0.0) {
        return Err(Error::InvalidParams(format!(
            "field is {} at boundary node {i}",
            f[i]
        )));
    }
    let distances: Vec<f64> = (0..grid.len()).map(|i| grid.distance(i)).collect();
    Ok(Field(decreasing_rearrangement(f, grid.weights(), &distances)?))
}

/// Level sets of a non-negative field: for each distinct value `κ`, the
/// measure `a(κ)` of `{f > κ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDecomposition {
    pub levels: Vec<(f64, f64)>,
}

impl LayerDecomposition {
    pub fn of(grid: &RadialGrid, f: &Field) -> Result<Self> {
        grid.check(f)?;
        check_non_negative(f)?;
        let mut pairs: Vec<(f64, f64)> = f.iter().zip(grid.weights()).map(|(&v, &w)| (v, w)).collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
        let mut levels = Vec::new();
        let mut above = 0.0;
        let mut i = 0;
        while i < pairs.len() {
            let kappa = pairs[i].0;
            let mut here = 0.0;
            while i < pairs.len() && pairs[i].0 == kappa {
                here += pairs[i].1;
                i += 1;
            }
            levels.push((kappa, above));
            above += here;
        }
        levels.reverse();
        if levels.first().map_or(true, |l| l.0 > 0.0) {
            levels.insert(0, (0.0, above));
        }
        Ok(Self { levels })
    }

    /// `a(κ)`, the measure of `{f > κ}`.
    pub fn measure_above(&self, kappa: f64) -> f64 {
        self.levels
            .iter()
            .find(|(k, _)| *k >= kappa)
            .map_or(0.0, |&(k, a)| {
                if k == kappa {
                    a
                } else {
                    // κ lies strictly between two recorded levels.
                    let below = self.levels.iter().rev().find(|(kk, _)| *kk < kappa);
                    below.map_or(a, |&(_, ab)| ab)
                }
            })
    }

    pub fn support_measure(&self) -> f64 {
        self.measure_above(0.0)
    }
}

fn lp_norm(grid: &RadialGrid, f: &Field, p: f64) -> f64 {
    grid.integrate(&f.map(|x| x.abs().powf(p))).powf(1.0 / p)
}

/// `|‖f‖_p − ‖f*‖_p|`.
pub fn check_equimeasurable(grid: &RadialGrid, f: &Field, fs: &Field, p: f64) -> f64 {
    (lp_norm(grid, f, p) - lp_norm(grid, fs, p)).abs()
}

/// `(∫fg, ∫f*g*)`.
pub fn check_hardy_littlewood(grid: &RadialGrid, f: &Field, g: &Field) -> Result<(f64, f64)> {
    let fs = symmetrize(grid, f)?;
    let gs = symmetrize(grid, g)?;
    Ok((grid.integrate_product(f, g), grid.integrate_product(&fs, &gs)))
}

/// `(∫|∇f|², ∫|∇f*|²)`.
pub fn check_polya_szego(grid: &RadialGrid, f: &Field) -> Result<(f64, f64)> {
    let fs = symmetrize(grid, f)?;
    Ok((grid.dirichlet_form(f, f), grid.dirichlet_form(&fs, &fs)))
}
