//! Rectangular Dirichlet-zero domains and their finite-difference discretization.
//!
//! Interior nodes of an axis with `count` nodes sit at `x_i = (i + 1) h`,
//! `h = length / (count + 1)`; boundary nodes are implicit and always zero.
//! Multi-axis node indices are flattened as `m = i + j * nx`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned box `(0, l_1) [x (0, l_2)]` with Dirichlet-zero boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RectDomain {
    dims: usize,
    lengths: [f64; 2],
}

impl RectDomain {
    pub fn new(lengths: &[f64]) -> Result<Self> {
        if lengths.is_empty() || lengths.len() > 2 {
            return Err(Error::InvalidDomain(format!(
                "only 1D and 2D rectangles are supported, got {} lengths",
                lengths.len()
            )));
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidDomain(format!("length {l} is not positive")));
        }
        let mut stored = [1.0; 2];
        stored[..lengths.len()].copy_from_slice(lengths);
        Ok(Self { dims: lengths.len(), lengths: stored })
    }

    pub fn interval(length: f64) -> Result<Self> {
        Self::new(&[length])
    }

    pub fn rectangle(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(&[alpha, beta])
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(&[side, side])
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths[..self.dims]
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Sum of the per-axis Poincaré constants of the centred cube with
    /// half-lengths `l_i / 2`; a lower bound for [`first_eigenvalue`].
    pub fn poincare_lower_bound(&self) -> f64 {
        let half: Vec<f64> = self.lengths().iter().map(|l| 0.5 * l).collect();
        poincare_cube_bound(&half).iter().sum()
    }
}

impl TryFrom<Vec<f64>> for RectDomain {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<RectDomain> for Vec<f64> {
    fn from(d: RectDomain) -> Self {
        d.lengths().to_vec()
    }
}

/// First eigenvalue of `-Δ` on the domain with Dirichlet-zero data:
/// `Σ (π / l_i)²`.
pub fn first_eigenvalue(domain: &RectDomain) -> f64 {
    domain.lengths().iter().map(|l| (PI / l).powi(2)).sum()
}

/// Constants `1 / l_i²` of the inequality `∫μ² ≤ l_i² ∫|∂μ/∂x_i|²` on the
/// cube `|x_i| < l_i`.
pub fn poincare_cube_bound(half_lengths: &[f64]) -> Vec<f64> {
    half_lengths.iter().map(|l| 1.0 / (l * l)).collect()
}

/// Uniform tensor grid over the interior of a [`RectDomain`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    domain: RectDomain,
    counts: [usize; 2],
    h: [f64; 2],
}

impl Grid {
    pub fn new(domain: RectDomain, counts: &[usize]) -> Result<Self> {
        if counts.len() != domain.dims() {
            return Err(Error::InvalidGrid(format!(
                "{} node counts given for a {}D domain",
                counts.len(),
                domain.dims()
            )));
        }
        if let Some(c) = counts.iter().find(|c| **c < 3) {
            return Err(Error::InvalidGrid(format!("need at least 3 interior nodes per axis, got {c}")));
        }
        let mut stored_counts = [1; 2];
        let mut h = [1.0; 2];
        for (axis, &count) in counts.iter().enumerate() {
            stored_counts[axis] = count;
            h[axis] = domain.lengths()[axis] / (count + 1) as f64;
        }
        Ok(Self { domain, counts: stored_counts, h })
    }

    /// Same interior node count on every axis.
    pub fn uniform(domain: RectDomain, count: usize) -> Result<Self> {
        Self::new(domain, &vec![count; domain.dims()])
    }

    pub fn domain(&self) -> &RectDomain {
        &self.domain
    }

    pub fn dims(&self) -> usize {
        self.domain.dims()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dims()]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.h[..self.dims()]
    }

    /// Largest spacing over the axes.
    pub fn h_max(&self) -> f64 {
        self.spacing().iter().copied().fold(0.0, f64::max)
    }

    /// Number of interior nodes.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of one interior node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.counts[0]
    }

    /// Coordinates of interior node `m` (unused trailing entries are zero).
    pub fn coords(&self, m: usize) -> [f64; 2] {
        let nx = self.counts[0];
        let (i, j) = (m % nx, m / nx);
        let x = (i + 1) as f64 * self.h[0];
        if self.dims() == 1 {
            [x, 0.0]
        } else {
            [x, (j + 1) as f64 * self.h[1]]
        }
    }

    /// Smallest eigenvalue of `-Δ_h`, known in closed form for the
    /// 3-/5-point stencil: `Σ (4 / h_i²) sin²(π h_i / (2 l_i))`.
    pub fn discrete_first_eigenvalue(&self) -> f64 {
        self.spacing()
            .iter()
            .zip(self.domain.lengths())
            .map(|(h, l)| 4.0 / (h * h) * (PI * h / (2.0 * l)).sin().powi(2))
            .sum()
    }

    /// `out = Δ_h u` with zero boundary values.
    pub fn apply_laplacian(&self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.len());
        assert_eq!(out.len(), self.len());
        let nx = self.counts[0];
        let ny = self.counts[1];
        let ix2 = 1.0 / (self.h[0] * self.h[0]);
        let iy2 = if self.dims() == 2 { 1.0 / (self.h[1] * self.h[1]) } else { 0.0 };
        for j in 0..ny {
            for i in 0..nx {
                let m = i + j * nx;
                let c = u[m];
                let w = if i > 0 { u[m - 1] } else { 0.0 };
                let e = if i + 1 < nx { u[m + 1] } else { 0.0 };
                let mut lap = (w - 2.0 * c + e) * ix2;
                if self.dims() == 2 {
                    let s = if j > 0 { u[m - nx] } else { 0.0 };
                    let n = if j + 1 < ny { u[m + nx] } else { 0.0 };
                    lap += (s - 2.0 * c + n) * iy2;
                }
                out[m] = lap;
            }
        }
    }

    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.apply_laplacian(u, &mut out);
        out
    }

    /// `½ ∫|∇u|²` with forward differences over every grid edge, including
    /// the edges touching the boundary. Its gradient is exactly `-Δ_h u`
    /// times the cell volume.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        let nx = self.counts[0];
        let ny = self.counts[1];
        let at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
                0.0
            } else {
                u[i as usize + j as usize * nx]
            }
        };
        let mut sum = 0.0;
        for j in 0..ny as isize {
            for i in -1..nx as isize {
                let d = (at(i + 1, j) - at(i, j)) / self.h[0];
                sum += d * d;
            }
        }
        if self.dims() == 2 {
            for i in 0..nx as isize {
                for j in -1..ny as isize {
                    let d = (at(i, j + 1) - at(i, j)) / self.h[1];
                    sum += d * d;
                }
            }
        }
        0.5 * sum * self.cell_volume()
    }
}

/// Common view over grid functions.
pub trait GridFunction {
    fn grid(&self) -> &Grid;
    fn values(&self) -> &[f64];
}

/// One value per interior node.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: *grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self { grid: *grid, values: vec![value; grid.len()] }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field value".into()));
        }
        Ok(Self { grid: *grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|m| f(grid.coords(m))).collect();
        Self { grid: *grid, values }
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }
}

impl GridFunction for ScalarField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `n` values per interior node, stored component-major:
/// `values[c * grid.len() + m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: &Grid, components: usize) -> Self {
        Self { grid: *grid, components, values: vec![0.0; grid.len() * components] }
    }

    pub fn from_values(grid: &Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        let expected = grid.len() * components;
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector field value".into()));
        }
        Ok(Self { grid: *grid, components, values })
    }

    pub fn from_components(parts: &[ScalarField]) -> Result<Self> {
        let grid = *parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("no components".into()))?
            .grid();
        let mut values = Vec::with_capacity(grid.len() * parts.len());
        for p in parts {
            if *p.grid() != grid {
                return Err(Error::GridMismatch);
            }
            values.extend_from_slice(p.values());
        }
        Ok(Self { grid, components: parts.len(), values })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.len();
        &mut self.values[c * n..(c + 1) * n]
    }

    pub fn component_field(&self, c: usize) -> ScalarField {
        ScalarField { grid: self.grid, values: self.component(c).to_vec() }
    }

    /// Copies the state at node `m` into `out`.
    pub fn gather(&self, m: usize, out: &mut [f64]) {
        let n = self.grid.len();
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.values[c * n + m];
        }
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl GridFunction for VectorField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Quadrature approximation of `∫_Ω a·b dx` (interior h-weighted sum).
pub fn l2_inner<F: GridFunction>(a: &F, b: &F) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    if a.values().len() != b.values().len() {
        return Err(Error::DimensionMismatch { expected: a.values().len(), found: b.values().len() });
    }
    Ok(weighted_dot(a.grid(), a.values(), b.values()))
}

pub fn l2_norm<F: GridFunction>(a: &F) -> f64 {
    weighted_dot(a.grid(), a.values(), a.values()).sqrt()
}

pub(crate) fn weighted_dot(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    grid.cell_volume() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// Product-of-sines Dirichlet eigenfunction with per-axis mode indices `k`,
/// normalized to unit discrete L² norm, together with its continuum
/// eigenvalue `Σ (k_i π / l_i)²`.
pub fn eigenfunction(grid: &Grid, k: &[usize]) -> Result<(ScalarField, f64)> {
    if k.len() != grid.dims() {
        return Err(Error::DimensionMismatch { expected: grid.dims(), found: k.len() });
    }
    if k.iter().any(|&ki| ki == 0) {
        return Err(Error::InvalidParameter("mode indices start at 1".into()));
    }
    let lengths = grid.domain().lengths().to_vec();
    let raw = ScalarField::from_fn(grid, |x| {
        k.iter()
            .zip(&lengths)
            .enumerate()
            .map(|(axis, (&ki, l))| (ki as f64 * PI * x[axis] / l).sin())
            .product()
    });
    let norm = l2_norm(&raw);
    let eigenvalue = k
        .iter()
        .zip(&lengths)
        .map(|(&ki, l)| (ki as f64 * PI / l).powi(2))
        .sum();
    Ok((raw.scaled(1.0 / norm), eigenvalue))
}

/// Banded Cholesky factorization of `cI - Δ_h`.
///
/// The bandwidth is `nx` in 2D and 1 in 1D; the factor is stored row-wise
/// with `band[i * (bw + 1) + (i - j)] = L[i][j]`.
#[derive(Clone, Debug)]
pub struct HelmholtzSolver {
    grid: Grid,
    shift: f64,
    bandwidth: usize,
    band: Vec<f64>,
}

impl HelmholtzSolver {
    pub fn new(grid: &Grid, shift: f64) -> Result<Self> {
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(Error::InvalidParameter(format!("Helmholtz shift must be >= 0, got {shift}")));
        }
        let n = grid.len();
        let nx = grid.counts[0];
        let bw = if grid.dims() == 2 { nx } else { 1 };
        let ix2 = 1.0 / (grid.h[0] * grid.h[0]);
        let iy2 = if grid.dims() == 2 { 1.0 / (grid.h[1] * grid.h[1]) } else { 0.0 };
        let width = bw + 1;
        let entry = |i: usize, j: usize| -> f64 {
            // lower triangle of cI - Δ_h, j <= i
            match i - j {
                0 => shift + 2.0 * ix2 + 2.0 * iy2,
                1 if i % nx != 0 => -ix2,
                d if d == nx && grid.dims() == 2 => -iy2,
                _ => 0.0,
            }
        };
        let mut band = vec![0.0; n * width];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = entry(i, j);
                for k in lo..j {
                    s -= band[i * width + (i - k)] * band[j * width + (j - k)];
                }
                if i == j {
                    debug_assert!(s > 0.0);
                    band[i * width] = s.sqrt();
                } else {
                    band[i * width + (i - j)] = s / band[j * width];
                }
            }
        }
        Ok(Self { grid: *grid, shift, bandwidth: bw, band })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.grid.len();
        assert_eq!(x.len(), n);
        let bw = self.bandwidth;
        let width = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.band[i * width + (i - k)] * x[k];
            }
            x[i] = s / self.band[i * width];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = x[i];
            for k in i + 1..=hi {
                s -= self.band[k * width + (k - i)] * x[k];
            }
            x[i] = s / self.band[i * width];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solves `(cI - Δ_h) u = rhs`.
pub fn helmholtz_solve(grid: &Grid, c: f64, rhs: &ScalarField) -> Result<ScalarField> {
    if rhs.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let solver = HelmholtzSolver::new(grid, c)?;
    Ok(ScalarField { grid: *grid, values: solver.solve(rhs.values()) })
}
