//! Periodic-box lattices and the discrete counterparts of the gradient,
//! curl-matrix and divergence operators.
//!
//! The box `[lo_a, hi_a)` with `N_a` points per axis (power of two, at
//! least 8) is treated as a flat torus: the upper face is identified with
//! the lower one and is not on the lattice. Two derivative schemes are
//! provided; `Spectral` differentiates by Fourier multipliers and is exact
//! for band-limited fields, `Central2` is the second-order centered stencil
//! with wraparound, used to cross-check scheme sensitivity.
//!
//! Spectral first derivatives zero the Nyquist bin (an odd derivative of
//! the Nyquist mode is not representable on the grid), and every spectral
//! operator here uses the same convention, so exactness of operator
//! identities like `d2 . d1 = 0` does not depend on band-limiting.
//!
//! Quadrature is uniform-weight (`prod h_a` per node), which on the torus
//! is exact for trigonometric polynomials below the Nyquist limit.

pub mod io;

mod spectral;

pub(crate) use spectral::{fft_forward, fft_inverse, kappa};

use thiserror::Error;

use crate::expr::bump;

/// Hard cap on lattice sizes accepted by [`BoxGrid::new`].
pub const DEFAULT_POINT_CAP: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Spectral,
    Central2,
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("axis {axis} resolution {n} must be a power of two >= 8")]
    BadResolution { axis: usize, n: usize },
    #[error("axis {axis} bounds are empty or not finite")]
    BadBounds { axis: usize },
    #[error("bounds ({bounds}) and shape ({shape}) have different dimensions")]
    DimMismatch { bounds: usize, shape: usize },
    #[error("lattice would have {total} points, above the cap {cap}")]
    TooManyPoints { total: usize, cap: usize },
    #[error("operands live on different grids")]
    GridMismatch,
}

/// An n-dimensional periodic box lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGrid {
    bounds: Vec<(f64, f64)>,
    shape: Vec<usize>,
    strides: Vec<usize>,
}

impl BoxGrid {
    pub fn new(bounds: Vec<(f64, f64)>, shape: Vec<usize>) -> Result<Self, GridError> {
        Self::with_cap(bounds, shape, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(
        bounds: Vec<(f64, f64)>,
        shape: Vec<usize>,
        cap: usize,
    ) -> Result<Self, GridError> {
        if bounds.len() != shape.len() {
            return Err(GridError::DimMismatch {
                bounds: bounds.len(),
                shape: shape.len(),
            });
        }
        let mut total: usize = 1;
        for (axis, (&(lo, hi), &n)) in bounds.iter().zip(&shape).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GridError::BadBounds { axis });
            }
            if !n.is_power_of_two() || n < 8 {
                return Err(GridError::BadResolution { axis, n });
            }
            total = total
                .checked_mul(n)
                .ok_or(GridError::TooManyPoints { total: usize::MAX, cap })?;
        }
        if total > cap {
            return Err(GridError::TooManyPoints { total, cap });
        }
        let mut strides = vec![1usize; shape.len()];
        for a in (0..shape.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        Ok(BoxGrid {
            bounds,
            shape,
            strides,
        })
    }

    /// Cubic helper: `[lo, hi)^dim` with `n` points per axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, n: usize) -> Result<Self, GridError> {
        BoxGrid::new(vec![(lo, hi); dim], vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        (hi - lo) / self.shape[axis] as f64
    }

    pub fn axis_length(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        hi - lo
    }

    /// Quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Coordinates of the node with the given row-major flat index.
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        let mut rem = flat;
        for a in 0..self.dim() {
            let idx = rem / self.strides[a];
            rem %= self.strides[a];
            out[a] = self.bounds[a].0 + idx as f64 * self.spacing(a);
        }
    }
}

/// Scalar samples on a lattice, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScalar {
    grid: BoxGrid,
    values: Vec<f64>,
}

impl GridScalar {
    pub fn new(grid: BoxGrid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len());
        GridScalar { grid, values }
    }

    pub fn zeros(grid: BoxGrid) -> Self {
        let len = grid.len();
        GridScalar {
            grid,
            values: vec![0.0; len],
        }
    }

    pub fn from_fn(grid: BoxGrid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut point = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.point(i, &mut point);
                f(&point)
            })
            .collect();
        GridScalar { grid, values }
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn zip_map(&self, other: &GridScalar, f: impl Fn(f64, f64) -> f64) -> GridScalar {
        assert_eq!(self.grid, other.grid);
        GridScalar {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// A sampled vector field: one scalar lattice per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    components: Vec<GridScalar>,
}

impl GridField {
    pub fn new(components: Vec<GridScalar>) -> Self {
        assert!(!components.is_empty());
        let grid = components[0].grid().clone();
        assert!(
            components.iter().all(|c| *c.grid() == grid),
            "components live on different grids"
        );
        assert_eq!(
            components.len(),
            grid.dim(),
            "a field has one component per axis"
        );
        GridField { components }
    }

    pub fn grid(&self) -> &BoxGrid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &GridScalar {
        &self.components[i]
    }

    pub fn components(&self) -> &[GridScalar] {
        &self.components
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }

    pub(crate) fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        GridField::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.zip_map(b, &f))
                .collect(),
        )
    }
}

/// Entries `f_ij`, `i < j`, of an antisymmetrized derivative matrix.
#[derive(Debug, Clone)]
pub struct GridTwoForm {
    grid: BoxGrid,
    entries: Vec<GridScalar>,
}

impl GridTwoForm {
    pub fn new(grid: BoxGrid, entries: Vec<GridScalar>) -> Self {
        let n = grid.dim();
        assert_eq!(entries.len(), n * (n - 1) / 2);
        assert!(entries.iter().all(|e| *e.grid() == grid));
        GridTwoForm { grid, entries }
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    /// Entry for the pair `i < j`.
    pub fn entry(&self, i: usize, j: usize) -> &GridScalar {
        &self.entries[pair_index(self.grid.dim(), i, j)]
    }

    pub fn entries(&self) -> &[GridScalar] {
        &self.entries
    }
}

pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Smooth window that is 1 nowhere but positive inside the box and exactly
/// zero on its boundary: the product over axes of
/// `bump(2 (x_a - c_a) / L_a)`.
#[derive(Debug, Clone)]
pub struct BumpWindow {
    pub center: Vec<f64>,
    pub width: Vec<f64>,
}

impl BumpWindow {
    /// Window spanning the whole box: support is the open box interior.
    pub fn spanning(grid: &BoxGrid) -> Self {
        BumpWindow {
            center: grid
                .bounds()
                .iter()
                .map(|&(lo, hi)| 0.5 * (lo + hi))
                .collect(),
            width: grid.bounds().iter().map(|&(lo, hi)| hi - lo).collect(),
        }
    }

    pub fn weight(&self, point: &[f64]) -> f64 {
        point
            .iter()
            .zip(self.center.iter().zip(&self.width))
            .map(|(&x, (&c, &l))| bump(2.0 * (x - c) / l))
            .product()
    }
}

/// Sample an analytic scalar onto the lattice, optionally multiplied by a
/// bump window so the result is compactly supported inside the box.
pub fn sample_scalar<E>(
    grid: &BoxGrid,
    window: Option<&BumpWindow>,
    mut f: impl FnMut(&[f64]) -> Result<f64, E>,
) -> Result<GridScalar, E> {
    let mut point = vec![0.0; grid.dim()];
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        grid.point(i, &mut point);
        let w = window.map_or(1.0, |w| w.weight(&point));
        // the window vanishes identically outside its support; skip the
        // integrand there so domain errors outside the window cannot leak
        let v = if w == 0.0 { 0.0 } else { w * f(&point)? };
        values.push(v);
    }
    Ok(GridScalar::new(grid.clone(), values))
}

/// Sample an analytic map with one closure call per component.
pub fn sample_field<E>(
    grid: &BoxGrid,
    window: Option<&BumpWindow>,
    mut f: impl FnMut(usize, &[f64]) -> Result<f64, E>,
) -> Result<GridField, E> {
    let mut components = Vec::with_capacity(grid.dim());
    for c in 0..grid.dim() {
        components.push(sample_scalar(grid, window, |p| f(c, p))?);
    }
    Ok(GridField::new(components))
}

/// Derivative along one axis under the chosen scheme.
pub fn axis_derivative(f: &GridScalar, axis: usize, scheme: Scheme) -> GridScalar {
    match scheme {
        Scheme::Spectral => spectral::axis_derivative(f, axis),
        Scheme::Central2 => central2_axis_derivative(f, axis),
    }
}

fn central2_axis_derivative(f: &GridScalar, axis: usize) -> GridScalar {
    let grid = f.grid().clone();
    let n = grid.shape()[axis];
    let stride = grid.strides()[axis];
    let inv_2h = 1.0 / (2.0 * grid.spacing(axis));
    let vals = f.values();
    let mut out = vec![0.0; vals.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let coord = (idx / stride) % n;
        let up = if coord + 1 == n {
            idx + stride - n * stride
        } else {
            idx + stride
        };
        let down = if coord == 0 {
            idx + n * stride - stride
        } else {
            idx - stride
        };
        *slot = (vals[up] - vals[down]) * inv_2h;
    }
    GridScalar::new(grid, out)
}

/// Discrete gradient: one derivative per axis.
pub fn d1_grid(f: &GridScalar, scheme: Scheme) -> GridField {
    GridField::new(
        (0..f.grid().dim())
            .map(|a| axis_derivative(f, a, scheme))
            .collect(),
    )
}

/// Discrete curl matrix: entries `-d f_i / d x_j + d f_j / d x_i` for
/// `i < j`.
pub fn d2_grid(x: &GridField, scheme: Scheme) -> GridTwoForm {
    let grid = x.grid().clone();
    let n = grid.dim();
    let mut entries = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let di_dj = axis_derivative(x.component(i), j, scheme);
            let dj_di = axis_derivative(x.component(j), i, scheme);
            entries.push(dj_di.zip_map(&di_dj, |a, b| a - b));
        }
    }
    GridTwoForm::new(grid, entries)
}

/// Discrete divergence: sum of own-axis derivatives.
pub fn div_grid(x: &GridField, scheme: Scheme) -> GridScalar {
    let mut out = GridScalar::zeros(x.grid().clone());
    for (a, comp) in x.components().iter().enumerate() {
        let d = axis_derivative(comp, a, scheme);
        for (o, v) in out.values_mut().iter_mut().zip(d.values()) {
            *o += v;
        }
    }
    out
}

/// Discrete Laplacian as the composition of divergence and gradient.
pub fn laplacian_grid(f: &GridScalar, scheme: Scheme) -> GridScalar {
    div_grid(&d1_grid(f, scheme), scheme)
}

fn check_grids(a: &BoxGrid, b: &BoxGrid) -> Result<(), GridError> {
    if a == b {
        Ok(())
    } else {
        Err(GridError::GridMismatch)
    }
}

/// Plain L2 inner product of scalars under the lattice quadrature.
pub fn inner_l2_scalar(f: &GridScalar, g: &GridScalar) -> Result<f64, GridError> {
    check_grids(f.grid(), g.grid())?;
    let dot: f64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    Ok(dot * f.grid().cell_volume())
}

pub fn norm_l2_scalar(f: &GridScalar) -> f64 {
    inner_l2_scalar(f, f).expect("same grid").sqrt()
}

/// Plain L2 inner product of fields.
pub fn inner_l2_field(x: &GridField, y: &GridField) -> Result<f64, GridError> {
    check_grids(x.grid(), y.grid())?;
    let mut acc = 0.0;
    for (a, b) in x.components().iter().zip(y.components()) {
        acc += inner_l2_scalar(a, b)?;
    }
    Ok(acc)
}

pub fn norm_l2_field(x: &GridField) -> f64 {
    inner_l2_field(x, x).expect("same grid").sqrt()
}

/// Inner product on scalars with first and second derivative terms
/// (the discrete H2 pairing). Derivatives are spectral.
pub fn inner0(f: &GridScalar, g: &GridScalar) -> Result<f64, GridError> {
    check_grids(f.grid(), g.grid())?;
    let mut acc = inner_l2_scalar(f, g)?;
    let n = f.grid().dim();
    let df: Vec<GridScalar> = (0..n)
        .map(|a| axis_derivative(f, a, Scheme::Spectral))
        .collect();
    let dg: Vec<GridScalar> = (0..n)
        .map(|a| axis_derivative(g, a, Scheme::Spectral))
        .collect();
    for a in 0..n {
        acc += inner_l2_scalar(&df[a], &dg[a])?;
        for b in 0..n {
            let dff = axis_derivative(&df[a], b, Scheme::Spectral);
            let dgg = axis_derivative(&dg[a], b, Scheme::Spectral);
            acc += inner_l2_scalar(&dff, &dgg)?;
        }
    }
    Ok(acc)
}

pub fn norm0(f: &GridScalar) -> f64 {
    inner0(f, f).expect("same grid").sqrt()
}

/// Inner product on fields with per-component first-derivative terms
/// (the discrete H1 pairing). Derivatives are spectral.
pub fn inner1(x: &GridField, y: &GridField) -> Result<f64, GridError> {
    check_grids(x.grid(), y.grid())?;
    let n = x.grid().dim();
    let mut acc = 0.0;
    for (a, b) in x.components().iter().zip(y.components()) {
        acc += inner_l2_scalar(a, b)?;
        for axis in 0..n {
            let da = axis_derivative(a, axis, Scheme::Spectral);
            let db = axis_derivative(b, axis, Scheme::Spectral);
            acc += inner_l2_scalar(&da, &db)?;
        }
    }
    Ok(acc)
}

pub fn norm1(x: &GridField) -> f64 {
    inner1(x, x).expect("same grid").sqrt()
}

/// Inner product on two-forms: entrywise L2 over the pairs `i < j`.
pub fn inner2(f: &GridTwoForm, g: &GridTwoForm) -> Result<f64, GridError> {
    check_grids(f.grid(), g.grid())?;
    let mut acc = 0.0;
    for (a, b) in f.entries().iter().zip(g.entries()) {
        acc += inner_l2_scalar(a, b)?;
    }
    Ok(acc)
}

pub fn norm2(f: &GridTwoForm) -> f64 {
    inner2(f, f).expect("same grid").sqrt()
}
