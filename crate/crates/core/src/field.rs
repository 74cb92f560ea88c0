//! Multivector-valued signals sampled on rectangular grids.
//!
//! A [`MultivectorField`] stores its samples blade-major: the `2^n` blade
//! channels are each a contiguous row-major scalar grid (last axis fastest).
//! One channel is the unit of FFT batching.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSignature, Multivector};
use crate::error::{Error, Result};

pub mod io;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum GridMode {
    /// Integer sample positions `j in [0, N)`; volume element 1.
    Cyclic,
    /// Samples `a + j (b - a) / N` on each axis domain `[a, b)`.
    Quadrature { domain: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    dims: Vec<usize>,
    mode: GridMode,
}

impl GridGeometry {
    pub fn cyclic(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, GridMode::Cyclic)
    }

    pub fn quadrature(dims: Vec<usize>, domain: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(dims, GridMode::Quadrature { domain })
    }

    pub fn new(dims: Vec<usize>, mode: GridMode) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGrid("no axes".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("empty axis in {dims:?}")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidGrid("grid too large".into()))?;
        if let GridMode::Quadrature { domain } = &mode {
            if domain.len() != dims.len() {
                return Err(Error::InvalidGrid(format!(
                    "{} domains for {} axes",
                    domain.len(),
                    dims.len()
                )));
            }
            if domain
                .iter()
                .any(|&(a, b)| !a.is_finite() || !b.is_finite() || b <= a)
            {
                return Err(Error::InvalidGrid(format!("bad domain {domain:?}")));
            }
        }
        Ok(Self { dims, mode })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mode(&self) -> &GridMode {
        &self.mode
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self.mode, GridMode::Cyclic)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Total number of sample points.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample spacing along `axis`; 1 in cyclic mode.
    pub fn spacing(&self, axis: usize) -> f64 {
        match &self.mode {
            GridMode::Cyclic => 1.0,
            GridMode::Quadrature { domain } => {
                let (a, b) = domain[axis];
                (b - a) / self.dims[axis] as f64
            }
        }
    }

    /// Coordinate of sample `j` along `axis`.
    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        match &self.mode {
            GridMode::Cyclic => j as f64,
            GridMode::Quadrature { domain } => domain[axis].0 + j as f64 * self.spacing(axis),
        }
    }

    /// Volume element of the Riemann sum.
    pub fn volume_element(&self) -> f64 {
        (0..self.ndim()).map(|l| self.spacing(l)).product()
    }

    /// Row-major multi-index of a flat point index.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
    }

    pub fn ravel(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&j, &d)| acc * d + j)
    }

    /// Coordinates of every point, row-major, `ndim` values per point.
    pub fn coordinates(&self) -> Vec<f64> {
        let n = self.ndim();
        let mut idx = vec![0; n];
        let mut out = Vec::with_capacity(self.len() * n);
        for flat in 0..self.len() {
            self.unravel(flat, &mut idx);
            out.extend(idx.iter().enumerate().map(|(l, &j)| self.coordinate(l, j)));
        }
        out
    }

    pub(crate) fn check_same(&self, other: &GridGeometry) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GeometryMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultivectorField {
    sig: AlgebraSignature,
    grid: GridGeometry,
    data: Vec<f64>,
}

impl MultivectorField {
    pub fn zeros(sig: AlgebraSignature, grid: GridGeometry) -> Result<Self> {
        check_pairing(sig, &grid)?;
        let data = vec![0.0; sig.blade_count() * grid.len()];
        Ok(Self { sig, grid, data })
    }

    /// Wrap blade-major data.
    pub fn from_data(sig: AlgebraSignature, grid: GridGeometry, data: Vec<f64>) -> Result<Self> {
        check_pairing(sig, &grid)?;
        let expected = sig.blade_count() * grid.len();
        if data.len() != expected {
            return Err(Error::InvalidParams(format!(
                "field data has {} values, expected {expected}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite field value".into()));
        }
        Ok(Self { sig, grid, data })
    }

    /// Build from one multivector per point (row-major point order).
    pub fn from_points(
        sig: AlgebraSignature,
        grid: GridGeometry,
        points: &[Multivector],
    ) -> Result<Self> {
        let mut field = Self::zeros(sig, grid)?;
        if points.len() != field.len() {
            return Err(Error::InvalidParams(format!(
                "{} points for a grid of {}",
                points.len(),
                field.len()
            )));
        }
        for (i, m) in points.iter().enumerate() {
            sig.check_same(m.signature())?;
            field.set_point(i, m.coeffs());
        }
        Ok(field)
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.sig
    }

    pub fn grid(&self) -> &GridGeometry {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, blade: usize) -> &[f64] {
        let m = self.len();
        &self.data[blade * m..(blade + 1) * m]
    }

    pub fn channel_mut(&mut self, blade: usize) -> &mut [f64] {
        let m = self.len();
        &mut self.data[blade * m..(blade + 1) * m]
    }

    pub fn point_coeffs(&self, point: usize, out: &mut [f64]) {
        let m = self.len();
        for (b, slot) in out.iter_mut().enumerate() {
            *slot = self.data[b * m + point];
        }
    }

    pub fn point(&self, point: usize) -> Multivector {
        let mut coeffs = vec![0.0; self.sig.blade_count()];
        self.point_coeffs(point, &mut coeffs);
        Multivector::from_coeffs(self.sig, coeffs).expect("field values are finite")
    }

    pub fn point_at(&self, index: &[usize]) -> Multivector {
        self.point(self.grid.ravel(index))
    }

    pub(crate) fn set_point(&mut self, point: usize, coeffs: &[f64]) {
        let m = self.len();
        for (b, &c) in coeffs.iter().enumerate() {
            self.data[b * m + point] = c;
        }
    }

    /// Point-major copy: `2^n` consecutive coefficients per point.
    pub(crate) fn to_point_major(&self) -> Vec<f64> {
        let m = self.len();
        let count = self.sig.blade_count();
        let mut out = vec![0.0; m * count];
        for b in 0..count {
            for (x, &v) in self.channel(b).iter().enumerate() {
                out[x * count + b] = v;
            }
        }
        out
    }

    pub(crate) fn from_point_major(
        sig: AlgebraSignature,
        grid: GridGeometry,
        pm: &[f64],
    ) -> Result<Self> {
        let mut field = Self::zeros(sig, grid)?;
        let count = sig.blade_count();
        for (x, coeffs) in pm.chunks_exact(count).enumerate() {
            field.set_point(x, coeffs);
        }
        Ok(field)
    }

    /// Same samples on a different grid of identical shape.
    pub fn with_grid(mut self, grid: GridGeometry) -> Result<Self> {
        if grid.dims() != self.grid.dims() {
            return Err(Error::GeometryMismatch(format!(
                "cannot relabel {:?} as {:?}",
                self.grid.dims(),
                grid.dims()
            )));
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn map_points(&self, f: impl Fn(usize, &Multivector) -> Multivector) -> Result<Self> {
        let points: Vec<Multivector> = (0..self.len()).map(|i| f(i, &self.point(i))).collect();
        Self::from_points(self.sig, self.grid.clone(), &points)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    /// `self + s * other`.
    pub fn combine(&self, other: &Self, s: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(Self {
            sig: self.sig,
            grid: self.grid.clone(),
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            sig: self.sig,
            grid: self.grid.clone(),
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Pointwise `left * h(x) * right`.
    pub fn sandwich(&self, left: &Multivector, right: &Multivector) -> Result<Self> {
        self.sig.check_same(left.signature())?;
        self.sig.check_same(right.signature())?;
        self.map_points(|_, h| &(left * h) * right)
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `||self - other|| / ||other||` in the coefficient (Frobenius) norm.
    pub fn relative_error(&self, reference: &Self) -> Result<f64> {
        self.check_compatible(reference)?;
        let diff: f64 = self
            .data
            .iter()
            .zip(&reference.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let norm: f64 = reference.data.iter().map(|b| b * b).sum();
        Ok(if norm == 0.0 {
            diff.sqrt()
        } else {
            (diff / norm).sqrt()
        })
    }

    /// Euclidean norm of all coefficients, without a volume element.
    pub fn coefficient_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        self.sig.check_same(other.sig)?;
        self.grid.check_same(&other.grid)
    }
}

fn check_pairing(sig: AlgebraSignature, grid: &GridGeometry) -> Result<()> {
    if grid.ndim() != sig.dim() {
        return Err(Error::GeometryMismatch(format!(
            "{}-axis grid for the {}-dimensional algebra {sig}",
            grid.ndim(),
            sig.dim()
        )));
    }
    Ok(())
}

/// Multivector inner product `(a, b) = sum_x a(x) ~b(x) dV`.
pub fn field_inner_product(a: &MultivectorField, b: &MultivectorField) -> Result<Multivector> {
    a.check_compatible(b)?;
    let sig = a.sig;
    let count = sig.blade_count();
    let table = sig.products();
    let mut acc = vec![0.0; count];
    let mut ca = vec![0.0; count];
    let mut cb = vec![0.0; count];
    for x in 0..a.len() {
        a.point_coeffs(x, &mut ca);
        b.point_coeffs(x, &mut cb);
        let rb = Multivector::from_coeffs(sig, cb.clone())?.principal_reverse();
        table.mul_acc(&ca, rb.coeffs(), &mut acc);
    }
    let vol = a.grid.volume_element();
    Ok(Multivector::from_coeffs(sig, acc)?.scale(vol))
}

/// Symmetric scalar inner product `<a, b> = sum_x sum_A a_A(x) b_A(x) dV`.
pub fn field_scalar_inner(a: &MultivectorField, b: &MultivectorField) -> Result<f64> {
    a.check_compatible(b)?;
    // Per-channel partial sums, then channels in ascending order.
    let sum: f64 = (0..a.sig.blade_count())
        .map(|c| {
            a.channel(c)
                .iter()
                .zip(b.channel(c))
                .map(|(x, y)| x * y)
                .sum::<f64>()
        })
        .sum();
    Ok(sum * a.grid.volume_element())
}

pub fn field_norm(a: &MultivectorField) -> f64 {
    field_scalar_inner(a, a)
        .expect("a field is compatible with itself")
        .sqrt()
}

/// Test-signal generators.
#[derive(Clone, Debug, PartialEq)]
pub enum SignalKind {
    /// `amplitude` at one grid index, zero elsewhere.
    Delta {
        index: Vec<usize>,
        amplitude: Multivector,
    },
    Constant {
        amplitude: Multivector,
    },
    /// `amplitude * prod_l exp(-(x_l - c_l)^2 / (2 sigma_l^2))`; quadrature only.
    Gaussian {
        amplitude: Multivector,
        sigma: Vec<f64>,
        center: Vec<f64>,
    },
    /// I.i.d. uniform coefficients in `[-1, 1]`.
    Random {
        seed: u64,
    },
}

pub fn generate(
    kind: &SignalKind,
    sig: AlgebraSignature,
    grid: &GridGeometry,
) -> Result<MultivectorField> {
    let mut field = MultivectorField::zeros(sig, grid.clone())?;
    let check_amp = |m: &Multivector| sig.check_same(m.signature());
    match kind {
        SignalKind::Delta { index, amplitude } => {
            check_amp(amplitude)?;
            if index.len() != grid.ndim() || index.iter().zip(grid.dims()).any(|(j, d)| j >= d) {
                return Err(Error::InvalidParams(format!(
                    "delta index {index:?} outside grid {:?}",
                    grid.dims()
                )));
            }
            field.set_point(grid.ravel(index), amplitude.coeffs());
        }
        SignalKind::Constant { amplitude } => {
            check_amp(amplitude)?;
            for x in 0..field.len() {
                field.set_point(x, amplitude.coeffs());
            }
        }
        SignalKind::Gaussian {
            amplitude,
            sigma,
            center,
        } => {
            check_amp(amplitude)?;
            if grid.is_cyclic() {
                return Err(Error::InvalidParams(
                    "gaussian signals need a quadrature grid".into(),
                ));
            }
            if sigma.len() != grid.ndim() || center.len() != grid.ndim() {
                return Err(Error::InvalidParams(
                    "gaussian needs one sigma and one center per axis".into(),
                ));
            }
            if sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
                return Err(Error::InvalidParams(format!("bad sigma {sigma:?}")));
            }
            let coords = grid.coordinates();
            let n = grid.ndim();
            let mut coeffs = vec![0.0; sig.blade_count()];
            for (x, pos) in coords.chunks_exact(n).enumerate() {
                let weight: f64 = pos
                    .iter()
                    .zip(sigma.iter().zip(center))
                    .map(|(&xl, (&s, &c))| (-(xl - c) * (xl - c) / (2.0 * s * s)).exp())
                    .product();
                for (slot, &a) in coeffs.iter_mut().zip(amplitude.coeffs()) {
                    *slot = a * weight;
                }
                field.set_point(x, &coeffs);
            }
        }
        SignalKind::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for v in field.data.iter_mut() {
                *v = rng.random_range(-1.0..=1.0);
            }
        }
    }
    Ok(field)
}
