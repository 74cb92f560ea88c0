//! General two-sided Clifford Fourier transform
//!
//! ```text
//! F{h}(ω) = Σ_x exp(-f u(x,ω)) h(x) exp(-g v(x,ω)) dV
//! ```
//!
//! with the phase `x·ω` partitioned between a left part `u` (axes in `A_u`)
//! and a right part `v` (the complement). On cyclic grids `x_l = j_l` and
//! `ω_l = 2π m_l / N_l`, so shift and modulation by integer offsets are exact.
//!
//! Two evaluation routes are provided: a direct `O(M²)` sum that follows the
//! definition, and an FFT route that splits `h = h₊ + h₋` with respect to
//! `(f, g)`. Each part then has the one-sided form `Σ h± exp(-g (v ∓ u))`,
//! which is a plain complex DFT per blade channel.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSignature, Multivector};
use crate::error::{Error, Result};
use crate::field::{GridGeometry, GridMode, MultivectorField};
use crate::roots::RootOfMinusOne;
use crate::split::split_field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Direct,
    Fft,
}

/// Partition of the coordinate axes between the left phase `u` and the right
/// phase `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseFunctions {
    dim: usize,
    left_mask: usize,
}

impl PhaseFunctions {
    /// `left_axes` are 1-based; every other axis goes to `v`.
    pub fn new(dim: usize, left_axes: &[usize]) -> Result<Self> {
        let mut left_mask = 0;
        for &axis in left_axes {
            if axis == 0 || axis > dim {
                return Err(Error::AxisOutOfRange { axis, dim });
            }
            left_mask |= 1 << (axis - 1);
        }
        Ok(Self { dim, left_mask })
    }

    /// `u = x·ω`, `v = 0`.
    pub fn all_left(dim: usize) -> Self {
        Self {
            dim,
            left_mask: (1 << dim) - 1,
        }
    }

    /// `u = 0`, `v = x·ω`.
    pub fn all_right(dim: usize) -> Self {
        Self { dim, left_mask: 0 }
    }

    /// Axes `1..=k` on the left, the rest on the right.
    pub fn split_at(dim: usize, k: usize) -> Result<Self> {
        Self::new(dim, &(1..=k).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the 1-based `axis` belongs to `u`.
    pub fn is_left(&self, axis: usize) -> bool {
        self.left_mask & (1 << (axis - 1)) != 0
    }

    pub fn left_axes(&self) -> Vec<usize> {
        (1..=self.dim).filter(|&a| self.is_left(a)).collect()
    }

    pub fn right_axes(&self) -> Vec<usize> {
        (1..=self.dim).filter(|&a| !self.is_left(a)).collect()
    }

    pub fn u(&self, x: &[f64], omega: &[f64]) -> f64 {
        self.partial(x, omega, true)
    }

    pub fn v(&self, x: &[f64], omega: &[f64]) -> f64 {
        self.partial(x, omega, false)
    }

    fn partial(&self, x: &[f64], omega: &[f64], left: bool) -> f64 {
        x.iter()
            .zip(omega)
            .enumerate()
            .filter(|(l, _)| self.is_left(l + 1) == left)
            .map(|(_, (a, b))| a * b)
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct CftPlan {
    sig: AlgebraSignature,
    f: RootOfMinusOne,
    g: RootOfMinusOne,
    phase: PhaseFunctions,
    grid: GridGeometry,
    freq: GridGeometry,
    mode: EvalMode,
    direction: Direction,
}

impl CftPlan {
    /// Forward plan. Cyclic grids get the DFT frequencies `2πm/N`; quadrature
    /// grids get the dual grid with spacing `2π/(N Δx)` centred on zero.
    pub fn new(
        f: RootOfMinusOne,
        g: RootOfMinusOne,
        phase: PhaseFunctions,
        grid: GridGeometry,
        mode: EvalMode,
    ) -> Result<Self> {
        let sig = f.signature();
        sig.check_same(g.signature())?;
        if phase.dim() != sig.dim() || grid.ndim() != sig.dim() {
            return Err(Error::GeometryMismatch(format!(
                "{sig} with a {}-axis phase and a {}-axis grid",
                phase.dim(),
                grid.ndim()
            )));
        }
        if mode == EvalMode::Fft && !grid.is_cyclic() {
            return Err(Error::NonCyclicGrid);
        }
        let freq = match grid.mode() {
            GridMode::Cyclic => grid.clone(),
            GridMode::Quadrature { .. } => {
                let domain = (0..grid.ndim())
                    .map(|l| {
                        let n = grid.dims()[l] as f64;
                        let dw = 2.0 * PI / (n * grid.spacing(l));
                        let half = (grid.dims()[l] / 2) as f64 * dw;
                        (-half, -half + n * dw)
                    })
                    .collect();
                GridGeometry::quadrature(grid.dims().to_vec(), domain)?
            }
        };
        Ok(Self {
            sig,
            f,
            g,
            phase,
            grid,
            freq,
            mode,
            direction: Direction::Forward,
        })
    }

    /// Replace the frequency grid of a quadrature plan.
    pub fn with_frequency_grid(mut self, freq: GridGeometry) -> Result<Self> {
        if self.grid.is_cyclic() || freq.is_cyclic() {
            return Err(Error::InvalidGrid(
                "custom frequency grids need quadrature mode".into(),
            ));
        }
        if freq.ndim() != self.sig.dim() {
            return Err(Error::GeometryMismatch(format!(
                "{}-axis frequency grid for {}",
                freq.ndim(),
                self.sig
            )));
        }
        self.freq = freq;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: EvalMode) -> Result<Self> {
        if mode == EvalMode::Fft && !self.grid.is_cyclic() {
            return Err(Error::NonCyclicGrid);
        }
        self.mode = mode;
        Ok(self)
    }

    /// Same plan with other roots, e.g. `-f` for the sign-flipped transforms.
    pub fn with_roots(&self, f: RootOfMinusOne, g: RootOfMinusOne) -> Result<Self> {
        self.sig.check_same(f.signature())?;
        self.sig.check_same(g.signature())?;
        Ok(Self {
            f,
            g,
            ..self.clone()
        })
    }

    /// Same plan pointing the other way.
    pub fn inverted(&self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        };
        Self {
            direction,
            ..self.clone()
        }
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.sig
    }

    pub fn f(&self) -> &RootOfMinusOne {
        &self.f
    }

    pub fn g(&self) -> &RootOfMinusOne {
        &self.g
    }

    pub fn phase(&self) -> &PhaseFunctions {
        &self.phase
    }

    /// Spatial grid.
    pub fn grid(&self) -> &GridGeometry {
        &self.grid
    }

    pub fn frequency_grid(&self) -> &GridGeometry {
        &self.freq
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Frequency `ω_l` of sample `m` along the 0-based `axis`.
    pub fn frequency(&self, axis: usize, m: usize) -> f64 {
        match self.freq.mode() {
            GridMode::Cyclic => 2.0 * PI * m as f64 / self.freq.dims()[axis] as f64,
            GridMode::Quadrature { .. } => self.freq.coordinate(axis, m),
        }
    }

    /// Frequency spacing along the 0-based `axis`.
    pub fn frequency_spacing(&self, axis: usize) -> f64 {
        match self.freq.mode() {
            GridMode::Cyclic => 2.0 * PI / self.freq.dims()[axis] as f64,
            GridMode::Quadrature { .. } => self.freq.spacing(axis),
        }
    }

    /// Phase angle `x_l(j) ω_l(m)`; reduced modulo `N` on cyclic grids.
    fn angle(&self, axis: usize, j: usize, m: usize) -> f64 {
        if self.grid.is_cyclic() {
            let n = self.grid.dims()[axis];
            2.0 * PI * ((j * m) % n) as f64 / n as f64
        } else {
            self.grid.coordinate(axis, j) * self.frequency(axis, m)
        }
    }

    /// Normalization of the inverse sum.
    fn inverse_weight(&self) -> f64 {
        match self.grid.mode() {
            GridMode::Cyclic => 1.0 / self.grid.len() as f64,
            GridMode::Quadrature { .. } => {
                let n = self.sig.dim() as i32;
                let dw: f64 = (0..self.sig.dim())
                    .map(|l| self.frequency_spacing(l))
                    .product();
                dw / (2.0 * PI).powi(n)
            }
        }
    }

    fn check_direction(&self, expected: Direction) -> Result<()> {
        if self.direction == expected {
            Ok(())
        } else {
            Err(Error::WrongDirection {
                expected,
                found: self.direction,
            })
        }
    }

    fn check_input(&self, h: &MultivectorField, grid: &GridGeometry) -> Result<()> {
        self.sig.check_same(h.signature())?;
        grid.check_same(h.grid())
    }
}

/// Scalar weights of one side of a kernel: `a(θ) + b(θ) r` for the root `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Factor {
    /// `exp(sign · r · θ)`.
    Exp(f64),
    /// `sign · sin(-θ)`, no root.
    Sine(f64),
}

impl Factor {
    #[inline]
    fn weights(self, theta: f64) -> (f64, f64) {
        match self {
            Factor::Exp(sign) => {
                let (s, c) = theta.sin_cos();
                (c, sign * s)
            }
            Factor::Sine(sign) => (-sign * theta.sin(), 0.0),
        }
    }
}

/// Literal kernel sum `Σ_src L(u) h(src) R(v) · weight` onto the `dst` grid.
pub(crate) fn direct_sum(
    h: &MultivectorField,
    plan: &CftPlan,
    left: Factor,
    right: Factor,
    direction: Direction,
) -> Result<MultivectorField> {
    let (src, dst) = match direction {
        Direction::Forward => (&plan.grid, &plan.freq),
        Direction::Inverse => (&plan.freq, &plan.grid),
    };
    plan.check_input(h, src)?;
    let weight = match direction {
        Direction::Forward => plan.grid.volume_element(),
        Direction::Inverse => plan.inverse_weight(),
    };
    let sig = plan.sig;
    let n = sig.dim();
    let count = sig.blade_count();
    let table = sig.products();
    let (f, g) = (plan.f.value().coeffs(), plan.g.value().coeffs());

    // angles[l][j * dst_n + m], indexed by (source sample, target sample)
    let angles: Vec<Vec<f64>> = (0..n)
        .map(|l| {
            let (sn, dn) = (src.dims()[l], dst.dims()[l]);
            let mut t = Vec::with_capacity(sn * dn);
            for a in 0..sn {
                for b in 0..dn {
                    t.push(match direction {
                        Direction::Forward => plan.angle(l, a, b),
                        Direction::Inverse => plan.angle(l, b, a),
                    });
                }
            }
            t
        })
        .collect();

    // h, f h, h g, f h g per source point, point-major
    let hp = h.to_point_major();
    let m_src = src.len();
    let mut fh = vec![0.0; m_src * count];
    let mut hg = vec![0.0; m_src * count];
    let mut fhg = vec![0.0; m_src * count];
    for x in 0..m_src {
        let r = x * count..(x + 1) * count;
        table.mul_into(f, &hp[r.clone()], &mut fh[r.clone()]);
        table.mul_into(&hp[r.clone()], g, &mut hg[r.clone()]);
        table.mul_into(&fh[r.clone()], g, &mut fhg[r]);
    }
    let src_index: Vec<usize> = {
        let mut idx = vec![0; n];
        let mut out = Vec::with_capacity(m_src * n);
        for x in 0..m_src {
            src.unravel(x, &mut idx);
            out.extend_from_slice(&idx);
        }
        out
    };

    let out: Vec<f64> = (0..dst.len())
        .into_par_iter()
        .flat_map_iter(|w| {
            let mut widx = vec![0; n];
            dst.unravel(w, &mut widx);
            let mut acc = vec![0.0; count];
            for x in 0..m_src {
                let jx = &src_index[x * n..(x + 1) * n];
                let (mut u, mut v) = (0.0, 0.0);
                for l in 0..n {
                    let theta = angles[l][jx[l] * dst.dims()[l] + widx[l]];
                    if plan.phase.is_left(l + 1) {
                        u += theta;
                    } else {
                        v += theta;
                    }
                }
                let (la, lb) = left.weights(u);
                let (ra, rb) = right.weights(v);
                let (c0, c1, c2, c3) = (la * ra, lb * ra, la * rb, lb * rb);
                let r = x * count..(x + 1) * count;
                for (k, slot) in acc.iter_mut().enumerate() {
                    *slot += c0 * hp[r.start + k]
                        + c1 * fh[r.start + k]
                        + c2 * hg[r.start + k]
                        + c3 * fhg[r.start + k];
                }
            }
            acc.into_iter().map(move |a| a * weight)
        })
        .collect();
    MultivectorField::from_point_major(sig, dst.clone(), &out)
}

/// Direct `O(M²)` evaluation of the forward transform.
pub fn cft_forward_direct(h: &MultivectorField, plan: &CftPlan) -> Result<MultivectorField> {
    plan.check_direction(Direction::Forward)?;
    direct_sum(
        h,
        plan,
        Factor::Exp(-1.0),
        Factor::Exp(-1.0),
        Direction::Forward,
    )
}

/// Forward transform through the `±` split and one complex FFT per blade
/// channel of `h₊` and `h₋`.
pub fn cft_forward_fft(h: &MultivectorField, plan: &CftPlan) -> Result<MultivectorField> {
    plan.check_direction(Direction::Forward)?;
    plan.check_input(h, &plan.grid)?;
    split_fft(h, &plan.f, &plan.g, &plan.phase, 1.0)
}

/// Forward transform by the plan's evaluation mode.
pub fn cft_forward(h: &MultivectorField, plan: &CftPlan) -> Result<MultivectorField> {
    match plan.mode {
        EvalMode::Direct => cft_forward_direct(h, plan),
        EvalMode::Fft => cft_forward_fft(h, plan),
    }
}

/// Inverse transform: kernels `exp(+f u)`, `exp(+g v)` and normalization
/// `1/M` (cyclic) or `Δω/(2π)^n` (quadrature). Accepts a plan in either
/// direction; the field must live on the plan's frequency grid.
pub fn cft_inverse(big_h: &MultivectorField, plan: &CftPlan) -> Result<MultivectorField> {
    match plan.mode {
        EvalMode::Direct => direct_sum(
            big_h,
            plan,
            Factor::Exp(1.0),
            Factor::Exp(1.0),
            Direction::Inverse,
        ),
        EvalMode::Fft => {
            plan.check_input(big_h, &plan.freq)?;
            // exp(+f u) H exp(+g v) is the forward kernel of (-f, -g); the
            // cyclic phase is symmetric in (j, m).
            let scale = 1.0 / plan.grid.len() as f64;
            split_fft(
                big_h,
                &plan.f.negated(),
                &plan.g.negated(),
                &plan.phase,
                scale,
            )
        }
    }
}

/// Run the plan in its own direction.
pub fn execute(h: &MultivectorField, plan: &CftPlan) -> Result<MultivectorField> {
    match plan.direction {
        Direction::Forward => cft_forward(h, plan),
        Direction::Inverse => cft_inverse(h, plan),
    }
}

fn split_fft(
    h: &MultivectorField,
    f: &RootOfMinusOne,
    g: &RootOfMinusOne,
    phase: &PhaseFunctions,
    scale: f64,
) -> Result<MultivectorField> {
    if !h.grid().is_cyclic() {
        return Err(Error::NonCyclicGrid);
    }
    let (plus, minus) = split_field(h, f, g)?;
    let nd = NdFft::new(h.grid().dims());
    // h₊: w = v - u, so left axes run with exp(+i); h₋: w = v + u.
    let plus_dirs = axis_directions(phase, true);
    let minus_dirs = axis_directions(phase, false);
    let (re_p, im_p) = nd.channels(&plus, &plus_dirs);
    let (re_m, im_m) = nd.channels(&minus, &minus_dirs);

    // F{h±} = Σ h± cos w - (Σ h± sin w) g = Re + Im g
    let sig = h.signature();
    let count = sig.blade_count();
    let table = sig.products();
    let m = h.len();
    let mut out = vec![0.0; m * count];
    let mut re = vec![0.0; count];
    let mut im = vec![0.0; count];
    for (w, slot) in out.chunks_exact_mut(count).enumerate() {
        for (re_c, im_c) in [(&re_p, &im_p), (&re_m, &im_m)] {
            for b in 0..count {
                re[b] = re_c[b * m + w];
                im[b] = im_c[b * m + w];
            }
            for (s, r) in slot.iter_mut().zip(&re) {
                *s += r;
            }
            table.mul_acc(&im, g.value().coeffs(), slot);
        }
        slot.iter_mut().for_each(|s| *s *= scale);
    }
    MultivectorField::from_point_major(sig, h.grid().clone(), &out)
}

/// Per-axis DFT directions for the scalar phase `v - u` (`minus_u`) or `v + u`.
fn axis_directions(phase: &PhaseFunctions, minus_u: bool) -> Vec<FftDirection> {
    (1..=phase.dim())
        .map(|axis| {
            if phase.is_left(axis) && minus_u {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            }
        })
        .collect()
}

/// Separable n-dimensional complex DFT over row-major scalar grids.
struct NdFft {
    dims: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl NdFft {
    fn new(dims: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dims: dims.to_vec(),
            forward: dims.iter().map(|&d| planner.plan_fft_forward(d)).collect(),
            inverse: dims.iter().map(|&d| planner.plan_fft_inverse(d)).collect(),
        }
    }

    /// Unnormalized transform of one scalar grid, in place.
    fn transform(&self, data: &mut [Complex64], dirs: &[FftDirection]) {
        let total = data.len();
        let mut stride = total;
        for (axis, &len) in self.dims.iter().enumerate() {
            stride /= len;
            let fft = match dirs[axis] {
                FftDirection::Forward => &self.forward[axis],
                FftDirection::Inverse => &self.inverse[axis],
            };
            if len == 1 {
                continue;
            }
            let mut line = vec![Complex64::default(); len];
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            let block = len * stride;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
    }

    /// Real and imaginary parts of every blade channel's transform, each
    /// blade-major.
    fn channels(&self, h: &MultivectorField, dirs: &[FftDirection]) -> (Vec<f64>, Vec<f64>) {
        let count = h.signature().blade_count();
        let per: Vec<Vec<Complex64>> = (0..count)
            .into_par_iter()
            .map(|b| {
                let mut data: Vec<Complex64> = h
                    .channel(b)
                    .iter()
                    .map(|&v| Complex64::new(v, 0.0))
                    .collect();
                self.transform(&mut data, dirs);
                data
            })
            .collect();
        let re = per.iter().flat_map(|c| c.iter().map(|z| z.re)).collect();
        let im = per.iter().flat_map(|c| c.iter().map(|z| z.im)).collect();
        (re, im)
    }
}

/// Channel-wise trigonometric moments of a field on a cyclic grid:
///
/// ```text
/// CC = Σ h cos u cos v    SS = Σ h sin u sin v
/// CS = Σ h cos u sin v    SC = Σ h sin u cos v
/// ```
///
/// They come from the same two channel DFTs (phases `v - u` and `v + u`) the
/// FFT route uses, and every exponential or mixed exponential-sine kernel
/// with roots `±f`, `±g` is a fixed combination of them.
#[derive(Clone, Debug)]
pub struct TrigSpectra {
    f: Multivector,
    g: Multivector,
    cc: MultivectorField,
    ss: MultivectorField,
    cs: MultivectorField,
    sc: MultivectorField,
}

impl TrigSpectra {
    pub fn compute(h: &MultivectorField, plan: &CftPlan) -> Result<Self> {
        plan.check_input(h, &plan.grid)?;
        if !plan.grid.is_cyclic() {
            return Err(Error::NonCyclicGrid);
        }
        let nd = NdFft::new(h.grid().dims());
        // T₊ = Σ h e^{-i(v-u)}, T₋ = Σ h e^{-i(v+u)}
        let (re_p, im_p) = nd.channels(h, &axis_directions(&plan.phase, true));
        let (re_m, im_m) = nd.channels(h, &axis_directions(&plan.phase, false));
        let build = |vals: Vec<f64>| MultivectorField::from_data(plan.sig, plan.freq.clone(), vals);
        let zip = |a: &[f64], b: &[f64], fa: f64, fb: f64| -> Vec<f64> {
            a.iter()
                .zip(b)
                .map(|(x, y)| 0.5 * (fa * x + fb * y))
                .collect()
        };
        Ok(Self {
            f: plan.f.value().clone(),
            g: plan.g.value().clone(),
            cc: build(zip(&re_m, &re_p, 1.0, 1.0))?,
            ss: build(zip(&re_p, &re_m, 1.0, -1.0))?,
            cs: build(zip(&im_m, &im_p, -1.0, -1.0))?,
            sc: build(zip(&im_p, &im_m, 1.0, -1.0))?,
        })
    }

    fn combine(&self, terms: &[(f64, &MultivectorField, bool, bool)]) -> Result<MultivectorField> {
        let sig = self.cc.signature();
        let count = sig.blade_count();
        let table = sig.products();
        let m = self.cc.len();
        let mut out = vec![0.0; m * count];
        let mut src = vec![0.0; count];
        let mut tmp = vec![0.0; count];
        let mut tmp2 = vec![0.0; count];
        for (x, slot) in out.chunks_exact_mut(count).enumerate() {
            for &(coef, field, left, right) in terms {
                if coef == 0.0 {
                    continue;
                }
                field.point_coeffs(x, &mut src);
                let mut cur: &[f64] = &src;
                if left {
                    table.mul_into(self.f.coeffs(), cur, &mut tmp);
                    cur = &tmp;
                }
                if right {
                    table.mul_into(cur, self.g.coeffs(), &mut tmp2);
                    cur = &tmp2;
                }
                for (s, c) in slot.iter_mut().zip(cur) {
                    *s += coef * c;
                }
            }
        }
        MultivectorField::from_point_major(sig, self.cc.grid().clone(), &out)
    }

    /// `F^{σf, τg}{h} = CC - σ f SC - τ CS g + στ f SS g`.
    pub fn exp_exp(&self, f_sign: f64, g_sign: f64) -> Result<MultivectorField> {
        self.combine(&[
            (1.0, &self.cc, false, false),
            (-f_sign, &self.sc, true, false),
            (-g_sign, &self.cs, false, true),
            (f_sign * g_sign, &self.ss, true, true),
        ])
    }

    /// `F^{σf, ±s}{h} = ±(-CS + σ f SS)`.
    pub fn exp_sine(&self, f_sign: f64, sign: f64) -> Result<MultivectorField> {
        self.combine(&[
            (-sign, &self.cs, false, false),
            (sign * f_sign, &self.ss, true, false),
        ])
    }

    /// `F^{±s, τg}{h} = ±(-SC + τ SS g)`.
    pub fn sine_exp(&self, sign: f64, g_sign: f64) -> Result<MultivectorField> {
        self.combine(&[
            (-sign, &self.sc, false, false),
            (sign * g_sign, &self.ss, false, true),
        ])
    }
}

/// Derivative multiplier: `f ω_l F{h}` for `l ∈ A_u`, `F{h} g ω_l` otherwise.
/// Equals the transform of `∂h/∂x_l` for smooth, decaying `h`.
pub fn spectral_derivative(
    h: &MultivectorField,
    axis: usize,
    plan: &CftPlan,
) -> Result<MultivectorField> {
    check_axis(axis, plan)?;
    let spectrum = cft_forward(h, plan)?;
    let left = plan.phase.is_left(axis);
    let dim = plan.sig.dim();
    spectrum.map_points(|w, value| {
        let mut idx = vec![0; dim];
        plan.freq.unravel(w, &mut idx);
        let omega = plan.frequency(axis - 1, idx[axis - 1]);
        side_multiply(plan, value, left) * omega
    })
}

/// Moment multiplier: `f ∂F{h}/∂ω_l` for `l ∈ A_u`, `(∂F{h}/∂ω_l) g`
/// otherwise, with central differences on the frequency grid. Equals the
/// transform of `x_l h(x)`.
pub fn spectral_moment(
    h: &MultivectorField,
    axis: usize,
    plan: &CftPlan,
) -> Result<MultivectorField> {
    check_axis(axis, plan)?;
    let spectrum = cft_forward(h, plan)?;
    let derivative = frequency_derivative(&spectrum, axis - 1, plan)?;
    let left = plan.phase.is_left(axis);
    derivative.map_points(|_, value| side_multiply(plan, value, left))
}

fn side_multiply(plan: &CftPlan, value: &Multivector, left: bool) -> Multivector {
    if left {
        plan.f.value() * value
    } else {
        value * plan.g.value()
    }
}

fn check_axis(axis: usize, plan: &CftPlan) -> Result<()> {
    let dim = plan.sig.dim();
    if axis == 0 || axis > dim {
        Err(Error::AxisOutOfRange { axis, dim })
    } else {
        Ok(())
    }
}

/// `∂F/∂ω` along a 0-based axis: second-order central differences, periodic
/// on cyclic grids and one-sided second order at quadrature boundaries.
fn frequency_derivative(
    spectrum: &MultivectorField,
    axis: usize,
    plan: &CftPlan,
) -> Result<MultivectorField> {
    let grid = spectrum.grid().clone();
    let len = grid.dims()[axis];
    let stride: usize = grid.dims()[axis + 1..].iter().product();
    let dw = plan.frequency_spacing(axis);
    let cyclic = grid.is_cyclic();
    if len < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 frequency samples along axis {}",
            axis + 1
        )));
    }
    let count = spectrum.signature().blade_count();
    let mut data = vec![0.0; spectrum.data().len()];
    let mut idx = vec![0; grid.ndim()];
    for b in 0..count {
        let src = spectrum.channel(b);
        let dst = &mut data[b * src.len()..(b + 1) * src.len()];
        for (x, slot) in dst.iter_mut().enumerate() {
            grid.unravel(x, &mut idx);
            let k = idx[axis];
            let at = |kk: usize| src[x - k * stride + kk * stride];
            *slot = if cyclic {
                (at((k + 1) % len) - at((k + len - 1) % len)) / (2.0 * dw)
            } else if k == 0 {
                (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * dw)
            } else if k == len - 1 {
                (3.0 * at(len - 1) - 4.0 * at(len - 2) + at(len - 3)) / (2.0 * dw)
            } else {
                (at(k + 1) - at(k - 1)) / (2.0 * dw)
            };
        }
    }
    MultivectorField::from_data(spectrum.signature(), grid, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BladeIndex;
    use crate::field::{generate, SignalKind};
    use crate::roots::{sample_root, verify_root};

    fn sig(p: usize, q: usize) -> AlgebraSignature {
        AlgebraSignature::new(p, q).unwrap()
    }

    fn root(s: AlgebraSignature, mask: usize) -> RootOfMinusOne {
        verify_root(
            &Multivector::blade(s, BladeIndex(mask), 1.0).unwrap(),
            1e-12,
        )
        .unwrap()
    }

    fn cyclic_plan(
        s: AlgebraSignature,
        f: RootOfMinusOne,
        g: RootOfMinusOne,
        left: &[usize],
        dims: Vec<usize>,
    ) -> CftPlan {
        let phase = PhaseFunctions::new(s.dim(), left).unwrap();
        CftPlan::new(
            f,
            g,
            phase,
            GridGeometry::cyclic(dims).unwrap(),
            EvalMode::Direct,
        )
        .unwrap()
    }

    #[test]
    fn phase_partition() {
        let p = PhaseFunctions::new(3, &[1, 3]).unwrap();
        assert_eq!(p.left_axes(), vec![1, 3]);
        assert_eq!(p.right_axes(), vec![2]);
        let (x, w) = ([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]);
        assert_eq!(p.u(&x, &w), 22.0);
        assert_eq!(p.v(&x, &w), 10.0);
        assert!(PhaseFunctions::new(2, &[3]).is_err());
        assert_eq!(PhaseFunctions::split_at(3, 1).unwrap().left_axes(), vec![1]);
    }

    #[test]
    fn fft_mode_needs_cyclic_grid() {
        let s = sig(0, 1);
        let grid = GridGeometry::quadrature(vec![8], vec![(-1.0, 1.0)]).unwrap();
        let err = CftPlan::new(
            root(s, 1),
            root(s, 1),
            PhaseFunctions::all_left(1),
            grid,
            EvalMode::Fft,
        );
        assert!(matches!(err, Err(Error::NonCyclicGrid)));
    }

    #[test]
    fn delta_gives_constant_spectrum() {
        let s = sig(0, 2);
        let plan = cyclic_plan(s, root(s, 1), root(s, 2), &[1], vec![4, 6]);
        let amp = Multivector::random(s, &mut rand::rng());
        let delta = generate(
            &SignalKind::Delta {
                index: vec![0, 0],
                amplitude: amp.clone(),
            },
            s,
            plan.grid(),
        )
        .unwrap();
        for spectrum in [
            cft_forward_direct(&delta, &plan).unwrap(),
            cft_forward_fft(&delta, &plan).unwrap(),
        ] {
            for w in 0..spectrum.len() {
                assert!(spectrum.point(w).approx_eq(&amp, 1e-13));
            }
        }
    }

    #[test]
    fn constant_concentrates_at_zero_frequency() {
        let s = sig(3, 0);
        let plan = cyclic_plan(s, root(s, 0b011), root(s, 0b110), &[2], vec![3, 4, 5]);
        let one = generate(
            &SignalKind::Constant {
                amplitude: Multivector::one(s),
            },
            s,
            plan.grid(),
        )
        .unwrap();
        let spectrum = cft_forward_direct(&one, &plan).unwrap();
        assert!(spectrum
            .point(0)
            .approx_eq(&Multivector::scalar(s, 60.0), 1e-13));
        for w in 1..spectrum.len() {
            assert!(spectrum.point(w).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_textbook_dft_in_cl01() {
        let s = sig(0, 1);
        let e1 = root(s, 1);
        let n = 12;
        let grid = GridGeometry::cyclic(vec![n]).unwrap();
        let h = generate(&SignalKind::Random { seed: 17 }, s, &grid).unwrap();
        // scalar signal only
        let samples: Vec<f64> = h.channel(0).to_vec();
        let scalar = MultivectorField::from_data(
            s,
            grid.clone(),
            samples
                .iter()
                .copied()
                .chain(std::iter::repeat(0.0).take(n))
                .collect(),
        )
        .unwrap();
        let plan = CftPlan::new(
            e1.clone(),
            e1,
            PhaseFunctions::all_left(1),
            grid,
            EvalMode::Direct,
        )
        .unwrap();
        let spectrum = cft_forward_direct(&scalar, &plan).unwrap();
        for m in 0..n {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &x) in samples.iter().enumerate() {
                let t = -2.0 * PI * (j * m) as f64 / n as f64;
                re += x * t.cos();
                im += x * t.sin();
            }
            let got = spectrum.point(m);
            assert!((got.coeffs()[0] - re).abs() < 1e-12);
            assert!((got.coeffs()[1] - im).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_direct_with_sampled_roots() {
        for (p, q, dims) in [
            (0, 2, vec![5, 4]),
            (3, 0, vec![3, 4, 2]),
            (1, 1, vec![6, 3]),
        ] {
            let s = sig(p, q);
            let f = sample_root(s, 11, None).unwrap();
            let g = sample_root(s, 12, None).unwrap();
            for left in [vec![], vec![1], vec![2], vec![1, 2]] {
                let plan = cyclic_plan(s, f.clone(), g.clone(), &left, dims.clone());
                let h = generate(&SignalKind::Random { seed: 5 }, s, plan.grid()).unwrap();
                let direct = cft_forward_direct(&h, &plan).unwrap();
                let fast = cft_forward_fft(&h, &plan).unwrap();
                assert!(
                    fast.relative_error(&direct).unwrap() < 1e-12,
                    "{s} {left:?}"
                );
                let spectra = TrigSpectra::compute(&h, &plan).unwrap();
                let quad = spectra.exp_exp(1.0, 1.0).unwrap();
                assert!(quad.relative_error(&direct).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_round_trip_both_modes() {
        let s = sig(1, 2);
        let f = sample_root(s, 1, None).unwrap();
        let g = sample_root(s, 2, None).unwrap();
        let plan = cyclic_plan(s, f, g, &[1, 3], vec![3, 4, 2]);
        let h = generate(&SignalKind::Random { seed: 8 }, s, plan.grid()).unwrap();
        for mode in [EvalMode::Direct, EvalMode::Fft] {
            let plan = plan.clone().with_mode(mode).unwrap();
            let back = cft_inverse(&cft_forward(&h, &plan).unwrap(), &plan).unwrap();
            assert!(back.relative_error(&h).unwrap() < 1e-12);
            let back = execute(&execute(&h, &plan).unwrap(), &plan.inverted()).unwrap();
            assert!(back.relative_error(&h).unwrap() < 1e-12);
        }
        let zero = MultivectorField::zeros(s, plan.grid().clone()).unwrap();
        assert!(cft_inverse(&zero, &plan)
            .unwrap()
            .data()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn inverse_of_constant_spectrum_is_delta() {
        let s = sig(0, 2);
        let plan = cyclic_plan(s, root(s, 1), root(s, 3), &[2], vec![4, 3]);
        let amp = Multivector::random(s, &mut rand::rng());
        let flat = generate(
            &SignalKind::Constant {
                amplitude: amp.clone(),
            },
            s,
            plan.grid(),
        )
        .unwrap();
        let h = cft_inverse(&flat, &plan.clone().with_mode(EvalMode::Fft).unwrap()).unwrap();
        assert!(h.point(0).approx_eq(&amp, 1e-13));
        for x in 1..h.len() {
            assert!(h.point(x).norm() < 1e-13);
        }
    }

    #[test]
    fn wrong_direction_is_rejected() {
        let s = sig(0, 2);
        let plan = cyclic_plan(s, root(s, 1), root(s, 2), &[1], vec![2, 2]).inverted();
        let h = MultivectorField::zeros(s, plan.grid().clone()).unwrap();
        assert!(matches!(
            cft_forward_direct(&h, &plan),
            Err(Error::WrongDirection { .. })
        ));
    }

    #[test]
    fn quadrature_inverse_recovers_gaussian() {
        let s = sig(0, 1);
        let e1 = root(s, 1);
        let grid = GridGeometry::quadrature(vec![64], vec![(-8.0, 8.0)]).unwrap();
        let h = generate(
            &SignalKind::Gaussian {
                amplitude: Multivector::one(s),
                sigma: vec![1.0],
                center: vec![0.5],
            },
            s,
            &grid,
        )
        .unwrap();
        let plan = CftPlan::new(
            e1.clone(),
            e1,
            PhaseFunctions::all_left(1),
            grid,
            EvalMode::Direct,
        )
        .unwrap();
        let spectrum = cft_forward(&h, &plan).unwrap();
        // ∫ exp(-x²/2) dx = √(2π)
        let peak = spectrum.point(32).norm();
        assert!((peak - (2.0 * PI).sqrt()).abs() < 1e-10);
        let back = cft_inverse(&spectrum, &plan).unwrap();
        assert!(back.relative_error(&h).unwrap() < 1e-10);
    }

    #[test]
    fn spectral_operations_of_zero_and_bad_axis() {
        let s = sig(0, 2);
        let grid = GridGeometry::quadrature(vec![8, 8], vec![(-4.0, 4.0); 2]).unwrap();
        let plan = CftPlan::new(
            root(s, 1),
            root(s, 2),
            PhaseFunctions::new(2, &[1]).unwrap(),
            grid,
            EvalMode::Direct,
        )
        .unwrap();
        let zero = MultivectorField::zeros(s, plan.grid().clone()).unwrap();
        for axis in [1, 2] {
            assert!(spectral_derivative(&zero, axis, &plan)
                .unwrap()
                .data()
                .iter()
                .all(|&v| v == 0.0));
            assert!(spectral_moment(&zero, axis, &plan)
                .unwrap()
                .data()
                .iter()
                .all(|&v| v == 0.0));
        }
        assert!(matches!(
            spectral_derivative(&zero, 3, &plan),
            Err(Error::AxisOutOfRange { axis: 3, dim: 2 })
        ));
        assert!(spectral_moment(&zero, 0, &plan).is_err());
    }
}
