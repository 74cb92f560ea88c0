//! Cyclic convolution of multivector fields and its eight-term spectral form.
//!
//! With `a = a₊f + a₋f` split by commutation with `f` and `b = b₊g + b₋g`
//! by commutation with `g`, the transform of `a * b` is
//!
//! ```text
//!   F{a₊}F{b₊}         + F^{f,-g}{a₊}F{b₋}
//! + F{a₋}F^{-f,g}{b₊}  + F^{f,-g}{a₋}F^{-f,g}{b₋}
//! + F^{f,s}{a₊}[f,g]F^{s,g}{b₊}   + F^{f,-s}{a₊}[f,g]F^{s,g}{b₋}
//! + F^{f,s}{a₋}[f,g]F^{-s,g}{b₊}  + F^{f,-s}{a₋}[f,g]F^{-s,g}{b₋}
//! ```
//!
//! where `s` marks a `sin(∓·)` kernel on that side in place of the exponential.

use rayon::prelude::*;
use serde::Serialize;

use crate::cft::{cft_forward, direct_sum, CftPlan, Direction, EvalMode, Factor, TrigSpectra};
use crate::error::{Error, Result};
use crate::field::MultivectorField;
use crate::split::split_field_commuting;

pub use crate::split::commutator;

/// `(a * b)(x) = Σ_y a(y) b(x - y)` on a cyclic grid, geometric product
/// pointwise.
pub fn convolve(a: &MultivectorField, b: &MultivectorField) -> Result<MultivectorField> {
    a.check_compatible(b)?;
    let grid = a.grid().clone();
    if !grid.is_cyclic() {
        return Err(Error::NonCyclicGrid);
    }
    let sig = a.signature();
    let count = sig.blade_count();
    let table = sig.products();
    let n = grid.ndim();
    let dims = grid.dims().to_vec();
    let (ap, bp) = (a.to_point_major(), b.to_point_major());
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|x| {
            let mut xi = vec![0; n];
            let mut yi = vec![0; n];
            let mut di = vec![0; n];
            grid.unravel(x, &mut xi);
            let mut acc = vec![0.0; count];
            for y in 0..grid.len() {
                grid.unravel(y, &mut yi);
                for l in 0..n {
                    di[l] = (xi[l] + dims[l] - yi[l]) % dims[l];
                }
                let d = grid.ravel(&di);
                table.mul_acc(
                    &ap[y * count..(y + 1) * count],
                    &bp[d * count..(d + 1) * count],
                    &mut acc,
                );
            }
            acc.into_iter()
        })
        .collect();
    MultivectorField::from_point_major(sig, grid, &out)
}

/// One side of a transform kernel, relative to the plan's roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    /// `exp(-r θ)`.
    Exp,
    /// `exp(+r θ)`.
    ExpNeg,
    /// `sin(-θ)`.
    Sin,
    /// `-sin(-θ)`.
    SinNeg,
}

impl Side {
    fn factor(self) -> Factor {
        match self {
            Side::Exp => Factor::Exp(-1.0),
            Side::ExpNeg => Factor::Exp(1.0),
            Side::Sin => Factor::Sine(1.0),
            Side::SinNeg => Factor::Sine(-1.0),
        }
    }

    /// Sign of the root in the transform's name, or of the sine.
    fn sign(self) -> f64 {
        match self {
            Side::Exp | Side::Sin => 1.0,
            Side::ExpNeg | Side::SinNeg => -1.0,
        }
    }

    fn is_exp(self) -> bool {
        matches!(self, Side::Exp | Side::ExpNeg)
    }
}

/// Transform of `h` with the given left and right kernels.
struct Transformer<'a> {
    plan: &'a CftPlan,
    spectra: Option<TrigSpectra>,
    h: &'a MultivectorField,
}

impl<'a> Transformer<'a> {
    fn new(h: &'a MultivectorField, plan: &'a CftPlan) -> Result<Self> {
        let spectra = match plan.mode() {
            EvalMode::Fft => Some(TrigSpectra::compute(h, plan)?),
            EvalMode::Direct => None,
        };
        Ok(Self { plan, spectra, h })
    }

    fn apply(&self, left: Side, right: Side) -> Result<MultivectorField> {
        match &self.spectra {
            None => direct_sum(
                self.h,
                self.plan,
                left.factor(),
                right.factor(),
                Direction::Forward,
            ),
            Some(s) => match (left.is_exp(), right.is_exp()) {
                (true, true) => s.exp_exp(left.sign(), right.sign()),
                (true, false) => s.exp_sine(left.sign(), right.sign()),
                (false, true) => s.sine_exp(left.sign(), right.sign()),
                (false, false) => Err(Error::InvalidParams(
                    "sine kernels on both sides are not supported".into(),
                )),
            },
        }
    }
}

/// `F^{f,±s}{h}(ω) = Σ exp(-f u) h (±sin(-v)) dV`.
pub fn cft_exp_sine(h: &MultivectorField, plan: &CftPlan, sign: f64) -> Result<MultivectorField> {
    let side = if sign >= 0.0 { Side::Sin } else { Side::SinNeg };
    Transformer::new(h, plan)?.apply(Side::Exp, side)
}

/// `F^{±s,g}{h}(ω) = Σ (±sin(-u)) h exp(-g v) dV`.
pub fn cft_sine_exp(h: &MultivectorField, plan: &CftPlan, sign: f64) -> Result<MultivectorField> {
    let side = if sign >= 0.0 { Side::Sin } else { Side::SinNeg };
    Transformer::new(h, plan)?.apply(side, Side::Exp)
}

/// The eight spectral terms, in the order of the module docs.
pub fn convolution_terms(
    a: &MultivectorField,
    b: &MultivectorField,
    plan: &CftPlan,
) -> Result<Vec<MultivectorField>> {
    a.check_compatible(b)?;
    let (a_plus, a_minus) = split_field_commuting(a, plan.f())?;
    let (b_plus, b_minus) = split_field_commuting(b, plan.g())?;
    let ta = [
        Transformer::new(&a_plus, plan)?,
        Transformer::new(&a_minus, plan)?,
    ];
    let tb = [
        Transformer::new(&b_plus, plan)?,
        Transformer::new(&b_minus, plan)?,
    ];
    let bracket = commutator(plan.f().value(), plan.g().value())?;

    use Side::*;
    // (a part, left kernels, b part, right kernels, commutator in between)
    let layout = [
        (0, (Exp, Exp), 0, (Exp, Exp), false),
        (0, (Exp, ExpNeg), 1, (Exp, Exp), false),
        (1, (Exp, Exp), 0, (ExpNeg, Exp), false),
        (1, (Exp, ExpNeg), 1, (ExpNeg, Exp), false),
        (0, (Exp, Sin), 0, (Sin, Exp), true),
        (0, (Exp, SinNeg), 1, (Sin, Exp), true),
        (1, (Exp, Sin), 0, (SinNeg, Exp), true),
        (1, (Exp, SinNeg), 1, (SinNeg, Exp), true),
    ];
    layout
        .iter()
        .map(|&(ia, (al, ar), ib, (bl, br), with_bracket)| {
            let left = ta[ia].apply(al, ar)?;
            let right = tb[ib].apply(bl, br)?;
            pointwise_product(&left, &right, with_bracket.then_some(&bracket))
        })
        .collect()
}

fn pointwise_product(
    left: &MultivectorField,
    right: &MultivectorField,
    middle: Option<&crate::algebra::Multivector>,
) -> Result<MultivectorField> {
    left.check_compatible(right)?;
    left.map_points(|w, l| match middle {
        Some(m) => &(l * m) * &right.point(w),
        None => l * &right.point(w),
    })
}

/// Sum of the eight spectral terms.
pub fn convolution_rhs(
    a: &MultivectorField,
    b: &MultivectorField,
    plan: &CftPlan,
) -> Result<MultivectorField> {
    let terms = convolution_terms(a, b, plan)?;
    sum_fields(&terms)
}

fn sum_fields(terms: &[MultivectorField]) -> Result<MultivectorField> {
    let mut total = terms[0].clone();
    for t in &terms[1..] {
        total = total.add(t)?;
    }
    Ok(total)
}

/// Both sides of the convolution identity for one input pair.
#[derive(Clone, Debug)]
pub struct ConvolutionCheck {
    pub lhs: MultivectorField,
    pub rhs: MultivectorField,
    pub terms: Vec<MultivectorField>,
}

impl ConvolutionCheck {
    pub fn relative_error(&self) -> f64 {
        self.rhs
            .relative_error(&self.lhs)
            .expect("both sides share a grid")
    }

    pub fn report(&self) -> ConvolutionReport {
        let sig = self.lhs.signature();
        ConvolutionReport {
            p: sig.p(),
            q: sig.q(),
            dims: self.lhs.grid().dims().to_vec(),
            relative_error: self.relative_error(),
            lhs_norm: self.lhs.coefficient_norm(),
            rhs_norm: self.rhs.coefficient_norm(),
            term_norms: self.terms.iter().map(|t| t.coefficient_norm()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionReport {
    pub p: usize,
    pub q: usize,
    pub dims: Vec<usize>,
    pub relative_error: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub term_norms: Vec<f64>,
}

/// Transform of `a * b` against the eight-term sum.
pub fn verify_convolution_theorem(
    a: &MultivectorField,
    b: &MultivectorField,
    plan: &CftPlan,
) -> Result<ConvolutionCheck> {
    let lhs = cft_forward(&convolve(a, b)?, plan)?;
    let terms = convolution_terms(a, b, plan)?;
    let rhs = sum_fields(&terms)?;
    Ok(ConvolutionCheck { lhs, rhs, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraSignature, BladeIndex, Multivector};
    use crate::cft::PhaseFunctions;
    use crate::field::{generate, GridGeometry, SignalKind};
    use crate::roots::{sample_root, verify_root, RootOfMinusOne};

    fn sig(p: usize, q: usize) -> AlgebraSignature {
        AlgebraSignature::new(p, q).unwrap()
    }

    fn plan(
        f: RootOfMinusOne,
        g: RootOfMinusOne,
        left: &[usize],
        dims: Vec<usize>,
        mode: EvalMode,
    ) -> CftPlan {
        let n = f.signature().dim();
        CftPlan::new(
            f,
            g,
            PhaseFunctions::new(n, left).unwrap(),
            GridGeometry::cyclic(dims).unwrap(),
            mode,
        )
        .unwrap()
    }

    #[test]
    fn delta_is_identity() {
        let s = sig(0, 2);
        let grid = GridGeometry::cyclic(vec![3, 4]).unwrap();
        let h = generate(&SignalKind::Random { seed: 1 }, s, &grid).unwrap();
        let delta = generate(
            &SignalKind::Delta {
                index: vec![0, 0],
                amplitude: Multivector::one(s),
            },
            s,
            &grid,
        )
        .unwrap();
        assert_eq!(convolve(&h, &delta).unwrap(), h);
        assert_eq!(convolve(&delta, &h).unwrap(), h);
    }

    #[test]
    fn shifted_delta_shifts() {
        let s = sig(1, 1);
        let grid = GridGeometry::cyclic(vec![5, 3]).unwrap();
        let h = generate(&SignalKind::Random { seed: 4 }, s, &grid).unwrap();
        let delta = generate(
            &SignalKind::Delta {
                index: vec![2, 1],
                amplitude: Multivector::one(s),
            },
            s,
            &grid,
        )
        .unwrap();
        let c = convolve(&h, &delta).unwrap();
        for i in 0..5 {
            for j in 0..3 {
                let src = [(i + 3) % 5, (j + 2) % 3];
                assert_eq!(c.point_at(&[i, j]), h.point_at(&src));
            }
        }
    }

    #[test]
    fn quadrature_grid_is_rejected() {
        let s = sig(0, 1);
        let grid = GridGeometry::quadrature(vec![4], vec![(0.0, 1.0)]).unwrap();
        let h = MultivectorField::zeros(s, grid).unwrap();
        assert!(matches!(convolve(&h, &h), Err(Error::NonCyclicGrid)));
    }

    #[test]
    fn sine_transforms_fft_match_direct() {
        let s = sig(3, 0);
        let f = sample_root(s, 3, None).unwrap();
        let g = sample_root(s, 4, None).unwrap();
        let direct = plan(f, g, &[1, 3], vec![3, 4, 2], EvalMode::Direct);
        let fast = direct.clone().with_mode(EvalMode::Fft).unwrap();
        let h = generate(&SignalKind::Random { seed: 6 }, s, direct.grid()).unwrap();
        for sign in [1.0, -1.0] {
            let a = cft_exp_sine(&h, &direct, sign).unwrap();
            let b = cft_exp_sine(&h, &fast, sign).unwrap();
            assert!(b.relative_error(&a).unwrap() < 1e-12);
            let a = cft_sine_exp(&h, &direct, sign).unwrap();
            let b = cft_sine_exp(&h, &fast, sign).unwrap();
            assert!(b.relative_error(&a).unwrap() < 1e-12);
        }
    }

    #[test]
    fn commuting_roots_drop_the_bracket_terms() {
        let s = sig(0, 2);
        let e12 = verify_root(&Multivector::blade(s, BladeIndex(3), 1.0).unwrap(), 1e-12).unwrap();
        let p = plan(e12.clone(), e12, &[1], vec![4, 3], EvalMode::Fft);
        let a = generate(&SignalKind::Random { seed: 1 }, s, p.grid()).unwrap();
        let b = generate(&SignalKind::Random { seed: 2 }, s, p.grid()).unwrap();
        let check = verify_convolution_theorem(&a, &b, &p).unwrap();
        for t in &check.terms[4..] {
            assert!(t.coefficient_norm() == 0.0);
        }
        assert!(check.relative_error() < 1e-10);
    }

    #[test]
    fn theorem_holds_for_sampled_roots() {
        for (p, q, dims, left) in [
            (0, 2, vec![4, 3], vec![1]),
            (3, 0, vec![3, 2, 3], vec![2]),
            (1, 1, vec![5, 2], vec![]),
            (0, 3, vec![2, 3, 2], vec![1, 2, 3]),
        ] {
            let s = sig(p, q);
            let f = sample_root(s, 21, None).unwrap();
            let g = sample_root(s, 22, None).unwrap();
            for mode in [EvalMode::Direct, EvalMode::Fft] {
                let pl = plan(f.clone(), g.clone(), &left, dims.clone(), mode);
                let a = generate(&SignalKind::Random { seed: 7 }, s, pl.grid()).unwrap();
                let b = generate(&SignalKind::Random { seed: 8 }, s, pl.grid()).unwrap();
                let check = verify_convolution_theorem(&a, &b, &pl).unwrap();
                assert!(
                    check.relative_error() < 1e-10,
                    "{s} {mode:?}: {}",
                    check.relative_error()
                );
                let report = check.report();
                assert_eq!(report.term_norms.len(), 8);
            }
        }
    }
}
