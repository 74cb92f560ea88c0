//! Clifford algebras `Cl(p,q)`, their square roots of -1, and the two-sided
//! Clifford Fourier transform of multivector fields.
//!
//! ```
//! use clifft_core::{AlgebraSignature, canonical_root};
//!
//! let sig = AlgebraSignature::new(0, 2).unwrap();
//! let f = canonical_root(sig).unwrap();
//! let sq = f.value() * f.value();
//! assert!((sq.scalar_part() + 1.0).abs() < 1e-12);
//! ```

// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cft;
pub mod convolution;
pub mod error;
pub mod field;
pub mod roots;
pub mod split;

pub use algebra::{
    exp_root, root_residual, AlgebraSignature, BladeIndex, Multivector, ProductTable,
};
pub use cft::{
    cft_forward, cft_forward_direct, cft_forward_fft, cft_inverse, execute, spectral_derivative,
    spectral_moment, CftPlan, Direction, EvalMode, PhaseFunctions, TrigSpectra,
};
pub use convolution::{
    cft_exp_sine, cft_sine_exp, convolution_rhs, convolution_terms, convolve,
    verify_convolution_theorem, ConvolutionCheck, ConvolutionReport,
};
pub use error::{Error, Result};
pub use field::io::{load_field, read_field, save_field, write_field};
pub use field::{
    field_inner_product, field_norm, field_scalar_inner, generate, GridGeometry, GridMode,
    MultivectorField, SignalKind,
};
pub use roots::{
    canonical_root, classify_algebra, conjugate_root, family_n2_beta_squared, root_family_n2,
    sample_root, verify_root, Branch, Ring, RingClass, RootKind, RootOfMinusOne, RootRecord,
};
pub use split::{
    commutator, split_commuting, split_field, split_field_commuting, split_pm, SplitPair,
};
