//! Square roots of -1 in Cl(p,q): certification, the two-dimensional root
//! families, conjugation sampling, and classification by matrix ring.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    exp_unchecked, root_residual, AlgebraSignature, BladeIndex, Multivector, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};

/// Random conjugating elements above this condition number are redrawn.
pub const SAMPLE_MAX_CONDITION: f64 = 1e6;

/// Tolerance on `|Spec(f) - k/d|` for exceptional-root detection.
pub const SPEC_TOLERANCE: f64 = 1e-8;

const MAX_SAMPLE_ATTEMPTS: usize = 64;

/// Ring of the matrix algebra that Cl(p,q) is isomorphic to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    R,
    R2,
    C,
    H,
    H2,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Ring::R => "R",
            Ring::R2 => "R^2",
            Ring::C => "C",
            Ring::H => "H",
            Ring::H2 => "H^2",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingClass {
    /// `(p - q) mod 8`.
    pub s8: u8,
    pub ring: Ring,
    /// Block dimension: `2^((n-2)/2)` for even `n`, `2^((n-3)/2)` for odd `n`.
    /// Equals one half for `n = 1`.
    pub d: f64,
}

impl RingClass {
    /// Size of the square matrices over [`RingClass::ring`].
    pub fn matrix_size(&self) -> f64 {
        match self.ring {
            Ring::R | Ring::R2 | Ring::C => 2.0 * self.d,
            Ring::H | Ring::H2 => self.d,
        }
    }
}

impl fmt::Display for RingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M({}, {}) [s8={}, d={}]",
            self.matrix_size(),
            self.ring,
            self.s8,
            self.d
        )
    }
}

pub fn classify_algebra(sig: AlgebraSignature) -> RingClass {
    let s8 = (sig.p() as i64 - sig.q() as i64).rem_euclid(8) as u8;
    let ring = match s8 {
        0 | 2 => Ring::R,
        1 => Ring::R2,
        3 | 7 => Ring::C,
        4 | 6 => Ring::H,
        5 => Ring::H2,
        _ => unreachable!(),
    };
    let n = sig.dim() as i32;
    let d = if n % 2 == 0 {
        2f64.powi((n - 2) / 2)
    } else {
        2f64.powi((n - 3).div_euclid(2))
    };
    RingClass { s8, ring, d }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootKind {
    Ordinary,
    Exceptional { k: i32 },
    Unknown,
}

impl fmt::Display for RootKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootKind::Ordinary => f.write_str("ordinary"),
            RootKind::Exceptional { k } => write!(f, "exceptional(k={k})"),
            RootKind::Unknown => f.write_str("unknown"),
        }
    }
}

/// A multivector certified to square to -1.
#[derive(Clone, Debug, PartialEq)]
pub struct RootOfMinusOne {
    value: Multivector,
    residual: f64,
    spec: f64,
    kind: RootKind,
}

impl RootOfMinusOne {
    pub fn value(&self) -> &Multivector {
        &self.value
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.value.signature()
    }

    /// `|f^2 + 1|` at certification time.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Pseudoscalar coefficient, `Spec(f)`.
    pub fn spec(&self) -> f64 {
        self.spec
    }

    pub fn kind(&self) -> RootKind {
        self.kind
    }

    /// `-f`, again a square root of -1.
    pub fn negated(&self) -> RootOfMinusOne {
        let value = -&self.value;
        let spec = -self.spec;
        RootOfMinusOne {
            kind: kind_of(value.signature(), spec),
            value,
            residual: self.residual,
            spec,
        }
    }

    /// `exp(angle f) = cos(angle) + f sin(angle)`.
    pub fn exp(&self, angle: f64) -> Multivector {
        exp_unchecked(&self.value, angle)
    }

    /// Whether the principal reverse of `f` equals `-f` within `tol`.
    pub fn is_reverse_antisymmetric(&self, tol: f64) -> bool {
        let rev = self.value.principal_reverse();
        rev.approx_eq(&-&self.value, tol)
    }

    pub fn to_record(&self) -> RootRecord {
        let sig = self.signature();
        RootRecord {
            p: sig.p(),
            q: sig.q(),
            coeffs: self.value.coeffs().to_vec(),
            residual: Some(self.residual),
            spec: Some(self.spec),
            kind: Some(self.kind),
        }
    }
}

impl fmt::Display for RootOfMinusOne {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}; residual {:.2e}, spec {}]",
            self.value, self.kind, self.residual, self.spec
        )
    }
}

/// JSON form of a root: `{p, q, coeffs, residual, spec, kind}`. The last three
/// are informational and recomputed on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub p: usize,
    pub q: usize,
    pub coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<RootKind>,
}

impl RootRecord {
    pub fn multivector(&self) -> Result<Multivector> {
        let sig = AlgebraSignature::new(self.p, self.q)?;
        Multivector::from_coeffs(sig, self.coeffs.clone())
    }

    pub fn verify(&self, tol: f64) -> Result<RootOfMinusOne> {
        verify_root(&self.multivector()?, tol)
    }
}

fn kind_of(sig: AlgebraSignature, spec: f64) -> RootKind {
    let class = classify_algebra(sig);
    if class.ring != Ring::C || spec.abs() <= SPEC_TOLERANCE {
        return RootKind::Ordinary;
    }
    // Spec(f) = k/d with 0 < |k| <= d
    let k = (spec * class.d).round();
    if k != 0.0 && k.abs() <= class.d && (spec - k / class.d).abs() <= SPEC_TOLERANCE {
        RootKind::Exceptional { k: k as i32 }
    } else {
        RootKind::Unknown
    }
}

/// Certify `f` as a square root of -1 with `|f^2 + 1| <= tol`.
pub fn verify_root(f: &Multivector, tol: f64) -> Result<RootOfMinusOne> {
    let residual = root_residual(f);
    if !(residual <= tol) {
        return Err(Error::NotARoot { residual });
    }
    let sig = f.signature();
    let spec = f.get(sig.pseudoscalar());
    Ok(RootOfMinusOne {
        value: f.clone(),
        residual,
        spec,
        kind: kind_of(sig, spec),
    })
}

/// Sheet selector for the `beta` coefficient of the n = 2 family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

/// `beta^2 = b1^2 e2^2 + b2^2 e1^2 + e1^2 e2^2` for the n = 2 family.
pub fn family_n2_beta_squared(sig: AlgebraSignature, b1: f64, b2: f64) -> f64 {
    let (eps1, eps2) = (sig.square(1), sig.square(2));
    b1 * b1 * eps2 + b2 * b2 * eps1 + eps1 * eps2
}

/// The root `b1 e1 + b2 e2 + beta e12` of a two-dimensional algebra.
pub fn root_family_n2(
    sig: AlgebraSignature,
    b1: f64,
    b2: f64,
    branch: Branch,
) -> Result<RootOfMinusOne> {
    if sig.dim() != 2 {
        return Err(Error::InvalidParams(format!(
            "the two-parameter root family needs n = 2, got {sig}"
        )));
    }
    let beta_sq = family_n2_beta_squared(sig, b1, b2);
    if beta_sq < 0.0 {
        return Err(Error::OffManifold { beta_sq });
    }
    let beta = branch.sign() * beta_sq.sqrt();
    let f = Multivector::from_coeffs(sig, vec![0.0, b1, b2, beta])?;
    verify_root(&f, residual_tolerance(&f))
}

/// Absolute residual budget for a root of the given magnitude.
fn residual_tolerance(f: &Multivector) -> f64 {
    DEFAULT_TOLERANCE * f.modulus_squared().max(1.0)
}

/// Default base root: `e12` when it squares to -1, otherwise a root of the
/// family spanned by `e1, e2`; `e1` for Cl(0,1).
pub fn canonical_root(sig: AlgebraSignature) -> Result<RootOfMinusOne> {
    if sig.dim() == 1 {
        let e1 = Multivector::basis_vector(sig, 1)?;
        return verify_root(&e1, DEFAULT_TOLERANCE).map_err(|_| Error::NoCanonicalRoot { sig });
    }
    let (eps1, eps2) = (sig.square(1), sig.square(2));
    let e12 = BladeIndex(0b11);
    if eps1 * eps2 > 0.0 {
        let f = Multivector::blade(sig, e12, 1.0)?;
        return verify_root(&f, DEFAULT_TOLERANCE);
    }
    // e1^2 = +1, e2^2 = -1: (b1, b2) = (0, 1) gives beta = 0, i.e. f = e2.
    let beta_sq = family_n2_beta_squared(sig, 0.0, 1.0);
    if beta_sq < 0.0 {
        return Err(Error::NoCanonicalRoot { sig });
    }
    let mut coeffs = vec![0.0; sig.blade_count()];
    coeffs[0b10] = 1.0;
    coeffs[0b11] = beta_sq.sqrt();
    let f = Multivector::from_coeffs(sig, coeffs)?;
    verify_root(&f, DEFAULT_TOLERANCE).map_err(|_| Error::NoCanonicalRoot { sig })
}

/// Random conjugate `a base a^-1` with `a` drawn deterministically from `seed`.
pub fn sample_root(
    sig: AlgebraSignature,
    seed: u64,
    base: Option<&Multivector>,
) -> Result<RootOfMinusOne> {
    let base = match base {
        Some(b) => {
            sig.check_same(b.signature())?;
            verify_root(b, residual_tolerance(b))?
        }
        None => canonical_root(sig)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SAMPLE_ATTEMPTS {
        let a = Multivector::random(sig, &mut rng);
        if !(a.condition_number() <= SAMPLE_MAX_CONDITION) {
            continue;
        }
        let Ok(inv) = a.inverse() else { continue };
        let f = &(&a * base.value()) * &inv;
        if let Ok(root) = verify_root(&f, DEFAULT_TOLERANCE) {
            return Ok(root);
        }
    }
    Err(Error::SamplingFailed {
        attempts: MAX_SAMPLE_ATTEMPTS,
    })
}

/// Conjugate a certified root by an explicit invertible element.
pub fn conjugate_root(f: &RootOfMinusOne, a: &Multivector) -> Result<RootOfMinusOne> {
    let inv = a.inverse()?;
    let g = &a.geometric_product(f.value())? * &inv;
    verify_root(&g, residual_tolerance(&g))
}
