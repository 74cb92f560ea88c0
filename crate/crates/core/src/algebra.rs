//! Dense real Clifford algebras Cl(p,q).
//!
//! Basis blades are addressed by bitmask: bit `i-1` set means the basis vector
//! `e_i` is a factor. Factors are always kept in ascending index order, and the
//! coefficient array of a [`Multivector`] is indexed by that mask. The first `p`
//! basis vectors square to `+1`, the remaining `q` to `-1`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension `p + q`.
pub const MAX_DIM: usize = 12;

/// Signatures up to this dimension get a memoized sign table (4^n entries).
const TABLE_MAX_DIM: usize = 8;

/// Default relative tolerance for floating-point comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Condition number above which [`Multivector::inverse`] gives up.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSignature", into = "RawSignature")]
pub struct AlgebraSignature {
    p: u8,
    q: u8,
}

#[derive(Serialize, Deserialize)]
struct RawSignature {
    p: usize,
    q: usize,
}

impl TryFrom<RawSignature> for AlgebraSignature {
    type Error = Error;

    fn try_from(raw: RawSignature) -> Result<Self> {
        AlgebraSignature::new(raw.p, raw.q)
    }
}

impl From<AlgebraSignature> for RawSignature {
    fn from(sig: AlgebraSignature) -> Self {
        RawSignature {
            p: sig.p(),
            q: sig.q(),
        }
    }
}

impl AlgebraSignature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        let n = p + q;
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidSignature { p, q });
        }
        Ok(Self {
            p: p as u8,
            q: q as u8,
        })
    }

    pub fn p(self) -> usize {
        self.p as usize
    }

    pub fn q(self) -> usize {
        self.q as usize
    }

    /// Vector space dimension `n = p + q`.
    pub fn dim(self) -> usize {
        self.p() + self.q()
    }

    /// Number of basis blades, `2^n`.
    pub fn blade_count(self) -> usize {
        1 << self.dim()
    }

    /// Square of the basis vector `e_k` (1-based).
    pub fn square(self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.dim());
        if k <= self.p() {
            1.0
        } else {
            -1.0
        }
    }

    /// Bitmask of the basis vectors with negative square.
    pub fn negative_mask(self) -> usize {
        ((1 << self.q()) - 1) << self.p()
    }

    pub fn pseudoscalar(self) -> BladeIndex {
        BladeIndex(self.blade_count() - 1)
    }

    pub(crate) fn check_same(self, other: Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                left: self,
                right: other,
            })
        }
    }

    /// Product table for this signature, memoized for small dimensions.
    pub fn products(self) -> ProductTable {
        if self.dim() > TABLE_MAX_DIM {
            return ProductTable {
                sig: self,
                signs: None,
            };
        }
        static TABLES: OnceLock<Mutex<HashMap<AlgebraSignature, Arc<[i8]>>>> = OnceLock::new();
        let tables = TABLES.get_or_init(Default::default);
        let mut guard = tables.lock().unwrap_or_else(|e| e.into_inner());
        let signs = guard
            .entry(self)
            .or_insert_with(|| {
                let count = self.blade_count();
                let mut signs = Vec::with_capacity(count * count);
                for a in 0..count {
                    for b in 0..count {
                        signs.push(blade_sign(self, a, b));
                    }
                }
                signs.into()
            })
            .clone();
        ProductTable {
            sig: self,
            signs: Some(signs),
        }
    }
}

impl fmt::Display for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cl({},{})", self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BladeIndex(pub usize);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);

    /// Blade built from 1-based basis vector indices, in any order. Repeated
    /// indices cancel, as they would up to sign in a product.
    pub fn from_vectors(indices: &[usize]) -> Self {
        BladeIndex(indices.iter().fold(0, |m, &i| m ^ (1 << (i - 1))))
    }

    pub fn mask(self) -> usize {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 & (1 << (k - 1)) != 0
    }
}

/// Sign of `e_a e_b` relative to the canonical blade `e_{a xor b}`.
fn blade_sign(sig: AlgebraSignature, a: usize, b: usize) -> i8 {
    // Each factor of `b` has to move left past every higher factor of `a`.
    let mut swaps = 0;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    let negatives = (a & b & sig.negative_mask()).count_ones();
    if (swaps + negatives) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Product of two basis blades: `e_a e_b = sign * e_result`.
pub fn blade_product(sig: AlgebraSignature, a: BladeIndex, b: BladeIndex) -> (i8, BladeIndex) {
    (blade_sign(sig, a.0, b.0), BladeIndex(a.0 ^ b.0))
}

/// Cayley sign table of one signature.
#[derive(Clone, Debug)]
pub struct ProductTable {
    sig: AlgebraSignature,
    signs: Option<Arc<[i8]>>,
}

impl ProductTable {
    pub fn signature(&self) -> AlgebraSignature {
        self.sig
    }

    #[inline]
    pub fn sign(&self, a: usize, b: usize) -> f64 {
        let s = match &self.signs {
            Some(table) => table[(a << self.sig.dim()) | b],
            None => blade_sign(self.sig, a, b),
        };
        s as f64
    }

    /// `out += a * b` on raw coefficient slices.
    pub fn mul_acc(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        let count = self.sig.blade_count();
        debug_assert!(a.len() == count && b.len() == count && out.len() == count);
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            match &self.signs {
                Some(table) => {
                    let row = &table[i * count..(i + 1) * count];
                    for (j, &bj) in b.iter().enumerate() {
                        if bj != 0.0 {
                            out[i ^ j] += row[j] as f64 * ai * bj;
                        }
                    }
                }
                None => {
                    for (j, &bj) in b.iter().enumerate() {
                        if bj != 0.0 {
                            out[i ^ j] += blade_sign(self.sig, i, j) as f64 * ai * bj;
                        }
                    }
                }
            }
        }
    }

    /// `out = a * b` on raw coefficient slices.
    pub fn mul_into(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        self.mul_acc(a, b, out);
    }
}

/// A general element of Cl(p,q), stored densely over the blade basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multivector {
    sig: AlgebraSignature,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(sig: AlgebraSignature) -> Self {
        Self {
            sig,
            coeffs: vec![0.0; sig.blade_count()],
        }
    }

    pub fn scalar(sig: AlgebraSignature, value: f64) -> Self {
        let mut m = Self::zero(sig);
        m.coeffs[0] = value;
        m
    }

    pub fn one(sig: AlgebraSignature) -> Self {
        Self::scalar(sig, 1.0)
    }

    /// `coeff * e_blade`.
    pub fn blade(sig: AlgebraSignature, blade: BladeIndex, coeff: f64) -> Result<Self> {
        if blade.0 >= sig.blade_count() {
            return Err(Error::BladeOutOfRange { mask: blade.0, sig });
        }
        let mut m = Self::zero(sig);
        m.coeffs[blade.0] = coeff;
        Ok(m)
    }

    /// Basis vector `e_k`, 1-based.
    pub fn basis_vector(sig: AlgebraSignature, k: usize) -> Result<Self> {
        if k == 0 || k > sig.dim() {
            return Err(Error::AxisOutOfRange {
                axis: k,
                dim: sig.dim(),
            });
        }
        Self::blade(sig, BladeIndex(1 << (k - 1)), 1.0)
    }

    pub fn pseudoscalar(sig: AlgebraSignature) -> Self {
        let mut m = Self::zero(sig);
        m.coeffs[sig.pseudoscalar().0] = 1.0;
        m
    }

    pub fn from_coeffs(sig: AlgebraSignature, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != sig.blade_count() {
            return Err(Error::CoefficientCount {
                got: coeffs.len(),
                expected: sig.blade_count(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("non-finite coefficient".into()));
        }
        Ok(Self { sig, coeffs })
    }

    /// Coefficients drawn i.i.d. uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(sig: AlgebraSignature, rng: &mut R) -> Self {
        let coeffs = (0..sig.blade_count())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        Self { sig, coeffs }
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.sig
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, blade: BladeIndex) -> f64 {
        self.coeffs.get(blade.0).copied().unwrap_or(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn geometric_product(&self, other: &Multivector) -> Result<Multivector> {
        self.sig.check_same(other.sig)?;
        Ok(self.gp(other))
    }

    fn gp(&self, other: &Multivector) -> Multivector {
        let mut out = Self::zero(self.sig);
        self.sig
            .products()
            .mul_acc(&self.coeffs, &other.coeffs, &mut out.coeffs);
        out
    }

    pub fn scale(&self, s: f64) -> Multivector {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Multivector, s: f64) -> Result<Multivector> {
        self.sig.check_same(other.sig)?;
        let mut out = self.clone();
        for (o, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += s * b;
        }
        Ok(out)
    }

    /// Grade-`k` part.
    pub fn grade_project(&self, k: usize) -> Result<Multivector> {
        if k > self.sig.dim() {
            return Err(Error::GradeOutOfRange {
                grade: k,
                dim: self.sig.dim(),
            });
        }
        Ok(self.map_blades(|b, c| if b.grade() == k { c } else { 0.0 }))
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// `<ab>_0`, the bilinear extension of `A_k * B_s = <A_k B_s>_0`.
    pub fn scalar_product(&self, other: &Multivector) -> Result<f64> {
        self.sig.check_same(other.sig)?;
        // Only equal blades give a scalar.
        let table = self.sig.products();
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(i, (a, b))| table.sign(i, i) * a * b)
            .sum())
    }

    /// Outer product: per grade pair `A_k ^ B_s = <A_k B_s>_{k+s}`.
    pub fn outer_product(&self, other: &Multivector) -> Result<Multivector> {
        self.sig.check_same(other.sig)?;
        let table = self.sig.products();
        let mut out = Self::zero(self.sig);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                // Shared factors lower the grade below k+s.
                if i & j == 0 && b != 0.0 {
                    out.coeffs[i | j] += table.sign(i, j) * a * b;
                }
            }
        }
        Ok(out)
    }

    fn map_blades(&self, f: impl Fn(BladeIndex, f64) -> f64) -> Multivector {
        Multivector {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| f(BladeIndex(i), c))
                .collect(),
        }
    }

    /// Reversion: grade-k part times `(-1)^(k(k-1)/2)`.
    pub fn reverse(&self) -> Multivector {
        self.map_blades(|b, c| reverse_sign(b) * c)
    }

    /// Flips the sign of every blade with an odd number of negative-square factors.
    pub fn bar(&self) -> Multivector {
        let neg = self.sig.negative_mask();
        self.map_blades(|b, c| bar_sign(b, neg) * c)
    }

    /// Principal reverse, `reverse(bar(M))`. The two maps commute.
    pub fn principal_reverse(&self) -> Multivector {
        let neg = self.sig.negative_mask();
        self.map_blades(|b, c| reverse_sign(b) * bar_sign(b, neg) * c)
    }

    /// `|M|^2 = M * principal_reverse(M) = sum_A M_A^2`.
    pub fn modulus_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Euclidean coefficient norm `|M|`.
    pub fn norm(&self) -> f64 {
        self.modulus_squared().sqrt()
    }

    /// Matrix of `x -> self * x` in the blade basis.
    fn left_matrix(&self) -> DMatrix<f64> {
        let count = self.sig.blade_count();
        let table = self.sig.products();
        let mut mat = DMatrix::zeros(count, count);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for j in 0..count {
                mat[(i ^ j, j)] += table.sign(i, j) * a;
            }
        }
        mat
    }

    /// 2-norm condition number of left multiplication by `self`.
    pub fn condition_number(&self) -> f64 {
        condition_of(&self.left_matrix())
    }

    /// Two-sided inverse via the linear system `L_self x = 1`.
    pub fn inverse(&self) -> Result<Multivector> {
        let mat = self.left_matrix();
        let condition = condition_of(&mat);
        if !(condition <= SINGULAR_CONDITION) {
            return Err(Error::SingularElement { condition });
        }
        let mut rhs = DVector::zeros(self.sig.blade_count());
        rhs[0] = 1.0;
        let x = mat
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularElement { condition })?;
        let inv = Multivector {
            sig: self.sig,
            coeffs: x.iter().copied().collect(),
        };
        if !inv.is_finite() {
            return Err(Error::SingularElement { condition });
        }
        Ok(inv)
    }

    /// `|self - other| <= tol * max(1, |self|, |other|)`.
    pub fn approx_eq(&self, other: &Multivector, tol: f64) -> bool {
        if self.sig != other.sig {
            return false;
        }
        let scale = self.norm().max(other.norm()).max(1.0);
        self.distance(other) <= tol * scale
    }

    pub fn distance(&self, other: &Multivector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Integer power; negative exponents go through [`Multivector::inverse`].
    pub fn powi(&self, exp: i32) -> Result<Multivector> {
        let base = if exp < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut out = Multivector::one(self.sig);
        for _ in 0..exp.unsigned_abs() {
            out = out.gp(&base);
        }
        Ok(out)
    }
}

fn condition_of(mat: &DMatrix<f64>) -> f64 {
    let sv = mat.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[inline]
fn reverse_sign(b: BladeIndex) -> f64 {
    let k = b.grade();
    if (k * k.saturating_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn bar_sign(b: BladeIndex, negative_mask: usize) -> f64 {
    if (b.0 & negative_mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `exp(angle f) = cos(angle) + f sin(angle)` for a square root `f` of -1.
pub fn exp_root(f: &Multivector, angle: f64) -> Result<Multivector> {
    let residual = root_residual(f);
    if !(residual <= DEFAULT_TOLERANCE) {
        return Err(Error::NotARoot { residual });
    }
    Ok(exp_unchecked(f, angle))
}

pub(crate) fn exp_unchecked(f: &Multivector, angle: f64) -> Multivector {
    let (s, c) = angle.sin_cos();
    let mut out = f.scale(s);
    out.coeffs[0] += c;
    out
}

/// `|f^2 + 1|`.
pub fn root_residual(f: &Multivector) -> f64 {
    let mut sq = f.gp(f);
    sq.coeffs[0] += 1.0;
    sq.norm()
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.sig.dim();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            if i == 0 {
                write!(f, "{mag}")?;
                continue;
            }
            if mag != 1.0 {
                write!(f, "{mag}*")?;
            }
            let factors: Vec<String> = (1..=n)
                .filter(|&k| BladeIndex(i).contains(k))
                .map(|k| k.to_string())
                .collect();
            let sep = if n >= 10 { "," } else { "" };
            write!(f, "e{}", factors.join(sep))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn assert_same(a: &Multivector, b: &Multivector) {
    assert_eq!(a.sig, b.sig, "multivector signature mismatch");
}

impl Mul for &Multivector {
    type Output = Multivector;

    /// Geometric product. Panics on signature mismatch; use
    /// [`Multivector::geometric_product`] for the fallible form.
    fn mul(self, rhs: &Multivector) -> Multivector {
        assert_same(self, rhs);
        self.gp(rhs)
    }
}

impl Mul for Multivector {
    type Output = Multivector;

    fn mul(self, rhs: Multivector) -> Multivector {
        &self * &rhs
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;

    fn mul(mut self, rhs: f64) -> Multivector {
        self.coeffs.iter_mut().for_each(|c| *c *= rhs);
        self
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_same(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Multivector> for Multivector {
    fn sub_assign(&mut self, rhs: &Multivector) {
        assert_same(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Add for &Multivector {
    type Output = Multivector;

    fn add(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Multivector {
    type Output = Multivector;

    fn add(mut self, rhs: Multivector) -> Multivector {
        self += &rhs;
        self
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Multivector {
    type Output = Multivector;

    fn sub(mut self, rhs: Multivector) -> Multivector {
        self -= &rhs;
        self
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self * -1.0
    }
}
