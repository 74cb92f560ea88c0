//! Splits of multivectors and fields with respect to square roots of -1.
//!
//! With two roots `f, g` every `x` decomposes as `x = x₊ + x₋` where
//! `x± = (x ± f x g) / 2` and `f x± g = ±x±`. With a single root `f` the
//! commuting/anticommuting split `x = x₊f + x₋f` is the `g = -f` special case.

use crate::algebra::Multivector;
use crate::error::Result;
use crate::field::MultivectorField;
use crate::roots::RootOfMinusOne;

#[derive(Clone, Debug, PartialEq)]
pub struct SplitPair {
    pub plus: Multivector,
    pub minus: Multivector,
}

impl SplitPair {
    pub fn sum(&self) -> Multivector {
        &self.plus + &self.minus
    }
}

pub fn split_pm(x: &Multivector, f: &RootOfMinusOne, g: &RootOfMinusOne) -> Result<SplitPair> {
    let sig = x.signature();
    sig.check_same(f.signature())?;
    sig.check_same(g.signature())?;
    let fxg = &(f.value() * x) * g.value();
    Ok(SplitPair {
        plus: (x + &fxg) * 0.5,
        minus: (x - &fxg) * 0.5,
    })
}

/// Parts of `x` that commute and anticommute with `f`, in that order.
pub fn split_commuting(x: &Multivector, f: &RootOfMinusOne) -> Result<(Multivector, Multivector)> {
    x.signature().check_same(f.signature())?;
    // f^-1 = -f
    let conj = -(&(f.value() * x) * f.value());
    Ok(((x + &conj) * 0.5, (x - &conj) * 0.5))
}

/// Pointwise [`split_pm`], returning `(h₊, h₋)`.
pub fn split_field(
    h: &MultivectorField,
    f: &RootOfMinusOne,
    g: &RootOfMinusOne,
) -> Result<(MultivectorField, MultivectorField)> {
    let sig = h.signature();
    sig.check_same(f.signature())?;
    sig.check_same(g.signature())?;
    let fhg = h.sandwich(f.value(), g.value())?;
    Ok((
        h.combine(&fhg, 1.0)?.scale(0.5),
        h.combine(&fhg, -1.0)?.scale(0.5),
    ))
}

/// Pointwise [`split_commuting`], returning `(h₊f, h₋f)`.
pub fn split_field_commuting(
    h: &MultivectorField,
    f: &RootOfMinusOne,
) -> Result<(MultivectorField, MultivectorField)> {
    h.signature().check_same(f.signature())?;
    let conj = h.sandwich(f.value(), f.value())?.scale(-1.0);
    Ok((
        h.combine(&conj, 1.0)?.scale(0.5),
        h.combine(&conj, -1.0)?.scale(0.5),
    ))
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    Ok(a.geometric_product(b)? - b.geometric_product(a)?)
}
