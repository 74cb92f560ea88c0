//! CSV slices of the two-dimensional root manifolds.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use clifft_core::{
    family_n2_beta_squared, root_family_n2, AlgebraSignature, Branch, Error, Result,
};

/// Write `b1,b2,beta` rows for every admissible point of a
/// `resolution x resolution` grid over `[lo, hi]^2`, both branches. An empty
/// admissible region yields a header-only file.
pub fn emit_plot_data(
    sig: AlgebraSignature,
    range: (f64, f64),
    resolution: usize,
    path: impl AsRef<Path>,
) -> Result<usize> {
    let mut out = BufWriter::new(File::create(path)?);
    let rows = write_plot_data(sig, range, resolution, &mut out)?;
    out.flush()?;
    Ok(rows)
}

pub fn write_plot_data<W: Write>(
    sig: AlgebraSignature,
    (lo, hi): (f64, f64),
    resolution: usize,
    mut out: W,
) -> Result<usize> {
    if sig.dim() != 2 {
        return Err(Error::InvalidParams(format!(
            "manifold slices exist for n = 2 only, got {sig}"
        )));
    }
    if resolution < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(
            "need resolution >= 2 and a finite range lo < hi".into(),
        ));
    }
    writeln!(out, "b1,b2,beta")?;
    let step = (hi - lo) / (resolution - 1) as f64;
    let mut rows = 0;
    for i in 0..resolution {
        for j in 0..resolution {
            let (b1, b2) = (lo + step * i as f64, lo + step * j as f64);
            if family_n2_beta_squared(sig, b1, b2) < 0.0 {
                continue;
            }
            for branch in [Branch::Positive, Branch::Negative] {
                let root = root_family_n2(sig, b1, b2, branch)?;
                writeln!(out, "{b1},{b2},{}", root.value().coeffs()[3])?;
                rows += 1;
            }
        }
    }
    Ok(rows)
}
