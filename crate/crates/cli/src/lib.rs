//! Library side of the `clifft` command-line tool: the property-suite runner,
//! manifold plot export and root file helpers.

// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod plot;
pub mod suite;

use std::fs;
use std::path::Path;

use clifft_core::{Error, Multivector, Result, RootOfMinusOne, RootRecord};

pub use plot::{emit_plot_data, write_plot_data};
pub use suite::{run_suite, CheckRecord, GridCase, Status, Suite, SuiteConfig, SuiteReport};

/// Residual bound for roots read from disk.
pub const ROOT_FILE_TOLERANCE: f64 = 1e-10;

/// Read a multivector from JSON: either a root record `{p, q, coeffs, ..}` or
/// a one-element array of such records.
pub fn load_multivector(path: impl AsRef<Path>) -> Result<Multivector> {
    load_records(path)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Format("no multivector in file".into()))?
        .multivector()
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<RootRecord>> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|r| vec![r])
    };
    parsed.map_err(|e| Error::Format(e.to_string()))
}

/// Load and certify a root of -1.
pub fn load_root(path: impl AsRef<Path>) -> Result<RootOfMinusOne> {
    clifft_core::verify_root(&load_multivector(path)?, ROOT_FILE_TOLERANCE)
}

pub fn save_roots(roots: &[RootOfMinusOne], path: impl AsRef<Path>) -> Result<()> {
    let records: Vec<RootRecord> = roots.iter().map(|r| r.to_record()).collect();
    let text = serde_json::to_string_pretty(&records).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn save_root(root: &RootOfMinusOne, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&root.to_record())
        .map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clifft_core::{sample_root, AlgebraSignature};

    #[test]
    fn root_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let sig = AlgebraSignature::new(1, 2).unwrap();
        let roots: Vec<_> = (0..3).map(|s| sample_root(sig, s, None).unwrap()).collect();
        let many = dir.path().join("many.json");
        save_roots(&roots, &many).unwrap();
        assert_eq!(load_records(&many).unwrap().len(), 3);
        assert_eq!(load_root(&many).unwrap().value(), roots[0].value());

        let one = dir.path().join("one.json");
        save_root(&roots[1], &one).unwrap();
        assert_eq!(load_root(&one).unwrap().value(), roots[1].value());
    }

    #[test]
    fn malformed_files_are_format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\"p\": 1}").unwrap();
        assert!(matches!(load_multivector(&path), Err(Error::Format(_))));
    }
}
