//! The CFLD1 field file format.
//!
//! ```text
//! {"magic":"CFLD1","p":..,"q":..,"dims":[..],"mode":"cyclic"|"quadrature",
//!  "domain":[[a,b],..]?,"layout":"blade-major","dtype":"f64-le"}\n
//! <2^n * prod(dims) little-endian f64, blade channels by ascending mask, row-major>
//! <CRC32 of the payload, little-endian u32>
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GridGeometry, GridMode, MultivectorField};
use crate::algebra::AlgebraSignature;
use crate::error::{Error, Result};

pub const MAGIC: &str = "CFLD1";
const LAYOUT: &str = "blade-major";
const DTYPE: &str = "f64-le";
const MAX_HEADER: u64 = 1 << 20;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    magic: String,
    p: usize,
    q: usize,
    dims: Vec<usize>,
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Vec<[f64; 2]>>,
    layout: String,
    dtype: String,
}

pub fn write_field<W: Write>(h: &MultivectorField, mut w: W) -> Result<()> {
    let sig = h.signature();
    let (mode, domain) = match h.grid().mode() {
        GridMode::Cyclic => ("cyclic", None),
        GridMode::Quadrature { domain } => (
            "quadrature",
            Some(domain.iter().map(|&(a, b)| [a, b]).collect()),
        ),
    };
    let header = Header {
        magic: MAGIC.into(),
        p: sig.p(),
        q: sig.q(),
        dims: h.grid().dims().to_vec(),
        mode: mode.into(),
        domain,
        layout: LAYOUT.into(),
        dtype: DTYPE.into(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    let mut payload = Vec::with_capacity(h.data().len() * 8);
    for v in h.data() {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&payload)?;
    w.write_all(&crc32fast::hash(&payload).to_le_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(r: R) -> Result<MultivectorField> {
    let mut reader = BufReader::new(r);
    let mut line = Vec::new();
    (&mut reader)
        .take(MAX_HEADER)
        .read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(Error::Format("missing header line".into()));
    }
    let header: Header = serde_json::from_slice(&line[..line.len() - 1])
        .map_err(|e| Error::Format(format!("bad header: {e}")))?;
    if header.magic != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", header.magic)));
    }
    if header.layout != LAYOUT || header.dtype != DTYPE {
        return Err(Error::Format(format!(
            "unsupported layout/dtype {}/{}",
            header.layout, header.dtype
        )));
    }
    let sig = AlgebraSignature::new(header.p, header.q)?;
    let mode = match (header.mode.as_str(), header.domain) {
        ("cyclic", None) => GridMode::Cyclic,
        ("quadrature", Some(domain)) => GridMode::Quadrature {
            domain: domain.into_iter().map(|[a, b]| (a, b)).collect(),
        },
        (mode, _) => {
            return Err(Error::Format(format!(
                "mode {mode:?} with inconsistent domain"
            )))
        }
    };
    let grid = GridGeometry::new(header.dims, mode)?;
    if grid.ndim() != sig.dim() {
        return Err(Error::Format(format!("{} axes for {sig}", grid.ndim())));
    }
    let count = sig.blade_count() * grid.len();
    let mut payload = vec![0u8; count * 8];
    reader
        .read_exact(&mut payload)
        .map_err(|_| Error::Format("truncated payload".into()))?;
    let mut crc = [0u8; 4];
    reader
        .read_exact(&mut crc)
        .map_err(|_| Error::Format("missing checksum".into()))?;
    let mut rest = [0u8; 1];
    if reader.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after checksum".into()));
    }
    let stored = u32::from_le_bytes(crc);
    let computed = crc32fast::hash(&payload);
    if stored != computed {
        return Err(Error::ChecksumMismatch { stored, computed });
    }
    let data = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    MultivectorField::from_data(sig, grid, data)
}

pub fn save_field(h: &MultivectorField, path: impl AsRef<Path>) -> Result<()> {
    write_field(h, BufWriter::new(File::create(path)?))
}

pub fn load_field(path: impl AsRef<Path>) -> Result<MultivectorField> {
    read_field(File::open(path)?)
}
