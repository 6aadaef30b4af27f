//! The `TDAC` ciphertext dataset container and its JSON manifest.
//!
//! ```text
//! "TDAC" | 0x01 | rows: u32 LE | cols: u32 LE | count: u32 LE
//! count x ( label: u8 | rows x ceil(cols / 8) bytes, MSB-first, zero padded )
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::error::{Error, Result};

use super::{CipherDataset, GswParams, Sample};

pub const MAGIC: &[u8; 4] = b"TDAC";
pub const VERSION: u8 = 0x01;
const HEADER_LEN: usize = 4 + 1 + 12;

/// Contents of a `TDAC` file: a shape and labeled matrices of that shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdacFile {
    pub rows: usize,
    pub cols: usize,
    pub samples: Vec<Sample>,
}

impl From<&CipherDataset> for TdacFile {
    fn from(ds: &CipherDataset) -> Self {
        Self {
            rows: ds.side(),
            cols: ds.side(),
            samples: ds.samples.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u8,
    pub params: GswParams,
    pub seed: u64,
    pub count_per_class: usize,
    pub samples: usize,
    pub label_counts: [usize; 2],
    pub leaky: bool,
}

impl Manifest {
    pub fn for_dataset(ds: &CipherDataset) -> Self {
        Self {
            format: "TDAC".into(),
            version: VERSION,
            params: ds.params,
            seed: ds.seed,
            count_per_class: ds.count_label(0).max(ds.count_label(1)),
            samples: ds.samples.len(),
            label_counts: [ds.count_label(0), ds.count_label(1)],
            leaky: ds.params.is_leaky(),
        }
    }
}

fn row_bytes(cols: usize) -> usize {
    cols.div_ceil(8)
}

pub fn encode(file: &TdacFile) -> Result<Vec<u8>> {
    let to_u32 = |x: usize, what: &str| u32::try_from(x).map_err(|_| Error::Size(format!("{what} {x} exceeds u32")));
    let rb = row_bytes(file.cols);
    let mut out = Vec::with_capacity(HEADER_LEN + file.samples.len() * (1 + file.rows * rb));
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&to_u32(file.rows, "rows")?.to_le_bytes());
    out.extend_from_slice(&to_u32(file.cols, "cols")?.to_le_bytes());
    out.extend_from_slice(&to_u32(file.samples.len(), "sample count")?.to_le_bytes());
    for (i, s) in file.samples.iter().enumerate() {
        if s.bits.rows() != file.rows || s.bits.cols() != file.cols {
            return Err(Error::Shape(format!(
                "sample {i} is {}x{}, file is {}x{}",
                s.bits.rows(),
                s.bits.cols(),
                file.rows,
                file.cols
            )));
        }
        out.push(s.label);
        for r in 0..file.rows {
            let mut packed = vec![0u8; rb];
            for (c, &bit) in s.bits.row(r).iter().enumerate() {
                packed[c / 8] |= bit << (7 - c % 8);
            }
            out.extend_from_slice(&packed);
        }
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<TdacFile> {
    let fail = |offset: usize, msg: String| Error::Format {
        offset: offset as u64,
        msg,
    };
    if bytes.len() < HEADER_LEN {
        return Err(fail(
            bytes.len(),
            format!("truncated header ({} of {HEADER_LEN} bytes)", bytes.len()),
        ));
    }
    if &bytes[..4] != MAGIC {
        return Err(fail(0, "bad magic, expected \"TDAC\"".into()));
    }
    if bytes[4] != VERSION {
        return Err(fail(4, format!("unsupported version {}", bytes[4])));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let (rows, cols, count) = (word(5), word(9), word(13));
    let rb = row_bytes(cols);
    let record = 1 + rows * rb;

    let mut samples = Vec::with_capacity(count.min(bytes.len() / record.max(1)));
    let mut at = HEADER_LEN;
    for i in 0..count {
        if bytes.len() < at + record {
            return Err(fail(
                bytes.len(),
                format!("truncated sample {i} of {count} (record starts at byte {at})"),
            ));
        }
        let label = bytes[at];
        if label > 1 {
            return Err(fail(at, format!("label {label} is not a bit")));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let start = at + 1 + r * rb;
            let packed = &bytes[start..start + rb];
            data.extend((0..cols).map(|c| (packed[c / 8] >> (7 - c % 8)) & 1));
            let used = cols % 8;
            if used != 0 && packed[rb - 1] & (0xFF >> used) != 0 {
                return Err(fail(start + rb - 1, "nonzero row padding".into()));
            }
        }
        samples.push(Sample {
            label,
            bits: BitMatrix::from_vec(rows, cols, data)?,
        });
        at += record;
    }
    if at != bytes.len() {
        return Err(fail(at, format!("{} trailing bytes", bytes.len() - at)));
    }
    Ok(TdacFile { rows, cols, samples })
}

/// Writes `<stem>.tdac` and `<stem>.json` next to each other.
pub fn write_dataset(ds: &CipherDataset, data_path: &Path, manifest_path: &Path) -> Result<()> {
    let bytes = encode(&TdacFile::from(ds))?;
    fs::write(data_path, bytes).map_err(|e| Error::io(data_path, e))?;
    let manifest = serde_json::to_string_pretty(&Manifest::for_dataset(ds)).expect("manifest serializes");
    fs::write(manifest_path, manifest + "\n").map_err(|e| Error::io(manifest_path, e))
}

pub fn read_file(path: &Path) -> Result<TdacFile> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        offset: 0,
        msg: format!("manifest {}: {e}", path.display()),
    })
}
