//! `MNF1` field files.
//!
//! Layout, all little-endian, no padding:
//!
//! | bytes            | content                                  |
//! |------------------|------------------------------------------|
//! | 4                | ASCII `MNF1`                             |
//! | 4                | `u32` ndim                               |
//! | 8 * ndim         | `u64` samples per axis                   |
//! | 8 * ndim         | `f64` period per axis                    |
//! | 16 * prod(dims)  | `(f64 re, f64 im)`, axis 1 fastest       |

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};

pub const MAGIC: &[u8; 4] = b"MNF1";

/// Size in bytes of the header for an `ndim`-dimensional field.
pub fn header_len(ndim: usize) -> usize {
    4 + 4 + 16 * ndim
}

pub fn encode(field: &SampledField) -> Vec<u8> {
    let spec = field.spec();
    let mut out = Vec::with_capacity(header_len(spec.ndim()) + 16 * spec.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(spec.ndim() as u32).to_le_bytes());
    for &n in spec.samples() {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for &l in spec.periods() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self, expected_total: usize) -> Result<[u8; N]> {
        let end = self.pos + N;
        if end > self.bytes.len() {
            return Err(Error::Truncated {
                expected: expected_total.max(end),
                found: self.bytes.len(),
            });
        }
        let mut buf = [0u8; N];
        buf.copy_from_slice(&self.bytes[self.pos..end]);
        self.pos = end;
        Ok(buf)
    }
}

pub fn decode(bytes: &[u8]) -> Result<SampledField> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { bytes, pos: 4 };
    let ndim = u32::from_le_bytes(r.take::<4>(8)?) as usize;
    if ndim == 0 {
        return Err(Error::InvalidGrid("ndim must be at least 1".into()));
    }
    let header = ndim
        .checked_mul(16)
        .and_then(|h| h.checked_add(8))
        .ok_or(Error::DimensionOverflow)?;
    let mut dims = Vec::with_capacity(ndim.min(64));
    for _ in 0..ndim {
        let n = u64::from_le_bytes(r.take::<8>(header)?);
        dims.push(usize::try_from(n).map_err(|_| Error::DimensionOverflow)?);
    }
    let mut periods = Vec::with_capacity(ndim.min(64));
    for _ in 0..ndim {
        periods.push(f64::from_le_bytes(r.take::<8>(header)?));
    }
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or(Error::DimensionOverflow)?;
    let total = count
        .checked_mul(16)
        .and_then(|p| p.checked_add(header))
        .ok_or(Error::DimensionOverflow)?;
    if bytes.len() < total {
        return Err(Error::Truncated {
            expected: total,
            found: bytes.len(),
        });
    }
    if bytes.len() > total {
        return Err(Error::InvalidParameter(format!(
            "{} trailing bytes after payload",
            bytes.len() - total
        )));
    }
    let spec = GridSpec::new(dims, periods)?;
    let values = bytes[header..]
        .chunks_exact(16)
        .map(|chunk| {
            let re = f64::from_le_bytes(chunk[..8].try_into().expect("8-byte slice"));
            let im = f64::from_le_bytes(chunk[8..].try_into().expect("8-byte slice"));
            Complex64::new(re, im)
        })
        .collect();
    SampledField::new(spec, values)
}

pub fn write_field(field: &SampledField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SampledField> {
    decode(&fs::read(path)?)
}
