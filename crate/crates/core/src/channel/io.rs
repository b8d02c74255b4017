//! Binary channel file format.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic  = "QKCH"
//! 4       4     format version (u32) = 1
//! 8       4     dim (u32)
//! 12      4     r = number of Kraus operators (u32)
//! 16      …     r · dim² entries, each 16 bytes: f64 re, f64 im,
//!               row-major within each operator, operators in order
//! ```
//!
//! Doubles are stored as raw IEEE-754 bit patterns, so decode∘encode and
//! encode∘decode are bit-exact.

use num_complex::Complex64;
use std::path::Path;

use crate::numerics::CMatrix;
use crate::{Error, Result};

use super::KrausChannel;

const MAGIC: &[u8; 4] = b"QKCH";
const FORMAT_VERSION: u32 = 1;

/// Serializes a channel to the binary format.
pub fn encode_channel(c: &KrausChannel) -> Vec<u8> {
    let dim = c.dim();
    let r = c.rank();
    let mut out = Vec::with_capacity(16 + r * dim * dim * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    out.extend_from_slice(&(r as u32).to_le_bytes());
    for op in c.ops() {
        for v in op.as_slice() {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}

/// Parses and validates a channel from the binary format. The Kraus family
/// must satisfy completeness, exactly as for [`KrausChannel::new`].
pub fn decode_channel(bytes: &[u8]) -> Result<KrausChannel> {
    if bytes.len() < 16 {
        return Err(Error::ChannelFile(format!(
            "file truncated: {} bytes, need at least 16",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::ChannelFile("bad magic, not a channel file".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::ChannelFile(format!(
            "unsupported format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let dim = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let r = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    if dim == 0 || r == 0 {
        return Err(Error::ChannelFile(format!(
            "invalid header: dim={dim}, r={r}"
        )));
    }
    let need = 16usize
        .checked_add(
            r.checked_mul(dim * dim)
                .and_then(|e| e.checked_mul(16))
                .ok_or_else(|| Error::ChannelFile("header sizes overflow".into()))?,
        )
        .ok_or_else(|| Error::ChannelFile("header sizes overflow".into()))?;
    if bytes.len() != need {
        return Err(Error::ChannelFile(format!(
            "size mismatch: {} bytes, header implies {need}",
            bytes.len()
        )));
    }
    let mut ops = Vec::with_capacity(r);
    let mut off = 16;
    for _ in 0..r {
        let mut op = CMatrix::zeros(dim, dim);
        for row in 0..dim {
            for col in 0..dim {
                let re = f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8 bytes"));
                let im =
                    f64::from_le_bytes(bytes[off + 8..off + 16].try_into().expect("8 bytes"));
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::ChannelFile(format!(
                        "non-finite entry at operator offset {off}"
                    )));
                }
                op[(row, col)] = Complex64::new(re, im);
                off += 16;
            }
        }
        ops.push(op);
    }
    KrausChannel::new(ops)
}

/// Writes a channel file (atomically: temp file + rename).
pub fn write_channel(c: &KrausChannel, path: &Path) -> Result<()> {
    let bytes = encode_channel(c);
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads and validates a channel file.
pub fn read_channel(path: &Path) -> Result<KrausChannel> {
    let bytes = std::fs::read(path)?;
    decode_channel(&bytes)
}
