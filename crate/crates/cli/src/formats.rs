//! Binary file formats for tensors (`TNS1`) and observation masks (`MSK1`).
//!
//! Both formats share a header layout: a four-byte ASCII magic, then the
//! three dimensions `n1, n2, n3` as unsigned 32-bit little-endian integers.
//!
//! * `TNS1` body: `n1·n2·n3` IEEE-754 little-endian 64-bit reals in tensor
//!   linearization order (first index fastest, i.e. the entry at 1-based
//!   `(i, j, k)` sits at offset `(i-1) + n1·(j-1) + n1·n2·(k-1)`).
//! * `MSK1` body: a bitmap of `n1·n2·n3` bits in the same order, packed
//!   least-significant-bit first within each byte, `1` = observed. Padding
//!   bits in the final byte must be zero.
//!
//! Readers validate magic, exact byte length, entry finiteness (tensors),
//! and padding (masks), so corrupt or truncated files fail loudly instead of
//! producing garbage tensors.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use tcomp_core::{ObservationMask, Tensor3};

const TNS_MAGIC: &[u8; 4] = b"TNS1";
const MSK_MAGIC: &[u8; 4] = b"MSK1";
const HEADER_LEN: usize = 16;

/// Errors from reading or writing tensor and mask files.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Malformed { path: String, detail: String },
}

impl FormatError {
    fn malformed(path: &Path, detail: impl Into<String>) -> FormatError {
        FormatError::Malformed {
            path: path.display().to_string(),
            detail: detail.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> FormatError {
        FormatError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Parses a 16-byte header, returning the dimensions and total entry count.
fn parse_header(
    path: &Path,
    bytes: &[u8],
    magic: &[u8; 4],
    kind: &str,
) -> Result<(usize, usize, usize, usize), FormatError> {
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::malformed(
            path,
            format!("file too short for a {kind} header ({} bytes)", bytes.len()),
        ));
    }
    if &bytes[..4] != magic {
        return Err(FormatError::malformed(
            path,
            format!(
                "bad magic {:?}, expected {:?}",
                &bytes[..4],
                std::str::from_utf8(magic).unwrap()
            ),
        ));
    }
    let dim = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let (n1, n2, n3) = (dim(4), dim(8), dim(12));
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(FormatError::malformed(
            path,
            format!("zero dimension in header: {n1}x{n2}x{n3}"),
        ));
    }
    let total = n1
        .checked_mul(n2)
        .and_then(|p| p.checked_mul(n3))
        .ok_or_else(|| {
            FormatError::malformed(path, format!("dimension overflow: {n1}x{n2}x{n3}"))
        })?;
    Ok((n1, n2, n3, total))
}

/// Reads a `TNS1` tensor file.
pub fn read_tensor(path: &Path) -> Result<Tensor3, FormatError> {
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    let (n1, n2, n3, total) = parse_header(path, &bytes, TNS_MAGIC, "TNS1")?;
    let expected = HEADER_LEN + 8 * total;
    if bytes.len() != expected {
        return Err(FormatError::malformed(
            path,
            format!(
                "expected {expected} bytes for a {n1}x{n2}x{n3} tensor, found {}",
                bytes.len()
            ),
        ));
    }
    let data: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Tensor3::from_data(n1, n2, n3, data)
        .map_err(|e| FormatError::malformed(path, format!("invalid tensor payload: {e}")))
}

/// Writes a tensor as a `TNS1` file.
pub fn write_tensor(path: &Path, tensor: &Tensor3) -> Result<(), FormatError> {
    let (n1, n2, n3) = tensor.dims();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * tensor.data().len());
    out.extend_from_slice(TNS_MAGIC);
    for n in [n1, n2, n3] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for &v in tensor.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &out)
}

/// Reads an `MSK1` mask file.
pub fn read_mask(path: &Path) -> Result<ObservationMask, FormatError> {
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    let (n1, n2, n3, total) = parse_header(path, &bytes, MSK_MAGIC, "MSK1")?;
    let expected = HEADER_LEN + total.div_ceil(8);
    if bytes.len() != expected {
        return Err(FormatError::malformed(
            path,
            format!(
                "expected {expected} bytes for a {n1}x{n2}x{n3} mask, found {}",
                bytes.len()
            ),
        ));
    }
    let body = &bytes[HEADER_LEN..];
    let mut bitmap = Vec::with_capacity(total);
    for idx in 0..total {
        bitmap.push(body[idx / 8] >> (idx % 8) & 1 == 1);
    }
    // Any set bit past the last entry means the writer disagreed with us
    // about the length, so reject rather than guess.
    for idx in total..body.len() * 8 {
        if body[idx / 8] >> (idx % 8) & 1 == 1 {
            return Err(FormatError::malformed(
                path,
                format!("nonzero padding bit at position {idx}"),
            ));
        }
    }
    ObservationMask::from_bitmap((n1, n2, n3), bitmap)
        .map_err(|e| FormatError::malformed(path, format!("invalid mask payload: {e}")))
}

/// Writes a mask as an `MSK1` file.
pub fn write_mask(path: &Path, mask: &ObservationMask) -> Result<(), FormatError> {
    let (n1, n2, n3) = mask.dims();
    let bitmap = mask.bitmap();
    let mut out = Vec::with_capacity(HEADER_LEN + bitmap.len().div_ceil(8));
    out.extend_from_slice(MSK_MAGIC);
    for n in [n1, n2, n3] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    let mut byte = 0u8;
    for (idx, &observed) in bitmap.iter().enumerate() {
        if observed {
            byte |= 1 << (idx % 8);
        }
        if idx % 8 == 7 {
            out.push(byte);
            byte = 0;
        }
    }
    if bitmap.len() % 8 != 0 {
        out.push(byte);
    }
    write_atomic(path, &out)
}

/// Writes `bytes` to `path` in one call, mapping failures to [`FormatError`].
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let mut file = fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
    file.write_all(bytes).map_err(|e| FormatError::io(path, e))
}
