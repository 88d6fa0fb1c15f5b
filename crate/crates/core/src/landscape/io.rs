//! Grid file format, little-endian throughout:
//!
//! ```text
//! "PFL1" | u32 metadata length | metadata JSON (UTF-8) | f32 values, row-major
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::grid::{GridMetadata, LandscapeGrid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PFL1";

pub fn encode(grid: &LandscapeGrid) -> Result<Vec<u8>> {
    let json = serde_json::to_vec(&grid.metadata).map_err(|e| Error::Config(format!("metadata: {e}")))?;
    let len = u32::try_from(json.len()).map_err(|_| Error::Config("metadata larger than 4 GiB".into()))?;
    let mut out = Vec::with_capacity(8 + json.len() + 4 * grid.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(&json);
    for v in &grid.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset: offset as u64, message: message.into() }
}

pub fn decode(bytes: &[u8]) -> Result<LandscapeGrid> {
    if bytes.len() < 4 {
        return Err(parse_err(bytes.len(), "file ends inside the magic header"));
    }
    if &bytes[..4] != MAGIC {
        return Err(parse_err(0, "not a landscape grid file (bad magic)"));
    }
    let len_bytes: [u8; 4] = bytes
        .get(4..8)
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| parse_err(bytes.len(), "file ends inside the metadata length"))?;
    let len = u32::from_le_bytes(len_bytes) as usize;
    let json_end = 8usize
        .checked_add(len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| parse_err(bytes.len(), format!("file ends inside the metadata ({len} bytes announced)")))?;
    let metadata: GridMetadata = serde_json::from_slice(&bytes[8..json_end]).map_err(|e| {
        // compact JSON is one line, so the column locates the byte
        let at = if e.line() == 1 { 8 + e.column().saturating_sub(1) } else { 8 };
        parse_err(at, format!("metadata: {e}"))
    })?;
    let count = metadata
        .sigma_w
        .count
        .checked_mul(metadata.sigma_b.count)
        .ok_or_else(|| parse_err(8, "grid dimensions overflow"))?;
    let body = &bytes[json_end..];
    let expected = count.checked_mul(4).ok_or_else(|| parse_err(8, "grid dimensions overflow"))?;
    if body.len() < expected {
        return Err(parse_err(
            bytes.len(),
            format!("file truncated: {count} values need {expected} bytes, found {}", body.len()),
        ));
    }
    if body.len() > expected {
        return Err(parse_err(json_end + expected, "trailing bytes after the last value"));
    }
    let values: Vec<f32> =
        body.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("chunk of 4"))).collect();
    if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(parse_err(json_end + 4 * i, format!("value {} is not a finite non-negative number", values[i])));
    }
    LandscapeGrid::new(metadata, values)
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes atomically: the data goes to a sibling `.partial` file that is
/// renamed into place, and removed on failure.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = partial_path(path);
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn save(grid: &LandscapeGrid, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode(grid)?)
}

pub fn load(path: impl AsRef<Path>) -> Result<LandscapeGrid> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
