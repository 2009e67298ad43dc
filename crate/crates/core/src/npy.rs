//! Minimal NPY v1.0 reader and writer.
//!
//! Writing always produces little-endian `<f4`, C-order arrays with the
//! header padded so that the payload starts on a 64-byte boundary, which is
//! what current numpy emits. Reading accepts `<f4` and `<f8` in C order.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;
// magic + version + u16 header length
const PREAMBLE_LEN: usize = 10;

/// A dense C-order array of 32-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct NpyArray {
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

fn shape_literal(shape: &[usize]) -> String {
    match shape {
        [single] => format!("({single},)"),
        dims => {
            let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
            format!("({})", parts.join(", "))
        }
    }
}

/// The full header (preamble, dict, padding and trailing newline).
pub fn header_bytes(shape: &[usize]) -> Vec<u8> {
    let dict = format!(
        "{{'descr': '<f4', 'fortran_order': False, 'shape': {}, }}",
        shape_literal(shape)
    );
    let unpadded = PREAMBLE_LEN + dict.len() + 1;
    let total = unpadded.div_ceil(ALIGN) * ALIGN;
    let header_len = total - PREAMBLE_LEN;

    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.resize(total - 1, b' ');
    out.push(b'\n');
    out
}

pub fn write_f32<W: Write>(writer: &mut W, shape: &[usize], data: &[f32]) -> io::Result<()> {
    let expected: usize = shape.iter().product();
    if expected != data.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("shape {shape:?} holds {expected} values, got {}", data.len()),
        ));
    }
    writer.write_all(&header_bytes(shape))?;
    let mut payload = Vec::with_capacity(data.len() * 4);
    for v in data {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    writer.write_all(&payload)
}

pub fn save(path: &Path, shape: &[usize], data: &[f32]) -> Result<()> {
    let mut buf = Vec::new();
    write_f32(&mut buf, shape, data).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<NpyArray> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse(&bytes)
}

#[derive(Clone, Copy)]
enum Descr {
    F4,
    F8,
}

pub fn parse(bytes: &[u8]) -> Result<NpyArray> {
    if bytes.len() < PREAMBLE_LEN || &bytes[..6] != MAGIC {
        return Err(Error::Npy("missing NPY magic".into()));
    }
    let (header_len, dict_start) = match bytes[6] {
        1 => (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10),
        2 | 3 if bytes.len() >= 12 => (
            u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize,
            12,
        ),
        v => return Err(Error::Npy(format!("unsupported NPY version {v}"))),
    };
    let dict_end = dict_start + header_len;
    if bytes.len() < dict_end {
        return Err(Error::Npy("truncated header".into()));
    }
    let dict = std::str::from_utf8(&bytes[dict_start..dict_end])
        .map_err(|_| Error::Npy("header is not valid text".into()))?;

    let descr = match dict_value(dict, "descr")? {
        "'<f4'" => Descr::F4,
        "'<f8'" => Descr::F8,
        other => return Err(Error::Npy(format!("unsupported descr {other}"))),
    };
    if dict_value(dict, "fortran_order")? != "False" {
        return Err(Error::Npy("fortran_order arrays are not supported".into()));
    }
    let shape = parse_shape(dict_value(dict, "shape")?)?;

    let count: usize = shape.iter().product();
    let width = match descr {
        Descr::F4 => 4,
        Descr::F8 => 8,
    };
    let payload = &bytes[dict_end..];
    if payload.len() != count * width {
        return Err(Error::Npy(format!(
            "payload holds {} bytes, shape {shape:?} needs {}",
            payload.len(),
            count * width
        )));
    }
    let data = match descr {
        Descr::F4 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect(),
        Descr::F8 => payload
            .chunks_exact(8)
            .map(|c| {
                let mut b = [0u8; 8];
                b.copy_from_slice(c);
                f64::from_le_bytes(b) as f32
            })
            .collect(),
    };
    Ok(NpyArray { shape, data })
}

/// Raw text of the value stored under `key` in a Python dict literal.
fn dict_value<'a>(dict: &'a str, key: &str) -> Result<&'a str> {
    let needle = format!("'{key}':");
    let start = dict
        .find(&needle)
        .ok_or_else(|| Error::Npy(format!("header has no '{key}' entry")))?
        + needle.len();
    let rest = dict[start..].trim_start();
    let end = if rest.starts_with('(') {
        rest.find(')').map(|i| i + 1)
    } else {
        rest.find([',', '}'])
    }
    .ok_or_else(|| Error::Npy(format!("unterminated '{key}' entry")))?;
    Ok(rest[..end].trim())
}

fn parse_shape(literal: &str) -> Result<Vec<usize>> {
    let inner = literal
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Npy(format!("malformed shape {literal}")))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Npy(format!("malformed shape {literal}")))
        })
        .collect()
}
