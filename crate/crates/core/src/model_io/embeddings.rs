use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rows_bit_equal, Scalar};

const TENSOR_NAME: &str = "embedding";
const DTYPE_F32: &str = "F32";

/// Row-major `rows × dim` matrix, one row per vocabulary token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T> {
    rows: usize,
    dim: usize,
    values: Vec<T>,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn new(rows: usize, dim: usize, values: Vec<T>) -> Result<Self> {
        let expected = rows.checked_mul(dim).ok_or_else(|| {
            Error::InvalidArgument(format!("matrix shape [{rows}, {dim}] overflows"))
        })?;
        if values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "matrix shape [{rows}, {dim}] needs {expected} values, got {}",
                values.len()
            )));
        }
        let m = Self { rows, dim, values };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            values: vec![T::zero(); rows * dim],
        }
    }

    /// Empty matrix with room for `capacity` rows.
    pub fn with_capacity(dim: usize, capacity: usize) -> Self {
        Self {
            rows: 0,
            dim,
            values: Vec::with_capacity(dim * capacity),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Mutable row access. Writers re-validate finiteness, so a NaN written
    /// here surfaces as an error on save.
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.dim + col]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        // chunks_exact(0) panics; a zero-dim matrix still has `rows` empty rows
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn push_row(&mut self, row: &[T]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::DimMismatch(self.dim, row.len()));
        }
        if let Some(col) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: self.rows,
                col,
            });
        }
        self.values.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::NonFinite {
                row: i / self.dim.max(1),
                col: i % self.dim.max(1),
            }),
        }
    }

    /// Exact equality on the IEEE-754 bit patterns.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.dim == other.dim
            && rows_bit_equal(&self.values, &other.values)
    }

    /// Element-wise conversion (widening is exact, narrowing rounds to nearest).
    pub fn cast<U: Scalar>(&self) -> EmbeddingMatrix<U> {
        EmbeddingMatrix {
            rows: self.rows,
            dim: self.dim,
            values: self
                .values
                .iter()
                .map(|v| U::from_f64_rounded(v.widen()))
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorInfo {
    dtype: String,
    shape: Vec<u64>,
    data_offsets: [u64; 2],
}

#[derive(Debug, Serialize)]
struct Header<'a> {
    embedding: &'a TensorInfo,
}

fn payload_len(rows: u64, dim: u64) -> Result<u64> {
    rows.checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Container(format!("shape [{rows}, {dim}] overflows")))
}

fn header_json(m: &EmbeddingMatrix<f32>) -> Result<String> {
    let len = payload_len(m.rows as u64, m.dim as u64)?;
    let info = TensorInfo {
        dtype: DTYPE_F32.to_string(),
        shape: vec![m.rows as u64, m.dim as u64],
        data_offsets: [0, len],
    };
    serde_json::to_string(&Header { embedding: &info })
        .map_err(|e| Error::Container(e.to_string()))
}

/// Serialize a matrix into the tensor container layout.
pub fn encode_container(m: &EmbeddingMatrix<f32>) -> Result<Vec<u8>> {
    m.check_finite()?;
    let header = header_json(m)?;
    let mut out = Vec::with_capacity(8 + header.len() + m.values.len() * 4);
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for v in &m.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parse the tensor container layout.
pub fn decode_container(bytes: &[u8]) -> Result<EmbeddingMatrix<f32>> {
    if bytes.len() < 8 {
        return Err(Error::Container(format!(
            "file is {} bytes, shorter than the 8-byte header length",
            bytes.len()
        )));
    }
    let n = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    let header_end = 8u64
        .checked_add(n)
        .filter(|end| *end <= bytes.len() as u64)
        .ok_or_else(|| {
            Error::Container(format!(
                "header length {n} exceeds file size {}",
                bytes.len()
            ))
        })? as usize;

    let header: serde_json::Map<String, serde_json::Value> =
        serde_json::from_slice(&bytes[8..header_end])
            .map_err(|e| Error::Container(format!("bad header: {e}")))?;
    if let Some(key) = header
        .keys()
        .find(|k| *k != TENSOR_NAME && *k != "__metadata__")
    {
        return Err(Error::Container(format!("unexpected tensor {key:?}")));
    }
    let info: TensorInfo = header
        .get(TENSOR_NAME)
        .cloned()
        .ok_or_else(|| Error::Container(format!("no {TENSOR_NAME:?} tensor in header")))
        .and_then(|v| {
            serde_json::from_value(v).map_err(|e| Error::Container(format!("bad header: {e}")))
        })?;

    if info.dtype != DTYPE_F32 {
        return Err(Error::UnsupportedDtype(info.dtype));
    }
    let [rows, dim] = info.shape[..] else {
        return Err(Error::Container(format!(
            "expected a rank-2 shape, got {:?}",
            info.shape
        )));
    };
    let expected = payload_len(rows, dim)?;
    if info.data_offsets != [0, expected] {
        return Err(Error::Container(format!(
            "data_offsets {:?} do not match shape [{rows}, {dim}]",
            info.data_offsets
        )));
    }
    let payload = &bytes[header_end..];
    if payload.len() as u64 != expected {
        return Err(Error::PayloadLength {
            expected,
            actual: payload.len() as u64,
        });
    }

    let (rows, dim) = (rows as usize, dim as usize);
    let values: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: i / dim,
            col: i % dim,
        });
    }
    Ok(EmbeddingMatrix { rows, dim, values })
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix<f32>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_container(&bytes)
}

pub fn write_embeddings(m: &EmbeddingMatrix<f32>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    m.check_finite()?;
    let header = header_json(m)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::with_capacity(1 << 20, file);
    let io = |e| Error::io(path, e);
    w.write_all(&(header.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(header.as_bytes()).map_err(io)?;
    for v in &m.values {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn container(header: &str, payload: &[u8]) -> Vec<u8> {
        let mut out = (header.len() as u64).to_le_bytes().to_vec();
        out.extend_from_slice(header.as_bytes());
        out.extend_from_slice(payload);
        out
    }

    #[test]
    fn zero_payload_decodes() {
        let h = r#"{"embedding":{"dtype":"F32","shape":[2,3],"data_offsets":[0,24]}}"#;
        let m = decode_container(&container(h, &[0u8; 24])).unwrap();
        assert_eq!((m.rows(), m.dim()), (2, 3));
        assert!(m.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn short_payload_is_length_mismatch() {
        let h = r#"{"embedding":{"dtype":"F32","shape":[2,3],"data_offsets":[0,24]}}"#;
        let err = decode_container(&container(h, &[0u8; 20])).unwrap_err();
        assert!(matches!(
            err,
            Error::PayloadLength {
                expected: 24,
                actual: 20
            }
        ));
    }

    #[test]
    fn row_major_layout() {
        let m = EmbeddingMatrix::new(2, 2, vec![1.0f32, 2.0, 3.0, 4.0]).unwrap();
        let bytes = encode_container(&m).unwrap();
        let back = decode_container(&bytes).unwrap();
        assert_eq!(back.get(1, 0), 3.0);
        assert!(back.bit_eq(&m));
    }

    #[test]
    fn header_is_exact() {
        let m = EmbeddingMatrix::new(2, 3, vec![0.0f32; 6]).unwrap();
        let bytes = encode_container(&m).unwrap();
        let n = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        assert_eq!(
            std::str::from_utf8(&bytes[8..8 + n]).unwrap(),
            r#"{"embedding":{"dtype":"F32","shape":[2,3],"data_offsets":[0,24]}}"#
        );
        assert_eq!(bytes.len(), 8 + n + 24);
    }

    #[test]
    fn other_dtypes_are_rejected() {
        let h = r#"{"embedding":{"dtype":"F16","shape":[1,2],"data_offsets":[0,4]}}"#;
        assert!(matches!(
            decode_container(&container(h, &[0u8; 4])),
            Err(Error::UnsupportedDtype(d)) if d == "F16"
        ));
    }

    #[test]
    fn non_finite_payload_names_position() {
        let h = r#"{"embedding":{"dtype":"F32","shape":[2,2],"data_offsets":[0,16]}}"#;
        let mut payload = Vec::new();
        for v in [0.0f32, 1.0, 2.0, f32::INFINITY] {
            payload.extend_from_slice(&v.to_le_bytes());
        }
        assert!(matches!(
            decode_container(&container(h, &payload)),
            Err(Error::NonFinite { row: 1, col: 1 })
        ));
    }

    #[test]
    fn nan_cannot_be_written() {
        assert!(EmbeddingMatrix::new(1, 1, vec![f32::NAN]).is_err());
        let mut m = EmbeddingMatrix::<f32>::zeros(1, 1);
        m.row_mut(0)[0] = f32::NAN;
        assert!(matches!(
            encode_container(&m),
            Err(Error::NonFinite { row: 0, col: 0 })
        ));
    }

    #[test]
    fn truncated_header_is_rejected() {
        assert!(decode_container(&[1, 2, 3]).is_err());
        let mut bytes = 100u64.to_le_bytes().to_vec();
        bytes.extend_from_slice(b"{}");
        assert!(matches!(decode_container(&bytes), Err(Error::Container(_))));
    }

    #[test]
    fn metadata_key_is_ignored_but_other_tensors_are_not() {
        let h = r#"{"__metadata__":{"a":"b"},"embedding":{"dtype":"F32","shape":[1,1],"data_offsets":[0,4]}}"#;
        assert!(decode_container(&container(h, &[0u8; 4])).is_ok());
        let h = r#"{"other":{"dtype":"F32","shape":[1,1],"data_offsets":[0,4]},"embedding":{"dtype":"F32","shape":[1,1],"data_offsets":[0,4]}}"#;
        assert!(decode_container(&container(h, &[0u8; 4])).is_err());
    }

    #[test]
    fn push_row_checks_width_and_finiteness() {
        let mut m = EmbeddingMatrix::<f64>::with_capacity(2, 4);
        m.push_row(&[1.0, 2.0]).unwrap();
        assert!(m.push_row(&[1.0]).is_err());
        assert!(m.push_row(&[1.0, f64::NAN]).is_err());
        assert_eq!(m.rows(), 1);
        let narrowed: EmbeddingMatrix<f32> = m.cast();
        assert_eq!(narrowed.row(0), &[1.0f32, 2.0]);
    }
}
