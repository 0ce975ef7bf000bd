use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_io::EmbeddingMatrix;
use crate::scalar::Scalar;

/// Summary of L2 row norms; `std` is the population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormStats {
    pub rows: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn norm_stats<T: Scalar>(m: &EmbeddingMatrix<T>, rows: Range<usize>) -> Result<NormStats> {
    if rows.is_empty() || rows.end > m.rows() {
        return Err(Error::InvalidArgument(format!(
            "row range {}..{} is empty or exceeds {} rows",
            rows.start,
            rows.end,
            m.rows()
        )));
    }
    let norms: Vec<f64> = rows
        .clone()
        .map(|i| m.row(i).iter().map(|v| v.widen() * v.widen()).sum::<f64>().sqrt())
        .collect();
    let n = norms.len() as f64;
    let mean = norms.iter().sum::<f64>() / n;
    let var = norms.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(NormStats {
        rows: norms.len(),
        mean,
        std: var.sqrt(),
        min: norms.iter().copied().fold(f64::INFINITY, f64::min),
        max: norms.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}
