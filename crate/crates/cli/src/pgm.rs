//! Binary greyscale heatmaps.

use std::fs;
use std::path::Path;

use coot_core::Matrix;

use crate::error::{CliError, CliResult};

/// Min-max scaled pixels, row `i` of the matrix on image row `i`.
/// A constant matrix maps to mid-grey.
pub fn heatmap_pixels(m: &Matrix) -> Vec<u8> {
    let (lo, hi) = (m.min(), m.max());
    m.as_slice()
        .iter()
        .map(|&v| {
            if hi > lo {
                (255.0 * (v - lo) / (hi - lo)).round() as u8
            } else {
                128
            }
        })
        .collect()
}

pub fn encode_pgm(m: &Matrix) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", m.cols(), m.rows()).into_bytes();
    out.extend(heatmap_pixels(m));
    out
}

pub fn export_heatmap(m: &Matrix, path: &Path) -> CliResult<()> {
    fs::write(path, encode_pgm(m)).map_err(|e| CliError::io(path, e))
}
