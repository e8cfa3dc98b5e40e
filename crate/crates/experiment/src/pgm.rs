//! Binary 8-bit PGM (`P5`) images, row-major.
//!
//! Intensities are clamped to `[0, 1]` and stored as `round(255 x)`; reading maps a byte
//! `b` back to `b / 255`, so writing what was read reproduces the file exactly.

use std::io::{Read, Write};

use crate::{ExperimentError, Result};

pub fn quantize(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn dequantize(b: u8) -> f64 {
    b as f64 / 255.0
}

pub fn write_pgm<W: Write>(mut w: W, width: usize, height: usize, pixels: &[f64]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(ExperimentError::Pgm(format!(
            "{} pixels for a {width}x{height} image",
            pixels.len()
        )));
    }
    write!(w, "P5\n{width} {height}\n255\n")?;
    let bytes: Vec<u8> = pixels.iter().map(|&x| quantize(x)).collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Returns `(width, height, pixels)`.
pub fn read_pgm<R: Read>(mut r: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < buf.len() && buf[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < buf.len() && buf[pos] == b'#' {
                while pos < buf.len() && buf[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < buf.len() && !buf[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(ExperimentError::Pgm("truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&buf[start..pos]).into_owned())
    };
    let magic = token()?;
    if magic != "P5" {
        return Err(ExperimentError::Pgm(format!("unsupported magic {magic:?}")));
    }
    let num = |s: String| {
        s.parse::<usize>()
            .map_err(|_| ExperimentError::Pgm(format!("bad header field {s:?}")))
    };
    let width = num(token()?)?;
    let height = num(token()?)?;
    let maxval = num(token()?)?;
    if maxval != 255 {
        return Err(ExperimentError::Pgm(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    let start = pos + 1;
    let data = buf
        .get(start..start + width * height)
        .ok_or_else(|| ExperimentError::Pgm("truncated raster".into()))?;
    Ok((width, height, data.iter().map(|&b| dequantize(b)).collect()))
}
