//! Two-dimensional DFT over row-major complex fields.
//!
//! Forward is unnormalized; the inverse carries the `1/(W*H)` factor so the
//! pair round-trips.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Transforms `field` (row-major, `width` columns) in place.
pub fn dft2d(
    field: &mut [Complex64],
    width: usize,
    height: usize,
    direction: Direction,
) -> Result<()> {
    if width == 0 || height == 0 || field.len() != width * height {
        return Err(Error::Shape(format!(
            "{width}x{height} transform needs {} samples, got {}",
            width * height,
            field.len()
        )));
    }
    let dir = match direction {
        Direction::Forward => FftDirection::Forward,
        Direction::Inverse => FftDirection::Inverse,
    };
    let mut planner = FftPlanner::<f64>::new();

    let row_fft = planner.plan_fft(width, dir);
    row_fft.process(field);

    let col_fft = planner.plan_fft(height, dir);
    let mut column = vec![Complex64::default(); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = field[y * width + x];
        }
        col_fft.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            field[y * width + x] = *c;
        }
    }

    if direction == Direction::Inverse {
        let scale = 1.0 / (width * height) as f64;
        field.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(())
}
