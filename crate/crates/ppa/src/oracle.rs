//! Independent scalar references for the declared pixel movements.
//!
//! These operate cell by cell on plain [`Image`]s and never touch the array
//! machinery, so they can serve as ground truth for the kernels. They
//! re-derive every schedule from the defining equations rather than sharing
//! code with the kernel implementations.

use std::fmt;

use crate::image::Image;
use crate::kernels::{Axis, KernelError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    GeometryMismatch {
        a: (usize, usize),
        b: (usize, usize),
    },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::GeometryMismatch { a, b } => write!(
                f,
                "image geometries differ: {}x{} vs {}x{}",
                a.0, a.1, b.0, b.1
            ),
        }
    }
}

impl std::error::Error for OracleError {}

fn assert_even(img: &Image) {
    assert!(
        img.height().is_multiple_of(2)
            && img.width().is_multiple_of(2)
            && img.height() >= 4
            && img.width() >= 4,
        "transform references need even dimensions of at least 4"
    );
}

/// Reference shear: band `i` translates by `ceil(alpha * (extent/2 - i))`,
/// positive east for rows and south for columns; vacated cells take the
/// image background.
pub fn ref_shear(img: &Image, axis: Axis, alpha: f64) -> Image {
    assert_even(img);
    let (h, w) = (img.height(), img.width());
    let mut out = Image::new(h, w, img.background()).expect("dimensions already validated");
    out.set_background(img.background());
    match axis {
        Axis::Horizontal => {
            let half = (h / 2) as f64;
            for i in 0..h {
                let r = (alpha * (half - i as f64)).ceil() as i64;
                for j in 0..w {
                    let src = j as i64 - r;
                    if src >= 0 && src < w as i64 {
                        out.set(i, j, img.get(i, src as usize));
                    }
                }
            }
        }
        Axis::Vertical => {
            let half = (w / 2) as f64;
            for j in 0..w {
                let r = (alpha * (half - j as f64)).ceil() as i64;
                for i in 0..h {
                    let src = i as i64 - r;
                    if src >= 0 && src < h as i64 {
                        out.set(i, j, img.get(src as usize, j));
                    }
                }
            }
        }
    }
    out
}

fn check_factor(factor: f64) -> Result<(), KernelError> {
    if !factor.is_finite() || factor <= 0.0 || factor > 2.0 {
        return Err(KernelError::ScaleFactorOutOfRange { factor });
    }
    Ok(())
}

/// Sequentially down-scale one half, given centre-out band values. Scheduled
/// offsets `k-1, 2k-1, ...` are removed; if the schedule runs past the half,
/// the remaining removals truncate the outermost survivors. The result is
/// padded back to `half` values with the background.
fn eliminate_half(values: &[u8], removed: usize, spacing: usize, background: u8) -> Vec<u8> {
    let half = values.len();
    let mut kept: Vec<u8> = values.to_vec();
    let scheduled = removed.min(half / spacing);
    for m in (1..=scheduled).rev() {
        kept.remove(m * spacing - 1);
    }
    for _ in 0..removed - scheduled {
        kept.pop();
    }
    kept.resize(half, background);
    kept
}

/// Sequentially up-scale one half: every `spacing`-th band duplicates,
/// pushing everything beyond it outward; the stream is cut at the half
/// boundary.
fn duplicate_half(values: &[u8], spacing: usize) -> Vec<u8> {
    let half = values.len();
    let mut out = Vec::with_capacity(2 * half);
    for (o, &v) in values.iter().enumerate() {
        out.push(v);
        if (o + 1) % spacing == 0 {
            out.push(v);
        }
    }
    out.truncate(half);
    out
}

fn scale_band(values: &[u8], factor: f64, background: u8) -> Vec<u8> {
    let half = values.len() / 2;
    let (leading, trailing): (Vec<u8>, Vec<u8>) = (
        // centre-out ordering for each half
        (0..half).map(|o| values[half - 1 - o]).collect(),
        (0..half).map(|o| values[half + o]).collect(),
    );
    let (leading, trailing) = if factor < 1.0 {
        let kept = (factor * half as f64).ceil() as usize;
        let removed = half - kept.min(half);
        if removed == 0 {
            (leading, trailing)
        } else {
            let spacing = half.div_ceil(removed);
            (
                eliminate_half(&leading, removed, spacing, background),
                eliminate_half(&trailing, removed, spacing, background),
            )
        }
    } else {
        let added = ((factor - 1.0) * half as f64).ceil() as usize;
        if added == 0 {
            (leading, trailing)
        } else {
            let spacing = half.div_ceil(added);
            (
                duplicate_half(&leading, spacing),
                duplicate_half(&trailing, spacing),
            )
        }
    };
    let mut out = vec![0u8; 2 * half];
    for o in 0..half {
        out[half - 1 - o] = leading[o];
        out[half + o] = trailing[o];
    }
    out
}

/// Reference scaling along one axis with a factor in `(0, 2]`.
pub fn ref_scale(img: &Image, axis: Axis, factor: f64) -> Result<Image, KernelError> {
    check_factor(factor)?;
    assert_even(img);
    let (h, w) = (img.height(), img.width());
    let mut out = img.clone();
    match axis {
        Axis::Horizontal => {
            for i in 0..h {
                let scaled = scale_band(img.row(i), factor, img.background());
                for (j, v) in scaled.into_iter().enumerate() {
                    out.set(i, j, v);
                }
            }
        }
        Axis::Vertical => {
            for j in 0..w {
                let column: Vec<u8> = (0..h).map(|i| img.get(i, j)).collect();
                let scaled = scale_band(&column, factor, img.background());
                for (i, v) in scaled.into_iter().enumerate() {
                    out.set(i, j, v);
                }
            }
        }
    }
    Ok(out)
}

/// Direct nearest-neighbour rotation about the array centre, used to measure
/// how far three-shear rotation strays from an ideal rotation. Sampling
/// rounds half-steps toward the lower index.
pub fn ref_rotate_nn(img: &Image, theta: f64) -> Image {
    assert!(
        theta.is_finite() && theta.abs() <= std::f64::consts::FRAC_PI_2,
        "rotation angle outside [-pi/2, pi/2]"
    );
    let (h, w) = (img.height(), img.width());
    let (cy, cx) = ((h as f64 - 1.0) / 2.0, (w as f64 - 1.0) / 2.0);
    let (sin, cos) = theta.sin_cos();
    let mut out = Image::new(h, w, img.background()).expect("dimensions already validated");
    out.set_background(img.background());
    let nearest = |x: f64| (x - 0.5).ceil() as i64;
    for i in 0..h {
        for j in 0..w {
            let u = j as f64 - cx;
            let v = i as f64 - cy;
            let su = cos * u - sin * v;
            let sv = sin * u + cos * v;
            let sj = nearest(cx + su);
            let si = nearest(cy + sv);
            if si >= 0 && si < h as i64 && sj >= 0 && sj < w as i64 {
                out.set(i, j, img.get(si as usize, sj as usize));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageDiff {
    pub mismatch_count: usize,
    pub mismatch_fraction: f64,
}

/// Count cells where the two images differ.
pub fn diff_images(a: &Image, b: &Image) -> Result<ImageDiff, OracleError> {
    if (a.height(), a.width()) != (b.height(), b.width()) {
        return Err(OracleError::GeometryMismatch {
            a: (a.height(), a.width()),
            b: (b.height(), b.width()),
        });
    }
    let mismatch_count = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .filter(|(x, y)| x != y)
        .count();
    Ok(ImageDiff {
        mismatch_count,
        mismatch_fraction: mismatch_count as f64 / a.pixels().len() as f64,
    })
}
