//! Deterministic test patterns.

use std::fmt;
use std::str::FromStr;

use crate::image::{Image, ImageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Checkerboard,
    Disk,
    Gradient,
    UniqueColumns,
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PatternKind::Checkerboard => "checkerboard",
            PatternKind::Disk => "disk",
            PatternKind::Gradient => "gradient",
            PatternKind::UniqueColumns => "unique-columns",
        };
        f.write_str(name)
    }
}

impl FromStr for PatternKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "checkerboard" => Ok(PatternKind::Checkerboard),
            "disk" => Ok(PatternKind::Disk),
            "gradient" => Ok(PatternKind::Gradient),
            "unique-columns" => Ok(PatternKind::UniqueColumns),
            other => Err(format!(
                "unknown pattern kind: {other} (expected checkerboard, disk, gradient or unique-columns)"
            )),
        }
    }
}

/// Build a test pattern:
/// - `checkerboard`: 255 where `(i + j)` is even, 0 elsewhere;
/// - `disk`: a filled 255 disk of radius `min(H, W) / 4` about the centre;
/// - `gradient`: a horizontal ramp from 0 to 255;
/// - `unique-columns`: value `j mod 256` in column `j`.
pub fn make_pattern(kind: PatternKind, height: usize, width: usize) -> Result<Image, ImageError> {
    let mut img = Image::new(height, width, 0)?;
    match kind {
        PatternKind::Checkerboard => {
            for i in 0..height {
                for j in 0..width {
                    img.set(i, j, if (i + j) % 2 == 0 { 255 } else { 0 });
                }
            }
        }
        PatternKind::Disk => {
            let radius = (height.min(width) as f64) / 4.0;
            let cy = (height as f64 - 1.0) / 2.0;
            let cx = (width as f64 - 1.0) / 2.0;
            for i in 0..height {
                for j in 0..width {
                    let d2 = (i as f64 - cy).powi(2) + (j as f64 - cx).powi(2);
                    if d2 <= radius * radius {
                        img.set(i, j, 255);
                    }
                }
            }
        }
        PatternKind::Gradient => {
            for j in 0..width {
                let v = if width > 1 {
                    (j * 255) / (width - 1)
                } else {
                    0
                } as u8;
                for i in 0..height {
                    img.set(i, j, v);
                }
            }
        }
        PatternKind::UniqueColumns => {
            for j in 0..width {
                for i in 0..height {
                    img.set(i, j, (j % 256) as u8);
                }
            }
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkerboard_alternates_per_cell() {
        let img = make_pattern(PatternKind::Checkerboard, 4, 4).unwrap();
        assert_eq!(img.get(0, 0), 255);
        assert_eq!(img.get(0, 1), 0);
        assert_eq!(img.get(1, 0), 0);
        assert_eq!(img.get(1, 1), 255);
    }

    #[test]
    fn unique_columns_tag_by_index() {
        let img = make_pattern(PatternKind::UniqueColumns, 4, 300).unwrap();
        assert_eq!(img.get(2, 0), 0);
        assert_eq!(img.get(2, 37), 37);
        assert_eq!(img.get(2, 256), 0);
    }

    #[test]
    fn disk_mirrors_horizontally() {
        let img = make_pattern(PatternKind::Disk, 16, 16).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                assert_eq!(img.get(i, j), img.get(i, 15 - j));
            }
        }
        // not empty, not full
        let ones = img.pixels().iter().filter(|&&v| v == 255).count();
        assert!(ones > 0 && ones < 256);
    }

    #[test]
    fn gradient_is_a_monotone_ramp() {
        let img = make_pattern(PatternKind::Gradient, 4, 256).unwrap();
        assert_eq!(img.get(0, 0), 0);
        assert_eq!(img.get(0, 255), 255);
        for j in 1..256 {
            assert!(img.get(1, j) >= img.get(1, j - 1));
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("disk".parse::<PatternKind>().unwrap(), PatternKind::Disk);
        assert_eq!(
            "unique-columns".parse::<PatternKind>().unwrap(),
            PatternKind::UniqueColumns
        );
        assert!("plasma".parse::<PatternKind>().is_err());
    }
}
