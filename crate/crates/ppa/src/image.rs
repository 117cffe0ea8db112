//! Plain grayscale image storage shared by the oracle, file I/O and patterns.

use std::fmt;

/// Row-major 8-bit grayscale image together with a background value.
///
/// The background is the value assumed to lie outside the image bounds;
/// transforms fill vacated cells with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    height: usize,
    width: usize,
    background: u8,
    pixels: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageError {
    EmptyDimensions { height: usize, width: usize },
    PixelCountMismatch { expected: usize, actual: usize },
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageError::EmptyDimensions { height, width } => {
                write!(f, "image dimensions must be positive, got {height}x{width}")
            }
            ImageError::PixelCountMismatch { expected, actual } => {
                write!(f, "expected {expected} pixel values, got {actual}")
            }
        }
    }
}

impl std::error::Error for ImageError {}

impl Image {
    pub fn new(height: usize, width: usize, fill: u8) -> Result<Self, ImageError> {
        if height == 0 || width == 0 {
            return Err(ImageError::EmptyDimensions { height, width });
        }
        Ok(Image {
            height,
            width,
            background: 0,
            pixels: vec![fill; height * width],
        })
    }

    pub fn from_pixels(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if height == 0 || width == 0 {
            return Err(ImageError::EmptyDimensions { height, width });
        }
        if pixels.len() != height * width {
            return Err(ImageError::PixelCountMismatch {
                expected: height * width,
                actual: pixels.len(),
            });
        }
        Ok(Image {
            height,
            width,
            background: 0,
            pixels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn background(&self) -> u8 {
        self.background
    }

    pub fn set_background(&mut self, value: u8) {
        self.background = value;
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        assert!(
            row < self.height && col < self.width,
            "pixel index out of bounds"
        );
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        assert!(
            row < self.height && col < self.width,
            "pixel index out of bounds"
        );
        self.pixels[row * self.width + col] = value;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn row(&self, row: usize) -> &[u8] {
        assert!(row < self.height, "row index out of bounds");
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    /// New image with rows and columns swapped; keeps the background.
    pub fn transposed(&self) -> Image {
        let mut out = Image::new(self.width, self.height, 0).expect("dimensions already validated");
        out.background = self.background;
        for r in 0..self.height {
            for c in 0..self.width {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_dimensions() {
        assert!(matches!(
            Image::new(0, 4, 0),
            Err(ImageError::EmptyDimensions { .. })
        ));
        assert!(matches!(
            Image::from_pixels(2, 0, vec![]),
            Err(ImageError::EmptyDimensions { .. })
        ));
    }

    #[test]
    fn rejects_wrong_pixel_count() {
        assert!(matches!(
            Image::from_pixels(2, 2, vec![1, 2, 3]),
            Err(ImageError::PixelCountMismatch {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn transpose_is_involutive() {
        let img = Image::from_pixels(2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let t = img.transposed();
        assert_eq!(t.get(2, 1), 6);
        assert_eq!(t.transposed(), img);
    }
}
