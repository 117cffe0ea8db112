//! Portable graymap reader and writer, textual (P2) and binary (P5),
//! restricted to a maxval of at most 255.

use std::fmt;
use std::io;
use std::path::Path;

use crate::image::Image;

#[derive(Debug)]
pub enum PgmError {
    Io(io::Error),
    UnsupportedMagic { magic: String },
    MalformedHeader { detail: String },
    MaxvalTooLarge { maxval: u32 },
    SampleOutOfRange { value: u32, maxval: u32 },
    TruncatedData { expected: usize, actual: usize },
}

impl fmt::Display for PgmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgmError::Io(err) => write!(f, "i/o error: {err}"),
            PgmError::UnsupportedMagic { magic } => {
                write!(
                    f,
                    "unsupported magic {magic:?}: only P2 and P5 graymaps are handled"
                )
            }
            PgmError::MalformedHeader { detail } => write!(f, "malformed header: {detail}"),
            PgmError::MaxvalTooLarge { maxval } => {
                write!(
                    f,
                    "maxval {maxval} exceeds 255; wide samples are not supported"
                )
            }
            PgmError::SampleOutOfRange { value, maxval } => {
                write!(f, "sample value {value} exceeds maxval {maxval}")
            }
            PgmError::TruncatedData { expected, actual } => {
                write!(
                    f,
                    "truncated pixel data: expected {expected} samples, found {actual}"
                )
            }
        }
    }
}

impl std::error::Error for PgmError {}

impl From<io::Error> for PgmError {
    fn from(err: io::Error) -> Self {
        PgmError::Io(err)
    }
}

/// Byte cursor over the header section, skipping whitespace and `#` comments
/// between tokens.
struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Tokens { bytes, pos: 0 }
    }

    fn skip_filler(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a str> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.bytes[start..self.pos]).ok()
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PgmError> {
        let token = self.token().ok_or_else(|| PgmError::MalformedHeader {
            detail: format!("missing {what}"),
        })?;
        token.parse().map_err(|_| PgmError::MalformedHeader {
            detail: format!("{what} is not a number: {token:?}"),
        })
    }
}

/// Decode a PGM byte stream.
pub fn parse_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let mut tokens = Tokens::new(bytes);
    let magic = tokens.token().ok_or_else(|| PgmError::MalformedHeader {
        detail: "empty file".to_string(),
    })?;
    let binary = match magic {
        "P2" => false,
        "P5" => true,
        other => {
            return Err(PgmError::UnsupportedMagic {
                magic: other.to_string(),
            });
        }
    };
    let width = tokens.number("width")? as usize;
    let height = tokens.number("height")? as usize;
    let maxval = tokens.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader {
            detail: format!("dimensions must be positive, got {width}x{height}"),
        });
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge { maxval });
    }
    if maxval == 0 {
        return Err(PgmError::MalformedHeader {
            detail: "maxval must be positive".to_string(),
        });
    }
    let expected = width * height;

    let pixels = if binary {
        // exactly one whitespace byte separates the header from raw samples
        let data_start = tokens.pos + 1;
        if tokens.pos >= bytes.len() || !bytes[tokens.pos].is_ascii_whitespace() {
            return Err(PgmError::MalformedHeader {
                detail: "maxval must be followed by a single whitespace byte".to_string(),
            });
        }
        let data = &bytes[data_start.min(bytes.len())..];
        if data.len() < expected {
            return Err(PgmError::TruncatedData {
                expected,
                actual: data.len(),
            });
        }
        let data = &data[..expected];
        if let Some(&value) = data.iter().find(|&&v| v as u32 > maxval) {
            return Err(PgmError::SampleOutOfRange {
                value: value as u32,
                maxval,
            });
        }
        data.to_vec()
    } else {
        let mut pixels = Vec::with_capacity(expected);
        while pixels.len() < expected {
            let Some(token) = tokens.token() else {
                return Err(PgmError::TruncatedData {
                    expected,
                    actual: pixels.len(),
                });
            };
            let value: u32 = token.parse().map_err(|_| PgmError::MalformedHeader {
                detail: format!("pixel sample is not a number: {token:?}"),
            })?;
            if value > maxval {
                return Err(PgmError::SampleOutOfRange { value, maxval });
            }
            pixels.push(value as u8);
        }
        pixels
    };

    Ok(Image::from_pixels(height, width, pixels).expect("dimensions validated above"))
}

/// Encode an image as PGM bytes; deterministic for a given image.
pub fn encode_pgm(img: &Image, binary: bool) -> Vec<u8> {
    let header = format!(
        "{}\n{} {}\n255\n",
        if binary { "P5" } else { "P2" },
        img.width(),
        img.height()
    );
    let mut out = header.into_bytes();
    if binary {
        out.extend_from_slice(img.pixels());
    } else {
        for r in 0..img.height() {
            let line: Vec<String> = img.row(r).iter().map(|v| v.to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}

pub fn read_pgm(path: &Path) -> Result<Image, PgmError> {
    let bytes = std::fs::read(path)?;
    parse_pgm(&bytes)
}

pub fn write_pgm(img: &Image, path: &Path, binary: bool) -> Result<(), PgmError> {
    std::fs::write(path, encode_pgm(img, binary))?;
    Ok(())
}
