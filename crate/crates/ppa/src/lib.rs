//! Simulator for a fine-grained SIMD pixel processor array.
//!
//! The array model ([`array`]) provides per-pixel analog and binary register
//! planes, FLAG-gated conditional execution and four-neighbour data transfer,
//! with every microinstruction counted in an [`array::InstructionTrace`].
//! On top of it, [`kernels`] implements image shear, rotation by three shears
//! and nearest-neighbour scaling purely out of those microinstructions, using
//! a sliding FLAG curtain so that one parallel shift advances every row or
//! column that still has distance to cover.
//!
//! [`oracle`] holds independent scalar references for the same pixel
//! movements; kernel output is expected to match them pixel for pixel.
//! [`profile`] turns instruction traces into cost reports, and [`pgm`],
//! [`pattern`] and [`cli`] provide file I/O, test patterns and the command
//! line surface.

pub mod array;
pub mod cli;
pub mod image;
pub mod kernels;
pub mod oracle;
pub mod pattern;
pub mod pgm;
pub mod profile;

pub use array::{AnalogReg, ArrayGeometry, ArrayState, Direction, InstructionTrace, OpClass};
pub use image::Image;
pub use kernels::Axis;
