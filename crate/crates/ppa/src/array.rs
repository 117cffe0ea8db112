//! Register-plane model of a SIMD pixel processor array.
//!
//! Every processing element (PE) owns six analog registers `A`..`F`, seven
//! general-purpose binary registers `S0`..`S6` and a FLAG activity bit.
//! Conditional instructions act only on PEs whose FLAG is set; neighbour
//! transfers move whole register planes one PE north, east, west or south in
//! a single synchronous step. Each instruction executed on an [`ArrayState`]
//! increments exactly one counter of its [`InstructionTrace`].
//!
//! Conventions: row 0 is the top (north) edge and column 0 the left (west)
//! edge. The image origin sits at the array centre, between rows `H/2 - 1`
//! and `H/2` and between columns `W/2 - 1` and `W/2`. Values entering at an
//! array edge are the state's background value for analog planes and zero
//! for binary planes.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::image::Image;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrayError {
    InvalidGeometry {
        height: usize,
        width: usize,
    },
    RowRangeOutOfBounds {
        start: usize,
        end: usize,
        height: usize,
    },
    ColRangeOutOfBounds {
        start: usize,
        end: usize,
        width: usize,
    },
    GeometryMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
}

impl fmt::Display for ArrayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrayError::InvalidGeometry { height, width } => write!(
                f,
                "array geometry must be even and at least 4x4, got {height}x{width}"
            ),
            ArrayError::RowRangeOutOfBounds { start, end, height } => {
                write!(f, "row range {start}..={end} is not within 0..{height}")
            }
            ArrayError::ColRangeOutOfBounds { start, end, width } => {
                write!(f, "column range {start}..={end} is not within 0..{width}")
            }
            ArrayError::GeometryMismatch { expected, actual } => write!(
                f,
                "geometry mismatch: array is {}x{}, image is {}x{}",
                expected.0, expected.1, actual.0, actual.1
            ),
        }
    }
}

impl std::error::Error for ArrayError {}

/// Array dimensions. Height and width must be even and at least 4 so the
/// transform kernels can split the array into equal halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayGeometry {
    height: usize,
    width: usize,
}

impl ArrayGeometry {
    pub fn new(height: usize, width: usize) -> Result<Self, ArrayError> {
        if height < 4 || width < 4 || !height.is_multiple_of(2) || !width.is_multiple_of(2) {
            return Err(ArrayError::InvalidGeometry { height, width });
        }
        Ok(ArrayGeometry { height, width })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cells(&self) -> usize {
        self.height * self.width
    }
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        ArrayGeometry {
            height: 256,
            width: 256,
        }
    }
}

/// Neighbour transfer direction. North is toward row 0, west toward column 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::East => Direction::West,
            Direction::West => Direction::East,
        }
    }
}

/// Names of the six analog register planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalogReg {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl AnalogReg {
    pub const ALL: [AnalogReg; 6] = [
        AnalogReg::A,
        AnalogReg::B,
        AnalogReg::C,
        AnalogReg::D,
        AnalogReg::E,
        AnalogReg::F,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AnalogReg::A => "A",
            AnalogReg::B => "B",
            AnalogReg::C => "C",
            AnalogReg::D => "D",
            AnalogReg::E => "E",
            AnalogReg::F => "F",
        }
    }
}

impl fmt::Display for AnalogReg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalogReg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(AnalogReg::A),
            "B" => Ok(AnalogReg::B),
            "C" => Ok(AnalogReg::C),
            "D" => Ok(AnalogReg::D),
            "E" => Ok(AnalogReg::E),
            "F" => Ok(AnalogReg::F),
            other => Err(format!("unknown analog plane name: {other}")),
        }
    }
}

/// Names of the seven general-purpose binary register planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryReg {
    S0,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl BinaryReg {
    pub const ALL: [BinaryReg; 7] = [
        BinaryReg::S0,
        BinaryReg::S1,
        BinaryReg::S2,
        BinaryReg::S3,
        BinaryReg::S4,
        BinaryReg::S5,
        BinaryReg::S6,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for BinaryReg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "S0" => Ok(BinaryReg::S0),
            "S1" => Ok(BinaryReg::S1),
            "S2" => Ok(BinaryReg::S2),
            "S3" => Ok(BinaryReg::S3),
            "S4" => Ok(BinaryReg::S4),
            "S5" => Ok(BinaryReg::S5),
            "S6" => Ok(BinaryReg::S6),
            other => Err(format!("unknown binary plane name: {other}")),
        }
    }
}

/// Instruction classes tracked by the trace and priced by the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpClass {
    AnalogShift,
    FlagShift,
    FlagSetRegion,
    FlagClearAll,
    PlaneCopy,
    PlaneLoad,
    PlaneRead,
}

impl OpClass {
    pub const ALL: [OpClass; 7] = [
        OpClass::AnalogShift,
        OpClass::FlagShift,
        OpClass::FlagSetRegion,
        OpClass::FlagClearAll,
        OpClass::PlaneCopy,
        OpClass::PlaneLoad,
        OpClass::PlaneRead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpClass::AnalogShift => "analog_shift",
            OpClass::FlagShift => "flag_shift",
            OpClass::FlagSetRegion => "flag_set_region",
            OpClass::FlagClearAll => "flag_clear_all",
            OpClass::PlaneCopy => "plane_copy",
            OpClass::PlaneLoad => "plane_load",
            OpClass::PlaneRead => "plane_read",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OpClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown instruction class: {s}"))
    }
}

/// Per-class instruction counters. Every executed instruction increments
/// exactly one counter by exactly one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstructionTrace {
    counts: [u64; 7],
}

impl InstructionTrace {
    pub fn count(&self, class: OpClass) -> u64 {
        self.counts[class.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (OpClass, u64)> + '_ {
        OpClass::ALL
            .into_iter()
            .map(|c| (c, self.counts[c.index()]))
    }

    fn record(&mut self, class: OpClass) {
        self.counts[class.index()] += 1;
    }
}

/// One analog register plane: a grid of values confined to `[0, 255]`.
/// Out-of-range writes saturate to the nearest bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogPlane {
    height: usize,
    width: usize,
    values: Vec<u8>,
}

impl AnalogPlane {
    pub fn new(geometry: ArrayGeometry, fill: u8) -> Self {
        AnalogPlane {
            height: geometry.height(),
            width: geometry.width(),
            values: vec![fill; geometry.cells()],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.values[row * self.width + col] = value;
    }

    /// Write an arbitrary value, saturating into `[0, 255]`.
    pub fn store(&mut self, row: usize, col: usize, value: i32) {
        self.set(row, col, value.clamp(0, 255) as u8);
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Synchronous masked shift: every cell whose flag is set takes the
    /// pre-shift value of its neighbour on the side opposite to `dir`, so
    /// data moves in direction `dir`. Cells whose source lies outside the
    /// array receive `background`; unflagged cells are untouched.
    fn shift_masked(&mut self, flag: &BinaryPlane, dir: Direction, background: u8) {
        debug_assert_eq!((self.height, self.width), (flag.height, flag.width));
        let (h, w) = (self.height, self.width);
        // In-place update is safe because each pass walks away from the side
        // it reads from, so sources are consumed before being overwritten.
        match dir {
            Direction::West => {
                for r in 0..h {
                    for c in 0..w {
                        if flag.get(r, c) {
                            let v = if c + 1 < w {
                                self.get(r, c + 1)
                            } else {
                                background
                            };
                            self.set(r, c, v);
                        }
                    }
                }
            }
            Direction::East => {
                for r in 0..h {
                    for c in (0..w).rev() {
                        if flag.get(r, c) {
                            let v = if c > 0 {
                                self.get(r, c - 1)
                            } else {
                                background
                            };
                            self.set(r, c, v);
                        }
                    }
                }
            }
            Direction::North => {
                for r in 0..h {
                    for c in 0..w {
                        if flag.get(r, c) {
                            let v = if r + 1 < h {
                                self.get(r + 1, c)
                            } else {
                                background
                            };
                            self.set(r, c, v);
                        }
                    }
                }
            }
            Direction::South => {
                for r in (0..h).rev() {
                    for c in 0..w {
                        if flag.get(r, c) {
                            let v = if r > 0 {
                                self.get(r - 1, c)
                            } else {
                                background
                            };
                            self.set(r, c, v);
                        }
                    }
                }
            }
        }
    }
}

/// One binary register plane: a grid of single bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPlane {
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl BinaryPlane {
    pub fn new(geometry: ArrayGeometry) -> Self {
        BinaryPlane {
            height: geometry.height(),
            width: geometry.width(),
            bits: vec![false; geometry.cells()],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    fn clear(&mut self) {
        self.bits.fill(false);
    }

    fn set_rows(&mut self, rows: RangeInclusive<usize>) {
        for r in rows {
            self.bits[r * self.width..(r + 1) * self.width].fill(true);
        }
    }

    fn set_cols(&mut self, cols: RangeInclusive<usize>) {
        for r in 0..self.height {
            for c in cols.clone() {
                self.bits[r * self.width + c] = true;
            }
        }
    }

    /// Unconditional one-step shift of the whole plane; zeros enter at the
    /// edge the data moves away from.
    fn shift(&mut self, dir: Direction) {
        let (h, w) = (self.height, self.width);
        match dir {
            Direction::West => {
                for r in 0..h {
                    for c in 0..w {
                        let v = if c + 1 < w { self.get(r, c + 1) } else { false };
                        self.set(r, c, v);
                    }
                }
            }
            Direction::East => {
                for r in 0..h {
                    for c in (0..w).rev() {
                        let v = if c > 0 { self.get(r, c - 1) } else { false };
                        self.set(r, c, v);
                    }
                }
            }
            Direction::North => {
                for r in 0..h {
                    for c in 0..w {
                        let v = if r + 1 < h { self.get(r + 1, c) } else { false };
                        self.set(r, c, v);
                    }
                }
            }
            Direction::South => {
                for r in (0..h).rev() {
                    for c in 0..w {
                        let v = if r > 0 { self.get(r - 1, c) } else { false };
                        self.set(r, c, v);
                    }
                }
            }
        }
    }
}

/// Full machine state: the named register planes, the FLAG plane, the edge
/// background value and the instruction trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayState {
    geometry: ArrayGeometry,
    background: u8,
    analog: [AnalogPlane; 6],
    binary: [BinaryPlane; 7],
    flag: BinaryPlane,
    trace: InstructionTrace,
}

impl ArrayState {
    pub fn new(geometry: ArrayGeometry, background: u8) -> Self {
        ArrayState {
            geometry,
            background,
            analog: std::array::from_fn(|_| AnalogPlane::new(geometry, 0)),
            binary: std::array::from_fn(|_| BinaryPlane::new(geometry)),
            flag: BinaryPlane::new(geometry),
            trace: InstructionTrace::default(),
        }
    }

    pub fn geometry(&self) -> ArrayGeometry {
        self.geometry
    }

    pub fn background(&self) -> u8 {
        self.background
    }

    pub fn trace(&self) -> &InstructionTrace {
        &self.trace
    }

    /// Debug view of an analog plane; not an array instruction.
    pub fn analog(&self, reg: AnalogReg) -> &AnalogPlane {
        &self.analog[reg.index()]
    }

    /// Debug view of a binary plane; not an array instruction.
    pub fn binary(&self, reg: BinaryReg) -> &BinaryPlane {
        &self.binary[reg.index()]
    }

    /// Debug view of the FLAG plane; not an array instruction.
    pub fn flag(&self) -> &BinaryPlane {
        &self.flag
    }

    /// Direct FLAG poke for tests and setup; not an array instruction.
    pub fn set_flag_bit(&mut self, row: usize, col: usize, value: bool) {
        self.flag.set(row, col, value);
    }

    /// Direct analog write with saturation; not an array instruction.
    pub fn store_analog(&mut self, reg: AnalogReg, row: usize, col: usize, value: i32) {
        self.analog[reg.index()].store(row, col, value);
    }

    /// Reset FLAG to zero in every PE.
    pub fn clear_flag_all(&mut self) {
        self.flag.clear();
        self.trace.record(OpClass::FlagClearAll);
    }

    /// Set FLAG in every PE whose row index lies in `rows`; other bits keep
    /// their value.
    pub fn set_flag_rows(&mut self, rows: RangeInclusive<usize>) -> Result<(), ArrayError> {
        let (start, end) = (*rows.start(), *rows.end());
        if start > end || end >= self.geometry.height() {
            return Err(ArrayError::RowRangeOutOfBounds {
                start,
                end,
                height: self.geometry.height(),
            });
        }
        self.flag.set_rows(rows);
        self.trace.record(OpClass::FlagSetRegion);
        Ok(())
    }

    /// Column analogue of [`ArrayState::set_flag_rows`].
    pub fn set_flag_cols(&mut self, cols: RangeInclusive<usize>) -> Result<(), ArrayError> {
        let (start, end) = (*cols.start(), *cols.end());
        if start > end || end >= self.geometry.width() {
            return Err(ArrayError::ColRangeOutOfBounds {
                start,
                end,
                width: self.geometry.width(),
            });
        }
        self.flag.set_cols(cols);
        self.trace.record(OpClass::FlagSetRegion);
        Ok(())
    }

    /// Parallel neighbour transfer of an analog plane across all flagged
    /// PEs: data moves one PE in direction `dir`, flagged cells at the
    /// trailing edge receive the background value, unflagged cells keep
    /// their value. All reads see pre-shift values.
    pub fn shift_analog(&mut self, reg: AnalogReg, dir: Direction) {
        let background = self.background;
        let flag = &self.flag;
        self.analog[reg.index()].shift_masked(flag, dir, background);
        self.trace.record(OpClass::AnalogShift);
    }

    /// Shift the FLAG plane itself one PE in direction `dir`,
    /// unconditionally for all PEs; zeros enter at the edge.
    pub fn shift_flag(&mut self, dir: Direction) {
        self.flag.shift(dir);
        self.trace.record(OpClass::FlagShift);
    }

    /// Load an image into an analog plane. The image geometry must equal
    /// the array geometry.
    pub fn load_image(&mut self, reg: AnalogReg, img: &Image) -> Result<(), ArrayError> {
        let expected = (self.geometry.height(), self.geometry.width());
        let actual = (img.height(), img.width());
        if expected != actual {
            return Err(ArrayError::GeometryMismatch { expected, actual });
        }
        let plane = &mut self.analog[reg.index()];
        for r in 0..expected.0 {
            for c in 0..expected.1 {
                plane.set(r, c, img.get(r, c));
            }
        }
        self.trace.record(OpClass::PlaneLoad);
        Ok(())
    }

    /// Read an analog plane out as an image carrying the state background.
    pub fn read_plane(&mut self, reg: AnalogReg) -> Image {
        let mut img = Image::from_pixels(
            self.geometry.height(),
            self.geometry.width(),
            self.analog[reg.index()].values().to_vec(),
        )
        .expect("plane dimensions are valid image dimensions");
        img.set_background(self.background);
        self.trace.record(OpClass::PlaneRead);
        img
    }

    /// Copy one analog plane into another in a single instruction.
    pub fn copy_plane(&mut self, src: AnalogReg, dst: AnalogReg) {
        if src != dst {
            let values = self.analog[src.index()].values().to_vec();
            self.analog[dst.index()].values.copy_from_slice(&values);
        }
        self.trace.record(OpClass::PlaneCopy);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_state() -> ArrayState {
        ArrayState::new(ArrayGeometry::new(8, 8).unwrap(), 0)
    }

    /// Scalar restatement of the masked-shift post-condition, computed on a
    /// copy so it cannot share the in-place update order.
    fn reference_shift(
        plane: &AnalogPlane,
        flag: &BinaryPlane,
        dir: Direction,
        background: u8,
    ) -> Vec<u8> {
        let (h, w) = (plane.height(), plane.width());
        let mut out = plane.values().to_vec();
        for r in 0..h {
            for c in 0..w {
                if !flag.get(r, c) {
                    continue;
                }
                let src = match dir {
                    Direction::West => (Some(r), c.checked_add(1).filter(|&x| x < w)),
                    Direction::East => (Some(r), c.checked_sub(1)),
                    Direction::North => (r.checked_add(1).filter(|&x| x < h), Some(c)),
                    Direction::South => (r.checked_sub(1), Some(c)),
                };
                out[r * w + c] = match src {
                    (Some(sr), Some(sc)) => plane.get(sr, sc),
                    _ => background,
                };
            }
        }
        out
    }

    #[test]
    fn geometry_rejects_odd_and_small() {
        assert!(ArrayGeometry::new(7, 8).is_err());
        assert!(ArrayGeometry::new(8, 10).is_ok());
        assert!(ArrayGeometry::new(2, 8).is_err());
        assert!(ArrayGeometry::new(8, 2).is_err());
        let default = ArrayGeometry::default();
        assert_eq!((default.height(), default.width()), (256, 256));
    }

    #[test]
    fn clear_flag_is_idempotent_and_complemented_by_full_set() {
        let mut state = small_state();
        state.set_flag_rows(2..=5).unwrap();
        state.clear_flag_all();
        assert_eq!(state.flag().count_ones(), 0);
        state.clear_flag_all();
        assert_eq!(state.flag().count_ones(), 0);
        state.set_flag_rows(0..=7).unwrap();
        assert_eq!(state.flag().count_ones(), 64);
    }

    #[test]
    fn set_flag_rows_single_row_and_union() {
        let mut state = small_state();
        state.set_flag_rows(0..=0).unwrap();
        assert_eq!(state.flag().count_ones(), 8);
        state.set_flag_rows(3..=5).unwrap();
        state.set_flag_rows(5..=5).unwrap();
        // union of row 0 and rows 3..=5
        assert_eq!(state.flag().count_ones(), 32);
        assert!(state.flag().get(4, 2));
        assert!(!state.flag().get(1, 0));
    }

    #[test]
    fn set_flag_rows_rejects_out_of_bounds() {
        let mut state = small_state();
        assert!(matches!(
            state.set_flag_rows(0..=8),
            Err(ArrayError::RowRangeOutOfBounds { .. })
        ));
        #[allow(clippy::reversed_empty_ranges)]
        let err = state.set_flag_rows(5..=3);
        assert!(err.is_err());
    }

    #[test]
    fn set_flag_cols_single_column_and_bounds() {
        let mut state = small_state();
        state.set_flag_cols(0..=0).unwrap();
        assert_eq!(state.flag().count_ones(), 8);
        assert!(state.flag().get(7, 0));
        assert!(matches!(
            state.set_flag_cols(4..=9),
            Err(ArrayError::ColRangeOutOfBounds { .. })
        ));
        state.clear_flag_all();
        state.set_flag_cols(0..=7).unwrap();
        assert_eq!(state.flag().count_ones(), 64);
    }

    #[test]
    fn set_flag_cols_after_clear_covers_only_the_requested_region() {
        let mut state = small_state();
        state.set_flag_cols(0..=7).unwrap();
        state.clear_flag_all();
        state.set_flag_cols(2..=3).unwrap();
        assert_eq!(state.flag().count_ones(), 16);
        assert!(state.flag().get(0, 2));
        assert!(!state.flag().get(0, 4));
    }

    #[test]
    fn reading_after_a_shift_reflects_the_shift() {
        let mut state = small_state();
        state.store_analog(AnalogReg::A, 4, 4, 150);
        state.set_flag_rows(0..=7).unwrap();
        state.shift_analog(AnalogReg::A, Direction::South);
        let img = state.read_plane(AnalogReg::A);
        assert_eq!(img.get(5, 4), 150);
        assert_eq!(img.get(4, 4), 0);
    }

    #[test]
    fn full_flag_shift_moves_single_pixel_west() {
        let mut state = small_state();
        state.store_analog(AnalogReg::A, 3, 4, 200);
        state.set_flag_rows(0..=7).unwrap();
        state.shift_analog(AnalogReg::A, Direction::West);
        assert_eq!(state.analog(AnalogReg::A).get(3, 3), 200);
        assert_eq!(state.analog(AnalogReg::A).get(3, 4), 0);
        // background entered along the east edge
        for r in 0..8 {
            assert_eq!(state.analog(AnalogReg::A).get(r, 7), 0);
        }
    }

    #[test]
    fn shift_with_no_flags_is_a_data_no_op() {
        let mut state = small_state();
        state.store_analog(AnalogReg::B, 2, 2, 99);
        let before = state.analog(AnalogReg::B).clone();
        state.shift_analog(AnalogReg::B, Direction::South);
        assert_eq!(state.analog(AnalogReg::B), &before);
        assert_eq!(state.trace().count(OpClass::AnalogShift), 1);
    }

    #[test]
    fn partial_flag_shift_matches_scalar_reference() {
        let mut state = small_state();
        for r in 0..8 {
            for c in 0..8 {
                state.store_analog(AnalogReg::A, r, c, (r * 8 + c) as i32);
            }
        }
        state.set_flag_rows(0..=2).unwrap();
        let expected = reference_shift(
            state.analog(AnalogReg::A),
            state.flag(),
            Direction::East,
            state.background(),
        );
        state.shift_analog(AnalogReg::A, Direction::East);
        assert_eq!(state.analog(AnalogReg::A).values(), expected.as_slice());
        // rows 3.. unchanged
        for c in 0..8 {
            assert_eq!(state.analog(AnalogReg::A).get(5, c), (5 * 8 + c) as u8);
        }
    }

    #[test]
    fn synchronous_update_moves_a_wide_stripe_intact() {
        let mut state = small_state();
        state.store_analog(AnalogReg::A, 4, 3, 10);
        state.store_analog(AnalogReg::A, 4, 4, 20);
        state.set_flag_rows(0..=7).unwrap();
        state.shift_analog(AnalogReg::A, Direction::East);
        assert_eq!(state.analog(AnalogReg::A).get(4, 4), 10);
        assert_eq!(state.analog(AnalogReg::A).get(4, 5), 20);
        assert_eq!(state.analog(AnalogReg::A).get(4, 3), 0);
    }

    #[test]
    fn flag_shift_south_moves_band_and_drains_off_edge() {
        let mut state = small_state();
        state.set_flag_rows(0..=2).unwrap();
        state.shift_flag(Direction::South);
        for c in 0..8 {
            assert!(!state.flag().get(0, c));
            assert!(state.flag().get(1, c));
            assert!(state.flag().get(3, c));
        }
        for _ in 0..8 {
            state.shift_flag(Direction::South);
        }
        assert_eq!(state.flag().count_ones(), 0);
        // all-zero flag plane is a fixed point
        state.shift_flag(Direction::North);
        assert_eq!(state.flag().count_ones(), 0);
    }

    #[test]
    fn load_then_read_round_trips() {
        let mut state = small_state();
        let mut img = Image::new(8, 8, 0).unwrap();
        img.set(1, 2, 123);
        state.load_image(AnalogReg::C, &img).unwrap();
        let out = state.read_plane(AnalogReg::C);
        assert_eq!(out.pixels(), img.pixels());
        let again = state.read_plane(AnalogReg::C);
        assert_eq!(again.pixels(), out.pixels());
        assert_eq!(state.trace().count(OpClass::PlaneLoad), 1);
        assert_eq!(state.trace().count(OpClass::PlaneRead), 2);
    }

    #[test]
    fn load_rejects_geometry_mismatch() {
        let mut state = small_state();
        let img = Image::new(8, 6, 0).unwrap();
        assert!(matches!(
            state.load_image(AnalogReg::A, &img),
            Err(ArrayError::GeometryMismatch { .. })
        ));
    }

    #[test]
    fn copy_plane_duplicates_and_counts() {
        let mut state = small_state();
        state.store_analog(AnalogReg::A, 0, 0, 42);
        state.copy_plane(AnalogReg::A, AnalogReg::B);
        assert_eq!(state.analog(AnalogReg::B).get(0, 0), 42);
        assert_eq!(state.trace().count(OpClass::PlaneCopy), 1);
    }

    // A full-flag round trip restores everything except the one column that
    // fell off the edge the data first moved toward; background refills it.
    #[test]
    fn east_then_west_restores_all_but_the_last_column() {
        let mut state = small_state();
        for r in 0..8 {
            for c in 0..8 {
                state.store_analog(AnalogReg::A, r, c, (1 + r * 8 + c) as i32);
            }
        }
        let before = state.analog(AnalogReg::A).clone();
        state.set_flag_rows(0..=7).unwrap();
        state.shift_analog(AnalogReg::A, Direction::East);
        state.shift_analog(AnalogReg::A, Direction::West);
        for r in 0..8 {
            for c in 0..7 {
                assert_eq!(state.analog(AnalogReg::A).get(r, c), before.get(r, c));
            }
            assert_eq!(state.analog(AnalogReg::A).get(r, 7), 0);
        }
    }

    #[test]
    fn west_then_east_restores_all_but_the_first_column() {
        let mut state = small_state();
        for r in 0..8 {
            for c in 0..8 {
                state.store_analog(AnalogReg::A, r, c, (1 + r * 8 + c) as i32);
            }
        }
        let before = state.analog(AnalogReg::A).clone();
        state.set_flag_rows(0..=7).unwrap();
        state.shift_analog(AnalogReg::A, Direction::West);
        state.shift_analog(AnalogReg::A, Direction::East);
        for r in 0..8 {
            for c in 1..8 {
                assert_eq!(state.analog(AnalogReg::A).get(r, c), before.get(r, c));
            }
            assert_eq!(state.analog(AnalogReg::A).get(r, 0), 0);
        }
    }

    #[test]
    fn trace_counts_each_shift_exactly_once() {
        let mut state = small_state();
        state.set_flag_rows(0..=3).unwrap();
        for _ in 0..17 {
            state.shift_analog(AnalogReg::D, Direction::North);
        }
        assert_eq!(state.trace().count(OpClass::AnalogShift), 17);
        assert_eq!(state.trace().count(OpClass::FlagSetRegion), 1);
    }

    #[test]
    fn analog_writes_saturate() {
        let mut state = small_state();
        state.store_analog(AnalogReg::A, 0, 0, 300);
        state.store_analog(AnalogReg::A, 0, 1, -5);
        assert_eq!(state.analog(AnalogReg::A).get(0, 0), 255);
        assert_eq!(state.analog(AnalogReg::A).get(0, 1), 0);
    }

    #[test]
    fn background_enters_at_flagged_edges() {
        let mut state = ArrayState::new(ArrayGeometry::new(8, 8).unwrap(), 77);
        state.set_flag_rows(0..=7).unwrap();
        state.shift_analog(AnalogReg::A, Direction::North);
        for c in 0..8 {
            assert_eq!(state.analog(AnalogReg::A).get(7, c), 77);
        }
    }

    #[test]
    fn plane_name_parsing() {
        assert_eq!("A".parse::<AnalogReg>().unwrap(), AnalogReg::A);
        assert_eq!("f".parse::<AnalogReg>().unwrap(), AnalogReg::F);
        assert!("G".parse::<AnalogReg>().is_err());
        assert_eq!("S3".parse::<BinaryReg>().unwrap(), BinaryReg::S3);
        assert!("S7".parse::<BinaryReg>().is_err());
    }

    #[test]
    fn direction_opposites() {
        assert_eq!(Direction::North.opposite(), Direction::South);
        assert_eq!(Direction::East.opposite(), Direction::West);
    }
}
