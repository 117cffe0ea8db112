//! Image transforms expressed as array microinstructions.
//!
//! All three transforms move pixel data with masked parallel shifts driven
//! by a sliding FLAG curtain: the FLAG region covers every row (or column)
//! that still has distance to travel, one analog shift advances all of them
//! at once, and the curtain retreats past each band exactly when its data
//! has arrived.
//!
//! A horizontal shear translates row `i` by `ceil(alpha * (H/2 - i))`
//! columns, positive shifts moving east; the two array halves travel in
//! opposite directions. A rotation is the composition of three shears with
//! factors `-tan(theta/2)`, `sin(theta)`, `-tan(theta/2)`. Scaling removes
//! (or duplicates) evenly spaced columns in each half, spacing
//! `K = ceil(half / E)` with `E = half - ceil(alpha * half)` columns
//! eliminated per half; survivors pack toward the centre.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::array::{AnalogReg, ArrayState, Direction};

#[derive(Debug, Clone, PartialEq)]
pub enum KernelError {
    ThetaOutOfRange { theta: f64 },
    ScaleFactorOutOfRange { factor: f64 },
    AlphaOutOfRange { alpha: f64 },
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::ThetaOutOfRange { theta } => {
                write!(f, "rotation angle {theta} rad is outside [-pi/2, pi/2]")
            }
            KernelError::ScaleFactorOutOfRange { factor } => {
                write!(f, "scale factor {factor} is outside (0, 2]")
            }
            KernelError::AlphaOutOfRange { alpha } => {
                write!(f, "down-scaling factor {alpha} is outside (0, 1]")
            }
        }
    }
}

impl std::error::Error for KernelError {}

/// Shear axis: horizontal shears translate rows, vertical shears translate
/// columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Horizontal => f.write_str("horizontal"),
            Axis::Vertical => f.write_str("vertical"),
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "horizontal" | "h" | "x" => Ok(Axis::Horizontal),
            "vertical" | "v" | "y" => Ok(Axis::Vertical),
            other => Err(format!(
                "unknown axis: {other} (expected horizontal or vertical)"
            )),
        }
    }
}

/// A shear request. Any finite factor is accepted; factors beyond 1 in
/// magnitude push most content off the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearSpec {
    pub axis: Axis,
    pub alpha: f64,
}

impl ShearSpec {
    pub fn new(axis: Axis, alpha: f64) -> Self {
        ShearSpec { axis, alpha }
    }

    /// True when the shear magnitude exceeds 1 and the result is mostly
    /// background.
    pub fn is_lossy(&self) -> bool {
        self.alpha.abs() > 1.0
    }
}

/// A rotation request, limited to a quarter turn either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    theta: f64,
}

impl RotationSpec {
    pub fn new(theta: f64) -> Result<Self, KernelError> {
        if !theta.is_finite() || theta.abs() > FRAC_PI_2 {
            return Err(KernelError::ThetaOutOfRange { theta });
        }
        Ok(RotationSpec { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Factor of the first and third (horizontal) shears.
    pub fn horizontal_factor(&self) -> f64 {
        -(self.theta / 2.0).tan()
    }

    /// Factor of the middle (vertical) shear.
    pub fn vertical_factor(&self) -> f64 {
        self.theta.sin()
    }
}

/// A scaling request with both factors in `(0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSpec {
    pub sx: f64,
    pub sy: f64,
}

impl ScaleSpec {
    pub fn new(sx: f64, sy: f64) -> Result<Self, KernelError> {
        check_scale_factor(sx)?;
        check_scale_factor(sy)?;
        Ok(ScaleSpec { sx, sy })
    }
}

fn check_scale_factor(factor: f64) -> Result<(), KernelError> {
    if !factor.is_finite() || factor <= 0.0 || factor > 2.0 {
        return Err(KernelError::ScaleFactorOutOfRange { factor });
    }
    Ok(())
}

/// Per-band signed shift amounts for one shear, where band `i` (a row for
/// horizontal shears, a column for vertical ones) travels
/// `ceil(alpha * (extent/2 - i))` steps, positive east (or south).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftProfile {
    shifts: Vec<i32>,
    max_steps: usize,
}

impl ShiftProfile {
    pub fn shifts(&self) -> &[i32] {
        &self.shifts
    }

    /// Greatest required shift `N = ceil(|alpha| * extent/2)`; also the
    /// number of masked shifts each active half executes.
    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn is_identity(&self) -> bool {
        self.max_steps == 0
    }

    /// Indices grouped by their nonzero shift amount.
    pub fn shift_sets(&self) -> BTreeMap<i32, Vec<usize>> {
        let mut sets: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, &s) in self.shifts.iter().enumerate() {
            if s != 0 {
                sets.entry(s).or_default().push(i);
            }
        }
        sets
    }
}

/// Shift schedule for shearing an array of `extent` bands by `alpha`.
pub fn row_shifts(alpha: f64, extent: usize) -> ShiftProfile {
    assert!(
        extent >= 4 && extent.is_multiple_of(2),
        "extent must be even and at least 4"
    );
    assert!(alpha.is_finite(), "shear factor must be finite");
    let half = (extent / 2) as f64;
    let shifts = (0..extent)
        .map(|i| (alpha * (half - i as f64)).ceil() as i32)
        .collect();
    let max_steps = (alpha.abs() * half).ceil().min(usize::MAX as f64) as usize;
    ShiftProfile { shifts, max_steps }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Rows,
    Cols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HalfSide {
    /// Rows above or columns left of the centre line.
    Leading,
    /// Rows below or columns right of the centre line.
    Trailing,
}

fn set_band_flag(state: &mut ArrayState, band: Band, range: std::ops::RangeInclusive<usize>) {
    match band {
        Band::Rows => state.set_flag_rows(range),
        Band::Cols => state.set_flag_cols(range),
    }
    .expect("kernel flag region lies inside the array");
}

/// Run one half of a shear with the curtain technique: flag every band of
/// the half that still needs to move, shift once, retreat the curtain past
/// the bands that just finished, repeat `steps` times.
fn shear_half(
    state: &mut ArrayState,
    reg: AnalogReg,
    band: Band,
    side: HalfSide,
    shifts: &[i32],
    steps: usize,
) {
    let extent = shifts.len();
    let half = extent / 2;
    let range = match side {
        HalfSide::Leading => 0..half,
        HalfSide::Trailing => half..extent,
    };
    let offset = range.start;
    let mags: Vec<usize> = shifts[range]
        .iter()
        .map(|s| s.unsigned_abs() as usize)
        .collect();
    let max_mag = *mags.iter().max().expect("half is non-empty");
    if max_mag == 0 {
        return; // nothing in this half moves
    }

    let sign = shifts[offset..offset + mags.len()]
        .iter()
        .find(|&&s| s != 0)
        .expect("half has a nonzero shift")
        .signum();
    let data_dir = match (band, sign > 0) {
        (Band::Rows, true) => Direction::East,
        (Band::Rows, false) => Direction::West,
        (Band::Cols, true) => Direction::South,
        (Band::Cols, false) => Direction::North,
    };
    // The far bands of each half travel furthest, so the curtain retreats
    // toward the outer edge.
    let retreat_dir = match (band, side) {
        (Band::Rows, HalfSide::Leading) => Direction::North,
        (Band::Rows, HalfSide::Trailing) => Direction::South,
        (Band::Cols, HalfSide::Leading) => Direction::West,
        (Band::Cols, HalfSide::Trailing) => Direction::East,
    };
    // Band index of the curtain edge when every band still needing at least
    // n steps must be flagged. Within a half the magnitudes are monotone
    // toward the outer edge, so those bands always form one run touching it.
    let boundary = |n: usize| -> Option<usize> {
        match side {
            HalfSide::Leading => mags.iter().rposition(|&m| m >= n).map(|i| offset + i),
            HalfSide::Trailing => mags.iter().position(|&m| m >= n).map(|i| offset + i),
        }
    };

    state.clear_flag_all();
    let mut edge = boundary(1).expect("half has a nonzero shift");
    match side {
        HalfSide::Leading => set_band_flag(state, band, 0..=edge),
        HalfSide::Trailing => set_band_flag(state, band, edge..=extent - 1),
    }
    let mut curtain_open = true;
    for n in 1..=steps {
        state.shift_analog(reg, data_dir);
        if n == steps {
            break;
        }
        if !curtain_open {
            continue;
        }
        match boundary(n + 1) {
            Some(next) => {
                let retreat = edge.abs_diff(next);
                for _ in 0..retreat {
                    state.shift_flag(retreat_dir);
                }
                edge = next;
            }
            None => {
                // every band of this half has arrived; idle out the
                // remaining steps with an empty flag plane
                state.clear_flag_all();
                curtain_open = false;
            }
        }
    }
}

fn shear_along(state: &mut ArrayState, reg: AnalogReg, band: Band, alpha: f64) {
    let (extent, travel) = match band {
        Band::Rows => (state.geometry().height(), state.geometry().width()),
        Band::Cols => (state.geometry().width(), state.geometry().height()),
    };
    let profile = row_shifts(alpha, extent);
    if profile.is_identity() {
        return;
    }
    // Shifts beyond the travel extent flush a band completely; capping there
    // keeps degenerate factors cheap without changing the result.
    let steps = profile.max_steps().min(travel);
    shear_half(state, reg, band, HalfSide::Leading, profile.shifts(), steps);
    shear_half(
        state,
        reg,
        band,
        HalfSide::Trailing,
        profile.shifts(),
        steps,
    );
}

/// Shear the image in `reg` parallel to the x axis: row `i` translates by
/// `ceil(alpha * (H/2 - i))` columns, positive east. The kernel owns the
/// FLAG plane.
pub fn shear_horizontal(state: &mut ArrayState, reg: AnalogReg, alpha: f64) {
    shear_along(state, reg, Band::Rows, alpha);
}

/// Shear the image in `reg` parallel to the y axis: column `j` translates
/// by `ceil(alpha * (W/2 - j))` rows, positive south.
pub fn shear_vertical(state: &mut ArrayState, reg: AnalogReg, alpha: f64) {
    shear_along(state, reg, Band::Cols, alpha);
}

/// Apply a shear described by a [`ShearSpec`].
pub fn shear(state: &mut ArrayState, reg: AnalogReg, spec: ShearSpec) {
    match spec.axis {
        Axis::Horizontal => shear_horizontal(state, reg, spec.alpha),
        Axis::Vertical => shear_vertical(state, reg, spec.alpha),
    }
}

/// Rotate the image in `reg` by `theta` radians as a horizontal, a vertical
/// and a second horizontal shear.
pub fn rotate(state: &mut ArrayState, reg: AnalogReg, theta: f64) -> Result<(), KernelError> {
    let spec = RotationSpec::new(theta)?;
    shear_horizontal(state, reg, spec.horizontal_factor());
    shear_vertical(state, reg, spec.vertical_factor());
    shear_horizontal(state, reg, spec.horizontal_factor());
    Ok(())
}

/// Column-elimination parameters for down-scaling one half of the array:
/// `removed` columns are dropped, every `spacing`-th from the centre out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EliminationParams {
    pub removed: usize,
    pub spacing: usize,
}

impl EliminationParams {
    pub fn is_identity(&self) -> bool {
        self.removed == 0
    }
}

/// Number and spacing of columns to eliminate per half when down-scaling by
/// `alpha`: `E = half - ceil(alpha * half)` and `K = ceil(half / E)`; an
/// `E` of zero means the scaling is the identity.
pub fn elimination_params(alpha: f64, half: usize) -> Result<EliminationParams, KernelError> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
        return Err(KernelError::AlphaOutOfRange { alpha });
    }
    let kept = (alpha * half as f64).ceil() as usize;
    let removed = half - kept.min(half);
    if removed == 0 {
        return Ok(EliminationParams {
            removed: 0,
            spacing: 0,
        });
    }
    let spacing = half.div_ceil(removed);
    Ok(EliminationParams { removed, spacing })
}

/// Duplication schedule for up-scaling: the expansion amount
/// `D = ceil((alpha - 1) * half)` takes the place of `E` in the same
/// equations, giving spacing `K = ceil(half / D)`.
fn duplication_params(alpha: f64, half: usize) -> Option<EliminationParams> {
    let added = ((alpha - 1.0) * half as f64).ceil() as usize;
    if added == 0 {
        return None;
    }
    Some(EliminationParams {
        removed: added,
        spacing: half.div_ceil(added),
    })
}

/// The half's band index at `offset` steps outward from the centre line.
fn band_index(half: usize, side: HalfSide, offset: usize) -> usize {
    match side {
        HalfSide::Leading => half - 1 - offset,
        HalfSide::Trailing => half + offset,
    }
}

/// Flag the band at `edge` together with everything outward of it.
fn set_outward_flag(
    state: &mut ArrayState,
    band: Band,
    side: HalfSide,
    edge: usize,
    extent: usize,
) {
    match side {
        HalfSide::Leading => set_band_flag(state, band, 0..=edge),
        HalfSide::Trailing => set_band_flag(state, band, edge..=extent - 1),
    }
}

/// Down-scale one half: each masked inward shift overwrites the band at the
/// curtain edge, eliminating it, while everything outward packs one step
/// toward the centre. Between scheduled eliminations the curtain slides
/// outward `spacing - 1` steps. Scheduled offsets past the half boundary are
/// clipped: the remaining eliminations run with the curtain held at the
/// final survivor boundary, truncating the outermost surviving bands.
fn downscale_half(
    state: &mut ArrayState,
    reg: AnalogReg,
    band: Band,
    side: HalfSide,
    params: EliminationParams,
) {
    let extent = match band {
        Band::Rows => state.geometry().height(),
        Band::Cols => state.geometry().width(),
    };
    let half = extent / 2;
    let (e, k) = (params.removed, params.spacing);
    let inward = match (band, side) {
        (Band::Rows, HalfSide::Leading) => Direction::South,
        (Band::Rows, HalfSide::Trailing) => Direction::North,
        (Band::Cols, HalfSide::Leading) => Direction::East,
        (Band::Cols, HalfSide::Trailing) => Direction::West,
    };
    let slide = inward.opposite();

    // scheduled eliminations whose offset m*k - 1 lies inside the half
    let scheduled = e.min(half / k);
    if scheduled > 0 {
        state.clear_flag_all();
        let edge = band_index(half, side, k - 1);
        set_outward_flag(state, band, side, edge, extent);
        for m in 1..=scheduled {
            state.shift_analog(reg, inward);
            if m < scheduled {
                for _ in 0..k - 1 {
                    state.shift_flag(slide);
                }
            }
        }
    }

    let surplus = e - scheduled;
    if surplus > 0 {
        let survivors = half - e;
        state.clear_flag_all();
        let edge = band_index(half, side, survivors);
        set_outward_flag(state, band, side, edge, extent);
        for _ in 0..surplus {
            state.shift_analog(reg, inward);
        }
    }
}

/// Up-scale one half: working from the outer edge inward, flag everything
/// outward of each scheduled band and shift outward once, duplicating the
/// band just inside the flag edge. Content pushed past the array edge is
/// lost; duplicates that would land entirely outside are skipped.
fn upscale_half(
    state: &mut ArrayState,
    reg: AnalogReg,
    band: Band,
    side: HalfSide,
    params: EliminationParams,
) {
    let extent = match band {
        Band::Rows => state.geometry().height(),
        Band::Cols => state.geometry().width(),
    };
    let half = extent / 2;
    let (d, k) = (params.removed, params.spacing);
    let outward = match (band, side) {
        (Band::Rows, HalfSide::Leading) => Direction::North,
        (Band::Rows, HalfSide::Trailing) => Direction::South,
        (Band::Cols, HalfSide::Leading) => Direction::West,
        (Band::Cols, HalfSide::Trailing) => Direction::East,
    };

    let offsets: Vec<usize> = (1..=d)
        .map(|m| m * k - 1)
        .take_while(|&o| o + 2 <= half)
        .collect();
    if offsets.is_empty() {
        return;
    }

    state.clear_flag_all();
    let mut flagged_from: Option<usize> = None;
    for &o in offsets.iter().rev() {
        // flag from just outside the duplicated band to the array edge
        let edge = band_index(half, side, o + 1);
        match (side, flagged_from) {
            (HalfSide::Leading, None) => set_band_flag(state, band, 0..=edge),
            (HalfSide::Leading, Some(prev)) => set_band_flag(state, band, prev + 1..=edge),
            (HalfSide::Trailing, None) => set_band_flag(state, band, edge..=extent - 1),
            (HalfSide::Trailing, Some(prev)) => set_band_flag(state, band, edge..=prev - 1),
        }
        flagged_from = Some(edge);
        state.shift_analog(reg, outward);
    }
}

fn scale_along(
    state: &mut ArrayState,
    reg: AnalogReg,
    band: Band,
    factor: f64,
) -> Result<(), KernelError> {
    check_scale_factor(factor)?;
    let extent = match band {
        Band::Rows => state.geometry().height(),
        Band::Cols => state.geometry().width(),
    };
    let half = extent / 2;
    if factor < 1.0 {
        let params = elimination_params(factor, half)?;
        if params.is_identity() {
            return Ok(());
        }
        downscale_half(state, reg, band, HalfSide::Trailing, params);
        downscale_half(state, reg, band, HalfSide::Leading, params);
    } else if factor > 1.0 {
        if let Some(params) = duplication_params(factor, half) {
            upscale_half(state, reg, band, HalfSide::Trailing, params);
            upscale_half(state, reg, band, HalfSide::Leading, params);
        }
    }
    Ok(())
}

/// Scale the image in `reg` horizontally by `alpha` in `(0, 2]`, removing
/// or duplicating evenly spaced columns in each half of the array.
pub fn scale_horizontal(
    state: &mut ArrayState,
    reg: AnalogReg,
    alpha: f64,
) -> Result<(), KernelError> {
    scale_along(state, reg, Band::Cols, alpha)
}

/// Row analogue of [`scale_horizontal`].
pub fn scale_vertical(
    state: &mut ArrayState,
    reg: AnalogReg,
    beta: f64,
) -> Result<(), KernelError> {
    scale_along(state, reg, Band::Rows, beta)
}

/// General scaling: horizontal by `sx` then vertical by `sy`. Both factors
/// are validated before any data moves.
pub fn scale(state: &mut ArrayState, reg: AnalogReg, sx: f64, sy: f64) -> Result<(), KernelError> {
    let spec = ScaleSpec::new(sx, sy)?;
    scale_horizontal(state, reg, spec.sx)?;
    scale_vertical(state, reg, spec.sy)
}

/// Displacement matrix of one shear in array coordinates `(u, v)` with
/// `u = col - centre` and `v = row - centre` (v grows downward): a
/// horizontal shear maps `u' = u - alpha * v`, a vertical one
/// `v' = v - alpha * u`.
pub fn shear_matrix(axis: Axis, alpha: f64) -> [[f64; 2]; 2] {
    match axis {
        Axis::Horizontal => [[1.0, -alpha], [0.0, 1.0]],
        Axis::Vertical => [[1.0, 0.0], [-alpha, 1.0]],
    }
}

/// Rotation matrix in the same array coordinates.
pub fn rotation_matrix(theta: f64) -> [[f64; 2]; 2] {
    [[theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]]
}

pub fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}
