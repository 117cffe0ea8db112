//! Cost reporting over instruction traces.
//!
//! The hardware cost of a kernel is approximated by pricing each instruction
//! class; the default model charges one unit per instruction, and a model
//! file can override individual classes.

use std::fmt;
use std::str::FromStr;

use crate::array::{AnalogReg, ArrayGeometry, ArrayState, InstructionTrace, OpClass};
use crate::kernels::{self, KernelError};

#[derive(Debug, Clone, PartialEq)]
pub enum CostModelError {
    MalformedLine { line: String },
    UnknownClass { name: String },
    InvalidCost { class: String, value: String },
    NegativeCost { class: String, value: f64 },
}

impl fmt::Display for CostModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostModelError::MalformedLine { line } => {
                write!(f, "cost model line is not `class = value`: {line:?}")
            }
            CostModelError::UnknownClass { name } => {
                write!(f, "unknown instruction class in cost model: {name}")
            }
            CostModelError::InvalidCost { class, value } => {
                write!(f, "cost for {class} is not a number: {value:?}")
            }
            CostModelError::NegativeCost { class, value } => {
                write!(f, "cost for {class} must be non-negative, got {value}")
            }
        }
    }
}

impl std::error::Error for CostModelError {}

/// Cost units charged per instruction class. Defaults to 1.0 everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    costs: [f64; 7],
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { costs: [1.0; 7] }
    }
}

impl CostModel {
    pub fn cost(&self, class: OpClass) -> f64 {
        self.costs[class as usize]
    }

    pub fn set_cost(&mut self, class: OpClass, cost: f64) -> Result<(), CostModelError> {
        if !cost.is_finite() || cost < 0.0 {
            return Err(CostModelError::NegativeCost {
                class: class.name().to_string(),
                value: cost,
            });
        }
        self.costs[class as usize] = cost;
        Ok(())
    }

    /// Parse a flat `class = value` text, one class per line. Blank lines
    /// and `#` comments are ignored; unknown classes are rejected.
    pub fn parse(text: &str) -> Result<Self, CostModelError> {
        let mut model = CostModel::default();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=')
                    .ok_or_else(|| CostModelError::MalformedLine {
                        line: line.to_string(),
                    })?;
            let key = key.trim();
            let value = value.trim();
            let class = OpClass::from_str(key).map_err(|_| CostModelError::UnknownClass {
                name: key.to_string(),
            })?;
            let cost: f64 = value.parse().map_err(|_| CostModelError::InvalidCost {
                class: key.to_string(),
                value: value.to_string(),
            })?;
            model.set_cost(class, cost)?;
        }
        Ok(model)
    }
}

/// Priced summary of one kernel execution.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub label: String,
    pub params: Vec<(String, String)>,
    pub height: usize,
    pub width: usize,
    counts: [u64; 7],
    costs: [f64; 7],
    pub total_cost: f64,
}

impl CostReport {
    pub fn count(&self, class: OpClass) -> u64 {
        self.counts[class as usize]
    }

    pub fn class_cost(&self, class: OpClass) -> f64 {
        self.costs[class as usize]
    }

    /// Line-oriented `key = value` rendering, one record per report. The
    /// line order is fixed so identical runs produce identical bytes.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("kernel = {}\n", self.label));
        for (key, value) in &self.params {
            out.push_str(&format!("{key} = {value}\n"));
        }
        out.push_str(&format!("height = {}\n", self.height));
        out.push_str(&format!("width = {}\n", self.width));
        for class in OpClass::ALL {
            out.push_str(&format!("{} = {}\n", class.name(), self.count(class)));
        }
        for class in OpClass::ALL {
            out.push_str(&format!(
                "cost_{} = {}\n",
                class.name(),
                self.class_cost(class)
            ));
        }
        out.push_str(&format!("total_cost = {}\n", self.total_cost));
        out
    }
}

/// Price a trace under a cost model.
pub fn report(
    trace: &InstructionTrace,
    model: &CostModel,
    label: &str,
    params: &[(String, String)],
    geometry: ArrayGeometry,
) -> CostReport {
    let mut counts = [0u64; 7];
    let mut costs = [0f64; 7];
    let mut total_cost = 0.0;
    for class in OpClass::ALL {
        let count = trace.count(class);
        let cost = count as f64 * model.cost(class);
        counts[class as usize] = count;
        costs[class as usize] = cost;
        total_cost += cost;
    }
    CostReport {
        label: label.to_string(),
        params: params.to_vec(),
        height: geometry.height(),
        width: geometry.width(),
        counts,
        costs,
        total_cost,
    }
}

/// Kernels a parameter sweep can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKernel {
    /// Horizontal shear; grid values are shear factors.
    Shear,
    /// Rotation; grid values are angles in degrees.
    Rotate,
    /// Uniform scaling; grid values are applied to both axes.
    Scale,
}

impl SweepKernel {
    fn label(self) -> &'static str {
        match self {
            SweepKernel::Shear => "shear",
            SweepKernel::Rotate => "rotate",
            SweepKernel::Scale => "scale",
        }
    }
}

impl FromStr for SweepKernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "shear" => Ok(SweepKernel::Shear),
            "rotate" => Ok(SweepKernel::Rotate),
            "scale" => Ok(SweepKernel::Scale),
            other => Err(format!(
                "unknown sweep kernel: {other} (expected shear, rotate or scale)"
            )),
        }
    }
}

/// Execute a kernel once per grid value on a fresh array and report the
/// instruction costs, in grid order. Instruction counts depend only on the
/// geometry and parameters, so the sweep runs on blank planes.
pub fn sweep(
    kernel: SweepKernel,
    values: &[f64],
    geometry: ArrayGeometry,
    model: &CostModel,
) -> Result<Vec<CostReport>, KernelError> {
    let mut reports = Vec::with_capacity(values.len());
    for &value in values {
        let mut state = ArrayState::new(geometry, 0);
        let params = match kernel {
            SweepKernel::Shear => {
                kernels::shear_horizontal(&mut state, AnalogReg::A, value);
                vec![
                    ("axis".to_string(), "horizontal".to_string()),
                    ("alpha".to_string(), format!("{value}")),
                ]
            }
            SweepKernel::Rotate => {
                kernels::rotate(&mut state, AnalogReg::A, value.to_radians())?;
                vec![("theta_deg".to_string(), format!("{value}"))]
            }
            SweepKernel::Scale => {
                kernels::scale(&mut state, AnalogReg::A, value, value)?;
                vec![
                    ("sx".to_string(), format!("{value}")),
                    ("sy".to_string(), format!("{value}")),
                ]
            }
        };
        reports.push(report(
            state.trace(),
            model,
            kernel.label(),
            &params,
            geometry,
        ));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry(h: usize, w: usize) -> ArrayGeometry {
        ArrayGeometry::new(h, w).unwrap()
    }

    #[test]
    fn empty_trace_costs_nothing() {
        let trace = InstructionTrace::default();
        let rep = report(&trace, &CostModel::default(), "noop", &[], geometry(8, 8));
        assert_eq!(rep.total_cost, 0.0);
        assert_eq!(rep.count(OpClass::AnalogShift), 0);
    }

    #[test]
    fn doubling_costs_doubles_the_total() {
        let mut state = ArrayState::new(geometry(16, 16), 0);
        kernels::shear_horizontal(&mut state, AnalogReg::A, 0.5);
        let unit = report(
            state.trace(),
            &CostModel::default(),
            "shear",
            &[],
            geometry(16, 16),
        );
        let mut doubled = CostModel::default();
        for class in OpClass::ALL {
            doubled.set_cost(class, 2.0).unwrap();
        }
        let twice = report(state.trace(), &doubled, "shear", &[], geometry(16, 16));
        assert!((twice.total_cost - 2.0 * unit.total_cost).abs() < 1e-9);
    }

    #[test]
    fn total_is_the_sum_of_class_costs() {
        let mut state = ArrayState::new(geometry(16, 16), 0);
        kernels::rotate(&mut state, AnalogReg::A, 0.5).unwrap();
        let mut model = CostModel::default();
        model.set_cost(OpClass::AnalogShift, 2.5).unwrap();
        model.set_cost(OpClass::FlagShift, 0.25).unwrap();
        let rep = report(state.trace(), &model, "rotate", &[], geometry(16, 16));
        let sum: f64 = OpClass::ALL.iter().map(|&c| rep.class_cost(c)).sum();
        assert!((rep.total_cost - sum).abs() < 1e-9);
        assert_eq!(
            rep.class_cost(OpClass::AnalogShift),
            rep.count(OpClass::AnalogShift) as f64 * 2.5
        );
    }

    #[test]
    fn unit_costs_make_total_equal_instruction_count() {
        let geometry = geometry(256, 256);
        let mut state = ArrayState::new(geometry, 0);
        kernels::rotate(&mut state, AnalogReg::A, 45f64.to_radians()).unwrap();
        let rep = report(
            state.trace(),
            &CostModel::default(),
            "rotate",
            &[],
            geometry,
        );
        assert_eq!(rep.total_cost, state.trace().total() as f64);
        assert!(rep.count(OpClass::AnalogShift) > 0);
    }

    #[test]
    fn cost_model_parses_overrides_and_rejects_junk() {
        let model = CostModel::parse("# comment\nanalog_shift = 3.5\n\nflag_shift=0\n").unwrap();
        assert_eq!(model.cost(OpClass::AnalogShift), 3.5);
        assert_eq!(model.cost(OpClass::FlagShift), 0.0);
        assert_eq!(model.cost(OpClass::PlaneLoad), 1.0);

        assert!(matches!(
            CostModel::parse("warp_speed = 1"),
            Err(CostModelError::UnknownClass { .. })
        ));
        assert!(matches!(
            CostModel::parse("analog_shift = fast"),
            Err(CostModelError::InvalidCost { .. })
        ));
        assert!(matches!(
            CostModel::parse("analog_shift = -1"),
            Err(CostModelError::NegativeCost { .. })
        ));
        assert!(matches!(
            CostModel::parse("analog_shift 1"),
            Err(CostModelError::MalformedLine { .. })
        ));
    }

    #[test]
    fn sweep_single_zero_angle_reports_zero_shifts() {
        let reports = sweep(
            SweepKernel::Rotate,
            &[0.0],
            geometry(16, 16),
            &CostModel::default(),
        )
        .unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].count(OpClass::AnalogShift), 0);
    }

    #[test]
    fn rotation_sweep_counts_are_monotone() {
        let grid: Vec<f64> = (1..=9).map(|k| 5.0 * k as f64).collect();
        let reports = sweep(
            SweepKernel::Rotate,
            &grid,
            geometry(64, 64),
            &CostModel::default(),
        )
        .unwrap();
        let counts: Vec<u64> = reports
            .iter()
            .map(|r| r.count(OpClass::AnalogShift))
            .collect();
        for pair in counts.windows(2) {
            assert!(pair[0] <= pair[1], "counts not monotone: {counts:?}");
        }
    }

    #[test]
    fn scale_sweep_counts_grow_away_from_unity() {
        let grid = [1.0, 0.75, 0.5, 0.25];
        let reports = sweep(
            SweepKernel::Scale,
            &grid,
            geometry(64, 64),
            &CostModel::default(),
        )
        .unwrap();
        let counts: Vec<u64> = reports
            .iter()
            .map(|r| r.count(OpClass::AnalogShift))
            .collect();
        assert_eq!(counts[0], 0);
        for pair in counts.windows(2) {
            assert!(pair[0] < pair[1], "counts not growing: {counts:?}");
        }
    }

    #[test]
    fn shear_sweep_matches_the_closed_form() {
        let grid: Vec<f64> = (1..=8).map(|k| k as f64 / 8.0).collect();
        let reports = sweep(
            SweepKernel::Shear,
            &grid,
            geometry(64, 64),
            &CostModel::default(),
        )
        .unwrap();
        for (value, rep) in grid.iter().zip(&reports) {
            let expected = 2 * (value * 32.0).ceil() as u64;
            assert_eq!(rep.count(OpClass::AnalogShift), expected);
        }
    }

    #[test]
    fn identical_sweeps_render_identically() {
        let args = (SweepKernel::Rotate, [15.0, 30.0], geometry(32, 32));
        let a = sweep(args.0, &args.1, args.2, &CostModel::default()).unwrap();
        let b = sweep(args.0, &args.1, args.2, &CostModel::default()).unwrap();
        let render_a: Vec<String> = a.iter().map(|r| r.render()).collect();
        let render_b: Vec<String> = b.iter().map(|r| r.render()).collect();
        assert_eq!(render_a, render_b);
    }

    #[test]
    fn sweep_rejects_unknown_kernel_names() {
        assert!("blur".parse::<SweepKernel>().is_err());
        assert_eq!(
            "rotate".parse::<SweepKernel>().unwrap(),
            SweepKernel::Rotate
        );
    }
}
