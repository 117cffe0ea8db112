//! Command line surface: runs kernels on PGM files or generated patterns,
//! writes results and instruction-cost traces, and can check every run
//! against the scalar references.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::array::{AnalogReg, ArrayGeometry, ArrayState};
use crate::image::Image;
use crate::kernels::{self, Axis, RotationSpec, ScaleSpec, ShearSpec};
use crate::oracle;
use crate::pattern::{self, PatternKind};
use crate::pgm;
use crate::profile::{self, CostModel, SweepKernel};

/// Environment hook used by the test suite to fake a defective kernel; when
/// set, the output is nudged one PE east after the kernel runs, which any
/// `--verify` pass must catch.
const FAULT_ENV: &str = "PPA_INJECT_FAULT";

#[derive(Debug)]
pub struct CliError {
    pub stage: &'static str,
    pub message: String,
}

impl CliError {
    fn new(stage: &'static str, message: impl fmt::Display) -> Self {
        CliError {
            stage,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(name = "ppa", about = "Pixel processor array simulator", version)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shear the image along one axis.
    Shear {
        /// Shear axis: horizontal or vertical.
        #[arg(long)]
        axis: Axis,
        /// Shear factor; magnitudes above 1 lose most of the image.
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Rotate the image by up to a quarter turn either way.
    Rotate {
        /// Rotation angle in degrees, in [-90, 90].
        #[arg(long = "theta-degrees", allow_negative_numbers = true)]
        theta_degrees: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scale the image; factors must lie in (0, 2].
    Scale {
        /// Horizontal scale factor.
        #[arg(long, allow_negative_numbers = true)]
        sx: f64,
        /// Vertical scale factor.
        #[arg(long, allow_negative_numbers = true)]
        sy: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the kernels against the scalar references over a parameter grid.
    VerifySuite {
        /// Comma-separated square array sizes to test.
        #[arg(long, default_value = "16,64,256")]
        sizes: String,
    },
    /// Profile a kernel over a parameter grid and print one cost report per
    /// grid point.
    Sweep {
        /// Kernel to profile: shear, rotate or scale.
        #[arg(long)]
        kernel: SweepKernel,
        /// Comma-separated grid values: shear factors, angles in degrees, or
        /// uniform scale factors.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 256)]
        width: usize,
        /// Write the reports to this file instead of stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Cost model file (class = value per line).
        #[arg(long)]
        cost_model: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Input PGM file (P2 or P5).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generate the input instead: checkerboard, disk, gradient or
    /// unique-columns.
    #[arg(long, conflicts_with = "input")]
    pub pattern: Option<PatternKind>,
    /// Array height when generating a pattern.
    #[arg(long)]
    pub height: Option<usize>,
    /// Array width when generating a pattern.
    #[arg(long)]
    pub width: Option<usize>,
    /// Value entering at array edges.
    #[arg(long, default_value_t = 0)]
    pub background: u8,
    /// Output PGM path.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the instruction-cost trace to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Cost model file (class = value per line).
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    /// Check the result against the scalar reference; mismatches fail the
    /// run.
    #[arg(long)]
    pub verify: bool,
    /// Write one intermediate PGM per kernel stage, named
    /// `<prefix><stage>.pgm`.
    #[arg(long)]
    pub dump_stages: Option<String>,
    /// Write the output as textual P2 instead of binary P5.
    #[arg(long)]
    pub ascii: bool,
}

/// Which transform a run executes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelOp {
    Shear(ShearSpec),
    Rotate {
        spec: RotationSpec,
        /// Angle as given on the command line, echoed into reports.
        degrees: f64,
    },
    Scale(ScaleSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImageSource {
    File(PathBuf),
    Pattern(PatternKind),
}

/// Fully resolved configuration for one kernel run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: ImageSource,
    pub pattern_geometry: ArrayGeometry,
    pub background: u8,
    pub kernel: KernelOp,
    pub output: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub cost_model: Option<PathBuf>,
    pub verify: bool,
    pub dump_stages: Option<String>,
    pub ascii: bool,
}

impl RunConfig {
    fn from_parts(kernel: KernelOp, common: &CommonArgs) -> Result<Self, CliError> {
        let source = match (&common.input, common.pattern) {
            (Some(path), None) => {
                if common.height.is_some() || common.width.is_some() {
                    return Err(CliError::new(
                        "config",
                        "--height/--width apply only to generated patterns; file inputs set the geometry",
                    ));
                }
                ImageSource::File(path.clone())
            }
            (None, Some(kind)) => ImageSource::Pattern(kind),
            (None, None) => {
                return Err(CliError::new(
                    "config",
                    "either --input or --pattern is required",
                ));
            }
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        };
        let pattern_geometry =
            ArrayGeometry::new(common.height.unwrap_or(256), common.width.unwrap_or(256))
                .map_err(|err| CliError::new("config", err))?;
        Ok(RunConfig {
            source,
            pattern_geometry,
            background: common.background,
            kernel,
            output: common.output.clone(),
            trace: common.trace.clone(),
            cost_model: common.cost_model.clone(),
            verify: common.verify,
            dump_stages: common.dump_stages.clone(),
            ascii: common.ascii,
        })
    }
}

fn load_cost_model(path: Option<&Path>) -> Result<CostModel, CliError> {
    match path {
        None => Ok(CostModel::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|err| CliError::new("cost-model", format!("{}: {err}", path.display())))?;
            CostModel::parse(&text).map_err(|err| CliError::new("cost-model", err))
        }
    }
}

fn kernel_label(kernel: KernelOp) -> &'static str {
    match kernel {
        KernelOp::Shear(_) => "shear",
        KernelOp::Rotate { .. } => "rotate",
        KernelOp::Scale(_) => "scale",
    }
}

fn kernel_params(kernel: KernelOp, background: u8) -> Vec<(String, String)> {
    let mut params = match kernel {
        KernelOp::Shear(spec) => vec![
            ("axis".to_string(), spec.axis.to_string()),
            ("alpha".to_string(), format!("{}", spec.alpha)),
        ],
        KernelOp::Rotate { degrees, .. } => {
            vec![("theta_deg".to_string(), format!("{degrees}"))]
        }
        KernelOp::Scale(spec) => vec![
            ("sx".to_string(), format!("{}", spec.sx)),
            ("sy".to_string(), format!("{}", spec.sy)),
        ],
    };
    params.push(("background".to_string(), background.to_string()));
    params
}

/// Expected result of a run according to the scalar references.
fn reference_result(img: &Image, kernel: KernelOp) -> Result<Image, CliError> {
    let out = match kernel {
        KernelOp::Shear(spec) => oracle::ref_shear(img, spec.axis, spec.alpha),
        KernelOp::Rotate { spec, .. } => {
            let first = oracle::ref_shear(img, Axis::Horizontal, spec.horizontal_factor());
            let second = oracle::ref_shear(&first, Axis::Vertical, spec.vertical_factor());
            oracle::ref_shear(&second, Axis::Horizontal, spec.horizontal_factor())
        }
        KernelOp::Scale(spec) => {
            let first = oracle::ref_scale(img, Axis::Horizontal, spec.sx)
                .map_err(|err| CliError::new("verify", err))?;
            oracle::ref_scale(&first, Axis::Vertical, spec.sy)
                .map_err(|err| CliError::new("verify", err))?
        }
    };
    Ok(out)
}

fn dump_stage(
    state: &mut ArrayState,
    prefix: &str,
    stage: usize,
    ascii: bool,
) -> Result<(), CliError> {
    let img = state.read_plane(AnalogReg::A);
    let path = PathBuf::from(format!("{prefix}{stage}.pgm"));
    pgm::write_pgm(&img, &path, !ascii).map_err(|err| CliError::new("dump-stages", err))
}

/// Execute one configured run: load, transform, write outputs, price the
/// trace, and optionally verify against the scalar reference.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let mut img = match &config.source {
        ImageSource::File(path) => pgm::read_pgm(path)
            .map_err(|err| CliError::new("input", format!("{}: {err}", path.display())))?,
        ImageSource::Pattern(kind) => pattern::make_pattern(
            *kind,
            config.pattern_geometry.height(),
            config.pattern_geometry.width(),
        )
        .map_err(|err| CliError::new("input", err))?,
    };
    img.set_background(config.background);
    let geometry =
        ArrayGeometry::new(img.height(), img.width()).map_err(|err| CliError::new("input", err))?;

    let model = load_cost_model(config.cost_model.as_deref())?;

    let mut state = ArrayState::new(geometry, config.background);
    state
        .load_image(AnalogReg::A, &img)
        .map_err(|err| CliError::new("input", err))?;

    if let KernelOp::Shear(spec) = config.kernel {
        if spec.is_lossy() {
            eprintln!(
                "warning: |alpha| = {} exceeds 1; most content will leave the array",
                spec.alpha.abs()
            );
        }
    }

    match (config.kernel, config.dump_stages.as_deref()) {
        (KernelOp::Shear(spec), prefix) => {
            kernels::shear(&mut state, AnalogReg::A, spec);
            if let Some(prefix) = prefix {
                dump_stage(&mut state, prefix, 1, config.ascii)?;
            }
        }
        (KernelOp::Rotate { spec, .. }, None) => {
            kernels::rotate(&mut state, AnalogReg::A, spec.theta())
                .map_err(|err| CliError::new("kernel", err))?;
        }
        (KernelOp::Rotate { spec, .. }, Some(prefix)) => {
            kernels::shear_horizontal(&mut state, AnalogReg::A, spec.horizontal_factor());
            dump_stage(&mut state, prefix, 1, config.ascii)?;
            kernels::shear_vertical(&mut state, AnalogReg::A, spec.vertical_factor());
            dump_stage(&mut state, prefix, 2, config.ascii)?;
            kernels::shear_horizontal(&mut state, AnalogReg::A, spec.horizontal_factor());
            dump_stage(&mut state, prefix, 3, config.ascii)?;
        }
        (KernelOp::Scale(spec), prefix) => {
            kernels::scale_horizontal(&mut state, AnalogReg::A, spec.sx)
                .map_err(|err| CliError::new("kernel", err))?;
            if let Some(prefix) = prefix {
                dump_stage(&mut state, prefix, 1, config.ascii)?;
            }
            kernels::scale_vertical(&mut state, AnalogReg::A, spec.sy)
                .map_err(|err| CliError::new("kernel", err))?;
            if let Some(prefix) = prefix {
                dump_stage(&mut state, prefix, 2, config.ascii)?;
            }
        }
    }

    if std::env::var_os(FAULT_ENV).is_some_and(|v| v == "1") {
        state.clear_flag_all();
        state
            .set_flag_rows(0..=geometry.height() - 1)
            .expect("full range is always valid");
        state.shift_analog(AnalogReg::A, crate::array::Direction::East);
    }

    let out_img = state.read_plane(AnalogReg::A);

    if let Some(path) = &config.output {
        pgm::write_pgm(&out_img, path, !config.ascii)
            .map_err(|err| CliError::new("output", format!("{}: {err}", path.display())))?;
    }

    if let Some(path) = &config.trace {
        let report = profile::report(
            state.trace(),
            &model,
            kernel_label(config.kernel),
            &kernel_params(config.kernel, config.background),
            geometry,
        );
        std::fs::write(path, report.render())
            .map_err(|err| CliError::new("trace", format!("{}: {err}", path.display())))?;
    }

    if config.verify {
        let expected = reference_result(&img, config.kernel)?;
        let diff =
            oracle::diff_images(&expected, &out_img).map_err(|err| CliError::new("verify", err))?;
        if diff.mismatch_count > 0 {
            return Err(CliError::new(
                "verify",
                format!(
                    "kernel output differs from the scalar reference in {} of {} pixels",
                    diff.mismatch_count,
                    expected.pixels().len()
                ),
            ));
        }
        println!(
            "verify: 0 of {} pixels differ from the scalar reference",
            expected.pixels().len()
        );
    }

    Ok(())
}

fn random_image(geometry: ArrayGeometry, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = vec![0u8; geometry.cells()];
    rng.fill_bytes(&mut pixels);
    Image::from_pixels(geometry.height(), geometry.width(), pixels)
        .expect("geometry dimensions are valid")
}

fn parse_list<T: FromStrErr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            T::parse(s).map_err(|err| CliError::new("config", format!("bad {what} {s:?}: {err}")))
        })
        .collect()
}

/// Tiny helper trait so comma lists of different types share one parser.
trait FromStrErr: Sized {
    fn parse(s: &str) -> Result<Self, String>;
}

impl FromStrErr for usize {
    fn parse(s: &str) -> Result<Self, String> {
        s.parse().map_err(|e| format!("{e}"))
    }
}

impl FromStrErr for f64 {
    fn parse(s: &str) -> Result<Self, String> {
        s.parse().map_err(|e| format!("{e}"))
    }
}

fn verify_case(state: &mut ArrayState, img: &Image, kernel: KernelOp) -> Result<usize, CliError> {
    state
        .load_image(AnalogReg::A, img)
        .map_err(|err| CliError::new("verify-suite", err))?;
    match kernel {
        KernelOp::Shear(spec) => kernels::shear(state, AnalogReg::A, spec),
        KernelOp::Rotate { spec, .. } => kernels::rotate(state, AnalogReg::A, spec.theta())
            .map_err(|err| CliError::new("verify-suite", err))?,
        KernelOp::Scale(spec) => kernels::scale(state, AnalogReg::A, spec.sx, spec.sy)
            .map_err(|err| CliError::new("verify-suite", err))?,
    }
    let actual = state.read_plane(AnalogReg::A);
    let expected = reference_result(img, kernel)?;
    let diff = oracle::diff_images(&expected, &actual)
        .map_err(|err| CliError::new("verify-suite", err))?;
    Ok(diff.mismatch_count)
}

/// Run the oracle-equivalence grid: shears over a factor grid per axis,
/// rotations over the angle grid, and scaling over a factor grid, each
/// checked pixel for pixel against the scalar references.
pub fn run_verify_suite(sizes: &[usize]) -> Result<(), CliError> {
    let mut failures = 0usize;
    for &size in sizes {
        let geometry =
            ArrayGeometry::new(size, size).map_err(|err| CliError::new("verify-suite", err))?;

        let mut shear_cases = 0usize;
        let mut shear_bad = 0usize;
        for k in 0..=16i32 {
            for sign in [1.0, -1.0] {
                let alpha = sign * k as f64 / 16.0;
                for seed in 0..2u64 {
                    let img = random_image(
                        geometry,
                        0xA11CE ^ seed ^ (size as u64) << 20 ^ ((k as u64) << 8),
                    );
                    for axis in [Axis::Horizontal, Axis::Vertical] {
                        let mut state = ArrayState::new(geometry, 0);
                        shear_bad += verify_case(
                            &mut state,
                            &img,
                            KernelOp::Shear(ShearSpec::new(axis, alpha)),
                        )?;
                        shear_cases += 1;
                    }
                }
            }
        }
        report_group(size, "shear", shear_cases, shear_bad, &mut failures);

        let mut rot_cases = 0usize;
        let mut rot_bad = 0usize;
        for degrees in [5.0f64, 15.0, 30.0, 45.0] {
            for sign in [1.0, -1.0] {
                let spec = RotationSpec::new((sign * degrees).to_radians())
                    .map_err(|err| CliError::new("verify-suite", err))?;
                let img = random_image(geometry, 0xB0B ^ (size as u64) << 16 ^ degrees as u64);
                let mut state = ArrayState::new(geometry, 0);
                let kernel = KernelOp::Rotate {
                    spec,
                    degrees: sign * degrees,
                };
                rot_bad += verify_case(&mut state, &img, kernel)?;
                rot_cases += 1;
            }
        }
        report_group(size, "rotate", rot_cases, rot_bad, &mut failures);

        let mut scale_cases = 0usize;
        let mut scale_bad = 0usize;
        for sx in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0] {
            for sy in [0.5, 1.0, 2.0] {
                let spec =
                    ScaleSpec::new(sx, sy).map_err(|err| CliError::new("verify-suite", err))?;
                let img = random_image(
                    geometry,
                    0x5CA1E ^ (size as u64) << 16 ^ (sx * 100.0) as u64,
                );
                let mut state = ArrayState::new(geometry, 0);
                scale_bad += verify_case(&mut state, &img, KernelOp::Scale(spec))?;
                scale_cases += 1;
            }
        }
        report_group(size, "scale", scale_cases, scale_bad, &mut failures);
    }

    if failures > 0 {
        return Err(CliError::new(
            "verify-suite",
            format!("{failures} case group(s) diverged from the scalar references"),
        ));
    }
    println!("verify-suite: PASS");
    Ok(())
}

fn report_group(size: usize, label: &str, cases: usize, bad_pixels: usize, failures: &mut usize) {
    if bad_pixels == 0 {
        println!("{size}x{size} {label}: {cases} cases ok");
    } else {
        println!("{size}x{size} {label}: {cases} cases, {bad_pixels} mismatching pixels");
        *failures += 1;
    }
}

/// Entry point shared by `main` and the tests.
pub fn execute(args: CliArgs) -> Result<(), CliError> {
    match args.command {
        Command::Shear {
            axis,
            alpha,
            common,
        } => {
            let config =
                RunConfig::from_parts(KernelOp::Shear(ShearSpec::new(axis, alpha)), &common)?;
            run(&config)
        }
        Command::Rotate {
            theta_degrees,
            common,
        } => {
            let spec = RotationSpec::new(theta_degrees.to_radians())
                .map_err(|err| CliError::new("config", err))?;
            let kernel = KernelOp::Rotate {
                spec,
                degrees: theta_degrees,
            };
            let config = RunConfig::from_parts(kernel, &common)?;
            run(&config)
        }
        Command::Scale { sx, sy, common } => {
            let spec = ScaleSpec::new(sx, sy).map_err(|err| CliError::new("config", err))?;
            let config = RunConfig::from_parts(KernelOp::Scale(spec), &common)?;
            run(&config)
        }
        Command::VerifySuite { sizes } => {
            let sizes: Vec<usize> = parse_list(&sizes, "size")?;
            run_verify_suite(&sizes)
        }
        Command::Sweep {
            kernel,
            values,
            height,
            width,
            trace,
            cost_model,
        } => {
            let values: Vec<f64> = parse_list(&values, "grid value")?;
            let geometry =
                ArrayGeometry::new(height, width).map_err(|err| CliError::new("config", err))?;
            let model = load_cost_model(cost_model.as_deref())?;
            let reports = profile::sweep(kernel, &values, geometry, &model)
                .map_err(|err| CliError::new("sweep", err))?;
            let rendered: Vec<String> = reports.iter().map(|r| r.render()).collect();
            let text = rendered.join("\n");
            match trace {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|err| CliError::new("trace", format!("{}: {err}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}
