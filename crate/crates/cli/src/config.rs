//! Run configuration. Every field has an explicit default; unknown keys are rejected.

use alphamod::construct::{
    ClaimConfig, ConsistencyConfig, DiscontinuityConfig, InflationConfig, SupercriticalDataSpec,
};
use alphamod::estimates::{BilinearSweepConfig, Pattern, StrichartzConfig};
use alphamod::evolve::{EvolutionConfig, GlasseyConfig, PicardConfig};
use alphamod::grid::{sample, FieldSpec};
use alphamod::{Field, GridSpec};
use clap::ValueEnum;
use num_complex::Complex64;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Decompose,
    Norm,
    Evolve,
    Strichartz,
    Bilinear,
    Construct,
    Inflate,
    Picard,
    Glassey,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Decompose => "decompose",
            Self::Norm => "norm",
            Self::Evolve => "evolve",
            Self::Strichartz => "strichartz",
            Self::Bilinear => "bilinear",
            Self::Construct => "construct",
            Self::Inflate => "inflate",
            Self::Picard => "picard",
            Self::Glassey => "glassey",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct RunConfig {
    /// Must match the command given on the command line when present.
    pub command: Option<Command>,
    pub grid: GridBlock,
    pub physics: PhysicsBlock,
    pub space: SpaceBlock,
    /// Initial data for `norm`, `evolve` and `picard`.
    pub field: FieldConfig,
    pub experiment: ExperimentBlock,
    pub output: OutputBlock,
    /// Seed for every random draw (bilinear random pairs).
    pub seed: u64,
}

/// Periodic box `[-L, L)^d` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub d: usize,
    pub n: usize,
    pub half_length: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { d: 1, n: 1024, half_length: 40.0 }
    }
}

/// `i u_t + Δu + λ|u|^{2κ}u = 0`; `λ > 0` is focusing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsBlock {
    pub lambda: f64,
    pub kappa: u32,
}

impl Default for PhysicsBlock {
    fn default() -> Self {
        Self { lambda: 1.0, kappa: 1 }
    }
}

/// Function-space parameters. Exponents set to `null` mean infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceBlock {
    pub alpha: f64,
    pub s: f64,
    /// Covering constant; calibrated on the grid when `null`.
    pub c: Option<f64>,
    /// Besov sequence exponent.
    pub besov_q: Option<f64>,
    /// Lebesgue exponent of the physical-space norm.
    pub lp_p: Option<f64>,
}

impl Default for SpaceBlock {
    fn default() -> Self {
        Self { alpha: 0.5, s: 0.0, c: None, besov_q: Some(2.0), lp_p: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Zero,
    /// `amplitude exp(-|x - center|^2 / (2 width^2)) exp(i frequency . x)`
    Gaussian {
        center: Vec<f64>,
        width: f64,
        frequency: Vec<f64>,
        amplitude: f64,
    },
    /// Spectral bump `amplitude φ((ξ - center)/width)`.
    FourierBump {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude exp(i frequency . x)`
    PlaneWave {
        frequency: Vec<f64>,
        amplitude: f64,
    },
    Sum {
        parts: Vec<FieldConfig>,
    },
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self::Gaussian { center: vec![0.0], width: 1.0, frequency: vec![0.0], amplitude: 1.0 }
    }
}

impl FieldConfig {
    fn check(&self, d: usize) -> Result<(), String> {
        let dim = |v: &[f64], what: &str| {
            if v.len() == d {
                Ok(())
            } else {
                Err(format!("field {what} has {} components, grid has d = {d}", v.len()))
            }
        };
        match self {
            Self::Zero => Ok(()),
            Self::Gaussian { center, frequency, width, .. } => {
                dim(center, "center")?;
                dim(frequency, "frequency")?;
                if *width > 0.0 {
                    Ok(())
                } else {
                    Err(format!("field width {width}"))
                }
            }
            Self::FourierBump { center, width, .. } => {
                dim(center, "center")?;
                if *width > 0.0 {
                    Ok(())
                } else {
                    Err(format!("field width {width}"))
                }
            }
            Self::PlaneWave { frequency, .. } => dim(frequency, "frequency"),
            Self::Sum { parts } => parts.iter().try_for_each(|p| p.check(d)),
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> alphamod::Result<Field> {
        let amp = |a: f64| Complex64::new(a, 0.0);
        match self {
            Self::Zero => Ok(Field::zeros(*grid)),
            Self::Gaussian { center, width, frequency, amplitude } => {
                let spec = FieldSpec::Gaussian { center: center.clone(), width: *width, frequency: frequency.clone() };
                Ok(sample(grid, &spec)?.scaled(amp(*amplitude)))
            }
            Self::FourierBump { center, width, amplitude } => {
                let spec = FieldSpec::FourierBump { center: center.clone(), width: *width, amplitude: amp(*amplitude) };
                sample(grid, &spec)
            }
            Self::PlaneWave { frequency, amplitude } => {
                let spec = FieldSpec::PlaneWave { frequency: frequency.clone() };
                Ok(sample(grid, &spec)?.scaled(amp(*amplitude)))
            }
            Self::Sum { parts } => parts.iter().try_fold(Field::zeros(*grid), |acc, p| acc.add(&p.sample(grid)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    pub decompose: DecomposeBlock,
    pub evolve: EvolveBlock,
    pub strichartz: StrichartzBlock,
    pub bilinear: BilinearBlock,
    pub construct: ConstructBlock,
    pub inflate: InflateBlock,
    pub picard: PicardBlock,
    pub glassey: GlasseyBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct DecomposeBlock {
    /// Alpha values whose partitions are audited; the piece table uses `space.alpha`.
    pub alphas: Vec<f64>,
    pub dyadic_tolerance: f64,
    pub alpha_tolerance: f64,
}

impl Default for DecomposeBlock {
    fn default() -> Self {
        Self { alphas: vec![0.0, 0.3, 0.5, 0.8], dyadic_tolerance: 1e-14, alpha_tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveBlock {
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    /// Diagnostics every `snapshot_stride` steps; 0 keeps only the endpoints.
    pub snapshot_stride: usize,
    /// Cap on the nonlinear phase per step; shrinks `dt` when set.
    pub max_phase_per_step: Option<f64>,
    /// Stop once `||∇u||_2` exceeds this fraction of `xi_max ||u||_2`.
    pub resolution_fraction: f64,
    /// Also write every recorded snapshot as `(t, x, re, im)` rows.
    pub write_snapshots: bool,
    /// Relative mass drift allowed.
    pub mass_tolerance: f64,
}

impl Default for EvolveBlock {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            dealias: false,
            snapshot_stride: 10,
            max_phase_per_step: None,
            resolution_fraction: 0.5,
            write_snapshots: false,
            mass_tolerance: 1e-10,
        }
    }
}

impl EvolveBlock {
    pub fn evolution(&self, physics: &PhysicsBlock) -> EvolutionConfig {
        EvolutionConfig {
            dealias: self.dealias,
            snapshot_stride: self.snapshot_stride,
            max_phase_per_step: self.max_phase_per_step,
            diagnostics_only: false,
            resolution_fraction: self.resolution_fraction,
            ..EvolutionConfig::new(physics.lambda, physics.kappa, self.dt, self.t_end)
        }
    }
}

/// One-dimensional Strichartz sweep. Exponents set to `null` mean infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct StrichartzBlock {
    pub alpha: f64,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub ks: Vec<i64>,
    pub width_fraction: f64,
    pub t_units: f64,
    pub c: Option<f64>,
    pub decay_length: f64,
    pub slope_tolerance: f64,
    /// Repeat the sweep at `α = 0`, where the ratios must stay flat.
    pub alpha_zero_control: bool,
    pub flat_factor: f64,
}

impl Default for StrichartzBlock {
    fn default() -> Self {
        let d = StrichartzConfig::default();
        Self {
            alpha: d.alpha,
            q: Some(d.q),
            r: Some(d.r),
            ks: d.ks,
            width_fraction: d.width_fraction,
            t_units: d.t_units,
            c: d.c,
            decay_length: d.decay_length,
            slope_tolerance: d.slope_tolerance,
            alpha_zero_control: true,
            flat_factor: d.flat_factor,
        }
    }
}

impl StrichartzBlock {
    pub fn sweep(&self, alpha: f64) -> StrichartzConfig {
        StrichartzConfig {
            alpha,
            q: self.q.unwrap_or(f64::INFINITY),
            r: self.r.unwrap_or(f64::INFINITY),
            ks: self.ks.clone(),
            width_fraction: self.width_fraction,
            t_units: self.t_units,
            c: self.c,
            decay_length: self.decay_length,
            slope_tolerance: self.slope_tolerance,
            flat_factor: self.flat_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum PatternConfig {
    Uv,
    UbarV,
    UVbar,
    UbarVbar,
}

impl From<PatternConfig> for Pattern {
    fn from(p: PatternConfig) -> Self {
        match p {
            PatternConfig::Uv => Pattern::UV,
            PatternConfig::UbarV => Pattern::UbarV,
            PatternConfig::UVbar => Pattern::UVbar,
            PatternConfig::UbarVbar => Pattern::UbarVbar,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct BilinearBlock {
    pub width: f64,
    /// Support gaps of the sweep.
    pub separations: Vec<f64>,
    pub pattern: PatternConfig,
    pub slope_tolerance: f64,
    pub oracle_tolerance: f64,
    /// Random separated pairs compared against the co-area oracle.
    pub random_pairs: usize,
    /// Width range of the random bumps.
    pub random_width: [f64; 2],
    /// Gap range of the random pairs (log-uniform).
    pub random_gap: [f64; 2],
    /// Bumps for the conjugation identity: `(center, width)` each.
    pub conjugation_pair: [[f64; 2]; 2],
    pub conjugation_tolerance: f64,
}

impl Default for BilinearBlock {
    fn default() -> Self {
        let d = BilinearSweepConfig::default();
        Self {
            width: d.width,
            separations: d.separations,
            pattern: PatternConfig::Uv,
            slope_tolerance: d.slope_tolerance,
            oracle_tolerance: d.oracle_tolerance,
            random_pairs: 20,
            random_width: [0.15, 0.5],
            random_gap: [2.0, 16.0],
            conjugation_pair: [[-3.0, 0.3], [5.0, 0.4]],
            conjugation_tolerance: 1e-10,
        }
    }
}

impl BilinearBlock {
    pub fn sweep(&self) -> BilinearSweepConfig {
        BilinearSweepConfig {
            width: self.width,
            separations: self.separations.clone(),
            pattern: self.pattern.into(),
            slope_tolerance: self.slope_tolerance,
            oracle_tolerance: self.oracle_tolerance,
        }
    }
}

/// Lacunary supercritical data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct DataBlock {
    pub epsilon: f64,
    pub alpha: f64,
    pub kappa: u32,
    pub d: usize,
    pub s: f64,
    pub lattice_step: u32,
    pub c: f64,
    pub max_pieces: Option<usize>,
}

impl Default for DataBlock {
    fn default() -> Self {
        let d = SupercriticalDataSpec::default();
        Self {
            epsilon: d.epsilon,
            alpha: d.alpha,
            kappa: d.kappa,
            d: d.d,
            s: d.s,
            lattice_step: d.lattice_step,
            c: d.c,
            max_pieces: d.max_pieces,
        }
    }
}

impl From<&DataBlock> for SupercriticalDataSpec {
    fn from(b: &DataBlock) -> Self {
        Self {
            epsilon: b.epsilon,
            alpha: b.alpha,
            kappa: b.kappa,
            d: b.d,
            s: b.s,
            lattice_step: b.lattice_step,
            c: b.c,
            max_pieces: b.max_pieces,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ClaimBlock {
    /// Scaling factors (powers of two).
    pub sigmas: Vec<f64>,
    pub base_window: u32,
    pub refinements: usize,
    pub samples_per_width: f64,
    pub alpha_zero_control: bool,
    pub slope_tolerance: f64,
}

impl Default for ClaimBlock {
    fn default() -> Self {
        let d = ClaimConfig::default();
        Self {
            sigmas: d.sigmas,
            base_window: d.base_window,
            refinements: d.refinements,
            samples_per_width: d.samples_per_width,
            alpha_zero_control: d.alpha_zero_control,
            slope_tolerance: d.slope_tolerance,
        }
    }
}

impl From<&ClaimBlock> for ClaimConfig {
    fn from(b: &ClaimBlock) -> Self {
        Self {
            sigmas: b.sigmas.clone(),
            base_window: b.base_window,
            refinements: b.refinements,
            samples_per_width: b.samples_per_width,
            alpha_zero_control: b.alpha_zero_control,
            slope_tolerance: b.slope_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructBlock {
    pub data: DataBlock,
    pub claims: ClaimBlock,
}

/// Taylor-coefficient inflation sweep; defaults are the `α = 0` cubic preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct InflateBlock {
    pub alpha: f64,
    pub kappa: u32,
    pub d: usize,
    pub s: f64,
    /// Second regularity on the same coefficients; its slope must not be positive.
    pub control_s: Option<f64>,
    pub ns: Vec<u64>,
    pub c: f64,
    pub duhamel_tol: f64,
    pub slope_tolerance: f64,
    pub consistency: ConsistencyBlock,
    pub discontinuity: DiscontinuityBlock,
}

impl Default for InflateBlock {
    fn default() -> Self {
        let d = InflationConfig::modulation_preset();
        Self {
            alpha: d.alpha,
            kappa: d.kappa,
            d: d.d,
            s: d.s,
            control_s: d.control_s,
            ns: d.ns,
            c: d.c,
            duhamel_tol: d.duhamel_tol,
            slope_tolerance: d.slope_tolerance,
            consistency: ConsistencyBlock::default(),
            discontinuity: DiscontinuityBlock::default(),
        }
    }
}

impl From<&InflateBlock> for InflationConfig {
    fn from(b: &InflateBlock) -> Self {
        Self {
            alpha: b.alpha,
            kappa: b.kappa,
            d: b.d,
            s: b.s,
            control_s: b.control_s,
            ns: b.ns.clone(),
            c: b.c,
            duhamel_tol: b.duhamel_tol,
            slope_tolerance: b.slope_tolerance,
        }
    }
}

/// Full-solver check of the Taylor coefficient (cubic, `α = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ConsistencyBlock {
    pub enabled: bool,
    pub n: u64,
    pub s: f64,
    pub lambda: f64,
    pub delta: f64,
    pub dt: f64,
    pub tolerance: f64,
}

impl Default for ConsistencyBlock {
    fn default() -> Self {
        let d = ConsistencyConfig::default();
        Self { enabled: false, n: d.n, s: d.s, lambda: d.lambda, delta: d.delta, dt: d.dt, tolerance: d.tolerance }
    }
}

impl From<&ConsistencyBlock> for ConsistencyConfig {
    fn from(b: &ConsistencyBlock) -> Self {
        Self { n: b.n, s: b.s, lambda: b.lambda, delta: b.delta, dt: b.dt, tolerance: b.tolerance }
    }
}

/// Full-solver norm growth at fixed data norm; reported, never asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct DiscontinuityBlock {
    pub enabled: bool,
    pub s: f64,
    pub delta: f64,
    pub ns: Vec<u64>,
    pub dt: f64,
    pub lambda: f64,
}

impl Default for DiscontinuityBlock {
    fn default() -> Self {
        let d = DiscontinuityConfig::default();
        Self { enabled: false, s: d.s, delta: d.delta, ns: d.ns, dt: d.dt, lambda: d.lambda }
    }
}

impl From<&DiscontinuityBlock> for DiscontinuityConfig {
    fn from(b: &DiscontinuityBlock) -> Self {
        Self { s: b.s, delta: b.delta, ns: b.ns.clone(), dt: b.dt, lambda: b.lambda }
    }
}

/// Picard iteration on `[0, t_end]` for `field`, measured in `M^{s,α}_{2,1}` from `space`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct PicardBlock {
    pub t_end: f64,
    pub panels: usize,
    pub order: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub smallness: f64,
    /// Rescale the field to this modulation norm before iterating.
    pub data_norm: Option<f64>,
    /// Whether the run is expected to contract.
    pub expect_contraction: bool,
    /// Every successive ratio must stay below this when contraction is expected.
    pub max_ratio: f64,
    /// Convergence must happen within this many iterations.
    pub max_iterations: usize,
}

impl Default for PicardBlock {
    fn default() -> Self {
        let d = PicardConfig::default();
        Self {
            t_end: 1.0,
            panels: d.panels,
            order: d.order,
            max_iter: d.max_iter,
            tol: d.tol,
            smallness: d.smallness,
            data_norm: Some(1e-3),
            expect_contraction: true,
            max_ratio: 0.1,
            max_iterations: 4,
        }
    }
}

impl PicardBlock {
    pub fn picard(&self) -> PicardConfig {
        PicardConfig {
            panels: self.panels,
            order: self.order,
            max_iter: self.max_iter,
            tol: self.tol,
            smallness: self.smallness,
        }
    }
}

/// Negative-energy chirped Gaussian for septic NLS; uses its own grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct GlasseyBlock {
    pub amplitude: f64,
    pub chirp: f64,
    pub n: usize,
    pub half_length: f64,
    pub dt: f64,
    pub t_end: f64,
    pub max_phase_per_step: f64,
    pub resolution_fraction: f64,
    /// Minimum growth of `||∇u||_2` in the focusing run.
    pub min_growth: f64,
    /// Maximum growth of `||∇u||_2` in the defocusing run.
    pub max_defocusing_growth: f64,
}

impl Default for GlasseyBlock {
    fn default() -> Self {
        let d = GlasseyConfig::default();
        Self {
            amplitude: d.amplitude,
            chirp: d.chirp,
            n: d.n,
            half_length: d.half_length,
            dt: d.dt,
            t_end: d.t_end,
            max_phase_per_step: d.max_phase_per_step,
            resolution_fraction: d.resolution_fraction,
            min_growth: 10.0,
            max_defocusing_growth: 2.0,
        }
    }
}

impl From<&GlasseyBlock> for GlasseyConfig {
    fn from(b: &GlasseyBlock) -> Self {
        Self {
            amplitude: b.amplitude,
            chirp: b.chirp,
            n: b.n,
            half_length: b.half_length,
            dt: b.dt,
            t_end: b.t_end,
            max_phase_per_step: b.max_phase_per_step,
            resolution_fraction: b.resolution_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    /// Output directory; `--out` overrides it.
    pub dir: String,
    /// File name prefix; the command name when `null`.
    pub prefix: Option<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: "out".into(), prefix: None }
    }
}

pub fn schema() -> schemars::schema::RootSchema {
    schemars::schema_for!(RunConfig)
}

pub fn schema_json() -> String {
    let mut s = serde_json::to_string_pretty(&schema()).expect("schema serializes");
    s.push('\n');
    s
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    /// Checks that the schema cannot express.
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Schema(m));
        if let Some(c) = self.command {
            if c != command {
                return bad(format!("config is for `{}`, command line asks for `{}`", c.name(), command.name()));
            }
        }
        if let Err(e) = GridSpec::new(self.grid.d, self.grid.n, self.grid.half_length) {
            return bad(e.to_string());
        }
        if self.physics.kappa < 1 || !self.physics.lambda.is_finite() {
            return bad(format!("physics block {:?}", self.physics));
        }
        if !(0.0..1.0).contains(&self.space.alpha) {
            return bad(format!("space.alpha = {} not in [0, 1)", self.space.alpha));
        }
        if let Some(c) = self.space.c {
            if !(c > 0.0) {
                return bad(format!("space.c = {c}"));
            }
        }
        for (name, e) in [("besov_q", self.space.besov_q), ("lp_p", self.space.lp_p)] {
            if let Some(v) = e {
                if !(v >= 1.0) {
                    return bad(format!("space.{name} = {v} must be >= 1"));
                }
            }
        }
        let uses_field = matches!(command, Command::Norm | Command::Evolve | Command::Picard);
        if uses_field {
            if let Err(m) = self.field.check(self.grid.d) {
                return bad(m);
            }
        }
        let e = &self.experiment;
        if e.decompose.alphas.iter().any(|a| !(0.0..1.0).contains(a)) {
            return bad("experiment.decompose.alphas must lie in [0, 1)".into());
        }
        if !(e.evolve.dt > 0.0 && e.evolve.t_end >= 0.0) {
            return bad(format!("evolve dt = {}, t_end = {}", e.evolve.dt, e.evolve.t_end));
        }
        let b = &e.bilinear;
        if !(b.random_width[0] > 0.0 && b.random_width[0] <= b.random_width[1]) {
            return bad(format!("bilinear.random_width {:?}", b.random_width));
        }
        if !(b.random_gap[0] > 0.0 && b.random_gap[0] <= b.random_gap[1]) {
            return bad(format!("bilinear.random_gap {:?}", b.random_gap));
        }
        Ok(())
    }
}
