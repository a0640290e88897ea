//! Versioned JSON scenario configuration.

use std::f64::consts::PI;
use std::sync::Arc;

use perforate_core::conductivity::DomainRule;
use perforate_core::pde::{InitialScaling, PdeParams};
use perforate_core::percolation::LatticeParams;
use perforate_core::{GeometryParams, ProcessParams, ThinningLevel, Window};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
/// Declaration order is dependency order.
pub enum StudyKind {
    Sample,
    Thin,
    Percolate,
    Conductivity,
    Stats,
    Pde,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Sample => "sample",
            StudyKind::Thin => "thin",
            StudyKind::Percolate => "percolate",
            StudyKind::Conductivity => "conductivity",
            StudyKind::Pde => "pde",
            StudyKind::Stats => "stats",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub seed: u64,
    /// Directory below the output root.
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    pub studies: Vec<StudyKind>,
    #[serde(default)]
    pub process: ProcessConfig,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub thinning: ThinningConfig,
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub conductivity: ConductivityConfig,
    #[serde(default)]
    pub stats: StatsConfig,
    #[serde(default)]
    pub pde: PdeConfig,
}

fn default_output_dir() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessConfig {
    pub intensity: f64,
    pub dim: usize,
    /// `[lo, hi]` corners of the sampling window.
    pub window: [Vec<f64>; 2],
}

impl Default for ProcessConfig {
    fn default() -> Self {
        ProcessConfig {
            intensity: 1.0,
            dim: 2,
            window: [vec![0.0, 0.0], vec![20.0, 20.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub r: f64,
    /// Assumed critical radius; required unless `lattice.k_scale` is given.
    #[serde(default)]
    pub r_c: Option<f64>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { r: 0.3, r_c: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThinningConfig {
    pub levels: Vec<usize>,
}

impl Default for ThinningConfig {
    fn default() -> Self {
        ThinningConfig { levels: vec![2, 5, 10] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingConfig {
    pub ns: Vec<usize>,
    pub c1: f64,
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub n: usize,
    pub replicas: usize,
    pub m_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    #[serde(default)]
    pub k_scale: Option<usize>,
    pub n: usize,
    #[serde(default)]
    pub crossing: Option<CrossingConfig>,
    #[serde(default)]
    pub decay: Option<DecayConfig>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            k_scale: None,
            n: 16,
            crossing: None,
            decay: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RuleConfig {
    Strict,
    #[default]
    Center,
    Cover,
}

impl From<RuleConfig> for DomainRule {
    fn from(r: RuleConfig) -> Self {
        match r {
            RuleConfig::Strict => DomainRule::Strict,
            RuleConfig::Center => DomainRule::Center,
            RuleConfig::Cover => DomainRule::Cover,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConductivityConfig {
    pub n: usize,
    pub s: usize,
    #[serde(default)]
    pub rule: RuleConfig,
    /// Thinning level applied to the cloud first.
    #[serde(default)]
    pub level: Option<usize>,
    /// Use the filled model (CENTER cells minus islands).
    #[serde(default)]
    pub filled: bool,
    /// Also compare Boolean and filled exclusion along `e1`.
    #[serde(default)]
    pub compare_filled: bool,
    /// Also check the channel lower bound with the COVER rule.
    #[serde(default)]
    pub channel_bound: bool,
    /// Extra sampling margin around the box for unthinned clouds.
    #[serde(default = "default_pad")]
    pub pad: f64,
}

fn default_pad() -> f64 {
    3.0
}

impl Default for ConductivityConfig {
    fn default() -> Self {
        ConductivityConfig {
            n: 16,
            s: 4,
            rule: RuleConfig::Center,
            level: None,
            filled: false,
            compare_filled: false,
            channel_bound: false,
            pad: default_pad(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsConfig {
    pub window: [Vec<f64>; 2],
    pub replicas: usize,
    pub levels: Vec<usize>,
    #[serde(default = "yes")]
    pub intensity: bool,
    #[serde(default = "yes")]
    pub vacancy: bool,
    #[serde(default = "yes")]
    pub surface: bool,
}

fn yes() -> bool {
    true
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            window: [vec![0.0, 0.0], vec![50.0, 50.0]],
            replicas: 200,
            levels: vec![2, 4, 8, 16, 32],
            intensity: true,
            vacancy: true,
            surface: true,
        }
    }
}

/// Closed-form initial fields on `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldTag {
    Constant { value: f64 },
    /// `offset + amplitude cos(πx) cos(πy)`.
    CosineProduct { offset: f64, amplitude: f64 },
    /// `offset + amplitude cos(πx)`.
    CosineX { offset: f64, amplitude: f64 },
}

/// Closed-form sources `f(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceTag {
    Zero,
    Constant { value: f64 },
    /// `(π² - 1) e^{-t} cos(πx)`, the forcing of `e^{-t} cos(πx)` under the
    /// heat equation.
    DecayingCosine,
}

/// Diffusion coefficient `A(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiffusionTag {
    Constant { value: f64 },
    /// `base + amplitude / (1 + u²)`.
    Rational { base: f64, amplitude: f64 },
}

/// Robin/reaction nonlinearity `h(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReactionTag {
    Zero,
    Constant { value: f64 },
    /// `offset - rate u`.
    Linear { offset: f64, rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScalingConfig {
    Paper,
    #[default]
    Plain,
    Both,
}

impl ScalingConfig {
    pub fn modes(self) -> Vec<InitialScaling> {
        match self {
            ScalingConfig::Paper => vec![InitialScaling::Paper],
            ScalingConfig::Plain => vec![InitialScaling::Plain],
            ScalingConfig::Both => vec![InitialScaling::Plain, InitialScaling::Paper],
        }
    }
}

/// Homogenized coefficients; missing entries are estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsConfig {
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub c2: Option<f64>,
    #[serde(default)]
    pub a_matrix: Option<[[f64; 2]; 2]>,
    /// Replicas and window side for estimating `c1` and `c2`.
    #[serde(default = "default_coeff_replicas")]
    pub replicas: usize,
    #[serde(default = "default_coeff_window")]
    pub window_side: f64,
    /// Lattice scale, side and refinement for estimating the matrix.
    #[serde(default = "default_coeff_k")]
    pub k_scale: usize,
    #[serde(default = "default_coeff_n")]
    pub n: usize,
    #[serde(default = "default_coeff_s")]
    pub s: usize,
}

impl Default for CoefficientsConfig {
    fn default() -> Self {
        CoefficientsConfig {
            c1: None,
            c2: None,
            a_matrix: None,
            replicas: default_coeff_replicas(),
            window_side: default_coeff_window(),
            k_scale: default_coeff_k(),
            n: default_coeff_n(),
            s: default_coeff_s(),
        }
    }
}

fn default_coeff_replicas() -> usize {
    20
}
fn default_coeff_window() -> f64 {
    40.0
}
fn default_coeff_k() -> usize {
    4
}
fn default_coeff_n() -> usize {
    64
}
fn default_coeff_s() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeConfig {
    pub q: [[f64; 2]; 2],
    pub t_final: f64,
    pub dt: f64,
    pub cells_per_unit: usize,
    pub level: usize,
    pub eps: Vec<f64>,
    #[serde(default)]
    pub initial_scaling: ScalingConfig,
    pub u0: FieldTag,
    pub f: SourceTag,
    pub a: DiffusionTag,
    pub h: ReactionTag,
    #[serde(default)]
    pub coefficients: CoefficientsConfig,
    #[serde(default)]
    pub picard_sweeps: usize,
    /// Write binary snapshots of the finest ε solution and the homogenized
    /// solution.
    #[serde(default)]
    pub snapshots: bool,
}

impl Default for PdeConfig {
    fn default() -> Self {
        PdeConfig {
            q: [[0.0, 0.0], [1.0, 1.0]],
            t_final: 0.5,
            dt: 1e-3,
            cells_per_unit: 128,
            level: 5,
            eps: vec![0.25, 0.125, 0.0625],
            initial_scaling: ScalingConfig::Both,
            u0: FieldTag::CosineProduct {
                offset: 1.0,
                amplitude: 1.0,
            },
            f: SourceTag::Zero,
            a: DiffusionTag::Constant { value: 1.0 },
            h: ReactionTag::Linear { offset: 0.0, rate: 1.0 },
            coefficients: CoefficientsConfig::default(),
            picard_sweeps: 0,
            snapshots: false,
        }
    }
}

pub(crate) fn window_from(corners: &[Vec<f64>; 2], dim: usize, what: &str) -> Result<Window> {
    if corners[0].len() != dim || corners[1].len() != dim {
        return Err(Error::Config(format!("{what}: corners need {dim} coordinates")));
    }
    Window::new(dim, &corners[0], &corners[1]).map_err(|e| Error::Config(format!("{what}: {e}")))
}

impl PdeConfig {
    pub fn q_window(&self) -> Result<Window> {
        window_from(&[self.q[0].to_vec(), self.q[1].to_vec()], 2, "pde.q")
    }

    pub fn params(&self) -> Result<PdeParams> {
        let q = self.q_window()?;
        let (lo, hi) = (q.lo, q.hi);
        let u0: Arc<dyn Fn(&[f64; 2]) -> f64 + Send + Sync> = match self.u0 {
            FieldTag::Constant { value } => Arc::new(move |_| value),
            FieldTag::CosineProduct { offset, amplitude } => Arc::new(move |x| {
                let s = [(x[0] - lo[0]) / (hi[0] - lo[0]), (x[1] - lo[1]) / (hi[1] - lo[1])];
                offset + amplitude * (PI * s[0]).cos() * (PI * s[1]).cos()
            }),
            FieldTag::CosineX { offset, amplitude } => {
                Arc::new(move |x| offset + amplitude * (PI * (x[0] - lo[0]) / (hi[0] - lo[0])).cos())
            }
        };
        let mut p = PdeParams::heat(q, self.t_final, u0);
        p.f = match self.f {
            SourceTag::Zero => Arc::new(|_, _| 0.0),
            SourceTag::Constant { value } => Arc::new(move |_, _| value),
            SourceTag::DecayingCosine => Arc::new(|t, x| (PI * PI - 1.0) * (-t).exp() * (PI * x[0]).cos()),
        };
        match self.a {
            DiffusionTag::Constant { value } => {
                p.a = Arc::new(move |_| value);
                p.a_bounds = (value, value);
            }
            DiffusionTag::Rational { base, amplitude } => {
                p.a = Arc::new(move |u| base + amplitude / (1.0 + u * u));
                p.a_bounds = (base.min(base + amplitude), base.max(base + amplitude));
            }
        }
        match self.h {
            ReactionTag::Zero => {}
            ReactionTag::Constant { value } => p.h = Arc::new(move |_| value),
            ReactionTag::Linear { offset, rate } => {
                p.h = Arc::new(move |u| offset - rate * u);
                p.h_lipschitz = rate.abs();
            }
        }
        p.validate().map_err(|e| Error::Config(format!("pde: {e}")))?;
        Ok(p)
    }
}

impl ScenarioConfig {
    /// Parses and validates; unknown keys and other versions are rejected.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::json("config", e))?;
        match value.get("version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == CONFIG_VERSION as u64 => {}
            Some(v) => return Err(Error::Config(format!("version {v} is not supported (expected {CONFIG_VERSION})"))),
            None => return Err(Error::Config("missing integer `version`".into())),
        }
        let cfg: ScenarioConfig = serde_json::from_value(value).map_err(|e| Error::json("config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialization; its hash identifies the inputs.
    pub fn canonical_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.studies.is_empty() {
            return Err(Error::Config("no studies selected".into()));
        }
        let out = std::path::Path::new(&self.output_dir);
        if out.is_absolute() || out.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
            return Err(Error::Config("output_dir must be a relative path below the output root".into()));
        }
        self.process_params()?;
        self.sampling_window()?;
        self.geometry_params()?;
        for &n in &self.thinning.levels {
            level(n)?;
        }
        if self.needs(StudyKind::Percolate) || self.needs(StudyKind::Conductivity) {
            self.k_scale()?;
        }
        if self.needs(StudyKind::Stats) {
            window_from(&self.stats.window, self.process.dim, "stats.window")?;
            for &n in &self.stats.levels {
                level(n)?;
            }
        }
        if self.needs(StudyKind::Pde) {
            if self.process.dim != 2 {
                return Err(Error::Config("the pde study is planar".into()));
            }
            self.pde.params()?;
            level(self.pde.level)?;
            if self.pde.eps.is_empty() || self.pde.eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
                return Err(Error::Config("pde.eps must be a nonempty list in (0, 1]".into()));
            }
            if !(self.pde.dt > 0.0) || self.pde.cells_per_unit == 0 {
                return Err(Error::Config("pde.dt and pde.cells_per_unit must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn needs(&self, kind: StudyKind) -> bool {
        self.studies.contains(&kind)
    }

    pub fn process_params(&self) -> Result<ProcessParams> {
        ProcessParams::new(self.process.intensity, self.seed, self.process.dim)
            .map_err(|e| Error::Config(format!("process: {e}")))
    }

    pub fn sampling_window(&self) -> Result<Window> {
        window_from(&self.process.window, self.process.dim, "process.window")
    }

    pub fn geometry_params(&self) -> Result<GeometryParams> {
        GeometryParams::new(self.geometry.r).map_err(|e| Error::Config(format!("geometry: {e}")))
    }

    pub fn k_scale(&self) -> Result<usize> {
        match (self.lattice.k_scale, self.geometry.r_c) {
            (Some(k), _) if k >= 1 => Ok(k),
            (Some(_), _) => Err(Error::Config("lattice.k_scale must be at least 1".into())),
            (None, Some(r_c)) => LatticeParams::default_k_scale(self.process.dim, self.geometry.r, r_c)
                .map_err(|e| Error::Config(format!("geometry.r_c: {e}"))),
            (None, None) => Err(Error::Config("set lattice.k_scale or geometry.r_c".into())),
        }
    }
}

pub(crate) fn level(n: usize) -> Result<ThinningLevel> {
    ThinningLevel::new(n).map_err(|e| Error::Config(format!("thinning level: {e}")))
}
