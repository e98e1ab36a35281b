//! Scenario files: the measure, the kernel, the task and where reports go.
//!
//! Scenarios are JSON. Unknown fields are rejected so that a typo fails
//! loudly instead of silently falling back to a default.

use std::path::Path;
use std::sync::Arc;

use ntlim_core::diagnostics::{ScaleLadder, Thresholds};
use ntlim_core::kernel::{KernelProfile, ProfileShape};
use ntlim_core::measure::{Atom, CdfShape, Component, DensityShape, Measure};
use ntlim_core::{Complex64, Dim, Point};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A real weight `1.5` or a complex one `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Real(f64),
    Complex([f64; 2]),
}

impl Default for Weight {
    fn default() -> Self {
        Weight::Real(1.0)
    }
}

impl Weight {
    pub fn value(self) -> Complex64 {
        match self {
            Weight::Real(re) => Complex64::new(re, 0.0),
            Weight::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    fn is_one(&self) -> bool {
        *self == Weight::Real(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Constant,
    IndicatorBox,
    HalfSpace,
    GaussianBump,
    SineWave,
    PowerNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfKind {
    Cantor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub at: Vec<f64>,
    pub mass: Weight,
}

/// One component; which optional fields a density needs depends on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Density {
        kind: DensityKind,
        #[serde(default, skip_serializing_if = "Weight::is_one")]
        weight: Weight,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axis: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frequency: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
    },
    Atomic {
        points: Vec<AtomSpec>,
    },
    SingularCdf {
        kind: CdfKind,
        #[serde(default, skip_serializing_if = "Weight::is_one")]
        weight: Weight,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub dimension: usize,
    pub components: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Poisson,
    Gauss,
    SplitExp,
    Uniform,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Defaults to the measure's dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// `[r, phi(r)]` nodes, for `kind = "table"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub x: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub xi: Vec<f64>,
    pub eta: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    KernelCheck {
        /// Number of levels `s` sampled for `theta(s)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        levels: Option<usize>,
    },
    Convolve {
        points: Vec<ProbeSpec>,
    },
    Classify {
        point: Vec<f64>,
    },
    ConeProbe {
        point: Vec<f64>,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        aperture: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<usize>,
    },
    RayFan {
        point: Vec<f64>,
        rays: Vec<RaySpec>,
    },
    ParabolicProbe {
        point: Vec<f64>,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        aperture: f64,
    },
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::KernelCheck { .. } => "kernel-check",
            TaskSpec::Convolve { .. } => "convolve",
            TaskSpec::Classify { .. } => "classify",
            TaskSpec::ConeProbe { .. } => "cone-probe",
            TaskSpec::RayFan { .. } => "ray-fan",
            TaskSpec::ParabolicProbe { .. } => "parabolic-probe",
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            TaskSpec::Classify { point }
            | TaskSpec::ConeProbe { point, .. }
            | TaskSpec::RayFan { point, .. }
            | TaskSpec::ParabolicProbe { point, .. } => Some(point),
            TaskSpec::KernelCheck { .. } | TaskSpec::Convolve { .. } => None,
        }
    }
}

/// Overrides of the default ladder `1, 1/2, ..., 2^-20`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv, Format::Svg]
}

fn is_all_formats(f: &[Format]) -> bool {
    f == all_formats()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Falls back to `$NTLIM_OUT_DIR`, then `ntlim-out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default = "all_formats", skip_serializing_if = "is_all_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            formats: all_formats(),
        }
    }
}

impl OutputSpec {
    fn is_default(&self) -> bool {
        *self == OutputSpec::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    pub task: TaskSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<LadderSpec>,
    /// Limit agreement for detectors and probes; absolute quadrature
    /// tolerance for `convolve`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "OutputSpec::is_default")]
    pub outputs: OutputSpec,
}

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NTLIM_OUT_DIR";

/// Default quadrature tolerance of `convolve`.
pub const CONVOLVE_TOL: f64 = 1e-10;

impl Scenario {
    /// Parses JSON, reporting the failing field path and line.
    pub fn parse(text: &str, origin: &str) -> Result<Scenario, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse {
                origin: origin.to_string(),
                line: inner.line(),
                column: inner.column(),
                field,
                message: strip_position(&inner.to_string()),
            }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::parse(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios always serialize")
    }

    /// Checks that references resolve and parameters are in range.
    pub fn validate(&self) -> Result<(), CliError> {
        let measure = self.measure().transpose()?;
        let kernel = self.kernel_profile(measure.as_ref().map(Measure::dim)).transpose()?;
        if let (Some(m), Some(k)) = (&measure, &kernel) {
            if m.dim() != k.dim() {
                return Err(invalid(
                    "kernel.dimension",
                    format!("kernel has n = {}, measure has n = {}", k.dim().n(), m.dim().n()),
                ));
            }
        }
        self.ladder()?;
        self.thresholds()?;
        let dim = measure.as_ref().map(Measure::dim).or(kernel.as_ref().map(KernelProfile::dim));
        let needs_measure = !matches!(self.task, TaskSpec::KernelCheck { .. });
        let needs_kernel = matches!(
            self.task,
            TaskSpec::KernelCheck { .. } | TaskSpec::Convolve { .. } | TaskSpec::ConeProbe { .. } | TaskSpec::RayFan { .. }
        );
        if needs_measure && measure.is_none() {
            return Err(invalid("measure", format!("task {} needs a measure", self.task.name())));
        }
        if needs_kernel && kernel.is_none() {
            return Err(invalid("kernel", format!("task {} needs a kernel", self.task.name())));
        }
        let Some(dim) = dim else {
            return Ok(());
        };
        if let Some(p) = self.task.point() {
            point(p, dim, "task.point")?;
        }
        match &self.task {
            TaskSpec::Convolve { points } => {
                for (i, p) in points.iter().enumerate() {
                    point(&p.x, dim, &format!("task.points[{i}].x"))?;
                    if !(p.t > 0.0 && p.t.is_finite()) {
                        return Err(invalid(format!("task.points[{i}].t"), format!("t must be positive, got {}", p.t)));
                    }
                }
            }
            TaskSpec::ConeProbe { aperture, paths, .. } => {
                positive(*aperture, "task.aperture")?;
                if paths.is_some_and(|d| d < 3) {
                    return Err(invalid("task.paths", "need at least 3 paths"));
                }
            }
            TaskSpec::ParabolicProbe { aperture, .. } => positive(*aperture, "task.aperture")?,
            TaskSpec::RayFan { rays, .. } => {
                if rays.len() < 2 {
                    return Err(invalid("task.rays", "a fan needs at least two rays"));
                }
                for (i, r) in rays.iter().enumerate() {
                    point(&r.xi, dim, &format!("task.rays[{i}].xi"))?;
                    positive(r.eta, &format!("task.rays[{i}].eta"))?;
                }
            }
            TaskSpec::KernelCheck { levels } => {
                if levels.is_some_and(|l| l == 0) {
                    return Err(invalid("task.levels", "need at least one level"));
                }
            }
            TaskSpec::Classify { .. } => {}
        }
        Ok(())
    }

    pub fn measure(&self) -> Option<Result<Measure, CliError>> {
        self.measure.as_ref().map(build_measure)
    }

    pub fn kernel_profile(&self, measure_dim: Option<Dim>) -> Option<Result<KernelProfile, CliError>> {
        self.kernel.as_ref().map(|k| build_kernel(k, measure_dim))
    }

    pub fn ladder(&self) -> Result<ScaleLadder, CliError> {
        let d = ScaleLadder::default();
        let o = self.ladder.unwrap_or_default();
        ScaleLadder::new(o.delta0.unwrap_or(d.delta0), o.ratio.unwrap_or(d.ratio), o.depth.unwrap_or(d.depth))
            .map_err(|e| invalid("ladder", e.to_string()))
    }

    pub fn thresholds(&self) -> Result<Thresholds, CliError> {
        let mut th = Thresholds::default();
        if let Some(tol) = self.tol {
            positive(tol, "tol")?;
            if !matches!(self.task, TaskSpec::Convolve { .. }) {
                th.limit = tol;
            }
        }
        Ok(th)
    }

    /// Quadrature tolerance of `convolve`.
    pub fn convolve_tol(&self) -> f64 {
        self.tol.unwrap_or(CONVOLVE_TOL)
    }

    pub fn output_dir(&self) -> String {
        self.outputs
            .dir
            .clone()
            .or_else(|| std::env::var(OUT_DIR_ENV).ok().filter(|d| !d.is_empty()))
            .unwrap_or_else(|| "ntlim-out".to_string())
    }
}

/// serde_json appends " at line L column C"; we report those separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

fn positive(x: f64, field: &str) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {x}")))
    }
}

fn dimension(n: usize, field: &str) -> Result<Dim, CliError> {
    Dim::from_n(n).map_err(|_| invalid(field, format!("dimension must be 1 or 2, got {n}")))
}

pub(crate) fn point(coords: &[f64], dim: Dim, field: &str) -> Result<Point, CliError> {
    if coords.len() != dim.n() {
        return Err(invalid(field, format!("expected {} coordinates, got {}", dim.n(), coords.len())));
    }
    let p = Point::in_dim(coords, dim).map_err(|e| invalid(field, e.to_string()))?;
    if !p.is_finite() {
        return Err(invalid(field, "coordinates must be finite"));
    }
    Ok(p)
}

fn require<T: Copy>(v: Option<T>, field: String, kind: DensityKind) -> Result<T, CliError> {
    v.ok_or_else(|| invalid(field, format!("required for {kind:?} densities")))
}

fn build_measure(spec: &MeasureSpec) -> Result<Measure, CliError> {
    let dim = dimension(spec.dimension, "measure.dimension")?;
    let mut mu = Measure::zero(dim);
    for (i, c) in spec.components.iter().enumerate() {
        let at = |name: &str| format!("measure.components[{i}].{name}");
        let component = match c {
            ComponentSpec::Density {
                kind,
                weight,
                lo,
                hi,
                axis,
                at: cut,
                center,
                width,
                frequency,
                phase,
                exponent,
            } => {
                let kind = *kind;
                let pt = |v: &Option<Vec<f64>>, name: &str| match v {
                    Some(v) => point(v, dim, &at(name)),
                    None => Err(invalid(at(name), format!("required for {kind:?} densities"))),
                };
                let shape = match kind {
                    DensityKind::Constant => DensityShape::Constant,
                    DensityKind::IndicatorBox => DensityShape::IndicatorBox {
                        lo: pt(lo, "lo")?,
                        hi: pt(hi, "hi")?,
                    },
                    DensityKind::HalfSpace => DensityShape::HalfSpace {
                        axis: require(*axis, at("axis"), kind)?,
                        at: require(*cut, at("at"), kind)?,
                    },
                    DensityKind::GaussianBump => DensityShape::GaussianBump {
                        center: pt(center, "center")?,
                        width: require(*width, at("width"), kind)?,
                    },
                    DensityKind::SineWave => DensityShape::SineWave {
                        frequency: require(*frequency, at("frequency"), kind)?,
                        phase: phase.unwrap_or(0.0),
                    },
                    DensityKind::PowerNorm => DensityShape::PowerNorm {
                        center: center.as_ref().map_or(Ok(Point::ORIGIN), |c| point(c, dim, &at("center")))?,
                        exponent: require(*exponent, at("exponent"), kind)?,
                    },
                };
                Component::density(weight.value(), shape)
            }
            ComponentSpec::Atomic { points } => {
                let atoms = points
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        Ok(Atom {
                            at: point(&a.at, dim, &at(&format!("points[{j}].at")))?,
                            mass: a.mass.value(),
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Component::atoms(atoms)
            }
            ComponentSpec::SingularCdf { kind: CdfKind::Cantor, weight } => {
                Component::singular(weight.value(), CdfShape::Cantor)
            }
        };
        mu.push(component).map_err(|e| invalid(format!("measure.components[{i}]"), e.to_string()))?;
    }
    Ok(mu)
}

fn build_kernel(spec: &KernelSpec, measure_dim: Option<Dim>) -> Result<KernelProfile, CliError> {
    let dim = match (spec.dimension, measure_dim) {
        (Some(n), _) => dimension(n, "kernel.dimension")?,
        (None, Some(d)) => d,
        (None, None) => return Err(invalid("kernel.dimension", "required when there is no measure")),
    };
    if spec.table.is_some() != (spec.kind == KernelKind::Table) {
        return Err(invalid("kernel.table", "nodes are given exactly when kind = \"table\""));
    }
    let k = match spec.kind {
        KernelKind::Poisson => KernelProfile::poisson(dim),
        KernelKind::Gauss => KernelProfile::gauss(dim),
        KernelKind::SplitExp => KernelProfile::split_exp(dim),
        KernelKind::Uniform => KernelProfile::uniform(dim),
        KernelKind::Table => {
            let nodes = spec.table.iter().flatten().map(|&[r, v]| (r, v)).collect();
            KernelProfile::new(dim, ProfileShape::Table(Arc::new(nodes))).map_err(|e| invalid("kernel.table", e.to_string()))?
        }
    };
    if spec.normalize {
        k.normalized().map_err(|e| invalid("kernel.normalize", e.to_string()))
    } else {
        Ok(k)
    }
}
