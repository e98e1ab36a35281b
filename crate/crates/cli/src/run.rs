//! Executes a scenario and collects the results into a [`ReportBundle`].

use std::path::Path;
use std::time::{Duration, Instant};

use ntlim_core::convolution::convolve_with;
use ntlim_core::diagnostics::{classify_point, default_ratio_grid, ClassificationReport, LimitKind, ScaleLadder, Thresholds, Verdict};
use ntlim_core::kernel::{ComparisonReport, DecayReport, KernelProfile, LayerCakeRoute, LevelRadius};
use ntlim_core::probe::{
    convolution_evaluator, default_path_count, heat_evaluator, nontangential_limit, parabolic_limit,
    ray_fan, Cone, ConvergenceStatus, ConvergenceVerdict, ParabolicReport, RayFan, PROBE_TOL,
};
use ntlim_core::{Complex64, Dim, Estimate, Point, Tolerance};

use crate::config::{invalid, point, ProbeSpec, RaySpec, Scenario, TaskSpec};
use crate::error::CliError;

/// Default number of levels in a kernel check.
pub const DEFAULT_LEVELS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    pub s: f64,
    pub radius: Result<LevelRadius, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck {
    pub l1: Result<Estimate<f64>, String>,
    pub layer_cake: Result<(Estimate<f64>, LayerCakeRoute), String>,
    pub decay: DecayReport,
    pub comparison: Result<ComparisonReport, String>,
    pub levels: Vec<LevelRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolveRow {
    pub x: Point,
    pub t: f64,
    pub value: Estimate<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskResult {
    KernelCheck(KernelCheck),
    Convolve(Vec<ConvolveRow>),
    Classify(Box<ClassificationReport>),
    ConeProbe(ConvergenceVerdict),
    RayFan(RayFan),
    ParabolicProbe(ParabolicReport),
}

/// How a run ended; maps to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    Definitive,
    Inconclusive,
}

impl Completion {
    pub fn exit_code(self) -> u8 {
        match self {
            Completion::Definitive => 0,
            Completion::Inconclusive => 2,
        }
    }
}

/// What the run used, for the report's provenance block.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub dim: Option<Dim>,
    pub ladder: ScaleLadder,
    pub thresholds: Thresholds,
    pub quadrature: Tolerance,
    pub paths: Option<usize>,
    pub containment_samples: Option<usize>,
    pub ratio_grid: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub scenario: Scenario,
    pub result: TaskResult,
    pub provenance: Provenance,
    /// Kept out of the JSON report so identical runs give identical bytes.
    pub elapsed: Duration,
}

impl ReportBundle {
    pub fn completion(&self) -> Completion {
        let inconclusive = match &self.result {
            TaskResult::KernelCheck(k) => {
                k.l1.is_err() || k.layer_cake.is_err() || k.comparison.is_err() || k.levels.iter().any(|l| l.radius.is_err())
            }
            TaskResult::Convolve(_) => false,
            TaskResult::Classify(r) => {
                r.symmetric.kind == LimitKind::Inconclusive
                    || [r.lebesgue.verdict, r.sigma.verdict, r.strong.verdict].contains(&Verdict::Inconclusive)
            }
            TaskResult::ConeProbe(v) => v.status == ConvergenceStatus::Inconclusive,
            TaskResult::RayFan(f) => f.rays.iter().any(|r| r.status == ConvergenceStatus::Inconclusive),
            TaskResult::ParabolicProbe(p) => p.verdict.status == ConvergenceStatus::Inconclusive || !p.containment.holds(),
        };
        if inconclusive {
            Completion::Inconclusive
        } else {
            Completion::Definitive
        }
    }
}

/// Flag overrides of the command-line shortcuts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Switches the task, keeping measure and kernel.
    pub task: Option<String>,
    pub point: Option<Vec<f64>>,
    pub aperture: Option<f64>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<String>,
}

fn default_rays(n: usize) -> Vec<RaySpec> {
    [1.0, 0.0, -1.0]
        .into_iter()
        .map(|x| {
            let mut xi = vec![0.0; n];
            xi[0] = x;
            RaySpec { xi, eta: 1.0 }
        })
        .collect()
}

impl Scenario {
    /// Applies command-line overrides and revalidates.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(depth) = o.depth {
            self.ladder.get_or_insert_with(Default::default).depth = Some(depth);
        }
        if o.tol.is_some() {
            self.tol = o.tol;
        }
        if o.out_dir.is_some() {
            self.outputs.dir = o.out_dir.clone();
        }
        let n = self.measure.as_ref().map(|m| m.dimension).unwrap_or(1);
        if let Some(name) = &o.task {
            if name != self.task.name() {
                let at = o.point.clone().or_else(|| self.task.point().map(<[f64]>::to_vec));
                let at = || at.clone().ok_or_else(|| invalid("--point", format!("task {name} needs a point")));
                self.task = match name.as_str() {
                    "kernel-check" => TaskSpec::KernelCheck { levels: None },
                    "convolve" => {
                        let x = at()?;
                        TaskSpec::Convolve {
                        points: self.ladder()?.scales().into_iter().map(|t| ProbeSpec { x: x.clone(), t }).collect(),
                    }
                    }
                    "classify" => TaskSpec::Classify { point: at()? },
                    "cone-probe" => TaskSpec::ConeProbe {
                        point: at()?,
                        aperture: 1.0,
                        paths: None,
                    },
                    "ray-fan" => TaskSpec::RayFan {
                        point: at()?,
                        rays: default_rays(n),
                    },
                    "parabolic-probe" => TaskSpec::ParabolicProbe { point: at()?, aperture: 1.0 },
                    other => return Err(invalid("task", format!("unknown task {other}"))),
                };
            }
        }
        match &mut self.task {
            TaskSpec::Classify { point }
            | TaskSpec::ConeProbe { point, .. }
            | TaskSpec::RayFan { point, .. }
            | TaskSpec::ParabolicProbe { point, .. } => {
                if let Some(p) = &o.point {
                    *point = p.clone();
                }
            }
            TaskSpec::Convolve { points } => {
                if let Some(p) = &o.point {
                    for q in points {
                        q.x = p.clone();
                    }
                }
            }
            TaskSpec::KernelCheck { .. } => {}
        }
        if let Some(a) = o.aperture {
            match &mut self.task {
                TaskSpec::ConeProbe { aperture, .. } | TaskSpec::ParabolicProbe { aperture, .. } => *aperture = a,
                _ => return Err(invalid("--aperture", format!("task {} has no aperture", self.task.name()))),
            }
        }
        self.validate()
    }
}

fn label(p: Point, dim: Dim) -> String {
    match dim {
        Dim::One => format!("x = {}", p.x()),
        Dim::Two => format!("x = ({}, {})", p.x(), p.y()),
    }
}

fn kernel_check(k: &KernelProfile, levels: usize) -> KernelCheck {
    let peak = k.peak();
    let levels = (0..levels)
        .map(|j| {
            let s = if peak.is_finite() {
                peak * (j as f64 + 0.5) / levels as f64
            } else {
                10f64.powi(j as i32 - (levels / 2) as i32)
            };
            LevelRow {
                s,
                radius: k.level_radius(s).map_err(|e| e.to_string()),
            }
        })
        .collect();
    KernelCheck {
        l1: k.l1_norm().map_err(|e| e.to_string()),
        layer_cake: k.layer_cake().map_err(|e| e.to_string()),
        decay: k.decay_check(),
        comparison: k.comparison_constant().map_err(|e| e.to_string()),
        levels,
    }
}

/// Runs the scenario's task.
pub fn run(scenario: &Scenario) -> Result<ReportBundle, CliError> {
    scenario.validate()?;
    let started = Instant::now();
    let ladder = scenario.ladder()?;
    let th = scenario.thresholds()?;
    let measure = scenario.measure().transpose()?;
    let kernel = scenario.kernel_profile(measure.as_ref().map(|m| m.dim())).transpose()?;
    let dim = measure.as_ref().map(|m| m.dim()).or(kernel.as_ref().map(|k| k.dim()));
    let mut provenance = Provenance {
        dim,
        ladder,
        thresholds: th,
        quadrature: PROBE_TOL,
        paths: None,
        containment_samples: None,
        ratio_grid: None,
    };
    let at = |coords: &[f64]| point(coords, dim.expect("validated"), "task.point");
    let result = match &scenario.task {
        TaskSpec::KernelCheck { levels } => {
            let k = kernel.as_ref().expect("validated");
            TaskResult::KernelCheck(kernel_check(k, levels.unwrap_or(DEFAULT_LEVELS)))
        }
        TaskSpec::Convolve { points } => {
            let (mu, k) = (measure.as_ref().expect("validated"), kernel.as_ref().expect("validated"));
            let tol = Tolerance {
                abs: scenario.convolve_tol(),
                rel: 1e-12,
            };
            provenance.quadrature = tol;
            let mut rows = Vec::with_capacity(points.len());
            for p in points {
                let x = at(&p.x)?;
                let value = convolve_with(mu, k, x, p.t, tol)
                    .map_err(|e| CliError::engine(format!("{}, t = {}", label(x, mu.dim()), p.t), e))?;
                rows.push(ConvolveRow { x, t: p.t, value });
            }
            TaskResult::Convolve(rows)
        }
        TaskSpec::Classify { point } => {
            let mu = measure.as_ref().expect("validated");
            let x0 = at(point)?;
            provenance.ratio_grid = Some(default_ratio_grid().len());
            let report = classify_point(mu, x0, &ladder, &th).map_err(|e| CliError::engine(label(x0, mu.dim()), e))?;
            TaskResult::Classify(Box::new(report))
        }
        TaskSpec::ConeProbe { point, aperture, paths } => {
            let (mu, k) = (measure.as_ref().expect("validated"), kernel.as_ref().expect("validated"));
            let x0 = at(point)?;
            let d = paths.unwrap_or(default_path_count(mu.dim()));
            provenance.paths = Some(d);
            let cone = Cone::new(x0, *aperture).map_err(|e| invalid("task.aperture", e.to_string()))?;
            let v = nontangential_limit(&convolution_evaluator(mu, k), &cone, mu.dim(), &ladder, &th, d)
                .map_err(|e| CliError::engine(label(x0, mu.dim()), e))?;
            TaskResult::ConeProbe(v)
        }
        TaskSpec::RayFan { point, rays } => {
            let (mu, k) = (measure.as_ref().expect("validated"), kernel.as_ref().expect("validated"));
            let x0 = at(point)?;
            let rays = rays
                .iter()
                .enumerate()
                .map(|(i, r)| Ok((crate::config::point(&r.xi, mu.dim(), &format!("task.rays[{i}].xi"))?, r.eta)))
                .collect::<Result<Vec<_>, CliError>>()?;
            provenance.paths = Some(rays.len());
            let fan = ray_fan(&convolution_evaluator(mu, k), x0, &rays, &ladder, &th)
                .map_err(|e| CliError::engine(label(x0, mu.dim()), e))?;
            TaskResult::RayFan(fan)
        }
        TaskSpec::ParabolicProbe { point, aperture } => {
            let mu = measure.as_ref().expect("validated");
            let x0 = at(point)?;
            provenance.paths = Some(default_path_count(mu.dim()));
            let report = parabolic_limit(&heat_evaluator(mu), x0, mu.dim(), *aperture, &ladder, &th)
                .map_err(|e| CliError::engine(label(x0, mu.dim()), e))?;
            provenance.containment_samples = Some(report.containment.checked);
            TaskResult::ParabolicProbe(report)
        }
    };
    Ok(ReportBundle {
        scenario: scenario.clone(),
        result,
        provenance,
        elapsed: started.elapsed(),
    })
}

/// Loads, validates and runs a scenario file.
pub fn run_scenario(path: &Path) -> Result<ReportBundle, CliError> {
    run(&Scenario::load(path)?)
}
