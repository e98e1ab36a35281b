//! Turns a [`ReportBundle`] into a JSON record, CSV tables and an SVG plot.

use std::fs;
use std::path::{Path, PathBuf};

use ntlim_core::diagnostics::{LadderLimit, LimitKind, PointTest, ScaleRow, Verdict};
use ntlim_core::kernel::{LayerCakeRoute, LevelBall};
use ntlim_core::probe::{ConvergenceStatus, ConvergenceVerdict, PathKind, PathLimit};
use ntlim_core::{Complex64, Dim, Point};
use serde_json::{json, Map, Value};

use crate::canonical::{self, num};
use crate::config::Format;
use crate::error::CliError;
use crate::plot::{self, Figure, Series};
use crate::run::{Completion, ReportBundle, TaskResult};

/// A CSV table, written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&str]) -> Table {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn f(x: f64) -> String {
    if x.is_finite() {
        canonical::float(x)
    } else {
        num(x).as_str().expect("tag").to_string()
    }
}

fn complex(z: Complex64) -> Value {
    json!({"re": num(z.re), "im": num(z.im)})
}

fn opt_complex(z: Option<Complex64>) -> Value {
    z.map_or(Value::Null, complex)
}

fn coords(p: Point, dim: Option<Dim>) -> Value {
    let dim = dim.unwrap_or(Dim::One);
    Value::Array(p.coords(dim).iter().map(|&c| num(c)).collect())
}

fn kind(k: LimitKind) -> &'static str {
    match k {
        LimitKind::Exists => "exists",
        LimitKind::Infinite => "infinite",
        LimitKind::NoLimit => "no_limit",
        LimitKind::Inconclusive => "inconclusive",
    }
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn status(s: ConvergenceStatus) -> &'static str {
    match s {
        ConvergenceStatus::Converges => "converges",
        ConvergenceStatus::Diverges => "diverges",
        ConvergenceStatus::PathDependent => "path_dependent",
        ConvergenceStatus::Inconclusive => "inconclusive",
    }
}

fn rows_json(rows: &[ScaleRow], scale: &str) -> Value {
    rows.iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert(scale.into(), num(r.delta));
            m.insert("value".into(), complex(r.value));
            m.insert("error".into(), num(r.error));
            Value::Object(m)
        })
        .collect()
}

fn with_note(mut v: Value, note: &Option<String>) -> Value {
    if let Some(n) = note {
        v["note"] = Value::String(n.clone());
    }
    v
}

fn ladder_json(l: &LadderLimit, scale: &str) -> Value {
    with_note(
        json!({
            "kind": kind(l.kind),
            "limit": opt_complex(l.limit),
            "error": num(l.error),
            "rows": rows_json(&l.rows, scale),
        }),
        &l.note,
    )
}

fn point_test_json(p: &PointTest) -> Value {
    with_note(
        json!({
            "verdict": verdict(p.verdict),
            "limit": opt_complex(p.limit),
            "lower_bound": p.lower_bound.map_or(Value::Null, num),
            "rows": rows_json(&p.rows, "delta"),
        }),
        &p.note,
    )
}

fn direction(u: Point, dim: Option<Dim>) -> Value {
    coords(u, dim)
}

fn path_kind_json(k: &PathKind, dim: Option<Dim>) -> Value {
    match *k {
        PathKind::ConeSweep { aperture, beta, direction: u } => {
            json!({"type": "cone", "aperture": num(aperture), "beta": num(beta), "direction": direction(u, dim)})
        }
        PathKind::Ray { xi, eta } => json!({"type": "ray", "xi": coords(xi, dim), "eta": num(eta)}),
        PathKind::Parabolic { alpha, beta, direction: u } => {
            json!({"type": "parabolic", "alpha": num(alpha), "beta": num(beta), "direction": direction(u, dim)})
        }
    }
}

fn path_json(p: &PathLimit, dim: Option<Dim>) -> Value {
    let d = dim.unwrap_or(Dim::One);
    let rows: Vec<Value> = p
        .limit
        .rows
        .iter()
        .zip(&p.path.points)
        .map(|(r, q)| json!({"t": num(r.delta), "x": coords(q.x, dim), "value": complex(r.value), "error": num(r.error)}))
        .collect();
    with_note(
        json!({
            "label": p.path.label(d),
            "path": path_kind_json(&p.path.kind, dim),
            "kind": kind(p.limit.kind),
            "limit": opt_complex(p.limit.limit),
            "error": num(p.limit.error),
            "rows": rows,
        }),
        &p.limit.note,
    )
}

fn verdict_json(v: &ConvergenceVerdict, dim: Option<Dim>) -> Value {
    json!({
        "status": status(v.status),
        "limit": opt_complex(v.limit),
        "error": num(v.error),
        "oscillation": {"value": num(v.oscillation), "error": num(v.error)},
        "paths": v.paths.iter().map(|p| path_json(p, dim)).collect::<Vec<_>>(),
    })
}

fn ball(b: LevelBall) -> &'static str {
    match b {
        LevelBall::Open => "open",
        LevelBall::Closed => "closed",
        LevelBall::Ambiguous => "ambiguous",
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn failed(e: &str) -> Value {
    json!({"verdict": "error", "message": e})
}

fn result_json(bundle: &ReportBundle) -> Value {
    let dim = bundle.provenance.dim;
    match &bundle.result {
        TaskResult::KernelCheck(k) => {
            let l1 = match &k.l1 {
                Ok(e) => json!({
                    "value": num(e.value),
                    "error": num(e.error),
                    "verdict": if (e.value - 1.0).abs() <= 1e-8 { "normalized" } else { "not_normalized" },
                }),
                Err(e) => failed(e),
            };
            let cake = match (&k.layer_cake, &k.l1) {
                (Ok((c, route)), Ok(l)) => json!({
                    "value": num(c.value),
                    "error": num(c.error),
                    "route": match route { LayerCakeRoute::LevelSets => "level_sets", LayerCakeRoute::Radial => "radial" },
                    "verdict": pass((c.value - l.value).abs() <= 1e-6),
                }),
                (Err(e), _) | (_, Err(e)) => failed(e),
            };
            let comparison = match &k.comparison {
                Ok(c) => json!({
                    "sup": num(c.sup),
                    "refined_sup": num(c.refined_sup),
                    "argmax": {"t": num(c.argmax.0), "x": num(c.argmax.1)},
                    "verdict": if c.divergent { "divergent" } else { "finite" },
                }),
                Err(e) => failed(e),
            };
            let levels: Vec<Value> = k
                .levels
                .iter()
                .map(|l| match &l.radius {
                    Ok(r) => json!({"s": num(l.s), "radius": num(r.radius), "verdict": ball(r.ball)}),
                    Err(e) => json!({"s": num(l.s), "verdict": "error", "message": e}),
                })
                .collect();
            json!({
                "l1_norm": l1,
                "layer_cake": cake,
                "comparison": comparison,
                "decay": {
                    "limit_at_zero": num(k.decay.limit_at_zero),
                    "limit_at_infinity": num(k.decay.limit_at_infinity),
                    "verdict": pass(k.decay.pass),
                },
                "level_radius": levels,
            })
        }
        TaskResult::Convolve(rows) => Value::Array(
            rows.iter()
                .map(|r| json!({"x": coords(r.x, dim), "t": num(r.t), "value": complex(r.value.value), "error": num(r.value.error)}))
                .collect(),
        ),
        TaskResult::Classify(r) => {
            let strong = &r.strong;
            json!({
                "symmetric": ladder_json(&r.symmetric, "delta"),
                "lebesgue": point_test_json(&r.lebesgue),
                "sigma": point_test_json(&r.sigma),
                "strong": {
                    "verdict": verdict(strong.verdict),
                    "limit": opt_complex(strong.limit),
                    "witnesses": strong.witnesses,
                    "prototypes": strong.prototypes.iter().map(|(p, l)| json!({
                        "center": coords(p.center, dim),
                        "radius": num(p.radius),
                        "ratio": ladder_json(l, "delta"),
                    })).collect::<Vec<_>>(),
                },
                "maximal": {
                    "verdict": if r.maximal.unbounded { "unbounded" } else { "bounded" },
                    "value": num(r.maximal.value),
                    "argmax": num(r.maximal.argmax),
                    "rows": rows_json(&r.maximal.rows, "r"),
                },
            })
        }
        TaskResult::ConeProbe(v) => verdict_json(v, dim),
        TaskResult::RayFan(fan) => json!({
            "ray_dependent": fan.ray_dependent,
            "verdict": if fan.ray_dependent { "ray_dependent" } else if fan.all_converge() { "rays_agree" } else { "inconclusive" },
            "rays": fan.rays.iter().map(|v| verdict_json(v, dim)).collect::<Vec<_>>(),
        }),
        TaskResult::ParabolicProbe(p) => json!({
            "verdict": verdict_json(&p.verdict, dim),
            "containment": {
                "checked": p.containment.checked,
                "passed": p.containment.passed,
                "verdict": pass(p.containment.holds()),
            },
        }),
    }
}

fn provenance_json(bundle: &ReportBundle) -> Value {
    let p = &bundle.provenance;
    let mut grids = Map::new();
    grids.insert("ladder_scales".into(), json!(p.ladder.depth + 1));
    if let Some(d) = p.paths {
        grids.insert("paths".into(), json!(d));
    }
    if let Some(c) = p.containment_samples {
        grids.insert("containment_samples".into(), json!(c));
    }
    if let Some(r) = p.ratio_grid {
        grids.insert("ratio_grid".into(), json!(r));
    }
    json!({
        "tool": "ntlim",
        "version": env!("CARGO_PKG_VERSION"),
        "dimension": p.dim.map(|d| d.n()),
        "ladder": {"delta0": num(p.ladder.delta0), "ratio": num(p.ladder.ratio), "depth": p.ladder.depth},
        "thresholds": {"limit": num(p.thresholds.limit), "vanish": num(p.thresholds.vanish)},
        "quadrature": {"abs": num(p.quadrature.abs), "rel": num(p.quadrature.rel)},
        "grids": grids,
    })
}

/// The canonical JSON record. Timing is left out so reruns are identical.
pub fn json_report(bundle: &ReportBundle) -> String {
    let v = json!({
        "task": bundle.scenario.task.name(),
        "status": match bundle.completion() {
            Completion::Definitive => "definitive",
            Completion::Inconclusive => "inconclusive",
        },
        "scenario": serde_json::to_value(&bundle.scenario).expect("scenarios always serialize"),
        "result": result_json(bundle),
        "provenance": provenance_json(bundle),
    });
    canonical::to_string(&v)
}

fn coord_header(dim: Option<Dim>) -> Vec<&'static str> {
    match dim {
        Some(Dim::Two) => vec!["x1", "x2"],
        _ => vec!["x"],
    }
}

fn push_coords(row: &mut Vec<String>, p: Point, dim: Option<Dim>) {
    row.extend(p.coords(dim.unwrap_or(Dim::One)).iter().map(|&c| f(c)));
}

fn scale_table(name: String, rows: &[ScaleRow], scale: &str, tag: &str) -> Table {
    let mut t = Table::new(name, &[scale, "re", "im", "error", "verdict"]);
    for r in rows {
        t.rows.push(vec![f(r.delta), f(r.value.re), f(r.value.im), f(r.error), tag.to_string()]);
    }
    t
}

fn path_table(name: String, p: &PathLimit, dim: Option<Dim>) -> Table {
    let mut header = vec!["t"];
    header.extend(coord_header(dim));
    header.extend(["re", "im", "error", "verdict"]);
    let mut t = Table::new(name, &header);
    for (r, q) in p.limit.rows.iter().zip(&p.path.points) {
        let mut row = vec![f(r.delta)];
        push_coords(&mut row, q.x, dim);
        row.extend([f(r.value.re), f(r.value.im), f(r.error), kind(p.limit.kind).to_string()]);
        t.rows.push(row);
    }
    t
}

fn path_series(paths: &[PathLimit], dim: Option<Dim>, prefix: &str) -> Vec<Series> {
    paths
        .iter()
        .map(|p| Series {
            label: format!("{prefix}{}", p.path.label(dim.unwrap_or(Dim::One))),
            points: p.limit.rows.iter().map(|r| (r.delta, r.value.re)).collect(),
        })
        .collect()
}

/// CSV tables of the per-path or per-scale evidence.
pub fn tables(bundle: &ReportBundle) -> Vec<Table> {
    let dim = bundle.provenance.dim;
    match &bundle.result {
        TaskResult::KernelCheck(k) => {
            let mut levels = Table::new("level_radius", &["s", "radius", "verdict"]);
            for l in &k.levels {
                levels.rows.push(match &l.radius {
                    Ok(r) => vec![f(l.s), f(r.radius), ball(r.ball).into()],
                    Err(_) => vec![f(l.s), String::new(), "error".into()],
                });
            }
            let mut decay = Table::new("decay", &["s", "s^n phi(s)", "verdict"]);
            for &(s, v) in k.decay.toward_zero.iter().rev().chain(&k.decay.toward_infinity[1..]) {
                decay.rows.push(vec![f(s), f(v), pass(k.decay.pass).into()]);
            }
            vec![levels, decay]
        }
        TaskResult::Convolve(rows) => {
            let mut header = coord_header(dim);
            header.extend(["t", "re", "im", "error"]);
            let mut t = Table::new("convolve", &header);
            for r in rows {
                let mut row = Vec::new();
                push_coords(&mut row, r.x, dim);
                row.extend([f(r.t), f(r.value.value.re), f(r.value.value.im), f(r.value.error)]);
                t.rows.push(row);
            }
            vec![t]
        }
        TaskResult::Classify(r) => {
            let mut out = vec![
                scale_table("symmetric".into(), &r.symmetric.rows, "delta", kind(r.symmetric.kind)),
                scale_table("lebesgue".into(), &r.lebesgue.rows, "delta", verdict(r.lebesgue.verdict)),
                scale_table("sigma".into(), &r.sigma.rows, "delta", verdict(r.sigma.verdict)),
            ];
            for (i, (_, l)) in r.strong.prototypes.iter().enumerate() {
                out.push(scale_table(format!("strong-{i:02}"), &l.rows, "delta", kind(l.kind)));
            }
            let tag = if r.maximal.unbounded { "unbounded" } else { "bounded" };
            out.push(scale_table("maximal".into(), &r.maximal.rows, "r", tag));
            out
        }
        TaskResult::ConeProbe(v) => v.paths.iter().enumerate().map(|(i, p)| path_table(format!("path-{i:02}"), p, dim)).collect(),
        TaskResult::RayFan(fan) => fan
            .rays
            .iter()
            .enumerate()
            .flat_map(|(i, v)| v.paths.iter().map(move |p| path_table(format!("ray-{i:02}"), p, dim)))
            .collect(),
        TaskResult::ParabolicProbe(p) => p
            .verdict
            .paths
            .iter()
            .enumerate()
            .map(|(i, q)| path_table(format!("path-{i:02}"), q, dim))
            .collect(),
    }
}

/// The plotted view of the result.
pub fn figure(bundle: &ReportBundle) -> Figure {
    let dim = bundle.provenance.dim;
    let task = bundle.scenario.task.name();
    let (x_label, y_label, series) = match &bundle.result {
        TaskResult::KernelCheck(k) => (
            "level s",
            "theta(s)",
            vec![Series {
                label: "level radius".into(),
                points: k.levels.iter().filter_map(|l| Some((l.s, l.radius.as_ref().ok()?.radius))).collect(),
            }],
        ),
        TaskResult::Convolve(rows) => {
            let mut series: Vec<Series> = Vec::new();
            for r in rows {
                let label = format!("x = {}", coords(r.x, dim));
                match series.iter_mut().find(|s| s.label == label) {
                    Some(s) => s.points.push((r.t, r.value.value.re)),
                    None => series.push(Series {
                        label,
                        points: vec![(r.t, r.value.value.re)],
                    }),
                }
            }
            ("t", "Re u(x, t)", series)
        }
        TaskResult::Classify(r) => {
            let s = |label: &str, rows: &[ScaleRow]| Series {
                label: label.into(),
                points: rows.iter().map(|r| (r.delta, r.value.re)).collect(),
            };
            ("delta", "Re ratio", vec![s("symmetric", &r.symmetric.rows), s("lebesgue", &r.lebesgue.rows), s("sigma", &r.sigma.rows)])
        }
        TaskResult::ConeProbe(v) => ("t", "Re u", path_series(&v.paths, dim, "")),
        TaskResult::RayFan(fan) => ("t", "Re u", fan.rays.iter().flat_map(|v| path_series(&v.paths, dim, "")).collect()),
        TaskResult::ParabolicProbe(p) => ("t", "Re W", path_series(&p.verdict.paths, dim, "")),
    };
    Figure {
        title: format!("ntlim {task}"),
        x_label: x_label.into(),
        y_label: y_label.into(),
        series,
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

/// Writes the requested formats into `dir`; returns the files written.
pub fn emit_reports(bundle: &ReportBundle, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    let mut written = Vec::new();
    for format in formats {
        match format {
            Format::Json => written.push(write(dir.join("report.json"), &json_report(bundle))?),
            Format::Csv => {
                for t in tables(bundle) {
                    written.push(write(dir.join(format!("{}.csv", t.name)), &t.to_csv())?);
                }
            }
            Format::Svg => written.push(write(dir.join("plot.svg"), &plot::svg(&figure(bundle)))?),
        }
    }
    Ok(written)
}
