//! Scene files: a JSON description of a product space, its anchors,
//! named points, constructed functions, and a list of verification tasks.
//! Reports are emitted as CSV with full-precision floats and LF endings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::analysis::{
    escape_witness, finite_criterion_check, nearly_open_trace_check, oscillation_estimate,
    radii_extension, s_continuity_check, separate_continuity_check, ssc_check, NetSpec,
    TraceFamily, TraceMode,
};
use crate::construct::{
    build_algebra, build_ball_function, build_component_indicator, build_coord_norm, build_series,
    build_union_function, AlgebraOp, BallProduct, ConstructedFunction, RadiiSeq,
};
use crate::error::{Error, Result};
use crate::space::{Ambient, CoordSpace, CoordVector, SparsePoint, SpaceFamily};
use crate::topology::{projective_symmetry_check, MutationProbe, SetPredicate};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    spaces: SpacesDoc,
    #[serde(default)]
    anchors: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
    #[serde(default)]
    points: BTreeMap<String, PointDoc>,
    #[serde(default)]
    functions: BTreeMap<String, FunctionDoc>,
    #[serde(default)]
    tasks: Vec<Task>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpacesDoc {
    #[serde(default)]
    prefix: Vec<CoordSpace>,
    tail: CoordSpace,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    anchor: String,
    #[serde(default)]
    overrides: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadiiDoc {
    #[serde(default)]
    prefix: Vec<f64>,
    tail: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallDoc {
    center: String,
    radii: RadiiDoc,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FunctionDoc {
    Ball(BallDoc),
    Union { balls: Vec<BallDoc> },
    ComponentIndicator { base: String, inside: f64, outside: f64 },
    CoordNorm { index: usize },
    Algebra { op: String, children: Vec<String> },
    Series { weights: Vec<f64>, children: Vec<String>, tail_bound: f64 },
}

/// One verification task of a scene.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Eval { id: String, function: String, point: String },
    Ssc { id: String, function: String, point: String, #[serde(default)] seed: u64 },
    Sep { id: String, function: String, point: String, #[serde(default)] seed: u64 },
    Scont {
        id: String,
        function: String,
        point: String,
        #[serde(default = "default_samples")] samples: usize,
        #[serde(default = "default_tol")] tol: f64,
        #[serde(default)] seed: u64,
    },
    Criterion {
        id: String,
        function: String,
        point: String,
        eps: f64,
        #[serde(default = "default_budget")] budget: usize,
        #[serde(default)] seed: u64,
    },
    NearlyOpen { id: String, function: String, #[serde(default = "default_horizon")] horizon: usize },
    Symmetric { id: String, components: Vec<String>, at: String, #[serde(default)] seed: u64 },
    Witness { id: String, function: String, point: String, #[serde(default = "default_offset")] offset: usize },
    Oscillation { id: String, function: String, point: String, #[serde(default)] seed: u64 },
    Radii { id: String, function: String, point: String, #[serde(default = "default_horizon")] horizon: usize },
}

fn default_samples() -> usize {
    200
}
fn default_tol() -> f64 {
    1e-2
}
fn default_budget() -> usize {
    6
}
fn default_horizon() -> usize {
    4
}
fn default_offset() -> usize {
    1
}

impl Task {
    pub fn id(&self) -> &str {
        match self {
            Task::Eval { id, .. }
            | Task::Ssc { id, .. }
            | Task::Sep { id, .. }
            | Task::Scont { id, .. }
            | Task::Criterion { id, .. }
            | Task::NearlyOpen { id, .. }
            | Task::Symmetric { id, .. }
            | Task::Witness { id, .. }
            | Task::Oscillation { id, .. }
            | Task::Radii { id, .. } => id,
        }
    }
}

/// Fully resolved scene.
#[derive(Debug)]
pub struct Scene {
    pub amb: Ambient,
    pub points: BTreeMap<String, SparsePoint>,
    pub functions: BTreeMap<String, ConstructedFunction>,
    pub tasks: Vec<Task>,
}

impl Scene {
    pub fn point(&self, name: &str) -> Result<&SparsePoint> {
        self.points
            .get(name)
            .ok_or_else(|| Error::UnresolvedRef(format!("point '{name}'")))
    }

    pub fn function(&self, name: &str) -> Result<&ConstructedFunction> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::UnresolvedRef(format!("function '{name}'")))
    }
}

fn parse_index(path: &Path, key: &str) -> Result<usize> {
    key.parse::<usize>().map_err(|_| Error::Schema {
        path: path.display().to_string(),
        message: format!("coordinate index '{key}' is not a positive integer"),
    })
}

fn parse_op(op: &str) -> Result<AlgebraOp> {
    Ok(match op {
        "add" => AlgebraOp::Add,
        "sub" => AlgebraOp::Sub,
        "mul" => AlgebraOp::Mul,
        "abs" => AlgebraOp::Abs,
        "min" => AlgebraOp::Min,
        "max" => AlgebraOp::Max,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown algebra op '{other}'"
            )))
        }
    })
}

/// Parse and resolve a scene file.
pub fn parse_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path)?;
    let doc: SceneDoc = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;

    let family = SpaceFamily {
        prefix: doc.spaces.prefix,
        tail: doc.spaces.tail,
    };
    let mut amb = Ambient::new(family);

    for (name, values) in &doc.anchors {
        if name == "zero" {
            continue; // implicit
        }
        let mut map = BTreeMap::new();
        for (key, v) in values {
            map.insert(parse_index(path, key)?, CoordVector(v.clone()));
        }
        amb.add_anchor(name.clone(), map)?;
    }

    let mut points = BTreeMap::new();
    for (name, pd) in &doc.points {
        let anchor = amb
            .anchor_by_name(&pd.anchor)
            .ok_or_else(|| Error::UnresolvedRef(format!("anchor '{}'", pd.anchor)))?;
        let mut overrides = BTreeMap::new();
        for (key, v) in &pd.overrides {
            overrides.insert(parse_index(path, key)?, CoordVector(v.clone()));
        }
        points.insert(name.clone(), amb.point(anchor, overrides)?);
    }

    let resolve_ball = |bd: &BallDoc| -> Result<BallProduct> {
        let center = points
            .get(&bd.center)
            .ok_or_else(|| Error::UnresolvedRef(format!("point '{}'", bd.center)))?;
        BallProduct::new(
            center.anchor,
            center.clone(),
            RadiiSeq::new(bd.radii.prefix.clone(), bd.radii.tail)?,
        )
    };

    // functions may reference earlier functions by name
    let mut functions: BTreeMap<String, ConstructedFunction> = BTreeMap::new();
    let mut pending: Vec<(&String, &FunctionDoc)> = doc.functions.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut next = Vec::new();
        for (name, fd) in pending {
            let resolve_children = |names: &[String]| -> Option<Vec<ConstructedFunction>> {
                names.iter().map(|n| functions.get(n).cloned()).collect()
            };
            let built = match fd {
                FunctionDoc::Ball(bd) => Some(build_ball_function(resolve_ball(bd)?)),
                FunctionDoc::Union { balls } => {
                    let balls: Vec<BallProduct> =
                        balls.iter().map(&resolve_ball).collect::<Result<_>>()?;
                    Some(build_union_function(balls)?)
                }
                FunctionDoc::ComponentIndicator {
                    base,
                    inside,
                    outside,
                } => {
                    let base = points
                        .get(base)
                        .ok_or_else(|| Error::UnresolvedRef(format!("point '{base}'")))?;
                    Some(build_component_indicator(base.clone(), *inside, *outside))
                }
                FunctionDoc::CoordNorm { index } => Some(build_coord_norm(*index)),
                FunctionDoc::Algebra { op, children } => resolve_children(children)
                    .map(|cs| build_algebra(parse_op(op)?, cs))
                    .transpose()?,
                FunctionDoc::Series {
                    weights,
                    children,
                    tail_bound,
                } => resolve_children(children)
                    .map(|cs| build_series(weights.clone(), cs, *tail_bound))
                    .transpose()?,
            };
            match built {
                Some(f) => {
                    functions.insert(name.clone(), f);
                }
                None => next.push((name, fd)),
            }
        }
        if next.len() == before {
            let names: Vec<&str> = next.iter().map(|(n, _)| n.as_str()).collect();
            return Err(Error::UnresolvedRef(format!(
                "function references cannot be resolved: {}",
                names.join(", ")
            )));
        }
        pending = next;
    }

    Ok(Scene {
        amb,
        points,
        functions,
        tasks: doc.tasks,
    })
}

/// One datum of a report.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub id: String,
    pub kind: String,
    pub key: String,
    pub value: RowValue,
}

#[derive(Debug, Clone)]
pub enum RowValue {
    Num(f64),
    Text(String),
}

/// Report of a task run.
#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub rows: Vec<ReportRow>,
    pub failures: usize,
}

impl ReportBundle {
    fn push(&mut self, id: &str, kind: &str, key: &str, value: RowValue) {
        self.rows.push(ReportRow {
            id: id.to_string(),
            kind: kind.to_string(),
            key: key.to_string(),
            value,
        });
    }

    fn push_pass(&mut self, id: &str, kind: &str, pass: bool) {
        if !pass {
            self.failures += 1;
        }
        self.push(
            id,
            kind,
            "pass",
            RowValue::Num(if pass { 1.0 } else { 0.0 }),
        );
    }

    /// CSV rendering: header, LF line endings, floats at full round-trip
    /// precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,kind,key,value\n");
        for row in &self.rows {
            let value = match &row.value {
                RowValue::Num(x) => format_float(*x),
                RowValue::Text(s) => s.clone(),
            };
            out.push_str(&format!("{},{},{},{}\n", row.id, row.kind, row.key, value));
        }
        out
    }
}

/// 17 significant digits: enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Run every task of the scene. `seed_mix` is folded into each task's own
/// seed so whole runs can be re-randomized coherently.
pub fn run_tasks(scene: &Scene, seed_mix: u64) -> Result<ReportBundle> {
    let mut report = ReportBundle::default();
    let net = NetSpec::default();
    for task in &scene.tasks {
        run_task(scene, task, seed_mix, &net, &mut report)?;
    }
    Ok(report)
}

fn mix(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn run_task(
    scene: &Scene,
    task: &Task,
    seed_mix: u64,
    net: &NetSpec,
    report: &mut ReportBundle,
) -> Result<()> {
    let amb = &scene.amb;
    match task {
        Task::Eval {
            id,
            function,
            point,
        } => {
            let v = scene.function(function)?.evaluate(amb, scene.point(point)?)?;
            report.push(id, "eval", "value", RowValue::Num(v));
        }
        Task::Ssc {
            id,
            function,
            point,
            seed,
        } => {
            let r = ssc_check(
                amb,
                scene.function(function)?,
                scene.point(point)?,
                net,
                mix(*seed, seed_mix),
            )?;
            report.push_pass(id, "ssc", r.pass);
            report.push(
                id,
                "ssc",
                "final_gap",
                RowValue::Num(r.per_level_sup.last().copied().unwrap_or(0.0)),
            );
        }
        Task::Sep {
            id,
            function,
            point,
            seed,
        } => {
            let r = separate_continuity_check(
                amb,
                scene.function(function)?,
                scene.point(point)?,
                net,
                mix(*seed, seed_mix),
            )?;
            report.push_pass(id, "sep", r.pass);
        }
        Task::Scont {
            id,
            function,
            point,
            samples,
            tol,
            seed,
        } => {
            let v = s_continuity_check(
                amb,
                scene.function(function)?,
                scene.point(point)?,
                *samples,
                *tol,
                mix(*seed, seed_mix),
            )?;
            report.push_pass(id, "scont", v.is_constant());
        }
        Task::Criterion {
            id,
            function,
            point,
            eps,
            budget,
            seed,
        } => {
            let r = finite_criterion_check(
                amb,
                scene.function(function)?,
                scene.point(point)?,
                *eps,
                *budget,
                mix(*seed, seed_mix),
            )?;
            report.push(
                id,
                "criterion",
                "found",
                RowValue::Num(if r.is_found() { 1.0 } else { 0.0 }),
            );
            if let Some((t0, _)) = &r.found {
                report.push(
                    id,
                    "criterion",
                    "t0_size",
                    RowValue::Num(t0.len() as f64),
                );
            }
        }
        Task::NearlyOpen {
            id,
            function,
            horizon,
        } => {
            let f = scene.function(function)?;
            let traces = TraceFamily::from_claimed(amb, &f.claimed_discontinuity)?;
            let verdicts = nearly_open_trace_check(amb, &traces, *horizon, TraceMode::Analytic)?;
            let all_open = verdicts.iter().all(|v| v.is_open());
            report.push_pass(id, "nearly_open", all_open);
        }
        Task::Symmetric {
            id,
            components,
            at,
            seed,
        } => {
            let reps: Vec<SparsePoint> = components
                .iter()
                .map(|n| scene.point(n).cloned())
                .collect::<Result<_>>()?;
            let sample = reps.clone();
            let set = SetPredicate::component_union(reps);
            let probe = MutationProbe::with_seed(mix(*seed, seed_mix));
            let verdict =
                projective_symmetry_check(amb, &set, scene.point(at)?, &sample, &probe)?;
            report.push_pass(id, "symmetric", verdict.passed());
        }
        Task::Witness {
            id,
            function,
            point,
            offset,
        } => {
            let f = scene.function(function)?;
            let bp = f.balls().first().ok_or_else(|| {
                Error::Precondition("witness task needs a ball function".into())
            })?;
            let (w, rho) = escape_witness(amb, bp, scene.point(point)?, *offset)?;
            report.push(id, "witness", "rho", RowValue::Num(rho));
            report.push(
                id,
                "witness",
                "value",
                RowValue::Num(f.evaluate(amb, &w)?),
            );
        }
        Task::Oscillation {
            id,
            function,
            point,
            seed,
        } => {
            let est = oscillation_estimate(
                amb,
                scene.function(function)?,
                scene.point(point)?,
                net,
                mix(*seed, seed_mix),
            )?;
            report.push(
                id,
                "oscillation",
                "certified_lower",
                RowValue::Num(est.certified_lower),
            );
            report.push(
                id,
                "oscillation",
                "sampled_upper",
                RowValue::Num(est.sampled_upper),
            );
            report.push(
                id,
                "oscillation",
                "verdict",
                RowValue::Text(format!("{:?}", est.verdict)),
            );
        }
        Task::Radii {
            id,
            function,
            point,
            horizon,
        } => {
            let f = scene.function(function)?;
            let traces = TraceFamily::from_claimed(amb, &f.claimed_discontinuity)?;
            match radii_extension(amb, &traces, scene.point(point)?, *horizon) {
                Ok(radii) => {
                    report.push_pass(id, "radii", true);
                    for (i, r) in radii.iter().enumerate() {
                        report.push(id, "radii", &format!("r{}", i + 1), RowValue::Num(*r));
                    }
                }
                Err(Error::NotNearlyOpen { .. }) => report.push_pass(id, "radii", false),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

/// CSV slice of a function over a 2-D grid: coordinates `i` and `j` of the
/// base point sweep their first scalar component over `[lo, hi]` in `step`
/// increments. Columns: grid indices, the two scalars, and the value.
pub fn emit_slice(
    amb: &Ambient,
    f: &ConstructedFunction,
    base: &SparsePoint,
    ci: usize,
    cj: usize,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<String> {
    if ci == 0 || cj == 0 {
        return Err(Error::ZeroIndex);
    }
    if !(step > 0.0) || hi < lo {
        return Err(Error::InvalidParameter("bad slice grid".into()));
    }
    let count = ((hi - lo) / step).floor() as usize + 1;
    let mut out = String::from("i,j,c1,c2,value\n");
    for a in 0..count {
        let va = lo + a as f64 * step;
        let mut x = amb.coordinate(base, ci)?;
        x.0[0] = va;
        let p = amb.with_coordinate(base, ci, x)?;
        for b in 0..count {
            let vb = lo + b as f64 * step;
            let mut y = amb.coordinate(&p, cj)?;
            y.0[0] = vb;
            let q = amb.with_coordinate(&p, cj, y)?;
            let value = f.evaluate(amb, &q)?;
            out.push_str(&format!(
                "{a},{b},{},{},{}\n",
                format_float(va),
                format_float(vb),
                format_float(value)
            ));
        }
    }
    Ok(out)
}
