//! Command drivers. Each returns reports, readable lines, a JSON payload and emitted files.

use std::collections::BTreeMap;

use ainf_core::ainf::{unitality_violations, AInfDeformation, Multilinear, Shape, Structure};
use ainf_core::deformed::{check_d_zero, cohomology_comparison, deformed_minimal_model, optimize_curvature, OptimizationTrace};
use ainf_core::graded::VectorB;
use ainf_core::hochschild::Hochschild;
use ainf_core::kadeishvili::{count_trees, enumerate_trees, minimal_model};
use ainf_core::report::Report;
use ainf_core::splitting::split;
use ainf_core::twisted::{attempt_uncurve_object, check_mc, mc_sum, tw_curvature, uncurve, uncurving_gauge, TwistedComplex, UncurveOutcome};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::schema::{Document, EntryDoc};
use crate::workspace::{document, object_vectors, to_json, Labels, Workspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    MinimalModel,
    DeformedMinimalModel { trace: bool },
    OptimizeCurvature,
    HochschildMc,
    Gauge,
    TwCurvature,
    UncurveObject { object: Option<String> },
    CheckDZero,
    CohomologyCompare,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::MinimalModel => "minimal-model",
            Command::DeformedMinimalModel { .. } => "deformed-minimal-model",
            Command::OptimizeCurvature => "optimize-curvature",
            Command::HochschildMc => "hochschild-mc",
            Command::Gauge => "gauge",
            Command::TwCurvature => "tw-curvature",
            Command::UncurveObject { .. } => "uncurve-object",
            Command::CheckDZero => "check-d-zero",
            Command::CohomologyCompare => "cohomology-compare",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub a_max: usize,
    pub k_max: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { a_max: 4, k_max: 4 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub reports: Vec<Report>,
    pub lines: Vec<String>,
    pub data: Value,
    /// File name and contents.
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.reports.iter().all(Report::is_ok)
    }

    pub fn first_failure(&self) -> Option<&Report> {
        self.reports.iter().find(|r| !r.is_ok())
    }
}

pub fn execute(cmd: &Command, ws: &Workspace, cfg: &Config) -> CliResult<Outcome> {
    let mut out = match cmd {
        Command::Verify => verify(ws, cfg),
        Command::MinimalModel => minimal(ws, cfg),
        Command::DeformedMinimalModel { trace } => deformed(ws, cfg, *trace),
        Command::OptimizeCurvature => optimize(ws),
        Command::HochschildMc => hochschild_mc(ws, cfg),
        Command::Gauge => gauge(ws, cfg),
        Command::TwCurvature => twisted_curvature(ws),
        Command::UncurveObject { object } => uncurve_object(ws, object.as_deref()),
        Command::CheckDZero => {
            let d = curvature_free(ws)?;
            let sp = split(d.reference())?;
            Ok(Outcome { reports: vec![check_d_zero(&d, &sp, cfg.k_max)?], ..Default::default() })
        }
        Command::CohomologyCompare => {
            let d = curvature_free(ws)?;
            let sp = split(d.reference())?;
            Ok(Outcome { reports: vec![cohomology_comparison(&d, &sp)?], ..Default::default() })
        }
    }?;
    for r in &mut out.reports {
        r.set("input", &ws.name);
        r.set("grading", format!("{:?}", ws.shape().mode()));
        r.set("base", base_label(ws));
        r.set("--a-max", cfg.a_max);
        r.set("--k-max", cfg.k_max);
    }
    Ok(out)
}

pub fn trees(count: Option<usize>, list: Option<usize>) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    if let Some(n) = count {
        let c = count_trees(n);
        out.lines.push(c.to_string());
        out.data = json!({ "leaves": n, "count": c.to_string() });
    }
    if let Some(n) = list {
        let ts = enumerate_trees(n)?;
        let names: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        out.lines.extend(names.iter().cloned());
        out.data = json!({ "leaves": n, "trees": names });
    }
    Ok(out)
}

fn base_label(ws: &Workspace) -> String {
    match &ws.base {
        Some(b) => format!("{} variable(s), truncation {}, {} relation(s)", b.num_vars(), b.truncation(), b.relations().len()),
        None => "Q".into(),
    }
}

fn curvature_free(ws: &Workspace) -> CliResult<AInfDeformation> {
    let d = ws.deformation()?;
    if !d.is_curvature_free() {
        return Err(CliError::Invariant("this command needs a curvature-free deformation".into()));
    }
    Ok(d)
}

/// One readable line per structure constant, in written order.
pub fn describe(shape: &Shape, table: &Multilinear) -> Vec<String> {
    let mut lines = Vec::new();
    for (x, v) in &table.nullary {
        if !v.is_zero() {
            lines.push(format!("m0[{}] = {}", shape.object_name(*x), shape.format_vector(*x, *x, v)));
        }
    }
    for (k, v) in &table.terms {
        if !v.is_zero() {
            let (s, t) = (k[0].src(), k[k.len() - 1].tgt());
            lines.push(format!("m{}{} = {}", k.len(), shape.format_tuple(k), shape.format_vector(s, t, v)));
        }
    }
    lines
}

fn verify(ws: &Workspace, cfg: &Config) -> CliResult<Outcome> {
    let c = ws.category.as_ref();
    let shape = ws.shape();
    let mut reports = vec![c.check_relations(cfg.a_max)];
    let mut unital = Report::new("unitality");
    unital.checked = (0..shape.num_objects()).filter(|&x| shape.identity(x).is_some()).count();
    for (loc, msg) in unitality_violations(c, cfg.a_max) {
        unital.violate("unit", loc, msg);
    }
    reports.push(unital);
    if let Some(d) = &ws.deformation {
        reports.push(d.check_relations(cfg.a_max));
        let mut lead = Report::new("leading term");
        lead.checked = 1;
        for (loc, msg) in d.leading_term_violations() {
            lead.violate("reduction", loc, msg);
        }
        for (loc, msg) in unitality_violations(d, cfg.a_max) {
            lead.note(format!("deformed unit action differs at {loc}: {msg}"));
        }
        reports.push(lead);
    }
    if !ws.twisted.is_empty() {
        let mut tw = Report::new("twisted complexes");
        for x in &ws.twisted {
            tw.merge(check_mc(x, c));
        }
        reports.push(tw);
    }
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    Ok(Outcome { reports, data: json!({ "violations": violations }), ..Default::default() })
}

fn hom_summary(shape: &Shape) -> Value {
    let homs: Vec<Value> = shape
        .hom_pairs()
        .into_iter()
        .map(|(s, t)| {
            let basis: Vec<Value> =
                shape.hom(s, t).elements().iter().map(|e| json!({ "name": e.name, "degree": e.degree })).collect();
            json!({ "source": shape.object_name(s), "target": shape.object_name(t), "basis": basis })
        })
        .collect();
    Value::Array(homs)
}

fn minimal(ws: &Workspace, cfg: &Config) -> CliResult<Outcome> {
    let c = ws.category.as_ref();
    let sp = split(c)?;
    let (hc, f) = minimal_model(c, &sp, cfg.k_max)?;
    let mut lines = vec![format!("cohomology:\n{}", hc.shape()).trim_end().to_string()];
    lines.extend(describe(hc.shape(), hc.products()));
    let name = format!("{}-hc", ws.name);
    let doc = document(&name, None, &hc, None);
    Ok(Outcome {
        reports: vec![hc.check_relations(cfg.a_max), f.check(cfg.a_max)],
        lines,
        data: json!({
            "cohomology": hom_summary(hc.shape()),
            "functor": f.classify().to_string(),
            "splitting": serde_json::to_value(sp.export()).expect("serializable"),
        }),
        artifacts: vec![(format!("{name}.json"), to_json(&doc))],
    })
}

fn trace_value(trace: &OptimizationTrace, shape: &Shape, nvars: usize) -> Value {
    let steps: Vec<Value> = trace
        .iterations
        .iter()
        .enumerate()
        .map(|(i, s)| json!({ "iteration": i, "order": s.order.to_string(), "gauge": object_vectors(shape, &s.gauge, nvars) }))
        .collect();
    let curvature: BTreeMap<usize, VectorB> = (0..shape.num_objects()).map(|x| (x, trace.optimized.curvature(x))).collect();
    json!({
        "iterations": steps,
        "total_gauge": object_vectors(shape, &trace.total, nvars),
        "optimized_curvature": object_vectors(shape, &curvature, nvars),
    })
}

fn trace_lines(trace: &OptimizationTrace, shape: &Shape) -> Vec<String> {
    let mut lines = Vec::new();
    for (i, s) in trace.iterations.iter().enumerate() {
        let gauge: Vec<String> =
            s.gauge.iter().map(|(x, v)| format!("{}: {}", shape.object_name(*x), shape.format_vector(*x, *x, v))).collect();
        lines.push(format!("iteration {i}: order {} [{}]", s.order, gauge.join("; ")));
    }
    lines
}

fn deformed(ws: &Workspace, cfg: &Config, with_trace: bool) -> CliResult<Outcome> {
    let d = ws.deformation()?;
    let sp = split(d.reference())?;
    let model = deformed_minimal_model(&d, &sp, cfg.k_max)?;
    let nvars = d.base().num_vars();
    let mut lines = vec![format!("cohomology:\n{}", model.classical.shape()).trim_end().to_string()];
    lines.extend(describe(model.hc.shape(), model.hc.products()));
    let name = format!("{}-hcq", ws.name);
    let doc = document(&name, Some(d.base()), &model.classical, Some(&model.hc));
    let mut artifacts = vec![(format!("{name}.json"), to_json(&doc))];
    let mut data = json!({
        "cohomology": hom_summary(model.classical.shape()),
        "functor": model.functor.classify().to_string(),
        "iterations": model.trace.iterations.len(),
    });
    if with_trace {
        lines.extend(trace_lines(&model.trace, d.shape()));
        let t = trace_value(&model.trace, d.shape(), nvars);
        artifacts.push((format!("{}.trace.json", ws.name), to_json(&t)));
        data["trace"] = t;
    }
    Ok(Outcome { reports: vec![model.check(cfg.a_max)], lines, data, artifacts })
}

fn with_deformation(ws: &Workspace, name: &str, d: &AInfDeformation) -> Document {
    let mut doc = document(name, Some(d.base()), &ws.category, Some(d));
    let nvars = d.base().num_vars();
    doc.twisted = ws.twisted.iter().map(|x| crate::workspace::twisted_doc(ws.shape(), x, nvars)).collect();
    doc
}

fn optimize(ws: &Workspace) -> CliResult<Outcome> {
    let d = ws.deformation()?;
    let sp = split(d.reference())?;
    let trace = optimize_curvature(&d, &sp)?;
    let nvars = d.base().num_vars();
    let name = format!("{}-optimized", ws.name);
    let doc = with_deformation(ws, &name, &trace.optimized);
    let mut lines = trace_lines(&trace, d.shape());
    lines.extend(describe(d.shape(), &trace.optimized.products().sub(d.reference().products())));
    Ok(Outcome {
        reports: vec![trace.check()],
        lines,
        data: trace_value(&trace, d.shape(), nvars),
        artifacts: vec![(format!("{name}.json"), to_json(&doc))],
    })
}

fn hochschild_mc(ws: &Workspace, cfg: &Config) -> CliResult<Outcome> {
    let d = ws.deformation()?;
    let reach = cfg.a_max.max(2 * d.k_max().max(1) - 1);
    let h = Hochschild::new(ws.category.clone(), d.base().clone(), reach)?;
    let nu = h.deformation_to_mc(&d);
    let defect = h.mc_defect(&nu)?;
    let shape = ws.shape();
    let mut mc = Report::new("Maurer-Cartan equation").with("cochain arity bound", reach);
    mc.checked = shape.num_objects() + (1..=reach).map(|k| shape.tuples(k).len()).sum::<usize>();
    for (x, v) in &defect.components.nullary {
        if !v.is_zero() {
            mc.violate("mc", format!("arity 0 at {}", shape.object_name(*x)), shape.format_vector(*x, *x, v));
        }
    }
    for (k, v) in &defect.components.terms {
        if !v.is_zero() {
            mc.violate("mc", shape.format_tuple(k), shape.format_vector(k[0].src(), k[k.len() - 1].tgt(), v));
        }
    }
    let curved = d.check_relations(reach);
    let mut dictionary = Report::new("deformation dictionary");
    dictionary.checked = 1;
    if mc.is_ok() != curved.is_ok() {
        dictionary.violate("dictionary", "deformation", "Maurer-Cartan defect and curved relations disagree");
    }
    let labels = Labels::new(shape);
    let nvars = d.base().num_vars();
    let mut components = Vec::new();
    for (x, v) in &nu.components.nullary {
        if !v.is_zero() {
            components.push(json!({ "arity": 0, "object": shape.object_name(*x), "output": labels.terms(*x, *x, v, nvars) }));
        }
    }
    for (k, v) in &nu.components.terms {
        if !v.is_zero() {
            let inputs: Vec<String> = k.iter().rev().map(|&g| labels.label(g)).collect();
            components.push(json!({
                "arity": k.len(),
                "inputs": inputs,
                "output": labels.terms(k[0].src(), k[k.len() - 1].tgt(), v, nvars),
            }));
        }
    }
    let mut lines = vec!["cochain:".to_string()];
    lines.extend(describe(shape, &nu.components));
    Ok(Outcome {
        reports: vec![mc, curved, dictionary],
        lines,
        data: json!({ "reach": reach, "cochain": components }),
        artifacts: Vec::new(),
    })
}

fn gauge(ws: &Workspace, cfg: &Config) -> CliResult<Outcome> {
    let d = ws.deformation()?;
    if ws.uncurving.is_empty() {
        return Err(CliError::Missing("this command needs an `uncurving` section".into()));
    }
    let u = uncurve(&d, &ws.uncurving)?;
    let g = uncurving_gauge(&d, &u, &ws.uncurving)?;
    let name = format!("{}-gauged", ws.name);
    let doc = with_deformation(ws, &name, &u);
    let shape = ws.shape();
    let mut lines = vec!["gauged deformation:".to_string()];
    lines.extend(describe(shape, &u.products().sub(d.reference().products())));
    let curvature: BTreeMap<usize, VectorB> = (0..shape.num_objects()).map(|x| (x, u.curvature(x))).collect();
    Ok(Outcome {
        reports: vec![g.check(cfg.a_max), u.check_relations(cfg.a_max)],
        lines,
        data: json!({
            "functor": g.classify().to_string(),
            "curvature": object_vectors(shape, &curvature, d.base().num_vars()),
        }),
        artifacts: vec![(format!("{name}.json"), to_json(&doc))],
    })
}

fn curvature_of<S: Structure + ?Sized>(s: &S, xs: &[TwistedComplex], nvars: usize) -> CliResult<(Report, Vec<String>, Value)> {
    let shape = s.shape();
    let labels = Labels::new(shape);
    let mut report = Report::new("twisted curvature");
    let mut lines = Vec::new();
    let mut values = Vec::new();
    for x in xs {
        let m = tw_curvature(s, x)?;
        report.checked += 1;
        let entries: Vec<(&(usize, usize), &VectorB)> = m.iter().filter(|(_, v)| !v.is_zero()).collect();
        if entries.is_empty() {
            lines.push(format!("{}: curvature 0", x.name));
        } else {
            report.note(format!("{} is curved", x.name));
            for (&(i, j), v) in &entries {
                lines.push(format!("{}: [{i}->{j}] {}", x.name, shape.format_vector(x.summands[i].0, x.summands[j].0, v)));
            }
        }
        let docs: Vec<EntryDoc> = entries
            .iter()
            .map(|(&(i, j), v)| EntryDoc { from: i, to: j, output: labels.terms(x.summands[i].0, x.summands[j].0, v, nvars) })
            .collect();
        values.push(json!({ "name": x.name, "flat": docs.is_empty(), "curvature": docs }));
    }
    Ok((report, lines, Value::Array(values)))
}

fn twisted_curvature(ws: &Workspace) -> CliResult<Outcome> {
    if ws.twisted.is_empty() {
        return Err(CliError::Missing("this command needs a `twisted` section".into()));
    }
    let (report, lines, data) = match &ws.base {
        Some(b) => curvature_of(&ws.deformation()?, &ws.twisted, b.num_vars())?,
        None => curvature_of(ws.category.as_ref(), &ws.twisted, 0)?,
    };
    Ok(Outcome { reports: vec![report], lines, data, artifacts: Vec::new() })
}

fn uncurve_object(ws: &Workspace, object: Option<&str>) -> CliResult<Outcome> {
    let d = ws.deformation()?;
    let sp = split(d.reference())?;
    let shape = ws.shape();
    let objects: Vec<usize> = match object {
        Some(o) => vec![shape.object_index(o).ok_or_else(|| CliError::schema("--object", format!("unknown object {o}")))?],
        None => (0..shape.num_objects()).collect(),
    };
    let nvars = d.base().num_vars();
    let labels = Labels::new(shape);
    let hc_labels = Labels::new(sp.hc_shape());
    let mut report = Report::new("object uncurving");
    let (mut lines, mut values) = (Vec::new(), Vec::new());
    for x in objects {
        report.checked += 1;
        let name = shape.object_name(x);
        match attempt_uncurve_object(&d, &sp, x)? {
            UncurveOutcome::Uncurved(s) => {
                if !mc_sum(&d, x, &s).is_zero() {
                    report.violate("uncurving", name, "returned element leaves curvature");
                }
                lines.push(format!("{name}: uncurved by {}", shape.format_vector(x, x, &s)));
                values.push(json!({ "object": name, "status": "uncurved", "element": labels.terms(x, x, &s, nvars) }));
            }
            UncurveOutcome::Obstructed { order, class } => {
                report.note(format!("{name} is obstructed at order {order}"));
                lines.push(format!("{name}: obstructed at order {order} by {}", sp.hc_shape().format_vector(x, x, &class)));
                values.push(json!({
                    "object": name,
                    "status": "obstructed",
                    "order": order,
                    "class": hc_labels.terms(x, x, &class, nvars),
                }));
            }
        }
    }
    Ok(Outcome { reports: vec![report], lines, data: Value::Array(values), artifacts: Vec::new() })
}
