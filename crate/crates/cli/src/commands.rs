//! `homology`, `replace`, `wcolim` and `verify`.

use hocolim::bar;
use hocolim::chainz;
use hocolim::diagram::{self, CellPresentation, Diagram};
use hocolim::reedy;
use hocolim::{ChainComplex, Homology};
use serde_json::{json, Value};

use crate::report::{Check, Report};
use crate::suites;
use crate::workspace::{complex_from_json, complex_to_json, map_from_json, map_to_json, InputError, Workspace};

/// Default cap on truncations when `HOCOLIM_MAX_DEGREE` is unset.
pub const DEFAULT_MAX_DEGREE: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad file, unknown name or unmet precondition; exit status 2.
    #[error("{0}")]
    Input(String),
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Input(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Direct,
    Bar,
}

/// Reject files whose objects fail validation, naming the first failure.
fn require_valid(ws: &Workspace) -> Result<(), CliError> {
    match ws.validate().into_iter().next() {
        Some((what, why)) => input(format!("{what}: {why}")),
        None => Ok(()),
    }
}

fn homology_json(c: &ChainComplex) -> Value {
    let degs: Vec<i64> = if c.is_empty() { vec![0] } else { c.degrees().collect() };
    Value::Array(
        degs.into_iter()
            .map(|n| {
                let g = c.homology_at(n);
                json!({
                    "degree": n,
                    "rank": g.rank,
                    "torsion": g.torsion.iter().map(crate::workspace::int_to_json).collect::<Vec<_>>(),
                    "group": g.to_string(),
                })
            })
            .collect(),
    )
}

/// `H0 = Z/2, H1 = 0` over the support (degree 0 for the zero complex).
pub fn homology_line(c: &ChainComplex) -> String {
    let degs: Vec<i64> = if c.is_empty() { vec![0] } else { c.degrees().collect() };
    degs.into_iter().map(|n| format!("H{n} = {}", c.homology_at(n))).collect::<Vec<_>>().join(", ")
}

pub fn cmd_homology(ws: &Workspace, name: Option<&str>) -> Result<Report, CliError> {
    let names: Vec<&String> = match name {
        Some(n) => match ws.complexes.get_key_value(n) {
            Some((k, _)) => vec![k],
            None => return input(format!("unknown complex {n:?}")),
        },
        None => ws.complexes.keys().collect(),
    };
    let mut rep = Report::new("homology");
    let mut table = serde_json::Map::new();
    for k in names {
        let c = &ws.complexes[k];
        if let Err(e) = c.validate() {
            return input(format!("complex {k}: {e}"));
        }
        rep.lines.push(format!("{k}: {}", homology_line(c)));
        table.insert(k.clone(), homology_json(c));
    }
    rep.result.insert("homology".into(), Value::Object(table));
    Ok(rep)
}

fn object_indices(shape: &hocolim::dgcat::DgCategory, names: &[String]) -> Result<Vec<usize>, CliError> {
    names.iter().map(|n| shape.index(n).or_else(|_| input(format!("unknown object {n:?}")))).collect()
}

/// Cells of a presentation, with inline complexes so that the sequence can
/// be replayed from its base diagram alone.
pub fn presentation_to_json(p: &CellPresentation, base: &str) -> Value {
    let shape = p.base().shape();
    let cells: Vec<Value> = p
        .cells()
        .iter()
        .map(|c| {
            json!({
                "object": shape.name(c.object),
                "source": complex_to_json(c.k.src()),
                "target": complex_to_json(c.k.tgt()),
                "k": map_to_json(&c.k),
                "attach": map_to_json(&c.attach),
            })
        })
        .collect();
    json!({ "base": base, "cells": cells })
}

/// Rebuild a presentation by attaching the listed cells to `base`.
pub fn presentation_from_json(v: &Value, base: &Diagram) -> Result<CellPresentation, CliError> {
    let cells = v.get("cells").and_then(Value::as_array).map_or_else(|| input("presentation: missing cells"), Ok)?;
    let shape = base.shape();
    let mut p = CellPresentation::new(base);
    for (i, cell) in cells.iter().enumerate() {
        let path = format!("presentation.cells[{i}]");
        let get = |key: &str| cell.get(key).map_or_else(|| input(format!("{path}: missing {key}")), Ok);
        let obj = get("object")?.as_str().map_or_else(|| input(format!("{path}.object: expected a name")), Ok)?;
        let c = shape.index(obj).or_else(|_| input(format!("{path}.object: unknown object {obj:?}")))?;
        let src = complex_from_json(get("source")?, &format!("{path}.source"))?;
        let tgt = complex_from_json(get("target")?, &format!("{path}.target"))?;
        let k = map_from_json(get("k")?, &src, &tgt, &format!("{path}.k"))?;
        let stage = p.result().value(c).clone();
        let a = map_from_json(get("attach")?, &src, &stage, &format!("{path}.attach"))?;
        p.attach(c, &k, &a).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    }
    Ok(p)
}

/// Cap from `HOCOLIM_MAX_DEGREE`, default [`DEFAULT_MAX_DEGREE`].
pub fn max_degree_from_env() -> Result<usize, CliError> {
    match std::env::var("HOCOLIM_MAX_DEGREE") {
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
        Ok(s) => s.trim().parse().or_else(|_| input(format!("HOCOLIM_MAX_DEGREE must be a non-negative integer, found {s:?}"))),
    }
}

pub struct ReplaceArgs<'a> {
    pub diagram: &'a str,
    pub mode: Mode,
    pub truncation: Option<usize>,
    pub away_from: &'a [String],
    pub max_degree: usize,
}

/// Replacement of a file diagram; the returned workspace extends the input
/// with `<D>.replacement`, `<D>.augmentation` and, in direct mode,
/// `<D>.base` (the presentation's base).
pub fn cmd_replace(ws: &Workspace, args: &ReplaceArgs) -> Result<(Report, Workspace), CliError> {
    require_valid(ws)?;
    let Some(entry) = ws.diagrams.get(args.diagram) else {
        return input(format!("unknown diagram {:?}", args.diagram));
    };
    let x = &entry.diagram;
    let name = args.diagram;
    let mut out = ws.clone();
    let mut rep = Report::new("replace");
    let repl = format!("{name}.replacement");
    let aug = format!("{name}.augmentation");
    match args.mode {
        Mode::Direct => {
            if args.truncation.is_some() {
                return input("--truncation applies to --mode bar only");
            }
            let part = object_indices(x.shape(), args.away_from)?;
            let r = reedy::replace_direct(x, &part).map_err(|e| CliError::Input(format!("direct replacement: {e}")))?;
            let v = r.verify(x, &part).map_err(|e| CliError::Input(format!("direct replacement: {e}")))?;
            let base = format!("{name}.base");
            out.add_diagram(&base, &entry.category, r.presentation.base())?;
            out.add_diagram(&repl, &entry.category, &r.diagram)?;
            out.add_transformation(&aug, &repl, name, &r.augmentation)?;
            rep.push(Check::new("augmentation is a pointwise weak equivalence", v.pointwise_we));
            rep.push(Check::new("cell presentation replays to the replacement", v.replays));
            rep.push(Check::new("replacement agrees with the input on the excluded part", v.agrees_on_part));
            for (c, ok) in &v.latching {
                rep.push(Check::new(format!("latching map at {} is a cofibration", x.shape().name(*c)), *ok));
            }
            rep.push(Check::new("replacement is pointwise cofibrant", r.diagram.is_pointwise_cofibrant()));
            let names = |v: &[usize]| v.iter().map(|&c| x.shape().name(c).to_string()).collect::<Vec<_>>();
            rep.result.insert("attached".into(), json!(names(&r.attached)));
            rep.result.insert("skipped".into(), json!(names(&r.skipped)));
            rep.result.insert("presentation".into(), presentation_to_json(&r.presentation, &base));
            for c in x.shape().objects() {
                rep.lines.push(format!("{}({}): {}", repl, x.shape().name(c), homology_line(r.diagram.value(c))));
            }
        }
        Mode::Bar => {
            if !args.away_from.is_empty() {
                return input("--away-from applies to --mode direct only");
            }
            let n = args.truncation.unwrap_or(args.max_degree.min(6));
            if n > args.max_degree {
                return input(format!("truncation {n} exceeds HOCOLIM_MAX_DEGREE = {}", args.max_degree));
            }
            let r = bar::bar_replacement(x, n).map_err(|e| CliError::Input(format!("bar replacement: {e}")))?;
            let target = if r.shift != 0 {
                let shifted = format!("{name}.shifted");
                out.add_diagram(&shifted, &entry.category, &bar::shift_diagram(x, r.shift))?;
                shifted
            } else {
                name.to_string()
            };
            out.add_diagram(&repl, &entry.category, &r.diagram)?;
            out.add_transformation(&aug, &repl, &target, &r.augmentation)?;
            let safe = r.safe_degree;
            let we = r.we_failure();
            rep.push(
                Check::from_failure(
                    "augmentation is a pointwise weak equivalence",
                    we.map(|c| format!("object {}", x.shape().name(c))),
                )
                .with_safe_range(0, safe),
            );
            rep.push(Check::new("replacement is pointwise cofibrant", r.diagram.is_pointwise_cofibrant()));
            rep.result.insert("truncation".into(), json!(n));
            rep.result.insert("shift".into(), json!(r.shift));
            rep.result.insert("safe_range".into(), json!([0, safe]));
            for c in x.shape().objects() {
                rep.lines.push(format!("{}({}): {}", repl, x.shape().name(c), homology_line(r.diagram.value(c))));
            }
        }
    }
    rep.push(Check::new("output workspace validates", out.validate().is_empty()));
    Ok((rep, out))
}

fn homology_through(h: &Homology, lo: i64, hi: i64) -> String {
    (lo..=hi).map(|n| format!("H{n} = {}", h.at(n))).collect::<Vec<_>>().join(", ")
}

/// Weighted colimit `W ⊗_C X`; with `check_quillen`, also the map induced
/// on a file transformation.
pub fn cmd_wcolim(ws: &Workspace, weight: &str, diagram: &str, check_quillen: Option<&str>) -> Result<Report, CliError> {
    require_valid(ws)?;
    let w = &ws.diagrams.get(weight).map_or_else(|| input(format!("unknown diagram {weight:?}")), Ok)?.diagram;
    let x = &ws.diagrams.get(diagram).map_or_else(|| input(format!("unknown diagram {diagram:?}")), Ok)?.diagram;
    if w.shape() != &x.shape().opposite() {
        return input(format!("shape mismatch: {weight} must live on the opposite of the shape of {diagram}"));
    }
    let col = diagram::weighted_colimit(w, x).map_err(|e| CliError::Input(e.to_string()))?;
    let mut rep = Report::new("wcolim");
    rep.lines.push(format!("{weight} ⊗ {diagram}: {}", homology_line(&col)));
    rep.result.insert("colimit".into(), complex_to_json(&col));
    rep.result.insert("homology".into(), homology_json(&col));
    let flat = w.values().iter().all(|v| chainz::is_flat(v).flat);
    rep.result.insert("weight_flat".into(), json!(flat));
    if let Some(t) = check_quillen {
        let e = ws.transformations.get(t).map_or_else(|| input(format!("unknown transformation {t:?}")), Ok)?;
        let f = &e.transformation;
        if f.src().shape() != x.shape() {
            return input(format!("shape mismatch: {t} does not live on the shape of {diagram}"));
        }
        let we = f.is_pointwise_we();
        let m = diagram::weighted_colimit_map(w, f).map_err(|e| CliError::Input(e.to_string()))?;
        rep.result.insert("quillen_hypotheses".into(), json!({ "weight_flat": flat, "pointwise_we": we }));
        let lo = m.src().lo().min(m.tgt().lo());
        let hi = m.src().hi().max(m.tgt().hi());
        let c = Check::new(format!("{weight} ⊗ {t} is a weak equivalence"), m.is_weak_equivalence());
        let c = if c.pass {
            c
        } else {
            c.with_witness(format!(
                "source {}; target {}",
                homology_through(&m.src().homology(), lo, hi),
                homology_through(&m.tgt().homology(), lo, hi)
            ))
        };
        rep.push(c);
    }
    Ok(rep)
}

pub fn cmd_verify(ws: &Workspace, suite: &str, seed: u64) -> Result<Report, CliError> {
    let checks = suites::run(ws, suite, seed).map_or_else(|| input(format!("unknown suite {suite:?}; expected one of {:?}", suites::SUITES)), Ok)?;
    let mut rep = Report::new("verify");
    rep.result.insert("suite".into(), json!(suite));
    rep.result.insert("seed".into(), json!(seed));
    rep.extend(checks);
    Ok(rep)
}
