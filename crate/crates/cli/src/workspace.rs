//! Workspace files: named complexes, categories, diagrams and
//! transformations in one canonical JSON document.

use std::collections::BTreeMap;
use std::fmt;

use hocolim::chainz::TensorProduct;
use hocolim::dgcat::DgCategory;
use hocolim::diagram::{Diagram, Transformation};
use hocolim::{ChainComplex, ChainMap, Elem, FpGroup, Int, IntMatrix};
use serde_json::{json, Map, Value};

/// Parse failure with the JSON path (or line and column) where it occurred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for InputError {}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, InputError> {
    Err(InputError { path: path.to_string(), message: message.into() })
}

// ---------------------------------------------------------------- scalars

const EXACT_FLOAT_LIMIT: u64 = 1 << 53;

/// Integers below 2^53 in absolute value are JSON numbers, all others
/// decimal strings.
pub fn int_to_json(v: &Int) -> Value {
    match i64::try_from(v) {
        Ok(x) if x.unsigned_abs() < EXACT_FLOAT_LIMIT => Value::from(x),
        _ => Value::String(v.to_string()),
    }
}

pub fn int_from_json(v: &Value, path: &str) -> Result<Int, InputError> {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_i64() {
                Ok(Int::from(x))
            } else if let Some(x) = n.as_u64() {
                Ok(Int::from(x))
            } else {
                err(path, format!("expected an integer, found {n}"))
            }
        }
        Value::String(s) => s.parse::<Int>().or_else(|_| err(path, format!("not a decimal integer: {s:?}"))),
        other => err(path, format!("expected an integer, found {other}")),
    }
}

fn usize_from_json(v: &Value, path: &str) -> Result<usize, InputError> {
    let x = int_from_json(v, path)?;
    usize::try_from(&x).or_else(|_| err(path, format!("expected a non-negative count, found {x}")))
}

fn i64_from_json(v: &Value, path: &str) -> Result<i64, InputError> {
    let x = int_from_json(v, path)?;
    i64::try_from(&x).or_else(|_| err(path, format!("degree out of range: {x}")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array().map_or_else(|| err(path, "expected an array"), Ok)
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object().map_or_else(|| err(path, "expected an object"), Ok)
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str, InputError> {
    v.as_str().map_or_else(|| err(path, "expected a string"), Ok)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, InputError> {
    m.get(key).map_or_else(|| err(path, format!("missing key {key:?}")), Ok)
}

fn only_keys(m: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), InputError> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => err(path, format!("unexpected key {k:?}")),
        None => Ok(()),
    }
}

/// Row-major list of rows.
pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(int_to_json).collect())).collect())
}

/// Matrix with a known row count; the column count comes from the rows
/// unless `cols` is given.
pub fn matrix_from_json(v: &Value, rows: usize, cols: Option<usize>, path: &str) -> Result<IntMatrix, InputError> {
    let rs = array(v, path)?;
    if rs.len() != rows {
        return err(path, format!("expected {rows} rows, found {}", rs.len()));
    }
    let width = match (cols, rs.first()) {
        (Some(c), _) => c,
        (None, Some(r)) => array(r, &format!("{path}[0]"))?.len(),
        (None, None) => 0,
    };
    let mut data = Vec::with_capacity(rows * width);
    for (i, r) in rs.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let entries = array(r, &p)?;
        if entries.len() != width {
            return err(&p, format!("expected {width} entries, found {}", entries.len()));
        }
        for (j, e) in entries.iter().enumerate() {
            data.push(int_from_json(e, &format!("{p}[{j}]"))?);
        }
    }
    Ok(IntMatrix::from_vec(rows, width, data))
}

// ---------------------------------------------------------------- complexes

pub fn complex_to_json(c: &ChainComplex) -> Value {
    let (lo, hi) = if c.is_empty() { (0, -1) } else { (c.lo(), c.hi()) };
    let degs = lo..=hi;
    json!({
        "support": [lo, hi],
        "gens": degs.clone().map(|n| c.gens(n)).collect::<Vec<_>>(),
        "relations": degs.clone().map(|n| matrix_to_json(c.rels(n))).collect::<Vec<_>>(),
        "differentials": (lo + 1..=hi).map(|n| matrix_to_json(c.d(n))).collect::<Vec<_>>(),
    })
}

/// Unchecked: shapes are enforced, `d∘d = 0` is left to [`validate`].
pub fn complex_from_json(v: &Value, path: &str) -> Result<ChainComplex, InputError> {
    let m = object(v, path)?;
    only_keys(m, &["support", "gens", "relations", "differentials"], path)?;
    let sp = array(field(m, "support", path)?, &format!("{path}.support"))?;
    if sp.len() != 2 {
        return err(&format!("{path}.support"), "expected [lo, hi]");
    }
    let lo = i64_from_json(&sp[0], &format!("{path}.support[0]"))?;
    let hi = i64_from_json(&sp[1], &format!("{path}.support[1]"))?;
    let len = usize::try_from(hi - lo + 1).unwrap_or(0);
    let gens: Vec<usize> = array(field(m, "gens", path)?, &format!("{path}.gens"))?
        .iter()
        .enumerate()
        .map(|(i, g)| usize_from_json(g, &format!("{path}.gens[{i}]")))
        .collect::<Result<_, _>>()?;
    if gens.len() != len {
        return err(&format!("{path}.gens"), format!("expected {len} entries for support [{lo}, {hi}], found {}", gens.len()));
    }
    let rels = array(field(m, "relations", path)?, &format!("{path}.relations"))?;
    if rels.len() != len {
        return err(&format!("{path}.relations"), format!("expected {len} matrices, found {}", rels.len()));
    }
    let mut groups = Vec::with_capacity(len);
    for (k, r) in rels.iter().enumerate() {
        let rm = matrix_from_json(r, gens[k], None, &format!("{path}.relations[{k}]"))?;
        groups.push(FpGroup::new(gens[k], rm));
    }
    let ds = array(field(m, "differentials", path)?, &format!("{path}.differentials"))?;
    if ds.len() != len.saturating_sub(1) {
        return err(&format!("{path}.differentials"), format!("expected {} matrices, found {}", len.saturating_sub(1), ds.len()));
    }
    let mut diffs = Vec::with_capacity(ds.len());
    for (k, d) in ds.iter().enumerate() {
        diffs.push(matrix_from_json(d, gens[k], Some(gens[k + 1]), &format!("{path}.differentials[{k}]"))?);
    }
    Ok(ChainComplex::from_parts(lo, groups, |n| diffs[(n - lo - 1) as usize].clone()))
}

// ---------------------------------------------------------------- maps

/// Components keyed by degree; degrees with an empty matrix are omitted.
pub fn map_to_json(f: &ChainMap) -> Value {
    let mut comps = Map::new();
    for n in f.degrees() {
        let m = f.comp(n);
        if m.rows() > 0 && m.cols() > 0 {
            comps.insert(n.to_string(), matrix_to_json(m));
        }
    }
    json!({ "components": comps })
}

/// Unchecked map between known complexes.
pub fn map_from_json(v: &Value, src: &ChainComplex, tgt: &ChainComplex, path: &str) -> Result<ChainMap, InputError> {
    let m = object(v, path)?;
    only_keys(m, &["components"], path)?;
    let cs = object(field(m, "components", path)?, &format!("{path}.components"))?;
    let mut comps = BTreeMap::new();
    for (k, val) in cs {
        let p = format!("{path}.components.{k}");
        let n: i64 = k.parse().or_else(|_| err(&p, "degree keys must be integers"))?;
        let mat = matrix_from_json(val, tgt.gens(n), Some(src.gens(n)), &p)?;
        if (tgt.gens(n) == 0 || src.gens(n) == 0) && !mat.is_zero() {
            return err(&p, "component outside the support");
        }
        comps.insert(n, mat);
    }
    Ok(ChainMap::from_fn(src, tgt, |n| comps.get(&n).cloned().unwrap_or_else(|| IntMatrix::zeros(tgt.gens(n), src.gens(n)))))
}

fn column(m: &ChainMap, t: i64, j: usize) -> Elem {
    let c = m.comp(t);
    Elem::new(t, (0..c.rows()).map(|r| c.get(r, j).clone()).collect())
}

// ---------------------------------------------------------------- entries

/// Category with the complex names its homs refer to.
#[derive(Clone, Debug)]
pub struct CategoryEntry {
    pub category: DgCategory,
    /// `hom[a][b]` names the complex `hom(a, b)`.
    pub hom: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct DiagramEntry {
    pub category: String,
    pub values: Vec<String>,
    pub diagram: Diagram,
}

#[derive(Clone, Debug)]
pub struct TransformationEntry {
    pub source: String,
    pub target: String,
    pub transformation: Transformation,
}

/// In-memory workspace; keys are sorted so serialization is canonical.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub complexes: BTreeMap<String, ChainComplex>,
    pub categories: BTreeMap<String, CategoryEntry>,
    pub diagrams: BTreeMap<String, DiagramEntry>,
    pub transformations: BTreeMap<String, TransformationEntry>,
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let v: Value = serde_json::from_str(text)
            .or_else(|e| err(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self, InputError> {
        let top = object(v, "$")?;
        only_keys(top, &["complexes", "categories", "diagrams", "transformations"], "$")?;
        let section = |key: &str| -> Result<Map<String, Value>, InputError> {
            match top.get(key) {
                None => Ok(Map::new()),
                Some(s) => object(s, &format!("$.{key}")).cloned(),
            }
        };
        let mut ws = Workspace::default();
        for (name, c) in section("complexes")? {
            let cx = complex_from_json(&c, &format!("$.complexes.{name}"))?;
            ws.complexes.insert(name, cx);
        }
        for (name, c) in section("categories")? {
            let e = ws.category_from_json(&c, &format!("$.categories.{name}"))?;
            ws.categories.insert(name, e);
        }
        for (name, d) in section("diagrams")? {
            let e = ws.diagram_from_json(&d, &format!("$.diagrams.{name}"))?;
            ws.diagrams.insert(name, e);
        }
        for (name, t) in section("transformations")? {
            let e = ws.transformation_from_json(&t, &format!("$.transformations.{name}"))?;
            ws.transformations.insert(name, e);
        }
        Ok(ws)
    }

    pub fn to_json(&self) -> Value {
        let complexes: Map<String, Value> = self.complexes.iter().map(|(k, c)| (k.clone(), complex_to_json(c))).collect();
        let categories: Map<String, Value> = self.categories.iter().map(|(k, c)| (k.clone(), category_to_json(c))).collect();
        let diagrams: Map<String, Value> = self.diagrams.iter().map(|(k, d)| (k.clone(), diagram_to_json(d))).collect();
        let transformations: Map<String, Value> =
            self.transformations.iter().map(|(k, t)| (k.clone(), transformation_to_json(t))).collect();
        json!({
            "complexes": complexes,
            "categories": categories,
            "diagrams": diagrams,
            "transformations": transformations,
        })
    }

    /// Canonical text: sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("workspace serializes");
        s.push('\n');
        s
    }

    fn complex_ref(&self, v: &Value, path: &str) -> Result<(String, ChainComplex), InputError> {
        let name = string(v, path)?;
        match self.complexes.get(name) {
            Some(c) => Ok((name.to_string(), c.clone())),
            None => err(path, format!("unknown complex {name:?}")),
        }
    }

    fn category_from_json(&self, v: &Value, path: &str) -> Result<CategoryEntry, InputError> {
        let m = object(v, path)?;
        only_keys(m, &["objects", "degrees", "hom", "units", "composition"], path)?;
        let names: Vec<String> = array(field(m, "objects", path)?, &format!("{path}.objects"))?
            .iter()
            .enumerate()
            .map(|(i, o)| string(o, &format!("{path}.objects[{i}]")).map(str::to_string))
            .collect::<Result<_, _>>()?;
        let n = names.len();
        if n == 0 {
            return err(&format!("{path}.objects"), "a category needs at least one object");
        }
        let degrees = match m.get("degrees") {
            None | Some(Value::Null) => None,
            Some(d) => {
                let ds = array(d, &format!("{path}.degrees"))?;
                if ds.len() != n {
                    return err(&format!("{path}.degrees"), format!("expected {n} degrees"));
                }
                Some(ds.iter().enumerate().map(|(i, x)| i64_from_json(x, &format!("{path}.degrees[{i}]"))).collect::<Result<Vec<_>, _>>()?)
            }
        };
        let hp = format!("{path}.hom");
        let rows = array(field(m, "hom", path)?, &hp)?;
        if rows.len() != n {
            return err(&hp, format!("expected {n} rows"));
        }
        let mut hom_names = Vec::with_capacity(n);
        let mut homs = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            let row = array(row, &format!("{hp}[{a}]"))?;
            if row.len() != n {
                return err(&format!("{hp}[{a}]"), format!("expected {n} entries"));
            }
            let mut names_a = Vec::with_capacity(n);
            for (b, r) in row.iter().enumerate() {
                let (name, c) = self.complex_ref(r, &format!("{hp}[{a}][{b}]"))?;
                names_a.push(name);
                homs.push(c);
            }
            hom_names.push(names_a);
        }
        let up = format!("{path}.units");
        let us = array(field(m, "units", path)?, &up)?;
        if us.len() != n {
            return err(&up, format!("expected {n} units"));
        }
        let mut units = Vec::with_capacity(n);
        for (c, u) in us.iter().enumerate() {
            let p = format!("{up}[{c}]");
            let entries = array(u, &p)?;
            let want = homs[c * n + c].gens(0);
            if entries.len() != want {
                return err(&p, format!("expected {want} coordinates in degree 0"));
            }
            units.push(Elem::new(0, entries.iter().enumerate().map(|(i, x)| int_from_json(x, &format!("{p}[{i}]"))).collect::<Result<_, _>>()?));
        }
        let cp = format!("{path}.composition");
        let comp = array(field(m, "composition", path)?, &cp)?;
        let mut maps = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let p = format!("{cp}[{a}][{b}][{c}]");
                    let v = comp
                        .get(a)
                        .and_then(|x| x.get(b))
                        .and_then(|x| x.get(c))
                        .map_or_else(|| err(&p, "missing composition map"), Ok)?;
                    let layout = TensorProduct::new(vec![homs[b * n + c].clone(), homs[a * n + b].clone()]);
                    let f = map_from_json(v, layout.complex(), &homs[a * n + c], &p)?;
                    maps.push((layout, f));
                }
            }
        }
        let category = DgCategory::from_generators(names, homs, units, degrees, |a, b, c, dl, i, dr, j| {
            let (layout, f) = &maps[(a * n + b) * n + c];
            let (t, flat) = layout.index(&[dl, dr], &[i, j]).expect("generator pair in layout");
            column(f, t, flat)
        });
        Ok(CategoryEntry { category, hom: hom_names })
    }

    fn diagram_from_json(&self, v: &Value, path: &str) -> Result<DiagramEntry, InputError> {
        let m = object(v, path)?;
        only_keys(m, &["category", "values", "actions"], path)?;
        let cat_name = string(field(m, "category", path)?, &format!("{path}.category"))?;
        let Some(cat) = self.categories.get(cat_name) else {
            return err(&format!("{path}.category"), format!("unknown category {cat_name:?}"));
        };
        let shape = &cat.category;
        let n = shape.n();
        let vp = format!("{path}.values");
        let vs = array(field(m, "values", path)?, &vp)?;
        if vs.len() != n {
            return err(&vp, format!("expected {n} values"));
        }
        let mut names = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for (i, x) in vs.iter().enumerate() {
            let (name, c) = self.complex_ref(x, &format!("{vp}[{i}]"))?;
            names.push(name);
            values.push(c);
        }
        let ap = format!("{path}.actions");
        let acts = array(field(m, "actions", path)?, &ap)?;
        let mut maps = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let p = format!("{ap}[{a}][{b}]");
                let v = acts.get(a).and_then(|x| x.get(b)).map_or_else(|| err(&p, "missing action map"), Ok)?;
                let layout = TensorProduct::new(vec![shape.hom(a, b).clone(), values[a].clone()]);
                let f = map_from_json(v, layout.complex(), &values[b], &p)?;
                maps.push((layout, f));
            }
        }
        let diagram = Diagram::from_fn(shape, values, |a, b, dl, i, dr, j| {
            let (layout, f) = &maps[a * n + b];
            let (t, flat) = layout.index(&[dl, dr], &[i, j]).expect("generator pair in layout");
            column(f, t, flat)
        });
        Ok(DiagramEntry { category: cat_name.to_string(), values: names, diagram })
    }

    fn transformation_from_json(&self, v: &Value, path: &str) -> Result<TransformationEntry, InputError> {
        let m = object(v, path)?;
        only_keys(m, &["source", "target", "components"], path)?;
        let mut ends = Vec::new();
        for key in ["source", "target"] {
            let p = format!("{path}.{key}");
            let name = string(field(m, key, path)?, &p)?;
            match self.diagrams.get(name) {
                Some(d) => ends.push((name.to_string(), d)),
                None => return err(&p, format!("unknown diagram {name:?}")),
            }
        }
        let (src, tgt) = (&ends[0].1, &ends[1].1);
        if src.category != tgt.category {
            return err(path, "source and target live on different categories");
        }
        let n = src.diagram.shape().n();
        let cp = format!("{path}.components");
        let cs = array(field(m, "components", path)?, &cp)?;
        if cs.len() != n {
            return err(&cp, format!("expected {n} components"));
        }
        let mut comps = Vec::with_capacity(n);
        for (c, x) in cs.iter().enumerate() {
            comps.push(map_from_json(x, src.diagram.value(c), tgt.diagram.value(c), &format!("{cp}[{c}]"))?);
        }
        let transformation =
            Transformation::from_gen_fn(&src.diagram, &tgt.diagram, |c, t, j| column(&comps[c], t, j));
        Ok(TransformationEntry { source: ends[0].0.clone(), target: ends[1].0.clone(), transformation })
    }

    // ------------------------------------------------------------ building

    /// Insert a complex, reusing an existing name if the same complex is
    /// already stored under `name`.
    pub fn add_complex(&mut self, name: &str, c: &ChainComplex) -> String {
        self.complexes.insert(name.to_string(), c.clone());
        name.to_string()
    }

    /// Insert a category, storing its homs as `<name>/hom/<a>/<b>`.
    pub fn add_category(&mut self, name: &str, cat: &DgCategory) {
        let mut hom = Vec::new();
        for a in cat.objects() {
            let mut row = Vec::new();
            for b in cat.objects() {
                row.push(self.add_complex(&format!("{name}/hom/{}/{}", cat.name(a), cat.name(b)), cat.hom(a, b)));
            }
            hom.push(row);
        }
        self.categories.insert(name.to_string(), CategoryEntry { category: cat.clone(), hom });
    }

    /// Insert a diagram over an already stored category; values become
    /// `<name>/<object>`.
    pub fn add_diagram(&mut self, name: &str, category: &str, x: &Diagram) -> Result<(), InputError> {
        let Some(cat) = self.categories.get(category) else {
            return err(name, format!("unknown category {category:?}"));
        };
        if &cat.category != x.shape() {
            return err(name, format!("diagram does not live on category {category:?}"));
        }
        let shape = x.shape().clone();
        let values = shape.objects().map(|c| self.add_complex(&format!("{name}/{}", shape.name(c)), x.value(c))).collect();
        self.diagrams.insert(name.to_string(), DiagramEntry { category: category.to_string(), values, diagram: x.clone() });
        Ok(())
    }

    pub fn add_transformation(&mut self, name: &str, source: &str, target: &str, t: &Transformation) -> Result<(), InputError> {
        for d in [source, target] {
            if !self.diagrams.contains_key(d) {
                return err(name, format!("unknown diagram {d:?}"));
            }
        }
        self.transformations.insert(
            name.to_string(),
            TransformationEntry { source: source.to_string(), target: target.to_string(), transformation: t.clone() },
        );
        Ok(())
    }

    /// Structural checks beyond shapes: `d∘d = 0`, category axioms,
    /// action axioms and naturality. One entry per failing object.
    pub fn validate(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (k, c) in &self.complexes {
            if let Err(e) = c.validate() {
                out.push((format!("complex {k}"), e.to_string()));
            }
        }
        for (k, c) in &self.categories {
            if let Err(e) = c.category.validate() {
                out.push((format!("category {k}"), e.to_string()));
            }
        }
        for (k, d) in &self.diagrams {
            if let Err(e) = d.diagram.validate() {
                out.push((format!("diagram {k}"), e.to_string()));
            }
        }
        for (k, t) in &self.transformations {
            if let Err(e) = t.transformation.validate() {
                out.push((format!("transformation {k}"), e.to_string()));
            }
        }
        out
    }
}

fn category_to_json(e: &CategoryEntry) -> Value {
    let cat = &e.category;
    let n = cat.n();
    let composition: Vec<Value> = (0..n)
        .map(|a| {
            Value::Array(
                (0..n)
                    .map(|b| Value::Array((0..n).map(|c| map_to_json(&cat.comp(a, b, c).map)).collect()))
                    .collect(),
            )
        })
        .collect();
    let mut m = Map::new();
    m.insert("objects".into(), json!(cat.names()));
    if let Some(d) = cat.degrees() {
        m.insert("degrees".into(), json!(d));
    }
    m.insert("hom".into(), json!(e.hom));
    m.insert("units".into(), Value::Array(cat.objects().map(|c| Value::Array(cat.unit(c).v.iter().map(int_to_json).collect())).collect()));
    m.insert("composition".into(), Value::Array(composition));
    Value::Object(m)
}

fn diagram_to_json(e: &DiagramEntry) -> Value {
    let x = &e.diagram;
    let n = x.shape().n();
    let actions: Vec<Value> =
        (0..n).map(|a| Value::Array((0..n).map(|b| map_to_json(&x.action(a, b).map)).collect())).collect();
    json!({ "category": e.category, "values": e.values, "actions": actions })
}

fn transformation_to_json(e: &TransformationEntry) -> Value {
    json!({
        "source": e.source,
        "target": e.target,
        "components": e.transformation.components().iter().map(map_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hocolim::dgcat::OrdinaryCategory;

    fn sample() -> Workspace {
        let mut ws = Workspace::default();
        ws.add_complex("res2", &ChainComplex::two_term(0, 2));
        ws.add_complex("big", &ChainComplex::two_term(0, 1 << 60));
        let cat = DgCategory::group_ring_cyclic(2);
        ws.add_category("C2", &cat);
        let x = Diagram::constant_linear(&cat, &ChainComplex::unit());
        ws.add_diagram("triv", "C2", &x).unwrap();
        ws.add_transformation("id", "triv", "triv", &Transformation::identity(&x)).unwrap();
        let p = OrdinaryCategory::poset(1).linearize();
        ws.add_category("arrow", &p);
        ws
    }

    #[test]
    fn round_trip_is_canonical() {
        let ws = sample();
        let text = ws.to_canonical_string();
        let back = Workspace::parse(&text).unwrap();
        assert_eq!(back.to_canonical_string(), text);
        assert!(back.validate().is_empty());
        assert_eq!(back.categories["C2"].category, ws.categories["C2"].category);
        assert!(back.diagrams["triv"].diagram.same_as(&ws.diagrams["triv"].diagram));
    }

    #[test]
    fn big_integers_are_strings() {
        let text = sample().to_canonical_string();
        assert!(text.contains("\"1152921504606846976\""));
        assert_eq!(int_to_json(&Int::from(7)), json!(7));
        assert_eq!(int_from_json(&json!("-123456789012345678901234567890"), "x").unwrap().to_string(), "-123456789012345678901234567890");
        assert!(int_from_json(&json!(1.5), "x").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = Workspace::parse("{\"complexes\": [").unwrap_err();
        assert!(e.path.starts_with("line 1"));
        let e = Workspace::parse(r#"{"complexes": {"a": {"support": [0, 1], "gens": [1], "relations": [], "differentials": []}}}"#)
            .unwrap_err();
        assert_eq!(e.path, "$.complexes.a.gens");
    }

    #[test]
    fn broken_differential_is_reported_by_degree() {
        let text = r#"{"complexes": {"bad": {"support": [0, 2], "gens": [1, 1, 1],
            "relations": [[[]], [[]], [[]]], "differentials": [[[1]], [[1]]]}}}"#;
        let ws = Workspace::parse(text).unwrap();
        let v = ws.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].1.contains("degree"), "{v:?}");
    }
}
