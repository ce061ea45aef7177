//! One pass/fail line per acceptance criterion; exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use hocolim::chainz;
use hocolim::corpus;
use hocolim::diagram;
use hocolim::reedy::ReedyStructure;
use hocolim::{ChainComplex, GroupInvariants, Int, IntMatrix};
use hocolim_cli::commands::presentation_from_json;
use hocolim_cli::suites;
use hocolim_cli::{Check, Workspace};
use num_traits::{One, Zero};
use serde_json::Value;

const SEED: u64 = 1;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Runs the binary; returns exit status and stdout.
fn hocolim(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hocolim")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 report"))
}

fn json(text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| format!("report is not JSON: {e}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn checks_pass(cs: &[Check]) -> Result<(), String> {
    match cs.iter().find(|c| !c.pass) {
        Some(c) => Err(format!("{}: {}", c.name, c.witness.clone().unwrap_or_default())),
        None => Ok(()),
    }
}

/// Projection onto and section from a free basis of `Z^g / rels`, read off
/// the Smith form of the relations.
fn free_basis(c: &ChainComplex, n: i64) -> (IntMatrix, IntMatrix) {
    let g = c.gens(n);
    let rels = c.rels(n);
    if rels.cols() == 0 || g == 0 {
        return (IntMatrix::identity(g), IntMatrix::identity(g));
    }
    let snf = rels.smith_normal_form();
    let r = snf.d.iter().filter(|x| !x.is_zero()).count();
    assert!(snf.d.iter().all(|x| x.is_zero() || x.is_one() || *x == -Int::one()), "oracle needs free groups");
    (snf.u.submatrix(r..g, 0..g), snf.u_inv.submatrix(0..g, r..g))
}

fn product(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    if a.cols() == 0 {
        return IntMatrix::zeros(a.rows(), b.cols());
    }
    a.checked_mul(b).expect("composable")
}

/// Homology of a complex of free groups from invariant factors of the
/// boundaries in free bases: rank `dim ker d_n - rank d_{n+1}`, torsion the
/// non-unit invariant factors of `d_{n+1}`.
fn oracle_homology(c: &ChainComplex, n: i64) -> GroupInvariants {
    let free_d = |k: i64| {
        let (_, section) = free_basis(c, k);
        let (proj, _) = free_basis(c, k - 1);
        product(&product(&proj, c.d(k)), &section)
    };
    let rank = |m: &IntMatrix| if m.rows() == 0 || m.cols() == 0 { 0 } else { m.rank() };
    let dn = free_d(n);
    let dn1 = free_d(n + 1);
    let torsion = if dn1.rows() == 0 || dn1.cols() == 0 {
        Vec::new()
    } else {
        dn1.invariant_factors().into_iter().filter(|x| *x > Int::one()).collect()
    };
    GroupInvariants { rank: dn.cols() - rank(&dn) - rank(&dn1), torsion }
}

fn invariants(v: &Value) -> GroupInvariants {
    let rank = v["rank"].as_u64().unwrap_or(0) as usize;
    let torsion = v["torsion"].as_array().map(|a| a.iter().map(|t| Int::from(t.as_i64().unwrap_or(0))).collect()).unwrap_or_default();
    GroupInvariants { rank, torsion }
}

// ---------------------------------------------------------------- criteria

fn counterexample() -> Outcome {
    let (code, out) = hocolim(&["verify", "counterexample", "--format", "json"]);
    let rep = json(&out)?;
    let checks = rep["checks"].as_array().ok_or("no checks")?;
    let steps: Vec<&Value> = checks.iter().filter(|c| c["name"].as_str().is_some_and(|n| n.starts_with("step: "))).collect();
    ensure(steps.len() == 4, || format!("expected four steps, found {}", steps.len()))?;
    for s in &steps {
        ensure(s["pass"] == Value::Bool(true), || format!("{} failed: {}", s["name"], s["witness"]))?;
    }
    ensure(code == 0 && rep["pass"] == Value::Bool(true), || format!("exit {code}"))?;
    // End = Z/2: twice the unit vanishes while the unit does not
    let end = ChainComplex::concentrated(0, hocolim::FpGroup::cyclic(2));
    ensure(end.homology_at(0).torsion == vec![Int::from(2)], || "End is not Z/2".into())?;
    Ok("four steps pass, exit 0".into())
}

fn base_axioms() -> Outcome {
    let xs = corpus::random_complexes(SEED, suites::COMPLEXES);
    ensure(xs.len() >= 20, || "fewer than 20 complexes".into())?;
    for x in &xs {
        ensure(x.lo() >= 0 && x.hi() <= 3 && x.degrees().all(|n| x.gens(n) <= 4), || format!("out of bounds: {x:?}"))?;
    }
    // a weak equivalence induces equal homology; check the verdicts on random maps agree with it
    let mut r = corpus::rng(SEED + 100);
    let mut we = 0;
    for (k, x) in xs.iter().enumerate() {
        let (incl, _) = corpus::disk_inclusion(&mut r, x);
        let f = corpus::random_chain_map(&mut r, x, &xs[(k + 3) % xs.len()]);
        for g in [incl, f] {
            if g.is_weak_equivalence() {
                we += 1;
                for n in -1..=5 {
                    ensure(oracle_homology(g.src(), n) == oracle_homology(g.tgt(), n), || format!("complex {k}: verdict contradicts homology"))?;
                }
            }
        }
    }
    let cs = suites::base_axioms(SEED);
    checks_pass(&cs)?;
    Ok(format!("{} complexes, {} properties, {we} weak equivalences cross-checked", xs.len(), cs.len()))
}

fn direct_replacement() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out_path = dir.path().join("replaced.json");
    let input = fixture("two_object.json");
    let (code, out) = hocolim(&[
        "replace",
        input.to_str().unwrap(),
        "--diagram",
        "X",
        "--mode",
        "direct",
        "--format",
        "json",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    let rep = json(&out)?;
    ensure(code == 0 && rep["pass"] == Value::Bool(true), || format!("exit {code}: {out}"))?;
    let ws = Workspace::parse(&std::fs::read_to_string(&out_path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let g = &ws.diagrams.get("X.replacement").ok_or("no replacement")?.diagram;
    let want = [GroupInvariants::from_cyclic_orders(&[2]), GroupInvariants::from_cyclic_orders(&[4])];
    for (c, w) in want.iter().enumerate() {
        let v = g.value(c);
        ensure(v.is_cofibrant(), || format!("value at {c} is not free"))?;
        for n in v.degrees() {
            let h = oracle_homology(v, n);
            let expect = if n == 0 { w.clone() } else { GroupInvariants::zero() };
            ensure(h == expect, || format!("H{n} at object {c} is {h}, expected {expect}"))?;
        }
    }
    let base = &ws.diagrams.get("X.base").ok_or("no base")?.diagram;
    let p = presentation_from_json(&rep["result"]["presentation"], base).map_err(|e| e.to_string())?;
    ensure(p.replay().is_ok() && p.result().same_as(g), || "presentation does not replay to the replacement".into())?;
    let aug = &ws.transformations.get("X.augmentation").ok_or("no augmentation")?.transformation;
    ensure(aug.validate().is_ok() && aug.is_pointwise_we(), || "augmentation is not a pointwise weak equivalence".into())?;
    Ok(format!("pointwise homology (Z/2, Z/4), {} cells replayed, augmentation pointwise WE", p.cells().len()))
}

/// `Z ⊗_{Z[C2]}` of the periodic resolution `… --(t+1)--> Z[C2] --(t-1)--> Z[C2]`.
fn periodic_resolution_tensored(top: usize) -> ChainComplex {
    // t acts trivially on Z, so t - 1 becomes 0 and t + 1 becomes 2
    let diffs = (1..=top).map(|k| IntMatrix::from_i64_rows(1, &[&[if k % 2 == 1 { 0 } else { 2 }]])).collect();
    ChainComplex::free(0, &vec![1; top + 1], diffs).expect("periodic complex")
}

fn group_homology() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out_path = dir.path().join("bar.json");
    let input = fixture("group_ring.json");
    let (code, out) = hocolim(&[
        "replace",
        input.to_str().unwrap(),
        "--diagram",
        "X",
        "--mode",
        "bar",
        "--truncation",
        "6",
        "--format",
        "json",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    ensure(code == 0, || format!("replace exit {code}: {out}"))?;
    let (code, out) = hocolim(&["wcolim", out_path.to_str().unwrap(), "--weight", "W", "--diagram", "X.replacement", "--format", "json"]);
    ensure(code == 0, || format!("wcolim exit {code}: {out}"))?;
    let rep = json(&out)?;
    let table = rep["result"]["homology"].as_array().ok_or("no homology table")?;
    let oracle = periodic_resolution_tensored(5);
    let mut got = Vec::new();
    for n in 0..=3i64 {
        let row = table.iter().find(|r| r["degree"].as_i64() == Some(n)).ok_or(format!("no degree {n}"))?;
        let h = invariants(row);
        let want = oracle_homology(&oracle, n);
        ensure(h == want, || format!("H{n} = {h}, oracle {want}"))?;
        got.push(h.to_string());
    }
    Ok(format!("H0..H3 = {}", got.join(", ")))
}

fn reedy_suite() -> Outcome {
    let shapes = corpus::reedy_shapes();
    for (name, r) in &shapes {
        ensure(r.n() <= 3 && r.max_degree() <= 2, || format!("{name} is outside the corpus bounds"))?;
    }
    let cs = vec![suites::reedy_decompositions(), suites::reedy_skeleta(), suites::reedy_cells(), suites::bar_latching(4)];
    checks_pass(&cs)?;
    // the cells verdict for c' = c is the pushout of 0 -> Z: one new generator in degree 0
    let r = ReedyStructure::direct(&hocolim::dgcat::OrdinaryCategory::poset(1).linearize()).map_err(|e| e.to_string())?;
    let rep = hocolim::reedy::cells_flatness_check(&r, 1, 1).map_err(|e| e.to_string())?;
    ensure(rep.passed() && rep.unit_cokernel, || format!("{rep:?}"))?;
    Ok(format!("{} shapes: decompositions, skeleta, cells, bar latching n <= 4", shapes.len()))
}

fn coend_exchange() -> Outcome {
    let mut r = corpus::rng(SEED);
    let mut max_objects = 0;
    for k in 0..suites::INSTANCES {
        let (alpha, w, x) = corpus::random_exchange_instance(&mut r);
        max_objects = max_objects.max(alpha.tgt().n()).max(alpha.src().n());
        let rep = diagram::coend_exchange(&alpha, &w, &x).map_err(|e| e.to_string())?;
        ensure(rep.well_defined && rep.isomorphism, || format!("instance {k}: not an isomorphism"))?;
        ensure(rep.restricted.homology() == rep.extended.homology(), || format!("instance {k}: homology differs"))?;
        let inv = rep.comparison.inverse().ok_or(format!("instance {k}: no inverse"))?;
        ensure(rep.comparison.then(&inv).equals_mod_relations(&ChainMap::identity(&rep.restricted)), || format!("instance {k}: inverse fails"))?;
    }
    ensure(max_objects <= 3, || "instance with more than three objects".into())?;
    Ok(format!("{} instances, at most {max_objects} objects", suites::INSTANCES))
}

use hocolim::ChainMap;

fn left_quillen() -> Outcome {
    let positive = suites::left_quillen(SEED, suites::INSTANCES);
    checks_pass(std::slice::from_ref(&positive))?;
    let negative = suites::left_quillen_negative_control();
    checks_pass(std::slice::from_ref(&negative))?;
    let input = fixture("torsion_weight.json");
    let (code, out) = hocolim(&["wcolim", input.to_str().unwrap(), "--weight", "W", "--diagram", "R", "--check-quillen", "resolution", "--format", "json"]);
    let rep = json(&out)?;
    ensure(code == 1 && rep["pass"] == Value::Bool(false), || format!("negative control exit {code}"))?;
    // Z/2 ⊗ (Z --2--> Z) has H1 = Z/2 while Z/2 ⊗ Z/2 has none
    let f = chainz::torsion_resolution(2, 0);
    ensure(f.is_weak_equivalence(), || "the resolution is not a weak equivalence".into())?;
    let table = rep["result"]["homology"].as_array().ok_or("no homology table")?;
    let h1 = table.iter().find(|r| r["degree"].as_i64() == Some(1)).map(invariants).unwrap_or_default();
    ensure(h1 == GroupInvariants::from_cyclic_orders(&[2]), || format!("H1(W ⊗ R) = {h1}"))?;
    Ok(format!("{} flat pairs preserved; Z/2 weight breaks the resolution (exit 1)", suites::INSTANCES))
}

fn pcm_calculus() -> Outcome {
    let c = suites::pcm_tensor(SEED, 12);
    checks_pass(std::slice::from_ref(&c))?;
    // the corner map of the tensor of two arrows 0 -> Z is 0 -> Z
    let z = ChainComplex::unit();
    let a = diagram::Cube::arrow(&ChainMap::from_zero(&z));
    let cmp = diagram::pcm_tensor_comparison(&a, &a);
    ensure(cmp.isomorphism && cmp.comparison.src().total_gens() == 0, || "0 -> Z corner is wrong".into())?;
    Ok("12 seeded pairs of cubes, each with at most three coordinates".into())
}

fn contraction() -> Outcome {
    let c = suites::contraction(5);
    checks_pass(std::slice::from_ref(&c))?;
    ensure(c.safe_range == Some((0, 3)), || format!("safe range {:?}", c.safe_range))?;
    Ok(c.witness.unwrap_or_default())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("counterexample over End = Z/2", counterexample),
        ("base-category axioms on seeded complexes", base_axioms),
        ("direct replacement of Z/2 -> Z/4", direct_replacement),
        ("group homology of C2 from the bar replacement", group_homology),
        ("Reedy suite on the corpus shapes", reedy_suite),
        ("coend exchange isomorphism", coend_exchange),
        ("left Quillen weighted colimits and negative control", left_quillen),
        ("pcm of tensors of cubes", pcm_calculus),
        ("bar contraction on representables", contraction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name} ({msg}) [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
