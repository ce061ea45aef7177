//! Property suites over the built-in corpus and a workspace's own objects.

use hocolim::bar::{self, Frame};
use hocolim::chainz;
use hocolim::corpus;
use hocolim::dgcat::DgCategory;
use hocolim::diagram::{self, Diagram, Transformation};
use hocolim::reedy::{self, ReedyStructure};
use hocolim::{ChainComplex, FpGroup, IntMatrix};

use crate::report::Check;
use crate::workspace::Workspace;

/// Named suites accepted by `verify`.
pub const SUITES: [&str; 5] = ["axioms", "reedy", "bar", "counterexample", "all"];

/// Instances per seeded property.
pub const INSTANCES: usize = 10;
/// Complexes in the base-category corpus.
pub const COMPLEXES: usize = 20;
/// Truncation used for contraction and for file diagrams in the bar suite.
pub const BAR_TRUNCATION: usize = 5;

fn summary(checked: usize, failures: &[String]) -> Option<String> {
    if failures.is_empty() {
        None
    } else {
        Some(format!("{} of {checked} failed; {}", failures.len(), failures.join("; ")))
    }
}

fn counted(name: &str, checked: usize, failures: Vec<String>) -> Check {
    let c = Check::from_failure(format!("{name} ({checked} instances)"), summary(checked, &failures));
    if c.pass {
        c.with_witness(format!("{checked} instances checked"))
    } else {
        c
    }
}

/// Structural validity of everything in the file.
pub fn file_checks(ws: &Workspace) -> Vec<Check> {
    let bad = ws.validate();
    let total = ws.complexes.len() + ws.categories.len() + ws.diagrams.len() + ws.transformations.len();
    let mut out: Vec<Check> = bad.into_iter().map(|(what, why)| Check::new(format!("{what} is well formed"), false).with_witness(why)).collect();
    if out.is_empty() {
        out.push(Check::new("workspace objects are well formed", true).with_witness(format!("{total} objects")));
    }
    out
}

// ---------------------------------------------------------------- axioms

/// Base-category axioms on seeded random complexes.
pub fn base_axioms(seed: u64) -> Vec<Check> {
    let rep = corpus::check_axioms(seed, COMPLEXES);
    vec![
        counted("2-out-of-3", rep.two_out_of_three.0, rep.two_out_of_three.1),
        counted("factorization h∘g = f, g cofibration, h weak equivalence", rep.factorization.0, rep.factorization.1),
        counted("cofibrations are stable under pushout", rep.pushout.0, rep.pushout.1),
        counted("cofibrations are closed under countable composites", rep.omega.0, rep.omega.1),
    ]
}

/// Comparison between coending after restriction and after extension.
pub fn coend_exchange(seed: u64, count: usize) -> Check {
    let mut r = corpus::rng(seed);
    let mut failures = Vec::new();
    for k in 0..count {
        let (alpha, w, x) = corpus::random_exchange_instance(&mut r);
        let label = format!("instance {k} ({:?} -> {:?})", alpha.src().names(), alpha.tgt().names());
        match diagram::coend_exchange(&alpha, &w, &x) {
            Ok(rep) if rep.well_defined && rep.isomorphism => {}
            Ok(rep) => failures.push(format!(
                "{label}: well defined {}, isomorphism {}, restricted {}, extended {}",
                rep.well_defined,
                rep.isomorphism,
                rep.restricted.homology(),
                rep.extended.homology()
            )),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    counted("coend exchange comparison is an isomorphism", count, failures)
}

/// Weighted colimits by flat weights preserve weak equivalences between
/// cellular diagrams.
pub fn left_quillen(seed: u64, count: usize) -> Check {
    let mut r = corpus::rng(seed);
    let cats = corpus::categories();
    let mut failures = Vec::new();
    for k in 0..count {
        let (name, shape) = &cats[k % cats.len()];
        let w = corpus::random_weight(&mut r, shape);
        let p = corpus::random_cell_presentation(&mut r, shape, 3);
        let (q, f) = corpus::trivial_extension(&mut r, &p);
        let label = format!("instance {k} over {name}");
        let flat = w.values().iter().all(|v| chainz::is_flat(v).flat);
        let certified = p.replay().is_ok() && q.replay().is_ok();
        if !flat || !certified || !f.is_pointwise_we() {
            failures.push(format!("{label}: hypotheses fail (flat {flat}, certified {certified})"));
            continue;
        }
        match diagram::weighted_colimit_map(&w, &f) {
            Ok(m) if m.is_weak_equivalence() => {}
            Ok(m) => failures.push(format!("{label}: {} vs {}", m.src().homology(), m.tgt().homology())),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    counted("flat weights preserve weak equivalences of cellular diagrams", count, failures)
}

/// The non-flat weight `Z/2` over the unit category and the weak
/// equivalence `(Z --2--> Z) -> Z/2`; the induced map must fail.
pub fn left_quillen_negative_control() -> Check {
    let shape = DgCategory::unit_category();
    let w = Diagram::constant_linear(&shape.opposite(), &ChainComplex::concentrated(0, FpGroup::cyclic(2)));
    let f = chainz::torsion_resolution(2, 0);
    let x = Diagram::constant_linear(&shape, f.src());
    let y = Diagram::constant_linear(&shape, f.tgt());
    let name = "non-flat weight Z/2 does not preserve (Z --2--> Z) -> Z/2";
    let t = match Transformation::new(&x, &y, vec![f.clone()]) {
        Ok(t) => t,
        Err(e) => return Check::new(name, false).with_witness(e.to_string()),
    };
    match diagram::weighted_colimit_map(&w, &t) {
        Ok(m) => {
            let preserved = m.is_weak_equivalence();
            let witness = format!("Z/2 ⊗ source: {}; Z/2 ⊗ target: {}", m.src().homology(), m.tgt().homology());
            Check::new(name, f.is_weak_equivalence() && !preserved).with_witness(witness)
        }
        Err(e) => Check::new(name, false).with_witness(e.to_string()),
    }
}

/// `pcm(X ⊗ Y) ≅ pcm(pcm X ⊗ pcm Y)` on seeded cubes with at most three
/// coordinates in total.
pub fn pcm_tensor(seed: u64, count: usize) -> Check {
    let mut r = corpus::rng(seed);
    let dims = [(1, 1), (1, 2), (2, 1), (3, 1), (1, 3), (2, 2)];
    let mut failures = Vec::new();
    for k in 0..count {
        let (p, q) = dims[k % dims.len()];
        let x = corpus::random_cube(&mut r, p);
        let y = corpus::random_cube(&mut r, q);
        let c = diagram::pcm_tensor_comparison(&x, &y);
        if !(c.isomorphism && c.commutes) {
            failures.push(format!("instance {k} ({p}+{q} coordinates): isomorphism {}, commutes {}", c.isomorphism, c.commutes));
        }
    }
    counted("pcm(X ⊗ Y) ≅ pcm(pcm X ⊗ pcm Y)", count, failures)
}

pub fn axioms(seed: u64) -> Vec<Check> {
    let mut out = base_axioms(seed);
    out.push(coend_exchange(seed, INSTANCES));
    out.push(left_quillen(seed, INSTANCES));
    out.push(left_quillen_negative_control());
    out.push(pcm_tensor(seed, INSTANCES + 2));
    out
}

// ---------------------------------------------------------------- reedy

pub fn reedy_decompositions() -> Check {
    let mut failures = Vec::new();
    let shapes = corpus::reedy_shapes();
    for (name, r) in &shapes {
        if let Err(e) = r.check_decompositions() {
            failures.push(format!("{name}: {e}"));
        }
    }
    counted("Reedy decomposition is an isomorphism", shapes.len(), failures)
}

pub fn reedy_skeleta() -> Check {
    let mut failures = Vec::new();
    let mut checked = 0;
    let m = ChainComplex::two_term(0, 2);
    for (name, r) in corpus::reedy_shapes() {
        for cp in r.shape().objects() {
            let x = Diagram::representable(r.shape(), cp).tensor_complex(&m);
            for n in -1..=r.max_degree() {
                checked += 1;
                match reedy::skeleton_check(&r, &x, n) {
                    Ok(rep) if rep.passed() => {}
                    Ok(rep) => failures.push(format!("{name}, C_{} ⊗ M, n = {n}: {}", r.shape().name(cp), rep.failures.join(", "))),
                    Err(e) => failures.push(format!("{name}, n = {n}: {e}")),
                }
            }
        }
    }
    counted("skeleton square is a pushout", checked, failures)
}

pub fn reedy_cells() -> Check {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, r) in corpus::reedy_shapes() {
        for c in r.shape().objects() {
            for cp in r.shape().objects() {
                checked += 1;
                match reedy::cells_flatness_check(&r, c, cp) {
                    Ok(rep) if rep.passed() => {}
                    Ok(rep) => failures.push(format!("{name}, c = {c}, c' = {cp}: {rep:?}")),
                    Err(e) => failures.push(format!("{name}, c = {c}, c' = {cp}: {e}")),
                }
            }
        }
    }
    counted("cells verdicts (iso for c' != c, pushout of 0 -> Z for c' = c)", checked, failures)
}

/// Latching maps of the bar construction are cofibrations for `n <= max_n`.
pub fn bar_latching(max_n: usize) -> Check {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut record = |name: &str, rep: bar::LatchingReport| {
        checked += 1;
        if let Some(s) = &rep.skipped {
            failures.push(format!("{name}, n = {}: skipped ({s})", rep.n));
        }
        for (seq, deg, why) in rep.failures.iter().take(3) {
            failures.push(format!("{name}, n = {}, sequence {seq:?}, degree {deg}: {why}", rep.n));
        }
    };
    for (name, r) in corpus::reedy_shapes() {
        for n in 0..=max_n {
            record(&name, bar::bar_reedy_latching_check(r.shape(), n));
            for c in r.shape().objects() {
                record(&format!("{name} at {}", r.shape().name(c)), bar::bar_c_latching_check(r.shape(), c, n));
            }
        }
    }
    counted(&format!("bar latching maps are cofibrations for n <= {max_n}"), checked, failures)
}

/// Direct replacement of every file diagram over a direct category.
pub fn file_replacements(ws: &Workspace) -> Vec<Check> {
    let mut out = Vec::new();
    for (name, e) in &ws.diagrams {
        let x = &e.diagram;
        if ReedyStructure::direct(x.shape()).is_err() || x.validate().is_err() {
            continue;
        }
        let label = format!("direct replacement of {name}");
        let check = match reedy::replace_direct(x, &[]).and_then(|r| r.verify(x, &[])) {
            Ok(v) if v.passed() => Check::new(label, true),
            Ok(v) => Check::new(label, false).with_witness(format!("{v:?}")),
            Err(e) => Check::new(label, false).with_witness(e.to_string()),
        };
        out.push(check);
    }
    out
}

pub fn reedy_suite(ws: &Workspace) -> Vec<Check> {
    let mut out = vec![reedy_decompositions(), reedy_skeleta(), reedy_cells(), bar_latching(4)];
    out.extend(file_replacements(ws));
    out
}

// ---------------------------------------------------------------- bar

/// Extra-degeneracy contraction of `B(C_c)` for every corpus object.
pub fn contraction(truncation: usize) -> Check {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, shape) in corpus::categories() {
        for c in shape.objects() {
            checked += 1;
            match bar::contraction_check(&shape, c, &ChainComplex::unit(), truncation) {
                Ok(rep) if rep.passed() => {}
                Ok(rep) => failures.push(format!("{name} at {}: {}", shape.name(c), rep.failure.unwrap_or_default())),
                Err(e) => failures.push(format!("{name} at {}: {e}", shape.name(c))),
            }
        }
    }
    let through = truncation as i64 - 2;
    counted("ε∘s = id and ∂h + h∂ = id − s∘ε on representables", checked, failures).with_safe_range(0, through)
}

/// `Z ⊗_{Z[C2]} (Z --0--> Z --2--> Z --0--> …)`, the periodic resolution
/// tensored down, truncated at `top`.
pub fn periodic_oracle(top: i64) -> ChainComplex {
    let ranks = vec![1; top as usize + 1];
    let diffs = (1..=top).map(|k| IntMatrix::from_i64_rows(1, &[&[if k % 2 == 0 { 2 } else { 0 }]])).collect();
    ChainComplex::free(0, &ranks, diffs).expect("periodic complex")
}

/// Group homology of `C2` from the bar replacement of trivial `Z`.
pub fn group_homology() -> Check {
    let name = "trivial weight ⊗ bar replacement of Z over Z[C2] has group homology";
    let shape = DgCategory::group_ring_cyclic(2);
    let x = Diagram::constant_linear(&shape, &ChainComplex::unit());
    let rep = match bar::bar_replacement(&x, 6) {
        Ok(r) => r,
        Err(e) => return Check::new(name, false).with_witness(e.to_string()),
    };
    let w = Diagram::constant_linear(&shape.opposite(), &ChainComplex::unit());
    let col = match diagram::weighted_colimit(&w, &rep.diagram) {
        Ok(c) => c,
        Err(e) => return Check::new(name, false).with_witness(e.to_string()),
    };
    let oracle = periodic_oracle(5);
    let got: Vec<String> = (0..=3).map(|n| col.homology_at(n).to_string()).collect();
    let want: Vec<String> = (0..=3).map(|n| oracle.homology_at(n).to_string()).collect();
    Check::new(name, got == want).with_witness(format!("degrees 0..3: {} (oracle {})", got.join(", "), want.join(", "))).with_safe_range(0, 3)
}

pub fn simplicial_identities() -> Check {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, shape) in corpus::categories().into_iter().take(6) {
        for c in shape.objects() {
            checked += 1;
            let x = Diagram::representable(&shape, c);
            match bar::BarComplex::new(&x, 4) {
                Ok(b) => {
                    if let Some(f) = b.simplicial_identity_failure(3) {
                        failures.push(format!("{name} at {}: {f}", shape.name(c)));
                    }
                }
                Err(e) => failures.push(format!("{name}: {e}")),
            }
        }
    }
    counted("bar faces and degeneracies satisfy the simplicial identities", checked, failures)
}

pub fn canonical_frame() -> Check {
    let rep = Frame::canonical(&ChainComplex::two_term(0, 3), 3).check();
    Check::new("canonical frame on Z --3--> Z", rep.passed()).with_witness(format!("{rep:?}"))
}

/// Largest bar realization built for a file diagram.
pub const FILE_BAR_BUDGET: usize = 20_000;

/// Bar replacement of every file diagram with non-negatively graded homs,
/// skipping those whose realization exceeds [`FILE_BAR_BUDGET`] generators.
pub fn file_bar_replacements(ws: &Workspace, truncation: usize) -> Vec<Check> {
    let mut out = Vec::new();
    for (name, e) in &ws.diagrams {
        if e.diagram.validate().is_err() {
            continue;
        }
        let label = format!("bar augmentation of {name} is a weak equivalence");
        let shift = e.diagram.values().iter().filter(|v| !v.is_empty()).map(|v| -v.lo()).max().unwrap_or(0).max(0);
        let shifted = bar::shift_diagram(&e.diagram, shift);
        if let Ok(b) = bar::BarComplex::new(&shifted, truncation) {
            if b.size() > FILE_BAR_BUDGET {
                out.push(Check::new(label, true).with_witness(format!("skipped: {} generators exceed the budget of {FILE_BAR_BUDGET}", b.size())));
                continue;
            }
        }
        match bar::bar_replacement(&e.diagram, truncation) {
            Ok(r) => {
                let k = r.safe_degree;
                let c = match r.we_failure() {
                    None => Check::new(label, true),
                    Some(o) => Check::new(label, false).with_witness(format!("object {}", e.diagram.shape().name(o))),
                };
                out.push(c.with_safe_range(-r.shift, k - r.shift));
            }
            Err(bar::BarError::NegativeHom { .. }) => {}
            Err(err) => out.push(Check::new(label, false).with_witness(err.to_string())),
        }
    }
    out
}

pub fn bar_suite(ws: &Workspace) -> Vec<Check> {
    let mut out = vec![contraction(BAR_TRUNCATION), group_homology(), simplicial_identities(), canonical_frame()];
    out.extend(file_bar_replacements(ws, BAR_TRUNCATION));
    out
}

// ---------------------------------------------------------------- counterexample

pub fn counterexample() -> Vec<Check> {
    let rep = bar::counterexample_z2();
    let mut out: Vec<Check> =
        rep.steps.iter().map(|s| Check::new(format!("step: {}", s.name), s.pass).with_witness(s.witness.clone())).collect();
    out.push(Check::new("conclusion", rep.passed()).with_witness(rep.conclusion));
    out
}

/// All checks of a named suite, file validation first.
pub fn run(ws: &Workspace, suite: &str, seed: u64) -> Option<Vec<Check>> {
    let mut out = file_checks(ws);
    match suite {
        "axioms" => out.extend(axioms(seed)),
        "reedy" => out.extend(reedy_suite(ws)),
        "bar" => out.extend(bar_suite(ws)),
        "counterexample" => out.extend(counterexample()),
        "all" => {
            out.extend(axioms(seed));
            out.extend(reedy_suite(ws));
            out.extend(bar_suite(ws));
            out.extend(counterexample());
        }
        _ => return None,
    }
    Some(out)
}
