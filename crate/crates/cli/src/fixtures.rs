//! Example workspaces shipped under `fixtures/`.

use hocolim::chainz;
use hocolim::dgcat::DgCategory;
use hocolim::diagram::{Diagram, Transformation};
use hocolim::{ChainComplex, Elem, FpGroup};

use crate::workspace::Workspace;

/// `c0 -> c1` with hom `Z`, `X(c0) = Z/2`, `X(c1) = Z/4` and the generator
/// acting by `1 ↦ 2`.
pub fn two_object() -> Workspace {
    let shape = DgCategory::arrow_with_hom(ChainComplex::unit());
    let values = vec![
        ChainComplex::concentrated(0, FpGroup::cyclic(2)),
        ChainComplex::concentrated(0, FpGroup::cyclic(4)),
    ];
    let x = Diagram::new(&shape, values, |a, b, _, _, _, _| {
        Elem::new(0, vec![if a == b { 1 } else { 2 }.into()])
    })
    .expect("Z/2 -> Z/4 is a diagram");
    let mut ws = Workspace::default();
    ws.add_category("arrow", &shape);
    ws.add_diagram("X", "arrow", &x).expect("category present");
    ws
}

/// `Z[C2]` with trivial `Z` as a diagram and as a weight.
pub fn group_ring() -> Workspace {
    let shape = DgCategory::group_ring_cyclic(2);
    let op = shape.opposite();
    let mut ws = Workspace::default();
    ws.add_category("C2", &shape);
    ws.add_category("C2op", &op);
    ws.add_diagram("X", "C2", &Diagram::constant_linear(&shape, &ChainComplex::unit())).expect("category present");
    ws.add_diagram("W", "C2op", &Diagram::constant_linear(&op, &ChainComplex::unit())).expect("category present");
    ws
}

/// The unit category with the weight `Z/2` and the weak equivalence
/// `(Z --2--> Z) -> Z/2` between constant diagrams.
pub fn torsion_weight() -> Workspace {
    let shape = DgCategory::unit_category();
    let op = shape.opposite();
    let f = chainz::torsion_resolution(2, 0);
    let x = Diagram::constant_linear(&shape, f.src());
    let y = Diagram::constant_linear(&shape, f.tgt());
    let w = Diagram::constant_linear(&op, &ChainComplex::concentrated(0, FpGroup::cyclic(2)));
    let t = Transformation::new(&x, &y, vec![f]).expect("resolution is natural");
    let mut ws = Workspace::default();
    ws.add_category("unit", &shape);
    ws.add_category("unit_op", &op);
    ws.add_diagram("R", "unit", &x).expect("category present");
    ws.add_diagram("Z2", "unit", &y).expect("category present");
    ws.add_diagram("W", "unit_op", &w).expect("category present");
    ws.add_transformation("resolution", "R", "Z2", &t).expect("diagrams present");
    ws
}

/// File name and contents of every fixture.
pub fn all() -> Vec<(&'static str, Workspace)> {
    vec![("two_object.json", two_object()), ("group_ring.json", group_ring()), ("torsion_weight.json", torsion_weight())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn fixtures_match_their_generators() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        for (name, ws) in all() {
            assert!(ws.validate().is_empty(), "{name}");
            let text = ws.to_canonical_string();
            let path = dir.join(name);
            if std::env::var_os("HOCOLIM_WRITE_FIXTURES").is_some() {
                std::fs::create_dir_all(&dir).unwrap();
                std::fs::write(&path, &text).unwrap();
            }
            let stored = std::fs::read_to_string(&path).unwrap();
            assert_eq!(stored, text, "{name} is stale; regenerate with HOCOLIM_WRITE_FIXTURES=1");
            assert_eq!(Workspace::parse(&stored).unwrap().to_canonical_string(), stored);
        }
    }
}
