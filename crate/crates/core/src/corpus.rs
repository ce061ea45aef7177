//! Seeded corpus: random free complexes and chain maps, small categories,
//! Reedy shapes, cellular diagrams, weights, cubes and exchange instances,
//! plus the base-category axiom suite run over it.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chainz::{self, ChainComplex, ChainMap, Elem, FpGroup};
use crate::dgcat::{DgCategory, DgFunctor, MonotoneKind, OrdinaryCategory};
use crate::diagram::{CellPresentation, Cube, Diagram, Transformation};
use crate::reedy::ReedyStructure;
use crate::{Int, IntMatrix};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- complexes

/// Random unimodular matrix and its inverse.
fn unimodular(rng: &mut CorpusRng, n: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            u = u.scale(&Int::from(-1));
            v = v.scale(&Int::from(-1));
        }
        return (u, v);
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let a = Int::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        // u <- (I + a e_ij) u, v <- v (I - a e_ij)
        for c in 0..n {
            let x = u.get(j, c) * &a + u.get(i, c);
            u.set(i, c, x);
        }
        for r in 0..n {
            let x = v.get(r, j) - v.get(r, i) * &a;
            v.set(r, j, x);
        }
    }
    (u, v)
}

/// Random bounded degreewise free complex with ranks `<= max_rank` in
/// degrees `lo..=hi`: a sum of spheres and disks `Z --m--> Z` seen through
/// a random change of basis in each degree.
pub fn random_complex(rng: &mut CorpusRng, max_rank: usize, lo: i64, hi: i64) -> ChainComplex {
    let len = (hi - lo + 1) as usize;
    let mut ranks = vec![0usize; len];
    // disks[k] = multipliers of disks from degree lo+k+1 to lo+k
    let mut disks: Vec<Vec<i64>> = vec![Vec::new(); len];
    for k in 0..len.saturating_sub(1) {
        let count = rng.gen_range(0..=2usize);
        for _ in 0..count {
            if ranks[k] < max_rank && ranks[k + 1] < max_rank {
                disks[k].push([1, 1, 2, 3, -1][rng.gen_range(0..5)]);
                ranks[k] += 1;
                ranks[k + 1] += 1;
            }
        }
    }
    let mut spheres = vec![0usize; len];
    for k in 0..len {
        let room = max_rank - ranks[k];
        spheres[k] = rng.gen_range(0..=room.min(2));
        ranks[k] += spheres[k];
    }
    if ranks.iter().all(|&r| r == 0) {
        spheres[0] = 1;
        ranks[0] = 1;
    }
    // generator order in degree lo+k: disk bottoms, spheres, disk tops
    let bases: Vec<(IntMatrix, IntMatrix)> = ranks.iter().map(|&r| unimodular(rng, r)).collect();
    let groups = ranks.iter().map(|&r| FpGroup::free(r)).collect();
    ChainComplex::from_parts(lo, groups, |t| {
        let k = (t - lo) as usize;
        let (rows, cols) = (ranks[k - 1], ranks[k]);
        let mut d = IntMatrix::zeros(rows, cols);
        let top_start = disks.get(k).map_or(0, |v| v.len()) + spheres[k];
        for (j, &m) in disks[k - 1].iter().enumerate() {
            d.set(j, top_start + j, Int::from(m));
        }
        &(&bases[k - 1].0 * &d) * &bases[k].1
    })
}

/// Random chain map `X -> Y` between free complexes: a random integer
/// combination of a basis of the degree-zero cycles of `Hom(X, Y)`.
pub fn random_chain_map(rng: &mut CorpusRng, x: &ChainComplex, y: &ChainComplex) -> ChainMap {
    if x.is_empty() || y.is_empty() {
        return ChainMap::zero(x, y);
    }
    let lo = x.lo().min(y.lo());
    let hi = x.hi().max(y.hi());
    let mut offsets = std::collections::BTreeMap::new();
    let mut vars = 0;
    for n in lo..=hi {
        offsets.insert(n, vars);
        vars += y.gens(n) * x.gens(n);
    }
    let var = |n: i64, r: usize, c: usize| offsets[&n] + r * x.gens(n) + c;
    let mut eqs: Vec<Vec<(usize, Int)>> = Vec::new();
    for n in lo..=hi {
        let (dx, dy) = (x.d(n), y.d(n));
        for r in 0..y.gens(n - 1) {
            for c in 0..x.gens(n) {
                let mut eq = Vec::new();
                // (d^Y f_n)_{rc} - (f_{n-1} d^X)_{rc}
                for k in 0..y.gens(n) {
                    if r < dy.rows() && k < dy.cols() && !dy.get(r, k).is_zero() {
                        eq.push((var(n, k, c), dy.get(r, k).clone()));
                    }
                }
                for k in 0..x.gens(n - 1) {
                    if k < dx.rows() && c < dx.cols() && !dx.get(k, c).is_zero() {
                        eq.push((var(n - 1, r, k), -dx.get(k, c)));
                    }
                }
                if !eq.is_empty() {
                    eqs.push(eq);
                }
            }
        }
    }
    let mut a = IntMatrix::zeros(eqs.len(), vars);
    for (i, eq) in eqs.iter().enumerate() {
        for (j, v) in eq {
            let cur = a.get(i, *j) + v;
            a.set(i, *j, cur);
        }
    }
    let kernel = if eqs.is_empty() { IntMatrix::identity(vars) } else { a.kernel_and_image().0 };
    let coeffs: Vec<Int> = (0..kernel.cols()).map(|_| Int::from(rng.gen_range(-2..=2))).collect();
    let f = kernel.mul_vec(&coeffs);
    ChainMap::from_fn(x, y, |n| {
        if n < lo || n > hi {
            return IntMatrix::zeros(y.gens(n), x.gens(n));
        }
        IntMatrix::from_fn(y.gens(n), x.gens(n), |r, c| f[var(n, r, c)].clone())
    })
}

/// `X -> X ⊕ D` for a disk `D = (Z --1--> Z)` placed at a random degree.
pub fn disk_inclusion(rng: &mut CorpusRng, x: &ChainComplex) -> (ChainMap, ChainMap) {
    let lo = if x.is_empty() { 0 } else { x.lo() };
    let hi = if x.is_empty() { 1 } else { x.hi().max(lo + 1) };
    let k = rng.gen_range(lo..hi);
    let disk = ChainComplex::two_term(k, 1);
    let (_, incl, proj) = chainz::direct_sum(&[x, &disk]);
    (incl[0].clone(), proj[0].clone())
}

/// `X -> X ⊕ Z[k]`.
pub fn sphere_inclusion(rng: &mut CorpusRng, x: &ChainComplex) -> ChainMap {
    let lo = if x.is_empty() { 0 } else { x.lo() };
    let hi = if x.is_empty() { 0 } else { x.hi() };
    let s = ChainComplex::concentrated(rng.gen_range(lo..=hi), FpGroup::free(1));
    chainz::direct_sum(&[x, &s]).1[0].clone()
}

/// Verdicts of the base-category axiom suite.
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub complexes: usize,
    pub two_out_of_three: (usize, Vec<String>),
    pub factorization: (usize, Vec<String>),
    pub pushout: (usize, Vec<String>),
    pub omega: (usize, Vec<String>),
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.two_out_of_three.1.is_empty()
            && self.factorization.1.is_empty()
            && self.pushout.1.is_empty()
            && self.omega.1.is_empty()
    }
}

/// Random complexes with ranks `<= 4` in degrees `0..=3`.
pub fn random_complexes(seed: u64, count: usize) -> Vec<ChainComplex> {
    let mut r = rng(seed);
    (0..count).map(|_| random_complex(&mut r, 4, 0, 3)).collect()
}

/// 2-out-of-3, factorization, pushout stability of cofibrations and
/// closure of cofibrations under countable composites, on `count` seeded
/// complexes.
pub fn check_axioms(seed: u64, count: usize) -> AxiomReport {
    let mut r = rng(seed);
    let xs: Vec<ChainComplex> = (0..count).map(|_| random_complex(&mut r, 4, 0, 3)).collect();
    let mut rep = AxiomReport { complexes: xs.len(), ..Default::default() };
    for (k, x) in xs.iter().enumerate() {
        let y = &xs[(k + 1) % xs.len()];
        let z = &xs[(k + 2) % xs.len()];

        // 2-out-of-3 over mixed random and structural maps
        let f = match k % 3 {
            0 => random_chain_map(&mut r, x, y),
            1 => disk_inclusion(&mut r, x).0,
            _ => ChainMap::identity(x),
        };
        let ft = f.tgt().clone();
        let g = match k % 4 {
            0 => random_chain_map(&mut r, &ft, z),
            1 => disk_inclusion(&mut r, &ft).0,
            2 if k % 3 == 1 => disk_inclusion_retraction(&f),
            _ => random_chain_map(&mut r, &ft, &ft),
        };
        let gf = f.then(&g);
        let we = [f.is_weak_equivalence(), g.is_weak_equivalence(), gf.is_weak_equivalence()];
        rep.two_out_of_three.0 += 1;
        if we.iter().filter(|&&b| b).count() == 2 {
            rep.two_out_of_three.1.push(format!("complex {k}: verdicts (f, g, gf) = {we:?}"));
        }

        // factorization
        let m = random_chain_map(&mut r, x, y);
        rep.factorization.0 += 1;
        match chainz::factorize(&m) {
            Ok(fac) => {
                let ok = fac.g.is_cofibration()
                    && fac.h.is_weak_equivalence()
                    && fac.g.then(&fac.h).equals_mod_relations(&m);
                if !ok {
                    rep.factorization.1.push(format!("complex {k}: h∘g = f with g cofibration, h WE fails"));
                }
            }
            Err(e) => rep.factorization.1.push(format!("complex {k}: {e}")),
        }

        // pushout of a cofibration along an arbitrary map
        let i = if k % 2 == 0 { chainz::factorize(&m).map(|f| f.g).unwrap_or_else(|_| sphere_inclusion(&mut r, x)) } else { sphere_inclusion(&mut r, x) };
        let along = random_chain_map(&mut r, x, z);
        let (_, _, jc) = chainz::pushout(&i, &along);
        rep.pushout.0 += 1;
        if !i.is_cofibration() || !jc.is_cofibration() {
            rep.pushout.1.push(format!("complex {k}: cobase change of a cofibration is not a cofibration"));
        }

        // composite of a chain of cofibrations, constant after three steps
        let mut cur = x.clone();
        let mut comp = ChainMap::identity(x);
        let mut ok = true;
        for step in 0..3 {
            let c = if (k + step) % 2 == 0 {
                sphere_inclusion(&mut r, &cur)
            } else {
                let t = random_chain_map(&mut r, &cur, y);
                chainz::factorize(&t).map(|f| f.g).unwrap_or_else(|_| disk_inclusion(&mut r, &cur).0)
            };
            ok &= c.is_cofibration();
            comp = comp.then(&c);
            cur = c.tgt().clone();
        }
        rep.omega.0 += 1;
        if !ok || !comp.is_cofibration() {
            rep.omega.1.push(format!("complex {k}: composite of cofibrations is not a cofibration"));
        }
    }
    rep
}

/// Retraction `X ⊕ D -> X` of a disk inclusion.
fn disk_inclusion_retraction(f: &ChainMap) -> ChainMap {
    let (x, s) = (f.src(), f.tgt());
    ChainMap::from_fn(s, x, |n| {
        let mut m = IntMatrix::zeros(x.gens(n), s.gens(n));
        m.paste(0, 0, &IntMatrix::identity(x.gens(n)));
        m
    })
}

// ---------------------------------------------------------------- shapes

/// Small categories: every hom free in degrees `>= 0`.
pub fn categories() -> Vec<(String, DgCategory)> {
    vec![
        ("unit".into(), DgCategory::unit_category()),
        ("Z[C2]".into(), DgCategory::group_ring_cyclic(2)),
        ("exterior".into(), DgCategory::exterior()),
        ("[1]".into(), OrdinaryCategory::poset(1).linearize()),
        ("[2]".into(), OrdinaryCategory::poset(2).linearize()),
        ("Δinj≤1".into(), OrdinaryCategory::simplex_category(1, MonotoneKind::Injective).linearize()),
        ("Δinj≤2".into(), OrdinaryCategory::simplex_category(2, MonotoneKind::Injective).linearize()),
        ("Δ≤1".into(), OrdinaryCategory::simplex_category(1, MonotoneKind::All).linearize()),
        ("arrow(Z^2 + Z[1])".into(), DgCategory::arrow_with_hom(ChainComplex::from_parts(0, vec![FpGroup::free(2), FpGroup::free(1)], |_| IntMatrix::zeros(2, 1)))),
    ]
}

/// Reedy shapes with at most three objects and degrees at most two.
pub fn reedy_shapes() -> Vec<(String, ReedyStructure)> {
    let direct = |oc: OrdinaryCategory| ReedyStructure::direct(&oc.linearize()).expect("direct shape");
    vec![
        ("[1]".into(), direct(OrdinaryCategory::poset(1))),
        ("[2]".into(), direct(OrdinaryCategory::poset(2))),
        ("Δinj≤2".into(), direct(OrdinaryCategory::simplex_category(2, MonotoneKind::Injective))),
        (
            "[1]^op".into(),
            ReedyStructure::inverse(&OrdinaryCategory::poset(1).linearize().opposite().with_degrees(vec![0, 1]))
                .expect("inverse shape"),
        ),
        ("Δ≤1".into(), ReedyStructure::simplex(1).expect("Reedy")),
        ("Δ≤2".into(), ReedyStructure::simplex(2).expect("Reedy")),
    ]
}

// ---------------------------------------------------------------- diagrams

fn cycle(rng: &mut CorpusRng, x: &ChainComplex, deg: i64) -> Vec<Int> {
    let n = x.gens(deg);
    if n == 0 {
        return Vec::new();
    }
    let d = x.d(deg);
    let k = if d.rows() == 0 || d.cols() == 0 { IntMatrix::identity(n) } else { d.kernel_and_image().0 };
    let coeffs: Vec<Int> = (0..k.cols()).map(|_| Int::from(rng.gen_range(-2..=2))).collect();
    k.mul_vec(&coeffs)
}

/// Inclusion of `Z[k-1]` as the bottom of the disk `Z[k] --1--> Z[k-1]`.
pub fn disk_boundary(k: i64) -> ChainMap {
    let s = ChainComplex::concentrated(k - 1, FpGroup::free(1));
    let d = ChainComplex::two_term(k - 1, 1);
    ChainMap::from_fn(&s, &d, |n| if n == k - 1 { IntMatrix::identity(1) } else { IntMatrix::zeros(d.gens(n), s.gens(n)) })
}

/// Cellular diagram: spheres and disks attached along random cycles.
pub fn random_cell_presentation(rng: &mut CorpusRng, shape: &DgCategory, cells: usize) -> CellPresentation {
    let mut p = CellPresentation::new(&Diagram::zero(shape));
    for _ in 0..cells {
        let c = rng.gen_range(0..shape.n());
        let k = rng.gen_range(0..=2i64);
        let xc = p.result().value(c).clone();
        let z = if k >= 1 { cycle(rng, &xc, k - 1) } else { Vec::new() };
        if k >= 1 && z.iter().any(|a| !a.is_zero()) {
            let bd = disk_boundary(k);
            let a = ChainMap::from_gen_fn(bd.src(), &xc, |t, _| Elem::new(t, z.clone()));
            p.attach(c, &bd, &a).expect("attaching along a cycle");
        } else {
            let s = ChainComplex::concentrated(k, FpGroup::free(1));
            p.attach(c, &ChainMap::from_zero(&s), &ChainMap::zero(&ChainComplex::zero(), &xc)).expect("attaching a sphere");
        }
    }
    p
}

/// Extend a cellular diagram by cells that do not change homology: either
/// a disk, or a sphere together with a disk killing it. Returns the
/// extended presentation and the inclusion, a pointwise weak equivalence.
pub fn trivial_extension(rng: &mut CorpusRng, p: &CellPresentation) -> (CellPresentation, Transformation) {
    let shape = p.result().shape().clone();
    let mut q = p.clone();
    let c = rng.gen_range(0..shape.n());
    let k = rng.gen_range(0..=1i64);
    let zero_into = |x: &ChainComplex| ChainMap::zero(&ChainComplex::zero(), x);
    let inclusion = if rng.gen_bool(0.5) {
        let d = ChainComplex::two_term(k, 1);
        q.attach(c, &ChainMap::from_zero(&d), &zero_into(q.result().value(c))).expect("disk").inclusion
    } else {
        let s = ChainComplex::concentrated(k, FpGroup::free(1));
        let at = q.attach(c, &ChainMap::from_zero(&s), &zero_into(q.result().value(c))).expect("sphere");
        let tp = chainz::TensorProduct::new(vec![shape.hom(c, c).clone(), s.clone()]);
        let g = at.cell.apply(c, &tp.tensor_elems(&[shape.unit(c), &Elem::basis(k, 1, 0)]));
        let bd = disk_boundary(k + 1);
        let a = ChainMap::from_gen_fn(bd.src(), q.result().value(c), |_, _| g.clone());
        let kill = q.attach(c, &bd, &a).expect("disk on the new sphere");
        at.inclusion.then(&kill.inclusion)
    };
    (q, inclusion)
}

/// Pointwise free weight on `shape^op`: corepresentables tensored with
/// random free complexes.
pub fn random_weight(rng: &mut CorpusRng, shape: &DgCategory) -> Diagram {
    let parts: Vec<Diagram> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let c = rng.gen_range(0..shape.n());
            let m = random_complex(rng, 2, 0, 1);
            Diagram::corepresentable(shape, c).tensor_complex(&m)
        })
        .collect();
    let refs: Vec<&Diagram> = parts.iter().collect();
    Diagram::direct_sum(&shape.opposite(), &refs).0
}

/// Free diagram on `shape`: representables tensored with random free complexes.
pub fn random_free_diagram(rng: &mut CorpusRng, shape: &DgCategory) -> Diagram {
    let parts: Vec<Diagram> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let c = rng.gen_range(0..shape.n());
            let m = random_complex(rng, 2, 0, 1);
            Diagram::representable(shape, c).tensor_complex(&m)
        })
        .collect();
    let refs: Vec<&Diagram> = parts.iter().collect();
    Diagram::direct_sum(shape, &refs).0
}

/// `α: C -> D`, a weight on `D^op` and a diagram on `C`.
pub fn random_exchange_instance(rng: &mut CorpusRng) -> (DgFunctor, Diagram, Diagram) {
    let cats = categories();
    let d = cats[rng.gen_range(0..cats.len())].1.clone();
    let alpha = match rng.gen_range(0..3) {
        0 => DgFunctor::identity(&d),
        1 => d.discrete().1,
        _ => {
            let mut objs: Vec<usize> = d.objects().filter(|_| rng.gen_bool(0.5)).collect();
            if objs.is_empty() {
                objs.push(rng.gen_range(0..d.n()));
            }
            d.full_subcategory(&objs).1
        }
    };
    let w = random_weight(rng, &d);
    let x = random_free_diagram(rng, alpha.src());
    (alpha, w, x)
}

// ---------------------------------------------------------------- cubes

/// Random chain map between small random free complexes.
pub fn random_arrow(rng: &mut CorpusRng) -> ChainMap {
    let x = random_complex(rng, 2, 0, 1);
    let y = random_complex(rng, 2, 0, 1);
    match rng.gen_range(0..3) {
        0 => ChainMap::from_zero(&y),
        1 => sphere_inclusion(rng, &x),
        _ => random_chain_map(rng, &x, &y),
    }
}

/// Random cube of the given dimension: a tensor product of arrows, or for
/// dimension two possibly the square of a composable pair.
pub fn random_cube(rng: &mut CorpusRng, dim: usize) -> Cube {
    if dim == 2 && rng.gen_bool(0.3) {
        let f = random_arrow(rng);
        let z = random_complex(rng, 2, 0, 1);
        let g = random_chain_map(rng, f.tgt(), &z);
        let vals = vec![f.src().clone(), f.tgt().clone(), f.tgt().clone(), z];
        return Cube::new(2, vals, |m, _| if m == 0 { f.clone() } else { g.clone() }).expect("square of a composable pair");
    }
    let mut cube = Cube::arrow(&random_arrow(rng));
    for _ in 1..dim {
        cube = cube.tensor(&Cube::arrow(&random_arrow(rng)));
    }
    cube
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_complexes_are_valid_and_bounded() {
        for c in random_complexes(7, 25) {
            c.validate().unwrap();
            assert!(c.lo() >= 0 && c.hi() <= 3);
            assert!(c.degrees().all(|t| c.gens(t) <= 4));
            assert!(c.is_cofibrant());
        }
    }

    #[test]
    fn random_maps_are_chain_maps() {
        let mut r = rng(3);
        for _ in 0..10 {
            let x = random_complex(&mut r, 3, 0, 2);
            let y = random_complex(&mut r, 3, 0, 2);
            random_chain_map(&mut r, &x, &y).validate().unwrap();
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        assert_eq!(random_complexes(11, 5), random_complexes(11, 5));
    }

    #[test]
    fn axioms_hold_on_the_corpus() {
        let rep = check_axioms(1, 20);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.complexes, 20);
    }

    #[test]
    fn cell_diagrams_and_trivial_extensions() {
        let mut r = rng(5);
        for (_, shape) in categories().into_iter().take(5) {
            let p = random_cell_presentation(&mut r, &shape, 3);
            p.result().validate().unwrap();
            p.replay().unwrap();
            let (q, f) = trivial_extension(&mut r, &p);
            q.replay().unwrap();
            f.validate().unwrap();
            assert!(f.is_pointwise_we());
        }
    }

    #[test]
    fn weights_and_cubes_validate() {
        let mut r = rng(9);
        for (_, shape) in categories().into_iter().take(5) {
            random_weight(&mut r, &shape).validate().unwrap();
            random_free_diagram(&mut r, &shape).validate().unwrap();
        }
        for dim in 1..=3 {
            let c = random_cube(&mut r, dim);
            assert_eq!(c.dim(), dim);
        }
    }
}
