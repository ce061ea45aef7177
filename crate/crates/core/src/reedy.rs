//! Reedy structures on finite dg-categories: decompositions, latching
//! objects, skeleta, and the inductive cofibrant replacement over direct
//! shapes.

use num_traits::Zero;
use thiserror::Error;

use crate::chainz::{self, parity, sign, ChainComplex, ChainError, ChainMap, Elem, SumLayout, TensorProduct};
use crate::dgcat::{monotone_maps, CatError, DgCategory, DgFunctor, MonotoneKind, OrdinaryCategory};
use crate::diagram::{
    coend_direct, coend_map, left_kan, pcm, CellPresentation, Coend, Cube, Diagram, DiagramError, Transformation,
};

#[derive(Debug, Clone, Error)]
pub enum ReedyError {
    #[error("not a Reedy structure: {0}")]
    NotReedy(String),
    #[error("decomposition {from}→{to} is not an isomorphism")]
    Decomposition { from: String, to: String },
    #[error("shape is not direct: {0}")]
    NotDirect(String),
    #[error("{0} is not an initial part")]
    NotInitial(String),
    #[error("shape is not locally flat at {0}")]
    NotLocallyFlat(String),
    #[error("object {object}: {reason}")]
    Precondition { object: String, reason: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Cat(#[from] CatError),
}

/// Summands of the decomposition kept for one pair of objects.
#[derive(Clone, Debug)]
struct Selection {
    ds: Vec<usize>,
    layout: SumLayout,
}

/// Sub-coproduct of the decomposition, chosen per `(c', d, c)`.
#[derive(Clone, Debug)]
pub struct SubHom {
    n: usize,
    sels: Vec<Selection>,
}

impl SubHom {
    /// Value at `(c', c)`.
    pub fn value(&self, cp: usize, c: usize) -> &ChainComplex {
        self.sels[cp * self.n + c].layout.complex()
    }

    pub fn summands(&self, cp: usize, c: usize) -> &[usize] {
        &self.sels[cp * self.n + c].ds
    }
}

/// Reedy structure: a degree function and wide subcategories `R+`, `R-`
/// with `Σ_d R+(d, c) ⊗ R-(c', d) ≅ R(c', c)` by composition.
#[derive(Clone, Debug)]
pub struct ReedyStructure {
    r: DgCategory,
    plus: DgFunctor,
    minus: DgFunctor,
    degrees: Vec<i64>,
    pieces: Vec<Vec<TensorProduct>>,
    layouts: Vec<SumLayout>,
    compose: Vec<ChainMap>,
    inverse: Vec<ChainMap>,
}

impl ReedyStructure {
    /// From inclusions `R+ -> R` and `R- -> R`, both identity on objects.
    pub fn new(plus: &DgFunctor, minus: &DgFunctor, degrees: Vec<i64>) -> Result<Self, ReedyError> {
        let r = plus.tgt().clone();
        let n = r.n();
        if minus.tgt() != &r || plus.src().n() != n || minus.src().n() != n || degrees.len() != n {
            return Err(ReedyError::NotReedy("subcategories must share the objects of R".into()));
        }
        if (0..n).any(|c| plus.obj(c) != c || minus.obj(c) != c) {
            return Err(ReedyError::NotReedy("subcategory inclusions must be identity on objects".into()));
        }
        plus.validate()?;
        minus.validate()?;
        plus.src().with_degrees(degrees.clone()).check_direct().map_err(|e| ReedyError::NotReedy(format!("R+: {e}")))?;
        minus
            .src()
            .with_degrees(degrees.clone())
            .opposite()
            .check_direct()
            .map_err(|e| ReedyError::NotReedy(format!("R- is not inverse: {e}")))?;
        let (p, m) = (plus.src(), minus.src());
        let mut pieces = Vec::with_capacity(n * n);
        let mut layouts = Vec::with_capacity(n * n);
        let mut compose = Vec::with_capacity(n * n);
        let mut inverse = Vec::with_capacity(n * n);
        for cp in 0..n {
            for c in 0..n {
                let tps: Vec<TensorProduct> =
                    (0..n).map(|d| TensorProduct::new(vec![p.hom(d, c).clone(), m.hom(cp, d).clone()])).collect();
                let layout = SumLayout::new(tps.iter().map(|t| t.complex().clone()).collect());
                let map = layout.map_from_fn(r.hom(cp, c), |d, t, i| {
                    let (degs, idx) = tps[d].unindex(t, i);
                    let f = plus.apply(d, c, &Elem::basis(degs[0], p.hom(d, c).gens(degs[0]), idx[0]));
                    let g = minus.apply(cp, d, &Elem::basis(degs[1], m.hom(cp, d).gens(degs[1]), idx[1]));
                    r.compose(cp, d, c, &f, &g)
                });
                map.validate()?;
                let inv = map.inverse().ok_or_else(|| ReedyError::Decomposition {
                    from: r.name(cp).to_string(),
                    to: r.name(c).to_string(),
                })?;
                pieces.push(tps);
                layouts.push(layout);
                compose.push(map);
                inverse.push(inv);
            }
        }
        let r = r.with_degrees(degrees.clone());
        Ok(ReedyStructure { r, plus: plus.clone(), minus: minus.clone(), degrees, pieces, layouts, compose, inverse })
    }

    /// Direct shape: `R+ = R`, `R-` discrete.
    pub fn direct(r: &DgCategory) -> Result<Self, ReedyError> {
        let degrees = r.degrees().ok_or_else(|| ReedyError::NotDirect("no degree function".into()))?.to_vec();
        Self::new(&DgFunctor::identity(r), &r.discrete().1, degrees)
    }

    /// Inverse shape: `R+` discrete, `R- = R`.
    pub fn inverse(r: &DgCategory) -> Result<Self, ReedyError> {
        let degrees = r.degrees().ok_or_else(|| ReedyError::NotReedy("no degree function".into()))?.to_vec();
        Self::new(&r.discrete().1, &DgFunctor::identity(r), degrees)
    }

    /// Linearization of an ordinary Reedy category given by predicates on
    /// morphism indices.
    pub fn from_ordinary(
        oc: &OrdinaryCategory,
        is_plus: impl Fn(usize) -> bool,
        is_minus: impl Fn(usize) -> bool,
    ) -> Result<Self, ReedyError> {
        let degrees = oc.degrees.clone().ok_or_else(|| ReedyError::NotReedy("no degree function".into()))?;
        let (sp, kp) = oc.subcategory(is_plus)?;
        let (sm, km) = oc.subcategory(is_minus)?;
        Self::new(&oc.linear_inclusion(&sp, &kp), &oc.linear_inclusion(&sm, &km), degrees)
    }

    /// `Δ≤n` with injections raising and surjections lowering degree.
    pub fn simplex(n: usize) -> Result<Self, ReedyError> {
        let oc = OrdinaryCategory::simplex_category(n, MonotoneKind::All);
        let mut maps = Vec::new();
        for a in 0..=n {
            for b in 0..=n {
                maps.extend(monotone_maps(a, b).into_iter().map(|phi| (b, phi)));
            }
        }
        let inj = |m: usize| maps[m].1.windows(2).all(|w| w[0] < w[1]);
        let surj = |m: usize| (0..=maps[m].0).all(|v| maps[m].1.contains(&v));
        Self::from_ordinary(&oc, inj, surj)
    }

    pub fn shape(&self) -> &DgCategory {
        &self.r
    }

    pub fn n(&self) -> usize {
        self.r.n()
    }

    pub fn degree(&self, c: usize) -> i64 {
        self.degrees[c]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn max_degree(&self) -> i64 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn plus(&self) -> &DgFunctor {
        &self.plus
    }

    pub fn minus(&self) -> &DgFunctor {
        &self.minus
    }

    /// Objects in `(degree, index)` order.
    pub fn order(&self) -> Vec<usize> {
        let mut o: Vec<usize> = self.r.objects().collect();
        o.sort_by_key(|&c| (self.degrees[c], c));
        o
    }

    /// `R-` has no non-identity morphisms.
    pub fn is_direct(&self) -> bool {
        let m = self.minus.src();
        m.objects().all(|a| m.objects().all(|b| a == b || m.hom(a, b).total_gens() == 0 || is_trivial(m.hom(a, b))))
    }

    /// Composition map `Σ_d R+(d, c) ⊗ R-(c', d) -> R(c', c)`.
    pub fn decomposition_map(&self, cp: usize, c: usize) -> &ChainMap {
        &self.compose[cp * self.n() + c]
    }

    pub fn decomposition_layout(&self, cp: usize, c: usize) -> &SumLayout {
        &self.layouts[cp * self.n() + c]
    }

    /// `f ⊗ g` in the summand of `d`.
    pub fn summand_elem(&self, cp: usize, d: usize, c: usize, f: &Elem, g: &Elem) -> Elem {
        let k = cp * self.n() + c;
        self.layouts[k].embed(d, &self.pieces[k][d].tensor_elems(&[f, g]))
    }

    pub fn decompose(&self, cp: usize, c: usize, x: &Elem) -> Elem {
        self.inverse[cp * self.n() + c].apply(x)
    }

    pub fn recompose(&self, cp: usize, c: usize, y: &Elem) -> Elem {
        self.compose[cp * self.n() + c].apply(y)
    }

    /// Every decomposition map is an exact isomorphism and the recorded
    /// inverse is two-sided.
    pub fn check_decompositions(&self) -> Result<(), ReedyError> {
        for cp in self.r.objects() {
            for c in self.r.objects() {
                let k = cp * self.n() + c;
                let (f, g) = (&self.compose[k], &self.inverse[k]);
                let ok = f.is_isomorphism()
                    && f.then(g).equals_mod_relations(&ChainMap::identity(f.src()))
                    && g.then(f).equals_mod_relations(&ChainMap::identity(f.tgt()));
                if !ok {
                    return Err(ReedyError::Decomposition { from: self.r.name(cp).into(), to: self.r.name(c).into() });
                }
            }
        }
        Ok(())
    }

    /// Sub-coproduct keeping `d` for `(c', c)` when `keep(c', d, c)`.
    pub fn sub_hom(&self, keep: impl Fn(usize, usize, usize) -> bool) -> SubHom {
        let n = self.n();
        let sels = (0..n * n)
            .map(|k| {
                let (cp, c) = (k / n, k % n);
                let ds: Vec<usize> = (0..n).filter(|&d| keep(cp, d, c)).collect();
                let layout = SumLayout::new(ds.iter().map(|&d| self.pieces[k][d].complex().clone()).collect());
                Selection { ds, layout }
            })
            .collect();
        SubHom { n, sels }
    }

    pub fn full_hom(&self) -> SubHom {
        self.sub_hom(|_, _, _| true)
    }

    /// Summands with `d ≠ c`.
    pub fn upper_boundary(&self) -> SubHom {
        self.sub_hom(|_, d, c| d != c)
    }

    /// Summands with `d ≠ c'`.
    pub fn lower_boundary(&self) -> SubHom {
        self.sub_hom(|cp, d, _| d != cp)
    }

    /// Summands with `|d| ≤ n`.
    pub fn skeleton_hom(&self, n: i64) -> SubHom {
        self.sub_hom(|_, d, _| self.degrees[d] <= n)
    }

    /// Full decomposition coordinates to the kept ones.
    pub fn restrict_to(&self, s: &SubHom, cp: usize, c: usize, full: &Elem) -> Elem {
        let k = cp * self.n() + c;
        let sel = &s.sels[k];
        let mut out = Elem::zero(full.deg, sel.layout.complex().gens(full.deg));
        for (i, &d) in sel.ds.iter().enumerate() {
            out.add_assign(&sel.layout.embed(i, &self.layouts[k].restrict(d, full)));
        }
        out
    }

    /// Kept coordinates to full decomposition coordinates.
    pub fn expand(&self, s: &SubHom, cp: usize, c: usize, y: &Elem) -> Elem {
        let k = cp * self.n() + c;
        let sel = &s.sels[k];
        let mut out = Elem::zero(y.deg, self.layouts[k].complex().gens(y.deg));
        for (i, &d) in sel.ds.iter().enumerate() {
            out.add_assign(&self.layouts[k].embed(d, &sel.layout.restrict(i, y)));
        }
        out
    }

    /// Underlying morphism of a kept element.
    pub fn morphism(&self, s: &SubHom, cp: usize, c: usize, y: &Elem) -> Elem {
        self.recompose(cp, c, &self.expand(s, cp, c, y))
    }

    /// `S(-, c)` as a weight on `R^op`.
    pub fn weight(&self, s: &SubHom, c: usize) -> Diagram {
        let r = &self.r;
        let values = r.objects().map(|cp| s.value(cp, c).clone()).collect();
        Diagram::from_fn(&r.opposite(), values, |c1, c2, dl, i, dr, j| {
            // φ ∈ R(c2, c1), element of S(c1, c)
            let phi = Elem::basis(dl, r.hom(c2, c1).gens(dl), i);
            let w = self.morphism(s, c1, c, &Elem::basis(dr, s.value(c1, c).gens(dr), j));
            let comp = r.compose(c2, c1, c, &w, &phi).scaled(&sign(parity(dl) && parity(dr)));
            self.restrict_to(s, c2, c, &self.decompose(c2, c, &comp))
        })
    }

    /// `S(c', -)` as a diagram on `R`.
    pub fn coweight(&self, s: &SubHom, cp: usize) -> Diagram {
        let r = &self.r;
        let values = r.objects().map(|c| s.value(cp, c).clone()).collect();
        Diagram::from_fn(r, values, |c1, c2, dl, i, dr, j| {
            let psi = Elem::basis(dl, r.hom(c1, c2).gens(dl), i);
            let w = self.morphism(s, cp, c1, &Elem::basis(dr, s.value(cp, c1).gens(dr), j));
            self.restrict_to(s, cp, c2, &self.decompose(cp, c2, &r.compose(cp, c1, c2, &psi, &w)))
        })
    }

    /// Inclusion of weights `S(-, c) -> T(-, c)` for `S ⊆ T`.
    pub fn weight_inclusion(&self, s: &SubHom, t: &SubHom, c: usize) -> Transformation {
        let (ws, wt) = (self.weight(s, c), self.weight(t, c));
        Transformation::from_gen_fn(&ws, &wt, |cp, deg, i| {
            let y = Elem::basis(deg, s.value(cp, c).gens(deg), i);
            self.restrict_to(t, cp, c, &self.expand(s, cp, c, &y))
        })
    }

    /// Inclusion `S(c', -) -> T(c', -)` for `S ⊆ T`.
    pub fn coweight_inclusion(&self, s: &SubHom, t: &SubHom, cp: usize) -> Transformation {
        let (ws, wt) = (self.coweight(s, cp), self.coweight(t, cp));
        Transformation::from_gen_fn(&ws, &wt, |c, deg, i| {
            let y = Elem::basis(deg, s.value(cp, c).gens(deg), i);
            self.restrict_to(t, cp, c, &self.expand(s, cp, c, &y))
        })
    }
}

fn is_trivial(c: &ChainComplex) -> bool {
    c.degrees().all(|t| c.group(t).is_trivial())
}

// ---------------------------------------------------------------- latching

/// Latching object `L_c X = ∂R^c ⊗_R X` and its latching map.
#[derive(Clone, Debug)]
pub struct LatchingData {
    pub object: usize,
    pub weight: Diagram,
    pub coend: Coend,
    pub map: ChainMap,
}

impl LatchingData {
    pub fn colimit(&self) -> &ChainComplex {
        self.coend.complex()
    }
}

pub fn latching(reedy: &ReedyStructure, x: &Diagram, c: usize) -> Result<LatchingData, ReedyError> {
    let b = reedy.upper_boundary();
    let weight = reedy.weight(&b, c);
    let coend = coend_direct(&weight, x)?;
    let map = coend.map_from_gens(x.value(c), |c1, w, xg| x.act(c1, c, &reedy.morphism(&b, c1, c, w), xg));
    Ok(LatchingData { object: c, weight, coend, map })
}

// ---------------------------------------------------------------- skeleta

/// `sk_n X = sk_n R ⊗_R X` with its comparison to `X`.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub n: i64,
    pub diagram: Diagram,
    pub comparison: Transformation,
    hom: SubHom,
    coends: Vec<Coend>,
}

impl Skeleton {
    pub fn coend(&self, c: usize) -> &Coend {
        &self.coends[c]
    }
}

pub fn skeleton(reedy: &ReedyStructure, x: &Diagram, n: i64) -> Result<Skeleton, ReedyError> {
    let r = reedy.shape();
    let hom = reedy.skeleton_hom(n);
    let coends = r.objects().map(|c| coend_direct(&reedy.weight(&hom, c), x)).collect::<Result<Vec<_>, _>>()?;
    let values = coends.iter().map(|k| k.complex().clone()).collect();
    let diagram = Diagram::from_fn(r, values, |c, e, dl, i, dr, j| {
        let psi = Elem::basis(dl, r.hom(c, e).gens(dl), i);
        let (c1, w, xg) = coends[c].locate(dr, j);
        let comp = r.compose(c1, c, e, &psi, &reedy.morphism(&hom, c1, c, &w));
        coends[e].class(c1, &reedy.restrict_to(&hom, c1, e, &reedy.decompose(c1, e, &comp)), &xg)
    });
    let comparison = Transformation::from_gen_fn(&diagram, x, |c, t, i| {
        let (c1, w, xg) = coends[c].locate(t, i);
        x.act(c1, c, &reedy.morphism(&hom, c1, c, &w), &xg)
    });
    Ok(Skeleton { n, diagram, comparison, hom, coends })
}

/// Verdicts on one stage of the skeletal filtration.
#[derive(Clone, Debug)]
pub struct SkeletonReport {
    pub n: i64,
    /// `(sk_n X)c -> Xc` is an isomorphism for `|c| ≤ n`.
    pub top_iso: bool,
    /// `(sk_{n-1} X)c ≅ L_c X` for `|c| = n`.
    pub latching_iso: bool,
    /// The skeleton square is a pushout at every object.
    pub pushout: bool,
    pub failures: Vec<String>,
}

impl SkeletonReport {
    pub fn passed(&self) -> bool {
        self.top_iso && self.latching_iso && self.pushout
    }
}

pub fn skeleton_check(reedy: &ReedyStructure, x: &Diagram, n: i64) -> Result<SkeletonReport, ReedyError> {
    let r = reedy.shape();
    let skn = skeleton(reedy, x, n)?;
    let skm = skeleton(reedy, x, n - 1)?;
    let mut failures = Vec::new();
    skn.diagram.validate()?;
    skn.comparison.validate()?;
    let mut top_iso = true;
    for c in r.objects().filter(|&c| reedy.degree(c) <= n) {
        if !skn.comparison.component(c).is_isomorphism() {
            top_iso = false;
            failures.push(format!("(sk_{n} X)({}) -> X({}) is not an isomorphism", r.name(c), r.name(c)));
        }
    }
    let level: Vec<usize> = r.objects().filter(|&c| reedy.degree(c) == n).collect();
    let up = reedy.upper_boundary();
    let low = reedy.lower_boundary();
    let full = reedy.full_hom();
    let mut latching_iso = true;
    let mut lats = Vec::new();
    for &c in &level {
        let lat = latching(reedy, x, c)?;
        let cmp = skm.coends[c].map_from_gens(lat.colimit(), |c1, w, xg| {
            lat.coend.class(c1, &reedy.restrict_to(&up, c1, c, &reedy.expand(&skm.hom, c1, c, w)), xg)
        });
        if !(cmp.validate().is_ok() && cmp.is_isomorphism()) {
            latching_iso = false;
            failures.push(format!("(sk_{} X)({}) is not the latching object", n - 1, r.name(c)));
        }
        lats.push(lat);
    }
    let mut pushout = true;
    for e in r.objects() {
        // per level object: pcm of (∂R_c(e) -> R(c, e)) ⊗ (L_c X -> X c)
        let mut corners = Vec::new();
        for (k, &c) in level.iter().enumerate() {
            let j = ChainMap::from_gen_fn(low.value(c, e), full.value(c, e), |t, i| {
                reedy.restrict_to(&full, c, e, &reedy.expand(&low, c, e, &Elem::basis(t, low.value(c, e).gens(t), i)))
            });
            let corner = pcm(&Cube::arrow(&j).tensor(&Cube::arrow(&lats[k].map)));
            corners.push((c, j, corner));
        }
        let tl = SumLayout::new(corners.iter().map(|k| k.2.colimit.clone()).collect());
        let bl = SumLayout::new(corners.iter().map(|k| k.2.map.tgt().clone()).collect());
        let left = tl.map_from_fn(bl.complex(), |s, t, i| {
            let y = corners[s].2.map.apply(&Elem::basis(t, corners[s].2.colimit.gens(t), i));
            bl.embed(s, &y)
        });
        let top = tl.map_from_fn(skm.diagram.value(e), |s, t, i| {
            let (c, j, corner) = &corners[s];
            let c = *c;
            let lat = &lats[s];
            let (mask, local) = corner.locate(t, i);
            let f0 = if mask & 1 == 0 { j.src() } else { j.tgt() };
            let f1 = if mask & 2 == 0 { lat.map.src() } else { lat.map.tgt() };
            let tp = TensorProduct::new(vec![f0.clone(), f1.clone()]);
            let (degs, idx) = tp.unindex(t, local);
            let a = Elem::basis(degs[0], f0.gens(degs[0]), idx[0]);
            let b = Elem::basis(degs[1], f1.gens(degs[1]), idx[1]);
            if mask & 2 == 0 {
                // r ⊗ [w ⊗ x] ↦ [(r ∘ w) ⊗ x]
                let rfull = if mask == 0 { reedy.expand(&low, c, e, &a) } else { a };
                let rm = reedy.recompose(c, e, &rfull);
                let mut out = Elem::zero(t, skm.diagram.value(e).gens(t));
                for (l, coef) in b.v.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    let (c1, w, xg) = lat.coend.locate(b.deg, l);
                    let comp = r.compose(c1, c, e, &rm, &reedy.morphism(&up, c1, c, &w));
                    let w2 = reedy.restrict_to(&skm.hom, c1, e, &reedy.decompose(c1, e, &comp));
                    out.add_assign(&skm.coends[e].class(c1, &w2, &xg).scaled(coef));
                }
                out
            } else {
                // r' ⊗ x ↦ [r' ⊗ x]
                skm.coends[e].class(c, &reedy.restrict_to(&skm.hom, c, e, &reedy.expand(&low, c, e, &a)), &b)
            }
        });
        let bottom = bl.map_from_fn(skn.diagram.value(e), |s, t, i| {
            let c = corners[s].0;
            let tp = TensorProduct::new(vec![full.value(c, e).clone(), x.value(c).clone()]);
            let (degs, idx) = tp.unindex(t, i);
            let rr = Elem::basis(degs[0], full.value(c, e).gens(degs[0]), idx[0]);
            let xg = Elem::basis(degs[1], x.value(c).gens(degs[1]), idx[1]);
            skn.coends[e].class(c, &reedy.restrict_to(&skn.hom, c, e, &rr), &xg)
        });
        let right = skm.coends[e].map_from_gens(skn.diagram.value(e), |c1, w, xg| {
            skn.coends[e].class(c1, &reedy.restrict_to(&skn.hom, c1, e, &reedy.expand(&skm.hom, c1, e, w)), xg)
        });
        let values = vec![
            tl.complex().clone(),
            skm.diagram.value(e).clone(),
            bl.complex().clone(),
            skn.diagram.value(e).clone(),
        ];
        let square = Cube::new(2, values, |m, i| match (m, i) {
            (0, 0) => top.clone(),
            (0, 1) => left.clone(),
            (1, 1) => right.clone(),
            _ => bottom.clone(),
        });
        match square {
            Ok(sq) if pcm(&sq).map.is_isomorphism() => {}
            Ok(_) => {
                pushout = false;
                failures.push(format!("skeleton square at {} is not a pushout", r.name(e)));
            }
            Err(err) => {
                pushout = false;
                failures.push(format!("skeleton square at {}: {err}", r.name(e)));
            }
        }
    }
    Ok(SkeletonReport { n, top_iso, latching_iso, pushout, failures })
}

// ---------------------------------------------------------------- cells flatness

/// Verdicts of the square `j^c ⊗_R j_{c'}` and its corner map.
#[derive(Clone, Debug)]
pub struct CellsReport {
    pub c: usize,
    pub c_prime: usize,
    pub skipped: Option<String>,
    /// Each corner of the coend square maps isomorphically to its
    /// sub-coproduct of `R(c', c)`.
    pub identifications: Vec<(String, bool)>,
    pub corner_iso: bool,
    pub corner_injective: bool,
    /// Cokernel of the corner map has the homology of `Z` in degree 0.
    pub unit_cokernel: bool,
    pub flat: bool,
}

impl CellsReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_none()
            && self.identifications.iter().all(|x| x.1)
            && self.flat
            && if self.c == self.c_prime { self.corner_injective && self.unit_cokernel } else { self.corner_iso }
    }
}

pub fn cells_flatness_check(reedy: &ReedyStructure, c: usize, cp: usize) -> Result<CellsReport, ReedyError> {
    let r = reedy.shape();
    let mut report = CellsReport {
        c,
        c_prime: cp,
        skipped: None,
        identifications: Vec::new(),
        corner_iso: false,
        corner_injective: false,
        unit_cokernel: false,
        flat: false,
    };
    let lf = r.is_locally_flat();
    if !lf.flat {
        let (a, b, _) = &lf.failures[0];
        report.skipped = Some(format!("hom {}→{} is not flat", r.name(*a), r.name(*b)));
        return Ok(report);
    }
    let (up, low, full) = (reedy.upper_boundary(), reedy.lower_boundary(), reedy.full_hom());
    let (wu, wf) = (reedy.weight(&up, c), reedy.weight(&full, c));
    let (xl, xf) = (reedy.coweight(&low, cp), reedy.coweight(&full, cp));
    let ju = reedy.weight_inclusion(&up, &full, c);
    let jl = reedy.coweight_inclusion(&low, &full, cp);
    ju.validate()?;
    jl.validate()?;
    let (iu, iff) = (Transformation::identity(&wu), Transformation::identity(&wf));
    let (il, ixf) = (Transformation::identity(&xl), Transformation::identity(&xf));
    let top = coend_map(&ju, &il)?;
    let left = coend_map(&iu, &jl)?;
    let right = coend_map(&iff, &jl)?;
    let bottom = coend_map(&ju, &ixf)?;
    let corners = [
        ("d ≠ c', d ≠ c", coend_direct(&wu, &xl)?, &up, &low, true),
        ("d ≠ c'", coend_direct(&wf, &xl)?, &full, &low, false),
        ("d ≠ c", coend_direct(&wu, &xf)?, &up, &full, false),
        ("all d", coend_direct(&wf, &xf)?, &full, &full, false),
    ];
    let preds: [&dyn Fn(usize) -> bool; 4] = [&|d| d != cp && d != c, &|d| d != cp, &|d| d != c, &|_| true];
    for (k, (name, co, sw, sx, _)) in corners.iter().enumerate() {
        let target = reedy.sub_hom(|_, d, _| preds[k](d));
        let kappa = co.map_from_gens(target.value(cp, c), |e, w, xg| {
            let m = r.compose(cp, e, c, &reedy.morphism(sw, e, c, w), &reedy.morphism(sx, cp, e, xg));
            reedy.restrict_to(&target, cp, c, &reedy.decompose(cp, c, &m))
        });
        let ok = kappa.validate().is_ok() && kappa.is_isomorphism();
        report.identifications.push((name.to_string(), ok));
    }
    let values: Vec<ChainComplex> = corners.iter().map(|k| k.1.complex().clone()).collect();
    let square = Cube::new(2, values, |m, i| match (m, i) {
        (0, 0) => top.clone(),
        (0, 1) => left.clone(),
        (1, 1) => right.clone(),
        _ => bottom.clone(),
    })?;
    let corner = pcm(&square);
    report.corner_iso = corner.map.is_isomorphism();
    report.corner_injective = corner.map.is_cofibration();
    let (coker, _) = corner.map.cokernel();
    report.unit_cokernel = coker.homology() == ChainComplex::unit().homology();
    report.flat = report.corner_injective && chainz::is_flat(&coker).flat;
    Ok(report)
}

// ---------------------------------------------------------------- relative cofibrancy

fn check_initial(shape: &DgCategory, part: &[usize]) -> Result<(), ReedyError> {
    for d in shape.objects().filter(|d| !part.contains(d)) {
        for &dp in part {
            if !is_trivial(shape.hom(d, dp)) {
                return Err(ReedyError::NotInitial(format!(
                    "{{{}}}: hom {}→{} is nonzero",
                    part.iter().map(|&o| shape.name(o)).collect::<Vec<_>>().join(","),
                    shape.name(d),
                    shape.name(dp)
                )));
            }
        }
    }
    Ok(())
}

/// `ι_!ι*F` for the inclusion of an initial part, equal to `F` there on
/// the nose, with its counit to `F`.
pub fn relative_base(f: &Diagram, part: &[usize]) -> Result<(Diagram, Transformation), ReedyError> {
    let shape = f.shape();
    check_initial(shape, part)?;
    if part.is_empty() {
        let z = Diagram::zero(shape);
        return Ok((z.clone(), Transformation::zero(&z, f)));
    }
    let (_, incl) = shape.full_subcategory(part);
    let kan = left_kan(&incl, &f.restrict(&incl))?;
    let pos = |o: usize| part.iter().position(|&p| p == o);
    let values = shape.objects().map(|e| if pos(e).is_some() { f.value(e).clone() } else { kan.diagram().value(e).clone() }).collect();
    let base = Diagram::from_fn(shape, values, |a, b, dl, i, dr, j| match (pos(a), pos(b)) {
        (Some(_), Some(_)) => f.action(a, b).apply_gens(dl, i, dr, j),
        (Some(k), None) => {
            let phi = Elem::basis(dl, shape.hom(a, b).gens(dl), i);
            kan.class(b, k, &phi, &Elem::basis(dr, f.value(a).gens(dr), j))
        }
        (None, None) => kan.diagram().action(a, b).apply_gens(dl, i, dr, j),
        (None, Some(_)) => unreachable!("initial part has no incoming morphisms"),
    });
    let comps = shape
        .objects()
        .map(|e| match pos(e) {
            Some(_) => ChainMap::identity(f.value(e)),
            None => kan.coend(e).map_from_gens(f.value(e), |k, w, x| f.act(part[k], e, w, x)),
        })
        .collect();
    let lambda = Transformation::new(&base, f, comps)?;
    Ok((base, lambda))
}

/// Outcome of the inductive cell attachment over a direct shape.
#[derive(Clone, Debug)]
pub struct Tower {
    pub diagram: Diagram,
    pub augmentation: Transformation,
    pub presentation: CellPresentation,
    pub attached: Vec<usize>,
    pub skipped: Vec<usize>,
}

/// Attach cells `D_c ⊗ k_c` in `(degree, index)` order away from `part`.
/// `step(c, λ_c)` returns `None` to skip, or `(k, h)` with `h ∘ k = λ_c`.
fn tower(
    f: &Diagram,
    part: &[usize],
    mut step: impl FnMut(usize, &ChainMap) -> Result<Option<(ChainMap, ChainMap)>, ReedyError>,
) -> Result<Tower, ReedyError> {
    let shape = f.shape();
    shape.check_direct().map_err(|e| ReedyError::NotDirect(e.to_string()))?;
    let (base, mut lambda) = relative_base(f, part)?;
    let mut presentation = CellPresentation::new(&base);
    let (mut attached, mut skipped) = (Vec::new(), Vec::new());
    let mut order: Vec<usize> = shape.objects().filter(|c| !part.contains(c)).collect();
    order.sort_by_key(|&c| (shape.degree(c), c));
    for c in order {
        let cur = presentation.result().clone();
        let Some((k, h)) = step(c, lambda.component(c))? else {
            skipped.push(c);
            continue;
        };
        let at = presentation.attach(c, &k, &ChainMap::identity(cur.value(c)))?;
        let n = k.tgt().clone();
        lambda = Transformation::from_gen_fn(&at.diagram, f, |e, t, i| {
            let nb = cur.value(e).gens(t);
            if i < nb {
                lambda.apply(e, &Elem::basis(t, nb, i))
            } else {
                let tp = TensorProduct::new(vec![shape.hom(c, e).clone(), n.clone()]);
                let (degs, idx) = tp.unindex(t, i - nb);
                let phi = Elem::basis(degs[0], shape.hom(c, e).gens(degs[0]), idx[0]);
                let z = Elem::basis(degs[1], n.gens(degs[1]), idx[1]);
                f.act(c, e, &phi, &h.apply(&z))
            }
        });
        attached.push(c);
    }
    Ok(Tower { diagram: presentation.result().clone(), augmentation: lambda, presentation, attached, skipped })
}

/// Reedy cofibrancy away from a full subcategory, with a cell
/// presentation of `ι_!ι*X -> X` when the shape is direct.
#[derive(Clone, Debug)]
pub struct AwayReport {
    pub cofibrant: bool,
    /// Latching verdict per object outside the subcategory.
    pub latching: Vec<(usize, Option<String>)>,
    pub presentation: Option<CellPresentation>,
    /// The presented diagram maps isomorphically onto `X`.
    pub comparison_iso: Option<bool>,
}

pub fn reedy_cofibrant_away(reedy: &ReedyStructure, x: &Diagram, part: &[usize]) -> Result<AwayReport, ReedyError> {
    let r = reedy.shape();
    let (p, m) = (reedy.plus().src(), reedy.minus().src());
    for d in r.objects().filter(|d| !part.contains(d)) {
        for &dp in part {
            if !is_trivial(p.hom(d, dp)) || !is_trivial(m.hom(dp, d)) {
                return Err(ReedyError::NotInitial(format!("{} against {}", r.name(d), r.name(dp))));
            }
        }
    }
    let mut latching_verdicts = Vec::new();
    for c in reedy.order().into_iter().filter(|c| !part.contains(c)) {
        let lat = latching(reedy, x, c)?;
        latching_verdicts.push((c, lat.map.cofibration_failure().map(|(n, why)| format!("degree {n}: {why}"))));
    }
    let cofibrant = latching_verdicts.iter().all(|v| v.1.is_none());
    let (mut presentation, mut comparison_iso) = (None, None);
    if cofibrant && reedy.is_direct() {
        let t = tower(x, part, |c, l| {
            if let Some((n, why)) = l.cofibration_failure() {
                return Err(ReedyError::Precondition {
                    object: r.name(c).into(),
                    reason: format!("comparison with the latching map is not a cofibration in degree {n}: {why}"),
                });
            }
            Ok(Some((l.clone(), ChainMap::identity(l.tgt()))))
        })?;
        comparison_iso = Some(t.augmentation.is_pointwise_iso());
        presentation = Some(t.presentation);
    }
    Ok(AwayReport { cofibrant, latching: latching_verdicts, presentation, comparison_iso })
}

// ---------------------------------------------------------------- replacement

/// Cofibrant replacement over a direct shape relative to an initial part.
#[derive(Clone, Debug)]
pub struct Replacement {
    pub diagram: Diagram,
    pub augmentation: Transformation,
    pub presentation: CellPresentation,
    pub attached: Vec<usize>,
    pub skipped: Vec<usize>,
}

/// Verdicts on a replacement.
#[derive(Clone, Debug)]
pub struct ReplacementVerdicts {
    pub pointwise_we: bool,
    pub replays: bool,
    pub agrees_on_part: bool,
    /// Latching cofibrancy per object outside the part.
    pub latching: Vec<(usize, bool)>,
}

impl ReplacementVerdicts {
    pub fn passed(&self) -> bool {
        self.pointwise_we && self.replays && self.agrees_on_part && self.latching.iter().all(|l| l.1)
    }
}

pub fn replace_direct(f: &Diagram, part: &[usize]) -> Result<Replacement, ReedyError> {
    let shape = f.shape();
    let lf = shape.is_locally_flat();
    if let Some((a, b, _)) = lf.failures.first() {
        return Err(ReedyError::NotLocallyFlat(format!("{}→{}", shape.name(*a), shape.name(*b))));
    }
    let t = tower(f, part, |c, l| {
        if l.is_weak_equivalence() {
            return Ok(None);
        }
        if let Some(n) = l.src().first_non_free_degree() {
            return Err(ReedyError::Precondition {
                object: shape.name(c).into(),
                reason: format!("stage value is not cofibrant in degree {n}"),
            });
        }
        let fac = chainz::factorize(l)?;
        Ok(Some((fac.g, fac.h)))
    })?;
    Ok(Replacement {
        diagram: t.diagram,
        augmentation: t.augmentation,
        presentation: t.presentation,
        attached: t.attached,
        skipped: t.skipped,
    })
}

impl Replacement {
    pub fn verify(&self, f: &Diagram, part: &[usize]) -> Result<ReplacementVerdicts, ReedyError> {
        let shape = f.shape();
        let reedy = ReedyStructure::direct(shape)?;
        self.augmentation.validate()?;
        let replays = self.presentation.replay().is_ok();
        let (_, incl) = shape.full_subcategory(part);
        let agrees_on_part = part.is_empty() || self.diagram.restrict(&incl).same_as(&f.restrict(&incl));
        let mut latching_verdicts = Vec::new();
        for c in reedy.order().into_iter().filter(|c| !part.contains(c)) {
            latching_verdicts.push((c, latching(&reedy, &self.diagram, c)?.map.is_cofibration()));
        }
        Ok(ReplacementVerdicts {
            pointwise_we: self.augmentation.is_pointwise_we(),
            replays,
            agrees_on_part,
            latching: latching_verdicts,
        })
    }
}

/// `f = h ∘ g` with `g` a projective cofibration and `h` a pointwise weak
/// equivalence.
#[derive(Clone, Debug)]
pub struct DiagramFactorization {
    pub g: Transformation,
    pub h: Transformation,
    /// Replacement of the arrow diagram on `D ⊗ [1]` away from `D ⊗ {0}`.
    pub arrow: Replacement,
}

/// The arrow diagram of `f` on `D ⊗ [1]` with degrees `2|d| + i`.
pub fn arrow_diagram(f: &Transformation) -> Diagram {
    let (x, y) = (f.src(), f.tgt());
    let d = x.shape();
    let arrow = OrdinaryCategory::poset(1).linearize();
    let degrees = d.objects().flat_map(|o| [2 * d.degree(o), 2 * d.degree(o) + 1]).collect();
    let t = d.tensor(&arrow).with_degrees(degrees);
    let values = d.objects().flat_map(|o| [x.value(o).clone(), y.value(o).clone()]).collect();
    Diagram::from_fn(&t, values, |p, q, dl, i, dr, j| {
        let (a, u, b, v) = (p / 2, p % 2, q / 2, q % 2);
        let tp = TensorProduct::new(vec![d.hom(a, b).clone(), arrow.hom(u, v).clone()]);
        let (degs, idx) = tp.unindex(dl, i);
        let phi = Elem::basis(degs[0], d.hom(a, b).gens(degs[0]), idx[0]);
        match (u, v) {
            (0, 0) => x.act(a, b, &phi, &Elem::basis(dr, x.value(a).gens(dr), j)),
            (1, 1) => y.act(a, b, &phi, &Elem::basis(dr, y.value(a).gens(dr), j)),
            _ => f.apply(b, &x.act(a, b, &phi, &Elem::basis(dr, x.value(a).gens(dr), j))),
        }
    })
}

pub fn factorize_diagram(f: &Transformation) -> Result<DiagramFactorization, ReedyError> {
    let (x, y) = (f.src(), f.tgt());
    let d = x.shape();
    for c in d.objects() {
        if let Some(n) = x.value(c).first_non_free_degree() {
            return Err(ReedyError::Precondition { object: d.name(c).into(), reason: format!("source not cofibrant in degree {n}") });
        }
    }
    let fd = arrow_diagram(f);
    let t = fd.shape().clone();
    let part: Vec<usize> = d.objects().map(|o| 2 * o).collect();
    let arrow = replace_direct(&fd, &part)?;
    let g_diag = &arrow.diagram;
    let one = OrdinaryCategory::poset(1).linearize();
    let j1 = DgFunctor::from_fn(d, &t, d.objects().map(|o| 2 * o + 1).collect(), |a, b, dt, i| {
        let tp = TensorProduct::new(vec![d.hom(a, b).clone(), one.hom(1, 1).clone()]);
        tp.tensor_elems(&[&Elem::basis(dt, d.hom(a, b).gens(dt), i), one.unit(1)])
    });
    let z = g_diag.restrict(&j1);
    let g = Transformation::from_gen_fn(x, &z, |o, deg, i| {
        let tp = TensorProduct::new(vec![d.hom(o, o).clone(), one.hom(0, 1).clone()]);
        let e = tp.tensor_elems(&[d.unit(o), &Elem::basis(0, 1, 0)]);
        g_diag.act(2 * o, 2 * o + 1, &e, &Elem::basis(deg, x.value(o).gens(deg), i))
    });
    let h = Transformation::new(&z, y, d.objects().map(|o| arrow.augmentation.component(2 * o + 1).clone()).collect())?;
    g.validate()?;
    Ok(DiagramFactorization { g, h, arrow })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainz::FpGroup;
    use crate::{ints, IntMatrix};

    fn zn(n: i64) -> ChainComplex {
        ChainComplex::concentrated(0, FpGroup::cyclic(n))
    }

    fn z() -> ChainComplex {
        ChainComplex::unit()
    }

    fn arrow_diagram_of(hom: ChainComplex, x0: ChainComplex, x1: ChainComplex, act: i64) -> Diagram {
        let c = DgCategory::arrow_with_hom(hom);
        let vals = vec![x0, x1];
        Diagram::new(&c, vals.clone(), |a, b, dl, i, dr, j| {
            let tgt = &vals[b];
            if a == b {
                Elem::basis(dr, tgt.gens(dr), j)
            } else if act != 0 && dl == 0 && i == 0 {
                Elem::basis(dr, tgt.gens(dr), j).scaled(&crate::int(act))
            } else {
                Elem::zero(dl + dr, tgt.gens(dl + dr))
            }
        })
        .unwrap()
    }

    fn shapes() -> Vec<ReedyStructure> {
        vec![
            ReedyStructure::direct(&OrdinaryCategory::poset(1).linearize()).unwrap(),
            ReedyStructure::direct(&OrdinaryCategory::poset(2).linearize()).unwrap(),
            ReedyStructure::direct(&OrdinaryCategory::simplex_category(2, MonotoneKind::Injective).linearize()).unwrap(),
            ReedyStructure::inverse(&OrdinaryCategory::poset(1).linearize().opposite().with_degrees(vec![0, 1])).unwrap(),
            ReedyStructure::simplex(1).unwrap(),
            ReedyStructure::simplex(2).unwrap(),
        ]
    }

    #[test]
    fn decompositions_are_isomorphisms() {
        for r in shapes() {
            r.check_decompositions().unwrap();
        }
    }

    #[test]
    fn non_reedy_data_is_rejected() {
        let oc = OrdinaryCategory::simplex_category(1, MonotoneKind::All);
        assert!(ReedyStructure::from_ordinary(&oc, |_| true, |_| false).is_err());
    }

    #[test]
    fn sub_weights_are_natural() {
        for r in shapes() {
            for c in r.shape().objects() {
                let t = r.weight_inclusion(&r.upper_boundary(), &r.full_hom(), c);
                t.src().validate().unwrap();
                t.validate().unwrap();
                let t = r.coweight_inclusion(&r.lower_boundary(), &r.full_hom(), c);
                t.src().validate().unwrap();
                t.validate().unwrap();
            }
        }
    }

    #[test]
    fn latching_in_minimal_degree_is_zero() {
        let r = ReedyStructure::direct(&OrdinaryCategory::poset(1).linearize()).unwrap();
        let x = Diagram::constant_linear(r.shape(), &zn(3));
        let l = latching(&r, &x, 0).unwrap();
        assert!(l.colimit().homology().is_zero());
    }

    #[test]
    fn latching_of_arrow_is_hom_tensor_source() {
        let hom = ChainComplex::two_term(0, 2);
        let x = arrow_diagram_of(hom.clone(), z(), z(), 0);
        let r = ReedyStructure::direct(x.shape()).unwrap();
        let l = latching(&r, &x, 1).unwrap();
        // oracle: hom ⊗ X(0) = hom
        assert_eq!(l.colimit().homology(), chainz::tensor(&hom, x.value(0)).homology());
    }

    #[test]
    fn latching_of_representable_is_boundary_inclusion() {
        for r in shapes() {
            for cp in r.shape().objects() {
                let x = Diagram::representable(r.shape(), cp);
                for c in r.shape().objects() {
                    let l = latching(&r, &x, c).unwrap();
                    let low = r.lower_boundary();
                    let expect_injective = true;
                    assert_eq!(l.map.is_injective(), expect_injective);
                    // image is the sub-coproduct d ≠ c
                    let sub = r.sub_hom(|_, d, c2| d != c2);
                    assert_eq!(l.colimit().homology(), sub.value(cp, c).homology());
                    let _ = low;
                }
            }
        }
    }

    #[test]
    fn skeleta_on_corpus() {
        for r in shapes() {
            for cp in r.shape().objects() {
                let x = Diagram::representable(r.shape(), cp).tensor_complex(&ChainComplex::two_term(0, 2));
                for n in -1..=r.max_degree() {
                    let rep = skeleton_check(&r, &x, n).unwrap();
                    assert!(rep.passed(), "{:?}", rep.failures);
                }
                let full = skeleton(&r, &x, r.max_degree()).unwrap();
                assert!(full.comparison.is_pointwise_iso());
                let empty = skeleton(&r, &x, -1).unwrap();
                assert!(empty.diagram.values().iter().all(|v| v.homology().is_zero()));
            }
        }
    }

    #[test]
    fn cells_flatness_on_corpus() {
        for r in shapes() {
            for c in r.shape().objects() {
                for cp in r.shape().objects() {
                    let rep = cells_flatness_check(&r, c, cp).unwrap();
                    assert!(rep.passed(), "{rep:?}");
                }
            }
        }
    }

    #[test]
    fn cells_check_skips_non_flat() {
        let c = DgCategory::arrow_with_hom(zn(2));
        let r = ReedyStructure::direct(&c).unwrap();
        let rep = cells_flatness_check(&r, 1, 0).unwrap();
        assert!(rep.skipped.is_some());
        assert!(!rep.passed());
    }

    #[test]
    fn arrow_replacement_matches_factorization() {
        let x = arrow_diagram_of(z(), ChainComplex::zero(), zn(2), 0);
        let rep = replace_direct(&x, &[0]).unwrap();
        let v = rep.verify(&x, &[0]).unwrap();
        assert!(v.passed(), "{v:?}");
        let fac = chainz::factorize(&ChainMap::from_zero(&zn(2))).unwrap();
        assert_eq!(rep.diagram.value(1).homology(), fac.g.tgt().homology());
        assert_eq!(rep.diagram.value(1).total_gens(), fac.g.tgt().total_gens());
        assert_eq!(rep.diagram.value(0).total_gens(), 0);
    }

    #[test]
    fn two_object_example() {
        let x = arrow_diagram_of(z(), zn(2), zn(4), 2);
        let rep = replace_direct(&x, &[]).unwrap();
        let v = rep.verify(&x, &[]).unwrap();
        assert!(v.passed(), "{v:?}");
        assert_eq!(rep.diagram.value(0).homology_at(0).to_string(), "Z/2");
        assert_eq!(rep.diagram.value(1).homology_at(0).to_string(), "Z/4");
        assert!(rep.diagram.is_pointwise_cofibrant());
        assert_eq!(rep.attached, vec![0, 1]);
    }

    #[test]
    fn cofibrant_input_skips_every_cell() {
        let x = arrow_diagram_of(z(), z(), z(), 1);
        let rep = replace_direct(&x, &[]).unwrap();
        assert_eq!((rep.attached.clone(), rep.skipped.clone()), (vec![0], vec![1]));
        let y = Diagram::representable(x.shape(), 0);
        let (base, _) = relative_base(&y, &[0]).unwrap();
        let rep = replace_direct(&y, &[0]).unwrap();
        assert_eq!(rep.skipped, vec![1]);
        assert!(rep.augmentation.is_pointwise_iso());
        base.validate().unwrap();
    }

    #[test]
    fn whole_shape_is_identity_replacement() {
        let x = arrow_diagram_of(z(), zn(2), zn(4), 2);
        let rep = replace_direct(&x, &[0, 1]).unwrap();
        assert!(rep.augmentation.is_pointwise_iso());
        assert!(rep.presentation.cells().is_empty());
    }

    #[test]
    fn cofibrancy_away() {
        let r = ReedyStructure::direct(&OrdinaryCategory::poset(1).linearize()).unwrap();
        let good = Diagram::new(r.shape(), vec![z(), chainz::tensor(&z(), &z())], |a, b, _, _, dr, j| {
            let _ = (a, b);
            Elem::basis(dr, 1, j)
        })
        .unwrap();
        let rep = reedy_cofibrant_away(&r, &good, &[0]).unwrap();
        assert!(rep.cofibrant);
        assert_eq!(rep.comparison_iso, Some(true));
        rep.presentation.unwrap().replay().unwrap();
        let bad = Diagram::new(r.shape(), vec![z(), z()], |a, b, _, _, dr, _| Elem::new(dr, ints(&[if a == b { 1 } else { 2 }])))
            .unwrap();
        let rep = reedy_cofibrant_away(&r, &bad, &[0]).unwrap();
        assert!(!rep.cofibrant);
        assert_eq!(rep.latching[0].0, 1);
        // X = ι_!ι*X
        let (base, _) = relative_base(&bad, &[0]).unwrap();
        let rep = reedy_cofibrant_away(&r, &base, &[0]).unwrap();
        assert!(rep.cofibrant && rep.presentation.is_some());
    }

    #[test]
    fn factorize_arrow_diagram() {
        let c = OrdinaryCategory::poset(1).linearize();
        let x = Diagram::representable(&c, 0).tensor_complex(&ChainComplex::two_term(0, 2));
        let y = Diagram::new(&c, vec![zn(2), zn(2)], |_, _, _, _, dr, j| Elem::basis(dr, 1, j)).unwrap();
        let f = Transformation::from_gen_fn(&x, &y, |_, t, _| if t == 0 { Elem::new(0, ints(&[1])) } else { Elem::zero(t, 0) });
        f.validate().unwrap();
        let fac = factorize_diagram(&f).unwrap();
        assert!(fac.g.then(&fac.h).equals(&f));
        assert!(fac.h.is_pointwise_we());
        assert!(fac.g.is_pointwise_cofibration());
        // identity factors through isomorphisms
        let id = Transformation::identity(&x);
        let fac = factorize_diagram(&id).unwrap();
        assert!(fac.h.is_pointwise_iso() && fac.g.is_pointwise_iso());
        // one object: plain chain-level factorization
        let u = DgCategory::unit_category().with_degrees(vec![0]);
        let m = ChainMap::from_fn(&z(), &zn(3), |_| IntMatrix::from_i64_rows(1, &[&[1]]));
        let xu = Diagram::constant_linear(&u, &z());
        let yu = Diagram::constant_linear(&u, &zn(3));
        let fu = Transformation::new(&xu, &yu, vec![m.clone()]).unwrap();
        let fac = factorize_diagram(&fu).unwrap();
        let plain = chainz::factorize(&m).unwrap();
        assert_eq!(fac.g.tgt().value(0).homology(), plain.g.tgt().homology());
    }
}
