//! Finite dg-categories: categories enriched in chain complexes.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::chainz::{self, parity, sign, ChainComplex, ChainError, ChainMap, Elem, Falsifier, FpGroup, Pairing, SumLayout, TensorProduct};
use crate::IntMatrix;

#[derive(Debug, Clone, Error)]
pub enum CatError {
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("composition {0}: {1}")]
    Composition(String, ChainError),
    #[error("composition is not associative on {0}")]
    Associativity(String),
    #[error("unit law fails: {0}")]
    Unit(String),
    #[error("not direct: {0}")]
    NotDirect(String),
    #[error("functor: {0}")]
    Functor(String),
    #[error("{0}")]
    Malformed(String),
}

struct CatData {
    names: Vec<String>,
    homs: Vec<ChainComplex>,
    comps: Vec<Pairing>,
    units: Vec<Elem>,
    degrees: Option<Vec<i64>>,
    op: OnceLock<DgCategory>,
}

/// Finite dg-category; cheap to clone.
#[derive(Clone)]
pub struct DgCategory {
    inner: Arc<CatData>,
}

impl fmt::Debug for DgCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DgCategory{:?}", self.inner.names)
    }
}

impl PartialEq for DgCategory {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.names == other.inner.names
                && self.inner.homs == other.inner.homs
                && self.inner.units == other.inner.units
                && self.inner.comps.iter().zip(&other.inner.comps).all(|(a, b)| a.map == b.map))
    }
}

impl DgCategory {
    /// Build from composition values on generator pairs, unchecked.
    /// `comp(a, b, c, dl, i, dr, j)` composes generator `(dl, i)` of
    /// `hom(b, c)` with generator `(dr, j)` of `hom(a, b)`.
    pub fn from_generators(
        names: Vec<String>,
        homs: Vec<ChainComplex>,
        units: Vec<Elem>,
        degrees: Option<Vec<i64>>,
        mut comp: impl FnMut(usize, usize, usize, i64, usize, i64, usize) -> Elem,
    ) -> Self {
        let n = names.len();
        assert_eq!(homs.len(), n * n, "one hom complex per ordered pair");
        assert_eq!(units.len(), n, "one unit per object");
        let mut comps = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (g, f, t) = (&homs[b * n + c], &homs[a * n + b], &homs[a * n + c]);
                    comps.push(Pairing::from_fn(g, f, t, |dl, i, dr, j| comp(a, b, c, dl, i, dr, j)));
                }
            }
        }
        DgCategory { inner: Arc::new(CatData { names, homs, comps, units, degrees, op: OnceLock::new() }) }
    }

    pub fn checked(self) -> Result<Self, CatError> {
        self.validate()?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.inner.names.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.n()
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn name(&self, c: usize) -> &str {
        &self.inner.names[c]
    }

    pub fn index(&self, name: &str) -> Result<usize, CatError> {
        self.inner.names.iter().position(|x| x == name).ok_or_else(|| CatError::UnknownObject(name.to_string()))
    }

    pub fn hom(&self, a: usize, b: usize) -> &ChainComplex {
        &self.inner.homs[a * self.n() + b]
    }

    /// `hom(b, c) ⊗ hom(a, b) -> hom(a, c)`.
    pub fn comp(&self, a: usize, b: usize, c: usize) -> &Pairing {
        let n = self.n();
        &self.inner.comps[(a * n + b) * n + c]
    }

    /// `g ∘ f` for `f ∈ hom(a, b)`, `g ∈ hom(b, c)`.
    pub fn compose(&self, a: usize, b: usize, c: usize, g: &Elem, f: &Elem) -> Elem {
        self.comp(a, b, c).apply(g, f)
    }

    pub fn unit(&self, c: usize) -> &Elem {
        &self.inner.units[c]
    }

    pub fn unit_map(&self, c: usize) -> ChainMap {
        let h = self.hom(c, c);
        ChainMap::from_gen_fn(&ChainComplex::unit(), h, |_, _| self.unit(c).clone())
    }

    pub fn degrees(&self) -> Option<&[i64]> {
        self.inner.degrees.as_deref()
    }

    pub fn degree(&self, c: usize) -> i64 {
        self.degrees().map(|d| d[c]).unwrap_or(0)
    }

    pub fn with_degrees(&self, degrees: Vec<i64>) -> DgCategory {
        assert_eq!(degrees.len(), self.n());
        let d = &self.inner;
        DgCategory {
            inner: Arc::new(CatData {
                names: d.names.clone(),
                homs: d.homs.clone(),
                comps: d.comps.clone(),
                units: d.units.clone(),
                degrees: Some(degrees),
                op: OnceLock::new(),
            }),
        }
    }

    fn desc(&self, objs: &[usize]) -> String {
        objs.iter().map(|&o| self.name(o)).collect::<Vec<_>>().join("→")
    }

    pub fn validate(&self) -> Result<(), CatError> {
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    self.comp(a, b, c).validate().map_err(|e| CatError::Composition(self.desc(&[a, b, c]), e))?;
                }
            }
        }
        for c in 0..n {
            let u = self.unit(c);
            let h = self.hom(c, c);
            if u.deg != 0 || u.v.len() != h.gens(0) || !h.is_zero_elem(&h.diff(u)) {
                return Err(CatError::Unit(format!("unit of {} is not a degree-0 cycle", self.name(c))));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let h = self.hom(a, b);
                for t in h.degrees() {
                    for i in 0..h.gens(t) {
                        let f = Elem::basis(t, h.gens(t), i);
                        let l = self.compose(a, b, b, self.unit(b), &f);
                        let r = self.compose(a, a, b, &f, self.unit(a));
                        if !h.is_zero_elem(&l.minus(&f)) || !h.is_zero_elem(&r.minus(&f)) {
                            return Err(CatError::Unit(format!("generator {i} of degree {t} in hom {}", self.desc(&[a, b]))));
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        self.check_assoc(a, b, c, d)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn check_assoc(&self, a: usize, b: usize, c: usize, d: usize) -> Result<(), CatError> {
        let (hf, hg, hh) = (self.hom(a, b), self.hom(b, c), self.hom(c, d));
        if hf.is_empty() || hg.is_empty() || hh.is_empty() {
            return Ok(());
        }
        let target = self.hom(a, d);
        for tf in hf.degrees() {
            for i in 0..hf.gens(tf) {
                let f = Elem::basis(tf, hf.gens(tf), i);
                for tg in hg.degrees() {
                    for j in 0..hg.gens(tg) {
                        let g = Elem::basis(tg, hg.gens(tg), j);
                        let gf = self.compose(a, b, c, &g, &f);
                        for th in hh.degrees() {
                            for k in 0..hh.gens(th) {
                                let h = Elem::basis(th, hh.gens(th), k);
                                let l = self.compose(a, c, d, &h, &gf);
                                let hg_ = self.compose(b, c, d, &h, &g);
                                let r = self.compose(a, b, d, &hg_, &f);
                                if !target.is_zero_elem(&l.minus(&r)) {
                                    return Err(CatError::Associativity(self.desc(&[a, b, c, d])));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Direct for the declared degrees: `hom(d', d) = 0` unless `|d'| < |d|`
    /// or `d' = d`, and `Z -> hom(d, d)` is an isomorphism.
    pub fn check_direct(&self) -> Result<(), CatError> {
        let deg = self.degrees().ok_or_else(|| CatError::NotDirect("no degree function".into()))?;
        for a in self.objects() {
            for b in self.objects() {
                let h = self.hom(a, b);
                if a != b && deg[a] >= deg[b] && h.degrees().any(|t| !h.group(t).is_trivial()) {
                    return Err(CatError::NotDirect(format!("hom {} is nonzero", self.desc(&[a, b]))));
                }
            }
            if !self.unit_map(a).is_isomorphism() {
                return Err(CatError::NotDirect(format!("endomorphisms of {} are not Z", self.name(a))));
            }
        }
        Ok(())
    }

    pub fn is_direct(&self) -> bool {
        self.check_direct().is_ok()
    }

    /// Every hom complex flat, with falsifiers for the failing pairs.
    pub fn is_locally_flat(&self) -> LocalFlatness {
        let mut failures = Vec::new();
        for a in self.objects() {
            for b in self.objects() {
                let v = chainz::is_flat(self.hom(a, b));
                if !v.flat {
                    failures.push((a, b, v.falsifier.expect("non-flat verdict carries a falsifier")));
                }
            }
        }
        LocalFlatness { flat: failures.is_empty(), failures }
    }

    // ------------------------------------------------------------ examples

    /// One object with endomorphisms `Z`.
    pub fn unit_category() -> Self {
        Self::endomorphism_algebra("*", ChainComplex::unit(), Elem::basis(0, 1, 0), |_, _, _, _| Elem::basis(0, 1, 0))
    }

    /// One object whose endomorphism complex is the given dg-algebra.
    pub fn endomorphism_algebra(
        name: &str,
        algebra: ChainComplex,
        unit: Elem,
        mut mult: impl FnMut(i64, usize, i64, usize) -> Elem,
    ) -> Self {
        Self::from_generators(vec![name.to_string()], vec![algebra], vec![unit], None, |_, _, _, dl, i, dr, j| mult(dl, i, dr, j))
    }

    /// One object, endomorphisms `Z/n`.
    pub fn zmod(n: i64) -> Self {
        let alg = ChainComplex::concentrated(0, FpGroup::cyclic(n));
        Self::endomorphism_algebra("*", alg, Elem::basis(0, 1, 0), |_, _, _, _| Elem::basis(0, 1, 0))
    }

    /// Group ring from a multiplication table, identity at index 0.
    pub fn group_ring(table: &[Vec<usize>]) -> Self {
        let m = table.len();
        let alg = ChainComplex::concentrated(0, FpGroup::free(m));
        let table = table.to_vec();
        Self::endomorphism_algebra("*", alg, Elem::basis(0, m, 0), move |_, i, _, j| Elem::basis(0, m, table[i][j]))
    }

    /// `Z[Z/m]` with basis `1, t, ..., t^{m-1}`.
    pub fn group_ring_cyclic(m: usize) -> Self {
        let table: Vec<Vec<usize>> = (0..m).map(|i| (0..m).map(|j| (i + j) % m).collect()).collect();
        Self::group_ring(&table)
    }

    /// Exterior algebra `Z[e]/(e^2)` with `|e| = 1` and zero differential.
    pub fn exterior() -> Self {
        let alg = ChainComplex::from_parts(0, vec![FpGroup::free(1), FpGroup::free(1)], |_| IntMatrix::zeros(1, 1));
        Self::endomorphism_algebra("*", alg, Elem::basis(0, 1, 0), |dl, _, dr, _| {
            if dl + dr >= 2 {
                Elem::zero(2, 0)
            } else {
                Elem::basis(dl + dr, 1, 0)
            }
        })
    }

    /// Two objects `c0 -> c1` with `hom(c0, c1) = hom` and trivial endomorphisms.
    pub fn arrow_with_hom(hom: ChainComplex) -> Self {
        let names = vec!["c0".to_string(), "c1".to_string()];
        let homs = vec![ChainComplex::unit(), hom.clone(), ChainComplex::zero(), ChainComplex::unit()];
        let units = vec![Elem::basis(0, 1, 0), Elem::basis(0, 1, 0)];
        Self::from_generators(names, homs, units, Some(vec![0, 1]), move |a, b, c, dl, i, dr, j| {
            // one of the two factors is an identity
            if a == b {
                Elem::basis(dl, hom_gens(&hom, a, c, dl), i)
            } else if b == c {
                Elem::basis(dr, hom_gens(&hom, a, c, dr), j)
            } else {
                unreachable!("no composable pair of non-identities")
            }
        })
    }

    /// Linearization of an ordinary finite category.
    pub fn from_ordinary(oc: &OrdinaryCategory) -> Self {
        let n = oc.objects.len();
        let mut homs = Vec::with_capacity(n * n);
        let mut lists = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let l = oc.hom_list(a, b);
                homs.push(ChainComplex::concentrated(0, FpGroup::free(l.len())));
                lists.push(l);
            }
        }
        let units = (0..n)
            .map(|c| {
                let l = &lists[c * n + c];
                Elem::basis(0, l.len(), l.iter().position(|&m| m == oc.identities[c]).unwrap())
            })
            .collect();
        let pos: HashMap<usize, usize> =
            lists.iter().flat_map(|l| l.iter().enumerate().map(|(i, &m)| (m, i))).collect();
        let oc2 = oc.clone();
        Self::from_generators(oc.objects.clone(), homs, units, oc.degrees.clone(), move |a, b, c, _, i, _, j| {
            let g = lists[b * n + c][i];
            let f = lists[a * n + b][j];
            let h = oc2.compose(g, f);
            Elem::basis(0, lists[a * n + c].len(), pos[&h])
        })
    }

    // ------------------------------------------------------------ constructions

    /// Opposite category; `f ∘op g = (-1)^{|f||g|} g ∘ f`. Cached.
    pub fn opposite(&self) -> DgCategory {
        self.inner.op.get_or_init(|| self.build_opposite()).clone()
    }

    fn build_opposite(&self) -> DgCategory {
        let n = self.n();
        let homs = (0..n * n).map(|k| self.hom(k % n, k / n).clone()).collect();
        let me = self.clone();
        DgCategory::from_generators(
            self.names().to_vec(),
            homs,
            self.inner.units.clone(),
            self.inner.degrees.clone(),
            move |a, b, c, dl, i, dr, j| {
                // left ∈ hom(c, b), right ∈ hom(b, a) in the original
                let g = Elem::basis(dl, me.hom(c, b).gens(dl), i);
                let f = Elem::basis(dr, me.hom(b, a).gens(dr), j);
                me.compose(c, b, a, &f, &g).scaled(&sign(parity(dl) && parity(dr)))
            },
        )
    }

    /// Tensor product of categories on pairs `(a, x)` indexed `a * n_other + x`.
    pub fn tensor(&self, other: &DgCategory) -> DgCategory {
        let (n, m) = (self.n(), other.n());
        let mut names = Vec::new();
        for a in 0..n {
            for x in 0..m {
                names.push(format!("{}⊗{}", self.name(a), other.name(x)));
            }
        }
        let size = n * m;
        let mut layouts = Vec::with_capacity(size * size);
        for p in 0..size {
            for q in 0..size {
                let (a, x, b, y) = (p / m, p % m, q / m, q % m);
                layouts.push(TensorProduct::new(vec![self.hom(a, b).clone(), other.hom(x, y).clone()]));
            }
        }
        let homs = layouts.iter().map(|l| l.complex().clone()).collect();
        let units = (0..size)
            .map(|p| layouts[p * size + p].tensor_elems(&[self.unit(p / m), other.unit(p % m)]))
            .collect();
        let (s, o) = (self.clone(), other.clone());
        DgCategory::from_generators(names, homs, units, None, move |p, q, r, dl, i, dr, j| {
            let (a, x, b, y, c, z) = (p / m, p % m, q / m, q % m, r / m, r % m);
            let gl = &layouts[q * size + r];
            let fl = &layouts[p * size + q];
            let (gd, gi) = gl.unindex(dl, i);
            let (fd, fi) = fl.unindex(dr, j);
            let g1 = Elem::basis(gd[0], s.hom(b, c).gens(gd[0]), gi[0]);
            let g2 = Elem::basis(gd[1], o.hom(y, z).gens(gd[1]), gi[1]);
            let f1 = Elem::basis(fd[0], s.hom(a, b).gens(fd[0]), fi[0]);
            let f2 = Elem::basis(fd[1], o.hom(x, y).gens(fd[1]), fi[1]);
            let left = s.compose(a, b, c, &g1, &f1);
            let right = o.compose(x, y, z, &g2, &f2);
            let sg = sign(parity(gd[1]) && parity(fd[0]));
            layouts[p * size + r].tensor_elems(&[&left, &right]).scaled(&sg)
        })
    }

    /// Full subcategory on the given objects and its inclusion functor.
    pub fn full_subcategory(&self, objs: &[usize]) -> (DgCategory, DgFunctor) {
        let k = objs.len();
        let names = objs.iter().map(|&o| self.name(o).to_string()).collect();
        let homs = (0..k * k).map(|p| self.hom(objs[p / k], objs[p % k]).clone()).collect();
        let units = objs.iter().map(|&o| self.unit(o).clone()).collect();
        let degrees = self.degrees().map(|d| objs.iter().map(|&o| d[o]).collect());
        let me = self.clone();
        let ob = objs.to_vec();
        let sub = DgCategory::from_generators(names, homs, units, degrees, move |a, b, c, dl, i, dr, j| {
            me.comp(ob[a], ob[b], ob[c]).apply_gens(dl, i, dr, j)
        });
        let incl = DgFunctor::identity_like(&sub, self, objs.to_vec()).expect("full subcategory homs agree");
        (sub, incl)
    }

    /// Discrete subcategory `δC` (identities only) and its inclusion.
    pub fn discrete(&self) -> (DgCategory, DgFunctor) {
        let n = self.n();
        let homs = (0..n * n).map(|p| if p / n == p % n { ChainComplex::unit() } else { ChainComplex::zero() }).collect();
        let units = (0..n).map(|_| Elem::basis(0, 1, 0)).collect();
        let names = self.names().iter().map(|s| format!("δ{s}")).collect();
        let disc = DgCategory::from_generators(names, homs, units, Some(vec![0; n]), |_, _, _, _, _, _, _| Elem::basis(0, 1, 0));
        let maps = (0..n * n)
            .map(|p| {
                let (a, b) = (p / n, p % n);
                if a == b {
                    self.unit_map(a)
                } else {
                    ChainMap::zero(&ChainComplex::zero(), self.hom(a, b))
                }
            })
            .collect();
        let f = DgFunctor { src: disc.clone(), tgt: self.clone(), obj: (0..n).collect(), maps };
        (disc, f)
    }
}

fn hom_gens(hom: &ChainComplex, a: usize, c: usize, deg: i64) -> usize {
    if a == c {
        1
    } else {
        hom.gens(deg)
    }
}

/// Verdict of the local flatness check.
#[derive(Clone, Debug)]
pub struct LocalFlatness {
    pub flat: bool,
    pub failures: Vec<(usize, usize, Falsifier)>,
}

// ---------------------------------------------------------------- functors

/// Dg-functor: object map plus chain maps on homs.
#[derive(Clone, Debug)]
pub struct DgFunctor {
    src: DgCategory,
    tgt: DgCategory,
    obj: Vec<usize>,
    maps: Vec<ChainMap>,
}

impl DgFunctor {
    pub fn new(src: &DgCategory, tgt: &DgCategory, obj: Vec<usize>, maps: Vec<ChainMap>) -> Result<Self, CatError> {
        let f = DgFunctor { src: src.clone(), tgt: tgt.clone(), obj, maps };
        f.validate()?;
        Ok(f)
    }

    /// Unchecked, from generator images.
    pub fn from_fn(
        src: &DgCategory,
        tgt: &DgCategory,
        obj: Vec<usize>,
        mut f: impl FnMut(usize, usize, i64, usize) -> Elem,
    ) -> Self {
        let n = src.n();
        let maps = (0..n * n)
            .map(|p| {
                let (a, b) = (p / n, p % n);
                ChainMap::from_gen_fn(src.hom(a, b), tgt.hom(obj[a], obj[b]), |t, i| f(a, b, t, i))
            })
            .collect();
        DgFunctor { src: src.clone(), tgt: tgt.clone(), obj, maps }
    }

    /// Functor whose hom maps are identities (full subcategory inclusions).
    pub fn identity_like(src: &DgCategory, tgt: &DgCategory, obj: Vec<usize>) -> Option<Self> {
        let n = src.n();
        let mut maps = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let (s, t) = (src.hom(a, b), tgt.hom(obj[a], obj[b]));
                if s != t {
                    return None;
                }
                maps.push(ChainMap::identity(s));
            }
        }
        Some(DgFunctor { src: src.clone(), tgt: tgt.clone(), obj, maps })
    }

    pub fn identity(c: &DgCategory) -> Self {
        Self::identity_like(c, c, c.objects().collect()).expect("identity functor")
    }

    pub fn src(&self) -> &DgCategory {
        &self.src
    }

    pub fn tgt(&self) -> &DgCategory {
        &self.tgt
    }

    pub fn obj(&self, a: usize) -> usize {
        self.obj[a]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.obj
    }

    pub fn map(&self, a: usize, b: usize) -> &ChainMap {
        &self.maps[a * self.src.n() + b]
    }

    pub fn apply(&self, a: usize, b: usize, x: &Elem) -> Elem {
        self.map(a, b).apply(x)
    }

    pub fn validate(&self) -> Result<(), CatError> {
        let (s, t) = (&self.src, &self.tgt);
        if self.obj.len() != s.n() || self.obj.iter().any(|&o| o >= t.n()) {
            return Err(CatError::Functor("object map out of range".into()));
        }
        for a in s.objects() {
            for b in s.objects() {
                let m = self.map(a, b);
                if m.src() != s.hom(a, b) || m.tgt() != t.hom(self.obj[a], self.obj[b]) {
                    return Err(CatError::Functor(format!("hom map {a}→{b} has wrong ends")));
                }
                m.validate().map_err(|e| CatError::Composition(format!("functor on {a}→{b}"), e))?;
            }
            let u = self.apply(a, a, s.unit(a));
            let h = t.hom(self.obj[a], self.obj[a]);
            if !h.is_zero_elem(&u.minus(t.unit(self.obj[a]))) {
                return Err(CatError::Functor(format!("unit of {} is not preserved", s.name(a))));
            }
        }
        for a in s.objects() {
            for b in s.objects() {
                for c in s.objects() {
                    let (hf, hg) = (s.hom(a, b), s.hom(b, c));
                    for tf in hf.degrees() {
                        for i in 0..hf.gens(tf) {
                            let f = Elem::basis(tf, hf.gens(tf), i);
                            for tg in hg.degrees() {
                                for j in 0..hg.gens(tg) {
                                    let g = Elem::basis(tg, hg.gens(tg), j);
                                    let l = self.apply(a, c, &s.compose(a, b, c, &g, &f));
                                    let r = t.compose(
                                        self.obj[a],
                                        self.obj[b],
                                        self.obj[c],
                                        &self.apply(b, c, &g),
                                        &self.apply(a, b, &f),
                                    );
                                    if !t.hom(self.obj[a], self.obj[c]).is_zero_elem(&l.minus(&r)) {
                                        return Err(CatError::Functor(format!("composition {a}→{b}→{c} not preserved")));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &DgFunctor) -> DgFunctor {
        let n = self.src.n();
        let obj = self.obj.iter().map(|&o| other.obj[o]).collect::<Vec<_>>();
        let maps = (0..n * n)
            .map(|p| {
                let (a, b) = (p / n, p % n);
                self.map(a, b).then(other.map(self.obj[a], self.obj[b]))
            })
            .collect();
        DgFunctor { src: self.src.clone(), tgt: other.tgt.clone(), obj, maps }
    }

    /// Induced functor on opposites (given the opposite categories).
    pub fn opposite(&self, src_op: &DgCategory, tgt_op: &DgCategory) -> DgFunctor {
        let n = self.src.n();
        let maps = (0..n * n)
            .map(|p| {
                let (a, b) = (p / n, p % n);
                self.map(b, a).with_ends(src_op.hom(a, b), tgt_op.hom(self.obj[a], self.obj[b]))
            })
            .collect();
        DgFunctor { src: src_op.clone(), tgt: tgt_op.clone(), obj: self.obj.clone(), maps }
    }

    /// `F ⊗ G` between tensor categories built by [`DgCategory::tensor`].
    pub fn tensor(f: &DgFunctor, g: &DgFunctor, src: &DgCategory, tgt: &DgCategory) -> DgFunctor {
        let (m, m2) = (g.src.n(), g.tgt.n());
        let size = src.n();
        let obj: Vec<usize> = (0..size).map(|p| f.obj[p / m] * m2 + g.obj[p % m]).collect();
        let maps = (0..size * size)
            .map(|pq| {
                let (p, q) = (pq / size, pq % size);
                let (a, x, b, y) = (p / m, p % m, q / m, q % m);
                let sl = TensorProduct::new(vec![f.src.hom(a, b).clone(), g.src.hom(x, y).clone()]);
                let tl = TensorProduct::new(vec![
                    f.tgt.hom(f.obj[a], f.obj[b]).clone(),
                    g.tgt.hom(g.obj[x], g.obj[y]).clone(),
                ]);
                TensorProduct::map_from_factors(&sl, &tl, &[f.map(a, b), g.map(x, y)])
                    .with_ends(src.hom(p, q), tgt.hom(obj[p], obj[q]))
            })
            .collect();
        DgFunctor { src: src.clone(), tgt: tgt.clone(), obj, maps }
    }
}

// ---------------------------------------------------------------- ordinary categories

/// Morphism of an ordinary finite category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub src: usize,
    pub tgt: usize,
    pub label: String,
}

/// Ordinary finite category given by an explicit composition table.
#[derive(Clone, Debug)]
pub struct OrdinaryCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub identities: Vec<usize>,
    table: HashMap<(usize, usize), usize>,
    pub degrees: Option<Vec<i64>>,
}

impl OrdinaryCategory {
    /// `compose(g, f)` must return `g ∘ f` for composable pairs.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        degrees: Option<Vec<i64>>,
        mut compose: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self, CatError> {
        let mut table = HashMap::new();
        for (g, mg) in morphisms.iter().enumerate() {
            for (f, mf) in morphisms.iter().enumerate() {
                if mf.tgt == mg.src {
                    let h = compose(g, f);
                    if morphisms[h].src != mf.src || morphisms[h].tgt != mg.tgt {
                        return Err(CatError::Malformed(format!("{} ∘ {} has wrong ends", mg.label, mf.label)));
                    }
                    table.insert((g, f), h);
                }
            }
        }
        let oc = OrdinaryCategory { objects, morphisms, identities, table, degrees };
        oc.validate()?;
        Ok(oc)
    }

    fn validate(&self) -> Result<(), CatError> {
        for (c, &i) in self.identities.iter().enumerate() {
            let m = &self.morphisms[i];
            if m.src != c || m.tgt != c {
                return Err(CatError::Unit(format!("identity of {} has wrong ends", self.objects[c])));
            }
        }
        for (f, mf) in self.morphisms.iter().enumerate() {
            if self.compose(self.identities[mf.tgt], f) != f || self.compose(f, self.identities[mf.src]) != f {
                return Err(CatError::Unit(format!("identity law fails for {}", mf.label)));
            }
        }
        for (&(g, f), &gf) in &self.table {
            for (h, mh) in self.morphisms.iter().enumerate() {
                if mh.src == self.morphisms[g].tgt && self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                    return Err(CatError::Associativity(format!("{} {} {}", mh.label, self.morphisms[g].label, self.morphisms[f].label)));
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.table[&(g, f)]
    }

    pub fn hom_list(&self, a: usize, b: usize) -> Vec<usize> {
        self.morphisms.iter().enumerate().filter(|(_, m)| m.src == a && m.tgt == b).map(|(i, _)| i).collect()
    }

    /// Linear order `0 -> 1 -> ... -> n`, degrees equal to positions.
    pub fn poset(n: usize) -> Self {
        let objects = (0..=n).map(|i| i.to_string()).collect();
        let mut morphisms = Vec::new();
        let mut idx = HashMap::new();
        for a in 0..=n {
            for b in a..=n {
                idx.insert((a, b), morphisms.len());
                morphisms.push(Morphism { src: a, tgt: b, label: format!("{a}≤{b}") });
            }
        }
        let identities = (0..=n).map(|a| idx[&(a, a)]).collect();
        let ms = morphisms.clone();
        Self::new(objects, morphisms, identities, Some((0..=n as i64).collect()), |g, f| idx[&(ms[f].src, ms[g].tgt)])
            .expect("posets are categories")
    }

    /// Monotone maps between `[0], ..., [n]`, restricted to injective,
    /// surjective or all maps.
    pub fn simplex_category(n: usize, kind: MonotoneKind) -> Self {
        let mut morphisms = Vec::new();
        let mut maps: Vec<Vec<usize>> = Vec::new();
        let mut idx: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut identities = vec![0; n + 1];
        for a in 0..=n {
            for b in 0..=n {
                for phi in monotone_maps(a, b) {
                    let inj = phi.windows(2).all(|w| w[0] < w[1]);
                    let surj = (0..=b).all(|v| phi.contains(&v));
                    let keep = match kind {
                        MonotoneKind::All => true,
                        MonotoneKind::Injective => inj,
                        MonotoneKind::Surjective => surj,
                    };
                    if !keep {
                        continue;
                    }
                    if a == b && inj {
                        identities[a] = morphisms.len();
                    }
                    let mut key = vec![a, b];
                    key.extend(&phi);
                    idx.insert(key, morphisms.len());
                    let label = format!("[{a}]→[{b}]:{}", phi.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""));
                    morphisms.push(Morphism { src: a, tgt: b, label });
                    maps.push(phi);
                }
            }
        }
        let objects = (0..=n).map(|i| format!("[{i}]")).collect();
        let degrees = match kind {
            MonotoneKind::Surjective => (0..=n as i64).map(|d| n as i64 - d).collect(),
            _ => (0..=n as i64).collect(),
        };
        let ms = morphisms.clone();
        Self::new(objects, morphisms, identities, Some(degrees), |g, f| {
            let comp: Vec<usize> = maps[f].iter().map(|&v| maps[g][v]).collect();
            let mut key = vec![ms[f].src, ms[g].tgt];
            key.extend(&comp);
            idx[&key]
        })
        .expect("simplex categories are categories")
    }

    pub fn linearize(&self) -> DgCategory {
        DgCategory::from_ordinary(self)
    }

    /// Wide subcategory on the kept morphisms (identities always kept),
    /// with the index of each kept morphism in `self`.
    pub fn subcategory(&self, keep: impl Fn(usize) -> bool) -> Result<(OrdinaryCategory, Vec<usize>), CatError> {
        let kept: Vec<usize> =
            (0..self.morphisms.len()).filter(|&m| keep(m) || self.identities.contains(&m)).collect();
        let pos: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let morphisms = kept.iter().map(|&m| self.morphisms[m].clone()).collect();
        let identities = self.identities.iter().map(|m| pos[m]).collect();
        let mut closed = true;
        let sub = Self::new(self.objects.clone(), morphisms, identities, self.degrees.clone(), |g, f| {
            match pos.get(&self.compose(kept[g], kept[f])) {
                Some(&h) => h,
                None => {
                    closed = false;
                    pos[&self.identities[self.morphisms[kept[f]].src]]
                }
            }
        });
        if !closed {
            return Err(CatError::Malformed("kept morphisms are not closed under composition".into()));
        }
        Ok((sub?, kept))
    }

    /// Linearized inclusion of a subcategory from [`Self::subcategory`].
    pub fn linear_inclusion(&self, sub: &OrdinaryCategory, kept: &[usize]) -> DgFunctor {
        let (s, t) = (sub.linearize(), self.linearize());
        DgFunctor::from_fn(&s, &t, (0..self.objects.len()).collect(), |a, b, _, i| {
            let m = kept[sub.hom_list(a, b)[i]];
            let l = self.hom_list(a, b);
            Elem::basis(0, l.len(), l.iter().position(|&x| x == m).expect("kept morphism"))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneKind {
    All,
    Injective,
    Surjective,
}

/// All monotone maps `[a] -> [b]` in lexicographic order.
pub fn monotone_maps(a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(a + 1);
    fn rec(k: usize, a: usize, b: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k > a {
            out.push(cur.clone());
            return;
        }
        for v in lo..=b {
            cur.push(v);
            rec(k + 1, a, b, v, cur, out);
            cur.pop();
        }
    }
    rec(0, a, b, 0, &mut cur, &mut out);
    out
}

/// Injective monotone maps `[k] -> [n]`.
pub fn injective_maps(k: usize, n: usize) -> Vec<Vec<usize>> {
    monotone_maps(k, n).into_iter().filter(|p| p.windows(2).all(|w| w[0] < w[1])).collect()
}

// ---------------------------------------------------------------- direct replacement

/// Bound on sequence length and simplicial degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeTruncation {
    pub max_length: usize,
}

/// One tagged summand of a hom of the direct replacement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSummand {
    pub phi: Vec<usize>,
    /// `true` for the copy of `Z` (top element preserved).
    pub unit: bool,
}

/// Truncated direct replacement with its projection functor.
#[derive(Clone, Debug)]
pub struct DeltaCategory {
    pub cat: DgCategory,
    pub base: DgCategory,
    pub sequences: Vec<Vec<usize>>,
    pub projection: DgFunctor,
    pub truncation: DegreeTruncation,
    summands: Vec<Vec<DeltaSummand>>,
    layouts: Vec<SumLayout>,
}

impl DeltaCategory {
    pub fn sequence_index(&self, s: &[usize]) -> Option<usize> {
        self.sequences.iter().position(|x| x == s)
    }

    pub fn summands(&self, a: usize, b: usize) -> &[DeltaSummand] {
        &self.summands[a * self.sequences.len() + b]
    }

    pub fn layout(&self, a: usize, b: usize) -> &SumLayout {
        &self.layouts[a * self.sequences.len() + b]
    }

    /// Element of the summand tagged `phi` with the given local value.
    pub fn summand_elem(&self, a: usize, b: usize, phi: &[usize], local: &Elem) -> Elem {
        let s = self.summands(a, b).iter().position(|x| x.phi == phi).expect("summand exists");
        self.layout(a, b).embed(s, local)
    }
}

fn sequences_upto(n_obj: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = (0..n_obj).map(|c| vec![c]).collect();
    for _ in 0..max_len {
        out.extend(level.iter().cloned());
        let mut next = Vec::new();
        for s in &level {
            for c in 0..n_obj {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        level = next;
    }
    out
}

/// The direct replacement of `c` on sequences of length at most
/// `max_length + 1`, degree = length − 1.
pub fn delta_category(c: &DgCategory, t: DegreeTruncation) -> Result<DeltaCategory, CatError> {
    if c.n() == 0 {
        return Err(CatError::Malformed("empty category".into()));
    }
    let seqs = sequences_upto(c.n(), t.max_length + 1);
    let ns = seqs.len();
    let mut summands = Vec::with_capacity(ns * ns);
    let mut layouts = Vec::with_capacity(ns * ns);
    for src in &seqs {
        for tgt in &seqs {
            let (k, n) = (src.len() - 1, tgt.len() - 1);
            let mut list = Vec::new();
            let mut parts = Vec::new();
            if k <= n {
                for phi in injective_maps(k, n) {
                    if (0..=k).all(|i| src[i] == tgt[phi[i]]) {
                        let unit = phi[k] == n;
                        parts.push(if unit { ChainComplex::unit() } else { c.hom(src[k], tgt[n]).clone() });
                        list.push(DeltaSummand { phi, unit });
                    }
                }
            }
            summands.push(list);
            layouts.push(SumLayout::new(parts));
        }
    }
    let names = seqs.iter().map(|s| format!("({})", s.iter().map(|&o| c.name(o)).collect::<Vec<_>>().join(","))).collect();
    let homs = layouts.iter().map(|l| l.complex().clone()).collect();
    let units = (0..ns)
        .map(|a| {
            let l = &layouts[a * ns + a];
            l.embed(0, &Elem::basis(0, 1, 0))
        })
        .collect();
    let degrees = seqs.iter().map(|s| s.len() as i64 - 1).collect();
    let (base, sm, ly, sq) = (c.clone(), summands.clone(), layouts.clone(), seqs.clone());
    let cat = DgCategory::from_generators(names, homs, units, Some(degrees), move |a, b, cc, dl, i, dr, j| {
        // left ∈ hom(b, cc), right ∈ hom(a, b)
        let (gl, fl) = (&ly[b * ns + cc], &ly[a * ns + b]);
        let (gs, gi) = gl.locate(dl, i);
        let (fs, fi) = fl.locate(dr, j);
        let (psi, phi) = (&sm[b * ns + cc][gs], &sm[a * ns + b][fs]);
        let comp: Vec<usize> = phi.phi.iter().map(|&v| psi.phi[v]).collect();
        let tl = &ly[a * ns + cc];
        let ts = sm[a * ns + cc].iter().position(|x| x.phi == comp).expect("composite summand exists");
        let t = dl + dr;
        let (sa, sb, sc) = (&sq[a], &sq[b], &sq[cc]);
        let (k, m, n) = (sa.len() - 1, sb.len() - 1, sc.len() - 1);
        let local = match (psi.unit, phi.unit) {
            (true, true) => Elem::basis(0, 1, 0),
            (true, false) => Elem::basis(dr, base.hom(sa[k], sb[m]).gens(dr), fi),
            (false, true) => Elem::basis(dl, base.hom(sb[m], sc[n]).gens(dl), gi),
            (false, false) => {
                let g = Elem::basis(dl, base.hom(sb[m], sc[n]).gens(dl), gi);
                let f = Elem::basis(dr, base.hom(sa[k], sb[m]).gens(dr), fi);
                base.compose(sa[k], sb[m], sc[n], &g, &f)
            }
        };
        let _ = t;
        tl.embed(ts, &local)
    });
    let obj: Vec<usize> = seqs.iter().map(|s| *s.last().unwrap()).collect();
    let projection = DgFunctor::from_fn(&cat, c, obj, |a, b, t, i| {
        let l = &layouts[a * ns + b];
        let (s, li) = l.locate(t, i);
        let (sa, sb) = (&seqs[a], &seqs[b]);
        if summands[a * ns + b][s].unit {
            c.unit(*sb.last().unwrap()).clone()
        } else {
            Elem::basis(t, c.hom(*sa.last().unwrap(), *sb.last().unwrap()).gens(t), li)
        }
    });
    Ok(DeltaCategory { cat, base: c.clone(), sequences: seqs, projection, truncation: t, summands, layouts })
}

/// Ordinary category of sequences ending in `c` with top-preserving
/// injections, together with its functor into the direct replacement.
pub fn comma_top_category(delta: &DeltaCategory, c: usize) -> (OrdinaryCategory, DgFunctor) {
    let objs: Vec<usize> = (0..delta.sequences.len()).filter(|&i| *delta.sequences[i].last().unwrap() == c).collect();
    let mut morphisms = Vec::new();
    let mut maps: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut identities = vec![0; objs.len()];
    for (ia, &a) in objs.iter().enumerate() {
        for (ib, &b) in objs.iter().enumerate() {
            for s in delta.summands(a, b) {
                if s.unit {
                    if ia == ib {
                        identities[ia] = morphisms.len();
                    }
                    let label = s.phi.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("");
                    morphisms.push(Morphism { src: ia, tgt: ib, label });
                    maps.push((ia, ib, s.phi.clone()));
                }
            }
        }
    }
    let names = objs.iter().map(|&a| delta.cat.name(a).to_string()).collect();
    let degrees = objs.iter().map(|&a| delta.sequences[a].len() as i64 - 1).collect();
    let m2 = maps.clone();
    let oc = OrdinaryCategory::new(names, morphisms, identities, Some(degrees), |g, f| {
        let comp: Vec<usize> = m2[f].2.iter().map(|&v| m2[g].2[v]).collect();
        m2.iter().position(|(s, t, p)| *s == m2[f].0 && *t == m2[g].1 && *p == comp).expect("top-preserving maps compose")
    })
    .expect("comma category is a category");
    let lin = oc.linearize();
    let lists: Vec<Vec<usize>> =
        (0..objs.len() * objs.len()).map(|p| oc.hom_list(p / objs.len(), p % objs.len())).collect();
    let k = objs.len();
    let functor = DgFunctor::from_fn(&lin, &delta.cat, objs.clone(), |a, b, t, i| {
        let m = lists[a * k + b][i];
        let phi = &maps[m].2;
        delta.summand_elem(objs[a], objs[b], phi, &Elem::basis(t, 1, 0))
    });
    (oc, functor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_categories_validate() {
        for c in [
            DgCategory::unit_category(),
            DgCategory::zmod(2),
            DgCategory::group_ring_cyclic(2),
            DgCategory::group_ring_cyclic(3),
            DgCategory::exterior(),
            DgCategory::arrow_with_hom(ChainComplex::concentrated(0, FpGroup::free(2))),
            OrdinaryCategory::poset(2).linearize(),
            OrdinaryCategory::simplex_category(2, MonotoneKind::All).linearize(),
            OrdinaryCategory::simplex_category(2, MonotoneKind::Injective).linearize(),
        ] {
            c.validate().unwrap();
            c.opposite().validate().unwrap();
        }
    }

    #[test]
    fn local_flatness_examples() {
        assert!(DgCategory::group_ring_cyclic(2).is_locally_flat().flat);
        let v = DgCategory::zmod(2).is_locally_flat();
        assert!(!v.flat);
        assert_eq!(v.failures.len(), 1);
        assert!(OrdinaryCategory::simplex_category(2, MonotoneKind::All).linearize().is_locally_flat().flat);
    }

    #[test]
    fn tensor_of_categories_validates() {
        let a = DgCategory::exterior();
        let b = OrdinaryCategory::poset(1).linearize();
        a.tensor(&b).validate().unwrap();
        a.tensor(&a).validate().unwrap();
        a.opposite().tensor(&a).validate().unwrap();
    }

    #[test]
    fn delta_category_shapes() {
        let r = DgCategory::group_ring_cyclic(2);
        let d = delta_category(&r, DegreeTruncation { max_length: 2 }).unwrap();
        d.cat.validate().unwrap();
        d.cat.check_direct().unwrap();
        d.projection.validate().unwrap();
        let a = d.sequence_index(&[0]).unwrap();
        let b = d.sequence_index(&[0, 0]).unwrap();
        // one unit summand (φ(0) = 1) and one copy of R (φ(0) = 0)
        let s = d.summands(a, b);
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().filter(|x| x.unit).count(), 1);
        assert_eq!(d.cat.hom(a, b).gens(0), 1 + 2);
        for x in 0..d.sequences.len() {
            assert_eq!(d.summands(x, x).iter().filter(|s| s.unit).count(), 1);
        }
        assert!(d.cat.hom(b, a).is_empty());
    }

    #[test]
    fn comma_top_counts() {
        let u = DgCategory::unit_category();
        let d = delta_category(&u, DegreeTruncation { max_length: 2 }).unwrap();
        let (oc, f) = comma_top_category(&d, 0);
        f.validate().unwrap();
        assert_eq!(oc.objects.len(), 3);
        assert_eq!(oc.hom_list(0, 1).len(), 1);
        assert_eq!(oc.hom_list(0, 2).len(), 1);
        assert_eq!(oc.hom_list(1, 2).len(), 2);
        // (c) is initial
        for s in 0..3 {
            assert_eq!(oc.hom_list(0, s).len(), 1);
        }
        let d0 = delta_category(&u, DegreeTruncation { max_length: 0 }).unwrap();
        let (oc0, _) = comma_top_category(&d0, 0);
        assert_eq!(oc0.objects.len(), 1);
        assert_eq!(oc0.morphisms.len(), 1);
    }

    #[test]
    fn discrete_and_full_subcategories() {
        let c = OrdinaryCategory::poset(2).linearize();
        let (_, incl) = c.discrete();
        incl.validate().unwrap();
        let (sub, incl) = c.full_subcategory(&[0, 2]);
        sub.validate().unwrap();
        incl.validate().unwrap();
    }
}
