//! Bar construction.
//!
//! `B_n(X)(c) = Σ C(c_n, c) ⊗ C(c_{n-1}, c_n) ⊗ … ⊗ C(c_0, c_1) ⊗ X(c_0)`
//! realized as an unnormalized total complex truncated at simplicial
//! degree `N`, with its augmentation to `X`. Also: the extra-degeneracy
//! contraction on representables, latching maps of the bar object,
//! canonical frames, witnesses for the generating colimits of weak
//! equivalences and the `Z/2` counterexample.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::chainz::{
    self, basis_elems, parity, sign, ChainComplex, ChainMap, Elem, Falsifier, FpGroup, ReductionBuilder, SumLayout,
    TensorProduct,
};
use crate::dgcat::{DgCategory, LocalFlatness};
use crate::diagram::{self, Cube, Diagram, DiagramError, Transformation};
use crate::{Int, IntMatrix};

#[derive(Debug, Clone, Error)]
pub enum BarError {
    #[error("hom({from}, {to}) has generators in negative degree {degree}")]
    NegativeHom { from: usize, to: usize, degree: i64 },
    #[error("value at object {object} has generators in negative degree {degree}")]
    NegativeValue { object: usize, degree: i64 },
    #[error("truncation {truncation} is too small: degree {requested} requested, {safe} is the last safe degree")]
    Truncation { truncation: usize, requested: i64, safe: i64 },
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Generator of a bar term: summand, internal degree, index in the summand.
pub type BarGen = (usize, i64, usize);
/// Finite combination of bar generators.
pub type BarChain = BTreeMap<BarGen, Int>;

type Sparse = (i64, Vec<(usize, Int)>);

fn add_term(ch: &mut BarChain, k: BarGen, v: Int) {
    if v.is_zero() {
        return;
    }
    let e = ch.entry(k).or_insert_with(Int::zero);
    *e += v;
    if e.is_zero() {
        ch.remove(&k);
    }
}

fn add_chain(acc: &mut BarChain, other: &BarChain, k: &Int) {
    for (g, v) in other {
        add_term(acc, *g, v * k);
    }
}

fn sparse(x: &Elem) -> Sparse {
    (x.deg, x.v.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, a)| (i, a.clone())).collect())
}

fn unit_sparse(deg: i64, i: usize) -> Sparse {
    (deg, vec![(i, Int::one())])
}

/// Expand a pure tensor of sparse factors into flat indices of `tp`.
fn expand(tp: &TensorProduct, fs: &[Sparse], coeff: &Int, mut out: impl FnMut(i64, usize, Int)) {
    let degs: Vec<i64> = fs.iter().map(|f| f.0).collect();
    let Some(b) = tp.block(&degs) else { return };
    let q = degs.iter().sum();
    let mut acc: Vec<(usize, Int)> = vec![(0, coeff.clone())];
    for (k, f) in fs.iter().enumerate() {
        let dim = tp.factors()[k].gens(degs[k]);
        let mut next = Vec::with_capacity(acc.len() * f.1.len());
        for (i, a) in &acc {
            for (j, c) in &f.1 {
                next.push((i * dim + j, a * c));
            }
        }
        acc = next;
        if acc.is_empty() {
            return;
        }
    }
    for (i, a) in acc {
        out(q, b.offset + i, a);
    }
}

fn column(m: &IntMatrix, j: usize) -> Vec<(usize, Int)> {
    if j >= m.cols() {
        return Vec::new();
    }
    (0..m.rows()).filter(|&r| !m.get(r, j).is_zero()).map(|r| (r, m.get(r, j).clone())).collect()
}

/// Lowest degree carrying generators.
fn min_degree(c: &ChainComplex) -> Option<i64> {
    c.degrees().find(|&t| c.gens(t) > 0)
}

// ---------------------------------------------------------------- bar complex

#[derive(Clone, Debug)]
struct Summand {
    /// `[c, c_n, ..., c_0]`; factor `p <= n` is `hom(objs[p+1], objs[p])`,
    /// factor `n + 1` is `X(objs[n+1])`.
    objs: Vec<usize>,
    tp: TensorProduct,
    free: bool,
}

impl Summand {
    fn n(&self) -> usize {
        self.objs.len() - 2
    }
}

#[derive(Clone, Debug)]
struct Realized {
    layout: SumLayout,
    complex: ChainComplex,
    offsets: BTreeMap<i64, Vec<usize>>,
}

/// Truncated bar construction of a diagram.
#[derive(Clone, Debug)]
pub struct BarComplex {
    shape: DgCategory,
    x: Diagram,
    truncation: usize,
    summands: Vec<Summand>,
    index: HashMap<Vec<usize>, usize>,
    by_object: Vec<Vec<usize>>,
    part: Vec<usize>,
    realized: OnceLock<Vec<Realized>>,
    diagram: OnceLock<Diagram>,
}

fn check_homs(shape: &DgCategory) -> Result<(), BarError> {
    for a in shape.objects() {
        for b in shape.objects() {
            if let Some(d) = min_degree(shape.hom(a, b)).filter(|&d| d < 0) {
                return Err(BarError::NegativeHom { from: a, to: b, degree: d });
            }
        }
    }
    Ok(())
}

impl BarComplex {
    /// Requires homs and values in degrees `>= 0`.
    pub fn new(x: &Diagram, truncation: usize) -> Result<Self, BarError> {
        let shape = x.shape().clone();
        check_homs(&shape)?;
        for c in shape.objects() {
            if let Some(d) = min_degree(x.value(c)).filter(|&d| d < 0) {
                return Err(BarError::NegativeValue { object: c, degree: d });
            }
        }
        let mut summands = Vec::new();
        let mut index = HashMap::new();
        let mut by_object = vec![Vec::new(); shape.n()];
        let mut part = Vec::new();
        for c in shape.objects() {
            for n in 0..=truncation {
                let mut seqs = Vec::new();
                sequences(&shape, x, vec![c], n + 2, &mut seqs);
                for objs in seqs {
                    let mut factors: Vec<ChainComplex> =
                        (0..=n).map(|p| shape.hom(objs[p + 1], objs[p]).clone()).collect();
                    factors.push(x.value(objs[n + 1]).clone());
                    let free = factors.iter().all(|f| f.degrees().all(|t| f.rels(t).cols() == 0));
                    let s = summands.len();
                    index.insert(objs.clone(), s);
                    part.push(by_object[c].len());
                    by_object[c].push(s);
                    summands.push(Summand { objs, tp: TensorProduct::new(factors), free });
                }
            }
        }
        Ok(BarComplex {
            shape,
            x: x.clone(),
            truncation,
            summands,
            index,
            by_object,
            part,
            realized: OnceLock::new(),
            diagram: OnceLock::new(),
        })
    }

    pub fn shape(&self) -> &DgCategory {
        &self.shape
    }

    /// The diagram being resolved.
    pub fn input(&self) -> &Diagram {
        &self.x
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Last total degree in which the augmentation is asserted to be a
    /// weak equivalence.
    pub fn safe_degree(&self) -> i64 {
        self.truncation as i64 - 2
    }

    /// Object sequences `[c, c_n, ..., c_0]` of the nonzero summands of
    /// `B_n(X)(c)`.
    pub fn sequences(&self, c: usize, n: usize) -> Vec<&[usize]> {
        self.by_object[c]
            .iter()
            .map(|&s| &self.summands[s])
            .filter(|s| s.n() == n)
            .map(|s| s.objs.as_slice())
            .collect()
    }

    /// Number of generators of `B_n(X)(c)` in internal degree `q`.
    pub fn term_gens(&self, c: usize, n: usize, q: i64) -> usize {
        self.by_object[c].iter().map(|&s| &self.summands[s]).filter(|s| s.n() == n).map(|s| s.tp.gens(q)).sum()
    }

    /// Generators of the realization, summed over objects and degrees.
    pub fn size(&self) -> usize {
        self.summands.iter().map(|s| s.tp.all_blocks().map(|(_, b)| b.size).sum::<usize>()).sum()
    }

    fn factors(&self, g: BarGen) -> (Vec<i64>, Vec<usize>) {
        self.summands[g.0].tp.unindex(g.1, g.2)
    }

    fn basis_factor(&self, s: usize, k: usize, deg: i64, i: usize) -> Elem {
        let f = &self.summands[s].tp.factors()[k];
        Elem::basis(deg, f.gens(deg), i)
    }

    fn put(&self, objs: &[usize], fs: &[Sparse], coeff: &Int, out: &mut BarChain) {
        if let Some(&s) = self.index.get(objs) {
            expand(&self.summands[s].tp, fs, coeff, |q, i, a| add_term(out, (s, q, i), a));
        }
    }

    fn pure(&self, g: BarGen) -> Vec<Sparse> {
        let (degs, idx) = self.factors(g);
        degs.into_iter().zip(idx).map(|(d, i)| unit_sparse(d, i)).collect()
    }

    /// Face `d_i`: for `i < n` composes factors `i` and `i + 1`, for `i = n`
    /// lets the last hom act on the value.
    fn face_into(&self, i: usize, g: BarGen, coeff: &Int, out: &mut BarChain) {
        let sm = &self.summands[g.0];
        let (n, o) = (sm.n(), &sm.objs);
        assert!(n >= 1 && i <= n, "face index out of range");
        let (degs, idx) = self.factors(g);
        let el = |k: usize| self.basis_factor(g.0, k, degs[k], idx[k]);
        let mut fs = self.pure(g);
        let mut objs = o.clone();
        let y = if i < n {
            self.shape.compose(o[i + 2], o[i + 1], o[i], &el(i), &el(i + 1))
        } else {
            self.x.act(o[n + 1], o[n], &el(n), &el(n + 1))
        };
        fs.splice(i..i + 2, [sparse(&y)]);
        objs.remove(i + 1);
        self.put(&objs, &fs, coeff, out);
    }

    /// Degeneracy `s_j`: inserts the unit of `objs[j+1]` after factor `j`.
    fn degeneracy_into(&self, j: usize, g: BarGen, coeff: &Int, out: &mut BarChain) {
        let sm = &self.summands[g.0];
        assert!(j <= sm.n(), "degeneracy index out of range");
        let mut fs = self.pure(g);
        let mut objs = sm.objs.clone();
        let c = objs[j + 1];
        objs.insert(j + 1, c);
        fs.insert(j + 1, sparse(self.shape.unit(c)));
        self.put(&objs, &fs, coeff, out);
    }

    /// `(-1)^n` times the Koszul differential of the tensor factors.
    fn internal_into(&self, g: BarGen, coeff: &Int, out: &mut BarChain) {
        let sm = &self.summands[g.0];
        let (degs, idx) = self.factors(g);
        let mut koszul = sm.n() as i64;
        for k in 0..degs.len() {
            let col = column(sm.tp.factors()[k].d(degs[k]), idx[k]);
            if !col.is_empty() {
                let mut fs = self.pure(g);
                fs[k] = (degs[k] - 1, col);
                expand(&sm.tp, &fs, &(coeff * sign(parity(koszul))), |q, i, a| add_term(out, (g.0, q, i), a));
            }
            koszul += degs[k];
        }
    }

    /// Total differential `Σ (-1)^i d_i + (-1)^n ∂` on a generator.
    pub fn d_gen(&self, g: BarGen) -> BarChain {
        let mut out = BarChain::new();
        let n = self.summands[g.0].n();
        if n >= 1 {
            for i in 0..=n {
                self.face_into(i, g, &sign(i % 2 == 1), &mut out);
            }
        }
        self.internal_into(g, &Int::one(), &mut out);
        out
    }

    pub fn d(&self, x: &BarChain) -> BarChain {
        let mut out = BarChain::new();
        for (g, a) in x {
            add_chain(&mut out, &self.d_gen(*g), a);
        }
        out
    }

    pub fn face(&self, i: usize, x: &BarChain) -> BarChain {
        let mut out = BarChain::new();
        for (g, a) in x {
            self.face_into(i, *g, a, &mut out);
        }
        out
    }

    pub fn degeneracy(&self, j: usize, x: &BarChain) -> BarChain {
        let mut out = BarChain::new();
        for (g, a) in x {
            self.degeneracy_into(j, *g, a, &mut out);
        }
        out
    }

    /// Simplicial degree of a generator.
    pub fn simplicial_degree(&self, g: BarGen) -> usize {
        self.summands[g.0].n()
    }

    /// All generators of `B_n(X)(c)` in every internal degree.
    pub fn generators(&self, c: usize, n: usize) -> Vec<BarGen> {
        let mut out = Vec::new();
        for &s in &self.by_object[c] {
            let sm = &self.summands[s];
            if sm.n() != n {
                continue;
            }
            for (q, b) in sm.tp.all_blocks() {
                for i in b.offset..b.offset + b.size {
                    out.push((s, q, i));
                }
            }
        }
        out
    }

    /// Zero modulo the relations of each summand.
    pub fn is_zero(&self, x: &BarChain) -> bool {
        let mut groups: BTreeMap<(usize, i64), Vec<(usize, &Int)>> = BTreeMap::new();
        for ((s, q, i), a) in x {
            if self.summands[*s].free {
                return false;
            }
            groups.entry((*s, *q)).or_default().push((*i, a));
        }
        groups.into_iter().all(|((s, q), entries)| {
            let tp = &self.summands[s].tp;
            let mut v = vec![Int::zero(); tp.gens(q)];
            for (i, a) in entries {
                v[i] = a.clone();
            }
            tp.complex().group(q).lattice().contains(&v)
        })
    }

    /// First failing simplicial identity on generators of simplicial degree
    /// `<= max_n` (capped by the truncation).
    pub fn simplicial_identity_failure(&self, max_n: usize) -> Option<String> {
        let top = max_n.min(self.truncation);
        for c in self.shape.objects() {
            for n in 0..=top {
                for g in self.generators(c, n) {
                    let x: BarChain = [(g, Int::one())].into_iter().collect();
                    if let Some(msg) = self.identities_at(&x, n) {
                        return Some(format!("object {c}, generator {g:?}: {msg}"));
                    }
                }
            }
        }
        None
    }

    fn identities_at(&self, x: &BarChain, n: usize) -> Option<String> {
        let diff = |a: &BarChain, b: &BarChain| {
            let mut d = a.clone();
            add_chain(&mut d, b, &-Int::one());
            d
        };
        for j in 1..=n {
            for i in 0..j {
                if n >= 2 {
                    let l = self.face(i, &self.face(j, x));
                    let r = self.face(j - 1, &self.face(i, x));
                    if !self.is_zero(&diff(&l, &r)) {
                        return Some(format!("d_{i} d_{j} != d_{} d_{i}", j - 1));
                    }
                }
            }
        }
        if n < self.truncation {
            for j in 0..=n {
                let sx = self.degeneracy(j, x);
                for i in 0..=n + 1 {
                    let l = self.face(i, &sx);
                    let r = if i < j {
                        if n == 0 {
                            continue;
                        }
                        self.degeneracy(j - 1, &self.face(i, x))
                    } else if i == j || i == j + 1 {
                        x.clone()
                    } else {
                        self.degeneracy(j, &self.face(i - 1, x))
                    };
                    if !self.is_zero(&diff(&l, &r)) {
                        return Some(format!("d_{i} s_{j} fails"));
                    }
                }
            }
        }
        if n + 1 < self.truncation {
            for j in 0..=n {
                for i in 0..=j {
                    let l = self.degeneracy(i, &self.degeneracy(j, x));
                    let r = self.degeneracy(j + 1, &self.degeneracy(i, x));
                    if !self.is_zero(&diff(&l, &r)) {
                        return Some(format!("s_{i} s_{j} != s_{} s_{i}", j + 1));
                    }
                }
            }
        }
        None
    }

    // ------------------------------------------------------------ realization

    fn realized(&self) -> &[Realized] {
        self.realized.get_or_init(|| self.shape.objects().map(|c| self.realize(c)).collect())
    }

    fn realize(&self, c: usize) -> Realized {
        let parts: Vec<ChainComplex> = self.by_object[c]
            .iter()
            .map(|&s| {
                let sm = &self.summands[s];
                sm.tp.complex().shift(sm.n() as i64)
            })
            .collect();
        let layout = SumLayout::new(parts);
        let base = layout.complex().clone();
        if base.is_empty() {
            return Realized { layout, complex: base, offsets: BTreeMap::new() };
        }
        let offsets: BTreeMap<i64, Vec<usize>> = (base.lo() - 1..=base.hi())
            .map(|t| {
                let mut acc = 0;
                let v = layout
                    .parts()
                    .iter()
                    .map(|p| {
                        let o = acc;
                        acc += p.gens(t);
                        o
                    })
                    .collect();
                (t, v)
            })
            .collect();
        let groups: Vec<FpGroup> = base.degrees().map(|t| base.group(t).clone()).collect();
        let complex = ChainComplex::from_parts(base.lo(), groups, |t| {
            let mut m = IntMatrix::zeros(base.gens(t - 1), base.gens(t));
            for (p, &s) in self.by_object[c].iter().enumerate() {
                let sm = &self.summands[s];
                let q = t - sm.n() as i64;
                for l in 0..sm.tp.gens(q) {
                    for ((s2, _, l2), a) in self.d_gen((s, q, l)) {
                        m.set(offsets[&(t - 1)][self.part[s2]] + l2, offsets[&t][p] + l, a);
                    }
                }
            }
            m
        });
        Realized { layout, complex, offsets }
    }

    /// Realized total complex `B(X)(c)`.
    pub fn total(&self, c: usize) -> &ChainComplex {
        &self.realized()[c].complex
    }

    /// Generator of the total complex behind a flat index.
    pub fn locate(&self, c: usize, t: i64, flat: usize) -> BarGen {
        let r = &self.realized()[c];
        let (p, l) = r.layout.locate(t, flat);
        let s = self.by_object[c][p];
        (s, t - self.summands[s].n() as i64, l)
    }

    /// Dense element of `B(X)(c)` in total degree `t`.
    pub fn to_elem(&self, c: usize, t: i64, x: &BarChain) -> Elem {
        let r = &self.realized()[c];
        let mut out = Elem::zero(t, r.complex.gens(t));
        for ((s, q, l), a) in x {
            let sm = &self.summands[*s];
            assert_eq!(sm.objs[0], c, "chain lives over another object");
            assert_eq!(q + sm.n() as i64, t, "chain has the wrong total degree");
            out.v[r.offsets[&t][self.part[*s]] + l] += a;
        }
        out
    }

    /// `B(X)` as a diagram; `g·(e_0 ⊗ rest) = (-1)^{|g| n} (g e_0) ⊗ rest`.
    pub fn diagram(&self) -> &Diagram {
        self.diagram.get_or_init(|| {
            let values = self.shape.objects().map(|c| self.total(c).clone()).collect();
            Diagram::from_fn(&self.shape, values, |a, b, dl, i, dr, j| {
                let g = self.locate(a, dr, j);
                let sm = &self.summands[g.0];
                let (degs, idx) = self.factors(g);
                let phi = Elem::basis(dl, self.shape.hom(a, b).gens(dl), i);
                let y = self.shape.compose(sm.objs[1], a, b, &phi, &self.basis_factor(g.0, 0, degs[0], idx[0]));
                let mut fs = self.pure(g);
                fs[0] = sparse(&y);
                let mut objs = sm.objs.clone();
                objs[0] = b;
                let mut out = BarChain::new();
                self.put(&objs, &fs, &sign(parity(dl * sm.n() as i64)), &mut out);
                self.to_elem(b, dl + dr, &out)
            })
        })
    }

    /// `ε` on a generator of `B_0`; zero on higher simplicial degrees.
    pub fn augment_gen(&self, g: BarGen) -> Elem {
        let sm = &self.summands[g.0];
        let c = sm.objs[0];
        let t = g.1 + sm.n() as i64;
        if sm.n() != 0 {
            return Elem::zero(t, self.x.value(c).gens(t));
        }
        let (degs, idx) = self.factors(g);
        let e0 = self.basis_factor(g.0, 0, degs[0], idx[0]);
        let x = self.basis_factor(g.0, 1, degs[1], idx[1]);
        self.x.act(sm.objs[1], c, &e0, &x)
    }

    /// Augmentation `ε: B(X) -> X`.
    pub fn augmentation(&self) -> Transformation {
        Transformation::from_gen_fn(self.diagram(), &self.x, |c, t, i| self.augment_gen(self.locate(c, t, i)))
    }

    /// `B(f): B(X) -> B(Y)` for `f: X -> Y`, where `other` is the bar
    /// construction of `Y` with the same truncation.
    pub fn map(&self, other: &BarComplex, f: &Transformation) -> Result<Transformation, BarError> {
        if other.truncation != self.truncation || other.shape != self.shape {
            return Err(BarError::Hypothesis("bar constructions differ in shape or truncation".into()));
        }
        Ok(Transformation::from_gen_fn(self.diagram(), other.diagram(), |c, t, i| {
            let g = self.locate(c, t, i);
            let sm = &self.summands[g.0];
            let n = sm.n();
            let (degs, idx) = self.factors(g);
            let x = self.basis_factor(g.0, n + 1, degs[n + 1], idx[n + 1]);
            let mut fs = self.pure(g);
            fs[n + 1] = sparse(&f.apply(sm.objs[n + 1], &x));
            let mut out = BarChain::new();
            other.put(&sm.objs, &fs, &Int::one(), &mut out);
            other.to_elem(c, t, &out)
        }))
    }

    /// `B_n(X)(c)` with its internal differential.
    pub fn term(&self, c: usize, n: usize) -> ChainComplex {
        let parts: Vec<&ChainComplex> = self.term_summands(c, n).iter().map(|&s| self.summands[s].tp.complex()).collect();
        ChainComplex::direct_sum(&parts)
    }

    fn term_summands(&self, c: usize, n: usize) -> Vec<usize> {
        self.by_object[c].iter().copied().filter(|&s| self.summands[s].n() == n).collect()
    }

    fn term_map(&self, c: usize, n: usize, m: usize, op: impl Fn(BarGen) -> BarChain) -> ChainMap {
        let (src, tgt) = (self.term(c, n), self.term(c, m));
        let (ss, ts) = (self.term_summands(c, n), self.term_summands(c, m));
        let off = |list: &[usize], q: i64, s: usize| -> usize {
            list.iter().take_while(|&&x| x != s).map(|&x| self.summands[x].tp.gens(q)).sum()
        };
        ChainMap::from_gen_fn(&src, &tgt, |q, flat| {
            let mut rem = flat;
            let mut found = None;
            for &s in &ss {
                let g = self.summands[s].tp.gens(q);
                if rem < g {
                    found = Some(s);
                    break;
                }
                rem -= g;
            }
            let s = found.expect("generator in range");
            let mut out = Elem::zero(q, tgt.gens(q));
            for ((s2, _, l2), a) in op((s, q, rem)) {
                out.v[off(&ts, q, s2) + l2] += a;
            }
            out
        })
    }

    /// `d_i: B_n(X)(c) -> B_{n-1}(X)(c)`.
    pub fn face_map(&self, c: usize, n: usize, i: usize) -> ChainMap {
        self.term_map(c, n, n - 1, |g| {
            let mut out = BarChain::new();
            self.face_into(i, g, &Int::one(), &mut out);
            out
        })
    }

    /// `s_j: B_n(X)(c) -> B_{n+1}(X)(c)`, for `n < N`.
    pub fn degeneracy_map(&self, c: usize, n: usize, j: usize) -> ChainMap {
        self.term_map(c, n, n + 1, |g| {
            let mut out = BarChain::new();
            self.degeneracy_into(j, g, &Int::one(), &mut out);
            out
        })
    }
}

fn sequences(shape: &DgCategory, x: &Diagram, cur: Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
    if cur.len() == len {
        if !x.value(*cur.last().unwrap()).is_empty() {
            out.push(cur);
        }
        return;
    }
    let last = *cur.last().unwrap();
    for d in shape.objects() {
        if !shape.hom(d, last).is_empty() {
            let mut next = cur.clone();
            next.push(d);
            sequences(shape, x, next, len, out);
        }
    }
}

/// `X[k]` with `φ·(s^k x) = (-1)^{|φ| k} s^k (φ·x)`.
pub fn shift_diagram(x: &Diagram, k: i64) -> Diagram {
    let values = x.values().iter().map(|v| v.shift(k)).collect();
    Diagram::from_fn(x.shape(), values, |a, b, dl, i, dr, j| {
        let y = x.action(a, b).apply_gens(dl, i, dr - k, j);
        Elem::new(dl + dr, y.v).scaled(&sign(parity(dl * k)))
    })
}

// ---------------------------------------------------------------- replacement

/// Bar replacement `ε: B -> X[shift]`.
#[derive(Clone, Debug)]
pub struct BarReplacement {
    pub bar: BarComplex,
    pub diagram: Diagram,
    pub augmentation: Transformation,
    /// Shift applied to the input so that its values start in degree `>= 0`.
    pub shift: i64,
    pub safe_degree: i64,
}

impl BarReplacement {
    /// First object where `ε` fails to be a weak equivalence through the
    /// safe degree.
    pub fn we_failure(&self) -> Option<usize> {
        let k = self.safe_degree;
        self.augmentation.components().iter().position(|f| !f.is_weak_equivalence_through(k))
    }

    pub fn augmentation_is_we(&self) -> bool {
        self.we_failure().is_none()
    }

    /// `ε` checked through degree `k`, which must lie in the safe range.
    pub fn augmentation_is_we_through(&self, k: i64) -> Result<bool, BarError> {
        if k > self.safe_degree {
            return Err(BarError::Truncation { truncation: self.bar.truncation, requested: k, safe: self.safe_degree });
        }
        Ok(self.augmentation.components().iter().all(|f| f.is_weak_equivalence_through(k)))
    }
}

pub fn bar_replacement(x: &Diagram, truncation: usize) -> Result<BarReplacement, BarError> {
    check_homs(x.shape())?;
    if truncation < 2 {
        return Err(BarError::Truncation { truncation, requested: 0, safe: truncation as i64 - 2 });
    }
    let lo = x.values().iter().filter_map(min_degree).min().unwrap_or(0);
    let shift = (-lo).max(0);
    let input = if shift > 0 { shift_diagram(x, shift) } else { x.clone() };
    let bar = BarComplex::new(&input, truncation)?;
    let diagram = bar.diagram().clone();
    let augmentation = bar.augmentation();
    let safe_degree = bar.safe_degree();
    Ok(BarReplacement { bar, diagram, augmentation, shift, safe_degree })
}

// ---------------------------------------------------------------- contraction

/// Outcome of the extra-degeneracy contraction of `B(C_c ⊗ M)`.
#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub object: usize,
    pub truncation: usize,
    /// Total degrees checked for the homotopy identity.
    pub through: i64,
    pub shift: i64,
    /// `ε∘s = id`.
    pub section: bool,
    /// `Dh + hD = id - s∘ε`.
    pub homotopy: bool,
    /// `D∘D = 0` on the checked generators.
    pub square_zero: bool,
    pub generators: usize,
    pub failure: Option<String>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.section && self.homotopy && self.square_zero
    }
}

/// Augmented bar construction of a free diagram `C_c ⊗ M` with the section
/// and homotopy induced by the extra degeneracy.
#[derive(Clone, Debug)]
pub struct AugmentedExtra {
    pub bar: BarComplex,
    pub object: usize,
    pub module: ChainComplex,
    layouts: Vec<TensorProduct>,
}

impl AugmentedExtra {
    pub fn new(shape: &DgCategory, c: usize, m: &ChainComplex, truncation: usize) -> Result<Self, BarError> {
        let x = Diagram::representable(shape, c).tensor_complex(m);
        let bar = BarComplex::new(&x, truncation)?;
        let layouts = shape.objects().map(|d| TensorProduct::new(vec![shape.hom(c, d).clone(), m.clone()])).collect();
        Ok(AugmentedExtra { bar, object: c, module: m.clone(), layouts })
    }

    /// `id_c ⊗ m` in `X(c)`.
    fn unit_tensor(&self, mdeg: i64, mi: usize) -> Sparse {
        let m = Elem::basis(mdeg, self.module.gens(mdeg), mi);
        sparse(&self.layouts[self.object].tensor_elems(&[self.bar.shape.unit(self.object), &m]))
    }

    /// Extra degeneracy `φ ⊗ m ↦ φ ⊗ (id_c ⊗ m)` on the value factor.
    fn extra_into(&self, g: BarGen, coeff: &Int, out: &mut BarChain) {
        let sm = &self.bar.summands[g.0];
        let n = sm.n();
        let (degs, idx) = self.bar.factors(g);
        let (xd, xi) = self.layouts[sm.objs[n + 1]].unindex(degs[n + 1], idx[n + 1]);
        let mut fs = self.bar.pure(g);
        fs[n + 1] = unit_sparse(xd[0], xi[0]);
        fs.push(self.unit_tensor(xd[1], xi[1]));
        let mut objs = sm.objs.clone();
        objs.push(self.object);
        self.bar.put(&objs, &fs, coeff, out);
    }

    /// Homotopy `h = (-1)^{n+1} s_{extra}` on `B_n`.
    pub fn homotopy(&self, x: &BarChain) -> BarChain {
        let mut out = BarChain::new();
        for (g, a) in x {
            let n = self.bar.summands[g.0].n() as i64;
            self.extra_into(*g, &(a * sign(parity(n + 1))), &mut out);
        }
        out
    }

    /// Section `s: X(d) -> B_0(d)` on a generator of `X(d)`.
    pub fn section_gen(&self, d: usize, t: i64, j: usize) -> BarChain {
        let (xd, xi) = self.layouts[d].unindex(t, j);
        let fs = vec![unit_sparse(xd[0], xi[0]), self.unit_tensor(xd[1], xi[1])];
        let mut out = BarChain::new();
        self.bar.put(&[d, self.object], &fs, &Int::one(), &mut out);
        out
    }

    fn section(&self, d: usize, x: &Elem) -> BarChain {
        let mut out = BarChain::new();
        for (j, a) in x.v.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            add_chain(&mut out, &self.section_gen(d, x.deg, j), a);
        }
        out
    }

    fn augment(&self, d: usize, t: i64, x: &BarChain) -> Elem {
        let mut out = Elem::zero(t, self.bar.x.value(d).gens(t));
        for (g, a) in x {
            out.add_assign(&self.bar.augment_gen(*g).scaled(a));
        }
        out
    }

    /// Verify the section and the homotopy on generators of total degree
    /// `<= through`.
    pub fn check(&self, through: i64) -> Result<ContractionReport, BarError> {
        let bar = &self.bar;
        let safe = bar.safe_degree();
        if through > safe {
            return Err(BarError::Truncation { truncation: bar.truncation, requested: through, safe });
        }
        let mut rep = ContractionReport {
            object: self.object,
            truncation: bar.truncation,
            through,
            shift: 0,
            section: true,
            homotopy: true,
            square_zero: true,
            generators: 0,
            failure: None,
        };
        for d in bar.shape.objects() {
            let xv = bar.x.value(d);
            for x in basis_elems(xv) {
                let back = self.augment(d, x.deg, &self.section(d, &x));
                if !xv.is_zero_elem(&back.minus(&x)) {
                    rep.section = false;
                    rep.failure.get_or_insert(format!("ε∘s differs from id on {x:?} at object {d}"));
                }
            }
            for n in 0..=through.max(-1) as usize {
                for g in bar.generators(d, n) {
                    let t = g.1 + n as i64;
                    if t > through {
                        continue;
                    }
                    rep.generators += 1;
                    let b: BarChain = [(g, Int::one())].into_iter().collect();
                    let db = bar.d(&b);
                    if !bar.is_zero(&bar.d(&db)) {
                        rep.square_zero = false;
                        rep.failure.get_or_insert(format!("D∘D is nonzero on {g:?} at object {d}"));
                    }
                    let mut lhs = bar.d(&self.homotopy(&b));
                    add_chain(&mut lhs, &self.homotopy(&db), &Int::one());
                    add_chain(&mut lhs, &b, &-Int::one());
                    if n == 0 {
                        let e = self.augment(d, t, &b);
                        add_chain(&mut lhs, &self.section(d, &e), &Int::one());
                    }
                    if !bar.is_zero(&lhs) {
                        rep.homotopy = false;
                        rep.failure.get_or_insert(format!("Dh + hD != id - sε on {g:?} at object {d}"));
                    }
                }
            }
        }
        Ok(rep)
    }
}

/// Contraction of `B(C_c ⊗ M)` through total degree `N - 2`.
pub fn contraction_check(shape: &DgCategory, c: usize, m: &ChainComplex, truncation: usize) -> Result<ContractionReport, BarError> {
    if truncation < 2 {
        return Err(BarError::Truncation { truncation, requested: 0, safe: truncation as i64 - 2 });
    }
    let shift = min_degree(m).map(|d| (-d).max(0)).unwrap_or(0);
    let m = m.shift(shift);
    let ext = AugmentedExtra::new(shape, c, &m, truncation)?;
    let mut rep = ext.check(truncation as i64 - 2)?;
    rep.shift = shift;
    Ok(rep)
}

// ---------------------------------------------------------------- latching

/// Verdict on the latching maps of the bar object in one simplicial degree.
#[derive(Clone, Debug)]
pub struct LatchingReport {
    pub n: usize,
    /// `Some(c)` for the augmented object `B C_c`.
    pub augmented: Option<usize>,
    pub skipped: Option<String>,
    pub sequences: usize,
    /// Sequence `c_0, ..., c_n`, degree and reason.
    pub failures: Vec<(Vec<usize>, i64, String)>,
}

impl LatchingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// One coordinate of the latching cube: `dom -> top`, the domain being
/// `Z` mapping to `unit` or zero.
struct Arrow<'a> {
    top: &'a ChainComplex,
    unit: Option<&'a Elem>,
}

fn arrow_cube(a: &Arrow) -> Cube {
    match a.unit {
        Some(u) => Cube::arrow(&ChainMap::from_gen_fn(&ChainComplex::unit(), a.top, |_, _| u.clone())),
        None => Cube::arrow(&ChainMap::from_zero(a.top)),
    }
}

/// Split injectivity with free cokernel of the pushout corner map of
/// `⊗ (dom_k -> top_k)`, first failing degree.
fn corner_failure(arrows: &[Arrow]) -> Option<(i64, String)> {
    let m = arrows.len();
    if m == 0 || arrows.iter().any(|a| a.top.is_empty()) {
        return None;
    }
    let has_rels = arrows.iter().any(|a| a.top.degrees().any(|t| a.top.rels(t).cols() > 0));
    if has_rels {
        let cube = arrows.iter().skip(1).fold(arrow_cube(&arrows[0]), |acc, a| acc.tensor(&arrow_cube(a)));
        return diagram::pcm(&cube).map.cofibration_failure();
    }
    let full = (1usize << m) - 1;
    let unit = ChainComplex::unit();
    let vertex = |mask: usize| -> Option<TensorProduct> {
        let mut fs = Vec::with_capacity(m);
        for (k, a) in arrows.iter().enumerate() {
            if mask & (1 << k) != 0 {
                fs.push(a.top.clone());
            } else if a.unit.is_some() {
                fs.push(unit.clone());
            } else {
                return None;
            }
        }
        Some(TensorProduct::new(fs))
    };
    let vertices: Vec<(usize, TensorProduct)> = (0..full).filter_map(|mask| vertex(mask).map(|v| (mask, v))).collect();
    let top = vertex(full).expect("full vertex is nonzero");
    // image of a pure tensor when the factors outside `mask` move to their units
    let push_up = |mask: usize, to: usize, degs: &[i64], idx: &[usize]| -> Vec<Sparse> {
        (0..m)
            .map(|k| {
                if mask & (1 << k) == 0 && to & (1 << k) != 0 {
                    sparse(arrows[k].unit.expect("nonzero domain"))
                } else {
                    unit_sparse(degs[k], idx[k])
                }
            })
            .collect()
    };
    for (t, _) in top.all_blocks().map(|(t, b)| (t, b.size)).collect::<BTreeMap<i64, usize>>() {
        let mut offsets = Vec::with_capacity(vertices.len());
        let mut dim = 0;
        for (_, v) in &vertices {
            offsets.push(dim);
            dim += v.gens(t);
        }
        let pos = |mask: usize| vertices.iter().position(|(mk, _)| *mk == mask);
        let mut rels = ReductionBuilder::new(dim);
        for (vi, (mask, v)) in vertices.iter().enumerate() {
            for k in 0..m {
                let to = mask | 1 << k;
                if mask & (1 << k) != 0 || to == full {
                    continue;
                }
                let ti = pos(to).expect("supersets of nonzero vertices are nonzero");
                for flat in 0..v.gens(t) {
                    let (degs, idx) = v.unindex(t, flat);
                    let mut col = vec![(offsets[vi] + flat, Int::one())];
                    expand(&vertices[ti].1, &push_up(*mask, to, &degs, &idx), &-Int::one(), |_, i, a| {
                        col.push((offsets[ti] + i, a))
                    });
                    rels.push(col);
                }
            }
        }
        let red = rels.finish();
        if red.rels().cols() > 0 {
            let cube = arrows.iter().skip(1).fold(arrow_cube(&arrows[0]), |acc, a| acc.tensor(&arrow_cube(a)));
            return diagram::pcm(&cube).map.cofibration_failure();
        }
        let mut image = ReductionBuilder::new(top.gens(t));
        let cols = red.keep().len();
        for &g in red.keep() {
            let vi = offsets.partition_point(|&o| o <= g) - 1;
            let (mask, v) = &vertices[vi];
            let (degs, idx) = v.unindex(t, g - offsets[vi]);
            let mut col = Vec::new();
            expand(&top, &push_up(*mask, full, &degs, &idx), &Int::one(), |_, i, a| col.push((i, a)));
            image.push(col);
        }
        let r = image.finish();
        let rank = r.dim() - r.keep().len() + r.rels().cols();
        if rank < cols {
            return Some((t, "latching map is not injective".into()));
        }
        if r.rels().invariant_factors().iter().any(|d| d.abs() > Int::one()) {
            return Some((t, "latching map has a cokernel with torsion".into()));
        }
    }
    None
}

fn latching(shape: &DgCategory, n: usize, augmented: Option<usize>) -> LatchingReport {
    let mut rep = LatchingReport { n, augmented, skipped: None, sequences: 0, failures: Vec::new() };
    let lf: LocalFlatness = shape.is_locally_flat();
    if !lf.flat {
        let (a, b, _) = &lf.failures[0];
        rep.skipped = Some(format!("not locally flat: hom({a}, {b}) is not flat"));
        return rep;
    }
    let k = shape.n();
    let total = k.pow(n as u32 + 1);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n + 1);
        let mut r = code;
        for _ in 0..=n {
            seq.push(r % k);
            r /= k;
        }
        let link = |from: usize, to: usize| Arrow {
            top: shape.hom(from, to),
            unit: if from == to { Some(shape.unit(to)) } else { None },
        };
        // X_n ⊗ ... ⊗ X_1 (⊗ X_0)
        let mut arrows: Vec<Arrow> = (1..=n).rev().map(|i| link(seq[i - 1], seq[i])).collect();
        if let Some(c) = augmented {
            arrows.push(link(c, seq[0]));
        }
        rep.sequences += 1;
        if let Some((t, why)) = corner_failure(&arrows) {
            rep.failures.push((seq, t, why));
        }
    }
    rep
}

/// Latching maps `L_n B C_• -> B_n C_•`: for every sequence the pushout
/// corner map of `X_n ⊗ … ⊗ X_1` must be a split injection with free
/// cokernel; the outer hom factors are flat by hypothesis.
pub fn bar_reedy_latching_check(shape: &DgCategory, n: usize) -> LatchingReport {
    latching(shape, n, None)
}

/// Same for the augmented object `B C_c` with the extra factor `X_0`.
pub fn bar_c_latching_check(shape: &DgCategory, c: usize, n: usize) -> LatchingReport {
    latching(shape, n, Some(c))
}

// ---------------------------------------------------------------- frames

/// Normalized chains on the `n`-simplex, or on its boundary. Generators in
/// degree `k` are the `(k+1)`-subsets of `{0..n}` in lexicographic order.
pub fn simplex_chains(n: usize, boundary: bool) -> ChainComplex {
    let top = if boundary { n } else { n + 1 };
    if top == 0 {
        return ChainComplex::zero();
    }
    let faces: Vec<Vec<Vec<usize>>> = (1..=top).map(|k| subsets(n + 1, k)).collect();
    let groups = faces.iter().map(|f| FpGroup::free(f.len())).collect();
    ChainComplex::from_parts(0, groups, |t| {
        let (src, tgt) = (&faces[t as usize], &faces[t as usize - 1]);
        let mut m = IntMatrix::zeros(tgt.len(), src.len());
        for (j, s) in src.iter().enumerate() {
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                let r = tgt.binary_search(&f).expect("face of a simplex");
                m.set(r, j, sign(i % 2 == 1));
            }
        }
        m
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `δ^i: N(Δ^{n-1}) -> N(Δ^n)`, skipping vertex `i`.
pub fn coface_chains(n: usize, i: usize) -> ChainMap {
    let (src, tgt) = (simplex_chains(n - 1, false), simplex_chains(n, false));
    ChainMap::from_gen_fn(&src, &tgt, |t, j| {
        let s = &subsets(n, t as usize + 1)[j];
        let img: Vec<usize> = s.iter().map(|&v| if v >= i { v + 1 } else { v }).collect();
        let r = subsets(n + 1, t as usize + 1).binary_search(&img).expect("coface image");
        Elem::basis(t, tgt.gens(t), r)
    })
}

/// Canonical frame `W^n = W ⊗ N(Δ^n)` on a complex `W`.
#[derive(Clone, Debug)]
pub struct Frame {
    pub base: ChainComplex,
    layouts: Vec<TensorProduct>,
}

/// Verdicts on a frame per codegree.
#[derive(Clone, Debug)]
pub struct FrameReport {
    /// `W^n -> W^{-1}` is a weak equivalence.
    pub weak_equivalences: Vec<bool>,
    /// `L_n W -> W^n` is a cofibration.
    pub latching: Vec<bool>,
    pub cosimplicial_identities: bool,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.cosimplicial_identities && self.weak_equivalences.iter().all(|&b| b) && self.latching.iter().all(|&b| b)
    }
}

impl Frame {
    pub fn canonical(w: &ChainComplex, top: usize) -> Frame {
        let layouts = (0..=top).map(|n| TensorProduct::new(vec![w.clone(), simplex_chains(n, false)])).collect();
        Frame { base: w.clone(), layouts }
    }

    pub fn top(&self) -> usize {
        self.layouts.len() - 1
    }

    pub fn term(&self, n: usize) -> &ChainComplex {
        self.layouts[n].complex()
    }

    /// `W ⊗ δ^i`.
    pub fn coface(&self, n: usize, i: usize) -> ChainMap {
        let id = ChainMap::identity(&self.base);
        TensorProduct::map_from_factors(&self.layouts[n - 1], &self.layouts[n], &[&id, &coface_chains(n, i)])
    }

    /// `W^n -> W^{-1}`, vertices to `1`.
    pub fn augmentation(&self, n: usize) -> ChainMap {
        let tp = &self.layouts[n];
        tp.map_from_fn(&self.base, |degs, idx| {
            if degs[1] == 0 {
                Elem::basis(degs[0], self.base.gens(degs[0]), idx[0])
            } else {
                Elem::zero(degs[0] + degs[1], self.base.gens(degs[0] + degs[1]))
            }
        })
    }

    /// `W ⊗ N(∂Δ^n) -> W ⊗ N(Δ^n)`; for `n = 0` the map from zero.
    pub fn latching_map(&self, n: usize) -> ChainMap {
        let bd = simplex_chains(n, true);
        let tgt = &self.layouts[n];
        if bd.is_empty() {
            return ChainMap::from_zero(tgt.complex());
        }
        let src = TensorProduct::new(vec![self.base.clone(), bd.clone()]);
        let incl = ChainMap::from_fn(&bd, &simplex_chains(n, false), |t| {
            IntMatrix::identity(bd.gens(t)).vstack(&IntMatrix::zeros(simplex_chains(n, false).gens(t) - bd.gens(t), bd.gens(t)))
        });
        TensorProduct::map_from_factors(&src, tgt, &[&ChainMap::identity(&self.base), &incl])
    }

    pub fn check(&self) -> FrameReport {
        let top = self.top();
        let weak_equivalences = (0..=top).map(|n| self.augmentation(n).is_weak_equivalence()).collect();
        let latching = (0..=top)
            .map(|n| {
                let l = self.latching_map(n);
                l.validate().is_ok() && l.is_cofibration()
            })
            .collect();
        let mut ids = true;
        for n in 2..=top {
            for j in 1..=n {
                for i in 0..j {
                    let l = self.coface(n - 1, i).then(&self.coface(n, j));
                    let r = self.coface(n - 1, j - 1).then(&self.coface(n, i));
                    ids &= l.equals_mod_relations(&r);
                }
            }
        }
        for n in 1..=top {
            for i in 0..=n {
                ids &= self.coface(n, i).then(&self.augmentation(n)).equals_mod_relations(&self.augmentation(n - 1));
            }
        }
        FrameReport { weak_equivalences, latching, cosimplicial_identities: ids }
    }
}

// ---------------------------------------------------------------- generation

/// Colimit shapes under which the class of weak equivalences between
/// cofibrant objects is generated.
#[derive(Clone, Debug)]
pub enum GenerationStep {
    /// Spans `X_1 <- X_0 -> X_2`, `Y_1 <- Y_0 -> Y_2` and `f = (f_0, f_1, f_2)`.
    Span { x: (ChainMap, ChainMap), y: (ChainMap, ChainMap), f: [ChainMap; 3] },
    /// Chains `X_0 -> X_1 -> …` constant after the last listed map, with
    /// one component per object.
    Chain { x: Vec<ChainMap>, y: Vec<ChainMap>, f: Vec<ChainMap> },
}

/// Induced map of colimits and its verdict.
#[derive(Clone, Debug)]
pub struct GenerationWitness {
    pub map: ChainMap,
    pub weak_equivalence: bool,
}

fn need(ok: bool, what: impl FnOnce() -> String) -> Result<(), BarError> {
    if ok {
        Ok(())
    } else {
        Err(BarError::Hypothesis(what()))
    }
}

pub fn we_generation_witness(step: &GenerationStep) -> Result<GenerationWitness, BarError> {
    match step {
        GenerationStep::Span { x, y, f } => {
            for (name, (a, b)) in [("X", x), ("Y", y)] {
                need(a.src() == b.src(), || format!("{name} is not a span"))?;
                for o in [a.src(), a.tgt(), b.tgt()] {
                    need(o.is_cofibrant(), || format!("{name} has a non-cofibrant object"))?;
                }
                need(a.is_cofibration() || b.is_cofibration(), || format!("neither leg of {name} is a cofibration"))?;
            }
            need(f[0].src() == x.0.src() && f[0].tgt() == y.0.src(), || "f_0 has wrong ends".into())?;
            need(f[1].src() == x.0.tgt() && f[1].tgt() == y.0.tgt(), || "f_1 has wrong ends".into())?;
            need(f[2].src() == x.1.tgt() && f[2].tgt() == y.1.tgt(), || "f_2 has wrong ends".into())?;
            need(x.0.then(&f[1]).equals_mod_relations(&f[0].then(&y.0)), || "left square does not commute".into())?;
            need(x.1.then(&f[2]).equals_mod_relations(&f[0].then(&y.1)), || "right square does not commute".into())?;
            for (i, g) in f.iter().enumerate() {
                need(g.is_weak_equivalence(), || format!("f_{i} is not a weak equivalence"))?;
            }
            let (px, _, _) = chainz::pushout(&x.0, &x.1);
            let (py, _, _) = chainz::pushout(&y.0, &y.1);
            let map = ChainMap::from_fn(&px, &py, |n| IntMatrix::block_diag(&[&f[1].comp_sized(n), &f[2].comp_sized(n)]));
            map.validate().map_err(|e| BarError::Hypothesis(format!("induced map: {e}")))?;
            let weak_equivalence = map.is_weak_equivalence();
            Ok(GenerationWitness { map, weak_equivalence })
        }
        GenerationStep::Chain { x, y, f } => {
            need(!f.is_empty() && x.len() + 1 == f.len() && y.len() == x.len(), || "chain lengths disagree".into())?;
            for (name, maps) in [("X", x), ("Y", y)] {
                for (k, m) in maps.iter().enumerate() {
                    need(m.src().is_cofibrant() && m.tgt().is_cofibrant(), || format!("{name}_{k} is not cofibrant"))?;
                    need(m.is_cofibration(), || format!("{name}: map {k} is not a cofibration"))?;
                    if k + 1 < maps.len() {
                        need(m.tgt() == maps[k + 1].src(), || format!("{name}: maps {k}, {} do not compose", k + 1))?;
                    }
                }
            }
            for (k, g) in f.iter().enumerate() {
                need(g.is_weak_equivalence(), || format!("f_{k} is not a weak equivalence"))?;
                if k < x.len() {
                    need(x[k].then(&f[k + 1]).equals_mod_relations(&g.then(&y[k])), || format!("square {k} does not commute"))?;
                }
            }
            let map = f.last().expect("nonempty").clone();
            let weak_equivalence = map.is_weak_equivalence();
            Ok(GenerationWitness { map, weak_equivalence })
        }
    }
}

// ---------------------------------------------------------------- counterexample

/// One step of the `Z/2` argument.
#[derive(Clone, Debug)]
pub struct Step {
    pub name: String,
    pub pass: bool,
    pub witness: String,
}

#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub steps: Vec<Step>,
    pub locally_flat: LocalFlatness,
    pub conclusion: String,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.pass)
    }
}

/// Unital action of `End = Z/2` on `P` by `1 ↦ id`.
fn z2_action(shape: &DgCategory, p: &ChainComplex) -> Diagram {
    Diagram::from_fn(shape, vec![p.clone()], |_, _, _, _, dr, j| Elem::basis(dr, p.gens(dr), j))
}

fn candidate_values() -> Vec<(&'static str, ChainComplex)> {
    vec![
        ("Z", ChainComplex::unit()),
        ("Z --1--> Z", ChainComplex::two_term(0, 1)),
        ("Z --2--> Z", ChainComplex::two_term(0, 2)),
        ("Z^2 in degree 1", ChainComplex::concentrated(1, FpGroup::free(2))),
        ("Z/2", ChainComplex::concentrated(0, FpGroup::cyclic(2))),
        ("Z/4", ChainComplex::concentrated(0, FpGroup::cyclic(4))),
    ]
}

/// The one-object category with `End = Z/2` has no enriched functorial
/// cofibrant replacement with pointwise weak equivalences.
pub fn counterexample_z2() -> CounterexampleReport {
    let shape = DgCategory::zmod(2);
    let end = shape.hom(0, 0);
    let two = Int::from(2);
    let mut steps = Vec::new();

    let twice = shape.unit(0).clone().scaled(&two);
    let a = end.is_zero_elem(&twice) && !end.is_zero_elem(shape.unit(0));
    steps.push(Step {
        name: "2·unit = 0 in End".into(),
        pass: a,
        witness: format!("unit = {:?}, 2·unit = {:?} lies in the relations of Z/2", shape.unit(0).v, twice.v),
    });

    let mut b = true;
    let mut lines = Vec::new();
    for (name, p) in candidate_values() {
        let accepted = z2_action(&shape, &p).validate().is_ok();
        let kills = ChainMap::identity(&p).scale(&two).is_zero_mod_relations();
        b &= accepted == kills;
        lines.push(format!("{name}: action {}, 2·id {}", if accepted { "valid" } else { "rejected" }, if kills { "= 0" } else { "!= 0" }));
    }
    steps.push(Step { name: "additivity forces 2·id_P = 0".into(), pass: b, witness: lines.join("; ") });

    let mut c = true;
    let mut lines = Vec::new();
    for (name, p) in candidate_values().into_iter().filter(|(_, p)| p.is_cofibrant() && !p.is_empty()) {
        let nonzero = !ChainMap::identity(&p).scale(&two).is_zero_mod_relations();
        c &= nonzero;
        lines.push(format!("{name}: 2·id {}", if nonzero { "!= 0" } else { "= 0" }));
    }
    steps.push(Step { name: "nonzero free bounded P has 2·id_P != 0".into(), pass: c, witness: lines.join("; ") });

    let locally_flat = shape.is_locally_flat();
    let expected = chainz::torsion_resolution(2, 0);
    let falsified = match locally_flat.failures.first() {
        Some((0, 0, Falsifier::WeakEquivalence { w, prime: 2, .. })) => {
            w.src() == expected.src() && w.tgt() == expected.tgt() && w.equals_mod_relations(&expected)
        }
        _ => false,
    };
    let x = Diagram::representable(&shape, 0);
    let nontrivial = !x.value(0).homology().is_zero();
    let bar_free = bar_replacement(&x, 2).map(|r| r.diagram.value(0).is_cofibrant()).unwrap_or(true);
    let d = a && b && c && !locally_flat.flat && falsified && nontrivial && !bar_free;
    steps.push(Step {
        name: "no pointwise-WE enriched cofibrant replacement".into(),
        pass: d,
        witness: format!(
            "H(C_*) = {}; a replacement P would be nonzero, torsion-free and killed by 2; \
             locally flat = {}, falsifier (Z --2--> Z) -> Z/2 = {}; bar value cofibrant = {}",
            x.value(0).homology(),
            locally_flat.flat,
            falsified,
            bar_free
        ),
    });
    let conclusion = if d {
        "P = 0 is forced, contradicting P ≃ Z/2; the bar construction stays natural but its values are not cofibrant".into()
    } else {
        "argument incomplete".into()
    };
    CounterexampleReport { steps, locally_flat, conclusion }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::{MonotoneKind, OrdinaryCategory};
    use crate::int;

    fn trivial_z(shape: &DgCategory) -> Diagram {
        Diagram::constant_linear(shape, &ChainComplex::unit())
    }

    #[test]
    fn unit_category_bar_is_a_resolution() {
        let shape = DgCategory::unit_category();
        let r = bar_replacement(&trivial_z(&shape), 4).unwrap();
        r.diagram.validate().unwrap();
        r.augmentation.validate().unwrap();
        assert!(r.augmentation_is_we());
        assert!(r.bar.simplicial_identity_failure(4).is_none());
    }

    #[test]
    fn group_ring_bar_gives_group_homology() {
        let shape = DgCategory::group_ring_cyclic(2);
        let r = bar_replacement(&trivial_z(&shape), 6).unwrap();
        r.diagram.validate().unwrap();
        assert!(r.augmentation_is_we());
        assert!(r.augmentation_is_we_through(5).is_err());
        let w = Diagram::constant_linear(&shape.opposite(), &ChainComplex::unit());
        let h = diagram::weighted_colimit(&w, &r.diagram).unwrap().homology();
        // Tor over Z[t]/(t^2 - 1) from the periodic resolution (t - 1), (t + 1)
        let periodic = periodic_tor(4);
        for k in 0..=3 {
            assert_eq!(h.at(k), periodic.homology_at(k), "degree {k}");
        }
        assert_eq!(h.at(1).to_string(), "Z/2");
    }

    /// `Z ⊗ (… -t+1-> Z[C2] -t-1-> Z[C2] -t+1-> Z[C2])` with `t` acting as 1.
    fn periodic_tor(len: usize) -> ChainComplex {
        let groups = vec![FpGroup::free(1); len + 1];
        ChainComplex::from_parts(0, groups, |n| {
            let v = if n % 2 == 1 { 0 } else { 2 };
            IntMatrix::from_i64_rows(1, &[&[v]])
        })
    }

    #[test]
    fn faces_are_chain_maps_and_identities_hold() {
        let shape = DgCategory::exterior();
        let x = Diagram::representable(&shape, 0);
        let b = BarComplex::new(&x, 3).unwrap();
        for n in 1..=3 {
            for i in 0..=n {
                b.face_map(0, n, i).validate().unwrap();
            }
        }
        for n in 0..3 {
            for j in 0..=n {
                b.degeneracy_map(0, n, j).validate().unwrap();
            }
        }
        assert!(b.simplicial_identity_failure(3).is_none());
        b.diagram().validate().unwrap();
    }

    #[test]
    fn augmentation_is_natural() {
        let shape = DgCategory::from_ordinary(&OrdinaryCategory::poset(1));
        let x = Diagram::representable(&shape, 0);
        let y = Diagram::constant_linear(&shape, &ChainComplex::unit());
        let f = Transformation::from_gen_fn(&x, &y, |c, t, _| Elem::basis(t, y.value(c).gens(t), 0));
        f.validate().unwrap();
        let (bx, by) = (BarComplex::new(&x, 3).unwrap(), BarComplex::new(&y, 3).unwrap());
        let bf = bx.map(&by, &f).unwrap();
        bf.validate().unwrap();
        assert!(bf.then(&by.augmentation()).equals(&bx.augmentation().then(&f)));
    }

    #[test]
    fn negative_homs_are_rejected_and_values_shift() {
        let hom = ChainComplex::concentrated(-1, FpGroup::free(1));
        let shape = DgCategory::arrow_with_hom(hom);
        assert!(matches!(bar_replacement(&Diagram::zero(&shape), 3), Err(BarError::NegativeHom { .. })));
        let shape = DgCategory::unit_category();
        let x = Diagram::constant_linear(&shape, &ChainComplex::concentrated(-2, FpGroup::free(1)));
        let r = bar_replacement(&x, 3).unwrap();
        assert_eq!(r.shift, 2);
        assert!(r.augmentation_is_we());
    }

    #[test]
    fn contraction_on_representables() {
        let cats = [
            DgCategory::unit_category(),
            DgCategory::group_ring_cyclic(2),
            DgCategory::exterior(),
            DgCategory::from_ordinary(&OrdinaryCategory::poset(2)),
            DgCategory::from_ordinary(&OrdinaryCategory::simplex_category(1, MonotoneKind::All)),
        ];
        let m = ChainComplex::two_term(0, 3);
        for shape in &cats {
            for c in shape.objects() {
                let rep = contraction_check(shape, c, &ChainComplex::unit(), 5).unwrap();
                assert!(rep.passed(), "{shape:?} at {c}: {:?}", rep.failure);
                assert!(contraction_check(shape, c, &m, 4).unwrap().passed());
            }
        }
        assert!(matches!(contraction_check(&cats[0], 0, &ChainComplex::unit(), 1), Err(BarError::Truncation { .. })));
    }

    #[test]
    fn contraction_over_torsion_homs() {
        let shape = DgCategory::zmod(2);
        assert!(contraction_check(&shape, 0, &ChainComplex::unit(), 4).unwrap().passed());
    }

    /// Independent oracle: the augmentation of the bar construction of a
    /// representable is a homotopy equivalence, so its cone is acyclic.
    #[test]
    fn contraction_agrees_with_cone_homology() {
        let shape = DgCategory::group_ring_cyclic(2);
        let r = bar_replacement(&Diagram::representable(&shape, 0), 4).unwrap();
        assert!(r.augmentation.component(0).is_weak_equivalence_through(2));
    }

    #[test]
    fn latching_examples() {
        let g = DgCategory::group_ring_cyclic(2);
        let r0 = bar_reedy_latching_check(&g, 0);
        assert!(r0.passed() && r0.sequences == 1);
        let r1 = bar_reedy_latching_check(&g, 1);
        assert!(r1.passed());
        // explicit matrix: Z -> Z^2, 1 ↦ (1, 0), split with cokernel Z
        let unit = ChainComplex::unit();
        let m = ChainMap::from_gen_fn(&unit, g.hom(0, 0), |_, _| g.unit(0).clone());
        assert_eq!(m.comp(0).column(0), vec![int(1), int(0)]);
        assert!(m.is_cofibration());
        let p = OrdinaryCategory::poset(2);
        let shape = DgCategory::from_ordinary(&p);
        for n in 0..=3 {
            assert!(bar_reedy_latching_check(&shape, n).passed());
            for c in shape.objects() {
                assert!(bar_c_latching_check(&shape, c, n).passed());
            }
        }
        let skip = bar_reedy_latching_check(&DgCategory::zmod(2), 1);
        assert!(skip.skipped.is_some());
    }

    #[test]
    fn sparse_corner_matches_dense_pcm() {
        let shape = DgCategory::exterior();
        let arrows: Vec<Arrow> = (0..3).map(|_| Arrow { top: shape.hom(0, 0), unit: Some(shape.unit(0)) }).collect();
        assert!(corner_failure(&arrows).is_none());
        let cube = arrows.iter().skip(1).fold(arrow_cube(&arrows[0]), |acc, a| acc.tensor(&arrow_cube(a)));
        assert!(diagram::pcm(&cube).map.is_cofibration());
        // a non-split unit: Z --2--> Z
        let top = ChainComplex::unit();
        let two = Elem::new(0, vec![int(2)]);
        let bad = [Arrow { top: &top, unit: Some(&two) }];
        assert_eq!(corner_failure(&bad).map(|f| f.0), Some(0));
        assert!(!diagram::pcm(&arrow_cube(&bad[0])).map.is_cofibration());
    }

    #[test]
    fn canonical_frame() {
        let w = ChainComplex::two_term(0, 2);
        let f = Frame::canonical(&w, 3);
        let rep = f.check();
        assert!(rep.passed(), "{rep:?}");
        let bad = Frame::canonical(&ChainComplex::concentrated(0, FpGroup::cyclic(2)), 2).check();
        assert!(bad.weak_equivalences.iter().all(|&b| b));
        assert!(!bad.latching[1]);
        assert_eq!(simplex_chains(2, false).homology().at(0).to_string(), "Z");
        assert!(simplex_chains(2, true).homology().at(1).to_string() == "Z");
    }

    #[test]
    fn generation_witnesses() {
        let z = ChainComplex::unit();
        let id = ChainMap::identity(&z);
        let zero = ChainMap::from_zero(&z);
        let span = GenerationStep::Span {
            x: (zero.clone(), zero.clone()),
            y: (zero.clone(), zero.clone()),
            f: [ChainMap::identity(zero.src()), id.clone(), id.clone()],
        };
        let w = we_generation_witness(&span).unwrap();
        assert!(w.weak_equivalence && w.map.is_isomorphism());
        // quasi-isomorphism Z --1--> Z  ->  0 glued along 0
        let cone = ChainComplex::two_term(0, 1);
        let q = ChainMap::zero(&cone, &ChainComplex::zero());
        let empty = ChainComplex::zero();
        let into = |c: &ChainComplex| ChainMap::from_zero(c);
        let span = GenerationStep::Span {
            x: (into(&cone), into(&z)),
            y: (into(&empty), into(&z)),
            f: [ChainMap::identity(&empty), q, id.clone()],
        };
        let w = we_generation_witness(&span).unwrap();
        assert!(w.weak_equivalence);
        assert!(w.map.cone().is_acyclic());
        let chain = GenerationStep::Chain { x: vec![zero.clone()], y: vec![zero.clone()], f: vec![ChainMap::identity(zero.src()), id] };
        assert!(we_generation_witness(&chain).unwrap().weak_equivalence);
        let bad = GenerationStep::Chain { x: vec![], y: vec![], f: vec![ChainMap::zero(&z, &z)] };
        assert!(matches!(we_generation_witness(&bad), Err(BarError::Hypothesis(_))));
    }

    #[test]
    fn counterexample_steps() {
        let rep = counterexample_z2();
        assert_eq!(rep.steps.len(), 4);
        assert!(rep.passed(), "{:#?}", rep.steps);
        assert!(!rep.locally_flat.flat);
    }
}
