//! Bounded chain complexes of finitely presented abelian groups.
//!
//! A group is a generator count plus a relation matrix whose columns are
//! relators. Differentials and chain maps are integer matrices on
//! generators; every equation between maps is read modulo relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::zmat::{Matrix, Solution};
use crate::{Int, IntMatrix, IntSnf};

static EMPTY: IntMatrix = Matrix::empty();
static ZERO_GROUP: FpGroup =
    FpGroup { gens: 0, rels: Matrix::empty(), lattice: OnceLock::new(), reduction: OnceLock::new() };

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("malformed complex in degree {degree}: {reason}")]
    MalformedComplex { degree: i64, reason: String },
    #[error("malformed map in degree {degree}: {reason}")]
    MalformedMap { degree: i64, reason: String },
    #[error("domain is not cofibrant: degree {degree} is not free")]
    NotCofibrant { degree: i64 },
    #[error("not a cofibration in degree {degree}: {reason}")]
    NotCofibration { degree: i64, reason: String },
    #[error("lifting hypotheses violated in degree {degree}: {reason}")]
    LiftFailed { degree: i64, reason: String },
    #[error("flatness decision disagrees with the falsifier battery: {0}")]
    FlatnessDisagreement(String),
}

pub(crate) fn sign(odd: bool) -> Int {
    if odd {
        -Int::one()
    } else {
        Int::one()
    }
}

pub(crate) fn parity(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

// ---------------------------------------------------------------- groups

/// Finitely presented abelian group `Z^gens / im(rels)`.
#[derive(Clone)]
pub struct FpGroup {
    gens: usize,
    rels: IntMatrix,
    lattice: OnceLock<Lattice>,
    reduction: OnceLock<Box<Reduction>>,
}

impl PartialEq for FpGroup {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.rels == other.rels
    }
}

impl Eq for FpGroup {}

impl Hash for FpGroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.gens.hash(state);
        self.rels.hash(state);
    }
}

impl fmt::Debug for FpGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FpGroup").field("gens", &self.gens).field("rels", &self.rels).finish()
    }
}

/// Rank and torsion coefficients (each > 1, divisibility chain).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GroupInvariants {
    pub rank: usize,
    pub torsion: Vec<Int>,
}

impl GroupInvariants {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        GroupInvariants { rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Torsion-free part plus cyclic torsion, e.g. `[0, 2]` for Z + Z/2.
    pub fn from_cyclic_orders(orders: &[i64]) -> Self {
        let m = IntMatrix::diagonal(orders.len(), orders.len(), &crate::ints(orders));
        FpGroup::new(orders.len(), m).invariants()
    }
}

impl fmt::Display for GroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl FpGroup {
    pub fn new(gens: usize, rels: IntMatrix) -> Self {
        assert_eq!(rels.rows(), gens, "relation matrix must have one row per generator");
        FpGroup { gens, rels, lattice: OnceLock::new(), reduction: OnceLock::new() }
    }

    pub fn free(n: usize) -> Self {
        Self::new(n, IntMatrix::zeros(n, 0))
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    /// `Z/n`; `n = 0` gives `Z`.
    pub fn cyclic(n: i64) -> Self {
        if n == 0 {
            Self::free(1)
        } else {
            Self::new(1, IntMatrix::from_i64_rows(1, &[&[n]]))
        }
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn rels(&self) -> &IntMatrix {
        &self.rels
    }

    pub fn invariants(&self) -> GroupInvariants {
        let d = self.rels.invariant_factors();
        let nonzero = d.iter().filter(|x| !x.is_zero()).count();
        GroupInvariants { rank: self.gens - nonzero, torsion: d.into_iter().filter(|x| x > &Int::one()).collect() }
    }

    /// Free up to isomorphism.
    pub fn is_free(&self) -> bool {
        self.rels.invariant_factors().iter().all(|x| x.is_zero() || x.is_one())
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants().is_zero()
    }

    /// Relation lattice, computed once.
    pub fn lattice(&self) -> &Lattice {
        self.lattice.get_or_init(|| Lattice::new(&self.rels))
    }

    /// Isomorphic presentation with unit relators eliminated, computed once.
    pub fn reduction(&self) -> &Reduction {
        self.reduction.get_or_init(|| Box::new(Reduction::new(&self.rels)))
    }

    pub fn direct_sum(groups: &[&FpGroup]) -> FpGroup {
        let blocks: Vec<&IntMatrix> = groups.iter().map(|g| &g.rels).collect();
        Self::new(groups.iter().map(|g| g.gens).sum(), IntMatrix::block_diag(&blocks))
    }

    /// Same generators with extra relators appended.
    pub fn with_relations(&self, extra: &IntMatrix) -> FpGroup {
        Self::new(self.gens, self.rels.hstack(extra))
    }
}

/// Column lattice of a matrix. Membership goes through a reduced
/// presentation of the quotient; coefficients use the full Smith form.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    gens: IntMatrix,
    reduction: Reduction,
    snf: Option<IntSnf>,
    full: OnceLock<Option<IntSnf>>,
}

impl Lattice {
    pub fn new(gens: &IntMatrix) -> Self {
        let reduction = Reduction::new(gens);
        let r = reduction.rels();
        let snf = if r.cols() == 0 || r.is_zero() { None } else { Some(r.smith_normal_form()) };
        Lattice { dim: gens.rows(), gens: gens.clone(), reduction, snf, full: OnceLock::new() }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        assert_eq!(v.len(), self.dim, "vector has wrong length for lattice");
        let w = self.reduction.project(v);
        match &self.snf {
            None => w.iter().all(|x| x.is_zero()),
            Some(s) => s.contains(&w),
        }
    }

    pub fn contains_columns(&self, m: &IntMatrix) -> Option<usize> {
        (0..m.cols()).find(|&c| !self.contains(&m.column(c)))
    }

    /// Coefficients expressing `v` in the spanning columns.
    pub fn coefficients(&self, v: &[Int]) -> Option<Vec<Int>> {
        let full = self.full.get_or_init(|| {
            (self.gens.cols() > 0 && !self.gens.is_zero()).then(|| self.gens.smith_normal_form())
        });
        match full {
            None => v.iter().all(|x| x.is_zero()).then(|| vec![Int::zero(); self.gens.cols()]),
            Some(s) => s.solve(v).ok(),
        }
    }
}

/// `Z^n / im(rels)` rewritten on fewer generators by eliminating
/// relators with a unit entry. `project` realizes the isomorphism onto
/// the reduced presentation; the surviving generators give its inverse.
#[derive(Clone, Debug)]
pub struct Reduction {
    dim: usize,
    keep: Vec<usize>,
    /// Position among the survivors, `usize::MAX` when eliminated.
    pos: Vec<usize>,
    /// Eliminated generator as a combination of survivors.
    expr: Vec<Option<Vec<(usize, Int)>>>,
    rels: IntMatrix,
}

impl Reduction {
    pub fn new(rels: &IntMatrix) -> Self {
        let mut b = ReductionBuilder::new(rels.rows());
        for c in 0..rels.cols() {
            b.push((0..rels.rows()).filter(|&r| !rels.get(r, c).is_zero()).map(|r| (r, rels.get(r, c).clone())).collect());
        }
        b.finish()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generators of the original presentation that survive.
    pub fn keep(&self) -> &[usize] {
        &self.keep
    }

    /// Relators on the surviving generators.
    pub fn rels(&self) -> &IntMatrix {
        &self.rels
    }

    pub fn group(&self) -> FpGroup {
        FpGroup::new(self.keep.len(), self.rels.clone())
    }

    /// Image of `sum v_i e_{offset + i}`.
    pub fn project_at(&self, offset: usize, v: &[Int]) -> Vec<Int> {
        let mut w = vec![Int::zero(); self.keep.len()];
        for (i, x) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            let g = offset + i;
            match &self.expr[g] {
                None => w[self.pos[g]] += x,
                Some(e) => {
                    for (j, a) in e {
                        w[self.pos[*j]] += x * a;
                    }
                }
            }
        }
        w
    }

    pub fn project(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.dim, "vector has wrong length for reduction");
        self.project_at(0, v)
    }

    pub fn project_matrix(&self, m: &IntMatrix) -> IntMatrix {
        let cols: Vec<Vec<Int>> = (0..m.cols()).map(|c| self.project(&m.column(c))).collect();
        IntMatrix::from_columns(self.keep.len(), &cols)
    }

    /// `m` restricted to the columns of surviving generators.
    pub fn restrict_columns(&self, m: &IntMatrix) -> IntMatrix {
        IntMatrix::from_fn(m.rows(), self.keep.len(), |r, c| m.get(r, self.keep[c]).clone())
    }
}

/// Online construction of a [`Reduction`] from sparse relators.
#[derive(Clone, Debug)]
pub struct ReductionBuilder {
    dim: usize,
    expr: Vec<Option<Vec<(usize, Int)>>>,
    users: Vec<Vec<usize>>,
    residual: Vec<BTreeMap<usize, Int>>,
}

impl ReductionBuilder {
    pub fn new(dim: usize) -> Self {
        ReductionBuilder { dim, expr: vec![None; dim], users: vec![Vec::new(); dim], residual: Vec::new() }
    }

    fn substitute(&self, col: impl IntoIterator<Item = (usize, Int)>) -> BTreeMap<usize, Int> {
        let mut out: BTreeMap<usize, Int> = BTreeMap::new();
        let mut add = |j: usize, x: Int| {
            let e = out.entry(j).or_insert_with(Int::zero);
            *e += x;
            if e.is_zero() {
                out.remove(&j);
            }
        };
        for (g, x) in col {
            if x.is_zero() {
                continue;
            }
            match &self.expr[g] {
                None => add(g, x),
                Some(e) => {
                    for (j, a) in e {
                        add(*j, &x * a);
                    }
                }
            }
        }
        out
    }

    fn eliminate(&mut self, g: usize, col: BTreeMap<usize, Int>) {
        let u = col[&g].clone();
        let e: Vec<(usize, Int)> = col.into_iter().filter(|(j, _)| *j != g).map(|(j, a)| (j, -(&u * a))).collect();
        for h in std::mem::take(&mut self.users[g]) {
            let Some(old) = self.expr[h].take() else { continue };
            if !old.iter().any(|(j, _)| *j == g) {
                self.expr[h] = Some(old);
                continue;
            }
            let updated: Vec<(usize, Int)> = self.substitute_with(&old, g, &e);
            for (j, _) in &updated {
                self.users[*j].push(h);
            }
            self.expr[h] = Some(updated);
        }
        for (j, _) in &e {
            self.users[*j].push(g);
        }
        self.expr[g] = Some(e);
    }

    fn substitute_with(&self, old: &[(usize, Int)], g: usize, e: &[(usize, Int)]) -> Vec<(usize, Int)> {
        let mut out: BTreeMap<usize, Int> = BTreeMap::new();
        for (j, a) in old {
            if *j == g {
                for (k, b) in e {
                    *out.entry(*k).or_insert_with(Int::zero) += a * b;
                }
            } else {
                *out.entry(*j).or_insert_with(Int::zero) += a;
            }
        }
        out.into_iter().filter(|(_, a)| !a.is_zero()).collect()
    }

    fn unit_entry(col: &BTreeMap<usize, Int>) -> Option<usize> {
        col.iter().find(|(_, a)| a.abs().is_one()).map(|(j, _)| *j)
    }

    /// Add a relator given by its nonzero entries.
    pub fn push(&mut self, col: Vec<(usize, Int)>) {
        let v = self.substitute(col);
        if v.is_empty() {
            return;
        }
        match Self::unit_entry(&v) {
            Some(g) => self.eliminate(g, v),
            None => self.residual.push(v),
        }
    }

    pub fn push_dense(&mut self, v: &[Int]) {
        assert_eq!(v.len(), self.dim, "relator has wrong length");
        self.push(v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect());
    }

    pub fn finish(mut self) -> Reduction {
        let mut changed = true;
        while changed {
            changed = false;
            let pending = std::mem::take(&mut self.residual);
            for v in pending {
                let v = self.substitute(v);
                if v.is_empty() {
                    continue;
                }
                match Self::unit_entry(&v) {
                    Some(g) => {
                        self.eliminate(g, v);
                        changed = true;
                    }
                    None => self.residual.push(v),
                }
            }
        }
        let n = self.dim;
        let keep: Vec<usize> = (0..n).filter(|&i| self.expr[i].is_none()).collect();
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let mut basis = crate::zmat::EchelonBasis::new(keep.len());
        for c in std::mem::take(&mut self.residual) {
            let c = self.substitute(c);
            let mut v = vec![Int::zero(); keep.len()];
            for (j, a) in c {
                v[pos[j]] = a;
            }
            basis.insert(v);
        }
        Reduction { dim: n, keep, pos, expr: self.expr, rels: basis.to_matrix() }
    }
}

/// Quotient of a complex by extra relations, presented on the generators
/// surviving unit elimination.
#[derive(Clone, Debug)]
pub struct Quotient {
    complex: ChainComplex,
    lo: i64,
    reductions: Vec<Reduction>,
}

impl Quotient {
    /// `rels` holds the extra relators per degree; the base relations are
    /// included automatically.
    pub fn new(base: &ChainComplex, mut rels: BTreeMap<i64, ReductionBuilder>) -> Self {
        if base.is_empty() {
            return Quotient { complex: ChainComplex::zero(), lo: 0, reductions: Vec::new() };
        }
        let (lo, hi) = (base.lo(), base.hi());
        let reductions: Vec<Reduction> = (lo..=hi)
            .map(|t| {
                let mut b = rels.remove(&t).unwrap_or_else(|| ReductionBuilder::new(base.gens(t)));
                let r = base.rels(t);
                for c in 0..r.cols() {
                    b.push((0..r.rows()).filter(|&i| !r.get(i, c).is_zero()).map(|i| (i, r.get(i, c).clone())).collect());
                }
                b.finish()
            })
            .collect();
        let groups = reductions.iter().map(Reduction::group).collect();
        let complex = ChainComplex::from_parts(lo, groups, |t| {
            let (src, tgt) = (&reductions[(t - lo) as usize], &reductions[(t - 1 - lo) as usize]);
            let d = base.d(t);
            let cols: Vec<Vec<Int>> = src.keep().iter().map(|&i| tgt.project(&d.column(i))).collect();
            IntMatrix::from_columns(tgt.keep().len(), &cols)
        });
        Quotient { complex, lo, reductions }
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    fn reduction(&self, t: i64) -> Option<&Reduction> {
        if t < self.lo {
            return None;
        }
        self.reductions.get((t - self.lo) as usize)
    }

    /// Class of `sum v_i e_{offset + i}` in degree `t`.
    pub fn project_at(&self, t: i64, offset: usize, v: &[Int]) -> Elem {
        match self.reduction(t) {
            Some(r) => Elem::new(t, r.project_at(offset, v)),
            None => Elem::zero(t, 0),
        }
    }

    pub fn project(&self, x: &Elem) -> Elem {
        self.project_at(x.deg, 0, &x.v)
    }

    /// Base generator standing for generator `i` of the quotient.
    pub fn lift_index(&self, t: i64, i: usize) -> usize {
        self.reduction(t).expect("degree in range").keep()[i]
    }

    /// Quotient map from the base.
    pub fn projection(&self, base: &ChainComplex) -> ChainMap {
        ChainMap::from_gen_fn(base, &self.complex, |t, i| self.project(&Elem::basis(t, base.gens(t), i)))
    }
}

// ---------------------------------------------------------------- elements

/// Homogeneous element: degree plus coordinates on generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Elem {
    pub deg: i64,
    pub v: Vec<Int>,
}

impl Elem {
    pub fn new(deg: i64, v: Vec<Int>) -> Self {
        Elem { deg, v }
    }

    pub fn basis(deg: i64, dim: usize, i: usize) -> Self {
        let mut v = vec![Int::zero(); dim];
        v[i] = Int::one();
        Elem { deg, v }
    }

    pub fn zero(deg: i64, dim: usize) -> Self {
        Elem { deg, v: vec![Int::zero(); dim] }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|x| x.is_zero())
    }

    pub fn scaled(mut self, k: &Int) -> Self {
        for x in &mut self.v {
            *x = x.clone() * k;
        }
        self
    }

    pub fn plus(&self, other: &Elem) -> Elem {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &Elem) -> Elem {
        assert_eq!(self.deg, other.deg, "subtracting elements of different degrees");
        Elem::new(self.deg, self.v.iter().zip(&other.v).map(|(a, b)| a - b).collect())
    }

    pub fn add_assign(&mut self, other: &Elem) {
        assert_eq!(self.deg, other.deg, "adding elements of different degrees");
        vec_add_assign(&mut self.v, &other.v);
    }
}

pub(crate) fn vec_add_assign(a: &mut [Int], b: &[Int]) {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += y;
        }
    }
}

/// All basis elements of a complex, by degree then index.
pub fn basis_elems(c: &ChainComplex) -> Vec<Elem> {
    c.degrees().flat_map(|t| (0..c.gens(t)).map(move |i| Elem::basis(t, c.gens(t), i))).collect()
}

pub(crate) fn unit_vec(n: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); n];
    v[i] = Int::one();
    v
}

// ---------------------------------------------------------------- complexes

/// Bounded chain complex; `d(n): C_n -> C_{n-1}` on generators.
///
/// Supports are trimmed so that the lowest and highest degree carry
/// generators; structural equality is therefore canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainComplex {
    lo: i64,
    groups: Vec<FpGroup>,
    diffs: Vec<IntMatrix>,
}

/// Homology invariants per degree.
#[derive(Clone, Debug, Default, Eq)]
pub struct Homology {
    pub groups: BTreeMap<i64, GroupInvariants>,
}

impl Homology {
    pub fn at(&self, n: i64) -> GroupInvariants {
        self.groups.get(&n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.values().all(|g| g.is_zero())
    }

    fn nonzero(&self) -> BTreeMap<i64, &GroupInvariants> {
        self.groups.iter().filter(|(_, g)| !g.is_zero()).map(|(k, g)| (*k, g)).collect()
    }
}

impl PartialEq for Homology {
    fn eq(&self, other: &Self) -> bool {
        self.nonzero() == other.nonzero()
    }
}

impl fmt::Display for Homology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.groups.iter().map(|(n, g)| format!("H{n} = {g}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl ChainComplex {
    pub fn zero() -> Self {
        ChainComplex { lo: 0, groups: Vec::new(), diffs: Vec::new() }
    }

    /// `Z` in degree 0.
    pub fn unit() -> Self {
        Self::concentrated(0, FpGroup::free(1))
    }

    pub fn concentrated(deg: i64, g: FpGroup) -> Self {
        Self::from_parts(deg, vec![g], |_| unreachable!())
    }

    /// Build without validation. `diff(n)` is queried for `lo < n <= hi`.
    pub fn from_parts(lo: i64, groups: Vec<FpGroup>, mut diff: impl FnMut(i64) -> IntMatrix) -> Self {
        let len = groups.len();
        let first = groups.iter().position(|g| g.gens > 0);
        let Some(first) = first else { return Self::zero() };
        let last = groups.iter().rposition(|g| g.gens > 0).unwrap();
        let mut diffs = Vec::with_capacity(last - first + 2);
        diffs.push(IntMatrix::zeros(0, groups[first].gens));
        for k in first + 1..=last {
            let m = diff(lo + k as i64);
            diffs.push(m);
        }
        diffs.push(IntMatrix::zeros(groups[last].gens, 0));
        debug_assert!(last < len);
        let groups = groups.into_iter().skip(first).take(last - first + 1).collect();
        ChainComplex { lo: lo + first as i64, groups, diffs }
    }

    /// Checked constructor; `diffs` lists `d(lo+1), ..., d(hi)`.
    pub fn new(lo: i64, groups: Vec<FpGroup>, diffs: Vec<IntMatrix>) -> Result<Self, ChainError> {
        if groups.len() > 0 && diffs.len() + 1 != groups.len() {
            return Err(ChainError::MalformedComplex {
                degree: lo,
                reason: format!("expected {} differentials, found {}", groups.len() - 1, diffs.len()),
            });
        }
        for (k, m) in diffs.iter().enumerate() {
            let want = (groups[k].gens, groups[k + 1].gens);
            if m.shape() != want {
                return Err(ChainError::MalformedComplex {
                    degree: lo + k as i64 + 1,
                    reason: format!("differential is {}x{}, expected {}x{}", m.rows(), m.cols(), want.0, want.1),
                });
            }
        }
        let c = Self::from_parts(lo, groups, |n| diffs[(n - lo - 1) as usize].clone());
        c.validate()?;
        Ok(c)
    }

    /// Free complex from ranks and differentials.
    pub fn free(lo: i64, ranks: &[usize], diffs: Vec<IntMatrix>) -> Result<Self, ChainError> {
        Self::new(lo, ranks.iter().map(|&r| FpGroup::free(r)).collect(), diffs)
    }

    /// `Z --k--> Z` in degrees `lo+1, lo`.
    pub fn two_term(lo: i64, k: i64) -> Self {
        Self::free(lo, &[1, 1], vec![IntMatrix::from_i64_rows(1, &[&[k]])]).expect("two-term complex is valid")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.groups.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, n: i64) -> &FpGroup {
        if n < self.lo || n > self.hi() {
            &ZERO_GROUP
        } else {
            &self.groups[(n - self.lo) as usize]
        }
    }

    pub fn gens(&self, n: i64) -> usize {
        self.group(n).gens
    }

    pub fn rels(&self, n: i64) -> &IntMatrix {
        &self.group(n).rels
    }

    /// `d(n): C_n -> C_{n-1}`.
    pub fn d(&self, n: i64) -> &IntMatrix {
        if self.groups.is_empty() || n < self.lo || n > self.hi() + 1 {
            &EMPTY
        } else {
            &self.diffs[(n - self.lo) as usize]
        }
    }

    pub fn total_gens(&self) -> usize {
        self.groups.iter().map(|g| g.gens).sum()
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let lattices: Vec<&Lattice> = self.groups.iter().map(FpGroup::lattice).collect();
        let lat = |n: i64| -> Option<&Lattice> {
            if n < self.lo || n > self.hi() {
                None
            } else {
                Some(&lattices[(n - self.lo) as usize])
            }
        };
        for n in self.degrees() {
            let d = self.d(n);
            if d.shape() != (self.gens(n - 1), self.gens(n)) {
                return Err(ChainError::MalformedComplex { degree: n, reason: "differential has wrong shape".into() });
            }
            if n - 1 >= self.lo {
                let img = d * self.rels(n);
                if let Some(c) = lat(n - 1).unwrap().contains_columns(&img) {
                    return Err(ChainError::MalformedComplex {
                        degree: n,
                        reason: format!("differential does not preserve relation {c}"),
                    });
                }
            }
            if n - 2 >= self.lo {
                let dd = self.d(n - 1) * d;
                if let Some(c) = lat(n - 2).unwrap().contains_columns(&dd) {
                    return Err(ChainError::MalformedComplex {
                        degree: n,
                        reason: format!("d∘d is nonzero on generator {c}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Homology invariants in degree `n`.
    pub fn homology_at(&self, n: i64) -> GroupInvariants {
        let (lo, mid, hi) = (self.group(n - 1).reduction(), self.group(n).reduction(), self.group(n + 1).reduction());
        let g = mid.keep().len();
        if g == 0 {
            return GroupInvariants::zero();
        }
        let d_n = lo.project_matrix(&mid.restrict_columns(self.d(n)));
        let d_up = mid.project_matrix(&hi.restrict_columns(self.d(n + 1)));
        let cycles_gen = d_n.hstack(lo.rels());
        let (k, _) = cycles_gen.kernel_and_image();
        let proj = k.submatrix(0..g, 0..k.cols());
        let zb = proj.smith_normal_form().image_basis();
        let bd = d_up.hstack(mid.rels());
        if zb.cols() == 0 {
            return GroupInvariants::zero();
        }
        let snf = zb.smith_normal_form();
        let cols: Vec<Vec<Int>> = (0..bd.cols())
            .map(|c| snf.solve(&bd.column(c)).ok().expect("boundaries and relations are cycles"))
            .collect();
        let y = IntMatrix::from_columns(zb.cols(), &cols);
        FpGroup::new(zb.cols(), y).invariants()
    }

    pub fn homology(&self) -> Homology {
        Homology { groups: self.degrees().map(|n| (n, self.homology_at(n))).collect() }
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|n| self.homology_at(n).is_zero())
    }

    /// Acyclic in every degree `<= k`.
    pub fn is_acyclic_through(&self, k: i64) -> bool {
        (self.lo..=self.hi().min(k)).all(|n| self.homology_at(n).is_zero())
    }

    /// Degreewise free up to isomorphism.
    pub fn is_cofibrant(&self) -> bool {
        self.groups.iter().all(FpGroup::is_free)
    }

    pub fn first_non_free_degree(&self) -> Option<i64> {
        self.degrees().find(|&n| !self.group(n).is_free())
    }

    /// `C[k]_n = C_{n-k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> ChainComplex {
        let s = sign(parity(k));
        Self::from_parts(self.lo + k, self.groups.clone(), |n| self.d(n - k).scale(&s))
    }

    pub fn direct_sum(parts: &[&ChainComplex]) -> ChainComplex {
        if parts.iter().all(|p| p.is_empty()) {
            return Self::zero();
        }
        let lo = parts.iter().filter(|p| !p.is_empty()).map(|p| p.lo).min().unwrap();
        let hi = parts.iter().filter(|p| !p.is_empty()).map(|p| p.hi()).max().unwrap();
        let groups = (lo..=hi).map(|n| FpGroup::direct_sum(&parts.iter().map(|p| p.group(n)).collect::<Vec<_>>())).collect();
        Self::from_parts(lo, groups, |n| IntMatrix::block_diag(&parts.iter().map(|p| p.d(n)).collect::<Vec<_>>()))
    }

    /// Same complex with extra relators per degree; the caller guarantees
    /// the differential preserves them.
    pub fn with_relations(&self, extra: impl Fn(i64) -> IntMatrix) -> ChainComplex {
        let groups = self.degrees().map(|n| self.group(n).with_relations(&extra(n))).collect();
        Self::from_parts(self.lo, groups, |n| self.d(n).clone())
    }

    /// Apply the differential to an element.
    pub fn diff(&self, x: &Elem) -> Elem {
        Elem::new(x.deg - 1, self.d(x.deg).mul_vec(&x.v))
    }

    /// Is `x` zero modulo relations?
    pub fn is_zero_elem(&self, x: &Elem) -> bool {
        self.group(x.deg).lattice().contains(&x.v)
    }

    pub fn same_homology(&self, other: &ChainComplex) -> bool {
        self.homology() == other.homology()
    }

    pub fn identity(&self) -> ChainMap {
        ChainMap::identity(self)
    }
}

// ---------------------------------------------------------------- maps

/// Degree-zero chain map given by matrices on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    src: ChainComplex,
    tgt: ChainComplex,
    lo: i64,
    comps: Vec<IntMatrix>,
}

fn union_range(a: &ChainComplex, b: &ChainComplex) -> Option<(i64, i64)> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => None,
        (false, true) => Some((a.lo, a.hi())),
        (true, false) => Some((b.lo, b.hi())),
        (false, false) => Some((a.lo.min(b.lo), a.hi().max(b.hi()))),
    }
}

impl ChainMap {
    /// Build without validation; `comp(n)` is queried over the union of supports.
    pub fn from_fn(src: &ChainComplex, tgt: &ChainComplex, mut comp: impl FnMut(i64) -> IntMatrix) -> Self {
        let Some((lo, hi)) = union_range(src, tgt) else {
            return ChainMap { src: src.clone(), tgt: tgt.clone(), lo: 0, comps: Vec::new() };
        };
        let comps = (lo..=hi)
            .map(|n| {
                let m = comp(n);
                assert_eq!(m.shape(), (tgt.gens(n), src.gens(n)), "chain map component {n} has wrong shape");
                m
            })
            .collect();
        ChainMap { src: src.clone(), tgt: tgt.clone(), lo, comps }
    }

    pub fn new(src: &ChainComplex, tgt: &ChainComplex, comp: impl FnMut(i64) -> IntMatrix) -> Result<Self, ChainError> {
        let f = Self::from_fn(src, tgt, comp);
        f.validate()?;
        Ok(f)
    }

    /// Checked constructor that reports wrong shapes instead of panicking.
    pub fn try_from_matrices(src: &ChainComplex, tgt: &ChainComplex, comps: &BTreeMap<i64, IntMatrix>) -> Result<Self, ChainError> {
        if let Some((lo, hi)) = union_range(src, tgt) {
            for (&n, m) in comps {
                if (n < lo || n > hi) && !m.is_zero() {
                    return Err(ChainError::MalformedMap { degree: n, reason: "component outside support".into() });
                }
            }
            for n in lo..=hi {
                let want = (tgt.gens(n), src.gens(n));
                if let Some(m) = comps.get(&n) {
                    if m.shape() != want {
                        return Err(ChainError::MalformedMap {
                            degree: n,
                            reason: format!("component is {}x{}, expected {}x{}", m.rows(), m.cols(), want.0, want.1),
                        });
                    }
                }
            }
        }
        Self::new(src, tgt, |n| comps.get(&n).cloned().unwrap_or_else(|| IntMatrix::zeros(tgt.gens(n), src.gens(n))))
    }

    /// Build from generator images, unchecked.
    pub fn from_gen_fn(src: &ChainComplex, tgt: &ChainComplex, mut f: impl FnMut(i64, usize) -> Elem) -> Self {
        Self::from_fn(src, tgt, |n| {
            let mut m = IntMatrix::zeros(tgt.gens(n), src.gens(n));
            for i in 0..src.gens(n) {
                let y = f(n, i);
                debug_assert_eq!(y.deg, n);
                for (r, v) in y.v.into_iter().enumerate() {
                    m.set(r, i, v);
                }
            }
            m
        })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        Self::from_fn(c, c, |n| IntMatrix::identity(c.gens(n)))
    }

    pub fn zero(src: &ChainComplex, tgt: &ChainComplex) -> Self {
        Self::from_fn(src, tgt, |n| IntMatrix::zeros(tgt.gens(n), src.gens(n)))
    }

    /// The unique map out of the zero complex.
    pub fn from_zero(tgt: &ChainComplex) -> Self {
        Self::zero(&ChainComplex::zero(), tgt)
    }

    pub fn src(&self) -> &ChainComplex {
        &self.src
    }

    pub fn tgt(&self) -> &ChainComplex {
        &self.tgt
    }

    pub fn comp(&self, n: i64) -> &IntMatrix {
        let k = n - self.lo;
        if k < 0 || k as usize >= self.comps.len() {
            &EMPTY
        } else {
            &self.comps[k as usize]
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.lo + self.comps.len() as i64 - 1
    }

    pub fn apply(&self, x: &Elem) -> Elem {
        let m = self.comp(x.deg);
        if m.cols() == 0 {
            return Elem::zero(x.deg, self.tgt.gens(x.deg));
        }
        Elem::new(x.deg, m.mul_vec(&x.v))
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        for n in self.degrees() {
            let f = self.comp(n);
            if f.shape() != (self.tgt.gens(n), self.src.gens(n)) {
                return Err(ChainError::MalformedMap { degree: n, reason: "component has wrong shape".into() });
            }
            let lat = self.tgt.group(n).lattice();
            if let Some(c) = lat.contains_columns(&(f * self.src.rels(n))) {
                return Err(ChainError::MalformedMap { degree: n, reason: format!("relation {c} is not preserved") });
            }
        }
        for n in self.degrees().chain(std::iter::once(self.degrees().end() + 1)) {
            let (s0, s1, t0, t1) = (self.src.gens(n), self.src.gens(n - 1), self.tgt.gens(n), self.tgt.gens(n - 1));
            let lhs = &self.tgt.d(n).resized(t1, t0) * &self.comp_sized(n);
            let rhs = &self.comp_sized(n - 1) * &self.src.d(n).resized(s1, s0);
            let diff = &lhs - &rhs;
            if let Some(c) = self.tgt.group(n - 1).lattice().contains_columns(&diff) {
                return Err(ChainError::MalformedMap {
                    degree: n,
                    reason: format!("does not commute with differentials on generator {c}"),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn comp_sized(&self, n: i64) -> IntMatrix {
        let m = self.comp(n);
        if m.shape() == (self.tgt.gens(n), self.src.gens(n)) {
            m.clone()
        } else {
            IntMatrix::zeros(self.tgt.gens(n), self.src.gens(n))
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> ChainMap {
        assert_eq!(self.tgt, other.src, "composing maps with mismatched ends");
        ChainMap::from_fn(&self.src, &other.tgt, |n| &other.comp_sized(n) * &self.comp_sized(n))
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &ChainMap) -> ChainMap {
        first.then(self)
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        assert!(self.src == other.src && self.tgt == other.tgt, "adding maps with different ends");
        ChainMap::from_fn(&self.src, &self.tgt, |n| &self.comp_sized(n) + &other.comp_sized(n))
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap::from_fn(&self.src, &self.tgt, |n| -&self.comp_sized(n))
    }

    pub fn scale(&self, k: &Int) -> ChainMap {
        ChainMap::from_fn(&self.src, &self.tgt, |n| self.comp_sized(n).scale(k))
    }

    /// Equality of the underlying homomorphisms (modulo target relations).
    pub fn equals_mod_relations(&self, other: &ChainMap) -> bool {
        if self.src != other.src || self.tgt != other.tgt {
            return false;
        }
        self.degrees().chain(other.degrees()).all(|n| {
            let diff = &self.comp_sized(n) - &other.comp_sized(n);
            self.tgt.group(n).lattice().contains_columns(&diff).is_none()
        })
    }

    pub fn is_zero_mod_relations(&self) -> bool {
        self.degrees().all(|n| self.tgt.group(n).lattice().contains_columns(self.comp(n)).is_none())
    }

    /// Mapping cone: `X_{n-1} + Y_n`, `d(x, y) = (-dx, fx + dy)`.
    pub fn cone(&self) -> ChainComplex {
        let (x, y) = (&self.src, &self.tgt);
        let Some((lo, hi)) = union_range(&x.shift(1), y) else { return ChainComplex::zero() };
        let groups = (lo..=hi).map(|n| FpGroup::direct_sum(&[x.group(n - 1), y.group(n)])).collect();
        ChainComplex::from_parts(lo, groups, |n| {
            let (xa, xb, ya, yb) = (x.gens(n - 1), x.gens(n - 2), y.gens(n), y.gens(n - 1));
            let mut m = IntMatrix::zeros(xb + yb, xa + ya);
            if xa > 0 && xb > 0 {
                m.paste(0, 0, &-x.d(n - 1));
            }
            if xa > 0 && yb > 0 {
                m.paste(xb, 0, &self.comp_sized(n - 1));
            }
            if ya > 0 && yb > 0 {
                m.paste(xb, xa, y.d(n));
            }
            m
        })
    }

    pub fn is_weak_equivalence(&self) -> bool {
        self.cone().is_acyclic()
    }

    /// Induces isomorphisms on homology in degrees `<= k`.
    pub fn is_weak_equivalence_through(&self, k: i64) -> bool {
        self.cone().is_acyclic_through(k + 1)
    }

    /// Component in degree `n` between the reduced presentations.
    fn reduced_comp(&self, n: i64) -> IntMatrix {
        let (rs, rt) = (self.src.group(n).reduction(), self.tgt.group(n).reduction());
        rt.project_matrix(&rs.restrict_columns(&self.comp_sized(n)))
    }

    fn injective_at(&self, n: i64) -> bool {
        let (rs, rt) = (self.src.group(n).reduction(), self.tgt.group(n).reduction());
        let a = rs.keep().len();
        if a == 0 {
            return true;
        }
        let m = self.reduced_comp(n).hstack(rt.rels());
        let (k, _) = m.kernel_and_image();
        let proj = k.submatrix(0..a, 0..k.cols());
        Lattice::new(rs.rels()).contains_columns(&proj).is_none()
    }

    fn surjective_at(&self, n: i64) -> bool {
        let rt = self.tgt.group(n).reduction();
        let b = rt.keep().len();
        if b == 0 {
            return true;
        }
        let m = self.reduced_comp(n).hstack(rt.rels());
        Lattice::new(&m).contains_columns(&IntMatrix::identity(b)).is_none()
    }

    pub fn is_injective(&self) -> bool {
        self.degrees().all(|n| self.injective_at(n))
    }

    pub fn is_surjective(&self) -> bool {
        self.degrees().all(|n| self.surjective_at(n))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.degrees().all(|n| self.injective_at(n) && self.surjective_at(n))
    }

    /// Two-sided inverse of an isomorphism.
    pub fn inverse(&self) -> Option<ChainMap> {
        if !self.is_isomorphism() {
            return None;
        }
        let (s, t) = (&self.src, &self.tgt);
        let mut comps = BTreeMap::new();
        for n in t.degrees() {
            let lat = Lattice::new(&self.comp_sized(n).hstack(t.rels(n)));
            let mut m = IntMatrix::zeros(s.gens(n), t.gens(n));
            for j in 0..t.gens(n) {
                let c = lat.coefficients(&unit_vec(t.gens(n), j))?;
                for i in 0..s.gens(n) {
                    m.set(i, j, c[i].clone());
                }
            }
            comps.insert(n, m);
        }
        Some(ChainMap::from_fn(t, s, |n| comps.remove(&n).unwrap_or_else(|| IntMatrix::zeros(s.gens(n), t.gens(n)))))
    }

    /// First degree where the map fails to be a split injection with free
    /// cokernel, with a reason.
    pub fn cofibration_failure(&self) -> Option<(i64, String)> {
        for n in self.degrees() {
            if !self.injective_at(n) {
                return Some((n, "component is not injective".into()));
            }
            let m = self.comp_sized(n).hstack(self.tgt.rels(n));
            if m.invariant_factors().iter().any(|d| d > &Int::one()) {
                return Some((n, "cokernel has torsion".into()));
            }
        }
        None
    }

    pub fn is_cofibration(&self) -> bool {
        self.cofibration_failure().is_none()
    }

    /// Cokernel complex and the quotient map.
    pub fn cokernel(&self) -> (ChainComplex, ChainMap) {
        let y = &self.tgt;
        let q = y.with_relations(|n| self.comp_sized(n));
        let p = ChainMap::from_fn(y, &q, |n| IntMatrix::identity(y.gens(n)));
        (q, p)
    }

    /// Transport along an equal-up-to-presentation replacement of either end.
    pub fn with_ends(&self, src: &ChainComplex, tgt: &ChainComplex) -> ChainMap {
        ChainMap::from_fn(src, tgt, |n| self.comp_sized(n))
    }

    pub fn component_matrix(&self, n: i64) -> IntMatrix {
        self.comp_sized(n)
    }

    /// Induced map on homology is an isomorphism in every degree, checked
    /// directly by comparing invariants (used as an independent cross-check
    /// of the cone test).
    pub fn homology_invariants_match(&self) -> bool {
        self.src.homology() == self.tgt.homology()
    }
}

// ---------------------------------------------------------------- operations

pub fn homology(c: &ChainComplex) -> Homology {
    c.homology()
}

pub fn is_weak_equivalence(f: &ChainMap) -> bool {
    f.is_weak_equivalence()
}

pub fn is_cofibration(f: &ChainMap) -> bool {
    f.is_cofibration()
}

/// Direct sum with inclusions and projections.
pub fn direct_sum(parts: &[&ChainComplex]) -> (ChainComplex, Vec<ChainMap>, Vec<ChainMap>) {
    let s = ChainComplex::direct_sum(parts);
    let mut incl = Vec::new();
    let mut proj = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let off = |n: i64| parts[..i].iter().map(|q| q.gens(n)).sum::<usize>();
        incl.push(ChainMap::from_fn(p, &s, |n| {
            let mut m = IntMatrix::zeros(s.gens(n), p.gens(n));
            m.paste(off(n), 0, &IntMatrix::identity(p.gens(n)));
            m
        }));
        proj.push(ChainMap::from_fn(&s, p, |n| {
            let mut m = IntMatrix::zeros(p.gens(n), s.gens(n));
            m.paste(0, off(n), &IntMatrix::identity(p.gens(n)));
            m
        }));
    }
    (s, incl, proj)
}

/// Map out of a direct sum from its components.
pub fn copair(sum: &ChainComplex, maps: &[&ChainMap], tgt: &ChainComplex) -> ChainMap {
    ChainMap::from_fn(sum, tgt, |n| {
        let mut m = IntMatrix::zeros(tgt.gens(n), sum.gens(n));
        let mut off = 0;
        for f in maps {
            let c = f.comp_sized(n);
            m.paste(0, off, &c);
            off += c.cols();
        }
        m
    })
}

/// Pushout of `i: A -> B` along `f: A -> C`, with the two legs into it.
pub fn pushout(i: &ChainMap, f: &ChainMap) -> (ChainComplex, ChainMap, ChainMap) {
    assert_eq!(i.src, f.src, "pushout needs a common domain");
    let (b, c) = (&i.tgt, &f.tgt);
    let s = ChainComplex::direct_sum(&[b, c]);
    let d = s.with_relations(|n| i.comp_sized(n).vstack(&-&f.comp_sized(n)));
    let jb = ChainMap::from_fn(b, &d, |n| IntMatrix::identity(b.gens(n)).vstack(&IntMatrix::zeros(c.gens(n), b.gens(n))));
    let jc = ChainMap::from_fn(c, &d, |n| IntMatrix::zeros(b.gens(n), c.gens(n)).vstack(&IntMatrix::identity(c.gens(n))));
    (d, jb, jc)
}

/// Two-step free resolution `ε: F -> C` with `F` degreewise free and `ε`
/// a degreewise surjective weak equivalence.
pub fn free_resolution(c: &ChainComplex) -> ChainMap {
    if c.is_empty() {
        return ChainMap::identity(c);
    }
    let (lo, hi) = (c.lo(), c.hi());
    // image bases of the relation lattices
    let p: BTreeMap<i64, IntMatrix> =
        c.degrees().map(|n| (n, c.rels(n).smith_normal_form().image_basis())).collect();
    let pm = |n: i64| p.get(&n).cloned().unwrap_or_else(|| IntMatrix::zeros(c.gens(n), 0));
    let r = |n: i64| pm(n).cols();
    let solve_cols = |basis: &IntMatrix, m: &IntMatrix| -> IntMatrix {
        if basis.cols() == 0 {
            return IntMatrix::zeros(0, m.cols());
        }
        let snf = basis.smith_normal_form();
        let cols: Vec<Vec<Int>> =
            (0..m.cols()).map(|j| snf.solve(&m.column(j)).ok().expect("column lies in the relation lattice")).collect();
        IntMatrix::from_columns(basis.cols(), &cols)
    };
    // d_n P_n = P_{n-1} D'_n and d_{n-1} d_n = P_{n-2} h_n
    let dprime = |n: i64| solve_cols(&pm(n - 1), &(c.d(n) * &pm(n)).resized(c.gens(n - 1), r(n)));
    let h = |n: i64| solve_cols(&pm(n - 2), &(c.d(n - 1) * c.d(n)).resized(c.gens(n - 2), c.gens(n)));
    let groups = (lo..=hi + 1).map(|n| FpGroup::free(c.gens(n) + r(n - 1))).collect();
    let f = ChainComplex::from_parts(lo, groups, |n| {
        let (g, rr, g1, rr1) = (c.gens(n), r(n - 1), c.gens(n - 1), r(n - 2));
        let mut m = IntMatrix::zeros(g1 + rr1, g + rr);
        m.paste(0, 0, &c.d(n).resized(g1, g));
        m.paste(0, g, &pm(n - 1));
        m.paste(g1, 0, &-&h(n).resized(rr1, g));
        m.paste(g1, g, &-&dprime(n - 1).resized(rr1, rr));
        m
    });
    ChainMap::from_fn(&f, c, |n| {
        let mut m = IntMatrix::zeros(c.gens(n), f.gens(n));
        m.paste(0, 0, &IntMatrix::identity(c.gens(n)));
        m
    })
}

trait Resize {
    fn resized(&self, rows: usize, cols: usize) -> IntMatrix;
}

impl Resize for IntMatrix {
    /// Treat a degenerate `0x0` placeholder as the zero map of the given shape.
    fn resized(&self, rows: usize, cols: usize) -> IntMatrix {
        if self.shape() == (rows, cols) {
            self.clone()
        } else {
            assert!(self.is_zero(), "resizing a nonzero matrix");
            IntMatrix::zeros(rows, cols)
        }
    }
}

/// Diagonal `l: B -> E` with `l∘i = u` and `p∘l = v`, for a cofibration
/// `i: A -> B` and a degreewise surjective weak equivalence `p: E -> Y`.
pub fn lift_against_trivial_fibration(
    i: &ChainMap,
    p: &ChainMap,
    top: &ChainMap,
    bottom: &ChainMap,
) -> Result<ChainMap, ChainError> {
    let (a, b, e, y) = (i.src(), i.tgt(), p.src(), p.tgt());
    if top.src() != a || top.tgt() != e || bottom.src() != b || bottom.tgt() != y {
        return Err(ChainError::LiftFailed { degree: 0, reason: "square has mismatched ends".into() });
    }
    if !p.is_surjective() || !p.is_weak_equivalence() {
        return Err(ChainError::LiftFailed { degree: 0, reason: "p is not a trivial fibration".into() });
    }
    if !top.then(p).equals_mod_relations(&i.then(bottom)) {
        return Err(ChainError::LiftFailed { degree: 0, reason: "square does not commute".into() });
    }
    let mut comps: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    if b.is_empty() {
        return Ok(ChainMap::zero(b, e));
    }
    for n in b.degrees() {
        let (na, nb, ne) = (a.gens(n), b.gens(n), e.gens(n));
        let m = i.comp_sized(n).hstack(b.rels(n));
        let snf = m.smith_normal_form();
        let k = snf.rank();
        if snf.d[..k].iter().any(|d| !d.is_one()) {
            return Err(ChainError::NotCofibration { degree: n, reason: "cokernel has torsion".into() });
        }
        let pi = snf.u.submatrix(k..nb, 0..nb);
        let q: Vec<Vec<Int>> = (k..nb).map(|j| snf.u_inv.column(j)).collect();
        // α: generators of B -> A with b - Σ π_j(b) q_j = i α(b) + R β(b)
        let mut alpha_cols = Vec::with_capacity(nb);
        for t in 0..nb {
            let mut w = unit_vec(nb, t);
            for (j, qj) in q.iter().enumerate() {
                let coeff = pi.get(j, t).clone();
                if !coeff.is_zero() {
                    for (x, y) in w.iter_mut().zip(qj) {
                        *x -= coeff.clone() * y;
                    }
                }
            }
            let sol = snf.solve(&w).ok().ok_or_else(|| ChainError::LiftFailed {
                degree: n,
                reason: "splitting of the cokernel failed".into(),
            })?;
            alpha_cols.push(sol[..na].to_vec());
        }
        let alpha = IntMatrix::from_columns(na, &alpha_cols);
        let prev = comps.get(&(n - 1)).cloned().unwrap_or_else(|| IntMatrix::zeros(e.gens(n - 1), b.gens(n - 1)));
        // block system [[p, R_Y, 0], [d_E, 0, R_E]] (e, s, t) = (v q, l d q)
        let (ny, ne1) = (y.gens(n), e.gens(n - 1));
        let (ry, re1) = (y.rels(n).cols(), e.rels(n - 1).cols());
        let mut sys = IntMatrix::zeros(ny + ne1, ne + ry + re1);
        sys.paste(0, 0, &p.comp_sized(n));
        sys.paste(0, ne, y.rels(n));
        sys.paste(ny, 0, &e.d(n).resized(ne1, ne));
        sys.paste(ny, ne + ry, e.rels(n - 1));
        let sys_snf = sys.smith_normal_form();
        let mut lifts = Vec::with_capacity(q.len());
        for qj in &q {
            let mut rhs = bottom.comp_sized(n).mul_vec(qj);
            let dq = b.d(n).resized(b.gens(n - 1), nb).mul_vec(qj);
            rhs.extend(prev.mul_vec(&dq));
            match sys_snf.solve(&rhs) {
                Solution::Solved(x) => lifts.push(x[..ne].to_vec()),
                Solution::Unsolvable(_) => {
                    return Err(ChainError::LiftFailed { degree: n, reason: "no lift of a cokernel generator".into() })
                }
            }
        }
        let emat = IntMatrix::from_columns(ne, &lifts);
        let l = &(&top.comp_sized(n) * &alpha) + &(&emat * &pi);
        comps.insert(n, l);
    }
    let l = ChainMap::from_fn(b, e, |n| comps.get(&n).cloned().unwrap_or_else(|| IntMatrix::zeros(e.gens(n), b.gens(n))));
    l.validate()?;
    if !i.then(&l).equals_mod_relations(top) || !l.then(p).equals_mod_relations(bottom) {
        return Err(ChainError::LiftFailed { degree: 0, reason: "constructed diagonal fails a triangle".into() });
    }
    Ok(l)
}

/// (cofibration, weak equivalence) factorization `f = h∘g`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub g: ChainMap,
    pub h: ChainMap,
    /// Lift of `f` through the resolution of the target.
    pub lift: ChainMap,
    pub resolution: ChainMap,
}

/// Factor `f: X -> Y` with `X` cofibrant through the mapping cylinder of a
/// lift of `f` to the free resolution of `Y`.
pub fn factorize(f: &ChainMap) -> Result<Factorization, ChainError> {
    let x = f.src();
    if let Some(n) = x.first_non_free_degree() {
        return Err(ChainError::NotCofibrant { degree: n });
    }
    let eps = free_resolution(f.tgt());
    let fr = eps.src().clone();
    let zero = ChainMap::from_zero(x);
    let lift = lift_against_trivial_fibration(&zero, &eps, &ChainMap::from_zero(&fr), f)?;
    let cyl = mapping_cylinder(&lift);
    let g = ChainMap::from_fn(x, &cyl, |n| {
        let mut m = IntMatrix::zeros(cyl.gens(n), x.gens(n));
        m.paste(0, 0, &IntMatrix::identity(x.gens(n)));
        m
    });
    let h = ChainMap::from_fn(&cyl, f.tgt(), |n| {
        let (xa, xb) = (x.gens(n), x.gens(n - 1));
        let mut m = IntMatrix::zeros(f.tgt().gens(n), cyl.gens(n));
        m.paste(0, 0, &f.comp_sized(n));
        m.paste(0, xa + xb, &eps.comp_sized(n));
        m
    });
    Ok(Factorization { g, h, lift, resolution: eps })
}

/// `Cyl_n = X_n + X_{n-1} + F_n` for `l: X -> F`.
pub fn mapping_cylinder(l: &ChainMap) -> ChainComplex {
    let (x, fr) = (l.src(), l.tgt());
    let Some((lo, hi)) = union_range(x, fr).map(|(a, b)| (a, b.max(x.hi() + 1))) else { return ChainComplex::zero() };
    let groups = (lo..=hi).map(|n| FpGroup::direct_sum(&[x.group(n), x.group(n - 1), fr.group(n)])).collect();
    ChainComplex::from_parts(lo, groups, |n| {
        let s = sign(parity(n - 1));
        let (xa, xb, xc) = (x.gens(n), x.gens(n - 1), x.gens(n - 2));
        let (fa, fb) = (fr.gens(n), fr.gens(n - 1));
        let mut m = IntMatrix::zeros(xb + xc + fb, xa + xb + fa);
        m.paste(0, 0, &x.d(n).resized(xb, xa));
        m.paste(0, xa, &IntMatrix::identity(xb).scale(&-s.clone()));
        m.paste(xb, xa, &x.d(n - 1).resized(xc, xb));
        m.paste(xb + xc, xa, &l.comp_sized(n - 1).scale(&s));
        m.paste(xb + xc, xa + xb, &fr.d(n).resized(fb, fa));
        m
    })
}

/// Direct sum with its summand bookkeeping.
#[derive(Clone, Debug)]
pub struct SumLayout {
    parts: Vec<ChainComplex>,
    complex: ChainComplex,
}

impl SumLayout {
    pub fn new(parts: Vec<ChainComplex>) -> Self {
        let complex = ChainComplex::direct_sum(&parts.iter().collect::<Vec<_>>());
        SumLayout { parts, complex }
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn parts(&self) -> &[ChainComplex] {
        &self.parts
    }

    pub fn offset(&self, t: i64, s: usize) -> usize {
        self.parts[..s].iter().map(|p| p.gens(t)).sum()
    }

    /// Summand and local index of a generator.
    pub fn locate(&self, t: i64, flat: usize) -> (usize, usize) {
        let mut off = 0;
        for (s, p) in self.parts.iter().enumerate() {
            let g = p.gens(t);
            if flat < off + g {
                return (s, flat - off);
            }
            off += g;
        }
        panic!("generator {flat} out of range in degree {t}");
    }

    pub fn embed(&self, s: usize, x: &Elem) -> Elem {
        let mut out = Elem::zero(x.deg, self.complex.gens(x.deg));
        let off = self.offset(x.deg, s);
        out.v[off..off + x.v.len()].clone_from_slice(&x.v);
        out
    }

    pub fn restrict(&self, s: usize, x: &Elem) -> Elem {
        let off = self.offset(x.deg, s);
        Elem::new(x.deg, x.v[off..off + self.parts[s].gens(x.deg)].to_vec())
    }

    pub fn inclusion(&self, s: usize) -> ChainMap {
        let p = &self.parts[s];
        ChainMap::from_fn(p, &self.complex, |n| {
            let mut m = IntMatrix::zeros(self.complex.gens(n), p.gens(n));
            m.paste(self.offset(n, s), 0, &IntMatrix::identity(p.gens(n)));
            m
        })
    }

    pub fn projection(&self, s: usize) -> ChainMap {
        let p = &self.parts[s];
        ChainMap::from_fn(&self.complex, p, |n| {
            let mut m = IntMatrix::zeros(p.gens(n), self.complex.gens(n));
            m.paste(0, self.offset(n, s), &IntMatrix::identity(p.gens(n)));
            m
        })
    }

    /// Map out of the sum from per-summand generator images.
    pub fn map_from_fn(&self, tgt: &ChainComplex, mut f: impl FnMut(usize, i64, usize) -> Elem) -> ChainMap {
        ChainMap::from_fn(&self.complex, tgt, |t| {
            let mut m = IntMatrix::zeros(tgt.gens(t), self.complex.gens(t));
            for flat in 0..self.complex.gens(t) {
                let (s, i) = self.locate(t, flat);
                let y = f(s, t, i);
                for (r, v) in y.v.into_iter().enumerate() {
                    m.set(r, flat, v);
                }
            }
            m
        })
    }
}

// ---------------------------------------------------------------- tensor

/// One block of a tensor product: a degree vector and its generator range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub degs: Vec<i64>,
    pub offset: usize,
    pub size: usize,
}

/// Total complex of a multi-fold tensor product with its block layout.
///
/// Blocks in each total degree are ordered lexicographically by degree
/// vector; inside a block the generator index is mixed radix with the
/// first factor most significant.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    factors: Vec<ChainComplex>,
    complex: OnceLock<ChainComplex>,
    blocks: BTreeMap<i64, Vec<Block>>,
}

fn degree_vectors(factors: &[ChainComplex]) -> BTreeMap<i64, Vec<Vec<i64>>> {
    let mut out: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    if factors.iter().any(|f| f.is_empty()) {
        return out;
    }
    let mut cur = vec![0i64; factors.len()];
    fn rec(k: usize, factors: &[ChainComplex], cur: &mut Vec<i64>, out: &mut BTreeMap<i64, Vec<Vec<i64>>>) {
        if k == factors.len() {
            if cur.iter().zip(factors).all(|(&p, f)| f.gens(p) > 0) {
                out.entry(cur.iter().sum()).or_default().push(cur.clone());
            }
            return;
        }
        for p in factors[k].degrees() {
            cur[k] = p;
            rec(k + 1, factors, cur, out);
        }
    }
    rec(0, factors, &mut cur, &mut out);
    for v in out.values_mut() {
        v.sort();
    }
    out
}

fn kron_all(ms: &[IntMatrix]) -> IntMatrix {
    let mut acc = IntMatrix::identity(1);
    for m in ms {
        acc = acc.kronecker(m);
    }
    acc
}

impl TensorProduct {
    pub fn new(factors: Vec<ChainComplex>) -> Self {
        let vecs = degree_vectors(&factors);
        let mut blocks: BTreeMap<i64, Vec<Block>> = BTreeMap::new();
        for (&t, vs) in &vecs {
            let mut off = 0;
            let list = vs
                .iter()
                .map(|d| {
                    let size = d.iter().zip(&factors).map(|(&p, f)| f.gens(p)).product();
                    let b = Block { degs: d.clone(), offset: off, size };
                    off += size;
                    b
                })
                .collect();
            blocks.insert(t, list);
        }
        TensorProduct { factors, complex: OnceLock::new(), blocks }
    }

    /// Generators in total degree `t`.
    pub fn gens(&self, t: i64) -> usize {
        self.blocks(t).iter().map(|b| b.size).sum()
    }

    fn build(&self) -> ChainComplex {
        let (factors, blocks) = (&self.factors, &self.blocks);
        let (lo, hi) = match (blocks.keys().next(), blocks.keys().next_back()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return ChainComplex::zero(),
        };
        let size = |t: i64| self.gens(t);
        let groups: Vec<FpGroup> = (lo..=hi)
            .map(|t| {
                let mut cols: Vec<(usize, IntMatrix)> = Vec::new();
                for b in blocks.get(&t).into_iter().flatten() {
                    for i in 0..factors.len() {
                        let parts: Vec<IntMatrix> = b
                            .degs
                            .iter()
                            .enumerate()
                            .map(|(j, &p)| {
                                if j == i {
                                    factors[j].rels(p).clone()
                                } else {
                                    IntMatrix::identity(factors[j].gens(p))
                                }
                            })
                            .collect();
                        let k = kron_all(&parts);
                        if k.cols() > 0 {
                            cols.push((b.offset, k));
                        }
                    }
                }
                let mut rels = IntMatrix::zeros(size(t), cols.iter().map(|c| c.1.cols()).sum());
                let mut at = 0;
                for (off, k) in &cols {
                    rels.paste(*off, at, k);
                    at += k.cols();
                }
                FpGroup::new(size(t), rels)
            })
            .collect();
        let find = |t: i64, degs: &[i64]| -> Option<Block> {
            blocks.get(&t).and_then(|bs| bs.iter().find(|b| b.degs == degs).cloned())
        };
        ChainComplex::from_parts(lo, groups, |t| {
            let mut m = IntMatrix::zeros(size(t - 1), size(t));
            for b in blocks.get(&t).into_iter().flatten() {
                let mut koszul = 0i64;
                for i in 0..factors.len() {
                    let mut degs = b.degs.clone();
                    degs[i] -= 1;
                    if let Some(tb) = find(t - 1, &degs) {
                        let parts: Vec<IntMatrix> = b
                            .degs
                            .iter()
                            .enumerate()
                            .map(|(j, &p)| {
                                if j == i {
                                    factors[j].d(p).resized(factors[j].gens(p - 1), factors[j].gens(p))
                                } else {
                                    IntMatrix::identity(factors[j].gens(p))
                                }
                            })
                            .collect();
                        let k = kron_all(&parts).scale(&sign(parity(koszul)));
                        m.paste(tb.offset, b.offset, &k);
                    }
                    koszul += b.degs[i];
                }
            }
            m
        })
    }

    pub fn complex(&self) -> &ChainComplex {
        self.complex.get_or_init(|| self.build())
    }

    pub fn factors(&self) -> &[ChainComplex] {
        &self.factors
    }

    pub fn blocks(&self, total: i64) -> &[Block] {
        self.blocks.get(&total).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn all_blocks(&self) -> impl Iterator<Item = (i64, &Block)> {
        self.blocks.iter().flat_map(|(t, bs)| bs.iter().map(move |b| (*t, b)))
    }

    pub fn block(&self, degs: &[i64]) -> Option<&Block> {
        let t = degs.iter().sum();
        self.blocks(t).iter().find(|b| b.degs == degs)
    }

    /// Flat index of a pure tensor of generators.
    pub fn index(&self, degs: &[i64], idx: &[usize]) -> Option<(i64, usize)> {
        let b = self.block(degs)?;
        let mut flat = 0;
        for (k, (&p, &i)) in degs.iter().zip(idx).enumerate() {
            flat = flat * self.factors[k].gens(p) + i;
        }
        Some((degs.iter().sum(), b.offset + flat))
    }

    /// Decompose a flat index in total degree `t` into block and per-factor indices.
    pub fn unindex(&self, t: i64, flat: usize) -> (Vec<i64>, Vec<usize>) {
        let b = self.blocks(t).iter().find(|b| flat >= b.offset && flat < b.offset + b.size).expect("index in range");
        let mut rem = flat - b.offset;
        let mut idx = vec![0; b.degs.len()];
        for k in (0..b.degs.len()).rev() {
            let g = self.factors[k].gens(b.degs[k]);
            idx[k] = rem % g;
            rem /= g;
        }
        (b.degs.clone(), idx)
    }

    /// Pure tensor of elements.
    pub fn tensor_elems(&self, xs: &[&Elem]) -> Elem {
        let degs: Vec<i64> = xs.iter().map(|x| x.deg).collect();
        let t = degs.iter().sum();
        let mut out = Elem::zero(t, self.gens(t));
        if let Some(b) = self.block(&degs) {
            let mut acc = vec![Int::one()];
            for x in xs {
                let mut next = Vec::with_capacity(acc.len() * x.v.len());
                for a in &acc {
                    for y in &x.v {
                        next.push(a * y);
                    }
                }
                acc = next;
            }
            out.v[b.offset..b.offset + b.size].clone_from_slice(&acc);
        }
        out
    }

    /// Degree-zero map between tensor products induced by one map per factor.
    pub fn map_from_factors(src: &TensorProduct, tgt: &TensorProduct, maps: &[&ChainMap]) -> ChainMap {
        assert_eq!(src.factors.len(), maps.len(), "one map per factor");
        ChainMap::from_fn(src.complex(), tgt.complex(), |t| {
            let mut m = IntMatrix::zeros(tgt.gens(t), src.gens(t));
            for b in src.blocks(t) {
                if let Some(tb) = tgt.block(&b.degs) {
                    let parts: Vec<IntMatrix> =
                        b.degs.iter().zip(maps).map(|(&p, f)| f.comp_sized(p)).collect();
                    m.paste(tb.offset, b.offset, &kron_all(&parts));
                }
            }
            m
        })
    }

    /// Map defined on pure tensors of generators.
    pub fn map_from_fn(&self, tgt: &ChainComplex, mut f: impl FnMut(&[i64], &[usize]) -> Elem) -> ChainMap {
        ChainMap::from_fn(self.complex(), tgt, |t| {
            let mut m = IntMatrix::zeros(tgt.gens(t), self.gens(t));
            for flat in 0..self.gens(t) {
                let (degs, idx) = self.unindex(t, flat);
                let y = f(&degs, &idx);
                assert_eq!(y.deg, t, "map on tensors must preserve degree");
                for (r, v) in y.v.into_iter().enumerate() {
                    m.set(r, flat, v);
                }
            }
            m
        })
    }
}

pub fn tensor(c: &ChainComplex, d: &ChainComplex) -> ChainComplex {
    TensorProduct::new(vec![c.clone(), d.clone()]).complex().clone()
}

pub fn tensor_map(f: &ChainMap, g: &ChainMap) -> ChainMap {
    let s = TensorProduct::new(vec![f.src().clone(), g.src().clone()]);
    let t = TensorProduct::new(vec![f.tgt().clone(), g.tgt().clone()]);
    TensorProduct::map_from_factors(&s, &t, &[f, g])
}

/// Symmetry `A ⊗ B -> B ⊗ A`, `a ⊗ b ↦ (-1)^{|a||b|} b ⊗ a`.
pub fn swap(ab: &TensorProduct, ba: &TensorProduct) -> ChainMap {
    ab.map_from_fn(ba.complex(), |degs, idx| {
        let (t, flat) = ba.index(&[degs[1], degs[0]], &[idx[1], idx[0]]).expect("swapped block exists");
        let mut e = Elem::zero(t, ba.complex().gens(t));
        e.v[flat] = sign(parity(degs[0]) && parity(degs[1]));
        e
    })
}

/// Bilinear chain map `L ⊗ R -> T` stored on a binary tensor layout.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub layout: TensorProduct,
    pub map: ChainMap,
}

impl Pairing {
    pub fn new(layout: TensorProduct, map: ChainMap) -> Self {
        assert_eq!(layout.factors.len(), 2, "pairing needs two factors");
        assert_eq!(layout.complex(), map.src(), "pairing map must start at the tensor product");
        Pairing { layout, map }
    }

    /// Pairing from its values on pairs of generators.
    pub fn from_fn(
        left: &ChainComplex,
        right: &ChainComplex,
        target: &ChainComplex,
        mut f: impl FnMut(i64, usize, i64, usize) -> Elem,
    ) -> Self {
        let layout = TensorProduct::new(vec![left.clone(), right.clone()]);
        let map = layout.map_from_fn(target, |degs, idx| f(degs[0], idx[0], degs[1], idx[1]));
        Pairing { layout, map }
    }

    pub fn left(&self) -> &ChainComplex {
        &self.layout.factors[0]
    }

    pub fn right(&self) -> &ChainComplex {
        &self.layout.factors[1]
    }

    pub fn target(&self) -> &ChainComplex {
        self.map.tgt()
    }

    /// Bilinear extension over the nonzero coordinates of `x` and `y`.
    pub fn apply(&self, x: &Elem, y: &Elem) -> Elem {
        let t = x.deg + y.deg;
        let mut out = Elem::zero(t, self.target().gens(t));
        let Some(b) = self.layout.block(&[x.deg, y.deg]) else { return out };
        let m = self.map.comp(t);
        if m.cols() == 0 {
            return out;
        }
        let ny = y.v.len();
        for (i, a) in x.v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, c) in y.v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let k = a * c;
                let col = b.offset + i * ny + j;
                for (r, o) in out.v.iter_mut().enumerate() {
                    let e = m.get(r, col);
                    if !e.is_zero() {
                        *o += &k * e;
                    }
                }
            }
        }
        out
    }

    pub fn apply_gens(&self, dl: i64, i: usize, dr: i64, j: usize) -> Elem {
        let t = dl + dr;
        let mut out = Elem::zero(t, self.target().gens(t));
        let Some((_, col)) = self.layout.index(&[dl, dr], &[i, j]) else { return out };
        let m = self.map.comp(t);
        if m.cols() > 0 {
            for (r, o) in out.v.iter_mut().enumerate() {
                o.clone_from(m.get(r, col));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        self.map.validate()
    }
}

// ---------------------------------------------------------------- flatness

/// Why a complex fails to be flat.
#[derive(Clone, Debug)]
pub enum Falsifier {
    /// `w` is a weak equivalence but `C ⊗ w` is not.
    WeakEquivalence { w: ChainMap, prime: i64, shift: i64 },
    /// `0 -> Z` is a cofibration but `C ⊗ (0 -> Z) = (0 -> C)` is not.
    Cofibration { k: ChainMap },
}

#[derive(Clone, Debug)]
pub struct FlatVerdict {
    pub flat: bool,
    pub falsifier: Option<Falsifier>,
}

fn prime_factors(n: &Int) -> Vec<i64> {
    let mut n = n.abs().to_i64().unwrap_or(0);
    let mut out = Vec::new();
    let mut p = 2;
    while n > 1 && p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Resolution `(Z --p--> Z) -> Z/p` shifted to degree `s`.
pub fn torsion_resolution(p: i64, s: i64) -> ChainMap {
    let eps = free_resolution(&ChainComplex::concentrated(0, FpGroup::cyclic(p)));
    let src = eps.src().shift(s);
    let tgt = eps.tgt().shift(s);
    ChainMap::from_fn(&src, &tgt, |n| eps.comp_sized(n - s))
}

/// Flatness: decided as degreewise freeness, with a verified falsifier
/// when the decision is negative.
pub fn is_flat(c: &ChainComplex) -> FlatVerdict {
    if c.is_cofibrant() {
        return FlatVerdict { flat: true, falsifier: None };
    }
    let primes: BTreeSet<i64> = c
        .degrees()
        .flat_map(|n| c.group(n).invariants().torsion)
        .flat_map(|t| prime_factors(&t))
        .collect();
    let mut shifts: Vec<i64> = ((-c.hi() - 1)..=(-c.lo() + 1)).collect();
    shifts.sort_by_key(|s| (s.abs(), *s < 0));
    for &p in &primes {
        for &s in &shifts {
            let w = torsion_resolution(p, s);
            if !tensor_map(&ChainMap::identity(c), &w).is_weak_equivalence() {
                return FlatVerdict { flat: false, falsifier: Some(Falsifier::WeakEquivalence { w, prime: p, shift: s }) };
            }
        }
    }
    let k = ChainMap::from_zero(&ChainComplex::unit());
    debug_assert!(!tensor_map(&ChainMap::identity(c), &k).is_cofibration());
    FlatVerdict { flat: false, falsifier: Some(Falsifier::Cofibration { k }) }
}

/// Run the decision and the empirical battery; errors if they disagree.
pub fn check_flatness(c: &ChainComplex, battery: &[ChainMap]) -> Result<FlatVerdict, ChainError> {
    let v = is_flat(c);
    let id = ChainMap::identity(c);
    if v.flat {
        for (i, w) in battery.iter().enumerate() {
            if w.is_weak_equivalence() && !tensor_map(&id, w).is_weak_equivalence() {
                return Err(ChainError::FlatnessDisagreement(format!("battery map {i} is not preserved")));
            }
            if w.is_cofibration() && !tensor_map(&id, w).is_cofibration() {
                return Err(ChainError::FlatnessDisagreement(format!("battery cofibration {i} is not preserved")));
            }
        }
    } else {
        let ok = match &v.falsifier {
            Some(Falsifier::WeakEquivalence { w, .. }) => {
                w.is_weak_equivalence() && !tensor_map(&id, w).is_weak_equivalence()
            }
            Some(Falsifier::Cofibration { k }) => k.is_cofibration() && !tensor_map(&id, k).is_cofibration(),
            None => false,
        };
        if !ok {
            return Err(ChainError::FlatnessDisagreement("falsifier does not falsify".into()));
        }
    }
    Ok(v)
}

/// Standard flatness battery: torsion resolutions in a range of shifts and
/// the generating cofibration `0 -> Z`.
pub fn default_battery(lo: i64, hi: i64) -> Vec<ChainMap> {
    let mut out = Vec::new();
    for p in [2, 3] {
        for s in lo..=hi {
            out.push(torsion_resolution(p, s));
        }
    }
    out.push(ChainMap::from_zero(&ChainComplex::unit()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ints;

    fn z2() -> ChainComplex {
        ChainComplex::concentrated(0, FpGroup::cyclic(2))
    }

    #[test]
    fn homology_of_multiplication_by_two() {
        let c = ChainComplex::two_term(0, 2);
        let h = c.homology();
        assert_eq!(h.at(0), GroupInvariants { rank: 0, torsion: ints(&[2]) });
        assert!(h.at(1).is_zero());
        assert_eq!(h.to_string(), "H0 = Z/2, H1 = 0");
        assert!(ChainComplex::zero().homology().is_zero());
        assert_eq!(z2().homology().at(0).to_string(), "Z/2");
    }

    #[test]
    fn homology_with_relations_in_cycles() {
        // Z/4 --(1)--> Z/2 : kernel is 2Z/4 = Z/2, cokernel 0
        let c = ChainComplex::new(
            0,
            vec![FpGroup::cyclic(2), FpGroup::cyclic(4)],
            vec![IntMatrix::from_i64_rows(1, &[&[1]])],
        )
        .unwrap();
        assert!(c.homology_at(0).is_zero());
        assert_eq!(c.homology_at(1).to_string(), "Z/2");
    }

    #[test]
    fn rejects_bad_complexes() {
        let bad = ChainComplex::free(
            0,
            &[1, 1, 1],
            vec![IntMatrix::from_i64_rows(1, &[&[1]]), IntMatrix::from_i64_rows(1, &[&[1]])],
        );
        assert!(matches!(bad, Err(ChainError::MalformedComplex { degree: 2, .. })));
        // Z/2 --1--> Z is not well defined
        let bad = ChainComplex::new(0, vec![FpGroup::free(1), FpGroup::cyclic(2)], vec![IntMatrix::from_i64_rows(1, &[&[1]])]);
        assert!(bad.is_err());
    }

    #[test]
    fn weak_equivalence_examples() {
        let eps = free_resolution(&z2());
        assert_eq!(eps.src(), &ChainComplex::two_term(0, 2));
        assert!(eps.is_weak_equivalence());
        assert!(eps.is_surjective());
        assert!(ChainMap::identity(&z2()).is_weak_equivalence());
        assert!(!ChainMap::from_zero(&z2()).is_weak_equivalence());
    }

    #[test]
    fn cofibration_examples() {
        assert!(ChainMap::from_zero(&ChainComplex::unit()).is_cofibration());
        assert!(!ChainMap::from_zero(&z2()).is_cofibration());
        let z2sum = ChainComplex::concentrated(0, FpGroup::free(2));
        let f = ChainMap::new(&ChainComplex::unit(), &z2sum, |_| IntMatrix::from_i64_rows(1, &[&[1], &[0]])).unwrap();
        assert!(f.is_cofibration());
        let twice = ChainMap::new(&ChainComplex::unit(), &ChainComplex::unit(), |_| IntMatrix::from_i64_rows(1, &[&[2]])).unwrap();
        assert!(!twice.is_cofibration());
    }

    #[test]
    fn resolution_of_mixed_group() {
        let g = FpGroup::new(2, IntMatrix::from_i64_rows(1, &[&[2], &[0]]));
        let eps = free_resolution(&ChainComplex::concentrated(0, g));
        let f = eps.src();
        assert_eq!((f.gens(0), f.gens(1)), (2, 1));
        assert_eq!(f.d(1), &IntMatrix::from_i64_rows(1, &[&[2], &[0]]));
        assert!(f.is_cofibrant());
        assert!(eps.is_weak_equivalence() && eps.is_surjective());
    }

    #[test]
    fn resolution_of_free_complex_is_identity() {
        let c = ChainComplex::two_term(0, 3);
        let eps = free_resolution(&c);
        assert_eq!(eps.src(), &c);
        assert!(eps.equals_mod_relations(&ChainMap::identity(&c)));
    }

    #[test]
    fn factorization_examples() {
        let f = ChainMap::from_zero(&z2());
        let fac = factorize(&f).unwrap();
        assert_eq!(fac.g.tgt(), &ChainComplex::two_term(0, 2));
        assert!(fac.g.is_cofibration() && fac.h.is_weak_equivalence());

        let id = ChainMap::identity(&ChainComplex::unit());
        let fac = factorize(&id).unwrap();
        assert!(fac.g.then(&fac.h).equals_mod_relations(&id));
        assert!(fac.g.is_cofibration() && fac.h.is_weak_equivalence());

        let two = ChainMap::new(&ChainComplex::unit(), &ChainComplex::unit(), |_| IntMatrix::from_i64_rows(1, &[&[2]])).unwrap();
        let fac = factorize(&two).unwrap();
        assert!(fac.g.is_cofibration() && fac.h.is_weak_equivalence());
        assert!(fac.g.then(&fac.h).equals_mod_relations(&two));

        assert!(matches!(factorize(&ChainMap::identity(&z2())), Err(ChainError::NotCofibrant { degree: 0 })));
    }

    #[test]
    fn lift_examples() {
        let eps = free_resolution(&z2());
        let z = ChainComplex::unit();
        let i = ChainMap::from_zero(&z);
        let v = ChainMap::new(&z, &z2(), |_| IntMatrix::from_i64_rows(1, &[&[1]])).unwrap();
        let l = lift_against_trivial_fibration(&i, &eps, &ChainMap::from_zero(eps.src()), &v).unwrap();
        assert!(l.then(&eps).equals_mod_relations(&v));

        let id = ChainMap::identity(&z);
        let l = lift_against_trivial_fibration(&id, &id, &id, &id).unwrap();
        assert!(l.equals_mod_relations(&id));
    }

    #[test]
    fn tensor_examples() {
        let t = tensor(&z2(), &ChainComplex::two_term(0, 2));
        assert_eq!(t.d(1), &IntMatrix::from_i64_rows(1, &[&[2]]));
        let h = t.homology();
        assert_eq!(h.at(0).to_string(), "Z/2");
        assert_eq!(h.at(1).to_string(), "Z/2");
        let c = ChainComplex::two_term(1, 5);
        assert_eq!(tensor(&ChainComplex::unit(), &c), c);
        assert!(tensor(&c, &ChainComplex::zero()).is_empty());
    }

    #[test]
    fn koszul_sign_squares_to_zero() {
        let a = ChainComplex::two_term(0, 2);
        let b = ChainComplex::two_term(0, 3);
        let t = TensorProduct::new(vec![a.clone(), b.clone(), a]);
        assert!(t.complex().validate().is_ok());
        assert_eq!(t.complex().homology().at(0).to_string(), "0");
    }

    #[test]
    fn flatness_examples() {
        let v = is_flat(&z2());
        assert!(!v.flat);
        match v.falsifier {
            Some(Falsifier::WeakEquivalence { w, prime, .. }) => {
                assert_eq!(prime, 2);
                assert_eq!(w.src(), &ChainComplex::two_term(0, 2));
            }
            other => panic!("unexpected falsifier {other:?}"),
        }
        assert!(is_flat(&ChainComplex::unit()).flat);
        let c = ChainComplex::direct_sum(&[&ChainComplex::concentrated(0, FpGroup::free(2)), &ChainComplex::unit().shift(1)]);
        assert!(is_flat(&c).flat);
        // contractible torsion complex falls back to the cofibration falsifier
        let cone = ChainMap::identity(&z2()).cone();
        assert!(matches!(is_flat(&cone).falsifier, Some(Falsifier::Cofibration { .. })));
        assert!(check_flatness(&cone, &default_battery(-1, 2)).is_ok());
        assert!(check_flatness(&c, &default_battery(-1, 2)).is_ok());
    }

    #[test]
    fn pushout_of_cofibration_is_cofibration() {
        let z = ChainComplex::unit();
        let two = ChainMap::new(&z, &z, |_| IntMatrix::from_i64_rows(1, &[&[2]])).unwrap();
        let i = ChainMap::new(&z, &ChainComplex::concentrated(0, FpGroup::free(2)), |_| IntMatrix::from_i64_rows(1, &[&[1], &[0]])).unwrap();
        let (_, _, jc) = pushout(&i, &two);
        assert!(jc.is_cofibration());
    }
}
