//! Exact linear algebra over the integers.
//!
//! Everything here is generic over an integral [`Scalar`]; the rest of the
//! crate instantiates it with [`num_bigint::BigInt`] through the
//! [`crate::IntMatrix`] alias. Smith normal form drives solving, kernels,
//! images and all the abelian-group invariants used elsewhere.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed};
use thiserror::Error;

/// Integral scalar usable by the matrix kernel.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + Integer + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer scalar must represent every i64")
    }
}

impl<T> Scalar for T where
    T: Clone + fmt::Debug + fmt::Display + Integer + Signed + FromPrimitive + Send + Sync + 'static
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZmatError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense row-major integer matrix. `0 x n` and `n x 0` matrices are valid
/// and represent zero maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    /// The `0 x 0` matrix, usable in `static` items.
    pub const fn empty() -> Self {
        Matrix { rows: 0, cols: 0, data: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Build from rows of machine integers; `cols` is needed for the
    /// zero-row case.
    pub fn from_i64_rows(cols: usize, rows: &[&[i64]]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().map(|&v| T::from_int(v)));
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column has wrong length");
            for (r, v) in col.iter().enumerate() {
                m.data[r * cols + c] = v.clone();
            }
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, d: &[T]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        let cols = self.cols;
        self.data[r * cols + c] = v;
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut T {
        let cols = self.cols;
        &mut self.data[r * cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * k.clone()).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack needs equal row counts");
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                other.get(r, c - self.cols).clone()
            }
        })
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack needs equal column counts");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.paste(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self.get(rows.start + r, cols.start + c).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |r, c| self.get(r, idx[c]).clone())
    }

    pub fn kronecker(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self.get(r / other.rows, c / other.cols).clone() * other.get(r % other.rows, c % other.cols).clone()
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ZmatError> {
        if self.cols != other.rows {
            return Err(ZmatError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let cell = out.get_mut(r, c);
                        *cell = cell.clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i += k * row_j
    fn row_axpy(&mut self, i: usize, j: usize, k: &T) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(j, c).clone();
            if !v.is_zero() {
                let cell = self.get_mut(i, c);
                *cell = cell.clone() + k.clone() * v;
            }
        }
    }

    /// col_i += k * col_j
    fn col_axpy(&mut self, i: usize, j: usize, k: &T) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, j).clone();
            if !v.is_zero() {
                let cell = self.get_mut(r, i);
                *cell = cell.clone() + k.clone() * v;
            }
        }
    }

    fn row_neg(&mut self, i: usize) {
        for c in 0..self.cols {
            let cell = self.get_mut(i, c);
            *cell = -cell.clone();
        }
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !a.get(r, k).is_zero()) {
                    Some(r) => {
                        a.row_swap(k, r);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j).clone() * a.get(k, k).clone() - a.get(i, k).clone() * a.get(k, j).clone())
                        / prev.clone();
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }

    /// Smith normal form with unimodular transforms.
    pub fn smith_normal_form(&self) -> Snf<T> {
        smith(self, true)
    }

    /// Diagonal invariants only; skips the transform bookkeeping.
    pub fn invariant_factors(&self) -> Vec<T> {
        smith(self, false).d
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().iter().filter(|d| !d.is_zero()).count()
    }

    /// Solve `self * x = b` over the integers.
    pub fn solve_integer(&self, b: &[T]) -> Result<Solution<T>, ZmatError> {
        if b.len() != self.rows {
            return Err(ZmatError::DimensionMismatch { expected: self.rows, found: b.len() });
        }
        Ok(self.smith_normal_form().solve(b))
    }

    /// Bases of the kernel (saturated) and of the image, as column matrices.
    pub fn kernel_and_image(&self) -> (Self, Self) {
        let snf = self.smith_normal_form();
        (snf.kernel_basis(), snf.image_basis())
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "{}", if r == 0 { " [" } else { "; " })?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            if r + 1 == self.rows {
                write!(f, "]")?;
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a.clone()).collect() }
    }
}

/// `U * A * V = diag(d)` with `d[i] | d[i+1]` and zeros trailing.
#[derive(Clone)]
pub struct Snf<T> {
    pub d: Vec<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub v_inv: Matrix<T>,
    rows: usize,
    cols: usize,
}

impl<T: fmt::Display> fmt::Debug for Snf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.d.iter().map(|x| x.to_string()).collect();
        write!(f, "Snf {{ d: [{}], u: {:?}, v: {:?} }}", d.join(", "), self.u, self.v)
    }
}

/// Outcome of an integral linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution<T> {
    Solved(Vec<T>),
    Unsolvable(Obstruction<T>),
}

impl<T> Solution<T> {
    pub fn ok(self) -> Option<Vec<T>> {
        match self {
            Solution::Solved(x) => Some(x),
            Solution::Unsolvable(_) => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Solution::Solved(_))
    }
}

/// Congruence certificate for unsolvability: `functional * A` lies in
/// `modulus * Z^n` while `functional * b` does not (`modulus = 0` means
/// exact vanishing).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction<T> {
    pub functional: Vec<T>,
    pub modulus: T,
    pub residue: T,
}

impl<T: Scalar> Obstruction<T> {
    /// Re-check the certificate against `A` and `b`.
    pub fn certifies(&self, a: &Matrix<T>, b: &[T]) -> bool {
        let fa = a.transpose().mul_vec(&self.functional);
        let fb = self.functional.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
        let divides = |v: &T| if self.modulus.is_zero() { v.is_zero() } else { v.is_multiple_of(&self.modulus) };
        fa.iter().all(divides) && !divides(&fb)
    }
}

impl<T: Scalar> Snf<T> {
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }

    /// Solve `A x = b` through the change of basis.
    pub fn solve(&self, b: &[T]) -> Solution<T> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let c = self.u.mul_vec(b);
        let r = self.rank();
        let mut y = vec![T::zero(); self.cols];
        for (i, ci) in c.iter().enumerate() {
            if i < r {
                let (q, rem) = ci.div_rem(&self.d[i]);
                if !rem.is_zero() {
                    return Solution::Unsolvable(Obstruction {
                        functional: self.u.row(i).to_vec(),
                        modulus: self.d[i].clone(),
                        residue: ci.mod_floor(&self.d[i]),
                    });
                }
                y[i] = q;
            } else if !ci.is_zero() {
                return Solution::Unsolvable(Obstruction {
                    functional: self.u.row(i).to_vec(),
                    modulus: T::zero(),
                    residue: ci.clone(),
                });
            }
        }
        Solution::Solved(self.v.mul_vec(&y))
    }

    /// Does `b` lie in the column lattice?
    pub fn contains(&self, b: &[T]) -> bool {
        self.solve(b).is_solved()
    }

    /// Saturated kernel basis (columns of `V` past the rank), each column
    /// normalized so its first nonzero entry is positive.
    pub fn kernel_basis(&self) -> Matrix<T> {
        let r = self.rank();
        let mut k = self.v.submatrix(0..self.cols, r..self.cols);
        for c in 0..k.cols() {
            let first = (0..k.rows()).map(|row| k.get(row, c).clone()).find(|x| !x.is_zero());
            if first.is_some_and(|x| x.is_negative()) {
                for row in 0..k.rows() {
                    let v = -k.get(row, c).clone();
                    k.set(row, c, v);
                }
            }
        }
        k
    }

    /// Basis of the image lattice: `d_i` times column `i` of `U^{-1}`.
    pub fn image_basis(&self) -> Matrix<T> {
        let r = self.rank();
        Matrix::from_fn(self.rows, r, |row, c| self.u_inv.get(row, c).clone() * self.d[c].clone())
    }
}

/// Echelon basis of a column lattice, built one vector at a time. The
/// basis never exceeds the ambient dimension.
#[derive(Clone, Debug)]
pub struct EchelonBasis<T> {
    dim: usize,
    pivots: BTreeMap<usize, Vec<T>>,
}

impl<T: Scalar> EchelonBasis<T> {
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, pivots: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Add `v` to the spanning set.
    pub fn insert(&mut self, mut v: Vec<T>) {
        assert_eq!(v.len(), self.dim, "vector has wrong length for lattice");
        loop {
            let Some(p) = v.iter().position(|x| !x.is_zero()) else { return };
            let Some(b) = self.pivots.get_mut(&p) else {
                if v[p].is_negative() {
                    v.iter_mut().for_each(|x| *x = -x.clone());
                }
                self.pivots.insert(p, v);
                return;
            };
            let (bp, vp) = (b[p].clone(), v[p].clone());
            if vp.is_multiple_of(&bp) {
                let q = vp / bp;
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    if !y.is_zero() {
                        *x = x.clone() - q.clone() * y.clone();
                    }
                }
                continue;
            }
            let e = bp.extended_gcd(&vp);
            let (sb, sv) = (bp / e.gcd.clone(), vp / e.gcd.clone());
            let nb: Vec<T> = b.iter().zip(&v).map(|(y, x)| e.x.clone() * y.clone() + e.y.clone() * x.clone()).collect();
            let nv: Vec<T> = v.iter().zip(b.iter()).map(|(x, y)| sb.clone() * x.clone() - sv.clone() * y.clone()).collect();
            *b = nb;
            v = nv;
        }
    }

    /// Basis vectors as columns, in pivot order.
    pub fn to_matrix(&self) -> Matrix<T> {
        let cols: Vec<Vec<T>> = self.pivots.values().cloned().collect();
        Matrix::from_columns(self.dim, &cols)
    }
}

struct Work<T> {
    a: Matrix<T>,
    track: bool,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
    v_inv: Matrix<T>,
}

impl<T: Scalar> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.row_swap(i, j);
        if self.track {
            self.u.row_swap(i, j);
            self.u_inv.col_swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.col_swap(i, j);
        if self.track {
            self.v.col_swap(i, j);
            self.v_inv.row_swap(i, j);
        }
    }

    /// row_i += k row_j
    fn add_row(&mut self, i: usize, j: usize, k: &T) {
        self.a.row_axpy(i, j, k);
        if self.track {
            self.u.row_axpy(i, j, k);
            self.u_inv.col_axpy(j, i, &-k.clone());
        }
    }

    /// col_i += k col_j
    fn add_col(&mut self, i: usize, j: usize, k: &T) {
        self.a.col_axpy(i, j, k);
        if self.track {
            self.v.col_axpy(i, j, k);
            self.v_inv.row_axpy(j, i, &-k.clone());
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.row_neg(i);
        if self.track {
            self.u.row_neg(i);
            // the inverse of negating a row is negating the matching column
            for r in 0..self.u_inv.rows() {
                let cell = self.u_inv.get_mut(r, i);
                *cell = -cell.clone();
            }
        }
    }
}

fn smith<T: Scalar>(a: &Matrix<T>, track: bool) -> Snf<T> {
    let (m, n) = a.shape();
    let mut w = Work {
        a: a.clone(),
        track,
        u: if track { Matrix::identity(m) } else { Matrix::empty() },
        u_inv: if track { Matrix::identity(m) } else { Matrix::empty() },
        v: if track { Matrix::identity(n) } else { Matrix::empty() },
        v_inv: if track { Matrix::identity(n) } else { Matrix::empty() },
    };
    let mut t = 0;
    while t < m.min(n) {
        // smallest absolute nonzero entry, ties broken by (row, col)
        let mut best: Option<(T, usize, usize)> = None;
        for r in t..m {
            for c in t..n {
                let x = w.a.get(r, c);
                if !x.is_zero() && best.as_ref().is_none_or(|(b, _, _)| x.abs() < *b) {
                    best = Some((x.abs(), r, c));
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        w.swap_rows(t, pr);
        w.swap_cols(t, pc);
        loop {
            let p = w.a.get(t, t).clone();
            let mut clean = true;
            for r in t + 1..m {
                let x = w.a.get(r, t).clone();
                if !x.is_zero() {
                    let q = x.div_floor(&p);
                    w.add_row(r, t, &-q);
                    if !w.a.get(r, t).is_zero() {
                        clean = false;
                    }
                }
            }
            for c in t + 1..n {
                let x = w.a.get(t, c).clone();
                if !x.is_zero() {
                    let q = x.div_floor(&p);
                    w.add_col(c, t, &-q);
                    if !w.a.get(t, c).is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // move the smallest leftover in row/column t to the pivot
                let mut best = (w.a.get(t, t).abs(), t, t);
                for r in t + 1..m {
                    let x = w.a.get(r, t);
                    if !x.is_zero() && x.abs() < best.0 {
                        best = (x.abs(), r, t);
                    }
                }
                for c in t + 1..n {
                    let x = w.a.get(t, c);
                    if !x.is_zero() && x.abs() < best.0 {
                        best = (x.abs(), t, c);
                    }
                }
                w.swap_rows(t, best.1);
                w.swap_cols(t, best.2);
                continue;
            }
            // divisibility of the remaining block
            let offender = (t + 1..m).find(|&r| (t + 1..n).any(|c| !w.a.get(r, c).is_multiple_of(&p)));
            match offender {
                Some(r) => w.add_row(t, r, &T::one()),
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let d = (0..m.min(n)).map(|i| w.a.get(i, i).clone()).collect();
    Snf { d, u: w.u, v: w.v, u_inv: w.u_inv, v_inv: w.v_inv, rows: m, cols: n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    type M = Matrix<BigInt>;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_snf(a: &M) {
        let s = a.smith_normal_form();
        let prod = &(&s.u * a) * &s.v;
        assert_eq!(prod, M::diagonal(a.rows(), a.cols(), &s.d));
        for w in s.d.windows(2) {
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero() && w[1].is_multiple_of(&w[0]), "divisibility chain broken: {:?}", s.d);
        }
        assert!(s.d.iter().all(|x| !x.is_negative()));
        assert_eq!(s.u.determinant().abs(), BigInt::from(1));
        assert_eq!(s.v.determinant().abs(), BigInt::from(1));
        assert_eq!(&s.u * &s.u_inv, M::identity(a.rows()));
        assert_eq!(&s.v * &s.v_inv, M::identity(a.cols()));
    }

    #[test]
    fn snf_two_by_two() {
        // |det| = 8 and gcd of entries 2 force (2, 4)
        let a = M::from_i64_rows(2, &[&[2, 4], &[6, 8]]);
        assert_eq!(a.invariant_factors(), big(&[2, 4]));
        check_snf(&a);
    }

    #[test]
    fn snf_degenerate_shapes() {
        assert!(M::zeros(0, 0).smith_normal_form().d.is_empty());
        assert_eq!(M::identity(3).invariant_factors(), big(&[1, 1, 1]));
        check_snf(&M::zeros(0, 3));
        check_snf(&M::zeros(2, 0));
        check_snf(&M::zeros(2, 2));
    }

    #[test]
    fn snf_works_for_machine_integers() {
        let a = Matrix::<i64>::from_i64_rows(3, &[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(a.invariant_factors(), vec![2, 6, 12]);
    }

    #[test]
    fn solve_examples() {
        let a = M::from_i64_rows(1, &[&[2]]);
        assert_eq!(a.solve_integer(&big(&[4])).unwrap(), Solution::Solved(big(&[2])));
        match a.solve_integer(&big(&[3])).unwrap() {
            Solution::Unsolvable(obs) => {
                assert!(obs.certifies(&a, &big(&[3])));
                assert_eq!(obs.modulus, BigInt::from(2));
            }
            s => panic!("expected obstruction, got {s:?}"),
        }
        // back-substitution: 2 x2 = 4, x1 + x2 = 3
        let a = M::from_i64_rows(2, &[&[1, 1], &[0, 2]]);
        assert_eq!(a.solve_integer(&big(&[3, 4])).unwrap(), Solution::Solved(big(&[1, 2])));
        assert!(matches!(a.solve_integer(&big(&[1])), Err(ZmatError::DimensionMismatch { .. })));
    }

    #[test]
    fn kernel_and_image_examples() {
        let (k, im) = M::from_i64_rows(1, &[&[2]]).kernel_and_image();
        assert_eq!(k.cols(), 0);
        assert_eq!(im.column(0), big(&[2]));

        let (k, im) = M::zeros(2, 2).kernel_and_image();
        assert_eq!((k.cols(), im.cols()), (2, 0));

        let (k, im) = M::from_i64_rows(2, &[&[1, 2], &[2, 4]]).kernel_and_image();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), big(&[2, -1]));
        assert_eq!(im.cols(), 1);
    }

    #[test]
    fn determinant_small() {
        let a = M::from_i64_rows(3, &[&[0, 2, 1], &[1, 0, 3], &[4, 1, 0]]);
        // cofactor expansion along the first row
        assert_eq!(a.determinant(), BigInt::from(25));
    }

    fn small_matrix() -> impl Strategy<Value = M> {
        (0usize..=6, 0usize..=6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-5i64..=5, r * c)
                .prop_map(move |v| M::from_vec(r, c, v.into_iter().map(BigInt::from).collect()))
        })
    }

    proptest! {
        #[test]
        fn snf_properties(a in small_matrix()) {
            check_snf(&a);
        }

        #[test]
        fn solve_is_exact_or_certified(a in small_matrix(), seed in proptest::collection::vec(-4i64..=4, 6)) {
            // half the right-hand sides are in the image by construction
            let x: Vec<BigInt> = (0..a.cols()).map(|i| BigInt::from(seed[i % seed.len()])).collect();
            let in_image = a.mul_vec(&x);
            match a.solve_integer(&in_image).unwrap() {
                Solution::Solved(y) => prop_assert_eq!(a.mul_vec(&y), in_image),
                Solution::Unsolvable(_) => prop_assert!(false, "image vector reported unsolvable"),
            }
            let b: Vec<BigInt> = (0..a.rows()).map(|i| BigInt::from(seed[(i + 1) % seed.len()])).collect();
            match a.solve_integer(&b).unwrap() {
                Solution::Solved(y) => prop_assert_eq!(a.mul_vec(&y), b),
                Solution::Unsolvable(obs) => prop_assert!(obs.certifies(&a, &b)),
            }
        }

        #[test]
        fn kernel_is_saturated(a in small_matrix()) {
            let (k, _) = a.kernel_and_image();
            for c in 0..k.cols() {
                prop_assert!(a.mul_vec(&k.column(c)).iter().all(|v| v.is_zero()));
            }
            // saturated: the kernel basis extends to a unimodular matrix,
            // equivalently its nonzero invariant factors are all 1
            prop_assert!(k.invariant_factors().iter().all(|d| d.is_one()));
            prop_assert_eq!(k.cols(), a.cols() - a.rank());
        }
    }
}
