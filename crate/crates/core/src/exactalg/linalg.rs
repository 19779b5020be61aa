//! Dense matrices and exact linear systems over ℚ and ℚ(vars).

use std::fmt::Debug;

use num_traits::{One, Zero};

use super::poly::Q;
use super::ratfunc::RationalFunction;

/// Exact field operations needed by elimination.
pub trait Field: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Panics on zero.
    fn inv(&self) -> Self;
    /// Pivot preference; smaller is better.
    fn size(&self) -> usize {
        0
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn size(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Field for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.add_rf(other)
    }
    fn sub(&self, other: &Self) -> Self {
        self.sub_rf(other)
    }
    fn mul(&self, other: &Self) -> Self {
        self.mul_rf(other)
    }
    fn neg(&self) -> Self {
        RationalFunction::neg(self)
    }
    fn inv(&self) -> Self {
        RationalFunction::inv(self).expect("inverse of zero")
    }
    fn size(&self) -> usize {
        self.num().len() + self.den().len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    /// Matrix unit `E_{ij}` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, F::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &F> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Inverse by Gauss–Jordan; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .filter(|&r| !a.get(r, col).is_zero())
                .min_by_key(|&r| a.get(r, col).size())?;
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a.get(col, col).inv();
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let f = a.get(r, col).clone();
                    a.axpy_row(r, col, &f);
                    inv.axpy_row(r, col, &f);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &F) {
        for j in 0..self.cols {
            let v = self.get(r, j).mul(c);
            self.set(r, j, v);
        }
    }

    /// `row[r] -= f · row[src]`.
    fn axpy_row(&mut self, r: usize, src: usize, f: &F) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(r, j).sub(&f.mul(s));
            self.set(r, j, v);
        }
    }
}

/// Solution set of `M·s = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionSet<F> {
    Inconsistent,
    Solutions { particular: Vec<F>, nullspace: Vec<Vec<F>> },
}

impl<F> SolutionSet<F> {
    pub fn is_inconsistent(&self) -> bool {
        matches!(self, SolutionSet::Inconsistent)
    }
}

/// Gauss–Jordan elimination to reduced row echelon form.
pub fn linear_solve<F: Field>(m: &Matrix<F>, rhs: &[F]) -> SolutionSet<F> {
    assert_eq!(m.rows(), rhs.len(), "rhs length");
    let n = m.cols();
    let mut a = Matrix::from_fn(m.rows(), n + 1, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else {
            rhs[i].clone()
        }
    });
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == a.rows() {
            break;
        }
        let piv = (row..a.rows())
            .filter(|&r| !a.get(r, col).is_zero())
            .min_by_key(|&r| a.get(r, col).size());
        let Some(piv) = piv else { continue };
        a.swap_rows(row, piv);
        let p = a.get(row, col).inv();
        a.scale_row(row, &p);
        for r in 0..a.rows() {
            if r != row && !a.get(r, col).is_zero() {
                let f = a.get(r, col).clone();
                a.axpy_row(r, row, &f);
            }
        }
        pivots.push(col);
        row += 1;
    }
    for r in row..a.rows() {
        if !a.get(r, n).is_zero() {
            return SolutionSet::Inconsistent;
        }
    }
    let mut particular = vec![F::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = a.get(r, n).clone();
    }
    let mut nullspace = Vec::new();
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    for free in 0..n {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![F::zero(); n];
        v[free] = F::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = a.get(r, free).neg();
        }
        nullspace.push(v);
    }
    SolutionSet::Solutions {
        particular,
        nullspace,
    }
}

pub fn nullspace<F: Field>(m: &Matrix<F>) -> Vec<Vec<F>> {
    let zero = vec![F::zero(); m.rows()];
    match linear_solve(m, &zero) {
        SolutionSet::Solutions { nullspace, .. } => nullspace,
        SolutionSet::Inconsistent => unreachable!("homogeneous systems are consistent"),
    }
}
