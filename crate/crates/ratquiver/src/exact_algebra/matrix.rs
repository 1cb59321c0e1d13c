use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Galois, QuadElement, QuadField, Q};
use super::AlgebraError;

/// Dense row-major matrix over a quadratic field.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadMatrix {
    rows: usize,
    cols: usize,
    field: QuadField,
    entries: Vec<QuadElement>,
}

/// Coordinate vector.
pub type QuadVector = Vec<QuadElement>;

impl QuadMatrix {
    pub fn new(field: &QuadField, rows: usize, cols: usize, entries: Vec<QuadElement>) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| x.field() != *field) {
            return Err(AlgebraError::FieldMismatch(format!("{:?} vs {:?}", bad.field(), field)));
        }
        Ok(QuadMatrix { rows, cols, field: field.clone(), entries })
    }

    pub fn zeros(field: &QuadField, rows: usize, cols: usize) -> Self {
        QuadMatrix { rows, cols, field: field.clone(), entries: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &QuadField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = field.one();
        }
        m
    }

    pub fn scalar(field: &QuadField, n: usize, x: &QuadElement) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = x.clone();
        }
        m
    }

    pub fn from_fn(field: &QuadField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> QuadElement) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        QuadMatrix { rows, cols, field: field.clone(), entries }
    }

    pub fn from_rows(field: &QuadField, rows: Vec<Vec<QuadElement>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(AlgebraError::Dimension("ragged rows".into()));
        }
        Self::new(field, r, c, rows.into_iter().flatten().collect())
    }

    /// Integer matrix, convenient for fixtures and tests.
    pub fn from_ints(field: &QuadField, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(field, r, c, |i, j| field.int(rows[i][j]))
    }

    pub fn from_columns(field: &QuadField, rows: usize, columns: &[QuadVector]) -> Self {
        Self::from_fn(field, rows, columns.len(), |i, j| columns[j][i].clone())
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

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn entries(&self) -> &[QuadElement] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &QuadElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: QuadElement) {
        assert!(x.field() == self.field, "mixed quadratic fields");
        self.entries[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> QuadVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<QuadVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    /// True when every entry lies in Q.
    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(|x| x.is_rational())
    }

    pub fn map(&self, f: impl Fn(&QuadElement) -> QuadElement) -> Self {
        QuadMatrix { rows: self.rows, cols: self.cols, field: self.field.clone(), entries: self.entries.iter().map(f).collect() }
    }

    /// Entrywise Galois conjugate.
    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn galois(&self, sigma: Galois) -> Self {
        match sigma {
            Galois::Id => self.clone(),
            Galois::Conj => self.conj(),
        }
    }

    pub fn scale(&self, s: &QuadElement) -> Self {
        self.map(|x| x * s)
    }

    pub fn scale_q(&self, s: &Q) -> Self {
        self.map(|x| x.scale(s))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> QuadElement {
        let mut t = self.field.zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn mul_vec(&self, v: &[QuadElement]) -> QuadVector {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(&self.field, self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(&self.field, r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn hstack(&self, other: &QuadMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &QuadMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(&self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn block_diag(field: &QuadField, blocks: &[QuadMatrix]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(field, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (QuadMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else { continue };
            if p != row {
                for j in 0..m.cols {
                    m.entries.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m.get(row, col).inv().expect("nonzero pivot");
            for j in col..m.cols {
                let x = m.get(row, j) * &inv;
                m.entries[row * m.cols + j] = x;
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in col..m.cols {
                    let sub = &f * m.get(row, j);
                    if !sub.is_zero() {
                        m.entries[i * m.cols + j] -= &sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel {v : m v = 0}.
    pub fn kernel_basis(&self) -> Vec<QuadVector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<QuadMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&Self::identity(&self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0, n, n, 2 * n))
    }

    /// Solves self * X = rhs exactly, returning one solution if any exists.
    pub fn solve_right(&self, rhs: &QuadMatrix) -> Option<QuadMatrix> {
        assert_eq!(self.rows, rhs.rows);
        let aug = self.hstack(rhs);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(&self.field, self.cols, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, r.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Smallest e with m^e = 0, if m is nilpotent. The zero matrix (including 0x0) gives 1.
    pub fn nilpotency_exponent(&self) -> Option<usize> {
        assert!(self.is_square(), "nilpotency of a non-square matrix");
        let n = self.rows;
        let mut p = self.clone();
        for e in 1..=n.max(1) {
            if p.is_zero() {
                return Some(e);
            }
            p = &p * self;
        }
        None
    }

    pub fn to_rows(&self) -> Vec<Vec<QuadElement>> {
        (0..self.rows).map(|i| self.entries[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }
}

impl fmt::Debug for QuadMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

impl fmt::Display for QuadMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Mul<&'a QuadMatrix> for &'a QuadMatrix {
    type Output = QuadMatrix;
    fn mul(self, rhs: &QuadMatrix) -> QuadMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        assert!(self.field == rhs.field, "mixed quadratic fields");
        let mut out = QuadMatrix::zeros(&self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a QuadMatrix> for &'a QuadMatrix {
    type Output = QuadMatrix;
    fn add(self, rhs: &QuadMatrix) -> QuadMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimension mismatch");
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        QuadMatrix { rows: self.rows, cols: self.cols, field: self.field.clone(), entries }
    }
}

impl<'a> Sub<&'a QuadMatrix> for &'a QuadMatrix {
    type Output = QuadMatrix;
    fn sub(self, rhs: &QuadMatrix) -> QuadMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimension mismatch");
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        QuadMatrix { rows: self.rows, cols: self.cols, field: self.field.clone(), entries }
    }
}

impl Neg for &QuadMatrix {
    type Output = QuadMatrix;
    fn neg(self) -> QuadMatrix {
        self.map(|x| -x)
    }
}
