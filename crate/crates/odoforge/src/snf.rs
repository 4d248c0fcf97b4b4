//! Exact integer matrices, Hermite forms for lattices, and Smith normal form.
//!
//! Everything is carried out over `BigInt` with plain row/column reduction;
//! the pivot is always a minimal nonzero absolute value, which keeps entry
//! growth tame at the sizes this crate works with.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut m = Self::zero(nrows, cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, x) in r.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            cols,
        )
    }

    pub fn mul(&self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = IntegerMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = &self[(i, k)] * &rhs[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn column_sum(&self, j: usize) -> BigInt {
        (0..self.rows).map(|i| self[(i, j)].clone()).sum()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = q * &self[(b, j)];
            self[(a, j)] += add;
        }
    }

    /// col[a] += q * col[b]
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = q * &self[(i, b)];
            self[(i, a)] += add;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self[(a, j)].clone();
            self[(a, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal entries d_1 | d_2 | ..., nonnegative, zeros trailing.
    pub diag: Vec<BigInt>,
    /// Unimodular column transform: `snf = P * A * Q` for some unimodular P.
    pub q: IntegerMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

/// Smith normal form by exact row/column reduction, pivot chosen as the
/// minimal nonzero absolute value of the remaining submatrix.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let mut m = a.clone();
    let mut q = IntegerMatrix::identity(a.cols);
    let steps = a.rows.min(a.cols);
    for k in 0..steps {
        loop {
            // locate minimal |entry| != 0 in the trailing submatrix
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..m.rows {
                for j in k..m.cols {
                    if m[(i, j)].is_zero() {
                        continue;
                    }
                    match pivot {
                        None => pivot = Some((i, j)),
                        Some((pi, pj)) => {
                            if m[(i, j)].abs() < m[(pi, pj)].abs() {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            m.swap_rows(k, pi);
            m.swap_cols(k, pj);
            q.swap_cols(k, pj);
            if m[(k, k)].is_negative() {
                m.negate_row(k);
            }
            // clear column k below and row k to the right
            let mut dirty = false;
            for i in k + 1..m.rows {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let quo = div_round(&m[(i, k)], &m[(k, k)]);
                if !quo.is_zero() {
                    m.add_row(i, k, &-&quo);
                }
                if !m[(i, k)].is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..m.cols {
                if m[(k, j)].is_zero() {
                    continue;
                }
                let quo = div_round(&m[(k, j)], &m[(k, k)]);
                if !quo.is_zero() {
                    m.add_col(j, k, &-&quo);
                    q.add_col(j, k, &-&quo);
                }
                if !m[(k, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility sweep: d_k must divide every deeper entry
            let mut fixed = true;
            'scan: for i in k + 1..m.rows {
                for j in k + 1..m.cols {
                    if (&m[(i, j)] % &m[(k, k)]).is_zero() {
                        continue;
                    }
                    let one = BigInt::from(1);
                    m.add_row(k, i, &one);
                    fixed = false;
                    break 'scan;
                }
            }
            if fixed {
                break;
            }
        }
    }
    let mut diag = Vec::with_capacity(steps);
    let mut rank = 0;
    for k in 0..steps {
        let d = m[(k, k)].abs();
        if !d.is_zero() {
            rank += 1;
        }
        diag.push(d);
    }
    SmithForm { diag, q, rank }
}

/// rounded division: quotient minimizing |a - q b|
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num_integer_div_rem(a, b);
    if &r * &two >= b.abs() {
        if b.is_negative() { q - 1 } else { q + 1 }
    } else {
        q
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    // euclidean: remainder in [0, |b|)
    let q = a / b;
    let r = a - &q * b;
    if r.is_negative() {
        if b.is_negative() {
            (q + 1, r - b)
        } else {
            (q - 1, r + b)
        }
    } else {
        (q, r)
    }
}

/// Row Hermite form of the lattice spanned by the given vectors: upper
/// echelon rows with positive pivots, off-pivot entries reduced. Returns the
/// independent rows; fewer rows than `cols` means the lattice is not full
/// rank.
pub fn hermite_rows(vectors: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..cols {
        loop {
            // minimal |entry| at this column among pending rows
            let mut best: Option<usize> = None;
            for (i, r) in rows.iter().enumerate() {
                if r[col].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if r[col].abs() < rows[b][col].abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            let pivot_row = rows.swap_remove(b);
            let mut survivors = Vec::new();
            let mut done = true;
            for mut r in rows {
                if !r[col].is_zero() {
                    let q = num_integer_div_rem(&r[col], &pivot_row[col]).0;
                    for (x, p) in r.iter_mut().zip(&pivot_row) {
                        *x -= &q * p;
                    }
                    if !r[col].is_zero() {
                        done = false;
                    }
                }
                if r.iter().any(|x| !x.is_zero()) {
                    survivors.push(r);
                }
            }
            rows = survivors;
            rows.push(pivot_row);
            if done {
                // unique row with nonzero entry at `col`: move to basis
                let idx = rows.iter().position(|r| !r[col].is_zero()).unwrap();
                let mut p = rows.remove(idx);
                if p[col].is_negative() {
                    for x in p.iter_mut() {
                        *x = -x.clone();
                    }
                }
                basis.push(p);
                break;
            }
        }
    }
    // normalize entries above each pivot
    for i in (0..basis.len()).rev() {
        let pivot_col = basis[i].iter().position(|x| !x.is_zero()).unwrap();
        for j in 0..i {
            let q = num_integer_div_rem(&basis[j][pivot_col], &basis[i][pivot_col]).0;
            if !q.is_zero() {
                let lower = basis[i].clone();
                for (x, p) in basis[j].iter_mut().zip(&lower) {
                    *x -= &q * p;
                }
            }
        }
    }
    basis
}

/// Canonical representative of `v` modulo the full-rank Hermite basis:
/// each reduced coordinate lies in `[0, pivot)`.
pub fn reduce_mod_lattice(basis: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    let mut out = v.to_vec();
    for (i, row) in basis.iter().enumerate() {
        let q = num_integer_div_rem(&out[i], &row[i]).0;
        if !q.is_zero() {
            for (x, p) in out.iter_mut().zip(row) {
                *x -= &q * p;
            }
        }
    }
    out
}
