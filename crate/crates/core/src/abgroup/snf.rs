//! Dense integer matrices and Smith normal form with unimodular transforms.

use std::fmt;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::arith::Integer;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Integer>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Integer::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Integer::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows<T: Into<Integer> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has the wrong length");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Integer] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Integer> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Integer>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Keeps the first `n` rows.
    pub fn top_rows(&self, n: usize) -> IntMatrix {
        let mut out = Self::zeros(n, self.cols);
        out.data.clone_from_slice(&self.data[..n * self.cols]);
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Integer {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Integer::one();
        }
        let mut a = self.clone();
        let mut sign = Integer::one();
        let mut prev = Integer::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Integer::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Integer;

    fn index(&self, (i, j): (usize, usize)) -> &Integer {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Integer {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// `left · input · right = diagonal`, with `left_inverse · left = I`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: IntMatrix,
    pub left: IntMatrix,
    pub left_inverse: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_1 | d_2 | …`, zeros included, `min(rows, cols)`
    /// of them.
    pub fn invariant_factors(&self) -> Vec<Integer> {
        let n = self.diagonal.rows().min(self.diagonal.cols());
        (0..n).map(|i| self.diagonal[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().iter().filter(|d| !d.is_zero()).count()
    }

    /// Columns of `right` spanning the integer kernel of the input.
    pub fn kernel_basis(&self) -> IntMatrix {
        let r = self.rank();
        let cols: Vec<usize> = (r..self.right.cols()).collect();
        self.right.select_columns(&cols)
    }
}

/// Arithmetic needed by the elimination; `None` signals overflow.
trait Entry: Clone + Sized {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn below_zero(&self) -> bool;
    fn less_in_magnitude(&self, other: &Self) -> bool;
    fn floor_div(&self, other: &Self) -> Self;
    fn divides(&self, other: &Self) -> bool;
    /// `self + k·x`
    fn add_mul(&self, k: &Self, x: &Self) -> Option<Self>;
    fn negated(&self) -> Option<Self>;
}

impl Entry for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn below_zero(&self) -> bool {
        *self < 0
    }
    fn less_in_magnitude(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn floor_div(&self, other: &Self) -> Self {
        num_integer::Integer::div_floor(self, other)
    }
    fn divides(&self, other: &Self) -> bool {
        other % self == 0
    }
    fn add_mul(&self, k: &Self, x: &Self) -> Option<Self> {
        k.checked_mul(*x).and_then(|p| self.checked_add(p))
    }
    fn negated(&self) -> Option<Self> {
        self.checked_neg()
    }
}

impl Entry for Integer {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn below_zero(&self) -> bool {
        Signed::is_negative(self)
    }
    fn less_in_magnitude(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn floor_div(&self, other: &Self) -> Self {
        num_integer::Integer::div_floor(self, other)
    }
    fn divides(&self, other: &Self) -> bool {
        other.is_multiple_of(self)
    }
    fn add_mul(&self, k: &Self, x: &Self) -> Option<Self> {
        Some(self + k * x)
    }
    fn negated(&self) -> Option<Self> {
        Some(-self)
    }
}

/// Row-major scratch matrix for the elimination.
#[derive(Clone)]
struct Dense<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Entry> Dense<E> {
    fn identity(n: usize) -> Self {
        let mut data = vec![E::nil(); n * n];
        for i in 0..n {
            data[i * n + i] = E::unit();
        }
        Dense { rows: n, cols: n, data }
    }

    fn at(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k · row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &E) -> Option<()> {
        for j in 0..self.cols {
            let x = &self.data[src * self.cols + j];
            if !x.is_nil() {
                let v = self.data[dst * self.cols + j].add_mul(k, x)?;
                self.data[dst * self.cols + j] = v;
            }
        }
        Some(())
    }

    /// col[dst] += k · col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &E) -> Option<()> {
        for i in 0..self.rows {
            let x = &self.data[i * self.cols + src];
            if !x.is_nil() {
                let v = self.data[i * self.cols + dst].add_mul(k, x)?;
                self.data[i * self.cols + dst] = v;
            }
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for j in 0..self.cols {
            self.data[i * self.cols + j] = self.data[i * self.cols + j].negated()?;
        }
        Some(())
    }

    fn negate_col(&mut self, j: usize) -> Option<()> {
        for i in 0..self.rows {
            self.data[i * self.cols + j] = self.data[i * self.cols + j].negated()?;
        }
        Some(())
    }

    /// Smallest nonzero |entry| in the block from `(t, t)`, ties to the
    /// lowest `(row, col)`.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = self.at(i, j);
                if x.is_nil() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if !x.less_in_magnitude(self.at(bi, bj)) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

struct Transforms<E> {
    d: Dense<E>,
    u: Dense<E>,
    u_inv: Dense<E>,
    v: Dense<E>,
}

fn eliminate<E: Entry>(d: Dense<E>) -> Option<Transforms<E>> {
    let (rows, cols) = (d.rows, d.cols);
    let mut x = Transforms {
        u: Dense::identity(rows),
        u_inv: Dense::identity(rows),
        v: Dense::identity(cols),
        d,
    };

    for t in 0..rows.min(cols) {
        let Some(mut p) = x.d.pivot(t) else { break };
        loop {
            x.d.swap_rows(t, p.0);
            x.u.swap_rows(t, p.0);
            x.u_inv.swap_cols(t, p.0);
            x.d.swap_cols(t, p.1);
            x.v.swap_cols(t, p.1);

            let piv = x.d.at(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if x.d.at(i, t).is_nil() {
                    continue;
                }
                let q = x.d.at(i, t).floor_div(&piv);
                let neg_q = q.negated()?;
                x.d.add_row(i, t, &neg_q)?;
                x.u.add_row(i, t, &neg_q)?;
                x.u_inv.add_col(t, i, &q)?;
                clean &= x.d.at(i, t).is_nil();
            }
            for j in t + 1..cols {
                if x.d.at(t, j).is_nil() {
                    continue;
                }
                let neg_q = x.d.at(t, j).floor_div(&piv).negated()?;
                x.d.add_col(j, t, &neg_q)?;
                x.v.add_col(j, t, &neg_q)?;
                clean &= x.d.at(t, j).is_nil();
            }
            if clean {
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !piv.divides(x.d.at(i, j))));
                match bad {
                    None => break,
                    Some(i) => {
                        let one = E::unit();
                        x.d.add_row(t, i, &one)?;
                        x.u.add_row(t, i, &one)?;
                        x.u_inv.add_col(i, t, &one.negated()?)?;
                    }
                }
            }
            p = x.d.pivot(t).expect("block still has the pivot row");
        }
        if x.d.at(t, t).below_zero() {
            x.d.negate_row(t)?;
            x.u.negate_row(t)?;
            x.u_inv.negate_col(t)?;
        }
    }
    Some(x)
}

fn to_int(m: Dense<impl Into<Integer>>) -> IntMatrix {
    IntMatrix {
        rows: m.rows,
        cols: m.cols,
        data: m.data.into_iter().map(Into::into).collect(),
    }
}

/// Smith normal form with its unimodular transforms.
///
/// Entries that fit in `i64` are eliminated with checked machine arithmetic;
/// on overflow the computation restarts over big integers. Both paths run
/// the same pivoting rule, so the result does not depend on which one
/// finished.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let small: Option<Vec<i64>> = m.data.iter().map(|x| i64::try_from(x).ok()).collect();
    if let Some(data) = small {
        if let Some(x) = eliminate(Dense {
            rows: m.rows,
            cols: m.cols,
            data,
        }) {
            return SmithForm {
                diagonal: to_int(x.d),
                left: to_int(x.u),
                left_inverse: to_int(x.u_inv),
                right: to_int(x.v),
            };
        }
    }
    smith_normal_form_big(m)
}

fn smith_normal_form_big(m: &IntMatrix) -> SmithForm {
    let x = eliminate(Dense {
        rows: m.rows,
        cols: m.cols,
        data: m.data.clone(),
    })
    .expect("big integers do not overflow");
    SmithForm {
        diagonal: to_int(x.d),
        left: to_int(x.u),
        left_inverse: to_int(x.u_inv),
        right: to_int(x.v),
    }
}

/// Integer kernel of `m` as the columns of the returned matrix.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    smith_normal_form(m).kernel_basis()
}
