use std::fmt;

use super::{CRat, Field, RatFun};
use crate::error::{Error, Result};

/// Dense rectangular matrix over a [`Field`]. Dimensions are fixed at construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Matrix of rational functions in x.
pub type MatRF = Mat<RatFun>;
/// Constant complex-rational matrix.
pub type MatC = Mat<CRat>;

impl<T: Field> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds from row vectors; errors on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::NonRectangular);
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diag(entries: Vec<T>) -> Self {
        let n = entries.len();
        let mut m = Mat::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    /// Matrix unit E_ij of size n.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        m.data[i * n + j] = T::one();
        m
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn row_mat(&self, i: usize) -> Mat<T> {
        Mat {
            rows: 1,
            cols: self.cols,
            data: self.row(i),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn map<U: Field>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    fn check_same(&self, o: &Self, op: &'static str) -> Result<()> {
        if self.shape() != o.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: o.shape(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_same(o, "add")?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o, "sub")?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect(),
        })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: o.shape(),
            });
        }
        let mut out: Mat<T> = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        Ok(out)
    }

    /// Panicking add for internally shape-checked code.
    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("shape mismatch in add")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("shape mismatch in sub")
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("shape mismatch in mul")
    }

    pub fn neg(&self) -> Self {
        self.map(Field::negate)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.times(c))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc.plus(self.get(i, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Mat<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| m.get(i, c).weight())
            else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).minus(&f.times(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Determinant by elimination. Errors if not square.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch {
                op: "det",
                left: self.shape(),
                right: self.shape(),
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| m.get(i, c).weight())
            else {
                return Ok(T::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.negate();
            }
            let piv = m.get(c, c).clone();
            det = det.times(&piv);
            let inv = piv.recip().expect("nonzero pivot");
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).times(&inv);
                for j in c..n {
                    let v = m.get(i, j).minus(&f.times(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse; errors when the matrix is singular or not square.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch {
                op: "inverse",
                left: self.shape(),
                right: self.shape(),
            });
        }
        let n = self.rows;
        let aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::Singular("determinant is identically zero".into()));
        }
        Ok(Mat::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Solves `self · X = rhs`; `None` if inconsistent. Free variables are set to zero.
    pub fn solve(&self, rhs: &Mat<T>) -> Result<Option<Mat<T>>> {
        if rhs.rows != self.rows {
            return Err(Error::ShapeMismatch {
                op: "solve",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let (n, k) = (self.cols, rhs.cols);
        let aug = Mat::from_fn(self.rows, n + k, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - n).clone()
            }
        });
        let (r, piv) = aug.rref();
        if piv.iter().any(|&c| c >= n) {
            return Ok(None);
        }
        let mut x = Mat::zeros(n, k);
        for (row, &c) in piv.iter().enumerate() {
            for j in 0..k {
                x.set(c, j, r.get(row, n + j).clone());
            }
        }
        Ok(Some(x))
    }

    /// Basis of the right nullspace `{v : self · v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &pc) in piv.iter().enumerate() {
                    v[pc] = r.get(row, f).negate();
                }
                v
            })
            .collect()
    }

    /// Leading principal minors (sizes 1..=n).
    pub fn leading_minors(&self) -> Result<Vec<T>> {
        (1..=self.rows.min(self.cols))
            .map(|k| Mat::from_fn(k, k, |i, j| self.get(i, j).clone()).det())
            .collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }

    /// Writes the matrix as `[[a,b],[c,d]]` using `fmt` for the entries.
    pub fn fmt_with(&self, f: impl Fn(&T) -> String) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let es: Vec<String> = (0..self.cols).map(|j| f(self.get(i, j))).collect();
                format!("[{}]", es.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

impl MatRF {
    pub fn derivative(&self) -> MatRF {
        self.map(RatFun::derivative)
    }

    pub fn nth_derivative(&self, k: usize) -> MatRF {
        self.map(|e| e.nth_derivative(k))
    }

    /// Lifts a constant matrix.
    pub fn from_const(m: &MatC) -> MatRF {
        m.map(|c| RatFun::constant(c.clone()))
    }

    /// Entrywise evaluation; `None` if some entry has a pole at `at`.
    pub fn eval(&self, at: &CRat) -> Option<MatC> {
        let data: Option<Vec<CRat>> = self.data.iter().map(|e| e.eval(at)).collect();
        Some(Mat {
            rows: self.rows,
            cols: self.cols,
            data: data?,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.data.iter().all(RatFun::is_polynomial)
    }

    /// Maximum entry degree for a polynomial matrix (`None` when zero or not polynomial).
    pub fn poly_degree(&self) -> Option<usize> {
        if !self.is_polynomial() {
            return None;
        }
        self.data.iter().filter_map(RatFun::poly_degree).max()
    }

    /// Coefficient matrix of `x^k` for a polynomial matrix.
    pub fn coeff_matrix(&self, k: usize) -> MatC {
        self.map(|e| e.num().coeff(k))
    }

    /// Builds a polynomial matrix from coefficient matrices `Σ_k C_k x^k`.
    pub fn from_coeff_matrices(cs: &[MatC]) -> MatRF {
        let (r, c) = cs.first().map_or((0, 0), Mat::shape);
        MatRF::from_fn(r, c, |i, j| {
            RatFun::from_poly(super::Poly::new(cs.iter().map(|m| m.get(i, j).clone()).collect()))
        })
    }
}

impl<T: Field> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(|e| format!("{e:?}")))
    }
}

impl fmt::Display for MatRF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(|e| e.fmt_in("x")))
    }
}

impl fmt::Display for MatC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(CRat::to_string))
    }
}

/// Inverse of a rational-function matrix.
pub fn mat_inv(m: &MatRF) -> Result<MatRF> {
    m.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Poly;

    fn x() -> RatFun {
        RatFun::x()
    }

    #[test]
    fn unipotent_inverse() {
        let m = MatRF::from_rows(vec![vec![RatFun::one(), x()], vec![RatFun::zero(), RatFun::one()]]).unwrap();
        let inv = mat_inv(&m).unwrap();
        let expect = MatRF::from_rows(vec![vec![RatFun::one(), -x()], vec![RatFun::zero(), RatFun::one()]]).unwrap();
        assert_eq!(inv, expect);
        assert_eq!(mat_inv(&MatRF::identity(3)).unwrap(), MatRF::identity(3));
    }

    #[test]
    fn scalar_matrix_inverse() {
        let m = MatRF::diag(vec![x(), x()]);
        let inv_x = RatFun::one().checked_div(&x()).unwrap();
        assert_eq!(mat_inv(&m).unwrap(), MatRF::diag(vec![inv_x.clone(), inv_x]));
    }

    #[test]
    fn singular_is_an_error() {
        let m = MatRF::from_rows(vec![vec![x(), x()], vec![RatFun::one(), RatFun::one()]]).unwrap();
        assert!(matches!(mat_inv(&m), Err(Error::Singular(_))));
        assert!(m.det().unwrap().is_zero());
    }

    #[test]
    fn ragged_rows_rejected() {
        let r = MatC::from_rows(vec![vec![CRat::one()], vec![CRat::one(), CRat::one()]]);
        assert!(matches!(r, Err(Error::NonRectangular)));
    }

    #[test]
    fn nullspace_and_solve() {
        let m = MatC::from_rows(vec![
            vec![CRat::from_int(1), CRat::from_int(2), CRat::from_int(3)],
            vec![CRat::from_int(2), CRat::from_int(4), CRat::from_int(6)],
        ])
        .unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let col = MatC::from_fn(3, 1, |i, _| v[i].clone());
            assert!(m.mul(&col).is_zero());
        }
        let rhs = MatC::from_fn(2, 1, |i, _| CRat::from_int(2 * i as i64 + 1));
        assert!(m.solve(&rhs).unwrap().is_none());
    }

    #[test]
    fn coefficient_matrices_round_trip() {
        let m = MatRF::from_rows(vec![vec![RatFun::from_poly(Poly::from_ints(&[1, 0, 3])), x()]]).unwrap();
        let cs: Vec<MatC> = (0..3).map(|k| m.coeff_matrix(k)).collect();
        assert_eq!(MatRF::from_coeff_matrices(&cs), m);
    }
}
