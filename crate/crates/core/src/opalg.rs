//! Right-acting matrix differential operators `Σ_j ∂^j A_j(x)`.
//!
//! The normal form keeps powers of ∂ on the left and coefficients on the
//! right. Products are renormalized with `A ∂ = ∂ A + A'`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::{CRat, Field, MatRF, RatFun};
use crate::error::{Error, Result};

/// Binomial coefficient as an exact scalar.
pub fn binom(n: usize, k: usize) -> CRat {
    if k > n {
        return CRat::zero();
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    CRat::real(BigRational::from_integer(acc))
}

/// Falling factorial n(n−1)⋯(n−j+1) as a polynomial in `n`, represented as a [`RatFun`].
pub fn falling_factorial(j: usize) -> RatFun {
    (0..j).fold(RatFun::one(), |acc, i| {
        acc * (RatFun::x() - RatFun::from_int(i as i64))
    })
}

/// A (possibly rectangular) matrix differential operator in normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiffOp {
    rows: usize,
    cols: usize,
    terms: Vec<MatRF>,
}

/// Failure witness for the degree-filtration test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationWitness {
    pub order: usize,
    pub row: usize,
    pub col: usize,
    /// Polynomial degree, or `None` when the entry is not a polynomial.
    pub degree: Option<usize>,
}

impl DiffOp {
    pub fn zero(rows: usize, cols: usize) -> Self {
        DiffOp {
            rows,
            cols,
            terms: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        DiffOp::from_coeff(MatRF::identity(n))
    }

    /// Order-zero operator with the given coefficient.
    pub fn from_coeff(a: MatRF) -> Self {
        DiffOp::from_terms(a.rows(), a.cols(), vec![a])
    }

    /// Scalar function times the identity.
    pub fn scalar(c: RatFun, n: usize) -> Self {
        DiffOp::from_coeff(MatRF::identity(n).scale(&c))
    }

    /// `∂ I`.
    pub fn dx(n: usize) -> Self {
        DiffOp::monomial(1, MatRF::identity(n))
    }

    /// `∂^j A`.
    pub fn monomial(j: usize, a: MatRF) -> Self {
        let (r, c) = a.shape();
        let mut terms = vec![MatRF::zeros(r, c); j];
        terms.push(a);
        DiffOp::from_terms(r, c, terms)
    }

    /// Builds `Σ_j ∂^j terms[j]`. All terms must have shape `rows × cols`.
    pub fn from_terms(rows: usize, cols: usize, mut terms: Vec<MatRF>) -> Self {
        debug_assert!(terms.iter().all(|t| t.shape() == (rows, cols)));
        while terms.last().is_some_and(MatRF::is_zero) {
            terms.pop();
        }
        DiffOp { rows, cols, terms }
    }

    pub fn try_from_terms(terms: Vec<MatRF>) -> Result<Self> {
        let (r, c) = terms.first().map(MatRF::shape).ok_or(Error::NoSolution("empty operator".into()))?;
        if let Some(t) = terms.iter().find(|t| t.shape() != (r, c)) {
            return Err(Error::ShapeMismatch {
                op: "operator terms",
                left: (r, c),
                right: t.shape(),
            });
        }
        Ok(DiffOp::from_terms(r, c, terms))
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

    /// Order of the operator; `None` for zero.
    pub fn order(&self) -> Option<usize> {
        self.terms.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[MatRF] {
        &self.terms
    }

    /// Coefficient `A_j` (zero beyond the order).
    pub fn coeff(&self, j: usize) -> MatRF {
        self.terms
            .get(j)
            .cloned()
            .unwrap_or_else(|| MatRF::zeros(self.rows, self.cols))
    }

    /// Leading coefficient; zero matrix for the zero operator.
    pub fn lead(&self) -> MatRF {
        self.terms
            .last()
            .cloned()
            .unwrap_or_else(|| MatRF::zeros(self.rows, self.cols))
    }

    /// The 1×1 entry of a scalar operator, as a list of scalar coefficients.
    pub fn scalar_coeffs(&self) -> Vec<RatFun> {
        self.terms.iter().map(|t| t.get(0, 0).clone()).collect()
    }

    /// Builds a 1×1 operator from scalar coefficients.
    pub fn from_scalar_coeffs(cs: Vec<RatFun>) -> Self {
        DiffOp::from_terms(1, 1, cs.into_iter().map(|c| MatRF::diag(vec![c])).collect())
    }

    /// Entry (i, j) as a 1×1 operator.
    pub fn entry(&self, i: usize, j: usize) -> DiffOp {
        DiffOp::from_scalar_coeffs(self.terms.iter().map(|t| t.get(i, j).clone()).collect())
    }

    /// Assembles an operator from a grid of 1×1 operators.
    pub fn from_entries(grid: &[Vec<DiffOp>]) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|r| r.len() != cols) {
            return Err(Error::NonRectangular);
        }
        let ord = grid
            .iter()
            .flatten()
            .filter_map(DiffOp::order)
            .max()
            .map_or(0, |o| o + 1);
        let terms = (0..ord)
            .map(|k| MatRF::from_fn(rows, cols, |i, j| grid[i][j].coeff(k).get(0, 0).clone()))
            .collect();
        Ok(DiffOp::from_terms(rows, cols, terms))
    }

    /// Row `i` as a 1×cols operator.
    pub fn row(&self, i: usize) -> DiffOp {
        DiffOp::from_terms(1, self.cols, self.terms.iter().map(|t| t.row_mat(i)).collect())
    }

    /// Stacks 1×N row operators into an operator with one row per input.
    pub fn stack_rows(rows: &[DiffOp]) -> Result<Self> {
        let cols = rows.first().map_or(0, DiffOp::cols);
        let grid: Vec<Vec<DiffOp>> = rows
            .iter()
            .map(|r| {
                if r.rows != 1 || r.cols != cols {
                    Err(Error::ShapeMismatch {
                        op: "stack rows",
                        left: (1, cols),
                        right: r.shape(),
                    })
                } else {
                    Ok((0..cols).map(|j| r.entry(0, j)).collect())
                }
            })
            .collect::<Result<_>>()?;
        DiffOp::from_entries(&grid)
    }

    /// Diagonal operator from 1×1 blocks.
    pub fn diag(entries: &[DiffOp]) -> Result<Self> {
        let n = entries.len();
        let grid: Vec<Vec<DiffOp>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { entries[i].clone() } else { DiffOp::zero(1, 1) })
                    .collect()
            })
            .collect();
        DiffOp::from_entries(&grid)
    }

    fn same_shape(&self, o: &DiffOp, op: &'static str) -> Result<()> {
        if self.shape() != o.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: o.shape(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &DiffOp) -> Result<DiffOp> {
        self.same_shape(o, "operator add")?;
        let n = self.terms.len().max(o.terms.len());
        let terms = (0..n).map(|j| self.coeff(j).add(&o.coeff(j))).collect();
        Ok(DiffOp::from_terms(self.rows, self.cols, terms))
    }

    pub fn try_sub(&self, o: &DiffOp) -> Result<DiffOp> {
        self.try_add(&o.neg())
    }

    pub fn add(&self, o: &DiffOp) -> DiffOp {
        self.try_add(o).expect("operator shape mismatch")
    }

    pub fn sub(&self, o: &DiffOp) -> DiffOp {
        self.try_sub(o).expect("operator shape mismatch")
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp {
            rows: self.rows,
            cols: self.cols,
            terms: self.terms.iter().map(MatRF::neg).collect(),
        }
    }

    /// Multiplies every coefficient by a constant.
    pub fn scale(&self, c: &CRat) -> DiffOp {
        let rc = RatFun::constant(c.clone());
        let terms = self.terms.iter().map(|t| t.scale(&rc)).collect();
        DiffOp::from_terms(self.rows, self.cols, terms)
    }

    /// Adds `c·I` (square operators only).
    pub fn add_scalar(&self, c: &CRat) -> DiffOp {
        self.add(&DiffOp::scalar(RatFun::constant(c.clone()), self.rows))
    }

    /// Normal-ordered product `self · o`.
    pub fn try_mul(&self, o: &DiffOp) -> Result<DiffOp> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch {
                op: "operator mul",
                left: self.shape(),
                right: o.shape(),
            });
        }
        if self.is_zero() || o.is_zero() {
            return Ok(DiffOp::zero(self.rows, o.cols));
        }
        let top = self.terms.len() + o.terms.len() - 1;
        let mut out = vec![MatRF::zeros(self.rows, o.cols); top];
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            // (∂^i A)(∂^j B) = Σ_k C(j,k) ∂^{i+j−k} A^{(k)} B
            let jmax = o.terms.len() - 1;
            let mut derivs = vec![a.clone()];
            for k in 1..=jmax {
                let next = derivs[k - 1].derivative();
                if next.is_zero() {
                    break;
                }
                derivs.push(next);
            }
            for (j, b) in o.terms.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (k, ak) in derivs.iter().enumerate().take(j + 1) {
                    let c = RatFun::constant(binom(j, k));
                    let t = ak.mul(b).scale(&c);
                    out[i + j - k] = out[i + j - k].add(&t);
                }
            }
        }
        Ok(DiffOp::from_terms(self.rows, o.cols, out))
    }

    pub fn mul(&self, o: &DiffOp) -> DiffOp {
        self.try_mul(o).expect("operator shape mismatch")
    }

    pub fn pow(&self, k: u32) -> DiffOp {
        (0..k).fold(DiffOp::identity(self.rows), |acc, _| acc.mul(self))
    }

    /// Right action `F·D = Σ_j F^{(j)} A_j`.
    pub fn apply(&self, f: &MatRF) -> Result<MatRF> {
        if f.cols() != self.rows {
            return Err(Error::ShapeMismatch {
                op: "apply",
                left: f.shape(),
                right: self.shape(),
            });
        }
        let mut out = MatRF::zeros(f.rows(), self.cols);
        let mut fd = f.clone();
        for (j, a) in self.terms.iter().enumerate() {
            if j > 0 {
                fd = fd.derivative();
            }
            if fd.is_zero() {
                break;
            }
            out = out.add(&fd.mul(a));
        }
        Ok(out)
    }

    /// Converts `Σ_j L_j ∂^j` (coefficients on the left) to normal form.
    pub fn from_left_form(rows: usize, cols: usize, left: &[MatRF]) -> DiffOp {
        let mut out = vec![MatRF::zeros(rows, cols); left.len()];
        for (j, l) in left.iter().enumerate() {
            // L ∂^j = Σ_k C(j,k) ∂^{j−k} L^{(k)}
            let mut d = l.clone();
            for k in 0..=j {
                if d.is_zero() {
                    break;
                }
                out[j - k] = out[j - k].add(&d.scale(&RatFun::constant(binom(j, k))));
                d = d.derivative();
            }
        }
        DiffOp::from_terms(rows, cols, out)
    }

    /// Coefficients `L_m` with `self = Σ_m L_m ∂^m`.
    pub fn to_left_form(&self) -> Vec<MatRF> {
        let mut out = vec![MatRF::zeros(self.rows, self.cols); self.terms.len()];
        for (j, a) in self.terms.iter().enumerate() {
            // ∂^j A = Σ_k C(j,k) (−1)^k A^{(k)} ∂^{j−k}
            let mut d = a.clone();
            for k in 0..=j {
                if d.is_zero() {
                    break;
                }
                let mut c = binom(j, k);
                if k % 2 == 1 {
                    c = -c;
                }
                out[j - k] = out[j - k].add(&d.scale(&RatFun::constant(c)));
                d = d.derivative();
            }
        }
        out
    }

    /// Formal adjoint: `(Σ ∂^j A_j)^* = Σ A_j^* (−∂)^j`, renormalized.
    pub fn star(&self) -> DiffOp {
        let left: Vec<MatRF> = self
            .terms
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let s = a.adjoint();
                if j % 2 == 1 {
                    s.neg()
                } else {
                    s
                }
            })
            .collect();
        DiffOp::from_left_form(self.cols, self.rows, &left)
    }

    /// Substitutes `∂ ↦ ∂ + s` for a scalar function `s`.
    pub fn shift_dx(&self, s: &RatFun) -> DiffOp {
        if s.is_zero() {
            return self.clone();
        }
        let n = self.rows;
        let e = DiffOp::dx(n).add(&DiffOp::scalar(s.clone(), n));
        let mut pw = DiffOp::identity(n);
        let mut out = DiffOp::zero(self.rows, self.cols);
        for (j, a) in self.terms.iter().enumerate() {
            if j > 0 {
                pw = pw.mul(&e);
            }
            if a.is_zero() {
                continue;
            }
            out = out.add(&pw.mul(&DiffOp::from_coeff(a.clone())));
        }
        out
    }

    /// Formal W-adjoint for `W = f·Q` with `s = f'/f`: `Q · σ_s(D^*) · Q^{-1}`.
    pub fn dagger(&self, k: &KernelConjugator, q: &MatRF) -> Result<DiffOp> {
        let qinv = q.inverse()?;
        let body = self.star().shift_dx(&k.s);
        let left = DiffOp::from_coeff(q.clone()).try_mul(&body)?;
        left.try_mul(&DiffOp::from_coeff(qinv))
    }

    /// Commutator `self·o − o·self`.
    pub fn ad(&self, o: &DiffOp) -> Result<DiffOp> {
        self.try_mul(o)?.try_sub(&o.try_mul(self)?)
    }

    /// Iterated commutator `Ad_self^k(o)`.
    pub fn ad_power(&self, o: &DiffOp, k: usize) -> Result<DiffOp> {
        if k == 0 {
            return Err(Error::InvalidParameter("ad power must be at least 1".into()));
        }
        let mut m = o.clone();
        for _ in 0..k {
            m = self.ad(&m)?;
        }
        Ok(m)
    }

    /// Checks `deg A_j ≤ j` with polynomial coefficients.
    pub fn filtration_witness(&self) -> Option<FiltrationWitness> {
        for (j, a) in self.terms.iter().enumerate() {
            for r in 0..a.rows() {
                for c in 0..a.cols() {
                    let e = a.get(r, c);
                    if e.is_zero() {
                        continue;
                    }
                    let deg = e.poly_degree();
                    if deg.is_none_or(|d| d > j) {
                        return Some(FiltrationWitness {
                            order: j,
                            row: r,
                            col: c,
                            degree: deg,
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_degree_filtration_preserving(&self) -> bool {
        self.filtration_witness().is_none()
    }

    pub fn has_polynomial_coeffs(&self) -> bool {
        self.terms.iter().all(MatRF::is_polynomial)
    }

    /// Largest polynomial degree among the coefficients (0 for the zero operator).
    pub fn max_coeff_degree(&self) -> usize {
        self.terms.iter().filter_map(MatRF::poly_degree).max().unwrap_or(0)
    }

    /// Multiplies every coefficient on the right by the constant matrix `m`.
    pub fn mul_right_mat(&self, m: &MatRF) -> Result<DiffOp> {
        self.try_mul(&DiffOp::from_coeff(m.clone()))
    }

    /// Transpose of every coefficient (no conjugation, no ∂ sign change).
    pub fn transpose_coeffs(&self) -> DiffOp {
        DiffOp::from_terms(self.cols, self.rows, self.terms.iter().map(MatRF::transpose).collect())
    }
}

impl std::fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::specio::print_op(self))
    }
}

impl std::fmt::Display for DiffOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::specio::print_op(self))
    }
}

/// Logarithmic derivative `s = f'/f` of a scalar kernel; conjugation by `f`
/// sends `∂` to `∂ + s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelConjugator {
    pub s: RatFun,
}

impl KernelConjugator {
    pub fn new(s: RatFun) -> Self {
        KernelConjugator { s }
    }

    /// `f · D · f^{-1}`.
    pub fn conjugate(&self, d: &DiffOp) -> DiffOp {
        d.shift_dx(&self.s)
    }

    /// `f^{-1} · D · f`.
    pub fn unconjugate(&self, d: &DiffOp) -> DiffOp {
        d.shift_dx(&-&self.s)
    }
}
