//! Shift operators in `n`, the generalized Fourier image of differential
//! operators, membership in D(W), band representations and discrete adjoints.

use std::collections::BTreeMap;

use crate::arith::{CRat, MatC, MatRF, RatFun};
use crate::error::{Error, Result};
use crate::opalg::{falling_factorial, DiffOp};
use crate::parallel;
use crate::weights::MOPSequence;

/// Eigenvalue matrix `Λ(n)`: entries are polynomials in `n`, stored as
/// rational functions in the variable printed as `n`.
pub type EigenvalueMatrix = MatRF;

/// Evaluates `Λ(n)` at an integer.
pub fn eval_lambda(l: &EigenvalueMatrix, n: usize) -> MatC {
    l.eval(&CRat::from_int(n as i64)).expect("polynomial in n")
}

/// Shift operator `(M·P)(n) = Σ_m K(n,m) P(m)` with constant matrix
/// coefficients, known on the rows `0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOp {
    size: usize,
    /// `rows[n]` maps `m` to `K(n,m)`; absent entries are zero.
    rows: Vec<BTreeMap<usize, MatC>>,
}

impl ShiftOp {
    pub fn new(size: usize, rows: Vec<BTreeMap<usize, MatC>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        ShiftOp { size, rows }
    }

    /// Diagonal operator `Λ(n)` on rows `0..=n_max`.
    pub fn diagonal(size: usize, n_max: usize, f: impl Fn(usize) -> MatC) -> Self {
        ShiftOp::new(size, (0..=n_max).map(|n| BTreeMap::from([(n, f(n))])).collect())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of valid rows; zero means the window is empty.
    pub fn window(&self) -> usize {
        self.rows.len()
    }

    /// Largest valid row index, `None` for an empty window.
    pub fn n_max(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn kernel(&self, n: usize, m: usize) -> MatC {
        self.rows[n]
            .get(&m)
            .cloned()
            .unwrap_or_else(|| MatC::zeros(self.size, self.size))
    }

    pub fn row(&self, n: usize) -> &BTreeMap<usize, MatC> {
        &self.rows[n]
    }

    /// Maximum `m − n` over nonzero entries.
    pub fn forward_band(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, r)| r.keys().map(move |&m| m.saturating_sub(n)))
            .max()
            .unwrap_or(0)
    }

    /// Maximum `n − m` over nonzero entries.
    pub fn backward_band(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, r)| r.keys().map(move |&m| n.saturating_sub(m)))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BTreeMap::is_empty)
    }

    pub fn truncate(&self, rows: usize) -> ShiftOp {
        ShiftOp {
            size: self.size,
            rows: self.rows.iter().take(rows).cloned().collect(),
        }
    }

    /// Coefficient of `𝒟^j` (j > 0) or `(𝒟*)^{−j}` (j < 0) as the sequence of its values.
    pub fn coefficient(&self, offset: i64) -> Vec<MatC> {
        (0..self.rows.len())
            .map(|n| {
                let m = n as i64 + offset;
                if m < 0 {
                    MatC::zeros(self.size, self.size)
                } else {
                    self.kernel(n, m as usize)
                }
            })
            .collect()
    }

    fn check_size(&self, o: &ShiftOp) -> Result<()> {
        if self.size != o.size {
            return Err(Error::ShapeMismatch {
                op: "shift operator",
                left: (self.size, self.size),
                right: (o.size, o.size),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &ShiftOp) -> Result<ShiftOp> {
        self.check_size(o)?;
        let w = self.window().min(o.window());
        let rows = (0..w)
            .map(|n| {
                let mut r = self.rows[n].clone();
                for (m, v) in &o.rows[n] {
                    let e = r.entry(*m).or_insert_with(|| MatC::zeros(self.size, self.size));
                    *e = e.add(v);
                }
                r
            })
            .collect();
        Ok(ShiftOp::new(self.size, rows))
    }

    pub fn neg(&self) -> ShiftOp {
        ShiftOp {
            size: self.size,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(m, v)| (*m, v.neg())).collect())
                .collect(),
        }
    }

    pub fn try_sub(&self, o: &ShiftOp) -> Result<ShiftOp> {
        self.try_add(&o.neg())
    }

    /// Composition; row `n` is valid when every `m` it reaches is a valid row of `o`.
    pub fn try_mul(&self, o: &ShiftOp) -> Result<ShiftOp> {
        self.check_size(o)?;
        let mut rows = Vec::new();
        for r in &self.rows {
            if r.keys().any(|&k| k >= o.window()) {
                break;
            }
            let mut out: BTreeMap<usize, MatC> = BTreeMap::new();
            for (k, a) in r {
                for (m, b) in &o.rows[*k] {
                    let e = out.entry(*m).or_insert_with(|| MatC::zeros(self.size, self.size));
                    *e = e.add(&a.mul(b));
                }
            }
            rows.push(out);
        }
        Ok(ShiftOp::new(self.size, rows))
    }

    /// Commutator `self·o − o·self`.
    pub fn ad(&self, o: &ShiftOp) -> Result<ShiftOp> {
        self.try_mul(o)?.try_sub(&o.try_mul(self)?)
    }

    pub fn ad_power(&self, o: &ShiftOp, k: usize) -> Result<ShiftOp> {
        if k == 0 {
            return Err(Error::InvalidParameter("ad power must be at least 1".into()));
        }
        let mut m = o.clone();
        for _ in 0..k {
            m = self.ad(&m)?;
        }
        Ok(m)
    }

    /// Applies the operator to a sequence of matrices indexed by `m`.
    pub fn apply(&self, seq: &[MatRF]) -> Result<Vec<MatRF>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter().try_fold(MatRF::zeros(self.size, seq.first().map_or(self.size, MatRF::cols)), |acc, (m, k)| {
                    let p = seq.get(*m).ok_or_else(|| {
                        Error::WindowTooSmall(format!("sequence has no entry {m}"))
                    })?;
                    Ok(acc.add(&MatRF::from_const(k).mul(p)))
                })
            })
            .collect()
    }

    /// Discrete W-adjoint `K†(n,m) = H(n) K(m,n)^* H(m)^{-1}`.
    ///
    /// Row `n` needs the rows `m ≤ n + backward_band`, so the window shrinks by that amount.
    pub fn dagger(&self, seq: &MOPSequence) -> Result<ShiftOp> {
        let bwd = self.backward_band();
        let w = self.window().saturating_sub(bwd);
        let fwd = self.forward_band();
        if self.window() > seq.n_max() + 1 {
            return Err(Error::WindowTooSmall("discrete adjoint needs norms beyond the sequence".into()));
        }
        let mut rows = Vec::with_capacity(w);
        for n in 0..w {
            let mut r = BTreeMap::new();
            let lo = n.saturating_sub(fwd);
            for m in lo..=n + bwd {
                let k = self.kernel(m, n);
                if k.is_zero() {
                    continue;
                }
                let v = seq.norm(n).mul(&k.adjoint()).mul(&seq.norm(m).inverse()?);
                r.insert(m, v);
            }
            rows.push(r);
        }
        Ok(ShiftOp::new(self.size, rows))
    }

    /// Checks `K(n,m)H(m) = H(n)K†(m,n)^*` for all rows valid in both operators.
    pub fn bilinear_residual(&self, dag: &ShiftOp, seq: &MOPSequence) -> Option<(usize, usize)> {
        let w = self.window().min(dag.window());
        for n in 0..w {
            for m in 0..w {
                let lhs = self.kernel(n, m).mul(seq.norm(m));
                let rhs = seq.norm(n).mul(&dag.kernel(m, n).adjoint());
                if lhs != rhs {
                    return Some((n, m));
                }
            }
        }
        None
    }

    /// Whether `self` equals `o` on the common window.
    pub fn agrees_with(&self, o: &ShiftOp) -> bool {
        let w = self.window().min(o.window());
        (0..w).all(|n| self.rows[n] == o.rows[n])
    }
}

/// Tridiagonal `𝓛 = 𝒟 + B(n) + C(n)𝒟*` with `𝓛·P(n) = xP(n)`.
pub fn build_l(seq: &MOPSequence) -> Result<ShiftOp> {
    let nn = seq.size();
    let mut rows = Vec::new();
    for n in 0..seq.n_max() {
        let mut r = BTreeMap::from([(n + 1, MatC::identity(nn)), (n, seq.b(n))]);
        if n > 0 {
            r.insert(n - 1, seq.c(n)?);
        }
        rows.push(r);
    }
    Ok(ShiftOp::new(nn, rows))
}

/// `Λ(n) = Σ_j n(n−1)⋯(n−j+1) A_{j,[j]}` for degree-filtration preserving `D`.
pub fn fourier_image(d: &DiffOp) -> Result<EigenvalueMatrix> {
    if let Some(w) = d.filtration_witness() {
        return Err(Error::NotFiltrationPreserving {
            order: w.order,
            row: w.row,
            col: w.col,
            degree: w.degree,
        });
    }
    let mut out = MatRF::zeros(d.rows(), d.cols());
    for (j, a) in d.terms().iter().enumerate() {
        let top = MatRF::from_const(&a.coeff_matrix(j));
        if top.is_zero() {
            continue;
        }
        out = out.add(&top.scale(&falling_factorial(j)));
    }
    Ok(out)
}

/// Outcome of a membership test on a finite window.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Accept {
        lambda: EigenvalueMatrix,
        n_win: usize,
        /// True when the window exceeds the degree bound, making the check a proof.
        certified: bool,
    },
    Reject {
        n: usize,
        residual: MatRF,
        lambda: Option<EigenvalueMatrix>,
    },
}

impl Membership {
    pub fn is_accept(&self) -> bool {
        matches!(self, Membership::Accept { .. })
    }

    pub fn lambda(&self) -> Option<&EigenvalueMatrix> {
        match self {
            Membership::Accept { lambda, .. } => Some(lambda),
            Membership::Reject { lambda, .. } => lambda.as_ref(),
        }
    }
}

/// Degree bound above which agreement on the window is a proof.
pub fn degree_bound(d: &DiffOp) -> usize {
    d.order().unwrap_or(0) + d.max_coeff_degree()
}

/// Tests `P(n)·D = Λ(n)P(n)` for `n = 0..=n_win`.
pub fn dw_membership(d: &DiffOp, seq: &MOPSequence, n_win: usize) -> Result<Membership> {
    if n_win > seq.n_max() {
        return Err(Error::WindowTooSmall(format!(
            "membership window {n_win} exceeds sequence length {}",
            seq.n_max()
        )));
    }
    let lambda = fourier_image(d).ok();
    let results = parallel::map((0..=n_win).collect(), |n| -> Result<Option<MatRF>> {
        let p = seq.poly(n);
        let lhs = d.apply(&p)?;
        let res = match &lambda {
            Some(l) => lhs.sub(&MatRF::from_const(&eval_lambda(l, n)).mul(&p)),
            None => {
                // without a Fourier image only a degree increase can be witnessed
                if lhs.poly_degree().is_some_and(|dg| dg > n) {
                    lhs
                } else {
                    MatRF::zeros(p.rows(), p.cols())
                }
            }
        };
        Ok((!res.is_zero()).then_some(res))
    });
    for (n, r) in results.into_iter().enumerate() {
        if let Some(residual) = r? {
            return Ok(Membership::Reject { n, residual, lambda });
        }
    }
    match lambda {
        Some(lambda) => Ok(Membership::Accept {
            certified: n_win + 1 > degree_bound(d),
            lambda,
            n_win,
        }),
        None => Err(Error::WindowTooSmall(
            "operator raises degrees but no witness was found on the window".into(),
        )),
    }
}

/// Expansion `P(n)·D = Σ_j C(n,j)P(j)` for `n = 0..=n_win`.
pub fn band_representation(d: &DiffOp, seq: &MOPSequence, n_win: usize) -> Result<ShiftOp> {
    let nn = seq.size();
    let rows = parallel::map((0..=n_win).collect(), |n| -> Result<BTreeMap<usize, MatC>> {
        let mut f = d.apply(&seq.poly(n))?;
        let mut row = BTreeMap::new();
        while let Some(deg) = f.poly_degree() {
            if deg > seq.n_max() {
                return Err(Error::WindowTooSmall(format!(
                    "P({n})·D has degree {deg}, beyond the sequence length {}",
                    seq.n_max()
                )));
            }
            let c = f.coeff_matrix(deg);
            f = f.sub(&MatRF::from_const(&c).mul(&seq.poly(deg)));
            row.insert(deg, c);
        }
        if !f.is_zero() {
            return Err(Error::NoSolution("operator does not have polynomial coefficients".into()));
        }
        Ok(row)
    });
    Ok(ShiftOp::new(nn, rows.into_iter().collect::<Result<_>>()?))
}

/// Result of searching for `k` with `Ad_𝓛^{k+1}(𝓜) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FourierTest {
    Accept { k: usize, window: usize },
    Reject { k_max: usize },
    Inconclusive { k: usize },
}

/// Smallest `k ≤ k_max` with `Ad_L^{k+1}(M)` vanishing on its (nonempty) window.
pub fn left_fourier_test(m: &ShiftOp, l: &ShiftOp, k_max: usize) -> Result<FourierTest> {
    let mut a = m.clone();
    for k in 0..=k_max {
        a = l.ad(&a)?;
        if a.window() == 0 {
            return Ok(FourierTest::Inconclusive { k });
        }
        if a.is_zero() {
            return Ok(FourierTest::Accept { k, window: a.window() });
        }
    }
    Ok(FourierTest::Reject { k_max })
}

/// Scalar polynomial-in-n helper used by reports.
pub fn lambda_text(l: &EigenvalueMatrix) -> String {
    crate::specio::print_matrix(l, "n")
}

/// Determinant of `Λ(n)` as a polynomial in `n`.
pub fn lambda_det(l: &EigenvalueMatrix) -> Result<RatFun> {
    l.det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{ScalarKernel, Weight};

    fn hermite_seq(n: usize) -> MOPSequence {
        MOPSequence::new(&Weight::scalar(ScalarKernel::hermite()), n).unwrap()
    }

    #[test]
    fn hermite_l_reproduces_x() {
        let seq = hermite_seq(8);
        let l = build_l(&seq).unwrap();
        assert_eq!(l.kernel(3, 2), MatC::diag(vec![CRat::frac(3, 2)]));
        assert!(l.row(0).get(&0).is_none());
        let ps: Vec<MatRF> = (0..=8).map(|n| seq.poly(n)).collect();
        let lp = l.apply(&ps).unwrap();
        for (n, v) in lp.iter().enumerate().take(7) {
            assert_eq!(v, &ps[n].scale(&RatFun::x()));
        }
    }

    #[test]
    fn dx_is_rejected_at_one() {
        let seq = hermite_seq(4);
        match dw_membership(&DiffOp::dx(1), &seq, 4).unwrap() {
            Membership::Reject { n, .. } => assert_eq!(n, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dx_band_is_subdiagonal() {
        let seq = hermite_seq(6);
        let b = band_representation(&DiffOp::dx(1), &seq, 5).unwrap();
        for n in 1..=5 {
            assert_eq!(b.row(n).len(), 1);
            assert_eq!(b.kernel(n, n - 1), MatC::diag(vec![CRat::from_int(n as i64)]));
        }
    }

    #[test]
    fn l_is_self_adjoint_and_k0() {
        let seq = hermite_seq(10);
        let l = build_l(&seq).unwrap();
        let dag = l.dagger(&seq).unwrap();
        assert!(dag.agrees_with(&l));
        assert_eq!(left_fourier_test(&l, &l, 3).unwrap(), FourierTest::Accept { k: 0, window: l.window() - 1 });
    }
}
