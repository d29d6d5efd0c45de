//! Weight matrices `W = f·Q`, exact normalized moments, monic orthogonal
//! polynomials, norms and recurrence coefficients.

use num_rational::BigRational;

use crate::arith::{CRat, Field, Mat, MatC, MatRF, Poly, RatFun};
use crate::error::{Error, Result};
use crate::opalg::DiffOp;

/// Classical scalar kernel families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `e^{−x²}` on the real line.
    Hermite,
    /// `x^b e^{−x}` on `(0, ∞)`.
    Laguerre { b: CRat },
    /// `(1−x)^alpha (1+x)^beta` on `(−1, 1)`.
    Jacobi { alpha: CRat, beta: CRat },
}

/// Scalar kernel `f` with rational logarithmic derivative `s = p/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarKernel {
    pub kind: KernelKind,
    /// Finite endpoints of the support (`None` for ±∞).
    pub support: (Option<CRat>, Option<CRat>),
    /// Pearson numerator: `q f' = p f`.
    pub p: Poly,
    /// Pearson denominator.
    pub q: Poly,
}

fn gt(a: &CRat, b: i64) -> bool {
    a.is_real() && a.re() > &BigRational::from_integer(b.into())
}

impl ScalarKernel {
    pub fn hermite() -> Self {
        ScalarKernel {
            kind: KernelKind::Hermite,
            support: (None, None),
            p: Poly::from_ints(&[0, -2]),
            q: Poly::one(),
        }
    }

    pub fn laguerre(b: CRat) -> Result<Self> {
        if !gt(&b, -1) {
            return Err(Error::InvalidParameter(format!("Laguerre kernel needs real b > -1, got {b}")));
        }
        Ok(ScalarKernel {
            p: Poly::new(vec![b.clone(), CRat::from_int(-1)]),
            q: Poly::x(),
            kind: KernelKind::Laguerre { b },
            support: (Some(CRat::zero()), None),
        })
    }

    pub fn jacobi(alpha: CRat, beta: CRat) -> Result<Self> {
        if !gt(&alpha, -1) || !gt(&beta, -1) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi kernel needs real exponents > -1, got ({alpha}, {beta})"
            )));
        }
        Ok(ScalarKernel {
            p: Poly::new(vec![&beta - &alpha, -(&alpha + &beta)]),
            q: Poly::from_ints(&[1, 0, -1]),
            kind: KernelKind::Jacobi { alpha, beta },
            support: (Some(CRat::from_int(-1)), Some(CRat::one())),
        })
    }

    /// Even kernel `(1−x²)^e`.
    pub fn gegenbauer(e: CRat) -> Result<Self> {
        ScalarKernel::jacobi(e.clone(), e)
    }

    /// Logarithmic derivative `f'/f`.
    pub fn log_derivative(&self) -> RatFun {
        RatFun::new(self.p.clone(), self.q.clone()).expect("q is nonzero")
    }

    pub fn conjugator(&self) -> crate::opalg::KernelConjugator {
        crate::opalg::KernelConjugator::new(self.log_derivative())
    }

    /// The classical second-order operator `∂² q + ∂ (q' + p)`.
    pub fn classical_operator(&self) -> DiffOp {
        let q = RatFun::from_poly(self.q.clone());
        let first = RatFun::from_poly(&self.q.derivative() + &self.p);
        DiffOp::from_scalar_coeffs(vec![RatFun::zero(), first, q])
    }

    /// Normalized moments `μ_m/μ_0` for `m = 0..=m_max`.
    ///
    /// Integration by parts gives `Σ_i q_i (m+i) μ_{m+i−1} + Σ_i p_i μ_{m+i} = 0`.
    pub fn moments(&self, m_max: usize) -> Result<Vec<CRat>> {
        let q = self.q.coeffs();
        let p = self.p.coeffs();
        let top = (q.len().saturating_sub(2)).max(p.len().saturating_sub(1));
        if top != 1 {
            return Err(Error::InvalidParameter("unsupported Pearson pair".into()));
        }
        let mut mu = vec![CRat::one()];
        let mut m = 0usize;
        while mu.len() <= m_max {
            // relation at m determines μ_{m+1}
            let mut lead = CRat::zero();
            let mut rest = CRat::zero();
            for (i, qi) in q.iter().enumerate() {
                let idx = m as i64 + i as i64 - 1;
                let c = qi * &CRat::from_int((m + i) as i64);
                if idx == m as i64 + 1 {
                    lead = &lead + &c;
                } else if idx >= 0 {
                    rest = &rest + &(&c * &mu[idx as usize]);
                }
            }
            for (i, pi) in p.iter().enumerate() {
                let idx = m + i;
                if idx == m + 1 {
                    lead = &lead + pi;
                } else {
                    rest = &rest + &(pi * &mu[idx]);
                }
            }
            if lead.is_zero() {
                return Err(Error::MomentDoesNotExist(m + 1));
            }
            mu.push(&(-rest) / &lead);
            m += 1;
        }
        Ok(mu)
    }

    /// A few exact interior sample points of the support.
    pub fn sample_points(&self) -> Vec<CRat> {
        let ints = |v: &[(i64, i64)]| v.iter().map(|&(a, b)| CRat::frac(a, b)).collect();
        match self.kind {
            KernelKind::Hermite => ints(&[(-2, 1), (-1, 1), (0, 1), (1, 3), (1, 1), (5, 2)]),
            KernelKind::Laguerre { .. } => ints(&[(1, 10), (1, 2), (1, 1), (2, 1), (3, 1), (7, 1)]),
            KernelKind::Jacobi { .. } => ints(&[(-9, 10), (-1, 2), (0, 1), (1, 3), (3, 4), (19, 20)]),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            KernelKind::Hermite => "hermite".into(),
            KernelKind::Laguerre { b } => format!("laguerre({b})"),
            KernelKind::Jacobi { alpha, beta } => format!("jacobi({alpha},{beta})"),
        }
    }

    /// Closed-form description of `f`.
    pub fn formula(&self) -> String {
        match &self.kind {
            KernelKind::Hermite => "exp(-x^2)".into(),
            KernelKind::Laguerre { b } => format!("x^({b})*exp(-x)"),
            KernelKind::Jacobi { alpha, beta } => format!("(1-x)^({alpha})*(1+x)^({beta})"),
        }
    }
}

/// `W(x) = f(x)·Q(x)` with polynomial factor `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    pub kernel: ScalarKernel,
    pub factor: MatRF,
}

impl Weight {
    /// Validates polynomial entries, hermiticity and positivity at sample points.
    pub fn new(kernel: ScalarKernel, factor: MatRF) -> Result<Self> {
        if !factor.is_square() {
            return Err(Error::InvalidParameter("weight factor must be square".into()));
        }
        if !factor.is_polynomial() {
            return Err(Error::InvalidParameter("weight factor must have polynomial entries".into()));
        }
        if !factor.is_hermitian() {
            return Err(Error::InvalidParameter("weight factor is not Hermitian".into()));
        }
        if factor.det()?.is_zero() {
            return Err(Error::InvalidParameter("weight factor is singular".into()));
        }
        for t in kernel.sample_points() {
            let v = factor.eval(&t).expect("polynomial");
            if !v.leading_minors()?.iter().all(CRat::is_positive_real) {
                return Err(Error::InvalidParameter(format!(
                    "weight factor is not positive definite at x = {t}"
                )));
            }
        }
        Ok(Weight { kernel, factor })
    }

    pub fn scalar(kernel: ScalarKernel) -> Self {
        Weight {
            kernel,
            factor: MatRF::identity(1),
        }
    }

    pub fn size(&self) -> usize {
        self.factor.rows()
    }

    pub fn factor_degree(&self) -> usize {
        self.factor.poly_degree().unwrap_or(0)
    }

    /// Normalized matrix moments `M_m = Σ_k Q_k μ_{m+k}` for `m = 0..=m_max`.
    pub fn matrix_moments(&self, m_max: usize) -> Result<Vec<MatC>> {
        let dq = self.factor_degree();
        let mu = self.kernel.moments(m_max + dq)?;
        let qk: Vec<MatC> = (0..=dq).map(|k| self.factor.coeff_matrix(k)).collect();
        Ok((0..=m_max)
            .map(|m| {
                qk.iter()
                    .enumerate()
                    .fold(MatC::zeros(self.size(), self.size()), |acc, (k, q)| {
                        acc.add(&q.scale(&mu[m + k]))
                    })
            })
            .collect())
    }

    pub fn conjugator(&self) -> crate::opalg::KernelConjugator {
        self.kernel.conjugator()
    }

    /// Formal W-adjoint of `d`.
    pub fn dagger(&self, d: &DiffOp) -> Result<DiffOp> {
        d.dagger(&self.conjugator(), &self.factor)
    }
}

fn q2(rows: Vec<Vec<RatFun>>) -> MatRF {
    MatRF::from_rows(rows).expect("rectangular")
}

fn c(v: &CRat) -> RatFun {
    RatFun::constant(v.clone())
}

/// `e^{−x²} [[1+a²x², ax],[ax,1]]`.
pub fn hermite_2x2(a: &CRat) -> Result<Weight> {
    if a.is_zero() {
        return Err(Error::InvalidParameter("hermite-2x2 needs a != 0".into()));
    }
    let x = RatFun::x();
    let ax = &c(a) * &x;
    let q = q2(vec![
        vec![RatFun::one() + &ax * &ax, ax.clone()],
        vec![ax, RatFun::one()],
    ]);
    Weight::new(ScalarKernel::hermite(), q)
}

/// `x^b e^{−x} [[1+a²x², ax],[ax,1]]`.
pub fn laguerre_2x2(a: &CRat, b: &CRat) -> Result<Weight> {
    if a.is_zero() {
        return Err(Error::InvalidParameter("laguerre-2x2 needs a != 0".into()));
    }
    let x = RatFun::x();
    let ax = &c(a) * &x;
    let q = q2(vec![
        vec![RatFun::one() + &ax * &ax, ax.clone()],
        vec![ax, RatFun::one()],
    ]);
    Weight::new(ScalarKernel::laguerre(b.clone())?, q)
}

/// `(1−x²)^{r/2−1} [[a(x²−1)+r, −rx],[−rx,(r−a)(x²−1)+r]]`, requires `0 < a < r`.
pub fn jacobi_2x2(a: &CRat, r: &CRat) -> Result<Weight> {
    if !(a.is_positive_real() && (r - a).is_positive_real()) {
        return Err(Error::InvalidParameter(format!("jacobi-2x2 needs 0 < a < r, got a={a}, r={r}")));
    }
    let e = &(r / &CRat::from_int(2)) - &CRat::one();
    let x = RatFun::x();
    let x2m1 = &(&x * &x) - &RatFun::one();
    let rx = &c(r) * &x;
    let q = q2(vec![
        vec![&(&c(a) * &x2m1) + &c(r), -&rx],
        vec![-&rx, &(&c(&(r - a)) * &x2m1) + &c(r)],
    ]);
    Weight::new(ScalarKernel::gegenbauer(e)?, q)
}

/// Monic orthogonal polynomials with exact norms and recurrence data.
#[derive(Clone, Debug)]
pub struct MOPSequence {
    pub weight: Weight,
    /// `coeffs[n][k]` is the `x^k` coefficient of `P(x,n)`; `coeffs[n][n] = I`.
    pub coeffs: Vec<Vec<MatC>>,
    /// `H(n) = ⟨P(n),P(n)⟩/μ_0`.
    pub norms: Vec<MatC>,
    /// Normalized moments `M_0..M_{2 n_max + 1}`.
    pub moments: Vec<MatC>,
}

fn block_hankel(moments: &[MatC], n: usize, size: usize) -> MatC {
    Mat::from_fn(n * size, n * size, |i, j| {
        moments[i / size + j / size].get(i % size, j % size).clone()
    })
}

impl MOPSequence {
    /// Builds `P(0..=n_max)` by solving the block-Hankel moment systems.
    pub fn new(weight: &Weight, n_max: usize) -> Result<Self> {
        let nn = weight.size();
        let moments = weight.matrix_moments(2 * n_max + 1)?;
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let mut norms = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut pc = Vec::with_capacity(n + 1);
            if n > 0 {
                // [P_0 … P_{n−1}] · Hank = −[M_n … M_{2n−1}]
                let hank = block_hankel(&moments, n, nn);
                let rhs = Mat::from_fn(nn * n, nn, |i, j| {
                    -moments[n + i / nn].get(j, i % nn)
                });
                let sol = hank
                    .transpose()
                    .solve(&rhs)?
                    .ok_or(Error::SingularHankel(n))?;
                if hank.rank() < n * nn {
                    return Err(Error::SingularHankel(n));
                }
                for k in 0..n {
                    pc.push(Mat::from_fn(nn, nn, |i, j| sol.get(k * nn + j, i).clone()));
                }
            }
            pc.push(MatC::identity(nn));
            let h = pc
                .iter()
                .enumerate()
                .fold(MatC::zeros(nn, nn), |acc, (k, p)| acc.add(&p.mul(&moments[k + n])));
            coeffs.push(pc);
            norms.push(h);
        }
        Ok(MOPSequence {
            weight: weight.clone(),
            coeffs,
            norms,
            moments,
        })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn size(&self) -> usize {
        self.weight.size()
    }

    /// `P(x,n)` as a polynomial matrix.
    pub fn poly(&self, n: usize) -> MatRF {
        MatRF::from_coeff_matrices(&self.coeffs[n])
    }

    pub fn norm(&self, n: usize) -> &MatC {
        &self.norms[n]
    }

    /// `⟨F,G⟩_W/μ_0` for polynomial matrices given by coefficient lists.
    pub fn inner(&self, f: &[MatC], g: &[MatC]) -> Result<MatC> {
        let nn = self.size();
        if f.len() + g.len() > self.moments.len() + 1 {
            return Err(Error::WindowTooSmall(format!(
                "inner product of degrees {} and {} exceeds stored moments",
                f.len().saturating_sub(1),
                g.len().saturating_sub(1)
            )));
        }
        let mut acc = MatC::zeros(f.first().map_or(nn, Mat::rows), g.first().map_or(nn, Mat::rows));
        for (k, a) in f.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (l, b) in g.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(&self.moments[k + l]).mul(&b.adjoint()));
            }
        }
        Ok(acc)
    }

    /// `B(n) = P(n)_{n−1} − P(n+1)_n`, for `n < n_max`.
    pub fn b(&self, n: usize) -> MatC {
        let nn = self.size();
        let pn = if n == 0 {
            MatC::zeros(nn, nn)
        } else {
            self.coeffs[n][n - 1].clone()
        };
        pn.sub(&self.coeffs[n + 1][n])
    }

    /// `C(n) = H(n) H(n−1)^{-1}` for `n ≥ 1`; zero for `n = 0`.
    pub fn c(&self, n: usize) -> Result<MatC> {
        let nn = self.size();
        if n == 0 {
            return Ok(MatC::zeros(nn, nn));
        }
        Ok(self.norms[n].mul(&self.norms[n - 1].inverse()?))
    }

    /// Recurrence coefficients `(B(n), C(n))` for `n = 0..n_max`.
    pub fn recurrence_coeffs(&self) -> Result<Vec<(MatC, MatC)>> {
        (0..self.n_max()).map(|n| Ok((self.b(n), self.c(n)?))).collect()
    }

    /// Residual `xP(n) − P(n+1) − B(n)P(n) − C(n)P(n−1)` as a polynomial matrix.
    pub fn recurrence_residual(&self, n: usize) -> Result<MatRF> {
        let x = MatRF::identity(self.size()).scale(&RatFun::x());
        let mut r = x.mul(&self.poly(n)).sub(&self.poly(n + 1));
        r = r.sub(&MatRF::from_const(&self.b(n)).mul(&self.poly(n)));
        if n > 0 {
            r = r.sub(&MatRF::from_const(&self.c(n)?).mul(&self.poly(n - 1)));
        }
        Ok(r)
    }

    /// Hermitian with all leading principal minors positive.
    pub fn norm_is_positive(&self, n: usize) -> Result<bool> {
        let h = &self.norms[n];
        Ok(h.is_hermitian() && h.leading_minors()?.iter().all(CRat::is_positive_real))
    }
}

/// `t_{α,β} = ∂(1−x²) + β−α−(β+α+2)x`.
pub fn jacobi_intertwiner(alpha: &CRat, beta: &CRat) -> DiffOp {
    let lin = RatFun::from_poly(Poly::new(vec![beta - alpha, -(&(beta + alpha) + &CRat::from_int(2))]));
    DiffOp::from_scalar_coeffs(vec![lin, RatFun::from_poly(Poly::from_ints(&[1, 0, -1]))])
}

/// The Jacobi operator `e_{α,β} = ∂²(1−x²) + ∂(β−α−(β+α+2)x)`.
pub fn jacobi_operator(alpha: &CRat, beta: &CRat) -> DiffOp {
    let k = ScalarKernel {
        kind: KernelKind::Jacobi {
            alpha: alpha.clone(),
            beta: beta.clone(),
        },
        support: (Some(CRat::from_int(-1)), Some(CRat::one())),
        p: Poly::new(vec![beta - alpha, -(alpha + beta)]),
        q: Poly::from_ints(&[1, 0, -1]),
    };
    k.classical_operator()
}

/// Residuals of `e_{α,β} − ∂ t_{α,β}` and `e_{α+1,β+1} − (β+α+2) − t_{α,β} ∂`.
pub fn intertwiner_residuals(alpha: &CRat, beta: &CRat) -> (DiffOp, DiffOp) {
    let t = jacobi_intertwiner(alpha, beta);
    let dx = DiffOp::dx(1);
    let r1 = jacobi_operator(alpha, beta).sub(&dx.mul(&t));
    let one = CRat::one();
    let shift = &(beta + alpha) + &CRat::from_int(2);
    let r2 = jacobi_operator(&(alpha + &one), &(beta + &one))
        .add_scalar(&-shift)
        .sub(&t.mul(&dx));
    (r1, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_moments() {
        let mu = ScalarKernel::hermite().moments(4).unwrap();
        assert_eq!(mu[1], CRat::zero());
        assert_eq!(mu[2], CRat::frac(1, 2));
        assert_eq!(mu[4], CRat::frac(3, 4));
    }

    #[test]
    fn laguerre_first_moment() {
        let mu = ScalarKernel::laguerre(CRat::frac(1, 2)).unwrap().moments(1).unwrap();
        assert_eq!(mu[1], CRat::frac(3, 2));
        assert!(ScalarKernel::laguerre(CRat::from_int(-1)).is_err());
    }

    #[test]
    fn gegenbauer_second_moment() {
        let s = CRat::frac(3, 7);
        let mu = ScalarKernel::gegenbauer(s.clone()).unwrap().moments(2).unwrap();
        let expect = CRat::one() / (&(&s * &CRat::from_int(2)) + &CRat::from_int(3));
        assert_eq!(mu[2], expect);
    }

    #[test]
    fn scalar_hermite_sequence() {
        let seq = MOPSequence::new(&Weight::scalar(ScalarKernel::hermite()), 6).unwrap();
        assert_eq!(seq.poly(2).get(0, 0), &RatFun::from_poly(Poly::new(vec![CRat::frac(-1, 2), CRat::zero(), CRat::one()])));
        assert_eq!(seq.norm(1).get(0, 0), &CRat::frac(1, 2));
        assert_eq!(seq.norm(2).get(0, 0), &CRat::frac(1, 2));
        for n in 1..6 {
            assert!(seq.b(n).is_zero());
            assert_eq!(seq.c(n).unwrap().get(0, 0), &CRat::frac(n as i64, 2));
            assert!(seq.recurrence_residual(n).unwrap().is_zero());
        }
    }

    #[test]
    fn hermite_2x2_zeroth_moment() {
        let w = hermite_2x2(&CRat::one()).unwrap();
        let m = w.matrix_moments(0).unwrap();
        assert_eq!(m[0], MatC::diag(vec![CRat::frac(3, 2), CRat::one()]));
    }

    #[test]
    fn intertwiner_identities_at_zero() {
        let (r1, r2) = intertwiner_residuals(&CRat::zero(), &CRat::zero());
        assert!(r1.is_zero() && r2.is_zero());
    }
}
