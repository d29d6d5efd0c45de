//! Orthogonal systems, cyclic generators, the diagonalizing operator,
//! symmetry checks, exceptional degrees and Darboux verification.

use std::collections::BTreeSet;

use crate::arith::{poly_gcd, CRat, Field, Mat, MatRF, Poly, RatFun};
use crate::error::{Error, Result};
use crate::fourier::{dw_membership, eval_lambda, fourier_image, EigenvalueMatrix, Membership};
use crate::opalg::{falling_factorial, DiffOp};
use crate::specio::{print_matrix, print_op, Certificate, Status};
use crate::weights::{MOPSequence, ScalarKernel, Weight};

/// A candidate orthogonal system with its certificates.
#[derive(Clone, Debug)]
pub struct OrthSystem {
    pub vs: Vec<DiffOp>,
    pub orders: Vec<usize>,
    pub lambdas: Vec<EigenvalueMatrix>,
    pub sum_lambda: EigenvalueMatrix,
    /// Whether the sum commutes with every supplied generator (`None` if none supplied).
    pub central: Option<bool>,
    /// Number of pairwise-annihilating elements with non-nilpotent eigenvalue.
    pub rank_lower_bound: usize,
    pub certificates: Vec<Certificate>,
}

impl OrthSystem {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.status == Status::Pass)
    }
}

/// Pass for a certified accept, inconclusive for an accept below the degree bound.
pub fn membership_certificate(name: &str, m: &Membership) -> Certificate {
    match m {
        Membership::Accept { certified: true, .. } => Certificate::check(name, true, "0"),
        Membership::Accept { n_win, .. } => Certificate::new(
            name,
            Status::Inconclusive,
            format!("accepted on n <= {n_win} only; window below the degree bound"),
        ),
        Membership::Reject { n, residual, .. } => {
            Certificate::check(name, false, format!("n={n}: {}", print_matrix(residual, "x")))
        }
    }
}

fn is_nilpotent(l: &EigenvalueMatrix) -> bool {
    let mut p = l.clone();
    for _ in 1..l.rows() {
        p = p.mul(l);
    }
    p.is_zero()
}

/// Certifies W-symmetry, pairwise annihilation and that the sum is not a zero divisor.
pub fn verify_orthogonal_system(
    vs: &[DiffOp],
    w: &Weight,
    seq: &MOPSequence,
    n_win: usize,
    generators: &[DiffOp],
) -> Result<OrthSystem> {
    let mut certs = Vec::new();
    let mut lambdas = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        certs.push(membership_certificate(&format!("V{} in D(W)", i + 1), &dw_membership(v, seq, n_win)?));
        lambdas.push(fourier_image(v)?);
        let dag = w.dagger(v)?;
        let diff = dag.sub(v);
        certs.push(Certificate::check(format!("V{} W-symmetric", i + 1), diff.is_zero(), print_op(&diff)));
    }
    let mut annihilating = true;
    for i in 0..vs.len() {
        for j in 0..vs.len() {
            if i == j {
                continue;
            }
            let p = vs[i].try_mul(&vs[j])?;
            annihilating &= p.is_zero();
            certs.push(Certificate::check(format!("V{}V{} = 0", i + 1, j + 1), p.is_zero(), print_op(&p)));
        }
    }
    let sum = vs
        .iter()
        .skip(1)
        .fold(vs[0].clone(), |acc, v| acc.add(v));
    let sum_lambda = fourier_image(&sum)?;
    let det = sum_lambda.det()?;
    certs.push(Certificate::check(
        "sum is not a zero divisor",
        !det.is_zero(),
        format!("det = {}", det.fmt_in("n")),
    ));
    let central = if generators.is_empty() {
        None
    } else {
        let mut ok = true;
        for g in generators {
            ok &= sum.ad(g)?.is_zero();
        }
        Some(ok)
    };
    let rank = if annihilating {
        lambdas.iter().filter(|l| !is_nilpotent(l)).count()
    } else {
        0
    };
    let size = w.size();
    certs.push(Certificate::check(
        "rank bound",
        rank <= size,
        format!("{rank} non-nilpotent elements for size {size}"),
    ));
    Ok(OrthSystem {
        orders: vs.iter().map(|v| v.order().unwrap_or(0)).collect(),
        vs: vs.to_vec(),
        lambdas,
        sum_lambda,
        central,
        rank_lower_bound: rank,
        certificates: certs,
    })
}

/// Minimal-order row operator annihilating every `V_j`, `j ≠ i`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub u: DiffOp,
    pub order: usize,
    /// Dimension of the solution space at the minimal order.
    pub nullity: usize,
}

fn row_lcm_den(row: &[RatFun]) -> Poly {
    row.iter().fold(Poly::one(), |acc, e| {
        if e.is_zero() {
            return acc;
        }
        let g = poly_gcd(&acc, e.den()).expect("nonzero");
        (&acc * e.den()).exact_div(&g).expect("gcd divides")
    })
}

/// Scales a left-form row operator to polynomial coefficients with trivial
/// joint content and a monic first nonzero entry in the leading row.
fn normalize_left(cs: &mut [Vec<RatFun>]) {
    let all: Vec<RatFun> = cs.iter().flatten().cloned().collect();
    let l = RatFun::from_poly(row_lcm_den(&all));
    let g = all
        .iter()
        .filter(|e| !e.is_zero())
        .fold(None::<Poly>, |acc, e| {
            let n = (e * &l).num().clone();
            Some(match acc {
                None => n.monic(),
                Some(a) => poly_gcd(&a, &n).expect("nonzero"),
            })
        })
        .unwrap_or_else(Poly::one);
    let content = (&l * &RatFun::new(Poly::one(), g).expect("nonzero")).clone();
    let first = cs
        .last()
        .and_then(|top| top.iter().find(|e| !e.is_zero()))
        .map(|e| (e * &content).num().lead())
        .unwrap_or_else(CRat::one);
    let factor = content.scale(&first.recip().expect("nonzero"));
    for row in cs.iter_mut() {
        for e in row.iter_mut() {
            *e = &*e * &factor;
        }
    }
}

/// Incremental-order ansatz `u = Σ_k c_k ∂^k` with `u·V_j = 0` for `j ≠ i`.
pub fn cyclic_generator(vs: &[DiffOp], i: usize, order_cap: usize) -> Result<Generator> {
    let nn = vs[i].rows();
    for k_ord in 0..=order_cap {
        // left forms of ∂^k V_j for each k ≤ K and j ≠ i
        let mut cols: Vec<Vec<RatFun>> = Vec::new();
        for (j, v) in vs.iter().enumerate() {
            if j == i {
                continue;
            }
            let forms: Vec<Vec<MatRF>> = (0..=k_ord)
                .map(|k| DiffOp::monomial(k, MatRF::identity(nn)).mul(v).to_left_form())
                .collect();
            let top = forms.iter().map(Vec::len).max().unwrap_or(0);
            for m in 0..top {
                for q in 0..nn {
                    let col: Vec<RatFun> = (0..=k_ord)
                        .flat_map(|k| {
                            let f = &forms[k];
                            (0..nn).map(move |p| f.get(m).map_or(RatFun::zero(), |c| c.get(p, q).clone()))
                        })
                        .collect();
                    if col.iter().any(|e| !e.is_zero()) {
                        cols.push(col);
                    }
                }
            }
        }
        let unknowns = (k_ord + 1) * nn;
        let basis = if cols.is_empty() {
            // no constraints: every row operator works; take the unit row e_0 at order 0
            let mut v = vec![RatFun::zero(); unknowns];
            v[0] = RatFun::one();
            vec![v]
        } else {
            let a = Mat::from_rows(cols)?;
            a.nullspace()
        };
        let Some(sol) = basis.first() else { continue };
        let mut cs: Vec<Vec<RatFun>> = (0..=k_ord).map(|k| sol[k * nn..(k + 1) * nn].to_vec()).collect();
        while cs.last().is_some_and(|r| r.iter().all(RatFun::is_zero)) {
            cs.pop();
        }
        normalize_left(&mut cs);
        let left: Vec<MatRF> = cs.into_iter().map(|r| MatRF::from_rows(vec![r]).expect("row")).collect();
        let u = DiffOp::from_left_form(1, nn, &left);
        return Ok(Generator {
            order: u.order().unwrap_or(0),
            u,
            nullity: basis.len(),
        });
    }
    Err(Error::NoGenerator(order_cap))
}

/// Left unit `g` with `g·u = w`, if one exists.
pub fn left_unit_between(u: &DiffOp, w: &DiffOp) -> Option<RatFun> {
    let lu = u.to_left_form();
    let lw = w.to_left_form();
    if lu.len() != lw.len() || lu.is_empty() {
        return None;
    }
    let top_u = lu.last()?;
    let top_w = lw.last()?;
    let j = (0..top_u.cols()).find(|&j| !top_u.get(0, j).is_zero())?;
    let g = top_w.get(0, j).checked_div(top_u.get(0, j)).ok()?;
    if g.is_zero() {
        return None;
    }
    lu.iter()
        .zip(&lw)
        .all(|(a, b)| a.scale(&g) == *b)
        .then_some(g)
}

/// `𝔘` with rows `u_i` and the matrix `U(x)` of their leading coefficients.
pub fn build_u(us: &[DiffOp]) -> Result<(DiffOp, MatRF)> {
    let big = DiffOp::stack_rows(us)?;
    let rows: Vec<Vec<RatFun>> = us.iter().map(|u| u.lead().row(0)).collect();
    let ux = MatRF::from_rows(rows)?;
    if ux.det()?.is_zero() {
        return Err(Error::Singular("U(x) has zero determinant".into()));
    }
    Ok((big, ux))
}

/// `U W U^*` as the kernel `f` times a rational matrix.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub kernel: ScalarKernel,
    pub rational: MatRF,
    pub diagonal: bool,
    /// Each `r_i` rewritten as an effective kernel times a rational remainder.
    pub effective: Vec<String>,
}

fn endpoint_factor(e: &CRat, left: bool) -> Poly {
    // positive on the support: x − e at a left endpoint, e − x at a right one
    if left {
        Poly::new(vec![-e, CRat::one()])
    } else {
        Poly::new(vec![e.clone(), CRat::from_int(-1)])
    }
}

/// Absorbs powers of the endpoint factors of `r` into the kernel exponents.
pub fn effective_kernel(k: &ScalarKernel, r: &RatFun) -> String {
    if r.is_zero() || !r.is_polynomial() {
        return format!("{}*({})", k.formula(), r);
    }
    let mut rest = r.num().clone();
    let mut mult = |e: &Option<CRat>, left: bool| -> usize {
        let Some(e) = e else { return 0 };
        let m = rest.root_multiplicity(e);
        rest = rest.exact_div(&endpoint_factor(e, left).pow(m as u32)).expect("root divides");
        m
    };
    let m_left = mult(&k.support.0, true);
    let m_right = mult(&k.support.1, false);
    let add = |c: &CRat, m: usize| c + &CRat::from_int(m as i64);
    let kern = match &k.kind {
        crate::weights::KernelKind::Hermite => "exp(-x^2)".to_string(),
        crate::weights::KernelKind::Laguerre { b } => format!("x^({})*exp(-x)", add(b, m_left)),
        crate::weights::KernelKind::Jacobi { alpha, beta } => {
            format!("(1-x)^({})*(1+x)^({})", add(alpha, m_right), add(beta, m_left))
        }
    };
    format!("{kern}*({rest})")
}

pub fn diagonalize_weight(ux: &MatRF, w: &Weight) -> Result<Diagonalization> {
    let rational = ux.try_mul(&w.factor)?.try_mul(&ux.adjoint())?;
    let effective = (0..rational.rows())
        .map(|i| effective_kernel(&w.kernel, rational.get(i, i)))
        .collect();
    Ok(Diagonalization {
        kernel: w.kernel.clone(),
        diagonal: rational.is_diagonal(),
        rational,
        effective,
    })
}

/// Scalar `v` with `v·u = u·V`, by left division in the Weyl algebra.
pub fn compute_vi(u: &DiffOp, v_op: &DiffOp) -> Result<DiffOp> {
    let l = u.order().ok_or_else(|| Error::NoSolution("zero generator".into()))?;
    let lead = u.lead();
    let j0 = (0..lead.cols())
        .find(|&j| !lead.get(0, j).is_zero())
        .expect("nonzero lead");
    let mut rem = u.try_mul(v_op)?;
    let mut left = Vec::new();
    while let Some(o) = rem.order() {
        if o < l {
            return Err(Error::NoSolution(format!("remainder of order {o} below generator order {l}")));
        }
        let k = o - l;
        let r = rem.lead();
        let c = r.get(0, j0).checked_div(lead.get(0, j0))?;
        if r != lead.scale(&c) {
            return Err(Error::NoSolution("leading row is not a multiple of U(x) row".into()));
        }
        if left.len() <= k {
            left.resize(k + 1, RatFun::zero());
        }
        left[k] = &left[k] + &c;
        let step = DiffOp::scalar(c, 1).mul(&DiffOp::monomial(k, MatRF::identity(1))).mul(u);
        rem = rem.sub(&step);
    }
    let left: Vec<MatRF> = left.into_iter().map(|c| MatRF::diag(vec![c])).collect();
    let v = DiffOp::from_left_form(1, 1, &left);
    let residual = v.mul(u).sub(&u.mul(v_op));
    if !residual.is_zero() {
        return Err(Error::Certificate {
            name: "v u = u V".into(),
            residual: print_op(&residual),
        });
    }
    Ok(v)
}

/// Evaluates `p(d) = Σ p_k d^k`.
pub fn poly_of_op(p: &[CRat], d: &DiffOp) -> DiffOp {
    let n = d.rows();
    let mut acc = DiffOp::zero(n, n);
    for c in p.iter().rev() {
        acc = acc.mul(d).add_scalar(c);
    }
    acc
}

/// Polynomial `p` (ascending coefficients) with `v = p(d)`.
pub fn express_in_classical(v: &DiffOp, d: &DiffOp) -> Result<Vec<CRat>> {
    let od = d.order().filter(|&o| o > 0).ok_or_else(|| Error::InvalidParameter("d must have positive order".into()))?;
    let mut rem = v.clone();
    let mut p: Vec<CRat> = Vec::new();
    let ld = d.lead();
    while let Some(o) = rem.order() {
        if o % od != 0 {
            return Err(Error::NoSolution(format!("order {o} is not a multiple of {od}")));
        }
        let k = o / od;
        let ratio = rem.lead().get(0, 0).checked_div(&ld.get(0, 0).pow(k as u32))?;
        let c = ratio
            .as_constant()
            .ok_or_else(|| Error::NoSolution(format!("leading ratio {ratio} is not constant")))?;
        if p.len() <= k {
            p.resize(k + 1, CRat::zero());
        }
        p[k] = &p[k] + &c;
        rem = rem.sub(&d.pow(k as u32).scale(&c));
    }
    Ok(p)
}

/// Certificates for `v b = b v^*`, the first-order equation for `r`, and
/// vanishing of the leading coefficient of `v` at finite endpoints.
pub fn adjoint_symmetry_checks(u: &DiffOp, v: &DiffOp, w: &Weight, label: &str) -> Result<(Vec<Certificate>, RatFun)> {
    let s = w.kernel.log_derivative();
    // b = u f Q u^* = (u Q σ_s(u^*))·f
    let b = u
        .try_mul(&DiffOp::from_coeff(w.factor.clone()))?
        .try_mul(&u.star().shift_dx(&s))?;
    let mut certs = Vec::new();
    let lhs = v.mul(&b);
    let rhs = b.mul(&v.star().shift_dx(&s));
    let d = lhs.sub(&rhs);
    certs.push(Certificate::check(format!("{label}: v b = b v*"), d.is_zero(), print_op(&d)));

    let rho = b.lead().get(0, 0).clone();
    let log_r = &s + &rho.derivative().checked_div(&rho)?;
    let m = v.order().unwrap_or(0);
    let l = u.order().unwrap_or(0);
    let vm = v.coeff(m).get(0, 0).clone();
    let res = if m == 0 {
        RatFun::zero()
    } else {
        let vm1 = v.coeff(m - 1).get(0, 0).clone();
        let sign = if m % 2 == 0 { RatFun::one() } else { -RatFun::one() };
        let two_l_m = RatFun::from_int(2 * l as i64 - m as i64);
        &(&(&vm1 + &(&sign * &vm1.conj())) + &(&two_l_m * &vm.derivative()))
            - &(&RatFun::from_int(m as i64) * &(&log_r * &vm))
    };
    certs.push(Certificate::check(format!("{label}: first-order equation for r"), res.is_zero(), res.to_string()));

    let mut vanish = true;
    let mut detail = Vec::new();
    for e in [&w.kernel.support.0, &w.kernel.support.1].into_iter().flatten() {
        let val = vm.eval(e);
        let ok = val.as_ref().is_some_and(Field::is_zero);
        vanish &= ok;
        detail.push(format!("v_m({e}) = {}", val.map_or("pole".into(), |v| v.to_string())));
    }
    let residual = if detail.is_empty() { "no finite endpoints".to_string() } else { detail.join(", ") };
    certs.push(Certificate::check(format!("{label}: leading coefficient vanishes at finite endpoints"), vanish, residual));
    Ok((certs, &rho * &RatFun::one()))
}

/// Degrees `n ≤ n_max` for which no polynomial eigenfunction of exact degree `n` exists.
pub fn exceptional_degrees(d: &DiffOp, n_max: usize) -> Result<BTreeSet<usize>> {
    if d.shape() != (1, 1) {
        return Err(Error::InvalidParameter("exceptional degrees need a scalar operator".into()));
    }
    let coeffs = d.scalar_coeffs();
    let q = coeffs.iter().fold(Poly::one(), |acc, c| {
        if c.is_zero() {
            return acc;
        }
        let g = poly_gcd(&acc, c.den()).expect("nonzero");
        (&acc * c.den()).exact_div(&g).expect("gcd divides")
    });
    let qr = RatFun::from_poly(q.clone());
    let at: Vec<Poly> = coeffs.iter().map(|c| (c * &qr).num().clone()).collect();
    let dq = q.degree().unwrap_or(0) as i64;
    let delta = at
        .iter()
        .enumerate()
        .filter_map(|(j, a)| a.degree().map(|dg| dg as i64 - j as i64))
        .max()
        .unwrap_or(i64::MIN);
    let mut out = BTreeSet::new();
    for n in 0..=n_max {
        let nn = CRat::from_int(n as i64);
        // top coefficient of Σ p^{(j)} ã_j for monic p of degree n sits at x^{n+δ}
        let top = at
            .iter()
            .enumerate()
            .filter(|(j, a)| a.degree().is_some_and(|dg| dg as i64 - *j as i64 == delta))
            .fold(CRat::zero(), |acc, (j, a)| {
                let ff = falling_factorial(j).eval(&nn).expect("polynomial");
                &acc + &(&ff * &a.lead())
            });
        let lambda = match delta.cmp(&dq) {
            std::cmp::Ordering::Equal => &top / &q.lead(),
            std::cmp::Ordering::Less => CRat::zero(),
            std::cmp::Ordering::Greater => {
                if top.is_zero() {
                    return Err(Error::EigenvalueUndetermined(n));
                }
                out.insert(n);
                continue;
            }
        };
        if !has_eigenpolynomial(&at, &q, &lambda, n)? {
            out.insert(n);
        }
    }
    Ok(out)
}

/// Solves `Σ p^{(j)} ã_j = λ q p` for monic `p` of degree `n`.
fn has_eigenpolynomial(at: &[Poly], q: &Poly, lambda: &CRat, n: usize) -> Result<bool> {
    // image of x^k under p ↦ Σ p^{(j)} ã_j − λ q p
    let image = |k: usize| -> Poly {
        let mono = Poly::monomial(CRat::one(), k);
        let mut acc = -&(&mono * q).scale(lambda);
        let mut dk = mono;
        for a in at {
            if dk.is_zero() {
                break;
            }
            acc = &acc + &(&dk * a);
            dk = dk.derivative();
        }
        acc
    };
    let imgs: Vec<Poly> = (0..=n).map(image).collect();
    let rows = imgs.iter().filter_map(Poly::degree).max().map_or(0, |d| d + 1);
    if rows == 0 {
        return Ok(true);
    }
    let a = Mat::from_fn(rows, n, |i, k| imgs[k].coeff(i));
    let rhs = Mat::from_fn(rows, 1, |i, _| -imgs[n].coeff(i));
    if n == 0 {
        return Ok(rhs.is_zero());
    }
    Ok(a.solve(&rhs)?.is_some())
}

/// A scalar conjugacy `h d = d̃ h`.
#[derive(Clone, Debug)]
pub struct Conjugacy {
    pub name: String,
    pub h: DiffOp,
    pub d: DiffOp,
    pub d_tilde: DiffOp,
}

/// `T T̃ = diag(p_i(d_i) q(p_i(d_i)))` and `T̃ E_ii T = V_i q(V_i)`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub t: DiffOp,
    pub t_tilde: DiffOp,
    pub targets: Vec<DiffOp>,
    pub p: Vec<Vec<CRat>>,
    pub q: Vec<CRat>,
    pub system: Vec<DiffOp>,
}

/// `𝔘 X = diag(targets) 𝔘`.
#[derive(Clone, Debug)]
pub struct Intertwining {
    pub name: String,
    pub u: DiffOp,
    pub x: DiffOp,
    pub targets: Vec<DiffOp>,
}

/// `P(n)·T F = C(n) P̃(n + shift)` on a window.
#[derive(Clone, Debug)]
pub struct SequenceTransform {
    pub name: String,
    pub t: DiffOp,
    pub f: MatRF,
    pub seq: MOPSequence,
    pub seq_tilde: MOPSequence,
    pub shift: usize,
    pub n_win: usize,
}

#[derive(Clone, Debug, Default)]
pub struct DarbouxData {
    pub conjugacies: Vec<Conjugacy>,
    pub factorization: Option<Factorization>,
    pub intertwinings: Vec<Intertwining>,
    pub sequences: Vec<SequenceTransform>,
}

fn op_check(name: String, lhs: &DiffOp, rhs: &DiffOp) -> Result<Certificate> {
    let d = lhs.try_sub(rhs)?;
    Ok(Certificate::check(name, d.is_zero(), print_op(&d)))
}

/// Checks every identity present in `data`.
pub fn darboux_verify(data: &DarbouxData) -> Result<Vec<Certificate>> {
    let mut certs = Vec::new();
    for c in &data.conjugacies {
        certs.push(op_check(format!("{}: h d = d~ h", c.name), &c.h.mul(&c.d), &c.d_tilde.mul(&c.h))?);
    }
    if let Some(f) = &data.factorization {
        let diag: Vec<DiffOp> = f
            .targets
            .iter()
            .zip(&f.p)
            .map(|(d, p)| {
                let pd = poly_of_op(p, d);
                pd.mul(&poly_of_op(&f.q, &pd))
            })
            .collect();
        certs.push(op_check("T T~ = diag(p_i(d_i) q(p_i(d_i)))".into(), &f.t.try_mul(&f.t_tilde)?, &DiffOp::diag(&diag)?)?);
        let n = f.system.len();
        for (i, v) in f.system.iter().enumerate() {
            let e = DiffOp::from_coeff(MatRF::unit(n, i, i));
            let lhs = f.t_tilde.try_mul(&e)?.try_mul(&f.t)?;
            certs.push(op_check(format!("T~ E{0}{0} T = V{0} q(V{0})", i + 1), &lhs, &v.mul(&poly_of_op(&f.q, v)))?);
        }
    }
    for it in &data.intertwinings {
        let lhs = it.u.try_mul(&it.x)?;
        let rhs = DiffOp::diag(&it.targets)?.try_mul(&it.u)?;
        certs.push(op_check(it.name.clone(), &lhs, &rhs)?);
    }
    for s in &data.sequences {
        let tf = s.t.try_mul(&DiffOp::from_coeff(s.f.clone()))?;
        let mut ok = true;
        let mut residual = "0".to_string();
        for n in 0..=s.n_win {
            let lhs = tf.apply(&s.seq.poly(n))?;
            let target = n + s.shift;
            if target > s.seq_tilde.n_max() {
                return Err(Error::WindowTooSmall(format!("{}: need P~({target})", s.name)));
            }
            let c = lhs.coeff_matrix(target);
            let rhs = MatRF::from_const(&c).mul(&s.seq_tilde.poly(target));
            let d = lhs.sub(&rhs);
            if !d.is_zero() || c.is_zero() {
                ok = false;
                residual = format!("n={n}: {}", print_matrix(&d, "x"));
                break;
            }
        }
        certs.push(Certificate::check(format!("{}: P(n)·T F = C(n) P~(n+{})", s.name, s.shift), ok, residual));
    }
    Ok(certs)
}

/// Values of `C(n)` for a sequence transform on its window.
pub fn transform_coefficients(s: &SequenceTransform) -> Result<Vec<MatRF>> {
    let tf = s.t.try_mul(&DiffOp::from_coeff(s.f.clone()))?;
    (0..=s.n_win)
        .map(|n| Ok(MatRF::from_const(&tf.apply(&s.seq.poly(n))?.coeff_matrix(n + s.shift))))
        .collect()
}

/// `Λ_{D D†}(n) = Λ_D(n) H(n) Λ_D(n)^* H(n)^{-1}`, and whether `D D† ≠ 0`.
pub fn positivity_witness(d: &DiffOp, w: &Weight, seq: &MOPSequence, n_win: usize) -> Result<bool> {
    let dd = d.try_mul(&w.dagger(d)?)?;
    if dd.is_zero() {
        return Ok(false);
    }
    let l = fourier_image(d)?;
    let ldd = fourier_image(&dd)?;
    for n in 0..=n_win.min(seq.n_max()) {
        let h = seq.norm(n);
        let ln = eval_lambda(&l, n);
        let expect = ln.mul(h).mul(&ln.adjoint()).mul(&h.inverse()?);
        if eval_lambda(&ldd, n) != expect {
            return Ok(false);
        }
    }
    Ok(!ldd.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermite_d() -> DiffOp {
        ScalarKernel::hermite().classical_operator()
    }

    #[test]
    fn hermite_has_no_exceptional_degrees() {
        assert!(exceptional_degrees(&hermite_d(), 12).unwrap().is_empty());
        let dx = DiffOp::dx(1);
        let ex = exceptional_degrees(&dx, 5).unwrap();
        assert_eq!(ex, (1..=5).collect());
    }

    #[test]
    fn express_square() {
        let d = hermite_d();
        let p = express_in_classical(&d.mul(&d), &d).unwrap();
        assert_eq!(p, vec![CRat::zero(), CRat::zero(), CRat::one()]);
        assert_eq!(poly_of_op(&p, &d), d.mul(&d));
    }

    #[test]
    fn scalar_generator_is_unit() {
        let g = cyclic_generator(&[hermite_d()], 0, 2).unwrap();
        assert_eq!(g.u, DiffOp::identity(1));
        let v = compute_vi(&g.u, &hermite_d()).unwrap();
        assert_eq!(v, hermite_d());
        let c = DiffOp::scalar(RatFun::from_int(3), 1);
        assert_eq!(compute_vi(&g.u, &c).unwrap(), c);
    }

    #[test]
    fn classical_symmetry_checks() {
        let w = Weight::scalar(ScalarKernel::hermite());
        let (certs, _) = adjoint_symmetry_checks(&DiffOp::identity(1), &hermite_d(), &w, "d").unwrap();
        assert!(certs.iter().all(|c| c.status == Status::Pass), "{certs:?}");
    }
}
