//! Exact results checked against independent numerical oracles.

use mopalg::arith::{CRat, Field, MatC, MatRF, Poly, RatFun};
use mopalg::fourier::band_representation;
use mopalg::opalg::DiffOp;
use mopalg::weights::{hermite_2x2, jacobi_2x2, laguerre_2x2, KernelKind, MOPSequence, ScalarKernel, Weight};

const TOL: f64 = 1e-10;

fn f(c: &CRat) -> f64 {
    c.to_f64()
}

fn poly_at(p: &Poly, x: f64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * x + f(c))
}

fn rf_at(r: &RatFun, x: f64) -> f64 {
    poly_at(r.num(), x) / poly_at(r.den(), x)
}

/// Double-exponential quadrature nodes `(x, 1 - x, 1 + x, weight)` for the kernel's support.
/// The complementary coordinates keep endpoint singularities accurate.
fn nodes(k: &ScalarKernel) -> Vec<(f64, f64, f64, f64)> {
    let h = 1.0 / 64.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut out = Vec::new();
    for i in -400i32..=400 {
        let t = i as f64 * h;
        let u = half_pi * t.sinh();
        let du = half_pi * t.cosh();
        match k.kind {
            KernelKind::Hermite => {
                let x = u.sinh();
                out.push((x, 1.0 - x, 1.0 + x, h * du * u.cosh()));
            }
            KernelKind::Laguerre { .. } => {
                let x = u.exp();
                if x.is_finite() && x < 800.0 {
                    out.push((x, 1.0 - x, 1.0 + x, h * du * x));
                }
            }
            KernelKind::Jacobi { .. } => {
                if u.abs() > 350.0 {
                    continue;
                }
                let ch = u.cosh();
                let x = u.tanh();
                let one_minus = (-u).exp() / ch;
                let one_plus = u.exp() / ch;
                out.push((x, one_minus, one_plus, h * du / (ch * ch)));
            }
        }
    }
    out
}

fn kernel_at(k: &ScalarKernel, (x, om, op, _): (f64, f64, f64, f64)) -> f64 {
    match &k.kind {
        KernelKind::Hermite => (-x * x).exp(),
        KernelKind::Laguerre { b } => x.powf(f(b)) * (-x).exp(),
        KernelKind::Jacobi { alpha, beta } => om.powf(f(alpha)) * op.powf(f(beta)),
    }
}

fn integrate(k: &ScalarKernel, g: impl Fn(f64) -> f64) -> f64 {
    nodes(k)
        .into_iter()
        .map(|n| n.3 * kernel_at(k, n) * g(n.0))
        .filter(|v| v.is_finite())
        .sum()
}

fn kernels() -> Vec<ScalarKernel> {
    vec![
        ScalarKernel::hermite(),
        ScalarKernel::laguerre(CRat::frac(1, 2)).unwrap(),
        ScalarKernel::laguerre(CRat::frac(-1, 3)).unwrap(),
        ScalarKernel::laguerre(CRat::from_int(2)).unwrap(),
        ScalarKernel::jacobi(CRat::frac(1, 2), CRat::frac(-1, 3)).unwrap(),
        ScalarKernel::jacobi(CRat::from_int(2), CRat::frac(3, 4)).unwrap(),
        ScalarKernel::gegenbauer(CRat::frac(1, 4)).unwrap(),
    ]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * b.abs().max(1.0)
}

#[test]
fn scalar_moments_match_quadrature() {
    for k in kernels() {
        let exact = k.moments(8).unwrap();
        let mu0 = integrate(&k, |_| 1.0);
        for (m, e) in exact.iter().enumerate() {
            let num = integrate(&k, |x| x.powi(m as i32)) / mu0;
            assert!(close(num, f(e)), "{}: moment {m}: quadrature {num} vs exact {}", k.name(), e);
        }
    }
}

fn weights() -> Vec<Weight> {
    vec![
        hermite_2x2(&CRat::frac(2, 3)).unwrap(),
        hermite_2x2(&CRat::from_int(-3)).unwrap(),
        laguerre_2x2(&CRat::frac(1, 2), &CRat::frac(1, 3)).unwrap(),
        jacobi_2x2(&CRat::frac(1, 2), &CRat::frac(7, 3)).unwrap(),
        jacobi_2x2(&CRat::from_int(1), &CRat::from_int(3)).unwrap(),
    ]
}

fn mat_at(m: &MatRF, x: f64) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| rf_at(m.get(i, j), x)).collect()).collect()
}

#[test]
fn matrix_moments_match_quadrature() {
    for w in weights() {
        let exact = w.matrix_moments(6).unwrap();
        let mu0 = integrate(&w.kernel, |_| 1.0);
        for (m, e) in exact.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    let q = w.factor.get(i, j).clone();
                    let num = integrate(&w.kernel, |x| x.powi(m as i32) * rf_at(&q, x)) / mu0;
                    assert!(close(num, f(e.get(i, j))), "moment {m} entry ({i},{j}): {num} vs {}", e.get(i, j));
                }
            }
        }
    }
}

/// `∫ F W G^T` by quadrature for real polynomial matrices.
fn quad_inner(w: &Weight, a: &MatRF, b: &MatRF) -> Vec<Vec<f64>> {
    let mu0 = integrate(&w.kernel, |_| 1.0);
    let n = a.rows();
    let mut out = vec![vec![0.0; n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = integrate(&w.kernel, |x| {
                let (fa, fw, fb) = (mat_at(a, x), mat_at(&w.factor, x), mat_at(b, x));
                let mut s = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        s += fa[i][k] * fw[k][l] * fb[j][l];
                    }
                }
                s
            }) / mu0;
        }
    }
    out
}

#[test]
fn orthogonality_and_norms_match_quadrature() {
    for w in weights() {
        let seq = MOPSequence::new(&w, 5).unwrap();
        for n in 0..=4 {
            let pn = seq.poly(n);
            for m in 0..=n {
                let ip = quad_inner(&w, &pn, &seq.poly(m));
                let expect: MatC = if m == n { seq.norm(n).clone() } else { MatC::zeros(2, 2) };
                for i in 0..2 {
                    for j in 0..2 {
                        let scale = seq.norm(n).entries().map(|c| f(c).abs()).fold(1.0, f64::max);
                        assert!(
                            (ip[i][j] - f(expect.get(i, j))).abs() <= TOL * scale,
                            "<P({n}),P({m})>[{i}][{j}] = {} vs {}",
                            ip[i][j],
                            expect.get(i, j)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn derivative_band_matches_inner_product_expansion() {
    // C(n, j) = <P(n)·∂, P(j)> <P(j), P(j)>^{-1}, evaluated by quadrature
    let w = Weight::scalar(ScalarKernel::hermite());
    let seq = MOPSequence::new(&w, 10).unwrap();
    let band = band_representation(&DiffOp::dx(1), &seq, 8).unwrap();
    for n in 0..=8 {
        let pd = DiffOp::dx(1).apply(&seq.poly(n)).unwrap();
        for j in 0..=8 {
            let num = quad_inner(&w, &pd, &seq.poly(j))[0][0] / quad_inner(&w, &seq.poly(j), &seq.poly(j))[0][0];
            let exact = f(band.kernel(n, j).get(0, 0));
            assert!((num - exact).abs() < 1e-8, "C({n},{j}): {num} vs {exact}");
            let expect = if j + 1 == n { n as f64 } else { 0.0 };
            assert!((exact - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn laguerre_band_of_x_matches_quadrature() {
    let w = laguerre_2x2(&CRat::frac(1, 2), &CRat::frac(1, 3)).unwrap();
    let seq = MOPSequence::new(&w, 8).unwrap();
    let xop = DiffOp::scalar(RatFun::x(), 2);
    let band = band_representation(&xop, &seq, 5).unwrap();
    for n in 0..=5 {
        let px = xop.apply(&seq.poly(n)).unwrap();
        for j in 0..=6usize {
            if n.abs_diff(j) > 1 {
                assert!(band.kernel(n, j).is_zero());
                continue;
            }
            let ip = quad_inner(&w, &px, &seq.poly(j));
            // multiply by H(j)^{-1} in floating point
            let h = seq.norm(j).inverse().unwrap();
            let c = band.kernel(n, j);
            for a in 0..2 {
                for b in 0..2 {
                    let v: f64 = (0..2).map(|k| ip[a][k] * f(h.get(k, b))).sum();
                    let e = f(c.get(a, b));
                    assert!((v - e).abs() <= 1e-8 * e.abs().max(1.0), "C({n},{j})[{a}][{b}] {v} vs {e}");
                }
            }
        }
    }
}

#[test]
fn hermite_diagonal_form_matches_pointwise_product() {
    for a in [CRat::frac(2, 3), CRat::from_int(-2), CRat::frac(5, 7)] {
        let w = hermite_2x2(&a).unwrap();
        let half = &CRat::frac(1, 2) * &a;
        let ux = MatRF::from_rows(vec![
            vec![RatFun::constant(half.clone()), RatFun::from_poly(Poly::new(vec![CRat::zero(), -&(&half * &a)]))],
            vec![RatFun::zero(), RatFun::constant(half)],
        ])
        .unwrap();
        let dg = mopalg::structure::diagonalize_weight(&ux, &w).unwrap();
        assert!(dg.diagonal);
        let af = f(&a);
        for x in [-1.5, -0.3, 0.0, 0.8, 2.1] {
            let u = mat_at(&ux, x);
            let e = (-x * x).exp();
            let wm = [[e * (1.0 + af * af * x * x), e * af * x], [e * af * x, e]];
            let expect = af * af / 4.0 * e;
            for i in 0..2 {
                for j in 0..2 {
                    let mut v = 0.0;
                    for k in 0..2 {
                        for l in 0..2 {
                            v += u[i][k] * wm[k][l] * u[j][l];
                        }
                    }
                    let target = if i == j { expect } else { 0.0 };
                    assert!((v - target).abs() < 1e-12, "({i},{j}) at {x}: {v} vs {target}");
                    assert!((rf_at(dg.rational.get(i, j), x) * e - target).abs() < 1e-12);
                }
            }
        }
    }
}
