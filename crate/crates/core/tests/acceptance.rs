//! Acceptance suite. Prints one line per criterion and per literal check of a
//! reference value, then exits nonzero if any corrected fact fails.
//!
//! Literal checks compare against reference displays that are known to be in
//! error; their FAIL lines are expected and do not affect the exit code.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use mopalg::arith::{CRat, MatC, MatRF, RatFun};
use mopalg::catalog::{weight_by_name, Example, ExampleKind, EXCEPTIONAL_CORRECTED_SOURCE, EXCEPTIONAL_SOURCE, WEIGHT_NAMES};
use mopalg::fourier::{
    band_representation, build_l, degree_bound, dw_membership, eval_lambda, fourier_image, left_fourier_test,
    FourierTest, Membership,
};
use mopalg::opalg::DiffOp;
use mopalg::reproduce::{specializations, RANDOM_BOUND};
use mopalg::specio::{parse_matrix, parse_op, ParseContext, Status};
use mopalg::structure::{
    cyclic_generator, darboux_verify, diagonalize_weight, exceptional_degrees, left_unit_between,
    verify_orthogonal_system, build_u, DarbouxData,
};
use mopalg::weights::{intertwiner_residuals, MOPSequence, ScalarKernel, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240;
const SPECS: usize = 3;

/// Collects failures for one criterion.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
}

impl Check {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

struct Suite {
    corrected_failed: bool,
}

impl Suite {
    fn criterion(&mut self, label: &str, f: impl FnOnce(&mut Check)) {
        let t = Instant::now();
        let mut c = Check::default();
        f(&mut c);
        let ms = t.elapsed().as_millis();
        if c.failures.is_empty() {
            println!("PASS  {label}  ({ms} ms)");
        } else {
            self.corrected_failed = true;
            println!("FAIL  {label}  ({ms} ms)");
            for m in c.failures.iter().take(5) {
                println!("        {m}");
            }
        }
    }

    /// A comparison against a reference display; reported but never fatal.
    fn literal(&mut self, label: &str, ok: bool, detail: &str) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let mut detail = detail.to_string();
        if detail.len() > 100 {
            detail.truncate(detail.char_indices().nth(100).map_or(detail.len(), |(i, _)| i));
            detail.push_str("...");
        }
        println!("{tag}  {label}  [literal]{}", if ok { String::new() } else { format!("  {detail}") });
    }
}

fn examples(kind: ExampleKind) -> Vec<Example> {
    let mut explicit = BTreeMap::new();
    if kind == ExampleKind::Hermite {
        explicit.insert("a".to_string(), CRat::frac(2, 3));
    }
    specializations(kind, &explicit, SEED, SPECS)
        .unwrap()
        .iter()
        .map(|p| Example::build(kind, p).unwrap())
        .collect()
}

fn window(ex: &Example) -> usize {
    ex.operators.iter().map(|(_, d)| d).chain(&ex.system).map(degree_bound).max().unwrap_or(0).max(12)
}

fn lam(src: &str, ex: &Example) -> MatRF {
    parse_matrix(src, &ParseContext::new(2).with_params(&ex.params).with_var("n")).unwrap()
}

fn certified_lambda(c: &mut Check, ex: &Example, name: &str, d: &DiffOp, seq: &MOPSequence, n_win: usize) -> Option<MatRF> {
    match dw_membership(d, seq, n_win).unwrap() {
        Membership::Accept { lambda, certified, .. } => {
            c.expect(certified, || format!("{name} accepted below the degree bound at {:?}", ex.params));
            Some(lambda)
        }
        Membership::Reject { n, .. } => {
            c.expect(false, || format!("{name} rejected at n={n} for {:?}", ex.params));
            None
        }
    }
}

fn reference(ex: &Example, name: &str) -> MatRF {
    ex.reference_lambdas.iter().find(|(n, _)| n == name).unwrap().1.clone()
}

fn intertwinings_hold(c: &mut Check, ex: &Example, list: &[mopalg::structure::Intertwining]) {
    let certs = darboux_verify(&DarbouxData {
        intertwinings: list.to_vec(),
        ..Default::default()
    })
    .unwrap();
    for cert in certs {
        c.expect(cert.status == Status::Pass, || format!("{} at {:?}: {}", cert.name, ex.params, cert.residual));
    }
}

fn reference_identity_holds(ex: &Example, name_prefix: &str) -> (bool, String) {
    let list: Vec<_> = ex.reference_intertwinings.iter().filter(|i| i.name.starts_with(name_prefix)).cloned().collect();
    let certs = darboux_verify(&DarbouxData {
        intertwinings: list,
        ..Default::default()
    })
    .unwrap();
    let bad: Vec<_> = certs.iter().filter(|c| c.status != Status::Pass).map(|c| c.residual.clone()).collect();
    (bad.is_empty(), format!("residual {}", bad.join("; ")))
}

fn system_checks(c: &mut Check, ex: &Example, seq: &MOPSequence, n_win: usize) -> mopalg::structure::OrthSystem {
    let gens: Vec<_> = ex.operators.iter().map(|(_, d)| d.clone()).collect();
    let sys = verify_orthogonal_system(&ex.system, &ex.weight, seq, n_win, &gens).unwrap();
    for cert in &sys.certificates {
        c.expect(cert.status == Status::Pass, || format!("{} at {:?}: {}", cert.name, ex.params, cert.residual));
    }
    let (v1, v2) = (&ex.system[0], &ex.system[1]);
    c.expect(v1.mul(v2).is_zero() && v2.mul(v1).is_zero(), || format!("V1V2 != 0 at {:?}", ex.params));
    sys
}

fn generators_match(c: &mut Check, ex: &Example) {
    for i in 0..ex.system.len() {
        let g = cyclic_generator(&ex.system, i, 6).unwrap();
        c.expect(left_unit_between(&g.u, &ex.reference_generators[i]).is_some(), || {
            format!("u{} differs from the reference generator at {:?}", i + 1, ex.params)
        });
    }
    let (_, ux) = build_u(&ex.reference_generators).unwrap();
    c.expect(ux == ex.reference_u, || format!("U(x) mismatch at {:?}", ex.params));
}

fn hermite(s: &mut Suite) {
    let exs = examples(ExampleKind::Hermite);
    let mut reference_r_ok = true;
    s.criterion("1 Hermite-type example", |c| {
        for ex in &exs {
            let n_win = window(ex);
            let seq = MOPSequence::new(&ex.weight, n_win + 1).unwrap();
            for (name, d) in &ex.operators {
                if let Some(l) = certified_lambda(c, ex, name, d, &seq, n_win) {
                    c.expect(l == reference(ex, name), || format!("Lambda of {name} differs at {:?}", ex.params));
                }
            }
            system_checks(c, ex, &seq, n_win);
            generators_match(c, ex);
            let dg = diagonalize_weight(&ex.reference_u, &ex.weight).unwrap();
            let a = ex.param("a");
            let expect = MatRF::identity(2).scale(&RatFun::constant(&(&a * &a) / &CRat::from_int(4)));
            c.expect(dg.diagonal && dg.rational == expect, || format!("U W U* rational part wrong at {:?}", ex.params));
            c.expect(dg.kernel == ScalarKernel::hermite(), || "kernel of U W U* is not exp(-x^2)".into());
            // the reference display carries exp(+x^2), which is not the kernel of any product here
            reference_r_ok &= dg.kernel.formula() == "exp(x^2)";
            intertwinings_hold(c, ex, &ex.reference_intertwinings);
        }
    });
    s.literal(
        "1 Hermite-type: reference R(x) = (a^2/4) exp(x^2) I",
        reference_r_ok,
        "the product U W U* equals (a^2/4) exp(-x^2) I",
    );
}

fn laguerre(s: &mut Suite) {
    let exs = examples(ExampleKind::Laguerre);
    let mut literal_d = true;
    let mut literal_d1 = true;
    let mut literal_sum = true;
    s.criterion("2 Laguerre-type example", |c| {
        for ex in &exs {
            let n_win = window(ex);
            let seq = MOPSequence::new(&ex.weight, n_win + 1).unwrap();
            for (name, d) in &ex.operators {
                let Some(l) = certified_lambda(c, ex, name, d, &seq, n_win) else { continue };
                let matches = l == reference(ex, name);
                match name.as_str() {
                    "D" => {
                        literal_d &= matches;
                        let want = lam("[[-n-1, a*(2*n+b+1)],[0,-n]]", ex);
                        c.expect(l == want, || format!("Lambda of D is {l:?} at {:?}", ex.params));
                        // the diagonal agrees with the reference display
                        let p = reference(ex, name);
                        c.expect(l.get(0, 0) == p.get(0, 0) && l.get(1, 1) == p.get(1, 1), || "diagonal of Lambda_D".into());
                    }
                    "D1" => {
                        literal_d1 &= matches;
                        let want = lam(
                            "[[0, a*(b+1)+(a^3*b^2+a^3*b+2*a)*n+(3*a^3*b+a^3)*n^2+2*a^3*n^3],[0, 1+a^2*b*n+a^2*n^2]]",
                            ex,
                        );
                        c.expect(l == want, || format!("Lambda of D1 at {:?}", ex.params));
                    }
                    _ => c.expect(matches, || format!("Lambda of {name} differs at {:?}", ex.params)),
                }
            }
            let sys = system_checks(c, ex, &seq, n_win);
            c.expect(sys.central == Some(true), || "sum of the system is not central".into());
            if let Some(p) = &ex.reference_sum_lambda {
                literal_sum &= p == &sys.sum_lambda;
                c.expect(p.get(1, 1) == sys.sum_lambda.get(1, 1), || "(2,2) entry of the sum eigenvalue".into());
            }
            generators_match(c, ex);
            intertwinings_hold(c, ex, &ex.reference_intertwinings);
        }
    });
    s.literal("2 Laguerre-type: reference Lambda_D(n) = diag(-n-1, -n)", literal_d, "computed (1,2) entry is a(2n+b+1)");
    s.literal("2 Laguerre-type: reference Lambda_D1(n)", literal_d1, "computed constant in the (1,2) entry is a(b+1), not a");
    s.literal("2 Laguerre-type: reference eigenvalue of V1+V2 as a scalar", literal_sum, "it agrees with the (2,2) entry only");
}

fn jacobi(s: &mut Suite) {
    let exs = examples(ExampleKind::Jacobi);
    let mut literal_v1 = (true, String::new());
    let mut literal_v2 = (true, String::new());
    s.criterion("3 Jacobi-type example", |c| {
        for ex in &exs {
            let n_win = window(ex);
            let seq = MOPSequence::new(&ex.weight, n_win + 1).unwrap();
            for (name, d) in &ex.operators {
                if let Some(l) = certified_lambda(c, ex, name, d, &seq, n_win) {
                    c.expect(l == reference(ex, name), || format!("Lambda of {name} differs at {:?}", ex.params));
                }
            }
            let sys = system_checks(c, ex, &seq, n_win);
            c.expect(sys.central == Some(true), || format!("sum not central at {:?}", ex.params));
            c.expect(Some(&sys.sum_lambda) == ex.reference_sum_lambda.as_ref(), || "sum eigenvalue differs".into());
            generators_match(c, ex);
            intertwinings_hold(c, ex, &ex.corrected_intertwinings);
            for (slot, prefix) in [(&mut literal_v1, "U V1"), (&mut literal_v2, "U V2")] {
                let (ok, detail) = reference_identity_holds(ex, prefix);
                slot.0 &= ok;
                if !ok && slot.1.is_empty() {
                    slot.1 = detail;
                }
            }
        }
    });
    s.literal("3 Jacobi-type: reference U V1 = diag(e1, 0) U", literal_v1.0, &literal_v1.1);
    s.literal("3 Jacobi-type: reference U V2 = diag(0, e2) U", literal_v2.0, &literal_v2.1);
}

fn rand_rat(rng: &mut ChaCha8Rng) -> CRat {
    CRat::frac(rng.gen_range(-RANDOM_BOUND..=RANDOM_BOUND), rng.gen_range(1..=RANDOM_BOUND))
}

/// Three admissible bindings for each registered weight.
fn registered_weights() -> Vec<(String, Weight)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for name in WEIGHT_NAMES {
        let mut found = 0;
        while found < SPECS {
            let p: BTreeMap<String, CRat> =
                ["a", "b", "r", "alpha", "beta", "e"].iter().map(|k| (k.to_string(), rand_rat(&mut rng))).collect();
            if let Ok(w) = weight_by_name(name, &p) {
                out.push((format!("{name} {}", mopalg::reproduce::params_text(&p)), w));
                found += 1;
            }
        }
    }
    out
}

fn orthogonality(s: &mut Suite) {
    s.criterion("4 orthogonality suite", |c| {
        let ws = registered_weights();
        let results = mopalg::parallel::map(ws, |(label, w)| {
            let mut fails = Vec::new();
            let seq = MOPSequence::new(&w, 9).unwrap();
            for n in 0..=8 {
                for m in 0..n {
                    if !seq.inner(&seq.coeffs[n], &seq.coeffs[m]).unwrap().is_zero() {
                        fails.push(format!("{label}: <P({n}),P({m})> != 0"));
                    }
                }
                if !seq.norm_is_positive(n).unwrap() {
                    fails.push(format!("{label}: H({n}) not positive definite"));
                }
                if !seq.recurrence_residual(n).unwrap().is_zero() {
                    fails.push(format!("{label}: recurrence residual at n={n}"));
                }
            }
            fails
        });
        for f in results.into_iter().flatten() {
            c.expect(false, || f);
        }
    });
}

fn random_op(rng: &mut ChaCha8Rng, size: usize) -> DiffOp {
    let order = rng.gen_range(0..=3usize);
    let terms = (0..=order)
        .map(|_| {
            MatRF::from_fn(size, size, |_, _| {
                let deg = rng.gen_range(0..=2usize);
                let cs: Vec<CRat> = (0..=deg).map(|_| CRat::frac(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect();
                RatFun::from_poly(mopalg::arith::Poly::new(cs))
            })
        })
        .collect();
    DiffOp::from_terms(size, size, terms)
}

fn all_examples() -> Vec<Example> {
    ExampleKind::ALL.iter().flat_map(|&k| examples(k)).collect()
}

fn adjoint(s: &mut Suite) {
    s.criterion("5 adjoint suite", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
        let jobs: Vec<(String, Weight, Vec<DiffOp>)> = registered_weights()
            .into_iter()
            .step_by(SPECS)
            .map(|(l, w)| {
                let ops = (0..50).map(|_| random_op(&mut rng, w.size())).collect();
                (l, w, ops)
            })
            .collect();
        let fails = mopalg::parallel::map(jobs, |(label, w, ops)| {
            ops.iter()
                .filter(|d| w.dagger(&w.dagger(d).unwrap()).unwrap() != **d)
                .map(|_| format!("{label}: dagger is not involutive"))
                .collect::<Vec<_>>()
        });
        for f in fails.into_iter().flatten() {
            c.expect(false, || f);
        }

        for ex in all_examples() {
            let seq = MOPSequence::new(&ex.weight, 9).unwrap();
            for (name, d) in &ex.operators {
                let ld = fourier_image(d).unwrap();
                let dd = ex.weight.dagger(d).unwrap();
                let ldd = match fourier_image(&dd) {
                    Ok(l) => l,
                    Err(e) => {
                        c.expect(false, || format!("{name}+ has no eigenvalue: {e}"));
                        continue;
                    }
                };
                for n in 0..=8 {
                    let h: &MatC = seq.norm(n);
                    let rhs = h.mul(&eval_lambda(&ld, n).adjoint()).mul(&h.inverse().unwrap());
                    c.expect(eval_lambda(&ldd, n) == rhs, || {
                        format!("{:?} {name}: Lambda of the adjoint at n={n}", ex.kind)
                    });
                }
            }
        }

        let kernels = [
            ScalarKernel::hermite(),
            ScalarKernel::laguerre(CRat::frac(3, 7)).unwrap(),
            ScalarKernel::jacobi(CRat::frac(-1, 2), CRat::frac(5, 3)).unwrap(),
            ScalarKernel::gegenbauer(CRat::frac(2, 9)).unwrap(),
        ];
        for k in kernels {
            let d = k.classical_operator();
            let w = Weight::scalar(k.clone());
            c.expect(w.dagger(&d).unwrap() == d, || format!("classical operator of {} is not self-adjoint", k.name()));
        }
    });
}

fn fourier_algebra(s: &mut Suite) {
    s.criterion("6 Fourier-algebra suite", |c| {
        let fails = mopalg::parallel::map(all_examples(), |ex| {
            let mut fails = Vec::new();
            let n_win = 14;
            let seq = MOPSequence::new(&ex.weight, n_win + 1).unwrap();
            let l = build_l(&seq).unwrap();
            let x = DiffOp::scalar(RatFun::x(), 2);
            for (name, d) in ex.operators.iter().cloned().chain(
                ex.system.iter().enumerate().map(|(i, v)| (format!("V{}", i + 1), v.clone())),
            ) {
                let order = d.order().unwrap_or(0);
                let band = band_representation(&d, &seq, n_win).unwrap();
                let width = band.forward_band().max(band.backward_band());
                if width > d.max_coeff_degree() {
                    fails.push(format!("{:?} {name}: band width {width}", ex.kind));
                }
                match left_fourier_test(&band, &l, order).unwrap() {
                    FourierTest::Accept { k, .. } if k <= order => {}
                    other => fails.push(format!("{:?} {name}: left Fourier test {other:?}", ex.kind)),
                }
                if !x.ad_power(&d, order + 1).unwrap().is_zero() {
                    fails.push(format!("{:?} {name}: Ad_x^(ord+1) is nonzero", ex.kind));
                }
            }
            fails
        });
        for f in fails.into_iter().flatten() {
            c.expect(false, || f);
        }
    });
}

fn exceptional(s: &mut Suite) {
    let ctx = ParseContext::new(1);
    let want: BTreeSet<usize> = [1, 2].into_iter().collect();
    let printed = exceptional_degrees(&parse_op(EXCEPTIONAL_SOURCE, &ctx).unwrap(), 25).unwrap();
    s.literal(
        "7 exceptional degrees of the reference operator are {1,2}",
        printed == want,
        &format!("only constants are eigenpolynomials; missing degrees {:?}", printed.iter().take(6).collect::<Vec<_>>()),
    );
    s.criterion("7 exceptional degrees {1,2} for n_max = 25", |c| {
        let got = exceptional_degrees(&parse_op(EXCEPTIONAL_CORRECTED_SOURCE, &ctx).unwrap(), 25).unwrap();
        c.expect(got == want, || format!("got {got:?}"));
    });
}

fn intertwiner(s: &mut Suite) {
    s.criterion("8 Jacobi intertwiner identities", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
        for _ in 0..SPECS {
            let (alpha, beta) = (rand_rat(&mut rng), rand_rat(&mut rng));
            let (r1, r2) = intertwiner_residuals(&alpha, &beta);
            c.expect(r1.is_zero() && r2.is_zero(), || format!("residual at alpha={alpha}, beta={beta}"));
        }
    });
}

fn main() {
    // `cargo test -- --list` and filters are accepted but ignored
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let t = Instant::now();
    let mut s = Suite { corrected_failed: false };
    hermite(&mut s);
    laguerre(&mut s);
    jacobi(&mut s);
    orthogonality(&mut s);
    adjoint(&mut s);
    fourier_algebra(&mut s);
    exceptional(&mut s);
    intertwiner(&mut s);
    println!("acceptance finished in {:.1} s", t.elapsed().as_secs_f64());
    if s.corrected_failed {
        std::process::exit(1);
    }
}
