//! End-to-end runs of the built-in examples, one report per example.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{CRat, Field};
use crate::catalog::{Example, ExampleKind, HERMITE_REFERENCE_R};
use crate::error::{Error, Result};
use crate::fourier::{degree_bound, dw_membership, fourier_image, lambda_text};
use crate::specio::{print_matrix, print_op, Certificate, Report, Status};
use crate::structure::{
    adjoint_symmetry_checks, build_u, compute_vi, cyclic_generator, darboux_verify, diagonalize_weight,
    express_in_classical, left_unit_between, membership_certificate, verify_orthogonal_system, DarbouxData,
};
use crate::weights::MOPSequence;

/// Runtime knobs for a reproduction run.
#[derive(Clone, Debug)]
pub struct Options {
    pub n_win: usize,
    pub order_cap: usize,
    pub specializations: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            n_win: 12,
            order_cap: 6,
            specializations: 3,
            seed: 0,
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> CRat {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound);
    CRat::frac(num, den)
}

/// Bounds on the random numerators and denominators; small enough to keep
/// the moment recursions cheap.
pub const RANDOM_BOUND: i64 = 1000;

/// Parameter bindings: `explicit` values completed at random, then fully
/// random admissible bindings, `count` in total.
pub fn specializations(
    kind: ExampleKind,
    explicit: &BTreeMap<String, CRat>,
    seed: u64,
    count: usize,
) -> Result<Vec<BTreeMap<String, CRat>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |fixed: &BTreeMap<String, CRat>| -> Result<BTreeMap<String, CRat>> {
        for _ in 0..10_000 {
            let mut p = fixed.clone();
            for name in kind.params() {
                p.entry(name.to_string())
                    .or_insert_with(|| random_rational(&mut rng, RANDOM_BOUND));
            }
            if kind.admissible(&p) {
                return Ok(p);
            }
            if kind.params().iter().all(|n| fixed.contains_key(*n)) {
                break;
            }
        }
        Err(Error::InvalidParameter(format!(
            "no admissible {} parameters extend the given values",
            kind.name()
        )))
    };
    let mut out = Vec::new();
    if !explicit.is_empty() {
        out.push(draw(explicit)?);
    }
    while out.len() < count.max(1) {
        let p = draw(&BTreeMap::new())?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn params_text(p: &BTreeMap<String, CRat>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

fn coeffs_text(p: &[CRat]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match k {
            0 => format!("{c}"),
            1 => format!("({c})*t"),
            _ => format!("({c})*t^{k}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Reproduces one example at one binding and appends to `report`.
pub fn reproduce_one(ex: &Example, opts: &Options, tag: &str, report: &mut Report) -> Result<()> {
    // widen the window up to the degree bound so that acceptance is a proof
    let bound = ex
        .operators
        .iter()
        .map(|(_, d)| d)
        .chain(&ex.system)
        .map(degree_bound)
        .max()
        .unwrap_or(0);
    let n_win = opts.n_win.max(bound);
    let seq = MOPSequence::new(&ex.weight, n_win + 1)?;
    let pre = |s: &str| format!("{tag}.{s}");
    report.value(pre("params"), params_text(&ex.params));
    report.value(pre("nwin"), n_win as u64);

    // operators and their eigenvalues
    for (name, d) in &ex.operators {
        let m = dw_membership(d, &seq, n_win)?;
        report.push(membership_certificate(&format!("{tag}: {name} in D(W)"), &m));
        let lambda = fourier_image(d)?;
        report.value(pre(&format!("{name}.lambda")), lambda_text(&lambda));
        if let Some((_, printed)) = ex.reference_lambdas.iter().find(|(n, _)| n == name) {
            if printed != &lambda {
                report.note(format!(
                    "{tag}: reference eigenvalue of {name} is {} but the computed one is {}",
                    lambda_text(printed),
                    lambda_text(&lambda)
                ));
            }
        }
    }

    // orthogonal system
    let generators: Vec<_> = ex.operators.iter().map(|(_, d)| d.clone()).collect();
    let sys = verify_orthogonal_system(&ex.system, &ex.weight, &seq, n_win, &generators)?;
    for mut c in sys.certificates.clone() {
        c.name = format!("{tag}: {}", c.name);
        report.push(c);
    }
    report.value(pre("sum.lambda"), lambda_text(&sys.sum_lambda));
    report.value(pre("rank_lower_bound"), sys.rank_lower_bound as u64);
    if let Some(central) = sys.central {
        if ex.central_expected {
            report.push(Certificate::check(
                format!("{tag}: sum is central"),
                central,
                if central { "0" } else { "commutator with a generator is nonzero" },
            ));
        } else {
            report.value(pre("sum.central"), central);
            report.note(format!("{tag}: sum of the system central: {central}"));
        }
    }
    if let Some(printed) = &ex.reference_sum_lambda {
        if printed != &sys.sum_lambda {
            report.note(format!(
                "{tag}: reference eigenvalue of the sum is {} but the computed one is {}",
                lambda_text(printed),
                lambda_text(&sys.sum_lambda)
            ));
        }
    }

    // cyclic generators
    for i in 0..ex.system.len() {
        let g = cyclic_generator(&ex.system, i, opts.order_cap)?;
        let k = i + 1;
        report.value(pre(&format!("u{k}.computed")), print_op(&g.u));
        report.value(pre(&format!("u{k}.order")), g.order as u64);
        report.value(pre(&format!("u{k}.nullity")), g.nullity as u64);
        let minimal = g.order == 0 || cyclic_generator(&ex.system, i, g.order - 1).is_err();
        report.push(Certificate::check(
            format!("{tag}: u{k} has minimal order"),
            minimal,
            if minimal { "0" } else { "a solution of lower order exists" },
        ));
        let unit = left_unit_between(&g.u, &ex.reference_generators[i]);
        report.push(Certificate::check(
            format!("{tag}: u{k} matches the reference generator up to a left unit"),
            unit.is_some(),
            if unit.is_some() { "0".to_string() } else { print_op(&ex.reference_generators[i]) },
        ));
        if let Some(u) = unit {
            report.value(pre(&format!("u{k}.unit")), u.to_string());
        }
    }

    // diagonalization with the reference normalization
    let (_, ux) = build_u(&ex.reference_generators)?;
    report.value(pre("U"), print_matrix(&ux, "x"));
    report.push(Certificate::check(
        format!("{tag}: U(x) equals the reference matrix"),
        ux == ex.reference_u,
        print_matrix(&ux.sub(&ex.reference_u), "x"),
    ));
    let dg = diagonalize_weight(&ux, &ex.weight)?;
    report.push(Certificate::check(
        format!("{tag}: U W U* is diagonal"),
        dg.diagonal,
        print_matrix(&dg.rational, "x"),
    ));
    report.value(pre("R"), format!("{}*{}", dg.kernel.formula(), print_matrix(&dg.rational, "x")));
    for (i, e) in dg.effective.iter().enumerate() {
        report.value(pre(&format!("r{}", i + 1)), e.clone());
    }
    if ex.kind == ExampleKind::Hermite {
        report.note(format!(
            "{tag}: reference diagonal form is {HERMITE_REFERENCE_R}; the product U W U* gives exp(-x^2) times {}",
            print_matrix(&dg.rational, "x")
        ));
    }

    // eigenvalue operators, classical expression and symmetry checks
    for (i, v_op) in ex.system.iter().enumerate() {
        let k = i + 1;
        let u = &ex.reference_generators[i];
        let v = compute_vi(u, v_op)?;
        report.value(pre(&format!("v{k}")), print_op(&v));
        match express_in_classical(&v, &ex.classical) {
            Ok(p) => {
                report.value(pre(&format!("p{k}")), coeffs_text(&p));
                report.push(Certificate::check(format!("{tag}: v{k} is a polynomial in d"), true, "0"));
            }
            Err(e) => report.push(Certificate::check(format!("{tag}: v{k} is a polynomial in d"), false, e.to_string())),
        }
        let (certs, rho) = adjoint_symmetry_checks(u, &v, &ex.weight, &format!("{tag}: v{k}"))?;
        for c in certs {
            report.push(c);
        }
        report.value(pre(&format!("b{k}.lead")), format!("{}*({})", ex.weight.kernel.formula(), rho));
    }

    // intertwining identities
    let printed = darboux_verify(&DarbouxData {
        intertwinings: ex.reference_intertwinings.clone(),
        ..Default::default()
    })?;
    let corrected = darboux_verify(&DarbouxData {
        intertwinings: ex.corrected_intertwinings.clone(),
        ..Default::default()
    })?;
    for c in &printed {
        if c.status != Status::Pass {
            report.note(format!("{tag}: reference identity {} does not hold; residual {}", c.name, c.residual));
        }
    }
    for mut c in corrected {
        c.name = format!("{tag}: {}", c.name);
        report.push(c);
    }
    Ok(())
}

/// Full reproduction report over several parameter bindings.
pub fn reproduce(kind: ExampleKind, explicit: &BTreeMap<String, CRat>, opts: &Options) -> Result<Report> {
    let mut report = Report::new(format!("reproduce {}", kind.name()));
    report.input("example", kind.name());
    report.input("nwin", opts.n_win.to_string());
    report.input("order_cap", opts.order_cap.to_string());
    report.input("seed", opts.seed.to_string());
    if !explicit.is_empty() {
        report.input("params", params_text(explicit));
    }
    let specs = specializations(kind, explicit, opts.seed, opts.specializations)?;
    let examples: Vec<Example> = specs.iter().map(|p| Example::build(kind, p)).collect::<Result<_>>()?;
    let parts = crate::parallel::map(examples.into_iter().enumerate().collect(), |(i, ex)| {
        let mut r = Report::new("");
        reproduce_one(&ex, opts, &format!("s{}", i + 1), &mut r).map(|_| r)
    });
    for part in parts {
        let part = part?;
        report.certificates.extend(part.certificates);
        report.values.extend(part.values);
        report.notes.extend(part.notes);
    }
    Ok(report)
}
