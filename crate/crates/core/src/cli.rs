//! The `mop` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::{CRat, Field, MatRF, RatFun};
use crate::catalog::{weight_by_name, ExampleKind, WEIGHT_NAMES};
use crate::error::{Error, Result};
use crate::fourier::{dw_membership, eval_lambda, fourier_image, lambda_text, Membership};
use crate::opalg::DiffOp;
use crate::reproduce::{params_text, reproduce, Options};
use crate::specio::{
    emit_report, parse_op, print_const_matrix, print_matrix, print_op, Certificate, Document, Format, ParseContext,
    Report, Status,
};
use crate::structure::{
    build_u, compute_vi, cyclic_generator, darboux_verify, diagonalize_weight, exceptional_degrees,
    membership_certificate, verify_orthogonal_system, Conjugacy, DarbouxData, Factorization, Intertwining,
    SequenceTransform,
};
use crate::weights::{jacobi_intertwiner, MOPSequence, ScalarKernel, Weight};

#[derive(Parser, Debug)]
#[command(name = "mop", about = "Exact matrix orthogonal polynomials and their differential operators")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Fmt::Json, global = true)]
    format: Fmt,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Fmt {
    Json,
    Text,
}

#[derive(Args, Debug, Clone, Default)]
struct Params {
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    e: Option<String>,
    /// Extra binding `name=p/q`, repeatable.
    #[arg(long = "param")]
    extra: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct WeightArgs {
    /// One of hermite, laguerre, jacobi, gegenbauer, hermite-2x2, laguerre-2x2, jacobi-2x2.
    #[arg(long)]
    weight: String,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Monic orthogonal polynomials, norms and recurrence coefficients.
    Mops {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Membership in D(W) and the eigenvalue matrix.
    CheckDw {
        #[command(flatten)]
        w: WeightArgs,
        /// Operator text or a path to a `.mop` file.
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 12)]
        nwin: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Formal W-adjoint of an operator.
    Adjoint {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 12)]
        nwin: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Certificates for an orthogonal system `V1, V2, ...` read from a document.
    Orthosystem {
        #[command(flatten)]
        w: WeightArgs,
        /// Document with entries V1, V2, ... and optional generators G1, G2, ...
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 12)]
        nwin: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Cyclic generators, U(x) and the diagonal form of the weight.
    Diagonalize {
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long)]
        system: String,
        #[arg(long = "order-cap", default_value_t = 6)]
        order_cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Verifies Darboux data read from a document, or the built-in Jacobi intertwiner.
    Darboux {
        #[command(flatten)]
        params: Params,
        /// Document with any of: h, d, dt; T, Tt, d1.., p1.., q, V1..; U, X, target1..
        #[arg(long)]
        data: Option<String>,
        /// Check the Jacobi intertwiner against both polynomial sequences.
        #[arg(long)]
        jacobi: bool,
        #[arg(long, default_value_t = 8)]
        nwin: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Degrees without a polynomial eigenfunction.
    Exceptional {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 25)]
        nmax: usize,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        common: Common,
    },
    /// End-to-end reproduction of a built-in example.
    Reproduce {
        #[arg(value_enum)]
        example: ExampleArg,
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        nwin: usize,
        #[arg(long = "order-cap", default_value_t = 6)]
        order_cap: usize,
        #[arg(long, default_value_t = 3)]
        specializations: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExampleArg {
    Hermite,
    Laguerre,
    Jacobi,
}

/// Parses an exact rational `p`, `-p` or `p/q`. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<CRat> {
    let bad = || Error::InvalidParameter(format!("`{s}` is not an exact rational (use p or p/q)"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: num_bigint::BigInt = n.parse().map_err(|_| bad())?;
    let d: num_bigint::BigInt = d.parse().map_err(|_| bad())?;
    if d == num_bigint::BigInt::from(0) {
        return Err(Error::DivisionByZero);
    }
    Ok(CRat::real(num_rational::BigRational::new(n, d)))
}

impl Params {
    fn bindings(&self) -> Result<BTreeMap<String, CRat>> {
        let mut out = BTreeMap::new();
        for (k, v) in [
            ("a", &self.a),
            ("b", &self.b),
            ("r", &self.r),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("e", &self.e),
        ] {
            if let Some(v) = v {
                out.insert(k.to_string(), parse_rational(v)?);
            }
        }
        for kv in &self.extra {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("--param expects name=value, got `{kv}`")))?;
            out.insert(k.trim().to_string(), parse_rational(v)?);
        }
        Ok(out)
    }
}

fn load_text(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(std::fs::read_to_string(p)?)
    } else {
        Ok(arg.to_string())
    }
}

fn load_op(arg: &str, ctx: &ParseContext) -> Result<DiffOp> {
    let text = load_text(arg)?;
    let doc = Document::parse(&text)?;
    let src = match doc.entries.as_slice() {
        [(_, only)] => only.clone(),
        _ => doc
            .get("op")
            .ok_or_else(|| Error::InvalidParameter("operator document needs an `op` entry".into()))?
            .to_string(),
    };
    parse_op(&src, ctx)
}

fn weight_of(w: &WeightArgs) -> Result<(Weight, BTreeMap<String, CRat>)> {
    let p = w.params.bindings()?;
    if !WEIGHT_NAMES.contains(&w.weight.as_str()) {
        return Err(Error::InvalidParameter(format!(
            "unknown weight `{}`; expected one of {}",
            w.weight,
            WEIGHT_NAMES.join(", ")
        )));
    }
    Ok((weight_by_name(&w.weight, &p)?, p))
}

fn weight_report(task: &str, w: &WeightArgs) -> Result<(Report, Weight, BTreeMap<String, CRat>)> {
    let (weight, p) = weight_of(w)?;
    let mut r = Report::new(task);
    r.input("weight", w.weight.clone());
    if !p.is_empty() {
        r.input("params", params_text(&p));
    }
    r.value("weight", format!("{}*{}", weight.kernel.formula(), print_matrix(&weight.factor, "x")));
    Ok((r, weight, p))
}

fn cmd_mops(w: &WeightArgs, nmax: usize) -> Result<Report> {
    let (mut r, weight, _) = weight_report("mops", w)?;
    r.input("nmax", nmax.to_string());
    let seq = MOPSequence::new(&weight, nmax + 1)?;
    let mut orth = true;
    let mut witness = String::from("0");
    for n in 0..=nmax {
        r.value(format!("P({n})"), print_matrix(&seq.poly(n), "x"));
        r.value(format!("H({n})"), print_const_matrix(seq.norm(n)));
        r.value(format!("B({n})"), print_const_matrix(&seq.b(n)));
        if n > 0 {
            r.value(format!("C({n})"), print_const_matrix(&seq.c(n)?));
        }
        for m in 0..n {
            let ip = seq.inner(&seq.coeffs[n], &seq.coeffs[m])?;
            if !ip.is_zero() && orth {
                orth = false;
                witness = format!("<P({n}),P({m})> = {ip}");
            }
        }
    }
    r.push(Certificate::check("orthogonality", orth, witness));
    let pos: Vec<usize> = (0..=nmax)
        .map(|n| seq.norm_is_positive(n).map(|ok| (n, ok)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n)
        .collect();
    let pos_text = if pos.is_empty() { "0".to_string() } else { format!("fails at {pos:?}") };
    r.push(Certificate::check("norms positive definite", pos.is_empty(), pos_text));
    let mut rec = true;
    let mut rec_w = String::from("0");
    for n in 1..nmax {
        let res = seq.recurrence_residual(n)?;
        if !res.is_zero() && rec {
            rec = false;
            rec_w = format!("n={n}: {}", print_matrix(&res, "x"));
        }
    }
    r.push(Certificate::check("three-term recurrence", rec, rec_w));
    Ok(r)
}

fn cmd_check_dw(w: &WeightArgs, op: &str, nwin: usize) -> Result<Report> {
    let (mut r, weight, p) = weight_report("check-dw", w)?;
    let d = load_op(op, &ParseContext::new(weight.size()).with_params(&p))?;
    r.input("op", print_op(&d));
    r.input("nwin", nwin.to_string());
    let seq = MOPSequence::new(&weight, nwin)?;
    let m = dw_membership(&d, &seq, nwin)?;
    r.push(membership_certificate("op in D(W)", &m));
    match &m {
        Membership::Accept { lambda, .. } => r.value("lambda", lambda_text(lambda)),
        Membership::Reject { n, residual, .. } => {
            r.value("witness.n", *n as u64);
            r.value("witness.residual", print_matrix(residual, "x"));
        }
    }
    Ok(r)
}

fn cmd_adjoint(w: &WeightArgs, op: &str, nwin: usize) -> Result<Report> {
    let (mut r, weight, p) = weight_report("adjoint", w)?;
    let d = load_op(op, &ParseContext::new(weight.size()).with_params(&p))?;
    r.input("op", print_op(&d));
    let dag = weight.dagger(&d)?;
    r.value("star", print_op(&d.star()));
    r.value("dagger", print_op(&dag));
    r.value("symmetric", dag == d);
    let back = weight.dagger(&dag)?;
    r.push(Certificate::check("dagger is an involution", back == d, print_op(&back.sub(&d))));
    let seq = MOPSequence::new(&weight, nwin)?;
    if dw_membership(&d, &seq, nwin)?.is_accept() {
        let l = fourier_image(&d)?;
        let ld = fourier_image(&dag)?;
        let mut ok = true;
        for n in 0..=nwin {
            let h = seq.norm(n);
            let expect = h.mul(&eval_lambda(&l, n).adjoint()).mul(&h.inverse()?);
            ok &= eval_lambda(&ld, n) == expect;
        }
        r.push(Certificate::check(
            "eigenvalue of the adjoint is H L* H^-1",
            ok,
            if ok { "0" } else { "mismatch on window" },
        ));
        r.value("dagger.lambda", lambda_text(&ld));
    }
    Ok(r)
}

fn doc_ops(doc: &Document, prefix: &str, ctx: &ParseContext) -> Result<Vec<DiffOp>> {
    let mut out = Vec::new();
    for k in 1.. {
        match doc.get(&format!("{prefix}{k}")) {
            Some(src) => out.push(parse_op(src, ctx)?),
            None => break,
        }
    }
    Ok(out)
}

fn cmd_orthosystem(w: &WeightArgs, system: &str, nwin: usize) -> Result<Report> {
    let (mut r, weight, p) = weight_report("orthosystem", w)?;
    let doc = Document::parse(&load_text(system)?)?;
    let ctx = ParseContext::new(weight.size()).with_params(&p);
    let vs = doc_ops(&doc, "V", &ctx)?;
    if vs.is_empty() {
        return Err(Error::InvalidParameter("system document needs V1, V2, ...".into()));
    }
    let gens = doc_ops(&doc, "G", &ctx)?;
    for (i, v) in vs.iter().enumerate() {
        r.input(format!("V{}", i + 1), print_op(v));
    }
    let bound = vs.iter().map(crate::fourier::degree_bound).max().unwrap_or(0);
    let n_win = nwin.max(bound);
    let seq = MOPSequence::new(&weight, n_win + 1)?;
    let sys = verify_orthogonal_system(&vs, &weight, &seq, n_win, &gens)?;
    for c in sys.certificates {
        r.push(c);
    }
    if let Some(c) = sys.central {
        r.push(Certificate::check(
            "sum is central",
            c,
            if c { "0" } else { "commutator with a generator is nonzero" },
        ));
    }
    for (i, l) in sys.lambdas.iter().enumerate() {
        r.value(format!("V{}.lambda", i + 1), lambda_text(l));
    }
    r.value("sum.lambda", lambda_text(&sys.sum_lambda));
    r.value("rank_lower_bound", sys.rank_lower_bound as u64);
    Ok(r)
}

fn cmd_diagonalize(w: &WeightArgs, system: &str, order_cap: usize) -> Result<Report> {
    let (mut r, weight, p) = weight_report("diagonalize", w)?;
    let doc = Document::parse(&load_text(system)?)?;
    let ctx = ParseContext::new(weight.size()).with_params(&p);
    let vs = doc_ops(&doc, "V", &ctx)?;
    if vs.len() != weight.size() {
        return Err(Error::InvalidParameter(format!("need V1..V{} for a weight of size {}", weight.size(), weight.size())));
    }
    let given = doc_ops(&doc, "u", &ParseContext::new(1).with_params(&p))?;
    let mut gens = Vec::new();
    for i in 0..vs.len() {
        let g = cyclic_generator(&vs, i, order_cap)?;
        r.value(format!("u{}.computed", i + 1), print_op(&g.u));
        gens.push(g.u);
    }
    let used = if given.len() == vs.len() { given } else { gens };
    let (_, ux) = build_u(&used)?;
    r.value("U", print_matrix(&ux, "x"));
    let dg = diagonalize_weight(&ux, &weight)?;
    r.push(Certificate::check("U W U* is diagonal", dg.diagonal, print_matrix(&dg.rational, "x")));
    r.value("R", format!("{}*{}", dg.kernel.formula(), print_matrix(&dg.rational, "x")));
    for (i, (u, v)) in used.iter().zip(&vs).enumerate() {
        r.value(format!("r{}", i + 1), dg.effective[i].clone());
        match compute_vi(u, v) {
            Ok(vi) => {
                r.value(format!("v{}", i + 1), print_op(&vi));
                r.push(Certificate::check(format!("v{0} u{0} = u{0} V{0}", i + 1), true, "0"));
            }
            Err(e) => r.push(Certificate::check(format!("v{0} u{0} = u{0} V{0}", i + 1), false, e.to_string())),
        }
    }
    Ok(r)
}

fn poly_coeffs(src: &str, p: &BTreeMap<String, CRat>) -> Result<Vec<CRat>> {
    let m = crate::specio::parse_matrix(src, &ParseContext::new(1).with_params(p).with_var("t"))?;
    let f: &RatFun = m.get(0, 0);
    if !f.is_polynomial() {
        return Err(Error::InvalidParameter(format!("`{src}` is not a polynomial in t")));
    }
    Ok(f.num().coeffs().to_vec())
}

fn cmd_darboux(params: &Params, data: Option<&str>, jacobi: bool, nwin: usize) -> Result<Report> {
    let p = params.bindings()?;
    let mut r = Report::new("darboux");
    if !p.is_empty() {
        r.input("params", params_text(&p));
    }
    let mut dd = DarbouxData::default();
    if let Some(path) = data {
        let doc = Document::parse(&load_text(path)?)?;
        let scalar = ParseContext::new(1).with_params(&p);
        if let (Some(h), Some(d), Some(dt)) = (doc.get("h"), doc.get("d"), doc.get("dt")) {
            dd.conjugacies.push(Conjugacy {
                name: "conjugacy".into(),
                h: parse_op(h, &scalar)?,
                d: parse_op(d, &scalar)?,
                d_tilde: parse_op(dt, &scalar)?,
            });
        }
        let us = doc_ops(&doc, "u", &scalar)?;
        if let Some(x) = doc.get("X") {
            let (uu, _) = build_u(&us)?;
            let n = us.len();
            dd.intertwinings.push(Intertwining {
                name: "U X = diag(targets) U".into(),
                x: parse_op(x, &ParseContext::new(n).with_params(&p))?,
                targets: doc_ops(&doc, "target", &scalar)?,
                u: uu,
            });
        }
        if let (Some(t), Some(tt), Some(q)) = (doc.get("T"), doc.get("Tt"), doc.get("q")) {
            let targets = doc_ops(&doc, "d", &scalar)?;
            let n = targets.len();
            let ctx = ParseContext::new(n).with_params(&p);
            let mut ps = Vec::new();
            for k in 1..=n {
                let src = doc
                    .get(&format!("p{k}"))
                    .ok_or_else(|| Error::InvalidParameter(format!("missing p{k}")))?;
                ps.push(poly_coeffs(src, &p)?);
            }
            dd.factorization = Some(Factorization {
                t: parse_op(t, &ctx)?,
                t_tilde: parse_op(tt, &ctx)?,
                system: doc_ops(&doc, "V", &ctx)?,
                targets,
                p: ps,
                q: poly_coeffs(q, &p)?,
            });
        }
    }
    if jacobi {
        let alpha = p.get("alpha").cloned().unwrap_or_else(|| CRat::frac(1, 2));
        let beta = p.get("beta").cloned().unwrap_or_else(|| CRat::frac(1, 3));
        let one = CRat::one();
        let up = Weight::scalar(ScalarKernel::jacobi(&alpha + &one, &beta + &one)?);
        let base = Weight::scalar(ScalarKernel::jacobi(alpha.clone(), beta.clone())?);
        dd.sequences.push(SequenceTransform {
            name: "jacobi intertwiner".into(),
            t: jacobi_intertwiner(&alpha, &beta),
            f: MatRF::identity(1),
            seq: MOPSequence::new(&up, nwin)?,
            seq_tilde: MOPSequence::new(&base, nwin + 1)?,
            shift: 1,
            n_win: nwin,
        });
        let (r1, r2) = crate::weights::intertwiner_residuals(&alpha, &beta);
        r.push(Certificate::check("e = dx t", r1.is_zero(), print_op(&r1)));
        r.push(Certificate::check("e(alpha+1,beta+1) - (alpha+beta+2) = t dx", r2.is_zero(), print_op(&r2)));
    }
    if dd.conjugacies.is_empty() && dd.intertwinings.is_empty() && dd.factorization.is_none() && dd.sequences.is_empty() {
        return Err(Error::InvalidParameter("nothing to verify: pass --data or --jacobi".into()));
    }
    for c in darboux_verify(&dd)? {
        r.push(c);
    }
    for s in &dd.sequences {
        for (n, c) in crate::structure::transform_coefficients(s)?.iter().enumerate() {
            r.value(format!("C({n})"), print_matrix(c, "x"));
        }
    }
    Ok(r)
}

fn cmd_exceptional(op: &str, nmax: usize, params: &Params) -> Result<Report> {
    let p = params.bindings()?;
    let d = load_op(op, &ParseContext::new(1).with_params(&p))?;
    let mut r = Report::new("exceptional");
    r.input("op", print_op(&d));
    r.input("nmax", nmax.to_string());
    let set = exceptional_degrees(&d, nmax)?;
    r.value(
        "exceptional_degrees",
        serde_json::Value::Array(set.iter().map(|&n| serde_json::Value::from(n as u64)).collect()),
    );
    Ok(r)
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::UnknownParameter(_) | Error::InvalidParameter(_) | Error::NonRectangular | Error::Io(_) => 2,
        Error::WindowTooSmall(_) | Error::EigenvalueUndetermined(_) | Error::NoGenerator(_) => 3,
        _ => 1,
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (result, common) = match &cli.cmd {
        Cmd::Mops { w, nmax, common } => (cmd_mops(w, *nmax), common),
        Cmd::CheckDw { w, op, nwin, common } => (cmd_check_dw(w, op, *nwin), common),
        Cmd::Adjoint { w, op, nwin, common } => (cmd_adjoint(w, op, *nwin), common),
        Cmd::Orthosystem { w, system, nwin, common } => (cmd_orthosystem(w, system, *nwin), common),
        Cmd::Diagonalize { w, system, order_cap, common } => (cmd_diagonalize(w, system, *order_cap), common),
        Cmd::Darboux { params, data, jacobi, nwin, common } => (cmd_darboux(params, data.as_deref(), *jacobi, *nwin), common),
        Cmd::Exceptional { op, nmax, params, common } => (cmd_exceptional(op, *nmax, params), common),
        Cmd::Reproduce { example, params, seed, nwin, order_cap, specializations, common } => {
            let kind = match example {
                ExampleArg::Hermite => ExampleKind::Hermite,
                ExampleArg::Laguerre => ExampleKind::Laguerre,
                ExampleArg::Jacobi => ExampleKind::Jacobi,
            };
            let opts = Options {
                n_win: *nwin,
                order_cap: *order_cap,
                specializations: *specializations,
                seed: *seed,
            };
            (params.bindings().and_then(|p| reproduce(kind, &p, &opts)), common)
        }
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let fmt = match common.format {
        Fmt::Json => Format::Json,
        Fmt::Text => Format::Text,
    };
    let bytes = emit_report(&report, fmt);
    let written = match &common.out {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(Error::from),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    for c in report.certificates.iter().filter(|c| c.status != Status::Pass) {
        eprintln!("[{}] {}: {}", c.status.as_str(), c.name, c.residual);
    }
    match report.status() {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Inconclusive => 3,
    }
}
