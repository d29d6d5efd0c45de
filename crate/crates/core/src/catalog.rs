//! Built-in 2×2 examples: weights, operators, reference eigenvalues and
//! the orthogonal-system data attached to each.

use std::collections::BTreeMap;

use crate::arith::{CRat, Field, MatRF};
use crate::error::{Error, Result};
use crate::fourier::EigenvalueMatrix;
use crate::opalg::DiffOp;
use crate::specio::{parse_matrix, parse_op, ParseContext};
use crate::structure::Intertwining;
use crate::weights::{hermite_2x2, jacobi_2x2, laguerre_2x2, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExampleKind {
    Hermite,
    Laguerre,
    Jacobi,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 3] = [ExampleKind::Hermite, ExampleKind::Laguerre, ExampleKind::Jacobi];

    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::Hermite => "hermite",
            ExampleKind::Laguerre => "laguerre",
            ExampleKind::Jacobi => "jacobi",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn weight_name(self) -> &'static str {
        match self {
            ExampleKind::Hermite => "hermite-2x2",
            ExampleKind::Laguerre => "laguerre-2x2",
            ExampleKind::Jacobi => "jacobi-2x2",
        }
    }

    /// Parameter names in declaration order.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            ExampleKind::Hermite => &["a"],
            ExampleKind::Laguerre => &["a", "b"],
            ExampleKind::Jacobi => &["a", "r"],
        }
    }

    /// Whether a full parameter binding lies inside the admissible region.
    pub fn admissible(self, p: &BTreeMap<String, CRat>) -> bool {
        let get = |k: &str| p.get(k).cloned();
        match self {
            ExampleKind::Hermite => get("a").is_some_and(|a| !a.is_zero() && a.is_real()),
            ExampleKind::Laguerre => match (get("a"), get("b")) {
                (Some(a), Some(b)) => {
                    !a.is_zero() && a.is_real() && (&b + &CRat::one()).is_positive_real()
                }
                _ => false,
            },
            ExampleKind::Jacobi => match (get("a"), get("r")) {
                (Some(a), Some(r)) => a.is_positive_real() && (&r - &a).is_positive_real(),
                _ => false,
            },
        }
    }
}

/// Builds a registered weight by name.
pub fn weight_by_name(name: &str, p: &BTreeMap<String, CRat>) -> Result<Weight> {
    let need = |k: &str| {
        p.get(k)
            .cloned()
            .ok_or_else(|| Error::InvalidParameter(format!("weight {name} needs --{k}")))
    };
    use crate::weights::ScalarKernel;
    match name {
        "hermite" => Ok(Weight::scalar(ScalarKernel::hermite())),
        "laguerre" => Ok(Weight::scalar(ScalarKernel::laguerre(need("b")?)?)),
        "jacobi" => Ok(Weight::scalar(ScalarKernel::jacobi(need("alpha")?, need("beta")?)?)),
        "gegenbauer" => Ok(Weight::scalar(ScalarKernel::gegenbauer(need("e")?)?)),
        "hermite-2x2" => hermite_2x2(&need("a")?),
        "laguerre-2x2" => laguerre_2x2(&need("a")?, &need("b")?),
        "jacobi-2x2" => jacobi_2x2(&need("a")?, &need("r")?),
        _ => Err(Error::InvalidParameter(format!("unknown weight {name}"))),
    }
}

pub const WEIGHT_NAMES: [&str; 7] = [
    "hermite",
    "laguerre",
    "jacobi",
    "gegenbauer",
    "hermite-2x2",
    "laguerre-2x2",
    "jacobi-2x2",
];

/// Operator texts for each example, in DSL syntax.
pub fn operator_sources(kind: ExampleKind) -> &'static [(&'static str, &'static str)] {
    match kind {
        ExampleKind::Hermite => &[
            ("D1", "dx^2*[[1,0],[0,1]] + dx*[[-2*x,2*a],[0,-2*x]] + [[-2,0],[0,0]]"),
            ("D2", "dx^2*[[-a^2/4, a^3*x/4],[0,0]] + dx*[[0,a/2],[-a/2,a^2*x/2]] + [[0,0],[0,1]]"),
            (
                "D3",
                "dx^2*[[-a^2*x/2, a^3*x^2/2],[-a/2, a^2*x/2]] + dx*[[-(a^2+1), a*(a^2+2)*x],[0,1]] + [[0,(a^2+2)/a],[0,0]]",
            ),
            (
                "D4",
                "dx^2*[[-a^3*x/4, a^2*(a^2*x^2-1)/4],[-a^2/4, a^3*x/4]] + dx*[[-a^3/2, a^2*(a^2+2)*x/2],[0,0]] + [[0,(a^2+2)/2],[1,0]]",
            ),
        ],
        ExampleKind::Laguerre => &[
            ("D", "dx^2*x*I + dx*[[1+b-x,2*a*x],[0,1+b-x]] + [[-1,a*(b+1)],[0,0]]"),
            (
                "D1",
                "[[dx^4*a^2*x^2 + dx^3*2*a^2*((b+2)*x-x^2) + dx^2*a^2*((b+1)*(b+2)-(3*b+7)*x) - dx*a^2*(b+1)*(b+3), \
                 -dx^4*a^3*x^3 + dx^3*a^3*x^2*(2*x-2*(b+2)) + dx^2*a*x*(a^2*(3*b+7)*x-a^2*(b+1)*(b+2)-1) + dx*a*(a^2*x*(b+1)*(b+3)+2*x-b-1) + a*(b+1)], \
                 [-dx^2*a*x - dx*a*(b+1), dx^2*a^2*x^2 + dx*a^2*x*(b+1) + 1]]",
            ),
            (
                "D2",
                "[[dx^2*a^2*x^2 + dx*a^2*x*(b+3) + a^2*(b+1)+1, \
                 dx^4*a^3*x^3 + dx^3*2*a^3*x^2*(b+4-x) + dx^2*a*x*(a^2*(b+7)*(b+2)+1-a^2*x*(3*b+11)) + dx*a*(2*a^2*(b+1)*(b+2)+b+1-(a^2*(b^2+8*b+11)+2)*x) - a*(b+1)*(a^2*(b+1)+1)], \
                 [dx^2*a*x + dx*a*(b+1), dx^4*a^2*x^2 + dx^3*2*a^2*x*(b+2-x) + dx^2*a^2*((b+1)*(b+2)-(3*b+5)*x) - dx*a^2*(b+1)^2]]",
            ),
        ],
        ExampleKind::Jacobi => &[
            ("D1", "dx^2*[[x^2,x],[-x,-1]] + dx*[[(r+2)*x, r-a+2],[-a,0]] + [[a*(r-a+1),0],[0,0]]"),
            ("D2", "dx^2*[[-1,-x],[x,x^2]] + dx*[[0,a-r],[a+2,(r+2)*x]] + [[0,0],[0,(a+1)*(r-a)]]"),
            ("D3", "dx^2*[[-x,-1],[x^2,x]] + dx*[[-a,0],[2*(a+1)*x,a+2]] + [[0,0],[a*(a+1),0]]"),
            ("D4", "dx^2*[[x,x^2],[-1,-x]] + dx*[[r-a+2,2*(r-a+1)*x],[0,a-r]] + [[0,(r-a)*(r-a+1)],[0,0]]"),
        ],
    }
}

/// Reference eigenvalue matrices, keyed like [`operator_sources`].
pub fn reference_lambda_sources(kind: ExampleKind) -> &'static [(&'static str, &'static str)] {
    match kind {
        ExampleKind::Hermite => &[
            ("D1", "[[-2*n-2,0],[0,-2*n]]"),
            ("D2", "[[0,0],[0,(a^2*n+2)/2]]"),
            ("D3", "[[0,(a^2*n+2)*(a^2*n+a^2+2)/(2*a)],[0,0]]"),
            ("D4", "[[0,(a^2*n+2)*(a^2*n+a^2+2)/4],[1,0]]"),
        ],
        ExampleKind::Laguerre => &[
            ("D", "[[-n-1,0],[0,-n]]"),
            ("D1", "[[0, a+(a^3*b^2+a^3*b+2*a)*n+(3*a^3*b+a^3)*n^2+2*a^3*n^3],[0, 1+a^2*b*n+a^2*n^2]]"),
            (
                "D2",
                "[[a^2*b+a^2+1+(a^2*b+2*a^2)*n+a^2*n^2, -a^3*(b+1)^2-a*(b+1)-a*(a^2*(b+4)*(b+1)+2)*n-a^3*(3*b+5)*n^2-2*a^3*n^3],[0,0]]",
            ),
        ],
        ExampleKind::Jacobi => &[
            ("D1", "[[(n+a)*(n+r-a+1),0],[0,0]]"),
            ("D2", "[[0,0],[0,(n+a+1)*(n+r-a)]]"),
            ("D3", "[[0,0],[(n+a)*(n+a+1),0]]"),
            ("D4", "[[0,(n+r-a)*(n+r-a+1)],[0,0]]"),
        ],
    }
}

/// The exceptional operator with exceptional degrees 1 and 2.
pub const EXCEPTIONAL_SOURCE: &str = "dx^2 - dx*(2*x + 4*x/(1+2*x^2))";

/// The same operator with the first-order pole term doubled; this is the
/// variant whose polynomial eigenfunctions skip exactly degrees 1 and 2.
pub const EXCEPTIONAL_CORRECTED_SOURCE: &str = "dx^2 - dx*(2*x + 8*x/(1+2*x^2))";

/// Everything known about one example at one parameter binding.
#[derive(Clone, Debug)]
pub struct Example {
    pub kind: ExampleKind,
    pub params: BTreeMap<String, CRat>,
    pub weight: Weight,
    pub operators: Vec<(String, DiffOp)>,
    pub reference_lambdas: Vec<(String, EigenvalueMatrix)>,
    /// The orthogonal system `V_1, V_2`.
    pub system: Vec<DiffOp>,
    pub reference_generators: Vec<DiffOp>,
    pub reference_u: MatRF,
    /// The scalar classical operator of the kernel in the diagonalized form.
    pub classical: DiffOp,
    /// Reference identities.
    pub reference_intertwinings: Vec<Intertwining>,
    /// Identities that hold for the listed operators.
    pub corrected_intertwinings: Vec<Intertwining>,
    pub reference_sum_lambda: Option<EigenvalueMatrix>,
    /// Whether the reference system is expected to have a central sum.
    pub central_expected: bool,
}

impl Example {
    pub fn op(&self, name: &str) -> &DiffOp {
        &self.operators.iter().find(|(n, _)| n == name).expect("known operator").1
    }

    pub fn param(&self, name: &str) -> CRat {
        self.params[name].clone()
    }
}

fn ctx(p: &BTreeMap<String, CRat>, size: usize) -> ParseContext {
    ParseContext::new(size).with_params(p)
}

fn op(src: &str, p: &BTreeMap<String, CRat>, size: usize) -> Result<DiffOp> {
    parse_op(src, &ctx(p, size))
}

fn lam(src: &str, p: &BTreeMap<String, CRat>) -> Result<MatRF> {
    parse_matrix(src, &ctx(p, 2).with_var("n"))
}

fn intertwining(name: &str, u: &DiffOp, x: DiffOp, targets: &[&str], p: &BTreeMap<String, CRat>) -> Result<Intertwining> {
    Ok(Intertwining {
        name: name.into(),
        u: u.clone(),
        x,
        targets: targets.iter().map(|t| op(t, p, 1)).collect::<Result<_>>()?,
    })
}

impl Example {
    pub fn build(kind: ExampleKind, params: &BTreeMap<String, CRat>) -> Result<Example> {
        if !kind.admissible(params) {
            return Err(Error::InvalidParameter(format!(
                "parameters {:?} are outside the admissible region for {}",
                params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
                kind.name()
            )));
        }
        let p = params.clone();
        let weight = weight_by_name(kind.weight_name(), &p)?;
        let operators: Vec<(String, DiffOp)> = operator_sources(kind)
            .iter()
            .map(|(n, s)| Ok((n.to_string(), op(s, &p, 2)?)))
            .collect::<Result<_>>()?;
        let reference_lambdas = reference_lambda_sources(kind)
            .iter()
            .map(|(n, s)| Ok((n.to_string(), lam(s, &p)?)))
            .collect::<Result<_>>()?;
        let get = |n: &str| operators.iter().find(|(k, _)| k == n).expect("operator").1.clone();
        let c = |s: &str| -> Result<CRat> {
            crate::specio::parse_op(s, &ctx(&p, 1))?
                .coeff(0)
                .get(0, 0)
                .as_constant()
                .ok_or_else(|| Error::InvalidParameter(s.into()))
        };
        let ex = match kind {
            ExampleKind::Hermite => {
                let (d1, d2) = (get("D1"), get("D2"));
                let a2 = c("a^2")?;
                let v1 = d2.clone();
                let v2 = d1.scale(&a2).add(&d2.scale(&CRat::from_int(4))).add_scalar(&CRat::from_int(-4));
                let gens = vec![op("[[dx*a/2, -dx*a^2*x/2 - 1]]", &p, 1)?, op("[[-1, dx*a/2]]", &p, 1)?];
                let (uu, _) = crate::structure::build_u(&gens)?;
                let printed = vec![
                    intertwining("U V1 = diag(v1, 0) U", &uu, v1.clone(), &["-(a^2/4)*(dx^2 - dx*2*x) + 1", "0"], &p)?,
                    intertwining("U V2 = diag(0, v2) U", &uu, v2.clone(), &["0", "a^2*(dx^2 - dx*2*x) - 2*a^2 - 4"], &p)?,
                ];
                Example {
                    kind,
                    params: p.clone(),
                    weight,
                    reference_u: parse_matrix("[[a/2, -a^2*x/2],[0, a/2]]", &ctx(&p, 2))?,
                    classical: op("dx^2 - dx*2*x", &p, 1)?,
                    corrected_intertwinings: printed.clone(),
                    reference_intertwinings: printed,
                    system: vec![v1, v2],
                    reference_generators: gens,
                    reference_sum_lambda: None,
                    central_expected: false,
                    operators,
                    reference_lambdas,
                }
            }
            ExampleKind::Laguerre => {
                let d = get("D");
                let id = DiffOp::identity(2);
                let dm1 = d.sub(&id);
                let f1 = d
                    .mul(&d)
                    .scale(&c("a^2")?)
                    .sub(&d.scale(&c("a^2*b+2*a^2")?))
                    .add_scalar(&c("a^2*b+a^2+1")?);
                let f2 = dm1.mul(&dm1).scale(&c("a^2")?).sub(&dm1.scale(&c("a^2*b")?)).add(&id);
                let v1 = get("D1").mul(&f1);
                let v2 = get("D2").mul(&f2);
                let gens = vec![
                    op("[[dx^2*a*x + dx*a*(b+1), -dx^2*a^2*x^2 - dx*a^2*(b+1)*x - 1]]", &p, 1)?,
                    op("[[1, dx^2*a*x + dx*a*(b+1-2*x) - a*(b+1)]]", &p, 1)?,
                ];
                let (uu, ux) = crate::structure::build_u(&gens)?;
                let dd = "dx^2*x + dx*(b+1-x)";
                let printed = vec![intertwining("U D = diag(d, d-1) U", &uu, d.clone(), &[dd, "dx^2*x + dx*(b+1-x) - 1"], &p)?];
                Example {
                    kind,
                    params: p.clone(),
                    weight,
                    reference_u: ux,
                    classical: op(dd, &p, 1)?,
                    corrected_intertwinings: printed.clone(),
                    reference_intertwinings: printed,
                    system: vec![v1, v2],
                    reference_generators: gens,
                    reference_sum_lambda: Some(lam(
                        "(1+a^2*b*n+a^2*n^2)*(a^2*b+a^2+1+(a^2*b+2*a^2)*n+a^2*n^2)*[[1,0],[0,1]]",
                        &p,
                    )?),
                    central_expected: true,
                    operators,
                    reference_lambdas,
                }
            }
            ExampleKind::Jacobi => {
                let (d1, d2) = (get("D1"), get("D2"));
                let shift = c("r-2*a")?;
                let v1 = d1.add_scalar(&shift).mul(&d1);
                let v2 = d2.add_scalar(&-&shift).mul(&d2);
                let gens = vec![op("[[dx*x + a, dx]]", &p, 1)?, op("[[dx, dx*x + r - a]]", &p, 1)?];
                let (uu, _) = crate::structure::build_u(&gens)?;
                let dd = "dx^2*(1-x^2) - dx*(r+2)*x";
                let e1 = format!("-({dd}) + (a+1)*r - a*(a+1)");
                let e2 = format!("-({dd}) + (1+a)*(r-a)");
                let e1c = format!("-({dd}) + a*(r-a+1)");
                let cc = "(r-2*a)";
                let printed = vec![
                    intertwining("U V1 = diag(e1, 0) U", &uu, v1.clone(), &[&e1, "0"], &p)?,
                    intertwining("U V2 = diag(0, e2) U", &uu, v2.clone(), &["0", &e2], &p)?,
                ];
                let corrected = vec![
                    intertwining("U D1 = diag(-d + a(r-a+1), 0) U", &uu, d1.clone(), &[&e1c, "0"], &p)?,
                    intertwining("U D2 = diag(0, e2) U", &uu, d2.clone(), &["0", &e2], &p)?,
                    intertwining(
                        "U V1 = diag(e1'(e1'+c), 0) U",
                        &uu,
                        v1.clone(),
                        &[&format!("({e1c})*({e1c} + {cc})"), "0"],
                        &p,
                    )?,
                    intertwining(
                        "U V2 = diag(0, e2(e2-c)) U",
                        &uu,
                        v2.clone(),
                        &["0", &format!("({e2})*({e2} - {cc})")],
                        &p,
                    )?,
                ];
                Example {
                    kind,
                    params: p.clone(),
                    weight,
                    reference_u: parse_matrix("[[x,1],[1,x]]", &ctx(&p, 2))?,
                    classical: op(dd, &p, 1)?,
                    reference_intertwinings: printed,
                    corrected_intertwinings: corrected,
                    system: vec![v1, v2],
                    reference_generators: gens,
                    reference_sum_lambda: Some(lam("(n+a)*(n+r+1-a)*((n+a)*(n+r+1-a)+r-2*a)*[[1,0],[0,1]]", &p)?),
                    central_expected: true,
                    operators,
                    reference_lambdas,
                }
            }
        };
        Ok(ex)
    }
}

/// The reference display for the Hermite diagonal form, kept only to flag it.
pub const HERMITE_REFERENCE_R: &str = "(a^2/4)*exp(x^2)*I";
