use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::crat::owned_binop;
use super::{CRat, Field};
use crate::error::{Error, Result};

/// Dense univariate polynomial with [`CRat`] coefficients, ascending degree.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and `degree()` returns `None` for it.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<CRat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<CRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(CRat::one())
    }

    /// The indeterminate.
    pub fn x() -> Self {
        Poly::monomial(CRat::one(), 1)
    }

    pub fn constant(c: CRat) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: CRat, deg: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![CRat::zero(); deg];
        coeffs.push(c);
        Poly { coeffs }
    }

    /// Builds a polynomial from integer coefficients, ascending degree.
    pub fn from_ints(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| CRat::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[CRat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CRat {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == CRat::one()
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn lead(&self) -> CRat {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, at: &CRat) -> CRat {
        self.coeffs
            .iter()
            .rev()
            .fold(CRat::zero(), |acc, c| &(&acc * at) + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &CRat::from_int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &CRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(CRat::conj).collect())
    }

    /// Scales to leading coefficient one. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Poly {
        match self.lead().recip() {
            Some(inv) => self.scale(&inv),
            None => Poly::zero(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Euclidean division. Errors if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let inv_lead = divisor.lead().recip().ok_or(Error::DivisionByZero)?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![CRat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv_lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * d);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NoSolution("polynomial division is not exact".into()))
        }
    }

    /// Composition `self(inner(t))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * inner) + &Poly::constant(c.clone()))
    }

    /// Generic substitution of a ring element for the indeterminate (Horner).
    pub fn eval_in<T, F, G>(&self, at: &T, lift: F, ring: G) -> T
    where
        F: Fn(&CRat) -> T,
        G: Fn(&T, &T, &T) -> T,
    {
        let mut acc = lift(&CRat::zero());
        for c in self.coeffs.iter().rev() {
            acc = ring(&acc, at, &lift(c));
        }
        acc
    }

    /// Multiplicity of `root` as a root of `self` (zero polynomial gives `usize::MAX`).
    pub fn root_multiplicity(&self, root: &CRat) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::new(vec![-root, CRat::one()]);
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = p.div_rem(&lin).expect("nonzero divisor");
            if !r.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    pub fn weight(&self) -> u64 {
        self.coeffs.iter().map(CRat::bits).sum::<u64>() + 8 * self.coeffs.len() as u64
    }

    /// Writes the polynomial in the variable `var`, highest degree first.
    pub fn fmt_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let (neg, mag) = if c.is_negative_real() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag == CRat::one() {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            out.push_str(&body);
        }
        out
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

/// Monic greatest common divisor. Errors when both inputs are zero.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdOfZeros);
    }
    if !a.is_constant() && !b.is_constant() && coprime_mod_p(a, b) {
        return Ok(Poly::one());
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    while !r1.is_zero() {
        if r1.is_constant() {
            return Ok(Poly::one());
        }
        let (_, r) = r0.div_rem(&r1)?;
        // keep remainders monic to limit coefficient growth
        r0 = r1;
        r1 = r.monic();
    }
    Ok(r0.monic())
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, PRIME - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

fn reduce_mod(p: &Poly) -> Option<Vec<u64>> {
    use num_traits::{Signed, ToPrimitive};
    let big = num_bigint::BigInt::from(PRIME);
    let residue = |n: &num_bigint::BigInt| {
        let r = n % &big;
        let r = if r.is_negative() { r + &big } else { r };
        r.to_u64().expect("residue fits")
    };
    p.coeffs
        .iter()
        .map(|c| {
            if !c.is_real() {
                return None;
            }
            let den = residue(c.re().denom());
            (den != 0).then(|| mul_mod(residue(c.re().numer()), inv_mod(den)))
        })
        .collect()
}

/// Sufficient test for `gcd(a, b) = 1`: the gcd modulo a prime that keeps both
/// leading coefficients is a constant. Real coefficients only.
fn coprime_mod_p(a: &Poly, b: &Poly) -> bool {
    let (Some(mut r0), Some(mut r1)) = (reduce_mod(a), reduce_mod(b)) else {
        return false;
    };
    if r0.last() == Some(&0) || r1.last() == Some(&0) {
        return false;
    }
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    while r1.len() > 1 {
        let inv = inv_mod(*r1.last().expect("nonzero"));
        while r0.len() >= r1.len() {
            let q = mul_mod(*r0.last().expect("nonzero"), inv);
            let shift = r0.len() - r1.len();
            for (k, c) in r1.iter().enumerate() {
                let t = mul_mod(q, *c);
                r0[shift + k] = (r0[shift + k] + PRIME - t) % PRIME;
            }
            trim(&mut r0);
            if r0.is_empty() {
                return false;
            }
        }
        std::mem::swap(&mut r0, &mut r1);
    }
    r1.len() == 1
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_in("x"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| match (self.coeffs.get(k), o.coeffs.get(k)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![CRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

owned_binop!(Poly, Add, add);
owned_binop!(Poly, Sub, sub);
owned_binop!(Poly, Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly {
        Poly::from_ints(cs)
    }

    #[test]
    fn gcd_examples() {
        // gcd(x²−1, x−1) = x−1
        assert_eq!(poly_gcd(&p(&[-1, 0, 1]), &p(&[-1, 1])).unwrap(), p(&[-1, 1]));
        // gcd(x, 1) = 1
        assert_eq!(poly_gcd(&p(&[0, 1]), &p(&[1])).unwrap(), Poly::one());
        // gcd((x²+1)², x²+1) = x²+1
        let q = p(&[1, 0, 1]);
        assert_eq!(poly_gcd(&(&q * &q), &q).unwrap(), q);
        assert!(matches!(poly_gcd(&Poly::zero(), &Poly::zero()), Err(Error::GcdOfZeros)));
        assert_eq!(poly_gcd(&Poly::zero(), &p(&[2, 4])).unwrap(), p(&[1, 2]).monic());
    }

    #[test]
    fn division_and_roots() {
        let (q, r) = p(&[-1, 0, 1]).div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert!(p(&[1]).div_rem(&Poly::zero()).is_err());
        let sq = p(&[1, -2, 1]);
        assert_eq!(sq.root_multiplicity(&CRat::one()), 2);
        assert_eq!(sq.root_multiplicity(&CRat::from_int(-1)), 0);
    }

    #[test]
    fn formatting() {
        assert_eq!(p(&[-2, -2]).fmt_in("n"), "-2*n-2");
        assert_eq!(p(&[1, 0, -1]).to_string(), "-x^2+1");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::new(vec![CRat::frac(1, 2), CRat::one()]).to_string(), "x+1/2");
    }
}
