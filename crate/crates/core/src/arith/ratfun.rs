use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::crat::owned_binop;
use super::{poly_gcd, CRat, Field, Poly};
use crate::error::{Error, Result};

/// Reduced rational function `num/den` with `den` monic and `gcd(num, den) = 1`.
///
/// Every constructor and arithmetic operation canonicalizes eagerly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl Default for RatFun {
    fn default() -> Self {
        RatFun::zero()
    }
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFun::zero();
        }
        if den.is_constant() {
            let inv = den.lead().recip().expect("nonzero denominator");
            return RatFun {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = poly_gcd(&num, &den).expect("den nonzero");
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let inv = den.lead().recip().expect("nonzero");
        RatFun {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    /// Builds from an already coprime pair, normalizing the denominator.
    fn monic_den(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFun::zero();
        }
        let lead = den.lead();
        if lead == CRat::one() {
            return RatFun { num, den };
        }
        let inv = lead.recip().expect("nonzero");
        RatFun {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        RatFun {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFun::constant(CRat::one())
    }

    pub fn x() -> Self {
        RatFun::from_poly(Poly::x())
    }

    pub fn constant(c: CRat) -> Self {
        RatFun::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        RatFun::constant(CRat::from_int(n))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    /// The constant value, if this is a constant.
    pub fn as_constant(&self) -> Option<CRat> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    /// Polynomial degree, if this is a nonzero polynomial.
    pub fn poly_degree(&self) -> Option<usize> {
        if self.is_polynomial() {
            self.num.degree()
        } else {
            None
        }
    }

    pub fn checked_div(&self, o: &RatFun) -> Result<RatFun> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn recip(&self) -> Result<RatFun> {
        RatFun::one().checked_div(self)
    }

    pub fn derivative(&self) -> RatFun {
        if self.is_polynomial() {
            return RatFun::from_poly(self.num.derivative());
        }
        // (n/d)' = (n'e − n d'/g) / (d e) with g = gcd(d, d'), e = d/g
        let dd = self.den.derivative();
        let g = poly_gcd(&self.den, &dd).expect("nonconstant denominator");
        let e = self.den.exact_div(&g).expect("gcd divides");
        let dg = dd.exact_div(&g).expect("gcd divides");
        let n = &(&self.num.derivative() * &e) - &(&self.num * &dg);
        Self::reduce(n, &self.den * &e)
    }

    /// k-th derivative.
    pub fn nth_derivative(&self, k: usize) -> RatFun {
        let mut out = self.clone();
        for _ in 0..k {
            if out.is_zero() {
                break;
            }
            out = out.derivative();
        }
        out
    }

    pub fn conj(&self) -> RatFun {
        RatFun {
            num: self.num.conj(),
            den: self.den.conj(),
        }
    }

    pub fn scale(&self, c: &CRat) -> RatFun {
        if c.is_zero() {
            return RatFun::zero();
        }
        RatFun {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Value at a point; `None` at a pole.
    pub fn eval(&self, at: &CRat) -> Option<CRat> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval(at) / &d)
    }

    pub fn pow(&self, k: u32) -> RatFun {
        RatFun {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    pub fn weight(&self) -> u64 {
        self.num.weight() + self.den.weight()
    }

    /// Canonical text in the variable `var`.
    pub fn fmt_in(&self, var: &str) -> String {
        let num = self.num.fmt_in(var);
        if self.den.is_one() {
            return num;
        }
        let num = if self.num.term_count() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = self.den.fmt_in(var);
        if self.den.term_count() > 1 || self.den.lead() != CRat::one() {
            format!("{num}/({den})")
        } else {
            format!("{num}/{den}")
        }
    }
}

impl From<Poly> for RatFun {
    fn from(p: Poly) -> Self {
        RatFun::from_poly(p)
    }
}

impl From<CRat> for RatFun {
    fn from(c: CRat) -> Self {
        RatFun::constant(c)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_in("x"))
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Field for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn one() -> Self {
        RatFun::one()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        RatFun::recip(self).ok()
    }
    fn conj(&self) -> Self {
        RatFun::conj(self)
    }
    fn weight(&self) -> u64 {
        RatFun::weight(self)
    }
}

impl<'a> Add<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn add(self, o: &RatFun) -> RatFun {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return RatFun::from_poly(&self.num + &o.num);
            }
            return RatFun::reduce(&self.num + &o.num, self.den.clone());
        }
        // gcds of the smaller pieces only
        let g = poly_gcd(&self.den, &o.den).expect("nonzero denominators");
        if g.is_one() {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return RatFun::monic_den(num, &self.den * &o.den);
        }
        let b = self.den.exact_div(&g).expect("gcd divides");
        let d = o.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &d) + &(&o.num * &b);
        if num.is_zero() {
            return RatFun::zero();
        }
        let h = poly_gcd(&num, &g).expect("nonzero");
        let (num, g) = if h.is_one() {
            (num, g)
        } else {
            (num.exact_div(&h).expect("gcd divides"), g.exact_div(&h).expect("gcd divides"))
        };
        RatFun::monic_den(num, &(&b * &d) * &g)
    }
}

impl<'a> Sub<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn sub(self, o: &RatFun) -> RatFun {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn mul(self, o: &RatFun) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFun::from_poly(&self.num * &o.num);
        }
        let cancel = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            if d.is_one() {
                return (n.clone(), d.clone());
            }
            let g = poly_gcd(n, d).expect("nonzero");
            if g.is_one() {
                (n.clone(), d.clone())
            } else {
                (n.exact_div(&g).expect("gcd divides"), d.exact_div(&g).expect("gcd divides"))
            }
        };
        let (a, d) = cancel(&self.num, &o.den);
        let (c, b) = cancel(&o.num, &self.den);
        RatFun::monic_den(&a * &c, &b * &d)
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

owned_binop!(RatFun, Add, add);
owned_binop!(RatFun, Sub, sub);
owned_binop!(RatFun, Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly {
        Poly::from_ints(cs)
    }

    fn rf(n: &[i64], d: &[i64]) -> RatFun {
        RatFun::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn partial_fractions_sum() {
        // 1/(x−1) + 1/(x+1) = 2x/(x²−1)
        let s = rf(&[1], &[-1, 1]) + rf(&[1], &[1, 1]);
        assert_eq!(s, rf(&[0, 2], &[-1, 0, 1]));
        assert_eq!(s.num(), &p(&[0, 2]));
        assert_eq!(s.den(), &p(&[-1, 0, 1]));
    }

    #[test]
    fn annihilator_and_cancel() {
        let f = rf(&[3, 1], &[1, 0, 7]);
        assert!((&f * &RatFun::zero()).is_zero());
        let g = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!(g, RatFun::from_poly(p(&[1, 1])));
        assert!(g.is_polynomial());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(RatFun::x().checked_div(&RatFun::zero()), Err(Error::DivisionByZero)));
        assert!(RatFun::new(p(&[1]), Poly::zero()).is_err());
    }

    #[test]
    fn derivative_of_quotient() {
        // (1/x)' = −1/x²
        let f = rf(&[1], &[0, 1]);
        assert_eq!(f.derivative(), rf(&[-1], &[0, 0, 1]));
        assert_eq!(f.nth_derivative(2), rf(&[2], &[0, 0, 0, 1]));
    }

    #[test]
    fn denominators_are_monic() {
        let f = rf(&[4], &[2, 4]);
        assert_eq!(f.den().lead(), CRat::one());
        assert_eq!(f.fmt_in("x"), "1/(x+1/2)");
    }
}
