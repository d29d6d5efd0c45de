use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Field;
use crate::error::{Error, Result};

/// Complex number with exact rational real and imaginary parts.
///
/// Both components are kept in lowest terms with a positive denominator
/// (guaranteed by `BigRational`), so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CRat {
    re: BigRational,
    im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRat {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        CRat::real(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` as a real number. Panics if `q == 0`.
    pub fn frac(p: i64, q: i64) -> Self {
        CRat::real(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn i() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// |z|² as a rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(CRat {
            re: &self.re / &d,
            im: -(&self.im / &d),
        })
    }

    pub fn checked_div(&self, other: &CRat) -> Result<CRat> {
        other
            .recip()
            .map(|r| self * &r)
            .ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, k: u32) -> CRat {
        let mut out = CRat::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Approximate value of the real part, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.re.to_f64().unwrap_or(f64::NAN)
    }

    /// Rough size measure used to pick pivots.
    pub fn bits(&self) -> u64 {
        self.re.numer().bits() + self.re.denom().bits() + self.im.numer().bits() + self.im.denom().bits()
    }

    pub fn is_negative_real(&self) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }

    pub fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CRat {
    /// Canonical text: `p/q`, `p/q*i`, or `(p/q+s/t*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let im_abs = self.im.abs();
        let im_txt = if im_abs.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rational(&im_abs))
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_txt}")
            } else {
                write!(f, "{im_txt}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "({}{}{})", fmt_rational(&self.re), sign, im_txt)
        }
    }
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CRat {
    type Err = Error;

    /// Parses a real rational `p`, `-p`, or `p/q`. Decimals are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("not an exact rational: {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(CRat::real(BigRational::new(n, d)))
    }
}

impl From<i64> for CRat {
    fn from(n: i64) -> Self {
        CRat::from_int(n)
    }
}

impl From<BigRational> for CRat {
    fn from(r: BigRational) -> Self {
        CRat::real(r)
    }
}

impl Field for CRat {
    fn zero() -> Self {
        CRat::default()
    }
    fn one() -> Self {
        CRat::real(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
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
        CRat::recip(self)
    }
    fn conj(&self) -> Self {
        CRat::conj(self)
    }
    fn weight(&self) -> u64 {
        self.bits()
    }
}

impl<'a> Add<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn sub(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn mul(self, o: &CRat) -> CRat {
        if self.im.is_zero() && o.im.is_zero() {
            return CRat::real(&self.re * &o.re);
        }
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a CRat> for &'a CRat {
    type Output = CRat;
    /// Panics on division by zero; use [`CRat::checked_div`] for fallible division.
    fn div(self, o: &CRat) -> CRat {
        self.checked_div(o).expect("division by zero")
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

macro_rules! owned_binop {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, o: $ty) -> $ty {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, o: &'a $ty) -> $ty {
                (&self).$m(o)
            }
        }
    };
}
pub(crate) use owned_binop;

owned_binop!(CRat, Add, add);
owned_binop!(CRat, Sub, sub);
owned_binop!(CRat, Mul, mul);
owned_binop!(CRat, Div, div);

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(CRat::frac(-6, 4).to_string(), "-3/2");
        assert_eq!(CRat::from_int(7).to_string(), "7");
        assert_eq!(CRat::i().to_string(), "i");
        let z = CRat::new(BigRational::from_integer(1.into()), BigRational::new((-1).into(), 2.into()));
        assert_eq!(z.to_string(), "(1-1/2*i)");
    }

    #[test]
    fn parse_rejects_decimals() {
        assert!("0.5".parse::<CRat>().is_err());
        assert_eq!("2/3".parse::<CRat>().unwrap(), CRat::frac(2, 3));
        assert_eq!(" -4/6 ".parse::<CRat>().unwrap(), CRat::frac(-2, 3));
        assert!(matches!("1/0".parse::<CRat>(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn complex_inverse() {
        let z = CRat::from_int(3) + CRat::i() * CRat::from_int(4);
        let w = z.recip().unwrap();
        assert_eq!(&z * &w, CRat::one());
        assert!(CRat::zero().recip().is_none());
    }
}
