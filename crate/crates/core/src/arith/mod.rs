//! Exact arithmetic: complex rationals, polynomials, rational functions and dense matrices.

mod crat;
mod matrix;
mod poly;
mod ratfun;

pub use crat::CRat;
pub use matrix::{mat_inv, Mat, MatC, MatRF};
pub use poly::{poly_gcd, Poly};
pub use ratfun::RatFun;


/// Operations shared by the exact fields used as matrix entries.
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn recip(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    /// Size heuristic for pivot choice.
    fn weight(&self) -> u64;
}
