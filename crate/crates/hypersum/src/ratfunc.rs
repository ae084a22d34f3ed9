//! Rational functions: reduced quotients of multivariate polynomials.
//!
//! Invariants: the denominator is nonzero, numerator and denominator are
//! coprime, and the denominator has integer coprime coefficients with
//! positive leading coefficient. Equality is therefore structural.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::poly::{poly_gcd, Poly};
use crate::rational::{rat_i, Rat};
use crate::var::Var;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Builds the reduced form of num/den: polynomial gcd removed, both
    /// parts scaled to integer coefficients with coprime contents, and the
    /// denominator's leading coefficient positive. Panics if den is zero,
    /// which indicates an internal logic error in the caller.
    pub fn new(num: Poly, den: Poly) -> RatFunc {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: Poly::one() };
        }
        let g = poly_gcd(&num, &den);
        let num = num.exact_div(&g).unwrap();
        let den = den.exact_div(&g).unwrap();
        let (pn, cn) = num.primitive_positive();
        let (pd, cd) = den.primitive_positive();
        let scalar = cn / cd;
        let num = pn.mul_rat(&Rat::from_integer(scalar.numer().clone()));
        let den = pd.mul_rat(&Rat::from_integer(scalar.denom().clone()));
        RatFunc { num, den }
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc::new(p, Poly::one())
    }

    pub fn from_rat(c: Rat) -> RatFunc {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> RatFunc {
        RatFunc::from_rat(rat_i(c))
    }

    pub fn zero() -> RatFunc {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn var(v: Var) -> RatFunc {
        RatFunc::from_poly(Poly::var(v))
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

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The constant value when both parts are constants.
    pub fn constant_value(&self) -> Option<Rat> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        // Reduce via gcd of denominators to keep the intermediate products small.
        let g = poly_gcd(&self.den, &other.den);
        let da = self.den.exact_div(&g).unwrap();
        let db = other.den.exact_div(&g).unwrap();
        let num = self.num.mul(&db).add(&other.num.mul(&da));
        let den = self.den.mul(&db);
        RatFunc::new(num, den)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        // Cross-reduce before multiplying.
        let g1 = poly_gcd(&self.num, &other.den);
        let g2 = poly_gcd(&other.num, &self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = other.den.exact_div(&g1).unwrap();
        let n2 = other.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        RatFunc::new(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn mul_rat(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.mul_rat(c), den: self.den.clone() }
    }

    pub fn recip(&self) -> RatFunc {
        assert!(!self.is_zero(), "reciprocal of zero");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> RatFunc {
        self.mul(&other.recip())
    }

    pub fn pow(&self, e: i64) -> RatFunc {
        if e == 0 {
            return RatFunc::one();
        }
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Substitutes a polynomial for v in both parts.
    pub fn subst(&self, v: Var, replacement: &Poly) -> RatFunc {
        RatFunc::new(self.num.subst(v, replacement), self.den.subst(v, replacement))
    }

    /// Shifts v by a rational constant.
    pub fn shift_var(&self, v: Var, delta: &Rat) -> RatFunc {
        if delta.is_zero() {
            return self.clone();
        }
        RatFunc::new(self.num.shift_var(v, delta), self.den.shift_var(v, delta))
    }

    /// Substitutes a rational value for v; the result may still contain the
    /// other variables. Err when the denominator collapses to zero.
    pub fn subst_rat(&self, v: Var, value: &Rat) -> Result<RatFunc, Error> {
        let den = self.den.subst_rat(v, value);
        if den.is_zero() {
            return Err(Error::Pole { detail: format!("{} = {} in {}", v, crate::poly::format_rat(value), self) });
        }
        Ok(RatFunc::new(self.num.subst_rat(v, value), den))
    }

    /// Evaluates at a full assignment.
    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Result<Rat, Error> {
        let d = self.den.eval(assign).map_err(|v| Error::UnassignedVariable(v.0))?;
        if d.is_zero() {
            return Err(Error::Pole { detail: format!("denominator of {} vanished", self) });
        }
        let n = self.num.eval(assign).map_err(|v| Error::UnassignedVariable(v.0))?;
        Ok(n / d)
    }

    /// Structural equality already is mathematical equality; this avoids
    /// building the reduced forms when comparing two unreduced quotients.
    pub fn cross_equal(num_a: &Poly, den_a: &Poly, num_b: &Poly, den_b: &Poly) -> bool {
        num_a.mul(den_b) == num_b.mul(den_a)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = self.num.vars().iter().chain(self.den.vars().iter()).cloned().collect();
        vars.sort();
        vars.dedup();
        vars
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if needs_parens(&self.num) {
            format!("({})", self.num)
        } else {
            format!("{}", self.num)
        };
        if self.den.is_constant() {
            write!(f, "{}/{}", num, self.den)
        } else {
            write!(f, "{}/({})", num, self.den)
        }
    }
}

fn needs_parens(p: &Poly) -> bool {
    p.num_terms() > 1 || p.leading_term_coeff().is_negative()
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::var::{K, N};

    fn k() -> RatFunc {
        RatFunc::var(K)
    }

    fn n() -> RatFunc {
        RatFunc::var(N)
    }

    #[test]
    fn reduction_is_automatic() {
        // (k^2 - 1)/(k - 1) = k + 1
        let num = Poly::var(K).pow(2).sub(&Poly::one());
        let den = Poly::var(K).sub(&Poly::one());
        let r = RatFunc::new(num, den);
        assert_eq!(r, k().add(&RatFunc::one()));
        assert!(r.den().is_one());
    }

    #[test]
    fn denominator_sign_is_normalized() {
        // k / (-2k + 2) = -k / (2k - 2)
        let r = RatFunc::new(Poly::var(K), Poly::var(K).mul_rat(&rat_i(-2)).add(&Poly::constant(rat_i(2))));
        assert!(r.den().leading_term_coeff() > Rat::zero());
        let back = r.mul_rat(&rat_i(-2)).mul(&RatFunc::from_poly(Poly::var(K).sub(&Poly::one())));
        assert_eq!(back, k());
    }

    #[test]
    fn field_operations() {
        // k/n + n/k = (k^2 + n^2)/(n k)
        let a = k().div(&n());
        let b = n().div(&k());
        let s = a.add(&b);
        let expect = RatFunc::new(
            Poly::var(K).pow(2).add(&Poly::var(N).pow(2)),
            Poly::var(K).mul(&Poly::var(N)),
        );
        assert_eq!(s, expect);
        assert_eq!(s.sub(&b), a);
        assert_eq!(a.mul(&b), RatFunc::one());
        assert_eq!(a.div(&a), RatFunc::one());
        assert_eq!(a.pow(-2), b.pow(2));
    }

    #[test]
    fn shift_and_eval() {
        // r = 1/k, shifted k -> k+1 gives 1/(k+1)
        let r = RatFunc::one().div(&k());
        let s = r.shift_var(K, &rat_i(1));
        let mut assign = BTreeMap::new();
        assign.insert(K, rat_i(3));
        assert_eq!(s.eval(&assign).unwrap(), rat(1, 4));
        assign.insert(K, rat_i(-1));
        assert!(matches!(s.eval(&assign), Err(Error::Pole { .. })));
    }

    #[test]
    fn display_round_trip_shape() {
        let r = RatFunc::new(
            Poly::var(K).add(&Poly::one()),
            Poly::var(K).mul_rat(&rat_i(3)),
        );
        assert_eq!(format!("{}", r), "(k + 1)/(3*k)");
    }
}
