//! Exact rational arithmetic helpers on top of `num_rational::BigRational`.
//!
//! Every coefficient in the engine is a [`Rat`]: an arbitrary-precision
//! rational kept in lowest terms with a positive denominator (both enforced
//! by `BigRational` itself).

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rat = num_rational::BigRational;

/// Rational from a machine integer.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational p/q from machine integers. Panics if q = 0.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// True when r is an integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// The integer value of r, when r is an integer.
pub fn as_integer(r: &Rat) -> Option<BigInt> {
    if is_integer(r) {
        Some(r.numer().clone())
    } else {
        None
    }
}

/// The i64 value of r, when r is an integer that fits.
pub fn as_i64(r: &Rat) -> Option<i64> {
    as_integer(r).as_ref().and_then(as_i64_big)
}

/// i64 value of a big integer, when it fits.
pub fn as_i64_big(n: &BigInt) -> Option<i64> {
    use num_traits::ToPrimitive;
    n.to_i64()
}

/// Largest integer not exceeding r.
pub fn floor_rat(r: &Rat) -> BigInt {
    use num_integer::Integer;
    r.numer().div_floor(r.denom())
}

/// r^e for a signed integer exponent. Panics on 0^negative.
pub fn pow_rat(r: &Rat, e: i64) -> Rat {
    if e == 0 {
        return Rat::one();
    }
    if r.is_zero() {
        assert!(e > 0, "zero base with negative exponent");
        return Rat::zero();
    }
    let p = r.numer().pow(e.unsigned_abs() as u32);
    let q = r.denom().pow(e.unsigned_abs() as u32);
    if e > 0 {
        Rat::new(p, q)
    } else {
        Rat::new(q, p)
    }
}

/// n! as a big integer. Panics when n < 0.
pub fn factorial_int(n: &BigInt) -> BigInt {
    assert!(n.sign() != Sign::Minus, "factorial of a negative integer");
    let mut acc = BigInt::one();
    let mut i = BigInt::one();
    while &i <= n {
        acc *= &i;
        i += 1;
    }
    acc
}

/// Rising factorial (a)_c = a(a+1)...(a+c-1) for an integer count c.
///
/// Negative counts use (a)_{-m} = 1/((a-m)_m); returns None when that
/// denominator vanishes (a pole).
pub fn pochhammer_rat(a: &Rat, c: &BigInt) -> Option<Rat> {
    if c.sign() == Sign::Minus {
        let m = -c.clone();
        let base = a - Rat::from_integer(m.clone());
        let denom = pochhammer_rat(&base, &m)?;
        if denom.is_zero() {
            return None;
        }
        return Some(denom.recip());
    }
    let mut acc = Rat::one();
    let mut term = a.clone();
    let mut i = BigInt::zero();
    while &i < c {
        acc *= &term;
        term += Rat::one();
        i += 1;
    }
    Some(acc)
}

/// Binomial coefficient C(t, b) for rational t and integer b.
///
/// C(t, b) = t(t-1)...(t-b+1)/b! for b >= 0, and 0 for negative integer b.
pub fn binomial_rat(t: &Rat, b: &BigInt) -> Rat {
    if b.sign() == Sign::Minus {
        return Rat::zero();
    }
    let mut num = Rat::one();
    let mut term = t.clone();
    let mut i = BigInt::zero();
    while &i < b {
        num *= &term;
        term -= Rat::one();
        i += 1;
    }
    num / Rat::from_integer(factorial_int(b))
}

/// gcd of two big integers, nonnegative.
pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::gcd(a, b)
}

/// lcm of two big integers, nonnegative.
pub fn lcm_int(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::lcm(a, b)
}

/// gcd of two rationals: gcd of numerators over lcm of denominators.
///
/// This is the natural content notion: q/gcd_rat is an integer-preserving
/// scaling for both inputs. Result is nonnegative.
pub fn gcd_rat(a: &Rat, b: &Rat) -> Rat {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    Rat::new(
        gcd_int(a.numer(), b.numer()),
        lcm_int(a.denom(), b.denom()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_positive_count() {
        let v = pochhammer_rat(&rat(1, 2), &BigInt::from(3)).unwrap();
        assert_eq!(v, rat(15, 8));
    }

    #[test]
    fn pochhammer_negative_count_inverts() {
        // (a)_{-2} = 1/((a-2)(a-1)) at a = 5: 1/(3*4)
        let v = pochhammer_rat(&rat_i(5), &BigInt::from(-2)).unwrap();
        assert_eq!(v, rat(1, 12));
    }

    #[test]
    fn pochhammer_negative_count_pole() {
        assert!(pochhammer_rat(&rat_i(1), &BigInt::from(-1)).is_none());
    }

    #[test]
    fn binomial_rational_top() {
        // C(1/2, 2) = (1/2)(-1/2)/2 = -1/8
        assert_eq!(binomial_rat(&rat(1, 2), &BigInt::from(2)), rat(-1, 8));
        assert_eq!(binomial_rat(&rat_i(4), &BigInt::from(2)), rat_i(6));
        assert_eq!(binomial_rat(&rat_i(4), &BigInt::from(-1)), rat_i(0));
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(gcd_rat(&rat(4, 3), &rat(2, 9)), rat(2, 9));
        assert_eq!(gcd_rat(&rat_i(0), &rat(-3, 4)), rat(3, 4));
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow_rat(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(pow_rat(&rat_i(-2), 3), rat_i(-8));
    }
}
