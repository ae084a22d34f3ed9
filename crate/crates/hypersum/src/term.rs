//! Structured hypergeometric terms.
//!
//! A term is a rational-function coefficient times a product of factorial,
//! gamma, binomial, Pochhammer, and exponential factors with integer
//! exponents. Arguments of the special factors must be linear in the
//! summation variables with rational coefficients; exponential bases must be
//! free of the summation variables. Expressions are quotients of sums of
//! terms, which is the closure needed by the summation algorithms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::{as_integer, binomial_rat, factorial_int, pochhammer_rat, pow_rat, rat_i, Rat};
use crate::var::{Var, K, N};

/// An argument that is linear in every variable: c1*v1 + ... + c0 with
/// rational coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearArg(Poly);

impl LinearArg {
    pub fn new(p: Poly) -> Result<LinearArg> {
        if p.total_degree() > 1 {
            return Err(Error::NonLinearArgument { detail: format!("{}", p) });
        }
        Ok(LinearArg(p))
    }

    pub fn constant(c: Rat) -> LinearArg {
        LinearArg(Poly::constant(c))
    }

    pub fn var(v: Var) -> LinearArg {
        LinearArg(Poly::var(v))
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    /// Coefficient of v (a rational, by linearity).
    pub fn coeff(&self, v: Var) -> Rat {
        self.0.coeff_of(v, 1).constant_value().unwrap_or_else(Rat::zero)
    }

    /// The variable-free part.
    pub fn constant_part(&self) -> Rat {
        self.0.constant_term()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rat> {
        self.0.constant_value()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.0.vars().contains(&v)
    }

    pub fn add(&self, other: &LinearArg) -> LinearArg {
        LinearArg(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &LinearArg) -> LinearArg {
        LinearArg(self.0.sub(&other.0))
    }

    pub fn add_rat(&self, c: &Rat) -> LinearArg {
        LinearArg(self.0.add(&Poly::constant(c.clone())))
    }

    pub fn mul_rat(&self, c: &Rat) -> LinearArg {
        LinearArg(self.0.mul_rat(c))
    }

    pub fn shift(&self, v: Var, delta: &Rat) -> LinearArg {
        LinearArg(self.0.shift_var(v, delta))
    }

    /// v -> factor * v.
    pub fn scale(&self, v: Var, factor: &Rat) -> LinearArg {
        LinearArg(self.0.subst(v, &Poly::monomial(v, 1, factor.clone())))
    }

    /// Substitutes a linear polynomial for v; linearity is preserved.
    pub fn subst_linear(&self, v: Var, replacement: &Poly) -> Result<LinearArg> {
        LinearArg::new(self.0.subst(v, replacement))
    }

    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Result<Rat> {
        self.0.eval(assign).map_err(|v| Error::UnassignedVariable(v.0))
    }
}

impl fmt::Display for LinearArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for LinearArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A multiplicative atom of a hypergeometric term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Factor {
    /// arg!
    Factorial(LinearArg),
    /// Gamma(arg)
    Gamma(LinearArg),
    /// binomial(top, bottom)
    Binomial(LinearArg, LinearArg),
    /// pochhammer(base, count) = Gamma(base + count)/Gamma(base)
    Pochhammer(LinearArg, LinearArg),
    /// base^exp with base free of the summation variables
    Power(RatFunc, LinearArg),
}

impl Factor {
    /// The arguments that sit at gamma level after rewriting this factor as
    /// a product of gamma values (shifts by constants do not matter here, so
    /// the +1 offsets of factorials are omitted).
    pub fn gamma_level_args(&self) -> Vec<LinearArg> {
        match self {
            Factor::Factorial(a) | Factor::Gamma(a) => vec![a.clone()],
            Factor::Binomial(t, b) => vec![t.clone(), b.clone(), t.sub(b)],
            Factor::Pochhammer(b, c) => vec![b.clone(), b.add(c)],
            Factor::Power(_, e) => vec![e.clone()],
        }
    }

    fn map_args(&self, f: impl Fn(&LinearArg) -> LinearArg) -> Factor {
        match self {
            Factor::Factorial(a) => Factor::Factorial(f(a)),
            Factor::Gamma(a) => Factor::Gamma(f(a)),
            Factor::Binomial(t, b) => Factor::Binomial(f(t), f(b)),
            Factor::Pochhammer(b, c) => Factor::Pochhammer(f(b), f(c)),
            Factor::Power(base, e) => Factor::Power(base.clone(), f(e)),
        }
    }

    fn try_map_args(&self, f: impl Fn(&LinearArg) -> Result<LinearArg>) -> Result<Factor> {
        Ok(match self {
            Factor::Factorial(a) => Factor::Factorial(f(a)?),
            Factor::Gamma(a) => Factor::Gamma(f(a)?),
            Factor::Binomial(t, b) => Factor::Binomial(f(t)?, f(b)?),
            Factor::Pochhammer(b, c) => Factor::Pochhammer(f(b)?, f(c)?),
            Factor::Power(base, e) => Factor::Power(base.clone(), f(e)?),
        })
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Factor::Factorial(a) | Factor::Gamma(a) => a.depends_on(v),
            Factor::Binomial(x, y) | Factor::Pochhammer(x, y) => {
                x.depends_on(v) || y.depends_on(v)
            }
            Factor::Power(base, e) => base.vars().contains(&v) || e.depends_on(v),
        }
    }
}

/// What a factor contributes at a numeric point.
enum FactorValue {
    Finite(Rat),
    /// Gamma evaluated at a nonpositive integer: the factor is infinite, its
    /// reciprocal is zero.
    GammaPole,
    NotEvaluable(String),
}

fn eval_factorial(v: &Rat) -> FactorValue {
    match as_integer(v) {
        Some(i) if !i.is_negative() => FactorValue::Finite(Rat::from_integer(factorial_int(&i))),
        Some(_) => FactorValue::GammaPole,
        None => FactorValue::NotEvaluable(format!("factorial of non-integer {}", v)),
    }
}

impl Factor {
    fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Result<FactorValue> {
        Ok(match self {
            Factor::Factorial(a) => eval_factorial(&a.eval(assign)?),
            Factor::Gamma(a) => eval_factorial(&(a.eval(assign)? - Rat::one())),
            Factor::Binomial(t, b) => {
                let tv = t.eval(assign)?;
                let bv = b.eval(assign)?;
                match as_integer(&bv) {
                    Some(bi) => FactorValue::Finite(binomial_rat(&tv, &bi)),
                    None => FactorValue::NotEvaluable(format!("binomial with non-integer count {}", bv)),
                }
            }
            Factor::Pochhammer(b, c) => {
                let bv = b.eval(assign)?;
                let cv = c.eval(assign)?;
                match as_integer(&cv) {
                    Some(ci) => match pochhammer_rat(&bv, &ci) {
                        Some(v) => FactorValue::Finite(v),
                        None => FactorValue::GammaPole,
                    },
                    None => FactorValue::NotEvaluable(format!("pochhammer with non-integer count {}", cv)),
                }
            }
            Factor::Power(base, e) => {
                let bv = base.eval(assign)?;
                let ev = e.eval(assign)?;
                match as_integer(&ev).as_ref().and_then(crate::rational::as_i64_big) {
                    Some(ei) => {
                        if bv.is_zero() {
                            if ei > 0 {
                                FactorValue::Finite(Rat::zero())
                            } else if ei == 0 {
                                FactorValue::Finite(Rat::one())
                            } else {
                                return Err(Error::Pole { detail: "0 raised to a negative power".into() });
                            }
                        } else {
                            FactorValue::Finite(pow_rat(&bv, ei))
                        }
                    }
                    None if bv.is_one() => FactorValue::Finite(Rat::one()),
                    None => FactorValue::NotEvaluable(format!("{} raised to non-integer {}", bv, ev)),
                }
            }
        })
    }
}

/// A single hypergeometric term: coeff * prod factor_i ^ e_i.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperTerm {
    coeff: RatFunc,
    factors: Vec<(Factor, i64)>,
}

impl HyperTerm {
    pub fn one() -> HyperTerm {
        HyperTerm { coeff: RatFunc::one(), factors: Vec::new() }
    }

    pub fn zero() -> HyperTerm {
        HyperTerm { coeff: RatFunc::zero(), factors: Vec::new() }
    }

    pub fn from_ratfunc(r: RatFunc) -> HyperTerm {
        if r.is_zero() {
            return HyperTerm::zero();
        }
        HyperTerm { coeff: r, factors: Vec::new() }
    }

    pub fn from_factor(f: Factor) -> Result<HyperTerm> {
        HyperTerm { coeff: RatFunc::one(), factors: vec![(f, 1)] }.normalize()
    }

    pub fn coeff(&self) -> &RatFunc {
        &self.coeff
    }

    pub fn factors(&self) -> &[(Factor, i64)] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Canonical form: constant factors folded into the coefficient, equal
    /// factors merged, zero exponents dropped, factors sorted.
    fn normalize(mut self) -> Result<HyperTerm> {
        if self.coeff.is_zero() {
            return Ok(HyperTerm::zero());
        }
        let mut merged: BTreeMap<Factor, i64> = BTreeMap::new();
        for (f, e) in self.factors.drain(..) {
            if e == 0 {
                continue;
            }
            *merged.entry(f).or_insert(0) += e;
        }
        let mut coeff = self.coeff;
        let mut factors: Vec<(Factor, i64)> = Vec::new();
        for (f, e) in merged {
            if e == 0 {
                continue;
            }
            match fold_constant(&f)? {
                Folded::Value(v) => {
                    if v.is_zero() {
                        if e > 0 {
                            return Ok(HyperTerm::zero());
                        }
                        return Err(Error::Pole { detail: format!("{:?} is zero with negative exponent", f) });
                    }
                    coeff = coeff.mul_rat(&pow_rat(&v, e));
                }
                Folded::Pole => {
                    if e > 0 {
                        return Err(Error::Pole { detail: format!("{:?}", f) });
                    }
                    return Ok(HyperTerm::zero());
                }
                Folded::Rational(r) => {
                    if r.is_zero() {
                        if e > 0 {
                            return Ok(HyperTerm::zero());
                        }
                        return Err(Error::Pole { detail: format!("{:?} is zero with negative exponent", f) });
                    }
                    coeff = coeff.mul(&r.pow(e));
                }
                Folded::Keep(Factor::Power(base, exp)) if e != 1 => {
                    // Fold the outer exponent into the linear exponent so
                    // exponential factors always carry exponent 1.
                    factors.push((Factor::Power(base, exp.mul_rat(&rat_i(e))), 1));
                }
                Folded::Keep(f) => factors.push((f, e)),
            }
        }
        if coeff.is_zero() {
            return Ok(HyperTerm::zero());
        }
        Ok(HyperTerm { coeff, factors })
    }

    pub fn mul_ratfunc(&self, r: &RatFunc) -> HyperTerm {
        if r.is_zero() || self.is_zero() {
            return HyperTerm::zero();
        }
        HyperTerm { coeff: self.coeff.mul(r), factors: self.factors.clone() }
    }

    pub fn neg(&self) -> HyperTerm {
        HyperTerm { coeff: self.coeff.neg(), factors: self.factors.clone() }
    }

    pub fn mul(&self, other: &HyperTerm) -> Result<HyperTerm> {
        if self.is_zero() || other.is_zero() {
            return Ok(HyperTerm::zero());
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        HyperTerm { coeff: self.coeff.mul(&other.coeff), factors }.normalize()
    }

    pub fn pow_int(&self, e: i64) -> Result<HyperTerm> {
        if e == 0 {
            return Ok(HyperTerm::one());
        }
        if self.is_zero() {
            if e < 0 {
                return Err(Error::Pole { detail: "zero term with negative exponent".into() });
            }
            return Ok(HyperTerm::zero());
        }
        let factors = self.factors.iter().map(|(f, x)| (f.clone(), x * e)).collect();
        HyperTerm { coeff: self.coeff.pow(e), factors }.normalize()
    }

    pub fn recip(&self) -> Result<HyperTerm> {
        self.pow_int(-1)
    }

    pub fn div(&self, other: &HyperTerm) -> Result<HyperTerm> {
        self.mul(&other.recip()?)
    }

    /// Substitutes v -> v + delta.
    pub fn shift(&self, v: Var, delta: &Rat) -> Result<HyperTerm> {
        let factors = self
            .factors
            .iter()
            .map(|(f, e)| (f.map_args(|a| a.shift(v, delta)), *e))
            .collect();
        HyperTerm { coeff: self.coeff.shift_var(v, delta), factors }.normalize()
    }

    /// Substitutes v -> factor * v.
    pub fn scale(&self, v: Var, factor: &Rat) -> Result<HyperTerm> {
        let poly = Poly::monomial(v, 1, factor.clone());
        let factors = self
            .factors
            .iter()
            .map(|(f, e)| (f.map_args(|a| a.scale(v, factor)), *e))
            .collect();
        HyperTerm { coeff: self.coeff.subst(v, &poly), factors }.normalize()
    }

    /// Substitutes a linear polynomial for v. The replacement must keep
    /// exponential bases free of the summation variables.
    pub fn subst_linear(&self, v: Var, replacement: &Poly) -> Result<HyperTerm> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for (f, e) in &self.factors {
            if let Factor::Power(base, _) = f {
                if base.vars().contains(&v)
                    && (replacement.vars().contains(&K) || replacement.vars().contains(&N))
                {
                    return Err(Error::InvalidInput {
                        detail: format!("substitution puts a summation variable into the base {}", base),
                    });
                }
            }
            let nf = match f {
                Factor::Power(base, exp) => {
                    let mut nb = base.clone();
                    if base.vars().contains(&v) {
                        nb = RatFunc::new(base.num().subst(v, replacement), base.den().subst(v, replacement));
                    }
                    Factor::Power(nb, exp.subst_linear(v, replacement)?)
                }
                other => other.try_map_args(|a| a.subst_linear(v, replacement))?,
            };
            factors.push((nf, *e));
        }
        HyperTerm { coeff: self.coeff.subst(v, replacement), factors }.normalize()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.coeff.vars().contains(&v) || self.factors.iter().any(|(f, _)| f.depends_on(v))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vars = self.coeff.vars();
        for (f, _) in &self.factors {
            for a in f.gamma_level_args() {
                vars.extend(a.poly().vars().iter().cloned());
            }
            if let Factor::Power(base, _) = f {
                vars.extend(base.vars());
            }
        }
        vars.sort();
        vars.dedup();
        vars
    }

    /// Exact numeric value at a full assignment.
    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Result<Rat> {
        if self.is_zero() {
            return Ok(Rat::zero());
        }
        let mut acc = self.coeff.eval(assign)?;
        let mut zero_factors = 0usize;
        for (f, e) in &self.factors {
            match f.eval(assign)? {
                FactorValue::Finite(v) => {
                    if v.is_zero() {
                        if *e > 0 {
                            zero_factors += 1;
                        } else {
                            return Err(Error::Pole { detail: format!("{:?} vanished with negative exponent", f) });
                        }
                    } else {
                        acc *= pow_rat(&v, *e);
                    }
                }
                FactorValue::GammaPole => {
                    if *e > 0 {
                        return Err(Error::Pole { detail: format!("{:?}", f) });
                    }
                    zero_factors += 1;
                }
                FactorValue::NotEvaluable(msg) => {
                    return Err(Error::NotEvaluable { detail: msg });
                }
            }
        }
        if zero_factors > 0 {
            return Ok(Rat::zero());
        }
        Ok(acc)
    }

    /// The value of the term at v = c, computed as a limit in v so that
    /// gamma poles of canceling orders contribute their exact residue
    /// ratios (Gamma(z) ~ (-1)^m / (m! (z+m)) near z = -m). Binomial and
    /// Pochhammer factors are decomposed into gamma values first, so this
    /// uses pure gamma semantics rather than the combinatorial zero
    /// conventions of pointwise evaluation — which is what telescoping
    /// boundary values require. Variables other than v stay symbolic and
    /// are treated as generic (their gamma arguments assumed off-pole).
    pub fn limit_at(&self, v: Var, c: &Rat) -> Result<Expr> {
        if self.is_zero() {
            return Ok(Expr::zero());
        }
        // Order of (v - c)^t carried by the term; poles count negative.
        let mut zero_order: i64 = 0;
        let mut unit = Rat::one();
        let mut residual = HyperTerm::one();
        let mut atoms: Vec<(LinearArg, i64)> = Vec::new();
        let one = Rat::one();
        for (f, e) in &self.factors {
            match f {
                Factor::Factorial(a) => atoms.push((a.add_rat(&one), *e)),
                Factor::Gamma(a) => atoms.push((a.clone(), *e)),
                Factor::Binomial(t, b) => {
                    atoms.push((t.add_rat(&one), *e));
                    atoms.push((b.add_rat(&one), -*e));
                    atoms.push((t.sub(b).add_rat(&one), -*e));
                }
                Factor::Pochhammer(b, count) => {
                    atoms.push((b.add(count), *e));
                    atoms.push((b.clone(), -*e));
                }
                Factor::Power(base, exp) => {
                    let exp_c = exp.subst_linear(v, &Poly::constant(c.clone()))?;
                    let base_c = if base.vars().contains(&v) {
                        let b = base.subst_rat(v, c)?;
                        if b.is_zero() {
                            return Err(Error::NotEvaluable {
                                detail: "power base vanishes at the boundary point".into(),
                            });
                        }
                        b
                    } else {
                        base.clone()
                    };
                    let pf = HyperTerm::from_factor(Factor::Power(base_c, exp_c))?;
                    residual = residual.mul(&pf.pow_int(*e)?)?;
                }
            }
        }
        for (arg, e) in atoms {
            let val = arg.poly().subst_rat(v, c);
            match val.constant_value() {
                Some(z) => {
                    match as_integer(&z) {
                        Some(i) if i.is_positive() => {
                            unit *= pow_rat(&Rat::from_integer(factorial_int(&(i - 1))), e);
                        }
                        Some(i) => {
                            // Gamma evaluated at the nonpositive integer -m.
                            let slope = arg.coeff(v);
                            if slope.is_zero() {
                                // The argument never moves with v: a true pole.
                                if e > 0 {
                                    return Err(Error::Pole {
                                        detail: format!("Gamma({}) in a boundary value", arg),
                                    });
                                }
                                return Ok(Expr::zero());
                            }
                            let m = -i;
                            let sign = if (&m % BigInt::from(2)).is_zero() { one.clone() } else { -one.clone() };
                            let mfact = Rat::from_integer(factorial_int(&m));
                            zero_order -= e;
                            unit *= pow_rat(&(sign / (mfact * slope)), e);
                        }
                        None => {
                            // Finite non-integer constant: keep Gamma(z).
                            let g = HyperTerm::from_factor(Factor::Gamma(LinearArg::constant(z)))?;
                            residual = residual.mul(&g.pow_int(e)?)?;
                        }
                    }
                }
                None => {
                    // Parameter-dependent argument: generic, finite.
                    let g = HyperTerm::from_factor(Factor::Gamma(LinearArg::new(val)?))?;
                    residual = residual.mul(&g.pow_int(e)?)?;
                }
            }
        }
        let vc = Poly::var(v).sub(&Poly::constant(c.clone()));
        let mut num = self.coeff.num().clone();
        while let Some(q) = num.exact_div(&vc) {
            num = q;
            zero_order += 1;
        }
        let mut den = self.coeff.den().clone();
        while let Some(q) = den.exact_div(&vc) {
            den = q;
            zero_order -= 1;
        }
        if zero_order > 0 {
            return Ok(Expr::zero());
        }
        if zero_order < 0 {
            return Err(Error::Pole {
                detail: format!("boundary value of {} at {}={} diverges", self, v, c),
            });
        }
        let coeff = RatFunc::new(num.subst_rat(v, c), den.subst_rat(v, c)).mul_rat(&unit);
        Ok(Expr::from_term(residual.mul_ratfunc(&coeff)))
    }
}

enum Folded {
    /// Constant factor with this exact value.
    Value(Rat),
    /// Constant-count factor that collapses to a rational function.
    Rational(RatFunc),
    /// Gamma at a nonpositive integer.
    Pole,
    /// Not constant; keep as is.
    Keep(Factor),
}

/// Folds factors whose value is forced: constant integer arguments, and
/// Pochhammer/binomial with constant integer counts (which collapse to
/// polynomials in the remaining variables).
fn fold_constant(f: &Factor) -> Result<Folded> {
    Ok(match f {
        Factor::Factorial(a) => match a.constant_value() {
            Some(c) => match as_integer(&c) {
                Some(i) if !i.is_negative() => Folded::Value(Rat::from_integer(factorial_int(&i))),
                Some(_) => Folded::Pole,
                None => Folded::Keep(f.clone()),
            },
            None => Folded::Keep(f.clone()),
        },
        Factor::Gamma(a) => match a.constant_value() {
            Some(c) => match as_integer(&(c - Rat::one())) {
                Some(i) if !i.is_negative() => Folded::Value(Rat::from_integer(factorial_int(&i))),
                Some(_) => Folded::Pole,
                None => Folded::Keep(f.clone()),
            },
            None => Folded::Keep(f.clone()),
        },
        Factor::Binomial(t, b) => {
            let bc = b.constant_value().and_then(|c| as_integer(&c));
            match bc {
                Some(bi) => {
                    if bi.is_negative() {
                        Folded::Value(Rat::zero())
                    } else if let Some(tc) = t.constant_value() {
                        Folded::Value(binomial_rat(&tc, &bi))
                    } else {
                        // binomial(t, b) = t(t-1)...(t-b+1)/b! as a polynomial in t.
                        let bi = crate::rational::as_i64_big(&bi).ok_or_else(|| Error::InvalidInput {
                            detail: "binomial count too large to expand".into(),
                        })?;
                        let mut num = Poly::one();
                        for i in 0..bi {
                            num = num.mul(&t.poly().sub(&Poly::constant(rat_i(i))));
                        }
                        let den = Poly::constant(Rat::from_integer(factorial_int(&BigInt::from(bi))));
                        Folded::Rational(RatFunc::new(num, den))
                    }
                }
                None => Folded::Keep(f.clone()),
            }
        }
        Factor::Pochhammer(b, c) => {
            let cc = c.constant_value().and_then(|v| as_integer(&v));
            match cc {
                Some(ci) => {
                    if let Some(bc) = b.constant_value() {
                        match pochhammer_rat(&bc, &ci) {
                            Some(v) => Folded::Value(v),
                            None => Folded::Pole,
                        }
                    } else {
                        let ci = crate::rational::as_i64_big(&ci).ok_or_else(|| Error::InvalidInput {
                            detail: "pochhammer count too large to expand".into(),
                        })?;
                        if ci >= 0 {
                            let mut num = Poly::one();
                            for i in 0..ci {
                                num = num.mul(&b.poly().add(&Poly::constant(rat_i(i))));
                            }
                            Folded::Rational(RatFunc::from_poly(num))
                        } else {
                            // (b)_(-m) = 1/((b-m)(b-m+1)...(b-1))
                            let m = -ci;
                            let mut den = Poly::one();
                            for i in 1..=m {
                                den = den.mul(&b.poly().sub(&Poly::constant(rat_i(i))));
                            }
                            Folded::Rational(RatFunc::new(Poly::one(), den))
                        }
                    }
                }
                None => Folded::Keep(f.clone()),
            }
        }
        Factor::Power(base, e) => {
            if base.is_one() {
                return Ok(Folded::Value(Rat::one()));
            }
            match e.constant_value() {
                Some(c) => match as_integer(&c).as_ref().and_then(crate::rational::as_i64_big) {
                    Some(i) => {
                        if base.is_zero() {
                            if i > 0 {
                                Folded::Value(Rat::zero())
                            } else if i == 0 {
                                Folded::Value(Rat::one())
                            } else {
                                return Err(Error::Pole { detail: "0 raised to a negative power".into() });
                            }
                        } else {
                            Folded::Rational(base.pow(i))
                        }
                    }
                    None => Folded::Keep(f.clone()),
                },
                None => {
                    if base.is_zero() {
                        return Err(Error::InvalidInput { detail: "0 raised to a symbolic power".into() });
                    }
                    Folded::Keep(f.clone())
                }
            }
        }
    })
}

/// A quotient of sums of hypergeometric terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    num: Vec<HyperTerm>,
    den: Vec<HyperTerm>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr { num: Vec::new(), den: vec![HyperTerm::one()] }
    }

    pub fn one() -> Expr {
        Expr::from_term(HyperTerm::one())
    }

    pub fn from_term(t: HyperTerm) -> Expr {
        if t.is_zero() {
            return Expr::zero();
        }
        Expr { num: vec![t], den: vec![HyperTerm::one()] }
    }

    pub fn from_ratfunc(r: RatFunc) -> Expr {
        Expr::from_term(HyperTerm::from_ratfunc(r))
    }

    pub fn from_rat(c: Rat) -> Expr {
        Expr::from_ratfunc(RatFunc::from_rat(c))
    }

    /// Builds a quotient of sums, normalizing zero terms, like terms, and
    /// single-term denominators.
    pub fn from_parts(num: Vec<HyperTerm>, den: Vec<HyperTerm>) -> Result<Expr> {
        Expr::build(num, den)
    }

    fn build(num: Vec<HyperTerm>, den: Vec<HyperTerm>) -> Result<Expr> {
        let num: Vec<HyperTerm> = num.into_iter().filter(|t| !t.is_zero()).collect();
        let den: Vec<HyperTerm> = den.into_iter().filter(|t| !t.is_zero()).collect();
        if den.is_empty() {
            return Err(Error::Pole { detail: "division by zero expression".into() });
        }
        let mut e = Expr { num, den };
        e.merge_like_terms();
        if e.num.is_empty() {
            return Ok(Expr::zero());
        }
        if e.den.len() == 1 && e.den[0] == HyperTerm::one() {
            return Ok(e);
        }
        // Single-term denominators divide straight into the numerator.
        if e.den.len() == 1 {
            let d = e.den[0].clone();
            let num: Result<Vec<HyperTerm>> = e.num.iter().map(|t| t.div(&d)).collect();
            return Ok(Expr { num: num?, den: vec![HyperTerm::one()] });
        }
        Ok(e)
    }

    fn merge_like_terms(&mut self) {
        for part in [&mut self.num, &mut self.den] {
            let mut merged: Vec<HyperTerm> = Vec::new();
            for t in part.drain(..) {
                if let Some(u) = merged.iter_mut().find(|u| u.factors() == t.factors()) {
                    let coeff = u.coeff().add(t.coeff());
                    *u = if coeff.is_zero() {
                        HyperTerm::zero()
                    } else {
                        HyperTerm { coeff, factors: t.factors().to_vec() }
                    };
                } else {
                    merged.push(t);
                }
            }
            merged.retain(|t| !t.is_zero());
            *part = merged;
        }
    }

    pub fn num_terms(&self) -> &[HyperTerm] {
        &self.num
    }

    pub fn den_terms(&self) -> &[HyperTerm] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// The term when the expression is a single product.
    pub fn as_single_term(&self) -> Option<HyperTerm> {
        if self.num.len() == 1 && self.den.len() == 1 {
            self.num[0].div(&self.den[0]).ok()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Expr) -> Result<Expr> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den == other.den {
            let mut num = self.num.clone();
            num.extend(other.num.iter().cloned());
            return Expr::build(num, self.den.clone());
        }
        let mut num = cross_mul(&self.num, &other.den)?;
        num.extend(cross_mul(&other.num, &self.den)?);
        Expr::build(num, cross_mul(&self.den, &other.den)?)
    }

    pub fn neg(&self) -> Expr {
        Expr { num: self.num.iter().map(HyperTerm::neg).collect(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Expr) -> Result<Expr> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Result<Expr> {
        if self.is_zero() || other.is_zero() {
            return Ok(Expr::zero());
        }
        Expr::build(cross_mul(&self.num, &other.num)?, cross_mul(&self.den, &other.den)?)
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::Pole { detail: "division by zero expression".into() });
        }
        if self.is_zero() {
            return Ok(Expr::zero());
        }
        Expr::build(cross_mul(&self.num, &other.den)?, cross_mul(&self.den, &other.num)?)
    }

    pub fn mul_ratfunc(&self, r: &RatFunc) -> Expr {
        if r.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.iter().map(|t| t.mul_ratfunc(r)).collect(),
            den: self.den.clone(),
        }
    }

    pub fn pow_int(&self, e: i64) -> Result<Expr> {
        if e == 0 {
            return Ok(Expr::one());
        }
        let base = if e < 0 {
            Expr { num: self.den.clone(), den: self.num.clone() }
        } else {
            self.clone()
        };
        if base.den.is_empty() {
            return Err(Error::Pole { detail: "zero expression with negative exponent".into() });
        }
        let mut acc = Expr::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    pub fn shift(&self, v: Var, delta: &Rat) -> Result<Expr> {
        let num: Result<Vec<_>> = self.num.iter().map(|t| t.shift(v, delta)).collect();
        let den: Result<Vec<_>> = self.den.iter().map(|t| t.shift(v, delta)).collect();
        Expr::build(num?, den?)
    }

    pub fn scale(&self, v: Var, factor: &Rat) -> Result<Expr> {
        let num: Result<Vec<_>> = self.num.iter().map(|t| t.scale(v, factor)).collect();
        let den: Result<Vec<_>> = self.den.iter().map(|t| t.scale(v, factor)).collect();
        Expr::build(num?, den?)
    }

    pub fn subst_linear(&self, v: Var, replacement: &Poly) -> Result<Expr> {
        let num: Result<Vec<_>> = self.num.iter().map(|t| t.subst_linear(v, replacement)).collect();
        let den: Result<Vec<_>> = self.den.iter().map(|t| t.subst_linear(v, replacement)).collect();
        Expr::build(num?, den?)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.iter().chain(self.den.iter()).any(|t| t.depends_on(v))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = Vec::new();
        for t in self.num.iter().chain(self.den.iter()) {
            vars.extend(t.vars());
        }
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Result<Rat> {
        let mut den = Rat::zero();
        for t in &self.den {
            den += t.eval(assign)?;
        }
        if den.is_zero() {
            return Err(Error::Pole { detail: "expression denominator vanished".into() });
        }
        let mut num = Rat::zero();
        for t in &self.num {
            num += t.eval(assign)?;
        }
        Ok(num / den)
    }

    /// Limit of the expression at v = c; see `HyperTerm::limit_at`. Pole
    /// cancellation is handled within each term, not across terms of a sum.
    pub fn limit_at(&self, v: Var, c: &Rat) -> Result<Expr> {
        let mut num = Expr::zero();
        for t in &self.num {
            num = num.add(&t.limit_at(v, c)?)?;
        }
        if self.den.len() == 1 && self.den[0] == HyperTerm::one() {
            return Ok(num);
        }
        let mut den = Expr::zero();
        for t in &self.den {
            den = den.add(&t.limit_at(v, c)?)?;
        }
        num.div(&den)
    }
}

fn cross_mul(a: &[HyperTerm], b: &[HyperTerm]) -> Result<Vec<HyperTerm>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x.mul(y)?);
        }
    }
    Ok(out)
}

/// The summand of a generalized hypergeometric series:
/// prod (u_i)_k * x^k / (k! * prod (l_j)_k).
pub fn series_summand(upper: &[LinearArg], lower: &[LinearArg], x: &RatFunc) -> Result<Expr> {
    let karg = LinearArg::var(K);
    let mut t = HyperTerm::from_factor(Factor::Power(x.clone(), karg.clone()))?;
    for u in upper {
        t = t.mul(&HyperTerm::from_factor(Factor::Pochhammer(u.clone(), karg.clone()))?)?;
    }
    t = t.mul(&HyperTerm::from_factor(Factor::Factorial(karg.clone()))?.recip()?)?;
    for l in lower {
        t = t.mul(&HyperTerm::from_factor(Factor::Pochhammer(l.clone(), karg.clone()))?.recip()?)?;
    }
    Ok(Expr::from_term(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn karg() -> LinearArg {
        LinearArg::var(K)
    }

    fn narg() -> LinearArg {
        LinearArg::var(N)
    }

    fn binom_nk() -> HyperTerm {
        HyperTerm::from_factor(Factor::Binomial(narg(), karg())).unwrap()
    }

    fn assign(k: i64, n: i64) -> BTreeMap<Var, Rat> {
        let mut m = BTreeMap::new();
        m.insert(K, rat_i(k));
        m.insert(N, rat_i(n));
        m
    }

    #[test]
    fn linear_arg_rejects_nonlinear() {
        let p = Poly::var(K).mul(&Poly::var(N));
        assert!(matches!(LinearArg::new(p), Err(Error::NonLinearArgument { .. })));
        let q = Poly::var(K).mul_rat(&rat(1, 2)).add(&Poly::var(Var('a')));
        let a = LinearArg::new(q).unwrap();
        assert_eq!(a.coeff(K), rat(1, 2));
        assert_eq!(a.coeff(N), rat_i(0));
    }

    #[test]
    fn constant_factors_fold() {
        // 3! * binomial(5, 2) = 6 * 10 = 60
        let t = HyperTerm::from_factor(Factor::Factorial(LinearArg::constant(rat_i(3))))
            .unwrap()
            .mul(&HyperTerm::from_factor(Factor::Binomial(
                LinearArg::constant(rat_i(5)),
                LinearArg::constant(rat_i(2)),
            )).unwrap())
            .unwrap();
        assert_eq!(t, HyperTerm::from_ratfunc(RatFunc::from_int(60)));
    }

    #[test]
    fn pochhammer_with_integer_count_expands() {
        // (n)_2 = n(n+1)
        let t = HyperTerm::from_factor(Factor::Pochhammer(narg(), LinearArg::constant(rat_i(2)))).unwrap();
        let expect = RatFunc::from_poly(Poly::var(N).mul(&Poly::var(N).add(&Poly::one())));
        assert_eq!(t, HyperTerm::from_ratfunc(expect));
    }

    #[test]
    fn reciprocal_factorial_of_negative_integer_is_zero() {
        // 1/(-2)! = 0
        let f = HyperTerm::from_factor(Factor::Factorial(LinearArg::constant(rat_i(-2))));
        assert!(matches!(f, Err(Error::Pole { .. })));
        let t = HyperTerm { coeff: RatFunc::one(), factors: vec![(Factor::Factorial(LinearArg::constant(rat_i(-2))), -1)] };
        assert_eq!(t.normalize().unwrap(), HyperTerm::zero());
    }

    #[test]
    fn merge_and_cancel_factors() {
        // k! / k! = 1
        let t = HyperTerm::from_factor(Factor::Factorial(karg())).unwrap();
        assert_eq!(t.div(&t).unwrap(), HyperTerm::one());
    }

    #[test]
    fn binomial_eval_matches_pascal() {
        let t = binom_nk();
        assert_eq!(t.eval(&assign(2, 5)).unwrap(), rat_i(10));
        assert_eq!(t.eval(&assign(7, 5)).unwrap(), rat_i(0));
        assert_eq!(t.eval(&assign(-1, 5)).unwrap(), rat_i(0));
    }

    #[test]
    fn factorial_quotient_eval() {
        // n!/(k!(n-k)!) at (k,n)=(2,4) -> 6
        let t = HyperTerm::from_factor(Factor::Factorial(narg()))
            .unwrap()
            .div(&HyperTerm::from_factor(Factor::Factorial(karg())).unwrap())
            .unwrap()
            .div(&HyperTerm::from_factor(Factor::Factorial(narg().sub(&karg()))).unwrap())
            .unwrap();
        assert_eq!(t.eval(&assign(2, 4)).unwrap(), rat_i(6));
        // beyond the support the reciprocal gamma is zero
        assert_eq!(t.eval(&assign(6, 4)).unwrap(), rat_i(0));
    }

    #[test]
    fn shift_moves_arguments() {
        let t = binom_nk().shift(K, &rat_i(-1)).unwrap();
        assert_eq!(t.eval(&assign(3, 5)).unwrap(), rat_i(10));
    }

    #[test]
    fn scale_multiplies_variable() {
        // binomial(n, 2k) at k=1, n=5 -> C(5,2) = 10
        let t = binom_nk().scale(K, &rat_i(2)).unwrap();
        assert_eq!(t.eval(&assign(1, 5)).unwrap(), rat_i(10));
    }

    #[test]
    fn power_factor_eval() {
        // (-1)^k * 2^(n-k)
        let t = HyperTerm::from_factor(Factor::Power(RatFunc::from_int(-1), karg()))
            .unwrap()
            .mul(&HyperTerm::from_factor(Factor::Power(RatFunc::from_int(2), narg().sub(&karg()))).unwrap())
            .unwrap();
        assert_eq!(t.eval(&assign(3, 5)).unwrap(), rat_i(-4));
    }

    #[test]
    fn non_integer_factorial_is_not_evaluable() {
        let t = HyperTerm::from_factor(Factor::Factorial(karg().mul_rat(&rat(1, 2)))).unwrap();
        assert!(matches!(t.eval(&assign(3, 0)), Err(Error::NotEvaluable { .. })));
        assert_eq!(t.eval(&assign(4, 0)).unwrap(), rat_i(2));
    }

    #[test]
    fn expr_addition_and_eval() {
        // binomial(n,k) + 1 at (2,4) -> 7
        let e = Expr::from_term(binom_nk()).add(&Expr::one()).unwrap();
        assert_eq!(e.eval(&assign(2, 4)).unwrap(), rat_i(7));
        // like terms merge: C(n,k) + C(n,k) has a single numerator term
        let d = Expr::from_term(binom_nk()).add(&Expr::from_term(binom_nk())).unwrap();
        assert_eq!(d.num_terms().len(), 1);
        assert_eq!(d.eval(&assign(2, 4)).unwrap(), rat_i(12));
    }

    #[test]
    fn expr_division_by_sum_keeps_quotient() {
        let e = Expr::one().div(&Expr::from_term(binom_nk()).add(&Expr::one()).unwrap()).unwrap();
        assert_eq!(e.den_terms().len(), 2);
        assert_eq!(e.eval(&assign(2, 4)).unwrap(), rat(1, 7));
    }

    #[test]
    fn series_summand_matches_binomial_sum() {
        // 2F1(-n, b; b; -1) summand at x=-1 with upper {-n}, lower {} is
        // (-n)_k (-1)^k / k! = binomial(n, k)
        let s = series_summand(&[narg().mul_rat(&rat_i(-1))], &[], &RatFunc::from_int(-1)).unwrap();
        for (k, n) in [(0i64, 5i64), (2, 5), (5, 5), (3, 7)] {
            assert_eq!(s.eval(&assign(k, n)).unwrap(), binom_nk().eval(&assign(k, n)).unwrap());
        }
    }
}
