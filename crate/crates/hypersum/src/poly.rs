//! Exact multivariate polynomials over the rationals with free parameters.
//!
//! Coefficients are arbitrary-precision rationals; variables follow the fixed
//! global order (k, n, then parameters alphabetically). The representation is
//! canonical: the variable list is minimal and sorted, no zero coefficients
//! are stored, so structural equality is mathematical equality.
//!
//! Provides the algebraic workhorses required upstream: exact division,
//! content/primitive-part normalization, multivariate gcd (subresultant
//! pseudo-remainder sequences with deterministic specialization quick-outs),
//! Sylvester resultants via fraction-free Bareiss elimination, and extraction
//! of nonnegative integer roots in one variable with parameter coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{as_i64, gcd_int, gcd_rat, rat_i, Rat};
use crate::var::Var;

/// A multivariate polynomial in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    vars: Vec<Var>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

/// Deterministic specialization points used by gcd/root-candidate quick
/// paths. Each ladder rung assigns distinct values to parameters; candidates
/// found under a specialization are always re-verified symbolically.
const SPEC_LADDER: [&[i64]; 4] = [
    &[3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47],
    &[101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167],
    &[1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049, 1051, 1061, 1063, 1069, 1087, 1091],
    &[7919, 7927, 7933, 7937, 7949, 7951, 7963, 7993, 8009, 8011, 8017, 8039, 8053, 8059],
];

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Poly {
        Poly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    /// The constant polynomial 1.
    pub fn one() -> Poly {
        Poly::constant(Rat::one())
    }

    /// A constant polynomial.
    pub fn constant(c: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { vars: Vec::new(), terms }
    }

    /// The polynomial consisting of the single variable v.
    pub fn var(v: Var) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rat::one());
        Poly { vars: vec![v], terms }
    }

    /// c * v^e.
    pub fn monomial(v: Var, e: u32, c: Rat) -> Poly {
        if c.is_zero() || e == 0 {
            return Poly::constant(c);
        }
        let mut terms = BTreeMap::new();
        terms.insert(vec![e], c);
        Poly { vars: vec![v], terms }
    }

    /// Builds a polynomial from (variable-power list, coefficient) pairs.
    pub fn from_terms(raw: Vec<(Vec<(Var, u32)>, Rat)>) -> Poly {
        let mut acc = Poly::zero();
        for (pows, c) in raw {
            let mut t = Poly::constant(c);
            for (v, e) in pows {
                t = t.mul(&Poly::monomial(v, e, Rat::one()));
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The value of a constant polynomial (zero polynomial gives 0).
    pub fn constant_value(&self) -> Option<Rat> {
        if !self.vars.is_empty() {
            return None;
        }
        Some(self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rat::zero))
    }

    /// Coefficient of the monomial 1, whatever the other terms are.
    pub fn constant_term(&self) -> Rat {
        let key = vec![0u32; self.vars.len()];
        self.terms.get(&key).cloned().unwrap_or_else(Rat::zero)
    }

    /// The variables actually occurring.
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn position(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|w| *w == v)
    }

    /// Canonicalize: drop zero coefficients and unused variables.
    fn normalize(mut self) -> Poly {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() {
            return Poly::zero();
        }
        let nv = self.vars.len();
        let mut used = vec![false; nv];
        for key in self.terms.keys() {
            for (i, e) in key.iter().enumerate() {
                if *e > 0 {
                    used[i] = true;
                }
            }
        }
        if used.iter().all(|u| *u) {
            return self;
        }
        let keep: Vec<usize> = (0..nv).filter(|i| used[*i]).collect();
        let vars: Vec<Var> = keep.iter().map(|i| self.vars[*i]).collect();
        let mut terms = BTreeMap::new();
        for (key, c) in self.terms {
            let nk: Vec<u32> = keep.iter().map(|i| key[*i]).collect();
            terms.insert(nk, c);
        }
        Poly { vars, terms }
    }

    /// Remaps both polynomials onto the union of their variable lists.
    fn unify(a: &Poly, b: &Poly) -> (Vec<Var>, BTreeMap<Vec<u32>, Rat>, BTreeMap<Vec<u32>, Rat>) {
        let mut vars: Vec<Var> = a.vars.iter().chain(b.vars.iter()).cloned().collect();
        vars.sort();
        vars.dedup();
        fn remap(p: &Poly, vars: &[Var]) -> BTreeMap<Vec<u32>, Rat> {
            let idx: Vec<usize> = p
                .vars
                .iter()
                .map(|v| vars.iter().position(|w| w == v).unwrap())
                .collect();
            p.terms
                .iter()
                .map(|(key, c)| {
                    let mut nk = vec![0u32; vars.len()];
                    for (i, e) in key.iter().enumerate() {
                        nk[idx[i]] = *e;
                    }
                    (nk, c.clone())
                })
                .collect()
        }
        let ta = remap(a, &vars);
        let tb = remap(b, &vars);
        (vars, ta, tb)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (vars, ta, tb) = Poly::unify(self, other);
        let mut terms = ta;
        for (k, c) in tb {
            let e = terms.entry(k).or_insert_with(Rat::zero);
            *e += c;
        }
        Poly { vars, terms }.normalize()
    }

    pub fn neg(&self) -> Poly {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect();
        Poly { vars: self.vars.clone(), terms }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.mul_rat(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.mul_rat(&c);
        }
        let (vars, ta, tb) = Poly::unify(self, other);
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (ka, ca) in &ta {
            for (kb, cb) in &tb {
                let key: Vec<u32> = ka.iter().zip(kb.iter()).map(|(x, y)| x + y).collect();
                let e = terms.entry(key).or_insert_with(Rat::zero);
                *e += ca * cb;
            }
        }
        Poly { vars, terms }.normalize()
    }

    pub fn mul_rat(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        Poly { vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Degree in v; the zero polynomial has degree -1 in every variable.
    pub fn degree(&self, v: Var) -> i64 {
        if self.is_zero() {
            return -1;
        }
        match self.position(v) {
            None => 0,
            Some(i) => self.terms.keys().map(|k| k[i] as i64).max().unwrap(),
        }
    }

    pub fn total_degree(&self) -> i64 {
        if self.is_zero() {
            return -1;
        }
        self.terms
            .keys()
            .map(|k| k.iter().map(|e| *e as i64).sum())
            .max()
            .unwrap()
    }

    /// Coefficient of v^e, a polynomial in the remaining variables.
    pub fn coeff_of(&self, v: Var, e: u32) -> Poly {
        let Some(i) = self.position(v) else {
            return if e == 0 { self.clone() } else { Poly::zero() };
        };
        let mut terms = BTreeMap::new();
        for (key, c) in &self.terms {
            if key[i] == e {
                let mut nk = key.clone();
                nk.remove(i);
                terms.insert(nk, c.clone());
            }
        }
        let mut vars = self.vars.clone();
        vars.remove(i);
        Poly { vars, terms }.normalize()
    }

    /// Dense coefficient list in v, ascending powers, length degree+1.
    /// The zero polynomial gives an empty list.
    pub fn coeff_list(&self, v: Var) -> Vec<Poly> {
        if self.is_zero() {
            return Vec::new();
        }
        let d = self.degree(v);
        (0..=d as u32).map(|e| self.coeff_of(v, e)).collect()
    }

    /// Rebuilds a polynomial from an ascending coefficient list in v.
    pub fn from_coeff_list(v: Var, coeffs: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            acc = acc.add(&c.mul(&Poly::monomial(v, e as u32, Rat::one())));
        }
        acc
    }

    /// Leading coefficient with respect to v.
    pub fn leading_coeff(&self, v: Var) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.coeff_of(v, self.degree(v) as u32)
    }

    /// Graded-lexicographic comparison of exponent keys (total degree first,
    /// then lexicographic with the earliest variable most significant).
    fn grlex(a: &[u32], b: &[u32]) -> Ordering {
        let ta: u64 = a.iter().map(|e| *e as u64).sum();
        let tb: u64 = b.iter().map(|e| *e as u64).sum();
        ta.cmp(&tb).then_with(|| a.cmp(b))
    }

    /// The terms in descending canonical (grlex) order.
    pub fn ordered_terms(&self) -> Vec<(Vec<(Var, u32)>, Rat)> {
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| Poly::grlex(b, a));
        keys.iter()
            .map(|k| {
                let pows: Vec<(Var, u32)> = self
                    .vars
                    .iter()
                    .zip(k.iter())
                    .filter(|(_, e)| **e > 0)
                    .map(|(v, e)| (*v, *e))
                    .collect();
                (pows, self.terms[*k].clone())
            })
            .collect()
    }

    /// Coefficient of the grlex-leading term.
    pub fn leading_term_coeff(&self) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let key = self.terms.keys().max_by(|a, b| Poly::grlex(a, b)).unwrap();
        self.terms[key].clone()
    }

    /// Rational content: nonnegative gcd of all coefficients. No early exit
    /// is possible: gcd_rat(1, 1/2) = 1/2, so even a running value of one can
    /// still shrink when later coefficients have denominators.
    pub fn content(&self) -> Rat {
        let mut acc = Rat::zero();
        for c in self.terms.values() {
            acc = gcd_rat(&acc, c);
        }
        acc
    }

    /// Scales to integer coprime coefficients with positive leading
    /// coefficient. Returns (normalized, factor) with self = factor * normalized.
    pub fn primitive_positive(&self) -> (Poly, Rat) {
        if self.is_zero() {
            return (Poly::zero(), Rat::one());
        }
        let mut f = self.content();
        if self.leading_term_coeff().is_negative() {
            f = -f;
        }
        (self.mul_rat(&f.recip()), f)
    }

    /// Exact division; None when other does not divide self.
    pub fn exact_div(&self, other: &Poly) -> Option<Poly> {
        assert!(!other.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = other.constant_value() {
            return Some(self.mul_rat(&c.recip()));
        }
        let (vars, ta, tb) = Poly::unify(self, other);
        let mut rem = ta;
        let mut quo: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        let (ltb_key, ltb_c) = {
            let key = tb.keys().max_by(|a, b| Poly::grlex(a, b)).unwrap().clone();
            let c = tb[&key].clone();
            (key, c)
        };
        while !rem.is_empty() {
            let ltr_key = rem.keys().max_by(|a, b| Poly::grlex(a, b)).unwrap().clone();
            let ltr_c = rem[&ltr_key].clone();
            if ltr_key.iter().zip(ltb_key.iter()).any(|(r, b)| r < b) {
                return None;
            }
            let qk: Vec<u32> = ltr_key.iter().zip(ltb_key.iter()).map(|(r, b)| r - b).collect();
            let qc = &ltr_c / &ltb_c;
            for (kb, cb) in &tb {
                let key: Vec<u32> = qk.iter().zip(kb.iter()).map(|(x, y)| x + y).collect();
                let e = rem.entry(key).or_insert_with(Rat::zero);
                *e -= &qc * cb;
            }
            rem.retain(|_, c| !c.is_zero());
            quo.insert(qk, qc);
        }
        Some(Poly { vars, terms: quo }.normalize())
    }

    /// Substitutes a polynomial for v (Horner evaluation).
    pub fn subst(&self, v: Var, replacement: &Poly) -> Poly {
        if self.position(v).is_none() {
            return self.clone();
        }
        let coeffs = self.coeff_list(v);
        let mut acc = Poly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(replacement).add(c);
        }
        acc
    }

    /// Substitutes a rational value for v.
    pub fn subst_rat(&self, v: Var, value: &Rat) -> Poly {
        let Some(i) = self.position(v) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        vars.remove(i);
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (key, c) in &self.terms {
            let e = key[i];
            let mut nk = key.clone();
            nk.remove(i);
            let scaled = c * crate::rational::pow_rat(value, e as i64);
            let slot = terms.entry(nk).or_insert_with(Rat::zero);
            *slot += scaled;
        }
        (Poly { vars, terms }).normalize()
    }

    /// Shifts v by a rational constant: v -> v + delta.
    pub fn shift_var(&self, v: Var, delta: &Rat) -> Poly {
        if delta.is_zero() || self.position(v).is_none() {
            return self.clone();
        }
        let rep = Poly::var(v).add(&Poly::constant(delta.clone()));
        self.subst(v, &rep)
    }

    /// Evaluates at a full assignment; Err carries the first unassigned variable.
    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Result<Rat, Var> {
        for v in &self.vars {
            if !assign.contains_key(v) {
                return Err(*v);
            }
        }
        let mut acc = Rat::zero();
        for (key, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in self.vars.iter().zip(key.iter()) {
                if *e > 0 {
                    t *= crate::rational::pow_rat(&assign[v], *e as i64);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Pseudo-remainder of self by other with respect to v:
    /// lc(other)^(deg self - deg other + 1) * self = q*other + rem.
    pub fn pseudo_rem(&self, other: &Poly, v: Var) -> Poly {
        let db = other.degree(v);
        assert!(db >= 0, "pseudo-division by zero polynomial");
        let lb = other.leading_coeff(v);
        let mut rem = self.clone();
        let da = self.degree(v);
        if da < db {
            // multiplier is lb^(da-db+1), but the convention for da < db is rem = self
            return rem;
        }
        let mut mults = 0i64;
        while !rem.is_zero() && rem.degree(v) >= db {
            let dr = rem.degree(v);
            let lr = rem.leading_coeff(v);
            let shift = Poly::monomial(v, (dr - db) as u32, Rat::one());
            rem = rem.mul(&lb).sub(&other.mul(&lr).mul(&shift));
            mults += 1;
        }
        let needed = da - db + 1;
        let mut extra = needed - mults;
        while extra > 0 {
            rem = rem.mul(&lb);
            extra -= 1;
        }
        rem
    }

    /// Content with respect to v: gcd of the coefficient polynomials,
    /// primitive-positive.
    pub fn content_in(&self, v: Var) -> Poly {
        let coeffs = self.coeff_list(v);
        let mut acc = Poly::zero();
        for c in coeffs {
            if c.is_zero() {
                continue;
            }
            acc = poly_gcd(&acc, &c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// Primitive part with respect to v.
    pub fn primitive_in(&self, v: Var) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content_in(v);
        self.exact_div(&c).expect("content must divide")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (pows, c) in self.ordered_terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            // A fractional coefficient prints as a trailing division
            // (k/2, 3*k/2) so that arguments keep their conventional shape.
            let mut parts: Vec<String> = Vec::new();
            if !mag.numer().is_one() || pows.is_empty() {
                parts.push(format!("{}", mag.numer()));
            }
            for (v, e) in pows {
                if e == 1 {
                    parts.push(format!("{}", v));
                } else {
                    parts.push(format!("{}^{}", v, e));
                }
            }
            write!(f, "{}", parts.join("*"))?;
            if !mag.denom().is_one() {
                write!(f, "/{}", mag.denom())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Formats a nonnegative-denominator rational in the expression grammar.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Greatest common divisor, content-normalized with positive leading
/// coefficient; poly_gcd(p, 0) = normalized p.
pub fn poly_gcd(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() {
        return q.primitive_positive().0;
    }
    if q.is_zero() {
        return p.primitive_positive().0;
    }
    if p.is_constant() || q.is_constant() {
        return Poly::one();
    }
    if p == q {
        return p.primitive_positive().0;
    }
    let common: Vec<Var> = p.vars().iter().filter(|v| q.vars().contains(v)).cloned().collect();
    if common.is_empty() {
        return Poly::one();
    }
    // Pick the shared variable with the smallest joint degree: fewest PRS steps.
    let v = *common
        .iter()
        .min_by_key(|v| p.degree(**v).min(q.degree(**v)))
        .unwrap();
    let cp = p.content_in(v);
    let cq = q.content_in(v);
    let gc = poly_gcd(&cp, &cq);
    let pp = p.exact_div(&cp).unwrap();
    let qq = q.exact_div(&cq).unwrap();
    let gp = gcd_primitive(&pp, &qq, v);
    gc.mul(&gp).primitive_positive().0
}

/// gcd of two polynomials that are primitive with respect to v.
fn gcd_primitive(p: &Poly, q: &Poly, v: Var) -> Poly {
    let (a, b) = if p.degree(v) >= q.degree(v) { (p, q) } else { (q, p) };
    if b.degree(v) == 0 {
        return Poly::one();
    }
    // Specialization quick-out: if a deterministic evaluation of the other
    // variables keeps lc_v(a) nonzero and yields coprime univariate images,
    // the polynomials are coprime in v.
    if coprime_by_specialization(a, b, v) {
        return Poly::one();
    }
    subresultant_gcd(a, b, v)
}

fn shared_assignment(a: &Poly, b: &Poly, v: Var, points: &[i64]) -> Option<BTreeMap<Var, Rat>> {
    let mut vars: Vec<Var> = a.vars().iter().chain(b.vars().iter()).cloned().collect();
    vars.sort();
    vars.dedup();
    vars.retain(|w| *w != v);
    if vars.len() > points.len() {
        return None;
    }
    Some(vars.iter().enumerate().map(|(i, w)| (*w, rat_i(points[i]))).collect())
}

fn specialize_univariate(p: &Poly, v: Var, assign: &BTreeMap<Var, Rat>) -> Vec<Rat> {
    p.coeff_list(v)
        .iter()
        .map(|c| c.eval(assign).expect("assignment covers all variables"))
        .collect()
}

fn coprime_by_specialization(a: &Poly, b: &Poly, v: Var) -> bool {
    for points in SPEC_LADDER {
        let Some(assign) = shared_assignment(a, b, v, points) else {
            return false;
        };
        let ua = specialize_univariate(a, v, &assign);
        let ub = specialize_univariate(b, v, &assign);
        // The true gcd's leading coefficient divides lc_v(a); if lc_v(a)
        // survives the specialization, the specialized gcd degree bounds the
        // true gcd degree from above.
        if ua.last().map(|c| c.is_zero()).unwrap_or(true) {
            continue;
        }
        let g = univariate_gcd(&ua, &ub);
        return g.len() == 1;
    }
    false
}

/// gcd of two univariate rational coefficient vectors (ascending powers),
/// returned monic. Inputs must be nonzero.
fn univariate_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        v
    }
    let mut f = trim(a.to_vec());
    let mut g = trim(b.to_vec());
    if f.is_empty() {
        return g;
    }
    if g.is_empty() {
        return f;
    }
    while !g.is_empty() {
        if f.len() < g.len() {
            std::mem::swap(&mut f, &mut g);
            continue;
        }
        // f mod g
        let lg = g.last().unwrap().clone();
        while f.len() >= g.len() && !f.is_empty() {
            let lf = f.last().unwrap().clone();
            if lf.is_zero() {
                f.pop();
                continue;
            }
            let q = &lf / &lg;
            let off = f.len() - g.len();
            for (i, gc) in g.iter().enumerate() {
                let x = &q * gc;
                f[off + i] -= x;
            }
            f = trim(f);
        }
        std::mem::swap(&mut f, &mut g);
    }
    let lead = f.last().unwrap().clone();
    f.iter().map(|c| c / &lead).collect()
}

/// Subresultant pseudo-remainder sequence gcd; inputs primitive in v with
/// deg_v(a) >= deg_v(b) > 0.
fn subresultant_gcd(a: &Poly, b: &Poly, v: Var) -> Poly {
    let mut c = a.clone();
    let mut d = b.clone();
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = (c.degree(v) - d.degree(v)) as u32;
        let r = c.pseudo_rem(&d, v);
        if r.is_zero() {
            return d.primitive_in(v).primitive_positive().0;
        }
        if r.degree(v) == 0 {
            return Poly::one();
        }
        c = d;
        let divisor = g.mul(&h.pow(delta));
        d = r.exact_div(&divisor).expect("subresultant division is exact");
        g = c.leading_coeff(v);
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant h-update is exact"),
        };
    }
}

/// Least common multiple, content-normalized.
pub fn poly_lcm(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() || q.is_zero() {
        return Poly::zero();
    }
    let g = poly_gcd(p, q);
    let cof = q.exact_div(&g).unwrap();
    p.mul(&cof).primitive_positive().0
}

/// Resultant of p and q eliminating v, exact (Sylvester determinant via
/// fraction-free Bareiss elimination).
pub fn resultant(p: &Poly, q: &Poly, v: Var) -> Poly {
    if p.is_zero() || q.is_zero() {
        return Poly::zero();
    }
    let dp = p.degree(v);
    let dq = q.degree(v);
    if dp == 0 {
        return p.pow(dq as u32);
    }
    if dq == 0 {
        return q.pow(dp as u32);
    }
    let n = (dp + dq) as usize;
    let pc = p.coeff_list(v);
    let qc = q.coeff_list(v);
    let mut m: Vec<Vec<Poly>> = vec![vec![Poly::zero(); n]; n];
    for row in 0..dq as usize {
        for (i, c) in pc.iter().rev().enumerate() {
            m[row][row + i] = c.clone();
        }
    }
    for row in 0..dp as usize {
        for (i, c) in qc.iter().rev().enumerate() {
            m[dq as usize + row][row + i] = c.clone();
        }
    }
    bareiss_determinant(m)
}

/// Fraction-free determinant of a square polynomial matrix.
pub fn bareiss_determinant(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut sign = false;
    let mut prev = Poly::one();
    for i in 0..n {
        let pivot_row = (i..n).find(|r| !m[*r][i].is_zero());
        let Some(pr) = pivot_row else {
            return Poly::zero();
        };
        if pr != i {
            m.swap(pr, i);
            sign = !sign;
        }
        for r in i + 1..n {
            for c in i + 1..n {
                let t = m[i][i].mul(&m[r][c]).sub(&m[r][i].mul(&m[i][c]));
                m[r][c] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
            m[r][i] = Poly::zero();
        }
        prev = m[i][i].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

/// All nonnegative integers j such that substituting var -> j makes p vanish
/// identically in the remaining parameters.
///
/// Candidates come from integer divisors of the trailing coefficient of a
/// deterministic parameter specialization; every candidate is verified
/// symbolically, so the result is exact.
pub fn nonneg_integer_roots(p: &Poly, var: Var) -> BTreeSet<i64> {
    assert!(!p.is_zero(), "integer roots of the zero polynomial requested");
    let mut roots = BTreeSet::new();
    let coeffs = p.coeff_list(var);
    if coeffs.len() <= 1 {
        return roots;
    }
    let trail = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    if trail > 0 {
        roots.insert(0);
    }
    let stripped: Vec<Poly> = coeffs[trail..].to_vec();
    if stripped.len() <= 1 {
        return roots;
    }
    let mut candidates: Option<BTreeSet<i64>> = None;
    let mut shrink: Option<BigInt> = None;
    for points in SPEC_LADDER {
        let uni = match specialize_coeffs(&stripped, points) {
            Some(u) => u,
            None => continue,
        };
        if uni[0].is_zero() {
            continue;
        }
        // Clear denominators to an integer polynomial.
        let mut lcm = BigInt::one();
        for c in &uni {
            lcm = crate::rational::lcm_int(&lcm, c.denom());
        }
        let ints: Vec<BigInt> = uni.iter().map(|c| (c * Rat::from_integer(lcm.clone())).numer().clone()).collect();
        let trail_abs = ints[0].abs();
        let bound = match &shrink {
            None => trail_abs.clone(),
            Some(g) => gcd_int(g, &trail_abs),
        };
        shrink = Some(bound.clone());
        if bound.to_i64().is_none() && candidates.is_none() {
            // Trailing data too large; combine with the next rung's gcd.
            continue;
        }
        let cands = divisors_up_to(&bound)
            .into_iter()
            .filter(|d| horner_is_zero(&ints, *d))
            .collect::<BTreeSet<i64>>();
        candidates = Some(match candidates {
            None => cands,
            Some(prev) => prev.intersection(&cands).cloned().collect(),
        });
        break;
    }
    let candidates = candidates.unwrap_or_default();
    for j in candidates {
        let image = p.subst_rat(var, &rat_i(j));
        if image.is_zero() {
            roots.insert(j);
        }
    }
    roots
}

fn specialize_coeffs(coeffs: &[Poly], points: &[i64]) -> Option<Vec<Rat>> {
    let mut vars: Vec<Var> = Vec::new();
    for c in coeffs {
        for v in c.vars() {
            if !vars.contains(v) {
                vars.push(*v);
            }
        }
    }
    vars.sort();
    if vars.len() > points.len() {
        return None;
    }
    let assign: BTreeMap<Var, Rat> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, rat_i(points[i])))
        .collect();
    Some(coeffs.iter().map(|c| c.eval(&assign).unwrap()).collect())
}

fn divisors_up_to(n: &BigInt) -> Vec<i64> {
    let n = n.abs();
    let Some(n64) = n.to_i64() else {
        // Desk-scale inputs keep trailing data small; a huge bound here means
        // the specialization was degenerate, so fall back to an empty set
        // (roots would still be caught by another ladder rung).
        return Vec::new();
    };
    let mut divs = Vec::new();
    let mut d = 1i64;
    while d.saturating_mul(d) <= n64 {
        if n64 % d == 0 {
            divs.push(d);
            if d != n64 / d {
                divs.push(n64 / d);
            }
        }
        d += 1;
    }
    divs.sort_unstable();
    divs
}

fn horner_is_zero(ints: &[BigInt], x: i64) -> bool {
    let xv = BigInt::from(x);
    let mut acc = BigInt::zero();
    for c in ints.iter().rev() {
        acc = acc * &xv + c;
    }
    acc.is_zero()
}

/// Convenience: integer value of a constant polynomial.
pub fn poly_as_i64(p: &Poly) -> Option<i64> {
    p.constant_value().as_ref().and_then(as_i64)
}
