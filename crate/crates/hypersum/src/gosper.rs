//! Indefinite hypergeometric summation.
//!
//! Given a term a(k) whose shift quotient a(k)/a(k-1) is a rational function
//! of k, decide whether a(k) has an antidifference s(k) of the same class,
//! i.e. s(k) - s(k-1) = a(k), and produce it when it exists. An integer
//! parameter m >= 1 extends the procedure to the stride-m equation
//! s(k) - s(k-m) = a(k), which covers terms built from arguments like k/2 or
//! k/3 whose step-1 quotient is not rational. `find_mfold` computes the
//! smallest stride that makes the quotient rational.
//!
//! Every antidifference handed back by this module is re-verified
//! symbolically before it is returned: the telescoping identity is checked
//! as an exact rational-function identity, never numerically.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linsolve::solve_linear;
use crate::poly::{nonneg_integer_roots, poly_gcd, resultant, Poly};
use crate::ratfunc::RatFunc;
use crate::rational::{as_i64, rat_i, Rat};
use crate::simplify::{term_ratio, FactoredRatio};
use crate::term::{Expr, Factor, HyperTerm};
use crate::var::{fresh_var, Var};

/// The multiplicative splitting of a reduced rational quotient
/// u(k)/v(k) = (p(k)/p(k-1)) * (q(k)/r(k)) such that q and r have no common
/// roots at any nonnegative integer shift: gcd(q(k), r(k+j)) = 1 for all
/// integers j >= 0. `p` collects the "polynomial part" of the term and
/// (q, r) the factorial part.
#[derive(Debug, Clone)]
pub struct PqrDecomposition {
    pub p: Poly,
    pub q: Poly,
    pub r: Poly,
}

/// Result of the core decision procedure: the certificate polynomial f (its
/// coefficients may involve parameters, so it is carried as a rational
/// function whose denominator is free of the summation variable) and the
/// rational multiplier R(k) = q(k+1) f(k) / p(k) with s(k) = R(k) a(k).
#[derive(Debug, Clone)]
pub struct GosperSolution {
    pub f: RatFunc,
    pub antidifference_ratio: RatFunc,
}

/// All integers j >= 0 such that gcd(a(k), b(k+j)) is nonconstant in k.
///
/// When both factors are linear in `v` with constant leading coefficients,
/// the unique candidate shift is read off directly from the coefficients.
/// Otherwise the shift is found as a nonnegative integer root of
/// resultant_v(a(v), b(v+j)) in a fresh variable j; every candidate is then
/// confirmed with an exact gcd so that parameter-dependent spurious roots of
/// the specialized resultant are discarded.
fn pair_dispersions(a: &Poly, b: &Poly, v: Var) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    let da = a.degree(v);
    let db = b.degree(v);
    if da < 1 || db < 1 {
        return out;
    }
    if da == 1 && db == 1 {
        let a1 = a.coeff_of(v, 1).constant_value();
        let b1 = b.coeff_of(v, 1).constant_value();
        if let (Some(a1), Some(b1)) = (a1, b1) {
            // a(k) and b(k+j) are proportional iff their roots agree:
            // -a0/a1 = -(b0 + b1 j)/b1, i.e. j = (a0 b1 - a1 b0)/(a1 b1).
            let a0 = a.coeff_of(v, 0);
            let b0 = b.coeff_of(v, 0);
            let num = a0.mul_rat(&b1).sub(&b0.mul_rat(&a1));
            if let Some(c) = num.constant_value() {
                let j = c / (&a1 * &b1);
                if let Some(j) = as_i64(&j) {
                    if j >= 0 {
                        out.insert(j);
                    }
                }
            }
            return out;
        }
    }
    // General case: roots in j of the resultant, verified by an exact gcd.
    let mut used: Vec<Var> = a.vars().to_vec();
    used.extend_from_slice(b.vars());
    used.push(v);
    let jv = fresh_var(&used);
    let shifted = b.subst(v, &Poly::var(v).add(&Poly::var(jv)));
    let res = resultant(a, &shifted, v);
    assert!(
        !res.is_zero(),
        "resultant of shift-independent polynomials cannot vanish identically"
    );
    for j in nonneg_integer_roots(&res, jv) {
        let g = poly_gcd(a, &b.shift_var(v, &rat_i(j)));
        if g.degree(v) >= 1 {
            out.insert(j);
        }
    }
    out
}

/// All integers j >= 0 with gcd(q(k), r(k+j)) nonconstant, computed pairwise
/// over the factored numerator and denominator so that the resultants stay
/// small.
fn ratio_dispersions(ratio: &FactoredRatio, v: Var) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for nf in &ratio.num {
        for df in &ratio.den {
            out.extend(pair_dispersions(nf, df, v));
        }
    }
    out
}

/// All integers j >= 0 with gcd(q(k), r(k+j)) nonconstant, for already
/// expanded polynomials.
pub fn dispersion_set(q: &Poly, r: &Poly, v: Var) -> BTreeSet<i64> {
    pair_dispersions(q, r, v)
}

pub(crate) fn pqr_core(ratio: &FactoredRatio, v: Var) -> PqrDecomposition {
    let shifts = ratio_dispersions(ratio, v);
    let mut p = Poly::one();
    let mut q = ratio.numerator();
    let mut r = ratio.denominator();
    for j in shifts {
        let g = poly_gcd(&q, &r.shift_var(v, &rat_i(j)));
        if g.degree(v) < 1 {
            // A shift found between original factors may already have been
            // consumed by an earlier extraction.
            continue;
        }
        q = q
            .exact_div(&g)
            .expect("gcd divides the numerator exactly");
        r = r
            .exact_div(&g.shift_var(v, &rat_i(-j)))
            .expect("shifted gcd divides the denominator exactly");
        for i in 0..j {
            p = p.mul(&g.shift_var(v, &rat_i(-i)));
        }
    }
    PqrDecomposition { p, q, r }
}

/// Splits a reduced quotient u(k)/v(k) into the triple (p, q, r) with
/// u/v = (p(k)/p(k-1)) * (q(k)/r(k)) and gcd(q(k), r(k+j)) = 1 for every
/// integer j >= 0. Shifts are extracted in ascending order; for each shift j
/// the common factor g moves out of q and r while p gains the downward
/// product g(k) g(k-1) ... g(k-j+1).
pub fn pqr_decompose(u: &Poly, v: &Poly, var: Var) -> PqrDecomposition {
    assert!(!u.is_zero() && !v.is_zero(), "quotient parts must be nonzero");
    let mut ratio = FactoredRatio::one();
    ratio.push(u.clone(), 1);
    ratio.push(v.clone(), -1);
    pqr_core(&ratio, var)
}

/// Upper bound for the degree of the certificate polynomial f in
/// p(k) = q(k+1) f(k) - r(k) f(k-1), or `NoSolution` when every candidate
/// degree is negative (which proves no antidifference of the required class
/// exists). With sigma = q(k+1) + r(k) and delta = q(k+1) - r(k): if
/// deg sigma <= deg delta the bound is deg p - deg delta; otherwise the
/// candidates are deg p - deg sigma + 1 and the degree at which the leading
/// terms of the difference cancel, -2 * coeff(delta, deg sigma - 1) /
/// lc(sigma), kept only when that ratio is a nonnegative integer constant.
pub fn degree_bound(d: &PqrDecomposition, v: Var) -> Result<i64> {
    degree_bound_parts(d.p.degree(v), &d.q, &d.r, v)
}

/// Same bound computed from the degree of p alone, for callers whose true p
/// is a product of the decomposition's p with another polynomial of known
/// degree (the bound is monotone in deg p, so a generic upper estimate for
/// that degree stays an upper bound).
pub(crate) fn degree_bound_parts(dp: i64, q: &Poly, r: &Poly, v: Var) -> Result<i64> {
    let qup = q.shift_var(v, &rat_i(1));
    let sigma = qup.add(r);
    let delta = qup.sub(r);
    let ds = sigma.degree(v);
    let dd = delta.degree(v);
    if ds <= dd {
        let cand = dp - dd;
        if cand >= 0 {
            return Ok(cand);
        }
        return Err(Error::NoSolution);
    }
    // Here sigma dominates, so deg(q+ f - r f^-) = deg f + deg sigma - 1
    // unless the top coefficients cancel.
    let mut best: Option<i64> = None;
    let cand = dp - ds + 1;
    if cand >= 0 {
        best = Some(cand);
    }
    let cancel = if ds >= 1 {
        let dcoef = delta.coeff_of(v, (ds - 1) as u32);
        let slc = sigma.leading_coeff(v);
        dcoef
            .mul_rat(&rat_i(-2))
            .exact_div(&slc)
            .and_then(|q| q.constant_value())
            .and_then(|c| as_i64(&c))
    } else {
        // sigma constant and delta zero: the cancellation candidate
        // degenerates to 0.
        Some(0)
    };
    if let Some(l) = cancel {
        if l >= 0 && best.map_or(true, |b| l > b) {
            best = Some(l);
        }
    }
    best.ok_or(Error::NoSolution)
}

/// Solves p(k) = q(k+1) f(k) - r(k) f(k-1) for a polynomial f of degree at
/// most `deg`, with coefficients in the field of rational functions of the
/// parameters. Free coefficients are set to zero.
fn solve_certificate(d: &PqrDecomposition, v: Var, deg: i64) -> Result<RatFunc> {
    let qup = d.q.shift_var(v, &rat_i(1));
    let km1 = Poly::var(v).sub(&Poly::one());
    let ncols = (deg + 1) as usize;
    let mut cols: Vec<Poly> = Vec::with_capacity(ncols);
    let mut max_deg = d.p.degree(v);
    for i in 0..ncols {
        let ki = Poly::var(v).pow(i as u32);
        let col = qup.mul(&ki).sub(&d.r.mul(&km1.pow(i as u32)));
        max_deg = max_deg.max(col.degree(v));
        cols.push(col);
    }
    let nrows = (max_deg.max(0) + 1) as usize;
    let mut matrix: Vec<Vec<RatFunc>> = Vec::with_capacity(nrows);
    let mut rhs: Vec<RatFunc> = Vec::with_capacity(nrows);
    for row in 0..nrows {
        let mut line = Vec::with_capacity(ncols);
        for col in cols.iter() {
            line.push(RatFunc::from_poly(col.coeff_of(v, row as u32)));
        }
        matrix.push(line);
        rhs.push(RatFunc::from_poly(d.p.coeff_of(v, row as u32)));
    }
    let sol = solve_linear(&matrix, &rhs).map_err(|_| Error::NoSolution)?;
    let mut f = RatFunc::zero();
    for (i, c) in sol.into_iter().enumerate() {
        f = f.add(&c.mul(&RatFunc::from_poly(Poly::var(v).pow(i as u32))));
    }
    Ok(f)
}

/// Checks the telescoping identity s(k) - s(k-m) = a(k) for s = R * a as an
/// exact identity of rational functions: with a(k)/a(k-m) = u/v it reads
/// R(k) u(k) - R(k-m) v(k) = u(k).
fn ratio_telescopes(r: &RatFunc, ratio: &FactoredRatio, v: Var, m: i64) -> bool {
    let u = RatFunc::from_poly(ratio.numerator());
    let w = RatFunc::from_poly(ratio.denominator());
    let back = r.shift_var(v, &rat_i(-m));
    r.mul(&u).sub(&back.mul(&w)).sub(&u).is_zero()
}

/// Core decision procedure: returns the certificate f and the multiplier R
/// with s = R * a, or `NoSolution`. The returned multiplier is verified
/// against the telescoping identity before it is handed out.
pub fn gosper_solution(a: &Expr, v: Var) -> Result<GosperSolution> {
    if a.is_zero() {
        return Err(Error::InvalidInput { detail: "cannot sum the zero term".into() });
    }
    let ratio = term_ratio(a, v, 1)?;
    let d = pqr_core(&ratio, v);
    let bound = degree_bound(&d, v)?;
    let f = solve_certificate(&d, v, bound)?;
    if f.is_zero() {
        return Err(Error::NoSolution);
    }
    let qup = d.q.shift_var(v, &rat_i(1));
    let r = RatFunc::from_poly(qup).mul(&f).div(&RatFunc::from_poly(d.p.clone()));
    assert!(
        ratio_telescopes(&r, &ratio, v, 1),
        "certificate failed the telescoping identity"
    );
    Ok(GosperSolution { f, antidifference_ratio: r })
}

/// Decides whether a(k) has an antidifference s(k) with s(k) - s(k-1) = a(k)
/// in the same term class, and returns it. Errors distinguish a quotient
/// that is not rational in k (try `find_mfold` + `extended_gosper`) from a
/// proof that no such antidifference exists (`NoSolution`).
pub fn gosper(a: &Expr, v: Var) -> Result<Expr> {
    let sol = gosper_solution(a, v)?;
    Ok(beautify(a.mul_ratfunc(&sol.antidifference_ratio)))
}

/// Telescoping evaluation of a definite sum: returns s(hi) - s(lo - 1) for
/// the antidifference s produced by `gosper`. The bounds are substituted
/// symbolically, so they may involve parameters (e.g. hi = n); constant
/// bounds are evaluated as gamma limits so that canceling pole pairs (for
/// example Gamma(2k+1)/Gamma(k+1) at k = -1) get their exact finite value.
pub fn gosper_definite(a: &Expr, v: Var, lo: &Poly, hi: &Poly) -> Result<Expr> {
    let s = gosper(a, v)?;
    let upper = boundary_value(&s, v, hi)?;
    let lower = boundary_value(&s, v, &lo.sub(&Poly::one()))?;
    upper.sub(&lower)
}

fn boundary_value(s: &Expr, v: Var, point: &Poly) -> Result<Expr> {
    match point.constant_value() {
        Some(c) => s.limit_at(v, &c),
        None => s.subst_linear(v, point),
    }
}

/// The smallest stride m such that substituting k -> m*k turns every factor
/// argument into an integer-linear form: the lcm of the denominators of the
/// k-coefficients of all factor arguments (rational-function prefactors
/// contribute 1).
pub fn find_mfold(a: &Expr, v: Var) -> i64 {
    let mut m = num_bigint::BigInt::from(1);
    for t in a.num_terms().iter().chain(a.den_terms().iter()) {
        for (f, _) in t.factors() {
            for arg in f.gamma_level_args() {
                m = crate::rational::lcm_int(&m, arg.coeff(v).denom());
            }
        }
    }
    crate::rational::as_i64_big(&m).expect("argument denominators stay small")
}

/// Stride-m antidifference: s(k) with s(k) - s(k-m) = a(k), computed by
/// solving the stride-1 problem for b(k) = a(m*k) and substituting k -> k/m
/// in the resulting rational multiplier.
pub fn extended_gosper(a: &Expr, v: Var, m: i64) -> Result<Expr> {
    let r = extended_gosper_ratio(a, v, m)?;
    Ok(beautify(a.mul_ratfunc(&r)))
}

/// The rational multiplier R with s = R * a solving s(k) - s(k-m) = a(k).
pub fn extended_gosper_ratio(a: &Expr, v: Var, m: i64) -> Result<RatFunc> {
    if m < 1 {
        return Err(Error::InvalidInput { detail: format!("stride must be positive, got {m}") });
    }
    if m == 1 {
        return Ok(gosper_solution(a, v)?.antidifference_ratio);
    }
    let b = a.scale(v, &rat_i(m))?;
    let sol = gosper_solution(&b, v)?;
    let scaled_back = Poly::monomial(v, 1, Rat::new(1.into(), m.into()));
    let r = sol.antidifference_ratio.subst(v, &scaled_back);
    let ratio = term_ratio(a, v, m)?;
    assert!(
        ratio_telescopes(&r, &ratio, v, m),
        "stride-m certificate failed the telescoping identity"
    );
    Ok(r)
}

/// Converts a stride-m antidifference into the list
/// [s(k), s(k-1), ..., s(k-m+1)] whose sum is a true stride-1
/// antidifference of a(k).
pub fn antidifference_from_mfold(s: &Expr, v: Var, m: i64) -> Result<Vec<Expr>> {
    if m < 1 {
        return Err(Error::InvalidInput { detail: format!("stride must be positive, got {m}") });
    }
    (0..m).map(|i| s.shift(v, &rat_i(-i))).collect()
}

/// Sums the terms produced by `antidifference_from_mfold`.
pub fn sum_exprs(parts: &[Expr]) -> Result<Expr> {
    let mut acc = Expr::zero();
    for p in parts {
        acc = acc.add(p)?;
    }
    Ok(acc)
}

/// Folds a term's rational-function coefficient into its factorial-type
/// factors when doing so consumes the coefficient completely (down to +-1),
/// e.g. 2k(2k-1) * (2k-2)! becomes (2k)!. If any residue would remain the
/// term is returned unchanged, so quotients like (k+2)(k/2)! keep their
/// natural printed shape.
fn absorb_into_factorials(t: &HyperTerm) -> HyperTerm {
    let mut coeff = t.coeff().clone();
    let mut factors: Vec<(Factor, i64)> = t.factors().to_vec();
    let mut changed = false;
    for (f, e) in factors.iter_mut() {
        if *e != 1 && *e != -1 {
            continue;
        }
        // Work with the gamma-level argument g: A! corresponds to g = A + 1.
        let (mut g, is_factorial) = match f {
            Factor::Factorial(a) => (a.add_rat(&rat_i(1)), true),
            Factor::Gamma(a) => (a.clone(), false),
            _ => continue,
        };
        loop {
            if g.is_constant() {
                break;
            }
            let gp = g.poly().clone();
            // Upward only: Gamma(g) * g = Gamma(g+1) consumes a numerator
            // factor (for positive exponents) or a denominator factor (for
            // reciprocals). Downward rewrites are never needed to reach the
            // clean forms and would let greedy absorption strand residues.
            let source = if *e == 1 { coeff.num() } else { coeff.den() };
            let Some(qt) = source.exact_div(&gp) else { break };
            coeff = if *e == 1 {
                RatFunc::new(qt, coeff.den().clone())
            } else {
                RatFunc::new(coeff.num().clone(), qt)
            };
            g = g.add_rat(&rat_i(1));
            changed = true;
        }
        *f = if is_factorial {
            Factor::Factorial(g.add_rat(&rat_i(-1)))
        } else {
            Factor::Gamma(g)
        };
    }
    if !changed {
        return t.clone();
    }
    match coeff.constant_value() {
        Some(c) if c == rat_i(1) || c == rat_i(-1) => {}
        _ => return t.clone(),
    }
    let rebuilt = (|| -> Result<HyperTerm> {
        let mut out = HyperTerm::from_ratfunc(coeff);
        for (f, e) in factors {
            out = out.mul(&HyperTerm::from_factor(f)?.pow_int(e)?)?;
        }
        Ok(out)
    })();
    rebuilt.unwrap_or_else(|_| t.clone())
}

fn beautify(e: Expr) -> Expr {
    if e.den_terms() != [HyperTerm::one()] {
        return e;
    }
    let num = e.num_terms().iter().map(absorb_into_factorials).collect();
    Expr::from_parts(num, vec![HyperTerm::one()]).unwrap_or(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;
    use crate::rational::rat;
    use crate::var::{K, N};
    use num_traits::Zero;
    use std::collections::BTreeMap;

    fn poly(s: &str) -> Poly {
        let e = parse_expr(s).unwrap();
        let r = crate::parse::expr_to_ratfunc(&e).unwrap();
        assert!(r.den().is_one(), "not a polynomial: {s}");
        r.num().clone()
    }

    fn check_pqr_invariants(u: &Poly, v: &Poly, d: &PqrDecomposition) {
        // u/v = (p(k)/p(k-1)) * (q(k)/r(k)), cross-multiplied.
        let pm1 = d.p.shift_var(K, &rat_i(-1));
        let lhs = u.mul(&pm1).mul(&d.r);
        let rhs = v.mul(&d.p).mul(&d.q);
        assert_eq!(lhs, rhs, "splitting does not reconstruct the quotient");
        // gcd(q(k), r(k+j)) = 1 for all j >= 0.
        assert!(poly_gcd(&d.q, &d.r).degree(K) < 1, "q and r share a factor");
        assert!(
            dispersion_set(&d.q, &d.r, K).is_empty(),
            "q and r still have a nonnegative shift overlap"
        );
    }

    #[test]
    fn pqr_trivial_quotient() {
        let d = pqr_decompose(&Poly::one(), &Poly::one(), K);
        assert!(d.p.is_one() && d.q.is_one() && d.r.is_one());
    }

    #[test]
    fn pqr_extracts_shift_two() {
        let u = poly("k+2");
        let v = poly("k");
        let d = pqr_decompose(&u, &v, K);
        check_pqr_invariants(&u, &v, &d);
        assert_eq!(d.p, poly("(k+1)*(k+2)"));
        assert!(d.q.is_one());
        assert!(d.r.is_one());
    }

    #[test]
    fn pqr_on_factorial_quotient_example() {
        // Shift quotient of k(4k-3)(2k-2)!/k!.
        let a = parse_expr("k*(4*k-3)*(2*k-2)!/k!").unwrap();
        let ratio = term_ratio(&a, K, 1).unwrap();
        let u = ratio.numerator();
        let v = ratio.denominator();
        let d = pqr_core(&ratio, K);
        check_pqr_invariants(&u, &v, &d);
        // The polynomial part carries the (4k-3) factor.
        assert!(d.p.exact_div(&poly("4*k-3")).is_some());
    }

    #[test]
    fn pqr_mixed_multiplicities() {
        let u = poly("k*k*(k+3)");
        let v = poly("(k-1)*(k-2)*(k-2)");
        let d = pqr_decompose(&u, &v, K);
        check_pqr_invariants(&u, &v, &d);
    }

    #[test]
    fn pqr_with_parameters() {
        let u = poly("(k+n+2)*(k+1)");
        let v = poly("(k+n)*(k-4)");
        let d = pqr_decompose(&u, &v, K);
        check_pqr_invariants(&u, &v, &d);
    }

    #[test]
    fn degree_bound_rejects_binomial_column() {
        // Shift quotient of C(n,k): u = n-k+1, v = k; no shift overlap, and
        // the bound is negative.
        let a = parse_expr("binomial(n, k)").unwrap();
        let ratio = term_ratio(&a, K, 1).unwrap();
        let d = pqr_core(&ratio, K);
        assert!(d.p.is_one());
        assert!(matches!(degree_bound(&d, K), Err(Error::NoSolution)));
    }

    #[test]
    fn degree_bound_for_constant_term() {
        let d = PqrDecomposition { p: Poly::one(), q: Poly::one(), r: Poly::one() };
        assert_eq!(degree_bound(&d, K).unwrap(), 1);
    }

    fn assert_same_value(a: &Expr, b: &Expr) {
        let diff = a.sub(b).unwrap();
        if diff.is_zero() {
            return;
        }
        let q = a.div(b).unwrap();
        let s = crate::simplify::simplify_combinatorial(&q).unwrap();
        let ok = s
            .as_single_term()
            .is_some_and(|t| t.factors().is_empty() && t.coeff().is_one());
        assert!(ok, "values differ: {a} vs {b}");
    }

    #[test]
    fn gosper_factorial_quotient() {
        let a = parse_expr("k*(4*k-3)*(2*k-2)!/k!").unwrap();
        let s = gosper(&a, K).unwrap();
        assert_eq!(s.to_string(), "(2*k)!/k!");
        assert_same_value(&s, &parse_expr("(2*k)!/k!").unwrap());
    }

    #[test]
    fn gosper_alternating_central_binomial() {
        let a =
            parse_expr("(-1)^(k+1)*(4*k+1)*(2*k)!/(k!*4^k*(2*k-1)*(k+1)!)").unwrap();
        let s = gosper(&a, K).unwrap();
        let expected = parse_expr("(2*k)!*(-1)^(k+1)/((k+1)!*4^k*k!)").unwrap();
        assert_same_value(&s, &expected);
    }

    #[test]
    fn gosper_rejects_binomial_in_k() {
        let a = parse_expr("binomial(n, k)").unwrap();
        assert!(matches!(gosper(&a, K), Err(Error::NoSolution)));
    }

    #[test]
    fn gosper_constant_and_linear() {
        let one = parse_expr("1").unwrap();
        let s = gosper(&one, K).unwrap();
        assert_same_value(&s, &parse_expr("k").unwrap());

        let idk = parse_expr("k").unwrap();
        let s2 = gosper(&idk, K).unwrap();
        assert_same_value(&s2, &parse_expr("k*(k+1)/2").unwrap());
    }

    #[test]
    fn definite_sums_of_polynomials() {
        let one = parse_expr("1").unwrap();
        let s = gosper_definite(&one, K, &Poly::one(), &Poly::var(N)).unwrap();
        assert_same_value(&s, &parse_expr("n").unwrap());

        let idk = parse_expr("k").unwrap();
        let s2 = gosper_definite(&idk, K, &Poly::zero(), &Poly::var(N)).unwrap();
        assert_same_value(&s2, &parse_expr("n*(n+1)/2").unwrap());
    }

    #[test]
    fn definite_sum_matches_numeric_partial_sums() {
        let a =
            parse_expr("(-1)^(k+1)*(4*k+1)*(2*k)!/(k!*4^k*(2*k-1)*(k+1)!)").unwrap();
        let closed = gosper_definite(&a, K, &Poly::zero(), &Poly::var(N)).unwrap();
        for n in 0..=10 {
            let mut acc = rat_i(0);
            for k in 0..=n {
                let mut assign = BTreeMap::new();
                assign.insert(K, rat_i(k));
                acc += a.eval(&assign).unwrap();
            }
            let mut assign = BTreeMap::new();
            assign.insert(N, rat_i(n));
            assert_eq!(closed.eval(&assign).unwrap(), acc, "mismatch at n={n}");
        }
    }

    #[test]
    fn stride_detection() {
        let half = parse_expr("k*(k/2)!").unwrap();
        assert_eq!(find_mfold(&half, K), 2);
        let third = parse_expr("binomial(k/3, n)").unwrap();
        assert_eq!(find_mfold(&third, K), 3);
        let plain = parse_expr("binomial(n, k)").unwrap();
        assert_eq!(find_mfold(&plain, K), 1);
    }

    #[test]
    fn extended_gosper_half_factorial() {
        let a = parse_expr("k*(k/2)!").unwrap();
        assert!(matches!(term_ratio(&a, K, 1), Err(Error::NotHypergeometric { .. })));
        let s = extended_gosper(&a, K, 2).unwrap();
        assert_eq!(s.to_string(), "(k + 2)*(k/2)!");
        // s(k) - s(k-2) = a(k) numerically at even points.
        for k in [2, 4, 6, 8] {
            let mut assign = BTreeMap::new();
            assign.insert(K, rat_i(k));
            let sv = s.eval(&assign).unwrap();
            let av = a.eval(&assign).unwrap();
            let mut back = BTreeMap::new();
            back.insert(K, rat_i(k - 2));
            let sb = s.eval(&back).unwrap();
            assert_eq!(sv - sb, av);
        }
    }

    #[test]
    fn extended_gosper_half_binomial() {
        let a = parse_expr("binomial(k/2, n)").unwrap();
        let s = extended_gosper(&a, K, 2).unwrap();
        let expected = parse_expr("(k/2+1)*binomial(k/2, n)/(n+1)").unwrap();
        assert_same_value(&s, &expected);
    }

    #[test]
    fn extended_gosper_stride_one_delegates() {
        let a = parse_expr("binomial(n, k)").unwrap();
        assert!(matches!(extended_gosper(&a, K, 1), Err(Error::NoSolution)));
    }

    #[test]
    fn antidifference_list_from_stride_two() {
        let s = parse_expr("(k+2)*(k/2)!").unwrap();
        let parts = antidifference_from_mfold(&s, K, 2).unwrap();
        assert_eq!(parts.len(), 2);
        let total = sum_exprs(&parts).unwrap();
        let expected = parse_expr("(k+2)*(k/2)! + (k+1)*((k-1)/2)!").unwrap();
        assert!(total.sub(&expected).unwrap().is_zero());
    }

    #[test]
    fn stride_three_sum_telescopes() {
        let a = parse_expr("binomial(k/3, n)").unwrap();
        assert_eq!(find_mfold(&a, K), 3);
        let s = extended_gosper(&a, K, 3).unwrap();
        let parts = antidifference_from_mfold(&s, K, 3).unwrap();
        let total = sum_exprs(&parts).unwrap();
        // The summed list is a true stride-1 antidifference: the quotient
        // (total - total(k-1)) / a reduces to 1.
        let shifted = total.shift(K, &rat_i(-1)).unwrap();
        let diff = total.sub(&shifted).unwrap();
        let simplified = crate::simplify::simplify_combinatorial(&diff.div(&a).unwrap()).unwrap();
        let t = simplified.as_single_term().expect("quotient reduces to a single term");
        assert!(t.factors().is_empty() && t.coeff().is_one(), "quotient is {simplified}");
    }

    #[test]
    fn mfold_list_stride_one_is_identity() {
        let s = parse_expr("(2*k)!/k!").unwrap();
        let parts = antidifference_from_mfold(&s, K, 1).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(parts[0].sub(&s).unwrap().is_zero());
    }

    /// For a NoSolution input, the numeric partial sums should not behave
    /// like a hypergeometric term: no small rational function interpolates
    /// the ratios s(k)/s(k-1). Recorded as a regression alongside the real
    /// (symbolic) nonexistence proof.
    #[test]
    fn binomial_partial_sums_are_not_hypergeometric_numerically() {
        let a = parse_expr("binomial(n, k)").unwrap();
        let mut sums = Vec::new();
        let mut acc = rat_i(0);
        for k in 0..=12 {
            let mut assign = BTreeMap::new();
            assign.insert(K, rat_i(k));
            assign.insert(N, rat_i(12));
            acc += a.eval(&assign).unwrap();
            sums.push(acc.clone());
        }
        let points: Vec<(Rat, Rat)> = (1..sums.len())
            .map(|k| (rat_i(k as i64), sums[k].clone() / sums[k - 1].clone()))
            .collect();
        assert!(!fits_rational_function(&points, 3, 3));
    }

    /// Attempts to interpolate y_i = P(x_i)/Q(x_i) with deg P <= dn,
    /// deg Q <= dd. Returns true when some nonzero (P, Q) matches all points
    /// with Q(x_i) != 0.
    fn fits_rational_function(points: &[(Rat, Rat)], dn: usize, dd: usize) -> bool {
        let ncols = dn + dd + 2;
        // Homogeneous system: P(x_i) - y_i Q(x_i) = 0. Try pinning each
        // unknown to 1 in turn and solving for the rest.
        for pin in 0..ncols {
            let mut matrix = Vec::new();
            let mut rhs = Vec::new();
            for (x, y) in points {
                let mut line = Vec::new();
                let mut pinned = RatFunc::zero();
                let mut xp = rat_i(1);
                let mut entries = Vec::new();
                for _ in 0..=dn {
                    entries.push(RatFunc::from_rat(xp.clone()));
                    xp *= x.clone();
                }
                let mut xq = rat_i(1);
                for _ in 0..=dd {
                    entries.push(RatFunc::from_rat(-(y.clone() * xq.clone())));
                    xq *= x.clone();
                }
                for (i, e) in entries.into_iter().enumerate() {
                    if i == pin {
                        pinned = e;
                    } else {
                        line.push(e);
                    }
                }
                matrix.push(line);
                rhs.push(pinned.neg());
            }
            if let Ok(sol) = solve_linear(&matrix, &rhs) {
                // Reassemble and confirm Q has no zero at the sample points.
                let mut coeffs: Vec<Rat> = Vec::new();
                let mut it = sol.into_iter();
                for i in 0..ncols {
                    if i == pin {
                        coeffs.push(rat_i(1));
                    } else {
                        coeffs.push(it.next().unwrap().constant_value().unwrap());
                    }
                }
                let qcoeffs = &coeffs[dn + 1..];
                let q_nonzero = points.iter().all(|(x, _)| {
                    let mut acc = rat_i(0);
                    let mut xp = rat_i(1);
                    for c in qcoeffs {
                        acc += c.clone() * xp.clone();
                        xp *= x.clone();
                    }
                    !acc.is_zero()
                });
                if q_nonzero {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn rational_fit_helper_accepts_true_rational_sequence() {
        // y = (x+1)/x is rational, so the helper must find it.
        let points: Vec<(Rat, Rat)> =
            (1..=10).map(|x| (rat_i(x), rat(x + 1, x))).collect();
        assert!(fits_rational_function(&points, 3, 3));
    }
}
