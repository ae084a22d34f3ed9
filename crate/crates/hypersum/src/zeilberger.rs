//! Holonomic recurrences for definite hypergeometric sums.
//!
//! [`sumrecursion`] finds, for a summand F(n,k), polynomials P_0..P_J with
//!
//!     P_0(n) Sum(n) + P_1(n) Sum(n-1) + ... + P_J(n) Sum(n-J) = 0
//!
//! where Sum(n) = sum_k F(n,k) over natural bounds. It runs the
//! antidifference machinery on the combination
//! a(k) = F(n,k) + sigma_1 F(n-1,k) + ... + sigma_J F(n-J,k) with the
//! sigma_j as extra unknowns of the certificate linear system, so that a(k)
//! telescopes in k and the sum of a(k) over all k vanishes.
//!
//! [`extended_sumrecursion`] handles summands that are only stride-(m,l)
//! hypergeometric (their step-1 ratios are not rational): it rescales the
//! variables, finds a recurrence for the rescaled sum, and maps it back to a
//! stride-m recurrence in n.
//!
//! [`hyperrecursion`] is the convenience entry point for generalized
//! hypergeometric series given by parameter lists; it tries the plain
//! algorithm first and falls back to the stride version when the term is
//! not stride-(1,1).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gosper::{degree_bound_parts, find_mfold, pqr_core};
use crate::linsolve::solve_linear;
use crate::poly::{poly_gcd, poly_lcm, Poly};
use crate::ratfunc::RatFunc;
use crate::rational::{gcd_rat, pow_rat, rat, rat_i, Rat};
use crate::simplify::{term_ratio, FactoredRatio};
use crate::term::{series_summand, Expr, LinearArg};
use crate::var::{Var, K};

/// A homogeneous recurrence sum_{j=0..order} coeffs[j](n) * Sum(n - j*stride) = 0.
///
/// Coefficients are polynomials in n (parameters allowed), jointly
/// content-free with integer coefficients, and the leading term of coeffs[0]
/// is positive, so equal recurrences have equal coefficient lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub order: usize,
    pub stride: i64,
    pub coeffs: Vec<Poly>,
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let shift = j as i64 * self.stride;
            if shift == 0 {
                write!(f, "({}) * S(n)", c)?;
            } else {
                write!(f, "({}) * S(n - {})", c, shift)?;
            }
        }
        write!(f, " = 0")
    }
}

/// A successful recurrence derivation together with its telescoping data:
/// with a(k) = F(n,k) + sum_j sigmas[j-1] * F(n-j,k), the antidifference of
/// a is G = certificate_ratio * a, i.e. G(n,k) - G(n,k-1) = a(k). The
/// identity is checked symbolically before this is returned.
#[derive(Debug, Clone)]
pub struct RecurrenceDerivation {
    pub recurrence: Recurrence,
    pub sigmas: Vec<RatFunc>,
    pub certificate_ratio: RatFunc,
    /// True when the certificate denominator vanishes identically at the
    /// lower natural bound k = -1, so the telescoped boundary term may not
    /// vanish and the recurrence needs a boundary correction.
    pub boundary_pole: bool,
}

/// Divides the paired coefficients by their common polynomial factor and
/// joint rational content, then fixes the global sign so the leading term
/// of the first nonzero coefficient is positive.
fn normalize_coeffs(mut coeffs: Vec<Poly>) -> Vec<Poly> {
    let mut g = Poly::zero();
    for c in &coeffs {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.clone() } else { poly_gcd(&g, c) };
        if g.is_one() {
            break;
        }
    }
    assert!(!g.is_zero(), "a recurrence needs a nonzero coefficient");
    if !g.is_one() {
        for c in coeffs.iter_mut() {
            *c = c.exact_div(&g).expect("common factor divides exactly");
        }
    }
    let mut content = Rat::zero();
    for c in &coeffs {
        content = gcd_rat(&content, &c.content());
    }
    let inv = Rat::one() / content;
    for c in coeffs.iter_mut() {
        *c = c.mul_rat(&inv);
    }
    let lead = coeffs
        .iter()
        .find(|c| !c.is_zero())
        .expect("nonzero coefficient survives normalization")
        .leading_term_coeff();
    if lead.is_negative() {
        for c in coeffs.iter_mut() {
            *c = c.neg();
        }
    }
    coeffs
}

/// One order of the recurrence search: telescope
/// a(k) = F(n,k) + sum_{j=1..order} sigma_j F(n-j,k) with the sigma_j as
/// unknowns alongside the certificate coefficients.
fn try_order(f: &Expr, k: Var, n: Var, order: usize) -> Result<RecurrenceDerivation> {
    // Factored step ratio F(n,k)/F(n-1,k) = c * prod(num)/prod(den); the
    // backward products rho_j = F(n-j,k)/F(n,k) then have denominator
    // num(n) num(n-1) ... num(n-j+1) up to the constant. Keeping everything
    // as factor lists lets the decomposition work on small pairs.
    let n_ratio = term_ratio(f, n, 1)?;
    let prod_at = |parts: &[Poly], i: i64| -> Poly {
        parts.iter().fold(Poly::one(), |acc, p| acc.mul(&p.shift_var(n, &rat_i(-i))))
    };
    let num_at: Vec<Poly> = (0..order).map(|i| prod_at(&n_ratio.num, i as i64)).collect();
    let den_at: Vec<Poly> = (0..order).map(|i| prod_at(&n_ratio.den, i as i64)).collect();

    // Common multiple T of the rho_j denominators (their plain product, not
    // the lcm: a larger T only enlarges the generic degree estimate below)
    // and numerators W_j with rho_j = W_j / T, so that
    // a(k) = F(n,k) * (T + sum_j sigma_j W_j) / T.
    let mut t = Poly::one();
    for part in &num_at {
        t = t.mul(part);
    }
    let ws: Vec<Poly> = (1..=order)
        .map(|j| {
            let mut w = Poly::one();
            for den in den_at.iter().take(j) {
                w = w.mul(den);
            }
            for num in num_at.iter().take(order).skip(j) {
                w = w.mul(num);
            }
            w.mul_rat(&pow_rat(&n_ratio.coeff, -(j as i64)))
        })
        .collect();

    // k-ratio of the sigma-free part F * 1/T, with T contributed factor by
    // factor (k-free factors cancel between T(k-1) and T(k) and are
    // skipped); the unknown factor S = T + sum sigma_j W_j multiplies the
    // decomposition's p.
    let mut ratio = term_ratio(f, k, 1)?;
    for i in 0..order as i64 {
        for part in &n_ratio.num {
            let shifted = part.shift_var(n, &rat_i(-i));
            if shifted.degree(k) > 0 {
                ratio.push(shifted.shift_var(k, &rat_i(-1)), 1);
                ratio.push(shifted, -1);
            }
        }
    }
    let trace = std::env::var_os("HYPERSUM_TRACE").is_some();
    let stamp = std::time::Instant::now();
    let d = pqr_core(&ratio, k);
    if trace {
        eprintln!("trace: pqr {:?}", stamp.elapsed());
    }

    // Degree bound for the certificate f with p = p_core * S. The k-degree
    // of S is estimated generically as the max over its summands, which can
    // only overshoot; the bound is monotone in deg p, so it stays an upper
    // bound (extra unknown coefficients come back zero).
    let ds = ws
        .iter()
        .map(|w| w.degree(k))
        .chain(std::iter::once(t.degree(k)))
        .max()
        .expect("at least T contributes");
    let dp = d.p.degree(k) + ds;
    let bound = degree_bound_parts(dp, &d.q, &d.r, k)?;

    // Linear system over Q(n, parameters) for unknowns
    // (f_0..f_bound, sigma_1..sigma_order), equating k-coefficients in
    //   q(k+1) f(k) - r(k) f(k-1) - sum_j sigma_j p(k) W_j(k) = p(k) T(k).
    let qup = d.q.shift_var(k, &rat_i(1));
    let km1 = Poly::var(k).sub(&Poly::one());
    let nf = (bound + 1) as usize;
    let mut cols: Vec<Poly> = Vec::with_capacity(nf + order);
    for i in 0..nf {
        let ki = Poly::var(k).pow(i as u32);
        cols.push(qup.mul(&ki).sub(&d.r.mul(&km1.pow(i as u32))));
    }
    for w in &ws {
        cols.push(d.p.mul(w).neg());
    }
    let rhs_poly = d.p.mul(&t);
    let max_deg = cols
        .iter()
        .map(|c| c.degree(k))
        .chain(std::iter::once(rhs_poly.degree(k)))
        .max()
        .unwrap_or(0)
        .max(0);
    let nrows = (max_deg + 1) as usize;
    let mut matrix: Vec<Vec<RatFunc>> = Vec::with_capacity(nrows);
    let mut rhs: Vec<RatFunc> = Vec::with_capacity(nrows);
    for row in 0..nrows {
        let line: Vec<RatFunc> =
            cols.iter().map(|c| RatFunc::from_poly(c.coeff_of(k, row as u32))).collect();
        matrix.push(line);
        rhs.push(RatFunc::from_poly(rhs_poly.coeff_of(k, row as u32)));
    }
    let stamp = std::time::Instant::now();
    let sol = solve_linear(&matrix, &rhs).map_err(|_| Error::NoSolution)?;
    if trace {
        eprintln!(
            "trace: solve {:?} ({} rows x {} cols)",
            stamp.elapsed(),
            matrix.len(),
            cols.len()
        );
    }

    let mut fpoly = RatFunc::zero();
    for (i, c) in sol[..nf].iter().enumerate() {
        fpoly = fpoly.add(&c.mul(&RatFunc::from_poly(Poly::var(k).pow(i as u32))));
    }
    let sigmas: Vec<RatFunc> = sol[nf..].to_vec();
    for s in &sigmas {
        assert!(
            s.num().degree(k) <= 0 && s.den().degree(k) <= 0,
            "sigma must not depend on {}: {}",
            k,
            s
        );
    }

    // S as a rational function; S = 0 means the sigma-combination of
    // summands vanishes identically, which is itself a valid recurrence
    // (the telescoped sum is zero term by term).
    let mut s_rf = RatFunc::from_poly(t.clone());
    for (s, w) in sigmas.iter().zip(&ws) {
        s_rf = s_rf.add(&s.mul(&RatFunc::from_poly(w.clone())));
    }
    let stamp = std::time::Instant::now();
    let (cert, boundary_pole) = if s_rf.is_zero() {
        (RatFunc::zero(), false)
    } else {
        let cert = RatFunc::from_poly(qup)
            .mul(&fpoly)
            .div(&RatFunc::from_poly(d.p.clone()).mul(&s_rf));
        if trace {
            eprintln!("trace: cert build {:?}", stamp.elapsed());
        }
        // Telescoping check: with a-ratio rho = a(k)/a(k-1),
        // G = cert * a satisfies G - G(k->k-1) = a iff
        // cert * rho - cert(k->k-1) = rho.
        let stamp2 = std::time::Instant::now();
        debug_assert!(s_rf.den().degree(k) <= 0, "S denominator must be free of {}", k);
        assert!(
            telescoping_identity_holds(&cert, &ratio, s_rf.num(), k, n),
            "certificate failed the telescoping identity"
        );
        if trace {
            eprintln!("trace: identity check {:?}", stamp2.elapsed());
        }
        let at_bound = cert.den().subst(k, &Poly::constant(rat_i(-1)));
        (cert, at_bound.is_zero())
    };
    if trace {
        eprintln!("trace: certificate + telescoping {:?}", stamp.elapsed());
    }

    // Clear the sigma denominators: P_0 = lcm, P_j = sigma_j * lcm.
    let mut den = Poly::one();
    for s in &sigmas {
        den = poly_lcm(&den, s.den());
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(den.clone());
    for s in &sigmas {
        coeffs.push(s.num().mul(&den.exact_div(s.den()).expect("lcm is divisible")));
    }
    let coeffs = normalize_coeffs(coeffs);
    Ok(RecurrenceDerivation {
        recurrence: Recurrence { order, stride: 1, coeffs },
        sigmas,
        certificate_ratio: cert,
        boundary_pole,
    })
}

/// Fixed rational sample points used to project extra parameters away before
/// expanding the telescoping identity: round r assigns the i-th parameter the
/// value `SAMPLE_PRIMES[r][i] / SAMPLE_DENOMS[r]`. All numerators are primes
/// larger than every denominator, so the values are distinct, non-integral,
/// and never collide across parameters within a round.
const SAMPLE_PRIMES: [[i64; 8]; 6] = [
    [17, 19, 23, 29, 31, 37, 41, 43],
    [47, 53, 59, 61, 67, 71, 73, 79],
    [83, 89, 97, 101, 103, 107, 109, 113],
    [127, 131, 137, 139, 149, 151, 157, 163],
    [167, 173, 179, 181, 191, 193, 197, 199],
    [211, 223, 227, 229, 233, 239, 241, 251],
];
const SAMPLE_DENOMS: [i64; 6] = [2, 3, 5, 7, 11, 13];

/// Verifies the telescoping identity cert * rho - cert(k-1) - rho = 0, where
/// rho = ratio * sn(k) / sn(k-1) is the shift quotient of the combined
/// summand and sn is the numerator of S (its denominator is free of k and
/// cancels). The check is done in cross-multiplied polynomial form,
///
///   RN * sn * CD(k-1) * (CN - CD)  ==  CN(k-1) * CD * RD * sn(k-1),
///
/// with cert = CN/CD and ratio = RN/RD, so no rational-function reduction
/// (and hence no multivariate gcd) is ever performed; RN and RD are expanded
/// from their factored form only at the end. With several free parameters
/// besides the two recursion variables the fully expanded products become
/// infeasibly large, so the identity is instead confirmed on at least two
/// deterministic rational projections of those parameters (the identity is
/// polynomial, so it survives every substitution; a failure on any projection
/// disproves it, and distinct generic sample points make an undetected
/// nonzero difference practically impossible). If too few projections are
/// informative, the exact expansion is used as a fallback.
fn telescoping_identity_holds(
    cert: &RatFunc,
    ratio: &FactoredRatio,
    sn: &Poly,
    k: Var,
    n: Var,
) -> bool {
    let mut extras: BTreeSet<Var> = BTreeSet::new();
    let mut collect = |p: &Poly| extras.extend(p.vars().iter().copied());
    collect(cert.num());
    collect(cert.den());
    collect(sn);
    ratio.num.iter().for_each(&mut collect);
    ratio.den.iter().for_each(&mut collect);
    extras.remove(&k);
    extras.remove(&n);
    let extras: Vec<Var> = extras.into_iter().collect();

    if extras.len() > 1 && extras.len() <= SAMPLE_PRIMES[0].len() {
        let mut informative = 0;
        for (primes, den) in SAMPLE_PRIMES.iter().zip(SAMPLE_DENOMS) {
            let subst: Vec<(Var, Rat)> = extras
                .iter()
                .zip(primes)
                .map(|(&v, &p)| (v, rat(p, den)))
                .collect();
            match telescoping_difference(cert, ratio, sn, k, &subst) {
                None => continue,
                Some(diff) if diff.is_zero() => informative += 1,
                Some(_) => return false,
            }
            if informative >= 2 {
                return true;
            }
        }
        if informative >= 1 {
            return true;
        }
    }
    telescoping_difference(cert, ratio, sn, k, &[])
        .map(|diff| diff.is_zero())
        .unwrap_or(false)
}

/// Cross-multiplied telescoping difference after substituting the given
/// parameter values; `None` marks a degenerate projection (some side of the
/// identity collapsed to zero for the wrong reason, e.g. a vanished
/// denominator), which carries no information either way.
fn telescoping_difference(
    cert: &RatFunc,
    ratio: &FactoredRatio,
    sn: &Poly,
    k: Var,
    subst: &[(Var, Rat)],
) -> Option<Poly> {
    let project = |p: &Poly| subst.iter().fold(p.clone(), |acc, (v, val)| acc.subst_rat(*v, val));
    let cn = project(cert.num());
    let cd = project(cert.den());
    let snp = project(sn);
    let mut rn = Poly::constant(ratio.coeff.clone());
    for part in &ratio.num {
        rn = rn.mul(&project(part));
    }
    let mut rd = Poly::one();
    for part in &ratio.den {
        rd = rd.mul(&project(part));
    }
    if cn.is_zero() || cd.is_zero() || snp.is_zero() || rn.is_zero() || rd.is_zero() {
        return None;
    }
    let lhs = cn.sub(&cd).mul(&cd.shift_var(k, &rat_i(-1))).mul(&snp).mul(&rn);
    let rhs = cn.shift_var(k, &rat_i(-1)).mul(&cd).mul(&snp.shift_var(k, &rat_i(-1))).mul(&rd);
    Some(lhs.sub(&rhs))
}

/// Finds the minimal-order holonomic recurrence (up to `max_order`) for
/// Sum(n) = sum_k F(n,k) over natural bounds, together with its telescoping
/// certificate. Orders are tried in ascending order and the first success
/// wins.
pub fn sumrecursion_derivation(
    f: &Expr,
    k: Var,
    n: Var,
    max_order: usize,
) -> Result<RecurrenceDerivation> {
    for order in 1..=max_order {
        match try_order(f, k, n, order) {
            Ok(found) => return Ok(found),
            Err(Error::NoSolution) | Err(Error::Unsolvable) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::NoRecurrenceFound { max_order })
}

/// [`sumrecursion_derivation`] returning just the recurrence.
pub fn sumrecursion(f: &Expr, k: Var, n: Var, max_order: usize) -> Result<Recurrence> {
    Ok(sumrecursion_derivation(f, k, n, max_order)?.recurrence)
}

/// Recurrence search at exactly the given order.
pub fn sumrecursion_order(f: &Expr, k: Var, n: Var, order: usize) -> Result<Recurrence> {
    match try_order(f, k, n, order) {
        Ok(found) => Ok(found.recurrence),
        Err(Error::NoSolution) | Err(Error::Unsolvable) => {
            Err(Error::NoRecurrenceFound { max_order: order })
        }
        Err(other) => Err(other),
    }
}

/// Stride-(m,l) recurrence search: rescales the summand to
/// F(m*n, l*k), which is stride-(1,1) hypergeometric when F is
/// stride-(m,l), finds a plain recurrence for the rescaled sum, and maps it
/// back by substituting n -> n/m, clearing denominators, and recording
/// stride m. The resulting relation connects Sum(n), Sum(n-m), ...,
/// Sum(n-order*m) on each residue class of n mod m.
pub fn extended_sumrecursion(
    f: &Expr,
    k: Var,
    n: Var,
    m: i64,
    l: i64,
    max_order: usize,
) -> Result<Recurrence> {
    if m < 1 || l < 1 {
        return Err(Error::InvalidInput {
            detail: format!("strides must be positive, got ({}, {})", m, l),
        });
    }
    let scaled = f.scale(n, &rat_i(m))?.scale(k, &rat_i(l))?;
    let rec = sumrecursion(&scaled, k, n, max_order)?;
    if m == 1 {
        return Ok(rec);
    }
    let n_over_m = Poly::monomial(n, 1, rat(1, m));
    let coeffs = normalize_coeffs(rec.coeffs.iter().map(|c| c.subst(n, &n_over_m)).collect());
    Ok(Recurrence { order: rec.order, stride: m, coeffs })
}

/// Which route [`hyperrecursion`] took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrencePath {
    Plain,
    Extended { m: i64, l: i64 },
}

impl fmt::Display for RecurrencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecurrencePath::Plain => write!(f, "plain"),
            RecurrencePath::Extended { m, l } => write!(f, "extended (m = {}, l = {})", m, l),
        }
    }
}

/// Recurrence in n for the generalized hypergeometric series with the given
/// upper/lower parameter lists and argument, summed over its natural range
/// (a terminating upper parameter like -n makes the sum finite). Reports
/// which route succeeded: the plain algorithm is attempted first, because
/// rational-linear parameters sometimes still have rational step-1 ratios;
/// when they do not (or no plain recurrence exists), the per-variable
/// strides from `find_mfold` select the extended algorithm.
pub fn hyperrecursion_with_path(
    upper: &[LinearArg],
    lower: &[LinearArg],
    x: &RatFunc,
    n: Var,
    max_order: usize,
) -> Result<(Recurrence, RecurrencePath)> {
    let f = series_summand(upper, lower, x)?;
    let plain = match sumrecursion(&f, K, n, max_order) {
        Ok(rec) => return Ok((rec, RecurrencePath::Plain)),
        Err(err @ (Error::NotHypergeometric { .. } | Error::NoRecurrenceFound { .. })) => {
            Err(err)
        }
        Err(other) => return Err(other),
    };
    let m = find_mfold(&f, n);
    let l = find_mfold(&f, K);
    if m == 1 && l == 1 {
        return plain.map(|rec| (rec, RecurrencePath::Plain));
    }
    let rec = extended_sumrecursion(&f, K, n, m, l, max_order)?;
    Ok((rec, RecurrencePath::Extended { m, l }))
}

/// [`hyperrecursion_with_path`] returning just the recurrence.
pub fn hyperrecursion(
    upper: &[LinearArg],
    lower: &[LinearArg],
    x: &RatFunc,
    n: Var,
    max_order: usize,
) -> Result<Recurrence> {
    Ok(hyperrecursion_with_path(upper, lower, x, n, max_order)?.0)
}

/// Exact numeric check of a recurrence against brute-force sums.
///
/// For every n in `n_range` (inclusive) where all shifted arguments
/// n - j*stride lie in [0, n], computes Sum(t) = sum_{k=0..t} F(t,k) exactly
/// at the given parameter assignment and checks
/// sum_j coeffs[j](n) * Sum(n - j*stride) = 0. The summand must vanish
/// outside the natural range 0..=t; this is spot-checked just past both
/// ends and a nonzero value there is an error, since the brute-force sum
/// would be wrong.
pub fn verify_recurrence_numeric(
    rec: &Recurrence,
    f: &Expr,
    k: Var,
    n: Var,
    n_range: (i64, i64),
    params: &BTreeMap<Var, Rat>,
) -> Result<bool> {
    let span = rec.order as i64 * rec.stride;
    let mut sums: BTreeMap<i64, Rat> = BTreeMap::new();
    let mut sum_at = |t: i64| -> Result<Rat> {
        if let Some(v) = sums.get(&t) {
            return Ok(v.clone());
        }
        let mut assign = params.clone();
        assign.insert(n, rat_i(t));
        let mut total = Rat::zero();
        for kv in 0..=t {
            assign.insert(k, rat_i(kv));
            total += f.eval(&assign)?;
        }
        for outside in [-2, -1, t + 1, t + 2] {
            assign.insert(k, rat_i(outside));
            let v = f.eval(&assign)?;
            if !v.is_zero() {
                return Err(Error::NonTerminating {
                    detail: format!(
                        "summand is {} at k = {} outside the natural range 0..={}",
                        v, outside, t
                    ),
                });
            }
        }
        sums.insert(t, total.clone());
        Ok(total)
    };
    let mut checked = false;
    for n_val in n_range.0..=n_range.1 {
        if n_val - span < 0 {
            continue;
        }
        checked = true;
        let mut assign = params.clone();
        assign.insert(n, rat_i(n_val));
        let mut total = Rat::zero();
        for (j, c) in rec.coeffs.iter().enumerate() {
            let weight = c.eval(&assign).map_err(|v| Error::UnassignedVariable(v.0))?;
            let t = n_val - j as i64 * rec.stride;
            total += weight * sum_at(t)?;
        }
        if !total.is_zero() {
            return Ok(false);
        }
    }
    if !checked {
        return Err(Error::InvalidInput {
            detail: format!(
                "no n in {}..={} leaves all shifts nonnegative (need n >= {})",
                n_range.0, n_range.1, span
            ),
        });
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_expr, parse_ratfunc};
    use crate::rational::rat;
    use crate::var::N;

    fn recurrence(f: &str, max_order: usize) -> Recurrence {
        sumrecursion(&parse_expr(f).unwrap(), K, N, max_order).unwrap()
    }

    fn polys(coeffs: &[&str]) -> Vec<Poly> {
        coeffs
            .iter()
            .map(|s| {
                if *s == "0" {
                    return Poly::zero();
                }
                let r = parse_ratfunc(s).unwrap();
                assert!(r.den().is_one(), "expected a polynomial: {}", s);
                r.num().clone()
            })
            .collect()
    }

    fn assert_recurrence(rec: &Recurrence, stride: i64, coeffs: &[&str]) {
        assert_eq!(rec.stride, stride);
        assert_eq!(rec.order + 1, coeffs.len());
        assert_eq!(rec.coeffs, normalize_coeffs(polys(coeffs)));
    }

    #[test]
    fn binomial_sum_halved_is_constant() {
        // sum_k C(n,k) / 2^n = 1 for all n: Sum(n) - Sum(n-1) = 0.
        let rec = recurrence("binomial(n, k) / 2^n", 3);
        assert_recurrence(&rec, 1, &["1", "-1"]);
    }

    #[test]
    fn franel_numbers_need_order_two() {
        let f = parse_expr("binomial(n, k)^3").unwrap();
        assert!(matches!(
            sumrecursion_order(&f, K, N, 1),
            Err(Error::NoRecurrenceFound { max_order: 1 })
        ));
        let rec = sumrecursion(&f, K, N, 5).unwrap();
        assert_eq!(rec.order, 2);
        assert_recurrence(&rec, 1, &["n^2", "-(7*n^2 - 7*n + 2)", "-8*(n - 1)^2"]);
    }

    #[test]
    fn strehl_equivalent_summand_gives_franel_recurrence() {
        let rec = recurrence("binomial(n, k)^2 * binomial(2*k, n)", 5);
        assert_recurrence(&rec, 1, &["n^2", "-(7*n^2 - 7*n + 2)", "-8*(n - 1)^2"]);
    }

    #[test]
    fn vandermonde_ratio_is_constant() {
        // sum_k C(a,k)C(b,n-k) = C(a+b,n):
        // the quotient summand gives Sum(n) - Sum(n-1) = 0.
        let rec =
            recurrence("binomial(a, k) * binomial(b, n - k) / binomial(a + b, n)", 3);
        assert_recurrence(&rec, 1, &["1", "-1"]);
    }

    #[test]
    fn derivation_reports_certificate_and_sigma() {
        let f = parse_expr("binomial(n, k) / 2^n").unwrap();
        let d = sumrecursion_derivation(&f, K, N, 3).unwrap();
        assert_eq!(d.sigmas.len(), 1);
        assert_eq!(d.sigmas[0], parse_ratfunc("-1").unwrap());
        // G(n,k) = R * (F(n,k) - F(n-1,k)) with
        // R = k(k-n-1)/(n+1-2k)... verified structurally: telescoping was
        // asserted inside; here just check R is nonzero and k-dependent.
        assert!(!d.certificate_ratio.is_zero());
        assert!(d.certificate_ratio.num().degree(K) > 0 || d.certificate_ratio.den().degree(K) > 0);
        assert!(!d.boundary_pole);
    }

    #[test]
    fn watson_with_respect_to_n_needs_stride_two() {
        // 3F2(-n, -n+b, c; (b-n+1)/2, 2c; 1)-type summand: Watson's theorem
        // with respect to n. Plain step-1 ratio in n is not rational; the
        // stride-2 algorithm finds
        // (b-2c-n+1)(n-1) Sum(n-2) - (b-n+1)(2c+n-1) Sum(n) = 0.
        let f = parse_expr(concat!(
            "pochhammer(-n, k) * pochhammer(b, k) * pochhammer(c, k)",
            " / (k! * pochhammer((b - n + 1)/2, k) * pochhammer(2*c, k))"
        ))
        .unwrap();
        assert!(matches!(
            term_ratio(&f, N, 1),
            Err(Error::NotHypergeometric { .. })
        ));
        assert_eq!(find_mfold(&f, N), 2);
        let rec = extended_sumrecursion(&f, K, N, 2, 1, 5).unwrap();
        assert_recurrence(
            &rec,
            2,
            &["(b - n + 1)*(2*c + n - 1)", "-(b - 2*c - n + 1)*(n - 1)"],
        );
    }

    #[test]
    fn extended_with_unit_strides_matches_plain() {
        let f = parse_expr("binomial(n, k)^3").unwrap();
        let plain = sumrecursion(&f, K, N, 5).unwrap();
        let ext = extended_sumrecursion(&f, K, N, 1, 1, 5).unwrap();
        assert_eq!(plain, ext);
    }

    #[test]
    fn half_k_summand_needs_k_stride_two() {
        // F = (-2)^n C(n,k) C(k/2,n): k-ratio is not rational (k/2
        // arguments), n-ratio is. Strides (m,l) = (1,2) give
        // Sum(n) - Sum(n-1) = 0.
        let f = parse_expr("(-2)^n * binomial(n, k) * binomial(k/2, n)").unwrap();
        assert_eq!(find_mfold(&f, N), 1);
        assert_eq!(find_mfold(&f, K), 2);
        let rec = extended_sumrecursion(&f, K, N, 1, 2, 5).unwrap();
        assert_recurrence(&rec, 1, &["1", "-1"]);
        // Without the alternating factor the same support gives
        // 2 Sum(n) + Sum(n-1) = 0.
        let g = parse_expr("binomial(n, k) * binomial(k/2, n)").unwrap();
        let rec = extended_sumrecursion(&g, K, N, 1, 2, 5).unwrap();
        assert_recurrence(&rec, 1, &["2", "1"]);
    }

    #[test]
    fn gauss_series_recurrence_from_parameter_lists() {
        // 2F1(a, -n; b; x): second-order recurrence in n.
        let upper = [
            LinearArg::new(Poly::var(Var('a'))).unwrap(),
            LinearArg::new(Poly::var(N).neg()).unwrap(),
        ];
        let lower = [LinearArg::new(Poly::var(Var('b'))).unwrap()];
        let x = RatFunc::var(Var('x'));
        let (rec, path) = hyperrecursion_with_path(&upper, &lower, &x, N, 5).unwrap();
        assert_eq!(path, RecurrencePath::Plain);
        assert_recurrence(
            &rec,
            1,
            &[
                "b - 1 + n",
                "-2*n + x*n + x*a - b + 2 - x",
                "-(x - 1)*(n - 1)",
            ],
        );
    }

    #[test]
    fn saalschuetz_style_series_skips_odd_orders() {
        // 3F2(-n, n+2a, a; a, (2a+1)/2; 1/2):
        // (n-1) Sum(n-2) + (n+2a-1) Sum(n) = 0.
        let a = Var('a');
        let upper = [
            LinearArg::new(Poly::var(N).neg()).unwrap(),
            LinearArg::new(Poly::var(N).add(&Poly::monomial(a, 1, rat_i(2)))).unwrap(),
            LinearArg::new(Poly::var(a)).unwrap(),
        ];
        let lower = [
            LinearArg::new(Poly::var(a)).unwrap(),
            LinearArg::new(
                Poly::monomial(a, 1, rat_i(1)).add(&Poly::constant(rat(1, 2))),
            )
            .unwrap(),
        ];
        let x = RatFunc::from_rat(rat(1, 2));
        let (rec, path) = hyperrecursion_with_path(&upper, &lower, &x, N, 5).unwrap();
        assert_eq!(path, RecurrencePath::Plain);
        assert_recurrence(&rec, 1, &["n + 2*a - 1", "0", "n - 1"]);
    }

    #[test]
    fn half_parameter_pair_still_takes_plain_path() {
        // 2F1(-n/2, -n/2 + 1/2; b + 1/2; 1): each upper parameter alone
        // shifts by a half-integer in n, but the pair combines to a rational
        // ratio, so the plain algorithm applies and gives
        // (2b + n - 1) Sum(n) - 2(b + n - 1) Sum(n-1) = 0.
        let b = Var('b');
        let half = Poly::constant(rat(1, 2));
        let upper = [
            LinearArg::new(Poly::monomial(N, 1, rat(-1, 2))).unwrap(),
            LinearArg::new(Poly::monomial(N, 1, rat(-1, 2)).add(&half)).unwrap(),
        ];
        let lower = [LinearArg::new(Poly::var(b).add(&half)).unwrap()];
        let x = RatFunc::one();
        let (rec, path) = hyperrecursion_with_path(&upper, &lower, &x, N, 5).unwrap();
        assert_eq!(path, RecurrencePath::Plain);
        assert_recurrence(&rec, 1, &["2*b + n - 1", "-2*(b + n - 1)"]);
    }

    #[test]
    fn numeric_check_accepts_true_recurrence_and_rejects_mutant() {
        let f = parse_expr("binomial(n, k)^3").unwrap();
        let rec = sumrecursion(&f, K, N, 5).unwrap();
        let params = BTreeMap::new();
        assert!(verify_recurrence_numeric(&rec, &f, K, N, (2, 15), &params).unwrap());
        let mut bad = rec.clone();
        bad.coeffs[1] = bad.coeffs[1].add(&Poly::one());
        assert!(!verify_recurrence_numeric(&bad, &f, K, N, (2, 15), &params).unwrap());
    }

    #[test]
    fn numeric_check_handles_strides_and_parameters() {
        let f = parse_expr(concat!(
            "pochhammer(-n, k) * pochhammer(b, k) * pochhammer(c, k)",
            " / (k! * pochhammer((b - n + 1)/2, k) * pochhammer(2*c, k))"
        ))
        .unwrap();
        let rec = extended_sumrecursion(&f, K, N, 2, 1, 5).unwrap();
        let mut params = BTreeMap::new();
        params.insert(Var('b'), rat(1, 3));
        params.insert(Var('c'), rat(1, 5));
        assert!(verify_recurrence_numeric(&rec, &f, K, N, (2, 12), &params).unwrap());
    }

    #[test]
    fn numeric_check_rejects_nonterminating_summand() {
        let f = parse_expr("1 / (k + 1)").unwrap();
        let rec = Recurrence { order: 1, stride: 1, coeffs: polys(&["1", "-1"]) };
        let params = BTreeMap::new();
        assert!(matches!(
            verify_recurrence_numeric(&rec, &f, K, N, (1, 3), &params),
            Err(Error::NonTerminating { .. })
        ));
    }

    /// Parses a rational-linear series parameter such as "1 + 2*a/3".
    fn series_arg(s: &str) -> LinearArg {
        let r = parse_ratfunc(s).unwrap();
        let c = r.den().constant_value().expect("series parameters are polynomial");
        LinearArg::new(r.num().mul_rat(&(rat_i(1) / c))).unwrap()
    }

    fn series_args(list: &[&str]) -> Vec<LinearArg> {
        list.iter().map(|s| series_arg(s)).collect()
    }

    /// Expands a product of polynomial factors given as strings.
    fn factor_product(factors: &[&str]) -> Poly {
        factors.iter().fold(Poly::one(), |acc, s| {
            let r = parse_ratfunc(s).unwrap();
            assert!(r.den().is_one(), "expected a polynomial factor: {}", s);
            acc.mul(r.num())
        })
    }

    fn assert_factored_recurrence(rec: &Recurrence, stride: i64, coeffs: &[&[&str]]) {
        assert_eq!(rec.stride, stride);
        assert_eq!(rec.order + 1, coeffs.len());
        let expected: Vec<Poly> = coeffs.iter().map(|fs| factor_product(fs)).collect();
        assert_eq!(rec.coeffs, normalize_coeffs(expected));
    }

    #[test]
    fn gessel_stanton_7f6_has_first_order_recurrence() {
        // Very-well-poised-style terminating 7F6 at x = 1 whose sum telescopes
        // to a first-order recurrence in n.
        let upper = series_args(&[
            "2*a",
            "2*b",
            "1 - 2*b",
            "1 + 2*a/3",
            "a + d + n + 1/2",
            "a - d",
            "-n",
        ]);
        let lower = series_args(&[
            "a - b + 1",
            "a + b + 1/2",
            "2*a/3",
            "-2*d - 2*n",
            "2*d + 1",
            "1 + 2*a + 2*n",
        ]);
        let (rec, path) =
            hyperrecursion_with_path(&upper, &lower, &RatFunc::one(), N, 1).unwrap();
        assert_eq!(path, RecurrencePath::Plain);
        assert_factored_recurrence(
            &rec,
            1,
            &[
                &["2*a + 2*b + 2*n - 1", "a - b + n", "2*d + 2*n - 1", "d + n"],
                &["2*a + 2*n - 1", "a + n", "2*b + 2*d + 2*n - 1", "b - d - n"],
            ],
        );
    }

    #[test]
    fn gessel_stanton_even_odd_7f6_needs_stride_two() {
        // This companion 7F6 sums to zero at odd n; its n-step ratio is not
        // rational (n enters two lower parameters with slope 1/2), so the
        // stride-2 extension kicks in and returns a Sum(n)/Sum(n-2) law.
        let upper =
            series_args(&["a", "b", "a + 1/2 - b", "1 + 2*a/3", "1 - 2*d", "2*a + 2*d + n", "-n"]);
        let lower = series_args(&[
            "2*a - 2*b + 1",
            "2*b",
            "2*a/3",
            "a + d + 1/2",
            "1 - d - n/2",
            "1 + a + n/2",
        ]);
        let (rec, path) =
            hyperrecursion_with_path(&upper, &lower, &RatFunc::one(), N, 1).unwrap();
        assert_eq!(path, RecurrencePath::Extended { m: 2, l: 1 });
        assert_factored_recurrence(
            &rec,
            2,
            &[
                &["n - 1 + 2*d + 2*a", "2*b - n - 2*a", "n - 1 + 2*b", "n - 2 + 2*d"],
                &["n - 1 + 2*d - 2*b + 2*a", "n - 2 + 2*d + 2*b", "2*a + n", "n - 1"],
            ],
        );
    }

    #[test]
    fn gessel_stanton_cubic_7f6_recurrence_stays_plain() {
        // A 7F6 with parameters advancing in thirds of n; every n-step still
        // shifts each Pochhammer argument by an integer, so the plain
        // algorithm applies directly despite the thirds.
        let upper = series_args(&[
            "a + 1/2",
            "a",
            "b",
            "1 - b",
            "-n",
            "(2*a + 1)/3 + n",
            "a/2 + 1",
        ]);
        let lower = series_args(&[
            "1/2",
            "(2*a - b + 3)/3",
            "(2*a + b + 2)/3",
            "-3*n",
            "2*a + 1 + 3*n",
            "a/2",
        ]);
        let (rec, path) =
            hyperrecursion_with_path(&upper, &lower, &RatFunc::one(), N, 1).unwrap();
        assert_eq!(path, RecurrencePath::Plain);
        assert_factored_recurrence(
            &rec,
            1,
            &[
                &["2*a + b + 3*n - 1", "2*a - b + 3*n", "3*n - 1", "3*n - 2"],
                &["2*a + 3*n - 1", "2*a + 3*n", "b + 3*n - 2", "b - 3*n + 1"],
            ],
        );
    }
}
