//! Canonical text output for terms and expressions.
//!
//! The printed form uses exactly the input grammar (see the parser module),
//! so parsing a printed expression reproduces the structured value.

use std::fmt;

use crate::ratfunc::RatFunc;
use crate::term::{Expr, Factor, HyperTerm, LinearArg};

fn is_simple_atom(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

fn paren_unless_atom(s: String) -> String {
    if is_simple_atom(&s) {
        s
    } else {
        format!("({})", s)
    }
}

fn fmt_base(base: &RatFunc) -> String {
    paren_unless_atom(format!("{}", base))
}

fn fmt_exponent(arg: &LinearArg) -> String {
    paren_unless_atom(format!("{}", arg))
}

fn fmt_factor(f: &Factor) -> String {
    match f {
        Factor::Factorial(a) => format!("{}!", paren_unless_atom(format!("{}", a))),
        Factor::Gamma(a) => format!("Gamma({})", a),
        Factor::Binomial(t, b) => format!("binomial({}, {})", t, b),
        Factor::Pochhammer(b, c) => format!("pochhammer({}, {})", b, c),
        Factor::Power(base, e) => format!("{}^{}", fmt_base(base), fmt_exponent(e)),
    }
}

fn fmt_factor_pow(f: &Factor, e: u64) -> String {
    let s = fmt_factor(f);
    if e == 1 {
        return s;
    }
    // A postfix factorial binds tighter than ^, so (2*k)!^2 is unambiguous;
    // function forms need no parentheses either. Powers fold their outer
    // exponent into the linear exponent during normalization, so e = 1 there.
    format!("{}^{}", s, e)
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let coeff = self.coeff();
        let mut mul_parts: Vec<String> = Vec::new();
        let mut div_parts: Vec<String> = Vec::new();
        for (fac, e) in self.factors() {
            if *e >= 0 {
                mul_parts.push(fmt_factor_pow(fac, *e as u64));
            } else {
                div_parts.push(fmt_factor_pow(fac, e.unsigned_abs()));
            }
        }
        let mut lead = String::new();
        let coeff_str = format!("{}", coeff);
        if mul_parts.is_empty() {
            lead = coeff_str;
        } else if coeff_str == "1" {
            // skip the unit coefficient
        } else if coeff_str == "-1" {
            lead = "-".to_string();
        } else if coeff.den().is_one() && coeff.num().num_terms() > 1 {
            lead = format!("({})", coeff_str);
        } else {
            lead = coeff_str;
        }
        let mut out = String::new();
        if lead == "-" {
            out.push('-');
            out.push_str(&mul_parts.join("*"));
        } else if lead.is_empty() {
            out.push_str(&mul_parts.join("*"));
        } else {
            out.push_str(&lead);
            if !mul_parts.is_empty() {
                out.push('*');
                out.push_str(&mul_parts.join("*"));
            }
        }
        for d in div_parts {
            out.push('/');
            out.push_str(&d);
        }
        write!(f, "{}", out)
    }
}

impl fmt::Debug for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn fmt_sum(terms: &[HyperTerm]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let s = format!("{}", t);
        if i == 0 {
            out.push_str(&s);
        } else if let Some(rest) = s.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&s);
        }
    }
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num = fmt_sum(self.num_terms());
        if self.den_terms().len() == 1 && self.den_terms()[0] == HyperTerm::one() {
            return write!(f, "{}", num);
        }
        let num = if self.num_terms().len() > 1 { format!("({})", num) } else { num };
        write!(f, "{}/({})", num, fmt_sum(self.den_terms()))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
