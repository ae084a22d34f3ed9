//! Expression parser.
//!
//! Grammar (whitespace between tokens is ignored, no implicit multiplication):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*
//! power  := postfix ['^' postfix]
//! postfix:= atom ['!']*
//! atom   := integer | variable | call | '(' expr ')'
//! call   := 'factorial' '(' expr ')'
//!         | 'Gamma' '(' expr ')'
//!         | 'binomial' '(' expr ',' expr ')'
//!         | 'pochhammer' '(' expr ',' expr ')'
//! ```
//!
//! Variables are single lowercase letters; k and n are the summation
//! variables, everything else is a free parameter. Arguments of factorial,
//! Gamma, binomial, and pochhammer must be linear in the variables;
//! exponential bases must not contain k or n.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::{as_i64, Rat};
use crate::term::{Expr, Factor, HyperTerm, LinearArg};
use crate::var::{Var, K, N};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(char),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Bang,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'!' => {
                    lx.pos += 1;
                    Tok::Bang
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b',' => {
                    lx.pos += 1;
                    Tok::Comma
                }
                b'0'..=b'9' => {
                    let mut end = lx.pos;
                    while end < lx.src.len() && lx.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                    lx.pos = end;
                    Tok::Int(text.parse().unwrap())
                }
                c if c.is_ascii_alphabetic() => {
                    let mut end = lx.pos;
                    while end < lx.src.len() && lx.src[end].is_ascii_alphabetic() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                    lx.pos = end;
                    if text.len() == 1 && text.as_bytes()[0].is_ascii_lowercase() {
                        Tok::Var(text.chars().next().unwrap())
                    } else {
                        Tok::Name(text.to_string())
                    }
                }
                other => {
                    return Err(Error::Parse {
                        pos: start,
                        msg: format!("unexpected character '{}'", other as char),
                    })
                }
            };
            out.push((tok, start));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(Error::Parse { pos, msg: format!("expected {}, found {:?}", what, t) }),
            None => Err(Error::Parse { pos, msg: format!("expected {}, found end of input", what) }),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let negate = matches!(self.peek(), Some(Tok::Minus));
        if negate {
            self.bump();
        }
        let mut acc = self.parse_term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    acc = acc.add(&rhs)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    acc = acc.sub(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut acc = self.parse_power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.parse_power()?;
                    acc = acc.mul(&rhs)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.parse_power()?;
                    acc = acc.div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_postfix()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        let pos = self.here();
        self.bump();
        let exp = self.parse_postfix()?;
        apply_power(base, exp, pos)
    }

    fn parse_postfix(&mut self) -> Result<Expr> {
        let mut e = self.parse_atom()?;
        while matches!(self.peek(), Some(Tok::Bang)) {
            let pos = self.here();
            self.bump();
            let arg = expr_to_linear(&e).map_err(|err| at(err, pos))?;
            e = Expr::from_term(HyperTerm::from_factor(Factor::Factorial(arg))?);
        }
        Ok(e)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Int(i)) => {
                self.reject_adjacent_value(pos)?;
                Ok(Expr::from_rat(Rat::from_integer(i)))
            }
            Some(Tok::Var(c)) => {
                self.reject_adjacent_value(pos)?;
                let v = Var::new(c).ok_or_else(|| Error::Parse {
                    pos,
                    msg: format!("invalid variable '{}'", c),
                })?;
                Ok(Expr::from_ratfunc(RatFunc::var(v)))
            }
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Name(name)) => match name.as_str() {
                "factorial" => {
                    let (a,) = self.call_args1()?;
                    let arg = expr_to_linear(&a).map_err(|e| at(e, pos))?;
                    Ok(Expr::from_term(HyperTerm::from_factor(Factor::Factorial(arg))?))
                }
                "Gamma" => {
                    let (a,) = self.call_args1()?;
                    let arg = expr_to_linear(&a).map_err(|e| at(e, pos))?;
                    Ok(Expr::from_term(HyperTerm::from_factor(Factor::Gamma(arg))?))
                }
                "binomial" => {
                    let (a, b) = self.call_args2()?;
                    let top = expr_to_linear(&a).map_err(|e| at(e, pos))?;
                    let bot = expr_to_linear(&b).map_err(|e| at(e, pos))?;
                    Ok(Expr::from_term(HyperTerm::from_factor(Factor::Binomial(top, bot))?))
                }
                "pochhammer" => {
                    let (a, b) = self.call_args2()?;
                    let base = expr_to_linear(&a).map_err(|e| at(e, pos))?;
                    let count = expr_to_linear(&b).map_err(|e| at(e, pos))?;
                    Ok(Expr::from_term(HyperTerm::from_factor(Factor::Pochhammer(base, count))?))
                }
                other => Err(Error::Parse { pos, msg: format!("unknown function '{}'", other) }),
            },
            Some(t) => Err(Error::Parse { pos, msg: format!("unexpected token {:?}", t) }),
            None => Err(Error::Parse { pos, msg: "unexpected end of input".into() }),
        }
    }

    /// Numbers and variables must not be directly followed by another value;
    /// multiplication is always explicit.
    fn reject_adjacent_value(&self, pos: usize) -> Result<()> {
        match self.peek() {
            Some(Tok::Int(_)) | Some(Tok::Var(_)) | Some(Tok::Name(_)) | Some(Tok::LParen) => {
                Err(Error::Parse {
                    pos,
                    msg: "missing operator (implicit multiplication is not allowed)".into(),
                })
            }
            _ => Ok(()),
        }
    }

    fn call_args1(&mut self) -> Result<(Expr,)> {
        self.expect(Tok::LParen, "'('")?;
        let a = self.parse_expr()?;
        self.expect(Tok::RParen, "')'")?;
        Ok((a,))
    }

    fn call_args2(&mut self) -> Result<(Expr, Expr)> {
        self.expect(Tok::LParen, "'('")?;
        let a = self.parse_expr()?;
        self.expect(Tok::Comma, "','")?;
        let b = self.parse_expr()?;
        self.expect(Tok::RParen, "')'")?;
        Ok((a, b))
    }
}

fn at(e: Error, pos: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        Error::NonLinearArgument { detail } => {
            Error::Parse { pos, msg: format!("argument is not linear: {}", detail) }
        }
        other => other,
    }
}

fn apply_power(base: Expr, exp: Expr, pos: usize) -> Result<Expr> {
    // Constant integer exponents are structural powers of any expression.
    if let Ok(r) = expr_to_ratfunc(&exp) {
        if let Some(c) = r.constant_value() {
            if let Some(e) = as_i64(&c) {
                return base.pow_int(e);
            }
        }
    }
    // Otherwise the exponent must be linear and the base free of k and n.
    let earg = expr_to_linear(&exp).map_err(|e| at(e, pos))?;
    let b = expr_to_ratfunc(&base).map_err(|_| Error::NotHypergeometric {
        detail: "exponential base must be a rational function of the parameters".into(),
    })?;
    if b.vars().contains(&K) || b.vars().contains(&N) {
        return Err(Error::NotHypergeometric {
            detail: format!("base {} contains a summation variable under a symbolic exponent", b),
        });
    }
    Ok(Expr::from_term(HyperTerm::from_factor(Factor::Power(b, earg))?))
}

/// Parses an expression in the input grammar.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.parse_expr()?;
    if p.pos < p.toks.len() {
        return Err(Error::Parse { pos: p.here(), msg: "trailing input".into() });
    }
    Ok(e)
}

/// Parses text that must denote a rational function of the variables.
pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let e = parse_expr(src)?;
    expr_to_ratfunc(&e)
}

/// Coerces an expression to a rational function; fails if any special
/// factor remains.
pub fn expr_to_ratfunc(e: &Expr) -> Result<RatFunc> {
    let Some(t) = e.as_single_term() else {
        return Err(Error::InvalidInput { detail: format!("{} is not a plain rational function", e) });
    };
    if !t.factors().is_empty() {
        return Err(Error::InvalidInput { detail: format!("{} is not a plain rational function", t) });
    }
    Ok(t.coeff().clone())
}

/// Coerces an expression to a linear argument.
pub fn expr_to_linear(e: &Expr) -> Result<LinearArg> {
    let r = expr_to_ratfunc(e).map_err(|_| Error::NonLinearArgument {
        detail: format!("{}", e),
    })?;
    let den = r.den().constant_value().ok_or_else(|| Error::NonLinearArgument {
        detail: format!("{}", r),
    })?;
    LinearArg::new(r.num().mul_rat(&den.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_i};
    use std::collections::BTreeMap;

    fn eval(src: &str, k: i64, n: i64) -> Rat {
        let mut assign = BTreeMap::new();
        assign.insert(K, rat_i(k));
        assign.insert(N, rat_i(n));
        parse_expr(src).unwrap().eval(&assign).unwrap()
    }

    #[test]
    fn numbers_and_arithmetic() {
        assert_eq!(eval("1/2 + 1/3", 0, 0), rat(5, 6));
        assert_eq!(eval("2*n - k^2", 3, 5), rat_i(1));
        assert_eq!(eval("-n + 1", 0, 4), rat_i(-3));
        assert_eq!(eval("2^n/n", 0, 4), rat_i(4));
    }

    #[test]
    fn factorial_forms_agree() {
        let a = parse_expr("factorial(k - 1)").unwrap();
        let b = parse_expr("(k - 1)!").unwrap();
        assert_eq!(a, b);
        assert_eq!(eval("k!", 5, 0), rat_i(120));
        assert_eq!(eval("(2*k)!/k!", 3, 0), rat_i(120));
    }

    #[test]
    fn binomial_and_pochhammer() {
        assert_eq!(eval("binomial(n, k)", 2, 5), rat_i(10));
        assert_eq!(eval("pochhammer(n, k)", 3, 4), rat_i(120));
        assert_eq!(eval("Gamma(k + 1)", 4, 0), rat_i(24));
    }

    #[test]
    fn symbolic_exponents() {
        assert_eq!(eval("(-1)^k", 3, 0), rat_i(-1));
        assert_eq!(eval("2^(n - k)", 1, 4), rat_i(8));
        assert_eq!(eval("(1/2)^k", 2, 0), rat(1, 4));
    }

    #[test]
    fn nonlinear_arguments_rejected() {
        assert!(matches!(parse_expr("factorial(k*n)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("binomial(k^2, k)"), Err(Error::Parse { .. })));
        assert!(parse_expr("factorial(k/2)").is_ok());
    }

    #[test]
    fn summation_variable_in_base_rejected() {
        assert!(matches!(parse_expr("k^n"), Err(Error::NotHypergeometric { .. })));
        assert!(matches!(parse_expr("(k + 1)^k"), Err(Error::NotHypergeometric { .. })));
        assert!(parse_expr("k^3").is_ok());
        assert!(parse_expr("x^k").is_ok());
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(matches!(parse_expr("2k"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("2(k + 1)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("k n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_expr("k + ?") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected parse error, got {:?}", other),
        }
        assert!(matches!(parse_expr("binomial(n k)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("k +"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("(k"), Err(Error::Parse { .. })));
    }

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "binomial(n, k)",
            "(-1)^k*binomial(n, k)/2^n",
            "k!*(2*k)!/(3*k + 1)!",
            "pochhammer(a, k)*pochhammer(b, k)/(k!*pochhammer(c, k))",
            "(4*k - 3)*binomial(2*k, k)/(k + 1)",
            "binomial(n, k) + Gamma(n - k)",
            "1/(binomial(n, k) + 1)",
            "x^(n - 2*k)*(k/2)!",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = format!("{}", e);
            let back = parse_expr(&printed).unwrap_or_else(|err| {
                panic!("printed form {:?} failed to parse: {:?}", printed, err)
            });
            assert_eq!(back, e, "round trip changed {:?} -> {:?}", src, printed);
        }
    }

    #[test]
    fn ratfunc_coercions() {
        let r = parse_ratfunc("3*(a + k)*(n - k)/((n + 3*a + k - 2)*n)").unwrap();
        assert_eq!(r.num().degree(K), 2);
        assert!(parse_ratfunc("k!").is_err());
        let l = expr_to_linear(&parse_expr("k/2 - n + 1/3").unwrap()).unwrap();
        assert_eq!(l.coeff(K), rat(1, 2));
        assert_eq!(l.coeff(N), rat_i(-1));
        assert_eq!(l.constant_part(), rat(1, 3));
    }
}
