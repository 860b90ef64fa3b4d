//! Bounded set-theoretic formula language: AST, parser, printer, classifier.
//!
//! Grammar: atoms `v in w`, `v = w`, `false`; connectives `&`, `|`, `->`
//! (right associative) and `~p` as sugar for `p -> false`; quantifiers
//! `all v in t. f`, `some v in t. f`, `all v sub t. f`, `some v sub t. f`,
//! `All v. f`, `Some v. f`. HF literals are permitted wherever variables are.

use std::collections::HashSet;
use std::fmt;

use crate::hf::{parse_hf, HFSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(HFSet),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Falsum,
    Eq(Term, Term),
    In(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// all v in t. f
    BForall(String, Term, Box<Formula>),
    /// some v in t. f
    BExists(String, Term, Box<Formula>),
    /// all v sub t. f
    SubForall(String, Term, Box<Formula>),
    /// some v sub t. f
    SubExists(String, Term, Box<Formula>),
    /// All v. f
    UForall(String, Box<Formula>),
    /// Some v. f
    UExists(String, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Sigma0,
    Sigma0P,
    ContainsUnbounded,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("syntax error at byte {at}: {msg}")]
pub struct SyntaxError {
    pub at: usize,
    pub msg: String,
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Falsum)
    }

    pub fn classify(&self) -> Class {
        fn go(f: &Formula) -> Class {
            use Class::*;
            match f {
                Formula::Falsum | Formula::Eq(..) | Formula::In(..) => Sigma0,
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    join(go(a), go(b))
                }
                Formula::BForall(_, _, b) | Formula::BExists(_, _, b) => go(b),
                Formula::SubForall(_, _, b) | Formula::SubExists(_, _, b) => {
                    join(Sigma0P, go(b))
                }
                Formula::UForall(_, b) | Formula::UExists(_, b) => {
                    join(ContainsUnbounded, go(b))
                }
            }
        }
        fn join(a: Class, b: Class) -> Class {
            use Class::*;
            match (a, b) {
                (ContainsUnbounded, _) | (_, ContainsUnbounded) => ContainsUnbounded,
                (Sigma0P, _) | (_, Sigma0P) => Sigma0P,
                _ => Sigma0,
            }
        }
        go(self)
    }

    /// Replaces each unbounded quantifier by the corresponding `in`-bounded one.
    pub fn relativize(&self, bound: &Term) -> Formula {
        match self {
            Formula::Falsum | Formula::Eq(..) | Formula::In(..) => self.clone(),
            Formula::And(a, b) => Formula::and(a.relativize(bound), b.relativize(bound)),
            Formula::Or(a, b) => Formula::or(a.relativize(bound), b.relativize(bound)),
            Formula::Imp(a, b) => Formula::imp(a.relativize(bound), b.relativize(bound)),
            Formula::BForall(v, t, b) => {
                Formula::BForall(v.clone(), t.clone(), Box::new(b.relativize(bound)))
            }
            Formula::BExists(v, t, b) => {
                Formula::BExists(v.clone(), t.clone(), Box::new(b.relativize(bound)))
            }
            Formula::SubForall(v, t, b) => {
                Formula::SubForall(v.clone(), t.clone(), Box::new(b.relativize(bound)))
            }
            Formula::SubExists(v, t, b) => {
                Formula::SubExists(v.clone(), t.clone(), Box::new(b.relativize(bound)))
            }
            Formula::UForall(v, b) => {
                Formula::BForall(v.clone(), bound.clone(), Box::new(b.relativize(bound)))
            }
            Formula::UExists(v, b) => {
                Formula::BExists(v.clone(), bound.clone(), Box::new(b.relativize(bound)))
            }
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    /// Substitutes a constant for every free occurrence of a variable.
    pub fn subst(&self, name: &str, value: HFSet) -> Formula {
        let sub_term = |t: &Term| -> Term {
            match t {
                Term::Var(v) if v == name => Term::Const(value),
                other => other.clone(),
            }
        };
        match self {
            Formula::Falsum => Formula::Falsum,
            Formula::Eq(a, b) => Formula::Eq(sub_term(a), sub_term(b)),
            Formula::In(a, b) => Formula::In(sub_term(a), sub_term(b)),
            Formula::And(a, b) => Formula::and(a.subst(name, value), b.subst(name, value)),
            Formula::Or(a, b) => Formula::or(a.subst(name, value), b.subst(name, value)),
            Formula::Imp(a, b) => Formula::imp(a.subst(name, value), b.subst(name, value)),
            Formula::BForall(v, t, b) => Formula::BForall(
                v.clone(),
                sub_term(t),
                Box::new(if v == name { (**b).clone() } else { b.subst(name, value) }),
            ),
            Formula::BExists(v, t, b) => Formula::BExists(
                v.clone(),
                sub_term(t),
                Box::new(if v == name { (**b).clone() } else { b.subst(name, value) }),
            ),
            Formula::SubForall(v, t, b) => Formula::SubForall(
                v.clone(),
                sub_term(t),
                Box::new(if v == name { (**b).clone() } else { b.subst(name, value) }),
            ),
            Formula::SubExists(v, t, b) => Formula::SubExists(
                v.clone(),
                sub_term(t),
                Box::new(if v == name { (**b).clone() } else { b.subst(name, value) }),
            ),
            Formula::UForall(v, b) => Formula::UForall(
                v.clone(),
                Box::new(if v == name { (**b).clone() } else { b.subst(name, value) }),
            ),
            Formula::UExists(v, b) => Formula::UExists(
                v.clone(),
                Box::new(if v == name { (**b).clone() } else { b.subst(name, value) }),
            ),
        }
    }

    /// Renames every free occurrence of a variable (used for binder renaming).
    pub fn rename_var(&self, from: &str, to: &str) -> Formula {
        let sub_term = |t: &Term| -> Term {
            match t {
                Term::Var(v) if v == from => Term::Var(to.to_string()),
                other => other.clone(),
            }
        };
        let body = |v: &str, b: &Formula| -> Formula {
            if v == from {
                b.clone()
            } else {
                b.rename_var(from, to)
            }
        };
        match self {
            Formula::Falsum => Formula::Falsum,
            Formula::Eq(a, b) => Formula::Eq(sub_term(a), sub_term(b)),
            Formula::In(a, b) => Formula::In(sub_term(a), sub_term(b)),
            Formula::And(a, b) => Formula::and(a.rename_var(from, to), b.rename_var(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_var(from, to), b.rename_var(from, to)),
            Formula::Imp(a, b) => Formula::imp(a.rename_var(from, to), b.rename_var(from, to)),
            Formula::BForall(v, t, b) => {
                Formula::BForall(v.clone(), sub_term(t), Box::new(body(v, b)))
            }
            Formula::BExists(v, t, b) => {
                Formula::BExists(v.clone(), sub_term(t), Box::new(body(v, b)))
            }
            Formula::SubForall(v, t, b) => {
                Formula::SubForall(v.clone(), sub_term(t), Box::new(body(v, b)))
            }
            Formula::SubExists(v, t, b) => {
                Formula::SubExists(v.clone(), sub_term(t), Box::new(body(v, b)))
            }
            Formula::UForall(v, b) => Formula::UForall(v.clone(), Box::new(body(v, b))),
            Formula::UExists(v, b) => Formula::UExists(v.clone(), Box::new(body(v, b))),
        }
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
    let term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
        if let Term::Var(v) = t {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
    };
    match f {
        Formula::Falsum => {}
        Formula::Eq(a, b) | Formula::In(a, b) => {
            term(a, bound, out);
            term(b, bound, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::BForall(v, t, b)
        | Formula::BExists(v, t, b)
        | Formula::SubForall(v, t, b)
        | Formula::SubExists(v, t, b) => {
            term(t, bound, out);
            bound.push(v.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Formula::UForall(v, b) | Formula::UExists(v, b) => {
            bound.push(v.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Lit(HFSet),
    KwAll,
    KwSome,
    KwUAll,
    KwUSome,
    KwIn,
    KwSub,
    KwFalse,
    Eq,
    Amp,
    Bar,
    Arrow,
    Tilde,
    LParen,
    RParen,
    Dot,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            b'(' => {
                toks.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((start, Tok::RParen));
                i += 1;
            }
            b'.' => {
                toks.push((start, Tok::Dot));
                i += 1;
            }
            b'=' => {
                toks.push((start, Tok::Eq));
                i += 1;
            }
            b'&' => {
                toks.push((start, Tok::Amp));
                i += 1;
            }
            b'|' => {
                toks.push((start, Tok::Bar));
                i += 1;
            }
            b'~' => {
                toks.push((start, Tok::Tilde));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((start, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(SyntaxError {
                        at: i,
                        msg: "expected '->'".into(),
                    });
                }
            }
            b'{' => {
                let mut depth = 0usize;
                let mut j = i;
                loop {
                    match bytes.get(j) {
                        Some(b'{') => depth += 1,
                        Some(b'}') => {
                            depth -= 1;
                            if depth == 0 {
                                j += 1;
                                break;
                            }
                        }
                        Some(_) => {}
                        None => {
                            return Err(SyntaxError {
                                at: i,
                                msg: "unterminated set literal".into(),
                            })
                        }
                    }
                    j += 1;
                }
                let lit = parse_hf(&text[i..j]).map_err(|e| SyntaxError {
                    at: i,
                    msg: e.to_string(),
                })?;
                toks.push((start, Tok::Lit(lit)));
                i = j;
            }
            b'<' => {
                let mut depth = 0usize;
                let mut j = i;
                loop {
                    match bytes.get(j) {
                        Some(b'<') => depth += 1,
                        Some(b'>') => {
                            depth -= 1;
                            if depth == 0 {
                                j += 1;
                                break;
                            }
                        }
                        Some(_) => {}
                        None => {
                            return Err(SyntaxError {
                                at: i,
                                msg: "unterminated pair literal".into(),
                            })
                        }
                    }
                    j += 1;
                }
                let lit = parse_hf(&text[i..j]).map_err(|e| SyntaxError {
                    at: i,
                    msg: e.to_string(),
                })?;
                toks.push((start, Tok::Lit(lit)));
                i = j;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let lit = parse_hf(&text[i..j]).map_err(|e| SyntaxError {
                    at: i,
                    msg: e.to_string(),
                })?;
                toks.push((start, Tok::Lit(lit)));
                i = j;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let word = &text[i..j];
                let tok = match word {
                    "all" => Tok::KwAll,
                    "some" => Tok::KwSome,
                    "All" => Tok::KwUAll,
                    "Some" => Tok::KwUSome,
                    "in" => Tok::KwIn,
                    "sub" => Tok::KwSub,
                    "false" => Tok::KwFalse,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((start, tok));
                i = j;
            }
            _ => {
                return Err(SyntaxError {
                    at: i,
                    msg: format!("unexpected character {:?}", c as char),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }
    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|(a, _)| *a).unwrap_or(self.end)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }
    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(SyntaxError {
                at: self.at(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or_level()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_level(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.and_level()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            let rhs = self.and_level()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and_level(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::KwAll) | Some(Tok::KwSome) => {
                let all = self.peek() == Some(&Tok::KwAll);
                self.pos += 1;
                let v = self.ident()?;
                let sub = match self.bump() {
                    Some(Tok::KwIn) => false,
                    Some(Tok::KwSub) => true,
                    _ => {
                        return Err(SyntaxError {
                            at: self.at(),
                            msg: "expected 'in' or 'sub'".into(),
                        })
                    }
                };
                let bound = self.term()?;
                self.expect(Tok::Dot, "'.'")?;
                let body = Box::new(self.formula()?);
                Ok(match (all, sub) {
                    (true, false) => Formula::BForall(v, bound, body),
                    (false, false) => Formula::BExists(v, bound, body),
                    (true, true) => Formula::SubForall(v, bound, body),
                    (false, true) => Formula::SubExists(v, bound, body),
                })
            }
            Some(Tok::KwUAll) | Some(Tok::KwUSome) => {
                let all = self.peek() == Some(&Tok::KwUAll);
                self.pos += 1;
                let v = self.ident()?;
                self.expect(Tok::Dot, "'.'")?;
                let body = Box::new(self.formula()?);
                Ok(if all {
                    Formula::UForall(v, body)
                } else {
                    Formula::UExists(v, body)
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::KwFalse) => {
                self.pos += 1;
                Ok(Formula::Falsum)
            }
            _ => {
                let lhs = self.term()?;
                match self.bump() {
                    Some(Tok::Eq) => Ok(Formula::Eq(lhs, self.term()?)),
                    Some(Tok::KwIn) => Ok(Formula::In(lhs, self.term()?)),
                    _ => Err(SyntaxError {
                        at: self.at(),
                        msg: "expected '=' or 'in'".into(),
                    }),
                }
            }
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(SyntaxError {
                at: self.at(),
                msg: "expected identifier".into(),
            }),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(Term::Var(s)),
            Some(Tok::Lit(v)) => Ok(Term::Const(v)),
            _ => Err(SyntaxError {
                at: self.at(),
                msg: "expected variable or literal".into(),
            }),
        }
    }
}

/// Parses formula text. Bound variables that collide with free variables are
/// renamed apart.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(SyntaxError {
            at: p.at(),
            msg: "trailing input".into(),
        });
    }
    Ok(rename_bound_apart(f))
}

/// Renames binders whose name collides with a free variable of the formula.
fn rename_bound_apart(f: Formula) -> Formula {
    let free: HashSet<String> = f.free_vars().into_iter().collect();
    let mut used: HashSet<String> = free.clone();
    go(f, &free, &mut used)
}

fn go(f: Formula, free: &HashSet<String>, used: &mut HashSet<String>) -> Formula {
    let fresh = |base: &str, used: &mut HashSet<String>| -> String {
        let mut k = 1usize;
        loop {
            let cand = format!("{base}_{k}");
            if !used.contains(&cand) {
                used.insert(cand.clone());
                return cand;
            }
            k += 1;
        }
    };
    let binder = |v: String,
                      b: Formula,
                      free: &HashSet<String>,
                      used: &mut HashSet<String>|
     -> (String, Formula) {
        used.insert(v.clone());
        if free.contains(&v) {
            let nv = fresh(&v, used);
            let nb = b.rename_var(&v, &nv);
            (nv, go(nb, free, used))
        } else {
            (v, go(b, free, used))
        }
    };
    match f {
        Formula::Falsum | Formula::Eq(..) | Formula::In(..) => f,
        Formula::And(a, b) => Formula::and(go(*a, free, used), go(*b, free, used)),
        Formula::Or(a, b) => Formula::or(go(*a, free, used), go(*b, free, used)),
        Formula::Imp(a, b) => Formula::imp(go(*a, free, used), go(*b, free, used)),
        Formula::BForall(v, t, b) => {
            let (v, b) = binder(v, *b, free, used);
            Formula::BForall(v, t, Box::new(b))
        }
        Formula::BExists(v, t, b) => {
            let (v, b) = binder(v, *b, free, used);
            Formula::BExists(v, t, Box::new(b))
        }
        Formula::SubForall(v, t, b) => {
            let (v, b) = binder(v, *b, free, used);
            Formula::SubForall(v, t, Box::new(b))
        }
        Formula::SubExists(v, t, b) => {
            let (v, b) = binder(v, *b, free, used);
            Formula::SubExists(v, t, Box::new(b))
        }
        Formula::UForall(v, b) => {
            let (v, b) = binder(v, *b, free, used);
            Formula::UForall(v, Box::new(b))
        }
        Formula::UExists(v, b) => {
            let (v, b) = binder(v, *b, free, used);
            Formula::UExists(v, Box::new(b))
        }
    }
}

// ---------------------------------------------------------------------------
// Printing (minimal parentheses; reparses to the same AST)

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print_at(self, 1, f)
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::BForall(..)
        | Formula::BExists(..)
        | Formula::SubForall(..)
        | Formula::SubExists(..)
        | Formula::UForall(..)
        | Formula::UExists(..) => 1,
        _ => 4,
    }
}

fn print_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let needs_parens = prec(f) < min;
    if needs_parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Falsum => write!(out, "false")?,
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::In(a, b) => write!(out, "{a} in {b}")?,
        Formula::And(a, b) => {
            print_at(a, 3, out)?;
            write!(out, " & ")?;
            print_at(b, 4, out)?;
        }
        Formula::Or(a, b) => {
            print_at(a, 2, out)?;
            write!(out, " | ")?;
            print_at(b, 3, out)?;
        }
        Formula::Imp(a, b) => {
            print_at(a, 2, out)?;
            write!(out, " -> ")?;
            print_at(b, 1, out)?;
        }
        Formula::BForall(v, t, b) => {
            write!(out, "all {v} in {t}. ")?;
            print_at(b, 1, out)?;
        }
        Formula::BExists(v, t, b) => {
            write!(out, "some {v} in {t}. ")?;
            print_at(b, 1, out)?;
        }
        Formula::SubForall(v, t, b) => {
            write!(out, "all {v} sub {t}. ")?;
            print_at(b, 1, out)?;
        }
        Formula::SubExists(v, t, b) => {
            write!(out, "some {v} sub {t}. ")?;
            print_at(b, 1, out)?;
        }
        Formula::UForall(v, b) => {
            write!(out, "All {v}. ")?;
            print_at(b, 1, out)?;
        }
        Formula::UExists(v, b) => {
            write!(out, "Some {v}. ")?;
            print_at(b, 1, out)?;
        }
    }
    if needs_parens {
        write!(out, ")")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_parse() {
        let f = parse_formula("x1 in x2").unwrap();
        assert_eq!(f, Formula::In(Term::var("x1"), Term::var("x2")));
        assert_eq!(f.free_vars(), vec!["x1".to_string(), "x2".to_string()]);
    }

    #[test]
    fn bforall_with_imp_body() {
        let f = parse_formula("all x in a. (x in b -> x in c)").unwrap();
        match &f {
            Formula::BForall(v, Term::Var(a), body) => {
                assert_eq!(v, "x");
                assert_eq!(a, "a");
                assert!(matches!(**body, Formula::Imp(..)));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn negation_sugar() {
        let f = parse_formula("~(y = y)").unwrap();
        assert_eq!(
            f,
            Formula::neg(Formula::Eq(Term::var("y"), Term::var("y")))
        );
    }

    #[test]
    fn arrow_right_assoc() {
        let f = parse_formula("a in b -> a in c -> a in d").unwrap();
        match f {
            Formula::Imp(_, rhs) => assert!(matches!(*rhs, Formula::Imp(..))),
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn phi_nat_three_conjuncts() {
        // The Sigma_0 characterization of the naturals.
        let text = "some x in u. all y in x. ~(y = y) \
                    & all x in u. some y in u. all z in y. (z in x | z = x) \
                    & all x in u. (x = {} | some y in u. all z in x. (z in y | z = y))";
        let f = parse_formula(text).unwrap();
        // `&` is left associative; the top shape is And(And(a,b),c) inside the
        // first quantifier body or at top level depending on reading; just
        // check it parses, classifies Sigma0 and has the single free var u.
        assert_eq!(f.classify(), Class::Sigma0);
        assert_eq!(f.free_vars(), vec!["u".to_string()]);
    }

    #[test]
    fn classification() {
        assert_eq!(
            parse_formula("x in y").unwrap().classify(),
            Class::Sigma0
        );
        assert_eq!(
            parse_formula("all x sub a. x in y").unwrap().classify(),
            Class::Sigma0P
        );
        assert_eq!(
            parse_formula("Some x. x = x").unwrap().classify(),
            Class::ContainsUnbounded
        );
    }

    #[test]
    fn relativization() {
        let f = parse_formula("Some x. x = x").unwrap();
        let r = f.relativize(&Term::var("a"));
        assert_eq!(r, parse_formula("some x in a. x = x").unwrap());
        assert_ne!(r.classify(), Class::ContainsUnbounded);
        let g = parse_formula("all x in a. x in b").unwrap();
        assert_eq!(g.relativize(&Term::var("c")), g);
        // nested mixed quantifiers: only unbounded ones are rewritten
        let m = parse_formula("All x. some y in x. All z. z in y").unwrap();
        let rm = m.relativize(&Term::var("a"));
        assert_eq!(
            rm,
            parse_formula("all x in a. some y in x. all z in a. z in y").unwrap()
        );
    }

    #[test]
    fn binder_renamed_apart_from_free() {
        let f = parse_formula("x in y & all x in y. x = x").unwrap();
        match &f {
            Formula::And(_, rhs) => match &**rhs {
                Formula::BForall(v, _, body) => {
                    assert_ne!(v, "x");
                    assert_eq!(
                        **body,
                        Formula::Eq(Term::var(v), Term::var(v))
                    );
                }
                other => panic!("unexpected: {other:?}"),
            },
            other => panic!("unexpected: {other:?}"),
        }
        assert_eq!(f.free_vars(), vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "x in y",
            "x = y -> (x in z | y in z)",
            "all v in a. some w in v. w in b & v = w",
            "~(a in b) & false",
            "All x. Some y. x in y",
            "all x sub 2. (0 in x -> 0 in x)",
            "(a in b -> a in c) -> a in d",
            "{1,{2}} in x",
        ] {
            let f = parse_formula(text).unwrap();
            let printed = f.to_string();
            let reparsed = parse_formula(&printed).unwrap();
            assert_eq!(reparsed, f, "round trip of {text} via {printed}");
        }
    }
}
