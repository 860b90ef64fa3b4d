//! The fundamental binary operations, the auxiliary pairing/slice operations,
//! and a small term language over them with s-expression I/O.

use std::fmt;

use crate::hf::HFSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpCode {
    Pair,
    Inter,
    Union,
    Diff,
    Times,
    Imp,
    Forall,
    Dom,
    Ran,
    Abc,
    Acb,
    Eq,
    In,
    G0,
    G1,
    G2,
    G3,
}

pub const FUNDAMENTAL: [OpCode; 13] = [
    OpCode::Pair,
    OpCode::Inter,
    OpCode::Union,
    OpCode::Diff,
    OpCode::Times,
    OpCode::Imp,
    OpCode::Forall,
    OpCode::Dom,
    OpCode::Ran,
    OpCode::Abc,
    OpCode::Acb,
    OpCode::Eq,
    OpCode::In,
];

impl OpCode {
    pub fn arity(self) -> usize {
        match self {
            OpCode::G2 | OpCode::G3 => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OpCode::Pair => "pair",
            OpCode::Inter => "inter",
            OpCode::Union => "union",
            OpCode::Diff => "diff",
            OpCode::Times => "times",
            OpCode::Imp => "imp",
            OpCode::Forall => "forall",
            OpCode::Dom => "dom",
            OpCode::Ran => "ran",
            OpCode::Abc => "abc",
            OpCode::Acb => "acb",
            OpCode::Eq => "eq",
            OpCode::In => "in",
            OpCode::G0 => "g0",
            OpCode::G1 => "g1",
            OpCode::G2 => "g2",
            OpCode::G3 => "g3",
        }
    }

    pub fn from_name(name: &str) -> Option<OpCode> {
        Some(match name {
            "pair" => OpCode::Pair,
            "inter" => OpCode::Inter,
            "union" => OpCode::Union,
            "diff" => OpCode::Diff,
            "times" => OpCode::Times,
            "imp" => OpCode::Imp,
            "forall" => OpCode::Forall,
            "dom" => OpCode::Dom,
            "ran" => OpCode::Ran,
            "abc" => OpCode::Abc,
            "acb" => OpCode::Acb,
            "eq" => OpCode::Eq,
            "in" => OpCode::In,
            "g0" => OpCode::G0,
            "g1" => OpCode::G1,
            "g2" => OpCode::G2,
            "g3" => OpCode::G3,
            _ => return None,
        })
    }
}

/// Applies a binary fundamental operation.
pub fn eval_fund(op: OpCode, x: HFSet, y: HFSet) -> HFSet {
    match op {
        // {x, y}
        OpCode::Pair => HFSet::pair_set(x, y),
        // x ∩ ⋂y, read bounded: { z ∈ x | ∀w ∈ y. z ∈ w }; for y = 0 this is x.
        OpCode::Inter => HFSet::from_elems(
            x.elems()
                .iter()
                .copied()
                .filter(|z| y.elems().iter().all(|w| w.contains(*z))),
        ),
        // ⋃x; the second argument is ignored.
        OpCode::Union => x.union_all(),
        OpCode::Diff => x.difference(y),
        OpCode::Times => x.product(y),
        // x ∩ { z | z ∈ 1st(y) → z ∈ 2nd(y) }; empty when y is not a pair.
        OpCode::Imp => match y.as_pair() {
            Some((p, q)) => HFSet::from_elems(
                x.elems()
                    .iter()
                    .copied()
                    .filter(|z| !p.contains(*z) || q.contains(*z)),
            ),
            None => HFSet::empty(),
        },
        // { x"{z} | z ∈ y }
        OpCode::Forall => {
            HFSet::from_elems(y.elems().iter().map(|z| x.image(*z)))
        }
        OpCode::Dom => x.domain(),
        OpCode::Ran => x.range(),
        // { <u, v, w> | <u, v> ∈ x, w ∈ y }
        OpCode::Abc => HFSet::from_elems(x.elems().iter().filter_map(|e| e.as_pair()).flat_map(
            |(u, v)| {
                y.elems()
                    .iter()
                    .map(move |w| HFSet::kpair(u, HFSet::kpair(v, *w)))
            },
        )),
        // { <u, w, v> | <u, v> ∈ x, w ∈ y }
        OpCode::Acb => HFSet::from_elems(x.elems().iter().filter_map(|e| e.as_pair()).flat_map(
            |(u, v)| {
                y.elems()
                    .iter()
                    .map(move |w| HFSet::kpair(u, HFSet::kpair(*w, v)))
            },
        )),
        // { <v, u> ∈ y × x | u = v }
        OpCode::Eq => HFSet::from_elems(
            y.elems()
                .iter()
                .copied()
                .filter(|v| x.contains(*v))
                .map(|v| HFSet::kpair(v, v)),
        ),
        // { <v, u> ∈ y × x | u ∈ v }
        OpCode::In => HFSet::from_elems(y.elems().iter().flat_map(|v| {
            x.elems()
                .iter()
                .copied()
                .filter(|u| v.contains(*u))
                .map(move |u| HFSet::kpair(*v, u))
        })),
        _ => panic!("{} is not a fundamental operation", op.name()),
    }
}

/// Applies an auxiliary operation (third argument ignored for g0/g1).
pub fn eval_aux(op: OpCode, x: HFSet, y: HFSet, z: HFSet) -> HFSet {
    match op {
        OpCode::G0 => HFSet::kpair(x, y),
        // { u | <y, u> ∈ x }
        OpCode::G1 => x.image(y),
        OpCode::G2 => HFSet::kpair(x, HFSet::kpair(y, z)),
        OpCode::G3 => HFSet::pair_set(x, HFSet::kpair(y, z)),
        _ => panic!("{} is not an auxiliary operation", op.name()),
    }
}

// ---------------------------------------------------------------------------
// Terms

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpTerm {
    Var(String),
    Const(HFSet),
    App(OpCode, Vec<OpTerm>),
}

impl OpTerm {
    pub fn var(name: &str) -> OpTerm {
        OpTerm::Var(name.to_string())
    }

    pub fn app2(op: OpCode, a: OpTerm, b: OpTerm) -> OpTerm {
        debug_assert_eq!(op.arity(), 2);
        OpTerm::App(op, vec![a, b])
    }

    pub fn app3(op: OpCode, a: OpTerm, b: OpTerm, c: OpTerm) -> OpTerm {
        debug_assert_eq!(op.arity(), 3);
        OpTerm::App(op, vec![a, b, c])
    }

    /// Number of nested applications along the deepest path.
    pub fn depth(&self) -> u32 {
        match self {
            OpTerm::Var(_) | OpTerm::Const(_) => 0,
            OpTerm::App(_, args) => 1 + args.iter().map(OpTerm::depth).max().unwrap_or(0),
        }
    }

    /// Total application count.
    pub fn size(&self) -> usize {
        match self {
            OpTerm::Var(_) | OpTerm::Const(_) => 0,
            OpTerm::App(_, args) => 1 + args.iter().map(OpTerm::size).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn go(t: &OpTerm, out: &mut Vec<String>) {
            match t {
                OpTerm::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                OpTerm::Const(_) => {}
                OpTerm::App(_, args) => args.iter().for_each(|a| go(a, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Cap on the cardinality of any intermediate value.
    pub elems: usize,
    /// Cap on the rank of any intermediate value.
    pub depth: u32,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            elems: 200_000,
            depth: 64,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0} expects {1} arguments")]
    Arity(&'static str, usize),
}

/// Evaluates a term against a variable environment.
pub fn eval_term(
    term: &OpTerm,
    env: &[(String, HFSet)],
    budget: Budget,
) -> Result<HFSet, EvalError> {
    match term {
        OpTerm::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, x)| *x)
            .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        OpTerm::Const(c) => Ok(*c),
        OpTerm::App(op, args) => {
            if args.len() != op.arity() {
                return Err(EvalError::Arity(op.name(), op.arity()));
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_term(a, env, budget)?);
            }
            // Guard the product-style blowups before materializing.
            let est = match op {
                OpCode::Times => vals[0].len().saturating_mul(vals[1].len()),
                OpCode::Abc | OpCode::Acb => vals[0].len().saturating_mul(vals[1].len()),
                _ => 0,
            };
            if est > budget.elems {
                return Err(EvalError::Budget(format!(
                    "{} would produce about {} elements (cap {})",
                    op.name(),
                    est,
                    budget.elems
                )));
            }
            let out = match op {
                OpCode::G0 | OpCode::G1 => eval_aux(*op, vals[0], vals[1], HFSet::empty()),
                OpCode::G2 | OpCode::G3 => eval_aux(*op, vals[0], vals[1], vals[2]),
                _ => eval_fund(*op, vals[0], vals[1]),
            };
            if out.len() > budget.elems {
                return Err(EvalError::Budget(format!(
                    "{} produced {} elements (cap {})",
                    op.name(),
                    out.len(),
                    budget.elems
                )));
            }
            if out.rank() > budget.depth {
                return Err(EvalError::Budget(format!(
                    "{} produced rank {} (cap {})",
                    op.name(),
                    out.rank(),
                    budget.depth
                )));
            }
            Ok(out)
        }
    }
}

/// The five-application expansion of g1 through fundamental operations:
/// g1(x, y) = ran(inter(x, pair(T, T))) where T = times(pair(y, y), ran(x)).
pub fn expand_g1(x: OpTerm, y: OpTerm) -> OpTerm {
    let t = OpTerm::app2(
        OpCode::Times,
        OpTerm::app2(OpCode::Pair, y.clone(), y),
        OpTerm::app2(OpCode::Ran, x.clone(), x.clone()),
    );
    ran1(OpTerm::app2(
        OpCode::Inter,
        x,
        OpTerm::app2(OpCode::Pair, t.clone(), t),
    ))
}

impl OpTerm {
    fn app2_g1(op: OpCode, x: OpTerm) -> OpTerm {
        // helper for unary-style uses: second argument repeats the first
        OpTerm::App(op, vec![x.clone(), x])
    }
}

/// ran(t) written with the duplicated-argument convention.
pub fn ran1(t: OpTerm) -> OpTerm {
    OpTerm::app2_g1(OpCode::Ran, t)
}

/// dom(t) written with the duplicated-argument convention.
pub fn dom1(t: OpTerm) -> OpTerm {
    OpTerm::app2_g1(OpCode::Dom, t)
}

/// ⋃t written with the duplicated-argument convention.
pub fn union1(t: OpTerm) -> OpTerm {
    OpTerm::app2_g1(OpCode::Union, t)
}

// ---------------------------------------------------------------------------
// S-expression I/O: (pair (var x) (const {})), (ran (times (var a) (var b)) ...)

impl fmt::Display for OpTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpTerm::Var(v) => write!(f, "(var {v})"),
            OpTerm::Const(c) => write!(f, "(const {c})"),
            OpTerm::App(op, args) => {
                write!(f, "({}", op.name())?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("term syntax error at byte {at}: {msg}")]
pub struct TermSyntaxError {
    pub at: usize,
    pub msg: String,
}

pub fn parse_op_term(text: &str) -> Result<OpTerm, TermSyntaxError> {
    let mut pos = 0usize;
    let term = parse_sexp(text, &mut pos)?;
    skip_ws(text, &mut pos);
    if pos != text.len() {
        return Err(TermSyntaxError {
            at: pos,
            msg: "trailing input".into(),
        });
    }
    Ok(term)
}

fn skip_ws(text: &str, pos: &mut usize) {
    let b = text.as_bytes();
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_sexp(text: &str, pos: &mut usize) -> Result<OpTerm, TermSyntaxError> {
    let b = text.as_bytes();
    skip_ws(text, pos);
    if b.get(*pos) != Some(&b'(') {
        return Err(TermSyntaxError {
            at: *pos,
            msg: "expected '('".into(),
        });
    }
    *pos += 1;
    skip_ws(text, pos);
    let head_start = *pos;
    while *pos < b.len() && (b[*pos].is_ascii_alphanumeric() || b[*pos] == b'_') {
        *pos += 1;
    }
    let head = &text[head_start..*pos];
    skip_ws(text, pos);
    let term = match head {
        "var" => {
            let start = *pos;
            while *pos < b.len() && (b[*pos].is_ascii_alphanumeric() || b[*pos] == b'_') {
                *pos += 1;
            }
            if start == *pos {
                return Err(TermSyntaxError {
                    at: *pos,
                    msg: "expected variable name".into(),
                });
            }
            OpTerm::Var(text[start..*pos].to_string())
        }
        "const" => {
            let start = *pos;
            let lit_end = scan_literal(text, *pos).ok_or(TermSyntaxError {
                at: *pos,
                msg: "expected set literal".into(),
            })?;
            *pos = lit_end;
            let v = crate::hf::parse_hf(&text[start..lit_end]).map_err(|e| TermSyntaxError {
                at: start,
                msg: e.to_string(),
            })?;
            OpTerm::Const(v)
        }
        _ => {
            let op = OpCode::from_name(head).ok_or(TermSyntaxError {
                at: head_start,
                msg: format!("unknown operation {head:?}"),
            })?;
            let mut args = Vec::new();
            loop {
                skip_ws(text, pos);
                if b.get(*pos) == Some(&b')') {
                    break;
                }
                args.push(parse_sexp(text, pos)?);
            }
            if args.len() != op.arity() {
                return Err(TermSyntaxError {
                    at: head_start,
                    msg: format!("{head} expects {} arguments, got {}", op.arity(), args.len()),
                });
            }
            OpTerm::App(op, args)
        }
    };
    skip_ws(text, pos);
    if b.get(*pos) != Some(&b')') {
        return Err(TermSyntaxError {
            at: *pos,
            msg: "expected ')'".into(),
        });
    }
    *pos += 1;
    Ok(term)
}

/// Finds the end of an HF literal starting at `pos`: a numeral, a balanced
/// brace group, or a balanced angle group.
fn scan_literal(text: &str, pos: usize) -> Option<usize> {
    let b = text.as_bytes();
    match b.get(pos)? {
        c if c.is_ascii_digit() => {
            let mut j = pos;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            Some(j)
        }
        b'{' | b'<' => {
            let (open, close) = if b[pos] == b'{' {
                (b'{', b'}')
            } else {
                (b'<', b'>')
            };
            let mut depth = 0usize;
            let mut j = pos;
            while j < b.len() {
                // literals may nest both delimiters; track both
                match b[j] {
                    c if c == open => depth += 1,
                    c if c == close => {
                        depth -= 1;
                        if depth == 0 {
                            return Some(j + 1);
                        }
                    }
                    b'{' | b'}' | b'<' | b'>' => {
                        // mixed nesting: delegate to a full balanced scan
                        return scan_mixed(text, pos);
                    }
                    _ => {}
                }
                j += 1;
            }
            None
        }
        _ => None,
    }
}

fn scan_mixed(text: &str, pos: usize) -> Option<usize> {
    let b = text.as_bytes();
    let mut stack: Vec<u8> = Vec::new();
    let mut j = pos;
    while j < b.len() {
        match b[j] {
            b'{' => stack.push(b'}'),
            b'<' => stack.push(b'>'),
            b'}' | b'>' => {
                if stack.pop() != Some(b[j]) {
                    return None;
                }
                if stack.is_empty() {
                    return Some(j + 1);
                }
            }
            _ => {}
        }
        j += 1;
    }
    None
}
