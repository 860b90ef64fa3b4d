//! Compiles Sigma_0 formulas into terms over the fundamental operations.
//!
//! `compile_comprehension` produces a term denoting
//! { <x_n, ..., x_1> in A_n x ... x A_1 | phi } and `compile_separation`
//! post-processes it into { x_i in a | phi } with the other variables held as
//! parameters. Everything here is validated against the brute-force oracle.

use crate::formula::{Class, Formula, Term};
use crate::hf::HFSet;
use crate::ops::{ran1, union1, OpCode, OpTerm};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("formula is not Sigma_0 (class {0:?})")]
    NotSigma0(Class),
    #[error("formula variable {0} has no domain")]
    UnboundFormulaVar(String),
    #[error("duplicate context variable {0}")]
    DuplicateVar(String),
    #[error("empty variable context")]
    EmptyContext,
}

/// A context entry: formula variable name and the term for its domain.
type Ctx = Vec<(String, OpTerm)>;

fn binary_inter(s: OpTerm, t: OpTerm) -> OpTerm {
    OpTerm::app2(
        OpCode::Inter,
        s,
        OpTerm::app2(OpCode::Pair, t.clone(), t),
    )
}

fn binary_union(s: OpTerm, t: OpTerm) -> OpTerm {
    union1(OpTerm::app2(OpCode::Pair, s, t))
}

/// Kuratowski <x, y> built from pair alone.
fn kpair_term(x: OpTerm, y: OpTerm) -> OpTerm {
    OpTerm::app2(
        OpCode::Pair,
        OpTerm::app2(OpCode::Pair, x.clone(), x.clone()),
        OpTerm::app2(OpCode::Pair, x, y),
    )
}

/// A_n x (A_{n-1} x ... x A_1), matching the right-nested tuple shape.
fn product(ctx: &[(String, OpTerm)]) -> OpTerm {
    let mut it = ctx.iter();
    let first = it.next().expect("nonempty context").1.clone();
    it.fold(first, |acc, (_, a)| {
        OpTerm::app2(OpCode::Times, a.clone(), acc)
    })
}

fn empty_of(prod: OpTerm) -> OpTerm {
    OpTerm::app2(OpCode::Diff, prod.clone(), prod)
}

/// Transpose of a pair relation r ⊆ y × x into x × y:
/// ran((abc(r, y)) ∩ (acb(eq(y, y), x))).
fn transpose(r: OpTerm, y: OpTerm, x: OpTerm) -> OpTerm {
    let left = OpTerm::app2(OpCode::Abc, r, y.clone());
    let diag = OpTerm::app2(OpCode::Eq, y.clone(), y);
    let right = OpTerm::app2(OpCode::Acb, diag, x);
    ran1(binary_inter(left, right))
}

/// One-variable atoms over a domain term `a`; `z` is the variable.
fn base_atom(atom: &Formula, var: &str, a: &OpTerm) -> OpTerm {
    let c = |t: &Term| -> Option<HFSet> {
        match t {
            Term::Const(v) => Some(*v),
            _ => None,
        }
    };
    match atom {
        Formula::Eq(Term::Var(u), Term::Var(w)) if u == var && w == var => a.clone(),
        // { z in a | z in z }: dom(in(a,a) ∩ eq(a,a)) collects z with <z,z>
        // in the membership relation.
        Formula::In(Term::Var(u), Term::Var(w)) if u == var && w == var => {
            let inn = OpTerm::app2(OpCode::In, a.clone(), a.clone());
            let eq = OpTerm::app2(OpCode::Eq, a.clone(), a.clone());
            OpTerm::app2(OpCode::Dom, binary_inter(inn, eq), a.clone())
        }
        Formula::Eq(x, y) => {
            // one side is the variable, the other a constant
            let k = c(x).or_else(|| c(y)).expect("constant side");
            let sing = OpTerm::app2(OpCode::Pair, OpTerm::Const(k), OpTerm::Const(k));
            binary_inter(a.clone(), sing)
        }
        Formula::In(x, y) => {
            if c(y).is_some() {
                // z in k: a ∩ ⋂{k}
                let k = c(y).unwrap();
                OpTerm::app2(
                    OpCode::Inter,
                    a.clone(),
                    OpTerm::app2(OpCode::Pair, OpTerm::Const(k), OpTerm::Const(k)),
                )
            } else {
                // k in z: dom(in({k}, a)) = { z in a | k in z }
                let k = c(x).expect("constant side");
                let sing = OpTerm::app2(OpCode::Pair, OpTerm::Const(k), OpTerm::Const(k));
                OpTerm::app2(
                    OpCode::Dom,
                    OpTerm::app2(OpCode::In, sing, a.clone()),
                    a.clone(),
                )
            }
        }
        _ => unreachable!("not a one-variable atom"),
    }
}

/// Pair relation q ⊆ A_n × A_j realizing the atom between x_n and x_j.
enum PairAtom {
    /// x_n = x_j (either orientation)
    Equal,
    /// x_j ∈ x_n
    LowInHigh,
    /// x_n ∈ x_j
    HighInLow,
}

fn pair_relation(kind: PairAtom, a_n: &OpTerm, a_j: &OpTerm) -> OpTerm {
    match kind {
        PairAtom::Equal => OpTerm::app2(OpCode::Eq, a_j.clone(), a_n.clone()),
        PairAtom::LowInHigh => OpTerm::app2(OpCode::In, a_j.clone(), a_n.clone()),
        PairAtom::HighInLow => {
            let r = OpTerm::app2(OpCode::In, a_n.clone(), a_j.clone());
            transpose(r, a_j.clone(), a_n.clone())
        }
    }
}

fn compile_atom(atom: &Formula, ctx: &Ctx) -> Result<OpTerm, CompileError> {
    let n = ctx.len();
    let idx = |name: &str| -> Result<usize, CompileError> {
        ctx.iter()
            .rposition(|(v, _)| v == name)
            .ok_or_else(|| CompileError::UnboundFormulaVar(name.to_string()))
    };
    let var_of = |t: &Term| -> Option<String> {
        match t {
            Term::Var(v) => Some(v.clone()),
            Term::Const(_) => None,
        }
    };
    let (x, y, is_eq) = match atom {
        Formula::Eq(x, y) => (x, y, true),
        Formula::In(x, y) => (x, y, false),
        _ => unreachable!("compile_atom on non-atom"),
    };
    let vx = var_of(x);
    let vy = var_of(y);

    // constant-only atom: fold its truth value at compile time
    if vx.is_none() && vy.is_none() {
        let (cx, cy) = match (x, y) {
            (Term::Const(a), Term::Const(b)) => (*a, *b),
            _ => unreachable!(),
        };
        let truth = if is_eq { cx == cy } else { cy.contains(cx) };
        let prod = product(ctx);
        return Ok(if truth { prod } else { empty_of(prod) });
    }

    let ix = vx.as_deref().map(idx).transpose()?;
    let iy = vy.as_deref().map(idx).transpose()?;
    let top = ix.iter().chain(iy.iter()).copied().max().unwrap();

    // atom not involving the outermost variable: recurse and pad with a
    // product on the left
    if top + 1 < n {
        let inner = compile_atom(atom, &ctx[..n - 1].to_vec())?;
        return Ok(OpTerm::app2(
            OpCode::Times,
            ctx[n - 1].1.clone(),
            inner,
        ));
    }

    let a_n = &ctx[n - 1].1;

    // single-variable (possibly with a constant) atoms on x_n
    let single = match (ix, iy) {
        (Some(i), Some(j)) if i == j => true,
        (Some(_), None) | (None, Some(_)) => true,
        _ => false,
    };
    if single {
        let name = &ctx[n - 1].0;
        let s = base_atom(atom, name, a_n);
        return Ok(if n == 1 {
            s
        } else {
            OpTerm::app2(OpCode::Times, s, product(&ctx[..n - 1].to_vec()))
        });
    }

    // atom links x_n with x_j, j < n (positions are 0-based here)
    let (i, j) = (ix.unwrap(), iy.unwrap());
    let low = i.min(j);
    let a_j = &ctx[low].1;
    let kind = if is_eq {
        PairAtom::Equal
    } else if j == low {
        // x_n ∈ x_j
        PairAtom::HighInLow
    } else {
        // x_j ∈ x_n
        PairAtom::LowInHigh
    };
    let mut q = pair_relation(kind, a_n, a_j);
    // inflate x_j into the tail tuple <x_j, ..., x_1>
    if low > 0 {
        q = OpTerm::app2(OpCode::Abc, q, product(&ctx[..low].to_vec()));
    }
    // insert the free middle coordinates x_{j+1} .. x_{n-1}
    for m in low + 1..n - 1 {
        q = OpTerm::app2(OpCode::Acb, q, ctx[m].1.clone());
    }
    Ok(q)
}

fn compile_rec(f: &Formula, ctx: &Ctx, fresh: &mut u32) -> Result<OpTerm, CompileError> {
    match f {
        Formula::Falsum => Ok(empty_of(product(ctx))),
        Formula::Eq(..) | Formula::In(..) => compile_atom(f, ctx),
        Formula::And(a, b) => Ok(binary_inter(
            compile_rec(a, ctx, fresh)?,
            compile_rec(b, ctx, fresh)?,
        )),
        Formula::Or(a, b) => Ok(binary_union(
            compile_rec(a, ctx, fresh)?,
            compile_rec(b, ctx, fresh)?,
        )),
        Formula::Imp(a, b) => Ok(OpTerm::app2(
            OpCode::Imp,
            product(ctx),
            kpair_term(compile_rec(a, ctx, fresh)?, compile_rec(b, ctx, fresh)?),
        )),
        Formula::BForall(v, t, body) => {
            let (dom, body2) = rewrite_bound(v, t, body, ctx, true)?;
            let mut ext = ctx.clone();
            ext.push((v.clone(), dom.clone()));
            let inner = compile_rec(&body2, &ext, fresh)?;
            Ok(OpTerm::app2(
                OpCode::Inter,
                product(ctx),
                OpTerm::app2(OpCode::Forall, inner, dom),
            ))
        }
        Formula::BExists(v, t, body) => {
            let (dom, body2) = rewrite_bound(v, t, body, ctx, false)?;
            let mut ext = ctx.clone();
            ext.push((v.clone(), dom));
            let inner = compile_rec(&body2, &ext, fresh)?;
            Ok(ran1(inner))
        }
        other => Err(CompileError::NotSigma0(other.classify())),
    }
}

/// Turns a quantifier bound into a fixed domain term. A constant bound is
/// used directly; a variable bound x_j becomes ⋃A_j with a guard atom
/// `v in x_j` folded into the body.
fn rewrite_bound(
    v: &str,
    t: &Term,
    body: &Formula,
    ctx: &Ctx,
    universal: bool,
) -> Result<(OpTerm, Formula), CompileError> {
    match t {
        Term::Const(c) => Ok((OpTerm::Const(*c), body.clone())),
        Term::Var(name) => {
            let j = ctx
                .iter()
                .rposition(|(w, _)| w == name)
                .ok_or_else(|| CompileError::UnboundFormulaVar(name.clone()))?;
            let dom = union1(ctx[j].1.clone());
            let guard = Formula::In(Term::var(v), Term::var(name));
            let body2 = if universal {
                Formula::imp(guard, body.clone())
            } else {
                Formula::and(guard, body.clone())
            };
            Ok((dom, body2))
        }
    }
}

/// Compiles { <x_n, ..., x_1> in A_n x ... x A_1 | f } where `ctx` lists
/// (x_1, A_1) .. (x_n, A_n).
pub fn compile_comprehension(f: &Formula, ctx: &Ctx) -> Result<OpTerm, CompileError> {
    if ctx.is_empty() {
        return Err(CompileError::EmptyContext);
    }
    for (k, (name, _)) in ctx.iter().enumerate() {
        if ctx[..k].iter().any(|(m, _)| m == name) {
            return Err(CompileError::DuplicateVar(name.clone()));
        }
    }
    match f.classify() {
        Class::Sigma0 => {}
        other => return Err(CompileError::NotSigma0(other)),
    }
    for v in f.free_vars() {
        if !ctx.iter().any(|(n, _)| *n == v) {
            return Err(CompileError::UnboundFormulaVar(v));
        }
    }
    let mut fresh = 0;
    compile_rec(f, ctx, &mut fresh)
}

/// Result of a separation compilation.
#[derive(Debug, Clone)]
pub struct Separation {
    /// Term with free variables: the domain variable plus each parameter.
    pub term: OpTerm,
    /// Name of the variable standing for the separation domain.
    pub domain_var: String,
    /// Parameter variable names in context order (the x_j, j != i).
    pub params: Vec<String>,
    /// Stages needed above the arguments to reach the result.
    pub stage_bound: u32,
}

/// Compiles { v in a | f } where `vars` lists the free variables of `f` in
/// context order and `var` picks which one ranges over `a`; the rest are
/// parameters supplied at evaluation time.
pub fn compile_separation(
    f: &Formula,
    vars: &[String],
    var: &str,
) -> Result<Separation, CompileError> {
    let i = vars
        .iter()
        .position(|v| v == var)
        .ok_or_else(|| CompileError::UnboundFormulaVar(var.to_string()))?;
    let n = vars.len();
    // a fresh term-variable name for the separation domain
    let mut domain_var = "a".to_string();
    let mut k = 0;
    while vars.iter().any(|v| *v == domain_var) {
        domain_var = format!("a_{k}");
        k += 1;
    }
    let ctx: Ctx = vars
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let dom = if j == i {
                OpTerm::var(&domain_var)
            } else {
                OpTerm::app2(OpCode::Pair, OpTerm::var(name), OpTerm::var(name))
            };
            (name.clone(), dom)
        })
        .collect();
    let mut term = compile_comprehension(f, &ctx)?;
    // peel coordinates above x_i, then extract x_i from the head of the
    // remaining tuple; a 1-tuple is its element, so i = 0 needs no dom
    for _ in i + 1..n {
        term = ran1(term);
    }
    if i >= 1 {
        term = OpTerm::app2(OpCode::Dom, term.clone(), term);
    }
    let stage_bound = term.depth() + 2;
    let params = vars
        .iter()
        .filter(|v| *v != var)
        .cloned()
        .collect();
    Ok(Separation {
        term,
        domain_var,
        params,
        stage_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::hf::HFSet;
    use crate::ops::{eval_term, Budget};
    use crate::oracle;

    fn n(k: u32) -> HFSet {
        HFSet::nat(k)
    }

    /// compiled term and oracle agree on the comprehension
    fn check(text: &str, doms: &[(&str, HFSet)]) {
        let f = parse_formula(text).unwrap();
        let vars: Vec<(String, HFSet)> =
            doms.iter().map(|(v, d)| (v.to_string(), *d)).collect();
        let want = oracle::comprehension(&f, &vars, &Vec::new(), None).unwrap();
        let ctx: Ctx = doms
            .iter()
            .map(|(v, d)| (v.to_string(), OpTerm::Const(*d)))
            .collect();
        let term = compile_comprehension(&f, &ctx).unwrap();
        let got = eval_term(&term, &[], Budget::default()).unwrap();
        assert_eq!(got, want, "formula: {text}");
    }

    #[test]
    fn corpus_single_variable() {
        let pool = [n(3), HFSet::pair_set(n(1), n(2)), HFSet::empty(), n(4)];
        for d in pool {
            for text in [
                "z = z",
                "z in z",
                "z = 1",
                "z in 2",
                "1 in z",
                "0 = 0",
                "0 = 1",
                "0 in 1",
                "1 in 0",
                "false",
                "~(z = 1)",
                "z = 1 | z = 2",
                "z in 3 & ~(z = 0)",
                "z in 2 -> z = 1",
                "1 in z -> 0 in z",
            ] {
                check(text, &[("z", d)]);
            }
        }
    }

    #[test]
    fn corpus_two_variables() {
        let d1 = n(3);
        let d2 = HFSet::from_elems([n(0), n(2), HFSet::singleton(n(1))]);
        for text in [
            "x1 = x2",
            "x2 = x1",
            "x1 in x2",
            "x2 in x1",
            "x1 = x1",
            "x2 in x2",
            "x1 = 1",
            "x2 = {2}",
            "x1 in x2 & x1 = 1",
            "x1 in x2 | x2 in x1",
            "x1 in x2 -> x2 = 2",
            "~(x1 in x2)",
            "x1 = x2 -> false",
            "0 in x2 & x1 in 2",
        ] {
            check(text, &[("x1", d1), ("x2", d2)]);
        }
    }

    #[test]
    fn corpus_three_variables() {
        let d1 = n(2);
        let d2 = HFSet::pair_set(n(1), n(2));
        let d3 = HFSet::from_elems([n(0), n(1), HFSet::pair_set(n(0), n(2))]);
        for text in [
            "x1 in x3",
            "x3 in x1",
            "x1 = x3",
            "x2 in x3",
            "x3 in x2",
            "x1 in x2",
            "x3 = 1",
            "x1 in x2 & x2 in x3",
            "x1 in x3 | x3 in x1",
            "(x1 in x2 -> x2 in x3) -> x1 = 0",
            "x1 = x2 & x2 = x3",
            "x3 in x3 | x1 = x1",
        ] {
            check(text, &[("x1", d1), ("x2", d2), ("x3", d3)]);
        }
    }

    #[test]
    fn corpus_quantifiers() {
        let d1 = n(3);
        let d2 = HFSet::from_elems([n(1), n(2), HFSet::singleton(n(2))]);
        for text in [
            "all y in 2. y in z",
            "some y in 3. y = z",
            "all y in z. y in 2",
            "some y in z. 0 in y",
            "all y in z. some w in 2. (w in y | w = y)",
            "some y in z. all w in y. w in 1",
            "all y in 0. false",
            "some y in 2. some w in y. w = 0",
        ] {
            check(text, &[("z", d1)]);
            check(text, &[("z", d2)]);
        }
        for text in [
            "all y in x1. y in x2",
            "some y in x2. y = x1",
            "all y in x2. (y in x1 -> some w in x1. w in y)",
            "some y in x1. some w in y. w in x2",
        ] {
            check(text, &[("x1", d2), ("x2", d1)]);
        }
    }

    #[test]
    fn corpus_transitivity_and_ordering() {
        // definable predicates over a domain of candidate sets
        let cands = HFSet::from_elems([
            n(0),
            n(1),
            n(2),
            n(3),
            HFSet::singleton(n(1)),
            HFSet::pair_set(n(0), n(2)),
        ]);
        for text in [
            "all x in u. all y in x. y in u",
            "all x in u. all y in u. (x in y | x = y | y in x)",
            "some x in u. all y in u. (x = y | x in y)",
        ] {
            check(text, &[("u", cands)]);
        }
    }

    #[test]
    fn empty_domains_are_fine() {
        check("x1 in x2", &[("x1", HFSet::empty()), ("x2", n(2))]);
        check("x1 in x2", &[("x1", n(2)), ("x2", HFSet::empty())]);
        check("all y in x1. false", &[("x1", HFSet::empty())]);
    }

    #[test]
    fn rejects_non_sigma0_and_missing_vars() {
        let ctx: Ctx = vec![("x".to_string(), OpTerm::Const(n(2)))];
        let f = parse_formula("all s sub x. x in s").unwrap();
        assert!(matches!(
            compile_comprehension(&f, &ctx),
            Err(CompileError::NotSigma0(_))
        ));
        let g = parse_formula("x in y").unwrap();
        assert!(matches!(
            compile_comprehension(&g, &ctx),
            Err(CompileError::UnboundFormulaVar(_))
        ));
    }

    #[test]
    fn separation_matches_oracle() {
        let cases: &[(&str, &[&str], &str)] = &[
            ("x in p", &["x", "p"], "x"),
            ("p in x", &["x", "p"], "x"),
            ("x = p | x in q", &["x", "p", "q"], "x"),
            ("some y in x. y in p", &["x", "p"], "x"),
            ("all y in x. (y in p -> y in q)", &["x", "p", "q"], "x"),
            ("p in x & x in q", &["p", "x", "q"], "x"),
        ];
        let a = HFSet::from_elems([n(0), n(1), n(2), HFSet::pair_set(n(0), n(2))]);
        let pv = n(2);
        let qv = HFSet::pair_set(n(1), n(2));
        for (text, vars, var) in cases {
            let f = parse_formula(text).unwrap();
            let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
            let sep = compile_separation(&f, &names, var).unwrap();
            let mut env: Vec<(String, HFSet)> = vec![(sep.domain_var.clone(), a)];
            let mut params: oracle::Env = Vec::new();
            for p in &sep.params {
                let v = if p == "p" { pv } else { qv };
                env.push((p.clone(), v));
                params.push((p.clone(), v));
            }
            let want = oracle::separation(&f, var, a, &params, None).unwrap();
            let got = eval_term(&sep.term, &env, Budget::default()).unwrap();
            assert_eq!(got, want, "separation: {text} on {var}");
            assert_eq!(sep.stage_bound, sep.term.depth() + 2);
        }
    }

    #[test]
    fn separation_first_position_is_flat() {
        // with the variable in position 1 the result tuple is bare, so no
        // final head extraction happens
        let f = parse_formula("p in x").unwrap();
        let names = vec!["x".to_string(), "p".to_string()];
        let sep = compile_separation(&f, &names, "x").unwrap();
        let a = HFSet::from_elems([n(1), n(2), n(3), HFSet::singleton(n(2))]);
        let env: Vec<(String, HFSet)> =
            vec![(sep.domain_var.clone(), a), ("p".to_string(), n(1))];
        let got = eval_term(&sep.term, &env, Budget::default()).unwrap();
        assert_eq!(got, HFSet::pair_set(n(2), n(3)));
    }

    #[test]
    fn randomized_against_oracle() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        // universe of candidate domain elements: everything of rank <= 2
        let v3: Vec<HFSet> = vec![
            HFSet::empty(),
            n(1),
            HFSet::singleton(n(1)),
            n(2),
        ];
        let consts = [n(0), n(1), n(2)];

        fn gen_formula(
            rng: &mut StdRng,
            vars: &[String],
            consts: &[HFSet],
            depth: u32,
            fresh: &mut u32,
        ) -> Formula {
            let atom = |rng: &mut StdRng, vars: &[String], consts: &[HFSet]| {
                let term = |rng: &mut StdRng| -> Term {
                    if rng.gen_bool(0.7) {
                        Term::var(&vars[rng.gen_range(0..vars.len())])
                    } else {
                        Term::Const(consts[rng.gen_range(0..consts.len())])
                    }
                };
                let (a, b) = (term(rng), term(rng));
                if rng.gen_bool(0.5) {
                    Formula::Eq(a, b)
                } else {
                    Formula::In(a, b)
                }
            };
            if depth == 0 || rng.gen_bool(0.3) {
                return if rng.gen_bool(0.05) {
                    Formula::Falsum
                } else {
                    atom(rng, vars, consts)
                };
            }
            match rng.gen_range(0..5) {
                0 => Formula::and(
                    gen_formula(rng, vars, consts, depth - 1, fresh),
                    gen_formula(rng, vars, consts, depth - 1, fresh),
                ),
                1 => Formula::or(
                    gen_formula(rng, vars, consts, depth - 1, fresh),
                    gen_formula(rng, vars, consts, depth - 1, fresh),
                ),
                2 => Formula::imp(
                    gen_formula(rng, vars, consts, depth - 1, fresh),
                    gen_formula(rng, vars, consts, depth - 1, fresh),
                ),
                k => {
                    let v = format!("q{fresh}");
                    *fresh += 1;
                    let bound = if rng.gen_bool(0.5) {
                        Term::Const(consts[rng.gen_range(0..consts.len())])
                    } else {
                        Term::var(&vars[rng.gen_range(0..vars.len())])
                    };
                    let mut inner: Vec<String> = vars.to_vec();
                    inner.push(v.clone());
                    let body = gen_formula(rng, &inner, consts, depth - 1, fresh);
                    if k == 3 {
                        Formula::BForall(v, bound, Box::new(body))
                    } else {
                        Formula::BExists(v, bound, Box::new(body))
                    }
                }
            }
        }

        let mut rng = StdRng::seed_from_u64(0x5eed);
        for case in 0..300 {
            let nvars = rng.gen_range(1..=3usize);
            let names: Vec<String> = (1..=nvars).map(|i| format!("x{i}")).collect();
            let doms: Vec<HFSet> = (0..nvars)
                .map(|_| {
                    HFSet::from_elems(
                        v3.iter().copied().filter(|_| rng.gen_bool(0.6)),
                    )
                })
                .collect();
            let mut fresh = 0;
            let f = gen_formula(&mut rng, &names, &consts, 3, &mut fresh);
            let vars: Vec<(String, HFSet)> =
                names.iter().cloned().zip(doms.iter().copied()).collect();
            let want = oracle::comprehension(&f, &vars, &Vec::new(), None).unwrap();
            let ctx: Ctx = names
                .iter()
                .cloned()
                .zip(doms.iter().map(|d| OpTerm::Const(*d)))
                .collect();
            let term = compile_comprehension(&f, &ctx).unwrap();
            let got = eval_term(&term, &[], Budget::default()).unwrap();
            assert_eq!(got, want, "case {case}: {f}");
        }
    }
}
