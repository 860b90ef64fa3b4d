//! Brute-force classical evaluation of formulas, plus definable-set
//! enumeration by exhaustive search. This is the reference the compiler and
//! hierarchy code are tested against; keep it dumb.

use crate::formula::{Formula, Term};
use crate::hf::HFSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unbounded quantifier needs a universe")]
    NeedsUniverse,
}

pub type Env = Vec<(String, HFSet)>;

fn lookup(env: &Env, v: &str) -> Result<HFSet, OracleError> {
    env.iter()
        .rev()
        .find(|(n, _)| n == v)
        .map(|(_, x)| *x)
        .ok_or_else(|| OracleError::UnboundVariable(v.to_string()))
}

fn eval_t(t: &Term, env: &Env) -> Result<HFSet, OracleError> {
    match t {
        Term::Var(v) => lookup(env, v),
        Term::Const(c) => Ok(*c),
    }
}

/// Classical truth. Unbounded quantifiers range over `universe` and fail
/// without one; subset quantifiers range over the full powerset of the bound.
pub fn eval_formula(
    f: &Formula,
    env: &mut Env,
    universe: Option<&[HFSet]>,
) -> Result<bool, OracleError> {
    match f {
        Formula::Falsum => Ok(false),
        Formula::Eq(a, b) => Ok(eval_t(a, env)? == eval_t(b, env)?),
        Formula::In(a, b) => Ok(eval_t(b, env)?.contains(eval_t(a, env)?)),
        Formula::And(a, b) => Ok(eval_formula(a, env, universe)? && eval_formula(b, env, universe)?),
        Formula::Or(a, b) => Ok(eval_formula(a, env, universe)? || eval_formula(b, env, universe)?),
        Formula::Imp(a, b) => Ok(!eval_formula(a, env, universe)? || eval_formula(b, env, universe)?),
        Formula::BForall(v, t, body) => {
            let dom = eval_t(t, env)?;
            quant_all(dom.elems(), v, body, env, universe)
        }
        Formula::BExists(v, t, body) => {
            let dom = eval_t(t, env)?;
            quant_some(dom.elems(), v, body, env, universe)
        }
        Formula::SubForall(v, t, body) => {
            let dom = eval_t(t, env)?.powerset();
            quant_all(dom.elems(), v, body, env, universe)
        }
        Formula::SubExists(v, t, body) => {
            let dom = eval_t(t, env)?.powerset();
            quant_some(dom.elems(), v, body, env, universe)
        }
        Formula::UForall(v, body) => {
            let dom = universe.ok_or(OracleError::NeedsUniverse)?;
            quant_all(dom, v, body, env, universe)
        }
        Formula::UExists(v, body) => {
            let dom = universe.ok_or(OracleError::NeedsUniverse)?;
            quant_some(dom, v, body, env, universe)
        }
    }
}

fn quant_all(
    dom: &[HFSet],
    v: &str,
    body: &Formula,
    env: &mut Env,
    universe: Option<&[HFSet]>,
) -> Result<bool, OracleError> {
    for x in dom {
        env.push((v.to_string(), *x));
        let ok = eval_formula(body, env, universe);
        env.pop();
        if !ok? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn quant_some(
    dom: &[HFSet],
    v: &str,
    body: &Formula,
    env: &mut Env,
    universe: Option<&[HFSet]>,
) -> Result<bool, OracleError> {
    for x in dom {
        env.push((v.to_string(), *x));
        let ok = eval_formula(body, env, universe);
        env.pop();
        if ok? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// { <x_n, ..., x_1> in a_n x ... x a_1 | f } with `vars` listing
/// (x_1, a_1) .. (x_n, a_n). Tuples are right-nested and a 1-tuple is its
/// element.
pub fn comprehension(
    f: &Formula,
    vars: &[(String, HFSet)],
    params: &Env,
    universe: Option<&[HFSet]>,
) -> Result<HFSet, OracleError> {
    assert!(!vars.is_empty());
    let mut out: Vec<HFSet> = Vec::new();
    let mut assignment: Vec<HFSet> = Vec::new();
    let mut env = params.clone();
    enumerate(f, vars, 0, &mut assignment, &mut env, universe, &mut out)?;
    Ok(HFSet::from_elems(out))
}

fn enumerate(
    f: &Formula,
    vars: &[(String, HFSet)],
    k: usize,
    assignment: &mut Vec<HFSet>,
    env: &mut Env,
    universe: Option<&[HFSet]>,
    out: &mut Vec<HFSet>,
) -> Result<(), OracleError> {
    if k == vars.len() {
        if eval_formula(f, env, universe)? {
            // tuple <x_n, ..., x_1>
            let rev: Vec<HFSet> = assignment.iter().rev().copied().collect();
            out.push(HFSet::tuple(&rev).expect("nonempty tuple"));
        }
        return Ok(());
    }
    let (name, dom) = &vars[k];
    for x in dom.elems() {
        assignment.push(*x);
        env.push((name.clone(), *x));
        let r = enumerate(f, vars, k + 1, assignment, env, universe, out);
        env.pop();
        assignment.pop();
        r?;
    }
    Ok(())
}

/// { v in a | f[x_i := v] } with the remaining free variables taken from
/// `params`.
pub fn separation(
    f: &Formula,
    var: &str,
    a: HFSet,
    params: &Env,
    universe: Option<&[HFSet]>,
) -> Result<HFSet, OracleError> {
    let mut out = Vec::new();
    let mut env = params.clone();
    for v in a.elems() {
        env.push((var.to_string(), *v));
        let ok = eval_formula(f, &mut env, universe);
        env.pop();
        if ok? {
            out.push(*v);
        }
    }
    Ok(HFSet::from_elems(out))
}
