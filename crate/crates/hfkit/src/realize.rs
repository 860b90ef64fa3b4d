//! Realizability checkers: the truth-carrying relation, its truth-free
//! variant, and the power-set-mode variant, with three-valued verdicts over
//! bounded search budgets, plus a truth-preservation auditor.

use crate::erec::{Outcome, Vm};
use crate::formula::{Class, Formula};
use crate::hf::HFSet;
use crate::oracle::{self, Env};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Wt,
    W,
    Wp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Fuel,
    SearchBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Realized,
    NotRealized,
    Unknown(Reason),
}

use Verdict::*;

impl Verdict {
    /// Conjunction: any failure fails, any open question stays open.
    fn meet(self, other: Verdict) -> Verdict {
        match (self, other) {
            (NotRealized, _) | (_, NotRealized) => NotRealized,
            (Unknown(r), _) | (_, Unknown(r)) => Unknown(r),
            _ => Realized,
        }
    }

}

#[derive(Debug, thiserror::Error)]
pub enum RealizeError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("subset-bounded quantifiers have no realizability clause")]
    SubsetQuantifier,
}

fn truth(f: &Formula, env: &Env, search: &[HFSet]) -> Result<bool, RealizeError> {
    let mut e = env.clone();
    oracle::eval_formula(f, &mut e, Some(search)).map_err(|err| match err {
        oracle::OracleError::UnboundVariable(v) => RealizeError::UnboundVariable(v),
        oracle::OracleError::NeedsUniverse => unreachable!("universe supplied"),
    })
}

fn is_bounded(f: &Formula) -> bool {
    !matches!(f.classify(), Class::ContainsUnbounded)
}

/// All HF sets of rank ≤ r (the default search universe uses r = 3).
pub fn rank_universe(r: u32) -> Vec<HFSet> {
    let mut v = HFSet::empty();
    for _ in 0..=r {
        v = v.powerset();
    }
    let mut out = v.elems().to_vec();
    out.sort();
    out
}

pub struct Checker<'a> {
    pub variant: Variant,
    pub fuel: u64,
    pub search: &'a [HFSet],
}

impl<'a> Checker<'a> {
    fn vm_apply(&self, a: HFSet, c: HFSet) -> Result<HFSet, Verdict> {
        let mut vm = Vm::new(self.fuel, self.variant == Variant::Wp);
        match vm.apply(a, c) {
            Outcome::Value(v) => Ok(v),
            Outcome::Timeout(_) => Err(Unknown(Reason::Fuel)),
            // NonFinitary and ApplyError are stable under bigger budgets
            _ => Err(NotRealized),
        }
    }

    /// Conservative certificate that no set realizes f: used to close the
    /// ∀c clause of implications vacuously without scanning all of V.
    fn unrealizable(&self, f: &Formula, env: &Env) -> Result<bool, RealizeError> {
        Ok(match f {
            Formula::Falsum => true,
            Formula::Eq(..) | Formula::In(..) => !truth(f, env, self.search)?,
            Formula::And(p, q) => {
                self.unrealizable(p, env)? || self.unrealizable(q, env)?
            }
            Formula::Or(p, q) => {
                self.unrealizable(p, env)? && self.unrealizable(q, env)?
            }
            // the truth conjunct alone rules a wt-realizer out when the
            // implication is decidably false
            Formula::Imp(..) => {
                self.variant != Variant::W && is_bounded(f) && !truth(f, env, self.search)?
            }
            _ => false,
        })
    }

    pub fn check(&self, a: HFSet, f: &Formula, env: &Env) -> Result<Verdict, RealizeError> {
        match f {
            Formula::Falsum => Ok(NotRealized),
            Formula::Eq(..) | Formula::In(..) => Ok(if truth(f, env, self.search)? {
                Realized
            } else {
                NotRealized
            }),
            Formula::And(p, q) => {
                let Some((a0, a1)) = a.as_pair() else {
                    return Ok(NotRealized);
                };
                Ok(self.check(a0, p, env)?.meet(self.check(a1, q, env)?))
            }
            Formula::Or(p, q) => {
                if a.is_empty() {
                    return Ok(NotRealized);
                }
                let mut out = Realized;
                for d in a.elems() {
                    let Some((tag, body)) = d.as_pair() else {
                        return Ok(NotRealized);
                    };
                    let v = if tag == HFSet::nat(0) {
                        self.check(body, p, env)?
                    } else if tag == HFSet::nat(1) {
                        self.check(body, q, env)?
                    } else {
                        NotRealized
                    };
                    out = out.meet(v);
                }
                Ok(out)
            }
            Formula::Imp(p, q) => {
                let mut out = Realized;
                if self.variant != Variant::W {
                    // the truth conjunct (φ → ψ)
                    let t = truth(f, env, self.search)?;
                    if is_bounded(f) {
                        if !t {
                            return Ok(NotRealized);
                        }
                    } else {
                        // truth is only search-approximate here
                        out = out.meet(Unknown(Reason::SearchBound));
                    }
                }
                if self.unrealizable(p, env)? {
                    return Ok(out); // ∀c holds vacuously
                }
                for c in self.search {
                    match self.check(*c, p, env)? {
                        Realized => {
                            let v = match self.vm_apply(a, *c) {
                                Ok(v) => v,
                                Err(bad) => return Ok(out.meet(bad)),
                            };
                            match self.check(v, q, env)? {
                                NotRealized => return Ok(NotRealized),
                                other => out = out.meet(other),
                            }
                        }
                        NotRealized => {}
                        Unknown(r) => out = out.meet(Unknown(r)),
                    }
                }
                // the ∀c ranges over all sets; the scan is exhaustive only
                // in the sense that realizers of bounded formulas this small
                // live inside the search universe
                if !(is_bounded(p) && is_bounded(q)) {
                    out = out.meet(Unknown(Reason::SearchBound));
                }
                Ok(out)
            }
            Formula::BForall(x, t, body) => {
                let b = self.term(t, env)?;
                let mut out = Realized;
                for c in b.elems() {
                    let inst = body.subst(x, *c);
                    let v = match self.vm_apply(a, *c) {
                        Ok(v) => v,
                        Err(bad) => return Ok(bad),
                    };
                    match self.check(v, &inst, env)? {
                        NotRealized => return Ok(NotRealized),
                        other => out = out.meet(other),
                    }
                }
                Ok(out)
            }
            Formula::BExists(x, t, body) => {
                let b = self.term(t, env)?;
                if a.is_empty() {
                    return Ok(NotRealized);
                }
                let mut out = Realized;
                for d in a.elems() {
                    let Some((wit, r)) = d.as_pair() else {
                        return Ok(NotRealized);
                    };
                    if !b.contains(wit) {
                        return Ok(NotRealized);
                    }
                    let inst = body.subst(x, wit);
                    out = out.meet(self.check(r, &inst, env)?);
                }
                Ok(out)
            }
            Formula::UForall(x, body) => {
                let mut out = Realized;
                for c in self.search {
                    let inst = body.subst(x, *c);
                    let v = match self.vm_apply(a, *c) {
                        Ok(v) => v,
                        Err(bad) => return Ok(bad),
                    };
                    match self.check(v, &inst, env)? {
                        NotRealized => return Ok(NotRealized),
                        other => out = out.meet(other),
                    }
                }
                // c genuinely ranges over all sets
                Ok(out.meet(Unknown(Reason::SearchBound)))
            }
            Formula::UExists(x, body) => {
                if a.is_empty() {
                    return Ok(NotRealized);
                }
                let mut out = Realized;
                for d in a.elems() {
                    let Some((wit, r)) = d.as_pair() else {
                        return Ok(NotRealized);
                    };
                    let inst = body.subst(x, wit);
                    out = out.meet(self.check(r, &inst, env)?);
                }
                Ok(out)
            }
            Formula::SubForall(..) | Formula::SubExists(..) => {
                Err(RealizeError::SubsetQuantifier)
            }
        }
    }

    fn term(&self, t: &crate::formula::Term, env: &Env) -> Result<HFSet, RealizeError> {
        match t {
            crate::formula::Term::Const(c) => Ok(*c),
            crate::formula::Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, x)| *x)
                .ok_or_else(|| RealizeError::UnboundVariable(v.clone())),
        }
    }
}

// ---------------------------------------------------------------------------
// Truth audit

#[derive(Debug)]
pub struct AuditEntry {
    pub formula: String,
    pub verdict: Verdict,
    pub truth: bool,
    pub violation: bool,
}

#[derive(Debug)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
    pub violations: usize,
}

/// Check that no triple is judged Realized while classically false. The
/// verdict function is a parameter so a corrupted checker can be exercised
/// in tests.
pub fn truth_audit<F>(corpus: &[(HFSet, Formula, Env)], mut verdict_of: F) -> AuditReport
where
    F: FnMut(HFSet, &Formula, &Env) -> Verdict,
{
    let mut entries = Vec::new();
    let mut violations = 0;
    for (a, f, env) in corpus {
        let mut e = env.clone();
        let truth = oracle::eval_formula(f, &mut e, None).expect("bounded corpus formula");
        let verdict = verdict_of(*a, f, env);
        let violation = verdict == Realized && !truth;
        if violation {
            violations += 1;
        }
        entries.push(AuditEntry {
            formula: f.to_string(),
            verdict,
            truth,
            violation,
        });
    }
    AuditReport {
        entries,
        violations,
    }
}

/// A stock corpus of bounded triples covering every clause shape.
pub fn stock_corpus() -> Vec<(HFSet, Formula, Env)> {
    use crate::erec::Index;
    use crate::formula::parse_formula;
    let n = HFSet::nat;
    let pr = HFSet::kpair;
    let fam = |ds: &[HFSet]| HFSet::from_elems(ds.to_vec());
    let p = |s: &str| parse_formula(s).unwrap();
    let e0 = Env::new();
    let env_b = |b: HFSet| vec![("b".to_string(), b)];
    let mut out: Vec<(HFSet, Formula, Env)> = Vec::new();
    // atoms: truth decides, the realizer is irrelevant
    for a in [n(0), n(3), pr(n(1), n(2))] {
        out.push((a, p("0 in 1"), e0.clone()));
        out.push((a, p("0 in 0"), e0.clone()));
        out.push((a, p("1 = 1"), e0.clone()));
        out.push((a, p("1 = 2"), e0.clone()));
        out.push((a, p("false"), e0.clone()));
    }
    // conjunction via projections
    out.push((pr(n(0), n(0)), p("0 in 1 & 1 in 2"), e0.clone()));
    out.push((pr(n(0), n(0)), p("0 in 1 & 1 in 1"), e0.clone()));
    out.push((n(0), p("0 in 1 & 1 in 2"), e0.clone())); // not a pair
    // disjunction via tagged families
    out.push((fam(&[pr(n(0), n(0))]), p("0 in 1 | 0 in 0"), e0.clone()));
    out.push((fam(&[pr(n(1), n(0))]), p("0 in 0 | 0 in 1"), e0.clone()));
    out.push((fam(&[pr(n(0), n(0))]), p("0 in 0 | 0 in 1"), e0.clone())); // wrong tag
    out.push((HFSet::empty(), p("0 in 1 | 1 in 2"), e0.clone())); // empty family
    // bounded universal: k-states and rho-friendly realizers
    let k1 = pr(Index::K.numeral(), n(0)); // ⟨k,0⟩: constant 0
    out.push((k1, p("all x in b. 0 in 1"), env_b(n(3))));
    out.push((k1, p("all x in b. 0 in x"), env_b(n(3)))); // fails at x=0
    out.push((k1, p("all x in b. false"), env_b(n(0)))); // vacuous
    // bounded existential: explicit witness families
    out.push((fam(&[pr(n(0), n(0))]), p("some x in 1. x = x"), e0.clone()));
    out.push((fam(&[pr(n(1), n(0))]), p("some x in 2. 0 in x"), e0.clone()));
    out.push((fam(&[pr(n(1), n(0))]), p("some x in 1. x = x"), e0.clone())); // witness outside b
    out.push((HFSet::empty(), p("some x in 2. x = x"), e0.clone()));
    // implications: vacuous, satisfied, and broken
    out.push((k1, p("0 in 0 -> 1 = 2"), e0.clone()));
    out.push((k1, p("false -> 0 in 0"), e0.clone()));
    out.push((k1, p("0 in 1 -> 0 in 1"), e0.clone()));
    out.push((k1, p("0 in 1 -> 0 in 0"), e0.clone()));
    out.push((k1, p("0 in 0 | 1 in 0 -> false"), e0.clone()));
    // negation sugar
    out.push((k1, p("~(0 in 0)"), e0.clone()));
    out.push((k1, p("~(0 in 1)"), e0.clone()));
    // nested shapes
    out.push((
        pr(fam(&[pr(n(0), n(0))]), k1),
        p("(some x in 1. x = x) & (0 in 0 -> false)"),
        e0.clone(),
    ));
    out.push((
        fam(&[pr(n(0), pr(n(0), n(0)))]),
        p("some x in 1. (x = 0 & 0 in 1)"),
        e0.clone(),
    ));
    out.push((k1, p("all x in b. (x in 2 -> x in 3)"), env_b(n(2))));
    out.push((fam(&[pr(n(0), k1)]), p("some x in 1. all y in x. false"), e0.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erec::Index;
    use crate::formula::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn checker(search: &[HFSet]) -> Checker<'_> {
        Checker {
            variant: Variant::Wt,
            fuel: 10_000,
            search,
        }
    }

    #[test]
    fn atomic_clauses_follow_truth() {
        let uni = rank_universe(2);
        let c = checker(&uni);
        for a in [HFSet::nat(0), HFSet::nat(3)] {
            assert_eq!(c.check(a, &p("0 in 1"), &Env::new()).unwrap(), Realized);
            assert_eq!(c.check(a, &p("1 in 0"), &Env::new()).unwrap(), NotRealized);
            assert_eq!(c.check(a, &p("false"), &Env::new()).unwrap(), NotRealized);
        }
    }

    #[test]
    fn stock_corpus_audit_is_clean() {
        let uni = rank_universe(2);
        let c = checker(&uni);
        let corpus = stock_corpus();
        assert!(corpus.len() >= 30);
        let report = truth_audit(&corpus, |a, f, env| c.check(a, f, env).unwrap());
        assert_eq!(report.violations, 0, "{:#?}", report.entries);
        // and the corpus is not trivially one-sided
        let realized = report
            .entries
            .iter()
            .filter(|e| e.verdict == Realized)
            .count();
        let failed = report
            .entries
            .iter()
            .filter(|e| e.verdict == NotRealized)
            .count();
        assert!(realized >= 8, "realized: {realized}");
        assert!(failed >= 8, "failed: {failed}");
    }

    #[test]
    fn corrupted_checker_is_caught() {
        let corpus = stock_corpus();
        let report = truth_audit(&corpus, |_, _, _| Realized);
        assert!(report.violations > 0);
    }

    #[test]
    fn wt_subset_of_w_on_implications() {
        let uni = rank_universe(2);
        let wt = checker(&uni);
        let w = Checker {
            variant: Variant::W,
            ..checker(&uni)
        };
        for (a, f, env) in stock_corpus() {
            if !matches!(f, Formula::Imp(..)) {
                continue;
            }
            if wt.check(a, &f, &env).unwrap() == Realized {
                assert_eq!(w.check(a, &f, &env).unwrap(), Realized, "{f}");
            }
        }
    }

    #[test]
    fn w_accepts_a_vacuous_case_wt_rejects() {
        // the premise is true but no realizer for it fits in this search
        // universe, so the truth-free variant scans nothing and accepts; the
        // truth-carrying variant sees the false implication
        let uni = rank_universe(1); // only 0 and 1
        let f = p("(some x in 1. (x = 0 & 0 in 1)) -> 0 in 0");
        let a = HFSet::nat(0);
        let w = Checker {
            variant: Variant::W,
            fuel: 1000,
            search: &uni,
        };
        let wt = Checker {
            variant: Variant::Wt,
            fuel: 1000,
            search: &uni,
        };
        assert_eq!(w.check(a, &f, &Env::new()).unwrap(), Realized);
        assert_eq!(wt.check(a, &f, &Env::new()).unwrap(), NotRealized);
    }

    #[test]
    fn pmode_realizer_needs_wp() {
        // [℘̄](c) must be defined for each c in b, which only ℘-mode gives
        let uni = rank_universe(2);
        let f = p("all x in b. x = x");
        let env = vec![("b".to_string(), HFSet::nat(2))];
        let a = Index::Pow.numeral();
        let wt = checker(&uni);
        assert_eq!(wt.check(a, &f, &env).unwrap(), NotRealized);
        let wp = Checker {
            variant: Variant::Wp,
            ..checker(&uni)
        };
        assert_eq!(wp.check(a, &f, &env).unwrap(), Realized);
        // and the two variants agree when the realizer never touches ℘̄
        let k1 = HFSet::kpair(Index::K.numeral(), HFSet::nat(0));
        assert_eq!(
            wt.check(k1, &f, &env).unwrap(),
            wp.check(k1, &f, &env).unwrap()
        );
    }

    #[test]
    fn fuel_exhaustion_is_unknown() {
        let uni = rank_universe(1);
        let f = p("all x in b. x = x");
        let env = vec![("b".to_string(), HFSet::nat(2))];
        let a = HFSet::kpair(Index::K.numeral(), HFSet::nat(0));
        let starved = Checker {
            variant: Variant::Wt,
            fuel: 0,
            search: &uni,
        };
        assert_eq!(
            starved.check(a, &f, &env).unwrap(),
            Unknown(Reason::Fuel)
        );
    }

    #[test]
    fn budget_monotonicity_on_the_corpus() {
        let small = rank_universe(1);
        let big = rank_universe(2);
        for variant in [Variant::Wt, Variant::W, Variant::Wp] {
            for (a, f, env) in stock_corpus() {
                let lo = Checker {
                    variant,
                    fuel: 100,
                    search: &small,
                }
                .check(a, &f, &env)
                .unwrap();
                let hi = Checker {
                    variant,
                    fuel: 1000,
                    search: &big,
                }
                .check(a, &f, &env)
                .unwrap();
                match (lo, hi) {
                    (Realized, NotRealized) | (NotRealized, Realized) => {
                        panic!("budget flip on {f}: {lo:?} -> {hi:?}")
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn unbounded_quantifiers_stay_honest() {
        let uni = rank_universe(1);
        let c = checker(&uni);
        // a constant-realizer passes every scanned instance but the claim
        // is about all sets
        let a = HFSet::kpair(Index::K.numeral(), HFSet::nat(0));
        assert_eq!(
            c.check(a, &p("All x. x = x"), &Env::new()).unwrap(),
            Unknown(Reason::SearchBound)
        );
        // a failing instance is still conclusive
        assert_eq!(
            c.check(a, &p("All x. 0 in x"), &Env::new()).unwrap(),
            NotRealized
        );
        // unbounded existentials carry their witnesses, so they close
        let wit = HFSet::from_elems([HFSet::kpair(HFSet::nat(1), HFSet::nat(0))]);
        assert_eq!(
            c.check(wit, &p("Some x. 0 in x"), &Env::new()).unwrap(),
            Realized
        );
    }
}
