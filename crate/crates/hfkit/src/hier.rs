//! Constructible stages over the fundamental operations: the one-step
//! definable-closure operators, exactly enumerated low levels, witness
//! chains for numeral membership, hereditary addition and the alpha-star
//! approximation, and truncated definability for the finite comparison
//! theorem.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::hf::HFSet;
use crate::ops::{eval_fund, OpCode, FUNDAMENTAL};

/// One-step closure without self-adjunction: c ∪ { F_i(x,y) | x,y ∈ c }.
pub fn d_e(c: HFSet) -> HFSet {
    let elems = c.elems();
    let mut out: Vec<HFSet> = elems
        .par_iter()
        .flat_map_iter(|x| {
            elems.iter().flat_map(move |y| {
                FUNDAMENTAL.iter().map(move |op| eval_fund(*op, *x, *y))
            })
        })
        .collect();
    out.extend_from_slice(elems);
    HFSet::from_elems(out)
}

/// D(b) = d_e(b ∪ {b}).
pub fn d_op(b: HFSet) -> HFSet {
    d_e(b.insert(b))
}

/// D(b) ⊆ bound, checked with early exit instead of materializing D(b).
pub fn d_within(b: HFSet, bound: HFSet) -> bool {
    let c = b.insert(b);
    if !c.is_subset(bound) {
        return false;
    }
    c.elems().iter().all(|x| {
        c.elems()
            .iter()
            .all(|y| FUNDAMENTAL.iter().all(|op| bound.contains(eval_fund(*op, *x, *y))))
    })
}

/// Exactly enumerated levels L_0, L_1, ... with L_a = ⋃_{b<a} D(L_b).
pub struct Hierarchy {
    levels: Vec<HFSet>,
    d_levels: Vec<HFSet>,
}

impl Hierarchy {
    pub fn new() -> Hierarchy {
        Hierarchy {
            levels: vec![HFSet::empty()],
            d_levels: Vec::new(),
        }
    }

    /// L_a, computing (and caching) everything below it.
    pub fn level(&mut self, a: usize) -> HFSet {
        while self.levels.len() <= a {
            let b = self.d_levels.len();
            let db = d_op(self.levels[b]);
            self.d_levels.push(db);
            let all: Vec<HFSet> = self
                .d_levels
                .iter()
                .flat_map(|d| d.elems().iter().copied())
                .collect();
            self.levels.push(HFSet::from_elems(all));
        }
        self.levels[a]
    }

    /// First a <= max with x ∈ L_a.
    pub fn min_stage(&mut self, x: HFSet, max: usize) -> Option<usize> {
        (0..=max).find(|a| self.level(*a).contains(x))
    }
}

impl Default for Hierarchy {
    fn default() -> Self {
        Hierarchy::new()
    }
}

/// Generalized stage L_x = ⋃_{y ∈ x} D(L_y) for an arbitrary HF index,
/// agreeing with Hierarchy::level on von Neumann ordinals.
pub fn ll_of(x: HFSet, memo: &mut HashMap<HFSet, HFSet>) -> HFSet {
    if let Some(v) = memo.get(&x) {
        return *v;
    }
    let mut parts: Vec<HFSet> = Vec::new();
    for y in x.elems() {
        let ly = ll_of(*y, memo);
        parts.extend_from_slice(d_op(ly).elems());
    }
    let v = HFSet::from_elems(parts);
    memo.insert(x, v);
    v
}

// ---------------------------------------------------------------------------
// Hereditary addition and alpha-star

/// (a +_H g)^- = ⋃{ b +_H g | b ∈ a } ∪ {a}, as a finite ordinal.
pub fn hered_add_minus(alpha: u32, gamma: u32) -> u32 {
    if alpha == 0 {
        // ⋃∅ ∪ {0} = {0} = 1
        return 1;
    }
    let m = (0..alpha).map(|b| hered_add(b, gamma)).max().unwrap();
    // adjoin alpha to the ordinal m
    match alpha.cmp(&m) {
        std::cmp::Ordering::Less => m,
        std::cmp::Ordering::Equal => m + 1,
        std::cmp::Ordering::Greater => {
            unreachable!("hereditary sum fell below its index")
        }
    }
}

/// a +_H g = (a +_H g)^- + g.
pub fn hered_add(alpha: u32, gamma: u32) -> u32 {
    hered_add_minus(alpha, gamma) + gamma
}

#[derive(Debug, Clone)]
pub struct AlphaStar {
    /// The separated set { g | D(L_g) ⊆ L_a } (over the hereditary candidate
    /// pool; see `pool_complete`).
    pub set: HFSet,
    pub is_ordinal: bool,
    /// Indices in `set` that are not von Neumann ordinals.
    pub non_ordinal_members: Vec<HFSet>,
    /// The k recorded for the separation-stage bound.
    pub k: u32,
    /// (a +_H k)^-; all members of `set` must sit in L of this stage.
    pub minus_stage: u32,
    /// L_{a*} computed from the separated set.
    pub level_of_star: HFSet,
}

/// Computes a* = { g ∈ L_{(a +_H k)^-} | D(L_g) ⊆ L_a }.
///
/// Any qualifying g has all of its members qualifying too (D(L_b) ⊆ L_g
/// for b ∈ g), so the search runs as a least fixpoint over subsets of the
/// already-qualified pool instead of enumerating the enormous ambient stage.
pub fn alpha_star(alpha: usize, hier: &mut Hierarchy, k: u32) -> AlphaStar {
    let la = hier.level(alpha);
    let mut memo: HashMap<HFSet, HFSet> = HashMap::new();
    let mut pool: Vec<HFSet> = Vec::new();
    loop {
        let mut grew = false;
        // all subsets of the current pool (pool stays tiny)
        assert!(pool.len() <= 16, "alpha-star pool exploded");
        for mask in 0u32..1 << pool.len() {
            let cand = HFSet::from_elems(
                pool.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, g)| *g),
            );
            if pool.contains(&cand) {
                continue;
            }
            let lg = ll_of(cand, &mut memo);
            if d_within(lg, la) {
                pool.push(cand);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let set = HFSet::from_elems(pool.iter().copied());
    let non_ordinal_members: Vec<HFSet> = set
        .elems()
        .iter()
        .copied()
        .filter(|g| !g.is_ordinal())
        .collect();
    let level_of_star = ll_of(set, &mut memo);
    AlphaStar {
        set,
        is_ordinal: set.is_ordinal(),
        non_ordinal_members,
        k,
        minus_stage: hered_add_minus(alpha as u32, k),
        level_of_star,
    }
}

// ---------------------------------------------------------------------------
// Witness chains for n ∈ L_{2n+1}

#[derive(Debug, Clone)]
pub struct ChainStep {
    pub value: HFSet,
    /// Stage under the source display's accounting (union read as binary).
    pub display_stage: u32,
    /// Stage under the one-application-per-step reading of the definitions.
    pub strict_stage: u32,
    pub rule: String,
}

/// Builds the step-by-step justification that the numeral n appears in the
/// hierarchy, tracking both stage accountings. The final step's value is n.
pub fn numeral_chain(n: u32) -> Vec<ChainStep> {
    let mut steps: Vec<ChainStep> = Vec::new();
    let zero = HFSet::empty();
    steps.push(ChainStep {
        value: zero,
        display_stage: 1,
        strict_stage: 1,
        rule: "0 in L_1 (base)".into(),
    });
    if n == 0 {
        return steps;
    }
    let one = eval_fund(OpCode::Pair, zero, zero);
    steps.push(ChainStep {
        value: one,
        display_stage: 1,
        strict_stage: 1,
        rule: "1 = pair(0,0) in L_1 (base)".into(),
    });
    if n == 1 {
        return steps;
    }
    let two = eval_fund(OpCode::Pair, zero, one);
    steps.push(ChainStep {
        value: two,
        display_stage: 2,
        strict_stage: 2,
        rule: "2 = pair(0,1)".into(),
    });
    let mut cur = two;
    let (mut d, mut s) = (2u32, 2u32);
    for k in 2..n {
        let sing = eval_fund(OpCode::Pair, cur, cur);
        steps.push(ChainStep {
            value: sing,
            display_stage: d + 1,
            strict_stage: s + 1,
            rule: format!("{{{k}}} = pair({k},{k})"),
        });
        let pairset = eval_fund(OpCode::Pair, cur, sing);
        steps.push(ChainStep {
            value: pairset,
            // the display folds this into its binary-union step
            display_stage: d + 2,
            strict_stage: s + 2,
            rule: format!("{{{k},{{{k}}}}} = pair({k},{{{k}}})"),
        });
        let next = eval_fund(OpCode::Union, pairset, pairset);
        assert_eq!(next, cur.insert(cur));
        steps.push(ChainStep {
            value: next,
            display_stage: d + 2,
            strict_stage: s + 3,
            rule: format!("{} = union({{{k},{{{k}}}}})", k + 1),
        });
        cur = next;
        d += 2;
        s += 3;
    }
    steps
}

/// (display, strict) stage bounds for the numeral n from its chain.
pub fn numeral_stage_bounds(n: u32) -> (u32, u32) {
    let chain = numeral_chain(n);
    let last = chain.last().unwrap();
    assert_eq!(last.value, HFSet::nat(n));
    (last.display_stage, last.strict_stage)
}

// ---------------------------------------------------------------------------
// Truncated definability and definable subsets

/// D iterated n times on m.
pub fn def_truncated(m: HFSet, n: u32) -> HFSet {
    let mut cur = m;
    for _ in 0..n {
        cur = d_op(cur);
    }
    cur
}

/// The subsets of m definable by a small Sigma_0 formula with one free
/// variable and parameters from m, as a set of sets.
pub fn def_subsets(m: HFSet) -> HFSet {
    use crate::formula::{Formula, Term};
    use crate::oracle;

    let z = || Term::var("z");
    let mut atoms: Vec<Formula> = vec![
        Formula::Falsum,
        Formula::Eq(z(), z()),
        Formula::In(z(), z()),
    ];
    for p in m.elems() {
        atoms.push(Formula::Eq(z(), Term::Const(*p)));
        atoms.push(Formula::In(z(), Term::Const(*p)));
        atoms.push(Formula::In(Term::Const(*p), z()));
    }
    let mut formulas: Vec<Formula> = atoms.clone();
    for a in &atoms {
        formulas.push(Formula::BForall(
            "y".into(),
            z(),
            Box::new(a.clone().rename_var("z", "y")),
        ));
        formulas.push(Formula::BExists(
            "y".into(),
            z(),
            Box::new(a.clone().rename_var("z", "y")),
        ));
        for b in &atoms {
            formulas.push(Formula::and(a.clone(), b.clone()));
            formulas.push(Formula::or(a.clone(), b.clone()));
            formulas.push(Formula::imp(a.clone(), b.clone()));
        }
    }
    // third-level disjunctions pick out arbitrary three-element subsets
    let eqs: Vec<Formula> = m
        .elems()
        .iter()
        .map(|p| Formula::Eq(z(), Term::Const(*p)))
        .collect();
    for i in 0..eqs.len() {
        for j in 0..eqs.len() {
            for k in 0..eqs.len() {
                formulas.push(Formula::or(
                    eqs[i].clone(),
                    Formula::or(eqs[j].clone(), eqs[k].clone()),
                ));
            }
        }
    }
    let mut out: Vec<HFSet> = Vec::new();
    for f in &formulas {
        let s = oracle::separation(f, "z", m, &Vec::new(), None).unwrap();
        out.push(s);
    }
    HFSet::from_elems(out)
}

/// All transitive sets whose transitive closure has at most `bound` (<= 3)
/// elements.
pub fn small_transitive_sets(bound: usize) -> Vec<HFSet> {
    assert!(bound <= 3);
    // every such set lives inside the rank <= 2 universe
    let v3 = HFSet::from_elems([
        HFSet::empty(),
        HFSet::nat(1),
        HFSet::singleton(HFSet::nat(1)),
        HFSet::nat(2),
    ]);
    v3.powerset()
        .elems()
        .iter()
        .copied()
        .filter(|m| m.is_transitive() && m.trcl().len() <= bound)
        .collect()
}
