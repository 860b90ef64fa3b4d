//! Kripke models with per-node classical structures and transition
//! homomorphisms, a validator, and the forcing relation for the formula
//! language (unbounded and ∈-bounded quantifiers).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Term};

/// A finite preorder on node indices; `reach[p][q]` means p R q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub reach: Vec<Vec<bool>>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.reach.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reach.is_empty()
    }

    pub fn cone(&self, p: usize) -> Vec<usize> {
        (0..self.len()).filter(|q| self.reach[p][*q]).collect()
    }

    /// Reflexive violations and transitivity gaps, as human-readable strings.
    pub fn preorder_violations(&self) -> Vec<String> {
        let n = self.len();
        let mut out = Vec::new();
        for p in 0..n {
            if !self.reach[p][p] {
                out.push(format!("missing reflexive edge at node {p}"));
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    if self.reach[p][q] && self.reach[q][r] && !self.reach[p][r] {
                        out.push(format!("transitivity gap: {p} R {q} R {r} but not {p} R {r}"));
                    }
                }
            }
        }
        out
    }
}

/// A Kripke model: frame, per-node classical structures over abstract
/// element ids, and transition maps along frame edges.
#[derive(Debug, Clone)]
pub struct Model {
    pub frame: Frame,
    pub node_names: Vec<String>,
    /// element names, per node; element ids are indices into these
    pub domains: Vec<Vec<String>>,
    /// interpretation of `=` at each node
    pub eq: Vec<HashSet<(usize, usize)>>,
    /// interpretation of `in` at each node
    pub mem: Vec<HashSet<(usize, usize)>>,
    /// transition map for every frame edge (p, q), domain(p) -> domain(q)
    pub trans: HashMap<(usize, usize), Vec<usize>>,
}

#[derive(Debug, thiserror::Error)]
pub enum KripkeError {
    #[error("invalid model:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
    #[error("constants are not interpreted in Kripke structures")]
    ConstantTerm,
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("subset-bounded quantifiers are not interpreted in Kripke structures")]
    SubsetQuantifier,
    #[error("bad model file: {0}")]
    Format(String),
}

impl Model {
    /// Structural validation: preorder frame, identity loops, total
    /// transition maps, composition coherence, and atomic persistence along
    /// every edge. Returns all violations rather than the first.
    pub fn validate(&self) -> Result<(), KripkeError> {
        let mut bad = self.frame.preorder_violations();
        let n = self.frame.len();
        if self.node_names.len() != n
            || self.domains.len() != n
            || self.eq.len() != n
            || self.mem.len() != n
        {
            bad.push("node-indexed tables have inconsistent lengths".into());
            return Err(KripkeError::Invalid(bad));
        }
        for p in 0..n {
            for q in 0..n {
                if !self.frame.reach[p][q] {
                    continue;
                }
                let Some(f) = self.trans.get(&(p, q)) else {
                    bad.push(format!("missing transition for edge {p} -> {q}"));
                    continue;
                };
                if f.len() != self.domains[p].len() {
                    bad.push(format!("transition {p} -> {q} is not total"));
                    continue;
                }
                if f.iter().any(|t| *t >= self.domains[q].len()) {
                    bad.push(format!("transition {p} -> {q} maps outside the codomain"));
                    continue;
                }
                if p == q && f.iter().enumerate().any(|(i, t)| i != *t) {
                    bad.push(format!("transition {p} -> {p} is not the identity"));
                }
                // atomic persistence (homomorphism)
                for &(a, b) in &self.eq[p] {
                    if !self.eq[q].contains(&(f[a], f[b])) {
                        bad.push(format!(
                            "equality of ({a},{b}) at {p} is lost along {p} -> {q}"
                        ));
                    }
                }
                for &(a, b) in &self.mem[p] {
                    if !self.mem[q].contains(&(f[a], f[b])) {
                        bad.push(format!(
                            "membership of ({a},{b}) at {p} is lost along {p} -> {q}"
                        ));
                    }
                }
                // composition coherence
                for r in 0..n {
                    if !self.frame.reach[q][r] || !self.frame.reach[p][r] {
                        continue;
                    }
                    if let (Some(g), Some(h)) =
                        (self.trans.get(&(q, r)), self.trans.get(&(p, r)))
                    {
                        if g.len() == self.domains[q].len()
                            && f.iter().all(|t| *t < g.len())
                            && (0..f.len()).any(|a| h.get(a) != Some(&g[f[a]]))
                        {
                            bad.push(format!(
                                "transitions do not compose along {p} -> {q} -> {r}"
                            ));
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for a in 0..self.domains[p].len() {
                if !self.eq[p].contains(&(a, a)) {
                    bad.push(format!("equality at node {p} is not reflexive on {a}"));
                }
            }
            for &(a, b) in self.eq[p].iter().chain(self.mem[p].iter()) {
                if a >= self.domains[p].len() || b >= self.domains[p].len() {
                    bad.push(format!("atom ({a},{b}) at node {p} is out of range"));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(KripkeError::Invalid(bad))
        }
    }

    /// The cone submodel above p, with nodes renumbered.
    pub fn truncate(&self, p: usize) -> Model {
        let keep = self.frame.cone(p);
        let back: HashMap<usize, usize> =
            keep.iter().enumerate().map(|(i, q)| (*q, i)).collect();
        let reach = keep
            .iter()
            .map(|q| keep.iter().map(|r| self.frame.reach[*q][*r]).collect())
            .collect();
        let mut trans = HashMap::new();
        for (&(a, b), f) in &self.trans {
            if let (Some(&na), Some(&nb)) = (back.get(&a), back.get(&b)) {
                trans.insert((na, nb), f.clone());
            }
        }
        Model {
            frame: Frame { reach },
            node_names: keep.iter().map(|q| self.node_names[*q].clone()).collect(),
            domains: keep.iter().map(|q| self.domains[*q].clone()).collect(),
            eq: keep.iter().map(|q| self.eq[*q].clone()).collect(),
            mem: keep.iter().map(|q| self.mem[*q].clone()).collect(),
            trans,
        }
    }

    fn transport(&self, p: usize, q: usize, env: &[(String, usize)]) -> Vec<(String, usize)> {
        if p == q {
            return env.to_vec();
        }
        let f = &self.trans[&(p, q)];
        env.iter().map(|(v, a)| (v.clone(), f[*a])).collect()
    }

    fn lookup(env: &[(String, usize)], v: &str) -> Result<usize, KripkeError> {
        env.iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, a)| *a)
            .ok_or_else(|| KripkeError::UnboundVariable(v.to_string()))
    }

    fn term(&self, env: &[(String, usize)], t: &Term) -> Result<usize, KripkeError> {
        match t {
            Term::Var(v) => Self::lookup(env, v),
            Term::Const(_) => Err(KripkeError::ConstantTerm),
        }
    }

    /// The forcing relation at node p under an element environment.
    pub fn forces(
        &self,
        p: usize,
        f: &Formula,
        env: &[(String, usize)],
    ) -> Result<bool, KripkeError> {
        match f {
            Formula::Falsum => Ok(false),
            Formula::Eq(a, b) => {
                Ok(self.eq[p].contains(&(self.term(env, a)?, self.term(env, b)?)))
            }
            Formula::In(a, b) => {
                Ok(self.mem[p].contains(&(self.term(env, a)?, self.term(env, b)?)))
            }
            Formula::And(a, b) => Ok(self.forces(p, a, env)? && self.forces(p, b, env)?),
            Formula::Or(a, b) => Ok(self.forces(p, a, env)? || self.forces(p, b, env)?),
            Formula::Imp(a, b) => {
                for q in self.frame.cone(p) {
                    let env_q = self.transport(p, q, env);
                    if self.forces(q, a, &env_q)? && !self.forces(q, b, &env_q)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::UForall(v, body) => {
                for q in self.frame.cone(p) {
                    let env_q = self.transport(p, q, env);
                    for d in 0..self.domains[q].len() {
                        let mut e = env_q.clone();
                        e.push((v.clone(), d));
                        if !self.forces(q, body, &e)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Formula::UExists(v, body) => {
                for d in 0..self.domains[p].len() {
                    let mut e = env.to_vec();
                    e.push((v.clone(), d));
                    if self.forces(p, body, &e)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::BForall(v, t, body) => {
                for q in self.frame.cone(p) {
                    let env_q = self.transport(p, q, env);
                    let bound = self.term(&env_q, t)?;
                    for d in 0..self.domains[q].len() {
                        if !self.mem[q].contains(&(d, bound)) {
                            continue;
                        }
                        let mut e = env_q.clone();
                        e.push((v.clone(), d));
                        if !self.forces(q, body, &e)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Formula::BExists(v, t, body) => {
                let bound = self.term(env, t)?;
                for d in 0..self.domains[p].len() {
                    if !self.mem[p].contains(&(d, bound)) {
                        continue;
                    }
                    let mut e = env.to_vec();
                    e.push((v.clone(), d));
                    if self.forces(p, body, &e)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::SubForall(..) | Formula::SubExists(..) => {
                Err(KripkeError::SubsetQuantifier)
            }
        }
    }

    /// Forced at every node (under the empty environment).
    pub fn valid(&self, f: &Formula) -> Result<bool, KripkeError> {
        for p in 0..self.frame.len() {
            if !self.forces(p, f, &[])? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The two-node chain with domain {a, b} everywhere, where the upper node
/// (and only it) satisfies a = b.
pub fn two_node_example() -> Model {
    let frame = Frame {
        reach: vec![vec![true, true], vec![false, true]],
    };
    let dom = vec!["a".to_string(), "b".to_string()];
    let refl: HashSet<(usize, usize)> = [(0, 0), (1, 1)].into();
    let full: HashSet<(usize, usize)> = [(0, 0), (1, 1), (0, 1), (1, 0)].into();
    let mut trans = HashMap::new();
    for (p, q) in [(0, 0), (0, 1), (1, 1)] {
        trans.insert((p, q), vec![0, 1]);
    }
    Model {
        frame,
        node_names: vec!["root".into(), "top".into()],
        domains: vec![dom.clone(), dom],
        eq: vec![refl, full],
        mem: vec![HashSet::new(), HashSet::new()],
        trans,
    }
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub domains: HashMap<String, Vec<String>>,
    #[serde(default)]
    pub eq: HashMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub membership: HashMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub transitions: HashMap<String, HashMap<String, String>>,
}

impl Model {
    pub fn from_file(raw: &ModelFile) -> Result<Model, KripkeError> {
        let n = raw.nodes.len();
        let node_id: HashMap<&str, usize> = raw
            .nodes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if node_id.len() != n {
            return Err(KripkeError::Format("duplicate node names".into()));
        }
        let mut reach = vec![vec![false; n]; n];
        // reflexive edges may be left implicit
        for p in 0..n {
            reach[p][p] = true;
        }
        for (a, b) in &raw.edges {
            let (&pa, &pb) = (
                node_id
                    .get(a.as_str())
                    .ok_or_else(|| KripkeError::Format(format!("unknown node {a}")))?,
                node_id
                    .get(b.as_str())
                    .ok_or_else(|| KripkeError::Format(format!("unknown node {b}")))?,
            );
            reach[pa][pb] = true;
        }
        let mut domains: Vec<Vec<String>> = vec![Vec::new(); n];
        for (node, dom) in &raw.domains {
            let &p = node_id
                .get(node.as_str())
                .ok_or_else(|| KripkeError::Format(format!("unknown node {node}")))?;
            domains[p] = dom.clone();
        }
        let elem_id = |p: usize, name: &str| -> Result<usize, KripkeError> {
            domains[p]
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| {
                    KripkeError::Format(format!("unknown element {name} at node {p}"))
                })
        };
        let mut eq: Vec<HashSet<(usize, usize)>> = vec![HashSet::new(); n];
        let mut mem: Vec<HashSet<(usize, usize)>> = vec![HashSet::new(); n];
        for (table, out) in [(&raw.eq, &mut eq), (&raw.membership, &mut mem)] {
            for (node, pairs) in table.iter() {
                let &p = node_id
                    .get(node.as_str())
                    .ok_or_else(|| KripkeError::Format(format!("unknown node {node}")))?;
                for (a, b) in pairs {
                    out[p].insert((elem_id(p, a)?, elem_id(p, b)?));
                }
            }
        }
        // equality is reflexive even when the file lists only the extras
        for p in 0..n {
            for a in 0..domains[p].len() {
                eq[p].insert((a, a));
            }
        }
        let mut trans: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (edge, map) in &raw.transitions {
            let (a, b) = edge
                .split_once("->")
                .ok_or_else(|| KripkeError::Format(format!("bad edge key {edge:?}")))?;
            let (&pa, &pb) = (
                node_id
                    .get(a.trim())
                    .ok_or_else(|| KripkeError::Format(format!("unknown node {a}")))?,
                node_id
                    .get(b.trim())
                    .ok_or_else(|| KripkeError::Format(format!("unknown node {b}")))?,
            );
            let mut f = vec![usize::MAX; domains[pa].len()];
            for (from, to) in map {
                f[elem_id(pa, from)?] = elem_id(pb, to)?;
            }
            if f.contains(&usize::MAX) {
                return Err(KripkeError::Format(format!("transition {edge} is partial")));
            }
            trans.insert((pa, pb), f);
        }
        // identity self-transitions may be left implicit
        for p in 0..n {
            trans
                .entry((p, p))
                .or_insert_with(|| (0..domains[p].len()).collect());
        }
        Ok(Model {
            frame: Frame { reach },
            node_names: raw.nodes.clone(),
            domains,
            eq,
            mem,
            trans,
        })
    }

    pub fn to_file(&self) -> ModelFile {
        let name = |p: usize| self.node_names[p].clone();
        let elem = |p: usize, a: usize| self.domains[p][a].clone();
        let mut edges = Vec::new();
        for p in 0..self.frame.len() {
            for q in 0..self.frame.len() {
                if self.frame.reach[p][q] && p != q {
                    edges.push((name(p), name(q)));
                }
            }
        }
        let pack = |tab: &[HashSet<(usize, usize)>]| -> HashMap<String, Vec<(String, String)>> {
            tab.iter()
                .enumerate()
                .filter(|(_, s)| !s.is_empty())
                .map(|(p, s)| {
                    let mut v: Vec<(String, String)> =
                        s.iter().map(|(a, b)| (elem(p, *a), elem(p, *b))).collect();
                    v.sort();
                    (name(p), v)
                })
                .collect()
        };
        let mut transitions = HashMap::new();
        for (&(p, q), f) in &self.trans {
            if p == q {
                continue;
            }
            let map: HashMap<String, String> = f
                .iter()
                .enumerate()
                .map(|(a, b)| (elem(p, a), elem(q, *b)))
                .collect();
            transitions.insert(format!("{}->{}", name(p), name(q)), map);
        }
        ModelFile {
            nodes: self.node_names.clone(),
            edges,
            domains: self
                .domains
                .iter()
                .enumerate()
                .map(|(p, d)| (name(p), d.clone()))
                .collect(),
            eq: pack(&self.eq),
            membership: pack(&self.mem),
            transitions,
        }
    }
}
