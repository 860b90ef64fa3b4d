//! Names over a Kripke frame: stage-bounded name universes, canonical names
//! of HF sets, the characteristic names 1_p, pointwise unions and successors,
//! forcing over name universes, and the bit-string coding family.

use std::collections::{BTreeSet, HashMap};

use crate::formula::{Formula, Term};
use crate::hf::HFSet;
use crate::kripke::Frame;

pub type NameId = u32;

/// A name at `node`: one member set per cone node, coherent under
/// restriction (members restricted along an edge land in the value there).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct NameData {
    node: usize,
    /// indexed in parallel with the cone of `node` (ascending node order)
    vals: Vec<BTreeSet<NameId>>,
}

#[derive(Debug, thiserror::Error)]
pub enum NamesError {
    #[error("member at position {0} lives at the wrong node")]
    WrongNode(usize),
    #[error("name is not coherent under restriction at cone position {0}")]
    Incoherent(usize),
    #[error("node {0} is not in the cone of {1}")]
    NotInCone(usize, usize),
    #[error("names at different nodes cannot be combined")]
    NodeMismatch,
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("subset-bounded quantifiers are not interpreted over names")]
    SubsetQuantifier,
}

pub struct Names {
    pub frame: Frame,
    cones: Vec<Vec<usize>>,
    data: Vec<NameData>,
    index: HashMap<NameData, NameId>,
}

impl Names {
    pub fn new(frame: Frame) -> Names {
        let cones = (0..frame.len()).map(|p| frame.cone(p)).collect();
        Names {
            frame,
            cones,
            data: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn node_of(&self, g: NameId) -> usize {
        self.data[g as usize].node
    }

    fn cone_pos(&self, p: usize, q: usize) -> Option<usize> {
        self.cones[p].iter().position(|r| *r == q)
    }

    /// The member set of g at cone node q.
    pub fn members_at(&self, g: NameId, q: usize) -> &BTreeSet<NameId> {
        let d = &self.data[g as usize];
        let i = self.cone_pos(d.node, q).expect("q in cone");
        &d.vals[i]
    }

    fn intern_raw(&mut self, d: NameData) -> NameId {
        if let Some(&id) = self.index.get(&d) {
            return id;
        }
        let id = self.data.len() as NameId;
        self.data.push(d.clone());
        self.index.insert(d, id);
        id
    }

    /// Intern a name after checking member placement and coherence.
    pub fn make(
        &mut self,
        node: usize,
        vals: Vec<BTreeSet<NameId>>,
    ) -> Result<NameId, NamesError> {
        let cone = self.cones[node].clone();
        assert_eq!(vals.len(), cone.len());
        for (i, q) in cone.iter().enumerate() {
            for &m in &vals[i] {
                if self.node_of(m) != *q {
                    return Err(NamesError::WrongNode(i));
                }
            }
        }
        for (i, q) in cone.iter().enumerate() {
            for (j, r) in cone.iter().enumerate() {
                if i == j || !self.frame.reach[*q][*r] {
                    continue;
                }
                for &m in vals[i].clone().iter() {
                    let mr = self.restrict(m, *r)?;
                    if !vals[j].contains(&mr) {
                        return Err(NamesError::Incoherent(j));
                    }
                }
            }
        }
        Ok(self.intern_raw(NameData { node, vals }))
    }

    /// g restricted to the cone of r (r must be reachable from g's node).
    pub fn restrict(&mut self, g: NameId, r: usize) -> Result<NameId, NamesError> {
        let d = self.data[g as usize].clone();
        if d.node == r {
            return Ok(g);
        }
        if !self.frame.reach[d.node][r] {
            return Err(NamesError::NotInCone(r, d.node));
        }
        let vals = self.cones[r]
            .iter()
            .map(|q| d.vals[self.cone_pos(d.node, *q).unwrap()].clone())
            .collect();
        Ok(self.intern_raw(NameData { node: r, vals }))
    }

    pub fn empty(&mut self, node: usize) -> NameId {
        let vals = vec![BTreeSet::new(); self.cones[node].len()];
        self.intern_raw(NameData { node, vals })
    }

    /// The canonical name of an HF set at a node.
    pub fn canonical(&mut self, x: HFSet, node: usize) -> NameId {
        let cone = self.cones[node].clone();
        let vals = cone
            .iter()
            .map(|q| x.elems().iter().map(|y| self.canonical(*y, *q)).collect())
            .collect();
        self.intern_raw(NameData { node, vals })
    }

    /// 1_p as a name at `at`: value {0^s} on the cone of p, empty elsewhere.
    pub fn one_p(&mut self, at: usize, p: usize) -> NameId {
        let cone = self.cones[at].clone();
        let vals = cone
            .iter()
            .map(|q| {
                if self.frame.reach[p][*q] {
                    [self.empty(*q)].into()
                } else {
                    BTreeSet::new()
                }
            })
            .collect();
        self.intern_raw(NameData { node: at, vals })
    }

    /// Pointwise union of the values of two names at the same node.
    pub fn name_union(&mut self, a: NameId, b: NameId) -> Result<NameId, NamesError> {
        let (da, db) = (
            self.data[a as usize].clone(),
            self.data[b as usize].clone(),
        );
        if da.node != db.node {
            return Err(NamesError::NodeMismatch);
        }
        let vals = da
            .vals
            .iter()
            .zip(&db.vals)
            .map(|(x, y)| x.union(y).copied().collect())
            .collect();
        Ok(self.intern_raw(NameData { node: da.node, vals }))
    }

    /// g + 1: adds g's restriction as a member at every cone node.
    pub fn name_succ(&mut self, g: NameId) -> Result<NameId, NamesError> {
        let d = self.data[g as usize].clone();
        let cone = self.cones[d.node].clone();
        let mut vals = d.vals;
        for (i, q) in cone.iter().enumerate() {
            let r = self.restrict(g, *q)?;
            vals[i].insert(r);
        }
        Ok(self.intern_raw(NameData { node: d.node, vals }))
    }

    /// Genuine union of a finite family: values joined pointwise.
    pub fn union_family(&mut self, node: usize, members: &[NameId]) -> Result<NameId, NamesError> {
        let mut out = self.empty(node);
        for &m in members {
            if self.node_of(m) != node {
                return Err(NamesError::NodeMismatch);
            }
            out = self.name_union(out, m)?;
        }
        Ok(out)
    }

    /// 1 + the stage of the deepest member chain.
    pub fn stage(&self, g: NameId) -> u32 {
        let d = &self.data[g as usize];
        1 + d
            .vals
            .iter()
            .flatten()
            .map(|m| self.stage(*m))
            .max()
            .unwrap_or(0)
    }

    /// a and b are ∈-incomparable at their node: it does not force one to be
    /// a member of, or equal to, the other. (Higher nodes may collapse the
    /// pair; the decoding argument only needs the base node.)
    pub fn in_incomparable(&mut self, a: NameId, b: NameId) -> Result<bool, NamesError> {
        let node = self.node_of(a);
        if self.node_of(b) != node {
            return Err(NamesError::NodeMismatch);
        }
        Ok(a != b
            && !self.members_at(b, node).contains(&a)
            && !self.members_at(a, node).contains(&b))
    }
}

/// Cumulative name universes per node: at cutoff 1 only the empty name, and
/// each further cutoff admits every coherent name whose values come from the
/// previous cutoff.
pub fn build_universe(names: &mut Names, cutoff: u32) -> Vec<Vec<NameId>> {
    let n = names.frame.len();
    let mut uni: Vec<Vec<NameId>> = (0..n).map(|p| vec![names.empty(p)]).collect();
    for _ in 1..cutoff {
        let mut next: Vec<Vec<NameId>> = Vec::with_capacity(n);
        for p in 0..n {
            let cone = names.frame.cone(p);
            let pools: Vec<Vec<NameId>> = cone.iter().map(|q| uni[*q].clone()).collect();
            let mut here = Vec::new();
            // all assignments of a subset of the pool at each cone node
            let mut choice: Vec<Vec<bool>> =
                pools.iter().map(|pool| vec![false; pool.len()]).collect();
            'outer: loop {
                let vals: Vec<BTreeSet<NameId>> = pools
                    .iter()
                    .zip(&choice)
                    .map(|(pool, pick)| {
                        pool.iter()
                            .zip(pick)
                            .filter(|(_, on)| **on)
                            .map(|(id, _)| *id)
                            .collect()
                    })
                    .collect();
                if let Ok(id) = names.make(p, vals) {
                    if !here.contains(&id) {
                        here.push(id);
                    }
                }
                // odometer over the bit choices
                for slot in choice.iter_mut().flatten() {
                    *slot = !*slot;
                    if *slot {
                        continue 'outer;
                    }
                }
                break;
            }
            next.push(here);
        }
        uni = next;
    }
    uni
}

/// Forcing over names. Unbounded quantifiers range over the supplied
/// universe; bounded quantifiers expand to unbounded ones guarded by
/// membership, so they range over the same universe.
pub struct Forcing<'a> {
    pub names: &'a mut Names,
    pub universe: &'a [Vec<NameId>],
}

impl<'a> Forcing<'a> {
    fn term(
        &mut self,
        p: usize,
        env: &[(String, NameId)],
        t: &Term,
    ) -> Result<NameId, NamesError> {
        match t {
            Term::Var(v) => {
                let g = env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, g)| *g)
                    .ok_or_else(|| NamesError::UnboundVariable(v.clone()))?;
                self.names.restrict(g, p)
            }
            Term::Const(c) => Ok(self.names.canonical(*c, p)),
        }
    }

    pub fn forces(
        &mut self,
        p: usize,
        f: &Formula,
        env: &[(String, NameId)],
    ) -> Result<bool, NamesError> {
        match f {
            Formula::Falsum => Ok(false),
            Formula::Eq(a, b) => Ok(self.term(p, env, a)? == self.term(p, env, b)?),
            Formula::In(a, b) => {
                let (ga, gb) = (self.term(p, env, a)?, self.term(p, env, b)?);
                Ok(self.names.members_at(gb, p).contains(&ga))
            }
            Formula::And(a, b) => Ok(self.forces(p, a, env)? && self.forces(p, b, env)?),
            Formula::Or(a, b) => Ok(self.forces(p, a, env)? || self.forces(p, b, env)?),
            Formula::Imp(a, b) => {
                for q in self.names.frame.cone(p) {
                    if self.forces(q, a, env)? && !self.forces(q, b, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::UForall(v, body) => {
                for q in self.names.frame.cone(p) {
                    for i in 0..self.universe[q].len() {
                        let d = self.universe[q][i];
                        let mut e = env.to_vec();
                        e.push((v.clone(), d));
                        if !self.forces(q, body, &e)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Formula::UExists(v, body) => {
                for i in 0..self.universe[p].len() {
                    let d = self.universe[p][i];
                    let mut e = env.to_vec();
                    e.push((v.clone(), d));
                    if self.forces(p, body, &e)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::BForall(v, t, body) => {
                let guard = Formula::In(Term::var(v), t.clone());
                let expanded = Formula::UForall(
                    v.clone(),
                    Box::new(Formula::imp(guard, (**body).clone())),
                );
                self.forces(p, &expanded, env)
            }
            Formula::BExists(v, t, body) => {
                let guard = Formula::In(Term::var(v), t.clone());
                let expanded = Formula::UExists(
                    v.clone(),
                    Box::new(Formula::and(guard, (**body).clone())),
                );
                self.forces(p, &expanded, env)
            }
            Formula::SubForall(..) | Formula::SubExists(..) => {
                Err(NamesError::SubsetQuantifier)
            }
        }
    }
}

/// How a node sees 1_p: as the canonical 1, as the canonical 0, or neither
/// (its cone meets the cone of p without being contained in it).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneView {
    One,
    Zero,
    Mixed,
}

pub fn one_p_view(names: &mut Names, s: usize, p: usize) -> OneView {
    let one_p = names.one_p(s, p);
    if names.frame.reach[p][s] {
        let one = names.canonical(HFSet::nat(1), s);
        if one_p == one {
            return OneView::One;
        }
    } else if names.frame.cone(s).iter().all(|q| !names.frame.reach[p][*q]) {
        let zero = names.canonical(HFSet::empty(), s);
        if one_p == zero {
            return OneView::Zero;
        }
    }
    OneView::Mixed
}

/// The coding family: D_n = n ∪ (1_p + 1) as a name at `at`.
pub fn coding_name(names: &mut Names, at: usize, p: usize, n: u32) -> NameId {
    let num = names.canonical(HFSet::nat(n), at);
    let one = names.one_p(at, p);
    let succ = names.name_succ(one).expect("same node");
    names.name_union(num, succ).expect("same node")
}

/// Encode a bit string as the union ⋃_n (D_n + bits[n]): a set bit adds
/// D_n itself as a member via the name successor.
pub fn delta_encode(names: &mut Names, at: usize, p: usize, bits: &[bool]) -> NameId {
    let members: Vec<NameId> = bits
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let d = coding_name(names, at, p, n as u32);
            if *b {
                names.name_succ(d).expect("same node")
            } else {
                d
            }
        })
        .collect();
    names.union_family(at, &members).expect("same node")
}

/// Decode by testing which D_n the root forces into delta.
pub fn delta_decode(
    names: &mut Names,
    at: usize,
    p: usize,
    delta: NameId,
    len: usize,
) -> Vec<bool> {
    (0..len)
        .map(|n| {
            let d = coding_name(names, at, p, n as u32);
            names.members_at(delta, at).contains(&d)
        })
        .collect()
}
