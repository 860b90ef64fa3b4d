//! Canonical hereditarily finite sets.
//!
//! Every set is interned once in a global store, so extensional equality is
//! id equality and hash-consing makes the stage builders feasible. Values are
//! immutable and freely shareable across threads.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use once_cell::sync::Lazy;
use parking_lot::{Mutex, RwLock};

/// An interned hereditarily finite set. Copyable handle into the global store.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct HFSet(u32);

struct NodeData {
    /// Elements in the canonical total order, duplicate-free.
    elems: Box<[HFSet]>,
    rank: u32,
}

struct Store {
    map: Mutex<HashMap<Box<[u32]>, u32>>,
    nodes: RwLock<Vec<&'static NodeData>>,
}

static STORE: Lazy<Store> = Lazy::new(|| {
    let store = Store {
        map: Mutex::new(HashMap::new()),
        nodes: RwLock::new(Vec::new()),
    };
    // Pre-intern the empty set as id 0.
    let node: &'static NodeData = Box::leak(Box::new(NodeData {
        elems: Box::new([]),
        rank: 0,
    }));
    store.nodes.write().push(node);
    store.map.lock().insert(Box::new([]), 0);
    store
});

fn node(id: u32) -> &'static NodeData {
    STORE.nodes.read()[id as usize]
}

/// Deterministic total order: by rank, then cardinality, then lexicographic
/// on the (already sorted) element lists. No semantic content; fixed for
/// reproducible serialization.
pub fn cmp_sets(a: HFSet, b: HFSet) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (na, nb) = (node(a.0), node(b.0));
    na.rank
        .cmp(&nb.rank)
        .then(na.elems.len().cmp(&nb.elems.len()))
        .then_with(|| {
            for (x, y) in na.elems.iter().zip(nb.elems.iter()) {
                match cmp_sets(*x, *y) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
}

impl PartialOrd for HFSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(cmp_sets(*self, *other))
    }
}

impl Ord for HFSet {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_sets(*self, *other)
    }
}

impl HFSet {
    pub const EMPTY: HFSet = HFSet(0);

    pub fn empty() -> HFSet {
        Lazy::force(&STORE);
        HFSet(0)
    }

    /// Interns the set with the given elements (order and duplicates ignored).
    pub fn from_elems<I: IntoIterator<Item = HFSet>>(iter: I) -> HFSet {
        let mut elems: Vec<HFSet> = iter.into_iter().collect();
        elems.sort_unstable_by(|a, b| cmp_sets(*a, *b));
        elems.dedup();
        let key: Box<[u32]> = elems.iter().map(|e| e.0).collect();
        if let Some(&id) = STORE.map.lock().get(&key) {
            return HFSet(id);
        }
        let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
        let mut map = STORE.map.lock();
        // Re-check under the lock: another thread may have interned it.
        if let Some(&id) = map.get(&key) {
            return HFSet(id);
        }
        let mut nodes = STORE.nodes.write();
        let id = nodes.len() as u32;
        let data: &'static NodeData = Box::leak(Box::new(NodeData {
            elems: elems.into_boxed_slice(),
            rank,
        }));
        nodes.push(data);
        map.insert(key, id);
        HFSet(id)
    }

    pub fn elems(self) -> &'static [HFSet] {
        &node(self.0).elems
    }

    pub fn len(self) -> usize {
        node(self.0).elems.len()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn rank(self) -> u32 {
        node(self.0).rank
    }

    pub fn contains(self, x: HFSet) -> bool {
        self.elems().binary_search_by(|e| cmp_sets(*e, x)).is_ok()
    }

    pub fn singleton(x: HFSet) -> HFSet {
        HFSet::from_elems([x])
    }

    /// The unordered pair {a, b}.
    pub fn pair_set(a: HFSet, b: HFSet) -> HFSet {
        HFSet::from_elems([a, b])
    }

    pub fn insert(self, x: HFSet) -> HFSet {
        HFSet::from_elems(self.elems().iter().copied().chain([x]))
    }

    pub fn union(self, other: HFSet) -> HFSet {
        HFSet::from_elems(
            self.elems()
                .iter()
                .chain(other.elems().iter())
                .copied(),
        )
    }

    pub fn intersect(self, other: HFSet) -> HFSet {
        HFSet::from_elems(self.elems().iter().copied().filter(|e| other.contains(*e)))
    }

    pub fn difference(self, other: HFSet) -> HFSet {
        HFSet::from_elems(
            self.elems()
                .iter()
                .copied()
                .filter(|e| !other.contains(*e)),
        )
    }

    /// Union of all elements.
    pub fn union_all(self) -> HFSet {
        HFSet::from_elems(
            self.elems()
                .iter()
                .flat_map(|e| e.elems().iter())
                .copied(),
        )
    }

    pub fn is_subset(self, other: HFSet) -> bool {
        self.elems().iter().all(|e| other.contains(*e))
    }

    pub fn is_transitive(self) -> bool {
        self.elems().iter().all(|e| e.is_subset(self))
    }

    /// "Transitive set of transitive sets."
    pub fn is_ordinal(self) -> bool {
        self.is_transitive() && self.elems().iter().all(|e| e.is_transitive())
    }

    /// Von Neumann numeral.
    pub fn nat(n: u32) -> HFSet {
        let mut cur = HFSet::empty();
        for _ in 0..n {
            cur = cur.insert(cur);
        }
        cur
    }

    /// Some(n) iff this set is the von Neumann numeral n.
    pub fn to_nat(self) -> Option<u32> {
        let n = self.rank();
        if self == HFSet::nat(n) {
            Some(n)
        } else {
            None
        }
    }

    /// Kuratowski pair {{a},{a,b}}.
    pub fn kpair(a: HFSet, b: HFSet) -> HFSet {
        HFSet::pair_set(HFSet::singleton(a), HFSet::pair_set(a, b))
    }

    /// Splits a Kuratowski pair; None when no a, b satisfy x = <a,b>.
    pub fn as_pair(self) -> Option<(HFSet, HFSet)> {
        match self.elems() {
            [u] => match u.elems() {
                [a] => Some((*a, *a)),
                _ => None,
            },
            [u, v] => {
                let try_split = |u: HFSet, v: HFSet| -> Option<(HFSet, HFSet)> {
                    // u = {a}, v = {a, b}.
                    if let [a] = u.elems() {
                        match v.elems() {
                            [x, y] if x == a => Some((*a, *y)),
                            [x, y] if y == a => Some((*a, *x)),
                            _ => None,
                        }
                    } else {
                        None
                    }
                };
                try_split(*u, *v).or_else(|| try_split(*v, *u))
            }
            _ => None,
        }
    }

    pub fn is_pair(self) -> bool {
        self.as_pair().is_some()
    }

    /// Right-nested tuple; a single element is the element itself.
    pub fn tuple(xs: &[HFSet]) -> Option<HFSet> {
        match xs {
            [] => None,
            [x] => Some(*x),
            [x, rest @ ..] => Some(HFSet::kpair(*x, HFSet::tuple(rest).unwrap())),
        }
    }

    pub fn product(self, other: HFSet) -> HFSet {
        HFSet::from_elems(
            self.elems()
                .iter()
                .flat_map(|a| other.elems().iter().map(|b| HFSet::kpair(*a, *b))),
        )
    }

    /// dom(x) = { 1st(z) | z in x, z an ordered pair }. Non-pairs are ignored.
    pub fn domain(self) -> HFSet {
        HFSet::from_elems(self.elems().iter().filter_map(|z| z.as_pair()).map(|(a, _)| a))
    }

    /// ran(x) = { 2nd(z) | z in x, z an ordered pair }. Non-pairs are ignored.
    pub fn range(self) -> HFSet {
        HFSet::from_elems(self.elems().iter().filter_map(|z| z.as_pair()).map(|(_, b)| b))
    }

    /// y"{z} = { u | <z, u> in y }.
    pub fn image(self, z: HFSet) -> HFSet {
        HFSet::from_elems(
            self.elems()
                .iter()
                .filter_map(|e| e.as_pair())
                .filter(|(a, _)| *a == z)
                .map(|(_, b)| b),
        )
    }

    /// Transitive closure (the set together with everything hereditarily below it
    /// is not included; this is the usual trcl(x) = x ∪ ⋃{trcl(y) | y ∈ x}).
    pub fn trcl(self) -> HFSet {
        let mut acc: Vec<HFSet> = Vec::new();
        let mut stack: Vec<HFSet> = self.elems().to_vec();
        while let Some(x) = stack.pop() {
            if !acc.contains(&x) {
                acc.push(x);
                stack.extend_from_slice(x.elems());
            }
        }
        HFSet::from_elems(acc)
    }

    pub fn powerset(self) -> HFSet {
        let elems = self.elems();
        assert!(elems.len() <= 16, "powerset base too large");
        HFSet::from_elems((0u32..1 << elems.len()).map(|mask| {
            HFSet::from_elems(
                elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, e)| *e),
            )
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HfError {
    #[error("not an ordered pair: {0}")]
    NotAPair(String),
    #[error("empty tuple")]
    EmptyTuple,
    #[error("syntax error at byte {at}: {msg}")]
    Syntax { at: usize, msg: String },
}

/// 1st/2nd projection; errors when x is not an ordered pair.
pub fn project(x: HFSet, side: Side) -> Result<HFSet, HfError> {
    match x.as_pair() {
        Some((a, b)) => Ok(match side {
            Side::First => a,
            Side::Second => b,
        }),
        None => Err(HfError::NotAPair(x.to_string())),
    }
}

pub fn make_tuple(xs: &[HFSet]) -> Result<HFSet, HfError> {
    HFSet::tuple(xs).ok_or(HfError::EmptyTuple)
}

impl fmt::Display for HFSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.to_nat() {
            return write!(f, "{n}");
        }
        write!(f, "{{")?;
        for (i, e) in self.elems().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for HFSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses the literal syntax: `{}`, `{a,b}`, decimal numerals, `<a,b>` pairs.
pub fn parse_hf(text: &str) -> Result<HFSet, HfError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let value = parse_value(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(HfError::Syntax {
            at: pos,
            msg: "trailing input".into(),
        });
    }
    Ok(value)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_value(bytes: &[u8], pos: &mut usize) -> Result<HFSet, HfError> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'{') => {
            *pos += 1;
            let mut elems = Vec::new();
            skip_ws(bytes, pos);
            if bytes.get(*pos) == Some(&b'}') {
                *pos += 1;
                return Ok(HFSet::from_elems(elems));
            }
            loop {
                elems.push(parse_value(bytes, pos)?);
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b',') => *pos += 1,
                    Some(b'}') => {
                        *pos += 1;
                        return Ok(HFSet::from_elems(elems));
                    }
                    _ => {
                        return Err(HfError::Syntax {
                            at: *pos,
                            msg: "expected ',' or '}'".into(),
                        })
                    }
                }
            }
        }
        Some(b'<') => {
            *pos += 1;
            let a = parse_value(bytes, pos)?;
            skip_ws(bytes, pos);
            if bytes.get(*pos) != Some(&b',') {
                return Err(HfError::Syntax {
                    at: *pos,
                    msg: "expected ',' in pair".into(),
                });
            }
            *pos += 1;
            let b = parse_value(bytes, pos)?;
            skip_ws(bytes, pos);
            if bytes.get(*pos) != Some(&b'>') {
                return Err(HfError::Syntax {
                    at: *pos,
                    msg: "expected '>'".into(),
                });
            }
            *pos += 1;
            Ok(HFSet::kpair(a, b))
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let n: u32 = text_slice(bytes, start, *pos).parse().map_err(|_| HfError::Syntax {
                at: start,
                msg: "numeral too large".into(),
            })?;
            if n > 64 {
                return Err(HfError::Syntax {
                    at: start,
                    msg: "numeral exceeds supported range".into(),
                });
            }
            Ok(HFSet::nat(n))
        }
        _ => Err(HfError::Syntax {
            at: *pos,
            msg: "expected '{', '<' or numeral".into(),
        }),
    }
}

fn text_slice(bytes: &[u8], a: usize, b: usize) -> &str {
    std::str::from_utf8(&bytes[a..b]).unwrap()
}
