//! A fuel-bounded evaluator for the E-recursion application relation and its
//! E_℘ extension, with closed application terms.

use std::fmt;

use crate::hf::HFSet;

/// The distinguished indices, as numerals 1..18. The assignment is part of
/// the wire format and must not change between releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Index {
    K = 1,
    S = 2,
    P = 3,
    P0 = 4,
    P1 = 5,
    SN = 6,
    PN = 7,
    DN = 8,
    Zero = 9,
    Omega = 10,
    Pi = 11,
    Nu = 12,
    Gamma = 13,
    Rho = 14,
    I1 = 15,
    I2 = 16,
    I3 = 17,
    Pow = 18,
}

pub const INDICES: [Index; 18] = [
    Index::K,
    Index::S,
    Index::P,
    Index::P0,
    Index::P1,
    Index::SN,
    Index::PN,
    Index::DN,
    Index::Zero,
    Index::Omega,
    Index::Pi,
    Index::Nu,
    Index::Gamma,
    Index::Rho,
    Index::I1,
    Index::I2,
    Index::I3,
    Index::Pow,
];

impl Index {
    pub fn name(self) -> &'static str {
        match self {
            Index::K => "k",
            Index::S => "s",
            Index::P => "p",
            Index::P0 => "p0",
            Index::P1 => "p1",
            Index::SN => "sN",
            Index::PN => "pN",
            Index::DN => "dN",
            Index::Zero => "zero",
            Index::Omega => "omega",
            Index::Pi => "pi",
            Index::Nu => "nu",
            Index::Gamma => "gamma",
            Index::Rho => "rho",
            Index::I1 => "i1",
            Index::I2 => "i2",
            Index::I3 => "i3",
            Index::Pow => "pow",
        }
    }

    pub fn from_name(s: &str) -> Option<Index> {
        INDICES.iter().copied().find(|i| i.name() == s)
    }

    pub fn from_nat(n: u32) -> Option<Index> {
        INDICES.iter().copied().find(|i| *i as u32 == n)
    }

    pub fn arity(self) -> usize {
        match self {
            Index::K | Index::P | Index::Pi | Index::Gamma | Index::Rho => 2,
            Index::S | Index::I1 | Index::I2 | Index::I3 => 3,
            Index::DN => 4,
            _ => 1,
        }
    }

    pub fn numeral(self) -> HFSet {
        HFSet::nat(self as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Value(HFSet),
    Timeout(u64),
    NonFinitary,
    ApplyError(String),
}

impl Outcome {
    pub fn value(&self) -> Option<HFSet> {
        match self {
            Outcome::Value(x) => Some(*x),
            _ => None,
        }
    }
}

/// Non-value results that abort the computation.
enum Stop {
    Timeout,
    NonFinitary,
    ApplyError(String),
}

type Res = Result<HFSet, Stop>;

pub struct Vm {
    pub pmode: bool,
    fuel: u64,
    spent: u64,
}

impl Vm {
    pub fn new(fuel: u64, pmode: bool) -> Vm {
        Vm {
            pmode,
            fuel,
            spent: 0,
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        if self.fuel == 0 {
            return Err(Stop::Timeout);
        }
        self.fuel -= 1;
        self.spent += 1;
        Ok(())
    }

    fn finish(&self, r: Res) -> Outcome {
        match r {
            Ok(x) => Outcome::Value(x),
            Err(Stop::Timeout) => Outcome::Timeout(self.spent),
            Err(Stop::NonFinitary) => Outcome::NonFinitary,
            Err(Stop::ApplyError(d)) => Outcome::ApplyError(d),
        }
    }

    /// [e](x) with the remaining fuel; one fuel unit per clause discharge.
    pub fn apply(&mut self, e: HFSet, x: HFSet) -> Outcome {
        let r = self.app(e, x);
        self.finish(r)
    }

    // Decode an applicable value into its head index and accumulated
    // arguments. Curried states nest on the left — [e](x) ≃ ⟨e, x⟩ with e
    // the whole state so far — so the argument spine is recovered uniquely
    // by peeling first components. (Flattened right-nested tuples would make
    // the relation non-functional: ⟨s, ⟨⟨s,k⟩,k⟩⟩ and ⟨s, 2, ⟨1,1⟩⟩ are the
    // same set with different readings.)
    fn decode(e: HFSet) -> Option<(Index, Vec<HFSet>)> {
        let mut spine = Vec::new();
        let mut cur = e;
        while cur.to_nat().is_none() {
            let (head, arg) = cur.as_pair()?;
            spine.push(arg);
            cur = head;
        }
        let idx = Index::from_nat(cur.to_nat()?)?;
        if spine.len() >= idx.arity() {
            return None; // over-applied: not a state of this index
        }
        spine.reverse();
        Some((idx, spine))
    }

    fn app(&mut self, e: HFSet, x: HFSet) -> Res {
        // deep S-combinator recursion is fuel-bounded but can outrun the
        // default thread stack
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.app_inner(e, x))
    }

    fn app_inner(&mut self, e: HFSet, x: HFSet) -> Res {
        self.tick()?;
        let Some((idx, mut args)) = Self::decode(e) else {
            return Err(Stop::ApplyError(format!("{e} is not applicable")));
        };
        args.push(x);
        if args.len() < idx.arity() {
            return Ok(HFSet::kpair(e, x));
        }
        self.clause(idx, &args)
    }

    fn clause(&mut self, idx: Index, a: &[HFSet]) -> Res {
        let numeral = |x: HFSet, who: &str| {
            x.to_nat()
                .ok_or_else(|| Stop::ApplyError(format!("{who} needs a numeral, got {x}")))
        };
        match idx {
            Index::K => Ok(a[0]),
            Index::S => {
                let f = self.app(a[0], a[2])?;
                let g = self.app(a[1], a[2])?;
                self.app(f, g)
            }
            Index::P => Ok(HFSet::kpair(a[0], a[1])),
            Index::P0 | Index::P1 => {
                let (l, r) = a[0]
                    .as_pair()
                    .ok_or_else(|| Stop::ApplyError(format!("{} is not a pair", a[0])))?;
                Ok(if idx == Index::P0 { l } else { r })
            }
            Index::SN => Ok(HFSet::nat(numeral(a[0], "sN")? + 1)),
            Index::PN => {
                let n = numeral(a[0], "pN")?;
                Ok(HFSet::nat(n.saturating_sub(1)))
            }
            Index::DN => {
                let n = numeral(a[0], "dN")?;
                let m = numeral(a[1], "dN")?;
                Ok(if n == m { a[2] } else { a[3] })
            }
            Index::Zero => Ok(HFSet::empty()),
            Index::Omega => Err(Stop::NonFinitary),
            Index::Pi => Ok(HFSet::pair_set(a[0], a[1])),
            Index::Nu => Ok(a[0].union_all()),
            Index::Gamma => {
                // x ∩ ⋂y, with ⋂∅ read as the ambient class
                let ys = a[1].elems();
                let mut acc = a[0];
                for y in ys {
                    acc = acc.intersect(*y);
                }
                Ok(acc)
            }
            Index::Rho => {
                let mut out = Vec::new();
                for u in a[1].elems() {
                    match self.app(a[0], *u) {
                        Ok(v) => out.push(v),
                        Err(Stop::Timeout) => return Err(Stop::Timeout),
                        Err(Stop::NonFinitary) => return Err(Stop::NonFinitary),
                        Err(Stop::ApplyError(_)) => {
                            return Err(Stop::ApplyError(format!(
                                "rho: [{}]({u}) is undefined",
                                a[0]
                            )))
                        }
                    }
                }
                Ok(HFSet::from_elems(out))
            }
            Index::I1 => Ok(if a[2].contains(a[1]) {
                a[0]
            } else {
                HFSet::empty()
            }),
            Index::I2 => Ok(HFSet::from_elems(
                a[0].elems()
                    .iter()
                    .copied()
                    .filter(|u| !a[1].contains(*u) || a[2].contains(*u)),
            )),
            Index::I3 => Ok(HFSet::from_elems(
                a[0].elems()
                    .iter()
                    .copied()
                    .filter(|u| !a[1].contains(*u) || u.contains(a[2])),
            )),
            Index::Pow => {
                if !self.pmode {
                    return Err(Stop::ApplyError(
                        "power set index outside ℘-mode".to_string(),
                    ));
                }
                if a[0].len() > 16 {
                    return Err(Stop::ApplyError("power set base too large".to_string()));
                }
                Ok(a[0].powerset())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Application terms

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WTerm {
    Idx(Index),
    Var(String),
    Const(HFSet),
    App(Box<WTerm>, Box<WTerm>),
}

impl WTerm {
    pub fn app(f: WTerm, a: WTerm) -> WTerm {
        WTerm::App(Box::new(f), Box::new(a))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            WTerm::Var(_) => false,
            WTerm::Idx(_) | WTerm::Const(_) => true,
            WTerm::App(f, a) => f.is_closed() && a.is_closed(),
        }
    }
}

impl fmt::Display for WTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WTerm::Idx(i) => write!(f, "(idx {})", i.name()),
            WTerm::Var(v) => write!(f, "(var {v})"),
            WTerm::Const(c) => write!(f, "(const {c})"),
            WTerm::App(g, a) => write!(f, "(app {g} {a})"),
        }
    }
}

/// Left-to-right evaluation of a closed term under one shared fuel budget.
pub fn eval_closed_term(t: &WTerm, fuel: u64, pmode: bool) -> Outcome {
    let mut vm = Vm::new(fuel, pmode);
    let r = eval_rec(t, &mut vm);
    vm.finish(r)
}

fn eval_rec(t: &WTerm, vm: &mut Vm) -> Res {
    match t {
        WTerm::Idx(i) => Ok(i.numeral()),
        WTerm::Const(c) => Ok(*c),
        WTerm::Var(v) => Err(Stop::ApplyError(format!("unbound variable {v}"))),
        WTerm::App(f, a) => {
            let fv = eval_rec(f, vm)?;
            let av = eval_rec(a, vm)?;
            vm.app(fv, av)
        }
    }
}

// ---------------------------------------------------------------------------
// s-expression syntax: (app (idx s) (const {})), (var x)

pub fn parse_wterm(text: &str) -> Result<WTerm, String> {
    let mut pos = 0;
    let t = parse_at(text.as_bytes(), &mut pos)?;
    skip_ws(text.as_bytes(), &mut pos);
    if pos != text.len() {
        return Err(format!("trailing input at byte {pos}"));
    }
    Ok(t)
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_at(b: &[u8], pos: &mut usize) -> Result<WTerm, String> {
    skip_ws(b, pos);
    if *pos >= b.len() || b[*pos] != b'(' {
        return Err(format!("expected '(' at byte {pos}", pos = *pos));
    }
    *pos += 1;
    skip_ws(b, pos);
    let start = *pos;
    while *pos < b.len() && b[*pos].is_ascii_alphabetic() {
        *pos += 1;
    }
    let head = std::str::from_utf8(&b[start..*pos]).unwrap();
    skip_ws(b, pos);
    let term = match head {
        "idx" => {
            let s = *pos;
            while *pos < b.len() && (b[*pos].is_ascii_alphanumeric()) {
                *pos += 1;
            }
            let name = std::str::from_utf8(&b[s..*pos]).unwrap();
            let idx = Index::from_name(name)
                .or_else(|| name.parse::<u32>().ok().and_then(Index::from_nat))
                .ok_or_else(|| format!("unknown index {name:?}"))?;
            WTerm::Idx(idx)
        }
        "var" => {
            let s = *pos;
            while *pos < b.len() && (b[*pos].is_ascii_alphanumeric() || b[*pos] == b'_') {
                *pos += 1;
            }
            WTerm::Var(std::str::from_utf8(&b[s..*pos]).unwrap().to_string())
        }
        "const" => {
            // balanced-brace scan, then the HF literal parser
            let s = *pos;
            let mut depth = 0i32;
            while *pos < b.len() {
                match b[*pos] {
                    b'{' | b'<' => depth += 1,
                    b'}' | b'>' => depth -= 1,
                    b')' if depth == 0 => break,
                    _ => {}
                }
                *pos += 1;
            }
            let lit = std::str::from_utf8(&b[s..*pos]).unwrap().trim();
            WTerm::Const(crate::hf::parse_hf(lit).map_err(|e| e.to_string())?)
        }
        "app" => {
            let f = parse_at(b, pos)?;
            let a = parse_at(b, pos)?;
            WTerm::app(f, a)
        }
        other => return Err(format!("unknown term head {other:?}")),
    };
    skip_ws(b, pos);
    if *pos >= b.len() || b[*pos] != b')' {
        return Err(format!("expected ')' at byte {pos}", pos = *pos));
    }
    *pos += 1;
    Ok(term)
}
