//! Batch front door: compile formulas to operation terms, evaluate them,
//! query the hierarchy, run Kripke/full-model scenarios, drive the VM and
//! realizability checkers, and emit machine-readable reports.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hfkit::compile::{compile_comprehension, compile_separation};
use hfkit::erec::{self, eval_closed_term, Index, Outcome};
use hfkit::formula::parse_formula;
use hfkit::hf::{parse_hf, HFSet};
use hfkit::hier::{self, Hierarchy};
use hfkit::kripke;
use hfkit::names::{self, build_universe, Names};
use hfkit::ops::{eval_term, parse_op_term, Budget, EvalError, OpTerm};
use hfkit::oracle::{self, Env};
use hfkit::realize::{self, Checker, Variant, Verdict};

const GRAMMAR_VERSION: u32 = 1;
const INDEX_TABLE_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "hfkit", version, about = "hereditarily finite set toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// cap on intermediate set sizes during term evaluation
    #[arg(long, global = true, default_value_t = 200_000)]
    budget_elems: usize,
    /// cap on term nesting depth during evaluation
    #[arg(long, global = true, default_value_t = 64)]
    budget_depth: u32,
    /// VM fuel for E-recursion and realizability
    #[arg(long, global = true, default_value_t = 100_000)]
    fuel: u64,
    /// seed for randomized corpus runs (echoed in the report)
    #[arg(long, global = true, default_value_t = 0xC0FFEE)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a formula into a fundamental-operation term
    Compile {
        #[arg(long)]
        formula: String,
        /// comma-separated comprehension variables x_1,..,x_n
        #[arg(long)]
        vars: String,
    },
    /// Build the separation term {x_i in a | formula}
    Sep {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        vars: String,
        /// which variable ranges over the separation domain
        #[arg(long)]
        var: String,
    },
    /// Evaluate an operation term s-expression
    EvalTerm {
        #[arg(long)]
        term: String,
        /// comma-separated bindings x={1},y=2
        #[arg(long, default_value = "")]
        env: String,
    },
    /// Classical truth of a formula
    Oracle {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "")]
        env: String,
        /// rank bound for unbounded quantifiers (omit to forbid them)
        #[arg(long)]
        universe_rank: Option<u32>,
    },
    /// Enumerate hierarchy stages and compute alpha* data
    Hier {
        /// highest stage to enumerate exactly (max 4)
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// also compute alpha* for this alpha
        #[arg(long)]
        alpha_star: Option<usize>,
    },
    /// Validate a Kripke model and force a formula at its nodes
    Kripke {
        /// model file (JSON); omit for the built-in two-node example
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        check: Option<String>,
        /// element assignment v=elem,... (element names from the model)
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Full-model scenarios over names
    Fullmodel {
        #[command(subcommand)]
        action: FmAction,
    },
    /// E-recursion VM
    Erec {
        #[command(subcommand)]
        action: ErecAction,
    },
    /// Realizability checking
    Realize {
        #[command(subcommand)]
        action: RealizeAction,
    },
    /// Run the condensed cross-module check battery
    Suite {
        /// include the slower hierarchy enumeration checks
        #[arg(long)]
        paper_checks: bool,
    },
}

#[derive(Subcommand)]
enum FmAction {
    /// Encode and decode a bit string on the two-node chain
    Delta {
        #[arg(long)]
        bits: String,
    },
    /// Name-universe sizes per node at a cutoff
    Universe {
        #[arg(long, default_value_t = 3)]
        cutoff: u32,
    },
    /// The non-LEM probe at the root of the two-node chain
    Probe,
}

#[derive(Subcommand)]
enum ErecAction {
    /// Evaluate a closed application term
    Run {
        /// term file (s-expression); use --expr for inline terms
        #[arg(long, conflicts_with = "expr")]
        term: Option<String>,
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        pmode: bool,
    },
    /// Print the index table
    Table,
}

#[derive(Subcommand)]
enum RealizeAction {
    /// Check one realizer against one formula
    Check {
        /// realizer as an HF literal
        #[arg(long)]
        realizer: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "wt")]
        variant: String,
        #[arg(long, default_value_t = 3)]
        search_rank: u32,
        #[arg(long, default_value = "")]
        env: String,
    },
    /// Truth audit over the stock corpus
    Audit {
        #[arg(long, default_value_t = 2)]
        search_rank: u32,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Budget(String, Value),
}

fn parse_env(text: &str) -> Result<Env, CliError> {
    let mut env = Env::new();
    if text.trim().is_empty() {
        return Ok(env);
    }
    // split on commas at brace depth 0 so HF literals survive
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = text.as_bytes();
    let mut parts = Vec::new();
    for (i, b) in bytes.iter().enumerate() {
        match b {
            b'{' | b'<' => depth += 1,
            b'}' | b'>' => depth -= 1,
            b',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bad binding {part:?}")))?;
        let set = parse_hf(v.trim()).map_err(|e| CliError::Usage(e.to_string()))?;
        env.push((k.trim().to_string(), set));
    }
    Ok(env)
}

fn split_vars(vars: &str) -> Vec<String> {
    vars.split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn run(cli: &Cli) -> Result<Value, CliError> {
    let budget = Budget {
        elems: cli.budget_elems,
        depth: cli.budget_depth,
    };
    match &cli.cmd {
        Cmd::Compile { formula, vars } => {
            let f = parse_formula(formula).map_err(usage)?;
            let names = split_vars(vars);
            let ctx: Vec<(String, OpTerm)> = names
                .iter()
                .map(|v| (v.clone(), OpTerm::var(&format!("A_{v}"))))
                .collect();
            let term = compile_comprehension(&f, &ctx).map_err(usage)?;
            Ok(json!({
                "formula": f.to_string(),
                "vars": names,
                "domain_vars": ctx.iter().map(|(_, t)| t.to_string()).collect::<Vec<_>>(),
                "term": term.to_string(),
                "depth": term.depth(),
                "size": term.size(),
            }))
        }
        Cmd::Sep { formula, vars, var } => {
            let f = parse_formula(formula).map_err(usage)?;
            let sep = compile_separation(&f, &split_vars(vars), var).map_err(usage)?;
            Ok(json!({
                "formula": f.to_string(),
                "var": var,
                "domain_var": sep.domain_var,
                "params": sep.params,
                "term": sep.term.to_string(),
                "stage_bound": sep.stage_bound,
            }))
        }
        Cmd::EvalTerm { term, env } => {
            let t = parse_op_term(term).map_err(usage)?;
            let e = parse_env(env)?;
            match eval_term(&t, &e, budget) {
                Ok(v) => Ok(json!({ "value": v.to_string(), "rank": v.rank() })),
                Err(EvalError::Budget(what)) => Err(CliError::Budget(
                    what.to_string(),
                    json!({ "term": t.to_string() }),
                )),
                Err(other) => Err(usage(other)),
            }
        }
        Cmd::Oracle {
            formula,
            env,
            universe_rank,
        } => {
            let f = parse_formula(formula).map_err(usage)?;
            let mut e = parse_env(env)?;
            let uni = universe_rank.map(realize::rank_universe);
            let truth = oracle::eval_formula(&f, &mut e, uni.as_deref()).map_err(usage)?;
            Ok(json!({
                "formula": f.to_string(),
                "class": format!("{:?}", f.classify()),
                "truth": truth,
                "universe_rank": universe_rank,
            }))
        }
        Cmd::Hier { levels, alpha_star } => {
            if *levels > 4 {
                return Err(CliError::Usage("levels beyond 4 are infeasible".into()));
            }
            let mut h = Hierarchy::new();
            let sizes: Vec<usize> = (0..=*levels).map(|a| h.level(a).len()).collect();
            let mut out = json!({
                "level_sizes": sizes,
                "chains": (0..=8u32).map(|n| {
                    let (d, s) = hier::numeral_stage_bounds(n);
                    json!({ "n": n, "display_stage": d, "strict_stage": s })
                }).collect::<Vec<_>>(),
            });
            if let Some(a) = alpha_star {
                if *a > 3 {
                    return Err(CliError::Usage("alpha* beyond 3 is infeasible".into()));
                }
                let star = hier::alpha_star(*a, &mut h, 3);
                out["alpha_star"] = json!({
                    "alpha": a,
                    "set": star.set.to_string(),
                    "is_ordinal": star.is_ordinal,
                    "k": star.k,
                    "level_matches": star.level_of_star == h.level(*a),
                });
            }
            Ok(out)
        }
        Cmd::Kripke {
            model,
            check,
            assign,
        } => {
            let m = match model {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(path).map_err(usage)?;
                    let raw: kripke::ModelFile =
                        serde_json::from_str(&text).map_err(usage)?;
                    kripke::Model::from_file(&raw).map_err(usage)?
                }
                None => kripke::two_node_example(),
            };
            let violations: Vec<String> = match m.validate() {
                Ok(()) => Vec::new(),
                Err(kripke::KripkeError::Invalid(v)) => v,
                Err(other) => return Err(usage(other)),
            };
            let mut out = json!({
                "nodes": m.node_names,
                "violations": violations,
            });
            if let Some(text) = check {
                if !violations.is_empty() {
                    return Err(CliError::Usage("model is invalid; fix it first".into()));
                }
                let f = parse_formula(text).map_err(usage)?;
                let mut env: Vec<(String, usize)> = Vec::new();
                for part in assign.split(',').filter(|s| !s.trim().is_empty()) {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| CliError::Usage(format!("bad binding {part:?}")))?;
                    // the assignment names elements of the first node
                    let id = m.domains[0]
                        .iter()
                        .position(|e| e == v.trim())
                        .ok_or_else(|| CliError::Usage(format!("unknown element {v:?}")))?;
                    env.push((k.trim().to_string(), id));
                }
                let forced: Vec<Value> = (0..m.node_names.len())
                    .map(|p| {
                        // transport the root assignment up to p
                        let env_p: Vec<(String, usize)> = if p == 0 {
                            env.clone()
                        } else if m.frame.reach[0][p] {
                            let map = &m.trans[&(0, p)];
                            env.iter().map(|(k, a)| (k.clone(), map[*a])).collect()
                        } else {
                            return json!({ "node": m.node_names[p], "forced": Value::Null });
                        };
                        match m.forces(p, &f, &env_p) {
                            Ok(b) => json!({ "node": m.node_names[p], "forced": b }),
                            Err(e) => json!({ "node": m.node_names[p], "error": e.to_string() }),
                        }
                    })
                    .collect();
                out["check"] = json!({ "formula": f.to_string(), "results": forced });
            }
            Ok(out)
        }
        Cmd::Fullmodel { action } => fullmodel(action),
        Cmd::Erec { action } => erec_cmd(action, cli.fuel),
        Cmd::Realize { action } => realize_cmd(action, cli.fuel),
        Cmd::Suite { paper_checks } => suite(cli, *paper_checks),
    }
}

fn two_chain() -> kripke::Frame {
    kripke::Frame {
        reach: vec![vec![true, true], vec![false, true]],
    }
}

fn fullmodel(action: &FmAction) -> Result<Value, CliError> {
    match action {
        FmAction::Delta { bits } => {
            let parsed: Vec<bool> = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(CliError::Usage(format!("bad bit {other:?}"))),
                })
                .collect::<Result<_, _>>()?;
            if parsed.len() > 8 {
                return Err(CliError::Usage("bit strings longer than 8 explode".into()));
            }
            let mut names = Names::new(two_chain());
            let delta = names::delta_encode(&mut names, 0, 1, &parsed);
            let decoded = names::delta_decode(&mut names, 0, 1, delta, parsed.len());
            let rendered: String = decoded.iter().map(|b| if *b { '1' } else { '0' }).collect();
            Ok(json!({
                "bits": bits,
                "decoded": rendered,
                "round_trip": decoded == parsed,
                "delta_stage": names.stage(delta),
            }))
        }
        FmAction::Universe { cutoff } => {
            if *cutoff > 4 {
                return Err(CliError::Usage("cutoffs beyond 4 explode".into()));
            }
            let mut names = Names::new(two_chain());
            let uni = build_universe(&mut names, *cutoff);
            Ok(json!({
                "cutoff": cutoff,
                "sizes": uni.iter().map(|u| u.len()).collect::<Vec<_>>(),
            }))
        }
        FmAction::Probe => {
            let mut names = Names::new(two_chain());
            let one_a = names.one_p(0, 1);
            let probe = names.name_succ(one_a).map_err(usage)?;
            let mut f = names::Forcing {
                universe: &[],
                names: &mut names,
            };
            let inf = parse_formula("0 in s").map_err(usage)?;
            let neg = parse_formula("~(0 in s)").map_err(usage)?;
            let env = vec![("s".to_string(), probe)];
            Ok(json!({
                "formula": "0 in (1_a + 1)",
                "root_forces": f.forces(0, &inf, &env).map_err(usage)?,
                "root_forces_negation": f.forces(0, &neg, &env).map_err(usage)?,
                "top_forces": f.forces(1, &inf, &env).map_err(usage)?,
            }))
        }
    }
}

fn erec_cmd(action: &ErecAction, fuel: u64) -> Result<Value, CliError> {
    match action {
        ErecAction::Run { term, expr, pmode } => {
            let text = match (term, expr) {
                (Some(path), None) => {
                    let mut s = String::new();
                    std::fs::File::open(path)
                        .and_then(|mut f| f.read_to_string(&mut s))
                        .map_err(usage)?;
                    s
                }
                (None, Some(e)) => e.clone(),
                _ => return Err(CliError::Usage("need exactly one of --term/--expr".into())),
            };
            let t = erec::parse_wterm(text.trim()).map_err(CliError::Usage)?;
            if !t.is_closed() {
                return Err(CliError::Usage("term is not closed".into()));
            }
            let outcome = eval_closed_term(&t, fuel, *pmode);
            Ok(json!({
                "term": t.to_string(),
                "fuel": fuel,
                "pmode": pmode,
                "outcome": outcome_json(&outcome),
            }))
        }
        ErecAction::Table => Ok(json!({
            "version": INDEX_TABLE_VERSION,
            "indices": erec::INDICES
                .iter()
                .map(|i| json!({ "name": i.name(), "numeral": *i as u32, "arity": i.arity() }))
                .collect::<Vec<_>>(),
        })),
    }
}

fn outcome_json(o: &Outcome) -> Value {
    match o {
        Outcome::Value(v) => json!({ "kind": "value", "value": v.to_string() }),
        Outcome::Timeout(spent) => json!({ "kind": "timeout", "fuel_spent": spent }),
        Outcome::NonFinitary => json!({ "kind": "non-finitary" }),
        Outcome::ApplyError(d) => json!({ "kind": "apply-error", "detail": d }),
    }
}

fn verdict_json(v: Verdict) -> Value {
    match v {
        Verdict::Realized => json!("realized"),
        Verdict::NotRealized => json!("not-realized"),
        Verdict::Unknown(realize::Reason::Fuel) => json!("unknown(fuel)"),
        Verdict::Unknown(realize::Reason::SearchBound) => json!("unknown(search-bound)"),
    }
}

fn realize_cmd(action: &RealizeAction, fuel: u64) -> Result<Value, CliError> {
    match action {
        RealizeAction::Check {
            realizer,
            formula,
            variant,
            search_rank,
            env,
        } => {
            let a = parse_hf(realizer).map_err(usage)?;
            let f = parse_formula(formula).map_err(usage)?;
            let e = parse_env(env)?;
            let v = match variant.as_str() {
                "wt" => Variant::Wt,
                "w" => Variant::W,
                "wp" => Variant::Wp,
                other => return Err(CliError::Usage(format!("unknown variant {other:?}"))),
            };
            if *search_rank > 3 {
                return Err(CliError::Usage("search ranks beyond 3 explode".into()));
            }
            let uni = realize::rank_universe(*search_rank);
            let checker = Checker {
                variant: v,
                fuel,
                search: &uni,
            };
            let verdict = checker.check(a, &f, &e).map_err(usage)?;
            Ok(json!({
                "realizer": a.to_string(),
                "formula": f.to_string(),
                "variant": variant,
                "search_rank": search_rank,
                "search_size": uni.len(),
                "verdict": verdict_json(verdict),
                "note": "unbounded clauses are checked over the search universe only",
            }))
        }
        RealizeAction::Audit { search_rank } => {
            let uni = realize::rank_universe(*search_rank);
            let checker = Checker {
                variant: Variant::Wt,
                fuel,
                search: &uni,
            };
            let corpus = realize::stock_corpus();
            let report = realize::truth_audit(&corpus, |a, f, env| {
                checker.check(a, f, env).expect("corpus is supported")
            });
            Ok(json!({
                "triples": corpus.len(),
                "violations": report.violations,
                "entries": report.entries.iter().map(|e| json!({
                    "formula": e.formula,
                    "verdict": verdict_json(e.verdict),
                    "truth": e.truth,
                    "violation": e.violation,
                })).collect::<Vec<_>>(),
            }))
        }
    }
}

fn suite(cli: &Cli, paper_checks: bool) -> Result<Value, CliError> {
    let mut items: Vec<(String, bool, String)> = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| {
        items.push((name.to_string(), ok, detail));
    };

    // compiler vs oracle on a few shapes
    {
        let budget = Budget::default();
        let f = parse_formula("x1 in x2 & ~(x1 = x2)").map_err(usage)?;
        let ctx = vec![
            ("x1".to_string(), OpTerm::var("A1")),
            ("x2".to_string(), OpTerm::var("A2")),
        ];
        let term = compile_comprehension(&f, &ctx).map_err(usage)?;
        let (a1, a2) = (HFSet::nat(3), HFSet::nat(4));
        let env = vec![("A1".to_string(), a1), ("A2".to_string(), a2)];
        let got = eval_term(&term, &env, budget).map_err(usage)?;
        let want = oracle::comprehension(
            &f,
            &[("x1".to_string(), a1), ("x2".to_string(), a2)],
            &Env::new(),
            None,
        )
        .map_err(usage)?;
        check("compile-matches-oracle", got == want, format!("{got}"));
    }
    // hierarchy basics
    {
        let mut h = Hierarchy::new();
        let top = if paper_checks { 4 } else { 3 };
        let mut ok = true;
        for a in 0..top {
            let (lo, hi) = (h.level(a), h.level(a + 1));
            ok &= hi.contains(lo) && lo.is_subset(hi);
        }
        check("hierarchy-monotone", ok, format!("levels through {top}"));
        let star = hier::alpha_star(2, &mut h, 3);
        check(
            "alpha-star-2",
            star.level_of_star == h.level(2),
            star.set.to_string(),
        );
    }
    // Kripke counterexample
    {
        let m = kripke::two_node_example();
        let env = vec![("a".to_string(), 0usize), ("b".to_string(), 1usize)];
        let lem = parse_formula("a = b | ~(a = b)").map_err(usage)?;
        let nn = parse_formula("~(~(a = b))").map_err(usage)?;
        let ok = m.validate().is_ok()
            && !m.forces(0, &lem, &env).map_err(usage)?
            && m.forces(0, &nn, &env).map_err(usage)?;
        check("kripke-counterexample", ok, "two-node chain".into());
    }
    // delta round trip
    {
        let mut names = Names::new(two_chain());
        let bits = [true, false, true, true];
        let delta = names::delta_encode(&mut names, 0, 1, &bits);
        let back = names::delta_decode(&mut names, 0, 1, delta, bits.len());
        check("delta-round-trip", back == bits, "1011".into());
    }
    // VM identity
    {
        let term = erec::WTerm::app(
            erec::WTerm::app(
                erec::WTerm::app(erec::WTerm::Idx(Index::S), erec::WTerm::Idx(Index::K)),
                erec::WTerm::Idx(Index::K),
            ),
            erec::WTerm::Const(HFSet::nat(3)),
        );
        let out = eval_closed_term(&term, cli.fuel, false);
        check(
            "vm-skk-identity",
            out.value() == Some(HFSet::nat(3)),
            format!("{out:?}"),
        );
    }
    // realizability audit
    {
        let uni = realize::rank_universe(2);
        let checker = Checker {
            variant: Variant::Wt,
            fuel: cli.fuel,
            search: &uni,
        };
        let corpus = realize::stock_corpus();
        let report = realize::truth_audit(&corpus, |a, f, env| {
            checker.check(a, f, env).expect("supported")
        });
        check(
            "realizability-audit",
            report.violations == 0,
            format!("{} triples", corpus.len()),
        );
    }

    let failed: Vec<&(String, bool, String)> = items.iter().filter(|(_, ok, _)| !ok).collect();
    Ok(json!({
        "paper_checks": paper_checks,
        "items": items.iter().map(|(n, ok, d)| json!({
            "name": n, "pass": ok, "detail": d,
        })).collect::<Vec<_>>(),
        "failures": failed.len(),
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    let result = run(&cli);
    let (payload, code) = match result {
        Ok(v) => {
            let failures = v.get("failures").and_then(Value::as_u64).unwrap_or(0);
            let violations = v
                .get("violations")
                .map(|x| match x {
                    Value::Array(a) => a.len() as u64,
                    Value::Number(n) => n.as_u64().unwrap_or(0),
                    _ => 0,
                })
                .unwrap_or(0);
            let code: u8 = if failures + violations > 0 { 1 } else { 0 };
            (v, code)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Budget(what, partial)) => {
            let report = json!({
                "error": "budget exceeded",
                "what": what,
                "partial": partial,
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            eprintln!("budget exceeded: {what}");
            return ExitCode::from(3);
        }
    };
    let report = json!({
        "command": std::env::args().skip(1).collect::<Vec<_>>(),
        "seed": cli.seed,
        "budgets": { "elems": cli.budget_elems, "depth": cli.budget_depth, "fuel": cli.fuel },
        "versions": { "grammar": GRAMMAR_VERSION, "index_table": INDEX_TABLE_VERSION },
        "results": payload,
    });
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Text => println!("{}", report["results"]),
    }
    eprintln!(
        "done in {:.2?}; seed {}; exit {}",
        started.elapsed(),
        cli.seed,
        code
    );
    ExitCode::from(code)
}
