//! Running the calculi: strategy-driven normalization with recorded
//! traces, exhaustive reduction graphs up to α-equivalence, confluence /
//! subject-reduction / simulation verdicts, and a seeded generator of
//! well-typed sequents for property sweeps.
//!
//! Reduction here is untyped — only [`check_subject_reduction`] starts
//! from a typed statement. Graphs identify nodes by canonical α-keys, so
//! reports do not depend on which fresh names a particular run minted;
//! normal forms are listed in canonical order and witnesses replay the
//! recorded spanning-tree route, which keeps every reported trace
//! checkable step by step.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::calc_lmmt::{redexes_lmmt, step_lmmt, Fragment};
use crate::calc_lmmt_vn::{redexes_vn, step_vn};
use crate::calc_monadic::{
    redexes_ivc, redexes_lmM, redexes_stlc, redexes_vc, step_ivc, step_lmM, step_stlc, step_vc,
};
use crate::rules::{Redex, RuleId, StepError};
use crate::syntax::{
    alpha_key, fill, print_expr, Binder, Calculus, Class, Expr, Mode, Name, Namespace, Path,
    Session, TypeExpr,
};
use crate::translate::{cm, mtr, TranslateError};
use crate::typing::{check_sequent, infer_type, Sequent, TypeError};

/// Default depth bound for simulation searches.
pub const DEFAULT_FUEL: usize = 50;

/// Default size bound for reduction graphs and simulation searches.
pub const DEFAULT_NODE_BOUND: usize = 10_000;

const GEN_GRAMMAR: &str = "generated shapes stay inside the grammar";

// ---------------------------------------------------------------------
// Rule sets
// ---------------------------------------------------------------------

/// A calculus together with the options that select its rule set: the
/// fragment (meaningful for the unmoded sequent calculus) and the
/// restricted-β variant (meaningful for the monadic λμ). One value of
/// this type fixes both redex search and the firing of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub calculus: Calculus,
    pub fragment: Fragment,
    pub restricted: bool,
}

impl RuleSet {
    /// The full rule set of a calculus (no fragment restriction, plain β
    /// for the monadic λμ).
    pub fn full(calculus: Calculus) -> RuleSet {
        RuleSet { calculus, fragment: Fragment::Full, restricted: false }
    }

    /// The unmoded sequent calculus under a chosen fragment.
    pub fn lmmt(fragment: Fragment) -> RuleSet {
        RuleSet { calculus: Calculus::Lmmt, fragment, restricted: false }
    }

    /// The monadic λμ, optionally with the restricted β that expands an
    /// application into a bind instead of substituting.
    pub fn monadic(restricted: bool) -> RuleSet {
        RuleSet { calculus: Calculus::LmM, fragment: Fragment::Full, restricted }
    }

    /// All redexes of `e` under this rule set, in preorder.
    pub fn redexes(&self, e: &Expr) -> Result<Vec<Redex>, StepError> {
        match self.calculus {
            Calculus::Lmmt => redexes_lmmt(e, self.fragment),
            Calculus::LmmtVn => redexes_vn(e),
            Calculus::LmM => redexes_lmM(e, self.restricted),
            Calculus::Vc => redexes_vc(e),
            Calculus::Ivc => redexes_ivc(e),
            Calculus::Stlc => redexes_stlc(e),
        }
    }

    /// Fire one redex. The session supplies fresh names for the rules
    /// that mint a co-variable on the right-hand side.
    pub fn step(&self, e: &Expr, at: &Redex, session: &mut Session) -> Result<Expr, StepError> {
        match self.calculus {
            Calculus::Lmmt => step_lmmt(e, at),
            Calculus::LmmtVn => step_vn(e, at),
            Calculus::LmM => step_lmM(e, at, self.restricted, session),
            Calculus::Vc => step_vc(e, at, session),
            Calculus::Ivc => step_ivc(e, at),
            Calculus::Stlc => step_stlc(e, at),
        }
    }
}

// ---------------------------------------------------------------------
// Strategies, traces, normalization
// ---------------------------------------------------------------------

/// How [`normalize`] picks among the available redexes. The outermost and
/// innermost strategies order redexes by root-to-redex path (ties broken
/// by rule); the random strategy draws uniformly from a seeded generator,
/// so a trace is reproducible from its seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
    Random(u64),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::LeftmostOutermost => write!(f, "leftmost-outermost"),
            Strategy::RightmostInnermost => write!(f, "rightmost-innermost"),
            Strategy::Random(seed) => write!(f, "random({seed})"),
        }
    }
}

/// One fired step: the rule, where it fired, and the whole expression
/// afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: RuleId,
    pub path: Path,
    pub result: Expr,
}

/// A reduction sequence from a starting expression. `exhausted` records
/// that the fuel ran out while redexes remained, so the last result need
/// not be a normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub calculus: Calculus,
    pub start: Expr,
    pub steps: Vec<ReductionStep>,
    pub exhausted: bool,
}

impl Trace {
    /// The last expression of the trace (the start if no step fired).
    pub fn end(&self) -> &Expr {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "calculus": self.calculus.id(),
            "start": print_expr(&self.start),
            "steps": self.steps.iter().map(|s| json!({
                "rule": s.rule.name(),
                "path": s.path,
                "result": print_expr(&s.result),
            })).collect::<Vec<_>>(),
        })
    }

    /// Multi-line rendering with one `--rule @ path-->` arrow per step.
    pub fn render(&self) -> String {
        let mut out = print_expr(&self.start);
        for s in &self.steps {
            out.push_str(&format!(
                "\n  --{} @ {:?}--> {}",
                s.rule.name(),
                s.path,
                print_expr(&s.result)
            ));
        }
        if self.exhausted {
            out.push_str("\n  (fuel ran out before a normal form)");
        }
        out
    }
}

fn leftmost(candidates: &[Redex]) -> Redex {
    candidates
        .iter()
        .min_by_key(|(r, p)| (p.clone(), *r))
        .expect("picking only happens among at least one redex")
        .clone()
}

fn rightmost_innermost(candidates: &[Redex]) -> Redex {
    candidates
        .iter()
        .max_by_key(|(r, p)| (p.clone(), *r))
        .expect("picking only happens among at least one redex")
        .clone()
}

/// Reduce `start` under `strategy` until a normal form or until `fuel`
/// steps have fired. Running out of fuel is a result, not an error: the
/// trace comes back with `exhausted` set.
pub fn normalize(
    rules: &RuleSet,
    start: &Expr,
    strategy: Strategy,
    fuel: usize,
) -> Result<Trace, StepError> {
    let mut session = Session::new();
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut current = start.clone();
    let mut steps = Vec::new();
    let mut exhausted = false;
    loop {
        let candidates = rules.redexes(&current)?;
        if candidates.is_empty() {
            break;
        }
        if steps.len() == fuel {
            exhausted = true;
            break;
        }
        let at = match (strategy, &mut rng) {
            (Strategy::LeftmostOutermost, _) => leftmost(&candidates),
            (Strategy::RightmostInnermost, _) => rightmost_innermost(&candidates),
            (Strategy::Random(_), Some(rng)) => {
                candidates[rng.gen_range(0..candidates.len())].clone()
            }
            (Strategy::Random(_), None) => unreachable!("the generator exists for random picks"),
        };
        let next = rules.step(&current, &at, &mut session)?;
        steps.push(ReductionStep { rule: at.0, path: at.1, result: next.clone() });
        current = next;
    }
    Ok(Trace { calculus: rules.calculus, start: start.clone(), steps, exhausted })
}

// ---------------------------------------------------------------------
// Reduction graphs
// ---------------------------------------------------------------------

/// A labeled edge between graph nodes: firing `rule` at `path` in node
/// `from` yields (an α-variant of) node `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub from: usize,
    pub rule: RuleId,
    pub path: Path,
    pub to: usize,
}

/// The reduction graph reachable from one expression, with nodes merged
/// up to α-equivalence. Nodes are stored in discovery order (the start is
/// node 0); `normal_forms` lists redex-free nodes sorted by canonical
/// form; `exhausted` means the node bound cut exploration short, in which
/// case reachability and normality information is partial.
#[derive(Debug, Clone)]
pub struct GraphReport {
    pub calculus: Calculus,
    pub nodes: Vec<Expr>,
    pub edges: Vec<GraphEdge>,
    pub normal_forms: Vec<usize>,
    pub exhausted: bool,
    parents: Vec<Option<(usize, RuleId, Path)>>,
}

impl GraphReport {
    /// Replay the spanning-tree route from the start to `target`,
    /// producing a trace whose steps fire exactly as recorded.
    pub fn trace_to(&self, rules: &RuleSet, target: usize) -> Trace {
        replay_route(rules, &self.nodes[0], &self.parents, target)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "calculus": self.calculus.id(),
            "start": print_expr(&self.nodes[0]),
            "nodes": self.nodes.iter().map(|n| print_expr(n)).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "from": e.from,
                "rule": e.rule.name(),
                "path": e.path,
                "to": e.to,
            })).collect::<Vec<_>>(),
            "normal_forms": self.normal_forms,
            "exhausted": self.exhausted,
        })
    }
}

fn replay_route(
    rules: &RuleSet,
    start: &Expr,
    parents: &[Option<(usize, RuleId, Path)>],
    target: usize,
) -> Trace {
    let mut route = Vec::new();
    let mut i = target;
    while let Some((p, rule, path)) = &parents[i] {
        route.push((*rule, path.clone()));
        i = *p;
    }
    route.reverse();
    let mut session = Session::new();
    let mut current = start.clone();
    let mut steps = Vec::new();
    for (rule, path) in route {
        let next = rules
            .step(&current, &(rule, path.clone()), &mut session)
            .expect("a recorded edge replays on any α-variant");
        steps.push(ReductionStep { rule, path, result: next.clone() });
        current = next;
    }
    Trace { calculus: rules.calculus, start: start.clone(), steps, exhausted: false }
}

/// Breadth-first closure of `start` under the rule set, merging nodes up
/// to α-equivalence. Exploration stops — with `exhausted` set — as soon
/// as a new node would exceed `node_bound`.
pub fn reduction_graph(
    rules: &RuleSet,
    start: &Expr,
    node_bound: usize,
) -> Result<GraphReport, StepError> {
    let mut session = Session::new();
    let mut nodes = vec![start.clone()];
    let mut parents: Vec<Option<(usize, RuleId, Path)>> = vec![None];
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    seen.insert(alpha_key(start), 0);
    let mut edges = Vec::new();
    let mut normal_forms = Vec::new();
    let mut exhausted = false;
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    'bfs: while let Some(i) = queue.pop_front() {
        let candidates = rules.redexes(&nodes[i])?;
        if candidates.is_empty() {
            normal_forms.push(i);
            continue;
        }
        for at in candidates {
            let succ = rules.step(&nodes[i], &at, &mut session)?;
            let key = alpha_key(&succ);
            let j = match seen.get(&key) {
                Some(&j) => j,
                None => {
                    if nodes.len() == node_bound {
                        exhausted = true;
                        break 'bfs;
                    }
                    let j = nodes.len();
                    nodes.push(succ);
                    parents.push(Some((i, at.0, at.1.clone())));
                    seen.insert(key, j);
                    queue.push_back(j);
                    j
                }
            };
            edges.push(GraphEdge { from: i, rule: at.0, path: at.1, to: j });
        }
    }
    normal_forms.sort_by(|&a, &b| alpha_key(&nodes[a]).cmp(&alpha_key(&nodes[b])));
    Ok(GraphReport { calculus: rules.calculus, nodes, edges, normal_forms, exhausted, parents })
}

// ---------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Confluent,
    NonConfluent,
    SimulationOk,
    SimulationFail,
    SrOk,
    SrFail,
    Inconclusive,
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::Confluent => "confluent",
            VerdictKind::NonConfluent => "non-confluent",
            VerdictKind::SimulationOk => "simulation-ok",
            VerdictKind::SimulationFail => "simulation-fail",
            VerdictKind::SrOk => "sr-ok",
            VerdictKind::SrFail => "sr-fail",
            VerdictKind::Inconclusive => "inconclusive",
        }
    }

    /// Whether this verdict counts as a success (drives the CLI exit
    /// code; inconclusive does not count).
    pub fn is_ok(self) -> bool {
        matches!(self, VerdictKind::Confluent | VerdictKind::SimulationOk | VerdictKind::SrOk)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The outcome of one of the checks, with traces backing it up: two
/// diverging traces for non-confluence, the rejoining reduction for a
/// successful simulation, the breaking reduction for a subject-reduction
/// failure.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub note: String,
    pub witnesses: Vec<Trace>,
}

impl Verdict {
    fn new(kind: VerdictKind, note: impl Into<String>) -> Verdict {
        Verdict { kind, note: note.into(), witnesses: Vec::new() }
    }

    fn with(kind: VerdictKind, note: impl Into<String>, witnesses: Vec<Trace>) -> Verdict {
        Verdict { kind, note: note.into(), witnesses }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "note": self.note,
            "witnesses": self.witnesses.iter().map(Trace::to_json).collect::<Vec<_>>(),
        })
    }
}

// ---------------------------------------------------------------------
// Confluence
// ---------------------------------------------------------------------

/// Decide confluence of `start` by exhaustive search: confluent when the
/// closed graph has exactly one normal form, non-confluent with two
/// diverging witness traces when it has more. A graph cut short by the
/// node bound — or a closed graph with no normal form at all — is
/// inconclusive.
pub fn check_confluence(
    rules: &RuleSet,
    start: &Expr,
    node_bound: usize,
) -> Result<Verdict, StepError> {
    let graph = reduction_graph(rules, start, node_bound)?;
    if graph.exhausted {
        return Ok(Verdict::new(
            VerdictKind::Inconclusive,
            format!("node bound {node_bound} hit before the reduction graph closed"),
        ));
    }
    match graph.normal_forms.len() {
        0 => Ok(Verdict::new(
            VerdictKind::Inconclusive,
            format!(
                "the graph closed on {} nodes with no normal form (every node reduces)",
                graph.nodes.len()
            ),
        )),
        1 => {
            let nf = graph.normal_forms[0];
            Ok(Verdict::with(
                VerdictKind::Confluent,
                format!(
                    "{} nodes, {} edges, unique normal form {}",
                    graph.nodes.len(),
                    graph.edges.len(),
                    print_expr(&graph.nodes[nf])
                ),
                vec![graph.trace_to(rules, nf)],
            ))
        }
        n => {
            let first = graph.normal_forms[0];
            let second = graph.normal_forms[1];
            Ok(Verdict::with(
                VerdictKind::NonConfluent,
                format!(
                    "{n} distinct normal forms, e.g. {} and {}",
                    print_expr(&graph.nodes[first]),
                    print_expr(&graph.nodes[second])
                ),
                vec![graph.trace_to(rules, first), graph.trace_to(rules, second)],
            ))
        }
    }
}

// ---------------------------------------------------------------------
// Subject reduction
// ---------------------------------------------------------------------

/// Check that every reduct of a well-typed statement keeps its type:
/// close the subject under reduction and re-check each reachable
/// expression against the original contexts and stated type. A statement
/// that does not typecheck to begin with is an error, not a verdict; a
/// graph cut short by the node bound downgrades a clean sweep to
/// inconclusive.
pub fn check_subject_reduction(
    rules: &RuleSet,
    seq: &Sequent,
    node_bound: usize,
) -> Result<Verdict, TypeError> {
    if seq.subject.calculus != rules.calculus {
        return Err(TypeError::WrongCalculus {
            expected: rules.calculus,
            found: seq.subject.calculus,
        });
    }
    let (ty, _) = infer_type(seq, rules.restricted)?;
    let mut pinned = seq.clone();
    if pinned.stated.is_none() {
        // Pin the inferred type so every reduct is checked against it
        // rather than just inferring some type of its own.
        pinned.stated = ty;
    }
    let graph = reduction_graph(rules, &seq.subject, node_bound)
        .expect("the calculus of the subject was checked above");
    for (i, node) in graph.nodes.iter().enumerate() {
        if i == 0 {
            continue;
        }
        if let Err(err) = check_sequent(&pinned.with_subject(node.clone()), rules.restricted) {
            let witness = graph.trace_to(rules, i);
            let last = witness.steps.last().expect("a non-start node has a parent step");
            return Ok(Verdict::with(
                VerdictKind::SrFail,
                format!("{} @ {:?} broke the statement: {err}", last.rule.name(), last.path),
                vec![witness],
            ));
        }
    }
    if graph.exhausted {
        return Ok(Verdict::new(
            VerdictKind::Inconclusive,
            format!(
                "no failure among the {} expressions explored before the node bound",
                graph.nodes.len()
            ),
        ));
    }
    Ok(Verdict::new(
        VerdictKind::SrOk,
        format!("all {} reachable expressions keep the statement", graph.nodes.len()),
    ))
}

// ---------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------

/// Which translation a simulation check runs through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationKind {
    /// Moded sequent calculus → monadic value/computation calculus.
    Mtr,
    /// Monadic value/computation calculus → value-restricted λ.
    Cm,
    /// The composition of the two.
    Cps,
}

impl TranslationKind {
    pub fn name(self) -> &'static str {
        match self {
            TranslationKind::Mtr => "mtr",
            TranslationKind::Cm => "cm",
            TranslationKind::Cps => "cps",
        }
    }

    pub fn source(self) -> Calculus {
        match self {
            TranslationKind::Mtr | TranslationKind::Cps => Calculus::LmmtVn,
            TranslationKind::Cm => Calculus::Vc,
        }
    }

    pub fn target(self) -> Calculus {
        match self {
            TranslationKind::Mtr => Calculus::Vc,
            TranslationKind::Cm | TranslationKind::Cps => Calculus::Stlc,
        }
    }
}

impl fmt::Display for TranslationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TranslationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<TranslationKind, String> {
        match s {
            "mtr" => Ok(TranslationKind::Mtr),
            "cm" => Ok(TranslationKind::Cm),
            "cps" => Ok(TranslationKind::Cps),
            _ => Err(format!("unknown translation {s:?} (expected mtr, cm, or cps)")),
        }
    }
}

/// Canonical form for matching simulation endpoints: the α-key, except
/// that when `ns_blind` is set (the λ target, where namespaces are
/// decoration carried over from the source rather than grammar) bound
/// names are identified across namespaces. Free names stay verbatim.
fn sim_key(e: &Expr, ns_blind: bool) -> String {
    use crate::syntax::Node;

    if !ns_blind {
        return alpha_key(e);
    }

    fn name_ref(n: &Name, stack: &[Name], out: &mut String) {
        for (depth, bound) in stack.iter().rev().enumerate() {
            if bound == n {
                out.push('!');
                out.push_str(&depth.to_string());
                return;
            }
        }
        out.push('?');
        out.push_str(&n.to_string());
    }

    fn go(e: &Expr, stack: &mut Vec<Name>, out: &mut String) {
        match &e.node {
            Node::Var(n) => {
                out.push('v');
                name_ref(n, stack, out);
            }
            Node::CoVar(n) => {
                out.push('c');
                name_ref(n, stack, out);
            }
            Node::Hole => out.push('_'),
            Node::Lam(b, body) | Node::Mu(b, body) | Node::MuTilde(b, body) => {
                out.push(match &e.node {
                    Node::Lam(..) => 'L',
                    Node::Mu(..) => 'M',
                    _ => 'T',
                });
                out.push('.');
                stack.push(b.name.clone());
                go(body, stack, out);
                stack.pop();
            }
            Node::Command(l, r) | Node::Cons(_, l, r) | Node::App(l, r) => {
                out.push(match &e.node {
                    Node::Command(..) => 'K',
                    Node::Cons(..) => 'S',
                    _ => 'A',
                });
                if let Node::Cons(Some(m), ..) = &e.node {
                    out.push_str(m.suffix());
                }
                go(l, stack, out);
                out.push(',');
                go(r, stack, out);
            }
            Node::Ret(t) => {
                out.push('R');
                go(t, stack, out);
            }
            Node::CoApp(a, t) => {
                out.push('P');
                name_ref(a, stack, out);
                out.push(' ');
                go(t, stack, out);
            }
            Node::Let(p, b, c) | Node::Sub(p, b, c) | Node::Bind(p, b, c) => {
                out.push(match &e.node {
                    Node::Let(..) => 'l',
                    Node::Sub(..) => 's',
                    _ => 'b',
                });
                out.push('.');
                go(p, stack, out);
                out.push(';');
                stack.push(b.name.clone());
                go(c, stack, out);
                stack.pop();
            }
        }
    }

    let mut out = String::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

/// Translate the two ends of a source step. Co-term sources translate to
/// contexts; both are plugged with one shared fresh computation variable
/// so they reduce as commands, and the composed translation then takes
/// the plugged forms onward.
fn translate_pair(
    start: &Expr,
    end: &Expr,
    kind: TranslationKind,
    session: &mut Session,
) -> Result<(Expr, Expr), TranslateError> {
    match kind {
        TranslationKind::Cm => Ok((cm(start, session)?.result, cm(end, session)?.result)),
        TranslationKind::Mtr | TranslationKind::Cps => {
            let mut before = mtr(start, session)?.result;
            let mut after = mtr(end, session)?.result;
            if before.class() == Class::Context {
                let filler = shared_filler(session, &before, &after);
                let filler = Expr::var(Calculus::Vc, filler)
                    .expect("a computation variable is grammatical");
                before = fill(&before, &filler)
                    .expect("co-term images accept a computation in their hole");
                after = fill(&after, &filler)
                    .expect("co-term images accept a computation in their hole");
            }
            if kind == TranslationKind::Cps {
                before = cm(&before, session)?.result;
                after = cm(&after, session)?.result;
            }
            Ok((before, after))
        }
    }
}

fn shared_filler(session: &mut Session, a: &Expr, b: &Expr) -> Name {
    let taken = a
        .all_names()
        .into_iter()
        .chain(b.all_names())
        .filter(|n| n.ns == Namespace::Comp && n.base == "p")
        .map(|n| n.index);
    let index = session.fresh_index(Namespace::Comp, "p", taken);
    Name::comp("p").with_index(index)
}

/// Check that a single source step is simulated through a translation:
/// the image of the start must reduce, in at least one and at most `fuel`
/// steps, to the image of the result (up to α). The search is
/// breadth-first over the target graph; running into the fuel or node
/// bound with unexplored expressions left is inconclusive, while
/// exhausting the whole reachable graph without a rejoin is a failure.
pub fn check_simulation(
    source: &Trace,
    kind: TranslationKind,
    fuel: usize,
    node_bound: usize,
) -> Result<Verdict, TranslateError> {
    if source.steps.len() != 1 {
        return Err(TranslateError::WrongInput {
            op: "the simulation check",
            expected: "a one-step trace",
            found: if source.steps.is_empty() { "an empty trace" } else { "a longer trace" },
        });
    }
    if source.start.calculus != kind.source() {
        return Err(TranslateError::WrongCalculus {
            expected: kind.source(),
            found: source.start.calculus,
        });
    }
    let mut session = Session::new();
    let (before, after) = translate_pair(&source.start, source.end(), kind, &mut session)?;
    let rules = RuleSet::full(kind.target());
    let ns_blind = kind.target() == Calculus::Stlc;
    let target_key = sim_key(&after, ns_blind);

    let mut nodes = vec![before.clone()];
    let mut parents: Vec<Option<(usize, RuleId, Path)>> = vec![None];
    let mut depth = vec![0usize];
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    seen.insert(sim_key(&before, ns_blind), 0);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    let mut step_session = Session::new();
    let mut capped = false;
    let mut found = None;
    'bfs: while let Some(i) = queue.pop_front() {
        let candidates = rules
            .redexes(&nodes[i])
            .expect("the translation lands in the target calculus");
        if candidates.is_empty() {
            continue;
        }
        if depth[i] == fuel {
            capped = true;
            continue;
        }
        for at in candidates {
            let succ = rules
                .step(&nodes[i], &at, &mut step_session)
                .expect("listed redexes fire");
            let key = sim_key(&succ, ns_blind);
            if key == target_key {
                let j = nodes.len();
                nodes.push(succ);
                parents.push(Some((i, at.0, at.1.clone())));
                depth.push(depth[i] + 1);
                found = Some(j);
                break 'bfs;
            }
            if seen.contains_key(&key) {
                continue;
            }
            if nodes.len() == node_bound {
                capped = true;
                break 'bfs;
            }
            let j = nodes.len();
            nodes.push(succ);
            parents.push(Some((i, at.0, at.1.clone())));
            depth.push(depth[i] + 1);
            seen.insert(key, j);
            queue.push_back(j);
        }
    }

    Ok(match found {
        Some(j) => Verdict::with(
            VerdictKind::SimulationOk,
            format!(
                "the {} image rejoins the translated result after {} step(s)",
                kind.name(),
                depth[j]
            ),
            vec![replay_route(&rules, &nodes[0], &parents, j)],
        ),
        None if capped => Verdict::new(
            VerdictKind::Inconclusive,
            format!("no rejoin within fuel {fuel} and {node_bound} nodes"),
        ),
        None => Verdict::new(
            VerdictKind::SimulationFail,
            format!(
                "the image never reaches the translated result ({} reachable expressions)",
                nodes.len()
            ),
        ),
    })
}

// ---------------------------------------------------------------------
// Generation of well-typed sequents
// ---------------------------------------------------------------------

/// Generate a random well-typed sequent of the given calculus: free
/// variables and co-variables are declared on demand, every binder is
/// annotated, and rule choices are drawn uniformly among the typing rules
/// applicable at the current goal and budget. The same seed reproduces
/// the same sequent. A budget too small for anything else yields a bare
/// declared variable.
///
/// For the moded sequent calculus the namespaces of variables are chosen
/// independently of their types, so ill-moded declarations (a
/// computation-namespace variable at a value arrow, say) appear on
/// purpose.
pub fn gen_typed(calculus: Calculus, size_budget: usize, seed: u64) -> Sequent {
    let mut gen = Gen {
        calculus,
        rng: ChaCha8Rng::seed_from_u64(seed),
        session: Session::new(),
        gamma: BTreeMap::new(),
        delta: BTreeMap::new(),
        scope: Vec::new(),
        co_scope: Vec::new(),
    };
    gen.sequent(size_budget.max(1))
}

struct Gen {
    calculus: Calculus,
    rng: ChaCha8Rng,
    session: Session,
    gamma: BTreeMap<Name, TypeExpr>,
    delta: BTreeMap<Name, TypeExpr>,
    scope: Vec<(Name, TypeExpr)>,
    co_scope: Vec<(Name, TypeExpr)>,
}

fn arrow_parts(ty: &TypeExpr) -> (TypeExpr, TypeExpr) {
    match ty {
        TypeExpr::Imp(_, a, b) => ((**a).clone(), (**b).clone()),
        _ => unreachable!("guarded by the caller"),
    }
}

fn monad_inner(ty: &TypeExpr) -> TypeExpr {
    match ty {
        TypeExpr::Monad(a) => (**a).clone(),
        _ => unreachable!("guarded by the caller"),
    }
}

impl Gen {
    fn coin(&mut self) -> bool {
        self.rng.gen()
    }

    fn pick<T: Copy>(&mut self, options: &[T]) -> T {
        options[self.rng.gen_range(0..options.len())]
    }

    fn atom(&mut self) -> TypeExpr {
        TypeExpr::var(self.pick(&["X", "Y", "Z"]))
    }

    /// A random type of the calculus, with connectives nested at most
    /// `depth` deep.
    fn ty(&mut self, depth: usize) -> TypeExpr {
        match self.calculus {
            Calculus::Vc | Calculus::Ivc => {
                if self.coin() {
                    self.value_ty(depth)
                } else {
                    self.comp_ty(depth)
                }
            }
            Calculus::Lmmt => {
                if depth == 0 || self.coin() {
                    self.atom()
                } else {
                    TypeExpr::imp(self.ty(depth - 1), self.ty(depth - 1))
                }
            }
            Calculus::LmmtVn => match if depth == 0 { 0 } else { self.rng.gen_range(0..3) } {
                0 => self.atom(),
                1 => TypeExpr::imp_mode(Mode::V, self.ty(depth - 1), self.ty(depth - 1)),
                _ => TypeExpr::imp_mode(Mode::N, self.ty(depth - 1), self.ty(depth - 1)),
            },
            Calculus::LmM => match if depth == 0 { 0 } else { self.rng.gen_range(0..3) } {
                0 => self.atom(),
                1 => TypeExpr::imp(self.ty(depth - 1), self.ty(depth - 1)),
                _ => TypeExpr::monad(self.ty(depth - 1)),
            },
            Calculus::Stlc => {
                if depth == 0 || self.coin() {
                    if self.rng.gen_range(0..4) == 0 {
                        TypeExpr::Bot
                    } else {
                        self.atom()
                    }
                } else {
                    TypeExpr::imp(self.ty(depth - 1), self.ty(depth - 1))
                }
            }
        }
    }

    fn value_ty(&mut self, depth: usize) -> TypeExpr {
        if depth == 0 || self.coin() {
            self.atom()
        } else {
            let dom = if self.coin() {
                self.value_ty(depth - 1)
            } else {
                self.comp_ty(depth - 1)
            };
            TypeExpr::imp(dom, self.comp_ty(depth - 1))
        }
    }

    fn comp_ty(&mut self, depth: usize) -> TypeExpr {
        TypeExpr::monad(self.value_ty(depth.saturating_sub(1)))
    }

    fn fresh(&mut self, ns: Namespace) -> Name {
        let base = match ns {
            Namespace::Plain => "x",
            Namespace::Value => "v",
            Namespace::Comp => {
                if self.calculus == Calculus::LmmtVn {
                    "n"
                } else {
                    "p"
                }
            }
            Namespace::Co => "a",
        };
        let index = self.session.fresh_index(ns, base, std::iter::empty());
        Name { ns, base: base.into(), index }
    }

    /// A variable of the goal type: reuse one in scope (or already
    /// declared free) half of the time, otherwise declare a fresh free
    /// one. `namespaces` lists the namespaces acceptable at this goal.
    fn var_leaf(&mut self, goal: &TypeExpr, namespaces: &[Namespace]) -> Expr {
        let mut candidates: Vec<Name> = self
            .scope
            .iter()
            .filter(|(n, t)| t == goal && namespaces.contains(&n.ns))
            .map(|(n, _)| n.clone())
            .collect();
        candidates.extend(
            self.gamma
                .iter()
                .filter(|(n, t)| *t == goal && namespaces.contains(&n.ns))
                .map(|(n, _)| n.clone()),
        );
        let name = if !candidates.is_empty() && self.coin() {
            candidates[self.rng.gen_range(0..candidates.len())].clone()
        } else {
            let ns = self.pick(namespaces);
            let n = self.fresh(ns);
            self.gamma.insert(n.clone(), goal.clone());
            n
        };
        Expr::var(self.calculus, name).expect(GEN_GRAMMAR)
    }

    /// A co-variable co-term of the goal type, reusing or declaring like
    /// [`Gen::var_leaf`].
    fn co_leaf(&mut self, goal: &TypeExpr) -> Expr {
        let mut candidates: Vec<Name> = self
            .co_scope
            .iter()
            .filter(|(_, t)| t == goal)
            .map(|(n, _)| n.clone())
            .collect();
        candidates.extend(
            self.delta.iter().filter(|(_, t)| *t == goal).map(|(n, _)| n.clone()),
        );
        let name = if !candidates.is_empty() && self.coin() {
            candidates[self.rng.gen_range(0..candidates.len())].clone()
        } else {
            let n = self.fresh(Namespace::Co);
            self.delta.insert(n.clone(), goal.clone());
            n
        };
        Expr::covar(self.calculus, name).expect(GEN_GRAMMAR)
    }

    /// Some co-variable together with its type, for the commands that
    /// pass a term to one.
    fn any_covar(&mut self) -> (Name, TypeExpr) {
        let mut candidates = self.co_scope.clone();
        candidates.extend(self.delta.iter().map(|(n, t)| (n.clone(), t.clone())));
        if !candidates.is_empty() && self.coin() {
            return candidates[self.rng.gen_range(0..candidates.len())].clone();
        }
        let ty = match self.calculus {
            Calculus::Vc => self.comp_ty(1),
            _ => self.ty(2),
        };
        let n = self.fresh(Namespace::Co);
        self.delta.insert(n.clone(), ty.clone());
        (n, ty)
    }

    fn scoped<T>(&mut self, name: &Name, ty: TypeExpr, f: impl FnOnce(&mut Gen) -> T) -> T {
        self.scope.push((name.clone(), ty));
        let out = f(self);
        self.scope.pop();
        out
    }

    fn co_scoped<T>(&mut self, name: &Name, ty: TypeExpr, f: impl FnOnce(&mut Gen) -> T) -> T {
        self.co_scope.push((name.clone(), ty));
        let out = f(self);
        self.co_scope.pop();
        out
    }

    /// Split `total` between two children, respecting per-child minima.
    fn split(&mut self, total: usize, min_left: usize, min_right: usize) -> (usize, usize) {
        let left = self.rng.gen_range(min_left..=total - min_right);
        (left, total - left)
    }

    // ---- class dispatchers ----

    fn term(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        match self.calculus {
            Calculus::Lmmt => self.lmmt_term(goal, budget),
            Calculus::LmmtVn => self.vn_term(goal, budget),
            Calculus::LmM => self.lm_term(goal, budget),
            Calculus::Vc | Calculus::Ivc => self.vc_term(goal, budget),
            Calculus::Stlc => self.stlc_term(goal, budget),
        }
    }

    /// Co-terms of the two sequent calculi: a co-variable, a stack when
    /// the goal is an arrow (taking the arrow's mode with it), or a μ̃
    /// binding (whose namespace is drawn at random in the moded
    /// calculus).
    fn coterm(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 3 && matches!(goal, TypeExpr::Imp(..)) {
            options.push(1);
        }
        if budget >= 4 {
            options.push(2);
        }
        match self.pick(&options) {
            0 => self.co_leaf(goal),
            1 => {
                let (dom, cod) = arrow_parts(goal);
                let mode = match goal {
                    TypeExpr::Imp(m, ..) => *m,
                    _ => unreachable!("guarded just above"),
                };
                let (bl, br) = self.split(budget - 1, 1, 1);
                let u = self.term(&dom, bl);
                let e = self.coterm(&cod, br);
                Expr::cons(cx, mode, u, e).expect(GEN_GRAMMAR)
            }
            _ => {
                let ns = if cx == Calculus::LmmtVn {
                    self.pick(&[Namespace::Value, Namespace::Comp])
                } else {
                    Namespace::Plain
                };
                let x = self.fresh(ns);
                let body = self.scoped(&x, goal.clone(), |g| g.command(budget - 1));
                Expr::mu_tilde(cx, Binder::ann(x, goal.clone()), body).expect(GEN_GRAMMAR)
            }
        }
    }

    /// Commands of the two sequent calculi: a cut at a random type.
    fn command(&mut self, budget: usize) -> Expr {
        let cx = self.calculus;
        let cut_ty = self.ty(2);
        let (bl, br) = self.split(budget - 1, 1, 1);
        let t = self.term(&cut_ty, bl);
        let e = self.coterm(&cut_ty, br);
        Expr::command(cx, t, e).expect(GEN_GRAMMAR)
    }

    // ---- the unmoded sequent calculus ----

    fn lmmt_term(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 2 && matches!(goal, TypeExpr::Imp(..)) {
            options.push(1);
        }
        if budget >= 4 {
            options.push(2);
        }
        match self.pick(&options) {
            0 => self.var_leaf(goal, &[Namespace::Plain]),
            1 => {
                let (dom, cod) = arrow_parts(goal);
                let x = self.fresh(Namespace::Plain);
                let body = self.scoped(&x, dom.clone(), |g| g.lmmt_term(&cod, budget - 1));
                Expr::lam(cx, Binder::ann(x, dom), body).expect(GEN_GRAMMAR)
            }
            _ => {
                let a = self.fresh(Namespace::Co);
                let body = self.co_scoped(&a, goal.clone(), |g| g.command(budget - 1));
                Expr::mu(cx, Binder::ann(a, goal.clone()), body).expect(GEN_GRAMMAR)
            }
        }
    }

    // ---- the moded sequent calculus ----

    fn vn_term(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 2 && matches!(goal, TypeExpr::Imp(Some(_), ..)) {
            options.push(1);
        }
        if budget >= 4 {
            options.push(2);
        }
        match self.pick(&options) {
            0 => self.var_leaf(goal, &[Namespace::Value, Namespace::Comp]),
            1 => {
                let (dom, cod) = arrow_parts(goal);
                let mode = match goal {
                    TypeExpr::Imp(Some(m), ..) => *m,
                    _ => unreachable!("guarded just above"),
                };
                let x = self.fresh(mode.namespace());
                let body = self.scoped(&x, dom.clone(), |g| g.vn_term(&cod, budget - 1));
                Expr::lam(cx, Binder::ann(x, dom), body).expect(GEN_GRAMMAR)
            }
            _ => {
                let a = self.fresh(Namespace::Co);
                let body = self.co_scoped(&a, goal.clone(), |g| g.command(budget - 1));
                Expr::mu(cx, Binder::ann(a, goal.clone()), body).expect(GEN_GRAMMAR)
            }
        }
    }

    // ---- the monadic λμ ----

    fn lm_term(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 2 && matches!(goal, TypeExpr::Imp(..)) {
            options.push(1);
        }
        if budget >= 2 && matches!(goal, TypeExpr::Monad(_)) {
            options.push(2);
        }
        if budget >= 3 {
            options.push(3);
        }
        if budget >= 3 {
            options.push(4);
        }
        match self.pick(&options) {
            0 => self.var_leaf(goal, &[Namespace::Plain]),
            1 => {
                let (dom, cod) = arrow_parts(goal);
                let x = self.fresh(Namespace::Plain);
                let body = self.scoped(&x, dom.clone(), |g| g.lm_term(&cod, budget - 1));
                Expr::lam(cx, Binder::ann(x, dom), body).expect(GEN_GRAMMAR)
            }
            2 => {
                let inner = monad_inner(goal);
                Expr::ret(cx, self.lm_term(&inner, budget - 1)).expect(GEN_GRAMMAR)
            }
            3 => {
                let a = self.fresh(Namespace::Co);
                let body = self.co_scoped(&a, goal.clone(), |g| g.lm_command(budget - 1));
                Expr::mu(cx, Binder::ann(a, goal.clone()), body).expect(GEN_GRAMMAR)
            }
            _ => {
                let dom = self.ty(1);
                let head_ty = TypeExpr::imp(dom.clone(), goal.clone());
                let (bl, br) = self.split(budget - 1, 1, 1);
                let head = self.lm_term(&head_ty, bl);
                let arg = self.lm_term(&dom, br);
                Expr::app(cx, head, arg).expect(GEN_GRAMMAR)
            }
        }
    }

    fn lm_command(&mut self, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 4 {
            options.push(1);
        }
        match self.pick(&options) {
            0 => {
                let (a, ty) = self.any_covar();
                let t = self.lm_term(&ty, budget.saturating_sub(1).max(1));
                Expr::coapp(cx, a, t).expect(GEN_GRAMMAR)
            }
            _ => {
                let inner = self.ty(1);
                let bound_goal = TypeExpr::monad(inner.clone());
                let (bl, br) = self.split(budget - 1, 1, 2);
                let x = self.fresh(Namespace::Plain);
                let bound = self.lm_term(&bound_goal, bl);
                let body = self.scoped(&x, inner.clone(), |g| g.lm_command(br));
                Expr::bind(cx, bound, Binder::ann(x, inner), body).expect(GEN_GRAMMAR)
            }
        }
    }

    // ---- the value/computation calculus ----

    fn vc_term(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        if matches!(goal, TypeExpr::Monad(_)) {
            self.vc_comp(goal, budget)
        } else {
            self.vc_value(goal, budget)
        }
    }

    fn vc_value(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 2 && matches!(goal, TypeExpr::Imp(..)) {
            options.push(1);
        }
        match self.pick(&options) {
            0 => self.var_leaf(goal, &[Namespace::Value]),
            _ => {
                let (dom, cod) = arrow_parts(goal);
                let ns = if matches!(dom, TypeExpr::Monad(_)) {
                    Namespace::Comp
                } else {
                    Namespace::Value
                };
                let x = self.fresh(ns);
                let body = self.scoped(&x, dom.clone(), |g| g.vc_comp(&cod, budget - 1));
                Expr::lam(cx, Binder::ann(x, dom), body).expect(GEN_GRAMMAR)
            }
        }
    }

    fn vc_comp(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        let cx = self.calculus;
        let inner = monad_inner(goal);
        let mut options = vec![0u8];
        if budget >= 2 {
            options.push(1);
        }
        if budget >= 3 && cx == Calculus::Vc {
            options.push(2);
        }
        if budget >= 3 {
            options.push(3);
        }
        if budget >= 3 && cx == Calculus::Ivc {
            options.push(4);
            options.push(5);
        }
        match self.pick(&options) {
            0 => self.var_leaf(goal, &[Namespace::Comp]),
            1 => Expr::ret(cx, self.vc_value(&inner, budget - 1)).expect(GEN_GRAMMAR),
            2 => {
                let a = self.fresh(Namespace::Co);
                let body = self.co_scoped(&a, goal.clone(), |g| g.vc_command(budget - 1));
                Expr::mu(cx, Binder::ann(a, goal.clone()), body).expect(GEN_GRAMMAR)
            }
            3 => {
                let dom = if self.coin() { self.value_ty(1) } else { self.comp_ty(1) };
                let head_ty = TypeExpr::imp(dom.clone(), goal.clone());
                let (bl, br) = self.split(budget - 1, 1, 1);
                let head = self.vc_value(&head_ty, bl);
                let arg = if matches!(dom, TypeExpr::Monad(_)) {
                    self.vc_comp(&dom, br)
                } else {
                    self.vc_value(&dom, br)
                };
                Expr::app(cx, head, arg).expect(GEN_GRAMMAR)
            }
            4 => {
                let bound_inner = self.value_ty(1);
                let bound_goal = TypeExpr::monad(bound_inner.clone());
                let (bl, br) = self.split(budget - 1, 1, 1);
                let v = self.fresh(Namespace::Value);
                let bound = self.vc_comp(&bound_goal, bl);
                let body = self.scoped(&v, bound_inner.clone(), |g| g.vc_comp(goal, br));
                Expr::let_(cx, bound, Binder::ann(v, bound_inner), body).expect(GEN_GRAMMAR)
            }
            _ => {
                let bound_goal = self.comp_ty(1);
                let (bl, br) = self.split(budget - 1, 1, 1);
                let p = self.fresh(Namespace::Comp);
                let bound = self.vc_comp(&bound_goal, bl);
                let body = self.scoped(&p, bound_goal.clone(), |g| g.vc_comp(goal, br));
                Expr::sub(cx, bound, Binder::ann(p, bound_goal), body).expect(GEN_GRAMMAR)
            }
        }
    }

    fn vc_command(&mut self, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 4 {
            options.push(1);
            options.push(2);
        }
        match self.pick(&options) {
            0 => {
                let (a, ty) = self.any_covar();
                let t = self.vc_comp(&ty, budget.saturating_sub(1).max(1));
                Expr::coapp(cx, a, t).expect(GEN_GRAMMAR)
            }
            1 => {
                let inner = self.value_ty(1);
                let bound_goal = TypeExpr::monad(inner.clone());
                let (bl, br) = self.split(budget - 1, 1, 2);
                let v = self.fresh(Namespace::Value);
                let bound = self.vc_comp(&bound_goal, bl);
                let body = self.scoped(&v, inner.clone(), |g| g.vc_command(br));
                Expr::let_(cx, bound, Binder::ann(v, inner), body).expect(GEN_GRAMMAR)
            }
            _ => {
                let bound_goal = self.comp_ty(1);
                let (bl, br) = self.split(budget - 1, 1, 2);
                let p = self.fresh(Namespace::Comp);
                let bound = self.vc_comp(&bound_goal, bl);
                let body = self.scoped(&p, bound_goal.clone(), |g| g.vc_command(br));
                Expr::sub(cx, bound, Binder::ann(p, bound_goal), body).expect(GEN_GRAMMAR)
            }
        }
    }

    // ---- the value-restricted λ ----

    fn stlc_term(&mut self, goal: &TypeExpr, budget: usize) -> Expr {
        let cx = self.calculus;
        let mut options = vec![0u8];
        if budget >= 2 && matches!(goal, TypeExpr::Imp(..)) {
            options.push(1);
        }
        if budget >= 3 {
            options.push(2);
        }
        match self.pick(&options) {
            0 => self.var_leaf(goal, &[Namespace::Plain]),
            1 => {
                let (dom, cod) = arrow_parts(goal);
                let x = self.fresh(Namespace::Plain);
                let body = self.scoped(&x, dom.clone(), |g| g.stlc_term(&cod, budget - 1));
                Expr::lam(cx, Binder::ann(x, dom), body).expect(GEN_GRAMMAR)
            }
            _ => {
                let dom = self.ty(1);
                let head_ty = TypeExpr::imp(dom.clone(), goal.clone());
                let (bl, br) = self.split(budget - 1, 1, 1);
                let head = self.stlc_term(&head_ty, bl);
                let arg = self.stlc_term(&dom, br);
                Expr::app(cx, head, arg).expect(GEN_GRAMMAR)
            }
        }
    }

    // ---- roots ----

    fn sequent(&mut self, budget: usize) -> Sequent {
        #[derive(Clone, Copy, PartialEq)]
        enum Root {
            Term,
            CoTerm,
            Command,
        }
        let classes: &[Root] = if budget < 3 {
            &[Root::Term]
        } else {
            match self.calculus {
                Calculus::Lmmt | Calculus::LmmtVn => &[Root::Term, Root::CoTerm, Root::Command],
                Calculus::LmM | Calculus::Vc => &[Root::Term, Root::Command],
                Calculus::Ivc | Calculus::Stlc => &[Root::Term],
            }
        };
        let root = self.pick(classes);
        let (subject, stated) = match root {
            Root::Term => {
                let goal = self.ty(2);
                let subject = self.term(&goal, budget);
                (subject, Some(goal))
            }
            Root::CoTerm => {
                let goal = self.ty(2);
                let subject = self.coterm(&goal, budget);
                (subject, Some(goal))
            }
            Root::Command => {
                let subject = match self.calculus {
                    Calculus::Lmmt | Calculus::LmmtVn => self.command(budget),
                    Calculus::LmM => self.lm_command(budget),
                    Calculus::Vc => self.vc_command(budget),
                    _ => unreachable!("command roots only arise in the sequent-style calculi"),
                };
                (subject, None)
            }
        };
        Sequent {
            gamma: self.gamma.clone(),
            subject,
            stated,
            delta: self.delta.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, parse_expr, parse_sequent};
    use std::collections::BTreeSet;
    use std::mem::discriminant;

    fn e(cx: Calculus, s: &str) -> Expr {
        parse_expr(cx, s).unwrap()
    }

    fn seq(cx: Calculus, s: &str) -> Sequent {
        Sequent::from_syntax(parse_sequent(cx, s).unwrap()).unwrap()
    }

    fn one_step(rules: &RuleSet, start: &Expr) -> Trace {
        let at = leftmost(&rules.redexes(start).unwrap());
        let mut session = Session::new();
        let next = rules.step(start, &at, &mut session).unwrap();
        Trace {
            calculus: rules.calculus,
            start: start.clone(),
            steps: vec![ReductionStep { rule: at.0, path: at.1, result: next }],
            exhausted: false,
        }
    }

    #[test]
    fn the_eager_chain_normalizes_in_three_steps() {
        let rules = RuleSet::full(Calculus::Vc);
        let t = normalize(
            &rules,
            &e(Calculus::Vc, "(\\%v. ret %v) %w"),
            Strategy::LeftmostOutermost,
            10,
        )
        .unwrap();
        let fired: Vec<&str> = t.steps.iter().map(|s| s.rule.name()).collect();
        assert_eq!(fired, ["beta", "sigma", "eta-mu"]);
        assert!(alpha_eq(t.end(), &e(Calculus::Vc, "ret %w")));
        assert!(!t.exhausted);
    }

    #[test]
    fn a_co_variable_pass_eta_contracts() {
        let rules = RuleSet::full(Calculus::Vc);
        let t = normalize(
            &rules,
            &e(Calculus::Vc, "mu @a. @a #p"),
            Strategy::LeftmostOutermost,
            10,
        )
        .unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].rule, RuleId::EtaMu);
        assert_eq!(print_expr(t.end()), "#p");
    }

    #[test]
    fn fuel_runs_out_cleanly() {
        let rules = RuleSet::full(Calculus::Vc);
        let t = normalize(
            &rules,
            &e(Calculus::Vc, "(\\%v. ret %v) %w"),
            Strategy::LeftmostOutermost,
            1,
        )
        .unwrap();
        assert!(t.exhausted);
        assert_eq!(t.steps.len(), 1);
    }

    #[test]
    fn strategies_pick_opposite_ends() {
        let rules = RuleSet::lmmt(Fragment::Full);
        let start = e(
            Calculus::Lmmt,
            "< mu @a. < x | @b > | mt y. < mu @c. < y | @b > | @b > >",
        );
        let left = normalize(&rules, &start, Strategy::LeftmostOutermost, 1).unwrap();
        assert_eq!((left.steps[0].rule, left.steps[0].path.as_slice()), (RuleId::Sigma, &[][..]));
        let right = normalize(&rules, &start, Strategy::RightmostInnermost, 1).unwrap();
        assert_eq!(
            (right.steps[0].rule, right.steps[0].path.as_slice()),
            (RuleId::Pi, &[1, 0][..])
        );
    }

    #[test]
    fn a_seeded_random_walk_reproduces() {
        let rules = RuleSet::lmmt(Fragment::Full);
        let start = e(
            Calculus::Lmmt,
            "< mu @a. < x | @b > | mt y. < mu @c. < y | @b > | @b > >",
        );
        let one = normalize(&rules, &start, Strategy::Random(7), 20).unwrap();
        let two = normalize(&rules, &start, Strategy::Random(7), 20).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn the_uncut_pair_has_two_endings() {
        let rules = RuleSet::lmmt(Fragment::Full);
        let start = e(Calculus::Lmmt, "< mu @a. < y | @b > | mt x. < z | @b > >");
        let graph = reduction_graph(&rules, &start, 100).unwrap();
        assert_eq!(graph.nodes.len(), 3);
        assert!(!graph.exhausted);
        assert_eq!(graph.normal_forms.len(), 2);
        // every recorded edge replays
        let mut session = Session::new();
        for edge in &graph.edges {
            let out = rules
                .step(&graph.nodes[edge.from], &(edge.rule, edge.path.clone()), &mut session)
                .unwrap();
            assert!(alpha_eq(&out, &graph.nodes[edge.to]));
        }

        let verdict = check_confluence(&rules, &start, 100).unwrap();
        assert_eq!(verdict.kind, VerdictKind::NonConfluent);
        let ends: BTreeSet<String> =
            verdict.witnesses.iter().map(|w| print_expr(w.end())).collect();
        let expected: BTreeSet<String> =
            ["< y | @b >", "< z | @b >"].map(String::from).into_iter().collect();
        assert_eq!(ends, expected);
    }

    #[test]
    fn each_mode_choice_rescues_the_pair() {
        let start = e(Calculus::Lmmt, "< mu @a. < y | @b > | mt x. < z | @b > >");
        let vn = RuleSet::full(Calculus::LmmtVn);

        let by_name = crate::translate::embed_cbn(&start).unwrap().result;
        let verdict = check_confluence(&vn, &by_name, 100).unwrap();
        assert_eq!(verdict.kind, VerdictKind::Confluent);
        assert_eq!(print_expr(verdict.witnesses[0].end()), "< #z | @b >");

        let by_value = crate::translate::embed_cbv(&start).unwrap().result;
        let verdict = check_confluence(&vn, &by_value, 100).unwrap();
        assert_eq!(verdict.kind, VerdictKind::Confluent);
        assert_eq!(print_expr(verdict.witnesses[0].end()), "< %y | @b >");

        // the fragments of the unmoded calculus make the same choices
        let verdict = check_confluence(&RuleSet::lmmt(Fragment::Cbn), &start, 100).unwrap();
        assert_eq!(verdict.kind, VerdictKind::Confluent);
        assert_eq!(print_expr(verdict.witnesses[0].end()), "< z | @b >");
        let verdict = check_confluence(&RuleSet::lmmt(Fragment::Cbv), &start, 100).unwrap();
        assert_eq!(verdict.kind, VerdictKind::Confluent);
        assert_eq!(print_expr(verdict.witnesses[0].end()), "< y | @b >");
    }

    #[test]
    fn a_normal_form_graphs_alone() {
        let rules = RuleSet::full(Calculus::Stlc);
        let graph = reduction_graph(&rules, &e(Calculus::Stlc, "x"), 10).unwrap();
        assert_eq!(graph.nodes.len(), 1);
        assert!(graph.edges.is_empty());
        assert_eq!(graph.normal_forms, [0]);
        let verdict = check_confluence(&rules, &e(Calculus::Stlc, "x"), 10).unwrap();
        assert_eq!(verdict.kind, VerdictKind::Confluent);
    }

    #[test]
    fn the_node_bound_is_reported() {
        let rules = RuleSet::lmmt(Fragment::Full);
        let start = e(Calculus::Lmmt, "< mu @a. < y | @b > | mt x. < z | @b > >");
        let graph = reduction_graph(&rules, &start, 2).unwrap();
        assert!(graph.exhausted);
        let verdict = check_confluence(&rules, &start, 2).unwrap();
        assert_eq!(verdict.kind, VerdictKind::Inconclusive);
    }

    #[test]
    fn reduction_keeps_the_statement() {
        let rules = RuleSet::full(Calculus::Vc);
        let s = seq(Calculus::Vc, "%w:X |- (\\%v:X. ret %v) %w : M X");
        let verdict = check_subject_reduction(&rules, &s, 100).unwrap();
        assert_eq!(verdict.kind, VerdictKind::SrOk, "{}", verdict.note);
    }

    #[test]
    fn an_untypable_start_is_an_error() {
        let rules = RuleSet::full(Calculus::Vc);
        let s = seq(Calculus::Vc, "|- ret %v : M X");
        assert!(check_subject_reduction(&rules, &s, 100).is_err());
    }

    #[test]
    fn beta_v_simulates_under_the_monadic_image() {
        let source = one_step(
            &RuleSet::full(Calculus::LmmtVn),
            &e(Calculus::LmmtVn, "< \\%v. %v | %w ::v @a >"),
        );
        assert_eq!(source.steps[0].rule, RuleId::BetaV);
        let verdict =
            check_simulation(&source, TranslationKind::Mtr, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
        assert!(!verdict.witnesses[0].steps.is_empty());

        let verdict =
            check_simulation(&source, TranslationKind::Cps, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
    }

    #[test]
    fn beta_n_simulates_under_the_monadic_image() {
        let source = one_step(
            &RuleSet::full(Calculus::LmmtVn),
            &e(Calculus::LmmtVn, "< \\#n. #n | (mu @b. < %w | @b >) ::n @a >"),
        );
        assert_eq!(source.steps[0].rule, RuleId::BetaN);
        let verdict =
            check_simulation(&source, TranslationKind::Mtr, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
    }

    #[test]
    fn a_co_term_step_shares_one_filler() {
        let source = one_step(
            &RuleSet::full(Calculus::LmmtVn),
            &e(Calculus::LmmtVn, "mt %v. < %v | @a >"),
        );
        assert_eq!(source.steps[0].rule, RuleId::EtaMtV);
        assert_eq!(print_expr(source.end()), "@a");
        let verdict =
            check_simulation(&source, TranslationKind::Mtr, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
        let verdict =
            check_simulation(&source, TranslationKind::Cps, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
    }

    #[test]
    fn an_annotated_co_term_step_still_matches() {
        // The reduct's image mints a bare binder where the source image
        // keeps the annotated one, so endpoint matching must not read
        // annotations.
        let source = one_step(
            &RuleSet::full(Calculus::LmmtVn),
            &e(Calculus::LmmtVn, "mt %v:X. < %v | %w ::v @a >"),
        );
        assert_eq!(source.steps[0].rule, RuleId::EtaMtV);
        let verdict =
            check_simulation(&source, TranslationKind::Mtr, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
        let verdict =
            check_simulation(&source, TranslationKind::Cps, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
    }

    #[test]
    fn eta_mu_simulates_under_the_composition() {
        let source = one_step(
            &RuleSet::full(Calculus::LmmtVn),
            &e(Calculus::LmmtVn, "mu @a. < %x | @a >"),
        );
        assert_eq!(source.steps[0].rule, RuleId::EtaMu);
        let verdict =
            check_simulation(&source, TranslationKind::Cps, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
    }

    #[test]
    fn a_beta_step_simulates_under_the_continuations_image() {
        let source =
            one_step(&RuleSet::full(Calculus::Vc), &e(Calculus::Vc, "(\\%v. ret %v) %w"));
        assert_eq!(source.steps[0].rule, RuleId::Beta);
        let verdict =
            check_simulation(&source, TranslationKind::Cm, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .unwrap();
        assert_eq!(verdict.kind, VerdictKind::SimulationOk, "{}", verdict.note);
    }

    #[test]
    fn simulation_rejects_malformed_sources() {
        let rules = RuleSet::full(Calculus::Vc);
        let start = e(Calculus::Vc, "(\\%v. ret %v) %w");
        let empty = Trace {
            calculus: Calculus::Vc,
            start: start.clone(),
            steps: vec![],
            exhausted: false,
        };
        assert!(matches!(
            check_simulation(&empty, TranslationKind::Cm, 10, 100),
            Err(TranslateError::WrongInput { .. })
        ));

        let two = normalize(&rules, &start, Strategy::LeftmostOutermost, 2).unwrap();
        assert!(matches!(
            check_simulation(&two, TranslationKind::Cm, 10, 100),
            Err(TranslateError::WrongInput { .. })
        ));

        let wrong = one_step(&rules, &start);
        assert!(matches!(
            check_simulation(&wrong, TranslationKind::Mtr, 10, 100),
            Err(TranslateError::WrongCalculus { .. })
        ));
    }

    #[test]
    fn generated_sequents_always_typecheck() {
        for calculus in [
            Calculus::Lmmt,
            Calculus::LmmtVn,
            Calculus::LmM,
            Calculus::Vc,
            Calculus::Ivc,
            Calculus::Stlc,
        ] {
            for budget in [1, 2, 5, 8] {
                for seed in 0..40 {
                    let s = gen_typed(calculus, budget, seed);
                    if let Err(err) = check_sequent(&s, false) {
                        panic!("{calculus:?} seed {seed} budget {budget}: {err}\n  {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let one = gen_typed(Calculus::Vc, 8, 42);
        let two = gen_typed(Calculus::Vc, 8, 42);
        assert_eq!(one.to_string(), two.to_string());
    }

    #[test]
    fn a_unit_budget_gives_a_bare_variable() {
        for calculus in [
            Calculus::Lmmt,
            Calculus::LmmtVn,
            Calculus::LmM,
            Calculus::Vc,
            Calculus::Ivc,
            Calculus::Stlc,
        ] {
            let s = gen_typed(calculus, 1, 5);
            assert!(
                matches!(s.subject.node, crate::syntax::Node::Var(_)),
                "{calculus:?}: {s}"
            );
        }
    }

    #[test]
    fn generated_roots_vary() {
        for (calculus, available) in [
            (Calculus::Lmmt, 7),
            (Calculus::LmmtVn, 7),
            (Calculus::LmM, 7),
            (Calculus::Vc, 8),
            (Calculus::Ivc, 6),
            (Calculus::Stlc, 3),
        ] {
            let mut roots = BTreeSet::new();
            for seed in 0..300 {
                let s = gen_typed(calculus, 8, seed);
                roots.insert(format!("{:?}", discriminant(&s.subject.node)));
            }
            let want = 6usize.min(available);
            assert!(
                roots.len() >= want,
                "{calculus:?}: {} distinct roots, wanted {want}",
                roots.len()
            );
        }
    }

    #[test]
    fn export_schemas_stay_put() {
        let rules = RuleSet::full(Calculus::Vc);
        let t = normalize(
            &rules,
            &e(Calculus::Vc, "(\\%v. ret %v) %w"),
            Strategy::LeftmostOutermost,
            10,
        )
        .unwrap();
        let j = t.to_json();
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["calculus", "start", "steps"]);
        assert_eq!(j["calculus"], Calculus::Vc.id());
        assert_eq!(j["start"], "(\\%v. ret %v) %w");
        let step = &j["steps"][0];
        assert_eq!(step["rule"], "beta");
        assert_eq!(step["path"], json!([]));

        let g = reduction_graph(&rules, &e(Calculus::Vc, "(\\%v. ret %v) %w"), 100).unwrap();
        let j = g.to_json();
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["calculus", "edges", "exhausted", "nodes", "normal_forms", "start"]);
        assert_eq!(j["exhausted"], false);
    }
}
