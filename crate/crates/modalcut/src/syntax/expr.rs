use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::name::{Mode, Name, Namespace};
use super::ty::TypeExpr;

/// The six calculi this crate mechanizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Calculus {
    /// Two-sided sequent calculus with cuts ⟨t|e⟩, μ and μ̃.
    Lmmt,
    /// Its moded refinement: value/computation variables, ⊃ᵥ/⊃ₙ.
    LmmtVn,
    /// Monadic λμ with ret/bind and named co-variables.
    LmM,
    /// The value/computation monadic calculus (let/sub, commands aP).
    Vc,
    /// Intuitionistic fragment of `Vc`: no co-variables, let/sub return
    /// computations.
    Ivc,
    /// λ-calculus with only the value-restricted β rule; translation target.
    Stlc,
}

impl Calculus {
    pub const ALL: [Calculus; 6] = [
        Calculus::Lmmt,
        Calculus::LmmtVn,
        Calculus::LmM,
        Calculus::Vc,
        Calculus::Ivc,
        Calculus::Stlc,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Calculus::Lmmt => "lmmt",
            Calculus::LmmtVn => "lmmt-vn",
            Calculus::LmM => "lm-M",
            Calculus::Vc => "vc",
            Calculus::Ivc => "ivc",
            Calculus::Stlc => "stlc",
        }
    }

    /// Namespaces admitted for term variables (binders of λ/μ̃/let/sub/bind
    /// and variable occurrences).
    fn term_namespaces(self) -> &'static [Namespace] {
        match self {
            Calculus::Lmmt | Calculus::LmM => &[Namespace::Plain],
            Calculus::LmmtVn | Calculus::Vc | Calculus::Ivc => {
                &[Namespace::Value, Namespace::Comp]
            }
            // λ[βᵛ] is the image of the other calculi, so it tolerates all
            // three term namespaces (translations keep source sigils).
            Calculus::Stlc => &[Namespace::Value, Namespace::Comp, Namespace::Plain],
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for Calculus {
    type Err = String;

    fn from_str(s: &str) -> Result<Calculus, String> {
        match s.to_ascii_lowercase().as_str() {
            "lmmt" => Ok(Calculus::Lmmt),
            "lmmt-vn" | "lmmtvn" => Ok(Calculus::LmmtVn),
            "lm-m" | "lmm" => Ok(Calculus::LmM),
            "vc" => Ok(Calculus::Vc),
            "ivc" => Ok(Calculus::Ivc),
            "stlc" => Ok(Calculus::Stlc),
            _ => Err(format!(
                "unknown calculus {s:?} (expected one of lmmt, lmmt-vn, lm-M, vc, ivc, stlc)"
            )),
        }
    }
}

/// Syntactic class of an expression. Terms cover values and computations
/// (use `is_value`/`is_computation` for the finer split); an expression
/// containing a hole is a context regardless of its shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Term,
    CoTerm,
    Command,
    Context,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Class::Term => "term",
            Class::CoTerm => "co-term",
            Class::Command => "command",
            Class::Context => "context",
        };
        write!(f, "{s}")
    }
}

/// A binding occurrence: the bound name plus an optional type annotation
/// (`\x:A. t`). Annotations are optional in the grammar; the typecheckers
/// need them wherever a type cannot be read off the surroundings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: Name,
    pub ann: Option<TypeExpr>,
}

impl Binder {
    pub fn new(name: Name) -> Binder {
        Binder { name, ann: None }
    }

    pub fn ann(name: Name, ty: TypeExpr) -> Binder {
        Binder { name, ann: Some(ty) }
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if let Some(ty) = &self.ann {
            write!(f, ":{ty}")?;
        }
        Ok(())
    }
}

/// Expression shapes, shared across calculi; `Expr::new` enforces which
/// shapes a calculus admits and how they may be put together.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    /// Term variable occurrence (namespace decides value/computation).
    Var(Name),
    /// Co-variable used as a co-term (sequent calculi only).
    CoVar(Name),
    /// `\x. t` — body is a term or computation.
    Lam(Binder, Box<Expr>),
    /// `mu @a. c` — binds a co-variable in a command.
    Mu(Binder, Box<Expr>),
    /// `mt x. c` — co-term binding a term variable in a command.
    MuTilde(Binder, Box<Expr>),
    /// `< t | e >`.
    Command(Box<Expr>, Box<Expr>),
    /// `u :: e` / `u ::v e` / `u ::n e` — the mode is mandatory in the
    /// moded calculus and absent otherwise.
    Cons(Option<Mode>, Box<Expr>, Box<Expr>),
    /// Application `t u` (head restricted to values where the grammar says
    /// so).
    App(Box<Expr>, Box<Expr>),
    /// `ret t`.
    Ret(Box<Expr>),
    /// `@a t` — passing a term to a co-variable (a command).
    CoApp(Name, Box<Expr>),
    /// `let %v = P in c` (body is a command, or a computation in the
    /// intuitionistic calculus).
    Let(Box<Expr>, Binder, Box<Expr>),
    /// `sub #p = P in c`.
    Sub(Box<Expr>, Binder, Box<Expr>),
    /// `bind x = t in c`.
    Bind(Box<Expr>, Binder, Box<Expr>),
    /// `[]` — the hole of a context.
    Hole,
}

impl Node {
    pub fn describe(&self) -> &'static str {
        match self {
            Node::Var(_) => "variable",
            Node::CoVar(_) => "co-variable",
            Node::Lam(..) => "lambda",
            Node::Mu(..) => "mu",
            Node::MuTilde(..) => "mu-tilde",
            Node::Command(..) => "command pair",
            Node::Cons(..) => "stack",
            Node::App(..) => "application",
            Node::Ret(_) => "ret",
            Node::CoApp(..) => "co-variable application",
            Node::Let(..) => "let",
            Node::Sub(..) => "sub",
            Node::Bind(..) => "bind",
            Node::Hole => "hole",
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("{0} is not part of the {1} grammar")]
    NodeNotInCalculus(&'static str, Calculus),
    #[error("{name} is a {}, but {place} in {calculus} takes a {expected}", name.ns.describe())]
    NamespaceViolation {
        name: Name,
        place: &'static str,
        expected: &'static str,
        calculus: Calculus,
    },
    #[error("{place} must be a {expected}, found a {found}")]
    ClassViolation {
        place: &'static str,
        expected: &'static str,
        found: Class,
    },
    #[error("stacks in {0} {1}")]
    StackMode(Calculus, &'static str),
    #[error("a hole cannot appear as {0}")]
    HolePlacement(&'static str),
    #[error("a context must contain exactly one hole, found {0}")]
    HoleCount(usize),
    #[error("mixed calculi: {0} inside {1}")]
    MixedCalculi(Calculus, Calculus),
}

/// An expression of one of the calculi. Construct through `Expr::new` (or
/// the shape helpers), which validate the per-calculus grammar; the class
/// is derived from the shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    pub calculus: Calculus,
    pub node: Node,
    holes: usize,
}

pub type Path = Vec<usize>;

impl Expr {
    pub fn new(calculus: Calculus, node: Node) -> Result<Expr, ExprError> {
        validate(calculus, &node)?;
        let holes = count_holes(&node);
        if holes > 1 {
            return Err(ExprError::HoleCount(holes));
        }
        Ok(Expr { calculus, node, holes })
    }

    pub fn var(calculus: Calculus, name: Name) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Var(name))
    }

    pub fn covar(calculus: Calculus, name: Name) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::CoVar(name))
    }

    pub fn lam(calculus: Calculus, binder: Binder, body: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Lam(binder, Box::new(body)))
    }

    pub fn mu(calculus: Calculus, binder: Binder, body: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Mu(binder, Box::new(body)))
    }

    pub fn mu_tilde(calculus: Calculus, binder: Binder, body: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::MuTilde(binder, Box::new(body)))
    }

    pub fn command(calculus: Calculus, t: Expr, e: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Command(Box::new(t), Box::new(e)))
    }

    pub fn cons(calculus: Calculus, mode: Option<Mode>, u: Expr, e: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Cons(mode, Box::new(u), Box::new(e)))
    }

    pub fn app(calculus: Calculus, t: Expr, u: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::App(Box::new(t), Box::new(u)))
    }

    pub fn ret(calculus: Calculus, t: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Ret(Box::new(t)))
    }

    pub fn coapp(calculus: Calculus, a: Name, t: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::CoApp(a, Box::new(t)))
    }

    pub fn let_(calculus: Calculus, p: Expr, binder: Binder, body: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Let(Box::new(p), binder, Box::new(body)))
    }

    pub fn sub(calculus: Calculus, p: Expr, binder: Binder, body: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Sub(Box::new(p), binder, Box::new(body)))
    }

    pub fn bind(calculus: Calculus, t: Expr, binder: Binder, body: Expr) -> Result<Expr, ExprError> {
        Expr::new(calculus, Node::Bind(Box::new(t), binder, Box::new(body)))
    }

    pub fn hole(calculus: Calculus) -> Expr {
        Expr { calculus, node: Node::Hole, holes: 1 }
    }

    pub fn has_hole(&self) -> bool {
        self.holes > 0
    }

    /// Syntactic class as licensed by the calculus's grammar. Anything
    /// containing a hole is a context.
    pub fn class(&self) -> Class {
        if self.has_hole() {
            return Class::Context;
        }
        match &self.node {
            Node::Var(_) | Node::Lam(..) | Node::Mu(..) | Node::App(..) | Node::Ret(_) => {
                Class::Term
            }
            Node::CoVar(_) | Node::MuTilde(..) | Node::Cons(..) => Class::CoTerm,
            Node::Command(..) | Node::CoApp(..) => Class::Command,
            Node::Let(..) | Node::Sub(..) => {
                if self.calculus == Calculus::Ivc {
                    Class::Term
                } else {
                    Class::Command
                }
            }
            Node::Bind(..) => Class::Command,
            Node::Hole => Class::Context,
        }
    }

    /// Values: variables of the value namespace (or any term namespace in
    /// the unmoded calculi) and λ-abstractions.
    pub fn is_value(&self) -> bool {
        if self.has_hole() {
            return false;
        }
        match &self.node {
            Node::Lam(..) => true,
            Node::Var(n) => match self.calculus {
                Calculus::LmmtVn | Calculus::Vc | Calculus::Ivc => n.ns == Namespace::Value,
                _ => true,
            },
            _ => false,
        }
    }

    /// Computations of the monadic value/computation calculi: terms that
    /// are not values.
    pub fn is_computation(&self) -> bool {
        self.class() == Class::Term && !self.is_value()
    }

    /// Co-values: co-variables, stacks, and (only in the moded calculus)
    /// μ̃-abstractions binding a value variable.
    pub fn is_covalue(&self) -> bool {
        if self.has_hole() {
            return false;
        }
        match &self.node {
            Node::CoVar(_) | Node::Cons(..) => true,
            Node::MuTilde(b, _) => {
                self.calculus == Calculus::LmmtVn && b.name.ns == Namespace::Value
            }
            _ => false,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.node {
            Node::Var(_) | Node::CoVar(_) | Node::Hole => vec![],
            Node::Lam(_, b) | Node::Mu(_, b) | Node::MuTilde(_, b) => vec![b],
            Node::Ret(t) | Node::CoApp(_, t) => vec![t],
            Node::Command(l, r) | Node::Cons(_, l, r) | Node::App(l, r) => vec![l, r],
            Node::Let(p, _, c) | Node::Sub(p, _, c) | Node::Bind(p, _, c) => vec![p, c],
        }
    }

    pub fn subexpr_at(&self, path: &[usize]) -> Option<&Expr> {
        let mut cur = self;
        for &i in path {
            cur = cur.children().into_iter().nth(i)?;
        }
        Some(cur)
    }

    /// Rebuild with the subexpression at `path` replaced. The rebuilt
    /// spine is re-validated.
    pub fn replace_at(&self, path: &[usize], new: Expr) -> Result<Expr, ExprError> {
        match path.split_first() {
            None => Ok(new),
            Some((&i, rest)) => {
                let mut node = self.node.clone();
                {
                    let slot: &mut Box<Expr> = match (&mut node, i) {
                        (Node::Lam(_, b), 0) | (Node::Mu(_, b), 0) | (Node::MuTilde(_, b), 0) => b,
                        (Node::Ret(t), 0) | (Node::CoApp(_, t), 0) => t,
                        (Node::Command(l, _), 0)
                        | (Node::Cons(_, l, _), 0)
                        | (Node::App(l, _), 0)
                        | (Node::Let(l, _, _), 0)
                        | (Node::Sub(l, _, _), 0)
                        | (Node::Bind(l, _, _), 0) => l,
                        (Node::Command(_, r), 1)
                        | (Node::Cons(_, _, r), 1)
                        | (Node::App(_, r), 1)
                        | (Node::Let(_, _, r), 1)
                        | (Node::Sub(_, _, r), 1)
                        | (Node::Bind(_, _, r), 1) => r,
                        _ => {
                            return Err(ExprError::ClassViolation {
                                place: "path step",
                                expected: "existing child index",
                                found: self.class(),
                            })
                        }
                    };
                    **slot = slot.replace_at(rest, new)?;
                }
                Expr::new(self.calculus, node)
            }
        }
    }

    /// Free variables and co-variables.
    pub fn free_names(&self) -> BTreeSet<Name> {
        fn go(e: &Expr, out: &mut BTreeSet<Name>, bound: &mut Vec<Name>) {
            match &e.node {
                Node::Var(n) | Node::CoVar(n) => {
                    if !bound.iter().any(|b| b == n) {
                        out.insert(n.clone());
                    }
                }
                Node::Hole => {}
                Node::Lam(b, body) | Node::Mu(b, body) | Node::MuTilde(b, body) => {
                    bound.push(b.name.clone());
                    go(body, out, bound);
                    bound.pop();
                }
                Node::Ret(t) => go(t, out, bound),
                Node::CoApp(a, t) => {
                    if !bound.iter().any(|b| b == a) {
                        out.insert(a.clone());
                    }
                    go(t, out, bound);
                }
                Node::Command(l, r) | Node::Cons(_, l, r) | Node::App(l, r) => {
                    go(l, out, bound);
                    go(r, out, bound);
                }
                Node::Let(p, b, c) | Node::Sub(p, b, c) | Node::Bind(p, b, c) => {
                    go(p, out, bound);
                    bound.push(b.name.clone());
                    go(c, out, bound);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out, &mut Vec::new());
        out
    }

    pub fn is_free_in(&self, name: &Name) -> bool {
        self.free_names().contains(name)
    }

    /// Every name occurring anywhere (free, bound, and binding positions);
    /// used for fresh-name avoidance.
    pub fn all_names(&self) -> BTreeSet<Name> {
        fn go(e: &Expr, out: &mut BTreeSet<Name>) {
            match &e.node {
                Node::Var(n) | Node::CoVar(n) => {
                    out.insert(n.clone());
                }
                Node::CoApp(a, _) => {
                    out.insert(a.clone());
                }
                Node::Lam(b, _) | Node::Mu(b, _) | Node::MuTilde(b, _) => {
                    out.insert(b.name.clone());
                }
                Node::Let(_, b, _) | Node::Sub(_, b, _) | Node::Bind(_, b, _) => {
                    out.insert(b.name.clone());
                }
                _ => {}
            }
            for c in e.children() {
                go(c, out);
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// All (rule-independent) subexpression paths, preorder.
    pub fn paths(&self) -> Vec<Path> {
        fn go(e: &Expr, prefix: &mut Path, out: &mut Vec<Path>) {
            out.push(prefix.clone());
            for (i, c) in e.children().into_iter().enumerate() {
                prefix.push(i);
                go(c, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

fn count_holes(node: &Node) -> usize {
    match node {
        Node::Hole => 1,
        Node::Var(_) | Node::CoVar(_) => 0,
        Node::Lam(_, b) | Node::Mu(_, b) | Node::MuTilde(_, b) | Node::Ret(b) | Node::CoApp(_, b) => {
            b.holes
        }
        Node::Command(l, r) | Node::Cons(_, l, r) | Node::App(l, r) => l.holes + r.holes,
        Node::Let(p, _, c) | Node::Sub(p, _, c) | Node::Bind(p, _, c) => p.holes + c.holes,
    }
}

fn expect_ns(
    calculus: Calculus,
    name: &Name,
    allowed: &[Namespace],
    place: &'static str,
    expected: &'static str,
) -> Result<(), ExprError> {
    if allowed.contains(&name.ns) {
        Ok(())
    } else {
        Err(ExprError::NamespaceViolation { name: name.clone(), place, expected, calculus })
    }
}

fn expect_class(
    e: &Expr,
    want_term: bool,
    place: &'static str,
    expected: &'static str,
) -> Result<(), ExprError> {
    // An immediate hole stands in for the class its position demands;
    // anything merely containing a hole does not (contexts are the base
    // shapes with the hole directly in the bound-term slot).
    if matches!(e.node, Node::Hole) {
        return Ok(());
    }
    let ok = match (want_term, e.class()) {
        (true, Class::Term) => true,
        (false, Class::CoTerm) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(ExprError::ClassViolation { place, expected, found: e.class() })
    }
}

fn expect_command(e: &Expr, place: &'static str) -> Result<(), ExprError> {
    if e.class() == Class::Command {
        Ok(())
    } else {
        Err(ExprError::ClassViolation { place, expected: "command", found: e.class() })
    }
}

fn expect_no_hole(e: &Expr, place: &'static str) -> Result<(), ExprError> {
    if e.has_hole() {
        Err(ExprError::HolePlacement(place))
    } else {
        Ok(())
    }
}

fn expect_same_calculus(calculus: Calculus, parts: &[&Expr]) -> Result<(), ExprError> {
    for p in parts {
        if p.calculus != calculus {
            return Err(ExprError::MixedCalculi(p.calculus, calculus));
        }
    }
    Ok(())
}

fn validate(calculus: Calculus, node: &Node) -> Result<(), ExprError> {
    use Calculus::*;
    let term_ns = calculus.term_namespaces();

    let reject = |what: &'static str| Err(ExprError::NodeNotInCalculus(what, calculus));

    match node {
        Node::Hole => match calculus {
            LmM | Vc => Ok(()),
            _ => Err(ExprError::HolePlacement("an expression of this calculus")),
        },
        Node::Var(n) => expect_ns(calculus, n, term_ns, "a variable occurrence", "term variable"),
        Node::CoVar(n) => match calculus {
            Lmmt | LmmtVn => {
                expect_ns(calculus, n, &[Namespace::Co], "a co-term position", "co-variable")
            }
            _ => reject("a bare co-variable co-term"),
        },
        Node::Lam(b, body) => {
            expect_same_calculus(calculus, &[body])?;
            expect_ns(calculus, &b.name, term_ns, "a lambda binder", "term variable")?;
            expect_no_hole(body, "a lambda body")?;
            match calculus {
                Vc | Ivc => {
                    if !body.is_computation() {
                        return Err(ExprError::ClassViolation {
                            place: "a lambda body",
                            expected: "computation",
                            found: body.class(),
                        });
                    }
                    Ok(())
                }
                _ => expect_class(body, true, "a lambda body", "term"),
            }
        }
        Node::Mu(b, body) => match calculus {
            Lmmt | LmmtVn | LmM | Vc => {
                expect_same_calculus(calculus, &[body])?;
                expect_ns(calculus, &b.name, &[Namespace::Co], "a mu binder", "co-variable")?;
                expect_no_hole(body, "a mu body")?;
                expect_command(body, "a mu body")
            }
            _ => reject("mu"),
        },
        Node::MuTilde(b, body) => match calculus {
            Lmmt | LmmtVn => {
                expect_same_calculus(calculus, &[body])?;
                expect_ns(calculus, &b.name, term_ns, "a mu-tilde binder", "term variable")?;
                expect_no_hole(body, "a mu-tilde body")?;
                expect_command(body, "a mu-tilde body")
            }
            _ => reject("mu-tilde"),
        },
        Node::Command(t, e) => match calculus {
            Lmmt | LmmtVn => {
                expect_same_calculus(calculus, &[t, e])?;
                expect_no_hole(t, "a command")?;
                expect_no_hole(e, "a command")?;
                expect_class(t, true, "the left side of a command", "term")?;
                expect_class(e, false, "the right side of a command", "co-term")
            }
            _ => reject("a command pair"),
        },
        Node::Cons(mode, u, e) => match calculus {
            Lmmt | LmmtVn => {
                expect_same_calculus(calculus, &[u, e])?;
                expect_no_hole(u, "a stack")?;
                expect_no_hole(e, "a stack")?;
                match (calculus, mode) {
                    (Lmmt, Some(_)) => {
                        return Err(ExprError::StackMode(calculus, "carry no mode annotation"))
                    }
                    (LmmtVn, None) => {
                        return Err(ExprError::StackMode(calculus, "must be ::v or ::n"))
                    }
                    _ => {}
                }
                expect_class(u, true, "a stack head", "term")?;
                expect_class(e, false, "a stack tail", "co-term")
            }
            _ => reject("a stack"),
        },
        Node::App(t, u) => match calculus {
            LmM | Stlc => {
                expect_same_calculus(calculus, &[t, u])?;
                expect_no_hole(t, "an application")?;
                expect_no_hole(u, "an application")?;
                expect_class(t, true, "an application head", "term")?;
                expect_class(u, true, "an application argument", "term")
            }
            Vc | Ivc => {
                expect_same_calculus(calculus, &[t, u])?;
                expect_no_hole(t, "an application")?;
                expect_no_hole(u, "an application")?;
                if !t.is_value() {
                    return Err(ExprError::ClassViolation {
                        place: "an application head",
                        expected: "value",
                        found: t.class(),
                    });
                }
                expect_class(u, true, "an application argument", "term")
            }
            _ => reject("application"),
        },
        Node::Ret(t) => match calculus {
            LmM => {
                expect_same_calculus(calculus, &[t])?;
                expect_no_hole(t, "ret")?;
                expect_class(t, true, "the argument of ret", "term")
            }
            Vc | Ivc => {
                expect_same_calculus(calculus, &[t])?;
                expect_no_hole(t, "ret")?;
                if t.is_value() {
                    Ok(())
                } else {
                    Err(ExprError::ClassViolation {
                        place: "the argument of ret",
                        expected: "value",
                        found: t.class(),
                    })
                }
            }
            _ => reject("ret"),
        },
        Node::CoApp(a, t) => match calculus {
            LmM | Vc => {
                expect_same_calculus(calculus, &[t])?;
                expect_ns(calculus, a, &[Namespace::Co], "a co-variable application", "co-variable")?;
                if calculus == Vc && !matches!(t.node, Node::Hole) && !t.is_computation() {
                    return Err(ExprError::ClassViolation {
                        place: "the argument of a co-variable application",
                        expected: "computation",
                        found: t.class(),
                    });
                }
                if calculus == LmM {
                    expect_class(t, true, "the argument of a co-variable application", "term")?;
                }
                Ok(())
            }
            _ => reject("co-variable application"),
        },
        Node::Let(p, b, c) => match calculus {
            Vc | Ivc => {
                expect_same_calculus(calculus, &[p, c])?;
                expect_ns(calculus, &b.name, &[Namespace::Value], "a let binder", "value variable")?;
                if calculus == Ivc {
                    expect_no_hole(p, "a let in the intuitionistic calculus")?;
                }
                if !matches!(p.node, Node::Hole) && !p.is_computation() {
                    return Err(ExprError::ClassViolation {
                        place: "the bound expression of a let",
                        expected: "computation",
                        found: p.class(),
                    });
                }
                expect_no_hole(c, "a let body")?;
                if calculus == Ivc {
                    if !c.is_computation() {
                        return Err(ExprError::ClassViolation {
                            place: "a let body",
                            expected: "computation",
                            found: c.class(),
                        });
                    }
                    Ok(())
                } else {
                    expect_command(c, "a let body")
                }
            }
            _ => reject("let"),
        },
        Node::Sub(p, b, c) => match calculus {
            Vc | Ivc => {
                expect_same_calculus(calculus, &[p, c])?;
                expect_ns(calculus, &b.name, &[Namespace::Comp], "a sub binder", "computation variable")?;
                if calculus == Ivc {
                    expect_no_hole(p, "a sub in the intuitionistic calculus")?;
                }
                if !matches!(p.node, Node::Hole) && !p.is_computation() {
                    return Err(ExprError::ClassViolation {
                        place: "the bound expression of a sub",
                        expected: "computation",
                        found: p.class(),
                    });
                }
                expect_no_hole(c, "a sub body")?;
                if calculus == Ivc {
                    if !c.is_computation() {
                        return Err(ExprError::ClassViolation {
                            place: "a sub body",
                            expected: "computation",
                            found: c.class(),
                        });
                    }
                    Ok(())
                } else {
                    expect_command(c, "a sub body")
                }
            }
            _ => reject("sub"),
        },
        Node::Bind(t, b, c) => match calculus {
            LmM => {
                expect_same_calculus(calculus, &[t, c])?;
                expect_ns(calculus, &b.name, term_ns, "a bind binder", "term variable")?;
                expect_class(t, true, "the bound term of a bind", "term")?;
                expect_no_hole(c, "a bind body")?;
                expect_command(c, "a bind body")
            }
            _ => reject("bind"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Name {
        Name::value(s)
    }

    #[test]
    fn vc_grammar_constraints() {
        let c = Calculus::Vc;
        let val = Expr::var(c, v("v")).unwrap();
        assert!(val.is_value());
        let comp = Expr::var(c, Name::comp("p")).unwrap();
        assert!(comp.is_computation());

        // ret takes values only
        assert!(Expr::ret(c, val.clone()).is_ok());
        assert!(Expr::ret(c, comp.clone()).is_err());

        // application heads must be values
        assert!(Expr::app(c, val.clone(), comp.clone()).is_ok());
        assert!(Expr::app(c, comp.clone(), val.clone()).is_err());

        // let binds value variables, sub binds computation variables
        let body = Expr::coapp(c, Name::co("a"), comp.clone()).unwrap();
        assert!(Expr::let_(c, comp.clone(), Binder::new(v("w")), body.clone()).is_ok());
        assert!(Expr::let_(c, comp.clone(), Binder::new(Name::comp("q")), body.clone()).is_err());
        assert!(Expr::sub(c, comp.clone(), Binder::new(Name::comp("q")), body.clone()).is_ok());
        assert!(Expr::sub(c, comp.clone(), Binder::new(v("w")), body).is_err());

        // no plain variables in vc
        assert!(Expr::var(c, Name::plain("x")).is_err());
    }

    #[test]
    fn lmmt_rejects_monadic_shapes() {
        let c = Calculus::Lmmt;
        let x = Expr::var(c, Name::plain("x")).unwrap();
        assert!(Expr::ret(c, x.clone()).is_err());
        assert!(Expr::app(c, x.clone(), x.clone()).is_err());
        let a = Expr::covar(c, Name::co("a")).unwrap();
        let cmd = Expr::command(c, x.clone(), a.clone()).unwrap();
        assert_eq!(cmd.class(), Class::Command);
        assert!(Expr::command(c, x.clone(), x.clone()).is_err());
        // stacks carry no mode in lmmt
        assert!(Expr::cons(c, Some(Mode::V), x.clone(), a.clone()).is_err());
        assert!(Expr::cons(c, None, x, a).is_ok());
    }

    #[test]
    fn vn_covalues() {
        let c = Calculus::LmmtVn;
        let cmd = Expr::command(
            c,
            Expr::var(c, v("w")).unwrap(),
            Expr::covar(c, Name::co("a")).unwrap(),
        )
        .unwrap();
        let mt_v = Expr::mu_tilde(c, Binder::new(v("w")), cmd.clone()).unwrap();
        assert!(mt_v.is_covalue());
        let mt_n = Expr::mu_tilde(c, Binder::new(Name::comp("n")), cmd).unwrap();
        assert!(!mt_n.is_covalue());
        // computation variables are terms but not values
        let n = Expr::var(c, Name::comp("n")).unwrap();
        assert!(!n.is_value());
        assert_eq!(n.class(), Class::Term);
    }

    #[test]
    fn holes_make_contexts() {
        let c = Calculus::Vc;
        let hole = Expr::hole(c);
        let body = Expr::coapp(c, Name::co("a"), Expr::var(c, Name::comp("p")).unwrap()).unwrap();
        let ctx = Expr::let_(c, hole, Binder::new(v("w")), body).unwrap();
        assert_eq!(ctx.class(), Class::Context);
        // a second hole cannot be smuggled in through the body
        let holed_body = Expr::coapp(c, Name::co("a"), Expr::hole(c)).unwrap();
        let res = Expr::let_(c, Expr::hole(c), Binder::new(v("w")), holed_body);
        assert!(matches!(res, Err(ExprError::HolePlacement(_))));
        // nor can the hole sit below the bound-expression slot
        let nested = Expr::coapp(c, Name::co("a"), Expr::hole(c)).unwrap();
        let res = Expr::coapp(c, Name::co("b"), nested);
        assert!(res.is_err());
    }

    #[test]
    fn free_names_respect_binders() {
        let c = Calculus::Vc;
        let body = Expr::coapp(
            c,
            Name::co("a"),
            Expr::ret(c, Expr::var(c, v("v")).unwrap()).unwrap(),
        )
        .unwrap();
        let e = Expr::let_(
            c,
            Expr::ret(c, Expr::var(c, v("w")).unwrap()).unwrap(),
            Binder::new(v("v")),
            body,
        )
        .unwrap();
        let free = e.free_names();
        assert!(free.contains(&Name::co("a")));
        assert!(free.contains(&v("w")));
        assert!(!free.contains(&v("v")));
    }

    #[test]
    fn replace_at_rebuilds() {
        let c = Calculus::Stlc;
        let x = Expr::var(c, Name::plain("x")).unwrap();
        let y = Expr::var(c, Name::plain("y")).unwrap();
        let app = Expr::app(c, x.clone(), x.clone()).unwrap();
        let swapped = app.replace_at(&[1], y.clone()).unwrap();
        assert_eq!(swapped, Expr::app(c, x, y).unwrap());
    }
}
