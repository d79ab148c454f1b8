//! Sequents `Γ |- subject [: A] [| Δ]`, typing derivations, and the
//! typecheckers for all six calculi.
//!
//! The checkers are bidirectional: μ, μ̃ and the binders of let/sub/bind may
//! stay unannotated wherever the expected type can be read off the
//! surroundings (a stated type, a function position, a bound expression
//! that infers). Reduction and translation manufacture exactly such
//! binders, so subject reduction and admissibility checks run on their
//! outputs unchanged.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::expr::{Binder, Calculus, Class, Expr, Node};
use crate::syntax::name::{Mode, Name, Namespace};
use crate::syntax::parse::SequentSyntax;
use crate::syntax::print::print_expr;
use crate::syntax::ty::TypeExpr;

/// A typing statement. `stated` is the claimed type of a term or co-term
/// subject (co-terms state the type they consume); commands state none.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequent {
    pub gamma: BTreeMap<Name, TypeExpr>,
    pub subject: Expr,
    pub stated: Option<TypeExpr>,
    pub delta: BTreeMap<Name, TypeExpr>,
}

impl Sequent {
    pub fn new(subject: Expr) -> Sequent {
        Sequent { gamma: BTreeMap::new(), subject, stated: None, delta: BTreeMap::new() }
    }

    pub fn stating(subject: Expr, ty: TypeExpr) -> Sequent {
        Sequent { gamma: BTreeMap::new(), subject, stated: Some(ty), delta: BTreeMap::new() }
    }

    pub fn with_var(mut self, name: Name, ty: TypeExpr) -> Sequent {
        self.gamma.insert(name, ty);
        self
    }

    pub fn with_covar(mut self, name: Name, ty: TypeExpr) -> Sequent {
        self.delta.insert(name, ty);
        self
    }

    /// Assemble from parsed surface syntax, rejecting duplicate
    /// declarations and declarations on the wrong side.
    pub fn from_syntax(s: SequentSyntax) -> Result<Sequent, TypeError> {
        let mut gamma = BTreeMap::new();
        for (n, t) in s.gamma {
            if n.ns == Namespace::Co {
                return Err(TypeError::WrongSide(n));
            }
            if gamma.insert(n.clone(), t).is_some() {
                return Err(TypeError::DuplicateDecl(n));
            }
        }
        let mut delta = BTreeMap::new();
        for (n, t) in s.delta {
            if delta.insert(n.clone(), t).is_some() {
                return Err(TypeError::DuplicateDecl(n));
            }
        }
        Ok(Sequent { gamma, subject: s.subject, stated: s.stated, delta })
    }

    /// The same statement about a different subject (used by subject
    /// reduction, which re-checks the reduct against the original types).
    pub fn with_subject(&self, subject: Expr) -> Sequent {
        Sequent {
            gamma: self.gamma.clone(),
            subject,
            stated: self.stated.clone(),
            delta: self.delta.clone(),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, t) in &self.gamma {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{t}")?;
            first = false;
        }
        if !first {
            write!(f, " ")?;
        }
        write!(f, "|- {}", print_expr(&self.subject))?;
        if let Some(t) = &self.stated {
            write!(f, " : {t}")?;
        }
        if !self.delta.is_empty() {
            write!(f, " |")?;
            let mut first = true;
            for (n, t) in &self.delta {
                write!(f, "{}{n}:{t}", if first { " " } else { ", " })?;
                first = false;
            }
        }
        Ok(())
    }
}

/// A typing derivation: the applied rule, a rendering of what it
/// concluded, and the subderivations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: &'static str,
    pub conclusion: String,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: &'static str, conclusion: String) -> Derivation {
        Derivation { rule, conclusion, premises: Vec::new() }
    }

    pub fn rules_used(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule];
        for p in &self.premises {
            out.extend(p.rules_used());
        }
        out
    }

    /// Indented tree rendering, one `rule: conclusion` line per node.
    pub fn render(&self) -> String {
        fn go(d: &Derivation, depth: usize, out: &mut String) {
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push_str(d.rule);
            out.push_str(": ");
            out.push_str(&d.conclusion);
            out.push('\n');
            for p in &d.premises {
                go(p, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TypeError {
    #[error("unbound variable {0}")]
    Unbound(Name),
    #[error("unbound co-variable {0}")]
    UnboundCo(Name),
    #[error("{place}: expected {expected}, found {found}")]
    Mismatch { place: String, expected: String, found: TypeExpr },
    #[error("{place} needs a type annotation")]
    NeedsAnnotation { place: String },
    #[error("type {ty} is not allowed here: {why}")]
    BadType { ty: TypeExpr, why: String },
    #[error("{0}")]
    BadSubject(String),
    #[error("{0} is declared twice")]
    DuplicateDecl(Name),
    #[error("{0} belongs on the co-variable side of the sequent")]
    WrongSide(Name),
    #[error("wrong calculus: expected {expected}, found {found}")]
    WrongCalculus { expected: Calculus, found: Calculus },
}

fn mismatch(place: impl Into<String>, expected: impl ToString, found: &TypeExpr) -> TypeError {
    TypeError::Mismatch {
        place: place.into(),
        expected: expected.to_string(),
        found: found.clone(),
    }
}

/// Is `ty` part of the calculus's type language? For `lm-M` with the
/// restricted implications, every arrow's codomain must be monadic; the
/// value/computation calculi split their types into value types and
/// monadic computation types (so `M (M A)` never occurs).
pub fn validate_type(calculus: Calculus, restricted: bool, ty: &TypeExpr) -> Result<(), TypeError> {
    let bad = |why: &str| {
        Err(TypeError::BadType { ty: ty.clone(), why: format!("{why} in {}", calculus.id()) })
    };
    match calculus {
        Calculus::Lmmt => match ty {
            TypeExpr::Var(_) => Ok(()),
            TypeExpr::Imp(None, a, b) => {
                validate_type(calculus, restricted, a)?;
                validate_type(calculus, restricted, b)
            }
            TypeExpr::Imp(Some(_), ..) => bad("arrows carry no mode"),
            TypeExpr::Monad(_) => bad("there is no M"),
            TypeExpr::Bot => bad("there is no Bot"),
        },
        Calculus::LmmtVn => match ty {
            TypeExpr::Var(_) => Ok(()),
            TypeExpr::Imp(Some(_), a, b) => {
                validate_type(calculus, restricted, a)?;
                validate_type(calculus, restricted, b)
            }
            TypeExpr::Imp(None, ..) => bad("every arrow is ->v or ->n"),
            TypeExpr::Monad(_) => bad("there is no M"),
            TypeExpr::Bot => bad("there is no Bot"),
        },
        Calculus::LmM => match ty {
            TypeExpr::Var(_) => Ok(()),
            TypeExpr::Imp(None, a, b) => {
                if restricted && !b.is_monadic() {
                    return bad("restricted arrows end in an M type");
                }
                validate_type(calculus, restricted, a)?;
                validate_type(calculus, restricted, b)
            }
            TypeExpr::Imp(Some(_), ..) => bad("arrows carry no mode"),
            TypeExpr::Monad(a) => validate_type(calculus, restricted, a),
            TypeExpr::Bot => bad("there is no Bot"),
        },
        Calculus::Vc | Calculus::Ivc => {
            if vc_value_type(ty) || vc_comp_type(ty) {
                Ok(())
            } else {
                bad("types are value types or M of a value type")
            }
        }
        Calculus::Stlc => match ty {
            TypeExpr::Var(_) | TypeExpr::Bot => Ok(()),
            TypeExpr::Imp(None, a, b) => {
                validate_type(calculus, restricted, a)?;
                validate_type(calculus, restricted, b)
            }
            TypeExpr::Imp(Some(_), ..) => bad("arrows carry no mode"),
            TypeExpr::Monad(_) => bad("there is no M"),
        },
    }
}

/// Value types of the value/computation calculi: atoms and arrows.
pub fn vc_value_type(ty: &TypeExpr) -> bool {
    match ty {
        TypeExpr::Var(_) => true,
        TypeExpr::Imp(None, a, c) => (vc_value_type(a) || vc_comp_type(a)) && vc_comp_type(c),
        _ => false,
    }
}

/// Computation types: `M B` for a value type `B`.
pub fn vc_comp_type(ty: &TypeExpr) -> bool {
    matches!(ty, TypeExpr::Monad(b) if vc_value_type(b))
}

struct Ck {
    calculus: Calculus,
    restricted: bool,
    gamma: BTreeMap<Name, TypeExpr>,
    delta: BTreeMap<Name, TypeExpr>,
}

impl Ck {
    fn describe(e: &Expr) -> String {
        print_expr(e)
    }

    fn concl(e: &Expr, ty: &TypeExpr) -> String {
        format!("{} : {}", print_expr(e), ty)
    }

    fn check_ann(&self, ty: &TypeExpr) -> Result<(), TypeError> {
        validate_type(self.calculus, self.restricted, ty)
    }

    /// In the value/computation calculi the namespace of a variable fixes
    /// the kind of its type.
    fn check_moded(&self, name: &Name, ty: &TypeExpr) -> Result<(), TypeError> {
        if !matches!(self.calculus, Calculus::Vc | Calculus::Ivc) {
            return Ok(());
        }
        let ok = match name.ns {
            Namespace::Value => vc_value_type(ty),
            Namespace::Comp => vc_comp_type(ty),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(TypeError::BadType {
                ty: ty.clone(),
                why: format!(
                    "{name} is a {}, which takes a {} type",
                    name.ns.describe(),
                    if name.ns == Namespace::Value { "value" } else { "computation" }
                ),
            })
        }
    }

    fn lookup(&self, n: &Name) -> Result<TypeExpr, TypeError> {
        self.gamma.get(n).cloned().ok_or_else(|| TypeError::Unbound(n.clone()))
    }

    fn lookup_co(&self, n: &Name) -> Result<TypeExpr, TypeError> {
        self.delta.get(n).cloned().ok_or_else(|| TypeError::UnboundCo(n.clone()))
    }

    /// Run `f` with `name : ty` in scope, restoring any shadowed binding.
    fn with_var<T>(
        &mut self,
        name: &Name,
        ty: TypeExpr,
        f: impl FnOnce(&mut Ck) -> Result<T, TypeError>,
    ) -> Result<T, TypeError> {
        let old = self.gamma.insert(name.clone(), ty);
        let r = f(self);
        match old {
            Some(t) => self.gamma.insert(name.clone(), t),
            None => self.gamma.remove(name),
        };
        r
    }

    fn with_covar<T>(
        &mut self,
        name: &Name,
        ty: TypeExpr,
        f: impl FnOnce(&mut Ck) -> Result<T, TypeError>,
    ) -> Result<T, TypeError> {
        let old = self.delta.insert(name.clone(), ty);
        let r = f(self);
        match old {
            Some(t) => self.delta.insert(name.clone(), t),
            None => self.delta.remove(name),
        };
        r
    }

    fn binder_ty(&self, b: &Binder, place: &str) -> Result<TypeExpr, TypeError> {
        match &b.ann {
            Some(t) => {
                self.check_ann(t)?;
                self.check_moded(&b.name, t)?;
                Ok(t.clone())
            }
            None => Err(TypeError::NeedsAnnotation { place: format!("{place} {}", b.name) }),
        }
    }

    /// Reconcile a binder's annotation with a type forced by the context.
    fn binder_against(&self, b: &Binder, forced: &TypeExpr, place: &str) -> Result<(), TypeError> {
        self.check_ann(forced)?;
        self.check_moded(&b.name, forced)?;
        if let Some(ann) = &b.ann {
            if ann != forced {
                return Err(mismatch(format!("{place} {}", b.name), forced, ann));
            }
        }
        Ok(())
    }

    // ---- terms and co-terms, common entry points ----

    fn infer_term(&mut self, e: &Expr) -> Result<(TypeExpr, Derivation), TypeError> {
        match &e.node {
            Node::Var(n) => {
                let ty = self.lookup(n)?;
                let rule = match (self.calculus, n.ns) {
                    (Calculus::Vc | Calculus::Ivc, Namespace::Value) => "Axv",
                    (Calculus::Vc | Calculus::Ivc, Namespace::Comp) => "Axc",
                    _ => "Ax",
                };
                Ok((ty.clone(), Derivation::leaf(rule, Ck::concl(e, &ty))))
            }
            Node::Lam(b, body) => {
                let dom = self.binder_ty(b, "the lambda binder")?;
                let (cod, d) = self.with_var(&b.name.clone(), dom.clone(), |ck| {
                    ck.infer_term(body)
                })?;
                let ty = self.arrow_for_binder(&b.name, dom, cod)?;
                Ok((ty.clone(), Derivation {
                    rule: self.intro_rule(&b.name),
                    conclusion: Ck::concl(e, &ty),
                    premises: vec![d],
                }))
            }
            Node::Mu(b, body) => {
                let ty = self.binder_ty(b, "the mu binder")?;
                self.check_co_ty(&ty)?;
                let d = self.with_covar(&b.name.clone(), ty.clone(), |ck| ck.check_command(body))?;
                Ok((ty.clone(), Derivation {
                    rule: "Act",
                    conclusion: Ck::concl(e, &ty),
                    premises: vec![d],
                }))
            }
            Node::App(t, u) => self.infer_app(e, t, u),
            Node::Ret(t) => {
                let (a, d) = self.infer_term(t)?;
                let ty = TypeExpr::monad(a);
                Ok((ty.clone(), Derivation {
                    rule: "Ret",
                    conclusion: Ck::concl(e, &ty),
                    premises: vec![d],
                }))
            }
            Node::Let(..) | Node::Sub(..) if self.calculus == Calculus::Ivc => {
                self.infer_ivc_let(e)
            }
            _ => Err(TypeError::BadSubject(format!(
                "{} is not a term of {}",
                e.node.describe(),
                self.calculus.id()
            ))),
        }
    }

    fn check_term(&mut self, e: &Expr, want: &TypeExpr) -> Result<Derivation, TypeError> {
        match &e.node {
            Node::Lam(b, body) => {
                let (dom, cod) = self.split_arrow_for_binder(&b.name, want, e)?;
                self.binder_against(b, &dom, "the lambda binder")?;
                let d = self.with_var(&b.name.clone(), dom, |ck| ck.check_term(body, &cod))?;
                Ok(Derivation {
                    rule: self.intro_rule(&b.name),
                    conclusion: Ck::concl(e, want),
                    premises: vec![d],
                })
            }
            Node::Mu(b, body) => {
                self.check_co_ty(want)?;
                self.binder_against(b, want, "the mu binder")?;
                let d =
                    self.with_covar(&b.name.clone(), want.clone(), |ck| ck.check_command(body))?;
                Ok(Derivation {
                    rule: "Act",
                    conclusion: Ck::concl(e, want),
                    premises: vec![d],
                })
            }
            Node::Ret(t) => match want {
                TypeExpr::Monad(a) => {
                    let d = self.check_term(t, a)?;
                    Ok(Derivation {
                        rule: "Ret",
                        conclusion: Ck::concl(e, want),
                        premises: vec![d],
                    })
                }
                _ => Err(mismatch(format!("ret {}", Ck::describe(t)), "an M type", want)),
            },
            Node::Let(..) | Node::Sub(..) if self.calculus == Calculus::Ivc => {
                let (got, d) = self.infer_ivc_let(e)?;
                if &got == want {
                    Ok(d)
                } else {
                    Err(mismatch(Ck::describe(e), want, &got))
                }
            }
            _ => {
                let (got, d) = self.infer_term(e)?;
                if &got == want {
                    Ok(d)
                } else {
                    Err(mismatch(Ck::describe(e), want, &got))
                }
            }
        }
    }

    /// Arrow introduced by a λ whose binder lives in `ns`: mode `v`/`n` in
    /// the moded sequent calculus, the plain arrow elsewhere.
    fn arrow_for_binder(
        &self,
        name: &Name,
        dom: TypeExpr,
        cod: TypeExpr,
    ) -> Result<TypeExpr, TypeError> {
        match self.calculus {
            Calculus::LmmtVn => {
                let mode = match name.ns {
                    Namespace::Value => Mode::V,
                    _ => Mode::N,
                };
                Ok(TypeExpr::imp_mode(mode, dom, cod))
            }
            _ => Ok(TypeExpr::imp(dom, cod)),
        }
    }

    fn split_arrow_for_binder(
        &self,
        name: &Name,
        want: &TypeExpr,
        e: &Expr,
    ) -> Result<(TypeExpr, TypeExpr), TypeError> {
        match (self.calculus, want) {
            (Calculus::LmmtVn, TypeExpr::Imp(Some(m), a, b)) => {
                if m.namespace() != name.ns {
                    return Err(mismatch(
                        Ck::describe(e),
                        format!("a binder of the {} namespace", m.namespace().describe()),
                        want,
                    ));
                }
                Ok((*a.clone(), *b.clone()))
            }
            (_, TypeExpr::Imp(None, a, b)) if self.calculus != Calculus::LmmtVn => {
                Ok((*a.clone(), *b.clone()))
            }
            _ => Err(mismatch(Ck::describe(e), "an arrow type", want)),
        }
    }

    fn intro_rule(&self, name: &Name) -> &'static str {
        match self.calculus {
            Calculus::Lmmt => "R-imp",
            Calculus::LmmtVn => {
                if name.ns == Namespace::Value {
                    "R-imp-v"
                } else {
                    "R-imp-n"
                }
            }
            _ => "Intro",
        }
    }

    /// Types co-variables may carry: computation types in `vc`, anything
    /// in the others.
    fn check_co_ty(&self, ty: &TypeExpr) -> Result<(), TypeError> {
        if self.calculus == Calculus::Vc && !vc_comp_type(ty) {
            return Err(TypeError::BadType {
                ty: ty.clone(),
                why: "co-variables consume computations, so their type is an M type".into(),
            });
        }
        Ok(())
    }

    // ---- sequent-calculus co-terms ----

    fn infer_coterm(&mut self, e: &Expr) -> Result<(TypeExpr, Derivation), TypeError> {
        match &e.node {
            Node::CoVar(n) => {
                let ty = self.lookup_co(n)?;
                Ok((ty.clone(), Derivation::leaf("CoAx", Ck::concl(e, &ty))))
            }
            Node::Cons(mode, u, tail) => {
                let (a, du) = self.infer_term(u)?;
                let (b, de) = self.infer_coterm(tail)?;
                let ty = match mode {
                    Some(m) => TypeExpr::imp_mode(*m, a, b),
                    None => TypeExpr::imp(a, b),
                };
                Ok((ty.clone(), Derivation {
                    rule: self.limp_rule(*mode),
                    conclusion: Ck::concl(e, &ty),
                    premises: vec![du, de],
                }))
            }
            Node::MuTilde(b, body) => {
                let ty = self.binder_ty(b, "the mt binder")?;
                let d = self.with_var(&b.name.clone(), ty.clone(), |ck| ck.check_command(body))?;
                Ok((ty.clone(), Derivation {
                    rule: "Mt",
                    conclusion: Ck::concl(e, &ty),
                    premises: vec![d],
                }))
            }
            _ => Err(TypeError::BadSubject(format!(
                "{} is not a co-term of {}",
                e.node.describe(),
                self.calculus.id()
            ))),
        }
    }

    fn check_coterm(&mut self, e: &Expr, want: &TypeExpr) -> Result<Derivation, TypeError> {
        match &e.node {
            Node::Cons(mode, u, tail) => {
                let (a, b) = match (mode, want) {
                    (Some(m), TypeExpr::Imp(Some(wm), a, b)) => {
                        if m != wm {
                            return Err(mismatch(
                                Ck::describe(e),
                                format!("a stack of mode {}", wm.suffix()),
                                want,
                            ));
                        }
                        (*a.clone(), *b.clone())
                    }
                    (None, TypeExpr::Imp(None, a, b)) => (*a.clone(), *b.clone()),
                    _ => return Err(mismatch(Ck::describe(e), "an arrow type", want)),
                };
                let du = self.check_term(u, &a)?;
                let de = self.check_coterm(tail, &b)?;
                Ok(Derivation {
                    rule: self.limp_rule(*mode),
                    conclusion: Ck::concl(e, want),
                    premises: vec![du, de],
                })
            }
            Node::MuTilde(b, body) => {
                self.binder_against(b, want, "the mt binder")?;
                let d = self.with_var(&b.name.clone(), want.clone(), |ck| ck.check_command(body))?;
                Ok(Derivation {
                    rule: "Mt",
                    conclusion: Ck::concl(e, want),
                    premises: vec![d],
                })
            }
            _ => {
                let (got, d) = self.infer_coterm(e)?;
                if &got == want {
                    Ok(d)
                } else {
                    Err(mismatch(Ck::describe(e), want, &got))
                }
            }
        }
    }

    fn limp_rule(&self, mode: Option<Mode>) -> &'static str {
        match mode {
            None => "L-imp",
            Some(Mode::V) => "L-imp-v",
            Some(Mode::N) => "L-imp-n",
        }
    }

    // ---- commands ----

    fn check_command(&mut self, e: &Expr) -> Result<Derivation, TypeError> {
        match &e.node {
            Node::Command(t, co) => {
                // a cut has no stated type: pull it from whichever side
                // infers, then push it into the other
                let (dt, de) = match self.infer_term(t) {
                    Ok((a, dt)) => (dt, self.check_coterm(co, &a)?),
                    Err(term_err) => match self.infer_coterm(co) {
                        Ok((a, de)) => (self.check_term(t, &a)?, de),
                        Err(_) => return Err(term_err),
                    },
                };
                Ok(Derivation {
                    rule: "Cut",
                    conclusion: Ck::describe(e),
                    premises: vec![dt, de],
                })
            }
            Node::CoApp(a, t) => {
                let ty = self.lookup_co(a)?;
                let d = self.check_term(t, &ty)?;
                Ok(Derivation {
                    rule: "Pass",
                    conclusion: Ck::describe(e),
                    premises: vec![d],
                })
            }
            Node::Let(p, b, c) => {
                let (bty, dp) = self.bound_comp_ty(p, b)?;
                let inner = match &bty {
                    TypeExpr::Monad(inner) => *inner.clone(),
                    other => {
                        return Err(mismatch(Ck::describe(p), "an M type", other));
                    }
                };
                let dc = self.with_var(&b.name.clone(), inner, |ck| ck.check_command(c))?;
                Ok(Derivation {
                    rule: "Let",
                    conclusion: Ck::describe(e),
                    premises: vec![dp, dc],
                })
            }
            Node::Sub(p, b, c) => {
                let (bty, dp) = self.bound_comp_ty_sub(p, b)?;
                let dc = self.with_var(&b.name.clone(), bty, |ck| ck.check_command(c))?;
                Ok(Derivation {
                    rule: "Sub",
                    conclusion: Ck::describe(e),
                    premises: vec![dp, dc],
                })
            }
            Node::Bind(t, b, c) => {
                let (bty, dt) = match &b.ann {
                    Some(a) => {
                        self.check_ann(a)?;
                        let m = TypeExpr::monad(a.clone());
                        (a.clone(), self.check_term(t, &m)?)
                    }
                    None => {
                        let (ty, dt) = self.infer_term(t)?;
                        match ty {
                            TypeExpr::Monad(inner) => (*inner, dt),
                            other => {
                                return Err(mismatch(Ck::describe(t), "an M type", &other));
                            }
                        }
                    }
                };
                let dc = self.with_var(&b.name.clone(), bty, |ck| ck.check_command(c))?;
                Ok(Derivation {
                    rule: "Bind",
                    conclusion: Ck::describe(e),
                    premises: vec![dt, dc],
                })
            }
            _ => Err(TypeError::BadSubject(format!(
                "{} is not a command of {}",
                e.node.describe(),
                self.calculus.id()
            ))),
        }
    }

    /// Type the bound computation of a let: the binder holds the type
    /// under the M, so an annotated binder checks the computation against
    /// `M ann`.
    fn bound_comp_ty(
        &mut self,
        p: &Expr,
        b: &Binder,
    ) -> Result<(TypeExpr, Derivation), TypeError> {
        match &b.ann {
            Some(a) => {
                self.check_ann(a)?;
                self.check_moded(&b.name, a)?;
                let m = TypeExpr::monad(a.clone());
                let d = self.check_term(p, &m)?;
                Ok((m, d))
            }
            None => self.infer_term(p),
        }
    }

    /// The bound computation of a sub: the binder takes the computation
    /// type itself.
    fn bound_comp_ty_sub(
        &mut self,
        p: &Expr,
        b: &Binder,
    ) -> Result<(TypeExpr, Derivation), TypeError> {
        match &b.ann {
            Some(a) => {
                self.check_ann(a)?;
                self.check_moded(&b.name, a)?;
                let d = self.check_term(p, a)?;
                Ok((a.clone(), d))
            }
            None => self.infer_term(p),
        }
    }

    // ---- applications ----

    fn infer_app(&mut self, e: &Expr, t: &Expr, u: &Expr) -> Result<(TypeExpr, Derivation), TypeError> {
        let (fty, dt) = self.infer_term(t)?;
        let (dom, cod) = match &fty {
            TypeExpr::Imp(None, a, b) => (*a.clone(), *b.clone()),
            _ => return Err(mismatch(Ck::describe(t), "an arrow type", &fty)),
        };
        let du = self.check_term(u, &dom)?;
        Ok((cod.clone(), Derivation {
            rule: "Elim",
            conclusion: Ck::concl(e, &cod),
            premises: vec![dt, du],
        }))
    }

    // ---- intuitionistic let/sub as terms ----

    fn infer_ivc_let(&mut self, e: &Expr) -> Result<(TypeExpr, Derivation), TypeError> {
        match &e.node {
            Node::Let(p, b, q) => {
                let (bty, dp) = self.bound_comp_ty(p, b)?;
                let inner = match &bty {
                    TypeExpr::Monad(inner) => *inner.clone(),
                    other => return Err(mismatch(Ck::describe(p), "an M type", other)),
                };
                let (ty, dq) = self.with_var(&b.name.clone(), inner, |ck| ck.infer_term(q))?;
                Ok((ty.clone(), Derivation {
                    rule: "Let",
                    conclusion: Ck::concl(e, &ty),
                    premises: vec![dp, dq],
                }))
            }
            Node::Sub(p, b, q) => {
                let (bty, dp) = self.bound_comp_ty_sub(p, b)?;
                let (ty, dq) = self.with_var(&b.name.clone(), bty, |ck| ck.infer_term(q))?;
                Ok((ty.clone(), Derivation {
                    rule: "Sub",
                    conclusion: Ck::concl(e, &ty),
                    premises: vec![dp, dq],
                }))
            }
            _ => unreachable!("guarded by the caller"),
        }
    }
}

/// Check a sequent, producing the full derivation. For term and co-term
/// subjects without a stated type the type is inferred; `restricted`
/// selects the `lm-M` variant whose arrows all end in an M type.
pub fn check_sequent(seq: &Sequent, restricted: bool) -> Result<Derivation, TypeError> {
    let calculus = seq.subject.calculus;
    let mut ck = Ck {
        calculus,
        restricted,
        gamma: seq.gamma.clone(),
        delta: seq.delta.clone(),
    };
    for (n, t) in &seq.gamma {
        if !matches!(
            (calculus, n.ns),
            (Calculus::Lmmt | Calculus::LmM, Namespace::Plain)
                | (Calculus::LmmtVn | Calculus::Vc | Calculus::Ivc, Namespace::Value)
                | (Calculus::LmmtVn | Calculus::Vc | Calculus::Ivc, Namespace::Comp)
                | (Calculus::Stlc, Namespace::Plain)
                | (Calculus::Stlc, Namespace::Value)
                | (Calculus::Stlc, Namespace::Comp)
        ) {
            return Err(TypeError::BadSubject(format!(
                "{n} cannot be declared left of |- in {}",
                calculus.id()
            )));
        }
        ck.check_ann(t)?;
        ck.check_moded(n, t)?;
    }
    if !seq.delta.is_empty()
        && matches!(calculus, Calculus::Ivc | Calculus::Stlc)
    {
        return Err(TypeError::BadSubject(format!(
            "{} sequents have no co-variable side",
            calculus.id()
        )));
    }
    for t in seq.delta.values() {
        ck.check_ann(t)?;
        ck.check_co_ty(t)?;
    }

    match seq.subject.class() {
        Class::Command => {
            if seq.stated.is_some() {
                return Err(TypeError::BadSubject(
                    "a command states no type; drop the ': A' part".into(),
                ));
            }
            ck.check_command(&seq.subject)
        }
        Class::Term => match &seq.stated {
            Some(ty) => {
                ck.check_ann(ty)?;
                ck.check_term(&seq.subject, ty)
            }
            None => Ok(ck.infer_term(&seq.subject)?.1),
        },
        Class::CoTerm => match &seq.stated {
            Some(ty) => {
                ck.check_ann(ty)?;
                ck.check_coterm(&seq.subject, ty)
            }
            None => Ok(ck.infer_coterm(&seq.subject)?.1),
        },
        Class::Context => Err(TypeError::BadSubject(
            "a context is not typed directly; fill its hole first".into(),
        )),
    }
}

/// Infer the type of a term or co-term under the sequent's environment
/// (`None` for a command subject).
pub fn infer_type(seq: &Sequent, restricted: bool) -> Result<(Option<TypeExpr>, Derivation), TypeError> {
    let mut ck = Ck {
        calculus: seq.subject.calculus,
        restricted,
        gamma: seq.gamma.clone(),
        delta: seq.delta.clone(),
    };
    match seq.subject.class() {
        Class::Command => Ok((None, check_sequent(seq, restricted)?)),
        Class::Term => {
            if let Some(t) = &seq.stated {
                let d = check_sequent(seq, restricted)?;
                return Ok((Some(t.clone()), d));
            }
            let (t, d) = ck.infer_term(&seq.subject)?;
            Ok((Some(t), d))
        }
        Class::CoTerm => {
            if let Some(t) = &seq.stated {
                let d = check_sequent(seq, restricted)?;
                return Ok((Some(t.clone()), d));
            }
            let (t, d) = ck.infer_coterm(&seq.subject)?;
            Ok((Some(t), d))
        }
        Class::Context => Err(TypeError::BadSubject(
            "a context is not typed directly; fill its hole first".into(),
        )),
    }
}
