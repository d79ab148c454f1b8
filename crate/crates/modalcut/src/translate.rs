//! Maps between the calculi.
//!
//! The centerpiece is the monadic translation [`mtr`] from the moded
//! sequent calculus into the value/computation calculus: terms become
//! computations, values become values, co-terms become one-hole contexts,
//! and commands become commands. The μ̃ modes come out as the difference
//! between `let` and `sub`, and the stack modes as the difference between
//! a `let`- and a `sub`-bound argument. Composing with the continuations
//! instantiation [`cm`] — which reads `M B` as the double negation
//! `~~B` — yields a CPS translation [`cps`] into the λ-calculus with
//! value-restricted β.
//!
//! In the other direction sit the forgetful maps — [`forget_vn`] erases
//! modes into the plain sequent calculus, [`forget_vc`] erases the
//! value/computation split into the monadic λ-calculus, landing in the
//! variant with the delayed β rule — and the embeddings [`embed_cbv`] and
//! [`embed_cbn`], which decorate the plain sequent calculus with one fixed
//! mode.
//!
//! Naming. The λ-calculus target keeps the `%`/`#` sigils of translated
//! variables, and source co-variables turn into plain continuation
//! variables of the same base. The forgetful maps target calculi with a
//! single term namespace, so `%x` and `#x` are both stripped to `x`; when
//! the bare name is claimed twice, the claimants are kept apart as `x_v`
//! and `x_n`. Binders a translation introduces (`f`, `w`, `q` for argument
//! sequencing; `k`, `x`, `w` for continuations) draw fresh names from the
//! session, avoiding everything in sight.
//!
//! Annotations travel: source binder annotations are translated along, and
//! the continuations instantiation also annotates the binders it
//! introduces whenever the annotations at hand determine their types — in
//! particular the abstractions it puts into application-head position,
//! which a bidirectional checker cannot type unaided.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rules::RuleId;
use crate::syntax::{
    fill, Binder, Calculus, Class, Expr, Mode, Name, Namespace, Node, Session, TypeExpr,
};
use crate::typing::Sequent;

/// What a translation produced: the image, its syntactic class in the
/// target calculus, and — when the operation works on types — the image of
/// the stated type. The expression-level operations leave `type_image`
/// empty; the sequent-level ones carry types in the returned [`Sequent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationOutput {
    pub result: Expr,
    pub result_kind: Class,
    pub type_image: Option<TypeExpr>,
}

fn out(result: Expr) -> TranslationOutput {
    TranslationOutput { result_kind: result.class(), type_image: None, result }
}

/// Which of the two type images of the monadic translation to produce:
/// the value type itself, or the computation type wrapping it in `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Value,
    Computation,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TranslateError {
    #[error("wrong calculus: expected {expected}, found {found}")]
    WrongCalculus { expected: Calculus, found: Calculus },
    #[error("{op} translates {expected}, found a {found}")]
    WrongInput { op: &'static str, expected: &'static str, found: &'static str },
    #[error("{op} does not apply to {ty}: {why}")]
    BadSourceType { op: &'static str, ty: TypeExpr, why: &'static str },
    #[error("{0} cannot be declared in this context")]
    BadDeclaration(Name),
    #[error("a co-term subject needs a stated type, which types the variable put into its hole")]
    NeedsStatedType,
}

fn guard(e: &Expr, expected: Calculus) -> Result<(), TranslateError> {
    if e.calculus == expected {
        Ok(())
    } else {
        Err(TranslateError::WrongCalculus { expected, found: e.calculus })
    }
}

/// How an expression presents itself in error messages.
fn describe(e: &Expr) -> &'static str {
    match e.class() {
        Class::Term => {
            if e.is_value() {
                "value"
            } else if matches!(e.calculus, Calculus::Vc | Calculus::Ivc) {
                "computation"
            } else {
                "non-value term"
            }
        }
        Class::CoTerm => "co-term",
        Class::Command => "command",
        Class::Context => "context",
    }
}

const GRAMMAR: &str = "images stay within the target grammar";

/// Mint a fresh name of `(ns, base)` whose index clears everything in the
/// given expressions (bound or free) and the extra names.
fn mint(
    session: &mut Session,
    ns: Namespace,
    base: &str,
    avoid: &[&Expr],
    extra: &[&Name],
) -> Name {
    let mut taken = Vec::new();
    for e in avoid {
        for n in e.all_names() {
            if n.ns == ns && n.base == base {
                taken.push(n.index);
            }
        }
    }
    for n in extra {
        if n.ns == ns && n.base == base {
            taken.push(n.index);
        }
    }
    let index = session.fresh_index(ns, base, taken.into_iter());
    Name { ns, base: base.to_string(), index }
}

// ---------------------------------------------------------------------
// The monadic translation: moded sequent calculus → value/computation
// ---------------------------------------------------------------------

/// Type image of the monadic translation. The value image sends `X` to
/// `X`, `A ->v B` to `A° -> M B°`, and `A ->n B` to `M A° -> M B°`; the
/// computation image is the value image under `M`.
pub fn mtr_type(a: &TypeExpr, flavor: Flavor) -> Result<TypeExpr, TranslateError> {
    let v = mtr_type_value(a)?;
    Ok(match flavor {
        Flavor::Value => v,
        Flavor::Computation => TypeExpr::monad(v),
    })
}

fn mtr_type_value(a: &TypeExpr) -> Result<TypeExpr, TranslateError> {
    const OP: &str = "the monadic type translation";
    match a {
        TypeExpr::Var(s) => Ok(TypeExpr::var(s)),
        TypeExpr::Imp(Some(Mode::V), dom, cod) => Ok(TypeExpr::imp(
            mtr_type_value(dom)?,
            mtr_type(cod, Flavor::Computation)?,
        )),
        TypeExpr::Imp(Some(Mode::N), dom, cod) => Ok(TypeExpr::imp(
            mtr_type(dom, Flavor::Computation)?,
            mtr_type(cod, Flavor::Computation)?,
        )),
        TypeExpr::Imp(None, ..) => Err(TranslateError::BadSourceType {
            op: OP,
            ty: a.clone(),
            why: "every arrow of the moded calculus is ->v or ->n",
        }),
        TypeExpr::Monad(_) => Err(TranslateError::BadSourceType {
            op: OP,
            ty: a.clone(),
            why: "there is no M in the moded calculus",
        }),
        TypeExpr::Bot => Err(TranslateError::BadSourceType {
            op: OP,
            ty: a.clone(),
            why: "there is no Bot in the moded calculus",
        }),
    }
}

/// Monadic translation of a moded expression. Terms map to computations
/// (values `V` to `ret V°`), values to values, co-terms to one-hole
/// contexts, commands to commands.
pub fn mtr(e: &Expr, session: &mut Session) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::LmmtVn)?;
    let result = match e.class() {
        Class::Term => mtr_term(e, session)?,
        Class::CoTerm => mtr_coterm(e, session)?,
        Class::Command => mtr_cmd(e, session)?,
        Class::Context => unreachable!("the moded calculus has no contexts"),
    };
    Ok(out(result))
}

/// The value half of the monadic translation, `V°`: variables stay
/// variables and `\x. t` becomes `\x. t-bar`.
pub fn mtr_value(e: &Expr, session: &mut Session) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::LmmtVn)?;
    if !e.is_value() {
        return Err(TranslateError::WrongInput {
            op: "the value translation",
            expected: "a value",
            found: describe(e),
        });
    }
    Ok(out(mtr_value_inner(e, session)?))
}

fn mtr_binder(b: &Binder, flavor: Flavor) -> Result<Binder, TranslateError> {
    let ann = b.ann.as_ref().map(|a| mtr_type(a, flavor)).transpose()?;
    Ok(Binder { name: b.name.clone(), ann })
}

fn mtr_flavor_of(ns: Namespace) -> Flavor {
    if ns == Namespace::Value {
        Flavor::Value
    } else {
        Flavor::Computation
    }
}

fn mtr_value_inner(e: &Expr, session: &mut Session) -> Result<Expr, TranslateError> {
    let cx = Calculus::Vc;
    match &e.node {
        Node::Var(n) => Ok(Expr::var(cx, n.clone()).expect(GRAMMAR)),
        Node::Lam(b, body) => {
            let b2 = mtr_binder(b, mtr_flavor_of(b.name.ns))?;
            let body2 = mtr_term(body, session)?;
            Ok(Expr::lam(cx, b2, body2).expect(GRAMMAR))
        }
        _ => unreachable!("values are variables and lambdas"),
    }
}

fn mtr_term(e: &Expr, session: &mut Session) -> Result<Expr, TranslateError> {
    let cx = Calculus::Vc;
    if e.is_value() {
        let v = mtr_value_inner(e, session)?;
        return Ok(Expr::ret(cx, v).expect(GRAMMAR));
    }
    match &e.node {
        Node::Var(n) => Ok(Expr::var(cx, n.clone()).expect(GRAMMAR)),
        Node::Mu(b, c) => {
            let b2 = mtr_binder(b, Flavor::Computation)?;
            let c2 = mtr_cmd(c, session)?;
            Ok(Expr::mu(cx, b2, c2).expect(GRAMMAR))
        }
        _ => unreachable!("a non-value term of the moded calculus is a variable or a mu"),
    }
}

fn mtr_cmd(e: &Expr, session: &mut Session) -> Result<Expr, TranslateError> {
    match &e.node {
        Node::Command(t, co) => {
            let tbar = mtr_term(t, session)?;
            let ctx = mtr_coterm(co, session)?;
            Ok(fill(&ctx, &tbar).expect("co-term images accept a computation in their hole"))
        }
        _ => unreachable!("commands of the moded calculus are cuts"),
    }
}

fn mtr_coterm(e: &Expr, session: &mut Session) -> Result<Expr, TranslateError> {
    let cx = Calculus::Vc;
    match &e.node {
        Node::CoVar(a) => Ok(Expr::coapp(cx, a.clone(), Expr::hole(cx)).expect(GRAMMAR)),
        Node::MuTilde(b, c) => {
            let cbar = mtr_cmd(c, session)?;
            if b.name.ns == Namespace::Value {
                let b2 = mtr_binder(b, Flavor::Value)?;
                Ok(Expr::let_(cx, Expr::hole(cx), b2, cbar).expect(GRAMMAR))
            } else {
                let b2 = mtr_binder(b, Flavor::Computation)?;
                Ok(Expr::sub(cx, Expr::hole(cx), b2, cbar).expect(GRAMMAR))
            }
        }
        Node::Cons(Some(mode), u, tail) => {
            let ubar = mtr_term(u, session)?;
            let ctx = mtr_coterm(tail, session)?;
            let f = mint(session, Namespace::Value, "f", &[&ubar, &ctx], &[]);
            let fv = Expr::var(cx, f.clone()).expect(GRAMMAR);
            let arg_name = match mode {
                Mode::V => mint(session, Namespace::Value, "w", &[&ubar, &ctx], &[]),
                Mode::N => mint(session, Namespace::Comp, "q", &[&ubar, &ctx], &[]),
            };
            let argv = Expr::var(cx, arg_name.clone()).expect(GRAMMAR);
            let call = Expr::app(cx, fv, argv).expect(GRAMMAR);
            let body = fill(&ctx, &call).expect("co-term images accept a computation in their hole");
            let inner = match mode {
                Mode::V => Expr::let_(cx, ubar, Binder::new(arg_name), body),
                Mode::N => Expr::sub(cx, ubar, Binder::new(arg_name), body),
            }
            .expect(GRAMMAR);
            Ok(Expr::let_(cx, Expr::hole(cx), Binder::new(f), inner).expect(GRAMMAR))
        }
        _ => unreachable!("co-terms of the moded calculus are co-variables, mu-tildes, and stacks"),
    }
}

/// Monadic translation of a whole sequent: `%v:A` becomes `%v:A°`, `#n:A`
/// becomes `#n:M A°`, every co-variable type is wrapped the same way, and
/// the subject is translated by class. A co-term subject turns into its
/// context image filled with a fresh computation variable, which joins the
/// context at the stated type's computation image.
pub fn mtr_sequent(seq: &Sequent, session: &mut Session) -> Result<Sequent, TranslateError> {
    guard(&seq.subject, Calculus::LmmtVn)?;
    let mut gamma = BTreeMap::new();
    for (n, t) in &seq.gamma {
        let flavor = match n.ns {
            Namespace::Value => Flavor::Value,
            Namespace::Comp => Flavor::Computation,
            _ => return Err(TranslateError::BadDeclaration(n.clone())),
        };
        gamma.insert(n.clone(), mtr_type(t, flavor)?);
    }
    let mut delta = BTreeMap::new();
    for (a, t) in &seq.delta {
        delta.insert(a.clone(), mtr_type(t, Flavor::Computation)?);
    }
    let (subject, stated) = match seq.subject.class() {
        Class::Term => (
            mtr_term(&seq.subject, session)?,
            seq.stated.as_ref().map(|t| mtr_type(t, Flavor::Computation)).transpose()?,
        ),
        Class::Command => (mtr_cmd(&seq.subject, session)?, None),
        Class::CoTerm => {
            let stated = seq.stated.as_ref().ok_or(TranslateError::NeedsStatedType)?;
            let ctx = mtr_coterm(&seq.subject, session)?;
            let extra: Vec<&Name> = gamma.keys().collect();
            let p = mint(session, Namespace::Comp, "p", &[&ctx], &extra);
            let pv = Expr::var(Calculus::Vc, p.clone()).expect(GRAMMAR);
            let filled =
                fill(&ctx, &pv).expect("co-term images accept a computation in their hole");
            gamma.insert(p, mtr_type(stated, Flavor::Computation)?);
            (filled, None)
        }
        Class::Context => unreachable!("the moded calculus has no contexts"),
    };
    Ok(Sequent { gamma, subject, stated, delta })
}

// ---------------------------------------------------------------------
// The continuations instantiation: value/computation → λ[βᵛ]
// ---------------------------------------------------------------------

/// Type image of the continuations instantiation: `M B` is read as the
/// double negation `~~B°`, arrows map structurally.
pub fn cm_type(a: &TypeExpr) -> Result<TypeExpr, TranslateError> {
    const OP: &str = "the continuations type translation";
    match a {
        TypeExpr::Var(s) => Ok(TypeExpr::var(s)),
        TypeExpr::Imp(None, dom, cod) => Ok(TypeExpr::imp(cm_type(dom)?, cm_type(cod)?)),
        TypeExpr::Monad(b) => Ok(TypeExpr::neg(TypeExpr::neg(cm_type(b)?))),
        TypeExpr::Imp(Some(_), ..) => Err(TranslateError::BadSourceType {
            op: OP,
            ty: a.clone(),
            why: "arrows of the value/computation calculus carry no mode",
        }),
        TypeExpr::Bot => Err(TranslateError::BadSourceType {
            op: OP,
            ty: a.clone(),
            why: "Bot is the target's falsity atom, not a source type",
        }),
    }
}

/// Image of a co-variable's type: a co-variable consuming `M B` becomes a
/// continuation variable of type `~B°`.
pub fn cm_cotype(c: &TypeExpr) -> Result<TypeExpr, TranslateError> {
    match c {
        TypeExpr::Monad(b) => Ok(TypeExpr::neg(cm_type(b)?)),
        _ => Err(TranslateError::BadSourceType {
            op: "the continuation type translation",
            ty: c.clone(),
            why: "co-variables consume computations, so their type is an M type",
        }),
    }
}

struct Cm<'a> {
    session: &'a mut Session,
    /// Source-level types of the term variables in scope, for annotating
    /// introduced binders. Bindings whose type is unknown are absent.
    gamma: BTreeMap<Name, TypeExpr>,
    /// Source-level types of the co-variables in scope.
    delta: BTreeMap<Name, TypeExpr>,
}

impl Cm<'_> {
    /// Source type of a term, as far as the annotations at hand determine
    /// it.
    fn ty_of(&mut self, e: &Expr) -> Option<TypeExpr> {
        match &e.node {
            Node::Var(n) => self.gamma.get(n).cloned(),
            Node::Lam(b, body) => {
                let dom = b.ann.clone()?;
                let cod = self.scoped(&b.name, Some(dom.clone()), |st| st.ty_of(body));
                Some(TypeExpr::imp(dom, cod?))
            }
            Node::Mu(b, _) => b.ann.clone(),
            Node::Ret(v) => Some(TypeExpr::monad(self.ty_of(v)?)),
            Node::App(v, _) => match self.ty_of(v)? {
                TypeExpr::Imp(None, _, cod) => Some(*cod),
                _ => None,
            },
            _ => None,
        }
    }

    /// Run `f` with the source type of `name` set (or unknown), restoring
    /// the previous state afterwards.
    fn scoped<T>(
        &mut self,
        name: &Name,
        ty: Option<TypeExpr>,
        f: impl FnOnce(&mut Cm) -> T,
    ) -> T {
        let old = match ty {
            Some(t) => self.gamma.insert(name.clone(), t),
            None => self.gamma.remove(name),
        };
        let r = f(self);
        match old {
            Some(t) => self.gamma.insert(name.clone(), t),
            None => self.gamma.remove(name),
        };
        r
    }

    fn scoped_co<T>(
        &mut self,
        name: &Name,
        ty: Option<TypeExpr>,
        f: impl FnOnce(&mut Cm) -> T,
    ) -> T {
        let old = match ty {
            Some(t) => self.delta.insert(name.clone(), t),
            None => self.delta.remove(name),
        };
        let r = f(self);
        match old {
            Some(t) => self.delta.insert(name.clone(), t),
            None => self.delta.remove(name),
        };
        r
    }

    fn binder(name: Name, ann: Option<TypeExpr>) -> Binder {
        Binder { name, ann }
    }

    /// `~t°` of a source type, for continuation binders.
    fn neg_image(ty: Option<&TypeExpr>) -> Option<TypeExpr> {
        ty.and_then(|t| cm_type(t).ok()).map(TypeExpr::neg)
    }

    /// η-expansion `\x. t x` of a continuation; `dom` is the image type of
    /// what the continuation takes, if known.
    fn up(&mut self, t: Expr, dom: Option<TypeExpr>) -> Expr {
        let cx = Calculus::Stlc;
        let x = mint(self.session, Namespace::Plain, "x", &[&t], &[]);
        let xv = Expr::var(cx, x.clone()).expect(GRAMMAR);
        let body = Expr::app(cx, t, xv).expect(GRAMMAR);
        Expr::lam(cx, Cm::binder(x, dom), body).expect(GRAMMAR)
    }

    /// Double negation introduction `\k. k t`; `src_ty` is the source type
    /// of the expression whose image `t` is, if known.
    fn dneg(&mut self, t: Expr, src_ty: Option<&TypeExpr>) -> Expr {
        let cx = Calculus::Stlc;
        let k = mint(self.session, Namespace::Plain, "k", &[&t], &[]);
        let kv = Expr::var(cx, k.clone()).expect(GRAMMAR);
        let body = Expr::app(cx, kv, t).expect(GRAMMAR);
        Expr::lam(cx, Cm::binder(k, Cm::neg_image(src_ty)), body).expect(GRAMMAR)
    }

    fn cm_expr(&mut self, e: &Expr) -> Result<Expr, TranslateError> {
        match e.class() {
            Class::Term => {
                if e.is_value() {
                    self.cm_value(e)
                } else {
                    self.cm_comp(e)
                }
            }
            Class::Command => self.cm_cmd(e),
            Class::Context => Err(TranslateError::WrongInput {
                op: "the continuations translation",
                expected: "a value, computation, or command",
                found: "context",
            }),
            Class::CoTerm => unreachable!("the value/computation calculus has no co-terms"),
        }
    }

    fn cm_value(&mut self, e: &Expr) -> Result<Expr, TranslateError> {
        let cx = Calculus::Stlc;
        match &e.node {
            Node::Var(n) => Ok(Expr::var(cx, n.clone()).expect(GRAMMAR)),
            Node::Lam(b, body) => {
                let ann = b.ann.as_ref().map(cm_type).transpose()?;
                let body2 = self.scoped(&b.name, b.ann.clone(), |st| st.cm_comp(body))?;
                Ok(Expr::lam(cx, Cm::binder(b.name.clone(), ann), body2).expect(GRAMMAR))
            }
            _ => unreachable!("values are variables and lambdas"),
        }
    }

    /// `cm` of a computation: always an abstraction. `ret V` is already
    /// the double negation `\k. k V°`; anything else wraps its auxiliary
    /// image as `\k. aux (\x. k x)`.
    fn cm_comp(&mut self, e: &Expr) -> Result<Expr, TranslateError> {
        let cx = Calculus::Stlc;
        if matches!(&e.node, Node::Ret(_)) {
            return self.cm_aux_inner(e);
        }
        let src = self.ty_of(e);
        let aux = self.cm_aux_inner(e)?;
        let k = mint(self.session, Namespace::Plain, "k", &[&aux], &[]);
        let kv = Expr::var(cx, k.clone()).expect(GRAMMAR);
        let (kann, dom) = match &src {
            Some(TypeExpr::Monad(b)) => {
                let img = cm_type(b)?;
                (Some(TypeExpr::neg(img.clone())), Some(img))
            }
            _ => (None, None),
        };
        let upk = self.up(kv, dom);
        let body = Expr::app(cx, aux, upk).expect(GRAMMAR);
        Ok(Expr::lam(cx, Cm::binder(k, kann), body).expect(GRAMMAR))
    }

    /// The auxiliary image of a computation: a variable stays itself,
    /// `ret V` becomes `\k. k V°`, `mu @a. c` becomes `\a. c°`, and an
    /// application sequences its argument through a double negation.
    fn cm_aux_inner(&mut self, e: &Expr) -> Result<Expr, TranslateError> {
        let cx = Calculus::Stlc;
        match &e.node {
            Node::Var(n) => Ok(Expr::var(cx, n.clone()).expect(GRAMMAR)),
            Node::Ret(v) => {
                let src = self.ty_of(v);
                let vv = self.cm_value(v)?;
                Ok(self.dneg(vv, src.as_ref()))
            }
            Node::Mu(b, c) => {
                let a = Name { ns: Namespace::Plain, base: b.name.base.clone(), index: b.name.index };
                let ann = b.ann.as_ref().map(cm_cotype).transpose()?;
                let body = self.scoped_co(&b.name, b.ann.clone(), |st| st.cm_cmd(c))?;
                Ok(Expr::lam(cx, Cm::binder(a, ann), body).expect(GRAMMAR))
            }
            Node::App(v, u) => {
                let res_ty = self.ty_of(e);
                let u_ty = self.ty_of(u);
                let vv = self.cm_value(v)?;
                let uu = self.cm_expr(u)?;
                let k = mint(self.session, Namespace::Plain, "k", &[&vv, &uu], &[]);
                let kv = Expr::var(cx, k.clone()).expect(GRAMMAR);
                let w = mint(self.session, Namespace::Plain, "w", &[&vv], &[&k]);
                let wv = Expr::var(cx, w.clone()).expect(GRAMMAR);
                let (kann, kdom) = match &res_ty {
                    Some(TypeExpr::Monad(b)) => {
                        let img = cm_type(b)?;
                        (Some(TypeExpr::neg(img.clone())), Some(img))
                    }
                    _ => (None, None),
                };
                let wann = u_ty.as_ref().map(cm_type).transpose()?;
                let upk = self.up(kv, kdom);
                let send = Expr::app(cx, Expr::app(cx, vv, wv).expect(GRAMMAR), upk)
                    .expect(GRAMMAR);
                let recv = Expr::lam(cx, Cm::binder(w, wann), send).expect(GRAMMAR);
                let dn = self.dneg(uu, u_ty.as_ref());
                let body = Expr::app(cx, dn, recv).expect(GRAMMAR);
                Ok(Expr::lam(cx, Cm::binder(k, kann), body).expect(GRAMMAR))
            }
            _ => unreachable!("computations are variables, ret, mu, and applications"),
        }
    }

    fn cm_cmd(&mut self, e: &Expr) -> Result<Expr, TranslateError> {
        let cx = Calculus::Stlc;
        match &e.node {
            Node::CoApp(a, p) => {
                let aux = self.cm_aux_inner(p)?;
                let av = Expr::var(
                    cx,
                    Name { ns: Namespace::Plain, base: a.base.clone(), index: a.index },
                )
                .expect(GRAMMAR);
                let dom = match self.delta.get(a).cloned() {
                    Some(TypeExpr::Monad(b)) => Some(cm_type(&b)?),
                    _ => None,
                };
                let upa = self.up(av, dom);
                Ok(Expr::app(cx, aux, upa).expect(GRAMMAR))
            }
            Node::Let(p, b, c) => {
                let bound_ty = match &b.ann {
                    Some(a) => Some(a.clone()),
                    None => match self.ty_of(p) {
                        Some(TypeExpr::Monad(inner)) => Some(*inner),
                        _ => None,
                    },
                };
                let aux = self.cm_aux_inner(p)?;
                let ann = bound_ty.as_ref().map(cm_type).transpose()?;
                let body = self.scoped(&b.name, bound_ty, |st| st.cm_cmd(c))?;
                let recv =
                    Expr::lam(cx, Cm::binder(b.name.clone(), ann), body).expect(GRAMMAR);
                Ok(Expr::app(cx, aux, recv).expect(GRAMMAR))
            }
            Node::Sub(p, b, c) => {
                let bound_ty = match &b.ann {
                    Some(a) => Some(a.clone()),
                    None => self.ty_of(p),
                };
                let ann = bound_ty.as_ref().map(cm_type).transpose()?;
                let body = self.scoped(&b.name, bound_ty, |st| st.cm_cmd(c))?;
                let head =
                    Expr::lam(cx, Cm::binder(b.name.clone(), ann), body).expect(GRAMMAR);
                let arg = self.cm_comp(p)?;
                Ok(Expr::app(cx, head, arg).expect(GRAMMAR))
            }
            _ => unreachable!("commands of the value/computation calculus pass to a co-variable or bind"),
        }
    }
}

/// Continuations instantiation of a value/computation expression. Values
/// map to values, computations to abstractions (their type `M B` read as
/// `~~B°`), commands to applications landing in `Bot`. Co-variables turn
/// into plain continuation variables.
pub fn cm(e: &Expr, session: &mut Session) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::Vc)?;
    let mut st = Cm { session, gamma: BTreeMap::new(), delta: BTreeMap::new() };
    Ok(out(st.cm_expr(e)?))
}

/// The auxiliary continuations image of a computation — what gets applied
/// to a continuation. Always a value.
pub fn cm_aux(e: &Expr, session: &mut Session) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::Vc)?;
    if !e.is_computation() {
        return Err(TranslateError::WrongInput {
            op: "the auxiliary continuations translation",
            expected: "a computation",
            found: describe(e),
        });
    }
    let mut st = Cm { session, gamma: BTreeMap::new(), delta: BTreeMap::new() };
    Ok(out(st.cm_aux_inner(e)?))
}

/// Continuations instantiation of a whole sequent. Term declarations keep
/// their names at the image type; co-variable declarations move to the
/// left as plain continuation variables of negated type; a command subject
/// gets the stated type `Bot`.
pub fn cm_sequent(seq: &Sequent, session: &mut Session) -> Result<Sequent, TranslateError> {
    guard(&seq.subject, Calculus::Vc)?;
    let mut gamma = BTreeMap::new();
    for (n, t) in &seq.gamma {
        if !matches!(n.ns, Namespace::Value | Namespace::Comp) {
            return Err(TranslateError::BadDeclaration(n.clone()));
        }
        gamma.insert(n.clone(), cm_type(t)?);
    }
    for (a, t) in &seq.delta {
        let plain = Name { ns: Namespace::Plain, base: a.base.clone(), index: a.index };
        gamma.insert(plain, cm_cotype(t)?);
    }
    let mut st = Cm {
        session,
        gamma: seq.gamma.clone(),
        delta: seq.delta.clone(),
    };
    let (subject, stated) = match seq.subject.class() {
        Class::Term => {
            let image = st.cm_expr(&seq.subject)?;
            (image, seq.stated.as_ref().map(cm_type).transpose()?)
        }
        Class::Command => (st.cm_cmd(&seq.subject)?, Some(TypeExpr::Bot)),
        _ => {
            return Err(TranslateError::WrongInput {
                op: "the continuations translation",
                expected: "a term or command subject",
                found: describe(&seq.subject),
            })
        }
    };
    Ok(Sequent { gamma, subject, stated, delta: BTreeMap::new() })
}

// ---------------------------------------------------------------------
// The CPS composition
// ---------------------------------------------------------------------

/// Type image of the CPS translation: the continuations image of the
/// monadic image.
pub fn cps_type(a: &TypeExpr, flavor: Flavor) -> Result<TypeExpr, TranslateError> {
    cm_type(&mtr_type(a, flavor)?)
}

/// CPS translation of a moded expression: the continuations image of the
/// monadic image. A co-term first has its context image filled with a
/// fresh computation variable.
pub fn cps(e: &Expr, session: &mut Session) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::LmmtVn)?;
    let mid = match e.class() {
        Class::Term => mtr_term(e, session)?,
        Class::Command => mtr_cmd(e, session)?,
        Class::CoTerm => {
            let ctx = mtr_coterm(e, session)?;
            let p = mint(session, Namespace::Comp, "p", &[&ctx], &[]);
            let pv = Expr::var(Calculus::Vc, p).expect(GRAMMAR);
            fill(&ctx, &pv).expect("co-term images accept a computation in their hole")
        }
        Class::Context => unreachable!("the moded calculus has no contexts"),
    };
    let mut st = Cm { session, gamma: BTreeMap::new(), delta: BTreeMap::new() };
    Ok(out(st.cm_expr(&mid)?))
}

/// CPS translation of a whole sequent: the two stages composed.
pub fn cps_sequent(seq: &Sequent, session: &mut Session) -> Result<Sequent, TranslateError> {
    cm_sequent(&mtr_sequent(seq, session)?, session)
}

// ---------------------------------------------------------------------
// Forgetful maps
// ---------------------------------------------------------------------

/// Injective renaming that merges the value and computation namespaces
/// into the plain one. A name keeps its base when it alone claims it;
/// claimed twice, the value claimant gets `_v` and the computation
/// claimant `_n` appended (bumping the index past any remaining clash).
fn merge_to_plain(names: &BTreeSet<Name>) -> BTreeMap<Name, Name> {
    let merged: Vec<(Name, Name)> = names
        .iter()
        .filter(|n| matches!(n.ns, Namespace::Value | Namespace::Comp))
        .map(|n| {
            (n.clone(), Name { ns: Namespace::Plain, base: n.base.clone(), index: n.index })
        })
        .collect();
    let mut claims: BTreeMap<&Name, usize> = BTreeMap::new();
    for (_, c) in &merged {
        *claims.entry(c).or_default() += 1;
    }
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    for (n, c) in &merged {
        if claims[c] == 1 {
            map.insert(n.clone(), c.clone());
            used.insert(c.clone());
        }
    }
    for (n, c) in &merged {
        if claims[c] > 1 {
            let tag = if n.ns == Namespace::Value { "_v" } else { "_n" };
            let mut cand =
                Name { ns: Namespace::Plain, base: format!("{}{tag}", c.base), index: c.index };
            while used.contains(&cand) {
                cand.index += 1;
            }
            map.insert(n.clone(), cand.clone());
            used.insert(cand);
        }
    }
    map
}

fn ren(map: &BTreeMap<Name, Name>, n: &Name) -> Name {
    map.get(n).cloned().unwrap_or_else(|| n.clone())
}

/// Erase modes from a type: `->v` and `->n` both become the plain arrow.
pub fn forget_vn_type(a: &TypeExpr) -> Result<TypeExpr, TranslateError> {
    const OP: &str = "mode erasure";
    match a {
        TypeExpr::Var(s) => Ok(TypeExpr::var(s)),
        TypeExpr::Imp(Some(_), dom, cod) => {
            Ok(TypeExpr::imp(forget_vn_type(dom)?, forget_vn_type(cod)?))
        }
        _ => Err(TranslateError::BadSourceType {
            op: OP,
            ty: a.clone(),
            why: "types of the moded calculus are atoms and moded arrows",
        }),
    }
}

/// Erase modes from a moded expression, landing in the plain sequent
/// calculus: binders and variables lose their sigils, stacks their mode.
pub fn forget_vn(e: &Expr) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::LmmtVn)?;
    let map = merge_to_plain(&e.all_names());
    Ok(out(forget_vn_inner(e, &map)?))
}

fn forget_binder(
    b: &Binder,
    map: &BTreeMap<Name, Name>,
    ty: impl Fn(&TypeExpr) -> Result<TypeExpr, TranslateError>,
) -> Result<Binder, TranslateError> {
    Ok(Binder { name: ren(map, &b.name), ann: b.ann.as_ref().map(ty).transpose()? })
}

fn forget_vn_inner(e: &Expr, map: &BTreeMap<Name, Name>) -> Result<Expr, TranslateError> {
    let cx = Calculus::Lmmt;
    Ok(match &e.node {
        Node::Var(n) => Expr::var(cx, ren(map, n)).expect(GRAMMAR),
        Node::CoVar(a) => Expr::covar(cx, a.clone()).expect(GRAMMAR),
        Node::Lam(b, t) => Expr::lam(
            cx,
            forget_binder(b, map, forget_vn_type)?,
            forget_vn_inner(t, map)?,
        )
        .expect(GRAMMAR),
        Node::Mu(b, c) => Expr::mu(
            cx,
            forget_binder(b, map, forget_vn_type)?,
            forget_vn_inner(c, map)?,
        )
        .expect(GRAMMAR),
        Node::MuTilde(b, c) => Expr::mu_tilde(
            cx,
            forget_binder(b, map, forget_vn_type)?,
            forget_vn_inner(c, map)?,
        )
        .expect(GRAMMAR),
        Node::Command(t, co) => {
            Expr::command(cx, forget_vn_inner(t, map)?, forget_vn_inner(co, map)?)
                .expect(GRAMMAR)
        }
        Node::Cons(Some(_), u, tail) => {
            Expr::cons(cx, None, forget_vn_inner(u, map)?, forget_vn_inner(tail, map)?)
                .expect(GRAMMAR)
        }
        _ => unreachable!("not part of the moded grammar"),
    })
}

/// The plain-calculus rule a moded rule erases to, if any.
pub fn forget_vn_rule(r: RuleId) -> Option<RuleId> {
    match r {
        RuleId::BetaV | RuleId::BetaN => Some(RuleId::Beta),
        RuleId::SigmaV | RuleId::SigmaN => Some(RuleId::Sigma),
        RuleId::Pi => Some(RuleId::Pi),
        RuleId::EtaMtV | RuleId::EtaMtN => Some(RuleId::EtaMt),
        RuleId::EtaMu => Some(RuleId::EtaMu),
        _ => None,
    }
}

/// Erase modes from a whole sequent.
pub fn forget_vn_sequent(seq: &Sequent) -> Result<Sequent, TranslateError> {
    guard(&seq.subject, Calculus::LmmtVn)?;
    let mut names = seq.subject.all_names();
    names.extend(seq.gamma.keys().cloned());
    names.extend(seq.delta.keys().cloned());
    let map = merge_to_plain(&names);
    let mut gamma = BTreeMap::new();
    for (n, t) in &seq.gamma {
        gamma.insert(ren(&map, n), forget_vn_type(t)?);
    }
    let mut delta = BTreeMap::new();
    for (a, t) in &seq.delta {
        delta.insert(a.clone(), forget_vn_type(t)?);
    }
    Ok(Sequent {
        gamma,
        subject: forget_vn_inner(&seq.subject, &map)?,
        stated: seq.stated.as_ref().map(forget_vn_type).transpose()?,
        delta,
    })
}

/// Erase the value/computation split from a type: `M` and arrows survive
/// structurally. The image always satisfies the restricted discipline
/// whose arrows end in an `M` type.
pub fn forget_vc_type(a: &TypeExpr) -> Result<TypeExpr, TranslateError> {
    const OP: &str = "value/computation erasure";
    match a {
        TypeExpr::Var(s) => Ok(TypeExpr::var(s)),
        TypeExpr::Imp(None, dom, cod) => {
            Ok(TypeExpr::imp(forget_vc_type(dom)?, forget_vc_type(cod)?))
        }
        TypeExpr::Monad(b) => Ok(TypeExpr::monad(forget_vc_type(b)?)),
        _ => Err(TranslateError::BadSourceType {
            op: OP,
            ty: a.clone(),
            why: "types of the value/computation calculus are atoms, plain arrows, and M types",
        }),
    }
}

/// Erase the value/computation split, landing in the monadic λ-calculus:
/// `let` becomes `bind`, `sub #p = P` becomes `bind p = ret P`, sigils are
/// stripped. Images reduce with the delayed-β variant.
pub fn forget_vc(e: &Expr) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::Vc)?;
    let map = merge_to_plain(&e.all_names());
    Ok(out(forget_vc_inner(e, &map)?))
}

fn forget_vc_inner(e: &Expr, map: &BTreeMap<Name, Name>) -> Result<Expr, TranslateError> {
    let cx = Calculus::LmM;
    Ok(match &e.node {
        Node::Var(n) => Expr::var(cx, ren(map, n)).expect(GRAMMAR),
        Node::Lam(b, t) => Expr::lam(
            cx,
            forget_binder(b, map, forget_vc_type)?,
            forget_vc_inner(t, map)?,
        )
        .expect(GRAMMAR),
        Node::Mu(b, c) => Expr::mu(
            cx,
            forget_binder(b, map, forget_vc_type)?,
            forget_vc_inner(c, map)?,
        )
        .expect(GRAMMAR),
        Node::App(t, u) => {
            Expr::app(cx, forget_vc_inner(t, map)?, forget_vc_inner(u, map)?).expect(GRAMMAR)
        }
        Node::Ret(t) => Expr::ret(cx, forget_vc_inner(t, map)?).expect(GRAMMAR),
        Node::CoApp(a, t) => Expr::coapp(cx, a.clone(), forget_vc_inner(t, map)?).expect(GRAMMAR),
        Node::Let(p, b, c) => Expr::bind(
            cx,
            forget_vc_inner(p, map)?,
            forget_binder(b, map, forget_vc_type)?,
            forget_vc_inner(c, map)?,
        )
        .expect(GRAMMAR),
        Node::Sub(p, b, c) => {
            let lifted = Expr::ret(cx, forget_vc_inner(p, map)?).expect(GRAMMAR);
            Expr::bind(cx, lifted, forget_binder(b, map, forget_vc_type)?, forget_vc_inner(c, map)?)
                .expect(GRAMMAR)
        }
        Node::Hole => Expr::hole(cx),
        _ => unreachable!("not part of the value/computation grammar"),
    })
}

/// The monadic-λ rule a value/computation rule erases to, if any. The β
/// image is the delayed variant's β.
pub fn forget_vc_rule(r: RuleId) -> Option<RuleId> {
    match r {
        RuleId::Beta => Some(RuleId::Beta),
        RuleId::Sigma => Some(RuleId::Sigma),
        RuleId::PiLet => Some(RuleId::PiBind),
        RuleId::PiCovar => Some(RuleId::PiCovar),
        RuleId::EtaMu => Some(RuleId::EtaMu),
        RuleId::EtaLet => Some(RuleId::EtaBind),
        _ => None,
    }
}

/// Erase the value/computation split from a whole sequent. The image
/// typechecks under the restricted discipline.
pub fn forget_vc_sequent(seq: &Sequent) -> Result<Sequent, TranslateError> {
    guard(&seq.subject, Calculus::Vc)?;
    let mut names = seq.subject.all_names();
    names.extend(seq.gamma.keys().cloned());
    names.extend(seq.delta.keys().cloned());
    let map = merge_to_plain(&names);
    let mut gamma = BTreeMap::new();
    for (n, t) in &seq.gamma {
        gamma.insert(ren(&map, n), forget_vc_type(t)?);
    }
    let mut delta = BTreeMap::new();
    for (a, t) in &seq.delta {
        delta.insert(a.clone(), forget_vc_type(t)?);
    }
    Ok(Sequent {
        gamma,
        subject: forget_vc_inner(&seq.subject, &map)?,
        stated: seq.stated.as_ref().map(forget_vc_type).transpose()?,
        delta,
    })
}

// ---------------------------------------------------------------------
// Embeddings of the plain sequent calculus
// ---------------------------------------------------------------------

fn embed_type_inner(a: &TypeExpr, mode: Mode) -> Result<TypeExpr, TranslateError> {
    match a {
        TypeExpr::Var(s) => Ok(TypeExpr::var(s)),
        TypeExpr::Imp(None, dom, cod) => Ok(TypeExpr::imp_mode(
            mode,
            embed_type_inner(dom, mode)?,
            embed_type_inner(cod, mode)?,
        )),
        _ => Err(TranslateError::BadSourceType {
            op: "the embedding",
            ty: a.clone(),
            why: "types of the plain sequent calculus are atoms and plain arrows",
        }),
    }
}

fn embed_inner(e: &Expr, mode: Mode) -> Result<Expr, TranslateError> {
    let cx = Calculus::LmmtVn;
    let ns = mode.namespace();
    let moved = |n: &Name| Name { ns, base: n.base.clone(), index: n.index };
    Ok(match &e.node {
        Node::Var(n) => Expr::var(cx, moved(n)).expect(GRAMMAR),
        Node::CoVar(a) => Expr::covar(cx, a.clone()).expect(GRAMMAR),
        Node::Lam(b, t) => Expr::lam(
            cx,
            Binder {
                name: moved(&b.name),
                ann: b.ann.as_ref().map(|a| embed_type_inner(a, mode)).transpose()?,
            },
            embed_inner(t, mode)?,
        )
        .expect(GRAMMAR),
        Node::Mu(b, c) => Expr::mu(
            cx,
            Binder {
                name: b.name.clone(),
                ann: b.ann.as_ref().map(|a| embed_type_inner(a, mode)).transpose()?,
            },
            embed_inner(c, mode)?,
        )
        .expect(GRAMMAR),
        Node::MuTilde(b, c) => Expr::mu_tilde(
            cx,
            Binder {
                name: moved(&b.name),
                ann: b.ann.as_ref().map(|a| embed_type_inner(a, mode)).transpose()?,
            },
            embed_inner(c, mode)?,
        )
        .expect(GRAMMAR),
        Node::Command(t, co) => {
            Expr::command(cx, embed_inner(t, mode)?, embed_inner(co, mode)?).expect(GRAMMAR)
        }
        Node::Cons(None, u, tail) => {
            Expr::cons(cx, Some(mode), embed_inner(u, mode)?, embed_inner(tail, mode)?)
                .expect(GRAMMAR)
        }
        _ => unreachable!("not part of the plain sequent grammar"),
    })
}

fn embed_sequent_inner(seq: &Sequent, mode: Mode) -> Result<Sequent, TranslateError> {
    guard(&seq.subject, Calculus::Lmmt)?;
    let ns = mode.namespace();
    let mut gamma = BTreeMap::new();
    for (n, t) in &seq.gamma {
        if n.ns != Namespace::Plain {
            return Err(TranslateError::BadDeclaration(n.clone()));
        }
        let moved = Name { ns, base: n.base.clone(), index: n.index };
        gamma.insert(moved, embed_type_inner(t, mode)?);
    }
    let mut delta = BTreeMap::new();
    for (a, t) in &seq.delta {
        delta.insert(a.clone(), embed_type_inner(t, mode)?);
    }
    Ok(Sequent {
        gamma,
        subject: embed_inner(&seq.subject, mode)?,
        stated: seq.stated.as_ref().map(|t| embed_type_inner(t, mode)).transpose()?,
        delta,
    })
}

/// Embed the plain sequent calculus with everything in call-by-value
/// dress: variables and binders move to the value namespace, arrows and
/// stacks take the `v` mode.
pub fn embed_cbv(e: &Expr) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::Lmmt)?;
    Ok(out(embed_inner(e, Mode::V)?))
}

/// Embed the plain sequent calculus with everything in call-by-name
/// dress: variables and binders move to the computation namespace, arrows
/// and stacks take the `n` mode.
pub fn embed_cbn(e: &Expr) -> Result<TranslationOutput, TranslateError> {
    guard(e, Calculus::Lmmt)?;
    Ok(out(embed_inner(e, Mode::N)?))
}

pub fn embed_cbv_type(a: &TypeExpr) -> Result<TypeExpr, TranslateError> {
    embed_type_inner(a, Mode::V)
}

pub fn embed_cbn_type(a: &TypeExpr) -> Result<TypeExpr, TranslateError> {
    embed_type_inner(a, Mode::N)
}

pub fn embed_cbv_sequent(seq: &Sequent) -> Result<Sequent, TranslateError> {
    embed_sequent_inner(seq, Mode::V)
}

pub fn embed_cbn_sequent(seq: &Sequent) -> Result<Sequent, TranslateError> {
    embed_sequent_inner(seq, Mode::N)
}

/// The moded rule matching a call-by-value fragment rule. The fragment
/// reports its restricted σ as `sigma-v`; π is unrestricted there, and on
/// embedded expressions every co-term is a co-value, so π and η-μ̃ carry
/// over unconditionally.
pub fn embed_cbv_rule(r: RuleId) -> Option<RuleId> {
    match r {
        RuleId::Beta => Some(RuleId::BetaV),
        RuleId::SigmaV => Some(RuleId::SigmaV),
        RuleId::Pi => Some(RuleId::Pi),
        RuleId::EtaMt => Some(RuleId::EtaMtV),
        RuleId::EtaMu => Some(RuleId::EtaMu),
        _ => None,
    }
}

/// The moded rule matching a call-by-name fragment rule. The fragment
/// reports its restricted π as `pi-n`; σ is unrestricted there, matching
/// the moded σ on computation binders.
pub fn embed_cbn_rule(r: RuleId) -> Option<RuleId> {
    match r {
        RuleId::Beta => Some(RuleId::BetaN),
        RuleId::Sigma => Some(RuleId::SigmaN),
        RuleId::PiN => Some(RuleId::Pi),
        RuleId::EtaMt => Some(RuleId::EtaMtN),
        RuleId::EtaMu => Some(RuleId::EtaMu),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calc_lmmt::{redexes_lmmt, typecheck_lmmt, Fragment};
    use crate::calc_lmmt_vn::{redexes_vn, step_vn, typecheck_vn};
    use crate::calc_monadic::{
        redexes_vc, step_lmM, step_vc, typecheck_lmM, typecheck_stlc, typecheck_vc,
    };
    use crate::syntax::{alpha_eq, parse_expr, parse_sequent, parse_type, print_expr, print_type};

    fn vn(s: &str) -> Expr {
        parse_expr(Calculus::LmmtVn, s).unwrap()
    }

    fn vc(s: &str) -> Expr {
        parse_expr(Calculus::Vc, s).unwrap()
    }

    fn lmmt(s: &str) -> Expr {
        parse_expr(Calculus::Lmmt, s).unwrap()
    }

    fn ty(s: &str) -> TypeExpr {
        parse_type(s).unwrap()
    }

    fn sequent(c: Calculus, s: &str) -> Sequent {
        Sequent::from_syntax(parse_sequent(c, s).unwrap()).unwrap()
    }

    #[test]
    fn type_translations_follow_the_modes() {
        let v = mtr_type(&ty("X ->v X"), Flavor::Value).unwrap();
        assert_eq!(print_type(&v), "X -> M X");
        let n = mtr_type(&ty("X ->n X"), Flavor::Computation).unwrap();
        assert_eq!(print_type(&n), "M (M X -> M X)");
        let err = mtr_type(&ty("X -> X"), Flavor::Value).unwrap_err();
        assert!(matches!(err, TranslateError::BadSourceType { .. }), "{err}");
    }

    #[test]
    fn continuation_types_double_negate() {
        assert_eq!(print_type(&cm_type(&ty("M X")).unwrap()), "(X -> Bot) -> Bot");
        assert_eq!(print_type(&cm_cotype(&ty("M X")).unwrap()), "X -> Bot");
        assert_eq!(
            print_type(&cm_type(&ty("(X -> M X) -> M X")).unwrap()),
            "(X -> (X -> Bot) -> Bot) -> (X -> Bot) -> Bot"
        );
        assert!(cm_cotype(&ty("X")).is_err());
        assert!(cm_type(&ty("X ->v X")).is_err());
        // the composition: a cbv arrow, CPS'd
        assert_eq!(
            print_type(&cps_type(&ty("X ->v X"), Flavor::Value).unwrap()),
            "X -> (X -> Bot) -> Bot"
        );
    }

    #[test]
    fn the_monadic_image_of_a_beta_redex() {
        let mut s = Session::new();
        let o = mtr(&vn("< \\%v. %v | %w ::v @a >"), &mut s).unwrap();
        assert_eq!(
            print_expr(&o.result),
            "let %f = ret (\\%v. ret %v) in let %w1 = ret %w in @a (%f %w1)"
        );
        assert_eq!(o.result_kind, Class::Command);

        // the cbn stack binds its argument by substitution instead
        let mut s = Session::new();
        let o = mtr(&vn("< \\#n. #n | (mu @b. < %w | @b >) ::n @a >"), &mut s).unwrap();
        assert_eq!(
            print_expr(&o.result),
            "let %f = ret (\\#n. #n) in sub #q = mu @b. @b (ret %w) in @a (%f #q)"
        );
    }

    #[test]
    fn mu_tilde_modes_become_let_and_sub() {
        let mut s = Session::new();
        let o = mtr(&vn("mt %v. < %v | @a >"), &mut s).unwrap();
        assert_eq!(print_expr(&o.result), "let %v = [] in @a (ret %v)");
        assert_eq!(o.result_kind, Class::Context);

        let o = mtr(&vn("mt #n. < #n | @a >"), &mut s).unwrap();
        assert_eq!(print_expr(&o.result), "sub #n = [] in @a #n");

        let o = mtr(&vn("< mu @a. < %v | @a > | mt #n. < #n | @b > >"), &mut s).unwrap();
        assert_eq!(print_expr(&o.result), "sub #n = mu @a. @a (ret %v) in @b #n");
    }

    #[test]
    fn the_monadic_image_simulates_a_beta_step() {
        let mut s = Session::new();
        let c1 = vn("< \\%v. %v | %w ::v @a >");
        let (rule, path) = redexes_vn(&c1).unwrap()[0].clone();
        assert_eq!(rule, RuleId::BetaV);
        let c2 = step_vn(&c1, &(rule, path)).unwrap();
        assert_eq!(print_expr(&c2), "< %w | mt %v. < %v | @a > >");

        let image1 = mtr(&c1, &mut s).unwrap().result;
        let image2 = mtr(&c2, &mut s).unwrap().result;
        assert_eq!(print_expr(&image2), "let %v = ret %w in @a (ret %v)");

        // drive the image of c1 to the image of c2: σ, σ, β, π
        let fire = |e: &Expr, s: &mut Session, rule: RuleId, path: &[usize]| {
            let want = (rule, path.to_vec());
            assert!(
                redexes_vc(e).unwrap().contains(&want),
                "{} has {rule} at {path:?}",
                print_expr(e)
            );
            step_vc(e, &want, s).unwrap()
        };
        let e = fire(&image1, &mut s, RuleId::Sigma, &[]);
        assert_eq!(
            print_expr(&e),
            "let %w1 = ret %w in @a ((\\%v. ret %v) %w1)"
        );
        let e = fire(&e, &mut s, RuleId::Sigma, &[]);
        assert_eq!(print_expr(&e), "@a ((\\%v. ret %v) %w)");
        let e = fire(&e, &mut s, RuleId::Beta, &[0]);
        assert_eq!(
            print_expr(&e),
            "@a (mu @b. let %v = ret %w in @b (ret %v))"
        );
        let e = fire(&e, &mut s, RuleId::PiCovar, &[]);
        assert!(alpha_eq(&e, &image2), "reached {}", print_expr(&e));
        assert_eq!(print_expr(&e), print_expr(&image2));
    }

    #[test]
    fn monadic_images_of_annotated_sequents_typecheck() {
        let mut s = Session::new();
        let seq = sequent(Calculus::LmmtVn, "%w:X |- < \\%v:X. %v | %w ::v @a > | @a:X");
        typecheck_vn(&seq).unwrap();
        let image = mtr_sequent(&seq, &mut s).unwrap();
        assert_eq!(
            print_expr(&image.subject),
            "let %f = ret (\\%v:X. ret %v) in let %w1 = ret %w in @a (%f %w1)"
        );
        assert_eq!(print_type(image.delta.get(&Name::co("a")).unwrap()), "M X");
        typecheck_vc(&image).unwrap();

        // a term subject: its stated type takes the computation image
        let seq = sequent(Calculus::LmmtVn, "|- \\%v:X. %v : X ->v X");
        typecheck_vn(&seq).unwrap();
        let image = mtr_sequent(&seq, &mut s).unwrap();
        assert_eq!(print_type(image.stated.as_ref().unwrap()), "M (X -> M X)");
        typecheck_vc(&image).unwrap();

        // a co-term subject: the image is the context filled with a fresh
        // computation variable, declared at the stated type's image
        let seq = sequent(Calculus::LmmtVn, "|- mt %v:X. < %v | @a > : X | @a:X");
        typecheck_vn(&seq).unwrap();
        let image = mtr_sequent(&seq, &mut s).unwrap();
        assert_eq!(print_expr(&image.subject), "let %v:X = #p in @a (ret %v)");
        assert_eq!(print_type(image.gamma.get(&Name::comp("p")).unwrap()), "M X");
        typecheck_vc(&image).unwrap();

        let unstated = sequent(Calculus::LmmtVn, "|- mt %v:X. < %v | @a > | @a:X");
        assert_eq!(
            mtr_sequent(&unstated, &mut s).unwrap_err(),
            TranslateError::NeedsStatedType
        );
    }

    #[test]
    fn continuation_images_freeze() {
        let mut s = Session::new();
        let o = cm_aux(&vc("ret %v"), &mut s).unwrap();
        assert_eq!(print_expr(&o.result), "\\k. k %v");
        assert!(o.result.is_value());

        let mut s = Session::new();
        let o = cm(&vc("#p"), &mut s).unwrap();
        assert_eq!(print_expr(&o.result), "\\k. #p (\\x. k x)");

        let mut s = Session::new();
        let o = cm(&vc("sub #p = ret %v in @a #p"), &mut s).unwrap();
        assert_eq!(
            print_expr(&o.result),
            "(\\#p. #p (\\x. a x)) (\\k. k %v)"
        );

        let mut s = Session::new();
        let o = cm(&vc("mu @a. @a (ret %v)"), &mut s).unwrap();
        assert_eq!(
            print_expr(&o.result),
            "\\k1. (\\a. (\\k. k %v) (\\x. a x)) (\\x1. k1 x1)"
        );

        // an application sequences its argument through a double negation
        let mut s = Session::new();
        let o = cm(&vc("@b ((\\%v. ret %v) %w)"), &mut s).unwrap();
        assert_eq!(
            print_expr(&o.result),
            "(\\k1. (\\k2. k2 %w) (\\w. (\\%v. \\k. k %v) w (\\x. k1 x))) (\\x1. b x1)"
        );
    }

    #[test]
    fn continuation_images_are_values_or_abstractions() {
        let computations = [
            "#p",
            "ret %v",
            "mu @a. @a #p",
            "(\\%v. ret %v) %w",
            "(\\#q. #q) (mu @a. @a (ret %v))",
        ];
        for src in computations {
            let mut s = Session::new();
            let e = vc(src);
            let whole = cm(&e, &mut s).unwrap();
            assert!(
                matches!(whole.result.node, Node::Lam(..)),
                "cm of {src} is an abstraction, got {}",
                print_expr(&whole.result)
            );
            let mut s = Session::new();
            let aux = cm_aux(&e, &mut s).unwrap();
            assert!(
                aux.result.is_value(),
                "cm_aux of {src} is a value, got {}",
                print_expr(&aux.result)
            );
        }
        let mut s = Session::new();
        let v = cm(&vc("\\%v. ret %v"), &mut s).unwrap();
        assert!(v.result.is_value());
        assert_eq!(print_expr(&v.result), "\\%v. \\k. k %v");
    }

    #[test]
    fn continuation_images_of_annotated_sequents_typecheck() {
        let mut s = Session::new();
        let seq = sequent(Calculus::Vc, "%w:X |- let %v:X = ret %w in @a (ret %v) | @a:M X");
        typecheck_vc(&seq).unwrap();
        let image = cm_sequent(&seq, &mut s).unwrap();
        assert_eq!(
            print_expr(&image.subject),
            "(\\k:X -> Bot. k %w) (\\%v:X. (\\k1:X -> Bot. k1 %v) (\\x:X. a x))"
        );
        assert_eq!(print_type(image.stated.as_ref().unwrap()), "Bot");
        assert_eq!(print_type(image.gamma.get(&Name::plain("a")).unwrap()), "X -> Bot");
        assert!(image.delta.is_empty());
        typecheck_stlc(&image).unwrap();

        // a term subject keeps its stated type, doubly negated
        let seq = sequent(Calculus::Vc, "|- ret (\\%v:X. ret %v) : M (X -> M X)");
        typecheck_vc(&seq).unwrap();
        let image = cm_sequent(&seq, &mut s).unwrap();
        assert_eq!(
            print_type(image.stated.as_ref().unwrap()),
            "((X -> (X -> Bot) -> Bot) -> Bot) -> Bot"
        );
        typecheck_stlc(&image).unwrap();
    }

    #[test]
    fn the_cps_composition() {
        let c = vn("< \\%v. %v | %w ::v @a >");
        let mut s1 = Session::new();
        let direct = cps(&c, &mut s1).unwrap();
        let mut s2 = Session::new();
        let mid = mtr(&c, &mut s2).unwrap();
        let composed = cm(&mid.result, &mut s2).unwrap();
        assert_eq!(print_expr(&direct.result), print_expr(&composed.result));

        // a co-term goes through its filled context
        let mut s = Session::new();
        let o = cps(&vn("mt %v. < %v | @a >"), &mut s).unwrap();
        assert_eq!(
            print_expr(&o.result),
            "#p (\\%v. (\\k. k %v) (\\x. a x))"
        );
        assert_eq!(o.result_kind, Class::Term);
    }

    #[test]
    fn cps_simulates_a_moded_step_under_beta_v() {
        use crate::calc_monadic::{redexes_stlc, step_stlc};
        let mut s = Session::new();
        let c1 = vn("< %w | mt %v. < %v | @a > >");
        let r = redexes_vn(&c1).unwrap();
        assert_eq!(r[0].0, RuleId::SigmaV);
        let c2 = step_vn(&c1, &r[0]).unwrap();
        let image1 = cps(&c1, &mut s).unwrap().result;
        let image2 = cps(&c2, &mut s).unwrap().result;

        // breadth-first over β-value steps, watching for the target image
        let mut frontier = vec![image1];
        let mut reached = false;
        for _ in 0..8 {
            let mut next = Vec::new();
            for e in &frontier {
                if alpha_eq(e, &image2) {
                    reached = true;
                }
                for r in redexes_stlc(e).unwrap() {
                    next.push(step_stlc(e, &r).unwrap());
                }
            }
            if reached || next.is_empty() {
                break;
            }
            frontier = next;
        }
        assert!(reached || frontier.iter().any(|e| alpha_eq(e, &image2)));
    }

    #[test]
    fn erasing_modes_keeps_redexes_and_typing() {
        let e = vn("< mu @a. < %v | @a > | mt #n. < #n | @b > >");
        let o = forget_vn(&e).unwrap();
        assert_eq!(print_expr(&o.result), "< mu @a. < v | @a > | mt n. < n | @b > >");

        // both namespaces claiming one base get tagged apart
        let e = vn("< %x | mt #x. < #x | @a > >");
        let o = forget_vn(&e).unwrap();
        assert_eq!(print_expr(&o.result), "< x_v | mt x_n. < x_n | @a > >");

        // every moded redex survives erasure under its erased name
        for src in [
            "< \\%v. %v | %w ::v @a >",
            "< \\#n. #n | (mu @b. < %w | @b >) ::n @a >",
            "< mu @a. < %v | @a > | mt %w. < %w | @b > >",
            "< %w | mt %v. < %v | @a > >",
            "< mu @b. < #n | @b > | mt #n. < #n | @a > >",
        ] {
            let e = vn(src);
            let erased = forget_vn(&e).unwrap().result;
            let plain = redexes_lmmt(&erased, Fragment::Full).unwrap();
            for (r, p) in redexes_vn(&e).unwrap() {
                let image = (forget_vn_rule(r).unwrap(), p);
                assert!(plain.contains(&image), "{src}: {} {:?} survives", image.0, image.1);
            }
        }

        let seq = sequent(Calculus::LmmtVn, "%w:X |- < \\%v:X. %v | %w ::v @a > | @a:X");
        typecheck_vn(&seq).unwrap();
        let erased = forget_vn_sequent(&seq).unwrap();
        assert_eq!(print_type(erased.gamma.get(&Name::plain("w")).unwrap()), "X");
        typecheck_lmmt(&erased).unwrap();
    }

    #[test]
    fn erasing_the_split_lands_in_the_delayed_calculus() {
        let e = vc("let %v = ret %w in @a (ret %v)");
        let o = forget_vc(&e).unwrap();
        assert_eq!(print_expr(&o.result), "bind v = ret w in @a (ret v)");

        let e = vc("sub #p = mu @a. @a (ret %v) in @b #p");
        let o = forget_vc(&e).unwrap();
        assert_eq!(
            print_expr(&o.result),
            "bind p = ret (mu @a. @a (ret v)) in @b p"
        );

        // shallow steps agree, rule for rule, with the delayed variant
        for (src, rule) in [
            ("@b ((\\%v. ret %v) %w)", RuleId::Beta),
            ("let %v = ret %w in @a (ret %v)", RuleId::Sigma),
            ("sub #p = mu @a. @a (ret %v) in @b #p", RuleId::Sigma),
            ("let %v = ret %w in @a (ret %v)", RuleId::EtaLet),
        ] {
            let e = vc(src);
            let erased = forget_vc(&e).unwrap().result;
            let at = redexes_vc(&e)
                .unwrap()
                .into_iter()
                .find(|(r, _)| *r == rule)
                .unwrap_or_else(|| panic!("{src} has a {rule}"));
            let mut s = Session::new();
            let stepped = step_vc(&e, &at, &mut s).unwrap();
            let expected = forget_vc(&stepped).unwrap().result;
            let erased_rule = forget_vc_rule(at.0).unwrap();
            let mut s = Session::new();
            let got = step_lmM(&erased, &(erased_rule, at.1.clone()), true, &mut s).unwrap();
            assert!(
                alpha_eq(&got, &expected),
                "{src}: erased {rule} step gives {}, expected {}",
                print_expr(&got),
                print_expr(&expected)
            );
        }

        let seq = sequent(Calculus::Vc, "%w:X |- let %v:X = ret %w in @a (ret %v) | @a:M X");
        typecheck_vc(&seq).unwrap();
        let erased = forget_vc_sequent(&seq).unwrap();
        typecheck_lmM(&erased, true).unwrap();
    }

    #[test]
    fn embeddings_pick_a_namespace_and_a_mode() {
        let e = lmmt("< \\x. x | y :: @a >");
        assert_eq!(
            print_expr(&embed_cbv(&e).unwrap().result),
            "< \\%x. %x | %y ::v @a >"
        );
        assert_eq!(
            print_expr(&embed_cbn(&e).unwrap().result),
            "< \\#x. #x | #y ::n @a >"
        );
        assert_eq!(
            print_type(&embed_cbv_type(&ty("(X -> Y) -> X")).unwrap()),
            "(X ->v Y) ->v X"
        );

        // fragment redexes and moded redexes coincide, rule for rule
        let interesting = [
            "< \\x. x | y :: @a >",
            "< mu @a. < y | @a > | mt x. < x | @b > >",
            "< y | mt x. < x | @a > >",
            "< mu @a. < x | @b > | y :: @a >",
        ];
        for src in interesting {
            let e = lmmt(src);
            let cbv = embed_cbv(&e).unwrap().result;
            let mut mapped: Vec<_> = redexes_lmmt(&e, Fragment::Cbv)
                .unwrap()
                .into_iter()
                .map(|(r, p)| (embed_cbv_rule(r).unwrap(), p))
                .collect();
            mapped.sort();
            let mut moded = redexes_vn(&cbv).unwrap();
            moded.sort();
            assert_eq!(mapped, moded, "{src} under cbv");

            let cbn = embed_cbn(&e).unwrap().result;
            let mut mapped: Vec<_> = redexes_lmmt(&e, Fragment::Cbn)
                .unwrap()
                .into_iter()
                .map(|(r, p)| (embed_cbn_rule(r).unwrap(), p))
                .collect();
            mapped.sort();
            let mut moded = redexes_vn(&cbn).unwrap();
            moded.sort();
            assert_eq!(mapped, moded, "{src} under cbn");
        }

        let seq = sequent(Calculus::Lmmt, "y:X |- < y | mt x:X. < x | @a > > | @a:X");
        typecheck_lmmt(&seq).unwrap();
        let embedded = embed_cbv_sequent(&seq).unwrap();
        typecheck_vn(&embedded).unwrap();
        assert_eq!(
            print_expr(&embedded.subject),
            "< %y | mt %x:X. < %x | @a > >"
        );
    }

    #[test]
    fn wrong_calculus_inputs_are_rejected() {
        let mut s = Session::new();
        let moded = vn("< %v | @a >");
        let split = vc("ret %v");
        let plain = lmmt("< x | @a >");
        assert!(matches!(
            mtr(&split, &mut s),
            Err(TranslateError::WrongCalculus { expected: Calculus::LmmtVn, .. })
        ));
        assert!(matches!(
            cm(&moded, &mut s),
            Err(TranslateError::WrongCalculus { expected: Calculus::Vc, .. })
        ));
        assert!(matches!(
            cps(&plain, &mut s),
            Err(TranslateError::WrongCalculus { expected: Calculus::LmmtVn, .. })
        ));
        assert!(forget_vn(&plain).is_err());
        assert!(forget_vc(&moded).is_err());
        assert!(embed_cbv(&moded).is_err());
        assert!(matches!(
            mtr_value(&vn("mu @a. < %v | @a >"), &mut s),
            Err(TranslateError::WrongInput { expected: "a value", .. })
        ));
        assert!(matches!(
            cm_aux(&vc("\\%v. ret %v"), &mut s),
            Err(TranslateError::WrongInput { expected: "a computation", .. })
        ));
    }
}
