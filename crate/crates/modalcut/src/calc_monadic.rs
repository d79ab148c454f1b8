//! The natural-deduction calculi with a monadic type constructor.
//!
//! Four systems share this module: the classical calculus with `bind`
//! (`lm-M`), its value/computation refinement with `let`/`sub` (`vc`),
//! the intuitionistic fragment of the latter (`ivc`, no μ and no
//! co-variables), and the simply typed λ-calculus with β restricted to
//! value arguments (`stlc`), which the translations target.
//!
//! `lm-M` comes in two variants over the same syntax: the unrestricted
//! one fires β by substitution, the restricted one (implications all of
//! the form `A -> M B`) rewrites `(\x. t) u` to
//! `mu @a. bind x = ret u in @a t` instead, with `@a` fresh. In `vc`
//! the β contractum is `mu @b. let %v = ret V in @b P`; substituting the
//! argument right away is not a rule but a derived reduction — β, then
//! σ, then η-μ. The intuitionistic π rule re-associates nested `let`s
//! through a sequencing operation `Q ; w. Q'` that grafts `Q'` under the
//! whole binding spine of `Q`.

use crate::rules::{expect_calculus, Redex, RuleId, StepError};
use crate::syntax::{
    avoid_capture, struct_subst, subst, Binder, Calculus, Expr, Name, Namespace, Node, Session,
};
use crate::typing::{check_sequent, Derivation, Sequent, TypeError};

fn guard_typecheck(seq: &Sequent, expected: Calculus) -> Result<(), TypeError> {
    if seq.subject.calculus != expected {
        return Err(TypeError::WrongCalculus { expected, found: seq.subject.calculus });
    }
    Ok(())
}

#[allow(non_snake_case)]
pub fn typecheck_lmM(seq: &Sequent, restricted: bool) -> Result<Derivation, TypeError> {
    guard_typecheck(seq, Calculus::LmM)?;
    check_sequent(seq, restricted)
}

pub fn typecheck_vc(seq: &Sequent) -> Result<Derivation, TypeError> {
    guard_typecheck(seq, Calculus::Vc)?;
    check_sequent(seq, false)
}

pub fn typecheck_ivc(seq: &Sequent) -> Result<Derivation, TypeError> {
    guard_typecheck(seq, Calculus::Ivc)?;
    check_sequent(seq, false)
}

pub fn typecheck_stlc(seq: &Sequent) -> Result<Derivation, TypeError> {
    guard_typecheck(seq, Calculus::Stlc)?;
    check_sequent(seq, false)
}

/// A co-variable named `base` that is fresh for everything in `avoid`,
/// drawn from the session counter so repeated steps never reuse a name.
fn fresh_co(session: &mut Session, base: &str, avoid: &Expr) -> Name {
    let taken = avoid
        .all_names()
        .into_iter()
        .filter(|n| n.ns == Namespace::Co && n.base == base)
        .map(|n| n.index);
    let index = session.fresh_index(Namespace::Co, base, taken);
    Name::new(Namespace::Co, base, index)
}

fn scan(e: &Expr, rules_at: impl Fn(&Expr) -> Vec<RuleId>) -> Vec<Redex> {
    let mut out = Vec::new();
    for path in e.paths() {
        let sub = e.subexpr_at(&path).expect("paths enumerates existing paths");
        for rule in rules_at(sub) {
            out.push((rule, path.clone()));
        }
    }
    out
}

fn fire(
    e: &Expr,
    at: &Redex,
    contract: impl FnOnce(&Expr) -> Option<Expr>,
) -> Result<Expr, StepError> {
    let (rule, path) = at;
    let sub = e
        .subexpr_at(path)
        .ok_or_else(|| StepError::NoSuchPath { path: path.clone() })?;
    let contractum =
        contract(sub).ok_or_else(|| StepError::NotARedex { rule: *rule, path: path.clone() })?;
    Ok(e.replace_at(path, contractum)
        .expect("a contractum has the class of its redex"))
}

// ---------------------------------------------------------------------
// lm-M

/// Redexes of the classical monadic calculus. The restricted variant
/// rewrites the same shapes — only what β steps to differs — so the
/// scan has no use for the flag.
#[allow(non_snake_case)]
pub fn redexes_lmM(e: &Expr, restricted: bool) -> Result<Vec<Redex>, StepError> {
    let _ = restricted;
    expect_calculus(Calculus::LmM, e.calculus)?;
    Ok(scan(e, lm_rules))
}

#[allow(non_snake_case)]
pub fn step_lmM(
    e: &Expr,
    at: &Redex,
    restricted: bool,
    session: &mut Session,
) -> Result<Expr, StepError> {
    expect_calculus(Calculus::LmM, e.calculus)?;
    fire(e, at, |sub| lm_contract(sub, at.0, restricted, session))
}

fn lm_rules(sub: &Expr) -> Vec<RuleId> {
    let mut out = Vec::new();
    match &sub.node {
        Node::App(f, _) => {
            if matches!(f.node, Node::Lam(..)) {
                out.push(RuleId::Beta);
            }
        }
        Node::Bind(t, x, c) => {
            if matches!(t.node, Node::Ret(_)) {
                out.push(RuleId::Sigma);
            }
            if matches!(t.node, Node::Mu(..)) {
                out.push(RuleId::PiBind);
            }
            if eta_body(x, c).is_some() {
                out.push(RuleId::EtaBind);
            }
        }
        Node::CoApp(_, t) => {
            if matches!(t.node, Node::Mu(..)) {
                out.push(RuleId::PiCovar);
            }
        }
        Node::Mu(a, c) => {
            if let Node::CoApp(b, t) = &c.node {
                if *b == a.name && !t.is_free_in(&a.name) {
                    out.push(RuleId::EtaMu);
                }
            }
        }
        _ => {}
    }
    out
}

/// `@a (ret x)` with `x` the given binder: the body shape of η-bind and
/// η-let. Returns the co-variable.
fn eta_body<'a>(x: &Binder, c: &'a Expr) -> Option<&'a Name> {
    let Node::CoApp(a, r) = &c.node else { return None };
    let Node::Ret(v) = &r.node else { return None };
    if matches!(&v.node, Node::Var(n) if *n == x.name) {
        Some(a)
    } else {
        None
    }
}

fn lm_contract(sub: &Expr, rule: RuleId, restricted: bool, session: &mut Session) -> Option<Expr> {
    let cx = sub.calculus;
    let grammar = "contracta stay within the grammar";
    match (rule, &sub.node) {
        (RuleId::Beta, Node::App(f, u)) => {
            let Node::Lam(x, body) = &f.node else { return None };
            if restricted {
                // (\x. t) u  →  mu @a. bind x = ret u in @a t,  @a fresh
                let a = fresh_co(session, "a", sub);
                let passed = Expr::coapp(cx, a.clone(), (**body).clone()).expect(grammar);
                let ret = Expr::ret(cx, (**u).clone()).expect(grammar);
                let bind = Expr::bind(cx, ret, x.clone(), passed).expect(grammar);
                Some(Expr::mu(cx, Binder::new(a), bind).expect(grammar))
            } else {
                Some(subst(body, &x.name, u).expect("terms substitute for term variables"))
            }
        }
        // bind x = ret s in c  →  [s/x]c
        (RuleId::Sigma, Node::Bind(t, x, c)) => {
            let Node::Ret(s) = &t.node else { return None };
            Some(subst(c, &x.name, s).expect("terms substitute for term variables"))
        }
        // bind x = (mu @a. c') in c  →  [bind x = [] in c / @a]c'
        (RuleId::PiBind, Node::Bind(t, x, c)) => {
            let Node::Mu(a, inner) = &t.node else { return None };
            let ctx = Expr::bind(cx, Expr::hole(cx), x.clone(), (**c).clone()).expect(grammar);
            Some(struct_subst(inner, &a.name, &ctx).expect("contexts substitute for co-variables"))
        }
        // @b (mu @a. c)  →  [@b/@a]c
        (RuleId::PiCovar, Node::CoApp(b, t)) => {
            let Node::Mu(a, c) = &t.node else { return None };
            let ctx = Expr::coapp(cx, b.clone(), Expr::hole(cx)).expect(grammar);
            Some(struct_subst(c, &a.name, &ctx).expect("contexts substitute for co-variables"))
        }
        // mu @a. @a t  →  t,  @a not free in t
        (RuleId::EtaMu, Node::Mu(a, c)) => {
            let Node::CoApp(b, t) = &c.node else { return None };
            if *b == a.name && !t.is_free_in(&a.name) {
                Some((**t).clone())
            } else {
                None
            }
        }
        // bind x = t in @a (ret x)  →  @a t
        (RuleId::EtaBind, Node::Bind(t, x, c)) => {
            let a = eta_body(x, c)?;
            Some(Expr::coapp(cx, a.clone(), (**t).clone()).expect(grammar))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------
// vc

pub fn redexes_vc(e: &Expr) -> Result<Vec<Redex>, StepError> {
    expect_calculus(Calculus::Vc, e.calculus)?;
    Ok(scan(e, vc_rules))
}

pub fn step_vc(e: &Expr, at: &Redex, session: &mut Session) -> Result<Expr, StepError> {
    expect_calculus(Calculus::Vc, e.calculus)?;
    fire(e, at, |sub| vc_contract(sub, at.0, session))
}

/// Does the λ-binder's mode accept this argument? A value binder takes
/// values, a computation binder takes computations; anything else is
/// simply not a β-redex.
fn beta_mode_fits(binder: &Binder, arg: &Expr) -> bool {
    match binder.name.ns {
        Namespace::Value => arg.is_value(),
        Namespace::Comp => arg.is_computation(),
        _ => false,
    }
}

fn vc_rules(sub: &Expr) -> Vec<RuleId> {
    let mut out = Vec::new();
    match &sub.node {
        Node::App(f, arg) => {
            if let Node::Lam(x, _) = &f.node {
                if beta_mode_fits(x, arg) {
                    out.push(RuleId::Beta);
                }
            }
        }
        Node::Let(p, v, c) => {
            if matches!(p.node, Node::Ret(_)) {
                out.push(RuleId::Sigma);
            }
            if matches!(p.node, Node::Mu(..)) {
                out.push(RuleId::PiLet);
            }
            if eta_body(v, c).is_some() {
                out.push(RuleId::EtaLet);
            }
        }
        // the bound expression of a sub is always a computation, so
        // every sub is a σ-redex; there is no π through sub
        Node::Sub(..) => out.push(RuleId::Sigma),
        Node::CoApp(_, t) => {
            if matches!(t.node, Node::Mu(..)) {
                out.push(RuleId::PiCovar);
            }
        }
        Node::Mu(a, c) => {
            if let Node::CoApp(b, t) = &c.node {
                if *b == a.name && !t.is_free_in(&a.name) {
                    out.push(RuleId::EtaMu);
                }
            }
        }
        _ => {}
    }
    out
}

fn vc_contract(sub: &Expr, rule: RuleId, session: &mut Session) -> Option<Expr> {
    let cx = sub.calculus;
    let grammar = "contracta stay within the grammar";
    match (rule, &sub.node) {
        // (\%v. P) V  →  mu @b. let %v = ret V in @b P
        // (\#q. P) Q  →  mu @b. sub #q = Q in @b P,  @b fresh
        (RuleId::Beta, Node::App(f, arg)) => {
            let Node::Lam(x, body) = &f.node else { return None };
            if !beta_mode_fits(x, arg) {
                return None;
            }
            let b = fresh_co(session, "b", sub);
            let passed = Expr::coapp(cx, b.clone(), (**body).clone()).expect(grammar);
            let bound = match x.name.ns {
                Namespace::Value => {
                    let ret = Expr::ret(cx, (**arg).clone()).expect(grammar);
                    Expr::let_(cx, ret, x.clone(), passed).expect(grammar)
                }
                _ => Expr::sub(cx, (**arg).clone(), x.clone(), passed).expect(grammar),
            };
            Some(Expr::mu(cx, Binder::new(b), bound).expect(grammar))
        }
        // let %v = ret V in c  →  [V/%v]c
        (RuleId::Sigma, Node::Let(p, v, c)) => {
            let Node::Ret(value) = &p.node else { return None };
            Some(subst(c, &v.name, value).expect("values substitute for value variables"))
        }
        // sub #q = P in c  →  [P/#q]c
        (RuleId::Sigma, Node::Sub(p, q, c)) => {
            Some(subst(c, &q.name, p).expect("computations substitute for computation variables"))
        }
        // let %v = (mu @a. c') in c  →  [let %v = [] in c / @a]c'
        (RuleId::PiLet, Node::Let(p, v, c)) => {
            let Node::Mu(a, inner) = &p.node else { return None };
            let ctx = Expr::let_(cx, Expr::hole(cx), v.clone(), (**c).clone()).expect(grammar);
            Some(struct_subst(inner, &a.name, &ctx).expect("contexts substitute for co-variables"))
        }
        // @b (mu @a. c)  →  [@b/@a]c
        (RuleId::PiCovar, Node::CoApp(b, t)) => {
            let Node::Mu(a, c) = &t.node else { return None };
            let ctx = Expr::coapp(cx, b.clone(), Expr::hole(cx)).expect(grammar);
            Some(struct_subst(c, &a.name, &ctx).expect("contexts substitute for co-variables"))
        }
        // mu @a. @a P  →  P,  @a not free in P
        (RuleId::EtaMu, Node::Mu(a, c)) => {
            let Node::CoApp(b, t) = &c.node else { return None };
            if *b == a.name && !t.is_free_in(&a.name) {
                Some((**t).clone())
            } else {
                None
            }
        }
        // let %v = P in @a (ret %v)  →  @a P
        (RuleId::EtaLet, Node::Let(p, v, c)) => {
            let a = eta_body(v, c)?;
            Some(Expr::coapp(cx, a.clone(), (**p).clone()).expect(grammar))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------
// ivc

pub fn redexes_ivc(e: &Expr) -> Result<Vec<Redex>, StepError> {
    expect_calculus(Calculus::Ivc, e.calculus)?;
    Ok(scan(e, ivc_rules))
}

pub fn step_ivc(e: &Expr, at: &Redex) -> Result<Expr, StepError> {
    expect_calculus(Calculus::Ivc, e.calculus)?;
    fire(e, at, |sub| ivc_contract(sub, at.0))
}

fn ivc_rules(sub: &Expr) -> Vec<RuleId> {
    let mut out = Vec::new();
    match &sub.node {
        Node::App(f, arg) => {
            if let Node::Lam(x, _) = &f.node {
                if beta_mode_fits(x, arg) {
                    out.push(RuleId::Beta);
                }
            }
        }
        Node::Let(p, v, body) => {
            if matches!(p.node, Node::Ret(_)) {
                out.push(RuleId::Sigma);
            }
            // π re-associates only an outer let; an outer sub swallows
            // its bound let/sub whole, by σ
            if matches!(p.node, Node::Let(..) | Node::Sub(..)) {
                out.push(RuleId::PiLet);
            }
            if let Node::Ret(r) = &body.node {
                if matches!(&r.node, Node::Var(n) if *n == v.name) {
                    out.push(RuleId::EtaLetI);
                }
            }
        }
        Node::Sub(..) => out.push(RuleId::Sigma),
        _ => {}
    }
    out
}

fn ivc_contract(sub: &Expr, rule: RuleId) -> Option<Expr> {
    let cx = sub.calculus;
    let grammar = "contracta stay within the grammar";
    match (rule, &sub.node) {
        // (\%v. P) V  →  let %v = ret V in P
        // (\#q. P) Q  →  sub #q = Q in P
        (RuleId::Beta, Node::App(f, arg)) => {
            let Node::Lam(x, body) = &f.node else { return None };
            if !beta_mode_fits(x, arg) {
                return None;
            }
            Some(match x.name.ns {
                Namespace::Value => {
                    let ret = Expr::ret(cx, (**arg).clone()).expect(grammar);
                    Expr::let_(cx, ret, x.clone(), (**body).clone()).expect(grammar)
                }
                _ => Expr::sub(cx, (**arg).clone(), x.clone(), (**body).clone()).expect(grammar),
            })
        }
        (RuleId::Sigma, Node::Let(p, v, body)) => {
            let Node::Ret(value) = &p.node else { return None };
            Some(subst(body, &v.name, value).expect("values substitute for value variables"))
        }
        (RuleId::Sigma, Node::Sub(p, q, body)) => {
            Some(subst(body, &q.name, p).expect("computations substitute for computation variables"))
        }
        // let %w = (let %v = P in Q) in Q'  →  let %v = P in (Q ; %w. Q')
        // let %w = (sub #q = P in Q) in Q'  →  sub #q = P in (Q ; %w. Q')
        (RuleId::PiLet, Node::Let(p, w, q2)) => match &p.node {
            Node::Let(inner_p, v, q) => {
                let (v, q) = avoid_capture(v, q, &q2.free_names());
                let body = seq_comp(q, w, q2);
                Some(Expr::let_(cx, (**inner_p).clone(), v, body).expect(grammar))
            }
            Node::Sub(inner_p, s, q) => {
                let (s, q) = avoid_capture(s, q, &q2.free_names());
                let body = seq_comp(q, w, q2);
                Some(Expr::sub(cx, (**inner_p).clone(), s, body).expect(grammar))
            }
            _ => None,
        },
        // let %v = P in ret %v  →  P
        (RuleId::EtaLetI, Node::Let(p, v, body)) => {
            let Node::Ret(r) = &body.node else { return None };
            if matches!(&r.node, Node::Var(n) if *n == v.name) {
                Some((**p).clone())
            } else {
                None
            }
        }
        _ => None,
    }
}

/// The sequencing operation `Q ; w. Q'`: walk under the let/sub prefix
/// of `Q`, renaming its binders apart from `Q'`, and close off the spine
/// with `let w = Q in Q'` at the first computation that binds nothing.
/// Applied eagerly, so a π-step's result contains no pending `;`.
fn seq_comp(q: Expr, w: &Binder, q2: &Expr) -> Expr {
    let cx = q.calculus;
    let grammar = "sequencing stays within the grammar";
    match q.node {
        Node::Let(p, v, body) => {
            let (v, body) = avoid_capture(&v, &body, &q2.free_names());
            let rest = seq_comp(body, w, q2);
            Expr::let_(cx, *p, v, rest).expect(grammar)
        }
        Node::Sub(p, s, body) => {
            let (s, body) = avoid_capture(&s, &body, &q2.free_names());
            let rest = seq_comp(body, w, q2);
            Expr::sub(cx, *p, s, rest).expect(grammar)
        }
        _ => Expr::let_(cx, q, w.clone(), q2.clone()).expect(grammar),
    }
}

// ---------------------------------------------------------------------
// stlc

pub fn redexes_stlc(e: &Expr) -> Result<Vec<Redex>, StepError> {
    expect_calculus(Calculus::Stlc, e.calculus)?;
    Ok(scan(e, stlc_rules))
}

pub fn step_stlc(e: &Expr, at: &Redex) -> Result<Expr, StepError> {
    expect_calculus(Calculus::Stlc, e.calculus)?;
    fire(e, at, |sub| stlc_contract(sub, at.0))
}

fn stlc_rules(sub: &Expr) -> Vec<RuleId> {
    match &sub.node {
        // (\x. t) V  →  [V/x]t, V a variable or λ: substitution can
        // never duplicate a non-value
        Node::App(f, arg) if matches!(f.node, Node::Lam(..)) && arg.is_value() => {
            vec![RuleId::BetaValue]
        }
        _ => vec![],
    }
}

fn stlc_contract(sub: &Expr, rule: RuleId) -> Option<Expr> {
    match (rule, &sub.node) {
        (RuleId::BetaValue, Node::App(f, arg)) if arg.is_value() => {
            let Node::Lam(x, body) = &f.node else { return None };
            Some(subst(body, &x.name, arg).expect("values substitute for variables"))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn lm(src: &str) -> Expr {
        parse_expr(Calculus::LmM, src).unwrap()
    }

    fn vc(src: &str) -> Expr {
        parse_expr(Calculus::Vc, src).unwrap()
    }

    fn ivc(src: &str) -> Expr {
        parse_expr(Calculus::Ivc, src).unwrap()
    }

    fn stlc(src: &str) -> Expr {
        parse_expr(Calculus::Stlc, src).unwrap()
    }

    fn rules(redexes: &[Redex]) -> Vec<RuleId> {
        redexes.iter().map(|(r, _)| *r).collect()
    }

    #[test]
    fn lm_sigma_and_eta_bind_overlap_and_agree() {
        let e = lm("bind x = ret y in @a (ret x)");
        let found = redexes_lmM(&e, false).unwrap();
        assert_eq!(found, vec![(RuleId::Sigma, vec![]), (RuleId::EtaBind, vec![])]);
        let mut s = Session::new();
        let by_sigma = step_lmM(&e, &(RuleId::Sigma, vec![]), false, &mut s).unwrap();
        let by_eta = step_lmM(&e, &(RuleId::EtaBind, vec![]), false, &mut s).unwrap();
        assert_eq!(by_sigma.to_string(), "@a (ret y)");
        assert_eq!(by_eta.to_string(), "@a (ret y)");
    }

    #[test]
    fn lm_pi_pushes_the_bind_inward() {
        // the body also matches η-bind, and the bound μ has its own η
        let e = lm("bind x = mu @a. @a y in @b (ret x)");
        assert_eq!(
            redexes_lmM(&e, false).unwrap(),
            vec![
                (RuleId::PiBind, vec![]),
                (RuleId::EtaBind, vec![]),
                (RuleId::EtaMu, vec![0]),
            ]
        );
        let mut s = Session::new();
        let stepped = step_lmM(&e, &(RuleId::PiBind, vec![]), false, &mut s).unwrap();
        assert_eq!(stepped.to_string(), "bind x = y in @b (ret x)");

        let e = lm("@b (mu @a. @a y)");
        let stepped = step_lmM(&e, &(RuleId::PiCovar, vec![]), false, &mut s).unwrap();
        assert_eq!(stepped.to_string(), "@b y");
    }

    #[test]
    fn lm_eta_mu_requires_the_co_variable_to_vanish() {
        let mut s = Session::new();
        let e = lm("mu @a. @a y");
        let stepped = step_lmM(&e, &(RuleId::EtaMu, vec![]), false, &mut s).unwrap();
        assert_eq!(stepped.to_string(), "y");

        // @a stays free in the body, so no η at the root — only the π
        // inside remains
        let e = lm("mu @a. @a (mu @b. @a x)");
        assert_eq!(redexes_lmM(&e, false).unwrap(), vec![(RuleId::PiCovar, vec![0])]);
    }

    #[test]
    fn lm_beta_substitutes_or_delays_by_variant() {
        let e = lm("(\\x. x) y");
        let mut s = Session::new();
        let plain = step_lmM(&e, &(RuleId::Beta, vec![]), false, &mut s).unwrap();
        assert_eq!(plain.to_string(), "y");

        let mut s = Session::new();
        let delayed = step_lmM(&e, &(RuleId::Beta, vec![]), true, &mut s).unwrap();
        assert_eq!(delayed.to_string(), "mu @a. bind x = ret y in @a x");

        // both variants see the same redexes
        let nested = lm("(\\x. x) ((\\y. y) z)");
        assert_eq!(redexes_lmM(&nested, false).unwrap(), redexes_lmM(&nested, true).unwrap());
        assert_eq!(
            redexes_lmM(&nested, false).unwrap(),
            vec![(RuleId::Beta, vec![]), (RuleId::Beta, vec![1])]
        );
    }

    #[test]
    fn lm_restricted_beta_draws_a_genuinely_fresh_co_variable() {
        let e = lm("(\\x:X. x) (mu @a. @a z)");
        let mut s = Session::new();
        let stepped = step_lmM(&e, &(RuleId::Beta, vec![]), true, &mut s).unwrap();
        assert_eq!(
            stepped.to_string(),
            "mu @a1. bind x:X = ret (mu @a. @a z) in @a1 x"
        );
    }

    #[test]
    fn vc_beta_sigma_eta_mu_chain_substitutes_eagerly() {
        let start = vc("(\\%v. ret %v) %w");
        assert_eq!(rules(&redexes_vc(&start).unwrap()), vec![RuleId::Beta]);

        let mut s = Session::new();
        let one = step_vc(&start, &(RuleId::Beta, vec![]), &mut s).unwrap();
        assert_eq!(one.to_string(), "mu @b. let %v = ret %w in @b (ret %v)");

        let found = redexes_vc(&one).unwrap();
        assert_eq!(found, vec![(RuleId::Sigma, vec![0]), (RuleId::EtaLet, vec![0])]);
        let two = step_vc(&one, &(RuleId::Sigma, vec![0]), &mut s).unwrap();
        assert_eq!(two.to_string(), "mu @b. @b (ret %w)");

        let three = step_vc(&two, &(RuleId::EtaMu, vec![]), &mut s).unwrap();
        assert_eq!(three.to_string(), "ret %w");
    }

    #[test]
    fn vc_beta_on_a_computation_binder_uses_sub() {
        let e = vc("(\\#q. ret %w) (ret %v)");
        let mut s = Session::new();
        let stepped = step_vc(&e, &(RuleId::Beta, vec![]), &mut s).unwrap();
        assert_eq!(stepped.to_string(), "mu @b. sub #q = ret %v in @b (ret %w)");
    }

    #[test]
    fn vc_beta_requires_the_argument_class_to_match() {
        // computation argument against a value binder, and vice versa
        assert_eq!(rules(&redexes_vc(&vc("(\\%v. ret %v) #p")).unwrap()), vec![]);
        assert_eq!(rules(&redexes_vc(&vc("(\\#q. ret %w) %v")).unwrap()), vec![]);
    }

    #[test]
    fn vc_sub_swallows_any_computation() {
        let e = vc("sub #q = mu @a. @a (ret %v) in @b #q");
        assert_eq!(
            redexes_vc(&e).unwrap(),
            vec![(RuleId::Sigma, vec![]), (RuleId::EtaMu, vec![0])]
        );
        let mut s = Session::new();
        let stepped = step_vc(&e, &(RuleId::Sigma, vec![]), &mut s).unwrap();
        assert_eq!(stepped.to_string(), "@b (mu @a. @a (ret %v))");
    }

    #[test]
    fn vc_pi_let_and_eta_let_overlap_but_rejoin() {
        let e = vc("let %v = mu @a. @a (ret %w) in @b (ret %v)");
        assert_eq!(
            redexes_vc(&e).unwrap(),
            vec![
                (RuleId::PiLet, vec![]),
                (RuleId::EtaLet, vec![]),
                (RuleId::EtaMu, vec![0]),
            ]
        );
        let mut s = Session::new();
        let by_pi = step_vc(&e, &(RuleId::PiLet, vec![]), &mut s).unwrap();
        assert_eq!(by_pi.to_string(), "let %v = ret %w in @b (ret %v)");
        let by_eta = step_vc(&e, &(RuleId::EtaLet, vec![]), &mut s).unwrap();
        assert_eq!(by_eta.to_string(), "@b (mu @a. @a (ret %w))");

        // one more step each side reaches the same command
        let joined_pi = step_vc(&by_pi, &(RuleId::Sigma, vec![]), &mut s).unwrap();
        let joined_eta = step_vc(&by_eta, &(RuleId::PiCovar, vec![]), &mut s).unwrap();
        assert_eq!(joined_pi.to_string(), "@b (ret %w)");
        assert_eq!(joined_eta.to_string(), "@b (ret %w)");
    }

    #[test]
    fn ivc_beta_insists_on_a_value_argument() {
        let e = ivc("(\\%v. ret %v) %w");
        assert_eq!(
            step_ivc(&e, &(RuleId::Beta, vec![])).unwrap().to_string(),
            "let %v = ret %w in ret %v"
        );

        let e = ivc("(\\#q. ret %v) (ret %w)");
        assert_eq!(
            step_ivc(&e, &(RuleId::Beta, vec![])).unwrap().to_string(),
            "sub #q = ret %w in ret %v"
        );

        // a candidate β with a computation argument is only a redex
        // further inside
        let e = ivc("(\\%v. ret %v) ((\\%w. ret %w) %u)");
        assert_eq!(redexes_ivc(&e).unwrap(), vec![(RuleId::Beta, vec![1])]);
    }

    #[test]
    fn ivc_sigma_and_eta_overlap_on_trivial_lets() {
        let e = ivc("let %v = ret %w in ret %v");
        assert_eq!(
            rules(&redexes_ivc(&e).unwrap()),
            vec![RuleId::Sigma, RuleId::EtaLetI]
        );
        assert_eq!(step_ivc(&e, &(RuleId::Sigma, vec![])).unwrap().to_string(), "ret %w");
        assert_eq!(step_ivc(&e, &(RuleId::EtaLetI, vec![])).unwrap().to_string(), "ret %w");

        // σ through sub takes the whole bound computation, even a let
        let e = ivc("sub #q = let %v = ret %w in ret %v in #q");
        assert_eq!(
            redexes_ivc(&e).unwrap(),
            vec![
                (RuleId::Sigma, vec![]),
                (RuleId::Sigma, vec![0]),
                (RuleId::EtaLetI, vec![0]),
            ]
        );
        assert_eq!(
            step_ivc(&e, &(RuleId::Sigma, vec![])).unwrap().to_string(),
            "let %v = ret %w in ret %v"
        );
    }

    #[test]
    fn ivc_pi_re_associates_lets_through_sequencing() {
        let e = ivc("let %w = (let %v = #p in ret %v) in ret %w");
        assert_eq!(
            redexes_ivc(&e).unwrap(),
            vec![
                (RuleId::PiLet, vec![]),
                (RuleId::EtaLetI, vec![]),
                (RuleId::EtaLetI, vec![0]),
            ]
        );
        assert_eq!(
            step_ivc(&e, &(RuleId::PiLet, vec![])).unwrap().to_string(),
            "let %v = #p in let %w = ret %v in ret %w"
        );

        let e = ivc("let %w = (sub #q = #p in #q) in ret %w");
        assert_eq!(
            step_ivc(&e, &(RuleId::PiLet, vec![])).unwrap().to_string(),
            "sub #q = #p in let %w = #q in ret %w"
        );

        // the sequencing walks the whole binding spine
        let e = ivc("let %u = (let %v = #p in let %w = #q in ret %v) in ret %u");
        assert_eq!(
            step_ivc(&e, &(RuleId::PiLet, vec![])).unwrap().to_string(),
            "let %v = #p in let %w = #q in let %u = ret %v in ret %u"
        );
    }

    #[test]
    fn ivc_pi_renames_binders_apart_from_the_outer_body() {
        // %v is free in the outer body, so the inner binder must move
        let e = ivc("let %w = (let %v = #p in ret %v) in ret %v");
        assert_eq!(
            step_ivc(&e, &(RuleId::PiLet, vec![])).unwrap().to_string(),
            "let %v1 = #p in let %w = ret %v1 in ret %v"
        );
    }

    #[test]
    fn ivc_eta_needs_the_bound_variable_returned() {
        let e = ivc("let %v = #p in ret %v");
        assert_eq!(rules(&redexes_ivc(&e).unwrap()), vec![RuleId::EtaLetI]);
        assert_eq!(step_ivc(&e, &(RuleId::EtaLetI, vec![])).unwrap().to_string(), "#p");

        assert_eq!(rules(&redexes_ivc(&ivc("let %v = #p in ret %w")).unwrap()), vec![]);
    }

    #[test]
    fn stlc_beta_needs_a_value_argument() {
        let e = stlc("(\\x. x x) (\\y. y)");
        assert_eq!(redexes_stlc(&e).unwrap(), vec![(RuleId::BetaValue, vec![])]);
        assert_eq!(
            step_stlc(&e, &(RuleId::BetaValue, vec![])).unwrap().to_string(),
            "(\\y. y) (\\y. y)"
        );

        assert_eq!(redexes_stlc(&stlc("(\\x. x) (y z)")).unwrap(), vec![]);
        assert_eq!(redexes_stlc(&stlc("(\\x. x x) (y z)")).unwrap(), vec![]);
    }

    #[test]
    fn step_errors_identify_the_problem() {
        let e = vc("ret %v");
        let mut s = Session::new();
        assert_eq!(
            step_vc(&e, &(RuleId::Sigma, vec![]), &mut s),
            Err(StepError::NotARedex { rule: RuleId::Sigma, path: vec![] })
        );
        assert_eq!(
            step_vc(&e, &(RuleId::Sigma, vec![2]), &mut s),
            Err(StepError::NoSuchPath { path: vec![2] })
        );
        assert!(matches!(
            redexes_vc(&lm("ret x")),
            Err(StepError::WrongCalculus { .. })
        ));
        assert!(matches!(
            typecheck_vc(&Sequent::new(lm("ret x"))),
            Err(TypeError::WrongCalculus { .. })
        ));
    }
}
