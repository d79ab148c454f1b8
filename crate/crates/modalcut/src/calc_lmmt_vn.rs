//! The moded sequent calculus: value variables `%v` and computation
//! variables `#n`, stacks and implications annotated `v`/`n`, and the
//! rewrite rules refined so that the critical pair of the unmoded
//! calculus never arises.
//!
//! The mode of a μ̃-binder decides the fate of `< mu @a. c | mt x. c' >`:
//! a value binder makes the μ̃ a co-value and the command a π-redex, a
//! computation binder makes it a σ-redex, never both. The price is that
//! some commands, like `< #n | mt %v. c >`, are stuck without being
//! excluded by typing.

use std::fmt;

use crate::rules::{expect_calculus, Redex, RuleId, StepError};
use crate::syntax::{avoid_capture, struct_subst, subst, Calculus, Class, Expr, Mode, Namespace, Node};
use crate::typing::{check_sequent, Derivation, Sequent, TypeError};

/// The five syntactic classes an expression of the moded calculus can
/// inhabit. λ-abstractions are values whatever the mode of their binder;
/// `mt %v. c` is a co-value, `mt #n. c` is not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Value,
    NonValueTerm,
    CoValue,
    NonCoValueCoTerm,
    Command,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Value => "value",
            Classification::NonValueTerm => "non-value-term",
            Classification::CoValue => "co-value",
            Classification::NonCoValueCoTerm => "non-co-value-co-term",
            Classification::Command => "command",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_vn(e: &Expr) -> Result<Classification, StepError> {
    expect_calculus(Calculus::LmmtVn, e.calculus)?;
    Ok(match e.class() {
        Class::Term => {
            if e.is_value() {
                Classification::Value
            } else {
                Classification::NonValueTerm
            }
        }
        Class::CoTerm => {
            if e.is_covalue() {
                Classification::CoValue
            } else {
                Classification::NonCoValueCoTerm
            }
        }
        Class::Command => Classification::Command,
        Class::Context => unreachable!("the moded calculus has no contexts"),
    })
}

pub fn typecheck_vn(seq: &Sequent) -> Result<Derivation, TypeError> {
    if seq.subject.calculus != Calculus::LmmtVn {
        return Err(TypeError::WrongCalculus {
            expected: Calculus::LmmtVn,
            found: seq.subject.calculus,
        });
    }
    check_sequent(seq, false)
}

/// All redexes of `e`, in preorder. A β-redex requires the λ-binder's
/// mode to match the stack annotation; a mismatch is simply not a redex
/// (and not typable either).
pub fn redexes_vn(e: &Expr) -> Result<Vec<Redex>, StepError> {
    expect_calculus(Calculus::LmmtVn, e.calculus)?;
    let mut out = Vec::new();
    for path in e.paths() {
        let sub = e.subexpr_at(&path).expect("paths enumerates existing paths");
        for rule in local_rules(sub) {
            out.push((rule, path.clone()));
        }
    }
    Ok(out)
}

pub fn step_vn(e: &Expr, at: &Redex) -> Result<Expr, StepError> {
    expect_calculus(Calculus::LmmtVn, e.calculus)?;
    let (rule, path) = at;
    let sub = e
        .subexpr_at(path)
        .ok_or_else(|| StepError::NoSuchPath { path: path.clone() })?;
    let contractum = contract(sub, *rule)
        .ok_or_else(|| StepError::NotARedex { rule: *rule, path: path.clone() })?;
    Ok(e.replace_at(path, contractum)
        .expect("a contractum has the class of its redex"))
}

fn local_rules(sub: &Expr) -> Vec<RuleId> {
    let mut out = Vec::new();
    match &sub.node {
        Node::Command(t, e) => {
            if let (Node::Lam(x, _), Node::Cons(Some(mode), _, _)) = (&t.node, &e.node) {
                if x.name.ns == mode.namespace() {
                    out.push(match mode {
                        Mode::V => RuleId::BetaV,
                        Mode::N => RuleId::BetaN,
                    });
                }
            }
            if matches!(t.node, Node::Mu(..)) && e.is_covalue() {
                out.push(RuleId::Pi);
            }
            if let Node::MuTilde(x, _) = &e.node {
                match x.name.ns {
                    Namespace::Comp => out.push(RuleId::SigmaN),
                    Namespace::Value if t.is_value() => out.push(RuleId::SigmaV),
                    _ => {}
                }
            }
        }
        Node::MuTilde(x, c) => {
            if let Node::Command(t, e) = &c.node {
                if matches!(&t.node, Node::Var(n) if *n == x.name) && !e.is_free_in(&x.name) {
                    match x.name.ns {
                        Namespace::Comp => out.push(RuleId::EtaMtN),
                        // dropping the co-value condition would rewrite the
                        // co-value mt %v. < %v | mt #n. c > to a non-co-value
                        Namespace::Value if e.is_covalue() => out.push(RuleId::EtaMtV),
                        _ => {}
                    }
                }
            }
        }
        Node::Mu(a, c) => {
            if let Node::Command(t, e) = &c.node {
                if matches!(&e.node, Node::CoVar(n) if *n == a.name) && !t.is_free_in(&a.name) {
                    out.push(RuleId::EtaMu);
                }
            }
        }
        _ => {}
    }
    out
}

fn contract(sub: &Expr, rule: RuleId) -> Option<Expr> {
    let cx = sub.calculus;
    match (rule, &sub.node) {
        // < \x. t | u ::x e >  →  < u | mt x. < t | e > >, modes agreeing
        (RuleId::BetaV | RuleId::BetaN, Node::Command(t, e)) => {
            let (Node::Lam(x, body), Node::Cons(Some(mode), u, tail)) = (&t.node, &e.node) else {
                return None;
            };
            let want = match rule {
                RuleId::BetaV => Mode::V,
                _ => Mode::N,
            };
            if *mode != want || x.name.ns != want.namespace() {
                return None;
            }
            let (x, body) = avoid_capture(x, body, &tail.free_names());
            let inner = Expr::command(cx, body, (**tail).clone())
                .expect("contracta stay within the grammar");
            let mt = Expr::mu_tilde(cx, x, inner).expect("contracta stay within the grammar");
            Some(Expr::command(cx, (**u).clone(), mt).expect("contracta stay within the grammar"))
        }
        // < t | mt x. c >  →  [t/x]c, t a value when x is
        (RuleId::SigmaV | RuleId::SigmaN, Node::Command(t, e)) => {
            let Node::MuTilde(x, c) = &e.node else { return None };
            let want = match rule {
                RuleId::SigmaV => Namespace::Value,
                _ => Namespace::Comp,
            };
            if x.name.ns != want || (want == Namespace::Value && !t.is_value()) {
                return None;
            }
            Some(subst(c, &x.name, t).expect("terms substitute for term variables"))
        }
        // < mu @a. c | E >  →  [E/@a]c, E a co-value
        (RuleId::Pi, Node::Command(t, e)) => {
            let Node::Mu(a, c) = &t.node else { return None };
            if !e.is_covalue() {
                return None;
            }
            Some(struct_subst(c, &a.name, e).expect("co-terms substitute for co-variables"))
        }
        // mt x. < x | e >  →  e,  x not free in e, e a co-value when x is %
        (RuleId::EtaMtV | RuleId::EtaMtN, Node::MuTilde(x, c)) => {
            let Node::Command(t, e) = &c.node else { return None };
            let want = match rule {
                RuleId::EtaMtV => Namespace::Value,
                _ => Namespace::Comp,
            };
            if x.name.ns != want
                || !matches!(&t.node, Node::Var(n) if *n == x.name)
                || e.is_free_in(&x.name)
                || (want == Namespace::Value && !e.is_covalue())
            {
                return None;
            }
            Some((**e).clone())
        }
        // mu @a. < t | @a >  →  t,  @a not free in t
        (RuleId::EtaMu, Node::Mu(a, c)) => {
            let Node::Command(t, e) = &c.node else { return None };
            if matches!(&e.node, Node::CoVar(n) if *n == a.name) && !t.is_free_in(&a.name) {
                Some((**t).clone())
            } else {
                None
            }
        }
        _ => None,
    }
}
