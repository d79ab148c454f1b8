use std::collections::BTreeSet;

use thiserror::Error;

use super::expr::{Binder, Class, Expr, ExprError, Node};
use super::name::{Name, Namespace};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("cannot substitute a {found} for {name}: its occurrences are {expected}s")]
    ClassMismatch { name: Name, expected: &'static str, found: Class },
    #[error("co-variables of {0} are replaced structurally; use a context or co-term target")]
    NeedStructural(Name),
    #[error("a structural substitution target must be a co-term or a one-hole context, not a {0}")]
    BadTarget(Class),
    #[error("the fill target contains no hole")]
    NoHole,
    #[error("cannot fill a hole with another context")]
    HoleInFiller,
    #[error(transparent)]
    Grammar(#[from] ExprError),
}

/// Replace every free occurrence of `old` in `e` by `new`, where `new` is a
/// name fresh for `e` (the caller guarantees this, so no capture can occur).
/// Binders named `old` shadow as usual. Co-variable renamings also retarget
/// `@old t` applications.
fn rename_free(e: &Expr, old: &Name, new: &Name) -> Expr {
    fn go(e: &Expr, old: &Name, new: &Name) -> Expr {
        let node = match &e.node {
            Node::Var(n) if n == old => Node::Var(new.clone()),
            Node::CoVar(n) if n == old => Node::CoVar(new.clone()),
            Node::Var(_) | Node::CoVar(_) | Node::Hole => e.node.clone(),
            Node::Lam(b, body) | Node::Mu(b, body) | Node::MuTilde(b, body) => {
                let body = if &b.name == old { body.clone() } else { Box::new(go(body, old, new)) };
                match &e.node {
                    Node::Lam(..) => Node::Lam(b.clone(), body),
                    Node::Mu(..) => Node::Mu(b.clone(), body),
                    _ => Node::MuTilde(b.clone(), body),
                }
            }
            Node::Ret(t) => Node::Ret(Box::new(go(t, old, new))),
            Node::CoApp(a, t) => {
                let a = if a == old { new.clone() } else { a.clone() };
                Node::CoApp(a, Box::new(go(t, old, new)))
            }
            Node::Command(l, r) => {
                Node::Command(Box::new(go(l, old, new)), Box::new(go(r, old, new)))
            }
            Node::Cons(m, l, r) => {
                Node::Cons(*m, Box::new(go(l, old, new)), Box::new(go(r, old, new)))
            }
            Node::App(l, r) => Node::App(Box::new(go(l, old, new)), Box::new(go(r, old, new))),
            Node::Let(p, b, c) | Node::Sub(p, b, c) | Node::Bind(p, b, c) => {
                let p = Box::new(go(p, old, new));
                let c = if &b.name == old { c.clone() } else { Box::new(go(c, old, new)) };
                match &e.node {
                    Node::Let(..) => Node::Let(p, b.clone(), c),
                    Node::Sub(..) => Node::Sub(p, b.clone(), c),
                    _ => Node::Bind(p, b.clone(), c),
                }
            }
        };
        // renaming preserves shape, so revalidation cannot fail
        Expr::new(e.calculus, node).expect("renaming preserves the grammar")
    }
    go(e, old, new)
}

/// Rename `binder` apart from `avoid` (plus everything in `body`), returning
/// the possibly renamed binder and correspondingly adjusted body. Used by
/// rules that move a binder over foreign subexpressions.
pub fn avoid_capture(binder: &Binder, body: &Expr, avoid: &BTreeSet<Name>) -> (Binder, Expr) {
    if !avoid.contains(&binder.name) {
        return (binder.clone(), body.clone());
    }
    let taken: BTreeSet<Name> = avoid.union(&body.all_names()).cloned().collect();
    let mut idx = binder.name.index + 1;
    let fresh = loop {
        let cand = binder.name.with_index(idx);
        if !taken.contains(&cand) {
            break cand;
        }
        idx += 1;
    };
    let body = rename_free(body, &binder.name, &fresh);
    (Binder { name: fresh, ann: binder.ann.clone() }, body)
}

fn subst_under_binder(
    b: &Binder,
    body: &Expr,
    x: &Name,
    r: &Expr,
    r_free: &BTreeSet<Name>,
) -> Result<(Binder, Expr), SubstError> {
    if &b.name == x {
        return Ok((b.clone(), body.clone()));
    }
    if r_free.contains(&b.name) && body.is_free_in(x) {
        let mut avoid = r_free.clone();
        avoid.insert(x.clone());
        let (b2, body2) = avoid_capture(b, body, &avoid);
        let body2 = subst_inner(&body2, x, r, r_free)?;
        Ok((b2, body2))
    } else {
        Ok((b.clone(), subst_inner(body, x, r, r_free)?))
    }
}

fn subst_inner(
    e: &Expr,
    x: &Name,
    r: &Expr,
    r_free: &BTreeSet<Name>,
) -> Result<Expr, SubstError> {
    let node = match &e.node {
        Node::Var(n) if n == x => return Ok(r.clone()),
        Node::CoVar(n) if n == x => return Ok(r.clone()),
        Node::Var(_) | Node::CoVar(_) | Node::Hole => e.node.clone(),
        Node::Lam(b, body) => {
            let (b, body) = subst_under_binder(b, body, x, r, r_free)?;
            Node::Lam(b, Box::new(body))
        }
        Node::Mu(b, body) => {
            let (b, body) = subst_under_binder(b, body, x, r, r_free)?;
            Node::Mu(b, Box::new(body))
        }
        Node::MuTilde(b, body) => {
            let (b, body) = subst_under_binder(b, body, x, r, r_free)?;
            Node::MuTilde(b, Box::new(body))
        }
        Node::Ret(t) => Node::Ret(Box::new(subst_inner(t, x, r, r_free)?)),
        Node::CoApp(a, t) => Node::CoApp(a.clone(), Box::new(subst_inner(t, x, r, r_free)?)),
        Node::Command(l, rr) => Node::Command(
            Box::new(subst_inner(l, x, r, r_free)?),
            Box::new(subst_inner(rr, x, r, r_free)?),
        ),
        Node::Cons(m, l, rr) => Node::Cons(
            *m,
            Box::new(subst_inner(l, x, r, r_free)?),
            Box::new(subst_inner(rr, x, r, r_free)?),
        ),
        Node::App(l, rr) => Node::App(
            Box::new(subst_inner(l, x, r, r_free)?),
            Box::new(subst_inner(rr, x, r, r_free)?),
        ),
        Node::Let(p, b, c) => {
            let p = Box::new(subst_inner(p, x, r, r_free)?);
            let (b, c) = subst_under_binder(b, c, x, r, r_free)?;
            Node::Let(p, b, Box::new(c))
        }
        Node::Sub(p, b, c) => {
            let p = Box::new(subst_inner(p, x, r, r_free)?);
            let (b, c) = subst_under_binder(b, c, x, r, r_free)?;
            Node::Sub(p, b, Box::new(c))
        }
        Node::Bind(p, b, c) => {
            let p = Box::new(subst_inner(p, x, r, r_free)?);
            let (b, c) = subst_under_binder(b, c, x, r, r_free)?;
            Node::Bind(p, b, Box::new(c))
        }
    };
    Ok(Expr::new(e.calculus, node)?)
}

/// Capture-avoiding substitution `[r/x]e`. Term variables take term
/// replacements; in the sequent calculi a co-variable takes a co-term. For
/// the calculi whose co-variables occur applied (`@a t`), use
/// [`struct_subst`] instead.
pub fn subst(e: &Expr, x: &Name, r: &Expr) -> Result<Expr, SubstError> {
    if x.ns == Namespace::Co {
        match e.calculus {
            super::expr::Calculus::Lmmt | super::expr::Calculus::LmmtVn => {
                if r.class() != Class::CoTerm {
                    return Err(SubstError::ClassMismatch {
                        name: x.clone(),
                        expected: "co-term",
                        found: r.class(),
                    });
                }
            }
            _ => return Err(SubstError::NeedStructural(x.clone())),
        }
    } else if r.class() != Class::Term {
        return Err(SubstError::ClassMismatch {
            name: x.clone(),
            expected: "term",
            found: r.class(),
        });
    }
    subst_inner(e, x, r, &r.free_names())
}

fn fill_inner(ctx: &Expr, filler: &Expr) -> Result<Expr, SubstError> {
    if let Node::Hole = ctx.node {
        return Ok(filler.clone());
    }
    let mut node = ctx.node.clone();
    {
        let slot: &mut Box<Expr> = match &mut node {
            Node::Lam(_, b) | Node::Mu(_, b) | Node::MuTilde(_, b) => b,
            Node::Ret(t) | Node::CoApp(_, t) => t,
            Node::Command(l, r) | Node::Cons(_, l, r) | Node::App(l, r) => {
                if l.has_hole() {
                    l
                } else {
                    r
                }
            }
            Node::Let(p, _, c) | Node::Sub(p, _, c) | Node::Bind(p, _, c) => {
                if p.has_hole() {
                    p
                } else {
                    c
                }
            }
            Node::Var(_) | Node::CoVar(_) | Node::Hole => unreachable!("no hole below"),
        };
        **slot = fill_inner(slot, filler)?;
    }
    Ok(Expr::new(ctx.calculus, node)?)
}

/// Plug `filler` into the unique hole of `ctx`, revalidating the spine (so
/// a filler of the wrong class is rejected). The contexts of these calculi
/// never put the hole under a binder, hence no renaming happens here.
pub fn fill(ctx: &Expr, filler: &Expr) -> Result<Expr, SubstError> {
    if !ctx.has_hole() {
        return Err(SubstError::NoHole);
    }
    if filler.has_hole() {
        return Err(SubstError::HoleInFiller);
    }
    fill_inner(ctx, filler)
}

fn struct_under_binder(
    b: &Binder,
    body: &Expr,
    a: &Name,
    tgt: &Expr,
    tgt_free: &BTreeSet<Name>,
) -> Result<(Binder, Expr), SubstError> {
    if &b.name == a {
        return Ok((b.clone(), body.clone()));
    }
    if tgt_free.contains(&b.name) && body.is_free_in(a) {
        let mut avoid = tgt_free.clone();
        avoid.insert(a.clone());
        let (b2, body2) = avoid_capture(b, body, &avoid);
        let body2 = struct_inner(&body2, a, tgt, tgt_free)?;
        Ok((b2, body2))
    } else {
        Ok((b.clone(), struct_inner(body, a, tgt, tgt_free)?))
    }
}

fn struct_inner(
    e: &Expr,
    a: &Name,
    tgt: &Expr,
    tgt_free: &BTreeSet<Name>,
) -> Result<Expr, SubstError> {
    let node = match &e.node {
        Node::CoVar(n) if n == a => {
            if tgt.class() != Class::CoTerm {
                return Err(SubstError::BadTarget(tgt.class()));
            }
            return Ok(tgt.clone());
        }
        Node::CoApp(n, t) if n == a => {
            let t = struct_inner(t, a, tgt, tgt_free)?;
            if tgt.class() != Class::Context {
                return Err(SubstError::BadTarget(tgt.class()));
            }
            return fill(tgt, &t);
        }
        Node::Var(_) | Node::CoVar(_) | Node::Hole => e.node.clone(),
        Node::Lam(b, body) => {
            let (b, body) = struct_under_binder(b, body, a, tgt, tgt_free)?;
            Node::Lam(b, Box::new(body))
        }
        Node::Mu(b, body) => {
            let (b, body) = struct_under_binder(b, body, a, tgt, tgt_free)?;
            Node::Mu(b, Box::new(body))
        }
        Node::MuTilde(b, body) => {
            let (b, body) = struct_under_binder(b, body, a, tgt, tgt_free)?;
            Node::MuTilde(b, Box::new(body))
        }
        Node::Ret(t) => Node::Ret(Box::new(struct_inner(t, a, tgt, tgt_free)?)),
        Node::CoApp(n, t) => Node::CoApp(n.clone(), Box::new(struct_inner(t, a, tgt, tgt_free)?)),
        Node::Command(l, r) => Node::Command(
            Box::new(struct_inner(l, a, tgt, tgt_free)?),
            Box::new(struct_inner(r, a, tgt, tgt_free)?),
        ),
        Node::Cons(m, l, r) => Node::Cons(
            *m,
            Box::new(struct_inner(l, a, tgt, tgt_free)?),
            Box::new(struct_inner(r, a, tgt, tgt_free)?),
        ),
        Node::App(l, r) => Node::App(
            Box::new(struct_inner(l, a, tgt, tgt_free)?),
            Box::new(struct_inner(r, a, tgt, tgt_free)?),
        ),
        Node::Let(p, b, c) => {
            let p = Box::new(struct_inner(p, a, tgt, tgt_free)?);
            let (b, c) = struct_under_binder(b, c, a, tgt, tgt_free)?;
            Node::Let(p, b, Box::new(c))
        }
        Node::Sub(p, b, c) => {
            let p = Box::new(struct_inner(p, a, tgt, tgt_free)?);
            let (b, c) = struct_under_binder(b, c, a, tgt, tgt_free)?;
            Node::Sub(p, b, Box::new(c))
        }
        Node::Bind(p, b, c) => {
            let p = Box::new(struct_inner(p, a, tgt, tgt_free)?);
            let (b, c) = struct_under_binder(b, c, a, tgt, tgt_free)?;
            Node::Bind(p, b, Box::new(c))
        }
    };
    Ok(Expr::new(e.calculus, node)?)
}

/// Structural substitution `[tgt/a]e` for a co-variable `a`. In the sequent
/// calculi `tgt` is a co-term replacing occurrences of `a`; in the monadic
/// calculi `tgt` is a one-hole context and every application `@a t` becomes
/// `tgt[t]`. Renaming a co-variable is the special case `tgt = @b []`.
pub fn struct_subst(e: &Expr, a: &Name, tgt: &Expr) -> Result<Expr, SubstError> {
    if a.ns != Namespace::Co {
        return Err(SubstError::ClassMismatch {
            name: a.clone(),
            expected: "co-variable",
            found: tgt.class(),
        });
    }
    if !matches!(tgt.class(), Class::CoTerm | Class::Context) {
        return Err(SubstError::BadTarget(tgt.class()));
    }
    struct_inner(e, a, tgt, &tgt.free_names())
}

/// A canonical string for α-comparison: bound names become per-namespace
/// indices and free names are kept verbatim. Binder annotations are
/// ignored — they are surface decoration for the typechecker, and
/// reduction both erases them (substituting an annotated binder away) and
/// mints binders without them, so they cannot take part in term identity.
/// Two expressions are α-equivalent exactly when their keys coincide.
pub fn alpha_key(e: &Expr) -> String {
    fn name_ref(n: &Name, stack: &[Name], out: &mut String) {
        for (depth, bound) in stack.iter().rev().enumerate() {
            if bound == n {
                out.push('!');
                out.push_str(n.ns.sigil());
                out.push_str(&depth.to_string());
                return;
            }
        }
        out.push('?');
        out.push_str(&n.to_string());
    }

    fn binder_tag(b: &Binder, out: &mut String) {
        out.push_str(b.name.ns.sigil());
        out.push('.');
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
            Node::Lam(b, body) => {
                out.push('L');
                binder_tag(b, out);
                stack.push(b.name.clone());
                go(body, stack, out);
                stack.pop();
            }
            Node::Mu(b, body) => {
                out.push('M');
                binder_tag(b, out);
                stack.push(b.name.clone());
                go(body, stack, out);
                stack.pop();
            }
            Node::MuTilde(b, body) => {
                out.push('T');
                binder_tag(b, out);
                stack.push(b.name.clone());
                go(body, stack, out);
                stack.pop();
            }
            Node::Command(l, r) => {
                out.push('K');
                go(l, stack, out);
                out.push('|');
                go(r, stack, out);
            }
            Node::Cons(m, l, r) => {
                out.push('S');
                if let Some(m) = m {
                    out.push_str(m.suffix());
                }
                go(l, stack, out);
                out.push(',');
                go(r, stack, out);
            }
            Node::App(l, r) => {
                out.push('A');
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
                binder_tag(b, out);
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

pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    a.calculus == b.calculus && alpha_key(a) == alpha_key(b)
}
