use std::fmt::Write;

use super::expr::{Expr, Node};
use super::ty::TypeExpr;

/// Where a subexpression sits, for parenthesization. The printer emits the
/// minimal parentheses the grammar needs (plus the conventional ones around
/// prefix forms used as operands), and `parse` is its exact inverse up to α
/// — in fact up to syntactic equality.
#[derive(Clone, Copy, PartialEq)]
enum Pos {
    /// Command bodies, λ/μ/μ̃ bodies, cons tails, sequent subjects.
    Top,
    /// Head u of `u :: e`.
    ConsHead,
    /// Left of an application.
    AppHead,
    /// Right of an application.
    AppArg,
    /// Argument of `@a _`.
    CoArg,
    /// Bound expression of let/sub/bind.
    LetBound,
    /// Argument of `ret`.
    RetArg,
}

fn parens_needed(e: &Expr, pos: Pos) -> bool {
    match &e.node {
        Node::Var(_) | Node::CoVar(_) | Node::Hole | Node::Command(..) => false,
        Node::Lam(..) | Node::Mu(..) | Node::MuTilde(..) | Node::Ret(_) => {
            !matches!(pos, Pos::Top | Pos::LetBound)
        }
        Node::App(..) => matches!(pos, Pos::AppArg | Pos::CoArg | Pos::RetArg),
        Node::Cons(..) => !matches!(pos, Pos::Top),
        Node::Let(..) | Node::Sub(..) | Node::Bind(..) | Node::CoApp(..) => {
            // commands only ever sit at Top; the intuitionistic let/sub are
            // terms and get parenthesized as operands and as bound
            // expressions of an enclosing let/sub
            !matches!(pos, Pos::Top)
        }
    }
}

fn fmt_expr(e: &Expr, pos: Pos, out: &mut String) {
    let parens = parens_needed(e, pos);
    if parens {
        out.push('(');
    }
    match &e.node {
        Node::Var(n) | Node::CoVar(n) => {
            let _ = write!(out, "{n}");
        }
        Node::Hole => out.push_str("[]"),
        Node::Lam(b, body) => {
            let _ = write!(out, "\\{b}. ");
            fmt_expr(body, Pos::Top, out);
        }
        Node::Mu(b, body) => {
            let _ = write!(out, "mu {b}. ");
            fmt_expr(body, Pos::Top, out);
        }
        Node::MuTilde(b, body) => {
            let _ = write!(out, "mt {b}. ");
            fmt_expr(body, Pos::Top, out);
        }
        Node::Command(t, co) => {
            out.push_str("< ");
            fmt_expr(t, Pos::Top, out);
            out.push_str(" | ");
            fmt_expr(co, Pos::Top, out);
            out.push_str(" >");
        }
        Node::Cons(mode, u, co) => {
            fmt_expr(u, Pos::ConsHead, out);
            match mode {
                None => out.push_str(" :: "),
                Some(m) => {
                    let _ = write!(out, " ::{} ", m.suffix());
                }
            }
            fmt_expr(co, Pos::Top, out);
        }
        Node::App(t, u) => {
            fmt_expr(t, Pos::AppHead, out);
            out.push(' ');
            fmt_expr(u, Pos::AppArg, out);
        }
        Node::Ret(t) => {
            out.push_str("ret ");
            fmt_expr(t, Pos::RetArg, out);
        }
        Node::CoApp(a, t) => {
            let _ = write!(out, "{a} ");
            fmt_expr(t, Pos::CoArg, out);
        }
        Node::Let(p, b, c) => {
            let _ = write!(out, "let {b} = ");
            fmt_expr(p, Pos::LetBound, out);
            out.push_str(" in ");
            fmt_expr(c, Pos::Top, out);
        }
        Node::Sub(p, b, c) => {
            let _ = write!(out, "sub {b} = ");
            fmt_expr(p, Pos::LetBound, out);
            out.push_str(" in ");
            fmt_expr(c, Pos::Top, out);
        }
        Node::Bind(t, b, c) => {
            let _ = write!(out, "bind {b} = ");
            fmt_expr(t, Pos::LetBound, out);
            out.push_str(" in ");
            fmt_expr(c, Pos::Top, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Render an expression in the surface syntax.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    fmt_expr(e, Pos::Top, &mut out);
    out
}

/// Render a type in the surface syntax.
pub fn print_type(t: &TypeExpr) -> String {
    t.to_string()
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", print_expr(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::expr::{Binder, Calculus};
    use crate::syntax::name::{Mode, Name};

    #[test]
    fn prints_the_standard_shapes() {
        let c = Calculus::LmmtVn;
        let w = Expr::var(c, Name::value("w")).unwrap();
        let v = Expr::var(c, Name::value("v")).unwrap();
        let lam = Expr::lam(c, Binder::new(Name::value("v")), v).unwrap();
        let a = Expr::covar(c, Name::co("a")).unwrap();
        let stack = Expr::cons(c, Some(Mode::V), w, a).unwrap();
        let cmd = Expr::command(c, lam, stack).unwrap();
        assert_eq!(print_expr(&cmd), "< \\%v. %v | %w ::v @a >");
    }

    #[test]
    fn coapp_parenthesizes_non_variables() {
        let c = Calculus::Vc;
        let v = Expr::var(c, Name::value("v")).unwrap();
        let p = Expr::var(c, Name::comp("p")).unwrap();
        let ret = Expr::ret(c, v).unwrap();
        let e = Expr::coapp(c, Name::co("a"), ret).unwrap();
        assert_eq!(print_expr(&e), "@a (ret %v)");
        let e = Expr::coapp(c, Name::co("a"), p).unwrap();
        assert_eq!(print_expr(&e), "@a #p");
        let e = Expr::coapp(c, Name::co("a"), Expr::hole(c)).unwrap();
        assert_eq!(print_expr(&e), "@a []");
    }

    #[test]
    fn ret_parenthesizes_lambdas() {
        let c = Calculus::Vc;
        let v = Expr::var(c, Name::value("v")).unwrap();
        let inner = Expr::ret(c, v).unwrap();
        let lam = Expr::lam(c, Binder::new(Name::value("v")), inner).unwrap();
        let e = Expr::ret(c, lam).unwrap();
        assert_eq!(print_expr(&e), "ret (\\%v. ret %v)");
    }
}
