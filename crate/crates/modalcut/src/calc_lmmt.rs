//! The unmoded sequent calculus: typechecking and the β/π/σ/η rewriting
//! relation, with its call-by-name and call-by-value fragments.
//!
//! The full relation is not confluent — `< mu @a. c | mt x. c' >` is both
//! a π- and a σ-redex, and the two contracta need not rejoin. The cbn
//! fragment keeps π only against co-values (`pi-n`), the cbv fragment
//! keeps σ only for values (`sigma-v`), and each fragment keeps both η
//! rules; that is enough to make every remaining critical pair trivial.

use std::fmt;
use std::str::FromStr;

use crate::rules::{expect_calculus, Redex, RuleId, StepError};
use crate::syntax::{avoid_capture, struct_subst, subst, Calculus, Expr, Node};
use crate::typing::{check_sequent, Derivation, Sequent, TypeError};

/// Which subset of the rewrite rules is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fragment {
    #[default]
    Full,
    Cbn,
    Cbv,
}

impl Fragment {
    pub fn name(self) -> &'static str {
        match self {
            Fragment::Full => "full",
            Fragment::Cbn => "cbn",
            Fragment::Cbv => "cbv",
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fragment {
    type Err = String;

    fn from_str(s: &str) -> Result<Fragment, String> {
        match s {
            "full" => Ok(Fragment::Full),
            "cbn" => Ok(Fragment::Cbn),
            "cbv" => Ok(Fragment::Cbv),
            _ => Err(format!("unknown fragment {s:?} (expected full, cbn, or cbv)")),
        }
    }
}

pub fn typecheck_lmmt(seq: &Sequent) -> Result<Derivation, TypeError> {
    if seq.subject.calculus != Calculus::Lmmt {
        return Err(TypeError::WrongCalculus {
            expected: Calculus::Lmmt,
            found: seq.subject.calculus,
        });
    }
    check_sequent(seq, false)
}

/// All redexes of `e` under `fragment`, in preorder. Overlapping redexes
/// at the same path are all reported; nothing is prioritized.
pub fn redexes_lmmt(e: &Expr, fragment: Fragment) -> Result<Vec<Redex>, StepError> {
    expect_calculus(Calculus::Lmmt, e.calculus)?;
    let mut out = Vec::new();
    for path in e.paths() {
        let sub = e.subexpr_at(&path).expect("paths enumerates existing paths");
        for rule in local_rules(sub, fragment) {
            out.push((rule, path.clone()));
        }
    }
    Ok(out)
}

/// Fire `at` in `e`. The rule identifier carries its own side conditions
/// (`pi-n` insists on a co-value, `sigma-v` on a value), so a step is
/// meaningful without knowing which fragment produced the redex.
pub fn step_lmmt(e: &Expr, at: &Redex) -> Result<Expr, StepError> {
    expect_calculus(Calculus::Lmmt, e.calculus)?;
    let (rule, path) = at;
    let sub = e
        .subexpr_at(path)
        .ok_or_else(|| StepError::NoSuchPath { path: path.clone() })?;
    let contractum = contract(sub, *rule)
        .ok_or_else(|| StepError::NotARedex { rule: *rule, path: path.clone() })?;
    Ok(e.replace_at(path, contractum)
        .expect("a contractum has the class of its redex"))
}

fn local_rules(sub: &Expr, fragment: Fragment) -> Vec<RuleId> {
    let mut out = Vec::new();
    match &sub.node {
        Node::Command(t, e) => {
            if matches!(t.node, Node::Lam(..)) && matches!(e.node, Node::Cons(..)) {
                out.push(RuleId::Beta);
            }
            if matches!(t.node, Node::Mu(..)) {
                match fragment {
                    Fragment::Cbn => {
                        if e.is_covalue() {
                            out.push(RuleId::PiN);
                        }
                    }
                    _ => out.push(RuleId::Pi),
                }
            }
            if matches!(e.node, Node::MuTilde(..)) {
                match fragment {
                    Fragment::Cbv => {
                        if t.is_value() {
                            out.push(RuleId::SigmaV);
                        }
                    }
                    _ => out.push(RuleId::Sigma),
                }
            }
        }
        Node::MuTilde(b, c) => {
            if let Node::Command(t, e) = &c.node {
                if matches!(&t.node, Node::Var(n) if *n == b.name) && !e.is_free_in(&b.name) {
                    out.push(RuleId::EtaMt);
                }
            }
        }
        Node::Mu(b, c) => {
            if let Node::Command(t, e) = &c.node {
                if matches!(&e.node, Node::CoVar(n) if *n == b.name) && !t.is_free_in(&b.name) {
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
        // < \x. t | u :: e >  →  < u | mt x. < t | e > >
        // The binder's scope grows from t to < t | e >, so it is first
        // renamed apart from the free names of e.
        (RuleId::Beta, Node::Command(t, e)) => {
            let (Node::Lam(x, body), Node::Cons(_, u, tail)) = (&t.node, &e.node) else {
                return None;
            };
            let (x, body) = avoid_capture(x, body, &tail.free_names());
            let inner = Expr::command(cx, body, (**tail).clone())
                .expect("contracta stay within the grammar");
            let mt = Expr::mu_tilde(cx, x, inner).expect("contracta stay within the grammar");
            Some(Expr::command(cx, (**u).clone(), mt).expect("contracta stay within the grammar"))
        }
        // < mu @a. c | e >  →  [e/@a]c
        (RuleId::Pi | RuleId::PiN, Node::Command(t, e)) => {
            let Node::Mu(a, c) = &t.node else { return None };
            if rule == RuleId::PiN && !e.is_covalue() {
                return None;
            }
            Some(struct_subst(c, &a.name, e).expect("co-terms substitute for co-variables"))
        }
        // < t | mt x. c >  →  [t/x]c
        (RuleId::Sigma | RuleId::SigmaV, Node::Command(t, e)) => {
            let Node::MuTilde(x, c) = &e.node else { return None };
            if rule == RuleId::SigmaV && !t.is_value() {
                return None;
            }
            Some(subst(c, &x.name, t).expect("terms substitute for term variables"))
        }
        // mt x. < x | e >  →  e,  x not free in e
        (RuleId::EtaMt, Node::MuTilde(x, c)) => {
            let Node::Command(t, e) = &c.node else { return None };
            if matches!(&t.node, Node::Var(n) if *n == x.name) && !e.is_free_in(&x.name) {
                Some((**e).clone())
            } else {
                None
            }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn e(src: &str) -> Expr {
        parse_expr(Calculus::Lmmt, src).unwrap()
    }

    fn rules_at_root(src: &str, fragment: Fragment) -> Vec<RuleId> {
        redexes_lmmt(&e(src), fragment)
            .unwrap()
            .into_iter()
            .filter(|(_, p)| p.is_empty())
            .map(|(r, _)| r)
            .collect()
    }

    fn step_to(src: &str, rule: RuleId, path: &[usize]) -> String {
        step_lmmt(&e(src), &(rule, path.to_vec())).unwrap().to_string()
    }

    #[test]
    fn the_critical_pair_diverges() {
        let src = "< mu @a. < y | @b > | mt x. < z | @b > >";
        assert_eq!(rules_at_root(src, Fragment::Full), vec![RuleId::Pi, RuleId::Sigma]);
        assert_eq!(step_to(src, RuleId::Pi, &[]), "< y | @b >");
        assert_eq!(step_to(src, RuleId::Sigma, &[]), "< z | @b >");
    }

    #[test]
    fn fragments_disarm_one_side_of_the_pair() {
        let src = "< mu @a. < y | @b > | mt x. < z | @b > >";
        // cbn: mt x. c is not a co-value, so only σ remains
        assert_eq!(rules_at_root(src, Fragment::Cbn), vec![RuleId::Sigma]);
        // cbv: mu @a. c is not a value, so only π remains
        assert_eq!(rules_at_root(src, Fragment::Cbv), vec![RuleId::Pi]);
    }

    #[test]
    fn beta_renames_the_binder_away_from_the_stack_tail() {
        // x is free in the stack tail, so the new mt binder must not be x
        let src = "< \\x. x | y :: mt w. < x | @a > >";
        assert_eq!(rules_at_root(src, Fragment::Full), vec![RuleId::Beta]);
        assert_eq!(
            step_to(src, RuleId::Beta, &[]),
            "< y | mt x1. < x1 | mt w. < x | @a > > >"
        );

        // no clash: the binder is kept
        assert_eq!(
            step_to("< \\x. x | y :: @a >", RuleId::Beta, &[]),
            "< y | mt x. < x | @a > >"
        );
    }

    #[test]
    fn eta_rules_check_their_freeness_conditions() {
        assert_eq!(rules_at_root("mt x. < x | mt y. < x | @a > >", Fragment::Full), vec![]);
        let nested = e("mt x. < x | mt y. < y | @a > >");
        let found = redexes_lmmt(&nested, Fragment::Full).unwrap();
        assert_eq!(
            found,
            vec![
                (RuleId::EtaMt, vec![]),
                (RuleId::Sigma, vec![0]),
                (RuleId::EtaMt, vec![0, 1]),
            ]
        );

        assert_eq!(step_to("mu @a. < \\x. x | @a >", RuleId::EtaMu, &[]), "\\x. x");
        assert_eq!(rules_at_root("mu @a. < mu @b. < y | @a > | @a >", Fragment::Full), vec![]);
    }

    #[test]
    fn fragment_redexes_are_full_redexes() {
        let srcs = [
            "< mu @a. < y | @b > | mt x. < z | @b > >",
            "< \\x. x | y :: mt w. < x | @a > >",
            "< mu @a. < y | @a > | z :: @b >",
            "mt x. < x | mt y. < y | @a > >",
        ];
        for src in srcs {
            let full = redexes_lmmt(&e(src), Fragment::Full).unwrap();
            for fragment in [Fragment::Cbn, Fragment::Cbv] {
                for (rule, path) in redexes_lmmt(&e(src), fragment).unwrap() {
                    let unrestricted = match rule {
                        RuleId::PiN => RuleId::Pi,
                        RuleId::SigmaV => RuleId::Sigma,
                        other => other,
                    };
                    assert!(
                        full.contains(&(unrestricted, path.clone())),
                        "{fragment} found ({rule}, {path:?}) in {src}, which full does not have"
                    );
                }
            }
        }
    }

    #[test]
    fn stepping_a_stale_redex_fails() {
        let expr = e("< y | mt x. < x | @a > >");
        let err = step_lmmt(&expr, &(RuleId::Beta, vec![])).unwrap_err();
        assert_eq!(err, StepError::NotARedex { rule: RuleId::Beta, path: vec![] });
        let err = step_lmmt(&expr, &(RuleId::Sigma, vec![0, 0])).unwrap_err();
        assert_eq!(err, StepError::NoSuchPath { path: vec![0, 0] });
    }

    #[test]
    fn wrong_calculus_is_rejected() {
        let vn = parse_expr(Calculus::LmmtVn, "< %v | mt %w. < %w | @a > >").unwrap();
        assert!(matches!(
            redexes_lmmt(&vn, Fragment::Full),
            Err(StepError::WrongCalculus { .. })
        ));
    }

    #[test]
    fn typecheck_guards_the_calculus() {
        let seq = Sequent::new(e("< y | @a >"));
        assert!(matches!(typecheck_lmmt(&seq), Err(TypeError::Unbound(_))));

        let vn = parse_expr(Calculus::LmmtVn, "mu @a. < %v | @a >").unwrap();
        assert!(matches!(
            typecheck_lmmt(&Sequent::new(vn)),
            Err(TypeError::WrongCalculus { .. })
        ));
    }
}
