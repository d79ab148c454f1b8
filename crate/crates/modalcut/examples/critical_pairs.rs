//! A census of overlapping redex pairs in the value/computation
//! calculus. Two redexes overlap when one sits inside the pattern of the
//! other — detected behaviorally: fire the inner redex and see whether
//! the outer one survives. Redexes in disjoint or pattern-inert
//! positions always survive, so every destroyed pair marks a genuine
//! overlap. The census reports the distinct rule pairs it finds; it does
//! not presuppose their number.

use std::collections::BTreeMap;

use modalcut::syntax::{parse_expr, Expr, Session};
use modalcut::{gen_typed, Calculus, RuleSet};

fn scan(rules: &RuleSet, e: &Expr, found: &mut BTreeMap<(String, String), String>) {
    let redexes = rules.redexes(e).expect("vc redexes list");
    for (outer_rule, outer_path) in &redexes {
        for (inner_rule, inner_path) in &redexes {
            if (inner_rule, inner_path) == (outer_rule, outer_path)
                || !inner_path.starts_with(outer_path)
            {
                continue;
            }
            let destroyed = if inner_path == outer_path {
                true // two rules at one root always interfere
            } else {
                let mut session = Session::new();
                let next = rules
                    .step(e, &(*inner_rule, inner_path.clone()), &mut session)
                    .expect("listed redexes fire");
                !rules
                    .redexes(&next)
                    .expect("vc redexes list")
                    .iter()
                    .any(|(r, p)| r == outer_rule && p == outer_path)
            };
            if destroyed {
                found
                    .entry((outer_rule.name().into(), inner_rule.name().into()))
                    .or_insert_with(|| e.to_string());
            }
        }
    }
}

fn main() {
    let rules = RuleSet::full(Calculus::Vc);
    let mut found = BTreeMap::new();

    // Handcrafted overlap-rich shapes.
    let crafted = [
        "@a (mu @b. @b (ret %v))",
        "mu @a. @a (mu @b. @b (ret %v))",
        "let %v = mu @b. @b (ret %w) in @a (ret %v)",
        "let %v = ret %w in @a (ret %v)",
        "sub #q = mu @b. @b (ret %v) in @a #q",
        "(\\%v. ret %v) %w",
    ];
    for s in crafted {
        scan(&rules, &parse_expr(Calculus::Vc, s).expect("the shape parses"), &mut found);
    }

    // A wide generated sweep.
    for seed in 0..3000 {
        scan(&rules, &gen_typed(Calculus::Vc, 9, seed).subject, &mut found);
    }

    println!("overlapping rule pairs (outer destroyed by inner):");
    for ((outer, inner), witness) in &found {
        println!("  {outer:<10} x {inner:<10} e.g. {witness}");
    }
    println!("{} distinct pairs", found.len());
}
