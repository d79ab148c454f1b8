//! Well-typed expressions of the moded calculi reduce to a single normal
//! form: a census over generated expressions, counting exhaustive graphs
//! with exactly one ending.

use modalcut::{check_confluence, gen_typed, Calculus, RuleSet, VerdictKind};

fn main() {
    for calculus in [Calculus::Vc, Calculus::LmmtVn] {
        let rules = RuleSet::full(calculus);
        let mut confluent = 0;
        let mut bound_hit = 0;
        let mut split = 0;
        for seed in 0..200 {
            let seq = gen_typed(calculus, 8, seed);
            let verdict =
                check_confluence(&rules, &seq.subject, 10_000).expect("generated shapes step");
            match verdict.kind {
                VerdictKind::Confluent => confluent += 1,
                VerdictKind::Inconclusive => bound_hit += 1,
                _ => {
                    split += 1;
                    println!("!! two endings from {}", seq.subject);
                }
            }
        }
        println!(
            "{calculus}: {confluent} confluent, {bound_hit} hit the node bound, \
             {split} split, over 200 generated expressions"
        );
    }
}
