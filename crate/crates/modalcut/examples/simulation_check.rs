//! Every one-step reduction survives translation: the image of the
//! source reaches the image of the reduct in at least one target step.
//! Checked here for the monadic image, the continuations image, and
//! their composition, over generated well-typed expressions.

use modalcut::{
    check_simulation, gen_typed, normalize, RuleSet, Strategy, TranslationKind, VerdictKind,
    DEFAULT_FUEL, DEFAULT_NODE_BOUND,
};

fn main() {
    for kind in [TranslationKind::Mtr, TranslationKind::Cm, TranslationKind::Cps] {
        let rules = RuleSet::full(kind.source());
        let mut ok = 0;
        let mut checked = 0;
        let mut seed = 0;
        while checked < 100 {
            let seq = gen_typed(kind.source(), 8, seed);
            seed += 1;
            let source = normalize(&rules, &seq.subject, Strategy::LeftmostOutermost, 1)
                .expect("generated shapes step");
            if source.steps.is_empty() {
                continue; // already normal, no step to simulate
            }
            checked += 1;
            let verdict = check_simulation(&source, kind, DEFAULT_FUEL, DEFAULT_NODE_BOUND)
                .expect("generated shapes translate");
            if verdict.kind == VerdictKind::SimulationOk {
                ok += 1;
            } else {
                println!("!! {} on {}: {}", kind, source.start, verdict.note);
            }
        }
        println!("{kind} ({} -> {}): {ok}/{checked} single steps simulate", kind.source(), kind.target());
    }
}
