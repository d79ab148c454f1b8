//! Randomized invariants, driven by the typed expression generator: every
//! property draws well-typed subjects across the calculi and checks that
//! the engines agree with themselves — steps preserve types and syntactic
//! class, fragments stay inside the full relation, traces and graph edges
//! replay, and the translations land where they claim to.

use std::collections::BTreeMap;

use modalcut::calc_lmmt::Fragment;
use modalcut::syntax::{alpha_eq, parse_expr, subst, Node, Path, Session};
use modalcut::{
    check_sequent, gen_typed, normalize, reduction_graph, translate, Calculus, RuleId, RuleSet,
    Strategy,
};
use proptest::prelude::*;

fn rules_for(calculus: Calculus) -> RuleSet {
    RuleSet::full(calculus)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The generator only emits sequents the checkers accept.
    #[test]
    fn generated_sequents_typecheck(seed in any::<u64>(), budget in 3usize..9) {
        for calculus in Calculus::ALL {
            let seq = gen_typed(calculus, budget, seed);
            if let Err(e) = check_sequent(&seq, false) {
                prop_assert!(false, "[{calculus}] {}: {e}", seq.subject);
            }
        }
    }

    /// Printing and re-parsing is the identity up to α-equivalence, for
    /// subjects of every syntactic class.
    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>(), budget in 3usize..9) {
        for calculus in Calculus::ALL {
            let subject = gen_typed(calculus, budget, seed).subject;
            let text = subject.to_string();
            match parse_expr(calculus, &text) {
                Ok(back) => prop_assert!(
                    alpha_eq(&subject, &back),
                    "[{calculus}] {text} re-read as {back}"
                ),
                Err(e) => prop_assert!(false, "[{calculus}] {text}: {e}"),
            }
        }
    }

    /// Every single step out of a well-typed subject stays well-typed
    /// under the same environments.
    #[test]
    fn single_steps_preserve_types(seed in any::<u64>(), budget in 3usize..9) {
        for calculus in Calculus::ALL {
            let seq = gen_typed(calculus, budget, seed);
            let rules = rules_for(calculus);
            for redex in rules.redexes(&seq.subject).unwrap() {
                let mut session = Session::new();
                let next = rules.step(&seq.subject, &redex, &mut session).unwrap();
                if let Err(e) = check_sequent(&seq.with_subject(next.clone()), false) {
                    prop_assert!(
                        false,
                        "[{calculus}] {} --{}--> {next}: {e}",
                        seq.subject,
                        redex.0.name()
                    );
                }
            }
        }
    }

    /// A step never changes the syntactic class or the calculus of the
    /// whole expression.
    #[test]
    fn single_steps_preserve_class(seed in any::<u64>(), budget in 3usize..9) {
        for calculus in Calculus::ALL {
            let subject = gen_typed(calculus, budget, seed).subject;
            let rules = rules_for(calculus);
            for redex in rules.redexes(&subject).unwrap() {
                let mut session = Session::new();
                let next = rules.step(&subject, &redex, &mut session).unwrap();
                prop_assert_eq!(next.calculus, subject.calculus);
                prop_assert_eq!(next.class(), subject.class());
            }
        }
    }

    /// The call-by-name and call-by-value fragments are sub-relations of
    /// the unrestricted rules: they never find a redex the full set misses.
    #[test]
    fn fragments_stay_inside_the_full_relation(seed in any::<u64>(), budget in 3usize..9) {
        let subject = gen_typed(Calculus::Lmmt, budget, seed).subject;
        let full = RuleSet::full(Calculus::Lmmt).redexes(&subject).unwrap();
        for fragment in [Fragment::Cbn, Fragment::Cbv] {
            for redex in RuleSet::lmmt(fragment).redexes(&subject).unwrap() {
                prop_assert!(
                    full.contains(&redex),
                    "{subject}: {} at {:?} is not a full-relation redex",
                    redex.0.name(),
                    redex.1
                );
            }
        }
    }

    /// In the moded refinement the σ and π families never apply to the
    /// same command: the value/name split removes the classical overlap.
    #[test]
    fn moded_sigma_and_pi_never_overlap(seed in any::<u64>(), budget in 3usize..9) {
        let subject = gen_typed(Calculus::LmmtVn, budget, seed).subject;
        let mut at_path: BTreeMap<Path, Vec<RuleId>> = BTreeMap::new();
        for (rule, path) in RuleSet::full(Calculus::LmmtVn).redexes(&subject).unwrap() {
            at_path.entry(path).or_default().push(rule);
        }
        for (path, rules) in at_path {
            let sigma = rules.iter().any(|r| matches!(r, RuleId::SigmaV | RuleId::SigmaN));
            let pi = rules.contains(&RuleId::Pi);
            prop_assert!(
                !(sigma && pi),
                "{subject}: σ and π both apply at {path:?} ({rules:?})"
            );
        }
    }

    /// The target λ-calculus fires β only under a value argument.
    #[test]
    fn value_restricted_beta_sees_only_values(seed in any::<u64>(), budget in 3usize..9) {
        let subject = gen_typed(Calculus::Stlc, budget, seed).subject;
        for (rule, path) in RuleSet::full(Calculus::Stlc).redexes(&subject).unwrap() {
            prop_assert_eq!(rule, RuleId::BetaValue);
            let at = subject.subexpr_at(&path).unwrap();
            match &at.node {
                Node::App(f, arg) => {
                    prop_assert!(matches!(f.node, Node::Lam(..)));
                    prop_assert!(arg.is_value(), "{subject}: non-value argument at {path:?}");
                }
                other => prop_assert!(false, "β redex over {other:?}"),
            }
        }
    }

    /// A normalization trace replays: firing the recorded rule at the
    /// recorded path reproduces each recorded result.
    #[test]
    fn traces_replay(seed in any::<u64>(), budget in 3usize..9) {
        for calculus in Calculus::ALL {
            let subject = gen_typed(calculus, budget, seed).subject;
            let rules = rules_for(calculus);
            for strategy in [
                Strategy::LeftmostOutermost,
                Strategy::RightmostInnermost,
                Strategy::Random(seed),
            ] {
                let trace = normalize(&rules, &subject, strategy, 40).unwrap();
                let mut current = subject.clone();
                for step in &trace.steps {
                    let mut session = Session::new();
                    let redex = (step.rule, step.path.clone());
                    let replayed = rules.step(&current, &redex, &mut session).unwrap();
                    prop_assert!(
                        alpha_eq(&replayed, &step.result),
                        "[{calculus}] {current} --{}--> diverges from the trace",
                        step.rule.name()
                    );
                    current = step.result.clone();
                }
            }
        }
    }

    /// Deterministic strategies are deterministic, and the random strategy
    /// is reproducible from its seed.
    #[test]
    fn normalization_is_reproducible(seed in any::<u64>(), budget in 3usize..9) {
        for calculus in Calculus::ALL {
            let subject = gen_typed(calculus, budget, seed).subject;
            let rules = rules_for(calculus);
            for strategy in [
                Strategy::LeftmostOutermost,
                Strategy::RightmostInnermost,
                Strategy::Random(seed),
            ] {
                let a = normalize(&rules, &subject, strategy, 40).unwrap();
                let b = normalize(&rules, &subject, strategy, 40).unwrap();
                let picks =
                    |t: &modalcut::Trace| -> Vec<(RuleId, Path)> {
                        t.steps.iter().map(|s| (s.rule, s.path.clone())).collect()
                    };
                prop_assert_eq!(picks(&a), picks(&b));
                prop_assert!(alpha_eq(a.end(), b.end()));
            }
        }
    }

    /// Every edge of a reduction graph replays as a real step between its
    /// two endpoint nodes.
    #[test]
    fn graph_edges_replay(seed in any::<u64>(), budget in 3usize..8) {
        for calculus in Calculus::ALL {
            let subject = gen_typed(calculus, budget, seed).subject;
            let rules = rules_for(calculus);
            let graph = reduction_graph(&rules, &subject, 2_000).unwrap();
            for edge in &graph.edges {
                let mut session = Session::new();
                let redex = (edge.rule, edge.path.clone());
                let stepped = rules.step(&graph.nodes[edge.from], &redex, &mut session).unwrap();
                prop_assert!(
                    alpha_eq(&stepped, &graph.nodes[edge.to]),
                    "[{calculus}] edge {} --{}--> {} does not replay",
                    edge.from,
                    edge.rule.name(),
                    edge.to
                );
            }
        }
    }

    /// Collapsing a β redex eagerly — β, then the σ step it enables, then
    /// η over the minted μ — lands exactly on capture-avoiding
    /// substitution of the argument for the binder, in three steps.
    #[test]
    fn eager_beta_is_substitution(seed in any::<u64>(), budget in 4usize..9) {
        let subject = gen_typed(Calculus::Vc, budget, seed).subject;
        let rules = RuleSet::full(Calculus::Vc);
        for (rule, path) in rules.redexes(&subject).unwrap() {
            if rule != RuleId::Beta {
                continue;
            }
            let redex = subject.subexpr_at(&path).unwrap().clone();
            let Node::App(f, arg) = &redex.node else { unreachable!() };
            let Node::Lam(binder, body) = &f.node else { unreachable!() };
            let oracle = subst(body, &binder.name, arg).unwrap();

            let mut session = Session::new();
            let mut current = redex.clone();
            for step in [(RuleId::Beta, vec![]), (RuleId::Sigma, vec![0]), (RuleId::EtaMu, vec![])] {
                current = rules.step(&current, &step, &mut session).unwrap();
            }
            prop_assert!(
                alpha_eq(&current, &oracle),
                "{redex} collapses to {current}, substitution gives {oracle}"
            );
        }
    }

    /// The monadic refinement translation produces sequents the monadic
    /// λμ checker accepts.
    #[test]
    fn moded_images_stay_well_typed(seed in any::<u64>(), budget in 3usize..9) {
        let seq = gen_typed(Calculus::LmmtVn, budget, seed);
        let mut session = Session::new();
        let image = translate::mtr_sequent(&seq, &mut session).unwrap();
        if let Err(e) = check_sequent(&image, false) {
            prop_assert!(false, "{} translates to ill-typed {}: {e}", seq.subject, image.subject);
        }
    }

    /// The continuations translation produces sequents the target
    /// λ-calculus checker accepts.
    #[test]
    fn continuation_images_stay_well_typed(seed in any::<u64>(), budget in 3usize..9) {
        let seq = gen_typed(Calculus::Vc, budget, seed);
        let mut session = Session::new();
        let image = translate::cm_sequent(&seq, &mut session).unwrap();
        if let Err(e) = check_sequent(&image, false) {
            prop_assert!(false, "{} translates to ill-typed {}: {e}", seq.subject, image.subject);
        }
    }

    /// The auxiliary continuations map always lands on a value, and the
    /// main map sends computations to λ-abstractions.
    #[test]
    fn continuation_images_are_values(seed in any::<u64>(), budget in 3usize..9) {
        let subject = gen_typed(Calculus::Vc, budget, seed).subject;
        let mut stack = vec![&subject];
        while let Some(e) = stack.pop() {
            stack.extend(e.children());
            if !e.is_computation() {
                continue;
            }
            let mut session = Session::new();
            let aux = translate::cm_aux(e, &mut session).unwrap();
            prop_assert!(aux.result.is_value(), "{e} maps to non-value {}", aux.result);
            let main = translate::cm(e, &mut session).unwrap();
            prop_assert!(
                matches!(main.result.node, Node::Lam(..)),
                "{e} maps to non-abstraction {}",
                main.result
            );
        }
    }
}
