//! The unmoded sequent calculus under a chosen discipline embeds into
//! the moded one conservatively: redexes correspond position for
//! position, and stepping commutes with the embedding up to α.

use modalcut::calc_lmmt::Fragment;
use modalcut::syntax::{alpha_eq, Session};
use modalcut::translate::{embed_cbn, embed_cbn_rule, embed_cbv, embed_cbv_rule};
use modalcut::{gen_typed, Calculus, RuleId, RuleSet};

fn main() {
    for fragment in [Fragment::Cbn, Fragment::Cbv] {
        let embed = match fragment {
            Fragment::Cbn => embed_cbn,
            _ => embed_cbv,
        };
        let rule_image: fn(RuleId) -> Option<RuleId> = match fragment {
            Fragment::Cbn => embed_cbn_rule,
            _ => embed_cbv_rule,
        };
        let source_rules = RuleSet::lmmt(fragment);
        let image_rules = RuleSet::full(Calculus::LmmtVn);

        let mut bijections = 0;
        let mut commutations = 0;
        let mut checked = 0;
        for seed in 0..100 {
            let seq = gen_typed(Calculus::Lmmt, 8, seed);
            let image = embed(&seq.subject).expect("embedding is total on lmmt").result;

            let mut source_redexes =
                source_rules.redexes(&seq.subject).expect("lmmt redexes list");
            let mut image_redexes = image_rules.redexes(&image).expect("vn redexes list");
            source_redexes.sort();
            image_redexes.sort();
            let mapped: Vec<_> = source_redexes
                .iter()
                .map(|(r, p)| (rule_image(*r).expect("every fragment rule has an image"), p.clone()))
                .collect();
            let mut mapped_sorted = mapped.clone();
            mapped_sorted.sort();
            if mapped_sorted == image_redexes {
                bijections += 1;
            } else {
                println!("!! redex mismatch on {}", seq.subject);
            }

            if let Some((rule, path)) = source_redexes.first() {
                checked += 1;
                let mut session = Session::new();
                let stepped = source_rules
                    .step(&seq.subject, &(*rule, path.clone()), &mut session)
                    .expect("listed redexes fire");
                let image_rule = rule_image(*rule).expect("every fragment rule has an image");
                let image_stepped = image_rules
                    .step(&image, &(image_rule, path.clone()), &mut session)
                    .expect("the image redex fires");
                let stepped_image = embed(&stepped).expect("embedding is total").result;
                if alpha_eq(&image_stepped, &stepped_image) {
                    commutations += 1;
                } else {
                    println!("!! step does not commute on {}", seq.subject);
                }
            }
        }
        println!(
            "{} fragment: {bijections}/100 redex bijections, {commutations}/{checked} one-step commutations",
            fragment
        );
    }
}
