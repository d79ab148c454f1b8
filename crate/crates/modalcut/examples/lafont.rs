//! One typed command of the sequent calculus whose two root redexes race
//! to different endings — and the four ways of taming it: restrict the
//! rules to a fragment, or move to the moded calculus under either mode
//! choice.

use modalcut::calc_lmmt::Fragment;
use modalcut::syntax::parse_expr;
use modalcut::translate::{embed_cbn, embed_cbv};
use modalcut::{check_confluence, reduction_graph, Calculus, RuleSet};

fn main() {
    let start = parse_expr(Calculus::Lmmt, "< mu @a. < y | @b > | mt x. < z | @b > >")
        .expect("the command parses");

    let full = RuleSet::lmmt(Fragment::Full);
    let graph = reduction_graph(&full, &start, 100).expect("the command explores");
    println!("{start}");
    for e in &graph.edges {
        println!("  --{} @ {:?}--> {}", e.rule.name(), e.path, graph.nodes[e.to]);
    }
    let verdict = check_confluence(&full, &start, 100).expect("the graph is small");
    println!("{}: {}\n", verdict.kind, verdict.note);

    let cbn = embed_cbn(&start).expect("the command embeds").result;
    let cbv = embed_cbv(&start).expect("the command embeds").result;
    let tamed = [
        ("cbn fragment (pi fires only against co-values)", RuleSet::lmmt(Fragment::Cbn), &start),
        ("cbv fragment (sigma fires only for values)", RuleSet::lmmt(Fragment::Cbv), &start),
        ("moded embedding, cbn choice", RuleSet::full(Calculus::LmmtVn), &cbn),
        ("moded embedding, cbv choice", RuleSet::full(Calculus::LmmtVn), &cbv),
    ];
    for (label, rules, e) in tamed {
        let v = check_confluence(&rules, e, 100).expect("the graph is small");
        println!("{label}");
        println!("  {e}");
        println!("  {}: {}", v.kind, v.note);
    }
}
