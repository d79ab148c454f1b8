//! β in the value/computation calculus delays substitution behind a
//! fresh co-variable; one σ and one η_μ later the substituted body is
//! reached. The chain β;σ;η_μ therefore acts as an eager β — for a value
//! argument and for a computation argument alike.

use modalcut::syntax::parse_expr;
use modalcut::{normalize, Calculus, RuleSet, Strategy};

fn main() {
    let rules = RuleSet::full(Calculus::Vc);
    let redexes = [
        "(\\%v. ret %v) %w",
        "(\\#q. #q) (%f %w)",
        "(\\%v. (\\%u. ret %u) %v) %w",
    ];
    for s in redexes {
        let start = parse_expr(Calculus::Vc, s).expect("the redex parses");
        let trace =
            normalize(&rules, &start, Strategy::LeftmostOutermost, 10).expect("vc steps fire");
        println!("{}\n", trace.render());
    }
}
