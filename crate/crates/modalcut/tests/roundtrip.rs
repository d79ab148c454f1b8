//! Parse → print → parse over the checked-in corpus is the identity up
//! to α, in every calculus.

use modalcut::syntax::{alpha_eq, parse_expr, print_expr};
use modalcut::Calculus;

pub fn corpus() -> Vec<(Calculus, String)> {
    let mut out = Vec::new();
    for (lineno, line) in include_str!("corpus.txt").lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (cx, src) = line
            .split_once(':')
            .unwrap_or_else(|| panic!("corpus line {} is not `calculus: expr`", lineno + 1));
        let calculus: Calculus = cx.trim().parse().expect("corpus calculus ids parse");
        out.push((calculus, src.trim().to_string()));
    }
    out
}

#[test]
fn the_corpus_round_trips() {
    let corpus = corpus();
    assert!(corpus.len() >= 60, "the corpus holds {} expressions; at least 60 expected", corpus.len());
    for (calculus, src) in &corpus {
        let e = parse_expr(*calculus, src)
            .unwrap_or_else(|err| panic!("[{calculus}] {src}: {err}"));
        let printed = print_expr(&e);
        let back = parse_expr(*calculus, &printed)
            .unwrap_or_else(|err| panic!("[{calculus}] {src} printed as {printed:?}: {err}"));
        assert!(alpha_eq(&e, &back), "[{calculus}] {src} printed as {printed}");
    }
}

#[test]
fn the_corpus_spans_all_six_calculi() {
    let corpus = corpus();
    for calculus in Calculus::ALL {
        let n = corpus.iter().filter(|(c, _)| *c == calculus).count();
        assert!(n >= 10, "only {n} corpus entries for {calculus}");
    }
}
