//! One moded command pushed through the three translations — the monadic
//! image, the continuations image of that, and the direct composition —
//! then the type-carrying sequent forms, and the forgetful/embedding maps
//! that connect the moded and unmoded calculi.

use modalcut::syntax::{alpha_eq, parse_expr, parse_sequent, Session};
use modalcut::translate::{
    cm, cps, embed_cbv, forget_vn, mtr, mtr_sequent,
};
use modalcut::{Calculus, Sequent};

fn main() {
    let mut session = Session::new();

    let source = parse_expr(Calculus::LmmtVn, "< \\%v. %v | %w ::v @a >").expect("parses");
    println!("source (lmmt-vn):        {source}");

    let monadic = mtr(&source, &mut session).expect("the monadic image exists");
    println!("monadic image (vc):      {}", monadic.result);

    let continuations = cm(&monadic.result, &mut session).expect("the continuations image exists");
    println!("continuations (stlc):    {}", continuations.result);

    let direct = cps(&source, &mut session).expect("the composition exists");
    println!("direct composition:      {}", direct.result);
    println!();

    // The sequent-level form carries the types across.
    let seq = Sequent::from_syntax(
        parse_sequent(Calculus::LmmtVn, "%w:X |- mu @a:X. < %w | @a > : X").expect("parses"),
    )
    .expect("well-formed");
    let image = mtr_sequent(&seq, &mut session).expect("the sequent translates");
    println!("sequent:                 {seq}");
    println!("monadic sequent image:   {image}");
    println!();

    // Embedding an unmoded expression and forgetting the modes again is
    // the identity up to α.
    let unmoded =
        parse_expr(Calculus::Lmmt, "< mu @a. < y | @b > | mt x. < z | @b > >").expect("parses");
    let embedded = embed_cbv(&unmoded).expect("the embedding exists").result;
    let back = forget_vn(&embedded).expect("the modes forget").result;
    println!("unmoded:                 {unmoded}");
    println!("cbv embedding (lmmt-vn): {embedded}");
    println!("forgetting again:        {back}");
    println!("round trip is α-equal:   {}", alpha_eq(&unmoded, &back));
}
