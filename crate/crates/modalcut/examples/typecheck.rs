//! One sequent per calculus, each printed with its derivation tree, and
//! one failing check to show the error surface.

use modalcut::syntax::parse_sequent;
use modalcut::typing::infer_type;
use modalcut::{Calculus, Sequent};

fn main() {
    let cases = [
        (Calculus::Lmmt, "x:X, f:X -> Y |- < f | x :: @b > | @b:Y"),
        (Calculus::LmmtVn, "%v:X ->v Y |- \\%x:X. mu @a:Y. < %v | %x ::v @a > : X ->v Y"),
        (Calculus::LmM, "f:X -> M Y, x:X |- bind y:Y = f x in @a (ret y) | @a:M Y"),
        (Calculus::Vc, "%w:X |- (\\%v:X. ret %v) %w : M X"),
        (Calculus::Ivc, "%v:X |- let %u:X = ret %v in ret %u : M X"),
        (Calculus::Stlc, "k:X -> Bot, x:X |- k x : Bot"),
    ];
    for (calculus, text) in cases {
        let seq = Sequent::from_syntax(parse_sequent(calculus, text).expect("the case parses"))
            .expect("the declarations are well-formed");
        let (ty, derivation) = infer_type(&seq, false).expect("the case typechecks");
        println!("[{calculus}] {seq}");
        print!("{}", derivation.render());
        match ty {
            Some(t) => println!("=> {t}\n"),
            None => println!("=> the command checks\n"),
        }
    }

    // A value-namespace variable cannot hide a computation type.
    let bad = Sequent::from_syntax(
        parse_sequent(Calculus::Vc, "%v:M X |- ret %v : M (M X)").expect("the text parses"),
    )
    .expect("the declarations are shaped like declarations");
    match infer_type(&bad, false) {
        Ok(_) => println!("unexpectedly checked"),
        Err(e) => println!("[vc] %v:M X |- ret %v : M (M X)\n=> rejected: {e}"),
    }
}
