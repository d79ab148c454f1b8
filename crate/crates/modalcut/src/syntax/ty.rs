use std::fmt;

use super::name::Mode;

/// Types across all the calculi. One grammar is shared and each calculus
/// validates the subset it admits: modes on implications exist only in the
/// moded sequent calculus, `M` only in the monadic calculi, `Bot` only in
/// the λ[βᵛ] target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    /// Type variable (uppercase identifier). `M` is reserved and cannot be
    /// a type variable.
    Var(String),
    /// The fixed target atom ⊥. Never instantiated; `~A` is sugar for
    /// `A -> Bot`.
    Bot,
    /// Implication, optionally mode-annotated (`A -> B`, `A ->v B`, `A ->n B`).
    Imp(Option<Mode>, Box<TypeExpr>, Box<TypeExpr>),
    /// Monadic type `M A`.
    Monad(Box<TypeExpr>),
}

impl TypeExpr {
    pub fn var(s: &str) -> TypeExpr {
        TypeExpr::Var(s.to_string())
    }

    pub fn imp(a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::Imp(None, Box::new(a), Box::new(b))
    }

    pub fn imp_mode(m: Mode, a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::Imp(Some(m), Box::new(a), Box::new(b))
    }

    pub fn monad(a: TypeExpr) -> TypeExpr {
        TypeExpr::Monad(Box::new(a))
    }

    /// `~A`, i.e. `A -> Bot`.
    pub fn neg(a: TypeExpr) -> TypeExpr {
        TypeExpr::imp(a, TypeExpr::Bot)
    }

    pub fn is_monadic(&self) -> bool {
        matches!(self, TypeExpr::Monad(_))
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, arg_pos: bool) -> fmt::Result {
        match self {
            TypeExpr::Var(s) => write!(f, "{s}"),
            TypeExpr::Bot => write!(f, "Bot"),
            TypeExpr::Imp(mode, a, b) => {
                if arg_pos {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, true)?;
                match mode {
                    None => write!(f, " -> ")?,
                    Some(m) => write!(f, " ->{} ", m.suffix())?,
                }
                b.fmt_prec(f, false)?;
                if arg_pos {
                    write!(f, ")")?;
                }
                Ok(())
            }
            // `M` binds tighter than the arrow, so no outer parentheses
            TypeExpr::Monad(a) => {
                write!(f, "M ")?;
                match a.as_ref() {
                    TypeExpr::Var(_) | TypeExpr::Bot => a.fmt_prec(f, false),
                    _ => {
                        write!(f, "(")?;
                        a.fmt_prec(f, false)?;
                        write!(f, ")")
                    }
                }
            }
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_precedence() {
        let x = TypeExpr::var("X");
        let y = TypeExpr::var("Y");
        // (X -> Y) -> X needs parens on the left, none on the right
        let t = TypeExpr::imp(TypeExpr::imp(x.clone(), y.clone()), x.clone());
        assert_eq!(t.to_string(), "(X -> Y) -> X");
        // right-assoc: X -> Y -> X prints without parens
        let t = TypeExpr::imp(x.clone(), TypeExpr::imp(y.clone(), x.clone()));
        assert_eq!(t.to_string(), "X -> Y -> X");
        let t = TypeExpr::monad(TypeExpr::imp_mode(Mode::V, x.clone(), TypeExpr::monad(y.clone())));
        assert_eq!(t.to_string(), "M (X ->v M Y)");
        let t = TypeExpr::imp(TypeExpr::monad(x.clone()), TypeExpr::Bot);
        assert_eq!(t.to_string(), "M X -> Bot");
        // M in argument position of an arrow keeps its own parens minimal
        let t = TypeExpr::imp(TypeExpr::neg(x.clone()), TypeExpr::Bot);
        assert_eq!(t.to_string(), "(X -> Bot) -> Bot");
    }
}
