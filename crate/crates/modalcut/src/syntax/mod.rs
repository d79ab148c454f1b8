//! Shared syntax for all six calculi: names and namespaces, types,
//! expressions with per-calculus grammar validation, a precedence-aware
//! printer, parsers, and the substitution toolkit.

pub mod expr;
pub mod name;
pub mod parse;
pub mod print;
pub mod subst;
pub mod ty;

pub use expr::{Binder, Calculus, Class, Expr, ExprError, Node, Path};
pub use name::{Mode, Name, Namespace, Session};
pub use parse::{parse_expr, parse_sequent, parse_type, ParseError, SequentSyntax};
pub use print::{print_expr, print_type};
pub use subst::{alpha_eq, alpha_key, avoid_capture, fill, struct_subst, subst, SubstError};
pub use ty::TypeExpr;
