//! Five small calculi around the value/computation distinction — a
//! two-sided sequent calculus, its moded refinement, a monadic λμ, the
//! monadic value/computation calculus with its intuitionistic fragment, and
//! a λ-calculus with value-restricted β as translation target — with
//! typecheckers, reduction engines, translations between them, and tooling
//! for confluence and simulation experiments.
//!
//! The layers:
//!
//! * [`syntax`] — names, types, expressions, parsing, printing,
//!   substitution.
//! * [`typing`] — sequents, derivations, and the per-calculus checkers.
//! * [`rules`] — the shared vocabulary of rule identifiers.
//! * [`calc_lmmt`], [`calc_lmmt_vn`], [`calc_monadic`] — redex search and
//!   one-step reduction for each calculus family.
//! * [`translate`] — the maps between the calculi.
//! * [`analysis`] — normalization, reduction graphs, confluence and
//!   simulation checks, typed expression generation.
//! * [`cli`] — the command-line front end behind the `modalcut` binary.

pub mod analysis;
pub mod calc_lmmt;
pub mod calc_lmmt_vn;
pub mod calc_monadic;
pub mod cli;
pub mod rules;
pub mod syntax;
pub mod translate;
pub mod typing;

pub use analysis::{
    check_confluence, check_simulation, check_subject_reduction, gen_typed, normalize,
    reduction_graph, GraphEdge, GraphReport, ReductionStep, RuleSet, Strategy, Trace,
    TranslationKind, Verdict, VerdictKind, DEFAULT_FUEL, DEFAULT_NODE_BOUND,
};
pub use rules::{Redex, RuleId, StepError};
pub use syntax::{Calculus, Expr, Name, TypeExpr};
pub use translate::{Flavor, TranslateError, TranslationOutput};
pub use typing::{check_sequent, Derivation, Sequent, TypeError};
