//! Rule identifiers shared by all reduction engines, and the common
//! error type for single steps.
//!
//! A redex is reported as a pair of the rule that applies and the
//! root-to-redex path (child indices as in [`Expr::children`]); the
//! same pair is what a step function takes back to fire it. Rule names
//! render exactly as they appear in traces and in the CLI (`beta-v`,
//! `pi-covar`, …).
//!
//! [`Expr::children`]: crate::syntax::Expr::children

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{Calculus, Path};

/// Every reduction rule of the five calculi, under one roof so traces
/// and graphs can be compared across calculi without renaming.
///
/// Fragment restrictions keep their own names: the call-by-name π is
/// `pi-n`, the call-by-value σ is `sigma-v`, and the moded calculus
/// splits β/σ/η-μ̃ by binder mode. The monadic calculi split π by the
/// shape of the surrounding context (`pi-covar`, `pi-bind`, `pi-let`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Beta,
    BetaV,
    BetaN,
    Sigma,
    SigmaV,
    SigmaN,
    Pi,
    PiN,
    PiCovar,
    PiBind,
    PiLet,
    EtaMu,
    EtaMt,
    EtaMtV,
    EtaMtN,
    EtaBind,
    EtaLet,
    EtaLetI,
    BetaValue,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::Beta => "beta",
            RuleId::BetaV => "beta-v",
            RuleId::BetaN => "beta-n",
            RuleId::Sigma => "sigma",
            RuleId::SigmaV => "sigma-v",
            RuleId::SigmaN => "sigma-n",
            RuleId::Pi => "pi",
            RuleId::PiN => "pi-n",
            RuleId::PiCovar => "pi-covar",
            RuleId::PiBind => "pi-bind",
            RuleId::PiLet => "pi-let",
            RuleId::EtaMu => "eta-mu",
            RuleId::EtaMt => "eta-mt",
            RuleId::EtaMtV => "eta-mt-v",
            RuleId::EtaMtN => "eta-mt-n",
            RuleId::EtaBind => "eta-bind",
            RuleId::EtaLet => "eta-let",
            RuleId::EtaLetI => "eta-let-i",
            RuleId::BetaValue => "beta-value",
        }
    }

    pub const ALL: [RuleId; 19] = [
        RuleId::Beta,
        RuleId::BetaV,
        RuleId::BetaN,
        RuleId::Sigma,
        RuleId::SigmaV,
        RuleId::SigmaN,
        RuleId::Pi,
        RuleId::PiN,
        RuleId::PiCovar,
        RuleId::PiBind,
        RuleId::PiLet,
        RuleId::EtaMu,
        RuleId::EtaMt,
        RuleId::EtaMtV,
        RuleId::EtaMtN,
        RuleId::EtaBind,
        RuleId::EtaLet,
        RuleId::EtaLetI,
        RuleId::BetaValue,
    ];
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<RuleId, String> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule name {s:?}"))
    }
}

/// A rule together with the path of the subexpression it rewrites.
pub type Redex = (RuleId, Path);

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("wrong calculus: expected {expected}, found {found}")]
    WrongCalculus { expected: Calculus, found: Calculus },
    #[error("no subexpression at path {path:?}")]
    NoSuchPath { path: Path },
    #[error("not a redex at path {path:?}: {rule} does not apply there")]
    NotARedex { rule: RuleId, path: Path },
}

/// Guard used by every engine entry point.
pub(crate) fn expect_calculus(expected: Calculus, found: Calculus) -> Result<(), StepError> {
    if expected == found {
        Ok(())
    } else {
        Err(StepError::WrongCalculus { expected, found })
    }
}
