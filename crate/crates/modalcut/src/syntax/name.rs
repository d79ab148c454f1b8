use std::collections::HashMap;
use std::fmt;

/// The four disjoint variable namespaces. Which namespaces a binder or
/// occurrence may use depends on the calculus: `Value`/`Comp` carry the
/// value/computation distinction where it exists, `Plain` serves the
/// unmoded calculi, and `Co` is for co-variables (always bound by μ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    Value,
    Comp,
    Plain,
    Co,
}

impl Namespace {
    /// Sigil prefixing names of this namespace in the surface syntax.
    pub fn sigil(self) -> &'static str {
        match self {
            Namespace::Value => "%",
            Namespace::Comp => "#",
            Namespace::Plain => "",
            Namespace::Co => "@",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Namespace::Value => "value variable",
            Namespace::Comp => "computation variable",
            Namespace::Plain => "variable",
            Namespace::Co => "co-variable",
        }
    }
}

/// Mode annotation on implications and stacks (`->v`/`->n`, `::v`/`::n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    V,
    N,
}

impl Mode {
    pub fn suffix(self) -> &'static str {
        match self {
            Mode::V => "v",
            Mode::N => "n",
        }
    }

    /// The namespace whose binders match this mode in βₓ / R-⊃ₓ.
    pub fn namespace(self) -> Namespace {
        match self {
            Mode::V => Namespace::Value,
            Mode::N => Namespace::Comp,
        }
    }
}

/// A variable or co-variable name: namespace, base, and a freshness index.
/// Base strings never end in a digit — a trailing digit run is always the
/// rendered index, so `%w1` is `(Value, "w", 1)` and printing is inverse to
/// parsing on names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    pub ns: Namespace,
    pub base: String,
    pub index: u32,
}

impl Name {
    pub fn new(ns: Namespace, base: impl Into<String>, index: u32) -> Name {
        let base = base.into();
        debug_assert!(
            !base.ends_with(|c: char| c.is_ascii_digit()),
            "name base {base:?} ends in a digit; the digits belong in the index"
        );
        Name { ns, base, index }
    }

    /// Split a raw identifier into base and index (`"w1"` → `("w", 1)`).
    pub fn parse_ident(ns: Namespace, ident: &str) -> Name {
        let split = ident.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (base, digits) = ident.split_at(split);
        let index = if digits.is_empty() { 0 } else { digits.parse().unwrap_or(u32::MAX) };
        Name { ns, base: base.to_string(), index }
    }

    pub fn value(base: &str) -> Name {
        Name::parse_ident(Namespace::Value, base)
    }

    pub fn comp(base: &str) -> Name {
        Name::parse_ident(Namespace::Comp, base)
    }

    pub fn plain(base: &str) -> Name {
        Name::parse_ident(Namespace::Plain, base)
    }

    pub fn co(base: &str) -> Name {
        Name::parse_ident(Namespace::Co, base)
    }

    pub fn with_index(&self, index: u32) -> Name {
        Name { ns: self.ns, base: self.base.clone(), index }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.ns.sigil(), self.base)?;
        if self.index > 0 {
            write!(f, "{}", self.index)?;
        }
        Ok(())
    }
}

/// Fresh-name supply. All freshness in one parse/rewrite/translate run is
/// drawn from one session, so traces are reproducible; counters are kept
/// per (namespace, base) and only move forward. `fresh` additionally skips
/// past every name occurring in the supplied expressions, so a fresh name
/// is never free (nor bound) in any of them.
#[derive(Debug, Clone, Default)]
pub struct Session {
    counters: HashMap<(Namespace, String), u32>,
}

impl Session {
    pub fn new() -> Session {
        Session::default()
    }

    /// Next unused index for `(ns, base)` that also avoids `taken`
    /// (the indices of that base already present in the expressions of
    /// interest; see `Expr::all_names`). Index 0 renders as the bare base.
    pub fn fresh_index(&mut self, ns: Namespace, base: &str, taken: impl Iterator<Item = u32>) -> u32 {
        let floor = self.counters.get(&(ns, base.to_string())).copied().unwrap_or(0);
        let above_taken = taken.map(|i| i + 1).max().unwrap_or(0);
        let index = floor.max(above_taken);
        self.counters.insert((ns, base.to_string()), index + 1);
        index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ident_splitting_round_trips() {
        let n = Name::parse_ident(Namespace::Value, "w1");
        assert_eq!((n.base.as_str(), n.index), ("w", 1));
        assert_eq!(n.to_string(), "%w1");

        let n = Name::parse_ident(Namespace::Plain, "x2y10");
        assert_eq!((n.base.as_str(), n.index), ("x2y", 10));
        assert_eq!(n.to_string(), "x2y10");

        let n = Name::parse_ident(Namespace::Co, "a");
        assert_eq!((n.base.as_str(), n.index), ("a", 0));
        assert_eq!(n.to_string(), "@a");
    }

    #[test]
    fn fresh_prefers_the_bare_base() {
        let mut s = Session::new();
        assert_eq!(s.fresh_index(Namespace::Value, "f", std::iter::empty()), 0);
        // the base itself is taken: skip to 1
        assert_eq!(s.fresh_index(Namespace::Value, "w", [0u32].into_iter()), 1);
        // counters are monotone per base
        assert_eq!(s.fresh_index(Namespace::Value, "f", std::iter::empty()), 1);
        assert_eq!(s.fresh_index(Namespace::Comp, "f", std::iter::empty()), 0);
    }
}
