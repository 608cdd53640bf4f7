use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Reserved spelling of the silent event in files and printed words.
pub const EPS: &str = "eps";

/// An identifier: non-empty and free of whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::Invalid("empty identifier".into()));
        }
        if name.chars().any(|c| c.is_whitespace() || "{}|,()".contains(c)) {
            return Err(Error::Invalid(format!(
                "identifier `{name}` contains whitespace or a reserved character"
            )));
        }
        if name == EPS {
            return Err(Error::Invalid(format!("`{EPS}` is reserved for the silent event")));
        }
        Ok(Symbol(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite subset of an alphabet. The empty subset is the silent event.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventSet(BTreeSet<Symbol>);

impl EventSet {
    pub fn silent() -> Self {
        EventSet(BTreeSet::new())
    }

    pub fn from_symbols(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        EventSet(symbols.into_iter().collect())
    }

    /// Convenience constructor used mostly by tests and fixtures.
    pub fn of(names: &[&str]) -> Self {
        EventSet(
            names
                .iter()
                .map(|n| Symbol::new(*n).expect("valid identifier"))
                .collect(),
        )
    }

    pub fn is_silent(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.0.iter()
    }

    pub fn is_subset_of(&self, alphabet: &BTreeSet<Symbol>) -> bool {
        self.0.is_subset(alphabet)
    }

    /// Parses the printed form: `eps` or `{a,b}`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == EPS {
            return Ok(EventSet::silent());
        }
        let inner = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::Invalid(format!("expected `{EPS}` or `{{...}}`, got `{text}`")))?;
        let mut set = BTreeSet::new();
        for name in inner.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            set.insert(Symbol::new(name)?);
        }
        Ok(EventSet(set))
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_silent() {
            return f.write_str(EPS);
        }
        f.write_str("{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(s.as_str())?;
        }
        f.write_str("}")
    }
}

macro_rules! set_event {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub EventSet);

        impl $name {
            pub fn silent() -> Self {
                $name(EventSet::silent())
            }

            pub fn of(names: &[&str]) -> Self {
                $name(EventSet::of(names))
            }

            pub fn is_silent(&self) -> bool {
                self.0.is_silent()
            }

            pub fn parse(text: &str) -> Result<Self> {
                EventSet::parse(text).map($name)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

set_event!(
    /// An environment input: silent or a non-empty subset of the input alphabet.
    InputEvent
);
set_event!(
    /// A plant output: silent or a non-empty subset of the output alphabet.
    OutputEvent
);

/// A plant transition label. `Stutter` is the silent internal event added by
/// input completion; it is never declared and always uncontrollable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InternalEvent {
    Stutter,
    Named(Symbol),
}

impl InternalEvent {
    pub fn named(name: &str) -> Self {
        InternalEvent::Named(Symbol::new(name).expect("valid identifier"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text == EPS {
            Ok(InternalEvent::Stutter)
        } else {
            Symbol::new(text).map(InternalEvent::Named)
        }
    }
}

impl fmt::Display for InternalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InternalEvent::Stutter => f.write_str(EPS),
            InternalEvent::Named(s) => s.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Controllability {
    Controllable,
    Uncontrollable,
}
