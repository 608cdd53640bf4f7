use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{InternalEvent, OpenDes, Symbol};

/// Default cap on the number of controllable events.
pub const DEFAULT_MAX_CONTROLLABLE: usize = 16;

/// A set of enabled internal events. Always contains every uncontrollable
/// event; the stutter event is enabled by every pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ControlPattern {
    enabled: BTreeSet<Symbol>,
}

impl ControlPattern {
    pub fn new(enabled: impl IntoIterator<Item = Symbol>) -> Self {
        ControlPattern {
            enabled: enabled.into_iter().collect(),
        }
    }

    pub fn enabled(&self) -> &BTreeSet<Symbol> {
        &self.enabled
    }

    pub fn len(&self) -> usize {
        self.enabled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.enabled.is_empty()
    }

    pub fn allows(&self, event: &InternalEvent) -> bool {
        match event {
            InternalEvent::Stutter => true,
            InternalEvent::Named(s) => self.enabled.contains(s),
        }
    }

    pub fn is_subset(&self, other: &ControlPattern) -> bool {
        self.enabled.is_subset(&other.enabled)
    }
}

/// Larger patterns first, then lexicographic on the sorted members.
impl Ord for ControlPattern {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .enabled
            .len()
            .cmp(&self.enabled.len())
            .then_with(|| self.enabled.iter().cmp(other.enabled.iter()))
    }
}

impl PartialOrd for ControlPattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ControlPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.enabled.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(s.as_str())?;
        }
        f.write_str("}")
    }
}

/// All patterns of the plant, largest first.
pub fn control_patterns(plant: &OpenDes) -> Result<Vec<ControlPattern>> {
    control_patterns_capped(plant, DEFAULT_MAX_CONTROLLABLE)
}

pub fn control_patterns_capped(plant: &OpenDes, max_controllable: usize) -> Result<Vec<ControlPattern>> {
    let c: Vec<&Symbol> = plant.controllable().iter().collect();
    if c.len() > max_controllable {
        return Err(Error::ResourceLimit {
            what: format!("{} controllable events", c.len()),
            limit: max_controllable,
            hint: "; group controllable events that are always enabled together",
        });
    }
    let mut out: Vec<ControlPattern> = (0u64..1 << c.len())
        .map(|mask| {
            let chosen = c
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| (*s).clone());
            ControlPattern::new(plant.uncontrollable().iter().cloned().chain(chosen))
        })
        .collect();
    out.sort();
    Ok(out)
}
