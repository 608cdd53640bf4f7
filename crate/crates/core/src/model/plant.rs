use std::collections::{BTreeMap, BTreeSet, VecDeque};

use sha2::{Digest, Sha256};

use super::event::{Controllability, InputEvent, InternalEvent, OutputEvent, Symbol};
use crate::error::{Error, Result};

pub type StateId = usize;

/// One outgoing transition of a plant state under a fixed input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Move {
    pub event: InternalEvent,
    pub output: OutputEvent,
    pub target: StateId,
}

type MoveTable = BTreeMap<InternalEvent, (OutputEvent, StateId)>;

/// An open discrete-event plant.
///
/// Transitions are keyed by `(state, input, internal event)` and carry their
/// own output label, so the plant is deterministic over `(input, event)`
/// pairs while the output may vary from edge to edge.
///
/// States are kept in lexicographic name order; `StateId` indexes that order.
/// Declared input events are likewise sorted, and transition tables are keyed
/// by the index of the input event in [`OpenDes::input_events`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenDes {
    input_alphabet: BTreeSet<Symbol>,
    output_alphabet: BTreeSet<Symbol>,
    input_events: Vec<InputEvent>,
    controllable: BTreeSet<Symbol>,
    uncontrollable: BTreeSet<Symbol>,
    states: Vec<Symbol>,
    initial: StateId,
    marked: BTreeSet<StateId>,
    transitions: BTreeMap<(StateId, usize), MoveTable>,
}

/// Structural defects that parsing tolerates but synthesis does not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub unreachable: Vec<String>,
    pub not_input_enabled: Vec<(String, InputEvent)>,
    pub partition_violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.unreachable.is_empty()
            && self.not_input_enabled.is_empty()
            && self.partition_violations.is_empty()
    }
}

#[derive(Debug, Clone)]
struct RawTransition {
    from: String,
    input: InputEvent,
    event: String,
    output: OutputEvent,
    to: String,
}

/// Name-based construction of an [`OpenDes`]; `build` performs every check
/// that the model file parser performs.
#[derive(Debug, Clone, Default)]
pub struct PlantBuilder {
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    input_events: Vec<InputEvent>,
    controllable: Vec<String>,
    uncontrollable: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    marked: Vec<String>,
    transitions: Vec<RawTransition>,
}

impl PlantBuilder {
    pub fn input_alphabet<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.input_alphabet.extend(names.iter().map(|s| s.as_ref().to_owned()));
        self
    }

    pub fn output_alphabet<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.output_alphabet.extend(names.iter().map(|s| s.as_ref().to_owned()));
        self
    }

    pub fn input_event(mut self, event: InputEvent) -> Self {
        self.input_events.push(event);
        self
    }

    pub fn controllable<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.controllable.extend(names.iter().map(|s| s.as_ref().to_owned()));
        self
    }

    pub fn uncontrollable<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.uncontrollable.extend(names.iter().map(|s| s.as_ref().to_owned()));
        self
    }

    pub fn states<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.states.extend(names.iter().map(|s| s.as_ref().to_owned()));
        self
    }

    pub fn initial(mut self, name: &str) -> Self {
        self.initial = Some(name.to_owned());
        self
    }

    pub fn marked<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.marked.extend(names.iter().map(|s| s.as_ref().to_owned()));
        self
    }

    /// `event` is an internal event name, or `eps` for the stutter event.
    pub fn transition(
        mut self,
        from: &str,
        input: InputEvent,
        event: &str,
        output: OutputEvent,
        to: &str,
    ) -> Self {
        self.transitions.push(RawTransition {
            from: from.to_owned(),
            input,
            event: event.to_owned(),
            output,
            to: to.to_owned(),
        });
        self
    }

    pub fn build(self) -> Result<OpenDes> {
        let input_alphabet = symbol_set("input symbol", &self.input_alphabet)?;
        let output_alphabet = symbol_set("output symbol", &self.output_alphabet)?;
        let controllable = symbol_set("internal event", &self.controllable)?;
        let uncontrollable = symbol_set("internal event", &self.uncontrollable)?;
        let state_set = symbol_set("state", &self.states)?;
        if state_set.is_empty() {
            return Err(Error::EmptyStateSet);
        }
        let states: Vec<Symbol> = state_set.into_iter().collect();
        let lookup = |name: &str| -> Result<StateId> {
            states
                .binary_search_by(|s| s.as_str().cmp(name))
                .map_err(|_| Error::Undeclared {
                    kind: "state",
                    name: name.to_owned(),
                })
        };

        let mut input_events = Vec::new();
        for ev in self.input_events {
            if !ev.0.is_subset_of(&input_alphabet) {
                let missing = ev.0.symbols().find(|s| !input_alphabet.contains(*s)).unwrap();
                return Err(Error::Undeclared {
                    kind: "input symbol",
                    name: missing.to_string(),
                });
            }
            if input_events.contains(&ev) {
                return Err(Error::Duplicate {
                    kind: "input event",
                    name: ev.to_string(),
                });
            }
            input_events.push(ev);
        }
        if input_events.is_empty() {
            return Err(Error::Invalid("plant declares no input events".into()));
        }
        input_events.sort();

        let initial = lookup(
            self.initial
                .as_deref()
                .ok_or_else(|| Error::Invalid("no initial state".into()))?,
        )?;
        let marked = self
            .marked
            .iter()
            .map(|m| lookup(m))
            .collect::<Result<BTreeSet<_>>>()?;

        let mut transitions: BTreeMap<(StateId, usize), MoveTable> = BTreeMap::new();
        for t in self.transitions {
            let from = lookup(&t.from)?;
            let to = lookup(&t.to)?;
            let input = input_events
                .binary_search(&t.input)
                .map_err(|_| Error::Undeclared {
                    kind: "input event",
                    name: t.input.to_string(),
                })?;
            let event = InternalEvent::parse(&t.event)?;
            if let InternalEvent::Named(sym) = &event {
                if !controllable.contains(sym) && !uncontrollable.contains(sym) {
                    return Err(Error::Undeclared {
                        kind: "internal event",
                        name: sym.to_string(),
                    });
                }
            }
            if let Some(missing) = t.output.0.symbols().find(|s| !output_alphabet.contains(*s)) {
                return Err(Error::Undeclared {
                    kind: "output symbol",
                    name: missing.to_string(),
                });
            }
            let table = transitions.entry((from, input)).or_default();
            if table.contains_key(&event) {
                return Err(Error::DuplicateTransition {
                    state: t.from,
                    input: t.input.to_string(),
                    event: event.to_string(),
                });
            }
            table.insert(event, (t.output, to));
        }

        Ok(OpenDes {
            input_alphabet,
            output_alphabet,
            input_events,
            controllable,
            uncontrollable,
            states,
            initial,
            marked,
            transitions,
        })
    }
}

fn symbol_set(kind: &'static str, names: &[String]) -> Result<BTreeSet<Symbol>> {
    let mut set = BTreeSet::new();
    for n in names {
        if !set.insert(Symbol::new(n.as_str())?) {
            return Err(Error::Duplicate {
                kind,
                name: n.clone(),
            });
        }
    }
    Ok(set)
}

impl OpenDes {
    pub fn builder() -> PlantBuilder {
        PlantBuilder::default()
    }

    pub fn input_alphabet(&self) -> &BTreeSet<Symbol> {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &BTreeSet<Symbol> {
        &self.output_alphabet
    }

    pub fn input_events(&self) -> &[InputEvent] {
        &self.input_events
    }

    pub fn input_index(&self, input: &InputEvent) -> Option<usize> {
        self.input_events.binary_search(input).ok()
    }

    pub fn controllable(&self) -> &BTreeSet<Symbol> {
        &self.controllable
    }

    pub fn uncontrollable(&self) -> &BTreeSet<Symbol> {
        &self.uncontrollable
    }

    pub fn controllability(&self, event: &InternalEvent) -> Controllability {
        match event {
            InternalEvent::Named(s) if self.controllable.contains(s) && !self.uncontrollable.contains(s) => {
                Controllability::Controllable
            }
            _ => Controllability::Uncontrollable,
        }
    }

    pub fn is_uncontrollable(&self, event: &InternalEvent) -> bool {
        self.controllability(event) == Controllability::Uncontrollable
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        self.states[id].as_str()
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn marked(&self) -> &BTreeSet<StateId> {
        &self.marked
    }

    pub fn is_marked(&self, id: StateId) -> bool {
        self.marked.contains(&id)
    }

    /// Same plant with a different marking.
    pub fn with_marked(&self, marked: BTreeSet<StateId>) -> OpenDes {
        OpenDes {
            marked,
            ..self.clone()
        }
    }

    /// Transitions of `state` under the input with index `input`, in
    /// canonical event order.
    pub fn moves(&self, state: StateId, input: usize) -> impl Iterator<Item = Move> + '_ {
        self.transitions
            .get(&(state, input))
            .into_iter()
            .flat_map(|table| {
                table.iter().map(|(event, (output, target))| Move {
                    event: event.clone(),
                    output: output.clone(),
                    target: *target,
                })
            })
    }

    pub fn has_moves(&self, state: StateId, input: usize) -> bool {
        self.transitions
            .get(&(state, input))
            .is_some_and(|t| !t.is_empty())
    }

    /// The successor of `state` under `(input, event)`, if defined.
    pub fn step(&self, state: StateId, input: usize, event: &InternalEvent) -> Option<(OutputEvent, StateId)> {
        self.transitions
            .get(&(state, input))
            .and_then(|t| t.get(event))
            .cloned()
    }

    /// Every `(state, input, event)`-keyed transition as
    /// `(from, input index, event, output, to)`.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, usize, &InternalEvent, &OutputEvent, StateId)> {
        self.transitions.iter().flat_map(|(&(from, input), table)| {
            table
                .iter()
                .map(move |(event, (output, to))| (from, input, event, output, *to))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.values().map(BTreeMap::len).sum()
    }

    /// Transitions keyed by `(state, x)`, looked up by name.
    pub fn enabled_moves(&self, state: &str, input: &InputEvent) -> Result<Vec<Move>> {
        let s = self.state_id(state).ok_or_else(|| Error::Undeclared {
            kind: "state",
            name: state.to_owned(),
        })?;
        let i = self.input_index(input).ok_or_else(|| Error::Undeclared {
            kind: "input event",
            name: input.to_string(),
        })?;
        Ok(self.moves(s, i).collect())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for i in 0..self.input_events.len() {
                for m in self.moves(s, i) {
                    if !seen[m.target] {
                        seen[m.target] = true;
                        queue.push_back(m.target);
                    }
                }
            }
        }
        seen
    }

    pub fn validate(&self) -> ValidationReport {
        let reachable = self.reachable();
        let unreachable = (0..self.states.len())
            .filter(|&s| !reachable[s])
            .map(|s| self.state_name(s).to_owned())
            .collect();

        let mut not_input_enabled = Vec::new();
        for s in 0..self.states.len() {
            for (i, x) in self.input_events.iter().enumerate() {
                if !self.has_moves(s, i) {
                    not_input_enabled.push((self.state_name(s).to_owned(), x.clone()));
                }
            }
        }

        let mut partition_violations = Vec::new();
        for e in self.controllable.intersection(&self.uncontrollable) {
            partition_violations.push(format!("event `{e}` is both controllable and uncontrollable"));
        }
        let spaces: [(&str, Vec<&Symbol>); 4] = [
            ("input symbol", self.input_alphabet.iter().collect()),
            ("output symbol", self.output_alphabet.iter().collect()),
            (
                "internal event",
                self.controllable.union(&self.uncontrollable).collect(),
            ),
            ("state", self.states.iter().collect()),
        ];
        for (a, (kind_a, names_a)) in spaces.iter().enumerate() {
            for (kind_b, names_b) in spaces.iter().skip(a + 1) {
                for n in names_a.iter().filter(|n| names_b.contains(n)) {
                    partition_violations.push(format!("`{n}` is both an {kind_a} and a {kind_b}"));
                }
            }
        }

        ValidationReport {
            unreachable,
            not_input_enabled,
            partition_violations,
        }
    }

    /// Adds a stutter self-loop with silent output at every `(state, input)`
    /// pair that has no outgoing transition. Existing transitions are kept.
    pub fn complete_inputs(&self) -> OpenDes {
        let mut out = self.clone();
        for s in 0..self.states.len() {
            for i in 0..self.input_events.len() {
                if !self.has_moves(s, i) {
                    out.transitions
                        .entry((s, i))
                        .or_default()
                        .insert(InternalEvent::Stutter, (OutputEvent::silent(), s));
                }
            }
        }
        out
    }

    /// Keeps only the listed input events (and the transitions that use them).
    pub fn restrict_inputs(&self, keep: &[InputEvent]) -> Result<OpenDes> {
        let mut indices = Vec::new();
        for x in keep {
            indices.push(self.input_index(x).ok_or_else(|| Error::Undeclared {
                kind: "input event",
                name: x.to_string(),
            })?);
        }
        indices.sort_unstable();
        indices.dedup();
        let input_events: Vec<InputEvent> = indices.iter().map(|&i| self.input_events[i].clone()).collect();
        let transitions = self
            .transitions
            .iter()
            .filter_map(|(&(s, i), table)| {
                indices
                    .binary_search(&i)
                    .ok()
                    .map(|new_i| ((s, new_i), table.clone()))
            })
            .collect();
        Ok(OpenDes {
            input_events,
            transitions,
            ..self.clone()
        })
    }

    /// Hex digest of the canonical serialization.
    pub fn fingerprint(&self) -> String {
        let text = super::format::print_plant(self);
        let digest = Sha256::digest(text.as_bytes());
        hex::encode(&digest[..8])
    }
}
