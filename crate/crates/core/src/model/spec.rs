use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::event::{InputEvent, OutputEvent, Symbol};
use crate::error::{Error, Result};

/// A deterministic Mealy transducer whose marked language is the reactive
/// specification `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecTransducer {
    states: Vec<Symbol>,
    initial: usize,
    marked: BTreeSet<usize>,
    transitions: BTreeMap<(usize, InputEvent), (OutputEvent, usize)>,
}

#[derive(Debug, Clone, Default)]
pub struct SpecBuilder {
    states: Vec<String>,
    initial: Option<String>,
    marked: Vec<String>,
    transitions: Vec<(String, InputEvent, OutputEvent, String)>,
}

impl SpecBuilder {
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

    pub fn transition(mut self, from: &str, input: InputEvent, output: OutputEvent, to: &str) -> Self {
        self.transitions.push((from.to_owned(), input, output, to.to_owned()));
        self
    }

    pub fn build(self) -> Result<SpecTransducer> {
        let mut set = BTreeSet::new();
        for n in &self.states {
            if !set.insert(Symbol::new(n.as_str())?) {
                return Err(Error::Duplicate {
                    kind: "state",
                    name: n.clone(),
                });
            }
        }
        if set.is_empty() {
            return Err(Error::EmptyStateSet);
        }
        let states: Vec<Symbol> = set.into_iter().collect();
        let lookup = |name: &str| -> Result<usize> {
            states
                .binary_search_by(|s| s.as_str().cmp(name))
                .map_err(|_| Error::Undeclared {
                    kind: "state",
                    name: name.to_owned(),
                })
        };
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
        let mut transitions = BTreeMap::new();
        for (from, input, output, to) in self.transitions {
            let f = lookup(&from)?;
            let t = lookup(&to)?;
            if transitions.insert((f, input.clone()), (output, t)).is_some() {
                return Err(Error::DuplicateTransition {
                    state: from,
                    input: input.to_string(),
                    event: "-".into(),
                });
            }
        }
        Ok(SpecTransducer {
            states,
            initial,
            marked,
            transitions,
        })
    }
}

impl SpecTransducer {
    pub fn builder() -> SpecBuilder {
        SpecBuilder::default()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: usize) -> &str {
        self.states[id].as_str()
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn marked(&self) -> &BTreeSet<usize> {
        &self.marked
    }

    pub fn is_marked(&self, id: usize) -> bool {
        self.marked.contains(&id)
    }

    /// `(γ_k(q, x), δ_k(q, x))` when defined.
    pub fn step(&self, state: usize, input: &InputEvent) -> Option<(&OutputEvent, usize)> {
        self.transitions.get(&(state, input.clone())).map(|(o, t)| (o, *t))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, &InputEvent, &OutputEvent, usize)> {
        self.transitions
            .iter()
            .map(|((from, input), (output, to))| (*from, input, output, *to))
    }

    /// Input events mentioned anywhere in the transducer.
    pub fn used_inputs(&self) -> BTreeSet<InputEvent> {
        self.transitions.keys().map(|(_, x)| x.clone()).collect()
    }

    pub fn check_input_complete(&self, inputs: &[InputEvent]) -> Result<()> {
        for q in 0..self.states.len() {
            for x in inputs {
                if self.step(q, x).is_none() {
                    return Err(Error::SpecNotInputComplete {
                        state: self.state_name(q).to_owned(),
                        input: x.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// States from which a marked state is reachable using `inputs`.
    pub fn coaccessible(&self, inputs: &[InputEvent]) -> Vec<bool> {
        let n = self.states.len();
        let mut preds = vec![Vec::new(); n];
        for x in inputs {
            for q in 0..n {
                if let Some((_, t)) = self.step(q, x) {
                    preds[t].push(q);
                }
            }
        }
        let mut live = vec![false; n];
        let mut queue: VecDeque<usize> = self.marked.iter().copied().collect();
        for &m in &self.marked {
            live[m] = true;
        }
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !live[p] {
                    live[p] = true;
                    queue.push_back(p);
                }
            }
        }
        live
    }

    /// States reachable from the initial state using `inputs`.
    pub fn reachable(&self, inputs: &[InputEvent]) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for x in inputs {
                if let Some((_, t)) = self.step(q, x) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// True iff `L_m` is empty over the given input events.
    pub fn marked_language_is_empty(&self, inputs: &[InputEvent]) -> bool {
        !self.coaccessible(inputs)[self.initial]
    }
}

/// A state of the `q_⊥`-completed safety automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AkState {
    Spec(usize),
    Bottom,
}

impl AkState {
    pub fn is_bottom(self) -> bool {
        self == AkState::Bottom
    }
}

/// The specification transducer completed into a total acceptor over
/// input/output pairs, with an absorbing rejecting sink.
///
/// A pair `(x, y)` at state `q` moves to `δ_k(q, x)` when the transducer's
/// output `γ_k(q, x)` equals `y` and the target can still reach a marked
/// state; every other pair, and every pair at the sink, moves to
/// [`AkState::Bottom`]. Hence a word leaves the prefix closure of `K` exactly
/// when its run ends at the sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyAutomaton {
    spec: SpecTransducer,
    inputs: Vec<InputEvent>,
    live: Vec<bool>,
}

impl SafetyAutomaton {
    pub fn new(spec: &SpecTransducer, inputs: &[InputEvent]) -> Result<Self> {
        spec.check_input_complete(inputs)?;
        let live = spec.coaccessible(inputs);
        Ok(SafetyAutomaton {
            spec: spec.clone(),
            inputs: inputs.to_vec(),
            live,
        })
    }

    pub fn spec(&self) -> &SpecTransducer {
        &self.spec
    }

    pub fn inputs(&self) -> &[InputEvent] {
        &self.inputs
    }

    pub fn initial(&self) -> AkState {
        let q0 = self.spec.initial();
        if self.live[q0] {
            AkState::Spec(q0)
        } else {
            AkState::Bottom
        }
    }

    pub fn step(&self, state: AkState, input: &InputEvent, output: &OutputEvent) -> AkState {
        let AkState::Spec(q) = state else {
            return AkState::Bottom;
        };
        if !self.inputs.contains(input) {
            return AkState::Bottom;
        }
        match self.spec.step(q, input) {
            Some((expected, target)) if expected == output && self.live[target] => AkState::Spec(target),
            _ => AkState::Bottom,
        }
    }

    pub fn run<'a>(&self, word: impl IntoIterator<Item = (&'a InputEvent, &'a OutputEvent)>) -> AkState {
        word.into_iter()
            .fold(self.initial(), |s, (x, y)| self.step(s, x, y))
    }

    pub fn is_marked(&self, state: AkState) -> bool {
        matches!(state, AkState::Spec(q) if self.spec.is_marked(q))
    }

    pub fn is_live(&self, q: usize) -> bool {
        self.live[q]
    }

    /// Non-sink states, in index order.
    pub fn states(&self) -> impl Iterator<Item = AkState> + '_ {
        (0..self.spec.num_states())
            .filter(|&q| self.live[q])
            .map(AkState::Spec)
    }

    pub fn state_name(&self, state: AkState) -> String {
        AkStateName(self, state).to_string()
    }
}

struct AkStateName<'a>(&'a SafetyAutomaton, AkState);

impl fmt::Display for AkStateName<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.1 {
            AkState::Spec(q) => f.write_str(self.0.spec.state_name(q)),
            AkState::Bottom => f.write_str("bot"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: &str) -> InputEvent {
        InputEvent::of(&[n])
    }
    fn y(n: &str) -> OutputEvent {
        OutputEvent::of(&[n])
    }

    #[test]
    fn incomplete_spec_is_rejected() {
        let spec = SpecTransducer::builder()
            .states(&["k"])
            .initial("k")
            .marked(&["k"])
            .transition("k", x("a"), y("b"), "k")
            .build()
            .unwrap();
        assert!(spec.check_input_complete(&[x("a")]).is_ok());
        assert!(matches!(
            SafetyAutomaton::new(&spec, &[x("a"), x("c")]),
            Err(Error::SpecNotInputComplete { .. })
        ));
    }

    #[test]
    fn dead_targets_route_to_bottom() {
        let spec = SpecTransducer::builder()
            .states(&["k0", "k1", "dead"])
            .initial("k0")
            .marked(&["k1"])
            .transition("k0", x("a"), y("b"), "k1")
            .transition("k1", x("a"), y("b"), "dead")
            .transition("dead", x("a"), y("b"), "dead")
            .build()
            .unwrap();
        let ak = SafetyAutomaton::new(&spec, &[x("a")]).unwrap();
        let k1 = ak.step(ak.initial(), &x("a"), &y("b"));
        assert_eq!(k1, AkState::Spec(spec.state_id("k1").unwrap()));
        assert!(ak.is_marked(k1));
        assert_eq!(ak.step(k1, &x("a"), &y("b")), AkState::Bottom);
        assert_eq!(ak.step(AkState::Bottom, &x("a"), &y("b")), AkState::Bottom);
    }
}
