//! Output controllability and closedness checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::automata::{shortest_word, Nfa};
use crate::error::{Error, Result};
use crate::lang::{enumerate_runs, spec_language, spec_prefix_language, IoWord, OutputWord, DEFAULT_MAX_DEPTH};
use crate::model::{AkState, InputEvent, OpenDes, OutputEvent, SafetyAutomaton, SpecTransducer, StateId};

pub type UncontrollableIoSet = BTreeSet<(InputEvent, OutputEvent)>;

/// Which plant transitions may realize an uncontrollable I/O pair at a
/// reached plant state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Any transition producing the pair.
    Literal,
    /// Only uncontrollable transitions producing the pair.
    Local,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Literal => "literal",
            Mode::Local => "local",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    AutomatonExact,
    BoundedEnumeration,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::AutomatonExact => "automaton-exact",
            Method::BoundedEnumeration => "bounded-enumeration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Io(IoWord),
    Output(OutputWord),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Io(w) => w.fmt(f),
            Witness::Output(w) => w.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub method: Method,
    pub mode: Option<Mode>,
}

impl CheckVerdict {
    fn from_witness(witness: Option<Witness>, method: Method, mode: Option<Mode>) -> Self {
        CheckVerdict {
            holds: witness.is_none(),
            witness,
            method,
            mode,
        }
    }
}

/// Every `(x, y)` produced by some uncontrollable transition, stutters
/// included.
pub fn uncontrollable_io(plant: &OpenDes) -> UncontrollableIoSet {
    plant
        .transitions()
        .filter(|(_, _, e, _, _)| plant.is_uncontrollable(e))
        .map(|(_, i, _, y, _)| (plant.input_events()[i].clone(), y.clone()))
        .collect()
}

/// Pairs `(x, y)` realizable at `state` under `mode`.
fn realized(plant: &OpenDes, state: StateId, mode: Mode) -> BTreeSet<(InputEvent, OutputEvent)> {
    plant
        .input_events()
        .iter()
        .enumerate()
        .flat_map(|(i, x)| {
            plant
                .moves(state, i)
                .filter(|m| mode == Mode::Literal || plant.is_uncontrollable(&m.event))
                .map(move |m| (x.clone(), m.output))
        })
        .collect()
}

fn nonempty_automaton(plant: &OpenDes, spec: &SpecTransducer) -> Result<SafetyAutomaton> {
    let ak = SafetyAutomaton::new(spec, plant.input_events())?;
    if ak.initial().is_bottom() {
        return Err(Error::EmptySpecification);
    }
    Ok(ak)
}

/// Decides `K̄·Σ^io_u ∩ L_io(P) ⊆ K̄` on the product of the plant with the
/// safety automaton. The witness is the shortlex-least `w·(x, y)` leaving
/// the prefix closure.
pub fn check_output_controllability(plant: &OpenDes, spec: &SpecTransducer, mode: Mode) -> Result<CheckVerdict> {
    let ak = nonempty_automaton(plant, spec)?;
    let sigma_u = uncontrollable_io(plant);
    let mut realized_at: BTreeMap<StateId, BTreeSet<(InputEvent, OutputEvent)>> = BTreeMap::new();

    // Subset construction over I/O words: plant states reached by w, and
    // the (deterministic) safety-automaton state.
    type Node = (BTreeSet<StateId>, AkState);
    let start: Node = (BTreeSet::from([plant.initial()]), ak.initial());
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, IoWord::empty())]);
    while let Some(((states, q), w)) = queue.pop_front() {
        let mut here: BTreeSet<(InputEvent, OutputEvent)> = BTreeSet::new();
        for &p in &states {
            here.extend(
                realized_at
                    .entry(p)
                    .or_insert_with(|| realized(plant, p, mode))
                    .iter()
                    .cloned(),
            );
        }
        if let Some(pair) = here
            .iter()
            .filter(|pair| sigma_u.contains(*pair))
            .find(|(x, y)| ak.step(q, x, y).is_bottom())
        {
            return Ok(CheckVerdict::from_witness(
                Some(Witness::Io(w.pushed(pair.clone()))),
                Method::AutomatonExact,
                Some(mode),
            ));
        }
        let mut succ: BTreeMap<(InputEvent, OutputEvent), BTreeSet<StateId>> = BTreeMap::new();
        for &p in &states {
            for (i, x) in plant.input_events().iter().enumerate() {
                for m in plant.moves(p, i) {
                    succ.entry((x.clone(), m.output)).or_default().insert(m.target);
                }
            }
        }
        for ((x, y), targets) in succ {
            let q2 = ak.step(q, &x, &y);
            if q2.is_bottom() {
                continue;
            }
            let node = (targets, q2);
            if seen.insert(node.clone()) {
                queue.push_back((node, w.pushed((x, y))));
            }
        }
    }
    Ok(CheckVerdict::from_witness(None, Method::AutomatonExact, Some(mode)))
}

/// The same condition restricted to words `w·(x, y)` of length at most
/// `depth`, by direct enumeration of both languages.
pub fn check_output_controllability_bounded(
    plant: &OpenDes,
    spec: &SpecTransducer,
    mode: Mode,
    depth: usize,
) -> Result<CheckVerdict> {
    spec.check_input_complete(plant.input_events())?;
    let kbar = spec_prefix_language(spec, plant.input_events(), depth);
    if kbar.is_empty() {
        return Err(Error::EmptySpecification);
    }
    let sigma_u = uncontrollable_io(plant);
    let mut candidates = BTreeSet::new();
    for (w, end) in enumerate_runs(plant, depth.saturating_sub(1), DEFAULT_MAX_DEPTH)? {
        let io = w.project_xy();
        if !kbar.contains(&io) {
            continue;
        }
        for pair in realized(plant, end, mode) {
            let ext = io.pushed(pair.clone());
            if sigma_u.contains(&pair) && !kbar.contains(&ext) {
                candidates.insert(ext);
            }
        }
    }
    let witness = if depth == 0 { None } else { candidates.into_iter().next() };
    Ok(CheckVerdict::from_witness(
        witness.map(Witness::Io),
        Method::BoundedEnumeration,
        Some(mode),
    ))
}

fn label(y: &OutputEvent) -> Option<OutputEvent> {
    (!y.is_silent()).then(|| y.clone())
}

/// Recognizer of `P_y(K)`, or of `P_y(K̄)` when `closure` is set.
fn spec_output_nfa(ak: &SafetyAutomaton, closure: bool) -> Nfa<OutputEvent> {
    let spec = ak.spec();
    let mut nfa = Nfa::new();
    for q in 0..spec.num_states() {
        let accepting = if closure { ak.is_live(q) } else { spec.is_marked(q) };
        nfa.add_state(accepting);
    }
    nfa.add_initial(spec.initial());
    for q in (0..spec.num_states()).filter(|&q| !closure || ak.is_live(q)) {
        for x in ak.inputs() {
            if let Some((y, t)) = spec.step(q, x) {
                if !closure || ak.is_live(t) {
                    nfa.add_edge(q, label(y), t);
                }
            }
        }
    }
    nfa
}

/// Recognizer of `P_y(L_io,m(P))`.
fn plant_output_nfa(plant: &OpenDes) -> Nfa<OutputEvent> {
    let mut nfa = Nfa::new();
    for p in 0..plant.num_states() {
        nfa.add_state(plant.is_marked(p));
    }
    nfa.add_initial(plant.initial());
    for (from, _, _, y, to) in plant.transitions() {
        nfa.add_edge(from, label(y), to);
    }
    nfa
}

/// Recognizer of `P_y(K̄ ∩ L_io,m(P))`.
fn joint_output_nfa(plant: &OpenDes, ak: &SafetyAutomaton) -> Nfa<OutputEvent> {
    let mut nfa = Nfa::new();
    let mut ids: BTreeMap<(StateId, AkState), usize> = BTreeMap::new();
    let start = (plant.initial(), ak.initial());
    ids.insert(start, nfa.add_state(plant.is_marked(start.0)));
    nfa.add_initial(0);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        let from = ids[&(p, q)];
        for (i, x) in plant.input_events().iter().enumerate() {
            for m in plant.moves(p, i) {
                let q2 = ak.step(q, x, &m.output);
                if q2.is_bottom() {
                    continue;
                }
                let key = (m.target, q2);
                let to = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = nfa.add_state(plant.is_marked(m.target));
                        ids.insert(key, id);
                        queue.push_back(key);
                        id
                    }
                };
                nfa.add_edge(from, label(&m.output), to);
            }
        }
    }
    nfa
}

/// Decides `P_y(K) = closure(P_y(K)) ∩ P_y(L_io,m(P))`.
///
/// When the equality fails, the witness is the shortest output word that
/// some marked plant word inside `K̄` produces and no word of `K` does; only
/// if there is none is the shortest word of the symmetric difference
/// returned.
pub fn check_closedness(plant: &OpenDes, spec: &SpecTransducer) -> Result<CheckVerdict> {
    let ak = nonempty_automaton(plant, spec)?;
    let k = spec_output_nfa(&ak, false);
    let kbar = spec_output_nfa(&ak, true);
    let pm = plant_output_nfa(plant);
    let joint = joint_output_nfa(plant, &ak);
    let witness = match shortest_word(&[&joint, &k], |a| a[0] && !a[1])? {
        Some(w) => Some(w),
        None => shortest_word(&[&k, &kbar, &pm], |a| a[0] != (a[1] && a[2]))?,
    };
    Ok(CheckVerdict::from_witness(
        witness.map(Witness::Output),
        Method::AutomatonExact,
        None,
    ))
}

/// Closedness restricted to I/O words of length at most `depth`. A
/// reported witness is genuine when the transducer never emits a silent
/// output; otherwise it may stem from truncation.
pub fn check_closedness_bounded(plant: &OpenDes, spec: &SpecTransducer, depth: usize) -> Result<CheckVerdict> {
    spec.check_input_complete(plant.input_events())?;
    let inputs = plant.input_events();
    let k: BTreeSet<OutputWord> = spec_language(spec, inputs, depth, true)
        .iter()
        .map(|w| w.project_y())
        .collect();
    if spec_prefix_language(spec, inputs, 0).is_empty() {
        return Err(Error::EmptySpecification);
    }
    let kbar_io = spec_prefix_language(spec, inputs, depth);
    let kbar: BTreeSet<OutputWord> = kbar_io.iter().map(|w| w.project_y()).collect();
    let runs = enumerate_runs(plant, depth, DEFAULT_MAX_DEPTH)?;
    let marked: Vec<IoWord> = runs
        .iter()
        .filter(|(_, s)| plant.is_marked(*s))
        .map(|(w, _)| w.project_xy())
        .collect();
    let pm: BTreeSet<OutputWord> = marked.iter().map(|w| w.project_y()).collect();
    let joint: BTreeSet<OutputWord> = marked
        .iter()
        .filter(|w| kbar_io.contains(*w))
        .map(|w| w.project_y())
        .collect();
    let preferred = joint.difference(&k).next().cloned();
    let witness = preferred.or_else(|| {
        let rhs: BTreeSet<OutputWord> = kbar.intersection(&pm).cloned().collect();
        k.symmetric_difference(&rhs).next().cloned()
    });
    Ok(CheckVerdict::from_witness(
        witness.map(Witness::Output),
        Method::BoundedEnumeration,
        None,
    ))
}
