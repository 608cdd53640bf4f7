use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::machine::SupervisorMachine;
use crate::automata::{shortest_word, Nfa};
use crate::error::{Error, Result};
use crate::game::ControlPattern;
use crate::lang::{enumerate_runs, spec_language, spec_prefix_language, IoWord, Word, XpWord, DEFAULT_MAX_DEPTH};
use crate::model::{InputEvent, InternalEvent, OpenDes, OutputEvent, SafetyAutomaton, SpecTransducer, StateId, Symbol};

/// The supervised plant. Its states are `plant@memory` pairs and its
/// marking is the plant marking; the product marking (plant and
/// specification both marked) is carried alongside.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    des: OpenDes,
    pairs: Vec<(StateId, usize)>,
    product_marked: Vec<bool>,
    patterns: BTreeMap<(StateId, usize), ControlPattern>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Marking {
    Plant,
    #[default]
    Product,
}

impl ClosedLoop {
    pub fn des(&self) -> &OpenDes {
        &self.des
    }

    /// `(plant state, memory state)` of a closed-loop state.
    pub fn pair(&self, state: StateId) -> (StateId, usize) {
        self.pairs[state]
    }

    pub fn is_product_marked(&self, state: StateId) -> bool {
        self.product_marked[state]
    }

    pub fn is_marked(&self, state: StateId, marking: Marking) -> bool {
        match marking {
            Marking::Plant => self.des.is_marked(state),
            Marking::Product => self.product_marked[state],
        }
    }

    /// Pattern emitted at `state` under the input with index `input`.
    pub fn pattern(&self, state: StateId, input: usize) -> &ControlPattern {
        &self.patterns[&(state, input)]
    }

    /// The closed loop with the product marking as its own marking.
    pub fn product_marked_des(&self) -> OpenDes {
        let marked = (0..self.des.num_states()).filter(|&s| self.product_marked[s]).collect();
        self.des.with_marked(marked)
    }
}

fn event_name(e: &InternalEvent) -> String {
    e.to_string()
}

fn names(set: &BTreeSet<Symbol>) -> Vec<String> {
    set.iter().map(Symbol::to_string).collect()
}

/// Restricts the plant by the supervisor, exploring reachable
/// `(plant, memory)` pairs.
pub fn compose(plant: &OpenDes, sup: &SupervisorMachine) -> Result<ClosedLoop> {
    if let Some(fp) = sup.fingerprint() {
        if fp != plant.fingerprint() {
            return Err(Error::Mismatch(format!(
                "supervisor was built for plant {fp}, this plant is {}",
                plant.fingerprint()
            )));
        }
    }
    let name = |p: StateId, m: usize| format!("{}@{}", plant.state_name(p), sup.state_name(m));
    let start = (plant.initial(), sup.initial());
    let mut seen: HashMap<(StateId, usize), ()> = HashMap::from([(start, ())]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    let mut edges = Vec::new();
    let mut patterns = Vec::new();
    while let Some((p, m)) = queue.pop_front() {
        for (i, x) in plant.input_events().iter().enumerate() {
            let pattern = sup.pattern(m, x).ok_or_else(|| {
                Error::Mismatch(format!("no pattern for memory {} under {x}", sup.state_name(m)))
            })?;
            patterns.push(((p, m), i, pattern.clone()));
            for mv in plant.moves(p, i).filter(|mv| pattern.allows(&mv.event)) {
                let m2 = sup.update(m, x, &mv.event).ok_or_else(|| {
                    Error::Mismatch(format!(
                        "no update for memory {} under {x} and {}",
                        sup.state_name(m),
                        mv.event
                    ))
                })?;
                let next = (mv.target, m2);
                if seen.insert(next, ()).is_none() {
                    order.push(next);
                    queue.push_back(next);
                }
                edges.push(((p, m), x.clone(), mv.event, mv.output, next));
            }
        }
    }

    let state_names: Vec<String> = order.iter().map(|&(p, m)| name(p, m)).collect();
    let mut builder = OpenDes::builder()
        .input_alphabet(&names(plant.input_alphabet()))
        .output_alphabet(&names(plant.output_alphabet()))
        .controllable(&names(plant.controllable()))
        .uncontrollable(&names(plant.uncontrollable()))
        .states(&state_names)
        .initial(&name(start.0, start.1));
    for x in plant.input_events() {
        builder = builder.input_event(x.clone());
    }
    let marked: Vec<String> = order
        .iter()
        .filter(|(p, _)| plant.is_marked(*p))
        .map(|&(p, m)| name(p, m))
        .collect();
    builder = builder.marked(&marked);
    for ((p, m), x, e, y, (p2, m2)) in edges {
        builder = builder.transition(&name(p, m), x, &event_name(&e), y, &name(p2, m2));
    }
    let des = builder.build()?;

    let mut pairs = vec![(0, 0); des.num_states()];
    let mut product_marked = vec![false; des.num_states()];
    for &(p, m) in &order {
        let id = des.state_id(&name(p, m)).expect("state was declared");
        pairs[id] = (p, m);
        product_marked[id] = plant.is_marked(p) && sup.is_marked(m);
    }
    let patterns = patterns
        .into_iter()
        .map(|((p, m), i, pat)| ((des.state_id(&name(p, m)).expect("declared"), i), pat))
        .collect();
    Ok(ClosedLoop {
        des,
        pairs,
        product_marked,
        patterns,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonblockingVerdict {
    pub holds: bool,
    /// Shortest history reaching a state that cannot reach a marked one.
    pub witness: Option<XpWord>,
}

/// Every reachable closed-loop state can reach a marked state.
pub fn check_nonblocking(cl: &ClosedLoop, marking: Marking) -> NonblockingVerdict {
    let des = cl.des();
    let n = des.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (from, _, _, _, to) in des.transitions() {
        preds[to].push(from);
    }
    let mut coacc = vec![false; n];
    let mut queue: VecDeque<StateId> = (0..n).filter(|&s| cl.is_marked(s, marking)).collect();
    for &s in &queue {
        coacc[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &p in &preds[s] {
            if !coacc[p] {
                coacc[p] = true;
                queue.push_back(p);
            }
        }
    }
    // Breadth-first over (input, event) labels in canonical order.
    let mut word: Vec<Option<XpWord>> = vec![None; n];
    word[des.initial()] = Some(Word::empty());
    let mut queue = VecDeque::from([des.initial()]);
    while let Some(s) = queue.pop_front() {
        let w = word[s].clone().expect("visited");
        if !coacc[s] {
            return NonblockingVerdict {
                holds: false,
                witness: Some(w),
            };
        }
        let mut succ: Vec<((InputEvent, InternalEvent), StateId)> = Vec::new();
        for (i, x) in des.input_events().iter().enumerate() {
            for m in des.moves(s, i) {
                succ.push(((x.clone(), m.event), m.target));
            }
        }
        succ.sort();
        for (label, t) in succ {
            if word[t].is_none() {
                word[t] = Some(w.pushed(label));
                queue.push_back(t);
            }
        }
    }
    NonblockingVerdict {
        holds: true,
        witness: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityVerdict {
    pub holds: bool,
    /// Shortest word in the symmetric difference.
    pub witness: Option<IoWord>,
    /// Whether enumeration up to the requested depth agrees with the exact
    /// verdict on words of that length.
    pub bounded_agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub safe_equality: EqualityVerdict,
    pub marked_product_equality: EqualityVerdict,
    pub marked_plant_equality: EqualityVerdict,
    pub nonblocking: NonblockingVerdict,
    /// The two marked equalities disagree.
    pub marking_divergence: bool,
}

type IoLabel = (InputEvent, OutputEvent);

fn closed_loop_nfa(cl: &ClosedLoop, accept: impl Fn(StateId) -> bool) -> Nfa<IoLabel> {
    let des = cl.des();
    let mut nfa = Nfa::new();
    for s in 0..des.num_states() {
        nfa.add_state(accept(s));
    }
    nfa.add_initial(des.initial());
    for (from, i, _, y, to) in des.transitions() {
        nfa.add_edge(from, Some((des.input_events()[i].clone(), y.clone())), to);
    }
    nfa
}

/// Recognizer of `K̄` (`closure`) or `K`, with dead states trimmed.
fn spec_nfa(ak: &SafetyAutomaton, closure: bool) -> Nfa<IoLabel> {
    let spec = ak.spec();
    let mut nfa = Nfa::new();
    for q in 0..spec.num_states() {
        nfa.add_state(ak.is_live(q) && (closure || spec.is_marked(q)));
    }
    if ak.is_live(spec.initial()) {
        nfa.add_initial(spec.initial());
    }
    for q in (0..spec.num_states()).filter(|&q| ak.is_live(q)) {
        for x in ak.inputs() {
            if let Some((y, t)) = spec.step(q, x) {
                if ak.is_live(t) {
                    nfa.add_edge(q, Some((x.clone(), y.clone())), t);
                }
            }
        }
    }
    nfa
}

fn equality(
    lhs: &Nfa<IoLabel>,
    rhs: &Nfa<IoLabel>,
    bounded_lhs: &BTreeSet<IoWord>,
    bounded_rhs: &BTreeSet<IoWord>,
    depth: usize,
) -> Result<EqualityVerdict> {
    let witness = shortest_word(&[lhs, rhs], |a| a[0] != a[1])?;
    let bounded_diff = bounded_lhs.symmetric_difference(bounded_rhs).next().cloned();
    let bounded_agrees = match &witness {
        Some(w) if w.len() <= depth => bounded_diff.as_ref() == Some(w),
        _ => bounded_diff.is_none(),
    };
    Ok(EqualityVerdict {
        holds: witness.is_none(),
        witness,
        bounded_agrees,
    })
}

/// Compares the closed-loop languages with `K̄` and `K` exactly, and
/// cross-checks each comparison by enumeration up to `depth`.
pub fn verify_specification(cl: &ClosedLoop, spec: &SpecTransducer, depth: usize) -> Result<VerificationReport> {
    let des = cl.des();
    let ak = SafetyAutomaton::new(spec, des.input_events())?;
    let inputs = des.input_events();
    let runs = enumerate_runs(des, depth, DEFAULT_MAX_DEPTH)?;
    let io_where = |keep: &dyn Fn(StateId) -> bool| -> BTreeSet<IoWord> {
        runs.iter().filter(|(_, s)| keep(*s)).map(|(w, _)| w.project_xy()).collect()
    };
    let cl_all = io_where(&|_| true);
    let cl_product = io_where(&|s| cl.is_product_marked(s));
    let cl_plant = io_where(&|s| des.is_marked(s));
    let kbar = spec_prefix_language(spec, inputs, depth);
    let k = spec_language(spec, inputs, depth, true);

    let kbar_nfa = spec_nfa(&ak, true);
    let k_nfa = spec_nfa(&ak, false);
    let safe_equality = equality(&closed_loop_nfa(cl, |_| true), &kbar_nfa, &cl_all, &kbar, depth)?;
    let marked_product_equality = equality(
        &closed_loop_nfa(cl, |s| cl.is_product_marked(s)),
        &k_nfa,
        &cl_product,
        &k,
        depth,
    )?;
    let marked_plant_equality = equality(
        &closed_loop_nfa(cl, |s| des.is_marked(s)),
        &k_nfa,
        &cl_plant,
        &k,
        depth,
    )?;
    let marking_divergence = marked_plant_equality.holds != marked_product_equality.holds;
    Ok(VerificationReport {
        safe_equality,
        marked_product_equality,
        marked_plant_equality,
        nonblocking: check_nonblocking(cl, Marking::Product),
        marking_divergence,
    })
}
