use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ControlPattern, GameArena, Node, Strategy};
use crate::model::format::{document_kind, syntax, to_canonical, EventRepr};
use crate::model::{InputEvent, InternalEvent, OpenDes, Symbol};

/// A finite-memory supervisor. Memory states stand for arena environment
/// nodes; `m0` is the initial one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupervisorMachine {
    states: Vec<Symbol>,
    marked: Vec<bool>,
    fingerprint: Option<String>,
    pattern: BTreeMap<(usize, InputEvent), ControlPattern>,
    update: BTreeMap<(usize, InputEvent, InternalEvent), usize>,
}

impl SupervisorMachine {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, m: usize) -> &str {
        self.states[m].as_str()
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.as_str() == name)
    }

    pub fn initial(&self) -> usize {
        0
    }

    /// Whether the transducer component of the memory state is marked.
    pub fn is_marked(&self, m: usize) -> bool {
        self.marked[m]
    }

    pub fn fingerprint(&self) -> Option<&str> {
        self.fingerprint.as_deref()
    }

    pub fn pattern(&self, m: usize, input: &InputEvent) -> Option<&ControlPattern> {
        self.pattern.get(&(m, input.clone()))
    }

    pub fn update(&self, m: usize, input: &InputEvent, event: &InternalEvent) -> Option<usize> {
        self.update.get(&(m, input.clone(), event.clone())).copied()
    }

    pub fn patterns(&self) -> impl Iterator<Item = (usize, &InputEvent, &ControlPattern)> {
        self.pattern.iter().map(|((m, x), p)| (*m, x, p))
    }

    pub fn updates(&self) -> impl Iterator<Item = (usize, &InputEvent, &InternalEvent, usize)> {
        self.update.iter().map(|((m, x, e), t)| (*m, x, e, *t))
    }

    /// One memory state enabling every internal event. Every memory state
    /// counts as marked.
    pub fn permissive(plant: &OpenDes) -> Self {
        let all = ControlPattern::new(plant.controllable().iter().chain(plant.uncontrollable()).cloned());
        let mut pattern = BTreeMap::new();
        let mut update = BTreeMap::new();
        for (i, x) in plant.input_events().iter().enumerate() {
            pattern.insert((0, x.clone()), all.clone());
            for s in 0..plant.num_states() {
                for m in plant.moves(s, i) {
                    update.insert((0, x.clone(), m.event), 0);
                }
            }
        }
        SupervisorMachine {
            states: vec![memory_name(0)],
            marked: vec![true],
            fingerprint: Some(plant.fingerprint()),
            pattern,
            update,
        }
    }

    /// Replays an `(input, internal)` history; `None` if it leaves the
    /// machine's domain.
    pub fn run<'a>(&self, history: impl IntoIterator<Item = (&'a InputEvent, &'a InternalEvent)>) -> Option<usize> {
        let mut m = self.initial();
        for (x, e) in history {
            if !self.pattern(m, x)?.allows(e) {
                return None;
            }
            m = self.update(m, x, e)?;
        }
        Some(m)
    }
}

fn memory_name(m: usize) -> Symbol {
    Symbol::new(format!("m{m}")).expect("valid identifier")
}

/// Follows the strategy from the initial arena node, naming memory states
/// in discovery order.
pub fn realize_supervisor(arena: &GameArena, strategy: &Strategy) -> Result<SupervisorMachine> {
    if arena.is_losing(arena.initial()) {
        return Err(Error::NotWinning);
    }
    let automaton = arena.automaton();
    let mut memory: BTreeMap<usize, usize> = BTreeMap::from([(arena.initial(), 0)]);
    let mut order = vec![arena.initial()];
    let mut queue = VecDeque::from([arena.initial()]);
    let mut pattern = BTreeMap::new();
    let mut update = BTreeMap::new();
    while let Some(v) = queue.pop_front() {
        let m = memory[&v];
        for &s in arena.env_successors(v) {
            let t = *strategy
                .get(&s)
                .ok_or_else(|| Error::IncompleteStrategy(arena.node_name(Node::Sup(s))))?;
            let x = arena.input_of(s).clone();
            pattern.insert((m, x.clone()), arena.patterns()[t].clone());
            let p = arena.plant_node(s, t);
            for e in arena.plant_successors(p) {
                if arena.is_losing(e.target) {
                    return Err(Error::IncompleteStrategy(arena.node_name(Node::Plant(p))));
                }
                let next = *memory.entry(e.target).or_insert_with(|| {
                    order.push(e.target);
                    queue.push_back(e.target);
                    order.len() - 1
                });
                update.insert((m, x.clone(), e.event.clone()), next);
            }
        }
    }
    Ok(SupervisorMachine {
        states: (0..order.len()).map(memory_name).collect(),
        marked: order
            .iter()
            .map(|&v| automaton.is_marked(arena.env_nodes()[v].spec))
            .collect(),
        fingerprint: Some(arena.plant().fingerprint()),
        pattern,
        update,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupervisorDoc {
    kind: String,
    states: Vec<String>,
    initial: String,
    pattern: Vec<PatternDoc>,
    update: Vec<UpdateDoc>,
    #[serde(default)]
    marked: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fingerprint: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    state: String,
    input: EventRepr,
    enable: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdateDoc {
    state: String,
    input: EventRepr,
    event: String,
    to: String,
}

pub fn print_supervisor(sup: &SupervisorMachine) -> String {
    let name = |m: usize| sup.state_name(m).to_owned();
    let doc = SupervisorDoc {
        kind: "supervisor".into(),
        states: (0..sup.num_states()).map(name).collect(),
        initial: name(sup.initial()),
        pattern: sup
            .patterns()
            .map(|(m, x, p)| PatternDoc {
                state: name(m),
                input: EventRepr::from_set(&x.0),
                enable: p.enabled().iter().map(Symbol::to_string).collect(),
            })
            .collect(),
        update: sup
            .updates()
            .map(|(m, x, e, t)| UpdateDoc {
                state: name(m),
                input: EventRepr::from_set(&x.0),
                event: e.to_string(),
                to: name(t),
            })
            .collect(),
        marked: (0..sup.num_states()).filter(|&m| sup.is_marked(m)).map(name).collect(),
        fingerprint: sup.fingerprint.clone(),
    };
    to_canonical(&doc)
}

pub fn parse_supervisor(text: &str) -> Result<SupervisorMachine> {
    let kind = document_kind(text)?;
    if kind != "supervisor" {
        return Err(Error::Invalid(format!("expected a supervisor document, got kind `{kind}`")));
    }
    let doc: SupervisorDoc = serde_json::from_str(text).map_err(syntax)?;
    let mut states = Vec::new();
    for n in &doc.states {
        let s = Symbol::new(n.as_str())?;
        if states.contains(&s) {
            return Err(Error::Duplicate {
                kind: "memory state",
                name: n.clone(),
            });
        }
        states.push(s);
    }
    let lookup = |n: &str| {
        states.iter().position(|s| s.as_str() == n).ok_or_else(|| Error::Undeclared {
            kind: "memory state",
            name: n.to_owned(),
        })
    };
    if lookup(&doc.initial)? != 0 {
        return Err(Error::Invalid("the initial memory state must be listed first".into()));
    }
    let mut marked = vec![false; states.len()];
    for n in &doc.marked {
        marked[lookup(n)?] = true;
    }
    let mut pattern = BTreeMap::new();
    for p in &doc.pattern {
        let enabled = p
            .enable
            .iter()
            .map(|n| Symbol::new(n.as_str()))
            .collect::<Result<Vec<_>>>()?;
        let key = (lookup(&p.state)?, InputEvent(p.input.to_set()?));
        if pattern.insert(key, ControlPattern::new(enabled)).is_some() {
            return Err(Error::Duplicate {
                kind: "pattern entry",
                name: p.state.clone(),
            });
        }
    }
    let mut update = BTreeMap::new();
    for u in &doc.update {
        let key = (
            lookup(&u.state)?,
            InputEvent(u.input.to_set()?),
            InternalEvent::parse(&u.event)?,
        );
        if update.insert(key, lookup(&u.to)?).is_some() {
            return Err(Error::Duplicate {
                kind: "update entry",
                name: u.state.clone(),
            });
        }
    }
    Ok(SupervisorMachine {
        states,
        marked,
        fingerprint: doc.fingerprint,
        pattern,
        update,
    })
}
