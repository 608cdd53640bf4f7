use std::collections::{HashMap, VecDeque};

use super::pattern::{control_patterns, ControlPattern};
use crate::error::{Error, Result};
use crate::model::{AkState, InputEvent, InternalEvent, OpenDes, OutputEvent, SafetyAutomaton, SpecTransducer, StateId};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

/// Completes the transducer over the plant's declared input events.
pub fn complete_to_safety_automaton(spec: &SpecTransducer, inputs: &[InputEvent]) -> Result<SafetyAutomaton> {
    SafetyAutomaton::new(spec, inputs)
}

/// An environment node: a state of the product `P ∥ A_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnvNode {
    pub plant: StateId,
    pub spec: AkState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Env(usize),
    Sup(usize),
    Plant(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupNode {
    pub env: usize,
    pub input: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantNode {
    pub sup: usize,
    pub pattern: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantEdge {
    pub event: InternalEvent,
    pub output: OutputEvent,
    pub target: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ArenaStats {
    pub env_nodes: usize,
    pub sup_nodes: usize,
    pub plant_nodes: usize,
    pub edges: usize,
    pub losing: usize,
    pub marked: usize,
}

/// The three-player arena over the reachable part of `P ∥ A_K`.
///
/// Environment nodes whose specification component is the sink are losing
/// and are not expanded.
#[derive(Debug, Clone)]
pub struct GameArena {
    plant: OpenDes,
    automaton: SafetyAutomaton,
    patterns: Vec<ControlPattern>,
    env: Vec<EnvNode>,
    sup: Vec<SupNode>,
    plant_nodes: Vec<PlantNode>,
    env_succ: Vec<Vec<usize>>,
    sup_succ: Vec<Vec<usize>>,
    plant_succ: Vec<Vec<PlantEdge>>,
    marked: Vec<bool>,
}

impl GameArena {
    pub fn plant(&self) -> &OpenDes {
        &self.plant
    }

    pub fn automaton(&self) -> &SafetyAutomaton {
        &self.automaton
    }

    pub fn patterns(&self) -> &[ControlPattern] {
        &self.patterns
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn env_nodes(&self) -> &[EnvNode] {
        &self.env
    }

    pub fn sup_nodes(&self) -> &[SupNode] {
        &self.sup
    }

    pub fn plant_nodes(&self) -> &[PlantNode] {
        &self.plant_nodes
    }

    /// Supervisor nodes of `env`, one per declared input event, in order.
    pub fn env_successors(&self, env: usize) -> &[usize] {
        &self.env_succ[env]
    }

    /// Plant nodes of `sup`, one per pattern, in pattern order.
    pub fn sup_successors(&self, sup: usize) -> &[usize] {
        &self.sup_succ[sup]
    }

    /// Plant moves of a plant node, in canonical event order.
    pub fn plant_successors(&self, plant: usize) -> &[PlantEdge] {
        &self.plant_succ[plant]
    }

    pub fn is_losing(&self, env: usize) -> bool {
        self.env[env].spec.is_bottom()
    }

    pub fn is_marked(&self, env: usize) -> bool {
        self.marked[env]
    }

    pub fn input_of(&self, sup: usize) -> &InputEvent {
        &self.plant.input_events()[self.sup[sup].input]
    }

    pub fn pattern_of(&self, plant: usize) -> &ControlPattern {
        &self.patterns[self.plant_nodes[plant].pattern]
    }

    /// The supervisor node reached from `env` under `input`.
    pub fn sup_node(&self, env: usize, input: usize) -> Option<usize> {
        self.env_succ[env].get(input).copied()
    }

    /// The plant node reached from `sup` under the pattern with index `pattern`.
    pub fn plant_node(&self, sup: usize, pattern: usize) -> usize {
        self.sup_succ[sup][pattern]
    }

    pub fn num_nodes(&self) -> usize {
        self.env.len() + self.sup.len() + self.plant_nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.env_succ.iter().map(Vec::len).sum::<usize>()
            + self.sup_succ.iter().map(Vec::len).sum::<usize>()
            + self.plant_succ.iter().map(Vec::len).sum::<usize>()
    }

    pub fn stats(&self) -> ArenaStats {
        ArenaStats {
            env_nodes: self.env.len(),
            sup_nodes: self.sup.len(),
            plant_nodes: self.plant_nodes.len(),
            edges: self.num_edges(),
            losing: (0..self.env.len()).filter(|&v| self.is_losing(v)).count(),
            marked: self.marked.iter().filter(|m| **m).count(),
        }
    }

    pub fn env_name(&self, env: usize) -> String {
        let v = self.env[env];
        format!(
            "({},{})",
            self.plant.state_name(v.plant),
            self.automaton.state_name(v.spec)
        )
    }

    pub fn node_name(&self, node: Node) -> String {
        match node {
            Node::Env(v) => self.env_name(v),
            Node::Sup(s) => format!("({},{})", self.env_name(self.sup[s].env), self.input_of(s)),
            Node::Plant(p) => {
                let n = &self.plant_nodes[p];
                let s = &self.sup[n.sup];
                format!(
                    "({},{},{})",
                    self.env_name(s.env),
                    self.input_of(n.sup),
                    self.patterns[n.pattern]
                )
            }
        }
    }

    /// Successors of any node, as nodes.
    pub fn successors(&self, node: Node) -> Vec<Node> {
        match node {
            Node::Env(v) => self.env_succ[v].iter().map(|&s| Node::Sup(s)).collect(),
            Node::Sup(s) => self.sup_succ[s].iter().map(|&p| Node::Plant(p)).collect(),
            Node::Plant(p) => self.plant_succ[p].iter().map(|e| Node::Env(e.target)).collect(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.env.len())
            .map(Node::Env)
            .chain((0..self.sup.len()).map(Node::Sup))
            .chain((0..self.plant_nodes.len()).map(Node::Plant))
    }
}

/// Builds the arena by forward exploration from `(q_p0, q_k0)`.
pub fn build_arena(plant: &OpenDes, automaton: &SafetyAutomaton) -> Result<GameArena> {
    build_arena_capped(plant, automaton, DEFAULT_MAX_NODES)
}

pub fn build_arena_capped(plant: &OpenDes, automaton: &SafetyAutomaton, max_nodes: usize) -> Result<GameArena> {
    if automaton.inputs() != plant.input_events() {
        return Err(Error::Mismatch(
            "safety automaton and plant declare different input events".into(),
        ));
    }
    let patterns = control_patterns(plant)?;
    let mut arena = GameArena {
        plant: plant.clone(),
        automaton: automaton.clone(),
        patterns,
        env: Vec::new(),
        sup: Vec::new(),
        plant_nodes: Vec::new(),
        env_succ: Vec::new(),
        sup_succ: Vec::new(),
        plant_succ: Vec::new(),
        marked: Vec::new(),
    };
    let mut index: HashMap<EnvNode, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut count = 0usize;
    let start = EnvNode {
        plant: plant.initial(),
        spec: automaton.initial(),
    };
    add_env(&mut arena, &mut index, &mut queue, start, &mut count, max_nodes)?;
    while let Some(v) = queue.pop_front() {
        let node = arena.env[v];
        if node.spec.is_bottom() {
            continue;
        }
        for (i, x) in plant.input_events().iter().enumerate() {
            count += 1 + arena.patterns.len();
            if count > max_nodes {
                return Err(Error::resource("arena nodes", max_nodes));
            }
            let s = arena.sup.len();
            arena.sup.push(SupNode { env: v, input: i });
            arena.sup_succ.push(Vec::new());
            arena.env_succ[v].push(s);
            let moves: Vec<_> = plant.moves(node.plant, i).collect();
            for t in 0..arena.patterns.len() {
                let pattern = arena.patterns[t].clone();
                let mut edges = Vec::new();
                for m in moves.iter().filter(|m| pattern.allows(&m.event)) {
                    let target = EnvNode {
                        plant: m.target,
                        spec: automaton.step(node.spec, x, &m.output),
                    };
                    let id = add_env(&mut arena, &mut index, &mut queue, target, &mut count, max_nodes)?;
                    edges.push(PlantEdge {
                        event: m.event.clone(),
                        output: m.output.clone(),
                        target: id,
                    });
                }
                let p = arena.plant_nodes.len();
                arena.plant_nodes.push(PlantNode { sup: s, pattern: t });
                arena.plant_succ.push(edges);
                arena.sup_succ[s].push(p);
            }
        }
    }
    Ok(arena)
}

fn add_env(
    arena: &mut GameArena,
    index: &mut HashMap<EnvNode, usize>,
    queue: &mut VecDeque<usize>,
    node: EnvNode,
    count: &mut usize,
    max_nodes: usize,
) -> Result<usize> {
    if let Some(&id) = index.get(&node) {
        return Ok(id);
    }
    *count += 1;
    if *count > max_nodes {
        return Err(Error::resource("arena nodes", max_nodes));
    }
    let id = arena.env.len();
    arena.env.push(node);
    arena.env_succ.push(Vec::new());
    let marked = arena.plant.is_marked(node.plant) && arena.automaton.is_marked(node.spec);
    arena.marked.push(marked);
    index.insert(node, id);
    queue.push_back(id);
    Ok(id)
}
