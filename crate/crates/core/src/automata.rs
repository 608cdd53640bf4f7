//! Small nondeterministic automata with silent moves, and a joint
//! subset-construction search used to decide language equalities exactly.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::lang::Word;

/// Cap on the number of joint subset states a single search may visit.
pub const MAX_SUBSET_STATES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct Nfa<L> {
    initial: Vec<usize>,
    accepting: Vec<bool>,
    edges: Vec<Vec<(Option<L>, usize)>>,
}

impl<L> Default for Nfa<L> {
    fn default() -> Self {
        Nfa {
            initial: Vec::new(),
            accepting: Vec::new(),
            edges: Vec::new(),
        }
    }
}

type StateSet = Vec<usize>;

impl<L: Ord + Clone> Nfa<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.accepting.push(accepting);
        self.edges.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn add_initial(&mut self, state: usize) {
        self.initial.push(state);
    }

    /// `None` is a silent move.
    pub fn add_edge(&mut self, from: usize, label: Option<L>, to: usize) {
        self.edges[from].push((label, to));
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn labels(&self) -> BTreeSet<L> {
        self.edges
            .iter()
            .flatten()
            .filter_map(|(l, _)| l.clone())
            .collect()
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> StateSet {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = Vec::new();
        for s in seeds {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for (l, t) in &self.edges[s] {
                if l.is_none() && !seen[*t] {
                    seen[*t] = true;
                    stack.push(*t);
                }
            }
        }
        (0..seen.len()).filter(|&s| seen[s]).collect()
    }

    fn start(&self) -> StateSet {
        self.closure(self.initial.iter().copied())
    }

    fn step(&self, set: &StateSet, label: &L) -> StateSet {
        let targets: Vec<usize> = set
            .iter()
            .flat_map(|&s| {
                self.edges[s]
                    .iter()
                    .filter(move |(l, _)| l.as_ref() == Some(label))
                    .map(|(_, t)| *t)
            })
            .collect();
        self.closure(targets)
    }

    fn accepts_set(&self, set: &StateSet) -> bool {
        set.iter().any(|&s| self.accepting[s])
    }

    pub fn accepts(&self, word: &[L]) -> bool {
        let mut set = self.start();
        for l in word {
            set = self.step(&set, l);
        }
        self.accepts_set(&set)
    }
}

/// Shortlex-least word `w` such that `target(acc)` holds, where `acc[i]`
/// tells whether `nfas[i]` accepts `w`. Searches the joint determinized
/// product breadth-first with labels in ascending order.
pub fn shortest_word<L: Ord + Clone>(
    nfas: &[&Nfa<L>],
    target: impl Fn(&[bool]) -> bool,
) -> Result<Option<Word<L>>> {
    let labels: Vec<L> = nfas
        .iter()
        .flat_map(|n| n.labels())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let start: Vec<StateSet> = nfas.iter().map(|n| n.start()).collect();
    let mut index: HashMap<Vec<StateSet>, usize> = HashMap::new();
    let mut parent: Vec<Option<(usize, usize)>> = Vec::new();
    let mut nodes: Vec<Vec<StateSet>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(start.clone(), 0);
    nodes.push(start);
    parent.push(None);
    queue.push_back(0);
    while let Some(id) = queue.pop_front() {
        let acc: Vec<bool> = nfas
            .iter()
            .zip(&nodes[id])
            .map(|(n, s)| n.accepts_set(s))
            .collect();
        if target(&acc) {
            let mut word = Vec::new();
            let mut cur = id;
            while let Some((p, l)) = parent[cur] {
                word.push(labels[l].clone());
                cur = p;
            }
            word.reverse();
            return Ok(Some(Word(word)));
        }
        for (li, l) in labels.iter().enumerate() {
            let next: Vec<StateSet> = nfas
                .iter()
                .zip(&nodes[id])
                .map(|(n, s)| n.step(s, l))
                .collect();
            if index.contains_key(&next) {
                continue;
            }
            if nodes.len() >= MAX_SUBSET_STATES {
                return Err(Error::resource("subset construction states", MAX_SUBSET_STATES));
            }
            index.insert(next.clone(), nodes.len());
            nodes.push(next);
            parent.push(Some((id, li)));
            queue.push_back(nodes.len() - 1);
        }
    }
    Ok(None)
}
