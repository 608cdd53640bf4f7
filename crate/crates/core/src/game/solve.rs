use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::arena::{GameArena, Node};
use super::pattern::ControlPattern;
use crate::error::{Error, Result};

/// Cap on arena size accepted by [`brute_force_solve`].
pub const BRUTE_FORCE_MAX_NODES: usize = 5000;

/// Pattern index chosen at each winning supervisor node.
pub type Strategy = BTreeMap<usize, usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSolution {
    pub env: Vec<bool>,
    pub sup: Vec<bool>,
    pub plant: Vec<bool>,
    pub strategy: Strategy,
    /// Outer safety/liveness rounds until stable.
    pub iterations: usize,
}

impl GameSolution {
    pub fn realizable(&self) -> bool {
        self.env[0]
    }

    pub fn contains(&self, node: Node) -> bool {
        match node {
            Node::Env(v) => self.env[v],
            Node::Sup(s) => self.sup[s],
            Node::Plant(p) => self.plant[p],
        }
    }

    pub fn winning_nodes(&self) -> BTreeSet<Node> {
        let env = (0..self.env.len()).filter(|&v| self.env[v]).map(Node::Env);
        let sup = (0..self.sup.len()).filter(|&s| self.sup[s]).map(Node::Sup);
        let plant = (0..self.plant.len()).filter(|&p| self.plant[p]).map(Node::Plant);
        env.chain(sup).chain(plant).collect()
    }

    pub fn num_winning(&self) -> usize {
        self.env.iter().chain(&self.sup).chain(&self.plant).filter(|w| **w).count()
    }
}

/// Largest set of nodes from which the supervisor keeps play away from
/// the sink forever while every environment node can still reach a marked
/// node inside the set.
pub fn solve(arena: &GameArena) -> GameSolution {
    let ne = arena.env_nodes().len();
    let ns = arena.sup_nodes().len();
    let np = arena.plant_nodes().len();

    // Predecessor lists for the counter-based attractor.
    let mut env_pred_sup = vec![0usize; ns];
    for v in 0..ne {
        for &s in arena.env_successors(v) {
            env_pred_sup[s] = v;
        }
    }
    let mut sup_of_plant = vec![0usize; np];
    for s in 0..ns {
        for &p in arena.sup_successors(s) {
            sup_of_plant[p] = s;
        }
    }
    let mut plant_pred: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for p in 0..np {
        for e in arena.plant_successors(p) {
            plant_pred[e.target].push(p);
        }
    }

    let mut alive: Vec<bool> = (0..ne).map(|v| !arena.is_losing(v)).collect();
    let mut iterations = 0;
    loop {
        iterations += 1;
        // Safety: remove everything attracted to dead environment nodes.
        let mut env = alive.clone();
        let mut sup = vec![true; ns];
        let mut plant: Vec<bool> = (0..np).map(|p| !arena.plant_successors(p).is_empty()).collect();
        let mut sup_good: Vec<usize> = (0..ns)
            .map(|s| arena.sup_successors(s).len())
            .collect();
        let mut queue: VecDeque<Node> = VecDeque::new();
        queue.extend((0..ne).filter(|&v| !env[v]).map(Node::Env));
        queue.extend((0..np).filter(|&p| !plant[p]).map(Node::Plant));
        while let Some(n) = queue.pop_front() {
            match n {
                Node::Env(v) => {
                    for &p in &plant_pred[v] {
                        if plant[p] {
                            plant[p] = false;
                            queue.push_back(Node::Plant(p));
                        }
                    }
                }
                Node::Plant(p) => {
                    let s = sup_of_plant[p];
                    sup_good[s] -= 1;
                    if sup_good[s] == 0 && sup[s] {
                        sup[s] = false;
                        queue.push_back(Node::Sup(s));
                    }
                }
                Node::Sup(s) => {
                    let v = env_pred_sup[s];
                    if env[v] {
                        env[v] = false;
                        queue.push_back(Node::Env(v));
                    }
                }
            }
        }

        // Cooperative liveness inside the safe region.
        let mut live = vec![false; ne];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for v in 0..ne {
            if env[v] && arena.is_marked(v) {
                live[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &p in &plant_pred[v] {
                if !plant[p] {
                    continue;
                }
                let s = sup_of_plant[p];
                let u = env_pred_sup[s];
                if env[u] && !live[u] {
                    live[u] = true;
                    queue.push_back(u);
                }
            }
        }
        let mut changed = false;
        for v in 0..ne {
            if alive[v] && !(env[v] && live[v]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            let mut solution = GameSolution {
                env,
                sup,
                plant,
                strategy: Strategy::new(),
                iterations,
            };
            solution.strategy = strategy_for(arena, &solution);
            return solution;
        }
    }
}

fn strategy_for(arena: &GameArena, solution: &GameSolution) -> Strategy {
    (0..arena.sup_nodes().len())
        .filter(|&s| solution.sup[s])
        .filter_map(|s| {
            arena
                .sup_successors(s)
                .iter()
                .position(|&p| solution.plant[p])
                .map(|t| (s, t))
        })
        .collect()
}

/// Positional strategy choosing the largest winning pattern at every
/// winning supervisor node.
pub fn extract_strategy(arena: &GameArena, solution: &GameSolution) -> Result<Strategy> {
    if !solution.realizable() {
        return Err(Error::NotWinning);
    }
    Ok(strategy_for(arena, solution))
}

/// The pattern chosen at `sup`, if any.
pub fn chosen_pattern<'a>(arena: &'a GameArena, strategy: &Strategy, sup: usize) -> Option<&'a ControlPattern> {
    strategy.get(&sup).map(|&t| &arena.patterns()[t])
}

/// Reference solver by bounded value iteration over explicit node sets.
///
/// `safe_h` holds the nodes from which the supervisor avoids the sink and
/// deadlock for `h` more rounds; `reach_h` the nodes within `h` rounds of
/// a marked node inside the current region. Both are iterated for up to
/// `|nodes|·(|Θ|+1)` rounds, and the outer loop shrinks the region until
/// neither changes.
pub fn brute_force_solve(arena: &GameArena) -> Result<BTreeSet<Node>> {
    let all: Vec<Node> = arena.nodes().collect();
    if all.len() > BRUTE_FORCE_MAX_NODES {
        return Err(Error::resource("brute-force arena nodes", BRUTE_FORCE_MAX_NODES));
    }
    let horizon = all.len() * (arena.patterns().len() + 1);
    let mut region: BTreeSet<Node> = all
        .iter()
        .copied()
        .filter(|n| !matches!(n, Node::Env(v) if arena.is_losing(*v)))
        .collect();
    loop {
        let mut safe = region.clone();
        for _ in 0..horizon {
            let next: BTreeSet<Node> = safe
                .iter()
                .copied()
                .filter(|&n| {
                    let succ = arena.successors(n);
                    match n {
                        Node::Env(_) => succ.iter().all(|m| safe.contains(m)),
                        Node::Sup(_) => succ.iter().any(|m| safe.contains(m)),
                        Node::Plant(_) => !succ.is_empty() && succ.iter().all(|m| safe.contains(m)),
                    }
                })
                .collect();
            if next == safe {
                break;
            }
            safe = next;
        }
        let mut reach: BTreeSet<Node> = safe
            .iter()
            .copied()
            .filter(|n| matches!(n, Node::Env(v) if arena.is_marked(*v)))
            .collect();
        for _ in 0..horizon {
            let mut next = reach.clone();
            for &n in &safe {
                if arena.successors(n).iter().any(|m| reach.contains(m)) {
                    next.insert(n);
                }
            }
            if next == reach {
                break;
            }
            reach = next;
        }
        let kept: BTreeSet<Node> = safe
            .iter()
            .copied()
            .filter(|n| !matches!(n, Node::Env(_)) || reach.contains(n))
            .collect();
        if kept == region {
            return Ok(region);
        }
        region = kept;
    }
}
