//! Control patterns, the three-player arena and its solution.

mod arena;
mod dot;
mod pattern;
mod solve;

pub use arena::{
    build_arena, build_arena_capped, complete_to_safety_automaton, ArenaStats, EnvNode, GameArena, Node, PlantEdge,
    PlantNode, SupNode, DEFAULT_MAX_NODES,
};
pub use dot::export_dot;
pub use pattern::{control_patterns, control_patterns_capped, ControlPattern, DEFAULT_MAX_CONTROLLABLE};
pub use solve::{brute_force_solve, chosen_pattern, extract_strategy, solve, GameSolution, Strategy, BRUTE_FORCE_MAX_NODES};
