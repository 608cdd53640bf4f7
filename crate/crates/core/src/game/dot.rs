use std::fmt::Write;

use super::arena::{GameArena, Node};
use super::solve::GameSolution;

fn id(node: Node) -> String {
    match node {
        Node::Env(v) => format!("e{v}"),
        Node::Sup(s) => format!("s{s}"),
        Node::Plant(p) => format!("p{p}"),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of the arena. Environment nodes are circles,
/// supervisor nodes boxes, plant nodes diamonds.
pub fn export_dot(arena: &GameArena, solution: Option<&GameSolution>) -> String {
    let mut out = String::from("digraph arena {\n  rankdir=LR;\n");
    for node in arena.nodes() {
        let shape = match node {
            Node::Env(v) if arena.is_marked(v) => "doublecircle",
            Node::Env(_) => "circle",
            Node::Sup(_) => "box",
            Node::Plant(_) => "diamond",
        };
        let mut attrs = format!("shape={shape}, label=\"{}\"", escape(&arena.node_name(node)));
        if matches!(node, Node::Env(v) if arena.is_losing(v)) {
            attrs.push_str(", style=filled, fillcolor=red");
        } else if solution.is_some_and(|s| !s.contains(node)) {
            attrs.push_str(", style=dashed");
        }
        let _ = writeln!(out, "  {} [{attrs}];", id(node));
    }
    for v in 0..arena.env_nodes().len() {
        for &s in arena.env_successors(v) {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                id(Node::Env(v)),
                id(Node::Sup(s)),
                escape(&arena.input_of(s).to_string())
            );
        }
    }
    for s in 0..arena.sup_nodes().len() {
        let chosen = solution.and_then(|sol| sol.strategy.get(&s).copied());
        for (t, &p) in arena.sup_successors(s).iter().enumerate() {
            let bold = if chosen == Some(t) { ", style=bold" } else { "" };
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"{bold}];",
                id(Node::Sup(s)),
                id(Node::Plant(p)),
                escape(&arena.patterns()[t].to_string())
            );
        }
    }
    for p in 0..arena.plant_nodes().len() {
        for e in arena.plant_successors(p) {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}/{}\"];",
                id(Node::Plant(p)),
                id(Node::Env(e.target)),
                escape(&e.event.to_string()),
                escape(&e.output.to_string())
            );
        }
    }
    out.push_str("}\n");
    out
}
