mod common;

use std::collections::{BTreeSet, VecDeque};

use common::*;
use rdes::game::{
    brute_force_solve, build_arena, build_arena_capped, chosen_pattern, complete_to_safety_automaton,
    control_patterns, control_patterns_capped, export_dot, extract_strategy, solve, ControlPattern, GameArena, Node,
};
use rdes::model::{AkState, OpenDes, SafetyAutomaton, SpecTransducer, Symbol};
use rdes::Error;

fn pattern(names: &[&str]) -> ControlPattern {
    ControlPattern::new(names.iter().map(|n| Symbol::new(*n).unwrap()))
}

fn example_arena() -> GameArena {
    let plant = example3_plant().complete_inputs();
    let ak = complete_to_safety_automaton(&example3_spec(), plant.input_events()).unwrap();
    build_arena(&plant, &ak).unwrap()
}

fn env_named(arena: &GameArena, name: &str) -> usize {
    (0..arena.env_nodes().len())
        .find(|&v| arena.env_name(v) == name)
        .unwrap_or_else(|| panic!("no env node {name}"))
}

fn sup_at(arena: &GameArena, env: usize, input: &str) -> usize {
    let i = arena.plant().input_index(&x(input)).unwrap();
    arena.sup_node(env, i).unwrap()
}

fn pattern_index(arena: &GameArena, p: &ControlPattern) -> usize {
    arena.patterns().iter().position(|q| q == p).unwrap()
}

/// Events the chosen pattern lets fire at a supervisor node.
fn executable(arena: &GameArena, sup: usize, p: &ControlPattern) -> BTreeSet<String> {
    let node = arena.plant_node(sup, pattern_index(arena, p));
    arena.plant_successors(node).iter().map(|e| e.event.to_string()).collect()
}

/// Searches positional strategies, assigning a pattern to each supervisor
/// node the first time a play meets it, for one that keeps every play out
/// of the sink and off deadlocks and leaves a marked node reachable from
/// every reachable environment node.
fn some_strategy_wins(arena: &GameArena) -> bool {
    type Closure = (BTreeSet<usize>, Vec<(usize, usize)>);

    fn closure(arena: &GameArena, assign: &[Option<usize>]) -> Result<Closure, usize> {
        let mut envs = BTreeSet::from([arena.initial()]);
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([arena.initial()]);
        while let Some(v) = queue.pop_front() {
            for &s in arena.env_successors(v) {
                let Some(t) = assign[s] else {
                    return Err(s);
                };
                for e in arena.plant_successors(arena.plant_node(s, t)) {
                    edges.push((v, e.target));
                    if envs.insert(e.target) {
                        queue.push_back(e.target);
                    }
                }
            }
        }
        Ok((envs, edges))
    }

    fn search(arena: &GameArena, assign: &mut Vec<Option<usize>>) -> bool {
        match closure(arena, assign) {
            Err(open) => {
                for t in 0..arena.patterns().len() {
                    let p = arena.plant_node(open, t);
                    if arena.plant_successors(p).is_empty() {
                        continue;
                    }
                    if arena.plant_successors(p).iter().any(|e| arena.is_losing(e.target)) {
                        continue;
                    }
                    assign[open] = Some(t);
                    if search(arena, assign) {
                        return true;
                    }
                }
                assign[open] = None;
                false
            }
            Ok((envs, edges)) => {
                if envs.iter().any(|&v| arena.is_losing(v)) {
                    return false;
                }
                let mut live: BTreeSet<usize> = envs.iter().copied().filter(|&v| arena.is_marked(v)).collect();
                loop {
                    let before = live.len();
                    for &(a, b) in &edges {
                        if live.contains(&b) {
                            live.insert(a);
                        }
                    }
                    if live.len() == before {
                        break;
                    }
                }
                live.len() == envs.len()
            }
        }
    }

    if arena.is_losing(arena.initial()) {
        return false;
    }
    search(arena, &mut vec![None; arena.sup_nodes().len()])
}

#[test]
fn fig1_control_patterns() {
    let theta = control_patterns(&fig1()).unwrap();
    assert_eq!(
        theta,
        vec![
            pattern(&["s1", "s2", "su"]),
            pattern(&["s1", "su"]),
            pattern(&["s2", "su"]),
            pattern(&["su"]),
        ]
    );
    assert!(theta.iter().all(|t| t.allows(&ev("su"))));
    assert!(theta.iter().all(|t| t.allows(&rdes::model::InternalEvent::Stutter)));
}

#[test]
fn pattern_counts_for_small_alphabets() {
    assert_eq!(control_patterns(&fig2()).unwrap().len(), 4);
    let only_uc = OpenDes::builder()
        .input_alphabet(&["x1"])
        .output_alphabet(&["y1"])
        .input_event(x("x1"))
        .uncontrollable(&["u"])
        .states(&["q0"])
        .initial("q0")
        .build()
        .unwrap();
    assert_eq!(control_patterns(&only_uc).unwrap(), vec![pattern(&["u"])]);
    let one = OpenDes::builder()
        .input_alphabet(&["x1"])
        .output_alphabet(&["y1"])
        .input_event(x("x1"))
        .controllable(&["a"])
        .states(&["q0"])
        .initial("q0")
        .build()
        .unwrap();
    assert_eq!(control_patterns(&one).unwrap(), vec![pattern(&["a"]), pattern(&[])]);
}

#[test]
fn pattern_cap_is_a_resource_error() {
    match control_patterns_capped(&fig1(), 1) {
        Err(Error::ResourceLimit { limit: 1, hint, .. }) => assert!(hint.contains("group")),
        other => panic!("expected a resource limit, got {other:?}"),
    }
}

#[test]
fn safety_automaton_on_example3() {
    let inputs = [x("x1"), x("x2")];
    let ak = complete_to_safety_automaton(&example3_spec(), &inputs).unwrap();
    let k = example3_spec();
    let q0 = ak.initial();
    assert_eq!(ak.step(q0, &x("x1"), &y("y2")), AkState::Bottom);
    assert_eq!(ak.step(q0, &x("x1"), &y("y1")), AkState::Spec(k.state_id("ka").unwrap()));
    for xi in &inputs {
        for yi in [y("y1"), y("y2"), rdes::model::OutputEvent::silent()] {
            assert_eq!(ak.step(AkState::Bottom, xi, &yi), AkState::Bottom);
        }
    }
    // Runs end outside the sink exactly on prefixes of K.
    for w in example3_k() {
        assert!(ak.is_marked(ak.run(w.steps().iter().map(|(a, b)| (a, b)))));
    }
}

#[test]
fn safety_automaton_rejects_incomplete_spec() {
    let joint = rdes::model::InputEvent::of(&["x1", "x2"]);
    assert!(matches!(
        complete_to_safety_automaton(&example3_spec(), &[x("x1"), joint]),
        Err(Error::SpecNotInputComplete { .. })
    ));
}

#[test]
fn example3_arena_edges() {
    let a = example_arena();
    let g0 = a.initial();
    assert_eq!(a.env_name(g0), "(q0,k0)");
    let s = sup_at(&a, g0, "x1");
    assert_eq!(a.sup_nodes()[s].env, g0);
    assert_eq!(a.input_of(s), &x("x1"));

    let theta1 = pattern(&["s1", "su"]);
    let p = a.plant_node(s, pattern_index(&a, &theta1));
    let to: Vec<_> = a.plant_successors(p).iter().map(|e| (e.event.to_string(), a.env_name(e.target))).collect();
    assert_eq!(to, [("s1".to_owned(), "(q1,ka)".to_owned())]);

    let theta2 = pattern(&["s2", "su"]);
    let p = a.plant_node(s, pattern_index(&a, &theta2));
    let e = &a.plant_successors(p)[0];
    assert_eq!(e.event, ev("s2"));
    assert!(a.is_losing(e.target));
}

#[test]
fn arena_is_tripartite_and_patterns_filter_events() {
    let a = example_arena();
    for node in a.nodes() {
        for succ in a.successors(node) {
            let ok = matches!(
                (node, succ),
                (Node::Env(_), Node::Sup(_)) | (Node::Sup(_), Node::Plant(_)) | (Node::Plant(_), Node::Env(_))
            );
            assert!(ok, "{node:?} -> {succ:?}");
        }
    }
    for p in 0..a.plant_nodes().len() {
        let theta = a.pattern_of(p);
        assert!(a.plant_successors(p).iter().all(|e| theta.allows(&e.event)));
    }
    // Losing nodes are not expanded; every other node offers every input.
    for v in 0..a.env_nodes().len() {
        let n = a.env_successors(v).len();
        assert_eq!(n, if a.is_losing(v) { 0 } else { a.plant().input_events().len() });
    }
}

#[test]
fn arena_statistics_of_example3() {
    let st = example_arena().stats();
    assert_eq!((st.env_nodes, st.sup_nodes, st.plant_nodes), (8, 10, 40));
    assert_eq!((st.edges, st.losing, st.marked), (90, 3, 2));
}

#[test]
fn arena_node_cap() {
    let plant = example3_plant().complete_inputs();
    let ak = SafetyAutomaton::new(&example3_spec(), plant.input_events()).unwrap();
    assert!(matches!(build_arena_capped(&plant, &ak, 10), Err(Error::ResourceLimit { .. })));
}

#[test]
fn example3_is_winning_and_reaches_marked_nodes() {
    let a = example_arena();
    let sol = solve(&a);
    assert!(sol.realizable());
    let marked: BTreeSet<String> = (0..a.env_nodes().len())
        .filter(|&v| a.is_marked(v))
        .map(|v| a.env_name(v))
        .collect();
    assert_eq!(marked, BTreeSet::from(["(q2,kf2)".to_owned(), "(q3,kf3)".to_owned()]));
    for v in 0..a.env_nodes().len() {
        assert!(!(a.is_losing(v) && sol.env[v]));
    }
    assert_eq!(sol.num_winning(), 37);
    assert_eq!(brute_force_solve(&a).unwrap(), sol.winning_nodes());
}

#[test]
fn example3_strategy_matches_the_worked_example() {
    let a = example_arena();
    let sol = solve(&a);
    let strategy = extract_strategy(&a, &sol).unwrap();
    let g0 = a.initial();
    let q1 = env_named(&a, "(q1,ka)");
    let q2 = env_named(&a, "(q2,kb)");
    let cases = [(g0, "x1", &["s1"][..]), (g0, "x2", &["s2"]), (q1, "x1", &["su"]), (q2, "x2", &["su"]), (q1, "x2", &["s2"])];
    for (env, input, expected) in cases {
        let s = sup_at(&a, env, input);
        let theta = chosen_pattern(&a, &strategy, s).unwrap();
        let want: BTreeSet<String> = expected.iter().map(|e| e.to_string()).collect();
        assert_eq!(executable(&a, s, theta), want, "{} {input}", a.env_name(env));
        // The largest winning pattern is chosen.
        let t = strategy[&s];
        assert!((0..t).all(|u| !sol.plant[a.plant_node(s, u)]));
    }
}

#[test]
fn losing_supervisor_nodes_have_no_strategy() {
    let a = example_arena();
    let sol = solve(&a);
    let strategy = extract_strategy(&a, &sol).unwrap();
    for s in 0..a.sup_nodes().len() {
        assert_eq!(strategy.contains_key(&s), sol.sup[s]);
    }
}

#[test]
fn strategy_plays_stay_winning_and_can_reach_marked() {
    let a = example_arena();
    let sol = solve(&a);
    let strategy = extract_strategy(&a, &sol).unwrap();
    let mut seen = BTreeSet::from([a.initial()]);
    let mut queue = VecDeque::from([a.initial()]);
    let mut edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        assert!(sol.env[v] && !a.is_losing(v));
        for &s in a.env_successors(v) {
            assert!(sol.sup[s]);
            let p = a.plant_node(s, strategy[&s]);
            assert!(!a.plant_successors(p).is_empty());
            for e in a.plant_successors(p) {
                edges.push((v, e.target));
                if seen.insert(e.target) {
                    queue.push_back(e.target);
                }
            }
        }
    }
    let mut live: BTreeSet<usize> = seen.iter().copied().filter(|&v| a.is_marked(v)).collect();
    while let Some(&(from, _)) = edges.iter().find(|(f, t)| live.contains(t) && !live.contains(f)) {
        live.insert(from);
    }
    assert_eq!(live, seen);
}

#[test]
fn extract_strategy_requires_a_winning_initial_node() {
    let plant = example3_plant().complete_inputs();
    let k = SpecTransducer::builder()
        .states(&["k0", "k1"])
        .initial("k0")
        .marked(&["k1"])
        .transition("k0", x("x1"), y("y2"), "k1")
        .transition("k0", x("x2"), y("y1"), "k1")
        .transition("k1", x("x1"), y("y1"), "k1")
        .transition("k1", x("x2"), y("y1"), "k1")
        .build()
        .unwrap();
    let ak = SafetyAutomaton::new(&k, plant.input_events()).unwrap();
    let a = build_arena(&plant, &ak).unwrap();
    let sol = solve(&a);
    assert!(!sol.realizable());
    assert_eq!(extract_strategy(&a, &sol), Err(Error::NotWinning));
}

#[test]
fn single_marked_node_wins_everything() {
    let plant = OpenDes::builder()
        .input_alphabet(&["x1"])
        .output_alphabet(&["y1"])
        .input_event(x("x1"))
        .controllable(&["a"])
        .states(&["q0"])
        .initial("q0")
        .marked(&["q0"])
        .transition("q0", x("x1"), "a", y("y1"), "q0")
        .build()
        .unwrap();
    let k = SpecTransducer::builder()
        .states(&["k0"])
        .initial("k0")
        .marked(&["k0"])
        .transition("k0", x("x1"), y("y1"), "k0")
        .build()
        .unwrap();
    let ak = SafetyAutomaton::new(&k, plant.input_events()).unwrap();
    let a = build_arena(&plant, &ak).unwrap();
    let sol = solve(&a);
    // The pattern disabling `a` deadlocks, so only that plant node loses.
    let all: BTreeSet<Node> = a.nodes().collect();
    let dead: BTreeSet<Node> = (0..a.plant_nodes().len())
        .filter(|&p| a.plant_successors(p).is_empty())
        .map(Node::Plant)
        .collect();
    assert_eq!(dead.len(), 1);
    let expected: BTreeSet<Node> = all.difference(&dead).copied().collect();
    assert_eq!(sol.winning_nodes(), expected);
    assert_eq!(brute_force_solve(&a).unwrap(), expected);
}

#[test]
fn losing_initial_node_wins_nothing() {
    let plant = example3_plant().complete_inputs();
    let empty = SpecTransducer::builder()
        .states(&["k0"])
        .initial("k0")
        .transition("k0", x("x1"), y("y1"), "k0")
        .transition("k0", x("x2"), y("y1"), "k0")
        .build()
        .unwrap();
    let ak = SafetyAutomaton::new(&empty, plant.input_events()).unwrap();
    let a = build_arena(&plant, &ak).unwrap();
    assert_eq!(a.env_nodes().len(), 1);
    assert!(a.is_losing(a.initial()));
    assert!(solve(&a).winning_nodes().is_empty());
    assert!(brute_force_solve(&a).unwrap().is_empty());
}

#[test]
fn solver_agrees_with_strategy_search() {
    let cfg = GenConfig {
        max_states: 3,
        max_controllable: 2,
        max_uncontrollable: 1,
        density: 0.4,
        allow_joint_input: false,
    };
    let mut realizable = 0;
    for seed in 0..150u64 {
        let (plant, spec) = random_instance(seed, cfg);
        let plant = plant.complete_inputs();
        let ak = SafetyAutomaton::new(&spec, plant.input_events()).unwrap();
        let a = build_arena(&plant, &ak).unwrap();
        let sol = solve(&a);
        assert_eq!(sol.realizable(), some_strategy_wins(&a), "seed {seed}");
        realizable += usize::from(sol.realizable());
    }
    assert!(realizable > 10, "only {realizable} realizable instances");
}

#[test]
fn executable_equivalent_patterns_share_successors() {
    let a = example_arena();
    let sol = solve(&a);
    for s in 0..a.sup_nodes().len() {
        for (t, &p) in a.sup_successors(s).iter().enumerate() {
            for (u, &q) in a.sup_successors(s).iter().enumerate() {
                let (bigger, smaller) = (&a.patterns()[t], &a.patterns()[u]);
                let same_exec = executable(&a, s, bigger) == executable(&a, s, smaller);
                if sol.plant[p] && sol.plant[q] && smaller.is_subset(bigger) && same_exec {
                    assert_eq!(a.plant_successors(p), a.plant_successors(q));
                }
            }
        }
    }
}

#[test]
fn dot_export_shapes_and_strategy() {
    let a = example_arena();
    let plain = export_dot(&a, None);
    let count = |text: &str, needle: &str| text.matches(needle).count();
    let circles = count(&plain, "shape=circle") + count(&plain, "shape=doublecircle");
    assert_eq!(circles, a.env_nodes().len());
    assert_eq!(count(&plain, "shape=box"), a.sup_nodes().len());
    assert_eq!(count(&plain, "shape=diamond"), a.plant_nodes().len());
    assert_eq!(count(&plain, "fillcolor=red"), a.stats().losing);
    assert_eq!(count(&plain, "shape=doublecircle"), a.stats().marked);
    assert_eq!(count(&plain, "style=bold"), 0);
    assert_eq!(count(&plain, " -> "), a.num_edges());

    let sol = solve(&a);
    let solved = export_dot(&a, Some(&sol));
    assert_eq!(count(&solved, "style=bold"), sol.strategy.len());
    assert_eq!(solved, export_dot(&a, Some(&sol)));
    let dashed = a.nodes().filter(|&n| !sol.contains(n) && !matches!(n, Node::Env(v) if a.is_losing(v))).count();
    assert_eq!(count(&solved, "style=dashed"), dashed);
}
