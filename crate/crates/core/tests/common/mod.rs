#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdes::lang::{IoWord, Word};
use rdes::model::{parse_plant, parse_spec, InputEvent, InternalEvent, OpenDes, OutputEvent, SpecTransducer};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

/// The four-state plant with inputs {x1}, {x1,x2}, {x2}.
pub fn fig1() -> OpenDes {
    parse_plant(&fixture_text("fig1_plant.json")).unwrap()
}

/// The same plant over inputs {x1}, {x2} only.
pub fn example3_plant() -> OpenDes {
    parse_plant(&fixture_text("example3_plant.json")).unwrap()
}

pub fn example3_spec() -> SpecTransducer {
    parse_spec(&fixture_text("example3_spec.json")).unwrap()
}

pub fn fig2() -> OpenDes {
    parse_plant(&fixture_text("fig2_plant.json")).unwrap()
}

pub fn x(n: &str) -> InputEvent {
    InputEvent::of(&[n])
}

pub fn y(n: &str) -> OutputEvent {
    OutputEvent::of(&[n])
}

pub fn ev(n: &str) -> InternalEvent {
    InternalEvent::named(n)
}

pub fn io(pairs: &[(&str, &str)]) -> IoWord {
    Word(pairs.iter().map(|(a, b)| (x(a), y(b))).collect())
}

/// The four length-2 words the example specification accepts.
pub fn example3_k() -> BTreeSet<IoWord> {
    BTreeSet::from([
        io(&[("x1", "y1"), ("x2", "y1")]),
        io(&[("x1", "y1"), ("x1", "y2")]),
        io(&[("x2", "y2"), ("x2", "y1")]),
        io(&[("x2", "y2"), ("x1", "y2")]),
    ])
}

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_states: usize,
    pub max_controllable: usize,
    pub max_uncontrollable: usize,
    /// Probability of adding an extra transition per (state, input, event).
    pub density: f64,
    pub allow_joint_input: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_states: 6,
            max_controllable: 3,
            max_uncontrollable: 1,
            density: 0.35,
            allow_joint_input: true,
        }
    }
}

fn output(rng: &mut ChaCha8Rng) -> OutputEvent {
    match rng.gen_range(0..7) {
        0 => OutputEvent::silent(),
        1..=3 => y("y1"),
        4..=5 => y("y2"),
        _ => OutputEvent::of(&["y1", "y2"]),
    }
}

/// A random plant in which every state is reachable. Not necessarily
/// input-enabled.
pub fn random_plant(seed: u64, cfg: GenConfig) -> OpenDes {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=cfg.max_states);
    let nc = rng.gen_range(0..=cfg.max_controllable);
    let nu = rng.gen_range(0..=cfg.max_uncontrollable);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let controllable: Vec<String> = (0..nc).map(|i| format!("c{i}")).collect();
    let uncontrollable: Vec<String> = (0..nu).map(|i| format!("u{i}")).collect();
    let mut inputs = vec![x("x1"), x("x2")];
    if cfg.allow_joint_input && rng.gen_bool(0.3) {
        inputs.push(InputEvent::of(&["x1", "x2"]));
    }
    let events: Vec<String> = controllable.iter().chain(&uncontrollable).cloned().collect();
    let mut used: BTreeSet<(usize, usize, String)> = BTreeSet::new();
    let mut edges: Vec<(usize, usize, String, OutputEvent, usize)> = Vec::new();
    if !events.is_empty() {
        for target in 1..n {
            let from = rng.gen_range(0..target);
            let i = rng.gen_range(0..inputs.len());
            let e = events.choose(&mut rng).unwrap().clone();
            if used.insert((from, i, e.clone())) {
                edges.push((from, i, e, output(&mut rng), target));
            }
        }
        for from in 0..n {
            for i in 0..inputs.len() {
                for e in &events {
                    if rng.gen_bool(cfg.density) && used.insert((from, i, e.clone())) {
                        edges.push((from, i, e.clone(), output(&mut rng), rng.gen_range(0..n)));
                    }
                }
            }
        }
    }
    let mut marked: Vec<String> = states.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    if marked.is_empty() {
        marked.push(states[rng.gen_range(0..n)].clone());
    }
    let mut b = OpenDes::builder()
        .input_alphabet(&["x1", "x2"])
        .output_alphabet(&["y1", "y2"])
        .controllable(&controllable)
        .uncontrollable(&uncontrollable)
        .states(&states)
        .initial("q0")
        .marked(&marked);
    for i in &inputs {
        b = b.input_event(i.clone());
    }
    for (from, i, e, out, to) in edges {
        b = b.transition(&states[from], inputs[i].clone(), &e, out, &states[to]);
    }
    let plant = b.build().unwrap();
    // A spanning edge is dropped when its key was already taken.
    if plant.validate().unreachable.is_empty() {
        plant
    } else {
        random_plant(seed.wrapping_add(0x9e37_79b9), cfg)
    }
}

/// A random input-complete specification over `inputs` with a non-empty
/// marked language.
pub fn random_spec(seed: u64, inputs: &[InputEvent], max_states: usize) -> SpecTransducer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1_e995);
    loop {
        let n = rng.gen_range(1..=max_states);
        let states: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
        let mut marked: Vec<String> = states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if marked.is_empty() {
            marked.push(states[rng.gen_range(0..n)].clone());
        }
        let mut b = SpecTransducer::builder().states(&states).initial("k0").marked(&marked);
        for s in &states {
            for x in inputs {
                let out = match rng.gen_range(0..8) {
                    0 => OutputEvent::silent(),
                    1..=3 => y("y1"),
                    4..=6 => y("y2"),
                    _ => OutputEvent::of(&["y1", "y2"]),
                };
                b = b.transition(s, x.clone(), out, &states[rng.gen_range(0..n)]);
            }
        }
        let spec = b.build().unwrap();
        if !spec.marked_language_is_empty(inputs) {
            return spec;
        }
    }
}

/// At most one transition per `(state, input, output)`.
pub fn is_io_deterministic(plant: &OpenDes) -> bool {
    let mut seen = BTreeSet::new();
    plant
        .transitions()
        .all(|(from, i, _, out, _)| seen.insert((from, i, out.clone())))
}

/// A specification shadowing one plant move per `(state, input)`. Outputs are perturbed with a small
/// probability and marking is thinned at random.
pub fn shadow_spec(seed: u64, plant: &OpenDes) -> SpecTransducer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2545_f491);
    let plant = plant.complete_inputs();
    let states: Vec<String> = (0..plant.num_states()).map(|s| format!("k{s}")).collect();
    let mut marked: Vec<String> = plant
        .marked()
        .iter()
        .filter(|_| rng.gen_bool(0.8))
        .map(|&s| states[s].clone())
        .collect();
    if marked.is_empty() {
        marked.push(states[*plant.marked().iter().next().unwrap()].clone());
    }
    let mut rows = Vec::new();
    for s in 0..plant.num_states() {
        for (i, x) in plant.input_events().iter().enumerate() {
            let moves: Vec<_> = plant.moves(s, i).collect();
            let m = moves.choose(&mut rng).unwrap();
            let out = if rng.gen_bool(0.1) { output(&mut rng) } else { m.output.clone() };
            rows.push((s, x.clone(), out, m.target));
        }
    }
    let build = |marked: &[String]| {
        let mut b = SpecTransducer::builder()
            .states(&states)
            .initial(&states[plant.initial()])
            .marked(marked);
        for (s, x, out, t) in &rows {
            b = b.transition(&states[*s], x.clone(), out.clone(), &states[*t]);
        }
        b.build().unwrap()
    };
    let spec = build(&marked);
    if !spec.marked_language_is_empty(plant.input_events()) {
        return spec;
    }
    marked.push(states[plant.initial()].clone());
    build(&marked)
}

/// A plant/spec pair from `seed`: half the specifications shadow the
/// plant, the rest are unrelated.
pub fn random_instance(seed: u64, cfg: GenConfig) -> (OpenDes, SpecTransducer) {
    let plant = random_plant(seed, cfg);
    let spec = if seed.is_multiple_of(2) {
        shadow_spec(seed, &plant)
    } else {
        random_spec(seed, plant.input_events(), 3)
    };
    (plant, spec)
}
