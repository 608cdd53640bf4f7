mod common;

use std::collections::BTreeSet;

use common::*;
use rdes::lang::{
    check_sequential_relation, enumerate_extended, io_language, is_prefix_closed, parse_input_word, prefix_closure,
    project, Axis, ExtendedWord, IoWord, Projection, RelationWitness, Step, Word,
};
use rdes::model::{InternalEvent, OpenDes, OutputEvent};
use rdes::Error;

fn step(xn: &str, e: &str, yn: &str) -> Step {
    Step {
        input: x(xn),
        event: ev(e),
        output: y(yn),
    }
}

/// Recursive unfolding of the extended language, written independently of
/// the library's breadth-first enumerator.
fn unfold(plant: &OpenDes, state: usize, prefix: &ExtendedWord, left: usize, marked: bool, out: &mut BTreeSet<ExtendedWord>) {
    if !marked || plant.is_marked(state) {
        out.insert(prefix.clone());
    }
    if left == 0 {
        return;
    }
    for (from, i, e, o, to) in plant.transitions() {
        if from == state {
            let s = Step {
                input: plant.input_events()[i].clone(),
                event: e.clone(),
                output: o.clone(),
            };
            unfold(plant, to, &prefix.pushed(s), left - 1, marked, out);
        }
    }
}

fn oracle(plant: &OpenDes, depth: usize, marked: bool) -> BTreeSet<ExtendedWord> {
    let mut out = BTreeSet::new();
    unfold(plant, plant.initial(), &Word::empty(), depth, marked, &mut out);
    out
}

#[test]
fn example1_extended_word() {
    let w: ExtendedWord = Word(vec![step("x1", "s1", "y1"), step("x1", "su", "y2")]);
    assert!(enumerate_extended(&fig1(), 2, false).unwrap().contains(&w));
    assert_eq!(w.project_xy(), io(&[("x1", "y1"), ("x1", "y2")]));
}

#[test]
fn projections_of_a_two_step_word() {
    let w: ExtendedWord = Word(vec![step("x1", "s1", "y1"), step("x2", "s2", "y1")]);
    assert_eq!(project(&w, Axis::X), Projection::X(Word(vec![x("x1"), x("x2")])));
    assert_eq!(project(&w, Axis::Y), Projection::Y(Word(vec![y("y1"), y("y1")])));
    assert_eq!(w.project_xp(), Word(vec![(x("x1"), ev("s1")), (x("x2"), ev("s2"))]));
    assert_eq!(w.project_xy(), io(&[("x1", "y1"), ("x2", "y1")]));
}

#[test]
fn projections_of_the_empty_word() {
    let w = ExtendedWord::empty();
    for axis in [Axis::X, Axis::Y, Axis::Xp, Axis::Xy] {
        let empty = match project(&w, axis) {
            Projection::X(p) => p.is_empty(),
            Projection::Y(p) => p.is_empty(),
            Projection::Xp(p) => p.is_empty(),
            Projection::Xy(p) => p.is_empty(),
        };
        assert!(empty, "{axis:?}");
    }
}

#[test]
fn silent_components_drop_from_concatenations_but_keep_positions() {
    let w: ExtendedWord = Word(vec![
        step("x1", "s1", "y1"),
        Step {
            input: x("x2"),
            event: InternalEvent::Stutter,
            output: OutputEvent::silent(),
        },
    ]);
    assert_eq!(w.project_y(), Word(vec![y("y1")]));
    assert_eq!(w.output_track().len(), 2);
    assert_eq!(w.project_xy().len(), 2);
}

#[test]
fn depth_zero_is_the_empty_word() {
    assert_eq!(enumerate_extended(&fig1(), 0, false).unwrap(), BTreeSet::from([Word::empty()]));
}

#[test]
fn depth_one_marked_on_fig1() {
    let m = enumerate_extended(&fig1(), 1, true).unwrap();
    assert!(m.contains(&Word(vec![step("x2", "s2", "y2")])));
    assert!(!m.contains(&Word(vec![step("x1", "s1", "y1")])));
    assert!(!m.contains(&Word::empty()));
}

#[test]
fn enumeration_matches_recursive_unfolding() {
    for plant in [fig1(), fig1().complete_inputs(), example3_plant(), fig2().complete_inputs()] {
        for depth in 0..=4 {
            for marked in [false, true] {
                assert_eq!(enumerate_extended(&plant, depth, marked).unwrap(), oracle(&plant, depth, marked));
            }
        }
    }
}

#[test]
fn depth_cap_is_a_resource_error() {
    assert!(matches!(enumerate_extended(&fig1(), 13, false), Err(Error::ResourceLimit { .. })));
}

#[test]
fn io_language_of_fig1() {
    let p = fig1();
    assert!(io_language(&p, 2, false).unwrap().contains(&io(&[("x1", "y1"), ("x1", "y2")])));
    let marked = io_language(&p, 2, true).unwrap();
    assert!(example3_k().is_subset(&marked));
    assert!(io_language(&p, 1, true).unwrap().contains(&io(&[("x2", "y2")])));
}

#[test]
fn io_language_is_the_projection_image() {
    let p = fig1().complete_inputs();
    let image: BTreeSet<IoWord> = enumerate_extended(&p, 3, false).unwrap().iter().map(|w| w.project_xy()).collect();
    assert_eq!(io_language(&p, 3, false).unwrap(), image);
}

#[test]
fn prefix_closure_unfolds_prefixes() {
    let w = io(&[("x1", "y1"), ("x2", "y1")]);
    let closed = prefix_closure(&BTreeSet::from([w.clone()]));
    assert_eq!(closed, BTreeSet::from([IoWord::empty(), io(&[("x1", "y1")]), w]));
    assert_eq!(prefix_closure(&closed), closed);
    assert!(is_prefix_closed(&closed));
    assert!(!is_prefix_closed(&example3_k()));
}

#[test]
fn fig1_io_language_is_prefix_closed() {
    assert!(is_prefix_closed(&io_language(&fig1().complete_inputs(), 3, false).unwrap()));
}

#[test]
fn completed_fig1_respects_the_sequential_relation() {
    let r = check_sequential_relation(&fig1().complete_inputs(), 3).unwrap();
    assert!(r.c1 && r.c2 && r.c3);
    assert_eq!(r.witness, None);
}

#[test]
fn skipping_completion_breaks_c1() {
    let r = check_sequential_relation(&fig1(), 3).unwrap();
    assert!(!r.c1);
    match r.witness {
        Some(RelationWitness::NoResponse(w)) => {
            assert!(!w.is_empty());
            // Oracle: no run of the uncompleted plant reads this input word.
            let runs = enumerate_extended(&fig1(), w.len(), false).unwrap();
            assert!(runs.iter().all(|r| r.input_track() != w));
        }
        other => panic!("expected a missing-response witness, got {other:?}"),
    }
}

#[test]
fn depth_zero_relation_is_vacuous() {
    let r = check_sequential_relation(&fig1(), 0).unwrap();
    assert!(r.c1 && r.c2 && r.c3);
}

#[test]
fn word_display_and_input_parsing() {
    let w: ExtendedWord = Word(vec![step("x1", "s1", "y1"), step("x1", "su", "y2")]);
    assert_eq!(w.to_string(), "({x1}|s1|{y1})({x1}|su|{y2})");
    assert_eq!(IoWord::empty().to_string(), "eps");
    assert_eq!(parse_input_word("{x1}{x1,x2}").unwrap(), Word(vec![x("x1"), rdes::model::InputEvent::of(&["x1", "x2"])]));
    assert!(parse_input_word("{x1").is_err());
}
