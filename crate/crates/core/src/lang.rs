//! Words, projections and bounded enumeration of plant languages.
//!
//! Every enumeration here is depth-bounded and returns sets ordered
//! shortest-first, then lexicographically by canonical event order, so
//! printed output is stable.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{InputEvent, InternalEvent, OpenDes, OutputEvent, SpecTransducer, StateId, EPS};

/// Default cap on enumeration depth.
pub const DEFAULT_MAX_DEPTH: usize = 12;

/// A finite word. Ordered shortlex: shorter words first, then lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word<S>(pub Vec<S>);

impl<S> Default for Word<S> {
    fn default() -> Self {
        Word(Vec::new())
    }
}

impl<S: Ord> PartialOrd for Word<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Ord> Ord for Word<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl<S> Word<S> {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[S] {
        &self.0
    }
}

impl<S: Clone> Word<S> {
    pub fn prefix(&self, n: usize) -> Self {
        Word(self.0[..n].to_vec())
    }

    pub fn pushed(&self, step: S) -> Self {
        let mut v = self.0.clone();
        v.push(step);
        Word(v)
    }
}

impl<S> FromIterator<S> for Word<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// One step of an extended word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub input: InputEvent,
    pub event: InternalEvent,
    pub output: OutputEvent,
}

pub type ExtendedWord = Word<Step>;
pub type IoWord = Word<(InputEvent, OutputEvent)>;
pub type XpWord = Word<(InputEvent, InternalEvent)>;
pub type InputWord = Word<InputEvent>;
pub type OutputWord = Word<OutputEvent>;

/// Printing of a single word position.
pub trait StepFormat {
    fn fmt_step(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

impl StepFormat for Step {
    fn fmt_step(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{}|{})", self.input, self.event, self.output)
    }
}

impl StepFormat for (InputEvent, OutputEvent) {
    fn fmt_step(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.0, self.1)
    }
}

impl StepFormat for (InputEvent, InternalEvent) {
    fn fmt_step(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.0, self.1)
    }
}

impl StepFormat for InputEvent {
    fn fmt_step(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl StepFormat for OutputEvent {
    fn fmt_step(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl StepFormat for InternalEvent {
    fn fmt_step(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// The empty word prints as `eps`.
impl<S: StepFormat> fmt::Display for Word<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(EPS);
        }
        for s in &self.0 {
            s.fmt_step(f)?;
        }
        Ok(())
    }
}

/// Parses an input word written as `{x1}{x1,x2}eps...`, or `eps` alone for
/// the empty word.
pub fn parse_input_word(text: &str) -> Result<InputWord> {
    let mut rest = text.trim();
    if rest == EPS || rest.is_empty() {
        return Ok(Word::empty());
    }
    let mut out = Vec::new();
    while !rest.is_empty() {
        if let Some(tail) = rest.strip_prefix(EPS) {
            out.push(InputEvent::silent());
            rest = tail.trim_start();
        } else if rest.starts_with('{') {
            let end = rest
                .find('}')
                .ok_or_else(|| Error::Invalid(format!("unterminated input event in `{text}`")))?;
            out.push(InputEvent::parse(&rest[..=end])?);
            rest = rest[end + 1..].trim_start();
        } else {
            return Err(Error::Invalid(format!("cannot parse input word `{text}`")));
        }
    }
    Ok(Word(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Xp,
    Xy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    X(InputWord),
    Y(OutputWord),
    Xp(XpWord),
    Xy(IoWord),
}

impl ExtendedWord {
    /// Input track with silent inputs dropped.
    pub fn project_x(&self) -> InputWord {
        self.0.iter().filter(|s| !s.input.is_silent()).map(|s| s.input.clone()).collect()
    }

    /// Output track with silent outputs dropped.
    pub fn project_y(&self) -> OutputWord {
        self.0.iter().filter(|s| !s.output.is_silent()).map(|s| s.output.clone()).collect()
    }

    pub fn project_xp(&self) -> XpWord {
        self.0.iter().map(|s| (s.input.clone(), s.event.clone())).collect()
    }

    pub fn project_xy(&self) -> IoWord {
        self.0.iter().map(|s| (s.input.clone(), s.output.clone())).collect()
    }

    /// Positional input track: silent inputs keep their position.
    pub fn input_track(&self) -> InputWord {
        self.0.iter().map(|s| s.input.clone()).collect()
    }

    /// Positional output track.
    pub fn output_track(&self) -> OutputWord {
        self.0.iter().map(|s| s.output.clone()).collect()
    }

    pub fn internal_track(&self) -> Word<InternalEvent> {
        self.0.iter().map(|s| s.event.clone()).collect()
    }
}

impl IoWord {
    pub fn project_y(&self) -> OutputWord {
        self.0.iter().filter(|(_, y)| !y.is_silent()).map(|(_, y)| y.clone()).collect()
    }
}

pub fn project(word: &ExtendedWord, axis: Axis) -> Projection {
    match axis {
        Axis::X => Projection::X(word.project_x()),
        Axis::Y => Projection::Y(word.project_y()),
        Axis::Xp => Projection::Xp(word.project_xp()),
        Axis::Xy => Projection::Xy(word.project_xy()),
    }
}

fn check_depth(depth: usize, max_depth: usize) -> Result<()> {
    if depth > max_depth {
        return Err(Error::resource(format!("enumeration depth {depth}"), max_depth));
    }
    Ok(())
}

/// All runs of length at most `depth`, paired with the state they end in.
pub fn enumerate_runs(plant: &OpenDes, depth: usize, max_depth: usize) -> Result<Vec<(ExtendedWord, StateId)>> {
    check_depth(depth, max_depth)?;
    let mut all = vec![(Word::empty(), plant.initial())];
    let mut frontier = all.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, s) in &frontier {
            for (i, x) in plant.input_events().iter().enumerate() {
                for m in plant.moves(*s, i) {
                    let step = Step {
                        input: x.clone(),
                        event: m.event,
                        output: m.output,
                    };
                    next.push((w.pushed(step), m.target));
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(all)
}

/// Words of the extended language of length at most `depth`; with
/// `marked_only`, those whose run ends in a marked state.
pub fn enumerate_extended(plant: &OpenDes, depth: usize, marked_only: bool) -> Result<BTreeSet<ExtendedWord>> {
    enumerate_extended_capped(plant, depth, marked_only, DEFAULT_MAX_DEPTH)
}

pub fn enumerate_extended_capped(
    plant: &OpenDes,
    depth: usize,
    marked_only: bool,
    max_depth: usize,
) -> Result<BTreeSet<ExtendedWord>> {
    Ok(enumerate_runs(plant, depth, max_depth)?
        .into_iter()
        .filter(|(_, s)| !marked_only || plant.is_marked(*s))
        .map(|(w, _)| w)
        .collect())
}

/// The input/output image of [`enumerate_extended`].
pub fn io_language(plant: &OpenDes, depth: usize, marked_only: bool) -> Result<BTreeSet<IoWord>> {
    Ok(enumerate_extended(plant, depth, marked_only)?
        .iter()
        .map(ExtendedWord::project_xy)
        .collect())
}

pub fn prefix_closure<S: Ord + Clone>(lang: &BTreeSet<Word<S>>) -> BTreeSet<Word<S>> {
    let mut out = BTreeSet::new();
    for w in lang {
        for n in 0..=w.len() {
            out.insert(w.prefix(n));
        }
    }
    out
}

/// Shortest word of `lang` with a prefix outside `lang`, if any.
pub fn prefix_closure_violation<S: Ord + Clone>(lang: &BTreeSet<Word<S>>) -> Option<Word<S>> {
    lang.iter()
        .find(|w| (0..w.len()).any(|n| !lang.contains(&w.prefix(n))))
        .cloned()
}

pub fn is_prefix_closed<S: Ord + Clone>(lang: &BTreeSet<Word<S>>) -> bool {
    prefix_closure_violation(lang).is_none()
}

/// Input/output words produced by the transducer on input words over
/// `inputs` of length at most `depth`; with `marked_only`, the marked ones.
pub fn spec_language(spec: &SpecTransducer, inputs: &[InputEvent], depth: usize, marked_only: bool) -> BTreeSet<IoWord> {
    spec_words(spec, inputs, depth, |q| !marked_only || spec.is_marked(q))
}

/// Words of the prefix closure of `K` of length at most `depth`: the
/// produced words ending in a state from which a marked state is reachable.
pub fn spec_prefix_language(spec: &SpecTransducer, inputs: &[InputEvent], depth: usize) -> BTreeSet<IoWord> {
    let live = spec.coaccessible(inputs);
    spec_words(spec, inputs, depth, |q| live[q])
}

fn spec_words(spec: &SpecTransducer, inputs: &[InputEvent], depth: usize, keep: impl Fn(usize) -> bool) -> BTreeSet<IoWord> {
    let mut out = BTreeSet::new();
    let mut frontier = vec![(IoWord::empty(), spec.initial())];
    for level in 0..=depth {
        let mut next = Vec::new();
        for (w, q) in &frontier {
            if keep(*q) {
                out.insert(w.clone());
            }
            if level == depth {
                continue;
            }
            for x in inputs {
                if let Some((y, t)) = spec.step(*q, x) {
                    next.push((w.pushed((x.clone(), y.clone())), t));
                }
            }
        }
        frontier = next;
    }
    out
}

/// First failing condition of the sequential input-output relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationWitness {
    /// An input word with no run.
    NoResponse(InputWord),
    /// A run whose positional input and output tracks differ in length.
    LengthMismatch(ExtendedWord),
    /// A word of the I/O language whose prefix is missing from it.
    NotPrefixClosed(IoWord),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub witness: Option<RelationWitness>,
}

/// Checks the three sequential-relation conditions on words up to `depth`.
pub fn check_sequential_relation(plant: &OpenDes, depth: usize) -> Result<RelationReport> {
    check_depth(depth, DEFAULT_MAX_DEPTH)?;

    // C1 by subset construction over input words, shortest failure first.
    let mut c1_witness = None;
    let mut frontier: BTreeMap<InputWord, BTreeSet<StateId>> =
        BTreeMap::from([(Word::empty(), BTreeSet::from([plant.initial()]))]);
    let mut seen: BTreeSet<BTreeSet<StateId>> = BTreeSet::new();
    'levels: for _ in 0..depth {
        let mut next = BTreeMap::new();
        for (w, states) in &frontier {
            if !seen.insert(states.clone()) {
                continue;
            }
            for (i, x) in plant.input_events().iter().enumerate() {
                let succ: BTreeSet<StateId> = states
                    .iter()
                    .flat_map(|&s| plant.moves(s, i).map(|m| m.target))
                    .collect();
                let w2 = w.pushed(x.clone());
                if succ.is_empty() {
                    c1_witness = Some(w2);
                    break 'levels;
                }
                next.entry(w2).or_insert(succ);
            }
        }
        frontier = next;
    }

    let runs = enumerate_runs(plant, depth, DEFAULT_MAX_DEPTH)?;
    let c2_witness = runs
        .iter()
        .find(|(w, _)| w.input_track().len() != w.output_track().len())
        .map(|(w, _)| w.clone());
    let io: BTreeSet<IoWord> = runs.iter().map(|(w, _)| w.project_xy()).collect();
    let c3_witness = prefix_closure_violation(&io);

    let witness = c1_witness
        .clone()
        .map(RelationWitness::NoResponse)
        .or_else(|| c2_witness.clone().map(RelationWitness::LengthMismatch))
        .or_else(|| c3_witness.clone().map(RelationWitness::NotPrefixClosed));
    Ok(RelationReport {
        c1: c1_witness.is_none(),
        c2: c2_witness.is_none(),
        c3: c3_witness.is_none(),
        witness,
    })
}
