use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::closed_loop::ClosedLoop;
use crate::error::{Error, Result};
use crate::game::ControlPattern;
use crate::lang::InputWord;
use crate::model::{InputEvent, InternalEvent, OutputEvent, StateId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvPolicy {
    /// Inputs drawn uniformly from the declared input events.
    Random,
    /// Inputs pushing the closed loop as far as possible from its
    /// product-marked states.
    Adversarial,
    /// A fixed input word; the trace stops when it runs out.
    Script(InputWord),
}

impl EnvPolicy {
    /// `random`, `adversarial` or `script:<input word>`.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "random" => Ok(EnvPolicy::Random),
            "adversarial" => Ok(EnvPolicy::Adversarial),
            _ => match text.strip_prefix("script:") {
                Some(word) => Ok(EnvPolicy::Script(crate::lang::parse_input_word(word)?)),
                None => Err(Error::Invalid(format!(
                    "unknown environment policy `{text}`; expected random, adversarial or script:<word>"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub input: InputEvent,
    pub pattern: ControlPattern,
    pub fired: InternalEvent,
    pub output: OutputEvent,
    /// Closed-loop state after the step.
    pub state: String,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "in={} pattern={} fired={} out={} state={}",
            self.input, self.pattern, self.fired, self.output, self.state
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Distance in steps to the nearest product-marked state.
fn marked_distance(cl: &ClosedLoop) -> Vec<usize> {
    let des = cl.des();
    let n = des.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (from, _, _, _, to) in des.transitions() {
        preds[to].push(from);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in (0..n).filter(|&s| cl.is_product_marked(s)) {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(s) = queue.pop_front() {
        for &p in &preds[s] {
            if dist[p] == usize::MAX {
                dist[p] = dist[s] + 1;
                queue.push_back(p);
            }
        }
    }
    dist
}

/// Runs the closed loop for at most `steps` steps. Internal choices are
/// uniform among the executable events the pattern enables, drawn from a
/// generator seeded with `seed`; the random policy draws its inputs from
/// the same generator.
pub fn simulate(cl: &ClosedLoop, policy: &EnvPolicy, steps: usize, seed: u64) -> Result<Trace> {
    let des = cl.des();
    if let EnvPolicy::Script(word) = policy {
        if let Some(x) = word.steps().iter().find(|x| des.input_index(x).is_none()) {
            return Err(Error::Undeclared {
                kind: "input event",
                name: x.to_string(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = matches!(policy, EnvPolicy::Adversarial).then(|| marked_distance(cl));
    let mut state = des.initial();
    let mut trace = Trace::default();
    for k in 0..steps {
        let input = match policy {
            EnvPolicy::Random => rng.gen_range(0..des.input_events().len()),
            EnvPolicy::Script(word) => match word.steps().get(k) {
                Some(x) => des.input_index(x).expect("checked above"),
                None => break,
            },
            EnvPolicy::Adversarial => {
                let dist = dist.as_ref().expect("computed for this policy");
                let worst = |i: usize| des.moves(state, i).map(|m| dist[m.target]).max();
                (0..des.input_events().len())
                    .max_by(|&a, &b| worst(a).cmp(&worst(b)).then(b.cmp(&a)))
                    .expect("at least one input event")
            }
        };
        let moves: Vec<_> = des.moves(state, input).collect();
        if moves.is_empty() {
            break;
        }
        let m = &moves[rng.gen_range(0..moves.len())];
        trace.steps.push(TraceStep {
            input: des.input_events()[input].clone(),
            pattern: cl.pattern(state, input).clone(),
            fired: m.event.clone(),
            output: m.output.clone(),
            state: des.state_name(m.target).to_owned(),
        });
        state = m.target;
    }
    Ok(trace)
}
