use super::closed_loop::{compose, verify_specification, ClosedLoop, VerificationReport};
use super::machine::{realize_supervisor, SupervisorMachine};
use crate::conditions::{check_closedness, check_output_controllability, CheckVerdict, Mode};
use crate::error::{Error, Result};
use crate::game::{build_arena_capped, solve, ArenaStats, GameArena, GameSolution, DEFAULT_MAX_NODES};
use crate::model::{OpenDes, SafetyAutomaton, SpecTransducer};

/// Depth of the enumeration cross-check run during verification.
pub const VERIFY_DEPTH: usize = 4;

#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub max_nodes: usize,
    pub verify_depth: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            max_nodes: DEFAULT_MAX_NODES,
            verify_depth: VERIFY_DEPTH,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub controllable_literal: CheckVerdict,
    pub controllable_local: CheckVerdict,
    pub closed: CheckVerdict,
    pub stats: ArenaStats,
    pub winning: usize,
    pub verification: Option<VerificationReport>,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub realizable: bool,
    /// The input-completed plant everything below refers to.
    pub plant: OpenDes,
    pub arena: GameArena,
    pub solution: GameSolution,
    pub supervisor: Option<SupervisorMachine>,
    pub closed_loop: Option<ClosedLoop>,
    pub report: SynthesisReport,
}

pub fn synthesize(plant: &OpenDes, spec: &SpecTransducer) -> Result<SynthesisResult> {
    synthesize_with(plant, spec, &SynthesisOptions::default())
}

/// Validation, input completion, the condition checks, game solving and,
/// when the initial node is winning, supervisor realization and closed-loop
/// verification.
pub fn synthesize_with(plant: &OpenDes, spec: &SpecTransducer, options: &SynthesisOptions) -> Result<SynthesisResult> {
    let validation = plant.validate();
    if !validation.unreachable.is_empty() {
        return Err(Error::Validation(format!(
            "unreachable states: {}",
            validation.unreachable.join(", ")
        )));
    }
    if !validation.partition_violations.is_empty() {
        return Err(Error::Validation(validation.partition_violations.join("; ")));
    }
    let plant = plant.complete_inputs();
    let automaton = SafetyAutomaton::new(spec, plant.input_events())?;
    if automaton.initial().is_bottom() {
        return Err(Error::EmptySpecification);
    }
    let controllable_literal = check_output_controllability(&plant, spec, Mode::Literal)?;
    let controllable_local = check_output_controllability(&plant, spec, Mode::Local)?;
    let closed = check_closedness(&plant, spec)?;

    let arena = build_arena_capped(&plant, &automaton, options.max_nodes)?;
    let solution = solve(&arena);
    let realizable = solution.realizable();
    let (supervisor, closed_loop, verification) = if realizable {
        let sup = realize_supervisor(&arena, &solution.strategy)?;
        let cl = compose(&plant, &sup)?;
        let report = verify_specification(&cl, spec, options.verify_depth)?;
        (Some(sup), Some(cl), Some(report))
    } else {
        (None, None, None)
    };
    let report = SynthesisReport {
        controllable_literal,
        controllable_local,
        closed,
        stats: arena.stats(),
        winning: solution.num_winning(),
        verification,
    };
    Ok(SynthesisResult {
        realizable,
        plant,
        arena,
        solution,
        supervisor,
        closed_loop,
        report,
    })
}
