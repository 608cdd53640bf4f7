//! Supervisor realization, closed-loop composition, verification and
//! simulation.

mod closed_loop;
mod machine;
mod simulate;
mod synth;

pub use closed_loop::{
    check_nonblocking, compose, verify_specification, ClosedLoop, EqualityVerdict, Marking, NonblockingVerdict,
    VerificationReport,
};
pub use machine::{parse_supervisor, print_supervisor, realize_supervisor, SupervisorMachine};
pub use simulate::{simulate, EnvPolicy, Trace, TraceStep};
pub use synth::{synthesize, synthesize_with, SynthesisOptions, SynthesisReport, SynthesisResult, VERIFY_DEPTH};
