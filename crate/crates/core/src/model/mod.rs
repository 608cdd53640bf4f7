//! Alphabets, events, the open plant, specification transducers and the
//! model file format.

pub mod event;
pub mod format;
pub mod plant;
pub mod spec;

pub use event::{Controllability, EventSet, InputEvent, InternalEvent, OutputEvent, Symbol, EPS};
pub use format::{parse_model, parse_plant, parse_spec, print_model, print_plant, print_spec, Model};
pub use plant::{Move, OpenDes, PlantBuilder, StateId, ValidationReport};
pub use spec::{AkState, SafetyAutomaton, SpecBuilder, SpecTransducer};
