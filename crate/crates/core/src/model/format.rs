//! The JSON model format and its canonical printer.
//!
//! Canonical output lists object keys in schema order, sorts arrays, and
//! indents by two spaces. Arrays of scalars, and objects whose values are all
//! scalars or such arrays, are written on one line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::event::{EventSet, InputEvent, InternalEvent, OutputEvent, Symbol, EPS};
use super::plant::OpenDes;
use super::spec::SpecTransducer;
use crate::error::{Error, Result};

/// An event payload in a document: `"eps"` or a list of symbol names.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum EventRepr {
    Set(Vec<String>),
    Word(String),
}

impl EventRepr {
    pub(crate) fn to_set(&self) -> Result<EventSet> {
        match self {
            EventRepr::Word(w) if w == EPS => Ok(EventSet::silent()),
            EventRepr::Word(w) => Err(Error::Invalid(format!(
                "expected `{EPS}` or a list of names, got `{w}`"
            ))),
            EventRepr::Set(names) => {
                let mut syms = Vec::with_capacity(names.len());
                for n in names {
                    syms.push(Symbol::new(n.as_str())?);
                }
                let set = EventSet::from_symbols(syms);
                if set.symbols().count() != names.len() {
                    return Err(Error::Invalid(format!("repeated name in event {names:?}")));
                }
                Ok(set)
            }
        }
    }

    pub(crate) fn from_set(set: &EventSet) -> Self {
        if set.is_silent() {
            EventRepr::Word(EPS.into())
        } else {
            EventRepr::Set(set.symbols().map(|s| s.to_string()).collect())
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlantDoc {
    kind: String,
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    input_events: Vec<EventRepr>,
    controllable: Vec<String>,
    uncontrollable: Vec<String>,
    states: Vec<String>,
    initial: String,
    marked: Vec<String>,
    transitions: Vec<PlantTransitionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlantTransitionDoc {
    from: String,
    inputs: Vec<EventRepr>,
    event: String,
    output: EventRepr,
    to: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    kind: String,
    states: Vec<String>,
    initial: String,
    marked: Vec<String>,
    transitions: Vec<SpecTransitionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecTransitionDoc {
    from: String,
    input: EventRepr,
    output: EventRepr,
    to: String,
}

/// A parsed model document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Plant(OpenDes),
    Spec(SpecTransducer),
}

pub(crate) fn syntax(err: serde_json::Error) -> Error {
    Error::Syntax {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Reads the `kind` discriminator of a document.
pub(crate) fn document_kind(text: &str) -> Result<String> {
    let value: Value = serde_json::from_str(text).map_err(syntax)?;
    value
        .get("kind")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| Error::Syntax {
            line: 1,
            column: 1,
            message: "document has no string field `kind`".into(),
        })
}

pub fn parse_model(text: &str) -> Result<Model> {
    match document_kind(text)?.as_str() {
        "plant" => parse_plant(text).map(Model::Plant),
        "spec" => parse_spec(text).map(Model::Spec),
        other => Err(Error::Invalid(format!("unknown model kind `{other}`"))),
    }
}

pub fn parse_plant(text: &str) -> Result<OpenDes> {
    let doc: PlantDoc = serde_json::from_str(text).map_err(syntax)?;
    if doc.kind != "plant" {
        return Err(Error::Invalid(format!("expected kind `plant`, got `{}`", doc.kind)));
    }
    let mut b = OpenDes::builder()
        .input_alphabet(&doc.input_alphabet)
        .output_alphabet(&doc.output_alphabet)
        .controllable(&doc.controllable)
        .uncontrollable(&doc.uncontrollable)
        .states(&doc.states)
        .initial(&doc.initial)
        .marked(&doc.marked);
    for ev in &doc.input_events {
        b = b.input_event(InputEvent(ev.to_set()?));
    }
    for t in &doc.transitions {
        if t.inputs.is_empty() {
            return Err(Error::Invalid(format!("transition from `{}` lists no inputs", t.from)));
        }
        let output = OutputEvent(t.output.to_set()?);
        for x in &t.inputs {
            b = b.transition(&t.from, InputEvent(x.to_set()?), &t.event, output.clone(), &t.to);
        }
    }
    b.build()
}

pub fn parse_spec(text: &str) -> Result<SpecTransducer> {
    let doc: SpecDoc = serde_json::from_str(text).map_err(syntax)?;
    if doc.kind != "spec" {
        return Err(Error::Invalid(format!("expected kind `spec`, got `{}`", doc.kind)));
    }
    let mut b = SpecTransducer::builder()
        .states(&doc.states)
        .initial(&doc.initial)
        .marked(&doc.marked);
    for t in &doc.transitions {
        b = b.transition(
            &t.from,
            InputEvent(t.input.to_set()?),
            OutputEvent(t.output.to_set()?),
            &t.to,
        );
    }
    b.build()
}

fn names<'a>(it: impl IntoIterator<Item = &'a Symbol>) -> Vec<String> {
    it.into_iter().map(|s| s.to_string()).collect()
}

/// `(from, event, output, to)` of one printed transition entry.
type Row<'a> = (usize, &'a InternalEvent, &'a OutputEvent, usize);

pub fn print_plant(plant: &OpenDes) -> String {
    // Edges sharing (from, event, output, to) are merged into one entry.
    let mut grouped: BTreeMap<(usize, &InternalEvent, &OutputEvent, usize), Vec<&InputEvent>> = BTreeMap::new();
    for (from, input, event, output, to) in plant.transitions() {
        grouped
            .entry((from, event, output, to))
            .or_default()
            .push(&plant.input_events()[input]);
    }
    let mut entries: Vec<(Vec<&InputEvent>, Row)> =
        grouped.into_iter().map(|(k, mut v)| {
            v.sort();
            (v, k)
        }).collect();
    entries.sort_by(|(ia, (fa, ea, oa, ta)), (ib, (fb, eb, ob, tb))| {
        (fa, ia, ea, oa, ta).cmp(&(fb, ib, eb, ob, tb))
    });
    let transitions = entries
        .into_iter()
        .map(|(inputs, (from, event, output, to))| PlantTransitionDoc {
            from: plant.state_name(from).to_owned(),
            inputs: inputs.into_iter().map(|x| EventRepr::from_set(&x.0)).collect(),
            event: event.to_string(),
            output: EventRepr::from_set(&output.0),
            to: plant.state_name(to).to_owned(),
        })
        .collect();
    let doc = PlantDoc {
        kind: "plant".into(),
        input_alphabet: names(plant.input_alphabet()),
        output_alphabet: names(plant.output_alphabet()),
        input_events: plant.input_events().iter().map(|x| EventRepr::from_set(&x.0)).collect(),
        controllable: names(plant.controllable()),
        uncontrollable: names(plant.uncontrollable()),
        states: (0..plant.num_states()).map(|s| plant.state_name(s).to_owned()).collect(),
        initial: plant.state_name(plant.initial()).to_owned(),
        marked: plant.marked().iter().map(|&s| plant.state_name(s).to_owned()).collect(),
        transitions,
    };
    to_canonical(&doc)
}

pub fn print_spec(spec: &SpecTransducer) -> String {
    let doc = SpecDoc {
        kind: "spec".into(),
        states: (0..spec.num_states()).map(|s| spec.state_name(s).to_owned()).collect(),
        initial: spec.state_name(spec.initial()).to_owned(),
        marked: spec.marked().iter().map(|&s| spec.state_name(s).to_owned()).collect(),
        transitions: spec
            .transitions()
            .map(|(from, input, output, to)| SpecTransitionDoc {
                from: spec.state_name(from).to_owned(),
                input: EventRepr::from_set(&input.0),
                output: EventRepr::from_set(&output.0),
                to: spec.state_name(to).to_owned(),
            })
            .collect(),
    };
    to_canonical(&doc)
}

pub fn print_model(model: &Model) -> String {
    match model {
        Model::Plant(p) => print_plant(p),
        Model::Spec(s) => print_spec(s),
    }
}

/// Serializes any value through the canonical printer.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable document");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn is_inline(v: &Value) -> bool {
    match v {
        Value::Array(items) => items
            .iter()
            .all(|i| is_scalar(i) || matches!(i, Value::Array(inner) if inner.iter().all(is_scalar))),
        Value::Object(map) => map.values().all(|i| is_scalar(i) || is_inline_array(i)),
        _ => true,
    }
}

fn is_inline_array(v: &Value) -> bool {
    matches!(v, Value::Array(_)) && is_inline(v)
}

fn write_inline(out: &mut String, v: &Value) {
    match v {
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_inline(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: ", Value::String(k.clone()));
                write_inline(out, item);
            }
            out.push('}');
        }
        scalar => {
            let _ = write!(out, "{scalar}");
        }
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, indent + 2);
                let _ = write!(out, "{}: ", Value::String(k.clone()));
                if is_scalar(item) || is_inline_array(item) {
                    write_inline(out, item);
                } else {
                    write_value(out, item, indent + 2);
                }
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
        Value::Array(items) if !items.is_empty() && !is_inline(v) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 2);
                if is_inline(item) {
                    write_inline(out, item);
                } else {
                    write_value(out, item, indent + 2);
                }
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        other => write_inline(out, other),
    }
}
