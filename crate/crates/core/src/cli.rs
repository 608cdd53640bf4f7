//! The `rdes` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::conditions::{check_closedness, check_output_controllability, CheckVerdict, Mode};
use crate::error::{Error, Result};
use crate::game::{build_arena_capped, export_dot, solve, DEFAULT_MAX_NODES};
use crate::lang::{enumerate_extended, io_language, DEFAULT_MAX_DEPTH};
use crate::model::format::{document_kind, to_canonical};
use crate::model::{parse_model, parse_plant, parse_spec, print_model, Model, OpenDes, SafetyAutomaton};
use crate::supervisor::{
    compose, parse_supervisor, print_supervisor, simulate, synthesize_with, EnvPolicy, EqualityVerdict,
    SynthesisOptions, SynthesisResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the arena node cap.
pub const MAX_NODES_VAR: &str = "RDES_MAX_NODES";

#[derive(Debug, Parser)]
#[command(name = "rdes", version, about = "Reactive supervisor synthesis for open discrete-event systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Literal,
    Local,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a model or supervisor and report validation problems.
    Validate { model: PathBuf },
    /// Check output controllability and closedness.
    Check {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
    },
    /// Synthesize a supervisor.
    Synth {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Write the supervisor here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the solved arena as DOT here.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Depth of the enumeration cross-check.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Print a model canonically, or the solved arena of a plant and spec.
    Export {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        /// Specification, required for `--format dot`.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Enumerate the plant's language up to a depth.
    Enum {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        marked: bool,
        /// Print input/output words.
        #[arg(long, conflicts_with = "extended")]
        io: bool,
        /// Print extended words (the default).
        #[arg(long)]
        extended: bool,
    },
    /// Simulate the closed loop.
    Simulate {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        sup: PathBuf,
        /// `random`, `adversarial` or `script:<input word>`.
        #[arg(long, default_value = "random")]
        env: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn max_nodes() -> Result<usize> {
    match std::env::var(MAX_NODES_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("{MAX_NODES_VAR} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_NODES),
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth > DEFAULT_MAX_DEPTH {
        return Err(Error::resource(format!("depth {depth}"), DEFAULT_MAX_DEPTH));
    }
    Ok(())
}

/// Runs the command line on `args` (program name first) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Invalid(format!("cannot write output: {e}")))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { model } => validate(&read(&model)?, out),
        Command::Check { plant, spec, mode } => {
            let plant = parse_plant(&read(&plant)?)?.complete_inputs();
            let spec = parse_spec(&read(&spec)?)?;
            let modes: &[Mode] = match mode {
                ModeArg::Literal => &[Mode::Literal],
                ModeArg::Local => &[Mode::Local],
                ModeArg::Both => &[Mode::Literal, Mode::Local],
            };
            let mut verdicts = Vec::new();
            for &m in modes {
                verdicts.push((
                    format!("output_controllable_{m}"),
                    check_output_controllability(&plant, &spec, m)?,
                ));
            }
            verdicts.push(("closed".to_owned(), check_closedness(&plant, &spec)?));
            let ok = verdicts.iter().all(|(_, v)| v.holds);
            let mut report = Map::new();
            report.insert("kind".into(), json!("check"));
            report.insert("method".into(), json!(verdicts[0].1.method.to_string()));
            report.extend(conditions_json(&verdicts));
            emit(out, &to_canonical(&Value::Object(report)))?;
            Ok(if ok { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Synth {
            plant,
            spec,
            out: sup_path,
            dot,
            depth,
        } => {
            check_depth(depth)?;
            let plant = parse_plant(&read(&plant)?)?;
            let spec = parse_spec(&read(&spec)?)?;
            let options = SynthesisOptions {
                max_nodes: max_nodes()?,
                verify_depth: depth,
            };
            let result = synthesize_with(&plant, &spec, &options)?;
            if let (Some(path), Some(sup)) = (&sup_path, &result.supervisor) {
                write_file(path, &print_supervisor(sup))?;
            }
            if let Some(path) = &dot {
                write_file(path, &export_dot(&result.arena, Some(&result.solution)))?;
            }
            emit(out, &to_canonical(&synthesis_json(&result)))?;
            Ok(if result.realizable { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Export { model, format, spec } => {
            let text = read(&model)?;
            match format {
                ExportFormat::Json => {
                    if document_kind(&text)? == "supervisor" {
                        emit(out, &print_supervisor(&parse_supervisor(&text)?))?;
                    } else {
                        emit(out, &print_model(&parse_model(&text)?))?;
                    }
                }
                ExportFormat::Dot => {
                    let spec_path = spec.ok_or_else(|| Error::Invalid("--format dot needs --spec".into()))?;
                    let plant = parse_plant(&text)?.complete_inputs();
                    let spec = parse_spec(&read(&spec_path)?)?;
                    let automaton = SafetyAutomaton::new(&spec, plant.input_events())?;
                    let arena = build_arena_capped(&plant, &automaton, max_nodes()?)?;
                    let solution = solve(&arena);
                    emit(out, &export_dot(&arena, Some(&solution)))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Enum {
            plant,
            depth,
            marked,
            io,
            extended: _,
        } => {
            check_depth(depth)?;
            let plant = parse_plant(&read(&plant)?)?.complete_inputs();
            let mut text = String::new();
            if io {
                for w in io_language(&plant, depth, marked)? {
                    text.push_str(&format!("{w}\n"));
                }
            } else {
                for w in enumerate_extended(&plant, depth, marked)? {
                    text.push_str(&format!("{w}\n"));
                }
            }
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            plant,
            sup,
            env,
            steps,
            seed,
        } => {
            let plant = parse_plant(&read(&plant)?)?.complete_inputs();
            let sup = parse_supervisor(&read(&sup)?)?;
            let policy = EnvPolicy::parse(&env)?;
            let cl = compose(&plant, &sup)?;
            let trace = simulate(&cl, &policy, steps, seed)?;
            emit(out, &trace.to_string())?;
            Ok(EXIT_OK)
        }
    }
}

fn validate(text: &str, out: &mut dyn Write) -> Result<i32> {
    let kind = document_kind(text)?;
    let (report, ok) = if kind == "supervisor" {
        let sup = parse_supervisor(text)?;
        (
            json!({"kind": "validation", "model": "supervisor", "ok": true, "states": sup.num_states()}),
            true,
        )
    } else {
        match parse_model(text)? {
            Model::Plant(p) => plant_validation(&p),
            Model::Spec(s) => {
                let inputs: Vec<_> = s.used_inputs().into_iter().collect();
                let complete = s.check_input_complete(&inputs).is_ok();
                let names: Vec<String> = inputs.iter().map(ToString::to_string).collect();
                (
                    json!({"kind": "validation", "model": "spec", "ok": complete, "inputs": names}),
                    complete,
                )
            }
        }
    };
    emit(out, &to_canonical(&report))?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn plant_validation(p: &OpenDes) -> (Value, bool) {
    let r = p.validate();
    let missing: Vec<Value> = r
        .not_input_enabled
        .iter()
        .map(|(s, x)| json!({"state": s, "input": x.to_string()}))
        .collect();
    (
        json!({
            "kind": "validation",
            "model": "plant",
            "ok": r.ok(),
            "unreachable": r.unreachable,
            "not_input_enabled": missing,
            "partition_violations": r.partition_violations,
        }),
        r.ok(),
    )
}

fn conditions_json(verdicts: &[(String, CheckVerdict)]) -> Map<String, Value> {
    let mut map = Map::new();
    let mut witnesses = Map::new();
    for (name, v) in verdicts {
        map.insert(name.clone(), json!(v.holds));
        if let Some(w) = &v.witness {
            witnesses.insert(name.clone(), json!(w.to_string()));
        }
    }
    map.insert("witnesses".into(), Value::Object(witnesses));
    map
}

fn equality_json(v: &EqualityVerdict) -> Value {
    let mut m = Map::new();
    m.insert("holds".into(), json!(v.holds));
    if let Some(w) = &v.witness {
        m.insert("witness".into(), json!(w.to_string()));
    }
    m.insert("bounded_agrees".into(), json!(v.bounded_agrees));
    Value::Object(m)
}

fn synthesis_json(result: &SynthesisResult) -> Value {
    let r = &result.report;
    let conditions = conditions_json(&[
        ("output_controllable_literal".into(), r.controllable_literal.clone()),
        ("output_controllable_local".into(), r.controllable_local.clone()),
        ("closed".into(), r.closed.clone()),
    ]);
    let mut report = Map::new();
    report.insert("kind".into(), json!("synthesis"));
    report.insert("realizable".into(), json!(result.realizable));
    report.insert("conditions".into(), Value::Object(conditions));
    report.insert(
        "arena".into(),
        json!({
            "env_nodes": r.stats.env_nodes,
            "sup_nodes": r.stats.sup_nodes,
            "plant_nodes": r.stats.plant_nodes,
            "edges": r.stats.edges,
            "losing": r.stats.losing,
            "marked": r.stats.marked,
            "winning": r.winning,
            "realizable": result.realizable,
        }),
    );
    if let Some(v) = &r.verification {
        let mut nb = Map::new();
        nb.insert("holds".into(), json!(v.nonblocking.holds));
        if let Some(w) = &v.nonblocking.witness {
            nb.insert("witness".into(), json!(w.to_string()));
        }
        report.insert(
            "verification".into(),
            json!({
                "safe_equality": equality_json(&v.safe_equality),
                "marked_product_equality": equality_json(&v.marked_product_equality),
                "marked_plant_equality": equality_json(&v.marked_plant_equality),
                "nonblocking": Value::Object(nb),
                "marking_divergence": v.marking_divergence,
            }),
        );
    }
    if let Some(sup) = &result.supervisor {
        report.insert("supervisor_states".into(), json!(sup.num_states()));
    }
    Value::Object(report)
}
