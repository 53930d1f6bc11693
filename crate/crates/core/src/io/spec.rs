//! TOML scaffold descriptions.
//!
//! ```toml
//! name = "demo"
//!
//! [[brick]]
//! name = "a"
//! kind = "input"
//! dims = [2]
//!
//! [[brick]]
//! name = "both"
//! kind = "and"
//!
//! [[connect]]
//! src = "a"        # port 0 unless written `a.1`
//! dst = "both.0"
//!
//! [[connect]]
//! src = "a"
//! dst = "both.1"
//!
//! [inputs]
//! a = [[0, 0], [1, 0]]   # (line, step) pairs
//! ```
//!
//! Every problem is reported with the line it was found on.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;
use toml::{Spanned, Table, Value};

use crate::brick::{Brick, Coding};
use crate::bricks::{
    BinaryRngBrick, BinaryToUnaryBrick, BufferBrick, CrossCorrelationBrick, DelayBrick,
    GridTrackerBrick, InputBrick, LogicBrick, MinimumBrick, ShortestPathBrick, SpikeSchedule,
    TargetGraph, ThresholdBrick, DEFAULT_MAX_BITS,
};
use crate::scaffold::{PortRef, Scaffold};

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct SpecError {
    pub line: usize,
    pub message: String,
}

/// Brick kinds understood by [`parse_scaffold_spec`].
pub const BRICK_KINDS: &[&str] = &[
    "input",
    "and",
    "or",
    "threshold",
    "minimum",
    "delay",
    "cross_correlation",
    "shortest_path",
    "binary_rng",
    "binary_to_unary",
    "grid_tracker",
    "buffer",
];

#[derive(Deserialize)]
struct RawSpec {
    name: Option<Spanned<String>>,
    #[serde(default)]
    brick: Vec<Spanned<Table>>,
    #[serde(default)]
    connect: Vec<Spanned<RawConnect>>,
    #[serde(default)]
    inputs: BTreeMap<Spanned<String>, Spanned<Vec<(i64, i64)>>>,
}

#[derive(Deserialize)]
struct Heads {
    #[serde(default)]
    brick: Vec<Head>,
}

#[derive(Deserialize)]
struct Head {
    name: Option<Spanned<String>>,
    kind: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnect {
    src: Spanned<String>,
    dst: Spanned<String>,
}

struct Lines<'a> {
    text: &'a str,
}

impl Lines<'_> {
    fn at(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> SpecError {
        SpecError { line: self.at(span), message: message.into() }
    }
}

fn toml_error(e: toml::de::Error, lines: &Lines) -> SpecError {
    let line = e.span().map_or(1, |s| lines.at(s));
    SpecError { line, message: e.message().trim().to_owned() }
}

pub fn parse_scaffold_spec(text: &str) -> Result<Scaffold, SpecError> {
    let lines = Lines { text };
    let raw: RawSpec = toml::from_str(text).map_err(|e| toml_error(e, &lines))?;
    let heads: Heads = toml::from_str(text).map_err(|e| toml_error(e, &lines))?;

    let name = raw.name.as_ref().map_or("scaffold", |n| n.get_ref().as_str());
    let mut scaffold = Scaffold::new(name).map_err(|e| {
        let span = raw.name.as_ref().map_or(0..0, |n| n.span());
        lines.err(span, e.to_string())
    })?;

    let mut schedules: BTreeMap<String, (Range<usize>, SpikeSchedule)> = BTreeMap::new();
    for (brick, events) in &raw.inputs {
        let mut parsed = Vec::new();
        for &(line, t) in events.get_ref() {
            if line < 0 || t < 0 {
                return Err(lines.err(events.span(), format!("inputs.{}: negative line or step", brick.get_ref())));
            }
            parsed.push((line as usize, t as u32));
        }
        schedules.insert(brick.get_ref().clone(), (brick.span(), SpikeSchedule::new(parsed)));
    }

    let mut used_schedules = BTreeSet::new();
    for (table, head) in raw.brick.iter().zip(&heads.brick) {
        let name = head
            .name
            .as_ref()
            .ok_or_else(|| lines.err(table.span(), "brick without a `name`"))?;
        let kind = head
            .kind
            .as_ref()
            .ok_or_else(|| lines.err(name.span(), format!("brick `{}` has no `kind`", name.get_ref())))?;
        let mut params = Params::new(table.get_ref(), name.get_ref());
        let schedule = schedules.get(name.get_ref()).map(|(_, s)| s.clone());
        if schedule.is_some() {
            used_schedules.insert(name.get_ref().clone());
        }
        let brick = make_brick(kind.get_ref(), &mut params, schedule)
            .map_err(|m| lines.err(kind.span(), format!("brick `{}`: {m}", name.get_ref())))?;
        params.finish().map_err(|m| lines.err(name.span(), m))?;
        scaffold
            .add_shared(name.get_ref(), brick)
            .map_err(|e| lines.err(name.span(), e.to_string()))?;
    }
    for (brick, (span, _)) in &schedules {
        if !used_schedules.contains(brick) {
            return Err(lines.err(span.clone(), format!("inputs given for undeclared brick `{brick}`")));
        }
    }

    for c in &raw.connect {
        let c = c.get_ref();
        let src = port_ref(&scaffold, &c.src, &lines)?;
        let dst = port_ref(&scaffold, &c.dst, &lines)?;
        scaffold
            .connect(src, dst)
            .map_err(|e| lines.err(c.dst.span(), e.to_string()))?;
    }
    Ok(scaffold)
}

fn port_ref(scaffold: &Scaffold, text: &Spanned<String>, lines: &Lines) -> Result<PortRef, SpecError> {
    let (name, port) = match text.get_ref().split_once('.') {
        Some((name, port)) => {
            let port = port
                .parse()
                .map_err(|_| lines.err(text.span(), format!("bad port number in `{}`", text.get_ref())))?;
            (name, port)
        }
        None => (text.get_ref().as_str(), 0),
    };
    scaffold
        .port(name, port)
        .map_err(|_| lines.err(text.span(), format!("connection to undeclared brick `{name}`")))
}

/// Typed access to a brick table that remembers which keys were read.
struct Params<'a> {
    table: &'a Table,
    brick: &'a str,
    seen: BTreeSet<&'static str>,
}

impl<'a> Params<'a> {
    fn new(table: &'a Table, brick: &'a str) -> Self {
        Params { table, brick, seen: BTreeSet::from(["name", "kind"]) }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.seen.insert(key);
        self.table.get(key)
    }

    fn int_or(&mut self, key: &'static str, default: Option<i64>) -> Result<i64, String> {
        match self.raw(key) {
            Some(Value::Integer(v)) => Ok(*v),
            Some(other) => Err(format!("`{key}` must be an integer, found {}", other.type_str())),
            None => default.ok_or_else(|| format!("missing `{key}`")),
        }
    }

    fn count(&mut self, key: &'static str, default: Option<usize>) -> Result<usize, String> {
        let v = self.int_or(key, default.map(|d| d as i64))?;
        usize::try_from(v).map_err(|_| format!("`{key}` must be non-negative, found {v}"))
    }

    fn steps(&mut self, key: &'static str) -> Result<u32, String> {
        let v = self.int_or(key, None)?;
        u32::try_from(v).map_err(|_| format!("`{key}` out of range: {v}"))
    }

    fn float(&mut self, key: &'static str) -> Result<f64, String> {
        match self.raw(key) {
            Some(Value::Float(v)) => Ok(*v),
            Some(Value::Integer(v)) => Ok(*v as f64),
            Some(other) => Err(format!("`{key}` must be a number, found {}", other.type_str())),
            None => Err(format!("missing `{key}`")),
        }
    }

    fn string(&mut self, key: &'static str) -> Result<Option<&'a str>, String> {
        match self.raw(key) {
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(format!("`{key}` must be a string, found {}", other.type_str())),
            None => Ok(None),
        }
    }

    fn counts(&mut self, key: &'static str) -> Result<Option<Vec<usize>>, String> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    _ => Err(format!("`{key}` must list non-negative integers")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(other) => Err(format!("`{key}` must be an array, found {}", other.type_str())),
        }
    }

    fn finish(self) -> Result<(), String> {
        let unknown: Vec<&str> = self
            .table
            .keys()
            .map(String::as_str)
            .filter(|k| !self.seen.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(format!("brick `{}`: unknown parameter(s) {}", self.brick, unknown.join(", ")))
        }
    }
}

fn make_brick(kind: &str, p: &mut Params, schedule: Option<SpikeSchedule>) -> Result<Arc<dyn Brick>, String> {
    let e = |e: crate::brick::BrickError| e.to_string();
    if kind != "input" && schedule.is_some() {
        return Err("only input bricks take a spike schedule".into());
    }
    let brick: Arc<dyn Brick> = match kind {
        "input" => {
            let dims = p.counts("dims")?.ok_or("missing `dims`")?;
            let coding = match p.string("coding")? {
                Some(c) => c.parse::<Coding>()?,
                None => Coding::BinaryVector,
            };
            Arc::new(InputBrick::new(dims, coding, schedule.unwrap_or_default()).map_err(e)?)
        }
        "and" => Arc::new(LogicBrick::and(p.count("arity", Some(2))?).map_err(e)?),
        "or" => Arc::new(LogicBrick::or(p.count("arity", Some(2))?).map_err(e)?),
        "threshold" => Arc::new(ThresholdBrick::new(p.int_or("reference", None)?).map_err(e)?),
        "minimum" => {
            let arity = p.count("arity", None)?;
            let axis = p.count("axis", Some(0))?;
            Arc::new(MinimumBrick::along(arity, axis).map_err(e)?)
        }
        "delay" => Arc::new(DelayBrick::new(p.steps("steps")?).map_err(e)?),
        "cross_correlation" => Arc::new(CrossCorrelationBrick::new(p.count("n", None)?).map_err(e)?),
        "shortest_path" => {
            let text = p.string("graph")?.ok_or("missing `graph`")?;
            let brick = ShortestPathBrick::new(TargetGraph::parse(text).map_err(e)?);
            match p.raw("horizon") {
                None => Arc::new(brick),
                Some(_) => Arc::new(brick.with_horizon(p.steps("horizon")?).map_err(e)?),
            }
        }
        "binary_rng" => Arc::new(BinaryRngBrick::new(p.count("bits", None)?, p.float("p")?).map_err(e)?),
        "binary_to_unary" => {
            let bits = p.count("bits", None)?;
            let bound = p.count("max_bits", Some(DEFAULT_MAX_BITS))?;
            Arc::new(BinaryToUnaryBrick::with_max_bits(bits, bound).map_err(e)?)
        }
        "grid_tracker" => {
            let sizes = p.counts("sizes")?.ok_or("missing `sizes`")?;
            let start = p.counts("start")?.unwrap_or_else(|| vec![0; sizes.len()]);
            Arc::new(GridTrackerBrick::starting_at(sizes, start).map_err(e)?)
        }
        "buffer" => Arc::new(BufferBrick::new(p.count("release", Some(1))?).map_err(e)?),
        other => {
            return Err(format!("unknown brick kind `{other}` (known: {})", BRICK_KINDS.join(", ")));
        }
    };
    Ok(brick)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = r#"
name = "fig"

[[brick]]
name = "A"
kind = "input"
dims = [3]

[[brick]]
name = "B"
kind = "delay"
steps = 1

[[brick]]
name = "C"
kind = "delay"
steps = 2

[[brick]]
name = "D"
kind = "or"

[[connect]]
src = "A"
dst = "B"

[[connect]]
src = "A.0"
dst = "C.0"

[[connect]]
src = "B"
dst = "D.0"

[[connect]]
src = "C"
dst = "D.1"

[inputs]
A = [[0, 0], [2, 0]]
"#;

    #[test]
    fn diamond_spec() {
        let s = parse_scaffold_spec(DIAMOND).unwrap();
        assert_eq!(s.name(), "fig");
        assert_eq!(s.len(), 4);
        assert_eq!(s.edges().len(), 4);
    }

    #[test]
    fn unknown_kind_names_the_brick_and_line() {
        let text = DIAMOND.replace("kind = \"delay\"\nsteps = 1", "kind = \"frobnicate\"");
        let err = parse_scaffold_spec(&text).unwrap_err();
        assert!(err.message.contains("frobnicate") && err.message.contains("`B`"), "{err}");
        assert_eq!(err.line, 11);
    }

    #[test]
    fn dangling_connection() {
        let text = DIAMOND.replace("dst = \"D.1\"", "dst = \"E.1\"");
        let err = parse_scaffold_spec(&text).unwrap_err();
        assert!(err.message.contains("undeclared brick `E`"), "{err}");
        assert_eq!(err.line, 37);
    }

    #[test]
    fn duplicate_names() {
        let text = DIAMOND.replace("name = \"C\"", "name = \"B\"");
        let err = parse_scaffold_spec(&text).unwrap_err();
        assert!(err.message.contains("duplicate"), "{err}");
        assert_eq!(err.line, 15);
    }

    #[test]
    fn unknown_parameter() {
        let text = DIAMOND.replace("steps = 2", "steps = 2\nspeed = 3");
        let err = parse_scaffold_spec(&text).unwrap_err();
        assert!(err.message.contains("speed"), "{err}");
    }

    #[test]
    fn toml_syntax_error_has_line() {
        let err = parse_scaffold_spec("name = \"x\"\n[[brick]\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
