//! The contract every brick satisfies.
//!
//! A brick is a generator: given the shapes arriving on its input ports it
//! reports timing/shape metadata and builds a local circuit fragment with
//! explicit input taps, indexed output ports and a begin/done control pair.
//!
//! Timing conventions shared by all bricks:
//!
//! * `begin` fires at the timestep `s` at which the brick's inputs are
//!   presented, i.e. the timestep the upstream output neurons fire.
//! * Upstream spikes reach the input taps after the tap delay (1 unless the
//!   brick says otherwise), so that hop is part of the brick's own depth.
//! * A fixed-depth brick emits its first outputs no earlier than `s + D` and
//!   its `done` neuron fires at `s + D + T_out` (begin relayed through one
//!   synapse). Streaming bricks have a `done` neuron that never fires.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{Circuit, IrError, NeuronId, NeuronParams, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BrickError {
    #[error("arity error: expected {expected} input port(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("unsupported buffer: {0}")]
    UnsupportedBuffer(String),
    #[error("build error in `{brick}`: {message}")]
    Build { brick: String, message: String },
}

impl BrickError {
    pub(crate) fn build(brick: &str, err: impl fmt::Display) -> Self {
        BrickError::Build { brick: brick.to_owned(), message: err.to_string() }
    }
}

/// How spikes on a port encode information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coding {
    BinaryVector,
    /// Value carried by spike time relative to the brick's presentation.
    TemporalValue,
    OneHot,
    Raster,
}

impl fmt::Display for Coding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Coding::BinaryVector => "binary-vector",
            Coding::TemporalValue => "temporal-value",
            Coding::OneHot => "one-hot",
            Coding::Raster => "raster",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Coding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary-vector" | "binary" => Ok(Coding::BinaryVector),
            "temporal-value" | "temporal" => Ok(Coding::TemporalValue),
            "one-hot" => Ok(Coding::OneHot),
            "raster" => Ok(Coding::Raster),
            other => Err(format!("unknown coding `{other}`")),
        }
    }
}

/// Number of timesteps over which a port carries spikes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Steps {
    Finite(u32),
    Streaming,
}

impl Steps {
    pub fn finite(self) -> Option<u32> {
        match self {
            Steps::Finite(n) => Some(n),
            Steps::Streaming => None,
        }
    }
}

impl fmt::Display for Steps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Steps::Finite(n) => write!(f, "{n}"),
            Steps::Streaming => f.write_str("inf"),
        }
    }
}

/// Logical shape of a spike-carrying bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortShape {
    pub dims: Vec<usize>,
    pub coding: Coding,
    pub steps: Steps,
}

impl PortShape {
    pub fn new(dims: Vec<usize>, coding: Coding, steps: Steps) -> Result<Self, BrickError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(BrickError::Shape(format!("dims {dims:?} must be non-empty and positive")));
        }
        Ok(PortShape { dims, coding, steps })
    }

    /// Single-step binary vector of length `n`.
    pub fn binary(n: usize) -> Self {
        PortShape { dims: vec![n], coding: Coding::BinaryVector, steps: Steps::Finite(1) }
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major coordinate of flat position `flat`.
    pub fn coordinate(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        let mut coord = vec![0; self.dims.len()];
        for (axis, &d) in self.dims.iter().enumerate().rev() {
            coord[axis] = rest % d;
            rest /= d;
        }
        coord
    }

    pub fn flat(&self, coord: &[usize]) -> usize {
        coord.iter().zip(&self.dims).fold(0, |acc, (&c, &d)| acc * d + c)
    }

    pub(crate) fn with_steps(&self, steps: Steps) -> Self {
        PortShape { steps, ..self.clone() }
    }

    pub(crate) fn with_coding(&self, coding: Coding) -> Self {
        PortShape { coding, ..self.clone() }
    }
}

impl fmt::Display for PortShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({}) {} x{}", dims.join(","), self.coding, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Fixed(u32),
    /// Data dependent. `min` is the earliest possible first output, counted
    /// like a fixed depth; downstream bricks are presented at that nominal time.
    Runtime { min: u32 },
}

impl Depth {
    pub fn nominal(self) -> u32 {
        match self {
            Depth::Fixed(d) => d,
            Depth::Runtime { min } => min,
        }
    }

    pub fn is_runtime(self) -> bool {
        matches!(self, Depth::Runtime { .. })
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Fixed(d) => write!(f, "{d}"),
            Depth::Runtime { min } => write!(f, "runtime(>={min})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickMetadata {
    pub n_in: Vec<usize>,
    pub t_in: Steps,
    pub n_out: Vec<usize>,
    pub t_out: Steps,
    pub depth: Depth,
}

/// Result of metadata resolution: timing plus concrete output shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    pub metadata: BrickMetadata,
    pub outputs: Vec<PortShape>,
}

impl Resolved {
    pub(crate) fn new(inputs: &[PortShape], outputs: Vec<PortShape>, depth: Depth) -> Self {
        let t_in = inputs.iter().map(|p| p.steps).max().unwrap_or(Steps::Finite(0));
        let t_out = outputs.iter().map(|p| p.steps).max().unwrap_or(Steps::Finite(0));
        Resolved {
            metadata: BrickMetadata {
                n_in: inputs.iter().map(PortShape::size).collect(),
                t_in,
                n_out: outputs.iter().map(PortShape::size).collect(),
                t_out,
                depth,
            },
            outputs,
        }
    }
}

/// Where one upstream line lands inside a fragment.
#[derive(Debug, Clone, PartialEq)]
pub struct Tap {
    pub neuron: NeuronId,
    pub weight: f64,
    pub delay: u32,
}

impl Tap {
    pub fn unit(neuron: NeuronId) -> Self {
        Tap { neuron, weight: 1.0, delay: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputPort {
    pub shape: PortShape,
    /// One tap list per line, in row-major line order.
    pub lines: Vec<Vec<Tap>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPort {
    pub shape: PortShape,
    /// Output-tagged neurons in row-major line order.
    pub neurons: Vec<NeuronId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltBrick {
    pub fragment: Circuit,
    pub input_ports: Vec<InputPort>,
    pub output_ports: Vec<OutputPort>,
    pub begin: NeuronId,
    pub done: NeuronId,
    /// External drives as `(input neuron, lead)`: the neuron is injected at
    /// `begin_time + lead - 1`.
    pub stimulus: Vec<(NeuronId, u32)>,
}

/// Hands out the namespace a fragment is built in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Namer {
    tag: String,
}

impl Namer {
    pub fn new(tag: impl Into<String>) -> Self {
        Namer { tag: tag.into() }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn circuit(&self) -> Circuit {
        Circuit::new(self.tag.clone())
    }
}

pub trait Brick: fmt::Debug + Send + Sync {
    /// Registry name, e.g. `"and"`.
    fn kind(&self) -> &'static str;

    fn input_arity(&self) -> usize;

    fn output_arity(&self) -> usize {
        1
    }

    /// Shape and timing for the given inputs. Callers go through
    /// [`resolve_metadata`], which has already checked arity.
    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError>;

    /// Build the local circuit. Callers go through [`build`], which checks
    /// arity and the resulting fragment.
    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError>;
}

fn check_arity(brick: &dyn Brick, inputs: &[PortShape]) -> Result<(), BrickError> {
    if inputs.len() != brick.input_arity() {
        return Err(BrickError::Arity { expected: brick.input_arity(), got: inputs.len() });
    }
    Ok(())
}

pub fn resolve_metadata(brick: &dyn Brick, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
    check_arity(brick, inputs)?;
    brick.resolve(inputs)
}

pub fn build(
    brick: &dyn Brick,
    inputs: &[PortShape],
    namer: &Namer,
) -> Result<BuiltBrick, BrickError> {
    let resolved = resolve_metadata(brick, inputs)?;
    let built = brick.construct(inputs, namer)?;
    check_built(&built, &resolved, inputs).map_err(|m| BrickError::build(namer.tag(), m))?;
    Ok(built)
}

fn check_built(built: &BuiltBrick, resolved: &Resolved, inputs: &[PortShape]) -> Result<(), String> {
    let frag = &built.fragment;
    if let Some(v) = frag.validate().first() {
        return Err(v.to_string());
    }
    for (name, id) in [("begin", &built.begin), ("done", &built.done)] {
        match frag.neuron(id) {
            Some(n) if n.role == Role::Control => {}
            _ => return Err(format!("{name} neuron `{id}` missing or not control-tagged")),
        }
    }
    if built.input_ports.len() != inputs.len() {
        return Err("input port count differs from arity".into());
    }
    for (port, shape) in built.input_ports.iter().zip(inputs) {
        if port.lines.len() != shape.size() {
            return Err(format!("input port has {} lines, shape needs {}", port.lines.len(), shape.size()));
        }
        for tap in port.lines.iter().flatten() {
            if !frag.contains(&tap.neuron) || tap.delay < 1 {
                return Err(format!("bad input tap onto `{}`", tap.neuron));
            }
        }
    }
    if built.output_ports.len() != resolved.outputs.len() {
        return Err("output port count differs from metadata".into());
    }
    for (port, shape) in built.output_ports.iter().zip(&resolved.outputs) {
        if port.shape != *shape || port.neurons.len() != shape.size() {
            return Err(format!("output port does not match resolved shape {shape}"));
        }
        for (flat, id) in port.neurons.iter().enumerate() {
            match frag.neuron(id) {
                Some(n) if n.role == Role::Output && n.index == shape.coordinate(flat) => {}
                _ => return Err(format!("output neuron `{id}` is not output-tagged at {flat}")),
            }
        }
    }
    for (id, _) in &built.stimulus {
        match frag.neuron(id) {
            Some(n) if n.role == Role::Input => {}
            _ => return Err(format!("stimulus target `{id}` is not an input neuron")),
        }
    }
    Ok(())
}

/// Large inhibitory weight used for fire-once resets and vetoes.
pub(crate) const VETO: f64 = -1.0e9;

/// Pure repeater: threshold 0.5, full leak.
pub(crate) fn relay() -> NeuronParams {
    NeuronParams::default()
}

/// Fresh fragment with its begin/done pair. When `done_after` is `Some(d)`,
/// done is begin relayed by `d` steps; `None` leaves done undriven.
pub(crate) fn control_pair(
    namer: &Namer,
    done_after: Option<u32>,
) -> Result<(Circuit, NeuronId, NeuronId), IrError> {
    let mut c = namer.circuit();
    let begin = c.add_named_neuron("begin", relay(), vec![], Role::Control)?;
    let done = c.add_named_neuron("done", relay(), vec![], Role::Control)?;
    if let Some(d) = done_after {
        c.add_synapse(&begin, &done, 1.0, d.max(1))?;
    }
    Ok((c, begin, done))
}

/// `D + T_out` for a done relay, `None` when streaming.
pub(crate) fn done_delay(depth: u32, t_out: Steps) -> Option<u32> {
    t_out.finite().map(|t| depth + t)
}
