//! Composition of bricks into one circuit.
//!
//! A [`Scaffold`] is a DAG of named brick instances joined port to port.
//! Compiling it runs three passes:
//!
//! 1. shape/depth resolution in topological order ([`Scaffold::compute_depths`]);
//! 2. timing alignment, which pads short static branches into a merge with
//!    delay bricks and puts buffers on every branch into a merge that has a
//!    runtime-depth predecessor ([`Scaffold::align_timing`]);
//! 3. laying, which builds every brick, merges the fragments under the
//!    scaffold namespace, wires ports together and drives every `begin`
//!    from a global start neuron or a buffer release ([`lay_bricks`]).
//!
//! The start neuron is injected at step 0 and source bricks are presented at
//! step 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brick::{self, Brick, BrickError, Depth, Namer, PortShape, Resolved, Steps, Tap};
use crate::bricks::{BufferBrick, DelayBrick};
use crate::ir::{Circuit, IrError, NeuronId, NeuronParams, Role};

/// Presentation time of source bricks.
pub const SOURCE_BEGIN: u32 = 1;

/// Reserved tag of the global start neuron.
pub const START_TAG: &str = "start";

#[derive(Debug, Error)]
pub enum ScaffoldError {
    #[error("duplicate brick name `{0}`")]
    DuplicateName(String),
    #[error("invalid name `{0}`: use letters, digits, `_` or `-`, and not `start`")]
    InvalidName(String),
    #[error("unknown brick `{0}`")]
    UnknownBrick(String),
    #[error("`{brick}` has no {direction} port {port}")]
    NoSuchPort { brick: String, port: usize, direction: &'static str },
    #[error("connecting {src} -> {dst} would create a cycle")]
    Cycle { src: String, dst: String },
    #[error("input port {port} of `{brick}` is already connected")]
    FanIn { brick: String, port: usize },
    #[error("input port {port} of `{brick}` is not connected")]
    Unconnected { brick: String, port: usize },
    #[error("brick `{brick}`: {source}")]
    Brick { brick: String, source: BrickError },
    #[error("wiring error: {0}")]
    Wiring(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BrickId(pub usize);

impl fmt::Display for BrickId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub brick: BrickId,
    pub port: usize,
}

impl PortRef {
    pub fn new(brick: BrickId, port: usize) -> Self {
        PortRef { brick, port }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: PortRef,
    pub dst: PortRef,
}

/// Who put a brick into the scaffold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    User,
    Padding,
    Buffer,
}

#[derive(Debug, Clone)]
struct Node {
    name: String,
    brick: Arc<dyn Brick>,
    origin: Origin,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != START_TAG
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Debug, Clone)]
pub struct Scaffold {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Scaffold {
    pub fn new(name: &str) -> Result<Self, ScaffoldError> {
        if !valid_name(name) {
            return Err(ScaffoldError::InvalidName(name.to_owned()));
        }
        Ok(Scaffold { name: name.to_owned(), nodes: Vec::new(), edges: Vec::new() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_brick<B: Brick + 'static>(&mut self, name: &str, brick: B) -> Result<BrickId, ScaffoldError> {
        self.add_shared(name, Arc::new(brick))
    }

    pub fn add_shared(&mut self, name: &str, brick: Arc<dyn Brick>) -> Result<BrickId, ScaffoldError> {
        if !valid_name(name) {
            return Err(ScaffoldError::InvalidName(name.to_owned()));
        }
        self.push(name.to_owned(), brick, Origin::User)
    }

    fn push(&mut self, name: String, brick: Arc<dyn Brick>, origin: Origin) -> Result<BrickId, ScaffoldError> {
        if self.nodes.iter().any(|n| n.name == name) {
            return Err(ScaffoldError::DuplicateName(name));
        }
        self.nodes.push(Node { name, brick, origin });
        Ok(BrickId(self.nodes.len() - 1))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<BrickId> {
        self.nodes.iter().position(|n| n.name == name).map(BrickId)
    }

    pub fn ids(&self) -> impl Iterator<Item = BrickId> {
        (0..self.nodes.len()).map(BrickId)
    }

    pub fn brick_name(&self, id: BrickId) -> &str {
        &self.nodes[id.0].name
    }

    pub fn brick(&self, id: BrickId) -> &dyn Brick {
        self.nodes[id.0].brick.as_ref()
    }

    pub fn origin(&self, id: BrickId) -> Origin {
        self.nodes[id.0].origin
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `name.port` handle for an output or input port.
    pub fn port(&self, name: &str, port: usize) -> Result<PortRef, ScaffoldError> {
        let id = self.id(name).ok_or_else(|| ScaffoldError::UnknownBrick(name.to_owned()))?;
        Ok(PortRef::new(id, port))
    }

    fn describe(&self, p: PortRef) -> String {
        match self.nodes.get(p.brick.0) {
            Some(n) => format!("{}.{}", n.name, p.port),
            None => format!("{}.{}", p.brick, p.port),
        }
    }

    fn node(&self, id: BrickId) -> Result<&Node, ScaffoldError> {
        self.nodes.get(id.0).ok_or_else(|| ScaffoldError::UnknownBrick(id.to_string()))
    }

    /// Connect output port `src` to input port `dst`.
    pub fn connect(&mut self, src: PortRef, dst: PortRef) -> Result<(), ScaffoldError> {
        let s = self.node(src.brick)?;
        if src.port >= s.brick.output_arity() {
            return Err(ScaffoldError::NoSuchPort { brick: s.name.clone(), port: src.port, direction: "output" });
        }
        let d = self.node(dst.brick)?;
        if dst.port >= d.brick.input_arity() {
            return Err(ScaffoldError::NoSuchPort { brick: d.name.clone(), port: dst.port, direction: "input" });
        }
        if self.edges.iter().any(|e| e.dst == dst) {
            return Err(ScaffoldError::FanIn { brick: d.name.clone(), port: dst.port });
        }
        if src.brick == dst.brick || self.reaches(dst.brick, src.brick) {
            return Err(ScaffoldError::Cycle { src: self.describe(src), dst: self.describe(dst) });
        }
        self.edges.push(Edge { src, dst });
        Ok(())
    }

    fn reaches(&self, from: BrickId, to: BrickId) -> bool {
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(b) = stack.pop() {
            if b == to {
                return true;
            }
            if seen.insert(b) {
                stack.extend(self.edges.iter().filter(|e| e.src.brick == b).map(|e| e.dst.brick));
            }
        }
        false
    }

    /// Edges into `id`, by destination port.
    pub fn incoming(&self, id: BrickId) -> Vec<Edge> {
        let mut v: Vec<Edge> = self.edges.iter().copied().filter(|e| e.dst.brick == id).collect();
        v.sort_by_key(|e| e.dst.port);
        v
    }

    /// Distinct upstream bricks of `id`, in first-port order.
    pub fn predecessors(&self, id: BrickId) -> Vec<BrickId> {
        let mut out = Vec::new();
        for e in self.incoming(id) {
            if !out.contains(&e.src.brick) {
                out.push(e.src.brick);
            }
        }
        out
    }

    /// Kahn order with ties broken by insertion order.
    pub fn topological_order(&self) -> Vec<BrickId> {
        let mut indegree = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            indegree[e.dst.brick.0] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop_first() {
            order.push(BrickId(i));
            for e in self.edges.iter().filter(|e| e.src.brick.0 == i) {
                indegree[e.dst.brick.0] -= 1;
                if indegree[e.dst.brick.0] == 0 {
                    ready.insert(e.dst.brick.0);
                }
            }
        }
        order
    }

    fn input_shapes(&self, id: BrickId, resolved: &[Option<Resolved>]) -> Result<Vec<PortShape>, ScaffoldError> {
        let node = &self.nodes[id.0];
        let incoming = self.incoming(id);
        (0..node.brick.input_arity())
            .map(|port| {
                let e = incoming
                    .iter()
                    .find(|e| e.dst.port == port)
                    .ok_or_else(|| ScaffoldError::Unconnected { brick: node.name.clone(), port })?;
                let upstream = resolved[e.src.brick.0].as_ref().expect("upstream resolved first");
                Ok(upstream.outputs[e.src.port].clone())
            })
            .collect()
    }

    fn resolve_one(&self, id: BrickId, inputs: &[PortShape]) -> Result<Resolved, ScaffoldError> {
        let node = &self.nodes[id.0];
        brick::resolve_metadata(node.brick.as_ref(), inputs)
            .map_err(|source| ScaffoldError::Brick { brick: node.name.clone(), source })
    }

    /// Input shapes and metadata for every brick, indexed by id.
    pub fn resolve(&self) -> Result<Vec<(Vec<PortShape>, Resolved)>, ScaffoldError> {
        let mut resolved: Vec<Option<Resolved>> = vec![None; self.nodes.len()];
        let mut inputs: Vec<Vec<PortShape>> = vec![Vec::new(); self.nodes.len()];
        for id in self.topological_order() {
            let shapes = self.input_shapes(id, &resolved)?;
            resolved[id.0] = Some(self.resolve_one(id, &shapes)?);
            inputs[id.0] = shapes;
        }
        Ok(inputs.into_iter().zip(resolved.into_iter().map(Option::unwrap)).collect())
    }

    /// Total depth from global start to each brick's outputs.
    pub fn compute_depths(&self) -> Result<BranchDepth, ScaffoldError> {
        let resolved = self.resolve()?;
        let mut totals = vec![TotalDepth::Static(0); self.nodes.len()];
        for id in self.topological_order() {
            let own = resolved[id.0].1.metadata.depth;
            let upstream = self
                .predecessors(id)
                .into_iter()
                .map(|p| totals[p.0])
                .fold(TotalDepth::Static(0), TotalDepth::max);
            totals[id.0] = match (upstream, own) {
                (TotalDepth::Static(d), Depth::Fixed(own)) => TotalDepth::Static(d + own),
                _ => TotalDepth::Runtime,
            };
        }
        Ok(BranchDepth { names: self.nodes.iter().map(|n| n.name.clone()).collect(), totals })
    }

    /// Insert delay and buffer bricks so that every merge sees coincident
    /// inputs. The user's bricks are left untouched.
    pub fn align_timing(&self) -> Result<Aligned, ScaffoldError> {
        let mut out = self.clone();
        let mut resolved: Vec<Option<Resolved>> = vec![None; self.nodes.len()];
        let mut inputs: Vec<Vec<PortShape>> = vec![Vec::new(); self.nodes.len()];
        let mut timing: Vec<Option<Timing>> = vec![None; self.nodes.len()];
        let mut insertions = Vec::new();

        let settle = |out: &Scaffold,
                          id: BrickId,
                          resolved: &mut Vec<Option<Resolved>>,
                          inputs: &mut Vec<Vec<PortShape>>,
                          timing: &mut Vec<Option<Timing>>,
                          mut t: Timing|
         -> Result<(), ScaffoldError> {
            let shapes = out.input_shapes(id, resolved)?;
            let r = out.resolve_one(id, &shapes)?;
            t.ready = t.begin + r.metadata.depth.nominal();
            t.runtime |= r.metadata.depth.is_runtime();
            resolved.resize(out.nodes.len(), None);
            inputs.resize(out.nodes.len(), Vec::new());
            timing.resize(out.nodes.len(), None);
            resolved[id.0] = Some(r);
            inputs[id.0] = shapes;
            timing[id.0] = Some(t);
            Ok(())
        };

        for id in self.topological_order() {
            let preds = out.predecessors(id);
            let t = if preds.is_empty() {
                Timing { anchor: Anchor::Start, begin: SOURCE_BEGIN, ready: 0, runtime: false }
            } else if preds.len() == 1 {
                let p = timing[preds[0].0].expect("predecessor timed");
                Timing { anchor: p.anchor, begin: p.ready, ready: 0, runtime: p.runtime }
            } else if preds.iter().all(|p| !timing[p.0].expect("timed").runtime) {
                let target = preds.iter().map(|p| timing[p.0].unwrap().ready).max().unwrap();
                for edge in out.incoming(id) {
                    let ready = timing[edge.src.brick.0].unwrap().ready;
                    if ready == target {
                        continue;
                    }
                    let steps = target - ready;
                    let pad = DelayBrick::new(steps).expect("positive padding");
                    let name = format!("{}.pad{}", out.nodes[id.0].name, edge.dst.port);
                    let pid = out.splice(edge, name, Arc::new(pad), Origin::Padding)?;
                    let t = Timing { anchor: Anchor::Start, begin: ready, ready: 0, runtime: false };
                    settle(&out, pid, &mut resolved, &mut inputs, &mut timing, t)?;
                    insertions.push(Insertion { brick: pid, kind: InsertionKind::Delay(steps), edge });
                }
                Timing { anchor: Anchor::Start, begin: target, ready: 0, runtime: false }
            } else {
                let mut first = None;
                for edge in out.incoming(id) {
                    let buffer = BufferBrick::new(preds.len()).expect("non-zero release arity");
                    let name = format!("{}.buf{}", out.nodes[id.0].name, edge.dst.port);
                    let bid = out.splice(edge, name, Arc::new(buffer), Origin::Buffer)?;
                    let t = Timing { anchor: Anchor::Release(bid), begin: 0, ready: 0, runtime: true };
                    settle(&out, bid, &mut resolved, &mut inputs, &mut timing, t)?;
                    insertions.push(Insertion {
                        brick: bid,
                        kind: InsertionKind::Buffer { release: preds.clone() },
                        edge,
                    });
                    first.get_or_insert(bid);
                }
                Timing { anchor: Anchor::Release(first.unwrap()), begin: 1, ready: 0, runtime: true }
            };
            settle(&out, id, &mut resolved, &mut inputs, &mut timing, t)?;
        }

        let order = out.topological_order();
        let shapes = inputs.into_iter().zip(resolved.into_iter().map(Option::unwrap)).collect();
        let timing = timing.into_iter().map(Option::unwrap).collect();
        Ok(Aligned { scaffold: out, shapes, timing, insertions, order })
    }

    /// Route `edge` through a new single-port brick.
    fn splice(&mut self, edge: Edge, name: String, brick: Arc<dyn Brick>, origin: Origin) -> Result<BrickId, ScaffoldError> {
        let id = self.push(name, brick, origin)?;
        let slot = self.edges.iter().position(|e| *e == edge).expect("edge present");
        self.edges[slot].dst = PortRef::new(id, 0);
        self.edges.push(Edge { src: PortRef::new(id, 0), dst: edge.dst });
        Ok(id)
    }

    /// Align and lay in one go.
    pub fn compile(&self) -> Result<Laid, ScaffoldError> {
        lay_bricks(&self.align_timing()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TotalDepth {
    Static(u32),
    Runtime,
}

impl TotalDepth {
    fn max(self, other: TotalDepth) -> TotalDepth {
        match (self, other) {
            (TotalDepth::Static(a), TotalDepth::Static(b)) => TotalDepth::Static(a.max(b)),
            _ => TotalDepth::Runtime,
        }
    }
}

impl fmt::Display for TotalDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TotalDepth::Static(d) => write!(f, "{d}"),
            TotalDepth::Runtime => f.write_str("runtime"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchDepth {
    names: Vec<String>,
    totals: Vec<TotalDepth>,
}

impl BranchDepth {
    pub fn get(&self, id: BrickId) -> TotalDepth {
        self.totals[id.0]
    }

    pub fn by_name(&self, name: &str) -> Option<TotalDepth> {
        self.names.iter().position(|n| n == name).map(|i| self.totals[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, TotalDepth)> {
        self.names.iter().map(String::as_str).zip(self.totals.iter().copied())
    }
}

/// What a brick's timing is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// The global start neuron, firing at step 0.
    Start,
    /// The release (begin) neuron of a buffer brick.
    Release(BrickId),
}

/// Nominal timing of one brick relative to its anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timing {
    pub anchor: Anchor,
    /// When `begin` fires.
    pub begin: u32,
    /// When the outputs are presented downstream (`begin + D`, nominal).
    pub ready: u32,
    /// Whether any runtime-depth brick lies on the way here.
    pub runtime: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertionKind {
    Delay(u32),
    /// Released once every listed brick's `done` has fired.
    Buffer { release: Vec<BrickId> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Insertion {
    pub brick: BrickId,
    pub kind: InsertionKind,
    /// The user edge the brick was spliced into.
    pub edge: Edge,
}

/// A scaffold after timing alignment, ready to lay.
#[derive(Debug, Clone)]
pub struct Aligned {
    scaffold: Scaffold,
    shapes: Vec<(Vec<PortShape>, Resolved)>,
    timing: Vec<Timing>,
    insertions: Vec<Insertion>,
    order: Vec<BrickId>,
}

impl Aligned {
    pub fn scaffold(&self) -> &Scaffold {
        &self.scaffold
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    pub fn timing(&self, id: BrickId) -> Timing {
        self.timing[id.0]
    }

    pub fn resolved(&self, id: BrickId) -> &Resolved {
        &self.shapes[id.0].1
    }
}

/// Placement of one brick in a laid circuit.
#[derive(Debug, Clone)]
pub struct LaidBrick {
    pub id: BrickId,
    pub name: String,
    pub kind: &'static str,
    pub origin: Origin,
    pub begin: NeuronId,
    pub done: NeuronId,
    /// Output neurons per port, in line order.
    pub outputs: Vec<Vec<NeuronId>>,
    pub output_shapes: Vec<PortShape>,
    pub depth: Depth,
    pub timing: Timing,
}

impl LaidBrick {
    /// Step at which `begin` fires, when it does not depend on the data.
    pub fn begin_time(&self) -> Option<u32> {
        match self.timing.anchor {
            Anchor::Start => Some(self.timing.begin),
            Anchor::Release(_) => None,
        }
    }

    /// Step at which `done` fires for static, finite bricks.
    pub fn done_time(&self) -> Option<u32> {
        let t_out = self.output_shapes.iter().map(|s| s.steps).max().unwrap_or(Steps::Finite(0));
        match (self.begin_time(), self.depth, t_out) {
            (Some(b), Depth::Fixed(d), Steps::Finite(t)) => Some(b + d + t),
            _ => None,
        }
    }
}

/// Per-brick record stored alongside a serialized circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickSummary {
    pub tag: String,
    pub kind: String,
    pub origin: Origin,
    pub depth: String,
    pub total_depth: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub begin: Option<u32>,
}

/// A composed circuit plus where each brick ended up.
#[derive(Debug, Clone)]
pub struct Laid {
    pub circuit: Circuit,
    pub start: NeuronId,
    bricks: Vec<LaidBrick>,
    insertions: Vec<Insertion>,
    totals: Vec<TotalDepth>,
}

impl Laid {
    pub fn bricks(&self) -> &[LaidBrick] {
        &self.bricks
    }

    pub fn brick(&self, name: &str) -> Option<&LaidBrick> {
        self.bricks.iter().find(|b| b.name == name)
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    pub fn output(&self, name: &str, port: usize) -> Option<&[NeuronId]> {
        self.brick(name).and_then(|b| b.outputs.get(port)).map(Vec::as_slice)
    }

    /// Latest statically known `done` step, a lower bound for a useful horizon.
    pub fn settle_time(&self) -> u32 {
        self.bricks.iter().filter_map(LaidBrick::done_time).max().unwrap_or(0)
    }

    pub fn summaries(&self) -> Vec<BrickSummary> {
        let mut out: Vec<BrickSummary> = self
            .bricks
            .iter()
            .map(|b| BrickSummary {
                tag: b.name.clone(),
                kind: b.kind.to_owned(),
                origin: b.origin,
                depth: b.depth.to_string(),
                total_depth: self.totals[b.id.0].to_string(),
                begin: b.begin_time(),
            })
            .collect();
        out.sort_by(|a, b| a.tag.cmp(&b.tag));
        out
    }
}

fn wiring(e: IrError) -> ScaffoldError {
    ScaffoldError::Wiring(e.to_string())
}

/// Build every brick of an aligned scaffold into one circuit.
pub fn lay_bricks(aligned: &Aligned) -> Result<Laid, ScaffoldError> {
    let sc = &aligned.scaffold;
    let ns = sc.name.as_str();
    let mut circuit = Circuit::new(ns);
    let start = circuit.add_named_neuron(START_TAG, NeuronParams::default(), vec![], Role::Input).map_err(wiring)?;
    circuit.neuron_mut(&start).expect("just added").brick_tag = START_TAG.to_owned();
    circuit.add_stimulus(&start, 0).map_err(wiring)?;

    let depths = sc.compute_depths()?;
    let mut laid: Vec<Option<LaidBrick>> = vec![None; sc.nodes.len()];
    for &id in &aligned.order {
        let node = &sc.nodes[id.0];
        let (inputs, resolved) = &aligned.shapes[id.0];
        let timing = aligned.timing[id.0];
        let built = brick::build(node.brick.as_ref(), inputs, &Namer::new(node.name.clone()))
            .map_err(|source| ScaffoldError::Brick { brick: node.name.clone(), source })?;
        let map = circuit.merge(&built.fragment, ns).map_err(wiring)?;
        let begin = map[&built.begin].clone();
        let done = map[&built.done].clone();

        match (node.origin, timing.anchor) {
            (Origin::Buffer, _) => {
                let release = aligned
                    .insertions
                    .iter()
                    .find(|i| i.brick == id)
                    .and_then(|i| match &i.kind {
                        InsertionKind::Buffer { release } => Some(release),
                        InsertionKind::Delay(_) => None,
                    })
                    .ok_or_else(|| ScaffoldError::Wiring(format!("buffer `{}` has no release", node.name)))?;
                for p in release {
                    let upstream = laid[p.0].as_ref().expect("release source laid first");
                    circuit.add_synapse(&upstream.done, &begin, 1.0, 1).map_err(wiring)?;
                }
            }
            (_, Anchor::Start) => {
                circuit.add_synapse(&start, &begin, 1.0, timing.begin).map_err(wiring)?;
            }
            (_, Anchor::Release(buffer)) => {
                let release = &laid[buffer.0].as_ref().expect("buffer laid first").begin;
                circuit.add_synapse(release, &begin, 1.0, timing.begin).map_err(wiring)?;
            }
        }

        for (neuron, lead) in &built.stimulus {
            if timing.anchor != Anchor::Start || timing.begin + lead < 1 {
                return Err(ScaffoldError::Wiring(format!(
                    "`{}` needs external drive but is not statically timed",
                    node.name
                )));
            }
            circuit.add_stimulus(&map[neuron], timing.begin + lead - 1).map_err(wiring)?;
        }

        for edge in sc.incoming(id) {
            let upstream = laid[edge.src.brick.0].as_ref().expect("upstream laid first");
            let sources = &upstream.outputs[edge.src.port];
            let port = &built.input_ports[edge.dst.port];
            if sources.len() != port.lines.len() {
                return Err(ScaffoldError::Wiring(format!(
                    "{} has {} lines but {} expects {}",
                    sc.describe(edge.src),
                    sources.len(),
                    sc.describe(edge.dst),
                    port.lines.len()
                )));
            }
            for (src, taps) in sources.iter().zip(&port.lines) {
                for Tap { neuron, weight, delay } in taps {
                    circuit.add_or_accumulate_synapse(src, &map[neuron], *weight, *delay).map_err(wiring)?;
                }
            }
        }

        laid[id.0] = Some(LaidBrick {
            id,
            name: node.name.clone(),
            kind: node.brick.kind(),
            origin: node.origin,
            begin,
            done,
            outputs: built
                .output_ports
                .iter()
                .map(|p| p.neurons.iter().map(|n| map[n].clone()).collect())
                .collect(),
            output_shapes: resolved.outputs.clone(),
            depth: resolved.metadata.depth,
            timing,
        });
    }

    if let Some(v) = circuit.validate().first() {
        return Err(ScaffoldError::Wiring(v.to_string()));
    }
    Ok(Laid {
        circuit,
        start,
        bricks: laid.into_iter().map(Option::unwrap).collect(),
        insertions: aligned.insertions.clone(),
        totals: sc.ids().map(|id| depths.get(id)).collect(),
    })
}

/// Neurons of each laid brick grouped by tag, for provenance checks.
pub fn neurons_by_tag(circuit: &Circuit) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for n in circuit.neurons() {
        *counts.entry(n.brick_tag.as_str()).or_insert(0) += 1;
    }
    counts
}
