use super::{require_dims, TargetGraph};
use crate::brick::{
    control_pair, relay, Brick, BrickError, BuiltBrick, Coding, Depth, InputPort, Namer,
    OutputPort, PortShape, Resolved, Steps, Tap, VETO,
};
use crate::ir::Role;

/// Single-source shortest paths by spike propagation.
///
/// One fire-once neuron per node, one unit-weight synapse per arc with the
/// arc weight as its delay. The one-hot input selects the source; node `j`
/// then fires `1 + dist(source, j)` steps after begin, and unreachable nodes
/// never fire. Output is temporal over `horizon` steps and `done` fires once
/// the horizon has elapsed.
#[derive(Debug, Clone)]
pub struct ShortestPathBrick {
    graph: TargetGraph,
    horizon: u32,
}

impl ShortestPathBrick {
    pub fn new(graph: TargetGraph) -> Self {
        let n = graph.nodes().len() as u32;
        let horizon = n.saturating_sub(1) * graph.max_weight() + 1;
        ShortestPathBrick { graph, horizon }
    }

    pub fn with_horizon(mut self, horizon: u32) -> Result<Self, BrickError> {
        if horizon < 1 {
            return Err(BrickError::Parameter("horizon must be >= 1".into()));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn graph(&self) -> &TargetGraph {
        &self.graph
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }
}

impl Brick for ShortestPathBrick {
    fn kind(&self) -> &'static str {
        "shortest_path"
    }

    fn input_arity(&self) -> usize {
        1
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        let n = self.graph.nodes().len();
        if n == 0 {
            return Err(BrickError::Parameter("target graph has no nodes".into()));
        }
        require_dims("shortest_path", &inputs[0], &[n])?;
        let out = PortShape::new(vec![n], Coding::TemporalValue, Steps::Finite(self.horizon))?;
        Ok(Resolved::new(inputs, vec![out], Depth::Runtime { min: 1 }))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let out_shape = self.resolve(inputs)?.outputs.remove(0);
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) = control_pair(namer, Some(self.horizon + 1)).map_err(err)?;
        let fire_once = relay().with_decay(0.0).with_reset(VETO);
        let nodes = (0..out_shape.size())
            .map(|j| c.add_named_neuron(&format!("out{j}"), fire_once, vec![j], Role::Output))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        for (u, v, w) in self.graph.arcs() {
            c.add_synapse(&nodes[u], &nodes[v], 1.0, w).map_err(err)?;
        }
        let lines = nodes.iter().map(|id| vec![Tap::unit(id.clone())]).collect();
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![InputPort { shape: inputs[0].clone(), lines }],
            output_ports: vec![OutputPort { shape: out_shape, neurons: nodes }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}
