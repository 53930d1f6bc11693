use crate::brick::{
    control_pair, done_delay, relay, Brick, BrickError, BuiltBrick, Depth, InputPort, Namer,
    OutputPort, PortShape, Resolved, Tap,
};
use crate::ir::Role;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicMode {
    And,
    Or,
}

/// Elementwise AND/OR over `k` equally shaped inputs.
///
/// One fully leaky neuron per element with unit weights from each input;
/// AND needs all `k` arrivals in the same step, OR needs one.
#[derive(Debug, Clone)]
pub struct LogicBrick {
    mode: LogicMode,
    arity: usize,
}

impl LogicBrick {
    pub fn new(mode: LogicMode, arity: usize) -> Result<Self, BrickError> {
        if arity < 2 {
            return Err(BrickError::Parameter(format!("logic arity {arity} < 2")));
        }
        Ok(LogicBrick { mode, arity })
    }

    pub fn and(arity: usize) -> Result<Self, BrickError> {
        Self::new(LogicMode::And, arity)
    }

    pub fn or(arity: usize) -> Result<Self, BrickError> {
        Self::new(LogicMode::Or, arity)
    }

    pub fn threshold(&self) -> f64 {
        match self.mode {
            LogicMode::And => self.arity as f64 - 0.5,
            LogicMode::Or => 0.5,
        }
    }
}

impl Brick for LogicBrick {
    fn kind(&self) -> &'static str {
        match self.mode {
            LogicMode::And => "and",
            LogicMode::Or => "or",
        }
    }

    fn input_arity(&self) -> usize {
        self.arity
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        let first = &inputs[0];
        if let Some(other) = inputs.iter().find(|p| p.dims != first.dims) {
            return Err(BrickError::Shape(format!(
                "{} inputs must share one shape: {:?} vs {:?}",
                self.kind(),
                first.dims,
                other.dims
            )));
        }
        let steps = inputs.iter().map(|p| p.steps).max().unwrap_or(first.steps);
        Ok(Resolved::new(inputs, vec![first.with_steps(steps)], Depth::Fixed(1)))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let resolved = self.resolve(inputs)?;
        let out_shape = resolved.outputs[0].clone();
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) =
            control_pair(namer, done_delay(1, out_shape.steps)).map_err(err)?;
        let params = relay().with_threshold(self.threshold());
        let outputs = (0..out_shape.size())
            .map(|m| c.add_named_neuron(&format!("out{m}"), params, out_shape.coordinate(m), Role::Output))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let input_ports = inputs
            .iter()
            .map(|shape| InputPort {
                shape: shape.clone(),
                lines: outputs.iter().map(|id| vec![Tap::unit(id.clone())]).collect(),
            })
            .collect();
        Ok(BuiltBrick {
            fragment: c,
            input_ports,
            output_ports: vec![OutputPort { shape: out_shape, neurons: outputs }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}
