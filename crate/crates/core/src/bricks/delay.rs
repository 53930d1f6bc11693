use crate::brick::{
    control_pair, done_delay, relay, Brick, BrickError, BuiltBrick, Depth, InputPort, Namer,
    OutputPort, PortShape, Resolved, Tap,
};
use crate::ir::Role;

/// Shifts a spike train by exactly `steps` timesteps: one repeater per line
/// whose incoming tap carries the whole delay.
#[derive(Debug, Clone)]
pub struct DelayBrick {
    steps: u32,
}

impl DelayBrick {
    pub fn new(steps: u32) -> Result<Self, BrickError> {
        if steps < 1 {
            return Err(BrickError::Parameter("delay must be at least 1 step".into()));
        }
        Ok(DelayBrick { steps })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }
}

impl Brick for DelayBrick {
    fn kind(&self) -> &'static str {
        "delay"
    }

    fn input_arity(&self) -> usize {
        1
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        Ok(Resolved::new(inputs, vec![inputs[0].clone()], Depth::Fixed(self.steps)))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let shape = inputs[0].clone();
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) =
            control_pair(namer, done_delay(self.steps, shape.steps)).map_err(err)?;
        let relays = (0..shape.size())
            .map(|m| c.add_named_neuron(&format!("out{m}"), relay(), shape.coordinate(m), Role::Output))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let lines = relays
            .iter()
            .map(|id| vec![Tap { neuron: id.clone(), weight: 1.0, delay: self.steps }])
            .collect();
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![InputPort { shape: shape.clone(), lines }],
            output_ports: vec![OutputPort { shape, neurons: relays }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}
