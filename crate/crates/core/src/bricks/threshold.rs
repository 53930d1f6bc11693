use super::require_coding;
use crate::brick::{
    control_pair, relay, Brick, BrickError, BuiltBrick, Coding, Depth, InputPort, Namer,
    OutputPort, PortShape, Resolved, Steps, Tap, VETO,
};
use crate::ir::Role;

/// Compares temporally coded values against a reference `R`.
///
/// Per channel: a latching gate neuron starts firing when the value spike
/// arrives and is vetoed for good at the deadline; a readout neuron samples
/// the gate at `begin + R + 2`, so the output is a single-step binary vector
/// with bit set iff `value <= R`.
#[derive(Debug, Clone)]
pub struct ThresholdBrick {
    reference: u32,
}

impl ThresholdBrick {
    pub fn new(reference: i64) -> Result<Self, BrickError> {
        let reference = u32::try_from(reference)
            .map_err(|_| BrickError::Parameter(format!("reference {reference} must be a non-negative integer")))?;
        Ok(ThresholdBrick { reference })
    }

    fn depth(&self) -> u32 {
        self.reference + 2
    }
}

impl Brick for ThresholdBrick {
    fn kind(&self) -> &'static str {
        "threshold"
    }

    fn input_arity(&self) -> usize {
        1
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        require_coding("threshold", &inputs[0], Coding::TemporalValue)?;
        let out = inputs[0].with_coding(Coding::BinaryVector).with_steps(Steps::Finite(1));
        Ok(Resolved::new(inputs, vec![out], Depth::Fixed(self.depth())))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let out_shape = self.resolve(inputs)?.outputs.remove(0);
        let err = |e| BrickError::build(namer.tag(), e);
        let deadline = self.depth();
        let (mut c, begin, done) = control_pair(namer, Some(deadline + 1)).map_err(err)?;
        let gate_params = relay().with_decay(0.0);
        let read_params = relay().with_threshold(1.5);
        let mut lines = Vec::new();
        let mut outputs = Vec::new();
        for m in 0..out_shape.size() {
            let gate = c
                .add_named_neuron(&format!("gate{m}"), gate_params, vec![], Role::Internal)
                .map_err(err)?;
            let out = c
                .add_named_neuron(&format!("out{m}"), read_params, out_shape.coordinate(m), Role::Output)
                .map_err(err)?;
            c.add_synapse(&gate, &gate, 1.0, 1).map_err(err)?;
            c.add_synapse(&begin, &gate, VETO, deadline).map_err(err)?;
            c.add_synapse(&gate, &out, 1.0, 1).map_err(err)?;
            c.add_synapse(&begin, &out, 1.0, deadline).map_err(err)?;
            lines.push(vec![Tap::unit(gate)]);
            outputs.push(out);
        }
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![InputPort { shape: inputs[0].clone(), lines }],
            output_ports: vec![OutputPort { shape: out_shape, neurons: outputs }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brick::resolve_metadata;

    #[test]
    fn negative_reference_rejected() {
        assert!(matches!(ThresholdBrick::new(-1), Err(BrickError::Parameter(_))));
    }

    #[test]
    fn requires_temporal_input() {
        let b = ThresholdBrick::new(5).unwrap();
        assert!(matches!(resolve_metadata(&b, &[PortShape::binary(1)]), Err(BrickError::Shape(_))));
        let temporal = PortShape::binary(1).with_coding(Coding::TemporalValue).with_steps(Steps::Finite(10));
        let r = resolve_metadata(&b, &[temporal]).unwrap();
        assert_eq!(r.metadata.depth, Depth::Fixed(7));
        assert_eq!(r.metadata.t_out, Steps::Finite(1));
    }
}
