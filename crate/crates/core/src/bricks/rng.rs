use crate::brick::{
    control_pair, relay, Brick, BrickError, BuiltBrick, Coding, Depth, Namer, OutputPort,
    PortShape, Resolved, Steps,
};
use crate::ir::Role;

/// Streams one random `m`-bit word per timestep.
///
/// A self-sustaining pacemaker drives `m` stochastic neurons over threshold
/// every step; each fires with probability `p`. The first word appears two
/// steps after begin.
#[derive(Debug, Clone)]
pub struct BinaryRngBrick {
    bits: usize,
    p: f64,
}

impl BinaryRngBrick {
    pub fn new(bits: usize, p: f64) -> Result<Self, BrickError> {
        if bits < 1 {
            return Err(BrickError::Parameter("need at least one bit".into()));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(BrickError::Parameter(format!("probability {p} outside (0, 1]")));
        }
        Ok(BinaryRngBrick { bits, p })
    }
}

impl Brick for BinaryRngBrick {
    fn kind(&self) -> &'static str {
        "binary_rng"
    }

    fn input_arity(&self) -> usize {
        0
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        let out = PortShape::new(vec![self.bits], Coding::BinaryVector, Steps::Streaming)?;
        Ok(Resolved::new(inputs, vec![out], Depth::Fixed(2)))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let out_shape = self.resolve(inputs)?.outputs.remove(0);
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) = control_pair(namer, None).map_err(err)?;
        let pacer = c
            .add_named_neuron("pacer", relay().with_decay(0.0), vec![], Role::Internal)
            .map_err(err)?;
        c.add_synapse(&begin, &pacer, 1.0, 1).map_err(err)?;
        c.add_synapse(&pacer, &pacer, 1.0, 1).map_err(err)?;
        let coin = relay().with_p_fire(self.p);
        let bits = (0..self.bits)
            .map(|b| c.add_named_neuron(&format!("out{b}"), coin, vec![b], Role::Output))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        for bit in &bits {
            c.add_synapse(&pacer, bit, 1.0, 1).map_err(err)?;
        }
        Ok(BuiltBrick {
            fragment: c,
            input_ports: Vec::new(),
            output_ports: vec![OutputPort { shape: out_shape, neurons: bits }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}
