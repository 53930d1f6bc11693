use super::require_dims;
use crate::brick::{
    control_pair, done_delay, relay, Brick, BrickError, BuiltBrick, Coding, Depth, InputPort,
    Namer, OutputPort, PortShape, Resolved, Steps, Tap, VETO,
};
use crate::ir::Role;

pub const DEFAULT_MAX_BITS: usize = 8;

/// Binary to one-hot decoder.
///
/// Bit `b` of the word is input line `b` (least significant first); output
/// line `w` fires for word `w`. Each clear bit position has a complement
/// neuron that fires when the bit is absent, driven by begin for the first
/// word and by a pacemaker for the rest of the input window. Decoder `w`
/// (threshold `m - 0.5`) sums +1 from each bit it needs set, -m from each bit
/// it needs clear and +1 from the complement of each bit it needs clear, so
/// exactly one decoder fires per presented word, two steps later.
#[derive(Debug, Clone)]
pub struct BinaryToUnaryBrick {
    bits: usize,
}

impl BinaryToUnaryBrick {
    pub fn new(bits: usize) -> Result<Self, BrickError> {
        Self::with_max_bits(bits, DEFAULT_MAX_BITS)
    }

    pub fn with_max_bits(bits: usize, max_bits: usize) -> Result<Self, BrickError> {
        if bits < 1 {
            return Err(BrickError::Parameter("decoder needs at least one bit".into()));
        }
        if bits > max_bits {
            return Err(BrickError::Capacity(format!(
                "{bits}-bit decoder exceeds the {max_bits}-bit bound"
            )));
        }
        Ok(BinaryToUnaryBrick { bits })
    }
}

impl Brick for BinaryToUnaryBrick {
    fn kind(&self) -> &'static str {
        "binary_to_unary"
    }

    fn input_arity(&self) -> usize {
        1
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        require_dims("binary_to_unary", &inputs[0], &[self.bits])?;
        let out = PortShape::new(vec![1 << self.bits], Coding::OneHot, inputs[0].steps)?;
        Ok(Resolved::new(inputs, vec![out], Depth::Fixed(2)))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let m = self.bits;
        let window = inputs[0].steps;
        let out_shape = self.resolve(inputs)?.outputs.remove(0);
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) = control_pair(namer, done_delay(2, window)).map_err(err)?;

        // drives the complements for words after the first
        let pacer = c
            .add_named_neuron("pacer", relay().with_decay(0.0), vec![], Role::Internal)
            .map_err(err)?;
        match window {
            Steps::Finite(0) | Steps::Finite(1) => {}
            Steps::Finite(t) => {
                c.add_synapse(&begin, &pacer, 1.0, 1).map_err(err)?;
                c.add_synapse(&pacer, &pacer, 1.0, 1).map_err(err)?;
                let stop = c
                    .add_named_neuron("stop", relay(), vec![], Role::Internal)
                    .map_err(err)?;
                c.add_synapse(&begin, &stop, 1.0, t - 1).map_err(err)?;
                c.add_synapse(&stop, &pacer, VETO, 1).map_err(err)?;
            }
            Steps::Streaming => {
                c.add_synapse(&begin, &pacer, 1.0, 1).map_err(err)?;
                c.add_synapse(&pacer, &pacer, 1.0, 1).map_err(err)?;
            }
        }

        let complements = (0..m)
            .map(|b| c.add_named_neuron(&format!("not{b}"), relay(), vec![], Role::Internal))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        for q in &complements {
            c.add_synapse(&begin, q, 1.0, 1).map_err(err)?;
            c.add_synapse(&pacer, q, 1.0, 1).map_err(err)?;
        }

        let decode = relay().with_threshold(m as f64 - 0.5);
        let words = (0..out_shape.size())
            .map(|w| c.add_named_neuron(&format!("out{w}"), decode, vec![w], Role::Output))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let mut lines: Vec<Vec<Tap>> = (0..m)
            .map(|b| vec![Tap { neuron: complements[b].clone(), weight: -1.0, delay: 1 }])
            .collect();
        for (w, word) in words.iter().enumerate() {
            for (b, line) in lines.iter_mut().enumerate() {
                if w >> b & 1 == 1 {
                    line.push(Tap { neuron: word.clone(), weight: 1.0, delay: 2 });
                } else {
                    line.push(Tap { neuron: word.clone(), weight: -(m as f64), delay: 2 });
                    c.add_synapse(&complements[b], word, 1.0, 1).map_err(err)?;
                }
            }
        }
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![InputPort { shape: inputs[0].clone(), lines }],
            output_ports: vec![OutputPort { shape: out_shape, neurons: words }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}
