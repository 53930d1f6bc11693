use super::require_coding;
use crate::brick::{
    control_pair, relay, Brick, BrickError, BuiltBrick, Coding, Depth, InputPort, Namer,
    OutputPort, PortShape, Resolved, Steps, Tap,
};
use crate::ir::Role;

/// First-come-first-serve minimum over `k` temporally coded channels.
///
/// Each channel has a non-leaky relay that forwards its spike and inhibits
/// every rival with weight `-k`. The earliest spike wins; spikes tied for
/// earliest all fire because the inhibition lands one step later. For inputs
/// with more than one axis the race runs independently along `axis` for every
/// position of the remaining axes.
#[derive(Debug, Clone)]
pub struct MinimumBrick {
    arity: usize,
    axis: usize,
}

impl MinimumBrick {
    pub fn new(arity: usize) -> Result<Self, BrickError> {
        Self::along(arity, 0)
    }

    pub fn along(arity: usize, axis: usize) -> Result<Self, BrickError> {
        if arity < 1 {
            return Err(BrickError::Parameter("minimum needs at least one channel".into()));
        }
        Ok(MinimumBrick { arity, axis })
    }
}

impl Brick for MinimumBrick {
    fn kind(&self) -> &'static str {
        "minimum"
    }

    fn input_arity(&self) -> usize {
        1
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        let input = &inputs[0];
        require_coding("minimum", input, Coding::TemporalValue)?;
        if input.dims.get(self.axis) != Some(&self.arity) {
            return Err(BrickError::Shape(format!(
                "minimum over {} channels on axis {} does not fit dims {:?}",
                self.arity, self.axis, input.dims
            )));
        }
        let out = input.with_coding(Coding::OneHot).with_steps(Steps::Finite(1));
        Ok(Resolved::new(inputs, vec![out], Depth::Runtime { min: 1 }))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let input = &inputs[0];
        let out_shape = self.resolve(inputs)?.outputs.remove(0);
        let err = |e| BrickError::build(namer.tag(), e);
        // winners fire by begin + T_in
        let done_after = input.steps.finite().map(|t| t + 1);
        let (mut c, begin, done) = control_pair(namer, done_after).map_err(err)?;
        let params = relay().with_decay(0.0);
        let relays = (0..out_shape.size())
            .map(|m| c.add_named_neuron(&format!("out{m}"), params, out_shape.coordinate(m), Role::Output))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let inhibition = -(self.arity as f64);
        for (m, winner) in relays.iter().enumerate() {
            let coord = out_shape.coordinate(m);
            for rival_channel in (0..self.arity).filter(|&r| r != coord[self.axis]) {
                let mut rival = coord.clone();
                rival[self.axis] = rival_channel;
                let rival = &relays[out_shape.flat(&rival)];
                c.add_synapse(winner, rival, inhibition, 1).map_err(err)?;
            }
        }
        let lines = relays.iter().map(|id| vec![Tap::unit(id.clone())]).collect();
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![InputPort { shape: input.clone(), lines }],
            output_ports: vec![OutputPort { shape: out_shape, neurons: relays }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brick::build;

    fn temporal(dims: Vec<usize>) -> PortShape {
        PortShape::new(dims, Coding::TemporalValue, Steps::Finite(10)).unwrap()
    }

    #[test]
    fn lateral_inhibition_is_complete_within_groups() {
        let b = MinimumBrick::new(3).unwrap();
        let built = build(&b, &[temporal(vec![3])], &Namer::new("m")).unwrap();
        let inhibitory = built.fragment.synapses().filter(|s| s.weight == -3.0).count();
        assert_eq!(inhibitory, 6);
    }

    #[test]
    fn axis_groups_are_independent() {
        let b = MinimumBrick::along(2, 1).unwrap();
        let built = build(&b, &[temporal(vec![3, 2])], &Namer::new("m")).unwrap();
        // three groups of two channels, one synapse each way
        assert_eq!(built.fragment.synapses().filter(|s| s.weight < 0.0).count(), 6);
    }

    #[test]
    fn channel_count_must_match_axis() {
        let b = MinimumBrick::new(3).unwrap();
        assert!(matches!(b.resolve(&[temporal(vec![4])]), Err(BrickError::Shape(_))));
    }
}
