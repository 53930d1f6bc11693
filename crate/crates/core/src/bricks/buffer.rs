use crate::brick::{
    relay, Brick, BrickError, BuiltBrick, Depth, InputPort, Namer, OutputPort, PortShape,
    Resolved, Steps, Tap, VETO,
};
use crate::ir::Role;

/// Holds a single-step spike pattern until released.
///
/// Per line a self-exciting latch starts firing on the first arriving spike
/// and keeps firing; a gate ANDs the latch with the release signal. The
/// brick's `begin` neuron is the release: a fire-once integrator that fires
/// after `release_arity` unit arrivals, which lets a scaffold wire several
/// done signals straight into it. Output is the latched pattern, once, one
/// step after release.
#[derive(Debug, Clone)]
pub struct BufferBrick {
    release_arity: usize,
}

impl BufferBrick {
    pub fn new(release_arity: usize) -> Result<Self, BrickError> {
        if release_arity < 1 {
            return Err(BrickError::Parameter("release arity must be >= 1".into()));
        }
        Ok(BufferBrick { release_arity })
    }

    pub fn release_arity(&self) -> usize {
        self.release_arity
    }
}

impl Brick for BufferBrick {
    fn kind(&self) -> &'static str {
        "buffer"
    }

    fn input_arity(&self) -> usize {
        1
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        if inputs[0].steps != Steps::Finite(1) {
            return Err(BrickError::UnsupportedBuffer(format!(
                "buffers hold single-step ports only; upstream spans {} steps",
                inputs[0].steps
            )));
        }
        Ok(Resolved::new(inputs, vec![inputs[0].clone()], Depth::Fixed(1)))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let shape = self.resolve(inputs)?.outputs.remove(0);
        let err = |e| BrickError::build(namer.tag(), e);
        let mut c = namer.circuit();
        let release = relay()
            .with_threshold(self.release_arity as f64 - 0.5)
            .with_decay(0.0)
            .with_reset(VETO);
        let begin = c.add_named_neuron("begin", release, vec![], Role::Control).map_err(err)?;
        let done = c.add_named_neuron("done", relay(), vec![], Role::Control).map_err(err)?;
        c.add_synapse(&begin, &done, 1.0, 2).map_err(err)?;
        let latch = relay().with_decay(0.0);
        let gate = relay().with_threshold(1.5);
        let mut lines = Vec::new();
        let mut outputs = Vec::new();
        for m in 0..shape.size() {
            let l = c.add_named_neuron(&format!("latch{m}"), latch, vec![], Role::Internal).map_err(err)?;
            let g = c
                .add_named_neuron(&format!("out{m}"), gate, shape.coordinate(m), Role::Output)
                .map_err(err)?;
            c.add_synapse(&l, &l, 1.0, 1).map_err(err)?;
            c.add_synapse(&l, &g, 1.0, 1).map_err(err)?;
            c.add_synapse(&begin, &g, 1.0, 1).map_err(err)?;
            lines.push(vec![Tap::unit(l)]);
            outputs.push(g);
        }
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![InputPort { shape: inputs[0].clone(), lines }],
            output_ports: vec![OutputPort { shape, neurons: outputs }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brick::{build, resolve_metadata};
    use crate::ir::{Circuit, NeuronParams};
    use crate::sim::{Simulation, SimulationConfig};

    #[test]
    fn multi_step_upstream_is_unsupported() {
        let b = BufferBrick::new(1).unwrap();
        let long = PortShape::binary(2).with_steps(Steps::Finite(4));
        assert!(matches!(resolve_metadata(&b, &[long]), Err(BrickError::UnsupportedBuffer(_))));
    }

    /// Drives the fragment directly: lines via input neurons, release via an
    /// input neuron wired into begin.
    fn harness(lines: &[usize], line_time: u32, release_time: Option<u32>) -> Vec<(u32, usize)> {
        let b = BufferBrick::new(1).unwrap();
        let built = build(&b, &[PortShape::binary(3)], &Namer::new("buf")).unwrap();
        let mut c = Circuit::new("h");
        let map = c.merge(&built.fragment, "").unwrap();
        let mut schedule = Vec::new();
        for (m, taps) in built.input_ports[0].lines.iter().enumerate() {
            let src = c.add_named_neuron(&format!("in{m}"), NeuronParams::default(), vec![], Role::Input).unwrap();
            for tap in taps {
                c.add_synapse(&src, &map[&tap.neuron], tap.weight, tap.delay).unwrap();
            }
            if lines.contains(&m) {
                schedule.push((src, line_time));
            }
        }
        let rel = c.add_named_neuron("release", NeuronParams::default(), vec![], Role::Input).unwrap();
        c.add_synapse(&rel, &map[&built.begin], 1.0, 1).unwrap();
        if let Some(t) = release_time {
            // begin fires one step after the release input
            schedule.push((rel, t - 1));
        }
        let mut sim = Simulation::new(&c).unwrap();
        sim.inject(schedule).unwrap();
        let raster = sim.run(&SimulationConfig::new(20)).unwrap();
        let mut out = Vec::new();
        for (m, id) in built.output_ports[0].neurons.iter().enumerate() {
            for &t in raster.times(&map[id]) {
                out.push((t, m));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn releases_latched_pattern_once() {
        assert_eq!(harness(&[0, 2], 3, Some(9)), vec![(10, 0), (10, 2)]);
    }

    #[test]
    fn release_with_nothing_latched_is_silent() {
        assert!(harness(&[], 3, Some(9)).is_empty());
    }

    #[test]
    fn no_release_no_output() {
        assert!(harness(&[1], 3, None).is_empty());
    }
}
