use super::require_dims;
use crate::brick::{
    control_pair, relay, Brick, BrickError, BuiltBrick, Coding, Depth, InputPort, Namer,
    OutputPort, PortShape, Resolved, Steps, Tap, VETO,
};
use crate::ir::Role;

/// Cross-correlation of two binary vectors of length `N`.
///
/// An `N x N` coincidence layer fires neuron `(i, j)` when `u[i]` and `v[j]`
/// are both set. Output line `p` stands for offset `s = p - (N - 1) = j - i`
/// and integrates its coincidence count `c_s`; a pacemaker then adds one per
/// step, so line `s` crosses threshold `N - 0.5` after `N - c_s` ticks. The
/// first lines to cross veto every other line and the pacemaker, leaving the
/// argmax offsets as a one-hot (or tied) output at `begin + 2 + N - c_max`.
#[derive(Debug, Clone)]
pub struct CrossCorrelationBrick {
    n: usize,
}

impl CrossCorrelationBrick {
    pub fn new(n: usize) -> Result<Self, BrickError> {
        if n < 1 {
            return Err(BrickError::Parameter("cross-correlation length must be >= 1".into()));
        }
        Ok(CrossCorrelationBrick { n })
    }

    pub fn input_len(&self) -> usize {
        self.n
    }

    /// Offset represented by output line `line`.
    pub fn offset_of(&self, line: usize) -> isize {
        line as isize - (self.n as isize - 1)
    }

    fn latest_fire(&self) -> u32 {
        2 + self.n as u32
    }
}

impl Brick for CrossCorrelationBrick {
    fn kind(&self) -> &'static str {
        "cross_correlation"
    }

    fn input_arity(&self) -> usize {
        2
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        for port in inputs {
            require_dims("cross_correlation", port, &[self.n])?;
            if port.steps != Steps::Finite(1) {
                return Err(BrickError::Shape(format!(
                    "cross_correlation needs single-step inputs, got {} steps",
                    port.steps
                )));
            }
        }
        let out = PortShape::new(vec![2 * self.n - 1], Coding::OneHot, Steps::Finite(1))?;
        Ok(Resolved::new(inputs, vec![out], Depth::Runtime { min: 2 }))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let n = self.n;
        let out_shape = self.resolve(inputs)?.outputs.remove(0);
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) = control_pair(namer, Some(self.latest_fire() + 1)).map_err(err)?;

        let coincidence = relay().with_threshold(1.5);
        let mut layer = vec![Vec::with_capacity(n); n];
        for (i, row) in layer.iter_mut().enumerate() {
            for j in 0..n {
                let id = c
                    .add_named_neuron(&format!("c{i}_{j}"), coincidence, vec![], Role::Internal)
                    .map_err(err)?;
                row.push(id);
            }
        }

        let race = relay()
            .with_threshold(n as f64 - 0.5)
            .with_decay(0.0)
            .with_reset(VETO);
        let outputs = (0..out_shape.size())
            .map(|p| c.add_named_neuron(&format!("out{p}"), race, vec![p], Role::Output))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        for (i, row) in layer.iter().enumerate() {
            for (j, id) in row.iter().enumerate() {
                let line = j + n - 1 - i;
                c.add_synapse(id, &outputs[line], 1.0, 1).map_err(err)?;
            }
        }

        let pacer = c
            .add_named_neuron("pacer", relay().with_decay(0.0), vec![], Role::Internal)
            .map_err(err)?;
        c.add_synapse(&begin, &pacer, 1.0, 2).map_err(err)?;
        c.add_synapse(&pacer, &pacer, 1.0, 1).map_err(err)?;
        for out in &outputs {
            c.add_synapse(&pacer, out, 1.0, 1).map_err(err)?;
            c.add_synapse(out, &pacer, VETO, 1).map_err(err)?;
            for rival in outputs.iter().filter(|r| *r != out) {
                c.add_synapse(out, rival, VETO, 1).map_err(err)?;
            }
        }

        let u_lines = (0..n)
            .map(|i| layer[i].iter().cloned().map(Tap::unit).collect())
            .collect();
        let v_lines = (0..n)
            .map(|j| layer.iter().map(|row| Tap::unit(row[j].clone())).collect())
            .collect();
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![
                InputPort { shape: inputs[0].clone(), lines: u_lines },
                InputPort { shape: inputs[1].clone(), lines: v_lines },
            ],
            output_ports: vec![OutputPort { shape: out_shape, neurons: outputs }],
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}
