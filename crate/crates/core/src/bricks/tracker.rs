use super::require_dims;
use crate::brick::{
    control_pair, relay, Brick, BrickError, BuiltBrick, Coding, Depth, InputPort, Namer,
    OutputPort, PortShape, Resolved, Steps, Tap,
};
use crate::ir::{NeuronId, Role};

/// Ring-attractor position tracker, one ring per axis.
///
/// Input line `2a` moves axis `a` by +1, line `2a + 1` by -1; silence on both
/// holds. Each ring position `k` has a bump neuron and three gates: hold
/// (bump and no command), plus and minus (bump and command, threshold 1.5).
/// The gates re-excite bump `k`, `k + 1` or `k - 1` one step later, so the
/// bump fires every second step and a command is consumed whenever it is
/// presented in the same step as the bump fires: at `begin`, `begin + 2`,
/// and so on. After `n` consumed commands the bump fires at `begin + 2 + 2n`
/// on `(start + sum of commands) mod M`.
#[derive(Debug, Clone)]
pub struct GridTrackerBrick {
    sizes: Vec<usize>,
    start: Vec<usize>,
}

impl GridTrackerBrick {
    pub fn new(sizes: Vec<usize>) -> Result<Self, BrickError> {
        let start = vec![0; sizes.len()];
        Self::starting_at(sizes, start)
    }

    pub fn starting_at(sizes: Vec<usize>, start: Vec<usize>) -> Result<Self, BrickError> {
        if sizes.is_empty() {
            return Err(BrickError::Parameter("tracker needs at least one axis".into()));
        }
        if let Some(m) = sizes.iter().find(|&&m| m < 3) {
            return Err(BrickError::Parameter(format!("ring size {m} < 3")));
        }
        if start.len() != sizes.len() || start.iter().zip(&sizes).any(|(s, m)| s >= m) {
            return Err(BrickError::Parameter(format!(
                "start {start:?} does not fit ring sizes {sizes:?}"
            )));
        }
        Ok(GridTrackerBrick { sizes, start })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn start(&self) -> &[usize] {
        &self.start
    }
}

impl Brick for GridTrackerBrick {
    fn kind(&self) -> &'static str {
        "grid_tracker"
    }

    fn input_arity(&self) -> usize {
        1
    }

    fn output_arity(&self) -> usize {
        self.sizes.len()
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        require_dims("grid_tracker", &inputs[0], &[2 * self.sizes.len()])?;
        let outputs = self
            .sizes
            .iter()
            .map(|&m| PortShape::new(vec![m], Coding::OneHot, Steps::Streaming))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Resolved::new(inputs, outputs, Depth::Fixed(2)))
    }

    fn construct(&self, inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let resolved = self.resolve(inputs)?;
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) = control_pair(namer, None).map_err(err)?;
        let mut lines: Vec<Vec<Tap>> = vec![Vec::new(); 2 * self.sizes.len()];
        let mut output_ports = Vec::new();
        let gate = relay().with_threshold(1.5);
        for (axis, (&m, shape)) in self.sizes.iter().zip(resolved.outputs).enumerate() {
            let mut add = |name: String, params, index: Vec<usize>, role| {
                c.add_named_neuron(&name, params, index, role)
            };
            let mut bump = Vec::with_capacity(m);
            let mut hold = Vec::with_capacity(m);
            let mut plus = Vec::with_capacity(m);
            let mut minus = Vec::with_capacity(m);
            for k in 0..m {
                bump.push(add(format!("a{axis}_out{k}"), relay(), vec![k], Role::Output).map_err(err)?);
                hold.push(add(format!("a{axis}_hold{k}"), relay(), vec![], Role::Internal).map_err(err)?);
                plus.push(add(format!("a{axis}_plus{k}"), gate, vec![], Role::Internal).map_err(err)?);
                minus.push(add(format!("a{axis}_minus{k}"), gate, vec![], Role::Internal).map_err(err)?);
            }
            for k in 0..m {
                let up = (k + 1) % m;
                let down = (k + m - 1) % m;
                for g in [&hold[k], &plus[k], &minus[k]] {
                    c.add_synapse(&bump[k], g, 1.0, 1).map_err(err)?;
                }
                c.add_synapse(&hold[k], &bump[k], 1.0, 1).map_err(err)?;
                c.add_synapse(&plus[k], &bump[up], 1.0, 1).map_err(err)?;
                c.add_synapse(&minus[k], &bump[down], 1.0, 1).map_err(err)?;
            }
            // begin stands in for the initial bump
            let s = self.start[axis];
            for g in [&hold[s], &plus[s], &minus[s]] {
                c.add_synapse(&begin, g, 1.0, 1).map_err(err)?;
            }
            let command = |gates: &[NeuronId], holds: &[NeuronId]| -> Vec<Tap> {
                gates
                    .iter()
                    .map(|g| Tap::unit(g.clone()))
                    .chain(holds.iter().map(|h| Tap { neuron: h.clone(), weight: -1.0, delay: 1 }))
                    .collect()
            };
            lines[2 * axis] = command(&plus, &hold);
            lines[2 * axis + 1] = command(&minus, &hold);
            output_ports.push(OutputPort { shape, neurons: bump });
        }
        Ok(BuiltBrick {
            fragment: c,
            input_ports: vec![InputPort { shape: inputs[0].clone(), lines }],
            output_ports,
            begin,
            done,
            stimulus: Vec::new(),
        })
    }
}
