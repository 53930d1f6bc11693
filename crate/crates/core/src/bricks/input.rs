use crate::brick::{
    control_pair, done_delay, relay, Brick, BrickError, BuiltBrick, Coding, Depth, InputPort,
    Namer, OutputPort, PortShape, Resolved, Steps,
};
use crate::ir::Role;

/// `(line, timestep)` injection events for an input brick. Timesteps are
/// relative to the brick's presentation time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpikeSchedule(Vec<(usize, u32)>);

impl SpikeSchedule {
    pub fn new(mut events: Vec<(usize, u32)>) -> Self {
        events.sort_unstable();
        events.dedup();
        SpikeSchedule(events)
    }

    pub fn events(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(usize, u32)> for SpikeSchedule {
    fn from_iter<I: IntoIterator<Item = (usize, u32)>>(iter: I) -> Self {
        SpikeSchedule::new(iter.into_iter().collect())
    }
}

/// Source brick whose output lines fire exactly per its schedule.
#[derive(Debug, Clone)]
pub struct InputBrick {
    shape: PortShape,
    schedule: SpikeSchedule,
}

impl InputBrick {
    pub fn new(dims: Vec<usize>, coding: Coding, schedule: SpikeSchedule) -> Result<Self, BrickError> {
        let last = schedule.events().iter().map(|&(_, t)| t).max();
        let steps = Steps::Finite(last.map_or(1, |t| t + 1));
        let shape = PortShape::new(dims, coding, steps)?;
        if let Some(&(line, _)) = schedule.events().iter().find(|&&(line, _)| line >= shape.size()) {
            return Err(BrickError::Parameter(format!(
                "schedule line {line} outside shape of {} lines",
                shape.size()
            )));
        }
        Ok(InputBrick { shape, schedule })
    }

    pub fn shape(&self) -> &PortShape {
        &self.shape
    }

    pub fn schedule(&self) -> &SpikeSchedule {
        &self.schedule
    }
}

impl Brick for InputBrick {
    fn kind(&self) -> &'static str {
        "input"
    }

    fn input_arity(&self) -> usize {
        0
    }

    fn resolve(&self, inputs: &[PortShape]) -> Result<Resolved, BrickError> {
        Ok(Resolved::new(inputs, vec![self.shape.clone()], Depth::Fixed(0)))
    }

    fn construct(&self, _inputs: &[PortShape], namer: &Namer) -> Result<BuiltBrick, BrickError> {
        let err = |e| BrickError::build(namer.tag(), e);
        let (mut c, begin, done) = control_pair(namer, done_delay(0, self.shape.steps)).map_err(err)?;
        let mut outputs = Vec::with_capacity(self.shape.size());
        let mut sources = Vec::with_capacity(self.shape.size());
        for line in 0..self.shape.size() {
            let src = c
                .add_named_neuron(&format!("src{line}"), relay(), vec![line], Role::Input)
                .map_err(err)?;
            let out = c
                .add_named_neuron(&format!("out{line}"), relay(), self.shape.coordinate(line), Role::Output)
                .map_err(err)?;
            c.add_synapse(&src, &out, 1.0, 1).map_err(err)?;
            sources.push(src);
            outputs.push(out);
        }
        // source injected one step ahead so the output fires at begin + t
        let stimulus = self
            .schedule
            .events()
            .iter()
            .map(|&(line, t)| (sources[line].clone(), t))
            .collect();
        Ok(BuiltBrick {
            fragment: c,
            input_ports: Vec::<InputPort>::new(),
            output_ports: vec![OutputPort { shape: self.shape.clone(), neurons: outputs }],
            begin,
            done,
            stimulus,
        })
    }
}
