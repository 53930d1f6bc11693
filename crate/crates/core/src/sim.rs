//! Discrete-time reference simulator.
//!
//! Every neuron advances every timestep. For neuron `j` at step `t`:
//!
//! 1. `V_hat = sum(w_ij over synapses whose pre fired at t - d_ij) + V(t-1)`,
//!    where the sum runs over incoming synapses in pre-id order and is formed
//!    before `V(t-1)` is added;
//! 2. if `V_hat > threshold` (or the neuron is injected at `t`) the neuron
//!    crossed: `V = reset` and it fires with probability `p_fire`;
//!    otherwise `V = (1 - decay) * V_hat` and it stays silent;
//! 3. a spike at `t` reaches each target at `t + d`.
//!
//! A crossing whose Bernoulli draw comes up 0 still resets. Stochastic draws
//! are a pure function of `(seed, neuron id, t)` so runs replay exactly and do
//! not depend on evaluation order.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ir::{Circuit, Injection, NeuronId, Role, Violation};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid circuit: {}", format_violations(.0))]
    Validation(Vec<Violation>),
    #[error("injection error: {0}")]
    Injection(String),
    #[error("configuration error: {0}")]
    Config(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Which neurons end up in the raster.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum RecordFilter {
    #[default]
    All,
    Roles(BTreeSet<Role>),
    Ids(BTreeSet<NeuronId>),
    /// Ids starting with the given prefix.
    Prefix(String),
}

impl RecordFilter {
    pub fn accepts(&self, id: &NeuronId, role: Role) -> bool {
        match self {
            RecordFilter::All => true,
            RecordFilter::Roles(roles) => roles.contains(&role),
            RecordFilter::Ids(ids) => ids.contains(id),
            RecordFilter::Prefix(p) => id.as_str().starts_with(p.as_str()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub horizon: u32,
    pub seed: u64,
    pub record: RecordFilter,
}

impl SimulationConfig {
    pub fn new(horizon: u32) -> Self {
        SimulationConfig { horizon, seed: 0, record: RecordFilter::All }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_record(mut self, record: RecordFilter) -> Self {
        self.record = record;
        self
    }
}

/// Spike events of one run, sorted by `(t, neuron id)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpikeRaster {
    horizon: u32,
    events: Vec<(u32, NeuronId)>,
    by_neuron: BTreeMap<NeuronId, Vec<u32>>,
}

impl SpikeRaster {
    pub fn from_events(horizon: u32, mut events: Vec<(u32, NeuronId)>) -> Self {
        events.sort();
        events.dedup();
        let mut by_neuron: BTreeMap<NeuronId, Vec<u32>> = BTreeMap::new();
        for (t, id) in &events {
            by_neuron.entry(id.clone()).or_default().push(*t);
        }
        SpikeRaster { horizon, events, by_neuron }
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn events(&self) -> &[(u32, NeuronId)] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Spike times of `id`, ascending. Empty if it never fired.
    pub fn times(&self, id: &NeuronId) -> &[u32] {
        self.by_neuron.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn first(&self, id: &NeuronId) -> Option<u32> {
        self.times(id).first().copied()
    }

    pub fn per_neuron(&self) -> &BTreeMap<NeuronId, Vec<u32>> {
        &self.by_neuron
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn draw_hashed(p: f64, seed: u64, id_hash: u64, t: u32) -> bool {
    if p >= 1.0 {
        return true;
    }
    let h = splitmix64(splitmix64(seed ^ splitmix64(id_hash)) ^ u64::from(t));
    let u = (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    u < p
}

/// Bernoulli draw for a neuron that crossed threshold at `t`.
pub fn stochastic_draw(p: f64, seed: u64, neuron: &NeuronId, t: u32) -> bool {
    draw_hashed(p, seed, fnv1a(neuron.as_str().as_bytes()), t)
}

/// A configured run over an immutable circuit.
///
/// Starts with the circuit's own stimulus; [`Simulation::inject`] adds more.
#[derive(Debug, Clone)]
pub struct Simulation<'c> {
    circuit: &'c Circuit,
    injections: BTreeSet<Injection>,
}

impl<'c> Simulation<'c> {
    pub fn new(circuit: &'c Circuit) -> Result<Self, SimError> {
        let violations = circuit.validate();
        if !violations.is_empty() {
            return Err(SimError::Validation(violations));
        }
        Ok(Simulation { circuit, injections: circuit.stimulus().cloned().collect() })
    }

    /// Drive input neurons at the given timesteps.
    pub fn inject<I>(&mut self, schedule: I) -> Result<&mut Self, SimError>
    where
        I: IntoIterator<Item = (NeuronId, u32)>,
    {
        let mut staged = Vec::new();
        for (id, t) in schedule {
            match self.circuit.neuron(&id) {
                None => return Err(SimError::Injection(format!("unknown neuron `{id}`"))),
                Some(n) if n.role != Role::Input => {
                    return Err(SimError::Injection(format!("`{id}` is not an input neuron")))
                }
                Some(_) => staged.push(Injection { neuron: id, t }),
            }
        }
        self.injections.extend(staged);
        Ok(self)
    }

    /// Drop every scheduled injection, including the circuit's own stimulus.
    pub fn clear_injections(&mut self) -> &mut Self {
        self.injections.clear();
        self
    }

    pub fn run(&self, config: &SimulationConfig) -> Result<SpikeRaster, SimError> {
        Ok(self.execute(config, &[])?.0)
    }

    /// Run and also return the post-update voltage `V(t)` of each traced neuron
    /// for every step.
    pub fn run_traced(
        &self,
        config: &SimulationConfig,
        trace: &[NeuronId],
    ) -> Result<(SpikeRaster, BTreeMap<NeuronId, Vec<f64>>), SimError> {
        for id in trace {
            if !self.circuit.contains(id) {
                return Err(SimError::Config(format!("cannot trace unknown neuron `{id}`")));
            }
        }
        self.execute(config, trace)
    }

    fn execute(
        &self,
        config: &SimulationConfig,
        trace: &[NeuronId],
    ) -> Result<(SpikeRaster, BTreeMap<NeuronId, Vec<f64>>), SimError> {
        if config.horizon < 1 {
            return Err(SimError::Config("horizon must be >= 1".into()));
        }
        let net = Compiled::new(self.circuit);
        warn_ignored_attrs(self.circuit);

        let n = net.ids.len();
        let mut drive: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for inj in &self.injections {
            if inj.t < config.horizon {
                drive.entry(inj.t).or_default().push(net.index[&inj.neuron]);
            }
        }

        let slots = net.max_delay as usize + 1;
        let mut history = vec![vec![false; n]; slots];
        let mut fired = vec![false; n];
        let mut forced = vec![false; n];
        let mut voltage: Vec<f64> = net.params.iter().map(|p| p.initial_voltage).collect();
        let traced: Vec<usize> = trace.iter().map(|id| net.index[id]).collect();
        let mut traces = vec![Vec::with_capacity(config.horizon as usize); traced.len()];
        let recorded: Vec<bool> = (0..n)
            .map(|j| config.record.accepts(&net.ids[j], net.roles[j]))
            .collect();
        let mut events = Vec::new();

        for t in 0..config.horizon {
            if let Some(targets) = drive.get(&t) {
                for &j in targets {
                    forced[j] = true;
                }
            }
            for j in 0..n {
                let mut arrivals = 0.0;
                for k in net.offsets[j]..net.offsets[j + 1] {
                    let (pre, weight, delay) = net.incoming[k];
                    if delay <= t && history[(t - delay) as usize % slots][pre] {
                        arrivals += weight;
                    }
                }
                let v_hat = arrivals + voltage[j];
                let p = &net.params[j];
                if forced[j] || v_hat > p.threshold {
                    voltage[j] = p.reset;
                    fired[j] = draw_hashed(p.p_fire, config.seed, net.hashes[j], t);
                } else {
                    voltage[j] = (1.0 - p.decay) * v_hat;
                    fired[j] = false;
                }
                if fired[j] && recorded[j] {
                    events.push((t, net.ids[j].clone()));
                }
            }
            for (trace, &j) in traces.iter_mut().zip(&traced) {
                trace.push(voltage[j]);
            }
            forced.iter_mut().for_each(|f| *f = false);
            std::mem::swap(&mut history[t as usize % slots], &mut fired);
        }

        let traces = trace.iter().cloned().zip(traces).collect();
        Ok((SpikeRaster::from_events(config.horizon, events), traces))
    }
}

/// Simulate `circuit` with its built-in stimulus.
pub fn run(circuit: &Circuit, config: &SimulationConfig) -> Result<SpikeRaster, SimError> {
    Simulation::new(circuit)?.run(config)
}

/// Index-based view of a circuit with incoming synapses grouped per target.
struct Compiled {
    ids: Vec<NeuronId>,
    index: BTreeMap<NeuronId, usize>,
    roles: Vec<Role>,
    params: Vec<crate::ir::NeuronParams>,
    hashes: Vec<u64>,
    offsets: Vec<usize>,
    incoming: Vec<(usize, f64, u32)>,
    max_delay: u32,
}

impl Compiled {
    fn new(circuit: &Circuit) -> Self {
        let ids: Vec<NeuronId> = circuit.neurons().map(|n| n.id.clone()).collect();
        let index: BTreeMap<NeuronId, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut per_target: Vec<Vec<(usize, f64, u32)>> = vec![Vec::new(); ids.len()];
        // (pre, post) order, so each target's list is sorted by pre id
        for s in circuit.synapses() {
            per_target[index[&s.post]].push((index[&s.pre], s.weight, s.delay));
        }
        let mut offsets = Vec::with_capacity(ids.len() + 1);
        let mut incoming = Vec::new();
        offsets.push(0);
        for list in per_target {
            incoming.extend(list);
            offsets.push(incoming.len());
        }
        Compiled {
            roles: circuit.neurons().map(|n| n.role).collect(),
            params: circuit.neurons().map(|n| n.params).collect(),
            hashes: ids.iter().map(|id| fnv1a(id.as_str().as_bytes())).collect(),
            ids,
            index,
            offsets,
            incoming,
            max_delay: circuit.max_delay(),
        }
    }
}

fn warn_ignored_attrs(circuit: &Circuit) {
    let keys: BTreeSet<&str> = circuit
        .neurons()
        .flat_map(|n| n.attrs.keys())
        .chain(circuit.synapses().flat_map(|s| s.attrs.keys()))
        .map(String::as_str)
        .collect();
    if !keys.is_empty() {
        log::warn!(
            "simulator ignores extended attributes: {}",
            keys.into_iter().collect::<Vec<_>>().join(", ")
        );
    }
}
