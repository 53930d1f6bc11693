//! Shared test support: an isolated-brick bench and independent oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use brickwork::brick::{build, Brick, BuiltBrick, Namer, PortShape};
use brickwork::ir::{Circuit, NeuronId, NeuronParams, Role};
use brickwork::sim::{stochastic_draw, Simulation, SimulationConfig, SpikeRaster};

/// One brick wired to stand-in upstream neurons, one per input line.
/// Upstream neuron `(port, line)` is forced to fire at `begin_at + t` for a
/// relative spike time `t`, exactly like an upstream output port would.
pub struct Bench {
    pub circuit: Circuit,
    pub built: BuiltBrick,
    pub map: BTreeMap<NeuronId, NeuronId>,
    pub upstream: Vec<Vec<NeuronId>>,
    pub begin_at: u32,
}

pub fn bench(brick: &dyn Brick, inputs: &[PortShape], begin_at: u32) -> Bench {
    assert!(begin_at >= 1);
    let built = build(brick, inputs, &Namer::new("dut")).expect("brick builds");
    let mut circuit = Circuit::new("bench");
    let map = circuit.merge(&built.fragment, "").unwrap();
    let go = circuit.add_named_neuron("go", NeuronParams::default(), vec![], Role::Input).unwrap();
    circuit.add_synapse(&go, &map[&built.begin], 1.0, 1).unwrap();
    circuit.add_stimulus(&go, begin_at - 1).unwrap();
    for (id, lead) in &built.stimulus {
        circuit.add_stimulus(&map[id], begin_at + lead - 1).unwrap();
    }
    let mut upstream = Vec::new();
    for (p, port) in built.input_ports.iter().enumerate() {
        let mut lines = Vec::new();
        for (m, taps) in port.lines.iter().enumerate() {
            let src = circuit
                .add_named_neuron(&format!("up{p}_{m}"), NeuronParams::default(), vec![], Role::Input)
                .unwrap();
            for tap in taps {
                circuit.add_or_accumulate_synapse(&src, &map[&tap.neuron], tap.weight, tap.delay).unwrap();
            }
            lines.push(src);
        }
        upstream.push(lines);
    }
    Bench { circuit, built, map, upstream, begin_at }
}

impl Bench {
    /// Spikes are `(port, line, relative time)`.
    pub fn run(&self, spikes: &[(usize, usize, u32)], horizon: u32, seed: u64) -> SpikeRaster {
        let mut sim = Simulation::new(&self.circuit).unwrap();
        sim.inject(spikes.iter().map(|&(p, m, t)| (self.upstream[p][m].clone(), self.begin_at + t)))
            .unwrap();
        sim.run(&SimulationConfig::new(horizon).with_seed(seed)).unwrap()
    }

    pub fn outputs(&self, port: usize) -> Vec<NeuronId> {
        self.built.output_ports[port].neurons.iter().map(|n| self.map[n].clone()).collect()
    }

    /// Absolute spike times per output line.
    pub fn output_times(&self, raster: &SpikeRaster, port: usize) -> Vec<Vec<u32>> {
        self.outputs(port).iter().map(|id| raster.times(id).to_vec()).collect()
    }

    pub fn done(&self) -> NeuronId {
        self.map[&self.built.done].clone()
    }
}

/// Direct transcription of the update equations, written independently of the
/// library simulator: arrivals are found by scanning every synapse each step.
pub fn reference_lif(
    circuit: &Circuit,
    injections: &BTreeSet<(NeuronId, u32)>,
    horizon: u32,
    seed: u64,
) -> Vec<(u32, NeuronId)> {
    let ids: Vec<NeuronId> = circuit.neurons().map(|n| n.id.clone()).collect();
    let mut v: BTreeMap<NeuronId, f64> =
        circuit.neurons().map(|n| (n.id.clone(), n.params.initial_voltage)).collect();
    let mut fired: BTreeSet<(NeuronId, u32)> = BTreeSet::new();
    let mut events = Vec::new();
    for t in 0..horizon {
        let mut now = Vec::new();
        for j in &ids {
            let n = circuit.neuron(j).unwrap();
            let mut input = 0.0;
            for s in circuit.synapses() {
                if &s.post == j && s.delay <= t && fired.contains(&(s.pre.clone(), t - s.delay)) {
                    input += s.weight;
                }
            }
            let v_hat = input + v[j];
            let forced = injections.contains(&(j.clone(), t));
            if forced || v_hat > n.params.threshold {
                v.insert(j.clone(), n.params.reset);
                if stochastic_draw(n.params.p_fire, seed, j, t) {
                    now.push(j.clone());
                }
            } else {
                v.insert(j.clone(), (1.0 - n.params.decay) * v_hat);
            }
        }
        for j in now {
            fired.insert((j.clone(), t));
            events.push((t, j));
        }
    }
    events
}

/// Single-source shortest paths; `None` for unreachable nodes.
pub fn dijkstra(n: usize, arcs: &[(usize, usize, u32)], source: usize) -> Vec<Option<u32>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, w) in arcs {
        adj[u].push((v, w));
    }
    let mut dist = vec![None; n];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u32, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some() {
            continue;
        }
        dist[u] = Some(d);
        for &(v, w) in &adj[u] {
            if dist[v].is_none() {
                heap.push(Reverse((d + w, v)));
            }
        }
    }
    dist
}

/// Offsets `s = j - i` maximizing `#{i : u[i] and v[i + s]}`, with the count.
pub fn argmax_offsets(u: &[bool], v: &[bool]) -> (BTreeSet<isize>, usize) {
    let n = u.len() as isize;
    let mut best = 0;
    let mut set = BTreeSet::new();
    for s in -(n - 1)..n {
        let c = (0..n)
            .filter(|&i| (0..n).contains(&(i + s)) && u[i as usize] && v[(i + s) as usize])
            .count();
        if c > best {
            best = c;
            set.clear();
        }
        if c == best {
            set.insert(s);
        }
    }
    (set, best)
}

/// Pure Nash equilibria of a bimatrix game given as `payoff[a1][a2] = (p1, p2)`.
pub fn pure_nash(payoff: &[Vec<(i32, i32)>]) -> BTreeSet<(usize, usize)> {
    let rows = payoff.len();
    let cols = payoff[0].len();
    let mut out = BTreeSet::new();
    for a1 in 0..rows {
        for a2 in 0..cols {
            let (p1, p2) = payoff[a1][a2];
            let row_best = (0..rows).all(|b| payoff[b][a2].0 <= p1);
            let col_best = (0..cols).all(|b| payoff[a1][b].1 <= p2);
            if row_best && col_best {
                out.insert((a1, a2));
            }
        }
    }
    out
}
