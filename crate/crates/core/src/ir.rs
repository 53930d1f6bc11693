//! Hardware-agnostic circuit graph.
//!
//! Neurons are nodes carrying leaky integrate-and-fire parameters, synapses are
//! directed edges carrying a weight and an integer delay. Ids follow the
//! `<namespace>:<brick_tag>:<local-name>` convention once a fragment has been
//! merged into a composed circuit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Open key/value bag for attributes the simulator does not interpret
/// (learning rates and the like).
pub type Attrs = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("missing neuron `{0}`")]
    MissingNeuron(NeuronId),
    #[error("duplicate synapse {0} -> {1}")]
    DuplicateEdge(NeuronId, NeuronId),
    #[error("duplicate neuron id `{0}`")]
    DuplicateNeuron(NeuronId),
    #[error("namespace collision on `{0}`")]
    Namespace(NeuronId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NeuronId(String);

impl NeuronId {
    pub fn new(id: impl Into<String>) -> Self {
        NeuronId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The last `:`-separated segment.
    pub fn local_name(&self) -> &str {
        self.0.rsplit(':').next().unwrap_or(&self.0)
    }

    fn prefixed(&self, prefix: &str) -> NeuronId {
        if prefix.is_empty() {
            self.clone()
        } else {
            NeuronId(format!("{prefix}:{}", self.0))
        }
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NeuronId {
    fn from(s: &str) -> Self {
        NeuronId(s.to_owned())
    }
}

/// Dynamics of a single neuron.
///
/// `decay` is the leak fraction applied per timestep to a sub-threshold
/// voltage: `V = (1 - decay) * V_hat`. A decay of 1 returns the neuron to zero
/// every step, a decay of 0 makes it a perfect integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronParams {
    pub threshold: f64,
    pub reset: f64,
    pub decay: f64,
    pub p_fire: f64,
    pub initial_voltage: f64,
}

impl Default for NeuronParams {
    fn default() -> Self {
        NeuronParams {
            threshold: 0.5,
            reset: 0.0,
            decay: 1.0,
            p_fire: 1.0,
            initial_voltage: 0.0,
        }
    }
}

impl NeuronParams {
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_reset(mut self, reset: f64) -> Self {
        self.reset = reset;
        self
    }

    pub fn with_decay(mut self, decay: f64) -> Self {
        self.decay = decay;
        self
    }

    pub fn with_p_fire(mut self, p: f64) -> Self {
        self.p_fire = p;
        self
    }

    pub fn with_initial_voltage(mut self, v: f64) -> Self {
        self.initial_voltage = v;
        self
    }

    pub fn check(&self) -> Result<(), IrError> {
        if !self.threshold.is_finite() {
            return Err(IrError::Parameter(format!("threshold {} is not finite", self.threshold)));
        }
        if !self.reset.is_finite() {
            return Err(IrError::Parameter(format!("reset {} is not finite", self.reset)));
        }
        if !self.initial_voltage.is_finite() {
            return Err(IrError::Parameter(format!(
                "initial voltage {} is not finite",
                self.initial_voltage
            )));
        }
        if !(0.0..=1.0).contains(&self.decay) {
            return Err(IrError::Parameter(format!("decay {} outside [0, 1]", self.decay)));
        }
        if !(self.p_fire > 0.0 && self.p_fire <= 1.0) {
            return Err(IrError::Parameter(format!("p_fire {} outside (0, 1]", self.p_fire)));
        }
        Ok(())
    }
}

/// What a neuron is for. Exactly one role per neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Externally driven (injection target).
    Input,
    /// Member of a brick output port; carries a non-empty index.
    Output,
    /// Timing signal such as begin/done or a global start.
    Control,
    Internal,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Input => "input",
            Role::Output => "output",
            Role::Control => "control",
            Role::Internal => "internal",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neuron {
    pub id: NeuronId,
    pub params: NeuronParams,
    pub index: Vec<usize>,
    pub role: Role,
    pub brick_tag: String,
    pub attrs: Attrs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synapse {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub weight: f64,
    pub delay: u32,
    pub attrs: Attrs,
}

/// A scheduled external drive: `neuron` is forced over threshold at `t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Injection {
    pub neuron: NeuronId,
    pub t: u32,
}

/// A single invariant violation found by [`Circuit::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub element: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

/// Directed graph of neurons and synapses, plus the default stimulus that
/// realizes input bricks and the global start signal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    namespace: String,
    neurons: BTreeMap<NeuronId, Neuron>,
    synapses: BTreeMap<(NeuronId, NeuronId), Synapse>,
    stimulus: BTreeSet<Injection>,
    next_auto: usize,
}

impl Circuit {
    pub fn new(namespace: impl Into<String>) -> Self {
        Circuit {
            namespace: namespace.into(),
            ..Default::default()
        }
    }

    /// Assemble a circuit from raw parts without checking any invariant.
    /// Run [`Circuit::validate`] on the result before trusting it.
    pub fn from_parts_unchecked(
        namespace: impl Into<String>,
        neurons: impl IntoIterator<Item = Neuron>,
        synapses: impl IntoIterator<Item = Synapse>,
        stimulus: impl IntoIterator<Item = Injection>,
    ) -> Self {
        Circuit {
            namespace: namespace.into(),
            neurons: neurons.into_iter().map(|n| (n.id.clone(), n)).collect(),
            synapses: synapses
                .into_iter()
                .map(|s| ((s.pre.clone(), s.post.clone()), s))
                .collect(),
            stimulus: stimulus.into_iter().collect(),
            next_auto: 0,
        }
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn synapse_count(&self) -> usize {
        self.synapses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty() && self.synapses.is_empty()
    }

    /// Neurons in id order.
    pub fn neurons(&self) -> impl Iterator<Item = &Neuron> {
        self.neurons.values()
    }

    /// Synapses in `(pre, post)` order.
    pub fn synapses(&self) -> impl Iterator<Item = &Synapse> {
        self.synapses.values()
    }

    pub fn stimulus(&self) -> impl Iterator<Item = &Injection> {
        self.stimulus.iter()
    }

    pub fn neuron(&self, id: &NeuronId) -> Option<&Neuron> {
        self.neurons.get(id)
    }

    pub fn neuron_mut(&mut self, id: &NeuronId) -> Option<&mut Neuron> {
        self.neurons.get_mut(id)
    }

    pub fn contains(&self, id: &NeuronId) -> bool {
        self.neurons.contains_key(id)
    }

    pub fn synapse(&self, pre: &NeuronId, post: &NeuronId) -> Option<&Synapse> {
        self.synapses.get(&(pre.clone(), post.clone()))
    }

    pub fn synapse_mut(&mut self, pre: &NeuronId, post: &NeuronId) -> Option<&mut Synapse> {
        self.synapses.get_mut(&(pre.clone(), post.clone()))
    }

    fn local_id(&self, local: &str) -> NeuronId {
        if self.namespace.is_empty() {
            NeuronId::new(local)
        } else {
            NeuronId(format!("{}:{local}", self.namespace))
        }
    }

    /// Add a neuron with an automatically generated local name.
    pub fn add_neuron(
        &mut self,
        params: NeuronParams,
        index: Vec<usize>,
        role: Role,
    ) -> Result<NeuronId, IrError> {
        let id = loop {
            let candidate = self.local_id(&format!("n{}", self.next_auto));
            self.next_auto += 1;
            if !self.neurons.contains_key(&candidate) {
                break candidate;
            }
        };
        self.insert(id, params, index, role)
    }

    /// Add a neuron named `<namespace>:<local>`.
    pub fn add_named_neuron(
        &mut self,
        local: &str,
        params: NeuronParams,
        index: Vec<usize>,
        role: Role,
    ) -> Result<NeuronId, IrError> {
        let id = self.local_id(local);
        if self.neurons.contains_key(&id) {
            return Err(IrError::DuplicateNeuron(id));
        }
        self.insert(id, params, index, role)
    }

    fn insert(
        &mut self,
        id: NeuronId,
        params: NeuronParams,
        index: Vec<usize>,
        role: Role,
    ) -> Result<NeuronId, IrError> {
        params.check()?;
        if role == Role::Output && index.is_empty() {
            return Err(IrError::Parameter(format!("output neuron `{id}` needs an index")));
        }
        let neuron = Neuron {
            id: id.clone(),
            params,
            index,
            role,
            brick_tag: self.namespace.clone(),
            attrs: Attrs::new(),
        };
        self.neurons.insert(id.clone(), neuron);
        Ok(id)
    }

    pub fn add_synapse(
        &mut self,
        pre: &NeuronId,
        post: &NeuronId,
        weight: f64,
        delay: u32,
    ) -> Result<(), IrError> {
        for id in [pre, post] {
            if !self.neurons.contains_key(id) {
                return Err(IrError::MissingNeuron(id.clone()));
            }
        }
        if delay < 1 {
            return Err(IrError::Parameter(format!("synapse {pre} -> {post}: delay must be >= 1")));
        }
        if !weight.is_finite() {
            return Err(IrError::Parameter(format!("synapse {pre} -> {post}: weight not finite")));
        }
        let key = (pre.clone(), post.clone());
        if self.synapses.contains_key(&key) {
            return Err(IrError::DuplicateEdge(pre.clone(), post.clone()));
        }
        self.synapses.insert(
            key,
            Synapse {
                pre: pre.clone(),
                post: post.clone(),
                weight,
                delay,
                attrs: Attrs::new(),
            },
        );
        Ok(())
    }

    /// Like [`Circuit::add_synapse`], except that an existing edge with the
    /// same delay absorbs the new weight. Two coincident arrivals over the same
    /// edge and one arrival carrying their summed weight are indistinguishable
    /// to the neuron model, so this is exact.
    pub fn add_or_accumulate_synapse(
        &mut self,
        pre: &NeuronId,
        post: &NeuronId,
        weight: f64,
        delay: u32,
    ) -> Result<(), IrError> {
        match self.synapses.get_mut(&(pre.clone(), post.clone())) {
            Some(existing) if existing.delay == delay => {
                existing.weight += weight;
                Ok(())
            }
            Some(_) => Err(IrError::DuplicateEdge(pre.clone(), post.clone())),
            None => self.add_synapse(pre, post, weight, delay),
        }
    }

    /// Schedule an external drive. Only input-tagged neurons accept one.
    pub fn add_stimulus(&mut self, neuron: &NeuronId, t: u32) -> Result<(), IrError> {
        match self.neurons.get(neuron) {
            None => Err(IrError::MissingNeuron(neuron.clone())),
            Some(n) if n.role != Role::Input => Err(IrError::Parameter(format!(
                "stimulus target `{neuron}` is not an input neuron"
            ))),
            Some(_) => {
                self.stimulus.insert(Injection { neuron: neuron.clone(), t });
                Ok(())
            }
        }
    }

    /// Merge `src` into `self`, prefixing every src id with `prefix`.
    ///
    /// Returns the mapping from src ids to the ids now used in `self`. On error
    /// `self` is left unchanged.
    pub fn merge(
        &mut self,
        src: &Circuit,
        prefix: &str,
    ) -> Result<BTreeMap<NeuronId, NeuronId>, IrError> {
        let mapping: BTreeMap<NeuronId, NeuronId> = src
            .neurons
            .keys()
            .map(|id| (id.clone(), id.prefixed(prefix)))
            .collect();
        if let Some(clash) = mapping.values().find(|id| self.neurons.contains_key(*id)) {
            return Err(IrError::Namespace(clash.clone()));
        }
        for n in src.neurons.values() {
            let mut n = n.clone();
            n.id = mapping[&n.id].clone();
            self.neurons.insert(n.id.clone(), n);
        }
        for s in src.synapses.values() {
            let mut s = s.clone();
            s.pre = mapping[&s.pre].clone();
            s.post = mapping[&s.post].clone();
            self.synapses.insert((s.pre.clone(), s.post.clone()), s);
        }
        for inj in &src.stimulus {
            if let Some(id) = mapping.get(&inj.neuron) {
                self.stimulus.insert(Injection { neuron: id.clone(), t: inj.t });
            }
        }
        Ok(mapping)
    }

    /// Check every type invariant. An empty list means the circuit is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (key, n) in &self.neurons {
            let element = format!("neuron `{key}`");
            if *key != n.id {
                out.push(Violation {
                    element: element.clone(),
                    message: format!("stored under mismatched id `{}`", n.id),
                });
            }
            if let Err(e) = n.params.check() {
                out.push(Violation { element: element.clone(), message: e.to_string() });
            }
            if n.role == Role::Output && n.index.is_empty() {
                out.push(Violation {
                    element,
                    message: "output neuron has an empty index".into(),
                });
            }
        }
        for s in self.synapses.values() {
            let element = format!("synapse `{}` -> `{}`", s.pre, s.post);
            for end in [&s.pre, &s.post] {
                if !self.neurons.contains_key(end) {
                    out.push(Violation {
                        element: element.clone(),
                        message: format!("endpoint `{end}` does not exist"),
                    });
                }
            }
            if s.delay < 1 {
                out.push(Violation { element: element.clone(), message: "delay must be >= 1".into() });
            }
            if !s.weight.is_finite() {
                out.push(Violation { element, message: "weight is not finite".into() });
            }
        }
        for inj in &self.stimulus {
            let element = format!("stimulus `{}`@{}", inj.neuron, inj.t);
            match self.neurons.get(&inj.neuron) {
                None => out.push(Violation { element, message: "target does not exist".into() }),
                Some(n) if n.role != Role::Input => out.push(Violation {
                    element,
                    message: "target is not an input neuron".into(),
                }),
                Some(_) => {}
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Synapses leaving `pre`, in post-id order.
    pub fn outgoing<'a>(&'a self, pre: &'a NeuronId) -> impl Iterator<Item = &'a Synapse> + 'a {
        self.synapses
            .range((pre.clone(), NeuronId(String::new()))..)
            .take_while(move |((p, _), _)| p == pre)
            .map(|(_, s)| s)
    }

    pub fn max_delay(&self) -> u32 {
        self.synapses.values().map(|s| s.delay).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relay() -> NeuronParams {
        NeuronParams::default()
    }

    #[test]
    fn add_to_empty_circuit() {
        let mut c = Circuit::new("t");
        let id = c.add_neuron(relay(), vec![], Role::Internal).unwrap();
        assert_eq!(c.neuron_count(), 1);
        assert_eq!(c.synapse_count(), 0);
        assert!(c.contains(&id));
    }

    #[test]
    fn rejects_bad_decay_and_probability() {
        let mut c = Circuit::new("t");
        let err = c.add_neuron(relay().with_decay(1.5), vec![], Role::Internal).unwrap_err();
        assert!(matches!(err, IrError::Parameter(_)));
        assert!(c.add_neuron(relay().with_p_fire(0.0), vec![], Role::Internal).is_err());
        assert!(c.add_neuron(relay().with_p_fire(1.2), vec![], Role::Internal).is_err());
        assert!(c.add_neuron(relay().with_threshold(f64::NAN), vec![], Role::Internal).is_err());
        assert_eq!(c.neuron_count(), 0);
    }

    #[test]
    fn hundred_neurons_have_distinct_resolvable_ids() {
        let mut c = Circuit::new("t");
        let ids: Vec<_> = (0..100)
            .map(|_| c.add_neuron(relay(), vec![], Role::Internal).unwrap())
            .collect();
        let distinct: BTreeSet<_> = ids.iter().collect();
        assert_eq!(distinct.len(), 100);
        assert!(ids.iter().all(|id| c.neuron(id).is_some()));
    }

    #[test]
    fn auto_names_skip_taken_local_names() {
        let mut c = Circuit::new("t");
        c.add_named_neuron("n0", relay(), vec![], Role::Internal).unwrap();
        let id = c.add_neuron(relay(), vec![], Role::Internal).unwrap();
        assert_eq!(id.as_str(), "t:n1");
    }

    #[test]
    fn synapse_errors() {
        let mut c = Circuit::new("t");
        let a = c.add_neuron(relay(), vec![], Role::Internal).unwrap();
        let b = c.add_neuron(relay(), vec![], Role::Internal).unwrap();
        // fire-once self-link
        c.add_synapse(&a, &a, -1000.0, 1).unwrap();
        assert!(matches!(c.add_synapse(&a, &b, 1.0, 0), Err(IrError::Parameter(_))));
        c.add_synapse(&a, &b, 1.0, 2).unwrap();
        assert!(matches!(c.add_synapse(&a, &b, 1.0, 2), Err(IrError::DuplicateEdge(..))));
        let ghost = NeuronId::new("t:ghost");
        assert!(matches!(c.add_synapse(&a, &ghost, 1.0, 1), Err(IrError::MissingNeuron(_))));
        assert_eq!(c.synapse_count(), 2);
    }

    #[test]
    fn accumulate_merges_same_delay_only() {
        let mut c = Circuit::new("t");
        let a = c.add_neuron(relay(), vec![], Role::Internal).unwrap();
        let b = c.add_neuron(relay(), vec![], Role::Internal).unwrap();
        c.add_or_accumulate_synapse(&a, &b, 1.0, 1).unwrap();
        c.add_or_accumulate_synapse(&a, &b, 1.0, 1).unwrap();
        assert_eq!(c.synapse(&a, &b).unwrap().weight, 2.0);
        assert!(c.add_or_accumulate_synapse(&a, &b, 1.0, 3).is_err());
    }

    #[test]
    fn output_neurons_need_index() {
        let mut c = Circuit::new("t");
        assert!(c.add_neuron(relay(), vec![], Role::Output).is_err());
        assert!(c.add_neuron(relay(), vec![0], Role::Output).is_ok());
    }

    fn small(ns: &str, n: usize, edges: &[(usize, usize)]) -> Circuit {
        let mut c = Circuit::new(ns);
        let ids: Vec<_> = (0..n)
            .map(|i| c.add_neuron(relay(), vec![i], Role::Output).unwrap())
            .collect();
        for &(a, b) in edges {
            c.add_synapse(&ids[a], &ids[b], 1.0, 1).unwrap();
        }
        c
    }

    #[test]
    fn merge_empty_is_identity() {
        let mut d = small("d", 2, &[(0, 1)]);
        let before = d.clone();
        let mapping = d.merge(&Circuit::new("e"), "x").unwrap();
        assert!(mapping.is_empty());
        assert_eq!(d, before);
    }

    #[test]
    fn merge_counts_add_up() {
        let c = small("c", 3, &[(0, 1), (1, 2)]);
        let mut d = small("d", 2, &[]);
        let mapping = d.merge(&c, "m").unwrap();
        assert_eq!(d.neuron_count(), 5);
        assert_eq!(d.synapse_count(), 2);
        assert_eq!(mapping.len(), 3);
        assert_eq!(mapping[&NeuronId::new("c:n0")].as_str(), "m:c:n0");
        assert!(d.is_valid());
        // src untouched
        assert_eq!(c.neuron_count(), 3);
    }

    #[test]
    fn merge_clash_is_namespace_error() {
        let c = small("c", 1, &[]);
        let mut d = Circuit::new("d");
        d.merge(&c, "m").unwrap();
        let before = d.clone();
        assert!(matches!(d.merge(&c, "m"), Err(IrError::Namespace(_))));
        assert_eq!(d, before);
    }

    #[test]
    fn validate_reports_dangling_endpoint() {
        let n = Neuron {
            id: NeuronId::new("a"),
            params: relay(),
            index: vec![],
            role: Role::Internal,
            brick_tag: "x".into(),
            attrs: Attrs::new(),
        };
        let s = Synapse {
            pre: NeuronId::new("a"),
            post: NeuronId::new("missing"),
            weight: 1.0,
            delay: 1,
            attrs: Attrs::new(),
        };
        let c = Circuit::from_parts_unchecked("", [n], [s], []);
        let v = c.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].element.contains("missing") || v[0].message.contains("missing"));
    }

    #[test]
    fn validate_reports_output_without_index() {
        let n = Neuron {
            id: NeuronId::new("a"),
            params: relay(),
            index: vec![],
            role: Role::Output,
            brick_tag: "x".into(),
            attrs: Attrs::new(),
        };
        let c = Circuit::from_parts_unchecked("", [n], [], []);
        let v = c.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].element.contains("`a`"));
    }

    #[test]
    fn outgoing_lists_only_that_pre() {
        let c = small("c", 3, &[(0, 1), (0, 2), (1, 2)]);
        let a = NeuronId::new("c:n0");
        let posts: Vec<_> = c.outgoing(&a).map(|s| s.post.as_str().to_owned()).collect();
        assert_eq!(posts, vec!["c:n1", "c:n2"]);
    }

    #[test]
    fn stimulus_requires_input_role() {
        let mut c = Circuit::new("t");
        let a = c.add_neuron(relay(), vec![], Role::Internal).unwrap();
        let b = c.add_neuron(relay(), vec![], Role::Input).unwrap();
        assert!(c.add_stimulus(&a, 0).is_err());
        c.add_stimulus(&b, 0).unwrap();
        assert_eq!(c.stimulus().count(), 1);
    }
}
