//! Versioned JSON document for compiled circuits.
//!
//! Neurons are listed by id, synapses by `(pre, post)`, stimulus by
//! `(neuron, t)`, bricks by tag, so encoding is canonical: equal circuits
//! give equal bytes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{Attrs, Circuit, Injection, Neuron, NeuronId, NeuronParams, Role, Synapse};
use crate::scaffold::{BrickSummary, Laid};

pub const CIRCUIT_VERSION: &str = "brickwork-circuit/1";

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported version `{0}` (expected `{CIRCUIT_VERSION}`)")]
    Version(String),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronDoc {
    pub id: NeuronId,
    pub threshold: f64,
    pub reset: f64,
    pub decay: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub initial_voltage: f64,
    pub index: Vec<usize>,
    pub tag: Role,
    pub brick_tag: String,
    #[serde(default, skip_serializing_if = "Attrs::is_empty")]
    pub attrs: Attrs,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynapseDoc {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub weight: f64,
    pub delay: u32,
    #[serde(default, skip_serializing_if = "Attrs::is_empty")]
    pub attrs: Attrs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDoc {
    pub version: String,
    pub namespace: String,
    pub neurons: Vec<NeuronDoc>,
    pub synapses: Vec<SynapseDoc>,
    #[serde(default)]
    pub stimulus: Vec<Injection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bricks: Vec<BrickSummary>,
}

impl CircuitDoc {
    pub fn from_circuit(circuit: &Circuit) -> Self {
        CircuitDoc {
            version: CIRCUIT_VERSION.to_owned(),
            namespace: circuit.namespace().to_owned(),
            neurons: circuit
                .neurons()
                .map(|n| NeuronDoc {
                    id: n.id.clone(),
                    threshold: n.params.threshold,
                    reset: n.params.reset,
                    decay: n.params.decay,
                    p: n.params.p_fire,
                    initial_voltage: n.params.initial_voltage,
                    index: n.index.clone(),
                    tag: n.role,
                    brick_tag: n.brick_tag.clone(),
                    attrs: n.attrs.clone(),
                })
                .collect(),
            synapses: circuit
                .synapses()
                .map(|s| SynapseDoc {
                    pre: s.pre.clone(),
                    post: s.post.clone(),
                    weight: s.weight,
                    delay: s.delay,
                    attrs: s.attrs.clone(),
                })
                .collect(),
            stimulus: circuit.stimulus().cloned().collect(),
            bricks: Vec::new(),
        }
    }

    pub fn to_circuit(&self) -> Result<Circuit, DecodeError> {
        if self.version != CIRCUIT_VERSION {
            return Err(DecodeError::Version(self.version.clone()));
        }
        let mut ids = BTreeSet::new();
        for (k, n) in self.neurons.iter().enumerate() {
            if !ids.insert(&n.id) {
                return Err(invalid(format!("neurons[{k}]"), format!("duplicate id `{}`", n.id)));
            }
        }
        let mut pairs = BTreeSet::new();
        for (k, s) in self.synapses.iter().enumerate() {
            if !pairs.insert((&s.pre, &s.post)) {
                return Err(invalid(
                    format!("synapses[{k}]"),
                    format!("duplicate synapse `{}` -> `{}`", s.pre, s.post),
                ));
            }
            for end in [&s.pre, &s.post] {
                if !ids.contains(end) {
                    return Err(invalid(format!("synapses[{k}]"), format!("unknown neuron `{end}`")));
                }
            }
        }
        let neurons = self.neurons.iter().map(|n| Neuron {
            id: n.id.clone(),
            params: NeuronParams {
                threshold: n.threshold,
                reset: n.reset,
                decay: n.decay,
                p_fire: n.p,
                initial_voltage: n.initial_voltage,
            },
            index: n.index.clone(),
            role: n.tag,
            brick_tag: n.brick_tag.clone(),
            attrs: n.attrs.clone(),
        });
        let synapses = self.synapses.iter().map(|s| Synapse {
            pre: s.pre.clone(),
            post: s.post.clone(),
            weight: s.weight,
            delay: s.delay,
            attrs: s.attrs.clone(),
        });
        let circuit = Circuit::from_parts_unchecked(
            self.namespace.clone(),
            neurons,
            synapses,
            self.stimulus.iter().cloned(),
        );
        if let Some(v) = circuit.validate().into_iter().next() {
            return Err(invalid(v.element, v.message));
        }
        Ok(circuit)
    }
}

fn invalid(location: String, message: String) -> DecodeError {
    DecodeError::Invalid { location, message }
}

fn render(doc: &CircuitDoc) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}

/// Canonical text of `circuit`.
pub fn encode_circuit(circuit: &Circuit) -> String {
    render(&CircuitDoc::from_circuit(circuit))
}

/// Canonical text of a laid scaffold: the circuit plus a per-brick summary.
pub fn encode_laid(laid: &Laid) -> String {
    let mut doc = CircuitDoc::from_circuit(&laid.circuit);
    doc.bricks = laid.summaries();
    render(&doc)
}

pub fn decode_document(text: &str) -> Result<(Circuit, Vec<BrickSummary>), DecodeError> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    let circuit = doc.to_circuit()?;
    Ok((circuit, doc.bricks))
}

pub fn decode_circuit(text: &str) -> Result<Circuit, DecodeError> {
    decode_document(text).map(|(c, _)| c)
}
