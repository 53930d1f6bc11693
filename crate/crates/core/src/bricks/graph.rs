use std::collections::{BTreeSet, HashMap};

use crate::brick::BrickError;

/// Weighted graph whose distances a shortest-path brick computes.
///
/// Text form: a `directed` or `undirected` header, then one `u v w` triple
/// per line. A line holding a single name declares an isolated node. Blank
/// lines and `#` comments are ignored. Nodes are numbered in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetGraph {
    nodes: Vec<String>,
    edges: Vec<(usize, usize, u32)>,
    directed: bool,
}

impl TargetGraph {
    pub fn new(
        nodes: Vec<String>,
        edges: Vec<(usize, usize, u32)>,
        directed: bool,
    ) -> Result<Self, BrickError> {
        let distinct: BTreeSet<&String> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            return Err(BrickError::Parameter("duplicate node name".into()));
        }
        let mut seen = BTreeSet::new();
        for &(u, v, w) in &edges {
            if u >= nodes.len() || v >= nodes.len() {
                return Err(BrickError::Parameter(format!("edge ({u}, {v}) references a missing node")));
            }
            if u == v {
                return Err(BrickError::Parameter(format!("self edge on `{}`", nodes[u])));
            }
            if w < 1 {
                return Err(BrickError::Parameter(format!(
                    "edge {} -> {} has weight {w}; weights must be >= 1",
                    nodes[u], nodes[v]
                )));
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(key) {
                return Err(BrickError::Parameter(format!(
                    "duplicate edge {} -> {}",
                    nodes[u], nodes[v]
                )));
            }
        }
        Ok(TargetGraph { nodes, edges, directed })
    }

    pub fn parse(text: &str) -> Result<Self, BrickError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let directed = match lines.next() {
            Some((_, "directed")) => true,
            Some((_, "undirected")) => false,
            Some((n, other)) => {
                return Err(BrickError::Parameter(format!(
                    "line {n}: expected `directed` or `undirected`, found `{other}`"
                )))
            }
            None => return Err(BrickError::Parameter("empty graph description".into())),
        };
        let mut nodes: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, usize> = HashMap::new();
        let mut node = |name: &str| -> usize {
            *lookup.entry(name.to_owned()).or_insert_with(|| {
                nodes.push(name.to_owned());
                nodes.len() - 1
            })
        };
        let mut edges = Vec::new();
        for (n, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [name] => {
                    node(name);
                }
                [u, v, w] => {
                    let w: u32 = w.parse().map_err(|_| {
                        BrickError::Parameter(format!("line {n}: weight `{w}` is not a positive integer"))
                    })?;
                    let (u, v) = (node(u), node(v));
                    edges.push((u, v, w));
                }
                _ => {
                    return Err(BrickError::Parameter(format!(
                        "line {n}: expected `u v w` or a single node name"
                    )))
                }
            }
        }
        TargetGraph::new(nodes, edges, directed)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn max_weight(&self) -> u32 {
        self.edges.iter().map(|e| e.2).max().unwrap_or(0)
    }

    /// Each traversable arc; undirected edges appear in both directions.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().flat_map(move |&(u, v, w)| {
            let back = (!self.directed).then_some((v, u, w));
            std::iter::once((u, v, w)).chain(back)
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from(if self.directed { "directed\n" } else { "undirected\n" });
        let mut mentioned = vec![false; self.nodes.len()];
        for &(u, v, w) in &self.edges {
            mentioned[u] = true;
            mentioned[v] = true;
            out.push_str(&format!("{} {} {w}\n", self.nodes[u], self.nodes[v]));
        }
        for (name, _) in self.nodes.iter().zip(&mentioned).filter(|(_, m)| !**m) {
            out.push_str(name);
            out.push('\n');
        }
        out
    }
}
