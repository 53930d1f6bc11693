//! Example scaffolds shipped with the library.

use crate::io::{parse_scaffold_spec, SpecError};
use crate::scaffold::Scaffold;

pub struct Demo {
    pub name: &'static str,
    pub spec: &'static str,
    /// Simulation length that covers the interesting activity.
    pub steps: u32,
}

pub const DEMOS: &[Demo] = &[
    Demo { name: "logic", spec: include_str!("demos/logic.toml"), steps: 12 },
    Demo { name: "shortest-path", spec: include_str!("demos/shortest_path.toml"), steps: 48 },
    Demo { name: "nash", spec: include_str!("demos/nash.toml"), steps: 20 },
    Demo { name: "random-walk", spec: include_str!("demos/random_walk.toml"), steps: 60 },
    Demo { name: "cross-correlation", spec: include_str!("demos/cross_correlation.toml"), steps: 16 },
];

pub fn demo(name: &str) -> Option<&'static Demo> {
    DEMOS.iter().find(|d| d.name == name)
}

impl Demo {
    pub fn scaffold(&self) -> Result<Scaffold, SpecError> {
        parse_scaffold_spec(self.spec)
    }
}
