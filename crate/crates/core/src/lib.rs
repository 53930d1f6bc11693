//! Compositional spiking neural algorithms.
//!
//! Bricks generate small leaky integrate-and-fire circuits; a scaffold wires
//! bricks together, aligns their timing and lays them out as one circuit;
//! the reference simulator runs the result.
//!
//! ```
//! use brickwork::bricks::{DelayBrick, InputBrick};
//! use brickwork::{run, Coding, PortRef, Scaffold, SimulationConfig};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let mut s = Scaffold::new("net")?;
//! let spikes = [(0, 0)].into_iter().collect();
//! let a = s.add_brick("a", InputBrick::new(vec![1], Coding::BinaryVector, spikes)?)?;
//! let d = s.add_brick("d", DelayBrick::new(3)?)?;
//! s.connect(PortRef::new(a, 0), PortRef::new(d, 0))?;
//! let laid = s.compile()?;
//! let raster = run(&laid.circuit, &SimulationConfig::new(10))?;
//! // Sources present at step 1; the delay adds 3.
//! assert_eq!(raster.times(&laid.output("d", 0).unwrap()[0]), &[4]);
//! # Ok(())
//! # }
//! ```

pub mod brick;
pub mod bricks;
pub mod demos;
pub mod io;
pub mod ir;
pub mod scaffold;
pub mod sim;

pub use brick::{Brick, BrickError, BrickMetadata, BuiltBrick, Coding, Depth, Namer, PortShape, Steps};
pub use ir::{Circuit, IrError, Neuron, NeuronId, NeuronParams, Role, Synapse};
pub use scaffold::{lay_bricks, BrickId, Laid, PortRef, Scaffold, ScaffoldError};
pub use sim::{run, RecordFilter, SimError, Simulation, SimulationConfig, SpikeRaster};
