//! Brick library.

mod buffer;
mod correlation;
mod decoder;
mod delay;
mod graph;
mod input;
mod logic;
mod minimum;
mod rng;
mod shortest_path;
mod threshold;
mod tracker;

pub use buffer::BufferBrick;
pub use correlation::CrossCorrelationBrick;
pub use decoder::{BinaryToUnaryBrick, DEFAULT_MAX_BITS};
pub use delay::DelayBrick;
pub use graph::TargetGraph;
pub use input::{InputBrick, SpikeSchedule};
pub use logic::{LogicBrick, LogicMode};
pub use minimum::MinimumBrick;
pub use rng::BinaryRngBrick;
pub use shortest_path::ShortestPathBrick;
pub use threshold::ThresholdBrick;
pub use tracker::GridTrackerBrick;

use crate::brick::{BrickError, Coding, PortShape};

fn require_coding(brick: &str, shape: &PortShape, coding: Coding) -> Result<(), BrickError> {
    if shape.coding != coding {
        return Err(BrickError::Shape(format!(
            "{brick} expects {coding} input, got {}",
            shape.coding
        )));
    }
    Ok(())
}

fn require_dims(brick: &str, shape: &PortShape, dims: &[usize]) -> Result<(), BrickError> {
    if shape.dims != dims {
        return Err(BrickError::Shape(format!(
            "{brick} expects dims {dims:?}, got {:?}",
            shape.dims
        )));
    }
    Ok(())
}
