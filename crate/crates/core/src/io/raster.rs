use std::fmt::Write as _;
use std::str::FromStr;

use crate::sim::SpikeRaster;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    /// `t,neuron_id` per spike, sorted by time then id.
    Events,
    /// `neuron_id: t1 t2 ...` per neuron that fired, sorted by id.
    PerNeuron,
}

impl FromStr for RasterFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "events" => Ok(RasterFormat::Events),
            "per-neuron" => Ok(RasterFormat::PerNeuron),
            other => Err(format!("unknown raster format `{other}` (events, per-neuron)")),
        }
    }
}

pub fn write_raster(raster: &SpikeRaster, format: RasterFormat) -> String {
    let mut out = String::new();
    match format {
        RasterFormat::Events => {
            out.push_str("t,neuron_id\n");
            for (t, id) in raster.events() {
                writeln!(out, "{t},{id}").unwrap();
            }
        }
        RasterFormat::PerNeuron => {
            out.push_str("# neuron_id: spike times\n");
            for (id, times) in raster.per_neuron() {
                let times: Vec<String> = times.iter().map(u32::to_string).collect();
                writeln!(out, "{id}: {}", times.join(" ")).unwrap();
            }
        }
    }
    out
}
