//! Circuit documents, scaffold descriptions and raster text.

mod circuit_doc;
mod raster;
mod spec;

pub use circuit_doc::{
    decode_circuit, decode_document, encode_circuit, encode_laid, CircuitDoc, DecodeError,
    NeuronDoc, SynapseDoc, CIRCUIT_VERSION,
};
pub use raster::{write_raster, RasterFormat};
pub use spec::{parse_scaffold_spec, SpecError, BRICK_KINDS};
