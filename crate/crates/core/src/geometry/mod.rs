//! Lattice construction, decoding graphs, chains and syndromes.

mod build;
mod distance;
mod format;
mod graph;
mod kind;
mod lattice;

pub use build::{bit_graph, build_decoding_graph, phase_graph, phase_logical, LatticeGraph};
pub use distance::{code_distance, min_odd_chain};
pub use format::{graph_to_string, read_graph, write_graph};
pub use graph::{
    boundary_of, chain_weight, parity, syndrome_of, DecodingGraph, GraphKind, Syndrome, MAX_WEIGHT,
    WEIGHT_SCALE,
};
pub use kind::ErrorKind;
pub use lattice::{
    build_lattice, DefectLayout, Direction, EdgeSide, LatticeEdge, LatticeParams, Orientation,
    SurfaceLattice,
};
