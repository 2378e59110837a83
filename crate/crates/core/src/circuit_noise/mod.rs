//! Noisy syndrome readout: the readout circuit, its single faults and the
//! space-time decoding graph they induce.

mod circuit;
mod fault;
mod graph3d;

pub use circuit::{
    build_readout_circuit, build_readout_circuit_on, check_schedule, Basis, Operation, QubitRole,
    ReadoutCircuit, DEFAULT_ORDER, ROUNDS_PER_CYCLE,
};
pub use fault::{
    enumerate_events, propagate_event, propagate_events, propagate_frame, ErrorEvent, EventEffect,
    Fault, Pauli, PauliFrame,
};
pub use graph3d::{
    build_3d_decoding_graph, build_3d_decoding_graph_with, correctable_3d, correctable_projected,
    project, relative_syndrome, FaultDictionary, NoisyGraph, RelativeSyndrome, TemplateClass,
};
