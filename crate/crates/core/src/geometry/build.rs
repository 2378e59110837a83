use crate::error::LatticeError;
use crate::geometry::graph::{DecodingGraph, GraphKind};
use crate::geometry::lattice::{DefectLayout, EdgeSide, SurfaceLattice};

/// A decoding graph derived from a lattice, with the map from graph edges
/// back to data qubits (lattice edges).
#[derive(Clone, Debug)]
pub struct LatticeGraph {
    pub kind: GraphKind,
    pub graph: DecodingGraph,
    /// Lattice edge carried by each graph edge.
    pub qubits: Vec<usize>,
}

pub fn build_decoding_graph(
    lattice: &SurfaceLattice,
    kind: GraphKind,
) -> Result<LatticeGraph, LatticeError> {
    match kind {
        GraphKind::Phase => Ok(phase_graph(lattice)),
        GraphKind::Bit => bit_graph(lattice),
    }
}

/// Sites and edges; the logical set is a straight dual path leaving the first
/// defect (towards the second defect if there is one, else to the left edge).
pub fn phase_graph(lattice: &SurfaceLattice) -> LatticeGraph {
    let edges: Vec<[usize; 2]> = lattice.edges().iter().map(|e| e.sites).collect();
    let logical = phase_logical(lattice);
    let graph = DecodingGraph::from_edges(lattice.num_sites(), &[], edges, &logical)
        .expect("lattice edges form a valid graph");
    LatticeGraph {
        kind: GraphKind::Phase,
        graph,
        qubits: (0..lattice.num_edges()).collect(),
    }
}

/// Lattice edges crossed by the phase-kind logical dual path.
pub fn phase_logical(lattice: &SurfaceLattice) -> Vec<usize> {
    let p = lattice.params();
    let origins = lattice.defect_origins();
    let (y0, x0) = origins[0];
    let cols: Vec<usize> = match p.layout {
        DefectLayout::Single => (0..=x0).collect(),
        DefectLayout::Double => (x0 + p.r..=origins[1].1).collect(),
    };
    cols.into_iter()
        .map(|x| lattice.vertical(y0, x).expect("dual path edge retained"))
        .collect()
}

/// Plaquettes plus one hanging endpoint per defect-boundary edge; the logical
/// set is the boundary of the first defect. Edges on the external boundary
/// carry no hanging endpoint and are left out.
pub fn bit_graph(lattice: &SurfaceLattice) -> Result<LatticeGraph, LatticeError> {
    if lattice.params().layout != DefectLayout::Double {
        return Err(LatticeError::NeedsTwoDefects("bit"));
    }
    let np = lattice.num_plaquettes();
    let mut edges = Vec::new();
    let mut qubits = Vec::new();
    let mut boundary = Vec::new();
    let mut logical = Vec::new();
    for (k, e) in lattice.edges().iter().enumerate() {
        match (e.side, e.plaquettes) {
            (EdgeSide::Interior, [Some(a), Some(b)]) => {
                edges.push([a, b]);
                qubits.push(k);
            }
            (EdgeSide::Defect(d), [a, b]) => {
                let p = a.or(b).expect("defect edge has one retained plaquette");
                let t = np + boundary.len();
                boundary.push(t);
                if d == 0 {
                    logical.push(edges.len());
                }
                edges.push([p, t]);
                qubits.push(k);
            }
            _ => {}
        }
    }
    let graph = DecodingGraph::from_edges(np + boundary.len(), &boundary, edges, &logical)
        .expect("lattice edges form a valid graph");
    Ok(LatticeGraph {
        kind: GraphKind::Bit,
        graph,
        qubits,
    })
}
