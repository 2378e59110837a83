use proptest::prelude::*;
use qecsplit::correctability::cut_partition;
use qecsplit::geometry::{
    bit_graph, boundary_of, build_lattice, code_distance, graph_to_string, min_odd_chain, parity,
    phase_graph, read_graph, syndrome_of, DecodingGraph, DefectLayout, EdgeSide, LatticeParams,
};

/// Independent count: full grid minus the defect interiors.
fn expected_counts(p: LatticeParams) -> (usize, usize, usize) {
    let rows = 2 * (p.b - 1) + p.r;
    let cols = match p.layout {
        DefectLayout::Single => rows,
        DefectLayout::Double => 2 * (p.b - 1) + 2 * p.r + p.s - 1,
    };
    let k = p.layout.count();
    let sites = (rows + 1) * (cols + 1) - k * (p.r - 1) * (p.r - 1);
    let edges = (rows + 1) * cols + rows * (cols + 1) - k * 2 * p.r * (p.r - 1);
    let plaquettes = rows * cols - k * p.r * p.r;
    (sites, edges, plaquettes)
}

#[test]
fn element_counts() {
    let lat = build_lattice(LatticeParams::single(2, 8)).unwrap();
    assert_eq!((lat.num_sites(), lat.num_edges()), (288, 540));
    for r in 1..5 {
        for b in 2..6 {
            for p in [
                LatticeParams::single(r, b),
                LatticeParams::double(r, b + 1, b),
            ] {
                let lat = build_lattice(p).unwrap();
                assert_eq!(
                    (lat.num_sites(), lat.num_edges(), lat.num_plaquettes()),
                    expected_counts(p),
                    "{p:?}"
                );
            }
        }
    }
}

#[test]
fn edge_sides() {
    let lat = build_lattice(LatticeParams::double(2, 5, 3)).unwrap();
    let (rows, cols) = lat.shape();
    let external = lat
        .edges()
        .iter()
        .filter(|e| e.side == EdgeSide::External)
        .count();
    assert_eq!(external, 2 * (rows + cols));
    assert_eq!(lat.defect_boundary(0).len(), 8);
    assert_eq!(lat.defect_boundary(1).len(), 8);
}

#[test]
fn code_distances() {
    // the loop around the defect and the straight path between defects
    let lat = build_lattice(LatticeParams::single(2, 8)).unwrap();
    assert_eq!(code_distance(&phase_graph(&lat).graph), Some(8));
    let lat = build_lattice(LatticeParams::double(2, 8, 8)).unwrap();
    assert_eq!(code_distance(&bit_graph(&lat).unwrap().graph), Some(8));
    assert_eq!(code_distance(&phase_graph(&lat).graph), Some(8));
    let lat = build_lattice(LatticeParams::double(3, 5, 4)).unwrap();
    assert_eq!(code_distance(&bit_graph(&lat).unwrap().graph), Some(5));
    assert_eq!(code_distance(&phase_graph(&lat).graph), Some(12));
}

/// Exhaustive minimum over all odd chains with empty syndrome.
fn exhaustive_distance(g: &DecodingGraph) -> Option<usize> {
    let m = g.num_edges();
    assert!(m <= 24);
    let mut best = None;
    for x in 1u32..(1 << m) {
        let c = g.chain_from_edges((0..m).filter(|&e| x >> e & 1 == 1));
        if syndrome_of(g, &c).is_empty() && parity(g, &c) {
            best = Some(best.map_or(c.count(), |b: usize| b.min(c.count())));
        }
    }
    best
}

#[test]
fn code_distance_matches_exhaustive_search() {
    let lat = build_lattice(LatticeParams::single(1, 2)).unwrap();
    let g = phase_graph(&lat).graph;
    assert_eq!(g.num_edges(), 24);
    assert_eq!(code_distance(&g), exhaustive_distance(&g));
    assert_eq!(code_distance(&g), Some(4));
    let lat = build_lattice(LatticeParams::double(1, 2, 2)).unwrap();
    let g = bit_graph(&lat).unwrap().graph;
    assert_eq!(g.num_edges(), 22);
    assert_eq!(code_distance(&g), exhaustive_distance(&g));
    assert_eq!(code_distance(&g), Some(2));
}

#[test]
fn minimal_odd_chain_is_closed_and_odd() {
    let lat = build_lattice(LatticeParams::single(2, 8)).unwrap();
    let g = phase_graph(&lat).graph;
    let c = min_odd_chain(&g).unwrap();
    assert!(syndrome_of(&g, &c).is_empty());
    assert!(parity(&g, &c));
    // it is the defect boundary itself
    assert_eq!(c.to_vec(), lat.defect_boundary(0));
}

#[test]
fn bit_graph_structure() {
    let lat = build_lattice(LatticeParams::double(2, 8, 8)).unwrap();
    let g = bit_graph(&lat).unwrap().graph;
    for t in g.boundary_vertices() {
        assert_eq!(g.degree(t), 1);
    }
    assert_eq!(g.boundary_vertices().len(), 16);
    // the logical loop is a cut separating the first defect's hanging vertices
    let side = cut_partition(&g).expect("logical set is a cut");
    for e in g.logical_edges() {
        let [u, v] = g.endpoints(e);
        assert_ne!(side[u], side[v]);
    }
    // the loop has an empty syndrome (all its edges end on the boundary set)
    let gamma = g.chain_from_edges(g.logical_edges());
    assert_eq!(gamma.count(), 8);
    assert_eq!(
        boundary_of(&g, &gamma)
            .iter()
            .filter(|&&v| !g.is_boundary(v))
            .count(),
        8
    );
}

#[test]
fn phase_logical_is_not_a_cut_but_is_crossed_once_by_defect_loop() {
    let lat = build_lattice(LatticeParams::single(3, 4)).unwrap();
    let g = phase_graph(&lat).graph;
    let defect = g.chain_from_edges(lat.defect_boundary(0));
    assert!(syndrome_of(&g, &defect).is_empty());
    assert!(parity(&g, &defect));
}

#[test]
fn graph_files_roundtrip() {
    let lat = build_lattice(LatticeParams::double(2, 5, 3)).unwrap();
    for g in [phase_graph(&lat).graph, bit_graph(&lat).unwrap().graph] {
        let text = graph_to_string(&g);
        let back = read_graph(text.as_bytes()).unwrap();
        assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The boundary of a chain always has even size, boundary vertices included.
    #[test]
    fn boundary_has_even_size(r in 1usize..4, s in 2usize..5, b in 2usize..5, bits in prop::collection::vec(any::<bool>(), 400)) {
        let lat = build_lattice(LatticeParams::double(r, s, b)).unwrap();
        for g in [phase_graph(&lat).graph, bit_graph(&lat).unwrap().graph] {
            let c = g.chain_from_edges((0..g.num_edges()).filter(|&e| bits[e % bits.len()]));
            prop_assert_eq!(boundary_of(&g, &c).len() % 2, 0);
            // syndrome is linear
            let d = g.chain_from_edges((0..g.num_edges()).filter(|&e| e % 3 == 0));
            let lhs = syndrome_of(&g, &c.xor(&d));
            let mut rhs: Vec<usize> = syndrome_of(&g, &c).vertices().to_vec();
            for v in syndrome_of(&g, &d).vertices() {
                match rhs.binary_search(v) {
                    Ok(i) => { rhs.remove(i); }
                    Err(i) => rhs.insert(i, *v),
                }
            }
            prop_assert_eq!(lhs.vertices(), &rhs[..]);
            prop_assert_eq!(parity(&g, &c.xor(&d)), parity(&g, &c) ^ parity(&g, &d));
        }
    }
}
