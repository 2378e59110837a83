use std::collections::BTreeSet;

use proptest::prelude::*;
use qecsplit::circuit_noise::{
    build_3d_decoding_graph, build_readout_circuit, build_readout_circuit_on, correctable_3d,
    correctable_projected, enumerate_events, project, propagate_event, propagate_events,
    relative_syndrome, Basis, ErrorEvent, Fault, NoisyGraph, Operation, Pauli, QubitRole,
    ReadoutCircuit, DEFAULT_ORDER, ROUNDS_PER_CYCLE,
};
use qecsplit::error::CircuitError;
use qecsplit::geometry::{
    graph_to_string, min_odd_chain, parity, read_graph, syndrome_of, Direction, ErrorKind,
    GraphKind, Syndrome,
};
use qecsplit::rare_event::{sample_chain, NoiseModel};
use qecsplit::ErrorChain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn noisy(kind: ErrorKind, r: usize, s: usize, b: usize, t: usize, p: f64) -> NoisyGraph {
    let (lat, _) = kind.build(r, s, b).unwrap();
    build_3d_decoding_graph(&lat, t, p, kind).unwrap()
}

#[test]
fn circuit_layout() {
    let (lat, _) = ErrorKind::Path.build(2, 5, 3).unwrap();
    let c = build_readout_circuit(&lat, 8).unwrap();
    assert_eq!(c.num_rounds(), 48);
    assert_eq!(
        c.num_qubits(),
        lat.num_edges() + lat.num_plaquettes() + lat.num_sites()
    );
    assert!(build_readout_circuit(&lat, 1).is_ok());
    assert!(matches!(
        build_readout_circuit(&lat, 0),
        Err(CircuitError::NoCycles)
    ));

    for r in 0..ROUNDS_PER_CYCLE {
        let mut seen = vec![0; c.num_qubits()];
        for op in c.round(r) {
            match *op {
                Operation::Cnot { control, target } => {
                    seen[control] += 1;
                    seen[target] += 1;
                }
                Operation::Prepare { qubit, .. }
                | Operation::Measure { qubit, .. }
                | Operation::Idle { qubit } => seen[qubit] += 1,
            }
        }
        assert!(seen.iter().all(|&k| k == 1), "round {r}");
    }
    // every check ancilla is prepared and measured once per cycle
    let measured: Vec<usize> = c
        .round(5)
        .iter()
        .filter_map(|op| match *op {
            Operation::Measure { qubit, basis } => {
                let expect = match c.role(qubit) {
                    QubitRole::Plaquette(_) => Basis::Z,
                    QubitRole::Site(_) => Basis::X,
                    QubitRole::Data(_) => panic!("data qubit measured"),
                };
                assert_eq!(basis, expect);
                Some(qubit)
            }
            _ => None,
        })
        .collect();
    assert_eq!(measured.len(), lat.num_plaquettes() + lat.num_sites());

    // CNOT counts follow the retained neighbourhood; sites on a defect
    // boundary have truncated stars
    for s in 0..lat.num_sites() {
        assert_eq!(c.cnot_count(c.site_qubit(s)), lat.site_star(s).len());
    }
    for p in 0..lat.num_plaquettes() {
        assert_eq!(
            c.cnot_count(c.plaquette_qubit(p)),
            lat.plaquette_boundary(p).len()
        );
    }
    let truncated = lat
        .defect_boundary(0)
        .iter()
        .flat_map(|&e| lat.edge(e).sites)
        .any(|s| c.cnot_count(c.site_qubit(s)) < 4);
    assert!(truncated);
    // bit-kind circuit drops qubits on the outer boundary, so the plaquettes
    // along it skip one CNOT and idle instead
    let noisy = build_3d_decoding_graph(&lat, 2, 0.001, ErrorKind::Path).unwrap();
    let short = (0..lat.num_plaquettes())
        .filter(|&p| noisy.circuit.cnot_count(noisy.circuit.plaquette_qubit(p)) < 4)
        .count();
    assert!(short > 0);
}

#[test]
fn schedule_check_rejects_inconsistent_orders() {
    use Direction::*;
    let (lat, _) = ErrorKind::Path.build(2, 5, 3).unwrap();
    let all: Vec<usize> = (0..lat.num_edges()).collect();
    assert!(build_readout_circuit_on(&lat, 1, &all, DEFAULT_ORDER).is_ok());
    assert!(matches!(
        build_readout_circuit_on(&lat, 1, &all, [North, West, South, East]),
        Err(CircuitError::BadSchedule(_))
    ));
    // an order works iff the two horizontal steps and the two vertical steps
    // do not interleave with each other in the same sense
    let dirs = [North, West, East, South];
    let mut good = 0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut s = [a, b, c, d];
                    s.sort();
                    if s != [0, 1, 2, 3] {
                        continue;
                    }
                    let order = [dirs[a], dirs[b], dirs[c], dirs[d]];
                    if build_readout_circuit_on(&lat, 1, &all, order).is_ok() {
                        good += 1;
                    }
                }
            }
        }
    }
    assert_eq!(good, 8);
}

fn circuit_for(kind: ErrorKind) -> (ReadoutCircuit, qecsplit::geometry::LatticeGraph) {
    let (lat, base) = kind.build(2, 5, 3).unwrap();
    let c = build_readout_circuit_on(&lat, 1, &base.qubits, DEFAULT_ORDER).unwrap();
    (c, base)
}

#[test]
fn sparse_and_dense_propagation_agree() {
    for kind in [ErrorKind::Path, ErrorKind::Loop] {
        let (c, _) = circuit_for(kind);
        for ev in enumerate_events(&c) {
            assert_eq!(
                propagate_event(&c, &ev),
                propagate_events(&c, &[ev.clone()]),
                "{ev}"
            );
        }
    }
}

#[test]
fn repeated_fault_cancels() {
    let (c, _) = circuit_for(ErrorKind::Path);
    for ev in enumerate_events(&c) {
        let eff = propagate_events(&c, &[ev.clone(), ev.clone()]);
        assert!(eff.flipped.is_empty() && eff.data_x.is_empty() && eff.data_z.is_empty());
    }
}

#[test]
fn event_probabilities_follow_the_model() {
    let (c, _) = circuit_for(ErrorKind::Loop);
    let events = enumerate_events(&c);
    let mut per_op = std::collections::HashMap::new();
    for ev in &events {
        *per_op.entry((ev.round, ev.operation)).or_insert(0.0) += ev.weight;
        match (&ev.fault, c.round(ev.round)[ev.operation]) {
            (Fault::Flip(_), Operation::Measure { .. }) => assert_eq!(ev.weight, 1.0),
            (Fault::Pauli(ps), Operation::Prepare { basis, .. }) => {
                let want = if basis == Basis::Z {
                    Pauli::X
                } else {
                    Pauli::Z
                };
                assert_eq!(ps[0].1, want);
                assert_eq!(ev.weight, 1.0);
            }
            (Fault::Pauli(_), Operation::Idle { .. }) => assert_eq!(ev.weight, 1.0 / 3.0),
            (Fault::Pauli(ps), Operation::Cnot { .. }) => {
                assert!(!ps.is_empty() && ps.len() <= 2);
                assert_eq!(ev.weight, 1.0 / 15.0);
            }
            (f, op) => panic!("{f:?} on {op:?}"),
        }
    }
    // each operation fails with total probability p
    for (_, w) in per_op {
        assert!((w - 1.0).abs() < 1e-12);
    }
}

#[test]
fn simple_faults() {
    let (c, base) = circuit_for(ErrorKind::Path);
    let events = enumerate_events(&c);
    let p = 7;
    let flip = events
        .iter()
        .find(|e| e.fault == Fault::Flip(c.plaquette_qubit(p)))
        .unwrap();
    let (det, data) = relative_syndrome(&c, &base, flip);
    assert_eq!(det, vec![(p, 0), (p, 1)]);
    assert!(data.is_empty());

    // X on an interior data qubit before any CNOT: a pair in the first layer
    let q = (0..base.graph.num_edges())
        .find(|&e| {
            base.graph
                .endpoints(e)
                .iter()
                .all(|&v| !base.graph.is_boundary(v))
        })
        .unwrap();
    let ev = ErrorEvent {
        cycle: 0,
        round: 0,
        operation: c
            .round(0)
            .iter()
            .position(|op| *op == Operation::Idle { qubit: q })
            .unwrap(),
        fault: Fault::Pauli(vec![(q, Pauli::X)]),
        weight: 1.0 / 3.0,
    };
    let (det, data) = relative_syndrome(&c, &base, &ev);
    let [u, v] = base.graph.endpoints(q);
    assert_eq!(det, vec![(u.min(v), 0), (u.max(v), 0)]);
    assert_eq!(data.to_vec(), vec![q]);

    let noisy = noisy(ErrorKind::Path, 2, 5, 3, 3, 0.001);
    let i = noisy
        .dictionary
        .events
        .iter()
        .position(|e| *e == ev)
        .unwrap();
    let e = noisy.dictionary.edge_of(i, 1).unwrap();
    assert_eq!(noisy.dictionary.projection[e], vec![q]);
    let j = noisy
        .dictionary
        .events
        .iter()
        .position(|e| e == flip)
        .unwrap();
    let e = noisy.dictionary.edge_of(j, 1).unwrap();
    assert!(noisy.dictionary.projection[e].is_empty());
    assert!(noisy.dictionary.is_time_like(e, &noisy.graph));
}

#[test]
fn every_fault_has_at_most_two_detectors_and_one_edge() {
    for kind in [ErrorKind::Path, ErrorKind::Loop] {
        let ng = noisy(kind, 2, 5, 3, 3, 0.005);
        let d = &ng.dictionary;
        let g = &ng.graph;
        let mut visible_weight = 0.0;
        let mut owner = std::collections::HashMap::new();
        for (e, m) in d.members.iter().enumerate() {
            for &key in m {
                assert!(owner.insert(key, e).is_none(), "class in two edges");
            }
        }
        for (i, ev) in d.events.iter().enumerate() {
            let (det, data) = relative_syndrome(&ng.circuit, &ng.base, ev);
            assert!(det.len() <= 2, "{ev}");
            if det.is_empty() {
                continue;
            }
            visible_weight += ev.weight;
            for cycle in 0..d.cycles {
                let e = d.edge_of(i, cycle).unwrap();
                // the edge joins exactly the detectors of the fault
                let want: BTreeSet<usize> =
                    det.iter().map(|&(c, dl)| d.vertex(c, cycle + dl)).collect();
                let got: BTreeSet<usize> = g
                    .endpoints(e)
                    .into_iter()
                    .filter(|&v| !g.is_boundary(v))
                    .collect();
                assert_eq!(got, want);
                // its projection agrees with the fault's data error
                let diff = data.xor(&ng.base.graph.chain_from_edges(d.projection[e].clone()));
                assert!(syndrome_of(&ng.base.graph, &diff).is_empty());
                assert!(!parity(&ng.base.graph, &diff));
            }
        }
        let total: f64 = d.coefficients.iter().sum();
        assert!((total - visible_weight * d.cycles as f64).abs() < 1e-9);
        // each vertex carries at most one hanging edge
        let mut hanging = vec![0; g.num_vertices()];
        for &t in &g.boundary_vertices() {
            hanging[g.neighbors(t)[0].0] += 1;
        }
        assert!(hanging.iter().all(|&h| h <= 1));
        if kind == ErrorKind::Loop {
            assert!(!g.has_boundary());
        }
    }
}

#[test]
fn bulk_vertices_have_degree_twelve() {
    for kind in [ErrorKind::Path, ErrorKind::Loop] {
        let (lat, _) = kind.build(2, 7, 5).unwrap();
        let ng = build_3d_decoding_graph(&lat, 5, 0.005, kind).unwrap();
        let d = &ng.dictionary;
        let g2 = &ng.base.graph;
        // checks whose 2D neighbourhood up to distance 2 has full degree
        let full = |c: usize| {
            g2.degree(c) == 4 && g2.neighbors(c).iter().all(|&(w, _)| !g2.is_boundary(w))
        };
        let bulk: Vec<usize> = (0..d.checks)
            .filter(|&c| full(c) && g2.neighbors(c).iter().all(|&(w, _)| full(w)))
            .collect();
        assert!(!bulk.is_empty());
        for &c in &bulk {
            for layer in 1..d.cycles {
                assert_eq!(ng.graph.degree(d.vertex(c, layer)), 12, "{kind} check {c}");
            }
        }
    }
}

#[test]
fn priors() {
    let ng = noisy(ErrorKind::Path, 2, 5, 3, 3, 0.007);
    let d = &ng.dictionary;
    for (e, &q) in d.priors.iter().enumerate() {
        assert!(q > 0.0 && q < 0.5);
        assert!((q - d.coefficients[e] * 0.007).abs() < 1e-15);
        assert!((ng.graph.weight(e) - ((1.0 - q) / q).ln()).abs() < 1e-12);
    }
    let lower = d.priors_at(0.003);
    assert!(lower.iter().zip(&d.priors).all(|(a, b)| a < b));

    // diagonal edges (distinct checks in distinct layers) are the least
    // noisy edges of the bulk
    let g = &ng.graph;
    let mut diagonal = f64::INFINITY;
    let mut other = f64::INFINITY;
    for e in 0..g.num_edges() {
        let [u, v] = g.endpoints(e);
        if let (Some((a, la)), Some((b, lb))) = (d.location(u), d.location(v)) {
            if a != b && la != lb {
                diagonal = diagonal.min(d.coefficients[e]);
            } else {
                other = other.min(d.coefficients[e]);
            }
        }
    }
    assert!(diagonal < other);

    let (lat, _) = ErrorKind::Path.build(2, 5, 3).unwrap();
    assert!(matches!(
        build_3d_decoding_graph(&lat, 3, 0.2, ErrorKind::Path),
        Err(CircuitError::PriorTooLarge { .. })
    ));
}

/// Runs the whole `cycles`-cycle circuit on a dense Pauli frame with the
/// given faults, then a noiseless final readout, and returns the detection
/// events and the final data error of the decoded type.
fn simulate(ng: &NoisyGraph, faults: &[(usize, ErrorEvent)]) -> (Syndrome, ErrorChain) {
    let c = &ng.circuit;
    let d = &ng.dictionary;
    let n = c.num_qubits();
    let nd = c.data_edges().len();
    let (mut x, mut z) = (vec![false; n], vec![false; n]);
    let check_of = |q: usize| match (c.role(q), d.kind) {
        (QubitRole::Plaquette(p), GraphKind::Bit) => Some(p),
        (QubitRole::Site(s), GraphKind::Phase) => Some(s),
        _ => None,
    };
    let mut previous = vec![false; d.checks];
    let mut detectors = Vec::new();
    for cycle in 0..d.cycles {
        let mut outcome = vec![false; d.checks];
        for r in 0..ROUNDS_PER_CYCLE {
            for op in c.round(r) {
                match *op {
                    Operation::Prepare { qubit, .. } => {
                        x[qubit] = false;
                        z[qubit] = false;
                    }
                    Operation::Cnot { control, target } => {
                        x[target] ^= x[control];
                        z[control] ^= z[target];
                    }
                    Operation::Measure { qubit, basis } => {
                        if let Some(k) = check_of(qubit) {
                            outcome[k] = if basis == Basis::Z {
                                x[qubit]
                            } else {
                                z[qubit]
                            };
                        }
                    }
                    Operation::Idle { .. } => {}
                }
            }
            for (fc, ev) in faults {
                if *fc != cycle || ev.round != r {
                    continue;
                }
                match &ev.fault {
                    Fault::Flip(q) => {
                        if let Some(k) = check_of(*q) {
                            outcome[k] ^= true;
                        }
                    }
                    Fault::Pauli(ps) => {
                        for &(q, p) in ps {
                            x[q] ^= matches!(p, Pauli::X | Pauli::Y);
                            z[q] ^= matches!(p, Pauli::Z | Pauli::Y);
                        }
                    }
                }
            }
        }
        for k in 0..d.checks {
            if outcome[k] != previous[k] {
                detectors.push(d.vertex(k, cycle));
            }
        }
        previous = outcome;
    }
    let frame = if d.kind == GraphKind::Bit { &x } else { &z };
    let data = ng
        .base
        .graph
        .chain_from_edges((0..nd).filter(|&q| frame[q]));
    let last = syndrome_of(&ng.base.graph, &data);
    for k in 0..d.checks {
        if last.contains(k) != previous[k] {
            detectors.push(d.vertex(k, d.cycles));
        }
    }
    (Syndrome::new(detectors), data)
}

#[test]
fn space_time_graph_matches_full_circuit_simulation() {
    for kind in [ErrorKind::Path, ErrorKind::Loop] {
        let ng = noisy(kind, 2, 5, 3, 3, 0.005);
        let d = &ng.dictionary;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let k = rng.gen_range(1..=5);
            let faults: Vec<(usize, usize)> = (0..k)
                .map(|_| (rng.gen_range(0..d.cycles), rng.gen_range(0..d.events.len())))
                .collect();
            let mut chain = ng.graph.empty_chain();
            for &(cy, i) in &faults {
                if let Some(e) = d.edge_of(i, cy) {
                    chain.toggle(e);
                }
            }
            let evs: Vec<(usize, ErrorEvent)> = faults
                .iter()
                .map(|&(cy, i)| (cy, d.events[i].clone()))
                .collect();
            let (det, data) = simulate(&ng, &evs);
            assert_eq!(syndrome_of(&ng.graph, &chain), det);
            let diff = project(d, &ng.base.graph, &chain).xor(&data);
            assert!(syndrome_of(&ng.base.graph, &diff).is_empty());
            assert_eq!(parity(&ng.base.graph, &diff), false);
        }
    }
}

#[test]
fn correctability_in_space_time() {
    for kind in [ErrorKind::Path, ErrorKind::Loop] {
        let ng = noisy(kind, 2, 5, 3, 3, 0.005);
        assert!(correctable_3d(&ng, &ng.graph.empty_chain(), None).unwrap());
        let seed = min_odd_chain(&ng.graph).unwrap();
        assert!(syndrome_of(&ng.graph, &seed).is_empty());
        assert!(!correctable_3d(&ng, &seed, None).unwrap());
        if kind == ErrorKind::Path {
            // the seed closes through hanging edges, odd on the left tube
            let logical: Vec<usize> = seed.iter().filter(|&e| ng.graph.is_logical(e)).collect();
            assert!(logical.iter().all(|&e| ng
                .graph
                .endpoints(e)
                .iter()
                .any(|&v| ng.graph.is_boundary(v))));
            assert_eq!(logical.len() % 2, 1);
        }

        let noise = NoiseModel::per_edge(ng.dictionary.priors.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut failures = 0;
        for _ in 0..1000 {
            let e = sample_chain(&noise, &mut rng);
            let a = correctable_3d(&ng, &e, None).unwrap();
            assert_eq!(a, correctable_projected(&ng, &e).unwrap());
            failures += (!a) as usize;
        }
        // p = 0.5% on a distance-5 graph: failures are rare
        assert!(failures < 50);
    }
}

#[test]
fn projection_is_linear() {
    let ng = noisy(ErrorKind::Path, 2, 5, 3, 2, 0.001);
    let d = &ng.dictionary;
    assert!(project(d, &ng.base.graph, &ng.graph.empty_chain()).is_empty());
    for e in 0..ng.graph.num_edges() {
        if d.is_time_like(e, &ng.graph) {
            assert!(project(d, &ng.base.graph, &ng.graph.chain_from_edges([e])).is_empty());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let m = ng.graph.num_edges();
        let a = ng
            .graph
            .chain_from_edges((0..m).filter(|_| rng.gen_bool(0.05)));
        let b = ng
            .graph
            .chain_from_edges((0..m).filter(|_| rng.gen_bool(0.05)));
        let lhs = project(d, &ng.base.graph, &a.xor(&b));
        let rhs = project(d, &ng.base.graph, &a).xor(&project(d, &ng.base.graph, &b));
        assert_eq!(lhs, rhs);
    }
}

const GOLDEN: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/tests/golden/noisy_path_r2_s5_b3_t3.graph"
);

/// Regenerate with `UPDATE_GOLDEN=1 cargo test golden`.
#[test]
fn golden_graph() {
    let ng = noisy(ErrorKind::Path, 2, 5, 3, 3, 0.001);
    let text = graph_to_string(&ng.graph);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(GOLDEN, &text).unwrap();
    }
    let want = std::fs::read_to_string(GOLDEN).expect("golden file present");
    assert_eq!(text, want);
    let back = read_graph(want.as_bytes()).unwrap();
    assert_eq!(back, ng.graph);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projected_and_space_time_parity_agree(seed in any::<u64>(), density in 0.0f64..0.02) {
        let ng = noisy(ErrorKind::Loop, 2, 5, 3, 2, 0.004);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ng.graph.num_edges();
        let e = ng.graph.chain_from_edges((0..m).filter(|_| rng.gen_bool(density)));
        prop_assert_eq!(
            parity(&ng.graph, &e),
            parity(&ng.base.graph, &project(&ng.dictionary, &ng.base.graph, &e))
        );
    }
}
