use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::circuit::{build_readout_circuit_on, ReadoutCircuit, DEFAULT_ORDER};
use super::fault::{enumerate_events, propagate_event, ErrorEvent};
use crate::chain::ErrorChain;
use crate::decoder::{decode, PathCache, ShortestPathTree};
use crate::error::{CircuitError, DecodeError};
use crate::geometry::{
    build_decoding_graph, parity, syndrome_of, DecodingGraph, Direction, ErrorKind, GraphKind,
    LatticeGraph, SurfaceLattice,
};

/// Detection events of a fault relative to its own cycle: `(check, 0)` is
/// the comparison ending in that cycle, `(check, 1)` the next one.
pub type RelativeSyndrome = Vec<(usize, usize)>;

/// Single-cycle faults with the same relative syndrome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TemplateClass {
    pub detectors: RelativeSyndrome,
    /// Indices into [`FaultDictionary::events`].
    pub events: Vec<usize>,
    /// Summed probability in units of `p`.
    pub weight: f64,
}

/// Which faults make up each edge of the space-time graph, and what each
/// edge means on the 2D lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaultDictionary {
    pub kind: GraphKind,
    pub cycles: usize,
    /// Checks per time layer (2D non-boundary vertices).
    pub checks: usize,
    pub p: f64,
    /// Faults of one cycle; cycle `c` copies are the same events shifted.
    pub events: Vec<ErrorEvent>,
    pub classes: Vec<TemplateClass>,
    /// `(template class, cycle)` pairs making up each edge.
    pub members: Vec<Vec<(usize, usize)>>,
    /// Prior of each edge divided by `p`.
    pub coefficients: Vec<f64>,
    pub priors: Vec<f64>,
    /// 2D graph edges each edge projects onto.
    pub projection: Vec<Vec<usize>>,
    /// Logical set of the 2D graph.
    pub logical_2d: Vec<usize>,
}

impl FaultDictionary {
    pub fn vertex(&self, check: usize, layer: usize) -> usize {
        layer * self.checks + check
    }

    /// `(check, layer)` of a detector vertex, `None` for boundary vertices.
    pub fn location(&self, v: usize) -> Option<(usize, usize)> {
        (v < self.checks * (self.cycles + 1)).then(|| (v % self.checks, v / self.checks))
    }

    pub fn priors_at(&self, p: f64) -> Vec<f64> {
        self.coefficients.iter().map(|k| k * p).collect()
    }

    /// Edge carrying template event `event` of cycle `cycle`, if the event
    /// is visible at all.
    pub fn edge_of(&self, event: usize, cycle: usize) -> Option<usize> {
        let class = self
            .classes
            .iter()
            .position(|c| c.events.contains(&event))?;
        self.members
            .iter()
            .position(|m| m.contains(&(class, cycle)))
    }

    /// Time-like edges join the same check in consecutive layers.
    pub fn is_time_like(&self, e: usize, graph: &DecodingGraph) -> bool {
        let [u, v] = graph.endpoints(e);
        matches!((self.location(u), self.location(v)), (Some((a, _)), Some((b, _))) if a == b)
    }
}

/// The space-time decoding graph with its fault dictionary and the 2D graph
/// it projects onto.
#[derive(Clone, Debug)]
pub struct NoisyGraph {
    pub graph: DecodingGraph,
    pub dictionary: FaultDictionary,
    pub base: LatticeGraph,
    pub circuit: ReadoutCircuit,
}

impl NoisyGraph {
    /// The uniform-`p` family of per-edge priors, for the rate ladder.
    pub fn coefficients(&self) -> &[f64] {
        &self.dictionary.coefficients
    }
}

fn sector_of(kind: GraphKind, circuit: &ReadoutCircuit, q: usize) -> Option<usize> {
    let nd = circuit.data_edges().len();
    let np = circuit.num_plaquettes();
    match kind {
        GraphKind::Bit => (nd..nd + np).contains(&q).then(|| q - nd),
        GraphKind::Phase => (q >= nd + np).then(|| q - nd - np),
    }
}

/// Relative syndrome and data error (as a 2D chain) of one fault, for the
/// error type decoded by `base`.
pub fn relative_syndrome(
    circuit: &ReadoutCircuit,
    base: &LatticeGraph,
    event: &ErrorEvent,
) -> (RelativeSyndrome, ErrorChain) {
    let effect = propagate_event(circuit, event);
    let data = match base.kind {
        GraphKind::Bit => &effect.data_x,
        GraphKind::Phase => &effect.data_z,
    };
    let chain = base.graph.chain_from_edges(data.iter().copied());
    let syn = syndrome_of(&base.graph, &chain);
    let mut flips = vec![false; base.graph.num_vertices()];
    for &q in &effect.flipped {
        if let Some(c) = sector_of(base.kind, circuit, q) {
            flips[c] ^= true;
        }
    }
    let mut out = Vec::new();
    for (c, &f) in flips.iter().enumerate() {
        if f {
            out.push((c, 0));
        }
    }
    let mut next = flips;
    for &c in syn.vertices() {
        next[c] ^= true;
    }
    for (c, &f) in next.iter().enumerate() {
        if f {
            out.push((c, 1));
        }
    }
    out.sort_unstable();
    (out, chain)
}

/// Builds the space-time decoding graph for `cycles` noisy readout cycles at
/// error rate `p`, decoding the error type that causes `kind` failures.
///
/// Detector layers run from 0 to `cycles`: layer 0 compares the first
/// outcomes with the noiseless initial state and layer `cycles` is a
/// noiseless final readout, so time boundaries need no hanging edges.
pub fn build_3d_decoding_graph(
    lattice: &SurfaceLattice,
    cycles: usize,
    p: f64,
    kind: ErrorKind,
) -> Result<NoisyGraph, CircuitError> {
    build_3d_decoding_graph_with(lattice, cycles, p, kind, DEFAULT_ORDER)
}

pub fn build_3d_decoding_graph_with(
    lattice: &SurfaceLattice,
    cycles: usize,
    p: f64,
    kind: ErrorKind,
    order: [Direction; 4],
) -> Result<NoisyGraph, CircuitError> {
    let base = build_decoding_graph(lattice, kind.graph_kind())?;
    let circuit = build_readout_circuit_on(lattice, cycles, &base.qubits, order)?;
    let g2 = &base.graph;
    let checks = (0..g2.num_vertices())
        .filter(|&v| !g2.is_boundary(v))
        .count();
    debug_assert!((0..checks).all(|v| !g2.is_boundary(v)));

    let events = enumerate_events(&circuit);
    let mut class_index: HashMap<RelativeSyndrome, usize> = HashMap::new();
    let mut classes: Vec<TemplateClass> = Vec::new();
    let mut data_errors: Vec<Vec<(usize, ErrorChain)>> = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        let (det, chain) = relative_syndrome(&circuit, &base, ev);
        if det.len() > 2 {
            return Err(CircuitError::TooManyDetectors {
                event: ev.to_string(),
                count: det.len(),
            });
        }
        if det.is_empty() {
            // invisible: must act as a stabilizer
            if !syndrome_of(g2, &chain).is_empty() || parity(g2, &chain) {
                return Err(CircuitError::AmbiguousClass(usize::MAX));
            }
            continue;
        }
        let k = *class_index.entry(det.clone()).or_insert_with(|| {
            classes.push(TemplateClass {
                detectors: det,
                events: Vec::new(),
                weight: 0.0,
            });
            data_errors.push(Vec::new());
            classes.len() - 1
        });
        classes[k].events.push(i);
        classes[k].weight += ev.weight;
        data_errors[k].push((i, chain));
    }

    // 2D projection of each spatial check pair, checked against every fault
    let mut trees: HashMap<usize, ShortestPathTree> = HashMap::new();
    let mut path = |a: usize, b: Option<usize>| -> Option<Vec<usize>> {
        let tree = trees
            .entry(a)
            .or_insert_with(|| ShortestPathTree::build(g2, a));
        let target = match b {
            Some(b) => b,
            None => tree.nearest_boundary()?,
        };
        tree.distance(target)?;
        let mut es = tree.path_to(g2, target);
        es.sort_unstable();
        Some(es)
    };
    let mut class_projection = Vec::with_capacity(classes.len());
    for (k, class) in classes.iter().enumerate() {
        let spatial: Vec<usize> = {
            let mut v: Vec<usize> = class.detectors.iter().map(|d| d.0).collect();
            v.dedup();
            v
        };
        let proj = match spatial.as_slice() {
            [_] if class.detectors.len() == 2 => Vec::new(),
            [a] => path(*a, None).ok_or_else(|| {
                CircuitError::UnmatchedDetector(events[class.events[0]].to_string())
            })?,
            [a, b] => path(*a, Some(*b)).ok_or(CircuitError::AmbiguousClass(k))?,
            _ => unreachable!("at most two detectors"),
        };
        let proj_chain = g2.chain_from_edges(proj.iter().copied());
        for (_, chain) in &data_errors[k] {
            let diff = chain.xor(&proj_chain);
            if !syndrome_of(g2, &diff).is_empty() || parity(g2, &diff) {
                return Err(CircuitError::AmbiguousClass(k));
            }
        }
        class_projection.push(proj);
    }

    // place every template class in every cycle
    #[derive(Default)]
    struct Acc {
        members: Vec<(usize, usize)>,
        weight: f64,
        class: usize,
    }
    let mut acc: BTreeMap<(usize, Option<usize>), Acc> = BTreeMap::new();
    let vertex = |c: usize, l: usize| l * checks + c;
    for cycle in 0..cycles {
        for (k, class) in classes.iter().enumerate() {
            let vs: Vec<usize> = class
                .detectors
                .iter()
                .map(|&(c, dl)| vertex(c, cycle + dl))
                .collect();
            let key = match vs.as_slice() {
                [u] => (*u, None),
                [u, v] => (*u.min(v), Some(*u.max(v))),
                _ => unreachable!(),
            };
            let a = acc.entry(key).or_default();
            a.members.push((k, cycle));
            a.weight += class.weight;
            a.class = k;
        }
    }

    let layer_vertices = checks * (cycles + 1);
    let mut edges = Vec::with_capacity(acc.len());
    let mut boundary = Vec::new();
    let mut members = Vec::with_capacity(acc.len());
    let mut coefficients = Vec::with_capacity(acc.len());
    let mut projection = Vec::with_capacity(acc.len());
    for ((u, v), a) in acc {
        let v = v.unwrap_or_else(|| {
            let t = layer_vertices + boundary.len();
            boundary.push(t);
            t
        });
        edges.push([u, v]);
        members.push(a.members);
        coefficients.push(a.weight);
        projection.push(class_projection[a.class].clone());
    }

    let priors: Vec<f64> = coefficients.iter().map(|k| k * p).collect();
    for (e, &q) in priors.iter().enumerate() {
        if !(q < 0.5) {
            return Err(CircuitError::PriorTooLarge { edge: e, prior: q });
        }
    }
    let weights: Vec<f64> = priors.iter().map(|&q| ((1.0 - q) / q).ln()).collect();
    let logical_2d = g2.logical_edges();
    let logical: Vec<usize> = (0..edges.len())
        .filter(|&e| projection[e].iter().filter(|x| g2.is_logical(**x)).count() % 2 == 1)
        .collect();
    let mut graph = DecodingGraph::new(
        layer_vertices + boundary.len(),
        &boundary,
        edges,
        weights,
        &logical,
    )?;
    graph.set_rates(priors.clone())?;
    graph.set_projection(projection.clone())?;
    Ok(NoisyGraph {
        dictionary: FaultDictionary {
            kind: base.kind,
            cycles,
            checks,
            p,
            events,
            classes,
            members,
            coefficients,
            priors,
            projection,
            logical_2d,
        },
        graph,
        base,
        circuit,
    })
}

/// Accumulated 2D chain `Π(E)`.
pub fn project(
    dictionary: &FaultDictionary,
    base: &DecodingGraph,
    chain: &ErrorChain,
) -> ErrorChain {
    let mut out = base.empty_chain();
    for e in chain.iter() {
        for &q in &dictionary.projection[e] {
            out.toggle(q);
        }
    }
    out
}

/// Decodes the relative syndrome of `chain` and checks `R ⊕ E` against the
/// space-time logical set.
pub fn correctable_3d(
    noisy: &NoisyGraph,
    chain: &ErrorChain,
    cache: Option<&mut PathCache>,
) -> Result<bool, DecodeError> {
    let g = &noisy.graph;
    let r = decode(g, &syndrome_of(g, chain), cache)?;
    Ok(parity(g, &r) == parity(g, chain))
}

/// The same decision read on the 2D lattice: `Π(R) ⊕ Π(E)` against the 2D
/// logical set.
pub fn correctable_projected(noisy: &NoisyGraph, chain: &ErrorChain) -> Result<bool, DecodeError> {
    let g = &noisy.graph;
    let r = decode(g, &syndrome_of(g, chain), None)?;
    let total = project(&noisy.dictionary, &noisy.base.graph, &r.xor(chain));
    Ok(!parity(&noisy.base.graph, &total))
}
