use serde::{Deserialize, Serialize};

use crate::chain::ErrorChain;
use crate::error::GraphError;

/// Scale used to turn edge weights into exact integers for path search and
/// matching. Sums of scaled weights are exact, so ties are decided exactly.
pub const WEIGHT_SCALE: f64 = (1u64 << 40) as f64;

/// Largest admissible edge weight; keeps scaled path sums far from overflow.
pub const MAX_WEIGHT: f64 = 1.0e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    /// Vertices are sites, `T` is empty and the logical set is a dual path.
    Phase,
    /// Vertices are plaquettes plus hanging endpoints; the logical set is a
    /// loop around the first defect.
    Bit,
}

/// A sorted set of non-boundary vertices with odd chain degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome(Vec<usize>);

impl Syndrome {
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

/// Weighted graph on which chains, syndromes and the decoder operate.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodingGraph {
    num_vertices: usize,
    boundary: Vec<bool>,
    edges: Vec<[usize; 2]>,
    weights: Vec<f64>,
    int_weights: Vec<i64>,
    rates: Option<Vec<f64>>,
    logical: Vec<bool>,
    adjacency: Vec<Vec<(usize, usize)>>,
    projection: Option<Vec<Vec<usize>>>,
}

impl DecodingGraph {
    /// Builds a graph with unit weights.
    pub fn from_edges(
        num_vertices: usize,
        boundary: &[usize],
        edges: Vec<[usize; 2]>,
        logical: &[usize],
    ) -> Result<Self, GraphError> {
        let weights = vec![1.0; edges.len()];
        Self::new(num_vertices, boundary, edges, weights, logical)
    }

    pub fn new(
        num_vertices: usize,
        boundary: &[usize],
        edges: Vec<[usize; 2]>,
        weights: Vec<f64>,
        logical: &[usize],
    ) -> Result<Self, GraphError> {
        if weights.len() != edges.len() {
            return Err(GraphError::LengthMismatch(weights.len(), edges.len()));
        }
        let mut adjacency = vec![Vec::new(); num_vertices];
        for (k, &[u, v]) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= num_vertices {
                    return Err(GraphError::VertexOutOfRange { edge: k, vertex: w });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(k));
            }
            adjacency[u].push((v, k));
            adjacency[v].push((u, k));
        }
        let mut is_boundary = vec![false; num_vertices];
        for &t in boundary {
            if t >= num_vertices {
                return Err(GraphError::VertexOutOfRange {
                    edge: usize::MAX,
                    vertex: t,
                });
            }
            if adjacency[t].len() != 1 {
                return Err(GraphError::BoundaryDegree(t));
            }
            is_boundary[t] = true;
        }
        let mut flags = vec![false; edges.len()];
        for &e in logical {
            if e >= edges.len() {
                return Err(GraphError::LengthMismatch(e + 1, edges.len()));
            }
            flags[e] = true;
        }
        let mut graph = Self {
            num_vertices,
            boundary: is_boundary,
            edges,
            weights: Vec::new(),
            int_weights: Vec::new(),
            rates: None,
            logical: flags,
            adjacency,
            projection: None,
        };
        graph.set_weights(weights)?;
        Ok(graph)
    }

    /// Replaces the decoder weights.
    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<(), GraphError> {
        if weights.len() != self.edges.len() {
            return Err(GraphError::LengthMismatch(weights.len(), self.edges.len()));
        }
        for (k, &w) in weights.iter().enumerate() {
            if !w.is_finite() || !(0.0..=MAX_WEIGHT).contains(&w) {
                return Err(GraphError::InvalidWeight { edge: k, weight: w });
            }
        }
        self.int_weights = weights
            .iter()
            .map(|&w| (w * WEIGHT_SCALE).round() as i64)
            .collect();
        self.weights = weights;
        Ok(())
    }

    /// Attaches per-edge error probabilities (priors).
    pub fn set_rates(&mut self, rates: Vec<f64>) -> Result<(), GraphError> {
        if rates.len() != self.edges.len() {
            return Err(GraphError::LengthMismatch(rates.len(), self.edges.len()));
        }
        self.rates = Some(rates);
        Ok(())
    }

    /// Attaches, for each edge, the data-qubit set it projects onto.
    pub fn set_projection(&mut self, projection: Vec<Vec<usize>>) -> Result<(), GraphError> {
        if projection.len() != self.edges.len() {
            return Err(GraphError::LengthMismatch(
                projection.len(),
                self.edges.len(),
            ));
        }
        self.projection = Some(projection);
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn endpoints(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn int_weight(&self, e: usize) -> i64 {
        self.int_weights[e]
    }

    pub fn rates(&self) -> Option<&[f64]> {
        self.rates.as_deref()
    }

    pub fn projection(&self) -> Option<&[Vec<usize>]> {
        self.projection.as_deref()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices)
            .filter(|&v| self.boundary[v])
            .collect()
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.iter().any(|&b| b)
    }

    pub fn is_logical(&self, e: usize) -> bool {
        self.logical[e]
    }

    pub fn logical_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.logical[e]).collect()
    }

    /// Incident (neighbour, edge) pairs, ordered by edge id.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn empty_chain(&self) -> ErrorChain {
        ErrorChain::empty(self.edges.len())
    }

    pub fn chain_from_edges<I: IntoIterator<Item = usize>>(&self, edges: I) -> ErrorChain {
        ErrorChain::from_edges(self.edges.len(), edges)
    }
}

/// All vertices (including boundary ones) with odd degree in `chain`.
pub fn boundary_of(graph: &DecodingGraph, chain: &ErrorChain) -> Vec<usize> {
    let mut odd = vec![false; graph.num_vertices()];
    for e in chain.iter() {
        let [u, v] = graph.endpoints(e);
        odd[u] ^= true;
        odd[v] ^= true;
    }
    (0..odd.len()).filter(|&v| odd[v]).collect()
}

/// The syndrome `(∂E) \ T`.
pub fn syndrome_of(graph: &DecodingGraph, chain: &ErrorChain) -> Syndrome {
    Syndrome(
        boundary_of(graph, chain)
            .into_iter()
            .filter(|&v| !graph.is_boundary(v))
            .collect(),
    )
}

/// Parity of the overlap between `chain` and the logical set.
pub fn parity(graph: &DecodingGraph, chain: &ErrorChain) -> bool {
    chain.iter().filter(|&e| graph.is_logical(e)).count() % 2 == 1
}

pub fn chain_weight(graph: &DecodingGraph, chain: &ErrorChain) -> f64 {
    chain.iter().map(|e| graph.weight(e)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> DecodingGraph {
        // t0 - 1 - 2 - t3
        DecodingGraph::from_edges(4, &[0, 3], vec![[0, 1], [1, 2], [2, 3]], &[1]).unwrap()
    }

    #[test]
    fn syndrome_excludes_boundary() {
        let g = path4();
        let c = g.chain_from_edges([0]);
        assert_eq!(boundary_of(&g, &c), vec![0, 1]);
        assert_eq!(syndrome_of(&g, &c).vertices(), &[1]);
        assert!(!parity(&g, &c));
        assert!(parity(&g, &g.chain_from_edges([0, 1])));
    }

    #[test]
    fn validation() {
        assert!(matches!(
            DecodingGraph::from_edges(2, &[], vec![[0, 2]], &[]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            DecodingGraph::from_edges(2, &[], vec![[1, 1]], &[]),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            DecodingGraph::from_edges(3, &[1], vec![[0, 1], [1, 2]], &[]),
            Err(GraphError::BoundaryDegree(1))
        ));
        assert!(DecodingGraph::new(2, &[], vec![[0, 1]], vec![f64::NAN], &[]).is_err());
    }
}
