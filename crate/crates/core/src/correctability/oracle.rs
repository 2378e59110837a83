//! Exhaustive minimum-weight chain enumeration for small graphs.

use std::collections::HashMap;

use thiserror::Error;

use crate::chain::ErrorChain;
use crate::geometry::{DecodingGraph, Syndrome, WEIGHT_SCALE};

/// Edge bound for plain subset enumeration.
pub const MAX_BRUTE_EDGES: usize = 24;
/// Vertex bound for the frontier enumerator (parities packed in a u128).
pub const MAX_FRONTIER_VERTICES: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph too large for exhaustive enumeration ({0})")]
    TooLarge(String),
    #[error("more than {0} minimum-weight chains")]
    TooMany(usize),
}

/// Ties are decided with the same relative tolerance the decoder honours.
fn tied(a: i64, b: i64) -> bool {
    let scale = (a.abs().max(b.abs()) as f64 / WEIGHT_SCALE).max(1.0);
    ((a - b).abs() as f64) <= 1e-9 * scale * WEIGHT_SCALE
}

fn target_mask(graph: &DecodingGraph, syndrome: &Syndrome) -> (u128, u128) {
    let mut target = 0u128;
    for &v in syndrome.vertices() {
        target |= 1 << v;
    }
    let mut free = 0u128;
    for v in 0..graph.num_vertices() {
        if graph.is_boundary(v) {
            free |= 1 << v;
        }
    }
    (target, free)
}

/// All minimum-weight chains `R` with `(∂R) \ T = S`, by Gray-code
/// enumeration of every edge subset. Refuses graphs with more than
/// [`MAX_BRUTE_EDGES`] edges.
pub fn brute_force_min_chains(
    graph: &DecodingGraph,
    syndrome: &Syndrome,
) -> Result<Vec<ErrorChain>, OracleError> {
    let m = graph.num_edges();
    if m > MAX_BRUTE_EDGES {
        return Err(OracleError::TooLarge(format!(
            "{m} edges > {MAX_BRUTE_EDGES}"
        )));
    }
    if graph.num_vertices() > MAX_FRONTIER_VERTICES {
        return Err(OracleError::TooLarge(format!(
            "{} vertices",
            graph.num_vertices()
        )));
    }
    let (target, free) = target_mask(graph, syndrome);
    let edge_mask: Vec<u128> = graph
        .edges()
        .iter()
        .map(|&[u, v]| (1u128 << u) ^ (1u128 << v))
        .collect();
    let w: Vec<i64> = (0..m).map(|e| graph.int_weight(e)).collect();
    let mut best: Option<i64> = None;
    let mut hits: Vec<(u32, i64)> = Vec::new();
    let (mut subset, mut parity, mut weight) = (0u32, 0u128, 0i64);
    for i in 0u64..(1u64 << m) {
        if i > 0 {
            let e = i.trailing_zeros() as usize;
            subset ^= 1 << e;
            parity ^= edge_mask[e];
            weight += if subset >> e & 1 == 1 { w[e] } else { -w[e] };
        }
        if parity & !free != target {
            continue;
        }
        match best {
            Some(b) if weight > b && !tied(weight, b) => {}
            Some(b) if tied(weight, b) => {
                hits.push((subset, weight));
                best = Some(b.min(weight));
            }
            _ => {
                best = Some(weight);
                hits.retain(|&(_, hw)| tied(hw, weight));
                hits.push((subset, weight));
            }
        }
    }
    let Some(b) = best else { return Ok(Vec::new()) };
    Ok(hits
        .into_iter()
        .filter(|&(_, hw)| tied(hw, b))
        .map(|(s, _)| ErrorChain::from_edges(m, (0..m).filter(|&e| s >> e & 1 == 1)))
        .collect())
}

/// All minimum-weight chains with `(∂R) \ T = S`, for graphs of up to 128
/// vertices. Edges are decided in id order; the cost-to-go is memoised on the
/// parities of vertices that still have undecided edges, so graphs with a
/// narrow frontier (grids numbered row by row) are cheap. Exact in the
/// scaled integer weights. At most `cap` chains are returned.
pub fn enumerate_min_chains(
    graph: &DecodingGraph,
    syndrome: &Syndrome,
    cap: usize,
) -> Result<Vec<ErrorChain>, OracleError> {
    let n = graph.num_vertices();
    if n > MAX_FRONTIER_VERTICES {
        return Err(OracleError::TooLarge(format!(
            "{n} vertices > {MAX_FRONTIER_VERTICES}"
        )));
    }
    let (target, free) = target_mask(graph, syndrome);
    let m = graph.num_edges();
    let mut last = vec![None; n];
    for (e, &[u, v]) in graph.edges().iter().enumerate() {
        last[u] = Some(e);
        last[v] = Some(e);
    }
    for v in 0..n {
        if last[v].is_none() && target >> v & 1 == 1 {
            return Ok(Vec::new());
        }
    }
    // vertices whose constraint is settled after edge e
    let mut closes = vec![0u128; m];
    for v in 0..n {
        if let Some(e) = last[v] {
            closes[e] |= 1 << v;
        }
    }
    let mut dp = Frontier {
        graph,
        target,
        free,
        closes,
        memo: HashMap::new(),
    };
    let total = dp.cost(0, 0);
    if total == i64::MAX {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    dp.collect(0, 0, total, &mut chosen, &mut out, cap)?;
    Ok(out)
}

struct Frontier<'a> {
    graph: &'a DecodingGraph,
    target: u128,
    free: u128,
    closes: Vec<u128>,
    memo: HashMap<(usize, u128), i64>,
}

impl Frontier<'_> {
    /// Applies edge `e` (taken or not) to `mask`; `None` if a settled vertex
    /// ends with the wrong parity.
    fn step(&self, e: usize, mask: u128, take: bool) -> Option<u128> {
        let [u, v] = self.graph.endpoints(e);
        let mask = if take {
            mask ^ (1 << u) ^ (1 << v)
        } else {
            mask
        };
        let done = self.closes[e];
        if (mask ^ self.target) & done & !self.free != 0 {
            return None;
        }
        Some(mask & !done)
    }

    fn cost(&mut self, e: usize, mask: u128) -> i64 {
        if e == self.graph.num_edges() {
            return 0;
        }
        if let Some(&c) = self.memo.get(&(e, mask)) {
            return c;
        }
        let mut best = i64::MAX;
        for take in [false, true] {
            if let Some(next) = self.step(e, mask, take) {
                let rest = self.cost(e + 1, next);
                if rest != i64::MAX {
                    let w = if take { self.graph.int_weight(e) } else { 0 };
                    best = best.min(rest + w);
                }
            }
        }
        self.memo.insert((e, mask), best);
        best
    }

    fn collect(
        &mut self,
        e: usize,
        mask: u128,
        budget: i64,
        chosen: &mut Vec<usize>,
        out: &mut Vec<ErrorChain>,
        cap: usize,
    ) -> Result<(), OracleError> {
        if e == self.graph.num_edges() {
            if out.len() == cap {
                return Err(OracleError::TooMany(cap));
            }
            out.push(ErrorChain::from_edges(e, chosen.iter().copied()));
            return Ok(());
        }
        for take in [false, true] {
            if let Some(next) = self.step(e, mask, take) {
                let w = if take { self.graph.int_weight(e) } else { 0 };
                let rest = self.cost(e + 1, next);
                if rest != i64::MAX && rest + w == budget {
                    if take {
                        chosen.push(e);
                    }
                    self.collect(e + 1, next, budget - w, chosen, out, cap)?;
                    if take {
                        chosen.pop();
                    }
                }
            }
        }
        Ok(())
    }
}

/// Minimum-weight chains via whichever exhaustive method fits the graph.
pub fn min_chains(
    graph: &DecodingGraph,
    syndrome: &Syndrome,
) -> Result<Vec<ErrorChain>, OracleError> {
    if graph.num_edges() <= MAX_BRUTE_EDGES {
        brute_force_min_chains(graph, syndrome)
    } else {
        enumerate_min_chains(graph, syndrome, 1 << 20)
    }
}

/// True iff the minimum-weight chains for `S` include both parities.
pub fn is_degenerate(graph: &DecodingGraph, syndrome: &Syndrome) -> Result<bool, OracleError> {
    let chains = min_chains(graph, syndrome)?;
    let odd = chains
        .iter()
        .filter(|c| crate::geometry::parity(graph, c))
        .count();
    Ok(odd > 0 && odd < chains.len())
}

/// Definition-1 correctability: every minimum-weight chain with the same
/// syndrome has the parity of `E`.
pub fn is_correctable_oracle(
    graph: &DecodingGraph,
    chain: &ErrorChain,
) -> Result<bool, OracleError> {
    let s = crate::geometry::syndrome_of(graph, chain);
    let eps = crate::geometry::parity(graph, chain);
    Ok(min_chains(graph, &s)?
        .iter()
        .all(|r| crate::geometry::parity(graph, r) == eps))
}
