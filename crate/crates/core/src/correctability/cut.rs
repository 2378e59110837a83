use thiserror::Error;

use crate::chain::ErrorChain;
use crate::decoder::decode;
use crate::error::DecodeError;
use crate::geometry::{chain_weight, parity, syndrome_of, DecodingGraph, Syndrome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error("the logical set is not a cut of the graph")]
    NotACut,
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Two-colouring of the vertices such that the logical edges are exactly the
/// edges between colours. Edges joining two boundary vertices never enter a
/// recovery chain and are ignored. Components not touching the logical set
/// get colour 1.
pub fn cut_partition(graph: &DecodingGraph) -> Option<Vec<bool>> {
    let n = graph.num_vertices();
    let in_cut = |e: usize| {
        let [u, v] = graph.endpoints(e);
        graph.is_logical(e) && !(graph.is_boundary(u) && graph.is_boundary(v))
    };
    let mut color: Vec<Option<bool>> = vec![None; n];
    let mut order: Vec<usize> = graph
        .logical_edges()
        .iter()
        .map(|&e| graph.endpoints(e)[0])
        .collect();
    order.extend(0..n);
    for start in order {
        if color[start].is_some() {
            continue;
        }
        let touches = graph
            .logical_edges()
            .iter()
            .any(|&e| in_cut(e) && graph.endpoints(e).contains(&start));
        color[start] = Some(!touches);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let c = color[v].expect("coloured");
            for &(w, e) in graph.neighbors(v) {
                let [a, b] = graph.endpoints(e);
                if graph.is_boundary(a) && graph.is_boundary(b) {
                    continue;
                }
                let want = if in_cut(e) { !c } else { c };
                match color[w] {
                    None => {
                        color[w] = Some(want);
                        stack.push(w);
                    }
                    Some(cw) if cw != want => return None,
                    _ => {}
                }
            }
        }
    }
    Some(
        color
            .into_iter()
            .map(|c| c.expect("all coloured"))
            .collect(),
    )
}

/// Definition-1 correctability when the logical set is a cut: one decoding
/// settles chains whose decoded parity differs, otherwise the boundary
/// vertices on one side are merged and the cheapest chains of either parity
/// are compared.
pub fn is_correctable_strong_cut(
    graph: &DecodingGraph,
    chain: &ErrorChain,
) -> Result<bool, CutError> {
    let s = syndrome_of(graph, chain);
    let r0 = decode(graph, &s, None)?;
    if parity(graph, &r0) != parity(graph, chain) {
        return Ok(false);
    }
    for &e in &graph.logical_edges() {
        let [u, v] = graph.endpoints(e);
        if graph.is_boundary(u) && graph.is_boundary(v) && graph.weight(e) == 0.0 {
            return Ok(false);
        }
    }
    let side = cut_partition(graph).ok_or(CutError::NotACut)?;
    // side[v] == false marks V0
    let collapse: Vec<usize> = (0..graph.num_vertices())
        .filter(|&v| graph.is_boundary(v) && !side[v])
        .collect();
    if collapse.is_empty() {
        return Ok(true);
    }

    let n = graph.num_vertices();
    let t0 = n;
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for e in 0..graph.num_edges() {
        let [u, v] = graph.endpoints(e);
        if graph.is_boundary(u) && graph.is_boundary(v) {
            continue;
        }
        let map = |x: usize| {
            if graph.is_boundary(x) && !side[x] {
                t0
            } else {
                x
            }
        };
        edges.push([map(u), map(v)]);
        weights.push(graph.weight(e));
    }
    let kept: Vec<usize> = (0..n)
        .filter(|&v| graph.is_boundary(v) && side[v])
        .collect();
    let merged =
        DecodingGraph::new(n + 1, &kept, edges, weights, &[]).map_err(|_| CutError::NotACut)?;

    let cheapest = |syn: &Syndrome| -> Result<Option<f64>, CutError> {
        match decode(&merged, syn, None) {
            Ok(r) => Ok(Some(chain_weight(&merged, &r))),
            Err(DecodeError::Infeasible) => Ok(None),
            Err(e) => Err(e.into()),
        }
    };
    let w1 = cheapest(&s)?;
    let mut with_t0 = s.vertices().to_vec();
    with_t0.push(t0);
    let w2 = cheapest(&Syndrome::new(with_t0))?;
    Ok(match (w1, w2) {
        (Some(a), Some(b)) => (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0),
        _ => true,
    })
}
