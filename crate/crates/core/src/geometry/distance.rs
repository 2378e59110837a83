use std::collections::VecDeque;

use crate::chain::ErrorChain;
use crate::geometry::graph::DecodingGraph;

/// Smallest odd chain with empty syndrome, counted in edges.
///
/// Searches the parity double cover with all boundary vertices merged into a
/// single vertex; an odd chain with empty syndrome is a closed walk through the
/// merged vertex space that crosses the logical set an odd number of times.
/// Returns `None` if no such chain exists.
pub fn min_odd_chain(graph: &DecodingGraph) -> Option<ErrorChain> {
    let n = graph.num_vertices();
    let merged = n;
    let node = |v: usize| if graph.is_boundary(v) { merged } else { v };
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for (e, &[u, v]) in graph.edges().iter().enumerate() {
        let (a, b) = (node(u), node(v));
        if a == b {
            // edge between two boundary vertices: a closed chain on its own
            adj[a].push((a, e));
            continue;
        }
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut starts: Vec<usize> = graph
        .logical_edges()
        .iter()
        .flat_map(|&e| graph.endpoints(e))
        .map(node)
        .collect();
    starts.sort_unstable();
    starts.dedup();

    let mut best: Option<(usize, ErrorChain)> = None;
    let size = 2 * (n + 1);
    let mut dist = vec![usize::MAX; size];
    let mut pred = vec![(usize::MAX, usize::MAX); size];
    for &s in &starts {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        let src = 2 * s;
        let dst = 2 * s + 1;
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            if x == dst || best.as_ref().is_some_and(|(w, _)| dist[x] + 1 >= *w) {
                break;
            }
            let (v, bit) = (x / 2, x % 2);
            for &(w, e) in &adj[v] {
                let y = 2 * w + (bit ^ graph.is_logical(e) as usize);
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    pred[y] = (x, e);
                    queue.push_back(y);
                }
            }
        }
        if dist[dst] != usize::MAX && best.as_ref().is_none_or(|(w, _)| dist[dst] < *w) {
            let mut chain = graph.empty_chain();
            let mut x = dst;
            while x != src {
                let (p, e) = pred[x];
                chain.toggle(e);
                x = p;
            }
            best = Some((dist[dst], chain));
        }
    }
    best.map(|(_, c)| c)
}

/// Code distance of the decoding graph: the size of the smallest odd chain
/// with empty syndrome.
pub fn code_distance(graph: &DecodingGraph) -> Option<usize> {
    min_odd_chain(graph).map(|c| c.count())
}
