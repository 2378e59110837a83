use crate::chain::ErrorChain;
use crate::decoder::matching::{solve_sparse, MatchingMode};
use crate::decoder::paths::{weighted_distances, PathCache, ShortestPathTree, UNREACHABLE};
use crate::error::DecodeError;
use crate::geometry::{DecodingGraph, Syndrome};

/// Candidate edges kept per terminal before dual verification.
const NEAREST: usize = 8;

/// How the decoder resolved a syndrome: vertex pairs joined by shortest
/// paths, and vertices joined to their nearest boundary vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    pub to_boundary: Vec<usize>,
}

fn check_syndrome(graph: &DecodingGraph, syndrome: &Syndrome) -> Result<(), DecodeError> {
    for &v in syndrome.vertices() {
        if v >= graph.num_vertices() || graph.is_boundary(v) {
            return Err(DecodeError::BadSyndromeVertex(v));
        }
    }
    Ok(())
}

/// Trees of the (sorted) terminals; pair `i < j` reads from tree `i`.
fn terminal_trees<'c>(cache: &'c PathCache, s: &[usize]) -> Vec<&'c ShortestPathTree> {
    s.iter()
        .map(|&v| cache.tree(v).expect("terminal cached"))
        .collect()
}

/// Minimum-weight pairing of the syndrome vertices through the graph
/// (the T-join problem for an empty boundary set).
pub fn solve_problem1(
    graph: &DecodingGraph,
    syndrome: &Syndrome,
    cache: &mut PathCache,
) -> Result<Pairing, DecodeError> {
    check_syndrome(graph, syndrome)?;
    cache.sync(graph, syndrome.vertices());
    let s = syndrome.vertices();
    let trees = terminal_trees(cache, s);
    let mut edges = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let d = trees[i].int_distance(s[j]);
            if d != UNREACHABLE {
                edges.push((i, j, d));
            }
        }
    }
    let mate = solve_sparse(s.len(), &edges, MatchingMode::MinimizePerfect, NEAREST)?;
    let pairs = (0..s.len())
        .filter_map(|i| mate[i].filter(|&j| j > i).map(|j| (s[i], s[j])))
        .collect();
    Ok(Pairing {
        pairs,
        to_boundary: Vec::new(),
    })
}

/// Minimum-weight resolution when syndrome vertices may also be joined to
/// the boundary set: a maximum-weight matching with gains
/// `D(u,T) + D(v,T) - D(u,v)`, unmatched vertices going to the boundary.
pub fn solve_problem2(
    graph: &DecodingGraph,
    syndrome: &Syndrome,
    cache: &mut PathCache,
) -> Result<Pairing, DecodeError> {
    check_syndrome(graph, syndrome)?;
    cache.sync(graph, syndrome.vertices());
    let s = syndrome.vertices();
    let k = s.len();
    let trees = terminal_trees(cache, s);
    let to_t: Vec<i64> = trees
        .iter()
        .map(|tree| {
            tree.nearest_boundary()
                .map_or(UNREACHABLE, |t| tree.int_distance(t))
        })
        .collect();
    let mut dist = vec![UNREACHABLE; k * k];
    let mut largest = 0i64;
    for i in 0..k {
        for j in i + 1..k {
            let d = trees[i].int_distance(s[j]);
            dist[i * k + j] = d;
            if d != UNREACHABLE {
                largest = largest.max(d);
            }
        }
        if to_t[i] != UNREACHABLE {
            largest = largest.max(to_t[i]);
        }
    }
    // stand-in cost for a vertex that cannot reach the boundary
    let big = largest
        .checked_mul(k as i64 + 1)
        .and_then(|x| x.checked_add(1))
        .ok_or(DecodeError::WeightOverflow)?;
    let cost = |i: usize| if to_t[i] == UNREACHABLE { big } else { to_t[i] };
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let d = dist[i * k + j];
            if d == UNREACHABLE {
                continue;
            }
            let eta = cost(i)
                .checked_add(cost(j))
                .map(|x| x - d)
                .ok_or(DecodeError::WeightOverflow)?;
            if eta > 0 {
                edges.push((i, j, eta));
            }
        }
    }
    let mate = solve_sparse(k, &edges, MatchingMode::MaximizeNonPerfect, NEAREST)?;
    let mut pairing = Pairing::default();
    for i in 0..k {
        match mate[i] {
            Some(j) if j > i => pairing.pairs.push((s[i], s[j])),
            Some(_) => {}
            None if to_t[i] == UNREACHABLE => return Err(DecodeError::Infeasible),
            None => pairing.to_boundary.push(s[i]),
        }
    }
    Ok(pairing)
}

/// Turns a pairing into a chain by XOR-ing the shortest paths.
pub fn recovery_chain(graph: &DecodingGraph, pairing: &Pairing, cache: &PathCache) -> ErrorChain {
    let mut chain = graph.empty_chain();
    for &(a, b) in &pairing.pairs {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        for e in cache.tree(a).expect("terminal cached").path_to(graph, b) {
            chain.toggle(e);
        }
    }
    for &v in &pairing.to_boundary {
        let tree = cache.tree(v).expect("terminal cached");
        let t = tree.nearest_boundary().expect("boundary reachable");
        for e in tree.path_to(graph, t) {
            chain.toggle(e);
        }
    }
    chain
}

/// Minimum-weight recovery chain `R` with `(∂R) \ T` equal to the syndrome.
///
/// Passing a cache reuses shortest-path trees from earlier calls on the same
/// graph; the result is identical with or without one.
pub fn decode(
    graph: &DecodingGraph,
    syndrome: &Syndrome,
    cache: Option<&mut PathCache>,
) -> Result<ErrorChain, DecodeError> {
    let mut local;
    let cache = match cache {
        Some(c) => c,
        None => {
            check_syndrome(graph, syndrome)?;
            local = weighted_distances(graph, syndrome.vertices());
            &mut local
        }
    };
    if syndrome.is_empty() {
        cache.sync(graph, &[]);
        return Ok(graph.empty_chain());
    }
    let pairing = if graph.has_boundary() {
        solve_problem2(graph, syndrome, cache)?
    } else {
        solve_problem1(graph, syndrome, cache)?
    };
    Ok(recovery_chain(graph, &pairing, cache))
}
