use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::geometry::{DecodingGraph, WEIGHT_SCALE};

const NO_EDGE: u32 = u32::MAX;
pub(crate) const UNREACHABLE: i64 = i64::MAX;

/// Single-source shortest paths in scaled integer weights. Vertices are
/// settled in `(distance, id)` order and a predecessor is only replaced by a
/// strictly shorter path, so ties resolve identically on every run.
#[derive(Clone, Debug)]
pub struct ShortestPathTree {
    source: usize,
    dist: Vec<i64>,
    pred: Vec<u32>,
    nearest_boundary: Option<usize>,
}

impl ShortestPathTree {
    pub fn build(graph: &DecodingGraph, source: usize) -> Self {
        match uniform_weight(graph) {
            Some(w) => Self::build_uniform(graph, source, w),
            None => Self::build_heap(graph, source),
        }
    }

    fn build_heap(graph: &DecodingGraph, source: usize) -> Self {
        let n = graph.num_vertices();
        let mut dist = vec![UNREACHABLE; n];
        let mut pred = vec![NO_EDGE; n];
        let mut nearest_boundary = None;
        let mut heap = BinaryHeap::new();
        dist[source] = 0;
        heap.push(Reverse((0i64, source as u32)));
        while let Some(Reverse((d, v))) = heap.pop() {
            let v = v as usize;
            if d > dist[v] {
                continue;
            }
            if graph.is_boundary(v) {
                nearest_boundary.get_or_insert(v);
            }
            for &(w, e) in graph.neighbors(v) {
                let nd = d + graph.int_weight(e);
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = e as u32;
                    heap.push(Reverse((nd, w as u32)));
                }
            }
        }
        Self {
            source,
            dist,
            pred,
            nearest_boundary,
        }
    }

    /// Breadth-first search for equal edge weights. Each level is scanned in
    /// id order, which settles vertices in the same order as the heap above
    /// and so yields the same tree.
    fn build_uniform(graph: &DecodingGraph, source: usize, w: i64) -> Self {
        let n = graph.num_vertices();
        let mut dist = vec![UNREACHABLE; n];
        let mut pred = vec![NO_EDGE; n];
        let mut nearest_boundary = None;
        dist[source] = 0;
        let mut level = Vec::with_capacity(n);
        let mut next = Vec::with_capacity(n);
        level.push(source);
        let mut d = 0;
        while !level.is_empty() {
            level.sort_unstable();
            if nearest_boundary.is_none() {
                nearest_boundary = level.iter().copied().find(|&v| graph.is_boundary(v));
            }
            d += w;
            for &v in &level {
                for &(x, e) in graph.neighbors(v) {
                    if dist[x] == UNREACHABLE {
                        dist[x] = d;
                        pred[x] = e as u32;
                        next.push(x);
                    }
                }
            }
            std::mem::swap(&mut level, &mut next);
            next.clear();
        }
        Self {
            source,
            dist,
            pred,
            nearest_boundary,
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub(crate) fn int_distance(&self, v: usize) -> i64 {
        self.dist[v]
    }

    /// Weighted distance to `v`, or `None` if unreachable.
    pub fn distance(&self, v: usize) -> Option<f64> {
        (self.dist[v] != UNREACHABLE).then(|| self.dist[v] as f64 / WEIGHT_SCALE)
    }

    /// Closest boundary vertex, ties broken by vertex id.
    pub fn nearest_boundary(&self) -> Option<usize> {
        self.nearest_boundary
    }

    /// Edges of the tree path from the source to `target`.
    pub fn path_to(&self, graph: &DecodingGraph, target: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut v = target;
        while v != self.source {
            let e = self.pred[v];
            assert!(
                e != NO_EDGE,
                "vertex {target} unreachable from {}",
                self.source
            );
            let e = e as usize;
            out.push(e);
            let [a, b] = graph.endpoints(e);
            v = if a == v { b } else { a };
        }
        out
    }
}

/// The common integer weight when every edge has the same one.
fn uniform_weight(graph: &DecodingGraph) -> Option<i64> {
    let first = graph.int_weight(0.min(graph.num_edges().saturating_sub(1)));
    (graph.num_edges() > 0 && (0..graph.num_edges()).all(|e| graph.int_weight(e) == first))
        .then_some(first)
}

/// Shortest-path trees rooted at the current syndrome vertices.
#[derive(Clone, Debug, Default)]
pub struct PathCache {
    trees: HashMap<usize, ShortestPathTree>,
    spare: VecDeque<ShortestPathTree>,
    searches: u64,
}

const SPARE_TREES: usize = 16;

impl PathCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn terminals(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.trees.keys().copied().collect();
        t.sort_unstable();
        t
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.trees.contains_key(&v)
    }

    pub fn tree(&self, v: usize) -> Option<&ShortestPathTree> {
        self.trees.get(&v)
    }

    /// Number of single-source searches run so far.
    pub fn searches(&self) -> u64 {
        self.searches
    }

    /// Distance between two cached terminals, read from the tree of the
    /// smaller id.
    pub fn distance(&self, u: usize, v: usize) -> Option<f64> {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        self.trees.get(&a).and_then(|t| t.distance(b))
    }

    fn insert(&mut self, graph: &DecodingGraph, v: usize) {
        if self.trees.contains_key(&v) {
            return;
        }
        let tree = match self.spare.iter().position(|t| t.source == v) {
            Some(i) => self.spare.remove(i).expect("index in range"),
            None => {
                self.searches += 1;
                ShortestPathTree::build(graph, v)
            }
        };
        self.trees.insert(v, tree);
    }

    fn remove(&mut self, v: usize) {
        if let Some(tree) = self.trees.remove(&v) {
            if self.spare.len() == SPARE_TREES {
                self.spare.pop_front();
            }
            self.spare.push_back(tree);
        }
    }

    /// Makes the cached terminal set equal to `terminals` (sorted).
    pub fn sync(&mut self, graph: &DecodingGraph, terminals: &[usize]) {
        let current = self.terminals();
        let (removed, added) = sorted_difference(&current, terminals);
        cache_update(self, graph, &removed, &added);
    }
}

/// Computes shortest-path trees from every source.
pub fn weighted_distances(graph: &DecodingGraph, sources: &[usize]) -> PathCache {
    let mut cache = PathCache::new();
    for &s in sources {
        cache.insert(graph, s);
    }
    cache
}

/// Drops trees of `removed` and searches only from `added`.
pub fn cache_update(
    cache: &mut PathCache,
    graph: &DecodingGraph,
    removed: &[usize],
    added: &[usize],
) {
    for &v in removed {
        cache.remove(v);
    }
    for &v in added {
        cache.insert(graph, v);
    }
}

/// `(a \ b, b \ a)` for sorted slices.
fn sorted_difference(a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            only_a.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            only_b.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    (only_a, only_b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference() {
        assert_eq!(
            sorted_difference(&[1, 3, 5], &[2, 3, 6]),
            (vec![1, 5], vec![2, 6])
        );
        assert_eq!(sorted_difference(&[], &[4]), (vec![], vec![4]));
    }

    #[test]
    fn ties_prefer_smaller_ids() {
        // square 0-1-3, 0-2-3: two shortest paths to 3; pred via 1 (settled first)
        let g =
            DecodingGraph::from_edges(4, &[], vec![[0, 1], [0, 2], [1, 3], [2, 3]], &[]).unwrap();
        let t = ShortestPathTree::build(&g, 0);
        assert_eq!(t.path_to(&g, 3), vec![2, 0]);
        assert_eq!(t.distance(3), Some(2.0));
    }

    #[test]
    fn breadth_first_matches_heap_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..30);
            let mut edges = Vec::new();
            for _ in 0..rng.gen_range(1..60) {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    edges.push([u, v]);
                }
            }
            if edges.is_empty() {
                continue;
            }
            let mut deg = vec![0; n];
            for &[u, v] in &edges {
                deg[u] += 1;
                deg[v] += 1;
            }
            let boundary: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
            let g = DecodingGraph::from_edges(n, &boundary, edges, &[]).unwrap();
            let src = rng.gen_range(0..n);
            let fast = ShortestPathTree::build(&g, src);
            let slow = ShortestPathTree::build_heap(&g, src);
            for v in 0..n {
                assert_eq!(fast.dist[v], slow.dist[v]);
                assert_eq!(fast.pred[v], slow.pred[v]);
            }
            assert_eq!(fast.nearest_boundary, slow.nearest_boundary);
        }
    }

    #[test]
    fn update_searches_only_added() {
        let g =
            DecodingGraph::from_edges(5, &[], vec![[0, 1], [1, 2], [2, 3], [3, 4]], &[]).unwrap();
        let mut c = weighted_distances(&g, &[0, 2]);
        assert_eq!(c.searches(), 2);
        cache_update(&mut c, &g, &[0], &[4]);
        assert_eq!(c.searches(), 3);
        assert_eq!(c.terminals(), vec![2, 4]);
        // restoring a recently dropped terminal reuses its tree
        c.sync(&g, &[0, 2]);
        assert_eq!(c.searches(), 3);
        assert_eq!(c.distance(2, 0), Some(2.0));
    }
}
