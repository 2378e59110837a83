use std::collections::VecDeque;

use qecsplit::correctability::{
    brute_force_min_chains, enumerate_min_chains, is_correctable_decoder_specific,
    is_correctable_oracle, is_correctable_strong_cut, is_degenerate, min_chains,
};
use qecsplit::geometry::{
    bit_graph, build_lattice, chain_weight, parity, phase_graph, syndrome_of, DecodingGraph,
    LatticeParams, Syndrome,
};
use qecsplit::ErrorChain;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The degenerate-syndrome example: a 10x4 grid of sites, four syndrome
/// vertices, and a logical chain of five vertical edges.
fn degenerate_instance() -> (DecodingGraph, Syndrome) {
    let id = |x: usize, y: usize| y * 10 + x;
    let mut edges = Vec::new();
    let mut logical = Vec::new();
    // row by row keeps the enumeration frontier narrow
    for y in 0..4 {
        for x in 0..9 {
            edges.push([id(x, y), id(x + 1, y)]);
        }
        if y < 3 {
            for x in 0..10 {
                if y == 1 && x <= 4 {
                    logical.push(edges.len());
                }
                edges.push([id(x, y), id(x, y + 1)]);
            }
        }
    }
    assert_eq!(edges.len(), 66);
    let g = DecodingGraph::from_edges(40, &[], edges, &logical).unwrap();
    (
        g,
        Syndrome::new(vec![id(0, 0), id(6, 0), id(9, 3), id(3, 3)]),
    )
}

#[test]
fn degenerate_syndrome_has_one_even_and_400_odd_chains() {
    let (g, s) = degenerate_instance();
    let chains = enumerate_min_chains(&g, &s, 10_000).unwrap();
    assert_eq!(chains.len(), 401);
    assert!(chains.iter().all(|c| c.count() == 12));
    let odd = chains.iter().filter(|c| parity(&g, c)).count();
    assert_eq!((chains.len() - odd, odd), (1, 400));
    assert!(is_degenerate(&g, &s).unwrap());
    assert!(!is_degenerate(&g, &Syndrome::new(vec![])).unwrap());
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize, with_boundary: bool) -> DecodingGraph {
    // every T vertex hangs off one ordinary vertex
    let nt = if with_boundary {
        rng.gen_range(1..=3)
    } else {
        0
    };
    let mut edges = Vec::new();
    while edges.len() + nt < m.max(nt + 1) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push([u, v]);
        }
    }
    for t in 0..nt {
        let u = rng.gen_range(0..n);
        edges.push([u, n + t]);
    }
    let boundary: Vec<usize> = (n..n + nt).collect();
    let logical: Vec<usize> = (0..edges.len()).filter(|_| rng.gen_bool(0.3)).collect();
    let weights = (0..edges.len())
        .map(|_| rng.gen_range(1..4) as f64)
        .collect();
    DecodingGraph::new(n + nt, &boundary, edges, weights, &logical).unwrap()
}

fn random_chain(rng: &mut ChaCha8Rng, g: &DecodingGraph, density: f64) -> ErrorChain {
    g.chain_from_edges((0..g.num_edges()).filter(|_| rng.gen_bool(density)))
}

/// Independent recursive enumerator: include/exclude every edge, keep the
/// best-weight chains with the required syndrome.
fn recursive_min_chains(g: &DecodingGraph, s: &Syndrome) -> Vec<Vec<usize>> {
    fn go(
        g: &DecodingGraph,
        e: usize,
        chosen: &mut Vec<usize>,
        s: &Syndrome,
        out: &mut (f64, Vec<Vec<usize>>),
    ) {
        if e == g.num_edges() {
            let c = g.chain_from_edges(chosen.iter().copied());
            if syndrome_of(g, &c) == *s {
                let w = chain_weight(g, &c);
                if w < out.0 - 1e-9 {
                    *out = (w, vec![chosen.clone()]);
                } else if (w - out.0).abs() <= 1e-9 {
                    out.1.push(chosen.clone());
                }
            }
            return;
        }
        go(g, e + 1, chosen, s, out);
        chosen.push(e);
        go(g, e + 1, chosen, s, out);
        chosen.pop();
    }
    let mut out = (f64::INFINITY, Vec::new());
    go(g, 0, &mut Vec::new(), s, &mut out);
    out.1
}

#[test]
fn enumerators_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..150 {
        let g = {
            let n = rng.gen_range(3..8);
            random_graph(&mut rng, n, 8, i % 2 == 0)
        };
        let s = syndrome_of(&g, &random_chain(&mut rng, &g, 0.4));
        let mut a: Vec<Vec<usize>> = brute_force_min_chains(&g, &s)
            .unwrap()
            .iter()
            .map(|c| c.to_vec())
            .collect();
        let mut b: Vec<Vec<usize>> = enumerate_min_chains(&g, &s, 1 << 16)
            .unwrap()
            .iter()
            .map(|c| c.to_vec())
            .collect();
        let mut c = recursive_min_chains(&g, &s);
        a.sort();
        b.sort();
        c.sort();
        assert_eq!(a, c);
        assert_eq!(b, c);
    }
}

#[test]
fn strong_implies_decoder_specific() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut degenerate, mut disagreements) = (0, 0);
    for i in 0..600 {
        let g = {
            let (n, m) = (rng.gen_range(3..9), rng.gen_range(6..13));
            random_graph(&mut rng, n, m, i % 2 == 0)
        };
        let e = random_chain(&mut rng, &g, 0.35);
        let strong = is_correctable_oracle(&g, &e).unwrap();
        let specific = is_correctable_decoder_specific(&g, &e, None).unwrap();
        let s = syndrome_of(&g, &e);
        if strong {
            assert!(specific);
        }
        if is_degenerate(&g, &s).unwrap() {
            degenerate += 1;
            disagreements += usize::from(strong != specific);
        } else {
            assert_eq!(strong, specific);
        }
    }
    assert!(degenerate > 0);
    assert!(disagreements > 0);
}

#[test]
fn proposition_one() {
    // removing an edge of a minimum chain leaves a minimum chain for the
    // shifted syndrome
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for i in 0..300 {
        let g = {
            let (n, m) = (rng.gen_range(3..8), rng.gen_range(5..12));
            random_graph(&mut rng, n, m, i % 2 == 1)
        };
        let s = syndrome_of(&g, &random_chain(&mut rng, &g, 0.4));
        let chains = min_chains(&g, &s).unwrap();
        let r = chains.choose(&mut rng).unwrap();
        let Some(&e) = r.to_vec().choose(&mut rng) else {
            continue;
        };
        let mut rest = r.clone();
        rest.toggle(e);
        let s2 = syndrome_of(&g, &rest);
        let w = chain_weight(&g, &min_chains(&g, &s2).unwrap()[0]);
        assert!((chain_weight(&g, &rest) - w).abs() < 1e-9);
        checked += 1;
    }
    assert!(checked > 200);
}

/// Minimum weight of even and odd chains for every syndrome, over all edge
/// subsets of a unit-weight graph.
struct ParityTable {
    vmask: Vec<u32>,
    gamma: Vec<bool>,
    best: Vec<[u8; 2]>,
}

impl ParityTable {
    fn new(g: &DecodingGraph) -> Self {
        let m = g.num_edges();
        assert!(m <= 26 && g.weights().iter().all(|&w| w == 1.0));
        let mut index = vec![usize::MAX; g.num_vertices()];
        let mut k = 0;
        for v in 0..g.num_vertices() {
            if !g.is_boundary(v) {
                index[v] = k;
                k += 1;
            }
        }
        assert!(k <= 20);
        let vmask: Vec<u32> = g
            .edges()
            .iter()
            .map(|&[u, v]| {
                [u, v]
                    .iter()
                    .filter(|&&x| index[x] != usize::MAX)
                    .fold(0u32, |a, &x| a ^ (1 << index[x]))
            })
            .collect();
        let gamma: Vec<bool> = (0..m).map(|e| g.is_logical(e)).collect();
        let mut best = vec![[u8::MAX; 2]; 1 << k];
        Self::walk(m, &vmask, &gamma, |_, syn, par, w| {
            let b = &mut best[syn as usize][par as usize];
            *b = (*b).min(w);
        });
        ParityTable { vmask, gamma, best }
    }

    fn walk(m: usize, vmask: &[u32], gamma: &[bool], mut f: impl FnMut(u32, u32, bool, u8)) {
        let (mut x, mut syn, mut par, mut w) = (0u32, 0u32, false, 0u8);
        f(0, 0, false, 0);
        for i in 1u32..(1 << m) {
            let e = i.trailing_zeros() as usize;
            x ^= 1 << e;
            syn ^= vmask[e];
            par ^= gamma[e];
            if x >> e & 1 == 1 {
                w += 1;
            } else {
                w -= 1;
            }
            f(x, syn, par, w);
        }
    }

    /// Definition 1: some minimum chain has the other parity.
    fn uncorrectable(&self, syn: u32, par: bool) -> bool {
        let [a, b] = self.best[syn as usize];
        let wmin = a.min(b);
        self.best[syn as usize][(!par) as usize] == wmin
    }

    fn uncorrectable_set(&self, m: usize) -> Vec<bool> {
        let mut bad = vec![false; 1 << m];
        Self::walk(m, &self.vmask, &self.gamma, |x, syn, par, _| {
            bad[x as usize] = self.uncorrectable(syn, par)
        });
        bad
    }

    fn chain_key(&self, c: &ErrorChain) -> (u32, bool) {
        let mut syn = 0;
        let mut par = false;
        for e in c.iter() {
            syn ^= self.vmask[e];
            par ^= self.gamma[e];
        }
        (syn, par)
    }
}

/// Breadth-first search over the failure set under single-edge flips.
fn components(bad: &[bool], m: usize) -> usize {
    let mut seen = vec![false; bad.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..bad.len() {
        if !bad[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for e in 0..m {
                let y = x ^ (1 << e);
                if bad[y] && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    count
}

#[test]
fn failure_set_is_connected_without_boundary() {
    let lat = build_lattice(LatticeParams::single(1, 2)).unwrap();
    let g = phase_graph(&lat).graph;
    let m = g.num_edges();
    assert_eq!(m, 24);
    let table = ParityTable::new(&g);
    let bad = table.uncorrectable_set(m);
    assert!(bad.iter().filter(|&&b| b).count() > 0);
    assert_eq!(components(&bad, m), 1);
}

#[test]
fn failure_set_is_connected_with_boundary() {
    let lat = build_lattice(LatticeParams::double(1, 2, 2)).unwrap();
    let g = bit_graph(&lat).unwrap().graph;
    let m = g.num_edges();
    assert_eq!(m, 22);
    let table = ParityTable::new(&g);
    let bad = table.uncorrectable_set(m);
    assert_eq!(components(&bad, m), 1);
}

#[test]
fn cut_test_matches_definition_one() {
    let lat = build_lattice(LatticeParams::double(1, 2, 2)).unwrap();
    let g = bit_graph(&lat).unwrap().graph;
    let table = ParityTable::new(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut uncorrectable = 0;
    for i in 0..4000 {
        let e = random_chain(&mut rng, &g, [0.1, 0.25, 0.5][i % 3]);
        let (syn, par) = table.chain_key(&e);
        let expected = !table.uncorrectable(syn, par);
        assert_eq!(
            is_correctable_strong_cut(&g, &e).unwrap(),
            expected,
            "{:?}",
            e.to_vec()
        );
        if !expected {
            uncorrectable += 1;
        }
        if i % 40 == 0 {
            assert_eq!(is_correctable_oracle(&g, &e).unwrap(), expected);
        }
        let specific = is_correctable_decoder_specific(&g, &e, None).unwrap();
        if expected {
            assert!(specific);
        }
        let [a, b] = table.best[syn as usize];
        if a != b {
            assert_eq!(specific, expected);
        }
    }
    assert!(uncorrectable > 100);
}

#[test]
fn cut_test_on_larger_bit_graph() {
    let lat = build_lattice(LatticeParams::double(2, 2, 2)).unwrap();
    let g = bit_graph(&lat).unwrap().graph;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let e = random_chain(&mut rng, &g, 0.08);
        assert_eq!(
            is_correctable_strong_cut(&g, &e).unwrap(),
            is_correctable_oracle(&g, &e).unwrap()
        );
    }
}

#[test]
fn decoder_specific_examples() {
    let lat = build_lattice(LatticeParams::single(2, 8)).unwrap();
    let g = phase_graph(&lat).graph;
    assert!(is_correctable_decoder_specific(&g, &g.empty_chain(), None).unwrap());
    // the loop around the defect: empty syndrome, odd parity
    let e0 = g.chain_from_edges(lat.defect_boundary(0));
    assert!(!is_correctable_decoder_specific(&g, &e0, None).unwrap());
    for e in (0..g.num_edges()).filter(|&e| !g.is_logical(e)) {
        assert!(is_correctable_decoder_specific(&g, &g.chain_from_edges([e]), None).unwrap());
    }
    let lat = build_lattice(LatticeParams::double(2, 5, 3)).unwrap();
    let g = bit_graph(&lat).unwrap().graph;
    assert!(is_correctable_strong_cut(&g, &g.empty_chain()).unwrap());
}
