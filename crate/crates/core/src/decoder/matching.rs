use serde::{Deserialize, Serialize};

use crate::decoder::blossom::max_weight_matching;
use crate::error::DecodeError;
use crate::geometry::WEIGHT_SCALE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchingMode {
    /// Perfect matching of least total weight.
    MinimizePerfect,
    /// Matching (not necessarily perfect) of greatest total weight.
    MaximizeNonPerfect,
}

/// A weighted matching problem over vertices `0..num_vertices`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingInstance {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub mode: MatchingMode,
}

/// Solves the instance exactly; `mate[v]` is the partner of `v`.
pub fn exact_matching(instance: &MatchingInstance) -> Result<Vec<Option<usize>>, DecodeError> {
    let edges: Vec<(usize, usize, i64)> = instance
        .edges
        .iter()
        .map(|&(u, v, w)| (u, v, (w * WEIGHT_SCALE).round() as i64))
        .collect();
    solve(instance.num_vertices, &edges, instance.mode)
}

/// Weights above this bound could overflow the doubled duals.
const MAX_INT_WEIGHT: i64 = 1 << 60;

fn to_max_form(
    edges: &[(usize, usize, i64)],
    mode: MatchingMode,
) -> Result<Vec<(usize, usize, i64)>, DecodeError> {
    let max = edges.iter().map(|e| e.2.abs()).max().unwrap_or(0);
    if max >= MAX_INT_WEIGHT / 2 {
        return Err(DecodeError::WeightOverflow);
    }
    Ok(match mode {
        MatchingMode::MaximizeNonPerfect => edges.to_vec(),
        MatchingMode::MinimizePerfect => {
            let top = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
            edges.iter().map(|&(u, v, w)| (u, v, top - w)).collect()
        }
    })
}

/// Exact solve on the full edge list.
pub(crate) fn solve(
    n: usize,
    edges: &[(usize, usize, i64)],
    mode: MatchingMode,
) -> Result<Vec<Option<usize>>, DecodeError> {
    let maxed = to_max_form(edges, mode)?;
    let sol = max_weight_matching(n, &maxed, mode == MatchingMode::MinimizePerfect);
    if mode == MatchingMode::MinimizePerfect && !sol.is_perfect() {
        return Err(DecodeError::Infeasible);
    }
    Ok(sol.mates())
}

/// Exact solve that first matches on each vertex's `k` most favourable edges,
/// then checks every remaining edge against the dual solution and re-solves
/// with the violators added until none remain. The result is optimal for the
/// full edge list and depends only on the input.
pub(crate) fn solve_sparse(
    n: usize,
    edges: &[(usize, usize, i64)],
    mode: MatchingMode,
    k: usize,
) -> Result<Vec<Option<usize>>, DecodeError> {
    if edges.len() <= n * k / 2 + n {
        return solve(n, edges, mode);
    }
    let maxed = to_max_form(edges, mode)?;
    let perfect = mode == MatchingMode::MinimizePerfect;
    let mut candidate = vec![false; edges.len()];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(u, v, _)) in maxed.iter().enumerate() {
        incident[u].push(i);
        incident[v].push(i);
    }
    for list in &mut incident {
        let key = |&i: &usize| (std::cmp::Reverse(maxed[i].2), i);
        if list.len() > k {
            list.select_nth_unstable_by_key(k, key);
        }
        for &i in list.iter().take(k) {
            candidate[i] = true;
        }
    }
    loop {
        let sub: Vec<(usize, usize, i64)> = maxed
            .iter()
            .zip(&candidate)
            .filter(|(_, &c)| c)
            .map(|(e, _)| *e)
            .collect();
        let sol = max_weight_matching(n, &sub, perfect);
        if perfect && !sol.is_perfect() {
            let mut grew = false;
            for (i, &(u, v, _)) in maxed.iter().enumerate() {
                if !candidate[i] && (sol.mate(u).is_none() || sol.mate(v).is_none()) {
                    candidate[i] = true;
                    grew = true;
                }
            }
            if !grew {
                if candidate.iter().all(|&c| c) {
                    return Err(DecodeError::Infeasible);
                }
                candidate.iter_mut().for_each(|c| *c = true);
            }
            continue;
        }
        let mut violated = false;
        for (i, &(u, v, w)) in maxed.iter().enumerate() {
            if !candidate[i] && sol.slack(u, v, w) < 0 {
                candidate[i] = true;
                violated = true;
            }
        }
        if !violated {
            return Ok(sol.mates());
        }
    }
}
