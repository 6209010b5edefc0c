use std::collections::VecDeque;

use serde::Serialize;

use super::{Metric, PointCloudSpace};
use crate::error::{check_eps, Result};

/// Points joined by an edge iff `0 < d(i,j) <= eps` (closed threshold, the
/// same bound a chain step may use).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonGraph {
    pub eps: f64,
    /// Neighbors sorted by id, with edge lengths.
    pub adjacency: Vec<Vec<(usize, f64)>>,
}

impl EpsilonGraph {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Unordered edges `(i, j, d)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |(j, _)| *j > i).map(move |&(j, d)| (i, j, d)))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search_by_key(&j, |&(k, _)| k).is_ok()
    }
}

pub fn build_epsilon_graph(space: &PointCloudSpace, eps: f64) -> Result<EpsilonGraph> {
    check_eps(eps)?;
    let n = space.len();
    let adjacency = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, space.dist(i, j)))
                .filter(|&(_, d)| d > 0.0 && d <= eps)
                .collect()
        })
        .collect();
    Ok(EpsilonGraph { eps, adjacency })
}

/// Partition into eps-chain connected components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentPartition {
    pub eps: f64,
    pub component_of: Vec<usize>,
    /// Sorted member lists, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
}

impl ComponentPartition {
    pub fn same_component(&self, i: usize, j: usize) -> bool {
        self.component_of[i] == self.component_of[j]
    }

    /// Smallest distance between points of different components
    /// (`+inf` when there is a single component).
    pub fn min_gap(&self, space: &PointCloudSpace) -> f64 {
        let n = space.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                if self.component_of[i] != self.component_of[j] {
                    best = best.min(space.dist(i, j));
                }
            }
        }
        best
    }

    /// True when every component of `self` sits inside one component of `coarser`.
    pub fn refines(&self, coarser: &ComponentPartition) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(|&i| coarser.component_of[i] == coarser.component_of[c[0]]))
    }
}

pub fn chain_components(space: &PointCloudSpace, eps: f64) -> Result<ComponentPartition> {
    let graph = build_epsilon_graph(space, eps)?;
    Ok(components_of_graph(&graph))
}

pub(crate) fn components_of_graph(graph: &EpsilonGraph) -> ComponentPartition {
    let n = graph.len();
    let mut component_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        component_of[start] = id;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for &(j, _) in graph.neighbors(i) {
                if component_of[j] == usize::MAX {
                    component_of[j] = id;
                    members.push(j);
                    queue.push_back(j);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    ComponentPartition { eps: graph.eps, component_of, components }
}

/// Smallest eps at which `x` and `y` lie in the same eps-chain component,
/// i.e. the minimax step over all chains from `x` to `y`.
pub fn joining_scale(space: &PointCloudSpace, x: usize, y: usize) -> Result<f64> {
    space.check_index(x)?;
    space.check_index(y)?;
    let n = space.len();
    if x == y {
        return Ok(0.0);
    }
    // Prim-style bottleneck sweep on the complete graph.
    let mut best = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    best[x] = 0.0;
    loop {
        let mut pick = None;
        for i in 0..n {
            if !done[i] && pick.is_none_or(|p: usize| best[i] < best[p]) {
                pick = Some(i);
            }
        }
        let Some(i) = pick else { break };
        if i == y {
            return Ok(best[y]);
        }
        done[i] = true;
        for j in 0..n {
            if !done[j] {
                let cand = best[i].max(space.dist(i, j));
                if cand < best[j] {
                    best[j] = cand;
                }
            }
        }
    }
    Ok(best[y])
}
