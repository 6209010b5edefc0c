//! Deterministic Dijkstra on eps-graphs with ordered-edge costs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::space::EpsilonGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed: the heap pops the smallest cost, then the smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPaths {
    /// `+inf` where unreachable.
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Node sequence from a source to `target`.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut at = target;
        while let Some(p) = self.pred[at] {
            path.push(p);
            at = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Multi-source shortest paths. `cost(i, j, d)` prices the ordered step
/// `i -> j` of length `d`; it must be nonnegative, and `+inf` disables the step.
/// Ties prefer the smaller predecessor id.
pub fn dijkstra(graph: &EpsilonGraph, sources: &[(usize, f64)], cost: impl Fn(usize, usize, f64) -> f64) -> ShortestPaths {
    let n = graph.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(s, v) in sources {
        if v < dist[s] {
            dist[s] = v;
            heap.push(Entry { cost: v, node: s });
        }
    }
    while let Some(Entry { cost: c, node: i }) = heap.pop() {
        if done[i] || c > dist[i] {
            continue;
        }
        done[i] = true;
        for &(j, d) in graph.neighbors(i) {
            if done[j] {
                continue;
            }
            let step = cost(i, j, d);
            debug_assert!(step >= 0.0, "negative step cost");
            let cand = c + step;
            if !cand.is_finite() {
                continue;
            }
            let better = cand < dist[j] || (cand == dist[j] && pred[j].is_some_and(|p| i < p));
            if better {
                dist[j] = cand;
                pred[j] = Some(i);
                heap.push(Entry { cost: cand, node: j });
            }
        }
    }
    ShortestPaths { dist, pred }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_epsilon_graph, PointCloudSpace};

    #[test]
    fn ties_prefer_smaller_ids() {
        // Square 0-1-3, 0-2-3 with equal sides: both routes cost 2.
        let s = PointCloudSpace::from_coords(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![1.0; 4],
        )
        .unwrap();
        let g = build_epsilon_graph(&s, 1.0).unwrap();
        let sp = dijkstra(&g, &[(0, 0.0)], |_, _, d| d);
        assert_eq!(sp.dist[3], 2.0);
        assert_eq!(sp.path_to(3).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn multi_source_and_unreachable() {
        let s = PointCloudSpace::from_coords(vec![vec![0.0], vec![1.0], vec![2.0], vec![9.0]], vec![1.0; 4]).unwrap();
        let g = build_epsilon_graph(&s, 1.0).unwrap();
        let sp = dijkstra(&g, &[(0, 5.0), (2, 0.5)], |_, _, d| d);
        assert_eq!(sp.dist[..3], [2.5, 1.5, 0.5]);
        assert_eq!(sp.path_to(0).unwrap(), vec![2, 1, 0]);
        assert_eq!(sp.dist[3], f64::INFINITY);
        assert!(sp.path_to(3).is_none());
    }
}
