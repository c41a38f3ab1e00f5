//! Block aggregation: the K x K edge-count matrix `S_ab`, degree totals and
//! group sizes that every block-level formula is computed from.

use crate::error::{MesoError, Result};
use crate::graph::Graph;
use crate::matrix::SquareMatrix;
use crate::partition::Partition;

/// Sufficient statistics of a (graph, partition) pair.
///
/// `S_ab` counts edges between groups `a` and `b`; diagonal entries count
/// twice the internal edges of a group (undirected) or internal arcs
/// (directed). Undirected totals satisfy `T_a = sum_b S_ab` and
/// `sum_a T_a = 2E`; directed totals split into out/in with
/// `sum_ab S_ab = E`.
#[derive(Debug, Clone)]
pub struct BlockSummary {
    k: usize,
    directed: bool,
    s: Vec<u64>,
    t_out: Vec<u64>,
    t_in: Vec<u64>,
    e: usize,
    sizes: Vec<usize>,
}

impl BlockSummary {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn s(&self, a: usize, b: usize) -> u64 {
        self.s[a * self.k + b]
    }

    /// Undirected degree total of group `a`.
    pub fn t(&self, a: usize) -> u64 {
        debug_assert!(!self.directed);
        self.t_out[a]
    }

    pub fn t_out(&self, a: usize) -> u64 {
        self.t_out[a]
    }

    pub fn t_in(&self, a: usize) -> u64 {
        self.t_in[a]
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Total of the S matrix: `2E` undirected, `E` directed.
    pub fn adjacency_total(&self) -> f64 {
        if self.directed {
            self.e as f64
        } else {
            2.0 * self.e as f64
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn s_matrix(&self) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(self.k);
        for a in 0..self.k {
            for b in 0..self.k {
                m.set(a, b, self.s(a, b) as f64);
            }
        }
        m
    }
}

/// Aggregates a graph and partition into block statistics.
pub fn block_summary(g: &Graph, p: &Partition) -> Result<BlockSummary> {
    if p.node_count() != g.node_count() {
        return Err(MesoError::SizeMismatch {
            labels: p.node_count(),
            nodes: g.node_count(),
        });
    }
    let k = p.k();
    let mut s = vec![0u64; k * k];
    for &(u, v) in g.edges() {
        let a = p.label_of(u as usize);
        let b = p.label_of(v as usize);
        s[a * k + b] += 1;
        if !g.directed() {
            s[b * k + a] += 1;
        }
    }
    let mut t_out = vec![0u64; k];
    let mut t_in = vec![0u64; k];
    for i in 0..g.node_count() {
        let a = p.label_of(i);
        t_out[a] += g.out_degree(i) as u64;
        t_in[a] += g.in_degree(i) as u64;
    }
    // Degree totals must equal the S row/column sums exactly.
    debug_assert!((0..k).all(|a| t_out[a] == (0..k).map(|b| s[a * k + b]).sum::<u64>()));
    debug_assert!((0..k).all(|b| t_in[b] == (0..k).map(|a| s[a * k + b]).sum::<u64>()));
    Ok(BlockSummary {
        k,
        directed: g.directed(),
        s,
        t_out,
        t_in,
        e: g.edge_count(),
        sizes: p.sizes().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    fn two_groups(n: usize, split: usize) -> Partition {
        Partition::new(
            (0..n).map(|i| if i < split { 0 } else { 1 }).collect(),
            2,
        )
        .unwrap()
    }

    #[test]
    fn disjoint_edges_blocks() {
        let g = load_edge_list("0 1\n2 3", false).unwrap();
        let bs = block_summary(&g, &two_groups(4, 2)).unwrap();
        assert_eq!(
            [bs.s(0, 0), bs.s(0, 1), bs.s(1, 0), bs.s(1, 1)],
            [2, 0, 0, 2]
        );
        assert_eq!([bs.t(0), bs.t(1)], [2, 2]);
        assert_eq!(bs.e(), 2);
        assert_eq!(bs.adjacency_total(), 4.0);
    }

    #[test]
    fn four_cycle_blocks() {
        let g = load_edge_list("0 1\n1 2\n2 3\n3 0", false).unwrap();
        let bs = block_summary(&g, &two_groups(4, 2)).unwrap();
        assert_eq!(
            [bs.s(0, 0), bs.s(0, 1), bs.s(1, 0), bs.s(1, 1)],
            [2, 2, 2, 2]
        );
        assert_eq!([bs.t(0), bs.t(1)], [4, 4]);
    }

    #[test]
    fn directed_three_cycle_blocks() {
        let g = load_edge_list("0 1\n1 2\n2 0", true).unwrap();
        let p = Partition::new(vec![0, 1, 1], 2).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        assert_eq!(
            [bs.s(0, 0), bs.s(0, 1), bs.s(1, 0), bs.s(1, 1)],
            [0, 1, 1, 1]
        );
        assert_eq!([bs.t_out(0), bs.t_out(1)], [1, 2]);
        assert_eq!([bs.t_in(0), bs.t_in(1)], [1, 2]);
        assert_eq!(bs.adjacency_total(), 3.0);
    }

    #[test]
    fn partition_must_cover_graph() {
        let g = load_edge_list("0 1\n2 3", false).unwrap();
        let p = Partition::new(vec![0, 1], 2).unwrap();
        assert!(matches!(
            block_summary(&g, &p),
            Err(MesoError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn refine_and_merge_reproduces_blocks() {
        let g = load_edge_list("0 1\n1 2\n2 3\n3 0\n0 2", false).unwrap();
        let coarse = two_groups(4, 2);
        let fine = Partition::new(vec![0, 1, 2, 3], 4).unwrap();
        let bs_coarse = block_summary(&g, &coarse).unwrap();
        let bs_fine = block_summary(&g, &fine).unwrap();
        // Merge singleton blocks back into the coarse groups.
        for a in 0..2 {
            for b in 0..2 {
                let mut total = 0u64;
                for i in 0..4 {
                    for j in 0..4 {
                        if coarse.label_of(i) == a && coarse.label_of(j) == b {
                            total += bs_fine.s(i, j);
                        }
                    }
                }
                assert_eq!(total, bs_coarse.s(a, b));
            }
        }
    }
}
