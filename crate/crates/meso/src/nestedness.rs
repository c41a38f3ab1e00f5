//! NODF nestedness for bipartite incidence matrices.

use crate::error::{MesoError, Result};
use crate::graph::Graph;

/// Binary incidence matrix of a bipartite graph, rows = left side.
#[derive(Debug, Clone)]
pub struct BiAdjacency {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
    row_marginals: Vec<usize>,
    col_marginals: Vec<usize>,
}

impl BiAdjacency {
    pub fn from_matrix(rows: Vec<Vec<u8>>) -> Result<BiAdjacency> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(MesoError::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            for &v in row {
                if v > 1 {
                    return Err(MesoError::InvalidInput(
                        "incidence entries must be 0 or 1".into(),
                    ));
                }
                data.push(v);
            }
        }
        Ok(BiAdjacency::from_flat(r, c, data))
    }

    fn from_flat(rows: usize, cols: usize, data: Vec<u8>) -> BiAdjacency {
        let row_marginals = (0..rows)
            .map(|i| data[i * cols..(i + 1) * cols].iter().map(|&v| v as usize).sum())
            .collect();
        let col_marginals = (0..cols)
            .map(|j| (0..rows).map(|i| data[i * cols + j] as usize).sum())
            .collect();
        BiAdjacency {
            rows,
            cols,
            data,
            row_marginals,
            col_marginals,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn row_marginals(&self) -> &[usize] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[usize] {
        &self.col_marginals
    }

    pub fn fill(&self) -> usize {
        self.row_marginals.iter().sum()
    }

    pub fn transposed(&self) -> BiAdjacency {
        let mut data = vec![0u8; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        BiAdjacency::from_flat(self.cols, self.rows, data)
    }
}

/// Reads the incidence matrix of an undirected bipartite graph. `left`
/// lists the node ids of one side; every edge must join `left` to its
/// complement.
pub fn from_bipartite(g: &Graph, left: &[u32]) -> Result<BiAdjacency> {
    if g.directed() {
        return Err(MesoError::InvalidInput(
            "bipartite incidence is defined for undirected graphs".into(),
        ));
    }
    let mut is_left = vec![false; g.node_count()];
    for &u in left {
        if u as usize >= g.node_count() {
            return Err(MesoError::InvalidInput(format!(
                "left node {u} is outside the graph"
            )));
        }
        is_left[u as usize] = true;
    }
    let mut row_of = vec![usize::MAX; g.node_count()];
    let mut col_of = vec![usize::MAX; g.node_count()];
    let mut rows = 0usize;
    let mut cols = 0usize;
    for i in 0..g.node_count() {
        if is_left[i] {
            row_of[i] = rows;
            rows += 1;
        } else {
            col_of[i] = cols;
            cols += 1;
        }
    }
    let mut data = vec![0u8; rows * cols];
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        match (is_left[u], is_left[v]) {
            (true, false) => data[row_of[u] * cols + col_of[v]] = 1,
            (false, true) => data[row_of[v] * cols + col_of[u]] = 1,
            _ => {
                return Err(MesoError::NotBipartite {
                    u: u as u32,
                    v: v as u32,
                })
            }
        }
    }
    Ok(BiAdjacency::from_flat(rows, cols, data))
}

/// NODF in [0, 1]: paired overlap with strictly decreasing fill.
///
/// For each pair of rows, the pair contributes the overlap of the sparser
/// row inside the denser one when the marginals strictly decrease, zero
/// when they are equal or the sparser row is empty; likewise for columns.
/// The total is divided by `r(r-1)/2 + c(c-1)/2`.
pub fn nodf(m: &BiAdjacency) -> Result<f64> {
    if m.rows() < 2 && m.cols() < 2 {
        return Err(MesoError::InvalidInput(
            "NODF needs at least two rows or two columns".into(),
        ));
    }
    if m.fill() == 0 {
        return Err(MesoError::UndefinedMetric(
            "NODF of an all-zero matrix".into(),
        ));
    }
    let mut total = 0.0;
    for i in 0..m.rows() {
        for j in i + 1..m.rows() {
            total += paired_overlap(
                m.row_marginals()[i],
                m.row_marginals()[j],
                (0..m.cols()).map(|c| (m.get(i, c), m.get(j, c))),
            );
        }
    }
    for i in 0..m.cols() {
        for j in i + 1..m.cols() {
            total += paired_overlap(
                m.col_marginals()[i],
                m.col_marginals()[j],
                (0..m.rows()).map(|r| (m.get(r, i), m.get(r, j))),
            );
        }
    }
    let pairs = m.rows() * (m.rows() - 1) / 2 + m.cols() * (m.cols() - 1) / 2;
    Ok(total / pairs as f64)
}

fn paired_overlap(fill_a: usize, fill_b: usize, cells: impl Iterator<Item = (u8, u8)>) -> f64 {
    if fill_a == fill_b {
        return 0.0;
    }
    let sparse_fill = fill_a.min(fill_b);
    if sparse_fill == 0 {
        return 0.0;
    }
    let overlap = cells.filter(|&(a, b)| a == 1 && b == 1).count();
    overlap as f64 / sparse_fill as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    #[test]
    fn incidence_from_bipartite_graph() {
        let g = load_edge_list("0 1\n2 3", false).unwrap();
        let m = from_bipartite(&g, &[0, 2]).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.get(0, 0) + m.get(1, 1), 2);
        assert_eq!(m.get(0, 1) + m.get(1, 0), 0);

        let cycle = load_edge_list("0 1\n1 2\n2 3\n3 0", false).unwrap();
        let m = from_bipartite(&cycle, &[0, 2]).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| m.get(i, j) == 1)));
    }

    #[test]
    fn odd_cycle_is_not_bipartite() {
        let g = load_edge_list("0 1\n1 2\n2 0", false).unwrap();
        let err = from_bipartite(&g, &[0]).unwrap_err();
        assert!(matches!(err, MesoError::NotBipartite { .. }));
    }

    #[test]
    fn perfectly_nested_scores_one() {
        let m = BiAdjacency::from_matrix(vec![
            vec![1, 1, 1],
            vec![1, 1, 0],
            vec![1, 0, 0],
        ])
        .unwrap();
        assert_eq!(nodf(&m).unwrap(), 1.0);
    }

    #[test]
    fn equal_marginals_score_zero() {
        let m = BiAdjacency::from_matrix(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(nodf(&m).unwrap(), 0.0);
        let m = BiAdjacency::from_matrix(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(nodf(&m).unwrap(), 0.0);
    }

    #[test]
    fn all_zero_matrix_is_undefined() {
        let m = BiAdjacency::from_matrix(vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert!(matches!(
            nodf(&m).unwrap_err(),
            MesoError::UndefinedMetric(_)
        ));
    }

    #[test]
    fn transpose_invariance() {
        let m = BiAdjacency::from_matrix(vec![
            vec![1, 1, 1, 0],
            vec![1, 0, 1, 0],
            vec![1, 0, 0, 0],
        ])
        .unwrap();
        let direct = nodf(&m).unwrap();
        let transposed = nodf(&m.transposed()).unwrap();
        assert!((direct - transposed).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&direct));
    }
}
