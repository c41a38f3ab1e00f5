//! Sparse simple graphs, directed or undirected, with edge-list I/O.
//!
//! Node ids are dense integers `0..N-1`. Self-loops are rejected on input and
//! duplicate edge records collapse with a counter, so every `Graph` is a
//! simple graph. For undirected graphs `2E` equals the degree sum; for
//! directed graphs the in- and out-degree sums both equal the arc count `E`.

use std::collections::HashSet;

use crate::error::{MesoError, Result};

#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    n: usize,
    edges: Vec<(u32, u32)>,
    edge_set: HashSet<(u32, u32)>,
    out_degree: Vec<usize>,
    in_degree: Vec<usize>,
    duplicates_collapsed: usize,
}

impl Graph {
    /// Builds a simple graph on nodes `0..n` from an edge list.
    ///
    /// Undirected edges are stored canonically as `(min, max)`. Duplicate
    /// records (including `(v, u)` repeats of an undirected `(u, v)`) are
    /// collapsed and counted. Self-loops are rejected; the reported line is
    /// the 1-based position in `edges`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)], directed: bool) -> Result<Graph> {
        let mut edge_set = HashSet::with_capacity(edges.len());
        let mut kept = Vec::with_capacity(edges.len());
        let mut duplicates = 0usize;
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(MesoError::SelfLoop {
                    line: idx + 1,
                    node: u as u64,
                });
            }
            if u as usize >= n || v as usize >= n {
                return Err(MesoError::InvalidInput(format!(
                    "edge {u} -- {v} references a node outside 0..{n}"
                )));
            }
            let key = if directed || u < v { (u, v) } else { (v, u) };
            if edge_set.insert(key) {
                kept.push(key);
            } else {
                duplicates += 1;
            }
        }
        let mut out_degree = vec![0usize; n];
        let mut in_degree = vec![0usize; n];
        for &(u, v) in &kept {
            if directed {
                out_degree[u as usize] += 1;
                in_degree[v as usize] += 1;
            } else {
                out_degree[u as usize] += 1;
                out_degree[v as usize] += 1;
            }
        }
        if !directed {
            in_degree.copy_from_slice(&out_degree);
        }
        Ok(Graph {
            directed,
            n,
            edges: kept,
            edge_set,
            out_degree,
            in_degree,
            duplicates_collapsed: duplicates,
        })
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Number of nodes `N`.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of edges (undirected) or arcs (directed) `E`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Degree of node `i` in an undirected graph.
    pub fn degree(&self, i: usize) -> usize {
        debug_assert!(!self.directed, "degree() is the undirected accessor");
        self.out_degree[i]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_degree[i]
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_degree[i]
    }

    /// Edges in canonical form: `(min, max)` pairs when undirected.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let key = if self.directed || u < v { (u, v) } else { (v, u) };
        self.edge_set.contains(&key)
    }

    /// How many duplicate edge records were collapsed on construction.
    pub fn duplicates_collapsed(&self) -> usize {
        self.duplicates_collapsed
    }

    /// Dense adjacency entry `A_ij` (0 or 1); `A_ij == A_ji` when undirected.
    pub fn adjacency(&self, i: u32, j: u32) -> f64 {
        if i != j && self.has_edge(i, j) {
            1.0
        } else {
            0.0
        }
    }

    /// Serializes to the edge-list file format: one `u v` pair per line,
    /// sorted, LF line endings.
    pub fn to_edge_list_string(&self) -> String {
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        let mut out = String::new();
        for (u, v) in sorted {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parses line-oriented edge-list text: two non-negative integer node ids per
/// line separated by whitespace, `#` comment lines and blank lines ignored.
///
/// `N` is `1 + max node id`. Duplicate undirected records `(u,v)`/`(v,u)`
/// collapse; self-loop lines are rejected.
pub fn load_edge_list(text: &str, directed: bool) -> Result<Graph> {
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    let mut max_id: u64 = 0;
    let mut any = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(MesoError::Parse {
                line: lineno,
                message: format!("expected two node ids, found {} fields", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| MesoError::Parse {
                line: lineno,
                message: format!("invalid node id `{s}`"),
            })
        };
        let u = parse(fields[0])?;
        let v = parse(fields[1])?;
        if u == v {
            return Err(MesoError::SelfLoop {
                line: lineno,
                node: u,
            });
        }
        if u >= u32::MAX as u64 || v >= u32::MAX as u64 {
            return Err(MesoError::Parse {
                line: lineno,
                message: "node id exceeds the supported range".into(),
            });
        }
        max_id = max_id.max(u).max(v);
        any = true;
        pairs.push((u as u32, v as u32));
        lines.push(lineno);
    }
    let n = if any { max_id as usize + 1 } else { 0 };
    // Re-report self-loops with file line numbers; from_edges cannot see them.
    match Graph::from_edges(n, &pairs, directed) {
        Ok(g) => Ok(g),
        Err(MesoError::SelfLoop { line, node }) => Err(MesoError::SelfLoop {
            line: lines[line - 1],
            node,
        }),
        Err(e) => Err(e),
    }
}

/// Relabels sparse node ids to dense `0..N-1`.
///
/// Returns the relabeled pairs together with the id map: entry `i` holds the
/// original id of dense node `i`. Ids are assigned in ascending order of the
/// original ids so the output is independent of edge order.
pub fn compact_ids(pairs: &[(u64, u64)]) -> (Vec<(u32, u32)>, Vec<u64>) {
    let mut ids: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |id: u64| ids.binary_search(&id).expect("id present") as u32;
    let relabeled = pairs.iter().map(|&(u, v)| (index(u), index(v))).collect();
    (relabeled, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_edges() {
        let g = load_edge_list("0 1\n2 3", false).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 2);
        assert!((0..4).all(|i| g.degree(i) == 1));
    }

    #[test]
    fn directed_three_cycle() {
        let g = load_edge_list("0 1\n1 2\n2 0", true).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!((0..3).all(|i| g.in_degree(i) == 1 && g.out_degree(i) == 1));
    }

    #[test]
    fn undirected_duplicate_collapses() {
        let g = load_edge_list("0 1\n1 0", false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.duplicates_collapsed(), 1);
    }

    #[test]
    fn directed_reverse_is_distinct() {
        let g = load_edge_list("0 1\n1 0", true).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.duplicates_collapsed(), 0);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = load_edge_list("0 1\nbogus line here", false).unwrap_err();
        match err {
            MesoError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn self_loop_reports_line() {
        let err = load_edge_list("# comment\n0 1\n\n2 2", false).unwrap_err();
        match err {
            MesoError::SelfLoop { line, node } => {
                assert_eq!(line, 4);
                assert_eq!(node, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let g = load_edge_list("# header\n\n0 1\n# trailing\n", false).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn edge_list_round_trip_is_sorted() {
        let g = load_edge_list("3 2\n1 0", false).unwrap();
        assert_eq!(g.to_edge_list_string(), "0 1\n2 3\n");
        let back = load_edge_list(&g.to_edge_list_string(), false).unwrap();
        assert_eq!(back.to_edge_list_string(), g.to_edge_list_string());
    }

    #[test]
    fn compact_ids_assigns_dense_labels() {
        let (pairs, map) = compact_ids(&[(10, 500), (500, 7)]);
        assert_eq!(map, vec![7, 10, 500]);
        assert_eq!(pairs, vec![(1, 2), (2, 0)]);
    }
}
