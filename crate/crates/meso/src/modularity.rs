//! Block modularity: the Q matrix, Q(B) evaluation, Newman modularity and
//! the null-model sum rules.

use crate::blocks::BlockSummary;
use crate::error::{MesoError, Result};
use crate::matrix::SquareMatrix;
use crate::nullmodel::{expected_blocks, NullModel};

/// A K x K pattern with entries in {-1, +1} encoding which blocks should
/// show an excess (+1) or deficit (-1) of edges. Symmetric unless directed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatrix {
    k: usize,
    directed: bool,
    entries: Vec<i8>,
}

impl BlockMatrix {
    pub fn new(k: usize, entries: Vec<i8>, directed: bool) -> Result<BlockMatrix> {
        if entries.len() != k * k {
            return Err(MesoError::DimensionMismatch {
                expected: k * k,
                found: entries.len(),
            });
        }
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(MesoError::InvalidInput(
                "block matrix entries must be +1 or -1".into(),
            ));
        }
        let b = BlockMatrix {
            k,
            directed,
            entries,
        };
        if !directed {
            for a in 0..k {
                for c in a + 1..k {
                    if b.get(a, c) != b.get(c, a) {
                        return Err(MesoError::InvalidInput(
                            "undirected block matrix must be symmetric".into(),
                        ));
                    }
                }
            }
        }
        Ok(b)
    }

    pub fn from_rows(rows: &[Vec<i8>], directed: bool) -> Result<BlockMatrix> {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(MesoError::DimensionMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        BlockMatrix::new(k, entries, directed)
    }

    /// The assortative-community pattern: +1 on the diagonal, -1 elsewhere.
    pub fn community(k: usize, directed: bool) -> BlockMatrix {
        let entries = (0..k * k)
            .map(|i| if i / k == i % k { 1 } else { -1 })
            .collect();
        BlockMatrix {
            k,
            directed,
            entries,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> i8 {
        self.entries[a * self.k + b]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Flips the sign of every entry.
    pub fn negated(&self) -> BlockMatrix {
        BlockMatrix {
            k: self.k,
            directed: self.directed,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// Parses the block-matrix file format: K lines of K entries from
    /// {+1, -1, +, -} separated by whitespace.
    pub fn parse(text: &str, directed: bool) -> Result<BlockMatrix> {
        let mut rows: Vec<Vec<i8>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for token in trimmed.split_whitespace() {
                let value = match token {
                    "+1" | "+" | "1" => 1,
                    "-1" | "-" => -1,
                    other => {
                        return Err(MesoError::Parse {
                            line: idx + 1,
                            message: format!("invalid block entry `{other}`"),
                        })
                    }
                };
                row.push(value);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(MesoError::InvalidInput("empty block matrix".into()));
        }
        BlockMatrix::from_rows(&rows, directed)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for a in 0..self.k {
            let row: Vec<&str> = (0..self.k)
                .map(|b| if self.get(a, b) > 0 { "+1" } else { "-1" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The matrix `Q_ab = S_ab - S^P_ab` of observed-minus-expected block counts.
#[derive(Debug, Clone)]
pub struct QMatrix {
    k: usize,
    directed: bool,
    e: usize,
    values: SquareMatrix,
}

impl QMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn e(&self) -> usize {
        self.e
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values.get(a, b)
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    /// `2E` undirected, `E` directed: the normalization of Q(B).
    pub fn norm(&self) -> f64 {
        if self.directed {
            self.e as f64
        } else {
            2.0 * self.e as f64
        }
    }
}

/// Computes `Q_ab = S_ab - S^P_ab` under the given null model.
pub fn q_matrix(bs: &BlockSummary, null: &NullModel) -> Result<QMatrix> {
    let expected = expected_blocks(null, bs)?;
    let k = bs.k();
    let mut values = SquareMatrix::zeros(k);
    for a in 0..k {
        for b in 0..k {
            values.set(a, b, bs.s(a, b) as f64 - expected.get(a, b));
        }
    }
    Ok(QMatrix {
        k,
        directed: bs.directed(),
        e: bs.e(),
        values,
    })
}

/// Block modularity `Q(B) = (1/2E) sum_ab Q_ab B_ab` (undirected) or
/// `(1/E) sum_ab Q_ab B_ab` (directed).
pub fn block_modularity(q: &QMatrix, b: &BlockMatrix) -> Result<f64> {
    if q.k() != b.k() {
        return Err(MesoError::DimensionMismatch {
            expected: q.k(),
            found: b.k(),
        });
    }
    if q.directed() != b.directed() {
        return Err(MesoError::DirectednessMismatch);
    }
    let mut total = 0.0;
    for a in 0..q.k() {
        for c in 0..q.k() {
            total += q.get(a, c) * b.get(a, c) as f64;
        }
    }
    Ok(total / q.norm())
}

/// Block modularity with a real-valued weight matrix in place of the
/// {-1,+1} pattern. Used by the dc-SBM bridge, where the weights are
/// logarithms of edge rates.
pub fn block_modularity_weighted(q: &QMatrix, weights: &SquareMatrix) -> Result<f64> {
    if q.k() != weights.k() {
        return Err(MesoError::DimensionMismatch {
            expected: q.k(),
            found: weights.k(),
        });
    }
    let mut total = 0.0;
    for a in 0..q.k() {
        for c in 0..q.k() {
            total += q.get(a, c) * weights.get(a, c);
        }
    }
    Ok(total / q.norm())
}

/// Newman modularity `(1/2E) sum_a (S_aa - T_a^2/2E)` under the
/// configuration null. Undirected only.
pub fn newman_modularity(bs: &BlockSummary) -> Result<f64> {
    if bs.directed() {
        return Err(MesoError::UnsupportedNull {
            null: "newman-modularity",
            directed: true,
        });
    }
    if bs.e() == 0 {
        return Err(MesoError::DegenerateGraph);
    }
    let two_e = bs.adjacency_total();
    let total: f64 = (0..bs.k())
        .map(|a| bs.s(a, a) as f64 - (bs.t(a) as f64) * (bs.t(a) as f64) / two_e)
        .sum();
    Ok(total / two_e)
}

/// Observed row/column/global sums of a Q matrix together with the values
/// the null model predicts for them.
///
/// Configuration: all zero. Erdos-Renyi: row `a` sums to `T_a - 2E N_a/N`
/// and the global sum is zero. Scaled configuration: rows sum to
/// `T_a (1 - gamma)` and the global sum to `2E (1 - gamma)`.
#[derive(Debug, Clone)]
pub struct SumRules {
    pub row_sums: Vec<f64>,
    pub col_sums: Vec<f64>,
    pub total: f64,
    pub predicted_row_sums: Vec<f64>,
    pub predicted_col_sums: Vec<f64>,
    pub predicted_total: f64,
}

pub fn sum_rules(q: &QMatrix, null: &NullModel, bs: &BlockSummary) -> Result<SumRules> {
    let k = q.k();
    if k != bs.k() {
        return Err(MesoError::DimensionMismatch {
            expected: bs.k(),
            found: k,
        });
    }
    let row_sums = q.values().row_sums();
    let col_sums = q.values().col_sums();
    let total = q.values().total();
    let (predicted_row_sums, predicted_col_sums, predicted_total) = match null {
        NullModel::Configuration => (vec![0.0; k], vec![0.0; k], 0.0),
        NullModel::ErdosRenyi => {
            let n = bs.node_count() as f64;
            let two_e = bs.adjacency_total();
            let rows: Vec<f64> = (0..k)
                .map(|a| bs.t(a) as f64 - two_e * bs.sizes()[a] as f64 / n)
                .collect();
            (rows.clone(), rows, 0.0)
        }
        NullModel::ScaledConfiguration { gamma } => {
            let rows: Vec<f64> = (0..k).map(|a| bs.t(a) as f64 * (1.0 - gamma)).collect();
            let total = bs.adjacency_total() * (1.0 - gamma);
            (rows.clone(), rows, total)
        }
        NullModel::BlockScaledConfiguration { gamma } => {
            if gamma.k() != k {
                return Err(MesoError::DimensionMismatch {
                    expected: k,
                    found: gamma.k(),
                });
            }
            let norm = bs.adjacency_total();
            let rows: Vec<f64> = (0..k)
                .map(|a| {
                    let scaled: f64 = (0..k)
                        .map(|b| gamma.get(a, b) * bs.t_in(b) as f64)
                        .sum();
                    bs.t_out(a) as f64 - bs.t_out(a) as f64 * scaled / norm
                })
                .collect();
            let cols: Vec<f64> = (0..k)
                .map(|b| {
                    let scaled: f64 = (0..k)
                        .map(|a| gamma.get(a, b) * bs.t_out(a) as f64)
                        .sum();
                    bs.t_in(b) as f64 - bs.t_in(b) as f64 * scaled / norm
                })
                .collect();
            let total = rows.iter().sum();
            (rows, cols, total)
        }
    };
    Ok(SumRules {
        row_sums,
        col_sums,
        total,
        predicted_row_sums,
        predicted_col_sums,
        predicted_total,
    })
}

/// The two K=2 pattern scores that decide whether a core-periphery block
/// pattern can beat the others.
///
/// Under the configuration null the row/column sum rule forces
/// `q_cp == q_bipartite / 2` exactly, so the 2x2 core-periphery pattern is
/// never the unique maximizer.
#[derive(Debug, Clone, Copy)]
pub struct CpExclusion {
    pub q_cp: f64,
    pub q_bipartite: f64,
}

pub fn k2_cp_exclusion(q: &QMatrix) -> Result<CpExclusion> {
    if q.k() != 2 {
        return Err(MesoError::DimensionMismatch {
            expected: 2,
            found: q.k(),
        });
    }
    let cp = BlockMatrix::new(2, vec![1, 1, 1, -1], q.directed())?;
    let bip = BlockMatrix::new(2, vec![-1, 1, 1, -1], q.directed())?;
    Ok(CpExclusion {
        q_cp: block_modularity(q, &cp)?,
        q_bipartite: block_modularity(q, &bip)?,
    })
}
