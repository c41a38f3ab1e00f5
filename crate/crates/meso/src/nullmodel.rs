//! Null models: expected block-level edge counts `S^P_ab`.
//!
//! Everything is computed at block level from a [`BlockSummary`], never by
//! pairwise summation, so one evaluation costs O(K^2).

use crate::blocks::BlockSummary;
use crate::error::{MesoError, Result};
use crate::matrix::SquareMatrix;

/// A null model for the expected number of edges between node pairs.
///
/// * `Configuration` preserves the degree sequence: `S^P_ab = T_a T_b / 2E`
///   (undirected) or `T_a_out T_b_in / E` (directed).
/// * `ErdosRenyi` puts constant probability `p = 2E/N^2` on every ordered
///   pair including self pairs, so `S^P_ab = p N_a N_b`. Undirected only.
/// * `ScaledConfiguration` multiplies the configuration expectation by a
///   positive scalar `gamma`. Undirected only.
/// * `BlockScaledConfiguration` scales each block by its own `gamma_ab`;
///   entries may be negative (they arise from rate matrices below 1).
#[derive(Debug, Clone)]
pub enum NullModel {
    Configuration,
    ErdosRenyi,
    ScaledConfiguration { gamma: f64 },
    BlockScaledConfiguration { gamma: SquareMatrix },
}

impl NullModel {
    pub fn name(&self) -> &'static str {
        match self {
            NullModel::Configuration => "configuration",
            NullModel::ErdosRenyi => "erdos-renyi",
            NullModel::ScaledConfiguration { .. } => "scaled-configuration",
            NullModel::BlockScaledConfiguration { .. } => "block-scaled-configuration",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NullModel::ScaledConfiguration { gamma } if !(gamma.is_finite() && *gamma > 0.0) => {
                Err(MesoError::InvalidInput(format!(
                    "gamma must be a positive finite number, got {gamma}"
                )))
            }
            NullModel::BlockScaledConfiguration { gamma }
                if gamma.values().iter().any(|v| !v.is_finite()) =>
            {
                Err(MesoError::InvalidInput(
                    "block gamma entries must be finite".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn supports_directed(&self) -> bool {
        matches!(
            self,
            NullModel::Configuration | NullModel::BlockScaledConfiguration { .. }
        )
    }
}

/// Expected block counts `S^P_ab` under `null` for the observed summary.
pub fn expected_blocks(null: &NullModel, bs: &BlockSummary) -> Result<SquareMatrix> {
    null.validate()?;
    if bs.e() == 0 {
        return Err(MesoError::DegenerateGraph);
    }
    if bs.directed() && !null.supports_directed() {
        return Err(MesoError::UnsupportedNull {
            null: null.name(),
            directed: true,
        });
    }
    let k = bs.k();
    let total = bs.adjacency_total();
    let mut out = SquareMatrix::zeros(k);
    match null {
        NullModel::Configuration => {
            for a in 0..k {
                for b in 0..k {
                    out.set(a, b, bs.t_out(a) as f64 * bs.t_in(b) as f64 / total);
                }
            }
        }
        NullModel::ErdosRenyi => {
            let n = bs.node_count() as f64;
            let p = total / (n * n);
            for a in 0..k {
                for b in 0..k {
                    out.set(a, b, p * bs.sizes()[a] as f64 * bs.sizes()[b] as f64);
                }
            }
        }
        NullModel::ScaledConfiguration { gamma } => {
            for a in 0..k {
                for b in 0..k {
                    out.set(a, b, gamma * bs.t(a) as f64 * bs.t(b) as f64 / total);
                }
            }
        }
        NullModel::BlockScaledConfiguration { gamma } => {
            if gamma.k() != k {
                return Err(MesoError::DimensionMismatch {
                    expected: k,
                    found: gamma.k(),
                });
            }
            for a in 0..k {
                for b in 0..k {
                    let base = bs.t_out(a) as f64 * bs.t_in(b) as f64 / total;
                    out.set(a, b, gamma.get(a, b) * base);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::block_summary;
    use crate::graph::load_edge_list;
    use crate::partition::Partition;

    fn disjoint_edges() -> BlockSummary {
        let g = load_edge_list("0 1\n2 3", false).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        block_summary(&g, &p).unwrap()
    }

    #[test]
    fn configuration_expectation() {
        let sp = expected_blocks(&NullModel::Configuration, &disjoint_edges()).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(sp.get(a, b), 1.0);
            }
        }
    }

    #[test]
    fn erdos_renyi_expectation() {
        let sp = expected_blocks(&NullModel::ErdosRenyi, &disjoint_edges()).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(sp.get(a, b), 1.0);
            }
        }
        assert_eq!(sp.total(), 4.0);
    }

    #[test]
    fn scaled_expectation_is_linear_in_gamma() {
        let sp = expected_blocks(
            &NullModel::ScaledConfiguration { gamma: 2.0 },
            &disjoint_edges(),
        )
        .unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(sp.get(a, b), 2.0);
            }
        }
    }

    #[test]
    fn configuration_row_sums_equal_degree_totals() {
        let g = load_edge_list("0 1\n1 2\n2 3\n3 0\n0 2\n4 5", false).unwrap();
        let p = Partition::new(vec![0, 1, 1, 2, 2, 0], 3).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        let sp = expected_blocks(&NullModel::Configuration, &bs).unwrap();
        for (a, row) in sp.row_sums().iter().enumerate() {
            assert!((row - bs.t(a) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn scaled_gamma_one_matches_configuration() {
        let bs = disjoint_edges();
        let conf = expected_blocks(&NullModel::Configuration, &bs).unwrap();
        let scaled = expected_blocks(&NullModel::ScaledConfiguration { gamma: 1.0 }, &bs).unwrap();
        assert_eq!(conf, scaled);
        let block = expected_blocks(
            &NullModel::BlockScaledConfiguration {
                gamma: SquareMatrix::constant(2, 1.0),
            },
            &bs,
        )
        .unwrap();
        assert_eq!(conf, block);
    }

    #[test]
    fn constant_block_gamma_matches_scalar_gamma() {
        let g = load_edge_list("0 1\n1 2\n2 3\n3 0\n0 2", false).unwrap();
        let p = Partition::new(vec![0, 1, 1, 0], 2).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        let scaled = expected_blocks(&NullModel::ScaledConfiguration { gamma: 2.5 }, &bs).unwrap();
        let block = expected_blocks(
            &NullModel::BlockScaledConfiguration {
                gamma: SquareMatrix::constant(2, 2.5),
            },
            &bs,
        )
        .unwrap();
        assert_eq!(scaled, block);
    }

    #[test]
    fn directed_support_matrix() {
        let g = load_edge_list("0 1\n1 2\n2 0", true).unwrap();
        let p = Partition::new(vec![0, 1, 1], 2).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        assert!(expected_blocks(&NullModel::Configuration, &bs).is_ok());
        assert!(matches!(
            expected_blocks(&NullModel::ErdosRenyi, &bs),
            Err(MesoError::UnsupportedNull { .. })
        ));
        assert!(matches!(
            expected_blocks(&NullModel::ScaledConfiguration { gamma: 0.5 }, &bs),
            Err(MesoError::UnsupportedNull { .. })
        ));
    }

    #[test]
    fn empty_graph_is_degenerate() {
        let g = load_edge_list("", false).unwrap();
        let p = Partition::trivial(0);
        let bs = block_summary(&g, &p).unwrap();
        assert!(matches!(
            expected_blocks(&NullModel::Configuration, &bs),
            Err(MesoError::DegenerateGraph)
        ));
    }

    #[test]
    fn invalid_gamma_rejected() {
        let bs = disjoint_edges();
        assert!(expected_blocks(&NullModel::ScaledConfiguration { gamma: 0.0 }, &bs).is_err());
        assert!(expected_blocks(&NullModel::ScaledConfiguration { gamma: -1.0 }, &bs).is_err());
    }
}
