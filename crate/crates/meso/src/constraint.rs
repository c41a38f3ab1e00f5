//! Closed-form detectability inequalities for block structures, and the
//! generalized resolution limit.
//!
//! Each predicate evaluates the sign of a Q matrix entry from a pair
//! context — the edge counts inside, between and around a group pair —
//! without building the full block matrices. Ties sit exactly on the
//! detectability boundary and are reported as a third outcome rather than
//! folded into true/false.

use crate::blocks::BlockSummary;
use crate::error::{MesoError, Result};
use crate::nullmodel::NullModel;

/// Sign of a Q entry: the detectability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Boundary,
    Negative,
}

impl Sign {
    pub fn of(value: f64) -> Sign {
        if value > 0.0 {
            Sign::Positive
        } else if value < 0.0 {
            Sign::Negative
        } else {
            Sign::Boundary
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }
}

/// Which Q entry a predicate asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QEntry {
    /// `Q_aa`, the diagonal entry of group `a`.
    Diagonal,
    /// `Q_ab`, the entry between the two groups.
    OffDiagonal,
}

/// Group sizes needed by the Erdos-Renyi inequality.
#[derive(Debug, Clone, Copy)]
pub struct PairSizes {
    pub n_a: f64,
    pub n_b: f64,
    pub n: f64,
}

/// Edge counts around a group pair (a, b).
///
/// Undirected: `s_aa`/`s_bb` count twice the internal edges, `s_ab` the
/// edges between a and b, `s_a_star`/`s_b_star` the edges from each group to
/// the rest, and `s_star_star` twice the edges inside the rest, so that
/// `2E = s_aa + s_bb + 2(s_ab + s_a_star + s_b_star) + s_star_star`.
///
/// Directed: `s_ab != s_ba` in general, stars split into out/in components,
/// and the total arc count is the plain sum of all nine fields.
///
/// Counts are `f64` so that expected-count contexts (probabilities times
/// possible pairs) work through the same predicates as integer contexts.
#[derive(Debug, Clone)]
pub struct PairContext {
    pub directed: bool,
    pub s_aa: f64,
    pub s_bb: f64,
    pub s_ab: f64,
    pub s_ba: f64,
    pub s_a_star: f64,
    pub s_b_star: f64,
    pub s_star_a: f64,
    pub s_star_b: f64,
    pub s_star_star: f64,
    /// Group sizes when known (required by the Erdos-Renyi predicate).
    pub sizes: Option<PairSizes>,
    /// Group indices in the originating summary, when known (required by the
    /// block-scaled predicate to look up its gamma entries).
    pub groups: Option<(usize, usize)>,
}

impl PairContext {
    /// Undirected context from the six aggregate counts.
    pub fn undirected(
        s_aa: f64,
        s_bb: f64,
        s_ab: f64,
        s_a_star: f64,
        s_b_star: f64,
        s_star_star: f64,
    ) -> PairContext {
        PairContext {
            directed: false,
            s_aa,
            s_bb,
            s_ab,
            s_ba: s_ab,
            s_a_star,
            s_b_star,
            s_star_a: s_a_star,
            s_star_b: s_b_star,
            s_star_star,
            sizes: None,
            groups: None,
        }
    }

    /// Directed context; stars are (out, in) pairs per group.
    #[allow(clippy::too_many_arguments)]
    pub fn directed(
        s_aa: f64,
        s_bb: f64,
        s_ab: f64,
        s_ba: f64,
        a_stars: (f64, f64),
        b_stars: (f64, f64),
        s_star_star: f64,
    ) -> PairContext {
        PairContext {
            directed: true,
            s_aa,
            s_bb,
            s_ab,
            s_ba,
            s_a_star: a_stars.0,
            s_star_a: a_stars.1,
            s_b_star: b_stars.0,
            s_star_b: b_stars.1,
            s_star_star,
            sizes: None,
            groups: None,
        }
    }

    /// Total of the S matrix reconstructed from the context: `2E`
    /// (undirected) or `E` (directed).
    pub fn adjacency_total(&self) -> f64 {
        if self.directed {
            self.s_aa
                + self.s_bb
                + self.s_ab
                + self.s_ba
                + self.s_a_star
                + self.s_star_a
                + self.s_b_star
                + self.s_star_b
                + self.s_star_star
        } else {
            self.s_aa
                + self.s_bb
                + 2.0 * (self.s_ab + self.s_a_star + self.s_b_star)
                + self.s_star_star
        }
    }

    pub fn t_a(&self) -> f64 {
        self.s_aa + self.s_ab + self.s_a_star
    }

    pub fn t_b(&self) -> f64 {
        self.s_bb + self.s_ba + self.s_b_star
    }

    pub fn t_a_out(&self) -> f64 {
        self.s_aa + self.s_ab + self.s_a_star
    }

    pub fn t_a_in(&self) -> f64 {
        self.s_aa + self.s_ba + self.s_star_a
    }

    pub fn t_b_out(&self) -> f64 {
        self.s_bb + self.s_ba + self.s_b_star
    }

    pub fn t_b_in(&self) -> f64 {
        self.s_bb + self.s_ab + self.s_star_b
    }

    /// No edges leave the pair for the rest of the network.
    pub fn is_disconnected_pair(&self) -> bool {
        self.s_a_star == 0.0
            && self.s_b_star == 0.0
            && self.s_star_a == 0.0
            && self.s_star_b == 0.0
    }
}

/// Aggregates a block summary into the pair context of groups `a` and `b`.
pub fn pair_context(bs: &BlockSummary, a: usize, b: usize) -> Result<PairContext> {
    let k = bs.k();
    if a >= k {
        return Err(MesoError::InvalidGroup { group: a, k });
    }
    if b >= k || a == b {
        return Err(MesoError::InvalidGroup { group: b, k });
    }
    let s_aa = bs.s(a, a) as f64;
    let s_bb = bs.s(b, b) as f64;
    let s_ab = bs.s(a, b) as f64;
    let s_ba = bs.s(b, a) as f64;
    let sizes = PairSizes {
        n_a: bs.sizes()[a] as f64,
        n_b: bs.sizes()[b] as f64,
        n: bs.node_count() as f64,
    };
    let mut ctx = if bs.directed() {
        let a_out = bs.t_out(a) as f64 - s_aa - s_ab;
        let a_in = bs.t_in(a) as f64 - s_aa - s_ba;
        let b_out = bs.t_out(b) as f64 - s_bb - s_ba;
        let b_in = bs.t_in(b) as f64 - s_bb - s_ab;
        let rest = bs.adjacency_total()
            - (s_aa + s_bb + s_ab + s_ba + a_out + a_in + b_out + b_in);
        PairContext::directed(s_aa, s_bb, s_ab, s_ba, (a_out, a_in), (b_out, b_in), rest)
    } else {
        let a_star = bs.t(a) as f64 - s_aa - s_ab;
        let b_star = bs.t(b) as f64 - s_bb - s_ab;
        let rest = bs.adjacency_total() - (s_aa + s_bb + 2.0 * (s_ab + a_star + b_star));
        PairContext::undirected(s_aa, s_bb, s_ab, a_star, b_star, rest)
    };
    ctx.sizes = Some(sizes);
    ctx.groups = Some((a, b));
    Ok(ctx)
}

/// Sign of `Q_aa` or `Q_ab` under the chosen null model, from the context
/// alone.
///
/// Configuration (undirected) evaluates the full-form inequalities
/// `S_aa S_** > (S_ab + S_a*)^2 - S_aa (S_bb + 2 S_b*)` and
/// `S_ab S_** > (S_aa + S_a*)(S_bb + S_b*) - S_ab (S_ab + S_a* + S_b*)`.
/// The directed configuration form compares `S_xy E` against
/// `T_x^out T_y^in`; with a disconnected pair it reduces to
/// `S_aa S_** > S_ab S_ba - S_aa S_bb` and its off-diagonal twin.
/// Erdos-Renyi compares edge fractions against the fraction of possible
/// pairs, and the scaled variants multiply the configuration expectation by
/// gamma before comparing.
pub fn q_sign(ctx: &PairContext, which: QEntry, null: &NullModel) -> Result<Sign> {
    null.validate()?;
    if ctx.directed && !null.supports_directed() {
        return Err(MesoError::UnsupportedNull {
            null: null.name(),
            directed: true,
        });
    }
    let (lhs, rhs) = match null {
        NullModel::Configuration => {
            if ctx.directed {
                let e = ctx.adjacency_total();
                match which {
                    QEntry::Diagonal => (ctx.s_aa * e, ctx.t_a_out() * ctx.t_a_in()),
                    QEntry::OffDiagonal => (ctx.s_ab * e, ctx.t_a_out() * ctx.t_b_in()),
                }
            } else {
                match which {
                    QEntry::Diagonal => (
                        ctx.s_aa * ctx.s_star_star,
                        (ctx.s_ab + ctx.s_a_star).powi(2)
                            - ctx.s_aa * (ctx.s_bb + 2.0 * ctx.s_b_star),
                    ),
                    QEntry::OffDiagonal => (
                        ctx.s_ab * ctx.s_star_star,
                        (ctx.s_aa + ctx.s_a_star) * (ctx.s_bb + ctx.s_b_star)
                            - ctx.s_ab * (ctx.s_ab + ctx.s_a_star + ctx.s_b_star),
                    ),
                }
            }
        }
        NullModel::ErdosRenyi => {
            let sizes = ctx.sizes.ok_or_else(|| {
                MesoError::InvalidInput(
                    "Erdos-Renyi sign test needs group sizes in the context".into(),
                )
            })?;
            let two_e = ctx.adjacency_total();
            let nn = sizes.n * sizes.n;
            match which {
                QEntry::Diagonal => (ctx.s_aa * nn, two_e * sizes.n_a * sizes.n_a),
                QEntry::OffDiagonal => (ctx.s_ab * nn, two_e * sizes.n_a * sizes.n_b),
            }
        }
        NullModel::ScaledConfiguration { gamma } => {
            let two_e = ctx.adjacency_total();
            match which {
                QEntry::Diagonal => (ctx.s_aa * two_e, gamma * ctx.t_a() * ctx.t_a()),
                QEntry::OffDiagonal => (ctx.s_ab * two_e, gamma * ctx.t_a() * ctx.t_b()),
            }
        }
        NullModel::BlockScaledConfiguration { gamma } => {
            let (a, b) = ctx.groups.ok_or_else(|| {
                MesoError::InvalidInput(
                    "block-scaled sign test needs group indices in the context".into(),
                )
            })?;
            if a >= gamma.k() || b >= gamma.k() {
                return Err(MesoError::InvalidGroup {
                    group: a.max(b),
                    k: gamma.k(),
                });
            }
            let total = ctx.adjacency_total();
            if ctx.directed {
                match which {
                    QEntry::Diagonal => (
                        ctx.s_aa * total,
                        gamma.get(a, a) * ctx.t_a_out() * ctx.t_a_in(),
                    ),
                    QEntry::OffDiagonal => (
                        ctx.s_ab * total,
                        gamma.get(a, b) * ctx.t_a_out() * ctx.t_b_in(),
                    ),
                }
            } else {
                match which {
                    QEntry::Diagonal => (ctx.s_aa * total, gamma.get(a, a) * ctx.t_a() * ctx.t_a()),
                    QEntry::OffDiagonal => {
                        (ctx.s_ab * total, gamma.get(a, b) * ctx.t_a() * ctx.t_b())
                    }
                }
            }
        }
    };
    Ok(Sign::of(lhs - rhs))
}

/// Core-periphery detectability of the pair, core = `a`, periphery = `b`.
///
/// In the ideal disconnected case with an empty periphery the condition is
/// `S_cc S_** > S_cp^2` (undirected) or `S_cc S_** > S_cp S_pc` (directed);
/// otherwise the verdict falls back to the full `Q_aa` sign under the
/// configuration null.
pub fn cp_detectable(ctx: &PairContext) -> Result<Sign> {
    let ideal = ctx.is_disconnected_pair() && ctx.s_bb == 0.0;
    if ideal {
        let cross = if ctx.directed {
            ctx.s_ab * ctx.s_ba
        } else {
            ctx.s_ab * ctx.s_ab
        };
        return Ok(Sign::of(ctx.s_aa * ctx.s_star_star - cross));
    }
    q_sign(ctx, QEntry::Diagonal, &NullModel::Configuration)
}

/// Community-hierarchy detectability for a directed pair with flow a -> b.
///
/// In the ideal case (`S_ba = 0`, pair disconnected from the rest) the
/// condition is `S_ab S_** > S_aa S_bb`; otherwise falls back to the full
/// `Q_ab` sign.
pub fn ch_detectable(ctx: &PairContext) -> Result<Sign> {
    if !ctx.directed {
        return Err(MesoError::InvalidInput(
            "community-hierarchy detection needs a directed context".into(),
        ));
    }
    if ctx.s_ba == 0.0 && ctx.is_disconnected_pair() {
        return Ok(Sign::of(ctx.s_ab * ctx.s_star_star - ctx.s_aa * ctx.s_bb));
    }
    q_sign(ctx, QEntry::OffDiagonal, &NullModel::Configuration)
}

/// Core-core detectability in a nested bipartite split (groups core-a,
/// periphery-a, core-b, periphery-b with no edges among the peripheries):
/// `S_cacb (S_cacb + S_capb + S_cbpa) > S_capb S_cbpa`.
pub fn nested_core_detectable(s_core_core: f64, s_ca_pb: f64, s_cb_pa: f64) -> Sign {
    Sign::of(s_core_core * (s_core_core + s_ca_pb + s_cb_pa) - s_ca_pb * s_cb_pa)
}

/// Whether merging the two groups increases modularity under the
/// configuration null: `S_ab > T_a T_b / 2E` with `2E` reconstructed from
/// the context. `Positive` means merging is preferred; with `S_ab = 0` and
/// any internal edges the answer is never positive, so sparse pairs stay
/// separate only when they are large relative to `sqrt(E)`.
pub fn resolution_merge_preferred(ctx: &PairContext) -> Result<Sign> {
    if ctx.directed {
        return Err(MesoError::InvalidInput(
            "the resolution criterion is defined for undirected contexts".into(),
        ));
    }
    let two_e = ctx.adjacency_total();
    Ok(Sign::of(ctx.s_ab * two_e - ctx.t_a() * ctx.t_b()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::block_summary;
    use crate::graph::load_edge_list;
    use crate::partition::Partition;

    #[test]
    fn pair_context_covers_whole_graph() {
        let g = load_edge_list("0 1\n2 3", false).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        let ctx = pair_context(&bs, 0, 1).unwrap();
        assert_eq!(
            [ctx.s_aa, ctx.s_bb, ctx.s_ab, ctx.s_a_star, ctx.s_b_star, ctx.s_star_star],
            [2.0, 2.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(ctx.adjacency_total(), 4.0);
    }

    #[test]
    fn pair_context_counts_the_rest() {
        let g = load_edge_list("0 1\n2 3\n4 5", false).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        let ctx = pair_context(&bs, 0, 1).unwrap();
        assert_eq!(ctx.s_star_star, 2.0);
        assert_eq!([ctx.s_aa, ctx.s_bb, ctx.s_ab], [2.0, 2.0, 0.0]);
        assert_eq!([ctx.s_a_star, ctx.s_b_star], [0.0, 0.0]);
    }

    #[test]
    fn pair_context_directed_three_cycle() {
        let g = load_edge_list("0 1\n1 2\n2 0", true).unwrap();
        let p = Partition::new(vec![0, 1, 1], 2).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        let ctx = pair_context(&bs, 0, 1).unwrap();
        assert_eq!([ctx.s_ab, ctx.s_ba, ctx.s_bb], [1.0, 1.0, 1.0]);
        assert_eq!(ctx.s_aa, 0.0);
        assert_eq!(
            [ctx.s_a_star, ctx.s_star_a, ctx.s_b_star, ctx.s_star_b, ctx.s_star_star],
            [0.0; 5]
        );
    }

    #[test]
    fn invalid_groups_rejected() {
        let g = load_edge_list("0 1\n2 3", false).unwrap();
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        assert!(pair_context(&bs, 0, 2).is_err());
        assert!(pair_context(&bs, 1, 1).is_err());
    }

    #[test]
    fn q_sign_diagonal_examples() {
        // S_cc * S_** = 8 beats (S_cp)^2 = 4.
        let ctx = PairContext::undirected(2.0, 0.0, 2.0, 0.0, 0.0, 4.0);
        assert_eq!(
            q_sign(&ctx, QEntry::Diagonal, &NullModel::Configuration).unwrap(),
            Sign::Positive
        );
        // Shrinking the rest to S_** = 2 puts the pair exactly on the
        // boundary: the direct Q_cc is zero there.
        let ctx = PairContext::undirected(2.0, 0.0, 2.0, 0.0, 0.0, 2.0);
        assert_eq!(
            q_sign(&ctx, QEntry::Diagonal, &NullModel::Configuration).unwrap(),
            Sign::Boundary
        );
        // Verify against the direct computation: T_c = 4, 2E = 8.
        assert_eq!(2.0 - 4.0 * 4.0 / 8.0, 0.0);
    }

    #[test]
    fn q_sign_off_diagonal_example() {
        let ctx = PairContext::undirected(4.0, 4.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(
            q_sign(&ctx, QEntry::OffDiagonal, &NullModel::Configuration).unwrap(),
            Sign::Negative
        );
    }

    #[test]
    fn cp_detectable_expected_count_examples() {
        let detectable = PairContext::undirected(0.5, 0.0, 0.4, 0.0, 0.0, 0.8);
        assert_eq!(cp_detectable(&detectable).unwrap(), Sign::Positive);
        let hidden = PairContext::undirected(0.5, 0.0, 0.4, 0.0, 0.0, 0.2);
        assert_eq!(cp_detectable(&hidden).unwrap(), Sign::Negative);
        let no_cross = PairContext::undirected(3.0, 0.0, 0.0, 0.0, 0.0, 2.0);
        assert_eq!(cp_detectable(&no_cross).unwrap(), Sign::Positive);
    }

    #[test]
    fn ch_detectable_examples() {
        let ctx = PairContext::directed(3.0, 3.0, 4.0, 0.0, (0.0, 0.0), (0.0, 0.0), 10.0);
        assert_eq!(ch_detectable(&ctx).unwrap(), Sign::Positive);
        let ctx = PairContext::directed(2.0, 2.0, 1.0, 0.0, (0.0, 0.0), (0.0, 0.0), 0.0);
        assert_eq!(ch_detectable(&ctx).unwrap(), Sign::Negative);
        let ctx = PairContext::directed(0.0, 5.0, 2.0, 0.0, (0.0, 0.0), (0.0, 0.0), 2.0);
        assert_eq!(ch_detectable(&ctx).unwrap(), Sign::Positive);
    }

    #[test]
    fn ch_detectable_matches_direct_sign_on_constructed_graph() {
        // Two directed 3-cycles, four arcs from the first to the second,
        // and a 10-arc digraph standing in for the rest of the network.
        let text = "0 1\n1 2\n2 0\n\
                    3 4\n4 5\n5 3\n\
                    0 3\n0 4\n1 3\n2 5\n\
                    6 7\n7 8\n8 9\n9 10\n10 6\n\
                    7 6\n8 7\n9 8\n10 9\n6 10";
        let g = load_edge_list(text, true).unwrap();
        let labels: Vec<u32> = (0..11)
            .map(|i| if i < 3 { 0 } else if i < 6 { 1 } else { 2 })
            .collect();
        let p = Partition::new(labels, 3).unwrap();
        let bs = block_summary(&g, &p).unwrap();
        let ctx = pair_context(&bs, 0, 1).unwrap();
        assert_eq!([ctx.s_aa, ctx.s_bb, ctx.s_ab, ctx.s_ba], [3.0, 3.0, 4.0, 0.0]);
        assert_eq!(ctx.s_star_star, 10.0);
        assert_eq!(ch_detectable(&ctx).unwrap(), Sign::Positive);
        // Direct Q_ab under the directed configuration null.
        let q_ab = bs.s(0, 1) as f64
            - bs.t_out(0) as f64 * bs.t_in(1) as f64 / bs.adjacency_total();
        assert_eq!(Sign::of(q_ab), Sign::Positive);
    }

    #[test]
    fn nested_core_examples() {
        assert_eq!(nested_core_detectable(10.0, 5.0, 5.0), Sign::Positive);
        assert_eq!(nested_core_detectable(0.0, 3.0, 3.0), Sign::Negative);
        assert_eq!(nested_core_detectable(1.0, 0.0, 7.0), Sign::Positive);
    }

    #[test]
    fn resolution_instance_flips_with_community_size() {
        // One inter-community edge, one edge from each community to the
        // rest, E = 100 edges in total. Small communities are merged;
        // the flip to "keep separate" happens between l = 6 and l = 7,
        // where (2l + 2)^2 crosses 2E.
        let instance = |l: f64| {
            PairContext::undirected(2.0 * l, 2.0 * l, 1.0, 1.0, 1.0, 194.0 - 4.0 * l)
        };
        for l in 1..=6 {
            assert_eq!(
                resolution_merge_preferred(&instance(l as f64)).unwrap(),
                Sign::Positive,
                "l={l}"
            );
        }
        for l in 7..=20 {
            assert_eq!(
                resolution_merge_preferred(&instance(l as f64)).unwrap(),
                Sign::Negative,
                "l={l}"
            );
        }
        // Direct check of the two endpoints against Q_ab = S_ab - T_a T_b / 2E.
        let direct = |l: f64| 1.0 - (2.0 * l + 2.0).powi(2) / 200.0;
        assert_eq!(Sign::of(direct(5.0)), Sign::Positive);
        assert_eq!(Sign::of(direct(20.0)), Sign::Negative);
    }

    #[test]
    fn no_cross_edges_never_merge() {
        let ctx = PairContext::undirected(4.0, 2.0, 0.0, 1.0, 1.0, 50.0);
        assert_eq!(resolution_merge_preferred(&ctx).unwrap(), Sign::Negative);
    }

    #[test]
    fn scaled_sign_reduces_to_configuration_at_gamma_one() {
        let ctx = PairContext::undirected(6.0, 4.0, 3.0, 2.0, 1.0, 30.0);
        for which in [QEntry::Diagonal, QEntry::OffDiagonal] {
            let conf = q_sign(&ctx, which, &NullModel::Configuration).unwrap();
            let scaled = q_sign(
                &ctx,
                which,
                &NullModel::ScaledConfiguration { gamma: 1.0 },
            )
            .unwrap();
            assert_eq!(conf, scaled);
        }
    }

    #[test]
    fn erdos_renyi_sign_needs_sizes() {
        let ctx = PairContext::undirected(2.0, 2.0, 1.0, 0.0, 0.0, 0.0);
        assert!(q_sign(&ctx, QEntry::OffDiagonal, &NullModel::ErdosRenyi).is_err());
    }
}
