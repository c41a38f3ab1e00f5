//! Random-graph generation: stochastic block model samples, degree-preserving
//! rewiring and the bundled benchmark network.
//!
//! All generation is seeded with ChaCha12 and is deterministic per
//! (input, seed) pair. Ensemble drivers derive per-sample seeds with
//! [`derive_seed`] so samples are independent of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{MesoError, Result};
use crate::graph::Graph;
use crate::matrix::SquareMatrix;
use crate::partition::Partition;

/// SplitMix64-style mixing, used to derive independent per-stream seeds
/// from a master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng_from(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// A stochastic block model: group sizes and a K x K edge-probability
/// matrix, symmetric when undirected.
#[derive(Debug, Clone)]
pub struct SbmSpec {
    sizes: Vec<usize>,
    probabilities: SquareMatrix,
    directed: bool,
}

impl SbmSpec {
    pub fn new(sizes: Vec<usize>, probabilities: SquareMatrix, directed: bool) -> Result<SbmSpec> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(MesoError::InvalidInput(
                "every SBM group must contain at least one node".into(),
            ));
        }
        if probabilities.k() != sizes.len() {
            return Err(MesoError::DimensionMismatch {
                expected: sizes.len(),
                found: probabilities.k(),
            });
        }
        if probabilities
            .values()
            .iter()
            .any(|&p| !(0.0..=1.0).contains(&p))
        {
            return Err(MesoError::InvalidInput(
                "edge probabilities must lie in [0, 1]".into(),
            ));
        }
        if !directed && !probabilities.is_symmetric(0.0) {
            return Err(MesoError::InvalidInput(
                "undirected SBM needs a symmetric probability matrix".into(),
            ));
        }
        Ok(SbmSpec {
            sizes,
            probabilities,
            directed,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probabilities(&self) -> &SquareMatrix {
        &self.probabilities
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// The planted partition: group `g` occupies a consecutive id range.
    pub fn planted_partition(&self) -> Partition {
        let mut labels = Vec::with_capacity(self.node_count());
        for (g, &size) in self.sizes.iter().enumerate() {
            labels.extend(std::iter::repeat_n(g as u32, size));
        }
        Partition::new(labels, self.sizes.len()).expect("labels in range by construction")
    }
}

/// Draws one SBM graph: every within/between node pair is included
/// independently with its block probability. No self-loops. Returns the
/// graph together with the planted partition.
pub fn sbm_generate(spec: &SbmSpec, seed: u64) -> Result<(Graph, Partition)> {
    let partition = spec.planted_partition();
    let k = spec.sizes.len();
    let mut offsets = Vec::with_capacity(k + 1);
    let mut acc = 0usize;
    for &s in &spec.sizes {
        offsets.push(acc);
        acc += s;
    }
    offsets.push(acc);
    let n = acc;
    let mut rng = rng_from(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let push_pair = |rng: &mut ChaCha12Rng, edges: &mut Vec<(u32, u32)>, i: usize, j: usize, p: f64| {
        if p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p) {
            edges.push((i as u32, j as u32));
        }
    };
    if spec.directed {
        for ga in 0..k {
            for gb in 0..k {
                let p = spec.probabilities.get(ga, gb);
                if p == 0.0 {
                    continue;
                }
                for i in offsets[ga]..offsets[ga + 1] {
                    for j in offsets[gb]..offsets[gb + 1] {
                        if i != j {
                            push_pair(&mut rng, &mut edges, i, j, p);
                        }
                    }
                }
            }
        }
    } else {
        for ga in 0..k {
            for gb in ga..k {
                let p = spec.probabilities.get(ga, gb);
                if p == 0.0 {
                    continue;
                }
                if ga == gb {
                    for i in offsets[ga]..offsets[ga + 1] {
                        for j in i + 1..offsets[ga + 1] {
                            push_pair(&mut rng, &mut edges, i, j, p);
                        }
                    }
                } else {
                    for i in offsets[ga]..offsets[ga + 1] {
                        for j in offsets[gb]..offsets[gb + 1] {
                            push_pair(&mut rng, &mut edges, i, j, p);
                        }
                    }
                }
            }
        }
    }
    let graph = Graph::from_edges(n, &edges, spec.directed)?;
    Ok((graph, partition))
}

/// Degree-preserving sample: rewires `g` by double-edge swaps, rejecting any
/// swap that would create a self-loop or duplicate edge, so the output is a
/// simple graph with exactly the input degree sequence (in/out sequences
/// when directed). The budget is `swaps_per_edge * E` attempted swaps.
pub fn configuration_sample(g: &Graph, seed: u64, swaps_per_edge: usize) -> Result<Graph> {
    if g.edge_count() < 2 {
        return Err(MesoError::InvalidInput(
            "degree-preserving rewiring needs at least two edges".into(),
        ));
    }
    if swaps_per_edge == 0 {
        return Err(MesoError::InvalidInput(
            "swaps_per_edge must be at least 1".into(),
        ));
    }
    let mut rng = rng_from(seed);
    let mut edges: Vec<(u32, u32)> = g.edges().to_vec();
    let mut present: std::collections::HashSet<(u32, u32)> = edges.iter().copied().collect();
    let m = edges.len();
    let attempts = swaps_per_edge * m;
    let canon = |u: u32, v: u32| -> (u32, u32) {
        if g.directed() || u < v {
            (u, v)
        } else {
            (v, u)
        }
    };
    for _ in 0..attempts {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        if g.directed() {
            // (a->b, c->d) becomes (a->d, c->b).
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if a == d || c == b {
                continue;
            }
            let e1 = (a, d);
            let e2 = (c, b);
            if e1 == e2 || present.contains(&e1) || present.contains(&e2) {
                continue;
            }
            present.remove(&edges[i]);
            present.remove(&edges[j]);
            present.insert(e1);
            present.insert(e2);
            edges[i] = e1;
            edges[j] = e2;
        } else {
            let (a, b) = edges[i];
            // Random pairing: swap to (a,c)(b,d) or (a,d)(b,c).
            let (c, d) = {
                let (c, d) = edges[j];
                if rng.random::<bool>() {
                    (c, d)
                } else {
                    (d, c)
                }
            };
            if a == c || b == d {
                continue;
            }
            let e1 = canon(a, c);
            let e2 = canon(b, d);
            if e1 == e2 || present.contains(&e1) || present.contains(&e2) {
                continue;
            }
            present.remove(&edges[i]);
            present.remove(&edges[j]);
            present.insert(e1);
            present.insert(e2);
            edges[i] = e1;
            edges[j] = e2;
        }
    }
    Graph::from_edges(g.node_count(), &edges, g.directed())
}

/// The bundled core-periphery benchmark: three equal groups where group 0 is
/// a dense core (p=0.6 internally), group 1 a periphery tied to the core
/// (p=0.5 across, empty inside) and group 2 an independent community
/// (p=0.2). The parameters put the core-periphery pair in the regime where
/// the configuration null explains it away.
pub fn cp_benchmark_spec(group_size: usize) -> SbmSpec {
    let probabilities = SquareMatrix::from_rows(&[
        vec![0.6, 0.5, 0.0],
        vec![0.5, 0.0, 0.0],
        vec![0.0, 0.0, 0.2],
    ])
    .expect("square rows");
    SbmSpec::new(vec![group_size; 3], probabilities, false).expect("valid benchmark spec")
}

/// Draws the benchmark network with the default group size of 30.
pub fn cp_benchmark_network(seed: u64) -> (Graph, Partition) {
    sbm_generate(&cp_benchmark_spec(30), seed).expect("benchmark spec is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_blocks_at_probability_extremes() {
        let spec = SbmSpec::new(
            vec![2, 2],
            SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            false,
        )
        .unwrap();
        let (g, p) = sbm_generate(&spec, 7).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(2, 3));
        assert_eq!(p.sizes(), &[2, 2]);
    }

    #[test]
    fn same_seed_same_graph() {
        let spec = cp_benchmark_spec(10);
        let (a, _) = sbm_generate(&spec, 99).unwrap();
        let (b, _) = sbm_generate(&spec, 99).unwrap();
        assert_eq!(a.to_edge_list_string(), b.to_edge_list_string());
        let (c, _) = sbm_generate(&spec, 100).unwrap();
        assert_ne!(a.to_edge_list_string(), c.to_edge_list_string());
    }

    #[test]
    fn zero_probability_blocks_stay_empty() {
        let (g, p) = cp_benchmark_network(3);
        for &(u, v) in g.edges() {
            let a = p.label_of(u as usize);
            let b = p.label_of(v as usize);
            assert!(
                !(a == 1 && b == 1),
                "periphery must have no internal edges"
            );
            assert!(
                !((a.min(b), a.max(b)) == (0, 2) || (a.min(b), a.max(b)) == (1, 2)),
                "independent community must stay disconnected"
            );
        }
    }

    #[test]
    fn benchmark_core_block_count_is_near_its_mean() {
        // Core block: Binomial(C(30,2), 0.6), S_cc counts twice the draws.
        let pairs: f64 = 30.0 * 29.0 / 2.0;
        let mean = 2.0 * pairs * 0.6;
        let sd = 2.0 * (pairs * 0.6 * 0.4).sqrt();
        for seed in 0..20u64 {
            let (g, p) = cp_benchmark_network(seed);
            let bs = crate::blocks::block_summary(&g, &p).unwrap();
            let observed = bs.s(0, 0) as f64;
            assert!(
                (observed - mean).abs() <= 4.0 * sd,
                "seed {seed}: S_cc = {observed}, mean {mean}, sd {sd}"
            );
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(SbmSpec::new(vec![], SquareMatrix::zeros(0), false).is_err());
        assert!(SbmSpec::new(vec![2, 0], SquareMatrix::zeros(2), false).is_err());
        let asym = SquareMatrix::from_rows(&[vec![0.1, 0.9], vec![0.2, 0.1]]).unwrap();
        assert!(SbmSpec::new(vec![2, 2], asym.clone(), false).is_err());
        assert!(SbmSpec::new(vec![2, 2], asym, true).is_ok());
        let out_of_range = SquareMatrix::constant(1, 1.5);
        assert!(SbmSpec::new(vec![2], out_of_range, false).is_err());
    }

    #[test]
    fn rewiring_preserves_degrees_exactly() {
        let spec = cp_benchmark_spec(10);
        let (g, _) = sbm_generate(&spec, 5).unwrap();
        let sample = configuration_sample(&g, 11, 20).unwrap();
        assert_eq!(sample.edge_count(), g.edge_count());
        for i in 0..g.node_count() {
            assert_eq!(sample.degree(i), g.degree(i));
        }
    }

    #[test]
    fn rewiring_two_disjoint_edges_yields_a_perfect_matching() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)], false).unwrap();
        let matchings = [
            vec![(0, 1), (2, 3)],
            vec![(0, 2), (1, 3)],
            vec![(0, 3), (1, 2)],
        ];
        let mut seen = std::collections::HashSet::new();
        for seed in 0..40 {
            let s = configuration_sample(&g, seed, 20).unwrap();
            let mut edges = s.edges().to_vec();
            edges.sort_unstable();
            assert!(matchings.contains(&edges), "unexpected output {edges:?}");
            seen.insert(edges);
        }
        assert!(seen.len() > 1, "the swap chain should move");
    }

    #[test]
    fn directed_three_cycle_keeps_unit_degrees() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)], true).unwrap();
        let s = configuration_sample(&g, 17, 20).unwrap();
        for i in 0..3 {
            assert_eq!(s.in_degree(i), 1);
            assert_eq!(s.out_degree(i), 1);
        }
        assert_eq!(s.edge_count(), 3);
    }

    #[test]
    fn rewiring_needs_two_edges() {
        let g = Graph::from_edges(2, &[(0, 1)], false).unwrap();
        assert!(configuration_sample(&g, 1, 20).is_err());
    }

    #[test]
    fn derive_seed_spreads_streams() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        let c = derive_seed(43, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, 0));
    }
}
