//! Degree-corrected SBM likelihood, its bridge to block modularity, a greedy
//! label-swap optimizer and the degree-preserving ensemble census.
//!
//! Undirected graphs only: the likelihood is the block form
//! `(1/2) sum_ab (S_ab ln w_ab - T_a T_b w_ab / 2E)`. Its maximum-likelihood
//! rates are `w_ab = 2E S_ab / (T_a T_b)`, and with `B_ab = ln w_ab`,
//! `gamma_ab = w_ab / ln w_ab` block modularity under the block-scaled
//! configuration null equals the log-likelihood divided by E.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::blocks::{block_summary, BlockSummary};
use crate::error::{MesoError, Result};
use crate::generate::{configuration_sample, derive_seed, rng_from};
use crate::graph::Graph;
use crate::matrix::SquareMatrix;
use crate::partition::Partition;

/// Non-negative K x K edge rates relative to the configuration model.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaMatrix {
    values: SquareMatrix,
}

impl OmegaMatrix {
    pub fn new(values: SquareMatrix) -> Result<OmegaMatrix> {
        if values
            .values()
            .iter()
            .any(|&v| !v.is_finite() || v < 0.0)
        {
            return Err(MesoError::InvalidInput(
                "omega entries must be finite and non-negative".into(),
            ));
        }
        Ok(OmegaMatrix { values })
    }

    /// Planted-partition rates: `w_in` on the diagonal, `w_out` elsewhere.
    pub fn planted(k: usize, w_in: f64, w_out: f64) -> Result<OmegaMatrix> {
        let mut m = SquareMatrix::constant(k, w_out);
        for a in 0..k {
            m.set(a, a, w_in);
        }
        OmegaMatrix::new(m)
    }

    pub fn k(&self) -> usize {
        self.values.k()
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values.get(a, b)
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }
}

fn require_undirected(bs: &BlockSummary, what: &'static str) -> Result<()> {
    if bs.directed() {
        return Err(MesoError::UnsupportedNull {
            null: what,
            directed: true,
        });
    }
    Ok(())
}

/// Block-form dc-SBM log-likelihood (additive constants dropped).
///
/// Blocks with `S_ab = 0` and `w_ab = 0` contribute only the (vanishing)
/// expectation term; a block with observed edges but `w_ab = 0` makes the
/// model impossible and the result is negative infinity.
pub fn dcsbm_log_likelihood(bs: &BlockSummary, w: &OmegaMatrix) -> Result<f64> {
    require_undirected(bs, "dc-SBM likelihood")?;
    if w.k() != bs.k() {
        return Err(MesoError::DimensionMismatch {
            expected: bs.k(),
            found: w.k(),
        });
    }
    if bs.e() == 0 {
        return Err(MesoError::DegenerateGraph);
    }
    let two_e = bs.adjacency_total();
    let mut total = 0.0;
    for a in 0..bs.k() {
        for b in 0..bs.k() {
            let s = bs.s(a, b) as f64;
            let rate = w.get(a, b);
            if rate == 0.0 {
                if s > 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                continue;
            }
            total += s * rate.ln() - bs.t(a) as f64 * bs.t(b) as f64 * rate / two_e;
        }
    }
    Ok(total / 2.0)
}

/// Maximum-likelihood rates `w_ab = 2E S_ab / (T_a T_b)`. Groups with no
/// degree mass get zero rates (their blocks carry no edges).
pub fn estimate_omega(bs: &BlockSummary) -> Result<OmegaMatrix> {
    require_undirected(bs, "omega estimation")?;
    if bs.e() == 0 {
        return Err(MesoError::DegenerateGraph);
    }
    let two_e = bs.adjacency_total();
    let mut m = SquareMatrix::zeros(bs.k());
    for a in 0..bs.k() {
        for b in 0..bs.k() {
            let tt = bs.t(a) as f64 * bs.t(b) as f64;
            if tt > 0.0 {
                m.set(a, b, two_e * bs.s(a, b) as f64 / tt);
            }
        }
    }
    OmegaMatrix::new(m)
}

/// Groups whose degree total vanishes; their estimated rates are zero.
pub fn degenerate_groups(bs: &BlockSummary) -> Vec<usize> {
    (0..bs.k()).filter(|&a| bs.t_out(a) == 0).collect()
}

/// The weight/null pair that makes block modularity equal to the dc-SBM
/// log-likelihood over E: `B_ab = ln w_ab`, `gamma_ab = w_ab / ln w_ab`.
///
/// Rates of exactly 1 sit on a removable singularity: `B_ab` is 0 there and
/// `gamma_ab` is returned as infinity; the product `B_ab gamma_ab = w_ab`
/// stays finite, so scoring paths evaluate the combined term instead of the
/// factors. Zero rates have no finite bridge at all and are rejected.
pub fn modularity_bridge(w: &OmegaMatrix) -> Result<(SquareMatrix, SquareMatrix)> {
    let k = w.k();
    let mut weights = SquareMatrix::zeros(k);
    let mut gamma = SquareMatrix::zeros(k);
    for a in 0..k {
        for b in 0..k {
            let rate = w.get(a, b);
            if rate == 0.0 {
                return Err(MesoError::InvalidInput(format!(
                    "omega[{a}][{b}] = 0 has no modularity bridge; use the likelihood directly"
                )));
            }
            let log_rate = rate.ln();
            weights.set(a, b, log_rate);
            gamma.set(
                a,
                b,
                if log_rate == 0.0 {
                    f64::INFINITY
                } else {
                    rate / log_rate
                },
            );
        }
    }
    Ok((weights, gamma))
}

/// The planted-partition scaling `gamma = (w_in - w_out) / (ln w_in - ln w_out)`
/// that identifies Newman-style modularity with the planted dc-SBM.
pub fn planted_partition_gamma(w_in: f64, w_out: f64) -> Result<f64> {
    if !(w_in > 0.0 && w_out > 0.0) {
        return Err(MesoError::InvalidInput(
            "planted rates must be positive".into(),
        ));
    }
    if w_in == w_out {
        return Err(MesoError::InvalidInput(
            "equal planted rates make the bridge degenerate".into(),
        ));
    }
    Ok((w_in - w_out) / (w_in.ln() - w_out.ln()))
}

/// How the optimizer treats the rates while sweeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateScheme {
    /// Re-estimate rates for every candidate move (profile likelihood).
    PerMove,
    /// Experimental: alternate between label sweeps at fixed rates and rate
    /// re-estimation. Sensitive to its starting rates.
    Alternating,
}

#[derive(Debug, Clone)]
pub struct GreedyOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub scheme: UpdateScheme,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            restarts: 20,
            max_sweeps: 100,
            scheme: UpdateScheme::PerMove,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InferenceResult {
    pub partition: Partition,
    pub omega: OmegaMatrix,
    pub score: f64,
    pub sweeps: usize,
    pub restart: usize,
}

/// Mutable block statistics during a sweep.
struct SweepState {
    k: usize,
    s: Vec<f64>,
    t: Vec<f64>,
    two_e: f64,
}

impl SweepState {
    fn from_counts(k: usize, labels: &[u32], adj: &[Vec<u32>], two_e: f64) -> SweepState {
        let mut s = vec![0.0; k * k];
        let mut t = vec![0.0; k];
        for (i, nbrs) in adj.iter().enumerate() {
            let a = labels[i] as usize;
            t[a] += nbrs.len() as f64;
            for &j in nbrs {
                let b = labels[j as usize] as usize;
                s[a * k + b] += 1.0;
            }
        }
        SweepState { k, s, t, two_e }
    }

    #[inline]
    fn term(&self, a: usize, b: usize) -> f64 {
        let s = self.s[a * self.k + b];
        if s == 0.0 {
            0.0
        } else {
            s * (self.two_e * s / (self.t[a] * self.t[b])).ln()
        }
    }

    /// Profile log-likelihood: `(1/2) sum_ab S_ab ln(2E S_ab / T_a T_b) - E`.
    fn profile_score(&self) -> f64 {
        let mut total = 0.0;
        for a in 0..self.k {
            for b in 0..self.k {
                total += self.term(a, b);
            }
        }
        total / 2.0 - self.two_e / 2.0
    }

    fn term_fixed(&self, a: usize, b: usize, w: &SquareMatrix) -> f64 {
        let rate = w.get(a, b);
        let s = self.s[a * self.k + b];
        let log_part = if s == 0.0 || rate == 0.0 {
            if s > 0.0 && rate == 0.0 {
                return f64::NEG_INFINITY;
            }
            0.0
        } else {
            s * rate.ln()
        };
        log_part - self.t[a] * self.t[b] * rate / self.two_e
    }

    fn fixed_score(&self, w: &SquareMatrix) -> f64 {
        let mut total = 0.0;
        for a in 0..self.k {
            for b in 0..self.k {
                total += self.term_fixed(a, b, w);
            }
        }
        total / 2.0
    }

    /// Sum of the terms whose value can change when a node moves between
    /// groups `u` and `v` (their rows and columns).
    fn affected_sum(&self, u: usize, v: usize, w: Option<&SquareMatrix>) -> f64 {
        let mut total = 0.0;
        for b in 0..self.k {
            total += self.cell(u, b, w);
            total += self.cell(v, b, w);
        }
        for a in 0..self.k {
            if a != u && a != v {
                total += self.cell(a, u, w);
                total += self.cell(a, v, w);
            }
        }
        total
    }

    #[inline]
    fn cell(&self, a: usize, b: usize, w: Option<&SquareMatrix>) -> f64 {
        match w {
            None => self.term(a, b),
            Some(w) => self.term_fixed(a, b, w),
        }
    }

    /// Moves a node with degree `degree` and per-group neighbor counts
    /// `cnt` from group `u` to `v`, updating S and T.
    fn apply_move(&mut self, u: usize, v: usize, cnt: &[f64], degree: f64) {
        let k = self.k;
        for (g, &c) in cnt.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if g == u {
                self.s[u * k + u] -= 2.0 * c;
                self.s[v * k + u] += c;
                self.s[u * k + v] += c;
            } else if g == v {
                self.s[u * k + v] -= c;
                self.s[v * k + u] -= c;
                self.s[v * k + v] += 2.0 * c;
            } else {
                self.s[u * k + g] -= c;
                self.s[g * k + u] -= c;
                self.s[v * k + g] += c;
                self.s[g * k + v] += c;
            }
        }
        self.t[u] -= degree;
        self.t[v] += degree;
    }

    fn move_delta(&mut self, u: usize, v: usize, cnt: &[f64], degree: f64, w: Option<&SquareMatrix>) -> f64 {
        let before = self.affected_sum(u, v, w);
        self.apply_move(u, v, cnt, degree);
        let after = self.affected_sum(u, v, w);
        // Revert: the reverse move has the same neighbor counts.
        self.apply_move(v, u, cnt, degree);
        (after - before) / 2.0
    }
}

fn adjacency_lists(g: &Graph) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for &(u, v) in g.edges() {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    adj
}

/// One restart of the greedy label-swap heuristic. Returns (labels, score,
/// sweeps used).
fn greedy_restart(
    adj: &[Vec<u32>],
    k: usize,
    max_sweeps: usize,
    scheme: UpdateScheme,
    seed: u64,
    two_e: f64,
) -> (Vec<u32>, f64, usize) {
    let n = adj.len();
    let mut rng = rng_from(seed);
    let mut labels: Vec<u32> = (0..n).map(|_| rng.random_range(0..k as u32)).collect();
    // Starting rates near the configuration model: 1 + 0.1 * unif(-1, 1),
    // mirrored to keep omega symmetric. Only the alternating scheme keeps
    // using them; per-move re-estimation supersedes them immediately.
    let mut omega = SquareMatrix::zeros(k);
    for a in 0..k {
        for b in a..k {
            let w = 1.0 + 0.1 * (2.0 * rng.random::<f64>() - 1.0);
            omega.set(a, b, w);
            omega.set(b, a, w);
        }
    }
    let mut state = SweepState::from_counts(k, &labels, adj, two_e);
    let mut order: Vec<usize> = (0..n).collect();
    let mut cnt = vec![0.0; k];
    let mut sweeps = 0usize;

    match scheme {
        UpdateScheme::PerMove => {
            while sweeps < max_sweeps {
                order.shuffle(&mut rng);
                let mut improved = false;
                for &node in &order {
                    if sweep_node(&mut state, adj, &mut labels, &mut cnt, node, None) {
                        improved = true;
                    }
                }
                sweeps += 1;
                if !improved {
                    break;
                }
            }
            let score = state.profile_score();
            (labels, score, sweeps)
        }
        UpdateScheme::Alternating => {
            let mut current = state.fixed_score(&omega);
            while sweeps < max_sweeps {
                order.shuffle(&mut rng);
                let mut improved = false;
                for &node in &order {
                    if sweep_node(&mut state, adj, &mut labels, &mut cnt, node, Some(&omega)) {
                        improved = true;
                    }
                }
                sweeps += 1;
                // Re-estimate the rates from the current blocks.
                for a in 0..k {
                    for b in 0..k {
                        let tt = state.t[a] * state.t[b];
                        let w = if tt > 0.0 {
                            two_e * state.s[a * k + b] / tt
                        } else {
                            0.0
                        };
                        omega.set(a, b, w);
                    }
                }
                let rescored = state.fixed_score(&omega);
                if !improved && rescored <= current {
                    break;
                }
                current = rescored;
            }
            (labels, state.profile_score(), sweeps)
        }
    }
}

/// Tries every relabeling of one node, applying the best strictly improving
/// move. Ties keep the current label, then prefer the lowest group index.
fn sweep_node(
    state: &mut SweepState,
    adj: &[Vec<u32>],
    labels: &mut [u32],
    cnt: &mut [f64],
    node: usize,
    fixed_omega: Option<&SquareMatrix>,
) -> bool {
    let u = labels[node] as usize;
    cnt.fill(0.0);
    for &j in &adj[node] {
        cnt[labels[j as usize] as usize] += 1.0;
    }
    let degree = adj[node].len() as f64;
    let mut best: Option<(usize, f64)> = None;
    for v in 0..state.k {
        if v == u {
            continue;
        }
        let delta = state.move_delta(u, v, cnt, degree, fixed_omega);
        if delta > 0.0 && best.is_none_or(|(_, d)| delta > d) {
            best = Some((v, delta));
        }
    }
    if let Some((v, _)) = best {
        state.apply_move(u, v, cnt, degree);
        labels[node] = v as u32;
        true
    } else {
        false
    }
}

/// Greedy joint optimization of partition and rates by label swapping, best
/// of `opts.restarts` random restarts. Restart seeds derive from `seed`, so
/// the result is deterministic regardless of parallel scheduling.
pub fn greedy_optimize(
    g: &Graph,
    k: usize,
    opts: &GreedyOptions,
    seed: u64,
) -> Result<InferenceResult> {
    if g.directed() {
        return Err(MesoError::UnsupportedNull {
            null: "greedy dc-SBM optimization",
            directed: true,
        });
    }
    if k == 0 || k > g.node_count() {
        return Err(MesoError::InvalidInput(format!(
            "K={k} is not in 1..=N={}",
            g.node_count()
        )));
    }
    if g.edge_count() == 0 {
        return Err(MesoError::DegenerateGraph);
    }
    if opts.restarts == 0 {
        return Err(MesoError::InvalidInput("restarts must be >= 1".into()));
    }
    let adj = adjacency_lists(g);
    let two_e = 2.0 * g.edge_count() as f64;
    let runs: Vec<(usize, Vec<u32>, f64, usize)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let (labels, score, sweeps) = greedy_restart(
                &adj,
                k,
                opts.max_sweeps,
                opts.scheme,
                derive_seed(seed, r as u64),
                two_e,
            );
            (r, labels, score, sweeps)
        })
        .collect();
    let (restart, labels, score, sweeps) = runs
        .into_iter()
        .max_by(|a, b| {
            a.2.partial_cmp(&b.2)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.0.cmp(&a.0))
        })
        .expect("at least one restart");
    let partition = Partition::new(labels, k)?;
    let bs = block_summary(g, &partition)?;
    let omega = estimate_omega(&bs)?;
    Ok(InferenceResult {
        partition,
        omega,
        score,
        sweeps,
        restart,
    })
}

/// Structure classes assigned by the rate-ratio rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureLabel {
    Community,
    Bipartite,
    CorePeriphery,
}

impl StructureLabel {
    pub fn name(self) -> &'static str {
        match self {
            StructureLabel::Community => "community",
            StructureLabel::Bipartite => "bipartite",
            StructureLabel::CorePeriphery => "core-periphery",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairStructure {
    pub a: usize,
    pub b: usize,
    pub labels: Vec<StructureLabel>,
}

/// Labels each unordered group pair whose 2x2 block holds more than half of
/// the network's edges (`S_aa + 2 S_ab + S_bb > E`):
///
/// * community when `w_ab < f min(w_aa, w_bb)`,
/// * bipartite when `f w_ab > max(w_aa, w_bb)`,
/// * core-periphery when `min(w_aa, w_bb) < f w_ab` and
///   `min(w_aa, w_bb) < f max(w_aa, w_bb)`.
///
/// `f <= 1`; smaller values make the conditions more stringent. A pair may
/// satisfy several conditions or none.
pub fn classify_structures(
    bs: &BlockSummary,
    w: &OmegaMatrix,
    f: f64,
) -> Result<Vec<PairStructure>> {
    require_undirected(bs, "structure classification")?;
    if bs.k() < 2 {
        return Err(MesoError::InvalidInput(
            "classification needs at least two groups".into(),
        ));
    }
    if w.k() != bs.k() {
        return Err(MesoError::DimensionMismatch {
            expected: bs.k(),
            found: w.k(),
        });
    }
    if !(f > 0.0 && f <= 1.0) {
        return Err(MesoError::InvalidInput(format!(
            "f must lie in (0, 1], got {f}"
        )));
    }
    let e = bs.e() as f64;
    let mut out = Vec::new();
    for a in 0..bs.k() {
        for b in a + 1..bs.k() {
            let mass = bs.s(a, a) as f64 + 2.0 * bs.s(a, b) as f64 + bs.s(b, b) as f64;
            if mass <= e {
                continue;
            }
            let wa = w.get(a, a);
            let wb = w.get(b, b);
            let wab = w.get(a, b);
            let lo = wa.min(wb);
            let hi = wa.max(wb);
            let mut labels = Vec::new();
            if wab < f * lo {
                labels.push(StructureLabel::Community);
            }
            if f * wab > hi {
                labels.push(StructureLabel::Bipartite);
            }
            if lo < f * wab && lo < f * hi {
                labels.push(StructureLabel::CorePeriphery);
            }
            if !labels.is_empty() {
                out.push(PairStructure { a, b, labels });
            }
        }
    }
    Ok(out)
}

/// Fraction of degree-preserving samples exhibiting each structure label on
/// at least one group pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub samples: usize,
    pub community: f64,
    pub bipartite: f64,
    pub core_periphery: f64,
}

impl Census {
    pub fn proportion(&self, label: StructureLabel) -> f64 {
        match label {
            StructureLabel::Community => self.community,
            StructureLabel::Bipartite => self.bipartite,
            StructureLabel::CorePeriphery => self.core_periphery,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CensusOptions {
    pub f: f64,
    pub swaps_per_edge: usize,
    pub greedy: GreedyOptions,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            f: 0.5,
            swaps_per_edge: 20,
            greedy: GreedyOptions::default(),
        }
    }
}

/// For each of `samples` degree-preserving rewirings of `g`: infer the most
/// likely K-group dc-SBM, classify the 2x2 block structures, and report the
/// fraction of samples showing each label on any pair.
pub fn ensemble_census(
    g: &Graph,
    k: usize,
    samples: usize,
    seed: u64,
    opts: &CensusOptions,
) -> Result<Census> {
    if samples == 0 {
        return Err(MesoError::InvalidInput(
            "a census needs at least one sample".into(),
        ));
    }
    let flags: Vec<[bool; 3]> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<[bool; 3]> {
            let sample = configuration_sample(g, derive_seed(seed, 2 * i as u64), opts.swaps_per_edge)?;
            let inferred = greedy_optimize(&sample, k, &opts.greedy, derive_seed(seed, 2 * i as u64 + 1))?;
            let bs = block_summary(&sample, &inferred.partition)?;
            let structures = classify_structures(&bs, &inferred.omega, opts.f)?;
            let mut found = [false; 3];
            for pair in &structures {
                for label in &pair.labels {
                    match label {
                        StructureLabel::Community => found[0] = true,
                        StructureLabel::Bipartite => found[1] = true,
                        StructureLabel::CorePeriphery => found[2] = true,
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?;
    let count = |idx: usize| flags.iter().filter(|f| f[idx]).count() as f64 / samples as f64;
    Ok(Census {
        samples,
        community: count(0),
        bipartite: count(1),
        core_periphery: count(2),
    })
}
