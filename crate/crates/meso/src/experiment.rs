//! Experiment drivers: probability-grid scans for core-periphery and nested
//! structure, and the infer-plus-census pipeline. Each driver produces a
//! [`Grid`] that serializes to CSV with full parameter provenance, so any
//! figure can be regenerated from its own output file.

use rayon::prelude::*;

use crate::blocks::block_summary;
use crate::error::{MesoError, Result};
use crate::generate::{cp_benchmark_spec, derive_seed, sbm_generate, SbmSpec};
use crate::graph::Graph;
use crate::infer::{ensemble_census, greedy_optimize, Census, CensusOptions, GreedyOptions, InferenceResult};
use crate::matrix::SquareMatrix;
use crate::modularity::{block_modularity, q_matrix, BlockMatrix};
use crate::nestedness::{from_bipartite, nodf};
use crate::nullmodel::NullModel;
use crate::partition::{align_to, nmi, Partition};

/// Pattern probing a core-periphery pair (groups 0, 1) next to an
/// independent community (group 2).
pub fn cp_pattern_k3() -> BlockMatrix {
    BlockMatrix::from_rows(
        &[vec![1, 1, -1], vec![1, -1, -1], vec![-1, -1, 1]],
        false,
    )
    .expect("static pattern")
}

/// The competing pattern: groups 0 and 1 read as a bipartite pair.
pub fn bipartite_pattern_k3() -> BlockMatrix {
    BlockMatrix::from_rows(
        &[vec![-1, 1, -1], vec![1, -1, -1], vec![-1, -1, 1]],
        false,
    )
    .expect("static pattern")
}

/// Bipartite double core-periphery over groups (core-a, periphery-a,
/// core-b, periphery-b): cores talk to the whole other side, peripheries
/// only to the opposite core.
pub fn nested_cp_pattern() -> BlockMatrix {
    BlockMatrix::from_rows(
        &[
            vec![-1, -1, 1, 1],
            vec![-1, -1, 1, -1],
            vec![1, 1, -1, -1],
            vec![1, -1, -1, -1],
        ],
        false,
    )
    .expect("static pattern")
}

/// Plain bipartite reading of the same four groups: each group pairs with
/// its opposite number only.
pub fn nested_bipartite_pattern() -> BlockMatrix {
    BlockMatrix::from_rows(
        &[
            vec![-1, -1, -1, 1],
            vec![-1, -1, 1, -1],
            vec![-1, 1, -1, -1],
            vec![1, -1, -1, -1],
        ],
        false,
    )
    .expect("static pattern")
}

/// A rectangular scan result: `values[yi * nx + xi]` holds one row of named
/// values per cell.
#[derive(Debug, Clone)]
pub struct Grid {
    pub x_name: String,
    pub y_name: String,
    pub value_names: Vec<String>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub cells: Vec<Vec<f64>>,
    pub provenance: Vec<(String, String)>,
}

impl Grid {
    pub fn value(&self, xi: usize, yi: usize, value_idx: usize) -> f64 {
        self.cells[yi * self.xs.len() + xi][value_idx]
    }

    /// CSV with `# key=value` provenance comments ahead of the header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool=meso {}\n", env!("CARGO_PKG_VERSION")));
        for (key, value) in &self.provenance {
            out.push_str(&format!("# {key}={value}\n"));
        }
        out.push_str(&format!(
            "{},{},{}\n",
            self.x_name,
            self.y_name,
            self.value_names.join(",")
        ));
        for (yi, &y) in self.ys.iter().enumerate() {
            for (xi, &x) in self.xs.iter().enumerate() {
                let cell = &self.cells[yi * self.xs.len() + xi];
                let values: Vec<String> = cell.iter().map(|v| format!("{v}")).collect();
                out.push_str(&format!("{x},{y},{}\n", values.join(",")));
            }
        }
        out
    }
}

fn probability_axis(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(MesoError::InvalidInput(format!(
            "grid step must lie in (0, 1], got {step}"
        )));
    }
    let count = (1.0 / step).round() as usize;
    // Snap accumulated float drift so axis labels print cleanly.
    Ok((1..=count)
        .map(|i| (i as f64 * step * 1e12).round() / 1e12)
        .collect())
}

/// Core-periphery scan configuration: a probability grid over
/// (periphery-core rate `p_p`, core rate `p_c`) at fixed community rate
/// `p_m`.
#[derive(Debug, Clone)]
pub struct ScanCpConfig {
    pub p_m: f64,
    pub step: f64,
    pub reps: usize,
    pub group_size: usize,
    pub seed: u64,
}

impl Default for ScanCpConfig {
    fn default() -> Self {
        ScanCpConfig {
            p_m: 0.8,
            step: 0.05,
            reps: 20,
            group_size: 30,
            seed: 0,
        }
    }
}

/// Mean of `Q_cp - Q_bipartite` over `reps` seeded three-group SBM draws
/// with rates `[[p_c, p_p, 0], [p_p, 0, 0], [0, 0, p_m]]`, evaluated with
/// the planted partition under the configuration null.
pub fn cp_cell(
    p_p: f64,
    p_c: f64,
    p_m: f64,
    group_size: usize,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    let probabilities = SquareMatrix::from_rows(&[
        vec![p_c, p_p, 0.0],
        vec![p_p, 0.0, 0.0],
        vec![0.0, 0.0, p_m],
    ])?;
    let spec = SbmSpec::new(vec![group_size; 3], probabilities, false)?;
    let cp = cp_pattern_k3();
    let bip = bipartite_pattern_k3();
    let mut total = 0.0;
    for rep in 0..reps {
        let (graph, partition) = sbm_generate(&spec, derive_seed(seed, rep as u64))?;
        let bs = block_summary(&graph, &partition)?;
        let q = q_matrix(&bs, &NullModel::Configuration)?;
        total += block_modularity(&q, &cp)? - block_modularity(&q, &bip)?;
    }
    Ok(total / reps as f64)
}

/// Scans the (p_p, p_c) grid at fixed `p_m`. Cell seeds derive from the
/// master seed and the cell index, so the scan is deterministic under any
/// thread count.
pub fn run_scan_cp(cfg: &ScanCpConfig) -> Result<Grid> {
    if cfg.reps == 0 {
        return Err(MesoError::InvalidInput("reps must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.p_m) {
        return Err(MesoError::InvalidInput(format!(
            "p_m must lie in [0, 1], got {}",
            cfg.p_m
        )));
    }
    let axis = probability_axis(cfg.step)?;
    let nx = axis.len();
    let cells: Vec<Vec<f64>> = (0..nx * nx)
        .into_par_iter()
        .map(|idx| -> Result<Vec<f64>> {
            let xi = idx % nx;
            let yi = idx / nx;
            let mean = cp_cell(
                axis[xi],
                axis[yi],
                cfg.p_m,
                cfg.group_size,
                cfg.reps,
                derive_seed(cfg.seed, idx as u64),
            )?;
            Ok(vec![mean])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Grid {
        x_name: "p_p".into(),
        y_name: "p_c".into(),
        value_names: vec!["mean_q_cp_minus_q_bipartite".into()],
        xs: axis.clone(),
        ys: axis,
        cells,
        provenance: vec![
            ("experiment".into(), "scan-cp".into()),
            ("p_m".into(), format!("{}", cfg.p_m)),
            ("step".into(), format!("{}", cfg.step)),
            ("reps".into(), format!("{}", cfg.reps)),
            ("group_size".into(), format!("{}", cfg.group_size)),
            ("seed".into(), format!("{}", cfg.seed)),
        ],
    })
}

/// The detectability boundary `p_c = p_p^2 / p_m`, clipped to the unit
/// square, sampled on the scan grid.
pub fn cp_boundary_points(p_m: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    let axis = probability_axis(step)?;
    Ok(axis
        .into_iter()
        .map(|p_p| (p_p, p_p * p_p / p_m))
        .filter(|&(_, p_c)| p_c <= 1.0 + 1e-12)
        .collect())
}

/// Two-column CSV for a polyline overlay.
pub fn points_to_csv(x_name: &str, y_name: &str, points: &[(f64, f64)]) -> String {
    let mut out = format!("{x_name},{y_name}\n");
    for (x, y) in points {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

/// Nested-structure scan configuration: grid over (core-periphery rate
/// `p_cp`, core-core rate `p_cc`) for a four-group bipartite SBM with
/// cores of `core_size` and peripheries of `periphery_size` per side.
#[derive(Debug, Clone)]
pub struct ScanNestedConfig {
    pub step: f64,
    pub reps: usize,
    pub core_size: usize,
    pub periphery_size: usize,
    pub seed: u64,
}

impl Default for ScanNestedConfig {
    fn default() -> Self {
        ScanNestedConfig {
            step: 0.05,
            reps: 20,
            core_size: 10,
            periphery_size: 25,
            seed: 0,
        }
    }
}

/// Per-cell means for the nested scan: (Q_cp, Q_bipartite, NODF).
pub fn nested_cell(
    p_cp: f64,
    p_cc: f64,
    core_size: usize,
    periphery_size: usize,
    reps: usize,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    let probabilities = SquareMatrix::from_rows(&[
        vec![0.0, 0.0, p_cc, p_cp],
        vec![0.0, 0.0, p_cp, 0.0],
        vec![p_cc, p_cp, 0.0, 0.0],
        vec![p_cp, 0.0, 0.0, 0.0],
    ])?;
    let sizes = vec![core_size, periphery_size, core_size, periphery_size];
    let spec = SbmSpec::new(sizes, probabilities, false)?;
    let left: Vec<u32> = (0..(core_size + periphery_size) as u32).collect();
    let cp = nested_cp_pattern();
    let bip = nested_bipartite_pattern();
    let mut totals = (0.0, 0.0, 0.0);
    for rep in 0..reps {
        let (graph, partition) = sbm_generate(&spec, derive_seed(seed, rep as u64))?;
        let bs = block_summary(&graph, &partition)?;
        let q = q_matrix(&bs, &NullModel::Configuration)?;
        totals.0 += block_modularity(&q, &cp)?;
        totals.1 += block_modularity(&q, &bip)?;
        totals.2 += nodf(&from_bipartite(&graph, &left)?)?;
    }
    let r = reps as f64;
    Ok((totals.0 / r, totals.1 / r, totals.2 / r))
}

pub fn run_scan_nested(cfg: &ScanNestedConfig) -> Result<Grid> {
    if cfg.reps == 0 {
        return Err(MesoError::InvalidInput("reps must be >= 1".into()));
    }
    let axis = probability_axis(cfg.step)?;
    let nx = axis.len();
    let cells: Vec<Vec<f64>> = (0..nx * nx)
        .into_par_iter()
        .map(|idx| -> Result<Vec<f64>> {
            let xi = idx % nx;
            let yi = idx / nx;
            let (q_cp, q_bip, mean_nodf) = nested_cell(
                axis[xi],
                axis[yi],
                cfg.core_size,
                cfg.periphery_size,
                cfg.reps,
                derive_seed(cfg.seed, idx as u64),
            )?;
            Ok(vec![q_cp, q_bip, q_cp - q_bip, mean_nodf])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Grid {
        x_name: "p_cp".into(),
        y_name: "p_cc".into(),
        value_names: vec![
            "mean_q_cp".into(),
            "mean_q_bipartite".into(),
            "mean_q_cp_minus_q_bipartite".into(),
            "mean_nodf".into(),
        ],
        xs: axis.clone(),
        ys: axis,
        cells,
        provenance: vec![
            ("experiment".into(), "scan-nested".into()),
            ("step".into(), format!("{}", cfg.step)),
            ("reps".into(), format!("{}", cfg.reps)),
            ("core_size".into(), format!("{}", cfg.core_size)),
            ("periphery_size".into(), format!("{}", cfg.periphery_size)),
            ("seed".into(), format!("{}", cfg.seed)),
            ("nodf_range".into(), "0..1".into()),
        ],
    })
}

/// Configuration for the inference-plus-census pipeline.
#[derive(Debug, Clone)]
pub struct InferCensusConfig {
    pub k: usize,
    pub samples: usize,
    pub f: f64,
    pub swaps_per_edge: usize,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for InferCensusConfig {
    fn default() -> Self {
        InferCensusConfig {
            k: 3,
            samples: 1000,
            f: 0.5,
            swaps_per_edge: 20,
            restarts: 20,
            max_sweeps: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InferCensusReport {
    pub inference: InferenceResult,
    /// Recovered partition relabeled to best match the planted one, when a
    /// planted partition was supplied.
    pub aligned: Partition,
    pub nmi_vs_planted: Option<f64>,
    /// CP/bipartite pattern scores of the (aligned) recovered partition
    /// under the configuration null; K=3 inputs only.
    pub q_cp: Option<f64>,
    pub q_bipartite: Option<f64>,
    pub census: Census,
}

/// Runs the greedy optimizer on `g`, scores the recovered partition against
/// the core-periphery and bipartite probes, then runs the degree-preserving
/// ensemble census.
pub fn run_infer_census(
    g: &Graph,
    planted: Option<&Partition>,
    cfg: &InferCensusConfig,
) -> Result<InferCensusReport> {
    let greedy = GreedyOptions {
        restarts: cfg.restarts,
        max_sweeps: cfg.max_sweeps,
        scheme: crate::infer::UpdateScheme::PerMove,
    };
    let inference = greedy_optimize(g, cfg.k, &greedy, derive_seed(cfg.seed, 0))?;
    let aligned = match planted {
        Some(reference) if reference.k() == cfg.k => align_to(&inference.partition, reference)?,
        _ => inference.partition.clone(),
    };
    let nmi_vs_planted = match planted {
        Some(reference) => Some(nmi(&inference.partition, reference)?),
        None => None,
    };
    let (q_cp, q_bipartite) = if cfg.k == 3 {
        let bs = block_summary(g, &aligned)?;
        let q = q_matrix(&bs, &NullModel::Configuration)?;
        (
            Some(block_modularity(&q, &cp_pattern_k3())?),
            Some(block_modularity(&q, &bipartite_pattern_k3())?),
        )
    } else {
        (None, None)
    };
    let census_opts = CensusOptions {
        f: cfg.f,
        swaps_per_edge: cfg.swaps_per_edge,
        greedy,
    };
    let census = ensemble_census(g, cfg.k, cfg.samples, derive_seed(cfg.seed, 1), &census_opts)?;
    Ok(InferCensusReport {
        inference,
        aligned,
        nmi_vs_planted,
        q_cp,
        q_bipartite,
        census,
    })
}

/// The benchmark spec used when no input graph is supplied.
pub fn default_benchmark_spec() -> SbmSpec {
    cp_benchmark_spec(30)
}
