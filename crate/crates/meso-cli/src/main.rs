//! `meso` — block-modularity analysis of meso-scale network structure.
//!
//! Subcommands cover single-network analysis, pattern taxonomy reports,
//! degree-preserving resampling, dc-SBM inference, ensemble censuses and
//! the two probability-grid scan experiments. Every seeded subcommand is
//! run-to-run deterministic: identical invocations produce byte-identical
//! outputs. Exit codes: 0 on success, 2 on input errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use meso::blocks::block_summary;
use meso::error::MesoError;
use meso::experiment::{
    bipartite_pattern_k3, cp_boundary_points, cp_pattern_k3, points_to_csv, run_scan_cp,
    run_scan_nested, ScanCpConfig, ScanNestedConfig,
};
use meso::generate::{configuration_sample, cp_benchmark_network, derive_seed};
use meso::graph::load_edge_list;
use meso::heatmap::{emit_heatmap, Palette};
use meso::infer::{
    degenerate_groups, ensemble_census, greedy_optimize, CensusOptions, GreedyOptions,
    UpdateScheme,
};
use meso::matrix::SquareMatrix;
use meso::modularity::{
    block_modularity, newman_modularity, q_matrix, sum_rules, BlockMatrix,
};
use meso::nullmodel::NullModel;
use meso::partition::{nmi, parse_partition};
use meso::pattern::patterns_report;

#[derive(Parser)]
#[command(name = "meso", version, about = "Meso-scale network structure analysis")]
struct Cli {
    /// Master seed for all randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Treat input edge lists as directed.
    #[arg(long, global = true)]
    directed: bool,

    /// Null model for analysis subcommands.
    #[arg(long, global = true, value_enum, default_value_t = NullKind::Config)]
    null: NullKind,

    /// Scaling for the scaled configuration null.
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// K x K matrix file of per-block scalings (block-scaled null).
    #[arg(long, global = true)]
    gamma_file: Option<PathBuf>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores; MESO_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NullKind {
    Config,
    Er,
    Scaled,
    BlockScaled,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeKind {
    PerMove,
    Alternating,
}

#[derive(Subcommand)]
enum Command {
    /// Block statistics, Q matrix, sum rules and pattern scores for one
    /// graph and partition.
    Analyze(AnalyzeArgs),
    /// CSV taxonomy of all K x K block patterns.
    Patterns(PatternsArgs),
    /// Degree-preserving samples of an input graph.
    Sample(SampleArgs),
    /// Greedy dc-SBM inference of a K-group partition.
    Infer(InferArgs),
    /// Structure census over degree-preserving samples.
    Census(CensusArgs),
    /// Core-periphery detectability scan over (p_p, p_c) grids.
    ScanCp(ScanCpArgs),
    /// Nested-bipartite scan over the (p_cp, p_cc) grid.
    ScanNested(ScanNestedArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list file: `u v` per line, `#` comments allowed.
    #[arg(long)]
    input: PathBuf,
    /// Partition file: `node group` per line.
    #[arg(long)]
    partition: PathBuf,
    /// Optional block-pattern file (K lines of +1/-1 entries) to score.
    #[arg(long)]
    pattern: Option<PathBuf>,
}

#[derive(Args)]
struct PatternsArgs {
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// Swap attempts per edge.
    #[arg(long, default_value_t = 20)]
    swaps: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    /// Edge-list file; omitted: the bundled core-periphery benchmark.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    /// Rate handling during sweeps; `alternating` is experimental.
    #[arg(long, value_enum, default_value_t = SchemeKind::PerMove)]
    scheme: SchemeKind,
}

#[derive(Args)]
struct CensusArgs {
    /// Edge-list file; omitted: the bundled core-periphery benchmark.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Stringency of the classification rules, in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    f: f64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 20)]
    swaps: usize,
}

#[derive(Args)]
struct ScanCpArgs {
    /// Community rates to scan at (one grid per value).
    #[arg(long = "pm", num_args = 1.., default_values_t = [0.8, 0.2])]
    p_m: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 30)]
    group_size: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScanNestedArgs {
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 10)]
    core_size: usize,
    #[arg(long, default_value_t = 25)]
    periphery_size: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

enum CliError {
    Input(String),
    Internal(String),
}

impl From<MesoError> for CliError {
    fn from(e: MesoError) -> CliError {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_output(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn resolve_null(cli: &Cli) -> CliResult<NullModel> {
    Ok(match cli.null {
        NullKind::Config => NullModel::Configuration,
        NullKind::Er => NullModel::ErdosRenyi,
        NullKind::Scaled => {
            let gamma = cli.gamma.ok_or_else(|| {
                CliError::Input("--null scaled requires --gamma".into())
            })?;
            NullModel::ScaledConfiguration { gamma }
        }
        NullKind::BlockScaled => {
            let path = cli.gamma_file.as_ref().ok_or_else(|| {
                CliError::Input("--null block-scaled requires --gamma-file".into())
            })?;
            let text = read_input(path)?;
            let mut rows = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let row: Result<Vec<f64>, _> =
                    line.split_whitespace().map(|t| t.parse::<f64>()).collect();
                rows.push(row.map_err(|e| CliError::Input(format!("bad gamma entry: {e}")))?);
            }
            NullModel::BlockScaledConfiguration {
                gamma: SquareMatrix::from_rows(&rows)?,
            }
        }
    })
}

fn configure_threads(cli: &Cli) {
    let from_env = std::env::var("MESO_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    if let Some(n) = from_env.or(cli.threads) {
        // A no-op if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn matrix_lines(label: &str, m: &SquareMatrix) -> String {
    let mut out = format!("{label}:\n");
    for a in 0..m.k() {
        let row: Vec<String> = (0..m.k()).map(|b| format!("{:.6}", m.get(a, b))).collect();
        let _ = writeln!(out, "  {}", row.join(" "));
    }
    out
}

fn vector_line(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_analyze(cli: &Cli, args: &AnalyzeArgs) -> CliResult<()> {
    let graph = load_edge_list(&read_input(&args.input)?, cli.directed)?;
    let partition = parse_partition(&read_input(&args.partition)?)?;
    let null = resolve_null(cli)?;
    let bs = block_summary(&graph, &partition)?;
    let q = q_matrix(&bs, &null)?;
    let rules = sum_rules(&q, &null, &bs)?;

    let mut report = String::new();
    let _ = writeln!(
        report,
        "nodes={} edges={} directed={} duplicates_collapsed={}",
        graph.node_count(),
        graph.edge_count(),
        graph.directed(),
        graph.duplicates_collapsed()
    );
    let _ = writeln!(
        report,
        "k={} sizes={:?} null={}",
        partition.k(),
        partition.sizes(),
        null.name()
    );
    if !graph.directed() {
        let _ = writeln!(report, "newman_modularity={:.9}", newman_modularity(&bs)?);
    }
    report.push_str(&matrix_lines("s_matrix", &bs.s_matrix()));
    report.push_str(&matrix_lines("q_matrix", q.values()));
    let _ = writeln!(report, "row_sums: {}", vector_line(&rules.row_sums));
    let _ = writeln!(report, "col_sums: {}", vector_line(&rules.col_sums));
    let _ = writeln!(report, "total: {:.6}", rules.total);
    let _ = writeln!(
        report,
        "predicted_row_sums: {}",
        vector_line(&rules.predicted_row_sums)
    );
    let _ = writeln!(report, "predicted_total: {:.6}", rules.predicted_total);
    if let Some(pattern_path) = &args.pattern {
        let pattern = BlockMatrix::parse(&read_input(pattern_path)?, cli.directed)?;
        let _ = writeln!(
            report,
            "block_modularity={:.9}",
            block_modularity(&q, &pattern)?
        );
    }
    emit(&cli.out, &report)
}

fn cmd_patterns(cli: &Cli, args: &PatternsArgs) -> CliResult<()> {
    let csv = patterns_report(args.k, cli.directed)?;
    emit(&cli.out, &csv)
}

fn cmd_sample(cli: &Cli, args: &SampleArgs) -> CliResult<()> {
    if args.samples == 0 {
        return Err(CliError::Input("--samples must be at least 1".into()));
    }
    let graph = load_edge_list(&read_input(&args.input)?, cli.directed)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", args.out_dir.display())))?;
    for i in 0..args.samples {
        let sample = configuration_sample(&graph, derive_seed(cli.seed, i as u64), args.swaps)?;
        let path = args.out_dir.join(format!("sample_{i:04}.edges"));
        write_output(&path, &sample.to_edge_list_string())?;
    }
    println!(
        "wrote {} degree-preserving samples to {}",
        args.samples,
        args.out_dir.display()
    );
    Ok(())
}

fn load_or_benchmark(
    input: &Option<PathBuf>,
    directed: bool,
    seed: u64,
) -> CliResult<(meso::Graph, Option<meso::Partition>)> {
    match input {
        Some(path) => {
            let g = load_edge_list(&read_input(path)?, directed)?;
            Ok((g, None))
        }
        None => {
            if directed {
                return Err(CliError::Input(
                    "the bundled benchmark network is undirected".into(),
                ));
            }
            let (g, p) = cp_benchmark_network(derive_seed(seed, 0xBE));
            Ok((g, Some(p)))
        }
    }
}

fn cmd_infer(cli: &Cli, args: &InferArgs) -> CliResult<()> {
    let (graph, planted) = load_or_benchmark(&args.input, cli.directed, cli.seed)?;
    let opts = GreedyOptions {
        restarts: args.restarts,
        max_sweeps: args.max_sweeps,
        scheme: match args.scheme {
            SchemeKind::PerMove => UpdateScheme::PerMove,
            SchemeKind::Alternating => UpdateScheme::Alternating,
        },
    };
    let result = greedy_optimize(&graph, args.k, &opts, cli.seed)?;
    let mut report = String::new();
    let _ = writeln!(
        report,
        "k={} score={:.9} sweeps={} restart={}",
        args.k, result.score, result.sweeps, result.restart
    );
    let bs = block_summary(&graph, &result.partition)?;
    for group in degenerate_groups(&bs) {
        let _ = writeln!(report, "warning: group {group} is empty; its rates are zero");
    }
    report.push_str(&matrix_lines("omega", result.omega.values()));
    if let Some(planted) = &planted {
        let _ = writeln!(report, "nmi_vs_planted={:.6}", nmi(&result.partition, planted)?);
        if args.k == 3 {
            let aligned = meso::partition::align_to(&result.partition, planted)?;
            let bs = block_summary(&graph, &aligned)?;
            let q = q_matrix(&bs, &NullModel::Configuration)?;
            let _ = writeln!(
                report,
                "q_cp={:.6} q_bipartite={:.6}",
                block_modularity(&q, &cp_pattern_k3())?,
                block_modularity(&q, &bipartite_pattern_k3())?
            );
        }
    }
    if let Some(prefix) = &cli.out {
        let partition_path = prefix.with_extension("partition");
        let omega_path = prefix.with_extension("omega");
        write_output(&partition_path, &result.partition.to_file_string())?;
        let mut omega_text = String::new();
        for a in 0..result.omega.k() {
            let row: Vec<String> = (0..result.omega.k())
                .map(|b| format!("{}", result.omega.get(a, b)))
                .collect();
            omega_text.push_str(&row.join(" "));
            omega_text.push('\n');
        }
        write_output(&omega_path, &omega_text)?;
        let _ = writeln!(
            report,
            "wrote {} and {}",
            partition_path.display(),
            omega_path.display()
        );
    }
    print!("{report}");
    Ok(())
}

fn cmd_census(cli: &Cli, args: &CensusArgs) -> CliResult<()> {
    let (graph, _) = load_or_benchmark(&args.input, cli.directed, cli.seed)?;
    let opts = CensusOptions {
        f: args.f,
        swaps_per_edge: args.swaps,
        greedy: GreedyOptions {
            restarts: args.restarts,
            max_sweeps: 100,
            scheme: UpdateScheme::PerMove,
        },
    };
    let census = ensemble_census(&graph, args.k, args.samples, cli.seed, &opts)?;
    let mut csv = String::new();
    let _ = writeln!(csv, "# tool=meso {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        csv,
        "# samples={} k={} f={} swaps={} restarts={} seed={}",
        args.samples, args.k, args.f, args.swaps, args.restarts, cli.seed
    );
    csv.push_str("label,proportion\n");
    let _ = writeln!(csv, "community,{}", census.community);
    let _ = writeln!(csv, "bipartite,{}", census.bipartite);
    let _ = writeln!(csv, "core-periphery,{}", census.core_periphery);
    emit(&cli.out, &csv)
}

fn cmd_scan_cp(cli: &Cli, args: &ScanCpArgs) -> CliResult<()> {
    for &p_m in &args.p_m {
        let cfg = ScanCpConfig {
            p_m,
            step: args.step,
            reps: args.reps,
            group_size: args.group_size,
            seed: cli.seed,
        };
        let grid = run_scan_cp(&cfg)?;
        let csv = grid.to_csv();
        let boundary = points_to_csv("p_p", "p_c", &cp_boundary_points(p_m, args.step)?);
        let svg = emit_heatmap(
            &csv,
            "mean_q_cp_minus_q_bipartite",
            Palette::Diverging,
            Some(&boundary),
        )?;
        let tag = format!("{p_m:.2}");
        write_output(&args.out_dir.join(format!("scan_cp_pm{tag}.csv")), &csv)?;
        write_output(
            &args.out_dir.join(format!("scan_cp_pm{tag}_boundary.csv")),
            &boundary,
        )?;
        write_output(&args.out_dir.join(format!("scan_cp_pm{tag}.svg")), &svg)?;
    }
    println!(
        "wrote {} scan grid(s) to {}",
        args.p_m.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_scan_nested(cli: &Cli, args: &ScanNestedArgs) -> CliResult<()> {
    let cfg = ScanNestedConfig {
        step: args.step,
        reps: args.reps,
        core_size: args.core_size,
        periphery_size: args.periphery_size,
        seed: cli.seed,
    };
    let grid = run_scan_nested(&cfg)?;
    let csv = grid.to_csv();
    write_output(&args.out_dir.join("scan_nested.csv"), &csv)?;
    let qdiff = emit_heatmap(
        &csv,
        "mean_q_cp_minus_q_bipartite",
        Palette::Diverging,
        None,
    )?;
    write_output(&args.out_dir.join("scan_nested_qdiff.svg"), &qdiff)?;
    let nodf_svg = emit_heatmap(&csv, "mean_nodf", Palette::Sequential, None)?;
    write_output(&args.out_dir.join("scan_nested_nodf.svg"), &nodf_svg)?;
    println!("wrote scan grid to {}", args.out_dir.display());
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads(cli);
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(cli, args),
        Command::Patterns(args) => cmd_patterns(cli, args),
        Command::Sample(args) => cmd_sample(cli, args),
        Command::Infer(args) => cmd_infer(cli, args),
        Command::Census(args) => cmd_census(cli, args),
        Command::ScanCp(args) => cmd_scan_cp(cli, args),
        Command::ScanNested(args) => cmd_scan_nested(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
