//! Command-line surface: a thin layer over the library exposing validation,
//! graph building, indexing, distances, Gram export, slicing and a small
//! benchmark as subcommands.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 validation failure,
//! 3 shortest-path-uniqueness violation, 4 numeric precondition (bad order,
//! unequal masses, kernel parameters).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{exact_w1, random_spanning_tree, tree_wasserstein};
use crate::builder::{build_random_graph, BuildSpec, EdgeRule, PointCloud};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernels::{gram_matrix_with_threads, KernelFamily, KernelSpec};
use crate::measure::DiscreteMeasure;
use crate::numeric::format_significant;
use crate::root_index::{
    build_root_index, build_root_index_with_ties, enumerate_root_candidates, RootIndex, TiePolicy,
};
use crate::sobolev::{sliced_sobolev, sobolev_distance, SliceSpec};

/// Seed fallback order: `--seed`, then `SOBOGRAPH_SEED`, then 0.
pub const SEED_ENV: &str = "SOBOGRAPH_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "sobograph",
    about = "Closed-form transport distances on weighted graphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a graph file: connectivity, weight positivity, short cuts and
    /// available unique-path roots.
    Validate(ValidateArgs),
    /// Build a random graph metric from a point cloud.
    BuildGraph(BuildGraphArgs),
    /// Precompute and persist a root index.
    Index(IndexArgs),
    /// Distance between two measures.
    Dist(DistArgs),
    /// Kernel Gram matrix over a directory of measures.
    Gram(GramArgs),
    /// Sliced distance averaged over several roots.
    Slice(SliceArgs),
    /// Timing table for preprocessing and per-pair distances.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// Absolute tolerance; defaults to 1e-9 times the largest weight.
    #[arg(long)]
    tol: Option<f64>,
    /// On an empty root set, retry with multiplicative weight jitter and
    /// write the perturbed graph here.
    #[arg(long)]
    perturb_out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct BuildGraphArgs {
    /// Points TSV file (one coordinate vector per line).
    #[arg(long)]
    points: PathBuf,
    /// Cluster budget (number of graph nodes, at most).
    #[arg(long = "M")]
    m: usize,
    /// Edge budget rule.
    #[arg(long, value_enum)]
    edges: EdgeRuleArg,
    #[arg(long)]
    seed: Option<u64>,
    /// Output graph JSON path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EdgeRuleArg {
    /// ceil(M log M) sampled edges
    Log,
    /// ceil(M^1.5) sampled edges
    Sqrt,
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Root node label; defaults to the most central valid root.
    #[arg(long)]
    root: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Resolve equal-length shortest paths by lowest edge id instead of
    /// failing (departs from the unique-path model; exploratory use).
    #[arg(long)]
    break_ties: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Sobolev,
    /// tree-Wasserstein on the graph itself (if a tree) or on a seeded
    /// random spanning tree
    Tw,
    /// exact 1-Wasserstein via the transportation simplex
    W1,
}

#[derive(Debug, Args)]
struct DistArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "sobolev")]
    method: Method,
    /// Distance order p >= 1 (sobolev only).
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Root node label; defaults to the most central valid root.
    #[arg(long)]
    root: Option<String>,
    /// Average over all valid roots with uniform weights (sobolev only).
    #[arg(long)]
    all_roots: bool,
    /// Load a persisted root index instead of rebuilding.
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rescale measure masses to sum to one.
    #[arg(long)]
    normalize: bool,
    /// Resolve equal-length shortest paths by lowest edge id instead of
    /// failing (departs from the unique-path model; exploratory use).
    #[arg(long)]
    break_ties: bool,
    /// First measure TSV file.
    mu: PathBuf,
    /// Second measure TSV file.
    nu: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// exp(-t * S_p)
    Sp,
    /// exp(-t * S_p^p)
    Spp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GramFormat {
    Csv,
    Bin,
}

#[derive(Debug, Args)]
struct GramArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Root node label; defaults to the most central valid root.
    #[arg(long)]
    root: Option<String>,
    /// Directory of measure TSV files; lexicographic file order defines the
    /// matrix indices and the file stems become labels.
    #[arg(long)]
    measures: PathBuf,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Kernel bandwidth.
    #[arg(long)]
    t: f64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to the logical core count.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: GramFormat,
    /// Constant added to the diagonal before export.
    #[arg(long, default_value_t = 0.0)]
    diag_shift: f64,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Args)]
struct SliceArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Comma-separated root labels; defaults to sampling --num-roots
    /// candidates.
    #[arg(long, value_delimiter = ',')]
    roots: Vec<String>,
    /// Number of roots to sample uniformly from the valid candidates.
    #[arg(long)]
    num_roots: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    normalize: bool,
    mu: PathBuf,
    nu: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    measures: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, value_enum, default_value = "sp")]
    family: FamilyArg,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Cap on the number of measure pairs timed individually.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    root: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    normalize: bool,
}

/// Entry point used by the binary: parse, run, map errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/usage; usage errors map to 2
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Parse { .. } | Error::UnknownLabel(_) | Error::UnknownNode(_) => 1,
        Error::AmbiguousPath { .. } => 3,
        Error::InvalidOrder(_)
        | Error::InvalidOrderPair { .. }
        | Error::UnequalMass(_, _)
        | Error::MassNotNormalized(_)
        | Error::NegativeMass { .. }
        | Error::KernelOrderOutOfRange(_)
        | Error::InvalidBandwidth(_)
        | Error::KNotSatisfied(_) => 4,
        _ => 2,
    }
}

fn seed_of(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

fn tol_of(g: &Graph, cli_tol: Option<f64>) -> f64 {
    cli_tol.unwrap_or_else(|| g.default_tolerance())
}

fn resolve_root(g: &Graph, label: Option<&str>, tol: f64) -> Result<usize> {
    resolve_root_with_ties(g, label, tol, TiePolicy::Error)
}

fn resolve_root_with_ties(
    g: &Graph,
    label: Option<&str>,
    tol: f64,
    ties: TiePolicy,
) -> Result<usize> {
    match label {
        Some(l) => g
            .node_by_label(l)
            .ok_or_else(|| Error::UnknownLabel(l.to_string())),
        None => match crate::root_index::select_root(g, tol) {
            // with tie-breaking enabled any node works; keep the centrality
            // heuristic but waive the uniqueness requirement
            Err(Error::EmptyRootSet) if ties == TiePolicy::Lexicographic => {
                let mut best = (f64::INFINITY, 0usize);
                for z0 in 0..g.node_count() {
                    let (dist, _) = g.dijkstra(z0);
                    if dist.iter().any(|d| !d.is_finite()) {
                        return Err(Error::Disconnected(z0));
                    }
                    let total = crate::numeric::kahan_sum(dist);
                    if total < best.0 {
                        best = (total, z0);
                    }
                }
                Ok(best.1)
            }
            other => other,
        },
    }
}

fn load_index(
    g: &Graph,
    persisted: Option<&Path>,
    root: Option<&str>,
    tol: f64,
    ties: TiePolicy,
) -> Result<RootIndex> {
    match persisted {
        Some(path) => RootIndex::load_json(path, g),
        None => {
            let z0 = resolve_root_with_ties(g, root, tol, ties)?;
            build_root_index_with_ties(g, z0, tol, ties)
        }
    }
}

/// Measure files of a directory in lexicographic filename order, with their
/// stems as labels.
fn load_measure_dir(
    dir: &Path,
    g: &Graph,
    normalize: bool,
) -> Result<(Vec<DiscreteMeasure>, Vec<String>)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir.display().to_string(), e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no measure files in {}",
            dir.display()
        )));
    }
    let mut measures = Vec::with_capacity(files.len());
    let mut labels = Vec::with_capacity(files.len());
    for f in &files {
        measures.push(DiscreteMeasure::load_tsv(f, g, normalize)?);
        labels.push(
            f.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| f.display().to_string()),
        );
    }
    Ok((measures, labels))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::BuildGraph(args) => cmd_build_graph(args),
        Command::Index(args) => cmd_index(args),
        Command::Dist(args) => cmd_dist(args),
        Command::Gram(args) => cmd_gram(args),
        Command::Slice(args) => cmd_slice(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let g = Graph::load_json(&args.graph)?;
    let tol = tol_of(&g, args.tol);
    let report = g.validate(tol);
    println!("connected: {}", report.connected);
    println!("positive_weights: {}", report.positive_weights);
    if report.has_short_cuts {
        let ids: Vec<String> = report.offending_edges.iter().map(|e| e.to_string()).collect();
        println!("short_cuts: {}", ids.join(" "));
    } else {
        println!("short_cuts: none");
    }
    if !report.connected {
        println!("roots: none");
        return Ok(2);
    }
    match enumerate_root_candidates(&g, tol) {
        Ok(roots) => {
            if roots.len() == g.node_count() {
                println!("roots: all");
            } else {
                let labels: Vec<String> =
                    roots.iter().map(|&r| g.label(r).to_string()).collect();
                println!("roots: {}/{} ({})", roots.len(), g.node_count(), labels.join(" "));
            }
            Ok(0)
        }
        Err(Error::EmptyRootSet) => {
            println!("roots: none (no unique-path root)");
            if let Some(out) = args.perturb_out {
                let jittered = g.perturb_weights(1e-9, seed_of(args.seed));
                jittered.save_json(&out)?;
                match enumerate_root_candidates(&jittered, tol.min(1e-15)) {
                    Ok(roots) => println!(
                        "perturbed: wrote {} ({} roots available after jitter)",
                        out.display(),
                        roots.len()
                    ),
                    Err(_) => println!("perturbed: wrote {} (still no root)", out.display()),
                }
            }
            Ok(2)
        }
        Err(e) => Err(e),
    }
}

fn cmd_build_graph(args: BuildGraphArgs) -> Result<i32> {
    let pc = PointCloud::load_tsv(&args.points)?;
    let rule = match args.edges {
        EdgeRuleArg::Log => EdgeRule::Log,
        EdgeRuleArg::Sqrt => EdgeRule::Sqrt,
    };
    let seed = seed_of(args.seed);
    let clustering = crate::builder::farthest_point_clustering(&pc, args.m, seed)?;
    if clustering.merged_duplicates > 0 {
        eprintln!(
            "note: merged {} coincident points before clustering",
            clustering.merged_duplicates
        );
    }
    let spec = BuildSpec::new(args.m, rule, seed)?;
    let g = build_random_graph(&clustering.centroids, &spec)?;
    g.save_json(&args.out)?;
    println!(
        "wrote {} ({} nodes, {} edges)",
        args.out.display(),
        g.node_count(),
        g.edge_count()
    );
    Ok(0)
}

fn cmd_index(args: IndexArgs) -> Result<i32> {
    let g = Graph::load_json(&args.graph)?;
    let tol = tol_of(&g, args.tol);
    let ties = if args.break_ties {
        TiePolicy::Lexicographic
    } else {
        TiePolicy::Error
    };
    let z0 = resolve_root_with_ties(&g, args.root.as_deref(), tol, ties)?;
    let idx = build_root_index_with_ties(&g, z0, tol, ties)?;
    idx.save_json(&args.out)?;
    println!(
        "wrote {} (root {}, {} tree edges, {} pruned)",
        args.out.display(),
        g.label(z0),
        idx.tree_edges().len(),
        idx.pruned_edges().len()
    );
    Ok(0)
}

fn cmd_dist(args: DistArgs) -> Result<i32> {
    let g = Graph::load_json(&args.graph)?;
    let tol = tol_of(&g, args.tol);
    let mu = DiscreteMeasure::load_tsv(&args.mu, &g, args.normalize)?;
    let nu = DiscreteMeasure::load_tsv(&args.nu, &g, args.normalize)?;
    let value = match args.method {
        Method::Sobolev => {
            if args.all_roots {
                let roots = enumerate_root_candidates(&g, tol)?;
                let indexes: Vec<RootIndex> = roots
                    .iter()
                    .map(|&z0| build_root_index(&g, z0, tol))
                    .collect::<Result<_>>()?;
                let spec = SliceSpec::uniform(roots)?;
                sliced_sobolev(&indexes, &spec, &mu, &nu, args.p)?
            } else {
                let ties = if args.break_ties {
                    TiePolicy::Lexicographic
                } else {
                    TiePolicy::Error
                };
                let idx = load_index(&g, args.index.as_deref(), args.root.as_deref(), tol, ties)?;
                sobolev_distance(&idx, &mu, &nu, args.p)?
            }
        }
        Method::Tw => {
            let tree = if g.edge_count() + 1 == g.node_count() && g.is_connected() {
                g.clone()
            } else {
                random_spanning_tree(&g, seed_of(args.seed))?
            };
            let z0 = resolve_root(&tree, args.root.as_deref(), tol)?;
            let idx = build_root_index(&tree, z0, tol)?;
            tree_wasserstein(&idx, &mu, &nu)?
        }
        Method::W1 => exact_w1(&g, &mu, &nu)?,
    };
    println!("{}", format_significant(value, 12));
    Ok(0)
}

fn cmd_gram(args: GramArgs) -> Result<i32> {
    let g = Graph::load_json(&args.graph)?;
    let tol = tol_of(&g, args.tol);
    let idx = load_index(&g, args.index.as_deref(), args.root.as_deref(), tol, TiePolicy::Error)?;
    let (measures, labels) = load_measure_dir(&args.measures, &g, args.normalize)?;
    let family = match args.family {
        FamilyArg::Sp => KernelFamily::Sp,
        FamilyArg::Spp => KernelFamily::SpPowP,
    };
    let spec = KernelSpec::new(family, args.p, args.t)?;
    let threads = args.threads.unwrap_or_else(num_threads_default);
    let mut gram = gram_matrix_with_threads(&idx, &measures, &spec, threads)?
        .with_labels(labels)?;
    if args.diag_shift != 0.0 {
        gram.add_diagonal_shift(args.diag_shift);
    }
    gram.save(&args.out, matches!(args.format, GramFormat::Bin))?;
    println!("wrote {} ({}x{})", args.out.display(), gram.n(), gram.n());
    Ok(0)
}

fn cmd_slice(args: SliceArgs) -> Result<i32> {
    let g = Graph::load_json(&args.graph)?;
    let tol = tol_of(&g, args.tol);
    let mu = DiscreteMeasure::load_tsv(&args.mu, &g, args.normalize)?;
    let nu = DiscreteMeasure::load_tsv(&args.nu, &g, args.normalize)?;
    let roots: Vec<usize> = if !args.roots.is_empty() {
        args.roots
            .iter()
            .map(|l| {
                g.node_by_label(l)
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))
            })
            .collect::<Result<_>>()?
    } else {
        let candidates = enumerate_root_candidates(&g, tol)?;
        match args.num_roots {
            None => candidates,
            Some(k) => {
                use rand::Rng;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed_of(args.seed));
                let k = k.min(candidates.len()).max(1);
                let mut pool = candidates;
                for i in 0..k {
                    let j = rng.random_range(i..pool.len());
                    pool.swap(i, j);
                }
                let mut picked: Vec<usize> = pool[..k].to_vec();
                picked.sort_unstable();
                picked
            }
        }
    };
    let indexes: Vec<RootIndex> = roots
        .iter()
        .map(|&z0| build_root_index(&g, z0, tol))
        .collect::<Result<_>>()?;
    let spec = SliceSpec::uniform(roots)?;
    let value = sliced_sobolev(&indexes, &spec, &mu, &nu, args.p)?;
    println!("{}", format_significant(value, 12));
    Ok(0)
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let g = Graph::load_json(&args.graph)?;
    let tol = tol_of(&g, args.tol);
    let (measures, _) = load_measure_dir(&args.measures, &g, args.normalize)?;

    let t0 = Instant::now();
    let z0 = match &args.root {
        Some(l) => g
            .node_by_label(l)
            .ok_or_else(|| Error::UnknownLabel(l.clone()))?,
        // full centrality selection would dwarf the preprocessing being
        // measured; scan for the first valid root instead
        None => (0..g.node_count())
            .find(|&z| crate::root_index::check_uniqueness(&g, z, tol))
            .ok_or(Error::EmptyRootSet)?,
    };
    let idx = build_root_index(&g, z0, tol)?;
    let preprocess = t0.elapsed();

    let n = measures.len();
    let all_pairs = n * (n - 1) / 2;
    let cap = args.pairs.unwrap_or(all_pairs).min(all_pairs).max(1);
    let t1 = Instant::now();
    let mut done = 0usize;
    let mut checksum = 0.0f64;
    'outer: for i in 0..n {
        for j in i + 1..n {
            checksum += sobolev_distance(&idx, &measures[i], &measures[j], args.p)?;
            done += 1;
            if done >= cap {
                break 'outer;
            }
        }
    }
    let dist_time = t1.elapsed();

    let family = match args.family {
        FamilyArg::Sp => KernelFamily::Sp,
        FamilyArg::Spp => KernelFamily::SpPowP,
    };
    let spec = KernelSpec::new(family, args.p.clamp(1.0, 2.0), args.t)?;
    let threads = args.threads.unwrap_or_else(num_threads_default);
    let t2 = Instant::now();
    let gram = gram_matrix_with_threads(&idx, &measures, &spec, threads)?;
    let gram_fill = t2.elapsed();

    println!("metric\tvalue");
    println!("nodes\t{}", g.node_count());
    println!("edges\t{}", g.edge_count());
    println!("measures\t{n}");
    println!("preprocess_ms\t{:.3}", preprocess.as_secs_f64() * 1e3);
    println!("pairs_timed\t{done}");
    println!("dist_total_ms\t{:.3}", dist_time.as_secs_f64() * 1e3);
    println!(
        "dist_per_pair_us\t{:.3}",
        dist_time.as_secs_f64() * 1e6 / done as f64
    );
    println!("dist_checksum\t{checksum:.12e}");
    println!("gram_fill_ms\t{:.3}", gram_fill.as_secs_f64() * 1e3);
    // headline figure includes preprocessing, itemized above
    println!(
        "gram_total_ms\t{:.3}",
        (preprocess + gram_fill).as_secs_f64() * 1e3
    );
    println!("gram_checksum\t{:.12e}", gram.data().iter().sum::<f64>());
    Ok(0)
}
