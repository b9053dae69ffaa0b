//! Batch driver: generate instances, check labelings, reduce to hypergraphs,
//! analyze colorings, solve hypergraphs, evaluate parameters, and run the
//! whole verification suite.
//!
//! Every command is deterministic given its flags and seed; derived files
//! embed the content hash of their inputs. Exit codes: 0 success, 1 violated
//! invariant or bad input, 2 usage errors and size limits.

use crate::exact::{rat_int, rat_to_f64};
use crate::files::{
    sha256_hex, ColoringFile, HypergraphFile, InstanceFile, OracleFile, ParamFile,
    ThetaReportFile,
};
use crate::folding::{check_folding_support, FoldedColoring, Mode};
use crate::label_cover::{
    compute_parameters, generate_yes_instance, verify_labeling, GenParams, LabelCoverInstance,
    PlantedLabeling,
};
use crate::oracle::{covering_number, max_independent_set, q_coloring, OracleInput};
use crate::soundness::decompose_theta;
use crate::verifier::{build_hypergraph, completeness_check, honest_coloring, BuildLimits};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "quadfold", version, about = "Folded quadratic-code tests and hypergraph reductions over GF(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a satisfiable instance with its planted labeling.
    GenYes(GenYesArgs),
    /// Verify the planted labeling and constraints of an instance file.
    Check(CheckArgs),
    /// Materialize the test hypergraph of an instance.
    Reduce(ReduceArgs),
    /// Emit a coloring file (honest, honest class, or random folded).
    Color(ColorArgs),
    /// Exact decomposition and bound checks for a coloring.
    Analyze(AnalyzeArgs),
    /// Brute-force solve a hypergraph file.
    Solve(SolveArgs),
    /// Evaluate the large-parameter relations.
    Params(ParamsArgs),
    /// Run the full verification suite and print one line per criterion.
    RunAll(RunAllArgs),
}

fn resolve(out_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir.join(path)
    }
}

#[derive(Args, Debug)]
pub struct GenYesArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 3)]
    pub n_u: usize,
    #[arg(long, default_value_t = 3)]
    pub n_v: usize,
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    #[arg(long, default_value_t = 1)]
    pub constraints: usize,
    /// Declared rank bound carried as metadata.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Declared soundness value, as log2.
    #[arg(long, default_value_t = -4.0)]
    pub delta_log2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "instance.json")]
    pub out: PathBuf,
    /// Default directory for relative output paths.
    #[arg(long, env = "QUADFOLD_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Also verify exact acceptance of the honest coloring in this mode.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "28")]
    pub mode: Mode,
    #[arg(long, default_value = "hypergraph.json")]
    pub out: PathBuf,
    #[arg(long, env = "QUADFOLD_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Cap on candidate edge enumeration.
    #[arg(long, default_value_t = 20_000_000)]
    pub max_edges: u64,
    /// Seed recorded in provenance (reduction itself is deterministic).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ColorArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "28")]
    pub mode: Mode,
    /// honest | honest-class-<c> | random
    #[arg(long, default_value = "honest")]
    pub kind: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "coloring.json")]
    pub out: PathBuf,
    #[arg(long, env = "QUADFOLD_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub coloring: PathBuf,
    /// Rank threshold for the decomposition.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[arg(long, env = "QUADFOLD_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub hypergraph: PathBuf,
    /// Cap for the exact independent-set search.
    #[arg(long, default_value_t = 60)]
    pub max_is: usize,
    /// Skip the independent-set search (colorability and covering only).
    #[arg(long, default_value_t = false)]
    pub skip_is: bool,
    #[arg(long, default_value = "oracle.json")]
    pub out: PathBuf,
    #[arg(long, env = "QUADFOLD_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    /// log2 of the outer instance size bound.
    #[arg(long)]
    pub log2_n: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "QUADFOLD_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct RunAllArgs {
    /// Abbreviated run: fewer seeds and colorings per criterion.
    #[arg(long, default_value_t = false)]
    pub quick: bool,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "28" => Ok(Mode::EightQuery),
        "44" => Ok(Mode::FourQuery),
        other => Err(format!("mode must be 28 or 44, got {other}")),
    }
}

fn load_instance(path: &Path) -> Result<(LabelCoverInstance, Option<PlantedLabeling>, String)> {
    let file = InstanceFile::load(path)?;
    let hash = file.content_hash()?;
    let (inst, planted) = file.into_model()?;
    Ok((inst, planted, hash))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenYes(args) => cmd_gen_yes(args),
        Command::Check(args) => cmd_check(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Color(args) => cmd_color(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Params(args) => cmd_params(args),
        Command::RunAll(args) => cmd_run_all(args),
    }
}

fn cmd_gen_yes(args: GenYesArgs) -> Result<()> {
    let params = GenParams {
        m: args.m,
        r: args.r,
        n_u: args.n_u,
        n_v: args.n_v,
        degree: args.degree,
        constraints_per_v: args.constraints,
        k: args.k,
        delta_log2: args.delta_log2,
        seed: args.seed,
    };
    let (inst, lab) = generate_yes_instance(&params)?;
    let report = verify_labeling(&inst, &lab)?;
    if !report.all_ok() {
        return Err(Error::Invariant("generated instance failed self-check".into()));
    }
    let path = resolve(&args.out_dir, &args.out);
    InstanceFile::from_model(&inst, Some(&lab)).save(&path)?;
    println!(
        "wrote {} ({} edges, coset counts {:?})",
        path.display(),
        inst.edges().len(),
        (0..inst.n_v()).map(|v| inst.folding_space(v).coset_count()).collect::<Vec<_>>()
    );
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<()> {
    let (inst, planted, _) = load_instance(&args.instance)?;
    let lab = planted.ok_or_else(|| Error::InvalidLabeling("no planted labeling in file".into()))?;
    let report = verify_labeling(&inst, &lab)?;
    println!("satisfied fraction: {}", report.satisfied_fraction);
    println!("last-coordinate violations: {:?}", report.last_coord_violations);
    println!("constraint violations: {:?}", report.constraint_violations);
    if !report.all_ok() {
        return Err(Error::InvalidLabeling("planted labeling does not satisfy the instance".into()));
    }
    if let Some(mode) = args.mode {
        let acceptance = completeness_check(&inst, &lab, mode)?;
        println!("honest acceptance probability ({}): {}", mode.code(), acceptance);
        if acceptance != rat_int(1) {
            return Err(Error::Invariant("honest coloring does not accept with probability 1".into()));
        }
    }
    println!("ok");
    Ok(())
}

fn cmd_reduce(args: ReduceArgs) -> Result<()> {
    let (inst, _, hash) = load_instance(&args.instance)?;
    let limits = BuildLimits { max_edge_candidates: args.max_edges };
    let h = build_hypergraph(&inst, args.mode, &limits)?;
    let path = resolve(&args.out_dir, &args.out);
    HypergraphFile::from_model(&h, hash, args.seed).save(&path)?;
    println!(
        "wrote {} (n={}, edges={}, collapsed={})",
        path.display(),
        h.n(),
        h.edges().len(),
        h.collapsed()
    );
    Ok(())
}

fn cmd_color(args: ColorArgs) -> Result<()> {
    let (inst, planted, _) = load_instance(&args.instance)?;
    let col = match args.kind.as_str() {
        "honest" => {
            let lab = planted
                .ok_or_else(|| Error::InvalidLabeling("no planted labeling in file".into()))?;
            honest_coloring(&inst, &lab, args.mode)
        }
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            FoldedColoring::random(args.mode, inst.folding_spaces(), &mut rng)
        }
        kind if kind.starts_with("honest-class-") => {
            let class: u8 = kind["honest-class-".len()..]
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad kind {kind}")))?;
            if class as usize >= args.mode.colors() {
                return Err(Error::InvalidParameter(format!("class {class} out of range")));
            }
            let lab = planted
                .ok_or_else(|| Error::InvalidLabeling("no planted labeling in file".into()))?;
            honest_coloring(&inst, &lab, args.mode).class_indicator(class)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "kind must be honest, honest-class-<c>, or random; got {other}"
            )))
        }
    };
    let path = resolve(&args.out_dir, &args.out);
    ColoringFile::from_model(&col).save(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let (inst, _, hash) = load_instance(&args.instance)?;
    let col = ColoringFile::load(&args.coloring)?.into_model(&inst)?;
    if col.mode() != Mode::EightQuery {
        return Err(Error::InvalidParameter(
            "analysis applies to 8-query (mode 28) indicator colorings".into(),
        ));
    }
    // Folding support first: a corrupted table is a hard failure.
    for v in 0..inst.n_v() {
        let table = col.extension_table(v, inst.folding_space(v))?;
        if !check_folding_support(&table, inst.folding_space(v))? {
            return Err(Error::Invariant(format!(
                "coloring at vertex {v} has spectrum outside the admissible space"
            )));
        }
    }
    let report = decompose_theta(&inst, &col, args.k)?;
    let path = resolve(&args.out_dir, &args.out);
    ThetaReportFile::from_model(&report, hash).save(&path)?;
    println!("theta  = {}", report.theta_direct);
    println!("theta0 = {}", report.theta0);
    println!("theta1 = {}", report.theta1);
    println!("theta2 = {}", report.theta2);
    println!("s      = {} ({:.6})", report.s, rat_to_f64(&report.s));
    println!("wrote {}", path.display());
    if !report.all_asserted_checks_pass() {
        return Err(Error::Invariant("an asserted decomposition check failed".into()));
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let bytes = std::fs::read(&args.hypergraph)?;
    let hash = sha256_hex(&bytes);
    let file: HypergraphFile = serde_json::from_slice(&bytes)?;
    let input = OracleInput::new(file.n, file.edges.clone());
    let mut out = OracleFile::new(hash);
    if !args.skip_is {
        match max_independent_set(&input, args.max_is) {
            Ok(result) => {
                println!("max independent set: {}", result.size);
                out.set_max_is(&result);
            }
            Err(Error::TooLarge(msg)) => println!("independent set skipped: {msg}"),
            Err(e) => return Err(e),
        }
    }
    for q in [2u8, 3, 4] {
        let witness = q_coloring(&input, q);
        println!("{q}-colorable: {}", witness.is_some());
        out.set_colorable(q, witness);
    }
    match covering_number(&input, 4) {
        Ok(cover) => {
            println!("covering number: {}", cover.number);
            out.set_covering(&cover);
        }
        Err(Error::Invariant(msg)) => return Err(Error::Invariant(msg)),
        Err(Error::TooLarge(msg)) => println!("covering skipped: {msg}"),
        Err(e) => return Err(e),
    }
    let path = resolve(&args.out_dir, &args.out);
    out.save(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_params(args: ParamsArgs) -> Result<()> {
    let table = compute_parameters(args.log2_n, args.epsilon)?;
    println!("k            = {:.6}", table.k);
    println!("log2 delta   = {:.6}", table.delta_log2);
    println!("m bound      = {:.6e}", table.m_bound);
    println!("log2 n bound = {:.6e}", table.n_bound_log2);
    println!("log2 s bound = {:.6}", table.s_bound_log2);
    println!("advisory delta bound met: {}", table.advisory_delta_ok);
    println!("advisory k bound met:     {}", table.advisory_k_ok);
    println!("soundness chain consistent at this size: {}", table.lemma_consistency_ok);
    if let Some(out) = args.out {
        let path = resolve(&args.out_dir, &out);
        ParamFile::new(table).save(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_run_all(args: RunAllArgs) -> Result<()> {
    let outcomes = crate::acceptance::run_all(args.quick);
    let mut failed = 0;
    for outcome in &outcomes {
        println!(
            "{} {}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.id,
            outcome.detail
        );
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Error::Invariant(format!("{failed} criteria failed")));
    }
    println!("all {} criteria passed", outcomes.len());
    Ok(())
}
