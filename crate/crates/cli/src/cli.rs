//! The `matchwidth` command line.
//!
//! Exit codes: 0 success (and "found"), 1 "not-found", 2 bad input, 3 an
//! internal consistency failure such as a non-integral subgraph count.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use matchwidth_core::decomp::{exact_mtd, exact_mtw, exact_td};
use matchwidth_core::induced::{recipe_for, run_trial, DEFAULT_SEED, DEFAULT_TRIALS};
use matchwidth_core::named::{make_pattern, PatternName};
use matchwidth_core::patterns::{combine, count_homs, plan_from_terms, Mode};
use matchwidth_core::spasm::{
    attach_decompositions, describe, spasm_with_coefficients, WitnessMode,
};
use matchwidth_core::{Error, Graph};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::cache::SpasmCache;
use crate::edgelist::{load_edge_list, write_edge_list};
use crate::textfmt::{write_elim_tree, write_matched_td};
use crate::InputError;

#[derive(Parser, Debug)]
#[command(
    name = "matchwidth",
    version,
    about = "Pattern counting and induced-pattern detection on sparse graphs"
)]
pub struct Cli {
    /// Worker threads; defaults to the available cores. Never changes output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ConstSpace,
    PolySpace,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::ConstSpace => Mode::ConstantSpace,
            ModeArg::PolySpace => Mode::PolySpace,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Param {
    Mtd,
    Mtw,
    Td,
}

#[derive(clap::Args, Debug)]
pub struct CountArgs {
    /// Pattern name (`cycle:5`, `named:X`, ...) or edge-list file.
    #[arg(long)]
    pub pattern: String,
    /// Host edge-list file.
    #[arg(long)]
    pub host: PathBuf,
    #[arg(long, value_enum, default_value = "poly-space")]
    pub mode: ModeArg,
    /// Spasm cache to read terms from and store new ones in.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Print the plan to stderr.
    #[arg(long)]
    pub show_plan: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of subgraphs of the host isomorphic to the pattern.
    CountSub(CountArgs),
    /// Number of homomorphisms from the pattern to the host.
    CountHom(CountArgs),
    /// Randomized test for an induced copy of `c6` or `pbar:<k>`.
    DetectInduced {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Integer seed, or `random`.
        #[arg(long)]
        seed: Option<String>,
    },
    /// Spasm of a pattern with coefficients, optionally with witnesses.
    Spasm {
        #[arg(long)]
        pattern: String,
        /// `mtd:<depth>` or `mtw:<width>`.
        #[arg(long)]
        attach: Option<String>,
        /// Write the terms to this cache file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact structural parameter with a witness.
    Analyze {
        #[arg(long)]
        graph: String,
        #[arg(long, value_enum)]
        param: Param,
    },
    /// Random host generator for tests.
    #[command(hide = true)]
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plant a copy of this pattern on random vertices.
        #[arg(long)]
        plant: Option<String>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Consistency(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(_) => Failure::Consistency(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Pattern name, or a path to an edge-list file.
pub fn resolve_graph(spec: &str) -> Result<Graph, InputError> {
    match spec.parse::<PatternName>() {
        Ok(name) => make_pattern(&name).map_err(|e| InputError::Graph(e.to_string())),
        Err(_) if Path::new(spec).is_file() => Ok(load_edge_list(Path::new(spec))?.graph),
        Err(_) => Err(InputError::Graph(format!(
            "{spec:?} is neither a pattern name nor a readable file"
        ))),
    }
}

fn load_host(path: &Path) -> Result<Graph, InputError> {
    Ok(load_edge_list(path)?.graph)
}

fn parse_seed(s: Option<&str>, err: &mut dyn Write) -> Result<u64, Failure> {
    match s {
        None => Ok(DEFAULT_SEED),
        Some("random") => {
            let seed = rand::rng().random();
            let _ = writeln!(err, "seed {seed}");
            Ok(seed)
        }
        Some(t) => t
            .parse()
            .map_err(|_| Failure::Input(format!("bad seed {t:?}"))),
    }
}

fn count_sub(a: &CountArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let pattern = resolve_graph(&a.pattern)?;
    let host = load_host(&a.host)?;
    let mut cache = match &a.cache {
        Some(p) if p.exists() => Some(SpasmCache::load(p)?),
        Some(_) => Some(SpasmCache::new()),
        None => None,
    };
    let terms = match cache.as_ref().and_then(|c| c.get(&a.pattern)) {
        Some(t) => t.clone(),
        None => spasm_with_coefficients(&pattern)?,
    };
    let plan = plan_from_terms(&pattern, terms, a.mode.into())?;
    if a.show_plan {
        let _ = write!(err, "{}", plan.summary());
    }
    if let (Some(c), Some(path)) = (cache.as_mut(), &a.cache) {
        if c.get(&a.pattern).is_none_or(|t| {
            t.len() != plan.terms.len() || plan.terms.iter().zip(t).any(|(p, t)| p.term != *t)
        }) {
            c.insert(
                &a.pattern,
                plan.terms.iter().map(|t| t.term.clone()).collect(),
            );
            c.save(path)?;
        }
    }
    let homs = plan
        .terms
        .par_iter()
        .map(|t| t.hom_count(&host))
        .collect::<Result<Vec<_>, _>>()?;
    let n = combine(&plan, &homs)?;
    let _ = writeln!(out, "{n}");
    Ok(0)
}

fn count_hom(a: &CountArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let pattern = resolve_graph(&a.pattern)?;
    let host = load_host(&a.host)?;
    let n = count_homs(&pattern, &host, a.mode.into())?;
    let _ = writeln!(out, "{n}");
    Ok(0)
}

fn spasm(
    pattern: &str,
    attach: Option<&str>,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = resolve_graph(pattern)?;
    let mut terms = spasm_with_coefficients(&g)?;
    if let Some(spec) = attach {
        let bad = || Failure::Input(format!("--attach expects mtd:<d> or mtw:<w>, got {spec:?}"));
        let (kind, budget) = spec.split_once(':').ok_or_else(bad)?;
        let budget: usize = budget.parse().map_err(|_| bad())?;
        let mode = match kind {
            "mtd" => WitnessMode::Mtd,
            "mtw" => WitnessMode::Mtw,
            _ => return Err(bad()),
        };
        terms = attach_decompositions(terms, mode, budget)?;
    }
    let _ = writeln!(out, "pattern {pattern} terms={}", terms.len());
    for t in &terms {
        let _ = write!(
            out,
            "{} coeff {}/{}",
            describe(&t.quotient),
            t.coefficient.numer(),
            t.coefficient.denom()
        );
        if let Some(w) = &t.mtd {
            let _ = write!(out, " mtd={}", w.depth());
        }
        if let Some(w) = &t.mtw {
            let _ = write!(out, " mtw={}", w.width());
        }
        let _ = writeln!(out);
    }
    if let Some(path) = path {
        let mut c = if path.exists() {
            SpasmCache::load(path)?
        } else {
            SpasmCache::new()
        };
        c.insert(pattern, terms);
        c.save(path)?;
    }
    Ok(0)
}

fn analyze(graph: &str, param: Param, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = resolve_graph(graph)?;
    let n = g.vertex_count();
    match param {
        Param::Td => {
            let (d, t) = exact_td(&g)?;
            let _ = write!(out, "{d}\n{}", write_elim_tree(&t));
        }
        Param::Mtd => {
            let (d, t) = exact_mtd(&g, n)?
                .ok_or_else(|| Failure::Input("no matched elimination tree".into()))?;
            let _ = write!(out, "{d}\n{}", write_elim_tree(t.tree()));
        }
        Param::Mtw => {
            let (w, d) = exact_mtw(&g, n)?
                .ok_or_else(|| Failure::Input("no matched tree decomposition".into()))?;
            let _ = write!(out, "{w}\n{}", write_matched_td(n, &d));
        }
    }
    Ok(0)
}

fn detect(
    pattern: &str,
    host: &Path,
    trials: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let recipe = recipe_for(pattern)?.with_trials(trials).with_seed(seed);
    let h = load_host(host)?;
    let found = (0..trials as u64)
        .into_par_iter()
        .any(|t| run_trial(&recipe, &h, t));
    let _ = writeln!(out, "{}", if found { "found" } else { "not-found" });
    Ok(if found { 0 } else { 1 })
}

/// Uniform random graph with `m` distinct edges, plus an optional planted
/// pattern copy.
pub fn generate(n: usize, m: usize, seed: u64, plant: Option<&Graph>) -> Result<Graph, InputError> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return Err(InputError::Graph(format!(
            "{m} edges do not fit on {n} vertices"
        )));
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut set = std::collections::BTreeSet::new();
    if let Some(p) = plant {
        if p.vertex_count() > n {
            return Err(InputError::Graph("planted pattern larger than host".into()));
        }
        let mut slots: Vec<usize> = (0..n).collect();
        for i in 0..p.vertex_count() {
            let j = rng.random_range(i..n);
            slots.swap(i, j);
        }
        for (u, v) in p.edges() {
            let (a, b) = (slots[u], slots[v]);
            set.insert((a.min(b), a.max(b)));
        }
    }
    while set.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    let edges: Vec<_> = set.into_iter().collect();
    Graph::from_edges(n, &edges).map_err(|e| InputError::Graph(e.to_string()))
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::CountSub(a) => count_sub(&a, out, err),
        Command::CountHom(a) => count_hom(&a, out),
        Command::DetectInduced {
            pattern,
            host,
            trials,
            seed,
        } => {
            let seed = parse_seed(seed.as_deref(), err)?;
            detect(&pattern, &host, trials, seed, out)
        }
        Command::Spasm {
            pattern,
            attach,
            out: path,
        } => spasm(&pattern, attach.as_deref(), path.as_deref(), out),
        Command::Analyze { graph, param } => analyze(&graph, param, out),
        Command::Gen { n, m, seed, plant } => {
            let p = plant.as_deref().map(resolve_graph).transpose()?;
            let g = generate(n, m, seed, p.as_ref())?;
            let _ = write!(out, "{}", write_edge_list(&g, &[]));
            Ok(0)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Diagnostics go to `err`, one line each.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    // Buffered so the work can move onto the pool's threads.
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let result = pool.install(|| dispatch(cli, &mut o, &mut e));
    let _ = out.write_all(&o);
    let _ = err.write_all(&e);
    match result {
        Ok(code) => code,
        Err(Failure::Input(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Consistency(m)) => {
            let _ = writeln!(err, "internal error: {m}");
            3
        }
    }
}
