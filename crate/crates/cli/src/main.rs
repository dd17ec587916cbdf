use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use monotree::corpus::{load_corpus, Problem};
use monotree::eval::{ablate, cross_validate, train_models, Ablation, EvalReport, PipelineConfig};
use monotree::infer::{parse_constraints, solve_table, tune_w_rel, Constraint, LearnedScorer, OracleScorer, Scorer};
use monotree::learn::{load_model, save_model};
use monotree::rational::to_decimal_string;
use monotree::schema::{analyze, SchemaDump};

const REL_MODEL: &str = "rel.model";
const PAIR_MODEL: &str = "pair.model";
const SETTINGS: &str = "settings.json";

#[derive(Parser)]
#[command(name = "monotree", version, about = "Solve arithmetic word problems with monotonic expression trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train both classifiers on a corpus and write them to --out.
    Train(Shared),
    /// Cross-validate over the corpus folds.
    Cv(Shared),
    /// Solve every record in --corpus with trained or oracle scores.
    Solve(SolveArgs),
    /// Cross-validate once per ablation row.
    Ablate(Shared),
    /// Print extracted quantity schemas.
    SchemaDump(Shared),
}

#[derive(Args, Clone)]
struct Shared {
    /// Newline-delimited JSON problem records.
    #[arg(long)]
    corpus: PathBuf,
    /// Beam width for inference.
    #[arg(long)]
    beam: Option<usize>,
    /// Comma-separated constraints (positive,integral), `all` or `none`.
    #[arg(long, conflicts_with = "no_constraints")]
    constraints: Option<String>,
    /// Same as `--constraints none`.
    #[arg(long)]
    no_constraints: bool,
    /// Relevance weight, or `tune` to pick it from the grid on training data.
    #[arg(long)]
    w_rel: Option<String>,
    /// Shuffling seed for training.
    #[arg(long)]
    seed: Option<u64>,
    /// Feature group or constraint row to drop; repeatable.
    #[arg(long)]
    drop: Vec<String>,
    /// Output directory for trained models.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Skip malformed records instead of failing.
    #[arg(long)]
    skip_invalid: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    shared: Shared,
    /// Directory written by `train`.
    #[arg(long, required_unless_present = "oracle")]
    model: Option<PathBuf>,
    /// Score with the gold tree instead of trained models.
    #[arg(long)]
    oracle: bool,
    /// Print the Rel/Pair score table.
    #[arg(long)]
    explain: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum WRel {
    Tune,
    Fixed(f64),
}

fn parse_w_rel(s: &str) -> Result<WRel> {
    if s == "tune" {
        return Ok(WRel::Tune);
    }
    let w: f64 = s.parse().with_context(|| format!("--w-rel expects a number or `tune`, got {s:?}"))?;
    if !w.is_finite() || w < 0.0 {
        bail!("--w-rel must be a finite non-negative number, got {s}");
    }
    Ok(WRel::Fixed(w))
}

impl Shared {
    fn problems(&self) -> Result<Vec<Problem>> {
        let corpus = load_corpus(&self.corpus, !self.skip_invalid)
            .with_context(|| format!("loading {}", self.corpus.display()))?;
        for e in &corpus.errors {
            eprintln!("skipping line {}: {}", e.line, e.error);
        }
        Ok(corpus.problems)
    }

    fn constraints(&self) -> Result<Option<BTreeSet<Constraint>>> {
        if self.no_constraints {
            return Ok(Some(BTreeSet::new()));
        }
        self.constraints.as_deref().map(parse_constraints).transpose().map_err(anyhow::Error::msg)
    }

    /// Applies the flags on top of `base`.
    fn config(&self, base: PipelineConfig) -> Result<PipelineConfig> {
        let mut c = base;
        if let Some(b) = self.beam {
            if b == 0 {
                bail!("--beam must be at least 1");
            }
            c.inference.beam_width = b;
        }
        if let Some(set) = self.constraints()? {
            c.inference.constraints = set;
        }
        match self.w_rel.as_deref().map(parse_w_rel).transpose()? {
            Some(WRel::Tune) => c.tune_w_rel = true,
            Some(WRel::Fixed(w)) => {
                c.tune_w_rel = false;
                c.inference.w_rel = w;
            }
            None => {}
        }
        if let Some(seed) = self.seed {
            c.trainer.seed = seed;
        }
        Ok(c)
    }

    fn ablations(&self) -> Result<Vec<Ablation>> {
        self.drop.iter().map(|d| d.parse::<Ablation>().map_err(Into::into)).collect()
    }
}

fn write_report<T: serde::Serialize>(path: Option<&Path>, report: &T) -> Result<()> {
    if let Some(path) = path {
        let json = serde_json::to_string_pretty(report)?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn metrics_header() -> &'static str {
    "row\trel_relax\trel_strict\tlca_relax\tlca_strict\tsolve"
}

fn metrics_line(r: &EvalReport) -> String {
    format!(
        "{}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
        r.dropped, r.relevance_relax, r.relevance_strict, r.lca_relax, r.lca_strict, r.solve_accuracy
    )
}

fn cmd_train(args: &Shared) -> Result<()> {
    let out = args.out.as_ref().context("train needs --out <dir>")?;
    let mut config = args.config(PipelineConfig::default())?;
    for a in args.ablations()? {
        config = a.apply(&config);
    }
    let problems = args.problems()?;
    let scorer = train_models(&problems, &config)?;
    if config.tune_w_rel {
        config.inference.w_rel = tune_w_rel(&problems, &scorer, &config.inference)?;
        config.tune_w_rel = false;
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match &scorer.rel {
        Some(m) => save_model(m, out.join(REL_MODEL))?,
        None => {
            let stale = out.join(REL_MODEL);
            if stale.exists() {
                fs::remove_file(stale)?;
            }
        }
    }
    save_model(&scorer.pair, out.join(PAIR_MODEL))?;
    fs::write(out.join(SETTINGS), serde_json::to_string_pretty(&config)? + "\n")?;
    println!(
        "trained on {} problems; w_rel={}; relevance model: {}; models in {}",
        problems.len(),
        config.inference.w_rel,
        if scorer.rel.is_some() { "yes" } else { "no (all quantities relevant)" },
        out.display()
    );
    Ok(())
}

fn cmd_cv(args: &Shared) -> Result<()> {
    let mut config = args.config(PipelineConfig::default())?;
    let rows = args.ablations()?;
    for a in &rows {
        config = a.apply(&config);
    }
    let mut report = cross_validate(&args.problems()?, &config)?;
    if !rows.is_empty() {
        report.dropped = rows.iter().map(ToString::to_string).collect::<Vec<_>>().join("+");
    }
    println!("{}", metrics_header());
    println!("{}", metrics_line(&report));
    for f in &report.folds {
        println!(
            "fold {}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\tw_rel={}",
            f.fold,
            f.metrics.relevance_relax,
            f.metrics.relevance_strict,
            f.metrics.lca_relax,
            f.metrics.lca_strict,
            f.metrics.solve_accuracy,
            f.w_rel
        );
    }
    write_report(args.report.as_deref(), &report)
}

fn cmd_ablate(args: &Shared) -> Result<()> {
    let config = args.config(PipelineConfig::default())?;
    let mut rows = args.ablations()?;
    if rows.is_empty() {
        rows = Ablation::all_rows();
    }
    let reports = ablate(&args.problems()?, &config, &rows)?;
    println!("{}", metrics_header());
    for r in &reports {
        println!("{}", metrics_line(r));
    }
    write_report(args.report.as_deref(), &reports)
}

fn load_scorer(dir: &Path) -> Result<(LearnedScorer, PipelineConfig)> {
    let settings =
        fs::read_to_string(dir.join(SETTINGS)).with_context(|| format!("reading {}", dir.join(SETTINGS).display()))?;
    let config: PipelineConfig = serde_json::from_str(&settings).context("parsing model settings")?;
    let rel_path = dir.join(REL_MODEL);
    let rel = if rel_path.exists() {
        Some(load_model(&rel_path).with_context(|| format!("loading {}", rel_path.display()))?)
    } else {
        None
    };
    let pair_path = dir.join(PAIR_MODEL);
    let pair = load_model(&pair_path).with_context(|| format!("loading {}", pair_path.display()))?;
    Ok((LearnedScorer { rel, pair, features: config.features.clone() }, config))
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let (scorer, base): (Box<dyn Scorer>, PipelineConfig) = if args.oracle {
        (Box::new(OracleScorer), PipelineConfig::default())
    } else {
        let dir = args.model.as_ref().context("solve needs --model <dir> or --oracle")?;
        let (s, c) = load_scorer(dir)?;
        (Box::new(s), c)
    };
    let shared = &args.shared;
    if shared.w_rel.as_deref() == Some("tune") {
        bail!("solve takes a fixed --w-rel; tuning happens in `train`");
    }
    let config = shared.config(base)?;
    let problems = shared.problems()?;
    if problems.is_empty() {
        bail!("no problems in {}", shared.corpus.display());
    }
    let mut out = io::stdout().lock();
    for p in &problems {
        let table = scorer.table(p).with_context(|| format!("scoring {}", p.id))?;
        let sol = solve_table(p, &table, &config.inference).with_context(|| format!("solving {}", p.id))?;
        let infix = sol.tree.to_infix_with(&|i| p.quantity_text(i));
        writeln!(out, "{}\t{}\t{} = {}", p.id, sol.tree, infix, to_decimal_string(&sol.value))?;
        if args.explain {
            let verdict = if sol.satisfied { "satisfied" } else { "violated" };
            writeln!(out, "score {:.4}; beam rank {}; constraints {verdict}", sol.score, sol.rank)?;
            write!(out, "{table}")?;
        }
    }
    Ok(())
}

fn cmd_schema_dump(args: &Shared) -> Result<()> {
    let mut out = io::stdout().lock();
    for p in &args.problems()? {
        let analysis = analyze(p).with_context(|| format!("analyzing {}", p.id))?;
        write!(out, "{}", SchemaDump { problem: p, analysis: &analysis })?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::SchemaDump(a) => cmd_schema_dump(a),
    };
    // A closed pipe (`| head`) is not a failure.
    match result {
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => Ok(()),
        r => r,
    }
}
