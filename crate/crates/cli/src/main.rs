mod config;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use teaming_core::evaluation::{award_match_lists, awards_as_calls, feedback_summary, hit_rate_at_k, FeedbackEvent};
use teaming_core::ingest::DesignationFilter;
use teaming_core::matching::{build_corpus_model, top_k_calls, Matcher};
use teaming_core::pipeline::{ingest_corpus, run_pipeline, Corpus, IngestedCorpus, PipelineRun, PipelineSettings};
use teaming_core::taxonomy::{load_taxonomy, map_text, Taxonomy};
use teaming_core::team::TeamRecommendation;
use teaming_core::Embeddings;
use teaming_service::{admin, AppState, CorpusPaths, ServiceSettings, SystemClock};
use teaming_store::Store;

use config::FileConfig;

#[derive(Debug, Parser)]
#[command(name = "teaming", version, about = "Match researchers to funding calls and propose teams")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse the corpus and print extraction coverage.
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Also load the parsed records into this store.
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Rank calls for each researcher.
    Match {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum, default_value_t = StrategyArg::Vector)]
        strategy: StrategyArg,
        /// Vector file keyed by call id and user id; implies the vector strategy.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Only this username.
        #[arg(long)]
        user: Option<String>,
        /// Calls per researcher; defaults to the configured k.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Propose teams with each researcher as lead.
    Recommend {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        user: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Hit rate of award rankings against actual awards, plus a feedback summary.
    Evaluate {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// JSON-lines feedback events.
        #[arg(long)]
        feedback: Option<PathBuf>,
        #[arg(long, default_value_t = teaming_core::evaluation::DEFAULT_RATING_THRESHOLD)]
        threshold: u8,
        #[arg(long)]
        json: bool,
    },
    /// Map text on standard input to classification codes.
    Map {
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=100))]
        threshold: u8,
        /// Tab-separated `code<TAB>term` file; defaults to the bundled sample.
        #[arg(long)]
        taxonomy: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        addr: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Fuzzy,
    Vector,
}

#[derive(Debug, Clone, Args)]
struct CorpusArgs {
    #[arg(long)]
    calls: Option<PathBuf>,
    #[arg(long)]
    roster: Option<PathBuf>,
    #[arg(long)]
    awards: Option<PathBuf>,
    /// Calls whose last deadline is before this date are closed; defaults to today.
    #[arg(long)]
    reference_date: Option<NaiveDate>,
}

/// Flags merged over the config file.
struct Resolved {
    file: FileConfig,
    calls: Option<PathBuf>,
    roster: Option<PathBuf>,
    awards: Option<PathBuf>,
    reference_date: NaiveDate,
}

impl Resolved {
    fn new(file: FileConfig, args: &CorpusArgs) -> Self {
        Resolved {
            calls: args.calls.clone().or_else(|| file.corpus.calls.clone()),
            roster: args.roster.clone().or_else(|| file.corpus.roster.clone()),
            awards: args.awards.clone().or_else(|| file.corpus.awards.clone()),
            reference_date: args
                .reference_date
                .or(file.reference_date)
                .unwrap_or_else(|| chrono::Utc::now().date_naive()),
            file,
        }
    }

    fn designations(&self) -> DesignationFilter {
        match &self.file.designations {
            Some(terms) => DesignationFilter::new(terms),
            None => DesignationFilter::default(),
        }
    }

    fn settings(&self) -> PipelineSettings {
        PipelineSettings {
            reference_date: self.reference_date,
            config: self.file.teaming.clone(),
            designations: self.designations(),
        }
    }

    fn corpus(&self) -> Result<Corpus> {
        let calls = self.calls.as_deref().context("no calls file (--calls or [corpus] calls)")?;
        let roster = self.roster.as_deref().context("no roster file (--roster or [corpus] roster)")?;
        Ok(Corpus { calls: read(calls)?, roster: read(roster)?, awards: self.awards.as_deref().map(read).transpose()? })
    }

    fn ingest(&self) -> Result<IngestedCorpus> {
        Ok(ingest_corpus(&self.corpus()?, &self.settings())?)
    }

    fn run(&self) -> Result<PipelineRun> {
        Ok(run_pipeline(&self.corpus()?, &self.settings())?)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Ingest { corpus, store, json } => ingest(Resolved::new(file, &corpus), store, json),
        Command::Match { corpus, strategy, embeddings, user, k, json } => {
            run_match(Resolved::new(file, &corpus), strategy, embeddings, user, k, json)
        }
        Command::Recommend { corpus, user, json } => recommend(Resolved::new(file, &corpus), user, json),
        Command::Evaluate { corpus, k, feedback, threshold, json } => {
            evaluate(Resolved::new(file, &corpus), k, feedback, threshold, json)
        }
        Command::Map { threshold, taxonomy } => map(threshold, taxonomy),
        Command::Serve { corpus, store, addr } => serve(Resolved::new(file, &corpus), store, addr),
    }
}

fn service_state(resolved: &Resolved, store: &Path) -> Result<AppState> {
    let store = Store::open(store).with_context(|| format!("opening store {}", store.display()))?;
    let settings = ServiceSettings {
        teaming: resolved.file.teaming.clone(),
        corpus: CorpusPaths {
            calls: resolved.calls.clone().unwrap_or_default(),
            roster: resolved.roster.clone().unwrap_or_default(),
            awards: resolved.awards.clone(),
        },
        designations: resolved.file.designations.clone(),
    };
    Ok(AppState::new(store, settings, SystemClock))
}

fn ingest(resolved: Resolved, store: Option<PathBuf>, json: bool) -> Result<()> {
    let ingested = resolved.ingest()?;
    if let Some(root) = store {
        let state = service_state(&resolved, &root)?.with_clock(teaming_service::FixedClock(
            resolved.reference_date.and_hms_opt(0, 0, 0).expect("midnight").and_utc(),
        ));
        admin::run_ingest(&state).map_err(|e| anyhow::anyhow!("{}: {}", e.body.code, e.body.message))?;
        let reindex = admin::run_reindex(&state).map_err(|e| anyhow::anyhow!("{}: {}", e.body.code, e.body.message))?;
        eprintln!("stored {} calls, {} users, {} teams in {}", ingested.calls.len(), ingested.profiles.len(), reindex.teams, root.display());
    }
    if json {
        return print_json(&serde_json::json!({"stats": ingested.stats, "diagnostics": ingested.diagnostics}));
    }
    print!("{}", ingested.stats);
    for line in &ingested.diagnostics {
        eprintln!("{line}");
    }
    Ok(())
}

fn run_match(
    resolved: Resolved,
    strategy: StrategyArg,
    embeddings: Option<PathBuf>,
    user: Option<String>,
    k: Option<usize>,
    json: bool,
) -> Result<()> {
    let ingested = resolved.ingest()?;
    let config = &resolved.file.teaming;
    let k = k.unwrap_or(config.k);
    let table;
    let model;
    let matcher = match (embeddings, strategy) {
        (Some(path), _) => {
            table = Embeddings::parse(&read(&path)?)?;
            Matcher::Embeddings(&table)
        }
        (None, StrategyArg::Vector) => {
            let synopses: Vec<&str> = ingested.calls.iter().map(|c| c.synopsis.as_str()).collect();
            model = build_corpus_model(&synopses)?;
            Matcher::Corpus(&model)
        }
        (None, StrategyArg::Fuzzy) => Matcher::Fuzzy,
    };
    let profiles: Vec<_> = ingested
        .profiles
        .iter()
        .filter(|p| user.as_deref().is_none_or(|u| p.username == u))
        .filter(|p| p.is_matchable())
        .collect();
    if let (Some(u), true) = (&user, profiles.is_empty()) {
        bail!("no matchable researcher named {u}");
    }
    let mut lists = BTreeMap::new();
    for p in profiles {
        lists.insert(p.username.clone(), top_k_calls(p, &ingested.calls, &matcher, k, config.relevance_floor)?);
    }
    if json {
        return print_json(&lists);
    }
    println!("{:<16} {:>4} {:<20} {:>5}", "user", "rank", "call", "score");
    for (username, list) in &lists {
        for (i, entry) in list.entries.iter().enumerate() {
            println!("{:<16} {:>4} {:<20} {:>5}", username, i + 1, entry.call_id, entry.score);
        }
    }
    Ok(())
}

fn recommend(resolved: Resolved, user: Option<String>, json: bool) -> Result<()> {
    let run = resolved.run()?;
    let user_id = match &user {
        Some(name) => Some(
            run.profiles
                .iter()
                .find(|p| &p.username == name)
                .with_context(|| format!("no researcher named {name}"))?
                .user_id
                .clone(),
        ),
        None => None,
    };
    let teams: Vec<&TeamRecommendation> =
        run.recommendations.iter().filter(|t| user_id.as_deref().is_none_or(|u| t.lead == u)).collect();
    if json {
        return print_json(&teams);
    }
    let names: BTreeMap<&str, &str> = run.profiles.iter().map(|p| (p.user_id.as_str(), p.username.as_str())).collect();
    let name = |id: &str| names.get(id).copied().unwrap_or("?").to_string();
    println!("{:<20} {:<12} {:<40} {:>12} {:>12}", "call", "lead", "members", "budget", "per member");
    for t in teams {
        let members: Vec<String> = std::iter::once(&t.lead_score)
            .chain(&t.members)
            .map(|m| format!("{}({})", name(&m.user_id), m.score))
            .collect();
        let money = |m: Option<teaming_core::Money>| m.map_or_else(|| "-".to_string(), |m| m.to_string());
        println!(
            "{:<20} {:<12} {:<40} {:>12} {:>12}",
            t.call_id,
            name(&t.lead),
            members.join(" "),
            money(t.proposed_budget),
            money(t.per_member_allocation)
        );
    }
    Ok(())
}

fn evaluate(resolved: Resolved, k: usize, feedback: Option<PathBuf>, threshold: u8, json: bool) -> Result<()> {
    let ingested = resolved.ingest()?;
    if ingested.awards.is_empty() {
        bail!("no awards to evaluate against (--awards or [corpus] awards)");
    }
    let texts: Vec<String> = awards_as_calls(&ingested.awards).into_iter().map(|c| c.synopsis).collect();
    let model = build_corpus_model(&texts)?;
    let lists = award_match_lists(&ingested.profiles, &ingested.awards, &Matcher::<f64>::Corpus(&model))?;
    let report = hit_rate_at_k(&lists, &ingested.awards, k);

    let summary = match feedback {
        Some(path) => {
            let text = read(&path)?;
            let events = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| {
                    serde_json::from_str::<FeedbackEvent>(l).with_context(|| format!("{}:{}", path.display(), i + 1))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(feedback_summary(&events, threshold))
        }
        None => None,
    };
    if json {
        return print_json(&serde_json::json!({"awards": report, "feedback": summary}));
    }
    print!("{report}");
    if let Some(s) = summary {
        println!("feedback: {} of {} ratings at or above {}", s.at_or_above, s.total, s.threshold);
    }
    Ok(())
}

fn map(threshold: u8, taxonomy: Option<PathBuf>) -> Result<()> {
    let taxonomy = match taxonomy {
        Some(path) => {
            let name = path.file_stem().map_or_else(|| "taxonomy".into(), |s| s.to_string_lossy().into_owned());
            load_taxonomy(&name, &read(&path)?)?
        }
        None => Taxonomy::bundled_sample(),
    };
    let mut text = String::new();
    std::io::stdin().read_to_string(&mut text).context("reading standard input")?;
    println!("{:<10} {:>5}  term", "code", "score");
    for m in map_text(&text, threshold, &taxonomy) {
        println!("{:<10} {:>5}  {}", m.code, m.score, m.term);
    }
    Ok(())
}

fn serve(resolved: Resolved, store: Option<PathBuf>, addr: Option<String>) -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let store = store.or_else(|| resolved.file.serve.store.clone()).context("no store directory (--store or [serve] store)")?;
    let addr = addr.or_else(|| resolved.file.serve.addr.clone()).unwrap_or_else(|| "127.0.0.1:8080".into());
    let state = service_state(&resolved, &store)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("binding {addr}"))?;
        teaming_service::serve(listener, state).await?;
        Ok(())
    })
}
