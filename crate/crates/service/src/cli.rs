//! The `framechat` command line.

use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use framechat_core::engine::{Engine, EngineConfig};
use framechat_core::pack::{check_pack, load_pack, shipped_pack, LoadedPack, SHIPPED_PACK_NAME};
use framechat_core::qa::{answer_or_delegate, AnswerProvider, NoProvider, TableLookupProvider};
use framechat_core::script::{has_errors, parse_script_set, validate};
use framechat_core::store::{
    compute_stats, context_graph, dot, edge_list, load_transcript_dir, read_jsonl_file, replay_transcript,
    InteractionRecord, ReplayReport, TranscriptStore,
};

use crate::api::{router, AppState, ServedPack};

#[derive(Debug, Parser)]
#[command(name = "framechat", version, about = "Context-script chatbot: chat, check scripts, serve the HTTP API")]
pub struct Cli {
    /// Pack directory or manifest; the built-in pack when omitted.
    #[arg(long, global = true)]
    pub pack: Option<String>,
    /// Address for `serve`.
    #[arg(long, global = true, default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    /// Directory to append interaction records to.
    #[arg(long, global = true)]
    pub transcripts: Option<PathBuf>,
    /// `question<TAB>answer` table consulted before the script engine.
    #[arg(long, global = true)]
    pub qa_table: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interactive session on stdin/stdout. A trace line per turn goes to stderr.
    Chat {
        pack: Option<String>,
        /// Suppress the trace line.
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and lint a script file or a pack. Exit status 1 on errors only.
    Validate { path: PathBuf },
    /// Re-run a transcript against a pack. Exit status 1 on divergence.
    Replay { pack: String, transcript: PathBuf },
    /// Aggregate a transcript directory.
    Stats {
        dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the static goto graph of a pack.
    Graph {
        pack: Option<String>,
        /// Graphviz output instead of an edge list.
        #[arg(long)]
        dot: bool,
    },
    /// Run the HTTP API.
    Serve,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn,framechat_service=info".into()),
        )
        .with_writer(io::stderr)
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Chat { pack, quiet } => chat(&cli, pack.as_deref().or(cli.pack.as_deref()), *quiet),
        Command::Validate { path } => validate_cmd(path),
        Command::Replay { pack, transcript } => replay_cmd(pack, transcript),
        Command::Stats { dir, json } => stats_cmd(dir, *json),
        Command::Graph { pack, dot: as_dot } => graph_cmd(pack.as_deref().or(cli.pack.as_deref()), *as_dot),
        Command::Serve => serve(&cli),
    }
}

/// The built-in pack by name, otherwise a path.
pub fn resolve_pack(arg: Option<&str>) -> Result<LoadedPack> {
    match arg {
        None | Some(SHIPPED_PACK_NAME) => Ok(shipped_pack()),
        Some(path) => load_pack(Path::new(path)).with_context(|| format!("loading pack {path}")),
    }
}

fn engine_for(pack: &LoadedPack) -> Result<Engine> {
    Ok(Engine::new(pack.set.clone(), EngineConfig::default())?)
}

fn provider(cli: &Cli) -> Result<Arc<dyn AnswerProvider>> {
    Ok(match &cli.qa_table {
        Some(path) => Arc::new(TableLookupProvider::load(path)?),
        None => Arc::new(NoProvider),
    })
}

fn store(cli: &Cli) -> Result<Arc<TranscriptStore>> {
    Ok(Arc::new(match &cli.transcripts {
        Some(dir) => TranscriptStore::open(dir)?,
        None => TranscriptStore::in_memory(),
    }))
}

fn chat(cli: &Cli, pack: Option<&str>, quiet: bool) -> Result<ExitCode> {
    let pack = resolve_pack(pack)?;
    let engine = engine_for(&pack)?;
    let provider = provider(cli)?;
    let store = store(cli)?;
    let session_id = uuid::Uuid::new_v4().to_string();
    let mut state = engine.new_session();
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let mut turn = 0u32;
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t = answer_or_delegate(&engine, &mut state, provider.as_ref(), &line);
        turn += 1;
        store.append(InteractionRecord::from_turn(&session_id, turn, &line, &t.result))?;
        writeln!(out, "{}", t.result.response_text)?;
        out.flush()?;
        if !quiet {
            let r = &t.result;
            eprintln!(
                "  [{} context={} transitions=[{}] now={}{}]",
                r.origin.as_str(),
                r.matched_context.as_deref().unwrap_or("-"),
                r.transitions.join(", "),
                state.current_context,
                if r.cycle_suggested { " cycle" } else { "" },
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(path: &Path) -> Result<ExitCode> {
    let (lines, failed) = if path.is_file() && path.extension().is_some_and(|e| e == "fscript") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let diags = match parse_script_set(&text, &path.display().to_string()) {
            Ok(set) => validate(&set),
            Err(diags) => diags,
        };
        let failed = has_errors(&diags);
        (diags.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>(), failed)
    } else {
        let check = check_pack(path)?;
        (check.diagnostics.iter().map(ToString::to_string).collect(), check.has_errors())
    };
    for l in &lines {
        eprintln!("{l}");
    }
    let warnings = lines.len();
    if failed {
        println!("{}: invalid", path.display());
        Ok(ExitCode::FAILURE)
    } else {
        println!("{}: ok ({warnings} warning{})", path.display(), if warnings == 1 { "" } else { "s" });
        Ok(ExitCode::SUCCESS)
    }
}

fn replay_cmd(pack: &str, transcript: &Path) -> Result<ExitCode> {
    let pack = resolve_pack(Some(pack))?;
    let engine = engine_for(&pack)?;
    let records = read_jsonl_file(transcript)?;
    match replay_transcript(&engine, &records) {
        ReplayReport::Clean { sessions, turns } => {
            println!("clean: {sessions} session(s), {turns} turn(s)");
            Ok(ExitCode::SUCCESS)
        }
        ReplayReport::Diverged(d) => {
            println!("diverged: session {} turn {}", d.session_id, d.turn);
            println!("  expected: {:?} transitions {:?}", d.expected_response, d.expected_transitions);
            println!("  actual:   {:?} transitions {:?}", d.actual_response, d.actual_transitions);
            Ok(ExitCode::FAILURE)
        }
    }
}

fn stats_cmd(dir: &Path, json: bool) -> Result<ExitCode> {
    let corpus = load_transcript_dir(dir)?;
    let ratings: Vec<u8> = corpus.ratings.iter().map(|(_, r)| *r).collect();
    let stats = compute_stats(&corpus.records, &ratings)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
    } else {
        print!("{stats}");
    }
    Ok(ExitCode::SUCCESS)
}

fn graph_cmd(pack: Option<&str>, as_dot: bool) -> Result<ExitCode> {
    let pack = resolve_pack(pack)?;
    let graph = context_graph(&pack.set);
    if as_dot {
        print!("{}", dot(&graph, &pack.manifest.name));
    } else {
        print!("{}", edge_list(&graph));
    }
    Ok(ExitCode::SUCCESS)
}

fn serve(cli: &Cli) -> Result<ExitCode> {
    let pack = resolve_pack(cli.pack.as_deref())?;
    let served = ServedPack { name: pack.manifest.name.clone(), engine: engine_for(&pack)? };
    let state = AppState::new(vec![served], Some(provider(cli)?), store(cli)?);
    let addr = cli.listen;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        tracing::info!(%addr, pack = %pack.manifest.name, "listening");
        axum::serve(listener, router(state)).await?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(ExitCode::SUCCESS)
}

