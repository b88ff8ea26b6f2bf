use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amkg_core::cypher::ResultTable;
use amkg_core::domain::{load_seed_file, shipped_dataset, validate_dataset};
use amkg_core::nl::{AnswerStatus, Engine, RemoteConfig, TranslatorMode};
use amkg_service::{load_engine, ServiceConfig, ENV_BIND_ADDR, ENV_SEED_PATH, ENV_TRANSLATOR_MODE};
use clap::{Args, Parser, Subcommand};

/// Metal additive manufacturing knowledge graph.
#[derive(Debug, Parser)]
#[command(name = "amkg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Seed document to load instead of the shipped one
    #[arg(long, env = ENV_SEED_PATH, value_name = "PATH")]
    seed: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModeArg {
    /// Translator: rule, remote or fallback
    #[arg(long, env = ENV_TRANSLATOR_MODE, default_value = "rule")]
    mode: TranslatorMode,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the seed dataset and print its inventory
    Validate {
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Answer one question
    Query {
        text: String,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        mode: ModeArg,
        /// Also print the executed Cypher
        #[arg(long)]
        show_cypher: bool,
    },
    /// Run a raw read-only Cypher query
    Cypher {
        query: String,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Answer questions read line by line from standard input
    Repl {
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        mode: ModeArg,
    },
    /// Start the HTTP service
    Serve {
        #[command(flatten)]
        seed: SeedArg,
        /// Address to listen on
        #[arg(long, env = ENV_BIND_ADDR, default_value = amkg_service::DEFAULT_BIND_ADDR)]
        bind: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn engine(seed: Option<&Path>, mode: TranslatorMode) -> Result<Engine, String> {
    let engine = load_engine(seed).map_err(|e| e.to_string())?;
    Ok(engine.with_mode(mode).with_remote(RemoteConfig::from_env().ok()))
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Validate { seed } => validate(seed.seed.as_deref()),
        Command::Query { text, seed, mode, show_cypher } => {
            let engine = engine(seed.seed.as_deref(), mode.mode)?;
            let answer = engine.answer(&text);
            if answer.status == AnswerStatus::Error {
                return Err(answer.text);
            }
            println!("{}", answer.text);
            if let (true, Some(cypher)) = (show_cypher, &answer.cypher) {
                println!("\nCypher: {cypher}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cypher { query, seed } => {
            let engine = engine(seed.seed.as_deref(), TranslatorMode::Rule)?;
            let table = engine.run_cypher(&query).map_err(|e| e.to_string())?;
            print!("{}", render_table(&table));
            Ok(ExitCode::SUCCESS)
        }
        Command::Repl { seed, mode } => {
            let engine = engine(seed.seed.as_deref(), mode.mode)?;
            repl(&engine).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { seed, bind } => {
            tracing_subscriber::fmt().with_writer(io::stderr).init();
            let mut config = ServiceConfig::from_env().map_err(|e| e.to_string())?;
            config.seed_path = seed.seed;
            config.bind = bind;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            runtime.block_on(amkg_service::serve(config)).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn validate(seed: Option<&Path>) -> Result<ExitCode, String> {
    let dataset = match seed {
        Some(p) => load_seed_file(p).map_err(|e| e.to_string())?,
        None => shipped_dataset(),
    };
    let report = validate_dataset(&dataset);
    println!("{report}");
    Ok(if report.is_valid() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn render_table(table: &ResultTable) -> String {
    let mut out = table.columns.join("\t");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out.push_str(&format!("({} row{})\n", table.rows.len(), if table.rows.len() == 1 { "" } else { "s" }));
    out
}

fn repl(engine: &Engine) -> io::Result<()> {
    let interactive = io::stdin().is_terminal();
    let mut stdout = io::stdout();
    let mut lines = io::stdin().lock().lines();
    loop {
        if interactive {
            write!(stdout, "amkg> ")?;
            stdout.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if matches!(text, "exit" | "quit") {
            break;
        }
        let answer = engine.answer(text);
        writeln!(stdout, "{}\n", answer.text)?;
    }
    Ok(())
}
