use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lotus_core::render;
use lotus_core::report::{build_report, detect_input, report_text, Model, Source, TrunkChoice};
use lotus_core::Error;

#[derive(Parser)]
#[command(name = "lotus", version, about = "Lotuses, Eggers-Wall trees and invariants of plane curve singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the lotus and the Eggers-Wall tree and write them as JSON.
    Build {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        /// Also write a drawing of each lotus.
        #[arg(long, value_enum)]
        format: Option<DrawFormat>,
    },
    /// Print the invariant report.
    Invariants {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
        /// Run every cross-method consistency check; exit with 3 on a mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Draw a lotus, its dual or proximity graph, or the tree.
    Export {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        format: DrawFormat,
        #[arg(long, value_enum, default_value = "lotus")]
        graph: GraphKind,
        /// Write to this file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Curve file (JSON or text), tree JSON, lotus JSON, or a step script.
    input: PathBuf,
    /// Characteristic of the base field; overrides the value in a curve file.
    #[arg(long = "char")]
    characteristic: Option<u64>,
    /// Comma-separated branch labels used for multiplicities, delta and Milnor numbers.
    #[arg(long, value_delimiter = ',')]
    branches: Option<Vec<String>>,
    /// Trunk decomposition: `canonical`, `index K` (or `index:K`), or `all`.
    #[arg(long, num_args = 1..=2, default_value = "canonical")]
    trunks: Vec<String>,
    /// Complete an incomplete tree by adding curvettas.
    #[arg(long)]
    complete: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DrawFormat {
    Dot,
    Tikz,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Lotus,
    Dual,
    Proximity,
    Tree,
}

enum Failure {
    Usage(String),
    Parse(String),
    Check(String),
}

impl Failure {
    fn from_core(path: &Path, e: Error) -> Failure {
        match e {
            Error::Parse { pos, msg } => Failure::Parse(format!("{}:{pos}: {msg}", path.display())),
            Error::Structure(msg) => Failure::Parse(format!("{}: {msg}", path.display())),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn trunk_choice(words: &[String]) -> Result<TrunkChoice, Failure> {
    let bad = || Failure::Usage(format!("invalid --trunks value {:?}", words.join(" ")));
    match words {
        [w] if w == "canonical" => Ok(TrunkChoice::Canonical),
        [w] if w == "all" => Ok(TrunkChoice::All),
        [w] if w.starts_with("index:") => w["index:".len()..].parse().map(TrunkChoice::Index).map_err(|_| bad()),
        [w, k] if w == "index" => k.parse().map(TrunkChoice::Index).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn load(args: &InputArgs) -> Result<Model, Failure> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.input.display())))?;
    let mut source = detect_input(&text).map_err(|e| Failure::from_core(&args.input, e))?;
    if let (Source::Curve(curve), Some(p)) = (&mut source, args.characteristic) {
        curve.char = p;
    }
    let trunks = trunk_choice(&args.trunks)?;
    let mut model = Model::build(source, trunks, args.complete).map_err(|e| Failure::from_core(&args.input, e))?;
    if let Some(p) = args.characteristic {
        model.char = p;
    }
    Ok(model)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn draw(format: DrawFormat, graph: GraphKind, model: &Model) -> Result<String, Failure> {
    let lotus = model.lotuses.first();
    let need_lotus = || lotus.ok_or_else(|| Failure::Usage("no lotus is available for this input".into()));
    match (graph, format) {
        (GraphKind::Tree, DrawFormat::Dot) => {
            let tree = model.tree.as_ref().ok_or_else(|| Failure::Usage("no tree is available".into()))?;
            Ok(render::tree_dot(tree))
        }
        (GraphKind::Dual, DrawFormat::Dot) => Ok(render::dual_graph_dot(need_lotus()?)),
        (GraphKind::Proximity, DrawFormat::Dot) => Ok(render::proximity_dot(need_lotus()?)),
        (GraphKind::Lotus, DrawFormat::Dot) => Ok(render::lotus_dot(need_lotus()?)),
        (GraphKind::Lotus, DrawFormat::Tikz) => Ok(render::lotus_tikz(need_lotus()?)),
        (GraphKind::Lotus, DrawFormat::Svg) => Ok(render::lotus_svg(need_lotus()?)),
        _ => Err(Failure::Usage("TikZ and SVG are only available for --graph lotus".into())),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Build { input, out, format } => {
            let model = load(&input)?;
            fs::create_dir_all(&out).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", out.display())))?;
            let many = model.lotuses.len() > 1;
            for (k, lotus) in model.lotuses.iter().enumerate() {
                let stem = if many { format!("lotus-{k}") } else { "lotus".to_string() };
                write_file(&out.join(format!("{stem}.json")), &lotus.to_json())?;
                match format {
                    Some(DrawFormat::Tikz) => write_file(&out.join(format!("{stem}.tex")), &render::lotus_tikz(lotus))?,
                    Some(DrawFormat::Svg) => write_file(&out.join(format!("{stem}.svg")), &render::lotus_svg(lotus))?,
                    Some(DrawFormat::Dot) => write_file(&out.join(format!("{stem}.dot")), &render::lotus_dot(lotus))?,
                    None => {}
                }
            }
            if let Some(tree) = &model.tree {
                write_file(&out.join("tree.json"), &tree.to_json())?;
            }
            for w in &model.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Invariants { input, format, check } => {
            let model = load(&input)?;
            let report =
                build_report(&model, 0, input.branches.as_deref(), check).map_err(|e| Failure::from_core(&input.input, e))?;
            match format {
                ReportFormat::Text => print!("{}", report_text(&report)),
                ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
            }
            if check && !report.checks_pass() {
                let failed: Vec<String> = report.checks.iter().filter(|c| !c.ok).map(|c| c.name.clone()).collect();
                return Err(Failure::Check(failed.join("; ")));
            }
            Ok(())
        }
        Command::Export { input, format, graph, output } => {
            let model = load(&input)?;
            let text = draw(format, graph, &model)?;
            match output {
                Some(path) => write_file(&path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("consistency check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
