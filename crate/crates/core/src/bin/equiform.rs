use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use equiform::config::{self, TaskDecl, TaskKind};
use equiform::report::{ReportDocument, SCHEMA};
use equiform::tasks::{self, Overrides};
use equiform::Result;

/// Invariant differential forms on homogeneous vector bundles.
#[derive(Parser, Debug)]
#[command(name = "equiform", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every task of the configuration.
    Run(Common),
    /// Generate the dictionary and check completeness.
    Generate(Common),
    /// Invariant dimensions at the origin and at the generic point.
    DimTable(Common),
    /// Express d of every low-degree generator over the dictionary.
    DTable(Common),
    /// Check that forms are closed.
    VerifyClosed(Common),
    /// Check an identity between two forms.
    VerifyEquation(Common),
    /// Check that a form is nonzero at a point.
    VerifyNonzero(Common),
    /// Express a form over the dictionary.
    Express(ExpressArgs),
    /// Validate the setup only.
    Validate(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file, or the name of a bundled configuration.
    #[arg(long)]
    config: String,
    /// Run only the task of this name.
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    max_degree: Option<usize>,
    /// Radial exponent range, e.g. `-2,4`.
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    laurent_bounds: Option<(i32, i32)>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct ExpressArgs {
    #[command(flatten)]
    common: Common,
    /// Expression to express; overrides the configured tasks.
    #[arg(long)]
    expr: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_bounds(s: &str) -> std::result::Result<(i32, i32), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: i32 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i32 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("lower bound exceeds upper bound".into());
    }
    Ok((lo, hi))
}

fn select(doc: &config::ConfigDocument, kind: Option<TaskKind>, name: Option<&str>) -> Result<Vec<TaskDecl>> {
    let of_kind = |t: &&TaskDecl| kind.is_none_or(|k| t.kind == k);
    if let Some(n) = name {
        let t = doc
            .tasks
            .iter()
            .find(|t| t.name == n)
            .ok_or_else(|| equiform::Error::UnknownName(n.to_string()))?;
        if !of_kind(&t) {
            return Err(equiform::Error::Config(format!(
                "task `{n}` is of kind {}",
                t.kind.as_str()
            )));
        }
        return Ok(vec![t.clone()]);
    }
    let tasks: Vec<TaskDecl> = doc.tasks.iter().filter(of_kind).cloned().collect();
    match (tasks.is_empty(), kind) {
        (true, Some(k @ (TaskKind::Generate | TaskKind::DimTable | TaskKind::DTable))) => {
            Ok(vec![TaskDecl::new(k.as_str(), k)])
        }
        (true, Some(k)) => Err(equiform::Error::Config(format!(
            "the configuration has no {} task",
            k.as_str()
        ))),
        _ => Ok(tasks),
    }
}

fn execute(cli: Cli) -> Result<ReportDocument> {
    let (common, kind, expr) = match cli.command {
        Command::Run(c) => (c, None, None),
        Command::Generate(c) => (c, Some(TaskKind::Generate), None),
        Command::DimTable(c) => (c, Some(TaskKind::DimTable), None),
        Command::DTable(c) => (c, Some(TaskKind::DTable), None),
        Command::VerifyClosed(c) => (c, Some(TaskKind::VerifyClosed), None),
        Command::VerifyEquation(c) => (c, Some(TaskKind::VerifyEquation), None),
        Command::VerifyNonzero(c) => (c, Some(TaskKind::VerifyNonzero), None),
        Command::Express(e) => (e.common, Some(TaskKind::Express), e.expr),
        Command::Validate(c) => {
            let (name, doc) = config::load(&c.config)?;
            let model = config::Model::from_config(&doc)?;
            let report = ReportDocument {
                schema: SCHEMA.into(),
                config: name,
                setup: tasks::summary(&model.setup),
                tasks: Vec::new(),
                pass: true,
            };
            return emit(&c, report);
        }
    };
    let (name, doc) = config::load(&common.config)?;
    let list = match expr {
        Some(e) => {
            let mut t = TaskDecl::new("express", TaskKind::Express);
            t.expr = Some(e);
            vec![t]
        }
        None => select(&doc, kind, common.task.as_deref())?,
    };
    let overrides = Overrides {
        max_length: common.max_length,
        max_degree: common.max_degree,
        laurent_bounds: common.laurent_bounds,
    };
    let report = tasks::run(&name, &doc, &list, &overrides)?;
    emit(&common, report)
}

fn emit(c: &Common, report: ReportDocument) -> Result<ReportDocument> {
    let text = match c.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    match &c.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| equiform::Error::Config(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(report)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(r) if r.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
