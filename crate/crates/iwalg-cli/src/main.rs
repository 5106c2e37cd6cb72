use clap::{Args, Parser, Subcommand};
use iwalg::cli::{self, CliError, Command, Options};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "iwalg", version, about = "Structure invariants of modules over Iwasawa algebras")]
struct App {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Module file in IWM format.
    file: PathBuf,
    /// p-adic precision a.
    #[arg(long)]
    prec_p: Option<u32>,
    /// Degree truncation N.
    #[arg(long)]
    prec_deg: Option<u32>,
    #[arg(long)]
    max_escalations: Option<u32>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Falls back to IWALG_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse, validate and simplify the presentation.
    Info(Common),
    /// Full invariant profile: δ, grade, pd, depth, Betti numbers, torsion.
    Invariants(Common),
    /// Dimension filtration T_0 ⊆ ... ⊆ T_d.
    Filtration(Common),
    /// Minimal free resolution up to --length.
    Resolve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        length: usize,
    },
    /// Presentation of E^i(M).
    Ext {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        i: usize,
    },
    /// μ-invariant of a torsion module.
    Mu(Common),
    /// Elementary module a torsion module is pseudo-isomorphic to.
    Decompose(Common),
    /// Run internal consistency suites.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Cross-check the rules-mode ring against an independent model.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
}

fn split(cmd: Cmd) -> (Common, Command) {
    match cmd {
        Cmd::Info(c) => (c, Command::Info),
        Cmd::Invariants(c) => (c, Command::Invariants),
        Cmd::Filtration(c) => (c, Command::Filtration),
        Cmd::Resolve { common, length } => (common, Command::Resolve { length }),
        Cmd::Ext { common, i } => (common, Command::Ext { i }),
        Cmd::Mu(c) => (c, Command::Mu),
        Cmd::Decompose(c) => (c, Command::Decompose),
        Cmd::Verify { common, suite, trials } => (common, Command::Verify { suite, trials }),
        Cmd::OracleCheck { common, trials } => (common, Command::OracleCheck { trials }),
    }
}

fn execute(common: &Common, cmd: &Command) -> Result<(serde_json::Value, bool), CliError> {
    let text = std::fs::read_to_string(&common.file)
        .map_err(|e| CliError::validation("io_error", format!("{}: {e}", common.file.display())))?;
    let doc = cli::parse(&text)?;
    let opts = Options {
        prec_a: common.prec_p,
        prec_n: common.prec_deg,
        max_escalations: common.max_escalations,
        seed: cli::resolve_seed(common.seed)?,
    };
    let out = cli::run(&doc, cmd, &opts)?;
    Ok((out.report, out.counterexample))
}

fn emit(common: &Common, body: String) -> Result<(), String> {
    match &common.out {
        Some(path) => std::fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let app = match App::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (common, cmd) = split(app.cmd);
    let (body, code) = match execute(&common, &cmd) {
        Ok((report, counterexample)) => {
            let body = if common.json {
                format!("{}\n", serde_json::to_string_pretty(&report).unwrap())
            } else {
                cli::render_text(&report)
            };
            (body, if counterexample { 3 } else { 0 })
        }
        Err(e) => {
            if common.json {
                (format!("{}\n", serde_json::to_string_pretty(&e.to_json()).unwrap()), e.exit_code)
            } else {
                eprintln!("error[{}]: {}", e.kind, e.message);
                (String::new(), e.exit_code)
            }
        }
    };
    if !body.is_empty() {
        if let Err(msg) = emit(&common, body) {
            eprintln!("error[io_error]: {msg}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code as u8)
}
