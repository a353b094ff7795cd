use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qset_core::gen;
use qset_core::json as qjson;
use qset_core::kernel::Elem;
use qset_core::lang::{line_col, parse, tokenize, LangError, Session, Value};
use qset_core::morphism::check_category_laws;
use qset_core::universe::{build_fragment, check_fragment, Fragment};
use qset_core::FragmentCaps;

const MAX_CAP_POWER: u64 = 24;
const MAX_CAP_PRODUCT: u64 = 1 << 20;
const MAX_DEPTH: u32 = 6;
/// Largest quasi-cardinal of the objects sampled by `laws`.
const LAW_QCARD: u64 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "qset",
    version,
    about = "Quasi-set kernel: scripts, audits and category-law checks"
)]
struct Cli {
    #[command(subcommand)]
    mode: Mode,

    /// Number of composable chains sampled by `laws`.
    #[arg(long, global = true, default_value_t = 500)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest operand qcard accepted by pow.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(0..=MAX_CAP_POWER))]
    cap_power: Option<u64>,
    /// Largest result qcard accepted by prod.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(0..=MAX_CAP_PRODUCT))]
    cap_product: Option<u64>,
    /// Closure rounds for `build` without an explicit depth and for `audit` of a seed qset.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(0..=MAX_DEPTH as i64))]
    depth: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Mode {
    /// Run a script, printing each top-level value and the check results.
    Eval { file: PathBuf },
    /// Read statements from standard input, one per line.
    Repl,
    /// Run a script and audit its final value: a fragment, or a qset whose
    /// elements seed a fragment of `--depth` rounds.
    Audit { file: PathBuf },
    /// Check the category laws on seeded random quasi-functions.
    Laws,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

enum Failure {
    Usage(String),
    Lang {
        file: String,
        src: String,
        err: LangError,
    },
}

struct Style {
    on: bool,
}

impl Style {
    fn detect() -> Self {
        let disabled = std::env::var("QSET_COLOR").is_ok_and(|v| v == "0");
        Style {
            on: !disabled && io::stderr().is_terminal(),
        }
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.on {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style::detect();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            report(&style, &f);
            ExitCode::from(2)
        }
    }
}

fn report(style: &Style, f: &Failure) {
    let label = |s: &str| style.paint("1;31", s);
    let mut msg = String::new();
    match f {
        Failure::Usage(m) => writeln!(msg, "qset: {}: {m}", label("error")).unwrap(),
        Failure::Lang { file, src, err } => {
            let span = err.span();
            let (line, col) = line_col(src, span.start);
            writeln!(msg, "{file}:{line}:{col}: {}: {err}", label(err.phase())).unwrap();
            if let Some(text) = src.lines().nth(line - 1) {
                let width = src[span.start.min(src.len())..span.end.min(src.len())]
                    .lines()
                    .next()
                    .map_or(1, |s| s.chars().count().max(1));
                writeln!(msg, "  {text}").unwrap();
                writeln!(
                    msg,
                    "  {}{}",
                    " ".repeat(col - 1),
                    label(&"^".repeat(width))
                )
                .unwrap();
            }
        }
    }
    let _ = io::stderr().lock().write_all(msg.as_bytes());
}

fn session(cli: &Cli) -> Session {
    let mut s = Session::new();
    let mut caps = FragmentCaps::default();
    if let Some(p) = cli.cap_power {
        caps.algebra.power = p;
    }
    if let Some(p) = cli.cap_product {
        caps.algebra.product = p;
    }
    s.caps = caps;
    if let Some(d) = cli.depth {
        s.default_depth = d;
    }
    s
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    match &cli.mode {
        Mode::Eval { file } => eval(cli, file),
        Mode::Repl => repl(cli),
        Mode::Audit { file } => audit(cli, file),
        Mode::Laws => Ok(laws(cli)),
    }
}

/// Writes a finished stdout payload. A closed pipe is not an error.
fn emit(out: &str) {
    let mut stdout = io::stdout().lock();
    let _ = stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush());
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Parses and runs a whole script. Nothing is executed if it does not parse.
fn run_script(cli: &Cli, path: &Path) -> Result<(Session, Vec<Option<Value>>), Failure> {
    let src = read(path)?;
    let lang = |err| Failure::Lang {
        file: path.display().to_string(),
        src: src.clone(),
        err,
    };
    let program = tokenize(&src).and_then(|t| parse(&t)).map_err(lang)?;
    let mut s = session(cli);
    let mut values = Vec::new();
    for stmt in &program.stmts {
        values.push(s.execute(stmt).map_err(lang)?.value);
    }
    Ok((s, values))
}

fn eval(cli: &Cli, path: &Path) -> Result<ExitCode, Failure> {
    let mut out = String::new();
    let src = read(path)?;
    let (s, values) = run_script(cli, path)?;
    let checks: Vec<_> = s
        .checks()
        .iter()
        .map(|(span, ok)| (line_col(&src, span.start), *ok))
        .collect();
    let passed = checks.iter().all(|(_, ok)| *ok);
    match cli.format {
        Format::Json => {
            let doc = json!({
                "schema": qjson::SCHEMA,
                "values": values.iter().flatten().map(|v| s.render(v)).collect::<Vec<_>>(),
                "checks": checks.iter().map(|((line, col), ok)| json!({"line": line, "col": col, "passed": ok})).collect::<Vec<_>>(),
                "passed": passed,
            });
            writeln!(out, "{doc}").unwrap();
        }
        Format::Text => {
            for v in values.iter().flatten() {
                writeln!(out, "{}", s.render(v)).unwrap();
            }
            let failed: Vec<_> = checks.iter().filter(|(_, ok)| !ok).collect();
            for ((line, col), _) in &failed {
                writeln!(out, "check failed at {}:{line}:{col}", path.display()).unwrap();
            }
            if !checks.is_empty() {
                writeln!(
                    out,
                    "checks: {} passed, {} failed",
                    checks.len() - failed.len(),
                    failed.len()
                )
                .unwrap();
            }
        }
    }
    emit(&out);
    Ok(exit(passed))
}

fn repl(cli: &Cli) -> Result<ExitCode, Failure> {
    let style = Style::detect();
    let mut s = session(cli);
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut all_passed = true;
    loop {
        if interactive {
            emit("qset> ");
        }
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => return Err(Failure::Usage(format!("cannot read input: {e}"))),
        }
        let line = line.trim_end();
        if line == ":quit" || line == ":q" {
            break;
        }
        let program = match tokenize(line).and_then(|t| parse(&t)) {
            Ok(p) => p,
            Err(err) => {
                report(
                    &style,
                    &Failure::Lang {
                        file: "<stdin>".into(),
                        src: line.into(),
                        err,
                    },
                );
                continue;
            }
        };
        for stmt in &program.stmts {
            match s.execute(stmt) {
                Ok(r) => {
                    if let Some(v) = r.value {
                        emit(&format!("{}\n", s.render(&v)));
                    }
                    if let Some(ok) = r.check {
                        all_passed &= ok;
                        emit(if ok {
                            "check passed\n"
                        } else {
                            "check failed\n"
                        });
                    }
                }
                Err(err) => {
                    report(
                        &style,
                        &Failure::Lang {
                            file: "<stdin>".into(),
                            src: line.into(),
                            err,
                        },
                    );
                    break;
                }
            }
        }
    }
    Ok(exit(all_passed))
}

fn audit(cli: &Cli, path: &Path) -> Result<ExitCode, Failure> {
    let mut out = String::new();
    let (s, values) = run_script(cli, path)?;
    let last = values.into_iter().flatten().last();
    let fragment: Arc<Fragment> = match last {
        Some(Value::Fragment(f)) => f,
        Some(Value::QSet(q)) => {
            let seeds: Vec<Elem> = q
                .iter()
                .flat_map(|(e, n)| std::iter::repeat_n(e.clone(), n as usize))
                .collect();
            build_fragment(&seeds, s.default_depth, s.caps)
                .map(Arc::new)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        Some(v) => {
            return Err(Failure::Usage(format!(
                "{}: the last value is a {}, expected a fragment or a qset",
                path.display(),
                v.type_name()
            )))
        }
        None => {
            return Err(Failure::Usage(format!(
                "{}: the script has no value to audit",
                path.display()
            )))
        }
    };
    let report = check_fragment(&fragment);
    let sig = s.signature();
    let u = fragment.elements();
    match cli.format {
        Format::Json => {
            let doc = qjson::audit(sig, u, Some(&fragment), &report);
            writeln!(
                out,
                "{}",
                serde_json::to_string(&doc).expect("serializable")
            )
            .unwrap();
        }
        Format::Text => {
            writeln!(
                out,
                "fragment: {} classes, qcard {}, depth {}, {} cutoffs",
                u.class_count(),
                u.qcard(),
                fragment.depth(),
                fragment.cutoffs().count()
            )
            .unwrap();
            let t = &report.totals;
            for (name, tally) in [
                ("cond1 (power)", t.cond1),
                ("cond2 (singleton)", t.cond2),
                ("cond3 (product)", t.cond3),
                ("cond4 (family union)", t.cond4),
                ("theorem1", t.theorem1),
            ] {
                writeln!(
                    out,
                    "{name:<22} {:>5} defects / {:>5} checked",
                    tally.defects, tally.checked
                )
                .unwrap();
            }
            writeln!(out, "skipped: {}", t.skipped).unwrap();
            for (name, ds) in [
                ("cond1", &report.cond1),
                ("cond2", &report.cond2),
                ("cond3", &report.cond3),
                ("cond4", &report.cond4),
            ] {
                for d in ds {
                    let ws: Vec<String> = d.witnesses.iter().map(|w| sig.render_elem(w)).collect();
                    writeln!(
                        out,
                        "  {name} [{}] missing {}",
                        ws.join(", "),
                        sig.render_elem(&d.missing)
                    )
                    .unwrap();
                }
            }
            for d in &report.theorem1 {
                let ws: Vec<String> = d.witnesses.iter().map(|w| sig.render_elem(w)).collect();
                writeln!(
                    out,
                    "  theorem1 {:?} [{}] missing {}",
                    d.construct,
                    ws.join(", "),
                    sig.render_elem(&d.missing)
                )
                .unwrap();
            }
        }
    }
    emit(&out);
    let checks_ok = s.checks().iter().all(|(_, ok)| *ok);
    Ok(exit(checks_ok))
}

fn laws(cli: &Cli) -> ExitCode {
    let mut out = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let sample = gen::law_sample(&mut rng, cli.samples, LAW_QCARD);
    let r = check_category_laws(&sample, cli.seed);
    match cli.format {
        Format::Json => {
            writeln!(
                out,
                "{}",
                serde_json::to_string(&qjson::laws(cli.samples, &r)).expect("serializable")
            )
            .unwrap();
        }
        Format::Text => {
            writeln!(out, "seed: {}", r.seed).unwrap();
            writeln!(out, "morphisms: {}", r.morphisms).unwrap();
            writeln!(out, "composable triples: {}", r.composable_triples).unwrap();
            if r.sampled {
                writeln!(out, "triples checked: {} (sampled)", r.triples_checked).unwrap();
            } else {
                writeln!(out, "triples checked: {}", r.triples_checked).unwrap();
            }
            writeln!(out, "identity checks: {}", r.identity_checks).unwrap();
            for v in &r.violations {
                writeln!(out, "  {:?} at {:?}: {}", v.law, v.morphisms, v.detail).unwrap();
            }
            writeln!(out, "violations: {}", r.violations.len()).unwrap();
        }
    }
    emit(&out);
    exit(r.passed())
}
