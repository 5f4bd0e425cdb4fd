use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mmrus_core::mm::{check_database, parse_mm_source, CheckOptions, EntryStatus, VerificationReport};
use mmrus_core::rus::{parse_rus_source, print_theory, verify_theory, DefinitionOptions, Theory, TheoryOptions};
use mmrus_core::split::{plan_split, write_split};
use mmrus_core::stats::{mm_stats, rus_stats};
use mmrus_core::translate::{
    check_smm, mm_to_rus, round_trip, rus_to_smm, smm_to_mm_text, TranslateError, TranslateOptions,
};

#[derive(Parser, Debug)]
#[command(name = "mmrus", version, about = "Verify, translate and split Metamath and Russell sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input language; by default taken from the file extension.
    #[arg(long, value_enum, global = true, default_value_t = Lang::Auto)]
    lang: Lang,
    /// Stop at the first failing proof.
    #[arg(long, global = true)]
    fail_fast: bool,
    /// Accept definitions whose definiens has variables outside the defiendum.
    #[arg(long, global = true)]
    allow_dummies: bool,
    /// Write translations without verifying them first.
    #[arg(long, global = true)]
    no_verify: bool,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify every proof of a .mm or .rus file.
    Verify { input: PathBuf },
    /// Translate between .mm and .rus; .mm to .mm runs the full chain.
    Translate {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Split a .mm file along its outline comments.
    Split {
        input: PathBuf,
        #[arg(short = 'd', long = "dir")]
        dir: PathBuf,
        /// Deepest outline level that starts a new file (1 to 3).
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Print size statistics.
    Stats { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Lang {
    Auto,
    Mm,
    Rus,
}

/// Exit code 1: something did not verify. Exit code 2: bad input or I/O.
enum Failure {
    Verify(String),
    Input(String),
}

impl From<TranslateError> for Failure {
    fn from(e: TranslateError) -> Failure {
        match e {
            TranslateError::Stage { .. } | TranslateError::Verify { .. } => Failure::Verify(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn lang_of(path: &Path, forced: Lang) -> Result<Lang, Failure> {
    if forced != Lang::Auto {
        return Ok(forced);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("mm") => Ok(Lang::Mm),
        Some("rus") => Ok(Lang::Rus),
        _ => Err(Failure::Input(format!("{}: cannot tell the language; use --lang", path.display()))),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

struct Settings {
    fail_fast: bool,
    parallel: bool,
    no_verify: bool,
    definitions: DefinitionOptions,
}

impl Settings {
    fn check(&self) -> CheckOptions {
        CheckOptions { fail_fast: self.fail_fast, parallel: self.parallel }
    }

    fn theory(&self) -> TheoryOptions {
        TheoryOptions { definitions: self.definitions.clone(), fail_fast: self.fail_fast, parallel: self.parallel }
    }

    fn translate(&self) -> TranslateOptions {
        TranslateOptions { definitions: self.definitions.clone(), parallel: self.parallel }
    }
}

fn report(path: &Path, r: &VerificationReport) -> Result<(), Failure> {
    for e in r.failures() {
        if let EntryStatus::Failed(msg) = &e.status {
            eprintln!("{}: {}: {msg}", path.display(), e.label);
        }
    }
    println!("{}", r.summary_line());
    if r.is_ok() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("{} failed", r.failed())))
    }
}

fn parse_rus(path: &Path, text: &str) -> Result<Theory, Failure> {
    parse_rus_source(text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_mm(path: &Path, text: &str) -> Result<mmrus_core::mm::Database, Failure> {
    parse_mm_source(text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn verify(input: &Path, lang: Lang, s: &Settings) -> Result<(), Failure> {
    let text = read(input)?;
    match lang_of(input, lang)? {
        Lang::Rus => report(input, &verify_theory(&parse_rus(input, &text)?, &s.theory())),
        _ => report(input, &check_database(&parse_mm(input, &text)?, s.check())),
    }
}

/// Verifies generated text before it is written.
fn check_output(out: &Path, lang: Lang, text: &str, s: &Settings) -> Result<(), Failure> {
    if s.no_verify {
        return Ok(());
    }
    let r = match lang {
        Lang::Rus => verify_theory(&parse_rus(out, text)?, &s.theory()),
        _ => check_database(&parse_mm(out, text)?, s.check()),
    };
    if r.is_ok() {
        return Ok(());
    }
    for e in r.failures() {
        eprintln!("{} (generated): {}: {:?}", out.display(), e.label, e.status);
    }
    Err(Failure::Verify("generated output does not verify".into()))
}

fn rus_to_mm_text(theory: &Theory, s: &Settings) -> Result<String, Failure> {
    let smm = rus_to_smm(theory, s.parallel)?;
    for (name, label) in &smm.renamed {
        eprintln!("warning: {name} is written as {label}");
    }
    if !s.no_verify {
        let r = check_smm(&smm);
        if !r.is_ok() {
            return Err(Failure::Verify(format!("SMM stage: {} failed", r.failed())));
        }
    }
    Ok(smm_to_mm_text(&smm)?)
}

fn translate(input: &Path, output: &Path, lang: Lang, s: &Settings) -> Result<(), Failure> {
    let text = read(input)?;
    let from = lang_of(input, lang)?;
    let to = lang_of(output, Lang::Auto)?;
    let result = match (from, to) {
        (Lang::Rus, Lang::Rus) => {
            let mm = rus_to_mm_text(&parse_rus(input, &text)?, s)?;
            let back = mm_to_rus(&parse_mm(output, &mm)?, &s.translate())?;
            print_theory(&back.theory)
        }
        (Lang::Rus, _) => rus_to_mm_text(&parse_rus(input, &text)?, s)?,
        (_, Lang::Rus) => {
            let db = parse_mm(input, &text)?;
            if !s.no_verify {
                let r = check_database(&db, s.check());
                if !r.is_ok() {
                    return report(input, &r);
                }
            }
            let out = mm_to_rus(&db, &s.translate())?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print_theory(&out.theory)
        }
        _ => {
            let chain = round_trip(&parse_mm(input, &text)?, &s.translate())?;
            for w in &chain.warnings {
                eprintln!("warning: {w}");
            }
            for (stage, d) in &chain.timings {
                eprintln!("{stage}: {:.3} ms", d.as_secs_f64() * 1e3);
            }
            for d in &chain.diff {
                eprintln!("diff: {d}");
            }
            println!("structural diff: {} entries", chain.diff.len());
            if !chain.diff.is_empty() {
                write(output, &chain.mm)?;
                return Err(Failure::Verify("the round trip changed the database".into()));
            }
            chain.mm
        }
    };
    check_output(output, to, &result, s)?;
    write(output, &result)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn split(input: &Path, dir: &Path, depth: usize) -> Result<(), Failure> {
    let text = read(input)?;
    let plan = plan_split(&text, depth);
    for w in &plan.warnings {
        eprintln!("warning: {w}");
    }
    write_split(&text, &plan, dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    println!("split into {} parts under {}", plan.parts.len(), dir.display());
    Ok(())
}

fn stats(input: &Path, lang: Lang) -> Result<(), Failure> {
    let text = read(input)?;
    let s = match lang_of(input, lang)? {
        Lang::Rus => rus_stats(&text),
        _ => mm_stats(&text),
    }
    .map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
    print!("{s}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let s = Settings {
        fail_fast: cli.fail_fast,
        parallel: cli.threads != Some(1),
        no_verify: cli.no_verify,
        definitions: DefinitionOptions { allow_dummies: cli.allow_dummies, ..DefinitionOptions::default() },
    };
    let result = match &cli.command {
        Command::Verify { input } => verify(input, cli.lang, &s),
        Command::Translate { input, output } => translate(input, output, cli.lang, &s),
        Command::Split { input, dir, depth } => split(input, dir, *depth),
        Command::Stats { input } => stats(input, cli.lang),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
