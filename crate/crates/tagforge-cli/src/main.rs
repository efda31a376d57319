//! Command-line front end: validate grammars, parse sentences into
//! derivation forests, instantiate verb-class tree families, and convert
//! context-free grammars into equivalent TAGs.
//!
//! Exit codes: 0 success (parses found, checks clean), 1 clean negative
//! (no parse, violations reported), 2 usage or input errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use tagforge::cfg::{self, ContextFreeGrammar, LanguageSource};
use tagforge::derivation::DerivationNode;
use tagforge::grammar::Grammar;
use tagforge::lexicon::{self, grammar_for_input, Lexicon};
use tagforge::parser::{ParseOptions, Schedule, TagParser};
use tagforge::{bundled, io as tagio};

/// Search path for grammar and lexicon files, colon-separated directories.
const GRAMMAR_PATH_VAR: &str = "TAGFORGE_GRAMMAR_PATH";

#[derive(Parser)]
#[command(
    name = "tagforge",
    version,
    about = "Tree adjoining grammar toolkit: validate, parse, derive, convert"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a grammar file; with a lexicon, also check anchoring
    /// postulates and lexicon entries.
    Validate {
        #[arg(long)]
        grammar: String,
        #[arg(long)]
        lexicon: Option<String>,
    },
    /// Parse one sentence (or a file of sentences) into derivations.
    Parse {
        #[arg(long)]
        grammar: String,
        #[arg(long)]
        lexicon: Option<String>,
        /// The sentence, whitespace-tokenized.
        #[arg(long, conflicts_with = "input")]
        sentence: Option<String>,
        /// File with one sentence per line (batch mode).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Show::Derived)]
        show: Show,
        /// Print every derivation instead of just the first.
        #[arg(long)]
        all_parses: bool,
        #[arg(long)]
        max_parses: Option<usize>,
        /// Bound on elementary-tree uses per derivation (needed for
        /// grammars with empty-yield trees the engine cannot bound).
        #[arg(long)]
        max_tree_uses: Option<usize>,
        #[arg(long, value_enum, default_value_t = ScheduleArg::Serial)]
        schedule: ScheduleArg,
    },
    /// Print an instantiated verb-class tree family as grammar text.
    Families {
        /// Family name, e.g. Tnx0V, Tnx0Vnx1, Tnx0Vnx1pnx2.
        family: String,
        #[arg(long)]
        verb: String,
        #[arg(long)]
        adposition: Option<String>,
        #[arg(long, value_enum)]
        direction: DirectionArg,
    },
    /// Convert an epsilon-free, finitely ambiguous CFG into a TAG and
    /// verify string-language equality up to a length bound.
    Cfg2tag {
        cfg: String,
        #[arg(long, default_value_t = 10)]
        max_length: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Show {
    Derived,
    Derivation,
    Deps,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Serial,
    Parallel,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Schedule {
        match s {
            ScheduleArg::Serial => Schedule::Serial,
            ScheduleArg::Parallel => Schedule::Parallel,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Clean,
    Negative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, String> {
    match cli.command {
        Command::Validate { grammar, lexicon } => cmd_validate(&grammar, lexicon.as_deref()),
        Command::Parse {
            grammar,
            lexicon,
            sentence,
            input,
            show,
            all_parses,
            max_parses,
            max_tree_uses,
            schedule,
        } => {
            let options = ParseOptions {
                max_parses,
                max_tree_uses,
                schedule: schedule.into(),
            };
            cmd_parse(
                &grammar,
                lexicon.as_deref(),
                sentence.as_deref(),
                input.as_deref(),
                show,
                all_parses,
                &options,
            )
        }
        Command::Families {
            family,
            verb,
            adposition,
            direction,
        } => cmd_families(&family, &verb, adposition.as_deref(), direction),
        Command::Cfg2tag { cfg, max_length } => cmd_cfg2tag(&cfg, max_length),
    }
}

/// Resolve a file argument: literal path, then each directory on
/// `TAGFORGE_GRAMMAR_PATH`, then the bundled grammars by file name.
fn resolve_text(name: &str) -> Result<String, String> {
    let path = Path::new(name);
    if path.exists() {
        return fs::read_to_string(path).map_err(|e| format!("{name}: {e}"));
    }
    if let Ok(dirs) = std::env::var(GRAMMAR_PATH_VAR) {
        for dir in dirs.split(':').filter(|d| !d.is_empty()) {
            let candidate = Path::new(dir).join(name);
            if candidate.exists() {
                return fs::read_to_string(&candidate)
                    .map_err(|e| format!("{}: {e}", candidate.display()));
            }
        }
    }
    if let Some(text) = bundled::text(name) {
        return Ok(text.to_owned());
    }
    Err(format!("file not found: {name}"))
}

fn load_grammar(name: &str) -> Result<(Grammar, tagforge::ValidationReport), String> {
    let text = resolve_text(name)?;
    tagio::parse_grammar(&text).map_err(|e| format!("{name}: {e}"))
}

fn load_lexicon(name: &str) -> Result<Lexicon, String> {
    let text = resolve_text(name)?;
    tagio::parse_lexicon(&text).map_err(|e| format!("{name}: {e}"))
}

fn cmd_validate(grammar_file: &str, lexicon_file: Option<&str>) -> Result<Outcome, String> {
    let (grammar, mut report) = load_grammar(grammar_file)?;
    if let Some(lexicon_file) = lexicon_file {
        let lexicon = load_lexicon(lexicon_file)?;
        report.merge(lexicon::check_postulates(&grammar));
        report.merge(lexicon.validate(&grammar));
    }
    if report.is_empty() {
        println!("ok");
        Ok(Outcome::Clean)
    } else {
        print!("{report}");
        Ok(Outcome::Negative)
    }
}

fn cmd_parse(
    grammar_file: &str,
    lexicon_file: Option<&str>,
    sentence: Option<&str>,
    input: Option<&Path>,
    show: Show,
    all_parses: bool,
    options: &ParseOptions,
) -> Result<Outcome, String> {
    let (grammar, report) = load_grammar(grammar_file)?;
    if !report.is_empty() {
        return Err(format!("{grammar_file} is not a valid grammar:\n{report}"));
    }
    let lexicon = lexicon_file.map(load_lexicon).transpose()?;
    if let Some(lexicon) = &lexicon {
        let lex_report = lexicon.validate(&grammar);
        if !lex_report.is_empty() {
            return Err(format!("lexicon has problems:\n{lex_report}"));
        }
    }

    let sentences: Vec<String> = match (sentence, input) {
        (Some(s), None) => vec![s.to_owned()],
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect(),
        (None, None) => return Err("one of --sentence or --input is required".into()),
        (Some(_), Some(_)) => unreachable!("clap forbids the combination"),
    };
    if sentences.is_empty() {
        return Err("no sentences to parse".into());
    }

    let parse_one = |sentence: &str| -> Result<(String, bool), String> {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let effective = match &lexicon {
            Some(lexicon) => {
                grammar_for_input(&grammar, lexicon, &tokens).map_err(|e| e.to_string())?
            }
            None => grammar.clone(),
        };
        let parser = TagParser::new(&effective).map_err(|e| e.to_string())?;
        let forest = parser.parse(&tokens, options).map_err(|e| e.to_string())?;
        let text = render_forest(&effective, &forest, show, all_parses)?;
        Ok((text, !forest.is_empty()))
    };

    let results: Vec<Result<(String, bool), String>> = match options.schedule {
        Schedule::Parallel => sentences.par_iter().map(|s| parse_one(s)).collect(),
        Schedule::Serial => sentences.iter().map(|s| parse_one(s)).collect(),
    };

    let mut all_parsed = true;
    let mut first = true;
    for result in results {
        let (text, parsed) = result?;
        if !first {
            println!();
        }
        print!("{text}");
        all_parsed &= parsed;
        first = false;
    }
    Ok(if all_parsed {
        Outcome::Clean
    } else {
        Outcome::Negative
    })
}

fn render_forest(
    grammar: &Grammar,
    forest: &tagforge::ParseForest,
    show: Show,
    all_parses: bool,
) -> Result<String, String> {
    let mut out = String::new();
    let shown: &[DerivationNode] = if all_parses {
        &forest.derivations
    } else {
        &forest.derivations[..forest.derivations.len().min(1)]
    };
    for (i, derivation) in shown.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if matches!(show, Show::Derived | Show::All) {
            let derived = derivation.replay(grammar).map_err(|e| e.to_string())?;
            let _ = writeln!(out, "{}", derived.bracketed());
        }
        if matches!(show, Show::Derivation | Show::All) {
            out.push_str(&derivation.render());
        }
        if matches!(show, Show::Deps | Show::All) {
            let records = derivation
                .dependencies(grammar)
                .map_err(|e| e.to_string())?;
            for record in records {
                let _ = writeln!(out, "{}", record.render());
            }
        }
    }
    let n = forest.total_found;
    let _ = writeln!(
        out,
        "{n} parse{}{}",
        if n == 1 { "" } else { "s" },
        if forest.truncated {
            format!(" (showing {})", forest.derivations.len())
        } else {
            String::new()
        }
    );
    Ok(out)
}

fn cmd_families(
    family_name: &str,
    verb: &str,
    adposition: Option<&str>,
    direction: DirectionArg,
) -> Result<Outcome, String> {
    let source = match direction {
        DirectionArg::HeadInitial => "english_families.tag",
        DirectionArg::HeadFinal => "tamil_families.tag",
    };
    let grammar = bundled::grammar(source).map_err(|e| e.to_string())?;
    let family = grammar
        .family(family_name)
        .ok_or_else(|| format!("unknown family {family_name} (see {source})"))?;
    if adposition.is_some() && !family.requires_adposition() {
        eprintln!("warning: family {family_name} takes no adposition; ignoring it");
    }
    let trees = family
        .instantiate(verb, adposition)
        .map_err(|e| e.to_string())?;
    let printable = Grammar::new(grammar.start(), trees, vec![]).map_err(|e| e.to_string())?;
    print!("{}", tagio::serialize_grammar(&printable));
    Ok(Outcome::Clean)
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    HeadInitial,
    HeadFinal,
}

fn cmd_cfg2tag(cfg_file: &str, max_length: usize) -> Result<Outcome, String> {
    let text = resolve_text(cfg_file)?;
    let cfg = ContextFreeGrammar::parse(&text).map_err(|e| e.to_string())?;
    let tag = cfg::cfg_to_ltag(&cfg).map_err(|e| e.to_string())?;
    print!("{}", tagio::serialize_grammar(&tag));

    let comparison = cfg::language_equal_upto(
        &LanguageSource::Cfg(&cfg),
        &LanguageSource::Tag(&tag),
        max_length,
    )
    .map_err(|e| e.to_string())?;
    if comparison.equal {
        println!("languages equal up to length {max_length}");
        Ok(Outcome::Clean)
    } else {
        println!(
            "languages differ; counterexample: {:?}",
            comparison.counterexample.unwrap_or_default().join(" ")
        );
        Ok(Outcome::Negative)
    }
}
