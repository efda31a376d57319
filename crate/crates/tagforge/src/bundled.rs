//! Reference grammars shipped with the crate.
//!
//! - `english_fig4.tag` / `.lex`: a small lexicalized English grammar for
//!   sentences like "yesterday a man saw Mary".
//! - `english_families.tag` / `.lex`: head-initial verb-class families
//!   (`Tnx0V`, `Tnx0Vnx1`, `Tnx0Vnx1pnx2`, following the XTAG naming
//!   convention) plus an NP skeleton.
//! - `tamil_families.tag` / `.lex`: the same families in head-final (SOV)
//!   form with postpositions.
//! - `count_anbncndn.tag`: generates exactly aⁿbⁿcⁿdⁿ, a strictly
//!   context-sensitive language.
//! - `ambiguity_fixture.tag` / `.lex`: one word anchors both a main-verb
//!   initial tree and a relative-clause auxiliary, so a five-token
//!   sentence has exactly two parses.
//! - `anbn.cfg`, `arith.cfg`: context-free inputs for the CFG-to-TAG
//!   converter.

use crate::error::{Result, TagError};
use crate::grammar::Grammar;
use crate::io;
use crate::lexicon::Lexicon;

pub const FILES: &[(&str, &str)] = &[
    (
        "english_fig4.tag",
        include_str!("../grammars/english_fig4.tag"),
    ),
    (
        "english_fig4.lex",
        include_str!("../grammars/english_fig4.lex"),
    ),
    (
        "english_families.tag",
        include_str!("../grammars/english_families.tag"),
    ),
    (
        "english_families.lex",
        include_str!("../grammars/english_families.lex"),
    ),
    (
        "tamil_families.tag",
        include_str!("../grammars/tamil_families.tag"),
    ),
    (
        "tamil_families.lex",
        include_str!("../grammars/tamil_families.lex"),
    ),
    (
        "count_anbncndn.tag",
        include_str!("../grammars/count_anbncndn.tag"),
    ),
    (
        "ambiguity_fixture.tag",
        include_str!("../grammars/ambiguity_fixture.tag"),
    ),
    (
        "ambiguity_fixture.lex",
        include_str!("../grammars/ambiguity_fixture.lex"),
    ),
    ("anbn.cfg", include_str!("../grammars/anbn.cfg")),
    ("arith.cfg", include_str!("../grammars/arith.cfg")),
];

/// Raw text of a bundled file, by file name.
pub fn text(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Load and validate a bundled grammar.
pub fn grammar(name: &str) -> Result<Grammar> {
    let text = text(name).ok_or_else(|| TagError::UnknownTree {
        name: name.to_owned(),
    })?;
    let (grammar, report) = io::parse_grammar(text)?;
    if !report.is_empty() {
        return Err(TagError::InvalidGrammar { report });
    }
    Ok(grammar)
}

/// Load a bundled lexicon.
pub fn lexicon(name: &str) -> Result<Lexicon> {
    let text = text(name).ok_or_else(|| TagError::UnknownTree {
        name: name.to_owned(),
    })?;
    io::parse_lexicon(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_grammar_is_valid() {
        for (name, _) in FILES.iter().filter(|(n, _)| n.ends_with(".tag")) {
            grammar(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn english_fig4_holds_the_five_reference_trees() {
        let g = grammar("english_fig4.tag").unwrap();
        let names: Vec<&str> = g.all_trees().map(|t| t.name()).collect();
        assert_eq!(names, ["α_Mary", "α_a", "α_man", "α_saw", "β_yesterday"]);
        assert!(g.is_lexicalized());
    }

    #[test]
    fn every_bundled_lexicon_checks_against_its_grammar() {
        for (lex_name, _) in FILES.iter().filter(|(n, _)| n.ends_with(".lex")) {
            let tag_name = lex_name.replace(".lex", ".tag");
            let g = grammar(&tag_name).unwrap();
            let lex = lexicon(lex_name).unwrap();
            let report = lex.validate(&g);
            assert!(report.is_empty(), "{lex_name}:\n{report}");
        }
    }

    #[test]
    fn bundled_files_are_canonical() {
        for (name, text) in FILES {
            if name.ends_with(".tag") {
                let (g, _) = io::parse_grammar(text).unwrap();
                assert_eq!(&io::serialize_grammar(&g), text, "{name} is not canonical");
            } else if name.ends_with(".lex") {
                let lex = io::parse_lexicon(text).unwrap();
                assert_eq!(
                    &io::serialize_lexicon(&lex),
                    text,
                    "{name} is not canonical"
                );
            }
        }
    }
}
