//! A tree adjoining grammar (TAG) engine.
//!
//! Grammars are sets of named elementary trees: *initial* trees whose
//! frontier nonterminals are substitution sites, and *auxiliary* trees
//! carrying a foot node that receives displaced material during
//! adjunction. Per-node adjoining constraints (selective, null,
//! obligatory) restrict which auxiliary trees may or must adjoin where.
//!
//! The crate provides:
//!
//! - the grammar model with Gorn addressing and structural validation
//!   ([`grammar`], [`gorn`]);
//! - the two composition operations, adjunction and substitution, as pure
//!   functions over immutable trees ([`algebra`]);
//! - derivation trees as first-class history objects with validation,
//!   replay into derived trees, and word-level dependency extraction
//!   ([`derivation`]);
//! - a lexicon layer mapping words onto the trees they anchor, including
//!   parameterized verb-class tree families with head-initial and
//!   head-final (SOV) instantiations ([`lexicon`]);
//! - a polynomial chart parser that recognizes token sequences and
//!   enumerates complete derivation forests ([`parser`]);
//! - a brute-force derivation enumerator used as an independent test
//!   oracle ([`oracle`]);
//! - a converter from finitely ambiguous, epsilon-free context-free
//!   grammars into equivalent lexicalized TAGs ([`mod@cfg`]);
//! - text formats for grammars and lexicons plus the bundled reference
//!   grammars ([`io`], [`bundled`]).
//!
//! ```
//! use tagforge::{bundled, parser};
//!
//! let grammar = bundled::grammar("english_fig4.tag").unwrap();
//! let tokens = ["yesterday", "a", "man", "saw", "Mary"];
//! let forest = parser::parse_all(&grammar, &tokens, &parser::ParseOptions::default()).unwrap();
//! assert_eq!(forest.derivations.len(), 1);
//! ```

pub mod algebra;
pub mod bundled;
pub mod cfg;
pub mod derivation;
pub mod error;
pub mod gorn;
pub mod grammar;
pub mod io;
pub mod lexicon;
pub mod oracle;
pub mod parser;

pub use algebra::WorkTree;
pub use derivation::{DependencyRecord, DerivOp, DerivationNode};
pub use error::{BlockReason, Result, TagError};
pub use gorn::GornAddress;
pub use grammar::{
    AdjConstraint, ElementaryTree, Grammar, Marker, NameSet, Symbol, TreeKind, TreeNode,
    ValidationReport, Violation,
};
pub use lexicon::{HeadDirection, LexEntry, Lexicon, TreeFamily};
pub use parser::{parse_all, recognize, ParseForest, ParseOptions, Schedule, TagParser};
