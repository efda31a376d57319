//! Error and rejection-reason types shared across the crate.

use std::fmt;

use thiserror::Error;

use crate::gorn::GornAddress;
use crate::grammar::ValidationReport;

pub type Result<T> = std::result::Result<T, TagError>;

/// Why an adjunction attempt was rejected.
///
/// `can_adjoin` reports the first failing check so callers (and tests) can
/// tell a constraint violation apart from a structural mismatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockReason {
    /// The node carries NA (or an empty selective set).
    NullAdjunction,
    /// The node carries SA(T) and the auxiliary tree is not in T.
    NotInSelectiveSet { name: String },
    /// The node carries OA(T) and the auxiliary tree is not in T.
    NotInObligatorySet { name: String },
    /// Node label and auxiliary root label differ.
    LabelMismatch { host: String, aux: String },
    /// The node is marked for substitution.
    SubstitutionSite,
    /// The node is a terminal or lexical leaf.
    NotAdjoinable { label: String },
    /// The argument tree is not auxiliary-derived (it has no foot).
    NotAnAuxiliary { name: String },
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockReason::NullAdjunction => write!(f, "null adjunction"),
            BlockReason::NotInSelectiveSet { name } => {
                write!(f, "{name} is not in the selective adjunction set")
            }
            BlockReason::NotInObligatorySet { name } => {
                write!(f, "{name} is not in the obligatory adjunction set")
            }
            BlockReason::LabelMismatch { host, aux } => {
                write!(f, "node label {host} does not match auxiliary root {aux}")
            }
            BlockReason::SubstitutionSite => write!(f, "node is marked for substitution"),
            BlockReason::NotAdjoinable { label } => {
                write!(f, "terminal node {label} cannot host an adjunction")
            }
            BlockReason::NotAnAuxiliary { name } => {
                write!(f, "{name} is not an auxiliary tree")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TagError {
    #[error("address {addr} does not resolve in {tree}")]
    AddressOutOfRange { tree: String, addr: GornAddress },

    #[error("the root address has no parent")]
    RootHasNoParent,

    #[error("adjunction at {addr} rejected: {reason}")]
    AdjunctionBlocked {
        addr: GornAddress,
        reason: BlockReason,
    },

    #[error("node at {addr} is not a substitution site")]
    NotASubstitutionSite { addr: GornAddress },

    #[error("substitution at {addr} expects label {expected}, found {found}")]
    SubstitutionLabelMismatch {
        addr: GornAddress,
        expected: String,
        found: String,
    },

    #[error("auxiliary tree {name} cannot be substituted")]
    AuxiliaryTreeRejected { name: String },

    #[error("tree {tree} has no anchor node")]
    NoAnchor { tree: String },

    #[error("tree {tree} has {count} anchor nodes, expected exactly one")]
    MultipleAnchors { tree: String, count: usize },

    #[error("anchor of tree {tree} already carries lexeme '{lexeme}'")]
    AlreadyAnchored { tree: String, lexeme: String },

    #[error("family {family} requires an adposition")]
    MissingAdposition { family: String },

    #[error("tree {tree} carries no anchored lexical item")]
    MissingAnchor { tree: String },

    #[error("unknown tree {name}")]
    UnknownTree { name: String },

    #[error("unknown family {name}")]
    UnknownFamily { name: String },

    #[error("duplicate tree name {name}")]
    DuplicateTreeName { name: String },

    #[error("invalid grammar:\n{report}")]
    InvalidGrammar { report: ValidationReport },

    #[error("invalid derivation:\n{report}")]
    InvalidDerivation { report: ValidationReport },

    #[error("grammar has empty-yield trees and no tree-use bound: {detail}")]
    UnboundedGrammar { detail: String },

    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("the empty string is derivable (epsilon production for {lhs})")]
    EmptyStringDerivable { lhs: String },

    #[error("unit-production cycle detected: {cycle}")]
    UnitCycleDetected { cycle: String },
}

impl TagError {
    pub fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        TagError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }
}
