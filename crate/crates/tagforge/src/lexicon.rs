//! The lexicalized-TAG layer: word-to-tree mapping, anchor attachment,
//! parameterized tree families, and the anchoring postulates.
//!
//! Anchoring follows seven numbered postulates, referenced by number in
//! validation messages:
//!
//! 1. an anchor carries a non-empty lexical item;
//! 2. anchor nodes are labeled by POS-class nonterminals;
//! 3. those POS labels stand for the word classes the lexicon maps onto
//!    them (they are ordinary nonterminals, not a third symbol kind);
//! 4. adjunction at anchor nodes works normally unless the node carries
//!    an overriding constraint;
//! 5. every elementary tree has exactly one anchor;
//! 6. lexical nodes appear only directly below an anchor, inserted there
//!    when a word is attached;
//! 7. anchor and lexical item are separate nodes, the lexical leaf being
//!    the anchor's sole child.

use std::collections::BTreeMap;

use crate::derivation::anchor_lexeme;
use crate::error::{Result, TagError};
use crate::grammar::{
    ElementaryTree, Grammar, Marker, TreeKind, TreeNode, ValidationReport, Violation,
};

/// Placeholder token used in family skeletons for the adposition co-anchor.
pub const ADPOSITION_SLOT: &str = "$adposition";

/// One lexicon entry: the tree or family the word anchors, plus the
/// adposition for families that need a co-anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub target: String,
    pub adposition: Option<String>,
}

impl LexEntry {
    pub fn tree(target: impl Into<String>) -> Self {
        LexEntry {
            target: target.into(),
            adposition: None,
        }
    }

    pub fn with_adposition(target: impl Into<String>, adposition: impl Into<String>) -> Self {
        LexEntry {
            target: target.into(),
            adposition: Some(adposition.into()),
        }
    }
}

/// Maps words to the elementary structures they anchor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<LexEntry>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn add(&mut self, word: impl Into<String>, entry: LexEntry) {
        self.entries.entry(word.into()).or_default().push(entry);
    }

    pub fn for_word(&self, word: &str) -> &[LexEntry] {
        self.entries.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &[LexEntry])> {
        self.entries.iter().map(|(w, e)| (w.as_str(), e.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Check every entry against the grammar: targets exist, tree targets
    /// are anchorable, pre-anchored targets carry the entry's word, and
    /// families get an adposition exactly when they need one.
    pub fn validate(&self, grammar: &Grammar) -> ValidationReport {
        let mut report = ValidationReport::new();
        for (word, entries) in &self.entries {
            for entry in entries {
                let flag = |rule: String| {
                    Violation::new(Some(entry.target.as_str()), None, format!("{word}: {rule}"))
                };
                if let Some(tree) = grammar.tree(&entry.target) {
                    let anchors = tree.anchor_addresses();
                    if anchors.len() != 1 {
                        report.push(flag(format!(
                            "target tree has {} anchors, expected one",
                            anchors.len()
                        )));
                    } else if let Some(lexeme) = anchor_lexeme(tree) {
                        if lexeme != *word {
                            report.push(flag(format!(
                                "tree is anchored by '{lexeme}', not by this word"
                            )));
                        }
                    }
                    if entry.adposition.is_some() {
                        report.push(flag("adposition given for a plain tree target".into()));
                    }
                } else if let Some(family) = grammar.family(&entry.target) {
                    if family.requires_adposition() && entry.adposition.is_none() {
                        report.push(flag("family requires an adposition".into()));
                    }
                    if !family.requires_adposition() && entry.adposition.is_some() {
                        report.push(flag("family takes no adposition".into()));
                    }
                } else {
                    report.push(flag("target names no tree or family".into()));
                }
            }
        }
        report
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadDirection {
    HeadInitial,
    HeadFinal,
}

impl HeadDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            HeadDirection::HeadInitial => "head-initial",
            HeadDirection::HeadFinal => "head-final",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "head-initial" => Some(HeadDirection::HeadInitial),
            "head-final" => Some(HeadDirection::HeadFinal),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdpositionOrder {
    Pre,
    Post,
}

impl AdpositionOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            AdpositionOrder::Pre => "pre",
            AdpositionOrder::Post => "post",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pre" => Some(AdpositionOrder::Pre),
            "post" => Some(AdpositionOrder::Post),
            _ => None,
        }
    }
}

/// A parameterized tree template selected by a verb class. The skeleton
/// carries one unanchored anchor node (the verb slot) and, for adpositional
/// families, a terminal placeholder for the co-anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeFamily {
    name: String,
    kind: TreeKind,
    head_direction: HeadDirection,
    adposition_order: Option<AdpositionOrder>,
    skeleton: TreeNode,
}

impl TreeFamily {
    pub fn new(
        name: impl Into<String>,
        kind: TreeKind,
        head_direction: HeadDirection,
        adposition_order: Option<AdpositionOrder>,
        skeleton: TreeNode,
    ) -> Self {
        TreeFamily {
            name: name.into(),
            kind,
            head_direction,
            adposition_order,
            skeleton,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn head_direction(&self) -> HeadDirection {
        self.head_direction
    }

    pub fn adposition_order(&self) -> Option<AdpositionOrder> {
        self.adposition_order
    }

    pub fn skeleton(&self) -> &TreeNode {
        &self.skeleton
    }

    pub fn requires_adposition(&self) -> bool {
        fn has_slot(node: &TreeNode) -> bool {
            (node.label.is_terminal() && node.label.text() == ADPOSITION_SLOT)
                || node.children.iter().any(has_slot)
        }
        has_slot(&self.skeleton)
    }

    /// Produce the family's trees for a verb, with the adposition slot
    /// filled when present. The result is named `<family>_<verb>`.
    pub fn instantiate(&self, verb: &str, adposition: Option<&str>) -> Result<Vec<ElementaryTree>> {
        let mut root = self.skeleton.clone();
        if self.requires_adposition() {
            let adp = adposition.ok_or(TagError::MissingAdposition {
                family: self.name.clone(),
            })?;
            fill_slot(&mut root, adp);
        }
        let name = format!("{}_{}", self.name, verb);
        let tree = ElementaryTree::new(name, self.kind, root);
        Ok(vec![anchor_attach(&tree, verb)?])
    }
}

fn fill_slot(node: &mut TreeNode, adposition: &str) {
    if node.label.is_terminal() && node.label.text() == ADPOSITION_SLOT {
        node.label = crate::grammar::Symbol::terminal(adposition);
    }
    for child in &mut node.children {
        fill_slot(child, adposition);
    }
}

/// Insert the word as a lexical node below the tree's single anchor.
pub fn anchor_attach(tree: &ElementaryTree, word: &str) -> Result<ElementaryTree> {
    let anchors = tree.anchor_addresses();
    match anchors.len() {
        0 => {
            return Err(TagError::NoAnchor {
                tree: tree.name().to_owned(),
            })
        }
        1 => {}
        n => {
            return Err(TagError::MultipleAnchors {
                tree: tree.name().to_owned(),
                count: n,
            })
        }
    }
    if let Some(lexeme) = anchor_lexeme(tree) {
        return Err(TagError::AlreadyAnchored {
            tree: tree.name().to_owned(),
            lexeme,
        });
    }
    let mut root = tree.root().clone();
    attach_at(&mut root, anchors[0].steps(), word);
    Ok(ElementaryTree::new(tree.name(), tree.kind(), root))
}

fn attach_at(node: &mut TreeNode, path: &[u32], word: &str) {
    match path.split_first() {
        None => node.children.push(TreeNode::lexical(word)),
        Some((&step, rest)) => attach_at(&mut node.children[step as usize - 1], rest, word),
    }
}

/// Does the tree still have an empty anchor slot?
pub fn is_skeleton(tree: &ElementaryTree) -> bool {
    tree.addresses()
        .iter()
        .any(|(_, n)| n.marker == Marker::Anchor && n.children.is_empty())
}

/// Exactly one anchor, carrying its lexical node.
pub fn is_fully_anchored(tree: &ElementaryTree) -> bool {
    tree.anchor_addresses().len() == 1 && anchor_lexeme(tree).is_some()
}

/// Per-tree anchoring checks shared by `check_postulates` and the
/// grammar's lexicalized flag.
pub fn postulate_violations(tree: &ElementaryTree) -> Vec<Violation> {
    let mut out = Vec::new();
    let name = tree.name();
    let mut anchors = 0usize;

    for (addr, node) in tree.addresses() {
        let at = |rule: String| Violation::new(Some(name), Some(addr.clone()), rule);
        match node.marker {
            Marker::Anchor => {
                anchors += 1;
                if node.label.is_terminal() {
                    out.push(at(
                        "postulate 2: anchor label must be a POS nonterminal".into()
                    ));
                }
                match node.children.as_slice() {
                    [] => {}
                    [child] => {
                        if child.marker != Marker::Lexical {
                            out.push(at("postulate 7: anchor child must be a lexical node".into()));
                        } else if child.label.text().is_empty() {
                            out.push(at("postulate 1: anchor lexeme must be non-empty".into()));
                        }
                    }
                    _ => out.push(at(
                        "postulate 7: anchor dominates more than its lexical node".into(),
                    )),
                }
            }
            Marker::Lexical => {
                if !node.is_frontier() {
                    out.push(at("postulate 7: lexical node must be a leaf".into()));
                }
                if addr.is_root() {
                    out.push(at("postulate 6: lexical node cannot be a root".into()));
                }
            }
            _ => {
                if node.children.iter().any(|c| c.marker == Marker::Lexical) {
                    out.push(Violation::new(
                        Some(name),
                        Some(addr.clone()),
                        "postulate 6: lexical node below a non-anchor",
                    ));
                }
            }
        }
    }

    if anchors != 1 {
        out.push(Violation::new(
            Some(name),
            None,
            format!("postulate 5: tree must have exactly one anchor, found {anchors}"),
        ));
    }
    out
}

/// Verify the anchoring postulates for every tree of the grammar.
pub fn check_postulates(grammar: &Grammar) -> ValidationReport {
    let mut report = ValidationReport::new();
    for tree in grammar.all_trees() {
        for v in postulate_violations(tree) {
            report.push(v);
        }
    }
    report
}

/// All anchored trees a word selects: plain tree targets are attached (or
/// passed through when pre-anchored with the same word), family targets are
/// instantiated. Unknown words select nothing. Entries that fail to
/// resolve are skipped; run [`Lexicon::validate`] first to surface them.
pub fn select_trees(lexicon: &Lexicon, word: &str, grammar: &Grammar) -> Vec<ElementaryTree> {
    let mut out = Vec::new();
    for entry in lexicon.for_word(word) {
        if let Some(tree) = grammar.tree(&entry.target) {
            if is_skeleton(tree) {
                if let Ok(anchored) = anchor_attach(tree, word) {
                    out.push(ElementaryTree::new(
                        format!("{}_{}", tree.name(), word),
                        anchored.kind(),
                        anchored.root().clone(),
                    ));
                }
            } else if anchor_lexeme(tree).as_deref() == Some(word) {
                out.push(tree.clone());
            }
        } else if let Some(family) = grammar.family(&entry.target) {
            if let Ok(trees) = family.instantiate(word, entry.adposition.as_deref()) {
                out.extend(trees);
            }
        }
    }
    out
}

/// Assemble the effective grammar for a token sequence: the grammar's own
/// complete trees plus every tree the lexicon selects for an input token.
pub fn grammar_for_input(grammar: &Grammar, lexicon: &Lexicon, tokens: &[&str]) -> Result<Grammar> {
    let mut trees: Vec<ElementaryTree> = grammar
        .all_trees()
        .filter(|t| !is_skeleton(t))
        .cloned()
        .collect();
    let mut seen: std::collections::BTreeSet<String> =
        trees.iter().map(|t| t.name().to_owned()).collect();

    let mut distinct: Vec<&str> = tokens.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for token in distinct {
        for tree in select_trees(lexicon, token, grammar) {
            if seen.insert(tree.name().to_owned()) {
                trees.push(tree);
            }
        }
    }
    Grammar::new(grammar.start(), trees, vec![])
}
