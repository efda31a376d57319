//! The grammar model: symbols, markers, adjoining constraints, elementary
//! trees and the grammar quintuple, plus structural validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Result, TagError};
use crate::gorn::GornAddress;
use crate::lexicon::{self, TreeFamily};

/// A terminal or nonterminal symbol. The two vocabularies must stay
/// disjoint; the empty terminal is the designated epsilon.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(String),
    Nonterminal(String),
}

impl Symbol {
    pub fn terminal(text: impl Into<String>) -> Self {
        Symbol::Terminal(text.into())
    }

    pub fn nonterminal(text: impl Into<String>) -> Self {
        Symbol::Nonterminal(text.into())
    }

    pub fn epsilon() -> Self {
        Symbol::Terminal(String::new())
    }

    pub fn text(&self) -> &str {
        match self {
            Symbol::Terminal(t) | Symbol::Nonterminal(t) => t,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }

    pub fn is_nonterminal(&self) -> bool {
        matches!(self, Symbol::Nonterminal(_))
    }

    pub fn is_epsilon(&self) -> bool {
        matches!(self, Symbol::Terminal(t) if t.is_empty())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(t) => write!(f, "'{t}'"),
            Symbol::Nonterminal(t) => write!(f, "{t}"),
        }
    }
}

/// Node decorations: substitution site, foot node, anchor, lexical item.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Marker {
    #[default]
    None,
    Substitution,
    Foot,
    Anchor,
    Lexical,
}

/// A set of auxiliary-tree names, or the full set A.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NameSet {
    /// Every auxiliary tree of the grammar.
    Any,
    Listed(BTreeSet<String>),
}

impl NameSet {
    pub fn listed<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        NameSet::Listed(names.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, name: Option<&str>) -> bool {
        match self {
            NameSet::Any => true,
            NameSet::Listed(set) => name.is_some_and(|n| set.contains(n)),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, NameSet::Listed(set) if set.is_empty())
    }
}

/// Per-node adjunction policy.
///
/// `Selective(Any)` is the unconstrained default: any auxiliary tree may
/// adjoin, none has to. `Null` disallows adjunction and is equivalent to
/// `Selective` over the empty set under [`AdjConstraint::normalized`].
/// `Obligatory` demands that some admitted auxiliary tree adjoins; an
/// obligatory constraint over an empty explicit set means "any auxiliary
/// tree, mandatorily" and normalizes to `Obligatory(Any)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AdjConstraint {
    Selective(NameSet),
    Null,
    Obligatory(NameSet),
}

impl Default for AdjConstraint {
    fn default() -> Self {
        AdjConstraint::Selective(NameSet::Any)
    }
}

impl AdjConstraint {
    /// NA rewritten as SA over the empty set, OA over an empty set
    /// rewritten as OA over the full set; everything else unchanged.
    pub fn normalized(&self) -> AdjConstraint {
        match self {
            AdjConstraint::Null => AdjConstraint::Selective(NameSet::Listed(BTreeSet::new())),
            AdjConstraint::Obligatory(set) if set.is_empty() => {
                AdjConstraint::Obligatory(NameSet::Any)
            }
            other => other.clone(),
        }
    }

    /// Equality after normalization.
    pub fn equivalent(&self, other: &AdjConstraint) -> bool {
        self.normalized() == other.normalized()
    }

    /// Does the constraint admit the named auxiliary tree at all?
    pub fn admits(&self, aux_name: Option<&str>) -> bool {
        match self.normalized() {
            AdjConstraint::Null => false,
            AdjConstraint::Selective(set) | AdjConstraint::Obligatory(set) => {
                set.contains(aux_name)
            }
        }
    }

    pub fn forbids_adjunction(&self) -> bool {
        match self.normalized() {
            AdjConstraint::Null => true,
            AdjConstraint::Selective(set) => set.is_empty(),
            AdjConstraint::Obligatory(_) => false,
        }
    }

    pub fn is_obligatory(&self) -> bool {
        matches!(self, AdjConstraint::Obligatory(_))
    }

    pub fn is_default(&self) -> bool {
        matches!(self, AdjConstraint::Selective(NameSet::Any))
    }
}

/// A labeled tree node. Children are ordered; frontier nodes have none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Symbol,
    pub marker: Marker,
    pub constraint: AdjConstraint,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn new(label: Symbol, marker: Marker) -> Self {
        TreeNode {
            label,
            marker,
            constraint: AdjConstraint::default(),
            children: Vec::new(),
        }
    }

    pub fn interior(label: &str) -> Self {
        TreeNode::new(Symbol::nonterminal(label), Marker::None)
    }

    pub fn terminal(token: &str) -> Self {
        TreeNode::new(Symbol::terminal(token), Marker::None)
    }

    pub fn epsilon() -> Self {
        TreeNode::new(Symbol::epsilon(), Marker::None)
    }

    pub fn substitution(label: &str) -> Self {
        let mut node = TreeNode::new(Symbol::nonterminal(label), Marker::Substitution);
        // Adjunction on a substitution site is never permitted.
        node.constraint = AdjConstraint::Null;
        node
    }

    pub fn foot(label: &str) -> Self {
        TreeNode::new(Symbol::nonterminal(label), Marker::Foot)
    }

    pub fn anchor(label: &str) -> Self {
        TreeNode::new(Symbol::nonterminal(label), Marker::Anchor)
    }

    pub fn lexical(token: &str) -> Self {
        TreeNode::new(Symbol::terminal(token), Marker::Lexical)
    }

    pub fn with_children(mut self, children: Vec<TreeNode>) -> Self {
        self.children = children;
        self
    }

    pub fn with_constraint(mut self, constraint: AdjConstraint) -> Self {
        self.constraint = constraint;
        self
    }

    pub fn is_frontier(&self) -> bool {
        self.children.is_empty()
    }

    /// The word carried by a lexical node.
    pub fn lexeme(&self) -> Option<&str> {
        match self.marker {
            Marker::Lexical => Some(self.label.text()),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(TreeNode::node_count)
            .sum::<usize>()
    }

    /// Resolve a Gorn address relative to this node.
    pub fn descendant(&self, addr: &GornAddress) -> Option<&TreeNode> {
        let mut node = self;
        for &step in addr.steps() {
            node = node.children.get(step as usize - 1)?;
        }
        Some(node)
    }

    /// Preorder traversal with addresses.
    pub fn walk(&self) -> Vec<(GornAddress, &TreeNode)> {
        let mut out = Vec::with_capacity(self.node_count());
        fn go<'a>(
            node: &'a TreeNode,
            addr: GornAddress,
            out: &mut Vec<(GornAddress, &'a TreeNode)>,
        ) {
            out.push((addr.clone(), node));
            for (i, child) in node.children.iter().enumerate() {
                go(child, addr.child(i as u32 + 1), out);
            }
        }
        go(self, GornAddress::root(), &mut out);
        out
    }

    /// Frontier tokens left to right. Epsilon leaves and nonterminal
    /// frontier nodes contribute nothing.
    pub fn frontier_tokens(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(node: &'a TreeNode, out: &mut Vec<&'a str>) {
            if node.is_frontier() {
                if node.label.is_terminal() && !node.label.is_epsilon() {
                    out.push(node.label.text());
                }
            } else {
                for child in &node.children {
                    go(child, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Initial,
    Auxiliary,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeKind::Initial => write!(f, "initial"),
            TreeKind::Auxiliary => write!(f, "auxiliary"),
        }
    }
}

/// A named initial or auxiliary tree. The node index is the tree structure
/// itself: addresses are resolved by walking child lists, so index and
/// structure cannot drift apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryTree {
    name: String,
    kind: TreeKind,
    root: TreeNode,
}

impl ElementaryTree {
    pub fn new(name: impl Into<String>, kind: TreeKind, root: TreeNode) -> Self {
        ElementaryTree {
            name: name.into(),
            kind,
            root,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn node_at(&self, addr: &GornAddress) -> Result<&TreeNode> {
        self.root
            .descendant(addr)
            .ok_or(TagError::AddressOutOfRange {
                tree: self.name.clone(),
                addr: addr.clone(),
            })
    }

    pub fn addresses(&self) -> Vec<(GornAddress, &TreeNode)> {
        self.root.walk()
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn foot_address(&self) -> Option<GornAddress> {
        self.addresses()
            .into_iter()
            .find(|(_, n)| n.marker == Marker::Foot)
            .map(|(a, _)| a)
    }

    pub fn substitution_sites(&self) -> Vec<GornAddress> {
        self.addresses()
            .into_iter()
            .filter(|(_, n)| n.marker == Marker::Substitution)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn anchor_addresses(&self) -> Vec<GornAddress> {
        self.addresses()
            .into_iter()
            .filter(|(_, n)| n.marker == Marker::Anchor)
            .map(|(a, _)| a)
            .collect()
    }

    /// Tokens the tree contributes by itself (no substituted material).
    pub fn own_yield(&self) -> Vec<&str> {
        self.root.frontier_tokens()
    }
}

/// One validation finding. Violations are data, not failures: collecting
/// them never aborts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub tree: Option<String>,
    pub address: Option<GornAddress>,
    pub rule: String,
}

impl Violation {
    pub fn new(tree: Option<&str>, address: Option<GornAddress>, rule: impl Into<String>) -> Self {
        Violation {
            tree: tree.map(str::to_owned),
            address,
            rule: rule.into(),
        }
    }

    pub fn grammar_level(rule: impl Into<String>) -> Self {
        Violation::new(None, None, rule)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tree = self.tree.as_deref().unwrap_or("grammar");
        match &self.address {
            Some(addr) => write!(f, "{tree}:{addr}: {}", self.rule),
            None => write!(f, "{tree}:-: {}", self.rule),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport(Vec<Violation>);

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport(Vec::new())
    }

    pub fn push(&mut self, violation: Violation) {
        self.0.push(violation);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.0
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.0.extend(other.0);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl IntoIterator for ValidationReport {
    type Item = Violation;
    type IntoIter = std::vec::IntoIter<Violation>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// The TAG quintuple: terminal and nonterminal vocabularies, a start
/// symbol, and named initial and auxiliary trees. Grammars are immutable
/// once built and safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct Grammar {
    start: String,
    initial: BTreeMap<String, ElementaryTree>,
    auxiliary: BTreeMap<String, ElementaryTree>,
    families: BTreeMap<String, TreeFamily>,
    terminals: BTreeSet<String>,
    nonterminals: BTreeSet<String>,
    lexicalized: bool,
}

impl Grammar {
    pub fn new(
        start: impl Into<String>,
        trees: Vec<ElementaryTree>,
        families: Vec<TreeFamily>,
    ) -> Result<Self> {
        let start = start.into();
        let mut initial = BTreeMap::new();
        let mut auxiliary = BTreeMap::new();
        let mut terminals = BTreeSet::new();
        let mut nonterminals = BTreeSet::new();
        nonterminals.insert(start.clone());

        for tree in trees {
            for (_, node) in tree.addresses() {
                match &node.label {
                    Symbol::Terminal(t) if !t.is_empty() => {
                        terminals.insert(t.clone());
                    }
                    Symbol::Nonterminal(nt) => {
                        nonterminals.insert(nt.clone());
                    }
                    _ => {}
                }
            }
            let name = tree.name().to_owned();
            if initial.contains_key(&name) || auxiliary.contains_key(&name) {
                return Err(TagError::DuplicateTreeName { name });
            }
            match tree.kind() {
                TreeKind::Initial => initial.insert(name, tree),
                TreeKind::Auxiliary => auxiliary.insert(name, tree),
            };
        }

        let families = families
            .into_iter()
            .map(|f| (f.name().to_owned(), f))
            .collect();

        let lexicalized = initial
            .values()
            .chain(auxiliary.values())
            .all(|t| lexicon::is_fully_anchored(t) && lexicon::postulate_violations(t).is_empty());
        Ok(Grammar {
            start,
            initial,
            auxiliary,
            families,
            terminals,
            nonterminals,
            lexicalized,
        })
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn tree(&self, name: &str) -> Option<&ElementaryTree> {
        self.initial.get(name).or_else(|| self.auxiliary.get(name))
    }

    pub fn initial_trees(&self) -> impl Iterator<Item = &ElementaryTree> {
        self.initial.values()
    }

    pub fn auxiliary_trees(&self) -> impl Iterator<Item = &ElementaryTree> {
        self.auxiliary.values()
    }

    pub fn all_trees(&self) -> impl Iterator<Item = &ElementaryTree> {
        self.initial.values().chain(self.auxiliary.values())
    }

    pub fn tree_count(&self) -> usize {
        self.initial.len() + self.auxiliary.len()
    }

    pub fn families(&self) -> impl Iterator<Item = &TreeFamily> {
        self.families.values()
    }

    pub fn family(&self, name: &str) -> Option<&TreeFamily> {
        self.families.get(name)
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }

    /// True when every tree carries exactly one anchor with its lexical
    /// item attached and the anchoring postulates hold.
    pub fn is_lexicalized(&self) -> bool {
        self.lexicalized
    }

    /// Structural validation. Idempotent and read-only; the report is
    /// empty exactly when every invariant holds.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();

        for text in self.terminals.intersection(&self.nonterminals) {
            report.push(Violation::grammar_level(format!(
                "'{text}' is used both as a terminal and as a nonterminal"
            )));
        }

        let aux_names: BTreeSet<&str> = self.auxiliary.keys().map(String::as_str).collect();

        for tree in self.all_trees() {
            self.validate_tree(tree, &aux_names, &mut report);
        }
        report
    }

    fn validate_tree(
        &self,
        tree: &ElementaryTree,
        aux_names: &BTreeSet<&str>,
        report: &mut ValidationReport,
    ) {
        let name = tree.name();
        let mut feet = Vec::new();
        let mut anchors = 0usize;

        for (addr, node) in tree.addresses() {
            let at = |rule: String| Violation::new(Some(name), Some(addr.clone()), rule);

            match node.marker {
                Marker::Foot => feet.push((addr.clone(), node)),
                Marker::Anchor => anchors += 1,
                _ => {}
            }

            // Marker placement.
            match node.marker {
                Marker::Substitution | Marker::Foot => {
                    if node.label.is_terminal() {
                        report.push(at(format!(
                            "{} marker on a terminal node",
                            marker_name(node.marker)
                        )));
                    }
                    if !node.is_frontier() {
                        report.push(at(format!(
                            "{} node must be on the frontier",
                            marker_name(node.marker)
                        )));
                    }
                }
                Marker::Anchor => {
                    if node.label.is_terminal() {
                        report.push(at("anchor label must be a nonterminal".into()));
                    }
                }
                Marker::Lexical => {
                    if !node.label.is_terminal() {
                        report.push(at("lexical node must carry a terminal".into()));
                    }
                    if !node.is_frontier() {
                        report.push(at("lexical node must be a leaf".into()));
                    }
                }
                Marker::None => {}
            }

            // Symbol texts are non-empty and whitespace-free; the empty
            // terminal is the designated epsilon.
            match &node.label {
                Symbol::Nonterminal(t) if t.is_empty() || t.chars().any(char::is_whitespace) => {
                    report.push(at("nonterminal label must be a non-empty token".into()));
                }
                Symbol::Terminal(t) if t.chars().any(char::is_whitespace) => {
                    report.push(at("terminal token cannot contain whitespace".into()));
                }
                _ => {}
            }

            // Interior nodes are labeled by nonterminals.
            if !node.is_frontier() && node.label.is_terminal() {
                report.push(at("interior node labeled by a terminal".into()));
            }

            // Terminal leaves hang below interior structure, never carry markers
            // other than lexical, and epsilon appears only as a plain leaf.
            if node.label.is_epsilon() && node.marker != Marker::None {
                report.push(at("epsilon leaf cannot carry a marker".into()));
            }

            // Frontier nonterminals must be substitution sites, the foot, or
            // an (as yet unanchored) anchor.
            if node.is_frontier()
                && node.label.is_nonterminal()
                && !matches!(
                    node.marker,
                    Marker::Substitution | Marker::Foot | Marker::Anchor
                )
            {
                report.push(at("frontier nonterminal not marked for substitution".into()));
            }

            // Substitution sites carry implicit NA; anything else is a
            // grammar-author error we surface rather than ignore.
            if node.marker == Marker::Substitution
                && !node.constraint.equivalent(&AdjConstraint::Null)
            {
                report.push(at(
                    "substitution node cannot carry an adjoining constraint".into()
                ));
            }

            // Constraints on terminals are meaningless.
            if node.label.is_terminal() && !node.constraint.is_default() {
                report.push(at("adjoining constraint on a terminal node".into()));
            }

            // Constraint sets may only name auxiliary trees of this grammar.
            if let AdjConstraint::Selective(NameSet::Listed(set))
            | AdjConstraint::Obligatory(NameSet::Listed(set)) = &node.constraint
            {
                for n in set {
                    if !aux_names.contains(n.as_str()) {
                        report.push(at(format!(
                            "constraint names '{n}', which is not an auxiliary tree"
                        )));
                    }
                }
            }

            // Anchors dominate at most their lexical node.
            if node.marker == Marker::Anchor {
                if node.children.len() > 1 {
                    report.push(at("anchor node may only dominate its lexical node".into()));
                } else if let Some(child) = node.children.first() {
                    if child.marker != Marker::Lexical {
                        report.push(at("anchor child must be a lexical node".into()));
                    }
                }
            } else if node.children.iter().any(|c| c.marker == Marker::Lexical) {
                report.push(at("lexical node below a non-anchor".into()));
            }
        }

        if anchors > 1 {
            report.push(Violation::new(
                Some(name),
                None,
                format!("postulate 5: tree has {anchors} anchors, expected at most one"),
            ));
        }

        match tree.kind() {
            TreeKind::Initial => {
                if !feet.is_empty() {
                    report.push(Violation::new(
                        Some(name),
                        Some(feet[0].0.clone()),
                        "initial tree may not contain a foot node",
                    ));
                }
            }
            TreeKind::Auxiliary => {
                if feet.len() != 1 {
                    report.push(Violation::new(
                        Some(name),
                        None,
                        format!(
                            "auxiliary tree must have exactly one foot node, found {}",
                            feet.len()
                        ),
                    ));
                } else if feet[0].1.label != tree.root().label {
                    report.push(Violation::new(
                        Some(name),
                        Some(feet[0].0.clone()),
                        "foot/root label mismatch",
                    ));
                }
                if self.lexicalized && tree.own_yield().is_empty() {
                    report.push(Violation::new(
                        Some(name),
                        None,
                        "lexicalized auxiliary tree has an empty terminal yield",
                    ));
                }
            }
        }
    }
}

fn marker_name(m: Marker) -> &'static str {
    match m {
        Marker::None => "plain",
        Marker::Substitution => "substitution",
        Marker::Foot => "foot",
        Marker::Anchor => "anchor",
        Marker::Lexical => "lexical",
    }
}
