//! Converting finitely ambiguous, epsilon-free context-free grammars into
//! lexicalized tree adjoining grammars that derive the same string
//! language, plus bounded language comparison for checking the result.
//!
//! The construction separates the recursive from the non-recursive part of
//! the grammar. Initial trees are the complete derivation trees in which
//! no nonterminal repeats along any root-to-leaf path; every recursion
//! `B ⇒* αBβ` instead becomes an auxiliary tree rooted and footed in `B`,
//! again with no other repetition on any path. Both sets are finite, every
//! tree carries at least one terminal, and adjunction reassembles exactly
//! the derivations the initial trees gave up.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, TagError};
use crate::grammar::{ElementaryTree, Grammar, Marker, Symbol, TreeKind, TreeNode};
use crate::oracle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
}

/// A context-free grammar over quoted terminals and bare nonterminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextFreeGrammar {
    pub start: String,
    pub productions: Vec<Production>,
}

impl ContextFreeGrammar {
    pub fn new(start: impl Into<String>, productions: Vec<Production>) -> Self {
        ContextFreeGrammar {
            start: start.into(),
            productions,
        }
    }

    pub fn nonterminals(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = self.productions.iter().map(|p| p.lhs.as_str()).collect();
        out.insert(self.start.as_str());
        out
    }

    fn productions_for<'a>(&'a self, nt: &'a str) -> impl Iterator<Item = &'a Production> + 'a {
        self.productions.iter().filter(move |p| p.lhs == nt)
    }

    /// Reject epsilon productions and unit-production cycles. These are the
    /// conservative sufficient conditions for finite ambiguity accepted
    /// here; anything else would let the converter loop.
    pub fn check_preconditions(&self) -> Result<()> {
        for p in &self.productions {
            if p.rhs.is_empty() {
                return Err(TagError::EmptyStringDerivable { lhs: p.lhs.clone() });
            }
        }
        // Unit graph: A -> B edges for productions with a single nonterminal.
        let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for p in &self.productions {
            if let [Symbol::Nonterminal(b)] = p.rhs.as_slice() {
                edges.entry(p.lhs.as_str()).or_default().push(b.as_str());
            }
        }
        for &start in edges.keys() {
            let mut stack = vec![(start, vec![start])];
            while let Some((nt, path)) = stack.pop() {
                for &next in edges.get(nt).map(Vec::as_slice).unwrap_or(&[]) {
                    if next == start {
                        let mut cycle = path.clone();
                        cycle.push(next);
                        return Err(TagError::UnitCycleDetected {
                            cycle: cycle.join(" -> "),
                        });
                    }
                    if !path.contains(&next) {
                        let mut path = path.clone();
                        path.push(next);
                        stack.push((next, path));
                    }
                }
            }
        }
        Ok(())
    }

    /// Parse the one-production-per-line text format:
    /// `LHS -> sym sym ...` with terminals quoted and `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut productions = Vec::new();
        let mut start: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| TagError::syntax(line_no, 1, "expected 'LHS -> sym sym ...'"))?;
            let lhs = lhs.trim();
            if lhs.is_empty() || lhs.chars().any(char::is_whitespace) {
                return Err(TagError::syntax(
                    line_no,
                    1,
                    "left-hand side must be one nonterminal",
                ));
            }
            let mut symbols = Vec::new();
            for word in rhs.split_whitespace() {
                if let Some(tok) = word.strip_prefix('\'').and_then(|w| w.strip_suffix('\'')) {
                    if tok.is_empty() {
                        return Err(TagError::EmptyStringDerivable {
                            lhs: lhs.to_owned(),
                        });
                    }
                    symbols.push(Symbol::terminal(tok));
                } else {
                    symbols.push(Symbol::nonterminal(word));
                }
            }
            if start.is_none() {
                start = Some(lhs.to_owned());
            }
            productions.push(Production {
                lhs: lhs.to_owned(),
                rhs: symbols,
            });
        }
        let start = start.ok_or_else(|| TagError::syntax(1, 1, "no productions"))?;
        Ok(ContextFreeGrammar::new(start, productions))
    }

    /// Shortest-yield length per nonterminal, by fixpoint. Dead
    /// nonterminals stay at `usize::MAX` and prune enumeration.
    fn min_lengths(&self) -> BTreeMap<&str, usize> {
        let mut min: BTreeMap<&str, usize> = self
            .nonterminals()
            .iter()
            .map(|&nt| (nt, usize::MAX))
            .collect();
        loop {
            let mut changed = false;
            for p in &self.productions {
                let mut total: usize = 0;
                let mut known = true;
                for sym in &p.rhs {
                    match sym {
                        Symbol::Terminal(_) => total += 1,
                        Symbol::Nonterminal(nt) => match min.get(nt.as_str()) {
                            Some(&v) if v != usize::MAX => total += v,
                            _ => {
                                known = false;
                                break;
                            }
                        },
                    }
                }
                if known && total < min[p.lhs.as_str()] {
                    min.insert(p.lhs.as_str(), total);
                    changed = true;
                }
            }
            if !changed {
                return min;
            }
        }
    }

    /// Every derivable string of length at most `k`.
    pub fn strings_up_to(&self, k: usize) -> BTreeSet<Vec<String>> {
        let min = self.min_lengths();
        let floor = |form: &[Symbol]| -> usize {
            form.iter()
                .map(|s| match s {
                    Symbol::Terminal(_) => 1,
                    Symbol::Nonterminal(nt) => min.get(nt.as_str()).copied().unwrap_or(usize::MAX),
                })
                .fold(0usize, usize::saturating_add)
        };

        let mut out = BTreeSet::new();
        let mut stack = vec![vec![Symbol::nonterminal(&self.start)]];
        while let Some(form) = stack.pop() {
            if floor(&form) > k {
                continue;
            }
            match form
                .iter()
                .position(|s| matches!(s, Symbol::Nonterminal(_)))
            {
                None => {
                    out.insert(form.into_iter().map(|s| s.text().to_owned()).collect());
                }
                Some(i) => {
                    let nt = form[i].text().to_owned();
                    for p in self.productions_for(&nt) {
                        let mut next = Vec::with_capacity(form.len() + p.rhs.len());
                        next.extend_from_slice(&form[..i]);
                        next.extend(p.rhs.iter().cloned());
                        next.extend_from_slice(&form[i + 1..]);
                        stack.push(next);
                    }
                }
            }
        }
        out
    }
}

/// Lexicalize a CFG into a TAG deriving the same string language.
pub fn cfg_to_ltag(cfg: &ContextFreeGrammar) -> Result<Grammar> {
    cfg.check_preconditions()?;

    let mut initial = Vec::new();
    grow_trees(
        cfg,
        &cfg.start,
        &mut vec![cfg.start.clone()],
        None,
        &mut initial,
    );

    let mut auxiliary = Vec::new();
    let mut recursive: Vec<&str> = cfg
        .nonterminals()
        .into_iter()
        .filter(|nt| cfg.productions_for(nt).next().is_some())
        .collect();
    recursive.sort_unstable();
    let mut aux_trees: Vec<(String, TreeNode)> = Vec::new();
    for nt in recursive {
        let mut found = Vec::new();
        grow_trees(cfg, nt, &mut vec![nt.to_owned()], Some(nt), &mut found);
        for root in found {
            aux_trees.push((nt.to_owned(), root));
        }
    }

    // Deterministic naming: sort structurally, then number.
    initial.sort_by_key(render_shape);
    let initial_trees: Vec<ElementaryTree> = initial
        .into_iter()
        .enumerate()
        .map(|(i, root)| ElementaryTree::new(format!("α_{}", i + 1), TreeKind::Initial, root))
        .collect();
    aux_trees.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| render_shape(&a.1).cmp(&render_shape(&b.1)))
    });
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    for (nt, root) in aux_trees {
        let n = counters.entry(nt.clone()).or_insert(0);
        *n += 1;
        auxiliary.push(ElementaryTree::new(
            format!("β_{nt}_{n}"),
            TreeKind::Auxiliary,
            root,
        ));
    }

    let all = initial_trees.into_iter().chain(auxiliary).collect();
    Grammar::new(&cfg.start, all, vec![])
}

/// Grow derivation fragments from `nt` with no repeated nonterminal on any
/// path. With `foot` set, exactly one frontier leaf is the foot labeled
/// like the root; without it, the frontier is all terminals.
fn grow_trees(
    cfg: &ContextFreeGrammar,
    nt: &str,
    path: &mut Vec<String>,
    foot: Option<&str>,
    out: &mut Vec<TreeNode>,
) {
    for p in cfg.productions_for(nt) {
        // Expansion states. Each child slot can hold several alternatives.
        let mut slots: Vec<Vec<(TreeNode, bool)>> = Vec::new(); // (subtree, contains foot)
        let mut viable = true;
        for sym in &p.rhs {
            match sym {
                Symbol::Terminal(t) => {
                    slots.push(vec![(TreeNode::terminal(t), false)]);
                }
                Symbol::Nonterminal(child) => {
                    let mut options: Vec<(TreeNode, bool)> = Vec::new();
                    if foot == Some(child.as_str()) {
                        options.push((TreeNode::foot(child), true));
                    }
                    if !path.contains(child) {
                        path.push(child.clone());
                        let mut complete = Vec::new();
                        grow_trees(cfg, child, path, None, &mut complete);
                        options.extend(complete.into_iter().map(|t| (t, false)));
                        if foot.is_some() {
                            let mut footed = Vec::new();
                            grow_trees(cfg, child, path, foot, &mut footed);
                            options.extend(footed.into_iter().map(|t| (t, true)));
                        }
                        path.pop();
                    }
                    if options.is_empty() {
                        viable = false;
                        break;
                    }
                    options.sort_by_key(|(t, _)| render_shape(t));
                    slots.push(options);
                }
            }
        }
        if !viable {
            continue;
        }
        // Combine, keeping exactly one foot when one is required.
        let mut acc: Vec<(Vec<TreeNode>, usize)> = vec![(Vec::new(), 0)];
        for options in &slots {
            let mut next = Vec::new();
            for (children, feet) in &acc {
                for (tree, has_foot) in options {
                    let feet = feet + usize::from(*has_foot);
                    if feet > 1 {
                        continue;
                    }
                    let mut children = children.clone();
                    children.push(tree.clone());
                    next.push((children, feet));
                }
            }
            acc = next;
        }
        let want_feet = usize::from(foot.is_some());
        for (children, feet) in acc {
            if feet == want_feet {
                out.push(TreeNode::interior(nt).with_children(children));
            }
        }
    }
}

fn render_shape(node: &TreeNode) -> String {
    let mut out = String::new();
    fn go(node: &TreeNode, out: &mut String) {
        out.push('(');
        out.push_str(node.label.text());
        if node.marker == Marker::Foot {
            out.push('*');
        }
        for c in &node.children {
            go(c, out);
        }
        out.push(')');
    }
    go(node, &mut out);
    out
}

/// Anything that can enumerate its strings up to a length bound.
pub enum LanguageSource<'a> {
    Cfg(&'a ContextFreeGrammar),
    Tag(&'a Grammar),
}

impl LanguageSource<'_> {
    pub fn strings_up_to(&self, k: usize) -> Result<BTreeSet<Vec<String>>> {
        match self {
            LanguageSource::Cfg(cfg) => Ok(cfg.strings_up_to(k)),
            LanguageSource::Tag(g) => oracle::strings_up_to(g, k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageComparison {
    pub equal: bool,
    /// A shortest string in the symmetric difference, if any.
    pub counterexample: Option<Vec<String>>,
}

/// Compare two string languages up to length `k`.
pub fn language_equal_upto(
    a: &LanguageSource,
    b: &LanguageSource,
    k: usize,
) -> Result<LanguageComparison> {
    let sa = a.strings_up_to(k)?;
    let sb = b.strings_up_to(k)?;
    if sa == sb {
        return Ok(LanguageComparison {
            equal: true,
            counterexample: None,
        });
    }
    let counterexample = sa
        .symmetric_difference(&sb)
        .min_by_key(|s| (s.len(), s.join(" ")))
        .cloned();
    Ok(LanguageComparison {
        equal: false,
        counterexample,
    })
}
