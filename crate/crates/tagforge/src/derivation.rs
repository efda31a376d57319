//! Derivation trees: the history objects recording which elementary trees
//! combined, by which operation, at which address. A derivation can be
//! validated against a grammar, replayed into a derived tree, and mined
//! for word-level dependencies.

use std::collections::BTreeMap;

use crate::algebra::WorkTree;
use crate::error::{Result, TagError};
use crate::gorn::GornAddress;
use crate::grammar::{ElementaryTree, Grammar, Marker, TreeKind, ValidationReport, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivOp {
    Root,
    Substitution,
    Adjunction,
}

/// One node of a derivation tree. `site` is an address in the *elementary*
/// tree named by the parent node; the root carries no site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationNode {
    pub tree_name: String,
    pub op: DerivOp,
    pub site: Option<GornAddress>,
    pub children: Vec<DerivationNode>,
}

impl DerivationNode {
    pub fn root(tree_name: impl Into<String>) -> Self {
        DerivationNode {
            tree_name: tree_name.into(),
            op: DerivOp::Root,
            site: None,
            children: Vec::new(),
        }
    }

    pub fn substitution(tree_name: impl Into<String>, site: GornAddress) -> Self {
        DerivationNode {
            tree_name: tree_name.into(),
            op: DerivOp::Substitution,
            site: Some(site),
            children: Vec::new(),
        }
    }

    pub fn adjunction(tree_name: impl Into<String>, site: GornAddress) -> Self {
        DerivationNode {
            tree_name: tree_name.into(),
            op: DerivOp::Adjunction,
            site: Some(site),
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<DerivationNode>) -> Self {
        self.children = children;
        self
    }

    /// Number of elementary-tree uses in the derivation.
    pub fn use_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(DerivationNode::use_count)
            .sum::<usize>()
    }

    pub fn edge_count(&self) -> usize {
        self.use_count() - 1
    }

    fn site_key(&self) -> String {
        self.site
            .as_ref()
            .map(|s| s.to_string())
            .unwrap_or_default()
    }

    /// Canonical text rendering: one node per line, two spaces of indent
    /// per depth, `name@site` with the root spelled `name@root`, children
    /// sorted by site string.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(&self.tree_name);
        out.push('@');
        match &self.site {
            Some(site) => out.push_str(&site.to_string()),
            None => out.push_str("root"),
        }
        out.push('\n');
        let mut kids: Vec<&DerivationNode> = self.children.iter().collect();
        kids.sort_by(|a, b| {
            a.site_key()
                .cmp(&b.site_key())
                .then_with(|| a.tree_name.cmp(&b.tree_name))
        });
        for kid in kids {
            kid.render_into(depth + 1, out);
        }
    }

    /// Validate against a grammar: tree names resolve, sites resolve in the
    /// parent's elementary tree, labels match, every substitution site is
    /// filled exactly once, OA and NA nodes are honored, sibling sites are
    /// pairwise distinct.
    pub fn validate(&self, grammar: &Grammar) -> ValidationReport {
        let mut report = ValidationReport::new();

        if self.op != DerivOp::Root || self.site.is_some() {
            report.push(Violation::new(
                Some(&self.tree_name),
                None,
                "derivation root must have op=root and no site",
            ));
        }
        match grammar.tree(&self.tree_name) {
            Some(t) if t.kind() == TreeKind::Initial => {
                if t.root().label.text() != grammar.start() {
                    report.push(Violation::new(
                        Some(&self.tree_name),
                        None,
                        format!(
                            "derivation root must be an {}-type initial tree",
                            grammar.start()
                        ),
                    ));
                }
            }
            Some(_) => report.push(Violation::new(
                Some(&self.tree_name),
                None,
                "derivation root must name an initial tree",
            )),
            None => report.push(Violation::new(Some(&self.tree_name), None, "unknown tree")),
        }

        self.validate_node(grammar, &mut report);
        report
    }

    fn validate_node(&self, grammar: &Grammar, report: &mut ValidationReport) {
        let Some(tree) = grammar.tree(&self.tree_name) else {
            // Reported at the root; unknown inner names reported here.
            if self.op != DerivOp::Root {
                report.push(Violation::new(Some(&self.tree_name), None, "unknown tree"));
            }
            return;
        };

        let mut seen: BTreeMap<GornAddress, usize> = BTreeMap::new();
        for child in &self.children {
            let violation = |addr: Option<GornAddress>, rule: String| {
                Violation::new(Some(&self.tree_name), addr, rule)
            };

            let Some(site) = child.site.clone() else {
                report.push(violation(
                    None,
                    format!("child {} is missing its site", child.tree_name),
                ));
                continue;
            };
            *seen.entry(site.clone()).or_insert(0) += 1;

            let node = match tree.node_at(&site) {
                Ok(n) => n,
                Err(_) => {
                    report.push(violation(
                        Some(site.clone()),
                        format!("site does not resolve for child {}", child.tree_name),
                    ));
                    child.validate_node(grammar, report);
                    continue;
                }
            };

            let child_tree = grammar.tree(&child.tree_name);
            match child.op {
                DerivOp::Root => {
                    report.push(violation(
                        Some(site.clone()),
                        "non-root derivation node cannot have op=root".into(),
                    ));
                }
                DerivOp::Substitution => match child_tree {
                    Some(ct) if ct.kind() == TreeKind::Auxiliary => {
                        report.push(violation(
                            Some(site.clone()),
                            format!("auxiliary tree {} at a substitution site", child.tree_name),
                        ));
                    }
                    Some(ct) => {
                        if node.marker != Marker::Substitution {
                            report.push(violation(
                                Some(site.clone()),
                                "site is not marked for substitution".into(),
                            ));
                        } else if ct.root().label != node.label {
                            report.push(violation(
                                Some(site.clone()),
                                format!(
                                    "label mismatch: site {} vs root of {}",
                                    node.label.text(),
                                    child.tree_name
                                ),
                            ));
                        }
                    }
                    None => {}
                },
                DerivOp::Adjunction => match child_tree {
                    Some(ct) if ct.kind() == TreeKind::Initial => {
                        report.push(violation(
                            Some(site.clone()),
                            format!("initial tree {} used for adjunction", child.tree_name),
                        ));
                    }
                    Some(ct) => {
                        if node.marker == Marker::Substitution {
                            report.push(violation(
                                Some(site.clone()),
                                "adjunction at a substitution-marked node".into(),
                            ));
                        } else if ct.root().label != node.label {
                            report.push(violation(
                                Some(site.clone()),
                                format!(
                                    "label mismatch: node {} vs auxiliary root of {}",
                                    node.label.text(),
                                    child.tree_name
                                ),
                            ));
                        } else if node.constraint.forbids_adjunction() {
                            report.push(violation(
                                Some(site.clone()),
                                "null adjunction constraint violated".into(),
                            ));
                        } else if !node.constraint.admits(Some(&child.tree_name)) {
                            report.push(violation(
                                Some(site.clone()),
                                format!("constraint at {site} does not admit {}", child.tree_name),
                            ));
                        }
                    }
                    None => {}
                },
            }
            child.validate_node(grammar, report);
        }

        for (site, count) in &seen {
            if *count > 1 {
                report.push(Violation::new(
                    Some(&self.tree_name),
                    Some(site.clone()),
                    "duplicate site among siblings",
                ));
            }
        }

        // Every substitution site must be filled exactly once.
        for site in tree.substitution_sites() {
            let filled = self
                .children
                .iter()
                .filter(|c| c.op == DerivOp::Substitution && c.site.as_ref() == Some(&site))
                .count();
            if filled == 0 {
                report.push(Violation::new(
                    Some(&self.tree_name),
                    Some(site.clone()),
                    format!("unfilled substitution site {site}"),
                ));
            }
        }

        // Obligatory adjunction nodes must have received one.
        for (addr, node) in tree.addresses() {
            if node.constraint.is_obligatory() {
                let adjoined = self
                    .children
                    .iter()
                    .any(|c| c.op == DerivOp::Adjunction && c.site.as_ref() == Some(&addr));
                if !adjoined {
                    report.push(Violation::new(
                        Some(&self.tree_name),
                        Some(addr.clone()),
                        format!("obligatory adjunction unsatisfied at {addr}"),
                    ));
                }
            }
        }
    }

    /// Replay the derivation bottom-up into a derived tree.
    ///
    /// Children are applied to their parent's elementary tree with
    /// substitutions first, then adjunctions ordered deepest site first,
    /// so that recorded elementary addresses stay valid throughout. The
    /// result does not depend on sibling order.
    pub fn replay(&self, grammar: &Grammar) -> Result<WorkTree> {
        let tree = grammar.tree(&self.tree_name).ok_or(TagError::UnknownTree {
            name: self.tree_name.clone(),
        })?;
        let mut work = WorkTree::from_elementary(tree);

        let mut subs: Vec<&DerivationNode> = Vec::new();
        let mut adjs: Vec<&DerivationNode> = Vec::new();
        for child in &self.children {
            match child.op {
                DerivOp::Substitution => subs.push(child),
                DerivOp::Adjunction => adjs.push(child),
                DerivOp::Root => {
                    return Err(TagError::InvalidDerivation {
                        report: self.validate(grammar),
                    })
                }
            }
        }
        subs.sort_by_key(|c| c.site_key());
        adjs.sort_by(|a, b| {
            let da = a.site.as_ref().map(|s| s.depth()).unwrap_or(0);
            let db = b.site.as_ref().map(|s| s.depth()).unwrap_or(0);
            db.cmp(&da).then_with(|| a.site_key().cmp(&b.site_key()))
        });

        for child in subs.into_iter().chain(adjs) {
            let site = child
                .site
                .clone()
                .ok_or_else(|| TagError::InvalidDerivation {
                    report: self.validate(grammar),
                })?;
            let arg = child.replay(grammar)?;
            work = match child.op {
                DerivOp::Substitution => work.substitute(&site, &arg)?,
                DerivOp::Adjunction => work.adjoin(&site, &arg)?,
                DerivOp::Root => unreachable!(),
            };
        }
        Ok(work)
    }

    /// Extract per-word dependency records: for every derivation node, the
    /// anchor lexeme of its tree together with substitution children as
    /// arguments (ordered by site) and adjunction children as modifiers.
    pub fn dependencies(&self, grammar: &Grammar) -> Result<Vec<DependencyRecord>> {
        let mut out = Vec::new();
        self.collect_dependencies(grammar, &mut out)?;
        Ok(out)
    }

    fn collect_dependencies(
        &self,
        grammar: &Grammar,
        out: &mut Vec<DependencyRecord>,
    ) -> Result<()> {
        let head = anchor_lexeme_of(grammar, &self.tree_name)?;
        let mut kids: Vec<&DerivationNode> = self.children.iter().collect();
        kids.sort_by_key(|c| c.site_key());

        let mut arguments = Vec::new();
        let mut modifiers = Vec::new();
        for kid in &kids {
            let lexeme = anchor_lexeme_of(grammar, &kid.tree_name)?;
            let site = kid.site.clone().expect("non-root children carry sites");
            match kid.op {
                DerivOp::Substitution => arguments.push((lexeme, site)),
                DerivOp::Adjunction => modifiers.push((lexeme, site)),
                DerivOp::Root => {}
            }
        }
        out.push(DependencyRecord {
            head,
            head_tree: self.tree_name.clone(),
            arguments,
            modifiers,
        });
        for kid in kids {
            kid.collect_dependencies(grammar, out)?;
        }
        Ok(())
    }
}

fn anchor_lexeme_of(grammar: &Grammar, tree_name: &str) -> Result<String> {
    let tree = grammar.tree(tree_name).ok_or(TagError::UnknownTree {
        name: tree_name.to_owned(),
    })?;
    anchor_lexeme(tree).ok_or(TagError::MissingAnchor {
        tree: tree_name.to_owned(),
    })
}

/// The lexical item under a tree's anchor node, if anchored.
pub fn anchor_lexeme(tree: &ElementaryTree) -> Option<String> {
    tree.addresses().into_iter().find_map(|(_, node)| {
        if node.marker == Marker::Anchor {
            node.children
                .first()
                .and_then(|c| c.lexeme())
                .map(str::to_owned)
        } else {
            None
        }
    })
}

/// A word's dependency function read off one derivation node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyRecord {
    pub head: String,
    pub head_tree: String,
    pub arguments: Vec<(String, GornAddress)>,
    pub modifiers: Vec<(String, GornAddress)>,
}

impl DependencyRecord {
    /// `head <- arg@site, ... | mod@site, ...` with the modifier block
    /// omitted when empty.
    pub fn render(&self) -> String {
        let args = self
            .arguments
            .iter()
            .map(|(w, s)| format!("{w}@{s}"))
            .collect::<Vec<_>>()
            .join(", ");
        let mods = self
            .modifiers
            .iter()
            .map(|(w, s)| format!("{w}@{s}"))
            .collect::<Vec<_>>()
            .join(", ");
        match (args.is_empty(), mods.is_empty()) {
            (true, true) => format!("{} <-", self.head),
            (false, true) => format!("{} <- {args}", self.head),
            (true, false) => format!("{} <- | {mods}", self.head),
            (false, false) => format!("{} <- {args} | {mods}", self.head),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::tests::fig4_grammar;

    fn addr(s: &str) -> GornAddress {
        s.parse().unwrap()
    }

    /// The worked example: yesterday a man saw Mary.
    pub(crate) fn worked_example_derivation() -> DerivationNode {
        DerivationNode::root("α_saw").with_children(vec![
            DerivationNode::adjunction("β_yesterday", addr("0")),
            DerivationNode::substitution("α_man", addr("1"))
                .with_children(vec![DerivationNode::substitution("α_a", addr("1"))]),
            DerivationNode::substitution("α_Mary", addr("2.2")),
        ])
    }

    #[test]
    fn worked_example_validates() {
        let g = fig4_grammar();
        let report = worked_example_derivation().validate(&g);
        assert!(report.is_empty(), "unexpected violations:\n{report}");
    }

    #[test]
    fn worked_example_replays_to_the_sentence() {
        let g = fig4_grammar();
        let derived = worked_example_derivation().replay(&g).unwrap();
        assert_eq!(
            derived.yield_terminals(),
            ["yesterday", "a", "man", "saw", "Mary"]
        );
    }

    #[test]
    fn missing_substitution_is_reported() {
        let g = fig4_grammar();
        let d = DerivationNode::root("α_saw").with_children(vec![
            DerivationNode::adjunction("β_yesterday", addr("0")),
            DerivationNode::substitution("α_man", addr("1"))
                .with_children(vec![DerivationNode::substitution("α_a", addr("1"))]),
        ]);
        let report = d.validate(&g);
        assert!(report
            .violations()
            .iter()
            .any(|v| v.rule.contains("unfilled substitution site 2.2")));
    }

    #[test]
    fn duplicate_sites_are_reported() {
        let g = fig4_grammar();
        let d = DerivationNode::root("α_saw").with_children(vec![
            DerivationNode::substitution("α_Mary", addr("1")),
            DerivationNode::substitution("α_Mary", addr("1")),
            DerivationNode::substitution("α_Mary", addr("2.2")),
        ]);
        let report = d.validate(&g);
        assert!(report
            .violations()
            .iter()
            .any(|v| v.rule.contains("duplicate site")));
    }

    #[test]
    fn sibling_order_does_not_change_replay() {
        let g = fig4_grammar();
        let mut d = worked_example_derivation();
        let base = d.replay(&g).unwrap();
        d.children.reverse();
        assert_eq!(d.replay(&g).unwrap(), base);
    }

    #[test]
    fn single_node_replay_is_identity() {
        let g = fig4_grammar();
        let d = DerivationNode::root("α_Mary");
        let derived = d.replay(&g).unwrap();
        assert_eq!(derived.root(), g.tree("α_Mary").unwrap().root());
    }

    #[test]
    fn canonical_rendering_is_sorted_by_site() {
        let rendered = worked_example_derivation().render();
        assert_eq!(
            rendered,
            "α_saw@root\n  β_yesterday@0\n  α_man@1\n    α_a@1\n  α_Mary@2.2\n"
        );
    }

    #[test]
    fn dependencies_match_worked_example() {
        let g = fig4_grammar();
        let deps = worked_example_derivation().dependencies(&g).unwrap();
        let saw = &deps[0];
        assert_eq!(saw.head, "saw");
        assert_eq!(saw.render(), "saw <- man@1, Mary@2.2 | yesterday@0");
        let man = deps.iter().find(|r| r.head == "man").unwrap();
        assert_eq!(man.render(), "man <- a@1");
        let mary = deps.iter().find(|r| r.head == "Mary").unwrap();
        assert!(mary.arguments.is_empty() && mary.modifiers.is_empty());
    }

    #[test]
    fn dependency_records_cover_every_edge() {
        let g = fig4_grammar();
        let d = worked_example_derivation();
        let deps = d.dependencies(&g).unwrap();
        let edges: usize = deps
            .iter()
            .map(|r| r.arguments.len() + r.modifiers.len())
            .sum();
        assert_eq!(edges, d.edge_count());
        assert_eq!(deps.len(), d.use_count());
    }
}
