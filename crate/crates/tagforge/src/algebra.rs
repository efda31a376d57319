//! The two composition operations on working trees: adjunction and
//! substitution. Both return fresh trees; inputs are never mutated, so a
//! parser can share subtrees across parses freely.

use crate::error::{BlockReason, Result, TagError};
use crate::gorn::GornAddress;
use crate::grammar::{ElementaryTree, Marker, TreeKind, TreeNode};

/// A derived (or still elementary) tree under construction.
///
/// `kind` records whether the tree is rooted in an initial or auxiliary
/// elementary tree; only initial-derived trees may be substituted and only
/// auxiliary-derived trees adjoined. `provenance` keeps the elementary
/// tree's name for constraint checks against SA/OA name sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkTree {
    root: TreeNode,
    kind: TreeKind,
    provenance: Option<String>,
}

impl WorkTree {
    pub fn new(root: TreeNode, kind: TreeKind, provenance: Option<String>) -> Self {
        WorkTree {
            root,
            kind,
            provenance,
        }
    }

    pub fn from_elementary(tree: &ElementaryTree) -> Self {
        WorkTree {
            root: tree.root().clone(),
            kind: tree.kind(),
            provenance: Some(tree.name().to_owned()),
        }
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn node_at(&self, addr: &GornAddress) -> Result<&TreeNode> {
        self.root
            .descendant(addr)
            .ok_or(TagError::AddressOutOfRange {
                tree: self
                    .provenance
                    .clone()
                    .unwrap_or_else(|| "<derived>".into()),
                addr: addr.clone(),
            })
    }

    /// Current address of the foot node, if the tree still has one.
    pub fn foot_address(&self) -> Option<GornAddress> {
        self.root
            .walk()
            .into_iter()
            .find(|(_, n)| n.marker == Marker::Foot)
            .map(|(a, _)| a)
    }

    /// Left-to-right frontier tokens.
    pub fn yield_terminals(&self) -> Vec<String> {
        self.root
            .frontier_tokens()
            .into_iter()
            .map(str::to_owned)
            .collect()
    }

    /// Bracketed phrase-structure rendering, e.g.
    /// `(S (NP (Det a) (N man)) (VP (V saw) (NP (N Mary))))`.
    /// Lexical and plain terminal leaves print bare; epsilon prints `''`.
    pub fn bracketed(&self) -> String {
        let mut out = String::new();
        fn go(node: &TreeNode, out: &mut String) {
            if node.label.is_terminal() {
                if node.label.is_epsilon() {
                    out.push_str("''");
                } else {
                    out.push_str(node.label.text());
                }
                return;
            }
            if node.is_frontier() {
                out.push_str(node.label.text());
                match node.marker {
                    Marker::Substitution => out.push('!'),
                    Marker::Foot => out.push('*'),
                    _ => {}
                }
                return;
            }
            out.push('(');
            out.push_str(node.label.text());
            for child in &node.children {
                out.push(' ');
                go(child, out);
            }
            out.push(')');
        }
        go(&self.root, &mut out);
        out
    }

    /// How many frontier tokens precede the foot node.
    pub fn foot_yield_index(&self) -> Option<usize> {
        let foot = self.foot_address()?;
        let mut count = 0;
        for (addr, node) in self.root.walk() {
            if addr == foot {
                return Some(count);
            }
            if node.is_frontier() && node.label.is_terminal() && !node.label.is_epsilon() {
                count += 1;
            }
        }
        None
    }

    /// Check whether `aux` may be adjoined at `addr`.
    ///
    /// Succeeds exactly when the node exists, is a non-substitution
    /// nonterminal whose label matches the auxiliary root, and the node's
    /// constraint admits the auxiliary tree by name.
    pub fn can_adjoin(&self, addr: &GornAddress, aux: &WorkTree) -> Result<()> {
        let node = self.node_at(addr)?;
        let blocked = |reason: BlockReason| TagError::AdjunctionBlocked {
            addr: addr.clone(),
            reason,
        };

        if aux.kind != TreeKind::Auxiliary || aux.foot_address().is_none() {
            return Err(blocked(BlockReason::NotAnAuxiliary {
                name: aux.provenance.clone().unwrap_or_else(|| "<derived>".into()),
            }));
        }
        if node.label.is_terminal() {
            return Err(blocked(BlockReason::NotAdjoinable {
                label: node.label.text().to_owned(),
            }));
        }
        if node.marker == Marker::Substitution {
            return Err(blocked(BlockReason::SubstitutionSite));
        }
        if node.label != aux.root.label {
            return Err(blocked(BlockReason::LabelMismatch {
                host: node.label.text().to_owned(),
                aux: aux.root.label.text().to_owned(),
            }));
        }
        if node.constraint.forbids_adjunction() {
            return Err(blocked(BlockReason::NullAdjunction));
        }
        let name = aux.provenance();
        if !node.constraint.admits(name) {
            let name = name.unwrap_or("<derived>").to_owned();
            return Err(blocked(if node.constraint.is_obligatory() {
                BlockReason::NotInObligatorySet { name }
            } else {
                BlockReason::NotInSelectiveSet { name }
            }));
        }
        Ok(())
    }

    /// Adjoin `aux` at `addr`: the subtree rooted there is excised, the
    /// auxiliary tree is planted in its place, and the excised subtree
    /// replaces the auxiliary foot node.
    pub fn adjoin(&self, addr: &GornAddress, aux: &WorkTree) -> Result<WorkTree> {
        self.can_adjoin(addr, aux)?;
        let foot = aux.foot_address().expect("checked by can_adjoin");
        let root = replace_subtree(&self.root, addr.steps(), |displaced| {
            let mut planted = aux.root.clone();
            plant_at_foot(&mut planted, foot.steps(), displaced);
            planted
        });
        Ok(WorkTree {
            root,
            kind: self.kind,
            provenance: self.provenance.clone(),
        })
    }

    /// Substitute an initial-derived tree for the marked frontier node at
    /// `addr`.
    pub fn substitute(&self, addr: &GornAddress, arg: &WorkTree) -> Result<WorkTree> {
        let node = self.node_at(addr)?;
        if arg.kind != TreeKind::Initial {
            return Err(TagError::AuxiliaryTreeRejected {
                name: arg.provenance.clone().unwrap_or_else(|| "<derived>".into()),
            });
        }
        if node.marker != Marker::Substitution || !node.is_frontier() {
            return Err(TagError::NotASubstitutionSite { addr: addr.clone() });
        }
        if node.label != arg.root.label {
            return Err(TagError::SubstitutionLabelMismatch {
                addr: addr.clone(),
                expected: node.label.text().to_owned(),
                found: arg.root.label.text().to_owned(),
            });
        }
        let root = replace_subtree(&self.root, addr.steps(), |_| arg.root.clone());
        Ok(WorkTree {
            root,
            kind: self.kind,
            provenance: self.provenance.clone(),
        })
    }
}

/// Rebuild along the spine to `path`, substituting the subtree found there
/// with `f(displaced)`.
fn replace_subtree(
    node: &TreeNode,
    path: &[u32],
    f: impl FnOnce(TreeNode) -> TreeNode,
) -> TreeNode {
    match path.split_first() {
        None => f(node.clone()),
        Some((&step, rest)) => {
            let mut out = node.clone();
            let idx = step as usize - 1;
            out.children[idx] = replace_subtree(&node.children[idx], rest, f);
            out
        }
    }
}

fn plant_at_foot(node: &mut TreeNode, path: &[u32], displaced: TreeNode) {
    match path.split_first() {
        None => *node = displaced,
        Some((&step, rest)) => {
            plant_at_foot(&mut node.children[step as usize - 1], rest, displaced)
        }
    }
}

/// Where a host-tree node ends up after adjunction at `site` with an
/// auxiliary whose foot sits at `foot_in_aux`.
///
/// Nodes outside the displaced subtree keep their addresses; nodes at or
/// below `site` move under the foot position.
pub fn adjunction_remap(
    host_addr: &GornAddress,
    site: &GornAddress,
    foot_in_aux: &GornAddress,
) -> GornAddress {
    match host_addr.strip_prefix(site) {
        Some(below) => site.join(foot_in_aux).join(&below),
        None => host_addr.clone(),
    }
}

/// Where an argument-tree node ends up after its tree is composed at
/// `site` (substitution, or the non-displaced part of an adjunction).
pub fn argument_remap(site: &GornAddress, arg_addr: &GornAddress) -> GornAddress {
    site.join(arg_addr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::BlockReason;
    use crate::grammar::{AdjConstraint, ElementaryTree, NameSet, Symbol};

    fn addr(s: &str) -> GornAddress {
        s.parse().unwrap()
    }

    fn alpha_saw() -> WorkTree {
        WorkTree::from_elementary(&ElementaryTree::new(
            "α_saw",
            TreeKind::Initial,
            TreeNode::interior("S").with_children(vec![
                TreeNode::substitution("NP"),
                TreeNode::interior("VP").with_children(vec![
                    TreeNode::anchor("V").with_children(vec![TreeNode::lexical("saw")]),
                    TreeNode::substitution("NP"),
                ]),
            ]),
        ))
    }

    fn beta_yesterday() -> WorkTree {
        WorkTree::from_elementary(&ElementaryTree::new(
            "β_yesterday",
            TreeKind::Auxiliary,
            TreeNode::interior("S").with_children(vec![
                TreeNode::anchor("Ad").with_children(vec![TreeNode::lexical("yesterday")]),
                TreeNode::foot("S"),
            ]),
        ))
    }

    fn np(name: &str, noun: &str) -> WorkTree {
        WorkTree::from_elementary(&ElementaryTree::new(
            name,
            TreeKind::Initial,
            TreeNode::interior("NP").with_children(vec![
                TreeNode::anchor("N").with_children(vec![TreeNode::lexical(noun)])
            ]),
        ))
    }

    /// "a man saw Mary" with the subject filled by a determiner-less NP.
    fn saw_sentence() -> WorkTree {
        let man = np("α_man2", "man");
        let mary = np("α_Mary", "Mary");
        alpha_saw()
            .substitute(&addr("1"), &man)
            .unwrap()
            .substitute(&addr("2.2"), &mary)
            .unwrap()
    }

    #[test]
    fn adjoin_at_root_prepends_adverb() {
        let host = saw_sentence();
        assert_eq!(host.yield_terminals(), ["man", "saw", "Mary"]);
        let beta = beta_yesterday();
        host.can_adjoin(&addr("0"), &beta).unwrap();
        let out = host.adjoin(&addr("0"), &beta).unwrap();
        assert_eq!(out.yield_terminals(), ["yesterday", "man", "saw", "Mary"]);
    }

    #[test]
    fn adjoin_conserves_node_count() {
        let host = saw_sentence();
        let beta = beta_yesterday();
        let out = host.adjoin(&addr("0"), &beta).unwrap();
        assert_eq!(out.node_count(), host.node_count() + beta.node_count() - 1);
    }

    #[test]
    fn substitute_conserves_node_count() {
        let host = alpha_saw();
        let man = np("α_man2", "man");
        let out = host.substitute(&addr("1"), &man).unwrap();
        assert_eq!(out.node_count(), host.node_count() + man.node_count() - 1);
        assert_eq!(out.yield_terminals(), ["man", "saw"]);
    }

    #[test]
    fn na_blocks_adjunction() {
        let mut root = TreeNode::interior("S").with_children(vec![TreeNode::terminal("x")]);
        root.constraint = AdjConstraint::Null;
        let host = WorkTree::new(root, TreeKind::Initial, None);
        let err = host.can_adjoin(&addr("0"), &beta_yesterday()).unwrap_err();
        assert_eq!(
            err,
            TagError::AdjunctionBlocked {
                addr: addr("0"),
                reason: BlockReason::NullAdjunction
            }
        );
    }

    #[test]
    fn substitution_site_blocks_adjunction() {
        let host = alpha_saw();
        let err = host.can_adjoin(&addr("1"), &beta_yesterday()).unwrap_err();
        assert!(matches!(
            err,
            TagError::AdjunctionBlocked {
                reason: BlockReason::SubstitutionSite,
                ..
            }
        ));
    }

    #[test]
    fn selective_set_checked_by_name() {
        let mut root = TreeNode::interior("S").with_children(vec![TreeNode::terminal("x")]);
        root.constraint = AdjConstraint::Selective(NameSet::listed(["β_other"]));
        let host = WorkTree::new(root, TreeKind::Initial, None);
        let err = host.can_adjoin(&addr("0"), &beta_yesterday()).unwrap_err();
        assert!(matches!(
            err,
            TagError::AdjunctionBlocked {
                reason: BlockReason::NotInSelectiveSet { .. },
                ..
            }
        ));
    }

    #[test]
    fn substituting_an_auxiliary_is_rejected() {
        let host = alpha_saw();
        let err = host.substitute(&addr("1"), &beta_yesterday()).unwrap_err();
        assert!(matches!(err, TagError::AuxiliaryTreeRejected { .. }));
    }

    #[test]
    fn substitution_label_must_match() {
        let host = alpha_saw();
        let det = WorkTree::from_elementary(&ElementaryTree::new(
            "α_a",
            TreeKind::Initial,
            TreeNode::anchor("Det").with_children(vec![TreeNode::lexical("a")]),
        ));
        let err = host.substitute(&addr("1"), &det).unwrap_err();
        assert!(matches!(err, TagError::SubstitutionLabelMismatch { .. }));
    }

    #[test]
    fn inputs_are_not_mutated() {
        let host = saw_sentence();
        let before = host.clone();
        let beta = beta_yesterday();
        let _ = host.adjoin(&addr("0"), &beta).unwrap();
        assert_eq!(host, before);
        let again = host.adjoin(&addr("0"), &beta).unwrap();
        assert_eq!(again, host.adjoin(&addr("0"), &beta).unwrap());
    }

    #[test]
    fn bracketed_rendering() {
        let host = saw_sentence();
        assert_eq!(
            host.bracketed(),
            "(S (NP (N man)) (VP (V saw) (NP (N Mary))))"
        );
        assert_eq!(alpha_saw().bracketed(), "(S NP! (VP (V saw) NP!))");
    }

    #[test]
    fn foot_yield_split() {
        let beta = beta_yesterday();
        assert_eq!(beta.yield_terminals(), ["yesterday"]);
        assert_eq!(beta.foot_yield_index(), Some(1));
        assert_eq!(alpha_saw().yield_terminals(), ["saw"]);
        assert_eq!(alpha_saw().foot_yield_index(), None);
    }

    #[test]
    fn foot_stays_unique_after_adjoining_into_auxiliary() {
        // Counting-style auxiliary adjoined into itself keeps one foot.
        let beta = WorkTree::from_elementary(&ElementaryTree::new(
            "β",
            TreeKind::Auxiliary,
            TreeNode::interior("S").with_children(vec![
                TreeNode::terminal("a"),
                TreeNode::interior("S").with_children(vec![
                    TreeNode::terminal("b"),
                    TreeNode::foot("S"),
                    TreeNode::terminal("c"),
                ]),
                TreeNode::terminal("d"),
            ]),
        ));
        let out = beta.adjoin(&addr("2"), &beta).unwrap();
        assert_eq!(
            out.yield_terminals(),
            ["a", "a", "b", "b", "c", "c", "d", "d"]
        );
        let feet: Vec<_> = out
            .root()
            .walk()
            .into_iter()
            .filter(|(_, n)| n.marker == Marker::Foot)
            .collect();
        assert_eq!(feet.len(), 1);
    }

    #[test]
    fn remap_tracks_displaced_subtree() {
        let host = saw_sentence();
        let beta = beta_yesterday();
        let out = host.adjoin(&addr("0"), &beta).unwrap();
        let foot = addr("2");
        // The old VP at address 2 now lives below the foot position.
        let remapped = adjunction_remap(&addr("2"), &addr("0"), &foot);
        assert_eq!(remapped, addr("2.2"));
        assert_eq!(
            out.node_at(&remapped).unwrap().label,
            Symbol::nonterminal("VP")
        );
        // Nodes outside the displaced subtree keep their addresses.
        let untouched = adjunction_remap(&addr("1"), &addr("2.2"), &foot);
        assert_eq!(untouched, addr("1"));
    }
}
