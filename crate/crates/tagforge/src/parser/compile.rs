//! Internal parsing form of a grammar: every tree flattened into a node
//! array with at most two children per node. Nodes introduced by
//! binarization are virtual; they carry a null-adjunction constraint, map
//! to no source address, and never show up in derivations.

use std::collections::HashMap;

use crate::gorn::GornAddress;
use crate::grammar::{AdjConstraint, ElementaryTree, Grammar, Marker, Symbol, TreeKind};
use crate::lexicon::is_skeleton;

pub type TreeId = usize;
pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Terminal leaf scanning one token (plain or lexical).
    Term(String),
    /// Epsilon leaf spanning nothing.
    Epsilon,
    /// The auxiliary tree's foot.
    Foot,
    /// Substitution site awaiting an initial tree.
    Subst,
    Unary(NodeId),
    Binary(NodeId, NodeId),
}

#[derive(Clone, Debug)]
pub struct CNode {
    pub label: Symbol,
    pub shape: Shape,
    pub marker: Marker,
    pub constraint: AdjConstraint,
    pub parent: Option<NodeId>,
    /// Gorn address in the original elementary tree; `None` on virtual
    /// binarization nodes.
    pub source: Option<GornAddress>,
    pub dominates_foot: bool,
}

impl CNode {
    pub fn is_virtual(&self) -> bool {
        self.source.is_none()
    }

    /// May an auxiliary tree land here at all?
    pub fn hosts_adjunction(&self) -> bool {
        !self.is_virtual()
            && self.label.is_nonterminal()
            && self.marker != Marker::Substitution
            && matches!(
                self.shape,
                Shape::Unary(_) | Shape::Binary(_, _) | Shape::Foot
            )
    }
}

#[derive(Clone, Debug)]
pub struct CompiledTree {
    pub name: String,
    pub kind: TreeKind,
    pub nodes: Vec<CNode>,
    pub root: NodeId,
    pub foot: Option<NodeId>,
    pub own_yield: usize,
}

impl CompiledTree {
    pub fn node(&self, id: NodeId) -> &CNode {
        &self.nodes[id]
    }

    pub fn root_label(&self) -> &Symbol {
        &self.nodes[self.root].label
    }
}

/// The grammar in parsing form, with the static lookup tables the
/// deduction rules need.
#[derive(Clone, Debug)]
pub struct CompiledGrammar {
    pub start: String,
    pub trees: Vec<CompiledTree>,
    /// token -> terminal leaves scanning it
    pub lex_index: HashMap<String, Vec<(TreeId, NodeId)>>,
    pub epsilon_leaves: Vec<(TreeId, NodeId)>,
    pub foot_nodes: Vec<(TreeId, NodeId)>,
    /// label -> substitution sites with that label
    pub subst_sites_by_label: HashMap<String, Vec<(TreeId, NodeId)>>,
    /// initial trees whose root is the start symbol
    pub goal_trees: Vec<TreeId>,
}

/// Flatten and binarize every usable tree of the grammar.
///
/// Trees with an empty anchor slot cannot scan their word and are skipped;
/// anchor them through a lexicon first.
pub fn binarize(grammar: &Grammar) -> CompiledGrammar {
    let mut out = CompiledGrammar {
        start: grammar.start().to_owned(),
        trees: Vec::new(),
        lex_index: HashMap::new(),
        epsilon_leaves: Vec::new(),
        foot_nodes: Vec::new(),
        subst_sites_by_label: HashMap::new(),
        goal_trees: Vec::new(),
    };

    for tree in grammar.all_trees() {
        if is_skeleton(tree) {
            continue;
        }
        let tid = out.trees.len();
        let compiled = compile_tree(tree);
        for (nid, node) in compiled.nodes.iter().enumerate() {
            match &node.shape {
                Shape::Term(token) => out
                    .lex_index
                    .entry(token.clone())
                    .or_default()
                    .push((tid, nid)),
                Shape::Epsilon => out.epsilon_leaves.push((tid, nid)),
                Shape::Foot => out.foot_nodes.push((tid, nid)),
                Shape::Subst => out
                    .subst_sites_by_label
                    .entry(node.label.text().to_owned())
                    .or_default()
                    .push((tid, nid)),
                _ => {}
            }
        }
        if compiled.kind == TreeKind::Initial && compiled.root_label().text() == out.start {
            out.goal_trees.push(tid);
        }
        out.trees.push(compiled);
    }
    out
}

fn compile_tree(tree: &ElementaryTree) -> CompiledTree {
    let mut nodes: Vec<CNode> = Vec::with_capacity(tree.node_count());
    let root = flatten(tree.root(), GornAddress::root(), &mut nodes);
    for id in 0..nodes.len() {
        match nodes[id].shape {
            Shape::Unary(c) => nodes[c].parent = Some(id),
            Shape::Binary(a, b) => {
                nodes[a].parent = Some(id);
                nodes[b].parent = Some(id);
            }
            _ => {}
        }
    }
    mark_foot_spine(&mut nodes, root);
    let foot = nodes.iter().position(|n| n.shape == Shape::Foot);
    CompiledTree {
        name: tree.name().to_owned(),
        kind: tree.kind(),
        own_yield: tree.own_yield().len(),
        nodes,
        root,
        foot,
    }
}

fn flatten(node: &crate::grammar::TreeNode, addr: GornAddress, out: &mut Vec<CNode>) -> NodeId {
    let shape = if node.children.is_empty() {
        match (&node.label, node.marker) {
            (Symbol::Terminal(t), _) if t.is_empty() => Shape::Epsilon,
            (Symbol::Terminal(t), _) => Shape::Term(t.clone()),
            (Symbol::Nonterminal(_), Marker::Foot) => Shape::Foot,
            // Frontier nonterminals other than the foot behave as
            // substitution sites here; validation flags unmarked ones.
            (Symbol::Nonterminal(_), _) => Shape::Subst,
        }
    } else {
        let kids: Vec<NodeId> = node
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| flatten(c, addr.child(i as u32 + 1), out))
            .collect();
        chain(node, &kids, out)
    };
    let id = out.len();
    out.push(CNode {
        label: node.label.clone(),
        shape,
        marker: node.marker,
        constraint: node.constraint.clone(),
        parent: None,
        source: Some(addr),
        dominates_foot: false,
    });
    id
}

/// Right-branching chain over 3+ children: `X(a, b, c)` becomes
/// `X(a, X'(b, c))` with `X'` virtual and closed to adjunction.
fn chain(node: &crate::grammar::TreeNode, kids: &[NodeId], out: &mut Vec<CNode>) -> Shape {
    match kids {
        [only] => Shape::Unary(*only),
        [a, b] => Shape::Binary(*a, *b),
        [first, rest @ ..] => {
            let inner = chain(node, rest, out);
            let id = out.len();
            out.push(CNode {
                label: node.label.clone(),
                shape: inner,
                marker: Marker::None,
                constraint: AdjConstraint::Null,
                parent: None,
                source: None,
                dominates_foot: false,
            });
            Shape::Binary(*first, id)
        }
        [] => unreachable!("chain is only called for interior nodes"),
    }
}

fn mark_foot_spine(nodes: &mut [CNode], root: NodeId) {
    fn go(nodes: &mut [CNode], id: NodeId) -> bool {
        let result = match nodes[id].shape {
            Shape::Foot => true,
            Shape::Unary(c) => go(nodes, c),
            Shape::Binary(a, b) => {
                let fa = go(nodes, a);
                let fb = go(nodes, b);
                debug_assert!(!(fa && fb), "two children dominate the foot");
                fa || fb
            }
            _ => false,
        };
        nodes[id].dominates_foot = result;
        result
    }
    go(nodes, root);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_grammar;

    #[test]
    fn binary_tree_compiles_without_virtual_nodes() {
        let (g, _) =
            parse_grammar("start: S\n\ntree α : initial\n  S\n    NP!\n    VP\n      V@ = ran\n")
                .unwrap();
        let cg = binarize(&g);
        let t = &cg.trees[0];
        assert!(t.nodes.iter().all(|n| !n.is_virtual()));
        // Node count matches the source tree (lexical node included).
        assert_eq!(t.nodes.len(), g.tree("α").unwrap().node_count());
        for node in &t.nodes {
            assert!(node.source.is_some());
        }
    }

    #[test]
    fn three_children_introduce_one_na_virtual() {
        let (g, _) = parse_grammar(
            "start: S\n\ntree α : initial\n  S\n    VP\n      V@ = put\n      NP!\n      PP!\n",
        )
        .unwrap();
        let cg = binarize(&g);
        let t = &cg.trees[0];
        let virtuals: Vec<&CNode> = t.nodes.iter().filter(|n| n.is_virtual()).collect();
        assert_eq!(virtuals.len(), 1);
        assert!(virtuals[0].constraint.forbids_adjunction());
        assert!(!virtuals[0].hosts_adjunction());
        assert_eq!(t.nodes.len(), g.tree("α").unwrap().node_count() + 1);
    }

    #[test]
    fn foot_spine_is_marked() {
        let (g, _) = parse_grammar(
            "start: S\n\ntree β : auxiliary\n  S\n    'a'\n    S\n      'b'\n      S*\n      'c'\n    'd'\n",
        )
        .unwrap();
        let cg = binarize(&g);
        let t = &cg.trees[0];
        let foot = t.foot.unwrap();
        assert!(t.node(foot).dominates_foot);
        assert!(t.node(t.root).dominates_foot);
        let term_nodes = t
            .nodes
            .iter()
            .filter(|n| matches!(n.shape, Shape::Term(_)))
            .count();
        assert_eq!(term_nodes, 4);
    }

    #[test]
    fn skeleton_trees_are_skipped() {
        let (g, _) = parse_grammar("start: S\n\ntree αNP : initial\n  NP\n    N@\n").unwrap();
        let cg = binarize(&g);
        assert!(cg.trees.is_empty());
    }
}
