//! The chart: a deduplicating item store with back-pointers and the span
//! indexes the deduction rules query. Insertion is idempotent; inserting
//! an existing item merges its derivation steps.

use std::collections::{BTreeSet, HashMap};

use super::compile::{CompiledGrammar, NodeId, TreeId};

pub type ItemId = usize;

/// Has the node already received (or declined) its adjunction?
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    /// Subtree below the node is assembled; adjunction still possible.
    Pending,
    /// Adjunction applied or skipped; the node is finished.
    Done,
}

/// Parser state: a node of an elementary tree spanning `start..end` of the
/// input, with `gap` covering the foot span when the node dominates the
/// tree's foot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Item {
    pub tree: TreeId,
    pub node: NodeId,
    pub phase: Phase,
    pub start: u32,
    pub gap: Option<(u32, u32)>,
    pub end: u32,
}

/// How an item was derived. Multiple steps per item record ambiguity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    /// Terminal leaf scanned a token.
    Lex,
    /// Epsilon leaf spanning nothing.
    Eps,
    /// Foot node hypothesis for some gap.
    Foot,
    /// Single child completed its parent.
    Unary(ItemId),
    /// Two adjacent siblings combined.
    Binary(ItemId, ItemId),
    /// Node finished without adjunction.
    NoAdjoin(ItemId),
    /// A completed auxiliary tree wrapped this node.
    Adjoin { aux: ItemId, host: ItemId },
    /// A completed initial tree filled this substitution site.
    Subst { arg: ItemId },
}

#[derive(Debug, Default)]
pub struct Chart {
    items: Vec<Item>,
    ids: HashMap<Item, ItemId>,
    steps: Vec<BTreeSet<Step>>,
    /// Done items by (tree, node, start) and (tree, node, end), for the
    /// binary rule's sibling lookups.
    done_by_start: HashMap<(TreeId, NodeId, u32), Vec<ItemId>>,
    done_by_end: HashMap<(TreeId, NodeId, u32), Vec<ItemId>>,
    /// Pending items on adjunction-capable nodes, by span.
    hosts_by_span: HashMap<(u32, u32), Vec<ItemId>>,
    /// Done auxiliary-root items by their foot gap.
    aux_by_gap: HashMap<(u32, u32), Vec<ItemId>>,
    step_count: usize,
}

impl Chart {
    pub fn new() -> Self {
        Chart::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id]
    }

    pub fn steps_of(&self, id: ItemId) -> &BTreeSet<Step> {
        &self.steps[id]
    }

    pub fn contains(&self, item: &Item) -> bool {
        self.ids.contains_key(item)
    }

    /// Insert an item with one derivation step. Returns its id and whether
    /// the item is new to the chart.
    pub fn insert(&mut self, item: Item, step: Step, grammar: &CompiledGrammar) -> (ItemId, bool) {
        if let Some(&id) = self.ids.get(&item) {
            if self.steps[id].insert(step) {
                self.step_count += 1;
            }
            return (id, false);
        }
        let id = self.items.len();
        self.items.push(item);
        self.ids.insert(item, id);
        let mut set = BTreeSet::new();
        set.insert(step);
        self.steps.push(set);
        self.step_count += 1;
        self.index(id, &item, grammar);
        (id, true)
    }

    fn index(&mut self, id: ItemId, item: &Item, grammar: &CompiledGrammar) {
        let node = grammar.trees[item.tree].node(item.node);
        match item.phase {
            Phase::Done => {
                self.done_by_start
                    .entry((item.tree, item.node, item.start))
                    .or_default()
                    .push(id);
                self.done_by_end
                    .entry((item.tree, item.node, item.end))
                    .or_default()
                    .push(id);
                if node.parent.is_none() {
                    let tree = &grammar.trees[item.tree];
                    if tree.kind == crate::grammar::TreeKind::Auxiliary {
                        let gap = item.gap.expect("auxiliary root item carries its foot gap");
                        self.aux_by_gap.entry(gap).or_default().push(id);
                    }
                }
            }
            Phase::Pending => {
                if node.hosts_adjunction() {
                    self.hosts_by_span
                        .entry((item.start, item.end))
                        .or_default()
                        .push(id);
                }
            }
        }
    }

    pub fn done_starting_at(&self, tree: TreeId, node: NodeId, start: u32) -> &[ItemId] {
        self.done_by_start
            .get(&(tree, node, start))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn done_ending_at(&self, tree: TreeId, node: NodeId, end: u32) -> &[ItemId] {
        self.done_by_end
            .get(&(tree, node, end))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn hosts_spanning(&self, start: u32, end: u32) -> &[ItemId] {
        self.hosts_by_span
            .get(&(start, end))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn aux_roots_with_gap(&self, gap: (u32, u32)) -> &[ItemId] {
        self.aux_by_gap.get(&gap).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Completed goal items: Done root of a start-labeled initial tree
    /// spanning the whole input.
    pub fn goals(&self, grammar: &CompiledGrammar, input_len: u32) -> Vec<ItemId> {
        let mut out = Vec::new();
        for &tid in &grammar.goal_trees {
            let root = grammar.trees[tid].root;
            let item = Item {
                tree: tid,
                node: root,
                phase: Phase::Done,
                start: 0,
                gap: None,
                end: input_len,
            };
            if let Some(&id) = self.ids.get(&item) {
                out.push(id);
            }
        }
        out
    }

    /// Same shape regardless of insertion order: used by the determinism
    /// tests to compare serial and parallel schedules.
    pub fn signature(&self) -> BTreeSet<String> {
        self.items.iter().map(|it| format!("{it:?}")).collect()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }
}
