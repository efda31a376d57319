//! Reading derivation trees back out of a completed chart.
//!
//! A derivation node corresponds to one use of an elementary tree; walking
//! an item's steps stays inside the current use until an adjunction or
//! substitution step hands off to another completed root. The budget caps
//! total tree uses per derivation so that extraction terminates even when
//! zero-span items form cycles in the back-pointer graph.

use std::collections::BTreeMap;

use super::chart::{Chart, ItemId, Step};
use super::compile::CompiledGrammar;
use crate::derivation::{DerivOp, DerivationNode};
use crate::gorn::GornAddress;

pub(super) fn extract(
    grammar: &CompiledGrammar,
    chart: &Chart,
    goals: &[ItemId],
    budget: usize,
) -> Vec<DerivationNode> {
    let mut out: BTreeMap<String, DerivationNode> = BTreeMap::new();
    for &goal in goals {
        for (node, _) in expand_use(grammar, chart, goal, DerivOp::Root, None, budget) {
            out.entry(node.render()).or_insert(node);
        }
    }
    out.into_values().collect()
}

type Alt = (Vec<DerivationNode>, usize); // children of the current use, uses consumed

fn expand_use(
    grammar: &CompiledGrammar,
    chart: &Chart,
    root_item: ItemId,
    op: DerivOp,
    site: Option<GornAddress>,
    budget: usize,
) -> Vec<(DerivationNode, usize)> {
    if budget == 0 {
        return Vec::new();
    }
    let tree_name = &grammar.trees[chart.item(root_item).tree].name;
    walk(grammar, chart, root_item, budget - 1)
        .into_iter()
        .map(|(mut children, uses)| {
            children.sort_by(|a, b| {
                let ka = a.site.as_ref().map(ToString::to_string).unwrap_or_default();
                let kb = b.site.as_ref().map(ToString::to_string).unwrap_or_default();
                ka.cmp(&kb).then_with(|| a.tree_name.cmp(&b.tree_name))
            });
            let node = DerivationNode {
                tree_name: tree_name.clone(),
                op,
                site: site.clone(),
                children,
            };
            (node, uses + 1)
        })
        .collect()
}

/// Alternative child lists for the part of the current tree use at or
/// below `id`. Every alternative consumes at most `remaining` uses.
fn walk(grammar: &CompiledGrammar, chart: &Chart, id: ItemId, remaining: usize) -> Vec<Alt> {
    let mut alts: Vec<Alt> = Vec::new();
    for &step in chart.steps_of(id) {
        match step {
            Step::Lex | Step::Eps | Step::Foot => alts.push((Vec::new(), 0)),
            Step::Unary(child) | Step::NoAdjoin(child) => {
                alts.extend(walk(grammar, chart, child, remaining));
            }
            Step::Binary(left, right) => {
                for (lc, lu) in walk(grammar, chart, left, remaining) {
                    for (rc, ru) in walk(grammar, chart, right, remaining - lu) {
                        let mut children = lc.clone();
                        children.extend(rc);
                        alts.push((children, lu + ru));
                    }
                }
            }
            Step::Adjoin { aux, host } => {
                let site = source_site(grammar, chart, id);
                for (aux_node, au) in expand_use(
                    grammar,
                    chart,
                    aux,
                    DerivOp::Adjunction,
                    Some(site.clone()),
                    remaining,
                ) {
                    for (hc, hu) in walk(grammar, chart, host, remaining - au) {
                        let mut children = vec![aux_node.clone()];
                        children.extend(hc);
                        alts.push((children, au + hu));
                    }
                }
            }
            Step::Subst { arg } => {
                let site = source_site(grammar, chart, id);
                for (node, uses) in expand_use(
                    grammar,
                    chart,
                    arg,
                    DerivOp::Substitution,
                    Some(site.clone()),
                    remaining,
                ) {
                    alts.push((vec![node], uses));
                }
            }
        }
    }
    alts
}

fn source_site(grammar: &CompiledGrammar, chart: &Chart, id: ItemId) -> GornAddress {
    let item = chart.item(id);
    grammar.trees[item.tree]
        .node(item.node)
        .source
        .clone()
        .expect("composition steps only target source nodes")
}
