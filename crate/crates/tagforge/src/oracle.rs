//! Exhaustive derivation enumeration by recursive site filling.
//!
//! This module is deliberately independent of the chart parser: it builds
//! derivations directly from the grammar with the tree algebra and replays
//! them to check yields. Cost grows exponentially, so it is meant for
//! validation work on small grammars and short inputs, where it serves as
//! the ground truth the parser is compared against.

use std::collections::{BTreeMap, BTreeSet};

use crate::derivation::{DerivOp, DerivationNode};
use crate::error::{Result, TagError};
use crate::gorn::GornAddress;
use crate::grammar::{ElementaryTree, Grammar, Marker, TreeKind};
use crate::lexicon::is_skeleton;

/// Upper bound on elementary-tree uses in any derivation whose yield has
/// at most `n` tokens.
///
/// For fully lexicalized grammars every tree consumes at least one token,
/// so `n` uses suffice. Empty-yield trees are tolerated only when they are
/// initial trees without substitution sites and every auxiliary tree has a
/// nonempty yield; each such use then fills a site of a token-consuming
/// tree (or the root), which bounds the total. Anything else would admit
/// unboundedly many derivations per string and is rejected.
pub fn derivation_budget(grammar: &Grammar, n: usize) -> Result<usize> {
    let usable: Vec<&ElementaryTree> = grammar.all_trees().filter(|t| !is_skeleton(t)).collect();
    if usable.iter().all(|t| !t.own_yield().is_empty()) {
        return Ok(n);
    }
    for tree in &usable {
        if !tree.own_yield().is_empty() {
            continue;
        }
        if tree.kind() == TreeKind::Auxiliary {
            return Err(TagError::UnboundedGrammar {
                detail: format!("auxiliary tree {} has an empty yield", tree.name()),
            });
        }
        if !tree.substitution_sites().is_empty() {
            return Err(TagError::UnboundedGrammar {
                detail: format!("empty-yield tree {} has substitution sites", tree.name()),
            });
        }
    }
    let max_sites = usable
        .iter()
        .map(|t| t.substitution_sites().len())
        .max()
        .unwrap_or(0);
    Ok(n * (1 + max_sites) + 1)
}

/// All valid derivations over `grammar` whose replayed yield equals
/// `tokens`, using at most `max_uses` elementary trees. Results come back
/// deduplicated in canonical rendering order.
pub fn enumerate_brute_force(
    grammar: &Grammar,
    tokens: &[&str],
    max_uses: usize,
) -> Result<Vec<DerivationNode>> {
    let allowed: BTreeSet<&str> = tokens.iter().copied().collect();
    let mut found: BTreeMap<String, DerivationNode> = BTreeMap::new();
    for candidate in enumerate_derivations(grammar, max_uses, tokens.len(), Some(&allowed)) {
        let derived = candidate.replay(grammar)?;
        if derived.yield_terminals() == tokens {
            found.entry(candidate.render()).or_insert(candidate);
        }
    }
    Ok(found.into_values().collect())
}

/// Every string of length at most `k` the grammar derives.
pub fn strings_up_to(grammar: &Grammar, k: usize) -> Result<BTreeSet<Vec<String>>> {
    let budget = derivation_budget(grammar, k)?;
    let mut out = BTreeSet::new();
    for derivation in enumerate_derivations(grammar, budget, k, None) {
        let derived = derivation.replay(grammar)?;
        let tokens = derived.yield_terminals();
        if tokens.len() <= k {
            out.insert(tokens);
        }
    }
    Ok(out)
}

/// All valid derivations with at most `max_uses` tree uses and at most
/// `max_len` own-yield tokens, optionally restricted to trees whose tokens
/// all appear in `allowed`.
fn enumerate_derivations(
    grammar: &Grammar,
    max_uses: usize,
    max_len: usize,
    allowed: Option<&BTreeSet<&str>>,
) -> Vec<DerivationNode> {
    let mut out = Vec::new();
    for tree in grammar.initial_trees() {
        if tree.root().label.text() != grammar.start() || is_skeleton(tree) {
            continue;
        }
        for (node, _, _) in expand_use(
            grammar,
            tree,
            DerivOp::Root,
            None,
            max_uses,
            max_len,
            allowed,
        ) {
            out.push(node);
        }
    }
    out
}

type Expansion = (DerivationNode, usize, usize); // derivation, uses, yield length

fn expand_use(
    grammar: &Grammar,
    tree: &ElementaryTree,
    op: DerivOp,
    site: Option<GornAddress>,
    budget: usize,
    max_len: usize,
    allowed: Option<&BTreeSet<&str>>,
) -> Vec<Expansion> {
    if budget == 0 {
        return Vec::new();
    }
    let own = tree.own_yield();
    if own.len() > max_len {
        return Vec::new();
    }
    if let Some(allowed) = allowed {
        if own.iter().any(|t| !allowed.contains(t)) {
            return Vec::new();
        }
    }

    // Option lists per composition site. Each option is a set of child
    // derivations (empty for "no adjunction") with its cost.
    let mut slots: Vec<Vec<(Vec<DerivationNode>, usize, usize)>> = Vec::new();

    for site_addr in tree.substitution_sites() {
        let label = tree
            .node_at(&site_addr)
            .expect("site address from the tree itself")
            .label
            .clone();
        let mut options = Vec::new();
        for candidate in grammar.initial_trees() {
            if candidate.root().label != label || is_skeleton(candidate) {
                continue;
            }
            for (node, uses, len) in expand_use(
                grammar,
                candidate,
                DerivOp::Substitution,
                Some(site_addr.clone()),
                budget - 1,
                max_len.saturating_sub(own.len()),
                allowed,
            ) {
                options.push((vec![node], uses, len));
            }
        }
        if options.is_empty() {
            return Vec::new(); // a mandatory site cannot be filled
        }
        slots.push(options);
    }

    for (addr, node) in tree.addresses() {
        if node.label.is_terminal() || node.marker == Marker::Substitution {
            continue;
        }
        let mut options: Vec<(Vec<DerivationNode>, usize, usize)> = Vec::new();
        if !node.constraint.is_obligatory() {
            options.push((Vec::new(), 0, 0));
        }
        if !node.constraint.forbids_adjunction() {
            for aux in grammar.auxiliary_trees() {
                if aux.root().label != node.label
                    || is_skeleton(aux)
                    || !node.constraint.admits(Some(aux.name()))
                {
                    continue;
                }
                for (child, uses, len) in expand_use(
                    grammar,
                    aux,
                    DerivOp::Adjunction,
                    Some(addr.clone()),
                    budget - 1,
                    max_len.saturating_sub(own.len()),
                    allowed,
                ) {
                    options.push((vec![child], uses, len));
                }
            }
        }
        if options.is_empty() {
            return Vec::new(); // obligatory adjunction cannot be satisfied
        }
        // Skip slots that only offer "nothing".
        if options.len() == 1 && options[0].0.is_empty() {
            continue;
        }
        slots.push(options);
    }

    // Cartesian product over slots with budget and length pruning.
    let mut acc: Vec<(Vec<DerivationNode>, usize, usize)> = vec![(Vec::new(), 0, 0)];
    for options in &slots {
        let mut next = Vec::new();
        for (children, uses, len) in &acc {
            for (opt_children, opt_uses, opt_len) in options {
                let total_uses = uses + opt_uses;
                let total_len = len + opt_len;
                if 1 + total_uses > budget || own.len() + total_len > max_len {
                    continue;
                }
                let mut combined = children.clone();
                combined.extend(opt_children.iter().cloned());
                next.push((combined, total_uses, total_len));
            }
        }
        acc = next;
        if acc.is_empty() {
            return Vec::new();
        }
    }

    acc.into_iter()
        .map(|(children, uses, len)| {
            let node = DerivationNode {
                tree_name: tree.name().to_owned(),
                op,
                site: site.clone(),
                children,
            };
            (node, 1 + uses, own.len() + len)
        })
        .collect()
}
