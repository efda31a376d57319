//! Randomized equivalence testing: generate small lexicalized grammars
//! with arbitrary shapes and constraints, derive sample strings from the
//! grammar itself, and require the chart parser's forest to equal the
//! brute-force enumerator's on every input, positive or negative.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use tagforge::derivation::DerivationNode;
use tagforge::grammar::{
    AdjConstraint, ElementaryTree, Grammar, Marker, NameSet, TreeKind, TreeNode,
};
use tagforge::oracle;
use tagforge::parser::{parse_all, ParseOptions, Schedule};

const NTS: [&str; 3] = ["S", "A", "B"];
const POS: [&str; 2] = ["V", "N"];
const WORDS: [&str; 6] = ["u", "v", "w", "x", "y", "z"];

fn word() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&WORDS[..])
}

fn nt() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&NTS[..])
}

/// The anchored part of a tree: either a bare anchor or an interior node
/// wrapping the anchor with optional terminal siblings.
fn anchored_part() -> impl Strategy<Value = TreeNode> {
    let bare = (prop::sample::select(&POS[..]), word())
        .prop_map(|(pos, w)| TreeNode::anchor(pos).with_children(vec![TreeNode::lexical(w)]));
    let wrapped = (
        nt(),
        prop::option::of(word()),
        prop::sample::select(&POS[..]),
        word(),
        prop::option::of(word()),
    )
        .prop_map(|(label, before, pos, w, after)| {
            let mut children = Vec::new();
            if let Some(b) = before {
                children.push(TreeNode::terminal(b));
            }
            children.push(TreeNode::anchor(pos).with_children(vec![TreeNode::lexical(w)]));
            if let Some(a) = after {
                children.push(TreeNode::terminal(a));
            }
            TreeNode::interior(label).with_children(children)
        });
    prop_oneof![bare, wrapped]
}

/// Extra frontier material: a plain terminal or a substitution site.
fn extra_part() -> impl Strategy<Value = TreeNode> {
    prop_oneof![
        word().prop_map(TreeNode::terminal),
        nt().prop_map(TreeNode::substitution),
    ]
}

fn initial_tree(root_label: &'static str) -> impl Strategy<Value = TreeNode> {
    (
        proptest::collection::vec(extra_part(), 0..2),
        anchored_part(),
        proptest::collection::vec(extra_part(), 0..2),
    )
        .prop_map(move |(before, anchored, after)| {
            let mut children = before;
            children.push(anchored);
            children.extend(after);
            TreeNode::interior(root_label).with_children(children)
        })
}

/// The foot-bearing part of an auxiliary tree, possibly one level down.
fn foot_part(root_label: &'static str) -> impl Strategy<Value = TreeNode> {
    let bare = Just(TreeNode::foot(root_label));
    let nested = (nt(), prop::option::of(word())).prop_map(move |(label, extra)| {
        let mut children = vec![TreeNode::foot(root_label)];
        if let Some(w) = extra {
            children.push(TreeNode::terminal(w));
        }
        TreeNode::interior(label).with_children(children)
    });
    prop_oneof![bare, nested]
}

fn auxiliary_tree(root_label: &'static str) -> impl Strategy<Value = TreeNode> {
    (anchored_part(), foot_part(root_label), any::<bool>()).prop_map(
        move |(anchored, footed, anchor_first)| {
            let children = if anchor_first {
                vec![anchored, footed]
            } else {
                vec![footed, anchored]
            };
            TreeNode::interior(root_label).with_children(children)
        },
    )
}

/// A whole grammar: one initial tree per nonterminal (so substitution
/// sites are fillable), an extra start-rooted initial, and a few
/// auxiliaries over nonterminal and POS labels alike.
fn grammar_strategy() -> impl Strategy<Value = Grammar> {
    let initials = (
        initial_tree("S"),
        initial_tree("S"),
        initial_tree("A"),
        initial_tree("B"),
    );
    let aux_roots =
        proptest::collection::vec(prop::sample::select(&["S", "A", "B", "V", "N"][..]), 0..3);
    (initials, aux_roots, any::<u64>())
        .prop_flat_map(|((s1, s2, a, b), roots, seed)| {
            let auxes: Vec<BoxedStrategy<TreeNode>> = roots
                .into_iter()
                .map(|root| auxiliary_tree(root).boxed())
                .collect();
            (Just((s1, s2, a, b)), auxes, Just(seed))
        })
        .prop_map(|((s1, s2, a, b), auxes, seed)| {
            let mut trees = vec![
                ElementaryTree::new("α_s1", TreeKind::Initial, s1),
                ElementaryTree::new("α_s2", TreeKind::Initial, s2),
                ElementaryTree::new("α_a", TreeKind::Initial, a),
                ElementaryTree::new("α_b", TreeKind::Initial, b),
            ];
            for (i, root) in auxes.into_iter().enumerate() {
                trees.push(ElementaryTree::new(
                    format!("β_{}", i + 1),
                    TreeKind::Auxiliary,
                    root,
                ));
            }
            sprinkle_constraints(&mut trees, seed);
            Grammar::new("S", trees, vec![]).expect("generated names are unique")
        })
        .prop_filter("structurally valid", |g| g.validate().is_empty())
}

/// Deterministically patch some nodes with random constraints, drawing
/// names from the grammar's actual auxiliary trees.
fn sprinkle_constraints(trees: &mut [ElementaryTree], seed: u64) {
    let aux_names: Vec<String> = trees
        .iter()
        .filter(|t| t.kind() == TreeKind::Auxiliary)
        .map(|t| t.name().to_owned())
        .collect();
    let mut state = seed | 1;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as u32
    };

    for tree in trees.iter_mut() {
        let mut root = tree.root().clone();
        patch(&mut root, &aux_names, &mut next);
        *tree = ElementaryTree::new(tree.name(), tree.kind(), root);
    }

    fn patch(node: &mut TreeNode, aux_names: &[String], next: &mut impl FnMut() -> u32) {
        if node.label.is_nonterminal()
            && node.marker != Marker::Substitution
            && !node.is_frontier()
            && next().is_multiple_of(5)
        {
            node.constraint = match next() % 4 {
                0 => AdjConstraint::Null,
                1 if !aux_names.is_empty() => {
                    let pick = aux_names[(next() as usize) % aux_names.len()].clone();
                    AdjConstraint::Selective(NameSet::listed([pick]))
                }
                2 if !aux_names.is_empty() => {
                    let pick = aux_names[(next() as usize) % aux_names.len()].clone();
                    AdjConstraint::Obligatory(NameSet::listed([pick]))
                }
                _ => AdjConstraint::default(),
            };
        }
        for child in &mut node.children {
            patch(child, aux_names, next);
        }
    }
}

/// Sample inputs: the shortest derivable strings plus mutations of them
/// (likely negatives) and a fixed nonsense probe.
fn sample_inputs(grammar: &Grammar) -> Vec<Vec<String>> {
    let mut strings: Vec<Vec<String>> = oracle::strings_up_to(grammar, 5)
        .unwrap_or_default()
        .into_iter()
        .collect();
    strings.sort_by_key(|s| (s.len(), s.join(" ")));
    strings.truncate(3);

    let mut inputs = strings.clone();
    for s in &strings {
        if s.len() >= 2 {
            let mut swapped = s.clone();
            swapped.swap(0, s.len() - 1);
            inputs.push(swapped);
            inputs.push(s[1..].to_vec());
        }
    }
    inputs.push(vec!["u".into(), "q".into()]);
    inputs.sort();
    inputs.dedup();
    inputs
}

#[test]
fn random_grammars_agree_with_the_oracle() {
    let mut runner = TestRunner::new(Config {
        cases: 256,
        ..Config::default()
    });
    runner
        .run(&grammar_strategy(), |grammar| {
            for input in sample_inputs(&grammar) {
                let tokens: Vec<&str> = input.iter().map(String::as_str).collect();
                let budget = oracle::derivation_budget(&grammar, tokens.len()).unwrap();
                let expected: BTreeSet<String> =
                    oracle::enumerate_brute_force(&grammar, &tokens, budget)
                        .unwrap()
                        .iter()
                        .map(DerivationNode::render)
                        .collect();
                let forest = parse_all(&grammar, &tokens, &ParseOptions::default()).unwrap();
                let got: BTreeSet<String> = forest
                    .derivations
                    .iter()
                    .map(DerivationNode::render)
                    .collect();
                prop_assert_eq!(&got, &expected, "input {:?}", tokens);

                for derivation in &forest.derivations {
                    let report = derivation.validate(&grammar);
                    prop_assert!(report.is_empty(), "invalid derivation:\n{report}");
                    let derived = derivation.replay(&grammar).unwrap();
                    prop_assert_eq!(derived.yield_terminals(), input.clone(), "replay mismatch");
                }
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn random_grammars_parse_identically_under_both_schedules() {
    let mut runner = TestRunner::new(Config {
        cases: 32,
        ..Config::default()
    });
    runner
        .run(&grammar_strategy(), |grammar| {
            for input in sample_inputs(&grammar).into_iter().take(3) {
                let tokens: Vec<&str> = input.iter().map(String::as_str).collect();
                let serial = parse_all(&grammar, &tokens, &ParseOptions::default())
                    .unwrap()
                    .canonical_text();
                let parallel = parse_all(
                    &grammar,
                    &tokens,
                    &ParseOptions {
                        schedule: Schedule::Parallel,
                        ..Default::default()
                    },
                )
                .unwrap()
                .canonical_text();
                prop_assert_eq!(&serial, &parallel, "input {:?}", tokens);
            }
            Ok(())
        })
        .unwrap();
}
