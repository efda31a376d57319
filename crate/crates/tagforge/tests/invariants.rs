//! Cross-module invariants: finite ambiguity on lexicalized grammars,
//! parser soundness (every extracted derivation validates and replays to
//! the input), and address stability under adjunction.

use proptest::prelude::*;

use tagforge::algebra::{adjunction_remap, WorkTree};
use tagforge::bundled;
use tagforge::derivation::DerivationNode;
use tagforge::grammar::{TreeKind, TreeNode};
use tagforge::oracle;
use tagforge::parser::{parse_all, ParseOptions};
use tagforge::GornAddress;

/// Binomial-based Catalan numbers, an independent count of the ways `k`
/// single-site-pair auxiliaries can stack.
fn catalan(k: usize) -> usize {
    let mut c = 1usize;
    for i in 0..k {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// Stacked adverbs keep the forest finite and the counts exact: each
/// auxiliary offers exactly two adjunction sites (its root and its foot),
/// so k adverbs stack in Catalan(k) distinct derivations.
#[test]
fn finite_ambiguity_with_stacked_adverbs() {
    let grammar = bundled::grammar("english_fig4.tag").unwrap();
    assert!(grammar.is_lexicalized());
    for k in 1..=8usize {
        let mut tokens = vec!["yesterday"; k];
        tokens.extend(["a", "man", "saw", "Mary"]);
        assert!(tokens.len() <= 12);
        let forest = parse_all(&grammar, &tokens, &ParseOptions::default()).unwrap();
        assert_eq!(
            forest.total_found,
            catalan(k),
            "k={k} adverbs should stack in Catalan(k) ways"
        );
    }
}

#[test]
fn stacked_adverbs_agree_with_brute_force() {
    let grammar = bundled::grammar("english_fig4.tag").unwrap();
    for k in 1..=4usize {
        let mut tokens = vec!["yesterday"; k];
        tokens.extend(["a", "man", "saw", "Mary"]);
        let budget = oracle::derivation_budget(&grammar, tokens.len()).unwrap();
        let expected: Vec<String> = oracle::enumerate_brute_force(&grammar, &tokens, budget)
            .unwrap()
            .iter()
            .map(DerivationNode::render)
            .collect();
        let got: Vec<String> = parse_all(&grammar, &tokens, &ParseOptions::default())
            .unwrap()
            .derivations
            .iter()
            .map(DerivationNode::render)
            .collect();
        assert_eq!(got, expected, "k={k}");
    }
}

#[test]
fn forest_derivations_validate_and_replay_to_the_input() {
    let cases: Vec<(&str, &str)> = vec![
        ("english_fig4.tag", "yesterday a man saw Mary"),
        ("english_fig4.tag", "yesterday yesterday a man saw Mary"),
        ("ambiguity_fixture.tag", "thief goods stole police alerted"),
        ("count_anbncndn.tag", "a a b b c c d d"),
    ];
    for (file, sentence) in cases {
        let grammar = bundled::grammar(file).unwrap();
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let forest = parse_all(&grammar, &tokens, &ParseOptions::default()).unwrap();
        assert!(!forest.is_empty(), "{file}: {sentence}");
        for derivation in &forest.derivations {
            let report = derivation.validate(&grammar);
            assert!(report.is_empty(), "{file}: {sentence}:\n{report}");
            let derived = derivation.replay(&grammar).unwrap();
            assert_eq!(derived.yield_terminals(), tokens, "{file}: {sentence}");
        }
    }
}

fn cross_check(doc: &str, sentences: &[&str]) {
    let (grammar, report) = tagforge::io::parse_grammar(doc).unwrap();
    assert!(report.is_empty(), "{report}");
    for sentence in sentences {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let budget = oracle::derivation_budget(&grammar, tokens.len()).unwrap();
        let expected: Vec<String> = oracle::enumerate_brute_force(&grammar, &tokens, budget)
            .unwrap()
            .iter()
            .map(DerivationNode::render)
            .collect();
        let got: Vec<String> = parse_all(&grammar, &tokens, &ParseOptions::default())
            .unwrap()
            .derivations
            .iter()
            .map(DerivationNode::render)
            .collect();
        assert_eq!(got, expected, "disagreement on: {sentence}");
    }
}

/// Two distinct adverbs give two derivations per surface order: wrapping
/// the inner tree's root and hanging below the outer tree's foot build
/// the same derived tree through different histories, and the forest
/// keeps both.
#[test]
fn distinct_adverbs_cross_checked() {
    let doc = "\
start: S

tree α_run : initial
  S
    NP!
    VP
      V@ = ran

tree α_she : initial
  NP
    N@ = she

tree β_quickly : auxiliary
  S
    Ad@ = quickly
    S*

tree β_yesterday : auxiliary
  S
    Ad@ = yesterday
    S*
";
    let (grammar, _) = tagforge::io::parse_grammar(doc).unwrap();
    for sentence in ["yesterday quickly she ran", "quickly yesterday she ran"] {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let forest = parse_all(&grammar, &tokens, &ParseOptions::default()).unwrap();
        assert_eq!(forest.len(), 2, "{sentence}");
        let derived: Vec<String> = forest
            .derivations
            .iter()
            .map(|d| d.replay(&grammar).unwrap().bracketed())
            .collect();
        assert_eq!(derived[0], derived[1], "same derived tree, two histories");
    }
    cross_check(
        doc,
        &[
            "yesterday quickly she ran",
            "quickly yesterday she ran",
            "she ran",
            "yesterday she ran",
            "she yesterday ran",
        ],
    );
}

/// Epsilon-yield initial trees may fill substitution sites when they have
/// no sites of their own; the bound on tree uses is derived for them.
#[test]
fn epsilon_initial_substitution_cross_checked() {
    let doc = "\
start: S

tree α_obj : initial
  NP
    ''

tree α_top : initial
  S
    NP!
    'x'
    NP!
";
    let (grammar, report) = tagforge::io::parse_grammar(doc).unwrap();
    assert!(report.is_empty(), "{report}");
    let forest = parse_all(&grammar, &["x"], &ParseOptions::default()).unwrap();
    assert_eq!(forest.len(), 1);
    assert_eq!(forest.derivations[0].use_count(), 3);
    cross_check(doc, &["x", "", "x x"]);
}

/// Anchor nodes host adjunction like any other interior node unless a
/// constraint says otherwise.
#[test]
fn adjunction_at_anchor_nodes_cross_checked() {
    let doc = "\
start: S

tree α_ran : initial
  S
    NP!
    VP
      V@ = ran

tree α_she : initial
  NP
    N@ = she

tree β_really : auxiliary
  V
    Ad@ = really
    V*
";
    let (grammar, _) = tagforge::io::parse_grammar(doc).unwrap();
    let tokens = ["she", "really", "ran"];
    let forest = parse_all(&grammar, &tokens, &ParseOptions::default()).unwrap();
    assert_eq!(forest.len(), 1);
    assert_eq!(
        forest.derivations[0].render(),
        "α_ran@root\n  α_she@1\n  β_really@2.1\n"
    );
    assert_eq!(
        forest.derivations[0].replay(&grammar).unwrap().bracketed(),
        "(S (NP (N she)) (VP (V (Ad really) (V ran))))"
    );
    cross_check(doc, &["she really ran", "she ran", "really she ran"]);
}

/// Obligatory adjunction must be discharged exactly once per OA node, in
/// both engines.
#[test]
fn obligatory_adjunction_cross_checked() {
    let doc = "\
start: S

tree α : initial
  S
    A{OA}
      'x'

tree β_a1 : auxiliary
  A{NA}
    'p'
    A*{NA}

tree β_a2 : auxiliary
  A{NA}
    'q'
    A*{NA}
";
    cross_check(doc, &["x", "p x", "q x", "p q x", "p p x"]);
    let (grammar, _) = tagforge::io::parse_grammar(doc).unwrap();
    assert!(
        parse_all(&grammar, &["x"], &ParseOptions::default())
            .unwrap()
            .is_empty(),
        "an unsatisfied OA node cannot complete"
    );
    assert_eq!(
        parse_all(&grammar, &["p", "x"], &ParseOptions::default())
            .unwrap()
            .len(),
        1
    );
}

// ---- address stability under adjunction --------------------------------

fn host_strategy() -> impl Strategy<Value = WorkTree> {
    let leaf = "[a-d]{1,2}".prop_map(|t| TreeNode::terminal(&t));
    leaf.prop_recursive(3, 20, 3, |inner| {
        proptest::collection::vec(inner, 1..4)
            .prop_map(|children| TreeNode::interior("S").with_children(children))
    })
    .prop_map(|root| {
        let root = if root.children.is_empty() {
            TreeNode::interior("S").with_children(vec![root])
        } else {
            root
        };
        WorkTree::new(root, TreeKind::Initial, None)
    })
}

fn simple_aux() -> WorkTree {
    WorkTree::new(
        TreeNode::interior("S").with_children(vec![
            TreeNode::terminal("L"),
            TreeNode::interior("S")
                .with_children(vec![TreeNode::foot("S"), TreeNode::terminal("M")]),
            TreeNode::terminal("R"),
        ]),
        TreeKind::Auxiliary,
        Some("β".to_owned()),
    )
}

proptest! {
    /// Every host node keeps its label at the remapped address: unchanged
    /// outside the displaced subtree, shifted below the foot at or under
    /// the adjunction site.
    #[test]
    fn adjunction_preserves_labels_at_remapped_addresses(
        host in host_strategy(),
        pick in any::<prop::sample::Index>(),
    ) {
        let sites: Vec<GornAddress> = host
            .root()
            .walk()
            .into_iter()
            .filter(|(_, n)| !n.is_frontier() && n.label.is_nonterminal())
            .map(|(a, _)| a)
            .collect();
        let site = sites[pick.index(sites.len())].clone();
        let aux = simple_aux();
        let foot = aux.foot_address().unwrap();
        let out = host.adjoin(&site, &aux).unwrap();

        for (addr, node) in host.root().walk() {
            let remapped = adjunction_remap(&addr, &site, &foot);
            if !site.is_prefix_of(&addr) {
                prop_assert_eq!(&remapped, &addr, "outside nodes stay put");
            }
            let found = out.node_at(&remapped).unwrap();
            prop_assert_eq!(&found.label, &node.label, "at {} -> {}", addr, remapped);
        }
    }
}
