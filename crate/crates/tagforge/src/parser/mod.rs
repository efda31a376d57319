//! Bottom-up agenda-driven chart parser over the five-index TAG item
//! (node, span start, foot gap, span end), with an adjunction-done flag.
//!
//! Deduction rules: terminal and epsilon scans, foot hypotheses for every
//! gap, unary and binary child composition, wrapping by a completed
//! auxiliary tree (at most one adjunction per node), substitution of
//! completed initial trees, and a no-adjoin transition wherever adjunction
//! is not obligatory. The chart closure is a fixed point, so the final
//! item set does not depend on processing order; the parallel schedule
//! computes consequences wave by wave with the same result as the serial
//! one, and forests come back in a canonical order either way.

pub mod chart;
pub mod compile;
mod extract;

use rayon::prelude::*;

pub use chart::{Chart, Item, ItemId, Phase, Step};
pub use compile::{binarize, CompiledGrammar};

use crate::derivation::DerivationNode;
use crate::error::{Result, TagError};
use crate::grammar::{Grammar, TreeKind};
use crate::oracle;

/// Agenda processing order. Both schedules produce identical charts and
/// identical canonical forests; serial is the debugging baseline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Serial,
    Parallel,
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Truncate the forest to this many derivations (reported, not silent).
    pub max_parses: Option<usize>,
    /// Override the derived bound on elementary-tree uses per derivation.
    /// Required for grammars with empty-yield trees the engine cannot
    /// bound on its own.
    pub max_tree_uses: Option<usize>,
    pub schedule: Schedule,
}

/// Size counters for the completed chart.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChartStats {
    pub items: usize,
    pub steps: usize,
}

/// All derivations of an input, in canonical order (lexicographic on the
/// derivation rendering).
#[derive(Clone, Debug)]
pub struct ParseForest {
    pub derivations: Vec<DerivationNode>,
    /// Total derivations found before `max_parses` truncation.
    pub total_found: usize,
    pub truncated: bool,
    pub stats: ChartStats,
}

impl ParseForest {
    pub fn len(&self) -> usize {
        self.derivations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivations.is_empty()
    }

    /// Concatenated canonical renderings; byte-identical across runs and
    /// schedules.
    pub fn canonical_text(&self) -> String {
        self.derivations
            .iter()
            .map(DerivationNode::render)
            .collect()
    }
}

/// A grammar compiled for repeated parsing.
pub struct TagParser {
    grammar: Grammar,
    compiled: CompiledGrammar,
}

impl TagParser {
    /// Validate and compile. Grammars with structural violations are
    /// rejected here rather than producing undefined parses.
    pub fn new(grammar: &Grammar) -> Result<Self> {
        let report = grammar.validate();
        if !report.is_empty() {
            return Err(TagError::InvalidGrammar { report });
        }
        Ok(TagParser {
            compiled: binarize(grammar),
            grammar: grammar.clone(),
        })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn compiled(&self) -> &CompiledGrammar {
        &self.compiled
    }

    /// Is the token sequence in the grammar's language?
    pub fn recognize(&self, tokens: &[&str]) -> Result<bool> {
        // The same boundedness gate as parsing: grammars whose ambiguity
        // cannot be bounded are rejected up front.
        oracle::derivation_budget(&self.grammar, tokens.len())?;
        let chart = self.run_chart(tokens, Schedule::Serial);
        Ok(!chart.goals(&self.compiled, tokens.len() as u32).is_empty())
    }

    /// Build the full chart and enumerate every distinct derivation whose
    /// yield is exactly `tokens`.
    pub fn parse(&self, tokens: &[&str], options: &ParseOptions) -> Result<ParseForest> {
        let budget = match options.max_tree_uses {
            Some(b) => b,
            None => oracle::derivation_budget(&self.grammar, tokens.len())?,
        };
        let chart = self.run_chart(tokens, options.schedule);
        let goals = chart.goals(&self.compiled, tokens.len() as u32);
        let mut derivations = extract::extract(&self.compiled, &chart, &goals, budget);
        derivations.sort_by_key(DerivationNode::render);

        let total_found = derivations.len();
        let truncated = options.max_parses.is_some_and(|m| total_found > m);
        if let Some(m) = options.max_parses {
            derivations.truncate(m);
        }
        Ok(ParseForest {
            derivations,
            total_found,
            truncated,
            stats: ChartStats {
                items: chart.len(),
                steps: chart.step_count(),
            },
        })
    }

    /// Run the chart to closure and return it (for inspection and tests).
    pub fn run_chart(&self, tokens: &[&str], schedule: Schedule) -> Chart {
        let cg = &self.compiled;
        let n = tokens.len() as u32;
        let mut chart = Chart::new();
        let mut frontier: Vec<ItemId> = Vec::new();

        let push = |chart: &mut Chart, frontier: &mut Vec<ItemId>, item: Item, step: Step| {
            let (id, new) = chart.insert(item, step, cg);
            if new {
                frontier.push(id);
            }
        };

        // Scan terminals.
        for (i, token) in tokens.iter().enumerate() {
            if let Some(leaves) = cg.lex_index.get(*token) {
                for &(tree, node) in leaves {
                    push(
                        &mut chart,
                        &mut frontier,
                        Item {
                            tree,
                            node,
                            phase: Phase::Done,
                            start: i as u32,
                            gap: None,
                            end: i as u32 + 1,
                        },
                        Step::Lex,
                    );
                }
            }
        }
        // Epsilon leaves span every empty position.
        for &(tree, node) in &cg.epsilon_leaves {
            for i in 0..=n {
                push(
                    &mut chart,
                    &mut frontier,
                    Item {
                        tree,
                        node,
                        phase: Phase::Done,
                        start: i,
                        gap: None,
                        end: i,
                    },
                    Step::Eps,
                );
            }
        }
        // Foot hypotheses for every gap.
        for &(tree, node) in &cg.foot_nodes {
            for j in 0..=n {
                for k in j..=n {
                    push(
                        &mut chart,
                        &mut frontier,
                        Item {
                            tree,
                            node,
                            phase: Phase::Pending,
                            start: j,
                            gap: Some((j, k)),
                            end: k,
                        },
                        Step::Foot,
                    );
                }
            }
        }

        // Closure, wave by wave. Consequences of a wave are computed
        // against the chart as of the wave's start (plus everything the
        // wave itself inserted), which covers every item pair in at least
        // one direction; insertion is idempotent, so the fixed point is
        // schedule-independent.
        while !frontier.is_empty() {
            let consequences: Vec<(Item, Step)> = match schedule {
                Schedule::Serial => frontier
                    .iter()
                    .flat_map(|&id| self.consequences(&chart, id))
                    .collect(),
                Schedule::Parallel => frontier
                    .par_iter()
                    .map(|&id| self.consequences(&chart, id))
                    .reduce(Vec::new, |mut a, mut b| {
                        a.append(&mut b);
                        a
                    }),
            };
            let mut next = Vec::new();
            for (item, step) in consequences {
                let (id, new) = chart.insert(item, step, cg);
                if new {
                    next.push(id);
                }
            }
            frontier = next;
        }
        chart
    }

    fn consequences(&self, chart: &Chart, id: ItemId) -> Vec<(Item, Step)> {
        let cg = &self.compiled;
        let it = *chart.item(id);
        let tree = &cg.trees[it.tree];
        let node = tree.node(it.node);
        let mut out = Vec::new();

        match it.phase {
            Phase::Pending => {
                if !node.constraint.is_obligatory() {
                    out.push((
                        Item {
                            phase: Phase::Done,
                            ..it
                        },
                        Step::NoAdjoin(id),
                    ));
                }
                if node.hosts_adjunction() {
                    for &aux_id in chart.aux_roots_with_gap((it.start, it.end)) {
                        let aux_item = chart.item(aux_id);
                        let aux_tree = &cg.trees[aux_item.tree];
                        if admits(node, aux_tree) {
                            out.push((
                                Item {
                                    tree: it.tree,
                                    node: it.node,
                                    phase: Phase::Done,
                                    start: aux_item.start,
                                    gap: it.gap,
                                    end: aux_item.end,
                                },
                                Step::Adjoin {
                                    aux: aux_id,
                                    host: id,
                                },
                            ));
                        }
                    }
                }
            }
            Phase::Done => match node.parent {
                Some(parent_id) => {
                    let parent = tree.node(parent_id);
                    match parent.shape {
                        compile::Shape::Unary(_) => out.push((
                            Item {
                                node: parent_id,
                                phase: Phase::Pending,
                                ..it
                            },
                            Step::Unary(id),
                        )),
                        compile::Shape::Binary(left, right) if left == it.node => {
                            for &right_id in chart.done_starting_at(it.tree, right, it.end) {
                                let r = chart.item(right_id);
                                out.push((
                                    Item {
                                        tree: it.tree,
                                        node: parent_id,
                                        phase: Phase::Pending,
                                        start: it.start,
                                        gap: merge_gaps(it.gap, r.gap),
                                        end: r.end,
                                    },
                                    Step::Binary(id, right_id),
                                ));
                            }
                        }
                        compile::Shape::Binary(left, _) => {
                            for &left_id in chart.done_ending_at(it.tree, left, it.start) {
                                let l = chart.item(left_id);
                                out.push((
                                    Item {
                                        tree: it.tree,
                                        node: parent_id,
                                        phase: Phase::Pending,
                                        start: l.start,
                                        gap: merge_gaps(l.gap, it.gap),
                                        end: it.end,
                                    },
                                    Step::Binary(left_id, id),
                                ));
                            }
                        }
                        _ => unreachable!("leaf shapes have no children"),
                    }
                }
                None => match tree.kind {
                    // A finished initial tree fills matching substitution sites.
                    TreeKind::Initial => {
                        let label = tree.root_label().text();
                        if let Some(sites) = cg.subst_sites_by_label.get(label) {
                            for &(site_tree, site_node) in sites {
                                out.push((
                                    Item {
                                        tree: site_tree,
                                        node: site_node,
                                        phase: Phase::Done,
                                        start: it.start,
                                        gap: None,
                                        end: it.end,
                                    },
                                    Step::Subst { arg: id },
                                ));
                            }
                        }
                    }
                    // A finished auxiliary tree wraps hosts matching its gap.
                    TreeKind::Auxiliary => {
                        let gap = it.gap.expect("auxiliary root spans its foot gap");
                        for &host_id in chart.hosts_spanning(gap.0, gap.1) {
                            let host = chart.item(host_id);
                            let host_node = cg.trees[host.tree].node(host.node);
                            if admits(host_node, tree) {
                                out.push((
                                    Item {
                                        tree: host.tree,
                                        node: host.node,
                                        phase: Phase::Done,
                                        start: it.start,
                                        gap: host.gap,
                                        end: it.end,
                                    },
                                    Step::Adjoin {
                                        aux: id,
                                        host: host_id,
                                    },
                                ));
                            }
                        }
                    }
                },
            },
        }
        out
    }
}

fn admits(host: &compile::CNode, aux: &compile::CompiledTree) -> bool {
    host.hosts_adjunction()
        && host.label == *aux.root_label()
        && !host.constraint.forbids_adjunction()
        && host.constraint.admits(Some(&aux.name))
}

fn merge_gaps(a: Option<(u32, u32)>, b: Option<(u32, u32)>) -> Option<(u32, u32)> {
    debug_assert!(
        a.is_none() || b.is_none(),
        "siblings cannot both dominate the foot"
    );
    a.or(b)
}

/// Recognize `tokens` with a freshly compiled parser.
pub fn recognize(grammar: &Grammar, tokens: &[&str]) -> Result<bool> {
    TagParser::new(grammar)?.recognize(tokens)
}

/// Parse `tokens` into the complete derivation forest.
pub fn parse_all(
    grammar: &Grammar,
    tokens: &[&str],
    options: &ParseOptions,
) -> Result<ParseForest> {
    TagParser::new(grammar)?.parse(tokens, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn fig4_sentence_has_exactly_one_parse() {
        let g = bundled::grammar("english_fig4.tag").unwrap();
        let forest = parse_all(
            &g,
            &toks("yesterday a man saw Mary"),
            &ParseOptions::default(),
        )
        .unwrap();
        assert_eq!(forest.len(), 1);
        assert_eq!(
            forest.derivations[0].render(),
            "α_saw@root\n  β_yesterday@0\n  α_man@1\n    α_a@1\n  α_Mary@2.2\n"
        );
        let derived = forest.derivations[0].replay(&g).unwrap();
        assert_eq!(
            derived.yield_terminals(),
            ["yesterday", "a", "man", "saw", "Mary"]
        );
    }

    #[test]
    fn unfilled_sites_mean_no_parse() {
        let g = bundled::grammar("english_fig4.tag").unwrap();
        assert!(!recognize(&g, &toks("man saw")).unwrap());
        assert!(recognize(&g, &toks("a man saw Mary")).unwrap());
        assert!(!recognize(&g, &toks("saw a man Mary")).unwrap());
    }

    #[test]
    fn empty_input_on_lexicalized_grammar_has_no_parse() {
        let g = bundled::grammar("english_fig4.tag").unwrap();
        let forest = parse_all(&g, &[], &ParseOptions::default()).unwrap();
        assert!(forest.is_empty());
    }

    #[test]
    fn counting_grammar_recognizes_equal_blocks() {
        let g = bundled::grammar("count_anbncndn.tag").unwrap();
        let parser = TagParser::new(&g).unwrap();
        assert!(parser.recognize(&[]).unwrap());
        assert!(parser.recognize(&toks("a b c d")).unwrap());
        assert!(parser.recognize(&toks("a a b b c c d d")).unwrap());
        assert!(!parser.recognize(&toks("a b c c d")).unwrap());
        assert!(!parser.recognize(&toks("a a b c d")).unwrap());
        assert!(!parser.recognize(&toks("d c b a")).unwrap());
    }

    #[test]
    fn counting_parse_is_unambiguous() {
        let g = bundled::grammar("count_anbncndn.tag").unwrap();
        let forest = parse_all(&g, &toks("a a b b c c d d"), &ParseOptions::default()).unwrap();
        assert_eq!(forest.len(), 1);
        assert_eq!(forest.derivations[0].use_count(), 3);
    }

    #[test]
    fn ambiguity_fixture_has_two_parses() {
        let g = bundled::grammar("ambiguity_fixture.tag").unwrap();
        let forest = parse_all(
            &g,
            &toks("thief goods stole police alerted"),
            &ParseOptions::default(),
        )
        .unwrap();
        assert_eq!(forest.len(), 2, "forest:\n{}", forest.canonical_text());
        for d in &forest.derivations {
            assert!(d.validate(&g).is_empty());
            assert_eq!(
                d.replay(&g).unwrap().yield_terminals(),
                toks("thief goods stole police alerted")
            );
        }
    }

    #[test]
    fn max_parses_truncation_is_reported() {
        let g = bundled::grammar("ambiguity_fixture.tag").unwrap();
        let forest = parse_all(
            &g,
            &toks("thief goods stole police alerted"),
            &ParseOptions {
                max_parses: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(forest.len(), 1);
        assert_eq!(forest.total_found, 2);
        assert!(forest.truncated);
    }

    #[test]
    fn parallel_schedule_matches_serial() {
        let g = bundled::grammar("ambiguity_fixture.tag").unwrap();
        let parser = TagParser::new(&g).unwrap();
        let tokens = toks("thief goods stole police alerted");
        let serial = parser.parse(&tokens, &ParseOptions::default()).unwrap();
        let parallel = parser
            .parse(
                &tokens,
                &ParseOptions {
                    schedule: Schedule::Parallel,
                    ..Default::default()
                },
            )
            .unwrap();
        assert_eq!(serial.canonical_text(), parallel.canonical_text());
        assert_eq!(serial.stats, parallel.stats);
        let chart_a = parser.run_chart(&tokens, Schedule::Serial);
        let chart_b = parser.run_chart(&tokens, Schedule::Parallel);
        assert_eq!(chart_a.signature(), chart_b.signature());
    }

    #[test]
    fn invalid_grammars_are_rejected_up_front() {
        let (g, report) =
            crate::io::parse_grammar("start: S\n\ntree β : auxiliary\n  S\n    'x'\n    NP*\n")
                .unwrap();
        assert!(!report.is_empty());
        assert!(matches!(
            TagParser::new(&g),
            Err(TagError::InvalidGrammar { .. })
        ));
    }

    #[test]
    fn obligatory_adjunction_is_enforced() {
        let doc = "\
start: S

tree α : initial
  S{OA}
    'x'

tree β : auxiliary
  S{NA}
    'y'
    S*{NA}
";
        let (g, report) = crate::io::parse_grammar(doc).unwrap();
        assert!(report.is_empty(), "{report}");
        assert!(!recognize(&g, &["x"]).unwrap());
        let forest = parse_all(&g, &["y", "x"], &ParseOptions::default()).unwrap();
        assert_eq!(forest.len(), 1);
    }

    #[test]
    fn selective_constraint_restricts_by_name() {
        let doc = "\
start: S

tree α : initial
  S{SA: β_good}
    'x'

tree β_bad : auxiliary
  S{NA}
    'nope'
    S*{NA}

tree β_good : auxiliary
  S{NA}
    'fine'
    S*{NA}
";
        let (g, report) = crate::io::parse_grammar(doc).unwrap();
        assert!(report.is_empty(), "{report}");
        assert!(recognize(&g, &["fine", "x"]).unwrap());
        assert!(!recognize(&g, &["nope", "x"]).unwrap());
    }

    #[test]
    fn unbounded_grammar_errors_without_a_bound() {
        let doc = "start: S\n\ntree α : initial\n  S\n    'x'\n\ntree β : auxiliary\n  S\n    ''\n    S*\n";
        let (g, report) = crate::io::parse_grammar(doc).unwrap();
        assert!(report.is_empty(), "{report}");
        assert!(matches!(
            recognize(&g, &["x"]),
            Err(TagError::UnboundedGrammar { .. })
        ));
        // An explicit bound restores parsing.
        let forest = parse_all(
            &g,
            &["x"],
            &ParseOptions {
                max_tree_uses: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!forest.is_empty());
    }
}
