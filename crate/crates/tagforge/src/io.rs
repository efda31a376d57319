//! Text formats for grammars and lexicons.
//!
//! Grammar files start with a `start: <NT>` header followed by `tree` and
//! `family` blocks. One node per line, two spaces of indentation per tree
//! level. Markers: `!` substitution, `*` foot, `@` anchor. Constraints:
//! `{NA}`, `{OA}`, `{OA: n1,n2}`, `{SA: n1,n2}`. Terminal leaves are
//! quoted (`'word'`, epsilon `''`) and anchors may be lexicalized inline
//! (`V@ = saw`). `#` starts a comment. Everything is UTF-8; labels and
//! tokens may use any unicode letters.
//!
//! Lexicon files hold `word : target[, target]*` lines where a target is a
//! tree or family name, optionally `family(adposition='on')`.
//!
//! Serialization is canonical: trees sorted by name, then families sorted
//! by name, parameters before skeletons, LF newlines. `parse` then
//! `serialize` canonicalizes any accepted document; canonical documents
//! round-trip byte for byte.

use std::collections::BTreeSet;

use crate::error::{Result, TagError};
use crate::grammar::{
    AdjConstraint, ElementaryTree, Grammar, Marker, NameSet, Symbol, TreeKind, TreeNode,
    ValidationReport,
};
use crate::lexicon::{AdpositionOrder, HeadDirection, LexEntry, Lexicon, TreeFamily};

const INDENT: usize = 2;

/// Parse a grammar document and run structural validation on the result.
/// Violations are returned alongside the grammar, not raised as errors.
pub fn parse_grammar(text: &str) -> Result<(Grammar, ValidationReport)> {
    let mut start: Option<String> = None;
    let mut trees: Vec<ElementaryTree> = Vec::new();
    let mut families: Vec<TreeFamily> = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut block: Option<BlockBuilder> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start_matches(' ').len();
        if line.trim_start().starts_with('\t') || line[..indent].contains('\t') {
            return Err(TagError::syntax(
                line_no,
                1,
                "tabs are not allowed; indent with spaces",
            ));
        }
        let body = &line[indent..];

        if indent == 0 {
            if let Some(done) = block.take() {
                done.finish(&mut trees, &mut families)?;
            }
            let words: Vec<&str> = body.split_whitespace().collect();
            match words.as_slice() {
                ["start:", s] => {
                    if start.is_some() {
                        return Err(TagError::syntax(line_no, 1, "duplicate start header"));
                    }
                    start = Some((*s).to_owned());
                }
                ["tree", name, ":", kind] | ["family", name, ":", kind] => {
                    if start.is_none() {
                        return Err(TagError::syntax(
                            line_no,
                            1,
                            "expected 'start: <NT>' before the first block",
                        ));
                    }
                    let kind = match *kind {
                        "initial" => TreeKind::Initial,
                        "auxiliary" => TreeKind::Auxiliary,
                        other => {
                            return Err(TagError::syntax(
                                line_no,
                                1,
                                format!("unknown tree kind '{other}'"),
                            ))
                        }
                    };
                    if !names.insert((*name).to_owned()) {
                        return Err(TagError::syntax(
                            line_no,
                            1,
                            format!("duplicate tree name {name}"),
                        ));
                    }
                    block = Some(BlockBuilder::new(
                        (*name).to_owned(),
                        kind,
                        words[0] == "family",
                        line_no,
                    ));
                }
                _ => {
                    return Err(TagError::syntax(
                        line_no,
                        1,
                        "expected 'start:', 'tree <name> : <kind>' or 'family <name> : <kind>'",
                    ))
                }
            }
            continue;
        }

        let Some(builder) = block.as_mut() else {
            return Err(TagError::syntax(
                line_no,
                indent + 1,
                "indented line outside a block",
            ));
        };
        if !indent.is_multiple_of(INDENT) {
            return Err(TagError::syntax(
                line_no,
                indent + 1,
                "indentation must be a multiple of two spaces",
            ));
        }
        builder.push_line(line_no, indent / INDENT, body)?;
    }
    if let Some(done) = block.take() {
        done.finish(&mut trees, &mut families)?;
    }

    let start = start.ok_or_else(|| TagError::syntax(1, 1, "missing 'start: <NT>' header"))?;
    let grammar = Grammar::new(start, trees, families)?;
    let report = grammar.validate();
    Ok((grammar, report))
}

struct BlockBuilder {
    name: String,
    kind: TreeKind,
    is_family: bool,
    header_line: usize,
    head_direction: Option<HeadDirection>,
    adposition_order: Option<AdpositionOrder>,
    // Stack of open nodes, one entry per depth level.
    stack: Vec<(usize, TreeNode, usize)>,
    root: Option<TreeNode>,
}

impl BlockBuilder {
    fn new(name: String, kind: TreeKind, is_family: bool, header_line: usize) -> Self {
        BlockBuilder {
            name,
            kind,
            is_family,
            header_line,
            head_direction: None,
            adposition_order: None,
            stack: Vec::new(),
            root: None,
        }
    }

    fn push_line(&mut self, line_no: usize, depth: usize, body: &str) -> Result<()> {
        if let Some(rest) = body.strip_prefix("param ") {
            if !self.is_family {
                return Err(TagError::syntax(
                    line_no,
                    1,
                    "param lines belong in family blocks",
                ));
            }
            if !self.stack.is_empty() || self.root.is_some() {
                return Err(TagError::syntax(
                    line_no,
                    1,
                    "params must precede the skeleton",
                ));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            match words.as_slice() {
                ["head_direction", "=", v] => {
                    self.head_direction = Some(HeadDirection::parse(v).ok_or_else(|| {
                        TagError::syntax(line_no, 1, format!("unknown head direction '{v}'"))
                    })?);
                }
                ["adposition_order", "=", v] => {
                    self.adposition_order = Some(AdpositionOrder::parse(v).ok_or_else(|| {
                        TagError::syntax(line_no, 1, format!("unknown adposition order '{v}'"))
                    })?);
                }
                _ => {
                    return Err(TagError::syntax(
                        line_no,
                        1,
                        "expected 'param <key> = <value>'",
                    ))
                }
            }
            return Ok(());
        }

        let node = parse_node_line(line_no, body)?;
        if self.root.is_some() && depth == 1 {
            return Err(TagError::syntax(
                line_no,
                1,
                "a block holds exactly one tree",
            ));
        }
        if depth > self.stack.len() + 1 {
            return Err(TagError::syntax(line_no, 1, "indentation skips a level"));
        }
        while self.stack.len() >= depth {
            self.pop_one(line_no)?;
        }
        if depth > 1 {
            let (_, parent, parent_line) = self.stack.last().expect("depth checked");
            if parent.label.is_terminal() {
                return Err(TagError::syntax(
                    line_no,
                    1,
                    format!("terminal leaf on line {parent_line} cannot have children"),
                ));
            }
            if parent.marker == Marker::Anchor && !parent.children.is_empty() {
                return Err(TagError::syntax(
                    line_no,
                    1,
                    "inline-lexicalized anchor cannot have children",
                ));
            }
        }
        self.stack.push((depth, node, line_no));
        Ok(())
    }

    fn pop_one(&mut self, line_no: usize) -> Result<()> {
        let (depth, node, _) = self.stack.pop().expect("pop on empty stack");
        if depth == 1 {
            self.root = Some(node);
        } else {
            match self.stack.last_mut() {
                Some((_, parent, _)) => parent.children.push(node),
                None => return Err(TagError::syntax(line_no, 1, "broken indentation")),
            }
        }
        Ok(())
    }

    fn finish(
        mut self,
        trees: &mut Vec<ElementaryTree>,
        families: &mut Vec<TreeFamily>,
    ) -> Result<()> {
        while !self.stack.is_empty() {
            self.pop_one(self.header_line)?;
        }
        let root = self.root.take().ok_or_else(|| {
            TagError::syntax(
                self.header_line,
                1,
                format!("block {} has no nodes", self.name),
            )
        })?;
        if self.is_family {
            let direction = self.head_direction.ok_or_else(|| {
                TagError::syntax(
                    self.header_line,
                    1,
                    format!("family {} is missing 'param head_direction'", self.name),
                )
            })?;
            families.push(TreeFamily::new(
                self.name,
                self.kind,
                direction,
                self.adposition_order,
                root,
            ));
        } else {
            trees.push(ElementaryTree::new(self.name, self.kind, root));
        }
        Ok(())
    }
}

/// Remove a `#` comment, ignoring `#` inside quoted tokens.
fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_node_line(line_no: usize, body: &str) -> Result<TreeNode> {
    let body = body.trim_end();
    let err = |col: usize, msg: String| TagError::syntax(line_no, col, msg);

    if let Some(rest) = body.strip_prefix('\'') {
        let close = rest
            .find('\'')
            .ok_or_else(|| err(1, "unterminated quoted token".into()))?;
        let token = &rest[..close];
        let trailing = rest[close + 1..].trim();
        if !trailing.is_empty() {
            return Err(err(close + 2, "unexpected text after quoted token".into()));
        }
        if token.chars().any(char::is_whitespace) {
            return Err(err(1, "quoted tokens cannot contain whitespace".into()));
        }
        return Ok(TreeNode::new(Symbol::terminal(token), Marker::None));
    }

    let reserved = |c: char| "!*@{}'=#".contains(c) || c.is_whitespace();
    let label_end = body.find(reserved).unwrap_or(body.len());
    let label = &body[..label_end];
    if label.is_empty() {
        return Err(err(1, format!("expected a node label, found '{body}'")));
    }
    let mut rest = &body[label_end..];

    let mut marker = Marker::None;
    if let Some(c) = rest.chars().next() {
        marker = match c {
            '!' => Marker::Substitution,
            '*' => Marker::Foot,
            '@' => Marker::Anchor,
            _ => Marker::None,
        };
        if marker != Marker::None {
            rest = &rest[c.len_utf8()..];
        }
    }

    let mut constraint: Option<AdjConstraint> = None;
    let trimmed = rest.trim_start();
    if let Some(after) = trimmed.strip_prefix('{') {
        let close = after
            .find('}')
            .ok_or_else(|| err(label_end + 1, "unterminated constraint".into()))?;
        constraint = Some(parse_constraint(line_no, after[..close].trim())?);
        rest = after[close + 1..].trim_start();
    } else {
        rest = trimmed;
    }

    let mut lexeme: Option<&str> = None;
    if let Some(after) = rest.strip_prefix('=') {
        if marker != Marker::Anchor {
            return Err(err(
                label_end + 1,
                "inline lexeme requires an anchor marker".into(),
            ));
        }
        let word = after.trim();
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(err(
                label_end + 1,
                "expected a single lexeme after '='".into(),
            ));
        }
        lexeme = Some(word);
        rest = "";
    }
    if !rest.trim().is_empty() {
        return Err(err(
            label_end + 1,
            format!("unexpected trailing text '{}'", rest.trim()),
        ));
    }

    let mut node = TreeNode::new(Symbol::nonterminal(label), marker);
    node.constraint = match constraint {
        Some(c) => c,
        // Substitution sites carry implicit NA.
        None if marker == Marker::Substitution => AdjConstraint::Null,
        None => AdjConstraint::default(),
    };
    if let Some(word) = lexeme {
        node.children.push(TreeNode::lexical(word));
    }
    Ok(node)
}

fn parse_constraint(line_no: usize, text: &str) -> Result<AdjConstraint> {
    let err = |msg: String| TagError::syntax(line_no, 1, msg);
    if text == "NA" {
        return Ok(AdjConstraint::Null);
    }
    if text == "OA" {
        return Ok(AdjConstraint::Obligatory(NameSet::Any));
    }
    let (kind, names) = text
        .split_once(':')
        .ok_or_else(|| err(format!("unknown constraint '{{{text}}}'")))?;
    let names: Vec<String> = names
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect();
    if names.is_empty() {
        return Err(err("constraint set cannot be empty; use {NA}".into()));
    }
    match kind.trim() {
        "SA" => Ok(AdjConstraint::Selective(NameSet::listed(names))),
        "OA" => Ok(AdjConstraint::Obligatory(NameSet::listed(names))),
        other => Err(err(format!("unknown constraint kind '{other}'"))),
    }
}

/// Canonical text form of a grammar.
pub fn serialize_grammar(grammar: &Grammar) -> String {
    let mut out = format!("start: {}\n", grammar.start());

    let mut trees: Vec<&ElementaryTree> = grammar.all_trees().collect();
    trees.sort_by(|a, b| a.name().cmp(b.name()));
    for tree in trees {
        out.push('\n');
        out.push_str(&format!("tree {} : {}\n", tree.name(), tree.kind()));
        write_node(tree.root(), 1, &mut out);
    }

    let mut families: Vec<&TreeFamily> = grammar.families().collect();
    families.sort_by(|a, b| a.name().cmp(b.name()));
    for family in families {
        out.push('\n');
        out.push_str(&format!("family {} : {}\n", family.name(), family.kind()));
        out.push_str(&format!(
            "  param head_direction = {}\n",
            family.head_direction().as_str()
        ));
        if let Some(order) = family.adposition_order() {
            out.push_str(&format!("  param adposition_order = {}\n", order.as_str()));
        }
        write_node(family.skeleton(), 1, &mut out);
    }
    out
}

fn write_node(node: &TreeNode, depth: usize, out: &mut String) {
    for _ in 0..depth * INDENT / 2 {
        out.push_str("  ");
    }
    match (&node.label, node.marker) {
        (Symbol::Terminal(t), _) => {
            out.push('\'');
            out.push_str(t);
            out.push('\'');
            out.push('\n');
            return;
        }
        (Symbol::Nonterminal(label), marker) => {
            out.push_str(label);
            match marker {
                Marker::Substitution => out.push('!'),
                Marker::Foot => out.push('*'),
                Marker::Anchor => out.push('@'),
                _ => {}
            }
            out.push_str(&render_constraint(node));
            // Anchors with their lexical child are written inline.
            if marker == Marker::Anchor {
                if let Some(word) = node.children.first().and_then(TreeNode::lexeme) {
                    out.push_str(" = ");
                    out.push_str(word);
                    out.push('\n');
                    return;
                }
            }
            out.push('\n');
        }
    }
    for child in &node.children {
        write_node(child, depth + 1, out);
    }
}

fn render_constraint(node: &TreeNode) -> String {
    let c = &node.constraint;
    if c.is_default() {
        return String::new();
    }
    if node.marker == Marker::Substitution && c.equivalent(&AdjConstraint::Null) {
        return String::new(); // implicit on substitution sites
    }
    match c {
        AdjConstraint::Null => "{NA}".into(),
        AdjConstraint::Selective(NameSet::Listed(set)) if set.is_empty() => "{NA}".into(),
        AdjConstraint::Selective(NameSet::Listed(set)) => {
            format!(
                "{{SA: {}}}",
                set.iter().cloned().collect::<Vec<_>>().join(",")
            )
        }
        AdjConstraint::Selective(NameSet::Any) => String::new(),
        // An empty obligatory set means any auxiliary tree, mandatorily.
        AdjConstraint::Obligatory(NameSet::Any) => "{OA}".into(),
        AdjConstraint::Obligatory(NameSet::Listed(set)) if set.is_empty() => "{OA}".into(),
        AdjConstraint::Obligatory(NameSet::Listed(set)) => {
            format!(
                "{{OA: {}}}",
                set.iter().cloned().collect::<Vec<_>>().join(",")
            )
        }
    }
}

/// Parse a lexicon document.
pub fn parse_lexicon(text: &str) -> Result<Lexicon> {
    let mut lexicon = Lexicon::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (word, targets) = line.split_once(':').ok_or_else(|| {
            TagError::syntax(line_no, 1, "expected 'word : tree_or_family[, ...]'")
        })?;
        let word = word.trim();
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(TagError::syntax(
                line_no,
                1,
                "the word must be a single token",
            ));
        }
        let mut any = false;
        for target in targets.split(',') {
            let target = target.trim();
            if target.is_empty() {
                continue;
            }
            lexicon.add(word, parse_lex_target(line_no, target)?);
            any = true;
        }
        if !any {
            return Err(TagError::syntax(line_no, 1, "entry lists no targets"));
        }
    }
    Ok(lexicon)
}

fn parse_lex_target(line_no: usize, target: &str) -> Result<LexEntry> {
    let err = |msg: &str| TagError::syntax(line_no, 1, msg.to_owned());
    match target.split_once('(') {
        None => Ok(LexEntry::tree(target)),
        Some((name, rest)) => {
            let rest = rest
                .strip_suffix(')')
                .ok_or_else(|| err("unterminated '(' in lexicon target"))?;
            let value = rest
                .trim()
                .strip_prefix("adposition=")
                .ok_or_else(|| err("expected adposition='...' in parentheses"))?
                .trim();
            let word = value
                .strip_prefix('\'')
                .and_then(|v| v.strip_suffix('\''))
                .ok_or_else(|| err("adposition value must be quoted"))?;
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(err("adposition must be a single token"));
            }
            Ok(LexEntry::with_adposition(name.trim(), word))
        }
    }
}

/// Canonical text form of a lexicon: words sorted, targets sorted.
pub fn serialize_lexicon(lexicon: &Lexicon) -> String {
    let mut out = String::new();
    for (word, entries) in lexicon.entries() {
        let mut targets: Vec<String> = entries
            .iter()
            .map(|e| match &e.adposition {
                Some(adp) => format!("{}(adposition='{adp}')", e.target),
                None => e.target.clone(),
            })
            .collect();
        targets.sort();
        out.push_str(&format!("{word} : {}\n", targets.join(", ")));
    }
    out
}
