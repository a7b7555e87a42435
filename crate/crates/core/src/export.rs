//! Slice export: a structured JSON document (the source of truth) and a
//! DOT rendering derived from it.
//!
//! In DOT, nodes are keyed by canonical tree key and arcs are labelled
//! `removed>inserted`. Perfect arcs are solid, non-perfect arcs dashed and
//! red. The root is drawn with a double border and nodes that still reach
//! the target are filled.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::search::FlipGraphSlice;

pub fn slice_to_json(slice: &FlipGraphSlice) -> String {
    serde_json::to_string_pretty(slice).expect("slice serializes")
}

pub fn slice_from_json(text: &str) -> Result<FlipGraphSlice, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn slice_to_dot(slice: &FlipGraphSlice) -> String {
    let mut s = String::from("digraph slice {\n  node [shape=box, fontname=monospace];\n");
    for (i, node) in slice.nodes.iter().enumerate() {
        let mut attrs = vec![format!("label=\"{}\\nnp={}\"", node.tree.key(), node.min_nonperfect)];
        if i == slice.root {
            attrs.push("peripheries=2".into());
        }
        if node.reaches_target {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=\"#e8f4e8\"".into());
        }
        let _ = writeln!(s, "  \"{}\" [{}];", node.tree.key(), attrs.join(", "));
    }
    for arc in &slice.arcs {
        let style = if arc.perfect {
            "style=solid"
        } else {
            "style=dashed, color=red"
        };
        let _ = writeln!(
            s,
            "  \"{}\" -> \"{}\" [label=\"{}\", {style}];",
            slice.nodes[arc.from].tree.key(),
            slice.nodes[arc.to].tree.key(),
            arc.mv
        );
    }
    s.push_str("}\n");
    s
}

/// What [`parse_dot`] extracts from a graph description.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DotGraph {
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

/// A small reader for the DOT subset written by [`slice_to_dot`]: one
/// `digraph` with quoted node ids, node statements, `->` edge statements
/// and bracketed attribute lists. Enough to check that exports are well
/// formed; not a general DOT parser.
pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let mut lx = Lexer::new(text);
    lx.expect_word("digraph")?;
    if lx.peek() != Some('{') {
        lx.word()?;
    }
    lx.expect_char('{')?;
    let mut g = DotGraph::default();
    loop {
        lx.skip_ws();
        match lx.peek() {
            Some('}') => {
                lx.bump();
                break;
            }
            None => return Err("unexpected end of input".into()),
            _ => {}
        }
        let first = lx.id()?;
        lx.skip_ws();
        if lx.starts_with("->") {
            lx.bump();
            lx.bump();
            let second = lx.id()?;
            let attrs = lx.attrs()?;
            for id in [&first, &second] {
                if !g.nodes.contains_key(id.as_str()) {
                    return Err(format!("edge endpoint {id} was not declared"));
                }
            }
            g.edges.push((first, second, attrs));
        } else {
            let attrs = lx.attrs()?;
            if first != "node" && first != "edge" && first != "graph" {
                g.nodes.insert(first, attrs);
            }
        }
        lx.skip_ws();
        if lx.peek() == Some(';') {
            lx.bump();
        }
    }
    lx.skip_ws();
    if lx.peek().is_some() {
        return Err("trailing input after graph".into());
    }
    Ok(g)
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            rest: text,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest.starts_with(s)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn expect_char(&mut self, c: char) -> Result<(), String> {
        self.skip_ws();
        match self.bump() {
            Some(got) if got == c => Ok(()),
            got => Err(format!("expected '{c}', found {got:?}")),
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), String> {
        let got = self.word()?;
        if got == w {
            Ok(())
        } else {
            Err(format!("expected {w}, found {got}"))
        }
    }

    fn word(&mut self) -> Result<String, String> {
        self.skip_ws();
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_alphanumeric() || *c == '_' || *c == '.' || *c == '#') {
            out.push(c);
            self.bump();
        }
        if out.is_empty() {
            Err(format!("expected an identifier, found {:?}", self.peek()))
        } else {
            Ok(out)
        }
    }

    fn id(&mut self) -> Result<String, String> {
        self.skip_ws();
        if self.peek() != Some('"') {
            return self.word();
        }
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('\\') => {
                    out.push('\\');
                    out.push(self.bump().ok_or("unterminated escape")?);
                }
                Some('"') => return Ok(out),
                Some(c) => out.push(c),
                None => return Err("unterminated string".into()),
            }
        }
    }

    fn attrs(&mut self) -> Result<BTreeMap<String, String>, String> {
        let mut out = BTreeMap::new();
        self.skip_ws();
        if self.peek() != Some('[') {
            return Ok(out);
        }
        self.bump();
        loop {
            self.skip_ws();
            if self.peek() == Some(']') {
                self.bump();
                return Ok(out);
            }
            let key = self.id()?;
            self.expect_char('=')?;
            let value = self.id()?;
            out.insert(key, value);
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_trees::{Chord, PlaneTree};
    use crate::search::{reachable_slice, FirstFlipFilter, SliceMode};
    use crate::sequences::PerfectRule;

    fn small_slice() -> FlipGraphSlice {
        let c = Chord::new;
        let star = PlaneTree::new(5, [c(0, 1), c(0, 2), c(0, 3), c(0, 4)]).unwrap();
        let path = PlaneTree::new(5, [c(0, 1), c(1, 2), c(2, 3), c(3, 4)]).unwrap();
        reachable_slice(&star, &path, 1, FirstFlipFilter::Any, SliceMode::BudgetOnly, PerfectRule::Strict, 100_000).unwrap()
    }

    #[test]
    fn structured_round_trip() {
        let s = small_slice();
        assert_eq!(slice_from_json(&slice_to_json(&s)).unwrap(), s);
    }

    #[test]
    fn dot_parses_back_to_the_same_graph() {
        let s = small_slice();
        let g = parse_dot(&slice_to_dot(&s)).unwrap();
        assert_eq!(g.nodes.len(), s.node_count());
        assert_eq!(g.edges.len(), s.arc_count());
        let dashed = g.edges.iter().filter(|e| e.2.get("style").map(String::as_str) == Some("dashed")).count();
        assert_eq!(dashed, s.arcs.iter().filter(|a| !a.perfect).count());
        assert!(parse_dot("digraph { \"a\" -> \"b\"; }").is_err());
        assert!(parse_dot("digraph x { \"a\"; \"b\"; \"a\" -> \"b\" [label=\"x\"]; }").is_ok());
    }
}
