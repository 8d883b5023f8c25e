//! Edge-list and ownership text formats.
//!
//! Edge list: the first non-comment line is `n`, then one `u v` pair per
//! line, 0-indexed. Ownership: one `u v owner` triple per line. In both,
//! `#` starts a comment and blank lines are skipped.

use std::fmt::Write as _;
use std::path::Path;

use vspc_core::game::OwnershipProfile;
use vspc_core::Graph;

use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn fields<const K: usize>(line_no: usize, line: &str) -> Result<[usize; K], ParseError> {
    let mut out = [0usize; K];
    let mut tokens = line.split_whitespace();
    for slot in out.iter_mut() {
        let tok = tokens.next().ok_or_else(|| err(line_no, format!("expected {K} integers")))?;
        *slot = tok.parse().map_err(|_| err(line_no, format!("not a node index: `{tok}`")))?;
    }
    if let Some(extra) = tokens.next() {
        return Err(err(line_no, format!("unexpected token `{extra}`")));
    }
    Ok(out)
}

pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| err(1, "missing node count"))?;
    let [n] = fields::<1>(first, header)?;
    let mut g = Graph::empty(n).map_err(|e| err(first, e.to_string()))?;
    for (line_no, line) in lines {
        let [u, v] = fields::<2>(line_no, line)?;
        if u < n && v < n && u != v && g.has_link(u, v) {
            return Err(err(line_no, format!("link {u}-{v} listed twice")));
        }
        g.add_link(u, v).map_err(|e| err(line_no, e.to_string()))?;
    }
    Ok(g)
}

/// Ownership triples for the links of `g`; every link must be listed once.
pub fn parse_ownership(text: &str, g: &Graph) -> Result<OwnershipProfile, ParseError> {
    let mut triples = Vec::new();
    let mut last = 0;
    for (line_no, line) in content_lines(text) {
        let [u, v, owner] = fields::<3>(line_no, line)?;
        if u >= g.n() || v >= g.n() {
            return Err(err(line_no, format!("node out of range for n = {}", g.n())));
        }
        if !g.has_link(u, v) {
            return Err(err(line_no, format!("{u}-{v} is not a link of the graph")));
        }
        triples.push((u, v, owner));
        OwnershipProfile::from_triples(g.n(), &triples).map_err(|e| err(line_no, e.to_string()))?;
        last = line_no;
    }
    let own = OwnershipProfile::from_triples(g.n(), &triples).map_err(|e| err(last, e.to_string()))?;
    own.check_against(g).map_err(|_| err(last + 1, "some links of the graph have no owner"))?;
    Ok(own)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut s = format!("{}\n", g.n());
    for (u, v) in g.links() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn format_ownership(own: &OwnershipProfile) -> String {
    let mut s = String::new();
    for (u, v, o) in own.triples() {
        let _ = writeln!(s, "{u} {v} {o}");
    }
    s
}

pub fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })
}

pub fn read_edge_list(path: &Path) -> Result<Graph, Error> {
    parse_edge_list(&read_file(path)?).map_err(|source| Error::Parse { path: path.to_owned(), source })
}

pub fn read_ownership(path: &Path, g: &Graph) -> Result<OwnershipProfile, Error> {
    parse_ownership(&read_file(path)?, g).map_err(|source| Error::Parse { path: path.to_owned(), source })
}
