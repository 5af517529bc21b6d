//! Text formats: a DOT subset and JSON for graphs, JSON for coding
//! functions, linear coding functions and unicast instances.
//!
//! DOT grammar (attributes and graph-level settings are ignored with a
//! warning):
//!
//! ```text
//! graph := "strict"? "digraph" ID? "{" stmt* "}"
//! stmt  := NODE ("->" NODE)* attrs? ";"?
//!        | ("graph" | "node" | "edge") attrs ";"?
//!        | ID "=" ID ";"?
//! NODE  := decimal natural, optionally quoted
//! ```
//!
//! Canonical emission lists every vertex in ascending order, then the arcs
//! in lexicographic order.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coding::CodingFunction;
use crate::digraph::{Digraph, MAX_VERTICES};
use crate::error::{Error, Result};
use crate::instance::UnicastInstance;
use crate::linear::LinearCodingFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dot,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            _ => Err(Error::Invalid(format!("unknown format {s:?}"))),
        }
    }
}

/// A non-fatal remark about the input, with its position when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{l}:{c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Diagnostic>,
}

/// Any document the tools accept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Graph(Digraph),
    Function(CodingFunction),
    Linear(LinearCodingFunction),
    Instance(UnicastInstance),
}

/// JSON if the first non-blank character is `{`, DOT otherwise.
pub fn sniff(text: &str) -> Format {
    if text.trim_start().starts_with('{') {
        Format::Json
    } else {
        Format::Dot
    }
}

pub fn parse_digraph(text: &str) -> Result<Parsed<Digraph>> {
    match parse_document(text)? {
        Parsed {
            value: Document::Graph(g),
            warnings,
        } => Ok(Parsed { value: g, warnings }),
        _ => Err(Error::Invalid("expected a graph document".into())),
    }
}

/// Parses a graph in either format, or a JSON function or instance
/// (recognised by its `tables`, `matrix` or `pairs` field).
pub fn parse_document(text: &str) -> Result<Parsed<Document>> {
    if sniff(text) == Format::Dot {
        let Parsed { value, warnings } = parse_dot(text)?;
        return Ok(Parsed {
            value: Document::Graph(value),
            warnings,
        });
    }
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    let Some(obj) = value.as_object() else {
        return Err(Error::Invalid("expected a JSON object".into()));
    };
    let document = if obj.contains_key("pairs") {
        Document::Instance(from_value(value)?)
    } else if obj.contains_key("tables") {
        Document::Function(from_value(value)?)
    } else if obj.contains_key("matrix") {
        Document::Linear(from_value(value)?)
    } else if obj.contains_key("arcs") {
        let raw: RawGraph = from_value(value)?;
        let mut warnings = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &raw.arcs {
            if !seen.insert((u, v)) {
                warnings.push(Diagnostic {
                    line: None,
                    column: None,
                    message: format!("duplicate arc {u} -> {v} ignored"),
                });
            }
        }
        return Ok(Parsed {
            value: Document::Graph(Digraph::from_arcs(raw.n, raw.arcs)?),
            warnings,
        });
    } else {
        return Err(Error::Invalid(
            "unrecognised JSON document: expected one of the fields arcs, tables, matrix, pairs"
                .into(),
        ));
    };
    Ok(Parsed {
        value: document,
        warnings: Vec::new(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Invalid(e.to_string()))
}

pub fn emit(g: &Digraph, format: Format) -> String {
    match format {
        Format::Dot => emit_dot(g),
        Format::Json => emit_json(g),
    }
}

pub fn emit_dot(g: &Digraph) -> String {
    let mut s = String::from("digraph {\n");
    for v in 0..g.n() {
        s.push_str(&format!("  {v};\n"));
    }
    for (u, v) in g.arcs() {
        s.push_str(&format!("  {u} -> {v};\n"));
    }
    s.push_str("}\n");
    s
}

pub fn emit_json(g: &Digraph) -> String {
    let mut s = serde_json::to_string(g).expect("graphs serialize");
    s.push('\n');
    s
}

pub fn function_to_json(f: &CodingFunction) -> String {
    serde_json::to_string(f).expect("functions serialize") + "\n"
}

pub fn linear_to_json(f: &LinearCodingFunction) -> String {
    serde_json::to_string(f).expect("functions serialize") + "\n"
}

pub fn instance_to_json(inst: &UnicastInstance) -> String {
    serde_json::to_string(inst).expect("instances serialize") + "\n"
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Arrow,
    UndirectedEdge,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Equals,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Cursor {
    chars: Vec<char>,
    i: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.i + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut cur = Cursor {
        chars: text.chars().collect(),
        i: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek(0) {
        let (line, column) = (cur.line, cur.column);
        let mut push = |tok| tokens.push(Token { tok, line, column });
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' || (c == '/' && cur.peek(1) == Some('/')) {
            while cur.peek(0).is_some_and(|ch| ch != '\n') {
                cur.bump();
            }
            continue;
        }
        if c == '/' && cur.peek(1) == Some('*') {
            cur.bump();
            cur.bump();
            loop {
                match (cur.peek(0), cur.peek(1)) {
                    (None, _) => return Err(parse_error(line, column, "unterminated comment")),
                    (Some('*'), Some('/')) => {
                        cur.bump();
                        cur.bump();
                        break;
                    }
                    _ => {
                        cur.bump();
                    }
                }
            }
            continue;
        }
        let simple = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = simple {
            cur.bump();
            push(tok);
            continue;
        }
        if c == '-' && matches!(cur.peek(1), Some('>') | Some('-')) {
            cur.bump();
            let tok = if cur.bump() == Some('>') {
                Tok::Arrow
            } else {
                Tok::UndirectedEdge
            };
            push(tok);
            continue;
        }
        if c == '"' {
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.bump() {
                    None => return Err(parse_error(line, column, "unterminated string")),
                    Some('"') => break,
                    Some('\\') => {
                        if let Some(ch) = cur.bump() {
                            s.push(ch);
                        }
                    }
                    Some(ch) => s.push(ch),
                }
            }
            push(Tok::Quoted(s));
            continue;
        }
        if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let mut s = String::new();
            s.push(c);
            cur.bump();
            while let Some(ch) = cur
                .peek(0)
                .filter(|&ch| ch.is_alphanumeric() || ch == '_' || ch == '.')
            {
                s.push(ch);
                cur.bump();
            }
            push(Tok::Word(s));
            continue;
        }
        return Err(parse_error(
            line,
            column,
            format!("unexpected character {c:?}"),
        ));
    }
    Ok(tokens)
}

struct DotParser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    warnings: Vec<Diagnostic>,
}

impl DotParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.column))
    }

    fn next(&mut self) -> Result<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| parse_error(self.end.0, self.end.1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().is_some_and(|t| &t.tok == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let (l, c) = self.here();
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(parse_error(l, c, format!("expected {what}")))
        }
    }

    fn warn(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.warnings.push(Diagnostic {
            line: Some(line),
            column: Some(column),
            message: message.into(),
        });
    }

    fn skip_attrs(&mut self, warn: bool) -> Result<()> {
        let (l, c) = self.here();
        if !self.eat(&Tok::LBracket) {
            return Ok(());
        }
        loop {
            let t = self.next()?;
            if t.tok == Tok::RBracket {
                break;
            }
        }
        if warn {
            self.warn(l, c, "attributes ignored");
        }
        Ok(())
    }

    fn node(&mut self) -> Result<usize> {
        let t = self.next()?;
        let text = match &t.tok {
            Tok::Word(s) | Tok::Quoted(s) => s.clone(),
            _ => return Err(parse_error(t.line, t.column, "expected a vertex label")),
        };
        if text.is_empty() || !text.chars().all(|c| c.is_ascii_digit()) {
            return Err(parse_error(
                t.line,
                t.column,
                format!("vertex labels must be decimal naturals, got {text:?}"),
            ));
        }
        match text.parse::<usize>() {
            Ok(v) if v < MAX_VERTICES => Ok(v),
            _ => Err(parse_error(
                t.line,
                t.column,
                format!("vertex label {text} out of range (labels must be below {MAX_VERTICES})"),
            )),
        }
    }

    fn graph(&mut self) -> Result<Digraph> {
        let mut t = self.next()?;
        if t.tok == Tok::Word("strict".into()) {
            t = self.next()?;
        }
        match &t.tok {
            Tok::Word(w) if w == "digraph" => {}
            Tok::Word(w) if w == "graph" => {
                return Err(parse_error(t.line, t.column, "only digraphs are supported"));
            }
            _ => return Err(parse_error(t.line, t.column, "expected `digraph`")),
        }
        if matches!(
            self.peek().map(|t| &t.tok),
            Some(Tok::Word(_)) | Some(Tok::Quoted(_))
        ) {
            self.pos += 1;
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut n = 0usize;
        let mut arcs = Vec::new();
        let mut seen = std::collections::HashSet::new();
        loop {
            let (l, c) = self.here();
            if self.eat(&Tok::RBrace) {
                break;
            }
            if self.eat(&Tok::Semi) {
                continue;
            }
            let head = self
                .peek()
                .cloned()
                .ok_or_else(|| parse_error(l, c, "expected `}`"))?;
            if let Tok::Word(w) = &head.tok {
                if matches!(w.as_str(), "graph" | "node" | "edge") {
                    self.pos += 1;
                    self.skip_attrs(false)?;
                    self.warn(l, c, format!("`{w}` settings ignored"));
                    self.eat(&Tok::Semi);
                    continue;
                }
                if self
                    .tokens
                    .get(self.pos + 1)
                    .is_some_and(|t| t.tok == Tok::Equals)
                {
                    self.pos += 2;
                    self.next()?;
                    self.warn(l, c, format!("graph attribute `{w}` ignored"));
                    self.eat(&Tok::Semi);
                    continue;
                }
            }
            let mut u = self.node()?;
            n = n.max(u + 1);
            loop {
                let (al, ac) = self.here();
                if self.eat(&Tok::UndirectedEdge) {
                    return Err(parse_error(
                        al,
                        ac,
                        "undirected edge `--` in a digraph; use `->`",
                    ));
                }
                if !self.eat(&Tok::Arrow) {
                    break;
                }
                let (vl, vc) = self.here();
                let v = self.node()?;
                n = n.max(v + 1);
                if seen.insert((u, v)) {
                    arcs.push((u, v));
                } else {
                    self.warn(vl, vc, format!("duplicate arc {u} -> {v} ignored"));
                }
                u = v;
            }
            self.skip_attrs(true)?;
            self.eat(&Tok::Semi);
        }
        if let Some(t) = self.peek() {
            return Err(parse_error(
                t.line,
                t.column,
                "trailing input after the graph",
            ));
        }
        Digraph::from_arcs(n, arcs)
    }
}

pub fn parse_dot(text: &str) -> Result<Parsed<Digraph>> {
    let tokens = lex(text)?;
    let end = text
        .lines()
        .enumerate()
        .last()
        .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    let mut p = DotParser {
        tokens,
        pos: 0,
        end,
        warnings: Vec::new(),
    };
    let g = p.graph()?;
    Ok(Parsed {
        value: g,
        warnings: p.warnings,
    })
}
