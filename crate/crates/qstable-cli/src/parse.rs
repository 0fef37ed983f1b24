//! Text parsers and printers for the one-line object languages: curves,
//! combinatorial types, and partition chains. The grammar is documented in
//! docs/grammar.md; printing then parsing normalizes.

use qstable::curvetype::{CombinatorialType, Component, Singularity};
use qstable::monoid::MonoidElement;
use qstable::tropical::{Edge, Leg, PartitionChain, TropicalCurve, Vertex};
use qstable::SetPartition;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let consumed = &self.text[..self.pos];
        let line = consumed.matches('\n').count() + 1;
        let column = self.pos - consumed.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().map(|c| c.is_whitespace()).unwrap_or(false) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, expected: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(expected) {
            self.pos += expected.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected '{expected}'")))
        }
    }

    fn try_eat(&mut self, expected: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(expected) {
            self.pos += expected.len_utf8();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if !self
            .peek()
            .map(|c| c.is_ascii_alphabetic())
            .unwrap_or(false)
        {
            return Err(self.error("expected an identifier"));
        }
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == '_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }
}

/// Parses the curve language, e.g. `v0:g1; v1; v0-v1:e1; l1@v1; l2@v1; l3@v0`.
/// Vertices may be declared implicitly by edges and legs (genus zero). An
/// optional `gens a,b,c` item pins the generator order; otherwise generators
/// are collected in first-use order.
pub fn parse_curve(text: &str) -> Result<TropicalCurve, ParseError> {
    let mut cur = Cursor::new(text);
    let mut genus: BTreeMap<usize, u32> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut legs: Vec<Leg> = Vec::new();
    let mut generators: Vec<String> = Vec::new();

    let touch = |id: usize, genus: &mut BTreeMap<usize, u32>, order: &mut Vec<usize>| {
        if let std::collections::btree_map::Entry::Vacant(e) = genus.entry(id) {
            e.insert(0);
            order.push(id);
        }
    };

    cur.skip_ws();
    let explicit_gens = cur.text[cur.pos..].starts_with("gens");
    if explicit_gens {
        cur.pos += 4;
        loop {
            let name = cur.ident()?;
            if generators.contains(&name) {
                return Err(cur.error(format!("duplicate generator '{name}'")));
            }
            generators.push(name);
            if !cur.try_eat(',') {
                break;
            }
        }
        cur.eat(';')?;
    }

    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('v') => {
                cur.pos += 1;
                let id = cur.number()?;
                touch(id, &mut genus, &mut order);
                if cur.try_eat(':') {
                    cur.skip_ws();
                    if cur.peek() == Some('g') {
                        cur.pos += 1;
                        let g = cur.number()?;
                        genus.insert(id, g as u32);
                    } else {
                        return Err(cur.error("expected 'g' after ':'"));
                    }
                } else if cur.try_eat('-') {
                    if cur.peek() == Some('v') {
                        cur.pos += 1;
                    }
                    let other = cur.number()?;
                    touch(other, &mut genus, &mut order);
                    cur.eat(':')?;
                    let length = parse_length(&mut cur, &mut generators, explicit_gens)?;
                    edges.push(Edge {
                        ends: (id, other),
                        length,
                    });
                }
            }
            Some('l') => {
                cur.pos += 1;
                let marking = cur.number()?;
                cur.eat('@')?;
                cur.skip_ws();
                if cur.peek() == Some('v') {
                    cur.pos += 1;
                }
                let root = cur.number()?;
                touch(root, &mut genus, &mut order);
                legs.push(Leg { marking, root });
            }
            Some(other) => return Err(cur.error(format!("unexpected '{other}'"))),
            None => return Err(cur.error("empty curve")),
        }
        if cur.at_end() {
            break;
        }
        cur.eat(';')?;
        if cur.at_end() {
            break;
        }
    }

    let vertices: Vec<Vertex> = order
        .iter()
        .map(|&id| Vertex {
            id,
            genus: genus[&id],
        })
        .collect();
    TropicalCurve::new(generators, vertices, edges, legs)
        .map_err(|e| cur.error(format!("invalid curve: {e}")))
}

fn parse_length(
    cur: &mut Cursor,
    generators: &mut Vec<String>,
    explicit_gens: bool,
) -> Result<MonoidElement, ParseError> {
    let mut coeffs: BTreeMap<String, u64> = BTreeMap::new();
    loop {
        cur.skip_ws();
        let coefficient = if cur.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            let c = cur.number()? as u64;
            cur.eat('*')?;
            c
        } else {
            1
        };
        let name = cur.ident()?;
        if !generators.contains(&name) {
            if explicit_gens {
                return Err(cur.error(format!("generator '{name}' not in the gens list")));
            }
            generators.push(name.clone());
        }
        *coeffs.entry(name).or_insert(0) += coefficient;
        if !cur.try_eat('+') {
            break;
        }
    }
    Ok(MonoidElement::from_coeffs(coeffs))
}

/// Prints a curve in the same language; parsing the output reproduces the
/// curve exactly.
pub fn print_curve(curve: &TropicalCurve) -> String {
    let mut items: Vec<String> = Vec::new();
    if !curve.generators().is_empty() {
        items.push(format!("gens {}", curve.generators().join(",")));
    }
    for v in curve.vertices() {
        if v.genus > 0 {
            items.push(format!("v{}:g{}", v.id, v.genus));
        } else {
            items.push(format!("v{}", v.id));
        }
    }
    for e in curve.edges() {
        let terms: Vec<String> = e
            .length
            .coeffs()
            .iter()
            .map(|(g, &c)| {
                if c == 1 {
                    g.clone()
                } else {
                    format!("{c}*{g}")
                }
            })
            .collect();
        items.push(format!("v{}-v{}:{}", e.ends.0, e.ends.1, terms.join("+")));
    }
    for l in curve.legs() {
        items.push(format!("l{}@v{}", l.marking, l.root));
    }
    items.join("; ")
}

/// Parses the combinatorial-type language, e.g.
/// `c0:g0{1,2}; c1:g0{3}; E2[c0,c1]`. Singularity ids are positional; the
/// branch count annotating an elliptic point must match its incidence list.
pub fn parse_type(text: &str) -> Result<CombinatorialType, ParseError> {
    let mut cur = Cursor::new(text);
    let mut components: Vec<Component> = Vec::new();
    let mut singularities: Vec<Singularity> = Vec::new();
    let mut incidence: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut max_marking = 0usize;

    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('c') => {
                cur.pos += 1;
                let id = cur.number()?;
                let mut genus = 0u32;
                if cur.try_eat(':') {
                    cur.skip_ws();
                    if cur.peek() != Some('g') {
                        return Err(cur.error("expected 'g' after ':'"));
                    }
                    cur.pos += 1;
                    genus = cur.number()? as u32;
                }
                let mut markings = std::collections::BTreeSet::new();
                if cur.try_eat('{') {
                    loop {
                        let m = cur.number()?;
                        max_marking = max_marking.max(m);
                        markings.insert(m);
                        if !cur.try_eat(',') {
                            break;
                        }
                    }
                    cur.eat('}')?;
                }
                components.push(Component {
                    id,
                    genus,
                    markings,
                });
            }
            Some('N') | Some('E') => {
                let elliptic = cur.peek() == Some('E');
                cur.pos += 1;
                let annotated = if elliptic { Some(cur.number()?) } else { None };
                let sid = singularities.len();
                singularities.push(Singularity {
                    id: sid,
                    sgenus: u32::from(elliptic),
                });
                cur.eat('[')?;
                let mut total = 0u32;
                loop {
                    cur.skip_ws();
                    if cur.peek() != Some('c') {
                        return Err(cur.error("expected a component reference 'c<id>'"));
                    }
                    cur.pos += 1;
                    let comp = cur.number()?;
                    let mult = if cur.try_eat('x') {
                        cur.number()? as u32
                    } else {
                        1
                    };
                    total += mult;
                    *incidence.entry((comp, sid)).or_insert(0) += mult;
                    if !cur.try_eat(',') {
                        break;
                    }
                }
                cur.eat(']')?;
                if let Some(m) = annotated {
                    if m as u32 != total {
                        return Err(cur.error(format!(
                            "elliptic annotation E{m} does not match {total} branches"
                        )));
                    }
                }
            }
            Some(other) => return Err(cur.error(format!("unexpected '{other}'"))),
            None => return Err(cur.error("empty type")),
        }
        if cur.at_end() {
            break;
        }
        cur.eat(';')?;
        if cur.at_end() {
            break;
        }
    }

    CombinatorialType::new(max_marking, components, singularities, incidence)
        .map_err(|e| cur.error(format!("invalid type: {e}")))
}

/// Parses a chain in the block syntax of the figures, e.g.
/// `1234 < 12|34 < 12|3|4`. Blocks separate with `|`, partitions with `<`;
/// elements are single digits, or comma-separated numbers when any comma is
/// present (for ground sets past 9).
pub fn parse_chain(text: &str) -> Result<PartitionChain, ParseError> {
    let mut partitions_raw: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut offset = 0usize;
    let error_at = |offset: usize, message: String| {
        let consumed = &text[..offset.min(text.len())];
        ParseError {
            line: consumed.matches('\n').count() + 1,
            column: offset - consumed.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1,
            message,
        }
    };
    for chunk in text.split('<') {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for block_text in chunk.split('|') {
            let b = block_text.trim();
            if b.is_empty() {
                return Err(error_at(offset, "empty block".into()));
            }
            let mut block = Vec::new();
            if b.contains(',') {
                for elt in b.split(',') {
                    let x: usize = elt
                        .trim()
                        .parse()
                        .map_err(|_| error_at(offset, format!("bad element '{}'", elt.trim())))?;
                    block.push(x);
                }
            } else {
                for ch in b.chars() {
                    if ch.is_whitespace() {
                        continue;
                    }
                    let x = ch
                        .to_digit(10)
                        .ok_or_else(|| error_at(offset, format!("bad element '{ch}'")))?;
                    block.push(x as usize);
                }
            }
            blocks.push(block);
        }
        partitions_raw.push(blocks);
        offset += chunk.len() + 1;
    }
    let n = partitions_raw
        .iter()
        .flatten()
        .flatten()
        .copied()
        .max()
        .ok_or_else(|| error_at(0, "empty chain".into()))?;
    let mut partitions = Vec::new();
    for (i, blocks) in partitions_raw.into_iter().enumerate() {
        let p = SetPartition::new(n, blocks)
            .map_err(|e| error_at(0, format!("partition {} invalid: {e}", i + 1)))?;
        partitions.push(p);
    }
    PartitionChain::new(n, partitions).map_err(|e| error_at(0, format!("invalid chain: {e}")))
}

/// Prints a chain in the block syntax; single-digit ground sets omit commas.
pub fn print_chain(chain: &PartitionChain) -> String {
    let sep = if chain.n() > 9 { "," } else { "" };
    chain
        .partitions()
        .iter()
        .map(|p| {
            p.blocks()
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(sep)
                })
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect::<Vec<_>>()
        .join(" < ")
}
