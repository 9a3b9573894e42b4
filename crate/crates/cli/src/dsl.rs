//! The site description language.
//!
//! ```text
//! category {
//!     objects: a, b;
//!     arrows: f: a -> b;
//! }
//! coverage { b: [f], [id_b]; }
//! presheaf X { a: [x, y]; b: [u]; f: { u -> x }; }
//! map m: X -> X { a: { x -> x, y -> y }; b: { u -> u }; }
//! ```
//!
//! `compose: (g . f) = h` lists the composite `g . f` of `f: a -> b` and
//! `g: b -> c`. A presheaf action for `f: a -> b` sends elements at `b` to
//! elements at `a`; actions of composites may be left out when they follow
//! from actions given for their factors. Identifiers that are not plain
//! words can be written in double quotes. `#` and `//` start comments.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;
use toposcalc_core::fincat::validate_category_with;
use toposcalc_core::{FinCat, GrothTopology, Omega, Presheaf, PresheafMap, RawCategory, Sieve, SizeCaps};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("semantic error at {line}:{col}: {message}")]
    Semantic { line: usize, col: usize, message: String },
    #[error("validation error: {0}")]
    Validation(#[from] toposcalc_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

const SYMBOLS: [&str; 11] = ["->", "{", "}", "[", "]", "(", ")", ":", ";", ",", "="];

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
        } else if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col, c);
            let mut word = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(DslError::Syntax {
                            line: span.line,
                            col: span.col,
                            message: "unterminated quoted name".into(),
                        })
                    }
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col, '"');
                        break;
                    }
                    Some(&ch) => {
                        word.push(ch);
                        advance(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            out.push(Token { tok: Tok::Ident(word), span });
        } else if is_word(c) {
            let mut word = String::new();
            while i < chars.len() && is_word(chars[i]) {
                word.push(chars[i]);
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
            out.push(Token { tok: Tok::Ident(word), span });
        } else if c == '.' {
            advance(&mut i, &mut line, &mut col, c);
            out.push(Token { tok: Tok::Sym("."), span });
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(DslError::Syntax { line, col, message: format!("unexpected character `{c}`") });
            };
            for ch in sym.chars() {
                advance(&mut i, &mut line, &mut col, ch);
            }
            out.push(Token { tok: Tok::Sym(sym), span });
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}

/// Options affecting how a document is interpreted.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Complete missing composites by rewriting paths, when this is unique.
    pub free_compose: bool,
}

#[derive(Debug, Clone)]
pub struct CoverageEntry {
    pub object: String,
    pub sieves: Vec<Sieve>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct NamedPresheaf {
    pub name: String,
    pub presheaf: Presheaf,
    pub span: Span,
}

impl PartialEq for NamedPresheaf {
    fn eq(&self, other: &Self) -> bool {
        let p = &self.presheaf;
        self.name == other.name
            && *p == other.presheaf
            && p.base().objects().all(|c| p.names(c) == other.presheaf.names(c))
    }
}

#[derive(Debug, Clone)]
pub struct NamedMap {
    pub name: String,
    pub source: String,
    pub target: String,
    pub map: PresheafMap,
    pub span: Span,
}

// Equality of document parts ignores source spans.

impl PartialEq for CoverageEntry {
    fn eq(&self, other: &Self) -> bool {
        self.object == other.object && self.sieves == other.sieves
    }
}

impl PartialEq for NamedMap {
    fn eq(&self, other: &Self) -> bool {
        (&self.name, &self.source, &self.target, &self.map) == (&other.name, &other.source, &other.target, &other.map)
    }
}

/// A parsed and validated site document.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteDocument {
    pub category: Arc<FinCat>,
    pub coverage: Option<Vec<CoverageEntry>>,
    pub presheaves: Vec<NamedPresheaf>,
    pub maps: Vec<NamedMap>,
}

impl SiteDocument {
    pub fn presheaf(&self, name: &str) -> Option<&NamedPresheaf> {
        self.presheaves.iter().find(|p| p.name == name)
    }

    pub fn map(&self, name: &str) -> Option<&NamedMap> {
        self.maps.iter().find(|m| m.name == name)
    }

    /// The topology of the coverage block: the listed sieves validated as
    /// they are when `strict`, otherwise the topology they generate. No
    /// coverage block means the minimal topology.
    pub fn topology(&self, omega: &Arc<Omega>, strict: bool) -> Result<GrothTopology, DslError> {
        let Some(entries) = &self.coverage else {
            return Ok(GrothTopology::minimal(omega));
        };
        let cat = &self.category;
        if strict {
            let mut covers = vec![Vec::new(); cat.object_count()];
            for e in entries {
                covers[cat.object_id(&e.object)?].extend(e.sieves.iter().cloned());
            }
            Ok(GrothTopology::check_axioms(omega, &covers)?)
        } else {
            let sieves: Vec<Sieve> = entries.iter().flat_map(|e| e.sieves.iter().cloned()).collect();
            Ok(GrothTopology::generate(omega, &sieves))
        }
    }
}

/// A `name -> name` pair with the positions of both names.
type Assignment = ((String, Span), (String, Span));

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    caps: &'a SizeCaps,
}

fn syntax<T>(span: Span, message: impl Into<String>) -> Result<T, DslError> {
    Err(DslError::Syntax { line: span.line, col: span.col, message: message.into() })
}

fn semantic<T>(span: Span, message: impl Into<String>) -> Result<T, DslError> {
    Err(DslError::Semantic { line: span.line, col: span.col, message: message.into() })
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn span(&self) -> Span {
        self.peek().span
    }

    fn at(&self, sym: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(s) if *s == sym)
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn eat(&mut self, sym: &str) -> bool {
        if self.at(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), DslError> {
        if self.eat(sym) {
            return Ok(());
        }
        let found = match &self.peek().tok {
            Tok::Ident(w) => format!("`{w}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        };
        syntax(self.span(), format!("expected `{sym}`, found {found}"))
    }

    fn ident(&mut self) -> Result<(String, Span), DslError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(w) => {
                self.pos += 1;
                Ok((w, t.span))
            }
            _ => syntax(t.span, "expected a name"),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<Span, DslError> {
        let (w, span) = self.ident()?;
        if w != word {
            return syntax(span, format!("expected `{word}`, found `{w}`"));
        }
        Ok(span)
    }

    /// `name, name, ...` up to (not including) `end`.
    fn name_list(&mut self, end: &str) -> Result<Vec<(String, Span)>, DslError> {
        let mut out = Vec::new();
        if self.at(end) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    fn category(&mut self, opts: ParseOptions) -> Result<Arc<FinCat>, DslError> {
        self.keyword("category")?;
        self.expect("{")?;
        let mut raw = RawCategory::default();
        let mut spans: HashMap<String, Span> = HashMap::new();
        while !self.eat("}") {
            let (section, span) = self.ident()?;
            self.expect(":")?;
            match section.as_str() {
                "objects" => {
                    for (o, s) in self.name_list(";")? {
                        spans.insert(o.clone(), s);
                        raw.objects.push(o);
                    }
                }
                "arrows" => {
                    if !self.at(";") {
                        loop {
                            let (name, s) = self.ident()?;
                            self.expect(":")?;
                            let src = self.ident()?;
                            self.expect("->")?;
                            let dst = self.ident()?;
                            for (o, os) in [&src, &dst] {
                                if !raw.objects.contains(o) {
                                    return semantic(*os, format!("arrow `{name}` uses unknown object `{o}`"));
                                }
                            }
                            spans.insert(name.clone(), s);
                            raw.arrows.push((name, src.0, dst.0));
                            if !self.eat(",") {
                                break;
                            }
                        }
                    }
                }
                "compose" => {
                    if !self.at(";") {
                        loop {
                            self.expect("(")?;
                            let g = self.ident()?;
                            self.expect(".")?;
                            let f = self.ident()?;
                            self.expect(")")?;
                            self.expect("=")?;
                            let h = self.ident()?;
                            let known = |n: &str| raw.arrows.iter().any(|a| a.0 == n) || n.starts_with("id_");
                            for (a, s) in [&g, &f, &h] {
                                if !known(a) {
                                    return semantic(*s, format!("unknown arrow `{a}` in composite"));
                                }
                            }
                            raw.compose.push((g.0, f.0, h.0));
                            if !self.eat(",") {
                                break;
                            }
                        }
                    }
                }
                other => return syntax(span, format!("unknown category section `{other}`")),
            }
            self.expect(";")?;
        }
        let raw = if opts.free_compose { raw.saturate(self.caps)? } else { raw };
        Ok(Arc::new(validate_category_with(&raw, self.caps)?))
    }

    fn sieve_list(&mut self, cat: &FinCat, c: usize) -> Result<Vec<Sieve>, DslError> {
        let mut out = Vec::new();
        loop {
            let open = self.span();
            self.expect("[")?;
            let mut gens = Vec::new();
            for (a, s) in self.name_list("]")? {
                let Ok(f) = cat.arrow_id(&a) else { return semantic(s, format!("unknown arrow `{a}`")) };
                if cat.target(f) != c {
                    return semantic(s, format!("arrow `{a}` does not end at `{}`", cat.object_name(c)));
                }
                gens.push(f);
            }
            self.expect("]")?;
            match Sieve::generated(cat, c, &gens) {
                Ok(s) => out.push(s),
                Err(e) => return semantic(open, e.to_string()),
            }
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    fn coverage(&mut self, cat: &FinCat) -> Result<Vec<CoverageEntry>, DslError> {
        self.keyword("coverage")?;
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.eat("}") {
            let (o, span) = self.ident()?;
            let Ok(c) = cat.object_id(&o) else { return semantic(span, format!("unknown object `{o}`")) };
            self.expect(":")?;
            let sieves = if self.at(";") { Vec::new() } else { self.sieve_list(cat, c)? };
            self.expect(";")?;
            out.push(CoverageEntry { object: o, sieves, span });
        }
        Ok(out)
    }

    /// `{ x -> y, ... }` as pairs of names.
    fn assignments(&mut self) -> Result<Vec<Assignment>, DslError> {
        self.expect("{")?;
        let mut out = Vec::new();
        if !self.at("}") {
            loop {
                let x = self.ident()?;
                self.expect("->")?;
                let y = self.ident()?;
                out.push((x, y));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect("}")?;
        Ok(out)
    }

    fn presheaf(&mut self, cat: &Arc<FinCat>) -> Result<NamedPresheaf, DslError> {
        let start = self.keyword("presheaf")?;
        let (name, _) = self.ident()?;
        self.expect("{")?;
        let mut names: Vec<Vec<String>> = vec![Vec::new(); cat.object_count()];
        let mut given: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut pending: Vec<(usize, Span, Vec<Assignment>)> = Vec::new();
        while !self.eat("}") {
            let (key, span) = self.ident()?;
            self.expect(":")?;
            if let Ok(c) = cat.object_id(&key) {
                self.expect("[")?;
                for (e, s) in self.name_list("]")? {
                    if names[c].contains(&e) {
                        return semantic(s, format!("element `{e}` listed twice at `{key}`"));
                    }
                    names[c].push(e);
                }
                self.expect("]")?;
                if let Err(e) = self.caps.check_elements("presheaf carrier", names[c].len()) {
                    return semantic(span, e.to_string());
                }
            } else if let Ok(f) = cat.arrow_id(&key) {
                if cat.is_identity(f) {
                    return semantic(span, "identity actions are implicit");
                }
                pending.push((f, span, self.assignments()?));
            } else {
                return semantic(span, format!("`{key}` is neither an object nor an arrow"));
            }
            self.expect(";")?;
        }
        for (f, span, pairs) in pending {
            let (a, b) = (cat.source(f), cat.target(f));
            let mut table = vec![None; names[b].len()];
            for ((x, xs), (y, ys)) in pairs {
                let Some(xi) = names[b].iter().position(|n| *n == x) else {
                    return semantic(xs, format!("`{x}` is not an element at `{}`", cat.object_name(b)));
                };
                let Some(yi) = names[a].iter().position(|n| *n == y) else {
                    return semantic(ys, format!("`{y}` is not an element at `{}`", cat.object_name(a)));
                };
                if table[xi].is_some_and(|prev| prev != yi) {
                    return semantic(xs, format!("`{x}` is sent to two elements"));
                }
                table[xi] = Some(yi);
            }
            if let Some(missing) = table.iter().position(Option::is_none) {
                return semantic(span, format!("no image given for `{}`", names[b][missing]));
            }
            if given.insert(f, table.into_iter().map(Option::unwrap).collect()).is_some() {
                return semantic(span, format!("action of `{}` given twice", cat.arrow_name(f)));
            }
        }
        for c in cat.objects() {
            given.insert(cat.identity(c), (0..names[c].len()).collect());
        }
        // Derive remaining actions from factorizations h = g . f, where
        // X(h) = X(f) . X(g).
        loop {
            let mut progress = false;
            for f in cat.arrow_ids() {
                for g in cat.arrow_ids() {
                    let Some(h) = cat.compose(f, g) else { continue };
                    if given.contains_key(&h) {
                        continue;
                    }
                    if let (Some(xf), Some(xg)) = (given.get(&f), given.get(&g)) {
                        let xh = xg.iter().map(|&y| xf[y]).collect();
                        given.insert(h, xh);
                        progress = true;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        let mut action = Vec::with_capacity(cat.arrow_count());
        for f in cat.arrow_ids() {
            match given.remove(&f) {
                Some(t) => action.push(t),
                None => return semantic(start, format!("presheaf `{name}` has no action for `{}`", cat.arrow_name(f))),
            }
        }
        let presheaf = Presheaf::new(cat.clone(), names, action)?;
        Ok(NamedPresheaf { name, presheaf, span: start })
    }

    fn map(&mut self, cat: &Arc<FinCat>, presheaves: &[NamedPresheaf]) -> Result<NamedMap, DslError> {
        let start = self.keyword("map")?;
        let (name, _) = self.ident()?;
        self.expect(":")?;
        let lookup = |this: &mut Self| -> Result<(String, Presheaf), DslError> {
            let (p, s) = this.ident()?;
            match presheaves.iter().find(|q| q.name == p) {
                Some(q) => Ok((p, q.presheaf.clone())),
                None => semantic(s, format!("unknown presheaf `{p}`")),
            }
        };
        let (source_name, source) = lookup(self)?;
        self.expect("->")?;
        let (target_name, target) = lookup(self)?;
        self.expect("{")?;
        let mut components: Vec<Vec<Option<usize>>> = cat.objects().map(|c| vec![None; source.size(c)]).collect();
        while !self.eat("}") {
            let (o, span) = self.ident()?;
            let Ok(c) = cat.object_id(&o) else { return semantic(span, format!("unknown object `{o}`")) };
            self.expect(":")?;
            for ((x, xs), (y, ys)) in self.assignments()? {
                let Some(xi) = source.element_id(c, &x) else {
                    return semantic(xs, format!("`{x}` is not an element of `{source_name}` at `{o}`"));
                };
                let Some(yi) = target.element_id(c, &y) else {
                    return semantic(ys, format!("`{y}` is not an element of `{target_name}` at `{o}`"));
                };
                if components[c][xi].is_some_and(|prev| prev != yi) {
                    return semantic(xs, format!("`{x}` is sent to two elements"));
                }
                components[c][xi] = Some(yi);
            }
            self.expect(";")?;
        }
        let mut full = Vec::with_capacity(components.len());
        for (c, comp) in components.into_iter().enumerate() {
            if let Some(k) = comp.iter().position(Option::is_none) {
                return semantic(
                    start,
                    format!(
                        "map `{name}` gives no image for `{}` at `{}`",
                        source.element_name(c, k),
                        cat.object_name(c)
                    ),
                );
            }
            full.push(comp.into_iter().map(Option::unwrap).collect());
        }
        let map = PresheafMap::new(source, target, full)?;
        Ok(NamedMap { name, source: source_name, target: target_name, map, span: start })
    }

    /// `presheaf` and `map` blocks until the end of input.
    fn blocks(
        &mut self,
        cat: &Arc<FinCat>,
        presheaves: &mut Vec<NamedPresheaf>,
        maps: &mut Vec<NamedMap>,
    ) -> Result<(), DslError> {
        while !self.at_eof() {
            let (word, span) = match &self.peek().tok {
                Tok::Ident(w) => (w.clone(), self.span()),
                _ => return syntax(self.span(), "expected `presheaf` or `map`"),
            };
            match word.as_str() {
                "presheaf" => {
                    let p = self.presheaf(cat)?;
                    if presheaves.iter().any(|q| q.name == p.name) {
                        return semantic(span, format!("presheaf `{}` defined twice", p.name));
                    }
                    presheaves.push(p);
                }
                "map" => {
                    let m = self.map(cat, presheaves)?;
                    if maps.iter().any(|q| q.name == m.name) {
                        return semantic(span, format!("map `{}` defined twice", m.name));
                    }
                    maps.push(m);
                }
                "category" | "coverage" => return semantic(span, format!("`{word}` block out of place")),
                _ => return syntax(span, format!("expected `presheaf` or `map`, found `{word}`")),
            }
        }
        Ok(())
    }
}

pub fn parse(text: &str, opts: ParseOptions) -> Result<SiteDocument, DslError> {
    parse_with(text, opts, &SizeCaps::current())
}

pub fn parse_with(text: &str, opts: ParseOptions, caps: &SizeCaps) -> Result<SiteDocument, DslError> {
    let mut p = Parser { tokens: lex(text)?, pos: 0, caps };
    let category = p.category(opts)?;
    let coverage = match &p.peek().tok {
        Tok::Ident(w) if w == "coverage" => Some(p.coverage(&category)?),
        _ => None,
    };
    let (mut presheaves, mut maps) = (Vec::new(), Vec::new());
    p.blocks(&category, &mut presheaves, &mut maps)?;
    Ok(SiteDocument { category, coverage, presheaves, maps })
}

/// Parses further `presheaf`/`map` blocks over an existing document and
/// returns the maps they define.
pub fn parse_maps(text: &str, doc: &SiteDocument) -> Result<Vec<NamedMap>, DslError> {
    let caps = SizeCaps::current();
    let mut p = Parser { tokens: lex(text)?, pos: 0, caps: &caps };
    let mut presheaves = doc.presheaves.clone();
    let mut maps = Vec::new();
    p.blocks(&doc.category, &mut presheaves, &mut maps)?;
    Ok(maps)
}

fn quote(name: &str) -> String {
    if !name.is_empty() && name.chars().all(is_word) {
        name.to_string()
    } else {
        format!("\"{name}\"")
    }
}

/// Renders a document in the language, listing every composite explicitly.
pub fn emit(doc: &SiteDocument) -> String {
    let cat = &doc.category;
    let raw = cat.to_raw();
    let mut out = String::new();
    let q = |s: &str| quote(s);
    out.push_str("category {\n");
    let objects: Vec<String> = raw.objects.iter().map(|o| q(o)).collect();
    let _ = writeln!(out, "    objects: {};", objects.join(", "));
    if !raw.arrows.is_empty() {
        let arrows: Vec<String> =
            raw.arrows.iter().map(|(n, s, t)| format!("{}: {} -> {}", q(n), q(s), q(t))).collect();
        let _ = writeln!(out, "    arrows: {};", arrows.join(", "));
    }
    if !raw.compose.is_empty() {
        let compose: Vec<String> =
            raw.compose.iter().map(|(g, f, h)| format!("({} . {}) = {}", q(g), q(f), q(h))).collect();
        let _ = writeln!(out, "    compose: {};", compose.join(", "));
    }
    out.push_str("}\n");
    if let Some(entries) = &doc.coverage {
        out.push_str("coverage {\n");
        for e in entries {
            let sieves: Vec<String> = e
                .sieves
                .iter()
                .map(|s| {
                    let gens: Vec<String> = s.generators(cat).into_iter().map(|g| q(cat.arrow_name(g))).collect();
                    format!("[{}]", gens.join(", "))
                })
                .collect();
            let _ = writeln!(out, "    {}: {};", q(&e.object), sieves.join(", "));
        }
        out.push_str("}\n");
    }
    for p in &doc.presheaves {
        let x = &p.presheaf;
        let _ = writeln!(out, "presheaf {} {{", q(&p.name));
        for c in cat.objects() {
            let elems: Vec<String> = x.names(c).iter().map(|e| q(e)).collect();
            let _ = writeln!(out, "    {}: [{}];", q(cat.object_name(c)), elems.join(", "));
        }
        for f in cat.non_identities() {
            let b = cat.target(f);
            let pairs: Vec<String> = (0..x.size(b))
                .map(|e| format!("{} -> {}", q(x.element_name(b, e)), q(x.element_name(cat.source(f), x.act(f, e)))))
                .collect();
            let _ = writeln!(out, "    {}: {{ {} }};", q(cat.arrow_name(f)), pairs.join(", "));
        }
        out.push_str("}\n");
    }
    for m in &doc.maps {
        let (s, t) = (m.map.source(), m.map.target());
        let _ = writeln!(out, "map {}: {} -> {} {{", q(&m.name), q(&m.source), q(&m.target));
        for c in cat.objects() {
            let pairs: Vec<String> = (0..s.size(c))
                .map(|e| format!("{} -> {}", q(s.element_name(c, e)), q(t.element_name(c, m.map.apply(c, e)))))
                .collect();
            let _ = writeln!(out, "    {}: {{ {} }};", q(cat.object_name(c)), pairs.join(", "));
        }
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTERVAL: &str = "category { objects: a, b; arrows: f: a -> b; }\ncoverage { b: [f]; }\n";

    #[test]
    fn lexes_comments_and_quotes() {
        let toks = lex("# note\n\"g.f\" // tail\n->").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("g.f".into()));
        assert_eq!(toks[0].span, Span { line: 2, col: 1 });
        assert_eq!(toks[1].tok, Tok::Sym("->"));
    }

    #[test]
    fn parses_interval_with_coverage() {
        let doc = parse(INTERVAL, ParseOptions::default()).unwrap();
        assert_eq!(doc.category.object_count(), 2);
        let om = Omega::new(doc.category.clone()).unwrap();
        let g = doc.topology(&om, false).unwrap();
        assert_eq!(g.cover_count(), 3);
        assert!(matches!(doc.topology(&om, true), Err(DslError::Validation(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("category {\n  objects a;\n}", ParseOptions::default()).unwrap_err();
        assert_eq!(err, DslError::Syntax { line: 2, col: 11, message: "expected `:`, found `a`".into() });
    }
}
