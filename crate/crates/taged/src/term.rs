//! Ranked alphabets, first-order terms and positions.
//!
//! Terms are immutable and structurally shared, so cloning a term or reusing
//! it as a child of many larger terms is cheap. Every term caches its node
//! count and a structural hash at construction.
//!
//! The text form of a term contains no whitespace: constants are written
//! bare and applications use parentheses, e.g. `g(f(A,A),f(A,A),A)`. The
//! parser accepts optional whitespace between tokens.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::textfmt::is_identifier;

/// A function symbol: a name plus a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    /// Create a symbol. The name must be a plain identifier
    /// (`[A-Za-z0-9_]+`).
    pub fn new(name: &str, arity: usize) -> Symbol {
        assert!(is_identifier(name), "invalid symbol name {name:?}");
        Symbol {
            name: Arc::from(name),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_constant(&self) -> bool {
        self.arity == 0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A finite set of symbols with unique names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedAlphabet {
    symbols: BTreeMap<String, Symbol>,
}

impl RankedAlphabet {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Result<RankedAlphabet> {
        let mut map = BTreeMap::new();
        for sym in symbols {
            if let Some(prev) = map.insert(sym.name().to_string(), sym.clone()) {
                if prev != sym {
                    return Err(Error::malformed(
                        "alphabet",
                        format!("symbol {} declared with two arities", sym.name()),
                    ));
                }
            }
        }
        Ok(RankedAlphabet { symbols: map })
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        self.get(sym.name()) == Some(sym)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols in name order.
    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    /// Union of two alphabets. Fails if a name is shared with different
    /// arities.
    pub fn union(&self, other: &RankedAlphabet) -> Result<RankedAlphabet> {
        RankedAlphabet::new(self.symbols().chain(other.symbols()).cloned())
    }

    /// Check that every symbol of `term` is declared here.
    pub fn admits(&self, term: &Term) -> bool {
        self.contains(term.symbol()) && term.children().iter().all(|c| self.admits(c))
    }
}

/// A path from the root of a term to one of its nodes: the sequence of
/// 1-based child indices to follow. The root is the empty path.
///
/// Positions order lexicographically, which visits a term in depth-first,
/// left-to-right order. Their text form is dot separated (`1.2`), with `e`
/// for the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position(Vec<u32>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn from_indices(indices: impl Into<Vec<u32>>) -> Position {
        let indices = indices.into();
        assert!(indices.iter().all(|&i| i >= 1), "positions are 1-based");
        Position(indices)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    /// The position of the `i`-th child (1-based) below `self`.
    pub fn child(&self, i: u32) -> Position {
        assert!(i >= 1, "positions are 1-based");
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Is `self` a prefix of `other` (including equality)?
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "e")
        } else {
            let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Position> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Position::root());
        }
        let mut indices = Vec::new();
        for part in s.split('.') {
            let i: u32 = part
                .parse()
                .map_err(|_| Error::parse(0, format!("bad position component {part:?}")))?;
            if i == 0 {
                return Err(Error::parse(0, "position components are 1-based".to_string()));
            }
            indices.push(i);
        }
        Ok(Position(indices))
    }
}

#[derive(Debug)]
struct TermNode {
    symbol: Symbol,
    children: Vec<Term>,
    size: usize,
    hash: u64,
}

/// An immutable first-order term. Internally reference counted; `clone` is
/// cheap and terms can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct Term(Arc<TermNode>);

impl Term {
    /// Build a term. The number of children must match the symbol's arity.
    pub fn new(symbol: Symbol, children: Vec<Term>) -> Term {
        assert_eq!(
            symbol.arity(),
            children.len(),
            "symbol {} applied to {} children",
            symbol,
            children.len()
        );
        let size = 1 + children.iter().map(|c| c.node_count()).sum::<usize>();
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        symbol.name().hash(&mut hasher);
        symbol.arity().hash(&mut hasher);
        for c in &children {
            c.0.hash.hash(&mut hasher);
        }
        Term(Arc::new(TermNode {
            symbol,
            children,
            size,
            hash: hasher.finish(),
        }))
    }

    pub fn constant(symbol: Symbol) -> Term {
        Term::new(symbol, Vec::new())
    }

    pub fn symbol(&self) -> &Symbol {
        &self.0.symbol
    }

    pub fn children(&self) -> &[Term] {
        &self.0.children
    }

    /// Total number of nodes, leaves included.
    pub fn node_count(&self) -> usize {
        self.0.size
    }

    pub fn is_constant(&self) -> bool {
        self.0.children.is_empty()
    }

    /// All positions of the term in depth-first, left-to-right order (which
    /// coincides with the lexicographic order on positions).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::with_capacity(self.node_count());
        fn walk(t: &Term, here: &Position, out: &mut Vec<Position>) {
            out.push(here.clone());
            for (i, c) in t.children().iter().enumerate() {
                walk(c, &here.child(i as u32 + 1), out);
            }
        }
        walk(self, &Position::root(), &mut out);
        out
    }

    /// The subterm rooted at `pos`.
    pub fn subterm_at(&self, pos: &Position) -> Result<&Term> {
        let mut here = self;
        for &i in pos.indices() {
            here = here
                .children()
                .get(i as usize - 1)
                .ok_or_else(|| Error::InvalidPosition {
                    position: pos.to_string(),
                    term: self.to_string(),
                })?;
        }
        Ok(here)
    }

    /// A copy of `self` with the subterm at `pos` replaced by `replacement`.
    /// Only the nodes along the path are rebuilt.
    pub fn replace_at(&self, pos: &Position, replacement: Term) -> Result<Term> {
        fn go(t: &Term, path: &[u32], replacement: Term) -> Option<Term> {
            match path.split_first() {
                None => Some(replacement),
                Some((&i, rest)) => {
                    let idx = i as usize - 1;
                    if idx >= t.children().len() {
                        return None;
                    }
                    let mut children = t.children().to_vec();
                    children[idx] = go(&children[idx], rest, replacement)?;
                    Some(Term::new(t.symbol().clone(), children))
                }
            }
        }
        go(self, pos.indices(), replacement).ok_or_else(|| Error::InvalidPosition {
            position: pos.to_string(),
            term: self.to_string(),
        })
    }

    /// Number of occurrences of the constant `s` among the leaves.
    pub fn count_leaves(&self, s: &Symbol) -> usize {
        assert!(s.is_constant(), "count_leaves takes a constant symbol");
        if self.is_constant() {
            usize::from(self.symbol() == s)
        } else {
            self.children().iter().map(|c| c.count_leaves(s)).sum()
        }
    }

    /// Parse the whitespace-tolerant text form.
    pub fn parse(text: &str) -> Result<Term> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0usize;
        let term = parse_term(&chars, &mut pos)?;
        skip_ws(&chars, &mut pos);
        if pos != chars.len() {
            return Err(Error::parse(
                0,
                format!("trailing input after term at offset {pos}"),
            ));
        }
        Ok(term)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.size != other.0.size || self.0.hash != other.0.hash {
            return false;
        }
        self.0.symbol == other.0.symbol && self.0.children == other.0.children
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical term order: root symbol name, then arity, then children
/// lexicographically.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.symbol()
            .name()
            .cmp(other.symbol().name())
            .then_with(|| self.symbol().arity().cmp(&other.symbol().arity()))
            .then_with(|| self.children().cmp(other.children()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol().name())?;
        if !self.is_constant() {
            write!(f, "(")?;
            for (i, c) in self.children().iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        Term::parse(s)
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_term(chars: &[char], pos: &mut usize) -> Result<Term> {
    skip_ws(chars, pos);
    let start = *pos;
    while *pos < chars.len() && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '_') {
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::parse(
            0,
            format!("expected a symbol at offset {start}"),
        ));
    }
    let name: String = chars[start..*pos].iter().collect();
    skip_ws(chars, pos);
    if *pos < chars.len() && chars[*pos] == '(' {
        *pos += 1;
        skip_ws(chars, pos);
        let mut children = Vec::new();
        if *pos < chars.len() && chars[*pos] == ')' {
            *pos += 1;
        } else {
            loop {
                children.push(parse_term(chars, pos)?);
                skip_ws(chars, pos);
                match chars.get(*pos) {
                    Some(',') => {
                        *pos += 1;
                    }
                    Some(')') => {
                        *pos += 1;
                        break;
                    }
                    _ => {
                        return Err(Error::parse(
                            0,
                            format!("expected `,` or `)` at offset {}", *pos),
                        ))
                    }
                }
            }
        }
        let arity = children.len();
        Ok(Term::new(Symbol::new(&name, arity), children))
    } else {
        Ok(Term::constant(Symbol::new(&name, 0)))
    }
}

/// The symbol name that stands for a vertex in comb terms.
pub fn vertex_symbol_name(vertex: &str) -> String {
    format!("A_{vertex}")
}

/// The alphabet comb terms live in: binary `h` plus one constant `A_v` per
/// vertex.
pub fn comb_alphabet<'a>(vertices: impl IntoIterator<Item = &'a str>) -> Result<RankedAlphabet> {
    let mut symbols = vec![Symbol::new("h", 2)];
    for v in vertices {
        if !is_identifier(v) {
            return Err(Error::UnknownVertex {
                vertex: v.to_string(),
            });
        }
        symbols.push(Symbol::new(&vertex_symbol_name(v), 0));
    }
    RankedAlphabet::new(symbols)
}

/// Encode a non-empty sequence of vertices as a right-nested comb:
/// `[w_k,...,w_1,w_0]` becomes `h(A_wk, h(..., h(A_w1, A_w0)...))`, and a
/// single vertex is the bare constant `A_w0`.
pub fn comb_encode<S: AsRef<str>>(entries: &[S], alphabet: &RankedAlphabet) -> Result<Term> {
    if entries.is_empty() {
        return Err(Error::Domain("cannot encode an empty sequence".to_string()));
    }
    let constant = |v: &str| -> Result<Term> {
        let name = vertex_symbol_name(v);
        match alphabet.get(&name) {
            Some(sym) if sym.is_constant() => Ok(Term::constant(sym.clone())),
            _ => Err(Error::UnknownVertex {
                vertex: v.to_string(),
            }),
        }
    };
    let h = alphabet
        .get("h")
        .filter(|s| s.arity() == 2)
        .cloned()
        .ok_or_else(|| Error::malformed("alphabet", "comb encoding needs h/2"))?;
    let mut term = constant(entries[entries.len() - 1].as_ref())?;
    for e in entries[..entries.len() - 1].iter().rev() {
        term = Term::new(h.clone(), vec![constant(e.as_ref())?, term]);
    }
    Ok(term)
}

/// Decode a comb back into its vertex sequence (outermost entry first).
/// Returns `None` if the term is not a comb.
pub fn comb_decode(term: &Term) -> Option<Vec<String>> {
    fn strip_vertex(t: &Term) -> Option<String> {
        if !t.is_constant() {
            return None;
        }
        t.symbol().name().strip_prefix("A_").map(str::to_string)
    }
    let mut entries = Vec::new();
    let mut here = term;
    loop {
        if here.symbol().name() == "h" && here.symbol().arity() == 2 {
            entries.push(strip_vertex(&here.children()[0])?);
            here = &here.children()[1];
        } else {
            entries.push(strip_vertex(here)?);
            return Some(entries);
        }
    }
}
