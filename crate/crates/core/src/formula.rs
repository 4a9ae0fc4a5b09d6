//! Hierarchical model specifications.
//!
//! Two notations are accepted:
//!
//! - formula notation, `freq ~ a*b + a*c + b*c`, where `*` crosses factors
//!   (all subsets) and `:` names a single interaction;
//! - generator notation, `[ab][bc][ac]` or `|ad|ae|bdh|`, where each group is
//!   a run of single-character factor names.
//!
//! Either way the result is closed under taking subsets, so `a:b` and `a*b`
//! describe the same model.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result};

/// A set of factor names; the empty term is the intercept.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term(Vec<String>);

impl Term {
    pub fn intercept() -> Self {
        Term(Vec::new())
    }

    pub fn new<I, S>(factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = factors.into_iter().map(Into::into).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::RepeatedFactor(w[0].clone()));
            }
        }
        Ok(Term(names))
    }

    /// Factor names, sorted.
    pub fn factors(&self) -> &[String] {
        &self.0
    }

    /// Number of factors; zero for the intercept.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_intercept(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset_of(&self, other: &Term) -> bool {
        self.0.iter().all(|f| other.0.contains(f))
    }

    pub fn contains(&self, factor: &str) -> bool {
        self.0.iter().any(|f| f == factor)
    }

    /// Every subset of this term, including the intercept and the term itself.
    pub fn subsets(&self) -> impl Iterator<Item = Term> + '_ {
        (0u64..(1u64 << self.0.len())).map(move |mask| {
            Term(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, f)| f.clone())
                    .collect(),
            )
        })
    }
}

/// Canonical order: by size, then lexicographically by the sorted names.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&self.0.join(":"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFormula {
    response: String,
    source: String,
    terms: Vec<Term>,
    generators: Vec<Term>,
}

impl ModelFormula {
    /// Builds the hierarchical closure of `generators`.
    pub fn from_generators<I>(response: impl Into<String>, generators: I) -> Self
    where
        I: IntoIterator<Item = Term>,
    {
        let response = response.into();
        let terms = closure(generators);
        let generators = maximal(&terms);
        let mut model = ModelFormula { response, source: String::new(), terms, generators };
        model.source = model.to_string();
        model
    }

    pub fn response(&self) -> &str {
        &self.response
    }

    /// The text this model was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// All terms in canonical order, intercept first.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Inclusion-maximal terms in canonical order.
    pub fn generators(&self) -> &[Term] {
        &self.generators
    }

    /// Every factor mentioned by the model, sorted.
    pub fn factor_names(&self) -> Vec<&str> {
        let set: BTreeSet<&str> =
            self.terms.iter().flat_map(|t| t.0.iter().map(String::as_str)).collect();
        set.into_iter().collect()
    }

    /// Generator notation, e.g. `[ab][ac][bc]`; multi-character names are
    /// separated with `:` inside a group so the output still parses
    /// unambiguously in formula notation via [`fmt::Display`].
    pub fn generator_string(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            out.push('[');
            let wide = g.0.iter().any(|f| f.chars().count() != 1);
            out.push_str(&g.0.join(if wide { ":" } else { "" }));
            out.push(']');
        }
        out
    }
}

/// Formula notation with one crossed product per generator.
impl fmt::Display for ModelFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ ", self.response)?;
        let gens: Vec<&Term> = self.generators.iter().filter(|g| !g.is_intercept()).collect();
        if gens.is_empty() {
            return f.write_str("1");
        }
        for (k, g) in gens.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            f.write_str(&g.0.join("*"))?;
        }
        Ok(())
    }
}

/// Subset closure of a collection of terms, in canonical order, always
/// including the intercept.
pub fn closure<I: IntoIterator<Item = Term>>(terms: I) -> Vec<Term> {
    let mut set = BTreeSet::new();
    set.insert(Term::intercept());
    for t in terms {
        set.extend(t.subsets());
    }
    set.into_iter().collect()
}

fn maximal(terms: &[Term]) -> Vec<Term> {
    terms
        .iter()
        .filter(|t| !terms.iter().any(|u| u.len() > t.len() && t.is_subset_of(u)))
        .cloned()
        .collect()
}

fn syntax(position: usize, message: &str) -> Error {
    Error::Syntax { position, message: message.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Name(&'a str),
    One,
    Tilde,
    Plus,
    Star,
    Colon,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok<'_>)>> {
    let is_name_char = |c: char| c.is_alphanumeric() || c == '_' || c == '.';
    let mut out = Vec::new();
    let mut iter = text.char_indices().peekable();
    while let Some((pos, c)) = iter.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '~' => Tok::Tilde,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            ':' => Tok::Colon,
            c if is_name_char(c) => {
                let mut end = pos + c.len_utf8();
                while let Some(&(p, c)) = iter.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    end = p + c.len_utf8();
                    iter.next();
                }
                let word = &text[pos..end];
                if word == "1" {
                    Tok::One
                } else if word.starts_with(|c: char| c.is_ascii_digit()) {
                    return Err(syntax(pos, "factor names cannot start with a digit"));
                } else {
                    Tok::Name(word)
                }
            }
            _ => return Err(syntax(pos, "unexpected character")),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

/// Parses `response ~ term + term + ...`.
pub fn parse_formula(text: &str) -> Result<ModelFormula> {
    let toks = tokenize(text)?;
    let end = text.len();
    let (response, rest) = match toks.as_slice() {
        [(_, Tok::Name(r)), (_, Tok::Tilde), rest @ ..] => (*r, rest),
        [(p, _), ..] => return Err(syntax(*p, "expected `<response> ~`")),
        [] => return Err(syntax(0, "empty formula")),
    };
    if rest.is_empty() {
        return Err(Error::EmptyModel);
    }

    let mut generators = Vec::new();
    for chunk in rest.split(|(_, t)| *t == Tok::Plus) {
        let Some(&(start, _)) = chunk.first() else {
            return Err(syntax(end, "empty term"));
        };
        if let [(_, Tok::One)] = chunk {
            generators.push(Term::intercept());
            continue;
        }
        let mut names = Vec::new();
        let mut joiner = None;
        for (k, &(pos, tok)) in chunk.iter().enumerate() {
            match (k % 2, tok) {
                (0, Tok::Name(n)) => names.push(n),
                (1, Tok::Star | Tok::Colon) => {
                    if joiner.is_some_and(|j| j != tok) {
                        return Err(syntax(pos, "cannot mix `*` and `:` in one term"));
                    }
                    joiner = Some(tok);
                }
                _ => return Err(syntax(pos, "unexpected token in term")),
            }
        }
        if chunk.len() % 2 == 0 {
            return Err(syntax(start, "term ends with an operator"));
        }
        // `a*b` crosses and `a:b` is a single interaction, but both close to
        // the same hierarchical set.
        generators.push(Term::new(names)?);
    }

    let mut model = ModelFormula::from_generators(response, generators);
    model.source = String::from(text.trim());
    Ok(model)
}

/// Parses bracket (`[ab][bc]`) or pipe (`|ab|bc|`) generator notation.
/// Each character of a group is one factor name. The response is `freq`.
pub fn parse_generators(text: &str) -> Result<ModelFormula> {
    let trimmed = text.trim();
    let offset = text.len() - text.trim_start().len();
    let mut groups: Vec<(usize, &str)> = Vec::new();
    match trimmed.chars().next() {
        Some('[') => {
            let mut rest = trimmed;
            let mut pos = offset;
            loop {
                let skipped = rest.len() - rest.trim_start().len();
                rest = rest.trim_start();
                pos += skipped;
                if rest.is_empty() {
                    break;
                }
                if !rest.starts_with('[') {
                    return Err(syntax(pos, "expected `[`"));
                }
                let close = rest.find(']').ok_or_else(|| syntax(pos, "unclosed `[`"))?;
                let body = &rest[1..close];
                if let Some(k) = body.find('[') {
                    return Err(syntax(pos + 1 + k, "nested `[`"));
                }
                groups.push((pos + 1, body));
                pos += close + 1;
                rest = &rest[close + 1..];
            }
        }
        Some('|') => {
            let inner = trimmed.strip_prefix('|').unwrap_or(trimmed);
            let inner = inner.strip_suffix('|').unwrap_or(inner);
            let mut pos = offset + 1;
            for body in inner.split('|') {
                groups.push((pos, body));
                pos += body.len() + 1;
            }
        }
        Some(_) => return Err(syntax(offset, "expected `[` or `|`")),
        None => return Err(Error::EmptyModel),
    }

    let mut generators = Vec::with_capacity(groups.len());
    for (pos, body) in groups {
        let body = body.trim();
        if body.is_empty() {
            return Err(syntax(pos, "empty group"));
        }
        let mut names = Vec::new();
        for (k, c) in body.char_indices() {
            if !c.is_alphanumeric() {
                return Err(syntax(pos + k, "factor names must be alphanumeric"));
            }
            names.push(c.to_string());
        }
        generators.push(Term::new(names)?);
    }

    let mut model = ModelFormula::from_generators("freq", generators);
    model.source = String::from(trimmed);
    Ok(model)
}
