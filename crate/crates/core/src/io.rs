//! Text formats: problem files, basis listings and certificates.
//!
//! Problem files are line oriented:
//!
//! ```text
//! # comment
//! vars x y
//! order deglex          # or: order blocks 1 2
//! char 0                # or a prime below 2^31
//! poly x*y*x - x*y
//! ```
//!
//! Polynomials print in the same expression syntax, terms in descending
//! order. Certificates print one line per basis element as
//! `g<i> := c * left * f<j> * right + ...`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arena::{Arena, PolyId};
use crate::error::{Error, Result};
use crate::field::{format_ratio, is_prime_u32, Field};
use crate::order::{MonomialOrder, Var};
use crate::proof::{CertTerm, Certificate, Source};

/// A polynomial as written, before its coefficients are mapped into a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPoly {
    pub line: usize,
    pub terms: Vec<(BigRational, Vec<Var>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub vars: Vec<String>,
    pub order: MonomialOrder,
    /// 0 for the rationals.
    pub characteristic: u32,
    pub polys: Vec<ParsedPoly>,
}

impl ProblemFile {
    /// Maps the coefficients into `field` and interns the polynomials.
    /// Terms vanishing in the field are dropped.
    pub fn intern<F: Field>(&self, field: &F, arena: &mut Arena<F::Elem>) -> Result<Vec<PolyId>> {
        self.polys
            .iter()
            .map(|p| intern_terms(field, arena, p))
            .collect()
    }
}

fn intern_terms<F: Field>(field: &F, arena: &mut Arena<F::Elem>, p: &ParsedPoly) -> Result<PolyId> {
    let mut terms = Vec::with_capacity(p.terms.len());
    for (c, word) in &p.terms {
        let c = field
            .from_ratio(c.numer(), c.denom())
            .ok_or_else(|| Error::parse(p.line, format!("coefficient {c} is undefined in characteristic {}", field.characteristic())))?;
        if field.is_zero(&c) {
            continue;
        }
        let m = arena
            .intern_monomial(word)
            .map_err(|e| Error::parse(p.line, e.to_string()))?;
        terms.push((c, m));
    }
    if terms.is_empty() {
        return Err(Error::parse(
            p.line,
            format!("polynomial is zero in characteristic {}", field.characteristic()),
        ));
    }
    arena
        .intern_polynomial(&terms)
        .map_err(|e| Error::parse(p.line, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Star,
    Plus,
    Minus,
    Caret,
    Slash,
    Assign,
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    end = j + 1;
                    chars.next();
                }
                out.push(Token::Num(text[i..end].parse().unwrap()));
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if !(c.is_ascii_alphanumeric() || c == '_') {
                        break;
                    }
                    end = j + 1;
                    chars.next();
                }
                out.push(Token::Ident(text[i..end].to_string()));
            }
            ':' => {
                chars.next();
                match chars.next() {
                    Some((_, '=')) => out.push(Token::Assign),
                    _ => return Err(Error::parse(line, "expected ':='")),
                }
            }
            _ => {
                chars.next();
                out.push(match ch {
                    '*' => Token::Star,
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '^' => Token::Caret,
                    '/' => Token::Slash,
                    other => return Err(Error::parse(line, format!("unexpected character '{other}'"))),
                });
            }
        }
    }
    Ok(out)
}

const MAX_EXPONENT: usize = 1 << 16;

/// Names that certificates use for inputs and basis elements.
fn is_reserved(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('f' | 'g'))
        && !chars.as_str().is_empty()
        && chars.all(|c| c.is_ascii_digit())
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    vars: &'a [String],
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.tokens.get(self.pos + k)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, msg)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        match self.next() {
            Some(t) if *t == want => Ok(()),
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn positive_int(&mut self, what: &str) -> Result<BigInt> {
        match self.next() {
            Some(Token::Num(n)) if n.is_positive() => Ok(n.clone()),
            _ => Err(self.error(format!("expected a positive integer {what}"))),
        }
    }

    /// `integer ['/' positive-integer]`
    fn coefficient(&mut self) -> Result<(BigRational, bool)> {
        let Some(Token::Num(n)) = self.next() else {
            return Err(self.error("malformed coefficient"));
        };
        let n = n.clone();
        if self.peek() == Some(&Token::Slash) {
            self.next();
            let d = self.positive_int("as denominator")?;
            return Ok((BigRational::new(n, d), true));
        }
        Ok((BigRational::from_integer(n), false))
    }

    /// `var ['^' positive-int]` or the literal `1`.
    fn factor(&mut self, word: &mut Vec<Var>) -> Result<()> {
        match self.next().cloned() {
            Some(Token::Num(n)) if n.is_one() => Ok(()),
            Some(Token::Ident(name)) => {
                let var = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| self.error(format!("unknown variable '{name}'")))?
                    as Var
                    + 1;
                let mut exp = 1usize;
                if self.peek() == Some(&Token::Caret) {
                    self.next();
                    let e = self.positive_int("exponent")?;
                    exp = usize::try_from(e)
                        .ok()
                        .filter(|&e| e <= MAX_EXPONENT)
                        .ok_or_else(|| self.error("exponent too large"))?;
                }
                word.extend(std::iter::repeat(var).take(exp));
                Ok(())
            }
            _ => Err(self.error("expected a variable or 1")),
        }
    }

    fn is_factor_start(&self, k: usize) -> bool {
        match self.peek_at(k) {
            Some(Token::Ident(name)) => !is_reserved(name) || self.vars.contains(name),
            Some(Token::Num(n)) => n.is_one(),
            _ => false,
        }
    }

    /// `factor ('*' factor)*`, stopping before a `*` not followed by a factor.
    fn word(&mut self) -> Result<Vec<Var>> {
        let mut word = Vec::new();
        self.factor(&mut word)?;
        while self.peek() == Some(&Token::Star) && self.is_factor_start(1) {
            self.next();
            self.factor(&mut word)?;
        }
        Ok(word)
    }

    /// `[coeff '*'] factor ('*' factor)*` or a bare coefficient.
    fn term(&mut self) -> Result<(BigRational, Vec<Var>, bool)> {
        if matches!(self.peek(), Some(Token::Num(_))) {
            let (c, frac) = self.coefficient()?;
            if self.peek() == Some(&Token::Star) {
                self.next();
                return Ok((c, self.word()?, frac));
            }
            return Ok((c, Vec::new(), frac));
        }
        Ok((BigRational::one(), self.word()?, false))
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some(Token::Plus) => {
                self.next();
                Some(false)
            }
            Some(Token::Minus) => {
                self.next();
                Some(true)
            }
            _ => None,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

/// Parses one expression. Returns the nonzero terms in input order and
/// whether any coefficient was written as a fraction.
fn parse_expr(cur: &mut Cursor) -> Result<(Vec<(BigRational, Vec<Var>)>, bool)> {
    let mut terms: Vec<(BigRational, Vec<Var>)> = Vec::new();
    let mut any_fraction = false;
    let mut negate = cur.sign().unwrap_or(false);
    loop {
        let (mut c, word, frac) = cur.term()?;
        any_fraction |= frac;
        if negate {
            c = -c;
        }
        if terms.iter().any(|(_, w)| *w == word) {
            return Err(cur.error("duplicate monomial in term list"));
        }
        terms.push((c, word));
        if cur.at_end() {
            break;
        }
        negate = cur
            .sign()
            .ok_or_else(|| cur.error("expected '+' or '-' between terms"))?;
    }
    terms.retain(|(c, _)| !c.is_zero());
    Ok((terms, any_fraction))
}

/// Parses a polynomial expression over the given variables.
pub fn parse_polynomial(text: &str, vars: &[String], line: usize) -> Result<ParsedPoly> {
    let tokens = tokenize(text, line)?;
    if tokens.is_empty() {
        return Err(Error::parse(line, "empty polynomial"));
    }
    let mut cur = Cursor { tokens: &tokens, pos: 0, line, vars };
    let (terms, _) = parse_expr(&mut cur)?;
    Ok(ParsedPoly { line, terms })
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head).trim()
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let mut vars: Option<Vec<String>> = None;
    let mut order: Option<(usize, Vec<String>)> = None;
    let mut characteristic: Option<u32> = None;
    let mut raw_polys: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map_or((content, ""), |(k, r)| (k, r.trim()));
        match keyword {
            "vars" => {
                if vars.is_some() {
                    return Err(Error::parse(line, "variables declared twice"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.is_empty() {
                    return Err(Error::parse(line, "no variables declared"));
                }
                for (k, name) in names.iter().enumerate() {
                    if !valid_name(name) {
                        return Err(Error::parse(line, format!("invalid variable name '{name}'")));
                    }
                    if is_reserved(name) {
                        return Err(Error::parse(
                            line,
                            format!("variable name '{name}' is reserved for certificate references"),
                        ));
                    }
                    if names[..k].contains(name) {
                        return Err(Error::parse(line, format!("variable '{name}' declared twice")));
                    }
                }
                vars = Some(names);
            }
            "order" => {
                if order.is_some() {
                    return Err(Error::parse(line, "ordering declared twice"));
                }
                order = Some((line, rest.split_whitespace().map(str::to_string).collect()));
            }
            "char" => {
                if characteristic.is_some() {
                    return Err(Error::parse(line, "characteristic declared twice"));
                }
                let c: u64 = rest
                    .parse()
                    .map_err(|_| Error::parse(line, format!("malformed characteristic '{rest}'")))?;
                if c != 0 && (c >= 1 << 31 || !is_prime_u32(c as u32)) {
                    return Err(Error::parse(
                        line,
                        format!("characteristic {c} is neither 0 nor a prime below 2^31"),
                    ));
                }
                characteristic = Some(c as u32);
            }
            "poly" => raw_polys.push((line, rest.to_string())),
            other => return Err(Error::parse(line, format!("unknown directive '{other}'"))),
        }
    }
    let vars = vars.ok_or_else(|| Error::parse(0, "missing 'vars' declaration"))?;
    let order = match order {
        None => MonomialOrder::deglex(vars.len()),
        Some((line, words)) => parse_order(&words, vars.len(), line)?,
    };
    let characteristic = characteristic.unwrap_or(0);
    let mut polys = Vec::with_capacity(raw_polys.len());
    for (line, text) in raw_polys {
        let tokens = tokenize(&text, line)?;
        if tokens.is_empty() {
            return Err(Error::parse(line, "empty polynomial"));
        }
        let mut cur = Cursor { tokens: &tokens, pos: 0, line, vars: &vars };
        let (terms, fraction) = parse_expr(&mut cur)?;
        if fraction && characteristic != 0 {
            return Err(Error::parse(line, "fractions are only allowed in characteristic 0"));
        }
        if terms.is_empty() {
            return Err(Error::parse(line, "polynomial is zero"));
        }
        polys.push(ParsedPoly { line, terms });
    }
    Ok(ProblemFile {
        vars,
        order,
        characteristic,
        polys,
    })
}

fn parse_order(words: &[String], nvars: usize, line: usize) -> Result<MonomialOrder> {
    match words.first().map(String::as_str) {
        Some("deglex") if words.len() == 1 => Ok(MonomialOrder::deglex(nvars)),
        Some("blocks") => {
            let indices: Vec<u32> = words[1..]
                .iter()
                .map(|w| {
                    w.parse::<u32>()
                        .map_err(|_| Error::parse(line, format!("block index '{w}' is not a positive integer")))
                })
                .collect::<Result<_>>()?;
            if indices.len() != nvars {
                return Err(Error::parse(
                    line,
                    format!("{} block indices for {nvars} variables", indices.len()),
                ));
            }
            MonomialOrder::blocks(&indices).map_err(|e| Error::parse(line, e.to_string()))
        }
        _ => Err(Error::parse(line, format!("unknown ordering '{}'", words.join(" ")))),
    }
}

/// Writes a problem file that parses back to `problem`.
pub fn format_problem(problem: &ProblemFile) -> String {
    let mut out = format!("vars {}\n", problem.vars.join(" "));
    if problem.order.is_deglex() {
        out.push_str("order deglex\n");
    } else {
        let idx: Vec<String> = (1..=problem.vars.len() as Var)
            .map(|v| problem.order.block_index(v).to_string())
            .collect();
        let _ = writeln!(out, "order blocks {}", idx.join(" "));
    }
    let _ = writeln!(out, "char {}", problem.characteristic);
    for p in &problem.polys {
        let _ = writeln!(out, "poly {}", format_terms(&p.terms, &problem.vars));
    }
    out
}

/// Word in expression syntax; runs of one letter print as powers.
pub fn format_word(word: &[Var], vars: &[String]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let mut j = i;
        while j < word.len() && word[j] == word[i] {
            j += 1;
        }
        let name = &vars[word[i] as usize - 1];
        parts.push(if j - i == 1 {
            name.clone()
        } else {
            format!("{name}^{}", j - i)
        });
        i = j;
    }
    parts.join("*")
}

/// Expression syntax for terms already in the desired order.
pub fn format_terms(terms: &[(BigRational, Vec<Var>)], vars: &[String]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (c, word)) in terms.iter().enumerate() {
        let negative = c.is_negative();
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = c.abs();
        if word.is_empty() {
            out.push_str(&format_ratio(&abs));
        } else if abs.is_one() {
            out.push_str(&format_word(word, vars));
        } else {
            let _ = write!(out, "{}*{}", format_ratio(&abs), format_word(word, vars));
        }
    }
    out
}

/// Prints an interned polynomial. Coefficients in `Z_p` use the symmetric
/// representative.
pub fn format_polynomial<F: Field>(field: &F, arena: &Arena<F::Elem>, f: PolyId, vars: &[String]) -> String {
    let terms: Vec<(BigRational, Vec<Var>)> = arena
        .terms(f)
        .map(|(c, m)| (field.to_ratio(c), arena.word(m).to_vec()))
        .collect();
    format_terms(&terms, vars)
}

fn source_name(source: Source) -> String {
    match source {
        Source::Input(j) => format!("f{}", j + 1),
        Source::Basis(k) => format!("g{}", k + 1),
    }
}

pub fn format_certificate<F: Field>(
    field: &F,
    arena: &Arena<F::Elem>,
    cert: &Certificate<F::Elem>,
    vars: &[String],
) -> String {
    let mut out = format!("g{} :=", cert.target + 1);
    if cert.terms.is_empty() {
        out.push_str(" 0");
        return out;
    }
    for (k, t) in cert.terms.iter().enumerate() {
        let c = field.to_ratio(&t.coeff);
        let sign = match (k, c.is_negative()) {
            (0, true) => " -",
            (0, false) => " ",
            (_, true) => " - ",
            (_, false) => " + ",
        };
        let _ = write!(
            out,
            "{sign}{} * {} * {} * {}",
            format_ratio(&c.abs()),
            format_word(arena.word(t.left), vars),
            source_name(t.source),
            format_word(arena.word(t.right), vars),
        );
    }
    out
}

fn parse_source(cur: &mut Cursor) -> Result<Source> {
    let name = match cur.next() {
        Some(Token::Ident(name)) if is_reserved(name) => name.clone(),
        _ => return Err(cur.error("expected f<j> or g<k>")),
    };
    let index: usize = name[1..]
        .parse()
        .ok()
        .filter(|&i| i >= 1)
        .ok_or_else(|| cur.error(format!("bad reference '{name}'")))?;
    Ok(if name.starts_with('f') {
        Source::Input(index - 1)
    } else {
        Source::Basis(index - 1)
    })
}

/// Parses one certificate line.
pub fn parse_certificate<F: Field>(
    field: &F,
    arena: &mut Arena<F::Elem>,
    text: &str,
    vars: &[String],
    line: usize,
) -> Result<Certificate<F::Elem>> {
    let tokens = tokenize(text, line)?;
    let mut cur = Cursor { tokens: &tokens, pos: 0, line, vars };
    let Source::Basis(target) = parse_source(&mut cur)? else {
        return Err(cur.error("certificate target must be g<i>"));
    };
    cur.expect(Token::Assign, "':='")?;
    let mut terms = Vec::new();
    if cur.peek() == Some(&Token::Num(BigInt::zero())) && cur.peek_at(1).is_none() {
        return Ok(Certificate { target, terms });
    }
    let mut negate = cur.sign().unwrap_or(false);
    loop {
        let (mut c, _) = cur.coefficient()?;
        if negate {
            c = -c;
        }
        cur.expect(Token::Star, "'*'")?;
        let left = cur.word()?;
        cur.expect(Token::Star, "'*'")?;
        let source = parse_source(&mut cur)?;
        cur.expect(Token::Star, "'*'")?;
        let right = cur.word()?;
        let coeff = field
            .from_ratio(c.numer(), c.denom())
            .ok_or_else(|| cur.error(format!("coefficient {c} is undefined in characteristic {}", field.characteristic())))?;
        terms.push(CertTerm {
            coeff,
            left: arena.intern_monomial(&left)?,
            source,
            right: arena.intern_monomial(&right)?,
        });
        if cur.at_end() {
            break;
        }
        negate = cur
            .sign()
            .ok_or_else(|| cur.error("expected '+' or '-' between terms"))?;
    }
    Ok(Certificate { target, terms })
}

/// Non-comment, non-blank lines with their 1-based line numbers.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty())
}

/// Reads a basis listing: one polynomial per line.
pub fn parse_basis<F: Field>(
    field: &F,
    arena: &mut Arena<F::Elem>,
    text: &str,
    vars: &[String],
) -> Result<Vec<PolyId>> {
    content_lines(text)
        .map(|(line, l)| {
            let p = parse_polynomial(l, vars, line)?;
            intern_terms(field, arena, &p)
        })
        .collect()
}
