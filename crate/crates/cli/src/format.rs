//! Reaction network files.
//!
//! ```text
//! # comment
//! species X, Y
//! r1: 5 X + Y -> X + 3 Y
//! r2: X + 3 Y -> 5 X + Y
//! kinetics r1: k1 * (X^2 Y + 1/2 X Y^2)
//! kinetics r2: powerlaw k2 [1, 0]
//! rate k1 = 1.5
//! ```
//!
//! Reactions without a `kinetics` line get mass-action kinetics with rate
//! symbol `k<label>`. Numbers are exact: `3`, `0.25` and `3/2` are rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crn_msa::kinetics::{PolyPLKinetics, PolyPLTerm, RateLabel};
use crn_msa::network::{Complex, ReactionSpec};
use crn_msa::{Network, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A parsed network file.
#[derive(Clone, Debug)]
pub struct NetworkFile {
    pub network: Network,
    pub kinetics: PolyPLKinetics,
    /// Numeric values of rate symbols, where given.
    pub rates: BTreeMap<String, f64>,
}

impl NetworkFile {
    /// Numeric rate constant per reaction; symbols without a value are 1.
    pub fn rate_values(&self) -> Vec<f64> {
        self.kinetics
            .rates()
            .iter()
            .map(|l| self.rates.get(&l.symbol).copied().unwrap_or(1.0) * crn_msa::linalg::to_f64(&l.factor))
            .collect()
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    /// Byte offset of `text` within the line.
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize, offset: usize) -> Self {
        Cursor {
            text,
            pos: 0,
            line,
            offset,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let column = self.text[..pos.min(self.text.len())].chars().count() + self.offset + 1;
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || *c == '\''))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Some(&rest[..end])
    }

    fn expect_ident(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.ident().ok_or_else(|| self.error(format!("expected {what}")))
    }

    fn starts_number(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.' || c == '-')
    }

    /// `[-]digits[.digits][/digits]`.
    fn number(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        let end = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || c == '/' || (c == '-' && i == 0)))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        parse_rational(&rest[..end]).ok_or_else(|| self.error_at(start, format!("invalid number `{}`", &rest[..end])))
    }
}

/// Parses `3`, `-0.25`, `3/2` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        return (!d.is_zero()).then(|| n / d);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    if body.is_empty() {
        return None;
    }
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let v = Rational::new(digits, scale);
    Some(if neg { -v } else { v })
}

/// (species name, value, column) triples.
type Named = Vec<(String, Rational, usize)>;

struct RawReaction {
    label: Option<String>,
    reactant: Named,
    product: Named,
    line: usize,
}

struct RawKinetics {
    label: String,
    rate: String,
    /// (coefficient, species powers, column) per term, or an order vector.
    body: KineticsBody,
    line: usize,
    column: usize,
}

enum KineticsBody {
    Terms(Vec<(Rational, Named)>),
    PowerLaw(Vec<Rational>),
}

pub fn parse_network(text: &str) -> Result<NetworkFile, ParseError> {
    let mut species: Vec<String> = Vec::new();
    let mut reactions: Vec<RawReaction> = Vec::new();
    let mut kinetics: Vec<RawKinetics> = Vec::new();
    let mut rates: BTreeMap<String, f64> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut c = Cursor::new(content, line, 0);
        c.skip_ws();
        let word_start = c.pos;
        let keyword = c.clone_ident();
        match keyword {
            Some("species") if !c.rest_after_ident_is(':') => {
                c.ident();
                loop {
                    let at = c.pos;
                    let name = c.expect_ident("species name")?;
                    if species.iter().any(|s| s == name) {
                        return Err(c.error_at(at, format!("duplicate species `{name}`")));
                    }
                    species.push(name.to_string());
                    if c.at_end() {
                        break;
                    }
                    c.eat(",");
                }
            }
            Some("rate") if !c.rest_after_ident_is(':') => {
                c.ident();
                let sym = c.expect_ident("rate symbol")?.to_string();
                c.expect("=")?;
                let at = c.pos;
                let v = c.number()?;
                if !v.is_positive() {
                    return Err(c.error_at(at, "rate constant must be positive"));
                }
                if !c.at_end() {
                    return Err(c.error("unexpected text after rate value"));
                }
                rates.insert(sym, crn_msa::linalg::to_f64(&v));
            }
            Some("kinetics") if !c.rest_after_ident_is(':') => {
                c.ident();
                let column = c.pos + 1;
                let label = c.expect_ident("reaction label")?.to_string();
                c.expect(":")?;
                let (rate, body) = parse_kinetics_body(&mut c)?;
                kinetics.push(RawKinetics {
                    label,
                    rate,
                    body,
                    line,
                    column,
                });
            }
            _ => {
                c.pos = word_start;
                reactions.push(parse_reaction(&mut c)?);
            }
        }
    }

    if reactions.is_empty() {
        return Err(ParseError {
            line: text.lines().count().max(1),
            column: 1,
            message: "no reactions".into(),
        });
    }

    let declared = !species.is_empty();
    let mut intern = |name: &str, line: usize, column: usize| -> Result<usize, ParseError> {
        if let Some(i) = species.iter().position(|s| s == name) {
            return Ok(i);
        }
        if declared {
            return Err(ParseError {
                line,
                column,
                message: format!("unknown species `{name}`"),
            });
        }
        species.push(name.to_string());
        Ok(species.len() - 1)
    };
    let mut specs = Vec::with_capacity(reactions.len());
    let mut complexes = Vec::with_capacity(reactions.len());
    for (j, r) in reactions.iter().enumerate() {
        let mut build = |side: &Named| -> Result<Vec<(usize, Rational)>, ParseError> {
            side.iter()
                .map(|(name, coeff, col)| Ok((intern(name, r.line, *col)?, coeff.clone())))
                .collect()
        };
        let a = build(&r.reactant)?;
        let b = build(&r.product)?;
        let label = r.label.clone().unwrap_or_else(|| format!("r{}", j + 1));
        complexes.push((label, a, b));
    }
    for (label, a, b) in complexes {
        specs.push(ReactionSpec::new(label, sum_complex(a), sum_complex(b)));
    }
    let network = Network::new(species.clone(), specs).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;

    let m = species.len();
    let mut terms: Vec<Option<(RateLabel, Vec<PolyPLTerm>)>> = vec![None; network.num_reactions()];
    for k in &kinetics {
        let err = |message: String| ParseError {
            line: k.line,
            column: k.column,
            message,
        };
        let j = network
            .reaction_index(&k.label)
            .ok_or_else(|| err(format!("unknown reaction `{}`", k.label)))?;
        if terms[j].is_some() {
            return Err(err(format!("second kinetics line for `{}`", k.label)));
        }
        let ts = match &k.body {
            KineticsBody::PowerLaw(orders) => {
                if orders.len() != m {
                    return Err(err(format!("order vector has {} entries, expected {m}", orders.len())));
                }
                vec![PolyPLTerm::new(Rational::one(), orders.clone())]
            }
            KineticsBody::Terms(list) => {
                let mut out = Vec::with_capacity(list.len());
                for (coeff, powers) in list {
                    let mut orders = vec![Rational::zero(); m];
                    for (name, e, col) in powers {
                        let s = species.iter().position(|x| x == name).ok_or_else(|| ParseError {
                            line: k.line,
                            column: *col,
                            message: format!("unknown species `{name}` in kinetics"),
                        })?;
                        orders[s] += e;
                    }
                    out.push(PolyPLTerm::new(coeff.clone(), orders));
                }
                out
            }
        };
        terms[j] = Some((RateLabel::symbol(k.rate.clone()), ts));
    }
    let (labels, terms): (Vec<RateLabel>, Vec<Vec<PolyPLTerm>>) = terms
        .into_iter()
        .enumerate()
        .map(|(j, t)| {
            t.unwrap_or_else(|| {
                let orders = network.reactant(j).to_dense(m);
                (
                    RateLabel::symbol(format!("k{}", network.reactions()[j].label)),
                    vec![PolyPLTerm::new(Rational::one(), orders)],
                )
            })
        })
        .unzip();
    let kinetics = PolyPLKinetics::new(&network, terms, labels).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;
    Ok(NetworkFile {
        network,
        kinetics,
        rates,
    })
}

fn sum_complex(parts: Vec<(usize, Rational)>) -> Complex {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (s, c) in parts {
        *acc.entry(s).or_insert_with(Rational::zero) += c;
    }
    Complex::from_pairs(acc)
}

impl<'a> Cursor<'a> {
    fn clone_ident(&mut self) -> Option<&'a str> {
        let save = self.pos;
        let id = self.ident();
        self.pos = save;
        id
    }

    /// Whether the identifier at the cursor is followed by `:` (a label).
    fn rest_after_ident_is(&mut self, ch: char) -> bool {
        let save = self.pos;
        self.ident();
        let hit = self.peek() == Some(ch);
        self.pos = save;
        hit
    }
}

fn parse_reaction(c: &mut Cursor<'_>) -> Result<RawReaction, ParseError> {
    let label = if c.rest_after_ident_is(':') {
        let l = c.ident().map(str::to_string);
        c.expect(":")?;
        l
    } else {
        None
    };
    let reactant = parse_side(c)?;
    c.expect("->")?;
    let product = parse_side(c)?;
    if !c.at_end() {
        return Err(c.error("unexpected text after reaction"));
    }
    Ok(RawReaction {
        label,
        reactant,
        product,
        line: c.line,
    })
}

fn parse_side(c: &mut Cursor<'_>) -> Result<Named, ParseError> {
    let mut out = Vec::new();
    if c.peek().is_none() || c.rest().starts_with("->") {
        return Err(c.error("empty reaction side; write `0` for the zero complex"));
    }
    loop {
        let at = c.pos;
        let coeff = if c.starts_number() {
            let v = c.number()?;
            if v.is_negative() {
                return Err(c.error_at(at, "negative stoichiometric coefficient"));
            }
            Some(v)
        } else {
            None
        };
        let name_at = c.pos;
        match c.ident() {
            Some(name) => {
                let coeff = coeff.unwrap_or_else(Rational::one);
                if !coeff.is_zero() {
                    out.push((name.to_string(), coeff, c.error_at(name_at, "").column));
                }
            }
            None if coeff.as_ref().is_some_and(Zero::is_zero) && out.is_empty() => {
                // the zero complex
                return Ok(out);
            }
            None => return Err(c.error("expected species name")),
        }
        if !c.eat("+") {
            return Ok(out);
        }
    }
}

fn parse_kinetics_body(c: &mut Cursor<'_>) -> Result<(String, KineticsBody), ParseError> {
    if c.clone_ident() == Some("powerlaw") {
        c.ident();
        let rate = c.expect_ident("rate symbol")?.to_string();
        c.expect("[")?;
        let mut orders = Vec::new();
        if !c.eat("]") {
            loop {
                orders.push(c.number()?);
                if c.eat("]") {
                    break;
                }
                c.expect(",")?;
            }
        }
        if !c.at_end() {
            return Err(c.error("unexpected text after order vector"));
        }
        return Ok((rate, KineticsBody::PowerLaw(orders)));
    }
    let rate = c.expect_ident("rate symbol")?.to_string();
    c.expect("*")?;
    let paren = c.eat("(");
    let mut terms = Vec::new();
    loop {
        terms.push(parse_term(c)?);
        if !c.eat("+") {
            break;
        }
    }
    if paren {
        c.expect(")")?;
    }
    if !c.at_end() {
        return Err(c.error("unexpected text after kinetics"));
    }
    Ok((rate, KineticsBody::Terms(terms)))
}

fn parse_term(c: &mut Cursor<'_>) -> Result<(Rational, Named), ParseError> {
    let at = c.pos;
    let coeff = if c.starts_number() { c.number()? } else { Rational::one() };
    if !coeff.is_positive() {
        return Err(c.error_at(at, "term coefficient must be positive"));
    }
    c.eat("*");
    let mut powers = Vec::new();
    loop {
        let name_at = c.pos;
        let Some(name) = c.ident() else { break };
        let column = c.error_at(name_at, "").column;
        let e = if c.eat("^") {
            if c.eat("(") {
                let e = c.number()?;
                c.expect(")")?;
                e
            } else {
                c.number()?
            }
        } else {
            Rational::one()
        };
        powers.push((name.to_string(), e, column));
        c.eat("*");
    }
    if powers.is_empty() && at == c.pos {
        return Err(c.error("expected a term"));
    }
    Ok((coeff, powers))
}

/// Normalized text of a network with its kinetics and rates.
pub fn print_network(file: &NetworkFile) -> String {
    let net = &file.network;
    let names = net.species_names();
    let mut out = String::new();
    out.push_str(&format!("species {}\n", names.join(", ")));
    for (j, r) in net.reactions().iter().enumerate() {
        out.push_str(&format!(
            "{}: {} -> {}\n",
            r.label,
            net.reactant(j).display(&names),
            net.product(j).display(&names)
        ));
    }
    for (j, r) in net.reactions().iter().enumerate() {
        let label = &file.kinetics.rates()[j];
        let terms: Vec<String> = file.kinetics.terms()[j]
            .iter()
            .map(|t| {
                let scaled = &t.coeff * &label.factor;
                print_term(&scaled, &t.orders, &names)
            })
            .collect();
        out.push_str(&format!("kinetics {}: {} * ({})\n", r.label, label.symbol, terms.join(" + ")));
    }
    for (sym, v) in &file.rates {
        out.push_str(&format!("rate {sym} = {v}\n"));
    }
    out
}

fn print_term(coeff: &Rational, orders: &[Rational], names: &[String]) -> String {
    let mut parts = Vec::new();
    if !coeff.is_one() {
        parts.push(coeff.to_string());
    }
    for (e, name) in orders.iter().zip(names) {
        if e.is_zero() {
            continue;
        }
        if e.is_one() {
            parts.push(name.clone());
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2"), Some(Rational::new(3.into(), 2.into())));
        assert_eq!(parse_rational("0.25"), Some(Rational::new(1.into(), 4.into())));
        assert_eq!(parse_rational("-2"), Some(Rational::from_integer((-2).into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(parse_rational("x"), None);
    }
}
