//! Text format for networks: one rule per line, `<id> : <lit> ( ^ <lit> )*`
//! with `<lit>` either `x<id>` or `!x<id>`. `#` starts a comment. Ids 1..n
//! must each appear exactly once on the left.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::net::{AutomatonId, LocalRule, Network, SignedLiteral};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `<id> : <literals>`")]
    Shape { line: usize },
    #[error("line {line}: invalid automaton id {token:?}")]
    BadId { line: usize, token: String },
    #[error("line {line}: invalid literal {token:?} (expected x<id> or !x<id>)")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: rule for automaton {id} already defined")]
    DuplicateRule { line: usize, id: u32 },
    #[error("line {line}: automaton {src} appears more than once in the rule")]
    DuplicateSource { line: usize, src: u32 },
    #[error("line {line}: empty rule")]
    EmptyRule { line: usize },
    #[error("no rules found")]
    Empty,
    #[error("rule ids are not contiguous: missing automaton {missing} (ids go up to {max})")]
    Gap { missing: u32, max: u32 },
    #[error("line {line}: {inner}")]
    Net { line: usize, inner: crate::net::NetError },
}

pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let mut rules: BTreeMap<u32, (usize, Vec<SignedLiteral>)> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        let (lhs, rhs) = body.split_once(':').ok_or(ParseError::Shape { line })?;
        let id: u32 = lhs
            .trim()
            .parse()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| ParseError::BadId { line, token: lhs.trim().to_string() })?;
        if rules.contains_key(&id) {
            return Err(ParseError::DuplicateRule { line, id });
        }
        let mut lits = Vec::new();
        for tok in rhs.split('^') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(ParseError::BadLiteral { line, token: tok.to_string() });
            }
            let (negated, rest) = match tok.strip_prefix('!') {
                Some(rest) => (true, rest.trim_start()),
                None => (false, tok),
            };
            let src = rest
                .strip_prefix('x')
                .and_then(|s| s.parse::<u32>().ok())
                .filter(|&v| v >= 1)
                .ok_or_else(|| ParseError::BadLiteral { line, token: tok.to_string() })?;
            lits.push(SignedLiteral { source: AutomatonId(src), negated });
        }
        if lits.is_empty() {
            return Err(ParseError::EmptyRule { line });
        }
        lits.sort();
        for pair in lits.windows(2) {
            if pair[0].source == pair[1].source {
                return Err(ParseError::DuplicateSource { line, src: pair[0].source.0 });
            }
        }
        rules.insert(id, (line, lits));
    }
    if rules.is_empty() {
        return Err(ParseError::Empty);
    }
    let max = *rules.keys().last().unwrap();
    for id in 1..=max {
        if !rules.contains_key(&id) {
            return Err(ParseError::Gap { missing: id, max });
        }
    }
    let mut out = Vec::with_capacity(max as usize);
    let mut lines = Vec::with_capacity(max as usize);
    for (_, (line, lits)) in rules {
        out.push(LocalRule::new(lits).expect("checked above"));
        lines.push(line);
    }
    Network::new(out).map_err(|inner| {
        let line = match inner {
            crate::net::NetError::SourceOutOfRange { rule, .. } => lines[rule as usize - 1],
            _ => 0,
        };
        ParseError::Net { line, inner }
    })
}

/// Emit a network in the text format. `parse_network(emit_network(n)) == n`.
pub fn emit_network(net: &Network) -> String {
    let mut out = String::new();
    for i in net.automata() {
        out.push_str(&format!("{i} : "));
        let lits = net.rule(i).literals();
        for (k, lit) in lits.iter().enumerate() {
            if k > 0 {
                out.push_str(" ^ ");
            }
            if lit.negated {
                out.push('!');
            }
            out.push('x');
            out.push_str(&lit.source.to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_badc_12() {
        let net = parse_network("1 : x1 ^ x2\n2 : x1").unwrap();
        assert_eq!(net.size(), 2);
        assert_eq!(net.rule(AutomatonId(1)).literals().len(), 2);
    }

    #[test]
    fn rejects_duplicate_source() {
        let err = parse_network("1 : x1 ^ x1").unwrap_err();
        assert_eq!(err, ParseError::DuplicateSource { line: 1, src: 1 });
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# a comment\n1 : x2  # trailing\n\n2 : !x1\n";
        let net = parse_network(text).unwrap();
        assert_eq!(net.size(), 2);
        assert!(net.rule(AutomatonId(2)).parity());
    }

    #[test]
    fn rejects_gap_and_out_of_range() {
        assert!(matches!(parse_network("1 : x1\n3 : x1"), Err(ParseError::Gap { missing: 2, .. })));
        assert!(matches!(parse_network("1 : x2"), Err(ParseError::Net { .. })));
    }

    #[test]
    fn round_trip() {
        let text = "1 : x3 ^ !x4\n2 : x1\n3 : !x2\n4 : x1\n";
        let net = parse_network(text).unwrap();
        assert_eq!(parse_network(&emit_network(&net)).unwrap(), net);
    }
}
