//! Line-oriented text format for series.
//!
//! ```text
//! series N=2 cap=none legs=2
//! 1 0 : 1 2 | 2
//! -0.5 0 : | 1
//! ```
//!
//! Terms appear in canonical order, one per line; legs are separated by `|`.

use std::fmt::Write as _;

use super::coeff::Coeff;
use super::series::{Series, SeriesKey};
use super::word::Word;
use crate::error::{Error, Result};

pub fn to_text<K: SeriesKey, C: Coeff>(s: &Series<K, C>) -> String {
    let cap = s.cap().map_or("none".to_string(), |c| c.to_string());
    let mut out = format!("series N={} cap={} legs={}\n", s.alphabet(), cap, K::LEGS);
    for (k, c) in s.iter() {
        let (re, im) = c.to_text();
        let legs: Vec<String> = k
            .legs()
            .iter()
            .map(|w| w.letters().map(|l| l.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        let _ = writeln!(out, "{re} {im} : {}", legs.join(" | "));
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header_field<'a>(field: Option<&'a str>, key: &str) -> Result<&'a str> {
    field
        .and_then(|f| f.strip_prefix(key))
        .and_then(|f| f.strip_prefix('='))
        .ok_or_else(|| parse_err(1, format!("expected {key}=…")))
}

pub fn from_text<K: SeriesKey, C: Coeff>(text: &str) -> Result<Series<K, C>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("series") {
        return Err(parse_err(1, "missing `series` header"));
    }
    let alphabet: usize = header_field(fields.next(), "N")?
        .parse()
        .map_err(|_| parse_err(1, "bad alphabet size"))?;
    let cap = match header_field(fields.next(), "cap")? {
        "none" => None,
        c => Some(c.parse::<usize>().map_err(|_| parse_err(1, "bad cap"))?),
    };
    let legs: usize = header_field(fields.next(), "legs")?
        .parse()
        .map_err(|_| parse_err(1, "bad leg count"))?;
    if legs != K::LEGS {
        return Err(Error::ArityMismatch {
            left: K::LEGS,
            right: legs,
        });
    }
    let mut s = Series::<K, C>::zero(alphabet);
    if let Some(c) = cap {
        s = s.with_cap(c)?;
    }
    for (idx, line) in lines {
        let no = idx + 1;
        let (coeff, words) = line
            .split_once(':')
            .ok_or_else(|| parse_err(no, "missing `:`"))?;
        let mut parts = coeff.split_whitespace();
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(parse_err(no, "expected real and imaginary parts")),
        };
        let c = C::from_text(re, im).ok_or_else(|| parse_err(no, "bad coefficient"))?;
        let mut ws = Vec::with_capacity(K::LEGS);
        for leg in words.split('|') {
            let letters = leg
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| parse_err(no, "bad letter"))?;
            ws.push(Word::new(&letters, alphabet)?);
        }
        if ws.len() != K::LEGS {
            return Err(parse_err(no, format!("expected {} legs", K::LEGS)));
        }
        s.add_term(K::from_legs(ws), c)?;
    }
    Ok(s)
}
