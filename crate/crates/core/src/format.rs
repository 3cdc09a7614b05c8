//! Text formats for set files and sequence files.
//!
//! Set file: one nonnegative integer per line in any order, optionally preceded by
//! `#horizon <N>`. Without the directive the horizon is `max + 1`.
//!
//! Sequence file: optional `#alphabet <k>` header, then the symbols as a run of
//! digits or as comma-separated integers.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::symbolic::SymbolicWord;
use crate::window::WindowSet;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn directive<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    line.strip_prefix('#')
        .map(str::trim_start)
        .and_then(|rest| rest.strip_prefix(name))
        .map(str::trim)
}

pub fn parse_set(text: &str) -> Result<WindowSet> {
    let mut horizon: Option<u64> = None;
    let mut elements = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(arg) = directive(line, "horizon") {
            if idx != 0 || horizon.is_some() {
                return Err(parse_error(line_no, "#horizon must be the first line"));
            }
            horizon = Some(
                arg.parse()
                    .map_err(|_| parse_error(line_no, format!("bad horizon `{arg}`")))?,
            );
            continue;
        }
        let v: u64 = line
            .parse()
            .map_err(|_| parse_error(line_no, format!("expected a nonnegative integer, found `{line}`")))?;
        if let Some(h) = horizon {
            if v >= h {
                return Err(parse_error(line_no, format!("element {v} is not below horizon {h}")));
            }
        }
        elements.push(v);
    }
    match horizon {
        Some(h) => WindowSet::new(elements, h),
        None => Ok(WindowSet::from_elements(elements)),
    }
}

/// Writes the set with an explicit horizon directive.
pub fn write_set(set: &WindowSet) -> String {
    let mut out = format!("#horizon {}\n", set.horizon());
    for v in set.iter() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn read_set(path: &Path) -> Result<WindowSet> {
    parse_set(&fs::read_to_string(path)?)
}

pub fn parse_sequence(text: &str) -> Result<SymbolicWord> {
    let mut alphabet: Option<u16> = None;
    let mut symbols = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(arg) = directive(line, "alphabet") {
            if alphabet.is_some() || !symbols.is_empty() {
                return Err(parse_error(line_no, "#alphabet must precede the symbols"));
            }
            let k: u16 = arg
                .parse()
                .map_err(|_| parse_error(line_no, format!("bad alphabet size `{arg}`")))?;
            if !(2..=256).contains(&k) {
                return Err(parse_error(line_no, "alphabet size must lie in 2..=256"));
            }
            alphabet = Some(k);
            continue;
        }
        if line.contains(',') {
            for part in line.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let v: u8 = part
                    .parse()
                    .map_err(|_| parse_error(line_no, format!("bad symbol `{part}`")))?;
                symbols.push(v);
            }
        } else {
            for c in line.chars() {
                let d = c
                    .to_digit(10)
                    .ok_or_else(|| parse_error(line_no, format!("bad symbol `{c}`")))?;
                symbols.push(d as u8);
            }
        }
    }
    if symbols.is_empty() {
        return Err(parse_error(text.lines().count().max(1), "no symbols"));
    }
    match alphabet {
        Some(k) => SymbolicWord::new(k, symbols),
        None => SymbolicWord::from_symbols(symbols),
    }
}

pub fn read_sequence(path: &Path) -> Result<SymbolicWord> {
    parse_sequence(&fs::read_to_string(path)?)
}

/// Writes `#alphabet k` and the symbols; digits when the alphabet allows.
/// Fails for words longer than `limit` symbols.
pub fn write_sequence(word: &SymbolicWord, limit: u64) -> Result<String> {
    let symbols = word.to_dense(limit)?;
    let mut out = format!("#alphabet {}\n", word.alphabet());
    if word.alphabet() <= 10 {
        out.extend(symbols.iter().map(|&s| char::from(b'0' + s)));
    } else {
        let parts: Vec<String> = symbols.iter().map(u8::to_string).collect();
        out.push_str(&parts.join(","));
    }
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_round_trip() {
        let s = parse_set("5\n1\n1\n\n3\n").unwrap();
        assert_eq!(s.to_vec(), vec![1, 3, 5]);
        assert_eq!(s.horizon(), 6);
        let t = parse_set(&write_set(&s.with_horizon(10))).unwrap();
        assert_eq!(t.horizon(), 10);
        assert_eq!(t.to_vec(), vec![1, 3, 5]);
        let e = parse_set("#horizon 7\n").unwrap();
        assert!(e.is_empty());
        assert_eq!(e.horizon(), 7);
    }

    #[test]
    fn set_errors_carry_line_numbers() {
        match parse_set("1\n2\nx\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_set("#horizon 3\n1\n4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_set("-1\n").is_err());
    }

    #[test]
    fn sequence_round_trip() {
        let w = parse_sequence("#alphabet 3\n0120\n").unwrap();
        assert_eq!(w.alphabet(), 3);
        assert_eq!(w.to_dense(10).unwrap(), vec![0, 1, 2, 0]);
        assert_eq!(write_sequence(&w, 10).unwrap(), "#alphabet 3\n0120\n");
        let w = parse_sequence("#alphabet 12\n0,11,3\n").unwrap();
        assert_eq!(write_sequence(&w, 10).unwrap(), "#alphabet 12\n0,11,3\n");
        assert_eq!(parse_sequence("0101").unwrap().alphabet(), 2);
        assert!(matches!(
            parse_sequence("#alphabet 2\n0121\n"),
            Err(Error::AlphabetMismatch { position: 2, .. })
        ));
        assert!(parse_sequence("01a\n").is_err());
        assert!(write_sequence(&w, 2).is_err());
    }
}
