//! Plain-text file formats.
//!
//! Permutation family:
//!
//! ```text
//! n t
//! π(1) π(2) … π(n)      (t lines)
//! ```
//!
//! Distribution:
//!
//! ```text
//! n m
//! p/q v1 v2 … vn        (m lines)
//! ```
//!
//! Subset distributions and weight functions reuse the distribution layout
//! with a single mask integer in place of the permutation (`n m`, then
//! `p/q mask`). Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::dist::PermutationDistribution;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::perm::{Permutation, PermutationFamily};
use crate::rational::Rational;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_header(lines: &mut dyn Iterator<Item = (usize, &str)>) -> Result<(usize, usize, usize)> {
    let (lineno, line) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
    let nums: Vec<&str> = line.split_whitespace().collect();
    if nums.len() != 2 {
        return Err(Error::parse(lineno, "header must be `n count`"));
    }
    let n = nums[0]
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad n `{}`", nums[0])))?;
    let count = nums[1]
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad count `{}`", nums[1])))?;
    Ok((lineno, n, count))
}

fn parse_perm(lineno: usize, n: usize, tokens: &[&str]) -> Result<Permutation> {
    if tokens.len() != n {
        return Err(Error::parse(lineno, format!("expected {n} elements, found {}", tokens.len())));
    }
    let order = tokens
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad element `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    Permutation::new(order).map_err(|e| Error::parse(lineno, e.to_string()))
}

pub fn parse_family(text: &str) -> Result<PermutationFamily> {
    let mut lines = content_lines(text);
    let (hline, n, t) = parse_header(&mut lines)?;
    let mut members = Vec::with_capacity(t);
    for (lineno, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        members.push(parse_perm(lineno, n, &tokens)?);
    }
    if members.len() != t {
        return Err(Error::parse(hline, format!("header promises {t} permutations, found {}", members.len())));
    }
    PermutationFamily::new(n, members).map_err(|e| Error::parse(hline, e.to_string()))
}

pub fn write_family(family: &PermutationFamily) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", family.n(), family.t()).unwrap();
    for p in family.members() {
        writeln!(out, "{p}").unwrap();
    }
    out
}

pub fn parse_distribution(text: &str) -> Result<PermutationDistribution> {
    let mut lines = content_lines(text);
    let (hline, n, m) = parse_header(&mut lines)?;
    let mut support = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (first, rest) = tokens
            .split_first()
            .ok_or_else(|| Error::parse(lineno, "empty entry"))?;
        let pr: Rational = first.parse().map_err(|e| Error::parse(lineno, format!("{e}")))?;
        support.push((parse_perm(lineno, n, rest)?, pr));
    }
    if support.len() != m {
        return Err(Error::parse(hline, format!("header promises {m} entries, found {}", support.len())));
    }
    PermutationDistribution::new(n, support).map_err(|e| Error::parse(hline, e.to_string()))
}

pub fn write_distribution(dist: &PermutationDistribution) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", dist.n(), dist.len()).unwrap();
    for (p, pr) in dist.support() {
        writeln!(out, "{pr} {p}").unwrap();
    }
    out
}

/// Parses `n m` followed by `p/q mask` lines.
pub fn parse_mask_entries(text: &str) -> Result<(usize, Vec<(SubsetMask, Rational)>)> {
    let mut lines = content_lines(text);
    let (hline, n, m) = parse_header(&mut lines)?;
    let mut entries = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::parse(lineno, "expected `p/q mask`"));
        }
        let pr: Rational = tokens[0].parse().map_err(|e| Error::parse(lineno, format!("{e}")))?;
        let bits: u64 = tokens[1]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad mask `{}`", tokens[1])))?;
        let mask = SubsetMask::from_bits(n, bits).map_err(|e| Error::parse(lineno, e.to_string()))?;
        entries.push((mask, pr));
    }
    if entries.len() != m {
        return Err(Error::parse(hline, format!("header promises {m} entries, found {}", entries.len())));
    }
    Ok((n, entries))
}

pub fn write_mask_entries<'a>(n: usize, entries: impl ExactSizeIterator<Item = (&'a SubsetMask, &'a Rational)>) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", n, entries.len()).unwrap();
    for (mask, pr) in entries {
        writeln!(out, "{pr} {}", mask.bits()).unwrap();
    }
    out
}

/// Which of the two permutation layouts a file uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermutationFileKind {
    Family,
    Distribution,
}

/// Guesses the layout from the first data line: families carry `n` tokens per
/// line, distributions `n + 1`.
pub fn detect_kind(text: &str) -> Result<PermutationFileKind> {
    let mut lines = content_lines(text);
    let (_, n, _) = parse_header(&mut lines)?;
    match lines.next() {
        None => Err(Error::parse(1, "no entries after header")),
        Some((lineno, line)) => {
            let count = line.split_whitespace().count();
            if count == n {
                Ok(PermutationFileKind::Family)
            } else if count == n + 1 {
                Ok(PermutationFileKind::Distribution)
            } else {
                Err(Error::parse(lineno, format!("line has {count} tokens; expected {n} or {}", n + 1)))
            }
        }
    }
}
