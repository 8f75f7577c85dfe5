//! Canonical bracket keys and the grading rules every evaluator shares.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// The spin parameter `r >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinContext {
    r: u32,
}

impl SpinContext {
    pub fn new(r: i64) -> Result<Self> {
        if !(2..=u32::MAX as i64).contains(&r) {
            return Err(Error::InvalidSpin(r));
        }
        Ok(SpinContext { r: r as u32 })
    }

    pub fn r(self) -> u32 {
        self.r
    }

    /// Checks `a` lies in `[0, r-1]`.
    pub fn grading(self, a: i64) -> Result<u32> {
        if a < 0 || a > self.r as i64 - 1 {
            return Err(Error::InvalidGrading { value: a, max: self.r - 1 });
        }
        Ok(a as u32)
    }

    pub fn gradings(self, a: &[i64]) -> Result<Vec<u32>> {
        a.iter().map(|&x| self.grading(x)).collect()
    }
}

fn sum(a: &[u32]) -> i64 {
    a.iter().map(|&x| x as i64).sum()
}

/// Genus determined by the grading: the `g >= 0` with
/// `(r+1)(2g-2+n) = sum(r d_i + a_i + 1)`, if one exists.
pub fn genus_of(r: u32, insertions: &[(u32, u32)]) -> Option<u32> {
    let r = r as i64;
    let n = insertions.len() as i64;
    let total: i64 = insertions
        .iter()
        .map(|&(d, a)| r * d as i64 + a as i64 + 1)
        .sum();
    if total % (r + 1) != 0 {
        return None;
    }
    let twice_g = total / (r + 1) + 2 - n;
    if twice_g < 0 || twice_g % 2 != 0 {
        return None;
    }
    Some((twice_g / 2) as u32)
}

/// Genus-0 dimension constraint `sum a_i = (n-2) r - 2`.
pub fn genus0_selection(r: u32, a: &[i64]) -> Result<bool> {
    let a = SpinContext::new(r as i64)?.gradings(a)?;
    Ok(genus0_selection_unchecked(r, &a))
}

pub(crate) fn genus0_selection_unchecked(r: u32, a: &[u32]) -> bool {
    sum(a) == (a.len() as i64 - 2) * r as i64 - 2
}

/// Genus-1 DR divisor constraint `sum a_i = (n-1) r`.
pub fn dr1_selection(r: u32, a: &[i64]) -> Result<bool> {
    let a = SpinContext::new(r as i64)?.gradings(a)?;
    Ok(dr1_selection_unchecked(r, &a))
}

pub(crate) fn dr1_selection_unchecked(r: u32, a: &[u32]) -> bool {
    sum(a) == (a.len() as i64 - 1) * r as i64
}

/// `r | 2g - 2 - sum a_i`.
pub fn spin_divisibility(r: u32, g: u32, a: &[u32]) -> bool {
    (2 * g as i64 - 2 - sum(a)).rem_euclid(r as i64) == 0
}

/// Witten's class vanishes as soon as one insertion is `r - 1`.
pub fn vanishing_by_axiom(r: u32, a: &[u32]) -> bool {
    a.iter().any(|&x| x + 1 == r)
}

fn join<T: fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Key of a genus-0 primary correlator `<a_1, ..., a_n>`; insertions sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genus0Bracket {
    r: u32,
    a: Vec<u32>,
}

impl Genus0Bracket {
    pub fn new(r: i64, a: &[i64]) -> Result<Self> {
        let ctx = SpinContext::new(r)?;
        if a.len() < 3 {
            return Err(Error::Structure(format!(
                "a genus-0 bracket needs at least 3 insertions, got {}",
                a.len()
            )));
        }
        let mut a = ctx.gradings(a)?;
        a.sort_unstable();
        Ok(Genus0Bracket { r: ctx.r(), a })
    }

    pub(crate) fn from_sorted(r: u32, a: Vec<u32>) -> Self {
        debug_assert!(a.windows(2).all(|w| w[0] <= w[1]));
        Genus0Bracket { r, a }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn selection(&self) -> bool {
        genus0_selection_unchecked(self.r, &self.a)
    }

    pub fn key(&self) -> String {
        format!("g0:r={}:a={}", self.r, join(&self.a))
    }
}

impl fmt::Display for Genus0Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Key of a genus-1 double ramification bracket: pairs `(k_i, a_i)` with
/// `sum k_i = 0` and at least one `k_i != 0`.
///
/// Canonical order is positive `k` descending, then zeros, then negative `k`
/// by increasing `|k|`, ties broken by ascending `a`. The global sign is chosen
/// so the positive side carries the lexicographically larger `|k|` profile
/// (sorted descending); exact ties fall back to the larger entry list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dr1Bracket {
    r: u32,
    entries: Vec<(i64, u32)>,
}

fn side_rank(k: i64) -> u8 {
    match k.signum() {
        1 => 0,
        0 => 1,
        _ => 2,
    }
}

fn sort_entries(entries: &mut [(i64, u32)]) {
    entries.sort_by(|x, y| {
        side_rank(x.0)
            .cmp(&side_rank(y.0))
            .then_with(|| {
                if x.0 > 0 {
                    y.0.cmp(&x.0)
                } else {
                    x.0.abs().cmp(&y.0.abs())
                }
            })
            .then(x.1.cmp(&y.1))
    });
}

fn profile(entries: &[(i64, u32)], positive: bool) -> Vec<i64> {
    let mut p: Vec<i64> = entries
        .iter()
        .filter(|e| if positive { e.0 > 0 } else { e.0 < 0 })
        .map(|e| e.0.abs())
        .collect();
    p.sort_unstable_by(|x, y| y.cmp(x));
    p
}

pub(crate) fn canonical_entries(mut entries: Vec<(i64, u32)>) -> Vec<(i64, u32)> {
    let mut flipped: Vec<(i64, u32)> = entries.iter().map(|&(k, a)| (-k, a)).collect();
    sort_entries(&mut entries);
    sort_entries(&mut flipped);
    let keep = (profile(&entries, true), &entries) >= (profile(&flipped, true), &flipped);
    if keep {
        entries
    } else {
        flipped
    }
}

impl Dr1Bracket {
    pub fn new(r: i64, k: &[i64], a: &[i64]) -> Result<Self> {
        let ctx = SpinContext::new(r)?;
        if k.len() != a.len() {
            return Err(Error::Structure(format!(
                "k has {} entries but a has {}",
                k.len(),
                a.len()
            )));
        }
        let a = ctx.gradings(a)?;
        Self::from_pairs(ctx.r(), k.iter().copied().zip(a).collect())
    }

    pub(crate) fn from_pairs(r: u32, entries: Vec<(i64, u32)>) -> Result<Self> {
        let total: i128 = entries.iter().map(|e| e.0 as i128).sum();
        if total != 0 {
            return Err(Error::Structure(format!("sum of k_i is {total}, expected 0")));
        }
        if entries.iter().all(|e| e.0 == 0) {
            return Err(Error::Structure("all k_i are zero".into()));
        }
        Ok(Dr1Bracket { r, entries: canonical_entries(entries) })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn entries(&self) -> &[(i64, u32)] {
        &self.entries
    }

    pub fn k(&self) -> Vec<i64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn a(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn n_plus(&self) -> usize {
        self.entries.iter().filter(|e| e.0 > 0).count()
    }

    pub fn n_zero(&self) -> usize {
        self.entries.iter().filter(|e| e.0 == 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.entries.iter().filter(|e| e.0 < 0).count()
    }

    pub fn abs_k_sum(&self) -> i64 {
        self.entries.iter().map(|e| e.0.abs()).sum()
    }

    pub fn k_square_sum(&self) -> i64 {
        self.entries.iter().map(|e| e.0 * e.0).sum()
    }

    pub fn selection(&self) -> bool {
        dr1_selection_unchecked(self.r, &self.a())
    }

    pub fn key(&self) -> String {
        format!(
            "dr1:r={}:k={}:a={}",
            self.r,
            join(self.entries.iter().map(|e| e.0)),
            join(self.entries.iter().map(|e| e.1))
        )
    }
}

impl fmt::Display for Dr1Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Either kind of key, as found in caches and CLI input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BracketKey {
    Genus0(Genus0Bracket),
    Dr1(Dr1Bracket),
}

impl BracketKey {
    pub fn key(&self) -> String {
        match self {
            BracketKey::Genus0(b) => b.key(),
            BracketKey::Dr1(b) => b.key(),
        }
    }
}

fn parse_list(s: &str) -> Option<Vec<i64>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// Parses a key string and canonicalizes it. The result's `key()` may differ
/// from the input when the input was not canonical.
pub fn parse_key(s: &str) -> Result<BracketKey> {
    let bad = || Error::MalformedKey(s.to_string());
    let mut parts = s.split(':');
    let kind = parts.next().ok_or_else(bad)?;
    let mut field = |name: &str| -> Result<&str> {
        parts
            .next()
            .and_then(|p| p.strip_prefix(name))
            .and_then(|p| p.strip_prefix('='))
            .ok_or_else(bad)
    };
    let r: i64 = field("r")?.parse().map_err(|_| bad())?;
    let key = match kind {
        "g0" => {
            let a = parse_list(field("a")?).ok_or_else(bad)?;
            BracketKey::Genus0(Genus0Bracket::new(r, &a)?)
        }
        "dr1" => {
            let k = parse_list(field("k")?).ok_or_else(bad)?;
            let a = parse_list(field("a")?).ok_or_else(bad)?;
            BracketKey::Dr1(Dr1Bracket::new(r, &k, &a)?)
        }
        _ => return Err(bad()),
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(key)
}

/// Parses a key and insists it is already canonical.
pub fn parse_canonical_key(s: &str) -> Result<BracketKey> {
    let key = parse_key(s)?;
    let canonical = key.key();
    if canonical != s {
        return Err(Error::NonCanonicalKey { given: s.to_string(), canonical });
    }
    Ok(key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    DimensionMismatchZero,
    VanishingAxiomZero,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::DimensionMismatchZero => "dimension-mismatch-zero",
            Status::VanishingAxiomZero => "vanishing-axiom-zero",
        })
    }
}

/// A value together with how it was obtained. A non-`Ok` status always
/// carries the value 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResult {
    #[serde(with = "crate::rational::wire")]
    pub value: Rational,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

impl EvalResult {
    pub fn ok(value: Rational) -> Self {
        EvalResult { value, status: Status::Ok, trace: Vec::new() }
    }

    pub fn zero(status: Status) -> Self {
        EvalResult { value: crate::rational::zero(), status, trace: Vec::new() }
    }

    pub fn with_trace(mut self, rule: impl Into<String>) -> Self {
        self.trace.push(rule.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_examples() {
        assert_eq!(genus_of(2, &[(1, 0)]), Some(1));
        assert_eq!(genus_of(5, &[(0, 1), (0, 1), (0, 1)]), Some(0));
        assert_eq!(genus_of(3, &[(0, 0), (0, 0), (0, 0)]), None);
    }

    #[test]
    fn selection_examples() {
        assert!(genus0_selection(5, &[1, 1, 3, 3]).unwrap());
        assert!(genus0_selection(4, &[0, 1, 1]).unwrap());
        assert!(!genus0_selection(4, &[0, 0, 1]).unwrap());
        assert!(!genus0_selection(3, &[2, 2, 2, 2, 2, 2]).unwrap());
        assert!(matches!(
            genus0_selection(3, &[3, 0, 0]),
            Err(Error::InvalidGrading { value: 3, max: 2 })
        ));

        assert!(dr1_selection(4, &[2, 2]).unwrap());
        assert!(dr1_selection(4, &[0]).unwrap());
        assert!(dr1_selection(6, &[4, 4, 4]).unwrap());
        assert!(dr1_selection(4, &[-1]).is_err());
    }

    #[test]
    fn divisibility_and_vanishing() {
        assert!(spin_divisibility(5, 0, &[1, 1, 3, 3]));
        assert!(spin_divisibility(3, 1, &[0, 0, 0]));
        assert!(!spin_divisibility(4, 0, &[1, 1, 1]));

        assert!(vanishing_by_axiom(3, &[2, 1, 0]));
        assert!(!vanishing_by_axiom(3, &[1, 1, 1]));
        assert!(vanishing_by_axiom(2, &[1, 1]));
    }

    #[test]
    fn keys() {
        let g = Genus0Bracket::new(5, &[3, 1, 3, 1]).unwrap();
        assert_eq!(g.key(), "g0:r=5:a=1,1,3,3");
        let d = Dr1Bracket::new(4, &[-2, 2], &[2, 2]).unwrap();
        assert_eq!(d.key(), "dr1:r=4:k=2,-2:a=2,2");
        let d = Dr1Bracket::new(6, &[2, 1, -3], &[4, 4, 4]).unwrap();
        assert_eq!(d.key(), "dr1:r=6:k=3,-1,-2:a=4,4,4");
        let d = Dr1Bracket::new(4, &[0, -1, 1], &[0, 3, 1]).unwrap();
        assert_eq!((d.n_plus(), d.n_zero(), d.n_minus()), (1, 1, 1));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(Dr1Bracket::new(4, &[1, 1], &[0, 0]), Err(Error::Structure(_))));
        assert!(matches!(Dr1Bracket::new(4, &[0, 0], &[0, 0]), Err(Error::Structure(_))));
        assert!(matches!(Dr1Bracket::new(4, &[1], &[0, 0]), Err(Error::Structure(_))));
        assert!(matches!(Genus0Bracket::new(1, &[0, 0, 0]), Err(Error::InvalidSpin(1))));
        assert!(matches!(Genus0Bracket::new(3, &[0, 1]), Err(Error::Structure(_))));
    }

    #[test]
    fn key_parsing() {
        let k = parse_key("dr1:r=6:k=2,1,-3:a=4,4,4").unwrap();
        assert_eq!(k.key(), "dr1:r=6:k=3,-1,-2:a=4,4,4");
        assert!(matches!(
            parse_canonical_key("dr1:r=6:k=2,1,-3:a=4,4,4"),
            Err(Error::NonCanonicalKey { .. })
        ));
        assert!(parse_canonical_key("g0:r=5:a=1,1,3,3").is_ok());
        assert!(parse_key("g0:r=5").is_err());
        assert!(parse_key("g1:r=5:a=1,1,1").is_err());
        assert!(parse_key("g0:r=5:a=1,1,3,3:x").is_err());
    }
}
