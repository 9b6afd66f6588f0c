//! Degree sets (finite or cofinite subsets of the non-negative integers),
//! the (σ, ρ) pair they form, and the scalar parameters every solver
//! branches on.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graphio::Graph;
use crate::states::{Side, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    Finite,
    Cofinite,
}

/// A finite set, or a cofinite set stored by its (finite) complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeSet {
    kind: SetKind,
    members: Vec<usize>,
}

impl DegreeSet {
    pub fn finite<I: IntoIterator<Item = usize>>(elems: I) -> Self {
        let mut members: Vec<usize> = elems.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        DegreeSet { kind: SetKind::Finite, members }
    }

    /// The set of all non-negative integers except `missing`.
    pub fn cofinite<I: IntoIterator<Item = usize>>(missing: I) -> Self {
        let mut members: Vec<usize> = missing.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        DegreeSet { kind: SetKind::Cofinite, members }
    }

    pub fn at_least(k: usize) -> Self {
        Self::cofinite(0..k)
    }

    pub fn all() -> Self {
        Self::cofinite(std::iter::empty())
    }

    pub fn empty() -> Self {
        Self::finite(std::iter::empty())
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn is_finite(&self) -> bool {
        self.kind == SetKind::Finite
    }

    pub fn is_cofinite(&self) -> bool {
        self.kind == SetKind::Cofinite
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.members.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.is_cofinite() && self.members.is_empty()
    }

    /// Elements for a finite set, missing elements for a cofinite one.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, k: usize) -> bool {
        let hit = self.members.binary_search(&k).is_ok();
        match self.kind {
            SetKind::Finite => hit,
            SetKind::Cofinite => !hit,
        }
    }

    pub fn min(&self) -> Option<usize> {
        match self.kind {
            SetKind::Finite => self.members.first().copied(),
            SetKind::Cofinite => (0..).find(|k| !self.members.contains(k)),
        }
    }

    /// `max` for finite sets, `max(complement) + 1` for cofinite ones
    /// (0 when the complement is empty).
    pub fn top(&self) -> Result<usize> {
        match self.kind {
            SetKind::Finite => self.members.last().copied().ok_or(Error::EmptySet),
            SetKind::Cofinite => Ok(self.members.last().map_or(0, |m| m + 1)),
        }
    }

    /// `max` for finite sets, size of the complement for cofinite ones.
    pub fn cost(&self) -> Result<usize> {
        match self.kind {
            SetKind::Finite => self.members.last().copied().ok_or(Error::EmptySet),
            SetKind::Cofinite => Ok(self.members.len()),
        }
    }

    /// gcd of all differences to the minimum; 0 for singletons. Cofinite
    /// sets contain two consecutive integers and so always give 1.
    fn difference_gcd(&self) -> usize {
        match self.kind {
            SetKind::Cofinite => 1,
            SetKind::Finite => {
                let lo = self.members.first().copied().unwrap_or(0);
                self.members.iter().fold(0usize, |g, &x| g.gcd(&(x - lo)))
            }
        }
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            write!(f, "{{")?;
            for (i, m) in self.members.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{m}")?;
            }
            write!(f, "}}")
        };
        match self.kind {
            SetKind::Finite => list(f),
            SetKind::Cofinite if self.members.is_empty() => write!(f, "all"),
            SetKind::Cofinite if self.members.iter().enumerate().all(|(i, &m)| i == m) => {
                write!(f, ">={}", self.members.len())
            }
            SetKind::Cofinite => {
                write!(f, "co")?;
                list(f)
            }
        }
    }
}

fn parse_list(body: &str) -> Result<Vec<usize>> {
    let inner = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| Error::Parse(format!("expected braces around set, got `{body}`")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for tok in inner.split(',') {
        let v: usize = tok
            .parse()
            .map_err(|_| Error::Parse(format!("bad set element `{tok}`")))?;
        if out.contains(&v) {
            return Err(Error::Parse(format!("duplicate set element {v}")));
        }
        out.push(v);
    }
    Ok(out)
}

impl FromStr for DegreeSet {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "all" {
            Ok(DegreeSet::all())
        } else if let Some(k) = s.strip_prefix(">=") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad lower bound in `{text}`")))?;
            Ok(DegreeSet::at_least(k))
        } else if let Some(rest) = s.strip_prefix("co") {
            Ok(DegreeSet::cofinite(parse_list(rest)?))
        } else if s.starts_with('{') {
            Ok(DegreeSet::finite(parse_list(&s)?))
        } else {
            Err(Error::Parse(format!("unrecognized degree set `{text}`")))
        }
    }
}

/// Largest m for which a pair is m-structured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    Finite(usize),
    Infinite,
}

impl Structure {
    pub fn at_least(self, m: usize) -> bool {
        match self {
            Structure::Infinite => true,
            Structure::Finite(g) => g >= m,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Finite(g) => write!(f, "{g}"),
            Structure::Infinite => write!(f, "inf"),
        }
    }
}

pub fn max_structure(sigma: &DegreeSet, rho: &DegreeSet) -> Result<Structure> {
    if sigma.is_empty() || rho.is_empty() {
        return Err(Error::EmptySet);
    }
    match sigma.difference_gcd().gcd(&rho.difference_gcd()) {
        0 => Ok(Structure::Infinite),
        g => Ok(Structure::Finite(g)),
    }
}

/// A (σ, ρ) pair together with its derived parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemPair {
    pub sigma: DegreeSet,
    pub rho: DegreeSet,
    pub s_top: usize,
    pub r_top: usize,
    pub t_top: usize,
    pub s_min: usize,
    pub r_min: usize,
    pub m_max: Structure,
}

impl ProblemPair {
    pub fn new(sigma: DegreeSet, rho: DegreeSet) -> Result<Self> {
        if sigma.is_empty() || rho.is_empty() {
            return Err(Error::EmptySet);
        }
        let s_top = sigma.top()?;
        let r_top = rho.top()?;
        let m_max = max_structure(&sigma, &rho)?;
        Ok(ProblemPair {
            s_min: sigma.min().ok_or(Error::EmptySet)?,
            r_min: rho.min().ok_or(Error::EmptySet)?,
            sigma,
            rho,
            s_top,
            r_top,
            t_top: s_top.max(r_top),
            m_max,
        })
    }

    pub fn parse(sigma: &str, rho: &str) -> Result<Self> {
        Self::new(sigma.parse()?, rho.parse()?)
    }

    pub fn both_finite(&self) -> bool {
        self.sigma.is_finite() && self.rho.is_finite()
    }

    pub fn is_trivial(&self) -> bool {
        (self.rho.is_finite() && self.rho.members() == [0]) || (self.sigma.is_all() && self.rho.is_all())
    }

    pub fn base_constant(&self) -> Result<usize> {
        if self.is_trivial() {
            return Err(Error::TrivialPair);
        }
        Ok(match self.m_max {
            Structure::Finite(1) => self.s_top + self.r_top + 2,
            Structure::Finite(2) if self.s_top == self.r_top && self.s_top % 2 == 0 => self.t_top + 2,
            _ => self.t_top + 1,
        })
    }

    /// Number of residue classes the table-based solvers partition by.
    /// Singleton pairs are structured for every m; they use `t_top + 1`.
    pub fn residue_modulus(&self) -> usize {
        if !self.both_finite() {
            return 1;
        }
        match self.m_max {
            Structure::Finite(g) => g,
            Structure::Infinite => (self.t_top + 1).max(2),
        }
    }

    /// True when every language of a residue class may have `(t_top+2)^n`
    /// strings rather than `(t_top+1)^n`.
    pub fn has_wide_bound(&self, m: usize) -> bool {
        m == 2 && self.s_top == self.r_top && self.t_top % 2 == 0
    }

    /// Per-class language size bound at a bag of `len` positions.
    pub fn language_bound(&self, m: usize, len: usize) -> u128 {
        let base = if self.has_wide_bound(m) { self.t_top + 2 } else { self.t_top + 1 };
        (base as u128).saturating_pow(len as u32)
    }

    pub fn cost(&self) -> usize {
        // both sets are non-empty by construction
        self.sigma.cost().unwrap().max(self.rho.cost().unwrap())
    }

    pub fn top(&self, side: Side) -> usize {
        match side {
            Side::Sigma => self.s_top,
            Side::Rho => self.r_top,
        }
    }

    pub fn set(&self, side: Side) -> &DegreeSet {
        match side {
            Side::Sigma => &self.sigma,
            Side::Rho => &self.rho,
        }
    }
}

impl fmt::Display for ProblemPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.sigma, self.rho)
    }
}

pub fn inverse_state(a: State, pair: &ProblemPair) -> Result<State> {
    let top = pair.top(a.side);
    if a.count > top {
        return Err(Error::StateOutOfRange { index: a.count, top });
    }
    Ok(State { side: a.side, count: top - a.count })
}

/// Solutions of a trivial pair counted by size, in polynomial time.
pub fn trivial_size_counts(g: &Graph, pair: &ProblemPair) -> Result<Vec<BigUint>> {
    if !pair.is_trivial() {
        return Err(Error::NotApplicable(format!("{pair} is not trivial")));
    }
    let n = g.n();
    if pair.sigma.is_all() && pair.rho.is_all() {
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); row.len() + 1];
            for (k, c) in row.iter().enumerate() {
                next[k] += c;
                next[k + 1] += c;
            }
            row = next;
        }
        return Ok(row);
    }
    // ρ = {0}: a solution is a union of components in which every degree
    // lies in σ.
    let mut counts = vec![BigUint::zero(); n + 1];
    counts[0] = BigUint::one();
    for comp in g.components() {
        if comp.iter().all(|&v| pair.sigma.contains(g.degree(v))) {
            let size = comp.len();
            for k in (size..=n).rev() {
                let add = counts[k - size].clone();
                counts[k] += add;
            }
        }
    }
    Ok(counts)
}

pub fn trivial_count(g: &Graph, pair: &ProblemPair) -> Result<BigUint> {
    Ok(trivial_size_counts(g, pair)?.into_iter().sum())
}
