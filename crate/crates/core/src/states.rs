//! States, state strings over an ordered bag, their vector decompositions,
//! and the combination operator on strings and languages.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::setspec::ProblemPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Rho,
    Sigma,
}

/// `σ_count` or `ρ_count`: selected or not, and how many selected neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub side: Side,
    pub count: usize,
}

impl State {
    pub fn sigma(count: usize) -> Self {
        State { side: Side::Sigma, count }
    }

    pub fn rho(count: usize) -> Self {
        State { side: Side::Rho, count }
    }

    pub fn is_sigma(self) -> bool {
        self.side == Side::Sigma
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Sigma => write!(f, "s{}", self.count),
            Side::Rho => write!(f, "r{}", self.count),
        }
    }
}

impl FromStr for State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (side, rest) = match s.split_at_checked(1) {
            Some(("s", rest)) => (Side::Sigma, rest),
            Some(("r", rest)) => (Side::Rho, rest),
            _ => return Err(Error::Parse(format!("bad state `{s}`"))),
        };
        let count = rest.parse().map_err(|_| Error::Parse(format!("bad state `{s}`")))?;
        Ok(State { side, count })
    }
}

/// One state per bag position; bags are sorted so positions are canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateString(pub Vec<State>);

impl StateString {
    pub fn empty() -> Self {
        StateString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.0
    }

    /// σ-vector packed as a bitmask (bit i set iff position i is a σ-state).
    pub fn sigma_mask(&self) -> u64 {
        debug_assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_sigma())
            .fold(0u64, |acc, (i, _)| acc | (1 << i))
    }

    pub fn weights(&self) -> Vec<usize> {
        self.0.iter().map(|a| a.count).collect()
    }

    /// Rebuilds a string from a σ-vector mask and a weight vector.
    pub fn from_parts(mask: u64, weights: &[usize]) -> Self {
        StateString(
            weights
                .iter()
                .enumerate()
                .map(|(i, &count)| State {
                    side: if mask >> i & 1 == 1 { Side::Sigma } else { Side::Rho },
                    count,
                })
                .collect(),
        )
    }

    pub fn without(&self, pos: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(pos);
        StateString(v)
    }
}

impl fmt::Display for StateString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "eps");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for StateString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "eps" {
            return Ok(StateString::empty());
        }
        s.split_whitespace().map(str::parse).collect::<Result<Vec<_>>>().map(StateString)
    }
}

/// σ-vector, weight vector and m-weight vector of a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorTriple {
    pub sig: Vec<u8>,
    pub wt: Vec<usize>,
    pub m_wt: Vec<usize>,
}

pub fn decompose(x: &StateString, m: usize) -> VectorTriple {
    assert!(m >= 1);
    VectorTriple {
        sig: x.0.iter().map(|a| a.is_sigma() as u8).collect(),
        wt: x.weights(),
        m_wt: x.0.iter().map(|a| a.count % m).collect(),
    }
}

/// `σ⃗(x)·d⃗_m(y) ≡ σ⃗(y)·d⃗_m(x) (mod m)`.
pub fn residue_related(x: &StateString, y: &StateString, m: usize) -> bool {
    let dot = |a: &StateString, b: &StateString| -> usize {
        a.0.iter().zip(&b.0).filter(|(p, _)| p.is_sigma()).map(|(_, q)| q.count % m).sum()
    };
    dot(x, y) % m == dot(y, x) % m
}

/// Which state indices exist, and whether a side saturates (clamps at its
/// top) instead of overflowing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub s_top: usize,
    pub r_top: usize,
    pub sigma_saturates: bool,
    pub rho_saturates: bool,
}

impl Alphabet {
    /// The restricted alphabet used by the table DP: cofinite sides clamp.
    pub fn for_pair(pair: &ProblemPair) -> Self {
        Alphabet {
            s_top: pair.s_top,
            r_top: pair.r_top,
            sigma_saturates: pair.sigma.is_cofinite(),
            rho_saturates: pair.rho.is_cofinite(),
        }
    }

    /// Plain `{σ_0..σ_sTop} ∪ {ρ_0..ρ_rTop}` where both sides overflow.
    pub fn bounded(s_top: usize, r_top: usize) -> Self {
        Alphabet { s_top, r_top, sigma_saturates: false, rho_saturates: false }
    }

    pub fn top(&self, side: Side) -> usize {
        match side {
            Side::Sigma => self.s_top,
            Side::Rho => self.r_top,
        }
    }

    pub fn saturates(&self, side: Side) -> bool {
        match side {
            Side::Sigma => self.sigma_saturates,
            Side::Rho => self.rho_saturates,
        }
    }

    /// Maps a raw count into the alphabet: clamps on saturating sides,
    /// `None` on overflow otherwise.
    pub fn fit(&self, side: Side, count: usize) -> Option<usize> {
        let top = self.top(side);
        if count <= top {
            Some(count)
        } else if self.saturates(side) {
            Some(top)
        } else {
            None
        }
    }

    pub fn is_saturated(&self, a: State) -> bool {
        self.saturates(a.side) && a.count == self.top(a.side)
    }

    pub fn contains(&self, a: State) -> bool {
        a.count <= self.top(a.side)
    }
}

/// `x ⊕ y`; `Ok(None)` stands for ⊥.
pub fn combine(x: &StateString, y: &StateString, alphabet: &Alphabet) -> Result<Option<StateString>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let mut out = Vec::with_capacity(x.len());
    for (a, b) in x.0.iter().zip(&y.0) {
        if a.side != b.side {
            return Ok(None);
        }
        match alphabet.fit(a.side, a.count + b.count) {
            Some(count) => out.push(State { side: a.side, count }),
            None => return Ok(None),
        }
    }
    Ok(Some(StateString(out)))
}

/// Per-string bookkeeping carried through the DP: nothing (decision),
/// witness counts by size (counting) or the best size (optimization).
pub trait Annotation: Clone + PartialEq + fmt::Debug + Send + Sync {
    /// Whether joins must preserve exact multiplicities, or only presence.
    const EXACT: bool;

    /// Annotation of the empty string at a leaf.
    fn unit() -> Self;
    /// Union of two ways of reaching the same string.
    fn merge(&mut self, other: &Self);
    /// One more selected vertex has been forgotten.
    fn shifted(&self) -> Self;
    /// Annotation of a joined pair.
    fn product(&self, other: &Self) -> Self;
    /// Multiplicities indexed by solution size.
    fn size_weights(&self) -> Vec<BigUint>;
    /// Inverse of `size_weights`; `None` when every weight is zero.
    fn from_size_weights(w: &[BigUint]) -> Option<Self>;
}

impl Annotation for () {
    const EXACT: bool = false;

    fn unit() -> Self {}
    fn merge(&mut self, _: &Self) {}
    fn shifted(&self) -> Self {}
    fn product(&self, _: &Self) -> Self {}

    fn size_weights(&self) -> Vec<BigUint> {
        vec![BigUint::one()]
    }

    fn from_size_weights(w: &[BigUint]) -> Option<Self> {
        w.iter().any(|c| !c.is_zero()).then_some(())
    }
}

/// Number of witnesses of each size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeCounts(pub Vec<BigUint>);

impl SizeCounts {
    pub fn total(&self) -> BigUint {
        self.0.iter().sum()
    }

    pub fn at(&self, k: usize) -> BigUint {
        self.0.get(k).cloned().unwrap_or_default()
    }

    fn trimmed(mut v: Vec<BigUint>) -> Self {
        while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        SizeCounts(v)
    }
}

impl Annotation for SizeCounts {
    const EXACT: bool = true;

    fn unit() -> Self {
        SizeCounts(vec![BigUint::one()])
    }

    fn merge(&mut self, other: &Self) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), BigUint::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    fn shifted(&self) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(BigUint::zero());
        v.extend(self.0.iter().cloned());
        SizeCounts(v)
    }

    fn product(&self, other: &Self) -> Self {
        let mut v = vec![BigUint::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        SizeCounts::trimmed(v)
    }

    fn size_weights(&self) -> Vec<BigUint> {
        self.0.clone()
    }

    fn from_size_weights(w: &[BigUint]) -> Option<Self> {
        w.iter().any(|c| !c.is_zero()).then(|| SizeCounts::trimmed(w.to_vec()))
    }
}

fn one_hot(k: usize) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); k + 1];
    v[k] = BigUint::one();
    v
}

/// Smallest witness size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinSize(pub usize);

/// Largest witness size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaxSize(pub usize);

impl Annotation for MinSize {
    const EXACT: bool = false;

    fn unit() -> Self {
        MinSize(0)
    }
    fn merge(&mut self, other: &Self) {
        self.0 = self.0.min(other.0);
    }
    fn shifted(&self) -> Self {
        MinSize(self.0 + 1)
    }
    fn product(&self, other: &Self) -> Self {
        MinSize(self.0 + other.0)
    }
    fn size_weights(&self) -> Vec<BigUint> {
        one_hot(self.0)
    }
    fn from_size_weights(w: &[BigUint]) -> Option<Self> {
        w.iter().position(|c| !c.is_zero()).map(MinSize)
    }
}

impl Annotation for MaxSize {
    const EXACT: bool = false;

    fn unit() -> Self {
        MaxSize(0)
    }
    fn merge(&mut self, other: &Self) {
        self.0 = self.0.max(other.0);
    }
    fn shifted(&self) -> Self {
        MaxSize(self.0 + 1)
    }
    fn product(&self, other: &Self) -> Self {
        MaxSize(self.0 + other.0)
    }
    fn size_weights(&self) -> Vec<BigUint> {
        one_hot(self.0)
    }
    fn from_size_weights(w: &[BigUint]) -> Option<Self> {
        w.iter().rposition(|c| !c.is_zero()).map(MaxSize)
    }
}

/// A set of strings over a fixed-length bag, each with an annotation.
#[derive(Clone, Debug, PartialEq)]
pub struct Language<A = ()> {
    len: usize,
    entries: HashMap<StateString, A>,
}

impl<A: Annotation> Language<A> {
    pub fn new(len: usize) -> Self {
        Language { len, entries: HashMap::new() }
    }

    pub fn bag_len(&self) -> usize {
        self.len
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds a string, merging annotations when it is already present.
    pub fn insert(&mut self, x: StateString, a: A) {
        debug_assert_eq!(x.len(), self.len);
        match self.entries.get_mut(&x) {
            Some(old) => old.merge(&a),
            None => {
                self.entries.insert(x, a);
            }
        }
    }

    pub fn get(&self, x: &StateString) -> Option<&A> {
        self.entries.get(x)
    }

    pub fn contains(&self, x: &StateString) -> bool {
        self.entries.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateString, &A)> {
        self.entries.iter()
    }

    /// Strings in lexicographic order.
    pub fn sorted_strings(&self) -> Vec<&StateString> {
        let mut v: Vec<_> = self.entries.keys().collect();
        v.sort();
        v
    }

    pub fn sigma_masks(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.entries.keys().map(StateString::sigma_mask).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Groups strings by σ-vector.
    pub fn by_sigma(&self) -> HashMap<u64, Vec<(&StateString, &A)>> {
        let mut groups: HashMap<u64, Vec<(&StateString, &A)>> = HashMap::new();
        for (x, a) in &self.entries {
            groups.entry(x.sigma_mask()).or_default().push((x, a));
        }
        groups
    }

    pub fn map_strings<F>(&self, mut f: F) -> Language<A>
    where
        F: FnMut(&StateString) -> Option<StateString>,
    {
        let mut out = Language::new(self.len);
        for (x, a) in &self.entries {
            if let Some(y) = f(x) {
                out.insert(y, a.clone());
            }
        }
        out
    }

    /// Drops annotations.
    pub fn support(&self) -> Language<()> {
        let mut out = Language::new(self.len);
        for x in self.entries.keys() {
            out.insert(x.clone(), ());
        }
        out
    }

    pub fn into_entries(self) -> HashMap<StateString, A> {
        self.entries
    }
}

impl<A: Annotation> FromIterator<(StateString, A)> for Language<A> {
    /// Panics on an empty iterator, whose bag length is unknown.
    fn from_iter<I: IntoIterator<Item = (StateString, A)>>(iter: I) -> Self {
        let mut it = iter.into_iter().peekable();
        let len = it.peek().map(|(x, _)| x.len()).expect("empty language has no bag length");
        let mut out = Language::new(len);
        for (x, a) in it {
            out.insert(x, a);
        }
        out
    }
}

/// `L1 ⊕ L2` by trying every pair with a shared σ-vector.
pub fn combine_languages_naive<A: Annotation>(
    l1: &Language<A>,
    l2: &Language<A>,
    alphabet: &Alphabet,
) -> Result<Language<A>> {
    if l1.bag_len() != l2.bag_len() {
        return Err(Error::LengthMismatch { left: l1.bag_len(), right: l2.bag_len() });
    }
    let mut out = Language::new(l1.bag_len());
    let groups = l2.by_sigma();
    for (x, a) in l1.iter() {
        let Some(partners) = groups.get(&x.sigma_mask()) else { continue };
        for (y, b) in partners {
            if let Some(z) = combine(x, y, alphabet)? {
                out.insert(z, a.product(b));
            }
        }
    }
    Ok(out)
}
