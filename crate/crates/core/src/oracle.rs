//! Exhaustive ground truth: solution counts, realized languages, naive
//! convolution and representativity checks.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graphio::Graph;
use crate::repsets::CompatibilitySpec;
use crate::setspec::ProblemPair;
use crate::states::{Alphabet, Language, SizeCounts, State, StateString};

pub const SOLUTION_GUARD: usize = 24;
pub const LANGUAGE_GUARD: usize = 20;

fn neighbor_masks(g: &Graph) -> Vec<u32> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u32, |acc, &u| acc | 1 << u)).collect()
}

fn state_of(nbr: &[u32], set: u32, v: usize) -> State {
    let count = (nbr[v] & set).count_ones() as usize;
    if set >> v & 1 == 1 {
        State::sigma(count)
    } else {
        State::rho(count)
    }
}

pub fn is_solution(g: &Graph, pair: &ProblemPair, set: u32) -> bool {
    let nbr = neighbor_masks(g);
    (0..g.n()).all(|v| {
        let st = state_of(&nbr, set, v);
        pair.set(st.side).contains(st.count)
    })
}

/// Number of (σ,ρ)-sets of each size `0..=n`.
pub fn brute_solutions(g: &Graph, pair: &ProblemPair) -> Result<Vec<BigUint>> {
    brute_solutions_guarded(g, pair, SOLUTION_GUARD)
}

pub fn brute_solutions_guarded(g: &Graph, pair: &ProblemPair, guard: usize) -> Result<Vec<BigUint>> {
    let n = g.n();
    if n > guard.min(31) {
        return Err(Error::SizeGuard { n, limit: guard.min(31) });
    }
    let nbr = neighbor_masks(g);
    let mut counts = vec![0u64; n + 1];
    for set in 0u32..1 << n {
        let ok = (0..n).all(|v| {
            let st = state_of(&nbr, set, v);
            pair.set(st.side).contains(st.count)
        });
        if ok {
            counts[set.count_ones() as usize] += 1;
        }
    }
    Ok(counts.into_iter().map(BigUint::from).collect())
}

/// Realized language of `(g, portals)`: for each witness set, the portal
/// states over the full alphabet, split into `m` classes by the number of
/// selected non-portal vertices. The annotation counts witnesses by that
/// number. With `clamp`, strings are projected onto the restricted alphabet
/// (cofinite sides saturate, overflowing finite sides are dropped).
pub fn realized_language(
    g: &Graph,
    portals: &[usize],
    pair: &ProblemPair,
    m: usize,
    clamp: bool,
) -> Result<Vec<Language<SizeCounts>>> {
    let n = g.n();
    if n > LANGUAGE_GUARD {
        return Err(Error::SizeGuard { n, limit: LANGUAGE_GUARD });
    }
    assert!(m >= 1);
    let nbr = neighbor_masks(g);
    let portal_mask = portals.iter().fold(0u32, |acc, &u| acc | 1 << u);
    let alphabet = Alphabet::for_pair(pair);
    let mut classes: Vec<Language<SizeCounts>> = (0..m).map(|_| Language::new(portals.len())).collect();
    'sets: for set in 0u32..1 << n {
        for v in 0..n {
            if portal_mask >> v & 1 == 0 {
                let st = state_of(&nbr, set, v);
                if !pair.set(st.side).contains(st.count) {
                    continue 'sets;
                }
            }
        }
        let mut states = Vec::with_capacity(portals.len());
        for &u in portals {
            let mut st = state_of(&nbr, set, u);
            if clamp {
                match alphabet.fit(st.side, st.count) {
                    Some(c) => st.count = c,
                    None => continue 'sets,
                }
            }
            states.push(st);
        }
        let hidden = (set & !portal_mask).count_ones() as usize;
        let mut counts = vec![BigUint::zero(); hidden + 1];
        counts[hidden] = 1u32.into();
        classes[hidden % m].insert(StateString(states), SizeCounts(counts));
    }
    Ok(classes)
}

/// Induced subgraph on `keep` (sorted), relabelled to `0..keep.len()`.
pub fn induced(g: &Graph, keep: &[usize]) -> Graph {
    let index = |v: usize| keep.binary_search(&v).ok();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter_map(|(u, v)| Some((index(u)?, index(v)?)))
        .collect();
    Graph::from_edges(keep.len(), &edges).expect("relabelled edges are in range")
}

/// `h(a) = Σ_{a1+a2=a} f(a1)·g(a2)` over `Z_{d_1} × …`, little-endian indices.
pub fn naive_convolve(f: &[BigUint], g: &[BigUint], moduli: &[usize]) -> Vec<BigUint> {
    let size: usize = moduli.iter().product();
    assert_eq!(f.len(), size);
    assert_eq!(g.len(), size);
    let digits = |mut x: usize| -> Vec<usize> {
        moduli
            .iter()
            .map(|&d| {
                let r = x % d;
                x /= d;
                r
            })
            .collect()
    };
    let mut h = vec![BigUint::zero(); size];
    for (i, a) in f.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let di = digits(i);
        for (j, b) in g.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let dj = digits(j);
            let mut idx = 0;
            for k in (0..moduli.len()).rev() {
                idx = idx * moduli[k] + (di[k] + dj[k]) % moduli[k];
            }
            h[idx] += a * b;
        }
    }
    h
}

/// Checks `∃a∈S: edge(a,b) ⟺ ∃a′∈S′: edge(a′,b)` for every canonical `b`.
/// Values above the largest relevant element all behave alike, so each
/// coordinate of `b` ranges over `0..=bound` only. Returns a violating `b`.
pub fn brute_representative_check(
    full: &[Vec<usize>],
    sub: &[Vec<usize>],
    spec: &CompatibilitySpec,
) -> std::result::Result<(), Vec<usize>> {
    let bounds = spec.canonical_bounds();
    let mut b = vec![0usize; bounds.len()];
    loop {
        let lhs = full.iter().any(|a| spec.edge(a, &b));
        let rhs = sub.iter().any(|a| spec.edge(a, &b));
        if lhs != rhs {
            return Err(b);
        }
        let mut k = 0;
        loop {
            if k == b.len() {
                return Ok(());
            }
            if b[k] < bounds[k] {
                b[k] += 1;
                break;
            }
            b[k] = 0;
            k += 1;
        }
    }
}

/// Unclamped portal states of one witness set, for debugging.
pub fn portal_states(g: &Graph, portals: &[usize], set: u32) -> StateString {
    let nbr = neighbor_masks(g);
    StateString(portals.iter().map(|&u| state_of(&nbr, set, u)).collect())
}
