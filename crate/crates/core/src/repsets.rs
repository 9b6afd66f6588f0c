//! Representative sets for forbidden/positive sum constraints and the
//! representative-set DP for (co)finite pairs.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graphio::{Graph, NiceTreeDecomposition, NodeKind};
use crate::setspec::ProblemPair;
use crate::states::Side;

pub type Tuple = Vec<usize>;

/// Forbidden sets for the first `k` coordinates, positive sets for the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilitySpec {
    pub forbidden: Vec<Vec<usize>>,
    pub positive: Vec<Vec<usize>>,
}

impl CompatibilitySpec {
    pub fn new(forbidden: Vec<Vec<usize>>, positive: Vec<Vec<usize>>) -> Self {
        CompatibilitySpec { forbidden, positive }
    }

    pub fn arity(&self) -> usize {
        self.forbidden.len() + self.positive.len()
    }

    /// `max(|F_i|, max P_j)`.
    pub fn t(&self) -> usize {
        let f = self.forbidden.iter().map(Vec::len).max().unwrap_or(0);
        let p = self.positive.iter().filter_map(|p| p.iter().max()).max().copied().unwrap_or(0);
        f.max(p)
    }

    /// Whether tuples `a` and `b` are adjacent in the compatibility graph.
    pub fn edge(&self, a: &[usize], b: &[usize]) -> bool {
        let k = self.forbidden.len();
        self.forbidden.iter().enumerate().all(|(i, f)| !f.contains(&(a[i] + b[i])))
            && self.positive.iter().enumerate().all(|(j, p)| p.contains(&(a[k + j] + b[k + j])))
    }

    /// Per coordinate, the value above which every `b` coordinate behaves alike.
    pub fn canonical_bounds(&self) -> Vec<usize> {
        let top = |s: &Vec<usize>| s.iter().max().map_or(0, |m| m + 1);
        self.forbidden.iter().chain(&self.positive).map(top).collect()
    }
}

/// Coefficients of `∏_{f∈F} (a − f + y)` in increasing powers of `y`.
fn poly_coefficients(a: usize, forbidden: &[usize]) -> Vec<BigInt> {
    let mut coef = vec![BigInt::one()];
    for &f in forbidden {
        let c = BigInt::from(a as i64 - f as i64);
        let mut next = vec![BigInt::zero(); coef.len() + 1];
        for (i, x) in coef.iter().enumerate() {
            next[i] += x * &c;
            next[i + 1] += x;
        }
        coef = next;
    }
    coef
}

/// Tensor of per-coordinate coefficient vectors. Its inner product with
/// `⊗_i (b_i^0, …, b_i^{|F_i|})` is `∏_i ∏_{f∈F_i} (a_i + b_i − f)`.
fn tuple_vector(a: &[usize], forbidden: &[Vec<usize>]) -> Vec<BigInt> {
    let mut v = vec![BigInt::one()];
    for (i, f) in forbidden.iter().enumerate() {
        let c = poly_coefficients(a[i], f);
        let mut next = Vec::with_capacity(v.len() * c.len());
        for x in &v {
            for y in &c {
                next.push(x * y);
            }
        }
        v = next;
    }
    v
}

/// Incremental row echelon basis over ℚ, kept fraction-free.
struct RowBasis {
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl RowBasis {
    fn new() -> Self {
        RowBasis { rows: Vec::new() }
    }

    /// Adds `v` if it is independent of the rows so far.
    fn try_add(&mut self, mut v: Vec<BigInt>) -> bool {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let (a, b) = (row[*pivot].clone(), v[*pivot].clone());
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x * &a - r * &b;
            }
            normalize(&mut v);
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                self.rows.push((pivot, v));
                true
            }
            None => false,
        }
    }
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in v.iter_mut() {
            *x = -&*x;
        }
    }
}

/// Representative subset for forbidden sets on every coordinate; at most
/// `∏ (|F_i| + 1)` tuples are kept.
pub fn rep_set_forbidden(set: &[Tuple], forbidden: &[Vec<usize>]) -> Vec<Tuple> {
    if forbidden.iter().all(Vec::is_empty) {
        return set.iter().take(1).cloned().collect();
    }
    let mut basis = RowBasis::new();
    let mut out = Vec::new();
    let dim: usize = forbidden.iter().map(|f| f.len() + 1).product();
    for a in set {
        if basis.rows.len() == dim {
            break;
        }
        if basis.try_add(tuple_vector(a, forbidden)) {
            out.push(a.clone());
        }
    }
    out
}

/// Representative subset for a mixed specification: tuples that can never
/// reach a positive set are dropped, the rest are grouped by their positive
/// coordinates and reduced per group.
pub fn rep_set_mixed(set: &[Tuple], spec: &CompatibilitySpec) -> Vec<Tuple> {
    let k = spec.forbidden.len();
    let mut groups: HashMap<&[usize], Vec<Tuple>> = HashMap::new();
    let mut order = Vec::new();
    for a in set {
        let alive = spec
            .positive
            .iter()
            .enumerate()
            .all(|(j, p)| p.iter().max().is_some_and(|&top| a[k + j] <= top));
        if !alive {
            continue;
        }
        let key = &a[k..];
        let entry = groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        entry.push(a.clone());
    }
    let mut out = Vec::new();
    for key in order {
        out.extend(rep_set_forbidden(&groups[key], &spec.forbidden));
    }
    out
}

/// Rep-set DP table: per (σ-vector, size) stratum, raw weight tuples in bag order.
type Strata = HashMap<(u64, usize), Vec<Tuple>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

struct RepDp<'a> {
    graph: &'a Graph,
    pair: &'a ProblemPair,
    track_size: bool,
}

impl RepDp<'_> {
    fn side(mask: u64, p: usize) -> Side {
        if mask >> p & 1 == 1 {
            Side::Sigma
        } else {
            Side::Rho
        }
    }

    /// Forbidden coordinates first (cofinite sides), then positive ones.
    fn spec_for(&self, mask: u64, len: usize) -> (CompatibilitySpec, Vec<usize>) {
        let mut forbidden = Vec::new();
        let mut positive = Vec::new();
        let mut f_pos = Vec::new();
        let mut p_pos = Vec::new();
        for p in 0..len {
            let set = self.pair.set(Self::side(mask, p));
            if set.is_cofinite() {
                forbidden.push(set.members().to_vec());
                f_pos.push(p);
            } else {
                positive.push(set.members().to_vec());
                p_pos.push(p);
            }
        }
        f_pos.extend(p_pos);
        (CompatibilitySpec::new(forbidden, positive), f_pos)
    }

    fn reduce(&self, table: Strata, len: usize) -> Strata {
        let mut out = Strata::new();
        for ((mask, size), mut tuples) in table {
            tuples.sort_unstable();
            tuples.dedup();
            let (spec, perm) = self.spec_for(mask, len);
            let permuted: Vec<Tuple> = tuples.iter().map(|a| perm.iter().map(|&p| a[p]).collect()).collect();
            let kept = rep_set_mixed(&permuted, &spec);
            if kept.is_empty() {
                continue;
            }
            let restored = kept
                .into_iter()
                .map(|b| {
                    let mut a = vec![0; len];
                    for (i, &p) in perm.iter().enumerate() {
                        a[p] = b[i];
                    }
                    a
                })
                .collect();
            out.insert((mask, size), restored);
        }
        out
    }

    fn introduce(&self, table: &Strata, bag: &[usize], v: usize) -> (Strata, Vec<usize>) {
        let pos = bag.partition_point(|&u| u < v);
        let mut new_bag = bag.to_vec();
        new_bag.insert(pos, v);
        let nbrs: Vec<usize> = (0..bag.len()).filter(|&i| self.graph.has_edge(bag[i], v)).collect();
        let insert_bit = |mask: u64, bit: u64| {
            let low = mask & ((1 << pos) - 1);
            let high = (mask >> pos) << (pos + 1);
            low | bit << pos | high
        };
        let mut out = Strata::new();
        for (&(mask, size), tuples) in table {
            let k = nbrs.iter().filter(|&&p| mask >> p & 1 == 1).count();
            for y in tuples {
                let mut r = y.clone();
                r.insert(pos, k);
                out.entry((insert_bit(mask, 0), size)).or_default().push(r);
                let mut s = y.clone();
                for &p in &nbrs {
                    s[p] += 1;
                }
                s.insert(pos, k);
                out.entry((insert_bit(mask, 1), size)).or_default().push(s);
            }
        }
        (out, new_bag)
    }

    fn forget(&self, table: &Strata, bag: &[usize], v: usize) -> (Strata, Vec<usize>) {
        let pos = bag.binary_search(&v).expect("forgotten vertex is in the bag");
        let mut new_bag = bag.to_vec();
        new_bag.remove(pos);
        let remove_bit = |mask: u64| (mask & ((1 << pos) - 1)) | (mask >> (pos + 1)) << pos;
        let mut out = Strata::new();
        for (&(mask, size), tuples) in table {
            let side = Self::side(mask, pos);
            let set = self.pair.set(side);
            let new_size = if side == Side::Sigma && self.track_size { size + 1 } else { size };
            for y in tuples {
                if set.contains(y[pos]) {
                    let mut r = y.clone();
                    r.remove(pos);
                    out.entry((remove_bit(mask), new_size)).or_default().push(r);
                }
            }
        }
        (out, new_bag)
    }

    fn join(&self, left: &Strata, right: &Strata, bag: &[usize]) -> Strata {
        let bag_nbrs: Vec<Vec<usize>> = bag
            .iter()
            .map(|&u| (0..bag.len()).filter(|&q| self.graph.has_edge(u, bag[q])).collect())
            .collect();
        let mut out = Strata::new();
        for (&(mask, s1), xs) in left {
            let shift: Vec<usize> =
                bag_nbrs.iter().map(|nb| nb.iter().filter(|&&q| mask >> q & 1 == 1).count()).collect();
            for (&(mask2, s2), ys) in right {
                if mask2 != mask {
                    continue;
                }
                let target = out.entry((mask, s1 + s2)).or_default();
                for x in xs {
                    for y in ys {
                        target.push(x.iter().zip(y).zip(&shift).map(|((a, b), c)| a + b - c).collect());
                    }
                }
            }
        }
        out
    }

    /// Runs the DP; returns the sizes at which the root holds the empty tuple.
    fn run(&self, nice: &NiceTreeDecomposition) -> Result<Vec<usize>> {
        if self.pair.sigma.is_empty() || self.pair.rho.is_empty() {
            return Err(Error::EmptySet);
        }
        if nice.width() >= 64 {
            return Err(Error::NotApplicable("bags wider than 64 vertices".into()));
        }
        let mut pending: Vec<Option<(Strata, Vec<usize>)>> = vec![None; nice.len()];
        for (idx, node) in nice.nodes.iter().enumerate() {
            let mut take = |c: usize| pending[c].take().expect("child processed before parent");
            let (table, bag) = match node.kind {
                NodeKind::Leaf => (Strata::from([((0, 0), vec![Vec::new()])]), Vec::new()),
                NodeKind::Introduce(v) => {
                    let (t, bag) = take(node.children[0]);
                    self.introduce(&t, &bag, v)
                }
                NodeKind::Forget(v) => {
                    let (t, bag) = take(node.children[0]);
                    self.forget(&t, &bag, v)
                }
                NodeKind::Join => {
                    let (l, bag) = take(node.children[0]);
                    let (r, _) = take(node.children[1]);
                    (self.join(&l, &r, &bag), bag)
                }
            };
            let reduced = self.reduce(table, bag.len());
            pending[idx] = Some((reduced, bag));
        }
        let (root, _) = pending[nice.root()].take().expect("root processed");
        let mut sizes: Vec<usize> = root.keys().map(|&(_, s)| s).collect();
        sizes.sort_unstable();
        Ok(sizes)
    }
}

/// Whether `g` has a (σ,ρ)-set.
pub fn dp_decide_rep_sets(g: &Graph, nice: &NiceTreeDecomposition, pair: &ProblemPair) -> Result<bool> {
    let dp = RepDp { graph: g, pair, track_size: false };
    Ok(!dp.run(nice)?.is_empty())
}

/// Smallest or largest size of a (σ,ρ)-set, if any exists.
pub fn dp_optimum_rep_sets(
    g: &Graph,
    nice: &NiceTreeDecomposition,
    pair: &ProblemPair,
    direction: Direction,
) -> Result<Option<usize>> {
    let dp = RepDp { graph: g, pair, track_size: true };
    let sizes = dp.run(nice)?;
    Ok(match direction {
        Direction::Min => sizes.first().copied(),
        Direction::Max => sizes.last().copied(),
    })
}

/// Whether a (σ,ρ)-set of size at most (`Min`) or at least (`Max`) `k` exists.
pub fn dp_optimize_rep_sets(
    g: &Graph,
    nice: &NiceTreeDecomposition,
    pair: &ProblemPair,
    direction: Direction,
    k: usize,
) -> Result<bool> {
    Ok(match dp_optimum_rep_sets(g, nice, pair, direction)? {
        None => false,
        Some(best) => match direction {
            Direction::Min => best <= k,
            Direction::Max => best >= k,
        },
    })
}
