//! Join of m-structured languages through σ-compression and cyclic
//! convolution.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dpcore::Joiner;
use crate::error::{Error, Result};
use crate::fastconv::{convolve_exact_with, convolve_mod_p, next_plan, CyclicDomain, PrimePlan};
use crate::states::{combine_languages_naive, residue_related, Alphabet, Annotation, Language, StateString};

/// Positions whose σ-bits determine the whole σ-vector, with one witness
/// pair `(w1, w0)` per position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaDefiningSet {
    pub positions: Vec<usize>,
    pub witnesses: Vec<(u64, u64)>,
}

impl SigmaDefiningSet {
    pub fn contains(&self, pos: usize) -> bool {
        self.positions.binary_search(&pos).is_ok()
    }

    pub fn mask(&self) -> u64 {
        self.positions.iter().fold(0, |acc, &p| acc | 1 << p)
    }
}

fn has_duplicate_projection(masks: &[u64], keep: u64) -> bool {
    let mut proj: Vec<u64> = masks.iter().map(|&s| s & keep).collect();
    proj.sort_unstable();
    proj.windows(2).any(|w| w[0] == w[1])
}

/// Greedy removal: drop positions as long as the projections of the
/// (distinct) σ-vectors stay distinct.
pub fn sigma_defining_set(masks: &[u64], n: usize) -> SigmaDefiningSet {
    let mut masks = masks.to_vec();
    masks.sort_unstable();
    masks.dedup();
    let mut keep: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    loop {
        let mut changed = false;
        for i in 0..n {
            if keep >> i & 1 == 1 && !has_duplicate_projection(&masks, keep & !(1 << i)) {
                keep &= !(1 << i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let positions: Vec<usize> = (0..n).filter(|&i| keep >> i & 1 == 1).collect();
    let witnesses = positions
        .iter()
        .map(|&i| {
            let rest = keep & !(1 << i);
            let mut by_proj: HashMap<u64, u64> = HashMap::new();
            for &s in &masks {
                if let Some(&other) = by_proj.get(&(s & rest)) {
                    return if s >> i & 1 == 1 { (s, other) } else { (other, s) };
                }
                by_proj.insert(s & rest, s);
            }
            unreachable!("a kept position always has a witness pair")
        })
        .collect();
    SigmaDefiningSet { positions, witnesses }
}

/// Which weight vector of a σ-vector class serves as origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OriginChoice {
    #[default]
    LexSmallest,
    LexLargest,
    /// The member at this index (mod the class size) in lexicographic order.
    Nth(usize),
}

impl OriginChoice {
    fn pick<'a>(self, sorted: &[&'a [usize]]) -> &'a [usize] {
        match self {
            OriginChoice::LexSmallest => sorted[0],
            OriginChoice::LexLargest => sorted[sorted.len() - 1],
            OriginChoice::Nth(k) => sorted[k % sorted.len()],
        }
    }
}

/// σ-compression for one σ-vector `s` of a language pair.
#[derive(Clone, Debug)]
pub struct Compressor {
    n: usize,
    m: usize,
    t_top: usize,
    caps: Vec<usize>,
    in_s: Vec<bool>,
    /// Per position in `S`: `w1 − w0` on the complement of `S`.
    diffs: Vec<Vec<i64>>,
    s_slot: Vec<usize>,
    moduli: Vec<usize>,
}

impl Compressor {
    pub fn new(def: &SigmaDefiningSet, sigma: u64, n: usize, alphabet: &Alphabet, m: usize) -> Self {
        let t_top = alphabet.s_top.max(alphabet.r_top);
        let caps: Vec<usize> =
            (0..n).map(|i| if sigma >> i & 1 == 1 { alphabet.s_top } else { alphabet.r_top }).collect();
        let in_s: Vec<bool> = (0..n).map(|i| def.contains(i)).collect();
        let mut s_slot = vec![usize::MAX; n];
        for (k, &p) in def.positions.iter().enumerate() {
            s_slot[p] = k;
        }
        let diffs = def
            .witnesses
            .iter()
            .map(|&(w1, w0)| (0..n).map(|i| if in_s[i] { 0 } else { (w1 >> i & 1) as i64 - (w0 >> i & 1) as i64 }).collect())
            .collect();
        let mut moduli: Vec<usize> =
            (0..n).map(|i| if in_s[i] { (caps[i] + 1).div_ceil(m) } else { t_top + 1 }).collect();
        // each checksum must exceed the largest possible sum of two vectors
        let bar_sum: usize = (0..n).filter(|&i| !in_s[i]).map(|i| caps[i]).sum();
        let s_sum: usize = (0..n).filter(|&i| in_s[i]).map(|i| caps[i]).sum();
        moduli.push(2 * bar_sum + 1);
        moduli.push(2 * s_sum + 1);
        Compressor { n, m, t_top, caps, in_s, diffs, s_slot, moduli }
    }

    /// Lengths of the `n + 2` coordinates.
    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    /// `Σ_{i∉S} (u[i] − o[i]) · (w1_ℓ[i] − w0_ℓ[i])` for the `k`-th position of `S`.
    pub fn remainder(&self, u: &[usize], o: &[usize], k: usize) -> i64 {
        self.diffs[k].iter().enumerate().map(|(i, &d)| (u[i] as i64 - o[i] as i64) * d).sum()
    }

    pub fn compress(&self, z: &[usize], o: &[usize]) -> Result<Vec<usize>> {
        let mut c = Vec::with_capacity(self.n + 2);
        let (mut bar_sum, mut s_sum) = (0usize, 0usize);
        for l in 0..self.n {
            if self.in_s[l] {
                s_sum += z[l];
                let val = z[l] as i64 - o[l] as i64 + self.remainder(z, o, self.s_slot[l]);
                if val.rem_euclid(self.m as i64) != 0 {
                    return Err(Error::Invariant(format!("origin does not align position {l}")));
                }
                c.push((val / self.m as i64).rem_euclid(self.moduli[l] as i64) as usize);
            } else {
                bar_sum += z[l];
                c.push(z[l] % (self.t_top + 1));
            }
        }
        c.push(bar_sum % self.moduli[self.n]);
        c.push(s_sum % self.moduli[self.n + 1]);
        Ok(c)
    }

    /// Inverse of `compress` for a fixed origin; `None` for points that are
    /// not compressions of any weight vector within capacity.
    pub fn decompress(&self, c: &[usize], o: &[usize]) -> Option<Vec<usize>> {
        let mut z = vec![0usize; self.n];
        for l in 0..self.n {
            if !self.in_s[l] {
                z[l] = c[l];
            }
        }
        for l in 0..self.n {
            if self.in_s[l] {
                let span = (self.m * self.moduli[l]) as i64;
                let val = self.m as i64 * c[l] as i64 + o[l] as i64 - self.remainder(c, o, self.s_slot[l]);
                z[l] = val.rem_euclid(span) as usize;
            }
        }
        if z.iter().zip(&self.caps).any(|(x, cap)| x > cap) {
            return None;
        }
        let bar_sum: usize = (0..self.n).filter(|&i| !self.in_s[i]).map(|i| z[i]).sum();
        let s_sum: usize = (0..self.n).filter(|&i| self.in_s[i]).map(|i| z[i]).sum();
        if bar_sum % self.moduli[self.n] != c[self.n] || s_sum % self.moduli[self.n + 1] != c[self.n + 1] {
            return None;
        }
        Some(z)
    }
}

/// When a σ-vector class is joined by convolution rather than by pairing
/// its strings directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JoinPolicy {
    /// Whichever a rough operation count says is cheaper.
    #[default]
    CostBased,
    /// Whenever the convolution domain has at most this many points.
    Convolve { max_domain: usize },
}

/// Join via compression and convolution; equal to the naive join.
pub struct StructuredJoiner {
    pub origin: OriginChoice,
    pub policy: JoinPolicy,
    /// Check the residue precondition on languages up to this size (debug builds).
    pub check_limit: usize,
    convolutions: AtomicUsize,
    primes: Mutex<HashMap<Vec<usize>, Vec<PrimePlan>>>,
}

impl Default for StructuredJoiner {
    fn default() -> Self {
        StructuredJoiner::new(OriginChoice::default())
    }
}

impl StructuredJoiner {
    pub fn new(origin: OriginChoice) -> Self {
        StructuredJoiner { origin, policy: JoinPolicy::CostBased, check_limit: 512, convolutions: AtomicUsize::new(0), primes: Mutex::new(HashMap::new()) }
    }

    pub fn with_policy(origin: OriginChoice, policy: JoinPolicy) -> Self {
        StructuredJoiner { policy, ..StructuredJoiner::new(origin) }
    }

    /// A joiner that never falls back to pairing strings directly.
    pub fn convolving(origin: OriginChoice) -> Self {
        StructuredJoiner::with_policy(origin, JoinPolicy::Convolve { max_domain: usize::MAX })
    }

    /// Number of σ-vector classes joined by convolution so far.
    pub fn convolutions(&self) -> usize {
        self.convolutions.load(Ordering::Relaxed)
    }

    /// Primes above `2^31`, `≡ 1` modulo the distinct axis lengths, whose
    /// product exceeds `bound`.
    fn plans(&self, domain: &CyclicDomain, bound: &BigUint) -> Result<Vec<PrimePlan>> {
        let mut key: Vec<usize> = domain.moduli().to_vec();
        key.sort_unstable();
        key.dedup();
        let mut cache = self.primes.lock().expect("prime cache poisoned");
        let list = cache.entry(key).or_default();
        let mut product = list.iter().fold(BigUint::one(), |acc, p| acc * p.p);
        while &product <= bound || list.is_empty() {
            let lower = list.last().map_or(1u64 << 31, |p| p.p).max(domain.size() as u64);
            let plan = next_plan(domain, lower)?;
            product *= plan.p;
            list.push(plan);
        }
        let mut out = Vec::new();
        let mut acc = BigUint::one();
        for plan in list.iter() {
            out.push(plan.clone());
            acc *= plan.p;
            if &acc > bound {
                break;
            }
        }
        Ok(out)
    }

    fn check_precondition<A: Annotation>(&self, l: &Language<A>, m: usize) -> Result<()> {
        if !cfg!(debug_assertions) || l.len() > self.check_limit {
            return Ok(());
        }
        let xs = l.sorted_strings();
        for x in &xs {
            for y in &xs {
                if !residue_related(x, y, m) {
                    return Err(Error::Invariant(format!("strings {x} and {y} violate the residue relation")));
                }
            }
        }
        Ok(())
    }

    fn join_sigma<A: Annotation>(
        &self,
        sigma: u64,
        def: &SigmaDefiningSet,
        left: &[(&StateString, &A)],
        right: &[(&StateString, &A)],
        n: usize,
        alphabet: &Alphabet,
        m: usize,
    ) -> Result<Vec<(StateString, A)>> {
        let comp = Compressor::new(def, sigma, n, alphabet, m);
        let side = |entries: &[(&StateString, &A)]| -> (Vec<(Vec<usize>, Vec<BigUint>)>, Vec<usize>) {
            let items: Vec<(Vec<usize>, Vec<BigUint>)> =
                entries.iter().map(|(x, a)| (x.weights(), a.size_weights())).collect();
            let mut sorted: Vec<&[usize]> = items.iter().map(|(w, _)| w.as_slice()).collect();
            sorted.sort_unstable();
            let origin = self.origin.pick(&sorted).to_vec();
            (items, origin)
        };
        let (items1, o) = side(left);
        let (items2, p) = side(right);
        let origin: Vec<usize> = o.iter().zip(&p).map(|(a, b)| a + b).collect();

        let len1 = items1.iter().map(|(_, w)| w.len()).max().unwrap_or(1);
        let len2 = items2.iter().map(|(_, w)| w.len()).max().unwrap_or(1);
        let size_len = len1 + len2 - 1;
        let mut full: Vec<usize> = comp.moduli().to_vec();
        full.push(size_len);
        let active: Vec<usize> = (0..full.len()).filter(|&i| full[i] > 1).collect();
        let domain = CyclicDomain::new(active.iter().map(|&i| full[i]).collect())?;
        let convolve = match self.policy {
            JoinPolicy::CostBased => {
                // three transforms against one combine per pair
                let transform_cost = 3 * domain.size() * domain.moduli().iter().sum::<usize>().max(1);
                left.len() * right.len() * (n + size_len) > transform_cost
            }
            JoinPolicy::Convolve { max_domain } => domain.size() <= max_domain,
        };
        if !convolve {
            let part = |entries: &[(&StateString, &A)]| {
                let mut l = Language::new(n);
                for (x, a) in entries {
                    l.insert((*x).clone(), (*a).clone());
                }
                l
            };
            return Ok(combine_languages_naive(&part(left), &part(right), alphabet)?.into_entries().into_iter().collect());
        }
        let index_of = |c: &[usize], size: usize| -> usize {
            let mut idx = 0;
            for &i in active.iter().rev() {
                let x = if i < c.len() { c[i] } else { size };
                idx = idx * full[i] + x;
            }
            idx
        };

        let fill = |items: &[(Vec<usize>, Vec<BigUint>)], o: &[usize]| -> Result<Vec<BigUint>> {
            let mut f = vec![BigUint::zero(); domain.size()];
            for (w, sizes) in items {
                let c = comp.compress(w, o)?;
                for (s, k) in sizes.iter().enumerate() {
                    if !k.is_zero() {
                        f[index_of(&c, s)] += if A::EXACT { k.clone() } else { BigUint::one() };
                    }
                }
            }
            Ok(f)
        };
        self.convolutions.fetch_add(1, Ordering::Relaxed);
        let f1 = fill(&items1, &o)?;
        let f2 = fill(&items2, &p)?;
        let total = |f: &[BigUint]| -> BigUint { f.iter().sum() };
        let bound = (total(&f1) * total(&f2)).max(BigUint::from(domain.size()));
        let plans = self.plans(&domain, &bound)?;
        let h: Vec<BigUint> = if !A::EXACT && plans.len() == 1 {
            let to_u64 = |f: &[BigUint]| -> Vec<u64> { f.iter().map(|x| x.to_u64().unwrap_or(0)).collect() };
            convolve_mod_p(&to_u64(&f1), &to_u64(&f2), &domain, &plans[0]).into_iter().map(BigUint::from).collect()
        } else {
            convolve_exact_with(&f1, &f2, &domain, &plans)?
        };

        let mut results: HashMap<Vec<usize>, Vec<BigUint>> = HashMap::new();
        let mut c = vec![0usize; n + 2];
        for (idx, value) in h.into_iter().enumerate() {
            if value.is_zero() {
                continue;
            }
            let coords = domain.tuple(idx);
            let mut size = 0;
            c.iter_mut().for_each(|x| *x = 0);
            for (k, &i) in active.iter().enumerate() {
                if i < n + 2 {
                    c[i] = coords[k];
                } else {
                    size = coords[k];
                }
            }
            let Some(z) = comp.decompress(&c, &origin) else { continue };
            if comp.compress(&z, &origin)? != c {
                continue;
            }
            let sizes = results.entry(z).or_insert_with(|| vec![BigUint::zero(); size_len]);
            sizes[size] += value;
        }
        let mut out = Vec::with_capacity(results.len());
        for (z, sizes) in results {
            if let Some(a) = A::from_size_weights(&sizes) {
                out.push((StateString::from_parts(sigma, &z), a));
            }
        }
        Ok(out)
    }
}

impl<A: Annotation> Joiner<A> for StructuredJoiner {
    fn join(&self, l1: &Language<A>, l2: &Language<A>, alphabet: &Alphabet, m: usize) -> Result<Language<A>> {
        if l1.bag_len() != l2.bag_len() {
            return Err(Error::LengthMismatch { left: l1.bag_len(), right: l2.bag_len() });
        }
        if alphabet.sigma_saturates || alphabet.rho_saturates {
            return Err(Error::NotApplicable("structured join needs finite σ and ρ".into()));
        }
        let n = l1.bag_len();
        if n >= 64 {
            return Err(Error::NotApplicable("bags wider than 63 vertices".into()));
        }
        self.check_precondition(l1, m)?;
        self.check_precondition(l2, m)?;
        let g1 = l1.by_sigma();
        let g2 = l2.by_sigma();
        let mut shared: Vec<u64> = g1.keys().copied().filter(|s| g2.contains_key(s)).collect();
        shared.sort_unstable();
        let mut out = Language::new(n);
        if shared.is_empty() {
            return Ok(out);
        }
        let def = sigma_defining_set(&shared, n);
        let parts: Vec<Vec<(StateString, A)>> = shared
            .par_iter()
            .map(|&s| self.join_sigma(s, &def, &g1[&s], &g2[&s], n, alphabet, m))
            .collect::<Result<_>>()?;
        for (z, a) in parts.into_iter().flatten() {
            out.insert(z, a);
        }
        Ok(out)
    }

    fn name(&self) -> &'static str {
        "structured"
    }
}
