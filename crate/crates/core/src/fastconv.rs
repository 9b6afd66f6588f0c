//! Convolution over finite abelian groups `Z_{d_1} × … × Z_{d_n}` in prime
//! fields, and exact integer convolution by Chinese remaindering.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Little-endian mixed-radix domain: axis 0 varies fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDomain {
    moduli: Vec<usize>,
    size: usize,
}

impl CyclicDomain {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        let mut size = 1usize;
        for &d in &moduli {
            if d == 0 {
                return Err(Error::Invariant("cyclic axis of length 0".into()));
            }
            size = size
                .checked_mul(d)
                .ok_or_else(|| Error::Invariant("convolution domain too large".into()))?;
        }
        Ok(CyclicDomain { moduli, size })
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.moduli.len());
        tuple.iter().zip(&self.moduli).rev().fold(0, |acc, (&x, &d)| acc * d + x % d)
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        self.moduli
            .iter()
            .map(|&d| {
                let r = index % d;
                index /= d;
                r
            })
            .collect()
    }

    /// Product of the distinct axis lengths.
    pub fn distinct_product(&self) -> u64 {
        let mut d: Vec<usize> = self.moduli.iter().copied().filter(|&d| d > 1).collect();
        d.sort_unstable();
        d.dedup();
        d.into_iter().map(|x| x as u64).product()
    }
}

/// A prime `p ≡ 1 (mod D′)` together with a root of unity of exact order
/// `d` for every distinct axis length `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePlan {
    pub p: u64,
    pub roots: Vec<(usize, u64)>,
}

impl PrimePlan {
    pub fn root(&self, d: usize) -> u64 {
        self.roots
            .iter()
            .find(|&&(k, _)| k == d)
            .map(|&(_, w)| w)
            .expect("plan has a root for every axis length")
    }
}

/// Largest prime the field arithmetic accepts.
pub const MAX_PRIME: u64 = 1 << 62;
const CANDIDATE_CAP: u64 = 1 << 24;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= d {
        if d % q == 0 {
            out.push(q);
            while d % q == 0 {
                d /= q;
            }
        }
        q += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// Scans `x = 2, 3, …` for `x^((p−1)/d)` of exact order `d`.
fn root_of_unity(p: u64, d: u64) -> Option<u64> {
    if d == 1 {
        return Some(1);
    }
    let factors = prime_factors(d);
    (2..p).take(4096).find_map(|x| {
        let w = pow_mod(x, (p - 1) / d, p);
        factors.iter().all(|&q| pow_mod(w, d / q, p) != 1).then_some(w)
    })
}

fn plan_for_prime(domain: &CyclicDomain, p: u64) -> Option<PrimePlan> {
    let mut ds: Vec<usize> = domain.moduli().to_vec();
    ds.sort_unstable();
    ds.dedup();
    let roots = ds
        .into_iter()
        .map(|d| root_of_unity(p, d as u64).map(|w| (d, w)))
        .collect::<Option<Vec<_>>>()?;
    Some(PrimePlan { p, roots })
}

/// First prime `p > lower` with `p ≡ 1 (mod D′)`.
pub fn next_plan(domain: &CyclicDomain, lower: u64) -> Result<PrimePlan> {
    let step = domain.distinct_product().max(1);
    let mut j = lower.saturating_sub(1) / step + 1;
    for _ in 0..CANDIDATE_CAP {
        let p = step
            .checked_mul(j)
            .and_then(|x| x.checked_add(1))
            .filter(|&p| p < MAX_PRIME)
            .ok_or_else(|| Error::PrimeSearch(format!("no prime ≡ 1 mod {step} below 2^62")))?;
        if p > lower && is_prime(p) {
            if let Some(plan) = plan_for_prime(domain, p) {
                return Ok(plan);
            }
        }
        j += 1;
    }
    Err(Error::PrimeSearch(format!("gave up after {CANDIDATE_CAP} candidates ≡ 1 mod {step}")))
}

/// Smallest prime `p > max(M, D)` with `p ≡ 1 (mod D′)`, with its roots.
pub fn find_prime_plan(domain: &CyclicDomain, m: &BigUint) -> Result<PrimePlan> {
    let lower = m
        .to_u64()
        .filter(|&x| x < MAX_PRIME)
        .ok_or_else(|| Error::PrimeSearch(format!("bound {m} exceeds single-prime range")))?;
    next_plan(domain, lower.max(domain.size() as u64))
}

/// In-place cyclic DFT of `a` with a root `w` of order `a.len()`.
fn dft(a: &mut [u64], w: u64, p: u64) {
    let d = a.len();
    if d <= 1 {
        return;
    }
    let r = smallest_factor(d);
    if d <= 64 || r == d {
        let pw: Vec<u64> = std::iter::successors(Some(1u64), |&x| Some(mul_mod(x, w, p))).take(d).collect();
        let out: Vec<u64> = (0..d)
            .map(|k| {
                let mut acc = 0u128;
                for (j, &x) in a.iter().enumerate() {
                    acc += x as u128 * pw[j * k % d] as u128;
                    if acc >= 1 << 126 {
                        acc %= p as u128;
                    }
                }
                (acc % p as u128) as u64
            })
            .collect();
        a.copy_from_slice(&out);
        return;
    }
    // d = r·s: split by residue of the index mod r
    let s = d / r;
    let wr = pow_mod(w, r as u64, p);
    let mut subs: Vec<Vec<u64>> = (0..r).map(|j1| (0..s).map(|j2| a[j1 + r * j2]).collect()).collect();
    for sub in &mut subs {
        dft(sub, wr, p);
    }
    let mut wk = 1u64;
    for k in 0..d {
        let mut acc = 0u64;
        let mut tw = 1u64;
        for sub in &subs {
            acc = (acc + mul_mod(tw, sub[k % s], p)) % p;
            tw = mul_mod(tw, wk, p);
        }
        a[k] = acc;
        wk = mul_mod(wk, w, p);
    }
}

fn smallest_factor(d: usize) -> usize {
    (2..).take_while(|q| q * q <= d).find(|q| d % q == 0).unwrap_or(d)
}

fn transform(data: &mut [u64], domain: &CyclicDomain, plan: &PrimePlan, inverse: bool) {
    let p = plan.p;
    let mut stride = 1;
    let mut line = Vec::new();
    for &d in domain.moduli() {
        if d > 1 {
            let w = plan.root(d);
            let w = if inverse { inv_mod(w, p) } else { w };
            let block = stride * d;
            for base in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    line.clear();
                    line.extend((0..d).map(|k| data[base + off + k * stride]));
                    dft(&mut line, w, p);
                    for (k, &x) in line.iter().enumerate() {
                        data[base + off + k * stride] = x;
                    }
                }
            }
        }
        stride *= d;
    }
    if inverse {
        let scale = inv_mod(domain.size() as u64 % p, p);
        for x in data.iter_mut() {
            *x = mul_mod(*x, scale, p);
        }
    }
}

/// Forward transform followed by the inverse one; the identity on valid plans.
pub fn round_trip(data: &[u64], domain: &CyclicDomain, plan: &PrimePlan) -> Vec<u64> {
    let mut v = data.to_vec();
    transform(&mut v, domain, plan, false);
    transform(&mut v, domain, plan, true);
    v
}

/// `h(a) = Σ_{a1+a2=a} f(a1)·g(a2)` in `F_p`.
pub fn convolve_mod_p(f: &[u64], g: &[u64], domain: &CyclicDomain, plan: &PrimePlan) -> Vec<u64> {
    assert_eq!(f.len(), domain.size());
    assert_eq!(g.len(), domain.size());
    let p = plan.p;
    let mut a: Vec<u64> = f.iter().map(|&x| x % p).collect();
    let mut b: Vec<u64> = g.iter().map(|&x| x % p).collect();
    transform(&mut a, domain, plan, false);
    transform(&mut b, domain, plan, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = mul_mod(*x, *y, p);
    }
    transform(&mut a, domain, plan, true);
    a
}

/// Primes `≡ 1 (mod D′)` above `2^31` whose product exceeds `bound`.
pub fn exact_plans(domain: &CyclicDomain, bound: &BigUint) -> Result<Vec<PrimePlan>> {
    let mut plans = Vec::new();
    let mut product = BigUint::one();
    let mut lower = (1u64 << 31).max(domain.size() as u64);
    while &product <= bound {
        let plan = next_plan(domain, lower)?;
        lower = plan.p;
        product *= plan.p;
        plans.push(plan);
    }
    Ok(plans)
}

/// Exact convolution of non-negative integer functions whose result entries
/// are known to lie in `[0, bound]`.
pub fn convolve_exact(f: &[BigUint], g: &[BigUint], domain: &CyclicDomain, bound: &BigUint) -> Result<Vec<BigUint>> {
    let plans = exact_plans(domain, bound)?;
    convolve_exact_with(f, g, domain, &plans)
}

pub fn convolve_exact_with(
    f: &[BigUint],
    g: &[BigUint],
    domain: &CyclicDomain,
    plans: &[PrimePlan],
) -> Result<Vec<BigUint>> {
    if f.iter().all(Zero::is_zero) || g.iter().all(Zero::is_zero) {
        return Ok(vec![BigUint::zero(); domain.size()]);
    }
    let residues: Vec<Vec<u64>> = plans
        .par_iter()
        .map(|plan| {
            let reduce = |v: &[BigUint]| -> Vec<u64> {
                v.iter().map(|x| (x % plan.p).to_u64().expect("residue fits")).collect()
            };
            convolve_mod_p(&reduce(f), &reduce(g), domain, plan)
        })
        .collect();
    Ok(crt(&residues, plans))
}

/// Garner-style recombination of per-prime residues into `[0, Πp)`.
fn crt(residues: &[Vec<u64>], plans: &[PrimePlan]) -> Vec<BigUint> {
    let len = residues.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| {
            let mut x = BigUint::from(residues[0][i]);
            let mut modulus = BigUint::from(plans[0].p);
            for (r, plan) in residues.iter().zip(plans).skip(1) {
                let p = plan.p;
                let x_mod = (&x % p).to_u64().unwrap();
                let m_mod = (&modulus % p).to_u64().unwrap();
                let diff = (r[i] + p - x_mod) % p;
                let t = mul_mod(diff, inv_mod(m_mod, p), p);
                x += &modulus * t;
                modulus *= p;
            }
            x
        })
        .collect()
}
