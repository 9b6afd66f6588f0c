//! End-to-end acceptance run. Every criterion prints one PASS/FAIL line;
//! the last criterion is a timing record and never fails the run.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gendom::dpcore::{finalize, DpContext, DpTable, NaiveJoiner};
use gendom::fastconv::{convolve_exact, convolve_mod_p, find_prime_plan, CyclicDomain};
use gendom::graphio::{generate, grid, Graph, GraphModel, NiceTreeDecomposition, NodeKind, TreeDecomposition};
use gendom::oracle::{brute_representative_check, brute_solutions, naive_convolve, realized_language};
use gendom::repsets::{dp_decide_rep_sets, dp_optimize_rep_sets, rep_set_forbidden, rep_set_mixed, CompatibilitySpec, Direction};
use gendom::setspec::{trivial_count, ProblemPair};
use gendom::states::{residue_related, Alphabet, Annotation, Language, SizeCounts, State, StateString};
use gendom::structured::{sigma_defining_set, Compressor, JoinPolicy, OriginChoice, StructuredJoiner};

const FAMILY: [(&str, &str); 7] = [
    ("{0}", "{1}"),
    ("{0}", "all"),
    ("all", ">=1"),
    ("{0,3}", "{3}"),
    ("{1}", "{1}"),
    (">=1", ">=1"),
    ("co{2}", "co{1}"),
];

const STRUCTURED: [(&str, &str); 3] = [("{0}", "{1}"), ("{0,3}", "{3}"), ("{1}", "{1}")];

/// Structured pairs for the language checks; includes both bound regimes.
const BOUND_PAIRS: [(&str, &str); 5] = [("{0}", "{1}"), ("{0,3}", "{3}"), ("{1}", "{1}"), ("{0,2}", "{0,2}"), ("{2,4}", "{1,3}")];

struct Outcome {
    passed: bool,
    detail: String,
}

fn pair(s: &str, r: &str) -> ProblemPair {
    ProblemPair::parse(s, r).unwrap()
}

fn nice_of(g: &Graph) -> NiceTreeDecomposition {
    NiceTreeDecomposition::from_td(&TreeDecomposition::min_degree(g))
}

fn random_graph(rng: &mut ChaCha8Rng, max_n: usize, densities: &[f64]) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let p = densities[rng.gen_range(0..densities.len())];
    generate(n, GraphModel::Gnp(p), rng.gen())
}

fn count_at(counts: &Option<SizeCounts>, k: usize) -> BigUint {
    counts.as_ref().map_or_else(BigUint::zero, |c| c.at(k))
}

fn oracle_equivalence_counting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    let graphs = 300;
    for i in 0..graphs {
        let g = random_graph(&mut rng, 12, &[if i % 2 == 0 { 0.25 } else { 0.5 }]);
        let nice = nice_of(&g);
        for (s, r) in FAMILY {
            let p = pair(s, r);
            let brute = brute_solutions(&g, &p).unwrap();
            let ctx = DpContext::new(&g, &p).unwrap();
            let dp = finalize(&ctx.run::<SizeCounts, _>(&nice, &NaiveJoiner).unwrap()).unwrap();
            if (0..=g.n()).any(|k| count_at(&dp, k) != brute[k]) {
                mismatches.push(format!("graph {i} {p}"));
            }
        }
    }
    Outcome {
        passed: mismatches.is_empty(),
        detail: format!("{graphs} graphs x {} pairs, mismatches {mismatches:?}", FAMILY.len()),
    }
}

/// Tables at join nodes and at the root, in node order.
fn join_tables<J: gendom::dpcore::Joiner<SizeCounts>>(
    ctx: &DpContext,
    nice: &NiceTreeDecomposition,
    joiner: &J,
) -> Vec<DpTable<SizeCounts>> {
    let mut out = Vec::new();
    let root = ctx
        .run_observed(nice, joiner, &mut |_, node, table: &DpTable<SizeCounts>| {
            if node.kind == NodeKind::Join {
                out.push(table.clone());
            }
            Ok(())
        })
        .unwrap();
    out.push(root);
    out
}

fn structured_equals_naive() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let instances = 102;
    let (mut joins, mut convolutions, mut mismatches) = (0, 0, Vec::new());
    for i in 0..instances {
        let (s, r) = STRUCTURED[i % STRUCTURED.len()];
        let p = pair(s, r);
        let g = random_graph(&mut rng, 14, &[0.2, 0.3]);
        let nice = nice_of(&g);
        let ctx = DpContext::new(&g, &p).unwrap();
        let naive = join_tables(&ctx, &nice, &NaiveJoiner);
        joins += naive.len() - 1;
        let cost_based = StructuredJoiner::default();
        let forced = StructuredJoiner::with_policy(OriginChoice::default(), JoinPolicy::Convolve { max_domain: 1 << 16 });
        for joiner in [&cost_based, &forced] {
            let fast = join_tables(&ctx, &nice, joiner);
            if fast.iter().zip(&naive).any(|(a, b)| a.bag != b.bag || a.classes != b.classes) {
                mismatches.push(format!("instance {i} {p}"));
            }
            convolutions += joiner.convolutions();
        }
    }
    Outcome {
        passed: mismatches.is_empty() && convolutions > 0,
        detail: format!(
            "{instances} instances, {joins} join nodes, {convolutions} convolved σ-classes, mismatches {mismatches:?}"
        ),
    }
}

/// Oracle-realized clamped classes on small graphs for the language checks.
fn realized_classes(rng: &mut ChaCha8Rng, p: &ProblemPair) -> (Vec<Language<SizeCounts>>, usize) {
    let n = rng.gen_range(2..=10);
    let g = generate(n, GraphModel::Gnp(rng.gen_range(0.2..0.6)), rng.gen());
    let mut portals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).take(6).collect();
    portals.sort_unstable();
    let m = p.residue_modulus();
    (realized_language(&g, &portals, p, m, true).unwrap(), m)
}

/// All strings over the restricted alphabet whose counts are `≡ 0 (mod m)`.
fn divisible_language(alphabet: &Alphabet, m: usize, n: usize) -> Language {
    let letters: Vec<State> = (0..=alphabet.s_top)
        .map(State::sigma)
        .chain((0..=alphabet.r_top).map(State::rho))
        .filter(|a| a.count % m == 0)
        .collect();
    let mut lang = Language::new(n);
    let total = letters.len().pow(n as u32);
    for mut idx in 0..total {
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            states.push(letters[idx % letters.len()]);
            idx /= letters.len();
        }
        lang.insert(StateString(states), ());
    }
    lang
}

fn language_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for (s, r) in BOUND_PAIRS {
        let p = pair(s, r);
        for _ in 0..30 {
            let (classes, m) = realized_classes(&mut rng, &p);
            for l in &classes {
                checked += 1;
                if l.len() as u128 > p.language_bound(m, l.bag_len()) {
                    violations.push(format!("oracle {p} |L|={} at {} portals", l.len(), l.bag_len()));
                }
            }
        }
        for _ in 0..15 {
            let g = random_graph(&mut rng, 12, &[0.25, 0.4]);
            let ctx = DpContext::new(&g, &p).unwrap();
            ctx.run_observed(&nice_of(&g), &NaiveJoiner, &mut |idx, node, table: &DpTable<()>| {
                for l in &table.classes {
                    checked += 1;
                    if l.len() as u128 > p.language_bound(ctx.m, node.bag.len()) {
                        violations.push(format!("dp {p} node {idx} |L|={}", l.len()));
                    }
                }
                Ok(())
            })
            .unwrap();
        }
    }
    // the divisible language is as large as the bound allows in the wide case
    let n = 4;
    let mut extremal = Vec::new();
    for (s, r) in [("{0,2}", "{0,2}"), ("{2,4}", "{0,4}"), ("{0,3}", "{3}"), ("{1}", "{1}")] {
        let p = pair(s, r);
        let m = p.residue_modulus();
        let l3 = divisible_language(&Alphabet::for_pair(&p), m, n);
        let xs = l3.sorted_strings();
        let related = xs.iter().all(|x| xs.iter().all(|y| residue_related(x, y, m)));
        let bound = p.language_bound(m, n);
        extremal.push(format!("{p}: |L3|={} bound={bound}", l3.len()));
        if !related || l3.len() as u128 > bound {
            violations.push(format!("L3 for {p}"));
        }
        if p.has_wide_bound(m) && l3.len() as u128 != (p.t_top as u128 + 2).pow(n as u32) {
            violations.push(format!("L3 for {p} misses (t+2)^n"));
        }
    }
    Outcome {
        passed: violations.is_empty(),
        detail: format!("{checked} classes, {}; violations {violations:?}", extremal.join(", ")),
    }
}

fn residue_relation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut pairs_checked, mut violations) = (0usize, 0usize);
    for (s, r) in BOUND_PAIRS {
        let p = pair(s, r);
        for clamp in [true, false] {
            for _ in 0..20 {
                let n = rng.gen_range(2..=10);
                let g = generate(n, GraphModel::Gnp(rng.gen_range(0.2..0.6)), rng.gen());
                let portals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).take(6).collect();
                let m = p.residue_modulus();
                for l in realized_language(&g, &portals, &p, m, clamp).unwrap() {
                    let xs = l.sorted_strings();
                    for x in &xs {
                        for y in &xs {
                            pairs_checked += 1;
                            violations += usize::from(!residue_related(x, y, m));
                        }
                    }
                }
            }
        }
    }
    Outcome { passed: violations == 0, detail: format!("{pairs_checked} string pairs, {violations} violations") }
}

fn random_domain(rng: &mut ChaCha8Rng, max_size: usize) -> CyclicDomain {
    let mut moduli = Vec::new();
    let mut size = 1;
    for _ in 0..rng.gen_range(1..=4) {
        let d = rng.gen_range(1..=16);
        if size * d <= max_size {
            moduli.push(d);
            size *= d;
        }
    }
    if moduli.is_empty() {
        moduli.push(1);
    }
    CyclicDomain::new(moduli).unwrap()
}

fn sparse_vector(rng: &mut ChaCha8Rng, size: usize, nonzero: usize, max: u64) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); size];
    for _ in 0..nonzero {
        v[rng.gen_range(0..size)] = BigUint::from(rng.gen_range(0..=max));
    }
    v
}

fn convolution() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut largest = 0;
    for i in 0..500 {
        let domain = random_domain(&mut rng, 4096);
        let d = domain.size();
        largest = largest.max(d);
        let nonzero = if d <= 256 { d } else { 48 };
        let f = sparse_vector(&mut rng, d, nonzero, 1000);
        let g = sparse_vector(&mut rng, d, nonzero, 1000);
        let plan = find_prime_plan(&domain, &BigUint::from(d as u64)).unwrap();
        let to_u64 = |v: &[BigUint]| -> Vec<u64> { v.iter().map(|x| (x % plan.p).try_into().unwrap()).collect() };
        let fast = convolve_mod_p(&to_u64(&f), &to_u64(&g), &domain, &plan);
        let expected: Vec<BigUint> = naive_convolve(&f, &g, domain.moduli()).iter().map(|x| x % plan.p).collect();
        if fast.iter().map(|&x| BigUint::from(x)).ne(expected) {
            failures.push(format!("mod p instance {i}"));
        }
    }
    for i in 0..60 {
        let domain = random_domain(&mut rng, 512);
        let d = domain.size();
        let f = sparse_vector(&mut rng, d, d.min(64), 1 << 40);
        let g = sparse_vector(&mut rng, d, d.min(64), 1 << 40);
        let bound = BigUint::from(1u64 << 40).pow(2) * BigUint::from(d as u64);
        if convolve_exact(&f, &g, &domain, &bound).unwrap() != naive_convolve(&f, &g, domain.moduli()) {
            failures.push(format!("exact instance {i}"));
        }
    }
    Outcome {
        passed: failures.is_empty(),
        detail: format!("500 mod-p instances up to D={largest}, 60 exact instances with 40-bit entries; failures {failures:?}"),
    }
}

fn compression_and_origins() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut vectors, mut round_trip_failures, mut joins, mut origin_failures) = (0usize, 0usize, 0usize, 0usize);
    let origins = [OriginChoice::LexSmallest, OriginChoice::LexLargest, OriginChoice::Nth(1)];
    let mut round = 0;
    while vectors < 1000 || joins < 30 {
        let (s, r) = BOUND_PAIRS[round % BOUND_PAIRS.len()];
        round += 1;
        let p = pair(s, r);
        let alphabet = Alphabet::for_pair(&p);
        let (classes, m) = realized_classes(&mut rng, &p);
        for l in classes.iter().filter(|l| !l.is_empty()) {
            let def = sigma_defining_set(&l.sigma_masks(), l.bag_len());
            for (sigma, members) in l.by_sigma() {
                let comp = Compressor::new(&def, sigma, l.bag_len(), &alphabet, m);
                let o = members.iter().map(|(x, _)| x.weights()).min().unwrap();
                for (x, _) in members {
                    vectors += 1;
                    let z = x.weights();
                    let ok = comp.compress(&z, &o).map(|c| comp.decompress(&c, &o) == Some(z)).unwrap_or(false);
                    round_trip_failures += usize::from(!ok);
                }
            }
            if l.bag_len() <= 5 {
                joins += 1;
                let outputs: Vec<_> = origins
                    .iter()
                    .map(|&o| {
                        let j = StructuredJoiner::with_policy(o, JoinPolicy::Convolve { max_domain: 1 << 16 });
                        gendom::dpcore::Joiner::join(&j, l, l, &alphabet, m).unwrap()
                    })
                    .collect();
                let naive = gendom::states::combine_languages_naive(l, l, &alphabet).unwrap();
                origin_failures += usize::from(outputs.iter().any(|x| *x != naive));
            }
        }
    }
    Outcome {
        passed: round_trip_failures == 0 && origin_failures == 0,
        detail: format!(
            "{vectors} vectors ({round_trip_failures} round-trip failures), {joins} self-joins x 3 origins ({origin_failures} disagreements)"
        ),
    }
}

fn random_subset(rng: &mut ChaCha8Rng, max: usize) -> Vec<usize> {
    let len = rng.gen_range(1..=3);
    let mut v: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=max)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn representative_sets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut largest = 0;
    let shapes: Vec<(usize, usize)> = (0..=3).flat_map(|k| (0..=3 - k).map(move |l| (k, l))).filter(|&(k, l)| k + l > 0).collect();
    for i in 0..200 {
        let (k, l) = shapes[i % shapes.len()];
        let forbidden: Vec<Vec<usize>> = (0..k).map(|_| random_subset(&mut rng, 6)).collect();
        let positive: Vec<Vec<usize>> = (0..l).map(|_| random_subset(&mut rng, 6)).collect();
        let spec = CompatibilitySpec::new(forbidden.clone(), positive);
        let size = rng.gen_range(0..=60);
        let set: Vec<Vec<usize>> = (0..size).map(|_| (0..k + l).map(|_| rng.gen_range(0..=6)).collect()).collect();
        let reduced = if l == 0 { rep_set_forbidden(&set, &forbidden) } else { rep_set_mixed(&set, &spec) };
        let bound = (spec.t() + 1).pow((k + l) as u32);
        largest = largest.max(reduced.len());
        if let Err(b) = brute_representative_check(&set, &reduced, &spec) {
            failures.push(format!("S{i} witness {b:?}"));
        }
        if reduced.len() > bound || reduced.iter().any(|a| !set.contains(a)) {
            failures.push(format!("S{i} size {} bound {bound}", reduced.len()));
        }
    }
    Outcome { passed: failures.is_empty(), detail: format!("200 sets, largest output {largest}; failures {failures:?}") }
}

fn rep_set_dp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs: Vec<(&str, &str)> = FAMILY.to_vec();
    pairs.push((">=2", ">=1"));
    let mut failures = Vec::new();
    let mut checks = 0;
    for (s, r) in pairs {
        let p = pair(s, r);
        for i in 0..30 {
            let g = random_graph(&mut rng, 12, &[0.25, 0.5]);
            let nice = nice_of(&g);
            let brute = brute_solutions(&g, &p).unwrap();
            let exists = |range: std::ops::RangeInclusive<usize>| range.into_iter().any(|k| !brute[k].is_zero());
            checks += 1;
            if dp_decide_rep_sets(&g, &nice, &p).unwrap() != exists(0..=g.n()) {
                failures.push(format!("decide {p} graph {i}"));
            }
            for _ in 0..2 {
                let k = rng.gen_range(0..=g.n());
                checks += 2;
                if dp_optimize_rep_sets(&g, &nice, &p, Direction::Min, k).unwrap() != exists(0..=k) {
                    failures.push(format!("min<={k} {p} graph {i}"));
                }
                if dp_optimize_rep_sets(&g, &nice, &p, Direction::Max, k).unwrap() != exists(k..=g.n()) {
                    failures.push(format!("max>={k} {p} graph {i}"));
                }
            }
        }
    }
    Outcome { passed: failures.is_empty(), detail: format!("{checks} checks; failures {failures:?}") }
}

fn classification() -> Outcome {
    let cases = [(("{0}", "{1}"), 2), (("{0,3}", "{3}"), 4), (("{0,3}", "{1,4}"), 5), (("{1,3}", "{4}"), 5), (("{2,4}", "{4}"), 6)];
    let mut wrong = Vec::new();
    for ((s, r), c) in cases {
        let got = pair(s, r).base_constant().unwrap();
        if got != c {
            wrong.push(format!("({s},{r}) gave {got}, expected {c}"));
        }
    }
    Outcome { passed: wrong.is_empty(), detail: format!("{} pairs; wrong {wrong:?}", cases.len()) }
}

fn trivial_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pairs = [("all", "all"), ("{0}", "{0}"), ("{1}", "{0}"), ("{0,2}", "{0}"), ("all", "{0}")];
    let mut failures = Vec::new();
    for i in 0..50 {
        let g = random_graph(&mut rng, 14, &[0.15, 0.3]);
        for (s, r) in pairs {
            let p = pair(s, r);
            let brute: BigUint = brute_solutions(&g, &p).unwrap().into_iter().sum();
            if trivial_count(&g, &p).unwrap() != brute {
                failures.push(format!("graph {i} {p}"));
            }
        }
    }
    Outcome { passed: failures.is_empty(), detail: format!("50 graphs x {} pairs; failures {failures:?}", pairs.len()) }
}

/// Width-`rows` decomposition of a grid split at the middle column, so the
/// two column sweeps meet in a join node.
fn split_grid_decomposition(rows: usize, cols: usize) -> TreeDecomposition {
    let mid = cols / 2;
    let column = |c: usize| (0..rows).map(move |r| r * cols + c);
    let mut bags: Vec<Vec<usize>> = vec![column(mid).collect()];
    let mut edges = Vec::new();
    let sweeps: [Vec<usize>; 2] = [(mid..cols).collect(), (0..=mid).rev().collect()];
    for cols_in_order in sweeps {
        let order: Vec<usize> = cols_in_order.iter().flat_map(|&c| column(c)).collect();
        let mut parent = 0;
        for i in 0..order.len().saturating_sub(rows) {
            let mut bag = order[i..=i + rows].to_vec();
            bag.sort_unstable();
            bags.push(bag);
            edges.push((parent, bags.len() - 1));
            parent = bags.len() - 1;
        }
    }
    TreeDecomposition { bags, edges }
}

fn time_count<J: gendom::dpcore::Joiner<SizeCounts>>(ctx: &DpContext, nice: &NiceTreeDecomposition, joiner: &J) -> (Duration, BigUint) {
    let start = Instant::now();
    let answer = finalize(&ctx.run::<SizeCounts, _>(nice, joiner).unwrap()).unwrap().map_or_else(BigUint::zero, |c| c.total());
    (start.elapsed(), answer)
}

fn bench_sanity() -> Outcome {
    let p = pair("{0}", "{1}");
    let mut rows = Vec::new();
    let mut within = true;
    for len in 1..=10 {
        let g = grid(4, len);
        let td = split_grid_decomposition(4, len);
        td.validate(&g).unwrap();
        let nice = NiceTreeDecomposition::from_td(&td);
        let ctx = DpContext::new(&g, &p).unwrap();
        let (tn, a) = time_count(&ctx, &nice, &NaiveJoiner);
        let (ts, b) = time_count(&ctx, &nice, &StructuredJoiner::default());
        assert_eq!(a, b);
        let ratio = ts.as_secs_f64() / tn.as_secs_f64().max(1e-9);
        within &= ratio <= 2.0 || ts < Duration::from_millis(1);
        rows.push(format!("L={len} width={} ratio={ratio:.2}", nice.width()));
    }
    Outcome { passed: within, detail: rows.join("; ") }
}

fn report(line: &str) {
    // bypasses libtest output capture so the summary always shows
    let mut err = std::io::stderr();
    writeln!(err, "{line}").unwrap();
}

#[test]
fn acceptance_criteria() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 11] = [
        (1, "oracle equivalence, counting", oracle_equivalence_counting, Duration::from_secs(120)),
        (2, "structured join equals naive join", structured_equals_naive, Duration::from_secs(180)),
        (3, "language size bounds", language_bounds, Duration::from_secs(60)),
        (4, "residue relation", residue_relation, Duration::from_secs(60)),
        (5, "convolution", convolution, Duration::from_secs(120)),
        (6, "compression round trip and origins", compression_and_origins, Duration::from_secs(60)),
        (7, "representative sets", representative_sets, Duration::from_secs(120)),
        (8, "representative-set DP", rep_set_dp, Duration::from_secs(120)),
        (9, "classification constants", classification, Duration::from_secs(1)),
        (10, "trivial pairs", trivial_pairs, Duration::from_secs(30)),
        (11, "bench sanity (recorded only)", bench_sanity, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let passed = outcome.passed && elapsed <= budget;
        let verdict = match (passed, id) {
            (true, _) => "PASS",
            (false, 11) => "RECORDED (not within 2x)",
            (false, _) => "FAIL",
        };
        report(&format!(
            "criterion {id} [{name}]: {verdict} in {:.1}s (budget {}s): {}",
            elapsed.as_secs_f64(),
            budget.as_secs(),
            outcome.detail
        ));
        if !passed && id != 11 {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn size_counts_are_trimmed_on_both_paths() {
    // counts from the convolution path carry no trailing zero sizes
    let g = grid(2, 3);
    let p = pair("{0}", "{1}");
    let ctx = DpContext::new(&g, &p).unwrap();
    let nice = nice_of(&g);
    let a = finalize(&ctx.run::<SizeCounts, _>(&nice, &StructuredJoiner::convolving(OriginChoice::default())).unwrap()).unwrap();
    let b = finalize(&ctx.run::<SizeCounts, _>(&nice, &NaiveJoiner).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.map_or(true, |c| c.size_weights().last().map_or(true, |x| !x.is_zero())));
}
