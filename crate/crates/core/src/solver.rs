//! One entry point over all algorithms, with automatic dispatch.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::dpcore::{finalize, DpContext, Joiner, NaiveJoiner};
use crate::error::{Error, Result};
use crate::graphio::{Graph, NiceTreeDecomposition, TreeDecomposition};
use crate::oracle::brute_solutions;
use crate::repsets::{dp_decide_rep_sets, dp_optimum_rep_sets, Direction};
use crate::setspec::{trivial_size_counts, ProblemPair};
use crate::states::{Annotation, MaxSize, MinSize, SizeCounts};
use crate::structured::StructuredJoiner;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    Auto,
    Naive,
    Structured,
    RepSet,
    Brute,
    /// Closed-form counting for trivial pairs; chosen by `Auto` only.
    Trivial,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Naive => "naive",
            Algorithm::Structured => "structured",
            Algorithm::RepSet => "repset",
            Algorithm::Brute => "brute",
            Algorithm::Trivial => "trivial",
        }
    }

    /// Whether this algorithm can answer `mode` for `pair`.
    pub fn supports(self, pair: &ProblemPair, mode: Mode) -> bool {
        match self {
            Algorithm::Auto | Algorithm::Naive | Algorithm::Brute => true,
            Algorithm::Structured => pair.both_finite() && pair.m_max.at_least(2),
            Algorithm::RepSet => !matches!(mode, Mode::Count(_)),
            Algorithm::Trivial => pair.is_trivial(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Algorithm::Auto,
            "naive" => Algorithm::Naive,
            "structured" => Algorithm::Structured,
            "repset" => Algorithm::RepSet,
            "brute" => Algorithm::Brute,
            _ => return Err(Error::Parse(format!("unknown algorithm {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Decide,
    /// Number of solutions of the given size, or of any size.
    Count(Option<usize>),
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Decision(bool),
    Count(BigUint),
    /// Extremal solution size; `None` if there is no solution.
    Optimum(Option<usize>),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Decision(true) => f.write_str("yes"),
            Answer::Decision(false) => f.write_str("no"),
            Answer::Count(c) => write!(f, "{c}"),
            Answer::Optimum(Some(k)) => write!(f, "{k}"),
            Answer::Optimum(None) => f.write_str("none"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub answer: Answer,
    pub algorithm: Algorithm,
    pub width: usize,
    pub node_count: usize,
}

fn answer_from_counts(counts: &[BigUint], mode: Mode) -> Answer {
    let nonzero = || counts.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, _)| k);
    match mode {
        Mode::Decide => Answer::Decision(nonzero().next().is_some()),
        Mode::Count(None) => Answer::Count(counts.iter().sum()),
        Mode::Count(Some(k)) => Answer::Count(counts.get(k).cloned().unwrap_or_default()),
        Mode::Min => Answer::Optimum(nonzero().next()),
        Mode::Max => Answer::Optimum(nonzero().next_back()),
    }
}

/// The algorithm `Auto` runs for this pair and mode.
pub fn dispatch(pair: &ProblemPair, mode: Mode) -> Algorithm {
    if pair.is_trivial() {
        Algorithm::Trivial
    } else if Algorithm::Structured.supports(pair, mode) {
        Algorithm::Structured
    } else if !pair.both_finite() && Algorithm::RepSet.supports(pair, mode) {
        Algorithm::RepSet
    } else {
        Algorithm::Naive
    }
}

fn table_dp<A: Annotation, J: Joiner<A>>(
    g: &Graph,
    nice: &NiceTreeDecomposition,
    pair: &ProblemPair,
    joiner: &J,
) -> Result<Option<A>> {
    let ctx = DpContext::new(g, pair)?;
    finalize(&ctx.run(nice, joiner)?)
}

fn run_tables<J>(g: &Graph, nice: &NiceTreeDecomposition, pair: &ProblemPair, mode: Mode, joiner: &J) -> Result<Answer>
where
    J: Joiner<()> + Joiner<SizeCounts> + Joiner<MinSize> + Joiner<MaxSize>,
{
    Ok(match mode {
        Mode::Decide => Answer::Decision(table_dp::<(), _>(g, nice, pair, joiner)?.is_some()),
        Mode::Count(_) => {
            let counts = table_dp::<SizeCounts, _>(g, nice, pair, joiner)?.map_or_else(Vec::new, |c| c.0);
            answer_from_counts(&counts, mode)
        }
        Mode::Min => Answer::Optimum(table_dp::<MinSize, _>(g, nice, pair, joiner)?.map(|a| a.0)),
        Mode::Max => Answer::Optimum(table_dp::<MaxSize, _>(g, nice, pair, joiner)?.map(|a| a.0)),
    })
}

/// Solves on a nice decomposition of `g`.
pub fn solve_nice(
    g: &Graph,
    nice: &NiceTreeDecomposition,
    pair: &ProblemPair,
    mode: Mode,
    algorithm: Algorithm,
) -> Result<Solution> {
    if pair.sigma.is_empty() || pair.rho.is_empty() {
        return Err(Error::EmptySet);
    }
    let algorithm = if algorithm == Algorithm::Auto { dispatch(pair, mode) } else { algorithm };
    if !algorithm.supports(pair, mode) {
        return Err(Error::NotApplicable(format!("{algorithm} cannot answer {mode:?} for {pair}")));
    }
    let answer = match algorithm {
        Algorithm::Auto => unreachable!("resolved above"),
        Algorithm::Trivial => answer_from_counts(&trivial_size_counts(g, pair)?, mode),
        Algorithm::Brute => answer_from_counts(&brute_solutions(g, pair)?, mode),
        Algorithm::Naive => run_tables(g, nice, pair, mode, &NaiveJoiner)?,
        Algorithm::Structured => run_tables(g, nice, pair, mode, &StructuredJoiner::default())?,
        Algorithm::RepSet => match mode {
            Mode::Decide => Answer::Decision(dp_decide_rep_sets(g, nice, pair)?),
            Mode::Min => Answer::Optimum(dp_optimum_rep_sets(g, nice, pair, Direction::Min)?),
            Mode::Max => Answer::Optimum(dp_optimum_rep_sets(g, nice, pair, Direction::Max)?),
            Mode::Count(_) => unreachable!("rejected by supports"),
        },
    };
    Ok(Solution { answer, algorithm, width: nice.width(), node_count: nice.len() })
}

/// Solves with the given decomposition, or a min-degree heuristic one.
pub fn solve(
    g: &Graph,
    td: Option<&TreeDecomposition>,
    pair: &ProblemPair,
    mode: Mode,
    algorithm: Algorithm,
) -> Result<Solution> {
    let heuristic;
    let td = match td {
        Some(td) => {
            td.validate(g)?;
            td
        }
        None => {
            heuristic = TreeDecomposition::min_degree(g);
            &heuristic
        }
    };
    solve_nice(g, &NiceTreeDecomposition::from_td(td), pair, mode, algorithm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphio::{generate, GraphModel};

    fn pair(s: &str, r: &str) -> ProblemPair {
        ProblemPair::parse(s, r).unwrap()
    }

    fn run(g: &Graph, p: &ProblemPair, mode: Mode, algo: Algorithm) -> Answer {
        solve(g, None, p, mode, algo).unwrap().answer
    }

    #[test]
    fn small_examples() {
        let k2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(run(&k2, &pair("{0}", "{1}"), Mode::Count(None), Algorithm::Auto), Answer::Count(2u32.into()));
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(run(&k3, &pair("all", ">=1"), Mode::Min, Algorithm::Auto), Answer::Optimum(Some(1)));
        assert_eq!(run(&k3, &pair("all", ">=1"), Mode::Count(None), Algorithm::Auto), Answer::Count(7u32.into()));
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(run(&p3, &pair("{0}", "all"), Mode::Count(Some(2)), Algorithm::Auto), Answer::Count(1u32.into()));
    }

    #[test]
    fn dispatch_follows_the_regimes() {
        assert_eq!(dispatch(&pair("all", "all"), Mode::Decide), Algorithm::Trivial);
        assert_eq!(dispatch(&pair("{1,2}", "{0}"), Mode::Max), Algorithm::Trivial);
        assert_eq!(dispatch(&pair("{0}", "{1}"), Mode::Decide), Algorithm::Structured);
        assert_eq!(dispatch(&pair("all", ">=1"), Mode::Min), Algorithm::RepSet);
        assert_eq!(dispatch(&pair("all", ">=1"), Mode::Count(None)), Algorithm::Naive);
        assert_eq!(dispatch(&pair("{0,1}", "{1,2}"), Mode::Decide), Algorithm::Naive);
    }

    #[test]
    fn unsupported_combinations_are_rejected() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let err = solve(&g, None, &pair("all", ">=1"), Mode::Decide, Algorithm::Structured).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
        let err = solve(&g, None, &pair("{0}", "{1}"), Mode::Count(None), Algorithm::RepSet).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
    }

    #[test]
    fn every_applicable_algorithm_agrees() {
        let pairs = [("{0}", "{1}"), ("{0}", "all"), ("all", ">=1"), ("{0,3}", "{3}"), ("{1}", "{1}"), ("all", "all"), ("{0,2}", "{0}")];
        let modes = [Mode::Decide, Mode::Count(None), Mode::Count(Some(3)), Mode::Min, Mode::Max];
        for seed in 0..8 {
            let g = generate(9, GraphModel::Gnp(0.3), seed);
            for (s, r) in pairs {
                let p = pair(s, r);
                for mode in modes {
                    let expected = run(&g, &p, mode, Algorithm::Brute);
                    for algo in [Algorithm::Auto, Algorithm::Naive, Algorithm::Structured, Algorithm::RepSet] {
                        if algo.supports(&p, mode) {
                            assert_eq!(run(&g, &p, mode, algo), expected, "{algo} {p} {mode:?} seed {seed}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn empty_sets_are_rejected() {
        let g = Graph::empty(2);
        let err = ProblemPair::new(crate::setspec::DegreeSet::empty(), "{0}".parse().unwrap()).unwrap_err();
        assert_eq!(err, Error::EmptySet);
        let mut p = pair("{0}", "{1}");
        p.rho = crate::setspec::DegreeSet::empty();
        assert_eq!(solve(&g, None, &p, Mode::Decide, Algorithm::Auto).unwrap_err(), Error::EmptySet);
    }
}
