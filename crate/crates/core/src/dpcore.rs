//! Bottom-up dynamic programming over a nice tree decomposition with
//! residue-class partitioned tables.

use crate::error::{Error, Result};
use crate::graphio::{Graph, NiceNode, NiceTreeDecomposition, NodeKind};
use crate::setspec::ProblemPair;
use crate::states::{combine_languages_naive, Alphabet, Annotation, Language, Side, State, StateString};

/// `L_{t,i}` for every residue class `i` of a node.
#[derive(Clone, Debug, PartialEq)]
pub struct DpTable<A> {
    pub bag: Vec<usize>,
    pub classes: Vec<Language<A>>,
}

impl<A: Annotation> DpTable<A> {
    pub fn total_len(&self) -> usize {
        self.classes.iter().map(Language::len).sum()
    }

    fn empty_like(bag: Vec<usize>, m: usize) -> Self {
        let classes = (0..m).map(|_| Language::new(bag.len())).collect();
        DpTable { bag, classes }
    }
}

/// Strategy for `L1 ⊕ L2` at join nodes.
pub trait Joiner<A: Annotation>: Sync {
    fn join(&self, l1: &Language<A>, l2: &Language<A>, alphabet: &Alphabet, m: usize) -> Result<Language<A>>;

    fn name(&self) -> &'static str;
}

pub struct NaiveJoiner;

impl<A: Annotation> Joiner<A> for NaiveJoiner {
    fn join(&self, l1: &Language<A>, l2: &Language<A>, alphabet: &Alphabet, _m: usize) -> Result<Language<A>> {
        combine_languages_naive(l1, l2, alphabet)
    }

    fn name(&self) -> &'static str {
        "naive"
    }
}

/// Shared per-run parameters of the table DP.
#[derive(Clone, Debug)]
pub struct DpContext<'a> {
    pub graph: &'a Graph,
    pub pair: &'a ProblemPair,
    pub alphabet: Alphabet,
    /// Number of residue classes.
    pub m: usize,
}

impl<'a> DpContext<'a> {
    pub fn new(graph: &'a Graph, pair: &'a ProblemPair) -> Result<Self> {
        if pair.sigma.is_empty() || pair.rho.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(DpContext { graph, pair, alphabet: Alphabet::for_pair(pair), m: pair.residue_modulus() })
    }

    pub fn with_modulus(mut self, m: usize) -> Self {
        assert!(m >= 1);
        self.m = m;
        self
    }

    fn happy(&self, a: State) -> bool {
        self.pair.set(a.side).contains(a.count)
    }

    pub fn leaf<A: Annotation>(&self) -> DpTable<A> {
        let mut t = DpTable::empty_like(Vec::new(), self.m);
        t.classes[0].insert(StateString::empty(), A::unit());
        t
    }

    pub fn forget<A: Annotation>(&self, table: &DpTable<A>, v: usize) -> Result<DpTable<A>> {
        let pos = position(&table.bag, v)?;
        let mut bag = table.bag.clone();
        bag.remove(pos);
        let mut out = DpTable::empty_like(bag, self.m);
        for (i, lang) in table.classes.iter().enumerate() {
            for (x, a) in lang.iter() {
                let st = x.states()[pos];
                if !self.happy(st) {
                    continue;
                }
                match st.side {
                    Side::Rho => out.classes[i].insert(x.without(pos), a.clone()),
                    Side::Sigma => out.classes[(i + 1) % self.m].insert(x.without(pos), a.shifted()),
                }
            }
        }
        Ok(out)
    }

    pub fn introduce<A: Annotation>(&self, table: &DpTable<A>, v: usize) -> Result<DpTable<A>> {
        if table.bag.binary_search(&v).is_ok() {
            return Err(Error::InvalidDecomposition(format!("vertex {} introduced twice", v + 1)));
        }
        let pos = table.bag.partition_point(|&u| u < v);
        let mut bag = table.bag.clone();
        bag.insert(pos, v);
        let nbrs: Vec<usize> =
            table.bag.iter().enumerate().filter(|(_, &u)| self.graph.has_edge(u, v)).map(|(i, _)| i).collect();
        let mut out = DpTable::empty_like(bag, self.m);
        for (i, lang) in table.classes.iter().enumerate() {
            for (y, a) in lang.iter() {
                let k = nbrs.iter().filter(|&&p| y.states()[p].is_sigma()).count();
                if let Some(c) = self.alphabet.fit(Side::Rho, k) {
                    let mut s = y.states().to_vec();
                    s.insert(pos, State::rho(c));
                    out.classes[i].insert(StateString(s), a.clone());
                }
                let Some(c) = self.alphabet.fit(Side::Sigma, k) else { continue };
                let mut s = y.states().to_vec();
                let mut ok = true;
                for &p in &nbrs {
                    match self.alphabet.fit(s[p].side, s[p].count + 1) {
                        Some(c) => s[p].count = c,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    s.insert(pos, State::sigma(c));
                    out.classes[i].insert(StateString(s), a.clone());
                }
            }
        }
        Ok(out)
    }

    /// `x̂`: removes from every position the σ-neighbours inside the bag.
    /// Saturated states of a cofinite side stay saturated.
    pub fn join_adjust<A: Annotation>(&self, table: &DpTable<A>) -> Result<DpTable<A>> {
        let bag = &table.bag;
        let bag_nbrs: Vec<Vec<usize>> = bag
            .iter()
            .map(|&u| (0..bag.len()).filter(|&q| self.graph.has_edge(u, bag[q])).collect())
            .collect();
        let mut out = DpTable::empty_like(bag.clone(), self.m);
        for (i, lang) in table.classes.iter().enumerate() {
            for (x, a) in lang.iter() {
                let mut s = x.states().to_vec();
                for (p, st) in s.iter_mut().enumerate() {
                    if self.alphabet.is_saturated(*st) {
                        continue;
                    }
                    let d = bag_nbrs[p].iter().filter(|&&q| x.states()[q].is_sigma()).count();
                    st.count = st.count.checked_sub(d).ok_or_else(|| {
                        Error::Invariant(format!("join adjustment underflow at position {p} of {x}"))
                    })?;
                }
                out.classes[i].insert(StateString(s), a.clone());
            }
        }
        Ok(out)
    }

    /// `L_{t,i} = ⋃_j L̂_{t1,j} ⊕ L_{t2,i−j}`; `adjusted` must come from `join_adjust`.
    pub fn join<A: Annotation, J: Joiner<A> + ?Sized>(
        &self,
        adjusted: &DpTable<A>,
        other: &DpTable<A>,
        joiner: &J,
    ) -> Result<DpTable<A>> {
        if adjusted.bag != other.bag {
            return Err(Error::InvalidDecomposition("join children have different bags".into()));
        }
        let mut out = DpTable::empty_like(adjusted.bag.clone(), self.m);
        for (j, l1) in adjusted.classes.iter().enumerate() {
            if l1.is_empty() {
                continue;
            }
            for (k, l2) in other.classes.iter().enumerate() {
                if l2.is_empty() {
                    continue;
                }
                let joined = joiner.join(l1, l2, &self.alphabet, self.m)?;
                let target = &mut out.classes[(j + k) % self.m];
                for (z, a) in joined.into_entries() {
                    target.insert(z, a);
                }
            }
        }
        Ok(out)
    }

    /// Runs the DP and returns the root table.
    pub fn run<A: Annotation, J: Joiner<A> + ?Sized>(
        &self,
        nice: &NiceTreeDecomposition,
        joiner: &J,
    ) -> Result<DpTable<A>> {
        self.run_observed(nice, joiner, &mut |_, _, _| Ok(()))
    }

    /// Like `run`, calling `observe(node index, node, table)` after every node.
    pub fn run_observed<A, J, F>(&self, nice: &NiceTreeDecomposition, joiner: &J, observe: &mut F) -> Result<DpTable<A>>
    where
        A: Annotation,
        J: Joiner<A> + ?Sized,
        F: FnMut(usize, &NiceNode, &DpTable<A>) -> Result<()>,
    {
        let mut pending: Vec<Option<DpTable<A>>> = vec![None; nice.len()];
        for (idx, node) in nice.nodes.iter().enumerate() {
            let mut take = |c: usize| pending[c].take().ok_or_else(|| Error::Invariant(format!("missing table {c}")));
            let table = match node.kind {
                NodeKind::Leaf => self.leaf(),
                NodeKind::Introduce(v) => self.introduce(&take(node.children[0])?, v)?,
                NodeKind::Forget(v) => self.forget(&take(node.children[0])?, v)?,
                NodeKind::Join => {
                    let left = take(node.children[0])?;
                    let right = take(node.children[1])?;
                    self.join(&self.join_adjust(&left)?, &right, joiner)?
                }
            };
            if cfg!(debug_assertions) {
                self.check_bound(&table)?;
            }
            observe(idx, node, &table)?;
            pending[idx] = Some(table);
        }
        pending[nice.root()].take().ok_or_else(|| Error::Invariant("no root table".into()))
    }

    /// Per-class size bound for structured pairs.
    pub fn check_bound<A: Annotation>(&self, table: &DpTable<A>) -> Result<()> {
        if self.m < 2 || !self.pair.both_finite() {
            return Ok(());
        }
        let bound = self.pair.language_bound(self.m, table.bag.len());
        for (i, lang) in table.classes.iter().enumerate() {
            if lang.len() as u128 > bound {
                return Err(Error::Invariant(format!(
                    "class {i} holds {} strings, bound is {bound}",
                    lang.len()
                )));
            }
        }
        Ok(())
    }
}

fn position(bag: &[usize], v: usize) -> Result<usize> {
    bag.binary_search(&v)
        .map_err(|_| Error::InvalidDecomposition(format!("vertex {} not in bag", v + 1)))
}

/// Merges the empty string's annotations over all classes of a root table.
pub fn finalize<A: Annotation>(root: &DpTable<A>) -> Result<Option<A>> {
    if !root.bag.is_empty() {
        return Err(Error::InvalidDecomposition("root bag is not empty".into()));
    }
    let mut acc: Option<A> = None;
    for lang in &root.classes {
        if let Some(a) = lang.get(&StateString::empty()) {
            match &mut acc {
                Some(x) => x.merge(a),
                None => acc = Some(a.clone()),
            }
        }
    }
    Ok(acc)
}
