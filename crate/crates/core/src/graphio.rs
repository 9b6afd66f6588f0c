//! Graphs, tree decompositions in PACE-2017 `.gr`/`.td` format, nice
//! decompositions, a min-degree heuristic, and seeded generators.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Simple undirected graph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds from 0-indexed edges; duplicates are merged, loops rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parse(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::Parse(format!("self-loop at vertex {}", u + 1)));
            }
            sets[u].insert(v);
            sets[v].insert(u);
        }
        let adj: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Graph { adj, m })
    }

    /// Parses PACE `.gr` text (1-indexed vertices).
    pub fn parse_gr(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: `{line}`", lineno + 1));
            if tokens[0] == "p" {
                if header.is_some() || tokens.len() != 4 || tokens[1] != "tw" {
                    return Err(bad());
                }
                let n = tokens[2].parse().map_err(|_| bad())?;
                let m = tokens[3].parse().map_err(|_| bad())?;
                header = Some((n, m));
                continue;
            }
            let (n, _) = header.ok_or_else(|| Error::Parse("edge before `p tw` header".into()))?;
            if tokens.len() != 2 {
                return Err(bad());
            }
            let u: usize = tokens[0].parse().map_err(|_| bad())?;
            let v: usize = tokens[1].parse().map_err(|_| bad())?;
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::Parse(format!("line {}: vertex out of range 1..={n}", lineno + 1)));
            }
            edges.push((u - 1, v - 1));
        }
        let (n, m) = header.ok_or_else(|| Error::Parse("missing `p tw` header".into()))?;
        if edges.len() != m {
            return Err(Error::Parse(format!("header declares {m} edges, found {}", edges.len())));
        }
        Graph::from_edges(n, &edges)
    }

    pub fn to_gr(&self) -> String {
        let mut out = format!("p tw {} {}\n", self.n(), self.m);
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// A tree decomposition: bags (sorted, 0-indexed vertices) and tree edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Parses PACE `.td` text and validates it against `g`.
    pub fn parse_td(text: &str, g: &Graph) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: `{line}`", lineno + 1));
            let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
            match tokens[0] {
                "s" => {
                    if header.is_some() || tokens.len() != 5 || tokens[1] != "td" {
                        return Err(bad());
                    }
                    let h = (num(tokens[2])?, num(tokens[3])?, num(tokens[4])?);
                    bags = vec![None; h.0];
                    header = Some(h);
                }
                "b" => {
                    if header.is_none() || tokens.len() < 2 {
                        return Err(bad());
                    }
                    let id = num(tokens[1])?;
                    if id == 0 || id > bags.len() || bags[id - 1].is_some() {
                        return Err(bad());
                    }
                    let mut bag = Vec::new();
                    for t in &tokens[2..] {
                        let v = num(t)?;
                        if v == 0 || v > g.n() {
                            return Err(Error::Parse(format!("line {}: vertex {v} out of range", lineno + 1)));
                        }
                        bag.push(v - 1);
                    }
                    bag.sort_unstable();
                    let len = bag.len();
                    bag.dedup();
                    if bag.len() != len {
                        return Err(Error::Parse(format!("line {}: repeated vertex in bag", lineno + 1)));
                    }
                    bags[id - 1] = Some(bag);
                }
                _ => {
                    if header.is_none() || tokens.len() != 2 {
                        return Err(bad());
                    }
                    let (a, b) = (num(tokens[0])?, num(tokens[1])?);
                    if a == 0 || b == 0 || a > bags.len() || b > bags.len() {
                        return Err(bad());
                    }
                    edges.push((a - 1, b - 1));
                }
            }
        }
        let (_, max_bag, n) = header.ok_or_else(|| Error::Parse("missing `s td` header".into()))?;
        if n != g.n() {
            return Err(Error::Parse(format!("decomposition is for {n} vertices, graph has {}", g.n())));
        }
        let bags: Vec<Vec<usize>> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::Parse(format!("bag {} missing", i + 1))))
            .collect::<Result<_>>()?;
        let td = TreeDecomposition { bags, edges };
        if td.bags.iter().map(Vec::len).max().unwrap_or(0) > max_bag {
            return Err(Error::Parse(format!("a bag exceeds the declared size {max_bag}")));
        }
        td.validate(g)?;
        Ok(td)
    }

    pub fn to_td(&self, n: usize) -> String {
        let max_bag = self.bags.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = format!("s td {} {} {}\n", self.bags.len(), max_bag, n);
        for (i, bag) in self.bags.iter().enumerate() {
            write!(out, "b {}", i + 1).unwrap();
            for v in bag {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            writeln!(out, "{} {}", a + 1, b + 1).unwrap();
        }
        out
    }

    fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Checks that the bags form a tree and satisfy (T.1)-(T.3).
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidDecomposition(msg));
        let nb = self.bags.len();
        if nb == 0 {
            return if g.n() == 0 { Ok(()) } else { invalid("no bags for a non-empty graph".into()) };
        }
        if self.edges.len() != nb - 1 {
            return invalid(format!("{} tree edges for {nb} bags", self.edges.len()));
        }
        let adj = self.tree_adjacency();
        if reachable(&adj, 0, |_| true).iter().filter(|&&r| r).count() != nb {
            return invalid("bags do not form a connected tree".into());
        }
        let mut holders = vec![Vec::new(); g.n()];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                holders[v].push(i);
            }
        }
        for (v, hs) in holders.iter().enumerate() {
            if hs.is_empty() {
                return invalid(format!("vertex {} is in no bag", v + 1));
            }
        }
        for (u, v) in g.edges() {
            if !holders[u].iter().any(|&i| self.bags[i].binary_search(&v).is_ok()) {
                return invalid(format!("edge ({},{}) is not covered", u + 1, v + 1));
            }
        }
        for (v, hs) in holders.iter().enumerate() {
            let seen = reachable(&adj, hs[0], |i| self.bags[i].binary_search(&v).is_ok());
            if let Some(&lost) = hs.iter().find(|&&i| !seen[i]) {
                return invalid(format!(
                    "bags containing vertex {} are disconnected (bag {} unreachable from bag {})",
                    v + 1,
                    lost + 1,
                    hs[0] + 1
                ));
            }
        }
        Ok(())
    }

    /// A single bag holding every vertex.
    pub fn trivial(g: &Graph) -> Self {
        TreeDecomposition { bags: vec![(0..g.n()).collect()], edges: Vec::new() }
    }

    /// Min-degree elimination ordering; ties go to the lowest vertex.
    pub fn min_degree(g: &Graph) -> Self {
        let n = g.n();
        if n == 0 {
            return TreeDecomposition { bags: Vec::new(), edges: Vec::new() };
        }
        let mut fill: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
        let mut eliminated = vec![false; n];
        let mut position = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut bags = Vec::with_capacity(n);
        for step in 0..n {
            let v = (0..n).filter(|&v| !eliminated[v]).min_by_key(|&v| (fill[v].len(), v)).unwrap();
            let nb: Vec<usize> = fill[v].iter().copied().collect();
            for (i, &a) in nb.iter().enumerate() {
                fill[a].remove(&v);
                for &b in &nb[i + 1..] {
                    fill[a].insert(b);
                    fill[b].insert(a);
                }
            }
            let mut bag = nb;
            bag.push(v);
            bag.sort_unstable();
            bags.push(bag);
            eliminated[v] = true;
            position[v] = step;
            order.push(v);
        }
        let mut edges = Vec::with_capacity(n - 1);
        for (step, &v) in order.iter().enumerate().take(n - 1) {
            let parent = bags[step]
                .iter()
                .filter(|&&u| u != v)
                .map(|&u| position[u])
                .min()
                .unwrap_or(step + 1);
            edges.push((step, parent));
        }
        TreeDecomposition { bags, edges }
    }
}

fn reachable(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(a) = stack.pop() {
        for &b in &adj[a] {
            if !seen[b] && allowed(b) {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted vertices.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nodes are stored children-first; the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|t| t.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Converts a valid decomposition, rooted at its first bag.
    pub fn from_td(td: &TreeDecomposition) -> Self {
        let mut builder = NiceBuilder { nodes: Vec::new() };
        if td.bags.is_empty() {
            builder.push(NodeKind::Leaf, Vec::new(), Vec::new());
            return NiceTreeDecomposition { nodes: builder.nodes };
        }
        let adj = td.tree_adjacency();
        // iterative post-order over the decomposition tree
        let mut parent = vec![usize::MAX; td.bags.len()];
        let mut order = Vec::with_capacity(td.bags.len());
        let mut stack = vec![0];
        parent[0] = 0;
        while let Some(a) = stack.pop() {
            order.push(a);
            for &b in &adj[a] {
                if parent[b] == usize::MAX {
                    parent[b] = a;
                    stack.push(b);
                }
            }
        }
        let mut top = vec![usize::MAX; td.bags.len()];
        for &a in order.iter().rev() {
            let bag = &td.bags[a];
            let mut branches: Vec<usize> = adj[a]
                .iter()
                .filter(|&&b| b != a && parent[b] == a)
                .map(|&b| builder.transition(top[b], bag))
                .collect();
            if branches.is_empty() {
                let leaf = builder.push(NodeKind::Leaf, Vec::new(), Vec::new());
                branches.push(builder.transition(leaf, bag));
            }
            let mut acc = branches[0];
            for &b in &branches[1..] {
                acc = builder.push(NodeKind::Join, bag.clone(), vec![acc, b]);
            }
            top[a] = acc;
        }
        builder.transition(top[0], &[]);
        NiceTreeDecomposition { nodes: builder.nodes }
    }

    /// Checks every nice-decomposition invariant, plus (T.1)-(T.3) against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidDecomposition(msg));
        if self.nodes.is_empty() {
            return invalid("no nodes".into());
        }
        let mut has_parent = vec![false; self.nodes.len()];
        for (i, t) in self.nodes.iter().enumerate() {
            if !t.bag.windows(2).all(|w| w[0] < w[1]) {
                return invalid(format!("node {i}: bag not sorted"));
            }
            for &c in &t.children {
                if c >= i || has_parent[c] {
                    return invalid(format!("node {i}: bad child {c}"));
                }
                has_parent[c] = true;
            }
            let child_bag = |k: usize| &self.nodes[t.children[k]].bag;
            let ok = match t.kind {
                NodeKind::Leaf => t.children.is_empty() && t.bag.is_empty(),
                NodeKind::Introduce(v) => {
                    t.children.len() == 1 && child_bag(0).binary_search(&v).is_err() && {
                        let mut b = child_bag(0).clone();
                        b.push(v);
                        b.sort_unstable();
                        b == t.bag
                    }
                }
                NodeKind::Forget(v) => {
                    t.children.len() == 1
                        && child_bag(0).binary_search(&v).is_ok()
                        && child_bag(0).iter().filter(|&&u| u != v).eq(t.bag.iter())
                }
                NodeKind::Join => t.children.len() == 2 && child_bag(0) == &t.bag && child_bag(1) == &t.bag,
            };
            if !ok {
                return invalid(format!("node {i}: malformed {:?}", t.kind));
            }
        }
        if has_parent.iter().filter(|&&p| !p).count() != 1 || has_parent[self.root()] {
            return invalid("nodes do not form a single tree rooted at the last node".into());
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return invalid("root bag is not empty".into());
        }
        let mut forgotten = vec![0usize; g.n()];
        for t in &self.nodes {
            if let NodeKind::Forget(v) = t.kind {
                forgotten[v] += 1;
            }
        }
        if let Some(v) = forgotten.iter().position(|&c| c != 1) {
            return invalid(format!("vertex {} forgotten {} times", v + 1, forgotten[v]));
        }
        let td = TreeDecomposition {
            bags: self.nodes.iter().map(|t| t.bag.clone()).collect(),
            edges: self
                .nodes
                .iter()
                .enumerate()
                .flat_map(|(i, t)| t.children.iter().map(move |&c| (c, i)))
                .collect(),
        };
        td.validate(g)
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Forget then introduce vertices until the bag of `from` equals `target`.
    fn transition(&mut self, from: usize, target: &[usize]) -> usize {
        let mut cur = from;
        let mut bag = self.nodes[from].bag.clone();
        let keep: HashSet<usize> = target.iter().copied().collect();
        for v in bag.clone() {
            if !keep.contains(&v) {
                bag.retain(|&u| u != v);
                cur = self.push(NodeKind::Forget(v), bag.clone(), vec![cur]);
            }
        }
        for &v in target {
            if bag.binary_search(&v).is_err() {
                bag.push(v);
                bag.sort_unstable();
                cur = self.push(NodeKind::Introduce(v), bag.clone(), vec![cur]);
            }
        }
        cur
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphModel {
    Gnp(f64),
    Path,
    Cycle,
    /// Rows; columns are `n / rows`.
    Grid(usize),
    Tree,
}

/// Deterministic random or structured graph for a given seed.
pub fn generate(n: usize, model: GraphModel, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    match model {
        GraphModel::Gnp(p) => {
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
        GraphModel::Path => edges.extend((1..n).map(|v| (v - 1, v))),
        GraphModel::Cycle => {
            edges.extend((1..n).map(|v| (v - 1, v)));
            if n >= 3 {
                edges.push((n - 1, 0));
            }
        }
        GraphModel::Grid(rows) => return grid(rows, n / rows.max(1)),
        GraphModel::Tree => edges.extend((1..n).map(|v| (rng.gen_range(0..v), v))),
    }
    Graph::from_edges(n, &edges).expect("generated edges are in range")
}

/// `rows × cols` grid, vertex `(r, c)` numbered `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges).expect("grid edges are in range")
}

/// Path decomposition of a `rows × cols` grid sweeping column-major, width `rows`.
pub fn grid_decomposition(rows: usize, cols: usize) -> TreeDecomposition {
    let order: Vec<usize> = (0..cols).flat_map(|c| (0..rows).map(move |r| r * cols + c)).collect();
    let mut bags = Vec::new();
    for i in 0..order.len().saturating_sub(rows) {
        let mut bag: Vec<usize> = order[i..=i + rows].to_vec();
        bag.sort_unstable();
        bags.push(bag);
    }
    if bags.is_empty() {
        bags.push((0..rows * cols).collect());
    }
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    TreeDecomposition { bags, edges }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn parse_gr_examples() {
        let g = Graph::parse_gr("p tw 2 1\n1 2\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        let g = Graph::parse_gr("c triangle\np tw 3 3\n1 2\n2 3\n1 3\n").unwrap();
        assert_eq!(g, k(3));
        let g = Graph::parse_gr("p tw 3 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 0));
        assert!(Graph::parse_gr("p tw 2 1\n1 3\n").is_err());
        assert!(Graph::parse_gr("p tw 2 2\n1 2\n").is_err());
        assert!(Graph::parse_gr("p tw 2 1\n1 1\n").is_err());
        assert!(Graph::parse_gr("1 2\n").is_err());
        let dup = Graph::parse_gr("p tw 2 2\n1 2\n2 1\n").unwrap();
        assert_eq!(dup.m(), 1);
    }

    #[test]
    fn gr_round_trip() {
        let g = generate(9, GraphModel::Gnp(0.4), 3);
        assert_eq!(Graph::parse_gr(&g.to_gr()).unwrap(), g);
    }

    #[test]
    fn parse_td_examples() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n", &p3).unwrap();
        assert_eq!(td.width(), 1);
        let td = TreeDecomposition::parse_td("s td 1 3 3\nb 1 1 2 3\n", &k(3)).unwrap();
        assert_eq!(td.width(), 2);
        let err = TreeDecomposition::parse_td("s td 2 1 2\nb 1 1\nb 2 2\n1 2\n", &k(2)).unwrap_err();
        assert_eq!(err, Error::InvalidDecomposition("edge (1,2) is not covered".into()));
    }

    #[test]
    fn disconnected_vertex_trace_is_reported() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let text = "s td 3 2 3\nb 1 1 2\nb 2 2 3\nb 3 1\n1 2\n2 3\n";
        let err = TreeDecomposition::parse_td(text, &p3).unwrap_err();
        assert!(matches!(err, Error::InvalidDecomposition(ref m) if m.contains("vertex 1")), "{err}");
    }

    #[test]
    fn nice_from_single_bag() {
        let g = Graph::empty(1);
        let nice = NiceTreeDecomposition::from_td(&TreeDecomposition::trivial(&g));
        let kinds: Vec<NodeKind> = nice.nodes.iter().map(|t| t.kind).collect();
        assert_eq!(kinds, vec![NodeKind::Leaf, NodeKind::Introduce(0), NodeKind::Forget(0)]);
        nice.validate(&g).unwrap();
    }

    #[test]
    fn nice_preserves_width() {
        for seed in 0..100 {
            let n = 1 + (seed as usize % 20);
            let p = if seed % 2 == 0 { 0.2 } else { 0.5 };
            let g = generate(n, GraphModel::Gnp(p), seed);
            let td = TreeDecomposition::min_degree(&g);
            td.validate(&g).unwrap();
            let nice = NiceTreeDecomposition::from_td(&td);
            nice.validate(&g).unwrap();
            assert_eq!(nice.width(), td.width());
        }
    }

    #[test]
    fn nice_has_joins_for_branching_trees() {
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let td = TreeDecomposition::parse_td(
            "s td 4 2 4\nb 1 1\nb 2 1 2\nb 3 1 3\nb 4 1 4\n1 2\n1 3\n1 4\n",
            &star,
        )
        .unwrap();
        let nice = NiceTreeDecomposition::from_td(&td);
        nice.validate(&star).unwrap();
        assert_eq!(nice.nodes.iter().filter(|t| t.kind == NodeKind::Join).count(), 2);
    }

    #[test]
    fn heuristic_examples() {
        let tree = generate(5, GraphModel::Tree, 11);
        assert_eq!(TreeDecomposition::min_degree(&tree).width(), 1);
        assert_eq!(TreeDecomposition::min_degree(&k(4)).width(), 3);
        let c5 = generate(5, GraphModel::Cycle, 0);
        let td = TreeDecomposition::min_degree(&c5);
        td.validate(&c5).unwrap();
        assert_eq!(td.width(), 2);
        let empty = Graph::empty(0);
        let nice = NiceTreeDecomposition::from_td(&TreeDecomposition::min_degree(&empty));
        nice.validate(&empty).unwrap();
    }

    #[test]
    fn td_round_trip() {
        let g = generate(12, GraphModel::Gnp(0.3), 5);
        let td = TreeDecomposition::min_degree(&g);
        assert_eq!(TreeDecomposition::parse_td(&td.to_td(g.n()), &g).unwrap(), td);
    }

    #[test]
    fn generators() {
        assert_eq!(generate(8, GraphModel::Gnp(0.5), 7), generate(8, GraphModel::Gnp(0.5), 7));
        let g = grid(3, 3);
        assert_eq!((g.n(), g.m()), (9, 12));
        assert_eq!(generate(6, GraphModel::Path, 0).m(), 5);
        assert_eq!(generate(6, GraphModel::Cycle, 0).m(), 6);
        for cols in 1..6 {
            let g = grid(4, cols);
            let td = grid_decomposition(4, cols);
            td.validate(&g).unwrap();
            assert!(td.width() <= 4);
        }
    }
}
