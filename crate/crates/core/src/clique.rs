//! Maximum clique by branch and bound with a greedy coloring bound
//! (the MCQ scheme of Tomita and Seki) on bitset adjacency rows.

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self loop");
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    /// Same vertices, edges exactly where this graph has none.
    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueResult {
    /// Vertices of the best clique found, ascending.
    pub clique: Vec<usize>,
    /// False when the node budget ran out; `clique` is then a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

struct Search<'a> {
    g: &'a Graph,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

fn first_one(set: &[u64]) -> Option<usize> {
    set.iter()
        .position(|&w| w != 0)
        .map(|w| w * 64 + set[w].trailing_zeros() as usize)
}

impl Search<'_> {
    /// Greedy sequential coloring of `cand`; returns vertices ordered by
    /// color with each vertex's color number.
    fn color(&self, cand: &[u64]) -> Vec<(usize, usize)> {
        let mut uncolored = cand.to_vec();
        let mut order = Vec::new();
        let mut color = 0;
        while uncolored.iter().any(|&w| w != 0) {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = first_one(&q) {
                uncolored[v / 64] &= !(1 << (v % 64));
                q[v / 64] &= !(1 << (v % 64));
                for (qw, aw) in q.iter_mut().zip(self.g.row(v)) {
                    *qw &= !aw;
                }
                order.push((v, color));
            }
        }
        order
    }

    fn expand(&mut self, mut cand: Vec<u64>) {
        let order = self.color(&cand);
        for &(v, color) in order.iter().rev() {
            if self.aborted || self.current.len() + color <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.aborted = true;
                return;
            }
            self.current.push(v);
            let next: Vec<u64> = cand.iter().zip(self.g.row(v)).map(|(c, a)| c & a).collect();
            if next.iter().all(|&w| w == 0) {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            cand[v / 64] &= !(1 << (v % 64));
        }
    }
}

/// Maximum clique, exact unless more than `budget` branch nodes are needed.
pub fn max_clique(g: &Graph, budget: u64) -> CliqueResult {
    if g.n == 0 {
        return CliqueResult {
            clique: Vec::new(),
            exact: true,
            nodes: 0,
        };
    }
    let mut all = vec![0u64; g.words];
    for v in 0..g.n {
        all[v / 64] |= 1 << (v % 64);
    }
    let mut s = Search {
        g,
        best: vec![0],
        current: Vec::new(),
        nodes: 0,
        budget,
        aborted: false,
    };
    s.expand(all);
    let mut clique = s.best;
    clique.sort_unstable();
    CliqueResult {
        clique,
        exact: !s.aborted,
        nodes: s.nodes,
    }
}

/// Maximum independent set, as a clique of the complement.
pub fn max_independent_set(g: &Graph, budget: u64) -> CliqueResult {
    max_clique(&g.complement(), budget)
}
