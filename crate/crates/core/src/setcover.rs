//! Minimum set cover over point sets.
//!
//! Greedy picks the candidate with the largest uncovered gain (lowest id
//! on ties). The exact solver is a branch and bound over at most 128
//! target elements: it branches on the uncovered element with the fewest
//! covering candidates and prunes with two lower bounds (an independent
//! set of elements that share no candidate, and uncovered / largest gain).

use crate::pointset::PointSet;

/// Largest target the exact solver accepts.
pub const EXACT_LIMIT: usize = 128;

/// Default branch-and-bound node cap.
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSolution {
    /// Candidate ids, ascending.
    pub chosen: Vec<usize>,
    /// True when optimality was proved within the node budget.
    pub exact: bool,
}

/// Greedy cover of `target` by `(id, set)` candidates, or `None` when the
/// candidates do not cover it.
pub fn greedy_cover(target: &PointSet, candidates: &[(usize, PointSet)]) -> Option<Vec<usize>> {
    let mut uncovered = target.clone();
    let mut chosen = Vec::new();
    let mut used = vec![false; candidates.len()];
    while !uncovered.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (gain, position)
        for (pos, (id, set)) in candidates.iter().enumerate() {
            if used[pos] {
                continue;
            }
            let gain = set.intersection_len(&uncovered);
            let better = match best {
                None => gain > 0,
                Some((g, bp)) => gain > g || (gain == g && gain > 0 && *id < candidates[bp].0),
            };
            if better {
                best = Some((gain, pos));
            }
        }
        let (_, pos) = best?;
        used[pos] = true;
        uncovered.difference_with(&candidates[pos].1);
        chosen.push(candidates[pos].0);
    }
    chosen.sort_unstable();
    Some(chosen)
}

struct Search<'a> {
    masks: &'a [u128],
    /// For every element, the candidates (indices into `masks`) covering it.
    covering: Vec<Vec<usize>>,
    max_gain: u32,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    fn lower_bound(&self, uncovered: u128) -> usize {
        let by_size = uncovered.count_ones().div_ceil(self.max_gain) as usize;
        let mut blocked = 0u128;
        let mut independent = 0;
        let mut rest = uncovered;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if blocked >> e & 1 == 1 {
                continue;
            }
            independent += 1;
            for &c in &self.covering[e] {
                blocked |= self.masks[c];
            }
        }
        by_size.max(independent)
    }

    fn run(&mut self, uncovered: u128) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if uncovered == 0 {
            if self.current.len() < self.best.len() {
                self.best = self.current.clone();
            }
            return;
        }
        if self.current.len() + self.lower_bound(uncovered) >= self.best.len() {
            return;
        }
        let mut rest = uncovered;
        let mut pick = usize::MAX;
        let mut fewest = usize::MAX;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let k = self.covering[e].len();
            if k < fewest {
                fewest = k;
                pick = e;
            }
        }
        let mut options = self.covering[pick].clone();
        options.sort_by_key(|&c| std::cmp::Reverse((self.masks[c] & uncovered).count_ones()));
        for c in options {
            self.current.push(c);
            self.run(uncovered & !self.masks[c]);
            self.current.pop();
            if self.aborted {
                return;
            }
        }
    }
}

/// Exact minimum cover. `None` when the candidates cannot cover `target`
/// or the target exceeds [`EXACT_LIMIT`] elements.
pub fn exact_cover(
    target: &PointSet,
    candidates: &[(usize, PointSet)],
    node_budget: u64,
) -> Option<CoverSolution> {
    let elems: Vec<usize> = target.iter().collect();
    if elems.len() > EXACT_LIMIT {
        return None;
    }
    let upper = greedy_cover(target, candidates)?;
    if elems.len() <= 1 {
        return Some(CoverSolution {
            chosen: upper,
            exact: true,
        });
    }
    // Map to bit masks; dedupe equal masks (lowest id wins) and drop dominated ones.
    let mut reduced: Vec<(u128, usize)> = Vec::new();
    for (id, set) in candidates {
        let mask = elems
            .iter()
            .enumerate()
            .filter(|(_, &p)| set.contains(p))
            .fold(0u128, |m, (b, _)| m | 1 << b);
        if mask != 0 {
            reduced.push((mask, *id));
        }
    }
    reduced.sort_by(|a, b| b.0.count_ones().cmp(&a.0.count_ones()).then(a.1.cmp(&b.1)));
    let mut kept: Vec<(u128, usize)> = Vec::new();
    for (mask, id) in reduced {
        if !kept.iter().any(|&(k, _)| mask & !k == 0) {
            kept.push((mask, id));
        }
    }
    let masks: Vec<u128> = kept.iter().map(|k| k.0).collect();
    let mut covering = vec![Vec::new(); elems.len()];
    for (c, &m) in masks.iter().enumerate() {
        for (e, cov) in covering.iter_mut().enumerate() {
            if m >> e & 1 == 1 {
                cov.push(c);
            }
        }
    }
    let full: u128 = if elems.len() == 128 { u128::MAX } else { (1u128 << elems.len()) - 1 };
    let mut search = Search {
        masks: &masks,
        covering,
        max_gain: masks.iter().map(|m| m.count_ones()).max().unwrap_or(1),
        // sentinel of greedy length: only strictly smaller covers replace it
        best: vec![usize::MAX; upper.len()],
        current: Vec::new(),
        nodes: 0,
        budget: node_budget,
        aborted: false,
    };
    search.run(full);
    let improved = !search.best.contains(&usize::MAX);
    let chosen = if improved {
        let mut ids: Vec<usize> = search.best.iter().map(|&c| kept[c].1).collect();
        ids.sort_unstable();
        ids
    } else {
        upper
    };
    Some(CoverSolution {
        chosen,
        exact: !search.aborted,
    })
}
