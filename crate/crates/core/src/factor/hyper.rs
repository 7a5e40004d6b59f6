use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{mask, Vertex};

pub const HAXELL_CAP_A: usize = 12;
pub const HAXELL_CAP_B: usize = 18;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub n: usize,
    pub edges: Vec<Vec<Vertex>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    /// Indices into the hypergraph's edge list, in order of the `A` vertex
    /// they saturate.
    pub edges: Vec<usize>,
    pub saturates: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchOutcome {
    Found(Matching),
    None,
    Unknown,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<Vertex>>) -> Self {
        Hypergraph { n, edges }
    }

    /// Checks the Haxell shape: all edges have the same size `ℓ >= 2`, one
    /// vertex in `A` and `ℓ - 1` distinct vertices outside it. Returns `ℓ`.
    pub fn haxell_uniformity(&self, side_a: &[Vertex]) -> Result<usize> {
        let in_a = mask(self.n, side_a);
        let mut ell = None;
        for (index, e) in self.edges.iter().enumerate() {
            let bad = |reason: String| Error::MalformedEdge { index, reason };
            if e.iter().any(|&v| v >= self.n) {
                return Err(bad("vertex out of range".into()));
            }
            let mut sorted = e.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != e.len() {
                return Err(bad("repeated vertex".into()));
            }
            let a_count = e.iter().filter(|&&v| in_a[v]).count();
            if a_count != 1 {
                return Err(bad(format!("{a_count} vertices in A, expected 1")));
            }
            if e.len() < 2 {
                return Err(bad("edge has no B vertex".into()));
            }
            match ell {
                None => ell = Some(e.len()),
                Some(l) if l != e.len() => return Err(bad(format!("size {} differs from {l}", e.len()))),
                Some(_) => {}
            }
        }
        Ok(ell.unwrap_or(2))
    }
}

/// Complete backtracking search for disjoint edges covering `A`: always
/// extend the unsaturated `A` vertex with the fewest usable edges.
pub fn find_saturating_matching(h: &Hypergraph, side_a: &[Vertex], budget: Duration) -> Result<MatchOutcome> {
    h.haxell_uniformity(side_a)?;
    let in_a = mask(h.n, side_a);
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); h.n];
    for (i, e) in h.edges.iter().enumerate() {
        let a = *e.iter().find(|&&v| in_a[v]).expect("shape checked");
        at[a].push(i);
    }
    let mut a_list: Vec<Vertex> = side_a.to_vec();
    a_list.sort_unstable();
    a_list.dedup();
    let mut state = MatchState {
        h,
        at,
        used: vec![false; h.n],
        chosen: vec![None; h.n],
        open: a_list.clone(),
        start: Instant::now(),
        budget,
        nodes: 0,
    };
    Ok(match state.search() {
        Some(true) => {
            let edges = a_list.iter().map(|&a| state.chosen[a].expect("saturated")).collect();
            MatchOutcome::Found(Matching {
                edges,
                saturates: a_list,
            })
        }
        Some(false) => MatchOutcome::None,
        None => MatchOutcome::Unknown,
    })
}

struct MatchState<'a> {
    h: &'a Hypergraph,
    at: Vec<Vec<usize>>,
    used: Vec<bool>,
    chosen: Vec<Option<usize>>,
    open: Vec<Vertex>,
    start: Instant,
    budget: Duration,
    nodes: u64,
}

impl MatchState<'_> {
    fn usable(&self, e: usize) -> bool {
        self.h.edges[e].iter().all(|&v| !self.used[v])
    }

    /// `Some(found)` or `None` on timeout.
    fn search(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes % 1024 == 0 && self.start.elapsed() > self.budget {
            return None;
        }
        if self.open.is_empty() {
            return Some(true);
        }
        let (idx, _) = self
            .open
            .iter()
            .enumerate()
            .map(|(i, &a)| (i, self.at[a].iter().filter(|&&e| self.usable(e)).count()))
            .min_by_key(|&(i, c)| (c, self.open[i]))
            .expect("open nonempty");
        let a = self.open.swap_remove(idx);
        let options: Vec<usize> = self.at[a].iter().copied().filter(|&e| self.usable(e)).collect();
        for e in options {
            for &v in &self.h.edges[e] {
                self.used[v] = true;
            }
            self.chosen[a] = Some(e);
            match self.search() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            for &v in &self.h.edges[e] {
                self.used[v] = false;
            }
            self.chosen[a] = None;
        }
        self.open.push(a);
        let last = self.open.len() - 1;
        self.open.swap(idx.min(last), last);
        Some(false)
    }
}

/// Haxell's condition with `ℓ` the edge size: for every `A' ⊆ A` and every
/// `B'` with `|B'| <= (2ℓ-3)(|A'|-1)`, some edge meets `A'` and avoids `B'`.
///
/// For a fixed `B'` the strongest `A'` is the set of `A` vertices all of
/// whose edges hit `B'`, so it suffices to scan the subsets of `B`.
pub fn check_haxell_condition(h: &Hypergraph, side_a: &[Vertex]) -> Result<bool> {
    let ell = h.haxell_uniformity(side_a)?;
    let in_a = mask(h.n, side_a);
    let mut a_list: Vec<Vertex> = side_a.to_vec();
    a_list.sort_unstable();
    a_list.dedup();
    let b_list: Vec<Vertex> = (0..h.n).filter(|&v| !in_a[v]).collect();
    if a_list.len() > HAXELL_CAP_A {
        return Err(Error::OverCap { found: a_list.len(), cap: HAXELL_CAP_A });
    }
    if b_list.len() > HAXELL_CAP_B {
        return Err(Error::OverCap { found: b_list.len(), cap: HAXELL_CAP_B });
    }
    let mut b_index = vec![usize::MAX; h.n];
    for (i, &b) in b_list.iter().enumerate() {
        b_index[b] = i;
    }
    // per A vertex, the B parts of its edges as bitmasks
    let a_pos = |v: Vertex| a_list.binary_search(&v).ok();
    let mut parts: Vec<Vec<u32>> = vec![Vec::new(); a_list.len()];
    for e in &h.edges {
        let mut a = None;
        let mut bits = 0u32;
        for &v in e {
            match a_pos(v) {
                Some(i) => a = Some(i),
                None => bits |= 1 << b_index[v],
            }
        }
        parts[a.expect("shape checked")].push(bits);
    }
    let slope = 2 * ell - 3;
    for b_sub in 0u32..(1u32 << b_list.len()) {
        let blocked = parts.iter().filter(|ps| ps.iter().all(|&p| p & b_sub != 0)).count();
        if blocked > 0 && (b_sub.count_ones() as usize) <= slope * (blocked - 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const BUDGET: Duration = Duration::from_secs(10);

    #[test]
    fn small_cases() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]);
        let m = find_saturating_matching(&h, &[0], BUDGET).unwrap();
        assert_eq!(m, MatchOutcome::Found(Matching { edges: vec![0], saturates: vec![0] }));
        assert!(check_haxell_condition(&h, &[0]).unwrap());
        let h = Hypergraph::new(4, vec![vec![0, 2, 3], vec![1, 2, 3]]);
        assert_eq!(find_saturating_matching(&h, &[0, 1], BUDGET).unwrap(), MatchOutcome::None);
        let h = Hypergraph::new(3, vec![]);
        assert!(!check_haxell_condition(&h, &[0]).unwrap());
    }

    #[test]
    fn malformed_edges() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![0, 1]]);
        assert!(matches!(find_saturating_matching(&h, &[0], BUDGET), Err(Error::MalformedEdge { index: 1, .. })));
        let h = Hypergraph::new(4, vec![vec![0, 1, 2]]);
        assert!(matches!(check_haxell_condition(&h, &[0, 1]), Err(Error::MalformedEdge { index: 0, .. })));
        let big = Hypergraph::new(20, vec![]);
        assert!(matches!(check_haxell_condition(&big, &[0]), Err(Error::OverCap { .. })));
    }

    /// Exhaustive oracle: some set of |A| edges is disjoint and covers A.
    fn oracle(h: &Hypergraph, a: &[Vertex]) -> bool {
        let m = h.edges.len();
        (0u32..(1 << m)).any(|sub| {
            if sub.count_ones() as usize != a.len() {
                return false;
            }
            let mut used = vec![false; h.n];
            for i in 0..m {
                if sub & (1 << i) != 0 {
                    for &v in &h.edges[i] {
                        if std::mem::replace(&mut used[v], true) {
                            return false;
                        }
                    }
                }
            }
            a.iter().all(|&v| used[v])
        })
    }

    pub(crate) fn random_instance(rng: &mut ChaCha8Rng, a: usize, b: usize, ell: usize, edges: usize) -> Hypergraph {
        let edges = (0..edges)
            .map(|_| {
                let mut e = vec![rng.gen_range(0..a)];
                while e.len() < ell {
                    let v = a + rng.gen_range(0..b);
                    if !e.contains(&v) {
                        e.push(v);
                    }
                }
                e
            })
            .collect();
        Hypergraph::new(a + b, edges)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn matcher_agrees_with_oracle(seed in any::<u64>(), a in 1usize..=4, b in 2usize..=8, m in 0usize..=10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_instance(&mut rng, a, b, 3, m);
            let side: Vec<Vertex> = (0..a).collect();
            let found = match find_saturating_matching(&h, &side, BUDGET).unwrap() {
                MatchOutcome::Found(mt) => {
                    let mut used = vec![false; h.n];
                    for &e in &mt.edges {
                        for &v in &h.edges[e] {
                            prop_assert!(!std::mem::replace(&mut used[v], true));
                        }
                    }
                    prop_assert!(side.iter().all(|&v| used[v]));
                    true
                }
                MatchOutcome::None => false,
                MatchOutcome::Unknown => unreachable!("tiny instance"),
            };
            prop_assert_eq!(found, oracle(&h, &side));
        }

        #[test]
        fn haxell_condition_implies_matching(seed in any::<u64>(), a in 1usize..=5, b in 2usize..=14, m in 1usize..=40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_instance(&mut rng, a, b, 3, m);
            let side: Vec<Vertex> = (0..a).collect();
            if check_haxell_condition(&h, &side).unwrap() {
                prop_assert!(matches!(find_saturating_matching(&h, &side, BUDGET).unwrap(), MatchOutcome::Found(_)));
            }
        }
    }
}
