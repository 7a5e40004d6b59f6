use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// How many balanced sets `Z` are spot-checked for unverified templates.
const SPOT_CHECKS: usize = 64;
/// Repair rounds before construction gives up.
const REPAIR_ROUNDS: usize = 512;
pub const DEFAULT_VERIFY_CAP: usize = 3;

/// A `t`-partite `t`-uniform hypergraph. Part `i` holds the ids
/// `i·2m .. (i+1)·2m`; the first `m` of them form the flexible set `B_i'`.
/// `edges[e][i]` is the vertex of edge `e` in part `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub t: usize,
    pub m: usize,
    pub edges: Vec<Vec<usize>>,
    /// Degree cap the construction respected.
    pub max_degree: usize,
    /// Every balanced `Z` was checked exhaustively.
    pub verified: bool,
}

impl Template {
    pub fn part_size(&self) -> usize {
        2 * self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.t * self.part_size()
    }

    pub fn vertex(&self, part: usize, index: usize) -> usize {
        part * self.part_size() + index
    }

    pub fn part_of(&self, v: usize) -> usize {
        v / self.part_size()
    }

    pub fn is_flexible(&self, v: usize) -> bool {
        v % self.part_size() < self.m
    }

    pub fn flexible(&self, part: usize) -> Vec<usize> {
        (0..self.m).map(|j| self.vertex(part, j)).collect()
    }

    pub fn degree(&self) -> usize {
        let mut deg = vec![0usize; self.vertex_count()];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg.into_iter().max().unwrap_or(0)
    }

    fn well_formed(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.len() != self.t || e.iter().enumerate().any(|(p, &v)| v >= self.vertex_count() || self.part_of(v) != p) {
                return Err(invalid(format!("template edge {i} does not meet every part once")));
            }
        }
        Ok(())
    }
}

/// A perfect matching of the vertices not in `removed`, as edge indices.
pub fn perfect_matching(tpl: &Template, removed: &[bool]) -> Option<Vec<usize>> {
    let mut used = removed.to_vec();
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); tpl.vertex_count()];
    for (i, e) in tpl.edges.iter().enumerate() {
        at[e[0]].push(i);
    }
    let firsts: Vec<usize> = (0..tpl.part_size()).map(|j| tpl.vertex(0, j)).filter(|&v| !removed[v]).collect();
    let mut chosen = Vec::new();
    fn go(tpl: &Template, at: &[Vec<usize>], firsts: &[usize], used: &mut [bool], chosen: &mut Vec<usize>) -> bool {
        let Some(&v) = firsts.get(chosen.len()) else {
            return true;
        };
        for &e in &at[v] {
            let edge = &tpl.edges[e];
            if edge.iter().all(|&x| !used[x]) {
                for &x in edge {
                    used[x] = true;
                }
                chosen.push(e);
                if go(tpl, at, firsts, used, chosen) {
                    return true;
                }
                chosen.pop();
                for &x in edge {
                    used[x] = false;
                }
            }
        }
        false
    }
    // vertex counts per part must agree for a perfect matching to exist
    let left = |p: usize| (0..tpl.part_size()).filter(|&j| !removed[tpl.vertex(p, j)]).count();
    if (1..tpl.t).any(|p| left(p) != left(0)) {
        return None;
    }
    go(tpl, &at, &firsts, &mut used, &mut chosen).then_some(chosen)
}

/// Every balanced `Z ⊆ ∪B_i'`, as removal masks, level by level.
pub fn balanced_sets(t: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=m).flat_map(move |j| {
        let subsets: Vec<u32> = (0u32..1 << m).filter(|s| s.count_ones() as usize == j).collect();
        let total = subsets.len().pow(t as u32);
        (0..total).map(move |mut code| {
            let mut z = Vec::new();
            for part in 0..t {
                let s = subsets[code % subsets.len()];
                code /= subsets.len();
                z.extend((0..m).filter(|&b| s & (1 << b) != 0).map(|b| part * 2 * m + b));
            }
            z
        })
    })
}

fn removal_mask(tpl: &Template, z: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; tpl.vertex_count()];
    for &v in z {
        mask[v] = true;
    }
    mask
}

/// Exhaustive check: `B - Z` has a perfect matching for every balanced `Z`.
pub fn verify_template(tpl: &Template, cap: usize) -> Result<bool> {
    if tpl.m > cap {
        return Err(Error::OverCap { found: tpl.m, cap });
    }
    tpl.well_formed()?;
    Ok(balanced_sets(tpl.t, tpl.m).all(|z| perfect_matching(tpl, &removal_mask(tpl, &z)).is_some()))
}

/// Largest set of disjoint existing edges avoiding `removed`.
fn max_partial_matching(tpl: &Template, removed: &[bool]) -> Vec<usize> {
    fn go(tpl: &Template, from: usize, used: &mut [bool], cur: &mut Vec<usize>, best: &mut Vec<usize>) {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        for e in from..tpl.edges.len() {
            let edge = &tpl.edges[e];
            if edge.iter().all(|&x| !used[x]) {
                for &x in edge {
                    used[x] = true;
                }
                cur.push(e);
                go(tpl, e + 1, used, cur, best);
                cur.pop();
                for &x in edge {
                    used[x] = false;
                }
            }
        }
    }
    let mut best = Vec::new();
    go(tpl, 0, &mut removed.to_vec(), &mut Vec::new(), &mut best);
    best
}

/// Randomised repair. Start from the identity matching (edge `j` takes index
/// `j` of every part); while some balanced `Z` leaves `B - Z` without a
/// perfect matching, keep a largest partial matching of `B - Z` and join the
/// uncovered vertices by random new edges under the degree cap.
pub fn build_template(t: usize, m: usize, max_degree: usize, seed: u64, verify_cap: usize) -> Result<Template> {
    if t < 3 {
        return Err(invalid(format!("template needs t >= 3, got {t}")));
    }
    if m == 0 {
        return Err(invalid("template needs m >= 1"));
    }
    if max_degree == 0 {
        return Err(Error::Template("degree cap 0 admits no edges".into()));
    }
    let mut tpl = Template {
        t,
        m,
        edges: (0..2 * m).map(|j| (0..t).map(|p| p * 2 * m + j).collect()).collect(),
        max_degree,
        verified: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exhaustive = m <= verify_cap;
    let checks: Vec<Vec<usize>> = if exhaustive {
        balanced_sets(t, m).collect()
    } else {
        let all_flex: Vec<usize> = (0..t).flat_map(|p| (0..m).map(move |j| p * 2 * m + j)).collect();
        let mut picks = vec![Vec::new(), all_flex];
        for _ in 0..SPOT_CHECKS {
            let j = rand::Rng::gen_range(&mut rng, 0..=m);
            let mut z = Vec::new();
            for p in 0..t {
                let mut idx: Vec<usize> = (0..m).collect();
                idx.shuffle(&mut rng);
                z.extend(idx[..j].iter().map(|&b| p * 2 * m + b));
            }
            picks.push(z);
        }
        picks
    };
    for _ in 0..REPAIR_ROUNDS {
        let failing = checks.iter().find(|z| perfect_matching(&tpl, &removal_mask(&tpl, z)).is_none());
        let Some(z) = failing else {
            tpl.verified = exhaustive;
            return Ok(tpl);
        };
        let removed = removal_mask(&tpl, z);
        let mut covered = removed.clone();
        let keep = if exhaustive { max_partial_matching(&tpl, &removed) } else { Vec::new() };
        for &e in &keep {
            for &x in &tpl.edges[e] {
                covered[x] = true;
            }
        }
        let free: Vec<Vec<usize>> = (0..t)
            .map(|p| (0..2 * m).map(|j| p * 2 * m + j).filter(|&v| !covered[v]).collect())
            .collect();
        let mut added = false;
        for _ in 0..64 {
            let mut cols = free.clone();
            for c in &mut cols {
                c.shuffle(&mut rng);
            }
            let new_edges: Vec<Vec<usize>> = (0..cols[0].len()).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
            let mut trial = tpl.clone();
            trial.edges.extend(new_edges);
            if trial.degree() <= max_degree {
                tpl = trial;
                added = true;
                break;
            }
        }
        if !added {
            return Err(Error::Template(format!("degree cap {max_degree} blocks every repair")));
        }
    }
    Err(Error::Template(format!("no valid template after {REPAIR_ROUNDS} repair rounds")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_template() {
        let tpl = build_template(3, 1, 27, 0, DEFAULT_VERIFY_CAP).unwrap();
        assert_eq!(tpl.edges, vec![vec![0, 2, 4], vec![1, 3, 5]]);
        assert!(tpl.verified);
        assert!(verify_template(&tpl, 3).unwrap());
        // both balanced Z: empty and all flexible vertices
        assert_eq!(balanced_sets(3, 1).count(), 2);
    }

    #[test]
    fn broken_templates() {
        let mut tpl = build_template(3, 1, 27, 0, 3).unwrap();
        tpl.edges.remove(0);
        assert!(!verify_template(&tpl, 3).unwrap());
        tpl.edges.clear();
        assert!(!verify_template(&tpl, 3).unwrap());
        assert!(build_template(3, 1, 0, 0, 3).is_err());
        let big = Template { m: 4, ..tpl };
        assert!(matches!(verify_template(&big, 3), Err(Error::OverCap { .. })));
    }

    #[test]
    fn m2_template() {
        let tpl = build_template(3, 2, 64_000, 5, 3).unwrap();
        assert!(tpl.verified);
        assert!(tpl.degree() <= 64_000);
        // independent recount: every balanced Z, brute-force over edge subsets
        for z in balanced_sets(3, 2) {
            let removed = removal_mask(&tpl, &z);
            let need = 4 - z.len() / 3;
            let found = (0u64..1 << tpl.edges.len()).any(|s| {
                if s.count_ones() as usize != need {
                    return false;
                }
                let mut cover = removed.clone();
                for (i, e) in tpl.edges.iter().enumerate() {
                    if s & (1 << i) != 0 {
                        for &x in e {
                            if std::mem::replace(&mut cover[x], true) {
                                return false;
                            }
                        }
                    }
                }
                cover.iter().all(|&c| c)
            });
            assert!(found, "Z = {z:?}");
        }
        assert_eq!(balanced_sets(3, 2).count(), 1 + 8 + 1);
    }

    #[test]
    fn larger_parameters() {
        for (t, m) in [(4, 2), (5, 1), (3, 3)] {
            let tpl = build_template(t, m, 1000, 1, 3).unwrap();
            assert!(tpl.verified && verify_template(&tpl, 3).unwrap());
        }
        let tpl = build_template(3, 5, 1000, 1, 3).unwrap();
        assert!(!tpl.verified);
    }
}
