use crate::error::{invalid, Result};
use crate::graph::{Graph, Vertex};

use super::{check_tk, GadgetKind, Role, RoleLabel, RootedGadget};

/// Incremental assembly of vertices, roles and cycles.
#[derive(Default)]
struct Builder {
    roles: Vec<RoleLabel>,
    edges: Vec<(Vertex, Vertex)>,
    cycles: Vec<Vec<Vertex>>,
    switcher: Option<usize>,
}

impl Builder {
    fn vertex(&mut self, role: Role) -> Vertex {
        self.roles.push(RoleLabel {
            switcher: self.switcher,
            role,
        });
        self.roles.len() - 1
    }

    fn cycle(&mut self, c: Vec<Vertex>) {
        for i in 0..c.len() {
            let (u, v) = (c[i], c[(i + 1) % c.len()]);
            self.edges.push((u.min(v), u.max(v)));
        }
        self.cycles.push(c);
    }

    fn path(&mut self, p: &[Vertex]) {
        for w in p.windows(2) {
            self.edges.push((w[0].min(w[1]), w[0].max(w[1])));
        }
    }

    fn finish(mut self, kind: GadgetKind, t: usize, k: usize, roots: Vec<Vertex>, s_cycle: Vec<Vertex>) -> RootedGadget {
        self.edges.sort_unstable();
        self.edges.dedup();
        let graph = Graph::from_edges(self.roles.len(), self.edges).expect("gadget edges are simple");
        RootedGadget {
            graph,
            kind,
            t,
            k,
            roles: self.roles,
            cycles: self.cycles,
            roots,
            s_cycle,
        }
    }

    /// Appends a `C_t`-tree of depth `k`; returns `levels[i][j - 1] = u_{i,j}`.
    /// Ids inside the tree follow `sum_{l<i} (t-1)^l + (j - 1)`.
    fn tree(&mut self, t: usize, k: usize, far: bool) -> Vec<Vec<Vertex>> {
        let mut levels: Vec<Vec<Vertex>> = Vec::with_capacity(k + 2);
        let root = self.vertex(Role::Tree { far, level: 0, index: 1 });
        levels.push(vec![root]);
        for level in 1..=k + 1 {
            let size = (t - 1).pow(level as u32);
            let ids = (1..=size)
                .map(|index| self.vertex(Role::Tree { far, level, index }))
                .collect();
            levels.push(ids);
        }
        for i in 0..=k {
            for j in 0..levels[i].len() {
                let mut c = vec![levels[i][j]];
                c.extend_from_slice(&levels[i + 1][j * (t - 1)..(j + 1) * (t - 1)]);
                self.cycle(c);
            }
        }
        levels
    }

    /// Appends an `(a, b)`-ladder with `l` rows. Row 1 and row `l` may be
    /// supplied (identified with existing vertices); other rows are fresh.
    #[allow(clippy::too_many_arguments)]
    fn ladder(
        &mut self,
        a: usize,
        b: usize,
        l: usize,
        first: Option<&[Vertex]>,
        last: Option<&[Vertex]>,
        pair: usize,
        ladder: u8,
    ) -> Vec<Vec<Vertex>> {
        let mut rows: Vec<Vec<Vertex>> = Vec::with_capacity(l);
        for row in 1..=l {
            let width = if row % 2 == 1 { a } else { b };
            let given = match row {
                1 => first,
                r if r == l => last,
                _ => None,
            };
            let ids = match given {
                Some(ids) => {
                    debug_assert_eq!(ids.len(), width);
                    ids.to_vec()
                }
                None => (1..=width)
                    .map(|col| self.vertex(Role::Ladder { pair, ladder, row, col }))
                    .collect(),
            };
            rows.push(ids);
        }
        for r in 0..l {
            self.path(&rows[r].clone());
        }
        for r in 0..l - 1 {
            let mut c = rows[r].clone();
            c.extend(rows[r + 1].iter().rev());
            self.cycle(c);
        }
        rows
    }

    /// Appends a `(v, v')`-switcher; returns `(v, v')`.
    fn switcher(&mut self, t: usize, k: usize) -> (Vertex, Vertex) {
        let near = self.tree(t, k, false);
        let far = self.tree(t, k, true);
        let (a1, a2) = (k - 1, t - k);
        for j in 0..near[k].len() {
            let bottom = |levels: &Vec<Vec<Vertex>>| {
                let mut c = vec![levels[k][j]];
                c.extend_from_slice(&levels[k + 1][j * (t - 1)..(j + 1) * (t - 1)]);
                c
            };
            let (v, u) = (bottom(&near), bottom(&far));
            let len = 2 * k - 1;
            self.ladder(a1, t - a1, len, Some(&v[1..k]), Some(&u[1..k]), j + 1, 1);
            self.ladder(a2, t - a2, len, Some(&v[k..t]), Some(&u[k..t]), j + 1, 2);
        }
        (near[0][0], far[0][0])
    }
}

/// `sum_{i=0}^{k+1} (t-1)^i`, the vertex count of a `C_t`-tree of depth `k`.
pub fn ct_tree_size(t: usize, k: usize) -> usize {
    (0..=k + 1).map(|i| (t - 1).pow(i as u32)).sum()
}

pub fn build_ct_tree(t: usize, k: usize) -> Result<RootedGadget> {
    if t < 3 || k < 1 {
        return Err(invalid(format!("C_t-tree needs t >= 3 and k >= 1, got t = {t}, k = {k}")));
    }
    let mut b = Builder::default();
    let levels = b.tree(t, k, false);
    let root = levels[0][0];
    Ok(b.finish(GadgetKind::CtTree, t, k, vec![root], Vec::new()))
}

/// `(a, b)`-ladder of odd length `l`. The cycle list holds the `l - 1`
/// cycles formed by consecutive rows (each of length `a + b`).
pub fn build_ladder(a: usize, b: usize, l: usize) -> Result<RootedGadget> {
    if l % 2 == 0 || l < 3 {
        return Err(invalid(format!("ladder length must be odd and >= 3, got {l}")));
    }
    if a < 1 || b < 1 || a + b < 3 {
        return Err(invalid(format!("ladder widths must be >= 1 with a + b >= 3, got ({a}, {b})")));
    }
    let mut g = Builder::default();
    g.ladder(a, b, l, None, None, 0, 0);
    Ok(g.finish(GadgetKind::Ladder, a + b, 0, Vec::new(), Vec::new()))
}

pub fn build_switcher(t: usize, k: usize) -> Result<RootedGadget> {
    check_tk(t, k)?;
    let mut b = Builder::default();
    let (v, w) = b.switcher(t, k);
    Ok(b.finish(GadgetKind::Switcher, t, k, vec![v, w], Vec::new()))
}

/// Cycle `s_1..s_t` plus `t` disjoint `(s_i, r_i)`-switchers. Switcher `i`
/// occupies a contiguous id block starting with `s_i`.
pub fn build_absorber(t: usize, k: usize) -> Result<RootedGadget> {
    check_tk(t, k)?;
    let mut b = Builder::default();
    let mut s = Vec::with_capacity(t);
    let mut r = Vec::with_capacity(t);
    for i in 1..=t {
        b.switcher = Some(i);
        let (si, ri) = b.switcher(t, k);
        s.push(si);
        r.push(ri);
    }
    b.switcher = None;
    b.cycle(s.clone());
    // the connecting cycle goes first so that labelling starts from it
    b.cycles.rotate_right(1);
    Ok(b.finish(GadgetKind::Absorber, t, k, r, s))
}

/// A path `p_1..p_{t-1}` whose ends are both joined to `v` and `v'`. Tiny,
/// but contains a 4-cycle, so only suitable for dense hosts.
pub fn build_compact_switcher(t: usize) -> Result<RootedGadget> {
    if t < 3 {
        return Err(invalid(format!("need t >= 3, got {t}")));
    }
    let mut b = Builder::default();
    let (v, w) = b.compact_switcher(t);
    Ok(b.finish(GadgetKind::CompactSwitcher, t, 0, vec![v, w], Vec::new()))
}

/// Absorber assembled from compact switchers: `t(t+1)` vertices.
pub fn build_compact_absorber(t: usize) -> Result<RootedGadget> {
    if t < 3 {
        return Err(invalid(format!("need t >= 3, got {t}")));
    }
    let mut b = Builder::default();
    let mut s = Vec::with_capacity(t);
    let mut r = Vec::with_capacity(t);
    for i in 1..=t {
        b.switcher = Some(i);
        let (si, ri) = b.compact_switcher(t);
        s.push(si);
        r.push(ri);
    }
    b.switcher = None;
    b.cycle(s.clone());
    // the connecting cycle goes first so that labelling starts from it
    b.cycles.rotate_right(1);
    Ok(b.finish(GadgetKind::CompactAbsorber, t, 0, r, s))
}

impl Builder {
    fn compact_switcher(&mut self, t: usize) -> (Vertex, Vertex) {
        let v = self.vertex(Role::Tree { far: false, level: 0, index: 1 });
        let path: Vec<Vertex> = (1..t).map(|index| self.vertex(Role::Path { index })).collect();
        let w = self.vertex(Role::Tree { far: true, level: 0, index: 1 });
        for end in [v, w] {
            let mut c = vec![end];
            c.extend_from_slice(&path);
            self.cycle(c);
        }
        (v, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_sizes() {
        let g = build_ct_tree(3, 2).unwrap();
        assert_eq!((g.vertex_count(), g.cycles.len()), (15, 7));
        let g = build_ct_tree(4, 2).unwrap();
        assert_eq!((g.vertex_count(), g.cycles.len()), (40, 13));
        for (t, k) in [(3, 1), (3, 2), (4, 3), (5, 2), (6, 1)] {
            let g = build_ct_tree(t, k).unwrap();
            assert_eq!(g.graph.degree(g.roots[0]), 2);
            assert_eq!(g.vertex_count(), ct_tree_size(t, k));
            // every vertex but the root and the bottom level sits in two cycles
            let bottom = (t - 1).pow(k as u32 + 1);
            let mut count = vec![0; g.vertex_count()];
            for c in &g.cycles {
                assert_eq!(c.len(), t);
                c.iter().for_each(|&v| count[v] += 1);
            }
            let twice = count.iter().filter(|&&c| c == 2).count();
            assert_eq!(twice, g.vertex_count() - 1 - bottom);
        }
        assert!(build_ct_tree(2, 2).is_err());
        assert!(build_ct_tree(3, 0).is_err());
    }

    #[test]
    fn ladder_sizes() {
        assert_eq!(build_ladder(2, 3, 7).unwrap().vertex_count(), 17);
        assert_eq!(build_ladder(1, 2, 3).unwrap().vertex_count(), 4);
        assert!(build_ladder(2, 3, 4).is_err());
        // (2,3,7): rows 2,3,2,3,2,3,2; both boundary paths present
        let l = build_ladder(2, 3, 7).unwrap();
        let row_start = [0, 2, 5, 7, 10, 12, 15];
        for r in 0..6 {
            assert!(l.graph.has_edge(row_start[r], row_start[r + 1]));
        }
        let right = [1, 4, 6, 9, 11, 14, 16];
        for r in 0..6 {
            assert!(l.graph.has_edge(right[r], right[r + 1]));
        }
    }

    #[test]
    fn switcher_and_absorber_sizes() {
        for (t, k, sw, abs) in [(3, 2, 46, 138), (4, 2, 125, 500), (5, 3, 1706, 8530), (6, 3, 3937, 23622)] {
            let s = build_switcher(t, k).unwrap();
            assert_eq!(s.vertex_count(), sw);
            assert_eq!(s.vertex_count() % t, 1);
            let a = build_absorber(t, k).unwrap();
            assert_eq!(a.vertex_count(), abs);
            assert_eq!(a.vertex_count() % t, 0);
            for (i, &r) in a.roots.iter().enumerate() {
                for &q in &a.roots[i + 1..] {
                    assert!(!a.graph.has_edge(r, q));
                }
            }
            for c in &a.cycles {
                assert_eq!(c.len(), t);
                for i in 0..t {
                    assert!(a.graph.has_edge(c[i], c[(i + 1) % t]));
                }
            }
        }
        assert!(build_switcher(5, 2).is_err());
        assert!(build_absorber(3, 1).is_err());
    }

    #[test]
    fn compact_sizes() {
        let a = build_compact_absorber(3).unwrap();
        assert_eq!(a.vertex_count(), 12);
        assert_eq!(a.graph.edge_count(), 3 * 5 + 3);
        let s = build_compact_switcher(4).unwrap();
        assert_eq!(s.vertex_count(), 5);
    }
}
