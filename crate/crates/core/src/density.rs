//! The 2-density `m_2(H) = max (e(H') - 1) / (v(H') - 2)` over subgraphs with
//! at least two edges, computed exactly, either by exhaustive subset search
//! or by a parametric min-cut solver.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{FlowNetwork, INF};
use crate::graph::{Graph, Vertex};
use crate::par::{self, Exec};
use crate::rational::{int, ratio, Rational};

pub const DEFAULT_EXACT_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoDensityResult {
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
    /// Vertex set whose induced subgraph attains `value`.
    pub witness: Vec<Vertex>,
}

fn ratio_of(g: &Graph, set: &[Vertex]) -> Rational {
    let e = g.induced_edge_count(set);
    ratio(e as i128 - 1, set.len() as i128 - 2)
}

/// Exhaustive maximum over all vertex subsets (induced subgraphs dominate).
pub fn two_density_exact(g: &Graph) -> Result<TwoDensityResult> {
    two_density_exact_capped(g, DEFAULT_EXACT_CAP)
}

pub fn two_density_exact_capped(g: &Graph, cap: usize) -> Result<TwoDensityResult> {
    if g.edge_count() < 2 {
        return Err(Error::TooFewEdges(g.edge_count()));
    }
    let n = g.vertex_count();
    if n > cap || n > 30 {
        return Err(Error::OverCap { found: n, cap });
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut best: Option<(i64, i64, u32)> = None;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as i64;
        if size < 3 {
            continue;
        }
        let mut twice_edges = 0i64;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            twice_edges += (adj[v] & mask).count_ones() as i64;
        }
        let e = twice_edges / 2;
        if e < 2 {
            continue;
        }
        let (num, den) = (e - 1, size - 2);
        let better = match best {
            None => true,
            Some((bn, bd, _)) => num * bd > bn * den,
        };
        if better {
            best = Some((num, den, mask));
        }
    }
    let (num, den, mask) = best.expect("two edges span at most four vertices");
    let witness = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
    Ok(TwoDensityResult {
        value: ratio(num as i128, den as i128),
        witness,
    })
}

/// Closure network for `max b·e(S) - a·|S|`: source → edge-node (b),
/// edge-node → both endpoints (∞), vertex → sink (a). A zero-capacity
/// source arc per vertex is reserved so vertices can be forced into `S`.
#[derive(Clone)]
struct ClosureNetwork {
    net: FlowNetwork,
    edges: Vec<(Vertex, Vertex)>,
    n: usize,
    force_arc: Vec<usize>,
    base_flow: i64,
    num: i64,
    den: i64,
}

const SOURCE: usize = 0;
const SINK: usize = 1;

impl ClosureNetwork {
    fn build(g: &Graph, lambda: &Rational) -> Self {
        let edges: Vec<(Vertex, Vertex)> = g.edges().collect();
        let n = g.vertex_count();
        let (num, den) = (*lambda.numer() as i64, *lambda.denom() as i64);
        let m = edges.len();
        let mut net = FlowNetwork::new(2 + m + n);
        let vnode = |v: Vertex| 2 + m + v;
        for (i, &(u, v)) in edges.iter().enumerate() {
            net.add_arc(SOURCE, 2 + i, den);
            net.add_arc(2 + i, vnode(u), INF);
            net.add_arc(2 + i, vnode(v), INF);
        }
        for v in 0..n {
            net.add_arc(vnode(v), SINK, num);
        }
        let force_arc = (0..n).map(|v| net.add_arc(SOURCE, vnode(v), 0)).collect();
        let base_flow = net.dinic(SOURCE, SINK);
        ClosureNetwork {
            net,
            edges,
            n,
            force_arc,
            base_flow,
            num,
            den,
        }
    }

    /// Best `S ⊇ {u, v}` when it beats the threshold `e(S) - 1 > λ(|S| - 2)`.
    fn probe_edge(&mut self, u: Vertex, v: Vertex) -> Option<Vec<Vertex>> {
        self.net.begin_trial();
        self.net.set_capacity(self.force_arc[u], INF);
        self.net.set_capacity(self.force_arc[v], INF);
        let extra = self.net.augment(SOURCE, SINK);
        let min_cut = self.base_flow + extra;
        // max over S ⊇ {u,v} of den·e(S) - num·|S|, plus the 2·num refund
        let scaled = self.den * self.edges.len() as i64 - min_cut + 2 * self.num;
        let result = if scaled > self.den {
            let side = self.net.source_side(SOURCE);
            let m = self.edges.len();
            Some((0..self.n).filter(|&x| side[2 + m + x]).collect())
        } else {
            None
        };
        self.net.rollback();
        self.net.set_capacity(self.force_arc[u], 0);
        self.net.set_capacity(self.force_arc[v], 0);
        result
    }
}

/// Some vertex set `S` with at least two edges and `(e(S)-1)/(|S|-2) > λ`,
/// or `None` when `m_2(g) <= λ`.
///
/// With `λ = a/b`, every edge carries `b` units that must be spread over its
/// endpoints and every vertex holds at most `a`. Edges are inserted one at a
/// time; inserting `uv` first gathers `2a` free units at `{u, v}` along
/// augmenting paths. This succeeds exactly when every `S ⊇ {u, v}` satisfies
/// `b·e(S) <= a(|S| - 2)` after insertion, and when it fails the vertices
/// reached by the search form a violating set.
pub fn two_density_exceeds(g: &Graph, lambda: &Rational) -> Option<Vec<Vertex>> {
    Orientation::new(g, lambda).run()
}

struct Orientation<'g> {
    g: &'g Graph,
    a: i64,
    b: i64,
    free: Vec<i64>,
    /// accepted edges at each vertex: (neighbour, edge id)
    inc: Vec<Vec<(Vertex, usize)>>,
    /// per accepted edge: endpoints and the units assigned to each
    ends: Vec<[Vertex; 2]>,
    load: Vec<[i64; 2]>,
}

impl<'g> Orientation<'g> {
    fn new(g: &'g Graph, lambda: &Rational) -> Self {
        let (a, b) = (*lambda.numer() as i64, *lambda.denom() as i64);
        // m_2 >= 1/2 for every graph with two edges, so callers never go lower
        debug_assert!(b <= 2 * a, "lambda below 1/2");
        let n = g.vertex_count();
        Orientation {
            g,
            a,
            b,
            free: vec![a; n],
            inc: vec![Vec::new(); n],
            ends: Vec::new(),
            load: Vec::new(),
        }
    }

    fn share(&self, e: usize, p: Vertex) -> usize {
        if self.ends[e][0] == p {
            0
        } else {
            1
        }
    }

    fn run(mut self) -> Option<Vec<Vertex>> {
        let n = self.g.vertex_count();
        let mut pred: Vec<Option<(Vertex, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let edges: Vec<(Vertex, Vertex)> = self.g.edges().collect();
        for (u, v) in edges {
            let need = 2 * self.a;
            loop {
                let have = self.free[u] + self.free[v];
                if have >= need {
                    break;
                }
                match self.augment(u, v, need - have, &mut pred, &mut seen) {
                    Ok(()) => {}
                    Err(reached) => return Some(reached),
                }
            }
            let du = self.b.min(self.free[u]);
            let dv = self.b - du;
            self.free[u] -= du;
            self.free[v] -= dv;
            let id = self.ends.len();
            self.ends.push([u, v]);
            self.load.push([du, dv]);
            self.inc[u].push((v, id));
            self.inc[v].push((u, id));
        }
        None
    }

    /// Moves up to `want` units away from `{u, v}` along one shortest path to
    /// a vertex with spare capacity. On failure returns the reached set.
    fn augment(
        &mut self,
        u: Vertex,
        v: Vertex,
        want: i64,
        pred: &mut [Option<(Vertex, usize)>],
        seen: &mut [bool],
    ) -> std::result::Result<(), Vec<Vertex>> {
        let mut order = vec![u, v];
        seen[u] = true;
        seen[v] = true;
        let mut head = 0;
        let mut found = None;
        'bfs: while head < order.len() {
            let p = order[head];
            head += 1;
            for &(q, e) in &self.inc[p] {
                if seen[q] || self.load[e][self.share(e, p)] == 0 {
                    continue;
                }
                seen[q] = true;
                pred[q] = Some((p, e));
                order.push(q);
                if self.free[q] > 0 {
                    found = Some(q);
                    break 'bfs;
                }
            }
        }
        for &x in &order {
            seen[x] = false;
        }
        let Some(end) = found else {
            order.sort_unstable();
            return Err(order);
        };
        let mut delta = want.min(self.free[end]);
        let mut x = end;
        while let Some((p, e)) = pred[x] {
            delta = delta.min(self.load[e][self.share(e, p)]);
            x = p;
        }
        let mut x = end;
        while let Some((p, e)) = pred[x] {
            let sp = self.share(e, p);
            self.load[e][sp] -= delta;
            self.load[e][1 - sp] += delta;
            x = p;
        }
        self.free[end] -= delta;
        self.free[x] += delta;
        for &y in &order {
            pred[y] = None;
        }
        Ok(())
    }
}

/// Same decision as [`two_density_exceeds`], computed independently: each
/// edge is forced into `S` in turn and the remaining closure problem is a
/// min-cut, re-augmented from one shared base flow.
pub fn two_density_exceeds_closure(g: &Graph, lambda: &Rational, exec: Exec) -> Option<Vec<Vertex>> {
    let edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    match exec {
        Exec::Sequential => {
            let mut net = ClosureNetwork::build(g, lambda);
            edges.iter().find_map(|&(u, v)| net.probe_edge(u, v))
        }
        Exec::Parallel => {
            let base = ClosureNetwork::build(g, lambda);
            let chunks = 64.min(edges.len().max(1));
            let per = edges.len().div_ceil(chunks);
            par::find_map_first(exec, chunks, |c| {
                let mut net = base.clone();
                edges
                    .iter()
                    .skip(c * per)
                    .take(per)
                    .find_map(|&(u, v)| net.probe_edge(u, v))
            })
        }
    }
}

/// Exact `m_2` by parametric search: starting from a small witness, each
/// improving set raises `λ` to its own ratio until the decision procedure
/// certifies `m_2 <= λ`.
pub fn two_density_flow(g: &Graph) -> Result<TwoDensityResult> {
    parametric(g, |lambda| two_density_exceeds(g, lambda))
}

/// [`two_density_flow`] driven by the min-cut decision procedure.
pub fn two_density_closure(g: &Graph, exec: Exec) -> Result<TwoDensityResult> {
    parametric(g, |lambda| two_density_exceeds_closure(g, lambda, exec))
}

fn parametric(g: &Graph, decide: impl Fn(&Rational) -> Option<Vec<Vertex>>) -> Result<TwoDensityResult> {
    if g.edge_count() < 2 {
        return Err(Error::TooFewEdges(g.edge_count()));
    }
    let mut witness = start_witness(g);
    let mut value = ratio_of(g, &witness);
    while let Some(better) = decide(&value) {
        let r = ratio_of(g, &better);
        debug_assert!(r > value);
        value = r;
        witness = better;
    }
    Ok(TwoDensityResult { value, witness })
}

/// A vertex set with at least two induced edges: a path of length two if one
/// exists, otherwise two disjoint edges.
fn start_witness(g: &Graph) -> Vec<Vertex> {
    for v in 0..g.vertex_count() {
        if g.degree(v) >= 2 {
            let mut w = vec![v, g.neighbors(v)[0], g.neighbors(v)[1]];
            w.sort_unstable();
            return w;
        }
    }
    let mut edges = g.edges();
    let (a, b) = edges.next().expect("at least two edges");
    let (c, d) = edges.next().expect("at least two edges");
    let mut w = vec![a, b, c, d];
    w.sort_unstable();
    w
}

/// `(t - 1) / (t - 2)`, the 2-density of a `t`-cycle.
pub fn cycle_two_density(t: usize) -> Rational {
    int(t - 1) / int(t - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_values_exact() {
        assert_eq!(two_density_exact(&Graph::cycle(4)).unwrap().value, ratio(3, 2));
        assert_eq!(two_density_exact(&Graph::cycle(5)).unwrap().value, ratio(4, 3));
        // K_4: (6 - 1) / (4 - 2)
        let k4 = two_density_exact(&Graph::complete(4)).unwrap();
        assert_eq!(k4.value, ratio(5, 2));
        assert_eq!(k4.witness, vec![0, 1, 2, 3]);
    }

    #[test]
    fn known_values_flow() {
        assert_eq!(two_density_flow(&Graph::cycle(7)).unwrap().value, ratio(6, 5));
        assert_eq!(two_density_flow(&Graph::path(3)).unwrap().value, int(1));
        assert_eq!(two_density_flow(&Graph::complete(4)).unwrap().value, ratio(5, 2));
        let matching = Graph::from_edges(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        assert_eq!(two_density_flow(&matching).unwrap().value, ratio(1, 2));
        assert_eq!(two_density_exact(&matching).unwrap().value, ratio(1, 2));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            two_density_exact(&Graph::path(2)),
            Err(Error::TooFewEdges(1))
        ));
        assert!(matches!(
            two_density_flow(&Graph::empty(3)),
            Err(Error::TooFewEdges(0))
        ));
        assert!(matches!(
            two_density_exact(&Graph::cycle(17)),
            Err(Error::OverCap { .. })
        ));
    }

    #[test]
    fn witness_attains_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 9, 0.4);
            if g.edge_count() < 2 {
                continue;
            }
            let r = two_density_flow(&g).unwrap();
            assert_eq!(ratio_of(&g, &r.witness), r.value);
            assert!(g.induced_edge_count(&r.witness) >= 2);
        }
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn flow_matches_exhaustive(n in 3usize..=10, p in 0.1f64..0.9, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(&mut rng, n, p);
            prop_assume!(g.edge_count() >= 2);
            let exact = two_density_exact(&g).unwrap().value;
            prop_assert_eq!(two_density_flow(&g).unwrap().value, exact);
            prop_assert_eq!(two_density_closure(&g, Exec::Sequential).unwrap().value, exact);
        }

        #[test]
        fn gluing_at_a_vertex_does_not_raise_m2(a in 3usize..=6, b in 3usize..=6, p in 0.3f64..0.9, seed in any::<u64>()) {
            // two connected graphs sharing exactly vertex 0
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h1 = connected_graph(&mut rng, a, p);
            let h2 = connected_graph(&mut rng, b, p);
            prop_assume!(h1.edge_count() >= 2 && h2.edge_count() >= 2);
            let n = a + b - 1;
            let shift = |v: Vertex| if v == 0 { 0 } else { v + a - 1 };
            let edges = h1.edges().chain(h2.edges().map(|(u, v)| (shift(u), shift(v))));
            let glued = Graph::from_edges(n, edges).unwrap();
            let m1 = two_density_exact(&h1).unwrap().value;
            let m2 = two_density_exact(&h2).unwrap().value;
            prop_assert!(two_density_exact(&glued).unwrap().value <= m1.max(m2));
        }
    }

    fn connected_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        // random spanning tree plus random extra edges
        let mut edges: Vec<(Vertex, Vertex)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) && !edges.contains(&(u, v)) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }
}
