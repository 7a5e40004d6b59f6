//! Simple undirected graphs with dense vertex ids, the deletion primitives
//! `G - X` and `G - ∇(X)`, layered neighbourhoods, and blow-up partitions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

pub type Vertex = usize;

/// Immutable simple graph. Adjacency lists are sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Strict constructor: rejects loops, out-of-range ids and repeated edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut edge_count = 0;
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("parallel edge at {u}")));
            }
            edge_count += list.len();
        }
        Ok(Graph {
            adj,
            edge_count: edge_count / 2,
        })
    }

    /// Lenient constructor used by contractions: loops are dropped and
    /// parallel edges merged.
    pub fn from_edges_simplified<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut edge_count = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Graph {
            adj,
            edge_count: edge_count / 2,
        }
    }

    /// Builds directly from sorted, symmetric adjacency lists.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<Vertex>>) -> Self {
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        debug_assert!(adj.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        Graph { adj, edge_count }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Graph::from_sorted_adjacency(adj)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn degree_into(&self, v: Vertex, set: &[bool]) -> usize {
        self.adj[v].iter().filter(|&&w| set[w]).count()
    }

    /// `e(X, Y)` for disjoint `X`, `Y`; also correct for overlapping sets when
    /// interpreted as the number of edges `xy` with `x ∈ X`, `y ∈ Y`, each
    /// edge counted once.
    pub fn edges_between(&self, xs: &[Vertex], ys: &[Vertex]) -> usize {
        let n = self.vertex_count();
        let in_x = mask(n, xs);
        let in_y = mask(n, ys);
        let mut count = 0;
        for &x in xs {
            for &w in &self.adj[x] {
                if in_y[w] {
                    // an edge with both ends in X ∩ Y is seen twice
                    if in_x[w] && in_y[x] {
                        if x < w {
                            count += 1;
                        }
                    } else {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    /// Number of edges of the induced subgraph `G[S]`.
    pub fn induced_edge_count(&self, set: &[Vertex]) -> usize {
        let m = mask(self.vertex_count(), set);
        set.iter().map(|&v| self.degree_into(v, &m)).sum::<usize>() / 2
    }

    pub fn induced(&self, set: &[Vertex]) -> (Graph, IdMap) {
        let n = self.vertex_count();
        let keep = mask(n, set);
        let removed: Vec<Vertex> = (0..n).filter(|&v| !keep[v]).collect();
        remove_vertices(self, &removed)
    }

    pub fn remove_edges(&self, edges: &[(Vertex, Vertex)]) -> Graph {
        let mut adj = self.adj.clone();
        for &(u, v) in edges {
            if let Ok(pos) = adj[u].binary_search(&v) {
                adj[u].remove(pos);
            }
            if let Ok(pos) = adj[v].binary_search(&u) {
                adj[v].remove(pos);
            }
        }
        Graph::from_sorted_adjacency(adj)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.vertex_count(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        Graph::from_edges(json.n, json.edges.iter().map(|e| (e[0], e[1])))
    }
}

/// Membership mask of `set` over `0..n`.
pub fn mask(n: usize, set: &[Vertex]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Renaming produced by vertex deletion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdMap {
    pub old_to_new: Vec<Option<Vertex>>,
    pub new_to_old: Vec<Vertex>,
}

/// `G - X`: the induced subgraph on `V(G) \ X`, ids compacted in order.
pub fn remove_vertices(g: &Graph, xs: &[Vertex]) -> (Graph, IdMap) {
    let n = g.vertex_count();
    let drop = mask(n, xs);
    let mut old_to_new = vec![None; n];
    let mut new_to_old = Vec::with_capacity(n);
    for v in 0..n {
        if !drop[v] {
            old_to_new[v] = Some(new_to_old.len());
            new_to_old.push(v);
        }
    }
    let adj = new_to_old
        .iter()
        .map(|&v| g.adj[v].iter().filter_map(|&w| old_to_new[w]).collect())
        .collect();
    (
        Graph::from_sorted_adjacency(adj),
        IdMap {
            old_to_new,
            new_to_old,
        },
    )
}

/// `G - ∇(X)`: same vertex set, every edge touching `X` removed.
pub fn remove_closed_edge_set(g: &Graph, xs: &[Vertex]) -> Graph {
    let drop = mask(g.vertex_count(), xs);
    let adj = g
        .adj
        .iter()
        .enumerate()
        .map(|(v, list)| {
            if drop[v] {
                Vec::new()
            } else {
                list.iter().copied().filter(|&w| !drop[w]).collect()
            }
        })
        .collect();
    Graph::from_sorted_adjacency(adj)
}

/// Layered neighbourhood: start from `{v}` and repeatedly replace the current
/// layer by its neighbours inside the next set of `sequence`. The last layer
/// is returned, sorted.
pub fn iterated_neighborhood(g: &Graph, v: Vertex, sequence: &[&[Vertex]]) -> Vec<Vertex> {
    let n = g.vertex_count();
    let mut layer = vec![v];
    let mut seen = vec![false; n];
    for set in sequence {
        let allowed = mask(n, set);
        let mut next = Vec::new();
        for &x in &layer {
            for &w in g.neighbors(x) {
                if allowed[w] && !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        for &w in &next {
            seen[w] = false;
        }
        next.sort_unstable();
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    layer
}

/// Path-length-two neighbourhood `N²(v)`: vertices other than `v` joined to
/// `v` by a path of two edges.
pub fn second_neighborhood(g: &Graph, v: Vertex) -> Vec<Vertex> {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for &y in g.neighbors(v) {
        for &x in g.neighbors(y) {
            if x != v && !seen[x] {
                seen[x] = true;
                out.push(x);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `d(X, Y) = e(X, Y) / (|X| |Y|)` for nonempty disjoint sets.
pub fn bipartite_density(g: &Graph, xs: &[Vertex], ys: &[Vertex]) -> Result<Rational> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidArgument(
            "density of a pair with an empty side".into(),
        ));
    }
    let in_x = mask(g.vertex_count(), xs);
    if ys.iter().any(|&y| in_x[y]) {
        return Err(Error::InvalidArgument("density sides must be disjoint".into()));
    }
    Ok(int(g.edges_between(xs, ys)) / int(xs.len() * ys.len()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
}

/// A graph with a labelled partition `V_1, …, V_t` (stored 0-based) and an
/// optional exceptional set `V_0`. Indices into parts are cyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedGraph {
    graph: Graph,
    parts: Vec<Vec<Vertex>>,
    exceptional: Vec<Vertex>,
    part_of: Vec<Option<usize>>,
}

impl PartitionedGraph {
    pub fn new(graph: Graph, parts: Vec<Vec<Vertex>>, exceptional: Vec<Vertex>) -> Result<Self> {
        if parts.len() < 3 {
            return Err(Error::InvalidGraph(format!(
                "a blow-up partition needs t >= 3 parts, got {}",
                parts.len()
            )));
        }
        let n = graph.vertex_count();
        let mut part_of = vec![None; n];
        let mut seen = vec![false; n];
        let mut parts = parts;
        for (i, part) in parts.iter_mut().enumerate() {
            part.sort_unstable();
            for &v in part.iter() {
                if v >= n || seen[v] {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} out of range or in two parts"
                    )));
                }
                seen[v] = true;
                part_of[v] = Some(i);
            }
        }
        let mut exceptional = exceptional;
        exceptional.sort_unstable();
        for &v in &exceptional {
            if v >= n || seen[v] {
                return Err(Error::InvalidGraph(format!(
                    "exceptional vertex {v} out of range or already in a part"
                )));
            }
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} belongs to no part"
            )));
        }
        Ok(PartitionedGraph {
            graph,
            parts,
            exceptional,
            part_of,
        })
    }

    /// Complete blow-up of `C_t`: parts of size `n_tilde`, every pair of
    /// cyclically consecutive parts complete bipartite, nothing else.
    pub fn complete_blowup(t: usize, n_tilde: usize) -> Self {
        let parts: Vec<Vec<Vertex>> = (0..t)
            .map(|i| (i * n_tilde..(i + 1) * n_tilde).collect())
            .collect();
        let n = t * n_tilde;
        let mut adj = vec![Vec::new(); n];
        for (i, part) in parts.iter().enumerate() {
            let prev = &parts[(i + t - 1) % t];
            let next = &parts[(i + 1) % t];
            for &v in part {
                let mut list: Vec<Vertex> = prev.iter().chain(next.iter()).copied().collect();
                list.sort_unstable();
                list.dedup();
                adj[v] = list;
            }
        }
        PartitionedGraph::new(Graph::from_sorted_adjacency(adj), parts, Vec::new())
            .expect("complete blow-up is well formed")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn t(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    pub fn exceptional(&self) -> &[Vertex] {
        &self.exceptional
    }

    /// Part at a cyclic index: `part(i + t) == part(i)`, `part(-1) == part(t - 1)`.
    pub fn part(&self, i: isize) -> &[Vertex] {
        &self.parts[self.cyclic(i)]
    }

    pub fn cyclic(&self, i: isize) -> usize {
        let t = self.t() as isize;
        (((i % t) + t) % t) as usize
    }

    pub fn part_of(&self, v: Vertex) -> Option<usize> {
        self.part_of[v]
    }

    /// Part size when all parts have equal size.
    pub fn uniform_part_size(&self) -> Option<usize> {
        let s = self.parts[0].len();
        self.parts.iter().all(|p| p.len() == s).then_some(s)
    }

    pub fn with_graph(&self, graph: Graph) -> Self {
        assert_eq!(graph.vertex_count(), self.graph.vertex_count());
        PartitionedGraph {
            graph,
            parts: self.parts.clone(),
            exceptional: self.exceptional.clone(),
            part_of: self.part_of.clone(),
        }
    }

    pub fn to_json(&self) -> PartitionedGraphJson {
        let g = self.graph.to_json();
        PartitionedGraphJson {
            n: g.n,
            edges: g.edges,
            parts: self.parts.clone(),
            v0: self.exceptional.clone(),
        }
    }

    pub fn from_json(json: &PartitionedGraphJson) -> Result<Self> {
        let graph = Graph::from_edges(json.n, json.edges.iter().map(|e| (e[0], e[1])))?;
        PartitionedGraph::new(graph, json.parts.clone(), json.v0.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionedGraphJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    pub parts: Vec<Vec<Vertex>>,
    #[serde(default)]
    pub v0: Vec<Vertex>,
}

/// Graphviz rendering. `label` and `color` are optional per-vertex styling.
pub fn to_dot(
    g: &Graph,
    name: &str,
    label: Option<&dyn Fn(Vertex) -> String>,
    color: Option<&dyn Fn(Vertex) -> &'static str>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {name} {{");
    let _ = writeln!(out, "  node [shape=circle, style=filled, fontsize=9];");
    for v in 0..g.vertex_count() {
        let text = label.map(|f| f(v)).unwrap_or_else(|| v.to_string());
        let fill = color.map(|f| f(v)).unwrap_or("white");
        let _ = writeln!(out, "  {v} [label=\"{text}\", fillcolor=\"{fill}\"];");
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}
