use crate::graph::{Graph, Vertex};
use crate::par::{self, Exec};

/// Every `t`-cycle of `g[allowed]`, listed once: the smallest vertex first and
/// its second vertex smaller than its last.
pub fn cycles_in(g: &Graph, t: usize, allowed: &[bool], exec: Exec) -> Vec<Vec<Vertex>> {
    par::map_range(exec, g.vertex_count(), |s| {
        let mut out = Vec::new();
        if allowed[s] {
            let mut path = vec![s];
            extend(g, t, allowed, &mut path, &mut |p: &[Vertex]| p.iter().all(|&v| v >= s), &mut out);
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// The `t`-cycles of `g[allowed]` through `v`, each starting at `v` and with
/// second vertex smaller than its last.
pub fn cycles_through(g: &Graph, t: usize, v: Vertex, allowed: &[bool]) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    if allowed[v] {
        let mut path = vec![v];
        extend(g, t, allowed, &mut path, &mut |_: &[Vertex]| true, &mut out);
    }
    out
}

fn extend(
    g: &Graph,
    t: usize,
    allowed: &[bool],
    path: &mut Vec<Vertex>,
    keep: &mut dyn FnMut(&[Vertex]) -> bool,
    out: &mut Vec<Vec<Vertex>>,
) {
    let s = path[0];
    let last = *path.last().expect("path starts at s");
    if path.len() == t {
        if g.has_edge(last, s) && path[1] < path[t - 1] && keep(path) {
            out.push(path.clone());
        }
        return;
    }
    for &w in g.neighbors(last) {
        if !allowed[w] || w == s || path.contains(&w) {
            continue;
        }
        path.push(w);
        if keep(path) {
            extend(g, t, allowed, path, keep, out);
        }
        path.pop();
    }
}
