use crate::graph::{mask, Graph, PartitionedGraph, Vertex};

/// All canonical cycles `v_1..v_t` with `v_i ∈ parts[i]` and `v_i v_{i+1}`,
/// `v_t v_1` edges. Parts are assumed disjoint.
pub fn canonical_copies(g: &Graph, parts: &[Vec<Vertex>]) -> Vec<Vec<Vertex>> {
    canonical_copies_masked(g, parts, &vec![true; g.vertex_count()])
}

pub(crate) fn canonical_copies_masked(g: &Graph, parts: &[Vec<Vertex>], allowed: &[bool]) -> Vec<Vec<Vertex>> {
    let t = parts.len();
    let n = g.vertex_count();
    let mut part_of = vec![usize::MAX; n];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            if allowed[v] {
                part_of[v] = i;
            }
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(t);
    for &s in &parts[0] {
        if allowed[s] {
            path.push(s);
            walk(g, t, &part_of, &mut path, &mut out);
            path.pop();
        }
    }
    out
}

fn walk(g: &Graph, t: usize, part_of: &[usize], path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
    let last = *path.last().expect("nonempty");
    if path.len() == t {
        if g.has_edge(last, path[0]) {
            out.push(path.clone());
        }
        return;
    }
    let want = path.len();
    for &w in g.neighbors(last) {
        if part_of[w] == want {
            path.push(w);
            walk(g, t, part_of, path, out);
            path.pop();
        }
    }
}

/// Number of canonical copies of `C_t` on the listed parts (in cyclic
/// order), counted by layered path counting from each start vertex.
pub fn enumerate_canonical_copies(pg: &PartitionedGraph, part_indices: &[usize]) -> u128 {
    let g = pg.graph();
    let t = part_indices.len();
    if t < 3 {
        return 0;
    }
    let layers: Vec<&[Vertex]> = part_indices.iter().map(|&i| pg.parts()[i].as_slice()).collect();
    let n = g.vertex_count();
    let masks: Vec<Vec<bool>> = layers.iter().map(|l| mask(n, l)).collect();
    let mut total: u128 = 0;
    let mut ways = vec![0u128; n];
    for &s in layers[0] {
        let mut frontier: Vec<Vertex> = vec![s];
        ways[s] = 1;
        for layer in 1..t {
            let mut next: Vec<Vertex> = Vec::new();
            for &u in &frontier {
                for &w in g.neighbors(u) {
                    if masks[layer][w] {
                        if ways[w] == 0 {
                            next.push(w);
                        }
                        ways[w] += ways[u];
                    }
                }
            }
            for &u in &frontier {
                ways[u] = 0;
            }
            frontier = next;
        }
        for &u in &frontier {
            if g.has_edge(u, s) {
                total += ways[u];
            }
            ways[u] = 0;
        }
    }
    total
}
