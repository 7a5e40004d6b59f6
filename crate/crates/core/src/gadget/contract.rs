use crate::error::{Error, Result};
use crate::graph::{remove_vertices, Graph, Vertex};

use super::{GadgetKind, Role, RoleLabel, RootedGadget};

fn expect_absorber(g: &RootedGadget) -> Result<()> {
    if g.kind != GadgetKind::Absorber {
        return Err(Error::KindMismatch {
            expected: GadgetKind::Absorber.name().into(),
            found: g.kind.name().into(),
        });
    }
    Ok(())
}

/// For each `i`, the depth-`(k-1)` `C_t`-tree rooted at `r_i`: far-side tree
/// levels `0..=k` of switcher `i`.
pub fn root_tree_vertices(abs: &RootedGadget) -> Result<Vec<Vec<Vertex>>> {
    expect_absorber(abs)?;
    let mut trees = vec![Vec::new(); abs.t];
    for (v, label) in abs.roles.iter().enumerate() {
        if let (Some(i), Role::Tree { far: true, level, .. }) = (label.switcher, label.role) {
            if level <= abs.k {
                trees[i - 1].push(v);
            }
        }
    }
    Ok(trees)
}

/// Contracts every root tree of an absorber to a single vertex. The image
/// of tree `i` keeps the id slot of `r_i`'s position in the new order.
pub fn contract_fconn(abs: &RootedGadget) -> Result<RootedGadget> {
    let trees = root_tree_vertices(abs)?;
    let n = abs.vertex_count();
    let mut tree_of = vec![None; n];
    for (i, tree) in trees.iter().enumerate() {
        for &v in tree {
            tree_of[v] = Some(i);
        }
    }
    let mut new_id = vec![usize::MAX; n];
    let mut roles = Vec::new();
    let mut roots = vec![usize::MAX; abs.t];
    for v in 0..n {
        match tree_of[v] {
            Some(i) if v == abs.roots[i] => {
                roots[i] = roles.len();
                new_id[v] = roles.len();
                roles.push(RoleLabel {
                    switcher: Some(i + 1),
                    role: Role::Contracted,
                });
            }
            Some(_) => {}
            None => {
                new_id[v] = roles.len();
                roles.push(abs.roles[v]);
            }
        }
    }
    for v in 0..n {
        if let Some(i) = tree_of[v] {
            new_id[v] = roots[i];
        }
    }
    let graph = Graph::from_edges_simplified(roles.len(), abs.graph.edges().map(|(u, v)| (new_id[u], new_id[v])));
    let cycles = abs
        .cycles
        .iter()
        .map(|c| c.iter().map(|&v| new_id[v]).collect::<Vec<_>>())
        .filter(|c| {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == c.len()
        })
        .collect();
    Ok(RootedGadget {
        graph,
        kind: GadgetKind::Fconn,
        t: abs.t,
        k: abs.k,
        roles,
        cycles,
        roots,
        s_cycle: abs.s_cycle.iter().map(|&v| new_id[v]).collect(),
    })
}

/// The absorber with every root tree deleted.
pub fn fabs_minus(abs: &RootedGadget) -> Result<RootedGadget> {
    let trees = root_tree_vertices(abs)?;
    let removed: Vec<Vertex> = trees.concat();
    let (graph, map) = remove_vertices(&abs.graph, &removed);
    let cycles = abs
        .cycles
        .iter()
        .filter_map(|c| c.iter().map(|&v| map.old_to_new[v]).collect::<Option<Vec<_>>>())
        .collect();
    Ok(RootedGadget {
        graph,
        kind: GadgetKind::FabsMinus,
        t: abs.t,
        k: abs.k,
        roles: map.new_to_old.iter().map(|&v| abs.roles[v]).collect(),
        cycles,
        roots: Vec::new(),
        s_cycle: abs.s_cycle.iter().filter_map(|&v| map.old_to_new[v]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{build_absorber, build_ct_tree, ct_tree_size};

    #[test]
    fn fconn_sizes() {
        for (t, k) in [(3, 2), (4, 2), (5, 3), (6, 3)] {
            let abs = build_absorber(t, k).unwrap();
            let tree = ct_tree_size(t, k - 1);
            let f = contract_fconn(&abs).unwrap();
            assert_eq!(f.vertex_count(), abs.vertex_count() - t * (tree - 1));
            let m = fabs_minus(&abs).unwrap();
            assert_eq!(m.vertex_count(), abs.vertex_count() - t * tree);
            assert!(f.roots.iter().all(|&r| f.roles[r].role == Role::Contracted));
        }
        let f = contract_fconn(&build_absorber(3, 2).unwrap()).unwrap();
        assert_eq!(f.vertex_count(), 120);
    }

    #[test]
    fn wrong_kind_rejected() {
        let f = contract_fconn(&build_absorber(3, 2).unwrap()).unwrap();
        assert!(matches!(contract_fconn(&f), Err(Error::KindMismatch { .. })));
        assert!(fabs_minus(&build_ct_tree(3, 2).unwrap()).is_err());
    }

    #[test]
    fn contracted_vertex_neighbours() {
        // r_i* is adjacent exactly to the level-(k+1) vertices of its tree
        let abs = build_absorber(3, 2).unwrap();
        let f = contract_fconn(&abs).unwrap();
        for &r in &f.roots {
            assert_eq!(f.graph.degree(r), 2usize.pow(3));
        }
    }
}
