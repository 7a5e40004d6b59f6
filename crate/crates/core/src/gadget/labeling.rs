use crate::error::{Error, Result};
use crate::graph::Vertex;

use super::{GadgetKind, RootedGadget};

/// Assigns every vertex a part in `0..t` so that each defining cycle walks
/// the parts in cyclic order (forwards or backwards). Cycles are processed
/// greedily: the first unprocessed cycle with a labelled vertex is oriented
/// forwards if consistent, else backwards. When nothing is labelled the
/// first vertex of the next cycle is seeded with part 0.
///
/// The result is then checked edge by edge; any failure is reported as a
/// contradiction at the offending vertex.
pub fn blowup_labeling(g: &RootedGadget) -> Result<Vec<usize>> {
    match g.kind {
        GadgetKind::Absorber
        | GadgetKind::Switcher
        | GadgetKind::CompactAbsorber
        | GadgetKind::CompactSwitcher
        | GadgetKind::CtTree => {}
        other => {
            return Err(Error::KindMismatch {
                expected: "absorber or switcher".into(),
                found: other.name().into(),
            })
        }
    }
    let labels = label_cycles(g.vertex_count(), g.t, &g.cycles)?;
    check_labeling(g, &labels)?;
    Ok(labels)
}

pub(crate) fn label_cycles(n: usize, t: usize, cycles: &[Vec<Vertex>]) -> Result<Vec<usize>> {
    let mut label: Vec<Option<usize>> = vec![None; n];
    // vertex -> cycles through it, to wake up cycles as labels appear
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in cycles.iter().enumerate() {
        for &v in c {
            through[v].push(ci);
        }
    }
    let mut done = vec![false; cycles.len()];
    let mut ready = std::collections::BTreeSet::new();
    let mut next_seed = 0;
    loop {
        let ci = match ready.pop_first() {
            Some(ci) => ci,
            None => {
                while next_seed < cycles.len() && done[next_seed] {
                    next_seed += 1;
                }
                if next_seed == cycles.len() {
                    break;
                }
                label[cycles[next_seed][0]] = Some(0);
                next_seed
            }
        };
        if done[ci] {
            continue;
        }
        done[ci] = true;
        let c = &cycles[ci];
        let (pos, base) = c
            .iter()
            .enumerate()
            .find_map(|(i, &v)| label[v].map(|l| (i, l)))
            .expect("ready cycles have a labelled vertex");
        let at = |q: usize, forward: bool| {
            let offset = (q + c.len() - pos) % c.len();
            if forward {
                (base + offset) % t
            } else {
                (base + t * c.len() - offset) % t
            }
        };
        let fits = |forward: bool| c.iter().enumerate().all(|(q, &v)| label[v].map_or(true, |l| l == at(q, forward)));
        let forward = if fits(true) {
            true
        } else if fits(false) {
            false
        } else {
            let bad = c
                .iter()
                .enumerate()
                .find(|&(q, &v)| label[v].is_some_and(|l| l != at(q, true)))
                .map_or(c[0], |(_, &v)| v);
            return Err(Error::LabelingContradiction(bad));
        };
        for (q, &v) in c.iter().enumerate() {
            if label[v].is_none() {
                label[v] = Some(at(q, forward));
                for &other in &through[v] {
                    if !done[other] {
                        ready.insert(other);
                    }
                }
            }
        }
    }
    // vertices outside every cycle do not occur in the gadgets
    label
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or(Error::LabelingContradiction(v)))
        .collect()
}

/// Every edge joins cyclically consecutive parts, every defining cycle
/// meets all `t` parts, and absorber roots lie in distinct parts.
pub fn check_labeling(g: &RootedGadget, labels: &[usize]) -> Result<()> {
    let t = g.t;
    for (u, v) in g.graph.edges() {
        let d = (labels[u] + t - labels[v]) % t;
        if d != 1 && d != t - 1 {
            return Err(Error::LabelingContradiction(u));
        }
    }
    for c in &g.cycles {
        let mut seen = vec![false; t];
        for &v in c {
            if std::mem::replace(&mut seen[labels[v]], true) {
                return Err(Error::LabelingContradiction(v));
            }
        }
    }
    if g.kind.is_absorber() {
        let mut seen = vec![false; t];
        for &r in &g.roots {
            if std::mem::replace(&mut seen[labels[r]], true) {
                return Err(Error::LabelingContradiction(r));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{build_absorber, build_compact_absorber, build_ct_tree, build_switcher};

    #[test]
    fn single_cycle_in_order() {
        let cycles = vec![vec![4, 2, 0, 1, 3]];
        assert_eq!(label_cycles(5, 5, &cycles).unwrap(), vec![2, 3, 1, 4, 0]);
    }

    #[test]
    fn gadgets_are_blowup_subgraphs() {
        for (t, k) in [(3, 2), (4, 2), (5, 3), (6, 3)] {
            let sw = build_switcher(t, k).unwrap();
            blowup_labeling(&sw).unwrap();
            let abs = build_absorber(t, k).unwrap();
            let labels = blowup_labeling(&abs).unwrap();
            let parts: Vec<usize> = abs.roots.iter().map(|&r| labels[r]).collect();
            assert_eq!(parts, (0..t).collect::<Vec<_>>());
        }
        blowup_labeling(&build_ct_tree(4, 3).unwrap()).unwrap();
        let c = build_compact_absorber(3).unwrap();
        let labels = blowup_labeling(&c).unwrap();
        assert_eq!(c.roots.iter().map(|&r| labels[r]).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn inconsistent_cycles_contradict() {
        // 0,1,2,3 forces 3 two steps from 1, but the second cycle puts them adjacent
        let cycles = vec![vec![0, 1, 2, 3], vec![0, 1, 3, 2]];
        assert!(matches!(label_cycles(4, 4, &cycles), Err(Error::LabelingContradiction(_))));
    }
}
