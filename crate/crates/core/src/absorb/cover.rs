use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::factor::canonical::canonical_copies_masked;
use crate::factor::{
    canonical_copies, find_ct_factor, find_saturating_matching, FactorCertificate, FactorOutcome, FactorQuery,
    Hypergraph, MatchOutcome,
};
use crate::graph::{mask, PartitionedGraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulkCover {
    pub cover: FactorCertificate,
    /// Uncovered vertices per part; all the same size.
    pub leftover: Vec<Vec<Vertex>>,
    /// The exact search produced a complete cover.
    pub exact: bool,
    /// More than `ρñ` vertices per part are left.
    pub flagged: bool,
}

/// Canonical `C_t` packing of the parts minus `avoid`. An exact cover is
/// tried first within `budget`; if it is refuted or times out, a seeded
/// greedy maximal packing is used instead.
pub fn cover_bulk(pg: &PartitionedGraph, avoid: &[Vertex], rho: f64, budget: Duration, seed: u64) -> Result<BulkCover> {
    let t = pg.t();
    let g = pg.graph();
    let n_tilde = pg.uniform_part_size().ok_or_else(|| invalid("parts differ in size"))?;
    let avoid = mask(g.vertex_count(), avoid);
    let rest: Vec<Vec<Vertex>> = pg.parts().iter().map(|p| p.iter().copied().filter(|&v| !avoid[v]).collect()).collect();
    let size = rest[0].len();
    if rest.iter().any(|p| p.len() != size) {
        return Err(invalid("parts minus avoid differ in size"));
    }
    let limit = (rho * n_tilde as f64).floor() as usize;
    let target: Vec<Vertex> = rest.iter().flatten().copied().collect();
    let q = FactorQuery::new(t).restrict_to(&target).canonical(&rest).budget(budget);
    if let FactorOutcome::Found(cover) = find_ct_factor(g, &q)? {
        return Ok(BulkCover {
            cover,
            leftover: vec![Vec::new(); t],
            exact: true,
            flagged: false,
        });
    }
    let mut cycles = canonical_copies_masked(g, &rest, &mask(g.vertex_count(), &target));
    cycles.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut used = vec![false; g.vertex_count()];
    let mut chosen = Vec::new();
    for c in cycles {
        if c.iter().all(|&v| !used[v]) {
            for &v in &c {
                used[v] = true;
            }
            chosen.push(c);
        }
    }
    let leftover: Vec<Vec<Vertex>> = rest.iter().map(|p| p.iter().copied().filter(|&v| !used[v]).collect()).collect();
    Ok(BulkCover {
        flagged: leftover[0].len() > limit,
        cover: FactorCertificate::new(t, chosen),
        leftover,
        exact: false,
    })
}

/// Covers every leftover vertex `z ∈ Z_i` by a canonical cycle whose other
/// vertices come from `W_{i+1}, …, W_{i+t-1}`, via a `Z`-saturating matching
/// in the hypergraph of all such cycles.
pub fn match_leftover(
    pg: &PartitionedGraph,
    z_parts: &[Vec<Vertex>],
    w_parts: &[Vec<Vertex>],
    budget: Duration,
) -> Result<FactorCertificate> {
    let t = pg.t();
    if z_parts.len() != t || w_parts.len() != t {
        return Err(invalid(format!("need {t} parts of Z and W")));
    }
    if z_parts.iter().any(|z| z.len() != z_parts[0].len()) {
        return Err(invalid("leftover parts differ in size"));
    }
    let side_a: Vec<Vertex> = z_parts.iter().flatten().copied().collect();
    if side_a.is_empty() {
        return Ok(FactorCertificate::empty(t));
    }
    let mut cycles = Vec::new();
    for (i, zi) in z_parts.iter().enumerate() {
        for &z in zi {
            let mut layers = vec![vec![z]];
            layers.extend((1..t).map(|d| w_parts[(i + d) % t].clone()));
            cycles.extend(canonical_copies(pg.graph(), &layers));
        }
    }
    let h = Hypergraph::new(pg.graph().vertex_count(), cycles.clone());
    match find_saturating_matching(&h, &side_a, budget)? {
        MatchOutcome::Found(m) => Ok(FactorCertificate::new(t, m.edges.iter().map(|&e| cycles[e].clone()).collect())),
        MatchOutcome::None => Err(Error::Phase {
            phase: "leftover".into(),
            reason: format!("no Z-saturating matching for {} leftover vertices", side_a.len()),
        }),
        MatchOutcome::Unknown => Err(Error::Phase {
            phase: "leftover".into(),
            reason: "matching search ran out of budget".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::verify_factor;
    use crate::graph::Graph;
    use crate::random::sample_blowup_subgraph;
    use crate::rational::ratio;

    const BUDGET: Duration = Duration::from_secs(30);

    #[test]
    fn complete_blowup_is_covered() {
        let pg = PartitionedGraph::complete_blowup(3, 10);
        let avoid = [0, 10, 20];
        let bulk = cover_bulk(&pg, &avoid, 0.0, BUDGET, 0).unwrap();
        assert!(bulk.exact && !bulk.flagged);
        let rest: Vec<Vertex> = (0..30).filter(|v| !avoid.contains(v)).collect();
        assert!(verify_factor(pg.graph(), &bulk.cover, 3, &rest));
    }

    #[test]
    fn edgeless_is_flagged() {
        let pg = PartitionedGraph::complete_blowup(3, 5);
        let pg = pg.with_graph(Graph::empty(15));
        let bulk = cover_bulk(&pg, &[], 0.1, BUDGET, 0).unwrap();
        assert!(bulk.flagged && bulk.cover.cycles.is_empty());
        assert!(bulk.leftover.iter().all(|z| z.len() == 5));
    }

    #[test]
    fn seeded_random_instance() {
        let pg = sample_blowup_subgraph(3, 30, ratio(1, 2), ratio(1, 1), 7).unwrap();
        let bulk = cover_bulk(&pg, &[], 0.1, BUDGET, 7).unwrap();
        assert!(!bulk.flagged);
        assert!(bulk.leftover.iter().all(|z| z.len() <= 3));
        let covered: Vec<Vertex> = bulk.cover.covered.clone();
        assert!(verify_factor(pg.graph(), &bulk.cover, 3, &covered));
        // leftover and cover partition the vertex set
        let mut all = covered;
        all.extend(bulk.leftover.iter().flatten());
        all.sort_unstable();
        assert_eq!(all, (0..90).collect::<Vec<_>>());
    }

    #[test]
    fn leftover_singletons() {
        let pg = PartitionedGraph::complete_blowup(3, 6);
        let z = vec![vec![0], vec![6], vec![12]];
        let w = vec![vec![1, 2], vec![7, 8], vec![13, 14]];
        let cert = match_leftover(&pg, &z, &w, BUDGET).unwrap();
        assert_eq!(cert.cycles.len(), 3);
        assert!(verify_factor(pg.graph(), &cert, 3, &cert.covered));
        // each W_j supplies (t - 1)|Z_i| = 2 vertices
        for wj in &w {
            assert_eq!(wj.iter().filter(|v| cert.covered.contains(v)).count(), 2);
        }
        let empty = match_leftover(&pg, &[vec![], vec![], vec![]], &w, BUDGET).unwrap();
        assert!(empty.cycles.is_empty());
        assert!(match_leftover(&pg, &[vec![0], vec![], vec![]], &w, BUDGET).is_err());
    }

    #[test]
    fn leftover_without_room() {
        let pg = PartitionedGraph::complete_blowup(3, 6);
        let z = vec![vec![0], vec![6], vec![12]];
        let w = vec![vec![1], vec![7], vec![13]];
        assert!(matches!(match_leftover(&pg, &z, &w, BUDGET), Err(Error::Phase { .. })));
    }
}
