use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::factor::{find_ct_factor, FactorCertificate, FactorOutcome, FactorQuery};
use crate::gadget::{blowup_labeling, build_absorber, build_compact_absorber, GadgetKind, RootedGadget};
use crate::graph::{PartitionedGraph, Vertex};
use crate::random::sub_seed;

use super::template::Template;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsorberKind {
    Full,
    Compact,
    /// Full when every copy fits in the host, compact otherwise.
    #[default]
    Auto,
}

/// One absorber gadget with its blow-up labelling and both cached factors,
/// ready to be copied into a host.
#[derive(Clone, Debug)]
pub struct AbsorberModel {
    pub gadget: RootedGadget,
    /// Part of every gadget vertex; root `r_i` sits in part `i`.
    pub labels: Vec<usize>,
    pub full: FactorCertificate,
    pub minus_roots: FactorCertificate,
}

impl AbsorberModel {
    pub fn new(kind: AbsorberKind, t: usize, k: usize, budget: Duration) -> Result<Self> {
        let gadget = match kind {
            AbsorberKind::Full => build_absorber(t, k)?,
            AbsorberKind::Compact => build_compact_absorber(t)?,
            AbsorberKind::Auto => return Err(invalid("resolve the absorber kind before building")),
        };
        let labels = blowup_labeling(&gadget)?;
        if gadget.roots.iter().enumerate().any(|(i, &r)| labels[r] != i) {
            return Err(invalid("absorber labelling does not place r_i in part i"));
        }
        let solve = |target: Vec<Vertex>| -> Result<FactorCertificate> {
            let q = FactorQuery::new(t).restrict_to(&target).budget(budget).hints(&gadget.cycles);
            match find_ct_factor(&gadget.graph, &q)? {
                FactorOutcome::Found(c) => Ok(c),
                other => Err(Error::Phase {
                    phase: "embed".into(),
                    reason: format!("{} factor not found: {other:?}", gadget.kind),
                }),
            }
        };
        let all: Vec<Vertex> = (0..gadget.vertex_count()).collect();
        let full = solve(all.clone())?;
        let minus_roots = solve(all.into_iter().filter(|v| !gadget.roots.contains(v)).collect())?;
        Ok(AbsorberModel {
            gadget,
            labels,
            full,
            minus_roots,
        })
    }

    pub fn kind(&self) -> GadgetKind {
        self.gadget.kind
    }

    /// Non-root vertices per part.
    pub fn internal_per_part(&self) -> usize {
        (self.gadget.vertex_count() - self.gadget.t) / self.gadget.t
    }
}

/// Picks the concrete kind: `Auto` becomes full when every copy fits.
pub fn resolve_kind(kind: AbsorberKind, t: usize, k: usize, edges: usize, m: usize, n_tilde: usize) -> Result<AbsorberKind> {
    if kind != AbsorberKind::Auto {
        return Ok(kind);
    }
    let full = build_absorber(t, k)?.vertex_count();
    let per_part = (full - t) / t;
    Ok(if edges * per_part + 2 * m <= n_tilde {
        AbsorberKind::Full
    } else {
        AbsorberKind::Compact
    })
}

/// Template vertex to host vertex, and the root tuple `R_e` of every edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootPlan {
    pub f: Vec<Vertex>,
    pub tuples: Vec<Vec<Vertex>>,
}

/// Seeded bijection `B_i -> W_i ∪ X_i` with `f(B_i') = W_i`.
pub fn plan_roots(tpl: &Template, w: &[Vec<Vertex>], x: &[Vec<Vertex>], seed: u64) -> Result<RootPlan> {
    if w.len() != tpl.t || x.len() != tpl.t {
        return Err(invalid(format!("need {} parts of W and X", tpl.t)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = vec![0; tpl.vertex_count()];
    for i in 0..tpl.t {
        if w[i].len() != tpl.m || x[i].len() != tpl.m {
            return Err(invalid(format!(
                "part {i}: |W| = {}, |X| = {}, template needs m = {}",
                w[i].len(),
                x[i].len(),
                tpl.m
            )));
        }
        let mut wi = w[i].clone();
        let mut xi = x[i].clone();
        wi.shuffle(&mut rng);
        xi.shuffle(&mut rng);
        for j in 0..tpl.m {
            f[tpl.vertex(i, j)] = wi[j];
            f[tpl.vertex(i, tpl.m + j)] = xi[j];
        }
    }
    let tuples = tpl.edges.iter().map(|e| e.iter().map(|&b| f[b]).collect()).collect();
    Ok(RootPlan { f, tuples })
}

/// Gadget vertex `v` is placed on host vertex `map[v]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedAbsorber {
    pub roots: Vec<Vertex>,
    pub map: Vec<Vertex>,
}

impl EmbeddedAbsorber {
    pub fn internal(&self, model: &AbsorberModel) -> impl Iterator<Item = Vertex> + '_ {
        let roots = model.gadget.roots.clone();
        self.map.iter().enumerate().filter(move |(v, _)| !roots.contains(v)).map(|(_, &h)| h)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EmbedOptions {
    pub budget: Duration,
    pub rounds: usize,
    pub seed: u64,
    pub allow_shared_roots: bool,
}

/// BFS order from the roots; every later vertex has an earlier neighbour
/// whenever the gadget is connected.
fn embedding_order(g: &RootedGadget) -> Vec<Vertex> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue: VecDeque<Vertex> = g.roots.iter().copied().collect();
    for &r in &g.roots {
        seen[r] = true;
    }
    while let Some(v) = queue.pop_front() {
        if !g.roots.contains(&v) {
            order.push(v);
        }
        for &u in g.graph.neighbors(v) {
            if !std::mem::replace(&mut seen[u], true) {
                queue.push_back(u);
            }
        }
    }
    order.extend((0..n).filter(|&v| !seen[v]));
    order
}

struct Search<'a> {
    pg: &'a PartitionedGraph,
    model: &'a AbsorberModel,
    order: &'a [Vertex],
    map: Vec<Option<Vertex>>,
    used: &'a mut [bool],
    rng: ChaCha8Rng,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn candidates(&mut self, u: Vertex) -> Vec<Vertex> {
        let g = self.pg.graph();
        let placed: Vec<Vertex> = self.model.gadget.graph.neighbors(u).iter().filter_map(|&w| self.map[w]).collect();
        let part = self.model.labels[u];
        let pool: Vec<Vertex> = match placed.iter().min_by_key(|&&h| g.degree(h)) {
            Some(&anchor) => g.neighbors(anchor).to_vec(),
            None => self.pg.parts()[part].clone(),
        };
        let mut out: Vec<Vertex> = pool
            .into_iter()
            .filter(|&h| !self.used[h] && self.pg.part_of(h) == Some(part) && placed.iter().all(|&p| g.has_edge(p, h)))
            .collect();
        out.shuffle(&mut self.rng);
        out
    }

    fn go(&mut self, depth: usize) -> bool {
        let Some(&u) = self.order.get(depth) else {
            return true;
        };
        self.nodes += 1;
        if self.nodes % 1024 == 0 && Instant::now() > self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return false;
        }
        for h in self.candidates(u) {
            self.map[u] = Some(h);
            self.used[h] = true;
            if self.go(depth + 1) {
                return true;
            }
            self.used[h] = false;
            self.map[u] = None;
            if self.timed_out {
                return false;
            }
        }
        false
    }
}

fn embed_one(
    pg: &PartitionedGraph,
    model: &AbsorberModel,
    order: &[Vertex],
    roots: &[Vertex],
    used: &mut [bool],
    seed: u64,
    deadline: Instant,
) -> Option<EmbeddedAbsorber> {
    let mut map = vec![None; model.gadget.vertex_count()];
    for (i, &r) in model.gadget.roots.iter().enumerate() {
        map[r] = Some(roots[i]);
    }
    let mut s = Search {
        pg,
        model,
        order,
        map,
        used,
        rng: ChaCha8Rng::seed_from_u64(seed),
        deadline,
        nodes: 0,
        timed_out: false,
    };
    s.go(0).then(|| EmbeddedAbsorber {
        roots: roots.to_vec(),
        map: s.map.into_iter().map(|h| h.expect("complete")).collect(),
    })
}

/// Internally disjoint labelled copies of the model, one per root tuple,
/// avoiding `forbidden` and every root. Each copy is found
/// by exact backtracking over host vertices of the right part. When a copy
/// fails, the round is restarted with the failed tuples first.
pub fn embed_absorbers(
    pg: &PartitionedGraph,
    tuples: &[Vec<Vertex>],
    model: &AbsorberModel,
    forbidden: &[bool],
    opts: EmbedOptions,
) -> Result<Vec<EmbeddedAbsorber>> {
    let t = pg.t();
    let n = pg.graph().vertex_count();
    if forbidden.len() != n {
        return Err(invalid("forbidden mask has the wrong length"));
    }
    let mut root_seen = vec![false; n];
    for tuple in tuples {
        if tuple.len() != t || tuple.iter().enumerate().any(|(i, &r)| r >= n || pg.part_of(r) != Some(i)) {
            return Err(invalid(format!("root tuple {tuple:?} does not take one vertex from each part in order")));
        }
        if !opts.allow_shared_roots {
            for &r in tuple {
                if std::mem::replace(&mut root_seen[r], true) {
                    return Err(invalid(format!("root {r} is shared by two tuples")));
                }
            }
        }
    }
    let order = embedding_order(&model.gadget);
    let deadline = Instant::now() + opts.budget;
    let mut sequence: Vec<usize> = (0..tuples.len()).collect();
    let mut best = 0;
    for round in 0..opts.rounds.max(1) {
        let mut used = forbidden.to_vec();
        for &r in tuples.iter().flatten() {
            used[r] = true;
        }
        let mut placed: Vec<Option<EmbeddedAbsorber>> = vec![None; tuples.len()];
        let mut failed = Vec::new();
        for &e in &sequence {
            let seed = sub_seed(sub_seed(opts.seed, round as u64), e as u64);
            match embed_one(pg, model, &order, &tuples[e], &mut used, seed, deadline) {
                Some(emb) => placed[e] = Some(emb),
                None => failed.push(e),
            }
        }
        best = best.max(tuples.len() - failed.len());
        if failed.is_empty() {
            return Ok(placed.into_iter().map(|p| p.expect("all placed")).collect());
        }
        if Instant::now() > deadline {
            break;
        }
        let rest: Vec<usize> = sequence.iter().copied().filter(|e| !failed.contains(e)).collect();
        sequence = failed;
        sequence.extend(rest);
    }
    Err(Error::Phase {
        phase: "embed".into(),
        reason: format!("embedded at most {best} of {} absorbers", tuples.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorb::template::build_template;
    use crate::graph::mask;

    fn model(kind: AbsorberKind) -> AbsorberModel {
        AbsorberModel::new(kind, 3, 2, Duration::from_secs(60)).unwrap()
    }

    fn opts() -> EmbedOptions {
        EmbedOptions {
            budget: Duration::from_secs(30),
            rounds: 4,
            seed: 1,
            allow_shared_roots: false,
        }
    }

    #[test]
    fn roots_follow_flexibility() {
        let tpl = build_template(3, 1, 27, 0, 3).unwrap();
        let w = vec![vec![10], vec![20], vec![30]];
        let x = vec![vec![11], vec![21], vec![31]];
        let plan = plan_roots(&tpl, &w, &x, 9).unwrap();
        assert_eq!(plan.tuples, vec![vec![10, 20, 30], vec![11, 21, 31]]);
        for i in 0..3 {
            let mut image: Vec<Vertex> = (0..2).map(|j| plan.f[tpl.vertex(i, j)]).collect();
            image.sort_unstable();
            assert_eq!(image, vec![w[i][0], x[i][0]]);
        }
        assert!(plan_roots(&tpl, &[vec![10, 12], vec![20], vec![30]], &x, 9).is_err());
    }

    #[test]
    fn full_absorber_in_complete_blowup() {
        let pg = PartitionedGraph::complete_blowup(3, 150);
        let m = model(AbsorberKind::Full);
        let roots = vec![0, 150, 300];
        let forbidden = mask(450, &roots);
        let emb = embed_absorbers(&pg, std::slice::from_ref(&roots), &m, &forbidden, opts()).unwrap();
        let e = &emb[0];
        // the copy is an injective, edge-preserving, part-respecting image
        let mut image = e.map.clone();
        image.sort_unstable();
        image.dedup();
        assert_eq!(image.len(), 138);
        for (u, v) in m.gadget.graph.edges() {
            assert!(pg.graph().has_edge(e.map[u], e.map[v]));
        }
        for (v, &h) in e.map.iter().enumerate() {
            assert_eq!(pg.part_of(h), Some(m.labels[v]));
        }
        for (i, &r) in m.gadget.roots.iter().enumerate() {
            assert_eq!(e.map[r], roots[i]);
        }
    }

    #[test]
    fn bad_root_tuples() {
        let pg = PartitionedGraph::complete_blowup(3, 20);
        let m = model(AbsorberKind::Compact);
        let forbidden = vec![false; 60];
        assert!(embed_absorbers(&pg, &[vec![0, 1, 40]], &m, &forbidden, opts()).is_err());
        let shared = [vec![0, 20, 40], vec![0, 21, 41]];
        assert!(embed_absorbers(&pg, &shared, &m, &forbidden, opts()).is_err());
        let ok = EmbedOptions {
            allow_shared_roots: true,
            ..opts()
        };
        assert_eq!(embed_absorbers(&pg, &shared, &m, &forbidden, ok).unwrap().len(), 2);
    }

    #[test]
    fn host_too_small() {
        let pg = PartitionedGraph::complete_blowup(3, 6);
        let m = model(AbsorberKind::Compact);
        let tuples = [vec![0, 6, 12], vec![1, 7, 13]];
        let forbidden = mask(18, &[0, 6, 12, 1, 7, 13]);
        // two copies need 3 internal vertices per part each, only 4 are free
        let err = embed_absorbers(&pg, &tuples, &m, &forbidden, opts()).unwrap_err();
        assert!(matches!(err, Error::Phase { .. }));
    }
}
