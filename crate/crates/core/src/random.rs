//! Seeded random graphs, the two adversarial deletions, and empirical probes
//! of the random-graph lemmas. Probes report margins; they never claim a
//! high-probability statement.

use std::time::Duration;

use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::factor::{
    cycles_through, find_ct_factor, find_saturating_matching, FactorCertificate, FactorOutcome, FactorQuery,
    Hypergraph, MatchOutcome,
};
use crate::graph::{mask, remove_closed_edge_set, second_neighborhood, Graph, PartitionedGraph, Vertex};
use crate::par::{map_range, Exec};
use crate::rational::{int, to_f64, Exact, Rational};
use crate::regularity::{expansion_profile, RegularityParams};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// The splitmix64 finaliser.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent sub-seed for trial `i` of a run seeded with `master`.
pub fn sub_seed(master: u64, i: u64) -> u64 {
    mix(master ^ mix(i.wrapping_add(1).wrapping_mul(GOLDEN)))
}

fn row_key(seed: u64, u: Vertex) -> u64 {
    mix(mix(seed.wrapping_add(GOLDEN)) ^ ((u as u64) << 32))
}

/// Hash of the pair `{u, v}` under `seed`; symmetric in `u`, `v`.
pub fn pair_hash(seed: u64, u: Vertex, v: Vertex) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    mix(row_key(seed, a) ^ (b as u64).wrapping_mul(GOLDEN))
}

/// `⌊p·2^64⌋`; a pair is present iff its hash is below it.
fn threshold(p: &Rational) -> u128 {
    if *p >= Rational::one() {
        return 1u128 << 64;
    }
    if *p <= Rational::zero() {
        return 0;
    }
    let (num, den) = (*p.numer() as u128, *p.denom() as u128);
    if num < 1u128 << 63 {
        (num << 64) / den
    } else {
        (to_f64(p) * 2f64.powi(64)) as u128
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnpSample {
    pub graph: Graph,
    pub n: usize,
    pub p: Exact,
    pub seed: u64,
    pub edge_count: usize,
}

fn check_probability(p: &Rational) -> Result<()> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(invalid(format!("edge probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// `G(n, p)`: pair `{u, v}` is present iff `pair_hash(seed, u, v) < ⌊p·2^64⌋`.
/// Rows are generated independently, so the output does not depend on the
/// execution mode.
pub fn sample_gnp(n: usize, p: Rational, seed: u64, exec: Exec) -> Result<GnpSample> {
    check_probability(&p)?;
    let thr = threshold(&p);
    let upper = map_range(exec, n, |u| {
        let key = row_key(seed, u);
        (u + 1..n)
            .filter(|&v| ((mix(key ^ (v as u64).wrapping_mul(GOLDEN))) as u128) < thr)
            .collect::<Vec<Vertex>>()
    });
    let graph = Graph::from_edges(n, upper.iter().enumerate().flat_map(|(u, row)| row.iter().map(move |&v| (u, v))))?;
    Ok(GnpSample {
        edge_count: graph.edge_count(),
        graph,
        n,
        p: Exact(p),
        seed,
    })
}

/// Random subgraph of the complete blow-up of `C_t`: each pair between
/// cyclically consecutive parts is kept with probability `αp`.
pub fn sample_blowup_subgraph(t: usize, n_tilde: usize, p: Rational, alpha: Rational, seed: u64) -> Result<PartitionedGraph> {
    if t < 3 {
        return Err(invalid(format!("a blow-up of C_t needs t >= 3, got {t}")));
    }
    let q = (p * alpha).min(Rational::one());
    check_probability(&q)?;
    let thr = threshold(&q);
    let full = PartitionedGraph::complete_blowup(t, n_tilde);
    let keep: Vec<(Vertex, Vertex)> = full
        .graph()
        .edges()
        .filter(|&(u, v)| (pair_hash(seed, u, v) as u128) >= thr)
        .collect();
    Ok(full.with_graph(full.graph().remove_edges(&keep)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackTarget {
    Vertex(Vertex),
    Set(Vec<Vertex>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PostProperty {
    pub name: String,
    /// `None` when a search ran out of budget.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackReport {
    pub deleted_edges: usize,
    pub max_deleted_degree_fraction: Exact,
    /// The same maximum over vertices that are neither the target nor its
    /// neighbours; `None` for set targets.
    pub max_fraction_beyond_neighbors: Option<Exact>,
    /// Mean deleted fraction over `N²(v)` minus `N(v)`, the quantity the
    /// `(np)²p / np` estimate describes.
    pub mean_fraction_second_neighborhood: Option<f64>,
    pub target: AttackTarget,
    pub post_property: PostProperty,
}

/// `max_v deleted(v) / deg(v)` over vertices of positive original degree.
pub fn max_deleted_fraction(before: &Graph, after: &Graph) -> Rational {
    max_fraction_where(before, after, |_| true)
}

fn max_fraction_where(before: &Graph, after: &Graph, keep: impl Fn(Vertex) -> bool) -> Rational {
    (0..before.vertex_count())
        .filter(|&v| before.degree(v) > 0 && keep(v))
        .map(|v| int(before.degree(v) - after.degree(v)) / int(before.degree(v)))
        .max()
        .unwrap_or_else(Rational::zero)
}

fn mean_fraction(before: &Graph, after: &Graph, vs: impl Iterator<Item = Vertex>) -> Option<f64> {
    let (sum, count) = vs
        .filter(|&u| before.degree(u) > 0)
        .map(|u| (before.degree(u) - after.degree(u)) as f64 / before.degree(u) as f64)
        .fold((0.0, 0usize), |(s, c), f| (s + f, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Maximum-degree vertex, lowest id on ties.
pub fn default_target(g: &Graph) -> Option<Vertex> {
    (0..g.vertex_count()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
}

/// Complete search for a 5-cycle through `v`.
pub fn on_five_cycle(g: &Graph, v: Vertex) -> bool {
    let nb = g.neighbors(v);
    for &a in nb {
        for &b in g.neighbors(a) {
            if b == v {
                continue;
            }
            for &c in g.neighbors(b) {
                if c == v || c == a {
                    continue;
                }
                for &d in g.neighbors(c) {
                    if d != v && d != a && d != b && g.has_edge(d, v) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Deletes every edge inside `N²(v)`, which kills every `C_5` through `v`.
pub fn attack_second_neighborhood(g: &Graph, v: Vertex) -> Result<(Graph, AttackReport)> {
    if v >= g.vertex_count() {
        return Err(invalid(format!("target {v} out of range")));
    }
    let n2 = second_neighborhood(g, v);
    let inside = mask(g.vertex_count(), &n2);
    let doomed: Vec<(Vertex, Vertex)> = n2
        .iter()
        .flat_map(|&x| g.neighbors(x).iter().filter(move |&&y| x < y).map(move |&y| (x, y)))
        .filter(|&(_, y)| inside[y])
        .collect();
    let after = g.remove_edges(&doomed);
    let near = mask(g.vertex_count(), g.neighbors(v));
    let report = AttackReport {
        deleted_edges: doomed.len(),
        max_deleted_degree_fraction: Exact(max_deleted_fraction(g, &after)),
        max_fraction_beyond_neighbors: Some(Exact(max_fraction_where(g, &after, |u| u != v && !near[u]))),
        mean_fraction_second_neighborhood: mean_fraction(g, &after, n2.iter().copied().filter(|&u| !near[u])),
        target: AttackTarget::Vertex(v),
        post_property: PostProperty {
            name: "target_on_c5".into(),
            holds: Some(on_five_cycle(&after, v)),
        },
    };
    Ok((after, report))
}

/// Disconnects a set `S` of size `n/2 - 1` from the rest and searches for a
/// `C_t`-factor of what is left. `S` defaults to the lowest ids.
pub fn attack_half_cut(g: &Graph, t: usize, set: Option<&[Vertex]>, budget: Duration) -> Result<(Graph, AttackReport)> {
    let n = g.vertex_count();
    if n % 2 != 0 || n < 2 {
        return Err(invalid(format!("half cut needs an even vertex count, got {n}")));
    }
    let s: Vec<Vertex> = match set {
        Some(s) => {
            if s.len() != n / 2 - 1 || s.iter().any(|&v| v >= n) {
                return Err(invalid(format!("cut set must have {} vertices in range", n / 2 - 1)));
            }
            s.to_vec()
        }
        None => (0..n / 2 - 1).collect(),
    };
    let in_s = mask(n, &s);
    let doomed: Vec<(Vertex, Vertex)> = g.edges().filter(|&(u, v)| in_s[u] != in_s[v]).collect();
    let after = g.remove_edges(&doomed);
    let holds = if n % t != 0 {
        Some(false)
    } else {
        match find_ct_factor(&after, &FactorQuery::new(t).budget(budget))? {
            FactorOutcome::Found(_) => Some(true),
            FactorOutcome::None => Some(false),
            FactorOutcome::Unknown => None,
        }
    };
    let report = AttackReport {
        deleted_edges: doomed.len(),
        max_deleted_degree_fraction: Exact(max_deleted_fraction(g, &after)),
        max_fraction_beyond_neighbors: None,
        mean_fraction_second_neighborhood: None,
        target: AttackTarget::Set(s),
        post_property: PostProperty {
            name: "c_t_factor_exists".into(),
            holds,
        },
    };
    Ok((after, report))
}

/// One measured quantity against its threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub quantity: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// CSV with header `trial,quantity,threshold,pass`.
pub fn rows_csv(rows: &[TrialRow]) -> String {
    let mut s = String::from("trial,quantity,threshold,pass\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.trial, r.quantity, r.threshold, r.pass));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeBoundReport {
    pub c: f64,
    pub trials: usize,
    pub violations: usize,
    /// Smallest `threshold - quantity` seen.
    pub min_margin: f64,
    pub rows: Vec<TrialRow>,
}

/// Random (possibly overlapping) set pairs checked against
/// `e(X, Y) <= |X||Y|p + c·sqrt(|X||Y|np)`.
pub fn empirical_edge_bound(sample: &GnpSample, trials: usize, c: f64, seed: u64, exec: Exec) -> Result<EdgeBoundReport> {
    let p = to_f64(&sample.p.0);
    if p > 0.99 {
        return Err(invalid(format!("edge bound probe needs p <= 0.99, got {p}")));
    }
    let n = sample.n;
    let g = &sample.graph;
    let rows = map_range(exec, trials, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, trial as u64));
        let a = rng.gen_range(0..=n);
        let b = rng.gen_range(0..=n);
        let xs: Vec<Vertex> = sample_ids(&mut rng, n, a);
        let ys: Vec<Vertex> = sample_ids(&mut rng, n, b);
        let e = g.edges_between(&xs, &ys) as f64;
        let xy = (a * b) as f64;
        let bound = xy * p + c * (xy * n as f64 * p).sqrt();
        TrialRow {
            trial,
            quantity: e,
            threshold: bound,
            pass: e <= bound,
        }
    });
    Ok(EdgeBoundReport {
        c,
        trials,
        violations: rows.iter().filter(|r| !r.pass).count(),
        min_margin: rows.iter().map(|r| r.threshold - r.quantity).fold(f64::INFINITY, f64::min),
        rows,
    })
}

fn sample_ids(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vertex> {
    let mut v: Vec<Vertex> = sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

/// `N^k(X)`: vertices joined to some `x ∈ X` by a path with `k` edges. Exact
/// for `k <= 2`; for larger `k` the walk layers are returned (a superset).
pub fn kth_neighborhood(g: &Graph, xs: &[Vertex], k: usize) -> Vec<Vertex> {
    let n = g.vertex_count();
    let mut hit = vec![false; n];
    let mut out = Vec::new();
    if k == 2 {
        for &x in xs {
            for &y in g.neighbors(x) {
                for &w in g.neighbors(y) {
                    if w != x && !hit[w] {
                        hit[w] = true;
                        out.push(w);
                    }
                }
            }
        }
    } else {
        let mut layer = xs.to_vec();
        for _ in 0..k {
            let mut next = Vec::new();
            for &x in &layer {
                for &w in g.neighbors(x) {
                    if !hit[w] {
                        hit[w] = true;
                        next.push(w);
                    }
                }
            }
            for &w in &next {
                hit[w] = false;
            }
            layer = next;
        }
        out = layer;
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetRegime {
    /// `|X|` drawn from `1..=⌊ν/(n^{k-1}p^k)⌋`.
    Bounded,
    /// The bound is below one; singletons are used instead.
    SingletonFallback,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KExpansionReport {
    pub k: usize,
    pub nu: f64,
    pub regime: SetRegime,
    pub size_bound: f64,
    pub exact_paths: bool,
    pub passes: usize,
    pub trials: usize,
    pub rows: Vec<TrialRow>,
}

impl KExpansionReport {
    pub fn pass_fraction(&self) -> f64 {
        self.passes as f64 / self.trials.max(1) as f64
    }
}

/// Samples sets `X` and checks `|N^k(X)| >= (1-kν)|X|(np)^k`.
pub fn empirical_k_expansion(
    sample: &GnpSample,
    k: usize,
    nu: f64,
    trials: usize,
    seed: u64,
    singleton_fallback: bool,
    exec: Exec,
) -> Result<KExpansionReport> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let n = sample.n as f64;
    let p = to_f64(&sample.p.0);
    let size_bound = nu / (n.powi(k as i32 - 1) * p.powi(k as i32));
    let regime = if size_bound >= 1.0 {
        SetRegime::Bounded
    } else if singleton_fallback {
        SetRegime::SingletonFallback
    } else {
        return Err(invalid(format!("set-size bound {size_bound} is below 1 and singletons are disabled")));
    };
    let max_size = (size_bound.floor() as usize).clamp(1, sample.n.max(1));
    let per_vertex = (n * p).powi(k as i32);
    let rows = map_range(exec, trials, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, trial as u64));
        let size = match regime {
            SetRegime::Bounded => rng.gen_range(1..=max_size),
            SetRegime::SingletonFallback => 1,
        };
        let xs = sample_ids(&mut rng, sample.n, size);
        let reach = kth_neighborhood(&sample.graph, &xs, k).len() as f64;
        let thr = (1.0 - k as f64 * nu) * size as f64 * per_vertex;
        TrialRow {
            trial,
            quantity: reach,
            threshold: thr,
            pass: reach >= thr,
        }
    });
    Ok(KExpansionReport {
        k,
        nu,
        regime,
        size_bound,
        exact_paths: k <= 2,
        passes: rows.iter().filter(|r| r.pass).count(),
        trials,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustRow {
    pub q: usize,
    /// Vertices of `V_1` that were `(γ,k)`-expanding before the deletion.
    pub u_size: usize,
    pub newly_failing: usize,
    /// `newly_failing · αp`: compared against a constant `K`, the large-set
    /// lemma allows `K/p` failures.
    pub failing_times_p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustReport {
    pub k: usize,
    pub gamma: Exact,
    pub rows: Vec<RobustRow>,
}

/// Forward `(γ,k)`-expansion from part 0 through parts `1..=k`.
fn forward_expanding(pg: &PartitionedGraph, v: Vertex, k: usize, gamma: Rational, params: &RegularityParams) -> bool {
    expansion_profile(pg, v, k, gamma, params)
        .map(|r| r.forward.iter().all(|l| l.pass))
        .unwrap_or(false)
}

/// Vertices of `u` that stop being forward-expanding once `∇(Q)` is deleted.
pub fn newly_non_expanding(
    pg: &PartitionedGraph,
    u: &[Vertex],
    q: &[Vertex],
    k: usize,
    gamma: Rational,
    params: &RegularityParams,
) -> Vec<Vertex> {
    let after = pg.with_graph(remove_closed_edge_set(pg.graph(), q));
    u.iter().copied().filter(|&v| !forward_expanding(&after, v, k, gamma, params)).collect()
}

/// For each size in the schedule, deletes `∇(Q)` for a random `Q` inside
/// parts `1..=k` and counts the vertices of part 0 that lose expansion.
pub fn robust_expansion_experiment(
    pg: &PartitionedGraph,
    k: usize,
    gamma: Rational,
    params: &RegularityParams,
    q_schedule: &[usize],
    seed: u64,
) -> Result<RobustReport> {
    if k == 0 || k >= pg.t() {
        return Err(invalid(format!("need 1 <= k < t, got k = {k}")));
    }
    let u: Vec<Vertex> = pg.parts()[0]
        .iter()
        .copied()
        .filter(|&v| forward_expanding(pg, v, k, gamma, params))
        .collect();
    let pool: Vec<Vertex> = (1..=k).flat_map(|i| pg.parts()[i].iter().copied()).collect();
    let mut rows = Vec::new();
    for (i, &q) in q_schedule.iter().enumerate() {
        if q > pool.len() {
            return Err(invalid(format!("|Q| = {q} exceeds the {} available vertices", pool.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, i as u64));
        let qs: Vec<Vertex> = sample(&mut rng, pool.len(), q).into_iter().map(|j| pool[j]).collect();
        let failing = newly_non_expanding(pg, &u, &qs, k, gamma, params).len();
        rows.push(RobustRow {
            q,
            u_size: u.len(),
            newly_failing: failing,
            failing_times_p: failing as f64 * to_f64(&(params.alpha() * params.p())),
        });
    }
    Ok(RobustReport {
        k,
        gamma: Exact(gamma),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHypotheses {
    /// `deg(v, U) >= α|U|p` for every `v ∈ X ∪ U`.
    pub min_degree: bool,
    /// Vertices of `U` below `(1/2 + α)|U|p` inside `U`.
    pub low_inner_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCoverReport {
    pub hypotheses: DegreeHypotheses,
    pub hyperedges: usize,
    pub cover: Option<FactorCertificate>,
    pub timed_out: bool,
}

/// Disjoint `t`-cycles in `G[X ∪ U]` covering `X`, each meeting `X` once: an
/// `X`-saturating matching in the hypergraph with an edge `{x} ∪ Y` whenever
/// `G[{x} ∪ Y]` holds a `t`-cycle through `x`.
pub fn min_degree_cycle_cover(
    g: &Graph,
    xs: &[Vertex],
    us: &[Vertex],
    t: usize,
    alpha: Rational,
    p: Rational,
    budget: Duration,
) -> Result<CycleCoverReport> {
    let n = g.vertex_count();
    if t < 3 {
        return Err(invalid(format!("cycle length must be >= 3, got {t}")));
    }
    let in_x = mask(n, xs);
    let in_u = mask(n, us);
    if us.iter().any(|&u| in_x[u]) {
        return Err(invalid("X and U must be disjoint"));
    }
    let u_len = int(us.len());
    let floor = alpha * u_len * p;
    let inner = (Rational::new(1, 2) + alpha) * u_len * p;
    let hypotheses = DegreeHypotheses {
        min_degree: xs.iter().chain(us).all(|&v| int(g.degree_into(v, &in_u)) >= floor),
        low_inner_degree: us.iter().filter(|&&u| int(g.degree_into(u, &in_u)) < inner).count(),
    };
    let mut edges: Vec<Vec<Vertex>> = Vec::new();
    let mut cycle_of: Vec<Vec<Vertex>> = Vec::new();
    for &x in xs {
        let mut allowed = in_u.clone();
        allowed[x] = true;
        let mut seen = std::collections::BTreeSet::new();
        for c in cycles_through(g, t, x, &allowed) {
            let mut key = c.clone();
            key.sort_unstable();
            if seen.insert(key.clone()) {
                edges.push(key);
                cycle_of.push(c);
            }
        }
    }
    let hyperedges = edges.len();
    let h = Hypergraph::new(n, edges);
    let (cover, timed_out) = match find_saturating_matching(&h, xs, budget)? {
        MatchOutcome::Found(m) => {
            let cycles = m.edges.iter().map(|&e| cycle_of[e].clone()).collect();
            (Some(FactorCertificate::new(t, cycles)), false)
        }
        MatchOutcome::None => (None, false),
        MatchOutcome::Unknown => (None, true),
    };
    Ok(CycleCoverReport {
        hypotheses,
        hyperedges,
        cover,
        timed_out,
    })
}
