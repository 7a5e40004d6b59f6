//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! on any failure not listed in `KNOWN_GAPS`. Tolerances are pinned below.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctfactor_cli::manifest::RunManifest;
use ctfactor_core::absorb::{build_template, run_pipeline_traced, verify_template, AbsorberKind, PipelineConfig, Template};
use ctfactor_core::density::{two_density_closure, two_density_flow};
use ctfactor_core::factor::{
    check_haxell_condition, find_ct_factor, find_saturating_matching, FactorOutcome, FactorQuery, Hypergraph, MatchOutcome,
};
use ctfactor_core::gadget::{build_absorber, build_switcher, contract_fconn};
use ctfactor_core::par::Exec;
use ctfactor_core::random::{
    attack_half_cut, attack_second_neighborhood, default_target, empirical_k_expansion, kth_neighborhood, sample_blowup_subgraph,
    sample_gnp, sub_seed, AttackTarget,
};
use ctfactor_core::rational::{parse_density, ratio, to_f64, Exact};
use ctfactor_core::regularity::{
    check_gexp_membership, check_regular_exact, check_regular_sampled, witness_is_violation, RegularityParams, SampledVerdict,
    Sampling, DEFAULT_SAMPLED_TRIALS,
};
use ctfactor_core::{Graph, PartitionedGraph, Rational, Vertex};

const PAIRS: [(usize, usize); 4] = [(3, 2), (4, 2), (5, 3), (6, 3)];

const C1_INSTANCE_LIMIT: Duration = Duration::from_secs(120);
const C2_RANDOM_GRAPHS: usize = 1000;
const C2_MAX_VERTICES: usize = 12;
/// Brute-force 2-density is skipped above this many vertices.
const C2_ORACLE_CAP: usize = 20;
/// The closure route probes every edge with a fresh min-cut, so the larger
/// `F_conn` graphs are cross-checked by the flow route alone.
const C2_CLOSURE_CAP: usize = 1000;
const C3_LIMIT: Duration = Duration::from_secs(60);
const C3_DEGREE_CAP: usize = 64_000;
const C4_N_TILDE_M1: usize = 150;
const C4_N_TILDE_M2: usize = 456;
const C5_SEEDS: u64 = 10;
const C5_MIN_SUCCESSES: usize = 9;
const C5_RUN_LIMIT: Duration = Duration::from_secs(600);
const C6_INSTANCES: usize = 500;
const C6_ORACLE_EDGES: usize = 10;
const C7_N: usize = 10_000;
const C7_SEEDS: u64 = 5;
const C7_MAX_FRACTION: f64 = 0.5;
const C8_PAIRS: usize = 200;
const C8_EXPANSION_N: usize = 100_000;
const C8_EXPANSION_TRIALS: usize = 100;
/// `1 - kν = 0.8` at `k = 2`.
const C8_NU: f64 = 0.1;
const C8_MIN_SHARE: f64 = 0.9;
const C8_LIMIT: Duration = Duration::from_secs(300);

/// Criteria that fail at desk scale for reasons recorded in the decisions
/// ledger. They still print FAIL; a criterion listed here that passes is
/// reported too, so the list cannot go stale silently.
const KNOWN_GAPS: &[usize] = &[7];

struct Verdict {
    pass: bool,
    detail: String,
    /// A failure of a hard clause is never excused by `KNOWN_GAPS`.
    hard_ok: bool,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Verdict { pass, detail, hard_ok: pass }
    }
}

// ---------------------------------------------------------------- oracles

fn edge_set(g: &Graph) -> HashSet<(Vertex, Vertex)> {
    g.edges().flat_map(|(u, v)| [(u, v), (v, u)]).collect()
}

/// Disjoint `t`-cycles of `g` covering exactly `cover`.
fn is_factor(g: &Graph, cycles: &[Vec<Vertex>], t: usize, cover: &[Vertex]) -> bool {
    let edges = edge_set(g);
    let mut seen = BTreeSet::new();
    for c in cycles {
        if c.len() != t {
            return false;
        }
        if (0..t).any(|i| !edges.contains(&(c[i], c[(i + 1) % t]))) {
            return false;
        }
        if !c.iter().all(|&v| seen.insert(v)) {
            return false;
        }
    }
    seen == cover.iter().copied().collect()
}

/// `max (e-1)/(v-2)` over vertex subsets inducing at least two edges, as a
/// reduced `(num, den)` pair compared by cross-multiplication.
fn brute_m2(g: &Graph) -> Rational {
    let n = g.vertex_count();
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().map(|&w| 1u32 << w).sum()).collect();
    let (mut bn, mut bd) = (0i64, 1i64);
    for set in 0u32..(1 << n) {
        let v = set.count_ones() as i64;
        if v < 3 {
            continue;
        }
        let e: i64 = (0..n).filter(|&x| set >> x & 1 == 1).map(|x| (adj[x] & set).count_ones() as i64).sum::<i64>() / 2;
        if e >= 2 && (e - 1) * bd > bn * (v - 2) {
            bn = e - 1;
            bd = v - 2;
        }
    }
    Rational::new(bn as i128, bd as i128)
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

/// Every balanced deletion of flexible template vertices leaves a perfect
/// matching, by plain recursion over the edge list.
fn template_recount(tpl: &Template) -> (bool, usize) {
    let (t, m) = (tpl.t, tpl.m);
    let flexible: Vec<Vec<usize>> = (0..t).map(|i| (0..m).map(|j| i * 2 * m + j).collect()).collect();
    let mut all_ok = true;
    let mut count = 0;
    for s in 0..=m {
        let choices = subsets_of_size(m, s);
        let mut pick = vec![0usize; t];
        loop {
            let mut removed = vec![false; t * 2 * m];
            for i in 0..t {
                for &j in &choices[pick[i]] {
                    removed[flexible[i][j]] = true;
                }
            }
            count += 1;
            all_ok &= perfect_matching_exists(&tpl.edges, &mut removed);
            // odometer over the per-part choices
            let mut i = 0;
            while i < t && pick[i] + 1 == choices.len() {
                pick[i] = 0;
                i += 1;
            }
            if i == t {
                break;
            }
            pick[i] += 1;
        }
    }
    (all_ok, count)
}

fn subsets_of_size(m: usize, s: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m).filter(|b| b.count_ones() as usize == s).map(|b| (0..m).filter(|&j| b >> j & 1 == 1).collect()).collect()
}

fn perfect_matching_exists(edges: &[Vec<usize>], used: &mut Vec<bool>) -> bool {
    let Some(first) = used.iter().position(|&u| !u) else {
        return true;
    };
    for e in edges.iter().filter(|e| e.contains(&first)) {
        if e.iter().all(|&v| !used[v]) {
            e.iter().for_each(|&v| used[v] = true);
            let ok = perfect_matching_exists(edges, used);
            e.iter().for_each(|&v| used[v] = false);
            if ok {
                return true;
            }
        }
    }
    false
}

/// Saturating matching by exhaustive search over edge subsets.
fn brute_saturating(h: &Hypergraph, a: &[Vertex]) -> bool {
    let m = h.edges.len();
    (0u32..1 << m).any(|set| {
        if set.count_ones() as usize != a.len() {
            return false;
        }
        let mut hit = vec![false; h.n];
        for i in (0..m).filter(|&i| set >> i & 1 == 1) {
            for &v in &h.edges[i] {
                if std::mem::replace(&mut hit[v], true) {
                    return false;
                }
            }
        }
        a.iter().all(|&v| hit[v])
    })
}

/// The Hall-type condition enumerated over every `(A', B')`.
fn brute_haxell(h: &Hypergraph, a: &[Vertex], ell: usize) -> bool {
    let b: Vec<Vertex> = (0..h.n).filter(|v| !a.contains(v)).collect();
    for sub_a in 1u32..1 << a.len() {
        let a_prime: Vec<Vertex> = (0..a.len()).filter(|&i| sub_a >> i & 1 == 1).map(|i| a[i]).collect();
        let limit = (2 * ell - 3) * (a_prime.len() - 1);
        for sub_b in 0u32..1 << b.len() {
            if sub_b.count_ones() as usize > limit {
                continue;
            }
            let b_prime: Vec<Vertex> = (0..b.len()).filter(|&i| sub_b >> i & 1 == 1).map(|i| b[i]).collect();
            let escapes = h.edges.iter().any(|e| e.iter().any(|v| a_prime.contains(v)) && !e.iter().any(|v| b_prime.contains(v)));
            if !escapes {
                return false;
            }
        }
    }
    true
}

fn valid_matching(h: &Hypergraph, a: &[Vertex], chosen: &[usize]) -> bool {
    let mut hit = vec![false; h.n];
    for &i in chosen {
        for &v in &h.edges[i] {
            if std::mem::replace(&mut hit[v], true) {
                return false;
            }
        }
    }
    chosen.len() == a.len() && a.iter().all(|&v| hit[v])
}

/// A 5-cycle through `v`: an edge `bc` avoiding `v` plus distinct common
/// neighbours `a ∈ N(v) ∩ N(b)` and `d ∈ N(v) ∩ N(c)`.
fn c5_through(g: &Graph, v: Vertex) -> bool {
    let near: HashSet<Vertex> = g.neighbors(v).iter().copied().collect();
    let common = |x: Vertex, skip: Vertex| -> Vec<Vertex> {
        g.neighbors(x).iter().copied().filter(|w| near.contains(w) && *w != skip).collect()
    };
    g.edges().filter(|&(b, c)| b != v && c != v).any(|(b, c)| {
        let a = common(b, c);
        let d = common(c, b);
        !a.is_empty() && !d.is_empty() && !(a.len() == 1 && d.len() == 1 && a[0] == d[0])
    })
}

/// Admissible subsets of both sides, by enumeration.
fn brute_regular(g: &Graph, xs: &[Vertex], ys: &[Vertex], eps: Rational, p: Rational) -> bool {
    let edges = edge_set(g);
    let e = |a: &[Vertex], b: &[Vertex]| a.iter().map(|&x| b.iter().filter(|&&y| edges.contains(&(x, y))).count()).sum::<usize>();
    let d = Rational::new(e(xs, ys) as i128, (xs.len() * ys.len()) as i128);
    let ceil = |s: usize| (eps * Rational::from_integer(s as i128)).ceil().to_integer().max(1) as u32;
    let (sx, sy) = (ceil(xs.len()), ceil(ys.len()));
    for ma in 1u32..1 << xs.len() {
        if ma.count_ones() < sx {
            continue;
        }
        let a: Vec<Vertex> = (0..xs.len()).filter(|&i| ma >> i & 1 == 1).map(|i| xs[i]).collect();
        for mb in 1u32..1 << ys.len() {
            if mb.count_ones() < sy {
                continue;
            }
            let b: Vec<Vertex> = (0..ys.len()).filter(|&i| mb >> i & 1 == 1).map(|i| ys[i]).collect();
            let dd = Rational::new(e(&a, &b) as i128, (a.len() * b.len()) as i128);
            if dd - d > eps * p || d - dd > eps * p {
                return false;
            }
        }
    }
    true
}

// --------------------------------------------------------------- criteria

fn criterion_1() -> Verdict {
    let mut failed = Vec::new();
    let mut slowest = Duration::ZERO;
    for (t, k) in PAIRS {
        let sw = build_switcher(t, k).unwrap();
        let abs = build_absorber(t, k).unwrap();
        let instances = [
            ("F_sw-v", &sw, vec![sw.roots[0]]),
            ("F_sw-v'", &sw, vec![sw.roots[1]]),
            ("F_abs", &abs, vec![]),
            ("F_abs-R", &abs, abs.roots.clone()),
        ];
        for (name, gadget, removed) in instances {
            let start = Instant::now();
            let cover: Vec<Vertex> = (0..gadget.vertex_count()).filter(|v| !removed.contains(v)).collect();
            let q = FactorQuery::new(t).restrict_to(&cover).budget(C1_INSTANCE_LIMIT).hints(&gadget.cycles);
            let ok = match find_ct_factor(&gadget.graph, &q).unwrap() {
                FactorOutcome::Found(cert) => is_factor(&gadget.graph, &cert.cycles, t, &cover),
                _ => false,
            };
            let took = start.elapsed();
            slowest = slowest.max(took);
            if !ok || took > C1_INSTANCE_LIMIT {
                failed.push(format!("({t},{k}) {name}"));
            }
        }
    }
    Verdict::new(
        failed.is_empty(),
        format!("16 instances, failed {failed:?}, slowest {}ms", slowest.as_millis()),
    )
}

fn criterion_2() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for (t, k) in PAIRS {
        let fconn = contract_fconn(&build_absorber(t, k).unwrap()).unwrap();
        let flow = two_density_flow(&fconn.graph).unwrap().value;
        let n = fconn.vertex_count();
        let closure_ok = n > C2_CLOSURE_CAP || two_density_closure(&fconn.graph, Exec::default()).unwrap().value == flow;
        let bound = Rational::new(k as i128, k as i128 - 1);
        let oracle_ok = n > C2_ORACLE_CAP || brute_m2(&fconn.graph) == flow;
        pass &= flow <= bound && closure_ok && oracle_ok;
        notes.push(format!("({t},{k}) m2={flow}"));
    }
    for t in 3..=8 {
        let v = two_density_flow(&Graph::cycle(t)).unwrap().value;
        pass &= v == Rational::new(t as i128 - 1, t as i128 - 2);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut checked = 0;
    while checked < C2_RANDOM_GRAPHS {
        let n = rng.gen_range(3..=C2_MAX_VERTICES);
        let p = rng.gen_range(0.15..0.9);
        let g = random_graph(&mut rng, n, p);
        if g.edge_count() < 2 {
            continue;
        }
        checked += 1;
        let oracle = brute_m2(&g);
        if two_density_flow(&g).unwrap().value != oracle || two_density_closure(&g, Exec::default()).unwrap().value != oracle {
            mismatches += 1;
        }
    }
    pass &= mismatches == 0;
    Verdict::new(
        pass,
        format!("F_conn {}; C_3..C_8 exact; {mismatches} mismatches on {checked} random graphs", notes.join(", ")),
    )
}

fn criterion_3() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for m in [1, 2] {
        let start = Instant::now();
        let tpl = build_template(3, m, C3_DEGREE_CAP, 11, 3).unwrap();
        let verified = verify_template(&tpl, 3).unwrap();
        let took = start.elapsed();
        let (recount, zs) = template_recount(&tpl);
        pass &= tpl.verified && verified && recount && took <= C3_LIMIT;
        notes.push(format!("m={m}: {} edges, {zs} balanced Z, {}ms", tpl.edges.len(), took.as_millis()));
    }
    Verdict::new(pass, notes.join("; "))
}

fn balanced_zs(w: &[Vec<Vertex>]) -> Vec<Vec<Vertex>> {
    let m = w[0].len();
    let mut out = Vec::new();
    for s in 0..=m {
        let choices = subsets_of_size(m, s);
        let mut acc: Vec<Vec<Vertex>> = vec![Vec::new()];
        for wi in w {
            acc = acc
                .iter()
                .flat_map(|z| choices.iter().map(move |c| z.iter().copied().chain(c.iter().map(|&j| wi[j])).collect()))
                .collect();
        }
        out.extend(acc);
    }
    out
}

fn criterion_4() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for (m, n_tilde, kind) in [(1, C4_N_TILDE_M1, AbsorberKind::Full), (2, C4_N_TILDE_M2, AbsorberKind::Auto)] {
        let pg = PartitionedGraph::complete_blowup(3, n_tilde);
        let cfg = PipelineConfig {
            m: Some(m),
            absorber: kind,
            ..PipelineConfig::default()
        };
        let run = run_pipeline_traced(&pg, &cfg);
        let Some(wabs) = run.absorber.as_ref() else {
            pass = false;
            notes.push(format!("m={m}: no absorber ({:?})", run.failure));
            continue;
        };
        let zs = balanced_zs(&wabs.w);
        let mut good = 0;
        for z in &zs {
            let cover: Vec<Vertex> = wabs.vertices.iter().copied().filter(|v| !z.contains(v)).collect();
            if let Ok(cert) = wabs.absorb(z) {
                good += is_factor(pg.graph(), &cert.cycles, 3, &cover) as usize;
            }
        }
        let all: Vec<Vertex> = (0..pg.graph().vertex_count()).collect();
        let whole = run.certificate.as_ref().is_some_and(|c| is_factor(pg.graph(), &c.cycles, 3, &all));
        pass &= good == zs.len() && whole;
        notes.push(format!(
            "m={m} ñ={n_tilde} {:?}: {good}/{} Z absorbed, |V(A)|={}, full run verified={whole}",
            wabs.model.kind(),
            zs.len(),
            wabs.vertices.len()
        ));
    }
    Verdict::new(pass, notes.join("; "))
}

fn criterion_5() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for n_tilde in [24, 30] {
        let mut returned = 0;
        let mut sound = 0;
        let mut slowest = Duration::ZERO;
        for seed in 0..C5_SEEDS {
            let start = Instant::now();
            let pg = sample_blowup_subgraph(3, n_tilde, ratio(3, 5), ratio(1, 1), sub_seed(seed, 0)).unwrap();
            let cfg = PipelineConfig {
                m: Some(1),
                p: Exact(ratio(3, 5)),
                seed,
                ..PipelineConfig::default()
            };
            let run = run_pipeline_traced(&pg, &cfg);
            slowest = slowest.max(start.elapsed());
            if let Some(cert) = &run.certificate {
                returned += 1;
                let all: Vec<Vertex> = (0..pg.graph().vertex_count()).collect();
                sound += is_factor(pg.graph(), &cert.cycles, 3, &all) as usize;
            }
        }
        pass &= returned >= C5_MIN_SUCCESSES && sound == returned && slowest <= C5_RUN_LIMIT;
        notes.push(format!("ñ={n_tilde}: {returned}/{C5_SEEDS} returned, {sound} verified, slowest {}ms", slowest.as_millis()));
    }
    Verdict::new(pass, notes.join("; "))
}

fn haxell_instance(rng: &mut ChaCha8Rng, sparse: bool) -> (Hypergraph, Vec<Vertex>, usize) {
    let ell = rng.gen_range(2..=3);
    let a_size = if sparse { rng.gen_range(1..=4) } else { rng.gen_range(1..=6) };
    let b_size = if sparse { rng.gen_range(ell..=10) } else { rng.gen_range(ell..=14) };
    let n = a_size + b_size;
    let mut edges = BTreeSet::new();
    for a in 0..a_size {
        let d = if sparse { rng.gen_range(0..=3) } else { rng.gen_range(2..=7) };
        for _ in 0..d {
            let mut e: Vec<Vertex> = rand::seq::index::sample(rng, b_size, ell - 1).into_iter().map(|i| a_size + i).collect();
            e.sort_unstable();
            e.insert(0, a);
            edges.insert(e);
        }
    }
    let mut edges: Vec<Vec<Vertex>> = edges.into_iter().collect();
    if sparse {
        edges.truncate(C6_ORACLE_EDGES);
    }
    (Hypergraph::new(n, edges), (0..a_size).collect(), ell)
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut condition_true, mut counterexamples, mut oracle_checked, mut disagreements) = (0, 0, 0, 0);
    for i in 0..C6_INSTANCES {
        let (h, a, ell) = haxell_instance(&mut rng, i % 2 == 0);
        let condition = check_haxell_condition(&h, &a).unwrap();
        let outcome = find_saturating_matching(&h, &a, Duration::from_secs(10)).unwrap();
        let found = match &outcome {
            MatchOutcome::Found(mm) => {
                if !valid_matching(&h, &a, &mm.edges) {
                    disagreements += 1;
                }
                Some(true)
            }
            MatchOutcome::None => Some(false),
            MatchOutcome::Unknown => None,
        };
        if condition {
            condition_true += 1;
            if found != Some(true) {
                counterexamples += 1;
            }
        }
        if h.edges.len() <= C6_ORACLE_EDGES {
            oracle_checked += 1;
            if found != Some(brute_saturating(&h, &a)) || condition != brute_haxell(&h, &a, ell) {
                disagreements += 1;
            }
        }
    }
    Verdict::new(
        counterexamples == 0 && disagreements == 0,
        format!(
            "{condition_true}/{C6_INSTANCES} satisfy the condition, {counterexamples} counterexamples; \
             {disagreements} disagreements on {oracle_checked} oracle instances"
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut hard_ok = true;
    let mut fraction_ok = true;
    let mut fractions = Vec::new();
    for seed in 0..C7_SEEDS {
        let p = parse_density("n^-0.6", C7_N).unwrap();
        let g = sample_gnp(C7_N, p, seed, Exec::default()).unwrap().graph;
        let v = default_target(&g).unwrap();
        let (after, report) = attack_second_neighborhood(&g, v).unwrap();
        let recount = (0..C7_N)
            .filter(|&u| g.degree(u) > 0)
            .map(|u| Rational::new((g.degree(u) - after.degree(u)) as i128, g.degree(u) as i128))
            .max()
            .unwrap();
        let no_c5 = !c5_through(&after, v) && report.post_property.holds == Some(false);
        hard_ok &= no_c5 && recount == report.max_deleted_degree_fraction.0 && report.target == AttackTarget::Vertex(v);
        let frac = to_f64(&recount);
        fraction_ok &= frac <= C7_MAX_FRACTION;
        fractions.push(format!("{frac:.3}"));
    }
    let k12 = Graph::complete(12);
    let (after, report) = attack_half_cut(&k12, 4, None, Duration::from_secs(60)).unwrap();
    let destroyed = report.post_property.holds == Some(false)
        && matches!(find_ct_factor(&after, &FactorQuery::new(4)).unwrap(), FactorOutcome::None);
    hard_ok &= destroyed;
    Verdict {
        pass: hard_ok && fraction_ok,
        hard_ok,
        detail: format!(
            "no C_5 at target in all runs: {hard_ok}; K_12 factor destroyed: {destroyed}; \
             max deleted fractions [{}] against {C7_MAX_FRACTION}",
            fractions.join(", ")
        ),
    }
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut contradictions, mut unverified, mut oracle_mismatch, mut irregular, mut missed) = (0, 0, 0, 0, 0);
    for i in 0..C8_PAIRS {
        let a = rng.gen_range(3..=8);
        let b = rng.gen_range(3..=8);
        let q = rng.gen_range(0.1..0.9);
        let mut edges = Vec::new();
        for x in 0..a {
            for y in a..a + b {
                if rng.gen_bool(q) {
                    edges.push((x, y));
                }
            }
        }
        let g = Graph::from_edges(a + b, edges).unwrap();
        let (xs, ys): (Vec<Vertex>, Vec<Vertex>) = ((0..a).collect(), (a..a + b).collect());
        let eps = [ratio(1, 2), ratio(1, 3), ratio(1, 5), ratio(1, 10)][i % 4];
        let p = [ratio(1, 1), ratio(1, 2), ratio(1, 4)][i % 3];
        let params = RegularityParams::new(eps, p, ratio(1, 1)).unwrap();
        let exact = check_regular_exact(&g, &xs, &ys, &params).unwrap();
        irregular += !exact as usize;
        if exact != brute_regular(&g, &xs, &ys, eps, p) {
            oracle_mismatch += 1;
        }
        match check_regular_sampled(&g, &xs, &ys, &params, DEFAULT_SAMPLED_TRIALS, sub_seed(8, i as u64)).unwrap() {
            SampledVerdict::Violation(w) => {
                if exact {
                    contradictions += 1;
                }
                if !witness_is_violation(&g, &xs, &ys, &params, &w, false) {
                    unverified += 1;
                }
            }
            SampledVerdict::NoViolationFound { .. } => missed += !exact as usize,
        }
    }

    let mut members = 0;
    let mut memberships = 0;
    for (t, k) in PAIRS {
        for n_tilde in [6, 20] {
            let pg = PartitionedGraph::complete_blowup(t, n_tilde);
            for eps in [ratio(1, 2), ratio(1, 10), ratio(1, 100)] {
                let params = RegularityParams::new(eps, ratio(1, 1), ratio(1, 1)).unwrap();
                let report = check_gexp_membership(&pg, t, k, &params, Sampling::default(), Exec::default()).unwrap();
                memberships += 1;
                members += report.member() as usize;
            }
        }
    }

    let start = Instant::now();
    let p = parse_density("10*ln(n)/n", C8_EXPANSION_N).unwrap();
    let sample = sample_gnp(C8_EXPANSION_N, p, 0, Exec::default()).unwrap();
    let report = empirical_k_expansion(&sample, 2, C8_NU, C8_EXPANSION_TRIALS, 1, true, Exec::default()).unwrap();
    let np = C8_EXPANSION_N as f64 * to_f64(&p);
    let threshold_ok = report.rows.iter().all(|r| (r.threshold - 0.8 * np * np).abs() <= 1e-9 * r.threshold);
    let share = report.passes as f64 / report.trials as f64;
    let margins: Vec<String> = report.rows.iter().filter(|r| !r.pass).map(|r| format!("{:.0}", r.quantity - r.threshold)).collect();
    // second route to |N²(v)|: a hash set over all 2-walks
    let mut count_mismatch = 0;
    for _ in 0..C8_EXPANSION_TRIALS {
        let v = rng.gen_range(0..C8_EXPANSION_N);
        let g = &sample.graph;
        let reach: HashSet<Vertex> = g.neighbors(v).iter().flat_map(|&y| g.neighbors(y).iter().copied()).filter(|&w| w != v).collect();
        count_mismatch += (reach.len() != kth_neighborhood(g, &[v], 2).len()) as usize;
    }
    let took = start.elapsed();

    let pass = contradictions == 0
        && unverified == 0
        && oracle_mismatch == 0
        && members == memberships
        && threshold_ok
        && count_mismatch == 0
        && share >= C8_MIN_SHARE
        && took <= C8_LIMIT;
    Verdict::new(
        pass,
        format!(
            "pairs: {oracle_mismatch} oracle mismatches, {contradictions} contradictions, {unverified} unverified witnesses, \
             {missed} of {irregular} irregular pairs unrefuted by sampling; gexp {members}/{memberships}; \
             expansion {}/{} (margins of failures [{}]), {count_mismatch} |N²| recount mismatches, {}s",
            report.passes,
            report.trials,
            margins.join(", "),
            took.as_secs()
        ),
    )
}

fn ctfactor(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ctfactor")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ctfactor(&["gnp", "blowup", "--t", "3", "--n-tilde", "30", "--p", "3/5", "--seed", "3", "--out-dir", "inst"], d);
    std::fs::write(d.join("c5.json"), r#"{"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[4,0]]}"#).unwrap();
    let runs: &[&[&str]] = &[
        &["gadget", "build", "--kind", "absorber", "--t", "5", "--k", "3"],
        &["gadget", "verify", "--t", "4", "--k", "2"],
        &["m2", "--input", "c5.json", "--method", "closure"],
        &["factor", "solve", "--t", "3", "--input", "inst/blowup.json", "--canonical"],
        &["regcheck", "--mode", "typical", "--input", "inst/blowup.json", "--p", "3/5", "--format", "csv", "--seed", "7"],
        &["gnp", "sample", "--n", "1000", "--p", "n^-0.6", "--seed", "7"],
        &["gnp", "edge-bound", "--n", "1000", "--p", "1/10", "--seed", "7"],
        &["attack", "second-neighborhood", "--n", "1000", "--p", "n^-0.6", "--seed", "7"],
        &["pipeline", "run", "--input", "inst/blowup.json", "--seed", "7"],
        &["template", "--t", "3", "--m", "2", "--seed", "7"],
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for args in runs {
        let mut reps = Vec::new();
        for rep in 0..2 {
            let out = format!("rep{rep}");
            let mut full = args.to_vec();
            full.extend(["--out-dir", &out]);
            let o = ctfactor(&full, d);
            let manifest: Option<RunManifest> = std::fs::read(d.join(&out).join("manifest.json")).ok().and_then(|b| serde_json::from_slice(&b).ok());
            let bytes: Vec<Vec<u8>> = manifest
                .iter()
                .flat_map(|m| m.outputs.iter().map(|f| std::fs::read(d.join(&out).join(&f.file)).unwrap()))
                .collect();
            let hash = manifest.as_ref().map(|m| (m.config_hash.clone(), m.outputs.clone()));
            reps.push((o.status.code(), o.stdout, hash, bytes));
            let _ = std::fs::remove_dir_all(d.join(&out));
        }
        files += reps[0].3.len();
        if reps[0] != reps[1] || reps[0].2.is_none() {
            differing.push(args[0]);
        }
    }
    Verdict::new(
        differing.is_empty(),
        format!("{} commands replayed, {files} output files compared, differing: {differing:?}", runs.len()),
    )
}

fn main() {
    let criteria: [(usize, &str, fn() -> Verdict); 9] = [
        (1, "gadget factors", criterion_1),
        (2, "2-density", criterion_2),
        (3, "template", criterion_3),
        (4, "absorption", criterion_4),
        (5, "end-to-end pipeline", criterion_5),
        (6, "Haxell matchings", criterion_6),
        (7, "resilience attacks", criterion_7),
        (8, "regularity and expansion", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let v = run();
        let known = KNOWN_GAPS.contains(&id);
        let status = match (v.pass, known) {
            (true, false) => "PASS",
            (true, true) => {
                unexpected += 1;
                "PASS (listed as a known gap)"
            }
            (false, true) if v.hard_ok => "FAIL (known gap)",
            _ => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id} {status}: {name}: {} [{:.1}s]", v.detail, start.elapsed().as_secs_f64());
    }
    if unexpected > 0 {
        println!("{unexpected} criteria differ from the recorded expectation");
        std::process::exit(1);
    }
}
