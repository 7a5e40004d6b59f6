//! Sparse regularity predicates on bipartite pairs, iterated-neighbourhood
//! expansion, typicality and membership in the expanding blow-up class.
//!
//! Subsets in every check have size at least `⌈ε|V|⌉` (and at least one, so
//! that densities are defined). A pair with an empty side has no such
//! subsets and is vacuously regular.

use num_traits::{CheckedMul, One, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{iterated_neighborhood, mask, PartitionedGraph, Vertex};
use crate::par::{map_range, Exec};
use crate::rational::{ceil_usize, int, to_f64, Exact, Rational};
use crate::Graph;

pub const EXACT_PAIR_CAP: usize = 14;
/// Trials used when a pair is too large for the exact checker.
pub const DEFAULT_SAMPLED_TRIALS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityParams {
    pub epsilon: Exact,
    pub p: Exact,
    pub alpha: Exact,
}

impl RegularityParams {
    pub fn new(epsilon: Rational, p: Rational, alpha: Rational) -> Result<Self> {
        let zero = Rational::zero();
        if epsilon <= zero || epsilon > Rational::one() {
            return Err(invalid(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if p <= zero || p > Rational::one() {
            return Err(invalid(format!("p must lie in (0, 1], got {p}")));
        }
        if alpha <= zero {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(RegularityParams {
            epsilon: Exact(epsilon),
            p: Exact(p),
            alpha: Exact(alpha),
        })
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon.0
    }

    pub fn p(&self) -> Rational {
        self.p.0
    }

    pub fn alpha(&self) -> Rational {
        self.alpha.0
    }

    /// The same tolerances at the scaled density `αp`, which is how the
    /// expanding class is applied to subgraphs of density `αp`.
    pub fn scaled(&self) -> RegularityParams {
        RegularityParams {
            epsilon: self.epsilon,
            p: Exact((self.alpha() * self.p()).min(Rational::one())),
            alpha: Exact(Rational::one()),
        }
    }

    /// The tolerance `εp` on density deviations.
    pub fn tolerance(&self) -> Rational {
        self.epsilon() * self.p()
    }
}

/// Subsets whose density deviates by more than `εp` from the pair density.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityWitness {
    pub xs: Vec<Vertex>,
    pub ys: Vec<Vertex>,
    pub density: Exact,
    pub pair_density: Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SampledVerdict {
    NoViolationFound { trials: usize },
    Violation(RegularityWitness),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sides {
    Two,
    Lower,
}

fn min_subset(epsilon: Rational, size: usize) -> usize {
    ceil_usize(&(epsilon * int(size))).max(1)
}

fn density(g: &Graph, xs: &[Vertex], ys: &[Vertex]) -> Rational {
    int(g.edges_between(xs, ys)) / int(xs.len() * ys.len())
}

fn check_disjoint(g: &Graph, xs: &[Vertex], ys: &[Vertex]) -> Result<()> {
    let n = g.vertex_count();
    if xs.iter().chain(ys).any(|&v| v >= n) {
        return Err(Error::InvalidGraph("pair vertex out of range".into()));
    }
    let in_x = mask(n, xs);
    if ys.iter().any(|&y| in_x[y]) {
        return Err(invalid("pair sides must be disjoint"));
    }
    Ok(())
}

/// Exhaustive search for a violating subset pair. For each `X'` the extreme
/// densities over `|Y'| = s` come from the `s` smallest and largest degrees
/// into `X'`, so only the subsets of `X` are enumerated.
fn violation_exact(
    g: &Graph,
    xs: &[Vertex],
    ys: &[Vertex],
    params: &RegularityParams,
    sides: Sides,
) -> Result<Option<RegularityWitness>> {
    for side in [xs.len(), ys.len()] {
        if side > EXACT_PAIR_CAP {
            return Err(Error::OverCap { found: side, cap: EXACT_PAIR_CAP });
        }
    }
    check_disjoint(g, xs, ys)?;
    if xs.is_empty() || ys.is_empty() {
        return Ok(None);
    }
    let d = density(g, xs, ys);
    let tol = params.tolerance();
    let sx = min_subset(params.epsilon(), xs.len());
    let sy = min_subset(params.epsilon(), ys.len());
    let bits: Vec<u32> = ys
        .iter()
        .map(|&y| {
            xs.iter()
                .enumerate()
                .filter(|&(_, &x)| g.has_edge(x, y))
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let mut order: Vec<usize> = (0..ys.len()).collect();
    for sub in 1u32..(1u32 << xs.len()) {
        let a = sub.count_ones() as usize;
        if a < sx {
            continue;
        }
        let deg = |j: usize| (bits[j] & sub).count_ones() as usize;
        order.sort_by_key(|&j| (deg(j), j));
        let pick = |idx: &[usize]| RegularityWitness {
            xs: (0..xs.len()).filter(|i| sub & (1 << i) != 0).map(|i| xs[i]).collect(),
            ys: {
                let mut v: Vec<Vertex> = idx.iter().map(|&j| ys[j]).collect();
                v.sort_unstable();
                v
            },
            density: Exact(int(idx.iter().map(|&j| deg(j)).sum()) / int(a * idx.len())),
            pair_density: Exact(d),
        };
        let mut low = 0usize;
        for j in 0..sy - 1 {
            low += deg(order[j]);
        }
        let mut high: usize = order[ys.len() + 1 - sy..].iter().map(|&j| deg(j)).sum();
        for s in sy..=ys.len() {
            low += deg(order[s - 1]);
            let cells = int(a * s);
            if d - int(low) / cells > tol {
                return Ok(Some(pick(&order[..s])));
            }
            high += deg(order[ys.len() - s]);
            if sides == Sides::Two && int(high) / cells - d > tol {
                return Ok(Some(pick(&order[ys.len() - s..])));
            }
        }
    }
    Ok(None)
}

/// `(ε,p)`-regularity by exhaustive search; both sides at most 14 vertices.
pub fn check_regular_exact(g: &Graph, xs: &[Vertex], ys: &[Vertex], params: &RegularityParams) -> Result<bool> {
    Ok(violation_exact(g, xs, ys, params, Sides::Two)?.is_none())
}

/// One-sided version: no large subset pair is sparser than `d - εp`.
pub fn check_lower_regular_exact(g: &Graph, xs: &[Vertex], ys: &[Vertex], params: &RegularityParams) -> Result<bool> {
    Ok(violation_exact(g, xs, ys, params, Sides::Lower)?.is_none())
}

pub fn find_violation_exact(
    g: &Graph,
    xs: &[Vertex],
    ys: &[Vertex],
    params: &RegularityParams,
) -> Result<Option<RegularityWitness>> {
    violation_exact(g, xs, ys, params, Sides::Two)
}

fn sampled(
    g: &Graph,
    xs: &[Vertex],
    ys: &[Vertex],
    params: &RegularityParams,
    trials: usize,
    seed: u64,
    sides: Sides,
) -> Result<SampledVerdict> {
    if trials == 0 {
        return Err(invalid("sampled regularity check needs at least one trial"));
    }
    check_disjoint(g, xs, ys)?;
    if xs.is_empty() || ys.is_empty() {
        return Ok(SampledVerdict::NoViolationFound { trials });
    }
    let d = density(g, xs, ys);
    let tol = params.tolerance();
    let sx = min_subset(params.epsilon(), xs.len());
    let sy = min_subset(params.epsilon(), ys.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut a: Vec<Vertex> = sample(&mut rng, xs.len(), sx).into_iter().map(|i| xs[i]).collect();
        let mut b: Vec<Vertex> = sample(&mut rng, ys.len(), sy).into_iter().map(|i| ys[i]).collect();
        let dd = density(g, &a, &b);
        let bad = d - dd > tol || (sides == Sides::Two && dd - d > tol);
        if bad {
            a.sort_unstable();
            b.sort_unstable();
            return Ok(SampledVerdict::Violation(RegularityWitness {
                xs: a,
                ys: b,
                density: Exact(dd),
                pair_density: Exact(d),
            }));
        }
    }
    Ok(SampledVerdict::NoViolationFound { trials })
}

/// Refutation-only check: random subset pairs of the minimum admissible
/// sizes. A returned witness is a genuine violation; "no violation found"
/// certifies nothing.
pub fn check_regular_sampled(
    g: &Graph,
    xs: &[Vertex],
    ys: &[Vertex],
    params: &RegularityParams,
    trials: usize,
    seed: u64,
) -> Result<SampledVerdict> {
    sampled(g, xs, ys, params, trials, seed, Sides::Two)
}

pub fn check_lower_regular_sampled(
    g: &Graph,
    xs: &[Vertex],
    ys: &[Vertex],
    params: &RegularityParams,
    trials: usize,
    seed: u64,
) -> Result<SampledVerdict> {
    sampled(g, xs, ys, params, trials, seed, Sides::Lower)
}

/// Re-checks a witness against the definition directly.
pub fn witness_is_violation(
    g: &Graph,
    xs: &[Vertex],
    ys: &[Vertex],
    params: &RegularityParams,
    w: &RegularityWitness,
    lower_only: bool,
) -> bool {
    let in_x = mask(g.vertex_count(), xs);
    let in_y = mask(g.vertex_count(), ys);
    if !w.xs.iter().all(|&v| in_x[v]) || !w.ys.iter().all(|&v| in_y[v]) {
        return false;
    }
    if w.xs.len() < min_subset(params.epsilon(), xs.len()) || w.ys.len() < min_subset(params.epsilon(), ys.len()) {
        return false;
    }
    let d = density(g, xs, ys);
    let dd = density(g, &w.xs, &w.ys);
    let tol = params.tolerance();
    d - dd > tol || (!lower_only && dd - d > tol)
}

/// Parameters after slicing a pair down to subsets of relative size `ε₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SlicedParams {
    pub params: RegularityParams,
    /// Sub-pair densities lie within this distance of the pair density.
    pub density_window: Exact,
}

pub fn slice_params(params: &RegularityParams, epsilon2: Rational) -> Result<SlicedParams> {
    let e1 = params.epsilon();
    if !(e1 < epsilon2 && epsilon2 <= Rational::new(1, 2)) {
        return Err(invalid(format!("slicing needs epsilon < epsilon2 <= 1/2, got {e1} and {epsilon2}")));
    }
    Ok(SlicedParams {
        params: RegularityParams {
            epsilon: Exact(e1 / epsilon2),
            ..*params
        },
        density_window: Exact(e1 * params.p()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionLevel {
    pub size: usize,
    pub threshold: Exact,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub vertex: Vertex,
    pub k: usize,
    pub gamma: Exact,
    /// Levels along `V_{i+1}, …, V_{i+k}`.
    pub forward: Vec<ExpansionLevel>,
    /// Levels along `V_{i-1}, …, V_{i-k}`.
    pub backward: Vec<ExpansionLevel>,
}

impl ExpansionReport {
    pub fn pass(&self) -> bool {
        self.forward.iter().chain(&self.backward).all(|l| l.pass)
    }
}

/// `min(base^i, cap)`; the cap keeps exact arithmetic bounded.
fn capped_power(base: Rational, i: u32, cap: Rational) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..i {
        acc = match acc.checked_mul(&base) {
            Some(v) => v,
            None => crate::rational::from_f64(to_f64(&acc) * to_f64(&base)),
        };
        if acc >= cap {
            return cap;
        }
    }
    acc
}

/// Expansion threshold at level `i`: `(1-γ) min((ñαp)^i, ñ)`.
pub fn expansion_threshold(n_tilde: usize, params: &RegularityParams, gamma: Rational, i: u32) -> Rational {
    let base = int(n_tilde) * params.alpha() * params.p();
    (Rational::one() - gamma) * capped_power(base, i, int(n_tilde))
}

fn part_size(pg: &PartitionedGraph) -> Result<usize> {
    pg.uniform_part_size()
        .ok_or_else(|| Error::InvalidGraph("parts must have equal size".into()))
}

fn levels(pg: &PartitionedGraph, v: Vertex, k: usize, gamma: Rational, params: &RegularityParams, step: isize) -> Vec<ExpansionLevel> {
    let n_tilde = pg.parts()[0].len();
    let i = pg.part_of(v).expect("vertex in a part") as isize;
    (1..=k)
        .map(|j| {
            let seq: Vec<&[Vertex]> = (1..=j as isize).map(|s| pg.part(i + step * s)).collect();
            let size = iterated_neighborhood(pg.graph(), v, &seq).len();
            let threshold = expansion_threshold(n_tilde, params, gamma, j as u32);
            ExpansionLevel {
                size,
                threshold: Exact(threshold),
                pass: int(size) >= threshold,
            }
        })
        .collect()
}

pub fn expansion_profile(
    pg: &PartitionedGraph,
    v: Vertex,
    k: usize,
    gamma: Rational,
    params: &RegularityParams,
) -> Result<ExpansionReport> {
    if k == 0 {
        return Err(invalid("expansion depth k must be at least 1"));
    }
    part_size(pg)?;
    if pg.part_of(v).is_none() {
        return Err(invalid(format!("vertex {v} is not in a part")));
    }
    Ok(ExpansionReport {
        vertex: v,
        k,
        gamma: Exact(gamma),
        forward: levels(pg, v, k, gamma, params, 1),
        backward: levels(pg, v, k, gamma, params, -1),
    })
}

/// How a pair was judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMethod {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub trials: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            trials: DEFAULT_SAMPLED_TRIALS,
            seed: 0,
        }
    }
}

fn pair_ok(g: &Graph, xs: &[Vertex], ys: &[Vertex], params: &RegularityParams, sampling: Sampling, salt: u64, lower: bool) -> Result<(bool, PairMethod)> {
    if xs.len() <= EXACT_PAIR_CAP && ys.len() <= EXACT_PAIR_CAP {
        let sides = if lower { Sides::Lower } else { Sides::Two };
        return Ok((violation_exact(g, xs, ys, params, sides)?.is_none(), PairMethod::Exact));
    }
    let seed = sampling.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let sides = if lower { Sides::Lower } else { Sides::Two };
    let verdict = sampled(g, xs, ys, params, sampling.trials, seed, sides)?;
    Ok((matches!(verdict, SampledVerdict::NoViolationFound { .. }), PairMethod::Sampled))
}

fn check_tk(t: usize, k: usize) -> Result<()> {
    if k < 2 || !(t == 2 * k - 1 || t == 2 * k) {
        return Err(invalid(format!("need k >= 2 and t in {{2k-1, 2k}}, got t = {t}, k = {k}")));
    }
    Ok(())
}

/// The neighbourhood pairs whose lower-regularity typicality asks for.
fn neighborhood_pairs(pg: &PartitionedGraph, v: Vertex, t: usize, k: usize) -> Vec<(Vec<Vertex>, Vec<Vertex>)> {
    let i = pg.part_of(v).expect("vertex in a part") as isize;
    let reach = |step: isize| {
        let seq: Vec<&[Vertex]> = (1..k as isize).map(|s| pg.part(i + step * s)).collect();
        iterated_neighborhood(pg.graph(), v, &seq)
    };
    let fwd = reach(1);
    let bwd = reach(-1);
    if t == 2 * k - 1 {
        vec![(fwd, bwd)]
    } else {
        let opposite = pg.part(i + k as isize).to_vec();
        vec![(fwd, opposite.clone()), (bwd, opposite)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypicalityVerdict {
    pub vertex: Vertex,
    pub expanding: bool,
    pub lower_regular: bool,
    pub method: PairMethod,
}

impl TypicalityVerdict {
    pub fn typical(&self) -> bool {
        self.expanding && self.lower_regular
    }

    /// First failing clause, for census output.
    pub fn clause(&self) -> &'static str {
        if !self.expanding {
            "expanding"
        } else if !self.lower_regular {
            "lower_regular"
        } else {
            "none"
        }
    }
}

/// `(ε,k)`-typicality: `(ε,k-1)`-expanding in both cyclic directions and
/// lower-regular `(k-1)`-st neighbourhoods (against each other for
/// `t = 2k-1`, against the opposite part `V_{i+k} = V_{i-k}` for `t = 2k`).
/// Densities are taken at `αp`.
pub fn typicality(
    pg: &PartitionedGraph,
    v: Vertex,
    t: usize,
    k: usize,
    params: &RegularityParams,
    sampling: Sampling,
) -> Result<TypicalityVerdict> {
    check_tk(t, k)?;
    if pg.t() != t {
        return Err(invalid(format!("partition has {} parts, expected {t}", pg.t())));
    }
    let profile = expansion_profile(pg, v, k - 1, params.epsilon(), params)?;
    let scaled = params.scaled();
    let mut lower_regular = true;
    let mut method = PairMethod::Exact;
    for (xs, ys) in neighborhood_pairs(pg, v, t, k) {
        let (ok, m) = pair_ok(pg.graph(), &xs, &ys, &scaled, sampling, v as u64, true)?;
        if m == PairMethod::Sampled {
            method = m;
        }
        lower_regular &= ok;
    }
    Ok(TypicalityVerdict {
        vertex: v,
        expanding: profile.pass(),
        lower_regular,
        method,
    })
}

pub fn check_typicality(pg: &PartitionedGraph, v: Vertex, t: usize, k: usize, params: &RegularityParams) -> bool {
    typicality(pg, v, t, k, params, Sampling::default()).is_ok_and(|r| r.typical())
}

/// Typicality of every part vertex, in vertex order.
pub fn typicality_census(
    pg: &PartitionedGraph,
    t: usize,
    k: usize,
    params: &RegularityParams,
    sampling: Sampling,
    exec: Exec,
) -> Result<Vec<TypicalityVerdict>> {
    check_tk(t, k)?;
    part_size(pg)?;
    let vertices: Vec<Vertex> = pg.parts().iter().flatten().copied().collect();
    let mut rows = map_range(exec, vertices.len(), |i| typicality(pg, vertices[i], t, k, params, sampling));
    let mut out = Vec::with_capacity(rows.len());
    for r in rows.drain(..) {
        out.push(r?);
    }
    out.sort_by_key(|r| r.vertex);
    Ok(out)
}

/// CSV with header `vertex,part,clause,pass`, one row per vertex.
pub fn census_csv(pg: &PartitionedGraph, rows: &[TypicalityVerdict]) -> String {
    let mut s = String::from("vertex,part,clause,pass\n");
    for r in rows {
        let part = pg.part_of(r.vertex).map(|p| p + 1).unwrap_or(0);
        s.push_str(&format!("{},{},{},{}\n", r.vertex, part, r.clause(), r.typical()));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairClause {
    /// 1-based index `i` of the pair `(V_i, V_{i+1})`.
    pub part: usize,
    pub density: Exact,
    pub density_ok: bool,
    pub regular: bool,
    pub method: PairMethod,
}

/// Failing vertices per clause of the class definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GexpReport {
    pub t: usize,
    pub k: usize,
    pub n_tilde: usize,
    pub params: RegularityParams,
    pub pairs: Vec<PairClause>,
    pub degree_failures: Vec<Vertex>,
    /// Neighbourhood lower bounds for `2 <= j <= k-1`; `j = 1` is the
    /// lower half of the degree window.
    pub neighborhood_failures: Vec<Vertex>,
    pub lower_regular_failures: Vec<Vertex>,
}

impl GexpReport {
    pub fn member(&self) -> bool {
        self.pairs.iter().all(|p| p.density_ok && p.regular)
            && self.degree_failures.is_empty()
            && self.neighborhood_failures.is_empty()
            && self.lower_regular_failures.is_empty()
    }
}

struct VertexClauses {
    degree: bool,
    neighborhoods: bool,
    lower_regular: bool,
}

/// Membership in the expanding blow-up class, every clause checked at the
/// scaled density `αp`: pair densities `(1±ε)αp`, degrees `(1±ε)ñαp`,
/// `|N^j| >= (1-ε)min((ñαp)^j, ñ)` and lower-regular `(k-1)`-st
/// neighbourhoods.
pub fn check_gexp_membership(
    pg: &PartitionedGraph,
    t: usize,
    k: usize,
    params: &RegularityParams,
    sampling: Sampling,
    exec: Exec,
) -> Result<GexpReport> {
    check_tk(t, k)?;
    if pg.t() != t {
        return Err(Error::InvalidGraph(format!("partition has {} parts, expected {t}", pg.t())));
    }
    let n_tilde = part_size(pg)?;
    if n_tilde == 0 {
        return Err(Error::InvalidGraph("empty parts".into()));
    }
    let g = pg.graph();
    let eps = params.epsilon();
    let scaled = params.scaled();
    let p_eff = scaled.p();
    let one = Rational::one();

    let pairs = map_range(exec, t, |i| -> Result<PairClause> {
        let xs = pg.part(i as isize);
        let ys = pg.part(i as isize + 1);
        let d = density(g, xs, ys);
        let density_ok = d >= (one - eps) * p_eff && d <= (one + eps) * p_eff;
        let (regular, method) = pair_ok(g, xs, ys, &scaled, sampling, (1 << 40) + i as u64, false)?;
        Ok(PairClause {
            part: i + 1,
            density: Exact(d),
            density_ok,
            regular,
            method,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let lo = (one - eps) * int(n_tilde) * p_eff;
    let hi = (one + eps) * int(n_tilde) * p_eff;
    let vertices: Vec<Vertex> = pg.parts().iter().flatten().copied().collect();
    let clauses = map_range(exec, vertices.len(), |idx| -> Result<VertexClauses> {
        let v = vertices[idx];
        let i = pg.part_of(v).expect("part vertex") as isize;
        let degree = [1isize, -1].iter().all(|&step| {
            let inside = mask(g.vertex_count(), pg.part(i + step));
            let d = int(g.degree_into(v, &inside));
            d >= lo && d <= hi
        });
        let neighborhoods = [1isize, -1].iter().all(|&step| {
            (2..k).all(|j| {
                let seq: Vec<&[Vertex]> = (1..=j as isize).map(|s| pg.part(i + step * s)).collect();
                let size = iterated_neighborhood(g, v, &seq).len();
                int(size) >= expansion_threshold(n_tilde, &scaled, eps, j as u32)
            })
        });
        let mut lower_regular = true;
        for (xs, ys) in neighborhood_pairs(pg, v, t, k) {
            lower_regular &= pair_ok(g, &xs, &ys, &scaled, sampling, v as u64, true)?.0;
        }
        Ok(VertexClauses {
            degree,
            neighborhoods,
            lower_regular,
        })
    });
    let mut report = GexpReport {
        t,
        k,
        n_tilde,
        params: *params,
        pairs,
        degree_failures: Vec::new(),
        neighborhood_failures: Vec::new(),
        lower_regular_failures: Vec::new(),
    };
    for (&v, c) in vertices.iter().zip(clauses) {
        let c = c?;
        if !c.degree {
            report.degree_failures.push(v);
        }
        if !c.neighborhoods {
            report.neighborhood_failures.push(v);
        }
        if !c.lower_regular {
            report.lower_regular_failures.push(v);
        }
    }
    report.degree_failures.sort_unstable();
    report.neighborhood_failures.sort_unstable();
    report.lower_regular_failures.sort_unstable();
    Ok(report)
}
