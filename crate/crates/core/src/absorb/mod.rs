//! The absorbing method on a blow-up of `C_t`: reserve `W`/`X`, build a
//! template, copy one absorber per template edge, cover the bulk, route the
//! leftover through `W` and let the absorbers swallow what remains of `W`.

pub mod cover;
pub mod embed;
pub mod template;

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::factor::{verify_factor, FactorCertificate};
use crate::gadget::check_tk;
use crate::graph::{mask, Graph, PartitionedGraph, Vertex};
use crate::par::Exec;
use crate::random::sub_seed;
use crate::rational::{floor_usize, int, ratio, to_f64, Exact};
use crate::regularity::{check_gexp_membership, RegularityParams, Sampling};

pub use cover::{cover_bulk, match_leftover, BulkCover};
pub use embed::{embed_absorbers, plan_roots, resolve_kind, AbsorberKind, AbsorberModel, EmbedOptions, EmbeddedAbsorber, RootPlan};
pub use template::{balanced_sets, build_template, perfect_matching, verify_template, Template, DEFAULT_VERIFY_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    pub embed_ms: u64,
    pub bulk_ms: u64,
    pub leftover_ms: u64,
    pub absorb_ms: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            embed_ms: 120_000,
            bulk_ms: 120_000,
            leftover_ms: 60_000,
            absorb_ms: 60_000,
        }
    }
}

fn ms(v: u64) -> Duration {
    Duration::from_millis(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub t: usize,
    pub k: usize,
    pub epsilon: Exact,
    pub gamma: Exact,
    /// `|W_i| = |X_i| = max(1, ⌊ξñ⌋)` unless `m` is set.
    pub xi: Exact,
    pub m: Option<usize>,
    /// Bulk stopping point, as a fraction of `ñ` per part.
    pub rho: Exact,
    pub alpha: Exact,
    pub p: Exact,
    pub absorber: AbsorberKind,
    /// Template degree cap; `40^t` when unset.
    pub max_degree: Option<usize>,
    pub verify_cap: usize,
    /// Refuse hosts that fail the `G_exp` membership check.
    pub check_gexp: bool,
    pub embed_rounds: usize,
    pub seed: u64,
    pub budgets: Budgets,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            t: 3,
            k: 2,
            epsilon: Exact(ratio(1, 10)),
            gamma: Exact(ratio(1, 2)),
            xi: Exact(ratio(1, 50)),
            m: None,
            rho: Exact(ratio(1, 10)),
            alpha: Exact(int(1)),
            p: Exact(ratio(1, 2)),
            absorber: AbsorberKind::Auto,
            max_degree: None,
            verify_cap: DEFAULT_VERIFY_CAP,
            check_gexp: false,
            embed_rounds: 8,
            seed: 0,
            budgets: Budgets::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        check_tk(self.t, self.k)?;
        let zero = int(0);
        let one = int(1);
        let open = |name: &str, r: &Exact| {
            if r.0 > zero && r.0 < one {
                Ok(())
            } else {
                Err(invalid(format!("{name} must lie in (0, 1)")))
            }
        };
        open("epsilon", &self.epsilon)?;
        open("gamma", &self.gamma)?;
        open("xi", &self.xi)?;
        if self.rho.0 < zero || self.rho.0 >= one {
            return Err(invalid("rho must lie in [0, 1)"));
        }
        for (name, r) in [("alpha", &self.alpha), ("p", &self.p)] {
            if r.0 <= zero || r.0 > one {
                return Err(invalid(format!("{name} must lie in (0, 1]")));
            }
        }
        if self.m == Some(0) {
            return Err(invalid("m must be positive"));
        }
        Ok(())
    }

    pub fn m_for(&self, n_tilde: usize) -> usize {
        self.m.unwrap_or_else(|| floor_usize(&(self.xi.0 * int(n_tilde))).max(1))
    }

    pub fn degree_cap(&self) -> usize {
        self.max_degree.unwrap_or_else(|| 40usize.saturating_pow(self.t as u32))
    }
}

/// Absorbers for every template edge, glued at their roots. Absorbing a
/// balanced `Z ⊆ ∪W_i` yields a `C_t`-factor of `V(A) - Z`.
#[derive(Clone, Debug)]
pub struct WAbsorber {
    pub template: Template,
    pub plan: RootPlan,
    pub w: Vec<Vec<Vertex>>,
    pub x: Vec<Vec<Vertex>>,
    pub model: AbsorberModel,
    pub copies: Vec<EmbeddedAbsorber>,
    /// Sorted `V(A)`.
    pub vertices: Vec<Vertex>,
    host: Graph,
}

impl WAbsorber {
    /// Checks the structural invariants and records `V(A)`.
    pub fn assemble(
        pg: &PartitionedGraph,
        template: Template,
        plan: RootPlan,
        w: Vec<Vec<Vertex>>,
        x: Vec<Vec<Vertex>>,
        model: AbsorberModel,
        copies: Vec<EmbeddedAbsorber>,
    ) -> Result<Self> {
        let n = pg.graph().vertex_count();
        let t = pg.t();
        if copies.len() != template.edges.len() {
            return Err(invalid("one absorber per template edge is required"));
        }
        let mut image = plan.f.clone();
        image.sort_unstable();
        let mut expected: Vec<Vertex> = w.iter().chain(x.iter()).flatten().copied().collect();
        expected.sort_unstable();
        if image != expected || image.windows(2).any(|p| p[0] == p[1]) {
            return Err(invalid("root map is not a bijection onto W ∪ X"));
        }
        for i in 0..t {
            if template.flexible(i).iter().any(|&b| !w[i].contains(&plan.f[b])) {
                return Err(invalid(format!("W_{i} is not the image of the flexible set")));
            }
        }
        let mut owner = vec![false; n];
        for &v in &expected {
            owner[v] = true;
        }
        for (e, copy) in copies.iter().enumerate() {
            if copy.roots != plan.tuples[e] {
                return Err(invalid(format!("absorber {e} is not rooted at R_e")));
            }
            for h in copy.internal(&model) {
                if std::mem::replace(&mut owner[h], true) {
                    return Err(invalid(format!("absorbers overlap outside the roots at {h}")));
                }
            }
        }
        let vertices: Vec<Vertex> = (0..n).filter(|&v| owner[v]).collect();
        let per_part = |i: usize| vertices.iter().filter(|&&v| pg.part_of(v) == Some(i)).count();
        if (1..t).any(|i| per_part(i) != per_part(0)) {
            return Err(invalid("V(A) meets the parts unevenly"));
        }
        Ok(WAbsorber {
            template,
            plan,
            w,
            x,
            model,
            copies,
            vertices,
            host: pg.graph().clone(),
        })
    }

    pub fn t(&self) -> usize {
        self.template.t
    }

    /// Every balanced `Z ⊆ ∪W_i`, in host ids.
    pub fn balanced_subsets(&self) -> impl Iterator<Item = Vec<Vertex>> + '_ {
        balanced_sets(self.template.t, self.template.m).map(|z| z.into_iter().map(|b| self.plan.f[b]).collect())
    }

    /// Factor of `V(A) - Z`: a perfect matching of `B - f^{-1}(Z)` decides
    /// which copies keep their roots.
    pub fn absorb(&self, z: &[Vertex]) -> Result<FactorCertificate> {
        let t = self.t();
        let n = self.host.vertex_count();
        let in_w = mask(n, &self.w.iter().flatten().copied().collect::<Vec<_>>());
        let zmask = mask(n, z);
        if z.iter().any(|&v| v >= n || !in_w[v]) {
            return Err(invalid("Z must lie inside W"));
        }
        let counts: Vec<usize> = self.w.iter().map(|wi| wi.iter().filter(|&&v| zmask[v]).count()).collect();
        if counts.iter().any(|&c| c != counts[0]) {
            return Err(invalid(format!("Z is unbalanced across W: {counts:?}")));
        }
        let removed: Vec<bool> = self.plan.f.iter().map(|&h| zmask[h]).collect();
        let matching = perfect_matching(&self.template, &removed).ok_or_else(|| Error::Phase {
            phase: "absorb".into(),
            reason: "template has no perfect matching for this Z".into(),
        })?;
        let mut in_matching = vec![false; self.copies.len()];
        for e in matching {
            in_matching[e] = true;
        }
        let mut cycles = Vec::new();
        for (e, copy) in self.copies.iter().enumerate() {
            let local = if in_matching[e] { &self.model.full } else { &self.model.minus_roots };
            cycles.extend(local.map(|v| copy.map[v]).cycles);
        }
        let cert = FactorCertificate::new(t, cycles);
        let target: Vec<Vertex> = self.vertices.iter().copied().filter(|&v| !zmask[v]).collect();
        if !verify_factor(&self.host, &cert, t, &target) {
            return Err(Error::Phase {
                phase: "absorb".into(),
                reason: "assembled factor failed verification".into(),
            });
        }
        Ok(cert)
    }
}

pub fn absorb(wabs: &WAbsorber, z: &[Vertex]) -> Result<FactorCertificate> {
    wabs.absorb(z)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: String,
    pub detail: String,
    /// Vertices covered by cycles after this phase.
    pub covered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseFailure {
    pub phase: String,
    pub reason: String,
}

/// Everything a run produced, including partial artifacts on failure.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub config: PipelineConfig,
    pub trace: Vec<PhaseRecord>,
    pub failure: Option<PhaseFailure>,
    pub absorber: Option<WAbsorber>,
    pub bulk: Option<BulkCover>,
    pub leftover: Option<FactorCertificate>,
    pub certificate: Option<FactorCertificate>,
}

/// On-disk form of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineCertificate {
    pub t: usize,
    pub n: usize,
    pub verified: bool,
    pub cycles: Vec<Vec<Vertex>>,
    pub trace: Vec<PhaseRecord>,
    pub failure: Option<PhaseFailure>,
    pub config: PipelineConfig,
}

impl PipelineRun {
    pub fn succeeded(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn to_certificate(&self, n: usize) -> PipelineCertificate {
        PipelineCertificate {
            t: self.config.t,
            n,
            verified: self.certificate.is_some(),
            cycles: self.certificate.as_ref().map(|c| c.cycles.clone()).unwrap_or_default(),
            trace: self.trace.clone(),
            failure: self.failure.clone(),
            config: self.config.clone(),
        }
    }
}

struct Ledger {
    covered: Vec<bool>,
    count: usize,
}

impl Ledger {
    fn claim(&mut self, cert: &FactorCertificate) -> std::result::Result<(), String> {
        for &v in &cert.covered {
            if std::mem::replace(&mut self.covered[v], true) {
                return Err(format!("vertex {v} covered twice"));
            }
            self.count += 1;
        }
        Ok(())
    }
}

type Step<T> = std::result::Result<T, PhaseFailure>;

fn fail(phase: &str, reason: impl ToString) -> PhaseFailure {
    PhaseFailure {
        phase: phase.into(),
        reason: reason.to_string(),
    }
}

fn tag(phase: &'static str) -> impl Fn(Error) -> PhaseFailure {
    move |e| match e {
        Error::Phase { phase, reason } => PhaseFailure { phase, reason },
        other => fail(phase, other),
    }
}

pub fn run_pipeline(pg: &PartitionedGraph, cfg: &PipelineConfig) -> Result<FactorCertificate> {
    let run = run_pipeline_traced(pg, cfg);
    match (run.certificate, run.failure) {
        (Some(c), _) => Ok(c),
        (None, Some(f)) => Err(Error::Phase {
            phase: f.phase,
            reason: f.reason,
        }),
        (None, None) => unreachable!("a run ends with a certificate or a failure"),
    }
}

pub fn run_pipeline_traced(pg: &PartitionedGraph, cfg: &PipelineConfig) -> PipelineRun {
    let mut run = PipelineRun {
        config: cfg.clone(),
        trace: Vec::new(),
        failure: None,
        absorber: None,
        bulk: None,
        leftover: None,
        certificate: None,
    };
    if let Err(f) = phases(pg, cfg, &mut run) {
        run.failure = Some(f);
    }
    run
}

fn phases(pg: &PartitionedGraph, cfg: &PipelineConfig, run: &mut PipelineRun) -> Step<()> {
    let t = cfg.t;
    let g = pg.graph();
    let n = g.vertex_count();
    cfg.validate().map_err(tag("input"))?;
    if pg.t() != t {
        return Err(fail("input", format!("host has {} parts, config says t = {t}", pg.t())));
    }
    if !pg.exceptional().is_empty() {
        return Err(fail("input", "the host must have no exceptional vertices"));
    }
    let n_tilde = pg.uniform_part_size().ok_or_else(|| fail("input", "parts differ in size"))?;
    if n_tilde % t != 0 {
        return Err(fail("input", Error::NotDivisible { size: n_tilde, t }));
    }
    let mut ledger = Ledger {
        covered: vec![false; n],
        count: 0,
    };
    let record = |run: &mut PipelineRun, phase: &str, detail: String, count: usize| {
        run.trace.push(PhaseRecord {
            phase: phase.into(),
            detail,
            covered: count,
        })
    };

    if cfg.check_gexp {
        let params = RegularityParams::new(cfg.epsilon.0, cfg.p.0, cfg.alpha.0).map_err(tag("gexp"))?;
        let sampling = Sampling {
            seed: sub_seed(cfg.seed, 6),
            ..Sampling::default()
        };
        let report = check_gexp_membership(pg, t, cfg.k, &params, sampling, Exec::default()).map_err(tag("gexp"))?;
        if !report.member() {
            return Err(fail("gexp", "host fails the G_exp membership check"));
        }
        record(run, "gexp", "member".into(), 0);
    }

    let m = cfg.m_for(n_tilde);
    if 2 * m > n_tilde {
        return Err(fail("carve", format!("2m = {} exceeds the part size {n_tilde}", 2 * m)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, 1));
    let (mut w, mut x) = (Vec::new(), Vec::new());
    for part in pg.parts() {
        let mut p = part.clone();
        p.shuffle(&mut rng);
        w.push(p[..m].to_vec());
        x.push(p[m..2 * m].to_vec());
    }
    record(run, "carve", format!("m = {m}"), 0);

    let tpl = build_template(t, m, cfg.degree_cap(), sub_seed(cfg.seed, 2), cfg.verify_cap).map_err(tag("template"))?;
    record(
        run,
        "template",
        format!("{} edges, max degree {}, verified = {}", tpl.edges.len(), tpl.degree(), tpl.verified),
        0,
    );
    let plan = plan_roots(&tpl, &w, &x, sub_seed(cfg.seed, 3)).map_err(tag("plan"))?;

    let kind = resolve_kind(cfg.absorber, t, cfg.k, tpl.edges.len(), m, n_tilde).map_err(tag("embed"))?;
    let model = AbsorberModel::new(kind, t, cfg.k, ms(cfg.budgets.absorb_ms)).map_err(tag("embed"))?;
    let reserved = mask(n, &w.iter().chain(x.iter()).flatten().copied().collect::<Vec<_>>());
    let opts = EmbedOptions {
        budget: ms(cfg.budgets.embed_ms),
        rounds: cfg.embed_rounds,
        seed: sub_seed(cfg.seed, 4),
        allow_shared_roots: tpl.degree() > 1,
    };
    let copies = embed_absorbers(pg, &plan.tuples, &model, &reserved, opts).map_err(tag("embed"))?;
    let wabs = WAbsorber::assemble(pg, tpl, plan, w, x, model, copies).map_err(tag("embed"))?;
    record(
        run,
        "embed",
        format!("{} {} copies, |V(A)| = {}", wabs.copies.len(), wabs.model.kind(), wabs.vertices.len()),
        0,
    );
    let avoid = wabs.vertices.clone();
    let w_parts = wabs.w.clone();
    run.absorber = Some(wabs);

    let bulk = cover_bulk(pg, &avoid, to_f64(&cfg.rho.0), ms(cfg.budgets.bulk_ms), sub_seed(cfg.seed, 5))
        .map_err(tag("bulk"))?;
    ledger.claim(&bulk.cover).map_err(|e| fail("ledger", e))?;
    record(
        run,
        "bulk",
        format!(
            "{} cycles, {} left per part, exact = {}",
            bulk.cover.cycles.len(),
            bulk.leftover[0].len(),
            bulk.exact
        ),
        ledger.count,
    );
    let flagged = bulk.flagged;
    let z_parts = bulk.leftover.clone();
    run.bulk = Some(bulk);
    if flagged {
        return Err(fail("bulk", format!("{} vertices left per part", z_parts[0].len())));
    }

    let leftover = match_leftover(pg, &z_parts, &w_parts, ms(cfg.budgets.leftover_ms)).map_err(tag("leftover"))?;
    ledger.claim(&leftover).map_err(|e| fail("ledger", e))?;
    record(run, "leftover", format!("{} cycles", leftover.cycles.len()), ledger.count);
    let used_w: Vec<Vertex> = w_parts.iter().flatten().copied().filter(|&v| ledger.covered[v]).collect();
    run.leftover = Some(leftover);

    let wabs = run.absorber.as_ref().expect("set above");
    let absorbed = wabs.absorb(&used_w).map_err(tag("absorb"))?;
    ledger.claim(&absorbed).map_err(|e| fail("ledger", e))?;
    record(run, "absorb", format!("{} cycles, |Z| = {}", absorbed.cycles.len(), used_w.len()), ledger.count);

    let bulk = run.bulk.as_ref().expect("set above");
    let full = bulk.cover.merged(run.leftover.as_ref().expect("set above")).merged(&absorbed);
    let all: Vec<Vertex> = (0..n).collect();
    if !verify_factor(g, &full, t, &all) {
        return Err(fail("verify", "the assembled certificate is not a C_t-factor of the host"));
    }
    record(run, "verify", format!("{} cycles cover all {n} vertices", full.cycles.len()), ledger.count);
    run.certificate = Some(full);
    Ok(())
}
