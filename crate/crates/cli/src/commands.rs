use std::path::{Path, PathBuf};
use std::time::Duration;

use ctfactor_core::absorb::{build_template, run_pipeline_traced, PipelineConfig};
use ctfactor_core::density::{two_density_closure, two_density_exact, two_density_flow};
use ctfactor_core::factor::{find_ct_factor, verify_factor, FactorCertificate, FactorOutcome, FactorQuery, DEFAULT_BUDGET};
use ctfactor_core::gadget::{
    build_absorber, build_compact_absorber, build_compact_switcher, build_ct_tree, build_ladder, build_switcher,
    contract_fconn, fabs_minus, verify_proposition,
};
use ctfactor_core::graph::{to_dot, GraphJson, PartitionedGraphJson};
use ctfactor_core::par::Exec;
use ctfactor_core::random::{
    attack_half_cut, attack_second_neighborhood, default_target, empirical_edge_bound, empirical_k_expansion, rows_csv,
    sample_blowup_subgraph, sample_gnp, sub_seed, AttackReport,
};
use ctfactor_core::rational::{format as fmt_rational, parse, parse_density};
use ctfactor_core::regularity::{
    census_csv, check_gexp_membership, check_lower_regular_exact, check_lower_regular_sampled, check_regular_sampled,
    find_violation_exact, typicality_census, RegularityParams, SampledVerdict, Sampling, EXACT_PAIR_CAP,
};
use ctfactor_core::{Error, Graph, PartitionedGraph};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::*;
use crate::manifest::{sha256_hex, FileDigest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => f.write_str(s),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(Error::Template(_) | Error::Phase { .. }) => EXIT_NEGATIVE,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

pub type CmdResult = Result<Outcome, CliError>;

/// A single result document.
pub struct Output {
    pub stem: String,
    pub format: Format,
    pub bytes: Vec<u8>,
}

impl Output {
    pub fn file_name(&self) -> String {
        format!("{}.{}", self.stem, self.format.ext())
    }
}

pub struct Outcome {
    pub summary: String,
    pub output: Option<Output>,
    pub code: i32,
    /// Print the document when there is nowhere to write it.
    pub echo: bool,
    /// Extra destination requested by the command itself.
    pub out_path: Option<PathBuf>,
}

impl Outcome {
    fn new(summary: impl Into<String>, code: i32) -> Self {
        Outcome {
            summary: summary.into(),
            output: None,
            code,
            echo: false,
            out_path: None,
        }
    }

    fn with(mut self, output: Output) -> Self {
        self.output = Some(output);
        self
    }

    fn echoed(mut self) -> Self {
        self.echo = true;
        self
    }
}

pub struct Ctx {
    pub seed: Option<u64>,
    pub budget: Option<Duration>,
    pub format: Option<Format>,
    pub inputs: Vec<FileDigest>,
    pub master_seed: u64,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(FileDigest {
            file: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    fn json<T: for<'de> Deserialize<'de>>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    fn graph(&mut self, path: &Path) -> Result<Graph, CliError> {
        let json: GraphJson = self.json(path)?;
        Ok(Graph::from_json(&json)?)
    }

    fn partitioned(&mut self, path: &Path) -> Result<PartitionedGraph, CliError> {
        let json: PartitionedGraphJson = self.json(path)?;
        Ok(PartitionedGraph::from_json(&json)?)
    }

    fn seed(&mut self) -> u64 {
        self.master_seed = self.seed.unwrap_or(0);
        self.master_seed
    }

    fn budget(&self) -> Duration {
        self.budget.unwrap_or(DEFAULT_BUDGET)
    }

    fn pick(&self, supported: &[Format]) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(supported[0]);
        if supported.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!(
                "format {} is not available here; choose one of {}",
                f.ext(),
                supported.iter().map(|f| f.ext()).collect::<Vec<_>>().join(", ")
            )))
        }
    }
}

fn json_output<T: Serialize>(stem: &str, value: &T) -> Output {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    Output {
        stem: stem.into(),
        format: Format::Json,
        bytes,
    }
}

fn text_output(stem: &str, format: Format, text: String) -> Output {
    Output {
        stem: stem.into(),
        format,
        bytes: text.into_bytes(),
    }
}

fn rational(s: &str) -> Result<ctfactor_core::Rational, CliError> {
    Ok(parse(s)?)
}

pub fn run(cmd: &Command, ctx: &mut Ctx) -> CmdResult {
    match cmd {
        Command::Gadget(c) => gadget(c, ctx),
        Command::M2(a) => m2(a, ctx),
        Command::Factor(c) => factor(c, ctx),
        Command::Regcheck(a) => regcheck(a, ctx),
        Command::Gnp(c) => gnp(c, ctx),
        Command::Attack(c) => attack(c, ctx),
        Command::Pipeline(c) => pipeline(c, ctx),
        Command::Template(a) => template(a, ctx),
    }
}

fn gadget(cmd: &GadgetCmd, ctx: &mut Ctx) -> CmdResult {
    match *cmd {
        GadgetCmd::Build { kind, t, k, a, b, l } => {
            let format = ctx.pick(&[Format::Json, Format::Dot])?;
            let g = match kind {
                GadgetName::CtTree => build_ct_tree(t, k)?,
                GadgetName::Ladder => build_ladder(a, b, l)?,
                GadgetName::Switcher => build_switcher(t, k)?,
                GadgetName::Absorber => build_absorber(t, k)?,
                GadgetName::Fconn => contract_fconn(&build_absorber(t, k)?)?,
                GadgetName::FabsMinus => fabs_minus(&build_absorber(t, k)?)?,
                GadgetName::CompactSwitcher => build_compact_switcher(t)?,
                GadgetName::CompactAbsorber => build_compact_absorber(t)?,
            };
            let out = match format {
                Format::Dot => text_output(g.kind.name(), Format::Dot, g.to_dot()),
                _ => json_output(g.kind.name(), &g.to_json()),
            };
            let summary = format!("{}: {} vertices, {} edges", g.kind, g.vertex_count(), g.graph.edge_count());
            Ok(Outcome::new(summary, EXIT_OK).with(out).echoed())
        }
        GadgetCmd::Verify { t, k } => {
            ctx.pick(&[Format::Json])?;
            let report = verify_proposition(t, k, ctx.budget())?;
            let mut summary = String::new();
            for c in &report.checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                summary.push_str(&format!("{verdict} {} ({})\n", c.name, c.detail));
                eprintln!("{}: {} ms", c.name, c.millis);
            }
            // timings go to stderr so stdout and the document replay byte for byte
            let doc = json!({
                "t": t,
                "k": k,
                "checks": report.checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect::<Vec<_>>(),
            });
            let code = if report.all_pass() { EXIT_OK } else { EXIT_NEGATIVE };
            Ok(Outcome::new(summary.trim_end(), code).with(json_output("proposition", &doc)))
        }
    }
}

fn m2(a: &M2Args, ctx: &mut Ctx) -> CmdResult {
    ctx.pick(&[Format::Json])?;
    let g = ctx.graph(&a.input)?;
    let r = match a.method {
        M2Method::Flow => two_density_flow(&g)?,
        M2Method::Closure => two_density_closure(&g, Exec::default())?,
        M2Method::Exact => two_density_exact(&g)?,
    };
    let value = fmt_rational(&r.value);
    let doc = json!({"value": value, "witness": r.witness, "method": a.method});
    Ok(Outcome::new(value, EXIT_OK).with(json_output("m2", &doc)))
}

#[derive(Deserialize)]
struct CertFile {
    cycles: Vec<Vec<usize>>,
}

fn factor(cmd: &FactorCmd, ctx: &mut Ctx) -> CmdResult {
    ctx.pick(&[Format::Json])?;
    match cmd {
        FactorCmd::Solve { t, input, canonical } => {
            let t = *t;
            let (g, parts) = if *canonical {
                let pg = ctx.partitioned(input)?;
                (pg.graph().clone(), Some(pg.parts().to_vec()))
            } else {
                (ctx.graph(input)?, None)
            };
            let mut q = FactorQuery::new(t).budget(ctx.budget());
            if let Some(p) = &parts {
                q = q.canonical(p);
            }
            let outcome = find_ct_factor(&g, &q)?;
            let all: Vec<usize> = (0..g.vertex_count()).collect();
            let (verdict, code, cert) = match outcome {
                FactorOutcome::Found(c) => {
                    if !verify_factor(&g, &c, t, &all) {
                        return Err(CliError::Core(Error::Phase {
                            phase: "factor".into(),
                            reason: "solver output failed verification".into(),
                        }));
                    }
                    ("found", EXIT_OK, Some(c))
                }
                FactorOutcome::None => ("none", EXIT_NEGATIVE, None),
                FactorOutcome::Unknown => ("unknown", EXIT_UNKNOWN, None),
            };
            let summary = match &cert {
                Some(c) => format!("found: {} cycles, verified", c.cycles.len()),
                None => verdict.to_string(),
            };
            let doc = json!({
                "outcome": verdict,
                "t": t,
                "cycles": cert.map(|c| c.cycles).unwrap_or_default(),
            });
            Ok(Outcome::new(summary, code).with(json_output("factor", &doc)))
        }
        FactorCmd::Verify { t, input, cert } => {
            let g = ctx.graph(input)?;
            let file: CertFile = ctx.json(cert)?;
            let c = FactorCertificate::new(*t, file.cycles);
            let all: Vec<usize> = (0..g.vertex_count()).collect();
            let ok = verify_factor(&g, &c, *t, &all);
            let doc = json!({"valid": ok, "cycles": c.cycles.len()});
            let summary = if ok { "valid" } else { "invalid" };
            Ok(Outcome::new(summary, if ok { EXIT_OK } else { EXIT_NEGATIVE }).with(json_output("verify", &doc)))
        }
    }
}

fn regcheck(a: &RegcheckArgs, ctx: &mut Ctx) -> CmdResult {
    let pg = ctx.partitioned(&a.input)?;
    let params = RegularityParams::new(rational(&a.epsilon)?, rational(&a.p)?, rational(&a.alpha)?)?;
    let seed = ctx.seed();
    let sampling = Sampling {
        trials: a.trials,
        seed: sub_seed(seed, 0),
    };
    match a.mode {
        RegMode::Pair => {
            ctx.pick(&[Format::Json])?;
            let part = |i: usize| {
                pg.parts()
                    .get(i.wrapping_sub(1))
                    .cloned()
                    .ok_or_else(|| CliError::Usage(format!("part {i} does not exist (parts are 1..={})", pg.t())))
            };
            let (xs, ys) = (part(a.x)?, part(a.y)?);
            let g = pg.graph();
            let exact = xs.len() <= EXACT_PAIR_CAP && ys.len() <= EXACT_PAIR_CAP;
            let (doc, summary, code) = if exact {
                let (regular, witness) = if a.lower {
                    (check_lower_regular_exact(g, &xs, &ys, &params)?, None)
                } else {
                    let w = find_violation_exact(g, &xs, &ys, &params)?;
                    (w.is_none(), w)
                };
                let doc = json!({"method": "exact", "regular": regular, "witness": witness});
                let summary = if regular { "regular" } else { "irregular" };
                (doc, summary.to_string(), if regular { EXIT_OK } else { EXIT_NEGATIVE })
            } else {
                let verdict = if a.lower {
                    check_lower_regular_sampled(g, &xs, &ys, &params, a.trials, sampling.seed)?
                } else {
                    check_regular_sampled(g, &xs, &ys, &params, a.trials, sampling.seed)?
                };
                let (summary, code) = match &verdict {
                    SampledVerdict::Violation(_) => ("irregular (sampled witness)".to_string(), EXIT_NEGATIVE),
                    SampledVerdict::NoViolationFound { trials } => {
                        (format!("no violation in {trials} sampled trials (not a certificate)"), EXIT_OK)
                    }
                };
                (json!({"method": "sampled", "verdict": verdict}), summary, code)
            };
            Ok(Outcome::new(summary, code).with(json_output("regcheck", &doc)))
        }
        RegMode::Gexp => {
            ctx.pick(&[Format::Json])?;
            let report = check_gexp_membership(&pg, pg.t(), a.k, &params, sampling, Exec::default())?;
            let member = report.member();
            let summary = format!(
                "member = {member} ({} pairs, {} degree, {} neighbourhood, {} lower-regular failures)",
                report.pairs.len(),
                report.degree_failures.len(),
                report.neighborhood_failures.len(),
                report.lower_regular_failures.len()
            );
            Ok(Outcome::new(summary, if member { EXIT_OK } else { EXIT_NEGATIVE }).with(json_output("gexp", &report)))
        }
        RegMode::Typical => {
            let format = ctx.pick(&[Format::Csv, Format::Json])?;
            let rows = typicality_census(&pg, pg.t(), a.k, &params, sampling, Exec::default())?;
            let typical = rows.iter().filter(|r| r.typical()).count();
            let out = match format {
                Format::Json => json_output("census", &rows),
                _ => text_output("census", Format::Csv, census_csv(&pg, &rows)),
            };
            Ok(Outcome::new(format!("{typical} of {} vertices typical", rows.len()), EXIT_OK).with(out))
        }
    }
}

fn gnp(cmd: &GnpCmd, ctx: &mut Ctx) -> CmdResult {
    let seed = ctx.seed();
    match cmd {
        GnpCmd::Sample { n, p } => {
            let format = ctx.pick(&[Format::Json, Format::Dot])?;
            let s = sample_gnp(*n, parse_density(p, *n)?, seed, Exec::default())?;
            let out = match format {
                Format::Dot => text_output("gnp", Format::Dot, to_dot(&s.graph, "gnp", None, None)),
                _ => json_output("gnp", &s.graph.to_json()),
            };
            let summary = format!("G({n}, {}): {} edges", fmt_rational(&s.p.0), s.edge_count);
            Ok(Outcome::new(summary, EXIT_OK).with(out).echoed())
        }
        GnpCmd::Blowup { t, n_tilde, p, alpha } => {
            ctx.pick(&[Format::Json])?;
            let pg = sample_blowup_subgraph(*t, *n_tilde, parse_density(p, *n_tilde)?, rational(alpha)?, seed)?;
            let summary = format!("blow-up of C_{t}, parts of {n_tilde}: {} edges", pg.graph().edge_count());
            Ok(Outcome::new(summary, EXIT_OK).with(json_output("blowup", &pg.to_json())).echoed())
        }
        GnpCmd::Probe { n, p, k, nu, trials, singleton_fallback } => {
            let format = ctx.pick(&[Format::Json, Format::Csv])?;
            let s = sample_gnp(*n, parse_density(p, *n)?, seed, Exec::default())?;
            let r = empirical_k_expansion(&s, *k, *nu, *trials, sub_seed(seed, 1), *singleton_fallback, Exec::default())?;
            let summary = format!("{} of {} sets expand (regime {:?})", r.passes, r.trials, r.regime);
            let out = match format {
                Format::Csv => text_output("probe", Format::Csv, rows_csv(&r.rows)),
                _ => json_output("probe", &r),
            };
            Ok(Outcome::new(summary, EXIT_OK).with(out))
        }
        GnpCmd::EdgeBound { n, p, trials, c } => {
            let format = ctx.pick(&[Format::Json, Format::Csv])?;
            let s = sample_gnp(*n, parse_density(p, *n)?, seed, Exec::default())?;
            let r = empirical_edge_bound(&s, *trials, *c, sub_seed(seed, 1), Exec::default())?;
            let summary = format!("{} violations in {} trials", r.violations, r.trials);
            let out = match format {
                Format::Csv => text_output("edge_bound", Format::Csv, rows_csv(&r.rows)),
                _ => json_output("edge_bound", &r),
            };
            Ok(Outcome::new(summary, EXIT_OK).with(out))
        }
    }
}

fn host_graph(host: &Host, ctx: &mut Ctx) -> Result<Graph, CliError> {
    let seed = ctx.seed();
    match (&host.input, host.n, host.complete) {
        (Some(path), _, _) => ctx.graph(path),
        (None, Some(n), _) => {
            let p = host.p.as_deref().ok_or_else(|| CliError::Usage("--n needs --p".into()))?;
            Ok(sample_gnp(n, parse_density(p, n)?, seed, Exec::default())?.graph)
        }
        (None, None, Some(n)) => Ok(Graph::complete(n)),
        _ => Err(CliError::Usage("give --input, --n with --p, or --complete".into())),
    }
}

fn attack_outcome(report: AttackReport) -> Outcome {
    let holds = report.post_property.holds;
    let summary = format!(
        "deleted {} edges, max deleted fraction {}, {} = {}",
        report.deleted_edges,
        fmt_rational(&report.max_deleted_degree_fraction.0),
        report.post_property.name,
        holds.map_or("unknown".to_string(), |h| h.to_string())
    );
    let code = if holds.is_some() { EXIT_OK } else { EXIT_UNKNOWN };
    Outcome::new(summary, code).with(json_output("attack", &report))
}

fn attack(cmd: &AttackCmd, ctx: &mut Ctx) -> CmdResult {
    ctx.pick(&[Format::Json])?;
    match cmd {
        AttackCmd::SecondNeighborhood { host, target } => {
            let g = host_graph(host, ctx)?;
            let v = target
                .or_else(|| default_target(&g))
                .ok_or_else(|| CliError::Usage("graph has no vertices".into()))?;
            let (_, report) = attack_second_neighborhood(&g, v)?;
            Ok(attack_outcome(report))
        }
        AttackCmd::HalfCut { host, t, set } => {
            let g = host_graph(host, ctx)?;
            let (_, report) = attack_half_cut(&g, *t, set.as_deref(), ctx.budget())?;
            Ok(attack_outcome(report))
        }
    }
}

fn pipeline(cmd: &PipelineCmd, ctx: &mut Ctx) -> CmdResult {
    ctx.pick(&[Format::Json])?;
    let PipelineCmd::Run { config, input, out } = cmd;
    let mut cfg: PipelineConfig = match config {
        Some(path) => ctx.json(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = ctx.seed {
        cfg.seed = seed;
    }
    ctx.master_seed = cfg.seed;
    if let Some(b) = ctx.budget {
        let ms = b.as_millis() as u64;
        cfg.budgets.embed_ms = ms;
        cfg.budgets.bulk_ms = ms;
        cfg.budgets.leftover_ms = ms;
        cfg.budgets.absorb_ms = ms;
    }
    let pg = ctx.partitioned(input)?;
    let run = run_pipeline_traced(&pg, &cfg);
    let cert = run.to_certificate(pg.graph().vertex_count());
    let mut summary: Vec<String> = run.trace.iter().map(|r| format!("{}: {}", r.phase, r.detail)).collect();
    let code = match &run.failure {
        None => {
            summary.push(format!("verified C_{}-factor with {} cycles", cfg.t, cert.cycles.len()));
            EXIT_OK
        }
        Some(f) => {
            summary.push(format!("failed in {}: {}", f.phase, f.reason));
            EXIT_NEGATIVE
        }
    };
    let mut outcome = Outcome::new(summary.join("\n"), code).with(json_output("certificate", &cert));
    outcome.out_path = out.clone();
    Ok(outcome)
}

fn template(a: &TemplateArgs, ctx: &mut Ctx) -> CmdResult {
    ctx.pick(&[Format::Json])?;
    let seed = ctx.seed();
    let cap = a.max_degree.unwrap_or_else(|| 40usize.saturating_pow(a.t as u32));
    let tpl = build_template(a.t, a.m, cap, seed, a.verify_cap)?;
    let summary = format!("{} edges, max degree {}, verified = {}", tpl.edges.len(), tpl.degree(), tpl.verified);
    Ok(Outcome::new(summary, EXIT_OK).with(json_output("template", &tpl)).echoed())
}
