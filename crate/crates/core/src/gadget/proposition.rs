use std::time::{Duration, Instant};

use serde::Serialize;

use crate::density::two_density_flow;
use crate::error::Result;
use crate::factor::{find_ct_factor, verify_factor, FactorOutcome, FactorQuery};
use crate::graph::Vertex;
use crate::rational::{format, int};

use super::{blowup_labeling, build_absorber, build_switcher, contract_fconn, RootedGadget};

#[derive(Clone, Debug, Serialize)]
pub struct PropositionCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropositionReport {
    pub t: usize,
    pub k: usize,
    pub checks: Vec<PropositionCheck>,
}

impl PropositionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn factor_check(name: &str, g: &RootedGadget, removed: &[Vertex], budget: Duration) -> Result<PropositionCheck> {
    let start = Instant::now();
    let target: Vec<Vertex> = (0..g.vertex_count()).filter(|v| !removed.contains(v)).collect();
    let q = FactorQuery::new(g.t).restrict_to(&target).budget(budget).hints(&g.cycles);
    let outcome = find_ct_factor(&g.graph, &q)?;
    let (pass, detail) = match &outcome {
        FactorOutcome::Found(cert) => {
            let ok = verify_factor(&g.graph, cert, g.t, &target);
            (ok, format!("{} cycles, verified = {ok}", cert.cycles.len()))
        }
        FactorOutcome::None => (false, "no factor (complete search)".into()),
        FactorOutcome::Unknown => (false, "budget exhausted".into()),
    };
    Ok(PropositionCheck {
        name: name.into(),
        pass,
        detail,
        millis: start.elapsed().as_millis(),
    })
}

/// Runs the absorber property suite for one `(t, k)`: the four factor
/// claims, the 2-density bound for `F_conn` and the blow-up labelling.
pub fn verify_proposition(t: usize, k: usize, budget: Duration) -> Result<PropositionReport> {
    let sw = build_switcher(t, k)?;
    let abs = build_absorber(t, k)?;
    let mut checks = vec![
        factor_check("F_sw - v", &sw, &sw.roots[..1], budget)?,
        factor_check("F_sw - v'", &sw, &sw.roots[1..], budget)?,
        factor_check("F_abs", &abs, &[], budget)?,
        factor_check("F_abs - R", &abs, &abs.roots, budget)?,
    ];

    let start = Instant::now();
    let fconn = contract_fconn(&abs)?;
    let m2 = two_density_flow(&fconn.graph)?;
    let bound = int(k) / int(k - 1);
    checks.push(PropositionCheck {
        name: "m_2(F_conn) <= k/(k-1)".into(),
        pass: m2.value <= bound,
        detail: format!("m_2 = {}, bound = {}", format(&m2.value), format(&bound)),
        millis: start.elapsed().as_millis(),
    });

    let start = Instant::now();
    let labels = blowup_labeling(&abs);
    checks.push(PropositionCheck {
        name: "F_abs in blow-up of C_t".into(),
        pass: labels.is_ok(),
        detail: match &labels {
            Ok(l) => format!("roots in parts {:?}", abs.roots.iter().map(|&r| l[r] + 1).collect::<Vec<_>>()),
            Err(e) => e.to_string(),
        },
        millis: start.elapsed().as_millis(),
    });
    Ok(PropositionReport { t, k, checks })
}
