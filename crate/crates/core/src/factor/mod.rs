//! Exact `C_t`-factor search and verification, canonical copy counting, and
//! saturating matchings in Haxell-shaped hypergraphs.

pub(crate) mod canonical;
mod cycles;
mod hyper;
mod search;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex};

pub use canonical::{canonical_copies, enumerate_canonical_copies};
pub use cycles::{cycles_in, cycles_through};
pub use hyper::{
    check_haxell_condition, find_saturating_matching, Hypergraph, MatchOutcome, Matching, HAXELL_CAP_A,
    HAXELL_CAP_B,
};
pub use search::{find_ct_factor, FactorOutcome, FactorQuery};

/// Vertex-disjoint `t`-cycles, each listed in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCertificate {
    pub t: usize,
    pub cycles: Vec<Vec<Vertex>>,
    /// Sorted union of the cycles.
    pub covered: Vec<Vertex>,
}

impl FactorCertificate {
    pub fn new(t: usize, cycles: Vec<Vec<Vertex>>) -> Self {
        let mut covered: Vec<Vertex> = cycles.iter().flatten().copied().collect();
        covered.sort_unstable();
        FactorCertificate { t, cycles, covered }
    }

    pub fn empty(t: usize) -> Self {
        FactorCertificate::new(t, Vec::new())
    }

    /// Concatenation; disjointness is left to [`verify_factor`].
    pub fn merged(&self, other: &FactorCertificate) -> Self {
        let mut cycles = self.cycles.clone();
        cycles.extend(other.cycles.iter().cloned());
        FactorCertificate::new(self.t, cycles)
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> Self {
        FactorCertificate::new(self.t, self.cycles.iter().map(|c| c.iter().map(|&v| f(v)).collect()).collect())
    }
}

/// Default wall-clock budget for a single solver call.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(120);

/// True iff every tuple is a `t`-cycle of `g`, the tuples are pairwise
/// disjoint and their union is exactly `required_cover`.
pub fn verify_factor(g: &Graph, cert: &FactorCertificate, t: usize, required_cover: &[Vertex]) -> bool {
    let n = g.vertex_count();
    let mut used = vec![false; n];
    let mut count = 0;
    for c in &cert.cycles {
        if c.len() != t || t < 3 {
            return false;
        }
        for i in 0..t {
            let (u, v) = (c[i], c[(i + 1) % t]);
            if u >= n || v >= n || !g.has_edge(u, v) {
                return false;
            }
        }
        for &v in c {
            if std::mem::replace(&mut used[v], true) {
                return false;
            }
            count += 1;
        }
    }
    let mut required = vec![false; n];
    for &v in required_cover {
        if v >= n || std::mem::replace(&mut required[v], true) {
            return false;
        }
    }
    count == required_cover.len() && required_cover.iter().all(|&v| used[v])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_basic_cases() {
        let c4 = Graph::cycle(4);
        let cert = FactorCertificate::new(4, vec![vec![0, 1, 2, 3]]);
        assert!(verify_factor(&c4, &cert, 4, &[0, 1, 2, 3]));
        assert!(!verify_factor(&c4, &cert, 4, &[0, 1, 2]));
        assert!(!verify_factor(&c4, &FactorCertificate::new(4, vec![vec![0, 2, 1, 3]]), 4, &[0, 1, 2, 3]));
        let k6 = Graph::complete(6);
        let overlap = FactorCertificate::new(3, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert!(!verify_factor(&k6, &overlap, 3, &[0, 1, 2, 3, 4]));
        let wrong_len = FactorCertificate::new(3, vec![vec![0, 1, 2, 3]]);
        assert!(!verify_factor(&k6, &wrong_len, 3, &[0, 1, 2, 3]));
    }
}
