//! Gadgets for absorbing `C_t`-factors: `C_t`-trees, ladders, switchers,
//! absorbers and the two derived graphs used for density arguments.
//!
//! Every builder returns a [`RootedGadget`] with deterministic vertex ids, one
//! role per vertex and the list of defining `t`-cycles. The cycle list is a
//! search hint only; nothing downstream trusts it without verification.

mod build;
mod contract;
mod labeling;
mod proposition;

use std::fmt;

use serde::Serialize;

use crate::graph::{to_dot, Graph, Vertex};

pub use build::{
    build_absorber, build_compact_absorber, build_compact_switcher, build_ct_tree, build_ladder,
    build_switcher, ct_tree_size,
};
pub use contract::{contract_fconn, fabs_minus, root_tree_vertices};
pub use labeling::{blowup_labeling, check_labeling};
pub use proposition::{verify_proposition, PropositionCheck, PropositionReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    CtTree,
    Ladder,
    Switcher,
    Absorber,
    Fconn,
    FabsMinus,
    CompactSwitcher,
    CompactAbsorber,
}

impl GadgetKind {
    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::CtTree => "ct_tree",
            GadgetKind::Ladder => "ladder",
            GadgetKind::Switcher => "switcher",
            GadgetKind::Absorber => "absorber",
            GadgetKind::Fconn => "fconn",
            GadgetKind::FabsMinus => "fabs_minus",
            GadgetKind::CompactSwitcher => "compact_switcher",
            GadgetKind::CompactAbsorber => "compact_absorber",
        }
    }

    pub fn is_absorber(self) -> bool {
        matches!(self, GadgetKind::Absorber | GadgetKind::CompactAbsorber)
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Position of a vertex inside its construction. Indices are 1-based as in
/// the usual `u_{i,j}` / `w_{i,j}` notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// `u_{level,index}` of the tree rooted at `v` (or `v'` when `far`).
    Tree { far: bool, level: usize, index: usize },
    /// `w_{row,col}` of ladder `ladder` (1 or 2) joining bottom cycle pair
    /// `pair`. A standalone ladder uses `pair = 0, ladder = 0`.
    Ladder { pair: usize, ladder: u8, row: usize, col: usize },
    /// Inner vertex of a compact switcher path.
    Path { index: usize },
    /// Image of a contracted root tree.
    Contracted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RoleLabel {
    /// Switcher index (1-based) inside an absorber.
    pub switcher: Option<usize>,
    pub role: Role,
}

impl fmt::Display for RoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.switcher {
            match self.role {
                Role::Tree { far: false, level: 0, .. } => return write!(f, "s_{i}"),
                Role::Tree { far: true, level: 0, .. } | Role::Contracted => {
                    return write!(f, "r_{i}")
                }
                _ => write!(f, "sw{i}:")?,
            }
        }
        match self.role {
            Role::Tree { far, level, index } => {
                let prime = if far { "'" } else { "" };
                write!(f, "u{prime}_{{{level},{index}}}")
            }
            Role::Ladder {
                pair,
                ladder,
                row,
                col,
            } => {
                if ladder == 0 {
                    write!(f, "w_{{{row},{col}}}")
                } else {
                    write!(f, "w[{pair}.{ladder}]_{{{row},{col}}}")
                }
            }
            Role::Path { index } => write!(f, "p_{index}"),
            Role::Contracted => f.write_str("r*"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootedGadget {
    pub graph: Graph,
    pub kind: GadgetKind,
    pub t: usize,
    pub k: usize,
    /// One role per vertex, indexed by vertex id.
    pub roles: Vec<RoleLabel>,
    /// Defining `t`-cycles in cyclic order.
    pub cycles: Vec<Vec<Vertex>>,
    /// Tree: `[root]`. Switcher: `[v, v']`. Absorber, `fconn`, `fabs_minus`:
    /// `r_1..r_t` (for `fabs_minus` the roots are gone and this is empty).
    pub roots: Vec<Vertex>,
    /// `s_1..s_t` for absorber-derived gadgets, empty otherwise.
    pub s_cycle: Vec<Vertex>,
}

impl RootedGadget {
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn role_name(&self, v: Vertex) -> String {
        match self.kind {
            GadgetKind::Switcher | GadgetKind::CompactSwitcher if v == self.roots[0] => "v".into(),
            GadgetKind::Switcher | GadgetKind::CompactSwitcher if v == self.roots[1] => "v'".into(),
            _ => self.roles[v].to_string(),
        }
    }

    pub fn to_json(&self) -> GadgetJson {
        GadgetJson {
            kind: self.kind,
            t: self.t,
            k: self.k,
            n: self.vertex_count(),
            edges: self.graph.edges().map(|(u, v)| [u, v]).collect(),
            roles: (0..self.vertex_count()).map(|v| self.role_name(v)).collect(),
            roots: self.roots.clone(),
            s_cycle: self.s_cycle.clone(),
            cycles: self.cycles.clone(),
        }
    }

    pub fn to_dot(&self) -> String {
        let label = |v: Vertex| self.role_name(v);
        let color = |v: Vertex| {
            if self.roots.contains(&v) {
                return "tomato";
            }
            if self.s_cycle.contains(&v) {
                return "gold";
            }
            match self.roles[v].role {
                Role::Tree { far: false, .. } => "lightblue",
                Role::Tree { far: true, .. } => "palegreen",
                Role::Ladder { .. } => "plum",
                Role::Path { .. } => "lightgrey",
                Role::Contracted => "tomato",
            }
        };
        to_dot(&self.graph, self.kind.name(), Some(&label), Some(&color))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetJson {
    pub kind: GadgetKind,
    pub t: usize,
    pub k: usize,
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    pub roles: Vec<String>,
    pub roots: Vec<Vertex>,
    pub s_cycle: Vec<Vertex>,
    pub cycles: Vec<Vec<Vertex>>,
}

/// `t ∈ {2k-1, 2k}` with `k >= 2`.
pub fn check_tk(t: usize, k: usize) -> crate::Result<()> {
    if k < 2 || (t != 2 * k - 1 && t != 2 * k) {
        return Err(crate::error::invalid(format!(
            "need k >= 2 and t in {{2k-1, 2k}}, got t = {t}, k = {k}"
        )));
    }
    Ok(())
}
