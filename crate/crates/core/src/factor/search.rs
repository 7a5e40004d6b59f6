use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{mask, Graph, Vertex};
use crate::par::Exec;

use super::canonical::canonical_copies_masked;
use super::cycles::cycles_in;
use super::{FactorCertificate, DEFAULT_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorOutcome {
    Found(FactorCertificate),
    /// The search space was exhausted: no factor exists.
    None,
    /// The budget ran out first.
    Unknown,
}

impl FactorOutcome {
    pub fn certificate(&self) -> Option<&FactorCertificate> {
        match self {
            FactorOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorQuery<'a> {
    pub t: usize,
    /// Cover exactly this set (default: every vertex).
    pub restrict_to: Option<&'a [Vertex]>,
    /// `t` parts in cyclic order; only canonical cycles are used.
    pub canonical_parts: Option<&'a [Vec<Vertex>]>,
    pub budget: Duration,
    /// Cycles tried first when they are available.
    pub hints: &'a [Vec<Vertex>],
    pub exec: Exec,
}

impl<'a> FactorQuery<'a> {
    pub fn new(t: usize) -> Self {
        FactorQuery {
            t,
            restrict_to: None,
            canonical_parts: None,
            budget: DEFAULT_BUDGET,
            hints: &[],
            exec: Exec::default(),
        }
    }

    pub fn restrict_to(mut self, set: &'a [Vertex]) -> Self {
        self.restrict_to = Some(set);
        self
    }

    pub fn canonical(mut self, parts: &'a [Vec<Vertex>]) -> Self {
        self.canonical_parts = Some(parts);
        self
    }

    pub fn budget(mut self, budget: Duration) -> Self {
        self.budget = budget;
        self
    }

    pub fn hints(mut self, hints: &'a [Vec<Vertex>]) -> Self {
        self.hints = hints;
        self
    }
}

/// Complete exact-cover search over the `t`-cycles of the target set. The
/// branching vertex is the uncovered vertex lying in the fewest remaining
/// cycles (lowest id on ties), and hint cycles are tried before the rest, so
/// forced structure is resolved without guessing.
pub fn find_ct_factor(g: &Graph, q: &FactorQuery<'_>) -> Result<FactorOutcome> {
    let n = g.vertex_count();
    let t = q.t;
    if t < 3 {
        return Err(crate::error::invalid(format!("cycle length must be >= 3, got {t}")));
    }
    let target: Vec<Vertex> = match q.restrict_to {
        Some(set) => {
            let mut s = set.to_vec();
            s.sort_unstable();
            s.dedup();
            s
        }
        None => (0..n).collect(),
    };
    if target.len() % t != 0 {
        return Err(Error::NotDivisible { size: target.len(), t });
    }
    if target.is_empty() {
        return Ok(FactorOutcome::Found(FactorCertificate::empty(t)));
    }
    let allowed = mask(n, &target);
    let cycles = match q.canonical_parts {
        Some(parts) => {
            if parts.len() != t {
                return Err(crate::error::invalid(format!("{} canonical parts given for t = {t}", parts.len())));
            }
            canonical_copies_masked(g, parts, &allowed)
        }
        None => cycles_in(g, t, &allowed, q.exec),
    };
    let mut hint_keys: Vec<Vec<Vertex>> = q.hints.iter().map(|c| canonical_key(c)).collect();
    hint_keys.sort_unstable();
    let is_hint: Vec<bool> = cycles
        .iter()
        .map(|c| hint_keys.binary_search(&canonical_key(c)).is_ok())
        .collect();
    let mut cover = Cover::new(t, n, &target, cycles, is_hint);
    Ok(cover.solve(q.budget))
}

fn canonical_key(c: &[Vertex]) -> Vec<Vertex> {
    let mut k = c.to_vec();
    k.sort_unstable();
    k
}

/// Exact cover of `target` by cycles, with in-place removal and undo.
struct Cover {
    t: usize,
    cycles: Vec<Vec<Vertex>>,
    by_vertex: Vec<Vec<usize>>,
    is_hint: Vec<bool>,
    active: Vec<bool>,
    count: Vec<usize>,
    /// Uncovered target vertices; `pos[v]` indexes into it.
    open: Vec<Vertex>,
    pos: Vec<usize>,
    removed: Vec<usize>,
}

struct Frame {
    options: Vec<usize>,
    next: usize,
    /// (`removed` length, chosen cycle) of the applied option, if any.
    applied: Option<(usize, usize)>,
}

impl Cover {
    fn new(t: usize, n: usize, target: &[Vertex], cycles: Vec<Vec<Vertex>>, is_hint: Vec<bool>) -> Self {
        let mut by_vertex = vec![Vec::new(); n];
        for (ci, c) in cycles.iter().enumerate() {
            for &v in c {
                by_vertex[v].push(ci);
            }
        }
        let count = by_vertex.iter().map(Vec::len).collect();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in target.iter().enumerate() {
            pos[v] = i;
        }
        Cover {
            t,
            active: vec![true; cycles.len()],
            cycles,
            by_vertex,
            is_hint,
            count,
            open: target.to_vec(),
            pos,
            removed: Vec::new(),
        }
    }

    fn close(&mut self, v: Vertex) {
        let i = self.pos[v];
        let last = *self.open.last().expect("v is open");
        self.open.swap_remove(i);
        if last != v {
            self.pos[last] = i;
        }
        self.pos[v] = usize::MAX;
    }

    fn reopen(&mut self, v: Vertex) {
        self.pos[v] = self.open.len();
        self.open.push(v);
    }

    fn apply(&mut self, c: usize) {
        for i in 0..self.cycles[c].len() {
            let x = self.cycles[c][i];
            self.close(x);
            for j in 0..self.by_vertex[x].len() {
                let d = self.by_vertex[x][j];
                if self.active[d] {
                    self.active[d] = false;
                    self.removed.push(d);
                    for &y in &self.cycles[d] {
                        self.count[y] -= 1;
                    }
                }
            }
        }
    }

    fn undo(&mut self, mark: usize, c: usize) {
        while self.removed.len() > mark {
            let d = self.removed.pop().expect("above mark");
            self.active[d] = true;
            for &y in &self.cycles[d] {
                self.count[y] += 1;
            }
        }
        for i in (0..self.cycles[c].len()).rev() {
            let x = self.cycles[c][i];
            self.reopen(x);
        }
    }

    fn branch_vertex(&self) -> Vertex {
        *self
            .open
            .iter()
            .min_by_key(|&&v| (self.count[v], v))
            .expect("called with open vertices")
    }

    fn options(&self, v: Vertex) -> Vec<usize> {
        let mut opts: Vec<usize> = self.by_vertex[v].iter().copied().filter(|&c| self.active[c]).collect();
        opts.sort_by_key(|&c| (!self.is_hint[c], c));
        opts
    }

    fn solve(&mut self, budget: Duration) -> FactorOutcome {
        let start = Instant::now();
        let mut nodes: u64 = 0;
        let mut stack: Vec<Frame> = Vec::new();
        let mut descend = true;
        loop {
            if descend {
                if self.open.is_empty() {
                    let chosen = stack.iter().filter_map(|f| f.applied.map(|(_, c)| self.cycles[c].clone())).collect();
                    return FactorOutcome::Found(FactorCertificate::new(self.t, chosen));
                }
                let v = self.branch_vertex();
                stack.push(Frame {
                    options: self.options(v),
                    next: 0,
                    applied: None,
                });
            }
            nodes += 1;
            if nodes % 1024 == 0 && start.elapsed() > budget {
                return FactorOutcome::Unknown;
            }
            let Some(frame) = stack.last_mut() else {
                return FactorOutcome::None;
            };
            if let Some((mark, c)) = frame.applied.take() {
                self.undo(mark, c);
            }
            let frame = stack.last_mut().expect("still there");
            if frame.next < frame.options.len() {
                let c = frame.options[frame.next];
                frame.next += 1;
                frame.applied = Some((self.removed.len(), c));
                self.apply(c);
                descend = true;
            } else {
                stack.pop();
                descend = false;
                if stack.is_empty() {
                    return FactorOutcome::None;
                }
            }
        }
    }
}
