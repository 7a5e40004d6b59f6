//! Max-flow on integer capacities: Dinic for a full solve, plus incremental
//! BFS augmentation with an undo log so that many small capacity changes can
//! be probed against one base flow.

use std::collections::VecDeque;

pub(crate) const INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
pub(crate) struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    next: Vec<usize>,
    cap: Vec<i64>,
    flow: Vec<i64>,
    level: Vec<i32>,
    iter: Vec<usize>,
    undo: Vec<(usize, i64)>,
    logging: bool,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![NIL; nodes],
            to: Vec::new(),
            next: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
            level: vec![0; nodes],
            iter: vec![0; nodes],
            undo: Vec::new(),
            logging: false,
        }
    }

    /// Adds `u -> v` and its residual twin; returns the forward arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let id = self.to.len();
        for (from, dest, c) in [(u, v, cap), (v, u, 0)] {
            self.to.push(dest);
            self.cap.push(c);
            self.flow.push(0);
            self.next.push(self.head[from]);
            self.head[from] = self.to.len() - 1;
        }
        id
    }

    pub fn set_capacity(&mut self, arc: usize, cap: i64) {
        debug_assert!(self.flow[arc] <= cap);
        self.cap[arc] = cap;
    }

    fn residual(&self, arc: usize) -> i64 {
        self.cap[arc] - self.flow[arc]
    }

    fn push(&mut self, arc: usize, amount: i64) {
        if self.logging {
            self.undo.push((arc, self.flow[arc]));
            self.undo.push((arc ^ 1, self.flow[arc ^ 1]));
        }
        self.flow[arc] += amount;
        self.flow[arc ^ 1] -= amount;
    }

    fn bfs_levels(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let mut a = self.head[u];
            while a != NIL {
                let v = self.to[a];
                if self.level[v] < 0 && self.residual(a) > 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
                a = self.next[a];
            }
        }
        self.level[t] >= 0
    }

    /// Iterative blocking flow on the current level graph.
    fn blocking_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let bottleneck = path
                    .iter()
                    .map(|&a| self.residual(a))
                    .min()
                    .unwrap_or(0);
                for i in 0..path.len() {
                    self.push(path[i], bottleneck);
                }
                total += bottleneck;
                let cut = path
                    .iter()
                    .position(|&a| self.residual(a) == 0)
                    .unwrap_or(0);
                path.truncate(cut);
                u = match path.last() {
                    Some(&a) => self.to[a],
                    None => s,
                };
                continue;
            }
            let mut advanced = false;
            while self.iter[u] != NIL {
                let a = self.iter[u];
                let v = self.to[a];
                if self.residual(a) > 0 && self.level[v] == self.level[u] + 1 {
                    path.push(a);
                    u = v;
                    advanced = true;
                    break;
                }
                self.iter[u] = self.next[a];
            }
            if !advanced {
                if u == s {
                    return total;
                }
                self.level[u] = -1;
                let a = path.pop().expect("non-source node has an incoming path arc");
                u = self.to[a ^ 1];
                self.iter[u] = self.next[a];
            }
        }
    }

    /// Dinic from the current flow; returns the additional flow pushed.
    pub fn dinic(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs_levels(s, t) {
            self.iter.copy_from_slice(&self.head);
            total += self.blocking_flow(s, t);
        }
        total
    }

    /// Shortest-path augmentation from the current flow. Cheap when the
    /// residual region reachable from `s` is small.
    pub fn augment(&mut self, s: usize, t: usize) -> i64 {
        let n = self.head.len();
        let mut total = 0;
        let mut parent = vec![NIL; n];
        let mut touched: Vec<usize> = Vec::new();
        loop {
            for &v in &touched {
                parent[v] = NIL;
            }
            touched.clear();
            let mut queue = VecDeque::new();
            queue.push_back(s);
            parent[s] = usize::MAX - 1;
            touched.push(s);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                let mut a = self.head[u];
                while a != NIL {
                    let v = self.to[a];
                    if parent[v] == NIL && self.residual(a) > 0 {
                        parent[v] = a;
                        touched.push(v);
                        if v == t {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                    a = self.next[a];
                }
            }
            if !found {
                for &v in &touched {
                    parent[v] = NIL;
                }
                return total;
            }
            let mut bottleneck = INF;
            let mut v = t;
            while v != s {
                let a = parent[v];
                bottleneck = bottleneck.min(self.residual(a));
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = parent[v];
                self.push(a, bottleneck);
                v = self.to[a ^ 1];
            }
            total += bottleneck;
        }
    }

    /// Nodes reachable from `s` in the residual graph (the source side of a
    /// minimum cut once the flow is maximum).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            let mut a = self.head[u];
            while a != NIL {
                let v = self.to[a];
                if !seen[v] && self.residual(a) > 0 {
                    seen[v] = true;
                    stack.push(v);
                }
                a = self.next[a];
            }
        }
        seen
    }

    pub fn begin_trial(&mut self) {
        self.undo.clear();
        self.logging = true;
    }

    /// Restores every flow value changed since [`begin_trial`].
    pub fn rollback(&mut self) {
        while let Some((arc, old)) = self.undo.pop() {
            self.flow[arc] = old;
        }
        self.logging = false;
    }
}
