//! Primal network simplex on the complete bipartite transport graph.
//!
//! Follows the LEMON design: strongly feasible spanning trees stored as a thread
//! list, artificial root arcs for the initial basis, block-search pivoting.
//! All arcs are uncapacitated, so the "upper" arc state never occurs.

use alloc::vec;
use alloc::vec::Vec;
// float math lives in std; without it the methods come from libm
#[allow(unused_imports)]
use num_traits::Float;

const NONE: usize = usize::MAX;
const DIR_UP: f64 = 1.0;
const DIR_DOWN: f64 = -1.0;
const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;

pub(crate) struct Solution {
    /// Row-major `n × m` flows.
    pub flow: Vec<f64>,
    /// Potentials of the `n` supply nodes followed by the `m` demand nodes.
    #[cfg_attr(not(test), allow(dead_code))]
    pub potentials: Vec<f64>,
    pub pivots: usize,
    pub optimal: bool,
}

pub(crate) struct NetworkSimplex {
    n: usize,
    m: usize,
    node_num: usize,
    search_arc_num: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    cost: Vec<f64>,
    flow: Vec<f64>,
    pi: Vec<f64>,
    state: Vec<i8>,

    parent: Vec<usize>,
    pred: Vec<usize>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pred_dir: Vec<f64>,
    dirty_revs: Vec<usize>,

    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,

    block_size: usize,
    next_arc: usize,
    tolerance: f64,
}

impl NetworkSimplex {
    /// `cost` is row-major `supply.len() × demand.len()` and must be finite.
    /// Supplies and demands are positive with equal totals.
    pub fn new(supply: &[f64], demand: &[f64], cost: &[f64]) -> Self {
        let n = supply.len();
        let m = demand.len();
        debug_assert_eq!(cost.len(), n * m);
        let node_num = n + m;
        let arc_num = n * m;
        let all_arc_num = arc_num + node_num;
        let root = node_num;

        let mut source = Vec::with_capacity(all_arc_num);
        let mut target = Vec::with_capacity(all_arc_num);
        for i in 0..n {
            for j in 0..m {
                source.push(i);
                target.push(n + j);
            }
        }
        // Costs are shifted to be nonnegative; the optimal plan is unchanged
        // because every feasible plan carries the same total mass.
        let shift = cost.iter().copied().fold(f64::INFINITY, f64::min);
        let mut arc_cost: Vec<f64> = cost.iter().map(|c| c - shift).collect();
        let max_cost = arc_cost.iter().copied().fold(0.0, f64::max);
        let art_cost = (max_cost + 1.0) * node_num as f64;

        let mut node_supply = Vec::with_capacity(node_num + 1);
        node_supply.extend_from_slice(supply);
        node_supply.extend(demand.iter().map(|d| -d));

        let mut flow = vec![0.0; all_arc_num];
        let mut pi = vec![0.0; node_num + 1];
        let mut state = vec![STATE_LOWER; all_arc_num];
        let mut parent = vec![NONE; node_num + 1];
        let mut pred = vec![NONE; node_num + 1];
        let mut thread = vec![0; node_num + 1];
        let mut rev_thread = vec![0; node_num + 1];
        let mut succ_num = vec![1; node_num + 1];
        let mut last_succ = vec![0; node_num + 1];
        let mut pred_dir = vec![DIR_UP; node_num + 1];

        thread[root] = 0;
        rev_thread[0] = root;
        succ_num[root] = node_num + 1;
        last_succ[root] = root - 1;

        for u in 0..node_num {
            let e = arc_num + u;
            parent[u] = root;
            pred[u] = e;
            thread[u] = u + 1;
            rev_thread[u + 1] = u;
            succ_num[u] = 1;
            last_succ[u] = u;
            state[e] = STATE_TREE;
            if node_supply[u] >= 0.0 {
                pred_dir[u] = DIR_UP;
                pi[u] = 0.0;
                source.push(u);
                target.push(root);
                flow[e] = node_supply[u];
                arc_cost.push(0.0);
            } else {
                pred_dir[u] = DIR_DOWN;
                pi[u] = art_cost;
                source.push(root);
                target.push(u);
                flow[e] = -node_supply[u];
                arc_cost.push(art_cost);
            }
        }

        let block_size = ((arc_num as f64).sqrt().ceil() as usize).max(10);
        Self {
            n,
            m,
            node_num,
            search_arc_num: arc_num,
            source,
            target,
            cost: arc_cost,
            flow,
            pi,
            state,
            parent,
            pred,
            thread,
            rev_thread,
            succ_num,
            last_succ,
            pred_dir,
            dirty_revs: Vec::new(),
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
            block_size,
            next_arc: 0,
            tolerance: 1e-14 * (max_cost + 1.0),
        }
    }

    pub fn run(mut self, max_pivots: usize) -> Solution {
        let mut pivots = 0;
        let mut optimal = false;
        while pivots < max_pivots {
            if !self.find_entering_arc() {
                optimal = true;
                break;
            }
            self.find_join_node();
            let bounded = self.find_leaving_arc();
            debug_assert!(bounded, "transport problems are bounded");
            if !bounded {
                break;
            }
            self.change_flow();
            self.update_tree_structure();
            self.update_potential();
            pivots += 1;
        }

        let arc_num = self.n * self.m;
        let flow = self.flow[..arc_num].iter().map(|&f| f.max(0.0)).collect();
        let potentials = self.pi[..self.node_num].to_vec();
        Solution {
            flow,
            potentials,
            pivots,
            optimal,
        }
    }

    #[inline]
    fn reduced_cost(&self, e: usize) -> f64 {
        f64::from(self.state[e]) * (self.cost[e] + self.pi[self.source[e]] - self.pi[self.target[e]])
    }

    fn find_entering_arc(&mut self) -> bool {
        let mut min = -self.tolerance;
        let mut found = false;
        let mut cnt = self.block_size;
        let mut e = self.next_arc;
        for _ in 0..self.search_arc_num {
            let c = self.reduced_cost(e);
            if c < min {
                min = c;
                self.in_arc = e;
                found = true;
            }
            e += 1;
            if e == self.search_arc_num {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if found {
                    self.next_arc = e;
                    return true;
                }
                cnt = self.block_size;
            }
        }
        if found {
            self.next_arc = e;
        }
        found
    }

    fn find_join_node(&mut self) {
        let mut u = self.source[self.in_arc];
        let mut v = self.target[self.in_arc];
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    fn find_leaving_arc(&mut self) -> bool {
        // entering arcs are always at their lower bound
        let first = self.source[self.in_arc];
        let second = self.target[self.in_arc];
        self.delta = f64::INFINITY;
        let mut result = 0;

        let mut u = first;
        while u != self.join {
            let d = if self.pred_dir[u] == DIR_DOWN {
                f64::INFINITY
            } else {
                self.flow[self.pred[u]]
            };
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            let d = if self.pred_dir[u] == DIR_UP {
                f64::INFINITY
            } else {
                self.flow[self.pred[u]]
            };
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }

        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0 && self.delta.is_finite()
    }

    fn change_flow(&mut self) {
        let val = self.delta;
        if val > 0.0 {
            self.flow[self.in_arc] += val;
            let mut u = self.source[self.in_arc];
            while u != self.join {
                self.flow[self.pred[u]] -= self.pred_dir[u] * val;
                u = self.parent[u];
            }
            let mut u = self.target[self.in_arc];
            while u != self.join {
                self.flow[self.pred[u]] += self.pred_dir[u] * val;
                u = self.parent[u];
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let leaving = self.pred[self.u_out];
        self.state[leaving] = STATE_LOWER;
        self.flow[leaving] = 0.0;
    }

    fn update_tree_structure(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let in_arc = self.in_arc;

        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source[in_arc] { DIR_UP } else { DIR_DOWN };

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };

            // Re-hang the stem nodes between u_in and u_out.
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for k in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[k];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0isize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc += self.succ_num[u] as isize - self.succ_num[p] as isize;
                self.succ_num[u] = tmp_sc as usize;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source[in_arc] { DIR_UP } else { DIR_DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && u != NONE && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && u != NONE && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let sigma = self.pi[self.v_in] - self.pi[self.u_in] - self.pred_dir[self.u_in] * self.cost[self.in_arc];
        let end = self.thread[self.last_succ[self.u_in]];
        let mut u = self.u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }
}
