//! Max-weight b-matching between links and RBs via min-cost flow.
//!
//! Solves the allocation problem without the per-link minimum-rate
//! constraint: each link takes at most `cap[i]` RBs, each RB at most one
//! link, and links flagged in `need` must get at least one. The objective
//! is lexicographic: first cover as many needy links as possible, then
//! maximize the total rate. When every needy link is covered the rate is
//! the exact optimum of the relaxed problem, which makes it an upper bound
//! for the full one.

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost {
    /// Minus the number of needy links covered.
    cover: i64,
    /// Minus the rate collected.
    rate: f64,
}

impl Cost {
    const ZERO: Cost = Cost {
        cover: 0,
        rate: 0.0,
    };

    fn add(self, o: Cost) -> Cost {
        Cost {
            cover: self.cover + o.cover,
            rate: self.rate + o.rate,
        }
    }

    fn neg(self) -> Cost {
        Cost {
            cover: -self.cover,
            rate: -self.rate,
        }
    }

    fn less(self, o: Cost, eps: f64) -> bool {
        self.cover < o.cover || (self.cover == o.cover && self.rate < o.rate - eps)
    }
}

struct Edge {
    to: usize,
    cap: u32,
    cost: Cost,
}

struct Graph {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: u32, cost: Cost) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: cost.neg(),
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }
}

pub(crate) struct Matching {
    /// Needy links that received at least one RB.
    pub covered: usize,
    pub rate: f64,
    /// Local RB indices picked for each link.
    pub picks: Vec<Vec<usize>>,
}

/// `usable(i, k)` says whether link `i` may take RB `k`; such pairs must
/// have a positive rate.
pub(crate) fn max_weight_b_matching(
    rate: &[Vec<f64>],
    num_rbs: usize,
    cap: &[usize],
    need: &[bool],
    usable: impl Fn(usize, usize) -> bool,
) -> Matching {
    let num_links = rate.len();
    let source = 0;
    let link_node = |i: usize| 1 + i;
    let rb_node = |k: usize| 1 + num_links + k;
    let sink = 1 + num_links + num_rbs;
    let mut g = Graph::new(sink + 1);

    let mut max_rate: f64 = 0.0;
    let mut pair_edges = Vec::new();
    for i in 0..num_links {
        let c = cap[i] as u32;
        if c == 0 {
            continue;
        }
        if need[i] {
            g.add(
                source,
                link_node(i),
                1,
                Cost {
                    cover: -1,
                    rate: 0.0,
                },
            );
            if c > 1 {
                g.add(source, link_node(i), c - 1, Cost::ZERO);
            }
        } else {
            g.add(source, link_node(i), c, Cost::ZERO);
        }
        for k in 0..num_rbs {
            if usable(i, k) {
                let r = rate[i][k];
                max_rate = max_rate.max(r);
                let e = g.add(link_node(i), rb_node(k), 1, Cost { cover: 0, rate: -r });
                pair_edges.push((i, k, e));
            }
        }
    }
    for k in 0..num_rbs {
        g.add(rb_node(k), sink, 1, Cost::ZERO);
    }

    let eps = 1e-12 * max_rate.max(1.0);
    let n = g.adj.len();
    let mut total = Cost::ZERO;
    loop {
        // Bellman-Ford with a FIFO queue; costs can be negative but the
        // residual graph never has a negative cycle.
        let mut dist: Vec<Option<Cost>> = vec![None; n];
        let mut prev_edge = vec![usize::MAX; n];
        let mut in_queue = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = Some(Cost::ZERO);
        queue.push_back(source);
        in_queue[source] = true;
        while let Some(u) = queue.pop_front() {
            in_queue[u] = false;
            let du = dist[u].expect("queued nodes are reached");
            for &e in &g.adj[u] {
                let edge = &g.edges[e];
                if edge.cap == 0 {
                    continue;
                }
                let nd = du.add(edge.cost);
                if dist[edge.to].is_none_or(|d| nd.less(d, eps)) {
                    dist[edge.to] = Some(nd);
                    prev_edge[edge.to] = e;
                    if !in_queue[edge.to] {
                        in_queue[edge.to] = true;
                        queue.push_back(edge.to);
                    }
                }
            }
        }
        let Some(d) = dist[sink] else { break };
        if !d.less(Cost::ZERO, eps) {
            break;
        }
        let mut v = sink;
        while v != source {
            let e = prev_edge[v];
            g.edges[e].cap -= 1;
            g.edges[e ^ 1].cap += 1;
            v = g.edges[e ^ 1].to;
        }
        total = total.add(d);
    }

    let mut picks = vec![Vec::new(); num_links];
    let mut rate_sum = 0.0;
    for (i, k, e) in pair_edges {
        if g.edges[e].cap == 0 {
            picks[i].push(k);
            rate_sum += rate[i][k];
        }
    }
    let covered = (0..num_links)
        .filter(|&i| need[i] && !picks[i].is_empty())
        .count();
    debug_assert_eq!(covered as i64, -total.cover);
    Matching {
        covered,
        rate: rate_sum,
        picks,
    }
}
