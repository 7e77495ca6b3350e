//! Exhaustive asynchronous transition graphs: a flat successor table over all
//! 2^n configurations, SCC condensation, attractors, fixed points,
//! unreachable configurations, reachability distances and the
//! one-big-component shape verdict.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::net::{AutomatonId, Configuration, Network};
use crate::planner::find_induced_badc;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AtgError {
    #[error("network size {n} exceeds the transition-graph limit {limit}")]
    TooLarge { n: usize, limit: usize },
}

pub const DEFAULT_LIMIT: usize = 24;

/// Complete asynchronous transition graph. `succ[c * n + k]` is the
/// configuration reached from `c` by updating automaton `k + 1`; stable
/// automata yield self-loops, so every node has out-degree n.
pub struct Atg {
    n: usize,
    succ: Vec<u32>,
}

/// Builds the full edge table. Construction fans out over disjoint
/// configuration ranges; the result does not depend on the worker count.
pub fn build_atg(net: &Network, limit: usize) -> Result<Atg, AtgError> {
    let n = net.size();
    if n > limit || n > 24 {
        return Err(AtgError::TooLarge { n, limit: limit.min(24) });
    }
    let nodes = 1usize << n;
    let mut succ = vec![0u32; nodes * n];
    succ.par_chunks_mut(n).enumerate().for_each(|(c, row)| {
        let x = Configuration::from_bits(c as u64, n);
        for k in 0..n {
            let i = AutomatonId::from_idx(k);
            row[k] = net.step(i, &x).index() as u32;
        }
    });
    Ok(Atg { n, succ })
}

impl Atg {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> u64 {
        1u64 << self.n
    }

    pub fn successor(&self, c: u64, i: AutomatonId) -> u64 {
        self.succ[c as usize * self.n + i.idx()] as u64
    }

    pub fn successors(&self, c: u64) -> &[u32] {
        &self.succ[c as usize * self.n..(c as usize + 1) * self.n]
    }

    pub fn config(&self, c: u64) -> Configuration {
        Configuration::from_bits(c, self.n)
    }

    pub fn is_fixed_point(&self, c: u64) -> bool {
        self.successors(c).iter().all(|&s| s as u64 == c)
    }

    pub fn fixed_points(&self) -> Vec<u64> {
        (0..self.node_count()).filter(|&c| self.is_fixed_point(c)).collect()
    }

    /// Configurations with no incoming arcs but self-loops.
    pub fn unreachables(&self) -> Vec<u64> {
        let mut has_in = vec![false; self.node_count() as usize];
        for c in 0..self.node_count() {
            for &s in self.successors(c) {
                if s as u64 != c {
                    has_in[s as usize] = true;
                }
            }
        }
        (0..self.node_count()).filter(|&c| !has_in[c as usize]).collect()
    }

    /// Length of the shortest asynchronous update sequence from `x` to `y`.
    pub fn bfs_distance(&self, x: u64, y: u64) -> Option<u64> {
        if x == y {
            return Some(0);
        }
        let nodes = self.node_count() as usize;
        let mut dist = vec![u32::MAX; nodes];
        dist[x as usize] = 0;
        let mut frontier = vec![x as usize];
        let mut next = Vec::new();
        let mut d = 0u32;
        while !frontier.is_empty() {
            d += 1;
            for &c in &frontier {
                for &s in self.successors(c as u64) {
                    let s = s as usize;
                    if dist[s] == u32::MAX {
                        dist[s] = d;
                        if s as u64 == y {
                            return Some(d as u64);
                        }
                        next.push(s);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
        None
    }

    /// Longest shortest-path between members, or None when some pair is not
    /// connected within the set.
    pub fn diameter_within(&self, members: &[u64]) -> Option<u64> {
        let set: BTreeSet<u64> = members.iter().copied().collect();
        let mut best = 0;
        for &src in members {
            let mut dist = vec![u32::MAX; self.node_count() as usize];
            dist[src as usize] = 0;
            let mut frontier = vec![src];
            let mut next = Vec::new();
            let mut d = 0u32;
            let mut seen = 1usize;
            while !frontier.is_empty() && seen < set.len() {
                d += 1;
                for &c in &frontier {
                    for &s in self.successors(c) {
                        let s = s as u64;
                        if dist[s as usize] == u32::MAX {
                            dist[s as usize] = d;
                            if set.contains(&s) {
                                seen += 1;
                                best = best.max(d as u64);
                            }
                            next.push(s);
                        }
                    }
                }
                std::mem::swap(&mut frontier, &mut next);
                next.clear();
            }
            if seen < set.len() {
                return None;
            }
        }
        Some(best)
    }
}

/// SCC partition of a transition graph plus the facts the shape analysis
/// needs: component sizes, terminal flags and the condensation arcs.
pub struct Condensation {
    pub scc_id: Vec<u32>,
    pub sizes: Vec<u64>,
    pub terminal: Vec<bool>,
    pub dag_arcs: BTreeSet<(u32, u32)>,
}

pub fn condense(atg: &Atg) -> Condensation {
    let nodes = atg.node_count() as usize;
    let sccs = crate::scc::tarjan(nodes, |c| {
        atg.successors(c as u64).iter().map(|&s| s as usize)
    });
    let mut scc_id = vec![0u32; nodes];
    let mut sizes = vec![0u64; sccs.len()];
    for (id, comp) in sccs.iter().enumerate() {
        sizes[id] = comp.len() as u64;
        for &c in comp {
            scc_id[c] = id as u32;
        }
    }
    let mut terminal = vec![true; sccs.len()];
    let mut dag_arcs = BTreeSet::new();
    for c in 0..nodes {
        let a = scc_id[c];
        for &s in atg.successors(c as u64) {
            let b = scc_id[s as usize];
            if a != b {
                terminal[a as usize] = false;
                dag_arcs.insert((a, b));
            }
        }
    }
    Condensation { scc_id, sizes, terminal, dag_arcs }
}

impl Condensation {
    /// Terminal SCC ids — the attractors. Always nonempty in a finite system.
    pub fn attractors(&self) -> Vec<u32> {
        (0..self.sizes.len() as u32).filter(|&id| self.terminal[id as usize]).collect()
    }

    /// A transient configuration is reversible iff it can be visited again,
    /// that is, iff its component has size greater than one.
    pub fn is_reversible_transient(&self, c: u64) -> bool {
        let id = self.scc_id[c as usize];
        !self.terminal[id as usize] && self.sizes[id as usize] > 1
    }
}

/// Result of the general-shape analysis: the transition graph of a
/// theorem-scope network decomposes into unreachable configurations, one big
/// component of reversible transients, and fixed points.
#[derive(Debug)]
pub struct ShapeReport {
    pub in_scope: bool,
    pub scope_reason: String,
    pub fixed_points: Vec<Configuration>,
    pub unreachables: Vec<Configuration>,
    pub big_scc_size: u64,
    pub verdict: bool,
}

/// Checks the one-big-component shape. Networks without a strongly connected
/// interaction graph or without an induced double cycle of size greater than
/// 3 report `in_scope = false`; the structural facts are returned either way.
pub fn check_theorem_shape(net: &Network, limit: usize) -> Result<ShapeReport, AtgError> {
    let atg = build_atg(net, limit)?;
    let cond = condense(&atg);
    let fixed: Vec<u64> = atg.fixed_points();
    let unreach: Vec<u64> = atg.unreachables();
    let fixed_set: BTreeSet<u64> = fixed.iter().copied().collect();
    let unreach_set: BTreeSet<u64> = unreach.iter().copied().collect();

    let rest: Vec<u64> = (0..atg.node_count())
        .filter(|c| !fixed_set.contains(c) && !unreach_set.contains(c))
        .collect();

    let mut verdict = !rest.is_empty();
    let mut big_scc_size = 0;
    if let Some(&r0) = rest.first() {
        let big = cond.scc_id[r0 as usize];
        big_scc_size = cond.sizes[big as usize];
        // Every remaining configuration sits in the single big component.
        verdict &= rest.iter().all(|&c| cond.scc_id[c as usize] == big);
        // Unreachable non-stable configurations step into it,
        verdict &= unreach
            .iter()
            .filter(|c| !fixed_set.contains(c))
            .all(|&u| atg.successors(u).iter().any(|&s| cond.scc_id[s as usize] == big));
        // and it steps onto every reachable fixed point.
        verdict &= fixed.iter().filter(|c| !unreach_set.contains(c)).all(|&s| {
            (0..atg.node_count()).any(|c| {
                cond.scc_id[c as usize] == big && c != s && atg.successors(c).contains(&(s as u32))
            })
        });
    }

    let (in_scope, scope_reason) = theorem_scope(net);
    Ok(ShapeReport {
        in_scope,
        scope_reason,
        fixed_points: fixed.into_iter().map(|c| atg.config(c)).collect(),
        unreachables: unreach.into_iter().map(|c| atg.config(c)).collect(),
        big_scc_size,
        verdict,
    })
}

fn theorem_scope(net: &Network) -> (bool, String) {
    if !net.strongly_connected() {
        return (false, "interaction graph is not strongly connected".into());
    }
    match find_induced_badc(net) {
        Some(b) => (true, format!("induced double cycle of size {}", b.size())),
        None => (false, "no induced double cycle of size greater than 3".into()),
    }
}

/// DOT rendering with one edge per (source, target) pair, labelled by the
/// update sets realising it, `{1}|{3}` style as in the figures.
pub fn to_dot(atg: &Atg) -> String {
    use std::fmt::Write;
    let mut out = String::from("digraph atg {\n  node [shape=box];\n");
    for c in 0..atg.node_count() {
        let mut by_target: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
        for (k, &s) in atg.successors(c).iter().enumerate() {
            by_target.entry(s as u64).or_default().push(k + 1);
        }
        for (t, labels) in by_target {
            let label =
                labels.iter().map(|k| format!("{{{k}}}")).collect::<Vec<_>>().join("|");
            writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\"];", atg.config(c), atg.config(t), label)
                .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn to_json(atg: &Atg, cond: &Condensation) -> serde_json::Value {
    let nodes: Vec<String> = (0..atg.node_count()).map(|c| atg.config(c).to_string()).collect();
    let mut edges = Vec::new();
    for c in 0..atg.node_count() {
        for (k, &s) in atg.successors(c).iter().enumerate() {
            edges.push(serde_json::json!({
                "from": atg.config(c).to_string(),
                "update": k + 1,
                "to": atg.config(s as u64).to_string(),
            }));
        }
    }
    let sccs: Vec<serde_json::Value> = (0..cond.sizes.len())
        .map(|id| {
            serde_json::json!({
                "id": id,
                "size": cond.sizes[id],
                "terminal": cond.terminal[id],
            })
        })
        .collect();
    serde_json::json!({
        "n": atg.n(),
        "nodes": nodes,
        "edges": edges,
        "sccs": sccs,
        "scc_of": (0..atg.node_count()).map(|c| cond.scc_id[c as usize]).collect::<Vec<_>>(),
        "fixed_points": atg.fixed_points().iter().map(|&c| atg.config(c).to_string()).collect::<Vec<_>>(),
        "unreachables": atg.unreachables().iter().map(|&c| atg.config(c).to_string()).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_badc, gen_flower, SignClass};

    fn idx(s: &str) -> u64 {
        Configuration::parse(s).unwrap().index()
    }

    #[test]
    fn badc_12_atg_matches_figure() {
        let (net, _) = gen_badc(1, 2, SignClass::Positive).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let edge = |c: &str, k: u32| atg.successor(idx(c), AutomatonId(k));
        assert_eq!(edge("00", 1), idx("00"));
        assert_eq!(edge("00", 2), idx("00"));
        assert_eq!(edge("01", 1), idx("11"));
        assert_eq!(edge("01", 2), idx("00"));
        assert_eq!(edge("10", 1), idx("10"));
        assert_eq!(edge("10", 2), idx("11"));
        assert_eq!(edge("11", 1), idx("01"));
        assert_eq!(edge("11", 2), idx("11"));
        assert_eq!(atg.unreachables(), vec![idx("10")]);
        assert_eq!(atg.fixed_points(), vec![idx("00")]);
    }

    #[test]
    fn out_degree_sums() {
        let (net, _) = gen_badc(2, 3, SignClass::Mixed).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let n = net.size() as u64;
        let total: u64 = (0..atg.node_count()).map(|c| atg.successors(c).len() as u64).sum();
        assert_eq!(total, n * atg.node_count());
    }

    #[test]
    fn size_limit_enforced() {
        let (net, _) = gen_badc(3, 3, SignClass::Positive).unwrap();
        assert!(matches!(build_atg(&net, 4), Err(AtgError::TooLarge { .. })));
    }

    #[test]
    fn condensation_of_badc_22() {
        let (net, _) = gen_badc(2, 2, SignClass::Positive).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let cond = condense(&atg);
        // Fixed point 000 is a singleton terminal component.
        let fp = cond.scc_id[idx("000") as usize] as usize;
        assert!(cond.terminal[fp]);
        assert_eq!(cond.sizes[fp], 1);
        // The source is the one unreachable configuration: the state where
        // every automaton disagrees with its rule (100 in this numbering;
        // 010 in the figure labeling with the center at id 2).
        assert_eq!(atg.unreachables(), vec![idx("100")]);
        assert_eq!(cond.attractors().len(), 1);
        // Remaining six configurations form the single big component.
        let big = cond.scc_id[idx("111") as usize] as usize;
        assert_eq!(cond.sizes[big], 6);
    }

    #[test]
    fn negative_flower_attractors() {
        // Petals (3,3,3): n = 7 is odd, so the reverse lands in the positive
        // class — two unreachable sources and one attractor of 2^7 - 2.
        let (net, _) = gen_flower(&[3, 3, 3], SignClass::Negative).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let cond = condense(&atg);
        assert!(atg.fixed_points().is_empty());
        assert_eq!(atg.unreachables().len(), 2);
        assert_eq!(cond.attractors().len(), 1);
        let biggest = *cond.sizes.iter().max().unwrap();
        assert_eq!(biggest, (1 << 7) - 2);

        // Petals (3,3,2): n = 6 keeps the reverse negative as well, and the
        // whole transition graph is one attractor of size 2^6.
        let (net, _) = gen_flower(&[3, 3, 2], SignClass::Negative).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let cond = condense(&atg);
        assert_eq!(cond.sizes.len(), 1);
        assert_eq!(cond.sizes[0], 1 << 6);
    }

    #[test]
    fn shape_of_positive_flower_33() {
        let (net, _) = gen_flower(&[3, 3], SignClass::Positive).unwrap();
        let report = check_theorem_shape(&net, DEFAULT_LIMIT).unwrap();
        assert!(report.in_scope);
        assert!(report.verdict);
        assert_eq!(report.fixed_points.len(), 1);
        assert_eq!(report.unreachables.len(), 1);
        assert_eq!(report.big_scc_size, (1 << 5) - 2);
    }

    #[test]
    fn badc_12_out_of_scope() {
        let (net, _) = gen_badc(1, 2, SignClass::Positive).unwrap();
        let report = check_theorem_shape(&net, DEFAULT_LIMIT).unwrap();
        assert!(!report.in_scope);
    }

    #[test]
    fn bfs_distances() {
        let (net, _) = gen_badc(1, 2, SignClass::Positive).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        assert_eq!(atg.bfs_distance(idx("01"), idx("01")), Some(0));
        assert_eq!(atg.bfs_distance(idx("01"), idx("00")), Some(1));
        assert_eq!(atg.bfs_distance(idx("00"), idx("01")), None);
    }

    #[test]
    fn bfs_distance_to_the_alternating_configuration() {
        // (5,4): from the single-1 configuration to the fully alternating
        // one. The oracle gives 23, above the triangular-sum count 16 of the
        // tightness argument.
        let (net, lab) = gen_badc(5, 4, SignClass::Positive).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let x = lab.config_from_cycle_vectors(&["10000", "1000"]).unwrap();
        let t = lab.config_from_cycle_vectors(&["10101", "1010"]).unwrap();
        for i in net.automata() {
            assert_eq!(net.is_stable(i, &t), i == lab.center());
        }
        assert_eq!(atg.bfs_distance(x.index(), t.index()), Some(23));
        assert!(23 >= 5 * 4 / 2 + 4 * 3 / 2);
    }

    #[test]
    fn reversible_transients() {
        let (net, _) = gen_badc(2, 2, SignClass::Positive).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let cond = condense(&atg);
        // The unreachable 100 can never be visited again; 111 sits in the
        // big component and can.
        assert!(!cond.is_reversible_transient(idx("100")));
        assert!(cond.is_reversible_transient(idx("111")));
    }
}
