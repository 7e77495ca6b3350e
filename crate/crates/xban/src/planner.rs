//! Constructive synthesis of asynchronous update sequences: the double-cycle
//! routine through the alternating configuration, destabilisation along
//! shortest paths, and the general procedure that drives a whole strongly
//! connected network by using an induced double cycle as state generator.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::net::{AutomatonId, Configuration, Network};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("network is not a double cycle: {0}")]
    NotADoubleCycle(String),
    #[error("start configuration is stable")]
    StartStable,
    #[error("target configuration is unreachable")]
    TargetUnreachable,
    #[error("automaton {0} is stable in the start configuration")]
    SeedStable(u32),
    #[error("no path from {from} to {to} in the interaction graph")]
    NoPath { from: u32, to: u32 },
    #[error("network is not strongly connected")]
    NotStronglyConnected,
    #[error("no induced double cycle of size greater than 3")]
    NoInducedBadc,
    #[error("configuration is not unreachable")]
    NotUnreachable,
    #[error("configuration has {got} bits, network has size {want}")]
    Width { got: usize, want: usize },
    #[error("internal planner defect: {0}")]
    Defect(String),
}

fn check_width(net: &Network, x: &Configuration) -> Result<(), PlanError> {
    if x.len() != net.size() {
        return Err(PlanError::Width { got: x.len(), want: net.size() });
    }
    Ok(())
}

fn defect<T>(msg: impl Into<String>) -> Result<T, PlanError> {
    Err(PlanError::Defect(msg.into()))
}

/// A finite sequence of single-automaton updates from `start`, intended to
/// end at `target`. `expected` holds the planner's simulated trace
/// (`steps.len() + 1` configurations) when the plan was machine-generated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdatePlan {
    pub start: Configuration,
    pub target: Configuration,
    pub steps: Vec<AutomatonId>,
    pub expected: Vec<Configuration>,
}

impl UpdatePlan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Replay outcome: `ok` iff the replay ends at the plan's target.
/// `divergence` is the first trace index where the replay departs from the
/// plan's recorded expectation, when one was recorded.
#[derive(Debug)]
pub struct VerifyReport {
    pub ok: bool,
    pub trace: Vec<Configuration>,
    pub divergence: Option<usize>,
}

pub fn verify_plan(net: &Network, plan: &UpdatePlan) -> VerifyReport {
    let mut trace = Vec::with_capacity(plan.steps.len() + 1);
    let mut x = plan.start;
    trace.push(x);
    for &i in &plan.steps {
        x = net.step(i, &x);
        trace.push(x);
    }
    let ok = x == plan.target;
    let divergence = if plan.expected.is_empty() {
        None
    } else {
        trace.iter().zip(&plan.expected).position(|(a, b)| a != b)
    };
    VerifyReport { ok, trace, divergence }
}

/// An induced double cycle: two cycles sharing exactly the center, with no
/// other arcs among their automata. Cycles are listed center-first in
/// position order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedBadc {
    pub cycle1: Vec<AutomatonId>,
    pub cycle2: Vec<AutomatonId>,
    pub center: AutomatonId,
}

impl InducedBadc {
    pub fn size(&self) -> usize {
        self.cycle1.len() + self.cycle2.len() - 1
    }

    pub fn members(&self) -> BTreeSet<AutomatonId> {
        self.cycle1.iter().chain(self.cycle2.iter()).copied().collect()
    }
}

/// Searches for an induced double cycle of size at least 4 with one cycle of
/// length at least 3, preferring the smallest total size. Cycle enumeration
/// is capped, which is ample for the sparse cactus-like corpus.
pub fn find_induced_badc(net: &Network) -> Option<InducedBadc> {
    let cycles = crate::families::simple_cycles(net, 20_000);
    let arc_set: BTreeSet<(AutomatonId, AutomatonId)> = net.arcs().into_iter().collect();
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for a in 0..cycles.len() {
        for b in a + 1..cycles.len() {
            candidates.push((a, b));
        }
    }
    candidates.sort_by_key(|&(a, b)| {
        (cycles[a].len() + cycles[b].len(), cycles[a].clone(), cycles[b].clone())
    });
    for (a, b) in candidates {
        let (ca, cb) = (&cycles[a], &cycles[b]);
        let size = ca.len() + cb.len() - 1;
        if size < 4 || ca.len().max(cb.len()) < 3 {
            continue;
        }
        let sa: BTreeSet<_> = ca.iter().copied().collect();
        let shared: Vec<_> = cb.iter().filter(|x| sa.contains(x)).copied().collect();
        if shared.len() != 1 {
            continue;
        }
        let center = shared[0];
        if !induced(&arc_set, ca, cb) {
            continue;
        }
        let c1 = rotate_to(ca, center);
        let c2 = rotate_to(cb, center);
        return Some(InducedBadc { cycle1: c1, cycle2: c2, center });
    }
    None
}

fn rotate_to(cycle: &[AutomatonId], start: AutomatonId) -> Vec<AutomatonId> {
    let pos = cycle.iter().position(|&a| a == start).unwrap();
    let mut out = Vec::with_capacity(cycle.len());
    out.extend_from_slice(&cycle[pos..]);
    out.extend_from_slice(&cycle[..pos]);
    out
}

/// No arcs among the union other than the two cycles' own arcs.
fn induced(
    arcs: &BTreeSet<(AutomatonId, AutomatonId)>,
    ca: &[AutomatonId],
    cb: &[AutomatonId],
) -> bool {
    let mut allowed = BTreeSet::new();
    for cyc in [ca, cb] {
        let n = cyc.len();
        for j in 0..n {
            allowed.insert((cyc[j], cyc[(j + 1) % n]));
        }
    }
    let union: BTreeSet<_> = ca.iter().chain(cb.iter()).copied().collect();
    for &u in &union {
        for &v in &union {
            if arcs.contains(&(u, v)) && !allowed.contains(&(u, v)) {
                return false;
            }
        }
    }
    true
}

/// Positional view of a double cycle: both cycles listed center-first.
/// `c1` is the planning cycle and is kept at length >= 3 whenever possible.
#[derive(Clone, Debug)]
struct BadcView {
    c1: Vec<AutomatonId>,
    c2: Vec<AutomatonId>,
}

impl BadcView {
    fn center(&self) -> AutomatonId {
        self.c1[0]
    }

    fn n1(&self) -> usize {
        self.c1.len()
    }

    fn n2(&self) -> usize {
        self.c2.len()
    }

    /// Predecessor of the center inside cycle k (the cycle's last automaton).
    fn top(&self, k: usize) -> AutomatonId {
        let c = if k == 1 { &self.c1 } else { &self.c2 };
        *c.last().unwrap()
    }

    fn oriented(mut self) -> Self {
        if self.c1.len() < self.c2.len() {
            std::mem::swap(&mut self.c1, &mut self.c2);
        }
        self
    }

    fn position_of(&self, i: AutomatonId) -> Option<(usize, usize)> {
        if let Some(p) = self.c1.iter().position(|&a| a == i) {
            if p > 0 {
                return Some((1, p + 1));
            }
        }
        if let Some(p) = self.c2.iter().position(|&a| a == i) {
            if p > 0 {
                return Some((2, p + 1));
            }
        }
        None
    }
}

/// Recognises a standalone double cycle and returns its positional view.
fn detect_badc_view(net: &Network) -> Result<BadcView, PlanError> {
    let centers: Vec<AutomatonId> =
        net.automata().filter(|&i| net.rule(i).literals().len() == 2).collect();
    if centers.len() != 1 {
        return Err(PlanError::NotADoubleCycle(format!(
            "{} automata with two literals",
            centers.len()
        )));
    }
    let center = centers[0];
    for i in net.automata() {
        if i != center && net.rule(i).literals().len() != 1 {
            return Err(PlanError::NotADoubleCycle(format!("automaton {i} is not on a nude arc")));
        }
    }
    let lits = net.rule(center).literals();
    let mut cycles = Vec::new();
    for lit in lits {
        let mut seq = Vec::new();
        let mut cur = lit.source;
        let mut guard = 0;
        while cur != center {
            seq.push(cur);
            cur = net.rule(cur).literals()[0].source;
            guard += 1;
            if guard > net.size() {
                return Err(PlanError::NotADoubleCycle(format!(
                    "walk from {} does not return to the center",
                    lit.source
                )));
            }
        }
        seq.push(center);
        seq.reverse();
        cycles.push(seq);
    }
    let view = BadcView { c1: cycles[0].clone(), c2: cycles[1].clone() };
    let mut seen: BTreeSet<AutomatonId> = BTreeSet::new();
    seen.extend(&view.c1);
    let overlap: Vec<_> = view.c2.iter().filter(|a| seen.contains(a)).collect();
    if overlap.len() != 1 {
        return Err(PlanError::NotADoubleCycle("cycles share more than the center".into()));
    }
    seen.extend(&view.c2);
    if seen.len() != net.size() {
        return Err(PlanError::NotADoubleCycle("cycles do not cover the network".into()));
    }
    Ok(view)
}

/// Flip set conjugating an arbitrary-sign double cycle to the all-positive
/// one. Exists for every sign assignment: non-center rules force the flips
/// along each cycle relative to the center's, and the free center bit fixes
/// the center rule's parity.
fn positive_flip_set(net: &Network, view: &BadcView) -> BTreeSet<AutomatonId> {
    let o = view.center();
    for center_bit in [false, true] {
        let mut s: BTreeMap<AutomatonId, bool> = BTreeMap::new();
        s.insert(o, center_bit);
        for cyc in [&view.c1, &view.c2] {
            for w in 1..cyc.len() {
                let me = cyc[w];
                let pred = cyc[w - 1];
                let flip = net.rule(me).parity() ^ s[&pred];
                s.insert(me, flip);
            }
        }
        let set: BTreeSet<AutomatonId> =
            s.iter().filter(|(_, &v)| v).map(|(&k, _)| k).collect();
        if !net.flip(&set).rule(o).parity() {
            return set;
        }
    }
    unreachable!("one of the two center choices always works");
}

/// Unique configuration with the prescribed stability bits (`true` = stable);
/// unspecified automata are stable. Works for any sign assignment.
fn solve_stability_pattern(
    net: &Network,
    view: &BadcView,
    pattern: &BTreeMap<AutomatonId, bool>,
) -> Configuration {
    let o = view.center();
    let want = |i: AutomatonId| -> bool { *pattern.get(&i).unwrap_or(&true) };
    // Along each cycle, u_i = u_pred ^ parity_i ^ (unstable_i), so each value
    // is u_o xor an accumulated offset.
    let mut offset: BTreeMap<AutomatonId, bool> = BTreeMap::new();
    offset.insert(o, false);
    for cyc in [&view.c1, &view.c2] {
        for w in 1..cyc.len() {
            let me = cyc[w];
            let acc = offset[&cyc[w - 1]] ^ net.rule(me).parity() ^ !want(me);
            offset.insert(me, acc);
        }
    }
    let self_loop = view.n1() == 1 || view.n2() == 1;
    let p_o = net.rule(o).parity();
    let u_o = if self_loop {
        // f_o = u_o ^ u_top ^ p_o, so stability of o fixes u_top directly.
        let top = if view.n1() == 1 { view.top(2) } else { view.top(1) };
        !want(o) ^ p_o ^ offset[&top]
    } else {
        !want(o) ^ p_o ^ offset[&view.top(1)] ^ offset[&view.top(2)]
    };
    let mut cfg = Configuration::zero(net.size());
    for (&i, &off) in &offset {
        cfg = cfg.with(i, u_o ^ off);
    }
    cfg
}

/// Simulation cursor used while emitting a plan.
struct Sim<'a> {
    net: &'a Network,
    x: Configuration,
    steps: Vec<AutomatonId>,
    trace: Vec<Configuration>,
}

impl<'a> Sim<'a> {
    fn new(net: &'a Network, x: Configuration) -> Self {
        Sim { net, x, steps: Vec::new(), trace: vec![x] }
    }

    fn update(&mut self, i: AutomatonId) {
        self.x = self.net.step(i, &self.x);
        self.steps.push(i);
        self.trace.push(self.x);
    }

    fn unstable(&self, i: AutomatonId) -> bool {
        !self.net.is_stable(i, &self.x)
    }
}

/// The unique configuration of a positive double cycle where the center is
/// stable and every other automaton disagrees with its rule; for a cycle-1
/// self-loop this is instead the all-unstable configuration (the center
/// stays unstable there and flips at will while the cycle top holds 1).
fn alternating_config(view: &BadcView, n: usize) -> Configuration {
    let o = view.center();
    let (n1, n2) = (view.n1(), view.n2());
    let o_val = if n2 == 1 {
        n1 % 2 == 1
    } else {
        (n1 % 2 == 0) ^ (n2 % 2 == 0)
    };
    let mut cfg = Configuration::zero(n).with(o, o_val);
    for cyc in [&view.c1, &view.c2] {
        for (w, &a) in cyc.iter().enumerate().skip(1) {
            cfg = cfg.with(a, o_val ^ (w % 2 == 1));
        }
    }
    cfg
}

/// Phase 1 of the double-cycle routine on a positive network: reach the
/// alternating waypoint. Requires `c1` of length >= 3 and an unstable start.
fn badc_reach_waypoint(sim: &mut Sim<'_>, view: &BadcView) -> Result<(), PlanError> {
    let o = view.center();
    let (n1, n2) = (view.n1(), view.n2());
    let top1 = view.top(1);
    let waypoint = alternating_config(view, sim.net.size());
    if sim.x == waypoint {
        return Ok(());
    }

    // (a) Set the top of cycle 1 to 1 and the top of cycle 2 to 0, by
    // propagating the 1 closest to top1 along its directed path.
    if !sim.x.get(top1) {
        let mut best: Option<(usize, AutomatonId, Vec<AutomatonId>)> = None;
        for (dist, src, path) in badc_paths_to_top1(view) {
            if sim.x.get(src) {
                let better = match &best {
                    None => true,
                    Some((d, s, _)) => dist < *d || (dist == *d && src.0 < s.0),
                };
                if better {
                    best = Some((dist, src, path));
                }
            }
        }
        let (_, _, path) = match best {
            Some(b) => b,
            None => return defect("no automaton in state 1 in an unstable positive double cycle"),
        };
        for a in path {
            sim.update(a);
        }
    }
    if n2 >= 2 {
        let top2 = view.top(2);
        if sim.x.get(top2) {
            sim.update(o);
            for &a in &view.c2[1..] {
                sim.update(a);
            }
        }
    } else if sim.x.get(o) {
        sim.update(o);
    }
    if !sim.x.get(top1) {
        return defect("cycle-1 top not set after phase (a)");
    }

    // (b) Peel cycle 1 into the alternating pattern anchored at its top.
    for j in (2..=n1).rev() {
        for &a in &view.c1[..j] {
            sim.update(a);
        }
        for &a in &view.c2[1..] {
            sim.update(a);
        }
    }
    // (c) Same for cycle 2, shifting cycle 1 to keep it alternating.
    for j in (2..=n2.saturating_sub(1)).rev() {
        for &a in &view.c2[..j] {
            sim.update(a);
        }
        for w in (1..n1).rev() {
            sim.update(view.c1[w]);
        }
    }
    // A single center update completes the alternation of both cycles.
    sim.update(o);

    if sim.x != waypoint {
        return defect(format!("waypoint mismatch: at {}, wanted {}", sim.x, waypoint));
    }
    Ok(())
}

/// Directed paths ending at the top of cycle 1, one per possible source, as
/// (distance, source, update sequence excluding the source).
fn badc_paths_to_top1(view: &BadcView) -> Vec<(usize, AutomatonId, Vec<AutomatonId>)> {
    let n1 = view.n1();
    let mut out = Vec::new();
    // Sources inside cycle 1 (positions 1..n1), including the center.
    for p in 0..n1 {
        let path: Vec<AutomatonId> = view.c1[p + 1..].to_vec();
        out.push((n1 - 1 - p, view.c1[p], path));
    }
    // Sources inside cycle 2 route through the center.
    for p in 1..view.n2() {
        let mut path: Vec<AutomatonId> = view.c2[p + 1..].to_vec();
        path.push(view.center());
        path.extend_from_slice(&view.c1[1..]);
        out.push((view.n2() - p + n1 - 1, view.c2[p], path));
    }
    out
}

/// Phase 2: descend from the alternating waypoint to `target`, which must
/// not be unreachable.
fn badc_descend(
    sim: &mut Sim<'_>,
    view: &BadcView,
    target: &Configuration,
) -> Result<(), PlanError> {
    let o = view.center();
    let n2 = view.n2();
    let net = sim.net;
    let anchored = move |i: AutomatonId| net.eval_local(i, &target.negate_one(i)) == target.get(i);

    let sweep = |sim: &mut Sim<'_>, cyc: &[AutomatonId], skip: Option<AutomatonId>| {
        for w in (1..cyc.len()).rev() {
            let a = cyc[w];
            if Some(a) != skip && sim.x.get(a) != target.get(a) {
                sim.update(a);
            }
        }
    };

    if n2 >= 2 {
        if target.get(o) == sim.x.get(o) {
            sweep(sim, &view.c1, None);
            sweep(sim, &view.c2, None);
        } else if anchored(o) {
            sweep(sim, &view.c1, None);
            sweep(sim, &view.c2, None);
            sim.update(o);
        } else {
            let star = first_anchor(view, &anchored)?;
            let (k, j) = view.position_of(star).expect("anchor is a cycle automaton");
            let (own, other) = if k == 1 { (&view.c1, &view.c2) } else { (&view.c2, &view.c1) };
            for w in (1..j - 1).rev() {
                sim.update(own[w]);
            }
            for w in (1..other.len()).rev() {
                sim.update(other[w]);
            }
            sim.update(o);
            sweep(sim, &view.c1, Some(star));
            sweep(sim, &view.c2, Some(star));
            if sim.x.get(star) != target.get(star) {
                sim.update(star);
            }
        }
    } else {
        // Cycle-2 self-loop: the waypoint is the all-unstable configuration
        // and the center flips whenever the cycle-1 top holds 1.
        if anchored(o) {
            sweep(sim, &view.c1, None);
            if sim.x.get(o) != target.get(o) {
                sim.update(o);
            }
        } else {
            let star = first_anchor(view, &anchored)?;
            let (_, j) = view.position_of(star).expect("anchor on cycle 1");
            if target.get(o) != sim.x.get(o) {
                for w in (1..j - 1).rev() {
                    sim.update(view.c1[w]);
                }
                sim.update(o);
            }
            sweep(sim, &view.c1, Some(star));
            if sim.x.get(star) != target.get(star) {
                sim.update(star);
            }
        }
    }
    if sim.x != *target {
        return defect(format!("descent ended at {}, wanted {}", sim.x, target));
    }
    Ok(())
}

fn first_anchor(
    view: &BadcView,
    anchored: &dyn Fn(AutomatonId) -> bool,
) -> Result<AutomatonId, PlanError> {
    let o = view.center();
    let mut members: Vec<AutomatonId> =
        view.c1.iter().chain(view.c2.iter()).copied().filter(|&a| a != o).collect();
    members.sort();
    members.into_iter().find(|&a| anchored(a)).ok_or(PlanError::TargetUnreachable)
}

/// Core double-cycle planning: emits steps from `x` to `target` on an
/// arbitrary-sign double cycle described by `view`. Figure-sized instances
/// (both cycles of length <= 2) go through breadth-first search instead of
/// the algorithm, matching their explicit treatment.
fn plan_badc_steps(
    net: &Network,
    view: &BadcView,
    x: &Configuration,
    target: &Configuration,
) -> Result<(Vec<AutomatonId>, Vec<Configuration>), PlanError> {
    if net.is_fixed_point(x) {
        return Err(PlanError::StartStable);
    }
    if net.reverse().is_fixed_point(target) {
        return Err(PlanError::TargetUnreachable);
    }
    if x == target {
        return Ok((Vec::new(), vec![*x]));
    }
    let view = view.clone().oriented();
    if view.n1() <= 2 {
        return bfs_plan(net, x, target);
    }
    // Work on the positive conjugate; the step sequence transfers verbatim
    // because the conjugating bijection is the identity on automata.
    let flips = positive_flip_set(net, &view);
    let pos = net.flip(&flips);
    let mut sim = Sim::new(&pos, x.negate_set(&flips));
    let pos_target = target.negate_set(&flips);
    badc_reach_waypoint(&mut sim, &view)?;
    badc_descend(&mut sim, &view, &pos_target)?;
    // Replay on the original network for the recorded trace.
    let mut trace = Vec::with_capacity(sim.steps.len() + 1);
    let mut cur = *x;
    trace.push(cur);
    for &i in &sim.steps {
        cur = net.step(i, &cur);
        trace.push(cur);
    }
    if cur != *target {
        return defect("conjugated plan does not replay onto the target");
    }
    Ok((sim.steps, trace))
}

/// Shortest-plan fallback over the explicit transition graph; only used for
/// networks small enough that this is trivial.
fn bfs_plan(
    net: &Network,
    x: &Configuration,
    target: &Configuration,
) -> Result<(Vec<AutomatonId>, Vec<Configuration>), PlanError> {
    let n = net.size();
    let nodes = 1usize << n;
    let mut parent: Vec<Option<(u64, AutomatonId)>> = vec![None; nodes];
    let mut queue = VecDeque::new();
    queue.push_back(x.index());
    parent[x.index() as usize] = Some((x.index(), AutomatonId(0)));
    while let Some(c) = queue.pop_front() {
        if c == target.index() {
            break;
        }
        let cfg = Configuration::from_bits(c, n);
        for i in net.automata() {
            let s = net.step(i, &cfg).index();
            if parent[s as usize].is_none() {
                parent[s as usize] = Some((c, i));
                queue.push_back(s);
            }
        }
    }
    if parent[target.index() as usize].is_none() {
        return Err(PlanError::TargetUnreachable);
    }
    let mut steps = Vec::new();
    let mut cur = target.index();
    while cur != x.index() {
        let (prev, i) = parent[cur as usize].unwrap();
        steps.push(i);
        cur = prev;
    }
    steps.reverse();
    let mut trace = vec![*x];
    let mut c = *x;
    for &i in &steps {
        c = net.step(i, &c);
        trace.push(c);
    }
    Ok((steps, trace))
}

/// Plans an update sequence on a standalone double cycle from an unstable
/// `x` to a non-unreachable `target`, in O(n^2) updates.
pub fn plan_badc(
    net: &Network,
    x: &Configuration,
    target: &Configuration,
) -> Result<UpdatePlan, PlanError> {
    check_width(net, x)?;
    check_width(net, target)?;
    let view = detect_badc_view(net)?;
    let (steps, expected) = plan_badc_steps(net, &view, x, target)?;
    Ok(UpdatePlan { start: *x, target: *target, steps, expected })
}

/// Shortest interaction-graph path from `from` to any automaton satisfying
/// `goal`, lowest-id tie-breaking. The path includes both endpoints.
fn shortest_path_to(
    net: &Network,
    from: AutomatonId,
    goal: &dyn Fn(AutomatonId) -> bool,
) -> Option<Vec<AutomatonId>> {
    let n = net.size();
    let mut parent: Vec<Option<AutomatonId>> = vec![None; n];
    let mut dist: Vec<Option<u32>> = vec![None; n];
    dist[from.idx()] = Some(0);
    let mut frontier = vec![from];
    if goal(from) {
        return Some(vec![from]);
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for v in net.out_neighbors(u) {
                if dist[v.idx()].is_none() {
                    dist[v.idx()] = Some(dist[u.idx()].unwrap() + 1);
                    parent[v.idx()] = Some(u);
                    next.push(v);
                }
            }
        }
        next.sort();
        for &v in &next {
            if goal(v) {
                let mut path = vec![v];
                let mut cur = v;
                while let Some(p) = parent[cur.idx()] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
        }
        frontier = next;
    }
    None
}

/// Updates along `path[l..path.len()-1]` where `l` is the last unstable
/// automaton on the path, leaving the final automaton unstable. Every update
/// flips its automaton.
fn influence_walk(sim: &mut Sim<'_>, path: &[AutomatonId]) -> Result<(), PlanError> {
    let k = path.len() - 1;
    let l = match last_unstable(sim, path) {
        Some(l) => l,
        None => return defect("no unstable automaton on the influence path"),
    };
    for t in l..k {
        if !sim.unstable(path[t]) {
            return defect(format!("walk update on stable automaton {}", path[t]));
        }
        sim.update(path[t]);
    }
    if !sim.unstable(path[k]) {
        return defect("influence walk failed to destabilise its target");
    }
    Ok(())
}

fn last_unstable(sim: &Sim<'_>, path: &[AutomatonId]) -> Option<usize> {
    (0..path.len()).rev().find(|&t| sim.unstable(path[t]))
}

/// Reaches a configuration where `j` is unstable, following the shortest
/// path from the unstable automaton `i`. Returns the steps and the resulting
/// configuration.
pub fn plan_destabilize(
    net: &Network,
    x: &Configuration,
    i: AutomatonId,
    j: AutomatonId,
) -> Result<(Vec<AutomatonId>, Configuration), PlanError> {
    check_width(net, x)?;
    if net.is_stable(i, x) {
        return Err(PlanError::SeedStable(i.0));
    }
    let path = shortest_path_to(net, i, &|a| a == j)
        .ok_or(PlanError::NoPath { from: i.0, to: j.0 })?;
    let mut sim = Sim::new(net, *x);
    influence_walk(&mut sim, &path)?;
    Ok((sim.steps, sim.x))
}

/// Builds the unreachable-escape witness for a double cycle: a configuration
/// `hat` that is not unreachable together with the update set `w` (the full
/// planning cycle of length >= 2, center included) whose synchronous
/// application lands exactly on the unreachable `x`.
pub fn synchronous_unreachable_witness(
    net: &Network,
    x: &Configuration,
) -> Result<(Configuration, BTreeSet<AutomatonId>), PlanError> {
    check_width(net, x)?;
    let view = detect_badc_view(net)?;
    if !net.reverse().is_fixed_point(x) {
        return Err(PlanError::NotUnreachable);
    }
    let cycle = if view.n1() >= 2 { &view.c1 } else { &view.c2 };
    let w: BTreeSet<AutomatonId> = cycle.iter().copied().collect();
    let hat = x.negate_set(&w);
    if net.apply_update(&w, &hat) != *x {
        return defect("synchronous witness does not land on the unreachable configuration");
    }
    if net.reverse().is_fixed_point(&hat) {
        return defect("synchronous witness is itself unreachable");
    }
    Ok((hat, w))
}

// ---------------------------------------------------------------------------
// General planning
// ---------------------------------------------------------------------------

/// A frozen view of an induced double cycle: the subnetwork over its members
/// with every external literal folded into the rule parities at the current
/// outside values.
struct FrozenBadc {
    net: Network,
    view: BadcView,
    members: Vec<AutomatonId>,
}

impl FrozenBadc {
    fn build(net: &Network, badc: &InducedBadc, x: &Configuration) -> Self {
        let members: Vec<AutomatonId> = badc.members().into_iter().collect();
        let local = |g: AutomatonId| {
            AutomatonId(members.binary_search(&g).expect("member id") as u32 + 1)
        };
        let mut rules = Vec::with_capacity(members.len());
        for &b in &members {
            let mut lits = Vec::new();
            let mut external = false;
            for lit in net.rule(b).literals() {
                if members.binary_search(&lit.source).is_ok() {
                    lits.push(crate::net::SignedLiteral { source: local(lit.source), negated: lit.negated });
                } else {
                    external ^= x.get(lit.source) ^ lit.negated;
                }
            }
            if external {
                lits[0].negated = !lits[0].negated;
            }
            rules.push(crate::net::LocalRule::new(lits).expect("frozen rule valid"));
        }
        let frozen = Network::new(rules).expect("frozen net valid");
        let view = BadcView {
            c1: badc.cycle1.iter().map(|&g| local(g)).collect(),
            c2: badc.cycle2.iter().map(|&g| local(g)).collect(),
        };
        FrozenBadc { net: frozen, view, members }
    }

    fn restrict(&self, x: &Configuration) -> Configuration {
        let mut c = Configuration::zero(self.members.len());
        for (k, &g) in self.members.iter().enumerate() {
            c = c.with(AutomatonId::from_idx(k), x.get(g));
        }
        c
    }

    fn global(&self, local: AutomatonId) -> AutomatonId {
        self.members[local.idx()]
    }

    fn local(&self, global: AutomatonId) -> AutomatonId {
        AutomatonId(self.members.binary_search(&global).expect("member") as u32 + 1)
    }
}

/// Plans inside the induced double cycle toward an explicit local target,
/// applying the steps to the global simulation.
fn plan_b_to(
    sim: &mut Sim<'_>,
    badc: &InducedBadc,
    local_target: Configuration,
) -> Result<(), PlanError> {
    let frozen = FrozenBadc::build(sim.net, badc, &sim.x);
    let local_start = frozen.restrict(&sim.x);
    if local_start == local_target {
        return Ok(());
    }
    let (steps, _) = plan_badc_steps(&frozen.net, &frozen.view, &local_start, &local_target)?;
    for s in steps {
        sim.update(frozen.global(s));
    }
    if frozen.restrict(&sim.x) != local_target {
        return defect("double-cycle subplan missed its local target");
    }
    Ok(())
}

/// Solves a global stability pattern over the induced double cycle at the
/// current outside values. Returns the local target configuration and the
/// predicted global configuration after planning to it.
fn solve_pattern_predicted(
    net: &Network,
    badc: &InducedBadc,
    x_now: &Configuration,
    pattern: &BTreeMap<AutomatonId, bool>,
) -> (Configuration, Configuration) {
    let frozen = FrozenBadc::build(net, badc, x_now);
    let local_pattern: BTreeMap<AutomatonId, bool> =
        pattern.iter().map(|(&g, &v)| (frozen.local(g), v)).collect();
    let local = solve_stability_pattern(&frozen.net, &frozen.view, &local_pattern);
    let mut predicted = *x_now;
    for (idx, &g) in frozen.members.iter().enumerate() {
        predicted = predicted.with(g, local.get(AutomatonId::from_idx(idx)));
    }
    (local, predicted)
}

/// True when some member of `badc` is unstable.
fn badc_unstable(sim: &Sim<'_>, members: &BTreeSet<AutomatonId>) -> bool {
    members.iter().any(|&b| sim.unstable(b))
}

/// True when some member would be unstable after flipping every automaton of
/// `flips` in `x` (values elsewhere unchanged).
fn badc_unstable_after_at(
    net: &Network,
    members: &BTreeSet<AutomatonId>,
    x: &Configuration,
    flips: &BTreeSet<AutomatonId>,
) -> bool {
    let flipped = x.negate_set(flips);
    members.iter().any(|&b| net.eval_local(b, &flipped) != flipped.get(b))
}

fn badc_unstable_after(
    sim: &Sim<'_>,
    members: &BTreeSet<AutomatonId>,
    flips: &BTreeSet<AutomatonId>,
) -> bool {
    badc_unstable_after_at(sim.net, members, &sim.x, flips)
}

/// General reachability planning on a strongly connected network with an
/// induced double cycle of size greater than 3: drives every automaton
/// outside the double cycle to its target value while keeping the double
/// cycle unstable, then finishes inside it.
pub fn plan_general(
    net: &Network,
    x: &Configuration,
    target: &Configuration,
) -> Result<UpdatePlan, PlanError> {
    check_width(net, x)?;
    check_width(net, target)?;
    if net.is_fixed_point(x) {
        return Err(PlanError::StartStable);
    }
    if net.reverse().is_fixed_point(target) {
        return Err(PlanError::TargetUnreachable);
    }
    if !net.strongly_connected() {
        return Err(PlanError::NotStronglyConnected);
    }
    let badc = find_induced_badc(net).ok_or(PlanError::NoInducedBadc)?;

    if badc.members().len() == net.size() {
        let view = detect_badc_view(net)?;
        let (steps, expected) = plan_badc_steps(net, &view, x, target)?;
        return Ok(UpdatePlan { start: *x, target: *target, steps, expected });
    }

    // Stable targets admit short plans: peel the mismatch set by always
    // updating an automaton whose update lands on its target value.
    if net.is_fixed_point(target) {
        if let Some(plan) = greedy_fixed_point_plan(net, x, target) {
            return Ok(plan);
        }
    }

    let members = badc.members();
    let mut sim = Sim::new(net, *x);

    // If the target's restriction to the double cycle is unreachable for it,
    // stage through a modified target that differs along a path from a
    // global anchor into the double cycle.
    let staging = if badc_local_unreachable(net, &badc, target) {
        Some(build_staging(net, &badc, target)?)
    } else {
        None
    };
    let goal: Configuration = match &staging {
        Some(s) => s.staged,
        None => *target,
    };

    // Make the double cycle unstable.
    if !badc_unstable(&sim, &members) {
        let seed = net
            .automata()
            .find(|&i| sim.unstable(i))
            .expect("start is not a fixed point");
        let path = shortest_path_to(net, seed, &|a| members.contains(&a))
            .ok_or(PlanError::NotStronglyConnected)?;
        influence_walk(&mut sim, &path)?;
    }

    // Treat every outside automaton, deepest BFS layer first.
    let (depth, parent) = bfs_tree_from(net, &members);
    let mut order: Vec<AutomatonId> = net
        .automata()
        .filter(|a| !members.contains(a))
        .collect();
    order.sort_by_key(|a| (std::cmp::Reverse(depth[a.idx()]), a.0));
    for v in order {
        treat_outside(&mut sim, &badc, &members, &parent, v, &goal)?;
        debug_assert!(badc_unstable(&sim, &members));
    }

    // Finish inside the double cycle.
    let local_goal = FrozenBadc::build(net, &badc, &sim.x).restrict(&goal);
    plan_b_to(&mut sim, &badc, local_goal)?;

    // Walk the staging path back up to the true target.
    if let Some(s) = &staging {
        walk_staging_back(&mut sim, &s.path, target)?;
    }

    if sim.x != *target {
        return defect(format!("general plan ended at {}, wanted {}", sim.x, target));
    }
    Ok(UpdatePlan { start: *x, target: *target, steps: sim.steps, expected: sim.trace })
}

/// Greedy stabilisation toward a fixed-point target: repeatedly update the
/// smallest mismatched automaton whose update lands on its target value.
/// Linear-length when it succeeds; gives up (returning None) when stuck.
fn greedy_fixed_point_plan(
    net: &Network,
    x: &Configuration,
    target: &Configuration,
) -> Option<UpdatePlan> {
    let mut sim = Sim::new(net, *x);
    let cap = 4 * net.size();
    while sim.x != *target {
        if sim.steps.len() >= cap {
            return None;
        }
        let next = net
            .automata()
            .find(|&i| sim.x.get(i) != target.get(i) && net.eval_local(i, &sim.x) == target.get(i))?;
        sim.update(next);
    }
    Some(UpdatePlan { start: *x, target: *target, steps: sim.steps, expected: sim.trace })
}

/// Breadth-first tree rooted at the member set: per-automaton depth and
/// parent (members have depth 0 and no parent). Deterministic.
fn bfs_tree_from(
    net: &Network,
    members: &BTreeSet<AutomatonId>,
) -> (Vec<u32>, Vec<Option<AutomatonId>>) {
    let n = net.size();
    let mut depth = vec![u32::MAX; n];
    let mut parent: Vec<Option<AutomatonId>> = vec![None; n];
    let mut frontier: Vec<AutomatonId> = members.iter().copied().collect();
    for &m in members {
        depth[m.idx()] = 0;
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for v in net.out_neighbors(u) {
                if depth[v.idx()] == u32::MAX {
                    depth[v.idx()] = depth[u.idx()] + 1;
                    parent[v.idx()] = Some(u);
                    next.push(v);
                }
            }
        }
        next.sort();
        frontier = next;
    }
    (depth, parent)
}

fn tree_path(parent: &[Option<AutomatonId>], v: AutomatonId) -> Vec<AutomatonId> {
    let mut path = vec![v];
    let mut cur = v;
    while let Some(p) = parent[cur.idx()] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    path
}

/// Sets the outside automaton `v` to its value in `goal` while preserving
/// the instability of the double cycle, along the tree path from the cycle.
fn treat_outside(
    sim: &mut Sim<'_>,
    badc: &InducedBadc,
    members: &BTreeSet<AutomatonId>,
    parent: &[Option<AutomatonId>],
    v: AutomatonId,
    goal: &Configuration,
) -> Result<(), PlanError> {
    if sim.x.get(v) == goal.get(v) {
        return Ok(());
    }
    // Cheap path: flip v directly when that provably keeps the cycle unstable.
    if sim.unstable(v) && badc_unstable_after(sim, members, &[v].into()) {
        sim.update(v);
        return Ok(());
    }
    let path = tree_path(parent, v);
    let k = path.len() - 1;
    let i0 = path[0];
    debug_assert!(members.contains(&i0));

    if k == 1 {
        return treat_adjacent(sim, badc, members, i0, v);
    }

    // z0: ensure the path has an unstable seed and that the prefix walk
    // leaves the cycle unstable.
    let l_cur = last_unstable(sim, &path);
    let prefix_flips = |l: usize| -> BTreeSet<AutomatonId> {
        if l <= 1 {
            path[l..=1.min(k - 1)].iter().copied().collect()
        } else {
            BTreeSet::new()
        }
    };
    let z0_ok = match l_cur {
        Some(l) => badc_unstable_after(sim, members, &prefix_flips(l)),
        None => false,
    };
    if !z0_ok {
        plan_z0(sim, badc, members, &path)?;
    }

    // z1: walk the prefix.
    let l = match last_unstable(sim, &path) {
        Some(l) => l,
        None => return defect("path has no unstable seed after z0"),
    };
    if l <= 1 {
        for t in l..=1.min(k - 1) {
            if !sim.unstable(path[t]) {
                return defect("z1 walk hit a stable automaton");
            }
            sim.update(path[t]);
        }
    }
    if !badc_unstable(sim, members) {
        return defect("double cycle stabilised during the z1 walk");
    }

    // z2: engineer the cycle to stay unstable after the remaining flips.
    let lp = match last_unstable(sim, &path) {
        Some(lp) => lp,
        None => return defect("path lost its unstable seed"),
    };
    if lp < 2 {
        return defect("seed index below 2 after the prefix walk");
    }
    let mut w_set: BTreeSet<AutomatonId> = path[lp..k].iter().copied().collect();
    w_set.insert(v); // v is mismatched, so it will flip
    if !badc_unstable_after(sim, members, &w_set) {
        // Setting i0's stability bit to the walk's toggle parity leaves it
        // unstable once the walk has run.
        let bit = parity_in(sim.net, i0, &w_set);
        let pattern: BTreeMap<AutomatonId, bool> = [(i0, bit)].into();
        let (local, _) = solve_pattern_predicted(sim.net, badc, &sim.x, &pattern);
        plan_b_to(sim, badc, local)?;
        if !badc_unstable_after(sim, members, &w_set) {
            return defect("z2 engineering failed");
        }
    }

    // Final walk and the update of v itself.
    for t in lp..k {
        if !sim.unstable(path[t]) {
            return defect("final walk hit a stable automaton");
        }
        sim.update(path[t]);
    }
    if !sim.unstable(v) {
        return defect("target automaton still stable after the walk");
    }
    sim.update(v);
    if !badc_unstable(sim, members) {
        return defect("double cycle stabilised after setting the automaton");
    }
    Ok(())
}

/// Parity of `|I(b)| ∩ flips`, i.e. whether flipping `flips` toggles b's
/// stability. A stability bit equal to this parity leaves b unstable after
/// the flips.
fn parity_in(net: &Network, b: AutomatonId, flips: &BTreeSet<AutomatonId>) -> bool {
    net.influencers(b).intersection(flips).count() % 2 == 1
}

/// z0 for a deep path: put the cycle in a state where the path has an
/// unstable seed and some member provably survives the prefix walk unstable.
/// Candidate patterns fix the path start unstable plus at most one witness
/// bit; each candidate is validated on the predicted configuration.
fn plan_z0(
    sim: &mut Sim<'_>,
    badc: &InducedBadc,
    members: &BTreeSet<AutomatonId>,
    path: &[AutomatonId],
) -> Result<(), PlanError> {
    let net = sim.net;
    let k = path.len() - 1;
    let i0 = path[0];

    let mut patterns: Vec<BTreeMap<AutomatonId, bool>> = vec![[(i0, false)].into()];
    let mut witnesses: Vec<AutomatonId> = members.iter().copied().filter(|&w| w != i0).collect();
    witnesses.sort();
    for w in witnesses {
        for bit in [true, false] {
            patterns.push([(i0, false), (w, bit)].into());
        }
    }
    for pattern in patterns {
        let (local, predicted) = solve_pattern_predicted(net, badc, &sim.x, &pattern);
        let l0 = match (0..=k).rev().find(|&t| !net.is_stable(path[t], &predicted)) {
            Some(l0) => l0,
            None => continue,
        };
        let flips: BTreeSet<AutomatonId> = if l0 <= 1 {
            path[l0..=1.min(k - 1)].iter().copied().collect()
        } else {
            BTreeSet::new()
        };
        if !badc_unstable_after_at(net, members, &predicted, &flips) {
            continue;
        }
        plan_b_to(sim, badc, local)?;
        if sim.x != predicted {
            return defect("z0 prediction mismatch");
        }
        return Ok(());
    }
    defect("no consistent z0 witness")
}

/// Treatment of an automaton adjacent to the double cycle, where the prefix
/// and main walks collapse: engineer the cycle, flip the member if needed to
/// destabilise v, then flip v.
fn treat_adjacent(
    sim: &mut Sim<'_>,
    badc: &InducedBadc,
    members: &BTreeSet<AutomatonId>,
    i0: AutomatonId,
    v: AutomatonId,
) -> Result<(), PlanError> {
    let net = sim.net;
    let mut witnesses: Vec<AutomatonId> = members.iter().copied().collect();
    witnesses.sort();
    // Strategy A: v is unstable at the engineered state and only v flips.
    // Strategy B: v is stable there; flipping the unstable i0 destabilises
    // it, so both i0 and v flip.
    for strategy_b in [false, true] {
        for &w in &witnesses {
            if strategy_b && w == i0 {
                continue;
            }
            let mut flips: BTreeSet<AutomatonId> = [v].into();
            let mut pattern: BTreeMap<AutomatonId, bool> = BTreeMap::new();
            if strategy_b {
                flips.insert(i0);
                pattern.insert(i0, false);
            }
            pattern.insert(w, parity_in(net, w, &flips));
            let (local, predicted) = solve_pattern_predicted(net, badc, &sim.x, &pattern);
            let v_unstable = !net.is_stable(v, &predicted);
            if strategy_b == v_unstable {
                continue;
            }
            if !badc_unstable_after_at(net, members, &predicted, &flips) {
                continue;
            }
            plan_b_to(sim, badc, local)?;
            if sim.x != predicted {
                return defect("adjacent treatment prediction mismatch");
            }
            if strategy_b {
                if !sim.unstable(i0) {
                    return defect("adjacent treatment: engineered seed is stable");
                }
                sim.update(i0);
            }
            if !sim.unstable(v) {
                return defect("adjacent treatment failed to destabilise the automaton");
            }
            sim.update(v);
            if !badc_unstable(sim, members) {
                return defect("double cycle stabilised after adjacent treatment");
            }
            return Ok(());
        }
    }
    defect("no consistent strategy for an adjacent automaton")
}

/// True when the target restricted to the double cycle is unreachable for it
/// with the outside frozen at the target values.
fn badc_local_unreachable(net: &Network, badc: &InducedBadc, target: &Configuration) -> bool {
    badc.members()
        .iter()
        .all(|&b| net.eval_local(b, &target.negate_one(b)) != target.get(b))
}

struct Staging {
    /// Path from the global anchor into the double cycle.
    path: Vec<AutomatonId>,
    /// Target with the path values rewritten so the walk back can set them.
    staged: Configuration,
}

/// Builds the staged target: the path end inside the cycle is negated (which
/// makes the restriction reachable for the cycle) and each earlier path
/// automaton gets the value that lets it flip on demand during the walk back.
fn build_staging(
    net: &Network,
    badc: &InducedBadc,
    target: &Configuration,
) -> Result<Staging, PlanError> {
    let members = badc.members();
    let mut anchors: Vec<AutomatonId> = net
        .automata()
        .filter(|&i| !members.contains(&i))
        .filter(|&i| net.eval_local(i, &target.negate_one(i)) == target.get(i))
        .collect();
    anchors.sort();
    'outer: for anchor in anchors {
        let path = match shortest_path_to(net, anchor, &|a| members.contains(&a)) {
            Some(p) => p,
            None => continue,
        };
        let r = path.len() - 1;
        let mut staged = *target;
        for l in 1..=r {
            staged = staged.with(path[l], !target.get(path[l]));
            let q = path[l - 1];
            // Make q unstable in the staged context; with a self-literal the
            // instability does not depend on q's own value.
            let has_self = net.influencers(q).contains(&q);
            if has_self {
                if net.eval_local(q, &staged) == staged.get(q) {
                    let flipped = staged.negate_one(q);
                    if net.eval_local(q, &flipped) == flipped.get(q) {
                        continue 'outer; // constant offset blocks instability
                    }
                    staged = flipped;
                }
            } else {
                let val = !net.eval_local(q, &staged);
                staged = staged.with(q, val);
            }
        }
        if badc_local_unreachable(net, badc, &staged) {
            continue; // should not happen; be safe and try the next anchor
        }
        return Ok(Staging { path, staged });
    }
    defect("no staging anchor admits a workable path")
}

/// Walks the staging path back to the true target: from the cycle end down
/// to the anchor, flipping each automaton's predecessor first when its
/// update would land on the wrong value.
fn walk_staging_back(
    sim: &mut Sim<'_>,
    path: &[AutomatonId],
    target: &Configuration,
) -> Result<(), PlanError> {
    let r = path.len() - 1;
    for t in (1..=r).rev() {
        let q = path[t];
        if sim.x.get(q) == target.get(q) {
            continue;
        }
        if sim.net.eval_local(q, &sim.x) != target.get(q) {
            let pred = path[t - 1];
            if !sim.unstable(pred) {
                return defect("staging walk: predecessor cannot flip");
            }
            sim.update(pred);
            if sim.net.eval_local(q, &sim.x) != target.get(q) {
                return defect("staging walk: flip did not enable the automaton");
            }
        }
        sim.update(q);
    }
    let q0 = path[0];
    if sim.x.get(q0) != target.get(q0) {
        if sim.net.eval_local(q0, &sim.x) != target.get(q0) {
            return defect("staging walk: anchor cannot land on its value");
        }
        sim.update(q0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_badc, gen_chain, gen_flower, SignClass};
    use crate::textio::parse_network;

    fn cfg(s: &str) -> Configuration {
        Configuration::parse(s).unwrap()
    }

    #[test]
    fn induced_badc_of_badc_is_itself() {
        let (net, _) = gen_badc(3, 3, SignClass::Positive).unwrap();
        let b = find_induced_badc(&net).unwrap();
        assert_eq!(b.size(), 5);
        assert_eq!(b.center, AutomatonId(1));
    }

    #[test]
    fn induced_badc_of_flower_is_a_petal_pair() {
        let (net, _) = gen_flower(&[3, 3, 3], SignClass::Positive).unwrap();
        let b = find_induced_badc(&net).unwrap();
        assert_eq!(b.size(), 5);
        assert_eq!(b.center, AutomatonId(1));
    }

    #[test]
    fn pure_cycle_has_no_induced_badc() {
        let net = parse_network("1 : x5\n2 : x1\n3 : x2\n4 : x3\n5 : x4\n").unwrap();
        assert_eq!(find_induced_badc(&net), None);
    }

    #[test]
    fn small_badc_plans_via_bfs() {
        let (net, _) = gen_badc(1, 2, SignClass::Positive).unwrap();
        let plan = plan_badc(&net, &cfg("01"), &cfg("11")).unwrap();
        assert_eq!(plan.steps, vec![AutomatonId(1)]);
        assert!(verify_plan(&net, &plan).ok);
    }

    #[test]
    fn badc_44_figure_pair() {
        let (net, lab) = gen_badc(4, 4, SignClass::Positive).unwrap();
        let x = lab.config_from_cycle_vectors(&["0000", "0001"]).unwrap();
        let t = lab.config_from_cycle_vectors(&["0110", "0011"]).unwrap();
        let plan = plan_badc(&net, &x, &t).unwrap();
        assert!(verify_plan(&net, &plan).ok);
        let n = net.size();
        assert!(plan.len() <= 4 * n * n, "{} steps", plan.len());
    }

    #[test]
    fn plan_badc_rejects_bad_inputs() {
        let (net, _) = gen_badc(3, 3, SignClass::Positive).unwrap();
        let stable = cfg("00000");
        let unreachable = {
            let rev = net.reverse();
            (0..32u64)
                .map(|b| Configuration::from_bits(b, 5))
                .find(|c| rev.is_fixed_point(c))
                .unwrap()
        };
        assert_eq!(plan_badc(&net, &stable, &cfg("10000")), Err(PlanError::StartStable));
        assert_eq!(
            plan_badc(&net, &cfg("10000"), &unreachable),
            Err(PlanError::TargetUnreachable)
        );
    }

    #[test]
    fn destabilize_cases() {
        let (net, _) = gen_badc(3, 3, SignClass::Positive).unwrap();
        // 10000: automaton 1 (center) unstable.
        let x = cfg("10000");
        assert!(!net.is_stable(AutomatonId(1), &x));
        // Destabilising an already unstable automaton is a no-op.
        let (steps, y) = plan_destabilize(&net, &x, AutomatonId(1), AutomatonId(1)).unwrap();
        assert!(steps.is_empty());
        assert_eq!(y, x);
        // Along the nude chain 1 -> 2 -> 3, one pass flips 3's predecessor.
        let (steps, y) = plan_destabilize(&net, &x, AutomatonId(1), AutomatonId(3)).unwrap();
        assert!(!net.is_stable(AutomatonId(3), &y));
        assert!(!steps.is_empty());
        // Stable seed is a contract error.
        let z = cfg("00000");
        assert!(matches!(
            plan_destabilize(&net, &z, AutomatonId(1), AutomatonId(3)),
            Err(PlanError::SeedStable(1))
        ));
    }

    #[test]
    fn verify_reports_divergence() {
        let (net, _) = gen_badc(3, 3, SignClass::Positive).unwrap();
        let x = cfg("10000");
        let plan = plan_badc(&net, &x, &cfg("01010")).unwrap();
        assert!(verify_plan(&net, &plan).ok);
        // Empty plan from start to start verifies.
        let empty = UpdatePlan { start: x, target: x, steps: vec![], expected: vec![x] };
        assert!(verify_plan(&net, &empty).ok);
        // Corrupt one step: verification fails and points at the divergence.
        let mut bad = plan.clone();
        let mid = bad.steps.len() / 2;
        bad.steps[mid] = AutomatonId(if bad.steps[mid].0 == 1 { 2 } else { 1 });
        let report = verify_plan(&net, &bad);
        if report.ok {
            // The corruption happened to be harmless for this pair; force a
            // clearly wrong final step instead.
            bad = plan.clone();
            bad.target = cfg("00000");
            let report = verify_plan(&net, &bad);
            assert!(!report.ok);
        } else {
            assert!(report.divergence.is_some());
            assert!(report.divergence.unwrap() <= mid + 1);
        }
    }

    #[test]
    fn synchronous_witness_on_badc_33() {
        let (net, _) = gen_badc(3, 3, SignClass::Positive).unwrap();
        let rev = net.reverse();
        let mut seen = 0;
        for bits in 0..32u64 {
            let x = Configuration::from_bits(bits, 5);
            if !rev.is_fixed_point(&x) {
                continue;
            }
            seen += 1;
            let (hat, w) = synchronous_unreachable_witness(&net, &x).unwrap();
            assert_eq!(net.apply_update(&w, &hat), x);
            assert!(!rev.is_fixed_point(&hat));
            assert_eq!(w.len(), 3); // the full planning cycle
        }
        assert_eq!(seen, 1);
        // The literal cycle-minus-center variant admits no witness at all:
        // the member behind the center would update to the wrong value.
        for bits in 0..32u64 {
            let x = Configuration::from_bits(bits, 5);
            if !rev.is_fixed_point(&x) {
                continue;
            }
            let w: BTreeSet<AutomatonId> = [AutomatonId(2), AutomatonId(3)].into();
            for hb in 0..32u64 {
                let hat = Configuration::from_bits(hb, 5);
                let agrees_outside = net
                    .automata()
                    .filter(|a| !w.contains(a))
                    .all(|a| hat.get(a) == x.get(a));
                if agrees_outside {
                    assert_ne!(net.apply_update(&w, &hat), x);
                }
            }
        }
    }

    #[test]
    fn general_plan_on_flower_to_fixed_point_is_linear() {
        let (net, _) = gen_flower(&[3, 3, 3], SignClass::Positive).unwrap();
        let x = cfg("1000000");
        let t = cfg("0000000");
        assert!(net.is_fixed_point(&t));
        let plan = plan_general(&net, &x, &t).unwrap();
        assert!(verify_plan(&net, &plan).ok);
        assert!(plan.len() <= 4 * net.size(), "{} steps", plan.len());
    }

    #[test]
    fn general_plan_delegates_on_pure_badc() {
        let (net, _) = gen_badc(3, 4, SignClass::Mixed).unwrap();
        let x = cfg("100000");
        let t = cfg("010101");
        let direct = plan_badc(&net, &x, &t);
        let general = plan_general(&net, &x, &t);
        match (direct, general) {
            (Ok(a), Ok(b)) => {
                assert!(verify_plan(&net, &a).ok);
                assert!(verify_plan(&net, &b).ok);
            }
            (Err(e), _) => panic!("direct plan failed: {e}"),
            (_, Err(e)) => panic!("general plan failed: {e}"),
        }
    }

    #[test]
    fn general_plan_on_chain() {
        let (net, _) = gen_chain(&[3, 2, 2], None, SignClass::Positive).unwrap();
        let n = net.size();
        assert_eq!(n, 5);
        let rev = net.reverse();
        let x = cfg("10000").negate_all(); // some unstable state
        assert!(!net.is_fixed_point(&x));
        for bits in 0..(1u64 << n) {
            let t = Configuration::from_bits(bits, n);
            if rev.is_fixed_point(&t) {
                continue;
            }
            let plan = plan_general(&net, &x, &t).unwrap();
            assert!(verify_plan(&net, &plan).ok, "target {t}");
            assert!(plan.len() <= 8 * n * n, "target {t}: {} steps", plan.len());
        }
    }
}
