//! Behavioural-isomorphism machinery: witness search via the per-automaton
//! bijection condition, sign-rewriting steps, flip-orbit normal forms,
//! symbolic fixed-point enumeration and the flower/chain classifiers.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::families::FamilyLabeling;
use crate::net::{AutomatonId, Configuration, LocalRule, Network, SignedLiteral};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquivError {
    #[error("rewrite site does not match the rule pattern: {0}")]
    PatternMismatch(String),
    #[error("network does not match the labeling: {0}")]
    BadLabeling(String),
    #[error("not a flower: {0}")]
    NotAFlower(String),
    #[error("not a cycle chain: {0}")]
    NotAChain(String),
    #[error("class theory violated: {0}")]
    ClassDefect(String),
}

/// Witness of a behavioural isomorphism: an automaton renaming plus the set
/// of automata whose state is negated. `perm[i-1]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub perm: Vec<AutomatonId>,
    pub flips: BTreeSet<AutomatonId>,
}

impl IsoWitness {
    pub fn identity(n: usize) -> Self {
        IsoWitness { perm: (1..=n as u32).map(AutomatonId).collect(), flips: BTreeSet::new() }
    }

    pub fn map(&self, i: AutomatonId) -> AutomatonId {
        self.perm[i.idx()]
    }

    /// Induced bijection on configurations.
    pub fn map_config(&self, x: &Configuration) -> Configuration {
        let mut out = Configuration::zero(x.len());
        for k in 0..x.len() {
            let i = AutomatonId::from_idx(k);
            out = out.with(self.map(i), x.get(i) ^ self.flips.contains(&i));
        }
        out
    }
}

/// Number of occurrences of `source` among the literals of `rule`.
fn mult(rule: &LocalRule, source: AutomatonId) -> usize {
    rule.literals().iter().filter(|l| l.source == source).count()
}

/// Verifies the per-rule identity symbolically: mapped source multisets must
/// coincide and parities must satisfy
/// `p_b(perm(i)) = p_a(i) ^ |sources(i) ∩ flips| ^ [i ∈ flips]`.
pub fn check_witness(a: &Network, b: &Network, w: &IsoWitness) -> bool {
    let n = a.size();
    if b.size() != n || w.perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in &w.perm {
        if p.0 < 1 || p.idx() >= n || seen[p.idx()] {
            return false;
        }
        seen[p.idx()] = true;
    }
    for i in a.automata() {
        let ra = a.rule(i);
        let rb = b.rule(w.map(i));
        let mut mapped: Vec<AutomatonId> = ra.literals().iter().map(|l| w.map(l.source)).collect();
        mapped.sort();
        let theirs: Vec<AutomatonId> = rb.literals().iter().map(|l| l.source).collect();
        if mapped != theirs {
            return false;
        }
        let toggles =
            ra.literals().iter().filter(|l| w.flips.contains(&l.source)).count() % 2 == 1;
        if rb.parity() != ra.parity() ^ toggles ^ w.flips.contains(&i) {
            return false;
        }
    }
    true
}

/// One-dimensional Weisfeiler-Leman colors of the interaction graph, used to
/// prune the permutation search.
fn refine_colors(net: &Network) -> Vec<u64> {
    let n = net.size();
    let mut colors: Vec<u64> = net
        .automata()
        .map(|i| {
            let rule = net.rule(i);
            let out = net.out_neighbors(i).len() as u64;
            (rule.literals().len() as u64) << 20 | out << 4 | mult(rule, i) as u64
        })
        .collect();
    for _ in 0..n {
        let mut keys: Vec<(u64, Vec<u64>, Vec<u64>)> = Vec::with_capacity(n);
        for i in net.automata() {
            let mut ins: Vec<u64> =
                net.rule(i).literals().iter().map(|l| colors[l.source.idx()]).collect();
            ins.sort_unstable();
            let mut outs: Vec<u64> =
                net.out_neighbors(i).iter().map(|j| colors[j.idx()]).collect();
            outs.sort_unstable();
            keys.push((colors[i.idx()], ins, outs));
        }
        let mut palette: BTreeMap<&(u64, Vec<u64>, Vec<u64>), u64> = BTreeMap::new();
        for key in &keys {
            let next = palette.len() as u64;
            palette.entry(key).or_insert(next);
        }
        let new_colors: Vec<u64> = keys.iter().map(|k| palette[k]).collect();
        if new_colors == colors {
            break;
        }
        colors = new_colors;
    }
    colors
}

/// Searches for a behavioural isomorphism: backtracking over interaction
/// graph isomorphisms with color pruning, then solving the sign constraints
/// over GF(2) for each structural candidate. Sound and complete for xor
/// networks.
pub fn find_isomorphism(a: &Network, b: &Network) -> Option<IsoWitness> {
    let n = a.size();
    if b.size() != n {
        return None;
    }
    let ca = refine_colors(a);
    let cb = refine_colors(b);
    let mut sa = ca.clone();
    let mut sb = cb.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    // Assign rare colors first.
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &c in &ca {
        *counts.entry(c).or_insert(0) += 1;
    }
    let mut order: Vec<AutomatonId> = a.automata().collect();
    order.sort_by_key(|i| (counts[&ca[i.idx()]], i.0));

    let mut mapping: Vec<Option<AutomatonId>> = vec![None; n];
    let mut used = vec![false; n];

    fn consistent(
        a: &Network,
        b: &Network,
        mapping: &[Option<AutomatonId>],
        i: AutomatonId,
        j: AutomatonId,
    ) -> bool {
        for u in a.automata() {
            let fu = match mapping[u.idx()] {
                Some(f) => f,
                None => continue,
            };
            if mult(a.rule(i), u) != mult(b.rule(j), fu)
                || mult(a.rule(u), i) != mult(b.rule(fu), j)
            {
                return false;
            }
        }
        mult(a.rule(i), i) == mult(b.rule(j), j)
    }

    fn backtrack(
        a: &Network,
        b: &Network,
        ca: &[u64],
        cb: &[u64],
        order: &[AutomatonId],
        pos: usize,
        mapping: &mut Vec<Option<AutomatonId>>,
        used: &mut Vec<bool>,
    ) -> Option<IsoWitness> {
        if pos == order.len() {
            let perm: Vec<AutomatonId> = mapping.iter().map(|m| m.unwrap()).collect();
            let flips = solve_flips(a, b, &perm)?;
            return Some(IsoWitness { perm, flips });
        }
        let i = order[pos];
        for j in b.automata() {
            if used[j.idx()] || cb[j.idx()] != ca[i.idx()] {
                continue;
            }
            if !consistent(a, b, mapping, i, j) {
                continue;
            }
            mapping[i.idx()] = Some(j);
            used[j.idx()] = true;
            if let Some(w) = backtrack(a, b, ca, cb, order, pos + 1, mapping, used) {
                return Some(w);
            }
            mapping[i.idx()] = None;
            used[j.idx()] = false;
        }
        None
    }

    backtrack(a, b, &ca, &cb, &order, 0, &mut mapping, &mut used)
}

/// Sign constraints for a fixed permutation: one GF(2) equation per rule.
/// Flipping `j` toggles `p_i` when `j` occurs an odd number of times in rule
/// `i`, and flipping `i` toggles it once more.
fn solve_flips(a: &Network, b: &Network, perm: &[AutomatonId]) -> Option<BTreeSet<AutomatonId>> {
    let n = a.size();
    let mut rows = Vec::with_capacity(n);
    for i in a.automata() {
        let mut mask = 0u64;
        for j in a.automata() {
            let coef = (mult(a.rule(i), j) % 2 == 1) ^ (i == j);
            if coef {
                mask |= 1u64 << j.idx();
            }
        }
        let rhs = a.rule(i).parity() ^ b.rule(perm[i.idx()]).parity();
        rows.push((mask, rhs));
    }
    let sol = gf2_particular_solution(&rows)?;
    Some((0..n).filter(|&k| sol >> k & 1 == 1).map(AutomatonId::from_idx).collect())
}

/// Reduced row echelon solve; free variables are set to zero. Returns None
/// on an inconsistent system.
fn gf2_particular_solution(rows: &[(u64, bool)]) -> Option<u64> {
    let mut ech: Vec<(u64, bool)> = Vec::new();
    for &(mut m, mut r) in rows {
        for &(em, er) in &ech {
            let pivot = em & em.wrapping_neg();
            if m & pivot != 0 {
                m ^= em;
                r ^= er;
            }
        }
        if m == 0 {
            if r {
                return None;
            }
            continue;
        }
        // Back-eliminate the new pivot from earlier rows.
        let pivot = m & m.wrapping_neg();
        for (em, er) in ech.iter_mut() {
            if *em & pivot != 0 {
                *em ^= m;
                *er ^= r;
            }
        }
        ech.push((m, r));
    }
    let mut sol = 0u64;
    for &(m, r) in &ech {
        let pivot = m & m.wrapping_neg();
        // Rows are fully reduced: other set bits are free variables (zero).
        if r {
            sol |= pivot;
        }
    }
    Some(sol)
}

// ---------------------------------------------------------------------------
// Rewriting
// ---------------------------------------------------------------------------

/// One sign-rewriting step. Each application yields an equivalent network
/// together with the witness realising the equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RewriteStep {
    /// `!b1 ^ !b2 = b1 ^ b2` inside one rule.
    FlipPair { rule: AutomatonId, sources: (AutomatonId, AutomatonId) },
    /// `!b1 ^ b2 = b1 ^ !b2` inside one rule.
    SignSwap { rule: AutomatonId, negated: AutomatonId, plain: AutomatonId },
    /// Negation of a connected region (first cycle, upper half of the second
    /// cycle and the first intersection of a chain), as one vertex flip.
    RegionFlip { region: BTreeSet<AutomatonId> },
    /// Negation of an arbitrary automaton set.
    VertexFlip { set: BTreeSet<AutomatonId> },
}

/// The region of the half-cycle equivalence for a labeled chain: cycle 1,
/// the automata of cycle 2 strictly between its first position and the first
/// intersection, and the intersection itself.
pub fn equivalence3_region(labeling: &FamilyLabeling) -> Result<BTreeSet<AutomatonId>, EquivError> {
    if labeling.cycle_count() < 2 {
        return Err(EquivError::BadLabeling("need at least two cycles".into()));
    }
    let o1 = labeling.intersections()[0];
    let mut region: BTreeSet<AutomatonId> = labeling.cycle(1).iter().copied().collect();
    let c2 = labeling.cycle(2);
    let pos = c2
        .iter()
        .position(|&a| a == o1)
        .ok_or_else(|| EquivError::BadLabeling("first intersection not on cycle 2".into()))?;
    for &a in &c2[1..pos] {
        region.insert(a);
    }
    region.insert(o1);
    Ok(region)
}

pub fn rewrite(net: &Network, step: &RewriteStep) -> Result<(Network, IsoWitness), EquivError> {
    let n = net.size();
    match step {
        RewriteStep::FlipPair { rule, sources } => {
            let mut rules: Vec<LocalRule> = net.rules().to_vec();
            let lits: Vec<SignedLiteral> = rules[rule.idx()]
                .literals()
                .iter()
                .map(|&l| {
                    if l.source == sources.0 || l.source == sources.1 {
                        SignedLiteral { source: l.source, negated: !l.negated }
                    } else {
                        l
                    }
                })
                .collect();
            let old = rules[rule.idx()].literals();
            let find = |s: AutomatonId| old.iter().find(|l| l.source == s);
            match (find(sources.0), find(sources.1)) {
                (Some(l1), Some(l2)) if l1.negated && l2.negated && sources.0 != sources.1 => {}
                _ => {
                    return Err(EquivError::PatternMismatch(
                        "flip_pair needs two negative literals in the rule".into(),
                    ))
                }
            }
            rules[rule.idx()] = LocalRule::multiset(lits).expect("nonempty");
            let out = Network::new(rules).expect("same structure");
            Ok((out, IsoWitness::identity(n)))
        }
        RewriteStep::SignSwap { rule, negated, plain } => {
            let old = net.rule(*rule).literals();
            let find = |s: AutomatonId| old.iter().find(|l| l.source == s);
            match (find(*negated), find(*plain)) {
                (Some(l1), Some(l2)) if l1.negated && !l2.negated && negated != plain => {}
                _ => {
                    return Err(EquivError::PatternMismatch(
                        "sign_swap needs one negative and one positive literal".into(),
                    ))
                }
            }
            let mut rules: Vec<LocalRule> = net.rules().to_vec();
            let lits: Vec<SignedLiteral> = rules[rule.idx()]
                .literals()
                .iter()
                .map(|&l| {
                    if l.source == *negated || l.source == *plain {
                        SignedLiteral { source: l.source, negated: !l.negated }
                    } else {
                        l
                    }
                })
                .collect();
            rules[rule.idx()] = LocalRule::multiset(lits).expect("nonempty");
            let out = Network::new(rules).expect("same structure");
            Ok((out, IsoWitness::identity(n)))
        }
        RewriteStep::RegionFlip { region } => {
            let out = net.flip(region);
            Ok((out, IsoWitness { perm: IsoWitness::identity(n).perm, flips: region.clone() }))
        }
        RewriteStep::VertexFlip { set } => {
            let out = net.flip(set);
            Ok((out, IsoWitness { perm: IsoWitness::identity(n).perm, flips: set.clone() }))
        }
    }
}

// ---------------------------------------------------------------------------
// Flip-orbit normal form
// ---------------------------------------------------------------------------

/// Coefficient masks of the flip action on rule parities: bit `j` of row `i`
/// tells whether flipping automaton `j+1` toggles the parity of rule `i+1`.
fn flip_rows(net: &Network) -> Vec<u64> {
    net.automata()
        .map(|i| {
            let mut mask = 0u64;
            for j in net.automata() {
                if (mult(net.rule(i), j) % 2 == 1) ^ (i == j) {
                    mask |= 1u64 << j.idx();
                }
            }
            mask
        })
        .collect()
}

fn parity_vector(net: &Network) -> u64 {
    let mut p = 0u64;
    for i in net.automata() {
        if net.rule(i).parity() {
            p |= 1u64 << i.idx();
        }
    }
    p
}

/// Renders a network with the given rule parities in canonical syntax: all
/// literals positive except, for odd parity, the smallest one.
fn with_parities(net: &Network, parities: u64) -> Network {
    let rules = net
        .automata()
        .map(|i| {
            let mut lits: Vec<SignedLiteral> =
                net.rule(i).literals().iter().map(|l| SignedLiteral::pos(l.source)).collect();
            if parities >> i.idx() & 1 == 1 {
                lits[0].negated = true;
            }
            LocalRule::multiset(lits).expect("nonempty")
        })
        .collect();
    Network::new(rules).expect("same structure")
}

/// Lexicographically minimal rule-parity vector over the vertex-flip orbit
/// (automaton 1 most significant) and a flip set realising it.
fn min_parity_over_flips(net: &Network) -> (u64, BTreeSet<AutomatonId>) {
    let rows = flip_rows(net);
    let n = net.size();
    // Columns of the flip action, with the generating flip set attached.
    let mut basis: Vec<(u64, u64)> = Vec::new(); // (parity effect, flip combo)
    for j in 0..n {
        let mut mask = 0u64;
        for (i, row) in rows.iter().enumerate() {
            if row >> j & 1 == 1 {
                mask |= 1u64 << i;
            }
        }
        let mut combo = 1u64 << j;
        for &(bm, bc) in &basis {
            let pivot = bm & bm.wrapping_neg();
            if mask & pivot != 0 {
                mask ^= bm;
                combo ^= bc;
            }
        }
        if mask != 0 {
            let pivot = mask & mask.wrapping_neg();
            for (bm, bc) in basis.iter_mut() {
                if *bm & pivot != 0 {
                    *bm ^= mask;
                    *bc ^= combo;
                }
            }
            basis.push((mask, combo));
        }
    }
    basis.sort_by_key(|(m, _)| m & m.wrapping_neg());
    let mut y = parity_vector(net);
    let mut combo = 0u64;
    for &(m, c) in &basis {
        let pivot = m & m.wrapping_neg();
        if y & pivot != 0 {
            y ^= m;
            combo ^= c;
        }
    }
    let set = (0..n).filter(|&k| combo >> k & 1 == 1).map(AutomatonId::from_idx).collect();
    (y, set)
}

/// Canonical representative of the vertex-flip orbit. Returns the rewritten
/// network and the realising steps (one vertex flip, or none when the input
/// is already canonical).
pub fn normalize_signs(net: &Network) -> (Network, Vec<RewriteStep>) {
    let (y, set) = min_parity_over_flips(net);
    let out = with_parities(net, y);
    if out == *net {
        (out, Vec::new())
    } else {
        (out, vec![RewriteStep::VertexFlip { set }])
    }
}

/// Flip set mapping `net` onto the all-positive representative of its
/// structure, when one exists.
fn all_positive_flip(net: &Network) -> Option<BTreeSet<AutomatonId>> {
    let rows = flip_rows(net);
    let p = parity_vector(net);
    let eqs: Vec<(u64, bool)> =
        rows.iter().enumerate().map(|(i, &m)| (m, p >> i & 1 == 1)).collect();
    let sol = gf2_particular_solution(&eqs)?;
    Some((0..net.size()).filter(|&k| sol >> k & 1 == 1).map(AutomatonId::from_idx).collect())
}

// ---------------------------------------------------------------------------
// Symbolic fixed points
// ---------------------------------------------------------------------------

/// Number of automata whose maximal nude path has length zero — the exponent
/// of the fixed-point bound 2^k.
pub fn intersection_count(net: &Network) -> usize {
    net.intersection_nodes().len()
}

/// Fixed points by anchor enumeration: assign the intersection nodes (plus
/// one anchor per pure single-influencer cycle), propagate along nude arcs,
/// and keep the assignments under which every rule is satisfied.
pub fn fixed_points_symbolic(net: &Network) -> Vec<Configuration> {
    let n = net.size();
    let mut anchors: Vec<AutomatonId> = net.intersection_nodes();
    // Pure cycles of single-influencer automata need one anchor each.
    let anchor_set: BTreeSet<AutomatonId> = anchors.iter().copied().collect();
    let mut covered = vec![false; n];
    for &a in &anchors {
        covered[a.idx()] = true;
    }
    for i in net.automata() {
        if covered[i.idx()] {
            continue;
        }
        // Walk back; if we return to the start without touching an anchor,
        // this is a pure cycle.
        let mut seen = vec![i];
        let mut cur = i;
        loop {
            let inf = net.influencers(cur);
            if inf.len() != 1 {
                break;
            }
            let pred = *inf.iter().next().unwrap();
            if anchor_set.contains(&pred) || covered[pred.idx()] {
                break;
            }
            if seen.contains(&pred) {
                let cycle_start = seen.iter().position(|&x| x == pred).unwrap();
                let anchor = *seen[cycle_start..].iter().min_by_key(|a| a.0).unwrap();
                anchors.push(anchor);
                for &m in &seen[cycle_start..] {
                    covered[m.idx()] = true;
                }
                break;
            }
            seen.push(pred);
            cur = pred;
        }
        covered[i.idx()] = true;
    }
    anchors.sort();
    anchors.dedup();

    let mut out = Vec::new();
    for bits in 0..(1u64 << anchors.len()) {
        let mut value: Vec<Option<bool>> = vec![None; n];
        for (k, &a) in anchors.iter().enumerate() {
            value[a.idx()] = Some(bits >> k & 1 == 1);
        }
        // Propagate along nude arcs until settled.
        for _ in 0..n {
            let mut changed = false;
            for i in net.automata() {
                if value[i.idx()].is_some() {
                    continue;
                }
                let inf = net.influencers(i);
                if inf.len() == 1 {
                    let pred = *inf.iter().next().unwrap();
                    if let Some(v) = value[pred.idx()] {
                        value[i.idx()] = Some(v ^ net.rule(i).parity());
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if value.iter().any(|v| v.is_none()) {
            continue; // not a candidate under this anchor choice
        }
        let mut cfg = Configuration::zero(n);
        for i in net.automata() {
            cfg = cfg.with(i, value[i.idx()].unwrap());
        }
        if net.is_fixed_point(&cfg) && !out.contains(&cfg) {
            out.push(cfg);
        }
    }
    out.sort_by_key(|c| c.index());
    out
}

// ---------------------------------------------------------------------------
// Classifiers
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyClass {
    Positive,
    Negative,
}

#[derive(Debug)]
pub struct Classification {
    pub class: FamilyClass,
    pub predicted_fixed_points: Vec<Configuration>,
    pub predicted_unreachables: Vec<Configuration>,
}

fn expected_arcs(labeling: &FamilyLabeling) -> Vec<(AutomatonId, AutomatonId)> {
    let mut arcs = Vec::new();
    for cyc in labeling.cycles() {
        let n = cyc.len();
        for j in 0..n {
            arcs.push((cyc[(j + n - 1) % n], cyc[j]));
        }
    }
    arcs.sort();
    arcs
}

fn validate_structure(net: &Network, labeling: &FamilyLabeling) -> Result<(), EquivError> {
    let mut actual: Vec<(AutomatonId, AutomatonId)> = Vec::new();
    for i in net.automata() {
        for lit in net.rule(i).literals() {
            actual.push((lit.source, i));
        }
    }
    actual.sort();
    if actual != expected_arcs(labeling) {
        return Err(EquivError::BadLabeling("arcs do not match the labeled cycles".into()));
    }
    if labeling.size() != net.size() {
        return Err(EquivError::BadLabeling("labeling size differs from the network".into()));
    }
    Ok(())
}

fn validate_flower(net: &Network, labeling: &FamilyLabeling) -> Result<(), EquivError> {
    validate_structure(net, labeling).map_err(|e| EquivError::NotAFlower(e.to_string()))?;
    if labeling.cycle_count() < 2 {
        return Err(EquivError::NotAFlower("fewer than two petals".into()));
    }
    let center = labeling.center();
    for (k, ck) in labeling.cycles().iter().enumerate() {
        if !ck.contains(&center) {
            return Err(EquivError::NotAFlower(format!("petal {} misses the center", k + 1)));
        }
        for cl in labeling.cycles().iter().skip(k + 1) {
            let sk: BTreeSet<_> = ck.iter().collect();
            let shared: Vec<_> = cl.iter().filter(|a| sk.contains(a)).collect();
            if shared.len() != 1 {
                return Err(EquivError::NotAFlower("petals share more than the center".into()));
            }
        }
    }
    Ok(())
}

fn validate_chain(net: &Network, labeling: &FamilyLabeling) -> Result<(), EquivError> {
    validate_structure(net, labeling).map_err(|e| EquivError::NotAChain(e.to_string()))?;
    let m = labeling.cycle_count();
    if m < 2 || labeling.intersections().len() != m - 1 {
        return Err(EquivError::NotAChain("wrong number of intersections".into()));
    }
    for k in 0..m {
        let sk: BTreeSet<_> = labeling.cycle(k + 1).iter().collect();
        for l in k + 1..m {
            let shared: Vec<_> =
                labeling.cycle(l + 1).iter().filter(|a| sk.contains(a)).collect();
            let want = if l == k + 1 { 1 } else { 0 };
            if shared.len() != want {
                return Err(EquivError::NotAChain(format!(
                    "cycles {} and {} share {} automata",
                    k + 1,
                    l + 1,
                    shared.len()
                )));
            }
            if l == k + 1 && *shared[0] != labeling.intersections()[k] {
                return Err(EquivError::NotAChain("intersection labels inconsistent".into()));
            }
        }
    }
    Ok(())
}

/// Fixed points a flower must have, by class: the all-equal configurations
/// of the positive representative mapped through the conjugating flip.
fn flower_fp_prediction(net: &Network, m: usize) -> Result<Vec<Configuration>, EquivError> {
    let n = net.size();
    let total_parity = net.automata().map(|i| net.rule(i).parity()).fold(false, |a, b| a ^ b);
    let negative_class = m % 2 == 1 && total_parity;
    if negative_class {
        return Ok(Vec::new());
    }
    let s = all_positive_flip(net).ok_or_else(|| {
        EquivError::ClassDefect("positive-class flower admits no positive form".into())
    })?;
    let zero = Configuration::zero(n).negate_set(&s);
    if m % 2 == 0 {
        Ok(vec![zero])
    } else {
        let mut fps = vec![zero, Configuration::zero(n).negate_all().negate_set(&s)];
        fps.sort_by_key(|c| c.index());
        Ok(fps)
    }
}

/// Classifies a flower: single class for an even number of petals, and for
/// an odd number the flip-invariant total sign parity decides. Predictions
/// follow the stable-configuration propositions; unreachable configurations
/// are the fixed points of the reverse network, itself a flower.
pub fn classify_flower(
    net: &Network,
    labeling: &FamilyLabeling,
) -> Result<Classification, EquivError> {
    validate_flower(net, labeling)?;
    let m = labeling.cycle_count();
    let total_parity = net.automata().map(|i| net.rule(i).parity()).fold(false, |a, b| a ^ b);
    let class = if m % 2 == 1 && total_parity { FamilyClass::Negative } else { FamilyClass::Positive };
    let predicted_fixed_points = flower_fp_prediction(net, m)?;
    let predicted_unreachables = flower_fp_prediction(&net.reverse(), m)?;
    Ok(Classification { class, predicted_fixed_points, predicted_unreachables })
}

/// Fixed points a chain must have, by class: the all-positive representative
/// has the all-zero configuration, plus the expansion of the 101 pattern on
/// the intersections when the length is 1 mod 3; the conjugating flip maps
/// them onto the given network.
fn chain_fp_prediction(
    net: &Network,
    labeling: &FamilyLabeling,
) -> Result<Vec<Configuration>, EquivError> {
    let n = net.size();
    let m = labeling.cycle_count();
    let s = match all_positive_flip(net) {
        Some(s) => s,
        None => return Ok(Vec::new()), // negative class
    };
    let mut fps = vec![Configuration::zero(n).negate_set(&s)];
    if (m - 1) % 3 == 0 {
        fps.push(expand_101(net, labeling).negate_set(&s));
    }
    fps.sort_by_key(|c| c.index());
    fps.dedup();
    Ok(fps)
}

/// The 101-pattern fixed point of the all-positive chain: intersection `o_t`
/// holds 1 except when `t` is 2 mod 3, every other automaton copies the head
/// of its nude path.
fn expand_101(net: &Network, labeling: &FamilyLabeling) -> Configuration {
    let n = net.size();
    let mut cfg = Configuration::zero(n);
    let mut value: BTreeMap<AutomatonId, bool> = BTreeMap::new();
    for (t, &o) in labeling.intersections().iter().enumerate() {
        value.insert(o, (t + 1) % 3 != 2);
    }
    for i in net.automata() {
        let head = net.maximal_nude_path(i).head();
        let v = *value.get(&head).unwrap_or(&false);
        cfg = cfg.with(i, v);
    }
    cfg
}

/// Classifies a cycle chain: positive iff the all-positive representative is
/// reachable by vertex flips (always the case unless the length is 1 mod 3).
pub fn classify_chain(
    net: &Network,
    labeling: &FamilyLabeling,
) -> Result<Classification, EquivError> {
    validate_chain(net, labeling)?;
    let m = labeling.cycle_count();
    let positive = all_positive_flip(net).is_some();
    if !positive && (m - 1) % 3 != 0 {
        return Err(EquivError::ClassDefect(
            "chain of length not 1 mod 3 must be in the positive class".into(),
        ));
    }
    let class = if positive { FamilyClass::Positive } else { FamilyClass::Negative };
    Ok(Classification {
        class,
        predicted_fixed_points: chain_fp_prediction(net, labeling)?,
        predicted_unreachables: chain_fp_prediction(&net.reverse(), labeling)?,
    })
}

/// All literal-sign assignments over the structure of `net`.
pub fn sign_variants(net: &Network) -> Vec<Network> {
    let slots: Vec<(AutomatonId, usize)> = net
        .automata()
        .flat_map(|i| (0..net.rule(i).literals().len()).map(move |k| (i, k)))
        .collect();
    let mut out = Vec::with_capacity(1 << slots.len());
    for bits in 0u64..(1 << slots.len()) {
        let rules = net
            .automata()
            .map(|i| {
                let lits: Vec<SignedLiteral> = net
                    .rule(i)
                    .literals()
                    .iter()
                    .enumerate()
                    .map(|(k, l)| SignedLiteral {
                        source: l.source,
                        negated: bits >> slots.iter().position(|&(a, b)| a == i && b == k).unwrap()
                            & 1
                            == 1,
                    })
                    .collect();
                LocalRule::multiset(lits).expect("nonempty")
            })
            .collect();
        out.push(Network::new(rules).expect("same structure"));
    }
    out
}

/// Partition into behavioural-isomorphism classes; returns the indices
/// grouped by class, each led by its first representative.
pub fn isomorphism_classes(nets: &[Network]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (k, net) in nets.iter().enumerate() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = &nets[class[0]];
            if find_isomorphism(rep, net).is_some() {
                class.push(k);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![k]);
        }
    }
    classes
}

/// Spot-check that a witness conjugates one transition graph onto the other:
/// for every configuration and automaton, mapping commutes with the step.
pub fn check_atg_conjugacy(a: &Network, b: &Network, w: &IsoWitness) -> bool {
    let n = a.size();
    if n > 16 {
        return false;
    }
    for bits in 0..(1u64 << n) {
        let x = Configuration::from_bits(bits, n);
        let fx = w.map_config(&x);
        for i in a.automata() {
            if w.map_config(&a.step(i, &x)) != b.step(w.map(i), &fx) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_badc, gen_chain, gen_flower, SignClass};
    use crate::textio::parse_network;

    fn brute_fixed_points(net: &Network) -> Vec<Configuration> {
        let n = net.size();
        (0..(1u64 << n))
            .map(|b| Configuration::from_bits(b, n))
            .filter(|c| net.is_fixed_point(c))
            .collect()
    }

    #[test]
    fn identity_witness_checks() {
        let (net, _) = gen_badc(3, 3, SignClass::Mixed).unwrap();
        assert!(check_witness(&net, &net, &IsoWitness::identity(net.size())));
    }

    #[test]
    fn dual_is_isomorphic() {
        for (n1, n2) in [(2, 2), (3, 3), (1, 4)] {
            let (net, _) = gen_badc(n1, n2, SignClass::Positive).unwrap();
            let dual = net.dual();
            let w = find_isomorphism(&net, &dual).expect("dual witness");
            assert!(check_witness(&net, &dual, &w));
            assert!(check_atg_conjugacy(&net, &dual, &w));
        }
    }

    #[test]
    fn positive_and_mixed_badc_isomorphic_by_all_flip() {
        let (pos, _) = gen_badc(3, 2, SignClass::Positive).unwrap();
        let (mixed, _) = gen_badc(3, 2, SignClass::Mixed).unwrap();
        // The explicit witness: identity renaming, every state negated.
        let all: BTreeSet<AutomatonId> = pos.automata().collect();
        let w = IsoWitness { perm: IsoWitness::identity(4).perm, flips: all };
        assert!(check_witness(&pos, &mixed, &w));
        let found = find_isomorphism(&pos, &mixed).expect("search finds one too");
        assert!(check_witness(&pos, &mixed, &found));
    }

    #[test]
    fn flower_classes_are_distinct_for_odd_petals() {
        let (pos, _) = gen_flower(&[3, 3, 3], SignClass::Positive).unwrap();
        let (neg, _) = gen_flower(&[3, 3, 3], SignClass::Negative).unwrap();
        assert_eq!(find_isomorphism(&pos, &neg), None);
    }

    #[test]
    fn rewrite_steps() {
        let net = parse_network("1 : !x1 ^ !x2\n2 : x1\n").unwrap();
        let step = RewriteStep::FlipPair { rule: AutomatonId(1), sources: (AutomatonId(1), AutomatonId(2)) };
        let (out, w) = rewrite(&net, &step).unwrap();
        assert_eq!(out, parse_network("1 : x1 ^ x2\n2 : x1\n").unwrap());
        assert!(check_witness(&net, &out, &w));

        let net = parse_network("1 : !x1 ^ x2\n2 : x1\n").unwrap();
        let step = RewriteStep::SignSwap { rule: AutomatonId(1), negated: AutomatonId(1), plain: AutomatonId(2) };
        let (out, w) = rewrite(&net, &step).unwrap();
        assert_eq!(out, parse_network("1 : x1 ^ !x2\n2 : x1\n").unwrap());
        assert!(check_witness(&net, &out, &w));

        // Pattern mismatch is an error.
        let bad = RewriteStep::FlipPair { rule: AutomatonId(2), sources: (AutomatonId(1), AutomatonId(1)) };
        assert!(rewrite(&net, &bad).is_err());

        // A vertex flip on the center: all literals sourced there flip, plus
        // one literal of the center rule.
        let (badc, lab) = gen_badc(2, 2, SignClass::Positive).unwrap();
        let step = RewriteStep::VertexFlip { set: [lab.center()].into() };
        let (out, w) = rewrite(&badc, &step).unwrap();
        assert_eq!(out, parse_network("1 : !x2 ^ x3\n2 : !x1\n3 : !x1\n").unwrap());
        assert!(check_witness(&badc, &out, &w));
        assert!(check_atg_conjugacy(&badc, &out, &w));
    }

    #[test]
    fn region_flip_preserves_isomorphism() {
        let (net, lab) = gen_chain(&[3, 3, 2], None, SignClass::Negative).unwrap();
        let region = equivalence3_region(&lab).unwrap();
        let (out, w) = rewrite(&net, &RewriteStep::RegionFlip { region }).unwrap();
        assert!(check_witness(&net, &out, &w));
        assert!(check_atg_conjugacy(&net, &out, &w));
    }

    #[test]
    fn normalize_positive_net_is_identity() {
        let (net, _) = gen_chain(&[2, 2, 2], None, SignClass::Positive).unwrap();
        let (out, steps) = normalize_signs(&net);
        assert_eq!(out, net);
        assert!(steps.is_empty());
    }

    #[test]
    fn normalize_mixed_badc_reaches_positive() {
        let (net, _) = gen_badc(3, 2, SignClass::Mixed).unwrap();
        let (out, steps) = normalize_signs(&net);
        assert!(out.rules().iter().all(|r| !r.parity()), "{out:?}");
        assert_eq!(steps.len(), 1);
        // Orbit canonical form: pre-composing with any vertex flip changes
        // nothing.
        let flipped = net.flip(&[AutomatonId(2), AutomatonId(4)].into());
        assert_eq!(normalize_signs(&flipped).0, out);
    }

    #[test]
    fn normalize_negative_chain_m4_stays_negative() {
        let (net, _) = gen_chain(&[2, 2, 2, 2], None, SignClass::Negative).unwrap();
        let (out, _) = normalize_signs(&net);
        assert!(out.rules().iter().any(|r| r.parity()), "negative class must persist");
    }

    #[test]
    fn classify_flowers() {
        let (net, lab) = gen_flower(&[3, 3], SignClass::Positive).unwrap();
        let c = classify_flower(&net, &lab).unwrap();
        assert_eq!(c.class, FamilyClass::Positive);
        assert_eq!(c.predicted_fixed_points, vec![Configuration::zero(5)]);
        assert_eq!(c.predicted_fixed_points, brute_fixed_points(&net));
        assert_eq!(c.predicted_unreachables.len(), 1);

        let (net, lab) = gen_flower(&[3, 3, 3], SignClass::Positive).unwrap();
        let c = classify_flower(&net, &lab).unwrap();
        let want = vec![Configuration::zero(7), Configuration::zero(7).negate_all()];
        assert_eq!(c.predicted_fixed_points, want);
        assert_eq!(c.predicted_fixed_points, brute_fixed_points(&net));

        let (net, lab) = gen_flower(&[3, 3, 3], SignClass::Negative).unwrap();
        let c = classify_flower(&net, &lab).unwrap();
        assert_eq!(c.class, FamilyClass::Negative);
        assert!(c.predicted_fixed_points.is_empty());
        assert!(brute_fixed_points(&net).is_empty());

        // A flower rewritten by a random vertex flip classifies identically
        // up to the conjugating bijection.
        let (net2, _) = rewrite(&net, &RewriteStep::VertexFlip { set: [AutomatonId(3), AutomatonId(6)].into() }).unwrap();
        let c2 = classify_flower(&net2, &lab).unwrap();
        assert_eq!(c2.class, FamilyClass::Negative);
    }

    #[test]
    fn classify_chains() {
        let (net, lab) = gen_chain(&[2, 2, 2], None, SignClass::Positive).unwrap();
        let c = classify_chain(&net, &lab).unwrap();
        assert_eq!(c.class, FamilyClass::Positive);
        assert_eq!(c.predicted_fixed_points, vec![Configuration::zero(net.size())]);
        assert_eq!(c.predicted_fixed_points, brute_fixed_points(&net));
        assert_eq!(c.predicted_unreachables.len(), 1);

        let (net, lab) = gen_chain(&[2, 2, 2, 2], None, SignClass::Positive).unwrap();
        let c = classify_chain(&net, &lab).unwrap();
        assert_eq!(c.predicted_fixed_points.len(), 2);
        assert_eq!(c.predicted_fixed_points, brute_fixed_points(&net));

        let (net, lab) = gen_chain(&[2, 2, 2, 2], None, SignClass::Negative).unwrap();
        let c = classify_chain(&net, &lab).unwrap();
        assert_eq!(c.class, FamilyClass::Negative);
        assert!(c.predicted_fixed_points.is_empty());
        assert!(brute_fixed_points(&net).is_empty());
    }

    #[test]
    fn symbolic_fixed_points_match_brute_force() {
        let trivial = parse_network("1 : x1\n2 : x2\n3 : x3\n").unwrap();
        assert_eq!(fixed_points_symbolic(&trivial).len(), 8);

        for net in [
            gen_flower(&[3, 3], SignClass::Positive).unwrap().0,
            gen_flower(&[2, 2, 3], SignClass::Negative).unwrap().0,
            gen_chain(&[2, 2, 2, 2], None, SignClass::Positive).unwrap().0,
            gen_badc(1, 4, SignClass::Mixed).unwrap().0,
            parse_network("1 : !x3\n2 : x1\n3 : x2\n").unwrap(), // negative cycle
            parse_network("1 : x3\n2 : x1\n3 : x2\n").unwrap(),  // positive cycle
        ] {
            let mut brute = brute_fixed_points(&net);
            brute.sort_by_key(|c| c.index());
            assert_eq!(fixed_points_symbolic(&net), brute);
        }
    }

    #[test]
    fn fixed_point_bound() {
        for seed in 0..40u64 {
            let (net, _) = crate::families::gen_random_cactus(seed, 10, 3).unwrap();
            let k = intersection_count(&net);
            let fps = fixed_points_symbolic(&net);
            assert!(fps.len() <= 1 << k, "seed {seed}: {} > 2^{k}", fps.len());
            let brute = brute_fixed_points(&net);
            assert_eq!(fps.len(), brute.len(), "seed {seed}");
        }
        // The trivial network attains the bound.
        let trivial = parse_network("1 : x1\n2 : x2\n").unwrap();
        assert!(trivial.contraction().is_trivial());
        assert_eq!(fixed_points_symbolic(&trivial).len(), 4);
    }

    #[test]
    fn witness_composition_behaves_like_an_equivalence() {
        let (a, _) = gen_badc(2, 3, SignClass::Positive).unwrap();
        let b = a.dual();
        let c = b.canonical();
        let wab = find_isomorphism(&a, &b).unwrap();
        let wbc = find_isomorphism(&b, &c).unwrap();
        // Compose: automaton map composes, flips transport through the first
        // permutation.
        let perm: Vec<AutomatonId> = a.automata().map(|i| wbc.map(wab.map(i))).collect();
        let mut flips = BTreeSet::new();
        for i in a.automata() {
            if wab.flips.contains(&i) ^ wbc.flips.contains(&wab.map(i)) {
                flips.insert(i);
            }
        }
        let wac = IsoWitness { perm, flips };
        assert!(check_witness(&a, &c, &wac));
        // Symmetry: invert.
        let mut inv_perm = vec![AutomatonId(0); a.size()];
        for i in a.automata() {
            inv_perm[wab.map(i).idx()] = i;
        }
        let inv_flips: BTreeSet<AutomatonId> = wab.flips.iter().map(|&i| wab.map(i)).collect();
        let wba = IsoWitness { perm: inv_perm, flips: inv_flips };
        assert!(check_witness(&b, &a, &wba));
    }
}
