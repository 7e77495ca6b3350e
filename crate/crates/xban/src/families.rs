//! Deterministic generators for the named network families: double cycles,
//! flowers, cycle chains, and random strongly connected cactus networks for
//! corpus testing.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::net::{AutomatonId, Configuration, LocalRule, Network, SignedLiteral};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("cycle sizes must be positive")]
    ZeroSize,
    #[error("a double cycle needs at least one cycle of size 2")]
    BothSizeOne,
    #[error("a flower or chain needs at least two cycles")]
    TooFewCycles,
    #[error("at most one cycle of size 1 can share the same automaton")]
    DuplicateSelfLoop,
    #[error("sign class {0} is not defined for this family")]
    BadClass(&'static str),
    #[error("offset {offset} is invalid for cycle {cycle} of size {size}")]
    BadOffset { cycle: usize, offset: usize, size: usize },
    #[error("consecutive intersections of cycle {cycle} coincide")]
    OverlappingIntersections { cycle: usize },
    #[error("cannot fit {cycles} cycles within {n_max} automata")]
    Infeasible { cycles: usize, n_max: usize },
}

/// Sign class of a generated family.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SignClass {
    /// All arcs positive.
    Positive,
    /// Double cycles: both center literals negated. Flowers and chains: one
    /// designated negative arc (the class representative of the proofs).
    Negative,
    /// Double cycles only: exactly one center literal negated.
    Mixed,
}

/// Maps cycle coordinates `(cycle k, position j)`, both 1-based, onto
/// automaton ids. Intersection automata appear under every coordinate that
/// names them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyLabeling {
    cycles: Vec<Vec<AutomatonId>>,
    intersections: Vec<AutomatonId>,
}

impl FamilyLabeling {
    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycle(&self, k: usize) -> &[AutomatonId] {
        &self.cycles[k - 1]
    }

    pub fn cycles(&self) -> &[Vec<AutomatonId>] {
        &self.cycles
    }

    /// Automaton `i^k_j`.
    pub fn id(&self, k: usize, j: usize) -> AutomatonId {
        self.cycles[k - 1][j - 1]
    }

    /// Every coordinate naming `id`, in cycle order.
    pub fn coords(&self, id: AutomatonId) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, cyc) in self.cycles.iter().enumerate() {
            for (j, &a) in cyc.iter().enumerate() {
                if a == id {
                    out.push((k + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn intersections(&self) -> &[AutomatonId] {
        &self.intersections
    }

    /// The unique intersection automaton of a double cycle or flower.
    pub fn center(&self) -> AutomatonId {
        self.intersections[0]
    }

    pub fn size(&self) -> usize {
        let mut seen = BTreeSet::new();
        for cyc in &self.cycles {
            seen.extend(cyc.iter().copied());
        }
        seen.len()
    }

    /// Configuration from per-cycle bit strings in the cycle-vector notation;
    /// shared positions must agree.
    pub fn config_from_cycle_vectors(&self, vectors: &[&str]) -> Result<Configuration, String> {
        if vectors.len() != self.cycles.len() {
            return Err(format!(
                "expected {} cycle vectors, got {}",
                self.cycles.len(),
                vectors.len()
            ));
        }
        let mut values: BTreeMap<AutomatonId, bool> = BTreeMap::new();
        for (k, (cyc, vec)) in self.cycles.iter().zip(vectors).enumerate() {
            let bits: Vec<bool> = vec
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(format!("invalid bit {other:?}")),
                })
                .collect::<Result<_, _>>()?;
            if bits.len() != cyc.len() {
                return Err(format!(
                    "cycle {} has {} automata but vector {vec:?} has {} bits",
                    k + 1,
                    cyc.len(),
                    bits.len()
                ));
            }
            for (&a, &b) in cyc.iter().zip(&bits) {
                if let Some(&prev) = values.get(&a) {
                    if prev != b {
                        return Err(format!("conflicting values for shared automaton {a}"));
                    }
                }
                values.insert(a, b);
            }
        }
        let n = self.size();
        let mut cfg = Configuration::zero(n);
        for (a, b) in values {
            cfg = cfg.with(a, b);
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, cyc) in self.cycles.iter().enumerate() {
            for (j, a) in cyc.iter().enumerate() {
                map.insert(format!("{}:{}", k + 1, j + 1), serde_json::json!(a.0));
            }
        }
        serde_json::json!({
            "cycles": self.cycles.iter().map(|c| c.iter().map(|a| a.0).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "intersections": self.intersections.iter().map(|a| a.0).collect::<Vec<_>>(),
            "positions": map,
        })
    }
}

/// Incremental rule table keyed by automaton id.
struct Builder {
    literals: BTreeMap<u32, Vec<SignedLiteral>>,
    next: u32,
}

impl Builder {
    fn new() -> Self {
        Builder { literals: BTreeMap::new(), next: 1 }
    }

    fn fresh(&mut self) -> AutomatonId {
        let id = AutomatonId(self.next);
        self.next += 1;
        self.literals.insert(id.0, Vec::new());
        id
    }

    fn add_arc(&mut self, from: AutomatonId, to: AutomatonId, negated: bool) -> Result<(), FamilyError> {
        let lits = self.literals.get_mut(&to.0).expect("target allocated");
        if lits.iter().any(|l| l.source == from) {
            return Err(FamilyError::DuplicateSelfLoop);
        }
        lits.push(SignedLiteral { source: from, negated });
        Ok(())
    }

    /// Adds the arcs of a cycle given as an automaton sequence in position
    /// order, each arc carrying the sign of its head literal.
    fn add_cycle(&mut self, automata: &[AutomatonId], signs: &[bool]) -> Result<(), FamilyError> {
        let n = automata.len();
        for j in 0..n {
            let from = automata[(j + n - 1) % n];
            self.add_arc(from, automata[j], signs[j])?;
        }
        Ok(())
    }

    fn build(self) -> Network {
        let rules = self
            .literals
            .into_values()
            .map(|lits| LocalRule::new(lits).expect("generator produced a valid rule"))
            .collect();
        Network::new(rules).expect("generator produced a valid network")
    }
}

/// Double cycle of sizes `(n1, n2)`: two cycles sharing the single center
/// automaton `o`, numbered center first, then cycle 1, then cycle 2.
/// Size is `n1 + n2 - 1`.
pub fn gen_badc(
    n1: usize,
    n2: usize,
    class: SignClass,
) -> Result<(Network, FamilyLabeling), FamilyError> {
    if n1 == 0 || n2 == 0 {
        return Err(FamilyError::ZeroSize);
    }
    if n1 == 1 && n2 == 1 {
        return Err(FamilyError::BothSizeOne);
    }
    let (c1_sign, c2_sign) = match class {
        SignClass::Positive => (false, false),
        SignClass::Negative => (true, true),
        SignClass::Mixed => (true, false),
    };
    let mut b = Builder::new();
    let o = b.fresh();
    let mut cycle1 = vec![o];
    for _ in 1..n1 {
        cycle1.push(b.fresh());
    }
    let mut cycle2 = vec![o];
    for _ in 1..n2 {
        cycle2.push(b.fresh());
    }
    let mut s1 = vec![false; n1];
    s1[0] = c1_sign;
    let mut s2 = vec![false; n2];
    s2[0] = c2_sign;
    b.add_cycle(&cycle1, &s1)?;
    b.add_cycle(&cycle2, &s2)?;
    let net = b.build();
    let labeling = FamilyLabeling { cycles: vec![cycle1, cycle2], intersections: vec![o] };
    Ok((net, labeling))
}

/// Flower with `m = sizes.len()` petals sharing the single center automaton.
/// `Negative` puts exactly one negative literal on the center rule.
pub fn gen_flower(
    sizes: &[usize],
    class: SignClass,
) -> Result<(Network, FamilyLabeling), FamilyError> {
    if sizes.len() < 2 {
        return Err(FamilyError::TooFewCycles);
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(FamilyError::ZeroSize);
    }
    if matches!(class, SignClass::Mixed) {
        return Err(FamilyError::BadClass("mixed"));
    }
    let mut b = Builder::new();
    let o = b.fresh();
    let mut cycles = Vec::new();
    for (k, &nk) in sizes.iter().enumerate() {
        let mut cyc = vec![o];
        for _ in 1..nk {
            cyc.push(b.fresh());
        }
        let mut signs = vec![false; nk];
        if k == 0 && class == SignClass::Negative {
            signs[0] = true;
        }
        b.add_cycle(&cyc, &signs)?;
        cycles.push(cyc);
    }
    let net = b.build();
    Ok((net, FamilyLabeling { cycles, intersections: vec![o] }))
}

/// Cycle chain `C_1 .. C_m` where `C_k` meets `C_{k+1}` at the single
/// automaton `o_k = i^k_1 = i^{k+1}_{offsets[k-1]}`. Defaults put each
/// intersection at the last position of the next cycle. `Negative` negates
/// the arc of `o_1` coming from cycle 1.
pub fn gen_chain(
    sizes: &[usize],
    offsets: Option<&[usize]>,
    class: SignClass,
) -> Result<(Network, FamilyLabeling), FamilyError> {
    let m = sizes.len();
    if m < 2 {
        return Err(FamilyError::TooFewCycles);
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(FamilyError::ZeroSize);
    }
    if matches!(class, SignClass::Mixed) {
        return Err(FamilyError::BadClass("mixed"));
    }
    let default_offsets: Vec<usize> = sizes[1..].to_vec();
    let offsets = offsets.unwrap_or(&default_offsets);
    assert_eq!(offsets.len(), m - 1, "one offset per intersection");
    for (k, &l) in offsets.iter().enumerate() {
        let host = k + 2; // cycle the offset indexes into
        if l < 1 || l > sizes[host - 1] {
            return Err(FamilyError::BadOffset { cycle: host, offset: l, size: sizes[host - 1] });
        }
        // Interior cycles carry o_{k+1} at position 1; the two intersections
        // must not coincide.
        if host < m && l == 1 {
            return Err(FamilyError::OverlappingIntersections { cycle: host });
        }
    }

    let mut b = Builder::new();
    // Allocate cycle 1 completely, then each next cycle around its shared
    // position.
    let mut cycles: Vec<Vec<AutomatonId>> = Vec::with_capacity(m);
    let mut intersections = Vec::with_capacity(m - 1);
    let o1 = b.fresh();
    let mut c1 = vec![o1];
    for _ in 1..sizes[0] {
        c1.push(b.fresh());
    }
    cycles.push(c1);
    intersections.push(o1);
    for k in 2..=m {
        let shared = intersections[k - 2]; // o_{k-1}, sits at position offsets[k-2]
        let pos = offsets[k - 2];
        let mut cyc = Vec::with_capacity(sizes[k - 1]);
        for j in 1..=sizes[k - 1] {
            if j == pos {
                cyc.push(shared);
            } else {
                cyc.push(b.fresh());
            }
        }
        if k < m {
            intersections.push(cyc[0]);
        }
        cycles.push(cyc);
    }
    for (k, cyc) in cycles.iter().enumerate() {
        let mut signs = vec![false; cyc.len()];
        if k == 0 && class == SignClass::Negative {
            signs[0] = true;
        }
        b.add_cycle(cyc, &signs)?;
    }
    let net = b.build();
    Ok((net, FamilyLabeling { cycles, intersections }))
}

/// Random strongly connected cactus: a first cycle, then cycles attached at
/// single existing automata, with random arc signs. Deterministic in `seed`.
pub fn gen_random_cactus(
    seed: u64,
    n_max: usize,
    cycle_count: usize,
) -> Result<(Network, FamilyLabeling), FamilyError> {
    if cycle_count == 0 || n_max < 2 {
        return Err(FamilyError::Infeasible { cycles: cycle_count, n_max });
    }
    // Every extra cycle needs at least one fresh automaton unless it is a
    // self-loop; demanding one fresh automaton per cycle keeps this simple.
    if n_max < 1 + cycle_count {
        return Err(FamilyError::Infeasible { cycles: cycle_count, n_max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new();
    let mut cycles: Vec<Vec<AutomatonId>> = Vec::new();
    let mut intersections: Vec<AutomatonId> = Vec::new();

    let budget = n_max - (cycle_count - 1); // leave room for later cycles
    let first_len = rng.gen_range(2..=budget.min(5).max(2));
    let mut first = Vec::new();
    for _ in 0..first_len {
        first.push(b.fresh());
    }
    let mut n = first_len;
    add_random_cycle(&mut b, &mut rng, &first)?;
    cycles.push(first);

    for c in 1..cycle_count {
        let remaining_cycles = cycle_count - c - 1;
        let room = n_max - n - remaining_cycles;
        debug_assert!(room >= 1);
        let extra = rng.gen_range(1..=room.min(4));
        let attach = AutomatonId(rng.gen_range(1..=n as u32));
        let mut cyc = vec![attach];
        for _ in 0..extra {
            cyc.push(b.fresh());
        }
        n += extra;
        add_random_cycle(&mut b, &mut rng, &cyc)?;
        intersections.push(attach);
        cycles.push(cyc);
    }
    let net = b.build();
    debug_assert!(net.strongly_connected());
    Ok((net, FamilyLabeling { cycles, intersections }))
}

fn add_random_cycle(
    b: &mut Builder,
    rng: &mut ChaCha8Rng,
    cyc: &[AutomatonId],
) -> Result<(), FamilyError> {
    let signs: Vec<bool> = (0..cyc.len()).map(|_| rng.gen_bool(0.5)).collect();
    b.add_cycle(cyc, &signs)
}

/// Structural family of a strongly connected cactus network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    DoubleCycle,
    Flower,
    Chain,
}

/// Recognises the named families from the interaction structure alone and
/// rebuilds a labeling. Returns None for anything else (non-cactus, single
/// cycles, branching cactus trees).
pub fn detect_family(net: &Network) -> Option<(Family, FamilyLabeling)> {
    if !net.strongly_connected() {
        return None;
    }
    let cycles = simple_cycles(net, 10_000);
    let arc_count: usize = net.automata().map(|i| net.rule(i).literals().len()).sum();
    if cycles.len() < 2 || cycles.iter().map(|c| c.len()).sum::<usize>() != arc_count {
        return None; // arcs must partition into the simple cycles
    }
    let sets: Vec<BTreeSet<AutomatonId>> =
        cycles.iter().map(|c| c.iter().copied().collect()).collect();
    let m = cycles.len();
    let shared = |a: usize, b: usize| sets[a].intersection(&sets[b]).count();

    // Flower: every pair meets at one common automaton.
    let common: Vec<AutomatonId> = sets
        .iter()
        .skip(1)
        .fold(sets[0].clone(), |acc, s| acc.intersection(s).copied().collect())
        .into_iter()
        .collect();
    if common.len() == 1 && (0..m).all(|a| (a + 1..m).all(|b| shared(a, b) == 1)) {
        let center = common[0];
        let petals: Vec<Vec<AutomatonId>> =
            cycles.iter().map(|c| rotate_cycle(c, center)).collect();
        let labeling = FamilyLabeling { cycles: petals, intersections: vec![center] };
        let family = if m == 2 { Family::DoubleCycle } else { Family::Flower };
        return Some((family, labeling));
    }

    // Chain: the cycle-intersection graph is a path.
    let mut deg = vec![0usize; m];
    for a in 0..m {
        for b in a + 1..m {
            match shared(a, b) {
                0 => {}
                1 => {
                    deg[a] += 1;
                    deg[b] += 1;
                }
                _ => return None,
            }
        }
    }
    let ends: Vec<usize> = (0..m).filter(|&a| deg[a] == 1).collect();
    if ends.len() != 2 || deg.iter().any(|&d| d > 2) {
        return None;
    }
    // Walk the path from the end whose cycle holds the smallest automaton.
    let start = *ends
        .iter()
        .min_by_key(|&&a| sets[a].iter().next().copied())
        .unwrap();
    let mut order = vec![start];
    let mut prev = usize::MAX;
    while order.len() < m {
        let cur = *order.last().unwrap();
        let next = (0..m)
            .find(|&b| b != cur && b != prev && shared(cur, b) == 1 && !order.contains(&b))?;
        prev = cur;
        order.push(next);
    }
    let mut intersections = Vec::new();
    for w in order.windows(2) {
        let o = *sets[w[0]].intersection(&sets[w[1]]).next().unwrap();
        intersections.push(o);
    }
    let ordered: Vec<Vec<AutomatonId>> = order
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            // Rotate interior and first cycles so position 1 is their forward
            // intersection, matching the generator convention.
            if k < m - 1 {
                rotate_cycle(&cycles[c], intersections[k])
            } else {
                cycles[c].clone()
            }
        })
        .collect();
    Some((Family::Chain, FamilyLabeling { cycles: ordered, intersections }))
}

fn rotate_cycle(cycle: &[AutomatonId], start: AutomatonId) -> Vec<AutomatonId> {
    let pos = cycle.iter().position(|&a| a == start).expect("member");
    let mut out = Vec::with_capacity(cycle.len());
    out.extend_from_slice(&cycle[pos..]);
    out.extend_from_slice(&cycle[..pos]);
    out
}

/// Simple cycles of the interaction graph, each reported once, rooted at its
/// smallest automaton. Enumeration stops after `cap` cycles.
pub fn simple_cycles(net: &Network, cap: usize) -> Vec<Vec<AutomatonId>> {
    let n = net.size();
    let out_adj: Vec<Vec<usize>> = net
        .automata()
        .map(|i| net.out_neighbors(i).iter().map(|j| j.idx()).collect())
        .collect();
    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    let mut on_path = vec![false; n];

    fn dfs(
        u: usize,
        root: usize,
        out_adj: &[Vec<usize>],
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        cycles: &mut Vec<Vec<AutomatonId>>,
        cap: usize,
    ) {
        if cycles.len() >= cap {
            return;
        }
        for &v in &out_adj[u] {
            if v == root {
                cycles.push(path.iter().map(|&w| AutomatonId::from_idx(w)).collect());
                if cycles.len() >= cap {
                    return;
                }
            } else if v > root && !on_path[v] {
                path.push(v);
                on_path[v] = true;
                dfs(v, root, out_adj, path, on_path, cycles, cap);
                on_path[v] = false;
                path.pop();
            }
        }
    }

    for root in 0..n {
        path.clear();
        path.push(root);
        on_path.fill(false);
        on_path[root] = true;
        dfs(root, root, &out_adj, &mut path, &mut on_path, &mut cycles, cap);
        if cycles.len() >= cap {
            break;
        }
    }
    cycles
}

/// True when any two simple cycles of the interaction graph share at most one
/// automaton. `cap` bounds the enumeration; networks hitting the cap fail.
pub fn is_cactus(net: &Network, cap: usize) -> bool {
    let cycles = simple_cycles(net, cap);
    if cycles.len() >= cap {
        return false;
    }
    for (a, ca) in cycles.iter().enumerate() {
        let sa: BTreeSet<_> = ca.iter().collect();
        for cb in cycles.iter().skip(a + 1) {
            let shared = cb.iter().filter(|x| sa.contains(x)).count();
            if shared > 1 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{emit_network, parse_network};

    #[test]
    fn badc_12_positive_matches_figure() {
        let (net, lab) = gen_badc(1, 2, SignClass::Positive).unwrap();
        assert_eq!(net, parse_network("1 : x1 ^ x2\n2 : x1\n").unwrap());
        assert_eq!(lab.center(), AutomatonId(1));
        assert_eq!(net.size(), 1 + 2 - 1);
    }

    #[test]
    fn badc_22_positive_layout() {
        let (net, lab) = gen_badc(2, 2, SignClass::Positive).unwrap();
        assert_eq!(net, parse_network("1 : x2 ^ x3\n2 : x1\n3 : x1\n").unwrap());
        assert_eq!(lab.id(1, 2), AutomatonId(2));
        assert_eq!(lab.id(2, 2), AutomatonId(3));
        assert_eq!(net.size(), 2 + 2 - 1);
    }

    #[test]
    fn badc_classes() {
        let (neg, _) = gen_badc(2, 2, SignClass::Negative).unwrap();
        assert_eq!(neg, parse_network("1 : !x2 ^ !x3\n2 : x1\n3 : x1\n").unwrap());
        let (mixed, _) = gen_badc(2, 2, SignClass::Mixed).unwrap();
        assert_eq!(mixed, parse_network("1 : !x2 ^ x3\n2 : x1\n3 : x1\n").unwrap());
        assert_eq!(gen_badc(1, 1, SignClass::Positive), Err(FamilyError::BothSizeOne));
    }

    #[test]
    fn flower_two_petals_is_badc() {
        let (f, _) = gen_flower(&[3, 4], SignClass::Positive).unwrap();
        let (b, _) = gen_badc(3, 4, SignClass::Positive).unwrap();
        assert_eq!(f, b);
        let (f, _) = gen_flower(&[3, 3, 3], SignClass::Positive).unwrap();
        assert_eq!(f.size(), 9 - 2);
        assert!(gen_flower(&[3], SignClass::Positive).is_err());
        assert_eq!(
            gen_flower(&[1, 1, 3], SignClass::Positive),
            Err(FamilyError::DuplicateSelfLoop)
        );
    }

    #[test]
    fn chain_m2_is_badc() {
        let (c, _) = gen_chain(&[3, 4], None, SignClass::Positive).unwrap();
        let (b, _) = gen_badc(3, 4, SignClass::Positive).unwrap();
        assert_eq!(c, b);
    }

    #[test]
    fn chain_structure() {
        let (net, lab) = gen_chain(&[2, 2, 2, 2], None, SignClass::Positive).unwrap();
        assert_eq!(net.size(), 8 - 3);
        assert_eq!(lab.intersections().len(), 3);
        // Every intersection automaton has exactly two influencers.
        for &o in lab.intersections() {
            assert_eq!(net.influencers(o).len(), 2, "{}", emit_network(&net));
        }
        assert!(net.strongly_connected());
        assert!(is_cactus(&net, 1000));
        // Offset 1 on an interior cycle collapses two intersections.
        assert_eq!(
            gen_chain(&[2, 2, 2], Some(&[1, 2]), SignClass::Positive),
            Err(FamilyError::OverlappingIntersections { cycle: 2 })
        );
    }

    #[test]
    fn labeling_round_trip() {
        let (_, lab) = gen_chain(&[3, 3, 2], None, SignClass::Positive).unwrap();
        for k in 1..=lab.cycle_count() {
            for j in 1..=lab.cycle(k).len() {
                let id = lab.id(k, j);
                assert!(lab.coords(id).contains(&(k, j)));
            }
        }
        let ids: BTreeSet<_> = lab.cycles().iter().flatten().collect();
        assert_eq!(ids.len(), lab.size());
    }

    #[test]
    fn cycle_vector_notation() {
        let (_, lab) = gen_badc(4, 4, SignClass::Positive).unwrap();
        let x = lab.config_from_cycle_vectors(&["0000", "0001"]).unwrap();
        assert_eq!(x.to_string(), "0000001");
        assert!(lab.config_from_cycle_vectors(&["1000", "0001"]).is_err());
    }

    #[test]
    fn random_cactus_deterministic_and_valid() {
        let (a, _) = gen_random_cactus(7, 10, 3).unwrap();
        let (b, _) = gen_random_cactus(7, 10, 3).unwrap();
        assert_eq!(a, b);
        for seed in 0..30 {
            let (net, _) = gen_random_cactus(seed, 9, 3).unwrap();
            assert!(net.strongly_connected());
            assert!(is_cactus(&net, 10_000), "seed {seed}");
            assert!(net.size() <= 9);
        }
    }

    #[test]
    fn detect_family_round_trips() {
        let (net, lab) = gen_badc(3, 4, SignClass::Mixed).unwrap();
        let (fam, det) = detect_family(&net).unwrap();
        assert_eq!(fam, Family::DoubleCycle);
        assert_eq!(det.center(), lab.center());

        let (net, lab) = gen_flower(&[3, 2, 4], SignClass::Negative).unwrap();
        let (fam, det) = detect_family(&net).unwrap();
        assert_eq!(fam, Family::Flower);
        assert_eq!(det.center(), lab.center());
        assert_eq!(det.cycle_count(), 3);

        let (net, lab) = gen_chain(&[3, 2, 2, 3], None, SignClass::Positive).unwrap();
        let (fam, det) = detect_family(&net).unwrap();
        assert_eq!(fam, Family::Chain);
        assert_eq!(det.intersections(), lab.intersections());
        // The detected labeling must satisfy the chain classifier.
        assert!(crate::equiv::classify_chain(&net, &det).is_ok());

        // A pure cycle is none of the families.
        let cyc = crate::textio::parse_network("1 : x3\n2 : x1\n3 : x2\n").unwrap();
        assert_eq!(detect_family(&cyc), None);
    }

    #[test]
    fn generated_families_strongly_connected() {
        for (n1, n2) in [(1usize, 2usize), (2, 2), (3, 3), (1, 4), (3, 5)] {
            let (net, _) = gen_badc(n1, n2, SignClass::Positive).unwrap();
            assert!(net.strongly_connected());
        }
        let (f, _) = gen_flower(&[2, 3, 4], SignClass::Negative).unwrap();
        assert!(f.strongly_connected());
        let (c, _) = gen_chain(&[3, 2, 4], None, SignClass::Negative).unwrap();
        assert!(c.strongly_connected());
    }
}
