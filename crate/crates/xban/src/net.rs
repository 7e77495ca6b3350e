//! Static model of a xor Boolean automata network: local rules over signed
//! literals, configurations, update semantics, structural queries (influencers,
//! nude paths) and the sign-relocating network transforms (dual, reverse,
//! canonical, vertex flip, contraction).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// 1-based automaton index, contiguous `1..=n` for a network of size `n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct AutomatonId(pub u32);

impl AutomatonId {
    /// Zero-based position, for indexing into per-automaton tables.
    pub fn idx(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn from_idx(idx: usize) -> Self {
        AutomatonId(idx as u32 + 1)
    }
}

impl fmt::Display for AutomatonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for AutomatonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A possibly negated occurrence of an automaton's state in a rule.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SignedLiteral {
    pub source: AutomatonId,
    pub negated: bool,
}

impl SignedLiteral {
    pub fn pos(source: AutomatonId) -> Self {
        SignedLiteral { source, negated: false }
    }

    pub fn neg(source: AutomatonId) -> Self {
        SignedLiteral { source, negated: true }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("rule {rule} has no literals; constant local functions are not allowed")]
    EmptyRule { rule: u32 },
    #[error("rule {rule} mentions automaton {src} more than once")]
    DuplicateSource { rule: u32, src: u32 },
    #[error("rule {rule} refers to automaton {src}, but the network has size {size}")]
    SourceOutOfRange { rule: u32, src: u32, size: usize },
    #[error("automaton index {index} out of range for size {size}")]
    IndexOutOfRange { index: u32, size: usize },
    #[error("configuration has {got} bits, network has size {want}")]
    WidthMismatch { got: usize, want: usize },
}

/// A local transition function: xor over signed literals.
///
/// Literals are kept sorted by source. Duplicate sources are rejected by
/// [`LocalRule::new`]; `x ^ x` cancellation is never applied silently, so the
/// influencer set stays equal to the literal sources. Contraction results may
/// legitimately repeat a source and use the multiset constructor instead.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalRule {
    literals: Vec<SignedLiteral>,
}

impl LocalRule {
    pub fn new(mut literals: Vec<SignedLiteral>) -> Result<Self, NetError> {
        if literals.is_empty() {
            return Err(NetError::EmptyRule { rule: 0 });
        }
        literals.sort();
        for pair in literals.windows(2) {
            if pair[0].source == pair[1].source {
                return Err(NetError::DuplicateSource { rule: 0, src: pair[0].source.0 });
            }
        }
        Ok(LocalRule { literals })
    }

    /// Multiset rule, used by [`Network::contraction`] where substitution can
    /// make two literals land on the same source.
    pub fn multiset(mut literals: Vec<SignedLiteral>) -> Result<Self, NetError> {
        if literals.is_empty() {
            return Err(NetError::EmptyRule { rule: 0 });
        }
        literals.sort();
        Ok(LocalRule { literals })
    }

    pub fn literals(&self) -> &[SignedLiteral] {
        &self.literals
    }

    /// Distinct sources, in increasing order.
    pub fn sources(&self) -> Vec<AutomatonId> {
        let mut out: Vec<AutomatonId> = self.literals.iter().map(|l| l.source).collect();
        out.dedup();
        out
    }

    /// Number of negated literals modulo 2. Two rules with equal source
    /// multisets and equal parity compute the same function.
    pub fn parity(&self) -> bool {
        self.literals.iter().filter(|l| l.negated).count() % 2 == 1
    }

    /// Semantic key: (source multiset, negation parity).
    pub fn semantics(&self) -> (Vec<AutomatonId>, bool) {
        (self.literals.iter().map(|l| l.source).collect(), self.parity())
    }

    /// Flip the sign of the literal with the smallest source. This is the
    /// deterministic way output negation is materialised on a xor rule.
    fn negate_output(&mut self) {
        self.literals[0].negated = !self.literals[0].negated;
    }

    fn flip_sources_in(&mut self, set: &BTreeSet<AutomatonId>) {
        for lit in &mut self.literals {
            if set.contains(&lit.source) {
                lit.negated = !lit.negated;
            }
        }
    }
}

/// Global Boolean state, one bit per automaton; bit `k-1` is automaton `k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    bits: u64,
    len: u8,
}

impl Configuration {
    pub fn zero(len: usize) -> Self {
        assert!(len <= 64);
        Configuration { bits: 0, len: len as u8 }
    }

    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Configuration { bits: bits & mask, len: len as u8 }
    }

    /// Parse a string of '0'/'1' characters, character `k` = automaton `k+1`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut bits = 0u64;
        let mut len = 0usize;
        for ch in text.chars() {
            match ch {
                '0' => {}
                '1' => bits |= 1u64 << len,
                _ => return Err(format!("invalid configuration character {ch:?}")),
            }
            len += 1;
            if len > 64 {
                return Err("configuration longer than 64 bits".to_string());
            }
        }
        if len == 0 {
            return Err("empty configuration".to_string());
        }
        Ok(Configuration { bits, len: len as u8 })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: AutomatonId) -> bool {
        (self.bits >> i.idx()) & 1 == 1
    }

    pub fn with(&self, i: AutomatonId, value: bool) -> Self {
        let mut c = *self;
        if value {
            c.bits |= 1u64 << i.idx();
        } else {
            c.bits &= !(1u64 << i.idx());
        }
        c
    }

    /// The configuration with automaton `i` negated.
    pub fn negate_one(&self, i: AutomatonId) -> Self {
        let mut c = *self;
        c.bits ^= 1u64 << i.idx();
        c
    }

    /// The configuration with every automaton of `set` negated.
    pub fn negate_set(&self, set: &BTreeSet<AutomatonId>) -> Self {
        let mut c = *self;
        for &i in set {
            c.bits ^= 1u64 << i.idx();
        }
        c
    }

    pub fn negate_all(&self) -> Self {
        let mask = if self.len == 64 { u64::MAX } else { (1u64 << self.len) - 1 };
        Configuration { bits: self.bits ^ mask, len: self.len }
    }

    pub fn ones(&self) -> impl Iterator<Item = AutomatonId> + '_ {
        (0..self.len()).filter(|&k| (self.bits >> k) & 1 == 1).map(AutomatonId::from_idx)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            write!(f, "{}", (self.bits >> k) & 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A sequence of automata `i_0 .. i_k` where every automaton after the first
/// has its predecessor as unique influencer; `sign` is the parity of negated
/// arcs along the sequence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NudePath {
    pub automata: Vec<AutomatonId>,
    pub sign: bool,
}

impl NudePath {
    /// Number of arcs; a lone automaton has length 0.
    pub fn len(&self) -> usize {
        self.automata.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn head(&self) -> AutomatonId {
        self.automata[0]
    }

    pub fn end(&self) -> AutomatonId {
        *self.automata.last().unwrap()
    }
}

/// A xor Boolean automata network, described entirely by its local rules.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Network {
    rules: Vec<LocalRule>,
}

impl Network {
    pub fn new(rules: Vec<LocalRule>) -> Result<Self, NetError> {
        let size = rules.len();
        for (k, rule) in rules.iter().enumerate() {
            let id = k as u32 + 1;
            if rule.literals().is_empty() {
                return Err(NetError::EmptyRule { rule: id });
            }
            for lit in rule.literals() {
                if lit.source.0 < 1 || lit.source.idx() >= size {
                    return Err(NetError::SourceOutOfRange {
                        rule: id,
                        src: lit.source.0,
                        size,
                    });
                }
            }
        }
        Ok(Network { rules })
    }

    pub fn size(&self) -> usize {
        self.rules.len()
    }

    pub fn automata(&self) -> impl Iterator<Item = AutomatonId> {
        (1..=self.rules.len() as u32).map(AutomatonId)
    }

    pub fn rule(&self, i: AutomatonId) -> &LocalRule {
        &self.rules[i.idx()]
    }

    pub fn rules(&self) -> &[LocalRule] {
        &self.rules
    }

    fn check_id(&self, i: AutomatonId) -> Result<(), NetError> {
        if i.0 < 1 || i.idx() >= self.size() {
            return Err(NetError::IndexOutOfRange { index: i.0, size: self.size() });
        }
        Ok(())
    }

    fn check_config(&self, x: &Configuration) -> Result<(), NetError> {
        if x.len() != self.size() {
            return Err(NetError::WidthMismatch { got: x.len(), want: self.size() });
        }
        Ok(())
    }

    /// Value of the local function `f_i` in configuration `x`.
    pub fn eval_local(&self, i: AutomatonId, x: &Configuration) -> bool {
        let mut acc = false;
        for lit in self.rules[i.idx()].literals() {
            acc ^= x.get(lit.source) ^ lit.negated;
        }
        acc
    }

    /// Checked variant of [`Network::eval_local`], for untrusted indices.
    pub fn try_eval_local(&self, i: AutomatonId, x: &Configuration) -> Result<bool, NetError> {
        self.check_id(i)?;
        self.check_config(x)?;
        Ok(self.eval_local(i, x))
    }

    /// Simultaneous update of all automata of `w`, every rule evaluated on the
    /// same pre-state `x`.
    pub fn apply_update(&self, w: &BTreeSet<AutomatonId>, x: &Configuration) -> Configuration {
        let mut out = *x;
        for &i in w {
            out = out.with(i, self.eval_local(i, x));
        }
        out
    }

    /// Asynchronous step: update the single automaton `i`.
    pub fn step(&self, i: AutomatonId, x: &Configuration) -> Configuration {
        x.with(i, self.eval_local(i, x))
    }

    pub fn is_stable(&self, i: AutomatonId, x: &Configuration) -> bool {
        self.eval_local(i, x) == x.get(i)
    }

    pub fn is_fixed_point(&self, x: &Configuration) -> bool {
        self.automata().all(|i| self.is_stable(i, x))
    }

    /// Influencer set of `j`. For xor rules every distinct literal source with
    /// odd multiplicity is essential; multiset rules from contraction cancel
    /// even occurrences here.
    pub fn influencers(&self, j: AutomatonId) -> BTreeSet<AutomatonId> {
        let mut counts: Vec<(AutomatonId, usize)> = Vec::new();
        for lit in self.rules[j.idx()].literals() {
            match counts.last_mut() {
                Some((src, c)) if *src == lit.source => *c += 1,
                _ => counts.push((lit.source, 1)),
            }
        }
        counts.into_iter().filter(|(_, c)| c % 2 == 1).map(|(s, _)| s).collect()
    }

    /// Arcs of the interaction graph as (source, target) pairs.
    pub fn arcs(&self) -> Vec<(AutomatonId, AutomatonId)> {
        let mut arcs = Vec::new();
        for j in self.automata() {
            for s in self.influencers(j) {
                arcs.push((s, j));
            }
        }
        arcs
    }

    pub fn out_neighbors(&self, i: AutomatonId) -> Vec<AutomatonId> {
        self.automata().filter(|&j| self.influencers(j).contains(&i)).collect()
    }

    /// The maximal nude path ending in `i`. The backward walk stops at the
    /// first automaton with two or more influencers, and never revisits an
    /// automaton, so inside a pure cycle the path is truncated to length n-1.
    pub fn maximal_nude_path(&self, i: AutomatonId) -> NudePath {
        let mut automata = vec![i];
        let mut seen: BTreeSet<AutomatonId> = [i].into();
        let mut sign = false;
        let mut cur = i;
        loop {
            let inf = self.influencers(cur);
            if inf.len() != 1 {
                break;
            }
            let pred = *inf.iter().next().unwrap();
            if seen.contains(&pred) {
                break;
            }
            sign ^= self.rules[cur.idx()].parity();
            automata.push(pred);
            seen.insert(pred);
            cur = pred;
        }
        automata.reverse();
        NudePath { automata, sign }
    }

    /// True when `path` is a nude path of this network that admits no strict
    /// extension at its head.
    pub fn is_maximal_nude_path(&self, path: &NudePath) -> bool {
        let seq = &path.automata;
        if seq.is_empty() {
            return false;
        }
        let mut sign = false;
        for w in seq.windows(2) {
            let inf = self.influencers(w[1]);
            if inf.len() != 1 || !inf.contains(&w[0]) {
                return false;
            }
            sign ^= self.rules[w[1].idx()].parity();
        }
        if sign != path.sign || seq.iter().collect::<BTreeSet<_>>().len() != seq.len() {
            return false;
        }
        let head = seq[0];
        let inf = self.influencers(head);
        if inf.len() == 1 {
            let pred = *inf.iter().next().unwrap();
            if !seq.contains(&pred) {
                return false; // extensible
            }
        }
        true
    }

    /// Automata whose maximal nude path has length 0 — the intersection nodes.
    pub fn intersection_nodes(&self) -> Vec<AutomatonId> {
        self.automata().filter(|&i| self.maximal_nude_path(i).len() == 0).collect()
    }

    /// Dual network, `f^⊥_i(x) = not f_i(not x)`: every input negated (all
    /// literal signs flip) and the output negated (one more flip). Isomorphic
    /// to the input under negation of every state; rules of odd arity keep
    /// their function, which is what makes the xnor networks the duals of the
    /// xor ones.
    pub fn dual(&self) -> Network {
        let mut rules = self.rules.clone();
        for rule in &mut rules {
            for lit in &mut rule.literals {
                lit.negated = !lit.negated;
            }
            rule.negate_output();
        }
        Network { rules }
    }

    /// Reverse network, `f^R_i(x) = not f_i(not x^i)`. Its fixed points are
    /// exactly the unreachable configurations of the input.
    pub fn reverse(&self) -> Network {
        let mut rules = self.rules.clone();
        for (k, rule) in rules.iter_mut().enumerate() {
            let me = AutomatonId::from_idx(k);
            for lit in &mut rule.literals {
                if lit.source == me {
                    lit.negated = !lit.negated;
                }
            }
            rule.negate_output();
        }
        Network { rules }
    }

    /// Vertex flip: conjugation by the configuration bijection `x -> not x^S`.
    /// Every literal sourced in `set` flips sign, and rules of automata in
    /// `set` get their output negated. The result is isomorphic to the input.
    pub fn flip(&self, set: &BTreeSet<AutomatonId>) -> Network {
        let mut rules = self.rules.clone();
        for (k, rule) in rules.iter_mut().enumerate() {
            rule.flip_sources_in(set);
            if set.contains(&AutomatonId::from_idx(k)) {
                rule.negate_output();
            }
        }
        Network { rules }
    }

    /// The flip set realising the canonical form: automata whose maximal nude
    /// path carries an odd number of negations, computed so that flipping by it
    /// leaves every nude arc positive except one sink arc per pure cycle.
    pub fn canonical_flip_set(&self) -> BTreeSet<AutomatonId> {
        let n = self.size();
        let mut set = BTreeSet::new();
        let mut solved = vec![false; n];
        // Heads (multi-influencer automata) keep S = 0.
        for i in self.automata() {
            if self.influencers(i).len() != 1 {
                solved[i.idx()] = true;
            }
        }
        // Walk each unsolved chain back to a solved head or to a cycle; pure
        // cycles anchor S = 0 at their smallest automaton (the parity sink).
        for start in self.automata() {
            if solved[start.idx()] {
                continue;
            }
            let mut chain = vec![start];
            let mut cur = start;
            loop {
                let pred = *self.influencers(cur).iter().next().unwrap();
                if solved[pred.idx()] || chain.contains(&pred) {
                    if !solved[pred.idx()] {
                        // Cycle of single-influencer automata: re-anchor the
                        // walk at its smallest member.
                        let pos = chain.iter().position(|&c| c == pred).unwrap();
                        let cycle = &chain[pos..];
                        let anchor = *cycle.iter().min_by_key(|a| a.0).unwrap();
                        solved[anchor.idx()] = true;
                        chain = vec![anchor];
                        cur = anchor;
                        continue;
                    }
                    // Propagate along influence direction from the solved end.
                    let mut s_pred = set.contains(&pred);
                    for &w in chain.iter().rev() {
                        if solved[w.idx()] {
                            s_pred = set.contains(&w);
                            continue;
                        }
                        let s_w = self.rules[w.idx()].parity() ^ s_pred;
                        if s_w {
                            set.insert(w);
                        }
                        solved[w.idx()] = true;
                        s_pred = s_w;
                    }
                    break;
                }
                chain.push(pred);
                cur = pred;
            }
        }
        set
    }

    /// Canonical network: isomorphic representative with all nude-path arcs
    /// positive (pure cycles keep their parity on the arc into their smallest
    /// automaton). Idempotent.
    pub fn canonical(&self) -> Network {
        self.flip(&self.canonical_flip_set())
    }

    /// Contract every automaton whose maximal nude path has length at least 1,
    /// substituting its variable by the head of the path with the path's sign.
    /// Substituted literals are kept with multiplicity; `x ^ x` is not
    /// cancelled, so the result can hold multiset rules.
    pub fn contraction(&self) -> Network {
        let keep: Vec<AutomatonId> = self.intersection_nodes();
        if keep.is_empty() {
            // Pure cycle: a single automaton with a self-loop of the cycle's
            // total parity.
            let parity = self.automata().map(|i| self.rules[i.idx()].parity()).fold(false, |a, b| a ^ b);
            let lit = SignedLiteral { source: AutomatonId(1), negated: parity };
            return Network { rules: vec![LocalRule { literals: vec![lit] }] };
        }
        // Renumber kept automata 1..k in increasing id order.
        let mut renum = vec![0u32; self.size()];
        for (new_idx, &old) in keep.iter().enumerate() {
            renum[old.idx()] = new_idx as u32 + 1;
        }
        let mut rules = Vec::with_capacity(keep.len());
        for &i in &keep {
            let mut lits = Vec::new();
            for lit in self.rules[i.idx()].literals() {
                let path = self.maximal_nude_path(lit.source);
                let head = path.head();
                debug_assert!(keep.contains(&head));
                lits.push(SignedLiteral {
                    source: AutomatonId(renum[head.idx()]),
                    negated: lit.negated ^ path.sign,
                });
            }
            rules.push(LocalRule::multiset(lits).expect("kept rule nonempty"));
        }
        Network { rules }
    }

    /// True when every rule, with multiplicities cancelled, is `f_i(x) = x_i`.
    pub fn is_trivial(&self) -> bool {
        self.automata().all(|i| {
            let inf = self.influencers(i);
            inf.len() == 1 && inf.contains(&i) && {
                let odd: Vec<_> = self.rules[i.idx()]
                    .literals()
                    .iter()
                    .filter(|l| l.source == i)
                    .collect();
                odd.iter().filter(|l| l.negated).count() % 2 == 0
            }
        })
    }

    /// Tarjan over the interaction graph.
    pub fn strongly_connected(&self) -> bool {
        let n = self.size();
        if n == 0 {
            return false;
        }
        let adj: Vec<Vec<usize>> = self
            .automata()
            .map(|i| self.out_neighbors(i).iter().map(|j| j.idx()).collect())
            .collect();
        crate::scc::tarjan(n, |v| adj[v].iter().copied()).len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_badc, SignClass};
    use crate::textio::parse_network;

    fn cfg(s: &str) -> Configuration {
        Configuration::parse(s).unwrap()
    }

    #[test]
    fn eval_local_figure_net() {
        // {f1 = x2, f2 = x1 ^ !x2}
        let net = parse_network("1 : x2\n2 : x1 ^ !x2\n").unwrap();
        assert_eq!(net.eval_local(AutomatonId(2), &cfg("00")), true);
        assert_eq!(net.eval_local(AutomatonId(1), &cfg("00")), false);
    }

    #[test]
    fn eval_local_badc_22() {
        // Figure labeling of the positive double cycle (2,2): center at id 2.
        let net = parse_network("1 : x2\n2 : x1 ^ x3\n3 : x2\n").unwrap();
        assert_eq!(net.eval_local(AutomatonId(2), &cfg("010")), false);
    }

    #[test]
    fn apply_update_cases() {
        let net = parse_network("1 : x1 ^ x2\n2 : x1\n").unwrap();
        let x = cfg("01");
        assert_eq!(net.apply_update(&BTreeSet::new(), &x), x);
        assert_eq!(net.apply_update(&[AutomatonId(1)].into(), &x), cfg("11"));

        // Synchronous update of both leaves in the figure-labeled (2,2) net.
        let net22 = parse_network("1 : x2\n2 : x1 ^ x3\n3 : x2\n").unwrap();
        let w: BTreeSet<_> = [AutomatonId(1), AutomatonId(3)].into();
        assert_eq!(net22.apply_update(&w, &cfg("101")), cfg("000"));
    }

    #[test]
    fn stability_and_fixed_points() {
        let (net, _) = gen_badc(2, 2, SignClass::Positive).unwrap();
        assert!(net.is_fixed_point(&cfg("000")));
        let x = cfg("111");
        assert!(!net.is_fixed_point(&x));
        // A fixed point is invariant under the full synchronous update.
        let v: BTreeSet<_> = net.automata().collect();
        assert_eq!(net.apply_update(&v, &cfg("000")), cfg("000"));
    }

    #[test]
    fn influencer_sets() {
        let net = parse_network("1 : x2\n2 : x1 ^ !x2\n").unwrap();
        assert_eq!(net.influencers(AutomatonId(2)), [AutomatonId(1), AutomatonId(2)].into());
        let net2 = parse_network("1 : x3\n2 : x1\n3 : x2\n").unwrap();
        assert_eq!(net2.influencers(AutomatonId(3)), [AutomatonId(2)].into());
    }

    #[test]
    fn nude_paths() {
        // Pure positive cycle of size 3: path wraps, truncated to length 2.
        let cyc = parse_network("1 : x3\n2 : x1\n3 : x2\n").unwrap();
        let p = cyc.maximal_nude_path(AutomatonId(1));
        assert_eq!(p.len(), 2);
        assert_eq!(p.automata, vec![AutomatonId(2), AutomatonId(3), AutomatonId(1)]);
        assert!(!p.sign);
        assert!(cyc.is_maximal_nude_path(&p));

        // Double cycle (2,2): the center has two influencers, so its path has
        // length 0 and automaton 3's path stops right behind the center.
        let (badc, lab) = gen_badc(2, 2, SignClass::Positive).unwrap();
        let center = lab.center();
        assert_eq!(badc.maximal_nude_path(center).len(), 0);
        let p3 = badc.maximal_nude_path(AutomatonId(3));
        assert_eq!(p3.len(), 1);
        assert_eq!(p3.head(), center);
    }

    #[test]
    fn dual_is_the_double_negation() {
        let net = parse_network("1 : x1 ^ x2\n2 : x1\n").unwrap();
        let dual = net.dual();
        let dd = dual.dual();
        for bits in 0..4u64 {
            let x = Configuration::from_bits(bits, 2);
            for i in net.automata() {
                assert_eq!(dual.eval_local(i, &x), !net.eval_local(i, &x.negate_all()));
                assert_eq!(net.eval_local(i, &x), dd.eval_local(i, &x));
            }
        }
        // Even arity gains a negation; odd arity keeps its function.
        assert!(dual.rule(AutomatonId(1)).parity());
        assert!(!dual.rule(AutomatonId(2)).parity());
    }

    #[test]
    fn reverse_of_badc_12() {
        let net = parse_network("1 : x1 ^ x2\n2 : x1\n").unwrap();
        let rev = net.reverse();
        // f^R_i(x) = not f_i(not x^i) as truth tables.
        for bits in 0..4u64 {
            let x = Configuration::from_bits(bits, 2);
            for i in net.automata() {
                assert_eq!(
                    rev.eval_local(i, &x),
                    !net.eval_local(i, &x.negate_one(i)),
                    "automaton {i} at {x}"
                );
            }
        }
        // Without a self-loop, the reverse is output negation alone; it
        // agrees with the dual exactly on even-arity rules.
        let chainy = parse_network("1 : x2\n2 : x1\n").unwrap();
        assert!(chainy.reverse().rules().iter().all(|r| r.parity()));
        for bits in 0..4u64 {
            let x = Configuration::from_bits(bits, 2);
            for i in chainy.automata() {
                assert_eq!(chainy.dual().eval_local(i, &x), chainy.eval_local(i, &x));
            }
        }
        // The single fixed point of the reverse is the unreachable 10.
        assert!(rev.is_fixed_point(&cfg("10")));
        for bits in 0..4u64 {
            let x = Configuration::from_bits(bits, 2);
            assert_eq!(rev.is_fixed_point(&x), x == cfg("10"));
        }
    }

    #[test]
    fn canonical_relocates_signs() {
        // Mixed double cycle: negative arc in the middle of cycle 1.
        let net = parse_network("1 : x3 ^ x4\n2 : x1\n3 : !x2\n4 : x1\n").unwrap();
        let canon = net.canonical();
        let expect = parse_network("1 : !x3 ^ x4\n2 : x1\n3 : x2\n4 : x1\n").unwrap();
        assert_eq!(canon, expect);
        // f^+_i(x) = f_i(not x^I) with I the odd-signed-path automata.
        let flips: BTreeSet<_> = [AutomatonId(3)].into();
        for bits in 0..16u64 {
            let x = Configuration::from_bits(bits, 4);
            assert_eq!(canon.eval_local(AutomatonId(1), &x), net.eval_local(AutomatonId(1), &x.negate_set(&flips)));
        }
        assert_eq!(canon.canonical(), canon);
        assert_eq!(expect.canonical(), expect);
    }

    #[test]
    fn canonical_pure_cycle_keeps_parity() {
        let neg_cycle = parse_network("1 : !x3\n2 : x1\n3 : x2\n").unwrap();
        let canon = neg_cycle.canonical();
        let total: usize = canon.rules().iter().filter(|r| r.parity()).count();
        assert_eq!(total, 1, "cycle sign must survive canonicalisation");
        assert_eq!(canon.canonical(), canon);
    }

    #[test]
    fn flip_empty_is_identity() {
        let net = parse_network("1 : x3 ^ x4\n2 : x1\n3 : !x2\n4 : x1\n").unwrap();
        assert_eq!(net.flip(&BTreeSet::new()), net);
    }

    #[test]
    fn contraction_cases() {
        let trivial = parse_network("1 : x1\n2 : x2\n").unwrap();
        assert_eq!(trivial.contraction(), trivial);
        assert!(trivial.is_trivial());

        // Positive flower with three petals of size 3 contracts onto its
        // center; the three substituted literals all land on it.
        let (flower, _) = crate::families::gen_flower(&[3, 3, 3], SignClass::Positive).unwrap();
        let contracted = flower.contraction();
        assert_eq!(contracted.size(), 1);
        assert_eq!(contracted.rule(AutomatonId(1)).literals().len(), 3);
        assert!(contracted.rule(AutomatonId(1)).literals().iter().all(|l| l.source == AutomatonId(1) && !l.negated));
        assert!(contracted.is_trivial());

        let neg_cycle = parse_network("1 : !x2\n2 : x1\n").unwrap();
        let c = neg_cycle.contraction();
        assert_eq!(c.size(), 1);
        assert!(c.rule(AutomatonId(1)).parity());
    }

    #[test]
    fn gf2_linearity_of_eval() {
        let net = parse_network("1 : x3 ^ x4\n2 : x1\n3 : !x2\n4 : x1\n").unwrap();
        for bits in 0..16u64 {
            let x = Configuration::from_bits(bits, 4);
            for i in net.automata() {
                for j in net.automata() {
                    let toggles = net.eval_local(i, &x) != net.eval_local(i, &x.negate_one(j));
                    assert_eq!(toggles, net.influencers(i).contains(&j));
                }
            }
        }
    }
}
