//! The reproduction suite: every structural claim the library is built
//! around, run end to end with measured values against expectations. Used by
//! the `reproduce` command and by the acceptance test target.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atg::{build_atg, check_theorem_shape, DEFAULT_LIMIT};
use crate::equiv::{
    check_atg_conjugacy, check_witness, classify_chain, classify_flower, find_isomorphism,
    fixed_points_symbolic, isomorphism_classes, sign_variants,
};
use crate::families::{gen_badc, gen_chain, gen_flower, gen_random_cactus, SignClass};
use crate::net::{AutomatonId, Configuration, Network};
use crate::planner::{find_induced_badc, plan_badc, plan_general, synchronous_unreachable_witness,
    verify_plan};

#[derive(Debug)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, pass: true, detail: String::new() }
    }

    fn fail(&mut self, msg: impl AsRef<str>) {
        self.pass = false;
        let _ = writeln!(self.detail, "FAIL  {}", msg.as_ref());
    }

    fn note(&mut self, msg: impl AsRef<str>) {
        let _ = writeln!(self.detail, "      {}", msg.as_ref());
    }

    fn expect(&mut self, cond: bool, msg: impl AsRef<str>) {
        if !cond {
            self.fail(msg);
        }
    }
}

/// Labeled edges of the positive (1,2) double cycle figure.
pub const BADC_12_EDGES: [(&str, u32, &str); 8] = [
    ("00", 1, "00"),
    ("00", 2, "00"),
    ("01", 1, "11"),
    ("01", 2, "00"),
    ("10", 1, "10"),
    ("10", 2, "11"),
    ("11", 1, "01"),
    ("11", 2, "11"),
];

/// Labeled edges of the positive (2,2) double cycle figure (center at id 2).
pub const BADC_22_EDGES: [(&str, u32, &str); 24] = [
    ("000", 1, "000"),
    ("000", 2, "000"),
    ("000", 3, "000"),
    ("001", 1, "001"),
    ("001", 2, "011"),
    ("001", 3, "000"),
    ("010", 1, "110"),
    ("010", 2, "000"),
    ("010", 3, "011"),
    ("011", 1, "111"),
    ("011", 2, "011"),
    ("011", 3, "011"),
    ("100", 1, "000"),
    ("100", 2, "110"),
    ("100", 3, "100"),
    ("101", 1, "001"),
    ("101", 2, "101"),
    ("101", 3, "100"),
    ("110", 1, "110"),
    ("110", 2, "110"),
    ("110", 3, "111"),
    ("111", 1, "111"),
    ("111", 2, "101"),
    ("111", 3, "111"),
];

fn labeled_edges(net: &Network) -> BTreeSet<(String, u32, String)> {
    let atg = build_atg(net, DEFAULT_LIMIT).unwrap();
    let mut out = BTreeSet::new();
    for c in 0..atg.node_count() {
        for i in net.automata() {
            out.insert((
                atg.config(c).to_string(),
                i.0,
                atg.config(atg.successor(c, i)).to_string(),
            ));
        }
    }
    out
}

/// Theorem-scope corpus: strongly connected networks with an induced double
/// cycle of size greater than 3, up to `max_n` automata.
pub fn theorem_corpus(seed: u64, max_n: usize) -> Vec<(String, Network)> {
    let mut out: Vec<(String, Network)> = Vec::new();
    let classes = [SignClass::Positive, SignClass::Negative, SignClass::Mixed];
    let badc_sizes = [
        (1, 4),
        (1, 5),
        (2, 3),
        (2, 4),
        (2, 5),
        (3, 3),
        (3, 4),
        (3, 5),
        (4, 4),
        (4, 5),
        (5, 5),
        (5, 6),
        (6, 6),
        (6, 7),
    ];
    for (k, &(n1, n2)) in badc_sizes.iter().enumerate() {
        if n1 + n2 - 1 > max_n {
            continue;
        }
        let class = classes[k % 3];
        let (net, _) = gen_badc(n1, n2, class).unwrap();
        out.push((format!("badc({n1},{n2})-{class:?}"), net));
    }
    let flower_sizes: [&[usize]; 10] = [
        &[3, 3],
        &[3, 4],
        &[4, 4],
        &[4, 5],
        &[2, 3, 3],
        &[3, 3, 3],
        &[2, 2, 4],
        &[3, 3, 4],
        &[2, 3, 4],
        &[3, 4, 4],
    ];
    for (k, sizes) in flower_sizes.iter().enumerate() {
        let n: usize = sizes.iter().sum::<usize>() - (sizes.len() - 1);
        if n > max_n {
            continue;
        }
        let class = if k % 2 == 0 { SignClass::Positive } else { SignClass::Negative };
        let (net, _) = gen_flower(sizes, class).unwrap();
        out.push((format!("flower{sizes:?}-{class:?}"), net));
    }
    let chain_sizes: [&[usize]; 9] = [
        &[3, 2, 2],
        &[2, 3, 2],
        &[3, 3, 2],
        &[3, 2, 3],
        &[3, 2, 2, 2],
        &[2, 3, 2, 2],
        &[3, 3, 3],
        &[4, 2, 3],
        &[3, 4, 2],
    ];
    for (k, sizes) in chain_sizes.iter().enumerate() {
        let n: usize = sizes.iter().sum::<usize>() - (sizes.len() - 1);
        if n > max_n {
            continue;
        }
        let class = if k % 2 == 0 { SignClass::Positive } else { SignClass::Negative };
        let (net, _) = gen_chain(sizes, None, class).unwrap();
        out.push((format!("chain{sizes:?}-{class:?}"), net));
    }
    // Offset variants probe the free intersection positions.
    for (sizes, offsets) in [(&[3usize, 4, 3][..], &[2usize, 2][..]), (&[2, 4, 2], &[3, 2])] {
        let n: usize = sizes.iter().sum::<usize>() - (sizes.len() - 1);
        if n <= max_n {
            let (net, _) = gen_chain(sizes, Some(offsets), SignClass::Positive).unwrap();
            out.push((format!("chain{sizes:?}@{offsets:?}"), net));
        }
    }
    let mut found = 0u64;
    let mut s = seed;
    while found < 18 {
        let (net, _) = gen_random_cactus(s, max_n.min(10), 3).unwrap();
        s += 1;
        if net.size() <= max_n && find_induced_badc(&net).is_some() {
            out.push((format!("cactus-{}", s - 1), net));
            found += 1;
        }
        if s > seed + 500 {
            break;
        }
    }
    out.retain(|(_, net)| find_induced_badc(net).is_some());
    out
}

fn check_fixtures() -> Check {
    let mut c = Check::new("atg-fixtures");
    let (net12, _) = gen_badc(1, 2, SignClass::Positive).unwrap();
    let want12: BTreeSet<(String, u32, String)> =
        BADC_12_EDGES.iter().map(|&(a, i, b)| (a.to_string(), i, b.to_string())).collect();
    c.expect(labeled_edges(&net12) == want12, "(1,2) edge set differs from the figure");

    let (net22, _) = gen_badc(2, 2, SignClass::Positive).unwrap();
    let perm = |i: u32| match i {
        1 => 2,
        2 => 1,
        other => other,
    };
    let relabel = |s: &str| -> String {
        let bits: Vec<char> = s.chars().collect();
        (1..=bits.len() as u32).map(|k| bits[perm(k) as usize - 1]).collect()
    };
    let got: BTreeSet<(String, u32, String)> = labeled_edges(&net22)
        .into_iter()
        .map(|(a, i, b)| (relabel(&a), perm(i), relabel(&b)))
        .collect();
    let want22: BTreeSet<(String, u32, String)> =
        BADC_22_EDGES.iter().map(|&(a, i, b)| (a.to_string(), i, b.to_string())).collect();
    c.expect(got == want22, "(2,2) edge set differs from the figure after relabeling");
    c.note("both figure transition graphs reproduced edge-exactly");
    c
}

fn check_theorem_shapes(seed: u64) -> Check {
    let mut c = Check::new("theorem-shape");
    let corpus = theorem_corpus(seed, 12);
    c.expect(corpus.len() >= 50, format!("corpus has only {} networks", corpus.len()));
    for (name, net) in &corpus {
        match check_theorem_shape(net, DEFAULT_LIMIT) {
            Ok(report) => {
                if !report.in_scope {
                    c.fail(format!("{name}: expected in scope ({})", report.scope_reason));
                    continue;
                }
                if !report.verdict {
                    c.fail(format!("{name}: shape verdict false"));
                    continue;
                }
                let n = net.size() as u32;
                let expect_big = (1u64 << n)
                    - report.fixed_points.len() as u64
                    - report.unreachables.len() as u64;
                c.expect(
                    report.big_scc_size == expect_big,
                    format!("{name}: big SCC {} != {expect_big}", report.big_scc_size),
                );
            }
            Err(e) => c.fail(format!("{name}: {e}")),
        }
    }
    c.note(format!("{} networks, all with the sources -> one SCC -> sinks shape", corpus.len()));
    c
}

fn check_planner(seed: u64) -> Check {
    let mut c = Check::new("planner-soundness");
    // Exhaustive on the two pinned double cycles.
    let mut max_ratio = 0f64;
    for (n1, n2) in [(3usize, 3usize), (3, 4)] {
        let (net, _) = gen_badc(n1, n2, SignClass::Positive).unwrap();
        let n = net.size();
        let bound = 4 * n * n;
        let rev = net.reverse();
        let mut pairs = 0u64;
        for xb in 0..(1u64 << n) {
            let x = Configuration::from_bits(xb, n);
            if net.is_fixed_point(&x) {
                continue;
            }
            for tb in 0..(1u64 << n) {
                let t = Configuration::from_bits(tb, n);
                if rev.is_fixed_point(&t) {
                    continue;
                }
                pairs += 1;
                match plan_badc(&net, &x, &t) {
                    Ok(plan) => {
                        if !verify_plan(&net, &plan).ok {
                            c.fail(format!("badc({n1},{n2}) {x}->{t}: plan does not verify"));
                        }
                        if plan.len() > bound {
                            c.fail(format!(
                                "badc({n1},{n2}) {x}->{t}: {} steps > {bound}",
                                plan.len()
                            ));
                        }
                        max_ratio = max_ratio.max(plan.len() as f64 / (n * n) as f64);
                    }
                    Err(e) => c.fail(format!("badc({n1},{n2}) {x}->{t}: {e}")),
                }
            }
        }
        c.note(format!("badc({n1},{n2}): all {pairs} valid pairs planned and verified"));
    }
    c.note(format!("observed double-cycle maximum: {max_ratio:.2} n^2 (bound 4 n^2)"));

    // Sampled general planning against the breadth-first oracle.
    let corpus: Vec<(String, Network)> = theorem_corpus(seed, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
    let mut planned = 0usize;
    let mut max_gratio = 0f64;
    'outer: while planned < 200 {
        for (name, net) in &corpus {
            let n = net.size();
            let atg = build_atg(net, DEFAULT_LIMIT).unwrap();
            let rev = net.reverse();
            let mut tried = 0;
            while tried < 2 {
                let x = Configuration::from_bits(rng.gen_range(0..(1u64 << n)), n);
                let t = Configuration::from_bits(rng.gen_range(0..(1u64 << n)), n);
                if net.is_fixed_point(&x) || rev.is_fixed_point(&t) {
                    continue;
                }
                tried += 1;
                match plan_general(net, &x, &t) {
                    Ok(plan) => {
                        if !verify_plan(net, &plan).ok {
                            c.fail(format!("{name} {x}->{t}: general plan does not verify"));
                        }
                        let d = atg.bfs_distance(x.index(), t.index());
                        match d {
                            Some(d) if (plan.len() as u64) < d => {
                                c.fail(format!("{name} {x}->{t}: plan beats the oracle"))
                            }
                            None => c.fail(format!("{name} {x}->{t}: oracle says unreachable")),
                            _ => {}
                        }
                        if plan.len() > 8 * n * n {
                            c.fail(format!("{name} {x}->{t}: {} steps > 8 n^2", plan.len()));
                        }
                        max_gratio = max_gratio.max(plan.len() as f64 / (n * n) as f64);
                        planned += 1;
                        if planned >= 200 {
                            break 'outer;
                        }
                    }
                    Err(e) => c.fail(format!("{name} {x}->{t}: {e}")),
                }
            }
        }
    }
    c.note(format!("{planned} sampled general plans verified against the oracle"));
    c.note(format!("observed general maximum: {max_gratio:.2} n^2 (bound 8 n^2)"));
    c
}

fn brute_fixed_points(net: &Network) -> Vec<Configuration> {
    let n = net.size();
    (0..(1u64 << n))
        .map(|b| Configuration::from_bits(b, n))
        .filter(|x| net.is_fixed_point(x))
        .collect()
}

fn check_fixed_points() -> Check {
    let mut c = Check::new("fixed-point-propositions");
    let zero = |n: usize| Configuration::zero(n);

    let (f33, lab33) = gen_flower(&[3, 3], SignClass::Positive).unwrap();
    let want = vec![zero(5)];
    let sym = fixed_points_symbolic(&f33);
    c.expect(sym == want, format!("flower(3,3)+: symbolic {sym:?}"));
    c.expect(brute_fixed_points(&f33) == want, "flower(3,3)+: brute force differs");
    c.expect(
        classify_flower(&f33, &lab33).unwrap().predicted_fixed_points == want,
        "flower(3,3)+: prediction differs",
    );

    let (f333, _) = gen_flower(&[3, 3, 3], SignClass::Positive).unwrap();
    let want = vec![zero(7), zero(7).negate_all()];
    c.expect(fixed_points_symbolic(&f333) == want, "flower(3,3,3)+: expected {0^7, 1^7}");
    c.expect(brute_fixed_points(&f333) == want, "flower(3,3,3)+: brute force differs");

    let (f333n, _) = gen_flower(&[3, 3, 3], SignClass::Negative).unwrap();
    c.expect(fixed_points_symbolic(&f333n).is_empty(), "flower(3,3,3)-: expected none");
    c.expect(brute_fixed_points(&f333n).is_empty(), "flower(3,3,3)-: brute force differs");

    let (c3, _) = gen_chain(&[2, 2, 2], None, SignClass::Positive).unwrap();
    let want = vec![zero(4)];
    c.expect(fixed_points_symbolic(&c3) == want, "chain m=3 +: expected {0^n}");
    c.expect(brute_fixed_points(&c3) == want, "chain m=3 +: brute force differs");

    let (c4, lab4) = gen_chain(&[2, 2, 2, 2], None, SignClass::Positive).unwrap();
    let sym = fixed_points_symbolic(&c4);
    let brute = brute_fixed_points(&c4);
    c.expect(sym == brute, "chain m=4 +: symbolic != brute force");
    c.expect(sym.len() == 2 && sym[0] == zero(5), format!("chain m=4 +: {sym:?}"));
    let predicted = classify_chain(&c4, &lab4).unwrap().predicted_fixed_points;
    c.expect(predicted == sym, "chain m=4 +: 101-expansion prediction differs");
    // The second fixed point holds 101 on the intersections.
    let pattern: Vec<bool> =
        lab4.intersections().iter().map(|&o| sym[1].get(o)).collect();
    c.expect(pattern == vec![true, false, true], format!("chain m=4 +: pattern {pattern:?}"));

    let (c4n, _) = gen_chain(&[2, 2, 2, 2], None, SignClass::Negative).unwrap();
    c.expect(fixed_points_symbolic(&c4n).is_empty(), "chain m=4 -: expected none");
    c.expect(brute_fixed_points(&c4n).is_empty(), "chain m=4 -: brute force differs");

    c.note("six propositions verified, symbolic = brute force = prediction");
    c
}

fn check_reverse_duality(seed: u64) -> Check {
    let mut c = Check::new("reverse-duality");
    let mut corpus = theorem_corpus(seed, 10);
    // Out-of-scope networks obey the duality as well.
    corpus.push(("badc(1,2)".into(), gen_badc(1, 2, SignClass::Positive).unwrap().0));
    corpus.push(("badc(2,2)".into(), gen_badc(2, 2, SignClass::Negative).unwrap().0));
    corpus.push(("flower[2,2,2]".into(), gen_flower(&[2, 2, 2], SignClass::Positive).unwrap().0));
    for (name, net) in &corpus {
        let n = net.size();
        let atg = build_atg(net, DEFAULT_LIMIT).unwrap();
        let rev = net.reverse();
        let from_reverse: Vec<u64> = (0..(1u64 << n))
            .filter(|&b| rev.is_fixed_point(&Configuration::from_bits(b, n)))
            .collect();
        if atg.unreachables() != from_reverse {
            c.fail(format!("{name}: unreachables differ from reverse fixed points"));
        }
    }
    c.note(format!("{} networks, exact set equality", corpus.len()));
    c
}

fn check_isomorphisms(seed: u64) -> Check {
    let mut c = Check::new("isomorphism-theorems");
    let nets: Vec<(String, Network)> = vec![
        ("badc(2,3)+".into(), gen_badc(2, 3, SignClass::Positive).unwrap().0),
        ("badc(1,4)x".into(), gen_badc(1, 4, SignClass::Mixed).unwrap().0),
        ("badc(3,3)-".into(), gen_badc(3, 3, SignClass::Negative).unwrap().0),
        ("flower[2,2,3]+".into(), gen_flower(&[2, 2, 3], SignClass::Positive).unwrap().0),
        ("flower[3,3]-".into(), gen_flower(&[3, 3], SignClass::Negative).unwrap().0),
        ("chain[3,2,2]+".into(), gen_chain(&[3, 2, 2], None, SignClass::Positive).unwrap().0),
        ("cactus-3".into(), gen_random_cactus(3, 8, 3).unwrap().0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(99));
    for (name, net) in &nets {
        let n = net.size();
        if n > 8 {
            continue;
        }
        let mut partners: Vec<(String, Network)> =
            vec![(format!("{name}.dual"), net.dual()), (format!("{name}.canonical"), net.canonical())];
        for k in 0..20 {
            let set: BTreeSet<AutomatonId> = (0..n)
                .filter(|_| rng.gen_bool(0.5))
                .map(AutomatonId::from_idx)
                .collect();
            partners.push((format!("{name}.flip{k}"), net.flip(&set)));
        }
        for (pname, partner) in partners {
            match find_isomorphism(net, &partner) {
                Some(w) => {
                    if !check_witness(net, &partner, &w) {
                        c.fail(format!("{pname}: witness fails the rule identity"));
                    }
                    if !check_atg_conjugacy(net, &partner, &w) {
                        c.fail(format!("{pname}: witness fails graph conjugacy"));
                    }
                }
                None => c.fail(format!("{pname}: no witness found")),
            }
        }
    }
    c.note("dual, canonical and 20 vertex flips per network all witnessed");
    c
}

fn check_class_counts() -> Check {
    let mut c = Check::new("class-counts");
    let cases: Vec<(&str, Network, usize)> = vec![
        ("flower[2,2,2]", gen_flower(&[2, 2, 2], SignClass::Positive).unwrap().0, 2),
        ("badc(2,2)", gen_badc(2, 2, SignClass::Positive).unwrap().0, 1),
        ("chain[2,2,2,2]", gen_chain(&[2, 2, 2, 2], None, SignClass::Positive).unwrap().0, 2),
        ("chain[2,2,2]", gen_chain(&[2, 2, 2], None, SignClass::Positive).unwrap().0, 1),
    ];
    for (name, net, want) in cases {
        let variants = sign_variants(&net);
        let classes = isomorphism_classes(&variants);
        c.expect(
            classes.len() == want,
            format!("{name}: {} classes over {} variants, expected {want}", classes.len(), variants.len()),
        );
        c.note(format!("{name}: {} sign assignments fall into {} classes", variants.len(), classes.len()));
    }
    c
}

fn check_synchronous_remark() -> Check {
    let mut c = Check::new("synchronous-remark");
    let (net, _) = gen_badc(3, 3, SignClass::Positive).unwrap();
    let rev = net.reverse();
    let mut count = 0;
    for b in 0..(1u64 << 5) {
        let x = Configuration::from_bits(b, 5);
        if !rev.is_fixed_point(&x) {
            continue;
        }
        count += 1;
        match synchronous_unreachable_witness(&net, &x) {
            Ok((hat, w)) => {
                c.expect(net.apply_update(&w, &hat) == x, format!("{x}: update misses"));
                c.expect(!rev.is_fixed_point(&hat), format!("{x}: witness unreachable"));
                c.note(format!(
                    "unreachable {x}: witness {hat} under synchronous {{{}}}",
                    w.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
                ));
            }
            Err(e) => c.fail(format!("{x}: {e}")),
        }
    }
    c.expect(count == 1, format!("{count} unreachable configurations, expected 1"));
    c.note("update set = the full first cycle (see the ledger on the remark's stated set)");
    c
}

fn check_tightness() -> Check {
    let mut c = Check::new("tightness-probe");
    let mut dist = Vec::new();
    for k in [3usize, 5, 7] {
        let (net, lab) = gen_badc(k, k, SignClass::Positive).unwrap();
        let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
        let start_vec = format!("1{}", "0".repeat(k - 1));
        let target_vec = format!("0{}", "10".repeat((k - 1) / 2));
        let x = lab.config_from_cycle_vectors(&[&start_vec, &start_vec]).unwrap();
        let t = lab.config_from_cycle_vectors(&[&target_vec, &target_vec]).unwrap();
        match atg.bfs_distance(x.index(), t.index()) {
            Some(d) => {
                c.note(format!("badc({k},{k}): distance {d} over n = {}", net.size()));
                dist.push(d as f64);
            }
            None => c.fail(format!("badc({k},{k}): alternating target unreachable")),
        }
    }
    if dist.len() == 3 {
        c.expect(dist[0] < dist[1] && dist[1] < dist[2], "distances are not increasing");
        let ratio = dist[2] / dist[1];
        c.expect(
            ratio > (12.0 / 8.0) * 1.2,
            format!("growth ratio {ratio:.3} not superlinear"),
        );
        c.note(format!("d(7,7)/d(5,5) = {ratio:.3} > 1.8"));
    }
    c
}

/// Runs the whole suite (or the named check) and returns per-check results.
pub fn run_all(corpus_seed: u64, only: Option<&str>) -> Vec<Check> {
    let checks: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("atg-fixtures", Box::new(check_fixtures)),
        ("theorem-shape", Box::new(move || check_theorem_shapes(corpus_seed))),
        ("planner-soundness", Box::new(move || check_planner(corpus_seed))),
        ("fixed-point-propositions", Box::new(check_fixed_points)),
        ("reverse-duality", Box::new(move || check_reverse_duality(corpus_seed))),
        ("isomorphism-theorems", Box::new(move || check_isomorphisms(corpus_seed))),
        ("class-counts", Box::new(check_class_counts)),
        ("synchronous-remark", Box::new(check_synchronous_remark)),
        ("tightness-probe", Box::new(check_tightness)),
    ];
    checks
        .into_iter()
        .filter(|(name, _)| only.map_or(true, |o| *name == o))
        .map(|(_, f)| f())
        .collect()
}

/// Renders the pass/fail table.
pub fn render(checks: &[Check]) -> String {
    let mut out = String::new();
    for check in checks {
        let _ = writeln!(out, "[{}] {}", if check.pass { "pass" } else { "FAIL" }, check.name);
        out.push_str(&check.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed);
    out
}
