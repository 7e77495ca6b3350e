//! Frozen transition-graph fixtures for the two smallest positive double
//! cycles, compared edge-by-edge (the (2,2) instance up to the documented
//! relabeling that puts the center at id 2).

use std::collections::BTreeSet;

use xban::atg::{build_atg, to_dot, to_json, condense, DEFAULT_LIMIT};
use xban::families::{gen_badc, SignClass};
use xban::net::AutomatonId;

/// Labeled edges of the positive (1,2) double cycle: (from, update, to).
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

/// Labeled edges of the positive (2,2) double cycle in the figure labeling,
/// where the center is automaton 2.
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

fn edge_set(net: &xban::net::Network) -> BTreeSet<(String, u32, String)> {
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

#[test]
fn badc_12_atg_equals_figure() {
    let (net, _) = gen_badc(1, 2, SignClass::Positive).unwrap();
    let want: BTreeSet<(String, u32, String)> = BADC_12_EDGES
        .iter()
        .map(|&(a, i, b)| (a.to_string(), i, b.to_string()))
        .collect();
    assert_eq!(edge_set(&net), want);
}

#[test]
fn badc_22_atg_equals_figure_up_to_relabeling() {
    let (net, _) = gen_badc(2, 2, SignClass::Positive).unwrap();
    // Generator numbering: center first. Figure numbering: center at id 2.
    let perm = |i: u32| match i {
        1 => 2,
        2 => 1,
        other => other,
    };
    let relabel = |s: &str| -> String {
        let bits: Vec<char> = s.chars().collect();
        (1..=bits.len() as u32).map(|k| bits[perm(k) as usize - 1]).collect()
    };
    // relabel maps figure coordinates to generator coordinates and back;
    // the permutation is an involution here.
    let got: BTreeSet<(String, u32, String)> = edge_set(&net)
        .into_iter()
        .map(|(a, i, b)| (relabel(&a), perm(i), relabel(&b)))
        .collect();
    let want: BTreeSet<(String, u32, String)> = BADC_22_EDGES
        .iter()
        .map(|&(a, i, b)| (a.to_string(), i, b.to_string()))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn exports_are_well_formed() {
    let (net, _) = gen_badc(2, 2, SignClass::Positive).unwrap();
    let atg = build_atg(&net, DEFAULT_LIMIT).unwrap();
    let dot = to_dot(&atg);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("\"000\" -> \"000\" [label=\"{1}|{2}|{3}\"]"));
    assert_eq!(dot.matches("->").count(), 8 * 3 - 4 - 1); // merged parallels
    let cond = condense(&atg);
    let json = to_json(&atg, &cond);
    assert_eq!(json["n"], 3);
    assert_eq!(json["edges"].as_array().unwrap().len(), 24);
    assert_eq!(json["unreachables"].as_array().unwrap().len(), 1);
    // Determinism: rendering twice is byte-identical.
    assert_eq!(dot, to_dot(&atg));
    assert_eq!(serde_json::to_string(&json).unwrap(), serde_json::to_string(&to_json(&atg, &cond)).unwrap());
    let _ = AutomatonId(1);
}
