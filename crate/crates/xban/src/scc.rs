//! Iterative Tarjan strongly-connected-components, shared by the interaction
//! graph (a handful of nodes) and the transition graph (up to 2^24 nodes, so
//! no recursion).

/// Returns the SCCs of the graph `0..n` with successor function `succ`, in
/// reverse topological order (sinks first). Node order inside a component and
/// the component order are deterministic for a deterministic `succ`.
pub fn tarjan<I, F>(n: usize, succ: F) -> Vec<Vec<usize>>
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I,
{
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0u32;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS frames: (node, current successor iterator).
    let mut frames: Vec<(usize, I)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, succ(root)));

        while let Some((v, it)) = frames.last_mut() {
            let v = *v;
            if let Some(w) = it.next() {
                if index[w] == UNSET {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, succ(w)));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some((parent, _)) = frames.last() {
                    let p = *parent;
                    lowlink[p] = lowlink[p].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    sccs.push(comp);
                }
            }
        }
    }
    sccs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_components() {
        // 0 <-> 1, both -> 2, 2 -> 2
        let adj = vec![vec![1], vec![0, 2], vec![2]];
        let sccs = tarjan(3, |v| adj[v].iter().copied());
        assert_eq!(sccs.len(), 2);
        assert_eq!(sccs[0], vec![2]); // sink first
        let mut big = sccs[1].clone();
        big.sort();
        assert_eq!(big, vec![0, 1]);
    }

    #[test]
    fn deep_chain_no_overflow() {
        let n = 200_000;
        let sccs = tarjan(n, |v| (v + 1..n.min(v + 2)).into_iter());
        assert_eq!(sccs.len(), n);
    }
}
