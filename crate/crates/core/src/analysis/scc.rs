//! Strongly connected components (iterative Tarjan).

/// SCC partition with members sorted and components ordered by their
/// smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sccs {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// No edge leaves the component.
    pub bottom: Vec<bool>,
    /// Component indices in topological order of the condensation.
    pub topological: Vec<usize>,
}

pub fn scc_decompose<F, I>(n: usize, successors: F) -> Sccs
where
    F: Fn(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    const UNSEEN: usize = usize::MAX;
    let succ: Vec<Vec<usize>> = (0..n).map(|v| successors(v).into_iter().collect()).collect();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if let Some(&w) = succ[v].get(top.1) {
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                found.push(comp);
            }
        }
    }

    // Tarjan emits components in reverse topological order
    let reverse_topo: Vec<usize> = (0..found.len()).collect();
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by_key(|&c| found[c][0]);
    let mut rank = vec![0; found.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let topological = reverse_topo.into_iter().rev().map(|c| rank[c]).collect();
    let components: Vec<Vec<usize>> = order.iter().map(|&c| found[c].clone()).collect();
    let mut component_of = vec![0; n];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }
    let bottom = components
        .iter()
        .enumerate()
        .map(|(c, members)| members.iter().all(|&v| succ[v].iter().all(|&w| component_of[w] == c)))
        .collect();
    Sccs { components, component_of, bottom, topological }
}
