//! Bounded / polynomial classification by the cycle structure of the
//! automaton restricted to its nontrivial states.

use serde::Serialize;

use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};

/// Growth class of `#{v ∈ X^n : s|_v ≠ e}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ActivityClass {
    /// Uniformly bounded by `bound` on every level checked.
    Bounded { bound: u128 },
    /// Polynomial of the given degree (always ≥ 1; degree 0 is `Bounded`).
    Polynomial { degree: usize },
    Exponential,
}

/// Strongly connected pieces of the nontrivial-state graph.
#[derive(Debug, Clone)]
pub struct CycleStructure {
    /// Length of every simple cycle (cycles are disjoint when this is defined).
    pub cycle_lengths: Vec<usize>,
    /// Maximum number of cycles met along a directed path.
    pub max_cycles_on_path: usize,
}

fn graph(aut: &Automaton) -> Result<(StateId, Vec<Vec<usize>>)> {
    let e = aut.identity().ok_or(Error::NoIdentityState)?;
    let n = aut.num_states();
    let adj = (0..n)
        .map(|s| {
            if s == e as usize {
                return Vec::new();
            }
            aut.next_row(s as StateId)
                .iter()
                .filter(|&&t| t != e)
                .map(|&t| t as usize)
                .collect()
        })
        .collect();
    Ok((e, adj))
}

/// Tarjan's algorithm; components come out in reverse topological order.
fn strongly_connected(adj: &[Vec<usize>], skip: usize) -> Vec<usize> {
    struct Frame {
        v: usize,
        edge: usize,
    }
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut comps = 0;
    for root in 0..n {
        if root == skip || index[root] != usize::MAX {
            continue;
        }
        let mut call = vec![Frame { v: root, edge: 0 }];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(frame) = call.last_mut() {
            let v = frame.v;
            if frame.edge < adj[v].len() {
                let w = adj[v][frame.edge];
                frame.edge += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push(Frame { v: w, edge: 0 });
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    low[parent.v] = low[parent.v].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = comps;
                        if w == v {
                            break;
                        }
                    }
                    comps += 1;
                }
            }
        }
    }
    comp
}

/// Cycle structure, or `None` when two distinct simple cycles meet.
pub fn cycle_structure(aut: &Automaton) -> Result<Option<CycleStructure>> {
    let (e, adj) = graph(aut)?;
    let comp = strongly_connected(&adj, e as usize);
    let comps = comp.iter().filter(|&&c| c != usize::MAX).max().map_or(0, |c| c + 1);
    let mut vertices = vec![0usize; comps];
    let mut internal = vec![0usize; comps];
    for (v, out) in adj.iter().enumerate() {
        if comp[v] == usize::MAX {
            continue;
        }
        vertices[comp[v]] += 1;
        internal[comp[v]] += out.iter().filter(|&&w| comp[w] == comp[v]).count();
    }
    if (0..comps).any(|c| internal[c] > vertices[c]) {
        return Ok(None);
    }
    let is_cycle: Vec<bool> = (0..comps).map(|c| internal[c] > 0).collect();
    // Tarjan numbers components in reverse topological order, so successors come first.
    let mut best = vec![0usize; comps];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comps];
    for (v, &c) in comp.iter().enumerate() {
        if c != usize::MAX {
            members[c].push(v);
        }
    }
    for c in 0..comps {
        let below = members[c]
            .iter()
            .flat_map(|&v| adj[v].iter())
            .filter(|&&w| comp[w] != c)
            .map(|&w| best[comp[w]])
            .max()
            .unwrap_or(0);
        best[c] = below + usize::from(is_cycle[c]);
    }
    Ok(Some(CycleStructure {
        cycle_lengths: (0..comps).filter(|&c| is_cycle[c]).map(|c| vertices[c]).collect(),
        max_cycles_on_path: best.iter().copied().max().unwrap_or(0),
    }))
}

/// Exact `#{v ∈ X^n : s|_v ≠ e}` by propagating per-state counts level by level.
pub fn activity_count(aut: &Automaton, s: StateId, n: usize) -> Result<u128> {
    let e = aut.identity().ok_or(Error::NoIdentityState)?;
    aut.check_word(&[s])?;
    let mut counts = vec![0u128; aut.num_states()];
    counts[s as usize] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; aut.num_states()];
        for (q, &c) in counts.iter().enumerate() {
            if c == 0 || q == e as usize {
                continue;
            }
            for &t in aut.next_row(q as StateId) {
                next[t as usize] = next[t as usize].saturating_add(c);
            }
        }
        counts = next;
    }
    Ok(counts
        .iter()
        .enumerate()
        .filter(|&(q, _)| q != e as usize)
        .fold(0u128, |acc, (_, &c)| acc.saturating_add(c)))
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Classifies the minimized automaton.
///
/// For bounded automata the constant is the largest count seen on levels
/// `n ≤ |S|·lcm(cycle lengths)`; exact counts for any level are available
/// through [`activity_count`].
pub fn classify_activity(aut: &Automaton) -> Result<ActivityClass> {
    let aut = aut.minimize();
    aut.identity().ok_or(Error::NoIdentityState)?;
    let Some(cs) = cycle_structure(&aut)? else {
        return Ok(ActivityClass::Exponential);
    };
    if cs.max_cycles_on_path >= 2 {
        return Ok(ActivityClass::Polynomial { degree: cs.max_cycles_on_path - 1 });
    }
    let period = cs.cycle_lengths.iter().fold(1, |acc, &l| lcm(acc, l));
    let horizon = aut.num_states() * period;
    let mut bound = 0;
    for s in aut.generators() {
        for n in 0..=horizon {
            bound = bound.max(activity_count(&aut, s, n)?);
        }
    }
    Ok(ActivityClass::Bounded { bound })
}

/// Passes to `X^k` with `k` the lcm of the simple-cycle lengths, so that
/// every nontrivial simple cycle becomes a loop.
pub fn loopify(aut: &Automaton) -> Result<(Automaton, usize)> {
    let cs = cycle_structure(aut)?.ok_or(Error::NotPolynomial)?;
    let k = cs.cycle_lengths.iter().fold(1, |acc, &l| lcm(acc, l));
    Ok((aut.alphabet_power(k), k))
}

/// Fails unless every nontrivial simple cycle is a loop.
pub fn ensure_loopified(aut: &Automaton) -> Result<()> {
    let cs = cycle_structure(aut)?.ok_or(Error::NotPolynomial)?;
    match cs.cycle_lengths.iter().find(|&&l| l > 1) {
        Some(&l) => Err(Error::NotLoopified(l)),
        None => Ok(()),
    }
}
