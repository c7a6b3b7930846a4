//! Exact word-problem oracle by exhaustive section closure, plus canonical
//! element keys, word length and growth built on top of it.
//!
//! Everything here is exponential in the worst case; the budget turns a blow-up
//! into [`Error::BudgetExceeded`] instead of a wrong answer.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{Automaton, Letter, StateId, Word};
use crate::error::{Error, Result};

/// Default cap on the number of distinct section words explored.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// All section words reachable from a root word by single-letter sections.
///
/// Members keep identity letters, so every member has the length of the root.
#[derive(Debug, Clone)]
pub struct SectionTable {
    width: usize,
    letters: usize,
    flat: Vec<StateId>,
    succ: Vec<u32>,
    perms: Vec<Letter>,
}

impl SectionTable {
    pub fn len(&self) -> usize {
        self.succ.len() / self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length shared by every member.
    pub fn word_len(&self) -> usize {
        self.width
    }

    pub fn word(&self, i: usize) -> &[StateId] {
        &self.flat[i * self.width..(i + 1) * self.width]
    }

    /// Index of `word(i)|_x`.
    pub fn successor(&self, i: usize, x: Letter) -> usize {
        self.succ[i * self.letters + x as usize] as usize
    }

    pub fn perm(&self, i: usize) -> &[Letter] {
        &self.perms[i * self.letters..(i + 1) * self.letters]
    }

    pub fn words(&self) -> impl Iterator<Item = &[StateId]> {
        (0..self.len()).map(move |i| self.word(i))
    }
}

enum Explore {
    Complete(SectionTable),
    NontrivialPerm,
}

/// BFS over section words. With `stop_on_perm`, aborts at the first member
/// whose permutation is not the identity.
fn explore(aut: &Automaton, root: &[StateId], budget: usize, stop_on_perm: bool) -> Result<Explore> {
    let m = aut.num_letters();
    let width = root.len();
    let mut index: HashMap<Box<[StateId]>, u32> = HashMap::new();
    let mut flat: Vec<StateId> = Vec::new();
    let mut succ: Vec<u32> = Vec::new();
    let mut perms: Vec<Letter> = Vec::new();
    let trivial_word = |w: &[StateId]| aut.identity().is_some_and(|e| w.iter().all(|&s| s == e));

    index.insert(root.into(), 0);
    flat.extend_from_slice(root);
    let mut buf = Vec::with_capacity(width);
    let mut head = 0usize;
    while head < index.len() {
        let cur: Word = flat[head * width..(head + 1) * width].to_vec();
        let skip = trivial_word(&cur);
        for x in 0..m as Letter {
            let y = if skip { x } else { aut.section_into(&cur, x, &mut buf) };
            if stop_on_perm && y != x {
                return Ok(Explore::NontrivialPerm);
            }
            perms.push(y);
            let target = if skip {
                head as u32
            } else if let Some(&j) = index.get(buf.as_slice()) {
                j
            } else {
                let j = index.len() as u32;
                if index.len() >= budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                index.insert(buf.clone().into_boxed_slice(), j);
                flat.extend_from_slice(&buf);
                j
            };
            succ.push(target);
        }
        head += 1;
    }
    Ok(Explore::Complete(SectionTable { width, letters: m, flat, succ, perms }))
}

/// Closure of `w` under taking single-letter sections.
pub fn sections_closure(aut: &Automaton, w: &[StateId], budget: usize) -> Result<SectionTable> {
    aut.check_word(w)?;
    match explore(aut, w, budget, false)? {
        Explore::Complete(t) => Ok(t),
        Explore::NontrivialPerm => unreachable!(),
    }
}

/// `w =_G e` iff every section of `w` induces the trivial permutation.
pub fn is_identity_oracle(aut: &Automaton, w: &[StateId], budget: usize) -> Result<bool> {
    aut.check_word(w)?;
    let root = aut.strip_identity(w);
    Ok(matches!(explore(aut, &root, budget, true)?, Explore::Complete(_)))
}

/// `u =_G v`, decided as triviality of `u·v̄`.
///
/// When the automaton is not closed under inversion the formal inverse is
/// taken in the disjoint union with the inverse automaton.
pub fn are_equal(aut: &Automaton, u: &[StateId], v: &[StateId], budget: usize) -> Result<bool> {
    aut.check_word(u)?;
    aut.check_word(v)?;
    if aut.inverses().is_some() {
        let mut w = u.to_vec();
        w.extend(aut.formal_inverse(v).expect("inverse table present"));
        return is_identity_oracle(aut, &w, budget);
    }
    let ext = aut.with_inverses();
    let mut w = u.to_vec();
    w.extend(ext.formal_inverse(v).expect("inverse table present"));
    is_identity_oracle(&ext, &w, budget)
}

/// Normalized serialization of the minimal transducer of a word's action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Box<[u32]>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Number of states of the minimal transducer.
    pub fn states(&self) -> usize {
        self.0[0] as usize
    }
}

/// Canonical key of the element represented by `w`.
///
/// States of the closure are merged by partition refinement; the classes are
/// numbered breadth-first from the root, and the key lists each class's
/// permutation then successor row in that order.
pub fn canonical_key(aut: &Automaton, w: &[StateId], budget: usize) -> Result<CanonicalKey> {
    aut.check_word(w)?;
    let root = aut.strip_identity(w);
    let table = match explore(aut, &root, budget, false)? {
        Explore::Complete(t) => t,
        Explore::NontrivialPerm => unreachable!(),
    };
    Ok(key_of_table(&table))
}

fn key_of_table(table: &SectionTable) -> CanonicalKey {
    let m = table.letters;
    let class = crate::automaton::refine(
        table.len(),
        |i| table.perm(i).to_vec(),
        |i, x| table.successor(i, x as Letter),
        m,
    );
    let classes = class.iter().copied().max().map_or(0, |c| c + 1);
    let mut rep = vec![usize::MAX; classes];
    for (i, &c) in class.iter().enumerate() {
        if rep[c] == usize::MAX {
            rep[c] = i;
        }
    }
    let mut number = vec![u32::MAX; classes];
    let mut order = Vec::with_capacity(classes);
    number[class[0]] = 0;
    order.push(class[0]);
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        head += 1;
        for x in 0..m {
            let d = class[table.successor(rep[c], x as Letter)];
            if number[d] == u32::MAX {
                number[d] = order.len() as u32;
                order.push(d);
            }
        }
    }
    let mut key = Vec::with_capacity(1 + order.len() * 2 * m);
    key.push(order.len() as u32);
    for &c in &order {
        key.extend(table.perm(rep[c]).iter().map(|&y| y as u32));
        key.extend((0..m).map(|x| number[class[table.successor(rep[c], x as Letter)]]));
    }
    CanonicalKey(key.into_boxed_slice())
}

/// Ball of radius `r` in the Cayley graph for the non-identity states.
///
/// Elements are stored with a shortest representative, discovered
/// breadth-first in a deterministic order.
#[derive(Debug, Clone)]
pub struct Ball {
    gens: Vec<StateId>,
    budget: usize,
    reps: Vec<Word>,
    sphere_starts: Vec<usize>,
    index: HashMap<CanonicalKey, u32>,
}

impl Ball {
    pub fn new(aut: &Automaton, budget: usize) -> Result<Self> {
        let key = canonical_key(aut, &[], budget)?;
        let mut index = HashMap::new();
        index.insert(key, 0);
        Ok(Ball {
            gens: aut.generators(),
            budget,
            reps: vec![Vec::new()],
            sphere_starts: vec![0, 1],
            index,
        })
    }

    pub fn build(aut: &Automaton, radius: usize, budget: usize) -> Result<Self> {
        let mut ball = Ball::new(aut, budget)?;
        ball.extend_to(aut, radius)?;
        Ok(ball)
    }

    pub fn radius(&self) -> usize {
        self.sphere_starts.len() - 2
    }

    pub fn generators(&self) -> &[StateId] {
        &self.gens
    }

    pub fn extend_to(&mut self, aut: &Automaton, radius: usize) -> Result<()> {
        while self.radius() < radius {
            let r = self.radius();
            let sphere = &self.reps[self.sphere_starts[r]..self.sphere_starts[r + 1]];
            let candidates: Vec<Word> = sphere
                .iter()
                .flat_map(|rep| {
                    self.gens.iter().map(move |&g| {
                        let mut w = rep.clone();
                        w.push(g);
                        w
                    })
                })
                .collect();
            let budget = self.budget;
            let keys: Vec<CanonicalKey> = candidates
                .par_iter()
                .map(|w| canonical_key(aut, w, budget))
                .collect::<Result<_>>()?;
            for (w, key) in candidates.into_iter().zip(keys) {
                let next = self.reps.len() as u32;
                if let std::collections::hash_map::Entry::Vacant(slot) = self.index.entry(key) {
                    slot.insert(next);
                    self.reps.push(w);
                }
            }
            self.sphere_starts.push(self.reps.len());
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, id: u32) -> &[StateId] {
        &self.reps[id as usize]
    }

    /// Word length of element `id` (length of its representative).
    pub fn length_of(&self, id: u32) -> usize {
        self.reps[id as usize].len()
    }

    pub fn find_key(&self, key: &CanonicalKey) -> Option<u32> {
        self.index.get(key).copied()
    }

    /// Element id of `w`, or `None` when it lies outside the ball.
    pub fn lookup(&self, aut: &Automaton, w: &[StateId]) -> Result<Option<u32>> {
        Ok(self.find_key(&canonical_key(aut, w, self.budget)?))
    }

    /// `γ(0..=radius)`.
    pub fn growth(&self) -> Vec<u64> {
        self.sphere_starts[1..].iter().map(|&s| s as u64).collect()
    }
}

/// `l_S(w)`: length of a shortest word over the non-identity states equal to `w`.
pub fn word_length(aut: &Automaton, w: &[StateId], radius: usize) -> Result<usize> {
    let ball = Ball::build(aut, radius, DEFAULT_BUDGET)?;
    match ball.lookup(aut, w)? {
        Some(id) => Ok(ball.length_of(id)),
        None => Err(Error::NotInBall(radius)),
    }
}

/// Values `γ(0..=n)` of the growth function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub radius: usize,
    pub values: Vec<u64>,
    /// Names of the generating set used.
    pub generators: Vec<String>,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,gamma\n");
        for (n, g) in self.values.iter().enumerate() {
            s.push_str(&format!("{n},{g}\n"));
        }
        s
    }
}

/// Growth function for the generating set of non-identity states.
///
/// Pass a symmetrized automaton to grow with respect to a set closed under
/// inversion.
pub fn growth(aut: &Automaton, n: usize) -> Result<GrowthTable> {
    let ball = Ball::build(aut, n, DEFAULT_BUDGET)?;
    Ok(GrowthTable {
        radius: n,
        values: ball.growth(),
        generators: ball.gens.iter().map(|&s| aut.state_name(s).to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn closure_of_grigorchuk_b() {
        let g = builtin::grigorchuk();
        let t = sections_closure(&g, &g.parse_word("b").unwrap(), DEFAULT_BUDGET).unwrap();
        let mut names: Vec<String> = t.words().map(|w| g.format_word(w)).collect();
        names.sort();
        assert_eq!(names, ["a", "b", "c", "d", "e"]);
        for i in 0..t.len() {
            assert_eq!(t.word(i).len(), 1);
        }
    }

    #[test]
    fn closure_of_identity_and_aa() {
        let g = builtin::grigorchuk();
        let e = sections_closure(&g, &g.parse_word("e").unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(e.len(), 1);
        let aa = sections_closure(&g, &g.parse_word("aa").unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(aa.len(), 2);
        assert_eq!(g.format_word(aa.word(1)), "ee");
    }

    #[test]
    fn oracle_small_cases() {
        let g = builtin::grigorchuk();
        let w = |s: &str| g.parse_word(s).unwrap();
        assert!(is_identity_oracle(&g, &w("aa"), DEFAULT_BUDGET).unwrap());
        assert!(!is_identity_oracle(&g, &w("a"), DEFAULT_BUDGET).unwrap());
        assert!(is_identity_oracle(&g, &[], DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let g = builtin::grigorchuk();
        let w = g.parse_word("bcbcbcbc").unwrap();
        assert_eq!(sections_closure(&g, &w, 2).unwrap_err(), Error::BudgetExceeded(2));
    }

    #[test]
    fn keys_agree_with_equality() {
        let g = builtin::grigorchuk();
        let w = |s: &str| g.parse_word(s).unwrap();
        let k = |s: &str| canonical_key(&g, &w(s), DEFAULT_BUDGET).unwrap();
        assert_eq!(k("cd"), k("b"));
        assert_eq!(k("aa"), k(""));
        assert_ne!(k("ab"), k("ba"));
        assert!(are_equal(&g, &w("bcd"), &w("e"), DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn basilica_ab_ba_differ() {
        let b = builtin::basilica();
        let w = |s: &str| b.parse_word(s).unwrap();
        assert!(!are_equal(&b, &w("ab"), &w("ba"), DEFAULT_BUDGET).unwrap());
        assert!(are_equal(&b, &w("ab"), &w("ab"), DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn word_lengths() {
        let g = builtin::grigorchuk();
        assert_eq!(word_length(&g, &g.parse_word("e").unwrap(), 3).unwrap(), 0);
        assert_eq!(word_length(&g, &g.parse_word("cd").unwrap(), 3).unwrap(), 1);
        let add = builtin::adding().symmetrize();
        assert_eq!(word_length(&add, &add.parse_word("aaa").unwrap(), 5).unwrap(), 3);
        assert_eq!(word_length(&add, &add.parse_word("aaa").unwrap(), 2), Err(Error::NotInBall(2)));
    }

    #[test]
    fn growth_of_z_and_grigorchuk() {
        let add = builtin::adding().symmetrize();
        let t = growth(&add, 8).unwrap();
        assert_eq!(t.values, (0..=8).map(|n| 2 * n + 1).collect::<Vec<u64>>());
        let g = builtin::grigorchuk().symmetrize();
        let t = growth(&g, 2).unwrap();
        assert_eq!(t.values[..2], [1, 5]);
        assert!(t.to_csv().starts_with("n,gamma\n0,1\n1,5\n"));
    }
}
