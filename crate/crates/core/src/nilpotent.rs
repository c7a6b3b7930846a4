//! Halving solver for groups with an expanding endomorphism `φ`.
//!
//! Instances are ℤ and ℤ² with `φ = ×4`, and the integer Heisenberg group
//! with `φ(x, y, z) = (4x, 4y, 16z)` and multiplication
//! `(x₁,y₁,z₁)(x₂,y₂,z₂) = (x₁+x₂, y₁+y₂, z₁+z₂+x₁y₂)`.
//!
//! A word over the letter set `N` stays at its input length: each stage
//! pairs consecutive non-identity letters `(a, b)` under the carried coset
//! representative `x`, writes `e` over `a` and `c` over `b` where
//! `φ(c)·y = x·a·b`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solvers::{RejectReason, StepReport};

pub type Coord = [i64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GroupKind {
    Z4,
    Z2x4,
    Heisenberg,
}

impl GroupKind {
    pub const ALL: [GroupKind; 3] = [GroupKind::Z4, GroupKind::Z2x4, GroupKind::Heisenberg];

    pub fn mul(self, g: Coord, h: Coord) -> Coord {
        match self {
            GroupKind::Heisenberg => [g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]],
            _ => [g[0] + h[0], g[1] + h[1], g[2] + h[2]],
        }
    }

    pub fn inv(self, g: Coord) -> Coord {
        match self {
            GroupKind::Heisenberg => [-g[0], -g[1], -g[2] + g[0] * g[1]],
            _ => [-g[0], -g[1], -g[2]],
        }
    }

    pub fn phi(self, g: Coord) -> Coord {
        match self {
            GroupKind::Heisenberg => [4 * g[0], 4 * g[1], 16 * g[2]],
            _ => [4 * g[0], 4 * g[1], 4 * g[2]],
        }
    }

    /// `φ⁻¹(g)`, or `None` when `g ∉ φ(G)`.
    pub fn phi_inv(self, g: Coord) -> Option<Coord> {
        let zmod = if self == GroupKind::Heisenberg { 16 } else { 4 };
        (g[0] % 4 == 0 && g[1] % 4 == 0 && g[2] % zmod == 0).then(|| [g[0] / 4, g[1] / 4, g[2] / zmod])
    }

    /// Representative `r` of the right coset `φ(G)·g`.
    pub fn coset_rep(self, g: Coord) -> Coord {
        match self {
            GroupKind::Heisenberg => {
                let y0 = g[1].rem_euclid(4);
                let z0 = (g[2] - 4 * g[0].div_euclid(4) * y0).rem_euclid(16);
                [g[0].rem_euclid(4), y0, z0]
            }
            _ => [g[0].rem_euclid(4), g[1].rem_euclid(4), g[2].rem_euclid(4)],
        }
    }

    fn coset_reps(self) -> Vec<Coord> {
        let (ny, nz) = match self {
            GroupKind::Z4 => (1, 1),
            GroupKind::Z2x4 => (4, 1),
            GroupKind::Heisenberg => (4, 16),
        };
        let mut reps = Vec::new();
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..4 {
                    reps.push([x, y, z]);
                }
            }
        }
        reps.sort();
        reps
    }

    /// Named input letters `(name, element)`.
    pub fn letters(self) -> &'static [(char, Coord)] {
        const Z4: [(char, Coord); 3] = [('e', [0, 0, 0]), ('a', [1, 0, 0]), ('A', [-1, 0, 0])];
        const Z2: [(char, Coord); 5] =
            [('e', [0, 0, 0]), ('a', [1, 0, 0]), ('A', [-1, 0, 0]), ('b', [0, 1, 0]), ('B', [0, -1, 0])];
        const HEIS: [(char, Coord); 7] = [
            ('e', [0, 0, 0]),
            ('a', [1, 0, 0]),
            ('A', [-1, 0, 0]),
            ('b', [0, 1, 0]),
            ('B', [0, -1, 0]),
            ('c', [0, 0, 1]),
            ('C', [0, 0, -1]),
        ];
        match self {
            GroupKind::Z4 => &Z4,
            GroupKind::Z2x4 => &Z2,
            GroupKind::Heisenberg => &HEIS,
        }
    }

    /// Product of a sequence of elements.
    pub fn evaluate(self, elements: impl IntoIterator<Item = Coord>) -> Coord {
        elements.into_iter().fold([0; 3], |acc, g| self.mul(acc, g))
    }

    fn initial_letters(self) -> Vec<Coord> {
        match self {
            GroupKind::Z4 => (-3..=3).map(|j| [j, 0, 0]).collect(),
            GroupKind::Z2x4 => (-3..=3).flat_map(|i| (-3..=3).map(move |j| [i, j, 0])).collect(),
            GroupKind::Heisenberg => self.letters().iter().map(|&(_, g)| g).collect(),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Z4 => "z4",
            GroupKind::Z2x4 => "z2",
            GroupKind::Heisenberg => "heis",
        })
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z4" => Ok(GroupKind::Z4),
            "z2" | "z2x4" => Ok(GroupKind::Z2x4),
            "heis" | "heisenberg" => Ok(GroupKind::Heisenberg),
            other => Err(Error::Invalid(format!("unknown group `{other}` (expected z4, z2 or heis)"))),
        }
    }
}

/// Letter index into `N`; `0` is the identity.
pub type NLetter = u16;

const MISSING: u32 = u32::MAX;
pub const MAX_ENLARGEMENTS: usize = 8;

#[derive(Debug, Clone)]
pub struct NilpotentInstance {
    pub kind: GroupKind,
    elements: Vec<Coord>,
    index: HashMap<Coord, NLetter>,
    reps: Vec<Coord>,
    rep_index: HashMap<Coord, u16>,
    /// `(c << 16) | y` at `(a·|N| + b)·|X| + x`, or `MISSING` when `c ∉ N`.
    rewrite: Vec<u32>,
    /// `rep(x·a)` at `x·|N| + a`.
    action: Vec<u16>,
}

impl NilpotentInstance {
    /// Builds tables over the given letter set (identity is added and put first).
    pub fn with_letters(kind: GroupKind, letters: &[Coord]) -> Self {
        let set: BTreeSet<Coord> = letters.iter().copied().filter(|&g| g != [0; 3]).collect();
        let mut elements = vec![[0; 3]];
        elements.extend(set);
        let index = elements.iter().enumerate().map(|(i, &g)| (g, i as NLetter)).collect();
        let reps = kind.coset_reps();
        let rep_index: HashMap<Coord, u16> = reps.iter().enumerate().map(|(i, &r)| (r, i as u16)).collect();
        let mut inst = NilpotentInstance { kind, elements, index, reps, rep_index, rewrite: Vec::new(), action: Vec::new() };
        inst.fill_tables();
        inst
    }

    fn fill_tables(&mut self) {
        let (n, m) = (self.elements.len(), self.reps.len());
        let kind = self.kind;
        self.action = (0..m)
            .flat_map(|x| (0..n).map(move |a| (x, a)))
            .map(|(x, a)| self.rep_index[&kind.coset_rep(kind.mul(self.reps[x], self.elements[a]))])
            .collect();
        let mut rewrite = vec![MISSING; n * n * m];
        for a in 0..n {
            for b in 0..n {
                let ab = kind.mul(self.elements[a], self.elements[b]);
                for x in 0..m {
                    let (c, y) = self.solve_triple(kind.mul(self.reps[x], ab));
                    if let Some(&ci) = self.index.get(&c) {
                        rewrite[(a * n + b) * m + x] = (u32::from(ci) << 16) | u32::from(y);
                    }
                }
            }
        }
        self.rewrite = rewrite;
    }

    /// `(c, y)` with `φ(c)·y = g`.
    fn solve_triple(&self, g: Coord) -> (Coord, u16) {
        let r = self.kind.coset_rep(g);
        let h = self.kind.mul(g, self.kind.inv(r));
        let c = self.kind.phi_inv(h).expect("g·rep(g)⁻¹ lies in φ(G)");
        (c, self.rep_index[&r])
    }

    pub fn letters(&self) -> &[Coord] {
        &self.elements
    }

    pub fn coset_reps(&self) -> &[Coord] {
        &self.reps
    }

    pub fn letter_of(&self, g: Coord) -> Option<NLetter> {
        self.index.get(&g).copied()
    }

    /// Rewrite entry `(a, b, x) ↦ (c, y)`, or `None` when `c ∉ N`.
    pub fn rewrite(&self, a: NLetter, b: NLetter, x: u16) -> Option<(NLetter, u16)> {
        let n = self.elements.len();
        let v = self.rewrite[(a as usize * n + b as usize) * self.reps.len() + x as usize];
        (v != MISSING).then_some(((v >> 16) as NLetter, (v & 0xffff) as u16))
    }

    pub fn act(&self, x: u16, a: NLetter) -> u16 {
        self.action[x as usize * self.elements.len() + a as usize]
    }

    pub fn evaluate(&self, w: &[NLetter]) -> Coord {
        self.kind.evaluate(w.iter().map(|&a| self.elements[a as usize]))
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<NLetter>> {
        text.chars()
            .filter(|c| !c.is_whitespace() && *c != ',' && *c != '.')
            .map(|ch| {
                self.kind
                    .letters()
                    .iter()
                    .find(|&&(name, _)| name == ch)
                    .and_then(|&(_, g)| self.letter_of(g))
                    .ok_or_else(|| Error::UnknownLetter(ch.to_string()))
            })
            .collect()
    }

    /// Letter names where available, coordinates otherwise.
    pub fn format_word(&self, w: &[NLetter]) -> String {
        let names = self.kind.letters();
        w.iter()
            .map(|&a| {
                let g = self.elements[a as usize];
                match names.iter().find(|&&(_, h)| h == g) {
                    Some(&(name, _)) => name.to_string(),
                    None => format!("({},{},{})", g[0], g[1], g[2]),
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Builds an instance, enlarging `N` by the missing rewrite outputs (and
/// their inverses) until the table closes.
pub fn build_instance(kind: GroupKind) -> Result<NilpotentInstance> {
    let mut letters = kind.initial_letters();
    letters.extend(letters.clone().into_iter().map(|g| kind.inv(g)));
    for _ in 0..=MAX_ENLARGEMENTS {
        let inst = NilpotentInstance::with_letters(kind, &letters);
        let missing = missing_outputs(&inst);
        if missing.is_empty() {
            return Ok(inst);
        }
        for c in missing {
            letters.push(c);
            letters.push(kind.inv(c));
        }
    }
    Err(Error::ClosureFailure(MAX_ENLARGEMENTS))
}

fn missing_outputs(inst: &NilpotentInstance) -> BTreeSet<Coord> {
    let n = inst.elements.len();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            let ab = inst.kind.mul(inst.elements[a], inst.elements[b]);
            for x in 0..inst.reps.len() {
                if inst.rewrite(a as NLetter, b as NLetter, x as u16).is_none() {
                    out.insert(inst.solve_triple(inst.kind.mul(inst.reps[x], ab)).0);
                }
            }
        }
    }
    out
}

/// First triple `(a, b, x)` whose entry is missing or wrong in coordinates.
pub fn verify_table_closure(inst: &NilpotentInstance) -> Option<(Coord, Coord, Coord)> {
    let kind = inst.kind;
    let n = inst.elements.len();
    for a in 0..n {
        for b in 0..n {
            for x in 0..inst.reps.len() {
                let (ga, gb, gx) = (inst.elements[a], inst.elements[b], inst.reps[x]);
                let ok = inst.rewrite(a as NLetter, b as NLetter, x as u16).is_some_and(|(c, y)| {
                    let lhs = kind.mul(kind.phi(inst.elements[c as usize]), inst.reps[y as usize]);
                    lhs == kind.mul(kind.mul(gx, ga), gb)
                });
                if !ok {
                    return Some((ga, gb, gx));
                }
            }
        }
    }
    None
}

/// Coset representative (as an index into the representative list) of the word.
pub fn coset_scan(inst: &NilpotentInstance, w: &[NLetter]) -> u16 {
    w.iter().fold(0, |x, &a| inst.act(x, a))
}

/// One halving pass in place; returns the number of cells written.
fn halve_in_place(inst: &NilpotentInstance, w: &mut [NLetter]) -> Result<u64> {
    let mut x = 0u16;
    let mut pending: Option<usize> = None;
    let mut writes = 0;
    for j in 0..w.len() {
        if w[j] == 0 {
            continue;
        }
        match pending.take() {
            None => pending = Some(j),
            Some(i) => {
                let (c, y) = inst.rewrite(w[i], w[j], x).ok_or(Error::ClosureFailure(0))?;
                w[i] = 0;
                w[j] = c;
                x = y;
                writes += 2;
            }
        }
    }
    if let Some(i) = pending {
        let (c, y) = inst.rewrite(w[i], 0, x).ok_or(Error::ClosureFailure(0))?;
        w[i] = c;
        x = y;
        writes += 1;
    }
    debug_assert_eq!(x, 0);
    Ok(writes)
}

/// `w′` with `|w′| = |w|` and `w′ =_G φ⁻¹(w)`. Requires `w ∈ φ(G)`.
pub fn halve(inst: &NilpotentInstance, w: &[NLetter]) -> Result<Vec<NLetter>> {
    if coset_scan(inst, w) != 0 {
        return Err(Error::Invalid("word is not in the image of φ".into()));
    }
    let mut out = w.to_vec();
    halve_in_place(inst, &mut out)?;
    Ok(out)
}

/// Accept iff `w =_G e`. `tape_lengths` records non-identity letters per stage.
pub fn solve_nilpotent(inst: &NilpotentInstance, w: &[NLetter]) -> Result<StepReport> {
    let n = inst.elements.len();
    if let Some(&bad) = w.iter().find(|&&a| a as usize >= n) {
        return Err(Error::UnknownLetter(bad.to_string()));
    }
    let mut report = StepReport::new("nilpotent", w.len());
    let mut tape = w.to_vec();
    loop {
        report.steps += tape.len() as u64;
        let live = tape.iter().filter(|&&a| a != 0).count();
        if live == 0 {
            return Ok(report);
        }
        report.stages += 1;
        report.tape_lengths.push(live);
        report.max_segments.push(tape.len());
        report.steps += tape.len() as u64;
        if coset_scan(inst, &tape) != 0 {
            return Ok(report.reject(RejectReason::Coset));
        }
        report.steps += tape.len() as u64 + halve_in_place(inst, &mut tape)?;
    }
}
