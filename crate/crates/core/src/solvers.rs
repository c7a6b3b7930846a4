//! Stage-pipeline solvers with elementary-step accounting.
//!
//! One elementary step is one symbol read or written on any simulated tape.
//! All solvers take the symmetrized automaton (`Automaton::symmetrize`) and
//! words over its states.

use std::collections::HashMap;

use serde::Serialize;

use crate::activity::{self, ActivityClass};
use crate::automaton::{Automaton, Letter, StateId, Word};
use crate::contraction::{self, ContractionCertificate, Mode};
use crate::error::{Error, Result};
use crate::word_engine::{self, DEFAULT_BUDGET};

/// Segment separator `#` on a tape.
pub const SEP: StateId = StateId::MAX;

/// A word over `S ∪ {#}`, kept normalized: no leading, trailing or repeated `#`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TapeWord(Vec<StateId>);

impl TapeWord {
    pub fn from_word(w: &[StateId]) -> Self {
        TapeWord::from_symbols(w.to_vec())
    }

    /// Normalizes an arbitrary symbol sequence.
    pub fn from_symbols(symbols: Vec<StateId>) -> Self {
        let mut out = Vec::with_capacity(symbols.len());
        for s in symbols {
            if s == SEP && out.last().is_none_or(|&l| l == SEP) {
                continue;
            }
            out.push(s);
        }
        if out.last() == Some(&SEP) {
            out.pop();
        }
        TapeWord(out)
    }

    pub fn symbols(&self) -> &[StateId] {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &[StateId]> {
        self.0.split(|&s| s == SEP).filter(|s| !s.is_empty())
    }

    /// Number of non-separator symbols.
    pub fn letters(&self) -> usize {
        self.0.iter().filter(|&&s| s != SEP).count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Why a run rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    ShortSegmentNontrivial,
    Permutation,
    Coset,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub method: String,
    pub input_len: usize,
    pub stages: usize,
    /// Letters on the tape at the start of each stage.
    pub tape_lengths: Vec<usize>,
    /// Longest segment at the start of each stage.
    pub max_segments: Vec<usize>,
    pub steps: u64,
    pub table_lookups: u64,
    pub oracle_calls: u64,
    pub verdict: Verdict,
    pub reject_reason: Option<RejectReason>,
}

impl StepReport {
    pub(crate) fn new(method: &str, input_len: usize) -> Self {
        StepReport {
            method: method.to_string(),
            input_len,
            stages: 0,
            tape_lengths: Vec::new(),
            max_segments: Vec::new(),
            steps: 0,
            table_lookups: 0,
            oracle_calls: 0,
            verdict: Verdict::Accept,
            reject_reason: None,
        }
    }

    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub(crate) fn reject(mut self, reason: RejectReason) -> Self {
        self.verdict = Verdict::Reject;
        self.reject_reason = Some(reason);
        self
    }
}

/// `M_x` for every `x ∈ X^k`: table lookups on blocks of length `L`, a direct
/// section on the tail.
pub struct BlockMachine<'a> {
    cert: &'a ContractionCertificate,
    pow: Automaton,
    position: Vec<u32>,
}

impl<'a> BlockMachine<'a> {
    pub fn new(sym: &Automaton, cert: &'a ContractionCertificate) -> Result<Self> {
        if sym.generators() != cert.generators() {
            return Err(Error::CertificateMismatch("generating set differs".into()));
        }
        let mut position = vec![u32::MAX; sym.num_states()];
        for (i, &g) in cert.generators().iter().enumerate() {
            position[g as usize] = i as u32;
        }
        Ok(BlockMachine { cert, pow: sym.alphabet_power(cert.power), position })
    }

    pub fn letters(&self) -> usize {
        self.pow.num_letters()
    }

    pub fn power_automaton(&self) -> &Automaton {
        &self.pow
    }

    /// Output of `M_x` on an e-free word and the letter carried out of it
    /// (`π_w(x)` over `X^k`).
    fn run(&self, x: Letter, w: &[StateId], lookups: &mut u64, out: &mut Word) -> Result<Letter> {
        let l = self.cert.block_len;
        let g = self.cert.generators().len();
        let mut x = x;
        let mut chunks = w.chunks_exact(l);
        for block in &mut chunks {
            let mut idx = 0usize;
            for &s in block {
                let p = self.position[s as usize];
                if p == u32::MAX {
                    return Err(Error::CertificateMismatch(format!("letter {s} is not a generator")));
                }
                idx = idx * g + p as usize;
            }
            out.extend_from_slice(self.cert.entry(idx, x));
            *lookups += 1;
            x = self.pow.image_of_letter(block, x);
        }
        let e = self.pow.identity();
        for &s in chunks.remainder() {
            let t = self.pow.next(s, x);
            if Some(t) != e {
                out.push(t);
            }
            x = self.pow.out(s, x);
        }
        Ok(x)
    }
}

/// `M_x(w)` with identity letters of `w` removed first.
pub fn mx_step(sym: &Automaton, cert: &ContractionCertificate, x: Letter, w: &[StateId]) -> Result<Word> {
    let machine = BlockMachine::new(sym, cert)?;
    sym.check_word(w)?;
    if x as usize >= machine.letters() {
        return Err(Error::UnknownLetter(x.to_string()));
    }
    let w = sym.strip_identity(w);
    let mut out = Vec::new();
    machine.run(x, &w, &mut 0, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cleanup {
    None,
    FreeReduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GuardKind {
    Contracting,
    Polynomial,
}

struct Engine<'a> {
    sym: &'a Automaton,
    machine: Option<BlockMachine<'a>>,
    /// Segments shorter than this are decided by the oracle.
    short: usize,
    cleanup: Cleanup,
    reset: bool,
    guard: usize,
    guard_kind: GuardKind,
    memo: HashMap<Word, bool>,
}

fn log2(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

fn free_reduce(sym: &Automaton, w: &mut Word) {
    let mut top = 0;
    for i in 0..w.len() {
        let s = w[i];
        if top > 0 && sym.inverse_of(w[top - 1]) == Some(s) {
            top -= 1;
        } else {
            w[top] = s;
            top += 1;
        }
    }
    w.truncate(top);
}

impl<'a> Engine<'a> {
    fn run(mut self, method: &str, input: &[StateId]) -> Result<StepReport> {
        self.sym.check_word(input)?;
        let n = input.len();
        let mut report = StepReport::new(method, n);
        let stripped = self.sym.strip_identity(input);
        report.steps += (n + stripped.len()) as u64;
        let mut tape = TapeWord::from_word(&stripped);
        let letters = match &self.machine {
            Some(m) => m.letters(),
            None => self.sym.num_letters(),
        };
        let mut buf = Vec::new();
        loop {
            if tape.is_empty() {
                return Ok(report);
            }
            if report.stages >= self.guard {
                return Err(match self.guard_kind {
                    GuardKind::Contracting => Error::NonTermination(self.guard),
                    GuardKind::Polynomial => Error::StageGuardExceeded(self.guard),
                });
            }
            report.stages += 1;
            report.tape_lengths.push(tape.letters());
            report.max_segments.push(tape.segments().map(<[_]>::len).max().unwrap_or(0));

            let mut long: Vec<&[StateId]> = Vec::new();
            for seg in tape.segments() {
                report.steps += seg.len() as u64;
                if seg.len() < self.short {
                    if !self.short_trivial(seg, &mut report)? {
                        return Ok(report.reject(RejectReason::ShortSegmentNontrivial));
                    }
                    continue;
                }
                if !self.sym.perm_of_word_unchecked(seg).is_identity() {
                    return Ok(report.reject(RejectReason::Permutation));
                }
                long.push(seg);
            }

            let mut tapes: Vec<Vec<StateId>> = vec![Vec::new(); letters];
            for seg in &long {
                for (x, tape_x) in tapes.iter_mut().enumerate() {
                    let x = x as Letter;
                    buf.clear();
                    report.steps += seg.len() as u64;
                    let carried = self.section(x, seg, &mut buf, &mut report)?;
                    if carried != x {
                        return Ok(report.reject(RejectReason::Permutation));
                    }
                    if self.cleanup == Cleanup::FreeReduce {
                        free_reduce(self.sym, &mut buf);
                    }
                    report.steps += buf.len() as u64 + 1;
                    tape_x.extend_from_slice(&buf);
                    tape_x.push(SEP);
                }
            }
            let joined: Vec<StateId> = tapes.concat();
            let next = TapeWord::from_symbols(joined.clone());
            report.steps += (joined.len() + next.symbols().len()) as u64;
            tape = next;
        }
    }

    fn short_trivial(&mut self, seg: &[StateId], report: &mut StepReport) -> Result<bool> {
        if let Some(&t) = self.memo.get(seg) {
            return Ok(t);
        }
        report.oracle_calls += 1;
        let t = word_engine::is_identity_oracle(self.sym, seg, DEFAULT_BUDGET)?;
        self.memo.insert(seg.to_vec(), t);
        Ok(t)
    }

    /// `M_x` on one segment, e-free; returns the carried letter.
    fn section(&self, x: Letter, seg: &[StateId], out: &mut Word, report: &mut StepReport) -> Result<Letter> {
        if self.reset {
            let (aut, e) = match &self.machine {
                Some(m) => (m.power_automaton(), m.power_automaton().identity()),
                None => (self.sym, self.sym.identity()),
            };
            let mut y = x;
            for &s in seg {
                let t = aut.next(s, y);
                if Some(t) != e {
                    out.push(t);
                }
                y = aut.out(s, y);
            }
            if out.as_slice() == seg {
                out.clear();
                return Ok(y);
            }
            if let Some(m) = &self.machine {
                out.clear();
                return m.run(x, seg, &mut report.table_lookups, out);
            }
            return Ok(y);
        }
        let m = self.machine.as_ref().expect("contracting engine has a block machine");
        m.run(x, seg, &mut report.table_lookups, out)
    }
}

fn contracting_guard(cert: &ContractionCertificate, n: usize) -> usize {
    match cert.mode {
        Mode::Item2 => {
            let l = log2(n) + 1.0;
            (4.0 * l * l).ceil() as usize
        }
        Mode::Item1 | Mode::Item3 => {
            let lambda = cert.shrink_factor();
            let lp = cert.lambda.0 as f64 / cert.lambda.1 as f64;
            let settle = 2.0 * cert.block_len as f64 / (1.0 - lp);
            ((n.max(2) as f64).ln() / (1.0 / lambda).ln()).ceil() as usize + settle.ceil() as usize + 2
        }
    }
}

/// Stage loop with table lookups and no cleanup beyond dropping `e`.
pub fn solve_contracting(sym: &Automaton, cert: &ContractionCertificate, input: &[StateId]) -> Result<StepReport> {
    Engine {
        sym,
        machine: Some(BlockMachine::new(sym, cert)?),
        short: cert.block_len,
        cleanup: Cleanup::None,
        reset: false,
        guard: contracting_guard(cert, input.len()),
        guard_kind: GuardKind::Contracting,
        memo: HashMap::new(),
    }
    .run("contracting", input)
}

/// [`solve_contracting`] with every `M_x` output freely reduced.
pub fn solve_bounded(sym: &Automaton, cert: &ContractionCertificate, input: &[StateId]) -> Result<StepReport> {
    sym.identity().ok_or(Error::NoIdentityState)?;
    Engine {
        sym,
        machine: Some(BlockMachine::new(sym, cert)?),
        short: cert.block_len,
        cleanup: Cleanup::FreeReduce,
        reset: false,
        guard: contracting_guard(cert, input.len()),
        guard_kind: GuardKind::Contracting,
        memo: HashMap::new(),
    }
    .run("bounded", input)
}

/// Stage multiplier for the polynomial guard `c·(log₂ n + 1)^{d+1} + c`.
pub const POLY_GUARD_C: f64 = 8.0;

/// Reset-rule solver for loopified polynomial automata: `M_x(w)` is `w|_x`
/// without `e`, or the empty word when that equals `w`. With a certificate,
/// non-reset outputs come from its tables instead.
pub fn solve_polynomial(
    sym: &Automaton,
    degree: usize,
    cert: Option<&ContractionCertificate>,
    input: &[StateId],
) -> Result<StepReport> {
    sym.identity().ok_or(Error::NoIdentityState)?;
    activity::ensure_loopified(sym)?;
    let l = log2(input.len()) + 1.0;
    let guard = (POLY_GUARD_C * l.powi(degree as i32 + 1) + POLY_GUARD_C).ceil() as usize;
    Engine {
        sym,
        machine: cert.map(|c| BlockMachine::new(sym, c)).transpose()?,
        short: cert.map_or(1, |c| c.block_len),
        cleanup: Cleanup::None,
        reset: true,
        guard,
        guard_kind: GuardKind::Polynomial,
        memo: HashMap::new(),
    }
    .run("polynomial", input)
}

/// The exponential closure oracle with the same report shape. Steps are
/// section-word symbols written.
pub fn solve_oracle(sym: &Automaton, input: &[StateId]) -> Result<StepReport> {
    sym.check_word(input)?;
    let mut report = StepReport::new("oracle", input.len());
    report.oracle_calls = 1;
    let root = sym.strip_identity(input);
    if !sym.perm_of_word_unchecked(&root).is_identity() {
        report.steps = root.len() as u64;
        return Ok(report.reject(RejectReason::Oracle));
    }
    let table = word_engine::sections_closure(sym, &root, DEFAULT_BUDGET)?;
    report.steps = (table.len() * table.word_len().max(1)) as u64;
    let trivial = (0..table.len()).all(|i| table.perm(i).iter().enumerate().all(|(x, &y)| x == y as usize));
    Ok(if trivial { report } else { report.reject(RejectReason::Oracle) })
}

/// Certificate bounds tried by [`solve_auto`].
pub const AUTO_BOUNDS: (usize, usize) = (10, 3);

/// Picks a solver: bounded or contracting when a certificate exists,
/// polynomial when the activity is polynomial, the oracle otherwise.
/// `aut` is the original automaton; `input` is over `aut.symmetrize()`.
/// Method chosen once per automaton; reusable across many inputs.
#[derive(Debug, Clone)]
pub struct AutoSolver {
    sym: Automaton,
    plan: Plan,
}

#[derive(Debug, Clone)]
enum Plan {
    Bounded(ContractionCertificate),
    Contracting(ContractionCertificate),
    Polynomial(Automaton, usize),
    Oracle,
}

impl AutoSolver {
    pub fn new(aut: &Automaton) -> Result<Self> {
        let sym = aut.symmetrize();
        let class = if sym.identity().is_some() { Some(activity::classify_activity(&sym)?) } else { None };
        let plan = match contraction::find_certificate(aut, AUTO_BOUNDS.0, AUTO_BOUNDS.1) {
            Ok(cert) => match class {
                Some(ActivityClass::Bounded { .. }) => Plan::Bounded(cert),
                _ => Plan::Contracting(cert),
            },
            Err(Error::NotFound { .. }) => match class {
                Some(ActivityClass::Polynomial { degree }) => Plan::Polynomial(activity::loopify(&sym)?.0, degree),
                _ => Plan::Oracle,
            },
            Err(e) => return Err(e),
        };
        Ok(AutoSolver { sym, plan })
    }

    /// The symmetrized automaton inputs are written over.
    pub fn automaton(&self) -> &Automaton {
        &self.sym
    }

    pub fn method(&self) -> &'static str {
        match self.plan {
            Plan::Bounded(_) => "bounded",
            Plan::Contracting(_) => "contracting",
            Plan::Polynomial(..) => "polynomial",
            Plan::Oracle => "oracle",
        }
    }

    pub fn solve(&self, input: &[StateId]) -> Result<StepReport> {
        match &self.plan {
            Plan::Bounded(cert) => solve_bounded(&self.sym, cert, input),
            Plan::Contracting(cert) => solve_contracting(&self.sym, cert, input),
            Plan::Polynomial(looped, degree) => solve_polynomial(looped, *degree, None, input),
            Plan::Oracle => solve_oracle(&self.sym, input),
        }
    }
}

pub fn solve_auto(aut: &Automaton, input: &[StateId]) -> Result<StepReport> {
    AutoSolver::new(aut)?.solve(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::contraction::Scanner;

    fn grig_cert(l: usize, k: usize, mode: Mode) -> (Automaton, ContractionCertificate) {
        let s = Scanner::new(&builtin::grigorchuk(), l).unwrap();
        let c = s.certify(l, k, mode).unwrap().unwrap();
        (s.automaton().clone(), c)
    }

    #[test]
    fn tape_normalization() {
        let t = TapeWord::from_symbols(vec![SEP, 1, SEP, SEP, 2, 3, SEP]);
        assert_eq!(t.symbols(), &[1, SEP, 2, 3]);
        assert_eq!(t.segments().count(), 2);
        assert_eq!(t.letters(), 3);
        assert!(TapeWord::from_symbols(vec![SEP, SEP]).is_empty());
    }

    #[test]
    fn grigorchuk_small_verdicts() {
        let (sym, cert) = grig_cert(2, 1, Mode::Item1);
        let run = |w: &str| solve_contracting(&sym, &cert, &sym.parse_word(w).unwrap()).unwrap();
        let r = run("aa");
        assert!(r.accepted());
        assert!(r.stages <= 1);
        assert!(!run("a").accepted());
        assert!(!run("ab").accepted());
        let empty = run("");
        assert!(empty.accepted());
        assert_eq!(empty.stages, 0);
        assert!(run("bcd").accepted());
    }

    #[test]
    fn mx_tail_only_is_a_section() {
        let (sym, cert) = grig_cert(2, 1, Mode::Item1);
        let b = sym.parse_word("b").unwrap();
        let out = mx_step(&sym, &cert, 1, &b).unwrap();
        assert_eq!(sym.format_word(&out), "c");
    }

    #[test]
    fn free_reduction() {
        let sym = builtin::basilica().symmetrize();
        let mut w = sym.parse_word("a b B A b").unwrap();
        free_reduce(&sym, &mut w);
        assert_eq!(sym.format_word(&w), "b");
    }

    #[test]
    fn short_segments_skip_tables() {
        let (sym, cert) = grig_cert(10, 3, Mode::Item3);
        let r = solve_contracting(&sym, &cert, &sym.parse_word("abcd").unwrap()).unwrap();
        assert_eq!(r.table_lookups, 0);
        assert_eq!(r.reject_reason, Some(RejectReason::ShortSegmentNontrivial));
    }
}
