//! Bounded search for contraction certificates.
//!
//! A certificate fixes a block length `L`, an alphabet power `k` and, for every
//! block `w ∈ S^L` and letter `x ∈ X^k`, a shortest word `w_x =_G w|_x`. The
//! three modes are the three length conditions a block table can satisfy:
//!
//! * `item1`: `|w_x| < L` for every `x`;
//! * `item2`: `Σ_x |w_x| ≤ L`;
//! * `item3`: `Σ_x |w_x| < L`.
//!
//! `S` is the non-identity part of the symmetrized generating set.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{Automaton, Letter, StateId, Word};
use crate::error::{Error, Result};
use crate::word_engine::{self, canonical_key, Ball, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    Item1,
    Item2,
    Item3,
}

impl Mode {
    fn holds(self, lengths: &[usize], block_len: usize) -> bool {
        if lengths.iter().any(|&l| l > block_len) {
            return false;
        }
        let total: usize = lengths.iter().sum();
        match self {
            Mode::Item1 => lengths.iter().all(|&l| l < block_len),
            Mode::Item2 => total <= block_len,
            Mode::Item3 => total < block_len,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Item1 => "item1",
            Mode::Item2 => "item2",
            Mode::Item3 => "item3",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "item1" => Ok(Mode::Item1),
            "item2" => Ok(Mode::Item2),
            "item3" => Ok(Mode::Item3),
            other => Err(Error::Invalid(format!("unknown mode `{other}`"))),
        }
    }
}

/// Result of checking one `(L, k, mode)` triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    /// Lexicographically least failing block, with `l_S(w|_x)` per `x`
    /// (`None` when the section is longer than the ball radius).
    Fail { witness: Word, lengths: Vec<Option<usize>> },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }
}

/// Shared state for scanning all blocks of one automaton.
pub struct Scanner {
    sym: Automaton,
    ball: Ball,
    gens: Vec<StateId>,
}

const CHUNK: usize = 1024;
const OUTSIDE: u32 = u32::MAX;

impl Scanner {
    /// Symmetrizes `aut` and builds the length ball up to `max_len`.
    pub fn new(aut: &Automaton, max_len: usize) -> Result<Self> {
        let sym = aut.symmetrize();
        let ball = Ball::build(&sym, max_len, DEFAULT_BUDGET)?;
        let gens = sym.generators();
        Ok(Scanner { sym, ball, gens })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.sym
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    fn block_count(&self, block_len: usize) -> Result<usize> {
        (self.gens.len() as u64)
            .checked_pow(block_len as u32)
            .filter(|&c| c < u32::MAX as u64)
            .map(|c| c as usize)
            .ok_or_else(|| Error::Invalid(format!("|S|^{block_len} blocks is too many to enumerate")))
    }

    fn block(&self, mut idx: usize, block_len: usize, out: &mut Word) {
        out.clear();
        out.resize(block_len, 0);
        let g = self.gens.len();
        for slot in out.iter_mut().rev() {
            *slot = self.gens[idx % g];
            idx /= g;
        }
    }

    /// Ball element of each section `w|_x`, `x ∈ X^k`.
    fn sections(
        &self,
        power: &Automaton,
        w: &[StateId],
        memo: &mut HashMap<Word, u32>,
        buf: &mut Word,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        out.clear();
        for x in 0..power.num_letters() as Letter {
            power.section_into(w, x, buf);
            let reduced = self.sym.strip_identity(buf);
            let id = match memo.get(&reduced) {
                Some(&id) => id,
                None => {
                    let key = canonical_key(&self.sym, &reduced, DEFAULT_BUDGET)?;
                    let id = self.ball.find_key(&key).unwrap_or(OUTSIDE);
                    memo.insert(reduced, id);
                    id
                }
            };
            out.push(id);
        }
        Ok(())
    }

    fn lengths(&self, ids: &[u32]) -> Vec<Option<usize>> {
        ids.iter()
            .map(|&id| (id != OUTSIDE).then(|| self.ball.length_of(id)))
            .collect()
    }

    /// Enumerates every block in parallel; stops at the least failing one.
    /// With `keep`, returns the element table (block-major, then letter).
    fn scan(&self, block_len: usize, power: usize, mode: Mode, keep: bool) -> Result<(CheckOutcome, Vec<u32>)> {
        assert!(block_len >= 1 && power >= 1);
        if block_len > self.ball.radius() {
            return Err(Error::Invalid(format!("ball radius {} below L = {block_len}", self.ball.radius())));
        }
        let pow = self.sym.alphabet_power(power);
        let total = self.block_count(block_len)?;
        let chunks = total.div_ceil(CHUNK);
        let first_fail = AtomicUsize::new(usize::MAX);
        let letters = pow.num_letters();

        let results: Vec<Result<Option<Vec<u32>>>> = (0..chunks)
            .into_par_iter()
            .map_init(
                || (HashMap::new(), Vec::new(), Vec::new(), Vec::new()),
                |(memo, block, buf, ids), chunk| {
                    let start = chunk * CHUNK;
                    if start > first_fail.load(Ordering::Relaxed) {
                        return Ok(None);
                    }
                    let end = (start + CHUNK).min(total);
                    let mut table = if keep { Vec::with_capacity((end - start) * letters) } else { Vec::new() };
                    for idx in start..end {
                        self.block(idx, block_len, block);
                        self.sections(&pow, block, memo, buf, ids)?;
                        let ok = ids.iter().all(|&id| id != OUTSIDE)
                            && mode.holds(
                                &ids.iter().map(|&id| self.ball.length_of(id)).collect::<Vec<_>>(),
                                block_len,
                            );
                        if !ok {
                            first_fail.fetch_min(idx, Ordering::Relaxed);
                            return Ok(None);
                        }
                        if keep {
                            table.extend_from_slice(ids);
                        }
                    }
                    Ok(Some(table))
                },
            )
            .collect();

        let mut table = Vec::new();
        for r in results {
            if let Some(part) = r? {
                table.extend(part);
            }
        }
        let fail = first_fail.load(Ordering::Relaxed);
        if fail != usize::MAX {
            let mut witness = Vec::new();
            self.block(fail, block_len, &mut witness);
            let mut ids = Vec::new();
            self.sections(&pow, &witness, &mut HashMap::new(), &mut Vec::new(), &mut ids)?;
            return Ok((CheckOutcome::Fail { witness, lengths: self.lengths(&ids) }, Vec::new()));
        }
        Ok((CheckOutcome::Pass, table))
    }

    pub fn check(&self, block_len: usize, power: usize, mode: Mode) -> Result<CheckOutcome> {
        Ok(self.scan(block_len, power, mode, false)?.0)
    }

    /// Checks a seeded random sample of blocks instead of all of `S^L`.
    pub fn check_sample(
        &self,
        block_len: usize,
        power: usize,
        mode: Mode,
        samples: usize,
        seed: u64,
    ) -> Result<CheckOutcome> {
        let pow = self.sym.alphabet_power(power);
        let total = self.block_count(block_len)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks: Vec<usize> = (0..samples).map(|_| rng.gen_range(0..total.max(1))).collect();
        if self.gens.is_empty() {
            return Ok(CheckOutcome::Pass);
        }
        picks.sort_unstable();
        picks.dedup();
        let failures: Vec<Option<(usize, Vec<u32>)>> = picks
            .par_iter()
            .map_init(
                || (HashMap::new(), Vec::new(), Vec::new()),
                |(memo, block, buf), &idx| -> Result<Option<(usize, Vec<u32>)>> {
                    self.block(idx, block_len, block);
                    let mut ids = Vec::new();
                    self.sections(&pow, block, memo, buf, &mut ids)?;
                    let ok = ids.iter().all(|&id| id != OUTSIDE)
                        && mode.holds(&ids.iter().map(|&id| self.ball.length_of(id)).collect::<Vec<_>>(), block_len);
                    Ok((!ok).then_some((idx, ids)))
                },
            )
            .collect::<Result<_>>()?;
        match failures.into_iter().flatten().next() {
            Some((idx, ids)) => {
                let mut witness = Vec::new();
                self.block(idx, block_len, &mut witness);
                Ok(CheckOutcome::Fail { witness, lengths: self.lengths(&ids) })
            }
            None => Ok(CheckOutcome::Pass),
        }
    }

    /// Builds the full certificate, or reports the least failing block.
    pub fn certify(&self, block_len: usize, power: usize, mode: Mode) -> Result<std::result::Result<ContractionCertificate, CheckOutcome>> {
        let (outcome, table) = self.scan(block_len, power, mode, true)?;
        if !outcome.passed() {
            return Ok(Err(outcome));
        }
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut reps: Vec<Word> = Vec::new();
        let entries = table
            .iter()
            .map(|&id| {
                *remap.entry(id).or_insert_with(|| {
                    reps.push(self.ball.rep(id).to_vec());
                    reps.len() as u32 - 1
                })
            })
            .collect();
        Ok(Ok(ContractionCertificate::new(
            mode,
            block_len,
            power,
            self.gens.clone(),
            self.sym.num_letters().pow(power as u32),
            entries,
            reps,
        )))
    }
}

/// `(L, k, mode)` together with the table of shortest section words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionCertificate {
    pub mode: Mode,
    pub block_len: usize,
    pub power: usize,
    /// `λ′ = max |w_x| / L`, reduced.
    pub lambda: (u64, u64),
    generators: Vec<StateId>,
    letters: usize,
    entries: Vec<u32>,
    reps: Vec<Word>,
}

impl ContractionCertificate {
    fn new(
        mode: Mode,
        block_len: usize,
        power: usize,
        generators: Vec<StateId>,
        letters: usize,
        entries: Vec<u32>,
        reps: Vec<Word>,
    ) -> Self {
        let longest = entries.iter().map(|&i| reps[i as usize].len()).max().unwrap_or(0) as u64;
        let g = gcd(longest, block_len as u64).max(1);
        let lambda = if longest == 0 { (0, 1) } else { (longest / g, block_len as u64 / g) };
        ContractionCertificate { mode, block_len, power, lambda, generators, letters, entries, reps }
    }

    pub fn generators(&self) -> &[StateId] {
        &self.generators
    }

    /// Size of `X^k`.
    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn num_blocks(&self) -> usize {
        self.entries.len() / self.letters.max(1)
    }

    /// `λ = λ′ + (1 − λ′)/2`, the per-stage shrink factor of the block machine.
    pub fn shrink_factor(&self) -> f64 {
        let l = self.lambda.0 as f64 / self.lambda.1 as f64;
        l + (1.0 - l) / 2.0
    }

    /// Index of a block in `S^L`, or `None` if it uses a letter outside `S`.
    pub fn block_index(&self, block: &[StateId]) -> Option<usize> {
        if block.len() != self.block_len {
            return None;
        }
        let g = self.generators.len();
        block.iter().try_fold(0usize, |acc, s| {
            let pos = self.generators.iter().position(|t| t == s)?;
            Some(acc * g + pos)
        })
    }

    pub fn block_at(&self, mut idx: usize) -> Word {
        let g = self.generators.len();
        let mut w = vec![0; self.block_len];
        for slot in w.iter_mut().rev() {
            *slot = self.generators[idx % g];
            idx /= g;
        }
        w
    }

    /// `w_x` for block number `block` and letter `x ∈ X^k`.
    pub fn entry(&self, block: usize, x: Letter) -> &[StateId] {
        &self.reps[self.entries[block * self.letters + x as usize] as usize]
    }

    /// Text form: header `mode L k num/den`, then `sect: <w> <x> -> <w_x>` lines.
    pub fn to_text(&self, sym: &Automaton) -> String {
        let pow = sym.alphabet_power(self.power);
        let mut s = format!("{} {} {} {}/{}\n", self.mode, self.block_len, self.power, self.lambda.0, self.lambda.1);
        for b in 0..self.num_blocks() {
            let w = sym.format_word_with(&self.block_at(b), ".");
            for x in 0..self.letters as Letter {
                s.push_str(&format!(
                    "sect: {} {} -> {}\n",
                    w,
                    pow.letter_name(x),
                    sym.format_word_with(self.entry(b, x), ".")
                ));
            }
        }
        s
    }

    /// Parses the text form against the symmetrized automaton.
    pub fn parse(sym: &Automaton, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Invalid("empty certificate".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad = |m: &str| Error::Invalid(format!("certificate: {m}"));
        if fields.len() != 4 {
            return Err(bad("header must be `mode L k num/den`"));
        }
        let mode: Mode = fields[0].parse()?;
        let block_len: usize = fields[1].parse().map_err(|_| bad("bad L"))?;
        let power: usize = fields[2].parse().map_err(|_| bad("bad k"))?;
        if block_len == 0 || power == 0 {
            return Err(bad("L and k must be positive"));
        }
        let gens = sym.generators();
        let pow = sym.alphabet_power(power);
        let letters = pow.num_letters();
        let blocks = (gens.len() as u64)
            .checked_pow(block_len as u32)
            .filter(|&b| b < u32::MAX as u64)
            .ok_or_else(|| bad("too many blocks"))? as usize;
        let mut entries = vec![u32::MAX; blocks * letters];
        let mut reps: Vec<Word> = Vec::new();
        let mut rep_ids: HashMap<Word, u32> = HashMap::new();
        let mut shell = ContractionCertificate::new(mode, block_len, power, gens, letters, Vec::new(), Vec::new());
        for line in lines {
            let body = line.strip_prefix("sect:").ok_or_else(|| bad("expected `sect:` line"))?;
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() != 4 || parts[2] != "->" {
                return Err(bad("expected `sect: <w> <x> -> <w_x>`"));
            }
            let w = sym.parse_word(parts[0])?;
            let block = shell.block_index(&w).ok_or_else(|| bad("block is not a word of length L over S"))?;
            let x = pow.letter_index(parts[1]).ok_or_else(|| Error::UnknownLetter(parts[1].to_string()))?;
            let wx = sym.parse_word(parts[3])?;
            let id = *rep_ids.entry(wx.clone()).or_insert_with(|| {
                reps.push(wx);
                reps.len() as u32 - 1
            });
            let slot = &mut entries[block * letters + x as usize];
            if *slot != u32::MAX {
                return Err(bad("duplicate entry"));
            }
            *slot = id;
        }
        if entries.contains(&u32::MAX) {
            return Err(bad("table is incomplete"));
        }
        let declared = fields[3].to_string();
        shell = ContractionCertificate::new(mode, block_len, power, shell.generators, letters, entries, reps);
        if format!("{}/{}", shell.lambda.0, shell.lambda.1) != declared {
            return Err(bad("lambda does not match the table"));
        }
        Ok(shell)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Checks one condition over all of `S^L`.
pub fn check_item(aut: &Automaton, block_len: usize, power: usize, mode: Mode) -> Result<CheckOutcome> {
    Scanner::new(aut, block_len)?.check(block_len, power, mode)
}

/// Searches `item3` over all `(k, L)` in lexicographic order first; failing
/// that, walks `(k, L)` again trying `item1` before `item2` in each cell.
pub fn find_certificate(aut: &Automaton, max_len: usize, max_power: usize) -> Result<ContractionCertificate> {
    let scanner = Scanner::new(aut, max_len)?;
    let cells = || (1..=max_power).flat_map(move |k| (1..=max_len).map(move |l| (k, l)));
    let order = cells()
        .map(|(k, l)| (k, l, Mode::Item3))
        .chain(cells().flat_map(|(k, l)| [(k, l, Mode::Item1), (k, l, Mode::Item2)]));
    for (power, block_len, mode) in order {
        if let Ok(cert) = scanner.certify(block_len, power, mode)? {
            return Ok(cert);
        }
    }
    Err(Error::NotFound { max_len, max_power })
}

/// Re-checks every table entry: `w_x =_G w|_x` by the oracle, and the mode
/// inequality on the stored lengths. Returns the first bad `(block, x)`.
pub fn verify_certificate(sym: &Automaton, cert: &ContractionCertificate) -> Result<Option<(Word, Letter)>> {
    if sym.generators() != cert.generators() {
        return Err(Error::CertificateMismatch("generating set differs".into()));
    }
    let pow = sym.alphabet_power(cert.power);
    let bad: Vec<Option<(Word, Letter)>> = (0..cert.num_blocks())
        .into_par_iter()
        .map(|b| -> Result<Option<(Word, Letter)>> {
            let w = cert.block_at(b);
            let mut lengths = Vec::with_capacity(cert.letters());
            for x in 0..cert.letters() as Letter {
                let section = pow.section_of_word(&w, &[x])?;
                if !word_engine::are_equal(sym, cert.entry(b, x), &section, DEFAULT_BUDGET)? {
                    return Ok(Some((w, x)));
                }
                lengths.push(cert.entry(b, x).len());
            }
            Ok((!cert.mode.holds(&lengths, cert.block_len)).then_some((w, 0)))
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().next())
}
