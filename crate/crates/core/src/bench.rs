//! Benchmark families, complexity-model fitting and growth reference curves.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automaton::{Automaton, StateId, Word};
use crate::builtin;
use crate::contraction::{self, ContractionCertificate, Mode, Scanner};
use crate::error::{Error, Result};
use crate::nilpotent::{self, GroupKind, NLetter, NilpotentInstance};
use crate::solvers::{self, StepReport};
use crate::word_engine::GrowthTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `(ab)^{2^m}` in the Basilica group, bounded solver.
    BasilicaAb,
    /// `(b a b a⁻¹)^{2^m}` on the degree-one automaton, polynomial solver.
    Poly1Baba,
    /// `(ab)^{2^m}` in the Grigorchuk group, contracting solver.
    GrigorchukAb,
    /// `a^{2^m} A^{2^m}` in ℤ.
    Z4Balanced,
    /// `u·u⁻¹` in the Heisenberg group, `u` random of length `2^m`.
    HeisBalanced,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::BasilicaAb, Family::Poly1Baba, Family::GrigorchukAb, Family::Z4Balanced, Family::HeisBalanced];

    pub fn name(self) -> &'static str {
        match self {
            Family::BasilicaAb => "basilica-ab",
            Family::Poly1Baba => "poly1-baba",
            Family::GrigorchukAb => "grigorchuk-ab",
            Family::Z4Balanced => "z4-balanced",
            Family::HeisBalanced => "heis-balanced",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub m: u32,
    pub n: usize,
    pub stages: usize,
    pub steps: u64,
    pub accepted: bool,
}

enum Prepared {
    Automaton { sym: Automaton, cert: Option<ContractionCertificate>, period: Word },
    Group(NilpotentInstance),
}

/// A family with its automaton, certificate or instance built once.
pub struct Bench {
    family: Family,
    prepared: Prepared,
}

impl Bench {
    pub fn new(family: Family) -> Result<Self> {
        let auto = |aut: Automaton, cert: Option<ContractionCertificate>, period: &str| -> Result<Prepared> {
            let sym = aut.symmetrize();
            let period = sym.parse_word(period)?;
            Ok(Prepared::Automaton { sym, cert, period })
        };
        let prepared = match family {
            Family::BasilicaAb => {
                let b = builtin::basilica();
                let cert = contraction::find_certificate(&b, 8, 2)?;
                auto(b, Some(cert), "a b")?
            }
            Family::Poly1Baba => auto(builtin::poly1(), None, "b a b A")?,
            Family::GrigorchukAb => {
                let g = builtin::grigorchuk();
                let cert = Scanner::new(&g, 10)?
                    .certify(10, 3, Mode::Item3)?
                    .map_err(|_| Error::Invalid("Grigorchuk item3 certificate failed".into()))?;
                auto(g, Some(cert), "a b")?
            }
            Family::Z4Balanced => Prepared::Group(nilpotent::build_instance(GroupKind::Z4)?),
            Family::HeisBalanced => Prepared::Group(nilpotent::build_instance(GroupKind::Heisenberg)?),
        };
        Ok(Bench { family, prepared })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The `m`-th word, as automaton states or instance letters.
    pub fn word(&self, m: u32, rng: &mut ChaCha8Rng) -> BenchWord {
        let reps = 1usize << m;
        match &self.prepared {
            Prepared::Automaton { period, .. } => {
                BenchWord::States(period.iter().copied().cycle().take(period.len() * reps).collect())
            }
            Prepared::Group(inst) => {
                let letter = |ch: char| inst.parse_word(&ch.to_string()).expect("instance letter")[0];
                match self.family {
                    Family::Z4Balanced => {
                        let mut w = vec![letter('a'); reps];
                        w.extend(std::iter::repeat_n(letter('A'), reps));
                        BenchWord::Letters(w)
                    }
                    _ => {
                        let gens: Vec<NLetter> = "aAbBcC".chars().map(letter).collect();
                        let u: Vec<NLetter> = (0..reps).map(|_| gens[rng.gen_range(0..gens.len())]).collect();
                        let mut w = u.clone();
                        w.extend(u.iter().rev().map(|&a| inverse_letter(inst, a)));
                        BenchWord::Letters(w)
                    }
                }
            }
        }
    }

    pub fn run_word(&self, word: &BenchWord) -> Result<StepReport> {
        match (&self.prepared, word) {
            (Prepared::Automaton { sym, cert, .. }, BenchWord::States(w)) => match self.family {
                Family::BasilicaAb => solvers::solve_bounded(sym, cert.as_ref().expect("certificate"), w),
                Family::Poly1Baba => solvers::solve_polynomial(sym, 1, None, w),
                _ => solvers::solve_contracting(sym, cert.as_ref().expect("certificate"), w),
            },
            (Prepared::Group(inst), BenchWord::Letters(w)) => nilpotent::solve_nilpotent(inst, w),
            _ => Err(Error::Invalid("word does not match the family".into())),
        }
    }

    /// One row per `m`; deterministic for a fixed seed.
    pub fn run(&self, ms: impl IntoIterator<Item = u32>, seed: u64) -> Result<Vec<BenchRow>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ms.into_iter()
            .map(|m| {
                let w = self.word(m, &mut rng);
                let r = self.run_word(&w)?;
                Ok(BenchRow { m, n: w.len(), stages: r.stages, steps: r.steps, accepted: r.accepted() })
            })
            .collect()
    }
}

pub enum BenchWord {
    States(Vec<StateId>),
    Letters(Vec<NLetter>),
}

impl BenchWord {
    pub fn len(&self) -> usize {
        match self {
            BenchWord::States(w) => w.len(),
            BenchWord::Letters(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn inverse_letter(inst: &NilpotentInstance, a: NLetter) -> NLetter {
    let g = inst.letters()[a as usize];
    inst.letter_of(inst.kind.inv(g)).expect("letter set is closed under inversion")
}

pub fn run_bench(family: Family, ms: impl IntoIterator<Item = u32>, seed: u64) -> Result<Vec<BenchRow>> {
    Bench::new(family)?.run(ms, seed)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("m,n,stages,steps\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.m, r.n, r.stages, r.steps));
    }
    s
}

/// Complexity model `n`, `n·log₂^d n` or `n²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    NLog(u32),
    Quadratic,
}

impl Model {
    pub const LINEAR: Model = Model::NLog(0);

    pub fn eval(self, n: f64) -> f64 {
        match self {
            Model::NLog(d) => n * n.log2().powi(d as i32),
            Model::Quadratic => n * n,
        }
    }

    /// `n`, `n log n`, …, `n log^d n`, then `n²`.
    pub fn standard(max_log_power: u32) -> Vec<Model> {
        (0..=max_log_power).map(Model::NLog).chain([Model::Quadratic]).collect()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::NLog(0) => f.write_str("n"),
            Model::NLog(1) => f.write_str("n log n"),
            Model::NLog(d) => write!(f, "n log^{d} n"),
            Model::Quadratic => f.write_str("n^2"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != '^' && *c != '*').collect();
        match compact.as_str() {
            "n" => Ok(Model::LINEAR),
            "nlogn" => Ok(Model::NLog(1)),
            "n2" => Ok(Model::Quadratic),
            other => other
                .strip_prefix("nlog")
                .and_then(|r| r.strip_suffix('n'))
                .and_then(|d| d.parse().ok())
                .map(Model::NLog)
                .ok_or_else(|| Error::Invalid(format!("unknown model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelFit {
    pub model: Model,
    /// Sum of squared residuals of `ln steps − ln(c·f(n))`.
    pub residual: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub fits: Vec<ModelFit>,
    pub winner: Model,
    pub constant: f64,
}

impl FitResult {
    pub fn fit_of(&self, model: Model) -> Option<&ModelFit> {
        self.fits.iter().find(|f| f.model == model)
    }

    /// `residual(other) / residual(winner)`.
    pub fn advantage_over(&self, other: Model) -> f64 {
        let w = self.fit_of(self.winner).map_or(f64::NAN, |f| f.residual);
        let o = self.fit_of(other).map_or(f64::NAN, |f| f.residual);
        o / w
    }
}

/// Log-scale least squares with one free constant per model. Rows with
/// `n < 2` or zero steps are skipped.
pub fn fit_complexity(rows: &[(usize, u64)], models: &[Model]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|&&(n, s)| n >= 2 && s > 0).map(|&(n, s)| (n as f64, s as f64)).collect();
    if pts.is_empty() || models.is_empty() {
        return Err(Error::Invalid("nothing to fit".into()));
    }
    let fits: Vec<ModelFit> = models
        .iter()
        .map(|&model| {
            let diffs: Vec<f64> = pts.iter().map(|&(n, s)| s.ln() - model.eval(n).ln()).collect();
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            let residual = diffs.iter().map(|d| (d - mean).powi(2)).sum();
            ModelFit { model, residual, constant: mean.exp() }
        })
        .collect();
    let best = fits
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .copied()
        .expect("at least one model");
    Ok(FitResult { fits, winner: best.model, constant: best.constant })
}

/// Rows `(n, n·log₂ γ(n))` for `n` in range and within the table.
pub fn lower_bound_curve(growth: &GrowthTable, ns: impl IntoIterator<Item = usize>) -> Vec<(usize, f64)> {
    ns.into_iter()
        .filter_map(|n| growth.values.get(n).map(|&g| (n, n as f64 * (g as f64).log2())))
        .collect()
}

pub fn curve_to_csv(rows: &[(usize, f64)]) -> String {
    let mut s = String::from("n,n_log_gamma\n");
    for (n, v) in rows {
        s.push_str(&format!("{n},{v:.6}\n"));
    }
    s
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub family: Family,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    pub fit: Option<FitResult>,
}
