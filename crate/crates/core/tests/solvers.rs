mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wordproblem::activity;
use wordproblem::contraction::{find_certificate, ContractionCertificate, Mode, Scanner};
use wordproblem::solvers::{self, mx_step, solve_bounded, solve_contracting, solve_polynomial, RejectReason};
use wordproblem::word_engine::{are_equal, is_identity_oracle, DEFAULT_BUDGET};
use wordproblem::{builtin, Automaton, Error};

fn cert(aut: &Automaton, l: usize, k: usize, mode: Mode) -> (Automaton, ContractionCertificate) {
    let s = Scanner::new(aut, l).unwrap();
    let c = s.certify(l, k, mode).unwrap().unwrap();
    (s.automaton().clone(), c)
}

fn oracle(sym: &Automaton, w: &[u16]) -> bool {
    is_identity_oracle(sym, w, DEFAULT_BUDGET).unwrap()
}

#[test]
fn grigorchuk_exhaustive_agreement_to_length_six() {
    let (sym, c1) = cert(&builtin::grigorchuk(), 2, 1, Mode::Item1);
    let (_, c2) = cert(&builtin::grigorchuk(), 2, 2, Mode::Item2);
    let gens = sym.generators();
    for len in 0..=6 {
        for w in common::words_of_length(&gens, len) {
            let truth = oracle(&sym, &w);
            assert_eq!(solve_contracting(&sym, &c1, &w).unwrap().accepted(), truth);
            assert_eq!(solve_bounded(&sym, &c1, &w).unwrap().accepted(), truth);
            assert_eq!(solve_bounded(&sym, &c2, &w).unwrap().accepted(), truth);
        }
    }
}

#[test]
fn randomized_agreement_basilica_and_poly1() {
    let b = builtin::basilica();
    let bc = find_certificate(&b, 8, 2).unwrap();
    let bsym = b.symmetrize();
    let psym = builtin::poly1().symmetrize();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut accepted = [0, 0];
    for _ in 0..10_000 {
        let w = common::mixed_word(&bsym, 64, &mut rng);
        let truth = oracle(&bsym, &w);
        assert_eq!(solve_bounded(&bsym, &bc, &w).unwrap().accepted(), truth, "{}", bsym.format_word(&w));
        accepted[0] += usize::from(truth);

        let w = common::mixed_word(&psym, 64, &mut rng);
        let truth = oracle(&psym, &w);
        assert_eq!(solve_polynomial(&psym, 1, None, &w).unwrap().accepted(), truth, "{}", psym.format_word(&w));
        accepted[1] += usize::from(truth);
    }
    assert!(accepted.iter().all(|&a| a > 1000 && a < 9000), "{accepted:?}");
}

#[test]
fn grigorchuk_relations() {
    let (sym, c) = cert(&builtin::grigorchuk(), 10, 3, Mode::Item3);
    let run = |w: &str| solve_contracting(&sym, &c, &sym.parse_word(w).unwrap()).unwrap();
    for w in ["aa", "bb", "cc", "dd", "bcd", ""] {
        assert!(run(w).accepted(), "{w}");
    }
    for w in ["a", "b", "ab"] {
        assert!(!run(w).accepted(), "{w}");
    }
    assert!(!run(&"ab".repeat(8)).accepted());
    assert!(run(&"ab".repeat(16)).accepted());
    let aa = run("aa");
    assert!(aa.stages <= 1);
    let long = run(&"ab".repeat(64));
    assert!(long.accepted());
    assert!(long.table_lookups > 0);
}

#[test]
fn mx_step_properties() {
    let (sym, c) = cert(&builtin::grigorchuk(), 10, 3, Mode::Item3);
    let pow = sym.alphabet_power(3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gens = sym.generators();
    for _ in 0..40 {
        let w = common::random_word(&gens, 20, &mut rng);
        for x in 0..8 {
            let out = mx_step(&sym, &c, x, &w).unwrap();
            let section = pow.section_of_word(&w, &[x]).unwrap();
            assert!(are_equal(&sym, &out, &section, DEFAULT_BUDGET).unwrap());
            assert!(out.len() <= 18);
        }
    }
    let short = sym.parse_word("abc").unwrap();
    for x in 0..8 {
        let direct = sym.strip_identity(&pow.section_of_word(&short, &[x]).unwrap());
        assert_eq!(mx_step(&sym, &c, x, &short).unwrap(), direct);
    }
}

#[test]
fn mx_step_can_return_the_empty_word() {
    let (sym, c) = cert(&builtin::grigorchuk(), 10, 3, Mode::Item3);
    let block = sym.parse_word("abababababababababab").unwrap();
    let pow = sym.alphabet_power(3);
    let x = (0..8).find(|&x| oracle(&sym, &pow.section_of_word(&block[..10], &[x]).unwrap())).unwrap();
    assert!(mx_step(&sym, &c, x, &block[..10]).unwrap().is_empty());
}

#[test]
fn item1_segment_bound() {
    let (sym, c) = cert(&builtin::grigorchuk(), 4, 1, Mode::Item1);
    let lambda = c.shrink_factor();
    let lp = c.lambda.0 as f64 / c.lambda.1 as f64;
    let settle = 2.0 * c.block_len as f64 / (1.0 - lp);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let w = common::mixed_word(&sym, 400, &mut rng);
        let r = solve_contracting(&sym, &c, &w).unwrap();
        let n = w.len() as f64;
        for (k, &seg) in r.max_segments.iter().enumerate() {
            let bound = (lambda.powi(k as i32) * n).max(settle);
            assert!(seg as f64 <= bound, "stage {k}: {seg} > {bound}");
        }
    }
}

#[test]
fn item3_steps_are_linear() {
    let (sym, c) = cert(&builtin::grigorchuk(), 10, 3, Mode::Item3);
    let ab = sym.parse_word("ab").unwrap();
    let mut ratios = Vec::new();
    for m in 4..=11 {
        let w = ab.repeat(1 << m);
        let r = solve_contracting(&sym, &c, &w).unwrap();
        assert!(r.steps >= w.len() as u64);
        ratios.push(r.steps as f64 / w.len() as f64);
        let first = sym.parse_word(&"ab".repeat(5)).unwrap().repeat(1 << m);
        let r = solve_contracting(&sym, &c, &first).unwrap();
        if r.tape_lengths.len() > 1 {
            assert!(r.tape_lengths[1] < r.tape_lengths[0]);
        }
    }
    let c_fit = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(c_fit < 40.0, "{ratios:?}");
}

#[test]
fn short_segments_never_touch_tables() {
    let (sym, c) = cert(&builtin::grigorchuk(), 10, 3, Mode::Item3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let w = common::random_word(&sym.generators(), 9, &mut rng);
        let r = solve_contracting(&sym, &c, &w).unwrap();
        assert_eq!(r.table_lookups, 0);
    }
}

#[test]
fn basilica_free_reduction_case() {
    let b = builtin::basilica();
    let sym = b.symmetrize();
    let c = find_certificate(&b, 8, 2).unwrap();
    let w = sym.parse_word("b b^-1").unwrap();
    assert!(solve_bounded(&sym, &c, &w).unwrap().accepted());
    assert!(matches!(solve_contracting(&sym, &c, &w), Err(Error::NonTermination(_))));
    for m in 1..=4 {
        let w = sym.parse_word("ab").unwrap().repeat(1 << m);
        assert_eq!(solve_bounded(&sym, &c, &w).unwrap().accepted(), oracle(&sym, &w));
    }
}

#[test]
fn polynomial_examples() {
    let sym = builtin::poly1().symmetrize();
    activity::ensure_loopified(&sym).unwrap();
    let run = |w: &str| solve_polynomial(&sym, 1, None, &sym.parse_word(w).unwrap()).unwrap();
    assert!(run("a a^-1").accepted());
    let fixed = run("b b^-1");
    assert!(fixed.accepted());
    let w = sym.parse_word("bababA").unwrap();
    assert_eq!(run("bababA").accepted(), oracle(&sym, &w));
    let w = sym.parse_word("babA").unwrap().repeat(8);
    assert_eq!(solve_polynomial(&sym, 1, None, &w).unwrap().accepted(), oracle(&sym, &w));
    let r = run("b");
    assert_eq!(r.reject_reason, Some(RejectReason::Permutation));
    let g = builtin::grigorchuk().symmetrize();
    assert_eq!(solve_polynomial(&g, 0, None, &[]).unwrap_err(), Error::NotLoopified(3));
}

#[test]
fn polynomial_with_certificate_agrees() {
    let (sym, c) = cert(&builtin::grigorchuk(), 4, 1, Mode::Item1);
    let (g3, _) = activity::loopify(&sym).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let w = common::mixed_word(&sym, 24, &mut rng);
        let truth = oracle(&sym, &w);
        assert_eq!(solve_polynomial(&g3, 0, None, &w).unwrap().accepted(), truth);
        assert_eq!(solve_contracting(&sym, &c, &w).unwrap().accepted(), truth);
    }
}

#[test]
fn auto_dispatch() {
    for name in ["grigorchuk", "basilica", "poly1", "adding"] {
        let aut = builtin::by_name(name).unwrap();
        let solver = solvers::AutoSolver::new(&aut).unwrap();
        let sym = solver.automaton();
        assert_eq!(sym, &aut.symmetrize());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let w = common::mixed_word(sym, 16, &mut rng);
            assert_eq!(solver.solve(&w).unwrap().accepted(), oracle(sym, &w), "{name}");
        }
        let methods = ["bounded", "bounded", "polynomial", "bounded"];
        let idx = ["grigorchuk", "basilica", "poly1", "adding"].iter().position(|n| *n == name).unwrap();
        assert_eq!(solver.method(), methods[idx]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_invariance(seed in any::<u64>(), g in 0usize..4) {
        let (sym, c) = cert(&builtin::grigorchuk(), 2, 1, Mode::Item1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = common::mixed_word(&sym, 30, &mut rng);
        let s = sym.generators()[g];
        let mut conj = vec![s];
        conj.extend(&w);
        conj.push(sym.inverse_of(s).unwrap());
        prop_assert_eq!(
            solve_contracting(&sym, &c, &conj).unwrap().accepted(),
            solve_contracting(&sym, &c, &w).unwrap().accepted()
        );
    }
}
