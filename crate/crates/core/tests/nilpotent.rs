use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordproblem::bench::{fit_complexity, Model};
use wordproblem::nilpotent::{build_instance, coset_scan, halve, solve_nilpotent, verify_table_closure, GroupKind, NLetter, NilpotentInstance};

fn letters(inst: &NilpotentInstance, names: &str) -> Vec<NLetter> {
    inst.parse_word(names).unwrap()
}

/// A word in `φ(G)`: each letter replaced by its image, identity letters interspersed.
fn image_word(inst: &NilpotentInstance, len: usize, rng: &mut ChaCha8Rng) -> Vec<NLetter> {
    let gens = letters(inst, &inst.kind.letters().iter().map(|&(c, _)| c).collect::<String>());
    let e = gens[0];
    let mut w = Vec::new();
    while w.len() < len {
        let a = gens[rng.gen_range(1..gens.len())];
        let g = inst.letters()[a as usize];
        let reps = if g[2] != 0 && inst.kind == GroupKind::Heisenberg { 16 } else { 4 };
        w.extend(std::iter::repeat_n(a, reps));
        if rng.gen_bool(0.3) {
            w.push(e);
        }
    }
    w
}

fn random_word(inst: &NilpotentInstance, len: usize, rng: &mut ChaCha8Rng) -> Vec<NLetter> {
    let gens = letters(inst, &inst.kind.letters().iter().map(|&(c, _)| c).collect::<String>());
    (0..len).map(|_| gens[rng.gen_range(0..gens.len())]).collect()
}

#[test]
fn tables_close_and_are_sound() {
    for kind in GroupKind::ALL {
        let inst = build_instance(kind).unwrap();
        assert_eq!(verify_table_closure(&inst), None, "{kind}");
        let e = inst.letter_of([0; 3]).unwrap();
        assert_eq!(inst.rewrite(e, e, 0), Some((e, 0)));
        for &g in inst.letters() {
            assert!(inst.letter_of(kind.inv(g)).is_some());
        }
    }
}

#[test]
fn z4_halving_is_exhaustively_semantic() {
    let z = build_instance(GroupKind::Z4).unwrap();
    let alphabet = letters(&z, "eaA");
    for len in 0..=10u32 {
        for mut idx in 0..3usize.pow(len) {
            let w: Vec<NLetter> = (0..len)
                .map(|_| {
                    let a = alphabet[idx % 3];
                    idx /= 3;
                    a
                })
                .collect();
            let value = z.evaluate(&w);
            if coset_scan(&z, &w) != 0 {
                assert_ne!(value[0] % 4, 0);
                continue;
            }
            let h = halve(&z, &w).unwrap();
            assert_eq!(h.len(), w.len());
            assert_eq!(z.kind.phi(z.evaluate(&h)), value);
            let live = |v: &[NLetter]| v.iter().filter(|&&a| a != 0).count();
            assert!(live(&h) <= live(&w).div_ceil(2));
        }
    }
}

#[test]
fn heisenberg_halving_is_semantic() {
    let h = build_instance(GroupKind::Heisenberg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..10_000 {
        let len = rng.gen_range(1..=if i % 10 == 0 { 2000 } else { 200 });
        let w = image_word(&h, len, &mut rng);
        assert_eq!(coset_scan(&h, &w), 0);
        let half = halve(&h, &w).unwrap();
        assert_eq!(h.kind.phi(h.evaluate(&half)), h.evaluate(&w));
    }
}

#[test]
fn verdicts_match_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for kind in GroupKind::ALL {
        let inst = build_instance(kind).unwrap();
        let mut accepted = 0;
        for i in 0..2000 {
            let w = match i % 3 {
                0 => random_word(&inst, rng.gen_range(0..300), &mut rng),
                1 => image_word(&inst, rng.gen_range(0..300), &mut rng),
                _ => {
                    let u = random_word(&inst, rng.gen_range(0..150), &mut rng);
                    let mut w = u.clone();
                    w.extend(u.iter().rev().map(|&a| inst.letter_of(kind.inv(inst.letters()[a as usize])).unwrap()));
                    w
                }
            };
            let r = solve_nilpotent(&inst, &w).unwrap();
            assert_eq!(r.accepted(), inst.evaluate(&w) == [0; 3], "{kind}: {}", inst.format_word(&w));
            accepted += usize::from(r.accepted());
            let n = w.len() as f64;
            for (k, &live) in r.tape_lengths.iter().enumerate() {
                assert!(live as f64 <= n / 2f64.powi(k as i32) + 2.0);
            }
            assert!(r.steps as f64 <= 8.0 * n * (n + 2.0).log2() + 8.0);
        }
        assert!(accepted > 500, "{kind}: {accepted}");
    }
}

#[test]
fn examples() {
    let z = build_instance(GroupKind::Z4).unwrap();
    let w = [letters(&z, &"a".repeat(16)), letters(&z, &"A".repeat(16))].concat();
    assert!(solve_nilpotent(&z, &w).unwrap().accepted());
    assert!(!solve_nilpotent(&z, &letters(&z, "aaa")).unwrap().accepted());
    assert!(solve_nilpotent(&z, &[]).unwrap().accepted());
    assert!(z.parse_word("b").is_err());
    let heis = build_instance(GroupKind::Heisenberg).unwrap();
    assert!(solve_nilpotent(&heis, &letters(&heis, "abABC")).unwrap().accepted());
    assert!(!solve_nilpotent(&heis, &letters(&heis, "abAB")).unwrap().accepted());
}

#[test]
fn step_counts_fit_n_log_n() {
    let z = build_instance(GroupKind::Z4).unwrap();
    let (a, inv) = (letters(&z, "a")[0], letters(&z, "A")[0]);
    let rows: Vec<(usize, u64)> = (4..=16)
        .map(|m| {
            let n = 1usize << m;
            let w = [vec![a; n], vec![inv; n]].concat();
            (w.len(), solve_nilpotent(&z, &w).unwrap().steps)
        })
        .collect();
    let fit = fit_complexity(&rows, &[Model::NLog(1), Model::Quadratic]).unwrap();
    assert_eq!(fit.winner, Model::NLog(1));
}
