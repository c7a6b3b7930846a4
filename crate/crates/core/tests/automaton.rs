mod common;

use proptest::prelude::*;
use wordproblem::{builtin, Automaton};

fn builtin_syms() -> Vec<Automaton> {
    builtin::ALL.iter().map(|(name, _)| builtin::by_name(name).unwrap().symmetrize()).collect()
}

fn word_strategy() -> impl Strategy<Value = (usize, Vec<u16>, Vec<u16>)> {
    (0..builtin::ALL.len(), prop::collection::vec(any::<u16>(), 0..12), prop::collection::vec(any::<u16>(), 0..10))
}

fn pick(aut: &Automaton, raw: &[u16]) -> Vec<u16> {
    let gens: Vec<u16> = (0..aut.num_states() as u16).collect();
    raw.iter().map(|&r| gens[r as usize % gens.len()]).collect()
}

fn pick_letters(aut: &Automaton, raw: &[u16]) -> Vec<u16> {
    raw.iter().map(|&r| r % aut.num_letters() as u16).collect()
}

proptest! {
    #[test]
    fn apply_preserves_length_and_inverse_undoes((i, w, v) in word_strategy()) {
        let aut = &builtin_syms()[i];
        let w = pick(aut, &w);
        let v = pick_letters(aut, &v);
        let image = aut.apply(&w, &v).unwrap();
        prop_assert_eq!(image.len(), v.len());
        let mut ww = w.clone();
        ww.extend(aut.formal_inverse(&w).unwrap());
        prop_assert_eq!(aut.apply(&ww, &v).unwrap(), v);
    }

    #[test]
    fn self_similarity_and_cocycle((i, w, v) in word_strategy(), x in any::<u16>(), y in any::<u16>()) {
        let aut = &builtin_syms()[i];
        let w = pick(aut, &w);
        let v = pick_letters(aut, &v);
        let m = aut.num_letters() as u16;
        let (x, y) = (x % m, y % m);
        let mut xv = vec![x];
        xv.extend(&v);
        let mut expect = vec![aut.image_of_letter(&w, x)];
        expect.extend(aut.apply(&aut.section_of_word(&w, &[x]).unwrap(), &v).unwrap());
        prop_assert_eq!(aut.apply(&w, &xv).unwrap(), expect);

        let wx = aut.section_of_word(&w, &[x]).unwrap();
        prop_assert_eq!(wx.len(), w.len());
        prop_assert_eq!(aut.section_of_word(&wx, &[y]).unwrap(), aut.section_of_word(&w, &[x, y]).unwrap());
    }

    #[test]
    fn alphabet_power_matches_flattened((i, w, v) in word_strategy(), k in 1usize..4) {
        let aut = builtin::by_name(builtin::ALL[i].0).unwrap();
        let w = pick(&aut, &w);
        let pow = aut.alphabet_power(k);
        let v = pick_letters(&aut, &v);
        let blocks = v.len() / k;
        let flat = &v[..blocks * k];
        let m = aut.num_letters() as u16;
        let packed: Vec<u16> = flat.chunks(k).map(|c| c.iter().fold(0, |acc, &x| acc * m + x)).collect();
        let image = pow.apply(&w, &packed).unwrap();
        let unpacked: Vec<u16> = image
            .iter()
            .flat_map(|&p| (0..k).rev().map(move |j| (p / m.pow(j as u32)) % m))
            .collect();
        prop_assert_eq!(unpacked, aut.apply(&w, flat).unwrap());
    }
}

#[test]
fn minimize_is_idempotent() {
    for (name, _) in builtin::ALL {
        let a = builtin::by_name(name).unwrap();
        let m = a.minimize();
        assert_eq!(m.minimize().num_states(), m.num_states(), "{name}");
        let s = a.symmetrize();
        assert_eq!(s.minimize().num_states(), s.num_states(), "{name}");
    }
}

#[test]
fn section_and_apply_examples() {
    let g = builtin::grigorchuk();
    let w = g.parse_word("ad").unwrap();
    assert_eq!(g.format_word(&g.section_of_word(&w, &g.parse_letters("0").unwrap()).unwrap()), "eb");
    let b = g.parse_word("b").unwrap();
    assert_eq!(g.format_word(&g.section_of_word(&b, &g.parse_letters("11").unwrap()).unwrap()), "d");
    let eee = g.parse_word("eee").unwrap();
    assert_eq!(g.section_of_word(&eee, &[1, 0]).unwrap(), eee);
    assert_eq!(g.format_letters(&g.apply(&g.parse_word("a").unwrap(), &[0, 1]).unwrap()), "11");
    assert_eq!(g.apply(&[], &[0, 1, 1]).unwrap(), vec![0, 1, 1]);
    let add = builtin::adding();
    assert_eq!(add.format_letters(&add.apply(&add.parse_word("a").unwrap(), &[1, 1, 1]).unwrap()), "000");
}

#[test]
fn text_round_trip_for_builtins() {
    for (name, _) in builtin::ALL {
        let a = builtin::by_name(name).unwrap();
        let text = a.to_text();
        let back = Automaton::parse(&text).unwrap();
        assert_eq!(back.to_text(), text, "{name}");
    }
}
