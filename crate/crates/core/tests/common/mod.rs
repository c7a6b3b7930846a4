#![allow(dead_code)]

use rand::Rng;
use wordproblem::{Automaton, StateId, Word};

pub fn random_word(gens: &[StateId], len: usize, rng: &mut impl Rng) -> Word {
    (0..len).map(|_| gens[rng.gen_range(0..gens.len())]).collect()
}

/// Every word of length `len` over `gens`, lexicographic.
pub fn words_of_length(gens: &[StateId], len: u32) -> impl Iterator<Item = Word> + '_ {
    (0..gens.len().pow(len)).map(move |mut idx| {
        let mut w = vec![0; len as usize];
        for slot in w.iter_mut().rev() {
            *slot = gens[idx % gens.len()];
            idx /= gens.len();
        }
        w
    })
}

/// `u·ū` with occasional extra noise letter, to mix accepted and rejected words.
pub fn mixed_word(sym: &Automaton, max_len: usize, rng: &mut impl Rng) -> Word {
    let gens = sym.generators();
    match rng.gen_range(0..3) {
        0 => random_word(&gens, rng.gen_range(0..=max_len), rng),
        1 => {
            let u = random_word(&gens, rng.gen_range(0..=max_len / 2), rng);
            let mut w = u.clone();
            w.extend(sym.formal_inverse(&u).unwrap());
            w
        }
        _ => {
            let u = random_word(&gens, rng.gen_range(0..=max_len / 4), rng);
            let v = random_word(&gens, rng.gen_range(0..=max_len / 4), rng);
            let (ui, vi) = (sym.formal_inverse(&u).unwrap(), sym.formal_inverse(&v).unwrap());
            [u, v, ui, vi].concat()
        }
    }
}

pub fn all_letters(aut: &Automaton, len: u32) -> Vec<Vec<u16>> {
    let m = aut.num_letters();
    (0..m.pow(len))
        .map(|mut idx| {
            let mut v = vec![0u16; len as usize];
            for slot in v.iter_mut().rev() {
                *slot = (idx % m) as u16;
                idx /= m;
            }
            v
        })
        .collect()
}
