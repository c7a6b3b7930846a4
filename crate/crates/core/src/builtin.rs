//! Automata shipped with the crate.

use crate::automaton::Automaton;

pub const GRIGORCHUK: &str = include_str!("../automata/grigorchuk.aut");
pub const BASILICA: &str = include_str!("../automata/basilica.aut");
pub const POLY1: &str = include_str!("../automata/poly1.aut");
pub const ADDING: &str = include_str!("../automata/adding.aut");
pub const DOUBLED: &str = include_str!("../automata/doubled.aut");

pub const ALL: [(&str, &str); 5] = [
    ("grigorchuk", GRIGORCHUK),
    ("basilica", BASILICA),
    ("poly1", POLY1),
    ("adding", ADDING),
    ("doubled", DOUBLED),
];

pub fn by_name(name: &str) -> Option<Automaton> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Automaton::parse(text).expect("built-in automaton parses"))
}

pub fn grigorchuk() -> Automaton {
    Automaton::parse(GRIGORCHUK).unwrap()
}

pub fn basilica() -> Automaton {
    Automaton::parse(BASILICA).unwrap()
}

pub fn poly1() -> Automaton {
    Automaton::parse(POLY1).unwrap()
}

pub fn adding() -> Automaton {
    Automaton::parse(ADDING).unwrap()
}

pub fn doubled() -> Automaton {
    Automaton::parse(DOUBLED).unwrap()
}
