//! Invertible Mealy automata and the self-similar action of their states.
//!
//! Composition is **left to right** throughout the crate: the word `s1 s2 … sn`
//! acts on `v ∈ X*` by first applying `s1`, then `s2`, and so on. This is the
//! right-action convention (`o(sw, v) = o(w, o(s, v))`), chosen because every
//! solver here scans words from left to right. Sources that compose right to
//! left will read every word in this crate backwards.
//!
//! States and letters are interned to small integers ([`StateId`], [`Letter`])
//! at parse time; names only matter at the text boundary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type StateId = u16;
pub type Letter = u16;
/// A word over the states of an automaton.
pub type Word = Vec<StateId>;

/// A permutation of the first-level alphabet, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<Letter>);

impl Permutation {
    pub fn identity(size: usize) -> Self {
        Permutation((0..size as Letter).collect())
    }

    /// Builds a permutation from an image array, rejecting non-bijections.
    pub fn from_images(images: Vec<Letter>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &y in &images {
            let slot = seen.get_mut(y as usize)?;
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(Permutation(images))
    }

    #[inline]
    pub fn image(&self, x: Letter) -> Letter {
        self.0[x as usize]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&y| other.image(y)).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as Letter;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    pub fn images(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A finite invertible Mealy automaton `(S, X, t, o)`.
///
/// Immutable once built; every transformation returns a new automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    alphabet: Vec<String>,
    states: Vec<String>,
    identity: Option<StateId>,
    next: Vec<StateId>,
    out: Vec<Letter>,
    inverse: Option<Vec<StateId>>,
    aliases: BTreeMap<String, StateId>,
}

impl Automaton {
    /// Builds and validates an automaton from named rows.
    ///
    /// `rows[s][x]` is `(next_state, output_letter)`. When `identity` is `None`
    /// a state acting trivially is detected automatically.
    pub fn from_rows(
        alphabet: Vec<String>,
        states: Vec<String>,
        identity: Option<&str>,
        rows: Vec<Vec<(StateId, Letter)>>,
    ) -> Result<Self> {
        let n = states.len();
        let m = alphabet.len();
        if m == 0 {
            return Err(Error::Invalid("empty alphabet".into()));
        }
        if n == 0 {
            return Err(Error::Invalid("no states".into()));
        }
        if n > StateId::MAX as usize || m > Letter::MAX as usize {
            return Err(Error::Invalid("too many states or letters".into()));
        }
        for (i, name) in states.iter().enumerate() {
            if states[..i].contains(name) {
                return Err(Error::DuplicateState(name.clone()));
            }
        }
        for (i, name) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(name) {
                return Err(Error::Invalid(format!("letter `{name}` declared twice")));
            }
        }
        let mut next = Vec::with_capacity(n * m);
        let mut out = Vec::with_capacity(n * m);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Invalid(format!("row of `{}` has wrong width", states[s])));
            }
            for &(t, y) in row {
                if t as usize >= n {
                    return Err(Error::UnknownLetter(t.to_string()));
                }
                if y as usize >= m {
                    return Err(Error::UnknownLetter(y.to_string()));
                }
                next.push(t);
                out.push(y);
            }
        }
        if rows.len() != n {
            return Err(Error::Invalid("row count differs from state count".into()));
        }
        let mut aut = Automaton {
            alphabet,
            states,
            identity: None,
            next,
            out,
            inverse: None,
            aliases: BTreeMap::new(),
        };
        for s in 0..n {
            if Permutation::from_images(aut.out_row(s as StateId).to_vec()).is_none() {
                return Err(Error::NonInvertibleState { state: aut.states[s].clone() });
            }
        }
        aut.identity = match identity {
            Some(name) => {
                let id = aut
                    .states
                    .iter()
                    .position(|s| s == name)
                    .ok_or_else(|| Error::UnknownLetter(name.to_string()))?
                    as StateId;
                if !aut.acts_trivially_locally(id) {
                    return Err(Error::BadIdentity(name.to_string()));
                }
                Some(id)
            }
            None => (0..n as StateId).find(|&s| aut.acts_trivially_locally(s)),
        };
        Ok(aut)
    }

    /// Parses the line-oriented automaton format (see the crate README).
    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet: Option<Vec<String>> = None;
        let mut states: Option<Vec<String>> = None;
        let mut identity: Option<String> = None;
        let mut trans: Vec<(usize, String, String, String, String)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let (key, rest) = line.split_once(':').ok_or_else(|| Error::Syntax {
                line: lineno,
                message: format!("expected `key: value`, got `{line}`"),
            })?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "alphabet" => alphabet = Some(fields.iter().map(|s| s.to_string()).collect()),
                "states" => states = Some(fields.iter().map(|s| s.to_string()).collect()),
                "identity" => {
                    if fields.len() != 1 {
                        return Err(Error::Syntax {
                            line: lineno,
                            message: "identity takes one state".into(),
                        });
                    }
                    identity = Some(fields[0].to_string());
                }
                "trans" => {
                    if fields.len() != 5 || fields[2] != "->" {
                        return Err(Error::Syntax {
                            line: lineno,
                            message: "expected `trans: STATE LETTER -> NEXT OUTPUT`".into(),
                        });
                    }
                    trans.push((
                        lineno,
                        fields[0].to_string(),
                        fields[1].to_string(),
                        fields[3].to_string(),
                        fields[4].to_string(),
                    ));
                }
                other => {
                    return Err(Error::Syntax {
                        line: lineno,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }

        let alphabet = alphabet.ok_or(Error::Syntax { line: 0, message: "missing `alphabet:`".into() })?;
        let states = states.ok_or(Error::Syntax { line: 0, message: "missing `states:`".into() })?;
        for (i, name) in states.iter().enumerate() {
            if states[..i].contains(name) {
                return Err(Error::DuplicateState(name.clone()));
            }
        }
        let state_ix = |name: &str| {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::UnknownLetter(name.to_string()))
        };
        let letter_ix = |name: &str| {
            alphabet
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::UnknownLetter(name.to_string()))
        };

        let m = alphabet.len();
        let mut cells: Vec<Option<(StateId, Letter)>> = vec![None; states.len() * m];
        for (lineno, s, x, t, y) in &trans {
            let (s, x, t, y) = (state_ix(s)?, letter_ix(x)?, state_ix(t)?, letter_ix(y)?);
            let cell = &mut cells[s * m + x];
            if cell.is_some() {
                return Err(Error::Syntax {
                    line: *lineno,
                    message: format!("duplicate transition for `{}` on `{}`", states[s], alphabet[x]),
                });
            }
            *cell = Some((t as StateId, y as Letter));
        }
        let mut rows = Vec::with_capacity(states.len());
        for s in 0..states.len() {
            let mut row = Vec::with_capacity(m);
            for x in 0..m {
                row.push(cells[s * m + x].ok_or_else(|| Error::MissingTransition {
                    state: states[s].clone(),
                    letter: alphabet[x].clone(),
                })?);
            }
            rows.push(row);
        }
        Automaton::from_rows(alphabet, states, identity.as_deref(), rows)
    }

    /// Serializes to the text format with transitions sorted by (state, letter).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "alphabet: {}", self.alphabet.join(" "));
        let _ = writeln!(s, "states: {}", self.states.join(" "));
        if let Some(e) = self.identity {
            let _ = writeln!(s, "identity: {}", self.states[e as usize]);
        }
        for q in 0..self.num_states() {
            for x in 0..self.num_letters() {
                let (t, y) = (self.next(q as StateId, x as Letter), self.out(q as StateId, x as Letter));
                let _ = writeln!(
                    s,
                    "trans: {} {} -> {} {}",
                    self.states[q], self.alphabet[x], self.states[t as usize], self.alphabet[y as usize]
                );
            }
        }
        s
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s as usize]
    }

    pub fn letter_name(&self, x: Letter) -> &str {
        &self.alphabet[x as usize]
    }

    pub fn identity(&self) -> Option<StateId> {
        self.identity
    }

    /// Inverse of each state, when the state set is closed under inversion.
    pub fn inverses(&self) -> Option<&[StateId]> {
        self.inverse.as_deref()
    }

    pub fn inverse_of(&self, s: StateId) -> Option<StateId> {
        self.inverse.as_ref().map(|inv| inv[s as usize])
    }

    /// Non-identity states, in index order.
    pub fn generators(&self) -> Vec<StateId> {
        (0..self.num_states() as StateId).filter(|&s| Some(s) != self.identity).collect()
    }

    #[inline]
    pub fn next(&self, s: StateId, x: Letter) -> StateId {
        self.next[s as usize * self.alphabet.len() + x as usize]
    }

    #[inline]
    pub fn out(&self, s: StateId, x: Letter) -> Letter {
        self.out[s as usize * self.alphabet.len() + x as usize]
    }

    #[inline]
    pub fn out_row(&self, s: StateId) -> &[Letter] {
        let m = self.alphabet.len();
        &self.out[s as usize * m..(s as usize + 1) * m]
    }

    #[inline]
    pub fn next_row(&self, s: StateId) -> &[StateId] {
        let m = self.alphabet.len();
        &self.next[s as usize * m..(s as usize + 1) * m]
    }

    fn acts_trivially_locally(&self, s: StateId) -> bool {
        (0..self.num_letters() as Letter).all(|x| self.next(s, x) == s && self.out(s, x) == x)
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| i as StateId)
            .or_else(|| self.aliases.get(name).copied())
    }

    pub fn letter_index(&self, name: &str) -> Option<Letter> {
        self.alphabet.iter().position(|s| s == name).map(|i| i as Letter)
    }

    pub fn check_word(&self, w: &[StateId]) -> Result<()> {
        match w.iter().find(|&&s| s as usize >= self.num_states()) {
            Some(s) => Err(Error::UnknownLetter(s.to_string())),
            None => Ok(()),
        }
    }

    fn check_letters(&self, v: &[Letter]) -> Result<()> {
        match v.iter().find(|&&x| x as usize >= self.num_letters()) {
            Some(x) => Err(Error::UnknownLetter(x.to_string())),
            None => Ok(()),
        }
    }

    pub fn perm(&self, s: StateId) -> Permutation {
        Permutation(self.out_row(s).to_vec())
    }

    /// `π_w`, the permutation of X induced by `w` (left to right).
    pub fn perm_of_word(&self, w: &[StateId]) -> Result<Permutation> {
        self.check_word(w)?;
        Ok(self.perm_of_word_unchecked(w))
    }

    pub(crate) fn perm_of_word_unchecked(&self, w: &[StateId]) -> Permutation {
        let images = (0..self.num_letters() as Letter)
            .map(|x| w.iter().fold(x, |x, &s| self.out(s, x)))
            .collect();
        Permutation(images)
    }

    /// Image of a single letter under `π_w`.
    #[inline]
    pub fn image_of_letter(&self, w: &[StateId], x: Letter) -> Letter {
        w.iter().fold(x, |x, &s| self.out(s, x))
    }

    /// Section `w|_x` at a single letter, written into `buf`; returns `π_w(x)`.
    ///
    /// This is one pass of the dual automaton: the letter is threaded through
    /// the word while each state is replaced by its section.
    #[inline]
    pub fn section_into(&self, w: &[StateId], x: Letter, buf: &mut Word) -> Letter {
        buf.clear();
        let mut x = x;
        for &s in w {
            buf.push(self.next(s, x));
            x = self.out(s, x);
        }
        x
    }

    /// Section `w|_v` at a word `v ∈ X*`. Keeps identity letters, so the
    /// result has length `|w|`.
    pub fn section_of_word(&self, w: &[StateId], v: &[Letter]) -> Result<Word> {
        self.check_word(w)?;
        self.check_letters(v)?;
        let mut cur = w.to_vec();
        let mut buf = Vec::with_capacity(w.len());
        for &x in v {
            self.section_into(&cur, x, &mut buf);
            std::mem::swap(&mut cur, &mut buf);
        }
        Ok(cur)
    }

    /// `o(w, v)`: the image of `v` under the element represented by `w`.
    pub fn apply(&self, w: &[StateId], v: &[Letter]) -> Result<Vec<Letter>> {
        self.check_word(w)?;
        self.check_letters(v)?;
        let mut v = v.to_vec();
        for &s in w {
            let mut q = s;
            for x in v.iter_mut() {
                let y = self.out(q, *x);
                q = self.next(q, *x);
                *x = y;
            }
        }
        Ok(v)
    }

    /// Removes identity letters (the reduced view of a word).
    pub fn strip_identity(&self, w: &[StateId]) -> Word {
        match self.identity {
            Some(e) => w.iter().copied().filter(|&s| s != e).collect(),
            None => w.to_vec(),
        }
    }

    /// Formal inverse `w̄`: reversed, each letter inverted.
    pub fn formal_inverse(&self, w: &[StateId]) -> Option<Word> {
        let inv = self.inverse.as_ref()?;
        Some(w.iter().rev().map(|&s| inv[s as usize]).collect())
    }

    /// The inverse automaton: state `s⁻¹` sits at the index of `s`, with
    /// `t'(s⁻¹, o(s,x)) = t(s,x)⁻¹` and `o'(s⁻¹, o(s,x)) = x`.
    pub fn invert(&self) -> Automaton {
        let m = self.num_letters();
        let n = self.num_states();
        let mut next = vec![0; n * m];
        let mut out = vec![0; n * m];
        for s in 0..n as StateId {
            for x in 0..m as Letter {
                let y = self.out(s, x);
                next[s as usize * m + y as usize] = self.next(s, x);
                out[s as usize * m + y as usize] = x;
            }
        }
        let names = inverse_names(&self.states, self.identity, &[]);
        let aliases = self
            .aliases
            .iter()
            .map(|(k, &v)| (format!("{k}^-1"), v))
            .collect();
        Automaton {
            alphabet: self.alphabet.clone(),
            states: names,
            identity: self.identity,
            next,
            out,
            inverse: self.inverse.clone(),
            aliases,
        }
    }

    /// Disjoint union of `self` and its inverse, without minimization.
    ///
    /// Original states keep their indices `0..n`; the inverse of state `i`
    /// is `n + i`.
    pub fn with_inverses(&self) -> Automaton {
        if self.inverse.is_some() {
            return self.clone();
        }
        let n = self.num_states();
        let m = self.num_letters();
        let inv = self.invert();
        let mut names = self.states.clone();
        names.extend(inverse_names(&self.states, None, &self.states));
        let mut next = self.next.clone();
        let mut out = self.out.clone();
        next.extend(inv.next.iter().map(|&t| t + n as StateId));
        out.extend(inv.out.iter().copied());
        debug_assert_eq!(next.len(), 2 * n * m);
        let inverse = (0..n as StateId)
            .map(|i| i + n as StateId)
            .chain(0..n as StateId)
            .collect();
        let mut aliases = self.aliases.clone();
        for (k, &v) in &self.aliases {
            aliases.insert(format!("{k}^-1"), v + n as StateId);
        }
        Automaton {
            alphabet: self.alphabet.clone(),
            states: names,
            identity: self.identity,
            next,
            out,
            inverse: Some(inverse),
            aliases,
        }
    }

    /// Generating set closed under inversion: union with the inverse
    /// automaton, then minimized (involutions merge with their inverses).
    pub fn symmetrize(&self) -> Automaton {
        if self.inverse.is_some() {
            return self.clone();
        }
        self.with_inverses().minimize()
    }

    /// Moore partition refinement on (output row, transition row).
    pub fn minimize(&self) -> Automaton {
        self.minimize_with_map().0
    }

    /// Minimizes and also returns the class of every original state.
    pub fn minimize_with_map(&self) -> (Automaton, Vec<StateId>) {
        let n = self.num_states();
        let m = self.num_letters();
        let mut class = refine(n, |s| self.out_row(s as StateId).to_vec(), |s, x| {
            self.next(s as StateId, x as Letter) as usize
        }, m);
        // renumber by first occurrence so that an already minimal automaton is unchanged
        let mut order = vec![usize::MAX; n];
        let mut count = 0;
        for c in class.iter_mut() {
            if order[*c] == usize::MAX {
                order[*c] = count;
                count += 1;
            }
            *c = order[*c];
        }
        let mut reps = vec![usize::MAX; count];
        for s in 0..n {
            if reps[class[s]] == usize::MAX {
                reps[class[s]] = s;
            }
        }
        let mut next = Vec::with_capacity(count * m);
        let mut out = Vec::with_capacity(count * m);
        for &r in &reps {
            for x in 0..m as Letter {
                next.push(class[self.next(r as StateId, x) as usize] as StateId);
                out.push(self.out(r as StateId, x));
            }
        }
        let states: Vec<String> = reps.iter().map(|&r| self.states[r].clone()).collect();
        let mut aliases: BTreeMap<String, StateId> = self
            .aliases
            .iter()
            .map(|(k, &v)| (k.clone(), class[v as usize] as StateId))
            .collect();
        for s in 0..n {
            if reps[class[s]] != s {
                aliases.insert(self.states[s].clone(), class[s] as StateId);
            }
        }
        let inverse = self
            .inverse
            .as_ref()
            .map(|inv| reps.iter().map(|&r| class[inv[r] as usize] as StateId).collect());
        let map = class.iter().map(|&c| c as StateId).collect();
        let mut identity = self.identity.map(|e| class[e as usize] as StateId);
        let mut aut = Automaton {
            alphabet: self.alphabet.clone(),
            states,
            identity: None,
            next,
            out,
            inverse,
            aliases,
        };
        if identity.is_none() {
            identity = (0..count as StateId).find(|&s| aut.acts_trivially_locally(s));
        }
        aut.identity = identity;
        (aut, map)
    }

    /// The same automaton read over the alphabet `X^k`.
    ///
    /// The letter `(x1, …, xk)` has index `Σ xi·|X|^(k-i)` (first letter most
    /// significant) and is named by concatenating the letter names.
    pub fn alphabet_power(&self, k: usize) -> Automaton {
        assert!(k >= 1, "alphabet power must be positive");
        if k == 1 {
            return self.clone();
        }
        let m = self.num_letters();
        let size = m.checked_pow(k as u32).filter(|&s| s <= Letter::MAX as usize).expect("alphabet power too large");
        let sep = if self.alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { "." };
        let digits = |mut idx: usize| {
            let mut d = vec![0 as Letter; k];
            for slot in d.iter_mut().rev() {
                *slot = (idx % m) as Letter;
                idx /= m;
            }
            d
        };
        let alphabet: Vec<String> = (0..size)
            .map(|i| digits(i).iter().map(|&x| self.alphabet[x as usize].as_str()).collect::<Vec<_>>().join(sep))
            .collect();
        let n = self.num_states();
        let mut next = Vec::with_capacity(n * size);
        let mut out = Vec::with_capacity(n * size);
        for s in 0..n as StateId {
            for i in 0..size {
                let mut q = s;
                let mut y = 0usize;
                for x in digits(i) {
                    y = y * m + self.out(q, x) as usize;
                    q = self.next(q, x);
                }
                next.push(q);
                out.push(y as Letter);
            }
        }
        Automaton {
            alphabet,
            states: self.states.clone(),
            identity: self.identity,
            next,
            out,
            inverse: self.inverse.clone(),
            aliases: self.aliases.clone(),
        }
    }

    /// Parses a word over X (letters whitespace separated, or concatenated
    /// when every letter name is a single character).
    pub fn parse_letters(&self, text: &str) -> Result<Vec<Letter>> {
        let mut v = Vec::new();
        for token in text.split(|c: char| c.is_whitespace() || c == ',') {
            if token.is_empty() {
                continue;
            }
            if let Some(x) = self.letter_index(token) {
                v.push(x);
                continue;
            }
            for ch in token.chars() {
                let mut b = [0u8; 4];
                v.push(
                    self.letter_index(ch.encode_utf8(&mut b))
                        .ok_or_else(|| Error::UnknownLetter(token.to_string()))?,
                );
            }
        }
        Ok(v)
    }

    pub fn format_letters(&self, v: &[Letter]) -> String {
        let single = self.alphabet.iter().all(|a| a.chars().count() == 1);
        let names: Vec<&str> = v.iter().map(|&x| self.letter_name(x)).collect();
        names.join(if single { "" } else { " " })
    }

    /// Parses a word over the states.
    ///
    /// Tokens are separated by whitespace, `,` or `.`; a token that is not a
    /// state name is split into single characters. A `^-1` suffix takes the
    /// formal inverse (requires a generating set closed under inversion).
    /// `ε` denotes the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut w = Vec::new();
        for token in text.split(|c: char| c.is_whitespace() || c == ',' || c == '.') {
            if token.is_empty() || token == "ε" {
                continue;
            }
            self.push_token(token, &mut w)?;
        }
        Ok(w)
    }

    fn push_token(&self, token: &str, w: &mut Word) -> Result<()> {
        if let Some(s) = self.state_index(token) {
            w.push(s);
            return Ok(());
        }
        if let Some(base) = token.strip_suffix("^-1") {
            let start = w.len();
            self.push_token(base, w)?;
            let inv = self.inverse.as_ref().ok_or_else(|| Error::UnknownLetter(token.to_string()))?;
            let tail: Vec<StateId> = w[start..].iter().rev().map(|&s| inv[s as usize]).collect();
            w.truncate(start);
            w.extend(tail);
            return Ok(());
        }
        if token.chars().count() > 1 {
            for ch in token.chars() {
                let mut b = [0u8; 4];
                let name = ch.encode_utf8(&mut b);
                w.push(self.state_index(name).ok_or_else(|| Error::UnknownLetter(token.to_string()))?);
            }
            return Ok(());
        }
        Err(Error::UnknownLetter(token.to_string()))
    }

    /// Renders a word; names are concatenated when all are single characters,
    /// otherwise joined by `sep`. The empty word renders as `ε`.
    pub fn format_word_with(&self, w: &[StateId], sep: &str) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let single = self.states.iter().all(|s| s.chars().count() == 1);
        let names: Vec<&str> = w.iter().map(|&s| self.state_name(s)).collect();
        names.join(if single { "" } else { sep })
    }

    pub fn format_word(&self, w: &[StateId]) -> String {
        self.format_word_with(w, " ")
    }
}

/// Moore-style refinement; returns a class index per element.
pub(crate) fn refine<F, G>(n: usize, initial: F, succ: G, width: usize) -> Vec<usize>
where
    F: Fn(usize) -> Vec<Letter>,
    G: Fn(usize, usize) -> usize,
{
    use std::collections::HashMap;
    let mut class = vec![0usize; n];
    let mut ids: HashMap<Vec<Letter>, usize> = HashMap::new();
    for (s, c) in class.iter_mut().enumerate() {
        let len = ids.len();
        *c = *ids.entry(initial(s)).or_insert(len);
    }
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<Vec<usize>, usize> = HashMap::with_capacity(count);
        let mut refined = vec![0usize; n];
        let mut sig = Vec::with_capacity(width + 1);
        for s in 0..n {
            sig.clear();
            sig.push(class[s]);
            sig.extend((0..width).map(|x| class[succ(s, x)]));
            let len = sigs.len();
            refined[s] = *sigs.entry(sig.clone()).or_insert(len);
        }
        let new_count = sigs.len();
        class = refined;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

fn inverse_names(states: &[String], identity: Option<StateId>, taken: &[String]) -> Vec<String> {
    let mut names: Vec<String> = Vec::with_capacity(states.len());
    for (i, name) in states.iter().enumerate() {
        if identity == Some(i as StateId) {
            names.push(name.clone());
            continue;
        }
        let mut chars = name.chars();
        let candidate = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => Some(c.to_ascii_uppercase().to_string()),
            (Some(c), None) if c.is_ascii_uppercase() => Some(c.to_ascii_lowercase().to_string()),
            _ => None,
        };
        let clash = |c: &String| states.contains(c) || taken.contains(c) || names.contains(c);
        let chosen = match candidate {
            Some(c) if !clash(&c) => c,
            _ => {
                let mut c = format!("{name}^-1");
                while clash(&c) {
                    c.push('\'');
                }
                c
            }
        };
        names.push(chosen);
    }
    names
}
