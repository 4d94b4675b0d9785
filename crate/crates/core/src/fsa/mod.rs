//! Finite-state automata over labelled alphabets.
//!
//! Automata are nondeterministic with ε-transitions internally; the exported
//! operations determinize on demand. Subset construction and product
//! constructions are guarded by a configurable state cap (default 100 000,
//! overridable globally or per call) and report exceeding it as a resource
//! error rather than panicking or looping.

mod alphabet;
mod convolve;
mod ops;
mod serial;

pub use alphabet::{Alphabet, AlphabetError, Symbol, Word};
pub use convolve::{convolve, ConvolutionAlphabet};
pub use ops::{complement, concat, difference, intersection, star, union};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use thiserror::Error;

/// Default ceiling on states produced by subset/product constructions.
pub const DEFAULT_STATE_CAP: usize = 100_000;
/// Default ceiling on words produced by enumeration.
pub const DEFAULT_WORD_CAP: usize = 4_000_000;

static STATE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_STATE_CAP);

/// Current global state cap for automaton constructions.
pub fn state_cap() -> usize {
    STATE_CAP.load(Ordering::Relaxed)
}

/// Overrides the global state cap (the CLI wires `AUTOGRP_STATE_CAP` here).
pub fn set_state_cap(cap: usize) {
    STATE_CAP.store(cap.max(1), Ordering::Relaxed);
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FsaError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("state cap of {cap} states exceeded during {during}")]
    StateCapExceeded { cap: usize, during: &'static str },
    #[error("word cap of {cap} words exceeded during enumeration")]
    WordCapExceeded { cap: usize },
    #[error("alphabets differ: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },
    #[error("invalid automaton: {0}")]
    Invalid(String),
}

/// A finite-state automaton: one initial state, a set of final states,
/// labelled transitions and optional ε-transitions.
#[derive(Clone, Debug)]
pub struct Automaton {
    alphabet: Alphabet,
    num_states: usize,
    initial: usize,
    finals: Vec<bool>,
    /// `transitions[q][s]` is the sorted list of successors of `q` on symbol `s`.
    transitions: Vec<BTreeMap<Symbol, Vec<usize>>>,
    /// `epsilons[q]` is the sorted list of ε-successors of `q`.
    epsilons: Vec<Vec<usize>>,
}

impl Automaton {
    /// Builds an automaton from explicit parts, validating all indices.
    pub fn from_parts(
        alphabet: Alphabet,
        num_states: usize,
        initial: usize,
        final_states: &[usize],
        transitions: &[(usize, Symbol, usize)],
    ) -> Result<Self, FsaError> {
        if num_states == 0 {
            return Err(FsaError::Invalid("automaton needs at least one state".into()));
        }
        if initial >= num_states {
            return Err(FsaError::Invalid(format!("initial state {initial} out of range")));
        }
        let mut finals = vec![false; num_states];
        for &f in final_states {
            if f >= num_states {
                return Err(FsaError::Invalid(format!("final state {f} out of range")));
            }
            finals[f] = true;
        }
        let mut a = Automaton {
            alphabet,
            num_states,
            initial,
            finals,
            transitions: vec![BTreeMap::new(); num_states],
            epsilons: vec![Vec::new(); num_states],
        };
        for &(from, sym, to) in transitions {
            if from >= num_states || to >= num_states {
                return Err(FsaError::Invalid(format!("transition ({from},{sym},{to}) out of range")));
            }
            if sym >= a.alphabet.len() {
                return Err(FsaError::Invalid(format!("symbol index {sym} out of range")));
            }
            a.add_transition(from, sym, to);
        }
        Ok(a)
    }

    /// The automaton accepting the empty language.
    pub fn empty_language(alphabet: Alphabet) -> Self {
        Automaton {
            alphabet,
            num_states: 1,
            initial: 0,
            finals: vec![false],
            transitions: vec![BTreeMap::new()],
            epsilons: vec![Vec::new()],
        }
    }

    /// The automaton accepting exactly the empty word.
    pub fn epsilon_language(alphabet: Alphabet) -> Self {
        Automaton {
            alphabet,
            num_states: 1,
            initial: 0,
            finals: vec![true],
            transitions: vec![BTreeMap::new()],
            epsilons: vec![Vec::new()],
        }
    }

    /// The automaton accepting exactly one word.
    pub fn literal(alphabet: Alphabet, word: &[Symbol]) -> Self {
        let n = word.len() + 1;
        let mut a = Automaton {
            alphabet,
            num_states: n,
            initial: 0,
            finals: vec![false; n],
            transitions: vec![BTreeMap::new(); n],
            epsilons: vec![Vec::new(); n],
        };
        a.finals[n - 1] = true;
        for (i, &s) in word.iter().enumerate() {
            a.add_transition(i, s, i + 1);
        }
        a
    }

    /// The automaton accepting all words over the alphabet.
    pub fn all_words(alphabet: Alphabet) -> Self {
        let syms: Vec<Symbol> = alphabet.symbols().collect();
        let mut a = Automaton {
            alphabet,
            num_states: 1,
            initial: 0,
            finals: vec![true],
            transitions: vec![BTreeMap::new()],
            epsilons: vec![Vec::new()],
        };
        for s in syms {
            a.add_transition(0, s, 0);
        }
        a
    }

    pub(crate) fn add_transition(&mut self, from: usize, sym: Symbol, to: usize) {
        let targets = self.transitions[from].entry(sym).or_default();
        if let Err(pos) = targets.binary_search(&to) {
            targets.insert(pos, to);
        }
    }

    pub(crate) fn add_epsilon(&mut self, from: usize, to: usize) {
        if let Err(pos) = self.epsilons[from].binary_search(&to) {
            self.epsilons[from].insert(pos, to);
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn final_states(&self) -> Vec<usize> {
        (0..self.num_states).filter(|&q| self.finals[q]).collect()
    }

    /// All transitions as `(from, symbol, to)`, sorted.
    pub fn transition_list(&self) -> Vec<(usize, Symbol, usize)> {
        let mut out = Vec::new();
        for q in 0..self.num_states {
            for (&s, targets) in &self.transitions[q] {
                for &t in targets {
                    out.push((q, s, t));
                }
            }
        }
        out
    }

    pub fn epsilon_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for q in 0..self.num_states {
            for &t in &self.epsilons[q] {
                out.push((q, t));
            }
        }
        out
    }

    pub fn has_epsilons(&self) -> bool {
        self.epsilons.iter().any(|e| !e.is_empty())
    }

    pub fn is_deterministic(&self) -> bool {
        !self.has_epsilons()
            && self.transitions.iter().all(|m| m.values().all(|t| t.len() <= 1))
    }

    fn eps_close(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.epsilons[q] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    fn start_set(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::from([self.initial]);
        self.eps_close(&mut s);
        s
    }

    fn step_set(&self, set: &BTreeSet<usize>, sym: Symbol) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &q in set {
            if let Some(targets) = self.transitions[q].get(&sym) {
                out.extend(targets.iter().copied());
            }
        }
        self.eps_close(&mut out);
        out
    }

    /// Membership by direct subset simulation (no prior determinization).
    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut set = self.start_set();
        for &s in word {
            if set.is_empty() {
                return false;
            }
            set = self.step_set(&set, s);
        }
        set.iter().any(|&q| self.finals[q])
    }

    /// States reachable from the initial state.
    fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            for targets in self.transitions[q].values() {
                for &t in targets {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            for &t in &self.epsilons[q] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub(crate) fn coaccessible(&self) -> Vec<bool> {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for q in 0..self.num_states {
            for targets in self.transitions[q].values() {
                for &t in targets {
                    rev[t].push(q);
                }
            }
            for &t in &self.epsilons[q] {
                rev[t].push(q);
            }
        }
        let mut seen = vec![false; self.num_states];
        let mut queue: VecDeque<usize> =
            (0..self.num_states).filter(|&q| self.finals[q]).collect();
        for &q in &queue {
            seen[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for &p in &rev[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    pub fn is_empty_language(&self) -> bool {
        let acc = self.accessible();
        !(0..self.num_states).any(|q| acc[q] && self.finals[q])
    }

    /// Restricts to accessible-and-coaccessible states (the empty language
    /// collapses to a single non-final state).
    pub fn trim(&self) -> Automaton {
        let acc = self.accessible();
        let co = self.coaccessible();
        let keep: Vec<usize> =
            (0..self.num_states).filter(|&q| acc[q] && co[q]).collect();
        if keep.is_empty() || !keep.contains(&self.initial) {
            return Automaton::empty_language(self.alphabet.clone());
        }
        let mut remap = vec![usize::MAX; self.num_states];
        for (i, &q) in keep.iter().enumerate() {
            remap[q] = i;
        }
        let mut out = Automaton {
            alphabet: self.alphabet.clone(),
            num_states: keep.len(),
            initial: remap[self.initial],
            finals: keep.iter().map(|&q| self.finals[q]).collect(),
            transitions: vec![BTreeMap::new(); keep.len()],
            epsilons: vec![Vec::new(); keep.len()],
        };
        for &q in &keep {
            for (&s, targets) in &self.transitions[q] {
                for &t in targets {
                    if remap[t] != usize::MAX {
                        out.add_transition(remap[q], s, remap[t]);
                    }
                }
            }
            for &t in &self.epsilons[q] {
                if remap[t] != usize::MAX {
                    out.add_epsilon(remap[q], remap[t]);
                }
            }
        }
        out
    }

    /// Subset construction with the global state cap.
    pub fn determinize(&self) -> Result<Automaton, FsaError> {
        self.determinize_capped(state_cap())
    }

    /// Subset construction; exceeding `cap` states is a resource error.
    pub fn determinize_capped(&self, cap: usize) -> Result<Automaton, FsaError> {
        if self.is_deterministic() {
            return Ok(self.clone());
        }
        let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        let start = self.start_set();
        ids.insert(start.clone(), 0);
        sets.push(start);
        let mut transitions: Vec<BTreeMap<Symbol, Vec<usize>>> = vec![BTreeMap::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let set = sets[i].clone();
            let mut symbols = BTreeSet::new();
            for &q in &set {
                symbols.extend(self.transitions[q].keys().copied());
            }
            for s in symbols {
                let next = self.step_set(&set, s);
                if next.is_empty() {
                    continue;
                }
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len();
                        if id >= cap {
                            return Err(FsaError::StateCapExceeded {
                                cap,
                                during: "determinization",
                            });
                        }
                        ids.insert(next.clone(), id);
                        sets.push(next);
                        transitions.push(BTreeMap::new());
                        queue.push_back(id);
                        id
                    }
                };
                transitions[i].insert(s, vec![id]);
            }
        }
        let finals = sets
            .iter()
            .map(|set| set.iter().any(|&q| self.finals[q]))
            .collect();
        Ok(Automaton {
            alphabet: self.alphabet.clone(),
            num_states: sets.len(),
            initial: 0,
            finals,
            transitions,
            epsilons: vec![Vec::new(); sets.len()],
        })
    }

    /// Makes a deterministic automaton complete by adding a sink if needed.
    pub(crate) fn completed(&self) -> Automaton {
        debug_assert!(self.is_deterministic());
        let needs_sink = (0..self.num_states).any(|q| {
            self.alphabet.symbols().any(|s| !self.transitions[q].contains_key(&s))
        });
        if !needs_sink && self.num_states > 0 {
            return self.clone();
        }
        let mut out = self.clone();
        let sink = out.num_states;
        out.num_states += 1;
        out.finals.push(false);
        out.transitions.push(BTreeMap::new());
        out.epsilons.push(Vec::new());
        for q in 0..out.num_states {
            for s in out.alphabet.symbols().collect::<Vec<_>>() {
                out.transitions[q].entry(s).or_insert_with(|| vec![sink]);
            }
        }
        out
    }

    /// Minimal complete DFA for the same language (Moore partition refinement).
    /// The empty language minimizes to a single non-accepting sink.
    pub fn minimize(&self) -> Result<Automaton, FsaError> {
        let dfa = self.determinize()?;
        // Drop states that cannot matter, then complete so refinement sees a
        // total transition function.
        let dfa = {
            let acc = dfa.accessible();
            let keep: Vec<usize> = (0..dfa.num_states).filter(|&q| acc[q]).collect();
            let mut remap = vec![usize::MAX; dfa.num_states];
            for (i, &q) in keep.iter().enumerate() {
                remap[q] = i;
            }
            let mut out = Automaton {
                alphabet: dfa.alphabet.clone(),
                num_states: keep.len(),
                initial: remap[dfa.initial],
                finals: keep.iter().map(|&q| dfa.finals[q]).collect(),
                transitions: vec![BTreeMap::new(); keep.len()],
                epsilons: vec![Vec::new(); keep.len()],
            };
            for &q in &keep {
                for (&s, targets) in &dfa.transitions[q] {
                    for &t in targets {
                        out.add_transition(remap[q], s, remap[t]);
                    }
                }
            }
            out
        };
        let dfa = dfa.completed();
        let n = dfa.num_states;
        let syms: Vec<Symbol> = dfa.alphabet.symbols().collect();
        let delta = |q: usize, s: Symbol| dfa.transitions[q][&s][0];

        let mut class: Vec<usize> = dfa.finals.iter().map(|&f| usize::from(f)).collect();
        let mut num_classes = if class.iter().any(|&c| c == 1) && class.iter().any(|&c| c == 0) {
            2
        } else {
            1
        };
        loop {
            let mut sig_ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut next_class = vec![0usize; n];
            for q in 0..n {
                let sig: Vec<usize> = syms.iter().map(|&s| class[delta(q, s)]).collect();
                let key = (class[q], sig);
                let len = sig_ids.len();
                let id = *sig_ids.entry(key).or_insert(len);
                next_class[q] = id;
            }
            let next_count = sig_ids.len();
            if next_count == num_classes {
                class = next_class;
                break;
            }
            class = next_class;
            num_classes = next_count;
        }
        let mut out = Automaton {
            alphabet: dfa.alphabet.clone(),
            num_states: num_classes,
            initial: class[dfa.initial],
            finals: vec![false; num_classes],
            transitions: vec![BTreeMap::new(); num_classes],
            epsilons: vec![Vec::new(); num_classes],
        };
        for q in 0..n {
            if dfa.finals[q] {
                out.finals[class[q]] = true;
            }
            for &s in &syms {
                out.transitions[class[q]].insert(s, vec![class[delta(q, s)]]);
            }
        }
        Ok(out)
    }

    /// Marks every state from which a final state is reachable as final,
    /// producing the prefix closure of the language.
    pub fn prefix_closure(&self) -> Automaton {
        let co = self.coaccessible();
        let mut out = self.clone();
        for q in 0..out.num_states {
            if co[q] {
                out.finals[q] = true;
            }
        }
        out.trim()
    }

    /// Adds a fresh initial state with ε-moves into every accessible state,
    /// producing the suffix closure of the language.
    pub fn suffix_closure(&self) -> Automaton {
        let acc = self.accessible();
        let mut out = self.clone();
        let fresh = out.num_states;
        out.num_states += 1;
        out.finals.push(self.accepts(&[]));
        out.transitions.push(BTreeMap::new());
        out.epsilons.push(Vec::new());
        for q in 0..self.num_states {
            if acc[q] {
                out.add_epsilon(fresh, q);
            }
        }
        out.initial = fresh;
        out.trim()
    }

    /// All factors (substrings) of words of the language.
    pub fn factor_closure(&self) -> Automaton {
        self.suffix_closure().prefix_closure()
    }

    /// Re-expresses the automaton over another alphabet via a per-symbol map.
    pub fn relabel(&self, alphabet: Alphabet, symbol_map: &[Symbol]) -> Result<Automaton, FsaError> {
        if symbol_map.len() != self.alphabet.len() {
            return Err(FsaError::Invalid("symbol map length mismatch".into()));
        }
        if symbol_map.iter().any(|&s| s >= alphabet.len()) {
            return Err(FsaError::Invalid("symbol map target out of range".into()));
        }
        let mut out = Automaton {
            alphabet,
            num_states: self.num_states,
            initial: self.initial,
            finals: self.finals.clone(),
            transitions: vec![BTreeMap::new(); self.num_states],
            epsilons: self.epsilons.clone(),
        };
        for q in 0..self.num_states {
            for (&s, targets) in &self.transitions[q] {
                for &t in targets {
                    out.add_transition(q, symbol_map[s], t);
                }
            }
        }
        Ok(out)
    }

    /// Shortlex enumeration of the language up to `max_len`, with the default
    /// word cap.
    pub fn enumerate(&self, max_len: usize) -> Result<Vec<Word>, FsaError> {
        self.enumerate_capped(max_len, DEFAULT_WORD_CAP)
    }

    /// Shortlex enumeration (lengths ascending, alphabet order within a
    /// length). Dead prefixes are pruned via co-accessibility, so the cost is
    /// proportional to the number of live prefixes.
    pub fn enumerate_capped(&self, max_len: usize, word_cap: usize) -> Result<Vec<Word>, FsaError> {
        let co = self.coaccessible();
        let live = |set: &BTreeSet<usize>| set.iter().any(|&q| co[q]);
        let mut out = Vec::new();
        let start = self.start_set();
        if !live(&start) {
            return Ok(out);
        }
        // Frontier of live prefixes of the current length.
        let mut frontier: Vec<(BTreeSet<usize>, Word)> = vec![(start, Vec::new())];
        for len in 0..=max_len {
            for (set, word) in &frontier {
                debug_assert_eq!(word.len(), len);
                if set.iter().any(|&q| self.finals[q]) {
                    if out.len() >= word_cap {
                        return Err(FsaError::WordCapExceeded { cap: word_cap });
                    }
                    out.push(word.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (set, word) in &frontier {
                for s in self.alphabet.symbols() {
                    let stepped = self.step_set(set, s);
                    if !stepped.is_empty() && live(&stepped) {
                        let mut w = word.clone();
                        w.push(s);
                        next.push((stepped, w));
                        if next.len() > word_cap {
                            return Err(FsaError::WordCapExceeded { cap: word_cap });
                        }
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(out)
    }

    /// Language equality up to a length bound, by enumeration. Intended for
    /// tests and the CLI; exact equivalence goes through `minimize`.
    pub fn same_language_to(&self, other: &Automaton, max_len: usize) -> Result<bool, FsaError> {
        if self.alphabet != other.alphabet {
            return Err(FsaError::AlphabetMismatch {
                left: self.alphabet.labels().join(","),
                right: other.alphabet.labels().join(","),
            });
        }
        Ok(self.enumerate(max_len)? == other.enumerate(max_len)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn literal_and_membership() {
        let al = ab();
        let w = al.parse_word("abba").unwrap();
        let m = Automaton::literal(al.clone(), &w);
        assert!(m.accepts(&w));
        assert!(!m.accepts(&al.parse_word("ab").unwrap()));
        assert!(!m.accepts(&[]));
    }

    #[test]
    fn determinize_respects_cap() {
        // (a|b)* a (a|b)^4 needs 2^5 subset states; cap below that must error.
        let al = ab();
        let n = 6;
        let mut a = Automaton::from_parts(al, n, 0, &[n - 1], &[]).unwrap();
        a.add_transition(0, 0, 0);
        a.add_transition(0, 1, 0);
        a.add_transition(0, 0, 1);
        for q in 1..n - 1 {
            a.add_transition(q, 0, q + 1);
            a.add_transition(q, 1, q + 1);
        }
        assert!(matches!(
            a.determinize_capped(10),
            Err(FsaError::StateCapExceeded { cap: 10, .. })
        ));
        let d = a.determinize_capped(1000).unwrap();
        assert!(d.is_deterministic());
        assert!(d.same_language_to(&a, 8).unwrap());
    }

    #[test]
    fn minimize_empty_language_is_single_sink() {
        let m = Automaton::empty_language(ab()).minimize().unwrap();
        assert_eq!(m.num_states(), 1);
        assert!(m.final_states().is_empty());
        assert!(m.is_deterministic());
    }

    #[test]
    fn closures() {
        let al = ab();
        let w = al.parse_word("ab").unwrap();
        let m = Automaton::literal(al.clone(), &w);
        let pref = m.prefix_closure();
        assert!(pref.accepts(&[]) && pref.accepts(&[0]) && pref.accepts(&w));
        assert!(!pref.accepts(&[1]));
        let suff = m.suffix_closure();
        assert!(suff.accepts(&[]) && suff.accepts(&[1]) && suff.accepts(&w));
        assert!(!suff.accepts(&[0]));
        let fact = m.factor_closure();
        assert!(fact.accepts(&[0]) && fact.accepts(&[1]) && fact.accepts(&[]));
        assert!(!fact.accepts(&al.parse_word("ba").unwrap()));
    }

    #[test]
    fn enumeration_is_shortlex() {
        let al = ab();
        let m = Automaton::all_words(al.clone());
        let words = m.enumerate(2).unwrap();
        let rendered: Vec<String> = words.iter().map(|w| al.render(w)).collect();
        assert_eq!(rendered, ["ε", "a", "b", "aa", "ab", "ba", "bb"]);
    }
}
