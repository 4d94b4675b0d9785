//! Padded convolution of words and languages.
//!
//! The convolution alphabet of `A` and `B` consists of the pairs
//! `(A×B) ∪ (A×{$}) ∪ ({$}×B)` where `$` is a reserved padding mark. The
//! convolution `u ⋄ v` of two words is the unique word over that alphabet
//! whose left projection is `u` padded to `max(|u|,|v|)` and whose right
//! projection is `v` likewise; padding may only appear as a suffix on the
//! shorter side, so `|u ⋄ v| = max(|u|, |v|)`.

use super::{state_cap, Alphabet, AlphabetError, Automaton, FsaError, Symbol, Word};
use std::collections::{BTreeMap, HashMap, VecDeque};

/// The paired alphabet for convolutions, with projections to each side.
#[derive(Clone, Debug)]
pub struct ConvolutionAlphabet {
    alphabet: Alphabet,
    left: Alphabet,
    right: Alphabet,
    /// Per merged symbol: the (left, right) components; `None` is padding.
    pairs: Vec<(Option<Symbol>, Option<Symbol>)>,
    pair_index: HashMap<(Option<Symbol>, Option<Symbol>), Symbol>,
}

impl ConvolutionAlphabet {
    pub fn new(left: &Alphabet, right: &Alphabet) -> Result<Self, AlphabetError> {
        let mut labels = Vec::new();
        let mut pairs = Vec::new();
        let mut pair_index = HashMap::new();
        let push = |l: Option<Symbol>, r: Option<Symbol>,
                        labels: &mut Vec<String>,
                        pairs: &mut Vec<(Option<Symbol>, Option<Symbol>)>,
                        pair_index: &mut HashMap<(Option<Symbol>, Option<Symbol>), Symbol>| {
            let ll = l.map_or("$", |s| left.label(s));
            let rl = r.map_or("$", |s| right.label(s));
            labels.push(format!("({ll},{rl})"));
            pair_index.insert((l, r), pairs.len());
            pairs.push((l, r));
        };
        for l in left.symbols() {
            for r in right.symbols() {
                push(Some(l), Some(r), &mut labels, &mut pairs, &mut pair_index);
            }
        }
        for l in left.symbols() {
            push(Some(l), None, &mut labels, &mut pairs, &mut pair_index);
        }
        for r in right.symbols() {
            push(None, Some(r), &mut labels, &mut pairs, &mut pair_index);
        }
        let mut alphabet = Alphabet::new_unchecked(labels);
        // Inherit a componentwise involution when both sides have one
        // (padding is fixed by inversion).
        if let (Some(li), Some(ri)) = (left.involution(), right.involution()) {
            let inv: Vec<usize> = pairs
                .iter()
                .map(|&(l, r)| pair_index[&(l.map(|s| li[s]), r.map(|s| ri[s]))])
                .collect();
            alphabet.set_involution_raw(Some(inv));
        }
        Ok(ConvolutionAlphabet {
            alphabet,
            left: left.clone(),
            right: right.clone(),
            pairs,
            pair_index,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn left(&self) -> &Alphabet {
        &self.left
    }

    pub fn right(&self) -> &Alphabet {
        &self.right
    }

    /// The merged symbol for a component pair (at most one side padded).
    pub fn pair(&self, l: Option<Symbol>, r: Option<Symbol>) -> Option<Symbol> {
        self.pair_index.get(&(l, r)).copied()
    }

    /// The component pair of a merged symbol.
    pub fn components(&self, s: Symbol) -> (Option<Symbol>, Option<Symbol>) {
        self.pairs[s]
    }

    /// `u ⋄ v` at the word level.
    pub fn convolve_words(&self, u: &[Symbol], v: &[Symbol]) -> Word {
        let n = u.len().max(v.len());
        (0..n)
            .map(|i| {
                let l = u.get(i).copied();
                let r = v.get(i).copied();
                self.pair_index[&(l, r)]
            })
            .collect()
    }

    /// Left projection, dropping padding.
    pub fn project_left(&self, w: &[Symbol]) -> Word {
        w.iter().filter_map(|&s| self.pairs[s].0).collect()
    }

    /// Right projection, dropping padding.
    pub fn project_right(&self, w: &[Symbol]) -> Word {
        w.iter().filter_map(|&s| self.pairs[s].1).collect()
    }

    /// Checks that a word is a well-formed convolution: padding only as a
    /// suffix, and on one side only.
    pub fn is_well_padded(&self, w: &[Symbol]) -> bool {
        let mut seen_pad: Option<bool> = None; // true = left padded
        for &s in w {
            match self.pairs[s] {
                (Some(_), Some(_)) => {
                    if seen_pad.is_some() {
                        return false;
                    }
                }
                (None, Some(_)) => match seen_pad {
                    None => seen_pad = Some(true),
                    Some(true) => {}
                    Some(false) => return false,
                },
                (Some(_), None) => match seen_pad {
                    None => seen_pad = Some(false),
                    Some(false) => {}
                    Some(true) => return false,
                },
                (None, None) => unreachable!("no fully padded symbol exists"),
            }
        }
        true
    }
}

/// State of the convolution product automaton.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum ConvState {
    /// Both components still reading.
    Main(usize, usize),
    /// Right word exhausted (was accepted); left component still reading.
    LeftTail(usize),
    /// Left word exhausted (was accepted); right component still reading.
    RightTail(usize),
}

/// The automaton for `L1 ⋄ L2` over `ca`, where `L1` is over `ca.left()` and
/// `L2` over `ca.right()`. Accepts exactly `{u ⋄ v : u ∈ L1, v ∈ L2}`.
pub fn convolve(
    ca: &ConvolutionAlphabet,
    l1: &Automaton,
    l2: &Automaton,
) -> Result<Automaton, FsaError> {
    if l1.alphabet() != ca.left() || l2.alphabet() != ca.right() {
        return Err(FsaError::AlphabetMismatch {
            left: l1.alphabet().labels().join(","),
            right: l2.alphabet().labels().join(","),
        });
    }
    let cap = state_cap();
    let d1 = l1.determinize_capped(cap)?.completed();
    let d2 = l2.determinize_capped(cap)?.completed();
    let step1 = |q: usize, s: Symbol| d1.transitions[q][&s][0];
    let step2 = |q: usize, s: Symbol| d2.transitions[q][&s][0];

    let mut ids: BTreeMap<ConvState, usize> = BTreeMap::new();
    let start = ConvState::Main(d1.initial(), d2.initial());
    ids.insert(start, 0);
    let mut states = vec![start];
    let mut transitions: Vec<(usize, Symbol, usize)> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let intern = |st: ConvState,
                      ids: &mut BTreeMap<ConvState, usize>,
                      states: &mut Vec<ConvState>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize, FsaError> {
        if let Some(&id) = ids.get(&st) {
            return Ok(id);
        }
        let id = states.len();
        if id >= cap {
            return Err(FsaError::StateCapExceeded { cap, during: "convolution" });
        }
        ids.insert(st, id);
        states.push(st);
        queue.push_back(id);
        Ok(id)
    };
    while let Some(i) = queue.pop_front() {
        let st = states[i];
        for sym in ca.alphabet().symbols() {
            let (l, r) = ca.components(sym);
            let next = match (st, l, r) {
                (ConvState::Main(q1, q2), Some(a), Some(b)) => {
                    Some(ConvState::Main(step1(q1, a), step2(q2, b)))
                }
                // Entering a left tail asserts the right word ended here.
                (ConvState::Main(q1, q2), Some(a), None) if d2.is_final(q2) => {
                    Some(ConvState::LeftTail(step1(q1, a)))
                }
                (ConvState::Main(q1, q2), None, Some(b)) if d1.is_final(q1) => {
                    Some(ConvState::RightTail(step2(q2, b)))
                }
                (ConvState::LeftTail(q1), Some(a), None) => Some(ConvState::LeftTail(step1(q1, a))),
                (ConvState::RightTail(q2), None, Some(b)) => {
                    Some(ConvState::RightTail(step2(q2, b)))
                }
                _ => None,
            };
            if let Some(next) = next {
                let id = intern(next, &mut ids, &mut states, &mut queue)?;
                transitions.push((i, sym, id));
            }
        }
    }
    let finals: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, st)| match **st {
            ConvState::Main(q1, q2) => d1.is_final(q1) && d2.is_final(q2),
            ConvState::LeftTail(q1) => d1.is_final(q1),
            ConvState::RightTail(q2) => d2.is_final(q2),
        })
        .map(|(i, _)| i)
        .collect();
    let out =
        Automaton::from_parts(ca.alphabet().clone(), states.len(), 0, &finals, &transitions)?;
    Ok(out.trim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsa::{star, union};

    #[test]
    fn word_convolution_shapes() {
        let a = Alphabet::new(["a"]).unwrap();
        let b = Alphabet::new(["b"]).unwrap();
        let ca = ConvolutionAlphabet::new(&a, &b).unwrap();
        let u = vec![0, 0, 0];
        let v = vec![0];
        let w = ca.convolve_words(&u, &v);
        assert_eq!(w.len(), 3);
        assert_eq!(ca.project_left(&w), u);
        assert_eq!(ca.project_right(&w), v);
        assert!(ca.is_well_padded(&w));
        assert_eq!(
            ca.alphabet().label(w[0]).to_string(),
            "(a,b)".to_string()
        );
        assert_eq!(ca.alphabet().label(w[2]).to_string(), "(a,$)".to_string());
    }

    #[test]
    fn language_convolution_matches_pairwise_definition() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let l1 = star(&union(
            &Automaton::literal(al.clone(), &al.parse_word("a").unwrap()),
            &Automaton::literal(al.clone(), &al.parse_word("bb").unwrap()),
        )
        .unwrap())
        .unwrap();
        let l2 = star(&Automaton::literal(al.clone(), &al.parse_word("ab").unwrap())).unwrap();
        let ca = ConvolutionAlphabet::new(&al, &al).unwrap();
        let conv = convolve(&ca, &l1, &l2).unwrap();
        let max = 5;
        let mut expected: Vec<Word> = Vec::new();
        for u in l1.enumerate(max).unwrap() {
            for v in l2.enumerate(max).unwrap() {
                if u.len().max(v.len()) <= max {
                    expected.push(ca.convolve_words(&u, &v));
                }
            }
        }
        expected.sort_by(|x, y| (x.len(), x.as_slice()).cmp(&(y.len(), y.as_slice())));
        expected.dedup();
        assert_eq!(conv.enumerate(max).unwrap(), expected);
    }
}
