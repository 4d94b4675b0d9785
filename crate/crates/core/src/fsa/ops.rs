//! Boolean and rational operations on automata.
//!
//! Boolean operations go through the product of completed DFAs so the result
//! is deterministic; concatenation and star build ε-NFAs. All operations
//! require both arguments to share one alphabet (merge alphabets first with
//! [`Alphabet::merged`] + [`Automaton::relabel`] when combining languages
//! over different alphabets).

use super::{state_cap, Automaton, FsaError, Symbol};
use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BoolOp {
    Union,
    Intersection,
    Difference,
}

fn check_same_alphabet(a: &Automaton, b: &Automaton) -> Result<(), FsaError> {
    if a.alphabet() != b.alphabet() {
        return Err(FsaError::AlphabetMismatch {
            left: a.alphabet().labels().join(","),
            right: b.alphabet().labels().join(","),
        });
    }
    Ok(())
}

fn product(a: &Automaton, b: &Automaton, op: BoolOp) -> Result<Automaton, FsaError> {
    check_same_alphabet(a, b)?;
    let cap = state_cap();
    let da = a.determinize_capped(cap)?.completed();
    let db = b.determinize_capped(cap)?.completed();
    let accept = |fa: bool, fb: bool| match op {
        BoolOp::Union => fa || fb,
        BoolOp::Intersection => fa && fb,
        BoolOp::Difference => fa && !fb,
    };
    let step = |m: &Automaton, q: usize, s: Symbol| m.transitions[q][&s][0];

    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let start = (da.initial(), db.initial());
    ids.insert(start, 0);
    let mut states = vec![start];
    let mut transitions: Vec<BTreeMap<Symbol, Vec<usize>>> = vec![BTreeMap::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (qa, qb) = states[i];
        for s in da.alphabet().symbols() {
            let next = (step(&da, qa, s), step(&db, qb, s));
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= cap {
                        return Err(FsaError::StateCapExceeded { cap, during: "product" });
                    }
                    ids.insert(next, id);
                    states.push(next);
                    transitions.push(BTreeMap::new());
                    queue.push_back(id);
                    id
                }
            };
            transitions[i].insert(s, vec![id]);
        }
    }
    let finals: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, &(qa, qb))| accept(da.is_final(qa), db.is_final(qb)))
        .map(|(i, _)| i)
        .collect();
    let list: Vec<(usize, Symbol, usize)> = transitions
        .iter()
        .enumerate()
        .flat_map(|(q, m)| m.iter().map(move |(&s, t)| (q, s, t[0])))
        .collect();
    let out = Automaton::from_parts(da.alphabet().clone(), states.len(), 0, &finals, &list)?;
    Ok(out.trim())
}

pub fn union(a: &Automaton, b: &Automaton) -> Result<Automaton, FsaError> {
    product(a, b, BoolOp::Union)
}

pub fn intersection(a: &Automaton, b: &Automaton) -> Result<Automaton, FsaError> {
    product(a, b, BoolOp::Intersection)
}

pub fn difference(a: &Automaton, b: &Automaton) -> Result<Automaton, FsaError> {
    product(a, b, BoolOp::Difference)
}

/// Complement within the full word set over the alphabet.
pub fn complement(a: &Automaton) -> Result<Automaton, FsaError> {
    let full = Automaton::all_words(a.alphabet().clone());
    product(&full, a, BoolOp::Difference)
}

/// Concatenation of languages over a shared alphabet (ε-NFA construction).
pub fn concat(a: &Automaton, b: &Automaton) -> Result<Automaton, FsaError> {
    check_same_alphabet(a, b)?;
    let na = a.num_states();
    let nb = b.num_states();
    let finals: Vec<usize> = b.final_states().iter().map(|&f| na + f).collect();
    let mut out = Automaton::from_parts(
        a.alphabet().clone(),
        na + nb,
        a.initial(),
        &finals,
        &[],
    )?;
    for (from, s, to) in a.transition_list() {
        out.add_transition(from, s, to);
    }
    for (from, to) in a.epsilon_list() {
        out.add_epsilon(from, to);
    }
    for (from, s, to) in b.transition_list() {
        out.add_transition(na + from, s, na + to);
    }
    for (from, to) in b.epsilon_list() {
        out.add_epsilon(na + from, na + to);
    }
    for f in a.final_states() {
        out.add_epsilon(f, na + b.initial());
    }
    Ok(out)
}

/// Kleene star (ε-NFA construction with a fresh accepting initial state).
pub fn star(a: &Automaton) -> Result<Automaton, FsaError> {
    let n = a.num_states();
    let fresh = n;
    let mut out = Automaton::from_parts(a.alphabet().clone(), n + 1, fresh, &[fresh], &[])?;
    for (from, s, to) in a.transition_list() {
        out.add_transition(from, s, to);
    }
    for (from, to) in a.epsilon_list() {
        out.add_epsilon(from, to);
    }
    out.add_epsilon(fresh, a.initial());
    for f in a.final_states() {
        out.add_epsilon(f, fresh);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsa::Alphabet;

    fn lit(al: &Alphabet, s: &str) -> Automaton {
        Automaton::literal(al.clone(), &al.parse_word(s).unwrap())
    }

    #[test]
    fn boolean_ops_agree_with_word_level_definitions() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let l1 = star(&union(&lit(&al, "a"), &lit(&al, "ab")).unwrap()).unwrap();
        let l2 = star(&lit(&al, "ab")).unwrap();
        let all = Automaton::all_words(al.clone());
        for len in 0..=6 {
            let w1 = l1.enumerate(len).unwrap();
            let w2 = l2.enumerate(len).unwrap();
            let uni = union(&l1, &l2).unwrap().enumerate(len).unwrap();
            let int = intersection(&l1, &l2).unwrap().enumerate(len).unwrap();
            let dif = difference(&l1, &l2).unwrap().enumerate(len).unwrap();
            let comp = complement(&l1).unwrap().enumerate(len).unwrap();
            let set1: std::collections::BTreeSet<_> = w1.iter().cloned().collect();
            let set2: std::collections::BTreeSet<_> = w2.iter().cloned().collect();
            for w in all.enumerate(len).unwrap() {
                assert_eq!(uni.contains(&w), set1.contains(&w) || set2.contains(&w));
                assert_eq!(int.contains(&w), set1.contains(&w) && set2.contains(&w));
                assert_eq!(dif.contains(&w), set1.contains(&w) && !set2.contains(&w));
                assert_eq!(comp.contains(&w), !set1.contains(&w));
            }
        }
    }

    #[test]
    fn concat_and_star() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let m = concat(&lit(&al, "a"), &star(&lit(&al, "b")).unwrap()).unwrap();
        assert!(m.accepts(&al.parse_word("a").unwrap()));
        assert!(m.accepts(&al.parse_word("abbb").unwrap()));
        assert!(!m.accepts(&al.parse_word("ba").unwrap()));
        assert!(!m.accepts(&[]));
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        let a = Automaton::all_words(Alphabet::new(["a"]).unwrap());
        let b = Automaton::all_words(Alphabet::new(["b"]).unwrap());
        assert!(matches!(union(&a, &b), Err(FsaError::AlphabetMismatch { .. })));
    }
}
