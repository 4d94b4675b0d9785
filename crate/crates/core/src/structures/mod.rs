//! Automatic structures: regular languages of normal forms for group models.
//!
//! An [`AutomaticStructure`] is a regular language over the marked alphabet
//! of a [`GroupModel`].  The language is meant to be a rational section of
//! the evaluation map — every group element should have at least one
//! accepted spelling — and the central empirical question is whether words
//! with nearby endpoints stay uniformly close along the way (the
//! fellow-traveller property).  The check methods sweep all accepted words
//! up to a length bound, measure the relevant constant, and report whether
//! it has stabilised or keeps growing.

pub(crate) mod checks;
mod equivalence;

pub use checks::SweepOptions;
pub use equivalence::EquivalenceMode;

use crate::fsa::{Automaton, FsaError, Word};
use crate::groups::{DistanceOracle, Element, GroupError, GroupModel, PathTrace};
use std::cell::RefCell;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StructureError {
    /// The language's alphabet does not match the group's marked alphabet.
    #[error("language alphabet {language:?} does not match the marked alphabet {group:?}")]
    AlphabetMismatch { group: Vec<String>, language: Vec<String> },
    /// No normal-form builder is available for this model.
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Fsa(#[from] FsaError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Default)]
struct Cache {
    /// Accepted words in shortlex order, complete up to `complete_to`.
    words: Vec<Word>,
    complete_to: Option<usize>,
    /// Indices into `words` grouped by endpoint (ascending, so the first
    /// entry is the shortlex-least representative).
    by_endpoint: HashMap<Element, Vec<usize>>,
}

/// A regular language of normal forms over a marked group alphabet.
pub struct AutomaticStructure {
    name: String,
    group: GroupModel,
    language: Automaton,
    cache: RefCell<Cache>,
}

impl AutomaticStructure {
    /// Couple a language with a group model.  The alphabets must agree
    /// label-for-label so that symbols index the same generators.
    pub fn new(
        name: impl Into<String>,
        group: GroupModel,
        language: Automaton,
    ) -> Result<Self, StructureError> {
        if group.alphabet().labels() != language.alphabet().labels() {
            return Err(StructureError::AlphabetMismatch {
                group: group.alphabet().labels().to_vec(),
                language: language.alphabet().labels().to_vec(),
            });
        }
        Ok(AutomaticStructure {
            name: name.into(),
            group,
            language,
            cache: RefCell::new(Cache::default()),
        })
    }

    /// Build the shortlex normal-form structure for a standard model:
    /// reduced words for free groups, sorted power blocks for free abelian
    /// groups, first-found representatives for finite groups, concatenated
    /// factor languages for disjoint-union products, and `(reduced word) ·
    /// (coset letter)` forms for free-by-finite models.
    pub fn shortlex(name: impl Into<String>, group: GroupModel) -> Result<Self, StructureError> {
        let language = shortlex_language(&group)?;
        Self::new(name, group, language)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    pub fn language(&self) -> &Automaton {
        &self.language
    }

    /// Rename (used by derived constructions).
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Whether the language accepts the word.
    pub fn accepts(&self, w: &[crate::fsa::Symbol]) -> bool {
        self.language.accepts(w)
    }

    /// The path a word traces from the identity.
    pub fn trace(&self, w: &[crate::fsa::Symbol]) -> PathTrace {
        PathTrace::from_word(&self.group, &self.group.identity(), w)
    }

    fn ensure_words(&self, len: usize) -> Result<(), StructureError> {
        let mut cache = self.cache.borrow_mut();
        if cache.complete_to.is_some_and(|l| l >= len) {
            return Ok(());
        }
        let words = self.language.enumerate(len)?;
        let mut by_endpoint: HashMap<Element, Vec<usize>> = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            by_endpoint.entry(self.group.evaluate(w)).or_default().push(i);
        }
        cache.words = words;
        cache.by_endpoint = by_endpoint;
        cache.complete_to = Some(len);
        Ok(())
    }

    /// Run `f` over the accepted words of length at most `len` (shortlex
    /// order) and the endpoint index for that range.
    pub(crate) fn with_words<T>(
        &self,
        len: usize,
        f: impl FnOnce(&[Word], &HashMap<Element, Vec<usize>>) -> T,
    ) -> Result<T, StructureError> {
        self.ensure_words(len)?;
        let cache = self.cache.borrow();
        // The cache may hold words longer than requested from an earlier,
        // larger sweep; hand out only the prefix within `len`.
        let cutoff = cache.words.partition_point(|w| w.len() <= len);
        if cutoff == cache.words.len() {
            return Ok(f(&cache.words, &cache.by_endpoint));
        }
        let words = &cache.words[..cutoff];
        let mut trimmed: HashMap<Element, Vec<usize>> = HashMap::new();
        for (e, idxs) in cache.by_endpoint.iter() {
            let keep: Vec<usize> = idxs.iter().copied().filter(|&i| i < cutoff).collect();
            if !keep.is_empty() {
                trimmed.insert(e.clone(), keep);
            }
        }
        Ok(f(words, &trimmed))
    }

    /// Accepted words of length at most `len`, in shortlex order.
    pub fn words_up_to(&self, len: usize) -> Result<Vec<Word>, StructureError> {
        self.with_words(len, |ws, _| ws.to_vec())
    }

    /// All accepted spellings of an element within the length bound.
    pub fn representatives_of(
        &self,
        e: &Element,
        max_len: usize,
    ) -> Result<Vec<Word>, StructureError> {
        self.with_words(max_len, |ws, idx| {
            idx.get(e)
                .map(|is| is.iter().map(|&i| ws[i].clone()).collect())
                .unwrap_or_default()
        })
    }

    /// Shortlex-least accepted spelling of an element within the bound.
    pub fn first_representative(
        &self,
        e: &Element,
        max_len: usize,
    ) -> Result<Option<Word>, StructureError> {
        self.with_words(max_len, |ws, idx| {
            idx.get(e).and_then(|is| is.first()).map(|&i| ws[i].clone())
        })
    }

    /// A distance oracle over this structure's group.
    pub fn oracle(&self) -> DistanceOracle<'_> {
        DistanceOracle::new(&self.group)
    }
}

/// Dispatch table for the shortlex builders.
fn shortlex_language(model: &GroupModel) -> Result<Automaton, StructureError> {
    use crate::groups::GroupKind;
    match model.kind() {
        GroupKind::Free { .. } => free_reduced_language(model),
        GroupKind::FreeAbelian { .. } => abelian_block_language(model),
        GroupKind::Finite(_) => finite_rep_language(model),
        GroupKind::Product(..) => product_union_language(model),
        GroupKind::ByFinite(_) => by_finite_language(model),
    }
}

/// Reduced words: any letter may start, and a letter may not be followed by
/// its formal inverse.  Requires the standard one-letter marking.
fn free_reduced_language(model: &GroupModel) -> Result<Automaton, StructureError> {
    let alphabet = model.alphabet();
    if !alphabet.has_involution() || !model.has_exact_metric() {
        return Err(StructureError::Unsupported(
            "shortlex normal forms need the standard free-group marking".into(),
        ));
    }
    let n = alphabet.len();
    // State 0: start; state 1+s: last letter was s.  All states accept.
    let mut transitions = Vec::new();
    for s in alphabet.symbols() {
        transitions.push((0, s, 1 + s));
        for t in alphabet.symbols() {
            if alphabet.inverse_symbol(s) != Some(t) {
                transitions.push((1 + s, t, 1 + t));
            }
        }
    }
    let finals: Vec<usize> = (0..=n).collect();
    Ok(Automaton::from_parts(
        alphabet.clone(),
        n + 1,
        0,
        &finals,
        &transitions,
    )?)
}

/// Sorted power blocks `x₁^±  x₂^± …`, one block per generator: the block
/// for generator `i` is `p*` or `m*` where `p, m` are the symbols marking
/// `+eᵢ` and `−eᵢ`.
fn abelian_block_language(model: &GroupModel) -> Result<Automaton, StructureError> {
    use crate::fsa::{concat, star, union};
    use crate::groups::GroupKind;
    let GroupKind::FreeAbelian { rank } = model.kind() else {
        unreachable!("caller dispatches on kind")
    };
    if !model.has_exact_metric() {
        return Err(StructureError::Unsupported(
            "shortlex normal forms need the standard unit-vector marking".into(),
        ));
    }
    let alphabet = model.alphabet().clone();
    let mut blocks = Vec::new();
    for i in 0..*rank {
        let mut plus = None;
        let mut minus = None;
        for s in alphabet.symbols() {
            let Element::Abelian(v) = model.evaluate_symbol(s) else {
                unreachable!()
            };
            if v[i] == 1 {
                plus = Some(s);
            } else if v[i] == -1 {
                minus = Some(s);
            }
        }
        let (p, m) = (plus.unwrap(), minus.unwrap());
        let p_star = star(&Automaton::literal(alphabet.clone(), &[p]))?;
        let m_star = star(&Automaton::literal(alphabet.clone(), &[m]))?;
        blocks.push(union(&p_star, &m_star)?);
    }
    let mut lang = blocks
        .drain(..)
        .reduce(|a, b| concat(&a, &b).expect("same alphabet"))
        .expect("rank >= 1");
    lang = lang.minimize()?;
    Ok(lang)
}

/// First-found representative per element, searching words in shortlex
/// order.  Elements the marking cannot reach get no representative.
fn finite_rep_language(model: &GroupModel) -> Result<Automaton, StructureError> {
    use crate::fsa::union;
    use std::collections::VecDeque;
    let alphabet = model.alphabet().clone();
    let mut reps: HashMap<Element, Word> = HashMap::new();
    let mut queue: VecDeque<(Word, Element)> = VecDeque::new();
    reps.insert(model.identity(), Vec::new());
    queue.push_back((Vec::new(), model.identity()));
    while let Some((w, e)) = queue.pop_front() {
        for s in alphabet.symbols() {
            let e2 = model.multiply(&e, model.evaluate_symbol(s));
            if !reps.contains_key(&e2) {
                let mut w2 = w.clone();
                w2.push(s);
                reps.insert(e2.clone(), w2.clone());
                queue.push_back((w2, e2));
            }
        }
    }
    let mut lang = Automaton::empty_language(alphabet.clone());
    for w in reps.values() {
        lang = union(&lang, &Automaton::literal(alphabet.clone(), w))?;
    }
    Ok(lang.minimize()?)
}

/// Concatenation of the factor normal forms, for a product model whose
/// marking is the disjoint union of factor markings (each image moves
/// exactly one side).
fn product_union_language(model: &GroupModel) -> Result<Automaton, StructureError> {
    use crate::fsa::{concat, Alphabet};
    use crate::groups::GroupKind;
    let GroupKind::Product(k1, k2) = model.kind() else {
        unreachable!("caller dispatches on kind")
    };
    let id1 = k1.identity();
    let id2 = k2.identity();
    let mut left: Vec<(usize, Element)> = Vec::new(); // (parent symbol, factor image)
    let mut right: Vec<(usize, Element)> = Vec::new();
    for s in model.alphabet().symbols() {
        let Element::Pair(l, r) = model.evaluate_symbol(s) else {
            unreachable!()
        };
        match (**l == id1, **r == id2) {
            (false, true) => left.push((s, (**l).clone())),
            (true, false) => right.push((s, (**r).clone())),
            _ => {
                return Err(StructureError::Unsupported(
                    "product normal forms need a disjoint-union marking (every symbol moves exactly one factor)"
                        .into(),
                ))
            }
        }
    }
    let build_factor = |kind: &GroupKind, part: &[(usize, Element)]| -> Result<Automaton, StructureError> {
        let labels: Vec<String> = part
            .iter()
            .map(|(s, _)| model.alphabet().label(*s).to_string())
            .collect();
        let mut sub_alphabet = Alphabet::new(labels).map_err(crate::fsa::FsaError::from)?;
        // Inherit whatever involution restricts to this side.
        if model.alphabet().has_involution() {
            let pos: HashMap<usize, usize> =
                part.iter().enumerate().map(|(i, (s, _))| (*s, i)).collect();
            let mut pairs = Vec::new();
            let mut total = true;
            for (i, (s, _)) in part.iter().enumerate() {
                match model.alphabet().inverse_symbol(*s).and_then(|t| pos.get(&t)) {
                    Some(&j) => pairs.push((i, j)),
                    None => {
                        total = false;
                        break;
                    }
                }
            }
            if total {
                sub_alphabet
                    .set_involution_pairs(&pairs)
                    .map_err(crate::fsa::FsaError::from)?;
            }
        }
        let images: Vec<Element> = part.iter().map(|(_, e)| e.clone()).collect();
        let sub_model = GroupModel::custom(kind.clone(), sub_alphabet, images)?;
        let lang = shortlex_language(&sub_model)?;
        let map: Vec<usize> = part.iter().map(|(s, _)| *s).collect();
        Ok(lang.relabel(model.alphabet().clone(), &map)?)
    };
    let left_lang = build_factor(k1, &left)?;
    let right_lang = build_factor(k2, &right)?;
    Ok(concat(&left_lang, &right_lang)?.minimize()?)
}

/// `(reduced word in the free part) · (at most one coset letter)`.
fn by_finite_language(model: &GroupModel) -> Result<Automaton, StructureError> {
    use crate::groups::GroupKind;
    let GroupKind::ByFinite(pres) = model.kind() else {
        unreachable!("caller dispatches on kind")
    };
    let alphabet = model.alphabet();
    let free_syms = 2 * pres.free_rank();
    if alphabet.len() != free_syms + pres.cosets() - 1 {
        return Err(StructureError::Unsupported(
            "normal forms need the standard free-by-finite marking".into(),
        ));
    }
    // States: 0 start, 1+s for each free symbol s, then a terminal state
    // after the coset letter.  All states accept.
    let term = free_syms + 1;
    let mut transitions = Vec::new();
    for s in 0..free_syms {
        transitions.push((0, s, 1 + s));
        for t in 0..free_syms {
            // Free letters pair up (2i, 2i+1) in the standard marking.
            if s ^ 1 != t {
                transitions.push((1 + s, t, 1 + t));
            }
        }
    }
    for c in free_syms..alphabet.len() {
        transitions.push((0, c, term));
        for s in 0..free_syms {
            transitions.push((1 + s, c, term));
        }
    }
    let finals: Vec<usize> = (0..=term).collect();
    Ok(Automaton::from_parts(
        alphabet.clone(),
        term + 1,
        0,
        &finals,
        &transitions,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::word_of;

    #[test]
    fn free_shortlex_counts_reduced_words() {
        let m = GroupModel::free(2).unwrap();
        let s = AutomaticStructure::shortlex("f2", m).unwrap();
        // 1, 4, 12, 36 reduced words of lengths 0..=3.
        let words = s.words_up_to(3).unwrap();
        assert_eq!(words.len(), 1 + 4 + 12 + 36);
        assert!(s.accepts(&word_of(s.group(), "abA")));
        assert!(!s.accepts(&word_of(s.group(), "aA")));
    }

    #[test]
    fn abelian_shortlex_is_a_bijective_section() {
        let m = GroupModel::free_abelian(2).unwrap();
        let s = AutomaticStructure::shortlex("z2", m).unwrap();
        assert!(s.accepts(&word_of(s.group(), "aab")));
        assert!(!s.accepts(&word_of(s.group(), "aba")));
        assert!(!s.accepts(&word_of(s.group(), "aA")));
        // Words of length <= 4 biject onto the L1 ball of radius 4.
        let words = s.words_up_to(4).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for w in &words {
            assert!(seen.insert(s.group().evaluate(w)), "duplicate representative");
        }
        // |{(x,y): |x|+|y| <= 4}| = 41.
        assert_eq!(words.len(), 41);
    }

    #[test]
    fn finite_reps_cover_the_group() {
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let m = GroupModel::finite(&rows, None).unwrap();
        let s = AutomaticStructure::shortlex("z3", m).unwrap();
        let words = s.words_up_to(3).unwrap();
        assert_eq!(words.len(), 3); // ε, g1, g2
        for e in [Element::Finite(0), Element::Finite(1), Element::Finite(2)] {
            assert!(s.first_representative(&e, 3).unwrap().is_some());
        }
    }

    #[test]
    fn product_shortlex_concatenates_factors() {
        let f2 = GroupModel::free(2).unwrap();
        let z = GroupModel::free_abelian_marked(1, &[("t", vec![1]), ("T", vec![-1])]).unwrap();
        // The t-marking is the standard rank-1 marking up to labels.
        let p = GroupModel::product_union(&f2, &z).unwrap();
        let s = AutomaticStructure::shortlex("f2xz", p).unwrap();
        assert!(s.accepts(&word_of(s.group(), "abtt")));
        assert!(!s.accepts(&word_of(s.group(), "tab")));
        assert!(!s.accepts(&word_of(s.group(), "tT")));
        let e = s.group().evaluate_str("batT").unwrap();
        let rep = s.first_representative(&e, 6).unwrap().unwrap();
        assert_eq!(s.group().render_word(&rep), "ba");
    }

    #[test]
    fn by_finite_normal_forms() {
        use crate::groups::{VfGenerator, VfPresentation};
        let pres = VfPresentation::new(
            1,
            vec!["b".to_string()],
            vec![
                (1, VfGenerator::Free(1), vec![-1], 1),
                (1, VfGenerator::Free(-1), vec![1], 1),
                (1, VfGenerator::Coset(1), vec![], 0),
            ],
        )
        .unwrap();
        let m = GroupModel::by_finite(pres).unwrap();
        let s = AutomaticStructure::shortlex("dihedral", m).unwrap();
        assert!(s.accepts(&word_of(s.group(), "aab")));
        assert!(!s.accepts(&word_of(s.group(), "aba")));
        assert!(!s.accepts(&word_of(s.group(), "bb")));
        // Each element has exactly one representative.
        let words = s.words_up_to(5).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for w in &words {
            assert!(seen.insert(s.group().evaluate(w)));
        }
        // Forms are a-powers, optionally followed by b: 11 power words of
        // length <= 5 and 9 flipped words a^j·b with |j| <= 4.
        assert_eq!(words.len(), 20);
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let m = GroupModel::free(1).unwrap();
        let other = Automaton::all_words(crate::fsa::Alphabet::new(["x"]).unwrap());
        assert!(matches!(
            AutomaticStructure::new("bad", m, other),
            Err(StructureError::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn representative_lookup_is_shortlex_least() {
        let m = GroupModel::free(1).unwrap();
        // All words over {a, A}, so elements have many spellings.
        let lang = Automaton::all_words(m.alphabet().clone());
        let s = AutomaticStructure::new("z-all", m, lang).unwrap();
        let e = s.group().evaluate_str("a").unwrap();
        let rep = s.first_representative(&e, 4).unwrap().unwrap();
        assert_eq!(s.group().render_word(&rep), "a");
        let reps = s.representatives_of(&e, 3).unwrap();
        // a, aaA, aAa, Aaa.
        assert_eq!(reps.len(), 4);
    }
}
