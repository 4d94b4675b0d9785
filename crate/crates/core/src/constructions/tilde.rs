//! Pulling a structure back through a virtually injective endomorphism.
//!
//! Given a structure for a group and an endomorphism `φ` of that group with
//! finite kernel and quasiconvex image, every element `g` factors as
//! `g = p·z` where `φ(p)` is spelled by the rewriting of the image subgroup
//! and `z` lies in the kernel.  Re-spelling each rewriting letter by a
//! shortest `φ`-preimage word and appending a shortest spelling of each
//! kernel element yields a new rational language that spells the whole
//! source group — the pulled-back structure.
//!
//! [`tilde_structure`] performs the surgery and packages four verification
//! sweeps with the result: rationality (trivially witnessed by the
//! automaton), a rational-section sweep (every element is spelled, with
//! bounded slack), a fellow-traveller sweep of the new language, and an
//! equivalence sweep comparing the `φ`-reinterpretation of the new letters
//! against the rewriting it came from.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::fsa::{concat, union, Alphabet, Automaton, FsaError, Symbol, Word};
use crate::groups::{Element, GroupModel};
use crate::homs::GroupHomomorphism;
use crate::report::CheckReport;
use crate::structures::{AutomaticStructure, EquivalenceMode, SweepOptions};
use crate::subgroups::SubgroupOracle;

use super::{ConstructionError, RewriteSystem};

/// Element cap for the source ball enumerated during preimage search.
const BALL_CAP: usize = 500_000;

/// A structure pulled back through an endomorphism, together with the
/// letter assignments, the kernel spellings and the verification sweeps.
pub struct TildeStructure {
    /// The pulled-back structure on the source group.
    pub structure: AutomaticStructure,
    /// One entry per rewriting letter: its label and the shortest source
    /// word that maps onto it.
    pub c_letters: Vec<(String, String)>,
    /// Shortest spellings of the kernel elements, appended as suffixes.
    pub kernel_words: Vec<String>,
    /// Rationality, rational-section, fellow-traveller and image-equivalence
    /// sweeps, in that order.
    pub checks: Vec<CheckReport>,
    /// The underlying rewriting of the image subgroup.
    pub rewrite: RewriteSystem,
}

/// Pull `s` back through the endomorphism `phi`.
///
/// Fails with [`ConstructionError::InfiniteKernel`] when kernel elements
/// keep appearing out to the search boundary, with
/// [`ConstructionError::NotQuasiconvex`] when the image subgroup fails its
/// sweep, and with [`ConstructionError::PreimageSearch`] when a rewriting
/// letter has no preimage within the searched ball.
pub fn tilde_structure(
    s: &AutomaticStructure,
    phi: &GroupHomomorphism,
    max_len: usize,
) -> Result<TildeStructure, ConstructionError> {
    if phi.source() != phi.target() {
        return Err(ConstructionError::Mismatch(
            "the pull-back needs an endomorphism (equal source and target)".into(),
        ));
    }
    if phi.source() != s.group() {
        return Err(ConstructionError::Mismatch(
            "the endomorphism must act on the structure's group".into(),
        ));
    }
    let model = s.group().clone();
    let alphabet = model.alphabet().clone();
    if !alphabet.has_involution() {
        return Err(ConstructionError::Unsupported(
            "the pull-back needs a formal-inverse pairing on the alphabet".into(),
        ));
    }
    let radius = max_len + 2;

    // Breadth-first sweep of the source ball, layer by layer and in symbol
    // order within a layer, so each element is first reached by its
    // shortlex-least spelling.
    let id = model.identity();
    let mut first: Vec<(Element, Word, usize)> = vec![(id.clone(), Word::new(), 0)];
    let mut seen: HashSet<Element> = HashSet::from([id.clone()]);
    let mut frontier: Vec<usize> = vec![0];
    let mut complete = false;
    for layer in 1..=radius {
        let mut next = Vec::new();
        for &i in frontier.iter() {
            let (e, w) = (first[i].0.clone(), first[i].1.clone());
            for sym in 0..alphabet.len() {
                let e2 = model.multiply(&e, model.evaluate_symbol(sym));
                if seen.insert(e2.clone()) {
                    let mut w2 = w.clone();
                    w2.push(sym);
                    next.push(first.len());
                    first.push((e2, w2, layer));
                }
            }
        }
        if first.len() > BALL_CAP {
            return Err(ConstructionError::Unsupported(format!(
                "preimage search ball exceeded {BALL_CAP} elements at radius {layer}"
            )));
        }
        frontier = next;
        if frontier.is_empty() {
            complete = true;
            break;
        }
    }

    // Kernel scan.  A kernel element still arriving at the boundary of the
    // searched ball (when the ball is not the whole group) is taken as
    // evidence that the kernel keeps growing.
    let images: Vec<Element> = first
        .iter()
        .map(|(e, _, _)| phi.apply(e))
        .collect::<Result<_, _>>()?;
    let kernel: Vec<usize> = (0..first.len()).filter(|&i| images[i] == id).collect();
    if !complete && kernel.iter().any(|&i| first[i].2 + 1 >= radius) {
        let witness = kernel
            .iter()
            .find(|&&i| i != 0)
            .map(|&i| model.render_element(&first[i].0))
            .expect("a boundary kernel element is itself nontrivial");
        return Err(ConstructionError::InfiniteKernel { witness });
    }
    let kernel_syms: Vec<Word> = kernel.iter().map(|&i| first[i].1.clone()).collect();

    // Shortlex-least preimage word per image element: the first spelling to
    // arrive wins, and discovery order is shortlex order.
    let mut preimage: HashMap<Element, Word> = HashMap::new();
    for (i, (_, w, _)) in first.iter().enumerate() {
        preimage.entry(images[i].clone()).or_insert_with(|| w.clone());
    }

    // Rewrite the image subgroup inside `s`.  Membership is answered from
    // the materialized image of the searched ball.
    let members: BTreeSet<Element> = preimage.keys().cloned().collect();
    let h = SubgroupOracle::new(model.clone(), format!("im|≤{radius}"), move |e| {
        members.contains(e)
    });
    let rewrite = RewriteSystem::build(s, h, max_len)?;

    // One new letter per rewriting letter: the shortlex-least preimage word
    // of the canonical orbit member, its formal inverse for the partner.
    // Distinct rewriting letters with the same preimage word share a letter.
    let b_alphabet = rewrite.subgroup_model().alphabet().clone();
    let n_b = b_alphabet.len();
    let mut tilde_words: Vec<Word> = Vec::new();
    let mut sym_by_label: HashMap<String, Symbol> = HashMap::new();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let add_word = |w: Word,
                        tilde_words: &mut Vec<Word>,
                        sym_by_label: &mut HashMap<String, Symbol>|
     -> Symbol {
        let label = alphabet.render(&w);
        *sym_by_label.entry(label).or_insert_with(|| {
            tilde_words.push(w);
            tilde_words.len() - 1
        })
    };
    let mut tilde_of_b: Vec<Option<Symbol>> = vec![None; n_b];
    for i in 0..n_b {
        if tilde_of_b[i].is_some() {
            continue;
        }
        let e_i = rewrite.subgroup_model().evaluate_symbol(i).clone();
        let c = preimage
            .get(&e_i)
            .ok_or_else(|| ConstructionError::PreimageSearch(model.render_element(&e_i)))?
            .clone();
        let c_inv = alphabet
            .inverse_word(&c)
            .expect("involution checked above");
        let si = add_word(c, &mut tilde_words, &mut sym_by_label);
        let sj = add_word(c_inv, &mut tilde_words, &mut sym_by_label);
        pairs.insert((si, sj));
        pairs.insert((sj, si));
        tilde_of_b[i] = Some(si);
        let j = b_alphabet
            .inverse_symbol(i)
            .expect("rewriting letters carry an involution");
        if j != i {
            tilde_of_b[j] = Some(sj);
        }
    }
    let c_letters: Vec<(String, String)> = (0..n_b)
        .map(|i| {
            let t = tilde_of_b[i].expect("every rewriting letter was assigned");
            (
                b_alphabet.label(i).to_string(),
                alphabet.render(&tilde_words[t]),
            )
        })
        .collect();

    // Letters needed by the kernel suffixes (plus formal inverses, so the
    // involution stays total).
    for w in &kernel_syms {
        for &sym in w {
            let inv = alphabet
                .inverse_symbol(sym)
                .expect("involution checked above");
            let si = add_word(vec![sym], &mut tilde_words, &mut sym_by_label);
            let sj = add_word(vec![inv], &mut tilde_words, &mut sym_by_label);
            pairs.insert((si, sj));
            pairs.insert((sj, si));
        }
    }

    let mut t_alphabet = Alphabet::new(tilde_words.iter().map(|w| alphabet.render(w)))
        .map_err(FsaError::from)?;
    let pair_list: Vec<(usize, usize)> = pairs.into_iter().collect();
    t_alphabet
        .set_involution_pairs(&pair_list)
        .map_err(FsaError::from)?;
    let t_images: Vec<Element> = tilde_words.iter().map(|w| model.evaluate(w)).collect();
    let t_model = GroupModel::custom(model.kind().clone(), t_alphabet.clone(), t_images)?;

    // The language: the rewriting relabelled letter for letter, followed by
    // one kernel spelling.
    let b_map: Vec<Symbol> = tilde_of_b
        .iter()
        .map(|o| o.expect("every rewriting letter was assigned"))
        .collect();
    let relabelled = rewrite
        .rewritten_language()
        .relabel(t_alphabet.clone(), &b_map)?;
    let mut kernel_lang = Automaton::epsilon_language(t_alphabet.clone());
    for w in &kernel_syms {
        if w.is_empty() {
            continue;
        }
        let mapped: Word = w
            .iter()
            .map(|&sym| sym_by_label[alphabet.label(sym)])
            .collect();
        kernel_lang = union(&kernel_lang, &Automaton::literal(t_alphabet.clone(), &mapped))?;
    }
    let lang = concat(&relabelled, &kernel_lang)?.minimize()?;
    let tilde = AutomaticStructure::new(format!("{}~", s.name()), t_model, lang)?;

    let kernel_words: Vec<String> = kernel_syms.iter().map(|w| alphabet.render(w)).collect();

    // Verification sweeps.
    let opts = SweepOptions::to_length(max_len);
    let mut checks = Vec::new();
    checks.push(
        CheckReport::constant("rationality", 0.0, 0).with_note(format!(
            "recognized by {} states over {} letters",
            tilde.language().num_states(),
            tilde.group().alphabet().len()
        )),
    );
    let section_radius = max_len.min(4) as u32;
    checks.push(tilde.rational_section_check(section_radius, &opts)?);
    checks.push(tilde.ft_check(&opts, false)?);
    let phi_images: Vec<Element> = tilde_words.iter().map(|w| phi.apply_word(w)).collect();
    let reinterpreted = GroupModel::custom(
        model.kind().clone(),
        tilde.group().alphabet().clone(),
        phi_images,
    )?;
    let induced = AutomaticStructure::new(
        format!("{}~^φ", s.name()),
        reinterpreted,
        tilde.language().clone(),
    )?;
    checks.push(induced.equivalence_check(
        &rewrite.rewritten_structure()?,
        EquivalenceMode::Synchronous,
        &SweepOptions::to_length(max_len.min(6)),
    )?);

    Ok(TildeStructure {
        structure: tilde,
        c_letters,
        kernel_words,
        checks,
        rewrite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::word_of;
    use crate::homs::hom_of;

    fn f2_shortlex() -> AutomaticStructure {
        AutomaticStructure::shortlex("f2", GroupModel::free(2).unwrap()).unwrap()
    }

    #[test]
    fn identity_pull_back_changes_nothing() {
        let s = f2_shortlex();
        let id = GroupHomomorphism::identity(s.group());
        let t = tilde_structure(&s, &id, 4).unwrap();
        assert_eq!(
            t.c_letters,
            vec![
                ("a".to_string(), "a".to_string()),
                ("A".to_string(), "A".to_string()),
                ("b".to_string(), "b".to_string()),
                ("B".to_string(), "B".to_string()),
            ]
        );
        assert_eq!(t.kernel_words, vec!["ε".to_string()]);
        assert_eq!(t.checks.len(), 4);
        for c in &t.checks {
            assert!(c.is_constant(), "{c:?}");
        }
        // Same language, letter for letter.
        assert_eq!(
            t.structure.words_up_to(3).unwrap().len(),
            s.words_up_to(3).unwrap().len()
        );
        assert!(t.structure.accepts(&word_of(t.structure.group(), "abA")));
        assert!(!t.structure.accepts(&word_of(t.structure.group(), "aA")));
    }

    #[test]
    fn conjugation_pull_back_spells_preimages() {
        let s = f2_shortlex();
        let a = s.group().evaluate_str("a").unwrap();
        let lambda = GroupHomomorphism::inner(s.group(), &a).unwrap();
        let t = tilde_structure(&s, &lambda, 6).unwrap();
        assert_eq!(
            t.c_letters,
            vec![
                ("a".to_string(), "a".to_string()),
                ("A".to_string(), "A".to_string()),
                ("b".to_string(), "Aba".to_string()),
                ("B".to_string(), "ABa".to_string()),
            ]
        );
        assert_eq!(t.kernel_words, vec!["ε".to_string()]);
        for c in &t.checks {
            assert!(c.is_constant(), "{c:?}");
        }
        // The letter written "Aba" moves by b once reinterpreted through
        // the conjugation, so a·(Aba)·A spells the source element b.
        let g = t.structure.group();
        let w = word_of(g, "a Aba A");
        assert!(t.structure.accepts(&w));
        assert_eq!(g.render_element(&g.evaluate(&w)), "b");
        let eq = &t.checks[3];
        assert_eq!(eq.check, "equivalence[synchronous]");
        assert!(eq.constant_value().unwrap() <= 4.0, "{eq:?}");
    }

    #[test]
    fn collapsing_endomorphism_is_rejected() {
        let s = f2_shortlex();
        let collapse = hom_of(s.group(), s.group(), &[("a", "a"), ("b", "a")]);
        match tilde_structure(&s, &collapse, 4) {
            Err(ConstructionError::InfiniteKernel { witness }) => {
                assert_eq!(witness, "aB");
            }
            Err(other) => panic!("wrong rejection: {other}"),
            Ok(_) => panic!("the kernel of the collapse is infinite"),
        }
    }
}
