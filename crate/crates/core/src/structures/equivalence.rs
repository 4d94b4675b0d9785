//! Comparing two structures that present the same group.
//!
//! Two languages of normal forms are interchangeable when words for nearby
//! elements stay close *across* the languages.  The synchronous test runs
//! the fellow-traveller sweep on the union language; the asynchronous test
//! matches each word of one language against same-endpoint words of the
//! other and scores the best alignment (a Hausdorff-style bottleneck).

use super::checks::{async_bottleneck, SweepOptions};
use super::{AutomaticStructure, StructureError};
use crate::fsa::{union as language_union, Alphabet, Symbol};
use crate::groups::{Element, GroupModel, PathTrace};
use crate::report::{CheckReport, Witness};
use std::collections::HashMap;

/// Which reading discipline to use when comparing structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceMode {
    /// Paired words are read in step.
    Synchronous,
    /// Paired words may idle against each other.
    Asynchronous,
}

impl AutomaticStructure {
    /// Model over the union-by-label of the two marked alphabets, with the
    /// symbol maps of each side into it.  Shared labels must evaluate to the
    /// same group element.
    fn merged_model(
        &self,
        other: &Self,
    ) -> Result<(GroupModel, Vec<Symbol>, Vec<Symbol>), StructureError> {
        if self.group.kind() != other.group.kind() {
            return Err(StructureError::Unsupported(
                "structures present different groups".into(),
            ));
        }
        let (merged, lmap, rmap) =
            Alphabet::merged(self.group.alphabet(), other.group.alphabet())
                .map_err(crate::fsa::FsaError::from)?;
        let mut images: Vec<Option<Element>> = vec![None; merged.len()];
        for (s, &t) in lmap.iter().enumerate() {
            images[t] = Some(self.group.evaluate_symbol(s).clone());
        }
        for (s, &t) in rmap.iter().enumerate() {
            let img = other.group.evaluate_symbol(s);
            match &images[t] {
                Some(e) if e != img => {
                    return Err(StructureError::Unsupported(format!(
                        "label {:?} evaluates differently in the two structures",
                        merged.label(t)
                    )))
                }
                _ => images[t] = Some(img.clone()),
            }
        }
        let images: Vec<Element> = images.into_iter().map(Option::unwrap).collect();
        let model = GroupModel::custom(self.group.kind().clone(), merged, images)?;
        Ok((model, lmap, rmap))
    }

    /// The union structure: merged alphabet, union language.
    pub fn union_structure(&self, other: &Self) -> Result<AutomaticStructure, StructureError> {
        let (model, lmap, rmap) = self.merged_model(other)?;
        let l1 = self.language.relabel(model.alphabet().clone(), &lmap)?;
        let l2 = other.language.relabel(model.alphabet().clone(), &rmap)?;
        let lang = language_union(&l1, &l2)?.minimize()?;
        AutomaticStructure::new(
            format!("{}∪{}", self.name, other.name),
            model,
            lang,
        )
    }

    /// Are the two structures interchangeable presentations of the group?
    pub fn equivalence_check(
        &self,
        other: &Self,
        mode: EquivalenceMode,
        opts: &SweepOptions,
    ) -> Result<CheckReport, StructureError> {
        match mode {
            EquivalenceMode::Synchronous => {
                let u = self.union_structure(other)?;
                let mut r = u.ft_check(opts, false)?;
                r.check = "equivalence[synchronous]".into();
                Ok(r.with_note(format!(
                    "fellow-traveller sweep over the union of {} and {}",
                    self.name, other.name
                )))
            }
            EquivalenceMode::Asynchronous => self.hausdorff_check(other, opts),
        }
    }

    /// Asynchronous Hausdorff comparison: each word of either language is
    /// matched against the best-aligned same-endpoint word of the other,
    /// and the worst such score is reported.  Probe words whose endpoint
    /// the other language does not spell within the bound are skipped with
    /// a note (length bounds mean the windows need not line up).
    pub fn hausdorff_check(
        &self,
        other: &Self,
        opts: &SweepOptions,
    ) -> Result<CheckReport, StructureError> {
        let (model, lmap, rmap) = self.merged_model(other)?;
        let oracle = crate::groups::DistanceOracle::new(&model);
        let id = model.identity();
        let name = "equivalence[asynchronous]";

        let relabel = |w: &[Symbol], map: &[Symbol]| -> Vec<Symbol> {
            w.iter().map(|&s| map[s]).collect()
        };
        let words_a: Vec<Vec<Symbol>> = self
            .words_up_to(opts.max_len)?
            .iter()
            .map(|w| relabel(w, &lmap))
            .collect();
        let words_b: Vec<Vec<Symbol>> = other
            .words_up_to(opts.max_len)?
            .iter()
            .map(|w| relabel(w, &rmap))
            .collect();
        let bucket = |words: &[Vec<Symbol>]| -> HashMap<Element, Vec<usize>> {
            let mut out: HashMap<Element, Vec<usize>> = HashMap::new();
            for (i, w) in words.iter().enumerate() {
                out.entry(model.evaluate(w)).or_default().push(i);
            }
            out
        };
        let by_a = bucket(&words_a);
        let by_b = bucket(&words_b);

        let mut best_at = vec![0u32; opts.max_len + 1];
        let mut worst: Option<(u32, String, String, u32)> = None;
        let mut probes = 0usize;
        let mut skipped = 0usize;
        let mut direction = |probe_words: &[Vec<Symbol>],
                             candidates: &HashMap<Element, Vec<usize>>,
                             cand_words: &[Vec<Symbol>]| {
            for u in probe_words {
                let e = model.evaluate(u);
                let Some(cands) = candidates.get(&e) else {
                    skipped += 1;
                    continue;
                };
                probes += 1;
                let tu = PathTrace::from_word(&model, &id, u);
                let mut best: Option<(u32, usize, u32)> = None;
                for &vi in cands {
                    let tv = PathTrace::from_word(&model, &id, &cand_words[vi]);
                    let (score, arg) = async_bottleneck(&oracle, &tu, &tv, opts.cap);
                    if best.map_or(true, |(s, _, _)| score < s) {
                        best = Some((score, vi, arg));
                    }
                    if score == 0 {
                        break;
                    }
                }
                let (score, vi, arg) = best.expect("candidate list is non-empty");
                best_at[u.len()] = best_at[u.len()].max(score);
                if worst.as_ref().map_or(true, |w| score > w.0) {
                    worst = Some((
                        score,
                        model.render_word(u),
                        model.render_word(&cand_words[vi]),
                        arg,
                    ));
                }
            }
        };
        direction(&words_a, &by_b, &words_b);
        direction(&words_b, &by_a, &words_a);

        let trace = super::checks::prefix_max_trace(&best_at, opts.max_len);
        let value = trace.points.last().map_or(0.0, |&(_, v)| v);
        let mut report = if trace.looks_divergent() {
            let (score, left, right, prefix) = worst.expect("divergent trace implies a pair");
            CheckReport::failure(
                name,
                Witness::WordPair {
                    left,
                    right,
                    offset: String::new(),
                    prefix,
                    distance: score as f64,
                },
            )
        } else {
            CheckReport::constant(name, value, opts.max_len as u32)
        };
        report = report
            .with_trace(trace)
            .with_note(format!("{probes} probe words aligned across the languages"));
        if skipped > 0 {
            report = report.with_note(format!(
                "{skipped} probe words had no same-endpoint partner within length {} (window artifact, not counted)",
                opts.max_len
            ));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsa::{concat, star, union, Automaton};
    use crate::groups::word_of;

    /// `a* ∪ A*` (shortlex) and the slow spellings `(aAa)* ∪ (AaA)*`.
    fn z_pair() -> (AutomaticStructure, AutomaticStructure) {
        let m = GroupModel::free_abelian(1).unwrap();
        let s0 = AutomaticStructure::shortlex("z-geo", m.clone()).unwrap();
        let a = m.alphabet().clone();
        let slow_pos = star(&Automaton::literal(a.clone(), &word_of(&m, "aAa"))).unwrap();
        let slow_neg = star(&Automaton::literal(a.clone(), &word_of(&m, "AaA"))).unwrap();
        let lang = union(&slow_pos, &slow_neg).unwrap();
        let s1 = AutomaticStructure::new("z-slow", m, lang).unwrap();
        (s0, s1)
    }

    #[test]
    fn identical_structures_are_sync_equivalent() {
        let m = GroupModel::free_abelian(1).unwrap();
        let s0 = AutomaticStructure::shortlex("z1", m.clone()).unwrap();
        let s1 = AutomaticStructure::shortlex("z2", m).unwrap();
        let r = s0
            .equivalence_check(&s1, EquivalenceMode::Synchronous, &SweepOptions::to_length(8))
            .unwrap();
        assert_eq!(r.constant_value(), Some(1.0), "{r:?}");
    }

    #[test]
    fn pacing_mismatch_fails_sync_but_passes_async() {
        let (s0, s1) = z_pair();
        let opts = SweepOptions::to_length(12);
        let sync = s0
            .equivalence_check(&s1, EquivalenceMode::Synchronous, &opts)
            .unwrap();
        assert!(!sync.is_constant(), "{sync:?}");

        let asy = s0
            .equivalence_check(&s1, EquivalenceMode::Asynchronous, &opts)
            .unwrap();
        assert_eq!(asy.constant_value(), Some(1.0), "{asy:?}");
    }

    #[test]
    fn union_structure_merges_label_by_label() {
        let (s0, s1) = z_pair();
        let u = s0.union_structure(&s1).unwrap();
        assert_eq!(u.group().alphabet().len(), 2);
        assert!(u.accepts(&word_of(u.group(), "aaa")));
        assert!(u.accepts(&word_of(u.group(), "aAa")));
        assert!(!u.accepts(&word_of(u.group(), "aA")));
    }

    #[test]
    fn different_groups_are_rejected() {
        let z = AutomaticStructure::shortlex("z", GroupModel::free_abelian(1).unwrap()).unwrap();
        let f = AutomaticStructure::shortlex("f", GroupModel::free(1).unwrap()).unwrap();
        assert!(f.union_structure(&z).is_err());
    }

    #[test]
    fn disjoint_alphabets_merge_side_by_side() {
        // Same group (Z), different labels: a/A vs t/T.
        let z1 = GroupModel::free_abelian(1).unwrap();
        let z2 = GroupModel::free_abelian_marked(1, &[("t", vec![1]), ("T", vec![-1])]).unwrap();
        let s1 = AutomaticStructure::shortlex("za", z1).unwrap();
        let s2 = AutomaticStructure::shortlex("zt", z2).unwrap();
        let u = s1.union_structure(&s2).unwrap();
        assert_eq!(u.group().alphabet().len(), 4);
        assert!(u.accepts(&word_of(u.group(), "aa")));
        assert!(u.accepts(&word_of(u.group(), "tt")));
        let r = s1
            .equivalence_check(&s2, EquivalenceMode::Asynchronous, &SweepOptions::to_length(8))
            .unwrap();
        assert_eq!(r.constant_value(), Some(0.0), "{r:?}");
    }

    #[test]
    fn truncated_language_is_reported_missing_only_as_skip() {
        // Candidate longer than the window: single-letter doubling marks.
        let m = GroupModel::free_abelian(1).unwrap();
        let geo = AutomaticStructure::shortlex("geo", m.clone()).unwrap();
        let a = m.alphabet().clone();
        let even = star(&Automaton::literal(a.clone(), &word_of(&m, "aa"))).unwrap();
        let opt_a = union(
            &Automaton::epsilon_language(a.clone()),
            &Automaton::literal(a.clone(), &word_of(&m, "a")),
        )
        .unwrap();
        let slow2 = concat(&even, &opt_a).unwrap();
        // slow2 = (aa)*(ε|a) covers n >= 0 only; negative endpoints skip.
        let s2 = AutomaticStructure::new("nonneg", m, slow2).unwrap();
        let r = geo
            .hausdorff_check(&s2, &SweepOptions::to_length(6))
            .unwrap();
        assert!(r.notes.iter().any(|n| n.contains("no same-endpoint partner")), "{r:?}");
    }
}
