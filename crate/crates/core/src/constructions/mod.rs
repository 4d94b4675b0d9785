//! New structures from old: direct products by convolution, quasiconvex
//! subgroup rewriting, structures induced along a homomorphism, and the
//! pulled-back structure for a virtually injective homomorphism.

mod rewrite;
mod tilde;

pub use rewrite::RewriteSystem;
pub use tilde::{tilde_structure, TildeStructure};

use crate::fsa::{convolve, ConvolutionAlphabet, FsaError};
use crate::groups::{GroupError, GroupModel};
use crate::homs::GroupHomomorphism;
use crate::report::CheckReport;
use crate::structures::{AutomaticStructure, StructureError, SweepOptions};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructionError {
    /// The subgroup failed its quasiconvexity sweep; the report carries the
    /// growth trace and witness.
    #[error("the subgroup is not quasiconvex within the tested bound")]
    NotQuasiconvex(Box<CheckReport>),
    /// The re-marked language failed its fellow-traveller sweep.
    #[error("the induced language is not a fellow-traveller structure of the image")]
    InducedUnstable(Box<CheckReport>),
    /// Kernel elements keep appearing out to the search boundary.
    #[error("the kernel is not finite within the search radius (witness: {witness})")]
    InfiniteKernel { witness: String },
    /// No preimage was found within the search radius.
    #[error("no preimage within the search radius for {0}")]
    PreimageSearch(String),
    /// A word handed to a rewriting system falls outside its domain.
    #[error("word outside the rewriting domain: {0}")]
    OutsideDomain(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Fsa(#[from] FsaError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Hom(#[from] crate::homs::HomError),
}

/// The product structure: the direct product model of the two groups with
/// the padded convolution of the two languages.  A letter `(a,b)` moves both
/// components, `(a,$)` only the left, `($,b)` only the right.
pub fn product_structure(
    s1: &AutomaticStructure,
    s2: &AutomaticStructure,
) -> Result<AutomaticStructure, ConstructionError> {
    let model = GroupModel::product_convolution(s1.group(), s2.group())?;
    let ca = ConvolutionAlphabet::new(s1.group().alphabet(), s2.group().alphabet())
        .map_err(FsaError::from)?;
    debug_assert_eq!(ca.alphabet(), model.alphabet());
    let lang = convolve(&ca, s1.language(), s2.language())?;
    Ok(AutomaticStructure::new(
        format!("{}⋄{}", s1.name(), s2.name()),
        model,
        lang,
    )?)
}

/// Re-mark a structure's alphabet through a homomorphism: the same language,
/// with each letter now evaluating to the image of its old meaning.  The
/// result presents the image group; the fellow-traveller sweep that
/// justifies calling it a structure is run to `max_len` and returned, and a
/// sweep failure rejects the construction.
pub fn induced_structure(
    s: &AutomaticStructure,
    phi: &GroupHomomorphism,
    max_len: usize,
) -> Result<(AutomaticStructure, CheckReport), ConstructionError> {
    if phi.source() != s.group() {
        return Err(ConstructionError::Mismatch(
            "the homomorphism's source must be the structure's group".into(),
        ));
    }
    let model = GroupModel::custom(
        phi.target().kind().clone(),
        s.group().alphabet().clone(),
        phi.symbol_images().to_vec(),
    )?;
    let induced = AutomaticStructure::new(format!("{}^φ", s.name()), model, s.language().clone())?;
    let mut report = induced.ft_check(&SweepOptions::to_length(max_len), false)?;
    report.check = format!("induced-{}", report.check);
    if report.is_constant() {
        Ok((induced, report))
    } else {
        Err(ConstructionError::InducedUnstable(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsa::Symbol;
    use crate::groups::word_of;
    use crate::homs::hom_of;
    use crate::structures::EquivalenceMode;

    fn z_marked(letter: char) -> GroupModel {
        let up = letter.to_ascii_uppercase().to_string();
        GroupModel::free_abelian_marked(
            1,
            &[(&letter.to_string(), vec![1]), (&up, vec![-1])],
        )
        .unwrap()
    }

    #[test]
    fn product_words_evaluate_componentwise() {
        let sa = AutomaticStructure::shortlex("za", z_marked('a')).unwrap();
        let sb = AutomaticStructure::shortlex("zb", z_marked('b')).unwrap();
        let prod = product_structure(&sa, &sb).unwrap();
        // a²⋄b⁻¹ convolves to (a,B)(a,$) and evaluates to (2,−1).
        let w = word_of(prod.group(), "(a,B) (a,$)");
        assert!(prod.accepts(&w));
        assert_eq!(prod.group().render_element(&prod.group().evaluate(&w)), "((2),(-1))");
    }

    #[test]
    fn product_ft_constant_is_at_most_the_factor_maximum() {
        let sa = AutomaticStructure::shortlex("za", z_marked('a')).unwrap();
        let sb = AutomaticStructure::shortlex("zb", z_marked('b')).unwrap();
        let opts = SweepOptions::to_length(6);
        let fa = sa.ft_check(&opts, false).unwrap().constant_value().unwrap();
        let fb = sb.ft_check(&opts, false).unwrap().constant_value().unwrap();
        let prod = product_structure(&sa, &sb).unwrap();
        let fp = prod.ft_check(&opts, false).unwrap().constant_value().unwrap();
        assert!(fp <= fa.max(fb), "product {fp} vs factors {fa},{fb}");
    }

    #[test]
    fn product_point_distance_is_the_component_maximum() {
        use crate::groups::Element;

        fn spell(m: &GroupModel, n: i64) -> Vec<Symbol> {
            let letter = if n >= 0 { m.alphabet().label(0) } else { m.alphabet().label(1) };
            word_of(m, &letter.repeat(n.unsigned_abs() as usize))
        }

        let sa = AutomaticStructure::shortlex("za", z_marked('a')).unwrap();
        let sb = AutomaticStructure::shortlex("zb", z_marked('b')).unwrap();
        let prod = product_structure(&sa, &sb).unwrap();
        let oracle = prod.oracle();
        let la = sa.group();
        let lb = sb.group();
        let oa = sa.oracle();
        let ob = sb.oracle();
        for (x1, y1, x2, y2) in [(0i64, 0i64, 3i64, -2i64), (1, 1, -2, 2), (2, -3, 2, 1)] {
            let u = Element::Pair(
                Box::new(la.evaluate(&spell(la, x1))),
                Box::new(lb.evaluate(&spell(lb, y1))),
            );
            let v = Element::Pair(
                Box::new(la.evaluate(&spell(la, x2))),
                Box::new(lb.evaluate(&spell(lb, y2))),
            );
            let want = oa
                .distance(&la.evaluate(&spell(la, x1)), &la.evaluate(&spell(la, x2)), 20)
                .unwrap()
                .max(
                    ob.distance(&lb.evaluate(&spell(lb, y1)), &lb.evaluate(&spell(lb, y2)), 20)
                        .unwrap(),
                );
            assert_eq!(oracle.distance(&u, &v, 20), Some(want));
        }
    }

    #[test]
    fn induced_through_identity_is_unchanged() {
        let m = GroupModel::free(2).unwrap();
        let s = AutomaticStructure::shortlex("f2", m.clone()).unwrap();
        let id = GroupHomomorphism::identity(&m);
        let (ind, report) = induced_structure(&s, &id, 6).unwrap();
        assert!(report.is_constant());
        assert_eq!(ind.group().alphabet(), s.group().alphabet());
        let opts = SweepOptions::to_length(5);
        let eq = ind.equivalence_check(&s, EquivalenceMode::Synchronous, &opts).unwrap();
        assert!(eq.is_constant(), "{eq:?}");
    }

    #[test]
    fn induced_projection_collapses_a_factor_and_stays_stable() {
        let zz = GroupModel::product_union(&z_marked('a'), &z_marked('b')).unwrap();
        let s = AutomaticStructure::shortlex("zz", zz.clone()).unwrap();
        let proj = hom_of(&zz, &zz, &[("a", "a"), ("b", "")]);
        let (ind, report) = induced_structure(&s, &proj, 8).unwrap();
        assert!(report.is_constant(), "{report:?}");
        // The letter b now spells the identity.
        let w = word_of(ind.group(), "abb");
        assert_eq!(ind.group().render_element(&ind.group().evaluate(&w)), "((1),(0))");
    }

    #[test]
    fn induced_structure_can_be_rejected() {
        // Collapse F2 onto Z via a,b ↦ a.  The reduced words of F2 re-marked
        // this way give Z wildly detouring spellings (b⁻¹-letters walk the
        // wrong way), so the fellow-traveller sweep must fail.
        let f2 = GroupModel::free(2).unwrap();
        let z = GroupModel::free_abelian(1).unwrap();
        let s = AutomaticStructure::shortlex("f2", f2.clone()).unwrap();
        let a = z.evaluate_str("a").unwrap();
        let neg = z.invert(&a);
        let collapse = GroupHomomorphism::new(
            f2.clone(),
            z.clone(),
            vec![a.clone(), neg.clone(), a, neg],
        )
        .unwrap();
        match induced_structure(&s, &collapse, 8) {
            Err(ConstructionError::InducedUnstable(report)) => {
                assert!(!report.is_constant());
            }
            Err(other) => panic!("wrong rejection: {other}"),
            Ok(_) => panic!("expected the sweep to reject the collapse"),
        }
    }
}
