//! Exact decision procedure for free-group endomorphisms: does the map have
//! the form "conjugate by a fixed word, then apply a signed permutation of
//! the generators"?  Those are precisely the endomorphisms whose geodesic
//! representatives stay synchronously close to the representatives of their
//! images, so the empirical synchronous sweep has an exact counterpart here.
//!
//! The algorithm peels the common conjugator one letter at a time.  Each
//! generator image must reduce to `w·y·w⁻¹` with `y` a single letter; the
//! nonempty `w` must then be nested prefixes of the longest one, whose first
//! letter is peeled off all of them by composing with an inner map.  When
//! nothing is left to peel, the residual single-letter map must be injective
//! on letter bases.  A yes answer is re-verified by rebuilding the images
//! from the returned factorization.

use serde::Serialize;

use crate::groups::{free_inverse, reduced_concat, Element, FreeLetter, GroupKind};

use super::{GroupHomomorphism, HomError};

/// Outcome of [`free_sync_brp_decide`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum FreeSyncDecision {
    /// The map sends `x` to `u·(xσ)·u⁻¹`: `conjugator` is `u` and
    /// `permutation[i]` is the signed letter that generator `i + 1` maps to.
    Yes {
        conjugator: Vec<FreeLetter>,
        permutation: Vec<FreeLetter>,
    },
    /// Not of that form; `reason` names the obstruction.
    No { reason: String },
}

impl FreeSyncDecision {
    pub fn is_yes(&self) -> bool {
        matches!(self, FreeSyncDecision::Yes { .. })
    }
}

/// Decide whether a free-group endomorphism is a conjugation composed with a
/// signed generator permutation.
pub fn free_sync_brp_decide(phi: &GroupHomomorphism) -> Result<FreeSyncDecision, HomError> {
    if phi.source() != phi.target() {
        return Err(HomError::ModelMismatch(
            "the decision procedure needs an endomorphism (source = target)".into(),
        ));
    }
    let GroupKind::Free { rank } = *phi.source().kind() else {
        return Err(HomError::Unsupported(
            "the decision procedure is specific to free models".into(),
        ));
    };

    // Split each generator image into conjugator + single-letter core.
    let mut conjugators: Vec<Vec<FreeLetter>> = Vec::with_capacity(rank);
    let mut cores: Vec<FreeLetter> = Vec::with_capacity(rank);
    for (i, img) in phi.basis_images().iter().enumerate() {
        let Element::Free(word) = img else {
            unreachable!("free-model elements are reduced words");
        };
        let mut lo = 0usize;
        let mut hi = word.len();
        while hi - lo >= 2 && word[lo] == -word[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        match hi - lo {
            0 => {
                return Ok(FreeSyncDecision::No {
                    reason: format!("generator {} maps to the identity", i + 1),
                })
            }
            1 => {
                conjugators.push(word[..lo].to_vec());
                cores.push(word[lo]);
            }
            n => {
                return Ok(FreeSyncDecision::No {
                    reason: format!(
                        "the cyclically reduced core of generator {}'s image has \
                         length {n} (needs a single letter)",
                        i + 1
                    ),
                })
            }
        }
    }

    // Peel the shared conjugator letter by letter.
    let mut peeled: Vec<FreeLetter> = Vec::new();
    loop {
        let z = match (0..rank).max_by_key(|&x| conjugators[x].len()) {
            Some(z) if !conjugators[z].is_empty() => z,
            _ => break,
        };
        let longest = conjugators[z].clone();
        let b = longest[0];
        for x in 0..rank {
            if conjugators[x].is_empty() {
                if cores[x].abs() != b.abs() {
                    return Ok(FreeSyncDecision::No {
                        reason: format!(
                            "generator {} is moved by conjugation while generator {} \
                             maps to a letter that does not absorb it",
                            z + 1,
                            x + 1
                        ),
                    });
                }
            } else if conjugators[x] != longest[..conjugators[x].len()] {
                return Ok(FreeSyncDecision::No {
                    reason: format!(
                        "the conjugators of generators {} and {} are not nested",
                        x + 1,
                        z + 1
                    ),
                });
            }
        }
        for w in conjugators.iter_mut() {
            if !w.is_empty() {
                w.remove(0);
            }
        }
        peeled.push(b);
    }

    // Residual single-letter map: must be injective on letter bases.
    for i in 0..rank {
        for j in (i + 1)..rank {
            if cores[i].abs() == cores[j].abs() {
                return Ok(FreeSyncDecision::No {
                    reason: format!(
                        "generators {} and {} map to the same letter up to \
                         inversion, so the map is not injective",
                        i + 1,
                        j + 1
                    ),
                });
            }
        }
    }

    // Re-verify: u·(xσ)·u⁻¹ must reproduce every generator image.
    let u_inv = free_inverse(&peeled);
    for (i, img) in phi.basis_images().iter().enumerate() {
        let rebuilt = reduced_concat(&reduced_concat(&peeled, &[cores[i]]), &u_inv);
        assert_eq!(
            img,
            &Element::Free(rebuilt),
            "internal error: factorization does not reproduce generator {}",
            i + 1
        );
    }
    Ok(FreeSyncDecision::Yes {
        conjugator: peeled,
        permutation: cores,
    })
}

#[cfg(test)]
mod tests {
    use super::super::hom_of;
    use super::*;
    use crate::groups::GroupModel;

    fn decide(images: &[(&str, &str)]) -> FreeSyncDecision {
        let f2 = GroupModel::free(2).unwrap();
        let phi = hom_of(&f2, &f2, images);
        free_sync_brp_decide(&phi).unwrap()
    }

    #[test]
    fn letter_swap_is_a_permutation() {
        let d = decide(&[("a", "b"), ("b", "a")]);
        assert_eq!(
            d,
            FreeSyncDecision::Yes {
                conjugator: vec![],
                permutation: vec![2, 1],
            }
        );
    }

    #[test]
    fn conjugation_factors_with_identity_permutation() {
        // x ↦ (ab)x(ab)⁻¹ on both generators: a ↦ abaBA, b ↦ abbBA = abA.
        let d = decide(&[("a", "abaBA"), ("b", "abA")]);
        assert_eq!(
            d,
            FreeSyncDecision::Yes {
                conjugator: vec![1, 2],
                permutation: vec![1, 2],
            }
        );
    }

    #[test]
    fn mixed_conjugator_lengths_peel() {
        // a ↦ a (conjugator absorbed by the core), b ↦ aba⁻¹.
        let d = decide(&[("a", "a"), ("b", "abA")]);
        assert_eq!(
            d,
            FreeSyncDecision::Yes {
                conjugator: vec![1],
                permutation: vec![1, 2],
            }
        );
    }

    #[test]
    fn doubling_has_a_long_core() {
        let d = decide(&[("a", "aa"), ("b", "b")]);
        let FreeSyncDecision::No { reason } = d else {
            panic!("expected no: {d:?}");
        };
        assert!(reason.contains("core"), "{reason}");
    }

    #[test]
    fn unabsorbed_fixed_letter_blocks_peeling() {
        // b maps to b⁻¹ with no conjugator, but a's conjugator starts with a:
        // peeling a would move b's image.
        let d = decide(&[("a", "abA"), ("b", "B")]);
        let FreeSyncDecision::No { reason } = d else {
            panic!("expected no: {d:?}");
        };
        assert!(reason.contains("absorb"), "{reason}");
    }

    #[test]
    fn trivial_image_is_rejected() {
        let d = decide(&[("a", ""), ("b", "b")]);
        assert!(!d.is_yes(), "{d:?}");
    }

    #[test]
    fn letter_collapse_is_rejected() {
        let d = decide(&[("a", "a"), ("b", "a")]);
        let FreeSyncDecision::No { reason } = d else {
            panic!("expected no: {d:?}");
        };
        assert!(reason.contains("not injective"), "{reason}");
    }

    #[test]
    fn non_nested_conjugators_are_rejected() {
        // a ↦ (b)a(b)⁻¹, b ↦ (a)b(a)⁻¹: conjugators b and a diverge.
        let d = decide(&[("a", "baB"), ("b", "abA")]);
        let FreeSyncDecision::No { reason } = d else {
            panic!("expected no: {d:?}");
        };
        assert!(reason.contains("nested"), "{reason}");
    }

    #[test]
    fn inversion_permutation_is_accepted() {
        let d = decide(&[("a", "A"), ("b", "b")]);
        assert_eq!(
            d,
            FreeSyncDecision::Yes {
                conjugator: vec![],
                permutation: vec![-1, 2],
            }
        );
    }

    #[test]
    fn inner_constructor_round_trips() {
        let f2 = GroupModel::free(2).unwrap();
        let g = f2.evaluate_str("aBa").unwrap();
        let la = GroupHomomorphism::inner(&f2, &g).unwrap();
        let d = free_sync_brp_decide(&la).unwrap();
        assert_eq!(
            d,
            FreeSyncDecision::Yes {
                conjugator: vec![1, -2, 1],
                permutation: vec![1, 2],
            }
        );
    }

    #[test]
    fn abelian_models_are_rejected() {
        let z = GroupModel::free_abelian(1).unwrap();
        let id = GroupHomomorphism::identity(&z);
        assert!(matches!(
            free_sync_brp_decide(&id),
            Err(HomError::Unsupported(_))
        ));
    }
}
